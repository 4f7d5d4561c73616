//! Constellation design for dual-downlink entanglement distribution.
//!
//! A constellation is a set of circular orbit groups (one inclination each)
//! sharing a fixed satellite budget. The [`evaluator`] simulates one day of
//! greedy dual-downlink scheduling against a ground-station set and reports
//! the mean delivered EPR-pair rate; [`bo`] and [`ga`] search inclinations
//! plus per-orbit allocations (through the additive log-ratio transform in
//! [`orbits`]), and [`baselines`] provides the naive comparators.

pub mod baselines;
pub mod bo;
pub mod error;
pub mod evaluator;
pub mod ga;
pub mod gp;
pub mod linkmodel;
pub mod optim;
pub mod orbits;
pub mod par;
pub mod scheduler;
pub mod search;
pub mod stations;
pub mod trace;

pub use error::{Error, Result};
pub use par::Exec;
