//! Shared plumbing for the optimizers: search boxes, call traces, and
//! cooperative cancellation.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::evaluator::Evaluator;
use crate::orbits::DesignVector;

/// Half-width of the box on each ALR coordinate.
pub const ALR_BOUND: f64 = 6.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::Config("bounds need matching, non-empty lower and upper vectors".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l.is_finite() && u.is_finite() && l < u)) {
            return Err(Error::Config("every bound needs finite lower < upper".into()));
        }
        Ok(Self { lower, upper })
    }

    pub fn unit(dim: usize) -> Self {
        Self { lower: vec![0.0; dim], upper: vec![1.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(&l, &u)| rng.random_range(l..=u)).collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().zip(&self.lower).zip(&self.upper).all(|((v, l), u)| v >= l && v <= u)
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for ((v, &l), &u) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(l, u);
        }
    }

    /// Affine map onto the unit cube.
    pub fn normalize(&self, x: &[f64]) -> Vec<f64> {
        x.iter().enumerate().map(|(i, v)| (v - self.lower[i]) / self.width(i)).collect()
    }

    pub fn denormalize(&self, u: &[f64]) -> Vec<f64> {
        u.iter().enumerate().map(|(i, v)| (self.lower[i] + v * self.width(i)).clamp(self.lower[i], self.upper[i])).collect()
    }
}

/// θ ∈ [0, 180]^D followed by y ∈ [−6, 6]^(D−1).
pub fn constellation_bounds(orbits: usize) -> Result<Bounds> {
    if orbits == 0 {
        return Err(Error::Config("at least one orbit is required".into()));
    }
    let mut lower = vec![0.0; orbits];
    let mut upper = vec![180.0; orbits];
    lower.extend(std::iter::repeat_n(-ALR_BOUND, orbits - 1));
    upper.extend(std::iter::repeat_n(ALR_BOUND, orbits - 1));
    Bounds::new(lower, upper)
}

/// Wraps an evaluator as a point objective over [`constellation_bounds`].
pub fn constellation_objective(evaluator: &Evaluator, orbits: usize) -> impl Fn(&[f64]) -> Result<f64> + Sync + '_ {
    move |point: &[f64]| {
        let design = DesignVector::from_point(point, orbits)?;
        Ok(evaluator.evaluate(&design)?.mean_rate)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchRow {
    /// 1-based.
    pub call_index: usize,
    pub point: Vec<f64>,
    pub value: f64,
    pub best_so_far: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SearchTrace {
    pub rows: Vec<SearchRow>,
    /// False when the run stopped before spending its budget.
    pub completed: bool,
}

impl SearchTrace {
    pub fn push(&mut self, point: Vec<f64>, value: f64) {
        let best_so_far = self.rows.last().map_or(value, |r| r.best_so_far.max(value));
        self.rows.push(SearchRow { call_index: self.rows.len() + 1, point, value, best_so_far });
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// First row attaining the final best value.
    pub fn best(&self) -> Option<&SearchRow> {
        let last = self.rows.last()?.best_so_far;
        self.rows.iter().find(|r| r.value == last)
    }

    pub fn best_value(&self) -> Option<f64> {
        self.rows.last().map(|r| r.best_so_far)
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunControl {
    stop: Arc<AtomicBool>,
}

impl RunControl {
    pub fn new() -> Self {
        Self::default()
    }

    /// A control sharing an existing flag, e.g. one set from a signal handler.
    pub fn from_flag(stop: Arc<AtomicBool>) -> Self {
        Self { stop }
    }

    pub fn request_stop(&self) {
        self.stop.store(true, Ordering::SeqCst);
    }

    pub fn should_stop(&self) -> bool {
        self.stop.load(Ordering::SeqCst)
    }
}

/// An objective error together with everything evaluated before it.
#[derive(Debug, thiserror::Error)]
#[error("{error}")]
pub struct RunFailure<T: std::fmt::Debug = SearchTrace> {
    #[source]
    pub error: Error,
    pub partial: T,
}

/// Evaluates a batch in order, appending successes to the trace until the
/// first error.
pub(crate) fn evaluate_batch<F>(
    objective: &F,
    points: Vec<Vec<f64>>,
    exec: crate::Exec,
    trace: &mut SearchTrace,
) -> std::result::Result<Vec<f64>, Error>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let results = crate::par::map(exec, &points, |p| objective(p));
    let mut values = Vec::with_capacity(points.len());
    for (point, result) in points.into_iter().zip(results) {
        let value = result.and_then(|v| if v.is_nan() { Err(Error::Objective("objective returned NaN".into())) } else { Ok(v) })?;
        trace.push(point, value);
        values.push(value);
    }
    Ok(values)
}
