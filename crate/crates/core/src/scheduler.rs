//! Per-timestep assignment of satellites to station pairs.
//!
//! Each satellite carries one transmitter pair and each station one
//! receiver. Candidates are accepted greedily in descending rate order and
//! skipped when their satellite or either station is already taken, so a
//! satellite blocked on its best pair falls back to its next-best one.

use std::cmp::Ordering;

use crate::linkmodel::{LinkModel, StationSite};
use crate::orbits::SatelliteState;
use crate::stations::GroundStationSet;

/// One satellite serving one unordered station pair.
///
/// `stations` holds indices into the station set ordered so the first id
/// sorts before the second; `id_ranks` carries the matching lexicographic
/// ranks used for deterministic tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateAssignment {
    pub satellite_index: usize,
    pub stations: [usize; 2],
    pub id_ranks: [u32; 2],
    pub rate: f64,
}

impl CandidateAssignment {
    fn tiebreak_key(&self) -> (usize, u32, u32) {
        (self.satellite_index, self.id_ranks[0], self.id_ranks[1])
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Schedule {
    pub timestep_index: usize,
    pub assignments: Vec<CandidateAssignment>,
}

impl Schedule {
    pub fn total_rate(&self) -> f64 {
        schedule_total_rate(self)
    }
}

/// Precomputed station frames for repeated candidate enumeration.
#[derive(Debug, Clone)]
pub struct StationSites {
    sites: Vec<StationSite>,
    ranks: Vec<u32>,
    /// Station indices sorted by id.
    by_id: Vec<usize>,
}

impl StationSites {
    pub fn new(stations: &GroundStationSet) -> Self {
        let sites = stations.stations().iter().map(StationSite::new).collect();
        let ranks: Vec<u32> = (0..stations.len()).map(|i| stations.id_rank(i)).collect();
        let mut by_id: Vec<usize> = (0..stations.len()).collect();
        by_id.sort_by_key(|&i| ranks[i]);
        Self { sites, ranks, by_id }
    }

    /// Candidates for the given satellites, ordered by satellite index and
    /// then by station-id pair.
    pub fn candidates(&self, sats: &[SatelliteState], model: &dyn LinkModel) -> Vec<CandidateAssignment> {
        let mut out = Vec::new();
        let mut visible: Vec<(usize, f64)> = Vec::new();
        let min_el = model.min_elevation_deg();
        let source = model.source_pair_rate();
        for (sat_index, sat) in sats.iter().enumerate() {
            visible.clear();
            for &st in &self.by_id {
                let geom = self.sites[st].geometry(&sat.position, min_el);
                if geom.visible {
                    if let Ok(eta) = model.efficiency(&geom) {
                        visible.push((st, eta));
                    }
                }
            }
            for (i, &(a, eta_a)) in visible.iter().enumerate() {
                for &(b, eta_b) in &visible[i + 1..] {
                    let rate = source * (eta_a * eta_b);
                    if rate > 0.0 {
                        out.push(CandidateAssignment {
                            satellite_index: sat_index,
                            stations: [a, b],
                            id_ranks: [self.ranks[a], self.ranks[b]],
                            rate,
                        });
                    }
                }
            }
        }
        out
    }
}

pub fn enumerate_candidates(
    sats: &[SatelliteState],
    stations: &GroundStationSet,
    model: &dyn LinkModel,
) -> Vec<CandidateAssignment> {
    StationSites::new(stations).candidates(sats, model)
}

fn greedy_order(a: &CandidateAssignment, b: &CandidateAssignment) -> Ordering {
    b.rate.total_cmp(&a.rate).then_with(|| a.tiebreak_key().cmp(&b.tiebreak_key()))
}

/// Rate-descending greedy matching; the result never reuses a satellite or
/// a station and does not depend on the input order.
pub fn greedy_schedule(candidates: &[CandidateAssignment]) -> Schedule {
    let mut order: Vec<&CandidateAssignment> = candidates.iter().collect();
    order.sort_unstable_by(|a, b| greedy_order(a, b));

    let sat_slots = candidates.iter().map(|c| c.satellite_index + 1).max().unwrap_or(0);
    let station_slots = candidates.iter().map(|c| c.stations[0].max(c.stations[1]) + 1).max().unwrap_or(0);
    let mut sat_used = vec![false; sat_slots];
    let mut station_used = vec![false; station_slots];

    let mut assignments = Vec::new();
    for c in order {
        let [a, b] = c.stations;
        if sat_used[c.satellite_index] || station_used[a] || station_used[b] {
            continue;
        }
        sat_used[c.satellite_index] = true;
        station_used[a] = true;
        station_used[b] = true;
        assignments.push(*c);
    }
    Schedule { timestep_index: 0, assignments }
}

pub fn schedule_total_rate(schedule: &Schedule) -> f64 {
    schedule.assignments.iter().map(|a| a.rate).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkmodel::{pair_rate, LinkModelParams};
    use crate::orbits::EARTH_RADIUS_KM;
    use crate::stations::{GroundStation, Provenance};
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cand(sat: usize, a: usize, b: usize, rate: f64) -> CandidateAssignment {
        CandidateAssignment { satellite_index: sat, stations: [a, b], id_ranks: [a as u32, b as u32], rate }
    }

    fn set(points: &[(&str, f64, f64)]) -> GroundStationSet {
        let stations = points.iter().map(|&(id, lat, lon)| GroundStation::new(id, lat, lon, 0.0).unwrap()).collect();
        GroundStationSet::new(stations, Provenance::PopulationFile).unwrap()
    }

    fn overhead(lat: f64, lon: f64) -> SatelliteState {
        let (la, lo) = (lat.to_radians(), lon.to_radians());
        let r = EARTH_RADIUS_KM + 550.0;
        SatelliteState {
            position: [r * la.cos() * lo.cos(), r * la.cos() * lo.sin(), r * la.sin()],
            orbit_index: 0,
            phase_index: 0,
        }
    }

    #[test]
    fn three_visible_stations_make_three_pairs() {
        let stations = set(&[("c", 0.0, 1.0), ("a", 1.0, 0.0), ("b", -1.0, 0.0), ("far", 60.0, 60.0)]);
        let params = LinkModelParams::default();
        let cands = enumerate_candidates(&[overhead(0.0, 0.0)], &stations, &params);
        let pairs: Vec<(&str, &str)> = cands
            .iter()
            .map(|c| (stations.stations()[c.stations[0]].id.as_str(), stations.stations()[c.stations[1]].id.as_str()))
            .collect();
        assert_eq!(pairs, vec![("a", "b"), ("a", "c"), ("b", "c")]);
        for c in &cands {
            let expected = pair_rate(
                &params,
                &overhead(0.0, 0.0).position,
                &stations.stations()[c.stations[0]],
                &stations.stations()[c.stations[1]],
            );
            assert!((c.rate - expected).abs() <= 1e-12 * expected);
        }
    }

    #[test]
    fn single_visible_station_has_no_candidates() {
        let stations = set(&[("a", 0.0, 0.0), ("far", 50.0, 0.0)]);
        assert!(enumerate_candidates(&[overhead(0.0, 0.0)], &stations, &LinkModelParams::default()).is_empty());
    }

    #[test]
    fn two_satellites_same_pair() {
        let stations = set(&[("a", 0.0, 0.0), ("b", 1.0, 1.0)]);
        let sats = [overhead(0.5, 0.5), overhead(0.2, 0.8)];
        let cands = enumerate_candidates(&sats, &stations, &LinkModelParams::default());
        assert_eq!(cands.len(), 2);
        assert_eq!((cands[0].satellite_index, cands[1].satellite_index), (0, 1));
    }

    #[test]
    fn single_conflict() {
        // stations A=0, B=1, C=2
        let s = greedy_schedule(&[cand(0, 0, 1, 10.0), cand(1, 1, 2, 8.0)]);
        assert_eq!(s.assignments.len(), 1);
        assert_eq!(s.total_rate(), 10.0);
    }

    #[test]
    fn greedy_is_not_optimal() {
        let cands = [cand(0, 0, 1, 10.0), cand(0, 2, 3, 9.0), cand(1, 0, 1, 8.0)];
        let s = greedy_schedule(&cands);
        assert_eq!(s.assignments, vec![cands[0]]);
        assert_eq!(s.total_rate(), 10.0);
        assert_eq!(brute_force_optimum(&cands), 17.0);
    }

    #[test]
    fn empty_schedule() {
        let s = greedy_schedule(&[]);
        assert!(s.assignments.is_empty());
        assert_eq!(schedule_total_rate(&s), 0.0);
    }

    #[test]
    fn total_rate_sums() {
        let s = Schedule { timestep_index: 3, assignments: vec![cand(0, 0, 1, 10.0), cand(1, 2, 3, 8.0)] };
        assert_eq!(schedule_total_rate(&s), 18.0);
    }

    #[test]
    fn ties_break_by_satellite_then_ids() {
        let cands = [cand(1, 0, 1, 5.0), cand(0, 2, 3, 5.0), cand(0, 0, 1, 5.0)];
        let s = greedy_schedule(&cands);
        assert_eq!(s.assignments[0], cands[2]);
        assert_eq!(s.assignments.len(), 1);
    }

    fn random_candidates(rng: &mut ChaCha8Rng, sats: usize, stations: usize) -> Vec<CandidateAssignment> {
        let mut out = Vec::new();
        for s in 0..sats {
            for a in 0..stations {
                for b in a + 1..stations {
                    if rng.random_bool(0.3) {
                        out.push(cand(s, a, b, rng.random_range(0.1..10.0)));
                    }
                }
            }
        }
        out
    }

    /// Exhaustive search over conflict-free subsets (one candidate or none
    /// per satellite).
    fn brute_force_optimum(cands: &[CandidateAssignment]) -> f64 {
        fn go(by_sat: &[Vec<&CandidateAssignment>], i: usize, used: u64) -> f64 {
            if i == by_sat.len() {
                return 0.0;
            }
            let mut best = go(by_sat, i + 1, used);
            for c in &by_sat[i] {
                let mask = (1u64 << c.stations[0]) | (1u64 << c.stations[1]);
                if used & mask == 0 {
                    best = best.max(c.rate + go(by_sat, i + 1, used | mask));
                }
            }
            best
        }
        let sats = cands.iter().map(|c| c.satellite_index + 1).max().unwrap_or(0);
        let mut by_sat = vec![Vec::new(); sats];
        for c in cands {
            by_sat[c.satellite_index].push(c);
        }
        go(&by_sat, 0, 0)
    }

    #[test]
    fn constraint_safety_and_permutation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let sats = rng.random_range(1..12);
            let stations = rng.random_range(2..16);
            let mut cands = random_candidates(&mut rng, sats, stations);
            let s = greedy_schedule(&cands);
            let mut sat_seen = std::collections::HashSet::new();
            let mut st_seen = std::collections::HashSet::new();
            for a in &s.assignments {
                assert!(sat_seen.insert(a.satellite_index));
                assert!(st_seen.insert(a.stations[0]));
                assert!(st_seen.insert(a.stations[1]));
            }
            cands.shuffle(&mut rng);
            assert_eq!(greedy_schedule(&cands), s);
        }
    }

    #[test]
    fn half_approximation_on_small_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let (sats, stations) = (rng.random_range(1..=5), rng.random_range(2..=8));
            let cands = random_candidates(&mut rng, sats, stations);
            let greedy = greedy_schedule(&cands).total_rate();
            let opt = brute_force_optimum(&cands);
            assert!(greedy >= 0.5 * opt - 1e-12, "greedy {greedy} opt {opt}");
        }
    }
}
