//! Naive comparators: equispaced inclinations and a single-orbit sweep.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::Evaluator;
use crate::orbits::{ConstellationSpec, OrbitGroup};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineMethod {
    Equispaced,
    BruteForce1d,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineEvaluation {
    pub spec: ConstellationSpec,
    pub mean_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub method: BaselineMethod,
    pub evaluations: Vec<BaselineEvaluation>,
    pub best: BaselineEvaluation,
}

impl BaselineReport {
    fn from_evaluations(method: BaselineMethod, evaluations: Vec<BaselineEvaluation>) -> Result<Self> {
        let best = evaluations
            .iter()
            .reduce(|a, b| if b.mean_rate > a.mean_rate { b } else { a })
            .cloned()
            .ok_or_else(|| Error::Config("baseline produced no evaluations".into()))?;
        Ok(Self { method, evaluations, best })
    }
}

/// θ_i = i·180/(D+1), counts as equal as possible with the remainder going
/// to the lowest-index groups.
pub fn equispaced_spec(orbits: usize, total: u32, altitude_km: f64) -> Result<ConstellationSpec> {
    if orbits == 0 || (total as usize) < orbits {
        return Err(Error::Config(format!("equispaced needs 1 <= orbits <= satellites, got {orbits} and {total}")));
    }
    let d = orbits as u32;
    let groups = (1..=d)
        .map(|i| OrbitGroup {
            inclination_deg: i as f64 * 180.0 / (d + 1) as f64,
            count: total / d + u32::from(i - 1 < total % d),
        })
        .collect();
    Ok(ConstellationSpec::from_groups(altitude_km, groups))
}

pub fn equispaced(evaluator: &Evaluator, orbits: usize) -> Result<BaselineReport> {
    let config = evaluator.config();
    let spec = equispaced_spec(orbits, config.total_satellites, config.altitude_km)?;
    let mean_rate = evaluator.evaluate_spec(&spec)?.mean_rate;
    BaselineReport::from_evaluations(BaselineMethod::Equispaced, vec![BaselineEvaluation { spec, mean_rate }])
}

/// Inclinations {0, step, ..., 180 − step}; `step` must divide 180.
pub fn sweep_angles(step_deg: f64) -> Result<Vec<f64>> {
    let count = 180.0 / step_deg;
    if !(step_deg > 0.0 && step_deg <= 180.0) || (count - count.round()).abs() > 1e-9 {
        return Err(Error::Config(format!("step {step_deg} does not divide 180")));
    }
    Ok((0..count.round() as usize).map(|k| k as f64 * step_deg).collect())
}

/// Every satellite in one orbit, swept over inclination.
pub fn brute_force_1d(evaluator: &Evaluator, step_deg: f64) -> Result<BaselineReport> {
    let config = evaluator.config();
    let specs: Vec<ConstellationSpec> = sweep_angles(step_deg)?
        .into_iter()
        .map(|theta| {
            ConstellationSpec::from_groups(
                config.altitude_km,
                vec![OrbitGroup { inclination_deg: theta, count: config.total_satellites }],
            )
        })
        .collect();
    let results = par::map(evaluator.exec(), &specs, |spec| evaluator.evaluate_spec(spec).map(|r| r.mean_rate));
    let evaluations = specs
        .into_iter()
        .zip(results)
        .map(|(spec, rate)| rate.map(|mean_rate| BaselineEvaluation { spec, mean_rate }))
        .collect::<Result<Vec<_>>>()?;
    BaselineReport::from_evaluations(BaselineMethod::BruteForce1d, evaluations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::SimulationConfig;
    use crate::stations::population_stations;

    #[test]
    fn equispaced_examples() {
        let s = equispaced_spec(2, 100, 550.0).unwrap();
        assert_eq!(s.inclinations(), vec![60.0, 120.0]);
        assert_eq!(s.counts(), vec![50, 50]);
        let s = equispaced_spec(1, 100, 550.0).unwrap();
        assert_eq!((s.inclinations(), s.counts()), (vec![90.0], vec![100]));
        assert_eq!(equispaced_spec(3, 100, 550.0).unwrap().counts(), vec![34, 33, 33]);
        for d in 1..=10 {
            assert!(equispaced_spec(d, 100, 550.0).unwrap().is_feasible());
        }
        assert!(equispaced_spec(0, 100, 550.0).is_err());
        assert!(equispaced_spec(5, 3, 550.0).is_err());
    }

    #[test]
    fn sweep_grid() {
        assert_eq!(sweep_angles(1.0).unwrap().len(), 180);
        assert_eq!(sweep_angles(45.0).unwrap(), vec![0.0, 45.0, 90.0, 135.0]);
        assert!(sweep_angles(7.0).is_err());
        assert!(sweep_angles(0.0).is_err());
    }

    #[test]
    fn reduced_sweep_report() {
        let ev = Evaluator::new(
            population_stations().truncated(20),
            SimulationConfig { total_satellites: 10, sample_interval_s: 300.0, ..Default::default() },
        )
        .unwrap();
        let r = brute_force_1d(&ev, 15.0).unwrap();
        assert_eq!(r.method, BaselineMethod::BruteForce1d);
        assert_eq!(r.evaluations.len(), 12);
        assert!(r.evaluations.iter().all(|e| e.mean_rate <= r.best.mean_rate));
        assert!(r.best.mean_rate > 0.0);
        let e = equispaced(&ev, 3).unwrap();
        assert_eq!(e.evaluations.len(), 1);
        assert_eq!(e.best, e.evaluations[0]);
    }
}
