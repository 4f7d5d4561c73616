//! The objective: one simulated day of dual-downlink scheduling.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linkmodel::{LinkModel, LinkModelParams, DEFAULT_MIN_ELEVATION_DEG};
use crate::orbits::{
    alr_inverse, allocate_integers, build_constellation, ConstellationGeometry, ConstellationSpec, DesignVector,
    DEFAULT_ALTITUDE_KM,
};
use crate::par::{self, Exec};
use crate::scheduler::{greedy_schedule, Schedule, StationSites};
use crate::stations::GroundStationSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub duration_s: f64,
    pub sample_interval_s: f64,
    pub altitude_km: f64,
    pub min_elevation_deg: f64,
    pub link_model: LinkModelParams,
    /// Rate reported for allocations whose counts do not sum to the total.
    pub infeasible_penalty: f64,
    pub total_satellites: u32,
    pub min_sats: u32,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            duration_s: 86_400.0,
            sample_interval_s: 30.0,
            altitude_km: DEFAULT_ALTITUDE_KM,
            min_elevation_deg: DEFAULT_MIN_ELEVATION_DEG,
            link_model: LinkModelParams::default(),
            infeasible_penalty: -1.0,
            total_satellites: 100,
            min_sats: 0,
        }
    }
}

impl SimulationConfig {
    /// Number of samples per simulated run; errors unless the duration is a
    /// positive whole multiple of the interval.
    pub fn sample_count(&self) -> Result<usize> {
        if !(self.sample_interval_s.is_finite() && self.sample_interval_s > 0.0) {
            return Err(Error::Config("sample_interval_s must be positive".into()));
        }
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return Err(Error::Config("duration_s must be positive".into()));
        }
        let ratio = self.duration_s / self.sample_interval_s;
        let count = ratio.round();
        if count < 1.0 || (ratio - count).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::Config(format!(
                "duration_s {} is not a whole multiple of sample_interval_s {}",
                self.duration_s, self.sample_interval_s
            )));
        }
        Ok(count as usize)
    }

    pub fn validate(&self) -> Result<()> {
        self.sample_count()?;
        if !(self.altitude_km.is_finite() && self.altitude_km > 0.0) {
            return Err(Error::Config("altitude_km must be positive".into()));
        }
        if !(0.0..90.0).contains(&self.min_elevation_deg) {
            return Err(Error::Config("min_elevation_deg must lie in [0, 90)".into()));
        }
        if !(self.infeasible_penalty.is_finite() && self.infeasible_penalty < 0.0) {
            return Err(Error::Config("infeasible_penalty must be negative".into()));
        }
        self.link_model.validate()
    }

    /// Link parameters with altitude and elevation defaults filled in.
    pub fn resolved_link_model(&self) -> LinkModelParams {
        self.link_model.resolved(self.altitude_km, self.min_elevation_deg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationResult {
    pub mean_rate: f64,
    #[serde(skip)]
    pub per_timestep_rates: Vec<f64>,
    pub feasible: bool,
    pub spec: ConstellationSpec,
}

/// Stations, configuration, and link model bound together for repeated
/// evaluation. Cheap to share across threads.
#[derive(Clone)]
pub struct Evaluator {
    stations: GroundStationSet,
    sites: StationSites,
    config: SimulationConfig,
    link: Arc<dyn LinkModel>,
    samples: usize,
    exec: Exec,
}

impl std::fmt::Debug for Evaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Evaluator")
            .field("stations", &self.stations.len())
            .field("config", &self.config)
            .field("exec", &self.exec)
            .finish()
    }
}

impl Evaluator {
    pub fn new(stations: GroundStationSet, config: SimulationConfig) -> Result<Self> {
        config.validate()?;
        let link = Arc::new(config.resolved_link_model());
        Ok(Self {
            sites: StationSites::new(&stations),
            samples: config.sample_count()?,
            stations,
            config,
            link,
            exec: Exec::default(),
        })
    }

    /// Replaces the default channel model.
    pub fn with_link_model(mut self, link: Arc<dyn LinkModel>) -> Self {
        self.link = link;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    pub fn stations(&self) -> &GroundStationSet {
        &self.stations
    }

    pub fn exec(&self) -> Exec {
        self.exec
    }

    pub fn sample_count(&self) -> usize {
        self.samples
    }

    /// Decodes a design to an integer spec without simulating it.
    pub fn decode(&self, design: &DesignVector) -> Result<ConstellationSpec> {
        let fractions = alr_inverse(design.alr_coords())?;
        let allocation = allocate_integers(&fractions, self.config.total_satellites, self.config.min_sats);
        Ok(ConstellationSpec::from_allocation(design.inclinations(), &allocation, self.config.altitude_km))
    }

    pub fn evaluate(&self, design: &DesignVector) -> Result<EvaluationResult> {
        let spec = self.decode(design)?;
        if !spec.is_feasible() {
            return Ok(EvaluationResult {
                mean_rate: self.config.infeasible_penalty,
                per_timestep_rates: Vec::new(),
                feasible: false,
                spec,
            });
        }
        self.evaluate_spec(&spec)
    }

    pub fn evaluate_spec(&self, spec: &ConstellationSpec) -> Result<EvaluationResult> {
        let geometry = build_constellation(spec)?;
        let per_timestep_rates =
            par::map_range(self.exec, self.samples, |k| self.schedule_at(&geometry, k).total_rate());
        // Sequential sum keeps the mean independent of the parallel split.
        let mean_rate = per_timestep_rates.iter().sum::<f64>() / self.samples as f64;
        Ok(EvaluationResult { mean_rate, per_timestep_rates, feasible: true, spec: spec.clone() })
    }

    /// Every timestep's schedule, for diagnostics.
    pub fn schedules(&self, spec: &ConstellationSpec) -> Result<Vec<Schedule>> {
        let geometry = build_constellation(spec)?;
        Ok(par::map_range(self.exec, self.samples, |k| self.schedule_at(&geometry, k)))
    }

    fn schedule_at(&self, geometry: &ConstellationGeometry, k: usize) -> Schedule {
        let t = k as f64 * self.config.sample_interval_s;
        let sats = geometry.propagate(t);
        let candidates = self.sites.candidates(&sats, self.link.as_ref());
        let mut schedule = greedy_schedule(&candidates);
        schedule.timestep_index = k;
        schedule
    }
}

pub fn evaluate(design: &DesignVector, stations: &GroundStationSet, config: &SimulationConfig) -> Result<EvaluationResult> {
    Evaluator::new(stations.clone(), config.clone())?.evaluate(design)
}

pub fn evaluate_spec(
    spec: &ConstellationSpec,
    stations: &GroundStationSet,
    config: &SimulationConfig,
) -> Result<EvaluationResult> {
    Evaluator::new(stations.clone(), config.clone())?.evaluate_spec(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkmodel::visibility_central_angle_deg;
    use crate::orbits::OrbitGroup;
    use crate::stations::{population_stations, GroundStation, Provenance};

    fn reduced() -> SimulationConfig {
        SimulationConfig { duration_s: 86_400.0, sample_interval_s: 300.0, total_satellites: 10, ..Default::default() }
    }

    fn single(inc: f64, count: u32) -> ConstellationSpec {
        ConstellationSpec::from_groups(550.0, vec![OrbitGroup { inclination_deg: inc, count }])
    }

    #[test]
    fn config_validation() {
        assert_eq!(SimulationConfig::default().sample_count().unwrap(), 2880);
        assert_eq!(reduced().sample_count().unwrap(), 288);
        let bad = SimulationConfig { sample_interval_s: 7.0, ..Default::default() };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let bad = SimulationConfig { infeasible_penalty: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = SimulationConfig { min_elevation_deg: 95.0, ..Default::default() };
        assert!(Evaluator::new(population_stations(), bad).is_err());
    }

    #[test]
    fn empty_constellation_scores_zero() {
        let config = SimulationConfig { total_satellites: 0, ..reduced() };
        let design = DesignVector::new(vec![45.0, 100.0], vec![0.3]).unwrap();
        let r = evaluate(&design, &population_stations(), &config).unwrap();
        assert!(r.feasible);
        assert_eq!(r.mean_rate, 0.0);
        assert_eq!(r.per_timestep_rates.len(), 288);
    }

    #[test]
    fn equatorial_orbit_misses_high_latitude_stations() {
        let half_angle = visibility_central_angle_deg(550.0, 20.0);
        assert!(half_angle < 15.0);
        let stations: Vec<GroundStation> = population_stations()
            .stations()
            .iter()
            .filter(|s| s.latitude_deg.abs() > 15.0)
            .cloned()
            .collect();
        let set = GroundStationSet::new(stations, Provenance::PopulationFile).unwrap();
        let design = DesignVector::new(vec![0.0], vec![]).unwrap();
        let r = evaluate(&design, &set, &reduced()).unwrap();
        assert!(r.feasible);
        assert_eq!(r.mean_rate, 0.0);
    }

    #[test]
    fn infeasible_rounding_is_penalized() {
        let config = SimulationConfig { total_satellites: 100, ..reduced() };
        // alr of (0.333, 0.333, 0.334) rounds to 33+33+33.
        let y = crate::orbits::alr_forward(&[0.333, 0.333, 0.334]).unwrap();
        let design = DesignVector::new(vec![30.0, 60.0, 90.0], y).unwrap();
        let r = evaluate(&design, &population_stations(), &config).unwrap();
        assert!(!r.feasible);
        assert_eq!(r.mean_rate, -1.0);
        assert!(r.per_timestep_rates.is_empty());
        assert_eq!(r.spec.counts(), vec![33, 33, 33]);
    }

    #[test]
    fn spec_path_matches_design_path() {
        let ev = Evaluator::new(population_stations().truncated(20), reduced()).unwrap();
        let design = DesignVector::new(vec![40.0, 140.0], vec![0.4]).unwrap();
        let via_design = ev.evaluate(&design).unwrap();
        let via_spec = ev.evaluate_spec(&ev.decode(&design).unwrap()).unwrap();
        assert_eq!(via_design, via_spec);
        assert_eq!(ev.evaluate_spec(&via_spec.spec).unwrap().per_timestep_rates, via_spec.per_timestep_rates);
    }

    #[test]
    fn polar_orbit_serves_polar_stations() {
        // Two nearby high-latitude stations so a dual downlink is possible.
        let stations = GroundStationSet::new(
            vec![GroundStation::new("n1", 88.0, 0.0, 0.0).unwrap(), GroundStation::new("n2", 87.0, 90.0, 0.0).unwrap()],
            Provenance::PopulationFile,
        )
        .unwrap();
        let config = SimulationConfig { total_satellites: 1, sample_interval_s: 30.0, ..Default::default() };
        let r = evaluate_spec(&single(90.0, 1), &stations, &config).unwrap();
        assert!(r.mean_rate > 0.0);
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let ev = Evaluator::new(population_stations().truncated(40), reduced()).unwrap();
        let spec = ConstellationSpec::from_groups(
            550.0,
            vec![OrbitGroup { inclination_deg: 30.0, count: 6 }, OrbitGroup { inclination_deg: 150.0, count: 4 }],
        );
        let a = ev.clone().with_exec(Exec::Parallel).evaluate_spec(&spec).unwrap();
        let b = ev.with_exec(Exec::Sequential).evaluate_spec(&spec).unwrap();
        assert_eq!(a.per_timestep_rates, b.per_timestep_rates);
        assert_eq!(a.mean_rate.to_bits(), b.mean_rate.to_bits());
        let sum: f64 = a.per_timestep_rates.iter().sum();
        assert!((a.mean_rate * 288.0 - sum).abs() <= 1e-6 * sum.abs().max(1.0));
        assert!(a.mean_rate > 0.0);
    }

    #[test]
    fn schedules_match_rates() {
        let ev = Evaluator::new(population_stations().truncated(20), reduced()).unwrap();
        let spec = single(35.0, 10);
        let schedules = ev.schedules(&spec).unwrap();
        let rates = ev.evaluate_spec(&spec).unwrap().per_timestep_rates;
        assert_eq!(schedules.len(), rates.len());
        for (k, (s, r)) in schedules.iter().zip(&rates).enumerate() {
            assert_eq!(s.timestep_index, k);
            assert_eq!(s.total_rate(), *r);
        }
    }

    #[test]
    fn result_json_carries_mean_feasible_and_spec() {
        let ev = Evaluator::new(population_stations().truncated(20), reduced()).unwrap();
        let r = ev.evaluate_spec(&single(35.0, 10)).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert!(v["mean_rate"].is_number());
        assert_eq!(v["feasible"], true);
        assert_eq!(v["spec"]["groups"][0]["count"], 10);
        assert!(v.get("per_timestep_rates").is_none());
    }
}
