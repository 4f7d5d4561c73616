//! Run configuration files and run manifests.

use std::fs;
use std::path::{Path, PathBuf};

use qonstell::baselines::BaselineMethod;
use qonstell::bo::BoConfig;
use qonstell::evaluator::SimulationConfig;
use qonstell::ga::GaConfig;
use qonstell::orbits::ConstellationSpec;
use qonstell::stations::{generate_random_land, load_stations, population_stations, GroundStationSet, LandMask};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum StationSource {
    #[default]
    Population,
    File {
        path: PathBuf,
    },
    RandomLand {
        count: usize,
        seed: u64,
    },
}

impl StationSource {
    pub fn load(&self) -> Result<GroundStationSet, CliError> {
        Ok(match self {
            StationSource::Population => population_stations(),
            StationSource::File { path } => load_stations(path)?,
            StationSource::RandomLand { count, seed } => generate_random_land(*count, *seed, &LandMask::bundled())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineBlock {
    pub method: BaselineMethod,
    #[serde(default = "default_step")]
    pub step_deg: f64,
}

fn default_step() -> f64 {
    1.0
}

fn default_orbits() -> usize {
    3
}

fn default_budget() -> usize {
    1200
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("runs")
}

/// One run: where the stations come from, how to simulate, and exactly one
/// method block. `seed` overrides any seed inside the method block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub stations: StationSource,
    #[serde(default)]
    pub simulation: SimulationConfig,
    #[serde(default = "default_orbits")]
    pub orbits: usize,
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bo: Option<BoConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ga: Option<GaConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<BaselineBlock>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            stations: StationSource::default(),
            simulation: SimulationConfig::default(),
            orbits: default_orbits(),
            budget: default_budget(),
            seed: 0,
            output_dir: default_output_dir(),
            bo: None,
            ga: None,
            baseline: None,
        }
    }
}

pub enum Method<'a> {
    Bo(&'a BoConfig),
    Ga(&'a GaConfig),
    Baseline(&'a BaselineBlock),
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Pushes the global seed into the method block.
    pub fn sync_seed(&mut self) {
        if let Some(bo) = &mut self.bo {
            bo.seed = self.seed;
        }
        if let Some(ga) = &mut self.ga {
            ga.seed = self.seed;
        }
    }

    pub fn method(&self) -> Result<Method<'_>, CliError> {
        match (&self.bo, &self.ga, &self.baseline) {
            (Some(bo), None, None) => Ok(Method::Bo(bo)),
            (None, Some(ga), None) => Ok(Method::Ga(ga)),
            (None, None, Some(b)) => Ok(Method::Baseline(b)),
            (None, None, None) => Err(CliError::Config("config has no method block (bo, ga or baseline)".into())),
            _ => Err(CliError::Config("config has more than one method block".into())),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.simulation.validate()?;
        match self.method()? {
            Method::Bo(bo) => bo.acquisition.validate()?,
            Method::Ga(ga) => ga.validate()?,
            Method::Baseline(_) => {}
        }
        if self.orbits == 0 {
            return Err(CliError::Config("orbits must be at least 1".into()));
        }
        if self.budget == 0 {
            return Err(CliError::Config("budget must be at least 1".into()));
        }
        Ok(())
    }

    /// sha256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: RunConfig,
    pub seed: u64,
    pub budget: usize,
    pub best_rate: Option<f64>,
    pub best_spec: Option<ConstellationSpec>,
    pub first_best_call: Option<usize>,
    pub wall_time_s: f64,
    pub completed: bool,
    pub config_hash: String,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}
