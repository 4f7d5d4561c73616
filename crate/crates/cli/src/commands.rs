use std::fs;
use std::path::Path;
use std::time::Instant;

use qonstell::baselines::{brute_force_1d, equispaced, BaselineMethod, BaselineReport};
use qonstell::bo::{run_bo_constellation, AcquisitionKind, BoConfig};
use qonstell::evaluator::Evaluator;
use qonstell::ga::{run_ga_constellation, GaConfig};
use qonstell::orbits::ConstellationSpec;
use qonstell::search::RunControl;
use qonstell::stations::load_stations;
use qonstell::trace::OptimizerTrace;

use crate::config::{BaselineBlock, Manifest, Method, RunConfig, StationSource};
use crate::error::CliError;
use crate::output;
use crate::{AcqArg, BaselineArg, BaselineArgs, ExportArgs, OptMethod, OptimizeArgs, SetupArgs, SimulateArgs};

const INTERRUPTED: i32 = 130;

pub fn configure_threads() -> Result<(), CliError> {
    let threads = match std::env::var("QONSTELL_THREADS") {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| CliError::Config(format!("QONSTELL_THREADS={v:?} is not a count")))?,
        Err(std::env::VarError::NotPresent) => 0,
        Err(e) => return Err(CliError::Config(format!("QONSTELL_THREADS: {e}"))),
    };
    #[cfg(feature = "parallel")]
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

/// Base config from `--config` (or defaults) with the shared overrides.
fn setup_config(setup: &SetupArgs, base: Option<RunConfig>) -> Result<RunConfig, CliError> {
    let mut cfg = match (&setup.config, base) {
        (_, Some(c)) => c,
        (Some(path), None) => RunConfig::load(path)?,
        (None, None) => RunConfig::default(),
    };
    if let Some(path) = &setup.stations {
        cfg.stations = StationSource::File { path: path.clone() };
    }
    if let Some(count) = setup.random_land {
        cfg.stations = StationSource::RandomLand { count, seed: setup.land_seed };
    }
    let sim = &mut cfg.simulation;
    if let Some(n) = setup.total_satellites {
        sim.total_satellites = n;
    }
    if let Some(n) = setup.min_sats {
        sim.min_sats = n;
    }
    if let Some(d) = setup.duration {
        sim.duration_s = d;
    }
    if let Some(i) = setup.interval {
        sim.sample_interval_s = i;
    }
    sim.link_model = sim.resolved_link_model();
    Ok(cfg)
}

fn evaluator(cfg: &RunConfig) -> Result<Evaluator, CliError> {
    cfg.simulation.validate()?;
    Ok(Evaluator::new(cfg.stations.load()?, cfg.simulation.clone())?)
}

fn read_spec(path: &Path) -> Result<ConstellationSpec, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let spec: ConstellationSpec =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    spec.validate()?;
    Ok(spec)
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("output directory {}: {e}", dir.display())))
}

pub fn simulate(args: SimulateArgs) -> Result<i32, CliError> {
    let cfg = setup_config(&args.setup, None)?;
    let spec = read_spec(&args.spec)?;
    spec.ensure_feasible()?;
    let ev = evaluator(&cfg)?;
    let result = ev.evaluate_spec(&spec)?;
    match &args.out {
        Some(path) => output::write_json(path, &result)?,
        None => println!("{}", serde_json::to_string_pretty(&result)?),
    }
    if let Some(path) = &args.dump_timesteps {
        output::write_timesteps(path, cfg.simulation.sample_interval_s, &result.per_timestep_rates)?;
    }
    if let Some(path) = &args.dump_schedule {
        output::write_schedules(path, &ev.schedules(&spec)?, ev.stations())?;
    }
    Ok(0)
}

fn apply_optimize_overrides(cfg: &mut RunConfig, a: &OptimizeArgs) -> Result<(), CliError> {
    match a.method {
        Some(OptMethod::Bo) if cfg.bo.is_none() => {
            (cfg.bo, cfg.ga, cfg.baseline) = (Some(BoConfig::default()), None, None);
        }
        Some(OptMethod::Ga) if cfg.ga.is_none() => {
            (cfg.bo, cfg.ga, cfg.baseline) = (None, Some(GaConfig::default()), None);
        }
        _ => {}
    }
    if let Some(n) = a.orbits {
        cfg.orbits = n;
    }
    if let Some(n) = a.budget {
        cfg.budget = n;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(d) = &a.out_dir {
        cfg.output_dir = d.clone();
    }

    let bo_flags = a.acq.is_some()
        || a.kappa.is_some()
        || a.init_count.is_some()
        || a.candidates.is_some()
        || a.refine_top_k.is_some()
        || a.gp_restarts.is_some()
        || a.gp_polish.is_some();
    let ga_flags = a.pop.is_some()
        || a.parent_pool.is_some()
        || a.immigrant_fraction.is_some()
        || a.mutation_rate.is_some()
        || a.mutation_decay.is_some()
        || a.sigma_angle.is_some()
        || a.sigma_alr.is_some();
    if let Some(bo) = &mut cfg.bo {
        if ga_flags {
            return Err(CliError::Config("genetic-algorithm flags given for a BO run".into()));
        }
        let acq = &mut bo.acquisition;
        if let Some(k) = a.acq {
            acq.kind = match k {
                AcqArg::Lcb => AcquisitionKind::Lcb,
                AcqArg::Ei => AcquisitionKind::Ei,
            };
        }
        acq.kappa = a.kappa.unwrap_or(acq.kappa);
        acq.candidate_count = a.candidates.unwrap_or(acq.candidate_count);
        acq.refine_top_k = a.refine_top_k.unwrap_or(acq.refine_top_k);
        bo.init_count = a.init_count.unwrap_or(bo.init_count);
        bo.gp_restarts = a.gp_restarts.unwrap_or(bo.gp_restarts);
        bo.gp_polish = a.gp_polish.unwrap_or(bo.gp_polish);
    }
    if let Some(ga) = &mut cfg.ga {
        if bo_flags {
            return Err(CliError::Config("BO flags given for a genetic-algorithm run".into()));
        }
        ga.pop_size = a.pop.unwrap_or(ga.pop_size);
        ga.parent_pool = a.parent_pool.unwrap_or(ga.parent_pool);
        ga.immigrant_fraction = a.immigrant_fraction.unwrap_or(ga.immigrant_fraction);
        ga.mutation_rate_initial = a.mutation_rate.unwrap_or(ga.mutation_rate_initial);
        ga.mutation_decay = a.mutation_decay.unwrap_or(ga.mutation_decay);
        ga.mutation_sigma.angle = a.sigma_angle.unwrap_or(ga.mutation_sigma.angle);
        ga.mutation_sigma.alr = a.sigma_alr.unwrap_or(ga.mutation_sigma.alr);
    }
    Ok(())
}

fn hash_without_output_dir(cfg: &RunConfig) -> String {
    let mut c = cfg.clone();
    c.output_dir = Default::default();
    c.hash()
}

fn write_manifest(cfg: &RunConfig, manifest: Manifest) -> Result<(), CliError> {
    output::write_json(&cfg.output_dir.join("manifest.json"), &manifest)
}

pub fn optimize(args: OptimizeArgs) -> Result<i32, CliError> {
    let base = match &args.from_manifest {
        Some(path) => Some(Manifest::load(path)?.config),
        None => None,
    };
    let mut cfg = setup_config(&args.setup, base)?;
    apply_optimize_overrides(&mut cfg, &args)?;
    cfg.sync_seed();
    cfg.validate()?;
    if matches!(cfg.method()?, Method::Baseline(_)) {
        return Err(CliError::Config("baseline configs run with the `baseline` command".into()));
    }
    let ev = evaluator(&cfg)?;
    ensure_dir(&cfg.output_dir)?;

    let stop = crate::signal::install();
    let control = RunControl::from_flag(stop);
    let start = Instant::now();
    let result = match cfg.method()? {
        Method::Bo(bo) => run_bo_constellation(&ev, cfg.orbits, cfg.budget, bo, &control),
        Method::Ga(ga) => run_ga_constellation(&ev, cfg.orbits, cfg.budget, ga, &control),
        Method::Baseline(_) => unreachable!(),
    };
    let wall_time_s = start.elapsed().as_secs_f64();
    let (trace, failure) = match result {
        Ok(t) => (t, None),
        Err(f) => (f.partial, Some(f.error)),
    };

    trace.write_csv_file(cfg.output_dir.join("trace.csv"))?;
    let best = trace.best();
    if let Some(row) = best {
        output::write_json(&cfg.output_dir.join("best_spec.json"), &row.spec)?;
    }
    let completed = failure.is_none() && trace.completed;
    write_manifest(
        &cfg,
        Manifest {
            seed: cfg.seed,
            budget: cfg.budget,
            best_rate: best.map(|r| r.rate),
            best_spec: best.map(|r| r.spec.clone()),
            first_best_call: trace.first_best_call(),
            wall_time_s,
            completed,
            config_hash: hash_without_output_dir(&cfg),
            config: cfg.clone(),
        },
    )?;
    summarize(&trace, &cfg);

    if let Some(e) = failure {
        return Err(CliError::Evaluator(e.to_string()));
    }
    if !completed {
        eprintln!("qonstell: interrupted after {} of {} calls", trace.len(), cfg.budget);
        return Ok(INTERRUPTED);
    }
    Ok(0)
}

fn summarize(trace: &OptimizerTrace, cfg: &RunConfig) {
    if let Some(best) = trace.best() {
        println!(
            "best {:.6e} pairs/s at call {} of {}: inclinations {:?}, counts {:?}",
            best.rate,
            best.call_index,
            trace.len(),
            best.spec.inclinations(),
            best.spec.counts()
        );
    }
    println!("wrote {}", cfg.output_dir.display());
}

pub fn baseline(args: BaselineArgs) -> Result<i32, CliError> {
    let mut cfg = setup_config(&args.setup, None)?;
    if let Some(m) = args.method {
        let method = match m {
            BaselineArg::Equispaced => BaselineMethod::Equispaced,
            BaselineArg::Brute => BaselineMethod::BruteForce1d,
        };
        let step_deg = cfg.baseline.as_ref().map_or(1.0, |b| b.step_deg);
        (cfg.bo, cfg.ga, cfg.baseline) = (None, None, Some(BaselineBlock { method, step_deg }));
    }
    if let Some(block) = &mut cfg.baseline {
        block.step_deg = args.step.unwrap_or(block.step_deg);
    }
    if let Some(n) = args.orbits {
        cfg.orbits = n;
    }
    if let Some(d) = &args.out_dir {
        cfg.output_dir = d.clone();
    }
    cfg.validate()?;
    let Method::Baseline(block) = cfg.method()? else {
        return Err(CliError::Config("choose a baseline with --method or a baseline block".into()));
    };
    let ev = evaluator(&cfg)?;
    ensure_dir(&cfg.output_dir)?;

    let start = Instant::now();
    let report: BaselineReport = match block.method {
        BaselineMethod::Equispaced => equispaced(&ev, cfg.orbits)?,
        BaselineMethod::BruteForce1d => brute_force_1d(&ev, block.step_deg)?,
    };
    let wall_time_s = start.elapsed().as_secs_f64();
    output::write_json(&cfg.output_dir.join("baseline_report.json"), &report)?;
    output::write_baseline_csv(&cfg.output_dir.join("baseline_evaluations.csv"), &report)?;
    output::write_json(&cfg.output_dir.join("best_spec.json"), &report.best.spec)?;
    let first_best = report.evaluations.iter().position(|e| e.mean_rate == report.best.mean_rate).map(|i| i + 1);
    write_manifest(
        &cfg,
        Manifest {
            seed: cfg.seed,
            budget: report.evaluations.len(),
            best_rate: Some(report.best.mean_rate),
            best_spec: Some(report.best.spec.clone()),
            first_best_call: first_best,
            wall_time_s,
            completed: true,
            config_hash: hash_without_output_dir(&cfg),
            config: cfg.clone(),
        },
    )?;
    println!(
        "best {:.6e} pairs/s: inclinations {:?}, counts {:?}",
        report.best.mean_rate,
        report.best.spec.inclinations(),
        report.best.spec.counts()
    );
    Ok(0)
}

pub fn export_tracks(args: ExportArgs) -> Result<i32, CliError> {
    let spec = read_spec(&args.spec)?;
    let stations = args.stations.as_ref().map(load_stations).transpose()?;
    let geojson = output::track_geojson(&spec, args.duration, args.step, stations.as_ref())?;
    output::write_json(&args.out, &geojson)?;
    Ok(0)
}
