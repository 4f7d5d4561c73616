//! Bayesian optimization over a box: random warm-up, then repeated GP fit,
//! acquisition maximization, and evaluation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::evaluator::Evaluator;
use crate::gp::{gp_fit, GpFitOptions, GpHyperparams, GpModel};
use crate::optim::{finite_difference_gradient, minimize_box, MinimizeOptions};
use crate::par::{self, Exec};
use crate::search::{constellation_bounds, constellation_objective, evaluate_batch, Bounds, RunControl, RunFailure, SearchTrace};
use crate::trace::OptimizerTrace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AcquisitionKind {
    Lcb,
    Ei,
}

/// Sign on the exploration term of the confidence bound. `Plus` gives the
/// maximization-consistent μ + κσ; `Minus` reproduces μ − κσ literally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LcbSign {
    #[default]
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcquisitionConfig {
    pub kind: AcquisitionKind,
    pub kappa: f64,
    pub candidate_count: usize,
    pub refine_top_k: usize,
    pub lcb_sign: LcbSign,
}

impl Default for AcquisitionConfig {
    fn default() -> Self {
        Self { kind: AcquisitionKind::Lcb, kappa: 2.0, candidate_count: 4096, refine_top_k: 5, lcb_sign: LcbSign::Plus }
    }
}

impl AcquisitionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return Err(Error::Config("kappa must be finite and non-negative".into()));
        }
        if self.candidate_count == 0 {
            return Err(Error::Config("candidate_count must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoConfig {
    pub init_count: usize,
    pub acquisition: AcquisitionConfig,
    pub gp_restarts: usize,
    /// Restarts carried through to convergence after likelihood screening.
    pub gp_polish: usize,
    pub seed: u64,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for BoConfig {
    fn default() -> Self {
        Self { init_count: 25, acquisition: AcquisitionConfig::default(), gp_restarts: 8, gp_polish: 2, seed: 0, exec: Exec::default() }
    }
}

fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Acquisition value from a posterior mean and standard deviation.
pub fn acquisition_value(config: &AcquisitionConfig, mean: f64, sd: f64, best_so_far: f64) -> f64 {
    match config.kind {
        AcquisitionKind::Lcb => match config.lcb_sign {
            LcbSign::Plus => mean + config.kappa * sd,
            LcbSign::Minus => mean - config.kappa * sd,
        },
        AcquisitionKind::Ei => {
            if sd <= 0.0 {
                return (mean - best_so_far).max(0.0);
            }
            let z = (mean - best_so_far) / sd;
            (mean - best_so_far) * std_normal_cdf(z) + sd * std_normal_pdf(z)
        }
    }
}

pub fn acquisition(gp: &GpModel, x: &[f64], config: &AcquisitionConfig, best_so_far: f64) -> f64 {
    let (mean, var) = gp.predict(x);
    acquisition_value(config, mean, var.sqrt(), best_so_far)
}

/// Single-owner optimizer state: the box, the observed data, and the RNG.
#[derive(Debug, Clone)]
pub struct BoState {
    bounds: Bounds,
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    init_count: usize,
    rng: ChaCha8Rng,
    last_hyper: Option<GpHyperparams>,
}

impl BoState {
    pub fn new(bounds: Bounds, init_count: usize, seed: u64) -> Self {
        Self {
            bounds,
            points: Vec::new(),
            values: Vec::new(),
            init_count,
            rng: ChaCha8Rng::seed_from_u64(seed),
            last_hyper: None,
        }
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn observe(&mut self, point: Vec<f64>, value: f64) {
        self.points.push(point);
        self.values.push(value);
    }

    pub fn best_value(&self) -> Option<f64> {
        self.values.iter().copied().reduce(f64::max)
    }

    /// Fits the surrogate on the normalized data.
    pub fn fit(&mut self, restarts: usize, polish: usize) -> Result<GpModel> {
        let inputs: Vec<Vec<f64>> = self.points.iter().map(|p| self.bounds.normalize(p)).collect();
        let opts = GpFitOptions {
            restarts,
            seed: self.rng.random(),
            warm_start: self.last_hyper.clone(),
            polish_top: Some(polish),
            ..Default::default()
        };
        let gp = gp_fit(&inputs, &self.values, &opts)?;
        self.last_hyper = Some(gp.hyperparams().clone());
        Ok(gp)
    }

    fn is_duplicate(&self, point: &[f64]) -> bool {
        self.points.iter().any(|p| p.iter().zip(point).all(|(a, b)| (a - b).abs() <= 1e-9))
    }

    fn random_unique(&mut self) -> Vec<f64> {
        loop {
            let p = self.bounds.sample(&mut self.rng);
            if !self.is_duplicate(&p) {
                return p;
            }
        }
    }
}

/// Next point to evaluate: uniform during warm-up, otherwise the refined
/// acquisition argmax.
pub fn propose_next(state: &mut BoState, config: &BoConfig) -> Result<Vec<f64>> {
    if state.len() < state.init_count.max(2) {
        return Ok(state.random_unique());
    }
    let gp = state.fit(config.gp_restarts, config.gp_polish)?;
    let acq = &config.acquisition;
    let best = state.best_value().unwrap_or(0.0);
    let dim = state.bounds.dim();
    let unit = Bounds::unit(dim);

    let candidates: Vec<Vec<f64>> = (0..acq.candidate_count).map(|_| unit.sample(&mut state.rng)).collect();
    let scores = par::map(config.exec, &candidates, |x| acquisition(&gp, x, acq, best));
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));

    let neg = |x: &[f64]| -acquisition(&gp, x, acq, best);
    let opts = MinimizeOptions { max_iters: 30, pg_tol: 1e-7, f_tol: 1e-10, ..Default::default() };
    let refined = par::map(config.exec, &order[..acq.refine_top_k.min(order.len())], |&i| {
        let m = minimize_box(
            |x| (neg(x), finite_difference_gradient(&neg, x, unit.lower(), unit.upper(), 1e-6)),
            &candidates[i],
            unit.lower(),
            unit.upper(),
            &opts,
        );
        (m.x, -m.value)
    });

    let mut best_point = candidates[order[0]].clone();
    let mut best_score = scores[order[0]];
    for (x, s) in refined {
        if s > best_score {
            best_point = x;
            best_score = s;
        }
    }
    let proposal = state.bounds.denormalize(&best_point);
    if state.is_duplicate(&proposal) {
        return Ok(state.random_unique());
    }
    Ok(proposal)
}

/// Runs exactly `budget` objective calls unless stopped or failed.
pub fn run_bo<F>(
    objective: F,
    bounds: &Bounds,
    budget: usize,
    config: &BoConfig,
    control: &RunControl,
) -> std::result::Result<SearchTrace, RunFailure>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let mut trace = SearchTrace::default();
    let fail = |error, partial| Err(RunFailure { error, partial });
    if let Err(e) = config.acquisition.validate() {
        return fail(e, trace);
    }
    if budget < config.init_count {
        return fail(Error::Config(format!("budget {budget} is below the warm-up size {}", config.init_count)), trace);
    }
    let mut state = BoState::new(bounds.clone(), config.init_count, config.seed);

    // Warm-up points are independent, so evaluate them as one batch.
    let warmup: Vec<Vec<f64>> = (0..config.init_count).map(|_| state.random_unique()).collect();
    if control.should_stop() {
        return Ok(trace);
    }
    match evaluate_batch(&objective, warmup.clone(), config.exec, &mut trace) {
        Ok(values) => warmup.into_iter().zip(values).for_each(|(p, v)| state.observe(p, v)),
        Err(e) => return fail(e, trace),
    }

    while trace.len() < budget {
        if control.should_stop() {
            return Ok(trace);
        }
        let point = match propose_next(&mut state, config) {
            Ok(p) => p,
            Err(e) => return fail(e, trace),
        };
        match evaluate_batch(&objective, vec![point.clone()], Exec::Sequential, &mut trace) {
            Ok(v) => state.observe(point, v[0]),
            Err(e) => return fail(e, trace),
        }
    }
    trace.completed = true;
    Ok(trace)
}

/// BO over inclinations and ALR allocations of `orbits` groups.
pub fn run_bo_constellation(
    evaluator: &Evaluator,
    orbits: usize,
    budget: usize,
    config: &BoConfig,
    control: &RunControl,
) -> std::result::Result<OptimizerTrace, RunFailure<OptimizerTrace>> {
    let bounds = constellation_bounds(orbits).map_err(|error| RunFailure { error, partial: OptimizerTrace::default() })?;
    let objective = constellation_objective(evaluator, orbits);
    let decode = |s: &SearchTrace| OptimizerTrace::from_search(s, evaluator, orbits);
    match run_bo(objective, &bounds, budget, config, control) {
        Ok(s) => decode(&s).map_err(|error| RunFailure { error, partial: OptimizerTrace::default() }),
        Err(RunFailure { error, partial }) => Err(RunFailure { error, partial: decode(&partial).unwrap_or_default() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn sphere(x: &[f64]) -> Result<f64> {
        Ok(-x.iter().map(|v| (v - 0.5).powi(2)).sum::<f64>())
    }

    #[test]
    fn acquisition_examples() {
        let mut c = AcquisitionConfig { kappa: 0.0, ..Default::default() };
        assert_eq!(acquisition_value(&c, 1.25, 3.0, 0.0), 1.25);
        c.kappa = 2.0;
        assert_eq!(acquisition_value(&c, 1.0, 0.5, 0.0), 2.0);
        c.lcb_sign = LcbSign::Minus;
        assert_eq!(acquisition_value(&c, 1.0, 0.5, 0.0), 0.0);
        c.kind = AcquisitionKind::Ei;
        assert!((acquisition_value(&c, 2.0, 1.0, 2.0) - 0.398_942_280_401_432_7).abs() < 1e-12);
        assert_eq!(acquisition_value(&c, 1.0, 0.0, 2.0), 0.0);
        // EI is an expectation of a non-negative quantity.
        for (m, s) in [(-3.0, 0.1), (0.0, 2.0), (5.0, 1e-3)] {
            assert!(acquisition_value(&c, m, s, 1.0) >= 0.0);
        }
    }

    #[test]
    fn warm_up_is_uniform_in_bounds() {
        let bounds = Bounds::new(vec![-1.0, 10.0], vec![1.0, 20.0]).unwrap();
        let mut state = BoState::new(bounds.clone(), 25, 3);
        let p = propose_next(&mut state, &BoConfig::default()).unwrap();
        assert!(bounds.contains(&p));
    }

    #[test]
    fn one_dimensional_argmax() {
        let mut state = BoState::new(Bounds::unit(1), 5, 1);
        for i in 0..12 {
            let x = i as f64 / 11.0;
            state.observe(vec![x], -(x - 0.3).powi(2));
        }
        let config = BoConfig { acquisition: AcquisitionConfig { kappa: 0.0, ..Default::default() }, ..Default::default() };
        let p = propose_next(&mut state, &config).unwrap();
        assert!((p[0] - 0.3).abs() < 0.05, "{p:?}");
    }

    #[test]
    fn proposals_are_deterministic() {
        let build = || {
            let mut s = BoState::new(Bounds::unit(2), 3, 9);
            for i in 0..6 {
                let x = vec![i as f64 / 6.0, (i * i % 5) as f64 / 5.0];
                let y = sphere(&x).unwrap();
                s.observe(x, y);
            }
            s
        };
        let c = BoConfig { acquisition: AcquisitionConfig { candidate_count: 256, ..Default::default() }, ..Default::default() };
        assert_eq!(propose_next(&mut build(), &c).unwrap(), propose_next(&mut build(), &c).unwrap());
        let seq = BoConfig { exec: Exec::Sequential, ..c.clone() };
        assert_eq!(propose_next(&mut build(), &c).unwrap(), propose_next(&mut build(), &seq).unwrap());
    }

    #[test]
    fn budget_is_exact_and_trace_monotone() {
        let calls = AtomicUsize::new(0);
        let f = |x: &[f64]| {
            calls.fetch_add(1, Ordering::SeqCst);
            sphere(x)
        };
        let config = BoConfig {
            init_count: 5,
            acquisition: AcquisitionConfig { candidate_count: 128, ..Default::default() },
            ..Default::default()
        };
        let t = run_bo(f, &Bounds::unit(2), 12, &config, &RunControl::new()).unwrap();
        assert_eq!(t.len(), 12);
        assert_eq!(calls.load(Ordering::SeqCst), 12);
        assert!(t.completed);
        assert!(t.rows.windows(2).all(|w| w[1].best_so_far >= w[0].best_so_far));
    }

    #[test]
    fn budget_equal_to_warm_up_is_random_search() {
        let config = BoConfig { init_count: 4, ..Default::default() };
        let t = run_bo(sphere, &Bounds::unit(3), 4, &config, &RunControl::new()).unwrap();
        assert_eq!(t.len(), 4);
        assert!(run_bo(sphere, &Bounds::unit(3), 3, &config, &RunControl::new()).is_err());
    }

    #[test]
    fn errors_keep_partial_trace() {
        let calls = AtomicUsize::new(0);
        let f = |x: &[f64]| {
            if calls.fetch_add(1, Ordering::SeqCst) >= 6 {
                Err(Error::Objective("fail".into()))
            } else {
                sphere(x)
            }
        };
        let config = BoConfig {
            init_count: 4,
            exec: Exec::Sequential,
            acquisition: AcquisitionConfig { candidate_count: 64, ..Default::default() },
            ..Default::default()
        };
        let err = run_bo(f, &Bounds::unit(2), 10, &config, &RunControl::new()).unwrap_err();
        assert_eq!(err.partial.len(), 6);
        assert!(!err.partial.completed);
    }

    #[test]
    fn stop_request_ends_early() {
        let control = RunControl::new();
        control.request_stop();
        let t = run_bo(sphere, &Bounds::unit(2), 30, &BoConfig::default(), &control).unwrap();
        assert!(!t.completed);
        assert!(t.len() < 30);
    }
}
