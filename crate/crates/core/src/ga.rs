//! Real-coded genetic algorithm: top-k parent pool, uniform crossover,
//! Gaussian mutation with an exponentially decaying rate, and random
//! immigrants. The population is replaced wholesale each generation; the
//! best individual survives only in the trace.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::Evaluator;
use crate::par::Exec;
use crate::search::{constellation_bounds, constellation_objective, evaluate_batch, Bounds, RunControl, RunFailure, SearchTrace};
use crate::trace::OptimizerTrace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MutationSigma {
    pub angle: f64,
    pub alr: f64,
}

impl Default for MutationSigma {
    fn default() -> Self {
        Self { angle: 15.0, alr: 0.75 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub pop_size: usize,
    pub parent_pool: usize,
    pub immigrant_fraction: f64,
    pub mutation_rate_initial: f64,
    pub mutation_decay: f64,
    pub mutation_sigma: MutationSigma,
    pub seed: u64,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            pop_size: 25,
            parent_pool: 5,
            immigrant_fraction: 0.10,
            mutation_rate_initial: 0.30,
            mutation_decay: 0.05,
            mutation_sigma: MutationSigma::default(),
            seed: 0,
            exec: Exec::default(),
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.immigrant_fraction > 0.0 && self.immigrant_fraction < 1.0) {
            return Err(Error::Config("immigrant_fraction must lie in (0, 1)".into()));
        }
        if self.parent_pool < 2 {
            return Err(Error::Config("parent_pool must be at least 2".into()));
        }
        if self.parent_pool > self.pop_size {
            return Err(Error::PoolTooLarge { pool: self.parent_pool, population: self.pop_size });
        }
        if !(0.0..=1.0).contains(&self.mutation_rate_initial) || !(self.mutation_decay >= 0.0) {
            return Err(Error::Config("mutation rate must lie in [0, 1] with a non-negative decay".into()));
        }
        if !(self.mutation_sigma.angle >= 0.0 && self.mutation_sigma.alr >= 0.0) {
            return Err(Error::Config("mutation sigmas must be non-negative".into()));
        }
        Ok(())
    }

    /// Offspring per generation: children are added one at a time while
    /// fewer than (1 − f)·pop exist, so the count is the smallest integer
    /// reaching that threshold. The remainder are immigrants (at least one).
    pub fn offspring_count(&self) -> usize {
        let raw = ((1.0 - self.immigrant_fraction) * self.pop_size as f64 - 1e-9).ceil() as usize;
        raw.min(self.pop_size.saturating_sub(1))
    }

    pub fn immigrant_count(&self) -> usize {
        self.pop_size - self.offspring_count()
    }

    /// Per-gene sigmas for a constellation design with `orbits` groups.
    pub fn constellation_sigmas(&self, orbits: usize) -> Vec<f64> {
        let mut s = vec![self.mutation_sigma.angle; orbits];
        s.extend(std::iter::repeat_n(self.mutation_sigma.alr, orbits.saturating_sub(1)));
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genes: Vec<f64>,
    pub fitness: Option<f64>,
}

impl Individual {
    pub fn new(genes: Vec<f64>) -> Self {
        Self { genes, fitness: None }
    }
}

pub fn init_pop<R: Rng + ?Sized>(pop_size: usize, bounds: &Bounds, rng: &mut R) -> Vec<Individual> {
    (0..pop_size).map(|_| Individual::new(bounds.sample(rng))).collect()
}

/// The `pool_size` fittest individuals, ties kept in population order.
/// Unevaluated individuals rank last.
pub fn select_parents(population: &[Individual], pool_size: usize) -> Result<Vec<Individual>> {
    if pool_size > population.len() {
        return Err(Error::PoolTooLarge { pool: pool_size, population: population.len() });
    }
    let key = |i: &Individual| i.fitness.unwrap_or(f64::NEG_INFINITY);
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|&a, &b| key(&population[b]).total_cmp(&key(&population[a])).then(a.cmp(&b)));
    Ok(order[..pool_size].iter().map(|&i| population[i].clone()).collect())
}

/// Uniform crossover: each gene from either parent with probability ½.
pub fn crossover<R: Rng + ?Sized>(p1: &Individual, p2: &Individual, rng: &mut R) -> Result<Individual> {
    if p1.genes.len() != p2.genes.len() {
        return Err(Error::GeneLengthMismatch { left: p1.genes.len(), right: p2.genes.len() });
    }
    let genes = p1.genes.iter().zip(&p2.genes).map(|(&a, &b)| if rng.random_bool(0.5) { a } else { b }).collect();
    Ok(Individual::new(genes))
}

pub fn mutation_rate(generation: usize, config: &GaConfig) -> f64 {
    config.mutation_rate_initial * (-config.mutation_decay * generation as f64).exp()
}

/// Perturbs each gene with probability `rate` by N(0, sigma_i), then clamps.
pub fn mutate<R: Rng + ?Sized>(ind: &Individual, rate: f64, sigmas: &[f64], bounds: &Bounds, rng: &mut R) -> Individual {
    let mut genes = ind.genes.clone();
    for (g, &sigma) in genes.iter_mut().zip(sigmas) {
        if rng.random_bool(rate.clamp(0.0, 1.0)) {
            if let Ok(normal) = Normal::new(0.0, sigma) {
                *g += normal.sample(rng);
            }
        }
    }
    bounds.clamp(&mut genes);
    Individual::new(genes)
}

/// Builds the next generation: offspring first, immigrants last.
pub fn next_generation<R: Rng + ?Sized>(
    population: &[Individual],
    generation: usize,
    config: &GaConfig,
    bounds: &Bounds,
    sigmas: &[f64],
    rng: &mut R,
) -> Result<Vec<Individual>> {
    let parents = select_parents(population, config.parent_pool)?;
    let rate = mutation_rate(generation, config);
    let mut next = Vec::with_capacity(config.pop_size);
    for _ in 0..config.offspring_count() {
        let pick = sample(rng, parents.len(), 2);
        let child = crossover(&parents[pick.index(0)], &parents[pick.index(1)], rng)?;
        next.push(mutate(&child, rate, sigmas, bounds, rng));
    }
    next.extend(init_pop(config.immigrant_count(), bounds, rng));
    Ok(next)
}

/// Runs exactly `budget` objective calls unless stopped or failed; the last
/// generation is truncated in construction order.
pub fn run_ga<F>(
    objective: F,
    bounds: &Bounds,
    sigmas: &[f64],
    budget: usize,
    config: &GaConfig,
    control: &RunControl,
) -> std::result::Result<SearchTrace, RunFailure>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let mut trace = SearchTrace::default();
    let fail = |error, partial| Err(RunFailure { error, partial });
    if let Err(e) = config.validate() {
        return fail(e, trace);
    }
    if sigmas.len() != bounds.dim() {
        return fail(Error::GeneLengthMismatch { left: sigmas.len(), right: bounds.dim() }, trace);
    }
    if budget < config.pop_size {
        return fail(Error::Config(format!("budget {budget} is below the population size {}", config.pop_size)), trace);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut population = init_pop(config.pop_size, bounds, &mut rng);
    let mut generation = 0;
    loop {
        if control.should_stop() {
            return Ok(trace);
        }
        let take = population.len().min(budget - trace.len());
        population.truncate(take);
        let points = population.iter().map(|i| i.genes.clone()).collect();
        match evaluate_batch(&objective, points, config.exec, &mut trace) {
            Ok(values) => population.iter_mut().zip(values).for_each(|(ind, v)| ind.fitness = Some(v)),
            Err(e) => return fail(e, trace),
        }
        if trace.len() >= budget {
            break;
        }
        population = match next_generation(&population, generation, config, bounds, sigmas, &mut rng) {
            Ok(p) => p,
            Err(e) => return fail(e, trace),
        };
        generation += 1;
    }
    trace.completed = true;
    Ok(trace)
}

/// GA over inclinations and ALR allocations of `orbits` groups.
pub fn run_ga_constellation(
    evaluator: &Evaluator,
    orbits: usize,
    budget: usize,
    config: &GaConfig,
    control: &RunControl,
) -> std::result::Result<OptimizerTrace, RunFailure<OptimizerTrace>> {
    let bounds = constellation_bounds(orbits).map_err(|error| RunFailure { error, partial: OptimizerTrace::default() })?;
    let sigmas = config.constellation_sigmas(orbits);
    let objective = constellation_objective(evaluator, orbits);
    let decode = |s: &SearchTrace| OptimizerTrace::from_search(s, evaluator, orbits);
    match run_ga(objective, &bounds, &sigmas, budget, config, control) {
        Ok(s) => decode(&s).map_err(|error| RunFailure { error, partial: OptimizerTrace::default() }),
        Err(RunFailure { error, partial }) => Err(RunFailure { error, partial: decode(&partial).unwrap_or_default() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn with_fitness(values: &[f64]) -> Vec<Individual> {
        values.iter().enumerate().map(|(i, &f)| Individual { genes: vec![i as f64], fitness: Some(f) }).collect()
    }

    fn sphere(x: &[f64]) -> Result<f64> {
        Ok(-x.iter().map(|v| (v - 0.5).powi(2)).sum::<f64>())
    }

    #[test]
    fn population_shape_and_determinism() {
        let bounds = constellation_bounds(3).unwrap();
        let a = init_pop(25, &bounds, &mut ChaCha8Rng::seed_from_u64(4));
        let b = init_pop(25, &bounds, &mut ChaCha8Rng::seed_from_u64(4));
        assert_eq!(a, b);
        assert_eq!(a.len(), 25);
        assert!(a.iter().all(|i| i.genes.len() == 5 && i.fitness.is_none()));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..400 {
            assert!(init_pop(25, &bounds, &mut rng).iter().all(|i| bounds.contains(&i.genes)));
        }
    }

    #[test]
    fn parent_selection() {
        let mut pop = with_fitness(&[1.0, 5.0, 3.0, 2.0, 4.0, 0.0]);
        let idx: Vec<f64> = select_parents(&pop, 5).unwrap().iter().map(|i| i.genes[0]).collect();
        assert_eq!(idx, vec![1.0, 4.0, 2.0, 3.0, 0.0]);
        pop = with_fitness(&[2.0; 25]);
        let idx: Vec<f64> = select_parents(&pop, 5).unwrap().iter().map(|i| i.genes[0]).collect();
        assert_eq!(idx, vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        assert!(matches!(select_parents(&pop[..3], 5), Err(Error::PoolTooLarge { pool: 5, population: 3 })));
    }

    #[test]
    fn crossover_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = Individual::new(vec![1.0, 2.0, 3.0]);
        assert_eq!(crossover(&p, &p, &mut rng).unwrap().genes, p.genes);
        let q = Individual::new(vec![-1.0, -2.0, -3.0]);
        let mut from_p = [0usize; 3];
        for _ in 0..10_000 {
            let c = crossover(&p, &q, &mut rng).unwrap();
            for k in 0..3 {
                assert!(c.genes[k] == p.genes[k] || c.genes[k] == q.genes[k]);
                from_p[k] += (c.genes[k] == p.genes[k]) as usize;
            }
        }
        assert!(from_p.iter().all(|&n| (4700..=5300).contains(&n)), "{from_p:?}");
        assert!(matches!(crossover(&p, &Individual::new(vec![0.0]), &mut rng), Err(Error::GeneLengthMismatch { .. })));
    }

    #[test]
    fn mutation_schedule() {
        let c = GaConfig::default();
        assert_eq!(mutation_rate(0, &c), 0.30);
        let half = std::f64::consts::LN_2 / c.mutation_decay;
        assert!((c.mutation_rate_initial * (-c.mutation_decay * half).exp() - 0.15).abs() < 1e-12);
        let rates: Vec<f64> = (0..200).map(|g| mutation_rate(g, &c)).collect();
        assert!(rates.windows(2).all(|w| w[1] < w[0] && w[1] > 0.0));
    }

    #[test]
    fn mutation_properties() {
        let bounds = constellation_bounds(3).unwrap();
        let ind = Individual::new(vec![10.0, 90.0, 170.0, 0.5, -0.5]);
        let sig = GaConfig::default().constellation_sigmas(3);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(mutate(&ind, 0.0, &sig, &bounds, &mut rng).genes, ind.genes);
        let tiny = mutate(&ind, 1.0, &[1e-9; 5], &bounds, &mut rng);
        assert!(tiny.genes.iter().zip(&ind.genes).all(|(a, b)| (a - b).abs() < 1e-6));
        let mut changed = [0usize; 5];
        for _ in 0..10_000 {
            let m = mutate(&ind, 0.3, &sig, &bounds, &mut rng);
            assert!(bounds.contains(&m.genes));
            for k in 0..5 {
                changed[k] += (m.genes[k] != ind.genes[k]) as usize;
            }
        }
        assert!(changed.iter().all(|&n| (2700..=3300).contains(&n)), "{changed:?}");
    }

    #[test]
    fn generation_split() {
        let c = GaConfig::default();
        assert_eq!((c.offspring_count(), c.immigrant_count()), (23, 2));
        let ten = GaConfig { pop_size: 10, parent_pool: 2, ..Default::default() };
        assert_eq!((ten.offspring_count(), ten.immigrant_count()), (9, 1));
        let small = GaConfig { pop_size: 5, parent_pool: 2, ..Default::default() };
        assert_eq!((small.offspring_count(), small.immigrant_count()), (4, 1));
    }

    #[test]
    fn budget_exact_and_deterministic() {
        let calls = AtomicUsize::new(0);
        let f = |x: &[f64]| {
            calls.fetch_add(1, Ordering::SeqCst);
            sphere(x)
        };
        let bounds = Bounds::unit(4);
        let c = GaConfig { seed: 3, ..Default::default() };
        let t = run_ga(f, &bounds, &[0.1; 4], 60, &c, &RunControl::new()).unwrap();
        assert_eq!(t.len(), 60);
        assert_eq!(calls.load(Ordering::SeqCst), 60);
        assert!(t.completed);
        assert!(t.rows.windows(2).all(|w| w[1].best_so_far >= w[0].best_so_far));
        let again = run_ga(sphere, &bounds, &[0.1; 4], 60, &c, &RunControl::new()).unwrap();
        assert_eq!(t, again);
        let seq = GaConfig { exec: Exec::Sequential, ..c };
        assert_eq!(t, run_ga(sphere, &bounds, &[0.1; 4], 60, &seq, &RunControl::new()).unwrap());
    }

    #[test]
    fn every_generation_has_immigrants() {
        let bounds = Bounds::unit(3);
        let c = GaConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut pop = init_pop(25, &bounds, &mut rng);
        for (k, ind) in pop.iter_mut().enumerate() {
            ind.fitness = Some(k as f64);
        }
        // With zero mutation, offspring genes come from the parent pool only.
        let frozen = GaConfig { mutation_rate_initial: 0.0, ..c };
        let next = next_generation(&pop, 0, &frozen, &bounds, &[0.1; 3], &mut rng).unwrap();
        let parents = select_parents(&pop, 5).unwrap();
        for child in &next[..23] {
            for (k, g) in child.genes.iter().enumerate() {
                assert!(parents.iter().any(|p| p.genes[k] == *g));
            }
        }
        assert_eq!(next.len(), 25);
    }

    #[test]
    fn rejects_small_budget_and_bad_config() {
        let c = GaConfig::default();
        assert!(run_ga(sphere, &Bounds::unit(2), &[0.1; 2], 10, &c, &RunControl::new()).is_err());
        let bad = GaConfig { parent_pool: 30, ..Default::default() };
        assert!(matches!(bad.validate(), Err(Error::PoolTooLarge { .. })));
        let bad = GaConfig { immigrant_fraction: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
