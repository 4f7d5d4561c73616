//! Gaussian-process regression with a Matérn 5/2 ARD kernel.
//!
//! Targets are standardized per fit; hyperparameters live in standardized
//! units and are fitted by maximizing the log marginal likelihood with a
//! multi-start bounded quasi-Newton search in log space.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::optim::{minimize_box, MinimizeOptions};

pub const LENGTHSCALE_BOUNDS: (f64, f64) = (1e-2, 10.0);
pub const SIGNAL_VARIANCE_BOUNDS: (f64, f64) = (1e-2, 1e2);
pub const NOISE_VARIANCE_BOUNDS: (f64, f64) = (1e-8, 1.0);

const JITTER_LADDER: [f64; 6] = [0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6];
const SQRT5: f64 = 2.236_067_977_499_79;

#[derive(Debug, Clone, PartialEq)]
pub struct GpHyperparams {
    pub lengthscales: Vec<f64>,
    pub signal_variance: f64,
    pub noise_variance: f64,
}

impl GpHyperparams {
    fn to_log(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.lengthscales.iter().map(|l| l.ln()).collect();
        v.push(self.signal_variance.ln());
        v.push(self.noise_variance.ln());
        v
    }

    fn from_log(theta: &[f64]) -> Self {
        let d = theta.len() - 2;
        Self {
            lengthscales: theta[..d].iter().map(|t| t.exp()).collect(),
            signal_variance: theta[d].exp(),
            noise_variance: theta[d + 1].exp(),
        }
    }
}

/// Matérn 5/2 correlation at scaled distance `r`.
pub fn matern52(r: f64) -> f64 {
    let s = SQRT5 * r;
    (1.0 + s + s * s / 3.0) * (-s).exp()
}

fn scaled_distance(a: &[f64], b: &[f64], lengthscales: &[f64]) -> f64 {
    a.iter().zip(b).zip(lengthscales).map(|((x, y), l)| ((x - y) / l).powi(2)).sum::<f64>().sqrt()
}

#[derive(Debug, Clone)]
pub struct GpFitOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Extra starting point tried before the random restarts.
    pub warm_start: Option<GpHyperparams>,
    /// When set, only the best `k` starts by likelihood are optimized.
    pub polish_top: Option<usize>,
    pub minimizer: MinimizeOptions,
}

impl Default for GpFitOptions {
    fn default() -> Self {
        Self {
            restarts: 8,
            seed: 0,
            warm_start: None,
            polish_top: None,
            minimizer: MinimizeOptions { max_iters: 60, pg_tol: 1e-5, f_tol: 1e-9, ..Default::default() },
        }
    }
}

#[derive(Debug, Clone)]
pub struct GpModel {
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
    y_mean: f64,
    y_std: f64,
    hyper: GpHyperparams,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
    jitter: f64,
    log_marginal_likelihood: f64,
}

fn standardize(targets: &[f64]) -> (f64, f64, Vec<f64>) {
    let n = targets.len() as f64;
    let mean = targets.iter().sum::<f64>() / n;
    let var = targets.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / n;
    let std = if var.sqrt() > 1e-12 { var.sqrt() } else { 1.0 };
    (mean, std, targets.iter().map(|t| (t - mean) / std).collect())
}

fn check_inputs(inputs: &[Vec<f64>], targets: &[f64]) -> Result<usize> {
    if inputs.len() != targets.len() {
        return Err(Error::Config(format!("{} inputs but {} targets", inputs.len(), targets.len())));
    }
    if inputs.len() < 2 {
        return Err(Error::Config("a GP fit needs at least two observations".into()));
    }
    let d = inputs[0].len();
    if d == 0 || inputs.iter().any(|x| x.len() != d) {
        return Err(Error::Config("GP inputs must share a positive dimension".into()));
    }
    if inputs.iter().flatten().chain(targets).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    Ok(d)
}

/// Builds the noisy kernel matrix, escalating jitter until it factors.
fn factor(inputs: &[Vec<f64>], hyper: &GpHyperparams) -> Result<(Cholesky<f64, Dyn>, f64)> {
    let n = inputs.len();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        k[(i, i)] = hyper.signal_variance + hyper.noise_variance;
        for j in 0..i {
            let v = hyper.signal_variance * matern52(scaled_distance(&inputs[i], &inputs[j], &hyper.lengthscales));
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    for jitter in JITTER_LADDER {
        let mut kj = k.clone();
        for i in 0..n {
            kj[(i, i)] += jitter;
        }
        if let Some(chol) = Cholesky::new(kj) {
            return Ok((chol, jitter));
        }
    }
    Err(Error::SingularKernel)
}

/// Per-pair squared coordinate differences, cached across likelihood
/// evaluations.
struct PairCache {
    n: usize,
    d: usize,
    /// `diff2[p * d + k]` for pair index `p` over `i > j`.
    diff2: Vec<f64>,
}

impl PairCache {
    fn new(inputs: &[Vec<f64>]) -> Self {
        let n = inputs.len();
        let d = inputs[0].len();
        let mut diff2 = Vec::with_capacity(n * (n - 1) / 2 * d);
        for i in 0..n {
            for j in 0..i {
                diff2.extend(inputs[i].iter().zip(&inputs[j]).map(|(a, b)| (a - b).powi(2)));
            }
        }
        Self { n, d, diff2 }
    }

    /// Negative log marginal likelihood and its gradient in log space.
    fn objective(&self, y: &[f64], theta: &[f64]) -> (f64, Vec<f64>) {
        let (n, d) = (self.n, self.d);
        let inv_l2: Vec<f64> = theta[..d].iter().map(|t| (-2.0 * t).exp()).collect();
        let s2 = theta[d].exp();
        let sn2 = theta[d + 1].exp();

        // Packed lower triangles, row i starting at i(i+1)/2.
        let mut kf = vec![0.0; n * (n + 1) / 2];
        let mut dfactor = Vec::with_capacity(n * (n - 1) / 2);
        let mut p = 0;
        for i in 0..n {
            let row_start = i * (i + 1) / 2;
            for j in 0..i {
                let diffs = &self.diff2[p * d..(p + 1) * d];
                let r2: f64 = diffs.iter().zip(&inv_l2).map(|(a, b)| a * b).sum();
                let s = SQRT5 * r2.sqrt();
                let e = (-s).exp();
                kf[row_start + j] = s2 * (1.0 + s + s * s / 3.0) * e;
                dfactor.push(s2 * (5.0 / 3.0) * (1.0 + s) * e);
                p += 1;
            }
            kf[row_start + i] = s2;
        }
        let Some(l) = JITTER_LADDER.iter().find_map(|&j| packed_cholesky(&kf, n, sn2 + j)) else {
            return (f64::INFINITY, vec![0.0; d + 2]);
        };
        let kinv = packed_inverse_from_cholesky(&l, n);
        let alpha: Vec<f64> = (0..n).map(|i| (0..n).map(|k| kinv[packed_index(i, k)] * y[k]).sum()).collect();
        let log_det: f64 = (0..n).map(|i| l[i * (i + 1) / 2 + i].ln()).sum::<f64>() * 2.0;
        let fit: f64 = y.iter().zip(&alpha).map(|(a, b)| a * b).sum();
        let nll = 0.5 * fit + 0.5 * log_det + 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln();

        // W = alpha alpha^T - K^{-1}; dL/dtheta = 1/2 tr(W dK).
        let mut grad = vec![0.0; d + 2];
        let mut p = 0;
        let mut kf_sum = 0.0;
        for i in 0..n {
            let row_start = i * (i + 1) / 2;
            let wii = alpha[i] * alpha[i] - kinv[row_start + i];
            kf_sum += 0.5 * wii * s2;
            grad[d + 1] += 0.5 * wii * sn2;
            for j in 0..i {
                let w = alpha[i] * alpha[j] - kinv[row_start + j];
                kf_sum += w * kf[row_start + j];
                let wf = w * dfactor[p];
                let diffs = &self.diff2[p * d..(p + 1) * d];
                for ((g, a), b) in grad[..d].iter_mut().zip(diffs).zip(&inv_l2) {
                    *g += wf * a * b;
                }
                p += 1;
            }
        }
        grad[d] = kf_sum;
        for g in grad.iter_mut() {
            *g = -*g;
        }
        (nll, grad)
    }
}

/// Dot product with independent accumulators so the reduction pipelines.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0; 8];
    let split = n - n % 8;
    for (ca, cb) in a[..split].chunks_exact(8).zip(b[..split].chunks_exact(8)) {
        for k in 0..8 {
            acc[k] += ca[k] * cb[k];
        }
    }
    let tail: f64 = a[split..].iter().zip(&b[split..]).map(|(x, y)| x * y).sum();
    (acc[0] + acc[4]) + (acc[1] + acc[5]) + (acc[2] + acc[6]) + (acc[3] + acc[7]) + tail
}

fn packed_index(i: usize, j: usize) -> usize {
    let (i, j) = if i >= j { (i, j) } else { (j, i) };
    i * (i + 1) / 2 + j
}

/// Cholesky factor of a packed symmetric matrix with `diag_add` added to
/// its diagonal; `None` unless positive definite.
fn packed_cholesky(a: &[f64], n: usize, diag_add: f64) -> Option<Vec<f64>> {
    let mut l = vec![0.0; a.len()];
    for i in 0..n {
        let ri = i * (i + 1) / 2;
        for j in 0..=i {
            let rj = j * (j + 1) / 2;
            let dot = dot(&l[ri..ri + j], &l[rj..rj + j]);
            let mut v = a[ri + j] - dot;
            if i == j {
                v += diag_add;
                if !(v > 0.0) {
                    return None;
                }
                l[ri + i] = v.sqrt();
            } else {
                l[ri + j] = v / l[rj + j];
            }
        }
    }
    Some(l)
}

/// K⁻¹ = L⁻ᵀ L⁻¹ in packed form.
fn packed_inverse_from_cholesky(l: &[f64], n: usize) -> Vec<f64> {
    // Rows of mt are the columns of L⁻¹: mt[j][k] = (L⁻¹)[k][j] for k ≥ j.
    let mut mt = vec![0.0; n * n];
    for j in 0..n {
        mt[j * n + j] = 1.0 / l[j * (j + 1) / 2 + j];
        for i in j + 1..n {
            let ri = i * (i + 1) / 2;
            let dot = dot(&l[ri + j..ri + i], &mt[j * n + j..j * n + i]);
            mt[j * n + i] = -dot / l[ri + i];
        }
    }
    let mut inv = vec![0.0; n * (n + 1) / 2];
    for i in 0..n {
        let ri = i * (i + 1) / 2;
        for j in 0..=i {
            inv[ri + j] = dot(&mt[i * n + i..(i + 1) * n], &mt[j * n + i..(j + 1) * n]);
        }
    }
    inv
}

fn log_bounds(d: usize) -> (Vec<f64>, Vec<f64>) {
    let mut lo = vec![LENGTHSCALE_BOUNDS.0.ln(); d];
    let mut hi = vec![LENGTHSCALE_BOUNDS.1.ln(); d];
    lo.push(SIGNAL_VARIANCE_BOUNDS.0.ln());
    hi.push(SIGNAL_VARIANCE_BOUNDS.1.ln());
    lo.push(NOISE_VARIANCE_BOUNDS.0.ln());
    hi.push(NOISE_VARIANCE_BOUNDS.1.ln());
    (lo, hi)
}

/// Fits hyperparameters by maximum marginal likelihood.
pub fn gp_fit(inputs: &[Vec<f64>], targets: &[f64], opts: &GpFitOptions) -> Result<GpModel> {
    let d = check_inputs(inputs, targets)?;
    let (_, _, y) = standardize(targets);
    let cache = PairCache::new(inputs);
    let (lo, hi) = log_bounds(d);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts: Vec<Vec<f64>> = Vec::new();
    if let Some(w) = &opts.warm_start {
        if w.lengthscales.len() == d {
            starts.push(w.to_log());
        }
    }
    for _ in 0..opts.restarts.max(1) {
        starts.push(lo.iter().zip(&hi).map(|(&a, &b)| rng.random_range(a..=b)).collect());
    }

    if let Some(k) = opts.polish_top {
        let mut scored: Vec<(f64, Vec<f64>)> = starts.into_iter().map(|t| (cache.objective(&y, &t).0, t)).collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0));
        starts = scored.into_iter().take(k.max(1)).map(|(_, t)| t).collect();
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    for start in starts {
        let m = minimize_box(|t| cache.objective(&y, t), &start, &lo, &hi, &opts.minimizer);
        if m.value.is_finite() && best.as_ref().is_none_or(|(v, _)| m.value < *v) {
            best = Some((m.value, m.x));
        }
    }
    let (_, theta) = best.ok_or(Error::SingularKernel)?;
    GpModel::with_hyperparams(inputs, targets, GpHyperparams::from_log(&theta))
}

impl GpModel {
    /// Conditions a GP with fixed hyperparameters on the data.
    pub fn with_hyperparams(inputs: &[Vec<f64>], targets: &[f64], hyper: GpHyperparams) -> Result<Self> {
        let d = check_inputs(inputs, targets)?;
        if hyper.lengthscales.len() != d
            || hyper.lengthscales.iter().any(|l| !(*l > 0.0))
            || !(hyper.signal_variance > 0.0)
            || !(hyper.noise_variance > 0.0)
        {
            return Err(Error::Config("GP hyperparameters must be positive and match the input dimension".into()));
        }
        let (y_mean, y_std, ys) = standardize(targets);
        let y = DVector::from_vec(ys);
        let (chol, jitter) = factor(inputs, &hyper)?;
        let alpha = chol.solve(&y);
        let log_det: f64 = chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>() * 2.0;
        let n = inputs.len() as f64;
        let log_marginal_likelihood =
            -0.5 * y.dot(&alpha) - 0.5 * log_det - 0.5 * n * (2.0 * std::f64::consts::PI).ln();
        Ok(Self {
            inputs: inputs.to_vec(),
            targets: targets.to_vec(),
            y_mean,
            y_std,
            hyper,
            chol,
            alpha,
            jitter,
            log_marginal_likelihood,
        })
    }

    pub fn hyperparams(&self) -> &GpHyperparams {
        &self.hyper
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn log_marginal_likelihood(&self) -> f64 {
        self.log_marginal_likelihood
    }

    /// Maps a raw target into standardized units.
    pub fn standardize(&self, y: f64) -> f64 {
        (y - self.y_mean) / self.y_std
    }

    /// Posterior mean and latent variance in standardized units.
    pub fn predict_standardized(&self, x: &[f64]) -> (f64, f64) {
        let kstar = DVector::from_iterator(
            self.inputs.len(),
            self.inputs
                .iter()
                .map(|xi| self.hyper.signal_variance * matern52(scaled_distance(x, xi, &self.hyper.lengthscales))),
        );
        let mean = kstar.dot(&self.alpha);
        let v = self.chol.l_dirty().solve_lower_triangular(&kstar).unwrap_or_else(|| DVector::zeros(kstar.len()));
        let var = (self.hyper.signal_variance - v.norm_squared()).max(0.0);
        (mean, var)
    }

    /// Posterior mean and latent variance in target units.
    pub fn predict(&self, x: &[f64]) -> (f64, f64) {
        let (m, v) = self.predict_standardized(x);
        (self.y_mean + self.y_std * m, v * self.y_std * self.y_std)
    }
}

pub fn gp_predict(gp: &GpModel, x: &[f64]) -> (f64, f64) {
    gp.predict(x)
}
