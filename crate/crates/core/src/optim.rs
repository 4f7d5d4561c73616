//! Bounded quasi-Newton minimization (projected L-BFGS with an Armijo
//! backtracking search along the projection arc).

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy)]
pub struct MinimizeOptions {
    pub max_iters: usize,
    pub memory: usize,
    /// Stop when the projected gradient's max-norm falls below this.
    pub pg_tol: f64,
    /// Stop when the relative decrease of f falls below this.
    pub f_tol: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self { max_iters: 100, memory: 8, pg_tol: 1e-6, f_tol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

fn project(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((v, &l), &u) in x.iter_mut().zip(lower).zip(upper) {
        *v = v.clamp(l, u);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes `f` over the box `[lower, upper]`. `f` returns the value and
/// gradient; non-finite values are treated as rejected steps.
pub fn minimize_box<F>(mut f: F, x0: &[f64], lower: &[f64], upper: &[f64], opts: &MinimizeOptions) -> Minimum
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let n = x0.len();
    assert_eq!(lower.len(), n);
    assert_eq!(upper.len(), n);
    let mut x = x0.to_vec();
    project(&mut x, lower, upper);
    let (mut fx, mut g) = f(&x);
    let mut evaluations = 1;
    let mut memory: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory);
    let mut iterations = 0;

    if !fx.is_finite() {
        return Minimum { x, value: fx, iterations, evaluations };
    }

    while iterations < opts.max_iters {
        iterations += 1;
        let free: Vec<bool> = (0..n)
            .map(|i| !((x[i] <= lower[i] && g[i] > 0.0) || (x[i] >= upper[i] && g[i] < 0.0)))
            .collect();
        let pg_norm = (0..n)
            .map(|i| (x[i] - (x[i] - g[i]).clamp(lower[i], upper[i])).abs())
            .fold(0.0, f64::max);
        if pg_norm < opts.pg_tol {
            break;
        }

        let masked = |v: &[f64]| -> Vec<f64> { v.iter().zip(&free).map(|(&a, &m)| if m { a } else { 0.0 }).collect() };
        let mut d = two_loop(&masked(&g), &memory, &masked);
        for v in d.iter_mut() {
            *v = -*v;
        }
        if dot(&d, &g) >= 0.0 {
            d = masked(&g).iter().map(|v| -v).collect();
            memory.clear();
        }

        let mut step = if memory.is_empty() {
            let norm = dot(&d, &d).sqrt();
            if norm > 0.0 { (1.0 / norm).min(1.0) } else { 1.0 }
        } else {
            1.0
        };
        let mut accepted = None;
        for _ in 0..40 {
            let mut trial: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + step * b).collect();
            project(&mut trial, lower, upper);
            let s: Vec<f64> = trial.iter().zip(&x).map(|(a, b)| a - b).collect();
            let decrease = dot(&g, &s);
            if decrease >= 0.0 && s.iter().all(|v| *v == 0.0) {
                break;
            }
            let (ft, gt) = f(&trial);
            evaluations += 1;
            if ft.is_finite() && ft <= fx + 1e-4 * decrease {
                accepted = Some((trial, ft, gt, s));
                break;
            }
            step *= 0.5;
        }
        let Some((trial, ft, gt, s)) = accepted else { break };

        let y: Vec<f64> = gt.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&y, &y).max(1e-300) {
            if memory.len() == opts.memory {
                memory.pop_front();
            }
            memory.push_back((s, y, 1.0 / sy));
        }
        let rel = (fx - ft).abs() / fx.abs().max(ft.abs()).max(1.0);
        x = trial;
        fx = ft;
        g = gt;
        if rel < opts.f_tol {
            break;
        }
    }
    Minimum { x, value: fx, iterations, evaluations }
}

fn two_loop(
    g: &[f64],
    memory: &VecDeque<(Vec<f64>, Vec<f64>, f64)>,
    masked: &dyn Fn(&[f64]) -> Vec<f64>,
) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(memory.len());
    for (s, y, rho) in memory.iter().rev() {
        let s = masked(s);
        let a = rho * dot(&s, &q);
        for (qi, yi) in q.iter_mut().zip(masked(y)) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = memory.back() {
        let (s, y) = (masked(s), masked(y));
        let yy = dot(&y, &y);
        if yy > 0.0 {
            let gamma = dot(&s, &y) / yy;
            if gamma > 0.0 {
                q.iter_mut().for_each(|v| *v *= gamma);
            }
        }
    }
    for ((s, y, rho), a) in memory.iter().zip(alphas.into_iter().rev()) {
        let (s, y) = (masked(s), masked(y));
        let b = rho * dot(&y, &q);
        for (qi, si) in q.iter_mut().zip(&s) {
            *qi += (a - b) * si;
        }
    }
    masked(&q)
}

/// Central-difference gradient that stays inside the box (one-sided at the
/// faces).
pub fn finite_difference_gradient<F>(f: &F, x: &[f64], lower: &[f64], upper: &[f64], h: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let hi = (x[i] + h).min(upper[i]);
            let lo = (x[i] - h).max(lower[i]);
            if hi <= lo {
                return 0.0;
            }
            probe[i] = hi;
            let fh = f(&probe);
            probe[i] = lo;
            let fl = f(&probe);
            probe[i] = x[i];
            (fh - fl) / (hi - lo)
        })
        .collect()
}
