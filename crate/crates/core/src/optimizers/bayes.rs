//! Gaussian-process Bayesian optimization with expected improvement.

use super::{validate_bounds, Objective, OptError, RunResult, Tracker};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

#[derive(Debug, Clone, PartialEq)]
pub struct BayesConfig {
    pub max_iterations: usize,
    pub initial_design: usize,
    /// Uniform candidates per acquisition step.
    pub global_candidates: usize,
    /// Gaussian perturbations of the incumbent per acquisition step.
    pub local_candidates: usize,
    /// Perturbation width in the unit cube.
    pub local_sigma: f64,
    /// Lengthscales tried on the unit cube, multiplied by `√d`.
    pub lengthscales: Vec<f64>,
    /// EI exploration margin on the standardized scale.
    pub xi: f64,
}

impl Default for BayesConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            initial_design: 10,
            global_candidates: 256,
            local_candidates: 256,
            local_sigma: 0.05,
            lengthscales: vec![0.05, 0.1, 0.2, 0.4, 0.8],
            xi: 0.01,
        }
    }
}

const JITTERS: [f64; 5] = [1e-10, 1e-8, 1e-6, 1e-4, 1e-3];

struct Gp {
    points: Vec<Vec<f64>>,
    chol: Vec<f64>,
    alpha: Vec<f64>,
    inv_two_l2: f64,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn cholesky(k: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = k[i * n + j] - (0..j).map(|p| l[i * n + p] * l[j * n + p]).sum::<f64>();
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

fn forward(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut z = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|p| l[i * n + p] * z[p]).sum();
        z[i] = (b[i] - s) / l[i * n + i];
    }
    z
}

fn backward(l: &[f64], n: usize, z: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|p| l[p * n + i] * x[p]).sum();
        x[i] = (z[i] - s) / l[i * n + i];
    }
    x
}

impl Gp {
    /// Fit on standardized targets; returns the model and its log marginal likelihood.
    fn fit(points: &[Vec<f64>], y: &[f64], lengthscale: f64) -> Option<(Self, f64)> {
        let n = points.len();
        let inv_two_l2 = 1.0 / (2.0 * lengthscale * lengthscale);
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = (-sq_dist(&points[i], &points[j]) * inv_two_l2).exp();
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
        }
        for jitter in JITTERS {
            let mut kj = k.clone();
            (0..n).for_each(|i| kj[i * n + i] += jitter);
            if let Some(chol) = cholesky(&kj, n) {
                let z = forward(&chol, n, y);
                let alpha = backward(&chol, n, &z);
                let log_det: f64 = (0..n).map(|i| chol[i * n + i].ln()).sum();
                let lml = -0.5 * z.iter().map(|v| v * v).sum::<f64>() - log_det;
                return Some((Self { points: points.to_vec(), chol, alpha, inv_two_l2 }, lml));
            }
        }
        None
    }

    fn predict(&self, u: &[f64]) -> (f64, f64) {
        let n = self.points.len();
        let ks: Vec<f64> = self.points.iter().map(|p| (-sq_dist(p, u) * self.inv_two_l2).exp()).collect();
        let mean = ks.iter().zip(&self.alpha).map(|(a, b)| a * b).sum();
        let v = forward(&self.chol, n, &ks);
        let var = (1.0 - v.iter().map(|x| x * x).sum::<f64>()).max(1e-12);
        (mean, var.sqrt())
    }
}

fn expected_improvement(best: f64, mean: f64, sd: f64, xi: f64) -> f64 {
    let imp = best - mean - xi;
    let z = imp / sd;
    let cdf = 0.5 * libm::erfc(-z / std::f64::consts::SQRT_2);
    let pdf = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    imp * cdf + sd * pdf
}

/// Latin hypercube sample of `n` points in `[0, 1]^d`.
fn latin_hypercube<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut pts = vec![vec![0.0; d]; n];
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..d {
        perm.shuffle(rng);
        for (i, p) in pts.iter_mut().enumerate() {
            p[k] = (perm[i] as f64 + rng.random::<f64>()) / n as f64;
        }
    }
    pts
}

pub fn bayesian_minimize<O: Objective + ?Sized, R: Rng + ?Sized>(
    obj: &O,
    bounds: &[(f64, f64)],
    cfg: &BayesConfig,
    rng: &mut R,
) -> Result<RunResult, OptError> {
    validate_bounds(bounds)?;
    let d = bounds.len();
    if d == 0 || cfg.initial_design == 0 || cfg.lengthscales.is_empty() {
        return Err(OptError::InvalidConfig("bayes needs a non-empty design, box and lengthscale grid".into()));
    }
    let to_x = |u: &[f64]| -> Vec<f64> { u.iter().zip(bounds).map(|(v, (lo, hi))| lo + v * (hi - lo)).collect() };
    let mut t = Tracker::new();
    let mut us = latin_hypercube(cfg.initial_design, d, rng);
    let mut ys = Vec::with_capacity(cfg.initial_design + cfg.max_iterations);
    for u in &us {
        ys.push(t.eval(obj, &to_x(u))?);
    }
    let normal = Normal::new(0.0, cfg.local_sigma).map_err(|e| OptError::InvalidConfig(e.to_string()))?;
    let scale = (d as f64).sqrt();
    for _ in 0..cfg.max_iterations {
        let finite: Vec<f64> = ys.iter().copied().filter(|v| v.is_finite()).collect();
        let mean = finite.iter().sum::<f64>() / finite.len().max(1) as f64;
        let sd = (finite.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / finite.len().max(1) as f64).sqrt();
        let sd = if sd > 0.0 { sd } else { 1.0 };
        // Non-finite observations are pinned to the worst finite value.
        let worst = finite.iter().copied().fold(mean, f64::max);
        let yn: Vec<f64> = ys.iter().map(|&v| ((if v.is_finite() { v } else { worst }) - mean) / sd).collect();

        let mut model: Option<(Gp, f64)> = None;
        for &l in &cfg.lengthscales {
            if let Some((gp, lml)) = Gp::fit(&us, &yn, l * scale) {
                if model.as_ref().is_none_or(|(_, best)| lml > *best) {
                    model = Some((gp, lml));
                }
            }
        }
        let Some((gp, _)) = model else {
            return Err(OptError::IllConditioned {
                jitter: JITTERS[JITTERS.len() - 1],
                n: us.len(),
                lengthscale: cfg.lengthscales[cfg.lengthscales.len() - 1] * scale,
            });
        };

        let best_idx = (0..yn.len()).min_by(|&a, &b| yn[a].total_cmp(&yn[b])).expect("non-empty");
        let incumbent = us[best_idx].clone();
        let best_y = yn[best_idx];
        let mut pick = incumbent.clone();
        let mut pick_ei = f64::NEG_INFINITY;
        for c in 0..cfg.global_candidates + cfg.local_candidates {
            let u: Vec<f64> = if c < cfg.global_candidates {
                (0..d).map(|_| rng.random::<f64>()).collect()
            } else {
                incumbent.iter().map(|v| (v + normal.sample(rng)).clamp(0.0, 1.0)).collect()
            };
            let (m, s) = gp.predict(&u);
            let ei = expected_improvement(best_y, m, s, cfg.xi);
            if ei > pick_ei {
                pick_ei = ei;
                pick = u;
            }
        }
        ys.push(t.eval(obj, &to_x(&pick))?);
        us.push(pick);
    }
    Ok(t.finish(cfg.max_iterations, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizers::FnObjective;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quadratic_1d() {
        let obj = FnObjective(|x: &[f64]| (x[0] - 0.3).powi(2));
        let cfg = BayesConfig { max_iterations: 30, ..BayesConfig::default() };
        let r = bayesian_minimize(&obj, &[(-1.0, 1.0)], &cfg, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        assert!((r.best_theta[0] - 0.3).abs() < 0.05, "{:?}", r.best_theta);
        assert_eq!(r.evaluations, 40);
    }

    #[test]
    fn zero_iterations_is_best_design_point() {
        let obj = FnObjective(|x: &[f64]| x[0] + x[1]);
        let cfg = BayesConfig { max_iterations: 0, ..BayesConfig::default() };
        let b = [(-1.0, 1.0), (-1.0, 1.0)];
        let r = bayesian_minimize(&obj, &b, &cfg, &mut ChaCha8Rng::seed_from_u64(12)).unwrap();
        let design = latin_hypercube(10, 2, &mut ChaCha8Rng::seed_from_u64(12));
        let best = design.iter().map(|u| (2.0 * u[0] - 1.0) + (2.0 * u[1] - 1.0)).fold(f64::MAX, f64::min);
        assert!((r.best_fitness - best).abs() < 1e-15);
        assert_eq!(r.evaluations, 10);
    }

    #[test]
    fn constant_objective() {
        let obj = FnObjective(|_: &[f64]| 2.5);
        let cfg = BayesConfig { max_iterations: 5, ..BayesConfig::default() };
        let r = bayesian_minimize(&obj, &[(0.0, 1.0); 3], &cfg, &mut ChaCha8Rng::seed_from_u64(13)).unwrap();
        assert_eq!(r.best_fitness, 2.5);
    }

    #[test]
    fn latin_hypercube_strata() {
        let pts = latin_hypercube(8, 3, &mut ChaCha8Rng::seed_from_u64(14));
        for k in 0..3 {
            let mut bins: Vec<usize> = pts.iter().map(|p| (p[k] * 8.0) as usize).collect();
            bins.sort_unstable();
            assert_eq!(bins, (0..8).collect::<Vec<_>>());
        }
    }

    #[test]
    fn ei_is_positive_and_grows_with_uncertainty() {
        assert!(expected_improvement(0.0, 0.0, 1.0, 0.0) > 0.0);
        assert!(expected_improvement(0.0, 0.5, 2.0, 0.0) > expected_improvement(0.0, 0.5, 0.5, 0.0));
    }
}
