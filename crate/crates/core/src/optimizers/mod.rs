//! Black-box minimizers over `f64` parameter vectors.

mod bayes;
mod classical;
mod rcga;

pub use bayes::{bayesian_minimize, BayesConfig};
pub use classical::{classical_minimize, finite_difference_gradient, ClassicalConfig, ClassicalMethod, FD_STEP};
pub use rcga::{
    ga_converged, ga_convergence_metric, init_population, jgg_step, rcga_minimize, rex_child,
    rex_crossover, rex_half_width, sample_f_ini, GaConfig, Individual, InitDistribution, Population,
};

use crate::objective::VqeObjective;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptError {
    #[error("objective failed: {0}")]
    Objective(String),
    #[error("objective is not finite at the starting point")]
    NonFiniteStart,
    #[error("bounds for coordinate {0} are not ordered")]
    InvalidBounds(usize),
    #[error("REX needs at least 2 parents, got {0}")]
    TooFewParents(usize),
    #[error("point has dimension {found}, expected {expected}")]
    DimensionMismatch { found: usize, expected: usize },
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),
    #[error("generation {generation}, child {child}: {message}")]
    Individual { generation: usize, child: usize, message: String },
    #[error("GP kernel matrix not positive definite with jitter {jitter:e} (n = {n}, lengthscale {lengthscale})")]
    IllConditioned { jitter: f64, n: usize, lengthscale: f64 },
    #[error("unknown optimizer {0:?}")]
    UnknownOptimizer(String),
}

/// A pure, reentrant scalar objective.
pub trait Objective: Sync {
    fn value(&self, x: &[f64]) -> Result<f64, OptError>;
}

/// Adapts a plain closure.
pub struct FnObjective<F>(pub F);

impl<F: Fn(&[f64]) -> f64 + Sync> Objective for FnObjective<F> {
    fn value(&self, x: &[f64]) -> Result<f64, OptError> {
        Ok((self.0)(x))
    }
}

impl<O: Objective + ?Sized> Objective for &O {
    fn value(&self, x: &[f64]) -> Result<f64, OptError> {
        (**self).value(x)
    }
}

impl Objective for VqeObjective<'_, f64> {
    fn value(&self, x: &[f64]) -> Result<f64, OptError> {
        self.evaluate(x).map(|r| r.total).map_err(|e| OptError::Objective(e.to_string()))
    }
}

/// Optimizes the coordinates in `free`, holding the others at `base`.
pub struct Frozen<'a, O: ?Sized> {
    inner: &'a O,
    base: Vec<f64>,
    free: Range<usize>,
}

impl<'a, O: Objective + ?Sized> Frozen<'a, O> {
    pub fn new(inner: &'a O, base: Vec<f64>, free: Range<usize>) -> Self {
        assert!(free.end <= base.len(), "free range exceeds the parameter vector");
        Self { inner, base, free }
    }

    /// Free leading coordinates, fixed `tail`.
    pub fn tail(inner: &'a O, free: usize, tail: &[f64]) -> Self {
        let mut base = vec![0.0; free];
        base.extend_from_slice(tail);
        Self::new(inner, base, 0..free)
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    pub fn embed(&self, x: &[f64]) -> Vec<f64> {
        let mut full = self.base.clone();
        full[self.free.clone()].copy_from_slice(x);
        full
    }
}

impl<O: Objective + ?Sized> Objective for Frozen<'_, O> {
    fn value(&self, x: &[f64]) -> Result<f64, OptError> {
        if x.len() != self.free.len() {
            return Err(OptError::DimensionMismatch { found: x.len(), expected: self.free.len() });
        }
        self.inner.value(&self.embed(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OptimizerId {
    Rcga,
    Powell,
    Cg,
    NelderMead,
    Bfgs,
    Bayes,
}

impl OptimizerId {
    pub const ALL: [OptimizerId; 6] = [
        OptimizerId::Rcga,
        OptimizerId::Powell,
        OptimizerId::Cg,
        OptimizerId::NelderMead,
        OptimizerId::Bfgs,
        OptimizerId::Bayes,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OptimizerId::Rcga => "rcga",
            OptimizerId::Powell => "powell",
            OptimizerId::Cg => "cg",
            OptimizerId::NelderMead => "nelder-mead",
            OptimizerId::Bfgs => "bfgs",
            OptimizerId::Bayes => "bayes",
        }
    }

    pub fn classical(self) -> Option<ClassicalMethod> {
        match self {
            OptimizerId::Powell => Some(ClassicalMethod::Powell),
            OptimizerId::Cg => Some(ClassicalMethod::Cg),
            OptimizerId::NelderMead => Some(ClassicalMethod::NelderMead),
            OptimizerId::Bfgs => Some(ClassicalMethod::Bfgs),
            _ => None,
        }
    }
}

impl fmt::Display for OptimizerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OptimizerId {
    type Err = OptError;
    fn from_str(s: &str) -> Result<Self, OptError> {
        OptimizerId::ALL
            .into_iter()
            .find(|o| o.as_str() == s || (s == "nelder_mead" && *o == OptimizerId::NelderMead))
            .ok_or_else(|| OptError::UnknownOptimizer(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best_theta: Vec<f64>,
    pub best_fitness: f64,
    pub evaluations: usize,
    /// Generations for the GA, iterations otherwise.
    pub iterations: usize,
    pub converged: bool,
    /// `(evaluation count, best so far)` at every improvement.
    pub trajectory: Vec<(usize, f64)>,
}

/// Counts evaluations and keeps the best point seen.
#[derive(Debug, Clone)]
pub(crate) struct Tracker {
    evaluations: usize,
    best_theta: Vec<f64>,
    best: f64,
    trajectory: Vec<(usize, f64)>,
}

impl Tracker {
    pub(crate) fn new() -> Self {
        Self { evaluations: 0, best_theta: Vec::new(), best: f64::INFINITY, trajectory: Vec::new() }
    }

    /// Record an already computed value. Non-finite values count as `+∞`.
    pub(crate) fn record(&mut self, x: &[f64], f: f64) -> f64 {
        self.evaluations += 1;
        let f = if f.is_finite() { f } else { f64::INFINITY };
        if f < self.best || self.best_theta.is_empty() {
            if f < self.best {
                self.best = f;
                self.trajectory.push((self.evaluations, f));
            }
            self.best_theta = x.to_vec();
        }
        f
    }

    pub(crate) fn eval<O: Objective + ?Sized>(&mut self, obj: &O, x: &[f64]) -> Result<f64, OptError> {
        let f = obj.value(x)?;
        Ok(self.record(x, f))
    }

    pub(crate) fn finish(self, iterations: usize, converged: bool) -> RunResult {
        RunResult {
            best_theta: self.best_theta,
            best_fitness: self.best,
            evaluations: self.evaluations,
            iterations,
            converged,
            trajectory: self.trajectory,
        }
    }
}

pub fn validate_bounds(bounds: &[(f64, f64)]) -> Result<(), OptError> {
    for (i, &(lo, hi)) in bounds.iter().enumerate() {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(OptError::InvalidBounds(i));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracker_trajectory_is_monotone() {
        let mut t = Tracker::new();
        for (i, f) in [3.0, 5.0, 2.0, f64::NAN, 2.0, 1.0].into_iter().enumerate() {
            t.record(&[i as f64], f);
        }
        let r = t.finish(0, false);
        assert_eq!(r.best_fitness, 1.0);
        assert_eq!(r.best_theta, vec![5.0]);
        assert_eq!(r.evaluations, 6);
        assert_eq!(r.trajectory, vec![(1, 3.0), (3, 2.0), (6, 1.0)]);
    }

    #[test]
    fn frozen_embeds() {
        let obj = FnObjective(|x: &[f64]| x.iter().enumerate().map(|(i, v)| i as f64 * v).sum());
        let frozen = Frozen::tail(&obj, 1, &[1.0, 1.0]);
        assert_eq!(frozen.embed(&[5.0]), vec![5.0, 1.0, 1.0]);
        assert_eq!(frozen.value(&[5.0]).unwrap(), 3.0);
        let middle = Frozen::new(&obj, vec![1.0; 4], 1..3);
        assert_eq!(middle.embed(&[7.0, 8.0]), vec![1.0, 7.0, 8.0, 1.0]);
        assert!(middle.value(&[1.0]).is_err());
    }

    #[test]
    fn optimizer_ids_round_trip() {
        for o in OptimizerId::ALL {
            assert_eq!(o.as_str().parse::<OptimizerId>().unwrap(), o);
        }
        assert!("adam".parse::<OptimizerId>().is_err());
    }
}
