//! Real-coded GA: REX crossover with Just-Generation-Gap alternation.

use super::{validate_bounds, Objective, OptError, RunResult, Tracker};
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Beta, Distribution, Poisson};
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;

/// Cap `K` of the Poisson initializer, `f_ini = min(k, K) / K`.
pub const POISSON_CAP: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InitDistribution {
    /// Beta(0.99, 0.99) with probability 1000/1001, otherwise Uniform(0, 1).
    UniformBetaMix,
    /// `k ~ Poisson(1)`, mapped to `min(k, 5) / 5`.
    Poisson,
    /// Beta(0.25, 0.25).
    BetaQuarter,
}

impl InitDistribution {
    pub fn as_str(self) -> &'static str {
        match self {
            InitDistribution::UniformBetaMix => "mix",
            InitDistribution::Poisson => "poisson",
            InitDistribution::BetaQuarter => "beta025",
        }
    }
}

impl fmt::Display for InitDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InitDistribution {
    type Err = OptError;
    fn from_str(s: &str) -> Result<Self, OptError> {
        match s {
            "mix" => Ok(InitDistribution::UniformBetaMix),
            "poisson" => Ok(InitDistribution::Poisson),
            "beta025" => Ok(InitDistribution::BetaQuarter),
            other => Err(OptError::InvalidConfig(format!("unknown init distribution {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub n_parents: usize,
    pub n_children: usize,
    pub max_generations: usize,
    pub init: InitDistribution,
    /// `None` means `10 N` for an `N`-dimensional problem.
    pub population_size: Option<usize>,
    pub convergence_threshold: f64,
    /// Select survivors from parents and children instead of children only.
    pub elitist: bool,
    /// Evaluate each generation's children on the rayon pool.
    pub parallel: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            n_parents: 2,
            n_children: 4,
            max_generations: 3000,
            init: InitDistribution::UniformBetaMix,
            population_size: None,
            convergence_threshold: 1e-16,
            elitist: false,
            parallel: true,
        }
    }
}

impl GaConfig {
    pub fn population_for(&self, dim: usize) -> usize {
        self.population_size.unwrap_or(10 * dim)
    }

    pub fn validate(&self, dim: usize) -> Result<(), OptError> {
        if self.n_parents < 2 {
            return Err(OptError::TooFewParents(self.n_parents));
        }
        if self.n_children < self.n_parents {
            return Err(OptError::InvalidConfig("n_children must be at least n_parents".into()));
        }
        if self.population_for(dim) < self.n_parents {
            return Err(OptError::InvalidConfig("population smaller than n_parents".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub theta: Vec<f64>,
    pub fitness: f64,
    pub generation_born: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub individuals: Vec<Individual>,
}

impl Population {
    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    pub fn best(&self) -> Option<&Individual> {
        self.individuals.iter().min_by(|a, b| a.fitness.total_cmp(&b.fitness))
    }
}

pub fn sample_f_ini<R: Rng + ?Sized>(dist: InitDistribution, rng: &mut R) -> f64 {
    match dist {
        InitDistribution::UniformBetaMix => {
            if rng.random_range(0..1001) < 1000 {
                Beta::new(0.99, 0.99).expect("valid shape").sample(rng)
            } else {
                rng.random::<f64>()
            }
        }
        InitDistribution::Poisson => {
            let k: f64 = Poisson::new(1.0).expect("valid rate").sample(rng);
            k.min(POISSON_CAP as f64) / POISSON_CAP as f64
        }
        InitDistribution::BetaQuarter => Beta::new(0.25, 0.25).expect("valid shape").sample(rng),
    }
}

/// `size` points with `θ_j = (UB_j − LB_j) f_ini + LB_j`; fitness is left unset (`NaN`).
pub fn init_population<R: Rng + ?Sized>(
    size: usize,
    dist: InitDistribution,
    bounds: &[(f64, f64)],
    rng: &mut R,
) -> Result<Population, OptError> {
    validate_bounds(bounds)?;
    let individuals = (0..size)
        .map(|_| Individual {
            theta: bounds.iter().map(|&(lo, hi)| (hi - lo) * sample_f_ini(dist, rng) + lo).collect(),
            fitness: f64::NAN,
            generation_born: 0,
        })
        .collect();
    Ok(Population { individuals })
}

/// Half-width of the uniform ξ with standard deviation `0.9 / √N_p`.
pub fn rex_half_width(n_parents: usize) -> f64 {
    0.9 * (3.0 / n_parents as f64).sqrt()
}

/// `centroid + Σ_j ξ_j (parent_j − centroid)`, clamped to `bounds`.
pub fn rex_child(parents: &[&[f64]], xi: &[f64], bounds: &[(f64, f64)]) -> Vec<f64> {
    let np = parents.len() as f64;
    let dim = parents[0].len();
    let centroid: Vec<f64> = (0..dim).map(|k| parents.iter().map(|p| p[k]).sum::<f64>() / np).collect();
    (0..dim)
        .map(|k| {
            let v = centroid[k]
                + parents.iter().zip(xi).map(|(p, &x)| x * (p[k] - centroid[k])).sum::<f64>();
            v.clamp(bounds[k].0, bounds[k].1)
        })
        .collect()
}

pub fn rex_crossover<R: Rng + ?Sized>(
    parents: &[&[f64]],
    n_children: usize,
    bounds: &[(f64, f64)],
    rng: &mut R,
) -> Result<Vec<Vec<f64>>, OptError> {
    if parents.len() < 2 {
        return Err(OptError::TooFewParents(parents.len()));
    }
    let w = rex_half_width(parents.len());
    let mut xi = vec![0.0; parents.len()];
    Ok((0..n_children)
        .map(|_| {
            xi.iter_mut().for_each(|x| *x = rng.random_range(-w..=w));
            rex_child(parents, &xi, bounds)
        })
        .collect())
}

fn evaluate_all<O: Objective + ?Sized>(
    obj: &O,
    points: &[Vec<f64>],
    parallel: bool,
    generation: usize,
) -> Result<Vec<f64>, OptError> {
    let one = |(i, x): (usize, &Vec<f64>)| {
        obj.value(x).map_err(|e| OptError::Individual {
            generation,
            child: i,
            message: e.to_string(),
        })
    };
    if parallel && rayon::current_num_threads() > 1 {
        points.par_iter().enumerate().map(one).collect()
    } else {
        points.iter().enumerate().map(one).collect()
    }
}

fn sanitize(f: f64) -> f64 {
    if f.is_finite() {
        f
    } else {
        f64::INFINITY
    }
}

/// One JGG generation: draw `N_p` parents, replace them by the best children.
pub fn jgg_step<O: Objective + ?Sized, R: Rng + ?Sized>(
    pop: &mut Population,
    obj: &O,
    cfg: &GaConfig,
    bounds: &[(f64, f64)],
    generation: usize,
    rng: &mut R,
) -> Result<Vec<(Vec<f64>, f64)>, OptError> {
    let mut picked = sample(rng, pop.len(), cfg.n_parents).into_vec();
    picked.sort_unstable();
    let parents: Vec<&[f64]> = picked.iter().map(|&i| pop.individuals[i].theta.as_slice()).collect();
    let children = rex_crossover(&parents, cfg.n_children, bounds, rng)?;
    let fitness = evaluate_all(obj, &children, cfg.parallel, generation)?;

    let mut family: Vec<Individual> = children
        .iter()
        .zip(&fitness)
        .map(|(theta, &f)| Individual { theta: theta.clone(), fitness: sanitize(f), generation_born: generation })
        .collect();
    if cfg.elitist {
        family.extend(picked.iter().map(|&i| pop.individuals[i].clone()));
    }
    // Stable sort: ties keep child order, so parallel and serial runs agree.
    family.sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
    for (slot, survivor) in picked.iter().zip(family.into_iter()) {
        pop.individuals[*slot] = survivor;
    }
    Ok(children.into_iter().zip(fitness).collect())
}

/// `max_k Var_k / (UB_k − LB_k)` over the population.
pub fn ga_convergence_metric(pop: &Population, bounds: &[(f64, f64)]) -> f64 {
    let n = pop.len() as f64;
    bounds
        .iter()
        .enumerate()
        .map(|(k, &(lo, hi))| {
            let mean = pop.individuals.iter().map(|ind| ind.theta[k]).sum::<f64>() / n;
            let var = pop.individuals.iter().map(|ind| (ind.theta[k] - mean).powi(2)).sum::<f64>() / n;
            var / (hi - lo)
        })
        .fold(0.0, f64::max)
}

/// Same test as `ga_convergence_metric(..) < threshold`, stopping at the first
/// coordinate that is still spread out.
pub fn ga_converged(pop: &Population, bounds: &[(f64, f64)], threshold: f64) -> bool {
    let n = pop.len() as f64;
    bounds.iter().enumerate().all(|(k, &(lo, hi))| {
        let mean = pop.individuals.iter().map(|ind| ind.theta[k]).sum::<f64>() / n;
        let var = pop.individuals.iter().map(|ind| (ind.theta[k] - mean).powi(2)).sum::<f64>() / n;
        var / (hi - lo) < threshold
    })
}

pub fn rcga_minimize<O: Objective + ?Sized, R: Rng + ?Sized>(
    obj: &O,
    cfg: &GaConfig,
    bounds: &[(f64, f64)],
    rng: &mut R,
) -> Result<RunResult, OptError> {
    cfg.validate(bounds.len())?;
    let mut pop = init_population(cfg.population_for(bounds.len()), cfg.init, bounds, rng)?;
    let thetas: Vec<Vec<f64>> = pop.individuals.iter().map(|i| i.theta.clone()).collect();
    let fitness = evaluate_all(obj, &thetas, cfg.parallel, 0)?;
    let mut tracker = Tracker::new();
    for (ind, f) in pop.individuals.iter_mut().zip(fitness) {
        ind.fitness = tracker.record(&ind.theta, f);
    }
    let mut generation = 0;
    let mut converged = ga_converged(&pop, bounds, cfg.convergence_threshold);
    while !converged && generation < cfg.max_generations {
        generation += 1;
        for (theta, f) in jgg_step(&mut pop, obj, cfg, bounds, generation, rng)? {
            tracker.record(&theta, f);
        }
        converged = ga_converged(&pop, bounds, cfg.convergence_threshold);
    }
    Ok(tracker.finish(generation, converged))
}
