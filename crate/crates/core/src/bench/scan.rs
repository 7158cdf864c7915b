use super::{log_error, BenchError, BenchmarkRecord, TargetState};
use crate::ansatz::{build_ansatz, default_bounds, prepare_state, AnsatzMode};
use crate::objective::{energy_term, spin_targets, ObjectiveConfig, StateRegistry, VqeObjective, DEFAULT_CONSTRAINT_WEIGHT};
use crate::optimizers::{
    bayesian_minimize, classical_minimize, rcga_minimize, BayesConfig, ClassicalConfig, Frozen, GaConfig,
    InitDistribution, Objective, OptError, OptimizerId, RunResult,
};
use crate::oracle::{reference_energies, LevelEnergies};
use crate::pauli::{CoefficientTable, HamiltonianSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScanMode {
    /// Excited states optimize only the cluster angles; the Hamiltonian-slice
    /// angles stay at the values found for the first solved state.
    FixedHamiltonian,
    AllVariables,
}

/// Angles optimized for the first state of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FirstStateVariables {
    All,
    /// Cluster angles held at zero; only the Hamiltonian-slice angles move.
    HamiltonianOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaBudget {
    pub generations: usize,
    pub population: usize,
}

impl GaBudget {
    pub fn default_for(state: TargetState, mode: ScanMode) -> Self {
        let i = state as usize;
        let generations = match mode {
            ScanMode::FixedHamiltonian => [3000, 10000, 10000, 15000][i],
            ScanMode::AllVariables => [30000, 40000, 120000, 120000][i],
        };
        Self { generations, population: [300, 100, 100, 100][i] }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub r_step: f64,
    pub repetitions: usize,
    pub optimizer: OptimizerId,
    pub states: Vec<TargetState>,
    pub mode: ScanMode,
    pub first_state_variables: FirstStateVariables,
    pub base_seed: u64,
    pub depth: usize,
    pub init: InitDistribution,
    /// Per-state override; `None` uses [`GaBudget::default_for`].
    pub ga_budget: Option<GaBudget>,
    pub elitist: bool,
    /// Overrides the method's default iteration cap.
    pub classical_iterations: Option<usize>,
    pub bayes: BayesConfig,
    /// Optimize only the first `k` free angles with the Bayesian method.
    pub bayes_dims: Option<usize>,
    pub objective: ObjectiveConfig<f64>,
    pub constraint_weight: f64,
    /// Classical starts are uniform on `±theta0_width`.
    pub theta0_width: f64,
    /// Fill `wall_seconds`; off by default so output is reproducible byte for byte.
    pub record_timing: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            r_min: 0.1,
            r_max: 2.5,
            r_step: 0.1,
            repetitions: 5,
            optimizer: OptimizerId::Bfgs,
            states: vec![TargetState::Ground],
            mode: ScanMode::FixedHamiltonian,
            first_state_variables: FirstStateVariables::All,
            base_seed: 0,
            depth: 2,
            init: InitDistribution::UniformBetaMix,
            ga_budget: None,
            elitist: false,
            classical_iterations: None,
            bayes: BayesConfig::default(),
            bayes_dims: None,
            objective: ObjectiveConfig::default(),
            constraint_weight: DEFAULT_CONSTRAINT_WEIGHT,
            theta0_width: 0.1,
            record_timing: false,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: &str| Err(BenchError::Config(m.to_string()));
        if !(self.r_step > 0.0) {
            return bad("r_step must be positive");
        }
        if !(self.r_min > 0.0) || self.r_max < self.r_min {
            return bad("need 0 < r_min <= r_max");
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1");
        }
        if self.depth == 0 {
            return bad("depth must be at least 1");
        }
        if self.states.is_empty() || !self.states.windows(2).all(|w| w[0] < w[1]) {
            return bad("states must be non-empty, distinct and ordered by energy");
        }
        if self.constraint_weight < 0.0 || !(self.theta0_width >= 0.0) {
            return bad("weights and widths must be non-negative");
        }
        if self.bayes_dims == Some(0) {
            return bad("bayes dimension restriction must be at least 1");
        }
        self.objective.validate()?;
        Ok(())
    }
}

/// Grid `r_min, r_min + step, …, ≤ r_max` (with a small tolerance on the last point).
pub fn grid(r_min: f64, r_max: f64, r_step: f64) -> Vec<f64> {
    let n = ((r_max - r_min) / r_step + 1e-9).floor() as usize + 1;
    (0..n).map(|i| r_min + i as f64 * r_step).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub r: f64,
    pub repetition: usize,
    pub state: TargetState,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScanOutput {
    pub records: Vec<BenchmarkRecord>,
    pub failures: Vec<CellFailure>,
}

pub fn cell_seed(base: u64, r_index: usize, repetition: usize) -> u64 {
    base ^ (((r_index as u64) << 32) | repetition as u64)
}

pub fn run_scan(cfg: &ScanConfig, table: &CoefficientTable<f64>) -> Result<ScanOutput, BenchError> {
    cfg.validate()?;
    let points = grid(cfg.r_min, cfg.r_max, cfg.r_step);
    table.covers(&points)?;
    let specs: Vec<HamiltonianSpec<f64>> =
        points.iter().map(|&r| table.get(r).cloned()).collect::<Result<_, _>>()?;
    let sub = CoefficientTable::from_specs(specs.clone())?;
    let exact = reference_energies(&sub)?;

    let cells: Vec<(usize, usize)> =
        (0..specs.len()).flat_map(|i| (0..cfg.repetitions).map(move |rep| (i, rep))).collect();
    let results: Vec<(Vec<BenchmarkRecord>, Vec<CellFailure>)> = cells
        .par_iter()
        .map(|&(i, rep)| run_cell(cfg, &specs[i], &exact[i].1, cell_seed(cfg.base_seed, i, rep), rep))
        .collect();

    let mut out = ScanOutput::default();
    for (recs, fails) in results {
        out.records.extend(recs);
        out.failures.extend(fails);
    }
    out.records.sort_by(|a, b| {
        a.r.total_cmp(&b.r)
            .then(a.state.cmp(&b.state))
            .then(a.optimizer.cmp(&b.optimizer))
            .then(a.repetition.cmp(&b.repetition))
    });
    Ok(out)
}

fn run_cell(
    cfg: &ScanConfig,
    spec: &HamiltonianSpec<f64>,
    exact: &LevelEnergies,
    seed: u64,
    repetition: usize,
) -> (Vec<BenchmarkRecord>, Vec<CellFailure>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    let mut failures = Vec::new();
    let ansatz = match build_ansatz(cfg.depth, AnsatzMode::ClusterPlusHamiltonian, spec) {
        Ok(a) => a,
        Err(e) => {
            failures.extend(cfg.states.iter().map(|&s| CellFailure {
                r: spec.bond_length(),
                repetition,
                state: s,
                message: e.to_string(),
            }));
            return (records, failures);
        }
    };
    let mut registry = StateRegistry::new();
    let mut first_theta: Option<Vec<f64>> = None;
    for (k, &state) in cfg.states.iter().enumerate() {
        let started = Instant::now();
        let mut ocfg = cfg.objective.clone().with_constraints(spin_targets(state.s_squared(), cfg.constraint_weight));
        if ocfg.lower_energy_fallback.is_none() {
            ocfg.lower_energy_fallback = Some(exact.ground);
        }
        let solved = VqeObjective::new(registry.len(), &ansatz, spec, &registry, &ocfg)
            .map_err(|e| OptError::Objective(e.to_string()))
            .and_then(|obj| {
                let n = ansatz.n_params();
                let nc = ansatz.n_cluster_params();
                match (&first_theta, cfg.mode) {
                    (Some(ground), ScanMode::FixedHamiltonian) => {
                        let frozen = Frozen::tail(&obj, nc, &ground[nc..]);
                        let r = optimize(cfg, state, &frozen, nc, &mut rng)?;
                        Ok((frozen.embed(&r.best_theta), r))
                    }
                    (None, _) if cfg.first_state_variables == FirstStateVariables::HamiltonianOnly => {
                        let frozen = Frozen::new(&obj, vec![0.0; n], nc..n);
                        let r = optimize(cfg, state, &frozen, n - nc, &mut rng)?;
                        Ok((frozen.embed(&r.best_theta), r))
                    }
                    _ => {
                        let r = optimize(cfg, state, &obj, n, &mut rng)?;
                        Ok((r.best_theta.clone(), r))
                    }
                }
            });
        let outcome = solved.and_then(|(theta, run)| {
            let e = energy_term(&theta, &ansatz, spec).map_err(|e| OptError::Objective(e.to_string()))?;
            let s = prepare_state(&ansatz, &theta).map_err(|e| OptError::Objective(e.to_string()))?;
            Ok((theta, run, e, s))
        });
        match outcome {
            Ok((theta, run, energy, sv)) => {
                let target = exact.get(state.label()).unwrap_or(f64::NAN);
                records.push(BenchmarkRecord {
                    r: spec.bond_length(),
                    state,
                    optimizer: cfg.optimizer,
                    repetition,
                    seed,
                    energy,
                    exact: target,
                    log_error: log_error(energy - target),
                    evaluations: run.evaluations,
                    wall_seconds: if cfg.record_timing { started.elapsed().as_secs_f64() } else { 0.0 },
                    converged: run.converged,
                });
                registry.push(sv, energy);
                if k == 0 {
                    first_theta = Some(theta);
                }
            }
            Err(e) => {
                // Later states would deflate against a missing entry.
                failures.extend(cfg.states[k..].iter().map(|&s| CellFailure {
                    r: spec.bond_length(),
                    repetition,
                    state: s,
                    message: e.to_string(),
                }));
                break;
            }
        }
    }
    (records, failures)
}

fn optimize<O: Objective>(
    cfg: &ScanConfig,
    state: TargetState,
    obj: &O,
    dim: usize,
    rng: &mut ChaCha8Rng,
) -> Result<RunResult, OptError> {
    let bounds = default_bounds::<f64>(dim);
    match cfg.optimizer {
        OptimizerId::Rcga => {
            let budget = cfg.ga_budget.unwrap_or_else(|| GaBudget::default_for(state, cfg.mode));
            let ga = GaConfig {
                max_generations: budget.generations,
                population_size: Some(budget.population),
                init: cfg.init,
                elitist: cfg.elitist,
                ..GaConfig::default()
            };
            rcga_minimize(obj, &ga, &bounds, rng)
        }
        OptimizerId::Bayes => match cfg.bayes_dims.filter(|&k| k < dim) {
            Some(k) => {
                let frozen = Frozen::tail(obj, k, &vec![0.0; dim - k]);
                let r = bayesian_minimize(&frozen, &bounds[..k], &cfg.bayes, rng)?;
                Ok(RunResult { best_theta: frozen.embed(&r.best_theta), ..r })
            }
            None => bayesian_minimize(obj, &bounds, &cfg.bayes, rng),
        },
        other => {
            let method = other.classical().expect("remaining ids are classical");
            let mut ccfg = ClassicalConfig::for_method(method);
            if let Some(it) = cfg.classical_iterations {
                ccfg.max_iterations = it;
            }
            let w = cfg.theta0_width;
            let theta0: Vec<f64> = (0..dim).map(|_| if w > 0.0 { rng.random_range(-w..=w) } else { 0.0 }).collect();
            classical_minimize(method, obj, &theta0, &ccfg)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::bundled_table;

    #[test]
    fn grid_has_25_points() {
        let g = grid(0.1, 2.5, 0.1);
        assert_eq!(g.len(), 25);
        assert!((g[24] - 2.5).abs() < 1e-12);
        assert_eq!(grid(0.7, 0.7, 0.1), vec![0.7]);
    }

    #[test]
    fn seeds_differ_per_cell() {
        assert_ne!(cell_seed(7, 0, 1), cell_seed(7, 1, 0));
        assert_eq!(cell_seed(7, 0, 0), 7);
    }

    #[test]
    fn config_errors() {
        let table = bundled_table::<f64>();
        let cfg = ScanConfig { r_step: 0.0, ..ScanConfig::default() };
        assert!(matches!(run_scan(&cfg, &table), Err(BenchError::Config(_))));
        let cfg = ScanConfig { r_max: 3.0, ..ScanConfig::default() };
        assert!(run_scan(&cfg, &table).unwrap_err().is_config());
    }

    #[test]
    fn single_point_ground_bfgs() {
        let table = bundled_table::<f64>();
        let cfg = ScanConfig { r_min: 0.7, r_max: 0.7, repetitions: 1, ..ScanConfig::default() };
        let out = run_scan(&cfg, &table).unwrap();
        assert_eq!(out.records.len(), 1);
        assert!(out.failures.is_empty());
        let rec = &out.records[0];
        assert!((rec.energy - rec.exact).abs() < 1.6e-3, "{rec:?}");
    }
}
