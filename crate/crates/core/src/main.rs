use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use vqebench::bench::{
    emit_csv, emit_exact_csv, emit_plot, emit_summary_csv, parse_states, run_scan, summarize, BenchError,
    FirstStateVariables, GaBudget,
    PlotKind, ScanConfig, ScanMode,
};
use vqebench::objective::DeflationMode;
use vqebench::optimizers::{InitDistribution, OptimizerId};
use vqebench::oracle::full_spectrum;
use vqebench::pauli::{bundled_table, load_coefficients, CoefficientTable};

#[derive(Parser)]
#[command(name = "vqebench", version, about = "VQE optimizer benchmark on H2 (STO-3G, Bravyi-Kitaev)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the requested states over a bond-length grid.
    Scan(ScanArgs),
    /// Write the full-CI spectrum for every bond length.
    Exact {
        /// Coefficient table (JSON); the bundled table if omitted.
        #[arg(long)]
        coeffs: Option<PathBuf>,
        #[arg(long)]
        out_csv: PathBuf,
    },
    /// Run the built-in invariant checks.
    Selftest,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    coeffs: Option<PathBuf>,
    #[arg(long, default_value = "bfgs")]
    optimizer: String,
    #[arg(long, default_value = "ground")]
    states: String,
    /// fixed | all
    #[arg(long, default_value = "fixed")]
    mode: String,
    #[arg(long, default_value_t = 0.1)]
    r_min: f64,
    #[arg(long, default_value_t = 2.5)]
    r_max: f64,
    #[arg(long, default_value_t = 0.1)]
    r_step: f64,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// mix | poisson | beta025
    #[arg(long, default_value = "mix")]
    init_dist: String,
    #[arg(long)]
    out_csv: PathBuf,
    /// Per-(r, state) statistics.
    #[arg(long)]
    summary_csv: Option<PathBuf>,
    #[arg(long)]
    out_svg: Option<PathBuf>,
    /// levels | deviations | log-errors
    #[arg(long, default_value = "levels")]
    plot: String,
    /// GA generations for every state (overrides the per-state defaults).
    #[arg(long)]
    generations: Option<usize>,
    /// GA population for every state; defaults to the per-state value.
    #[arg(long)]
    population: Option<usize>,
    /// Select GA survivors from parents and children.
    #[arg(long)]
    elitist: bool,
    /// Iteration cap for powell, cg, nelder-mead and bfgs.
    #[arg(long)]
    iterations: Option<usize>,
    /// Bayesian iterations after the initial design.
    #[arg(long)]
    bayes_iterations: Option<usize>,
    /// Restrict the Bayesian search to the first k free angles.
    #[arg(long)]
    bayes_dims: Option<usize>,
    #[arg(long)]
    constraint_weight: Option<f64>,
    /// Replace the bond-length-dependent deflation by A·Σ|⟨Φ_j|Φ⟩|².
    #[arg(long)]
    vqd_weight: Option<f64>,
    /// Coefficient b of the (1 − f) branch.
    #[arg(long)]
    deflation_b: Option<f64>,
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Angles optimized for the first state: all | hamiltonian
    #[arg(long, default_value = "all")]
    first_state_vars: String,
    /// Record wall-clock seconds (makes the CSV non-reproducible).
    #[arg(long)]
    timing: bool,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

fn table(path: &Option<PathBuf>) -> Result<CoefficientTable<f64>, Failure> {
    match path {
        Some(p) => load_coefficients(p).map_err(|e| Failure::Config(e.to_string())),
        None => Ok(bundled_table()),
    }
}

fn config(a: &ScanArgs) -> Result<ScanConfig, Failure> {
    let cfg_err = |e: String| Failure::Config(e);
    let mut cfg = ScanConfig {
        r_min: a.r_min,
        r_max: a.r_max,
        r_step: a.r_step,
        repetitions: a.reps,
        optimizer: a.optimizer.parse::<OptimizerId>().map_err(|e| cfg_err(e.to_string()))?,
        states: parse_states(&a.states).map_err(|e| cfg_err(e.to_string()))?,
        mode: match a.mode.as_str() {
            "fixed" => ScanMode::FixedHamiltonian,
            "all" => ScanMode::AllVariables,
            other => return Err(cfg_err(format!("unknown mode {other:?} (expected fixed or all)"))),
        },
        first_state_variables: match a.first_state_vars.as_str() {
            "all" => FirstStateVariables::All,
            "hamiltonian" => FirstStateVariables::HamiltonianOnly,
            other => return Err(cfg_err(format!("unknown first-state variables {other:?}"))),
        },
        base_seed: a.seed,
        depth: a.depth,
        init: a.init_dist.parse::<InitDistribution>().map_err(|e| cfg_err(e.to_string()))?,
        elitist: a.elitist,
        classical_iterations: a.iterations,
        bayes_dims: a.bayes_dims,
        record_timing: a.timing,
        ..ScanConfig::default()
    };
    if a.generations.is_some() || a.population.is_some() {
        let first = GaBudget::default_for(cfg.states[0], cfg.mode);
        cfg.ga_budget = Some(GaBudget {
            generations: a.generations.unwrap_or(first.generations),
            population: a.population.unwrap_or(first.population),
        });
    }
    if let Some(it) = a.bayes_iterations {
        cfg.bayes.max_iterations = it;
    }
    if let Some(w) = a.constraint_weight {
        cfg.constraint_weight = w;
    }
    if let Some(w) = a.vqd_weight {
        cfg.objective.deflation = DeflationMode::PlainVqd { weight: w };
    }
    if let Some(b) = a.deflation_b {
        cfg.objective.b = b;
    }
    cfg.validate().map_err(Failure::from)?;
    Ok(cfg)
}

fn scan(a: &ScanArgs) -> Result<(), Failure> {
    let cfg = config(a)?;
    let plot_kind = match &a.out_svg {
        Some(_) => Some(a.plot.parse::<PlotKind>()?),
        None => None,
    };
    let table = table(&a.coeffs)?;
    let out = run_scan(&cfg, &table)?;
    emit_csv(&out.records, &a.out_csv)?;
    if a.summary_csv.is_some() || plot_kind.is_some() {
        let summaries = if out.records.is_empty() { Vec::new() } else { summarize(&out.records)? };
        if let Some(p) = &a.summary_csv {
            emit_summary_csv(&summaries, p)?;
        }
        if let (Some(kind), Some(p)) = (plot_kind, &a.out_svg) {
            emit_plot(&summaries, kind, p)?;
        }
    }
    for f in &out.failures {
        eprintln!("failed: r = {} rep {} {}: {}", f.r, f.repetition, f.state, f.message);
    }
    if out.failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Runtime(format!("{} state solves failed", out.failures.len())))
    }
}

fn exact(coeffs: &Option<PathBuf>, out: &PathBuf) -> Result<(), Failure> {
    let table = table(coeffs)?;
    let mut spectra = Vec::with_capacity(table.len());
    for spec in table.specs() {
        let s = full_spectrum(spec).map_err(|e| Failure::Runtime(e.to_string()))?;
        spectra.push((spec.bond_length(), s));
    }
    emit_exact_csv(&spectra, out)?;
    Ok(())
}

fn selftest() -> Result<(), Failure> {
    let checks = vqebench::selftest::run_selftest();
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    match checks.iter().filter(|c| !c.passed).count() {
        0 => Ok(()),
        n => Err(Failure::Runtime(format!("{n} checks failed"))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Scan(a) => scan(a),
        Command::Exact { coeffs, out_csv } => exact(coeffs, out_csv),
        Command::Selftest => selftest(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
