//! Bond-length scans, repetition statistics and report emission.

mod csv;
mod plot;
mod scan;

pub use csv::{emit_csv, emit_exact_csv, emit_summary_csv, format_float, records_to_csv, summaries_to_csv};
pub use plot::{emit_plot, render_plot, PlotKind};
pub use scan::{cell_seed, grid, run_scan, CellFailure, FirstStateVariables, GaBudget, ScanConfig, ScanMode, ScanOutput};

use crate::objective::ObjectiveError;
use crate::optimizers::{OptError, OptimizerId};
use crate::oracle::{Label, OracleError};
use crate::pauli::PauliError;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// 1 kcal/mol in Hartree.
pub const CHEMICAL_ACCURACY: f64 = 1.6e-3;

/// Lower clamp for `log10 |ΔE|`.
pub const LOG_ERROR_FLOOR: f64 = -16.0;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
    #[error(transparent)]
    Optimizer(#[from] OptError),
    #[error("invalid scan configuration: {0}")]
    Config(String),
    #[error("cannot summarize an empty cell")]
    EmptyCell,
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl BenchError {
    /// Configuration problems as opposed to failures while running.
    pub fn is_config(&self) -> bool {
        matches!(self, BenchError::Config(_) | BenchError::Pauli(_)) || matches!(self, BenchError::Optimizer(OptError::InvalidConfig(_) | OptError::UnknownOptimizer(_)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TargetState {
    Ground,
    Triplet,
    Singlet,
    Doubly,
}

impl TargetState {
    pub const ALL: [TargetState; 4] =
        [TargetState::Ground, TargetState::Triplet, TargetState::Singlet, TargetState::Doubly];

    pub fn as_str(self) -> &'static str {
        match self {
            TargetState::Ground => "ground",
            TargetState::Triplet => "triplet",
            TargetState::Singlet => "singlet",
            TargetState::Doubly => "doubly",
        }
    }

    pub fn label(self) -> Label {
        match self {
            TargetState::Ground => Label::Ground,
            TargetState::Triplet => Label::Triplet,
            TargetState::Singlet => Label::Singlet,
            TargetState::Doubly => Label::Doubly,
        }
    }

    /// Target `⟨S²⟩`; every state targets `S_z = 0`.
    pub fn s_squared(self) -> f64 {
        if self == TargetState::Triplet {
            2.0
        } else {
            0.0
        }
    }
}

impl fmt::Display for TargetState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TargetState {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Self, BenchError> {
        TargetState::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| BenchError::Config(format!("unknown state {s:?}")))
    }
}

/// Parse `ground,triplet,...`, requiring increasing energy order.
pub fn parse_states(list: &str) -> Result<Vec<TargetState>, BenchError> {
    let states: Vec<TargetState> = list.split(',').map(|s| s.trim().parse()).collect::<Result<_, _>>()?;
    if states.is_empty() || !states.windows(2).all(|w| w[0] < w[1]) {
        return Err(BenchError::Config("states must be distinct and ordered by energy".into()));
    }
    Ok(states)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRecord {
    pub r: f64,
    pub state: TargetState,
    pub optimizer: OptimizerId,
    pub repetition: usize,
    pub seed: u64,
    pub energy: f64,
    pub exact: f64,
    pub log_error: f64,
    pub evaluations: usize,
    pub wall_seconds: f64,
    pub converged: bool,
}

/// `log10 |diff|`, floored at [`LOG_ERROR_FLOOR`].
pub fn log_error(diff: f64) -> f64 {
    let a = diff.abs();
    if a == 0.0 {
        LOG_ERROR_FLOOR
    } else {
        a.log10().max(LOG_ERROR_FLOOR)
    }
}

/// Compensated (Neumaier) mean.
pub fn mean(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &v in values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    (sum + comp) / values.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub r: f64,
    pub state: TargetState,
    pub optimizer: OptimizerId,
    pub count: usize,
    pub mean_energy: f64,
    /// Population standard deviation over repetitions.
    pub std_dev: f64,
    pub exact: f64,
    pub log_error: f64,
    pub min_log_error: f64,
    pub max_log_error: f64,
    /// `energy − mean` per repetition, in repetition order.
    pub deviations: Vec<f64>,
}

/// One summary per `(r, state, optimizer)`, in that sort order.
pub fn summarize(records: &[BenchmarkRecord]) -> Result<Vec<Summary>, BenchError> {
    if records.is_empty() {
        return Err(BenchError::EmptyCell);
    }
    let mut sorted: Vec<&BenchmarkRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        a.r.total_cmp(&b.r)
            .then(a.state.cmp(&b.state))
            .then(a.optimizer.cmp(&b.optimizer))
            .then(a.repetition.cmp(&b.repetition))
    });
    let mut out = Vec::new();
    for group in sorted.chunk_by(|a, b| a.r == b.r && a.state == b.state && a.optimizer == b.optimizer) {
        let energies: Vec<f64> = group.iter().map(|r| r.energy).collect();
        let m = mean(&energies);
        let deviations: Vec<f64> = energies.iter().map(|e| e - m).collect();
        let var = mean(&deviations.iter().map(|d| d * d).collect::<Vec<_>>());
        let logs = group.iter().map(|r| r.log_error);
        let first = group[0];
        out.push(Summary {
            r: first.r,
            state: first.state,
            optimizer: first.optimizer,
            count: group.len(),
            mean_energy: m,
            std_dev: var.sqrt(),
            exact: first.exact,
            log_error: log_error(m - first.exact),
            min_log_error: logs.clone().fold(f64::INFINITY, f64::min),
            max_log_error: logs.fold(f64::NEG_INFINITY, f64::max),
            deviations,
        });
    }
    Ok(out)
}

/// Median of a non-empty slice (mean of the middle pair for even length).
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
