//! Trotterized UCCSD + Hamiltonian-evolution ansatz.
//!
//! Factors are ordered `[cluster slice 1 … d]` then, in combined mode,
//! `[Hamiltonian slice 1 … d]`, each slice carrying fresh parameters. The
//! circuit is applied left to right to the reference state `|1000⟩`.

use crate::pauli::{h2_bk_template, HamiltonianSpec, PauliString};
use crate::scalar::Real;
use crate::statevector::{StateError, StateVector};
use thiserror::Error;

/// Bravyi-Kitaev image of the closed-shell determinant σg↑σg↓.
pub const REFERENCE_STATE: &str = "1000";

/// Generators per cluster slice.
pub const CLUSTER_GENERATORS: usize = 5;

#[derive(Debug, Error, PartialEq)]
pub enum AnsatzError {
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("combined ansatz needs a non-empty Hamiltonian")]
    EmptyHamiltonian,
    #[error("parameter vector has length {found}, ansatz expects {expected}")]
    LengthMismatch { found: usize, expected: usize },
    #[error("bounds for parameter {0} are not ordered (lower must be < upper)")]
    InvalidBounds(usize),
    #[error(transparent)]
    State(#[from] StateError),
}

/// One representative Pauli string per excitation of `T − T†` (singles
/// 0→2, 0→3, 1→2, 1→3 and the double 01→23): the highest-weight string of its
/// Bravyi-Kitaev image. Regenerate with `scripts/gen_h2_bk.py`.
pub fn build_uccsd_generators() -> Vec<PauliString> {
    ["XYXI", "XYZI", "ZYXI", "ZYZI", "XZYZ"]
        .iter()
        .map(|s| s.parse().expect("generator literal"))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnsatzMode {
    ClusterOnly,
    ClusterPlusHamiltonian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzFactor<T: Real = f64> {
    pub string: PauliString,
    /// Step coefficient `t_j`; the factor applies `exp(−i θ[param_index] t_j P)`.
    pub step: T,
    pub param_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzSpec<T: Real = f64> {
    factors: Vec<AnsatzFactor<T>>,
    n_params: usize,
    depth: usize,
    mode: AnsatzMode,
    n_qubits: usize,
}

impl<T: Real> AnsatzSpec<T> {
    pub fn factors(&self) -> &[AnsatzFactor<T>] {
        &self.factors
    }
    pub fn n_params(&self) -> usize {
        self.n_params
    }
    pub fn depth(&self) -> usize {
        self.depth
    }
    pub fn mode(&self) -> AnsatzMode {
        self.mode
    }
    /// Number of leading parameters that belong to the cluster slices.
    pub fn n_cluster_params(&self) -> usize {
        self.depth * CLUSTER_GENERATORS
    }
}

pub fn build_ansatz<T: Real>(
    depth: usize,
    mode: AnsatzMode,
    hamiltonian: &HamiltonianSpec<T>,
) -> Result<AnsatzSpec<T>, AnsatzError> {
    if depth == 0 {
        return Err(AnsatzError::ZeroDepth);
    }
    let mut factors = Vec::new();
    let mut next = 0usize;
    let mut push_slices = |strings: &[PauliString], factors: &mut Vec<AnsatzFactor<T>>| {
        for _ in 0..depth {
            for s in strings {
                factors.push(AnsatzFactor { string: s.clone(), step: T::one(), param_index: next });
                next += 1;
            }
        }
    };
    push_slices(&build_uccsd_generators(), &mut factors);
    if mode == AnsatzMode::ClusterPlusHamiltonian {
        if hamiltonian.terms().is_empty() {
            return Err(AnsatzError::EmptyHamiltonian);
        }
        push_slices(&h2_bk_template(), &mut factors);
    }
    let n_qubits = factors[0].string.n_qubits();
    Ok(AnsatzSpec { n_params: factors.len(), factors, depth, mode, n_qubits })
}

/// Variational angles (radians) with per-parameter box bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterVector<T: Real = f64> {
    pub values: Vec<T>,
    pub bounds: Vec<(T, T)>,
}

impl<T: Real> ParameterVector<T> {
    /// Zeros with the default `[−π, π]` box.
    pub fn zeros(n: usize) -> Self {
        Self { values: vec![T::zero(); n], bounds: default_bounds(n) }
    }

    pub fn with_values(values: Vec<T>) -> Self {
        let n = values.len();
        Self { values, bounds: default_bounds(n) }
    }

    pub fn validate(&self) -> Result<(), AnsatzError> {
        if self.values.len() != self.bounds.len() {
            return Err(AnsatzError::LengthMismatch {
                found: self.values.len(),
                expected: self.bounds.len(),
            });
        }
        for (i, (lo, hi)) in self.bounds.iter().enumerate() {
            if !(lo < hi) {
                return Err(AnsatzError::InvalidBounds(i));
            }
        }
        Ok(())
    }
}

/// `exp(−iθP)` has period 2π in θ.
pub fn default_bounds<T: Real>(n: usize) -> Vec<(T, T)> {
    vec![(-T::PI(), T::PI()); n]
}

pub fn prepare_state<T: Real>(
    ansatz: &AnsatzSpec<T>,
    theta: &[T],
) -> Result<StateVector<T>, AnsatzError> {
    let mut state = StateVector::basis(REFERENCE_STATE)?;
    prepare_state_into(ansatz, theta, &mut state)?;
    Ok(state)
}

fn prepare_state_into<T: Real>(
    ansatz: &AnsatzSpec<T>,
    theta: &[T],
    state: &mut StateVector<T>,
) -> Result<(), AnsatzError> {
    if theta.len() != ansatz.n_params {
        return Err(AnsatzError::LengthMismatch { found: theta.len(), expected: ansatz.n_params });
    }
    debug_assert_eq!(state.n_qubits(), ansatz.n_qubits);
    for f in &ansatz.factors {
        state.apply_pauli_exponential_in_place(&f.string, theta[f.param_index] * f.step)?;
    }
    Ok(())
}
