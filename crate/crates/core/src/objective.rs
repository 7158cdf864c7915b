//! Evaluation function `F_i(θ) = E(θ) + E_i^def + E_i^const` for the `i`-th
//! state: energy expectation, deflation against previously solved states and
//! spin constraints.

use crate::ansatz::{prepare_state, AnsatzError, AnsatzSpec};
use crate::pauli::{spin_operators, HamiltonianSpec, SpinOperators};
use crate::scalar::Real;
use crate::statevector::{StateError, StateVector, NORM_TOLERANCE};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ObjectiveError {
    #[error(transparent)]
    Ansatz(#[from] AnsatzError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error("registry state {0} is not normalized")]
    UnnormalizedRegistryState(usize),
    #[error("no energy available for the next-lower state")]
    MissingLowerEnergy,
    #[error("unknown constraint operator {0:?} (expected S2 or Sz)")]
    UnknownOperator(String),
    #[error("state index {index} needs exactly {index} registered lower states, registry has {found}")]
    RegistryMismatch { index: usize, found: usize },
    #[error("invalid objective configuration: {0}")]
    InvalidConfig(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinOperatorId {
    SSquared,
    Sz,
}

impl FromStr for SpinOperatorId {
    type Err = ObjectiveError;
    fn from_str(s: &str) -> Result<Self, ObjectiveError> {
        match s {
            "S2" | "S^2" | "s_squared" => Ok(SpinOperatorId::SSquared),
            "Sz" | "S_z" | "s_z" => Ok(SpinOperatorId::Sz),
            other => Err(ObjectiveError::UnknownOperator(other.to_string())),
        }
    }
}

impl fmt::Display for SpinOperatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpinOperatorId::SSquared => "S2",
            SpinOperatorId::Sz => "Sz",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintTarget<T: Real = f64> {
    pub operator: SpinOperatorId,
    pub target: T,
    pub weight: T,
}

/// How `⟨U_j⟩ − U_j^const` enters the objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintForm {
    /// `weight · (⟨U⟩ − target)²`; zero exactly at the target.
    Squared,
    /// `weight · (⟨U⟩ − target)`, the literal form. Unbounded below.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeflationMode<T: Real = f64> {
    /// Logistic-gated blend of a linear overlap penalty and the quartic
    /// overlap polynomial scaled by `r⁴/r_d⁴ · |E_p(r)|`.
    Misc,
    /// Plain `A · Σ_j |⟨Φ_j|Φ⟩|²`.
    PlainVqd { weight: T },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveConfig<T: Real = f64> {
    pub a: T,
    pub b: T,
    pub alpha: T,
    /// Equilibrium bond length, Å.
    pub r_d: T,
    pub deflation: DeflationMode<T>,
    pub constraint_form: ConstraintForm,
    pub constraints: Vec<ConstraintTarget<T>>,
    /// `E_p` used when the registry is empty (typically the exact oracle).
    pub lower_energy_fallback: Option<T>,
}

/// Default plain-VQD weight in Hartree.
pub const DEFAULT_VQD_WEIGHT: f64 = 3.0;

/// Default constraint weight in Hartree.
pub const DEFAULT_CONSTRAINT_WEIGHT: f64 = 1.0;

impl<T: Real> Default for ObjectiveConfig<T> {
    fn default() -> Self {
        Self {
            a: T::one(),
            b: T::one(),
            alpha: T::lit(100.0),
            r_d: T::lit(0.7414),
            deflation: DeflationMode::Misc,
            constraint_form: ConstraintForm::Squared,
            constraints: Vec::new(),
            lower_energy_fallback: None,
        }
    }
}

impl<T: Real> ObjectiveConfig<T> {
    pub fn with_constraints(mut self, constraints: Vec<ConstraintTarget<T>>) -> Self {
        self.constraints = constraints;
        self
    }

    pub fn validate(&self) -> Result<(), ObjectiveError> {
        if !(self.alpha > T::zero()) {
            return Err(ObjectiveError::InvalidConfig("alpha must be positive"));
        }
        if !(self.r_d > T::zero()) {
            return Err(ObjectiveError::InvalidConfig("r_d must be positive"));
        }
        if self.constraints.iter().any(|c| c.weight < T::zero()) {
            return Err(ObjectiveError::InvalidConfig("constraint weights must be non-negative"));
        }
        if let DeflationMode::PlainVqd { weight } = self.deflation {
            if weight < T::zero() {
                return Err(ObjectiveError::InvalidConfig("deflation weight must be non-negative"));
            }
        }
        Ok(())
    }
}

/// Spin targets `(S², S_z)` of the four tracked H2 levels.
pub fn spin_targets<T: Real>(s_squared: f64, weight: f64) -> Vec<ConstraintTarget<T>> {
    vec![
        ConstraintTarget {
            operator: SpinOperatorId::SSquared,
            target: T::lit(s_squared),
            weight: T::lit(weight),
        },
        ConstraintTarget { operator: SpinOperatorId::Sz, target: T::zero(), weight: T::lit(weight) },
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegisteredState<T: Real = f64> {
    pub state: StateVector<T>,
    pub energy: T,
}

/// Previously solved states, kept in non-decreasing energy order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StateRegistry<T: Real = f64> {
    entries: Vec<RegisteredState<T>>,
}

impl<T: Real> StateRegistry<T> {
    pub fn new() -> Self {
        Self { entries: Vec::new() }
    }

    /// Insert at the position that keeps energies non-decreasing.
    pub fn push(&mut self, state: StateVector<T>, energy: T) {
        let pos = self.entries.partition_point(|e| e.energy <= energy);
        self.entries.insert(pos, RegisteredState { state, energy });
    }

    pub fn entries(&self) -> &[RegisteredState<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `E_p`: highest registered energy, else the configured fallback.
    pub fn lower_energy(&self, fallback: Option<T>) -> Result<T, ObjectiveError> {
        self.entries
            .last()
            .map(|e| e.energy)
            .or(fallback)
            .ok_or(ObjectiveError::MissingLowerEnergy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult<T: Real = f64> {
    pub total: T,
    pub energy: T,
    pub deflation: T,
    pub constraint: T,
}

/// `f = (exp(α(r − r_d)) + 1)^{-1}`.
pub fn fermi_dirac_weight<T: Real>(r: T, cfg: &ObjectiveConfig<T>) -> T {
    T::one() / ((cfg.alpha * (r - cfg.r_d)).exp() + T::one())
}

/// Logistic gate `(exp(r − 0.25 r_d) + 1)^{-1}` between the two deflation branches.
pub fn deflation_gate<T: Real>(r: T, cfg: &ObjectiveConfig<T>) -> T {
    T::one() / ((r - T::lit(0.25) * cfg.r_d).exp() + T::one())
}

/// Coefficients `(quartic, quadratic)` of the overlap polynomial.
pub fn overlap_polynomial<T: Real>(r: T, lower_energy: T, cfg: &ObjectiveConfig<T>) -> (T, T) {
    let golden = T::lit(2.0) * (T::lit(5.0).sqrt() + T::one());
    let scale = (r / cfg.r_d).powi(4) * lower_energy.abs() / T::lit(4.0);
    ((T::one() + golden) * scale, golden * scale)
}

pub fn deflation_term<T: Real>(
    candidate: &StateVector<T>,
    registry: &StateRegistry<T>,
    r: T,
    cfg: &ObjectiveConfig<T>,
) -> Result<T, ObjectiveError> {
    if registry.is_empty() {
        return Ok(T::zero());
    }
    let mut overlaps = Vec::with_capacity(registry.len());
    for (j, e) in registry.entries().iter().enumerate() {
        if (e.state.norm_sqr().to_f64_lossy() - 1.0).abs() > NORM_TOLERANCE {
            return Err(ObjectiveError::UnnormalizedRegistryState(j));
        }
        overlaps.push(e.state.overlap(candidate)?);
    }
    match cfg.deflation {
        DeflationMode::PlainVqd { weight } => Ok(weight * overlaps.iter().copied().sum::<T>()),
        DeflationMode::Misc => {
            let ep = registry.lower_energy(cfg.lower_energy_fallback)?;
            let f = fermi_dirac_weight(r, cfg);
            let gate = deflation_gate(r, cfg);
            let blend = cfg.a * f + cfg.b * (T::one() - f);
            let (c4, c2) = overlap_polynomial(r, ep, cfg);
            Ok(overlaps
                .iter()
                .map(|&s| gate * blend * s + (T::one() - gate) * (c4 * s * s + c2 * s))
                .sum())
        }
    }
}

pub fn constraint_term<T: Real>(
    candidate: &StateVector<T>,
    cfg: &ObjectiveConfig<T>,
    ops: &SpinOperators<T>,
) -> Result<T, ObjectiveError> {
    let mut total = T::zero();
    for c in &cfg.constraints {
        let terms = match c.operator {
            SpinOperatorId::SSquared => &ops.s_squared,
            SpinOperatorId::Sz => &ops.s_z,
        };
        let d = candidate.expectation(terms)? - c.target;
        total += match cfg.constraint_form {
            ConstraintForm::Squared => c.weight * d * d,
            ConstraintForm::Linear => c.weight * d,
        };
    }
    Ok(total)
}

pub fn energy_term<T: Real>(
    theta: &[T],
    ansatz: &AnsatzSpec<T>,
    hamiltonian: &HamiltonianSpec<T>,
) -> Result<T, ObjectiveError> {
    Ok(prepare_state(ansatz, theta)?.expectation(hamiltonian.terms())?)
}

/// `F_i` bound to one bond length, ansatz, registry and configuration.
#[derive(Debug, Clone)]
pub struct VqeObjective<'a, T: Real = f64> {
    ansatz: &'a AnsatzSpec<T>,
    hamiltonian: &'a HamiltonianSpec<T>,
    registry: &'a StateRegistry<T>,
    cfg: &'a ObjectiveConfig<T>,
    spin: SpinOperators<T>,
    r: T,
}

impl<'a, T: Real> VqeObjective<'a, T> {
    pub fn new(
        state_index: usize,
        ansatz: &'a AnsatzSpec<T>,
        hamiltonian: &'a HamiltonianSpec<T>,
        registry: &'a StateRegistry<T>,
        cfg: &'a ObjectiveConfig<T>,
    ) -> Result<Self, ObjectiveError> {
        if registry.len() != state_index {
            return Err(ObjectiveError::RegistryMismatch { index: state_index, found: registry.len() });
        }
        cfg.validate()?;
        Ok(Self {
            ansatz,
            hamiltonian,
            registry,
            cfg,
            spin: spin_operators(),
            r: hamiltonian.bond_length(),
        })
    }

    pub fn ansatz(&self) -> &AnsatzSpec<T> {
        self.ansatz
    }

    pub fn registry(&self) -> &StateRegistry<T> {
        self.registry
    }

    pub fn evaluate(&self, theta: &[T]) -> Result<EvalResult<T>, ObjectiveError> {
        let state = prepare_state(self.ansatz, theta)?;
        self.evaluate_state(&state)
    }

    pub fn evaluate_state(&self, state: &StateVector<T>) -> Result<EvalResult<T>, ObjectiveError> {
        let energy = state.expectation(self.hamiltonian.terms())?;
        let deflation = deflation_term(state, self.registry, self.r, self.cfg)?;
        let constraint = constraint_term(state, self.cfg, &self.spin)?;
        Ok(EvalResult { total: energy + deflation + constraint, energy, deflation, constraint })
    }
}

/// Free-function form of [`VqeObjective::evaluate`].
pub fn evaluate<T: Real>(
    theta: &[T],
    state_index: usize,
    registry: &StateRegistry<T>,
    cfg: &ObjectiveConfig<T>,
    ansatz: &AnsatzSpec<T>,
    hamiltonian: &HamiltonianSpec<T>,
) -> Result<EvalResult<T>, ObjectiveError> {
    VqeObjective::new(state_index, ansatz, hamiltonian, registry, cfg)?.evaluate(theta)
}
