//! Statevector VQE workbench for the H2/STO-3G Bravyi-Kitaev Hamiltonian:
//! Pauli algebra, an exact simulator, the UCCSD + Hamiltonian-evolution
//! ansatz, a deflation objective for excited states, six optimizers and a
//! scan harness scored against full CI.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the
//! optimizers and the harness run in `f64`.

pub mod ansatz;
pub mod bench;
pub mod dense;
pub mod objective;
pub mod optimizers;
pub mod oracle;
pub mod pauli;
pub mod scalar;
pub mod selftest;
pub mod statevector;

pub use scalar::Real;

pub type StateVector64 = statevector::StateVector<f64>;
pub type StateVector32 = statevector::StateVector<f32>;
pub type HamiltonianSpec64 = pauli::HamiltonianSpec<f64>;
pub type HamiltonianSpec32 = pauli::HamiltonianSpec<f32>;
pub type CoefficientTable64 = pauli::CoefficientTable<f64>;
pub type CoefficientTable32 = pauli::CoefficientTable<f32>;
pub type AnsatzSpec64 = ansatz::AnsatzSpec<f64>;
pub type AnsatzSpec32 = ansatz::AnsatzSpec<f32>;
pub type ObjectiveConfig64 = objective::ObjectiveConfig<f64>;
pub type StateRegistry64 = objective::StateRegistry<f64>;
pub type ComplexMatrix64 = dense::ComplexMatrix<f64>;
