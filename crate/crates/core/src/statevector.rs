//! Exact statevector simulation with infinite-shot expectation values.
//!
//! Public operations are pure: they take `&self` and return a new state.
//! The `*_in_place` variants exist for the optimizer hot path.

use crate::pauli::{Pauli, PauliString, PauliTerm, DENSE_QUBIT_CAP};
use crate::scalar::{cone, czero, Real, C};
use thiserror::Error;

/// Norm drift tolerated after any unitary operation.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Largest imaginary part of `⟨ψ|H|ψ⟩` accepted before declaring `H` non-Hermitian.
pub const IMAGINARY_RESIDUE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum StateError {
    #[error("bitstring {0:?} must contain only '0' and '1'")]
    InvalidBits(String),
    #[error("register size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("qubit index {index} out of range for a {n}-qubit register")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("CNOT control and target must differ (both {0})")]
    SameControlTarget(usize),
    #[error("register of {0} qubits exceeds the cap of {1}")]
    TooManyQubits(usize, usize),
    #[error("amplitude vector length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("expectation has imaginary residue {0:e}; operator is not Hermitian")]
    ImaginaryResidue(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real = f64> {
    n_qubits: usize,
    amps: Vec<C<T>>,
}

impl<T: Real> StateVector<T> {
    /// Computational basis state; `bits[0]` is qubit 0, the most significant index bit.
    pub fn basis(bits: &str) -> Result<Self, StateError> {
        let n = bits.len();
        if n == 0 || !bits.chars().all(|c| c == '0' || c == '1') {
            return Err(StateError::InvalidBits(bits.to_string()));
        }
        if n > DENSE_QUBIT_CAP {
            return Err(StateError::TooManyQubits(n, DENSE_QUBIT_CAP));
        }
        let index = usize::from_str_radix(bits, 2).expect("validated binary");
        let mut amps = vec![czero(); 1 << n];
        amps[index] = cone();
        Ok(Self { n_qubits: n, amps })
    }

    /// Checked constructor; the amplitudes must already be normalized.
    pub fn from_amplitudes(amps: Vec<C<T>>) -> Result<Self, StateError> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(StateError::NotPowerOfTwo(len));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > DENSE_QUBIT_CAP {
            return Err(StateError::TooManyQubits(n_qubits, DENSE_QUBIT_CAP));
        }
        let s = Self { n_qubits, amps };
        let nrm = s.norm_sqr().to_f64_lossy();
        if (nrm - 1.0).abs() > NORM_TOLERANCE {
            return Err(StateError::NotNormalized(nrm));
        }
        Ok(s)
    }

    /// Normalize an arbitrary nonzero vector.
    pub fn normalized(mut amps: Vec<C<T>>) -> Result<Self, StateError> {
        let nrm = amps.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
        if nrm == T::zero() {
            return Err(StateError::NotNormalized(0.0));
        }
        amps.iter_mut().for_each(|a| *a = *a / nrm);
        Self::from_amplitudes(amps)
    }

    #[cfg(test)]
    pub(crate) fn unchecked(amps: Vec<C<T>>) -> Self {
        Self { n_qubits: amps.len().trailing_zeros() as usize, amps }
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    #[inline]
    fn bit(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    fn check_qubit(&self, q: usize) -> Result<(), StateError> {
        if q >= self.n_qubits {
            Err(StateError::QubitOutOfRange { index: q, n: self.n_qubits })
        } else {
            Ok(())
        }
    }

    fn check_size(&self, n: usize) -> Result<(), StateError> {
        if n != self.n_qubits {
            Err(StateError::SizeMismatch(self.n_qubits, n))
        } else {
            Ok(())
        }
    }

    pub fn apply_gate(&self, gate: &GateOp<T>) -> Result<Self, StateError> {
        let mut out = self.clone();
        out.apply_gate_in_place(gate)?;
        Ok(out)
    }

    pub fn apply_gate_in_place(&mut self, gate: &GateOp<T>) -> Result<(), StateError> {
        match *gate {
            GateOp::H(q) => {
                self.check_qubit(q)?;
                let s = T::FRAC_1_SQRT_2();
                self.apply_1q(q, [[C::new(s, T::zero()), C::new(s, T::zero())], [
                    C::new(s, T::zero()),
                    C::new(-s, T::zero()),
                ]]);
            }
            GateOp::RxHalfPi(q) | GateOp::RxHalfPiDagger(q) => {
                self.check_qubit(q)?;
                // Rx(φ) = cos(φ/2) − i sin(φ/2) X with φ = ±π/2.
                let s = T::FRAC_1_SQRT_2();
                let off = if matches!(gate, GateOp::RxHalfPi(_)) { -s } else { s };
                let d = C::new(s, T::zero());
                let o = C::new(T::zero(), off);
                self.apply_1q(q, [[d, o], [o, d]]);
            }
            GateOp::Rz(q, theta) => {
                self.check_qubit(q)?;
                let half = theta / T::lit(2.0);
                let (s, c) = half.sin_cos();
                let bit = self.bit(q);
                for (x, a) in self.amps.iter_mut().enumerate() {
                    let ph = if x & bit == 0 { C::new(c, -s) } else { C::new(c, s) };
                    *a = *a * ph;
                }
            }
            GateOp::Cnot { control, target } => {
                self.check_qubit(control)?;
                self.check_qubit(target)?;
                if control == target {
                    return Err(StateError::SameControlTarget(control));
                }
                let (cb, tb) = (self.bit(control), self.bit(target));
                for x in 0..self.amps.len() {
                    if x & cb != 0 && x & tb == 0 {
                        self.amps.swap(x, x | tb);
                    }
                }
            }
        }
        Ok(())
    }

    fn apply_1q(&mut self, q: usize, m: [[C<T>; 2]; 2]) {
        let bit = self.bit(q);
        for x in 0..self.amps.len() {
            if x & bit == 0 {
                let (a0, a1) = (self.amps[x], self.amps[x | bit]);
                self.amps[x] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[x | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// `exp(−iθP)|ψ⟩ = (cos θ − i sin θ P)|ψ⟩`, evaluated directly.
    pub fn apply_pauli_exponential(&self, p: &PauliString, theta: T) -> Result<Self, StateError> {
        let mut out = self.clone();
        out.apply_pauli_exponential_in_place(p, theta)?;
        Ok(out)
    }

    pub fn apply_pauli_exponential_in_place(
        &mut self,
        p: &PauliString,
        theta: T,
    ) -> Result<(), StateError> {
        self.check_size(p.n_qubits())?;
        let cp = p.compile();
        let (s, c) = theta.sin_cos();
        if cp.flip == 0 {
            // Diagonal: each basis state picks up e^{∓iθ}.
            for (x, a) in self.amps.iter_mut().enumerate() {
                let (_, pa) = cp.act(x, *a);
                *a = *a * c + C::new(pa.im, -pa.re) * s;
            }
            return Ok(());
        }
        let minus_i_sin = C::new(T::zero(), -s);
        for x in 0..self.amps.len() {
            let y = x ^ cp.flip;
            if x < y {
                let (ax, ay) = (self.amps[x], self.amps[y]);
                let (_, px) = cp.act(x, ax); // component landing on y
                let (_, py) = cp.act(y, ay); // component landing on x
                self.amps[x] = ax * c + minus_i_sin * py;
                self.amps[y] = ay * c + minus_i_sin * px;
            }
        }
        Ok(())
    }

    /// Same unitary as [`apply_pauli_exponential`](Self::apply_pauli_exponential),
    /// realized through the basis-change / CNOT-ladder / Rz circuit.
    pub fn apply_pauli_exponential_via_gates(
        &self,
        p: &PauliString,
        theta: T,
    ) -> Result<Self, StateError> {
        self.check_size(p.n_qubits())?;
        let mut out = self.clone();
        if p.is_identity() {
            let ph = C::new(theta.cos(), -theta.sin());
            out.amps.iter_mut().for_each(|a| *a = *a * ph);
            return Ok(out);
        }
        for g in pauli_exponential_circuit(p, theta) {
            out.apply_gate_in_place(&g)?;
        }
        Ok(out)
    }

    /// `⟨self|other⟩`.
    pub fn inner_product(&self, other: &Self) -> Result<C<T>, StateError> {
        self.check_size(other.n_qubits)?;
        Ok(self.amps.iter().zip(&other.amps).fold(czero(), |acc, (a, b)| acc + a.conj() * *b))
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &Self) -> Result<T, StateError> {
        self.inner_product(other).map(|z| z.norm_sqr())
    }

    /// `Σ_k c_k ⟨ψ|P_k|ψ⟩` for real coefficients.
    pub fn expectation(&self, terms: &[PauliTerm<T>]) -> Result<T, StateError> {
        let mut re = T::zero();
        let mut im = T::zero();
        for t in terms {
            self.check_size(t.string.n_qubits())?;
            let v = self.pauli_expectation_complex(&t.string);
            re += t.coefficient * v.re;
            im += t.coefficient * v.im;
        }
        let residue = im.abs().to_f64_lossy();
        if residue > IMAGINARY_RESIDUE_TOLERANCE {
            return Err(StateError::ImaginaryResidue(residue));
        }
        Ok(re)
    }

    fn pauli_expectation_complex(&self, p: &PauliString) -> C<T> {
        let cp = p.compile();
        let mut acc = czero();
        for (x, a) in self.amps.iter().enumerate() {
            let (y, pa) = cp.act(x, *a);
            acc += self.amps[y].conj() * pa;
        }
        acc
    }

    /// Expectation with a complex coefficient per term (no Hermiticity check).
    pub fn expectation_complex(&self, terms: &[(PauliString, C<T>)]) -> Result<C<T>, StateError> {
        let mut acc = czero();
        for (p, c) in terms {
            self.check_size(p.n_qubits())?;
            acc += *c * self.pauli_expectation_complex(p);
        }
        Ok(acc)
    }
}

/// Gate primitives of the Pauli-exponential circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateOp<T: Real = f64> {
    H(usize),
    RxHalfPi(usize),
    RxHalfPiDagger(usize),
    /// `diag(e^{−iθ/2}, e^{+iθ/2})`.
    Rz(usize, T),
    Cnot { control: usize, target: usize },
}

/// Gate sequence realizing `exp(−iθP)` for non-identity `P`: basis change on
/// every active qubit (H for X, Rx(π/2) for Y), CNOT ladder over the active
/// qubits, `Rz(2θ)` on the last active qubit, then the mirror image.
pub fn pauli_exponential_circuit<T: Real>(p: &PauliString, theta: T) -> Vec<GateOp<T>> {
    let active = p.support();
    let mut gates = Vec::with_capacity(4 * active.len() + 1);
    for &q in &active {
        match p.symbols()[q] {
            Pauli::X => gates.push(GateOp::H(q)),
            Pauli::Y => gates.push(GateOp::RxHalfPi(q)),
            _ => {}
        }
    }
    for w in active.windows(2) {
        gates.push(GateOp::Cnot { control: w[0], target: w[1] });
    }
    if let Some(&last) = active.last() {
        gates.push(GateOp::Rz(last, theta * T::lit(2.0)));
    }
    for w in active.windows(2).rev() {
        gates.push(GateOp::Cnot { control: w[0], target: w[1] });
    }
    for &q in active.iter().rev() {
        match p.symbols()[q] {
            Pauli::X => gates.push(GateOp::H(q)),
            Pauli::Y => gates.push(GateOp::RxHalfPiDagger(q)),
            _ => {}
        }
    }
    gates
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn close(a: C<f64>, b: C<f64>) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn basis_states_use_msb_first() {
        assert_eq!(StateVector::<f64>::basis("1000").unwrap().amplitudes()[8], cone());
        assert_eq!(StateVector::<f64>::basis("0000").unwrap().amplitudes()[0], cone());
        assert_eq!(StateVector::<f64>::basis("1100").unwrap().amplitudes()[12], cone());
        assert!(StateVector::<f64>::basis("10a0").is_err());
    }

    #[test]
    fn hadamard_and_cnot() {
        let plus = StateVector::<f64>::basis("0").unwrap().apply_gate(&GateOp::H(0)).unwrap();
        assert!(close(plus.amplitudes()[0], C::new(FRAC_1_SQRT_2, 0.0)));
        assert!(close(plus.amplitudes()[1], C::new(FRAC_1_SQRT_2, 0.0)));
        let s = StateVector::<f64>::basis("10").unwrap();
        let t = s.apply_gate(&GateOp::Cnot { control: 0, target: 1 }).unwrap();
        assert_eq!(t, StateVector::basis("11").unwrap());
        let one = StateVector::<f64>::basis("1").unwrap();
        assert!((plus.inner_product(&one).unwrap().re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn rz_two_pi_is_minus_one() {
        let psi = StateVector::<f64>::basis("0").unwrap().apply_gate(&GateOp::H(0)).unwrap();
        let out = psi.apply_gate(&GateOp::Rz(0, 2.0 * PI)).unwrap();
        for (a, b) in out.amplitudes().iter().zip(psi.amplitudes()) {
            assert!(close(*a, -*b));
        }
    }

    #[test]
    fn gate_errors() {
        let s = StateVector::<f64>::basis("00").unwrap();
        assert_eq!(
            s.apply_gate(&GateOp::H(2)),
            Err(StateError::QubitOutOfRange { index: 2, n: 2 })
        );
        assert_eq!(
            s.apply_gate(&GateOp::Cnot { control: 1, target: 1 }),
            Err(StateError::SameControlTarget(1))
        );
    }

    #[test]
    fn pauli_exponential_special_cases() {
        let zero = StateVector::<f64>::basis("0000").unwrap();
        let z: PauliString = "ZIII".parse().unwrap();
        let x: PauliString = "XIII".parse().unwrap();
        assert_eq!(zero.apply_pauli_exponential(&z, 0.0).unwrap(), zero);
        let out = zero.apply_pauli_exponential(&z, PI / 2.0).unwrap();
        assert!(close(out.amplitudes()[0], C::new(0.0, -1.0)));
        let out = zero.apply_pauli_exponential(&x, PI / 2.0).unwrap();
        assert!(close(out.amplitudes()[8], C::new(0.0, -1.0)));
        assert!(out.amplitudes()[0].norm() < 1e-15);
        let id = PauliString::identity(4);
        let out = zero.apply_pauli_exponential(&id, 0.3).unwrap();
        assert!(close(out.amplitudes()[0], C::new(0.3f64.cos(), -0.3f64.sin())));
        let bad: PauliString = "ZI".parse().unwrap();
        assert_eq!(zero.apply_pauli_exponential(&bad, 0.1), Err(StateError::SizeMismatch(4, 2)));
    }

    #[test]
    fn circuit_matches_caption_example() {
        // exp(−iθ X0 Y1 Z2): H on q0, Rx(π/2) on q1, nothing on q2, no CNOT to q3.
        let p: PauliString = "XYZI".parse().unwrap();
        let g = pauli_exponential_circuit(&p, 0.4_f64);
        assert_eq!(g[0], GateOp::H(0));
        assert_eq!(g[1], GateOp::RxHalfPi(1));
        assert_eq!(g[2], GateOp::Cnot { control: 0, target: 1 });
        assert_eq!(g[3], GateOp::Cnot { control: 1, target: 2 });
        assert_eq!(g[4], GateOp::Rz(2, 0.8));
        assert!(g.iter().all(|op| !matches!(op, GateOp::Cnot { target: 3, .. })));
        // X0 Y2 Z3: the ladder skips q1.
        let p: PauliString = "XIYZ".parse().unwrap();
        let g = pauli_exponential_circuit(&p, 0.4_f64);
        assert!(g.contains(&GateOp::Cnot { control: 0, target: 2 }));
        assert!(g.contains(&GateOp::Cnot { control: 2, target: 3 }));
        assert!(g.contains(&GateOp::Rz(3, 0.8)));
    }

    #[test]
    fn expectation_basic() {
        let zero = StateVector::<f64>::basis("0").unwrap();
        assert_eq!(zero.expectation(&[PauliTerm::parse("Z", 1.0)]).unwrap(), 1.0);
        let hf = StateVector::<f64>::basis("1000").unwrap();
        assert_eq!(hf.expectation(&[PauliTerm::parse("IIII", -0.42)]).unwrap(), -0.42);
        let i = StateVector::<f64>::basis("1").unwrap();
        assert_eq!(hf.inner_product(&StateVector::basis("0100").unwrap()).unwrap(), czero());
        assert_eq!(hf.expectation(&[PauliTerm::parse("Z", 1.0)]), Err(StateError::SizeMismatch(4, 1)));
        // (X + iY)-like weighting is rejected once the imaginary part survives.
        let plus_i = StateVector::normalized(vec![cone(), C::new(0.0, 1.0)]).unwrap();
        let c = plus_i.expectation_complex(&[("Y".parse().unwrap(), C::new(0.0, 1.0))]).unwrap();
        assert!((c - C::new(0.0, 1.0)).norm() < 1e-14);
        assert_eq!(i.norm_sqr(), 1.0);
    }

    #[test]
    fn from_amplitudes_validates() {
        assert_eq!(
            StateVector::<f64>::from_amplitudes(vec![cone(); 3]),
            Err(StateError::NotPowerOfTwo(3))
        );
        assert!(matches!(
            StateVector::<f64>::from_amplitudes(vec![cone(); 2]),
            Err(StateError::NotNormalized(_))
        ));
    }
}
