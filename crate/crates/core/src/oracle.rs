//! Full-CI reference: dense Hermitian eigendecomposition of the qubit
//! Hamiltonian, classification of eigenstates by particle number and spin,
//! and per-bond-length reference energies.

use crate::dense::ComplexMatrix;
use crate::pauli::{
    dense_matrix, dense_matrix_of_terms, number_operator, spin_operators, CoefficientTable,
    HamiltonianSpec, PauliError, SpinOperators,
};
use crate::scalar::{czero, Real, C};
use crate::statevector::StateVector;
use serde::Serialize;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:e}, matrix norm {scale:e})")]
    NoConvergence { sweeps: usize, off: f64, scale: f64 },
    #[error("bond length {r}: no eigenstate classified as {label}")]
    MissingLevel { r: f64, label: Label },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Ground,
    Triplet,
    Singlet,
    Doubly,
    DoubletLocalMin,
    Other,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Ground => "ground",
            Label::Triplet => "triplet",
            Label::Singlet => "singlet",
            Label::Doubly => "doubly",
            Label::DoubletLocalMin => "doublet_local_min",
            Label::Other => "other",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumEntry<T: Real = f64> {
    pub energy: T,
    pub eigenvector: StateVector<T>,
    pub n_particles: T,
    pub s_squared: T,
    pub s_z: T,
    pub label: Label,
    /// Why the entry ended up as `Other`, if it did.
    pub diagnostic: Option<String>,
}

/// Eigen-decomposition `A = V diag(λ) V†` of a Hermitian matrix, ascending.
pub struct Eigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

const MAX_SWEEPS: usize = 100;

/// Cyclic complex Jacobi. Each rotation first removes the phase of the pivot
/// `a_pq` with `diag(1, e^{−iφ})`, then applies the real symmetric rotation.
pub fn jacobi_eigh<T: Real>(a: &ComplexMatrix<T>) -> Result<Eigen<T>, OracleError> {
    let n = a.dim();
    let mut m = a.clone();
    let mut v = ComplexMatrix::<T>::identity(n);
    let scale = m.max_abs().max(T::min_positive_value());
    let tol = T::epsilon() * scale * T::lit(0.01);
    let off_norm = |m: &ComplexMatrix<T>| {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off_norm(&m) > T::epsilon() * scale {
        if sweeps == MAX_SWEEPS {
            return Err(OracleError::NoConvergence {
                sweeps,
                off: off_norm(&m).to_f64_lossy(),
                scale: scale.to_f64_lossy(),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag <= tol {
                    continue;
                }
                let phase = apq / mag; // e^{iφ}
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (T::lit(2.0) * mag);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                // G = diag(1, e^{−iφ}) · [[c, s], [−s, c]] on columns p, q.
                let g_pp = C::new(c, T::zero());
                let g_pq = C::new(s, T::zero());
                let g_qp = phase.conj() * (-s);
                let g_qq = phase.conj() * c;
                // Columns: M ← M G.
                for k in 0..n {
                    let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = mkp * g_pp + mkq * g_qp;
                    m[(k, q)] = mkp * g_pq + mkq * g_qq;
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
                // Rows: M ← G† M.
                for k in 0..n {
                    let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = g_pp.conj() * mpk + g_qp.conj() * mqk;
                    m[(q, k)] = g_pq.conj() * mpk + g_qq.conj() * mqk;
                }
                m[(p, q)] = czero();
                m[(q, p)] = czero();
                m[(p, p)] = C::new(m[(p, p)].re, T::zero());
                m[(q, q)] = C::new(m[(q, q)].re, T::zero());
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        // Fix the phase: the largest component is real and positive.
        let pivot = (0..n)
            .max_by(|&a, &b| {
                v[(a, src)].norm().partial_cmp(&v[(b, src)].norm()).expect("finite")
            })
            .expect("non-empty");
        let ph = v[(pivot, src)].conj() / v[(pivot, src)].norm();
        for k in 0..n {
            vectors[(k, col)] = v[(k, src)] * ph;
        }
    }
    Ok(Eigen { values, vectors })
}

/// Tolerance for particle-number and `S²` quantum numbers.
pub const QUANTUM_NUMBER_TOLERANCE: f64 = 1e-6;

/// All eigenpairs of the dense Hamiltonian with spin and particle-number
/// expectations, sorted by energy and labeled.
pub fn full_spectrum<T: Real>(spec: &HamiltonianSpec<T>) -> Result<Vec<SpectrumEntry<T>>, OracleError> {
    let h = dense_matrix(spec)?;
    let eig = jacobi_eigh(&h)?;
    let n_qubits = spec.n_qubits();
    let spin: SpinOperators<T> = spin_operators();
    let (s2, sz, num) = if n_qubits == crate::pauli::H2_QUBITS {
        (
            Some(dense_matrix_of_terms(&spin.s_squared, n_qubits)?),
            Some(dense_matrix_of_terms(&spin.s_z, n_qubits)?),
            Some(dense_matrix_of_terms(&number_operator::<T>(), n_qubits)?),
        )
    } else {
        (None, None, None)
    };
    let expect = |m: &Option<ComplexMatrix<T>>, v: &[C<T>]| {
        m.as_ref().map_or(T::nan(), |m| m.quadratic_form(v).re)
    };
    let mut entries = Vec::with_capacity(eig.values.len());
    for (k, &energy) in eig.values.iter().enumerate() {
        let col = eig.vectors.column(k);
        entries.push(SpectrumEntry {
            energy,
            n_particles: expect(&num, &col),
            s_squared: expect(&s2, &col),
            s_z: expect(&sz, &col),
            eigenvector: StateVector::normalized(col).expect("eigenvector has unit norm"),
            label: Label::Other,
            diagnostic: None,
        });
    }
    classify(&mut entries);
    Ok(entries)
}

/// Assign labels in place. Within the two-electron sector the allowed levels
/// are taken in ascending energy: `S² ≈ 0` first is ground, every `S² ≈ 2`
/// eigenstate is triplet, and the next two `S² ≈ 0` levels are singlet then
/// doubly. Odd particle numbers are doublet local minima.
pub fn classify<T: Real>(entries: &mut [SpectrumEntry<T>]) {
    let tol = QUANTUM_NUMBER_TOLERANCE;
    let near = |x: T, target: f64| (x.to_f64_lossy() - target).abs() < tol;
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (&entries[i], &entries[j]);
        a.energy
            .partial_cmp(&b.energy)
            .expect("finite")
            .then(a.s_squared.partial_cmp(&b.s_squared).expect("finite"))
    });
    let mut singlets_seen = 0;
    for &i in &order {
        let e = &mut entries[i];
        let n = e.n_particles.to_f64_lossy();
        let rounded = n.round();
        if (n - rounded).abs() > tol {
            e.label = Label::Other;
            e.diagnostic = Some(format!("non-integer particle number {n:.9}"));
            continue;
        }
        if rounded as i64 % 2 == 1 {
            e.label = Label::DoubletLocalMin;
            continue;
        }
        if rounded as i64 != 2 {
            e.label = Label::Other;
            e.diagnostic = Some(format!("{rounded} electrons"));
            continue;
        }
        if near(e.s_squared, 2.0) {
            e.label = Label::Triplet;
        } else if near(e.s_squared, 0.0) {
            e.label = match singlets_seen {
                0 => Label::Ground,
                1 => Label::Singlet,
                2 => Label::Doubly,
                _ => Label::Other,
            };
            singlets_seen += 1;
        } else {
            e.label = Label::Other;
            e.diagnostic = Some(format!("⟨S²⟩ = {:.9} is neither 0 nor 2", e.s_squared));
        }
    }
}

/// Exact energies of the four physical levels at one bond length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelEnergies {
    pub ground: f64,
    pub triplet: f64,
    pub singlet: f64,
    pub doubly: f64,
}

impl LevelEnergies {
    pub fn get(&self, label: Label) -> Option<f64> {
        match label {
            Label::Ground => Some(self.ground),
            Label::Triplet => Some(self.triplet),
            Label::Singlet => Some(self.singlet),
            Label::Doubly => Some(self.doubly),
            _ => None,
        }
    }
}

pub fn level_energies<T: Real>(spec: &HamiltonianSpec<T>) -> Result<LevelEnergies, OracleError> {
    let spectrum = full_spectrum(spec)?;
    let r = spec.bond_length().to_f64_lossy();
    let find = |label: Label| {
        spectrum
            .iter()
            .find(|e| e.label == label)
            .map(|e| e.energy.to_f64_lossy())
            .ok_or(OracleError::MissingLevel { r, label })
    };
    Ok(LevelEnergies {
        ground: find(Label::Ground)?,
        triplet: find(Label::Triplet)?,
        singlet: find(Label::Singlet)?,
        doubly: find(Label::Doubly)?,
    })
}

/// Reference energies for every bond length in the table, in table order.
pub fn reference_energies<T: Real>(
    table: &CoefficientTable<T>,
) -> Result<Vec<(f64, LevelEnergies)>, OracleError> {
    table
        .specs()
        .iter()
        .map(|s| Ok((s.bond_length().to_f64_lossy(), level_energies(s)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{bundled_table, PauliTerm};

    #[test]
    fn z0_spectrum() {
        let spec = HamiltonianSpec::<f64>::new(1.0, vec![PauliTerm::parse("ZIII", 1.0)]).unwrap();
        let eig = jacobi_eigh(&dense_matrix(&spec).unwrap()).unwrap();
        assert!(eig.values[..8].iter().all(|&e| (e + 1.0).abs() < 1e-14));
        assert!(eig.values[8..].iter().all(|&e| (e - 1.0).abs() < 1e-14));
    }

    #[test]
    fn reconstruction_and_orthonormality() {
        let spec = bundled_table::<f64>().get(1.3).unwrap().clone();
        let h = dense_matrix(&spec).unwrap();
        let eig = jacobi_eigh(&h).unwrap();
        let v = &eig.vectors;
        let vtv = &v.adjoint() * v;
        assert!(vtv.max_abs_diff(&ComplexMatrix::identity(16)) < 1e-9);
        let mut d = ComplexMatrix::zeros(16);
        for i in 0..16 {
            d[(i, i)] = C::new(eig.values[i], 0.0);
        }
        let rec = &(v * &d) * &v.adjoint();
        assert!(rec.max_abs_diff(&h) < 1e-8);
    }

    #[test]
    fn complex_hermitian_input() {
        let spec = HamiltonianSpec::new(
            1.0,
            vec![PauliTerm::parse("XY", 0.7), PauliTerm::parse("YI", -0.4), PauliTerm::parse("ZZ", 0.2)],
        )
        .unwrap();
        let h = dense_matrix(&spec).unwrap();
        let eig = jacobi_eigh(&h).unwrap();
        for k in 0..4 {
            let col = eig.vectors.column(k);
            let hv = h.mul_vec(&col);
            let res: f64 = hv
                .iter()
                .zip(&col)
                .map(|(a, b)| (*a - *b * eig.values[k]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res < 1e-12);
        }
    }

    #[test]
    fn equilibrium_labels() {
        let spec = bundled_table::<f64>().get(0.7).unwrap().clone();
        let spectrum = full_spectrum(&spec).unwrap();
        let count = |l: Label| spectrum.iter().filter(|e| e.label == l).count();
        assert_eq!(count(Label::Ground), 1);
        assert_eq!(count(Label::Triplet), 3);
        assert_eq!(count(Label::Singlet), 1);
        assert_eq!(count(Label::Doubly), 1);
        for e in spectrum.iter().filter(|e| e.label == Label::DoubletLocalMin) {
            assert!((e.n_particles - e.n_particles.round()).abs() < 1e-6);
            assert_eq!(e.n_particles.round() as i64 % 2, 1);
        }
        let trip: Vec<f64> =
            spectrum.iter().filter(|e| e.label == Label::Triplet).map(|e| e.energy).collect();
        assert!(trip.windows(2).all(|w| (w[0] - w[1]).abs() < 1e-9));
        let sum: f64 = spectrum.iter().map(|e| e.energy).sum();
        assert!((sum - 16.0 * spec.identity_coefficient()).abs() < 1e-9);
    }

    #[test]
    fn equilibrium_ground_energy() {
        let spec = bundled_table::<f64>().get(0.7).unwrap().clone();
        let spec = HamiltonianSpec::new(spec.bond_length(), spec.terms().to_vec()).unwrap();
        let lv = level_energies(&spec).unwrap();
        // Published STO-3G full-CI at 0.7 Å.
        assert!((lv.ground + 1.1361894541).abs() < 1e-8);
        assert!(lv.ground < lv.triplet && lv.triplet < lv.singlet && lv.singlet <= lv.doubly);
    }
}
