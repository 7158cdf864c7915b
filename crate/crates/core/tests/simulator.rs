use num_complex::Complex64 as C;
use proptest::prelude::*;
use vqebench::dense::ComplexMatrix;
use vqebench::pauli::{bundled_table, dense_matrix, Pauli, PauliString, PauliTerm};
use vqebench::statevector::StateVector;

fn pauli() -> impl Strategy<Value = Pauli> {
    prop_oneof![Just(Pauli::I), Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)]
}

fn string(n: usize) -> impl Strategy<Value = PauliString> {
    prop::collection::vec(pauli(), n).prop_map(PauliString::new)
}

fn state(n: usize) -> impl Strategy<Value = StateVector<f64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
        .prop_filter("non-zero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(|v| StateVector::normalized(v.into_iter().map(|(a, b)| C::new(a, b)).collect()).unwrap())
}

/// exp(−iθP) from the Kronecker-product matrix: cos θ·I − i sin θ·P.
fn dense_exponential(p: &PauliString, theta: f64) -> ComplexMatrix<f64> {
    let m = p.symbols().iter().fold(ComplexMatrix::identity(1), |acc, s| acc.kron(&s.matrix()));
    let id = ComplexMatrix::identity(m.dim());
    &id.scale(C::new(theta.cos(), 0.0)) + &m.scale(C::new(0.0, -theta.sin()))
}

fn max_diff(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gate_path_matches_analytic_exponential(p in string(4), theta in -7.0f64..7.0, s in state(4)) {
        let analytic = s.apply_pauli_exponential(&p, theta).unwrap();
        let gates = s.apply_pauli_exponential_via_gates(&p, theta).unwrap();
        prop_assert!(max_diff(analytic.amplitudes(), gates.amplitudes()) < 1e-10);
        let dense = dense_exponential(&p, theta).mul_vec(s.amplitudes());
        prop_assert!(max_diff(analytic.amplitudes(), &dense) < 1e-12);
    }

    #[test]
    fn expectation_matches_dense_quadratic_form(r_idx in 0usize..25, s in state(4)) {
        let table = bundled_table::<f64>();
        let spec = &table.specs()[r_idx];
        let h = dense_matrix(spec).unwrap();
        let e = s.expectation(spec.terms()).unwrap();
        prop_assert!((e - h.quadratic_form(s.amplitudes()).re).abs() < 1e-9);
    }

    #[test]
    fn random_hamiltonians_on_larger_registers(
        terms in prop::collection::vec((string(6), -2.0f64..2.0), 1..12),
        s in state(6),
    ) {
        let terms: Vec<PauliTerm<f64>> = terms.into_iter().map(|(p, c)| PauliTerm::new(p, c)).collect();
        let h = vqebench::pauli::dense_matrix_of_terms(&terms, 6).unwrap();
        let e = s.expectation(&terms).unwrap();
        prop_assert!((e - h.quadratic_form(s.amplitudes()).re).abs() < 1e-9);
    }

    #[test]
    fn exponentials_preserve_norm(p in string(5), theta in -7.0f64..7.0, s in state(5)) {
        let out = s.apply_pauli_exponential_via_gates(&p, theta).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }
}
