//! Quick invariant suite behind `vqebench selftest`.

use crate::ansatz::{build_ansatz, AnsatzMode};
use crate::bench::{records_to_csv, run_scan, ScanConfig};
use crate::objective::{fermi_dirac_weight, ObjectiveConfig};
use crate::optimizers::{init_population, jgg_step, rex_half_width, FnObjective, GaConfig, Objective};
use crate::oracle::full_spectrum;
use crate::pauli::{bundled_table, dense_matrix, Pauli, PauliString};
use crate::statevector::StateVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn oracle_residuals() -> Check {
    let table = bundled_table::<f64>();
    let mut worst: f64 = 0.0;
    let mut trace_err: f64 = 0.0;
    for spec in table.specs() {
        let Ok(h) = dense_matrix(spec) else { return check("oracle", false, "dense build failed".into()) };
        let Ok(spectrum) = full_spectrum(spec) else { return check("oracle", false, "eigensolve failed".into()) };
        for e in &spectrum {
            let v = e.eigenvector.amplitudes();
            let hv = h.mul_vec(v);
            let res = hv.iter().zip(v).map(|(a, b)| (a - b * e.energy).norm_sqr()).sum::<f64>().sqrt();
            worst = worst.max(res);
        }
        let sum: f64 = spectrum.iter().map(|e| e.energy).sum();
        trace_err = trace_err.max((sum - 16.0 * spec.identity_coefficient()).abs());
    }
    check("oracle residuals and trace", worst < 1e-9 && trace_err < 1e-9, format!("max residual {worst:.2e}, trace error {trace_err:.2e}"))
}

fn random_string(rng: &mut ChaCha8Rng) -> PauliString {
    PauliString::new((0..4).map(|_| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..4)]).collect())
}

fn decomposition_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e1f);
    let spec = bundled_table::<f64>().get(0.7).expect("bundled point").clone();
    let a = build_ansatz(2, AnsatzMode::ClusterPlusHamiltonian, &spec).expect("ansatz");
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let p = random_string(&mut rng);
        let theta = rng.random_range(-3.2..3.2);
        let angles: Vec<f64> = (0..a.n_params()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let s = crate::ansatz::prepare_state(&a, &angles).expect("state");
        let (Ok(x), Ok(y)) = (s.apply_pauli_exponential(&p, theta), s.apply_pauli_exponential_via_gates(&p, theta)) else {
            return check("gate decomposition", false, format!("{p} failed"));
        };
        for (u, v) in x.amplitudes().iter().zip(y.amplitudes()) {
            worst = worst.max((u - v).norm());
        }
    }
    check("gate decomposition", worst < 1e-10, format!("max amplitude difference {worst:.2e}"))
}

fn rex_moments() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let w = rex_half_width(2);
    let n = 100_000;
    let xs: Vec<f64> = (0..n).map(|_| rng.random_range(-w..=w)).collect();
    let m = xs.iter().sum::<f64>() / n as f64;
    let sd = (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n as f64).sqrt();
    let want = 0.9 / 2f64.sqrt();
    let ok = (sd - want).abs() < 0.01 * want && m.abs() < 3.0 * want / (n as f64).sqrt();
    check("REX moments", ok, format!("mean {m:.2e}, sd {sd:.6} (target {want:.6})"))
}

fn jgg_conservation() -> Check {
    let obj = FnObjective(|x: &[f64]| x.iter().map(|v| v * v).sum());
    let cfg = GaConfig { parallel: false, ..GaConfig::default() };
    let bounds = vec![(-1.0, 1.0); 5];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let Ok(mut pop) = init_population(50, cfg.init, &bounds, &mut rng) else {
        return check("JGG population size", false, "init failed".into());
    };
    for ind in &mut pop.individuals {
        ind.fitness = obj.value(&ind.theta).unwrap_or(f64::INFINITY);
    }
    for g in 1..=1000 {
        if jgg_step(&mut pop, &obj, &cfg, &bounds, g, &mut rng).is_err() || pop.len() != 50 {
            return check("JGG population size", false, format!("changed at generation {g}"));
        }
    }
    check("JGG population size", true, "50 individuals over 1000 generations".into())
}

fn fermi_dirac() -> Check {
    let cfg = ObjectiveConfig::<f64>::default();
    let vals: Vec<f64> = (1..=25).map(|i| fermi_dirac_weight(0.1 * i as f64, &cfg)).collect();
    let ok = vals.windows(2).all(|w| w[1] <= w[0]) && vals.iter().all(|v| (0.0..=1.0).contains(v))
        && (fermi_dirac_weight(cfg.r_d, &cfg) - 0.5).abs() < 1e-15;
    check("Fermi-Dirac weight", ok, format!("f(0.1) = {:.3}, f(2.5) = {:.3e}", vals[0], vals[24]))
}

fn reference_state() -> Check {
    let spec = bundled_table::<f64>().get(0.7).expect("bundled point").clone();
    let s = StateVector::basis("1000").expect("basis");
    let n = s.expectation(&crate::pauli::number_operator()).unwrap_or(f64::NAN);
    check("reference has two electrons", (n - 2.0).abs() < 1e-12 && spec.n_qubits() == 4, format!("⟨N⟩ = {n}"))
}

fn scan_determinism() -> Check {
    let table = bundled_table::<f64>();
    let cfg = ScanConfig { r_min: 0.7, r_max: 0.8, repetitions: 2, classical_iterations: Some(3), base_seed: 42, ..ScanConfig::default() };
    match (run_scan(&cfg, &table), run_scan(&cfg, &table)) {
        (Ok(a), Ok(b)) => {
            let same = records_to_csv(&a.records) == records_to_csv(&b.records);
            check("scan determinism", same && a.records.len() == 4, format!("{} records", a.records.len()))
        }
        _ => check("scan determinism", false, "scan failed".into()),
    }
}

pub fn run_selftest() -> Vec<Check> {
    vec![
        oracle_residuals(),
        decomposition_equivalence(),
        reference_state(),
        fermi_dirac(),
        rex_moments(),
        jgg_conservation(),
        scan_determinism(),
    ]
}
