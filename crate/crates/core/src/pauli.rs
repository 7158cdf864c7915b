//! Symbolic Pauli-operator algebra, the H2 Bravyi-Kitaev Hamiltonian template,
//! coefficient-table ingestion and dense-matrix realization.
//!
//! Qubit 0 is the leftmost symbol of a string and the most significant bit of
//! an amplitude index, so `ZIII` is `+1` on every basis state `|0···⟩`.

use crate::dense::ComplexMatrix;
use crate::scalar::{mul_i_pow, Real, C};
use serde::de::{Deserializer, MapAccess, Visitor};
use serde::Deserialize;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use thiserror::Error;

/// Register size of the minimal-basis H2 problem.
pub const H2_QUBITS: usize = 4;

/// Largest register `dense_matrix` will realize by default.
pub const DENSE_QUBIT_CAP: usize = 10;

#[derive(Debug, Error)]
pub enum PauliError {
    #[error("invalid Pauli symbol {symbol:?} in {string:?}")]
    InvalidSymbol { string: String, symbol: char },
    #[error("Pauli string {string:?} has length {found}, expected {expected}")]
    WrongLength { string: String, found: usize, expected: usize },
    #[error("non-finite coefficient for {string:?}")]
    NonFinite { string: String },
    #[error("bond length must be positive and finite, got {0}")]
    InvalidBondLength(f64),
    #[error("register of {found} qubits exceeds the dense cap of {cap}")]
    RegisterTooLarge { found: usize, cap: usize },
    #[error("terms act on different register sizes ({0} and {1})")]
    MixedRegisterSize(usize, usize),
    #[error("cannot read coefficient file {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed coefficient file: {0}")]
    Parse(String),
    #[error("record {index} (r = {r}): {source}")]
    Record { index: usize, r: f64, source: Box<PauliError> },
    #[error("no Hamiltonian for bond length {0} in the coefficient table")]
    MissingBondLength(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn matrix<T: Real>(self) -> ComplexMatrix<T> {
        let (o, z) = (T::one(), T::zero());
        let c = |re: T, im: T| C::new(re, im);
        let rows = match self {
            Pauli::I => [[c(o, z), c(z, z)], [c(z, z), c(o, z)]],
            Pauli::X => [[c(z, z), c(o, z)], [c(o, z), c(z, z)]],
            Pauli::Y => [[c(z, z), c(z, -o)], [c(z, o), c(z, z)]],
            Pauli::Z => [[c(o, z), c(z, z)], [c(z, z), c(-o, z)]],
        };
        ComplexMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect())
    }
}

/// Tensor product of single-qubit Paulis, one symbol per qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    symbols: Vec<Pauli>,
}

impl PauliString {
    pub fn new(symbols: Vec<Pauli>) -> Self {
        Self { symbols }
    }

    pub fn identity(n: usize) -> Self {
        Self { symbols: vec![Pauli::I; n] }
    }

    /// Parse and require a specific register size.
    pub fn parse_sized(s: &str, n: usize) -> Result<Self, PauliError> {
        let p: PauliString = s.parse()?;
        if p.n_qubits() != n {
            return Err(PauliError::WrongLength {
                string: s.to_string(),
                found: p.n_qubits(),
                expected: n,
            });
        }
        Ok(p)
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.symbols.len()
    }

    #[inline]
    pub fn symbols(&self) -> &[Pauli] {
        &self.symbols
    }

    pub fn is_identity(&self) -> bool {
        self.symbols.iter().all(|&p| p == Pauli::I)
    }

    /// Qubits carrying a non-identity symbol, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.symbols.len()).filter(|&q| self.symbols[q] != Pauli::I).collect()
    }

    pub fn weight(&self) -> usize {
        self.symbols.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Two Pauli strings commute iff they anticommute on an even number of qubits.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        assert_eq!(self.n_qubits(), other.n_qubits());
        let clashes = self
            .symbols
            .iter()
            .zip(&other.symbols)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count();
        clashes % 2 == 0
    }

    pub fn compile(&self) -> CompiledPauli {
        let n = self.symbols.len();
        let mut flip = 0usize;
        let mut sign = 0usize;
        let mut y_count = 0u32;
        for (q, &p) in self.symbols.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => flip |= bit,
                Pauli::Y => {
                    flip |= bit;
                    sign |= bit;
                    y_count += 1;
                }
                Pauli::Z => sign |= bit,
            }
        }
        CompiledPauli { n_qubits: n, flip, sign, y_phase: y_count % 4 }
    }
}

impl FromStr for PauliString {
    type Err = PauliError;
    fn from_str(s: &str) -> Result<Self, PauliError> {
        let symbols = s
            .chars()
            .map(|c| {
                Pauli::from_char(c)
                    .ok_or(PauliError::InvalidSymbol { string: s.to_string(), symbol: c })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { symbols })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.symbols {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

/// Bitmask form of a Pauli string acting on computational basis states:
/// `P|x⟩ = i^{#Y} (-1)^{popcount(x & sign)} |x ⊕ flip⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompiledPauli {
    pub n_qubits: usize,
    pub flip: usize,
    pub sign: usize,
    pub y_phase: u32,
}

impl CompiledPauli {
    /// Image of basis state `x`: target index and the phase `P|x⟩ = phase·|target⟩`.
    #[inline]
    pub fn act<T: Real>(&self, x: usize, amp: C<T>) -> (usize, C<T>) {
        let z = if (x & self.sign).count_ones() & 1 == 1 { -amp } else { amp };
        (x ^ self.flip, mul_i_pow(z, self.y_phase))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm<T: Real = f64> {
    pub string: PauliString,
    pub coefficient: T,
}

impl<T: Real> PauliTerm<T> {
    pub fn new(string: PauliString, coefficient: T) -> Self {
        Self { string, coefficient }
    }

    /// Convenience constructor for hard-coded operator tables.
    pub fn parse(s: &str, coefficient: f64) -> Self {
        Self { string: s.parse().expect("valid Pauli literal"), coefficient: T::lit(coefficient) }
    }
}

/// Sum duplicate strings, preserving first-occurrence order.
pub fn merge_terms<T: Real>(terms: Vec<PauliTerm<T>>) -> Vec<PauliTerm<T>> {
    let mut out: Vec<PauliTerm<T>> = Vec::with_capacity(terms.len());
    for t in terms {
        match out.iter_mut().find(|o| o.string == t.string) {
            Some(o) => o.coefficient += t.coefficient,
            None => out.push(t),
        }
    }
    out
}

/// Qubit Hamiltonian at one bond length.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec<T: Real = f64> {
    bond_length: T,
    terms: Vec<PauliTerm<T>>,
}

impl<T: Real> HamiltonianSpec<T> {
    pub fn new(bond_length: T, terms: Vec<PauliTerm<T>>) -> Result<Self, PauliError> {
        let r = bond_length.to_f64_lossy();
        if !(r.is_finite() && r > 0.0) {
            return Err(PauliError::InvalidBondLength(r));
        }
        if let Some(first) = terms.first() {
            let n = first.string.n_qubits();
            for t in &terms {
                if t.string.n_qubits() != n {
                    return Err(PauliError::MixedRegisterSize(n, t.string.n_qubits()));
                }
            }
        }
        for t in &terms {
            if !t.coefficient.is_finite() {
                return Err(PauliError::NonFinite { string: t.string.to_string() });
            }
        }
        Ok(Self { bond_length, terms: merge_terms(terms) })
    }

    pub fn bond_length(&self) -> T {
        self.bond_length
    }

    pub fn terms(&self) -> &[PauliTerm<T>] {
        &self.terms
    }

    pub fn n_qubits(&self) -> usize {
        self.terms.first().map_or(0, |t| t.string.n_qubits())
    }

    pub fn identity_coefficient(&self) -> T {
        self.terms
            .iter()
            .filter(|t| t.string.is_identity())
            .map(|t| t.coefficient)
            .fold(T::zero(), |a, b| a + b)
    }

    pub fn coefficient_of(&self, s: &PauliString) -> T {
        self.terms.iter().find(|t| &t.string == s).map_or(T::zero(), |t| t.coefficient)
    }
}

/// Hamiltonians keyed by strictly increasing bond length.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable<T: Real = f64> {
    specs: Vec<HamiltonianSpec<T>>,
}

/// Bond lengths closer than this are the same grid point.
pub const BOND_LENGTH_MATCH: f64 = 1e-6;

impl<T: Real> CoefficientTable<T> {
    /// Sorts by bond length and merges records sharing one.
    pub fn from_specs(mut specs: Vec<HamiltonianSpec<T>>) -> Result<Self, PauliError> {
        specs.sort_by(|a, b| a.bond_length.partial_cmp(&b.bond_length).expect("finite"));
        let mut merged: Vec<HamiltonianSpec<T>> = Vec::with_capacity(specs.len());
        for s in specs {
            if let Some(last) = merged.last_mut() {
                if (last.bond_length - s.bond_length).abs().to_f64_lossy() < 1e-12 {
                    let mut terms = std::mem::take(&mut last.terms);
                    terms.extend(s.terms);
                    *last = HamiltonianSpec::new(last.bond_length, terms)?;
                    continue;
                }
            }
            merged.push(s);
        }
        Ok(Self { specs: merged })
    }

    pub fn specs(&self) -> &[HamiltonianSpec<T>] {
        &self.specs
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn bond_lengths(&self) -> Vec<T> {
        self.specs.iter().map(|s| s.bond_length).collect()
    }

    pub fn get(&self, r: f64) -> Result<&HamiltonianSpec<T>, PauliError> {
        self.specs
            .iter()
            .find(|s| (s.bond_length.to_f64_lossy() - r).abs() < BOND_LENGTH_MATCH)
            .ok_or(PauliError::MissingBondLength(r))
    }

    pub fn covers(&self, grid: &[f64]) -> Result<(), PauliError> {
        grid.iter().try_for_each(|&r| self.get(r).map(|_| ()))
    }
}

/// Pauli terms of one record, keeping duplicate keys so they can be summed.
struct TermList(Vec<(String, f64)>);

impl<'de> Deserialize<'de> for TermList {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = TermList;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping Pauli strings to coefficients")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<TermList, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, f64>()? {
                    out.push((k, v));
                }
                Ok(TermList(out))
            }
        }
        d.deserialize_map(V)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordJson {
    r: f64,
    terms: TermList,
}

/// Parse the coefficient JSON format:
/// `[{"r": 0.7, "terms": {"IIII": -0.3, "ZIII": 0.17, ...}}, ...]`.
pub fn parse_coefficients<T: Real>(text: &str) -> Result<CoefficientTable<T>, PauliError> {
    let records: Vec<RecordJson> =
        serde_json::from_str(text).map_err(|e| PauliError::Parse(e.to_string()))?;
    let mut specs = Vec::with_capacity(records.len());
    for (index, rec) in records.into_iter().enumerate() {
        let wrap = |e: PauliError| PauliError::Record { index, r: rec.r, source: Box::new(e) };
        if rec.terms.0.is_empty() {
            return Err(wrap(PauliError::Parse("record has no terms".into())));
        }
        let mut terms = Vec::with_capacity(rec.terms.0.len());
        for (label, c) in &rec.terms.0 {
            let string = PauliString::parse_sized(label, H2_QUBITS).map_err(wrap)?;
            if !c.is_finite() {
                return Err(wrap(PauliError::NonFinite { string: label.clone() }));
            }
            terms.push(PauliTerm::new(string, T::lit(*c)));
        }
        specs.push(HamiltonianSpec::new(T::lit(rec.r), terms).map_err(wrap)?);
    }
    CoefficientTable::from_specs(specs)
}

pub fn load_coefficients<T: Real>(path: impl AsRef<Path>) -> Result<CoefficientTable<T>, PauliError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| PauliError::Io { path: path.display().to_string(), source })?;
    parse_coefficients(&text)
}

const BUNDLED_TABLE: &str = include_str!("../data/h2_sto3g_bk.json");

/// The bundled STO-3G Bravyi-Kitaev table, r = 0.1 … 2.5 Å in steps of 0.1.
pub fn bundled_table<T: Real>() -> CoefficientTable<T> {
    parse_coefficients(BUNDLED_TABLE).expect("bundled coefficient table is valid")
}

/// The 15 distinct strings of the H2 Bravyi-Kitaev Hamiltonian, in fixed order.
pub fn h2_bk_template() -> Vec<PauliString> {
    [
        "IIII", "ZIII", "IZII", "IIZI", "ZZII", "ZIZI", "IZIZ", "XZXI", "YZYI", "ZZZI", "ZIZZ",
        "IZZZ", "XZXZ", "YZYZ", "ZZZZ",
    ]
    .iter()
    .map(|s| s.parse().expect("template literal"))
    .collect()
}

pub fn dense_matrix_of_terms<T: Real>(
    terms: &[PauliTerm<T>],
    n_qubits: usize,
) -> Result<ComplexMatrix<T>, PauliError> {
    if n_qubits > DENSE_QUBIT_CAP {
        return Err(PauliError::RegisterTooLarge { found: n_qubits, cap: DENSE_QUBIT_CAP });
    }
    let dim = 1usize << n_qubits;
    let mut m = ComplexMatrix::zeros(dim);
    for t in terms {
        if t.string.n_qubits() != n_qubits {
            return Err(PauliError::MixedRegisterSize(n_qubits, t.string.n_qubits()));
        }
        let cp = t.string.compile();
        let c = C::new(t.coefficient, T::zero());
        for x in 0..dim {
            let (y, ph) = cp.act(x, c);
            m[(y, x)] += ph;
        }
    }
    Ok(m)
}

/// `Σ_k c_k P_k` as a dense `2^n × 2^n` matrix.
pub fn dense_matrix<T: Real>(spec: &HamiltonianSpec<T>) -> Result<ComplexMatrix<T>, PauliError> {
    dense_matrix_of_terms(spec.terms(), spec.n_qubits())
}

/// Spin observables in the same 4-qubit Bravyi-Kitaev encoding as the
/// Hamiltonian (spin orbitals ordered σg↑, σg↓, σu↑, σu↓).
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOperators<T: Real = f64> {
    pub s_squared: Vec<PauliTerm<T>>,
    pub s_z: Vec<PauliTerm<T>>,
}

// Regenerate with scripts/gen_h2_bk.py.
const S_SQUARED: [(&str, f64); 15] = [
    ("IIII", 0.75),
    ("IZII", -0.375),
    ("IZIZ", -0.375),
    ("XIXI", 0.125),
    ("XIXZ", 0.125),
    ("XZXI", -0.125),
    ("XZXZ", -0.125),
    ("YIYI", 0.125),
    ("YIYZ", 0.125),
    ("YZYI", -0.125),
    ("YZYZ", -0.125),
    ("ZIZI", 0.125),
    ("ZIZZ", 0.125),
    ("ZZZI", -0.125),
    ("ZZZZ", -0.125),
];

const S_Z: [(&str, f64); 4] = [("IIZI", -0.25), ("IZZZ", 0.25), ("ZIII", -0.25), ("ZZII", 0.25)];

const NUMBER: [(&str, f64); 5] =
    [("IIII", 2.0), ("IIZI", -0.5), ("IZZZ", -0.5), ("ZIII", -0.5), ("ZZII", -0.5)];

fn table<T: Real>(entries: &[(&str, f64)]) -> Vec<PauliTerm<T>> {
    entries.iter().map(|&(s, c)| PauliTerm::parse(s, c)).collect()
}

pub fn spin_operators<T: Real>() -> SpinOperators<T> {
    SpinOperators { s_squared: table(&S_SQUARED), s_z: table(&S_Z) }
}

/// Total electron number `Σ_i n_i`.
pub fn number_operator<T: Real>() -> Vec<PauliTerm<T>> {
    table(&NUMBER)
}
