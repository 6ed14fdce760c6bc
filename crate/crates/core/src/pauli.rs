//! Hamiltonians and observables as real-weighted sums of Pauli strings.
//!
//! Axes strings are written qubit 0 first (`"ZII"` is Z on qubit 0), and the
//! basis index convention follows [`StateVector`]: qubit 0 is the most
//! significant bit. Term order is preserved exactly as inserted; the Trotter
//! splitting uses it.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::state::StateVector;

/// Default cap on qubits for dense matrix construction.
pub const DEFAULT_DENSE_LIMIT: usize = 12;

/// Dense-matrix qubit cap, overridable with `TWIRL_DENSE_LIMIT`.
pub fn dense_limit() -> usize {
    std::env::var("TWIRL_DENSE_LIMIT")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_DENSE_LIMIT)
}

pub(crate) fn check_dense_limit(n_qubits: usize) -> Result<()> {
    let limit = dense_limit();
    if n_qubits > limit {
        return Err(Error::DenseLimitExceeded { n_qubits, limit });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliAxis {
    I,
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Self::I),
            'X' => Some(Self::X),
            'Y' => Some(Self::Y),
            'Z' => Some(Self::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Self::I => 'I',
            Self::X => 'X',
            Self::Y => 'Y',
            Self::Z => 'Z',
        }
    }

    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Self::I => [[l, o], [o, l]],
            Self::X => [[o, l], [l, o]],
            Self::Y => [[o, -i], [i, o]],
            Self::Z => [[l, o], [o, -l]],
        }
    }
}

/// A real coefficient times a tensor product of single-qubit Paulis.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    coeff: f64,
    axes: Vec<PauliAxis>,
}

impl PauliTerm {
    pub fn new(coeff: f64, axes: Vec<PauliAxis>) -> Result<Self> {
        if !coeff.is_finite() {
            return Err(Error::NonFiniteCoefficient(coeff));
        }
        if axes.is_empty() {
            return Err(Error::InvalidPauliString(String::new()));
        }
        Ok(Self { coeff, axes })
    }

    pub fn parse(coeff: f64, axes: &str) -> Result<Self> {
        let parsed = axes
            .chars()
            .map(PauliAxis::from_char)
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidPauliString(axes.to_string()))?;
        Self::new(coeff, parsed)
    }

    pub fn coeff(&self) -> f64 {
        self.coeff
    }

    pub fn axes(&self) -> &[PauliAxis] {
        &self.axes
    }

    pub fn n_qubits(&self) -> usize {
        self.axes.len()
    }

    pub fn label(&self) -> String {
        self.axes.iter().map(|a| a.as_char()).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.axes.iter().all(|&a| a == PauliAxis::I)
    }

    pub(crate) fn masks(&self) -> PauliMasks {
        PauliMasks::new(&self.axes)
    }
}

/// Bit-mask form of a Pauli string: `P|b> = i^ny (-1)^{|b & z|} |b ^ x>`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PauliMasks {
    pub x: usize,
    pub z: usize,
    pub y_phase: Complex64,
}

impl PauliMasks {
    fn new(axes: &[PauliAxis]) -> Self {
        let n = axes.len();
        let (mut x, mut z, mut ny) = (0usize, 0usize, 0u32);
        for (q, axis) in axes.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            match axis {
                PauliAxis::I => {}
                PauliAxis::X => x |= bit,
                PauliAxis::Z => z |= bit,
                PauliAxis::Y => {
                    x |= bit;
                    z |= bit;
                    ny += 1;
                }
            }
        }
        let y_phase = Complex64::new(0.0, 1.0).powu(ny % 4);
        Self { x, z, y_phase }
    }

    #[inline]
    pub fn phase(&self, b: usize) -> Complex64 {
        if (b & self.z).count_ones() & 1 == 0 {
            self.y_phase
        } else {
            -self.y_phase
        }
    }

    /// `out = P * input`.
    pub fn apply(&self, input: &[Complex64], out: &mut [Complex64]) {
        for (b, amp) in input.iter().enumerate() {
            out[b ^ self.x] = self.phase(b) * amp;
        }
    }

    /// `<psi|P|psi>`.
    pub fn expectation(&self, psi: &[Complex64]) -> Complex64 {
        psi.iter().enumerate().map(|(b, amp)| psi[b ^ self.x].conj() * self.phase(b) * amp).sum()
    }
}

/// A Hermitian operator `sum_k c_k P_k` with real `c_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HamiltonianSpec", into = "HamiltonianSpec")]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        assert!(n_qubits >= 1, "a PauliSum needs at least one qubit");
        Self { n_qubits, terms: Vec::new() }
    }

    pub fn from_terms(n_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        let mut sum = Self::new(n_qubits);
        for t in terms {
            sum.push(t)?;
        }
        Ok(sum)
    }

    /// Builds from `(coeff, axes)` pairs, e.g. `[(0.5, "XXI"), (1.0, "ZII")]`.
    pub fn from_labels(n_qubits: usize, terms: &[(f64, &str)]) -> Result<Self> {
        let terms = terms.iter().map(|&(c, s)| PauliTerm::parse(c, s)).collect::<Result<Vec<_>>>()?;
        Self::from_terms(n_qubits, terms)
    }

    pub fn push(&mut self, term: PauliTerm) -> Result<()> {
        if term.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, found: term.n_qubits() });
        }
        self.terms.push(term);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    /// Term labels in storage (and splitting) order.
    pub fn term_order(&self) -> Vec<String> {
        self.terms.iter().map(|t| t.label()).collect()
    }

    pub fn scaled(&self, factor: f64) -> PauliSum {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|t| PauliTerm { coeff: t.coeff * factor, axes: t.axes.clone() }).collect(),
        }
    }

    /// `a*self + b*other`, concatenating terms (self first).
    pub fn linear_combination(&self, a: f64, other: &PauliSum, b: f64) -> Result<PauliSum> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, found: other.n_qubits });
        }
        let mut out = self.scaled(a);
        out.terms.extend(other.scaled(b).terms);
        Ok(out)
    }

    /// Sum of absolute coefficients; an upper bound on the operator norm.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.abs()).sum()
    }

    pub fn to_spec(&self) -> HamiltonianSpec {
        self.clone().into()
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*{}", t.coeff, t.label())?;
        }
        Ok(())
    }
}

/// JSON wire form: `{"n_qubits": 2, "terms": [{"coeff": 0.5, "axes": "XX"}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub n_qubits: usize,
    pub terms: Vec<TermSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    pub coeff: f64,
    pub axes: String,
}

impl TryFrom<HamiltonianSpec> for PauliSum {
    type Error = Error;

    fn try_from(spec: HamiltonianSpec) -> Result<Self> {
        if spec.n_qubits == 0 {
            return Err(Error::InvalidParameter("n_qubits must be positive".into()));
        }
        let terms = spec.terms.iter().map(|t| PauliTerm::parse(t.coeff, &t.axes)).collect::<Result<Vec<_>>>()?;
        PauliSum::from_terms(spec.n_qubits, terms)
    }
}

impl From<PauliSum> for HamiltonianSpec {
    fn from(sum: PauliSum) -> Self {
        HamiltonianSpec {
            n_qubits: sum.n_qubits,
            terms: sum.terms.iter().map(|t| TermSpec { coeff: t.coeff, axes: t.label() }).collect(),
        }
    }
}

/// Lattice parameters of the two- and three-site models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchwingerCoupling {
    pub g: f64,
    pub a: f64,
}

impl SchwingerCoupling {
    pub fn new(g: f64, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && g.is_finite()) {
            return Err(Error::InvalidParameter(format!("need finite g and a > 0, got g={g}, a={a}")));
        }
        Ok(Self { g, a })
    }

    /// `G = g^2 a / 2`
    pub fn big_g(&self) -> f64 {
        0.5 * self.g * self.g * self.a
    }

    /// `w = 1 / (2a)`
    pub fn w(&self) -> f64 {
        0.5 / self.a
    }

    /// `J = g^2 a^2 = G / w`
    pub fn j(&self) -> f64 {
        self.g * self.g * self.a * self.a
    }

    /// Dimensionful Hamiltonian `G/2 (Z0 [+ Z0Z1]) + w/2 (hopping)` for 2 or 3 sites.
    ///
    /// Equals `w * schwinger_hamiltonian(n, J/2)`: the dimensionless builders
    /// carry the bare `J` on the Z terms.
    pub fn dimensionful_hamiltonian(&self, n_qubits: usize) -> Result<PauliSum> {
        let (g, w) = (self.big_g(), self.w());
        match n_qubits {
            2 => PauliSum::from_labels(2, &[(0.5 * w, "XX"), (0.5 * w, "YY"), (0.5 * g, "ZI")]),
            3 => PauliSum::from_labels(
                3,
                &[
                    (0.5 * w, "XXI"),
                    (0.5 * w, "IXX"),
                    (0.5 * w, "YYI"),
                    (0.5 * w, "IYY"),
                    (0.5 * g, "ZII"),
                    (0.5 * g, "ZZI"),
                ],
            ),
            n => Err(Error::UnsupportedSystemSize(n)),
        }
    }
}

/// Dimensionless Schwinger-model Hamiltonians.
///
/// Term order:
/// - 1 qubit: `X, J Z`
/// - 2 qubits: `XX/2, YY/2, J Z0`
/// - 3 qubits: `X0X1/2, X1X2/2, Y0Y1/2, Y1Y2/2, J Z0, J Z0Z1`
///
/// The three-qubit Z terms carry `J` (not `J/2`); with that weight `|000>`
/// has energy `2J` and the spectrum matches the closed forms in
/// [`crate::spectral::closed_form_spectrum`].
pub fn schwinger_hamiltonian(n_qubits: usize, j: f64) -> Result<PauliSum> {
    if !j.is_finite() {
        return Err(Error::NonFiniteCoefficient(j));
    }
    match n_qubits {
        1 => PauliSum::from_labels(1, &[(1.0, "X"), (j, "Z")]),
        2 => PauliSum::from_labels(2, &[(0.5, "XX"), (0.5, "YY"), (j, "ZI")]),
        3 => PauliSum::from_labels(
            3,
            &[(0.5, "XXI"), (0.5, "IXX"), (0.5, "YYI"), (0.5, "IYY"), (j, "ZII"), (j, "ZZI")],
        ),
        n => Err(Error::UnsupportedSystemSize(n)),
    }
}

/// Resolves `"schwinger-1q"`, `"schwinger-2q"` or `"schwinger-3q"`.
pub fn named_hamiltonian(name: &str, j: f64) -> Result<PauliSum> {
    let n = match name {
        "schwinger-1q" => 1,
        "schwinger-2q" => 2,
        "schwinger-3q" => 3,
        other => return Err(Error::UnknownHamiltonian(other.to_string())),
    };
    schwinger_hamiltonian(n, j)
}

/// `(Z0 - Z1 + Z2) / 3` on three qubits.
pub fn observable_zbar() -> PauliSum {
    let third = 1.0 / 3.0;
    PauliSum::from_labels(3, &[(third, "ZII"), (-third, "IZI"), (third, "IIZ")])
        .expect("static observable is well formed")
}

/// Single-qubit Pauli `axis` acting on `qubit` of an `n_qubits` register.
pub fn single_qubit(n_qubits: usize, qubit: usize, axis: PauliAxis) -> Result<PauliSum> {
    if qubit >= n_qubits {
        return Err(Error::InvalidParameter(format!("qubit {qubit} out of range for {n_qubits} qubits")));
    }
    let mut axes = vec![PauliAxis::I; n_qubits];
    axes[qubit] = axis;
    PauliSum::from_terms(n_qubits, vec![PauliTerm::new(1.0, axes)?])
}

/// Resolves an observable name against a Hamiltonian.
///
/// Accepted: `H`, `Zbar` (3 qubits), `X<k>`/`Y<k>`/`Z<k>`, or a full axes
/// string of length `n` such as `ZZI` (`Z` alone on one qubit).
pub fn named_observable(name: &str, h: &PauliSum) -> Result<PauliSum> {
    let n = h.n_qubits();
    if name == "H" {
        return Ok(h.clone());
    }
    if name == "Zbar" {
        return if n == 3 { Ok(observable_zbar()) } else { Err(Error::UnknownObservable(name.into())) };
    }
    if name.len() == n && name.chars().all(|c| PauliAxis::from_char(c).is_some()) {
        return PauliSum::from_labels(n, &[(1.0, name)]);
    }
    let mut chars = name.chars();
    if let (Some(first), rest) = (chars.next(), chars.as_str()) {
        if let (Some(axis), Ok(q)) = (PauliAxis::from_char(first), rest.parse::<usize>()) {
            if axis != PauliAxis::I && q < n {
                return single_qubit(n, q, axis);
            }
        }
    }
    Err(Error::UnknownObservable(name.into()))
}

/// Dense `2^n x 2^n` matrix of `h`.
pub fn dense_matrix(h: &PauliSum) -> Result<CMatrix> {
    check_dense_limit(h.n_qubits())?;
    let dim = 1usize << h.n_qubits();
    let mut m = CMatrix::zeros(dim);
    for term in h.terms() {
        let masks = term.masks();
        let c = Complex64::new(term.coeff(), 0.0);
        for b in 0..dim {
            m[(b ^ masks.x, b)] += c * masks.phase(b);
        }
    }
    Ok(m)
}

/// Writes `h * input` into `out`.
pub(crate) fn apply_sum(h: &PauliSum, input: &[Complex64], out: &mut [Complex64]) {
    out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
    for term in h.terms() {
        let masks = term.masks();
        let c = term.coeff();
        for (b, amp) in input.iter().enumerate() {
            out[b ^ masks.x] += c * masks.phase(b) * amp;
        }
    }
}

/// `h|psi>` as a raw amplitude vector.
pub fn apply(h: &PauliSum, state: &StateVector) -> Result<Vec<Complex64>> {
    state.check_same_size(h.n_qubits())?;
    let mut out = vec![Complex64::new(0.0, 0.0); state.dim()];
    apply_sum(h, state.amplitudes(), &mut out);
    Ok(out)
}

/// `<psi|obs|psi>` for a normalized state.
pub fn expectation(state: &StateVector, obs: &PauliSum) -> Result<f64> {
    state.check_same_size(obs.n_qubits())?;
    let norm = state.norm();
    if (norm - 1.0).abs() > crate::state::NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    let value: Complex64 =
        obs.terms().iter().map(|t| t.coeff() * t.masks().expectation(state.amplitudes())).sum();
    debug_assert!(value.im.abs() < 1e-10 * obs.coefficient_norm().max(1.0), "imaginary residue {}", value.im);
    Ok(value.re)
}

/// True iff `||[a, b]||` (max entry) is below 1e-12.
pub fn commutes(a: &PauliSum, b: &PauliSum) -> Result<bool> {
    if a.n_qubits() != b.n_qubits() {
        return Err(Error::DimensionMismatch { expected: a.n_qubits(), found: b.n_qubits() });
    }
    let ma = dense_matrix(a)?;
    let mb = dense_matrix(b)?;
    Ok(ma.commutator(&mb).max_abs() < 1e-12)
}
