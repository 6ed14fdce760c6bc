//! Dense Hermitian eigendecomposition, exact propagation and the closed-form
//! Schwinger-model eigenpairs used as fixtures.

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigh, CMatrix};
use crate::pauli::{dense_matrix, PauliSum};
use crate::state::{inner, StateVector};

/// Components below this magnitude count as zero for the phase convention and
/// for picking the canonical basis of a degenerate block.
const CANONICAL_TOL: f64 = 1e-8;

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
///
/// Phase convention: the first component with magnitude above 1e-8 is real
/// and positive. Degenerate blocks are given the basis obtained by projecting
/// computational basis vectors `e_0, e_1, ...` onto the block and
/// orthonormalizing, so vectors within a block are ordered by lowest basis
/// index and the basis depends only on the subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn eigenvector(&self, i: usize) -> StateVector {
        StateVector::from_raw(self.n_qubits(), self.eigenvectors.column(i))
    }

    /// `sum_i eps_i |u_i><u_i|`
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.dim();
        let mut out = CMatrix::zeros(n);
        for (k, &eps) in self.eigenvalues.iter().enumerate() {
            let col = self.eigenvectors.column(k);
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += eps * col[i] * col[j].conj();
                }
            }
        }
        out
    }

    /// Projector onto the span of the selected eigenvectors.
    pub fn projector(&self, indices: impl IntoIterator<Item = usize>) -> CMatrix {
        let n = self.dim();
        let mut out = CMatrix::zeros(n);
        for k in indices {
            let col = self.eigenvectors.column(k);
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += col[i] * col[j].conj();
                }
            }
        }
        out
    }

    /// Index ranges of (numerically) equal eigenvalues.
    pub fn clusters(&self, tol: f64) -> Vec<std::ops::Range<usize>> {
        group_sorted(&self.eigenvalues, tol)
    }

    /// One eigenvalue per row, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,eigenvalue\n");
        for (i, e) in self.eigenvalues.iter().enumerate() {
            out.push_str(&format!("{i},{e:.16e}\n"));
        }
        out
    }

    /// Unitary `e^{-i tau H}` in the eigenbasis.
    pub fn propagator(&self, tau: f64) -> CMatrix {
        let n = self.dim();
        let mut out = CMatrix::zeros(n);
        for (k, &eps) in self.eigenvalues.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -tau * eps);
            let col = self.eigenvectors.column(k);
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += phase * col[i] * col[j].conj();
                }
            }
        }
        out
    }

    /// `e^{-i tau H} psi` through the eigenbasis.
    pub fn evolve(&self, state: &StateVector, tau: f64) -> Result<StateVector> {
        state.check_same_size(self.n_qubits())?;
        let coeffs = self.project(state.amplitudes());
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (k, (&eps, c)) in self.eigenvalues.iter().zip(coeffs).enumerate() {
            let c = c * Complex64::from_polar(1.0, -tau * eps);
            for (i, o) in out.iter_mut().enumerate() {
                *o += c * self.eigenvectors[(i, k)];
            }
        }
        Ok(StateVector::from_raw(state.n_qubits(), out))
    }

    /// `<u_k|psi>` for every eigenvector.
    pub(crate) fn project(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        (0..n).map(|k| (0..n).map(|i| self.eigenvectors[(i, k)].conj() * psi[i]).sum()).collect()
    }

    fn from_unsorted(values: Vec<f64>, vectors: CMatrix) -> Self {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let eigenvalues: Vec<f64> = order.iter().map(|&k| values[k]).collect();
        let mut eigenvectors = CMatrix::zeros(n);
        for (dst, &src) in order.iter().enumerate() {
            eigenvectors.set_column(dst, &vectors.column(src));
        }
        let scale = eigenvalues.iter().fold(1.0f64, |m, e| m.max(e.abs()));
        let mut out = Self { eigenvalues, eigenvectors };
        for block in out.clusters(1e-11 * scale) {
            out.canonicalize_block(block);
        }
        out
    }

    fn canonicalize_block(&mut self, block: std::ops::Range<usize>) {
        let n = self.dim();
        let cols: Vec<Vec<Complex64>> = block.clone().map(|k| self.eigenvectors.column(k)).collect();
        let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(cols.len());
        for j in 0..n {
            if basis.len() == cols.len() {
                break;
            }
            // P e_j = sum_k u_k conj(u_k[j])
            let mut cand = vec![Complex64::new(0.0, 0.0); n];
            for col in &cols {
                let w = col[j].conj();
                for (c, u) in cand.iter_mut().zip(col) {
                    *c += u * w;
                }
            }
            for _ in 0..2 {
                for b in &basis {
                    let ov = inner(b, &cand);
                    for (c, bv) in cand.iter_mut().zip(b) {
                        *c -= ov * bv;
                    }
                }
            }
            let norm = cand.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm > CANONICAL_TOL {
                cand.iter_mut().for_each(|c| *c /= norm);
                basis.push(cand);
            }
        }
        if basis.len() != cols.len() {
            basis = cols;
        }
        for (k, mut v) in block.zip(basis) {
            fix_phase(&mut v);
            self.eigenvectors.set_column(k, &v);
        }
    }
}

impl Serialize for SpectralDecomposition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let vectors: Vec<Vec<[f64; 2]>> = (0..self.dim())
            .map(|k| self.eigenvectors.column(k).iter().map(|c| [c.re, c.im]).collect())
            .collect();
        let mut s = serializer.serialize_struct("SpectralDecomposition", 2)?;
        s.serialize_field("eigenvalues", &self.eigenvalues)?;
        s.serialize_field("eigenvectors", &vectors)?;
        s.end()
    }
}

fn fix_phase(v: &mut [Complex64]) {
    if let Some(lead) = v.iter().copied().find(|c| c.norm() > CANONICAL_TOL) {
        let rot = lead.conj() / lead.norm();
        v.iter_mut().for_each(|c| *c *= rot);
    }
}

fn group_sorted(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > tol {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Dense diagonalization of `h`.
pub fn eigendecompose(h: &PauliSum) -> Result<SpectralDecomposition> {
    let m = dense_matrix(h)?;
    let (values, vectors) = hermitian_eigh(&m);
    Ok(SpectralDecomposition::from_unsorted(values, vectors))
}

/// `e^{-i tau h} state`.
pub fn evolve_exact(state: &StateVector, h: &PauliSum, tau: f64) -> Result<StateVector> {
    state.check_same_size(h.n_qubits())?;
    eigendecompose(h)?.evolve(state, tau)
}

/// Expansion of a state in an eigenbasis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapDecomposition {
    /// `|<u_j|psi>|^2`
    pub weights: Vec<f64>,
    /// `<u_j|psi>`
    pub amplitudes: Vec<Complex64>,
}

pub fn overlap_decomposition(state: &StateVector, spec: &SpectralDecomposition) -> Result<OverlapDecomposition> {
    state.check_same_size(spec.n_qubits())?;
    let amplitudes = spec.project(state.amplitudes());
    let weights = amplitudes.iter().map(|a| a.norm_sqr()).collect();
    Ok(OverlapDecomposition { weights, amplitudes })
}

/// An analytic eigenpair with its conventional label (`u0`, `E7`, ...).
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledEigenpair {
    pub label: String,
    pub energy: f64,
    pub vector: StateVector,
}

fn ket(n_qubits: usize, entries: &[(&str, f64)]) -> StateVector {
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
    for &(label, a) in entries {
        amps[usize::from_str_radix(label, 2).expect("static label")] += a;
    }
    StateVector::normalized(amps).expect("closed-form vector is non-zero")
}

/// Closed-form eigenpairs of `schwinger_hamiltonian(n, J)` in the
/// conventional label order (`u0..` for 1 and 2 qubits, `E0..E7` for 3).
///
/// Vectors are normalized numerically; the analytic prefactors are checked
/// against that in tests.
pub fn closed_form_eigenpairs(n_qubits: usize, j: f64) -> Result<Vec<LabeledEigenpair>> {
    let pair = |label: &str, energy: f64, vector: StateVector| LabeledEigenpair {
        label: label.to_string(),
        energy,
        vector,
    };
    let s = (j * j + 1.0).sqrt();
    match n_qubits {
        1 => Ok(vec![
            pair("u0", -s, ket(1, &[("0", 1.0), ("1", -s - j)])),
            pair("u1", s, ket(1, &[("0", s + j), ("1", 1.0)])),
        ]),
        2 => Ok(vec![
            pair("u0", -s, ket(2, &[("01", 1.0), ("10", -s - j)])),
            // |11> carries -J and |00> carries +J under J*Z0.
            pair("u1", -j, ket(2, &[("11", 1.0)])),
            pair("u2", j, ket(2, &[("00", 1.0)])),
            pair("u3", s, ket(2, &[("01", s + j), ("10", 1.0)])),
        ]),
        3 => {
            let r2 = 2f64.sqrt();
            let q = (1.0 + 2.0 * j * j).sqrt();
            let t = (2.0 + j * j).sqrt();
            Ok(vec![
                pair("E0", -(j + t), ket(3, &[("011", 1.0), ("101", -(j + t)), ("110", 1.0)])),
                pair(
                    "E1",
                    -r2 * q,
                    ket(3, &[("001", 1.0 + 4.0 * j * j - 2.0 * r2 * j * q), ("010", 2.0 * j - r2 * q), ("100", 1.0)]),
                ),
                pair("E2", 0.0, ket(3, &[("111", 1.0)])),
                pair("E3", 0.0, ket(3, &[("011", -1.0), ("110", 1.0)])),
                pair("E4", 0.0, ket(3, &[("001", -1.0), ("010", 2.0 * j), ("100", 1.0)])),
                pair("E5", t - j, ket(3, &[("011", 1.0), ("101", t - j), ("110", 1.0)])),
                pair("E6", 2.0 * j, ket(3, &[("000", 1.0)])),
                pair(
                    "E7",
                    r2 * q,
                    ket(3, &[("001", 1.0 + 4.0 * j * j + 2.0 * r2 * j * q), ("010", 2.0 * j + r2 * q), ("100", 1.0)]),
                ),
            ])
        }
        n => Err(Error::UnsupportedSystemSize(n)),
    }
}

/// Closed-form spectrum as a [`SpectralDecomposition`] (stable-sorted by
/// energy; closed-form vectors are kept as printed, not canonicalized).
pub fn closed_form_spectrum(n_qubits: usize, j: f64) -> Result<SpectralDecomposition> {
    let mut pairs = closed_form_eigenpairs(n_qubits, j)?;
    pairs.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    let dim = 1 << n_qubits;
    let mut vectors = CMatrix::zeros(dim);
    for (k, p) in pairs.iter().enumerate() {
        vectors.set_column(k, p.vector.amplitudes());
    }
    Ok(SpectralDecomposition { eigenvalues: pairs.iter().map(|p| p.energy).collect(), eigenvectors: vectors })
}

/// Largest deviation between two spectra: eigenvalues elementwise, and
/// projectors onto each cluster of equal eigenvalues.
pub fn spectral_deviation(a: &SpectralDecomposition, b: &SpectralDecomposition, cluster_tol: f64) -> f64 {
    assert_eq!(a.dim(), b.dim());
    let mut worst = a.eigenvalues.iter().zip(&b.eigenvalues).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    for block in a.clusters(cluster_tol) {
        let pa = a.projector(block.clone());
        let pb = b.projector(block);
        worst = worst.max(pa.sub(&pb).max_abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{apply, expectation, observable_zbar, schwinger_hamiltonian};
    use std::f64::consts::PI;

    const JS: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 3.7];

    #[test]
    fn closed_forms_are_eigenpairs() {
        for n in 1..=3 {
            for j in JS {
                let h = schwinger_hamiltonian(n, j).unwrap();
                for p in closed_form_eigenpairs(n, j).unwrap() {
                    let hv = apply(&h, &p.vector).unwrap();
                    let res: f64 = hv
                        .iter()
                        .zip(p.vector.amplitudes())
                        .map(|(a, b)| (a - p.energy * b).norm_sqr())
                        .sum::<f64>()
                        .sqrt();
                    assert!(res < 1e-12, "n={n} J={j} {}: residual {res}", p.label);
                }
            }
        }
    }

    #[test]
    fn printed_prefactors_match_numeric_norms() {
        // 1q / 2q: 1/sqrt(2(J^2+1+J sqrt(J^2+1)))
        for j in JS {
            let s = (j * j + 1.0).sqrt();
            let raw = ((s + j).powi(2) + 1.0).sqrt();
            assert!((raw - (2.0 * (j * j + 1.0 + j * s)).sqrt()).abs() < 1e-12);
            // E7 uses +, E1 needs - inside the root.
            let r2 = 2f64.sqrt();
            let q = (1.0 + 2.0 * j * j).sqrt();
            let n7 = ((1.0 + 4.0 * j * j + 2.0 * r2 * j * q).powi(2) + (2.0 * j + r2 * q).powi(2) + 1.0).sqrt();
            let n1 = ((1.0 + 4.0 * j * j - 2.0 * r2 * j * q).powi(2) + (2.0 * j - r2 * q).powi(2) + 1.0).sqrt();
            let base = 4.0 * (1.0 + 6.0 * j * j + 8.0 * j.powi(4));
            let cross = 8.0 * r2 * j * (1.0 + 2.0 * j * j).powf(1.5);
            assert!((n7 - (base + cross).sqrt()).abs() < 1e-9 * n7);
            assert!((n1 - (base - cross).sqrt()).abs() < 1e-9 * n7);
            // E5, E0, E4
            let t = (2.0 + j * j).sqrt();
            assert!(((2.0 + (t - j).powi(2)).sqrt() - (4.0 + 2.0 * j * j - 2.0 * j * t).sqrt()).abs() < 1e-12);
            assert!(((2.0 + (t + j).powi(2)).sqrt() - (4.0 + 2.0 * j * j + 2.0 * j * t).sqrt()).abs() < 1e-12);
            assert!(((2.0 + 4.0 * j * j).sqrt() - (2.0 + 4.0 * j * j).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvalue_examples() {
        let one = eigendecompose(&schwinger_hamiltonian(1, 1.0).unwrap()).unwrap();
        assert!((one.eigenvalues()[0] + 2f64.sqrt()).abs() < 1e-12);
        assert!((one.eigenvalues()[1] - 2f64.sqrt()).abs() < 1e-12);

        let three = eigendecompose(&schwinger_hamiltonian(3, 1.0).unwrap()).unwrap();
        let r3 = 3f64.sqrt();
        let r6 = 6f64.sqrt();
        let expected = [-(1.0 + r3), -r6, 0.0, 0.0, 0.0, r3 - 1.0, 2.0, r6];
        for (a, b) in three.eigenvalues().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }

        let zero = PauliSum::new(2);
        assert!(eigendecompose(&zero).unwrap().eigenvalues().iter().all(|&e| e == 0.0));

        let two = closed_form_spectrum(2, 1.0).unwrap();
        let r2 = 2f64.sqrt();
        assert_eq!(two.eigenvalues(), &[-r2, -1.0, 1.0, r2]);
        assert_eq!(closed_form_spectrum(3, 0.0).unwrap().eigenvalues().iter().filter(|&&e| e == 0.0).count(), 4);
    }

    #[test]
    fn zbar_of_closed_form_states() {
        let zbar = observable_zbar();
        let pairs = closed_form_eigenpairs(3, 1.0).unwrap();
        let z = |label: &str| {
            let p = pairs.iter().find(|p| p.label == label).unwrap();
            expectation(&p.vector, &zbar).unwrap()
        };
        assert!((z("E7") + 0.11111).abs() < 5e-6);
        assert!((z("E6") - 0.33333).abs() < 5e-6);
        assert!((z("E5") - 0.05157).abs() < 5e-6);
        assert!((z("E3") - 0.33333).abs() < 5e-6);
        assert!((z("E0") + 0.71823).abs() < 5e-6);
        // Exactly -1/9, printed as -0.11117.
        assert!((z("E1") + 1.0 / 9.0).abs() < 1e-12);
        // |E2> = |111> and |E4> carry the values printed against each other's labels.
        assert!((z("E2") + 1.0 / 3.0).abs() < 1e-12);
        assert!((z("E4") - 5.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn one_qubit_z_expectation_closed_form() {
        let z = PauliSum::from_labels(1, &[(1.0, "Z")]).unwrap();
        for j in JS {
            let s = (j * j + 1.0).sqrt();
            let expected = (j * j + j * s) / (j * j + 1.0 + j * s);
            let pairs = closed_form_eigenpairs(1, j).unwrap();
            assert!((expectation(&pairs[1].vector, &z).unwrap() - expected).abs() < 1e-12);
            assert!((expectation(&pairs[0].vector, &z).unwrap() + expected).abs() < 1e-12);
        }
        let pairs = closed_form_eigenpairs(1, 1.0).unwrap();
        assert!((expectation(&pairs[0].vector, &z).unwrap() + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn phase_convention_and_degenerate_ordering() {
        let d = eigendecompose(&schwinger_hamiltonian(3, 1.0).unwrap()).unwrap();
        for k in 0..8 {
            let v = d.eigenvector(k);
            let lead = v.amplitudes().iter().find(|c| c.norm() > 1e-8).unwrap();
            assert!(lead.im.abs() < 1e-14 && lead.re > 0.0);
        }
        // zero block: E4-like (lowest index 1), E3-like (index 3), E2 = |111>
        let first_nonzero = |k: usize| d.eigenvector(k).amplitudes().iter().position(|c| c.norm() > 1e-8).unwrap();
        assert_eq!([first_nonzero(2), first_nonzero(3), first_nonzero(4)], [1, 3, 7]);
        assert!((d.eigenvector(4).amplitudes()[7].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evolution_examples() {
        let h3 = schwinger_hamiltonian(3, 1.0).unwrap();
        let e2 = StateVector::basis("111").unwrap();
        for tau in [0.3, -2.0, 17.0] {
            let out = evolve_exact(&e2, &h3, tau).unwrap();
            assert!(out.amplitudes().iter().zip(e2.amplitudes()).all(|(a, b)| (a - b).norm() < 1e-12));
        }
        let psi = StateVector::basis("010").unwrap();
        let same = evolve_exact(&psi, &h3, 0.0).unwrap();
        assert!(same.amplitudes().iter().zip(psi.amplitudes()).all(|(a, b)| (a - b).norm() < 1e-14));

        let h1 = schwinger_hamiltonian(1, 1.0).unwrap();
        let u1 = closed_form_eigenpairs(1, 1.0).unwrap().remove(1).vector;
        let out = evolve_exact(&u1, &h1, PI / 2.0).unwrap();
        let phase = Complex64::from_polar(1.0, -PI / 2.0 * 2f64.sqrt());
        for (a, b) in out.amplitudes().iter().zip(u1.amplitudes()) {
            assert!((a - phase * b).norm() < 1e-12);
        }
    }

    #[test]
    fn overlap_examples() {
        let h1 = schwinger_hamiltonian(1, 1.0).unwrap();
        let d = eigendecompose(&h1).unwrap();
        let ov = overlap_decomposition(&StateVector::basis("0").unwrap(), &d).unwrap();
        let r2 = 2f64.sqrt();
        let expected = (r2 + 1.0).powi(2) / (2.0 * (2.0 + r2));
        assert!((ov.weights[1] - expected).abs() < 1e-12);
        assert!((ov.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);

        let ov = overlap_decomposition(&d.eigenvector(0), &d).unwrap();
        assert!((ov.weights[0] - 1.0).abs() < 1e-12 && ov.weights[1] < 1e-12);

        // |001> against E7, by brute-force inner product with the closed form
        let h3 = schwinger_hamiltonian(3, 1.0).unwrap();
        let d3 = eigendecompose(&h3).unwrap();
        let psi = StateVector::basis("001").unwrap();
        let ov = overlap_decomposition(&psi, &d3).unwrap();
        let e7 = closed_form_eigenpairs(3, 1.0).unwrap().remove(7).vector;
        let brute = e7.amplitudes()[1].norm_sqr();
        assert!((ov.weights[7] - brute).abs() < 1e-12);
        assert!((brute - 0.8249149571305293).abs() < 1e-12);
    }

    #[test]
    fn matches_closed_form_as_projectors() {
        for n in 1..=3 {
            for j in JS {
                let h = schwinger_hamiltonian(n, j).unwrap();
                let dev = spectral_deviation(
                    &eigendecompose(&h).unwrap(),
                    &closed_form_spectrum(n, j).unwrap(),
                    1e-9,
                );
                assert!(dev < 1e-10, "n={n} J={j}: {dev}");
            }
        }
    }

    #[test]
    fn csv_and_json_export() {
        let d = eigendecompose(&schwinger_hamiltonian(1, 0.0).unwrap()).unwrap();
        let csv = d.to_csv();
        let first: f64 = csv.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
        assert!(csv.starts_with("index,eigenvalue\n0,"));
        assert!((first + 1.0).abs() < 1e-15);
        assert_eq!(csv.lines().count(), 3);
        let json: serde_json::Value = serde_json::to_value(&d).unwrap();
        assert_eq!(json["eigenvalues"].as_array().unwrap().len(), 2);
        assert_eq!(json["eigenvectors"][0].as_array().unwrap().len(), 2);
    }
}
