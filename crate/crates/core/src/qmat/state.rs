use std::f64::consts::PI;

use super::eig::{herm_eig, HermEig};
use super::matrix::{norm, ComplexMatrix, C64, ZERO};
use super::policy::NumericPolicy;
use crate::error::{invalid, Result};

/// Which factor of a bipartite operator to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Hermitian operator on `C^{d_a} ⊗ C^{d_b}`.
///
/// `normalized` records whether the trace is one; unnormalized operators are
/// used for partial transposes and for the scaled Werner family.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteState {
    mat: ComplexMatrix,
    d_a: usize,
    d_b: usize,
    normalized: bool,
}

impl BipartiteState {
    /// Unit-trace Hermitian state.
    pub fn normalized(mat: ComplexMatrix, d_a: usize, d_b: usize) -> Result<Self> {
        Self::new_with(mat, d_a, d_b, true, &NumericPolicy::DEFAULT)
    }

    /// Hermitian operator with no trace constraint.
    pub fn unnormalized(mat: ComplexMatrix, d_a: usize, d_b: usize) -> Result<Self> {
        Self::new_with(mat, d_a, d_b, false, &NumericPolicy::DEFAULT)
    }

    pub fn new_with(
        mat: ComplexMatrix,
        d_a: usize,
        d_b: usize,
        normalized: bool,
        policy: &NumericPolicy,
    ) -> Result<Self> {
        if d_a == 0 || d_b == 0 {
            return invalid("subsystem dimensions must be positive");
        }
        if mat.rows() != d_a * d_b || mat.cols() != d_a * d_b {
            return invalid(format!("{}x{} matrix does not factor as {d_a}⊗{d_b}", mat.rows(), mat.cols()));
        }
        let defect = mat.hermitian_defect();
        if defect > policy.construction_tol * mat.max_abs().max(1.0) {
            return invalid(format!("operator is not Hermitian (defect {defect:e})"));
        }
        let mat = mat.hermitian_part();
        if normalized {
            let tr = mat.trace().re;
            if (tr - 1.0).abs() > policy.construction_tol {
                return invalid(format!("trace {tr} is not 1"));
            }
        }
        Ok(Self { mat, d_a, d_b, normalized })
    }

    /// Rescales to unit trace.
    pub fn renormalize(&self) -> Result<Self> {
        let tr = self.trace();
        if !(tr.abs() > 0.0) {
            return invalid("cannot renormalize a traceless operator");
        }
        let mut mat = self.mat.scale_real(1.0 / tr);
        // Pin the diagonal sum exactly; rescaling leaves ~1 ulp per entry.
        let drift = mat.trace().re - 1.0;
        let n = mat.rows();
        if drift.abs() > 0.0 && n > 0 {
            let k = (0..n).max_by(|&i, &j| mat[(i, i)].re.total_cmp(&mat[(j, j)].re)).unwrap();
            mat[(k, k)].re -= drift;
        }
        Self::new_with(mat, self.d_a, self.d_b, true, &NumericPolicy::DEFAULT)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn dim(&self) -> usize {
        self.d_a * self.d_b
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Entry ⟨i j| ρ |k l⟩.
    #[inline]
    pub fn entry(&self, i: usize, j: usize, k: usize, l: usize) -> C64 {
        self.mat[(i * self.d_b + j, k * self.d_b + l)]
    }

    /// Transpose on the B factor: out⟨ij|·|kl⟩ = in⟨il|·|kj⟩.
    pub fn partial_transpose(&self) -> BipartiteState {
        let (da, db) = (self.d_a, self.d_b);
        let mat = ComplexMatrix::from_fn(da * db, da * db, |r, c| {
            let (i, j) = (r / db, r % db);
            let (k, l) = (c / db, c % db);
            self.mat[(i * db + l, k * db + j)]
        });
        // The result is Hermitian whenever the input is; keep the flag.
        BipartiteState { mat, d_a: da, d_b: db, normalized: self.normalized }
    }

    pub fn partial_trace(&self, keep: Subsystem) -> ComplexMatrix {
        let (da, db) = (self.d_a, self.d_b);
        match keep {
            Subsystem::A => ComplexMatrix::from_fn(da, da, |i, k| (0..db).map(|j| self.entry(i, j, k, j)).sum()),
            Subsystem::B => ComplexMatrix::from_fn(db, db, |j, l| (0..da).map(|i| self.entry(i, j, i, l)).sum()),
        }
    }

    pub fn eig(&self) -> Result<HermEig> {
        herm_eig(&self.mat)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eig()?.values[0])
    }

    /// ⟨ψ|ρ|ψ⟩ (real part; ρ is Hermitian).
    pub fn expectation(&self, psi: &[C64]) -> f64 {
        self.mat.expectation(psi).re
    }
}

/// Nonzero vector in `C^{d_a} ⊗ C^{d_b}`, index `i * d_b + j`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct PureState {
    vec: Vec<C64>,
    d_a: usize,
    d_b: usize,
}

impl PureState {
    pub fn new(vec: Vec<C64>, d_a: usize, d_b: usize) -> Result<Self> {
        if vec.len() != d_a * d_b {
            return invalid(format!("vector of length {} is not {d_a}⊗{d_b}", vec.len()));
        }
        if vec.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("non-finite amplitude");
        }
        if norm(&vec) == 0.0 {
            return invalid("zero vector");
        }
        Ok(Self { vec, d_a, d_b })
    }

    pub fn product(a: &[C64], b: &[C64]) -> Result<Self> {
        Self::new(super::matrix::kron_vec(a, b), a.len(), b.len())
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.vec
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.vec
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn norm(&self) -> f64 {
        norm(&self.vec)
    }

    pub fn normalized(&self) -> PureState {
        let n = self.norm();
        PureState { vec: self.vec.iter().map(|z| z / n).collect(), d_a: self.d_a, d_b: self.d_b }
    }

    /// |ψ⟩⟨ψ| as a bipartite operator (unnormalized unless ψ is a unit vector).
    pub fn projector(&self) -> BipartiteState {
        BipartiteState {
            mat: ComplexMatrix::outer(&self.vec),
            d_a: self.d_a,
            d_b: self.d_b,
            normalized: (self.norm() - 1.0).abs() <= 1e-12,
        }
    }
}

/// |Φ_k⟩ = (1/√d) Σ_j e^{2πi jk/d} |jj⟩.
pub fn max_entangled(d: usize, k: usize) -> Result<PureState> {
    if d == 0 || k >= d {
        return invalid(format!("phase index {k} out of range for d = {d}"));
    }
    let mut v = vec![ZERO; d * d];
    let amp = 1.0 / (d as f64).sqrt();
    for j in 0..d {
        v[j * d + j] = C64::from_polar(amp, 2.0 * PI * (j * k) as f64 / d as f64);
    }
    PureState::new(v, d, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::matrix::inner;

    #[test]
    fn diagonal_state_unchanged_by_pt() {
        let mat = ComplexMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5]);
        let rho = BipartiteState::normalized(mat, 2, 2).unwrap();
        assert_eq!(rho.partial_transpose(), rho);
    }

    #[test]
    fn bell_pt_has_minus_half() {
        let phi = max_entangled(2, 0).unwrap();
        let pt = phi.projector().partial_transpose();
        let e = pt.eig().unwrap();
        assert!((e.values[0] + 0.5).abs() < 1e-12);
        assert!((e.values[3] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pt_index_rule() {
        let m =
            ComplexMatrix::from_fn(6, 6, |r, c| C64::new((r * 6 + c) as f64, 0.0) + C64::new((c * 6 + r) as f64, 0.0));
        let s = BipartiteState::unnormalized(m, 2, 3).unwrap();
        let p = s.partial_transpose();
        for (i, j, k, l) in [(0, 1, 1, 2), (1, 2, 0, 0), (1, 0, 1, 2)] {
            assert_eq!(p.entry(i, j, k, l), s.entry(i, l, k, j));
        }
    }

    #[test]
    fn marginal_of_max_entangled_is_mixed() {
        for d in 2..5 {
            let rho = max_entangled(d, 0).unwrap().projector();
            let ra = rho.partial_trace(Subsystem::B);
            let target = ComplexMatrix::identity(d).scale_real(1.0 / d as f64);
            assert!(ra.max_abs_diff(&target) < 1e-14);
        }
    }

    #[test]
    fn product_marginal() {
        let ra = ComplexMatrix::from_real_diagonal(&[0.25, 0.75]);
        let rb = ComplexMatrix::from_real_diagonal(&[0.1, 0.2, 0.3]);
        let s = BipartiteState::unnormalized(ra.kron(&rb).unwrap(), 2, 3).unwrap();
        let got = s.partial_trace(Subsystem::A);
        assert!(got.max_abs_diff(&ra.scale_real(0.6)) < 1e-15);
        let got_b = s.partial_trace(Subsystem::B);
        assert!(got_b.max_abs_diff(&rb) < 1e-15);
    }

    #[test]
    fn max_entangled_phases_and_orthogonality() {
        let p1 = max_entangled(3, 1).unwrap();
        let w = C64::from_polar(1.0, 2.0 * PI / 3.0);
        let s = 1.0 / 3f64.sqrt();
        assert!((p1.as_slice()[0] - C64::new(s, 0.0)).norm() < 1e-15);
        assert!((p1.as_slice()[4] - w * s).norm() < 1e-15);
        assert!((p1.as_slice()[8] - w * w * s).norm() < 1e-15);
        let p0 = max_entangled(3, 0).unwrap();
        assert!(inner(p0.as_slice(), p1.as_slice()).norm() < 1e-15);
        assert!(max_entangled(3, 3).is_err());
    }

    #[test]
    fn rejects_bad_states() {
        let m = ComplexMatrix::from_real_diagonal(&[0.5, 0.6]);
        assert!(BipartiteState::normalized(m.clone(), 2, 1).is_err());
        assert!(BipartiteState::unnormalized(m.clone(), 2, 1).is_ok());
        assert!(BipartiteState::unnormalized(m, 3, 1).is_err());
        let mut nh = ComplexMatrix::identity(2);
        nh[(0, 1)] = C64::new(0.0, 1e-6);
        assert!(BipartiteState::unnormalized(nh, 2, 1).is_err());
        assert!(PureState::new(vec![ZERO; 4], 2, 2).is_err());
    }
}
