use faer::Side;

use super::matrix::{ComplexMatrix, C64};
use super::policy::NumericPolicy;
use crate::error::{invalid, Error, Result};

/// Spectrum of a Hermitian matrix: ascending eigenvalues and matching
/// orthonormal eigenvectors stored as columns.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermEig {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }
}

pub fn herm_eig(m: &ComplexMatrix) -> Result<HermEig> {
    herm_eig_with(m, &NumericPolicy::DEFAULT)
}

/// Hermitian eigendecomposition.
///
/// Eigenvalues come back ascending. Each eigenvector's phase is fixed so
/// that its largest-magnitude component (first one on ties) is real and
/// positive.
pub fn herm_eig_with(m: &ComplexMatrix, policy: &NumericPolicy) -> Result<HermEig> {
    if !m.is_square() {
        return invalid(format!("eigensolve of a {}x{} matrix", m.rows(), m.cols()));
    }
    let defect = m.hermitian_defect();
    let scale = m.max_abs().max(1.0);
    if defect > policy.identity_tol * scale {
        return invalid(format!("matrix is not Hermitian (defect {defect:e})"));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(HermEig { values: vec![], vectors: ComplexMatrix::zeros(0, 0) });
    }
    let eig = m
        .hermitian_part()
        .to_faer()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::InvalidInput(format!("eigensolver failed: {e:?}")))?;
    let (s, u) = (eig.S(), eig.U());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].re.total_cmp(&s[b].re));

    let values = order.iter().map(|&k| s[k].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let mut v: Vec<C64> = (0..n).map(|i| u[(i, k)]).collect();
        fix_phase(&mut v);
        for (i, z) in v.into_iter().enumerate() {
            vectors[(i, col)] = z;
        }
    }
    Ok(HermEig { values, vectors })
}

/// Smallest eigenvalue and its (phase-fixed) eigenvector.
pub fn min_eigenpair(m: &ComplexMatrix) -> Result<(f64, Vec<C64>)> {
    let e = herm_eig(m)?;
    Ok((e.values[0], e.vector(0)))
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(herm_eig(m)?.values[0])
}

/// Rotates `v` so its largest-magnitude entry is real and positive.
pub fn fix_phase(v: &mut [C64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v.iter().position(|z| z.norm() >= max * (1.0 - 1e-10)).unwrap_or(0);
    let phase = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
    v[pivot] = C64::new(v[pivot].re, 0.0);
}
