use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::{ComplexMatrix, C64};
use super::state::BipartiteState;
use crate::error::Result;

pub fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    (0..n).map(|_| gaussian_c64(rng)).collect()
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the
/// phases of R's diagonal moved into Q.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| gaussian_c64(rng));
    let qr = g.to_faer().qr();
    let (q, r) = (qr.compute_Q(), qr.R());
    ComplexMatrix::from_fn(n, n, |i, j| {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        q[(i, j)] * phase
    })
}

/// First `k` columns of a Haar unitary: a uniformly random orthonormal k-frame.
pub fn haar_frame<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<Vec<C64>> {
    let u = haar_unitary(n, rng);
    (0..k).map(|j| u.column(j)).collect()
}

/// Random density matrix G G† / Tr with G a d×r complex Gaussian.
pub fn random_density<R: Rng + ?Sized>(d_a: usize, d_b: usize, rank: usize, rng: &mut R) -> Result<BipartiteState> {
    let n = d_a * d_b;
    let g = ComplexMatrix::from_fn(n, rank, |_, _| gaussian_c64(rng));
    let m = g.matmul(&g.adjoint())?;
    let tr = m.trace().re;
    BipartiteState::unnormalized(m.scale_real(1.0 / tr), d_a, d_b)?.renormalize()
}
