//! n-copy operators with all of Alice's factors grouped together.
//!
//! `X^{⊗n}` is naturally indexed by (a₁ b₁ a₂ b₂ … aₙ bₙ). The regrouped
//! operator is indexed by (a₁ … aₙ)(b₁ … bₙ), the cut across which Schmidt
//! rank is measured. Both orders are mixed-radix with the first factor most
//! significant.

use std::sync::OnceLock;

use crate::error::{invalid, Error, Result};
use crate::qmat::{ComplexMatrix, NumericPolicy};

/// Default bound on the total Hilbert-space dimension of an n-copy operator.
pub const DEFAULT_MAX_DIM: usize = 81;
/// Bound with the stress option enabled (n = 3 at d = 3).
pub const STRESS_MAX_DIM: usize = 729;

/// `BENTLAB_MAX_DIM` if set and valid, otherwise the default or stress cap.
pub fn size_cap(stress: bool) -> usize {
    static ENV: OnceLock<Option<usize>> = OnceLock::new();
    let env = *ENV.get_or_init(|| std::env::var("BENTLAB_MAX_DIM").ok().and_then(|s| s.trim().parse().ok()));
    env.unwrap_or(if stress { STRESS_MAX_DIM } else { DEFAULT_MAX_DIM })
}

/// Position in the interleaved order of the regrouped index `r`.
fn interleaved_index(r: usize, d_a: usize, d_b: usize, n: usize) -> usize {
    let a_total = d_a.pow(n as u32);
    let b_total = d_b.pow(n as u32);
    debug_assert!(r < a_total * b_total);
    let (mut ra, mut rb) = (r / b_total, r % b_total);
    let mut digits = vec![(0, 0); n];
    for slot in digits.iter_mut().rev() {
        *slot = (ra % d_a, rb % d_b);
        ra /= d_a;
        rb /= d_b;
    }
    digits.iter().fold(0, |acc, &(a, b)| (acc * d_a + a) * d_b + b)
}

fn permutation(d_a: usize, d_b: usize, n: usize) -> Vec<usize> {
    let total = (d_a * d_b).pow(n as u32);
    (0..total).map(|r| interleaved_index(r, d_a, d_b, n)).collect()
}

/// Interleaved → grouped: out[r, c] = m[π(r), π(c)].
pub fn regroup(m: &ComplexMatrix, d_a: usize, d_b: usize, n: usize) -> Result<ComplexMatrix> {
    let total = (d_a * d_b).pow(n as u32);
    if !m.is_square() || m.rows() != total {
        return invalid(format!("{}x{} operator is not on ({d_a}⊗{d_b})^{n}", m.rows(), m.cols()));
    }
    let p = permutation(d_a, d_b, n);
    Ok(ComplexMatrix::from_fn(total, total, |r, c| m[(p[r], p[c])]))
}

/// Grouped → interleaved, the inverse of [`regroup`].
pub fn ungroup(m: &ComplexMatrix, d_a: usize, d_b: usize, n: usize) -> Result<ComplexMatrix> {
    let total = (d_a * d_b).pow(n as u32);
    if !m.is_square() || m.rows() != total {
        return invalid(format!("{}x{} operator is not on ({d_a}⊗{d_b})^{n}", m.rows(), m.cols()));
    }
    let p = permutation(d_a, d_b, n);
    let mut out = ComplexMatrix::zeros(total, total);
    for r in 0..total {
        for c in 0..total {
            out[(p[r], p[c])] = m[(r, c)];
        }
    }
    Ok(out)
}

/// X^{⊗n} regrouped so Alice holds factors 1..n, refusing totals above `max_dim`.
pub fn tensor_power(x: &ComplexMatrix, d_a: usize, d_b: usize, n: usize, max_dim: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return invalid("number of copies must be at least 1");
    }
    if !x.is_square() || x.rows() != d_a * d_b {
        return invalid(format!("{}x{} operator is not on {d_a}⊗{d_b}", x.rows(), x.cols()));
    }
    let total = (d_a * d_b).checked_pow(n as u32).unwrap_or(usize::MAX);
    if total > max_dim {
        return Err(Error::SizeLimit { requested: total, limit: max_dim });
    }
    let policy = NumericPolicy { max_entries: usize::MAX, ..NumericPolicy::DEFAULT };
    let mut acc = x.clone();
    for _ in 1..n {
        acc = acc.kron_with(x, &policy)?;
    }
    regroup(&acc, d_a, d_b, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::C64;

    #[test]
    fn round_trip() {
        let m = ComplexMatrix::from_fn(36, 36, |r, c| C64::new(r as f64, c as f64));
        let g = regroup(&m, 2, 3, 2).unwrap();
        assert_eq!(ungroup(&g, 2, 3, 2).unwrap(), m);
    }

    #[test]
    #[allow(clippy::identity_op)] // written out digit by digit
    fn documented_permutation() {
        // grouped (a1 a2)(b1 b2) with d_a = 2, d_b = 3: r = (a1*2 + a2)*9 + b1*3 + b2
        let r = (1 * 2 + 0) * 9 + 2 * 3 + 1;
        // interleaved (a1 b1 a2 b2): ((a1*3 + b1)*2 + a2)*3 + b2
        let expected = ((1 * 3 + 2) * 2 + 0) * 3 + 1;
        assert_eq!(interleaved_index(r, 2, 3, 2), expected);
        assert_eq!(interleaved_index(5, 2, 3, 1), 5);
    }

    #[test]
    fn product_of_local_operators() {
        // (A⊗B)^{⊗2} regrouped equals (A⊗A)⊗(B⊗B).
        let a = ComplexMatrix::from_fn(2, 2, |i, j| C64::new((i + 2 * j) as f64, 1.0));
        let b = ComplexMatrix::from_fn(3, 3, |i, j| C64::new(i as f64 - j as f64, (i * j) as f64));
        let x = a.kron(&b).unwrap();
        let got = tensor_power(&x, 2, 3, 2, 36).unwrap();
        let want = a.kron(&a).unwrap().kron(&b.kron(&b).unwrap()).unwrap();
        assert!(got.max_abs_diff(&want) == 0.0);
    }

    #[test]
    fn size_cap_enforced() {
        let x = ComplexMatrix::identity(9);
        assert!(tensor_power(&x, 3, 3, 2, 81).is_ok());
        assert!(matches!(tensor_power(&x, 3, 3, 3, 81), Err(Error::SizeLimit { requested: 729, limit: 81 })));
    }
}
