//! Schmidt-rank-two tests of distillability.
//!
//! A state is pseudo n-copy distillable when some Schmidt-rank-two vector ψ
//! (across Alice's n factors versus Bob's) has ⟨ψ|(ρ^PT)^{⊗n}|ψ⟩ < 0. The
//! search is the see-saw in [`seesaw`]. A negative value is certified by the
//! stored vector. A nonnegative one is only evidence, since the problem is
//! not convex.

mod copies;
mod seesaw;

use std::f64::consts::TAU;

use serde::Serialize;

pub use copies::{regroup, size_cap, tensor_power, ungroup, DEFAULT_MAX_DIM, STRESS_MAX_DIM};
pub(crate) use seesaw::{bob_step, svd, Shape, STALL_COUNT};
pub use seesaw::{
    low_rank_expectation, minimize_rank_k, seesaw_run, LowRankState, MinOptions, OptimizerReport, RankTwoState,
    SeesawRun,
};

use crate::canonical::{build_rho_bc_unchecked, build_rho_c_eps, CanonicalParams, EpsParams};
use crate::error::{invalid, Error, Result};
use crate::qmat::{herm_eig, schmidt, ComplexMatrix, PureState, C64, ZERO};

/// Values below −SIGN_TOL count as negative in threshold searches.
pub const SIGN_TOL: f64 = 1e-10;

/// ⟨ψ|M|ψ⟩ for a Schmidt-rank-two ψ.
pub fn rank2_expectation(m: &ComplexMatrix, v: &RankTwoState) -> Result<f64> {
    if v.rank() != 2 {
        return invalid(format!("expected two Schmidt terms, got {}", v.rank()));
    }
    low_rank_expectation(m, v)
}

/// Minimum of ⟨ψ|M|ψ⟩ over Schmidt rank ≤ 2 on d_a⊗d_b. For d_a or d_b
/// equal to 2 this is the minimum eigenvalue.
pub fn min_rank2(m: &ComplexMatrix, d_a: usize, d_b: usize, opts: &MinOptions) -> Result<OptimizerReport> {
    if d_a < 2 || d_b < 2 {
        return invalid("both sides need dimension at least 2");
    }
    minimize_rank_k(m, d_a, d_b, 2, opts)
}

/// (ρ(c,ε)^PT)^{⊗n}, regrouped, with Alice's side dimension dⁿ.
pub fn pt_copies(p: &EpsParams, n: usize, max_dim: usize) -> Result<(ComplexMatrix, usize)> {
    let rho = build_rho_c_eps(p)?;
    let pt = rho.partial_transpose();
    let d = p.d;
    let m = tensor_power(pt.matrix(), d, d, n, max_dim)?;
    Ok((m, d.pow(n as u32)))
}

/// f(c, ε, n): the rank-two minimum on n copies of ρ(c, ε)^PT.
pub fn f_value(p: &EpsParams, n: usize, opts: &MinOptions) -> Result<OptimizerReport> {
    let (m, side) = pt_copies(p, n, opts.max_dim)?;
    min_rank2(&m, side, side, opts)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ThresholdReport {
    pub eps0: f64,
    pub lo: f64,
    pub hi: f64,
    pub evaluations: usize,
}

/// Bisection in ε for the sign change of f(c, ε, n), starting from
/// [0, 1/(d(d−1)) − c] (the far end lies on the line a = 0).
pub fn eps_threshold(d: usize, c: f64, n: usize, opts: &MinOptions) -> Result<ThresholdReport> {
    const WIDTH: f64 = 1e-5;
    EpsParams::new(d, c, 0.0).validate()?;
    let negative = |eps: f64| -> Result<(bool, f64)> {
        let v = f_value(&EpsParams::new(d, c, eps), n, opts)?.min_value;
        Ok((v < -SIGN_TOL, v))
    };
    let (mut lo, mut hi) = (0.0, 1.0 / (d * (d - 1)) as f64 - c);
    let (neg_lo, f_lo) = negative(lo)?;
    let (neg_hi, f_hi) = negative(hi)?;
    if neg_lo || !neg_hi {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }
    let mut evaluations = 2;
    while hi - lo > WIDTH {
        let mid = 0.5 * (lo + hi);
        if negative(mid)?.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        evaluations += 1;
    }
    Ok(ThresholdReport { eps0: 0.5 * (lo + hi), lo, hi, evaluations })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VerdictKind {
    DistillableWitnessFound,
    NoViolationFound,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub witness: Option<RankTwoState>,
    pub margin: f64,
    /// Set for NoViolationFound: a failed search is not a proof.
    pub heuristic: bool,
}

impl Verdict {
    /// Negative below −tol with the report's argmin as the witness.
    pub fn from_report(report: &OptimizerReport, tol: f64) -> Self {
        Self::from_candidate(report.min_value, report.argmin.clone(), tol)
    }

    fn from_candidate(margin: f64, witness: RankTwoState, tol: f64) -> Self {
        if margin < -tol {
            Verdict { kind: VerdictKind::DistillableWitnessFound, witness: Some(witness), margin, heuristic: false }
        } else {
            Verdict { kind: VerdictKind::NoViolationFound, witness: None, margin, heuristic: true }
        }
    }

    pub fn is_violation(&self) -> bool {
        self.kind == VerdictKind::DistillableWitnessFound
    }
}

fn basis(d: usize, k: usize) -> Vec<C64> {
    let mut v = vec![ZERO; d];
    v[k] = C64::new(1.0, 0.0);
    v
}

fn fourier(d: usize, k: usize, sign: f64) -> Vec<C64> {
    let s = 1.0 / (d as f64).sqrt();
    (0..d).map(|j| C64::from_polar(s, sign * TAU * (j * k) as f64 / d as f64)).collect()
}

/// (|00⟩ + |11⟩)/√2.
pub fn witness_w1(d: usize) -> Result<RankTwoState> {
    RankTwoState::rank_two(0.5, [basis(d, 0), basis(d, 1)], [basis(d, 0), basis(d, 1)])
}

/// (s⊗s + t⊗t̄)/√(2d²) with s = Σ_j |j⟩ and t = Σ_j e^{2πij/d} |j⟩. Bob's
/// second factor is the conjugate of Alice's, which makes the vector null
/// for ρ^PT at C.
pub fn witness_w2(d: usize) -> Result<RankTwoState> {
    RankTwoState::rank_two(0.5, [fourier(d, 0, 1.0), fourier(d, 1, 1.0)], [fourier(d, 0, 1.0), fourier(d, 1, -1.0)])
}

/// Evaluates both explicit witnesses on ρ_bc^PT.
pub fn witness_scan(p: &CanonicalParams) -> Result<Verdict> {
    let pt = build_rho_bc_unchecked(p)?.partial_transpose();
    let mut best: Option<(f64, RankTwoState)> = None;
    for w in [witness_w1(p.d)?, witness_w2(p.d)?] {
        let v = rank2_expectation(pt.matrix(), &w)?;
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, w));
        }
    }
    let (margin, w) = best.expect("two witnesses");
    Ok(Verdict::from_candidate(margin, w, 1e-12))
}

#[derive(Clone, Debug, Serialize)]
pub struct OverlapReport {
    pub overlap: f64,
    /// Largest overlap reached by any single restart.
    pub max_restart_overlap: f64,
    pub report: OptimizerReport,
}

/// max |⟨Ψ|v⟩| over unit Schmidt-rank-two v, for maximally entangled Ψ.
pub fn maxent_overlap_max(psi: &PureState, opts: &MinOptions) -> Result<OverlapReport> {
    let d = psi.d_a();
    if psi.d_b() != d || d < 2 {
        return invalid("maximally entangled input must live on d⊗d with d ≥ 2");
    }
    if (psi.norm() - 1.0).abs() > 1e-10 {
        return invalid("input must be a unit vector");
    }
    let s = schmidt(psi)?;
    let target = 1.0 / (d as f64).sqrt();
    if s.rank() != d || s.coefficients.iter().any(|c| (c - target).abs() > 1e-10) {
        return invalid("input is not maximally entangled");
    }
    let m = ComplexMatrix::outer(psi.as_slice()).scale_real(-1.0);
    let report = min_rank2(&m, d, d, opts)?;
    let to_overlap = |v: f64| (-v).max(0.0).sqrt();
    let max_restart_overlap =
        report.restart_values.iter().map(|&v| to_overlap(v)).fold(to_overlap(report.min_value), f64::max);
    Ok(OverlapReport { overlap: to_overlap(report.min_value), max_restart_overlap, report })
}

#[derive(Clone, Debug, Serialize)]
pub struct NullSpaceReport {
    pub null_dim: usize,
    pub min_value: f64,
    pub report: OptimizerReport,
}

/// Null-space dimension of (ρ(c,0)^PT)^{⊗n} and its rank-two minimum.
pub fn null_space_margin(p: &EpsParams, n: usize, opts: &MinOptions) -> Result<NullSpaceReport> {
    if p.eps != 0.0 {
        return invalid("null-space check is defined at eps = 0");
    }
    let (m, side) = pt_copies(p, n, opts.max_dim)?;
    let null_dim = herm_eig(&m)?.values.iter().filter(|v| v.abs() < 1e-12).count();
    let report = min_rank2(&m, side, side, opts)?;
    Ok(NullSpaceReport { null_dim, min_value: report.min_value, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{build_rho_bc, build_werner, region_points};
    use crate::qmat::max_entangled;

    fn opts() -> MinOptions {
        MinOptions::with_seed(7).restarts(16)
    }

    #[test]
    fn identity_expectation_is_one() {
        let w = witness_w2(3).unwrap();
        assert!((rank2_expectation(&ComplexMatrix::identity(9), &w).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn werner_at_one_with_w1() {
        // λ − (λ+1)|⟨Φ₀|w₁⟩|² = 1 − 2·(2/3)
        let m = build_werner(3, 1.0).unwrap().partial_transpose();
        let v = rank2_expectation(m.matrix(), &witness_w1(3).unwrap()).unwrap();
        assert!((v + 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn werner_minimum() {
        let m = build_werner(3, 1.0).unwrap().partial_transpose();
        let rep = min_rank2(m.matrix(), 3, 3, &opts()).unwrap();
        assert!((rep.min_value + 1.0 / 3.0).abs() < 1e-8, "{}", rep.min_value);
        let m2 = build_werner(3, 2.0).unwrap().partial_transpose();
        let rep2 = min_rank2(m2.matrix(), 3, 3, &opts()).unwrap();
        assert!(rep2.min_value.abs() < 1e-8);
    }

    #[test]
    fn ppt_point_k_is_nonnegative() {
        let pts = region_points(3).unwrap();
        let pt = build_rho_bc(&CanonicalParams::new(3, pts.k.0, pts.k.1)).unwrap().partial_transpose();
        for w in [witness_w1(3).unwrap(), witness_w2(3).unwrap()] {
            assert!(rank2_expectation(pt.matrix(), &w).unwrap() >= -1e-15);
        }
    }

    #[test]
    fn explicit_witnesses() {
        let f = witness_scan(&CanonicalParams::new(3, 1.0 / 3.0, 0.0)).unwrap();
        assert!(f.is_violation());
        let near_c = witness_scan(&CanonicalParams::new(3, 4.0 / 21.0 + 0.002, 0.001)).unwrap();
        assert!(near_c.is_violation());
        let g = witness_scan(&CanonicalParams::new(3, 0.2, 1.0 / 15.0)).unwrap();
        assert!(!g.is_violation() && g.heuristic);
        // w₂ vanishes at C.
        let pt = build_rho_bc(&CanonicalParams::new(3, 4.0 / 21.0, 0.0)).unwrap().partial_transpose();
        assert!(rank2_expectation(pt.matrix(), &witness_w2(3).unwrap()).unwrap().abs() < 1e-15);
    }

    #[test]
    fn one_copy_f_values() {
        let b = f_value(&EpsParams::new(3, 0.0, 0.0), 1, &opts()).unwrap();
        assert!(b.min_value > 1e-6);
        let c = f_value(&EpsParams::new(3, 0.0, 1.0 / 42.0), 1, &opts()).unwrap();
        assert!(c.min_value.abs() < 1e-7, "{}", c.min_value);
    }

    #[test]
    fn overlap_bound() {
        for (d, want) in [(2, 1.0), (3, (2.0f64 / 3.0).sqrt()), (5, 0.4f64.sqrt())] {
            let r = maxent_overlap_max(&max_entangled(d, 0).unwrap(), &opts()).unwrap();
            assert!((r.overlap - want).abs() < 1e-6, "d={d}: {}", r.overlap);
            assert!(r.max_restart_overlap <= want + 1e-8);
        }
        let prod = PureState::new(vec![C64::new(1.0, 0.0), ZERO, ZERO, ZERO], 2, 2).unwrap();
        assert!(maxent_overlap_max(&prod, &opts()).is_err());
    }

    #[test]
    fn null_space_one_copy() {
        let r = null_space_margin(&EpsParams::new(3, 0.0, 0.0), 1, &opts()).unwrap();
        assert_eq!(r.null_dim, 1);
        assert!(r.min_value > 0.0);
        assert!(null_space_margin(&EpsParams::new(3, 0.0, 0.01), 1, &opts()).is_err());
    }

    #[test]
    fn threshold_one_copy_at_c() {
        let t = eps_threshold(3, 0.0, 1, &opts()).unwrap();
        assert!((t.eps0 - 1.0 / 42.0).abs() < 2e-4, "{}", t.eps0);
        assert!(t.hi - t.lo <= 1e-5);
    }
}
