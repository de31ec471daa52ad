//! Explicit product-state ensembles for the PPT corner of the ρ_bc family.
//!
//! Member vectors are stored unnormalized; each member contributes
//! w·|α⟩⟨α|⊗|β⟩⟨β| / (‖α‖²‖β‖²), so the weights are probabilities.

use std::f64::consts::PI;

use serde::Serialize;

use crate::canonical::{build_rho_bc, classify_region, region_points, CanonicalParams, RegionLabel};
use crate::error::{invalid, Error, Result};
use crate::qmat::{kron_vec, norm, BipartiteState, ComplexMatrix, C64, ONE, ZERO};

/// Largest d for which the 3^d-member J ensemble is built.
pub const MAX_J_DIM: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductMember {
    pub weight: f64,
    pub alice: Vec<C64>,
    pub bob: Vec<C64>,
}

impl ProductMember {
    /// |α⟩⟨α|⊗|β⟩⟨β| with unit trace.
    pub fn projector(&self) -> ComplexMatrix {
        let v = kron_vec(&self.alice, &self.bob);
        let n = norm(&v);
        ComplexMatrix::outer(&v).scale_real(1.0 / (n * n))
    }
}

/// Product ensemble with consistent local dimensions and nonzero vectors.
/// Weight validity is checked separately, so a damaged ensemble can still
/// be loaded and diagnosed by [`verify_separable`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductEnsemble {
    members: Vec<ProductMember>,
}

impl ProductEnsemble {
    pub fn new(members: Vec<ProductMember>) -> Result<Self> {
        let Some(first) = members.first() else {
            return invalid("ensemble has no members");
        };
        let (d_a, d_b) = (first.alice.len(), first.bob.len());
        for (i, m) in members.iter().enumerate() {
            if m.alice.len() != d_a || m.bob.len() != d_b {
                return invalid(format!("member {i} has local dimensions ({}, {})", m.alice.len(), m.bob.len()));
            }
            let finite = m.alice.iter().chain(&m.bob).all(|z| z.re.is_finite() && z.im.is_finite());
            if !finite || norm(&m.alice) == 0.0 || norm(&m.bob) == 0.0 {
                return invalid(format!("member {i} has a zero or non-finite vector"));
            }
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[ProductMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn d_a(&self) -> usize {
        self.members[0].alice.len()
    }

    pub fn d_b(&self) -> usize {
        self.members[0].bob.len()
    }

    /// Index of the first member with a non-positive or non-finite weight.
    pub fn bad_weight(&self) -> Option<usize> {
        self.members.iter().position(|m| !(m.weight > 0.0) || !m.weight.is_finite())
    }

    pub fn weight_sum(&self) -> f64 {
        self.members.iter().map(|m| m.weight).sum()
    }

    /// Σ wᵢ Pᵢ without any normalization.
    fn mixture(&self) -> ComplexMatrix {
        let n = self.d_a() * self.d_b();
        let mut acc = ComplexMatrix::zeros(n, n);
        for m in &self.members {
            acc = &acc + &m.projector().scale_real(m.weight);
        }
        acc
    }

    /// Conjugates every Bob vector, which partially transposes the mixture.
    pub fn conjugate_bob(&self) -> Self {
        let members = self
            .members
            .iter()
            .map(|m| ProductMember { bob: m.bob.iter().map(|z| z.conj()).collect(), ..m.clone() })
            .collect();
        Self { members }
    }

    fn scaled(&self, s: f64) -> impl Iterator<Item = ProductMember> + '_ {
        self.members.iter().map(move |m| ProductMember { weight: m.weight * s, ..m.clone() })
    }
}

fn check_weights(e: &ProductEnsemble) -> Result<()> {
    if let Some(i) = e.bad_weight() {
        return invalid(format!("member {i} has weight {}", e.members[i].weight));
    }
    let s = e.weight_sum();
    if (s - 1.0).abs() > 1e-12 {
        return invalid(format!("weights sum to {s}"));
    }
    Ok(())
}

/// Σ wᵢ |αᵢ⟩⟨αᵢ|⊗|βᵢ⟩⟨βᵢ| for an ensemble with valid weights.
pub fn ensemble_to_density(e: &ProductEnsemble) -> Result<BipartiteState> {
    check_weights(e)?;
    BipartiteState::normalized(e.mixture().hermitian_part(), e.d_a(), e.d_b())
}

fn equal_weights(pairs: Vec<(Vec<C64>, Vec<C64>)>) -> Result<ProductEnsemble> {
    let w = 1.0 / pairs.len() as f64;
    ProductEnsemble::new(pairs.into_iter().map(|(alice, bob)| ProductMember { weight: w, alice, bob }).collect())
}

fn basis(d: usize, i: usize) -> Vec<C64> {
    let mut v = vec![ZERO; d];
    v[i] = ONE;
    v
}

fn omega(k: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * k as f64 / 3.0)
}

fn check_dim(d: usize) -> Result<()> {
    if d < 3 {
        return invalid(format!("corner ensembles need d ≥ 3, got {d}"));
    }
    Ok(())
}

/// Point A: equal mixture of |ii⟩.
pub fn decomposition_a(d: usize) -> Result<ProductEnsemble> {
    check_dim(d)?;
    equal_weights((0..d).map(|i| (basis(d, i), basis(d, i))).collect())
}

/// Point K: equal mixture of |ij⟩ with i ≠ j.
pub fn decomposition_k(d: usize) -> Result<ProductEnsemble> {
    check_dim(d)?;
    let pairs = (0..d).flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (basis(d, i), basis(d, j))));
    equal_weights(pairs.collect())
}

/// Point B: (−|i⟩ + ωᵏ|j⟩) ⊗ (|i⟩ + ωᵏ|j⟩) for i < j and k = 0, 1, 2.
pub fn decomposition_b(d: usize) -> Result<ProductEnsemble> {
    check_dim(d)?;
    let mut pairs = Vec::with_capacity(3 * d * (d - 1) / 2);
    for i in 0..d {
        for j in i + 1..d {
            for k in 0..3 {
                let mut a = vec![ZERO; d];
                let mut b = vec![ZERO; d];
                a[i] = -ONE;
                a[j] = omega(k);
                b[i] = ONE;
                b[j] = omega(k);
                pairs.push((a, b));
            }
        }
    }
    equal_weights(pairs)
}

/// Point J: (Σⱼ ω^{kⱼ}|j⟩) ⊗ (Σⱼ ω^{kⱼ}|j⟩) over all k ∈ {0,1,2}^d.
///
/// With the Bob phases conjugated this is the ensemble of ρ^PT at J.
pub fn decomposition_j(d: usize) -> Result<ProductEnsemble> {
    check_dim(d)?;
    if d > MAX_J_DIM {
        return Err(Error::SizeLimit { requested: d, limit: MAX_J_DIM });
    }
    let count = 3usize.pow(d as u32);
    let pairs = (0..count)
        .map(|mut idx| {
            let v: Vec<C64> = (0..d)
                .map(|_| {
                    let k = idx % 3;
                    idx /= 3;
                    omega(k)
                })
                .collect();
            (v.clone(), v)
        })
        .collect();
    equal_weights(pairs)
}

fn barycentric(p: (f64, f64), t: [(f64, f64); 3]) -> [f64; 3] {
    let [a, b, c] = t;
    let det = (b.0 - a.0) * (c.1 - a.1) - (c.0 - a.0) * (b.1 - a.1);
    let l1 = ((p.0 - a.0) * (c.1 - a.1) - (c.0 - a.0) * (p.1 - a.1)) / det;
    let l2 = ((b.0 - a.0) * (p.1 - a.1) - (p.0 - a.0) * (b.1 - a.1)) / det;
    [1.0 - l1 - l2, l1, l2]
}

/// Separable ensemble for a PPT point of the ρ_bc family, mixing the corner
/// ensembles with barycentric weights over triangle ABK or AKJ. Points on
/// the diagonal AK use ABK.
pub fn decompose_ppt_point(p: &CanonicalParams) -> Result<ProductEnsemble> {
    if classify_region(p)? != RegionLabel::SeparablePPT {
        return invalid(format!("(b, c) = ({}, {}) lies outside ABKJ", p.b, p.c));
    }
    let pts = region_points(p.d)?;
    let q = (p.b, p.c);
    let abk = barycentric(q, [pts.a, pts.b, pts.k]);
    let (coords, corners) = if abk.iter().all(|&x| x >= -1e-12) {
        (abk, [decomposition_a(p.d)?, decomposition_b(p.d)?, decomposition_k(p.d)?])
    } else {
        (barycentric(q, [pts.a, pts.k, pts.j]), [decomposition_a(p.d)?, decomposition_k(p.d)?, decomposition_j(p.d)?])
    };
    if coords.iter().any(|&x| x < -1e-9) {
        return invalid(format!("(b, c) = ({}, {}) lies outside ABKJ", p.b, p.c));
    }
    let clamped = coords.map(|x| x.max(0.0));
    let total: f64 = clamped.iter().sum();
    let members =
        clamped.iter().zip(&corners).filter(|(&w, _)| w > 0.0).flat_map(|(&w, e)| e.scaled(w / total)).collect();
    ProductEnsemble::new(members)
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparabilityReport {
    pub passed: bool,
    pub tol: f64,
    /// Max-entry distance between the mixture and the target.
    pub max_error: f64,
    pub weights_ok: bool,
    pub weight_sum: f64,
    pub product_ok: bool,
    /// Member blamed for the failure, when one can be singled out.
    pub bad_member: Option<usize>,
    pub members: usize,
}

/// Checks that `e` reproduces `rho` within `tol`.
///
/// On a reconstruction failure, the member whose reweighting alone removes
/// the residual is reported.
pub fn verify_separable(e: &ProductEnsemble, rho: &BipartiteState, tol: f64) -> SeparabilityReport {
    let product_ok = e.d_a() == rho.d_a() && e.d_b() == rho.d_b();
    let weight_sum = e.weight_sum();
    let mut bad_member = e.bad_weight();
    let weights_ok = bad_member.is_none() && (weight_sum - 1.0).abs() <= tol.max(1e-12);
    let max_error = if product_ok { e.mixture().max_abs_diff(rho.matrix()) } else { f64::INFINITY };
    if product_ok && bad_member.is_none() && max_error > tol {
        bad_member = locate(e, rho, tol);
    }
    SeparabilityReport {
        passed: product_ok && weights_ok && max_error <= tol,
        tol,
        max_error,
        weights_ok,
        weight_sum,
        product_ok,
        bad_member,
        members: e.len(),
    }
}

fn locate(e: &ProductEnsemble, rho: &BipartiteState, tol: f64) -> Option<usize> {
    let residual = &e.mixture() - rho.matrix();
    e.members.iter().enumerate().find_map(|(i, m)| {
        let p = m.projector();
        let pp: f64 = p.as_slice().iter().map(|z| z.norm_sqr()).sum();
        let rp: f64 = p.as_slice().iter().zip(residual.as_slice()).map(|(x, y)| (x.conj() * y).re).sum();
        let fixed = &residual - &p.scale_real(rp / pp);
        (fixed.max_abs() <= tol).then_some(i)
    })
}

/// Corner state and ensemble by label ("A", "B", "J" or "K").
pub fn corner_certificate(d: usize, label: &str) -> Result<(BipartiteState, ProductEnsemble)> {
    let pts = region_points(d)?;
    let e = match label.to_ascii_uppercase().as_str() {
        "A" => decomposition_a(d)?,
        "B" => decomposition_b(d)?,
        "J" => decomposition_j(d)?,
        "K" => decomposition_k(d)?,
        _ => return invalid(format!("no certificate for point {label:?}; expected A, B, J or K")),
    };
    let p = pts.get(label).expect("corner labels are in the catalog");
    Ok((build_rho_bc(&p)?, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{build_rho_c_eps, pt_spectrum, EpsParams};
    use crate::qmat::herm_eig;

    fn rank(m: &ComplexMatrix) -> usize {
        herm_eig(m).unwrap().values.iter().filter(|&&v| v.abs() > 1e-10).count()
    }

    #[test]
    fn single_member() {
        let e =
            ProductEnsemble::new(vec![ProductMember { weight: 1.0, alice: basis(2, 0), bob: basis(2, 0) }]).unwrap();
        let rho = ensemble_to_density(&e).unwrap();
        assert_eq!(rho.matrix()[(0, 0)], ONE);
        assert!((rho.trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn corners_reconstruct() {
        for d in 3..=5 {
            for label in ["A", "B", "J", "K"] {
                let (rho, e) = corner_certificate(d, label).unwrap();
                let r = verify_separable(&e, &rho, 1e-12);
                assert!(r.passed, "d={d} {label}: {r:?}");
            }
        }
    }

    #[test]
    fn b_matches_eps_family() {
        let e = decomposition_b(4).unwrap();
        assert_eq!(e.len(), 18);
        let want = build_rho_c_eps(&EpsParams::new(4, 0.0, 0.0)).unwrap();
        assert!(ensemble_to_density(&e).unwrap().matrix().max_abs_diff(want.matrix()) < 1e-12);
        assert!(e
            .members()
            .iter()
            .all(|m| (norm(&m.alice).powi(2) - 2.0).abs() < 1e-15 && (norm(&m.bob).powi(2) - 2.0).abs() < 1e-15));
        assert_eq!(decomposition_b(3).unwrap().len(), 9);
    }

    #[test]
    fn pt_ensembles() {
        let (rho, e) = corner_certificate(3, "J").unwrap();
        assert_eq!(e.len(), 27);
        let pt = ensemble_to_density(&e.conjugate_bob()).unwrap();
        assert!(pt.matrix().max_abs_diff(rho.partial_transpose().matrix()) < 1e-12);
        assert!(pt_spectrum(&region_points(3).unwrap().get("J").unwrap()).lambda1.abs() < 1e-15);
        let (rho_b, e_b) = corner_certificate(3, "B").unwrap();
        let pt_b = ensemble_to_density(&e_b.conjugate_bob()).unwrap();
        assert!(pt_b.matrix().max_abs_diff(rho_b.partial_transpose().matrix()) < 1e-12);
    }

    #[test]
    fn ranks_at_b() {
        let (rho, _) = corner_certificate(3, "B").unwrap();
        assert_eq!(rank(rho.matrix()), 6);
        assert_eq!(rank(rho.partial_transpose().matrix()), 8);
    }

    #[test]
    fn j_size_guard() {
        assert!(matches!(decomposition_j(9), Err(Error::SizeLimit { .. })));
        assert!(decomposition_b(2).is_err());
    }

    #[test]
    fn barycentric_mixing() {
        let pts = region_points(3).unwrap();
        let a = decompose_ppt_point(&CanonicalParams::new(3, 0.0, 0.0)).unwrap();
        assert_eq!(a, decomposition_a(3).unwrap());
        let mid = CanonicalParams::new(3, pts.b.0, pts.k.1 / 2.0);
        let e = decompose_ppt_point(&mid).unwrap();
        let wb: f64 = e.members()[..9].iter().map(|m| m.weight).sum();
        let wk: f64 = e.members()[9..].iter().map(|m| m.weight).sum();
        assert!((wb - 0.5).abs() < 1e-12 && (wk - 0.5).abs() < 1e-12 && e.len() == 15);
        let p = CanonicalParams::new(3, 0.1, 0.1);
        let r = verify_separable(&decompose_ppt_point(&p).unwrap(), &build_rho_bc(&p).unwrap(), 1e-11);
        assert!(r.passed, "{r:?}");
        assert!(decompose_ppt_point(&CanonicalParams::new(3, 0.2, 1.0 / 15.0)).is_err());
    }

    #[test]
    fn corrupted_weight_is_located() {
        let (rho, e) = corner_certificate(3, "B").unwrap();
        let mut members = e.members().to_vec();
        members[4].weight *= 1.5;
        let r = verify_separable(&ProductEnsemble::new(members.clone()).unwrap(), &rho, 1e-12);
        assert!(!r.passed && r.bad_member == Some(4));
        members[4].weight = -0.1;
        let r = verify_separable(&ProductEnsemble::new(members).unwrap(), &rho, 1e-12);
        assert!(!r.passed && !r.weights_ok && r.bad_member == Some(4));
    }

    #[test]
    fn npt_target_fails() {
        let g = build_rho_bc(&region_points(3).unwrap().get("G").unwrap()).unwrap();
        let r = verify_separable(&decomposition_a(3).unwrap(), &g, 1e-12);
        assert!(!r.passed && r.bad_member.is_none());
    }
}
