//! Linear maps on matrices through their Choi matrices, and k-positivity.
//!
//! Convention: Choi(Λ) = Σ_ij |i⟩⟨j| ⊗ Λ(|i⟩⟨j|) = (1⊗Λ)(d·|Φ⁺⟩⟨Φ⁺|),
//! so block (i, j) of the Choi matrix is Λ(|i⟩⟨j|). A state ρ on d⊗d
//! corresponds to the map with Choi matrix d·ρ.
//!
//! Λ is k-positive exactly when ⟨v|Choi(Λ)|v⟩ ≥ 0 for every v of Schmidt
//! rank ≤ k, which is what [`is_k_positive`] searches.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::canonical::{build_rho_bc_unchecked, CanonicalParams};
use crate::distill::{bob_step, minimize_rank_k, svd, LowRankState, MinOptions, Shape, STALL_COUNT};
use crate::error::{invalid, Error, Result};
use crate::qmat::{haar_frame, herm_eig, inner, norm, BipartiteState, ComplexMatrix, PureState, Subsystem, C64, ZERO};

/// Margins below −VIOLATION_TOL count as violations.
pub const VIOLATION_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMap {
    d_in: usize,
    d_out: usize,
    choi: ComplexMatrix,
}

impl ChoiMap {
    pub fn new(d_in: usize, d_out: usize, choi: ComplexMatrix) -> Result<Self> {
        if d_in == 0 || d_out == 0 || choi.rows() != d_in * d_out || choi.cols() != d_in * d_out {
            return invalid(format!("{}x{} Choi matrix does not match {d_in}→{d_out}", choi.rows(), choi.cols()));
        }
        let defect = choi.hermitian_defect();
        if defect > 1e-12 * choi.max_abs().max(1.0) {
            return invalid(format!("Choi matrix is not Hermitian (defect {defect:e})"));
        }
        Ok(Self { d_in, d_out, choi: choi.hermitian_part() })
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::from_fn(d, d, |x| x.clone())
    }

    pub fn transpose(d: usize) -> Result<Self> {
        Self::from_fn(d, d, |x| x.transpose())
    }

    /// Choi matrix of the map defined by its action on matrix units.
    pub fn from_fn(d_in: usize, d_out: usize, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Result<Self> {
        let mut choi = ComplexMatrix::zeros(d_in * d_out, d_in * d_out);
        for i in 0..d_in {
            for j in 0..d_in {
                let mut e = ComplexMatrix::zeros(d_in, d_in);
                e[(i, j)] = C64::new(1.0, 0.0);
                let out = f(&e);
                if out.rows() != d_out || out.cols() != d_out {
                    return invalid("map output has the wrong dimension");
                }
                for k in 0..d_out {
                    for l in 0..d_out {
                        choi[(i * d_out + k, j * d_out + l)] = out[(k, l)];
                    }
                }
            }
        }
        Self::new(d_in, d_out, choi)
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    /// Λ(|i⟩⟨j|).
    pub fn block(&self, i: usize, j: usize) -> ComplexMatrix {
        let d = self.d_out;
        ComplexMatrix::from_fn(d, d, |k, l| self.choi[(i * d + k, j * d + l)])
    }

    /// Completely positive iff the Choi matrix is PSD (within `tol`).
    pub fn is_completely_positive(&self, tol: f64) -> Result<bool> {
        Ok(herm_eig(&self.choi)?.values[0] >= -tol)
    }
}

/// Map whose Choi matrix is d·ρ.
pub fn state_to_map(rho: &BipartiteState) -> Result<ChoiMap> {
    if rho.d_a() != rho.d_b() {
        return invalid(format!("state on {}⊗{} is not on d⊗d", rho.d_a(), rho.d_b()));
    }
    ChoiMap::new(rho.d_a(), rho.d_b(), rho.matrix().scale_real(rho.d_a() as f64))
}

/// Choi / d_in as a bipartite operator.
pub fn map_to_state(map: &ChoiMap) -> Result<BipartiteState> {
    let m = map.choi.scale_real(1.0 / map.d_in as f64);
    if (m.trace().re - 1.0).abs() <= 1e-12 {
        BipartiteState::normalized(m, map.d_in, map.d_out)
    } else {
        BipartiteState::unnormalized(m, map.d_in, map.d_out)
    }
}

/// Λ(X) = Σ_ij X_ij Λ(|i⟩⟨j|).
pub fn map_apply(map: &ChoiMap, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (di, d) = (map.d_in, map.d_out);
    if x.rows() != di || x.cols() != di {
        return invalid(format!("map takes {di}x{di} inputs, got {}x{}", x.rows(), x.cols()));
    }
    let mut out = ComplexMatrix::zeros(d, d);
    for i in 0..di {
        for j in 0..di {
            let w = x[(i, j)];
            if w == ZERO {
                continue;
            }
            for k in 0..d {
                for l in 0..d {
                    out[(k, l)] += w * map.choi[(i * d + k, j * d + l)];
                }
            }
        }
    }
    Ok(out)
}

/// (1_m ⊗ Λ)(Y) for Y on C^m ⊗ C^{d_in}.
pub fn apply_extended(map: &ChoiMap, m: usize, y: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (di, d) = (map.d_in, map.d_out);
    if y.rows() != m * di || y.cols() != m * di {
        return invalid("input does not act on C^m ⊗ C^d_in");
    }
    let mut out = ComplexMatrix::zeros(m * d, m * d);
    for a in 0..m {
        for b in 0..m {
            let blk = ComplexMatrix::from_fn(di, di, |i, j| y[(a * di + i, b * di + j)]);
            let img = map_apply(map, &blk)?;
            for k in 0..d {
                for l in 0..d {
                    out[(a * d + k, b * d + l)] = img[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Choi matrix of T∘S: each block transposed.
pub fn compose_transpose(s: &ChoiMap) -> Result<ChoiMap> {
    let d = s.d_out;
    let n = s.d_in * d;
    let choi = ComplexMatrix::from_fn(n, n, |r, c| {
        let (i, k, j, l) = (r / d, r % d, c / d, c % d);
        s.choi[(i * d + l, j * d + k)]
    });
    ChoiMap::new(s.d_in, d, choi)
}

/// τ_W(X) = dλ·Tr(X)·1 − (λ+1)X.
pub fn tau_w(d: usize, lambda: f64) -> Result<ChoiMap> {
    if d < 2 || !(lambda > 0.0) || !lambda.is_finite() {
        return invalid(format!("tau_W needs d ≥ 2 and lambda > 0 (got {d}, {lambda})"));
    }
    let scale = d as f64 * lambda;
    ChoiMap::from_fn(d, d, |x| {
        let tr = x.trace();
        let mut out = x.scale_real(-(lambda + 1.0));
        for k in 0..d {
            out[(k, k)] += tr * scale;
        }
        out
    })
}

/// Choi(Λ₁⊗Λ₂) indexed (in₁ in₂)(out₁ out₂).
pub fn tensor_maps(m1: &ChoiMap, m2: &ChoiMap, max_dim: usize) -> Result<ChoiMap> {
    let (i1, o1, i2, o2) = (m1.d_in, m1.d_out, m2.d_in, m2.d_out);
    let total = i1 * i2 * o1 * o2;
    if total > max_dim {
        return Err(Error::SizeLimit { requested: total, limit: max_dim });
    }
    let (d_in, d_out) = (i1 * i2, o1 * o2);
    let choi = ComplexMatrix::from_fn(total, total, |r, c| {
        let (ri, ro) = (r / d_out, r % d_out);
        let (ci, co) = (c / d_out, c % d_out);
        let a = m1.choi[((ri / i2) * o1 + ro / o2, (ci / i2) * o1 + co / o2)];
        let b = m2.choi[((ri % i2) * o2 + ro % o2, (ci % i2) * o2 + co % o2)];
        a * b
    });
    ChoiMap::new(d_in, d_out, choi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PositivityResult {
    ViolationFound,
    NoViolationFound,
}

#[derive(Clone, Debug, Serialize)]
pub struct PositivityVerdict {
    pub k: usize,
    pub result: PositivityResult,
    /// Input whose image under 1⊗Λ has eigenvalue `margin`; kept for violations.
    pub witness: Option<PureState>,
    /// Smallest output eigenvalue reached over the searched inputs.
    pub margin: f64,
    /// Set for NoViolationFound: a failed search is not a proof.
    pub heuristic: bool,
    pub restarts: usize,
    pub seed: u64,
}

impl PositivityVerdict {
    pub fn is_violation(&self) -> bool {
        self.result == PositivityResult::ViolationFound
    }

    fn new(k: usize, margin: f64, witness: PureState, restarts: usize, seed: u64) -> Self {
        let violation = margin < -VIOLATION_TOL;
        PositivityVerdict {
            k,
            result: if violation { PositivityResult::ViolationFound } else { PositivityResult::NoViolationFound },
            witness: violation.then_some(witness),
            margin,
            heuristic: !violation,
            restarts,
            seed,
        }
    }
}

/// ψ = (1/√k) Σ_j P|j⟩ ⊗ |j⟩ with P the projector onto span{a_r}.
fn input_from_support(a_vecs: &[Vec<C64>], d: usize) -> Result<PureState> {
    let k = a_vecs.len();
    let mut v = vec![ZERO; d * d];
    for a in a_vecs {
        for i in 0..d {
            for j in 0..d {
                // P = Σ_r |a_r⟩⟨a_r|, P|j⟩ = Σ_r a_r conj(a_r[j])
                v[i * d + j] += a[i] * a[j].conj();
            }
        }
    }
    let s = 1.0 / (k as f64).sqrt();
    PureState::new(v.into_iter().map(|z| z * s).collect(), d, d)
}

/// Smallest eigenvalue of (1⊗Λ)(|ψ⟩⟨ψ|) for a unit input ψ on d_in⊗d_in.
pub fn output_min_eigenvalue(map: &ChoiMap, psi: &PureState) -> Result<f64> {
    if psi.d_a() != map.d_in || psi.d_b() != map.d_in {
        return invalid("input must live on d_in ⊗ d_in");
    }
    let y = ComplexMatrix::outer(psi.normalized().as_slice());
    Ok(herm_eig(&apply_extended(map, map.d_in, &y)?)?.values[0])
}

/// Search for a Schmidt-rank-≤k input ψ with (1⊗Λ)(|ψ⟩⟨ψ|) not PSD.
///
/// The see-saw minimizes ⟨v|Choi|v⟩ over rank-≤k v. The reported margin is
/// the smallest output eigenvalue for the input built from the Alice
/// support of the best v, so a violation is reproducible from the witness.
pub fn is_k_positive(map: &ChoiMap, k: usize, opts: &MinOptions) -> Result<PositivityVerdict> {
    if k == 0 || k > map.d_in {
        return invalid(format!("order k = {k} outside 1..={}", map.d_in));
    }
    let report = minimize_rank_k(&map.choi, map.d_in, map.d_out, k, opts)?;
    let support = support_of(&report.argmin, k, map.d_in);
    let psi = input_from_support(&support, map.d_in)?;
    let margin = output_min_eigenvalue(map, &psi)?;
    Ok(PositivityVerdict::new(k, margin, psi, report.restarts, opts.seed))
}

/// The top-k Alice Schmidt vectors, completed with basis vectors when the
/// optimizer reports fewer (the exact path can return rank min(d_in, d_out)).
fn support_of(state: &LowRankState, k: usize, d: usize) -> Vec<Vec<C64>> {
    let mut vecs: Vec<Vec<C64>> = state.a_vecs.iter().take(k).cloned().collect();
    if vecs.len() < k {
        for e in haar_frame(d, d, &mut ChaCha8Rng::seed_from_u64(0)) {
            if vecs.len() == k {
                break;
            }
            let mut v = e;
            for u in &vecs {
                let p = inner(u, &v);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= p * y;
                }
            }
            let n = norm(&v);
            vecs.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    vecs
}

/// D(β) = ½ Σ_ab |a⟩⟨b| ⊗ Λ(|β_a⟩⟨β_b|), the image of the normalized
/// Ψ^β = (|0,β₀⟩ + |1,β₁⟩)/√2.
pub fn maxent_output(map: &ChoiMap, beta: &[Vec<C64>; 2]) -> Result<ComplexMatrix> {
    let d = map.d_out;
    let mut out = ComplexMatrix::zeros(2 * d, 2 * d);
    for a in 0..2 {
        for b in 0..2 {
            let x = ComplexMatrix::from_fn(map.d_in, map.d_in, |i, j| beta[a][i] * beta[b][j].conj() * 0.5);
            let img = map_apply(map, &x)?;
            for k in 0..d {
                for l in 0..d {
                    out[(a * d + k, b * d + l)] = img[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Ψ^β as a unit vector on 2⊗d_in.
pub fn maxent_input(beta: &[Vec<C64>; 2]) -> Result<PureState> {
    let d = beta[0].len();
    let s = 1.0 / 2f64.sqrt();
    let v: Vec<C64> = (0..2).flat_map(|a| beta[a].iter().map(move |z| z * s)).collect();
    PureState::new(v, 2, d)
}

/// 2-positivity search restricted to maximally entangled rank-two inputs Ψ^β.
///
/// Each iteration forms D(β) literally from map applications and takes its
/// lowest eigenvector x. The output-side plane of x feeds an exact
/// eigenproblem on the Choi matrix, whose input-side plane gives the next β.
pub fn is_2_positive_maxent(map: &ChoiMap, opts: &MinOptions) -> Result<PositivityVerdict> {
    let (di, d) = (map.d_in, map.d_out);
    if di < 2 {
        return invalid("2-positivity needs input dimension at least 2");
    }
    if opts.restarts == 0 {
        return invalid("at least one restart is required");
    }
    let shape = Shape { d_a: di, d_b: d, k: 2 };
    let mut best: Option<(f64, [Vec<C64>; 2])> = None;
    for r in 0..opts.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(r as u64);
        let f = haar_frame(di, 2, &mut rng);
        let mut beta = [f[0].clone(), f[1].clone()];
        let mut run_best: Option<(f64, [Vec<C64>; 2])> = None;
        let mut stalls = 0;
        for _ in 0..opts.max_iters.max(1) {
            let e = herm_eig(&maxent_output(map, &beta)?)?;
            let value = e.values[0];
            let prev = run_best.as_ref().map_or(f64::INFINITY, |(v, _)| *v);
            if value < prev {
                run_best = Some((value, beta.clone()));
            }
            stalls = if prev - value < opts.tol { stalls + 1 } else { 0 };
            if stalls >= STALL_COUNT {
                break;
            }
            let x = e.vector(0);
            let (_, _, v_t) = svd(2, d, &x)?;
            let bob: Vec<Vec<C64>> = (0..2.min(d)).map(|r| (0..d).map(|j| v_t[(r, j)]).collect()).collect();
            if bob.len() < 2 {
                break;
            }
            let (_, alice, _) = bob_step(&map.choi, &shape, &bob)?;
            beta = [alice[0].iter().map(|z| z.conj()).collect(), alice[1].iter().map(|z| z.conj()).collect()];
        }
        let (v, b) = run_best.expect("at least one iteration");
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, b));
        }
    }
    let (margin, beta) = best.expect("at least one restart");
    Ok(PositivityVerdict::new(2, margin, maxent_input(&beta)?, opts.restarts, opts.seed))
}

/// Λ_c(X) = Tr(X)·1 − X applied to Bob's side: ρ_A ⊗ 1 − ρ.
pub fn lambda_c_apply(rho: &BipartiteState) -> Result<BipartiteState> {
    let ra = rho.partial_trace(Subsystem::A);
    let out = &ra.kron(&ComplexMatrix::identity(rho.d_b()))? - rho.matrix();
    BipartiteState::unnormalized(out, rho.d_a(), rho.d_b())
}

/// Parameters of (1⊗Λ_c)(ρ_bc) after normalization:
/// b″ = (1/d − b)/(d−1), c″ = (1/d − c)/(d−1).
pub fn lambda_c_image(p: &CanonicalParams) -> Result<CanonicalParams> {
    if p.d < 3 {
        return invalid("the Λ_c image is only used for d > 2");
    }
    let d = p.d as f64;
    Ok(CanonicalParams::new(p.d, (1.0 / d - p.b) / (d - 1.0), (1.0 / d - p.c) / (d - 1.0)))
}

/// Λ_bc = T∘S_bc as a map, from the state ρ_bc.
pub fn lambda_bc(p: &CanonicalParams) -> Result<ChoiMap> {
    compose_transpose(&state_to_map(&build_rho_bc_unchecked(p)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{build_rho_bc, pt_spectrum};
    use crate::qmat::max_entangled;

    fn unit(d: usize, i: usize, j: usize) -> ComplexMatrix {
        let mut e = ComplexMatrix::zeros(d, d);
        e[(i, j)] = C64::new(1.0, 0.0);
        e
    }

    fn opts() -> MinOptions {
        MinOptions::with_seed(3).restarts(16)
    }

    #[test]
    fn maxent_state_gives_identity_map() {
        let s = state_to_map(&max_entangled(3, 0).unwrap().projector()).unwrap();
        let x = ComplexMatrix::from_fn(3, 3, |i, j| C64::new(i as f64, j as f64));
        assert!(map_apply(&s, &x).unwrap().max_abs_diff(&x) < 1e-15);
        assert!(s.choi().max_abs_diff(ChoiMap::identity(3).unwrap().choi()) < 1e-15);
    }

    #[test]
    fn maximally_mixed_is_depolarizing() {
        let rho = BipartiteState::normalized(ComplexMatrix::identity(9).scale_real(1.0 / 9.0), 3, 3).unwrap();
        let s = state_to_map(&rho).unwrap();
        let x = ComplexMatrix::from_fn(3, 3, |i, j| C64::new((i + j) as f64, 0.0));
        let want = ComplexMatrix::identity(3).scale(x.trace() / 3.0);
        assert!(map_apply(&s, &x).unwrap().max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn s_bc_action() {
        let p = CanonicalParams::new(3, 0.2, 0.05);
        let s = state_to_map(&build_rho_bc(&p).unwrap()).unwrap();
        // Choi = d·ρ, so each coefficient carries a factor d.
        let got = map_apply(&s, &unit(3, 0, 1)).unwrap();
        assert!(got.max_abs_diff(&unit(3, 1, 0).scale_real(3.0 * (p.c - p.b) / 2.0)) < 1e-15);
        let diag = map_apply(&s, &unit(3, 1, 1)).unwrap();
        let w = (p.c + p.b) / 2.0;
        let want = ComplexMatrix::from_real_diagonal(&[3.0 * w, 3.0 * p.a(), 3.0 * w]);
        assert!(diag.max_abs_diff(&want) < 1e-15);
        let lam = compose_transpose(&s).unwrap();
        let off = map_apply(&lam, &unit(3, 0, 1)).unwrap();
        assert!(off.max_abs_diff(&unit(3, 0, 1).scale_real(3.0 * (p.c - p.b) / 2.0)) < 1e-15);
        assert_eq!(compose_transpose(&lam).unwrap(), s);
        assert_eq!(
            lam.choi().max_abs_diff(&build_rho_bc(&p).unwrap().partial_transpose().matrix().scale_real(3.0)),
            0.0
        );
    }

    #[test]
    fn round_trip_state_map() {
        let rho = build_rho_bc(&CanonicalParams::new(4, 0.05, 0.03)).unwrap();
        let back = map_to_state(&state_to_map(&rho).unwrap()).unwrap();
        assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-15);
        assert!(back.is_normalized());
    }

    #[test]
    fn identity_transposes_to_transpose() {
        assert_eq!(compose_transpose(&ChoiMap::identity(3).unwrap()).unwrap(), ChoiMap::transpose(3).unwrap());
    }

    #[test]
    fn tau_w_action() {
        let t = tau_w(3, 1.0).unwrap();
        let img = map_apply(&t, &ComplexMatrix::identity(3)).unwrap();
        assert!(img.max_abs_diff(&ComplexMatrix::identity(3).scale_real(7.0)) < 1e-15);
        let off = map_apply(&tau_w(3, 2.5).unwrap(), &unit(3, 0, 1)).unwrap();
        assert!(off.max_abs_diff(&unit(3, 0, 1).scale_real(-3.5)) < 1e-15);
        let sigma = crate::canonical::build_werner(3, 2.5).unwrap().partial_transpose();
        assert!(tau_w(3, 2.5).unwrap().choi().max_abs_diff(&sigma.matrix().scale_real(3.0)) < 1e-14);
    }

    #[test]
    fn transpose_is_not_two_positive() {
        let t = ChoiMap::transpose(3).unwrap();
        let v = is_k_positive(&t, 2, &opts()).unwrap();
        assert!(v.is_violation());
        let w = v.witness.as_ref().unwrap();
        assert!((output_min_eigenvalue(&t, w).unwrap() - v.margin).abs() < 1e-10);
        assert!(is_2_positive_maxent(&t, &opts()).unwrap().is_violation());
        assert!(!is_k_positive(&t, 1, &opts()).unwrap().is_violation());
    }

    #[test]
    fn identity_is_completely_positive() {
        let id = ChoiMap::identity(3).unwrap();
        for k in 1..=3 {
            let v = is_k_positive(&id, k, &opts()).unwrap();
            assert!(!v.is_violation() && v.margin >= -1e-12);
        }
        assert!(!is_2_positive_maxent(&id, &opts()).unwrap().is_violation());
    }

    #[test]
    fn tau_w_boundary_at_d4() {
        let v = is_k_positive(&tau_w(4, 1.0).unwrap(), 2, &opts()).unwrap();
        assert!(v.margin.abs() < 1e-8, "{}", v.margin);
    }

    #[test]
    fn maxent_tester_at_g_and_f() {
        let g = lambda_bc(&CanonicalParams::new(3, 0.2, 1.0 / 15.0)).unwrap();
        assert!(!is_2_positive_maxent(&g, &opts()).unwrap().is_violation());
        let f = lambda_bc(&CanonicalParams::new(3, 1.0 / 3.0, 0.0)).unwrap();
        let v = is_2_positive_maxent(&f, &opts()).unwrap();
        assert!(v.is_violation());
        let w = v.witness.unwrap();
        let beta = [
            w.as_slice()[..3].iter().map(|z| z * 2f64.sqrt()).collect(),
            w.as_slice()[3..].iter().map(|z| z * 2f64.sqrt()).collect(),
        ];
        let e = herm_eig(&maxent_output(&f, &beta).unwrap()).unwrap();
        assert!((e.values[0] - v.margin).abs() < 1e-12);
    }

    #[test]
    fn tensor_maps_regrouping() {
        let id = ChoiMap::identity(2).unwrap();
        assert_eq!(tensor_maps(&id, &id, 81).unwrap(), ChoiMap::identity(4).unwrap());
        let t = ChoiMap::transpose(2).unwrap();
        let tt = tensor_maps(&t, &id, 81).unwrap();
        // (T⊗id)(A⊗B) = Aᵀ⊗B
        let a = ComplexMatrix::from_fn(2, 2, |i, j| C64::new(i as f64, j as f64 + 1.0));
        let b = ComplexMatrix::from_fn(2, 2, |i, j| C64::new((i * j) as f64, 2.0 - i as f64));
        let got = map_apply(&tt, &a.kron(&b).unwrap()).unwrap();
        assert_eq!(got, a.transpose().kron(&b).unwrap());
        assert!(tensor_maps(&tt, &tt, 81).is_err());
    }

    #[test]
    fn lambda_c_matches_direct_action() {
        for (b, c) in [(0.2, 1.0 / 15.0), (0.25, 0.02), (0.18, 0.1)] {
            let p = CanonicalParams::new(3, b, c);
            let out = lambda_c_apply(&build_rho_bc(&p).unwrap()).unwrap();
            let img = lambda_c_image(&p).unwrap();
            let want = build_rho_bc_unchecked(&img).unwrap().matrix().scale_real(out.trace());
            assert!(out.matrix().max_abs_diff(&want) < 1e-11);
            assert!(pt_spectrum(&img).lambda0 >= -1e-15);
        }
        let g = lambda_c_image(&CanonicalParams::new(3, 0.2, 1.0 / 15.0)).unwrap();
        assert!((g.b - 1.0 / 15.0).abs() < 1e-15 && (g.c - 2.0 / 15.0).abs() < 1e-15);
        assert!(lambda_c_image(&CanonicalParams::new(2, 0.1, 0.1)).is_err());
    }
}
