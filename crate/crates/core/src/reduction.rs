//! Local-operations reduction of an NPT state to the ρ_bc family.
//!
//! Stages, applied in order by [`reduce_to_canonical`]:
//!
//! 1. rotate both sides so the witness is Σ_k s_k |kk⟩;
//! 2. filter Alice's side with W = diag(√d · s_k);
//! 3. project both sides onto the witness support (d⊗d);
//! 4. twirl with local diagonal phases U⊗U;
//! 5. average over simultaneous permutations of the basis.
//!
//! [`full_twirl`] is the optional sixth step onto the U⊗U-invariant line.
//! Twirls are exact projections; the Monte-Carlo versions exist as oracles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::canonical::{build_rho_bc, CanonicalParams};
use crate::error::{invalid, Error, Result};
use crate::qmat::{
    haar_unitary, herm_eig, inner, norm, singular_split, BipartiteState, ComplexMatrix, PureState, C64, ZERO,
};

const NEGATIVE: f64 = -1e-12;
const SCHMIDT_CUT: f64 = 1e-10;
const ALGEBRA_TOL: f64 = 1e-10;

/// Unit vector ψ with ⟨ψ|ρ^PT|ψ⟩ = value < 0.
#[derive(Clone, Debug)]
pub struct NptWitness {
    pub psi: PureState,
    pub value: f64,
}

#[derive(Clone, Debug)]
pub struct ReductionStage {
    pub name: &'static str,
    pub state: BipartiteState,
    /// Tr(Hρ) with H the swap on the leading d⊗d block, d the witness rank.
    pub tr_h: f64,
    pub trace: f64,
    pub min_eig: f64,
}

#[derive(Clone, Debug, Default)]
pub struct ReductionTrace {
    pub stages: Vec<ReductionStage>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct StageSummary {
    pub stage: &'static str,
    #[serde(rename = "TrHrho")]
    pub tr_h: f64,
    pub trace: f64,
    #[serde(rename = "minEig")]
    pub min_eig: f64,
}

impl ReductionTrace {
    fn push(&mut self, name: &'static str, state: &BipartiteState, d: usize) -> Result<()> {
        self.stages.push(ReductionStage {
            name,
            state: state.clone(),
            tr_h: tr_h_embedded(state, d)?,
            trace: state.trace(),
            min_eig: state.min_eigenvalue()?,
        });
        Ok(())
    }

    pub fn summary(&self) -> Vec<StageSummary> {
        self.stages
            .iter()
            .map(|s| StageSummary { stage: s.name, tr_h: s.tr_h, trace: s.trace, min_eig: s.min_eig })
            .collect()
    }
}

/// (1/d) Σ_{i,j<d} ⟨ji|ρ|ij⟩: Tr(Hρ) with H acting on the leading d⊗d block.
pub fn tr_h_embedded(rho: &BipartiteState, d: usize) -> Result<f64> {
    if d == 0 || d > rho.d_a() || d > rho.d_b() {
        return invalid(format!("block size {d} does not fit in {}⊗{}", rho.d_a(), rho.d_b()));
    }
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            s += rho.entry(j, i, i, j).re;
        }
    }
    Ok(s / d as f64)
}

/// Most negative eigenvector of ρ^PT, if its eigenvalue is below −1e−12.
pub fn find_npt_witness(rho: &BipartiteState) -> Result<Option<NptWitness>> {
    let eig = herm_eig(rho.partial_transpose().matrix())?;
    if eig.values[0] >= NEGATIVE {
        return Ok(None);
    }
    let psi = PureState::new(eig.vector(0), rho.d_a(), rho.d_b())?;
    Ok(Some(NptWitness { psi, value: eig.values[0] }))
}

fn check_witness(rho: &BipartiteState, w: &NptWitness) -> Result<()> {
    if w.psi.d_a() != rho.d_a() || w.psi.d_b() != rho.d_b() {
        return invalid("witness dimensions differ from the state");
    }
    if (w.psi.norm() - 1.0).abs() > 1e-10 {
        return invalid(format!("witness norm {} is not 1", w.psi.norm()));
    }
    if !(w.value < 0.0) {
        return invalid(format!("witness value {} is not negative", w.value));
    }
    let actual = rho.partial_transpose().expectation(w.psi.as_slice());
    if (actual - w.value).abs() > 1e-9 * rho.matrix().max_abs().max(1.0) {
        return invalid(format!("witness value {} does not match ⟨ψ|ρ^PT|ψ⟩ = {actual}", w.value));
    }
    Ok(())
}

/// Extends orthonormal `vecs` to a basis of C^n.
fn complete_basis(mut vecs: Vec<Vec<C64>>, n: usize) -> Vec<Vec<C64>> {
    for e in 0..n {
        if vecs.len() == n {
            break;
        }
        let mut v = vec![ZERO; n];
        v[e] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for u in &vecs {
                let p = inner(u, &v);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= p * y;
                }
            }
        }
        let nv = norm(&v);
        if nv > 1e-6 {
            vecs.push(v.into_iter().map(|z| z / nv).collect());
        }
    }
    vecs
}

/// Local unitaries taking the witness to Σ_k s_k |kk⟩.
///
/// Alice gets U_A with U_A|u_k⟩ = |k⟩. Bob gets U_B with U_B*|v_k⟩ = |k⟩,
/// because the partial transpose conjugates his side: (ρ')^PT equals
/// (U_A⊗U_B*) ρ^PT (U_A⊗U_B*)†. Coefficients below 1e−10 of the largest
/// are dropped, so φ has exactly rank-many nonzero entries.
pub fn schmidt_rotate(rho: &BipartiteState, w: &NptWitness) -> Result<(BipartiteState, PureState)> {
    check_witness(rho, w)?;
    let (da, db) = (rho.d_a(), rho.d_b());
    let split = singular_split(w.psi.as_slice(), da, db)?;
    let largest = split.coefficients[0];
    let rank = split.coefficients.iter().take_while(|&&s| s > SCHMIDT_CUT * largest).count();
    if rank < 2 {
        return invalid("witness is a product vector; it cannot detect a negative partial transpose");
    }
    let left = complete_basis(split.left.clone(), da);
    let right = complete_basis(split.right.clone(), db);
    let ua = ComplexMatrix::from_fn(da, da, |k, i| left[k][i].conj());
    let ub = ComplexMatrix::from_fn(db, db, |k, j| right[k][j]);
    let u = ua.kron(&ub)?;
    let rotated = BipartiteState::unnormalized(rho.matrix().conjugate_by(&u)?, da, db)?;
    let rotated = if rho.is_normalized() { rotated.renormalize()? } else { rotated };

    let mut phi = vec![ZERO; da * db];
    for k in 0..rank {
        phi[k * db + k] = C64::new(split.coefficients[k], 0.0);
    }
    Ok((rotated, PureState::new(phi, da, db)?))
}

/// Number of leading diagonal coefficients of φ = Σ φ_kk |kk⟩ carrying weight.
fn filter_support(phi: &PureState) -> Result<(usize, Vec<C64>)> {
    let (da, db) = (phi.d_a(), phi.d_b());
    let m = da.min(db);
    let v = phi.as_slice();
    let diag: Vec<C64> = (0..m).map(|k| v[k * db + k]).collect();
    let largest = diag.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let off = (0..da * db).filter(|&r| r / db != r % db || r / db >= m).map(|r| v[r].norm()).fold(0.0, f64::max);
    if off > ALGEBRA_TOL * largest.max(f64::MIN_POSITIVE) {
        return invalid("φ is not in computational Schmidt form");
    }
    let support = diag.iter().rposition(|z| z.norm() > SCHMIDT_CUT * largest).map_or(0, |k| k + 1);
    Ok((support, diag[..support].to_vec()))
}

/// (W⊗1)ρ(W⊗1)† / Tr with W = diag(√d · conj φ_kk) on the support of φ and
/// zero outside it, so that (W†⊗1)|Φ⁺_d⟩ = |φ⟩.
pub fn local_filter(rho: &BipartiteState, phi: &PureState) -> Result<BipartiteState> {
    if phi.d_a() != rho.d_a() || phi.d_b() != rho.d_b() {
        return invalid("φ dimensions differ from the state");
    }
    let (d, diag) = filter_support(phi)?;
    let largest = diag.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(index) = diag.iter().position(|z| z.norm() <= SCHMIDT_CUT * largest) {
        return Err(Error::SingularFilter { index, coefficient: diag[index].norm() });
    }
    let sd = (d as f64).sqrt();
    let (da, db) = (rho.d_a(), rho.d_b());
    let w: Vec<C64> = (0..da).map(|i| if i < d { diag[i].conj() * sd } else { ZERO }).collect();
    let m = rho.matrix();
    let out = ComplexMatrix::from_fn(da * db, da * db, |r, c| w[r / db] * m[(r, c)] * w[c / db].conj());
    let tr = out.trace().re;
    if !(tr > 0.0) {
        return Err(Error::DegenerateProjection(tr));
    }
    BipartiteState::unnormalized(out.scale_real(1.0 / tr), da, db)?.renormalize()
}

/// Restriction to span{|0⟩..|d−1⟩} on both sides, renormalized.
pub fn project_dd(rho: &BipartiteState, d: usize) -> Result<BipartiteState> {
    let (da, db) = (rho.d_a(), rho.d_b());
    if d == 0 || d > da || d > db {
        return invalid(format!("cannot project {da}⊗{db} onto {d}⊗{d}"));
    }
    let out = ComplexMatrix::from_fn(d * d, d * d, |r, c| rho.entry(r / d, r % d, c / d, c % d));
    let tr = out.trace().re;
    if !(tr > 0.0) {
        return Err(Error::DegenerateProjection(tr));
    }
    BipartiteState::unnormalized(out.scale_real(1.0 / tr), d, d)?.renormalize()
}

fn in_diagonal_algebra(d: usize, r: usize, c: usize) -> bool {
    let (i, j, k, l) = (r / d, r % d, c / d, c % d);
    (i == k && j == l) || (i == l && j == k)
}

fn require_dd(rho: &BipartiteState) -> Result<usize> {
    if rho.d_a() != rho.d_b() {
        return invalid(format!("expected a d⊗d state, got {}⊗{}", rho.d_a(), rho.d_b()));
    }
    Ok(rho.d_a())
}

/// Keeps only |ii⟩⟨ii|, |ij⟩⟨ij| and |ij⟩⟨ji| entries: the average over
/// U⊗U with U diagonal unitary.
pub fn diagonal_twirl(rho: &BipartiteState) -> Result<BipartiteState> {
    let d = require_dd(rho)?;
    let m = rho.matrix();
    let out = ComplexMatrix::from_fn(d * d, d * d, |r, c| if in_diagonal_algebra(d, r, c) { m[(r, c)] } else { ZERO });
    BipartiteState::new_with(out, d, d, rho.is_normalized(), &Default::default())
}

/// (α, β1, β2) averages over the permutation orbit; b = β1 − β2, c = β1 + β2.
pub fn symmetrized_params(rho: &BipartiteState) -> Result<CanonicalParams> {
    let d = require_dd(rho)?;
    let m = rho.matrix();
    let scale = m.max_abs().max(1.0);
    for r in 0..d * d {
        for c in 0..d * d {
            if !in_diagonal_algebra(d, r, c) && m[(r, c)].norm() > ALGEBRA_TOL * scale {
                return invalid(format!("entry ({r}, {c}) lies outside the diagonal-twirl algebra"));
            }
        }
    }
    let (mut b1, mut b2) = (0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            if i != j {
                b1 += rho.entry(i, j, i, j).re;
                b2 += rho.entry(i, j, j, i).re;
            }
        }
    }
    let pairs = (d * (d - 1)) as f64;
    let (b1, b2) = (b1 / pairs, b2 / pairs);
    Ok(CanonicalParams::new(d, b1 - b2, b1 + b2))
}

/// Average over simultaneous basis permutations; the result is ρ_bc.
pub fn permutation_symmetrize(rho: &BipartiteState) -> Result<BipartiteState> {
    build_rho_bc(&symmetrized_params(rho)?)
}

/// Projection onto span{I, F} (F the swap): the U⊗U twirl over Haar U.
pub fn full_twirl(rho: &BipartiteState) -> Result<BipartiteState> {
    let d = require_dd(rho)?;
    let t = rho.trace();
    let s = tr_h_embedded(rho, d)? * d as f64;
    let x = d as f64;
    let den = x * (x * x - 1.0);
    let alpha = (t * x - s) / den;
    let beta = (s * x - t) / den;
    let mut out = ComplexMatrix::identity(d * d).scale_real(alpha);
    for i in 0..d {
        for j in 0..d {
            out[(i * d + j, j * d + i)] += C64::new(beta, 0.0);
        }
    }
    BipartiteState::new_with(out, d, d, rho.is_normalized(), &Default::default())
}

/// Runs stages 1–5 and returns the resulting ρ_bc parameters.
pub fn reduce_to_canonical(rho: &BipartiteState) -> Result<(CanonicalParams, ReductionTrace)> {
    if !rho.is_normalized() {
        return invalid("reduction expects a normalized state");
    }
    let witness = match find_npt_witness(rho)? {
        Some(w) => w,
        None => {
            return Err(Error::NotNpt { min_eigenvalue: rho.partial_transpose().min_eigenvalue()? });
        }
    };
    let (rotated, phi) = schmidt_rotate(rho, &witness)?;
    let (d, _) = filter_support(&phi)?;
    let mut trace = ReductionTrace::default();
    trace.push("input", rho, d)?;
    trace.push("schmidt_rotate", &rotated, d)?;
    let filtered = local_filter(&rotated, &phi)?;
    trace.push("local_filter", &filtered, d)?;
    let projected = project_dd(&filtered, d)?;
    trace.push("project_dd", &projected, d)?;
    let twirled = diagonal_twirl(&projected)?;
    trace.push("diagonal_twirl", &twirled, d)?;
    let params = symmetrized_params(&twirled)?;
    let canonical = build_rho_bc(&params)?;
    trace.push("permutation_symmetrize", &canonical, d)?;
    Ok((params, trace))
}

fn mc_average(
    rho: &BipartiteState,
    samples: usize,
    seed: u64,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> ComplexMatrix,
) -> Result<BipartiteState> {
    let d = require_dd(rho)?;
    if samples == 0 {
        return invalid("Monte-Carlo average needs at least one sample");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = ComplexMatrix::zeros(d * d, d * d);
    for _ in 0..samples {
        let u = draw(&mut rng);
        let uu = u.kron(&u)?;
        acc = &acc + &rho.matrix().conjugate_by(&uu)?;
    }
    BipartiteState::new_with(acc.scale_real(1.0 / samples as f64), d, d, false, &Default::default())
}

/// Sample mean of (U⊗U)ρ(U⊗U)† with U = diag(e^{iθ_k}), θ uniform.
pub fn mc_diagonal_twirl(rho: &BipartiteState, samples: usize, seed: u64) -> Result<BipartiteState> {
    let d = rho.d_a();
    mc_average(rho, samples, seed, |rng| {
        let mut u = ComplexMatrix::zeros(d, d);
        for k in 0..d {
            u[(k, k)] = C64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU);
        }
        u
    })
}

/// Sample mean of (U⊗U)ρ(U⊗U)† with U Haar-distributed.
pub fn mc_full_twirl(rho: &BipartiteState, samples: usize, seed: u64) -> Result<BipartiteState> {
    let d = rho.d_a();
    mc_average(rho, samples, seed, |rng| haar_unitary(d, rng))
}
