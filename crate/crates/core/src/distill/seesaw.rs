//! Alternating minimization of ⟨ψ|M|ψ⟩ over unit vectors of Schmidt rank ≤ k.
//!
//! With Alice's k-plane fixed, the problem is an exact eigenproblem on the
//! compressed block (P_A ⊗ 1) M (P_A ⊗ 1). Its minimizer fixes Bob's k-plane,
//! and the mirrored step refits Alice's. Each step minimizes over a subspace
//! containing the current vector, so the value never increases.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::qmat::{haar_frame, herm_eig, norm, singular_split, thin_svd, ComplexMatrix, C64, ZERO};

/// ψ = Σ_r √μ_r |a_r⟩ ⊗ |b_r⟩ with orthonormal a's and b's and Σ μ_r = 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowRankState {
    pub mu: Vec<f64>,
    pub a_vecs: Vec<Vec<C64>>,
    pub b_vecs: Vec<Vec<C64>>,
}

/// Schmidt-rank-two parametrization used throughout the distillability tests.
pub type RankTwoState = LowRankState;

impl LowRankState {
    pub fn new(mu: Vec<f64>, a_vecs: Vec<Vec<C64>>, b_vecs: Vec<Vec<C64>>) -> Result<Self> {
        let k = mu.len();
        if k == 0 || a_vecs.len() != k || b_vecs.len() != k {
            return invalid("mu, a_vecs and b_vecs must have the same positive length");
        }
        if mu.iter().any(|&m| !(m >= 0.0)) || (mu.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return invalid("mu must be nonnegative and sum to 1");
        }
        for vecs in [&a_vecs, &b_vecs] {
            let dim = vecs[0].len();
            if vecs.iter().any(|v| v.len() != dim) {
                return invalid("Schmidt vectors on one side differ in length");
            }
            for (r, u) in vecs.iter().enumerate() {
                for (s, v) in vecs.iter().enumerate() {
                    let g = crate::qmat::inner(u, v);
                    let target = if r == s { 1.0 } else { 0.0 };
                    if (g - C64::new(target, 0.0)).norm() > 1e-10 {
                        return invalid("Schmidt vectors are not orthonormal");
                    }
                }
            }
        }
        Ok(Self { mu, a_vecs, b_vecs })
    }

    /// √μ₁|a₀b₀⟩ + √μ₂|a₁b₁⟩.
    pub fn rank_two(mu1: f64, a: [Vec<C64>; 2], b: [Vec<C64>; 2]) -> Result<Self> {
        let [a0, a1] = a;
        let [b0, b1] = b;
        Self::new(vec![mu1, 1.0 - mu1], vec![a0, a1], vec![b0, b1])
    }

    /// Best rank-≤k approximation direction of a nonzero vector, normalized.
    pub fn from_vector(v: &[C64], d_a: usize, d_b: usize, k: usize) -> Result<Self> {
        if v.len() != d_a * d_b || k == 0 || k > d_a.min(d_b) {
            return invalid("vector length or rank does not fit the bipartition");
        }
        let split = singular_split(v, d_a, d_b)?;
        let total: f64 = split.coefficients[..k].iter().map(|s| s * s).sum();
        if !(total > 0.0) {
            return invalid("zero vector");
        }
        let mut mu: Vec<f64> = split.coefficients[..k].iter().map(|s| s * s / total).collect();
        let drift = mu.iter().sum::<f64>() - 1.0;
        mu[0] -= drift;
        Ok(Self { mu, a_vecs: split.left[..k].to_vec(), b_vecs: split.right[..k].to_vec() })
    }

    pub fn rank(&self) -> usize {
        self.mu.len()
    }

    pub fn d_a(&self) -> usize {
        self.a_vecs[0].len()
    }

    pub fn d_b(&self) -> usize {
        self.b_vecs[0].len()
    }

    pub fn to_vector(&self) -> Vec<C64> {
        let (da, db) = (self.d_a(), self.d_b());
        let mut out = vec![ZERO; da * db];
        for ((m, a), b) in self.mu.iter().zip(&self.a_vecs).zip(&self.b_vecs) {
            let s = m.sqrt();
            for i in 0..da {
                let ai = a[i] * s;
                for j in 0..db {
                    out[i * db + j] += ai * b[j];
                }
            }
        }
        out
    }
}

/// ⟨ψ|M|ψ⟩ for the assembled unit vector.
pub fn low_rank_expectation(m: &ComplexMatrix, v: &LowRankState) -> Result<f64> {
    let n = v.d_a() * v.d_b();
    if !m.is_square() || m.rows() != n {
        return invalid(format!("{}x{} operator does not act on {}⊗{}", m.rows(), m.cols(), v.d_a(), v.d_b()));
    }
    Ok(m.expectation(&v.to_vector()).re)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MinOptions {
    pub restarts: usize,
    pub max_iters: usize,
    /// Improvement below which an iteration counts as stalled.
    pub tol: f64,
    pub seed: u64,
    /// Largest total dimension accepted for n-copy operators.
    pub max_dim: usize,
}

impl MinOptions {
    /// 64 restarts, at most 500 iterations, stall threshold 1e−12.
    pub fn with_seed(seed: u64) -> Self {
        Self { restarts: 64, max_iters: 500, tol: 1e-12, seed, max_dim: super::copies::size_cap(false) }
    }

    pub fn restarts(self, restarts: usize) -> Self {
        Self { restarts, ..self }
    }
}

pub(crate) const STALL_COUNT: usize = 3;

/// One restart.
#[derive(Clone, Debug)]
pub struct SeesawRun {
    pub value: f64,
    pub state: LowRankState,
    /// Value after each full Alice+Bob iteration.
    pub history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Best of all restarts plus per-restart diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct OptimizerReport {
    pub min_value: f64,
    pub argmin: LowRankState,
    pub k: usize,
    pub restarts: usize,
    pub iterations_per_restart: Vec<usize>,
    pub restart_values: Vec<f64>,
    pub best_restart: usize,
    pub converged: bool,
    pub seed: u64,
    /// True when k ≥ min(d_a, d_b) and the answer is the exact minimum eigenvalue.
    pub exact: bool,
}

pub(crate) struct Shape {
    pub(crate) d_a: usize,
    pub(crate) d_b: usize,
    pub(crate) k: usize,
}

/// (F†⊗1) M (F⊗1) for an Alice frame F (d_a × k, given as k columns).
fn compress_alice(m: &ComplexMatrix, s: &Shape, frame: &[Vec<C64>]) -> ComplexMatrix {
    let (da, db, k) = (s.d_a, s.d_b, s.k);
    let n = da * db;
    let kb = k * db;
    // t[(i,j),(q,l)] = Σ_i' M[(i,j),(i',l)] F[i',q]
    let mut t = vec![ZERO; n * kb];
    for r in 0..n {
        let row = m.row(r);
        let out = &mut t[r * kb..(r + 1) * kb];
        for (q, f) in frame.iter().enumerate() {
            for (ip, fi) in f.iter().enumerate() {
                if *fi == ZERO {
                    continue;
                }
                let src = &row[ip * db..(ip + 1) * db];
                for (o, x) in out[q * db..(q + 1) * db].iter_mut().zip(src) {
                    *o += x * fi;
                }
            }
        }
    }
    let mut c = ComplexMatrix::zeros(kb, kb);
    for (p, f) in frame.iter().enumerate() {
        for j in 0..db {
            let dst = p * db + j;
            for (i, fi) in f.iter().enumerate() {
                let w = fi.conj();
                if w == ZERO {
                    continue;
                }
                let src = &t[(i * db + j) * kb..(i * db + j + 1) * kb];
                for (col, x) in src.iter().enumerate() {
                    c[(dst, col)] += w * x;
                }
            }
        }
    }
    c
}

/// (1⊗F†) M (1⊗F) for a Bob frame F (d_b × k, given as k columns).
fn compress_bob(m: &ComplexMatrix, s: &Shape, frame: &[Vec<C64>]) -> ComplexMatrix {
    let (da, db, k) = (s.d_a, s.d_b, s.k);
    let n = da * db;
    let ak = da * k;
    // t[(i,j),(i',s)] = Σ_l M[(i,j),(i',l)] F[l,s]
    let mut t = vec![ZERO; n * ak];
    for r in 0..n {
        let row = m.row(r);
        let out = &mut t[r * ak..(r + 1) * ak];
        for ip in 0..da {
            let src = &row[ip * db..(ip + 1) * db];
            for (sidx, f) in frame.iter().enumerate() {
                out[ip * k + sidx] = src.iter().zip(f).map(|(x, y)| x * y).sum();
            }
        }
    }
    let mut c = ComplexMatrix::zeros(ak, ak);
    for i in 0..da {
        for (rr, f) in frame.iter().enumerate() {
            let dst = i * k + rr;
            for (j, fj) in f.iter().enumerate() {
                let w = fj.conj();
                if w == ZERO {
                    continue;
                }
                let src = &t[(i * db + j) * ak..(i * db + j + 1) * ak];
                for (col, x) in src.iter().enumerate() {
                    c[(dst, col)] += w * x;
                }
            }
        }
    }
    c
}

/// Thin SVD as (U, s, V†), s nonincreasing.
pub(crate) fn svd(rows: usize, cols: usize, data: &[C64]) -> Result<(ComplexMatrix, Vec<f64>, ComplexMatrix)> {
    let t = thin_svd(rows, cols, data)?;
    Ok((t.u, t.s, t.v_adj))
}

/// Alice step: returns (value, new Bob frame, full vector).
fn alice_step(m: &ComplexMatrix, s: &Shape, alice: &[Vec<C64>]) -> Result<(f64, Vec<Vec<C64>>, Vec<C64>)> {
    let e = herm_eig(&compress_alice(m, s, alice))?;
    let x = e.vector(0);
    let (u, sv, v_t) = svd(s.k, s.d_b, &x)?;
    let bob: Vec<Vec<C64>> = (0..s.k).map(|r| (0..s.d_b).map(|j| v_t[(r, j)]).collect()).collect();
    let mut psi = vec![ZERO; s.d_a * s.d_b];
    for r in 0..s.k {
        let a: Vec<C64> = (0..s.d_a).map(|i| (0..s.k).map(|p| alice[p][i] * u[(p, r)]).sum()).collect();
        for i in 0..s.d_a {
            for j in 0..s.d_b {
                psi[i * s.d_b + j] += a[i] * bob[r][j] * sv[r];
            }
        }
    }
    Ok((e.values[0], bob, psi))
}

/// Bob step: returns (value, new Alice frame, full vector).
pub(crate) fn bob_step(m: &ComplexMatrix, s: &Shape, bob: &[Vec<C64>]) -> Result<(f64, Vec<Vec<C64>>, Vec<C64>)> {
    let e = herm_eig(&compress_bob(m, s, bob))?;
    let y = e.vector(0);
    let (u, sv, v_t) = svd(s.d_a, s.k, &y)?;
    let alice: Vec<Vec<C64>> = (0..s.k).map(|r| (0..s.d_a).map(|i| u[(i, r)]).collect()).collect();
    let mut psi = vec![ZERO; s.d_a * s.d_b];
    for r in 0..s.k {
        let b: Vec<C64> = (0..s.d_b).map(|j| (0..s.k).map(|q| v_t[(r, q)] * bob[q][j]).sum()).collect();
        for i in 0..s.d_a {
            for j in 0..s.d_b {
                psi[i * s.d_b + j] += alice[r][i] * b[j] * sv[r];
            }
        }
    }
    Ok((e.values[0], alice, psi))
}

fn check_problem(m: &ComplexMatrix, d_a: usize, d_b: usize, k: usize) -> Result<()> {
    if !m.is_square() || m.rows() != d_a * d_b {
        return invalid(format!("{}x{} operator does not act on {d_a}⊗{d_b}", m.rows(), m.cols()));
    }
    if k == 0 {
        return invalid("Schmidt rank bound must be positive");
    }
    let defect = m.hermitian_defect();
    if defect > 1e-10 * m.max_abs().max(1.0) {
        return invalid(format!("operator is not Hermitian (defect {defect:e})"));
    }
    Ok(())
}

/// A single see-saw run from a given Alice k-frame.
pub fn seesaw_run(
    m: &ComplexMatrix,
    d_a: usize,
    d_b: usize,
    initial_alice: Vec<Vec<C64>>,
    max_iters: usize,
    tol: f64,
) -> Result<SeesawRun> {
    let k = initial_alice.len();
    check_problem(m, d_a, d_b, k)?;
    if k >= d_a.min(d_b) || initial_alice.iter().any(|v| v.len() != d_a) {
        return invalid("initial frame must hold k < min(d_a, d_b) vectors of length d_a");
    }
    let shape = Shape { d_a, d_b, k };
    let m = m.hermitian_part();
    let mut alice = initial_alice;
    let mut history = Vec::new();
    let mut best = f64::INFINITY;
    let mut best_psi = Vec::new();
    let mut stalls = 0;
    let mut converged = false;
    for _ in 0..max_iters.max(1) {
        let (_, bob, _) = alice_step(&m, &shape, &alice)?;
        let (value, next, psi) = bob_step(&m, &shape, &bob)?;
        alice = next;
        // Exact eigen-minima over nested subspaces; clamp rounding noise.
        let value = value.min(best);
        if value < best {
            best_psi = psi;
        }
        let improvement = best - value;
        history.push(value);
        if best.is_finite() && improvement < tol {
            stalls += 1;
        } else {
            stalls = 0;
        }
        best = value;
        if stalls >= STALL_COUNT {
            converged = true;
            break;
        }
    }
    let nv = norm(&best_psi);
    let psi: Vec<C64> = best_psi.iter().map(|z| z / nv).collect();
    let state = LowRankState::from_vector(&psi, d_a, d_b, k)?;
    let value = low_rank_expectation(&m, &state)?;
    Ok(SeesawRun { value, state, iterations: history.len(), history, converged })
}

/// Minimum of ⟨ψ|M|ψ⟩ over Schmidt rank ≤ k, best of `opts.restarts` runs.
///
/// Restart r draws its initial Alice frame from a ChaCha8 stream keyed by
/// (seed, r). Ties in value go to the lower restart index.
pub fn minimize_rank_k(
    m: &ComplexMatrix,
    d_a: usize,
    d_b: usize,
    k: usize,
    opts: &MinOptions,
) -> Result<OptimizerReport> {
    check_problem(m, d_a, d_b, k)?;
    if k >= d_a.min(d_b) {
        let e = herm_eig(&m.hermitian_part())?;
        let state = LowRankState::from_vector(&e.vector(0), d_a, d_b, d_a.min(d_b))?;
        return Ok(OptimizerReport {
            min_value: e.values[0],
            argmin: state,
            k,
            restarts: 0,
            iterations_per_restart: vec![],
            restart_values: vec![],
            best_restart: 0,
            converged: true,
            seed: opts.seed,
            exact: true,
        });
    }
    if opts.restarts == 0 {
        return invalid("at least one restart is required");
    }
    let runs: Vec<SeesawRun> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(r as u64);
            seesaw_run(m, d_a, d_b, haar_frame(d_a, k, &mut rng), opts.max_iters, opts.tol)
        })
        .collect::<Result<_>>()?;
    let best = (0..runs.len())
        .min_by(|&x, &y| runs[x].value.total_cmp(&runs[y].value).then(x.cmp(&y)))
        .expect("at least one restart");
    Ok(OptimizerReport {
        min_value: runs[best].value,
        argmin: runs[best].state.clone(),
        k,
        restarts: runs.len(),
        iterations_per_restart: runs.iter().map(|r| r.iterations).collect(),
        restart_values: runs.iter().map(|r| r.value).collect(),
        best_restart: best,
        converged: runs[best].converged,
        seed: opts.seed,
        exact: false,
    })
}
