//! The two-parameter family ρ_bc on d⊗d and its geometry in the (b, c) plane.
//!
//! ```text
//! ρ_bc = a Σ_i |ii⟩⟨ii| + (c+b)/2 Σ_{i≠j} |ij⟩⟨ij| + (c−b)/2 Σ_{i≠j} |ij⟩⟨ji|
//! a    = (1 − (b+c) d(d−1)/2) / d
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::qmat::{BipartiteState, ComplexMatrix, NumericPolicy, C64};

const TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalParams {
    pub d: usize,
    pub b: f64,
    pub c: f64,
}

impl CanonicalParams {
    pub fn new(d: usize, b: f64, c: f64) -> Self {
        Self { d, b, c }
    }

    /// Weight on each |ii⟩⟨ii|, fixed by unit trace.
    pub fn a(&self) -> f64 {
        let d = self.d as f64;
        (1.0 - (self.b + self.c) * d * (d - 1.0) / 2.0) / d
    }

    pub fn is_physical(&self) -> bool {
        self.b >= -TOL && self.c >= -TOL && self.a() >= -TOL
    }

    fn check_finite(&self) -> Result<()> {
        if self.d < 2 {
            return invalid(format!("dimension {} is below 2", self.d));
        }
        if !self.b.is_finite() || !self.c.is_finite() {
            return invalid("non-finite b or c");
        }
        Ok(())
    }
}

/// Points just right of the segment BK: b = 1/(d(d−1)) + ε.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsParams {
    pub d: usize,
    pub c: f64,
    pub eps: f64,
}

impl EpsParams {
    pub fn new(d: usize, c: f64, eps: f64) -> Self {
        Self { d, c, eps }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return invalid(format!("dimension {} is below 2", self.d));
        }
        let top = b_bk(self.d);
        if !(self.c >= 0.0 && self.c < top) {
            return invalid(format!("c = {} outside [0, {top})", self.c));
        }
        if !(self.eps >= 0.0) || !self.eps.is_finite() {
            return invalid(format!("eps = {} must be finite and nonnegative", self.eps));
        }
        Ok(())
    }

    pub fn to_canonical(&self) -> CanonicalParams {
        CanonicalParams::new(self.d, b_bk(self.d) + self.eps, self.c)
    }
}

fn b_bk(d: usize) -> f64 {
    1.0 / (d * (d - 1)) as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionLabel {
    Unphysical,
    SeparablePPT,
    #[serde(rename = "NPT1_PseudoOneCopyUndistillable")]
    Npt1PseudoOneCopyUndistillable,
    #[serde(rename = "NPT1_OneCopyDistillable")]
    Npt1OneCopyDistillable,
    #[serde(rename = "NPT2")]
    Npt2,
}

impl RegionLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionLabel::Unphysical => "Unphysical",
            RegionLabel::SeparablePPT => "SeparablePPT",
            RegionLabel::Npt1PseudoOneCopyUndistillable => "NPT1_PseudoOneCopyUndistillable",
            RegionLabel::Npt1OneCopyDistillable => "NPT1_OneCopyDistillable",
            RegionLabel::Npt2 => "NPT2",
        }
    }
}

impl std::fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Distinct eigenvalues of ρ_bc^PT with multiplicities 1, d−1 and d²−d.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PTSpectrum {
    pub d: usize,
    pub lambda0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl PTSpectrum {
    pub fn trace(&self) -> f64 {
        let d = self.d as f64;
        self.lambda0 + (d - 1.0) * self.lambda1 + (d * d - d) * self.lambda2
    }

    pub fn min(&self) -> f64 {
        self.lambda0.min(self.lambda1).min(self.lambda2)
    }

    /// All d² eigenvalues in ascending order.
    pub fn expanded(&self) -> Vec<f64> {
        let d = self.d;
        let mut v = vec![self.lambda0];
        v.extend(std::iter::repeat_n(self.lambda1, d - 1));
        v.extend(std::iter::repeat_n(self.lambda2, d * d - d));
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Physical ρ_bc as a normalized state.
pub fn build_rho_bc(p: &CanonicalParams) -> Result<BipartiteState> {
    p.check_finite()?;
    if !p.is_physical() {
        return invalid(format!("(b, c) = ({}, {}) is unphysical at d = {} (a = {})", p.b, p.c, p.d, p.a()));
    }
    build_rho_bc_unchecked(p)
}

/// Same matrix without the physicality check. The trace is still one, but
/// the operator need not be positive.
pub fn build_rho_bc_unchecked(p: &CanonicalParams) -> Result<BipartiteState> {
    p.check_finite()?;
    let d = p.d;
    let n = d * d;
    if n * n > NumericPolicy::DEFAULT.max_entries {
        return Err(Error::SizeLimit { requested: n * n, limit: NumericPolicy::DEFAULT.max_entries });
    }
    let a = p.a();
    let diag = (p.c + p.b) / 2.0;
    let swap = (p.c - p.b) / 2.0;
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            let r = i * d + j;
            if i == j {
                m[(r, r)] = C64::new(a, 0.0);
            } else {
                m[(r, r)] = C64::new(diag, 0.0);
                m[(r, j * d + i)] = C64::new(swap, 0.0);
            }
        }
    }
    BipartiteState::normalized(m, d, d)
}

pub fn build_rho_c_eps(p: &EpsParams) -> Result<BipartiteState> {
    p.validate()?;
    build_rho_bc(&p.to_canonical())
}

pub fn pt_spectrum(p: &CanonicalParams) -> PTSpectrum {
    let d = p.d as f64;
    PTSpectrum {
        d: p.d,
        lambda0: (d - 1.0) * (1.0 / (d * (d - 1.0)) - p.b),
        lambda1: 1.0 / d - d / 2.0 * p.c - (d - 2.0) / 2.0 * p.b,
        lambda2: (p.c + p.b) / 2.0,
    }
}

/// Unnormalized σ(λ) = λI − ((λ+1)/d)·swap, whose partial transpose is
/// λI − (λ+1)|Φ₀⟩⟨Φ₀|.
pub fn build_werner(d: usize, lambda: f64) -> Result<BipartiteState> {
    if d < 2 {
        return invalid(format!("dimension {d} is below 2"));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return invalid(format!("lambda = {lambda} must be positive"));
    }
    let n = d * d;
    let off = -(lambda + 1.0) / d as f64;
    let mut m = ComplexMatrix::identity(n).scale_real(lambda);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + j, j * d + i)] += C64::new(off, 0.0);
        }
    }
    BipartiteState::unnormalized(m, d, d)
}

/// (b, c) of σ(λ)/Tr σ(λ).
pub fn werner_params(d: usize, lambda: f64) -> Result<CanonicalParams> {
    if d < 2 || !(lambda > 0.0) {
        return invalid(format!("Werner parameters need d ≥ 2 and lambda > 0 (got {d}, {lambda})"));
    }
    let df = d as f64;
    let norm = lambda * df * df - (lambda + 1.0);
    if !(norm > 0.0) {
        return invalid(format!("sigma({lambda}) has nonpositive trace at d = {d}"));
    }
    let shift = (lambda + 1.0) / df;
    Ok(CanonicalParams::new(d, (lambda + shift) / norm, (lambda - shift) / norm))
}

/// Normalized Werner state on the line FH.
pub fn build_werner_normalized(d: usize, lambda: f64) -> Result<BipartiteState> {
    build_rho_bc(&werner_params(d, lambda)?)
}

/// H = swap / d, the partial transpose of |Φ₀⟩⟨Φ₀|.
pub fn swap_h(d: usize) -> Result<ComplexMatrix> {
    if d < 2 {
        return invalid(format!("dimension {d} is below 2"));
    }
    let w = 1.0 / d as f64;
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + j, j * d + i)] = C64::new(w, 0.0);
        }
    }
    Ok(m)
}

/// Tr(Hρ) for a state on d⊗d, without forming H.
pub fn tr_h_rho(rho: &BipartiteState) -> Result<f64> {
    if rho.d_a() != rho.d_b() {
        return invalid(format!("Tr(H rho) needs d⊗d, got {}⊗{}", rho.d_a(), rho.d_b()));
    }
    let d = rho.d_a();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            s += rho.entry(j, i, i, j).re;
        }
    }
    Ok(s / d as f64)
}

/// Closed-form Tr(Hρ_bc) = (1 − b·d(d−1)) / d.
pub fn tr_h_rho_bc(p: &CanonicalParams) -> f64 {
    let d = p.d as f64;
    (1.0 - p.b * d * (d - 1.0)) / d
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionPoints {
    pub d: usize,
    pub a: (f64, f64),
    pub b: (f64, f64),
    pub c: (f64, f64),
    pub f: (f64, f64),
    pub g: (f64, f64),
    pub h: (f64, f64),
    pub j: (f64, f64),
    pub k: (f64, f64),
}

impl RegionPoints {
    pub fn catalog(&self) -> [(&'static str, (f64, f64)); 8] {
        [
            ("A", self.a),
            ("B", self.b),
            ("C", self.c),
            ("F", self.f),
            ("G", self.g),
            ("H", self.h),
            ("J", self.j),
            ("K", self.k),
        ]
    }

    pub fn get(&self, label: &str) -> Option<CanonicalParams> {
        self.catalog()
            .iter()
            .find(|(l, _)| l.eq_ignore_ascii_case(label))
            .map(|&(_, (b, c))| CanonicalParams::new(self.d, b, c))
    }

    pub fn bcgk(&self) -> [(f64, f64); 4] {
        [self.b, self.c, self.g, self.k]
    }

    pub fn cfkg(&self) -> [(f64, f64); 4] {
        [self.c, self.f, self.k, self.g]
    }

    pub fn abkj(&self) -> [(f64, f64); 4] {
        [self.a, self.b, self.k, self.j]
    }
}

pub fn region_points(d: usize) -> Result<RegionPoints> {
    if d < 3 {
        return invalid(format!("region geometry needs d ≥ 3, got {d}"));
    }
    let x = d as f64;
    let bk = 1.0 / (x * (x - 1.0));
    Ok(RegionPoints {
        d,
        a: (0.0, 0.0),
        b: (bk, 0.0),
        c: (4.0 / (x * (3.0 * x - 2.0)), 0.0),
        f: (2.0 * bk, 0.0),
        g: (3.0 / (x * (2.0 * x - 1.0)), 1.0 / (x * (2.0 * x - 1.0))),
        h: (bk, 1.0 / (x * (x + 1.0))),
        j: (0.0, 2.0 / (x * x)),
        k: (bk, bk),
    })
}

fn on_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64), tol: f64) -> bool {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0);
    let (qx, qy) = (a.0 + t * dx - p.0, a.1 + t * dy - p.1);
    (qx * qx + qy * qy).sqrt() <= tol
}

/// Closed polygon membership: edges within `tol` count as inside, otherwise
/// even-odd ray casting. Works for non-convex simple polygons.
pub fn point_in_polygon(p: (f64, f64), poly: &[(f64, f64)], tol: f64) -> bool {
    let n = poly.len();
    if (0..n).any(|i| on_segment(p, poly[i], poly[(i + 1) % n], tol)) {
        return true;
    }
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a.1 > p.1) != (b.1 > p.1) {
            let x = a.0 + (p.1 - a.1) * (b.0 - a.0) / (b.1 - a.1);
            if p.0 < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Region of (b, c) for d ≥ 3. Boundaries belong to the separable or
/// undistillable side.
pub fn classify_region(p: &CanonicalParams) -> Result<RegionLabel> {
    p.check_finite()?;
    if p.d < 3 {
        return invalid("region classification needs d ≥ 3");
    }
    if !p.is_physical() {
        return Ok(RegionLabel::Unphysical);
    }
    let s = pt_spectrum(p);
    if s.lambda0 >= -TOL {
        return Ok(if s.lambda1 >= -TOL { RegionLabel::SeparablePPT } else { RegionLabel::Npt2 });
    }
    let pts = region_points(p.d)?;
    if point_in_polygon((p.b, p.c), &pts.bcgk(), TOL) {
        Ok(RegionLabel::Npt1PseudoOneCopyUndistillable)
    } else {
        Ok(RegionLabel::Npt1OneCopyDistillable)
    }
}
