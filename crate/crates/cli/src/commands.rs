use std::time::Instant;

use anyhow::{bail, Context, Result};
use bentlab::canonical::{
    build_rho_bc, classify_region, pt_spectrum, tr_h_rho_bc, CanonicalParams, EpsParams, PTSpectrum, RegionLabel,
};
use bentlab::distill::{eps_threshold, f_value, min_rank2, size_cap, MinOptions, ThresholdReport};
use bentlab::json::{ChoiJson, EnsembleJson, StateJson};
use bentlab::posmaps::{is_2_positive_maxent, is_k_positive, ChoiMap, PositivityVerdict};
use bentlab::qmat::BipartiteState;
use bentlab::reduction::reduce_to_canonical;
use bentlab::sepcert::{decompose_ppt_point, verify_separable, ProductEnsemble, SeparabilityReport};
use bentlab::Error;
use serde::Serialize;

use crate::output::{emit, float, json, read, Csv, Envelope, RunMeta, BUILD_ID, VERSION};
use crate::{FscanArgs, ReduceArgs, RegionMapArgs, SearchArgs, ThresholdArgs, TwoPosArgs, VerifyArgs};

pub enum Status {
    Ok,
    Negative,
}

fn min_options(s: &SearchArgs, command: &str) -> Result<MinOptions> {
    let Some(seed) = s.seed else { bail!("{command} is stochastic: --seed is required") };
    if s.restarts == 0 {
        bail!("--restarts must be positive");
    }
    let mut o = MinOptions::with_seed(seed).restarts(s.restarts);
    if let Some(t) = s.tol {
        if !(t.is_finite() && t >= 0.0) {
            bail!("--tol must be a non-negative number");
        }
        o.tol = t;
    }
    if let Some(m) = s.max_iters {
        if m == 0 {
            bail!("--max-iters must be positive");
        }
        o.max_iters = m;
    }
    o.max_dim = size_cap(s.stress);
    Ok(o)
}

fn meta(command: &'static str, seed: Option<u64>, start: Instant) -> RunMeta {
    RunMeta { command, version: VERSION, build: BUILD_ID, seed, wall_time_s: start.elapsed().as_secs_f64() }
}

fn physical_extent(d: usize) -> Result<f64> {
    if d < 3 {
        bail!("--d must be at least 3, got {d}");
    }
    Ok(2.0 / (d * (d - 1)) as f64)
}

fn axis(n: usize, (lo, hi): (f64, f64)) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

pub fn region_map(a: &RegionMapArgs) -> Result<Status> {
    let extent = physical_extent(a.d)?;
    let opts = if a.f1 { Some(min_options(&a.search, "region-map --f1")?) } else { None };
    let check = |name: &str, r: (f64, f64)| -> Result<(f64, f64)> {
        if r.0 < 0.0 || r.1 > extent + 1e-15 {
            bail!("{name} range {}:{} leaves the physical range [0, {extent}]", r.0, r.1);
        }
        Ok(r)
    };
    let bs = axis(a.grid.0, check("b", a.b_range.unwrap_or((0.0, extent)))?);
    let cs = axis(a.grid.1, check("c", a.c_range.unwrap_or((0.0, extent)))?);
    let mut csv = Csv::new(&["b", "c", "label", "lambda0", "lambda1", "lambda2", "TrHrho", "f1min"]);
    let total = bs.len() * cs.len();
    for (i, &b) in bs.iter().enumerate() {
        for &c in &cs {
            let p = CanonicalParams::new(a.d, b, c);
            let label = classify_region(&p)?;
            let s = pt_spectrum(&p);
            let f1 = match (&opts, label) {
                (Some(o), l) if l != RegionLabel::Unphysical => {
                    let pt = build_rho_bc(&p)?.partial_transpose();
                    float(min_rank2(pt.matrix(), a.d, a.d, o)?.min_value)
                }
                _ => String::new(),
            };
            csv.row(&[
                float(b),
                float(c),
                label.to_string(),
                float(s.lambda0),
                float(s.lambda1),
                float(s.lambda2),
                float(tr_h_rho_bc(&p)),
                f1,
            ]);
        }
        if opts.is_some() {
            eprintln!("region-map: {}/{total} cells", (i + 1) * cs.len());
        }
    }
    emit(a.out.as_deref(), &csv.finish(a.search.seed))?;
    Ok(Status::Ok)
}

pub fn fscan(a: &FscanArgs) -> Result<Status> {
    let opts = min_options(&a.search, "fscan")?;
    let grid = match (&a.eps_grid, a.eps) {
        (Some(g), _) => g.0.clone(),
        (None, Some(e)) => vec![e],
        (None, None) => bail!("give --eps-grid or --eps"),
    };
    let mut csv = Csv::new(&["eps", "minValue", "converged"]);
    for (i, &eps) in grid.iter().enumerate() {
        let r = f_value(&EpsParams::new(a.d, a.c, eps), a.n, &opts).with_context(|| format!("eps = {eps}"))?;
        csv.row(&[float(eps), float(r.min_value), r.converged.to_string()]);
        eprintln!("fscan: {}/{} eps = {eps} min = {:e}", i + 1, grid.len(), r.min_value);
    }
    emit(a.out.as_deref(), &csv.finish(Some(opts.seed)))?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct ThresholdOut {
    d: usize,
    c: f64,
    n: usize,
    restarts: usize,
    #[serde(flatten)]
    report: ThresholdReport,
}

pub fn threshold(a: &ThresholdArgs) -> Result<Status> {
    let start = Instant::now();
    let opts = min_options(&a.search, "threshold")?;
    let report = eps_threshold(a.d, a.c, a.n, &opts)?;
    let out = ThresholdOut { d: a.d, c: a.c, n: a.n, restarts: opts.restarts, report };
    emit(a.out.as_deref(), &json(&Envelope { result: out, meta: meta("threshold", Some(opts.seed), start) })?)?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct TwoPosOut {
    tester: &'static str,
    #[serde(flatten)]
    verdict: PositivityVerdict,
}

pub fn two_pos(a: &TwoPosArgs) -> Result<Status> {
    let start = Instant::now();
    let opts = min_options(&a.search, "two-pos")?;
    let parsed: ChoiJson =
        serde_json::from_str(&read(&a.map)?).with_context(|| format!("parsing {}", a.map.display()))?;
    let map = ChoiMap::try_from(&parsed)?;
    let (tester, verdict) = if a.maxent {
        if a.k != 2 {
            bail!("--maxent searches Schmidt-rank-two inputs and needs --k 2");
        }
        ("maxent", is_2_positive_maxent(&map, &opts)?)
    } else {
        ("general", is_k_positive(&map, a.k, &opts)?)
    };
    emit(
        a.out.as_deref(),
        &json(&Envelope { result: TwoPosOut { tester, verdict }, meta: meta("two-pos", Some(opts.seed), start) })?,
    )?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct ReduceOut {
    npt: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<CanonicalParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<RegionLabel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    spectrum: Option<PTSpectrum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_pt_eigenvalue: Option<f64>,
}

pub fn reduce(a: &ReduceArgs) -> Result<Status> {
    let start = Instant::now();
    let parsed: StateJson =
        serde_json::from_str(&read(&a.input)?).with_context(|| format!("parsing {}", a.input.display()))?;
    let rho = BipartiteState::try_from(&parsed)?;
    let (out, status) = match reduce_to_canonical(&rho) {
        Ok((p, trace)) => {
            if let Some(path) = &a.trace {
                let mut csv = Csv::new(&["stage", "TrHrho", "trace", "minEig"]);
                for s in trace.summary() {
                    csv.row(&[s.stage.to_owned(), float(s.tr_h), float(s.trace), float(s.min_eig)]);
                }
                emit(Some(path), &csv.finish(None))?;
            }
            // d = 2 outputs have no region geometry
            let label = if p.d >= 3 { Some(classify_region(&p)?) } else { None };
            let out = ReduceOut {
                npt: true,
                params: Some(p),
                a: Some(p.a()),
                label,
                spectrum: Some(pt_spectrum(&p)),
                min_pt_eigenvalue: None,
            };
            (out, Status::Ok)
        }
        Err(Error::NotNpt { min_eigenvalue }) => {
            eprintln!("reduce: input has a positive partial transpose (min eigenvalue {min_eigenvalue:e})");
            let out = ReduceOut {
                npt: false,
                params: None,
                a: None,
                label: None,
                spectrum: None,
                min_pt_eigenvalue: Some(min_eigenvalue),
            };
            (out, Status::Negative)
        }
        Err(e) => return Err(e.into()),
    };
    emit(a.out.as_deref(), &json(&Envelope { result: out, meta: meta("reduce", None, start) })?)?;
    Ok(status)
}

#[derive(Serialize)]
struct VerifyOut {
    d: usize,
    b: f64,
    c: f64,
    label: RegionLabel,
    source: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<SeparabilityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
}

pub fn verify(a: &VerifyArgs) -> Result<Status> {
    let start = Instant::now();
    physical_extent(a.d)?;
    let p = match (&a.point, a.b, a.c) {
        (Some(name), _, _) => bentlab::canonical::region_points(a.d)?
            .get(name)
            .with_context(|| format!("unknown point {name:?}; expected one of A B C F G H J K"))?,
        (None, Some(b), Some(c)) => CanonicalParams::new(a.d, b, c),
        _ => bail!("give either --point or both --b and --c"),
    };
    if !(a.tol.is_finite() && a.tol > 0.0) {
        bail!("--tol must be positive");
    }
    let label = classify_region(&p)?;
    if label == RegionLabel::Unphysical {
        bail!("(b, c) = ({}, {}) is not a state at d = {}", p.b, p.c, a.d);
    }
    let rho = build_rho_bc(&p)?;
    let (source, ensemble) = match &a.input {
        Some(path) => {
            let parsed: EnsembleJson =
                serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
            ("file", Some(ProductEnsemble::try_from(&parsed)?))
        }
        None if label == RegionLabel::SeparablePPT => ("builtin", Some(decompose_ppt_point(&p)?)),
        None => ("builtin", None),
    };
    let (report, reason) = match ensemble {
        Some(e) => (Some(verify_separable(&e, &rho, a.tol)), None),
        None => (None, Some(format!("no separable decomposition for a {label} point"))),
    };
    let passed = report.as_ref().is_some_and(|r| r.passed);
    let out = VerifyOut { d: a.d, b: p.b, c: p.c, label, source, report, reason };
    emit(a.out.as_deref(), &json(&Envelope { result: out, meta: meta("verify", None, start) })?)?;
    Ok(if passed { Status::Ok } else { Status::Negative })
}
