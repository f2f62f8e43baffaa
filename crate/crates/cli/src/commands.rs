use std::path::PathBuf;
use std::str::FromStr;

use fuplab::fup_core::{fourier_restricted_norm, scan_and_fit, volume_baseline, FupInstance};
use fuplab::fup_operators::{hyperbolic_norm, phase_restricted_norm_with, synthetic_circle, ChiSpec, Phase, PhaseSpec, Rect};
use fuplab::generators::{cantor_constant, gen_cantor, gen_schottky_cover, CantorSpec, SchottkySpec};
use fuplab::harmonic_measure::{
    brownian_exit, slit_mass_lower_bound, slit_plane_chi_square, strip_chi_square, subharmonic_from, ChiSquare,
    DomainKind, ExitDistribution, Piece, SlitDomainSpec, TestFunction, PIECES,
};
use fuplab::multiplier_iteration::{build_weight, iterate_fup, unique_continuation_constant, IterationConfig, UnitWindow};
use fuplab::rational::{self, qi, to_f64};
use fuplab::regular_sets::verify_regularity;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::*;
use crate::io::*;

/// What a subcommand produced.
pub struct Report {
    pub outputs: Vec<PathBuf>,
    pub results: Value,
    pub seeds: Value,
    /// Names of assertions that failed.
    pub failures: Vec<String>,
}

impl Report {
    fn new(outputs: Vec<PathBuf>, results: Value) -> Self {
        Report {
            outputs,
            results,
            seeds: Value::Null,
            failures: Vec::new(),
        }
    }

    fn check(mut self, name: &str, ok: bool) -> Self {
        if !ok {
            self.failures.push(name.to_string());
        }
        self
    }
}

pub fn run(cmd: &Command) -> CliResult<Report> {
    match cmd {
        Command::Gen(GenKind::Cantor(a)) => gen_cantor_cmd(a),
        Command::Gen(GenKind::Schottky(a)) => gen_schottky_cmd(a),
        Command::Verify(a) => verify(a),
        Command::FupNorm(a) => fup_norm(a),
        Command::FupScan(a) => fup_scan(a),
        Command::HyperbolicNorm(a) => hyperbolic(a),
        Command::PhaseNorm(a) => phase(a),
        Command::Harmonic(HarmonicKind::Check(a)) => harmonic(a),
        Command::Weight(a) => weight(a),
        Command::UcConstant(a) => uc_constant(a),
        Command::Iterate(a) => iterate(a),
    }
}

/// Seed of the named substream: FNV-1a of the name mixed into the root
/// seed by a SplitMix64 finalizer.
pub fn substream(seed: u64, name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
    }
    let mut z = seed ^ h;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn digits(field: &str, s: &str) -> CliResult<Vec<u32>> {
    s.split(',')
        .map(|d| {
            d.trim()
                .parse()
                .map_err(|_| CliError::config(field, format!("`{d}` is not a digit")))
        })
        .collect()
}

fn constant(field: &str, cr: Option<f64>, claimed: Option<f64>) -> CliResult<f64> {
    let c = cr
        .or(claimed)
        .ok_or_else(|| CliError::config(field, "required when the set carries no claim"))?;
    if !(c >= 1.0 && c.is_finite()) {
        return Err(CliError::config(field, format!("{c} is not a finite value ≥ 1")));
    }
    Ok(c)
}

fn dimension(field: &str, delta: Option<f64>, claimed: Option<f64>) -> CliResult<f64> {
    delta
        .or(claimed)
        .ok_or_else(|| CliError::config(field, "required when the set carries no claim"))
}

fn gen_cantor_cmd(a: &GenCantorArgs) -> CliResult<Report> {
    let spec = CantorSpec::new(a.base, digits("gen.cantor.alphabet", &a.alphabet)?, a.depth).at("gen.cantor")?;
    let c = gen_cantor(&spec).at("gen.cantor")?;
    let cert = c.verify().at("gen.cantor")?;
    write_json(&a.out, &c.set)?;
    let results = json!({
        "cells": c.set.len(),
        "claim": c.claim,
        "worst_ratio_upper": cert.worst_ratio_upper,
        "worst_ratio_lower": cert.worst_ratio_lower,
        "bounds": { "upper": c.claim.c_r, "lower": 1.0 / c.claim.c_r },
        "verified": cert.verified,
    });
    Ok(Report::new(vec![a.out.clone()], results).check("claim re-verifies", cert.verified))
}

fn gen_schottky_cmd(a: &GenSchottkyArgs) -> CliResult<Report> {
    let spec = match &a.spec {
        Some(p) => {
            let s: SchottkySpec = read_json("gen.schottky.spec", p)?;
            s.validate().at("gen.schottky.spec")?;
            s
        }
        None => SchottkySpec::symmetric(a.radius, a.depth).at("gen.schottky")?,
    };
    let c = gen_schottky_cover(&spec).at("gen.schottky")?;
    write_json(&a.out, &c.set)?;
    let results = json!({
        "cells": c.set.len(),
        "arcs": c.arcs.len(),
        "delta_estimate": c.delta,
        "fit_residual": c.residual,
        "grid_depth": c.grid_depth,
    });
    Ok(Report::new(vec![a.out.clone()], results))
}

fn verify(a: &VerifyArgs) -> CliResult<Report> {
    let x = load_set("verify.set", &a.set)?;
    let delta = dimension("verify.delta", a.delta, x.delta())?;
    let c_r = constant("verify.cr", a.cr, x.c_r())?;
    let q = |field: &str, s: &Option<String>, claimed: Option<fuplab::Q>, default: fuplab::Q| match s {
        Some(s) => rational::parse(s).at(field),
        None => Ok(claimed.unwrap_or(default)),
    };
    let alpha0 = q("verify.alpha0", &a.alpha0, x.claim.as_ref().map(|c| c.alpha0), x.set.width())?;
    let alpha1 = q("verify.alpha1", &a.alpha1, x.claim.as_ref().map(|c| c.alpha1), qi(1))?;
    if alpha0 > alpha1 {
        return Err(CliError::config("verify.alpha0", "exceeds alpha1"));
    }
    let cert = verify_regularity(&x.set, delta, c_r, alpha0, alpha1).at("verify")?;
    write_json(&a.out, &cert)?;
    let results = json!({
        "verified": cert.verified,
        "worst_ratio_upper": cert.worst_ratio_upper,
        "worst_ratio_lower": cert.worst_ratio_lower,
        "bounds": { "upper": c_r, "lower": 1.0 / c_r },
        "sizes_scanned": cert.sizes_scanned,
        "intervals_scanned": cert.intervals_scanned,
    });
    Ok(Report::new(vec![a.out.clone()], results).check("regularity", cert.verified))
}

fn fup_norm(a: &FupNormArgs) -> CliResult<Report> {
    let (inst, claims) = match (&a.instance, &a.x, &a.y) {
        (Some(p), _, _) => {
            let i: FupInstance = read_json("fup-norm.instance", p)?;
            (FupInstance::new(i.n, i.x_idx, i.y_idx).at("fup-norm.instance")?, None)
        }
        (None, Some(x), Some(y)) => {
            let x = load_set("fup-norm.x", x)?;
            let y = load_set("fup-norm.y", y)?;
            let n = a.n.unwrap_or((x.set.base() as usize).pow(x.set.depth()));
            let inst = FupInstance::from_sets(&x.set, &y.set, n).at("fup-norm")?;
            let claims = x.claim.zip(y.claim).map(|(cx, cy)| (cx.delta.max(cy.delta), cx.c_r.max(cy.c_r)));
            (inst, claims)
        }
        _ => return Err(CliError::config("fup-norm.instance", "give --instance or both --x and --y")),
    };
    let norm = fourier_restricted_norm(&inst);
    let cs = ((inst.x_idx.len() * inst.y_idx.len()) as f64 / inst.n as f64).sqrt().min(1.0);
    let mut report_bounds = json!({ "unitary": 1.0, "cauchy_schwarz": cs });
    let mut ok = norm.value <= cs + 1e-9;
    if let Some((delta, c_r)) = claims {
        let v = volume_baseline(&inst, delta, c_r);
        report_bounds["volume"] = json!(v.bound);
        ok &= v.holds;
    }
    let results = json!({
        "n": inst.n,
        "x_len": inst.x_idx.len(),
        "y_len": inst.y_idx.len(),
        "norm": norm,
        "bounds": report_bounds,
    });
    write_json(&a.out, &results)?;
    Ok(Report::new(vec![a.out.clone()], results).check("norm within bounds", ok))
}

#[derive(Serialize)]
struct ScanCsvRow {
    k: u32,
    #[serde(rename = "N")]
    n: usize,
    norm: f64,
    log_ratio: f64,
    cauchy_schwarz_bound: f64,
    /// `24 C_R² N^{δ−1/2}` when δ < 1/2.
    volume_bound: Option<f64>,
}

fn fup_scan(a: &FupScanArgs) -> CliResult<Report> {
    let sx = CantorSpec::parse(&a.cantor, 1).at("fup-scan.cantor")?;
    let sy = match &a.cantor_y {
        Some(s) => CantorSpec::parse(s, 1).at("fup-scan.cantor-y")?,
        None => sx.clone(),
    };
    if a.kmin < 1 {
        return Err(CliError::config("fup-scan.kmin", "must be at least 1"));
    }
    if a.kmax < a.kmin + 2 {
        return Err(CliError::config("fup-scan.kmax", "need at least three depths"));
    }
    if (sx.base as f64).powi(a.kmax as i32) > 1e6 {
        return Err(CliError::config("fup-scan.kmax", "N = L^kmax exceeds 10^6"));
    }
    let fit = scan_and_fit(&sx, &sy, a.kmin..=a.kmax).at("fup-scan")?;
    let delta = sx.delta().max(sy.delta());
    let c_r = cantor_constant(sx.base, &sx.alphabet)
        .at("fup-scan.cantor")?
        .max(cantor_constant(sy.base, &sy.alphabet).at("fup-scan.cantor-y")?);
    let rows: Vec<ScanCsvRow> = fit
        .rows
        .iter()
        .map(|r| {
            let n = r.n as f64;
            let sizes = (sx.alphabet.len() as f64 * sy.alphabet.len() as f64).powi(r.k as i32);
            ScanCsvRow {
                k: r.k,
                n: r.n,
                norm: r.norm,
                log_ratio: r.log_ratio,
                cauchy_schwarz_bound: (sizes / n).sqrt().min(1.0),
                volume_bound: (delta < 0.5).then(|| 24.0 * c_r * c_r * n.powf(delta - 0.5)),
            }
        })
        .collect();
    let ok = rows
        .iter()
        .all(|r| r.norm <= r.cauchy_schwarz_bound + 1e-9 && r.volume_bound.map_or(true, |b| r.norm <= b + 1e-9));
    write_csv(&a.out, &rows)?;
    let fit_path = sibling(&a.out, "fit.json");
    let results = json!({
        "delta": delta,
        "c_r": c_r,
        "beta_fit": fit.beta_fit,
        "beta_stderr": fit.stderr,
        "lower_half_slope": fit.lower.slope,
        "upper_half_slope": fit.upper.slope,
        "half_disagreement": fit.half_disagreement(),
        "strictly_decreasing": fit.strictly_decreasing(),
    });
    write_json(&fit_path, &json!({ "summary": results, "fit": fit }))?;
    Ok(Report::new(vec![a.out.clone(), fit_path], results).check("norms within bounds", ok))
}

/// The norm bound `C h^β` has no explicit constant; the entry says so.
fn unspecified_bound(h: f64) -> Value {
    json!({ "form": "C*h^beta", "constant": null, "h": h, "unitary": 1.0 })
}

fn hyperbolic(a: &HyperbolicArgs) -> CliResult<Report> {
    let (set, chi, h) = match (a.synthetic, &a.set, &a.chi) {
        (Some(k), _, _) => {
            let (set, chi) = synthetic_circle(k).at("hyperbolic-norm.synthetic")?;
            (set, chi, a.h.unwrap_or(3f64.powi(-(k as i32))))
        }
        (None, Some(s), Some(c)) => {
            let set = load_set("hyperbolic-norm.set", s)?.set;
            let chi: ChiSpec = read_json("hyperbolic-norm.chi", c)?;
            let h = a.h.ok_or_else(|| CliError::config("hyperbolic-norm.h", "required without --synthetic"))?;
            (set, chi, h)
        }
        _ => return Err(CliError::config("hyperbolic-norm.set", "give --set with --chi, or --synthetic")),
    };
    if !(h > 0.0 && h < 1.0) {
        return Err(CliError::config("hyperbolic-norm.h", "must lie in (0, 1)"));
    }
    let norm = hyperbolic_norm(&set, h, &chi, a.rho).at("hyperbolic-norm")?;
    let results = json!({
        "h": h,
        "rho": a.rho,
        "chi": chi,
        "diagonal_distance": chi.diagonal_distance(),
        "norm": norm,
        "bound": unspecified_bound(h),
    });
    write_json(&a.out, &results)?;
    Ok(Report::new(vec![a.out.clone()], results).check("norm finite", norm.value.is_finite()))
}

fn default_phase() -> PhaseSpec {
    PhaseSpec::new(Phase::Linear, Rect::new((-1.0, 2.0), (-1.0, 2.0)).expect("valid rectangle")).expect("linear phase")
}

fn phase(a: &PhaseArgs) -> CliResult<Report> {
    let x = load_set("phase-norm.x", &a.x)?.set;
    let y = load_set("phase-norm.y", &a.y)?.set;
    if !(a.h > 0.0 && a.h < 1.0) {
        return Err(CliError::config("phase-norm.h", "must lie in (0, 1)"));
    }
    let spec = match &a.phase {
        Some(p) => {
            let s: PhaseSpec = read_json("phase-norm.phase", p)?;
            s.check_phase().at("phase-norm.phase")?;
            s
        }
        None => default_phase(),
    };
    let norm = phase_restricted_norm_with(&x, &y, a.h, &spec, a.rho, a.nodes_per_h).at("phase-norm")?;
    let mut results = json!({
        "h": a.h,
        "rho": a.rho,
        "nodes_per_h": a.nodes_per_h,
        "phase": spec,
        "norm": norm,
        "bound": unspecified_bound(a.h),
    });
    // A linear phase at h = 1/N is compared with the discrete transform.
    let n = (1.0 / a.h).round();
    if spec.phase == Phase::Linear && ((1.0 / a.h) - n).abs() < 1e-9 * n {
        let inst = FupInstance::from_sets(&x, &y, n as usize).at("phase-norm")?;
        let d = fourier_restricted_norm(&inst).value;
        results["dft_reference"] = json!({ "n": n as usize, "norm": d, "relative_difference": (norm.value - d).abs() / d });
    }
    write_json(&a.out, &results)?;
    Ok(Report::new(vec![a.out.clone()], results).check("norm finite", norm.value.is_finite()))
}

fn piece_name(p: Piece) -> &'static str {
    match p {
        Piece::SlitPlus => "slit-plus",
        Piece::SlitMinus => "slit-minus",
        Piece::UpperLine => "upper-line",
        Piece::LowerLine => "lower-line",
    }
}

fn test_catalog() -> Vec<(&'static str, TestFunction)> {
    vec![
        ("one", TestFunction::One),
        ("exp(iz)", TestFunction::Exp { a: 1.0 }),
        ("exp(-2iz)", TestFunction::Exp { a: -2.0 }),
        ("(2+z)exp(-iz/2)", TestFunction::PolyExp { coeffs: vec![2.0, 1.0], a: -0.5 }),
        ("(1/2+z^2)exp(3iz/2)", TestFunction::PolyExp { coeffs: vec![0.5, 0.0, 1.0], a: 1.5 }),
    ]
}

fn chi_entry(c: &ChiSquare) -> Value {
    json!({ "statistic": c.statistic, "dof": c.dof, "p_value": c.p_value })
}

#[derive(Serialize)]
struct HistRow {
    piece: &'static str,
    lo: f64,
    hi: f64,
    count: usize,
    fraction: f64,
    sigma: f64,
}

fn histogram(dist: &ExitDistribution) -> Vec<HistRow> {
    let (a, b) = dist.spec.slit;
    let t = dist.spec.t;
    let mut rows = Vec::new();
    for p in PIECES {
        let (lo, hi, bins) = match p {
            Piece::SlitPlus | Piece::SlitMinus => (a, b, 40),
            _ => (t - 4.0, t + 4.0, 80),
        };
        let edges: Vec<f64> = (0..=bins).map(|i| lo + (hi - lo) * i as f64 / bins as f64).collect();
        for bin in dist.histogram(p, &edges) {
            rows.push(HistRow {
                piece: piece_name(p),
                lo: bin.lo,
                hi: bin.hi,
                count: bin.count,
                fraction: bin.fraction,
                sigma: bin.sigma,
            });
        }
    }
    rows
}

fn harmonic(a: &HarmonicArgs) -> CliResult<Report> {
    let kind = DomainKind::from_str(&a.domain).at("harmonic.check")?;
    let slit = match (&a.slit, kind) {
        (Some(s), _) => pair("harmonic.check.slit", s)?,
        // The strip walk never meets the slit; any placement off t will do.
        (None, DomainKind::Strip) => (a.t + 1.0, a.t + 2.0),
        (None, _) => return Err(CliError::config("harmonic.check.slit", "required for slit domains")),
    };
    let spec = SlitDomainSpec::new(a.r, slit, a.t).at("harmonic.check")?;
    let walk_seed = substream(a.seed, "harmonic.walk");
    let dist = brownian_exit(&spec, kind, a.paths, walk_seed).at("harmonic.check")?;

    let mut estimates = Map::new();
    let mut sigmas = Map::new();
    let mut bounds = Map::new();
    let mut verdicts = Map::new();
    for p in PIECES {
        estimates.insert(piece_name(p).into(), json!(dist.fraction(p)));
        sigmas.insert(piece_name(p).into(), json!(dist.sigma(p)));
    }
    match kind {
        DomainKind::Strip => {
            let c = strip_chi_square(&dist).at("harmonic.check")?;
            estimates.insert("chi_square".into(), chi_entry(&c));
            for p in [Piece::UpperLine, Piece::LowerLine] {
                bounds.insert(piece_name(p).into(), json!(0.5));
            }
            bounds.insert("chi_square_p_min".into(), json!(0.01));
            verdicts.insert("chi_square".into(), json!(c.passes));
        }
        DomainKind::SlitPlane => {
            let c = slit_plane_chi_square(&dist).at("harmonic.check")?;
            estimates.insert("chi_square".into(), chi_entry(&c));
            for p in [Piece::SlitPlus, Piece::SlitMinus] {
                bounds.insert(piece_name(p).into(), json!(0.5));
            }
            bounds.insert("chi_square_p_min".into(), json!(0.01));
            verdicts.insert("chi_square".into(), json!(c.passes));
        }
        DomainKind::SlitStrip => {
            let lb = slit_mass_lower_bound(&spec);
            bounds.insert("slit_lower".into(), json!(lb));
            bounds.insert("slit_upper".into(), json!(0.5));
            // The lower bound is proved for d(t, I0) ≤ 1 only.
            let applies = spec.distance() <= 1.0;
            let mut lower_ok = true;
            let mut upper_ok = true;
            for p in [Piece::SlitPlus, Piece::SlitMinus] {
                lower_ok &= dist.fraction(p) >= lb - 3.0 * dist.sigma(p);
                upper_ok &= dist.fraction(p) <= 0.5 + 3.0 * dist.sigma(p);
            }
            verdicts.insert("slit_lower".into(), if applies { json!(lower_ok) } else { Value::Null });
            verdicts.insert("slit_upper".into(), json!(upper_ok));
            let mut est = Map::new();
            let mut sig = Map::new();
            let mut bnd = Map::new();
            let mut ver = Map::new();
            for (name, f) in test_catalog() {
                let s = subharmonic_from(&dist, &f).at("harmonic.check")?;
                est.insert(name.into(), json!(s.rhs));
                sig.insert(name.into(), json!(s.sigma));
                bnd.insert(name.into(), json!(s.lhs + 0.0));
                ver.insert(name.into(), json!(s.holds));
            }
            estimates.insert("subharmonic_mean".into(), Value::Object(est));
            sigmas.insert("subharmonic_mean".into(), Value::Object(sig));
            bounds.insert("subharmonic_log_f_at_t".into(), Value::Object(bnd));
            verdicts.insert("subharmonic".into(), Value::Object(ver));
        }
    }
    let failures = failed_verdicts(&verdicts, "");
    let results = json!({
        "domain": kind,
        "spec": spec,
        "paths": a.paths,
        "total_steps": dist.total_steps,
        "estimates": estimates,
        "sigmas": sigmas,
        "paper_bounds": bounds,
        "verdicts": verdicts,
    });
    write_json(&a.out, &results)?;
    let mut outputs = vec![a.out.clone()];
    if let Some(h) = &a.histogram {
        write_csv(h, &histogram(&dist))?;
        outputs.push(h.clone());
    }
    let mut r = Report::new(outputs, results);
    r.seeds = json!({ "seed": a.seed, "substreams": { "harmonic.walk": walk_seed } });
    r.failures = failures;
    Ok(r)
}

fn failed_verdicts(v: &Map<String, Value>, prefix: &str) -> Vec<String> {
    let mut out = Vec::new();
    for (k, val) in v {
        match val {
            Value::Bool(false) => out.push(format!("{prefix}{k}")),
            Value::Object(m) => out.extend(failed_verdicts(m, &format!("{prefix}{k}."))),
            _ => {}
        }
    }
    out
}

fn weight(a: &WeightArgs) -> CliResult<Report> {
    let y = load_set("weight.y", &a.y)?.at_frequency_scale("weight.y")?;
    let delta = dimension("weight.delta", a.delta, y.delta())?;
    let c_r = constant("weight.cr", a.cr, y.c_r())?;
    let w = build_weight(&y.set, delta, c_r).at("weight")?;
    write_json(&a.out, &w)?;
    let ad = &w.admissibility;
    let results = json!({
        "delta": delta,
        "c_r": c_r,
        "annuli": w.covers.len(),
        "grid_points": w.grid.len(),
        "checks": w.checks,
        "log_integral": ad.log_integral,
        "sup_log_derivative": ad.sup_log_derivative,
        "paper_bounds": { "log_integral": w.c0, "sup_log_derivative": 1e5 },
    });
    Ok(Report::new(vec![a.out.clone()], results)
        .check("upper_everywhere", w.checks.upper_everywhere)
        .check("decay_on_y", w.checks.decay_on_y)
        .check("sup_log_derivative", ad.sup_log_derivative <= 1e5)
        .check("log_integral", ad.log_integral <= w.c0))
}

fn uc_constant(a: &UcArgs) -> CliResult<Report> {
    let y = load_set("uc-constant.y", &a.y)?.at_frequency_scale("uc-constant.y")?;
    let window = match &a.window {
        Some(s) => {
            let (o, l) = pair("uc-constant.window", s)?;
            UnitWindow::new(o, l).at("uc-constant")?
        }
        None => UnitWindow::centered(a.c1).at("uc-constant.c1")?,
    };
    let u = unique_continuation_constant(&y.set, &window, a.period).at("uc-constant")?;
    let mut results = json!({ "window": window, "constant": u });
    let mut r = Report::new(vec![a.out.clone()], Value::Null).check("c3 positive", u.c3 > 0.0);
    if y.set.is_point() {
        let exact = window.length.sqrt();
        results["exact_point_value"] = json!(exact);
        r = r.check("point value", u.c3 == exact);
    }
    write_json(&a.out, &results)?;
    r.results = results;
    Ok(r)
}

#[derive(Serialize)]
struct StepCsvRow {
    m: u32,
    norm: f64,
    bound: f64,
    bound_holds: bool,
    ratio: Option<f64>,
    step_cap: f64,
    factor_norm: Option<f64>,
}

fn iterate(a: &IterateArgs) -> CliResult<Report> {
    let x = load_set("iterate.x", &a.x)?;
    let y = load_set("iterate.y", &a.y)?.at_frequency_scale("iterate.y")?;
    let cfg = IterationConfig::new(a.l, a.t).at("iterate")?;
    let r = iterate_fup(&x.set, &y.set, a.m, &cfg).at("iterate")?;
    let cap = (1.0 - r.tau) / (1.0 - r.eps);
    let rows: Vec<StepCsvRow> = r
        .steps
        .iter()
        .map(|s| StepCsvRow {
            m: s.m,
            norm: s.norm,
            bound: s.bound,
            bound_holds: s.bound_holds,
            ratio: s.ratio,
            step_cap: cap,
            factor_norm: s.factor_norm,
        })
        .collect();
    write_csv(&a.out, &rows)?;
    let json_path = sibling(&a.out, "json");
    write_json(&json_path, &r)?;
    let results = json!({
        "big_n": r.big_n,
        "m_requested": r.m_requested,
        "m_reached": r.m_reached,
        "tau": r.tau,
        "eps": r.eps,
        "step_cap": cap,
        "beta": r.beta,
        "direct_norm": r.direct_norm,
        "dft_norm": r.dft_norm,
        "t_fixed_holds": r.t_fixed_holds,
        "x_hull": [to_f64(&x.set.hull().0), to_f64(&x.set.hull().1)],
    });
    Ok(Report::new(vec![a.out.clone(), json_path], results)
        .check("tau positive", r.tau > 0.0)
        .check("product bound", r.product_bound_holds())
        .check("step ratios", r.ratios_within_step_bound()))
}
