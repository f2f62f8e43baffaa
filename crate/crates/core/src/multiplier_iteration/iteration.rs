//! Coarse-graining weights and the contraction iteration on the torus `ℝ/Pℤ`.
//!
//! Functions are trigonometric polynomials with frequencies `j/P`. A weight
//! `w` acts on the span of `{e^{2πijx/P} : j ∈ Λ}` through the Gram matrix
//! `G[a,b] = (w²)^(j_a − j_b)`, so `‖w P_Λ‖² = λ_max(G)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fup_core::{fourier_restricted_norm, grid_indices, FupInstance};
use crate::linalg::{hermitian_max, lanczos_max, CMat, CVec, Method};
use crate::rational::{ceil_i64, pow, qi, to_f64, Q};
use crate::regular_sets::{grid_cover, RegularSetApprox};

/// Default torus period.
pub const DEFAULT_PERIOD: i64 = 4;
/// Largest Gram matrix handled densely.
pub const DENSE_LIMIT: usize = 512;
const LANCZOS_TOL: f64 = 1e-13;
const LANCZOS_ITER: usize = 1000;
/// Slack when comparing measured norms against bounds.
pub const BOUND_SLACK: f64 = 1e-9;

/// Mollifier catalog. Both are nonnegative with unit integral and
/// `supp φ̂ = [-1, 1]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhiKind {
    /// `φ(x) = (3/4)·sinc⁴(x/2)`, `φ̂(ξ) = (3/2)·B₃(2ξ)` with `B₃` the cubic B-spline.
    #[default]
    SincFourth,
    /// `φ(x) = sinc²(x)`, `φ̂(ξ) = (1 − |ξ|)₊`.
    Fejer,
}

fn sinc(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        (PI * t).sin() / (PI * t)
    }
}

fn cubic_bspline(u: f64) -> f64 {
    let a = u.abs();
    if a <= 1.0 {
        2.0 / 3.0 - a * a + a * a * a / 2.0
    } else if a <= 2.0 {
        (2.0 - a).powi(3) / 6.0
    } else {
        0.0
    }
}

impl PhiKind {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            PhiKind::SincFourth => 0.75 * sinc(x / 2.0).powi(4),
            PhiKind::Fejer => sinc(x).powi(2),
        }
    }

    pub fn fourier(self, xi: f64) -> f64 {
        match self {
            PhiKind::SincFourth => 1.5 * cubic_bspline(2.0 * xi),
            PhiKind::Fejer => (1.0 - xi.abs()).max(0.0),
        }
    }

    /// `∫_{|x|>R} φ`, as `1 − 2∫_0^R φ` by composite Simpson.
    pub fn tail_mass(self, r: f64) -> f64 {
        if r <= 0.0 {
            return 1.0;
        }
        let n = 2 * ((r / 0.01).ceil() as usize).max(1);
        let h = r / n as f64;
        let mut s = self.eval(0.0) + self.eval(r);
        for i in 1..n {
            s += self.eval(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        (1.0 - 2.0 * s * h / 3.0).max(0.0)
    }
}

/// `ε_T = ∫_{|x| > L^{T-1}/10} φ`, so that `Ψ_n ≥ 1 − ε_T` on `X`; `C_φ = ε_T·L^{T-1}`.
pub fn psi_tail(phi: PhiKind, t: u32, l: u32) -> f64 {
    phi.tail_mass((l as f64).powi(t as i32 - 1) / 10.0)
}

/// Fourier coefficients `c_j = (1/P)∫_U e^{-2πijx/P}dx`, `|j| ≤ reach`, index `j + reach`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub reach: usize,
    pub c: Vec<Complex64>,
}

impl Coefficients {
    pub fn get(&self, j: i64) -> Complex64 {
        if j.unsigned_abs() as usize > self.reach {
            Complex64::from(0.0)
        } else {
            self.c[(j + self.reach as i64) as usize]
        }
    }

    pub fn delta() -> Self {
        Coefficients {
            reach: 0,
            c: vec![Complex64::from(1.0)],
        }
    }

    pub fn truncate(&self, reach: usize) -> Self {
        if reach >= self.reach {
            return self.clone();
        }
        let off = self.reach - reach;
        Coefficients {
            reach,
            c: self.c[off..off + 2 * reach + 1].to_vec(),
        }
    }

    /// `Σ_j c_j e^{2πijx/P}`.
    pub fn eval(&self, x: f64, period: i64) -> Complex64 {
        let w = 2.0 * PI * x / period as f64;
        (0..self.c.len())
            .map(|i| self.c[i] * Complex64::from_polar(1.0, w * (i as f64 - self.reach as f64)))
            .sum()
    }

    /// Samples on `x_s = sP/S`.
    pub fn samples(&self, s: usize) -> Vec<Complex64> {
        assert!(s > 2 * self.reach);
        let mut buf = vec![Complex64::from(0.0); s];
        for (i, c) in self.c.iter().enumerate() {
            let j = i as i64 - self.reach as i64;
            buf[j.rem_euclid(s as i64) as usize] += c;
        }
        FftPlanner::new().plan_fft_inverse(s).process(&mut buf);
        buf
    }

    /// Inverse of [`Coefficients::samples`] keeping `|j| ≤ reach`.
    pub fn from_samples(mut buf: Vec<Complex64>, reach: usize) -> Self {
        let s = buf.len();
        FftPlanner::new().plan_fft_forward(s).process(&mut buf);
        let scale = 1.0 / s as f64;
        let c = (-(reach as i64)..=reach as i64)
            .map(|j| buf[j.rem_euclid(s as i64) as usize] * scale)
            .collect();
        Coefficients { reach, c }
    }

    /// Coefficients of `Π w_i²`, computed exactly by sampling above the Nyquist rate.
    pub fn product_of_squares(ws: &[&Coefficients]) -> Self {
        if ws.is_empty() {
            return Self::delta();
        }
        let reach: usize = 2 * ws.iter().map(|w| w.reach).sum::<usize>();
        let s = (2 * reach + 1).next_power_of_two();
        let mut acc = vec![Complex64::from(1.0); s];
        for w in ws {
            let v = w.samples(s);
            acc.par_iter_mut().zip(&v).for_each(|(a, b)| *a *= b * b);
        }
        Self::from_samples(acc, reach)
    }
}

/// Sorts and merges closed intervals.
pub fn merge_intervals(mut ivs: Vec<(Q, Q)>) -> Vec<(Q, Q)> {
    ivs.sort();
    let mut out: Vec<(Q, Q)> = Vec::with_capacity(ivs.len());
    for (a, b) in ivs {
        match out.last_mut() {
            Some(last) if a <= last.1 => {
                if b > last.1 {
                    last.1 = b;
                }
            }
            _ => out.push((a, b)),
        }
    }
    out
}

/// Exact Fourier coefficients of `1_U` on the torus of period `P`.
///
/// `1_U' = Σ δ_a − δ_b`; the endpoints sit on a grid of `M = P·D·q` points
/// with `D` the common denominator, so one FFT gives every coefficient.
pub fn indicator_coefficients(u: &[(Q, Q)], period: i64, reach: usize) -> Result<Coefficients> {
    let u = merge_intervals(u.to_vec());
    let len: Q = u.iter().map(|(a, b)| b - a).sum();
    let p = qi(period as i128);
    if len > p {
        return Err(invalid("u", "intervals longer than the period"));
    }
    if len == p {
        let mut c = vec![Complex64::from(0.0); 2 * reach + 1];
        c[reach] = Complex64::from(1.0);
        return Ok(Coefficients { reach, c });
    }
    let den = u.iter().fold(1i128, |d, (a, b)| d.lcm(a.denom()).lcm(b.denom()));
    let base = (period as i128)
        .checked_mul(den)
        .ok_or_else(|| invalid("u", "endpoint denominators too large"))?;
    let q = (2 * reach as i128 + 1 + base - 1) / base;
    let m = (base * q.max(1)) as usize;
    let mut buf = vec![Complex64::from(0.0); m];
    let pos = |x: &Q| -> usize {
        let k = (x * qi(den * q.max(1))).to_integer();
        k.rem_euclid(m as i128) as usize
    };
    for (a, b) in &u {
        buf[pos(a)] += 1.0;
        buf[pos(b)] -= 1.0;
    }
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let c = (-(reach as i64)..=reach as i64)
        .map(|j| {
            if j == 0 {
                Complex64::from(to_f64(&len) / period as f64)
            } else {
                buf[j.rem_euclid(m as i64) as usize] / Complex64::new(0.0, 2.0 * PI * j as f64)
            }
        })
        .collect();
    Ok(Coefficients { reach, c })
}

/// Lattice numerators `j` with `j/P` in the half-open union of `ivs`.
pub fn lattice_in(ivs: &[(Q, Q)], period: i64) -> Vec<i64> {
    let p = qi(period as i128);
    let mut out: Vec<i64> = Vec::new();
    for (a, b) in merge_intervals(ivs.to_vec()) {
        let lo = ceil_i64(&(&a * &p));
        let hi = ceil_i64(&(&b * &p));
        let from = out.last().map_or(lo, |&l| lo.max(l + 1));
        out.extend(from..hi);
    }
    out
}

/// `λ_max` of `G[a,b] = w(j_a − j_b)` over the lattice points `freqs`.
pub fn gram_max(freqs: &[i64], w: &Coefficients) -> Result<(f64, Method, usize, f64)> {
    let n = freqs.len();
    if n == 0 {
        return Err(Error::EmptySupport);
    }
    if n <= DENSE_LIMIT {
        let g = CMat::from_fn(n, n, |a, b| w.get(freqs[a] - freqs[b]));
        let e = hermitian_max(&g);
        return Ok((e.value, e.method, e.iterations, e.residual));
    }
    let j0 = freqs[0];
    let span = (freqs[n - 1] - j0) as usize;
    let w = w.truncate(span);
    let s = (span + w.reach + 1).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(s);
    let inv = planner.plan_fft_inverse(s);
    let mut kernel = vec![Complex64::from(0.0); s];
    for (i, c) in w.c.iter().enumerate() {
        let t = i as i64 - w.reach as i64;
        kernel[t.rem_euclid(s as i64) as usize] = *c;
    }
    fwd.process(&mut kernel);
    let scale = 1.0 / s as f64;
    let apply = |v: &CVec| -> CVec {
        let mut buf = vec![Complex64::from(0.0); s];
        for (a, &j) in freqs.iter().enumerate() {
            buf[(j - j0) as usize] = v[a];
        }
        fwd.process(&mut buf);
        buf.iter_mut().zip(&kernel).for_each(|(x, k)| *x *= k * scale);
        inv.process(&mut buf);
        CVec::from_iterator(n, freqs.iter().map(|&j| buf[(j - j0) as usize]))
    };
    let e = lanczos_max(n, apply, LANCZOS_TOL, LANCZOS_ITER);
    Ok((e.value, e.method, e.iterations, e.residual))
}

fn level_width(l: u32, n: u32) -> Q {
    Q::new(1, pow(l, n))
}

/// `U_n`: level-`n` cells `L^{-n}[c, c+1]` meeting `X`, fattened by `1/(10Lⁿ)` and merged.
pub fn coarse_grain(x: &RegularSetApprox, n: u32, l: u32) -> Vec<(Q, Q)> {
    let w = level_width(l, n);
    let pad = &w / qi(10);
    let cells = grid_cover(x, x.hull(), w);
    merge_intervals(
        cells
            .iter()
            .map(|&c| (qi(c as i128) * w - pad, qi(c as i128 + 1) * w + pad))
            .collect(),
    )
}

/// `X(r)` as a merged interval union.
pub fn fatten(set: &RegularSetApprox, r: &Q) -> Vec<(Q, Q)> {
    merge_intervals(set.components().into_iter().map(|(a, b)| (a - r, b + r)).collect())
}

/// Settings shared by the Ψ/τ computations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationConfig {
    pub l: u32,
    pub t: u32,
    pub period: i64,
    pub phi: PhiKind,
}

impl IterationConfig {
    pub fn new(l: u32, t: u32) -> Result<Self> {
        let c = IterationConfig {
            l,
            t,
            period: DEFAULT_PERIOD,
            phi: PhiKind::default(),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l < 2 {
            return Err(invalid("l", format!("{} < 2", self.l)));
        }
        if self.t < 1 {
            return Err(invalid("t", "T must be at least 1"));
        }
        if self.period < 2 {
            return Err(invalid("period", format!("{} < 2", self.period)));
        }
        Ok(())
    }

    /// `ε_T` with `Ψ_n ≥ 1 − ε_T` on `X`.
    pub fn eps(&self) -> f64 {
        psi_tail(self.phi, self.t, self.l)
    }

    /// `C_φ = ε_T·L^{T-1}`.
    pub fn c_phi(&self) -> f64 {
        self.eps() * (self.l as f64).powi(self.t as i32 - 1)
    }

    /// Lattice reach of `Ψ_n`: `|j| ≤ P·L^{n+T}`.
    pub fn psi_reach(&self, n: u32) -> usize {
        (self.period as usize) * (self.l as usize).pow(n + self.t)
    }

    /// Coefficients of `1_U * φ_{n+T}`.
    pub fn psi_coefficients(&self, u: &[(Q, Q)], n: u32) -> Result<Coefficients> {
        let reach = self.psi_reach(n);
        let mut c = indicator_coefficients(u, self.period, reach)?;
        let band = reach as f64;
        for (i, v) in c.c.iter_mut().enumerate() {
            *v *= self.phi.fourier((i as f64 - reach as f64) / band);
        }
        Ok(c)
    }
}

/// `Ψ_n = 1_{U_{n+1}} * φ_{n+T}` with its checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiWeight {
    pub n: u32,
    pub config: IterationConfig,
    pub u: Vec<(f64, f64)>,
    pub coefficients: Coefficients,
    /// `Ψ_n(sP/S)` for `s < S`.
    pub samples: Vec<f64>,
    pub eps: f64,
    pub c_phi: f64,
    pub min_value: f64,
    pub max_value: f64,
    pub x_samples: usize,
    pub min_on_x: f64,
    pub leakage: f64,
}

impl PsiWeight {
    pub fn bounded(&self) -> bool {
        self.min_value >= -1e-12 && self.max_value <= 1.0 + 1e-12
    }

    pub fn lower_bound_holds(&self) -> bool {
        self.min_on_x >= 1.0 - self.eps - BOUND_SLACK
    }
}

/// Endpoints and midpoints of the components of `X`.
pub fn set_samples(x: &RegularSetApprox) -> Vec<f64> {
    x.components()
        .iter()
        .flat_map(|(a, b)| {
            let (a, b) = (to_f64(a), to_f64(b));
            [a, (a + b) / 2.0, b]
        })
        .collect()
}

pub fn build_psi_from_u(x: &RegularSetApprox, u: Vec<(Q, Q)>, n: u32, cfg: &IterationConfig) -> Result<PsiWeight> {
    cfg.validate()?;
    let coefficients = cfg.psi_coefficients(&u, n)?;
    let s = (4 * coefficients.reach + 1).next_power_of_two();
    let raw = coefficients.samples(s);
    let samples: Vec<f64> = raw.iter().map(|v| v.re).collect();
    let leak_c = Coefficients::from_samples(raw, s / 2 - 1);
    let peak = leak_c.c.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let leakage = leak_c
        .c
        .iter()
        .enumerate()
        .filter(|(i, _)| (*i as i64 - leak_c.reach as i64).unsigned_abs() as usize > coefficients.reach)
        .fold(0.0f64, |m, (_, c)| m.max(c.norm()))
        / peak.max(f64::MIN_POSITIVE);
    let pts = set_samples(x);
    let min_on_x = pts
        .par_iter()
        .map(|&p| coefficients.eval(p, cfg.period).re)
        .reduce(|| f64::INFINITY, f64::min);
    let eps = cfg.eps();
    Ok(PsiWeight {
        n,
        config: *cfg,
        u: u.iter().map(|(a, b)| (to_f64(a), to_f64(b))).collect(),
        min_value: samples.iter().copied().fold(f64::INFINITY, f64::min),
        max_value: samples.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        samples,
        coefficients,
        eps,
        c_phi: cfg.c_phi(),
        x_samples: pts.len(),
        min_on_x,
        leakage,
    })
}

pub fn build_psi(x: &RegularSetApprox, n: u32, cfg: &IterationConfig) -> Result<PsiWeight> {
    build_psi_from_u(x, coarse_grain(x, n + 1, cfg.l), n, cfg)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contraction {
    pub n: u32,
    pub tau: f64,
    pub norm: f64,
    pub frequencies: usize,
    pub method: Method,
    pub iterations: usize,
    pub residual: f64,
}

impl Contraction {
    pub fn strict(&self) -> bool {
        self.tau > 0.0
    }
}

/// `N`: the length of the hull of `Y`, rounded up.
pub fn frequency_scale(y: &RegularSetApprox) -> i64 {
    let (a, b) = y.hull();
    ceil_i64(&(b - a)).max(1)
}

/// `1 − ‖Ψ P_Λ‖` with `Λ` the lattice of `band`.
pub fn contraction_from_u(u: Vec<(Q, Q)>, band: &[(Q, Q)], n: u32, cfg: &IterationConfig) -> Result<Contraction> {
    cfg.validate()?;
    let freqs = lattice_in(band, cfg.period);
    let psi = cfg.psi_coefficients(&u, n)?;
    let w2 = Coefficients::product_of_squares(&[&psi]);
    let (lambda, method, iterations, residual) = gram_max(&freqs, &w2)?;
    let norm = lambda.max(0.0).sqrt();
    Ok(Contraction {
        n,
        tau: 1.0 - norm,
        norm,
        frequencies: freqs.len(),
        method,
        iterations,
        residual,
    })
}

/// Contraction of `Ψ_n` on functions with `supp f̂ ⊂ Y(2Lⁿ)`.
pub fn contraction_estimate(x: &RegularSetApprox, y: &RegularSetApprox, n: u32, cfg: &IterationConfig) -> Result<Contraction> {
    let big_n = frequency_scale(y);
    if (cfg.l as f64).powi(n as i32 + 1) > big_n as f64 {
        return Err(Error::PreconditionViolated {
            clause: format!("L^(n+1) = {}^{} exceeds N = {big_n}", cfg.l, n + 1),
        });
    }
    let band = fatten(y, &qi(2 * pow(cfg.l, n)));
    contraction_from_u(coarse_grain(x, n + 1, cfg.l), &band, n, cfg)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationStep {
    pub m: u32,
    /// `s_m = ‖(Π_{ℓ<m} Ψ_{ℓT}) P_Y‖`.
    pub norm: f64,
    /// `(1 − ε_T)^{1−m}·s_m`.
    pub bound: f64,
    pub bound_holds: bool,
    /// `s_m / s_{m−1}`.
    pub ratio: Option<f64>,
    /// `1 − τ` of the factor applied at this step.
    pub factor_norm: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    pub config: IterationConfig,
    pub m_requested: u32,
    /// Largest `m ≤ m_requested` with `L^{(m-1)T+1} ≤ N`.
    pub m_reached: u32,
    pub big_n: i64,
    pub frequencies: usize,
    pub eps: f64,
    pub c_phi: f64,
    pub contractions: Vec<Contraction>,
    pub tau: f64,
    pub t_fixed_holds: bool,
    pub direct_norm: f64,
    pub dft_norm: f64,
    pub steps: Vec<IterationStep>,
    pub beta: f64,
}

impl IterationReport {
    /// Every step ratio is at most `(1 − τ)(1 − ε_T)^{-1}`.
    pub fn ratios_within_step_bound(&self) -> bool {
        let cap = (1.0 - self.tau) / (1.0 - self.eps);
        self.steps.iter().filter_map(|s| s.ratio).all(|r| r <= cap + BOUND_SLACK)
    }

    pub fn product_bound_holds(&self) -> bool {
        self.steps.iter().all(|s| s.bound_holds)
    }
}

/// Runs `f ↦ Ψ_{ℓT} f` for `ℓ < m ≤ m_max` over functions with `supp f̂ ⊂ Y`,
/// stopping early once the next factor would need `L^{ℓT+1} > N`.
pub fn iterate_fup(x: &RegularSetApprox, y: &RegularSetApprox, m_max: u32, cfg: &IterationConfig) -> Result<IterationReport> {
    cfg.validate()?;
    if m_max < 1 {
        return Err(invalid("m_max", "need at least one step"));
    }
    let big_n = frequency_scale(y);
    let l = cfg.l as f64;
    if l.powi((cfg.t + 1) as i32) > big_n as f64 {
        return Err(Error::PreconditionViolated {
            clause: format!("L^(T+1) = {}^{} exceeds N = {big_n}", cfg.l, cfg.t + 1),
        });
    }
    // the factor Ψ_{(m-1)T} needs L^{(m-1)T+1} ≤ N
    let mut m_run = 1;
    while m_run < m_max && l.powi((m_run * cfg.t + 1) as i32) <= big_n as f64 {
        m_run += 1;
    }
    let levels = (m_run - 1).max(1);
    let contractions: Vec<Contraction> = (1..=levels)
        .map(|k| contraction_estimate(x, y, k * cfg.t, cfg))
        .collect::<Result<_>>()?;
    let tau = contractions.iter().map(|c| c.tau).fold(f64::INFINITY, f64::min);
    let eps = cfg.eps();
    let t_fixed_holds = (1.0 - tau) / (1.0 - eps) <= 1.0 - tau / 2.0;

    let y_band: Vec<(Q, Q)> = y.components();
    let freqs = lattice_in(&y_band, cfg.period);
    let span = (freqs[freqs.len() - 1] - freqs[0]) as usize;
    let direct = indicator_coefficients(&x.components(), cfg.period, span)?;
    let direct_norm = gram_max(&freqs, &direct)?.0.max(0.0).sqrt();
    let mut y_idx: Vec<usize> = grid_cover(y, y.hull(), qi(1))
        .into_iter()
        .map(|j| j.rem_euclid(big_n) as usize)
        .collect();
    y_idx.sort_unstable();
    y_idx.dedup();
    let dft_norm = FupInstance::new(big_n as usize, grid_indices(x, big_n as usize), y_idx)
        .map(|inst| fourier_restricted_norm(&inst).value)
        .unwrap_or(f64::NAN);

    let psis: Vec<Coefficients> = (1..m_run)
        .map(|k| cfg.psi_coefficients(&coarse_grain(x, k * cfg.t + 1, cfg.l), k * cfg.t))
        .collect::<Result<_>>()?;
    let mut steps: Vec<IterationStep> = Vec::new();
    for m in 1..=m_run {
        let factors: Vec<&Coefficients> = psis[..(m - 1) as usize].iter().collect();
        let w2 = Coefficients::product_of_squares(&factors).truncate(span);
        let norm = gram_max(&freqs, &w2)?.0.max(0.0).sqrt();
        let bound = (1.0 - eps).powi(1 - m as i32) * norm;
        let ratio = steps.last().map(|p: &IterationStep| norm / p.norm);
        if let Some(r) = ratio {
            if r >= 1.0 {
                return Err(Error::ContractionFailed { step: m as usize, ratio: r });
            }
        }
        steps.push(IterationStep {
            m,
            norm,
            bound,
            bound_holds: direct_norm <= bound + BOUND_SLACK,
            ratio,
            factor_norm: (m >= 2).then(|| contractions[(m - 2) as usize].norm),
        });
    }
    let beta = -(1.0 - tau / 2.0).ln() / (cfg.t as f64 * l.ln());
    Ok(IterationReport {
        config: *cfg,
        m_requested: m_max,
        m_reached: m_run,
        big_n,
        frequencies: freqs.len(),
        eps,
        c_phi: cfg.c_phi(),
        contractions,
        tau,
        t_fixed_holds,
        direct_norm,
        dft_norm,
        steps,
        beta,
    })
}

/// Decay exponent of one step ratio, `−log r/(T log L)`.
pub fn step_beta(ratio: f64, cfg: &IterationConfig) -> f64 {
    -ratio.ln() / (cfg.t as f64 * (cfg.l as f64).ln())
}
