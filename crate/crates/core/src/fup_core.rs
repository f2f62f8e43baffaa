//! Restricted discrete Fourier norms, scale scans and exponent fits.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fit::{least_squares, LineFit};
use crate::generators::CantorSpec;
use crate::linalg::{hermitian_max, power_iteration, CMat, CVec, Method};
use crate::rational::Q;
use crate::regular_sets::{grid_cover, RegularSetApprox};

/// Largest side handled by a dense Gram eigensolve.
pub const DENSE_THRESHOLD: usize = 4096;
/// Relative residual target of the power iteration.
pub const POWER_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FupInstance {
    pub n: usize,
    pub x_idx: Vec<usize>,
    pub y_idx: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: f64,
    pub method: Method,
    pub iterations: usize,
    pub residual: f64,
}

fn check_indices(name: &'static str, idx: &[usize], n: usize) -> Result<()> {
    if idx.is_empty() {
        return Err(invalid(name, "must be nonempty"));
    }
    if idx.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid(name, "must be strictly increasing"));
    }
    if *idx.last().unwrap() >= n {
        return Err(invalid(name, format!("index {} out of range for N = {n}", idx.last().unwrap())));
    }
    Ok(())
}

/// Grid cells `[j/N, (j+1)/N]` meeting the set, reduced mod N.
pub fn grid_indices(set: &RegularSetApprox, n: usize) -> Vec<usize> {
    let hull = set.hull();
    let mut out: Vec<usize> = grid_cover(set, hull, Q::new(1, n as i128))
        .into_iter()
        .map(|j| j.rem_euclid(n as i64) as usize)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

impl FupInstance {
    pub fn new(n: usize, x_idx: Vec<usize>, y_idx: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "must be positive"));
        }
        check_indices("x_idx", &x_idx, n)?;
        check_indices("y_idx", &y_idx, n)?;
        Ok(FupInstance { n, x_idx, y_idx })
    }

    /// Instance with X at resolution 1/N in [0,1] and Y dilated by N.
    pub fn from_sets(x: &RegularSetApprox, y: &RegularSetApprox, n: usize) -> Result<Self> {
        Self::new(n, grid_indices(x, n), grid_indices(y, n))
    }

    pub fn full(n: usize) -> Self {
        let all: Vec<usize> = (0..n).collect();
        FupInstance {
            n,
            x_idx: all.clone(),
            y_idx: all,
        }
    }

    /// Dense matrix with entries `N^{-1/2} e^{2πi jk/N}`.
    pub fn matrix(&self) -> CMat {
        let s = (self.n as f64).sqrt().recip();
        CMat::from_fn(self.x_idx.len(), self.y_idx.len(), |a, b| {
            let jk = (self.x_idx[a] as u128 * self.y_idx[b] as u128 % self.n as u128) as f64;
            Complex64::from_polar(s, std::f64::consts::TAU * jk / self.n as f64)
        })
    }

    /// Shifts both index sets mod N.
    pub fn shifted(&self, x0: i64, y0: i64) -> Self {
        let sh = |idx: &[usize], d: i64| {
            let mut v: Vec<usize> = idx
                .iter()
                .map(|&j| (j as i64 + d).rem_euclid(self.n as i64) as usize)
                .collect();
            v.sort_unstable();
            v
        };
        FupInstance {
            n: self.n,
            x_idx: sh(&self.x_idx, x0),
            y_idx: sh(&self.y_idx, y0),
        }
    }
}

fn fft(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut p = FftPlanner::new();
    if inverse {
        p.plan_fft_inverse(n)
    } else {
        p.plan_fft_forward(n)
    }
}

/// Gram matrix `A A*` (or `A* A`) on the smaller side; its entries depend
/// only on index differences, so one FFT of the other side's indicator
/// gives them all.
fn gram(inst: &FupInstance) -> CMat {
    let n = inst.n;
    let (rows, other, sign) = if inst.x_idx.len() <= inst.y_idx.len() {
        (&inst.x_idx, &inst.y_idx, true)
    } else {
        (&inst.y_idx, &inst.x_idx, false)
    };
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for &k in other {
        buf[k] = Complex64::new(1.0 / n as f64, 0.0);
    }
    // g(d) = (1/N) Σ_k e^{±2πi dk/N}
    fft(n, sign).process(&mut buf);
    CMat::from_fn(rows.len(), rows.len(), |a, b| {
        let d = (rows[a] + n - rows[b]) % n;
        buf[d]
    })
}

/// Largest singular value of the restricted transform.
pub fn fourier_restricted_norm(inst: &FupInstance) -> NormResult {
    let side = inst.x_idx.len().min(inst.y_idx.len());
    if side <= DENSE_THRESHOLD {
        let e = hermitian_max(&gram(inst));
        return NormResult {
            value: e.value.max(0.0).sqrt(),
            method: Method::DenseSvd,
            iterations: 0,
            residual: 0.0,
        };
    }
    fourier_norm_power(inst)
}

/// Power iteration on `A* A` with FFT matrix-vector products.
pub fn fourier_norm_power(inst: &FupInstance) -> NormResult {
    let n = inst.n;
    let fwd = fft(n, false);
    let inv = fft(n, true);
    let s = 1.0 / n as f64;
    let apply = |v: &CVec| {
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for (i, &k) in inst.y_idx.iter().enumerate() {
            buf[k] = v[i];
        }
        inv.process(&mut buf);
        let mut restricted = vec![Complex64::new(0.0, 0.0); n];
        for &j in &inst.x_idx {
            restricted[j] = buf[j];
        }
        fwd.process(&mut restricted);
        CVec::from_iterator(inst.y_idx.len(), inst.y_idx.iter().map(|&k| restricted[k] * s))
    };
    let e = power_iteration(inst.y_idx.len(), apply, POWER_TOL, 1_000_000);
    NormResult {
        value: e.value.max(0.0).sqrt(),
        method: Method::PowerIteration,
        iterations: e.iterations,
        residual: e.residual,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftCheck {
    pub norm: f64,
    pub shifted_norm: f64,
    pub equal: bool,
}

pub fn shift_invariance_check(inst: &FupInstance, x0: i64, y0: i64) -> ShiftCheck {
    let a = fourier_restricted_norm(inst).value;
    let b = fourier_restricted_norm(&inst.shifted(x0, y0)).value;
    ShiftCheck {
        norm: a,
        shifted_norm: b,
        equal: (a - b).abs() <= 1e-9,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub k: u32,
    pub n: usize,
    pub norm: f64,
    /// `−log(norm)/log(N)`.
    pub log_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanFit {
    pub rows: Vec<ScanRow>,
    /// Fit over the upper half of the k-range.
    pub beta_fit: f64,
    pub stderr: f64,
    pub full: LineFit,
    pub lower: LineFit,
    pub upper: LineFit,
}

impl ScanFit {
    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].norm < w[0].norm)
    }

    /// Relative disagreement of the two half-range slopes.
    pub fn half_disagreement(&self) -> f64 {
        let (a, b) = (self.lower.slope, self.upper.slope);
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Fits `−log(norm) = β log N + c`: full range, lower and upper halves of
/// `⌈n/2⌉` points each; β is the upper-half slope.
pub fn fit_table(rows: Vec<ScanRow>) -> Result<ScanFit> {
    if rows.len() < 3 {
        return Err(Error::InsufficientPoints {
            needed: 3,
            found: rows.len(),
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| -r.norm.ln()).collect();
    let h = rows.len().div_ceil(2);
    let lo = rows.len() - h;
    let full = least_squares(&xs, &ys)?;
    let lower = least_squares(&xs[..h], &ys[..h])?;
    let upper = least_squares(&xs[lo..], &ys[lo..])?;
    Ok(ScanFit {
        rows,
        beta_fit: upper.slope,
        stderr: upper.slope_stderr,
        full,
        lower,
        upper,
    })
}

/// Norms for X, Y regenerated at each depth k with `N = L^k`.
pub fn scan_and_fit(spec_x: &CantorSpec, spec_y: &CantorSpec, ks: std::ops::RangeInclusive<u32>) -> Result<ScanFit> {
    if spec_x.base != spec_y.base {
        return Err(invalid("spec_y.base", "X and Y must share the base"));
    }
    let ks: Vec<u32> = ks.collect();
    if ks.len() < 3 {
        return Err(Error::InsufficientPoints {
            needed: 3,
            found: ks.len(),
        });
    }
    let rows = ks
        .par_iter()
        .map(|&k| {
            let n = (spec_x.base as usize).pow(k);
            let to_idx = |s: &CantorSpec| s.at_depth(k).cells().into_iter().map(|c| c as usize).collect::<Vec<_>>();
            let inst = FupInstance::new(n, to_idx(spec_x), to_idx(spec_y))?;
            let norm = fourier_restricted_norm(&inst).value;
            Ok(ScanRow {
                k,
                n,
                norm,
                log_ratio: -norm.ln() / (n as f64).ln(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    fit_table(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeBaseline {
    pub measured: f64,
    /// `24 C_R² N^{δ−1/2}`, only meaningful for δ < 1/2.
    pub bound: Option<f64>,
    /// `min(1, sqrt(|X||Y|/N))`.
    pub cauchy_schwarz: f64,
    pub holds: bool,
}

pub fn volume_baseline(inst: &FupInstance, delta: f64, c_r: f64) -> VolumeBaseline {
    let n = inst.n as f64;
    let measured = fourier_restricted_norm(inst).value;
    let bound = (delta < 0.5).then(|| 24.0 * c_r * c_r * n.powf(delta - 0.5));
    let cs = ((inst.x_idx.len() * inst.y_idx.len()) as f64 / n).sqrt().min(1.0);
    let holds = measured <= cs + 1e-9 && bound.map_or(true, |p| measured <= p + 1e-9);
    VolumeBaseline {
        measured,
        bound,
        cauchy_schwarz: cs,
        holds,
    }
}
