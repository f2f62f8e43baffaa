//! Restriction of periodic band-limited functions to one window per unit interval.
//!
//! On the torus `ℝ/Pℤ` a function with frequencies `j/P` splits into fibers
//! `j ≡ r (mod P)`. Integer translates of a window average the cross terms
//! between fibers away, so `Σ_k ‖f‖²_{k+W} = P·Σ_r c_r* G c_r` with
//! `G[m,m'] = ∫_W e^{2πi(m'-m)x} dx` over the integer offsets of each fiber.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{hermitian_min, CMat};
use crate::rational::{ceil_i64, qi, to_f64, Q};
use crate::regular_sets::RegularSetApprox;

/// Default constant in the interpolation inequality.
pub const INTERPOLATION_C: f64 = 10.0;

/// The window `[offset, offset + length]` repeated in every unit interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitWindow {
    pub offset: f64,
    pub length: f64,
}

impl UnitWindow {
    pub fn new(offset: f64, length: f64) -> Result<Self> {
        if !(length > 0.0 && offset >= 0.0 && offset + length <= 1.0 + 1e-15) {
            return Err(invalid("window", format!("[{offset}, {}] not inside [0,1]", offset + length)));
        }
        Ok(UnitWindow { offset, length })
    }

    /// Window of length `c₁` centered in the unit interval.
    pub fn centered(c1: f64) -> Result<Self> {
        Self::new((1.0 - c1) / 2.0, c1)
    }

    /// `∫_W e^{2πidx} dx`.
    pub fn moment(&self, d: i64) -> Complex64 {
        if d == 0 {
            return Complex64::from(self.length);
        }
        let w = 2.0 * PI * d as f64;
        let e = |x: f64| Complex64::from_polar(1.0, w * x);
        (e(self.offset + self.length) - e(self.offset)) / Complex64::new(0.0, w)
    }

    pub fn gram(&self, offsets: &[i64]) -> CMat {
        let n = offsets.len();
        CMat::from_fn(n, n, |a, b| self.moment(offsets[b] - offsets[a]))
    }
}

/// Trigonometric polynomial `Σ c_j e^{2πijx/P}` on the torus of period `P`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandLimitedSample {
    pub period: i64,
    pub grid_points: usize,
    pub freqs: Vec<i64>,
    pub coeffs: Vec<Complex64>,
}

impl BandLimitedSample {
    pub fn new(period: i64, freqs: Vec<i64>, coeffs: Vec<Complex64>) -> Result<Self> {
        if period < 1 {
            return Err(invalid("period", format!("{period} < 1")));
        }
        if freqs.len() != coeffs.len() {
            return Err(invalid("coeffs", "length differs from freqs"));
        }
        if freqs.is_empty() {
            return Err(Error::EmptySupport);
        }
        if freqs.iter().collect::<BTreeSet<_>>().len() != freqs.len() {
            return Err(invalid("freqs", "repeated frequency"));
        }
        let reach = freqs.iter().map(|j| j.unsigned_abs() as usize).max().unwrap_or(0);
        Ok(BandLimitedSample {
            period,
            grid_points: (2 * reach + 1).next_power_of_two(),
            freqs,
            coeffs,
        })
    }

    pub fn frequency(&self, i: usize) -> f64 {
        self.freqs[i] as f64 / self.period as f64
    }

    /// `‖f‖²` over one period, by Parseval.
    pub fn norm_sq(&self) -> f64 {
        self.period as f64 * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// `‖e^{2πr|ξ|} f̂‖²` over one period.
    pub fn weighted_norm_sq(&self, r: f64) -> f64 {
        let p = self.period as f64;
        p * (0..self.freqs.len())
            .map(|i| (4.0 * PI * r * self.frequency(i).abs()).exp() * self.coeffs[i].norm_sqr())
            .sum::<f64>()
    }

    /// `Σ_k ‖f‖²_{L²(k+W)}` over the `P` unit intervals of a period.
    pub fn window_norm_sq(&self, w: &UnitWindow) -> f64 {
        let mut fibers: BTreeMap<i64, Vec<(i64, Complex64)>> = BTreeMap::new();
        for (&j, &c) in self.freqs.iter().zip(&self.coeffs) {
            fibers.entry(j.rem_euclid(self.period)).or_default().push((j.div_euclid(self.period), c));
        }
        let total: f64 = fibers
            .values()
            .map(|f| {
                let mut s = Complex64::from(0.0);
                for &(ma, ca) in f {
                    for &(mb, cb) in f {
                        s += ca.conj() * cb * w.moment(mb - ma);
                    }
                }
                s.re
            })
            .sum();
        self.period as f64 * total
    }

    /// Samples `f(kP/M)` for `k < M`.
    pub fn samples(&self) -> Vec<Complex64> {
        let m = self.grid_points;
        let mut buf = vec![Complex64::from(0.0); m];
        for (&j, &c) in self.freqs.iter().zip(&self.coeffs) {
            buf[j.rem_euclid(m as i64) as usize] += c;
        }
        rustfft::FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
        buf
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpolationCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub inner: f64,
    pub weighted: f64,
    pub c: f64,
    pub r: f64,
    pub kappa: f64,
    pub holds: bool,
}

/// Both sides of `Σ‖f‖²_I ≤ (C/r)(Σ‖f‖²_{I''})^κ ‖e^{2πr|ξ|}f̂‖^{2(1-κ)}` with
/// `I` the unit intervals of one period and `I''` their windows.
pub fn interpolation_check(
    f: &BandLimitedSample,
    inner: &UnitWindow,
    r: f64,
    kappa: f64,
    c: f64,
) -> Result<InterpolationCheck> {
    if !(r > 0.0 && c > 0.0) {
        return Err(invalid("r", format!("r = {r}, C = {c} must be positive")));
    }
    if !(kappa > 0.0 && kappa <= (-c / r).exp()) {
        return Err(Error::PreconditionViolated {
            clause: format!("κ = {kappa} not in (0, e^(-C/r) = {}]", (-c / r).exp()),
        });
    }
    let lhs = f.norm_sq();
    let inner_sq = f.window_norm_sq(inner);
    let weighted = f.weighted_norm_sq(r);
    let rhs = c / r * inner_sq.powf(kappa) * weighted.powf(1.0 - kappa);
    Ok(InterpolationCheck {
        lhs,
        rhs,
        inner: inner_sq,
        weighted,
        c,
        r,
        kappa,
        holds: lhs <= rhs,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UcConstant {
    pub c3: f64,
    pub period: i64,
    pub frequencies: usize,
    pub fibers: usize,
    pub distinct_patterns: usize,
    pub largest_pattern: usize,
}

/// Lattice numerators `j` with `j/P ∈ Y`, components taken half-open.
pub fn lattice_frequencies(y: &RegularSetApprox, period: i64) -> Vec<i64> {
    let p = qi(period as i128);
    let mut out = BTreeSet::new();
    for (a, b) in y.components() {
        if a == b {
            let x = &a * &p;
            if x.is_integer() {
                out.insert(x.to_integer() as i64);
            }
        } else {
            out.extend(ceil_i64(&(&a * &p))..ceil_i64(&(&b * &p)));
        }
    }
    out.into_iter().collect()
}

/// Default period: the smallest integer `≥ max(4α₁, 4)`.
pub fn default_period(y: &RegularSetApprox) -> i64 {
    let (a, b) = y.hull();
    let alpha1: Q = if -a.clone() > b { -a } else { b };
    ceil_i64(&(alpha1 * qi(4))).max(4)
}

/// `c₃ = min ‖f‖_{L²(U')}/‖f‖` over `f` with frequencies in `Y`, where `U'`
/// repeats `window` in every unit interval.
pub fn unique_continuation_constant(y: &RegularSetApprox, window: &UnitWindow, period: Option<i64>) -> Result<UcConstant> {
    let period = period.unwrap_or_else(|| default_period(y));
    let (a, b) = y.hull();
    if (period as f64) < 4.0 * to_f64(&b).abs().max(to_f64(&a).abs()) {
        return Err(invalid("period", format!("{period} < 4α₁")));
    }
    let freqs = lattice_frequencies(y, period);
    if freqs.is_empty() {
        return Err(Error::EmptySupport);
    }
    let mut fibers: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    for &j in &freqs {
        fibers.entry(j.rem_euclid(period)).or_default().push(j.div_euclid(period));
    }
    let patterns: BTreeSet<Vec<i64>> = fibers
        .values()
        .map(|ms| ms.iter().map(|m| m - ms[0]).collect())
        .collect();
    let mut c3sq = f64::INFINITY;
    for pat in &patterns {
        c3sq = c3sq.min(hermitian_min(&window.gram(pat)).value);
    }
    Ok(UcConstant {
        c3: c3sq.max(0.0).sqrt(),
        period,
        frequencies: freqs.len(),
        fibers: fibers.len(),
        distinct_patterns: patterns.len(),
        largest_pattern: patterns.iter().map(|p| p.len()).max().unwrap_or(0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn constants_give_sqrt_c1() {
        let w = UnitWindow::centered(0.3).unwrap();
        let u = unique_continuation_constant(&RegularSetApprox::point(q(0, 1)), &w, None).unwrap();
        assert_eq!(u.c3, 0.3f64.sqrt());
    }

    #[test]
    fn full_window_gives_one() {
        let y = RegularSetApprox::interval(qi(0), qi(5)).unwrap();
        let u = unique_continuation_constant(&y, &UnitWindow::new(0.0, 1.0).unwrap(), None).unwrap();
        assert!((u.c3 - 1.0).abs() < 1e-12);
        assert_eq!(u.frequencies, 5 * 20);
    }

    #[test]
    fn window_norm_matches_sampling() {
        let f = BandLimitedSample::new(
            4,
            vec![-3, 0, 1, 5, 9],
            vec![
                Complex64::new(1.0, 0.5),
                Complex64::new(-0.3, 0.0),
                Complex64::new(0.2, -1.0),
                Complex64::new(0.7, 0.1),
                Complex64::new(0.0, 0.4),
            ],
        )
        .unwrap();
        let w = UnitWindow::new(0.25, 0.5).unwrap();
        // midpoint rule on a fine grid
        let n = 4000;
        let mut s = 0.0;
        for k in 0..4 {
            for i in 0..n {
                let x = k as f64 + w.offset + (i as f64 + 0.5) * w.length / n as f64;
                let v: Complex64 = (0..f.freqs.len())
                    .map(|t| f.coeffs[t] * Complex64::from_polar(1.0, 2.0 * PI * f.frequency(t) * x))
                    .sum();
                s += v.norm_sqr() * w.length / n as f64;
            }
        }
        assert!((s - f.window_norm_sq(&w)).abs() < 1e-6 * s);
        let samples = f.samples();
        let parseval: f64 = samples.iter().map(|v| v.norm_sqr()).sum::<f64>() * 4.0 / f.grid_points as f64;
        assert!((parseval - f.norm_sq()).abs() < 1e-10);
    }

    #[test]
    fn kappa_precondition() {
        let f = BandLimitedSample::new(4, vec![1], vec![Complex64::from(1.0)]).unwrap();
        let w = UnitWindow::centered(0.25).unwrap();
        assert!(matches!(
            interpolation_check(&f, &w, 1.0, 0.5, INTERPOLATION_C),
            Err(Error::PreconditionViolated { .. })
        ));
        let c = interpolation_check(&f, &w, 1.0, 1e-5, INTERPOLATION_C).unwrap();
        assert!(c.holds && c.rhs.is_finite());
    }
}
