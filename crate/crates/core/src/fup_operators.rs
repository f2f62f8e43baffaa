//! Quadrature discretizations of variable-amplitude and general-phase
//! oscillatory operators, and the hyperbolic circle operator.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fup_core::NormResult;
use crate::linalg::{hermitian_max, lanczos_max, CMat, CVec, Method};
use crate::rational::to_f64;
use crate::regular_sets::RegularSetApprox;

/// Quadrature nodes per length h.
pub const NODES_PER_H: f64 = 10.0;
/// Largest Gram side solved densely; larger ones use Lanczos.
pub const DENSE_GRAM: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Rect {
    pub fn new(x: (f64, f64), y: (f64, f64)) -> Result<Self> {
        if !(x.0 < x.1 && y.0 < y.1) {
            return Err(invalid("rect", "sides must have positive length"));
        }
        Ok(Rect { x, y })
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x.0 && x <= self.x.1 && y >= self.y.0 && y <= self.y.1
    }
}

fn psi(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Smooth step from 0 at `t ≤ 0` to 1 at `t ≥ 1`.
pub fn smooth_step(t: f64) -> f64 {
    let a = psi(t);
    let b = psi(1.0 - t);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// Smooth bump supported in `[a, b]`, equal to 1 on the inner half.
pub fn bump(x: f64, (a, b): (f64, f64)) -> f64 {
    let m = (b - a) / 4.0;
    smooth_step((x - a) / m) * smooth_step((b - x) / m)
}

/// Tensor bump on a rectangle, equal to 1 on the inner half of each side.
pub fn rect_bump(r: &Rect, x: f64, y: f64) -> f64 {
    bump(x, r.x) * bump(y, r.y)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AmplitudeKind {
    Zero,
    /// Equal to `value` everywhere on the indicator supports.
    Constant { value: f64 },
    /// Tensor bump on `support`, 1 on its inner half.
    Plateau { support: Rect },
    /// Samples on a tensor grid, bilinear in between, zero outside.
    Sampled {
        x: Vec<f64>,
        xi: Vec<f64>,
        /// Row-major, `x.len() × xi.len()`.
        values: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeSpec {
    pub kind: AmplitudeKind,
    #[serde(default = "one")]
    pub scale: f64,
    /// Declared bounds on `sup|∂_x^k a|` for k = 0, 1, ...
    #[serde(default)]
    pub c_k: Vec<f64>,
    /// Declared support diameter; infinite for constants.
    #[serde(default)]
    pub c_a: Option<f64>,
}

fn one() -> f64 {
    1.0
}

fn sampled_eval(x: &[f64], xi: &[f64], v: &[f64], px: f64, pxi: f64) -> f64 {
    let locate = |g: &[f64], p: f64| -> Option<(usize, f64)> {
        if g.len() < 2 || p < g[0] || p > g[g.len() - 1] {
            return None;
        }
        let i = g.partition_point(|&t| t <= p).clamp(1, g.len() - 1) - 1;
        Some((i, (p - g[i]) / (g[i + 1] - g[i])))
    };
    let (Some((i, s)), Some((j, t))) = (locate(x, px), locate(xi, pxi)) else {
        return 0.0;
    };
    let n = xi.len();
    let at = |a: usize, b: usize| v[a * n + b];
    (1.0 - s) * ((1.0 - t) * at(i, j) + t * at(i, j + 1)) + s * ((1.0 - t) * at(i + 1, j) + t * at(i + 1, j + 1))
}

impl AmplitudeSpec {
    pub fn new(kind: AmplitudeKind) -> Result<Self> {
        let mut s = AmplitudeSpec {
            kind,
            scale: 1.0,
            c_k: Vec::new(),
            c_a: None,
        };
        s.c_a = s.support().map(|r| ((r.x.1 - r.x.0).powi(2) + (r.y.1 - r.y.0).powi(2)).sqrt());
        s.c_k = s.measured_bounds(2);
        s.validate()?;
        Ok(s)
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.scale *= c;
        for b in &mut self.c_k {
            *b *= c.abs();
        }
        self
    }

    pub fn support(&self) -> Option<Rect> {
        match &self.kind {
            AmplitudeKind::Zero | AmplitudeKind::Constant { .. } => None,
            AmplitudeKind::Plateau { support } => Some(*support),
            AmplitudeKind::Sampled { x, xi, .. } => Some(Rect {
                x: (x[0], x[x.len() - 1]),
                y: (xi[0], xi[xi.len() - 1]),
            }),
        }
    }

    pub fn eval(&self, x: f64, xi: f64) -> f64 {
        self.scale
            * match &self.kind {
                AmplitudeKind::Zero => 0.0,
                AmplitudeKind::Constant { value } => *value,
                AmplitudeKind::Plateau { support } => rect_bump(support, x, xi),
                AmplitudeKind::Sampled { x: gx, xi: gy, values } => sampled_eval(gx, gy, values, x, xi),
            }
    }

    /// Finite-difference estimates of `sup|∂_x^k a|`, k = 0..=kmax, on a
    /// 200 × 50 sampling of the support (or the unit square for constants).
    pub fn measured_bounds(&self, kmax: usize) -> Vec<f64> {
        let r = self.support().unwrap_or(Rect {
            x: (0.0, 1.0),
            y: (0.0, 1.0),
        });
        let nx = 200;
        let dx = (r.x.1 - r.x.0) / nx as f64;
        let mut out = vec![0.0f64; kmax + 1];
        for j in 0..=50 {
            let y = r.y.0 + (r.y.1 - r.y.0) * j as f64 / 50.0;
            let mut row: Vec<f64> = (0..=nx).map(|i| self.eval(r.x.0 + i as f64 * dx, y)).collect();
            for (k, slot) in out.iter_mut().enumerate() {
                let m = row.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                *slot = slot.max(m / dx.powi(k as i32));
                row = row.windows(2).map(|w| w[1] - w[0]).collect();
            }
        }
        out
    }

    /// Samples vanish off the support and measured derivative bounds stay
    /// within 10% of the declared ones.
    pub fn validate(&self) -> Result<()> {
        if let AmplitudeKind::Sampled { x, xi, values } = &self.kind {
            let sorted = |g: &[f64]| g.len() >= 2 && g.windows(2).all(|w| w[0] < w[1]);
            if !sorted(x) || !sorted(xi) || values.len() != x.len() * xi.len() {
                return Err(invalid("amplitude.values", "need increasing grids and x.len()·xi.len() samples"));
            }
            let n = xi.len();
            for i in 0..x.len() {
                for j in 0..n {
                    let edge = i == 0 || j == 0 || i == x.len() - 1 || j == n - 1;
                    if edge && values[i * n + j] != 0.0 {
                        return Err(invalid("amplitude.values", "samples must vanish on the support boundary"));
                    }
                }
            }
        }
        let measured = self.measured_bounds(self.c_k.len().saturating_sub(1));
        for (k, (&m, &c)) in measured.iter().zip(&self.c_k).enumerate() {
            if m > c * 1.1 + 1e-12 {
                return Err(invalid("amplitude.c_k", format!("derivative {k} measured {m:.3e} exceeds declared {c:.3e}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Phase {
    /// `Φ = −2π x y`.
    Linear,
    /// `Φ = log 4 + 2 log|sin((x − y)/2)|`.
    HyperbolicCircle,
    /// `Φ = Σ c·x^i·y^j` over `(i, j, c)`.
    Polynomial { terms: Vec<(u32, u32, f64)> },
}

impl Phase {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Phase::Linear => -TAU * x * y,
            Phase::HyperbolicCircle => 4f64.ln() + 2.0 * ((x - y) / 2.0).sin().abs().ln(),
            Phase::Polynomial { terms } => terms.iter().map(|&(i, j, c)| c * x.powi(i as i32) * y.powi(j as i32)).sum(),
        }
    }

    pub fn mixed_derivative(&self, x: f64, y: f64) -> f64 {
        match self {
            Phase::Linear => -TAU,
            Phase::HyperbolicCircle => 0.5 / ((x - y) / 2.0).sin().powi(2),
            Phase::Polynomial { terms } => terms
                .iter()
                .filter(|&&(i, j, _)| i > 0 && j > 0)
                .map(|&(i, j, c)| c * (i * j) as f64 * x.powi(i as i32 - 1) * y.powi(j as i32 - 1))
                .sum(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpec {
    pub phase: Phase,
    /// Amplitude `b`, a tensor bump on this rectangle, times `scale`.
    pub support: Rect,
    #[serde(default = "one")]
    pub scale: f64,
    /// When set, `b = scale` on all of `support` instead of a bump.
    #[serde(default)]
    pub flat: bool,
}

impl PhaseSpec {
    pub fn new(phase: Phase, support: Rect) -> Result<Self> {
        let s = PhaseSpec {
            phase,
            support,
            scale: 1.0,
            flat: false,
        };
        s.check_phase()?;
        Ok(s)
    }

    pub fn amplitude(&self, x: f64, y: f64) -> f64 {
        if self.flat {
            if self.support.contains(x, y) {
                self.scale
            } else {
                0.0
            }
        } else {
            self.scale * rect_bump(&self.support, x, y)
        }
    }

    /// `|∂²Φ/∂x∂y|` on a 101 × 101 grid of the support must stay above
    /// `1e-8` and be finite.
    pub fn check_phase(&self) -> Result<()> {
        let r = &self.support;
        for i in 0..=100 {
            for j in 0..=100 {
                let x = r.x.0 + (r.x.1 - r.x.0) * i as f64 / 100.0;
                let y = r.y.0 + (r.y.1 - r.y.0) * j as f64 / 100.0;
                let d = self.phase.mixed_derivative(x, y);
                if !(d.abs() > 1e-8 && d.is_finite()) {
                    return Err(Error::DegeneratePhase { x, y });
                }
            }
        }
        Ok(())
    }
}

/// Components of a set fattened to its `h^ρ`-neighborhood: intervals of
/// positive length `ℓ` grow by `max(h^ρ − w, 0)/2` per side, where `w` is
/// the cell width, and points grow by `h^ρ/2`. At ρ = 1 and cell width h the
/// neighborhood is the union of cells.
pub fn neighborhood_intervals(set: &RegularSetApprox, h: f64, rho: f64) -> Vec<(f64, f64)> {
    let r = h.powf(rho);
    let w = to_f64(&set.width());
    let e = if set.is_point() { r / 2.0 } else { (r - w).max(0.0) / 2.0 };
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (a, b) in set.components() {
        let (a, b) = (to_f64(&a) - e, to_f64(&b) + e);
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// Midpoint rule on the global lattice `sℤ`: one node per lattice cell
/// meeting the union, weighted by the overlap length.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Quadrature {
    pub fn on_intervals(ivs: &[(f64, f64)], s: f64) -> Self {
        let mut map: std::collections::BTreeMap<i64, f64> = std::collections::BTreeMap::new();
        for &(a, b) in ivs {
            let (ma, mb) = ((a / s + 1e-9).floor() as i64, (b / s - 1e-9).ceil() as i64);
            for m in ma..mb {
                let lo = (m as f64 * s).max(a);
                let hi = ((m + 1) as f64 * s).min(b);
                if hi - lo > 1e-9 * s {
                    *map.entry(m).or_insert(0.0) += hi - lo;
                }
            }
        }
        let (nodes, weights) = map.into_iter().map(|(m, w)| ((m as f64 + 0.5) * s, w.min(s))).unzip();
        Quadrature { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Norm of the matrix `sqrt(w_a w_b)·h^{-1/2}·K(x_a, y_b)`.
pub fn kernel_norm<K>(rows: &Quadrature, cols: &Quadrature, h: f64, kernel: K) -> NormResult
where
    K: Fn(f64, f64) -> Complex64 + Sync,
{
    if rows.is_empty() || cols.is_empty() {
        return NormResult {
            value: 0.0,
            method: Method::DenseSvd,
            iterations: 0,
            residual: 0.0,
        };
    }
    let hs = h.sqrt().recip();
    let data: Vec<Complex64> = (0..rows.len())
        .into_par_iter()
        .flat_map_iter(|a| {
            let (x, wa) = (rows.nodes[a], rows.weights[a]);
            let kernel = &kernel;
            (0..cols.len()).map(move |b| kernel(x, cols.nodes[b]) * ((wa * cols.weights[b]).sqrt() * hs))
        })
        .collect();
    let m = DMatrix::from_row_slice(rows.len(), cols.len(), &data);
    matrix_norm(&m)
}

/// Largest singular value: dense Gram eigensolve up to [`DENSE_GRAM`],
/// Lanczos on the Gram operator beyond.
pub fn matrix_norm(m: &CMat) -> NormResult {
    let wide = m.nrows() <= m.ncols();
    let side = m.nrows().min(m.ncols());
    if side <= DENSE_GRAM {
        let g = if wide { m * m.adjoint() } else { m.adjoint() * m };
        let e = hermitian_max(&g);
        return NormResult {
            value: e.value.max(0.0).sqrt(),
            method: Method::DenseSvd,
            iterations: 0,
            residual: 0.0,
        };
    }
    let apply = |v: &CVec| -> CVec {
        if wide {
            m * (m.adjoint() * v)
        } else {
            m.adjoint() * (m * v)
        }
    };
    let e = lanczos_max(side, apply, 1e-12, 400);
    NormResult {
        value: e.value.max(0.0).sqrt(),
        method: Method::Lanczos,
        iterations: e.iterations,
        residual: e.residual,
    }
}

fn spacing(h: f64, nodes_per_h: f64) -> Result<f64> {
    if !(h > 0.0 && h < 1.0) {
        return Err(invalid("h", "must lie in (0, 1)"));
    }
    let s = h / nodes_per_h;
    if nodes_per_h < NODES_PER_H {
        return Err(Error::GridTooCoarse {
            spacing: s,
            limit: h / NODES_PER_H,
        });
    }
    Ok(s)
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(invalid("rho", "must lie in (0, 1]"));
    }
    Ok(())
}

/// `‖1_{X(h^ρ)} A(h) 1_{Y(h^ρ)}‖` for `A f(x) = h^{-1/2}∫ e^{2πixξ/h} a(x,ξ) f(ξ) dξ`.
pub fn amplitude_restricted_norm(
    x: &RegularSetApprox,
    y: &RegularSetApprox,
    h: f64,
    spec: &AmplitudeSpec,
    rho: f64,
) -> Result<NormResult> {
    amplitude_restricted_norm_with(x, y, h, spec, rho, NODES_PER_H)
}

pub fn amplitude_restricted_norm_with(
    x: &RegularSetApprox,
    y: &RegularSetApprox,
    h: f64,
    spec: &AmplitudeSpec,
    rho: f64,
    nodes_per_h: f64,
) -> Result<NormResult> {
    check_rho(rho)?;
    let s = spacing(h, nodes_per_h)?;
    let rows = Quadrature::on_intervals(&neighborhood_intervals(x, h, rho), s);
    let cols = Quadrature::on_intervals(&neighborhood_intervals(y, h, rho), s);
    Ok(kernel_norm(&rows, &cols, h, |a, b| {
        Complex64::from_polar(spec.eval(a, b), TAU * a * b / h)
    }))
}

/// `‖1_{X(h^ρ)} B(h) 1_{Y(h^ρ)}‖` for `B f(x) = h^{-1/2}∫ e^{iΦ(x,y)/h} b(x,y) f(y) dy`.
pub fn phase_restricted_norm(
    x: &RegularSetApprox,
    y: &RegularSetApprox,
    h: f64,
    spec: &PhaseSpec,
    rho: f64,
) -> Result<NormResult> {
    phase_restricted_norm_with(x, y, h, spec, rho, NODES_PER_H)
}

pub fn phase_restricted_norm_with(
    x: &RegularSetApprox,
    y: &RegularSetApprox,
    h: f64,
    spec: &PhaseSpec,
    rho: f64,
    nodes_per_h: f64,
) -> Result<NormResult> {
    check_rho(rho)?;
    spec.check_phase()?;
    let s = spacing(h, nodes_per_h)?;
    let rows = Quadrature::on_intervals(&neighborhood_intervals(x, h, rho), s);
    let cols = Quadrature::on_intervals(&neighborhood_intervals(y, h, rho), s);
    Ok(kernel_norm(&rows, &cols, h, |a, b| {
        let amp = spec.amplitude(a, b);
        if amp == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(amp, spec.phase.eval(a, b) / h)
        }
    }))
}

/// Cutoff χ for the circle operator: a tensor bump on `support` (angles in
/// radians), 1 on the inner half, times `scale`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSpec {
    pub support: Rect,
    #[serde(default = "one")]
    pub scale: f64,
}

impl ChiSpec {
    /// Distance from the support to the diagonal `θ = θ′ mod 2π`.
    pub fn diagonal_distance(&self) -> f64 {
        let (lo, hi) = (self.support.x.0 - self.support.y.1, self.support.x.1 - self.support.y.0);
        let k = (lo / TAU).ceil();
        if k * TAU <= hi {
            return 0.0;
        }
        let below = lo - (k - 1.0) * TAU;
        let above = k * TAU - hi;
        below.min(above)
    }

    pub fn eval(&self, t: f64, s: f64) -> f64 {
        self.scale * rect_bump(&self.support, t, s)
    }
}

/// `‖1_{Λ(h^ρ)} B_χ(h) 1_{Λ(h^ρ)}‖` with `Λ` given in the angle chart.
pub fn hyperbolic_norm(limit_set: &RegularSetApprox, h: f64, chi: &ChiSpec, rho: f64) -> Result<NormResult> {
    hyperbolic_norm_with(limit_set, h, chi, rho, NODES_PER_H)
}

pub fn hyperbolic_norm_with(
    limit_set: &RegularSetApprox,
    h: f64,
    chi: &ChiSpec,
    rho: f64,
    nodes_per_h: f64,
) -> Result<NormResult> {
    check_rho(rho)?;
    let d = chi.diagonal_distance();
    if d <= 1e-12 {
        return Err(Error::SupportTouchesDiagonal { distance: d });
    }
    let s = spacing(h, nodes_per_h)?;
    let ivs = neighborhood_intervals(limit_set, h, rho);
    let clip = |r: (f64, f64)| -> Vec<(f64, f64)> {
        ivs.iter()
            .filter_map(|&(a, b)| {
                let (lo, hi) = (a.max(r.0), b.min(r.1));
                (hi > lo).then_some((lo, hi))
            })
            .collect()
    };
    let rows = Quadrature::on_intervals(&clip(chi.support.x), s);
    let cols = Quadrature::on_intervals(&clip(chi.support.y), s);
    let phase = Phase::HyperbolicCircle;
    let amp = (2.0 * PI).sqrt().recip();
    Ok(kernel_norm(&rows, &cols, h, |t, u| {
        let c = chi.eval(t, u);
        if c == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(amp * c, phase.eval(t, u) / h)
        }
    }))
}

/// The mid-third Cantor set of depth k dilated onto the arc `[0, 2]` and the
/// cutoff pairing its two first-level halves, each widened by a tenth of
/// its length.
pub fn synthetic_circle(k: u32) -> Result<(RegularSetApprox, ChiSpec)> {
    use crate::generators::{gen_cantor, CantorSpec};
    use crate::rational::qi;
    let c = gen_cantor(&CantorSpec::new(3, vec![0, 2], k)?)?;
    let set = crate::regular_sets::affine_map(&c, qi(2), qi(0))?.set;
    let m = 0.1 * 2.0 / 3.0;
    let chi = ChiSpec {
        support: Rect::new((-m, 2.0 / 3.0 + m), (4.0 / 3.0 - m, 2.0 + m))?,
        scale: 1.0,
    };
    Ok((set, chi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fup_core::{fourier_restricted_norm, FupInstance};
    use crate::generators::{gen_cantor, CantorSpec};
    use crate::rational::{q, qi};

    fn cantor(k: u32) -> RegularSetApprox {
        gen_cantor(&CantorSpec::new(3, vec![0, 2], k).unwrap()).unwrap().set
    }

    #[test]
    fn midpoint_nodes_at_spacing_h_reproduce_the_dft() {
        let k = 4;
        let n = 81usize;
        let h = 1.0 / n as f64;
        let x = cantor(k);
        let ivs = neighborhood_intervals(&x, h, 1.0);
        let quad = Quadrature::on_intervals(&ivs, h);
        assert_eq!(quad.len(), 16);
        let v = kernel_norm(&quad, &quad, h, |a, b| Complex64::from_polar(1.0, -TAU * a * b / h)).value;
        let idx: Vec<usize> = x.cells().iter().map(|&c| c as usize).collect();
        let d = fourier_restricted_norm(&FupInstance::new(n, idx.clone(), idx).unwrap()).value;
        assert!((v - d).abs() < 1e-12, "{v} {d}");
    }

    #[test]
    fn zero_and_scaled_amplitudes() {
        let x = cantor(3);
        let h = 1.0 / 27.0;
        let z = AmplitudeSpec::new(AmplitudeKind::Zero).unwrap();
        assert_eq!(amplitude_restricted_norm(&x, &x, h, &z, 1.0).unwrap().value, 0.0);
        let one = AmplitudeSpec::new(AmplitudeKind::Constant { value: 1.0 }).unwrap();
        let a = amplitude_restricted_norm(&x, &x, h, &one, 1.0).unwrap().value;
        let b = amplitude_restricted_norm(&x, &x, h, &one.clone().scaled(-2.5), 1.0).unwrap().value;
        assert!((b - 2.5 * a).abs() < 1e-10);
        assert!(a > 0.0 && a <= 1.0 + 1e-9);
    }

    #[test]
    fn plateau_matches_constant_on_inner_half() {
        let x = cantor(3);
        let h = 1.0 / 27.0;
        let p = AmplitudeSpec::new(AmplitudeKind::Plateau {
            support: Rect::new((-1.0, 2.0), (-1.0, 2.0)).unwrap(),
        })
        .unwrap();
        let one = AmplitudeSpec::new(AmplitudeKind::Constant { value: 1.0 }).unwrap();
        let a = amplitude_restricted_norm(&x, &x, h, &p, 1.0).unwrap().value;
        let b = amplitude_restricted_norm(&x, &x, h, &one, 1.0).unwrap().value;
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn linear_phase_is_amplitude_operator_conjugate() {
        let x = cantor(3);
        let h = 1.0 / 27.0;
        let mut spec = PhaseSpec::new(Phase::Linear, Rect::new((-1.0, 2.0), (-1.0, 2.0)).unwrap()).unwrap();
        spec.flat = true;
        let one = AmplitudeSpec::new(AmplitudeKind::Constant { value: 1.0 }).unwrap();
        let a = phase_restricted_norm(&x, &x, h, &spec, 1.0).unwrap().value;
        let b = amplitude_restricted_norm(&x, &x, h, &one, 1.0).unwrap().value;
        assert!((a - b).abs() < 1e-10);
        spec.scale = 0.0;
        assert_eq!(phase_restricted_norm(&x, &x, h, &spec, 1.0).unwrap().value, 0.0);
    }

    #[test]
    fn translation_invariance_linear_phase() {
        let x = cantor(3);
        let h = 1.0 / 27.0;
        let one = AmplitudeSpec::new(AmplitudeKind::Constant { value: 1.0 }).unwrap();
        let base = amplitude_restricted_norm(&x, &x, h, &one, 1.0).unwrap().value;
        let cx = crate::regular_sets::ClaimedSet::new(x.clone(), crate::RegularityClaim::new(0.5, 10.0, q(1, 27), qi(1)).unwrap());
        let xs = crate::regular_sets::affine_map(&cx, qi(1), q(5, 27)).unwrap().set;
        let ys = crate::regular_sets::affine_map(&cx, qi(1), q(-2, 27)).unwrap().set;
        let moved = amplitude_restricted_norm(&xs, &ys, h, &one, 1.0).unwrap().value;
        assert!((base - moved).abs() < 1e-9, "{base} {moved}");
    }

    #[test]
    fn larger_neighborhoods_do_not_decrease_norm() {
        let x = cantor(4);
        let h = 1.0 / 81.0;
        let spec = PhaseSpec::new(
            Phase::Polynomial {
                terms: vec![(1, 1, -TAU), (2, 2, -0.25)],
            },
            Rect::new((-0.5, 1.5), (-0.5, 1.5)).unwrap(),
        )
        .unwrap();
        let mut prev = 0.0;
        for rho in [1.0, 0.95, 0.9, 0.8] {
            let v = phase_restricted_norm(&x, &x, h, &spec, rho).unwrap().value;
            assert!(v >= prev - 1e-12, "rho {rho}: {v} < {prev}");
            prev = v;
        }
    }

    #[test]
    fn degenerate_inputs() {
        let x = cantor(2);
        assert!(matches!(
            PhaseSpec::new(Phase::Polynomial { terms: vec![(2, 0, 1.0)] }, Rect::new((0.0, 1.0), (0.0, 1.0)).unwrap()),
            Err(Error::DegeneratePhase { .. })
        ));
        let spec = PhaseSpec::new(Phase::Linear, Rect::new((0.0, 1.0), (0.0, 1.0)).unwrap()).unwrap();
        assert!(matches!(
            phase_restricted_norm_with(&x, &x, 1.0 / 9.0, &spec, 1.0, 5.0),
            Err(Error::GridTooCoarse { .. })
        ));
        let chi = ChiSpec {
            support: Rect::new((0.0, 1.0), (0.5, 2.0)).unwrap(),
            scale: 1.0,
        };
        assert!(matches!(hyperbolic_norm(&x, 0.1, &chi, 1.0), Err(Error::SupportTouchesDiagonal { .. })));
        let wrapped = ChiSpec {
            support: Rect::new((0.0, 0.5), (TAU - 0.2, TAU + 0.1)).unwrap(),
            scale: 1.0,
        };
        assert_eq!(wrapped.diagonal_distance(), 0.0);
    }

    #[test]
    fn circle_phase_derivative() {
        let p = Phase::HyperbolicCircle;
        let (t, s, e) = (2.0, 0.5, 1e-4);
        let fd = (p.eval(t + e, s + e) - p.eval(t + e, s - e) - p.eval(t - e, s + e) + p.eval(t - e, s - e)) / (4.0 * e * e);
        assert!((fd - p.mixed_derivative(t, s)).abs() < 1e-5);
        // |y − y′|^{2i/h} with |y − y′| = 2|sin((θ−θ′)/2)|.
        assert!((p.eval(t, s) - 2.0 * (2.0 * ((t - s) / 2.0).sin().abs()).ln()).abs() < 1e-14);
    }

    #[test]
    fn hyperbolic_chi_scaling() {
        let (set, chi) = synthetic_circle(3).unwrap();
        let h = 1.0 / 27.0;
        let a = hyperbolic_norm(&set, h, &chi, 1.0).unwrap().value;
        let b = hyperbolic_norm(&set, h, &ChiSpec { scale: 2.0, ..chi }, 1.0).unwrap().value;
        assert!(b <= 2.0 * a + 1e-12 && a > 0.0);
        let z = hyperbolic_norm(&set, h, &ChiSpec { scale: 0.0, ..chi }, 1.0).unwrap().value;
        assert_eq!(z, 0.0);
    }

    #[test]
    fn sampled_amplitude_validation() {
        let x = vec![0.0, 0.5, 1.0];
        let bad = AmplitudeSpec::new(AmplitudeKind::Sampled {
            x: x.clone(),
            xi: x.clone(),
            values: vec![1.0; 9],
        });
        assert!(bad.is_err());
        let mut v = vec![0.0; 9];
        v[4] = 1.0;
        let ok = AmplitudeSpec::new(AmplitudeKind::Sampled { x: x.clone(), xi: x, values: v }).unwrap();
        assert!((ok.eval(0.5, 0.5) - 1.0).abs() < 1e-15);
        assert!((ok.eval(0.25, 0.5) - 0.5).abs() < 1e-15);
        assert_eq!(ok.eval(1.5, 0.5), 0.0);
    }
}
