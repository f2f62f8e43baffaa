//! Harmonic measure on slit strips and the slit plane: closed-form
//! densities and a walk-on-spheres Brownian oracle.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{invalid, Error, Result};

/// Absorption distance of the walk.
pub const ABSORB: f64 = 1e-6;
/// Paths per random substream.
pub const CHUNK: usize = 1 << 14;
const MAX_STEPS: usize = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlitDomainSpec {
    /// Strip half-height.
    pub r: f64,
    /// Slit `I₀ = [a, b]` on the real axis.
    pub slit: (f64, f64),
    /// Real starting point off the slit.
    pub t: f64,
}

impl SlitDomainSpec {
    pub fn new(r: f64, slit: (f64, f64), t: f64) -> Result<Self> {
        let s = SlitDomainSpec { r, slit, t };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r < 1.0) {
            return Err(invalid("r", "must lie in (0, 1)"));
        }
        let len = self.slit.1 - self.slit.0;
        if !(len > 0.0 && len <= 1.0) {
            return Err(invalid("slit", "length must lie in (0, 1]"));
        }
        if !self.t.is_finite() {
            return Err(invalid("t", "must be finite"));
        }
        if self.t >= self.slit.0 && self.t <= self.slit.1 {
            return Err(Error::PointOnSlit(self.t));
        }
        Ok(())
    }

    pub fn slit_len(&self) -> f64 {
        self.slit.1 - self.slit.0
    }

    /// `d(t, I₀)`.
    pub fn distance(&self) -> f64 {
        (self.slit.0 - self.t).max(self.t - self.slit.1).max(0.0)
    }
}

/// Density of the slit-plane harmonic measure on either copy of `[0, ℓ]`.
pub fn slit_plane_density(t: f64, l: f64, z: f64) -> Result<f64> {
    check_slit_plane(t, l)?;
    if !(z > 0.0 && z < l) {
        return Err(invalid("z", "must lie in the open slit"));
    }
    Ok((t * (t - l) / (z * (l - z))).sqrt() / (TAU * (t - z).abs()))
}

fn check_slit_plane(t: f64, l: f64) -> Result<()> {
    if !(l > 0.0) {
        return Err(invalid("l", "must be positive"));
    }
    if t >= 0.0 && t <= l {
        return Err(Error::PointOnSlit(t));
    }
    if (-t).max(t - l) < l / 10.0 {
        return Err(Error::PreconditionViolated {
            clause: format!("d(t, I0) = {} is below |I0|/10", (-t).max(t - l)),
        });
    }
    Ok(())
}

/// Mass of `[0, z]` on one copy; each copy carries 1/2.
pub fn slit_plane_cdf(t: f64, l: f64, z: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    if z >= l {
        return 0.5;
    }
    ((t - l) / t * z / (l - z)).sqrt().atan() / PI
}

/// Point of one copy below which the mass is `p ∈ [0, 1/2]`.
pub fn slit_plane_quantile(t: f64, l: f64, p: f64) -> f64 {
    if p >= 0.5 {
        return l;
    }
    let q = (PI * p).tan().powi(2) * t / (t - l);
    l * q / (1.0 + q)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Line {
    Upper,
    Lower,
}

/// Density of the unslit strip's harmonic measure at `x ± ir`, started at
/// a complex `t` with `|Im t| < r`.
pub fn strip_density(t: Complex64, r: f64, x: f64, line: Line) -> Result<f64> {
    if !(r > 0.0) || t.im.abs() >= r {
        return Err(invalid("t", "must satisfy |Im t| < r"));
    }
    // w = e^{πz/(2r)} maps the strip onto the right half-plane.
    let w0 = (t * (PI / (2.0 * r))).exp();
    let v = (PI * x / (2.0 * r)).exp();
    let iv = match line {
        Line::Upper => Complex64::new(0.0, v),
        Line::Lower => Complex64::new(0.0, -v),
    };
    Ok(w0.re * v / (2.0 * r * (iv - w0).norm_sqr()))
}

/// The same density as the pullback of `|dw|/(π(1+w²))` under
/// `w = i·exp(π(z − t)/(2r))`, for real `t`.
pub fn strip_density_pullback(t: f64, r: f64, x: f64, line: Line) -> f64 {
    let y = match line {
        Line::Upper => r,
        Line::Lower => -r,
    };
    let z = Complex64::new(x, y);
    let w = Complex64::i() * ((z - t) * (PI / (2.0 * r))).exp();
    let dw = PI / (2.0 * r) * w.norm();
    dw / (PI * (1.0 + w.re * w.re))
}

/// Mass of `(−∞, x]` on one line for real `t`; each line carries 1/2.
pub fn strip_cdf(t: f64, r: f64, x: f64) -> f64 {
    (PI * (x - t) / (2.0 * r)).exp().atan() / PI
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    Strip,
    SlitStrip,
    SlitPlane,
}

impl std::str::FromStr for DomainKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strip" => Ok(DomainKind::Strip),
            "slit-strip" => Ok(DomainKind::SlitStrip),
            "slit-plane" => Ok(DomainKind::SlitPlane),
            _ => Err(invalid("domain", format!("unknown domain `{s}`"))),
        }
    }
}

/// Boundary pieces `I₊, I₋, ∂₊Σ, ∂₋Σ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Piece {
    SlitPlus,
    SlitMinus,
    UpperLine,
    LowerLine,
}

pub const PIECES: [Piece; 4] = [Piece::SlitPlus, Piece::SlitMinus, Piece::UpperLine, Piece::LowerLine];

impl Piece {
    fn index(self) -> usize {
        self as usize
    }

    pub fn point(self, x: f64, r: f64) -> Complex64 {
        match self {
            Piece::SlitPlus | Piece::SlitMinus => Complex64::new(x, 0.0),
            Piece::UpperLine => Complex64::new(x, r),
            Piece::LowerLine => Complex64::new(x, -r),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExitDistribution {
    pub kind: DomainKind,
    pub spec: SlitDomainSpec,
    pub n_paths: usize,
    pub seed: u64,
    /// Exit abscissae per piece in path order, indexed like [`PIECES`].
    pub exits: [Vec<f64>; 4],
    pub total_steps: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub fraction: f64,
    pub sigma: f64,
}

fn binomial_sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

impl ExitDistribution {
    pub fn count(&self, p: Piece) -> usize {
        self.exits[p.index()].len()
    }

    pub fn fraction(&self, p: Piece) -> f64 {
        self.count(p) as f64 / self.n_paths as f64
    }

    pub fn sigma(&self, p: Piece) -> f64 {
        binomial_sigma(self.fraction(p), self.n_paths)
    }

    /// Counts of exits through `piece` in consecutive bins `[e_i, e_{i+1})`.
    pub fn histogram(&self, piece: Piece, edges: &[f64]) -> Vec<Bin> {
        let mut counts = vec![0usize; edges.len().saturating_sub(1)];
        for &x in &self.exits[piece.index()] {
            let i = edges.partition_point(|&e| e <= x);
            if i >= 1 && i < edges.len() {
                counts[i - 1] += 1;
            }
        }
        counts
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let f = c as f64 / self.n_paths as f64;
                Bin {
                    lo: edges[i],
                    hi: edges[i + 1],
                    count: c,
                    fraction: f,
                    sigma: binomial_sigma(f, self.n_paths),
                }
            })
            .collect()
    }
}

fn segment_distance(p: Complex64, a: f64, b: f64) -> f64 {
    let x = p.re.clamp(a, b);
    Complex64::new(p.re - x, p.im).norm()
}

/// Hitting point on the circle `|z − c| = R` for a path started outside it:
/// the exterior Poisson kernel is a wrapped Cauchy law with parameter `R/|p − c|`.
fn return_to_circle(rng: &mut ChaCha8Rng, p: Complex64, c: f64, big_r: f64) -> Complex64 {
    let d = p - c;
    let rho = big_r / d.norm();
    let u: f64 = rng.gen();
    let phi = 2.0 * (((1.0 - rho) / (1.0 + rho)) * (PI * (u - 0.5)).tan()).atan();
    Complex64::new(c, 0.0) + Complex64::from_polar(big_r, d.arg() + phi)
}

fn walk(rng: &mut ChaCha8Rng, kind: DomainKind, spec: &SlitDomainSpec, steps: &mut u64) -> Option<(Piece, f64)> {
    let (a, b) = spec.slit;
    let r = spec.r;
    let center = 0.5 * (a + b);
    let outer = b - a;
    let mut p = Complex64::new(spec.t, 0.0);
    let mut prev_im = 0.0;
    for _ in 0..MAX_STEPS {
        if kind == DomainKind::SlitPlane && (p - center).norm() > outer {
            p = return_to_circle(rng, p, center, outer);
            *steps += 1;
        }
        let d_line = if kind == DomainKind::SlitPlane { f64::INFINITY } else { r - p.im.abs() };
        let d_slit = if kind == DomainKind::Strip { f64::INFINITY } else { segment_distance(p, a, b) };
        let d = d_line.min(d_slit);
        if d < ABSORB {
            return Some(if d_line <= d_slit {
                (if p.im > 0.0 { Piece::UpperLine } else { Piece::LowerLine }, p.re)
            } else {
                let im = if p.im != 0.0 { p.im } else { prev_im };
                (if im >= 0.0 { Piece::SlitPlus } else { Piece::SlitMinus }, p.re.clamp(a, b))
            });
        }
        if p.im != 0.0 {
            prev_im = p.im;
        }
        let theta: f64 = rng.gen::<f64>() * TAU;
        p += Complex64::from_polar(d, theta);
        *steps += 1;
    }
    None
}

/// Exit distribution of `n_paths` walks from `spec.t`, reproducible given
/// the seed: chunk `i` draws from stream `i` of the seeded generator.
pub fn brownian_exit(spec: &SlitDomainSpec, kind: DomainKind, n_paths: usize, seed: u64) -> Result<ExitDistribution> {
    spec.validate()?;
    if n_paths < 1000 {
        return Err(invalid("n_paths", "must be at least 1000"));
    }
    let chunks = n_paths.div_ceil(CHUNK);
    let parts: Vec<([Vec<f64>; 4], u64, usize)> = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(ci as u64);
            let n = CHUNK.min(n_paths - ci * CHUNK);
            let mut exits: [Vec<f64>; 4] = Default::default();
            let mut steps = 0u64;
            let mut lost = 0usize;
            for _ in 0..n {
                match walk(&mut rng, kind, spec, &mut steps) {
                    Some((piece, x)) => exits[piece.index()].push(x),
                    None => lost += 1,
                }
            }
            (exits, steps, lost)
        })
        .collect();
    let mut exits: [Vec<f64>; 4] = Default::default();
    let mut total_steps = 0;
    for (e, s, lost) in parts {
        if lost > 0 {
            return Err(invalid("n_paths", format!("{lost} walks exceeded {MAX_STEPS} steps")));
        }
        for (dst, src) in exits.iter_mut().zip(e) {
            dst.extend(src);
        }
        total_steps += s;
    }
    Ok(ExitDistribution {
        kind,
        spec: *spec,
        n_paths,
        seed,
        exits,
        total_steps,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Passes at the 1% level.
    pub passes: bool,
    pub observed: Vec<usize>,
    pub expected: Vec<f64>,
}

pub fn chi_square(observed: &[usize], probs: &[f64]) -> Result<ChiSquare> {
    if observed.len() != probs.len() || observed.len() < 2 {
        return Err(invalid("bins", "need matching observed and expected bins"));
    }
    let n: usize = observed.iter().sum();
    let expected: Vec<f64> = probs.iter().map(|p| p * n as f64).collect();
    let statistic: f64 = observed
        .iter()
        .zip(&expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    let dof = observed.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| invalid("dof", e.to_string()))?;
    let p_value = 1.0 - dist.cdf(statistic);
    Ok(ChiSquare {
        statistic,
        dof,
        p_value,
        passes: p_value > 0.01,
        observed: observed.to_vec(),
        expected,
    })
}

/// χ² of unslit-strip exits against the closed form on 20 equiprobable
/// bins, 10 per line.
pub fn strip_chi_square(dist: &ExitDistribution) -> Result<ChiSquare> {
    let (t, r) = (dist.spec.t, dist.spec.r);
    let edges: Vec<f64> = (0..=10)
        .map(|i| match i {
            0 => f64::NEG_INFINITY,
            10 => f64::INFINITY,
            _ => t + 2.0 * r / PI * (PI * i as f64 / 20.0).tan().ln(),
        })
        .collect();
    let mut obs = Vec::new();
    for line in [Piece::UpperLine, Piece::LowerLine] {
        obs.extend(dist.histogram(line, &edges).iter().map(|b| b.count));
    }
    let other = dist.n_paths - obs.iter().sum::<usize>();
    if other > 0 {
        return Err(invalid("domain", "strip exits must all lie on the two lines"));
    }
    chi_square(&obs, &[1.0 / 20.0; 20])
}

/// χ² of slit-plane exits against the closed form on 10 equiprobable bins
/// per copy.
pub fn slit_plane_chi_square(dist: &ExitDistribution) -> Result<ChiSquare> {
    let (a, b) = dist.spec.slit;
    let (t, l) = (dist.spec.t - a, b - a);
    check_slit_plane(t, l)?;
    let edges: Vec<f64> = (0..=10).map(|i| a + slit_plane_quantile(t, l, i as f64 / 20.0)).collect();
    let mut obs = Vec::new();
    for piece in [Piece::SlitPlus, Piece::SlitMinus] {
        let mut h: Vec<usize> = dist.histogram(piece, &edges).iter().map(|b| b.count).collect();
        // The last edge is closed: exits clamped to the right tip.
        h[9] += dist.exits[piece.index()].iter().filter(|&&x| x >= b).count();
        obs.extend(h);
    }
    chi_square(&obs, &[1.0 / 20.0; 20])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundCheck {
    pub plus: f64,
    pub minus: f64,
    pub sigma_plus: f64,
    pub sigma_minus: f64,
    /// `(|I₀|/8)·e^{−2/r}`.
    pub bound: f64,
    pub holds: bool,
}

pub fn slit_mass_lower_bound(spec: &SlitDomainSpec) -> f64 {
    spec.slit_len() / 8.0 * (-2.0 / spec.r).exp()
}

pub fn slit_strip_lower_bound(spec: &SlitDomainSpec, n_paths: usize, seed: u64) -> Result<LowerBoundCheck> {
    spec.validate()?;
    if spec.distance() > 1.0 {
        return Err(Error::PreconditionViolated {
            clause: format!("d(t, I0) = {} exceeds 1", spec.distance()),
        });
    }
    let dist = brownian_exit(spec, DomainKind::SlitStrip, n_paths, seed)?;
    let bound = slit_mass_lower_bound(spec);
    let (plus, minus) = (dist.fraction(Piece::SlitPlus), dist.fraction(Piece::SlitMinus));
    let (sp, sm) = (dist.sigma(Piece::SlitPlus), dist.sigma(Piece::SlitMinus));
    Ok(LowerBoundCheck {
        plus,
        minus,
        sigma_plus: sp,
        sigma_minus: sm,
        bound,
        holds: plus >= bound - 3.0 * sp && minus >= bound - 3.0 * sm,
    })
}

/// Bounded holomorphic test functions on the closed strip.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TestFunction {
    One,
    /// `e^{iaz}`.
    Exp { a: f64 },
    /// `p(z)·e^{iaz}` with real coefficients, constant term first.
    PolyExp { coeffs: Vec<f64>, a: f64 },
}

impl TestFunction {
    pub fn log_abs(&self, z: Complex64) -> f64 {
        match self {
            TestFunction::One => 0.0,
            TestFunction::Exp { a } => -a * z.im,
            TestFunction::PolyExp { coeffs, a } => {
                let p = coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
                p.norm().ln() - a * z.im
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubharmonicCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub sigma: f64,
    pub holds: bool,
}

/// `log|F(t)|` against the Monte Carlo integral of `log|F|` over the
/// slit-strip exit distribution.
pub fn subharmonic_bound_check(spec: &SlitDomainSpec, f: &TestFunction, n_paths: usize, seed: u64) -> Result<SubharmonicCheck> {
    let dist = brownian_exit(spec, DomainKind::SlitStrip, n_paths, seed)?;
    subharmonic_from(&dist, f)
}

pub fn subharmonic_from(dist: &ExitDistribution, f: &TestFunction) -> Result<SubharmonicCheck> {
    let lhs = f.log_abs(Complex64::new(dist.spec.t, 0.0));
    let mut sum = 0.0;
    let mut sq = 0.0;
    for piece in PIECES {
        for &x in &dist.exits[piece.index()] {
            let v = f.log_abs(piece.point(x, dist.spec.r));
            sum += v;
            sq += v * v;
        }
    }
    let n = dist.n_paths as f64;
    let rhs = sum / n;
    let sigma = ((sq / n - rhs * rhs).max(0.0) / n).sqrt();
    if !rhs.is_finite() {
        return Err(invalid("f", "log|F| is not integrable against the exit law"));
    }
    Ok(SubharmonicCheck {
        lhs,
        rhs,
        sigma,
        holds: lhs <= rhs + 3.0 * sigma.max(1e-15),
    })
}

/// Empirical `L^p` norm of the slit-plane density on one copy, by the
/// substitution `z = ℓ sin²φ` which removes the endpoint singularities.
pub fn slit_plane_lp_norm(t: f64, l: f64, p: f64, n: usize) -> Result<f64> {
    check_slit_plane(t, l)?;
    if !(p >= 1.0) {
        return Err(invalid("p", "must be at least 1"));
    }
    let h = FRAC_PI_2 / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let phi = (i as f64 + 0.5) * h;
        let z = l * phi.sin().powi(2);
        let dz = 2.0 * l * phi.sin() * phi.cos();
        acc += slit_plane_density(t, l, z)?.powf(p) * dz * h;
    }
    Ok(acc.powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slit_plane_density_is_a_probability() {
        for t in [2.0, -0.3, 1.5] {
            let l = 1.0;
            let m = slit_plane_lp_norm(t, l, 1.0, 200_000).unwrap();
            assert!((2.0 * m - 1.0).abs() < 1e-6, "t {t}: {m}");
            assert!((slit_plane_cdf(t, l, l) - 0.5).abs() < 1e-15);
            let z = slit_plane_quantile(t, l, 0.3);
            assert!((slit_plane_cdf(t, l, z) - 0.3).abs() < 1e-12);
        }
        let v = slit_plane_density(2.0, 1.0, 0.5).unwrap();
        assert!((v - (2.0f64 / 0.25).sqrt() / (TAU * 1.5)).abs() < 1e-15);
    }

    #[test]
    fn slit_plane_edge_singularity() {
        let zs: Vec<f64> = (2..=6).map(|k| 10f64.powi(-k)).collect();
        let xs: Vec<f64> = zs.iter().map(|z| z.ln()).collect();
        let ys: Vec<f64> = zs.iter().map(|&z| slit_plane_density(2.0, 1.0, z).unwrap().ln()).collect();
        let fit = crate::fit::least_squares(&xs, &ys).unwrap();
        assert!((fit.slope + 0.5).abs() < 0.05);
        assert!(slit_plane_lp_norm(2.0, 1.0, 1.9, 100_000).unwrap().is_finite());
        assert!(matches!(slit_plane_density(0.5, 1.0, 0.2), Err(Error::PointOnSlit(_))));
        assert!(slit_plane_density(1.05, 1.0, 0.2).is_err());
    }

    #[test]
    fn strip_closed_forms() {
        let (t, r) = (0.3, 0.5);
        for s in [0.1, 0.7, 2.0] {
            let a = strip_density(Complex64::new(t, 0.0), r, t + s, Line::Upper).unwrap();
            let b = strip_density(Complex64::new(t, 0.0), r, t - s, Line::Lower).unwrap();
            assert!((a - b).abs() < 1e-15);
            assert!((a - 1.0 / (4.0 * r * (PI * s / (2.0 * r)).cosh())).abs() < 1e-14);
            assert!((a - strip_density_pullback(t, r, t + s, Line::Upper)).abs() < 1e-10);
            assert!((b - strip_density_pullback(t, r, t - s, Line::Lower)).abs() < 1e-10);
        }
        assert!((strip_density(Complex64::new(0.0, 0.0), 0.5, 0.0, Line::Upper).unwrap() - 0.5).abs() < 1e-15);
        assert!((2.0 * (strip_cdf(t, r, 60.0) - strip_cdf(t, r, -60.0)) - 1.0).abs() < 1e-8);
        // Off-axis start: total mass over both lines is still 1.
        let tc = Complex64::new(0.0, 0.3);
        let h = 1e-3;
        let total: f64 = (-20_000..20_000)
            .map(|i| {
                let x = (i as f64 + 0.5) * h;
                (strip_density(tc, 0.5, x, Line::Upper).unwrap() + strip_density(tc, 0.5, x, Line::Lower).unwrap()) * h
            })
            .sum();
        assert!((total - 1.0).abs() < 1e-8, "{total}");
        assert!(strip_density(Complex64::new(0.0, 0.6), 0.5, 0.0, Line::Upper).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(SlitDomainSpec::new(0.5, (-1.0, 0.0), 0.0), Err(Error::PointOnSlit(_))));
        assert!(SlitDomainSpec::new(1.5, (-1.0, 0.0), 0.5).is_err());
        assert!(SlitDomainSpec::new(0.5, (-1.0, 1.0), 2.0).is_err());
    }

    #[test]
    fn walks_are_reproducible_and_symmetric() {
        let spec = SlitDomainSpec::new(0.5, (-1.0, 0.0), 0.5).unwrap();
        let a = brownian_exit(&spec, DomainKind::Strip, 20_000, 7).unwrap();
        let b = brownian_exit(&spec, DomainKind::Strip, 20_000, 7).unwrap();
        assert_eq!(a, b);
        let up = a.fraction(Piece::UpperLine);
        assert!((up - 0.5).abs() < 3.0 * a.sigma(Piece::UpperLine));
        assert_eq!(a.count(Piece::SlitPlus), 0);
    }

    #[test]
    fn sigma_shrinks_with_paths() {
        let spec = SlitDomainSpec::new(0.5, (-1.0, 0.0), 0.5).unwrap();
        let a = brownian_exit(&spec, DomainKind::SlitStrip, 20_000, 1).unwrap();
        let b = brownian_exit(&spec, DomainKind::SlitStrip, 40_000, 1).unwrap();
        let ratio = b.sigma(Piece::SlitPlus) / a.sigma(Piece::SlitPlus);
        assert!((ratio - 0.5f64.sqrt()).abs() < 0.05, "{ratio}");
    }

    #[test]
    fn small_sample_chi_squares() {
        let spec = SlitDomainSpec::new(0.5, (0.0, 1.0), 2.0).unwrap();
        let d = brownian_exit(&spec, DomainKind::SlitPlane, 50_000, 3).unwrap();
        assert_eq!(d.count(Piece::UpperLine) + d.count(Piece::LowerLine), 0);
        assert!(slit_plane_chi_square(&d).unwrap().passes);
        let s = brownian_exit(&spec, DomainKind::Strip, 50_000, 3).unwrap();
        assert!(strip_chi_square(&s).unwrap().passes);
    }

    #[test]
    fn monotone_under_domain_inclusion() {
        let spec = SlitDomainSpec::new(0.5, (0.0, 1.0), 1.2).unwrap();
        let s = brownian_exit(&spec, DomainKind::SlitStrip, 20_000, 5).unwrap();
        for p in [Piece::SlitPlus, Piece::SlitMinus] {
            assert!(s.fraction(p) <= 0.5 + 3.0 * s.sigma(p));
        }
    }

    #[test]
    fn subharmonic_catalog() {
        let spec = SlitDomainSpec::new(0.5, (-1.0, 0.0), 0.5).unwrap();
        let d = brownian_exit(&spec, DomainKind::SlitStrip, 20_000, 9).unwrap();
        let one = subharmonic_from(&d, &TestFunction::One).unwrap();
        assert_eq!((one.lhs, one.rhs), (0.0, 0.0));
        assert!(subharmonic_from(&d, &TestFunction::Exp { a: 1.0 }).unwrap().holds);
        let pe = TestFunction::PolyExp {
            coeffs: vec![2.0, 1.0],
            a: -0.5,
        };
        assert!(subharmonic_from(&d, &pe).unwrap().holds);
    }
}
