//! Transformation lemmas: each returns the transformed set with the
//! regularity claimed for it.

use num_traits::{Signed, ToPrimitive, Zero};

use super::{ClaimedSet, Frame, RegularSetApprox, RegularityCertificate, RegularityClaim};
use crate::error::{invalid, Error, Result};
use crate::rational::{self, pow, qi, to_f64, Q};

fn precondition(clause: impl Into<String>) -> Error {
    Error::PreconditionViolated {
        clause: clause.into(),
    }
}

/// `y + λX` with the measure `λ^δ μ(λ^{-1}(· − y))`; scales scale by λ.
pub fn affine_map(x: &ClaimedSet, lambda: Q, y: Q) -> Result<ClaimedSet> {
    if !lambda.is_positive() {
        return Err(invalid("lambda", "must be positive"));
    }
    let s = &x.set;
    let frame = Frame {
        origin: y + lambda * s.frame.origin,
        scale: lambda * s.frame.scale,
    };
    let f = to_f64(&lambda).powf(x.claim.delta);
    let weights = s.weights.iter().map(|w| w * f).collect();
    let set = RegularSetApprox::new(s.base, s.depth, frame, s.cells.clone(), weights)?;
    let claim = RegularityClaim {
        alpha0: x.claim.alpha0 * lambda,
        alpha1: x.claim.alpha1 * lambda,
        ..x.claim.clone()
    };
    Ok(ClaimedSet { set, claim })
}

/// Constant `2T·C_R` on scales `[α₀, T·α₁]`.
pub fn raise_upper_scale(cert: &RegularityCertificate, t: Q) -> Result<RegularityClaim> {
    if t < qi(1) {
        return Err(invalid("T", "must be at least 1"));
    }
    if !cert.verified {
        return Err(Error::NotVerified);
    }
    Ok(RegularityClaim {
        delta: cert.delta,
        c_r: 2.0 * to_f64(&t) * cert.c_r,
        alpha0: cert.alpha0,
        alpha1: cert.alpha1 * t,
    })
}

/// `X(Tα₀)` with the convolved measure `(Tα₀)^{-1}∫μ(· + y)dy`; constant
/// `4T·C_R` on scales `[2α₀, α₁]`.
pub fn neighborhood(x: &ClaimedSet, t: Q) -> Result<ClaimedSet> {
    if t < qi(1) {
        return Err(invalid("T", "must be at least 1"));
    }
    let c = &x.claim;
    if c.alpha1 < c.alpha0 * qi(2) {
        return Err(precondition("α₁ ≥ 2α₀"));
    }
    let s = t * c.alpha0;
    if !s.is_positive() {
        return Err(precondition("α₀ > 0"));
    }
    let set = fatten(&x.set, s)?;
    let claim = RegularityClaim {
        delta: c.delta,
        c_r: 4.0 * to_f64(&t) * c.c_r,
        alpha0: c.alpha0 * qi(2),
        alpha1: c.alpha1,
    };
    Ok(ClaimedSet { set, claim })
}

/// Fattens by `s` on a grid fine enough to hold both the cells and `s`.
pub(crate) fn fatten(set: &RegularSetApprox, s: Q) -> Result<RegularSetApprox> {
    let base_pow = qi(pow(set.base, set.depth));
    if set.is_point() {
        let frame = Frame {
            origin: set.frame.origin - s,
            scale: s * base_pow,
        };
        let m = set.total_mass();
        return RegularSetApprox::new(set.base, set.depth, frame, vec![0, 1], vec![m, m]);
    }
    let w = set.width();
    let g = rational::gcd(&w, &s);
    let a = (w / g).to_integer() as i64;
    let b = (s / g).to_integer() as i64;
    let su = (s / w).to_f64().unwrap();
    let mut cells: Vec<i64> = Vec::new();
    for &j in &set.cells {
        let lo = j * a - b;
        let hi = (j + 1) * a + b;
        let from = match cells.last() {
            Some(&last) if last >= lo => last + 1,
            _ => lo,
        };
        cells.extend(from..hi);
    }
    // G(u) = ∫_{-∞}^u F, F the cumulative mass, in old grid units.
    let mut cm = Vec::with_capacity(set.len() + 1);
    cm.push(0.0);
    let mut acc = 0.0;
    for (i, &j) in set.cells.iter().enumerate() {
        acc += set.weights[i] * (j as f64 + 0.5);
        cm.push(acc);
    }
    let g_int = |u: f64| -> f64 {
        let fl = u.floor();
        let j = fl as i64;
        let idx = set.cells.partition_point(|&c| c < j);
        let mut v = u * set.cum[idx] - cm[idx];
        if idx < set.len() && set.cells[idx] == j {
            let f = u - fl;
            v += set.weights[idx] * f * f * 0.5;
        }
        v
    };
    let inv_a = 1.0 / a as f64;
    let mut out_cells = Vec::with_capacity(cells.len());
    let mut weights = Vec::with_capacity(cells.len());
    for &c in &cells {
        let u0 = c as f64 * inv_a;
        let u1 = (c + 1) as f64 * inv_a;
        let m = (g_int(u1 + su) - g_int(u0 + su) - g_int(u1 - su) + g_int(u0 - su)) / su;
        if m > 0.0 {
            out_cells.push(c);
            weights.push(m);
        }
    }
    let frame = Frame {
        origin: set.frame.origin,
        scale: g * base_pow,
    };
    RegularSetApprox::new(set.base, set.depth, frame, out_cells, weights)
}

/// A monotone C¹ map given by samples of its values and derivatives,
/// interpolated by cubic Hermite segments.
#[derive(Clone, Debug)]
pub struct MonotoneMap {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl MonotoneMap {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, ds: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != ys.len() || xs.len() != ds.len() {
            return Err(invalid("map", "needs ≥ 2 samples of equal length"));
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("map", "abscissae must increase"));
        }
        let inc = ys[1] > ys[0];
        let mono = ys.windows(2).all(|w| if inc { w[1] > w[0] } else { w[1] < w[0] });
        let signs = ds.iter().all(|&d| if inc { d > 0.0 } else { d < 0.0 });
        if !mono || !signs {
            return Err(invalid("map", "samples are not strictly monotone"));
        }
        Ok(MonotoneMap { xs, ys, ds })
    }

    pub fn from_fn(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> Result<Self> {
        let n = n.max(2);
        let xs: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
        let ys = xs.iter().map(|&x| f(x)).collect();
        let ds = xs.iter().map(|&x| df(x)).collect();
        Self::new(xs, ys, ds)
    }

    pub fn affine(lambda: f64, y: f64, a: f64, b: f64) -> Result<Self> {
        Self::from_fn(|x| y + lambda * x, |_| lambda, a, b, 2)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    pub fn increasing(&self) -> bool {
        self.ys[1] > self.ys[0]
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.xs.partition_point(|&v| v <= x).clamp(1, self.xs.len() - 1) - 1;
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.ys[i]
            + (t3 - 2.0 * t2 + t) * h * self.ds[i]
            + (-2.0 * t3 + 3.0 * t2) * self.ys[i + 1]
            + (t3 - t2) * h * self.ds[i + 1]
    }

    /// Inverse by bisection on the interpolant.
    pub fn inverse(&self, y: f64) -> f64 {
        let (mut lo, mut hi) = self.domain();
        let inc = self.increasing();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (self.eval(mid) < y) == inc {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * (1.0 + mid.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Checks the sampled derivatives against `[1/C_F, C_F]`.
    pub fn check_bounds(&self, c_f: f64) -> Result<()> {
        for (x, d) in self.xs.iter().zip(&self.ds) {
            let v = d.abs();
            if v < 1.0 / c_f * (1.0 - 1e-12) || v > c_f * (1.0 + 1e-12) {
                return Err(Error::DerivativeBoundViolated {
                    x: *x,
                    value: *d,
                    c_f,
                });
            }
        }
        Ok(())
    }
}

/// `F(X)` with the pulled-back measure on a grid refined by the smallest
/// power of the base that is at least 8.
pub fn nonlinear_image(x: &ClaimedSet, map: &MonotoneMap, c_f: Q) -> Result<ClaimedSet> {
    let cf = to_f64(&c_f);
    if cf < 1.0 {
        return Err(invalid("C_F", "must be at least 1"));
    }
    map.check_bounds(cf)?;
    let c = &x.claim;
    if c.alpha1 < c_f * c_f * c.alpha0 {
        return Err(precondition("α₁ ≥ C_F²α₀"));
    }
    let s = &x.set;
    let (lo, hi) = s.hull();
    let (da, db) = map.domain();
    if to_f64(&lo) < da - 1e-12 || to_f64(&hi) > db + 1e-12 {
        return Err(precondition("set lies inside the map's sampled domain"));
    }
    let claim = RegularityClaim {
        delta: c.delta,
        c_r: cf * c.c_r,
        alpha0: c.alpha0 * c_f,
        alpha1: c.alpha1 / c_f,
    };
    if s.is_point() {
        let p = map.eval(to_f64(&s.frame.origin));
        let origin = rational::parse(&format!("{p:.17e}"))?;
        let mut set = RegularSetApprox::point(origin);
        set = set.with_weights(vec![s.total_mass()])?;
        return Ok(ClaimedSet { set, claim });
    }
    let mut refine: u32 = 0;
    while (s.base as u64).pow(refine) < 8 {
        refine += 1;
    }
    let depth = s.depth + refine;
    let wq = s.width() / qi(pow(s.base, refine));
    let w = to_f64(&wq);
    let inc = map.increasing();
    let cdf = |y: f64| s.cdf_units(s.to_units_f64(map.inverse(y)));
    let mut comps: Vec<(f64, f64)> = s
        .components()
        .iter()
        .map(|(a, b)| {
            let (ya, yb) = (map.eval(to_f64(a)), map.eval(to_f64(b)));
            if inc {
                (ya, yb)
            } else {
                (yb, ya)
            }
        })
        .collect();
    if !inc {
        comps.reverse();
    }
    // Each component keeps the grid cells inside its image; the slivers at
    // its ends join the nearest kept cell. Rounding outward instead puts
    // massless edges into the set, which the lower bound sees at α₀.
    let mut out_cells: Vec<i64> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for (ya, yb) in comps {
        let (mut j0, mut j1) = ((ya / w - 1e-9).ceil() as i64, (yb / w + 1e-9).floor() as i64);
        if j1 <= j0 {
            j0 = (ya / w).floor() as i64;
            j1 = j0 + 1;
        }
        for j in j0..j1 {
            let lo = if j == j0 { ya.min(j as f64 * w) } else { j as f64 * w };
            let hi = if j == j1 - 1 { yb.max((j + 1) as f64 * w) } else { (j + 1) as f64 * w };
            let m = (cdf(hi) - cdf(lo)).abs();
            if m <= 0.0 {
                continue;
            }
            match out_cells.last() {
                Some(&last) if last >= j => *weights.last_mut().unwrap() += m,
                _ => {
                    out_cells.push(j);
                    weights.push(m);
                }
            }
        }
    }
    let frame = Frame {
        origin: Q::zero(),
        scale: wq * qi(pow(s.base, depth)),
    };
    let set = RegularSetApprox::new(s.base, depth, frame, out_cells, weights)?;
    Ok(ClaimedSet { set, claim })
}

/// `X ∩ J` for nested concentric `J ⊂ J′`. The separation clause is read as
/// `X ∩ int J′ ⊂ J`, so points of X on the boundary of `J′` are allowed.
pub fn intersect_interval(x: &ClaimedSet, j: (Q, Q), jp: (Q, Q)) -> Result<ClaimedSet> {
    let c = &x.claim;
    let s = &x.set;
    if j.0 > j.1 || jp.0 > jp.1 {
        return Err(invalid("interval", "left endpoint exceeds right"));
    }
    if !(jp.0 <= j.0 && j.1 <= jp.1) {
        return Err(precondition("J ⊂ J′"));
    }
    if j.0 + j.1 != jp.0 + jp.1 {
        return Err(precondition("J and J′ share a center"));
    }
    let gap = (jp.1 - jp.0) - (j.1 - j.0);
    if gap < c.alpha0 || gap.is_zero() {
        return Err(precondition("|J′| − |J| ≥ α₀"));
    }
    if !s.meets_closed(&j.0, &j.1) {
        return Err(precondition("X ∩ J nonempty"));
    }
    let inside = |i: usize| {
        let (a, b) = s.cell_interval(i);
        j.0 <= a && b <= j.1
    };
    let touches_open = |i: usize| {
        let (a, b) = s.cell_interval(i);
        a < jp.1 && b > jp.0 || (a == b && a > jp.0 && a < jp.1)
    };
    if (0..s.len()).any(|i| touches_open(i) && !inside(i)) {
        return Err(precondition("X ∩ J′ ⊂ J"));
    }
    let set = s.filter_cells(inside)?;
    let mut alpha1 = c.alpha1;
    if gap < alpha1 {
        alpha1 = gap;
    }
    let claim = RegularityClaim {
        alpha1,
        ..c.clone()
    };
    Ok(ClaimedSet { set, claim })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn cantor(k: u32) -> ClaimedSet {
        let mut cells = vec![0i64];
        for _ in 0..k {
            cells = cells.iter().flat_map(|c| [3 * c, 3 * c + 2]).collect();
        }
        let set = RegularSetApprox::uniform(3, k, Frame::unit(), cells, 1.0).unwrap();
        let delta = 2f64.ln() / 3f64.ln();
        let c = crate::regular_sets::scan_regularity(&set, delta, q(1, 3i128.pow(k)), qi(1))
            .unwrap()
            .constant();
        ClaimedSet::new(set, RegularityClaim::new(delta, c, q(1, 3i128.pow(k)), qi(1)).unwrap())
    }

    #[test]
    fn affine_point_and_identity() {
        let p = ClaimedSet::new(
            RegularSetApprox::point(qi(0)),
            RegularityClaim::new(0.0, 1.0, qi(0), qi(1)).unwrap(),
        );
        let m = affine_map(&p, qi(5), qi(3)).unwrap();
        assert_eq!(m.set.frame.origin, qi(3));
        assert!(m.set.is_point());
        assert_eq!(m.claim.c_r, 1.0);
        let c = cantor(3);
        let id = affine_map(&c, qi(1), qi(0)).unwrap();
        assert_eq!(id, c);
    }

    #[test]
    fn affine_third_is_left_subcantor() {
        let c = cantor(4);
        let m = affine_map(&c, q(1, 3), qi(0)).unwrap();
        assert_eq!(m.claim.alpha1, q(1, 3));
        assert_eq!(m.claim.c_r, c.claim.c_r);
        let cert = m.verify().unwrap();
        assert!(cert.verified, "{cert:?}");
        for i in 0..c.set.len() {
            let (a, b) = c.set.cell_interval(i);
            let (ma, mb) = m.set.cell_interval(i);
            assert_eq!((ma, mb), (a / qi(3), b / qi(3)));
        }
    }

    #[test]
    fn neighborhood_of_point_and_contiguous() {
        let p = ClaimedSet::new(
            RegularSetApprox::point(qi(0)),
            RegularityClaim::new(0.0, 1.0, qi(1), qi(4)).unwrap(),
        );
        let n = neighborhood(&p, qi(1)).unwrap();
        assert_eq!(n.set.hull(), (qi(-1), qi(1)));
        assert!((n.set.total_mass() - 2.0).abs() < 1e-12);

        let full = RegularSetApprox::uniform(2, 4, Frame::unit(), (0..16).collect(), 1.0).unwrap();
        let fc = ClaimedSet::new(full, RegularityClaim::new(1.0, 2.0, q(1, 16), qi(1)).unwrap());
        let n = neighborhood(&fc, qi(1)).unwrap();
        assert_eq!(n.claim.c_r, 8.0);
        assert_eq!(n.set.hull(), (q(-1, 16), q(17, 16)));
        assert!((n.set.total_mass() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn neighborhood_reverifies() {
        let c = cantor(4);
        let n = neighborhood(&c, qi(1)).unwrap();
        assert_eq!(n.claim.alpha0, q(2, 81));
        let cert = n.verify().unwrap();
        assert!(cert.verified, "{cert:?}");
        let n2 = neighborhood(&c, q(5, 2)).unwrap();
        assert!(n2.verify().unwrap().verified);
    }

    #[test]
    fn nonlinear_identity_and_sine() {
        let c = cantor(4);
        let id = MonotoneMap::affine(1.0, 0.0, 0.0, 1.0).unwrap();
        let m = nonlinear_image(&c, &id, qi(1)).unwrap();
        for k in 0..=20 {
            let a = k as f64 / 20.0;
            assert!((m.set.measure(0.0, a) - c.set.measure(0.0, a)).abs() < 1e-9);
        }
        let f = MonotoneMap::from_fn(
            |x| x / 2.0 + x.sin() / 4.0,
            |x| 0.5 + x.cos() / 4.0,
            0.0,
            1.0,
            257,
        )
        .unwrap();
        let m = nonlinear_image(&c, &f, qi(2)).unwrap();
        assert_eq!(m.claim.c_r, 2.0 * c.claim.c_r);
        assert!(m.verify().unwrap().verified);
        assert!(matches!(
            nonlinear_image(&c, &f, q(3, 2)),
            Err(Error::DerivativeBoundViolated { .. })
        ));
    }

    #[test]
    fn nonlinear_doubling_matches_affine() {
        let c = cantor(3);
        let f = MonotoneMap::affine(2.0, 0.0, 0.0, 1.0).unwrap();
        let nl = nonlinear_image(&c, &f, qi(2)).unwrap();
        let af = affine_map(&c, qi(2), qi(0)).unwrap();
        for k in 0..=40 {
            let a = k as f64 / 20.0;
            let lhs = nl.set.measure(0.0, a);
            let rhs = af.set.measure(0.0, a) / 2f64.powf(c.claim.delta);
            assert!((lhs - rhs).abs() < 1e-9, "{a}: {lhs} {rhs}");
        }
    }

    #[test]
    fn intersection_cases() {
        let full = ClaimedSet::new(
            RegularSetApprox::interval(qi(0), qi(1)).unwrap(),
            RegularityClaim::new(1.0, 2.0, qi(1), qi(1)).unwrap(),
        );
        assert!(matches!(
            intersect_interval(&full, (qi(0), qi(1)), (qi(0), qi(1))),
            Err(Error::PreconditionViolated { .. })
        ));
        let c = cantor(4);
        let r = intersect_interval(&c, (qi(0), q(1, 3)), (q(-1, 3), q(2, 3))).unwrap();
        assert_eq!(r.claim.alpha1, q(2, 3));
        assert_eq!(r.set.len(), 8);
        assert!(r.verify().unwrap().verified);
        let p = ClaimedSet::new(
            RegularSetApprox::point(qi(0)),
            RegularityClaim::new(0.0, 1.0, qi(0), qi(1)).unwrap(),
        );
        let r = intersect_interval(&p, (qi(-1), qi(1)), (qi(-2), qi(2))).unwrap();
        assert_eq!(r.set, p.set);
        assert!(intersect_interval(&c, (qi(0), q(1, 2)), (q(-1, 2), qi(1))).is_err());
    }
}
