use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rational::{qi, to_f64};
use crate::regular_sets::{verify_regularity, RegularSetApprox};

/// Frequency spacing of the weight grid.
pub const WEIGHT_SPACING: f64 = 0.125;
/// Bound on `sup|∂ log ω|` asserted for constructed weights.
pub const LOG_DERIVATIVE_BOUND: f64 = 1e5;

/// `θ(ξ) = log(10+|ξ|)^{-(1+δ)/2}`.
pub fn theta(xi: f64, delta: f64) -> f64 {
    (10.0 + xi.abs()).ln().powf(-(1.0 + delta) / 2.0)
}

fn japanese(xi: f64) -> f64 {
    (1.0 + xi * xi).sqrt()
}

/// Cubic plateau: 1 on `[-1/2, 1/2]`, 0 outside `(-1, 1)`, `|χ'| ≤ 3`.
pub fn plateau(u: f64) -> f64 {
    let a = u.abs();
    if a <= 0.5 {
        1.0
    } else if a >= 1.0 {
        0.0
    } else {
        let s = 2.0 * (1.0 - a);
        s * s * (3.0 - 2.0 * s)
    }
}

pub fn plateau_derivative(u: f64) -> f64 {
    let a = u.abs();
    if a <= 0.5 || a >= 1.0 {
        0.0
    } else {
        let s = 2.0 * (1.0 - a);
        -12.0 * s * (1.0 - s) * u.signum()
    }
}

/// Beyond the grid, `|log ω(ξ)| ≤ c⟨ξ⟩^p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailModel {
    pub c: f64,
    pub p: f64,
}

impl TailModel {
    /// Upper bound for `∫_{|ξ|>Ξ} |log ω|/(1+ξ²)`; infinite when `p ≥ 1`.
    pub fn integral_bound(&self, xi_max: f64) -> f64 {
        if self.c == 0.0 {
            return 0.0;
        }
        if self.p >= 1.0 {
            return f64::INFINITY;
        }
        let x = xi_max.max(1.0);
        2.0 * self.c * (1.0 + x.powi(-2)).powf(self.p.max(0.0) / 2.0) * x.powf(self.p - 1.0) / (1.0 - self.p)
    }
}

/// Samples of `log ω` and its derivative on `ξ_i = -Ξ + i·spacing`.
///
/// Logs are stored since `ω` underflows on wide supports; `ω = exp(log ω)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightGrid {
    pub start: f64,
    pub spacing: f64,
    pub log_values: Vec<f64>,
    pub log_derivative: Vec<f64>,
    pub tail: TailModel,
}

impl WeightGrid {
    pub fn from_fn(
        xi_max: f64,
        spacing: f64,
        log_w: impl Fn(f64) -> f64 + Sync,
        dlog_w: impl Fn(f64) -> f64 + Sync,
        tail: TailModel,
    ) -> Result<Self> {
        if !(spacing > 0.0 && spacing <= 0.25) {
            return Err(invalid("spacing", format!("{spacing} not in (0, 1/4]")));
        }
        if !(xi_max > 0.0 && xi_max.is_finite()) {
            return Err(invalid("xi_max", format!("{xi_max}")));
        }
        let k = (xi_max / spacing).ceil() as i64;
        let start = -(k as f64) * spacing;
        let xs: Vec<f64> = (-k..=k).map(|i| i as f64 * spacing).collect();
        let log_values: Vec<f64> = xs.par_iter().map(|&x| log_w(x)).collect();
        let log_derivative = xs.par_iter().map(|&x| dlog_w(x)).collect();
        if let Some(i) = log_values.iter().position(|v| !(*v <= 0.0) || v.is_infinite()) {
            return Err(invalid("log_w", format!("log ω({}) = {} leaves (-∞, 0]", xs[i], log_values[i])));
        }
        Ok(WeightGrid {
            start,
            spacing,
            log_values,
            log_derivative,
            tail,
        })
    }

    /// `ω ≡ 1`.
    pub fn one(xi_max: f64) -> Result<Self> {
        Self::from_fn(xi_max, WEIGHT_SPACING, |_| 0.0, |_| 0.0, TailModel { c: 0.0, p: 0.0 })
    }

    pub fn len(&self) -> usize {
        self.log_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_values.is_empty()
    }

    pub fn xi(&self, i: usize) -> f64 {
        self.start + i as f64 * self.spacing
    }

    pub fn xi_max(&self) -> f64 {
        -self.start
    }

    pub fn values(&self) -> Vec<f64> {
        self.log_values.iter().map(|l| l.exp()).collect()
    }

    /// Trapezoid value of `∫_{-Ξ}^{Ξ} |log ω|/(1+ξ²)`.
    pub fn log_integral_grid(&self) -> f64 {
        let f: Vec<f64> = (0..self.len())
            .map(|i| {
                let x = self.xi(i);
                self.log_values[i].abs() / (1.0 + x * x)
            })
            .collect();
        let inner: f64 = f.iter().sum::<f64>() - 0.5 * (f[0] + f[f.len() - 1]);
        inner * self.spacing
    }

    pub fn sup_log_derivative(&self) -> f64 {
        self.log_derivative.iter().fold(0.0, |m, d| m.max(d.abs()))
    }
}

/// Outcome of the two admissibility conditions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    pub c0: f64,
    pub grid_integral: f64,
    pub tail_bound: f64,
    pub log_integral: f64,
    pub sup_log_derivative: f64,
    pub tail_diverges: bool,
    pub integral_ok: bool,
    pub derivative_ok: bool,
    pub passes: bool,
}

pub fn admissibility_check(w: &WeightGrid, c0: f64) -> Admissibility {
    let grid_integral = w.log_integral_grid();
    let tail_bound = w.tail.integral_bound(w.xi_max());
    let log_integral = grid_integral + tail_bound;
    let sup = w.sup_log_derivative();
    let tail_diverges = tail_bound.is_infinite();
    let integral_ok = log_integral <= c0;
    let derivative_ok = sup <= c0;
    Admissibility {
        c0,
        grid_integral,
        tail_bound,
        log_integral,
        sup_log_derivative: sup,
        tail_diverges,
        integral_ok,
        derivative_ok,
        passes: integral_ok && derivative_ok,
    }
}

/// `ρ_n = n^{-(1+δ)/2}·2^n`.
pub fn rho(n: u32, delta: f64) -> f64 {
    (n as f64).powf(-(1.0 + delta) / 2.0) * 2f64.powi(n as i32)
}

/// `10⁵ + 10⁷C_R²·Σ_{n≥1}(2^n/ρ_n)^{δ-2}`, the sum closed with an integral tail.
pub fn proof_c0(delta: f64, c_r: f64) -> f64 {
    let s = (1.0 + delta) * (2.0 - delta) / 2.0;
    const TERMS: u32 = 1_000_000;
    let head: f64 = (1..=TERMS).map(|n| (n as f64).powf(-s)).sum();
    let tail = (TERMS as f64).powf(1.0 - s) / (s - 1.0);
    1e5 + 1e7 * c_r * c_r * (head + tail)
}

/// One annulus `A_n` with its cover by `N_n` grid intervals of length `ρ_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusCover {
    pub n: u32,
    pub rho: f64,
    pub cells: Vec<i64>,
    pub count_bound: f64,
}

impl AnnulusCover {
    pub fn count(&self) -> usize {
        self.cells.len()
    }

    pub fn within_bound(&self) -> bool {
        self.cells.len() as f64 <= self.count_bound
    }
}

/// Which of the construction's guarantees held on the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightChecks {
    pub upper_everywhere: bool,
    pub decay_on_y: bool,
    pub y_points_checked: usize,
    pub worst_decay_margin: f64,
    pub derivative_ok: bool,
    pub covers_within_bound: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptedWeight {
    pub delta: f64,
    pub c_r: f64,
    pub alpha1: f64,
    pub n1: u32,
    pub covers: Vec<AnnulusCover>,
    pub grid: WeightGrid,
    pub c0: f64,
    pub checks: WeightChecks,
    pub admissibility: Admissibility,
}

impl AdaptedWeight {
    pub fn all_verified(&self) -> bool {
        let c = &self.checks;
        c.upper_everywhere && c.decay_on_y && c.derivative_ok && self.admissibility.passes
    }
}

fn annulus_cells(comps: &[(f64, f64)], lo: f64, hi: f64, rho: f64, out: &mut BTreeSet<i64>) {
    for &(a, b) in comps {
        let (a, b) = (a.max(lo), b.min(hi));
        if a > b {
            continue;
        }
        let j0 = (a / rho).floor() as i64;
        let j1 = ((b / rho).ceil() as i64 - 1).max(j0);
        out.extend(j0..=j1);
    }
}

/// Builds `ω = exp(-2⟨ξ⟩^{1/2})·∏_J exp(-10χ_J)` from annulus covers of `Y`.
pub fn build_weight(y: &RegularSetApprox, delta: f64, c_r: f64) -> Result<AdaptedWeight> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", format!("{delta} not in (0,1)")));
    }
    let (lo, hi) = y.hull();
    let alpha1q = if -lo.clone() > hi { -lo } else { hi };
    let alpha1 = to_f64(&alpha1q);
    if alpha1 > 2.0 {
        let cert = verify_regularity(y, delta, c_r, qi(2), alpha1q)?;
        if !cert.verified {
            return Err(Error::RegularityPrecondition(format!(
                "worst ratios {:.4} / {:.4} against C_R = {c_r} on [2, {alpha1}]",
                cert.worst_ratio_upper, cert.worst_ratio_lower
            )));
        }
    }
    let n1 = if alpha1 >= 2.0 { alpha1.log2().floor() as u32 } else { 0 };
    let comps: Vec<(f64, f64)> = y.components().iter().map(|(a, b)| (to_f64(a), to_f64(b))).collect();

    let mut covers = Vec::new();
    // (center, length) of every J
    let mut js: Vec<(f64, f64)> = Vec::new();
    for n in 1..=n1 {
        let r = rho(n, delta);
        let (a, b) = (2f64.powi(n as i32), 2f64.powi(n as i32 + 1));
        let mut cells = BTreeSet::new();
        annulus_cells(&comps, a, b, r, &mut cells);
        annulus_cells(&comps, -b, -a, r, &mut cells);
        js.extend(cells.iter().map(|&j| ((j as f64 + 0.5) * r, r)));
        covers.push(AnnulusCover {
            n,
            rho: r,
            cells: cells.into_iter().collect(),
            count_bound: 24.0 * c_r * c_r * (2f64.powi(n as i32) / r).powf(delta),
        });
    }
    let xi_max = if n1 >= 1 {
        alpha1.max(2f64.powi(n1 as i32 + 1) + 2.0 * rho(n1, delta))
    } else {
        alpha1.max(4.0)
    };

    // J's sorted by center for a windowed lookup
    js.sort_by(|p, q| p.0.total_cmp(&q.0));
    let max_len = js.iter().fold(0.0f64, |m, j| m.max(j.1));
    let nearby = |x: f64| {
        let from = js.partition_point(|j| j.0 < x - max_len);
        js[from..].iter().take_while(move |j| j.0 <= x + max_len)
    };
    let log_w = |x: f64| -2.0 * japanese(x).sqrt() - 10.0 * nearby(x).map(|&(c, l)| l * plateau((x - c) / l)).sum::<f64>();
    let dlog_w = |x: f64| -x * japanese(x).powf(-1.5) - 10.0 * nearby(x).map(|&(c, l)| plateau_derivative((x - c) / l)).sum::<f64>();
    let grid = WeightGrid::from_fn(xi_max, WEIGHT_SPACING, log_w, dlog_w, TailModel { c: 2.0, p: 0.5 })?;

    let upper_everywhere = (0..grid.len()).all(|i| grid.log_values[i] <= -japanese(grid.xi(i)).sqrt() + 1e-12);
    let mut y_points: Vec<f64> = (0..grid.len())
        .map(|i| grid.xi(i))
        .filter(|x| comps.iter().any(|&(a, b)| a <= *x && *x <= b))
        .collect();
    y_points.extend(comps.iter().flat_map(|&(a, b)| [a, b]));
    let worst_decay_margin = y_points
        .iter()
        .map(|&x| -theta(x, delta) * x.abs() - log_w(x))
        .fold(f64::INFINITY, f64::min);
    let c0 = proof_c0(delta, c_r);
    let admissibility = admissibility_check(&grid, c0);
    let checks = WeightChecks {
        upper_everywhere,
        decay_on_y: worst_decay_margin >= -1e-12,
        y_points_checked: y_points.len(),
        worst_decay_margin,
        derivative_ok: grid.sup_log_derivative() <= LOG_DERIVATIVE_BOUND,
        covers_within_bound: covers.iter().all(|c| c.within_bound()),
    };
    Ok(AdaptedWeight {
        delta,
        c_r,
        alpha1,
        n1,
        covers,
        grid,
        c0,
        checks,
        admissibility,
    })
}
