//! Structural lemmas: missing subintervals, splitting, small covers,
//! Lebesgue bounds and the covering tree.
//!
//! Grid intervals are said to meet the set when they overlap a cell in
//! positive length. A component of `X ∩ I` that degenerates to a point is
//! assigned the grid interval to its right. This keeps covers minimal: the
//! mid-third Cantor set at `ρ = 1/9` needs four intervals, not eight.

use std::collections::BTreeMap;

use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::{ClaimedSet, RegularSetApprox, RegularityClaim};
use crate::error::{invalid, Error, Result};
use crate::rational::{ceil_i64, floor_i64, pow, qi, to_f64, Q};

/// `(3C_R)^{2/(1−δ)}`, infinite for `δ = 1`.
pub fn missing_subinterval_threshold(claim: &RegularityClaim) -> f64 {
    if claim.delta >= 1.0 {
        return f64::INFINITY;
    }
    (3.0 * claim.c_r).powf(2.0 / (1.0 - claim.delta))
}

fn split_threshold(claim: &RegularityClaim) -> f64 {
    if claim.delta >= 1.0 {
        return f64::INFINITY;
    }
    (4.0 * claim.c_r).powf(2.0 / (1.0 - claim.delta))
}

/// Smallest `ℓ ∈ 1..=L` such that the closed `ℓ`-th of `L` equal parts of
/// `I` misses the set.
pub fn missing_subinterval(x: &ClaimedSet, i: (Q, Q), l_part: u64) -> Result<usize> {
    if l_part == 0 {
        return Err(invalid("L", "must be positive"));
    }
    if i.1 <= i.0 {
        return Err(invalid("I", "needs positive length"));
    }
    let c = &x.claim;
    let len = i.1 - i.0;
    let step = len / qi(l_part as i128);
    let precondition_held = c.delta < 1.0
        && (l_part as f64) >= missing_subinterval_threshold(c)
        && c.alpha0 <= step
        && l_part > 1
        && len <= c.alpha1;
    for l in 0..l_part {
        let a = i.0 + step * qi(l as i128);
        if !x.set.meets_closed(&a, &(a + step)) {
            return Ok(l as usize + 1);
        }
    }
    Err(Error::NoEmptyCell { precondition_held })
}

/// Grid intervals `ρ[j, j+1]` covering `X ∩ I`.
pub fn grid_cover(set: &RegularSetApprox, i: (Q, Q), rho: Q) -> Vec<i64> {
    let mut js: Vec<i64> = Vec::new();
    let push = |js: &mut Vec<i64>, lo: i64, hi: i64| {
        let from = match js.last() {
            Some(&l) if l >= lo => l + 1,
            _ => lo,
        };
        js.extend(from..=hi);
    };
    let comps: Vec<(Q, Q)> = if set.is_point() {
        vec![(set.frame.origin, set.frame.origin)]
    } else {
        set.components()
    };
    for (a, b) in comps {
        let a = if a < i.0 { i.0 } else { a };
        let b = if b > i.1 { i.1 } else { b };
        if a > b {
            continue;
        }
        if a < b {
            push(&mut js, floor_i64(&(a / rho)), ceil_i64(&(b / rho)) - 1);
        } else {
            let j = floor_i64(&(a / rho));
            let covered = js.last().is_some_and(|&l| l == j || (l == j - 1 && qi(j as i128) * rho == a));
            if !covered {
                push(&mut js, j, j);
            }
        }
    }
    js
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverResult {
    pub indices: Vec<i64>,
    pub count: usize,
    /// `12 C_R² (|I|/ρ)^δ`.
    pub bound: f64,
    pub within_bound: bool,
}

impl CoverResult {
    pub fn intervals(&self, rho: &Q) -> Vec<(Q, Q)> {
        self.indices
            .iter()
            .map(|&j| (qi(j as i128) * rho, qi(j as i128 + 1) * rho))
            .collect()
    }
}

pub fn cover_count(x: &ClaimedSet, i: (Q, Q), rho: Q) -> Result<CoverResult> {
    if !rho.is_positive() || i.1 <= i.0 {
        return Err(invalid("rho", "need ρ > 0 and |I| > 0"));
    }
    let indices = grid_cover(&x.set, i, rho);
    let c = &x.claim;
    let bound = 12.0 * c.c_r * c.c_r * (to_f64(&(i.1 - i.0)) / to_f64(&rho)).powf(c.delta);
    let count = indices.len();
    Ok(CoverResult {
        indices,
        count,
        bound,
        within_bound: count as f64 <= bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LebesgueBound {
    pub measured: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Total cell length against `24 C_R² α₁^δ α₀^{1−δ}`.
pub fn lebesgue_bound(x: &ClaimedSet) -> Result<LebesgueBound> {
    let c = &x.claim;
    if !c.alpha0.is_positive() {
        return Err(Error::PreconditionViolated {
            clause: "α₀ > 0".into(),
        });
    }
    let (lo, hi) = x.set.hull();
    if lo < -c.alpha1 || hi > c.alpha1 {
        return Err(Error::PreconditionViolated {
            clause: "X ⊂ [−α₁, α₁]".into(),
        });
    }
    let measured = x.set.lebesgue_measure();
    let bound = 24.0 * c.c_r * c.c_r * to_f64(&c.alpha1).powf(c.delta) * to_f64(&c.alpha0).powf(1.0 - c.delta);
    Ok(LebesgueBound {
        measured,
        bound,
        holds: measured <= bound,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplitPiece {
    pub interval: (Q, Q),
    pub piece: ClaimedSet,
}

/// Splits along maximal runs of grid intervals of width `g` that meet the set.
/// Pieces keep the input claim.
pub fn split_at_grid(x: &ClaimedSet, g: Q) -> Result<Vec<SplitPiece>> {
    if !g.is_positive() {
        return Err(invalid("grid", "must be positive"));
    }
    let (lo, hi) = x.set.hull();
    let js = grid_cover(&x.set, (lo, hi), g);
    let mut runs: Vec<(i64, i64)> = Vec::new();
    for j in js {
        match runs.last_mut() {
            Some(r) if r.1 + 1 == j => r.1 = j,
            _ => runs.push((j, j)),
        }
    }
    let mut out = Vec::with_capacity(runs.len());
    for (a, b) in runs {
        let ja = qi(a as i128) * g;
        let jb = qi(b as i128 + 1) * g;
        let set = if x.set.is_point() {
            x.set.clone()
        } else {
            x.set.filter_cells(|i| {
                let (ca, cb) = x.set.cell_interval(i);
                ca >= ja && cb <= jb
            })?
        };
        out.push(SplitPiece {
            interval: (ja, jb),
            piece: ClaimedSet::new(set, x.claim.clone()),
        });
    }
    let total: usize = out.iter().map(|p| p.piece.set.len()).sum();
    if total != x.set.len() {
        return Err(Error::PreconditionViolated {
            clause: "grid width not commensurate with the cells".into(),
        });
    }
    Ok(out)
}

/// Pieces of size between `(4C_R)^{-2/(1−δ)}ρ` and `ρ`, each claimed with
/// constant `(4C_R)^{2/(1−δ)} C_R` on scales `[α₀, ρ]`.
pub fn split_regular(x: &ClaimedSet, rho: Q) -> Result<Vec<SplitPiece>> {
    let c = &x.claim;
    if c.delta >= 1.0 {
        return Err(Error::PreconditionViolated { clause: "δ < 1".into() });
    }
    let m4 = split_threshold(c);
    if m4 * to_f64(&c.alpha0) > to_f64(&rho) * (1.0 + 1e-12) || rho > c.alpha1 {
        return Err(Error::PreconditionViolated {
            clause: "(4C_R)^{2/(1−δ)} α₀ ≤ ρ ≤ α₁".into(),
        });
    }
    let l = missing_subinterval_threshold(c).ceil();
    let l = l.to_i64().unwrap_or(i64::MAX).max(2);
    let g = rho / qi(l as i128);
    let mut pieces = split_at_grid(x, g)?;
    for p in &mut pieces {
        p.piece.claim = RegularityClaim {
            delta: c.delta,
            c_r: m4 * c.c_r,
            alpha0: c.alpha0,
            alpha1: rho,
        };
    }
    Ok(pieces)
}

/// `V_n → V_{n+1}` adjacency in base `L` (the set's base).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeLevel {
    pub n: i32,
    pub children: BTreeMap<i64, Vec<i64>>,
    pub precondition_held: bool,
}

fn level_width(base: u32, n: i32) -> Q {
    if n >= 0 {
        Q::new(1, pow(base, n as u32))
    } else {
        qi(pow(base, (-n) as u32))
    }
}

pub fn tree_children(x: &ClaimedSet, n: i32) -> Result<TreeLevel> {
    let c = &x.claim;
    let base = x.set.base();
    let w0 = level_width(base, n);
    let w1 = level_width(base, n + 1);
    let precondition_held = c.delta < 1.0
        && base as f64 >= missing_subinterval_threshold(c)
        && c.alpha0 <= w1
        && w0 <= c.alpha1;
    let hull = x.set.hull();
    let parents = grid_cover(&x.set, hull, w0);
    let kids = grid_cover(&x.set, hull, w1);
    let mut children: BTreeMap<i64, Vec<i64>> = parents.iter().map(|&p| (p, Vec::new())).collect();
    for k in kids {
        let p = k.div_euclid(base as i64);
        children.entry(p).or_default().push(k);
    }
    for (&p, ks) in &children {
        if ks.len() >= base as usize {
            return Err(Error::ChildCountViolation {
                parent: p,
                children: ks.len(),
                precondition_held,
            });
        }
    }
    Ok(TreeLevel {
        n,
        children,
        precondition_held,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::regular_sets::{scan_regularity, Frame};

    fn cantor(base: u32, alphabet: &[i64], k: u32) -> ClaimedSet {
        let mut cells = vec![0i64];
        for _ in 0..k {
            cells = cells
                .iter()
                .flat_map(|c| alphabet.iter().map(move |a| base as i64 * c + a))
                .collect();
        }
        let set = RegularSetApprox::uniform(base, k, Frame::unit(), cells, 1.0).unwrap();
        let delta = (alphabet.len() as f64).ln() / (base as f64).ln();
        let a0 = Q::new(1, pow(base, k));
        let c = scan_regularity(&set, delta, a0, qi(1)).unwrap().constant();
        ClaimedSet::new(set, RegularityClaim::new(delta, c, a0, qi(1)).unwrap())
    }

    fn interval_set() -> ClaimedSet {
        ClaimedSet::new(
            RegularSetApprox::interval(qi(0), qi(1)).unwrap(),
            RegularityClaim::new(1.0, 2.0, qi(1), qi(1)).unwrap(),
        )
    }

    fn point_set() -> ClaimedSet {
        ClaimedSet::new(
            RegularSetApprox::point(qi(0)),
            RegularityClaim::new(0.0, 1.0, qi(0), qi(1)).unwrap(),
        )
    }

    #[test]
    fn missing_cases() {
        let c = cantor(3, &[0, 2], 4);
        assert_eq!(missing_subinterval(&c, (qi(0), qi(1)), 9), Ok(5));
        assert_eq!(missing_subinterval(&point_set(), (qi(1), qi(2)), 7), Ok(1));
        assert_eq!(
            missing_subinterval(&interval_set(), (qi(0), qi(1)), 9),
            Err(Error::NoEmptyCell {
                precondition_held: false
            })
        );
    }

    #[test]
    fn cover_examples() {
        let c = cantor(3, &[0, 2], 5);
        let r = cover_count(&c, (qi(0), qi(1)), q(1, 9)).unwrap();
        assert_eq!(r.count, 4);
        assert!(r.within_bound);
        let r = cover_count(&point_set(), (qi(-1), qi(1)), qi(1)).unwrap();
        assert!(r.count <= 2 && r.count >= 1);
        let r = cover_count(&interval_set(), (qi(0), qi(1)), q(1, 4)).unwrap();
        assert_eq!(r.count, 4);
        assert_eq!(r.intervals(&q(1, 4))[3], (q(3, 4), qi(1)));
        // A single touching point still gets covered.
        let r = cover_count(&interval_set(), (qi(1), qi(2)), q(1, 4)).unwrap();
        assert_eq!(r.indices, vec![4]);
    }

    #[test]
    fn lebesgue_examples() {
        for k in 2..6 {
            let c = cantor(3, &[0, 2], k);
            let b = lebesgue_bound(&c).unwrap();
            assert!((b.measured - (2.0f64 / 3.0).powi(k as i32)).abs() < 1e-14);
            assert!(b.holds);
        }
        let b = lebesgue_bound(&interval_set()).unwrap();
        assert_eq!(b.measured, 1.0);
        assert!(b.holds);
    }

    #[test]
    fn split_into_depth_two_blocks() {
        let c = cantor(3, &[0, 2], 6);
        let pieces = split_at_grid(&c, q(1, 9)).unwrap();
        assert_eq!(pieces.len(), 4);
        for p in &pieces {
            assert_eq!(p.piece.set.len(), 16);
            assert!(p.interval.1 - p.interval.0 <= q(1, 9));
        }
        let full = split_at_grid(&interval_set(), qi(1)).unwrap();
        assert_eq!(full.len(), 1);
        assert!(matches!(split_regular(&c, q(1, 9)), Err(Error::PreconditionViolated { .. })));
    }

    #[test]
    fn tree_examples() {
        let t = tree_children(&point_set(), 3).unwrap();
        assert!(t.children.values().all(|v| v.len() == 1));
        assert!(matches!(
            tree_children(&interval_set(), 2),
            Err(Error::ChildCountViolation { .. })
        ));
        let c = cantor(3, &[0, 2], 5);
        let t = tree_children(&c, 2).unwrap();
        assert_eq!(t.children.len(), 4);
        assert!(t.children.values().all(|v| v.len() == 2));
    }
}
