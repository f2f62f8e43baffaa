//! Hermitian eigenvalue helpers shared by the norm computations.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Seed of the start vector for iterative solvers.
pub const POWER_SEED: u64 = 0x5EED;
/// Lanczos solves its tridiagonal eigenproblem every this many steps.
const RITZ_EVERY: usize = 5;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    DenseSvd,
    PowerIteration,
    Lanczos,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigen {
    pub value: f64,
    pub method: Method,
    pub iterations: usize,
    pub residual: f64,
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn hermitian_max(m: &CMat) -> Eigen {
    Eigen {
        value: hermitian_eigenvalues(m).last().copied().unwrap_or(0.0),
        method: Method::DenseSvd,
        iterations: 0,
        residual: 0.0,
    }
}

pub fn hermitian_min(m: &CMat) -> Eigen {
    Eigen {
        value: hermitian_eigenvalues(m).first().copied().unwrap_or(0.0),
        method: Method::DenseSvd,
        iterations: 0,
        residual: 0.0,
    }
}

/// Largest singular value of a dense matrix via its smaller Gram matrix.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let g = if m.nrows() <= m.ncols() {
        m * m.adjoint()
    } else {
        m.adjoint() * m
    };
    hermitian_max(&g).value.max(0.0).sqrt()
}

/// Deterministic complex start vector of unit norm.
pub fn start_vector(n: usize, seed: u64) -> CVec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = CVec::from_fn(n, |_, _| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    let nv = v.norm();
    v / Complex64::from(nv)
}

/// Top eigenvalue of a positive semidefinite operator by power iteration,
/// stopping when `‖Av − λv‖ ≤ tol·λ`.
pub fn power_iteration<F>(n: usize, apply: F, tol: f64, max_iter: usize) -> Eigen
where
    F: Fn(&CVec) -> CVec,
{
    let mut v = start_vector(n, POWER_SEED);
    let mut lambda = 0.0;
    let mut residual = f64::INFINITY;
    let mut it = 0;
    while it < max_iter {
        it += 1;
        let w = apply(&v);
        lambda = v.dotc(&w).re;
        residual = (&w - &v * Complex64::from(lambda)).norm();
        let nw = w.norm();
        if nw == 0.0 {
            return Eigen {
                value: 0.0,
                method: Method::PowerIteration,
                iterations: it,
                residual: 0.0,
            };
        }
        if residual <= tol * lambda.abs() {
            break;
        }
        v = w / Complex64::from(nw);
    }
    Eigen {
        value: lambda,
        method: Method::PowerIteration,
        iterations: it,
        residual: residual / lambda.abs().max(f64::MIN_POSITIVE),
    }
}

/// Top eigenvalue of a Hermitian operator by Lanczos with full
/// reorthogonalization; stops when the Ritz residual falls below `tol·|λ|`
/// or the Ritz value stalls at machine precision.
pub fn lanczos_max<F>(n: usize, apply: F, tol: f64, max_iter: usize) -> Eigen
where
    F: Fn(&CVec) -> CVec,
{
    let max_iter = max_iter.min(n).max(1);
    let mut basis: Vec<CVec> = vec![start_vector(n, POWER_SEED)];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut best = Eigen {
        value: 0.0,
        method: Method::Lanczos,
        iterations: 0,
        residual: f64::INFINITY,
    };
    for k in 0..max_iter {
        let mut w = apply(&basis[k]);
        let a = basis[k].dotc(&w).re;
        alpha.push(a);
        w.axpy(Complex64::from(-a), &basis[k], Complex64::from(1.0));
        if k > 0 {
            w.axpy(Complex64::from(-beta[k - 1]), &basis[k - 1], Complex64::from(1.0));
        }
        for q in &basis {
            let c = q.dotc(&w);
            w.axpy(-c, q, Complex64::from(1.0));
        }
        let b = w.norm();
        let m = alpha.len();
        let done = k + 1 == max_iter || b <= 1e-14 * a.abs().max(1e-300);
        if m % RITZ_EVERY != 0 && !done {
            beta.push(b);
            basis.push(w / Complex64::from(b));
            continue;
        }
        let mut t = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = t.symmetric_eigen();
        let (imax, &theta) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.total_cmp(y.1))
            .unwrap();
        let last = eig.eigenvectors[(m - 1, imax)];
        let res = (b * last).abs();
        let stalled = (theta - best.value).abs() <= 4.0 * f64::EPSILON * theta.abs();
        best = Eigen {
            value: theta,
            method: Method::Lanczos,
            iterations: k + 1,
            residual: res / theta.abs().max(f64::MIN_POSITIVE),
        };
        if res <= tol * theta.abs() || stalled || b <= 1e-14 * theta.abs().max(1e-300) {
            break;
        }
        beta.push(b);
        basis.push(w / Complex64::from(b));
    }
    best
}
