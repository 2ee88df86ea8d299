//! Conjugate gradients with a Lanczos condition-number estimate.

use nalgebra::DMatrix;

use crate::linalg::{axpy, dot, norm};
use crate::{Error, Result};

/// Default relative residual tolerance.
pub const CG_TOLERANCE: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct CgReport {
    pub iterations: usize,
    /// Final recursive residual relative to `||rhs||`.
    pub residual: f64,
    /// Ratio of the extreme eigenvalues of the Lanczos tridiagonal.
    pub cond_est: f64,
    /// Largest per-subdomain solve count of the whole run (filled in by callers).
    pub solves: usize,
}

/// Solve `A x = rhs` for SPD `A` given the initial guess and its residual
/// `r0 = rhs - A x0`. Stops when `||r_k|| <= tol ||rhs||`.
pub fn cg_solve(
    mut apply: impl FnMut(&[f64]) -> Vec<f64>,
    rhs: &[f64],
    x0: Vec<f64>,
    r0: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, CgReport)> {
    let bnorm = norm(rhs);
    let mut x = x0;
    let mut r = r0;
    let mut rr = dot(&r, &r);
    let done = |rr: f64| bnorm == 0.0 || rr.sqrt() <= tol * bnorm;
    let rel = |rr: f64| if bnorm == 0.0 { 0.0 } else { rr.sqrt() / bnorm };
    if bnorm == 0.0 && rr == 0.0 {
        return Ok((x, CgReport { iterations: 0, residual: 0.0, cond_est: 1.0, solves: 0 }));
    }
    let mut p = r.clone();
    let mut alphas = Vec::new();
    let mut betas = Vec::new();
    let mut k = 0;
    while !done(rr) {
        if k >= max_iter {
            return Err(Error::NoConvergence { iterations: k, residual: rel(rr) });
        }
        let ap = apply(&p);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NoConvergence { iterations: k, residual: rel(rr) });
        }
        let alpha = rr / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        alphas.push(alpha);
        betas.push(beta);
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rr = rr_new;
        k += 1;
    }
    let cond_est = lanczos_condition(&alphas, &betas);
    Ok((x, CgReport { iterations: k, residual: rel(rr), cond_est, solves: 0 }))
}

/// Extreme-eigenvalue ratio of the Lanczos matrix generated by CG scalars.
pub fn lanczos_condition(alphas: &[f64], betas: &[f64]) -> f64 {
    let k = alphas.len();
    if k == 0 {
        return 1.0;
    }
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = 1.0 / alphas[i] + if i > 0 { betas[i - 1] / alphas[i - 1] } else { 0.0 };
        if i + 1 < k {
            let off = betas[i].sqrt() / alphas[i];
            t[(i, i + 1)] = off;
            t[(i + 1, i)] = off;
        }
    }
    let eig = t.symmetric_eigenvalues();
    let max = eig.iter().cloned().fold(f64::MIN, f64::max);
    let min = eig.iter().cloned().fold(f64::MAX, f64::min);
    (max / min).max(1.0)
}
