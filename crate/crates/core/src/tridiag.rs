//! Symmetric tridiagonal eigenproblems: Sturm-sequence bisection (at any
//! precision) and inverse iteration.

use rayon::prelude::*;

use crate::real::Real;

/// Number of eigenvalues strictly below `x`. `off[i]` couples sites i and i+1.
pub fn sturm_count<R: Real>(diag: &[R], off: &[R], x: &R) -> usize {
    let mut count = 0;
    let tiny = x.lit(f64::MIN_POSITIVE).ldexp(64);
    let mut q = diag[0].clone() - x.clone();
    for i in 0..diag.len() {
        if i > 0 {
            let o = off[i - 1].clone();
            q = diag[i].clone() - x.clone() - o.clone() * o / q;
        }
        if q.is_zero() {
            q = -tiny.clone();
        }
        if q < q.zero_like() {
            count += 1;
        }
    }
    count
}

/// Interval containing every eigenvalue.
pub fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (i, d) in diag.iter().enumerate() {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + off.get(i).map_or(0.0, |o| o.abs());
        lo = lo.min(d - r);
        hi = hi.max(d + r);
    }
    (lo, hi)
}

/// The k-th smallest eigenvalue (0-based) by bisection on [lo, hi], stopping
/// after `iterations` halvings or when the bracket stops shrinking.
pub fn bisect_eigenvalue<R: Real>(diag: &[R], off: &[R], k: usize, lo: &R, hi: &R, iterations: u32) -> (R, R) {
    let (mut lo, mut hi) = (lo.clone(), hi.clone());
    let half = lo.lit(0.5);
    for _ in 0..iterations {
        let mid = (lo.clone() + hi.clone()) * half.clone();
        if !(mid > lo) || !(mid < hi) {
            break;
        }
        if sturm_count(diag, off, &mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// All eigenvalues, ascending, to full double precision.
pub fn eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let (lo, hi) = gershgorin(diag, off);
    let (lo, hi) = (lo - 1e-9, hi + 1e-9);
    (0..diag.len())
        .into_par_iter()
        .map(|k| {
            let (a, b) = bisect_eigenvalue(diag, off, k, &lo, &hi, 200);
            0.5 * (a + b)
        })
        .collect()
}

/// Solves (T − σ)x = b by Gaussian elimination with partial pivoting; zero
/// pivots are perturbed to the unit roundoff.
pub fn shifted_solve(diag: &[f64], off: &[f64], sigma: f64, b: &mut [f64]) {
    let n = diag.len();
    if n == 1 {
        let d = diag[0] - sigma;
        b[0] /= if d == 0.0 { f64::EPSILON } else { d };
        return;
    }
    let mut d: Vec<f64> = diag.iter().map(|x| x - sigma).collect();
    let mut dl = off.to_vec();
    let mut du = off.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut swapped = vec![false; n - 1];
    let scale = diag.iter().fold(0.0f64, |m, x| m.max(x.abs())) + 2.0;
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = f64::EPSILON * scale;
            }
            let fact = dl[i] / d[i];
            dl[i] = fact;
            d[i + 1] -= fact * du[i];
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            let temp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = temp - fact * d[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -fact;
            }
            swapped[i] = true;
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = f64::EPSILON * scale;
    }
    for i in 0..n - 1 {
        if swapped[i] {
            let t = b[i];
            b[i] = b[i + 1];
            b[i + 1] = t - dl[i] * b[i];
        } else {
            b[i + 1] -= dl[i] * b[i];
        }
    }
    b[n - 1] /= d[n - 1];
    b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    }
}

/// Unit eigenvector for an eigenvalue approximation `e`.
pub fn inverse_iteration(diag: &[f64], off: &[f64], e: f64) -> Vec<f64> {
    let n = diag.len();
    // deterministic start with components in every eigendirection
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.7548776662466927).fract()).collect();
    for _ in 0..3 {
        shifted_solve(diag, off, e, &mut v);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
    }
    if let Some(&m) = v.iter().max_by(|a, b| a.abs().total_cmp(&b.abs())) {
        if m < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    v
}
