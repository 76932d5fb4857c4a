//! Spectra of periodic approximants, Hausdorff distances between band unions
//! and the Hölder fit in α.

use nalgebra::DMatrix;
use rayon::prelude::*;
use rug::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cocycle::{product, CocycleParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("eigensolver failed: {0}")]
    EigSolveFailure(String),
    #[error("empty spectrum")]
    EmptySpectrum,
    #[error("regression needs at least 3 usable points, got {0}")]
    DegenerateRegression(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOptions {
    /// Points in θ ∈ [0, 1/(2q)], endpoints included.
    pub theta_grid: usize,
    /// Half-width added to every band before merging; `None` means 4/q².
    pub fattening: Option<f64>,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions { theta_grid: 64, fattening: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumApprox {
    pub lambda: f64,
    #[serde(with = "crate::cf_engine::dec")]
    pub p: Integer,
    #[serde(with = "crate::cf_engine::dec")]
    pub q: Integer,
    /// Sorted, disjoint, closed.
    pub bands: Vec<(f64, f64)>,
    pub theta_grid: usize,
    pub fattening: f64,
    /// Bands before fattening and merging.
    pub raw_bands: Vec<(f64, f64)>,
}

impl SpectrumApprox {
    pub fn from_bands(lambda: f64, p: i64, q: i64, bands: Vec<(f64, f64)>) -> Self {
        let merged = merge_intervals(bands.clone(), 0.0);
        SpectrumApprox {
            lambda,
            p: Integer::from(p),
            q: Integer::from(q),
            bands: merged,
            theta_grid: 0,
            fattening: 0.0,
            raw_bands: bands,
        }
    }

    pub fn contains(&self, e: f64) -> bool {
        self.bands.iter().any(|&(a, b)| a <= e && e <= b)
    }

    pub fn measure(&self) -> f64 {
        self.bands.iter().map(|(a, b)| b - a).sum()
    }

    /// `per_band` evenly spaced energies in each raw band (midpoint when one).
    pub fn sample_energies(&self, per_band: usize) -> Vec<f64> {
        let mut out = Vec::new();
        for &(a, b) in &self.raw_bands {
            for j in 0..per_band {
                let t = if per_band == 1 { 0.5 } else { j as f64 / (per_band - 1) as f64 };
                out.push(a + t * (b - a));
            }
        }
        out
    }
}

/// Floquet matrix of one period with Bloch phase 0 (`sign` = 1) or π (`sign` = −1).
pub fn floquet_matrix(lambda: f64, p: i64, q: usize, theta: f64, sign: f64) -> DMatrix<f64> {
    let alpha = p as f64 / q as f64;
    let mut m = DMatrix::<f64>::zeros(q, q);
    for n in 0..q {
        let ph = theta + n as f64 * alpha;
        m[(n, n)] = 2.0 * lambda * (std::f64::consts::TAU * (ph - ph.round())).cos();
    }
    let mut add = |i: usize, j: usize, v: f64| {
        m[(i, j)] += v;
        if i != j {
            m[(j, i)] += v;
        }
    };
    for n in 0..q.saturating_sub(1) {
        add(n, n + 1, 1.0);
    }
    if q == 1 {
        add(0, 0, 2.0 * sign);
    } else {
        add(q - 1, 0, sign);
    }
    m
}

fn sorted_eigenvalues(m: DMatrix<f64>) -> Result<Vec<f64>, SpectrumError> {
    let n = m.nrows();
    let eig = nalgebra::SymmetricEigen::try_new(m, f64::EPSILON, 100 * n.max(10))
        .ok_or_else(|| SpectrumError::EigSolveFailure(format!("no convergence for a {n}×{n} Floquet matrix")))?;
    let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if ev.iter().any(|x| !x.is_finite()) {
        return Err(SpectrumError::EigSolveFailure("non-finite eigenvalue".into()));
    }
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Bands [s_{2k−1}, s_{2k}] at a single phase, from the sorted union of the
/// periodic and antiperiodic eigenvalues.
pub fn bands_at_theta(lambda: f64, p: i64, q: usize, theta: f64) -> Result<Vec<(f64, f64)>, SpectrumError> {
    let mut s = sorted_eigenvalues(floquet_matrix(lambda, p, q, theta, 1.0))?;
    s.extend(sorted_eigenvalues(floquet_matrix(lambda, p, q, theta, -1.0))?);
    s.sort_by(f64::total_cmp);
    Ok(s.chunks(2).map(|c| (c[0], c[1])).collect())
}

fn check_pq(p: i64, q: i64) -> Result<usize, SpectrumError> {
    if q < 1 || Integer::from(p).gcd(&Integer::from(q)) != 1 {
        return Err(SpectrumError::InvalidParameter(format!("{p}/{q} is not in lowest terms with q ≥ 1")));
    }
    Ok(q as usize)
}

fn theta_points(q: usize, n: usize) -> Vec<f64> {
    let half = 0.5 / q as f64;
    if n <= 1 {
        return vec![0.0];
    }
    (0..n).map(|j| half * j as f64 / (n - 1) as f64).collect()
}

/// Σ(λ, p/q) as the union over a θ grid of the band structure. The spectrum is
/// 1/q-periodic and even in θ, so [0, 1/(2q)] covers every phase.
pub fn spectrum_approx(lambda: f64, p: i64, q: i64, opts: &SpectrumOptions) -> Result<SpectrumApprox, SpectrumError> {
    let qu = check_pq(p, q)?;
    let thetas = theta_points(qu, opts.theta_grid);
    let per_theta: Vec<Vec<(f64, f64)>> =
        thetas.par_iter().map(|&t| bands_at_theta(lambda, p, qu, t)).collect::<Result<_, _>>()?;
    let mut raw = per_theta[0].clone();
    for bands in &per_theta[1..] {
        for (r, b) in raw.iter_mut().zip(bands) {
            r.0 = r.0.min(b.0);
            r.1 = r.1.max(b.1);
        }
    }
    let fattening = opts.fattening.unwrap_or(4.0 / (q as f64).powi(2));
    Ok(SpectrumApprox {
        lambda,
        p: Integer::from(p),
        q: Integer::from(q),
        bands: merge_intervals(raw.clone(), fattening),
        theta_grid: thetas.len(),
        fattening,
        raw_bands: raw,
    })
}

/// Spectrum from the trace condition |tr A_q(E, θ)| ≤ 2 on an energy grid.
pub fn spectrum_by_trace(
    lambda: f64,
    p: i64,
    q: i64,
    theta_grid: usize,
    energy_points: usize,
) -> Result<SpectrumApprox, SpectrumError> {
    let qu = check_pq(p, q)?;
    if energy_points < 2 {
        return Err(SpectrumError::InvalidParameter("need at least 2 energy points".into()));
    }
    let bound = 2.0 + 2.0 * lambda.abs();
    let h = 2.0 * bound / (energy_points - 1) as f64;
    let thetas = theta_points(qu, theta_grid);
    let inside: Vec<bool> = (0..energy_points)
        .into_par_iter()
        .map(|i| {
            let e = -bound + i as f64 * h;
            thetas.iter().any(|&t| {
                let m = product(&CocycleParams::new(lambda, p as f64 / q as f64, e, t), q).to_matrix();
                m.trace().abs() <= 2.0
            })
        })
        .collect();
    let mut raw = Vec::new();
    let mut start = None;
    for (i, &ok) in inside.iter().chain(std::iter::once(&false)).enumerate() {
        match (ok, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                raw.push((-bound + s as f64 * h, -bound + (i - 1) as f64 * h));
                start = None;
            }
            _ => {}
        }
    }
    let fattening = 4.0 * (h + 1.0 / (q as f64).powi(2));
    Ok(SpectrumApprox {
        lambda,
        p: Integer::from(p),
        q: Integer::from(q),
        bands: merge_intervals(raw.clone(), fattening),
        theta_grid: thetas.len(),
        fattening,
        raw_bands: raw,
    })
}

/// Sorts, widens each interval by `pad` on both sides, and merges overlaps.
/// Gaps narrower than the eigensolver's roundoff count as closed.
pub fn merge_intervals(mut v: Vec<(f64, f64)>, pad: f64) -> Vec<(f64, f64)> {
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let scale = v.iter().fold(1.0f64, |m, &(a, b)| m.max(a.abs()).max(b.abs()));
    let tol = 64.0 * f64::EPSILON * scale;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (a, b) in v {
        let (a, b) = (a - pad, b + pad);
        match out.last_mut() {
            Some(last) if a <= last.1 + tol => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// sup over `a` of the distance to `b`, both sorted disjoint interval unions.
fn directed_hausdorff(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let dist = |x: f64| {
        b.iter()
            .map(|&(l, h)| {
                if x < l {
                    l - x
                } else if x > h {
                    x - h
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min)
    };
    let mut best: f64 = 0.0;
    for &(l, h) in a {
        best = best.max(dist(l)).max(dist(h));
        // dist(·, b) peaks inside a gap of b at its midpoint
        for w in b.windows(2) {
            let m = 0.5 * (w[0].1 + w[1].0);
            if l <= m && m <= h {
                best = best.max(dist(m));
            }
        }
    }
    best
}

/// Exact Hausdorff distance between two band unions.
pub fn hausdorff_distance(s1: &SpectrumApprox, s2: &SpectrumApprox) -> Result<f64, SpectrumError> {
    hausdorff_intervals(&s1.bands, &s2.bands)
}

pub fn hausdorff_intervals(a: &[(f64, f64)], b: &[(f64, f64)]) -> Result<f64, SpectrumError> {
    if a.is_empty() || b.is_empty() {
        return Err(SpectrumError::EmptySpectrum);
    }
    let a = merge_intervals(a.to_vec(), 0.0);
    let b = merge_intervals(b.to_vec(), 0.0);
    Ok(directed_hausdorff(&a, &b).max(directed_hausdorff(&b, &a)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderPoint {
    pub p: i64,
    pub q: i64,
    pub delta_alpha: f64,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderFit {
    /// Fitted exponent in distance ≈ C·|Δα|^slope.
    pub slope: f64,
    pub constant: f64,
    /// Smallest C with distance ≤ C·|Δα|^{1/2} at every point.
    pub half_constant: f64,
    pub points: Vec<HolderPoint>,
    pub excluded: usize,
}

/// Fits ln d_H(Σ(λ, base), Σ(λ, α′)) against ln|base − α′|. Points with zero
/// distance or zero |Δα| are excluded.
pub fn holder_check(
    lambda: f64,
    base: (i64, i64),
    perturbations: &[(i64, i64)],
    opts: &SpectrumOptions,
) -> Result<HolderFit, SpectrumError> {
    let s0 = spectrum_approx(lambda, base.0, base.1, opts)?;
    let a0 = base.0 as f64 / base.1 as f64;
    let mut points = Vec::new();
    let mut excluded = 0;
    for &(p, q) in perturbations {
        let da = (p as f64 / q as f64 - a0).abs();
        let s = spectrum_approx(lambda, p, q, opts)?;
        let d = hausdorff_distance(&s0, &s)?;
        if da > 0.0 && d > 0.0 {
            points.push(HolderPoint { p, q, delta_alpha: da, distance: d });
        } else {
            excluded += 1;
        }
    }
    if points.len() < 3 {
        return Err(SpectrumError::DegenerateRegression(points.len()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.delta_alpha.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.distance.ln()).collect();
    let (slope, intercept) = least_squares(&xs, &ys).ok_or(SpectrumError::DegenerateRegression(points.len()))?;
    let half_constant = points.iter().map(|p| p.distance / p.delta_alpha.sqrt()).fold(0.0, f64::max);
    Ok(HolderFit { slope, constant: intercept.exp(), half_constant, points, excluded })
}

/// Slope and intercept of the least-squares line.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(n: usize, fat: f64) -> SpectrumOptions {
        SpectrumOptions { theta_grid: n, fattening: Some(fat) }
    }

    #[test]
    fn free_band() {
        let s = spectrum_approx(0.0, 2, 5, &opts(8, 0.0)).unwrap();
        assert_eq!(s.bands.len(), 1);
        assert!((s.bands[0].0 + 2.0).abs() < 1e-12 && (s.bands[0].1 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn period_one_band() {
        let s = spectrum_approx(1.5, 0, 1, &opts(16, 0.0)).unwrap();
        assert_eq!(s.bands.len(), 1);
        assert!((s.bands[0].0 + 5.0).abs() < 1e-12 && (s.bands[0].1 - 5.0).abs() < 1e-12);
    }

    #[test]
    fn half_period_matches_trace_oracle() {
        let s = spectrum_approx(1.0, 1, 2, &opts(32, 0.0)).unwrap();
        let t = spectrum_by_trace(1.0, 1, 2, 32, 4001).unwrap();
        assert_eq!(s.bands.len(), t.raw_bands.len());
        let h = 8.0 / 4000.0;
        for (a, b) in s.bands.iter().zip(&t.raw_bands) {
            assert!((a.0 - b.0).abs() <= 2.0 * h && (a.1 - b.1).abs() <= 2.0 * h, "{a:?} {b:?}");
        }
        // symmetric about zero
        let n = s.bands.len();
        for i in 0..n {
            assert!((s.bands[i].0 + s.bands[n - 1 - i].1).abs() < 1e-10);
        }
    }

    #[test]
    fn hausdorff_examples() {
        let a = SpectrumApprox::from_bands(0.0, 0, 1, vec![(-2.0, 2.0)]);
        let b = SpectrumApprox::from_bands(0.0, 0, 1, vec![(-2.0, 3.0)]);
        assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(hausdorff_distance(&a, &b).unwrap(), 1.0);
        assert_eq!(hausdorff_intervals(&[(0.0, 10.0)], &[(0.0, 1.0), (9.0, 10.0)]).unwrap(), 4.0);
        assert_eq!(hausdorff_intervals(&[], &[(0.0, 1.0)]), Err(SpectrumError::EmptySpectrum));
    }

    #[test]
    fn rejects_non_reduced_fraction() {
        assert!(matches!(
            spectrum_approx(1.0, 2, 4, &SpectrumOptions::default()),
            Err(SpectrumError::InvalidParameter(_))
        ));
    }
}
