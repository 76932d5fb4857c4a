//! Transfer matrices of the almost Mathieu operator
//! (Hu)(n) = u(n+1) + u(n−1) + 2λ cos 2π(θ + nα) u(n).
//!
//! Solutions are tracked as v_n = (u(n+1), u(n)), so v_n = A(θ + nα) v_{n−1}
//! and v_k = A_k(θ + α) v_0. Long products are kept in the factored form
//! R(φ)·[[e^x, e^x w], [0, e^{−x}]], which has unit determinant by
//! construction and never overflows.

use rayon::prelude::*;
use rug::float::Constant;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::real::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CocycleError {
    #[error("precision loss: estimated relative error {estimate:e} exceeds {threshold:e}")]
    PrecisionLoss { estimate: f64, threshold: f64 },
    #[error("rotation number did not settle: windows differ by {spread:e} (tolerance {tolerance:e})")]
    NonConvergence { estimate: f64, spread: f64, tolerance: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sl2<R> {
    pub a: R,
    pub b: R,
    pub c: R,
    pub d: R,
}

impl<R: Real> Sl2<R> {
    pub fn new(a: R, b: R, c: R, d: R) -> Self {
        Sl2 { a, b, c, d }
    }

    pub fn identity_like(x: &R) -> Self {
        Sl2::new(x.one_like(), x.zero_like(), x.zero_like(), x.one_like())
    }

    /// Rotation by `turns` full turns.
    pub fn rotation(turns: &R) -> Self {
        let (c, s) = (turns.cos_2pi(), turns.sin_2pi());
        Sl2::new(c.clone(), -s.clone(), s, c)
    }

    pub fn det(&self) -> R {
        self.a.clone() * self.d.clone() - self.b.clone() * self.c.clone()
    }

    pub fn trace(&self) -> R {
        self.a.clone() + self.d.clone()
    }

    pub fn mul(&self, o: &Sl2<R>) -> Sl2<R> {
        let m = |x: &R, y: &R, z: &R, w: &R| x.clone() * y.clone() + z.clone() * w.clone();
        Sl2::new(
            m(&self.a, &o.a, &self.b, &o.c),
            m(&self.a, &o.b, &self.b, &o.d),
            m(&self.c, &o.a, &self.d, &o.c),
            m(&self.c, &o.b, &self.d, &o.d),
        )
    }

    /// Adjugate; the inverse when det = 1.
    pub fn adjugate(&self) -> Sl2<R> {
        Sl2::new(self.d.clone(), -self.b.clone(), -self.c.clone(), self.a.clone())
    }

    pub fn sub(&self, o: &Sl2<R>) -> Sl2<R> {
        Sl2::new(
            self.a.clone() - o.a.clone(),
            self.b.clone() - o.b.clone(),
            self.c.clone() - o.c.clone(),
            self.d.clone() - o.d.clone(),
        )
    }

    pub fn apply(&self, v: &(R, R)) -> (R, R) {
        (
            self.a.clone() * v.0.clone() + self.b.clone() * v.1.clone(),
            self.c.clone() * v.0.clone() + self.d.clone() * v.1.clone(),
        )
    }

    /// Operator 2-norm.
    pub fn norm(&self) -> R {
        let p = (self.a.clone() + self.d.clone()).hypot(&(self.b.clone() - self.c.clone()));
        let q = (self.a.clone() - self.d.clone()).hypot(&(self.b.clone() + self.c.clone()));
        (p + q) * self.a.lit(0.5)
    }

    pub fn hilbert_schmidt(&self) -> R {
        self.a.hypot(&self.b).hypot(&self.c.hypot(&self.d))
    }

    pub fn max_abs_entry(&self) -> R {
        let mut m = self.a.abs();
        for x in [&self.b, &self.c, &self.d] {
            let y = x.abs();
            if y > m {
                m = y;
            }
        }
        m
    }

    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        [[self.a.to_f64(), self.b.to_f64()], [self.c.to_f64(), self.d.to_f64()]]
    }
}

/// A unimodular matrix stored as R(φ)·[[e^x, e^x w], [0, e^{−x}]] with
/// (cos 2πφ, sin 2πφ) = (c, s).
#[derive(Clone, Debug, PartialEq)]
pub struct KanProduct<R> {
    pub c: R,
    pub s: R,
    pub x: R,
    pub w: R,
}

impl<R: Real> KanProduct<R> {
    pub fn identity_like(z: &R) -> Self {
        KanProduct { c: z.one_like(), s: z.zero_like(), x: z.zero_like(), w: z.zero_like() }
    }

    /// Left-multiplies by a unimodular matrix.
    pub fn left_mul(&mut self, m: &Sl2<R>) {
        // QR of m·R(φ); the triangular factor has diagonal (r, 1/r).
        let (c, s) = (&self.c, &self.s);
        let b1 = (m.a.clone() * c.clone() + m.b.clone() * s.clone(), m.c.clone() * c.clone() + m.d.clone() * s.clone());
        let b2 = (m.b.clone() * c.clone() - m.a.clone() * s.clone(), m.d.clone() * c.clone() - m.c.clone() * s.clone());
        let r = b1.0.hypot(&b1.1);
        let (qc, qs) = (b1.0 / r.clone(), b1.1 / r.clone());
        let u = qc.clone() * b2.0 + qs.clone() * b2.1;
        let e = (self.x.clone() * self.x.lit(-2.0)).exp();
        self.w = self.w.clone() + u / r.clone() * e;
        self.x = self.x.clone() + r.ln();
        self.c = qc;
        self.s = qs;
    }

    /// self·first, the product applying `first` before `self`.
    pub fn compose(&self, first: &KanProduct<R>) -> KanProduct<R> {
        // U2·R1 = Q·[[r, u], [0, 1/r]], computed with e^{x2} scaled out.
        let t = (self.x.clone() * self.x.lit(-2.0)).exp();
        let (c1, s1) = (&first.c, &first.s);
        let col1 = (c1.clone() + self.w.clone() * s1.clone(), t.clone() * s1.clone());
        let col2 = (self.w.clone() * c1.clone() - s1.clone(), t * c1.clone());
        let rho = col1.0.hypot(&col1.1);
        let (qa, qb) = (col1.0 / rho.clone(), col1.1 / rho.clone());
        let u_over_r = (qa.clone() * col2.0 + qb.clone() * col2.1) / rho.clone();
        let e1 = (first.x.clone() * first.x.lit(-2.0)).exp();
        let c = self.c.clone() * qa.clone() - self.s.clone() * qb.clone();
        let s = self.s.clone() * qa + self.c.clone() * qb;
        KanProduct { c, s, x: first.x.clone() + self.x.clone() + rho.ln(), w: first.w.clone() + u_over_r * e1 }
    }

    /// M = e^m·N with N of unit scale; returns (N, m).
    pub fn scaled(&self) -> (Sl2<R>, R) {
        let m = if self.x > self.x.zero_like() { self.x.clone() } else { -self.x.clone() };
        let p = (self.x.clone() - m.clone()).exp();
        let q = (-self.x.clone() - m.clone()).exp();
        let u = Sl2::new(p.clone(), p * self.w.clone(), self.x.zero_like(), q);
        let rot = Sl2::new(self.c.clone(), -self.s.clone(), self.s.clone(), self.c.clone());
        (rot.mul(&u), m)
    }

    /// The explicit matrix; overflows for long hyperbolic products.
    pub fn to_matrix(&self) -> Sl2<R> {
        let (n, m) = self.scaled();
        let e = m.exp();
        Sl2::new(n.a * e.clone(), n.b * e.clone(), n.c * e.clone(), n.d * e)
    }

    /// ln of the operator 2-norm.
    pub fn ln_norm(&self) -> R {
        let (n, m) = self.scaled();
        n.norm().ln() + m
    }

    /// Determinant of the factored form.
    pub fn det(&self) -> R {
        self.c.clone() * self.c.clone() + self.s.clone() * self.s.clone()
    }

    /// ln|tr M| together with the sign of tr M (0 when it vanishes).
    pub fn ln_abs_trace(&self) -> (R, i8) {
        let (n, m) = self.scaled();
        let t = n.trace();
        let sign = if t.is_zero() {
            0
        } else if t > t.zero_like() {
            1
        } else {
            -1
        };
        (t.abs().ln() + m, sign)
    }
}

/// Operator parameters: coupling λ, frequency α, energy E, phase θ.
#[derive(Clone, Debug, PartialEq)]
pub struct CocycleParams<R> {
    pub lambda: R,
    pub alpha: R,
    pub energy: R,
    pub theta: R,
}

impl CocycleParams<f64> {
    pub fn new(lambda: f64, alpha: f64, energy: f64, theta: f64) -> Self {
        CocycleParams { lambda, alpha, energy, theta }
    }
}

impl<R: Real> CocycleParams<R> {
    pub fn with_theta(&self, theta: R) -> Self {
        CocycleParams { theta, ..self.clone() }
    }

    pub fn with_energy(&self, energy: R) -> Self {
        CocycleParams { energy, ..self.clone() }
    }

    /// θ + nα.
    pub fn phase(&self, n: i64) -> R {
        self.theta.clone() + self.alpha.clone() * self.theta.lit(n as f64)
    }

    /// E − 2λ cos 2π(θ + nα).
    pub fn potential_term(&self, n: i64) -> R {
        let p = self.phase(n);
        self.energy.clone() - self.lambda.lit(2.0) * self.lambda.clone() * p.cos_2pi()
    }
}

/// A(θ + nα) = [[E − 2λcos2π(θ+nα), −1], [1, 0]].
pub fn step_matrix<R: Real>(p: &CocycleParams<R>, n: i64) -> Sl2<R> {
    let t = p.potential_term(n);
    Sl2::new(t.clone(), t.lit(-1.0), t.lit(1.0), t.zero_like())
}

fn step_inverse<R: Real>(p: &CocycleParams<R>, n: i64) -> Sl2<R> {
    let t = p.potential_term(n);
    Sl2::new(t.zero_like(), t.lit(1.0), t.lit(-1.0), t)
}

/// A_k(θ) = A(θ+(k−1)α)⋯A(θ) for k > 0, A_{−k}(θ) = A_k(θ−kα)^{−1}, A_0 = I.
pub fn product<R: Real>(p: &CocycleParams<R>, k: i64) -> KanProduct<R> {
    let mut m = KanProduct::identity_like(&p.theta);
    if k >= 0 {
        for j in 0..k {
            m.left_mul(&step_matrix(p, j));
        }
    } else {
        for j in 1..=-k {
            m.left_mul(&step_inverse(p, -j));
        }
    }
    m
}

/// A rough a-priori relative error bound for a length-|k| product.
pub fn product_error_estimate<R: Real>(p: &CocycleParams<R>, k: i64) -> f64 {
    let t = 1.0 + p.energy.to_f64().abs() + 2.0 * p.lambda.to_f64().abs();
    8.0 * (k.unsigned_abs() as f64 + 1.0) * t * p.theta.eps()
}

/// `product` that refuses lengths whose error estimate exceeds `threshold`.
pub fn product_checked<R: Real>(p: &CocycleParams<R>, k: i64, threshold: f64) -> Result<KanProduct<R>, CocycleError> {
    let estimate = product_error_estimate(p, k);
    if estimate > threshold {
        return Err(CocycleError::PrecisionLoss { estimate, threshold });
    }
    let m = product(p, k);
    if !m.x.is_finite() || !m.w.is_finite() {
        return Err(CocycleError::PrecisionLoss { estimate: f64::INFINITY, threshold });
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    pub value: f64,
    /// Sample standard deviation over θ.
    pub spread: f64,
    pub per_theta: Vec<f64>,
    pub steps: u64,
}

/// Mean over θ_j = j/samples of (1/n) ln ‖A_n(E, θ_j)‖.
pub fn lyapunov<R: Real>(p: &CocycleParams<R>, n: u64, theta_samples: usize) -> Result<LyapunovEstimate, CocycleError> {
    if n == 0 || theta_samples == 0 {
        return Err(CocycleError::InvalidParameter("need n ≥ 1 and at least one θ sample".into()));
    }
    let per_theta: Vec<f64> = (0..theta_samples)
        .into_par_iter()
        .map(|j| {
            let th = p.theta.lit(j as f64 / theta_samples as f64);
            let m = product(&p.with_theta(th), n as i64);
            m.ln_norm().to_f64() / n as f64
        })
        .collect();
    if per_theta.iter().any(|v| !v.is_finite()) {
        return Err(CocycleError::PrecisionLoss { estimate: f64::INFINITY, threshold: 0.0 });
    }
    let mean = per_theta.iter().sum::<f64>() / per_theta.len() as f64;
    let var = if per_theta.len() > 1 {
        per_theta.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (per_theta.len() - 1) as f64
    } else {
        0.0
    };
    Ok(LyapunovEstimate { value: mean, spread: var.sqrt(), per_theta, steps: n })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Averaging {
    Plain,
    Weighted,
}

/// Branch window for the per-step angle increment ψ, in turns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LiftBranch {
    /// (−1/2, 1/2]: for cocycles close to the identity.
    Centered,
    /// (−1/4, 3/4]: the continuous lift of Schrödinger matrices, where every
    /// increment is a quarter turn at zero potential.
    Schrodinger,
}

/// Angle increment, in turns, taking direction `v` to `m·v`.
pub fn lift_increment<R: Real>(m: &Sl2<R>, v: &(R, R), branch: LiftBranch) -> R {
    let mv = m.apply(v);
    let cross = v.0.clone() * mv.1.clone() - v.1.clone() * mv.0.clone();
    let dot = v.0.clone() * mv.0 + v.1.clone() * mv.1;
    let tau = v.0.lit(std::f64::consts::TAU);
    let mut psi = cross.atan2(&dot) / tau;
    if branch == LiftBranch::Schrodinger && psi <= psi.lit(-0.25) {
        psi = psi + v.0.lit(1.0);
    }
    psi
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationEstimate {
    /// Average increment in turns; Schrödinger cocycles land in [0, 1/2].
    pub value: f64,
    /// Disagreement between the two half-orbit averages.
    pub error: f64,
    pub steps: u64,
    pub averaging: Averaging,
}

impl RotationEstimate {
    pub fn mod1(&self) -> f64 {
        self.value.rem_euclid(1.0)
    }
}

fn bump(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        (-1.0 / (t * (1.0 - t))).exp()
    }
}

fn window_average(psi: &[f64], averaging: Averaging) -> f64 {
    let n = psi.len() as f64;
    match averaging {
        Averaging::Plain => psi.iter().sum::<f64>() / n,
        Averaging::Weighted => {
            let (mut num, mut den) = (0.0, 0.0);
            for (j, v) in psi.iter().enumerate() {
                let w = bump((j as f64 + 0.5) / n);
                num += w * v;
                den += w;
            }
            num / den
        }
    }
}

/// Birkhoff average of the lift along the orbit starting at the phase of site 0
/// with direction e1, for an arbitrary step family.
pub fn rotation_number_with<R: Real, F>(
    step: F,
    seed: &R,
    n: u64,
    averaging: Averaging,
    branch: LiftBranch,
) -> Result<RotationEstimate, CocycleError>
where
    F: Fn(i64) -> Sl2<R>,
{
    if n < 4 {
        return Err(CocycleError::InvalidParameter("need at least 4 steps".into()));
    }
    let mut v = (seed.one_like(), seed.zero_like());
    let mut psi = Vec::with_capacity(n as usize);
    for j in 0..n as i64 {
        let m = step(j);
        psi.push(lift_increment(&m, &v, branch).to_f64());
        let nv = m.apply(&v);
        let r = nv.0.hypot(&nv.1);
        v = (nv.0 / r.clone(), nv.1 / r);
    }
    let value = window_average(&psi, averaging);
    let half = psi.len() / 2;
    let error = (window_average(&psi[..half], averaging) - window_average(&psi[half..], averaging)).abs();
    Ok(RotationEstimate { value, error, steps: n, averaging })
}

/// Fibered rotation number of the Schrödinger cocycle, with full turn = 1.
pub fn rotation_number<R: Real>(
    p: &CocycleParams<R>,
    n: u64,
    averaging: Averaging,
) -> Result<RotationEstimate, CocycleError> {
    rotation_number_with(|j| step_matrix(p, j), &p.theta, n, averaging, LiftBranch::Schrodinger)
}

/// `rotation_number` that fails when the half-orbit averages differ by more
/// than `tolerance`.
pub fn rotation_number_checked<R: Real>(
    p: &CocycleParams<R>,
    n: u64,
    averaging: Averaging,
    tolerance: f64,
) -> Result<RotationEstimate, CocycleError> {
    let r = rotation_number(p, n, averaging)?;
    if !(r.error <= tolerance) {
        return Err(CocycleError::NonConvergence { estimate: r.value, spread: r.error, tolerance });
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TelescopingGap {
    /// max over the grid of ‖A_q(θ + qα) − A_q(θ)‖, as a natural log.
    pub ln_gap_plus: f64,
    /// Same for A_{−q}.
    pub ln_gap_minus: f64,
    /// ln|q·α − p| for the nearest integer p.
    pub ln_shift: f64,
    pub per_theta: Vec<(f64, f64, f64)>,
}

impl TelescopingGap {
    pub fn gap_plus(&self) -> f64 {
        self.ln_gap_plus.exp()
    }
    pub fn gap_minus(&self) -> f64 {
        self.ln_gap_minus.exp()
    }
}

/// Scaled 2-vector: value = e^s · (a, b).
#[derive(Clone, Debug)]
struct ScaledVec {
    a: f64,
    b: f64,
    s: f64,
}

/// ‖A_{±q}(E, θ + qα) − A_{±q}(E, θ)‖ over a θ grid.
///
/// With δ = qα − p, the difference telescopes into
/// 4λ sin(πδ) Σ_j sin π(2θ_j + δ) · P_j e1 e1ᵀ Q_j, where Q_j = A_j(θ) and
/// P_j = A_{q−1−j}(θ_{j+1} + δ). Keeping sin(πδ) outside the sum preserves
/// relative accuracy when δ is far below the working precision. The −q gap at θ
/// equals the +q gap at θ − δ, since the adjugate is a linear isometry.
pub fn telescoping_gap(
    lambda: f64,
    alpha: &Rational,
    energy: f64,
    q: &Integer,
    theta_grid: &[f64],
    max_relative_error: f64,
) -> Result<TelescopingGap, CocycleError> {
    if *q < 0 {
        return Err(CocycleError::InvalidParameter("q must be non-negative".into()));
    }
    let qn = q
        .to_i64()
        .filter(|&v| v <= 50_000_000)
        .ok_or_else(|| CocycleError::InvalidParameter(format!("q = {q} is past the step budget")))?;
    let shift = Rational::from(alpha * q);
    let (_, rounded) = shift.clone().fract_round(Integer::new());
    let delta = shift - rounded;
    if qn == 0 || delta == 0 {
        let per_theta = theta_grid.iter().map(|&t| (t, f64::NEG_INFINITY, f64::NEG_INFINITY)).collect();
        return Ok(TelescopingGap {
            ln_gap_plus: f64::NEG_INFINITY,
            ln_gap_minus: f64::NEG_INFINITY,
            ln_shift: f64::NEG_INFINITY,
            per_theta,
        });
    }
    let df = Float::with_val(128, &delta);
    let ln_shift = df.clone().abs().ln().to_f64();
    let sin_pi_delta = df * Float::with_val(128, Constant::Pi);
    let sin_pi_delta = sin_pi_delta.sin();
    let ln_sin = sin_pi_delta.clone().abs().ln().to_f64();
    let delta_f = delta.to_f64();
    let alpha_f = alpha.to_f64();

    let rows: Vec<Result<(f64, f64, f64), CocycleError>> = theta_grid
        .par_iter()
        .map(|&theta| {
            let plus = ln_gap_sum(lambda, alpha_f, energy, theta, delta_f, qn, max_relative_error)?;
            let minus = ln_gap_sum(lambda, alpha_f, energy, theta - delta_f, delta_f, qn, max_relative_error)?;
            Ok((theta, plus + ln_sin, minus + ln_sin))
        })
        .collect();
    let per_theta = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let ln_gap_plus = per_theta.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let ln_gap_minus = per_theta.iter().map(|r| r.2).fold(f64::NEG_INFINITY, f64::max);
    Ok(TelescopingGap { ln_gap_plus, ln_gap_minus, ln_shift, per_theta })
}

/// ln ‖Σ_j 4λ sin π(2θ_j + δ) P_j e1 e1ᵀ Q_j‖.
fn ln_gap_sum(
    lambda: f64,
    alpha: f64,
    energy: f64,
    theta: f64,
    delta: f64,
    q: i64,
    max_relative_error: f64,
) -> Result<f64, CocycleError> {
    let p = CocycleParams::new(lambda, alpha, energy, theta);
    let shifted = CocycleParams::new(lambda, alpha, energy, theta + delta);
    // first rows of Q_j = A_j(θ), j = 0..q−1
    let mut rows = Vec::with_capacity(q as usize);
    let mut qm = KanProduct::identity_like(&0.0);
    for j in 0..q {
        let (n, m) = qm.scaled();
        rows.push(ScaledVec { a: n.a, b: n.b, s: m });
        qm.left_mul(&step_matrix(&p, j));
    }
    // P_j e1 for j = q−1 down to 0: P_{q−1} = I, P_{j−1} = P_j·A(θ_j + δ)
    let mut pm = KanProduct::identity_like(&0.0);
    let mut acc = [[0.0f64; 2]; 2];
    let mut acc_scale = f64::NEG_INFINITY;
    let mut abs_sum_ln = f64::NEG_INFINITY;
    for j in (0..q).rev() {
        let (n, m) = pm.scaled();
        let col = ScaledVec { a: n.a, b: n.c, s: m };
        let row = &rows[j as usize];
        let coeff = 4.0 * lambda * (std::f64::consts::PI * (2.0 * shifted.phase(j) - delta)).sin();
        let s = col.s + row.s;
        let term = [[coeff * col.a * row.a, coeff * col.a * row.b], [coeff * col.b * row.a, coeff * col.b * row.b]];
        let mag = term.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
        if mag > 0.0 {
            let l = mag.ln() + s;
            abs_sum_ln = log_add(abs_sum_ln, l);
        }
        if acc_scale == f64::NEG_INFINITY {
            acc = term;
            acc_scale = s;
        } else if s > acc_scale {
            let f = (acc_scale - s).exp();
            for (ar, tr) in acc.iter_mut().zip(term.iter()) {
                for (a, t) in ar.iter_mut().zip(tr.iter()) {
                    *a = *a * f + t;
                }
            }
            acc_scale = s;
        } else {
            let f = (s - acc_scale).exp();
            for (ar, tr) in acc.iter_mut().zip(term.iter()) {
                for (a, t) in ar.iter_mut().zip(tr.iter()) {
                    *a += t * f;
                }
            }
        }
        if j > 0 {
            pm = pm.compose(&{
                let mut k = KanProduct::identity_like(&0.0);
                k.left_mul(&step_matrix(&shifted, j));
                k
            });
        }
    }
    let norm = Sl2::new(acc[0][0], acc[0][1], acc[1][0], acc[1][1]).norm();
    let ln_norm = norm.ln() + acc_scale;
    // summation error is at most ~ q·u·Σ|terms|
    let ln_err = abs_sum_ln + ((q as f64) * 4.0 * f64::EPSILON).ln();
    if !ln_norm.is_finite() || ln_err - ln_norm > max_relative_error.ln() {
        return Err(CocycleError::PrecisionLoss { estimate: (ln_err - ln_norm).exp(), threshold: max_relative_error });
    }
    Ok(ln_norm)
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Direct evaluation of ‖A_k(θ + kα) − A_k(θ)‖ at working precision of `R`.
/// Only meaningful when the difference is above the roundoff of the products.
pub fn direct_gap<R: Real>(p: &CocycleParams<R>, shift: &R, k: i64) -> R {
    let a = product(&p.with_theta(p.theta.clone() + shift.clone()), k).to_matrix();
    let b = product(p, k).to_matrix();
    a.sub(&b).norm()
}
