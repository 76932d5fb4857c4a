//! Verification kernels: (C,N)-badness, the Gordon trace test, eigenfunction
//! decay rates, the cohomological equation and the rotation-number slope.

use num_complex::Complex64;
use rayon::prelude::*;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cf_engine::{self, CfError, ContinuedFraction, Enclosure};
use crate::cocycle::{self, Averaging, CocycleError, CocycleParams, KanProduct, Sl2};
use crate::real::{BigReal, Precision, Real};
use crate::spectrum::{least_squares, SpectrumApprox};
use crate::tridiag;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertifyError {
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error("all {discarded} candidate states carry more than {threshold:e} of their mass near the truncation edges")]
    BoundaryContamination { discarded: usize, threshold: f64 },
    #[error("|1 − e^(2πikα)| = {magnitude:e} at k = {k} is below the working precision")]
    DenominatorUnderflow { k: i64, magnitude: f64 },
    #[error("phase θ = {theta} fails the Diophantine condition at m = {m}")]
    PhaseNotDiophantine { theta: f64, m: i64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Cf(#[from] CfError),
    #[error(transparent)]
    Cocycle(#[from] CocycleError),
}

// ---------------------------------------------------------------------------
// (C,N)-badness

/// G = Σ_{|k|≤N} r_k r_kᵀ where u(k) = r_k · (u(1), u(0)).
#[derive(Clone, Debug, PartialEq)]
pub struct BadnessForm<R> {
    pub g: [[R; 2]; 2],
    pub det: R,
    pub lambda_min: R,
    pub lambda_max: R,
}

fn potentials<R: Real>(p: &CocycleParams<R>, lo: i64, hi: i64) -> Vec<R> {
    (lo..=hi).map(|k| p.potential_term(k)).collect()
}

/// λ_min(G_N) for N = 0..=n_max.
///
/// det G is accumulated as Σ_{i<j} χ_i(j)², where χ_i solves the difference
/// equation with χ_i(i) = 0, χ_i(i+1) = 1, so |r_i × r_j| = |χ_i(j)|. Every
/// term is a square computed along its growing direction, which keeps λ_min =
/// det/λ_max accurate even when λ_max is astronomically larger.
pub fn badness_profile<R: Real>(p: &CocycleParams<R>, n_max: usize) -> Result<Vec<BadnessForm<R>>, CertifyError> {
    let nm = n_max as i64;
    let t = potentials(p, -nm - 1, nm + 1);
    let tk = |k: i64| &t[(k + nm + 1) as usize];
    let zero = p.theta.zero_like();
    let one = p.theta.one_like();
    // r_k for k in [-n_max, n_max]
    let width = 2 * n_max + 1;
    let mut r = vec![(zero.clone(), zero.clone()); width];
    let idx = |k: i64| (k + nm) as usize;
    r[idx(0)] = (zero.clone(), one.clone());
    if n_max >= 1 {
        r[idx(1)] = (one.clone(), zero.clone());
        for k in 1..nm {
            let (a, b) = (&r[idx(k)], &r[idx(k - 1)]);
            let next = (tk(k).clone() * a.0.clone() - b.0.clone(), tk(k).clone() * a.1.clone() - b.1.clone());
            r[idx(k + 1)] = next;
        }
        // r_{k-1} = t_k r_k − r_{k+1}
        for k in (-nm + 1..=0).rev() {
            let (a, b) = (&r[idx(k)], &r[idx(k + 1)]);
            let prev = (tk(k).clone() * a.0.clone() - b.0.clone(), tk(k).clone() * a.1.clone() - b.1.clone());
            r[idx(k - 1)] = prev;
        }
    }
    // For N ≥ 1, r_0 r_0ᵀ + r_1 r_1ᵀ = I, so G = I + H with H the sum over the
    // remaining sites and λ_min(G) = 1 + det H / λ_max(H). H and det H are
    // kept separately, which makes λ_min ≥ 1 exact at N ≥ 1.
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(BadnessForm {
        g: [[zero.clone(), zero.clone()], [zero.clone(), one.clone()]],
        det: zero.clone(),
        lambda_min: zero.clone(),
        lambda_max: one.clone(),
    });
    let (mut h11, mut h12, mut h22) = (zero.clone(), zero.clone(), zero.clone());
    let add_outer = |h11: &mut R, h12: &mut R, h22: &mut R, v: &(R, R)| {
        h11.add_square(&v.0);
        *h12 = h12.clone() + v.0.clone() * v.1.clone();
        h22.add_square(&v.1);
    };
    let mut det = zero.clone();
    let mut det_h = zero.clone();
    let core = |k: i64| k == 0 || k == 1;
    // chi[i] = (χ_i(N−1), χ_i(N)) for sites i in [−N, N], indexed by i + n_max
    let mut chi: Vec<(R, R)> = vec![(zero.clone(), zero.clone()); width];
    for n in 1..=nm {
        // advance every existing site to j = n
        for i in -(n - 1)..=(n - 1) {
            let c = &mut chi[idx(i)];
            let next = if i == n - 1 { one.clone() } else { tk(n - 1).mul_sub(&c.1, &c.0) };
            det.add_square(&next);
            if !core(i) && !core(n) {
                det_h.add_square(&next);
            }
            c.0 = std::mem::replace(&mut c.1, next);
        }
        chi[idx(n)] = (zero.clone(), zero.clone());
        // the new site −n pairs with every j in (−n, n]
        let (mut prev, mut cur) = (zero.clone(), one.clone());
        det.add_square(&one);
        if !core(-n + 1) {
            det_h.add_square(&one);
        }
        for j in (-n + 1)..n {
            let next = tk(j).mul_sub(&cur, &prev);
            det.add_square(&next);
            if !core(j + 1) {
                det_h.add_square(&next);
            }
            prev = std::mem::replace(&mut cur, next);
        }
        chi[idx(-n)] = (prev, cur);
        if n >= 2 {
            add_outer(&mut h11, &mut h12, &mut h22, &r[idx(n)]);
        }
        add_outer(&mut h11, &mut h12, &mut h22, &r[idx(-n)]);
        let f = finish_form(h11.clone(), h12.clone(), h22.clone(), det_h.clone(), det.clone());
        if !f.lambda_max.is_finite() || !f.det.is_finite() {
            return Err(CertifyError::PrecisionLoss(format!("badness form overflows at N = {n}")));
        }
        out.push(f);
    }
    Ok(out)
}

fn finish_form<R: Real>(h11: R, h12: R, h22: R, det_h: R, det: R) -> BadnessForm<R> {
    let one = h11.one_like();
    let tr = h11.clone() + h22.clone();
    let diff = h11.clone() - h22.clone();
    let disc = (diff.clone() * diff + h12.lit(4.0) * h12.clone() * h12.clone()).sqrt();
    let max_h = (tr + disc) * h11.lit(0.5);
    let min_h = if max_h.is_zero() { max_h.clone() } else { det_h / max_h.clone() };
    BadnessForm {
        g: [[h11 + one.clone(), h12.clone()], [h12, h22 + one.clone()]],
        det,
        lambda_min: min_h + one.clone(),
        lambda_max: max_h + one,
    }
}

/// The form for a single N.
pub fn badness_form<R: Real>(p: &CocycleParams<R>, n: usize) -> Result<BadnessForm<R>, CertifyError> {
    Ok(badness_profile(p, n)?.pop().expect("profile has N + 1 entries"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessSource {
    Grid,
    /// Eigenvalue of a Dirichlet truncation concentrated near the origin.
    TruncationSearch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BadnessWitness {
    pub theta: f64,
    pub energy: f64,
    /// Energy as a decimal string at the working precision.
    pub energy_exact: String,
    pub lambda_min: f64,
    pub source: WitnessSource,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum BadnessVerdict {
    CertifiedOnGrid,
    RefutedWithWitness,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BadnessCertificate {
    pub lambda: f64,
    pub alpha: f64,
    pub c: f64,
    pub n: usize,
    pub theta_grid: Vec<f64>,
    pub energies_per_theta: usize,
    pub precision: Precision,
    pub min_value: f64,
    pub witness: Option<BadnessWitness>,
    pub verdict: BadnessVerdict,
    pub searched_truncations: usize,
}

impl BadnessCertificate {
    pub fn certified(&self) -> bool {
        self.verdict == BadnessVerdict::CertifiedOnGrid
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BadnessScanOptions {
    pub c: f64,
    pub n: usize,
    pub theta_grid: Vec<f64>,
    pub energies_per_band: usize,
    pub precision: Precision,
    /// Also look for eigenvalues of [−W, W] truncations, W = 2N + margin,
    /// whose eigenvectors sit near the origin.
    pub witness_search: bool,
    pub search_margin: usize,
}

impl BadnessScanOptions {
    pub fn new(c: f64, n: usize) -> Self {
        BadnessScanOptions {
            c,
            n,
            theta_grid: (0..256).map(|j| j as f64 / 256.0).collect(),
            energies_per_band: 64,
            precision: Precision::Double,
            witness_search: false,
            search_margin: 32,
        }
    }
}

struct Candidate {
    theta: f64,
    energy: f64,
    energy_exact: String,
    value: f64,
    source: WitnessSource,
}

/// Smallest λ_min(G_N) over θ-grid × band energies, plus optional truncation
/// witnesses. `alpha` is evaluated at the working precision.
pub fn badness_scan(
    lambda: f64,
    alpha: &ContinuedFraction,
    spectrum: &SpectrumApprox,
    opts: &BadnessScanOptions,
) -> Result<BadnessCertificate, CertifyError> {
    if opts.theta_grid.is_empty() || (opts.energies_per_band == 0 && !opts.witness_search) {
        return Err(CertifyError::InvalidParameter("empty scan grid".into()));
    }
    if !(opts.c > 0.0) {
        return Err(CertifyError::InvalidParameter("C must be positive".into()));
    }
    let bits = opts.precision.bits();
    let energies = spectrum.sample_energies(opts.energies_per_band);
    let alpha_enc = alpha.enclosure_beyond(&(Integer::from(1) << (bits / 2 + 8)), 1 << 14)?;
    let per_theta: Vec<Result<Vec<Candidate>, CertifyError>> = opts
        .theta_grid
        .par_iter()
        .map(|&theta| match opts.precision {
            Precision::Double => {
                let a = alpha_enc.mid_f64();
                scan_theta(lambda, &a, theta, &energies, spectrum, opts, |x| x)
            }
            _ => {
                let a = BigReal::from_rational(&alpha_enc.mid(), bits);
                scan_theta(lambda, &a, theta, &energies, spectrum, opts, |x| BigReal::new(x, bits))
            }
        })
        .collect();
    let mut best: Option<Candidate> = None;
    let mut searched = 0;
    for r in per_theta {
        for cand in r? {
            if cand.source == WitnessSource::TruncationSearch {
                searched += 1;
            }
            if best.as_ref().is_none_or(|b| cand.value < b.value) {
                best = Some(cand);
            }
        }
    }
    let best = best.ok_or_else(|| CertifyError::InvalidParameter("no energies to scan".into()))?;
    let refuted = best.value < opts.c * opts.c;
    Ok(BadnessCertificate {
        lambda,
        alpha: alpha_enc.mid_f64(),
        c: opts.c,
        n: opts.n,
        theta_grid: opts.theta_grid.clone(),
        energies_per_theta: energies.len(),
        precision: opts.precision,
        min_value: best.value,
        witness: Some(BadnessWitness {
            theta: best.theta,
            energy: best.energy,
            energy_exact: best.energy_exact,
            lambda_min: best.value,
            source: best.source,
        }),
        verdict: if refuted { BadnessVerdict::RefutedWithWitness } else { BadnessVerdict::CertifiedOnGrid },
        searched_truncations: searched,
    })
}

fn scan_theta<R: Real, F: Fn(f64) -> R>(
    lambda: f64,
    alpha: &R,
    theta: f64,
    energies: &[f64],
    spectrum: &SpectrumApprox,
    opts: &BadnessScanOptions,
    lift: F,
) -> Result<Vec<Candidate>, CertifyError> {
    let base = CocycleParams { lambda: lift(lambda), alpha: alpha.clone(), energy: lift(0.0), theta: lift(theta) };
    let mut out = Vec::new();
    let mut best: Option<Candidate> = None;
    for &e in energies {
        let f = badness_form(&base.with_energy(lift(e)), opts.n)?;
        let v = f.lambda_min.to_f64();
        if best.as_ref().is_none_or(|b| v < b.value) {
            best = Some(Candidate {
                theta,
                energy: e,
                energy_exact: format!("{e:e}"),
                value: v,
                source: WitnessSource::Grid,
            });
        }
    }
    out.extend(best);
    if opts.witness_search {
        if let Some(c) = truncation_witness(&base, opts.n, opts.search_margin, spectrum)? {
            out.push(c);
        }
    }
    Ok(out)
}

/// Refines the Dirichlet eigenvalue on [−W, W] whose eigenvector carries the
/// most weight on sites 0 and 1, among eigenvalues inside the spectrum bands,
/// and evaluates λ_min(G_N) there.
fn truncation_witness<R: Real>(
    base: &CocycleParams<R>,
    n: usize,
    margin: usize,
    spectrum: &SpectrumApprox,
) -> Result<Option<Candidate>, CertifyError> {
    let w = (2 * n + margin) as i64;
    let diag_r: Vec<R> = (-w..=w)
        .map(|k| {
            let ph = base.phase(k);
            base.lambda.lit(2.0) * base.lambda.clone() * ph.cos_2pi()
        })
        .collect();
    let diag: Vec<f64> = diag_r.iter().map(|x| x.to_f64()).collect();
    let off = vec![1.0; diag.len() - 1];
    let ev = tridiag::eigenvalues(&diag, &off);
    let origin = w as usize;
    let mut pick: Option<(usize, f64, f64)> = None;
    for (k, &e) in ev.iter().enumerate() {
        if !spectrum.contains(e) {
            continue;
        }
        let v = tridiag::inverse_iteration(&diag, &off, e);
        let mass = v[origin].powi(2) + v[origin + 1].powi(2);
        if pick.is_none_or(|(_, _, m)| mass > m) {
            pick = Some((k, e, mass));
        }
    }
    let Some((k, e, _)) = pick else { return Ok(None) };
    let off_r: Vec<R> = vec![base.theta.one_like(); diag_r.len() - 1];
    let spread = 1e-9 * (1.0 + e.abs());
    let (lo, hi) = (base.theta.lit(e - spread), base.theta.lit(e + spread));
    // widen if the double-precision value was off by more than the spread
    let (lo, hi) = if tridiag::sturm_count(&diag_r, &off_r, &lo) <= k && tridiag::sturm_count(&diag_r, &off_r, &hi) > k
    {
        (lo, hi)
    } else {
        let b = 2.0 + 2.0 * base.lambda.to_f64().abs() + 1.0;
        (base.theta.lit(-b), base.theta.lit(b))
    };
    let iters = base.theta.bits() + 64;
    let (a, b) = tridiag::bisect_eigenvalue(&diag_r, &off_r, k, &lo, &hi, iters);
    let energy = (a + b) * base.theta.lit(0.5);
    let f = badness_form(&base.with_energy(energy.clone()), n)?;
    Ok(Some(Candidate {
        theta: base.theta.to_f64(),
        energy: energy.to_f64(),
        energy_exact: energy.to_decimal(),
        value: f.lambda_min.to_f64(),
        source: WitnessSource::TruncationSearch,
    }))
}

// ---------------------------------------------------------------------------
// Gordon trace test

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GordonCase {
    /// |tr A_q| ≥ 1.
    TraceAtLeastOne,
    /// |tr A_q| < 1.
    TraceBelowOne,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GordonReport {
    pub theta: f64,
    pub energy: f64,
    pub q: i64,
    /// Natural logs of ‖A_q ū‖, ‖A_{−q} ū‖, ‖A_{2q} ū‖ and ‖A_q^{−1} ū‖.
    pub ln_norm_plus: f64,
    pub ln_norm_minus: f64,
    pub ln_norm_double: f64,
    pub ln_norm_inverse: f64,
    pub ln_abs_trace: f64,
    pub trace_sign: i8,
    pub case: GordonCase,
    pub ln_max_norm: f64,
    /// ‖A_{±q}(θ + qα) − A_{±q}(θ)‖ when the frequency was given exactly,
    /// saturated at f64::MAX.
    pub telescoping: Option<(f64, f64)>,
    /// Both telescoping gaps at most 1/4, under which the max norm is ≥ 1/4.
    pub hypotheses_hold: Option<bool>,
}

impl GordonReport {
    pub fn max_norm(&self) -> f64 {
        self.ln_max_norm.exp()
    }

    /// max(‖A_q ū‖, ‖A_q^{−1} ū‖), at least 1/2 whenever |tr| ≥ 1.
    pub fn dichotomy_max(&self) -> f64 {
        self.ln_norm_plus.max(self.ln_norm_inverse).exp()
    }

    pub fn trace(&self) -> f64 {
        self.trace_sign as f64 * self.ln_abs_trace.exp()
    }
}

/// ‖M + M⁻¹ − (tr M)·I‖ with M⁻¹ from the adjugate over the determinant.
pub fn hami_residual(m: &Sl2<f64>) -> f64 {
    let det = m.det();
    let inv = Sl2::new(m.d / det, -m.b / det, -m.c / det, m.a / det);
    let t = m.trace();
    Sl2::new(m.a + inv.a - t, m.b + inv.b, m.c + inv.c, m.d + inv.d - t).norm()
}

fn ln_apply_norm(m: &KanProduct<f64>, u: (f64, f64), inverse: bool) -> f64 {
    let (n, s) = m.scaled();
    let n = if inverse { n.adjugate() } else { n };
    let v = n.apply(&u);
    v.0.hypot(v.1).ln() + s
}

/// Norms of A_{q}ū, A_{−q}ū, A_{2q}ū and A_q^{−1}ū at the parameters' phase.
/// With an exact frequency the telescoping gaps at this phase are attached.
pub fn gordon_test(
    p: &CocycleParams<f64>,
    q: i64,
    u: (f64, f64),
    exact_alpha: Option<&Rational>,
) -> Result<GordonReport, CertifyError> {
    let norm_u = u.0.hypot(u.1);
    if !((norm_u - 1.0).abs() < 1e-12) {
        return Err(CertifyError::InvalidParameter(format!("ū must be a unit vector, |ū| = {norm_u}")));
    }
    if q <= 0 {
        return Err(CertifyError::InvalidParameter("q must be positive".into()));
    }
    let plus = cocycle::product(p, q);
    let minus = cocycle::product(p, -q);
    let double = cocycle::product(p, 2 * q);
    let (ln_abs_trace, trace_sign) = plus.ln_abs_trace();
    // a vanishing trace keeps a finite log so reports stay serializable
    let ln_abs_trace = ln_abs_trace.max(-f64::MAX);
    let norms = [
        ln_apply_norm(&plus, u, false),
        ln_apply_norm(&minus, u, false),
        ln_apply_norm(&double, u, false),
        ln_apply_norm(&plus, u, true),
    ];
    if norms.iter().any(|x| x.is_nan()) {
        return Err(CertifyError::PrecisionLoss("non-finite transfer-matrix norm".into()));
    }
    let (telescoping, hypotheses_hold) = match exact_alpha {
        Some(a) => {
            let g = cocycle::telescoping_gap(p.lambda, a, p.energy, &Integer::from(q), &[p.theta], 1e-3)?;
            let gp = g.gap_plus().min(f64::MAX);
            let gm = g.gap_minus().min(f64::MAX);
            (Some((gp, gm)), Some(gp <= 0.25 && gm <= 0.25))
        }
        None => (None, None),
    };
    Ok(GordonReport {
        theta: p.theta,
        energy: p.energy,
        q,
        ln_norm_plus: norms[0],
        ln_norm_minus: norms[1],
        ln_norm_double: norms[2],
        ln_norm_inverse: norms[3],
        ln_abs_trace,
        trace_sign,
        case: if ln_abs_trace >= 0.0 { GordonCase::TraceAtLeastOne } else { GordonCase::TraceBelowOne },
        ln_max_norm: norms[..3].iter().copied().fold(f64::NEG_INFINITY, f64::max),
        telescoping,
        hypotheses_hold,
    })
}

// ---------------------------------------------------------------------------
// Eigenfunction decay

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayOptions {
    pub gamma: f64,
    pub tau: f64,
    pub dc_cutoff: u64,
    /// Largest tolerated eigenvector mass on the outer `edge_fraction` of sites.
    pub boundary_threshold: f64,
    pub edge_fraction: f64,
    /// Fraction of sites, centred on the origin, used in the fit.
    pub core_fraction: f64,
}

impl Default for DecayOptions {
    fn default() -> Self {
        DecayOptions {
            gamma: 0.05,
            tau: 2.0,
            dc_cutoff: 1000,
            boundary_threshold: 1e-6,
            edge_fraction: 0.05,
            core_fraction: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub energy: f64,
    /// Site of largest amplitude.
    pub center: i64,
    pub ipr: f64,
    /// Slope of ln(u²(n)+u²(n+1))/2 against |n − center|.
    pub rate: f64,
    /// RMS residual of the fit.
    pub residual: f64,
    pub boundary_mass: f64,
    pub fit_points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub lambda: f64,
    pub theta: f64,
    pub half_width: usize,
    pub fits: Vec<DecayFit>,
    /// States rejected for boundary mass before the `count` best were taken.
    pub discarded: usize,
}

/// ln|pair norm| profile y_i = ln √(u(i)² + u(i+1)²) of a Dirichlet eigenvector,
/// i = 0..L−2, built from both edges inward so the tails keep full relative
/// accuracy, and matched at `center`.
fn log_profile(diag: &[f64], e: f64, center: usize) -> Vec<f64> {
    let l = diag.len();
    let c = center.min(l - 2);
    let mut y = vec![0.0; l - 1];
    // from the left edge: u(−1) = 0, u(0) = 1
    let (mut a, mut b, mut s) = (0.0f64, 1.0f64, 0.0f64); // (u(i−1), u(i)) · e^{−s}
    let mut left = vec![0.0; c + 1];
    for i in 0..=c {
        let next = (e - diag[i]) * b - a;
        left[i] = b.hypot(next).ln() + s;
        a = b;
        b = next;
        let m = a.abs().max(b.abs());
        if m > 1e100 || (m < 1e-100 && m > 0.0) {
            a /= m;
            b /= m;
            s += m.ln();
        }
    }
    // from the right edge: u(L) = 0, u(L−1) = 1
    let (mut a, mut b, mut s) = (0.0f64, 1.0f64, 0.0f64); // (u(i+1), u(i))
    let mut right = vec![0.0; l - 1];
    for i in (c + 1..l).rev() {
        let prev = (e - diag[i]) * b - a;
        // pair index i−1 is (u(i−1), u(i))
        right[i - 1] = prev.hypot(b).ln() + s;
        a = b;
        b = prev;
        let m = a.abs().max(b.abs());
        if m > 1e100 || (m < 1e-100 && m > 0.0) {
            a /= m;
            b /= m;
            s += m.ln();
        }
    }
    let shift = left[c] - right[c];
    for i in 0..l - 1 {
        y[i] = if i <= c { left[i] } else { right[i] + shift };
    }
    y
}

fn log_sum_exp(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Decay rates of the `count` most localized eigenstates of the truncation to
/// sites [−M, M], by inverse participation ratio.
pub fn decay_rate(
    lambda: f64,
    alpha: &ContinuedFraction,
    theta: f64,
    half_width: usize,
    count: usize,
    opts: &DecayOptions,
) -> Result<DecayReport, CertifyError> {
    if !(lambda > 1.0) {
        return Err(CertifyError::InvalidParameter("decay rates need λ > 1".into()));
    }
    if half_width < 8 || count == 0 {
        return Err(CertifyError::InvalidParameter("need M ≥ 8 and count ≥ 1".into()));
    }
    let cert = cf_engine::dc_phase_check(&Enclosure::from_f64(theta), alpha, opts.gamma, opts.tau, opts.dc_cutoff);
    if let cf_engine::DcVerdict::FailWithWitness { m, .. } = cert.verdict {
        return Err(CertifyError::PhaseNotDiophantine { theta, m });
    }
    let a = alpha.to_f64();
    let m = half_width as i64;
    let diag: Vec<f64> = (-m..=m)
        .map(|n| {
            let ph = theta + n as f64 * a;
            2.0 * lambda * ph.cos_2pi()
        })
        .collect();
    let l = diag.len();
    let off = vec![1.0; l - 1];
    let ev = tridiag::eigenvalues(&diag, &off);
    let states: Vec<(f64, usize, f64)> = ev
        .par_iter()
        .map(|&e| {
            let v = tridiag::inverse_iteration(&diag, &off, e);
            let ipr = v.iter().map(|x| x.powi(4)).sum::<f64>();
            let c = v.iter().enumerate().max_by(|x, y| x.1.abs().total_cmp(&y.1.abs())).map(|x| x.0).unwrap_or(0);
            (e, c, ipr)
        })
        .collect();
    let mut order: Vec<usize> = (0..states.len()).collect();
    order.sort_by(|&i, &j| states[j].2.total_cmp(&states[i].2).then(i.cmp(&j)));
    let edge = ((l as f64 * opts.edge_fraction).ceil() as usize).max(1);
    let core_half = (half_width as f64 * opts.core_fraction).floor() as i64;
    let mut fits = Vec::new();
    let mut discarded = 0;
    for &i in &order {
        if fits.len() == count {
            break;
        }
        let (e, c, ipr) = states[i];
        let y = log_profile(&diag, e, c);
        // pair norms double-count sites; fine for a mass ratio at the edges
        let total = log_sum_exp(y.iter().map(|v| 2.0 * v));
        let edges = log_sum_exp(y[..edge].iter().chain(&y[l - 1 - edge..]).map(|v| 2.0 * v));
        let boundary_mass = (edges - total).exp();
        if boundary_mass > opts.boundary_threshold {
            discarded += 1;
            continue;
        }
        let center = c as i64 - m;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (pi, &yv) in y.iter().enumerate() {
            let n = pi as i64 - m;
            if n.abs() <= core_half && n != center {
                xs.push((n - center).abs() as f64);
                ys.push(yv);
            }
        }
        let Some((rate, icpt)) = least_squares(&xs, &ys) else { continue };
        let residual =
            (xs.iter().zip(&ys).map(|(x, y)| (y - (icpt + rate * x)).powi(2)).sum::<f64>() / xs.len() as f64).sqrt();
        fits.push(DecayFit { energy: e, center, ipr, rate, residual, boundary_mass, fit_points: xs.len() });
    }
    if fits.is_empty() {
        return Err(CertifyError::BoundaryContamination { discarded, threshold: opts.boundary_threshold });
    }
    Ok(DecayReport { lambda, theta, half_width, fits, discarded })
}

// ---------------------------------------------------------------------------
// Cohomological equation

mod complex_pairs {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        Ok(Vec::<[f64; 2]>::deserialize(d)?.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CohomSolution {
    pub cutoff: usize,
    /// φ̂(k) for k = −cutoff..=cutoff.
    #[serde(with = "complex_pairs")]
    pub phi: Vec<Complex64>,
    #[serde(with = "complex_pairs")]
    pub psi: Vec<Complex64>,
    /// min over 0 < |k| ≤ cutoff of |1 − e^{2πikα}|.
    pub min_denominator: f64,
    pub min_k: i64,
    /// Whether |min_k| is a convergent denominator of α.
    pub min_k_is_convergent: bool,
    /// sup over the θ grid of |ψ(θ) − ψ(θ+α) − (φ(θ) − φ̂(0))|.
    pub residual: f64,
    /// Roundoff bound for the residual evaluation.
    pub residual_bound: f64,
}

impl CohomSolution {
    pub fn coefficient(&self, k: i64) -> Complex64 {
        self.psi[(k + self.cutoff as i64) as usize]
    }
}

fn eval_trig(c: &[Complex64], cutoff: i64, x: f64) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for (i, z) in c.iter().enumerate() {
        let k = i as i64 - cutoff;
        let ph = (k as f64 * x).rem_euclid(1.0);
        s += z * Complex64::from_polar(1.0, std::f64::consts::TAU * ph);
    }
    s
}

/// Solves ψ(θ) − ψ(θ+α) = φ(θ) − φ̂(0) mode by mode, ψ̂(k) = φ̂(k)/(1 − e^{2πikα}).
pub fn cohom_solve(phi: &[Complex64], alpha: &ContinuedFraction, grid: usize) -> Result<CohomSolution, CertifyError> {
    if phi.len().is_multiple_of(2) || phi.len() < 3 {
        return Err(CertifyError::InvalidParameter("need coefficients for k = −K..=K with K ≥ 1".into()));
    }
    let cutoff = phi.len() / 2;
    let kc = cutoff as i64;
    let eps = f64::EPSILON;
    let mut psi = vec![Complex64::new(0.0, 0.0); phi.len()];
    let mut min_denominator = f64::INFINITY;
    let mut min_k = 0;
    let enc = alpha.enclosure_beyond(&(Integer::from(cutoff) << 80u32), 1 << 14)?;
    // k in the order 1, −1, 2, −2, ... so the first underflow is the smallest |k|
    for kabs in 1..=kc {
        for k in [kabs, -kabs] {
            let d = cf_engine::torus_distance(&Integer::from(k), alpha)?;
            let dist = d.value();
            // signed x = kα − round(kα), with the sign from a fine enclosure
            let kx = enc.mid() * Integer::from(k);
            let (_, r) = kx.clone().fract_round(Integer::new());
            let x = if (kx - r) < 0 { -dist } else { dist };
            let magnitude = 2.0 * (std::f64::consts::PI * dist).sin();
            if magnitude < eps {
                return Err(CertifyError::DenominatorUnderflow { k, magnitude });
            }
            if magnitude < min_denominator {
                min_denominator = magnitude;
                min_k = k;
            }
            // 1 − e^{2πix} = −2i sin(πx) e^{iπx}
            let den = Complex64::new(0.0, -2.0 * (std::f64::consts::PI * x).sin())
                * Complex64::from_polar(1.0, std::f64::consts::PI * x);
            psi[(k + kc) as usize] = phi[(k + kc) as usize] / den;
        }
    }
    let a = alpha.to_f64();
    let mut phi0 = phi.to_vec();
    phi0[cutoff] = Complex64::new(0.0, 0.0);
    let grid = grid.max(1);
    let residual = (0..grid)
        .into_par_iter()
        .map(|j| {
            let t = j as f64 / grid as f64;
            (eval_trig(&psi, kc, t) - eval_trig(&psi, kc, t + a) - eval_trig(&phi0, kc, t)).norm()
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(0.0, f64::max);
    // each of the 3(2K+1) terms carries a few ulps of phase and product error,
    // phases of large k lose another k·u from the rounded α
    let mass: f64 = psi.iter().map(|z| z.norm()).sum::<f64>() * 2.0 + phi0.iter().map(|z| z.norm()).sum::<f64>();
    let residual_bound = mass * eps * (16.0 + 8.0 * kc as f64);
    let convergents = cf_engine::convergents(alpha, 64).unwrap_or_default();
    let min_k_is_convergent = convergents.iter().any(|c| c.q == min_k.unsigned_abs());
    Ok(CohomSolution {
        cutoff,
        phi: phi.to_vec(),
        psi,
        min_denominator,
        min_k,
        min_k_is_convergent,
        residual,
        residual_bound,
    })
}

// ---------------------------------------------------------------------------
// Rotation number slope

pub const DRHO_BOUND: f64 = -1.0 / (4.0 * std::f64::consts::PI);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DrhoPoint {
    pub energy: f64,
    pub rho: f64,
    pub error: f64,
    /// Centred difference, for interior points.
    pub slope: Option<f64>,
    /// ρ drops across the neighbours by more than their error bars.
    pub strictly_monotone: bool,
    /// slope ≤ −1/(4π) + slack, for strictly monotone interior points.
    pub bound_ok: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DrhoReport {
    pub lambda: f64,
    pub dual_coupling: f64,
    pub slack: f64,
    pub points: Vec<DrhoPoint>,
    /// Neighbouring pairs where ρ increases beyond the error bars.
    pub monotonicity_violations: usize,
    pub checked: usize,
    pub passed: usize,
}

impl DrhoReport {
    pub fn pass_fraction(&self) -> f64 {
        if self.checked == 0 {
            0.0
        } else {
            self.passed as f64 / self.checked as f64
        }
    }
}

/// Rotation numbers of the dual cocycle (coupling 1/λ) on an energy grid and
/// their centred differences against −1/(4π).
pub fn rotation_derivative_check(
    lambda: f64,
    alpha: f64,
    energies: &[f64],
    steps: u64,
    tolerance: f64,
    slack: f64,
) -> Result<DrhoReport, CertifyError> {
    if !(lambda > 1.0) {
        return Err(CertifyError::InvalidParameter("need λ > 1".into()));
    }
    if energies.len() < 3 || energies.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(CertifyError::InvalidParameter("need ≥ 3 strictly increasing energies".into()));
    }
    let dual = 1.0 / lambda;
    // roundoff carried by the accumulated angle; the window disagreement
    // vanishes on plateaus and cannot be trusted below this
    let floor = steps as f64 * f64::EPSILON;
    let rhos: Vec<Result<cocycle::RotationEstimate, CocycleError>> = energies
        .par_iter()
        .map(|&e| {
            cocycle::rotation_number_checked(
                &CocycleParams::new(dual, alpha, e, 0.0),
                steps,
                Averaging::Weighted,
                tolerance,
            )
        })
        .collect();
    let rhos = rhos.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut points: Vec<DrhoPoint> = energies
        .iter()
        .zip(&rhos)
        .map(|(&e, r)| DrhoPoint {
            energy: e,
            rho: r.value,
            error: r.error.max(floor),
            slope: None,
            strictly_monotone: false,
            bound_ok: None,
        })
        .collect();
    let mut violations = 0;
    for w in points.windows(2) {
        if w[1].rho > w[0].rho + w[0].error + w[1].error {
            violations += 1;
        }
    }
    let (mut checked, mut passed) = (0, 0);
    for i in 1..points.len() - 1 {
        let (l, r) = (&points[i - 1], &points[i + 1]);
        let slope = (r.rho - l.rho) / (r.energy - l.energy);
        let strict = l.rho - r.rho > l.error + r.error;
        let ok = strict.then_some(slope <= DRHO_BOUND + slack);
        if strict {
            checked += 1;
            if ok == Some(true) {
                passed += 1;
            }
        }
        points[i].slope = Some(slope);
        points[i].strictly_monotone = strict;
        points[i].bound_ok = ok;
    }
    Ok(DrhoReport { lambda, dual_coupling: dual, slack, points, monotonicity_violations: violations, checked, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: f64 = 0.618_033_988_749_894_9;

    #[test]
    fn badness_n1_is_at_least_one() {
        for &(l, e, t) in &[(2.0, 0.3, 0.1), (0.5, -1.0, 0.7), (3.0, 5.0, 0.0)] {
            let f = badness_form(&CocycleParams::new(l, GOLDEN, e, t), 1).unwrap();
            assert!(f.lambda_min >= 1.0 - 1e-14);
        }
    }

    #[test]
    fn badness_det_matches_direct_sum() {
        let p = CocycleParams::new(1.2, GOLDEN, 0.4, 0.3);
        let f = badness_form(&p, 5).unwrap();
        let d = f.g[0][0] * f.g[1][1] - f.g[0][1] * f.g[1][0];
        assert!((f.det / d - 1.0).abs() < 1e-10);
    }

    #[test]
    fn badness_profile_monotone() {
        let p = CocycleParams::new(2.0, GOLDEN, 0.7, 0.2);
        let prof = badness_profile(&p, 60).unwrap();
        for w in prof.windows(2) {
            assert!(w[1].lambda_min >= w[0].lambda_min);
        }
    }

    #[test]
    fn hami_identity_example() {
        let m = Sl2::new(2.0, 1.0, 1.0, 1.0);
        assert_eq!(hami_residual(&m), 0.0);
    }

    #[test]
    fn gordon_dichotomy() {
        let p = CocycleParams::new(1.5, GOLDEN, 0.2, 0.33);
        for j in 0..50 {
            let a = j as f64 * 0.1;
            let r = gordon_test(&p, 13, (a.cos(), a.sin()), None).unwrap();
            if r.case == GordonCase::TraceAtLeastOne {
                assert!(r.dichotomy_max() >= 0.5 - 1e-9);
            }
        }
    }

    #[test]
    fn cohom_cosine() {
        let phi = vec![Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)];
        let s = cohom_solve(&phi, &ContinuedFraction::golden(), 256).unwrap();
        let expect = Complex64::new(0.5, 0.0)
            / (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, std::f64::consts::TAU * GOLDEN));
        assert!((s.coefficient(1) - expect).norm() < 1e-14);
        assert!(s.residual <= 1e-10 && s.residual <= s.residual_bound);
        assert_eq!(s.coefficient(0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn cohom_constant_gives_zero() {
        let phi = vec![Complex64::new(0.0, 0.0), Complex64::new(3.0, 0.0), Complex64::new(0.0, 0.0)];
        let s = cohom_solve(&phi, &ContinuedFraction::golden(), 64).unwrap();
        assert!(s.psi.iter().all(|z| z.norm() == 0.0));
        assert_eq!(s.residual, 0.0);
    }

    #[test]
    fn decay_refuses_zero_phase() {
        let r = decay_rate(2.0, &ContinuedFraction::golden(), 0.0, 100, 1, &DecayOptions::default());
        assert!(matches!(r, Err(CertifyError::PhaseNotDiophantine { m: 0, .. })));
    }

    #[test]
    fn decay_small_truncation() {
        let r = decay_rate(3.0, &ContinuedFraction::golden(), 0.2, 200, 3, &DecayOptions::default()).unwrap();
        for f in &r.fits {
            assert!((f.rate + 3f64.ln()).abs() < 0.15 * 3f64.ln(), "{f:?}");
        }
    }
}
