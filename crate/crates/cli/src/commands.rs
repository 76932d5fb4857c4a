use amo_core::certify::{self, BadnessScanOptions, DecayOptions};
use amo_core::cf_engine::{self, ContinuedFraction, Enclosure};
use amo_core::cocycle::{self, Averaging, CocycleParams};
use amo_core::freq_synth::{self, FrequencySpec, ScheduleOptions};
use amo_core::real::{BigReal, Precision, Real};
use amo_core::spectrum::{self, SpectrumApprox, SpectrumOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::{Float, Integer, Rational};
use serde_json::{json, Value};

use crate::config::*;
use crate::{Attachment, CliError, Outcome, RunConfig, Status, Table};

pub fn dispatch(config: &RunConfig) -> Result<Outcome, CliError> {
    let precision = config.precision()?;
    match &config.command {
        Command::Cf(a) => cf(a),
        Command::Synth(a) => synth(a),
        Command::Spectrum(a) => spectrum_cmd(a),
        Command::Lyapunov(a) => lyapunov(a, precision),
        Command::Rotation(a) => rotation(a, precision),
        Command::Telescope(a) => telescope(a),
        Command::Badness(a) => badness(a, precision),
        Command::Gordon(a) => gordon(a, config.seed),
        Command::Decay(a) => decay(a),
        Command::Cohom(a) => cohom(a),
        Command::Drho(a) => drho(a),
    }
}

fn ok(result: Value, tables: Vec<Table>) -> Result<Outcome, CliError> {
    Ok(Outcome { status: Status::Ok, result, tables, attachments: Vec::new() })
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("results serialize")
}

fn s<T: ToString>(x: T) -> String {
    x.to_string()
}

/// ln of a positive integer of any size.
fn ln_int(q: &Integer) -> f64 {
    Float::with_val(128, q).ln().to_f64()
}

fn parse_rational(field: &str, x: &str) -> Result<Rational, CliError> {
    if let Ok(r) = x.parse::<Rational>() {
        return Ok(r);
    }
    let f: f64 = x
        .parse()
        .map_err(|_| CliError::ConfigInvalid { field: field.into(), message: format!("not a number: `{x}`") })?;
    Rational::from_f64(f)
        .ok_or_else(|| CliError::ConfigInvalid { field: field.into(), message: format!("not finite: `{x}`") })
}

// ---------------------------------------------------------------------------

fn cf(a: &CfArgs) -> Result<Outcome, CliError> {
    let alpha = parse_alpha(&a.alpha)?;
    let err = |e: cf_engine::CfError| CliError::compute("cf", e);
    match a.action {
        CfAction::Expand => {
            let cf = match &a.x {
                Some(x) => cf_engine::expand(&Enclosure::point(parse_rational("x", x)?), a.terms).map_err(err)?,
                None => alpha,
            };
            let q = cf.explicit(a.terms).map_err(err)?;
            let mut t = Table::new("quotients", vec!["k", "a_k"]);
            for (i, v) in q.iter().enumerate() {
                t.push([s(i + 1), s(v)]);
            }
            let quotients: Vec<String> = q.iter().map(s).collect();
            ok(json!({ "quotients": quotients, "terminates": cf.is_rational() }), vec![t])
        }
        CfAction::Convergents => {
            let q = alpha.explicit(a.terms).map_err(err)?;
            let c = cf_engine::convergents_of(&q);
            let mut t = Table::new("convergents", vec!["k", "a_k", "p", "q"]);
            for conv in &c {
                let ak = if conv.k == 0 { String::new() } else { s(&q[conv.k - 1]) };
                t.push([s(conv.k), ak, s(&conv.p), s(&conv.q)]);
            }
            let last = c.last().expect("k = 0 is always present");
            ok(json!({ "count": c.len(), "p": s(&last.p), "q": s(&last.q) }), vec![t])
        }
        CfAction::Beta => {
            let b = match a.horizon {
                Some(h) => cf_engine::beta_estimate_to(&alpha, a.stage, h),
                None => cf_engine::beta_estimate(&alpha, a.stage),
            }
            .map_err(err)?;
            let mut t = Table::new("beta", vec!["k", "ln_q_next_over_q"]);
            for (k, v) in &b.window {
                t.push([s(k), s(v)]);
            }
            ok(to_value(&b), vec![t])
        }
        CfAction::Dc => {
            let phase = parse_rational("phase", &a.phase)?;
            let cert = cf_engine::dc_phase_check(&Enclosure::point(phase), &alpha, a.gamma, a.tau, a.cutoff);
            let status = if cert.passed() { Status::Ok } else { Status::Refuted };
            Ok(Outcome { status, result: to_value(&cert), tables: Vec::new(), attachments: Vec::new() })
        }
    }
}

fn synth(a: &SynthArgs) -> Result<Outcome, CliError> {
    let base = parse_alpha(&a.base)?;
    let opts = ScheduleOptions { digit_budget: a.digit_budget, max_insertions: a.max_insertions };
    let indices = (!a.indices.is_empty()).then_some(a.indices.as_slice());
    let spec = match a.construction {
        SynthKind::ConstructPrime => freq_synth::construct_prime(&base, a.eps, a.beta, a.k, opts),
        SynthKind::ScLadder => freq_synth::sc_ladder(&base, a.lambda.ln(), a.eps, a.stages, indices, &[], opts),
        SynthKind::PpLadder => {
            freq_synth::pp_ladder(&base, a.lambda.ln(), a.delta0, a.stages, a.n0, a.eps, indices, opts)
        }
    }
    .map_err(|e| CliError::compute("synth", e))?;
    let mut t = Table::new("schedule", vec!["index", "stage", "beta", "q", "digits", "quotient", "deviation"]);
    for e in &spec.schedule {
        let (digits, quotient) = match &e.quotient {
            Some(v) => (s(v.to_string().len()), s(v)),
            None => (String::new(), "symbolic".into()),
        };
        t.push([s(e.index), s(e.stage), s(e.beta), s(&e.q), digits, quotient, e.deviation.map(s).unwrap_or_default()]);
    }
    let result = synth_summary(&spec);
    Ok(Outcome {
        status: Status::Ok,
        result,
        tables: vec![t],
        attachments: vec![Attachment { file_name: "frequency.json".into(), value: to_value(&spec) }],
    })
}

/// Schedule view without the (possibly enormous) quotient digits.
fn synth_summary(spec: &FrequencySpec) -> Value {
    let entries: Vec<Value> = spec
        .schedule
        .iter()
        .map(|e| {
            let quotient = match &e.quotient {
                Some(v) if v.significant_bits() <= 64 => json!(s(v)),
                Some(v) => {
                    let d = v.to_string();
                    json!({ "digits": d.len(), "leading": &d[..20], "trailing": &d[d.len() - 20..] })
                }
                None => json!("symbolic"),
            };
            json!({ "index": e.index, "stage": e.stage, "beta": e.beta, "q": s(&e.q), "quotient": quotient, "deviation": e.deviation })
        })
        .collect();
    json!({
        "construction": to_value(&spec.construction),
        "target_beta": spec.target_beta,
        "stage_count": spec.stage_count,
        "prefix_len": spec.prefix.len(),
        "schedule": entries,
        "stages": to_value(&spec.stages),
        "frequency_file": "frequency.json",
    })
}

fn spectrum_cmd(a: &SpectrumArgs) -> Result<Outcome, CliError> {
    let opts = SpectrumOptions { theta_grid: a.theta_grid, fattening: a.fattening };
    let sp = spectrum::spectrum_approx(a.lambda, a.p, a.q, &opts).map_err(|e| CliError::compute("spectrum", e))?;
    let mut t = Table::new("bands", vec!["lo", "hi"]);
    for (lo, hi) in &sp.bands {
        t.push([s(lo), s(hi)]);
    }
    ok(
        json!({
            "lambda": sp.lambda, "p": a.p, "q": a.q, "band_count": sp.bands.len(), "raw_band_count": sp.raw_bands.len(),
            "measure": sp.measure(), "fattening": sp.fattening, "theta_grid": sp.theta_grid,
        }),
        vec![t],
    )
}

fn approximant(
    lambda: f64,
    alpha: &ContinuedFraction,
    q_max: u64,
    theta_grid: usize,
) -> Result<SpectrumApprox, CliError> {
    let (p, q) = convergent_below(alpha, q_max)?;
    spectrum::spectrum_approx(lambda, p, q, &SpectrumOptions { theta_grid, fattening: None })
        .map_err(|e| CliError::compute("spectrum", e))
}

/// Resolves an energy grid; `bands:n` spreads n raw-band midpoints.
fn energies(grid: &str, lambda: f64, alpha: &ContinuedFraction, q_max: u64) -> Result<Vec<f64>, CliError> {
    match EnergyGrid::parse(grid)? {
        EnergyGrid::Explicit(v) => Ok(v),
        EnergyGrid::Bands(n) => {
            let sp = approximant(lambda, alpha, q_max, 8)?;
            let mids = sp.sample_energies(1);
            Ok(if n == 1 {
                vec![mids[mids.len() / 2]]
            } else {
                (0..n).map(|i| mids[i * (mids.len() - 1) / (n - 1)]).collect()
            })
        }
    }
}

fn alpha_f64(alpha: &ContinuedFraction) -> Result<f64, CliError> {
    let enc =
        alpha.enclosure_beyond(&(Integer::from(1) << 40u32), 1 << 12).map_err(|e| CliError::compute("alpha", e))?;
    Ok(enc.mid_f64())
}

fn alpha_big(alpha: &ContinuedFraction, bits: u32) -> Result<BigReal, CliError> {
    let enc = alpha
        .enclosure_beyond(&(Integer::from(1) << (bits / 2 + 8)), 1 << 14)
        .map_err(|e| CliError::compute("alpha", e))?;
    Ok(BigReal::from_rational(&enc.mid(), bits))
}

fn params<R: Real>(lift: &impl Fn(f64) -> R, lambda: f64, alpha: &R, e: f64, theta: f64) -> CocycleParams<R> {
    CocycleParams { lambda: lift(lambda), alpha: alpha.clone(), energy: lift(e), theta: lift(theta) }
}

fn lyapunov(a: &LyapunovArgs, precision: Precision) -> Result<Outcome, CliError> {
    let alpha = parse_alpha(&a.alpha)?;
    let es = energies(&a.energies, a.lambda, &alpha, a.spectrum_q_max)?;
    let rows: Vec<(f64, f64, f64)> = match precision {
        Precision::Double => {
            let al = alpha_f64(&alpha)?;
            lyap_rows(&es, &|x| x, a, &al)?
        }
        p => {
            let bits = p.bits();
            let al = alpha_big(&alpha, bits)?;
            lyap_rows(&es, &|x| BigReal::new(x, bits), a, &al)?
        }
    };
    let mut t = Table::new("lyapunov", vec!["energy", "value", "spread"]);
    for (e, v, sp) in &rows {
        t.push([s(e), s(v), s(sp)]);
    }
    let max_dev = rows.iter().map(|r| (r.1 - a.lambda.ln().max(0.0)).abs()).fold(0.0, f64::max);
    ok(
        json!({
            "lambda": a.lambda, "steps": a.steps, "theta_samples": a.theta_samples,
            "estimates": rows.iter().map(|r| json!({"energy": r.0, "value": r.1, "spread": r.2})).collect::<Vec<_>>(),
            "max_deviation_from_ln_lambda": max_dev,
        }),
        vec![t],
    )
}

fn lyap_rows<R: Real>(
    es: &[f64],
    lift: &impl Fn(f64) -> R,
    a: &LyapunovArgs,
    alpha: &R,
) -> Result<Vec<(f64, f64, f64)>, CliError> {
    es.iter()
        .map(|&e| {
            let est = cocycle::lyapunov(&params(lift, a.lambda, alpha, e, 0.0), a.steps, a.theta_samples)
                .map_err(|x| CliError::compute("lyapunov", x))?;
            Ok((e, est.value, est.spread))
        })
        .collect()
}

fn rotation(a: &RotationArgs, precision: Precision) -> Result<Outcome, CliError> {
    let alpha = parse_alpha(&a.alpha)?;
    let es = energies(&a.energies, a.lambda, &alpha, a.spectrum_q_max)?;
    let averaging = match a.averaging {
        AveragingArg::Plain => Averaging::Plain,
        AveragingArg::Weighted => Averaging::Weighted,
    };
    let rows: Vec<(f64, f64, f64)> = match precision {
        Precision::Double => {
            let al = alpha_f64(&alpha)?;
            rot_rows(&es, &|x| x, a, &al, averaging)?
        }
        p => {
            let bits = p.bits();
            let al = alpha_big(&alpha, bits)?;
            rot_rows(&es, &|x| BigReal::new(x, bits), a, &al, averaging)?
        }
    };
    let mut t = Table::new("rotation", vec!["theta", "energy", "rho", "error"]);
    for (e, r, err) in &rows {
        t.push([s(a.theta), s(e), s(r), s(err)]);
    }
    ok(json!({ "lambda": a.lambda, "steps": a.steps, "points": rows.len() }), vec![t])
}

fn rot_rows<R: Real>(
    es: &[f64],
    lift: &(impl Fn(f64) -> R + Sync),
    a: &RotationArgs,
    alpha: &R,
    averaging: Averaging,
) -> Result<Vec<(f64, f64, f64)>, CliError> {
    es.par_iter()
        .map(|&e| {
            let r = cocycle::rotation_number(&params(lift, a.lambda, alpha, e, a.theta), a.steps, averaging)
                .map_err(|x| CliError::compute("rotation", x))?;
            Ok((e, r.value, r.error))
        })
        .collect()
}

/// q_n, ln q_{n+1}/q_n and the exact rational standing in for α.
fn stage_data(
    alpha: &ContinuedFraction,
    index: usize,
    exact_depth: usize,
) -> Result<(Integer, f64, Rational), CliError> {
    if exact_depth <= index + 1 {
        return Err(CliError::ConfigInvalid { field: "exact-depth".into(), message: "must exceed index + 1".into() });
    }
    let (_, q) = convergent_at(alpha, index)?;
    let (_, q_next) = convergent_at(alpha, index + 1)?;
    let (p_ex, q_ex) = convergent_at(alpha, exact_depth)?;
    if q_next == q {
        return Err(CliError::ConfigInvalid {
            field: "index".into(),
            message: "the expansion ends before q_{n+1}".into(),
        });
    }
    let beta = ln_int(&q_next) / q.to_f64();
    Ok((q, beta, Rational::from((p_ex, q_ex))))
}

fn telescope(a: &TelescopeArgs) -> Result<Outcome, CliError> {
    let alpha = parse_alpha(&a.alpha)?;
    let (q, beta, exact) = stage_data(&alpha, a.index, a.exact_depth)?;
    let es = energies(&a.energies, a.lambda, &alpha, a.spectrum_q_max)?;
    let grid = theta_grid(a.theta_grid);
    let mut t = Table::new("telescope", vec!["theta", "energy", "ln_gap_plus", "ln_gap_minus"]);
    let mut per_energy = Vec::new();
    let mut sup = f64::NEG_INFINITY;
    for &e in &es {
        let g = cocycle::telescoping_gap(a.lambda, &exact, e, &q, &grid, a.max_relative_error)
            .map_err(|x| CliError::compute("telescope", x))?;
        for (th, p, m) in &g.per_theta {
            t.push([s(th), s(e), s(p), s(m)]);
        }
        let m = g.ln_gap_plus.max(g.ln_gap_minus);
        sup = sup.max(m);
        per_energy.push(json!({ "energy": e, "ln_gap_plus": g.ln_gap_plus, "ln_gap_minus": g.ln_gap_minus }));
    }
    let ln_lambda = a.lambda.ln();
    let qf = q.to_f64();
    let ln_bound = -(beta - ln_lambda - 0.1) * qf;
    let applies = ln_lambda <= beta - 0.2;
    let holds = sup <= ln_bound;
    let status = if applies && !holds { Status::Refuted } else { Status::Ok };
    Ok(Outcome {
        status,
        result: json!({
            "q": s(&q), "beta_n": beta, "ln_lambda": ln_lambda, "energies": per_energy,
            "sup_ln_gap": finite_or_null(sup), "predicted_ln_bound": ln_bound,
            "bound_applies": applies, "bound_holds": holds,
        }),
        tables: vec![t],
        attachments: Vec::new(),
    })
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn badness(a: &BadnessArgs, precision: Precision) -> Result<Outcome, CliError> {
    let alpha = parse_alpha(&a.alpha)?;
    let sp = approximant(a.lambda, &alpha, a.spectrum_q_max, a.spectrum_theta_grid)?;
    let opts = BadnessScanOptions {
        c: a.c,
        n: a.n,
        theta_grid: theta_grid(a.theta_grid),
        energies_per_band: a.energies_per_band,
        precision,
        witness_search: a.witness_search,
        search_margin: a.search_margin,
    };
    let cert = certify::badness_scan(a.lambda, &alpha, &sp, &opts).map_err(|e| CliError::compute("badness", e))?;
    let status = if cert.certified() { Status::Ok } else { Status::Refuted };
    let mut result = to_value(&cert);
    result["spectrum"] = json!({ "p": sp.p.to_string(), "q": sp.q.to_string(), "bands": sp.bands.len() });
    Ok(Outcome { status, result, tables: Vec::new(), attachments: Vec::new() })
}

/// Slack on the 1/4 bound and on the dichotomy bound 1/2.
const GORDON_SLACK: f64 = 1e-6;
const DICHOTOMY_SLACK: f64 = 1e-9;

fn gordon(a: &GordonArgs, seed: u64) -> Result<Outcome, CliError> {
    let alpha = parse_alpha(&a.alpha)?;
    let (q, beta, exact) = stage_data(&alpha, a.index, a.exact_depth)?;
    let qi = q.to_i64().filter(|&v| v <= 10_000_000).ok_or_else(|| CliError::ConfigInvalid {
        field: "index".into(),
        message: format!("q_n = {q} is past the step budget"),
    })?;
    let lambda = a.lambda.unwrap_or((beta / 2.0).exp());
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(CliError::ConfigInvalid { field: "lambda".into(), message: format!("bad coupling {lambda}") });
    }
    let af = exact.to_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let range = 2.0 + 2.0 * lambda;
    let samples: Vec<(f64, f64, f64)> = (0..a.samples)
        .map(|_| (rng.gen_range(0.0..1.0), rng.gen_range(-range..range), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    let exact_ref = (!a.no_hypotheses).then_some(&exact);
    let reports: Vec<certify::GordonReport> = samples
        .par_iter()
        .map(|&(th, e, ang)| {
            certify::gordon_test(&CocycleParams::new(lambda, af, e, th), qi, (ang.cos(), ang.sin()), exact_ref)
                .map_err(|x| CliError::compute("gordon", x))
        })
        .collect::<Result<_, _>>()?;
    let mut t = Table::new(
        "gordon",
        vec![
            "theta",
            "energy",
            "u1",
            "u0",
            "ln_norm_plus",
            "ln_norm_minus",
            "ln_norm_double",
            "ln_norm_inverse",
            "trace_sign",
            "ln_abs_trace",
            "case",
            "gap_plus",
            "gap_minus",
            "hypotheses_hold",
        ],
    );
    let (mut held, mut gordon_violations, mut dichotomy_violations) = (0usize, 0usize, 0usize);
    let mut min_ln_max = f64::INFINITY;
    for (r, &(_, _, ang)) in reports.iter().zip(&samples) {
        let case = match r.case {
            certify::GordonCase::TraceAtLeastOne => "trace-at-least-one",
            certify::GordonCase::TraceBelowOne => "trace-below-one",
        };
        let (gp, gm) = r.telescoping.map(|(x, y)| (s(x), s(y))).unwrap_or_default();
        let hyp = r.hypotheses_hold.map(s).unwrap_or_default();
        t.push([
            s(r.theta),
            s(r.energy),
            s(ang.cos()),
            s(ang.sin()),
            s(r.ln_norm_plus),
            s(r.ln_norm_minus),
            s(r.ln_norm_double),
            s(r.ln_norm_inverse),
            s(r.trace_sign),
            s(r.ln_abs_trace),
            case.into(),
            gp,
            gm,
            hyp,
        ]);
        min_ln_max = min_ln_max.min(r.ln_max_norm);
        if r.hypotheses_hold != Some(false) {
            held += usize::from(r.hypotheses_hold == Some(true));
            if r.max_norm() < 0.25 - GORDON_SLACK {
                gordon_violations += 1;
            }
        }
        if r.case == certify::GordonCase::TraceAtLeastOne && r.dichotomy_max() < 0.5 - DICHOTOMY_SLACK {
            dichotomy_violations += 1;
        }
    }
    let status = if gordon_violations + dichotomy_violations > 0 { Status::Refuted } else { Status::Ok };
    Ok(Outcome {
        status,
        result: json!({
            "q": qi, "beta_n": beta, "lambda": lambda, "samples": a.samples,
            "hypotheses_checked": !a.no_hypotheses, "hypotheses_held": held,
            "min_ln_max_norm": min_ln_max, "gordon_violations": gordon_violations,
            "dichotomy_violations": dichotomy_violations,
        }),
        tables: vec![t],
        attachments: Vec::new(),
    })
}

fn decay(a: &DecayArgs) -> Result<Outcome, CliError> {
    let alpha = parse_alpha(&a.alpha)?;
    let opts = DecayOptions {
        gamma: a.gamma,
        tau: a.tau,
        dc_cutoff: a.dc_cutoff,
        boundary_threshold: a.boundary_threshold,
        ..DecayOptions::default()
    };
    let r = certify::decay_rate(a.lambda, &alpha, a.theta, a.half_width, a.count, &opts)
        .map_err(|e| CliError::compute("decay", e))?;
    let mut t = Table::new("decay", vec!["energy", "center", "ipr", "rate", "residual", "boundary_mass", "fit_points"]);
    for f in &r.fits {
        t.push([s(f.energy), s(f.center), s(f.ipr), s(f.rate), s(f.residual), s(f.boundary_mass), s(f.fit_points)]);
    }
    let target = -a.lambda.ln();
    let worst = r.fits.iter().map(|f| ((f.rate - target) / target).abs()).fold(0.0, f64::max);
    let mut result = to_value(&r);
    result["max_relative_deviation"] = json!(worst);
    ok(result, vec![t])
}

fn cohom(a: &CohomArgs) -> Result<Outcome, CliError> {
    let alpha = parse_alpha(&a.alpha)?;
    let phi = a.coefficients()?;
    let sol = certify::cohom_solve(&phi, &alpha, a.grid).map_err(|e| CliError::compute("cohom", e))?;
    let mut t = Table::new("cohom", vec!["k", "phi_re", "phi_im", "psi_re", "psi_im"]);
    let k0 = sol.cutoff as i64;
    for (i, (p, q)) in sol.phi.iter().zip(&sol.psi).enumerate() {
        t.push([s(i as i64 - k0), s(p.re), s(p.im), s(q.re), s(q.im)]);
    }
    ok(
        json!({
            "cutoff": sol.cutoff, "min_denominator": sol.min_denominator, "min_k": sol.min_k,
            "min_k_is_convergent": sol.min_k_is_convergent, "residual": sol.residual, "residual_bound": sol.residual_bound,
        }),
        vec![t],
    )
}

fn drho(a: &DrhoArgs) -> Result<Outcome, CliError> {
    let alpha = parse_alpha(&a.alpha)?;
    let es = energies(&a.energies, a.lambda, &alpha, 89)?;
    let r = certify::rotation_derivative_check(a.lambda, alpha_f64(&alpha)?, &es, a.steps, a.tolerance, a.slack)
        .map_err(|e| CliError::compute("drho", e))?;
    let mut t = Table::new("drho", vec!["energy", "rho", "error", "slope", "strictly_monotone", "bound_ok"]);
    for p in &r.points {
        t.push([
            s(p.energy),
            s(p.rho),
            s(p.error),
            p.slope.map(s).unwrap_or_default(),
            s(p.strictly_monotone),
            p.bound_ok.map(s).unwrap_or_default(),
        ]);
    }
    let fraction = r.pass_fraction();
    let pass = r.monotonicity_violations == 0 && fraction >= a.required_fraction;
    ok(
        json!({
            "lambda": r.lambda, "dual_coupling": r.dual_coupling, "bound": certify::DRHO_BOUND, "slack": r.slack,
            "monotonicity_violations": r.monotonicity_violations, "checked": r.checked, "passed": r.passed,
            "pass_fraction": fraction, "required_fraction": a.required_fraction,
        }),
        vec![t],
    )
    .map(|mut o| {
        if !pass {
            o.status = Status::Refuted;
        }
        o
    })
}
