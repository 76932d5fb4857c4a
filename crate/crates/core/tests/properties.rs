use amo_core::certify::{self, BadnessScanOptions, GordonCase};
use amo_core::cf_engine::{self, ContinuedFraction, DcVerdict, Enclosure};
use amo_core::cocycle::{self, CocycleParams, KanProduct, Sl2};
use amo_core::freq_synth::rounded_exp;
use amo_core::spectrum::{self, SpectrumOptions};
use num_complex::Complex64;
use proptest::prelude::*;
use rug::{Float, Integer, Rational};

const GOLDEN: f64 = 0.618_033_988_749_894_9;

fn quotients() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(prop_oneof![1u32..5, 1u32..1000], 1..50)
}

fn unit(angle: f64) -> (f64, f64) {
    (angle.cos(), angle.sin())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn convergent_recursion_and_determinant(a in quotients()) {
        let a: Vec<Integer> = a.into_iter().map(Integer::from).collect();
        let c = cf_engine::convergents_of(&a);
        for k in 1..c.len() {
            let det = Integer::from(&c[k].p * &c[k - 1].q) - Integer::from(&c[k - 1].p * &c[k].q);
            let expect = if k % 2 == 1 { 1 } else { -1 };
            prop_assert_eq!(det, expect);
            prop_assert_eq!(c[k].p.clone().gcd(&c[k].q), 1);
            if k >= 2 {
                prop_assert!(c[k].q > c[k - 1].q);
                let q = Integer::from(&a[k - 1] * &c[k - 1].q) + &c[k - 2].q;
                prop_assert_eq!(&c[k].q, &q);
            }
        }
    }

    #[test]
    fn finite_expansion_value_in_unit_interval(a in quotients()) {
        let cf = ContinuedFraction::finite(a.iter().map(|&x| Integer::from(x))).unwrap();
        let enc = cf.enclosure(a.len()).unwrap();
        prop_assert!(enc.is_point());
        let x = enc.mid();
        prop_assert!(x > 0 && x <= 1);
        let c = cf_engine::convergents_of(&cf.explicit(a.len()).unwrap());
        let last = c.last().unwrap();
        prop_assert_eq!(x, Rational::from((last.p.clone(), last.q.clone())));
    }

    #[test]
    fn beta_estimate_nonincreasing(a in prop::collection::vec(1u32..100_000, 6..30)) {
        let cf = ContinuedFraction::eventually_one(a.iter().copied());
        let mut prev = f64::INFINITY;
        for m in 0..a.len() {
            let b = cf_engine::beta_estimate_to(&cf, m, a.len() + 4).unwrap();
            prop_assert!(b.value >= 0.0);
            prop_assert!(b.value <= prev);
            prev = b.value;
        }
    }

    #[test]
    fn torus_distance_bracket_is_consistent(a in prop::collection::vec(1u32..50, 3..20), k in 1i64..5000) {
        let cf = ContinuedFraction::eventually_one(a.iter().copied());
        let d = cf_engine::torus_distance(&Integer::from(k), &cf).unwrap();
        prop_assert!(d.lo <= d.hi);
        let x = cf.to_f64() * k as f64;
        let approx = (x - x.round()).abs();
        prop_assert!((d.value() - approx).abs() < 1e-9);
    }

    #[test]
    fn dc_failure_is_reproducible(num in 0i64..997, a in prop::collection::vec(1u32..20, 2..12)) {
        let cf = ContinuedFraction::finite(a.iter().map(|&x| Integer::from(x))).unwrap();
        let phi = Rational::from((num, 997));
        let cert = cf_engine::dc_phase_check(&Enclosure::point(phi.clone()), &cf, 0.2, 1.5, 60);
        if let DcVerdict::FailWithWitness { m, certain: true } = cert.verdict {
            let alpha = cf.enclosure(a.len()).unwrap().mid();
            let x: Rational = Rational::from(&phi * 2u32) - Rational::from(&alpha * m);
            let d = cf_engine::norm(&x);
            let threshold = Float::with_val(256, rug::ops::Pow::pow(Float::with_val(256, (m.abs() + 1) as f64), -1.5f64)) * 0.2f64;
            prop_assert!(Float::with_val(256, &d) < threshold);
        }
    }

    #[test]
    fn rounded_exp_is_nearest_integer(beta in 0.01f64..3.0, q in 1u32..200) {
        let q = Integer::from(q);
        let a = rounded_exp(beta, &q, 1_000_000).unwrap();
        let exact = (Float::with_val(4096, beta) * Float::with_val(4096, &q)).exp();
        let diff = Float::with_val(4096, &exact - &a).abs();
        prop_assert!(a >= 1);
        prop_assert!(diff <= 0.5 || a == 1);
        let qf = q.to_f64();
        let back = Float::with_val(128, &a).ln().to_f64() / qf;
        prop_assert!((back - beta).abs() <= 1.0 / qf);
    }

    #[test]
    fn cocycle_identity(lambda in 0.2f64..3.0, e in -4.0f64..4.0, theta in 0.0f64..1.0, m in 0i64..300, n in 0i64..300) {
        let p = CocycleParams::new(lambda, GOLDEN, e, theta);
        let whole = cocycle::product(&p, m + n);
        let first = cocycle::product(&p, n);
        let second = cocycle::product(&p.with_theta(p.phase(n)), m);
        let joined = second.compose(&first);
        let (a, sa) = whole.scaled();
        let (b, sb) = joined.scaled();
        let scale = (sb - sa).exp();
        let diff = a.sub(&Sl2::new(b.a * scale, b.b * scale, b.c * scale, b.d * scale));
        let cond = (2.0 * sa).exp().max(1.0);
        prop_assert!(diff.max_abs_entry() <= 1e-8 * a.max_abs_entry().max(1.0) * cond.min(1e6), "{diff:?}");
    }

    #[test]
    fn products_keep_unit_determinant(lambda in 0.2f64..3.0, e in -4.0f64..4.0, k in -2000i64..2000) {
        let p = CocycleParams::new(lambda, GOLDEN, e, 0.3);
        let m = cocycle::product(&p, k);
        prop_assert!((m.det() - 1.0).abs() <= 10.0 * f64::EPSILON);
    }

    #[test]
    fn badness_normalization_and_monotonicity(lambda in 0.2f64..3.0, e in -4.0f64..4.0, theta in 0.0f64..1.0) {
        let p = CocycleParams::new(lambda, GOLDEN, e, theta);
        let prof = certify::badness_profile(&p, 40).unwrap();
        prop_assert_eq!(prof[0].lambda_min, 0.0);
        prop_assert!(prof[1].lambda_min >= 1.0 - 1e-12);
        for w in prof.windows(2) {
            prop_assert!(w[1].lambda_min >= w[0].lambda_min);
            prop_assert!(w[1].det >= w[0].det);
        }
    }

    #[test]
    fn badness_is_a_lower_bound(lambda in 0.2f64..3.0, e in -4.0f64..4.0, theta in 0.0f64..1.0, n in 0usize..20, angle in 0.0f64..6.3) {
        let p = CocycleParams::new(lambda, GOLDEN, e, theta);
        let f = certify::badness_form(&p, n).unwrap();
        // direct mass of the solution through (u(1), u(0)) = unit(angle)
        let (u1, u0) = unit(angle);
        let mut mass = u0 * u0;
        let (mut a, mut b) = (u0, u1);
        for k in 1..=n as i64 {
            mass += b * b;
            let next = (e - 2.0 * lambda * (std::f64::consts::TAU * (theta + k as f64 * GOLDEN)).cos()) * b - a;
            a = b;
            b = next;
        }
        let (mut a, mut b) = (u1, u0);
        for k in (-(n as i64) + 1..=0).rev() {
            let prev = (e - 2.0 * lambda * (std::f64::consts::TAU * (theta + k as f64 * GOLDEN)).cos()) * b - a;
            a = b;
            b = prev;
            mass += b * b;
        }
        if n == 0 { mass = u0 * u0; }
        prop_assert!(mass >= f.lambda_min * (1.0 - 1e-9));
        prop_assert!(mass <= f.lambda_max * (1.0 + 1e-9));
    }

    #[test]
    fn gordon_dichotomy_and_case_tag(lambda in 0.3f64..3.0, e in -5.0f64..5.0, theta in 0.0f64..1.0, q in 1i64..150, angle in 0.0f64..6.3) {
        let p = CocycleParams::new(lambda, GOLDEN, e, theta);
        let r = certify::gordon_test(&p, q, unit(angle), None).unwrap();
        for l in [r.ln_norm_plus, r.ln_norm_minus, r.ln_norm_double, r.ln_norm_inverse] {
            prop_assert!(!l.is_nan());
        }
        prop_assert_eq!(r.case == GordonCase::TraceAtLeastOne, r.ln_abs_trace >= 0.0);
        if r.case == GordonCase::TraceAtLeastOne {
            prop_assert!(r.dichotomy_max() >= 0.5 - 1e-9);
        }
    }

    #[test]
    fn hami_identity(a in -30.0f64..30.0, b in -30.0f64..30.0, c in -30.0f64..30.0) {
        prop_assume!(a.abs() > 1e-3);
        let m = Sl2::new(a, b, c, (1.0 + b * c) / a);
        let scale = m.norm().powi(2).max(1.0);
        prop_assert!(certify::hami_residual(&m) <= 1e-12 * scale);
    }

    #[test]
    fn cohom_invariant(coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..33)) {
        let k = coeffs.len();
        let mut phi: Vec<Complex64> = coeffs.iter().rev().map(|&(r, i)| Complex64::new(r, i)).collect();
        phi.push(Complex64::new(0.7, 0.0));
        phi.extend(coeffs.iter().map(|&(r, i)| Complex64::new(r, -i)));
        let s = certify::cohom_solve(&phi, &ContinuedFraction::golden(), 64).unwrap();
        prop_assert_eq!(s.coefficient(0), Complex64::new(0.0, 0.0));
        for j in 1..=k as i64 {
            for kk in [j, -j] {
                let den = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, std::f64::consts::TAU * (kk as f64 * GOLDEN).fract());
                let back = s.coefficient(kk) * den;
                let orig = phi[(kk + k as i64) as usize];
                prop_assert!((back - orig).norm() <= 1e-12 * (1.0 + orig.norm()) * (j as f64));
            }
        }
        prop_assert!(s.residual <= 1e-10);
    }

    #[test]
    fn merged_intervals_are_sorted_and_disjoint(v in prop::collection::vec((-5.0f64..5.0, 0.0f64..1.0), 1..30)) {
        let iv: Vec<(f64, f64)> = v.iter().map(|&(a, w)| (a, a + w)).collect();
        let m = spectrum::merge_intervals(iv.clone(), 0.0);
        for w in m.windows(2) {
            prop_assert!(w[0].1 < w[1].0);
        }
        for &(a, b) in &iv {
            prop_assert!(m.iter().any(|&(x, y)| x <= a && b <= y));
        }
    }

    #[test]
    fn hausdorff_is_a_metric(
        a in prop::collection::vec((-5.0f64..5.0, 0.0f64..1.0), 1..8),
        b in prop::collection::vec((-5.0f64..5.0, 0.0f64..1.0), 1..8),
        c in prop::collection::vec((-5.0f64..5.0, 0.0f64..1.0), 1..8),
    ) {
        let mk = |v: &[(f64, f64)]| spectrum::merge_intervals(v.iter().map(|&(x, w)| (x, x + w)).collect(), 0.0);
        let (a, b, c) = (mk(&a), mk(&b), mk(&c));
        let ab = spectrum::hausdorff_intervals(&a, &b).unwrap();
        prop_assert_eq!(spectrum::hausdorff_intervals(&a, &a).unwrap(), 0.0);
        prop_assert_eq!(ab, spectrum::hausdorff_intervals(&b, &a).unwrap());
        let ac = spectrum::hausdorff_intervals(&a, &c).unwrap();
        let cb = spectrum::hausdorff_intervals(&c, &b).unwrap();
        prop_assert!(ab <= ac + cb + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn bands_inside_gershgorin(lambda in 0.1f64..3.0, pq in prop::sample::select(vec![(1i64, 2i64), (1, 3), (2, 5), (3, 8), (5, 13), (8, 21)])) {
        let s = spectrum::spectrum_approx(lambda, pq.0, pq.1, &SpectrumOptions { theta_grid: 8, fattening: Some(0.0) }).unwrap();
        for w in s.bands.windows(2) {
            prop_assert!(w[0].1 < w[1].0);
        }
        for &(a, b) in &s.bands {
            prop_assert!(a <= b);
            prop_assert!(a >= -2.0 - 2.0 * lambda - 1e-12 && b <= 2.0 + 2.0 * lambda + 1e-12);
        }
    }

    #[test]
    fn scan_certificate_invariants(c in 0.5f64..20.0, n in 0usize..12, lambda in 0.5f64..3.0) {
        let sp = spectrum::spectrum_approx(lambda, 5, 8, &SpectrumOptions::default()).unwrap();
        let mut o = BadnessScanOptions::new(c, n);
        o.theta_grid = vec![0.0, 0.3, 0.6];
        o.energies_per_band = 3;
        let cert = certify::badness_scan(lambda, &ContinuedFraction::golden(), &sp, &o).unwrap();
        prop_assert!(cert.min_value >= 0.0);
        prop_assert_eq!(cert.certified(), cert.min_value >= c * c);
        if !cert.certified() {
            prop_assert!(cert.witness.is_some());
        }
    }
}

#[test]
fn c1_n1_always_certified() {
    let sp = spectrum::spectrum_approx(2.0, 8, 13, &SpectrumOptions::default()).unwrap();
    for lambda in [0.5, 1.0, 2.0, 5.0] {
        let mut o = BadnessScanOptions::new(1.0, 1);
        o.theta_grid = (0..16).map(|j| j as f64 / 16.0).collect();
        o.energies_per_band = 8;
        let cert = certify::badness_scan(lambda, &ContinuedFraction::golden(), &sp, &o).unwrap();
        assert!(cert.certified(), "{lambda}: {}", cert.min_value);
    }
}

#[test]
fn reports_round_trip_through_json() {
    let p = CocycleParams::new(1.3, GOLDEN, 0.2, 0.1);
    let r = certify::gordon_test(&p, 21, (0.6, 0.8), None).unwrap();
    let back: certify::GordonReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(r, back);
    let phi = vec![Complex64::new(0.1, 0.2), Complex64::new(1.0, 0.0), Complex64::new(0.1, -0.2)];
    let s = certify::cohom_solve(&phi, &ContinuedFraction::silver(), 32).unwrap();
    let back: certify::CohomSolution = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
    assert_eq!(s, back);
    let k = KanProduct::identity_like(&0.0);
    assert_eq!(k.det(), 1.0);
}
