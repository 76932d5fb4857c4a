//! Quotient-schedule generators for strongly Liouvillean frequencies.
//!
//! Three constructions are provided: a single-target perturbation
//! ([`construct_prime`]), the ladder converging to exponent ln λ from above
//! ([`sc_ladder`]) and the ladder converging from below ([`pp_ladder`]). Each
//! inserted quotient is max(1, round(e^{βq})) with q the preceding convergent
//! denominator, rounded in certified big-float arithmetic.

use rug::float::Round;
use rug::{Float, Integer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cf_engine::{self, dec, CfError, ContinuedFraction, Enclosure, Quotient, ScheduledQuotient, TailRule};
use crate::real::exp_bounds;

pub const DEFAULT_DIGIT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("quotient {index} is past the digit budget and only known symbolically")]
    ScheduleOverflow { index: usize },
    #[error("stage {stage} needs a convergent past a symbolic quotient")]
    StageBudgetExceeded { stage: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Cf(#[from] CfError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleOptions {
    /// Largest quotient stored exactly, in decimal digits.
    pub digit_budget: u64,
    /// Insertions generated by `construct_prime` (k = 1..=max_insertions).
    pub max_insertions: usize,
}

impl Default for ScheduleOptions {
    fn default() -> Self {
        ScheduleOptions { digit_budget: DEFAULT_DIGIT_BUDGET, max_insertions: 2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    ConstructPrime,
    ScLadder,
    PpLadder,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub index: usize,
    pub stage: usize,
    pub beta: f64,
    /// q_{index-1} of the number being built.
    #[serde(with = "dec")]
    pub q: Integer,
    /// q_{index-1} of the base number, when it differs in meaning from `q`.
    #[serde(with = "opt_dec", default, skip_serializing_if = "Option::is_none")]
    pub q_base: Option<Integer>,
    #[serde(with = "dec::opt")]
    pub quotient: Option<Integer>,
    /// ln(a)/q − β; `None` for symbolic quotients, where it is below e^{−βq}.
    pub deviation: Option<f64>,
}

mod opt_dec {
    use rug::Integer;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Integer>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.serialize_some(&x.to_string()),
            None => s.serialize_none(),
        }
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Integer>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| Integer::from_str_radix(&s, 10).map_err(D::Error::custom)).transpose()
    }
}

impl ScheduleEntry {
    fn scheduled(&self) -> ScheduledQuotient {
        ScheduledQuotient { index: self.index, beta: self.beta, q: self.q.clone(), quotient: self.quotient.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: usize,
    pub index: usize,
    pub beta: f64,
    /// Distance budget of this stage (ε/2^k).
    pub epsilon: f64,
    /// Caller-supplied (C_k, N_k) badness data, recorded verbatim.
    pub badness: Option<(f64, usize)>,
    /// First index where this stage differs from the previous one; `None` if they
    /// agree through `index + 1`.
    pub first_difference: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencySpec {
    pub construction: Construction,
    pub base: ContinuedFraction,
    /// Base quotients kept verbatim.
    #[serde(with = "dec::vec")]
    pub prefix: Vec<Integer>,
    /// Inserted quotients in increasing index order; every other index past the
    /// prefix is 1.
    pub schedule: Vec<ScheduleEntry>,
    pub target_beta: f64,
    pub stage_count: usize,
    pub stages: Vec<StageRecord>,
    pub digit_budget: u64,
}

impl FrequencySpec {
    /// The number as a continued fraction with a scheduled tail.
    pub fn alpha(&self) -> ContinuedFraction {
        ContinuedFraction::new(
            self.prefix.clone(),
            TailRule::Scheduled {
                entries: self.schedule.iter().map(ScheduleEntry::scheduled).collect(),
                beta_limit: self.target_beta,
            },
        )
        .expect("schedule indices increase past the prefix")
    }

    /// Insertion indices.
    pub fn indices(&self) -> Vec<usize> {
        self.schedule.iter().map(|e| e.index).collect()
    }
}

/// max(1, round(e^{βq})) certified by bracketing e^{βq} with directed rounding.
/// Returns `None` when the result would exceed `digit_budget` decimal digits.
pub fn rounded_exp(beta: f64, q: &Integer, digit_budget: u64) -> Option<Integer> {
    assert!(beta.is_finite() && beta > 0.0);
    let xbits = q.significant_bits().max(1) + 64;
    let x = Float::with_val(xbits, q) * beta; // exact: 53-bit times integer
    let digits = (x.clone() / std::f64::consts::LN_10).to_f64();
    if digits > digit_budget as f64 {
        return None;
    }
    let mut prec = (x.to_f64() / std::f64::consts::LN_2).max(1.0) as u32 + 64;
    loop {
        let (lo, hi) = exp_bounds(&x, prec);
        let (r_lo, _) = (lo + 0.5f64).to_integer_round(Round::Down).expect("finite");
        let (r_hi, _) = (hi + 0.5f64).to_integer_round(Round::Down).expect("finite");
        if r_lo == r_hi {
            return Some(r_lo.max(Integer::from(1)));
        }
        prec += prec / 2 + 64;
    }
}

fn deviation(a: &Integer, beta: f64, q: &Integer) -> f64 {
    let qf = Float::with_val(q.significant_bits() + 128, q);
    let la = Float::with_val(qf.prec(), a).ln();
    ((la - qf.clone() * beta) / qf).to_f64()
}

/// Quotient source for a partially built number: prefix then ones except at entries.
struct Draft<'a> {
    prefix: &'a [Integer],
    schedule: &'a [ScheduleEntry],
}

impl Draft<'_> {
    fn quotient(&self, i: usize) -> Result<Integer, usize> {
        if i <= self.prefix.len() {
            return Ok(self.prefix[i - 1].clone());
        }
        match self.schedule.iter().find(|e| e.index == i) {
            Some(e) => e.quotient.clone().ok_or(i),
            None => Ok(Integer::from(1)),
        }
    }

    /// q_n, or the index of the first symbolic quotient in the way.
    fn q(&self, n: usize) -> Result<Integer, usize> {
        let (mut q_prev, mut q) = (Integer::from(0), Integer::from(1));
        for i in 1..=n {
            let a = self.quotient(i)?;
            let next = a * &q + &q_prev;
            q_prev = std::mem::replace(&mut q, next);
        }
        Ok(q)
    }
}

fn base_q(base: &ContinuedFraction, n: usize) -> Option<Integer> {
    let a = base.explicit(n).ok()?;
    (a.len() == n).then(|| cf_engine::convergents_of(&a).pop().expect("seed").q)
}

/// Keeps base quotients 1..=keep: the explicit part becomes the prefix and
/// scheduled entries carry over with their metadata (from `known` if present).
fn split_base(
    base: &ContinuedFraction,
    keep: usize,
    known: &[ScheduleEntry],
) -> Result<(Vec<Integer>, Vec<ScheduleEntry>), SynthError> {
    let scheduled_tail = match &base.tail_rule {
        TailRule::Scheduled { entries, .. } => Some(entries),
        _ => None,
    };
    let mut prefix = Vec::new();
    let mut carried = Vec::new();
    for i in 1..=keep {
        if let (Some(entries), true) = (scheduled_tail, i > base.prefix_len()) {
            if let Some(e) = known.iter().find(|e| e.index == i) {
                carried.push(e.clone());
            } else if let Some(s) = entries.iter().find(|s| s.index == i) {
                carried.push(ScheduleEntry {
                    index: s.index,
                    stage: 0,
                    beta: s.beta,
                    q: s.q.clone(),
                    q_base: None,
                    quotient: s.quotient.clone(),
                    deviation: None,
                });
            }
            continue;
        }
        match base.quotient(i) {
            Quotient::Exact(a) => prefix.push(a),
            Quotient::Symbolic(_) => return Err(SynthError::ScheduleOverflow { index: i }),
            Quotient::End => {
                return Err(SynthError::InvalidParameter(format!("base expansion ends before index {i}")));
            }
        }
    }
    Ok((prefix, carried))
}

fn insertion(
    draft: &Draft<'_>,
    index: usize,
    stage: usize,
    beta: f64,
    q_base: Option<Integer>,
    budget: u64,
) -> Result<ScheduleEntry, usize> {
    let q = draft.q(index - 1)?;
    let quotient = rounded_exp(beta, &q, budget);
    let deviation = quotient.as_ref().map(|a| deviation(a, beta, &q));
    Ok(ScheduleEntry { index, stage, beta, q, q_base, quotient, deviation })
}

/// a'_n = a_n for n < K−1, a'_{k²K} = round(e^{β' q_{k²K−1}(α')}), 1 elsewhere.
///
/// Exponents use the convergents of the number being built; the base number's
/// q at the same index is recorded alongside in `q_base`.
pub fn construct_prime(
    alpha: &ContinuedFraction,
    eps: f64,
    beta_prime: f64,
    k_index: usize,
    opts: ScheduleOptions,
) -> Result<FrequencySpec, SynthError> {
    if !(eps > 0.0) || !((k_index as f64) > 1.0 / eps) {
        return Err(SynthError::InvalidParameter(format!("K = {k_index} must exceed 1/ε = {}", 1.0 / eps)));
    }
    if !(beta_prime > 0.0) || !beta_prime.is_finite() {
        return Err(SynthError::InvalidParameter("β' must be positive".into()));
    }
    if k_index < 2 || opts.max_insertions == 0 {
        return Err(SynthError::InvalidParameter("need K ≥ 2 and at least one insertion".into()));
    }
    let (prefix, mut schedule) = split_base(alpha, k_index - 2, &[])?;
    for k in 1..=opts.max_insertions {
        let n = k * k * k_index;
        let draft = Draft { prefix: &prefix, schedule: &schedule };
        let e = insertion(&draft, n, 1, beta_prime, base_q(alpha, n - 1), opts.digit_budget)
            .map_err(|index| SynthError::ScheduleOverflow { index })?;
        schedule.push(e);
    }
    let stages = vec![StageRecord {
        stage: 1,
        index: k_index,
        beta: beta_prime,
        epsilon: eps,
        badness: None,
        first_difference: None,
    }];
    let mut spec = FrequencySpec {
        construction: Construction::ConstructPrime,
        base: alpha.clone(),
        prefix,
        schedule,
        target_beta: beta_prime,
        stage_count: 1,
        stages,
        digit_budget: opts.digit_budget,
    };
    spec.stages[0].first_difference = first_difference(alpha, &spec.alpha(), k_index + 1)?;
    Ok(spec)
}

fn first_difference(a: &ContinuedFraction, b: &ContinuedFraction, depth: usize) -> Result<Option<usize>, SynthError> {
    match cf_engine::dh_metric(a, b, depth) {
        Ok(r) => Ok(Some(r.first_difference)),
        Err(CfError::IndistinguishableWithinBudget { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Default stage indices: N¹ = ⌊2/ε⌋ + 1, then the least integer beating both
/// 2N^k and 2^{k+1}/ε.
pub fn default_ladder_indices(eps: f64, stages: usize) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(stages);
    for k in 1..=stages {
        let by_eps = ((k as f64).exp2() / eps).floor() as usize + 1;
        let by_double = out.last().map_or(0, |&n| 2 * n + 1);
        out.push(by_eps.max(by_double));
    }
    out
}

/// Finite-stage truncation of the ladder α^k = construct_prime(α^{k−1},
/// ε/2^k, ln λ + 2^{−k}, N^k).
///
/// Within stage k, construct_prime insertions j²N^k (j ≥ 2) are kept when they
/// fall below N^{k+1} − 1; the final stage contributes its first insertion only.
pub fn sc_ladder(
    alpha: &ContinuedFraction,
    ln_lambda: f64,
    eps: f64,
    stages: usize,
    indices: Option<&[usize]>,
    badness_stage_data: &[(f64, usize)],
    opts: ScheduleOptions,
) -> Result<FrequencySpec, SynthError> {
    if !(ln_lambda > 0.0) || !ln_lambda.is_finite() {
        return Err(SynthError::InvalidParameter("need λ > 1".into()));
    }
    if !(eps > 0.0) || stages == 0 {
        return Err(SynthError::InvalidParameter("need ε > 0 and at least one stage".into()));
    }
    let n: Vec<usize> = match indices {
        Some(v) if v.len() >= stages => v[..stages].to_vec(),
        Some(v) => return Err(SynthError::InvalidParameter(format!("{} stage indices for {stages} stages", v.len()))),
        None => default_ladder_indices(eps, stages),
    };
    for (i, &nk) in n.iter().enumerate() {
        let k = i + 1;
        if !((nk as f64) > (k as f64).exp2() / eps) {
            return Err(SynthError::InvalidParameter(format!("N^{k} = {nk} must exceed 2^{k}/ε")));
        }
        if i > 0 && nk <= 2 * n[i - 1] {
            return Err(SynthError::InvalidParameter(format!("N^{k} = {nk} must exceed 2·N^{}", k - 1)));
        }
    }
    let mut current = alpha.clone();
    let mut prefix = Vec::new();
    let mut schedule: Vec<ScheduleEntry> = Vec::new();
    let mut records = Vec::new();
    for k in 1..=stages {
        let nk = n[k - 1];
        let beta_k = ln_lambda + (-(k as f64)).exp2();
        let (p, carried) = split_base(&current, nk - 2, &schedule)?;
        prefix = p;
        schedule = carried;
        let limit = if k < stages { n[k] - 1 } else { nk + 1 };
        let mut j = 1;
        while j * j * nk < limit {
            let idx = j * j * nk;
            let draft = Draft { prefix: &prefix, schedule: &schedule };
            let e = insertion(&draft, idx, k, beta_k, None, opts.digit_budget)
                .map_err(|_| SynthError::StageBudgetExceeded { stage: k })?;
            schedule.push(e);
            j += 1;
        }
        let next = partial_alpha(&prefix, &schedule, beta_k)?;
        records.push(StageRecord {
            stage: k,
            index: nk,
            beta: beta_k,
            epsilon: eps / (k as f64).exp2(),
            badness: badness_stage_data.get(k - 1).copied(),
            first_difference: first_difference(&current, &next, nk + 1)?,
        });
        current = next;
    }
    Ok(FrequencySpec {
        construction: Construction::ScLadder,
        base: alpha.clone(),
        prefix,
        schedule,
        target_beta: ln_lambda,
        stage_count: stages,
        stages: records,
        digit_budget: opts.digit_budget,
    })
}

fn partial_alpha(prefix: &[Integer], schedule: &[ScheduleEntry], beta: f64) -> Result<ContinuedFraction, SynthError> {
    Ok(ContinuedFraction::new(
        prefix.to_vec(),
        TailRule::Scheduled { entries: schedule.iter().map(ScheduleEntry::scheduled).collect(), beta_limit: beta },
    )?)
}

/// Finite-stage ladder α_j: keep α_{j−1} below n_j, insert
/// round(e^{(β − 2δ₀/2^{j−1}) q_{n_j−1}}) at n_j, ones afterwards.
///
/// α_0 keeps the first `n0` base quotients. Stage indices are
/// n_j = max(gap_j, n_{j−1} + 1, ⌈2^j/ε⌉) with optional caller gaps.
#[allow(clippy::too_many_arguments)]
pub fn pp_ladder(
    alpha: &ContinuedFraction,
    ln_lambda: f64,
    delta0: f64,
    stages: usize,
    n0: usize,
    eps: f64,
    gaps: Option<&[usize]>,
    opts: ScheduleOptions,
) -> Result<FrequencySpec, SynthError> {
    if !(delta0 > 0.0) || !(4.0 * delta0 < ln_lambda) || !ln_lambda.is_finite() {
        return Err(SynthError::InvalidParameter(format!("need 0 < 4δ₀ < ln λ (δ₀ = {delta0}, ln λ = {ln_lambda})")));
    }
    if !(eps > 0.0) || stages == 0 {
        return Err(SynthError::InvalidParameter("need ε > 0 and at least one stage".into()));
    }
    if !(1.0 / (n0 as f64 + 1.0) < eps / 2.0) {
        return Err(SynthError::InvalidParameter(format!("1/(n₀+1) = 1/{} must be below ε/2", n0 + 1)));
    }
    let (prefix, mut schedule) = split_base(alpha, n0, &[])?;
    let alpha0 = partial_alpha(&prefix, &schedule, ln_lambda)?;
    let mut previous = alpha0;
    let mut records = Vec::new();
    let mut n_prev = n0;
    for j in 1..=stages {
        let by_eps = ((j as f64).exp2() / eps).ceil() as usize;
        let gap = gaps.and_then(|g| g.get(j - 1)).copied().unwrap_or(0);
        let nj = gap.max(n_prev + 1).max(by_eps);
        let coeff = ln_lambda - 2.0 * delta0 / ((j - 1) as f64).exp2();
        let draft = Draft { prefix: &prefix, schedule: &schedule };
        let e = insertion(&draft, nj, j, coeff, None, opts.digit_budget)
            .map_err(|index| SynthError::ScheduleOverflow { index })?;
        schedule.push(e);
        let next = partial_alpha(&prefix, &schedule, ln_lambda)?;
        records.push(StageRecord {
            stage: j,
            index: nj,
            beta: coeff,
            epsilon: eps / (j as f64).exp2(),
            badness: None,
            first_difference: first_difference(&previous, &next, nj + 1)?,
        });
        previous = next;
        n_prev = nj;
    }
    Ok(FrequencySpec {
        construction: Construction::PpLadder,
        base: alpha.clone(),
        prefix,
        schedule,
        target_beta: ln_lambda,
        stage_count: stages,
        stages: records,
        digit_budget: opts.digit_budget,
    })
}

/// Explicit quotients and a certified enclosure of the number.
#[derive(Clone, Debug, PartialEq)]
pub struct Materialized {
    pub cf: ContinuedFraction,
    pub quotients: Vec<Integer>,
    pub enclosure: Enclosure,
    pub center: Float,
    pub radius: Float,
}

/// Expands the spec to `depth` quotients and encloses its value.
pub fn materialize(spec: &FrequencySpec, depth: usize, bits: u32) -> Result<Materialized, SynthError> {
    let alpha = spec.alpha();
    let quotients = alpha.explicit(depth).map_err(|e| match e {
        CfError::SymbolicQuotient { index } => SynthError::ScheduleOverflow { index },
        other => other.into(),
    })?;
    let enclosure = alpha.enclosure(depth)?;
    let explicit_len = depth.max(spec.prefix.len());
    let cf_prefix = alpha.explicit(explicit_len).map_err(|e| match e {
        CfError::SymbolicQuotient { index } => SynthError::ScheduleOverflow { index },
        other => other.into(),
    })?;
    let rest = spec.schedule.iter().filter(|e| e.index > explicit_len).map(ScheduleEntry::scheduled).collect();
    let cf = ContinuedFraction::new(cf_prefix, TailRule::Scheduled { entries: rest, beta_limit: spec.target_beta })?;
    let center = Float::with_val_round(bits, &enclosure.mid(), Round::Nearest).0;
    let half = enclosure.width() / 2u32;
    let radius = Float::with_val_round(bits.max(64), &half, Round::Up).0;
    Ok(Materialized { cf, quotients, enclosure, center, radius })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    fn opts(n: usize) -> ScheduleOptions {
        ScheduleOptions { max_insertions: n, ..Default::default() }
    }

    #[test]
    fn rounded_exp_small_values() {
        assert_eq!(rounded_exp(1.0, &Integer::from(3), 100), Some(Integer::from(20)));
        assert_eq!(rounded_exp(1.5, &Integer::from(3), 100), Some(Integer::from(90)));
        assert_eq!(rounded_exp(0.1, &Integer::from(1), 100), Some(Integer::from(1)));
        assert_eq!(rounded_exp(1.0, &Integer::from(1000), 100), None);
    }

    #[test]
    fn construct_prime_golden_example() {
        let spec = construct_prime(&ContinuedFraction::golden(), 0.3, 1.0, 4, opts(1)).unwrap();
        assert_eq!(spec.schedule[0].index, 4);
        assert_eq!(spec.schedule[0].q, 3);
        assert_eq!(spec.schedule[0].quotient, Some(Integer::from(20)));
        assert_eq!(spec.target_beta, 1.0);
        assert_eq!(spec.alpha().explicit(6).unwrap(), [1, 1, 1, 20, 1, 1].map(Integer::from));
    }

    #[test]
    fn construct_prime_rejects_small_k() {
        let r = construct_prime(&ContinuedFraction::golden(), 0.3, 1.0, 3, opts(1));
        assert!(matches!(r, Err(SynthError::InvalidParameter(_))));
    }

    #[test]
    fn construct_prime_symbolic_then_overflow() {
        let budget = ScheduleOptions { digit_budget: 50, max_insertions: 2 };
        let spec = construct_prime(&ContinuedFraction::golden(), 0.3, 1.0, 4, budget).unwrap();
        assert!(spec.schedule[1].quotient.is_none());
        assert_eq!(spec.schedule[1].index, 16);
        let budget = ScheduleOptions { digit_budget: 50, max_insertions: 3 };
        let r = construct_prime(&ContinuedFraction::golden(), 0.3, 1.0, 4, budget);
        assert_eq!(r.unwrap_err(), SynthError::ScheduleOverflow { index: 16 });
    }

    #[test]
    fn materialize_past_symbolic_overflows() {
        let budget = ScheduleOptions { digit_budget: 50, max_insertions: 2 };
        let spec = construct_prime(&ContinuedFraction::golden(), 0.3, 1.0, 4, budget).unwrap();
        assert!(materialize(&spec, 15, 128).is_ok());
        assert_eq!(materialize(&spec, 16, 128).unwrap_err(), SynthError::ScheduleOverflow { index: 16 });
    }

    #[test]
    fn materialize_exact_rational_has_zero_radius() {
        let base = ContinuedFraction::finite([2u32, 2, 3]).unwrap();
        let spec = FrequencySpec {
            construction: Construction::ConstructPrime,
            base: base.clone(),
            prefix: base.prefix.clone(),
            schedule: vec![],
            target_beta: 0.0,
            stage_count: 0,
            stages: vec![],
            digit_budget: 10,
        };
        // a scheduled tail with no entries is all ones; depth 3 still brackets 7/17
        let m = materialize(&spec, 3, 64).unwrap();
        assert!(m.enclosure.contains(&Rational::from((7, 17))));
    }

    #[test]
    fn pp_ladder_example() {
        let spec =
            pp_ladder(&ContinuedFraction::golden(), 1.0, 0.2, 1, 4, 0.5, None, ScheduleOptions::default()).unwrap();
        assert_eq!(spec.schedule[0].index, 5);
        assert_eq!(spec.schedule[0].q, 5);
        assert_eq!(spec.schedule[0].quotient, Some(Integer::from(20)));
        assert!((spec.stages[0].beta - 0.6).abs() < 1e-15);
    }

    #[test]
    fn pp_ladder_requires_small_delta() {
        let r = pp_ladder(&ContinuedFraction::golden(), 1.0, 0.25, 1, 4, 0.5, None, ScheduleOptions::default());
        assert!(matches!(r, Err(SynthError::InvalidParameter(_))));
    }

    #[test]
    fn sc_ladder_two_stage_golden() {
        let spec = sc_ladder(&ContinuedFraction::golden(), 1.0, 0.6, 2, None, &[], ScheduleOptions::default()).unwrap();
        assert_eq!(spec.indices(), vec![4, 9]);
        assert_eq!(spec.schedule[0].quotient, Some(Integer::from(90)));
        assert_eq!(spec.schedule[1].q, 1369);
        let a9 = spec.schedule[1].quotient.as_ref().unwrap();
        assert_eq!(a9.to_string().len(), 744);
        assert_eq!(spec.stages[0].first_difference, Some(4));
        assert_eq!(spec.stages[1].first_difference, Some(9));
        assert!(spec.schedule.iter().all(|e| e.deviation.unwrap().abs() <= 1.0 / e.q.to_f64()));
    }

    #[test]
    fn sc_ladder_rejects_non_doubling_indices() {
        let r = sc_ladder(&ContinuedFraction::golden(), 1.0, 0.6, 2, Some(&[4, 8]), &[], ScheduleOptions::default());
        assert!(matches!(r, Err(SynthError::InvalidParameter(_))));
    }

    #[test]
    fn sc_ladder_budget_exhaustion() {
        let budget = ScheduleOptions { digit_budget: 100, max_insertions: 2 };
        let r = sc_ladder(&ContinuedFraction::golden(), 1.0, 0.6, 3, None, &[], budget);
        assert_eq!(r.unwrap_err(), SynthError::StageBudgetExceeded { stage: 3 });
    }

    #[test]
    fn spec_json_roundtrip() {
        let budget = ScheduleOptions { digit_budget: 50, max_insertions: 2 };
        let spec = construct_prime(&ContinuedFraction::golden(), 0.3, 1.0, 4, budget).unwrap();
        let s = serde_json::to_string(&spec).unwrap();
        assert!(s.contains("\"symbolic\""));
        let back: FrequencySpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn default_indices_beat_both_bounds() {
        let n = default_ladder_indices(0.6, 3);
        assert_eq!(n, vec![4, 9, 19]);
        let n = default_ladder_indices(0.5, 1);
        // ⌊2/ε⌋ = 4 would only tie 2/ε
        assert_eq!(n, vec![5]);
    }
}
