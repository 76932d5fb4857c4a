//! Exact continued-fraction arithmetic for numbers in (0,1).
//!
//! Quotients are big integers. A [`ContinuedFraction`] is an explicit prefix
//! plus a [`TailRule`] that generates the rest lazily, so numbers whose later
//! quotients have millions of digits can still be handled.

use std::cmp::Ordering;

use rug::float::Round;
use rug::ops::{MulAssignRound, PowAssignRound};
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CfError {
    #[error("quotient {index} is not determined by the input enclosure; raise the input precision")]
    AmbiguousQuotient { index: usize },
    #[error("input {0} is not inside (0,1)")]
    NotInUnitInterval(String),
    #[error("need {needed} convergents but only {available} are available")]
    InsufficientStages { needed: usize, available: usize },
    #[error("available quotients cannot resolve {what}")]
    PrecisionExhausted { what: String },
    #[error("expansions agree through depth {depth}; distance is at most 1/{}", depth + 1)]
    IndistinguishableWithinBudget { depth: usize },
    #[error("quotient {index} is only known symbolically")]
    SymbolicQuotient { index: usize },
    #[error("expansion has only {available} quotients")]
    Exhausted { available: usize },
    #[error("invalid continued fraction: {0}")]
    Invalid(String),
}

/// Decimal-string (de)serialisation so big integers round-trip bit-exactly.
pub mod dec {
    use rug::Integer;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Integer, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Integer, D::Error> {
        let s = String::deserialize(d)?;
        Integer::from_str_radix(&s, 10).map_err(D::Error::custom)
    }

    pub mod vec {
        use rug::Integer;
        use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &[Integer], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&x.to_string())?;
            }
            seq.end()
        }
        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Integer>, D::Error> {
            let v = Vec::<String>::deserialize(d)?;
            v.iter().map(|s| Integer::from_str_radix(s, 10).map_err(D::Error::custom)).collect()
        }
    }

    /// `None` is written as the string "symbolic".
    pub mod opt {
        use rug::Integer;
        use serde::{de::Error, Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &Option<Integer>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(x) => s.serialize_str(&x.to_string()),
                None => s.serialize_str("symbolic"),
            }
        }
        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Integer>, D::Error> {
            let s = String::deserialize(d)?;
            if s == "symbolic" {
                return Ok(None);
            }
            Integer::from_str_radix(&s, 10).map(Some).map_err(D::Error::custom)
        }
    }
}

/// An inserted quotient a = max(1, round(e^{beta q})); `quotient` is `None`
/// when the value is too large to store and is known only through (beta, q).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduledQuotient {
    pub index: usize,
    pub beta: f64,
    #[serde(with = "dec")]
    pub q: Integer,
    #[serde(with = "dec::opt")]
    pub quotient: Option<Integer>,
}

impl ScheduledQuotient {
    /// ln of the quotient, to double precision.
    pub fn ln_value(&self) -> f64 {
        match &self.quotient {
            Some(a) => Float::with_val(128, a).ln().to_f64(),
            None => (Float::with_val(128, &self.q) * self.beta).to_f64(),
        }
    }
    pub fn is_symbolic(&self) -> bool {
        self.quotient.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum TailRule {
    /// The number is exactly the finite expansion.
    Terminate,
    /// Later quotients are unknown (e.g. the prefix came from a finite-precision input).
    Truncated,
    /// The block repeats forever after the prefix.
    Periodic {
        #[serde(with = "dec::vec")]
        block: Vec<Integer>,
    },
    /// Ones after the prefix, except at the scheduled indices.
    Scheduled { entries: Vec<ScheduledQuotient>, beta_limit: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    #[serde(with = "dec::vec")]
    pub prefix: Vec<Integer>,
    pub tail_rule: TailRule,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Quotient<'a> {
    Exact(Integer),
    Symbolic(&'a ScheduledQuotient),
    End,
}

impl ContinuedFraction {
    pub fn new(prefix: Vec<Integer>, tail_rule: TailRule) -> Result<Self, CfError> {
        if prefix.iter().any(|a| *a < 1) {
            return Err(CfError::Invalid("quotients must be >= 1".into()));
        }
        match &tail_rule {
            TailRule::Periodic { block } => {
                if block.is_empty() || block.iter().any(|a| *a < 1) {
                    return Err(CfError::Invalid("periodic block must be nonempty and >= 1".into()));
                }
            }
            TailRule::Scheduled { entries, .. } => {
                let mut last = prefix.len();
                for s in entries {
                    if s.quotient.as_ref().is_some_and(|a| *a < 1) {
                        return Err(CfError::Invalid("scheduled quotients must be >= 1".into()));
                    }
                    if s.index <= last {
                        return Err(CfError::Invalid(format!("scheduled index {} must exceed {last}", s.index)));
                    }
                    last = s.index;
                }
            }
            TailRule::Terminate if prefix.is_empty() => {
                return Err(CfError::Invalid("empty terminating expansion".into()));
            }
            _ => {}
        }
        Ok(ContinuedFraction { prefix, tail_rule })
    }

    pub fn finite<I: Into<Integer>>(quotients: impl IntoIterator<Item = I>) -> Result<Self, CfError> {
        Self::new(quotients.into_iter().map(Into::into).collect(), TailRule::Terminate)
    }

    /// [1, 1, 1, ...] = (√5 − 1)/2.
    pub fn golden() -> Self {
        Self::eventually_periodic(Vec::new(), vec![Integer::from(1)])
    }

    /// [2, 2, 2, ...] = √2 − 1.
    pub fn silver() -> Self {
        Self::eventually_periodic(Vec::new(), vec![Integer::from(2)])
    }

    /// Given prefix followed by ones forever.
    pub fn eventually_one<I: Into<Integer>>(prefix: impl IntoIterator<Item = I>) -> Self {
        Self::eventually_periodic(prefix.into_iter().map(Into::into).collect(), vec![Integer::from(1)])
    }

    pub fn eventually_periodic(prefix: Vec<Integer>, block: Vec<Integer>) -> Self {
        Self::new(prefix, TailRule::Periodic { block }).expect("valid periodic expansion")
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.tail_rule, TailRule::Terminate)
    }

    /// Quotient a_k, 1-indexed.
    pub fn quotient(&self, k: usize) -> Quotient<'_> {
        assert!(k >= 1, "quotients are 1-indexed");
        if k <= self.prefix.len() {
            return Quotient::Exact(self.prefix[k - 1].clone());
        }
        let j = k - self.prefix.len() - 1;
        match &self.tail_rule {
            TailRule::Terminate | TailRule::Truncated => Quotient::End,
            TailRule::Periodic { block } => Quotient::Exact(block[j % block.len()].clone()),
            TailRule::Scheduled { entries, .. } => match entries.iter().find(|s| s.index == k) {
                Some(s) => match &s.quotient {
                    Some(a) => Quotient::Exact(a.clone()),
                    None => Quotient::Symbolic(s),
                },
                None => Quotient::Exact(Integer::from(1)),
            },
        }
    }

    /// Number of quotients available as exact integers, `None` if unbounded.
    pub fn exact_horizon(&self) -> Option<usize> {
        match &self.tail_rule {
            TailRule::Terminate | TailRule::Truncated => Some(self.prefix.len()),
            TailRule::Periodic { .. } => None,
            TailRule::Scheduled { entries, .. } => entries.iter().find(|s| s.is_symbolic()).map(|s| s.index - 1),
        }
    }

    /// Exact quotients a_1..a_depth (fewer if the expansion ends first).
    pub fn explicit(&self, depth: usize) -> Result<Vec<Integer>, CfError> {
        let mut out = Vec::with_capacity(depth.min(1 << 16));
        for k in 1..=depth {
            match self.quotient(k) {
                Quotient::Exact(a) => out.push(a),
                Quotient::Symbolic(_) => return Err(CfError::SymbolicQuotient { index: k }),
                Quotient::End => break,
            }
        }
        Ok(out)
    }

    /// Analytic limit of ln q_{k+1}/q_k implied by the tail rule.
    pub fn rule_beta_limit(&self) -> Option<f64> {
        match &self.tail_rule {
            TailRule::Periodic { .. } => Some(0.0),
            TailRule::Scheduled { beta_limit, .. } => Some(*beta_limit),
            TailRule::Terminate | TailRule::Truncated => None,
        }
    }

    /// Rational bracket of the value from the first `depth` quotients.
    pub fn enclosure(&self, depth: usize) -> Result<Enclosure, CfError> {
        let a = self.explicit(depth)?;
        if a.len() < depth && !self.is_rational() {
            return Err(CfError::Exhausted { available: a.len() });
        }
        let cv = convergents_of(&a);
        let last = cv.last().expect("seed convergent");
        if self.is_rational() && a.len() == self.prefix.len() {
            return Ok(Enclosure::point(Rational::from((last.p.clone(), last.q.clone()))));
        }
        if a.is_empty() {
            return Ok(Enclosure::new(Rational::from(0), Rational::from(1)));
        }
        let prev = &cv[cv.len() - 2];
        let x = Rational::from((last.p.clone(), last.q.clone()));
        let y = Rational::from((Integer::from(&last.p + &prev.p), Integer::from(&last.q + &prev.q)));
        Ok(Enclosure::ordered(x, y))
    }

    /// Enclosure from the shallowest depth whose denominator exceeds `min_q`,
    /// or the deepest exactly available one.
    pub fn enclosure_beyond(&self, min_q: &Integer, max_depth: usize) -> Result<Enclosure, CfError> {
        let mut q_prev = Integer::from(0);
        let mut q = Integer::from(1);
        let mut depth = 0;
        while depth < max_depth && q <= *min_q {
            match self.quotient(depth + 1) {
                Quotient::Exact(a) => {
                    let next = a * &q + &q_prev;
                    q_prev = std::mem::replace(&mut q, next);
                    depth += 1;
                }
                _ => break,
            }
        }
        self.enclosure(depth)
    }

    /// Double-precision value of the number.
    pub fn to_f64(&self) -> f64 {
        let e = self
            .enclosure_beyond(&Integer::from(1u64 << 40), 4096)
            .unwrap_or_else(|_| Enclosure::new(Rational::from(0), Rational::from(1)));
        e.mid_f64()
    }
}

/// A closed rational interval [lo, hi].
#[derive(Clone, Debug, PartialEq)]
pub struct Enclosure {
    pub lo: Rational,
    pub hi: Rational,
}

impl Enclosure {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "empty enclosure");
        Enclosure { lo, hi }
    }
    pub fn ordered(a: Rational, b: Rational) -> Self {
        if a <= b {
            Enclosure { lo: a, hi: b }
        } else {
            Enclosure { lo: b, hi: a }
        }
    }
    pub fn point(x: Rational) -> Self {
        Enclosure { lo: x.clone(), hi: x }
    }
    /// Exact enclosure of an f64 (which is itself a dyadic rational).
    pub fn from_f64(x: f64) -> Self {
        Self::point(Rational::from_f64(x).expect("finite input"))
    }
    /// [x − r, x + r] for exact dyadic x and radius r.
    pub fn around(center: &Rational, radius: &Rational) -> Self {
        Self::new(Rational::from(center - radius), Rational::from(center + radius))
    }
    /// Bracket of a float with directed-rounding neighbours.
    pub fn from_float_bounds(lo: &Float, hi: &Float) -> Self {
        Self::new(lo.to_rational().expect("finite lower bound"), hi.to_rational().expect("finite upper bound"))
    }
    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
    pub fn width(&self) -> Rational {
        Rational::from(&self.hi - &self.lo)
    }
    pub fn mid(&self) -> Rational {
        Rational::from(&self.lo + &self.hi) / 2u32
    }
    pub fn mid_f64(&self) -> f64 {
        self.mid().to_f64()
    }
    pub fn radius_f64(&self) -> f64 {
        (self.width() / 2u32).to_f64()
    }
    pub fn contains(&self, x: &Rational) -> bool {
        self.lo <= *x && *x <= self.hi
    }
    /// Interval product with an integer.
    pub fn scale(&self, k: &Integer) -> Enclosure {
        Enclosure::ordered(Rational::from(&self.lo * k), Rational::from(&self.hi * k))
    }
    pub fn add(&self, other: &Enclosure) -> Enclosure {
        Enclosure::new(Rational::from(&self.lo + &other.lo), Rational::from(&self.hi + &other.hi))
    }
    pub fn sub(&self, other: &Enclosure) -> Enclosure {
        Enclosure::new(Rational::from(&self.lo - &other.hi), Rational::from(&self.hi - &other.lo))
    }
    /// Bracket of the distance to the nearest integer over the interval.
    pub fn torus_norm(&self) -> (Rational, Rational) {
        let half = Rational::from((1, 2));
        if self.width() >= half {
            let lo = if self.contains_integer() { Rational::new() } else { norm(&self.lo).min(norm(&self.hi)) };
            return (lo, half);
        }
        let (nl, nh) = (norm(&self.lo), norm(&self.hi));
        let lo = if self.contains_integer() { Rational::new() } else { nl.clone().min(nh.clone()) };
        let hi = if self.contains_half_integer() { half } else { nl.max(nh) };
        (lo, hi)
    }
    fn contains_integer(&self) -> bool {
        let c = self.hi.clone().floor();
        c >= self.lo
    }
    fn contains_half_integer(&self) -> bool {
        let shifted = &self.hi - Rational::from((1, 2));
        let c = shifted.floor() + Rational::from((1, 2));
        c >= self.lo
    }
}

/// ‖x‖ = distance from x to the nearest integer.
pub fn norm(x: &Rational) -> Rational {
    let f = x - x.clone().floor();
    let g = Rational::from(1 - &f);
    f.min(g)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Convergent {
    pub k: usize,
    #[serde(with = "dec")]
    pub p: Integer,
    #[serde(with = "dec")]
    pub q: Integer,
}

/// Convergents k = 0..=len of a quotient list, seeds p_0 = 0, q_0 = 1.
pub fn convergents_of(a: &[Integer]) -> Vec<Convergent> {
    let mut out = Vec::with_capacity(a.len() + 1);
    let (mut p_prev, mut q_prev) = (Integer::from(1), Integer::from(0));
    let (mut p, mut q) = (Integer::from(0), Integer::from(1));
    out.push(Convergent { k: 0, p: p.clone(), q: q.clone() });
    for (i, ak) in a.iter().enumerate() {
        let p_next = Integer::from(ak * &p) + &p_prev;
        let q_next = Integer::from(ak * &q) + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        out.push(Convergent { k: i + 1, p: p.clone(), q: q.clone() });
    }
    out
}

/// Convergents (p_k, q_k) for k = 0..=n.
pub fn convergents(cf: &ContinuedFraction, n: usize) -> Result<Vec<Convergent>, CfError> {
    let a = cf.explicit(n)?;
    if a.len() < n {
        return Err(CfError::Exhausted { available: a.len() });
    }
    Ok(convergents_of(&a))
}

/// Expands an enclosed real through the Gauss map, certifying every quotient.
pub fn expand(x: &Enclosure, n_terms: usize) -> Result<ContinuedFraction, CfError> {
    let zero = Rational::new();
    let one = Rational::from(1);
    if x.hi <= zero || x.lo >= one {
        return Err(CfError::NotInUnitInterval(format!("{}", x.mid_f64())));
    }
    let (mut lo, mut hi) = (x.lo.clone(), x.hi.clone());
    let mut quotients = Vec::new();
    for k in 1..=n_terms {
        if lo == hi && lo == zero {
            return ContinuedFraction::new(quotients, TailRule::Terminate);
        }
        if lo <= zero || hi >= one {
            return Err(CfError::AmbiguousQuotient { index: k });
        }
        let inv_hi = Rational::from(hi.recip_ref());
        let inv_lo = Rational::from(lo.recip_ref());
        let a_lo = inv_hi.clone().floor();
        let a_hi = inv_lo.clone().floor();
        if a_lo != a_hi {
            return Err(CfError::AmbiguousQuotient { index: k });
        }
        let a = a_lo.numer().clone();
        let new_lo = inv_hi - &a_lo;
        let new_hi = inv_lo - &a_hi;
        quotients.push(a);
        lo = new_lo;
        hi = new_hi;
    }
    if lo == hi && lo == zero {
        return ContinuedFraction::new(quotients, TailRule::Terminate);
    }
    ContinuedFraction::new(quotients, TailRule::Truncated)
}

/// Finite-stage Liouville exponent sup_{k ≥ m} ln q_{k+1}/q_k.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaEstimate {
    pub stage: usize,
    pub value: f64,
    /// (k, ln q_{k+1}/q_k) for every k in the window.
    pub window: Vec<(usize, f64)>,
    pub rule_limit: Option<f64>,
}

fn ln_ratio(num_ln: &Float, q: &Integer) -> f64 {
    let qf = Float::with_val(num_ln.prec(), q);
    (num_ln.clone() / qf).to_f64()
}

fn ln_int(q: &Integer) -> Float {
    Float::with_val(128, q).ln()
}

/// Default horizon: the explicit prefix, every symbolic entry, and at least m+1 quotients.
pub fn beta_estimate(cf: &ContinuedFraction, m: usize) -> Result<BetaEstimate, CfError> {
    let mut horizon = cf.prefix_len().max(m + 1);
    if let TailRule::Scheduled { entries, .. } = &cf.tail_rule {
        if let Some(s) = entries.last() {
            horizon = horizon.max(s.index);
        }
    }
    beta_estimate_to(cf, m, horizon)
}

pub fn beta_estimate_to(cf: &ContinuedFraction, m: usize, horizon: usize) -> Result<BetaEstimate, CfError> {
    let mut window = Vec::new();
    let (mut q_prev, mut q) = (Integer::from(0), Integer::from(1));
    let mut available = 1; // q_0
    for i in 1..=horizon {
        match cf.quotient(i) {
            Quotient::Exact(a) => {
                let next = a * &q + &q_prev;
                if i > m {
                    window.push((i - 1, ln_ratio(&ln_int(&next), &q)));
                }
                q_prev = std::mem::replace(&mut q, next);
                available += 1;
            }
            Quotient::Symbolic(s) => {
                // ln q_i = β q' + ln q_{i-1} up to a relative e^{-β q'} correction
                if i > m {
                    let lq = ln_int(&q);
                    let bq = Float::with_val(128, &s.q) * s.beta;
                    window.push((i - 1, ln_ratio(&(bq + lq), &q)));
                }
                available += 1;
                break;
            }
            Quotient::End => break,
        }
    }
    if window.is_empty() {
        return Err(CfError::InsufficientStages { needed: m + 2, available });
    }
    let value = window.iter().map(|w| w.1).fold(0.0, f64::max);
    Ok(BetaEstimate { stage: m, value, window, rule_limit: cf.rule_beta_limit() })
}

/// Certified bracket of ‖kα‖.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusDistance {
    pub lo: Rational,
    pub hi: Rational,
}

impl TorusDistance {
    pub fn value(&self) -> f64 {
        (Rational::from(&self.lo + &self.hi) / 2u32).to_f64()
    }
    /// Certified `self ≥ x`.
    pub fn at_least(&self, x: &Rational) -> bool {
        self.lo >= *x
    }
    /// Certified `self ≤ x`.
    pub fn at_most(&self, x: &Rational) -> bool {
        self.hi <= *x
    }
}

const TORUS_MAX_DEPTH: usize = 1 << 14;

/// ‖kα‖ from a convergent enclosure fine enough to separate kα from ℤ.
pub fn torus_distance(k: &Integer, alpha: &ContinuedFraction) -> Result<TorusDistance, CfError> {
    let kabs = Integer::from(k.abs_ref());
    if kabs == 0 {
        return Ok(TorusDistance { lo: Rational::new(), hi: Rational::new() });
    }
    let mut min_q = Integer::from(&kabs << 64);
    let mut last_width = None;
    for _ in 0..6 {
        let enc = alpha.enclosure_beyond(&min_q, TORUS_MAX_DEPTH)?;
        let (lo, hi) = enc.scale(&kabs).torus_norm();
        if enc.is_point() || (lo > 0 && Rational::from(&hi - &lo) * (1u64 << 20) <= lo) {
            return Ok(TorusDistance { lo, hi });
        }
        let w = enc.width();
        if last_width.as_ref() == Some(&w) {
            break;
        }
        last_width = Some(w);
        min_q <<= 128;
    }
    Err(CfError::PrecisionExhausted { what: format!("‖{k}·α‖") })
}

/// The convergent sandwich 1/(2q_{n+1}) ≤ ‖q_n α‖ ≤ 1/q_{n+1}, certified.
pub fn convergent_sandwich(alpha: &ContinuedFraction, n: usize) -> Result<bool, CfError> {
    let cv = convergents(alpha, n + 1)?;
    let d = torus_distance(&cv[n].q, alpha)?;
    let lower = Rational::from((Integer::from(1), Integer::from(&cv[n + 1].q * 2u32)));
    let upper = Rational::from((Integer::from(1), cv[n + 1].q.clone()));
    Ok(d.at_least(&lower) && d.at_most(&upper))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DhReport {
    /// First index (1-based) at which the expansions differ.
    pub first_difference: usize,
    /// 1/(first_difference + 1).
    pub distance: Rational,
    /// Certified upper bound on |α − α'|.
    pub separation: Rational,
    /// Whether separation < 1/q_{n-1}(α)².
    pub separation_bound_holds: bool,
}

fn same_quotient(a: &Quotient<'_>, b: &Quotient<'_>) -> bool {
    match (a, b) {
        (Quotient::Exact(x), Quotient::Exact(y)) => x == y,
        (Quotient::Symbolic(x), Quotient::Symbolic(y)) => x.beta == y.beta && x.q == y.q,
        (Quotient::End, Quotient::End) => true,
        _ => false,
    }
}

/// d_H(α, α') = 1/(n+1) with n the first index where the expansions differ.
pub fn dh_metric(a: &ContinuedFraction, b: &ContinuedFraction, depth: usize) -> Result<DhReport, CfError> {
    let mut n = None;
    for k in 1..=depth {
        let (x, y) = (a.quotient(k), b.quotient(k));
        if !same_quotient(&x, &y) {
            n = Some(k);
            break;
        }
        if x == Quotient::End {
            break;
        }
    }
    let n = n.ok_or(CfError::IndistinguishableWithinBudget { depth })?;
    let shared = a.explicit(n - 1)?;
    let cv = convergents_of(&shared);
    let q = &cv[n - 1].q;
    let cylinder = {
        let q_prev = if n >= 2 { cv[n - 2].q.clone() } else { Integer::from(0) };
        Rational::from((Integer::from(1), (q * Integer::from(q + &q_prev))))
    };
    let mut separation = cylinder;
    if let (Ok(ea), Ok(eb)) = (a.enclosure(n), b.enclosure(n)) {
        let s = Rational::from(&ea.hi - &eb.lo).abs().max(Rational::from(&eb.hi - &ea.lo).abs());
        if s < separation {
            separation = s;
        }
    }
    let bound = Rational::from((Integer::from(1), Integer::from(q * q)));
    Ok(DhReport {
        first_difference: n,
        distance: Rational::from((1, n as u64 + 1)),
        separation_bound_holds: separation < bound,
        separation,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum DcVerdict {
    PassUpToCutoff,
    /// `certain` is false when the enclosure could not separate the two sides;
    /// such cases are reported as failures.
    FailWithWitness {
        m: i64,
        certain: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiophantinePhaseCertificate {
    pub phase: f64,
    pub gamma: f64,
    pub tau: f64,
    pub cutoff: u64,
    pub verdict: DcVerdict,
}

impl DiophantinePhaseCertificate {
    pub fn passed(&self) -> bool {
        self.verdict == DcVerdict::PassUpToCutoff
    }
}

/// Checks ‖2φ − mα‖ ≥ γ/(|m|+1)^τ for |m| ≤ cutoff, in the order 0, 1, −1, 2, −2, ...
pub fn dc_phase_check(
    phi: &Enclosure,
    alpha: &ContinuedFraction,
    gamma: f64,
    tau: f64,
    cutoff: u64,
) -> DiophantinePhaseCertificate {
    assert!(gamma > 0.0 && tau > 1.0, "dc_phase_check needs γ > 0 and τ > 1");
    let prec = 128;
    // the enclosure width times |m| must sit far below the smallest threshold
    let need = (cutoff as f64 + 1.0).log2() * (tau + 1.0) - gamma.log2() + 40.0;
    let min_q = Integer::from(1) << ((need / 2.0).ceil().max(1.0) as u32);
    let alpha_enc = alpha
        .enclosure_beyond(&min_q, TORUS_MAX_DEPTH)
        .unwrap_or_else(|_| Enclosure::new(Rational::new(), Rational::from(1)));
    let two_phi = phi.scale(&Integer::from(2));
    let g = Float::with_val(prec, gamma);
    let verdict = 'scan: {
        for mabs in 0..=cutoff {
            let base = Float::with_val(prec, mabs + 1);
            let e = Float::with_val(prec, -tau);
            let mut t_lo = base.clone();
            t_lo.pow_assign_round(&e, Round::Down);
            t_lo.mul_assign_round(&g, Round::Down);
            let mut t_hi = base;
            t_hi.pow_assign_round(&e, Round::Up);
            t_hi.mul_assign_round(&g, Round::Up);
            let signs: &[i64] = if mabs == 0 { &[1] } else { &[1, -1] };
            for &s in signs {
                let m = s * mabs as i64;
                let x = two_phi.sub(&alpha_enc.scale(&Integer::from(m)));
                let (d_lo, d_hi) = x.torus_norm();
                if t_hi.partial_cmp(&d_lo) != Some(Ordering::Greater) {
                    continue;
                }
                let certain = t_lo.partial_cmp(&d_hi) == Some(Ordering::Greater);
                break 'scan DcVerdict::FailWithWitness { m, certain };
            }
        }
        DcVerdict::PassUpToCutoff
    };
    DiophantinePhaseCertificate { phase: phi.mid_f64(), gamma, tau, cutoff, verdict }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[u64]) -> Vec<Integer> {
        v.iter().map(|&x| Integer::from(x)).collect()
    }

    fn golden_enclosure(bits: u32) -> Enclosure {
        let five = Float::with_val(bits, 5);
        let (s_lo, _) = Float::with_val_round(bits, five.sqrt_ref(), Round::Down);
        let (s_hi, _) = Float::with_val_round(bits, five.sqrt_ref(), Round::Up);
        let lo = (s_lo - 1u32) / 2u32;
        let hi = (s_hi - 1u32) / 2u32;
        Enclosure::from_float_bounds(&lo, &hi)
    }

    #[test]
    fn expands_seven_seventeenths() {
        let cf = expand(&Enclosure::point(Rational::from((7, 17))), 10).unwrap();
        assert_eq!(cf.prefix, ints(&[2, 2, 3]));
        assert!(cf.is_rational());
    }

    #[test]
    fn expands_golden_mean_to_ones() {
        let cf = expand(&golden_enclosure(256), 60).unwrap();
        assert_eq!(cf.prefix, vec![Integer::from(1); 60]);
        // 256 bits cannot pin down 400 quotients
        assert!(matches!(expand(&golden_enclosure(256), 400), Err(CfError::AmbiguousQuotient { .. })));
    }

    #[test]
    fn rejects_outside_unit_interval() {
        assert!(matches!(expand(&Enclosure::from_f64(1.5), 3), Err(CfError::NotInUnitInterval(_))));
        assert!(matches!(expand(&Enclosure::from_f64(-0.1), 3), Err(CfError::NotInUnitInterval(_))));
    }

    #[test]
    fn straddling_a_boundary_is_ambiguous() {
        let e = Enclosure::around(&Rational::from((1, 3)), &Rational::from((1, 1000)));
        assert_eq!(expand(&e, 2), Err(CfError::AmbiguousQuotient { index: 1 }));
    }

    #[test]
    fn convergent_examples() {
        let cv = convergents(&ContinuedFraction::finite(ints(&[2, 2, 3])).unwrap(), 3).unwrap();
        assert_eq!((cv[3].p.clone(), cv[3].q.clone()), (Integer::from(7), Integer::from(17)));
        let cv = convergents(&ContinuedFraction::finite(ints(&[5])).unwrap(), 1).unwrap();
        assert_eq!((cv[1].p.to_u32(), cv[1].q.to_u32()), (Some(1), Some(5)));
        let cv = convergents(&ContinuedFraction::golden(), 6).unwrap();
        let q: Vec<u32> = cv.iter().map(|c| c.q.to_u32().unwrap()).collect();
        assert_eq!(&q[..6], &[1, 1, 2, 3, 5, 8]);
    }

    #[test]
    fn convergents_exhaust() {
        let cf = ContinuedFraction::finite(ints(&[3, 4])).unwrap();
        assert_eq!(convergents(&cf, 3), Err(CfError::Exhausted { available: 2 }));
    }

    #[test]
    fn enclosure_of_terminating_expansion_is_exact() {
        let cf = ContinuedFraction::finite(ints(&[2, 2, 3])).unwrap();
        assert_eq!(cf.enclosure(3).unwrap(), Enclosure::point(Rational::from((7, 17))));
        assert!(!cf.enclosure(2).unwrap().is_point());
    }

    #[test]
    fn beta_needs_two_convergents() {
        let cf = ContinuedFraction::finite(ints(&[1, 2])).unwrap();
        assert!(matches!(beta_estimate(&cf, 5), Err(CfError::InsufficientStages { .. })));
        assert!(beta_estimate(&cf, 1).is_ok());
    }

    #[test]
    fn beta_reports_rule_limit() {
        let b = beta_estimate(&ContinuedFraction::silver(), 10).unwrap();
        assert_eq!(b.rule_limit, Some(0.0));
        assert!(b.value > 0.0 && b.value < 0.01);
    }

    #[test]
    fn torus_distance_small_cases() {
        let g = ContinuedFraction::golden();
        let d = torus_distance(&Integer::from(3), &g).unwrap();
        assert!((d.value() - 0.145898033750315).abs() < 1e-12);
        assert!(d.at_least(&Rational::from((1, 10))) && d.at_most(&Rational::from((1, 5))));
        let d1 = torus_distance(&Integer::from(1), &g).unwrap();
        let a = g.to_f64();
        assert!((d1.value() - a.min(1.0 - a)).abs() < 1e-15);
        assert_eq!(torus_distance(&Integer::from(0), &g).unwrap().value(), 0.0);
    }

    #[test]
    fn torus_distance_exhausts_on_short_prefix() {
        let cf = expand(&Enclosure::around(&Rational::from((3, 7)), &Rational::from((1, 1u64 << 40))), 1).unwrap();
        assert!(matches!(torus_distance(&Integer::from(7), &cf), Err(CfError::PrecisionExhausted { .. })));
    }

    #[test]
    fn dh_examples() {
        let a = ContinuedFraction::golden();
        let b = ContinuedFraction::new(ints(&[1, 1, 2]), TailRule::Periodic { block: ints(&[1]) }).unwrap();
        let r = dh_metric(&a, &b, 50).unwrap();
        assert_eq!(r.first_difference, 3);
        assert_eq!(r.distance, Rational::from((1, 4)));
        assert!(r.separation_bound_holds);
        assert_eq!(dh_metric(&a, &a, 30), Err(CfError::IndistinguishableWithinBudget { depth: 30 }));
    }

    #[test]
    fn dc_trivial_failures() {
        let g = ContinuedFraction::golden();
        let c = dc_phase_check(&Enclosure::from_f64(0.0), &g, 0.01, 2.0, 100);
        assert_eq!(c.verdict, DcVerdict::FailWithWitness { m: 0, certain: true });
        let half = golden_enclosure(200);
        let phi = Enclosure::new(half.lo / 2u32, half.hi / 2u32);
        let c = dc_phase_check(&phi, &g, 0.01, 2.0, 100);
        assert_eq!(c.verdict, DcVerdict::FailWithWitness { m: 1, certain: true });
    }

    #[test]
    fn json_roundtrip_keeps_big_integers() {
        let big = Integer::from(Integer::u_pow_u(10, 60)) + 7;
        let cf =
            ContinuedFraction::new(vec![Integer::from(3), big], TailRule::Periodic { block: ints(&[1, 2]) }).unwrap();
        let s = serde_json::to_string(&cf).unwrap();
        assert!(s.contains("\"1000000000000000000000000000000000000000000000000000000000007\""));
        assert!(s.contains("\"kind\":\"periodic\""));
        let back: ContinuedFraction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, cf);
    }
}
