//! Run configuration: the clap surface and its JSON mirror are the same types.

use std::path::PathBuf;

use amo_core::cf_engine::{self, ContinuedFraction, Enclosure};
use amo_core::freq_synth::FrequencySpec;
use amo_core::real::Precision;
use clap::{Args, FromArgMatches, Subcommand, ValueEnum};
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::CliError;

fn clap_defaults<T: Args + FromArgMatches>() -> T {
    let cmd = T::augment_args(clap::Command::new("defaults").no_binary_name(true));
    T::from_arg_matches(&cmd.get_matches_from(Vec::<String>::new())).expect("every flag has a default")
}

macro_rules! clap_default {
    ($($t:ty),*) => {$(
        impl Default for $t {
            fn default() -> Self {
                clap_defaults()
            }
        }
    )*};
}

fn invalid(field: &str, message: impl Into<String>) -> CliError {
    CliError::ConfigInvalid { field: field.into(), message: message.into() }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "default_precision")]
    pub precision: String,
    #[serde(default)]
    pub seed: u64,
}

fn default_out() -> PathBuf {
    PathBuf::from("amo-out")
}

fn default_precision() -> String {
    "double".into()
}

impl RunConfig {
    pub fn precision(&self) -> Result<Precision, CliError> {
        Precision::parse(&self.precision).map_err(|m| invalid("precision", m))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let precision = self.precision()?;
        if precision != Precision::Double && !self.command.supports_big_precision() {
            return Err(invalid(
                "precision",
                format!("`{}` runs in double precision only (got {})", self.command.name(), precision.label()),
            ));
        }
        self.command.validate()
    }
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Continued fractions: expansion, convergents, β estimate, phase check.
    Cf(CfArgs),
    /// Frequency synthesis schedules.
    Synth(SynthArgs),
    /// Periodic-approximant spectrum.
    Spectrum(SpectrumArgs),
    /// Lyapunov exponent over an energy grid.
    Lyapunov(LyapunovArgs),
    /// Fibered rotation number over an energy grid.
    Rotation(RotationArgs),
    /// Telescoping gaps ‖A_{±q}(θ+qα) − A_{±q}(θ)‖.
    Telescope(TelescopeArgs),
    /// (C,N)-badness scan.
    Badness(BadnessArgs),
    /// Gordon trace test sweep.
    Gordon(GordonArgs),
    /// Eigenfunction decay rates of a truncation.
    Decay(DecayArgs),
    /// Cohomological equation in Fourier modes.
    Cohom(CohomArgs),
    /// Rotation-number slope against −1/(4π).
    Drho(DrhoArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Cf(_) => "cf",
            Command::Synth(_) => "synth",
            Command::Spectrum(_) => "spectrum",
            Command::Lyapunov(_) => "lyapunov",
            Command::Rotation(_) => "rotation",
            Command::Telescope(_) => "telescope",
            Command::Badness(_) => "badness",
            Command::Gordon(_) => "gordon",
            Command::Decay(_) => "decay",
            Command::Cohom(_) => "cohom",
            Command::Drho(_) => "drho",
        }
    }

    fn supports_big_precision(&self) -> bool {
        matches!(self, Command::Lyapunov(_) | Command::Rotation(_) | Command::Badness(_))
    }

    fn validate(&self) -> Result<(), CliError> {
        match self {
            Command::Cf(a) => {
                parse_alpha(&a.alpha)?;
                if a.action == CfAction::Dc && !(a.gamma > 0.0 && a.tau > 1.0) {
                    return Err(invalid("gamma", "need γ > 0 and τ > 1"));
                }
                Ok(())
            }
            Command::Synth(a) => a.validate(),
            Command::Spectrum(a) => {
                positive("lambda", a.lambda)?;
                if a.q < 1 {
                    return Err(invalid("q", "need q ≥ 1"));
                }
                nonzero("theta-grid", a.theta_grid as u64)
            }
            Command::Lyapunov(a) => {
                positive("lambda", a.lambda)?;
                parse_alpha(&a.alpha)?;
                EnergyGrid::parse(&a.energies)?;
                nonzero("steps", a.steps)?;
                nonzero("theta-samples", a.theta_samples as u64)
            }
            Command::Rotation(a) => {
                positive("lambda", a.lambda)?;
                parse_alpha(&a.alpha)?;
                EnergyGrid::parse(&a.energies)?;
                nonzero("steps", a.steps)
            }
            Command::Telescope(a) => {
                positive("lambda", a.lambda)?;
                parse_alpha(&a.alpha)?;
                EnergyGrid::parse(&a.energies)?;
                nonzero("theta-grid", a.theta_grid as u64)?;
                if a.index == 0 {
                    return Err(invalid("index", "need n ≥ 1"));
                }
                Ok(())
            }
            Command::Badness(a) => {
                positive("lambda", a.lambda)?;
                positive("C", a.c)?;
                parse_alpha(&a.alpha)?;
                nonzero("theta-grid", a.theta_grid as u64)?;
                if a.energies_per_band == 0 && !a.witness_search {
                    return Err(invalid("energies-per-band", "empty energy grid without witness search"));
                }
                Ok(())
            }
            Command::Gordon(a) => {
                if let Some(l) = a.lambda {
                    positive("lambda", l)?;
                }
                parse_alpha(&a.alpha)?;
                nonzero("samples", a.samples as u64)?;
                if a.index == 0 {
                    return Err(invalid("index", "need n ≥ 1"));
                }
                Ok(())
            }
            Command::Decay(a) => {
                if !(a.lambda > 1.0) {
                    return Err(invalid("lambda", "decay rates need λ > 1"));
                }
                parse_alpha(&a.alpha)?;
                if a.half_width < 8 {
                    return Err(invalid("half-width", "need M ≥ 8"));
                }
                nonzero("count", a.count as u64)
            }
            Command::Cohom(a) => {
                parse_alpha(&a.alpha)?;
                a.coefficients().map(|_| ())
            }
            Command::Drho(a) => {
                if !(a.lambda > 1.0) {
                    return Err(invalid("lambda", "need λ > 1"));
                }
                parse_alpha(&a.alpha)?;
                let grid = EnergyGrid::parse(&a.energies)?;
                if grid.explicit().is_some_and(|e| e.len() < 3) {
                    return Err(invalid("energies", "need at least 3 energies"));
                }
                nonzero("steps", a.steps)
            }
        }
    }
}

fn positive(field: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be positive and finite, got {x}")))
    }
}

fn nonzero(field: &str, x: u64) -> Result<(), CliError> {
    if x > 0 {
        Ok(())
    } else {
        Err(invalid(field, "must be positive"))
    }
}

// ---------------------------------------------------------------------------
// frequencies and grids

/// `golden`, `silver`, `cf:a1,a2,..` (finite), `one:a1,..` (then all ones),
/// `periodic:a1,..|b1,..`, `rational:p/q`, or `file:PATH` holding a
/// synthesized frequency.
pub fn parse_alpha(s: &str) -> Result<ContinuedFraction, CliError> {
    let ints = |body: &str| -> Result<Vec<Integer>, CliError> {
        body.split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<Integer>().map_err(|_| invalid("alpha", format!("bad quotient `{t}`"))))
            .collect()
    };
    let cf = match s.split_once(':') {
        None if s == "golden" => ContinuedFraction::golden(),
        None if s == "silver" => ContinuedFraction::silver(),
        Some(("cf", body)) => ContinuedFraction::finite(ints(body)?).map_err(|e| invalid("alpha", e.to_string()))?,
        Some(("one", body)) => ContinuedFraction::eventually_one(ints(body)?),
        Some(("periodic", body)) => {
            let (pre, block) = body.split_once('|').ok_or_else(|| invalid("alpha", "periodic needs `prefix|block`"))?;
            let block = ints(block)?;
            if block.is_empty() {
                return Err(invalid("alpha", "empty periodic block"));
            }
            ContinuedFraction::eventually_periodic(ints(pre)?, block)
        }
        Some(("rational", body)) => {
            let r: Rational = body.parse().map_err(|_| invalid("alpha", format!("bad rational `{body}`")))?;
            cf_engine::expand(&Enclosure::point(r), 1 << 12).map_err(|e| invalid("alpha", e.to_string()))?
        }
        Some(("file", path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| invalid("alpha", format!("{path}: {e}")))?;
            let spec: FrequencySpec =
                serde_json::from_str(&text).map_err(|e| invalid("alpha", format!("{path}: {e}")))?;
            spec.alpha()
        }
        _ => return Err(invalid("alpha", format!("unknown frequency `{s}`"))),
    };
    if cf.prefix.iter().any(|a| *a < 1) {
        return Err(invalid("alpha", "quotients must be ≥ 1"));
    }
    Ok(cf)
}

/// Convergent p_n/q_n, or the exact value when the expansion ends first.
pub fn convergent_at(cf: &ContinuedFraction, n: usize) -> Result<(Integer, Integer), CliError> {
    let a = cf.explicit(n).map_err(|e| invalid("alpha", e.to_string()))?;
    let c = cf_engine::convergents_of(&a);
    let last = c.last().expect("convergents start at k = 0");
    Ok((last.p.clone(), last.q.clone()))
}

/// Largest convergent with q ≤ q_max.
pub fn convergent_below(cf: &ContinuedFraction, q_max: u64) -> Result<(i64, i64), CliError> {
    let mut best = (0i64, 1i64);
    for n in 1..200 {
        let (p, q) = convergent_at(cf, n)?;
        if q > q_max {
            break;
        }
        best = (p.to_i64().expect("p ≤ q"), q.to_i64().expect("q ≤ q_max"));
        if cf.exact_horizon().is_some_and(|h| n >= h) {
            break;
        }
    }
    Ok(best)
}

/// `a:b:n` (n evenly spaced, endpoints included), a comma list, or `bands:n`
/// for n energies spread over the approximant spectrum.
#[derive(Clone, Debug, PartialEq)]
pub enum EnergyGrid {
    Explicit(Vec<f64>),
    Bands(usize),
}

impl EnergyGrid {
    pub fn parse(s: &str) -> Result<EnergyGrid, CliError> {
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| invalid("energies", format!("bad number `{t}`")));
        if let Some(n) = s.strip_prefix("bands:") {
            let n: usize = n.parse().map_err(|_| invalid("energies", format!("bad count `{n}`")))?;
            if n == 0 {
                return Err(invalid("energies", "need at least one energy"));
            }
            return Ok(EnergyGrid::Bands(n));
        }
        let parts: Vec<&str> = s.split(':').collect();
        let v = if parts.len() == 3 {
            let (a, b) = (num(parts[0])?, num(parts[1])?);
            let n: usize =
                parts[2].trim().parse().map_err(|_| invalid("energies", format!("bad count `{}`", parts[2])))?;
            if n == 0 || !(b >= a) {
                return Err(invalid("energies", "need n ≥ 1 and a ≤ b"));
            }
            if n == 1 {
                vec![a]
            } else {
                (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
            }
        } else {
            s.split(',').map(num).collect::<Result<Vec<_>, _>>()?
        };
        if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
            return Err(invalid("energies", "need finite energies"));
        }
        Ok(EnergyGrid::Explicit(v))
    }

    pub fn explicit(&self) -> Option<&[f64]> {
        match self {
            EnergyGrid::Explicit(v) => Some(v),
            EnergyGrid::Bands(_) => None,
        }
    }
}

pub fn theta_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| j as f64 / n as f64).collect()
}

// ---------------------------------------------------------------------------
// per-command arguments

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CfAction {
    Expand,
    Convergents,
    Beta,
    Dc,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CfArgs {
    #[arg(value_enum, default_value = "convergents")]
    pub action: CfAction,
    /// Frequency (see `parse_alpha` forms).
    #[arg(long, default_value = "golden")]
    pub alpha: String,
    /// Rational to expand, `p/q`; defaults to the frequency itself.
    #[arg(long)]
    pub x: Option<String>,
    /// Number of quotients / convergents.
    #[arg(long, default_value_t = 20)]
    pub terms: usize,
    /// First index of the β window.
    #[arg(long, default_value_t = 20)]
    pub stage: usize,
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Phase for `dc`, as `p/q` or a decimal.
    #[arg(long, allow_hyphen_values = true, default_value = "0.2")]
    pub phase: String,
    #[arg(long, default_value_t = 0.05)]
    pub gamma: f64,
    #[arg(long, default_value_t = 2.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 1000)]
    pub cutoff: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynthKind {
    ConstructPrime,
    ScLadder,
    PpLadder,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthArgs {
    #[arg(value_enum, default_value = "construct-prime")]
    pub construction: SynthKind,
    /// Base frequency.
    #[arg(long, default_value = "golden")]
    pub base: String,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    /// Target exponent β′ for construct-prime.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Insertion index for construct-prime.
    #[arg(long = "K", default_value_t = 4)]
    pub k: usize,
    /// Coupling for the ladders; ln λ is what enters the schedule.
    #[arg(long, default_value_t = std::f64::consts::E)]
    pub lambda: f64,
    #[arg(long, default_value_t = 2)]
    pub stages: usize,
    /// Explicit ladder indices (sc-ladder) or gaps (pp-ladder).
    #[arg(long, value_delimiter = ',')]
    pub indices: Vec<usize>,
    #[arg(long, default_value_t = 0.2)]
    pub delta0: f64,
    #[arg(long, default_value_t = 4)]
    pub n0: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub digit_budget: u64,
    #[arg(long, default_value_t = 2)]
    pub max_insertions: usize,
}

impl SynthArgs {
    fn validate(&self) -> Result<(), CliError> {
        parse_alpha(&self.base)?;
        positive("eps", self.eps)?;
        nonzero("digit-budget", self.digit_budget)?;
        match self.construction {
            SynthKind::ConstructPrime => positive("beta", self.beta),
            SynthKind::ScLadder => {
                if !(self.lambda > 1.0) {
                    return Err(invalid("lambda", "need λ > 1"));
                }
                nonzero("stages", self.stages as u64)
            }
            SynthKind::PpLadder => {
                positive("delta0", self.delta0)?;
                if !(self.lambda > 1.0) || !(4.0 * self.delta0 < self.lambda.ln()) {
                    return Err(invalid(
                        "delta0",
                        format!("need 4δ₀ < ln λ (δ₀ = {}, ln λ = {})", self.delta0, self.lambda.ln()),
                    ));
                }
                nonzero("stages", self.stages as u64)
            }
        }
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumArgs {
    #[arg(long, default_value_t = 2.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 55)]
    pub p: i64,
    #[arg(long, default_value_t = 89)]
    pub q: i64,
    #[arg(long, default_value_t = 64)]
    pub theta_grid: usize,
    /// Band widening; 4/q² when omitted.
    #[arg(long)]
    pub fattening: Option<f64>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LyapunovArgs {
    #[arg(long, default_value_t = 2.0)]
    pub lambda: f64,
    #[arg(long, default_value = "golden")]
    pub alpha: String,
    /// `a:b:n`, a comma list, or `bands:n`.
    #[arg(long, allow_hyphen_values = true, default_value = "bands:5")]
    pub energies: String,
    #[arg(long, default_value_t = 10_000)]
    pub steps: u64,
    #[arg(long, default_value_t = 32)]
    pub theta_samples: usize,
    /// Approximant used for `bands:n`: largest convergent with q below this.
    #[arg(long, default_value_t = 89)]
    pub spectrum_q_max: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AveragingArg {
    Plain,
    Weighted,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RotationArgs {
    #[arg(long, default_value_t = 2.0)]
    pub lambda: f64,
    #[arg(long, default_value = "golden")]
    pub alpha: String,
    #[arg(long, allow_hyphen_values = true, default_value = "-4:4:81")]
    pub energies: String,
    #[arg(long, default_value_t = 20_000)]
    pub steps: u64,
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
    #[arg(long, value_enum, default_value = "weighted")]
    pub averaging: AveragingArg,
    #[arg(long, default_value_t = 89)]
    pub spectrum_q_max: u64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TelescopeArgs {
    #[arg(long, default_value_t = std::f64::consts::E)]
    pub lambda: f64,
    #[arg(long, default_value = "golden")]
    pub alpha: String,
    /// Convergent index n; the gap is taken at q = q_n.
    #[arg(long, default_value_t = 8)]
    pub index: usize,
    /// Depth of the rational approximation of α used as the exact frequency.
    #[arg(long, default_value_t = 16)]
    pub exact_depth: usize,
    #[arg(long, allow_hyphen_values = true, default_value = "bands:5")]
    pub energies: String,
    #[arg(long, default_value_t = 256)]
    pub theta_grid: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub max_relative_error: f64,
    #[arg(long, default_value_t = 89)]
    pub spectrum_q_max: u64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BadnessArgs {
    #[arg(long, default_value_t = 2.0)]
    pub lambda: f64,
    #[arg(long, default_value = "golden")]
    pub alpha: String,
    #[arg(long = "C", default_value_t = 1.0)]
    pub c: f64,
    #[arg(long = "N", default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 16)]
    pub theta_grid: usize,
    #[arg(long, default_value_t = 2)]
    pub energies_per_band: usize,
    #[arg(long, default_value_t = 89)]
    pub spectrum_q_max: u64,
    #[arg(long, default_value_t = 8)]
    pub spectrum_theta_grid: usize,
    /// Also test eigenvalues of truncations concentrated near the origin.
    #[arg(long)]
    pub witness_search: bool,
    #[arg(long, default_value_t = 32)]
    pub search_margin: usize,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GordonArgs {
    /// Coupling; e^{β_n/2} at the chosen convergent when omitted.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value = "golden")]
    pub alpha: String,
    /// Convergent index n; products of length q_n.
    #[arg(long, default_value_t = 8)]
    pub index: usize,
    #[arg(long, default_value_t = 16)]
    pub exact_depth: usize,
    /// Random (θ, E, ū) samples drawn from the run seed.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Skip the telescoping hypothesis check.
    #[arg(long)]
    pub no_hypotheses: bool,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayArgs {
    #[arg(long, default_value_t = 2.0)]
    pub lambda: f64,
    #[arg(long, default_value = "golden")]
    pub alpha: String,
    #[arg(long, default_value_t = 0.2)]
    pub theta: f64,
    /// Truncation to sites [−M, M].
    #[arg(long, default_value_t = 1000)]
    pub half_width: usize,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, default_value_t = 0.05)]
    pub gamma: f64,
    #[arg(long, default_value_t = 2.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 1000)]
    pub dc_cutoff: u64,
    #[arg(long, default_value_t = 1e-6)]
    pub boundary_threshold: f64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CohomArgs {
    #[arg(long, default_value = "golden")]
    pub alpha: String,
    /// Fourier modes `k:re:im`; unlisted modes are zero.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', default_value = "1:0.5:0,-1:0.5:0")]
    pub modes: Vec<String>,
    /// Cutoff K; the largest |k| listed when omitted.
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[arg(long, default_value_t = 1024)]
    pub grid: usize,
}

impl CohomArgs {
    /// Coefficients for k = −K..=K.
    pub fn coefficients(&self) -> Result<Vec<num_complex::Complex64>, CliError> {
        let mut modes = Vec::new();
        for m in &self.modes {
            let parts: Vec<&str> = m.split(':').collect();
            let bad = || invalid("modes", format!("expected `k:re:im`, got `{m}`"));
            if parts.len() != 3 {
                return Err(bad());
            }
            let k: i64 = parts[0].trim().parse().map_err(|_| bad())?;
            let re: f64 = parts[1].trim().parse().map_err(|_| bad())?;
            let im: f64 = parts[2].trim().parse().map_err(|_| bad())?;
            modes.push((k, num_complex::Complex64::new(re, im)));
        }
        let widest = modes.iter().map(|m| m.0.unsigned_abs() as usize).max().unwrap_or(0);
        let cutoff = self.cutoff.unwrap_or(widest).max(1);
        if widest > cutoff {
            return Err(invalid("modes", format!("mode |k| = {widest} exceeds the cutoff {cutoff}")));
        }
        let mut v = vec![num_complex::Complex64::new(0.0, 0.0); 2 * cutoff + 1];
        for (k, z) in modes {
            v[(k + cutoff as i64) as usize] += z;
        }
        Ok(v)
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DrhoArgs {
    #[arg(long, default_value_t = 2.0)]
    pub lambda: f64,
    #[arg(long, default_value = "golden")]
    pub alpha: String,
    #[arg(long, allow_hyphen_values = true, default_value = "-2.6:2.6:200")]
    pub energies: String,
    #[arg(long, default_value_t = 20_000)]
    pub steps: u64,
    /// Largest accepted rotation-number error per point.
    #[arg(long, default_value_t = 1e-2)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub slack: f64,
    /// Fraction of strictly monotone points that must meet the bound.
    #[arg(long, default_value_t = 0.9)]
    pub required_fraction: f64,
}

clap_default!(
    CfArgs,
    SynthArgs,
    SpectrumArgs,
    LyapunovArgs,
    RotationArgs,
    TelescopeArgs,
    BadnessArgs,
    GordonArgs,
    DecayArgs,
    CohomArgs,
    DrhoArgs
);
