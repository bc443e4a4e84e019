//! Command-line arguments. Every argument struct also deserializes from the config file,
//! whose keys are the long flag names.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qaoa_calc::series::QaoaSchedule;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CliError, CliResult};
use crate::io::InstanceFormat;

fn is_false(b: &bool) -> bool {
    !*b
}

/// Analytical QAOA expectations, series, samplers and verification.
#[derive(Parser, Debug, Clone)]
#[command(name = "qaoa-calc", version, about)]
pub struct Cli {
    /// TOML config; top-level keys apply to every subcommand, `[<subcommand>]` tables to one.
    /// Keys mirror the long flags; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Cost expectation by one or more methods.
    Expectation(ExpectationArgs),
    /// Expectations along a scaled angle path or over a (γ, β) grid.
    Sweep(SweepArgs),
    /// Cross-validation of closed forms, exact evaluation, series, oracle and sampler.
    Verify(VerifyArgs),
    /// Classical leading-order sampler.
    Sample(SampleArgs),
    /// Gradient-operator words and their uniform-state expectations.
    Gradients(GradientsArgs),
    /// Lightcone sets of cost terms.
    Lightcone(LightconeArgs),
    /// Random or structured instance generators.
    Generate(GenerateArgs),
}

impl Command {
    /// Config-file section name.
    pub fn name(&self) -> &'static str {
        match self {
            Command::Expectation(_) => "expectation",
            Command::Sweep(_) => "sweep",
            Command::Verify(_) => "verify",
            Command::Sample(_) => "sample",
            Command::Gradients(_) => "gradients",
            Command::Lightcone(_) => "lightcone",
            Command::Generate(_) => "generate",
        }
    }
}

/// Comma-separated list of reals.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct AngleList(pub Vec<f64>);

impl FromStr for AngleList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let vals = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| format!("invalid number {t:?}")))
            .collect::<Result<Vec<_>, _>>()?;
        if vals.iter().any(|v| !v.is_finite()) {
            return Err("angles must be finite".into());
        }
        Ok(AngleList(vals))
    }
}

impl Serialize for AngleList {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for AngleList {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            One(f64),
            Many(Vec<f64>),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::One(v) => Ok(AngleList(vec![v])),
            Raw::Many(v) => Ok(AngleList(v)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&self.to_string())
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

/// Linear ramp `p,γ0,a,β0,b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RampSpec {
    pub p: usize,
    pub gamma0: f64,
    pub a: f64,
    pub beta0: f64,
    pub b: f64,
}

impl FromStr for RampSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 5 {
            return Err("ramp needs `p,gamma0,a,beta0,b`".into());
        }
        let p = parts[0].parse().map_err(|_| format!("invalid level count {:?}", parts[0]))?;
        let f = |t: &str| t.parse::<f64>().map_err(|_| format!("invalid number {t:?}"));
        Ok(RampSpec { p, gamma0: f(parts[1])?, a: f(parts[2])?, beta0: f(parts[3])?, b: f(parts[4])? })
    }
}

impl fmt::Display for RampSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{},{}", self.p, self.gamma0, self.a, self.beta0, self.b)
    }
}

string_serde!(RampSpec);

/// Inclusive grid `start:end:count`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RangeSpec {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl RangeSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        (0..self.count).map(|i| self.start + (self.end - self.start) * i as f64 / (self.count - 1) as f64).collect()
    }
}

impl FromStr for RangeSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err("range needs `start:end:count`".into());
        }
        let f = |t: &str| t.parse::<f64>().map_err(|_| format!("invalid number {t:?}"));
        let count: usize = parts[2].parse().map_err(|_| format!("invalid count {:?}", parts[2]))?;
        if count == 0 {
            return Err("range count must be positive".into());
        }
        Ok(RangeSpec { start: f(parts[0])?, end: f(parts[1])?, count })
    }
}

impl fmt::Display for RangeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.count)
    }
}

string_serde!(RangeSpec);

/// Evaluation method.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Oracle,
    Exact,
    /// Series truncated at total angle order `ℓ`.
    Series(u32),
    ClosedForm,
    Sampler,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "oracle" => Ok(Method::Oracle),
            "exact" => Ok(Method::Exact),
            "closed_form" | "closed-form" => Ok(Method::ClosedForm),
            "sampler" => Ok(Method::Sampler),
            "series" => Ok(Method::Series(3)),
            other => match other.strip_prefix("series:") {
                Some(l) => l.parse().map(Method::Series).map_err(|_| format!("invalid series order {l:?}")),
                None => Err(format!(
                    "unknown method {other:?}; expected oracle, exact, series:<order>, closed_form or sampler"
                )),
            },
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Oracle => write!(f, "oracle"),
            Method::Exact => write!(f, "exact"),
            Method::Series(l) => write!(f, "series:{l}"),
            Method::ClosedForm => write!(f, "closed_form"),
            Method::Sampler => write!(f, "sampler"),
        }
    }
}

string_serde!(Method);

/// Comma-separated methods.
#[derive(Clone, Debug, PartialEq)]
pub struct MethodList(pub Vec<Method>);

impl FromStr for MethodList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v = s.split(',').map(str::parse).collect::<Result<Vec<Method>, _>>()?;
        Ok(MethodList(v))
    }
}

impl fmt::Display for MethodList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(Method::to_string).collect();
        write!(f, "{}", s.join(","))
    }
}

string_serde!(MethodList);

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default, rename_all = "kebab-case")]
pub struct InstanceArgs {
    /// Instance file.
    #[arg(long, short = 'i')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<PathBuf>,
    /// File format; guessed from the extension when omitted.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<InstanceFormat>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default, rename_all = "kebab-case")]
pub struct ScheduleArgs {
    /// Phase angles `γ_1,...,γ_p` (radians).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<AngleList>,
    /// Mixing angles `β_1,...,β_p` (radians).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<AngleList>,
    /// Linear ramp `p,γ0,a,β0,b`: `γ_j = γ0 + a j`, `β_j = β0 + b j`, `j = 1..p`.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["gamma", "beta"])]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ramp: Option<RampSpec>,
}

impl ScheduleArgs {
    /// The schedule, or `None` when no angles were given.
    pub fn resolve_opt(&self) -> CliResult<Option<QaoaSchedule>> {
        if let Some(r) = &self.ramp {
            if self.gamma.is_some() || self.beta.is_some() {
                return Err(CliError::Input("give either --ramp or --gamma/--beta".into()));
            }
            return Ok(Some(QaoaSchedule::linear_ramp(r.p, r.gamma0, r.a, r.beta0, r.b)));
        }
        match (&self.gamma, &self.beta) {
            (None, None) => Ok(None),
            (Some(g), Some(b)) => {
                if g.0.len() != b.0.len() {
                    return Err(CliError::Input(format!("{} gamma values but {} beta values", g.0.len(), b.0.len())));
                }
                Ok(Some(QaoaSchedule::new(g.0.clone(), b.0.clone())?))
            }
            _ => Err(CliError::Input("both --gamma and --beta are required".into())),
        }
    }

    pub fn resolve(&self) -> CliResult<QaoaSchedule> {
        self.resolve_opt()?.ok_or_else(|| CliError::Input("angles required: --gamma/--beta or --ramp".into()))
    }
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default, rename_all = "kebab-case")]
pub struct ExpectationArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub schedule: ScheduleArgs,
    /// Methods (comma-separated): oracle, exact, series:<order>, closed_form, sampler [default: oracle].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<MethodList>,
    /// Sampler draws [default: 100000].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Sampler seed [default: 0].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Pauli-term budget for exact and series evaluation.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub term_budget: Option<usize>,
    /// Output CSV path [default: stdout].
    #[arg(long, short = 'o')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Append a wall-clock runtime column (makes output nondeterministic).
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub timing: bool,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default, rename_all = "kebab-case")]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub instance: InstanceArgs,
    /// Path direction: the angles reached at `ε = 1`.
    #[command(flatten)]
    #[serde(flatten)]
    pub schedule: ScheduleArgs,
    /// Points on the path [default: 101].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Path start [default: 0].
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_min: Option<f64>,
    /// Path end [default: 1].
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_max: Option<f64>,
    /// QAOA_1 grid over `--gamma-range` x `--beta-range` instead of a path.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub grid: bool,
    /// Grid γ values `start:end:count`.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_range: Option<RangeSpec>,
    /// Grid β values `start:end:count`.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_range: Option<RangeSpec>,
    /// Grid method: oracle, exact or closed_form [default: oracle].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    /// Output CSV path [default: stdout].
    #[arg(long, short = 'o')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default, rename_all = "kebab-case")]
pub struct VerifyArgs {
    /// Instance to check; the bundled golden suite runs when omitted.
    #[command(flatten)]
    #[serde(flatten)]
    pub instance: InstanceArgs,
    /// Angles for the checks [default: a fixed set of small and large angles].
    #[command(flatten)]
    #[serde(flatten)]
    pub schedule: ScheduleArgs,
    /// Restrict to checks involving these methods.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<MethodList>,
    /// Seed for randomized checks [default: 0].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Sampler flip rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMode {
    LeadingOrder,
    SmallBeta,
    EffectiveAngles,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default, rename_all = "kebab-case")]
pub struct SampleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub schedule: ScheduleArgs,
    /// Flip rule [default: leading-order, or effective-angles when p > 1].
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<SampleMode>,
    /// Small-β constant `b` in `|β| ≤ b/n` [default: 0.4].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub small_beta_constant: Option<f64>,
    /// Derivative bound `K` [default: computed].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// Number of draws [default: 1000].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Seed [default: 0].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Sample file [default: stdout]; the summary goes to stderr.
    #[arg(long, short = 'o')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Write `index,bitstring,cost` rows instead of bare bitstrings.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub csv: bool,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default, rename_all = "kebab-case")]
pub struct GradientsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub instance: InstanceArgs,
    /// Word such as `"Dc^2 Db^2"` for `∇_C²∇²` acting on `C`.
    #[arg(long, short = 'w')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
    /// Pauli-term budget.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub term_budget: Option<usize>,
    /// Skip rendering the operator.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub no_operator: bool,
    /// Output path [default: stdout].
    #[arg(long, short = 'o')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default, rename_all = "kebab-case")]
pub struct LightconeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub instance: InstanceArgs,
    /// Clause (1-based) [default: all clauses].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clause: Option<usize>,
    /// Number of levels [default: 1].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    /// Output CSV path [default: stdout].
    #[arg(long, short = 'o')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// Instance family for `generate`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    /// Max-k-SAT with `--m` clauses of width `--width`.
    Ksat,
    /// MaxCut on G(n, p) with `--edge-prob`.
    MaxcutGnp,
    /// MaxCut on G(n, m) with `--m` edges.
    MaxcutGnm,
    /// Random QUBO with `--density` and optional `--integer`.
    Qubo,
    /// Balanced Max-2-SAT from `--cycles` edge-disjoint cycles.
    Balanced,
    /// Hamming ramp with `--alpha`.
    Ramp,
    /// Grover projector onto `--target`.
    Grover,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default, rename_all = "kebab-case")]
pub struct GenerateArgs {
    /// Instance family.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<GenKind>,
    /// Variables or vertices.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Clauses (ksat) or edges (maxcut-gnm).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Clause width for ksat [default: 3].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<usize>,
    /// Edge probability for maxcut-gnp [default: 0.5].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge_prob: Option<f64>,
    /// Pair density for qubo [default: 0.5].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density: Option<f64>,
    /// Integer QUBO coefficients in {-3..3}.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub integer: bool,
    /// Cycles for balanced [default: 2].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycles: Option<usize>,
    /// Slope for ramp [default: 1].
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Target bitstring for grover (variable 1 leftmost) [default: all zeros].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    /// Seed [default: 0].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Output path [default: stdout].
    #[arg(long, short = 'o')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_parsing() {
        assert_eq!("series:5".parse::<Method>().unwrap(), Method::Series(5));
        assert_eq!("closed-form".parse::<Method>().unwrap(), Method::ClosedForm);
        assert!("series:x".parse::<Method>().is_err());
        let l: MethodList = "oracle,series:3".parse().unwrap();
        assert_eq!(l.to_string(), "oracle,series:3");
    }

    #[test]
    fn ramp_and_range() {
        let r: RampSpec = "3,0.1,0.05,-0.2,0.01".parse().unwrap();
        let s = ScheduleArgs { ramp: Some(r), ..Default::default() }.resolve().unwrap();
        assert_eq!(s.p(), 3);
        assert!((s.gammas()[0] - 0.15).abs() < 1e-15);
        let g: RangeSpec = "0:1:5".parse().unwrap();
        assert_eq!(g.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!("0:1:0".parse::<RangeSpec>().is_err());
    }

    #[test]
    fn schedule_errors() {
        let a = ScheduleArgs { gamma: Some(AngleList(vec![0.1, 0.2])), beta: Some(AngleList(vec![0.1])), ramp: None };
        assert!(a.resolve().is_err());
        assert!(ScheduleArgs::default().resolve().is_err());
        assert!(ScheduleArgs::default().resolve_opt().unwrap().is_none());
    }
}
