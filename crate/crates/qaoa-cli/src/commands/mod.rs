//! Subcommand implementations and shared evaluation plumbing.

pub mod expectation;
pub mod generate;
pub mod gradients;
pub mod lightcone;
pub mod sample;
pub mod sweep;
pub mod verify;

use std::io::Write;
use std::path::Path;

use qaoa_calc::cost::{CostFunction, CostKind};
use qaoa_calc::emulate::{derivative_bound, sample as draw_samples, SamplerConfig};
use qaoa_calc::exact::{
    balanced_max2sat_p1, expectation_exact_with, hamming_ramp_p1, maxcut_p1, qubo_p1, ExactOptions,
};
use qaoa_calc::grad::DEFAULT_TERM_BUDGET;
use qaoa_calc::hamop::{to_hamiltonian, DiagonalHam};
use qaoa_calc::oracle::{qaoa_expectation, FAST_LIMIT};
use qaoa_calc::series::{error_bounds, series_engine, QaoaSchedule, SeriesOptions};

use crate::args::{InstanceArgs, Method};
use crate::error::{CliError, CliResult};
use crate::io::read_instance;

/// Renders a float with 17 significant digits.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f).unwrap_or_default()
}

/// CSV text with `#` metadata lines followed by a header row.
#[derive(Default)]
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn meta(&mut self, line: impl AsRef<str>) {
        self.text.push_str("# ");
        self.text.push_str(line.as_ref());
        self.text.push('\n');
    }

    pub fn row<S: AsRef<str>>(&mut self, cells: &[S]) {
        let cells: Vec<&str> = cells.iter().map(AsRef::as_ref).collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Writes `text` to `path`, or to `out` when no path is given.
pub fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display()))),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

/// Loaded instance with a one-line description.
pub struct Instance {
    pub cost: CostFunction,
    pub label: String,
}

pub fn load_instance(args: &InstanceArgs) -> CliResult<Instance> {
    let path = args.instance.as_ref().ok_or_else(|| CliError::Input("--instance is required".into()))?;
    let cost = read_instance(path, args.format)?;
    let label = format!("{} (n={}, kind={})", path.display(), cost.n(), kind_name(&cost));
    Ok(Instance { cost, label })
}

pub fn kind_name(c: &CostFunction) -> &'static str {
    match c.kind() {
        CostKind::MaxCut(_) => "maxcut",
        CostKind::Qubo(_) => "qubo",
        CostKind::MaxKSat(_) => "max-k-sat",
        CostKind::BalancedMax2Sat(_) => "balanced-max-2-sat",
        CostKind::HammingRamp { .. } => "hamming-ramp",
        CostKind::GroverProjector { .. } => "grover",
        CostKind::Custom => "custom",
    }
}

/// Result of one method evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    /// Rigorous bound on `|value - ⟨C⟩_p|` when one is known.
    pub error_bound: Option<f64>,
    /// Standard error of a sampled value.
    pub std_err: Option<f64>,
    /// Which formula or path produced the value.
    pub note: String,
}

/// Budgets and seeds shared by evaluations.
#[derive(Clone, Copy, Debug)]
pub struct EvalOptions {
    pub term_budget: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { term_budget: DEFAULT_TERM_BUDGET, samples: 100_000, seed: 0 }
    }
}

/// Rejects methods that cannot run on this instance before any work is done.
pub fn check_method(m: Method, c: &CostFunction, sched: &QaoaSchedule) -> CliResult<()> {
    match m {
        Method::Oracle if c.n() > FAST_LIMIT => {
            Err(qaoa_calc::Error::SizeLimit { what: "oracle qubits", limit: FAST_LIMIT, got: c.n() }.into())
        }
        Method::ClosedForm if sched.p() != 1 => {
            Err(CliError::Input(format!("closed forms exist for p = 1 only (schedule has p = {})", sched.p())))
        }
        Method::Sampler if sched.p() == 0 => Err(CliError::Input("sampler needs p ≥ 1".into())),
        _ => Ok(()),
    }
}

fn hamiltonian(c: &CostFunction) -> CliResult<DiagonalHam> {
    Ok(to_hamiltonian(c)?)
}

/// Evaluates `⟨C⟩_p` by one method.
pub fn evaluate(m: Method, c: &CostFunction, sched: &QaoaSchedule, opts: &EvalOptions) -> CliResult<Evaluation> {
    check_method(m, c, sched)?;
    let plain = |value: f64, note: &str| Evaluation { value, error_bound: None, std_err: None, note: note.to_string() };
    match m {
        Method::Oracle => Ok(plain(qaoa_expectation(c, sched)?, "statevector")),
        Method::Exact => {
            let h = hamiltonian(c)?;
            let r = expectation_exact_with(
                &h,
                sched,
                ExactOptions { term_budget: opts.term_budget, ..Default::default() },
            )?;
            Ok(plain(r.value, "lightcone conjugation"))
        }
        Method::Series(order) => {
            let h = hamiltonian(c)?;
            let so = SeriesOptions { term_budget: opts.term_budget, ..Default::default() };
            let est = series_engine(&h, None, sched, order, so)?;
            let error_bound = if sched.p() == 1 && (2..=3).contains(&order) {
                Some(error_bounds(&h, sched.gammas()[0], sched.betas()[0])?.expectation_bound)
            } else {
                None
            };
            Ok(Evaluation { error_bound, ..plain(est.value, "angle series") })
        }
        Method::ClosedForm => {
            let (g, b) = (sched.gammas()[0], sched.betas()[0]);
            match c.kind() {
                CostKind::MaxCut(gr) if !gr.is_weighted() => Ok(plain(maxcut_p1(gr, g, b)?, "maxcut_p1")),
                CostKind::BalancedMax2Sat(_) => Ok(plain(balanced_max2sat_p1(c, g, b)?, "balanced_max2sat_p1")),
                CostKind::HammingRamp { alpha } => Ok(plain(hamming_ramp_p1(*alpha, c.n(), g, b), "hamming_ramp_p1")),
                _ => {
                    let h = hamiltonian(c)?;
                    if h.locality() > 2 {
                        return Err(CliError::Input(format!(
                            "no closed form for a {}-local {} instance",
                            h.locality(),
                            kind_name(c)
                        )));
                    }
                    Ok(plain(qubo_p1(&h, g, b)?, "qubo_p1"))
                }
            }
        }
        Method::Sampler => {
            let k = derivative_bound(c).value;
            let cfg = if sched.p() == 1 {
                SamplerConfig::leading_order(sched.gammas()[0], sched.betas()[0], k, opts.seed)
            } else {
                SamplerConfig::effective_angles(sched, k, opts.seed)
            };
            if opts.samples < 2 {
                return Err(CliError::Input("sampler needs at least 2 samples".into()));
            }
            let xs = draw_samples(c, &cfg, opts.samples)?;
            let vals: Vec<f64> = xs.iter().map(|&x| c.eval(x)).collect();
            let m = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / m;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
            let note = if sched.p() == 1 { "leading-order sampler" } else { "effective-angle sampler (no guarantee)" };
            Ok(Evaluation { std_err: Some((var / m).sqrt()), ..plain(mean, note) })
        }
    }
}
