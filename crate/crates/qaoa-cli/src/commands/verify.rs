//! `verify`: cross-validation matrix and invariant suite.

use std::io::Write;

use qaoa_calc::cost::{
    balanced_single_triangle, balanced_two_triangles, generate_instance, CostFunction, Graph, InstanceSpec,
};
use qaoa_calc::emulate::{derivative_bound, exact_induced_distribution, SamplerConfig};
use qaoa_calc::grad::{jacobi_identities_check, MixerSpec};
use qaoa_calc::hamop::to_hamiltonian;
use qaoa_calc::oracle::{qaoa_state, FAST_LIMIT};
use qaoa_calc::series::{
    error_bounds, fifth_order_qaoap, leading_order_qaoa1, leading_order_qaoap, series_qaoap, QaoaSchedule,
};

use crate::args::{Method, VerifyArgs};
use crate::commands::{evaluate, load_instance, EvalOptions};
use crate::error::{CliError, CliResult};

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

/// Named check result.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub outcome: Outcome,
}

const INVARIANT_LIMIT: usize = 20;
const JACOBI_LIMIT: usize = 8;
const INDUCED_LIMIT: usize = 10;

fn default_schedules() -> Vec<QaoaSchedule> {
    vec![
        QaoaSchedule::single(0.05, 0.03),
        QaoaSchedule::single(0.7, -0.4),
        QaoaSchedule::new(vec![0.3, 0.5], vec![0.2, -0.3]).expect("valid schedule"),
    ]
}

fn tol_check(diff: f64, tol: f64) -> Outcome {
    let d = format!("|diff| = {diff:.3e} (tol {tol:.0e})");
    if diff <= tol {
        Outcome::Pass(d)
    } else {
        Outcome::Fail(d)
    }
}

fn sched_label(s: &QaoaSchedule) -> String {
    let g: Vec<String> = s.gammas().iter().map(|v| v.to_string()).collect();
    let b: Vec<String> = s.betas().iter().map(|v| v.to_string()).collect();
    format!("gamma=({}) beta=({})", g.join(";"), b.join(";"))
}

/// Runs every applicable check on one instance.
pub fn check_instance(
    c: &CostFunction,
    scheds: &[QaoaSchedule],
    methods: Option<&[Method]>,
    seed: u64,
) -> Vec<CheckResult> {
    let wants = |m: Method| match methods {
        None => true,
        Some(ms) => ms.iter().any(|x| std::mem::discriminant(x) == std::mem::discriminant(&m)),
    };
    let mut out = Vec::new();
    let mut push = |name: String, f: &mut dyn FnMut() -> CliResult<Outcome>| {
        let outcome = f().unwrap_or_else(|e| Outcome::Fail(format!("error: {e}")));
        out.push(CheckResult { name, outcome });
    };
    let n = c.n();
    let oracle_ok = n <= FAST_LIMIT;
    let opts = EvalOptions { seed, ..Default::default() };

    if methods.is_none() {
        push("invariant: sum of dc vanishes".into(), &mut || {
            if n > INVARIANT_LIMIT {
                return Ok(Outcome::Skip(format!("n = {n} > {INVARIANT_LIMIT}")));
            }
            let s: f64 = c.divergence_vector(1)?.iter().sum();
            Ok(tol_check(s.abs(), 1e-9 * (1u64 << n) as f64))
        });
        push("invariant: Jacobi and cross-operator identities".into(), &mut || {
            if n > JACOBI_LIMIT {
                return Ok(Outcome::Skip(format!("n = {n} > {JACOBI_LIMIT}")));
            }
            let h = to_hamiltonian(c)?;
            let coeffs = h.coefficients();
            // Dyadic coefficients make every commutator exact in floating point.
            let dyadic = coeffs.iter().all(|&(_, a)| (a * 1024.0).fract() == 0.0 && a.abs() < 1e6);
            let scale = coeffs.iter().map(|&(_, a)| a.abs()).fold(1.0, f64::max);
            let tol = if dyadic { 0.0 } else { 1e-12 * scale.powi(4) };
            let r = jacobi_identities_check(&h, &MixerSpec::TransverseField)?;
            Ok(tol_check(r.max_discrepancy(), tol))
        });
    }

    for s in scheds {
        let label = sched_label(s);
        let oracle = if oracle_ok { Some(qaoa_state(c, s)) } else { None };
        let oracle_value = |st: &Option<qaoa_calc::Result<qaoa_calc::oracle::StateVector>>| -> CliResult<Option<f64>> {
            match st {
                None => Ok(None),
                Some(Ok(psi)) => Ok(Some(psi.expectation(&c.values()?))),
                Some(Err(e)) => Err(e.clone().into()),
            }
        };
        if wants(Method::Oracle) {
            push(format!("oracle: state norm at {label}"), &mut || match &oracle {
                None => Ok(Outcome::Skip(format!("n = {n} > {FAST_LIMIT}"))),
                Some(Ok(psi)) => Ok(tol_check((psi.norm_sqr() - 1.0).abs(), 1e-12)),
                Some(Err(e)) => Err(e.clone().into()),
            });
        }
        if s.p() == 1 && wants(Method::ClosedForm) && (methods.is_some() || oracle_ok) {
            push(format!("closed_form vs oracle at {label}"), &mut || {
                let Some(o) = oracle_value(&oracle)? else {
                    return Ok(Outcome::Skip("oracle unavailable".into()));
                };
                match evaluate(Method::ClosedForm, c, s, &opts) {
                    Ok(e) => Ok(tol_check((e.value - o).abs(), 1e-9)),
                    Err(CliError::Input(msg)) => Ok(Outcome::Skip(msg)),
                    Err(e) => Err(e),
                }
            });
        }
        if wants(Method::Exact) {
            push(format!("exact vs oracle at {label}"), &mut || {
                let Some(o) = oracle_value(&oracle)? else {
                    return Ok(Outcome::Skip("oracle unavailable".into()));
                };
                Ok(tol_check((evaluate(Method::Exact, c, s, &opts)?.value - o).abs(), 1e-8))
            });
        }
        if wants(Method::Series(3)) {
            push(format!("series:3 vs leading-order formula at {label}"), &mut || {
                let h = to_hamiltonian(c)?;
                Ok(tol_check((series_qaoap(&h, s, 3)?.value - leading_order_qaoap(&h, s)).abs(), 1e-12))
            });
            push(format!("series:5 vs fifth-order formula at {label}"), &mut || {
                let h = to_hamiltonian(c)?;
                Ok(tol_check((series_qaoap(&h, s, 5)?.value - fifth_order_qaoap(&h, s)?).abs(), 1e-10))
            });
            if s.p() == 1 {
                push(format!("leading-order error bound at {label}"), &mut || {
                    let Some(o) = oracle_value(&oracle)? else {
                        return Ok(Outcome::Skip("oracle unavailable".into()));
                    };
                    let h = to_hamiltonian(c)?;
                    let (g, b) = (s.gammas()[0], s.betas()[0]);
                    let bounds = error_bounds(&h, g, b)?;
                    let lo = leading_order_qaoa1(c, g, b)?;
                    let d = (lo.expectation - o).abs();
                    let mut detail = format!("|diff| = {d:.3e} <= bound {:.3e}", bounds.expectation_bound);
                    let mut ok = d <= bounds.expectation_bound * (1.0 + 1e-12) + 1e-12;
                    if let Some(Ok(psi)) = &oracle {
                        let pt = lo.probabilities()?;
                        let worst = psi.probabilities().iter().zip(&pt).map(|(a, q)| (a - q).abs()).fold(0.0, f64::max);
                        ok &= worst <= bounds.probability_bound * (1.0 + 1e-12) + 1e-15;
                        detail.push_str(&format!("; max|dP| = {worst:.3e} <= {:.3e}", bounds.probability_bound));
                    }
                    Ok(if ok { Outcome::Pass(detail) } else { Outcome::Fail(detail) })
                });
            }
        }
    }

    if wants(Method::Sampler) {
        push("sampler: induced distribution equals leading-order P".into(), &mut || {
            if n > INDUCED_LIMIT {
                return Ok(Outcome::Skip(format!("n = {n} > {INDUCED_LIMIT}")));
            }
            let k = derivative_bound(c).value;
            if k == 0.0 {
                return Ok(Outcome::Skip("constant cost".into()));
            }
            let a = (0.5 / (2.0 * n as f64 * k)).sqrt();
            let cfg = SamplerConfig::leading_order(a, a, k, seed);
            let d = exact_induced_distribution(c, &cfg)?;
            let p = leading_order_qaoa1(c, a, a)?.probabilities()?;
            let worst = d.iter().zip(&p).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            Ok(tol_check(worst, 1e-14))
        });
    }
    out
}

/// Instances checked when no file is given.
pub fn golden_suite(seed: u64) -> CliResult<Vec<(String, CostFunction)>> {
    Ok(vec![
        ("maxcut K3".into(), CostFunction::maxcut(&Graph::complete(3))),
        ("maxcut C5".into(), CostFunction::maxcut(&Graph::cycle(5)?)),
        ("balanced single triangle".into(), balanced_single_triangle()),
        ("balanced two triangles".into(), balanced_two_triangles()),
        ("hamming ramp n=5 alpha=1.5".into(), CostFunction::hamming_ramp(5, 1.5)),
        (
            "random qubo n=6".into(),
            generate_instance(&InstanceSpec::RandomQubo { n: 6, density: 0.5, integer: false }, seed)?,
        ),
        ("random 3-sat n=6 m=10".into(), generate_instance(&InstanceSpec::RandomKSat { n: 6, k: 3, m: 10 }, seed)?),
        ("grover n=4".into(), CostFunction::grover(4, 0b0101)?),
    ])
}

pub fn run(args: &VerifyArgs, out: &mut dyn Write, _err: &mut dyn Write) -> CliResult<()> {
    let seed = args.seed.unwrap_or(0);
    let methods = args.method.as_ref().map(|m| m.0.clone());
    let scheds = match args.schedule.resolve_opt()? {
        Some(s) => vec![s],
        None => default_schedules(),
    };
    let instances = if args.instance.instance.is_some() {
        let inst = load_instance(&args.instance)?;
        if methods.as_ref().is_some_and(|ms| ms.contains(&Method::Oracle)) && inst.cost.n() > FAST_LIMIT {
            return Err(
                qaoa_calc::Error::SizeLimit { what: "oracle qubits", limit: FAST_LIMIT, got: inst.cost.n() }.into()
            );
        }
        vec![(inst.label, inst.cost)]
    } else {
        golden_suite(seed)?
    };
    let (mut passed, mut failed, mut skipped) = (0, 0, 0);
    for (label, c) in &instances {
        for r in check_instance(c, &scheds, methods.as_deref(), seed) {
            let (tag, detail) = match &r.outcome {
                Outcome::Pass(d) => {
                    passed += 1;
                    ("PASS", d)
                }
                Outcome::Fail(d) => {
                    failed += 1;
                    ("FAIL", d)
                }
                Outcome::Skip(d) => {
                    skipped += 1;
                    ("SKIP", d)
                }
            };
            writeln!(out, "{tag} [{label}] {}: {detail}", r.name)?;
        }
    }
    writeln!(out, "{passed} passed, {failed} failed, {skipped} skipped")?;
    if failed > 0 {
        return Err(CliError::Verification { failed, total: passed + failed });
    }
    Ok(())
}
