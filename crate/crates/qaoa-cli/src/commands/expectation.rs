//! `expectation`: one CSV row per requested method.

use std::io::Write;
use std::time::Instant;

use crate::args::{ExpectationArgs, Method};
use crate::commands::{check_method, emit, evaluate, fmt_f, fmt_opt, load_instance, Csv, EvalOptions};
use crate::error::CliResult;

/// Column-set version of the expectation CSV.
pub const SCHEMA: &str = "expectation/1";

pub fn run(args: &ExpectationArgs, out: &mut dyn Write, _err: &mut dyn Write) -> CliResult<()> {
    let inst = load_instance(&args.instance)?;
    let sched = args.schedule.resolve()?;
    let methods = args.method.as_ref().map(|m| m.0.clone()).unwrap_or_else(|| vec![Method::Oracle]);
    for &m in &methods {
        check_method(m, &inst.cost, &sched)?;
    }
    let defaults = EvalOptions::default();
    let opts = EvalOptions {
        term_budget: args.term_budget.unwrap_or(defaults.term_budget),
        samples: args.samples.unwrap_or(defaults.samples),
        seed: args.seed.unwrap_or(defaults.seed),
    };

    let mut results = Vec::with_capacity(methods.len());
    for &m in &methods {
        let start = Instant::now();
        let e = evaluate(m, &inst.cost, &sched, &opts)?;
        results.push((m, e, start.elapsed().as_secs_f64()));
    }
    let oracle = results.iter().find(|(m, _, _)| *m == Method::Oracle).map(|(_, e, _)| e.value);

    let p = sched.p();
    let mut csv = Csv::default();
    csv.meta(format!("qaoa-calc expectation; schema {SCHEMA}"));
    csv.meta(format!("instance: {}", inst.label));
    if methods.contains(&Method::Sampler) {
        csv.meta(format!("sampler: samples={} seed={}", opts.samples, opts.seed));
    }
    for (m, e, _) in &results {
        csv.meta(format!("{m}: {}", e.note));
    }
    csv.meta("error_bound: rigorous bound on |value - <C>_p| where known; discrepancy: value - oracle");
    let mut header = vec!["method".to_string(), "p".to_string()];
    header.extend((1..=p).map(|j| format!("gamma_{j}")));
    header.extend((1..=p).map(|j| format!("beta_{j}")));
    header.extend(["value", "error_bound", "std_err", "discrepancy"].map(String::from));
    if args.timing {
        header.push("runtime_s".into());
    }
    csv.row(&header);
    for (m, e, secs) in &results {
        let mut row = vec![m.to_string(), p.to_string()];
        row.extend(sched.gammas().iter().map(|&g| fmt_f(g)));
        row.extend(sched.betas().iter().map(|&b| fmt_f(b)));
        row.push(fmt_f(e.value));
        row.push(fmt_opt(e.error_bound));
        row.push(fmt_opt(e.std_err));
        row.push(fmt_opt(oracle.map(|o| e.value - o)));
        if args.timing {
            row.push(format!("{secs:.6}"));
        }
        csv.row(&row);
    }
    emit(&csv.into_string(), args.output.as_deref(), out)
}
