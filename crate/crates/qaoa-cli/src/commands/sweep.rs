//! `sweep`: expectations along `ε ↦ ε·(γ, β)` or over a QAOA_1 `(γ, β)` grid.

use std::io::Write;

use qaoa_calc::hamop::to_hamiltonian;
use qaoa_calc::oracle::FAST_LIMIT;
use qaoa_calc::series::{pade_1d, path_series_coefficients, QaoaSchedule};
use rayon::prelude::*;

use crate::args::{Method, SweepArgs};
use crate::commands::{check_method, emit, evaluate, fmt_f, load_instance, Csv, EvalOptions};
use crate::error::{CliError, CliResult};

/// Column-set version of the path CSV.
pub const PATH_SCHEMA: &str = "sweep-path/1";
/// Column-set version of the grid CSV.
pub const GRID_SCHEMA: &str = "sweep-grid/1";

/// One row of a path sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct PathRow {
    pub eps: f64,
    pub exact: f64,
    pub series3: f64,
    pub series5: f64,
    pub pade23: Option<f64>,
}

fn reference_method(requested: Option<Method>, n: usize) -> CliResult<Method> {
    match requested {
        Some(m @ (Method::Oracle | Method::Exact | Method::ClosedForm)) => Ok(m),
        Some(other) => {
            Err(CliError::Input(format!("sweep reference method must be oracle, exact or closed_form, got {other}")))
        }
        None if n <= FAST_LIMIT => Ok(Method::Oracle),
        None => Ok(Method::Exact),
    }
}

/// Path rows for `ε_i` evenly spaced in `[eps_min, eps_max]`.
pub fn path_rows(
    c: &qaoa_calc::cost::CostFunction,
    direction: &QaoaSchedule,
    method: Method,
    eps: &[f64],
) -> CliResult<(Vec<PathRow>, Vec<f64>)> {
    let h = to_hamiltonian(c)?;
    let coeffs = path_series_coefficients(&h, direction, 5)?;
    let pade = pade_1d(&coeffs, 2, 3).ok();
    let poly = |e: f64, upto: usize| coeffs[..=upto].iter().rev().fold(0.0, |acc, &a| acc * e + a);
    let opts = EvalOptions::default();
    let rows = eps
        .par_iter()
        .map(|&e| {
            let exact = evaluate(method, c, &direction.scaled(e), &opts)?.value;
            Ok(PathRow {
                eps: e,
                exact,
                series3: poly(e, 3),
                series5: poly(e, 5),
                pade23: pade.as_ref().map(|p| p.eval(e)),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok((rows, coeffs))
}

pub fn run(args: &SweepArgs, out: &mut dyn Write, _err: &mut dyn Write) -> CliResult<()> {
    let inst = load_instance(&args.instance)?;
    let c = &inst.cost;
    let method = reference_method(args.method, c.n())?;
    let mut csv = Csv::default();
    if args.grid {
        let gr = args.gamma_range.ok_or_else(|| CliError::Input("--grid needs --gamma-range".into()))?;
        let br = args.beta_range.ok_or_else(|| CliError::Input("--grid needs --beta-range".into()))?;
        check_method(method, c, &QaoaSchedule::single(0.0, 0.0))?;
        let points: Vec<(f64, f64)> =
            gr.values().into_iter().flat_map(|g| br.values().into_iter().map(move |b| (g, b))).collect();
        let opts = EvalOptions::default();
        let vals = points
            .par_iter()
            .map(|&(g, b)| evaluate(method, c, &QaoaSchedule::single(g, b), &opts).map(|e| e.value))
            .collect::<CliResult<Vec<_>>>()?;
        csv.meta(format!("qaoa-calc sweep grid; schema {GRID_SCHEMA}"));
        csv.meta(format!("instance: {}", inst.label));
        csv.meta(format!("QAOA_1 <C> by {method}; gamma outer, beta inner"));
        csv.row(&["gamma", "beta", "value"]);
        for (&(g, b), v) in points.iter().zip(&vals) {
            csv.row(&[fmt_f(g), fmt_f(b), fmt_f(*v)]);
        }
    } else {
        let direction = args.schedule.resolve()?;
        check_method(method, c, &direction)?;
        let points = args.points.unwrap_or(101);
        if points == 0 {
            return Err(CliError::Input("--points must be positive".into()));
        }
        let (lo, hi) = (args.eps_min.unwrap_or(0.0), args.eps_max.unwrap_or(1.0));
        let eps: Vec<f64> = if points == 1 {
            vec![hi]
        } else {
            (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect()
        };
        let (rows, coeffs) = path_rows(c, &direction, method, &eps)?;
        csv.meta(format!("qaoa-calc sweep path; schema {PATH_SCHEMA}"));
        csv.meta(format!("instance: {}", inst.label));
        let g: Vec<String> = direction.gammas().iter().map(|v| v.to_string()).collect();
        let b: Vec<String> = direction.betas().iter().map(|v| v.to_string()).collect();
        csv.meta(format!("path: gamma = eps*({}), beta = eps*({})", g.join(";"), b.join(";")));
        let cs: Vec<String> = coeffs.iter().map(|&v| fmt_f(v)).collect();
        csv.meta(format!("series coefficients by order 0..5: {}", cs.join(" ")));
        csv.meta(format!(
            "columns: exact by {method}; series3/series5 truncate at total angle order 3/5; pade23 is the [2/3] approximant of the order-5 series{}",
            if rows.first().is_some_and(|r| r.pade23.is_none()) { " (singular; left empty)" } else { "" }
        ));
        csv.row(&["eps", "exact", "series3", "series5", "pade23"]);
        for r in &rows {
            csv.row(&[
                fmt_f(r.eps),
                fmt_f(r.exact),
                fmt_f(r.series3),
                fmt_f(r.series5),
                r.pade23.map(fmt_f).unwrap_or_default(),
            ]);
        }
    }
    emit(&csv.into_string(), args.output.as_deref(), out)
}
