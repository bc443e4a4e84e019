//! `sample`: classical leading-order sampler.

use std::io::Write;

use qaoa_calc::cost::format_bitstring;
use qaoa_calc::emulate::{
    derivative_bound, empirical_distribution, exact_induced_distribution, sample, tv_distance, SamplerConfig,
    SamplerMode, DEFAULT_SMALL_BETA_CONSTANT, INDUCED_ENUM_LIMIT, RNG_ALGORITHM,
};

use crate::args::{SampleArgs, SampleMode};
use crate::commands::{emit, fmt_f, load_instance};
use crate::error::{CliError, CliResult};

pub fn run(args: &SampleArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let inst = load_instance(&args.instance)?;
    let c = &inst.cost;
    let sched = args.schedule.resolve()?;
    let mode = args.mode.unwrap_or(if sched.p() > 1 { SampleMode::EffectiveAngles } else { SampleMode::LeadingOrder });
    if sched.p() == 0 {
        return Err(CliError::Input("sampler needs p ≥ 1".into()));
    }
    if sched.p() > 1 && mode != SampleMode::EffectiveAngles {
        return Err(CliError::Input("p > 1 schedules need --mode effective-angles".into()));
    }
    let bound = derivative_bound(c);
    let k = args.k.unwrap_or(bound.value);
    let seed = args.seed.unwrap_or(0);
    let (g, b) = (sched.gammas()[0], sched.betas()[0]);
    let cfg = match mode {
        SampleMode::LeadingOrder => SamplerConfig::leading_order(g, b, k, seed),
        SampleMode::SmallBeta => SamplerConfig {
            gamma: g,
            beta: b,
            k,
            mode: SamplerMode::SmallBeta { b: args.small_beta_constant.unwrap_or(DEFAULT_SMALL_BETA_CONSTANT) },
            seed,
        },
        SampleMode::EffectiveAngles => SamplerConfig::effective_angles(&sched, k, seed),
    };
    let count = args.samples.unwrap_or(1000);
    let xs = sample(c, &cfg, count)?;

    let n = c.n();
    let mut text = String::with_capacity(count * (n + 24));
    if args.csv {
        text.push_str("index,bitstring,cost\n");
        for (i, &x) in xs.iter().enumerate() {
            text.push_str(&format!("{i},{},{}\n", format_bitstring(x, n), fmt_f(c.eval(x))));
        }
    } else {
        for &x in &xs {
            text.push_str(&format_bitstring(x, n));
            text.push('\n');
        }
    }
    emit(&text, args.output.as_deref(), out)?;

    let costs: Vec<f64> = xs.iter().map(|&x| c.eval(x)).collect();
    let m = costs.len().max(1) as f64;
    let mean = costs.iter().sum::<f64>() / m;
    let var = if costs.len() > 1 { costs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0) } else { 0.0 };
    writeln!(err, "# instance: {}", inst.label)?;
    writeln!(err, "# mode: {mode:?}; K = {k} ({:?}); rng: {RNG_ALGORITHM}; seed = {seed}", bound.method)?;
    if mode == SampleMode::EffectiveAngles {
        writeln!(err, "# effective angle sum_(i<=j) gamma_i beta_j = {}; no error guarantee", cfg.gamma)?;
    }
    writeln!(err, "# samples = {count}; mean cost = {}; std err = {}", fmt_f(mean), fmt_f((var / m).sqrt()))?;
    if n <= INDUCED_ENUM_LIMIT.min(12) {
        let exact = exact_induced_distribution(c, &cfg)?;
        let emp = empirical_distribution(&xs, n);
        writeln!(err, "# tv distance to exact induced distribution = {}", fmt_f(tv_distance(&emp, &exact)?))?;
    }
    Ok(())
}
