//! `generate`: write generated instances in their natural file format.

use std::io::Write;

use qaoa_calc::cost::{generate_instance, parse_bitstring, InstanceSpec};

use crate::args::{GenKind, GenerateArgs};
use crate::commands::emit;
use crate::error::{CliError, CliResult};
use crate::io::write_instance;

fn spec(args: &GenerateArgs) -> CliResult<InstanceSpec> {
    let kind = args.kind.ok_or_else(|| CliError::Input("--kind is required".into()))?;
    let n = args.n.ok_or_else(|| CliError::Input("--n is required".into()))?;
    let need_m = || args.m.ok_or_else(|| CliError::Input("--m is required".into()));
    Ok(match kind {
        GenKind::Ksat => InstanceSpec::RandomKSat { n, k: args.width.unwrap_or(3), m: need_m()? },
        GenKind::MaxcutGnp => InstanceSpec::MaxCutGnp { n, p: args.edge_prob.unwrap_or(0.5) },
        GenKind::MaxcutGnm => InstanceSpec::MaxCutGnm { n, m: need_m()? },
        GenKind::Qubo => InstanceSpec::RandomQubo { n, density: args.density.unwrap_or(0.5), integer: args.integer },
        GenKind::Balanced => InstanceSpec::BalancedMax2Sat { n, cycles: args.cycles.unwrap_or(2) },
        GenKind::Ramp => InstanceSpec::HammingRamp { n, alpha: args.alpha.unwrap_or(1.0) },
        GenKind::Grover => {
            let target = match &args.target {
                Some(t) => {
                    let (x, len) = parse_bitstring(t)?;
                    if len != n {
                        return Err(CliError::Input(format!("target has {len} bits, expected {n}")));
                    }
                    x
                }
                None => 0,
            };
            InstanceSpec::Grover { n, target }
        }
    })
}

pub fn run(args: &GenerateArgs, out: &mut dyn Write, _err: &mut dyn Write) -> CliResult<()> {
    let c = generate_instance(&spec(args)?, args.seed.unwrap_or(0))?;
    let (_, text) = write_instance(&c)?;
    emit(&text, args.output.as_deref(), out)
}
