//! `lightcone`: nested lightcone sets `L_{j,0} ⊆ ... ⊆ L_{j,p}` of cost clauses.

use std::io::Write;

use qaoa_calc::exact::{lightcone, lightcone_size_bound};

use crate::args::LightconeArgs;
use crate::commands::{emit, load_instance, Csv};
use crate::error::{CliError, CliResult};

/// Column-set version of the lightcone CSV.
pub const SCHEMA: &str = "lightcone/1";

pub fn run(args: &LightconeArgs, out: &mut dyn Write, _err: &mut dyn Write) -> CliResult<()> {
    let inst = load_instance(&args.instance)?;
    let c = &inst.cost;
    let p = args.p.unwrap_or(1);
    let m = c.clauses().len();
    let clauses: Vec<usize> = match args.clause {
        Some(j) if j == 0 || j > m => return Err(CliError::Input(format!("clause {j} outside 1..={m}"))),
        Some(j) => vec![j - 1],
        None => (0..m).collect(),
    };
    let k = c.max_clause_width();
    let d = (0..c.n()).map(|v| c.clauses_of(v).len()).max().unwrap_or(0);
    let mut csv = Csv::default();
    csv.meta(format!("qaoa-calc lightcone; schema {SCHEMA}"));
    csv.meta(format!("instance: {}", inst.label));
    csv.meta(format!("clause width k = {k}, max clauses per variable D = {d}; bound = min(k(1+(D-1)(k-1))^level, n)"));
    csv.meta("qubits are 1-based and space-separated");
    csv.row(&["clause", "level", "size", "bound", "qubits"]);
    for j in clauses {
        let cone = lightcone(c, j, p)?;
        for l in 0..=p {
            let q: Vec<String> = cone.qubits(l).iter().map(|v| (v + 1).to_string()).collect();
            csv.row(&[
                (j + 1).to_string(),
                l.to_string(),
                cone.size(l).to_string(),
                lightcone_size_bound(k, d, l, c.n()).to_string(),
                q.join(" "),
            ]);
        }
    }
    emit(&csv.into_string(), args.output.as_deref(), out)
}
