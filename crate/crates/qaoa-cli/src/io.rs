//! Instance file formats: DIMACS CNF, whitespace edge lists and structured-text QUBO files.

use std::path::Path;

use clap::ValueEnum;
use qaoa_calc::cost::{format_bitstring, parse_bitstring, CostFunction, CostKind, Graph, Literal, Qubo};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Instance file format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceFormat {
    /// DIMACS CNF (`p cnf n m`, 0-terminated clauses).
    Dimacs,
    /// `n m` header then `u v [w]` lines, 1-based.
    Edgelist,
    /// Structured-text instance in TOML.
    QuboToml,
    /// Structured-text instance in JSON.
    QuboJson,
}

impl InstanceFormat {
    /// Guess from the file extension; unknown extensions are treated as edge lists.
    pub fn detect(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("cnf") | Some("dimacs") => InstanceFormat::Dimacs,
            Some("toml") => InstanceFormat::QuboToml,
            Some("json") => InstanceFormat::QuboJson,
            _ => InstanceFormat::Edgelist,
        }
    }
}

/// Reads and parses an instance file.
pub fn read_instance(path: &Path, format: Option<InstanceFormat>) -> CliResult<CostFunction> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read instance {}: {e}", path.display())))?;
    let format = format.unwrap_or_else(|| InstanceFormat::detect(path));
    parse_instance(&text, format).map_err(|e| match e {
        CliError::Input(msg) => CliError::Input(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Parses instance text in the given format.
pub fn parse_instance(text: &str, format: InstanceFormat) -> CliResult<CostFunction> {
    match format {
        InstanceFormat::Dimacs => parse_dimacs(text),
        InstanceFormat::Edgelist => parse_edgelist(text),
        InstanceFormat::QuboToml => {
            let f: InstanceFile =
                toml::from_str(text).map_err(|e| CliError::Input(format!("invalid TOML instance: {e}")))?;
            f.into_cost()
        }
        InstanceFormat::QuboJson => {
            let f: InstanceFile =
                serde_json::from_str(text).map_err(|e| CliError::Input(format!("invalid JSON instance: {e}")))?;
            f.into_cost()
        }
    }
}

fn input_err(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("line {line}: {msg}"))
}

/// DIMACS CNF as Max-k-SAT. Width-2 formulas passing the balance check load as balanced Max-2-SAT.
pub fn parse_dimacs(text: &str) -> CliResult<CostFunction> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<Literal>> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if header.is_some() {
                return Err(input_err(line_no, "duplicate problem line"));
            }
            if parts.len() != 4 || parts[1] != "cnf" {
                return Err(input_err(line_no, "expected `p cnf <vars> <clauses>`"));
            }
            let n = parts[2].parse().map_err(|_| input_err(line_no, "bad variable count"))?;
            let m = parts[3].parse().map_err(|_| input_err(line_no, "bad clause count"))?;
            header = Some((n, m));
            continue;
        }
        let (n, _) = header.ok_or_else(|| input_err(line_no, "clause before problem line"))?;
        for tok in line.split_whitespace() {
            let v: i64 = tok.parse().map_err(|_| input_err(line_no, format!("bad literal {tok:?}")))?;
            if v == 0 {
                if current.is_empty() {
                    return Err(input_err(line_no, "empty clause"));
                }
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            let var = v.unsigned_abs() as usize;
            if var > n {
                return Err(input_err(line_no, format!("variable {var} exceeds {n}")));
            }
            current.push(Literal { var: var - 1, negated: v < 0 });
        }
    }
    let (n, m) = header.ok_or_else(|| CliError::Input("missing `p cnf` line".into()))?;
    if !current.is_empty() {
        return Err(CliError::Input("last clause is not 0-terminated".into()));
    }
    if clauses.len() != m {
        return Err(CliError::Input(format!("header declares {m} clauses, found {}", clauses.len())));
    }
    if !clauses.is_empty() && clauses.iter().all(|c| c.len() == 2) {
        let pairs: Vec<(Literal, Literal)> = clauses.iter().map(|c| (c[0], c[1])).collect();
        if let Ok(c) = CostFunction::balanced_max2sat(n, pairs) {
            return Ok(c);
        }
    }
    Ok(CostFunction::max_k_sat(n, clauses)?)
}

/// Edge list as MaxCut; any explicit weight makes the graph weighted (missing weights are 1).
pub fn parse_edgelist(text: &str) -> CliResult<CostFunction> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut weighted = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        match header {
            None => {
                if parts.len() != 2 {
                    return Err(input_err(line_no, "expected `n m` header"));
                }
                let n = parts[0].parse().map_err(|_| input_err(line_no, "bad vertex count"))?;
                let m = parts[1].parse().map_err(|_| input_err(line_no, "bad edge count"))?;
                header = Some((n, m));
            }
            Some((n, _)) => {
                if parts.len() != 2 && parts.len() != 3 {
                    return Err(input_err(line_no, "expected `u v [w]`"));
                }
                let vertex = |s: &str| -> CliResult<usize> {
                    let v: usize = s.parse().map_err(|_| input_err(line_no, format!("bad vertex {s:?}")))?;
                    if v == 0 || v > n {
                        return Err(input_err(line_no, format!("vertex {v} outside 1..={n}")));
                    }
                    Ok(v - 1)
                };
                let (u, v) = (vertex(parts[0])?, vertex(parts[1])?);
                let w = match parts.get(2) {
                    Some(s) => {
                        weighted = true;
                        let w: f64 = s.parse().map_err(|_| input_err(line_no, format!("bad weight {s:?}")))?;
                        if !w.is_finite() {
                            return Err(input_err(line_no, "weight must be finite"));
                        }
                        w
                    }
                    None => 1.0,
                };
                edges.push((u, v, w));
            }
        }
    }
    let (n, m) = header.ok_or_else(|| CliError::Input("missing `n m` header".into()))?;
    if edges.len() != m {
        return Err(CliError::Input(format!("header declares {m} edges, found {}", edges.len())));
    }
    let g = if weighted {
        Graph::weighted(n, &edges)?
    } else {
        Graph::new(n, &edges.iter().map(|&(u, v, _)| (u, v)).collect::<Vec<_>>())?
    };
    Ok(CostFunction::maxcut(&g))
}

/// Linear coefficient entry (1-based variable).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearEntry {
    pub j: usize,
    pub a: f64,
}

/// Pair coefficient entry (1-based variables).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadraticEntry {
    pub i: usize,
    pub j: usize,
    pub a: f64,
}

/// Variable convention of a structured-text QUBO.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variables {
    /// `c = a0 + Σ a_j z_j + Σ a_ij z_i z_j` with `z = (-1)^x`.
    #[default]
    Spin,
    /// `c = a0 + Σ a_j x_j + Σ a_ij x_i x_j` with `x ∈ {0, 1}`.
    Binary,
}

/// Structured-text instance. `kind` defaults to `qubo`; `hamming_ramp` uses `alpha`,
/// `grover` uses `target` (bitstring, variable 1 leftmost).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub n: usize,
    #[serde(default)]
    pub a0: f64,
    #[serde(default)]
    pub variables: Variables,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default)]
    pub linear: Vec<LinearEntry>,
    #[serde(default)]
    pub quadratic: Vec<QuadraticEntry>,
}

impl InstanceFile {
    /// Builds the cost function, converting binary-variable QUBOs to the spin form.
    pub fn into_cost(self) -> CliResult<CostFunction> {
        let n = self.n;
        let check = |v: usize| -> CliResult<usize> {
            if v == 0 || v > n {
                return Err(CliError::Input(format!("variable {v} outside 1..={n}")));
            }
            Ok(v - 1)
        };
        match self.kind.as_deref().unwrap_or("qubo") {
            "qubo" => {
                let mut a0 = self.a0;
                let mut lin = vec![0.0; n];
                let mut quad = Vec::new();
                let mut diag = vec![0.0; n];
                for e in &self.linear {
                    lin[check(e.j)?] += e.a;
                }
                for e in &self.quadratic {
                    let (i, j) = (check(e.i)?, check(e.j)?);
                    if i == j {
                        diag[i] += e.a;
                    } else {
                        quad.push((i, j, e.a));
                    }
                }
                match self.variables {
                    Variables::Spin => a0 += diag.iter().sum::<f64>(),
                    Variables::Binary => {
                        // x = (1 - z)/2
                        for (l, d) in lin.iter_mut().zip(&diag) {
                            *l += d;
                        }
                        let mut spin_lin = vec![0.0; n];
                        for (j, &a) in lin.iter().enumerate() {
                            a0 += a / 2.0;
                            spin_lin[j] -= a / 2.0;
                        }
                        for q in quad.iter_mut() {
                            let a = q.2;
                            a0 += a / 4.0;
                            spin_lin[q.0] -= a / 4.0;
                            spin_lin[q.1] -= a / 4.0;
                            q.2 = a / 4.0;
                        }
                        lin = spin_lin;
                    }
                }
                Ok(CostFunction::qubo(&Qubo::new(n, a0, lin, quad)?)?)
            }
            "hamming_ramp" => {
                let alpha = self.alpha.ok_or_else(|| CliError::Input("hamming_ramp needs `alpha`".into()))?;
                Ok(CostFunction::hamming_ramp(n, alpha))
            }
            "grover" => {
                let t = self.target.ok_or_else(|| CliError::Input("grover needs `target`".into()))?;
                let (x, len) = parse_bitstring(&t)?;
                if len != n {
                    return Err(CliError::Input(format!("target has {len} bits, expected {n}")));
                }
                Ok(CostFunction::grover(n, x)?)
            }
            other => Err(CliError::Input(format!("unknown instance kind {other:?}"))),
        }
    }

    /// Structured-text form of a QUBO, ramp or projector instance.
    pub fn from_cost(c: &CostFunction) -> Option<Self> {
        let base = |kind: &str| InstanceFile {
            kind: Some(kind.to_string()),
            n: c.n(),
            a0: 0.0,
            variables: Variables::Spin,
            alpha: None,
            target: None,
            linear: Vec::new(),
            quadratic: Vec::new(),
        };
        match c.kind() {
            CostKind::Qubo(q) => Some(InstanceFile {
                a0: q.a0,
                linear: q
                    .linear
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| **a != 0.0)
                    .map(|(j, &a)| LinearEntry { j: j + 1, a })
                    .collect(),
                quadratic: q.quadratic.iter().map(|&(i, j, a)| QuadraticEntry { i: i + 1, j: j + 1, a }).collect(),
                ..base("qubo")
            }),
            CostKind::HammingRamp { alpha } => Some(InstanceFile { alpha: Some(*alpha), ..base("hamming_ramp") }),
            CostKind::GroverProjector { target } => {
                Some(InstanceFile { target: Some(format_bitstring(*target, c.n())), ..base("grover") })
            }
            _ => None,
        }
    }
}

/// DIMACS text for Max-k-SAT and balanced Max-2-SAT instances.
pub fn write_dimacs(c: &CostFunction) -> Option<String> {
    let clauses: Vec<Vec<Literal>> = match c.kind() {
        CostKind::MaxKSat(cl) => cl.clone(),
        CostKind::BalancedMax2Sat(cl) => cl.iter().map(|&(a, b)| vec![a, b]).collect(),
        _ => return None,
    };
    let mut out = format!("p cnf {} {}\n", c.n(), clauses.len());
    for cl in &clauses {
        for l in cl {
            let v = l.var as i64 + 1;
            out.push_str(&format!("{} ", if l.negated { -v } else { v }));
        }
        out.push_str("0\n");
    }
    Some(out)
}

/// Edge-list text for a MaxCut instance; weights are written only for weighted graphs.
pub fn write_edgelist(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.m());
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if g.is_weighted() {
            out.push_str(&format!("{} {} {}\n", u + 1, v + 1, g.weight(e)));
        } else {
            out.push_str(&format!("{} {}\n", u + 1, v + 1));
        }
    }
    out
}

/// Serializes an instance in its natural format, returning `(format, text)`.
pub fn write_instance(c: &CostFunction) -> CliResult<(InstanceFormat, String)> {
    if let CostKind::MaxCut(g) = c.kind() {
        return Ok((InstanceFormat::Edgelist, write_edgelist(g)));
    }
    if let Some(t) = write_dimacs(c) {
        return Ok((InstanceFormat::Dimacs, t));
    }
    if let Some(f) = InstanceFile::from_cost(c) {
        let text = toml::to_string(&f).map_err(|e| CliError::Input(format!("cannot serialize instance: {e}")))?;
        return Ok((InstanceFormat::QuboToml, text));
    }
    Err(CliError::Input("instance kind has no file format".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimacs_round_trip() {
        let text = "c comment\np cnf 4 3\n1 -2 3 0\n-1 4\n 2 0\n3 -4 0\n";
        let c = parse_dimacs(text).unwrap();
        assert_eq!(c.n(), 4);
        assert_eq!(c.eval(0b0000), 3.0);
        let again = parse_dimacs(&write_dimacs(&c).unwrap()).unwrap();
        assert_eq!(c.values().unwrap(), again.values().unwrap());
    }

    #[test]
    fn dimacs_errors() {
        assert!(parse_dimacs("1 2 0\n").is_err());
        assert!(parse_dimacs("p cnf 2 1\n1 3 0\n").is_err());
        assert!(parse_dimacs("p cnf 2 2\n1 2 0\n").is_err());
        assert!(parse_dimacs("p cnf 2 1\n1 2\n").is_err());
        assert!(parse_dimacs("p cnf 2 1\n1 x 0\n").is_err());
    }

    #[test]
    fn balanced_dimacs_detected() {
        let c = qaoa_calc::cost::balanced_single_triangle();
        let back = parse_dimacs(&write_dimacs(&c).unwrap()).unwrap();
        assert!(matches!(back.kind(), CostKind::BalancedMax2Sat(_)));
    }

    #[test]
    fn edgelist_parsing() {
        let c = parse_edgelist("# triangle\n3 3\n1 2\n2 3\n1 3\n").unwrap();
        assert_eq!(c.eval(0b001), 2.0);
        let w = parse_edgelist("3 2\n1 2 0.5\n2 3\n").unwrap();
        assert_eq!(w.eval(0b010), 1.5);
        assert!(parse_edgelist("3 1\n1 4\n").is_err());
        assert!(parse_edgelist("3 2\n1 2\n").is_err());
    }

    #[test]
    fn binary_qubo_converts_to_spin() {
        let text = "n = 3\na0 = 1.0\nvariables = \"binary\"\nlinear = [{ j = 1, a = 2.0 }, { j = 3, a = -1.0 }]\nquadratic = [{ i = 1, j = 2, a = 3.0 }, { i = 2, j = 2, a = 0.5 }]\n";
        let c = parse_instance(text, InstanceFormat::QuboToml).unwrap();
        for x in 0..8u64 {
            let b = |j: usize| ((x >> j) & 1) as f64;
            let want = 1.0 + 2.0 * b(0) - b(2) + 3.0 * b(0) * b(1) + 0.5 * b(1);
            assert!((c.eval(x) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn structured_round_trip() {
        let json = r#"{"n": 2, "a0": 0.5, "linear": [{"j": 2, "a": 1.0}], "quadratic": [{"i": 1, "j": 2, "a": -2.0}]}"#;
        let c = parse_instance(json, InstanceFormat::QuboJson).unwrap();
        let (fmt, text) = write_instance(&c).unwrap();
        assert_eq!(fmt, InstanceFormat::QuboToml);
        let back = parse_instance(&text, fmt).unwrap();
        assert_eq!(c.values().unwrap(), back.values().unwrap());
        let ramp = parse_instance("kind = \"hamming_ramp\"\nn = 4\nalpha = 2.0\n", InstanceFormat::QuboToml).unwrap();
        assert_eq!(ramp.eval(0b1011), 6.0);
        let g = parse_instance("kind = \"grover\"\nn = 3\ntarget = \"110\"\n", InstanceFormat::QuboToml).unwrap();
        assert_eq!(g.eval(0b011), 1.0);
        assert!(parse_instance("n = 2\nbogus = 1\n", InstanceFormat::QuboToml).is_err());
    }
}
