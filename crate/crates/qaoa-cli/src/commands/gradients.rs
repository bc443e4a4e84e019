//! `gradients`: render a gradient word applied to `C` and its uniform-state expectation.

use std::io::Write;

use qaoa_calc::grad::{apply_word_with_budget, GradientWord, MixerSpec, DEFAULT_TERM_BUDGET};
use qaoa_calc::hamop::to_hamiltonian;
use qaoa_calc::series::{word_expectation_traced, EvalPath};

use crate::args::GradientsArgs;
use crate::commands::{emit, fmt_f, load_instance};
use crate::error::{CliError, CliResult};

/// Short description of the rule that produced an expectation.
pub fn path_tag(p: EvalPath) -> &'static str {
    match p {
        EvalPath::OddOrder => "zero rule: odd total order",
        EvalPath::LeadingMixer => "zero rule: leftmost letter is the mixer gradient",
        EvalPath::TrailingCost => "zero rule: cost gradient acting on a diagonal operator",
        EvalPath::CoefficientSum => "closed form: <Dc Db C> = -4 sum_a |a| c_a^2",
        EvalPath::QuadraticClosedForm => "closed form: fourth-order expectation of a quadratic cost",
        EvalPath::PauliAlgebra => "Pauli commutator algebra",
    }
}

pub fn run(args: &GradientsArgs, out: &mut dyn Write, _err: &mut dyn Write) -> CliResult<()> {
    let inst = load_instance(&args.instance)?;
    let spec = args.word.as_deref().ok_or_else(|| CliError::Input("--word is required".into()))?;
    let w = GradientWord::parse(spec).map_err(|e| CliError::Input(e.to_string()))?;
    let h = to_hamiltonian(&inst.cost)?;
    let budget = args.term_budget.unwrap_or(DEFAULT_TERM_BUDGET);
    let (value, path) = word_expectation_traced(&w, &h, budget)?;
    let mut text = format!("# instance: {}\nword: {w} C\n", inst.label);
    if !args.no_operator {
        let op = apply_word_with_budget(&w, &h, &MixerSpec::TransverseField, budget)?;
        text.push_str(&format!("terms: {}\noperator: {op}\n", op.len()));
    }
    text.push_str(&format!("expectation: {}\npath: {}\n", fmt_f(value), path_tag(path)));
    emit(&text, args.output.as_deref(), out)
}
