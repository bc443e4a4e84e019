//! Initial-state gradient expectations, leading-order formulas, the order-ℓ angle series,
//! error bounds and Padé post-processing.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::cost::{generate_instance, CostFunction, InstanceSpec};
use crate::error::{Error, Result};
use crate::grad::{apply_letters, Base, Gen, GradientWord, Letter, MixerSpec, DEFAULT_TERM_BUDGET};
use crate::hamop::{projector_ham, to_hamiltonian, DiagonalHam};
use crate::pauli::{PauliSum, C64};

/// Default cap on enumerated exponent tuples.
pub const DEFAULT_TUPLE_BUDGET: usize = 5_000_000;
/// Largest `n` for which `‖C_Z‖` is computed by enumeration.
pub const CZ_ENUM_LIMIT: usize = 14;

/// Angles `(γ_1, β_1, ..., γ_p, β_p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QaoaSchedule {
    gammas: Vec<f64>,
    betas: Vec<f64>,
}

impl QaoaSchedule {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.len() != betas.len() {
            return Err(Error::LengthMismatch { expected: gammas.len(), got: betas.len() });
        }
        if gammas.iter().chain(&betas).any(|a| !a.is_finite()) {
            return Err(Error::InvalidParameter("angles must be finite".into()));
        }
        Ok(QaoaSchedule { gammas, betas })
    }

    /// The `p = 0` schedule.
    pub fn empty() -> Self {
        QaoaSchedule { gammas: Vec::new(), betas: Vec::new() }
    }

    pub fn single(gamma: f64, beta: f64) -> Self {
        QaoaSchedule { gammas: vec![gamma], betas: vec![beta] }
    }

    /// Constant angles at every level.
    pub fn constant(p: usize, gamma: f64, beta: f64) -> Self {
        QaoaSchedule { gammas: vec![gamma; p], betas: vec![beta; p] }
    }

    /// `γ_j = γ_0 + a j`, `β_j = β_0 + b j` for `j = 1..=p`.
    pub fn linear_ramp(p: usize, gamma0: f64, a: f64, beta0: f64, b: f64) -> Self {
        QaoaSchedule {
            gammas: (1..=p).map(|j| gamma0 + a * j as f64).collect(),
            betas: (1..=p).map(|j| beta0 + b * j as f64).collect(),
        }
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// Every angle multiplied by `f`.
    pub fn scaled(&self, f: f64) -> Self {
        QaoaSchedule {
            gammas: self.gammas.iter().map(|g| g * f).collect(),
            betas: self.betas.iter().map(|b| b * f).collect(),
        }
    }

    /// `Σ_{i≤j} γ_i β_j`.
    pub fn leading_coefficient(&self) -> f64 {
        let mut acc = 0.0;
        let mut gsum = 0.0;
        for (g, b) in self.gammas.iter().zip(&self.betas) {
            gsum += g;
            acc += gsum * b;
        }
        acc
    }
}

/// How a word expectation was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EvalPath {
    /// Odd total order.
    OddOrder,
    /// Leftmost letter is the mixer gradient.
    LeadingMixer,
    /// Rightmost letter is the cost gradient acting on a diagonal base.
    TrailingCost,
    /// `⟨∇_C∇C⟩_0` from the Pauli coefficients.
    CoefficientSum,
    /// Fourth-order closed form for an at most 2-local cost.
    QuadraticClosedForm,
    /// Full commutator algebra.
    PauliAlgebra,
}

impl EvalPath {
    /// True for the paths that return zero without computation.
    pub fn is_zero_rule(self) -> bool {
        matches!(self, EvalPath::OddOrder | EvalPath::LeadingMixer | EvalPath::TrailingCost)
    }
}

/// `⟨s|w(C)|s⟩` for the transverse-field mixer.
pub fn word_expectation(w: &GradientWord, c: &DiagonalHam) -> Result<f64> {
    word_expectation_traced(w, c, DEFAULT_TERM_BUDGET).map(|r| r.0)
}

/// Word expectation with the evaluation path that produced it.
pub fn word_expectation_traced(w: &GradientWord, c: &DiagonalHam, budget: usize) -> Result<(f64, EvalPath)> {
    let b = MixerSpec::TransverseField.pauli(c.n())?;
    let mut quad = None;
    word_expectation_inner(w, c, &b, &mut quad, budget)
}

/// Zero rules and closed forms; `None` means Pauli algebra is required.
fn fast_path(w: &GradientWord, c: &DiagonalHam, quad: &mut Option<Option<QuadData>>) -> Option<(f64, EvalPath)> {
    if w.order() % 2 == 1 {
        return Some((0.0, EvalPath::OddOrder));
    }
    if w.leftmost() == Some(Gen::Mixer) {
        return Some((0.0, EvalPath::LeadingMixer));
    }
    if w.vanishes_on_diagonal_base() {
        return Some((0.0, EvalPath::TrailingCost));
    }
    if w.base != Base::Cost {
        return None;
    }
    let r = w.reduced().letters;
    let pat: Vec<(Gen, u32)> = r.iter().map(|l| (l.gen, l.power)).collect();
    if pat == [(Gen::Cost, 1), (Gen::Mixer, 1)] {
        return Some((cdc_expectation(c), EvalPath::CoefficientSum));
    }
    let q = quad.get_or_insert_with(|| QuadData::new(c)).as_ref()?;
    let v = match pat.as_slice() {
        [(Gen::Cost, 1), (Gen::Mixer, 3)] => q.cd3c(),
        [(Gen::Cost, 2), (Gen::Mixer, 2)] => q.c2d2c(),
        [(Gen::Cost, 3), (Gen::Mixer, 1)] => q.c3dc(),
        _ => return None,
    };
    Some((v, EvalPath::QuadraticClosedForm))
}

fn word_expectation_inner(
    w: &GradientWord,
    c: &DiagonalHam,
    b: &PauliSum,
    quad: &mut Option<Option<QuadData>>,
    budget: usize,
) -> Result<(f64, EvalPath)> {
    if let Some(r) = fast_path(w, c, quad) {
        return Ok(r);
    }
    Ok((pauli_word_expectation(w, c, b, budget)?, EvalPath::PauliAlgebra))
}

fn pauli_word_expectation(w: &GradientWord, c: &DiagonalHam, b: &PauliSum, budget: usize) -> Result<f64> {
    let base = match &w.base {
        Base::Cost => c.op(),
        Base::Operator(op) => op,
    };
    let v: C64 = apply_letters(&w.letters, base, b, c.op(), budget)?.plus_expectation();
    Ok(v.re)
}

/// Word expectation by commutator algebra only, bypassing every shortcut.
pub fn word_expectation_pauli(w: &GradientWord, c: &DiagonalHam) -> Result<C64> {
    let b = MixerSpec::TransverseField.pauli(c.n())?;
    let base = match &w.base {
        Base::Cost => c.op(),
        Base::Operator(op) => op,
    };
    Ok(apply_letters(&w.letters, base, &b, c.op(), DEFAULT_TERM_BUDGET)?.plus_expectation())
}

/// `⟨∇_C∇C⟩_0 = -4 Σ_α |α| a_α²`.
pub fn cdc_expectation(c: &DiagonalHam) -> f64 {
    -4.0 * c.coefficients().iter().map(|&(z, a)| z.count_ones() as f64 * a * a).sum::<f64>()
}

/// Linear and pair coefficients of an at most 2-local Hamiltonian.
struct QuadData {
    lin: Vec<f64>,
    adj: Vec<Vec<(usize, f64)>>,
    pairs: HashMap<(usize, usize), f64>,
}

impl QuadData {
    fn new(c: &DiagonalHam) -> Option<Self> {
        if c.locality() > 2 {
            return None;
        }
        let n = c.n();
        let mut lin = vec![0.0; n];
        let mut adj = vec![Vec::new(); n];
        let mut pairs = HashMap::new();
        for (z, a) in c.coefficients() {
            match z.count_ones() {
                1 => lin[z.trailing_zeros() as usize] = a,
                2 => {
                    let i = z.trailing_zeros() as usize;
                    let j = 63 - z.leading_zeros() as usize;
                    adj[i].push((j, a));
                    adj[j].push((i, a));
                    pairs.insert((i, j), a);
                }
                _ => {}
            }
        }
        Some(QuadData { lin, adj, pairs })
    }

    /// `⟨∇_C∇³C⟩_0 = -16 Σ a_i² - 128 Σ a_ij²`.
    fn cd3c(&self) -> f64 {
        let s1: f64 = self.lin.iter().map(|a| a * a).sum();
        let s2: f64 = self.pairs.values().map(|a| a * a).sum();
        -16.0 * s1 - 128.0 * s2
    }

    /// `⟨∇_C²∇²C⟩_0 = 64 Σ a_i a_j a_ij + 192 Σ_{i<j<k} a_ij a_jk a_ik`.
    fn c2d2c(&self) -> f64 {
        let mut keys: Vec<_> = self.pairs.iter().map(|(&k, &v)| (k, v)).collect();
        keys.sort_by_key(|a| a.0);
        let mut lin = 0.0;
        let mut tri = 0.0;
        for &((i, j), a) in &keys {
            lin += self.lin[i] * self.lin[j] * a;
            for &(k, b) in &self.adj[j] {
                if k > j {
                    if let Some(&d) = self.pairs.get(&(i, k)) {
                        tri += a * b * d;
                    }
                }
            }
        }
        64.0 * lin + 192.0 * tri
    }

    /// `⟨∇_C³∇C⟩_0 = -2^{-n} Σ_x Σ_j (∂_j c)^4`, with the uniform average of
    /// `(a_j + Σ_k a_jk z_k)^4` taken in closed form.
    fn c3dc(&self) -> f64 {
        let mut acc = 0.0;
        for (j, &a) in self.lin.iter().enumerate() {
            let s2: f64 = self.adj[j].iter().map(|(_, b)| b * b).sum();
            let s4: f64 = self.adj[j].iter().map(|(_, b)| b.powi(4)).sum();
            acc += a.powi(4) + 6.0 * a * a * s2 + 3.0 * s2 * s2 - 2.0 * s4;
        }
        -16.0 * acc
    }
}

/// Leading-order QAOA_1 output distribution and cost expectation.
#[derive(Clone, Debug)]
pub struct LeadingOrder1<'a> {
    c: &'a CostFunction,
    pub gamma: f64,
    pub beta: f64,
    /// Estimated `⟨C⟩_1`.
    pub expectation: f64,
}

impl LeadingOrder1<'_> {
    /// `P̃_1(x) = 2^{-n} - (2γβ/2^n) dc(x)`.
    pub fn probability(&self, x: u64) -> Result<f64> {
        let scale = 1.0 / (1u64 << self.c.n()) as f64;
        Ok(scale - 2.0 * self.gamma * self.beta * scale * self.c.divergence(x, 1)?)
    }

    /// `P̃_1` for every basis state.
    pub fn probabilities(&self) -> Result<Vec<f64>> {
        let scale = 1.0 / (1u64 << self.c.n()) as f64;
        Ok(self.c.divergence_vector(1)?.into_iter().map(|d| scale - 2.0 * self.gamma * self.beta * scale * d).collect())
    }
}

/// `⟨C⟩_1 ≈ ⟨C⟩_0 - γβ⟨∇_C∇C⟩_0` together with `P̃_1`.
pub fn leading_order_qaoa1(c: &CostFunction, gamma: f64, beta: f64) -> Result<LeadingOrder1<'_>> {
    let h = to_hamiltonian(c)?;
    let expectation = h.a0() - gamma * beta * cdc_expectation(&h);
    Ok(LeadingOrder1 { c, gamma, beta, expectation })
}

/// `⟨C⟩_p ≈ ⟨C⟩_0 - (Σ_{i≤j} γ_i β_j)⟨∇_C∇C⟩_0`.
pub fn leading_order_qaoap(c: &DiagonalHam, sched: &QaoaSchedule) -> f64 {
    c.a0() - sched.leading_coefficient() * cdc_expectation(c)
}

/// Leading-order value from a quench `e^{-iτH}` with `τH = √2 β B + √2 γ C`.
pub fn quench_leading(c: &DiagonalHam, gamma: f64, beta: f64) -> f64 {
    c.a0() - gamma * beta * cdc_expectation(c)
}

/// `(a, b)` such that `H = a C + b B` at `τ = 1` reproduces the leading-order QAOA_1 change.
pub fn quench_coefficients(gamma: f64, beta: f64) -> (f64, f64) {
    (std::f64::consts::SQRT_2 * gamma, std::f64::consts::SQRT_2 * beta)
}

/// Budgets for the series engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeriesOptions {
    pub term_budget: usize,
    pub tuple_budget: usize,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions { term_budget: DEFAULT_TERM_BUDGET, tuple_budget: DEFAULT_TUPLE_BUDGET }
    }
}

/// One retained exponent tuple `(a_1, b_1, ..., a_p, b_p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesTerm {
    pub exponents: Vec<u32>,
    /// `Π (iγ_j)^{a_j} (iβ_j)^{b_j} / (a_j! b_j!)`, real for even order.
    pub coefficient: f64,
    pub expectation: f64,
}

/// Result of the order-ℓ angle series.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesEstimate {
    pub value: f64,
    pub order: u32,
    pub terms: Vec<SeriesTerm>,
    /// Tuples dropped by the zero rules.
    pub pruned_count: usize,
    /// Contribution of each total order `0..=ℓ`.
    pub by_order: Vec<f64>,
    /// Distinct reduced words evaluated.
    pub distinct_words: usize,
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

fn enumerate_tuples(slots: usize, max: u32, budget: usize) -> Result<Vec<Vec<u32>>> {
    fn rec(cur: &mut Vec<u32>, slots: usize, left: u32, out: &mut Vec<Vec<u32>>, budget: usize) -> Result<()> {
        if cur.len() == slots {
            if out.len() >= budget {
                return Err(Error::SizeLimit { what: "series tuples", limit: budget, got: budget + 1 });
            }
            out.push(cur.clone());
            return Ok(());
        }
        for e in 0..=left {
            cur.push(e);
            rec(cur, slots, left - e, out, budget)?;
            cur.pop();
        }
        Ok(())
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(slots), slots, max, &mut out, budget)?;
    Ok(out)
}

fn tuple_letters(t: &[u32]) -> Vec<Letter> {
    t.chunks(2).flat_map(|ab| [Letter::cost(ab[0]), Letter::mixer(ab[1])]).collect()
}

/// Order-ℓ series for `⟨s|Q† A Q|s⟩` with `A = C` or a diagonal base operator.
pub fn series_engine(
    c: &DiagonalHam,
    base: Option<&PauliSum>,
    sched: &QaoaSchedule,
    order: u32,
    opts: SeriesOptions,
) -> Result<SeriesEstimate> {
    let n = c.n();
    let base_word = |letters: Vec<Letter>| match base {
        None => GradientWord::new(letters),
        Some(op) => GradientWord::with_base(letters, op.clone()),
    };
    if let Some(op) = base {
        if op.n() != n {
            return Err(Error::DimensionMismatch { left: n, right: op.n() });
        }
    }
    let tuples = enumerate_tuples(2 * sched.p(), order, opts.tuple_budget)?;
    let mut quad = None;
    let mut pruned = 0usize;
    let mut kept: Vec<(Vec<u32>, Vec<Letter>)> = Vec::new();
    let mut pending: BTreeMap<Vec<Letter>, Option<f64>> = BTreeMap::new();
    for t in tuples {
        let letters = tuple_letters(&t);
        let w = base_word(letters).reduced();
        match fast_path(&w, c, &mut quad) {
            Some((_, p)) if p.is_zero_rule() => pruned += 1,
            Some((v, _)) => {
                pending.insert(w.letters.clone(), Some(v));
                kept.push((t, w.letters));
            }
            None => {
                pending.entry(w.letters.clone()).or_insert(None);
                kept.push((t, w.letters));
            }
        }
    }
    let b = MixerSpec::TransverseField.pauli(n)?;
    let todo: Vec<Vec<Letter>> = pending.iter().filter(|(_, v)| v.is_none()).map(|(k, _)| k.clone()).collect();
    let computed: Vec<Result<f64>> =
        todo.par_iter().map(|l| pauli_word_expectation(&base_word(l.clone()), c, &b, opts.term_budget)).collect();
    for (k, v) in todo.into_iter().zip(computed) {
        pending.insert(k, Some(v?));
    }
    let mut by_order = vec![0.0; order as usize + 1];
    let mut terms = Vec::with_capacity(kept.len());
    for (t, letters) in kept {
        let tot: u32 = t.iter().sum();
        let sign = if (tot / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut coef = sign;
        for (j, ab) in t.chunks(2).enumerate() {
            coef *= sched.gammas()[j].powi(ab[0] as i32) / factorial(ab[0]);
            coef *= sched.betas()[j].powi(ab[1] as i32) / factorial(ab[1]);
        }
        let e = pending[&letters].expect("filled above");
        by_order[tot as usize] += coef * e;
        terms.push(SeriesTerm { exponents: t, coefficient: coef, expectation: e });
    }
    let value = by_order.iter().sum();
    Ok(SeriesEstimate { value, order, terms, pruned_count: pruned, by_order, distinct_words: pending.len() })
}

/// Order-ℓ series for `⟨C⟩_p`.
pub fn series_qaoap(c: &DiagonalHam, sched: &QaoaSchedule, order: u32) -> Result<SeriesEstimate> {
    series_engine(c, None, sched, order, SeriesOptions::default())
}

/// Order-ℓ series for `P_1(x)` using the projector `|x⟩⟨x|` as base operator.
pub fn probability_series_qaoa1(c: &DiagonalHam, x: u64, gamma: f64, beta: f64, order: u32) -> Result<f64> {
    let h = projector_ham(x, c.n())?;
    Ok(series_engine(c, Some(h.op()), &QaoaSchedule::single(gamma, beta), order, SeriesOptions::default())?.value)
}

/// The four fourth-order expectations of the fifth-order formula.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourthOrderExpectations {
    /// `⟨∇_C∇C⟩_0`.
    pub cdc: f64,
    /// `⟨∇_C∇³C⟩_0`.
    pub cd3c: f64,
    /// `⟨∇_C³∇C⟩_0`.
    pub c3dc: f64,
    /// `⟨∇_C²∇²C⟩_0`.
    pub c2d2c: f64,
}

impl FourthOrderExpectations {
    pub fn new(c: &DiagonalHam) -> Result<Self> {
        let w = |l: Vec<Letter>| word_expectation(&GradientWord::new(l), c);
        Ok(FourthOrderExpectations {
            cdc: cdc_expectation(c),
            cd3c: w(vec![Letter::cost(1), Letter::mixer(3)])?,
            c3dc: w(vec![Letter::cost(3), Letter::mixer(1)])?,
            c2d2c: w(vec![Letter::cost(2), Letter::mixer(2)])?,
        })
    }
}

/// Angle polynomials multiplying the four expectations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FifthOrderCoefficients {
    pub cdc: f64,
    pub cd3c: f64,
    pub c3dc: f64,
    pub c2d2c: f64,
}

/// Evaluates the index sums of the fifth-order formula (indices are 0-based here).
#[allow(clippy::needless_range_loop)]
pub fn fifth_order_coefficients(sched: &QaoaSchedule) -> FifthOrderCoefficients {
    let g = sched.gammas();
    let b = sched.betas();
    let p = sched.p();
    let mut cd3c = 0.0;
    let mut c3dc = 0.0;
    let mut c2d2c = 0.0;
    for i in 0..p {
        for j in i..p {
            cd3c += g[i] * b[j].powi(3) / 6.0;
            c3dc += g[i].powi(3) * b[j] / 6.0;
            c2d2c += g[i].powi(2) * b[j].powi(2) / 4.0;
            for k in j + 1..p {
                cd3c += 0.5 * g[i] * (b[j] * b[j] * b[k] + b[j] * b[k] * b[k]);
                for l in k + 1..p {
                    cd3c += g[i] * b[j] * b[k] * b[l];
                }
            }
        }
    }
    for j in 0..p {
        for k in j + 1..p {
            for l in k..p {
                c3dc += 0.5 * (g[j] * g[j] * g[k] + g[j] * g[k] * g[k]) * b[l];
            }
        }
    }
    for i in 0..p {
        for j in i + 1..p {
            for k in j + 1..p {
                for l in k..p {
                    c3dc += g[i] * g[j] * g[k] * b[l];
                }
            }
        }
    }
    for i in 0..p {
        for j in i + 1..p {
            for k in j..p {
                c2d2c += 0.5 * g[i] * g[j] * b[k] * b[k];
                for l in k + 1..p {
                    c2d2c += g[i] * g[j] * b[k] * b[l];
                }
            }
        }
        for k in i..p {
            for l in k + 1..p {
                c2d2c += 0.5 * g[i] * g[i] * b[k] * b[l];
            }
        }
        for j in i..p {
            for k in j + 1..p {
                for l in k..p {
                    c2d2c += g[i] * b[j] * g[k] * b[l];
                }
            }
        }
    }
    FifthOrderCoefficients { cdc: -sched.leading_coefficient(), cd3c, c3dc, c2d2c }
}

/// `⟨C⟩_p` through fifth order in the angles.
pub fn fifth_order_qaoap(c: &DiagonalHam, sched: &QaoaSchedule) -> Result<f64> {
    let e = FourthOrderExpectations::new(c)?;
    Ok(fifth_order_with(c.a0(), &e, sched))
}

/// Fifth-order value from precomputed expectations.
pub fn fifth_order_with(c0: f64, e: &FourthOrderExpectations, sched: &QaoaSchedule) -> f64 {
    let k = fifth_order_coefficients(sched);
    c0 + k.cdc * e.cdc + k.cd3c * e.cd3c + k.c3dc * e.c3dc + k.c2d2c * e.c2d2c
}

/// How `‖C_Z‖` was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CzNormMode {
    Enumerated,
    CoefficientBound,
}

/// Error bounds for the leading-order QAOA_1 estimates.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorBounds {
    /// Bound on `|⟨C⟩_1 - (⟨C⟩_0 - γβ⟨∇_C∇C⟩_0)|`.
    pub expectation_bound: f64,
    /// Bound on `|P_1(x) - P̃_1(x)|`.
    pub probability_bound: f64,
    pub locality: usize,
    pub star_norm: f64,
    pub cz_norm: f64,
    pub cz_mode: CzNormMode,
    /// `‖C‖` when enumerable.
    pub spectral_norm: Option<f64>,
    pub n: usize,
}

impl ErrorBounds {
    /// `(γ_max, β_max for expectations, β_max for probabilities)` at accuracy `ε`.
    pub fn eps_ranges(&self, eps: f64) -> (f64, f64, f64) {
        let m = self.spectral_norm.map_or(self.cz_norm, |s| s.min(self.cz_norm));
        let g = eps.powf(0.25) / (2.0 * m);
        let be = eps.sqrt() / (2.0 * self.locality as f64);
        let bp = 0.4 * eps.sqrt() / self.n as f64;
        (g, be, bp)
    }

    /// `min(‖C_Z‖, ‖C‖)`.
    pub fn min_norm(&self) -> f64 {
        self.spectral_norm.map_or(self.cz_norm, |s| s.min(self.cz_norm))
    }
}

/// Expectation and probability error bounds at `(γ, β)`.
pub fn error_bounds(c: &DiagonalHam, gamma: f64, beta: f64) -> Result<ErrorBounds> {
    let n = c.n();
    let k = c.locality().max(1);
    let s = c.star_norm();
    let (g, b) = (gamma.abs(), beta.abs());
    let expectation_bound = 4.0 * b * g * g * k as f64 * s.powi(3) + 4.0 * b * b * g * (k * k) as f64 * s * s;
    let nf = n as f64;
    let probability_bound = 2.0 / 2f64.powi(n as i32)
        * (nf * nf * b * b * (2.0 * nf * b).exp() + 4.0 / 3.0 * nf * b * g.powi(3) * s.powi(3) * (2.0 * g * s).cosh());
    let (cz_norm, cz_mode) = if n <= CZ_ENUM_LIMIT {
        (c.cz_norm()?, CzNormMode::Enumerated)
    } else {
        let bound = c.coefficients().iter().filter(|(z, _)| *z != 0).map(|(_, a)| a.abs()).sum();
        (bound, CzNormMode::CoefficientBound)
    };
    let spectral_norm = if n <= CZ_ENUM_LIMIT { Some(c.spectral_norm()?) } else { None };
    Ok(ErrorBounds {
        expectation_bound,
        probability_bound,
        locality: k,
        star_norm: s,
        cz_norm,
        cz_mode,
        spectral_norm,
        n,
    })
}

/// Angles with a guaranteed improvement over uniform sampling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomGuessingWitness {
    pub gamma: f64,
    pub beta: f64,
    pub guaranteed_gain: f64,
}

/// `a = -⟨∇_C∇C⟩_0`, `ε = (a/(8n‖C‖²))⁴`, `γ = ε^{1/4}/(2‖C‖)`, `β = √ε/(2n)`, gain `γβa/2`.
pub fn beats_random_guessing(c: &DiagonalHam) -> Result<RandomGuessingWitness> {
    let a = -cdc_expectation(c);
    if a <= 0.0 {
        return Err(Error::ConstantCost);
    }
    let n = c.n() as f64;
    let norm = c.spectral_norm()?;
    let eps = (a / (8.0 * n * norm * norm)).powi(4);
    let gamma = eps.powf(0.25) / (2.0 * norm);
    let beta = eps.sqrt() / (2.0 * n);
    Ok(RandomGuessingWitness { gamma, beta, guaranteed_gain: gamma * beta * a / 2.0 })
}

/// Rational approximant `P(ε)/Q(ε)` with `Q(0) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pade {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
}

impl Pade {
    pub fn eval(&self, eps: f64) -> f64 {
        let horner = |c: &[f64]| c.iter().rev().fold(0.0, |acc, &a| acc * eps + a);
        horner(&self.num) / horner(&self.den)
    }
}

/// `[m/n]` Padé approximant of the series `Σ coeffs[k] ε^k`.
pub fn pade_1d(coeffs: &[f64], m: usize, n: usize) -> Result<Pade> {
    if coeffs.len() < m + n + 1 {
        return Err(Error::LengthMismatch { expected: m + n + 1, got: coeffs.len() });
    }
    let c = |k: isize| if k < 0 { 0.0 } else { coeffs[k as usize] };
    let mut den = vec![1.0];
    if n > 0 {
        let a = DMatrix::from_fn(n, n, |i, k| c(m as isize + i as isize + 1 - (k as isize + 1)));
        let rhs = DVector::from_fn(n, |i, _| -c((m + i + 1) as isize));
        let lu = a.lu();
        let q = lu.solve(&rhs).ok_or(Error::SingularPade { m, n })?;
        if q.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularPade { m, n });
        }
        den.extend(q.iter());
    }
    let num = (0..=m).map(|i| (0..=i.min(n)).map(|k| den[k] * c(i as isize - k as isize)).sum()).collect();
    Ok(Pade { num, den })
}

/// Series coefficients of `⟨C⟩` along `ε ↦ ε·direction`, orders `0..=ℓ`.
pub fn path_series_coefficients(c: &DiagonalHam, direction: &QaoaSchedule, order: u32) -> Result<Vec<f64>> {
    Ok(series_qaoap(c, direction, order)?.by_order)
}

/// Seeded Monte Carlo summary over an instance class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloSummary {
    pub samples: usize,
    pub mean: f64,
    pub variance: f64,
    pub std_err: f64,
}

/// Mean, sample variance and standard error of `f` over generated instances with seeds `seed + i`.
pub fn instance_average<F>(spec: &InstanceSpec, samples: usize, seed: u64, f: F) -> Result<MonteCarloSummary>
where
    F: Fn(&CostFunction) -> Result<f64> + Sync,
{
    if samples < 2 {
        return Err(Error::InvalidParameter("at least two samples are required".into()));
    }
    let vals: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| generate_instance(spec, seed.wrapping_add(i as u64)).and_then(|c| f(&c)))
        .collect::<Result<_>>()?;
    let mean = vals.iter().sum::<f64>() / samples as f64;
    let variance = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
    Ok(MonteCarloSummary { samples, mean, variance, std_err: (variance / samples as f64).sqrt() })
}
