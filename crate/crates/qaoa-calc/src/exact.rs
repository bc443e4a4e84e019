//! Exact arbitrary-angle expectations: lightcones, layer-by-layer Heisenberg conjugation and
//! per-problem QAOA_1 closed forms.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cost::{triangle_parities, CostFunction, CostKind, Graph};
use crate::error::{Error, Result};
use crate::grad::{apply_letters, Letter, MixerSpec, DEFAULT_TERM_BUDGET};
use crate::hamop::{to_hamiltonian, DiagonalHam};
use crate::oracle::qaoa_state;
use crate::pauli::{PauliSum, C64, PRUNE_TOL};
use crate::series::QaoaSchedule;

/// Largest QAOA_1 lightcone enumerated by [`qubo_p1`].
pub const QUBO_CONE_LIMIT: usize = 22;
/// Largest `n` for the enumerated small-β formula.
pub const SMALL_BETA_LIMIT: usize = 26;

/// Nested lightcones `N_j = L_{j,0} ⊆ L_{j,1} ⊆ ... ⊆ L_{j,p}` as qubit masks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lightcone {
    pub clause: usize,
    pub sets: Vec<u64>,
}

impl Lightcone {
    pub fn level(&self, l: usize) -> u64 {
        self.sets[l]
    }

    pub fn size(&self, l: usize) -> usize {
        self.sets[l].count_ones() as usize
    }

    /// Qubits of `L_{j,l}` in increasing order.
    pub fn qubits(&self, l: usize) -> Vec<usize> {
        bits(self.sets[l])
    }
}

fn bits(mut m: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(m.count_ones() as usize);
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

/// Lightcone of support `masks[j]` among the supports `masks`.
pub fn lightcone_of_masks(masks: &[u64], j: usize, p: usize) -> Result<Lightcone> {
    let start = *masks.get(j).ok_or(Error::IndexOutOfRange { index: j, n: masks.len() })?;
    let mut sets = vec![start];
    let mut cur = start;
    for _ in 0..p {
        let next = masks.iter().filter(|&&m| m & cur != 0).fold(cur, |acc, &m| acc | m);
        sets.push(next);
        cur = next;
    }
    Ok(Lightcone { clause: j, sets })
}

/// Lightcone of clause `j` of a cost function.
pub fn lightcone(c: &CostFunction, j: usize, p: usize) -> Result<Lightcone> {
    let masks: Vec<u64> = c.clauses().iter().map(|cl| cl.mask()).collect();
    lightcone_of_masks(&masks, j, p)
}

/// Size bound `min(k (1 + (D-1)(k-1))^l, n)` for `k`-local terms with every qubit in at most `D` terms.
pub fn lightcone_size_bound(k: usize, d: usize, l: usize, n: usize) -> usize {
    let growth = 1 + d.saturating_sub(1) * k.saturating_sub(1);
    let mut b = k as u128;
    for _ in 0..l {
        b = b.saturating_mul(growth as u128);
        if b >= n as u128 {
            return n;
        }
    }
    (b as usize).min(n)
}

/// Options for [`expectation_exact_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactOptions {
    pub term_budget: usize,
    /// Evaluate lightcone-isomorphic terms once.
    pub dedup: bool,
    /// Run the conjugation without coefficient pruning.
    pub exact_arith: bool,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions { term_budget: DEFAULT_TERM_BUDGET, dedup: true, exact_arith: false }
    }
}

/// Value and bookkeeping of an exact evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactReport {
    pub value: f64,
    /// Non-identity Pauli terms of `C`.
    pub terms: usize,
    /// Distinct conjugations performed.
    pub unique: usize,
    /// Largest final lightcone.
    pub max_cone: usize,
}

/// Canonical relabeled sub-instance seen by one term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct ConeKey {
    n: usize,
    target: u64,
    terms: Vec<(u64, u64)>,
}

/// Restricts `C` to the terms meeting `L_{j,p-1}` and relabels qubits in a BFS order
/// seeded by the target support, ties broken by incidence count and original index.
fn canonical_cone(coeffs: &[(u64, f64)], target: u64, p: usize) -> (ConeKey, Vec<usize>) {
    let masks: Vec<u64> = coeffs.iter().map(|t| t.0).collect();
    let mut reach = target;
    for _ in 0..p.saturating_sub(1) {
        reach = masks.iter().filter(|&&m| m & reach != 0).fold(reach, |a, &m| a | m);
    }
    let sub: Vec<(u64, f64)> = coeffs.iter().copied().filter(|(m, _)| m & reach != 0).collect();
    let full = sub.iter().fold(target, |a, t| a | t.0);
    let mut incidence: HashMap<usize, usize> = HashMap::new();
    for (m, _) in &sub {
        for q in bits(*m) {
            *incidence.entry(q).or_default() += 1;
        }
    }
    let rank = |q: &usize| (incidence.get(q).copied().unwrap_or(0), *q);
    let mut order: Vec<usize> = bits(target);
    order.sort_by_key(rank);
    let mut seen = target;
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        let mut nb: Vec<usize> = bits(sub.iter().filter(|(m, _)| m & (1 << v) != 0).fold(0u64, |a, t| a | t.0) & !seen);
        nb.sort_by_key(rank);
        for q in nb {
            seen |= 1 << q;
            order.push(q);
        }
    }
    debug_assert_eq!(seen, full);
    let mut pos = [usize::MAX; 64];
    for (i, &q) in order.iter().enumerate() {
        pos[q] = i;
    }
    let relabel = |m: u64| bits(m).into_iter().fold(0u64, |a, q| a | 1 << pos[q]);
    let mut terms: Vec<(u64, u64)> = sub.iter().map(|&(m, a)| (relabel(m), a.to_bits())).collect();
    terms.sort_unstable();
    (ConeKey { n: order.len(), target: relabel(target), terms }, order)
}

/// `⟨s| Q† Z^target Q |s⟩` by Heisenberg conjugation through every layer.
fn conjugate_term(
    n: usize,
    cterms: &[(u64, f64)],
    target: u64,
    sched: &QaoaSchedule,
    opts: &ExactOptions,
    index: usize,
) -> Result<f64> {
    let tol = if opts.exact_arith { 0.0 } else { PRUNE_TOL };
    let mut op = PauliSum::new(n).with_tolerance(tol);
    op.add_term(0, target, C64::new(1.0, 0.0));
    let p = sched.p();
    for layer in (0..p).rev() {
        let beta = sched.betas()[layer];
        let zsupport = op.terms().fold(0u64, |a, t| a | t.zmask);
        for q in bits(zsupport) {
            op.conjugate_rotation_in_place(1 << q, 0, beta);
        }
        let gamma = sched.gammas()[layer];
        let xsupport = op.terms().fold(0u64, |a, t| a | t.xmask);
        for &(z, a) in cterms {
            if z & xsupport != 0 {
                op.conjugate_rotation_in_place(0, z, gamma * a);
            }
        }
        if op.len() > opts.term_budget {
            return Err(Error::TermBudgetAt {
                term: index,
                layer: layer + 1,
                budget: opts.term_budget,
                terms: op.len(),
            });
        }
    }
    Ok(op.plus_expectation().re)
}

/// `⟨C⟩_p` by exact per-term conjugation.
pub fn expectation_exact(c: &DiagonalHam, sched: &QaoaSchedule) -> Result<f64> {
    Ok(expectation_exact_with(c, sched, ExactOptions::default())?.value)
}

pub fn expectation_exact_with(c: &DiagonalHam, sched: &QaoaSchedule, opts: ExactOptions) -> Result<ExactReport> {
    let n = c.n();
    let cterms: Vec<(u64, f64)> = c.coefficients().into_iter().filter(|(z, _)| *z != 0).collect();
    let p = sched.p();
    let masks: Vec<u64> = cterms.iter().map(|t| t.0).collect();
    let max_cone = (0..cterms.len())
        .map(|j| lightcone_of_masks(&masks, j, p).map(|l| l.size(p)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    let per_term: Vec<f64>;
    let unique;
    if opts.dedup {
        let mut keys: BTreeMap<usize, usize> = BTreeMap::new();
        let mut distinct: Vec<ConeKey> = Vec::new();
        let mut lookup: HashMap<ConeKey, usize> = HashMap::new();
        for (j, &(z, _)) in cterms.iter().enumerate() {
            let (key, _) = canonical_cone(&cterms, z, p);
            let id = *lookup.entry(key.clone()).or_insert_with(|| {
                distinct.push(key);
                distinct.len() - 1
            });
            keys.insert(j, id);
        }
        let vals: Vec<f64> = distinct
            .par_iter()
            .enumerate()
            .map(|(i, k)| {
                let sub: Vec<(u64, f64)> = k.terms.iter().map(|&(m, a)| (m, f64::from_bits(a))).collect();
                conjugate_term(k.n, &sub, k.target, sched, &opts, i)
            })
            .collect::<Result<_>>()?;
        unique = distinct.len();
        per_term = cterms.iter().enumerate().map(|(j, &(_, a))| a * vals[keys[&j]]).collect();
    } else {
        per_term = cterms
            .par_iter()
            .enumerate()
            .map(|(j, &(z, a))| conjugate_term(n, &cterms, z, sched, &opts, j).map(|v| a * v))
            .collect::<Result<_>>()?;
        unique = cterms.len();
    }
    let value = c.a0() + per_term.iter().sum::<f64>();
    Ok(ExactReport { value, terms: cterms.len(), unique, max_cone })
}

/// QAOA_1 MaxCut expectation on an unweighted graph.
pub fn maxcut_p1(g: &Graph, gamma: f64, beta: f64) -> Result<f64> {
    if g.is_weighted() {
        return Err(Error::InvalidInstance("closed form requires an unweighted graph".into()));
    }
    let d = g.degrees();
    let f = g.edge_triangles();
    let cg = gamma.cos();
    let first: f64 = d.iter().filter(|&&k| k > 0).map(|&k| k as f64 * cg.powi(k as i32 - 1)).sum();
    let second: f64 = g
        .edges()
        .iter()
        .zip(&f)
        .map(|(&(u, v), &t)| {
            cg.powi((d[u] + d[v]) as i32 - 2 * t as i32 - 2) * (1.0 - (2.0 * gamma).cos().powi(t as i32))
        })
        .sum();
    Ok(g.m() as f64 / 2.0 + (4.0 * beta).sin() / 4.0 * gamma.sin() * first - (2.0 * beta).sin().powi(2) / 4.0 * second)
}

fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `Σ_k C(f+, l-k) C(f-, k) (-1)^k`.
pub fn parity_binomial_factor(fp: usize, fm: usize, l: usize) -> f64 {
    (0..=l).map(|k| binom(fp, l - k) * binom(fm, k) * if k % 2 == 0 { 1.0 } else { -1.0 }).sum()
}

/// Triangle factor `g(f+, f-)` evaluated at half angle `h = γ/2`.
fn triangle_factor(fp: usize, fm: usize, h: f64) -> f64 {
    let f = fp + fm;
    let (s2, c2) = (h.sin().powi(2), h.cos().powi(2));
    (1..=f).step_by(2).map(|l| c2.powi((f - l) as i32) * s2.powi(l as i32) * parity_binomial_factor(fp, fm, l)).sum()
}

/// QAOA_1 expectation for balanced Max-2-SAT.
pub fn balanced_max2sat_p1(c: &CostFunction, gamma: f64, beta: f64) -> Result<f64> {
    let clauses = match c.kind() {
        CostKind::BalancedMax2Sat(cl) => cl,
        _ => return Err(Error::InvalidInstance("not a balanced Max-2-SAT instance".into())),
    };
    let n = c.n();
    let mut deg = vec![0usize; n];
    for (a, b) in clauses {
        deg[a.var] += 1;
        deg[b.var] += 1;
    }
    let tri = triangle_parities(n, clauses);
    let h = gamma / 2.0;
    let ch = h.cos();
    let mut first = 0.0;
    let mut second = 0.0;
    for ((a, b), &(fp, fm)) in clauses.iter().zip(&tri) {
        let (di, dj) = (deg[a.var] - 1, deg[b.var] - 1);
        first += ch.powi(di as i32) + ch.powi(dj as i32);
        second += ch.powi((di + dj) as i32 - 2 * (fp + fm) as i32) * triangle_factor(fp, fm, h);
    }
    let m = clauses.len() as f64;
    Ok(0.75 * m + (4.0 * beta).sin() * h.sin() / 8.0 * first - (2.0 * beta).sin().powi(2) / 4.0 * second)
}

/// `αn/2 + (αn/2) sin(αγ) sin(2β)`.
pub fn hamming_ramp_p1(alpha: f64, n: usize, gamma: f64, beta: f64) -> f64 {
    let h = alpha * n as f64 / 2.0;
    h + h * (alpha * gamma).sin() * (2.0 * beta).sin()
}

/// Terms of an at most 2-local Hamiltonian with their supports.
fn quadratic_terms(c: &DiagonalHam) -> Result<Vec<(u64, f64)>> {
    let k = c.locality();
    if k > 2 {
        return Err(Error::NotQubo(k));
    }
    Ok(c.coefficients().into_iter().filter(|(z, _)| *z != 0).collect())
}

fn sign(mask: u64, x: u64) -> f64 {
    if (mask & x).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Integrand of the per-term γ-expectations at one assignment: `-2 c_j Σ_i sin(γ∂_i c)` and
/// `-8 c_j Σ_{i<i'} sin(γ(∂_i c + ½∂_i∂_i' c)) sin(γ(∂_i' c + ½∂_i∂_i' c))`.
fn qubo_integrand(local: &[(u64, f64)], target: u64, a: f64, gamma: f64, x: u64) -> (f64, f64) {
    let cj = a * sign(target, x);
    let dc =
        |i: usize| -2.0 * local.iter().filter(|(m, _)| m & (1 << i) != 0).map(|&(m, b)| b * sign(m, x)).sum::<f64>();
    let support = bits(target);
    let e1: f64 = support.iter().map(|&i| (gamma * dc(i)).sin()).sum();
    let mut e2 = 0.0;
    for (s, &i) in support.iter().enumerate() {
        for &k in &support[s + 1..] {
            let both = (1u64 << i) | (1u64 << k);
            let ddc = 4.0 * local.iter().filter(|(m, _)| m & both == both).map(|&(m, b)| b * sign(m, x)).sum::<f64>();
            e2 += (gamma * (dc(i) + ddc / 2.0)).sin() * (gamma * (dc(k) + ddc / 2.0)).sin();
        }
    }
    (-2.0 * cj * e1, -8.0 * cj * e2)
}

fn combine_qubo(weight: u32, e1: f64, e2: f64, beta: f64) -> f64 {
    let s2 = (2.0 * beta).sin();
    if weight == 1 {
        s2 / 2.0 * e1
    } else {
        (4.0 * beta).sin() / 4.0 * e1 - s2 * s2 / 8.0 * e2
    }
}

/// QAOA_1 expectation of an at most 2-local Hamiltonian by per-term lightcone enumeration.
pub fn qubo_p1(c: &DiagonalHam, gamma: f64, beta: f64) -> Result<f64> {
    let terms = quadratic_terms(c)?;
    let contrib: Vec<f64> = terms
        .par_iter()
        .map(|&(z, a)| {
            let local: Vec<(u64, f64)> = terms.iter().copied().filter(|(m, _)| m & z != 0).collect();
            let cone = local.iter().fold(z, |acc, t| acc | t.0);
            let qs = bits(cone);
            if qs.len() > QUBO_CONE_LIMIT {
                return Err(Error::SizeLimit { what: "QAOA_1 lightcone", limit: QUBO_CONE_LIMIT, got: qs.len() });
            }
            let (mut s1, mut s2) = (0.0, 0.0);
            for k in 0..1u64 << qs.len() {
                let x = qs.iter().enumerate().fold(0u64, |acc, (b, &q)| acc | ((k >> b) & 1) << q);
                let (e1, e2) = qubo_integrand(&local, z, a, gamma, x);
                s1 += e1;
                s2 += e2;
            }
            let norm = (1u64 << qs.len()) as f64;
            Ok(combine_qubo(z.count_ones(), s1 / norm, s2 / norm, beta))
        })
        .collect::<Result<_>>()?;
    Ok(c.a0() + contrib.iter().sum::<f64>())
}

/// Monte Carlo estimate of [`qubo_p1`] for large lightcones: `(value, standard error)`.
pub fn qubo_p1_monte_carlo(c: &DiagonalHam, gamma: f64, beta: f64, samples: usize, seed: u64) -> Result<(f64, f64)> {
    if samples < 2 {
        return Err(Error::InvalidParameter("at least two samples are required".into()));
    }
    let terms = quadratic_terms(c)?;
    let locals: Vec<Vec<(u64, f64)>> =
        terms.iter().map(|&(z, _)| terms.iter().copied().filter(|(m, _)| m & z != 0).collect()).collect();
    let n = c.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let draws: Vec<f64> = (0..samples)
        .map(|_| {
            let x = rng.random::<u64>() & mask;
            terms
                .iter()
                .zip(&locals)
                .map(|(&(z, a), local)| {
                    let (e1, e2) = qubo_integrand(local, z, a, gamma, x);
                    combine_qubo(z.count_ones(), e1, e2, beta)
                })
                .sum()
        })
        .collect();
    let mean = draws.iter().sum::<f64>() / samples as f64;
    let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
    Ok((c.a0() + mean, (var / samples as f64).sqrt()))
}

/// First-order-in-β QAOA_1 distribution with arbitrary γ.
#[derive(Clone, Debug, PartialEq)]
pub struct SmallBeta {
    pub probabilities: Vec<f64>,
    pub expectation: f64,
}

/// `P(x) ≈ 2^{-n} - (2β/2^n) Σ_j sin(γ ∂_j c(x))`.
pub fn small_beta_p1(c: &CostFunction, gamma: f64, beta: f64) -> Result<SmallBeta> {
    let n = c.n();
    if n > SMALL_BETA_LIMIT {
        return Err(Error::SizeLimit { what: "small-beta enumeration qubits", limit: SMALL_BETA_LIMIT, got: n });
    }
    let v = c.values()?;
    let scale = 1.0 / v.len() as f64;
    let probabilities: Vec<f64> = (0..v.len())
        .into_par_iter()
        .map(|x| {
            let s: f64 = (0..n).map(|j| (gamma * (v[x ^ (1 << j)] - v[x])).sin()).sum();
            scale - 2.0 * beta * scale * s
        })
        .collect();
    let expectation = probabilities.iter().zip(&v).map(|(p, c)| p * c).sum();
    Ok(SmallBeta { probabilities, expectation })
}

/// Second order in γ for an at most 2-local Hamiltonian:
/// `⟨C⟩_0 + 2γ(sin2β Σa_j² + sin4β Σa_jk²) + 4γ² sin²2β Σ_{i<j} a_ij (a_i a_j + Σ_k a_ik a_jk)`.
pub fn small_gamma_p1(c: &DiagonalHam, gamma: f64, beta: f64) -> Result<f64> {
    let k = c.locality();
    if k > 2 {
        return Err(Error::NotQubo(k));
    }
    let n = c.n();
    let mut lin = vec![0.0; n];
    let mut pair: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (z, a) in c.coefficients() {
        match z.count_ones() {
            1 => lin[z.trailing_zeros() as usize] = a,
            2 => {
                let i = z.trailing_zeros() as usize;
                let j = 63 - z.leading_zeros() as usize;
                pair.insert((i, j), a);
                adj[i].push((j, a));
                adj[j].push((i, a));
            }
            _ => {}
        }
    }
    let s1: f64 = lin.iter().map(|a| a * a).sum();
    let s2: f64 = pair.values().map(|a| a * a).sum();
    let mut quad = 0.0;
    for (&(i, j), &a) in &pair {
        let common: f64 = adj[i]
            .iter()
            .filter(|(k, _)| *k != j)
            .filter_map(|&(k, b)| pair.get(&(j.min(k), j.max(k))).map(|d| b * d))
            .sum();
        quad += a * (lin[i] * lin[j] + common);
    }
    let sb = (2.0 * beta).sin();
    Ok(c.a0() + 2.0 * gamma * (sb * s1 + (4.0 * beta).sin() * s2) + 4.0 * gamma * gamma * sb * sb * quad)
}

/// Change `⟨C⟩_p - ⟨C⟩_{p-1}` and its small-angle estimates.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelDelta {
    /// Statevector value.
    pub exact: f64,
    /// `β⟨i∇C⟩ - β²/2⟨∇²C⟩ - γβ⟨∇_C∇C⟩` in the level `p-1` state.
    pub second_order: f64,
    /// `-2β Σ_x c(x) Σ_j r_xj sin(α_xj + γ∂_j c(x))`.
    pub small_beta: f64,
    /// Per-string first-order-in-β probability change.
    pub small_beta_probabilities: Vec<f64>,
}

/// Level-`p` increment from the oracle state of the first `p-1` levels.
pub fn level_p_delta(c: &CostFunction, sched: &QaoaSchedule) -> Result<LevelDelta> {
    let p = sched.p();
    if p == 0 {
        return Err(Error::InvalidParameter("level increment needs p >= 1".into()));
    }
    let prev_sched = QaoaSchedule::new(sched.gammas()[..p - 1].to_vec(), sched.betas()[..p - 1].to_vec())?;
    let prev = qaoa_state(c, &prev_sched)?;
    let full = qaoa_state(c, sched)?;
    let v = c.values()?;
    let exact = full.expectation(&v) - prev.expectation(&v);
    let (g, b) = (sched.gammas()[p - 1], sched.betas()[p - 1]);
    let n = c.n();
    let h = to_hamiltonian(c)?;
    let bm = MixerSpec::TransverseField.pauli(n)?;
    let word = |l: Vec<Letter>| apply_letters(&l, h.op(), &bm, h.op(), DEFAULT_TERM_BUDGET);
    let grad = word(vec![Letter::mixer(1)])?.scale(C64::new(0.0, 1.0));
    let lap = word(vec![Letter::mixer(2)])?;
    let cdc = word(vec![Letter::cost(1), Letter::mixer(1)])?;
    let second_order = b * prev.operator_expectation(&grad).re
        - b * b / 2.0 * prev.operator_expectation(&lap).re
        - g * b * prev.operator_expectation(&cdc).re;
    let q = prev.amps();
    let small_beta_probabilities: Vec<f64> = (0..q.len())
        .into_par_iter()
        .map(|x| {
            let s: f64 = (0..n)
                .map(|j| {
                    let w = q[x ^ (1 << j)].conj() * q[x];
                    let (r, alpha) = (w.norm(), -w.arg());
                    r * (alpha + g * (v[x ^ (1 << j)] - v[x])).sin()
                })
                .sum();
            -2.0 * b * s
        })
        .collect();
    let small_beta = small_beta_probabilities.iter().zip(&v).map(|(d, c)| d * c).sum();
    Ok(LevelDelta { exact, second_order, small_beta, small_beta_probabilities })
}
