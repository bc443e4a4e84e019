//! Classical cost functions, clause decompositions and the cost-difference calculus.
//!
//! Bit `j` of a `u64` basis index is variable `j + 1`. Rendered bitstrings put
//! variable 1 leftmost.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pauli::full_mask;

/// Largest variable count for truth-table cost functions.
pub const CUSTOM_LIMIT: usize = 20;
/// Largest variable count for full value enumeration.
pub const ENUM_LIMIT: usize = 26;

/// Simple undirected graph with optional edge weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    weights: Option<Vec<f64>>,
}

impl Graph {
    /// Builds a graph, normalizing each edge to `u < v`.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::IndexOutOfRange { index: a.max(b), n });
            }
            if a == b {
                return Err(Error::InvalidInstance(format!("self-loop at vertex {}", a + 1)));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(Error::InvalidInstance(format!("duplicate edge ({}, {})", e.0 + 1, e.1 + 1)));
            }
            out.push(e);
        }
        Ok(Graph { n, edges: out, weights: None })
    }

    pub fn weighted(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let plain: Vec<_> = edges.iter().map(|&(a, b, _)| (a, b)).collect();
        let mut g = Self::new(n, &plain)?;
        g.weights = Some(edges.iter().map(|e| e.2).collect());
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        Graph { n, edges: e, weights: None }
    }

    pub fn cycle(n: usize) -> Result<Self> {
        let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::new(n, &e)
    }

    pub fn path(n: usize) -> Self {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph { n, edges: e, weights: None }
    }

    /// Erdos-Renyi G(n, p).
    pub fn random_gnp<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Self {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < p {
                    e.push((i, j));
                }
            }
        }
        Graph { n, edges: e, weights: None }
    }

    /// Uniform graph with exactly `m` edges.
    pub fn random_gnm<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Self> {
        let mut all = Graph::complete(n).edges;
        if m > all.len() {
            return Err(Error::InvalidParameter(format!(
                "{m} edges requested but only {} distinct edges exist",
                all.len()
            )));
        }
        all.shuffle(rng);
        all.truncate(m);
        all.sort_unstable();
        Ok(Graph { n, edges: all, weights: None })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn weight(&self, e: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[e])
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(u, v) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut nb = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            nb[u].push(v);
            nb[v].push(u);
        }
        for l in &mut nb {
            l.sort_unstable();
        }
        nb
    }

    /// Neighbor bit masks per vertex.
    pub fn neighbor_masks(&self) -> Vec<u64> {
        let mut nb = vec![0u64; self.n];
        for &(u, v) in &self.edges {
            nb[u] |= 1 << v;
            nb[v] |= 1 << u;
        }
        nb
    }

    /// Number of triangles containing each edge, in edge order.
    pub fn edge_triangles(&self) -> Vec<usize> {
        let nb: Vec<BTreeSet<usize>> = self.neighbors().into_iter().map(|l| l.into_iter().collect()).collect();
        self.edges.iter().map(|&(u, v)| nb[u].intersection(&nb[v]).count()).collect()
    }

    pub fn is_triangle_free(&self) -> bool {
        self.edge_triangles().iter().all(|&f| f == 0)
    }

    /// True when no edge has both endpoints set in `x`.
    pub fn is_independent(&self, x: u64) -> bool {
        self.edges.iter().all(|&(u, v)| (x >> u) & 1 == 0 || (x >> v) & 1 == 0)
    }
}

/// Literal of a Boolean clause (0-based variable).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, negated: false }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, negated: true }
    }

    pub fn holds(&self, x: u64) -> bool {
        (((x >> self.var) & 1) == 1) != self.negated
    }
}

/// Quadratic cost in Pauli-Z form: `c = a0 + sum_j a_j z_j + sum_{i<j} a_ij z_i z_j`, `z_j = (-1)^{x_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Qubo {
    pub n: usize,
    pub a0: f64,
    pub linear: Vec<f64>,
    pub quadratic: Vec<(usize, usize, f64)>,
}

impl Qubo {
    /// Validates indices and merges duplicate pairs.
    pub fn new(n: usize, a0: f64, linear: Vec<f64>, quadratic: Vec<(usize, usize, f64)>) -> Result<Self> {
        if linear.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: linear.len() });
        }
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (i, j, a) in quadratic {
            if i >= n || j >= n {
                return Err(Error::IndexOutOfRange { index: i.max(j), n });
            }
            if i == j {
                return Err(Error::InvalidInstance(format!("diagonal quadratic term at {}", i + 1)));
            }
            *merged.entry((i.min(j), i.max(j))).or_default() += a;
        }
        let quadratic = merged.into_iter().map(|((i, j), a)| (i, j, a)).collect();
        Ok(Qubo { n, a0, linear, quadratic })
    }

    /// MaxCut as a quadratic Pauli-Z polynomial.
    pub fn from_graph(g: &Graph) -> Self {
        let mut a0 = 0.0;
        let mut quadratic = Vec::new();
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            let w = g.weight(e);
            a0 += w / 2.0;
            quadratic.push((u, v, -w / 2.0));
        }
        Qubo { n: g.n(), a0, linear: vec![0.0; g.n()], quadratic }
    }

    pub fn eval(&self, x: u64) -> f64 {
        let z = |j: usize| if (x >> j) & 1 == 0 { 1.0 } else { -1.0 };
        let mut c = self.a0;
        for (j, &a) in self.linear.iter().enumerate() {
            c += a * z(j);
        }
        for &(i, j, a) in &self.quadratic {
            c += a * z(i) * z(j);
        }
        c
    }
}

/// Instance family of a cost function.
#[derive(Clone, Debug, PartialEq)]
pub enum CostKind {
    MaxCut(Graph),
    Qubo(Qubo),
    MaxKSat(Vec<Vec<Literal>>),
    BalancedMax2Sat(Vec<(Literal, Literal)>),
    HammingRamp { alpha: f64 },
    GroverProjector { target: u64 },
    Custom,
}

/// Clause term `c_j` with support `N_j` and a truth table over the support.
#[derive(Clone, Debug, PartialEq)]
pub struct Clause {
    support: Vec<usize>,
    mask: u64,
    table: Vec<f64>,
}

impl Clause {
    /// `table[k]` is the value when support bit `i` equals bit `i` of `k`.
    pub fn new(mut support: Vec<usize>, table: Vec<f64>) -> Result<Self> {
        let sorted = {
            let mut s = support.clone();
            s.sort_unstable();
            s.dedup();
            s
        };
        if sorted.len() != support.len() {
            return Err(Error::InvalidInstance("clause support has repeated variables".into()));
        }
        if table.len() != 1usize << support.len() {
            return Err(Error::LengthMismatch { expected: 1 << support.len(), got: table.len() });
        }
        if sorted != support {
            // Reorder the table to match ascending support.
            let perm: Vec<usize> = sorted.iter().map(|v| support.iter().position(|s| s == v).unwrap()).collect();
            let mut t2 = vec![0.0; table.len()];
            for (k, slot) in t2.iter_mut().enumerate() {
                let mut old = 0usize;
                for (new_pos, &old_pos) in perm.iter().enumerate() {
                    old |= ((k >> new_pos) & 1) << old_pos;
                }
                *slot = table[old];
            }
            support = sorted;
            return Ok(Self::build(support, t2));
        }
        Ok(Self::build(support, table))
    }

    fn build(support: Vec<usize>, table: Vec<f64>) -> Self {
        let mask = support.iter().fold(0u64, |m, &v| m | (1 << v));
        Clause { support, mask, table }
    }

    fn from_fn(support: Vec<usize>, f: impl Fn(u64) -> f64) -> Self {
        let k = support.len();
        let table = (0..1u64 << k)
            .map(|local| {
                let mut x = 0u64;
                for (i, &v) in support.iter().enumerate() {
                    x |= ((local >> i) & 1) << v;
                }
                f(x)
            })
            .collect();
        Self::build(support, table)
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// Local table index of the support bits of `x`.
    #[inline]
    pub fn local_index(&self, x: u64) -> usize {
        let mut k = 0usize;
        for (i, &v) in self.support.iter().enumerate() {
            k |= (((x >> v) & 1) as usize) << i;
        }
        k
    }

    #[inline]
    pub fn eval(&self, x: u64) -> f64 {
        self.table[self.local_index(x)]
    }
}

/// Evaluable classical objective `c(x) = constant + sum_j c_j(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CostFunction {
    n: usize,
    kind: CostKind,
    constant: f64,
    clauses: Vec<Clause>,
    by_var: Vec<Vec<usize>>,
}

impl CostFunction {
    /// Builds from explicit clauses.
    pub fn from_clauses(n: usize, kind: CostKind, constant: f64, clauses: Vec<Clause>) -> Result<Self> {
        if n > 64 {
            return Err(Error::SizeLimit { what: "variables", limit: 64, got: n });
        }
        let mut by_var = vec![Vec::new(); n];
        for (ci, c) in clauses.iter().enumerate() {
            for &v in c.support() {
                if v >= n {
                    return Err(Error::IndexOutOfRange { index: v, n });
                }
                by_var[v].push(ci);
            }
        }
        Ok(CostFunction { n, kind, constant, clauses, by_var })
    }

    pub fn maxcut(g: &Graph) -> Self {
        let clauses = g
            .edges()
            .iter()
            .enumerate()
            .map(|(e, &(u, v))| {
                let w = g.weight(e);
                Clause::from_fn(vec![u, v], move |x| if ((x >> u) ^ (x >> v)) & 1 == 1 { w } else { 0.0 })
            })
            .collect();
        Self::from_clauses(g.n(), CostKind::MaxCut(g.clone()), 0.0, clauses).expect("valid graph")
    }

    pub fn qubo(q: &Qubo) -> Result<Self> {
        let mut clauses = Vec::new();
        for (j, &a) in q.linear.iter().enumerate() {
            if a != 0.0 {
                clauses.push(Clause::build(vec![j], vec![a, -a]));
            }
        }
        for &(i, j, a) in &q.quadratic {
            clauses.push(Clause::build(vec![i, j], vec![a, -a, -a, a]));
        }
        Self::from_clauses(q.n, CostKind::Qubo(q.clone()), q.a0, clauses)
    }

    /// Max-k-SAT: number of satisfied clauses.
    pub fn max_k_sat(n: usize, clauses: Vec<Vec<Literal>>) -> Result<Self> {
        let mut cl = Vec::with_capacity(clauses.len());
        for lits in &clauses {
            let mut vars: Vec<usize> = lits.iter().map(|l| l.var).collect();
            vars.sort_unstable();
            vars.dedup();
            if vars.len() != lits.len() {
                return Err(Error::InvalidInstance("clause repeats a variable".into()));
            }
            if let Some(&v) = vars.iter().find(|&&v| v >= n) {
                return Err(Error::IndexOutOfRange { index: v, n });
            }
            let ls = lits.clone();
            cl.push(Clause::from_fn(vars, move |x| if ls.iter().any(|l| l.holds(x)) { 1.0 } else { 0.0 }));
        }
        Self::from_clauses(n, CostKind::MaxKSat(clauses), 0.0, cl)
    }

    /// Balanced Max-2-SAT with validation of balance and pair uniqueness.
    pub fn balanced_max2sat(n: usize, clauses: Vec<(Literal, Literal)>) -> Result<Self> {
        validate_balanced(n, &clauses)?;
        let generic: Vec<Vec<Literal>> = clauses.iter().map(|&(a, b)| vec![a, b]).collect();
        let sat = Self::max_k_sat(n, generic)?;
        Self::from_clauses(n, CostKind::BalancedMax2Sat(clauses), 0.0, sat.clauses)
    }

    /// `c(x) = alpha |x|`.
    pub fn hamming_ramp(n: usize, alpha: f64) -> Self {
        let clauses = (0..n).map(|j| Clause::build(vec![j], vec![0.0, alpha])).collect();
        Self::from_clauses(n, CostKind::HammingRamp { alpha }, 0.0, clauses).expect("valid ramp")
    }

    /// `c(x) = 1` if `x = target` else 0.
    pub fn grover(n: usize, target: u64) -> Result<Self> {
        if n > CUSTOM_LIMIT {
            return Err(Error::SizeLimit { what: "projector cost variables", limit: CUSTOM_LIMIT, got: n });
        }
        let cl = Clause::from_fn((0..n).collect(), move |x| if x == target { 1.0 } else { 0.0 });
        Self::from_clauses(n, CostKind::GroverProjector { target }, 0.0, vec![cl])
    }

    /// Truth-table cost function, `values[x] = c(x)`.
    pub fn custom(n: usize, values: Vec<f64>) -> Result<Self> {
        if n > CUSTOM_LIMIT {
            return Err(Error::SizeLimit { what: "truth-table variables", limit: CUSTOM_LIMIT, got: n });
        }
        if values.len() != 1 << n {
            return Err(Error::LengthMismatch { expected: 1 << n, got: values.len() });
        }
        let cl = Clause::build((0..n).collect(), values);
        Self::from_clauses(n, CostKind::Custom, 0.0, vec![cl])
    }

    /// Max-k-Cut on the one-hot encoding: qubit `v * k + color`; counts bichromatic edges.
    pub fn max_k_cut_onehot(g: &Graph, k: usize) -> Result<Self> {
        let nq = g.n() * k;
        if nq > 64 {
            return Err(Error::SizeLimit { what: "one-hot qubits", limit: 64, got: nq });
        }
        let mut clauses = Vec::new();
        let mut constant = 0.0;
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            let w = g.weight(e);
            constant += w;
            for col in 0..k {
                let (a, b) = (u * k + col, v * k + col);
                clauses.push(Clause::from_fn(vec![a, b], move |x| {
                    if (x >> a) & 1 == 1 && (x >> b) & 1 == 1 {
                        -w
                    } else {
                        0.0
                    }
                }));
            }
        }
        Self::from_clauses(nq, CostKind::Custom, constant, clauses)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &CostKind {
        &self.kind
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Indices of clauses whose support contains variable `j`.
    pub fn clauses_of(&self, j: usize) -> &[usize] {
        &self.by_var[j]
    }

    /// Largest clause support size.
    pub fn max_clause_width(&self) -> usize {
        self.clauses.iter().map(|c| c.support().len()).max().unwrap_or(0)
    }

    /// Exact cost `c(x)` for a basis index.
    pub fn eval(&self, x: u64) -> f64 {
        self.constant + self.clauses.iter().map(|c| c.eval(x)).sum::<f64>()
    }

    /// Cost of a bit vector, `bits[j]` being variable `j + 1`.
    pub fn eval_bits(&self, bits: &[bool]) -> Result<f64> {
        Ok(self.eval(self.bits_to_index(bits)?))
    }

    /// Cost of a rendered bitstring (variable 1 leftmost).
    pub fn eval_str(&self, s: &str) -> Result<f64> {
        let (x, n) = parse_bitstring(s)?;
        if n != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: n });
        }
        Ok(self.eval(x))
    }

    fn bits_to_index(&self, bits: &[bool]) -> Result<u64> {
        if bits.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: bits.len() });
        }
        Ok(bits.iter().enumerate().fold(0u64, |x, (j, &b)| x | ((b as u64) << j)))
    }

    fn check_index(&self, j: usize) -> Result<()> {
        if j >= self.n {
            return Err(Error::IndexOutOfRange { index: j, n: self.n });
        }
        Ok(())
    }

    /// `c(x^(j)) - c(x)`, touching only clauses that contain `j`.
    pub fn partial_difference(&self, j: usize, x: u64) -> Result<f64> {
        self.check_index(j)?;
        Ok(self.partial_unchecked(j, x))
    }

    #[inline]
    pub(crate) fn partial_unchecked(&self, j: usize, x: u64) -> f64 {
        let y = x ^ (1 << j);
        self.by_var[j].iter().map(|&ci| self.clauses[ci].eval(y) - self.clauses[ci].eval(x)).sum()
    }

    /// `∂_j^k c = (-2)^{k-1} ∂_j c`.
    pub fn repeated_partial_difference(&self, j: usize, k: u32, x: u64) -> Result<f64> {
        if k == 0 {
            return Err(Error::InvalidParameter("repeat count must be at least 1".into()));
        }
        Ok((-2f64).powi(k as i32 - 1) * self.partial_difference(j, x)?)
    }

    /// Iterated difference over distinct indices: `sum_{S ⊆ js} (-1)^{|js|-|S|} c(x^S)`.
    pub fn mixed_difference(&self, js: &[usize], x: u64) -> Result<f64> {
        let mut seen = 0u64;
        for &j in js {
            self.check_index(j)?;
            if seen & (1 << j) != 0 {
                return Err(Error::RepeatedIndex(j));
            }
            seen |= 1 << j;
        }
        let k = js.len();
        let mut acc = 0.0;
        for s in 0..1u64 << k {
            let mut flip = 0u64;
            for (i, &j) in js.iter().enumerate() {
                if (s >> i) & 1 == 1 {
                    flip |= 1 << j;
                }
            }
            let sign = if (k as u32 - s.count_ones()).is_multiple_of(2) { 1.0 } else { -1.0 };
            acc += sign * self.eval(x ^ flip);
        }
        Ok(acc)
    }

    /// `d^ℓ c(x)`, with `d f(x) = sum_j (f(x^(j)) - f(x))`.
    pub fn divergence(&self, x: u64, order: u32) -> Result<f64> {
        if order == 0 {
            return Err(Error::InvalidParameter("divergence order must be at least 1".into()));
        }
        Ok(self.divergence_rec(x, order))
    }

    fn divergence_rec(&self, x: u64, order: u32) -> f64 {
        if order == 1 {
            return (0..self.n).map(|j| self.partial_unchecked(j, x)).sum();
        }
        let here = self.divergence_rec(x, order - 1);
        (0..self.n).map(|j| self.divergence_rec(x ^ (1 << j), order - 1) - here).sum()
    }

    /// All values `c(x)` for `x = 0..2^n`.
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.n > ENUM_LIMIT {
            return Err(Error::SizeLimit { what: "enumeration variables", limit: ENUM_LIMIT, got: self.n });
        }
        Ok((0..1u64 << self.n).map(|x| self.eval(x)).collect())
    }

    /// `d^ℓ c` for every basis state.
    pub fn divergence_vector(&self, order: u32) -> Result<Vec<f64>> {
        let mut f = self.values()?;
        divergence_in_place(self.n, &mut f, order);
        Ok(f)
    }

    /// Generalized partial difference for a constrained neighborhood.
    pub fn generalized_partial_difference(&self, nbhd: &MixerNeighborhood, mv: Move, x: u64) -> Result<f64> {
        if nbhd.qubits() != self.n {
            return Err(Error::DimensionMismatch { left: self.n, right: nbhd.qubits() });
        }
        if !nbhd.is_feasible(x) {
            return Err(Error::Infeasible(x));
        }
        match nbhd.apply(mv, x)? {
            Some(y) => Ok(self.eval(y) - self.eval(x)),
            None => Ok(0.0),
        }
    }
}

/// Applies `f <- d f` `order` times over a full value table.
pub fn divergence_in_place(n: usize, f: &mut Vec<f64>, order: u32) {
    for _ in 0..order {
        let g: Vec<f64> = (0..f.len()).map(|x| (0..n).map(|j| f[x ^ (1 << j)] - f[x]).sum()).collect();
        *f = g;
    }
}

fn validate_balanced(n: usize, clauses: &[(Literal, Literal)]) -> Result<()> {
    let mut pos = vec![0usize; n];
    let mut neg = vec![0usize; n];
    let mut pairs = BTreeSet::new();
    for &(a, b) in clauses {
        for l in [a, b] {
            if l.var >= n {
                return Err(Error::IndexOutOfRange { index: l.var, n });
            }
            if l.negated {
                neg[l.var] += 1;
            } else {
                pos[l.var] += 1;
            }
        }
        if a.var == b.var {
            return Err(Error::InvalidInstance("clause uses one variable twice".into()));
        }
        if !pairs.insert((a.var.min(b.var), a.var.max(b.var))) {
            return Err(Error::InvalidInstance(format!(
                "variables {} and {} share more than one clause",
                a.var + 1,
                b.var + 1
            )));
        }
    }
    if let Some(v) = (0..n).find(|&v| pos[v] != neg[v]) {
        return Err(Error::InvalidInstance(format!(
            "variable {} appears {} times unnegated and {} times negated",
            v + 1,
            pos[v],
            neg[v]
        )));
    }
    Ok(())
}

/// Clause parity `(-1)^{i⊕j}`: -1 when exactly one literal is negated.
pub fn clause_parity(a: Literal, b: Literal) -> f64 {
    if a.negated != b.negated {
        -1.0
    } else {
        1.0
    }
}

/// Per-clause counts `(f+, f-)` of positive- and negative-parity triangles.
pub fn triangle_parities(n: usize, clauses: &[(Literal, Literal)]) -> Vec<(usize, usize)> {
    let mut par: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut nb = vec![BTreeSet::new(); n];
    for &(a, b) in clauses {
        let (u, v) = (a.var.min(b.var), a.var.max(b.var));
        par.insert((u, v), clause_parity(a, b));
        nb[u].insert(v);
        nb[v].insert(u);
    }
    let key = |u: usize, v: usize| (u.min(v), u.max(v));
    clauses
        .iter()
        .map(|&(a, b)| {
            let (u, v) = key(a.var, b.var);
            let mut fp = 0;
            let mut fm = 0;
            for &w in nb[u].intersection(&nb[v]) {
                let p = par[&(u, v)] * par[&key(u, w)] * par[&key(v, w)];
                if p > 0.0 {
                    fp += 1;
                } else {
                    fm += 1;
                }
            }
            (fp, fm)
        })
        .collect()
}

/// Single-triangle balanced instance `x1∨¬x2 + x2∨¬x3 + x3∨¬x1`.
pub fn balanced_single_triangle() -> CostFunction {
    let c = vec![
        (Literal::pos(0), Literal::neg(1)),
        (Literal::pos(1), Literal::neg(2)),
        (Literal::pos(2), Literal::neg(0)),
    ];
    CostFunction::balanced_max2sat(3, c).expect("balanced")
}

/// Two-triangle balanced instance on five variables.
pub fn balanced_two_triangles() -> CostFunction {
    let c = vec![
        (Literal::pos(0), Literal::pos(1)),
        (Literal::pos(1), Literal::neg(2)),
        (Literal::pos(2), Literal::neg(0)),
        (Literal::neg(1), Literal::neg(3)),
        (Literal::neg(1), Literal::neg(4)),
        (Literal::pos(3), Literal::pos(4)),
    ];
    CostFunction::balanced_max2sat(5, c).expect("balanced")
}

/// Feasible subspace and move structure of a mixer.
#[derive(Clone, Debug, PartialEq)]
pub enum MixerNeighborhood {
    TransverseField {
        n: usize,
    },
    /// Independent sets of the graph.
    Mis(Graph),
    /// One-hot colorings: qubit `v * colors + col`.
    Coloring {
        vertices: usize,
        colors: usize,
        complete: bool,
    },
}

/// A single move of a neighborhood.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    Flip(usize),
    /// Color `y_j -> y_j - 1 (mod k)`.
    Left(usize),
    /// Color `y_j -> y_j + 1 (mod k)`.
    Right(usize),
    /// Color `y_j -> y_j + by (mod k)`; complete mixers only, or `by ∈ {1, k-1}` on a ring.
    Shift {
        vertex: usize,
        by: usize,
    },
}

impl MixerNeighborhood {
    pub fn qubits(&self) -> usize {
        match self {
            MixerNeighborhood::TransverseField { n } => *n,
            MixerNeighborhood::Mis(g) => g.n(),
            MixerNeighborhood::Coloring { vertices, colors, .. } => vertices * colors,
        }
    }

    pub fn is_feasible(&self, x: u64) -> bool {
        match self {
            MixerNeighborhood::TransverseField { n } => x & !full_mask(*n) == 0,
            MixerNeighborhood::Mis(g) => x & !full_mask(g.n()) == 0 && g.is_independent(x),
            MixerNeighborhood::Coloring { vertices, colors, .. } => {
                x & !full_mask(vertices * colors) == 0
                    && (0..*vertices).all(|v| ((x >> (v * colors)) & full_mask(*colors)).count_ones() == 1)
            }
        }
    }

    /// Color of vertex `v` in a feasible one-hot string.
    pub fn color_of(&self, x: u64, v: usize) -> Option<usize> {
        match self {
            MixerNeighborhood::Coloring { colors, .. } => {
                let block = (x >> (v * colors)) & full_mask(*colors);
                (block.count_ones() == 1).then(|| block.trailing_zeros() as usize)
            }
            _ => None,
        }
    }

    /// Result of a move on feasible `x`; `None` when the move is blocked (MIS control false).
    pub fn apply(&self, mv: Move, x: u64) -> Result<Option<u64>> {
        match (self, mv) {
            (MixerNeighborhood::TransverseField { n }, Move::Flip(j)) => {
                if j >= *n {
                    return Err(Error::IndexOutOfRange { index: j, n: *n });
                }
                Ok(Some(x ^ (1 << j)))
            }
            (MixerNeighborhood::Mis(g), Move::Flip(j)) => {
                if j >= g.n() {
                    return Err(Error::IndexOutOfRange { index: j, n: g.n() });
                }
                let nb = g.neighbor_masks()[j];
                Ok((x & nb == 0).then_some(x ^ (1 << j)))
            }
            (MixerNeighborhood::Coloring { vertices, colors, complete }, mv) => {
                let k = *colors;
                let (v, by) = match mv {
                    Move::Left(v) => (v, k - 1),
                    Move::Right(v) => (v, 1),
                    Move::Shift { vertex, by } => {
                        if !complete && by % k != 1 && by % k != k - 1 {
                            return Err(Error::InvalidParameter("ring mixer only shifts colors by one step".into()));
                        }
                        (vertex, by % k)
                    }
                    Move::Flip(_) => {
                        return Err(Error::InvalidParameter("coloring mixers do not flip single bits".into()))
                    }
                };
                if v >= *vertices {
                    return Err(Error::IndexOutOfRange { index: v, n: *vertices });
                }
                let col = self.color_of(x, v).ok_or(Error::Infeasible(x))?;
                let new = (col + by) % k;
                Ok(Some(x ^ (1 << (v * k + col)) ^ (1 << (v * k + new))))
            }
            _ => Err(Error::InvalidParameter(format!("move {mv:?} not available for this neighborhood"))),
        }
    }
}

/// Instance generator parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum InstanceSpec {
    /// Each clause picks `k` distinct variables, each negated with probability 1/2.
    RandomKSat {
        n: usize,
        k: usize,
        m: usize,
    },
    MaxCutGnp {
        n: usize,
        p: f64,
    },
    MaxCutGnm {
        n: usize,
        m: usize,
    },
    /// Linear terms always present; each pair present with probability `density`.
    /// Integer mode draws coefficients from {-3..3} (nonzero for pairs).
    RandomQubo {
        n: usize,
        density: f64,
        integer: bool,
    },
    /// Union of `cycles` edge-disjoint random cycles with balanced literal signs.
    BalancedMax2Sat {
        n: usize,
        cycles: usize,
    },
    HammingRamp {
        n: usize,
        alpha: f64,
    },
    Grover {
        n: usize,
        target: u64,
    },
}

/// Reproducible instance for a fixed seed.
pub fn generate_instance(spec: &InstanceSpec, seed: u64) -> Result<CostFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate_with_rng(spec, &mut rng)
}

fn binom_f(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Instance drawn from a caller-supplied RNG.
pub fn generate_with_rng<R: Rng + ?Sized>(spec: &InstanceSpec, rng: &mut R) -> Result<CostFunction> {
    match *spec {
        InstanceSpec::RandomKSat { n, k, m } => {
            if k == 0 || k > n {
                return Err(Error::InvalidParameter(format!("clause width {k} invalid for {n} variables")));
            }
            let distinct = binom_f(n, k) * 2f64.powi(k as i32);
            if (m as f64) > distinct {
                return Err(Error::InvalidParameter(format!("{m} clauses exceed the {distinct} distinct clauses")));
            }
            let clauses = (0..m)
                .map(|_| {
                    let mut vars = rand::seq::index::sample(rng, n, k).into_vec();
                    vars.sort_unstable();
                    vars.into_iter().map(|v| Literal { var: v, negated: rng.random::<bool>() }).collect()
                })
                .collect();
            CostFunction::max_k_sat(n, clauses)
        }
        InstanceSpec::MaxCutGnp { n, p } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!("edge probability {p} outside [0, 1]")));
            }
            Ok(CostFunction::maxcut(&Graph::random_gnp(n, p, rng)))
        }
        InstanceSpec::MaxCutGnm { n, m } => Ok(CostFunction::maxcut(&Graph::random_gnm(n, m, rng)?)),
        InstanceSpec::RandomQubo { n, density, integer } => {
            fn draw<R: Rng + ?Sized>(rng: &mut R, integer: bool, nonzero: bool) -> f64 {
                if integer {
                    loop {
                        let v = rng.random_range(-3i32..=3) as f64;
                        if !nonzero || v != 0.0 {
                            return v;
                        }
                    }
                } else {
                    rng.random_range(-1.0..1.0)
                }
            }
            let a0 = draw(rng, integer, false);
            let linear: Vec<f64> = (0..n).map(|_| draw(rng, integer, false)).collect();
            let mut quadratic = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random::<f64>() < density {
                        quadratic.push((i, j, draw(rng, integer, true)));
                    }
                }
            }
            CostFunction::qubo(&Qubo::new(n, a0, linear, quadratic)?)
        }
        InstanceSpec::BalancedMax2Sat { n, cycles } => random_balanced(n, cycles, rng),
        InstanceSpec::HammingRamp { n, alpha } => Ok(CostFunction::hamming_ramp(n, alpha)),
        InstanceSpec::Grover { n, target } => {
            if target >> n != 0 {
                return Err(Error::InvalidParameter("target outside the variable range".into()));
            }
            CostFunction::grover(n, target)
        }
    }
}

fn random_balanced<R: Rng + ?Sized>(n: usize, cycles: usize, rng: &mut R) -> Result<CostFunction> {
    if n < 3 {
        return Err(Error::InvalidParameter("balanced generator needs at least 3 variables".into()));
    }
    let mut used: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut clauses = Vec::new();
    let mut placed = 0;
    let mut attempts = 0;
    while placed < cycles {
        attempts += 1;
        if attempts > 1000 * (cycles + 1) {
            return Err(Error::InvalidParameter(format!(
                "could not place {cycles} edge-disjoint cycles on {n} vertices"
            )));
        }
        let len = rng.random_range(3..=n);
        let verts = rand::seq::index::sample(rng, n, len).into_vec();
        let edges: Vec<(usize, usize)> = (0..len)
            .map(|i| {
                let (a, b) = (verts[i], verts[(i + 1) % len]);
                (a.min(b), a.max(b))
            })
            .collect();
        if edges.iter().any(|e| used.contains(e)) {
            continue;
        }
        let signs: Vec<bool> = (0..len).map(|_| rng.random::<bool>()).collect();
        for i in 0..len {
            let j = (i + 1) % len;
            used.insert(edges[i]);
            clauses.push((Literal { var: verts[i], negated: signs[i] }, Literal { var: verts[j], negated: !signs[j] }));
        }
        placed += 1;
    }
    CostFunction::balanced_max2sat(n, clauses)
}

/// Renders `x` with variable 1 leftmost.
pub fn format_bitstring(x: u64, n: usize) -> String {
    (0..n).map(|j| if (x >> j) & 1 == 1 { '1' } else { '0' }).collect()
}

/// Parses a bitstring with variable 1 leftmost; returns `(index, length)`.
pub fn parse_bitstring(s: &str) -> Result<(u64, usize)> {
    let s = s.trim();
    if s.len() > 64 {
        return Err(Error::SizeLimit { what: "bitstring length", limit: 64, got: s.len() });
    }
    let mut x = 0u64;
    for (j, ch) in s.chars().enumerate() {
        match ch {
            '0' => {}
            '1' => x |= 1 << j,
            other => return Err(Error::Parse(format!("invalid bit character {other:?}"))),
        }
    }
    Ok((x, s.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn triangle() -> CostFunction {
        CostFunction::maxcut(&Graph::complete(3))
    }

    fn fig_instance() -> CostFunction {
        CostFunction::max_k_sat(3, vec![vec![Literal::pos(0), Literal::pos(1)], vec![Literal::pos(1), Literal::neg(2)]])
            .unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(triangle().eval_str("010").unwrap(), 2.0);
        assert_eq!(CostFunction::hamming_ramp(4, 1.0).eval_str("0110").unwrap(), 2.0);
        assert_eq!(fig_instance().eval_str("000").unwrap(), 1.0);
        assert!(triangle().eval_str("01").is_err());
        assert!(triangle().eval_bits(&[true, false]).is_err());
    }

    #[test]
    fn partial_difference_examples() {
        let c = fig_instance();
        assert_eq!(c.partial_difference(0, 0).unwrap(), 1.0);
        assert_eq!(c.partial_difference(2, 0).unwrap(), -1.0);
        assert!(c.partial_difference(3, 0).is_err());
        let k = CostFunction::custom(2, vec![5.0; 4]).unwrap();
        for x in 0..4 {
            assert_eq!(k.partial_difference(1, x).unwrap(), 0.0);
        }
    }

    #[test]
    fn maxcut_divergence_law() {
        let g = Graph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)]).unwrap();
        let c = CostFunction::maxcut(&g);
        let m = g.m() as f64;
        for x in 0..32 {
            assert_eq!(c.divergence(x, 1).unwrap(), 2.0 * m - 4.0 * c.eval(x));
            for l in 1..4 {
                let expect = (-4f64).powi(l as i32) * (c.eval(x) - m / 2.0);
                assert!((c.divergence(x, l).unwrap() - expect).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn ramp_divergence() {
        let (n, a) = (5, 1.5);
        let c = CostFunction::hamming_ramp(n, a);
        for x in 0..32u64 {
            for l in 1..4 {
                let expect = (-2f64).powi(l) * (a * x.count_ones() as f64 - a * n as f64 / 2.0);
                assert!((c.divergence(x, l as u32).unwrap() - expect).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn second_divergence_identity() {
        let c = generate_instance(&InstanceSpec::RandomKSat { n: 6, k: 3, m: 10 }, 3).unwrap();
        for x in 0..64 {
            let mut pairs = 0.0;
            for i in 0..6 {
                for j in i + 1..6 {
                    pairs += c.mixed_difference(&[i, j], x).unwrap();
                }
            }
            let d1 = c.divergence(x, 1).unwrap();
            assert!((c.divergence(x, 2).unwrap() - (-2.0 * d1 + 2.0 * pairs)).abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_difference_examples() {
        let c = fig_instance();
        let x = 0b101;
        let expect = c.eval(x) - c.eval(x ^ 1) - c.eval(x ^ 2) + c.eval(x ^ 3);
        assert_eq!(c.mixed_difference(&[0, 1], x).unwrap(), expect);
        assert_eq!(c.mixed_difference(&[1, 0], x).unwrap(), expect);
        assert_eq!(c.mixed_difference(&[0, 0], x), Err(Error::RepeatedIndex(0)));
        let r = CostFunction::hamming_ramp(4, 2.0);
        assert_eq!(r.mixed_difference(&[0, 2], 5).unwrap(), 0.0);
        let e = CostFunction::maxcut(&Graph::new(2, &[(0, 1)]).unwrap());
        for x in 0..4u64 {
            let v = e.mixed_difference(&[0, 1], x).unwrap();
            let expect = if (x ^ (x >> 1)) & 1 == 1 { 2.0 } else { -2.0 };
            assert_eq!(v, expect);
        }
        assert_eq!(r.repeated_partial_difference(1, 3, 0).unwrap(), 4.0 * 2.0);
    }

    #[test]
    fn generalized_differences() {
        let g = Graph::new(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let c = CostFunction::hamming_ramp(4, 1.0);
        let nb = MixerNeighborhood::Mis(g);
        for j in 0..4 {
            assert_eq!(c.generalized_partial_difference(&nb, Move::Flip(j), 0).unwrap(), 1.0);
        }
        assert_eq!(c.generalized_partial_difference(&nb, Move::Flip(1), 0b0001).unwrap(), 0.0);
        assert_eq!(c.generalized_partial_difference(&nb, Move::Flip(0), 0b0001).unwrap(), -1.0);
        assert_eq!(c.generalized_partial_difference(&nb, Move::Flip(0), 0b0011), Err(Error::Infeasible(3)));

        let col = MixerNeighborhood::Coloring { vertices: 2, colors: 3, complete: false };
        let k = CostFunction::custom(6, vec![1.0; 64]).unwrap();
        let y = 0b010_001;
        for mv in [Move::Left(0), Move::Right(1)] {
            assert_eq!(k.generalized_partial_difference(&col, mv, y).unwrap(), 0.0);
        }
        assert!(k.generalized_partial_difference(&col, Move::Left(0), 0b011_001).is_err());
    }

    #[test]
    fn coloring_shifts() {
        let col = MixerNeighborhood::Coloring { vertices: 1, colors: 3, complete: false };
        assert_eq!(col.apply(Move::Right(0), 0b001).unwrap(), Some(0b010));
        assert_eq!(col.apply(Move::Left(0), 0b001).unwrap(), Some(0b100));
        assert!(col.apply(Move::Shift { vertex: 0, by: 1 }, 0b001).is_ok());
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        let mk = CostFunction::max_k_cut_onehot(&g, 3).unwrap();
        assert_eq!(mk.eval(0b010_001), 1.0);
        assert_eq!(mk.eval(0b001_001), 0.0);
    }

    #[test]
    fn footnote_triangle_parities() {
        let one = vec![
            (Literal::pos(0), Literal::neg(1)),
            (Literal::pos(1), Literal::neg(2)),
            (Literal::pos(2), Literal::neg(0)),
        ];
        assert!(triangle_parities(3, &one).iter().all(|&f| f == (0, 1)));
        let c = balanced_two_triangles();
        if let CostKind::BalancedMax2Sat(cl) = c.kind() {
            let f = triangle_parities(5, cl);
            assert_eq!(f[0], (1, 0));
            let total_pos: usize = f.iter().map(|t| t.0).sum();
            assert_eq!(total_pos / 3, 2);
            assert!(f.iter().all(|t| t.1 == 0));
        } else {
            panic!("wrong kind");
        }
        assert_eq!(balanced_single_triangle().n(), 3);
    }

    #[test]
    fn balanced_validation() {
        let unbalanced = vec![(Literal::pos(0), Literal::pos(1))];
        assert!(CostFunction::balanced_max2sat(2, unbalanced).is_err());
        let dup = vec![(Literal::pos(0), Literal::neg(1)), (Literal::neg(0), Literal::pos(1))];
        assert!(CostFunction::balanced_max2sat(2, dup).is_err());
    }

    #[test]
    fn generators_are_reproducible() {
        let spec = InstanceSpec::RandomKSat { n: 20, k: 3, m: 85 };
        let a = generate_instance(&spec, 7).unwrap();
        let b = generate_instance(&spec, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.clauses().len(), 85);
        assert!(a.clauses().iter().all(|c| c.support().len() == 3));
        assert!(generate_instance(&InstanceSpec::RandomKSat { n: 3, k: 3, m: 9 }, 0).is_err());
        assert!(generate_instance(&InstanceSpec::MaxCutGnm { n: 4, m: 7 }, 0).is_err());
        for seed in 0..20 {
            let c = generate_instance(&InstanceSpec::BalancedMax2Sat { n: 8, cycles: 3 }, seed).unwrap();
            assert!(matches!(c.kind(), CostKind::BalancedMax2Sat(_)));
        }
    }

    #[test]
    fn bitstring_round_trip() {
        assert_eq!(format_bitstring(0b110, 4), "0110");
        assert_eq!(parse_bitstring("0110").unwrap(), (0b110, 4));
        assert!(parse_bitstring("01a").is_err());
    }

    #[test]
    fn graph_validation() {
        assert!(Graph::new(3, &[(0, 0)]).is_err());
        assert!(Graph::new(3, &[(0, 1), (1, 0)]).is_err());
        let k4 = Graph::complete(4);
        assert_eq!(k4.edge_triangles(), vec![2; 6]);
        assert!(Graph::cycle(5).unwrap().is_triangle_free());
    }

    fn arb_instance() -> impl Strategy<Value = CostFunction> {
        (0u64..1000, 0usize..4).prop_map(|(seed, kind)| {
            let spec = match kind {
                0 => InstanceSpec::RandomKSat { n: 7, k: 3, m: 9 },
                1 => InstanceSpec::MaxCutGnp { n: 7, p: 0.5 },
                2 => InstanceSpec::RandomQubo { n: 7, density: 0.5, integer: false },
                _ => InstanceSpec::BalancedMax2Sat { n: 7, cycles: 2 },
            };
            generate_instance(&spec, seed).unwrap()
        })
    }

    proptest! {
        #[test]
        fn differences_sum_to_zero(c in arb_instance()) {
            let n = c.n();
            for j in 0..n {
                let s: f64 = (0..1u64 << n).map(|x| c.partial_difference(j, x).unwrap()).sum();
                prop_assert!(s.abs() < 1e-9);
            }
            let d = c.divergence_vector(1).unwrap();
            prop_assert!(d.iter().sum::<f64>().abs() < 1e-9);
            let vals = c.values().unwrap();
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if hi - lo > 1e-12 {
                let cd: f64 = vals.iter().zip(&d).map(|(a, b)| a * b).sum();
                prop_assert!(cd < 0.0);
            }
            let best = (0..vals.len()).max_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap() as u64;
            for j in 0..n {
                prop_assert!(c.partial_difference(j, best).unwrap() <= 1e-12);
            }
            prop_assert!(d[best as usize] <= 1e-12);
        }

        #[test]
        fn clause_locality(c in arb_instance(), x in 0u64..128) {
            for cl in c.clauses() {
                for v in 0..c.n() {
                    if cl.mask() & (1 << v) == 0 {
                        prop_assert_eq!(cl.eval(x), cl.eval(x ^ (1 << v)));
                    }
                }
            }
        }

        #[test]
        fn antisymmetry_and_mixed_permutation(c in arb_instance(), x in 0u64..128, i in 0usize..7, j in 0usize..7, k in 0usize..7) {
            let a = c.partial_difference(i, x).unwrap();
            prop_assert_eq!(c.partial_difference(i, x ^ (1 << i)).unwrap(), -a);
            if i != j && j != k && i != k {
                let m1 = c.mixed_difference(&[i, j, k], x).unwrap();
                let m2 = c.mixed_difference(&[k, i, j], x).unwrap();
                prop_assert!((m1 - m2).abs() < 1e-12);
            }
        }
    }
}
