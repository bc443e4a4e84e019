//! Gradient superoperators `∇ = [B, ·]` and `∇_C = [C, ·]`, gradient words and norm bounds.

use std::fmt;
use std::str::FromStr;

use crate::cost::Graph;
use crate::error::{Error, Result};
use crate::hamop::DiagonalHam;
use crate::pauli::{PauliSum, C64};

/// Default Pauli-term budget per word application.
pub const DEFAULT_TERM_BUDGET: usize = 2_000_000;
/// Largest MIS degree for which the mixer is expanded into Pauli strings.
pub const MIS_DEGREE_LIMIT: usize = 12;

/// Generator of a gradient letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    /// `∇ = [B, ·]`.
    Mixer,
    /// `∇_C = [C, ·]`.
    Cost,
}

/// A power of one gradient superoperator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: Gen,
    pub power: u32,
}

impl Letter {
    pub fn mixer(power: u32) -> Self {
        Letter { gen: Gen::Mixer, power }
    }

    pub fn cost(power: u32) -> Self {
        Letter { gen: Gen::Cost, power }
    }
}

/// Operator a word acts on.
#[derive(Clone, Debug, PartialEq)]
pub enum Base {
    /// The cost Hamiltonian supplied at application time.
    Cost,
    Operator(PauliSum),
}

/// Word of superoperator powers; letters are written left to right and the
/// rightmost letter acts on the base first.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientWord {
    pub base: Base,
    pub letters: Vec<Letter>,
}

impl GradientWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        GradientWord { base: Base::Cost, letters }
    }

    pub fn with_base(letters: Vec<Letter>, base: PauliSum) -> Self {
        GradientWord { base: Base::Operator(base), letters }
    }

    /// Sum of exponents.
    pub fn order(&self) -> u32 {
        self.letters.iter().map(|l| l.power).sum()
    }

    /// Drops zero powers and merges adjacent letters with the same generator.
    pub fn reduced(&self) -> GradientWord {
        GradientWord { base: self.base.clone(), letters: reduce_letters(&self.letters) }
    }

    pub fn leftmost(&self) -> Option<Gen> {
        self.letters.iter().find(|l| l.power > 0).map(|l| l.gen)
    }

    pub fn rightmost(&self) -> Option<Gen> {
        self.letters.iter().rev().find(|l| l.power > 0).map(|l| l.gen)
    }

    fn base_is_diagonal(&self) -> bool {
        match &self.base {
            Base::Cost => true,
            Base::Operator(op) => op.is_diagonal(),
        }
    }

    /// True when the rightmost letter is `∇_C` and the base is diagonal.
    pub fn vanishes_on_diagonal_base(&self) -> bool {
        self.rightmost() == Some(Gen::Cost) && self.base_is_diagonal()
    }

    /// Parses letters such as `"Dc^2 Db^2"`; the base is the cost Hamiltonian.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in spec.split_whitespace() {
            let (name, pow) = match tok.split_once('^') {
                Some((a, b)) => {
                    let p: u32 = b.parse().map_err(|_| Error::Parse(format!("bad exponent in {tok:?}")))?;
                    if p == 0 {
                        return Err(Error::Parse(format!("zero exponent in {tok:?}")));
                    }
                    (a, p)
                }
                None => (tok, 1),
            };
            let gen = match name {
                "Db" | "DB" | "db" => Gen::Mixer,
                "Dc" | "DC" | "dc" => Gen::Cost,
                _ => return Err(Error::Parse(format!("unknown letter {name:?}; expected Db or Dc"))),
            };
            letters.push(Letter { gen, power: pow });
        }
        if letters.is_empty() {
            return Err(Error::Parse("empty gradient word".into()));
        }
        Ok(GradientWord::new(letters))
    }
}

impl FromStr for GradientWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GradientWord::parse(s)
    }
}

impl fmt::Display for GradientWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| {
                let name = match l.gen {
                    Gen::Mixer => "Db",
                    Gen::Cost => "Dc",
                };
                if l.power == 1 {
                    name.to_string()
                } else {
                    format!("{name}^{}", l.power)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Merges adjacent equal generators and drops zero powers.
pub fn reduce_letters(letters: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if l.power == 0 {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.gen == l.gen => last.power += l.power,
            _ => out.push(l),
        }
    }
    out
}

/// Mixing Hamiltonian family.
#[derive(Clone, Debug, PartialEq)]
pub enum MixerSpec {
    /// `B = sum_j X_j`.
    TransverseField,
    /// `B = sum_j X_j prod_{l ∈ nbd(j)} (I + Z_l)/2`.
    Mis(Graph),
    /// One-hot ring XY mixer, qubit `v * colors + col`.
    XyRing { colors: usize },
    /// One-hot complete XY mixer.
    XyComplete { colors: usize },
}

impl MixerSpec {
    /// Pauli realization on `nq` qubits.
    pub fn pauli(&self, nq: usize) -> Result<PauliSum> {
        match self {
            MixerSpec::TransverseField => {
                let mut b = PauliSum::new(nq);
                for j in 0..nq {
                    b.add_term(1 << j, 0, C64::new(1.0, 0.0));
                }
                Ok(b)
            }
            MixerSpec::Mis(g) => {
                if g.n() != nq {
                    return Err(Error::DimensionMismatch { left: nq, right: g.n() });
                }
                if g.max_degree() > MIS_DEGREE_LIMIT {
                    return Err(Error::SizeLimit {
                        what: "MIS mixer degree",
                        limit: MIS_DEGREE_LIMIT,
                        got: g.max_degree(),
                    });
                }
                let mut b = PauliSum::new(nq);
                for (j, nb) in g.neighbors().iter().enumerate() {
                    let d = nb.len();
                    let c = 1.0 / (1u64 << d) as f64;
                    for s in 0..1u64 << d {
                        let z = nb.iter().enumerate().fold(0u64, |z, (i, &v)| z | (((s >> i) & 1) << v));
                        b.add_term(1 << j, z, C64::new(c, 0.0));
                    }
                }
                Ok(b)
            }
            MixerSpec::XyRing { colors } | MixerSpec::XyComplete { colors } => {
                let k = *colors;
                if k < 2 || !nq.is_multiple_of(k) {
                    return Err(Error::InvalidParameter(format!("{nq} qubits is not a multiple of {k} colors")));
                }
                let mut pairs = Vec::new();
                if matches!(self, MixerSpec::XyRing { .. }) {
                    for l in 0..k {
                        pairs.push((l, (l + 1) % k));
                    }
                } else {
                    for l in 0..k {
                        for m in l + 1..k {
                            pairs.push((l, m));
                        }
                    }
                }
                let mut b = PauliSum::new(nq);
                for v in 0..nq / k {
                    for &(l, m) in &pairs {
                        let mask = (1u64 << (v * k + l)) | (1u64 << (v * k + m));
                        // (XX + YY)/2 with YY stored as -X X Z Z on both qubits.
                        b.add_term(mask, 0, C64::new(0.5, 0.0));
                        b.add_term(mask, mask, C64::new(-0.5, 0.0));
                    }
                }
                Ok(b)
            }
        }
    }

    /// Partial mixer terms `B_j` whose sum is the mixer.
    pub fn partial_terms(&self, nq: usize) -> Result<Vec<PauliSum>> {
        let b = self.pauli(nq)?;
        match self {
            MixerSpec::TransverseField | MixerSpec::Mis(_) => Ok((0..nq)
                .map(|j| {
                    let mut p = PauliSum::new(nq);
                    for t in b.terms().filter(|t| t.xmask == 1 << j) {
                        p.add_term(t.xmask, t.zmask, t.coeff);
                    }
                    p
                })
                .collect()),
            MixerSpec::XyRing { .. } | MixerSpec::XyComplete { .. } => {
                let mut masks: Vec<u64> = b.terms().map(|t| t.xmask).collect();
                masks.dedup();
                Ok(masks
                    .into_iter()
                    .map(|m| {
                        let mut p = PauliSum::new(nq);
                        for t in b.terms().filter(|t| t.xmask == m) {
                            p.add_term(t.xmask, t.zmask, t.coeff);
                        }
                        p
                    })
                    .collect())
            }
        }
    }
}

/// Applies `letters` right to left to `base` with generators `b` and `c`.
pub fn apply_letters(
    letters: &[Letter],
    base: &PauliSum,
    b: &PauliSum,
    c: &PauliSum,
    budget: usize,
) -> Result<PauliSum> {
    let total: u32 = letters.iter().map(|l| l.power).sum();
    let mut op = base.clone();
    let mut steps = 0usize;
    for l in letters.iter().rev() {
        let g = match l.gen {
            Gen::Mixer => b,
            Gen::Cost => c,
        };
        for _ in 0..l.power {
            op = g.commutator(&op)?;
            steps += 1;
            if op.len() > budget {
                return Err(Error::TermBudget { budget, terms: op.len(), steps, total: total as usize });
            }
            if op.is_empty() {
                return Ok(op);
            }
        }
    }
    Ok(op)
}

/// Exact iterated commutator `w(C)` with the default term budget.
pub fn apply_word(w: &GradientWord, c: &DiagonalHam, mixer: &MixerSpec) -> Result<PauliSum> {
    apply_word_with_budget(w, c, mixer, DEFAULT_TERM_BUDGET)
}

pub fn apply_word_with_budget(w: &GradientWord, c: &DiagonalHam, mixer: &MixerSpec, budget: usize) -> Result<PauliSum> {
    let b = mixer.pauli(c.n())?;
    let base = match &w.base {
        Base::Cost => c.op(),
        Base::Operator(op) => op,
    };
    apply_letters(&w.letters, base, &b, c.op(), budget)
}

/// `∇^ℓ C` for an at most 2-local `C` via the closed forms
/// `∇^{2k}C = 4^k C_(1) + 16^{k-1} ∇²C_(2)` and `∇^{2k+1}C = 4^k ∇C_(1) + 16^k ∇C_(2)`.
pub fn qubo_nabla_power(c: &DiagonalHam, l: u32) -> Result<PauliSum> {
    let k = c.locality();
    if k > 2 {
        return Err(Error::NotQubo(k));
    }
    if l == 0 {
        return Ok(c.op().clone());
    }
    let b = MixerSpec::TransverseField.pauli(c.n())?;
    let c1 = c.weight_part(1);
    let c2 = c.weight_part(2);
    let half = l / 2;
    if l.is_multiple_of(2) {
        let d2 = b.commutator(&b.commutator(&c2)?)?;
        c1.scale_real(4f64.powi(half as i32)).add(&d2.scale_real(16f64.powi(half as i32 - 1)))
    } else {
        let g1 = b.commutator(&c1)?;
        let g2 = b.commutator(&c2)?;
        g1.scale_real(4f64.powi(half as i32)).add(&g2.scale_real(16f64.powi(half as i32)))
    }
}

/// Product norm bound on `‖w(A)‖`: `(2k)^ℓ` per transverse-field letter with `k` the current
/// locality, `(2‖G‖_*)^ℓ` per other letter, times `‖A‖_*`.
pub fn norm_bound(w: &GradientWord, c: &DiagonalHam, mixer: &MixerSpec) -> Result<f64> {
    let n = c.n();
    let base = match &w.base {
        Base::Cost => c.op().clone(),
        Base::Operator(op) => op.clone(),
    };
    let mut bound = base.star_seminorm_auto();
    let mut k = base.locality();
    let kc = c.locality();
    let c_star = c.star_norm();
    let b_star = match mixer {
        MixerSpec::TransverseField => None,
        other => Some(other.pauli(n)?.star_seminorm_auto()),
    };
    for l in w.letters.iter().rev() {
        match l.gen {
            Gen::Mixer => {
                let factor = match b_star {
                    None => 2.0 * k as f64,
                    Some(bs) => 2.0 * bs,
                };
                bound *= factor.powi(l.power as i32);
                if b_star.is_some() {
                    k = n;
                }
            }
            Gen::Cost => {
                bound *= (2.0 * c_star).powi(l.power as i32);
                k = (k + l.power as usize * kc.saturating_sub(1)).min(n);
            }
        }
    }
    Ok(bound)
}

/// Discrepancies of the commutator identities, each expected to be zero.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiReport {
    pub checks: Vec<(String, f64)>,
}

impl JacobiReport {
    pub fn max_discrepancy(&self) -> f64 {
        self.checks.iter().map(|c| c.1).fold(0.0, f64::max)
    }

    pub fn all_zero(&self) -> bool {
        self.checks.iter().all(|c| c.1 == 0.0)
    }
}

/// Evaluates the Jacobi-type gradient identities exactly (tolerance 0).
pub fn jacobi_identities_check(c: &DiagonalHam, mixer: &MixerSpec) -> Result<JacobiReport> {
    let b = mixer.pauli(c.n())?.with_tolerance(0.0);
    let cc = c.op().clone().with_tolerance(0.0);
    let g = |x: &PauliSum, y: &PauliSum| x.commutator(y);
    let d1 = g(&b, &cc)?; // ∇C
    let d2 = g(&b, &d1)?; // ∇²C
    let d3 = g(&b, &d2)?; // ∇³C
    let cd1 = g(&cc, &d1)?; // ∇_C∇C
    let mut checks = Vec::new();

    // ∇∇_C∇C = ∇_C∇²C
    let lhs = g(&b, &cd1)?;
    let rhs = g(&cc, &d2)?;
    checks.push(("Db Dc Db = Dc Db^2".to_string(), lhs.max_abs_diff(&rhs)));

    // ∇_C∇∇_C∇C = ∇_C²∇²C
    let lhs = g(&cc, &g(&b, &cd1)?)?;
    let rhs = g(&cc, &g(&cc, &d2)?)?;
    checks.push(("Dc Db Dc Db = Dc^2 Db^2".to_string(), lhs.max_abs_diff(&rhs)));

    // Jacobi on (B, C, ∇C): ∇_B∇_C(∇C) + ∇_{∇C}∇_B C + ∇_C∇_{∇C}B = 0
    let t1 = g(&b, &g(&cc, &d1)?)?;
    let t2 = g(&d1, &g(&b, &cc)?)?;
    let t3 = g(&cc, &g(&d1, &b)?)?;
    let zero = PauliSum::exact(c.n());
    checks.push(("Jacobi(B, C, DbC)".to_string(), t1.add(&t2)?.add(&t3)?.max_abs_diff(&zero)));

    // ∇_{∇C}A = -∇_A∇C = (∇∇_C - ∇_C∇)A for A in {C, ∇C, ∇²C}
    for (name, a) in [("C", &cc), ("Db C", &d1), ("Db^2 C", &d2)] {
        let lhs = g(&d1, a)?;
        let alt = g(a, &d1)?.scale_real(-1.0);
        let rhs = g(&b, &g(&cc, a)?)?.sub(&g(&cc, &g(&b, a)?)?)?;
        checks.push((format!("cross operator on {name}"), lhs.max_abs_diff(&rhs).max(lhs.max_abs_diff(&alt))));
    }

    // ∇_{∇C}∇²C = ∇∇_C∇²C - ∇_C∇³C
    let lhs = g(&d1, &d2)?;
    let rhs = g(&b, &g(&cc, &d2)?)?.sub(&g(&cc, &d3)?)?;
    checks.push(("grad by DbC of Db^2 C".to_string(), lhs.max_abs_diff(&rhs)));

    // ∇_{∇_C∇C}C = -∇_C²∇C
    let lhs = g(&cd1, &cc)?;
    let rhs = g(&cc, &cd1)?.scale_real(-1.0);
    checks.push(("grad by Dc Db C of C".to_string(), lhs.max_abs_diff(&rhs)));

    // ∇²_{∇C}C = ∇_C²∇²C - ∇∇_C²∇C
    let lhs = g(&d1, &g(&d1, &cc)?)?;
    let rhs = g(&cc, &g(&cc, &d2)?)?.sub(&g(&b, &g(&cc, &cd1)?)?)?;
    checks.push(("second grad by DbC of C".to_string(), lhs.max_abs_diff(&rhs)));

    Ok(JacobiReport { checks })
}

/// `∇_C ∇̃C` for the cardinality objective `C = n/2 - (1/2) sum Z_j` under the MIS mixer,
/// together with `-B̃`.
pub fn mis_cardinality_identity(g: &Graph) -> Result<(PauliSum, PauliSum)> {
    let n = g.n();
    let mut c = PauliSum::identity(n, n as f64 / 2.0);
    for j in 0..n {
        c.add_term(0, 1 << j, C64::new(-0.5, 0.0));
    }
    let b = MixerSpec::Mis(g.clone()).pauli(n)?;
    let lhs = c.commutator(&b.commutator(&c)?)?;
    Ok((lhs, b.scale_real(-1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{generate_instance, CostFunction, InstanceSpec};
    use crate::hamop::to_hamiltonian;
    use proptest::prelude::*;

    fn k3() -> DiagonalHam {
        to_hamiltonian(&CostFunction::maxcut(&Graph::complete(3))).unwrap()
    }

    fn word(s: &str) -> GradientWord {
        GradientWord::parse(s).unwrap()
    }

    #[test]
    fn parse_and_render() {
        let w = word("Dc^2 Db^2");
        assert_eq!(w.letters, vec![Letter::cost(2), Letter::mixer(2)]);
        assert_eq!(w.to_string(), "Dc^2 Db^2");
        assert_eq!(w.order(), 4);
        assert!(GradientWord::parse("Dx").is_err());
        assert!(GradientWord::parse("Db^0").is_err());
        assert!(GradientWord::parse("").is_err());
        let r = GradientWord::new(vec![Letter::mixer(1), Letter::mixer(2), Letter::cost(0), Letter::cost(1)]).reduced();
        assert_eq!(r.letters, vec![Letter::mixer(3), Letter::cost(1)]);
        assert!(r.vanishes_on_diagonal_base());
    }

    #[test]
    fn maxcut_gradients() {
        let c = k3();
        let n = 3;
        let edges = [(0, 1), (0, 2), (1, 2)];
        let d1 = apply_word(&word("Db"), &c, &MixerSpec::TransverseField).unwrap();
        let mut e1 = PauliSum::new(n);
        let mut e2 = PauliSum::new(n);
        for &(i, j) in &edges {
            let yz = PauliSum::from_letters(n, &[(i, 'Y'), (j, 'Z')], C64::new(0.0, 1.0)).unwrap();
            let zy = PauliSum::from_letters(n, &[(i, 'Z'), (j, 'Y')], C64::new(0.0, 1.0)).unwrap();
            e1 = e1.add(&yz).unwrap().add(&zy).unwrap();
            let yy = PauliSum::from_letters(n, &[(i, 'Y'), (j, 'Y')], C64::new(4.0, 0.0)).unwrap();
            let zz = PauliSum::z_string(n, (1 << i) | (1 << j), -4.0);
            e2 = e2.add(&yy).unwrap().add(&zz).unwrap();
        }
        assert!(d1.max_abs_diff(&e1) < 1e-15);
        let d2 = apply_word(&word("Db^2"), &c, &MixerSpec::TransverseField).unwrap();
        assert!(d2.max_abs_diff(&e2) < 1e-15);
    }

    #[test]
    fn cost_gradient_of_gradient() {
        let cf = generate_instance(&InstanceSpec::RandomKSat { n: 5, k: 3, m: 6 }, 4).unwrap();
        let c = to_hamiltonian(&cf).unwrap();
        let lhs = apply_word(&word("Dc Db"), &c, &MixerSpec::TransverseField).unwrap();
        let mut rhs = PauliSum::new(5);
        for j in 0..5 {
            let dj = c.partial_diff_ham(j).unwrap();
            let sq = dj.op().mul(dj.op()).unwrap();
            rhs = rhs.sub(&sq.mul(&PauliSum::x(5, j)).unwrap()).unwrap();
        }
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn qubo_power_examples() {
        let c = k3();
        let d1 = apply_word(&word("Db"), &c, &MixerSpec::TransverseField).unwrap();
        let d2 = apply_word(&word("Db^2"), &c, &MixerSpec::TransverseField).unwrap();
        for l in 1..7u32 {
            let q = qubo_nabla_power(&c, l).unwrap();
            let expect = if l % 2 == 1 {
                d1.scale_real(4f64.powi(l as i32 - 1))
            } else {
                d2.scale_real(4f64.powi(l as i32 - 2))
            };
            assert!(q.max_abs_diff(&expect) < 1e-9);
        }
        let ramp = to_hamiltonian(&CostFunction::hamming_ramp(4, 1.0)).unwrap();
        let q2 = qubo_nabla_power(&ramp, 2).unwrap();
        assert!(q2.max_abs_diff(&ramp.weight_part(1).scale_real(4.0)) < 1e-15);
        let sat =
            to_hamiltonian(&generate_instance(&InstanceSpec::RandomKSat { n: 4, k: 3, m: 3 }, 0).unwrap()).unwrap();
        assert_eq!(qubo_nabla_power(&sat, 1), Err(Error::NotQubo(3)));
    }

    #[test]
    fn norm_bound_examples() {
        let c = k3();
        for k in 1..=3usize {
            let a = PauliSum::z_string(3, (1 << k) - 1, 1.0);
            for l in 1..4 {
                let w = GradientWord::with_base(vec![Letter::mixer(l)], a.clone());
                let nb = norm_bound(&w, &c, &MixerSpec::TransverseField).unwrap();
                assert!((nb - (2.0 * k as f64).powi(l as i32)).abs() < 1e-9);
            }
        }
        let empty = GradientWord::new(vec![]);
        assert!((norm_bound(&empty, &c, &MixerSpec::TransverseField).unwrap() - c.star_norm()).abs() < 1e-15);
        let wc = GradientWord::with_base(vec![Letter::cost(2)], PauliSum::x(3, 0));
        let expect = (2.0 * c.star_norm()).powi(2);
        assert!((norm_bound(&wc, &c, &MixerSpec::TransverseField).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn jacobi_on_triangle_and_mis() {
        let rep = jacobi_identities_check(&k3(), &MixerSpec::TransverseField).unwrap();
        assert!(rep.all_zero(), "{rep:?}");
        let g = Graph::new(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let (lhs, rhs) = mis_cardinality_identity(&g).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-15);
    }

    #[test]
    fn budget_overflow_is_reported() {
        let cf = generate_instance(&InstanceSpec::RandomQubo { n: 6, density: 1.0, integer: false }, 1).unwrap();
        let c = to_hamiltonian(&cf).unwrap();
        let err = apply_word_with_budget(&word("Dc^3 Db^3"), &c, &MixerSpec::TransverseField, 10).unwrap_err();
        assert!(matches!(err, Error::TermBudget { budget: 10, .. }));
    }

    #[test]
    fn xy_mixer_preserves_weight() {
        let b = MixerSpec::XyRing { colors: 3 }.pauli(6).unwrap();
        assert!(b.is_hermitian());
        let d = b.to_dense().unwrap();
        for x in 0..64usize {
            for y in 0..64usize {
                if d[(x, y)].norm() > 1e-12 {
                    assert_eq!(x.count_ones(), y.count_ones());
                }
            }
        }
        assert!(MixerSpec::XyComplete { colors: 3 }.pauli(7).is_err());
    }

    fn arb_word() -> impl Strategy<Value = Vec<Letter>> {
        prop::collection::vec((prop::bool::ANY, 1u32..3), 1..5).prop_map(|v| {
            v.into_iter().map(|(m, p)| Letter { gen: if m { Gen::Mixer } else { Gen::Cost }, power: p }).collect()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn parity_adjointness_and_realness(seed in 0u64..1000, letters in arb_word()) {
            let cf = generate_instance(&InstanceSpec::RandomKSat { n: 5, k: 3, m: 5 }, seed).unwrap();
            let c = to_hamiltonian(&cf).unwrap();
            let w = GradientWord::new(letters);
            let a = apply_word(&w, &c, &MixerSpec::TransverseField).unwrap();
            let adj = a.adjoint();
            let sign = if w.order().is_multiple_of(2) { 1.0 } else { -1.0 };
            prop_assert!(adj.max_abs_diff(&a.scale_real(sign)) < 1e-9);
            let d = a.to_dense().unwrap();
            prop_assert!(d.iter().all(|z| z.im.abs() < 1e-9));
        }

        #[test]
        fn qubo_closed_form_matches(seed in 0u64..1000, l in 1u32..9) {
            let cf = generate_instance(&InstanceSpec::RandomQubo { n: 5, density: 0.6, integer: true }, seed).unwrap();
            let c = to_hamiltonian(&cf).unwrap();
            let w = GradientWord::new(vec![Letter::mixer(l)]);
            let generic = apply_word(&w, &c, &MixerSpec::TransverseField).unwrap();
            let closed = qubo_nabla_power(&c, l).unwrap();
            prop_assert_eq!(generic.max_abs_diff(&closed), 0.0);
        }
    }
}
