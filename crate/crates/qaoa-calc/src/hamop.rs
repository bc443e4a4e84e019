//! Diagonal cost Hamiltonians and the diagonal-operator difference calculus.

use std::sync::OnceLock;

use crate::cost::{CostFunction, Qubo};
use crate::error::{Error, Result};
use crate::pauli::{walsh_hadamard, NormMethod, PauliSum, C64};

/// Largest clause support expanded by the per-clause Fourier transform.
pub const CLAUSE_SUPPORT_LIMIT: usize = 20;
/// Largest qubit count for projector Hamiltonians.
pub const PROJECTOR_LIMIT: usize = 20;

/// Pauli-Z polynomial `C = sum_alpha a_alpha Z^alpha` with cached partitions.
#[derive(Debug)]
pub struct DiagonalHam {
    op: PauliSum,
    by_weight: OnceLock<Vec<PauliSum>>,
    by_index: OnceLock<Vec<PauliSum>>,
}

impl Clone for DiagonalHam {
    fn clone(&self) -> Self {
        DiagonalHam::wrap(self.op.clone())
    }
}

impl PartialEq for DiagonalHam {
    fn eq(&self, other: &Self) -> bool {
        self.op == other.op
    }
}

impl DiagonalHam {
    fn wrap(op: PauliSum) -> Self {
        DiagonalHam { op, by_weight: OnceLock::new(), by_index: OnceLock::new() }
    }

    /// Wraps a diagonal Hermitian Pauli sum.
    pub fn from_pauli(op: PauliSum) -> Result<Self> {
        if !op.is_diagonal() {
            return Err(Error::NotDiagonal);
        }
        if op.terms().any(|t| t.coeff.im.abs() > 1e-12) {
            return Err(Error::NotHermitian);
        }
        Ok(Self::wrap(op))
    }

    /// Exact Pauli-Z expansion of a cost function, clause by clause.
    pub fn from_cost(c: &CostFunction) -> Result<Self> {
        let mut op = PauliSum::exact(c.n());
        op.add_term(0, 0, C64::new(c.constant(), 0.0));
        for cl in c.clauses() {
            let k = cl.support().len();
            if k > CLAUSE_SUPPORT_LIMIT {
                return Err(Error::SizeLimit { what: "clause support", limit: CLAUSE_SUPPORT_LIMIT, got: k });
            }
            let mut t = cl.table().to_vec();
            walsh_hadamard(&mut t);
            let scale = 1.0 / (1u64 << k) as f64;
            for (s, &v) in t.iter().enumerate() {
                if v != 0.0 {
                    let mut z = 0u64;
                    for (i, &var) in cl.support().iter().enumerate() {
                        if (s >> i) & 1 == 1 {
                            z |= 1 << var;
                        }
                    }
                    op.add_term(0, z, C64::new(v * scale, 0.0));
                }
            }
        }
        Ok(Self::wrap(op.with_tolerance(crate::pauli::PRUNE_TOL)))
    }

    /// Builds the Hamiltonian of a quadratic Pauli-Z polynomial directly.
    pub fn from_qubo(q: &Qubo) -> Self {
        let mut op = PauliSum::new(q.n);
        op.add_term(0, 0, C64::new(q.a0, 0.0));
        for (j, &a) in q.linear.iter().enumerate() {
            op.add_term(0, 1 << j, C64::new(a, 0.0));
        }
        for &(i, j, a) in &q.quadratic {
            op.add_term(0, (1 << i) | (1 << j), C64::new(a, 0.0));
        }
        Self::wrap(op)
    }

    pub fn op(&self) -> &PauliSum {
        &self.op
    }

    pub fn into_op(self) -> PauliSum {
        self.op
    }

    pub fn n(&self) -> usize {
        self.op.n()
    }

    /// Identity coefficient `a0 = 2^{-n} sum_x c(x)`.
    pub fn a0(&self) -> f64 {
        self.op.identity_coeff().re
    }

    /// Real coefficients `(zmask, a)` in mask order.
    pub fn coefficients(&self) -> Vec<(u64, f64)> {
        self.op.terms().map(|t| (t.zmask, t.coeff.re)).collect()
    }

    pub fn locality(&self) -> usize {
        self.op.locality()
    }

    /// `c(x)` from the Pauli expansion.
    pub fn eval(&self, x: u64) -> f64 {
        self.op
            .terms()
            .map(|t| if (t.zmask & x).count_ones().is_multiple_of(2) { t.coeff.re } else { -t.coeff.re })
            .sum()
    }

    /// Diagonal values for every basis state.
    pub fn values(&self) -> Result<Vec<f64>> {
        self.op.diagonal_values()
    }

    /// Locality partition `C_(0), ..., C_(k)`.
    pub fn by_weight(&self) -> &[PauliSum] {
        self.by_weight.get_or_init(|| {
            let k = self.op.locality();
            let mut parts = vec![PauliSum::new(self.n()); k + 1];
            for t in self.op.terms() {
                parts[t.zmask.count_ones() as usize].add_term(0, t.zmask, t.coeff);
            }
            parts
        })
    }

    /// `C_(k)`: terms of weight exactly `k`.
    pub fn weight_part(&self, k: usize) -> PauliSum {
        self.by_weight().get(k).cloned().unwrap_or_else(|| PauliSum::new(self.n()))
    }

    /// `C^{j}`: terms containing `Z_j`.
    pub fn index_part(&self, j: usize) -> Result<&PauliSum> {
        if j >= self.n() {
            return Err(Error::IndexOutOfRange { index: j, n: self.n() });
        }
        let parts = self.by_index.get_or_init(|| {
            let mut parts = vec![PauliSum::new(self.n()); self.n()];
            for t in self.op.terms() {
                for (q, part) in parts.iter_mut().enumerate() {
                    if t.zmask & (1 << q) != 0 {
                        part.add_term(0, t.zmask, t.coeff);
                    }
                }
            }
            parts
        });
        Ok(&parts[j])
    }

    /// `∂_j C = X_j C X_j - C = -2 C^{j}`.
    pub fn partial_diff_ham(&self, j: usize) -> Result<DiagonalHam> {
        Ok(Self::wrap(self.index_part(j)?.scale_real(-2.0)))
    }

    /// `D^ℓ C = sum_k (-2k)^ℓ C_(k)`.
    pub fn divergence_ham(&self, order: u32) -> Result<DiagonalHam> {
        if order == 0 {
            return Err(Error::InvalidParameter("divergence order must be at least 1".into()));
        }
        let mut op = PauliSum::new(self.n());
        for t in self.op.terms() {
            let k = t.zmask.count_ones() as f64;
            op.add_term(0, t.zmask, t.coeff * (-2.0 * k).powi(order as i32));
        }
        Ok(Self::wrap(op))
    }

    /// `DC = sum_j ∂_j C`, built from the per-index partitions.
    pub fn divergence_from_partials(&self) -> DiagonalHam {
        let mut op = PauliSum::new(self.n());
        for j in 0..self.n() {
            op = op.add(self.partial_diff_ham(j).expect("index in range").op()).expect("same n");
        }
        Self::wrap(op)
    }

    /// Star seminorm `(max c - min c) / 2` when enumerable, else the coefficient bound.
    pub fn star_norm(&self) -> f64 {
        self.op.star_seminorm_auto()
    }

    /// `‖C‖ = max |c(x)|` by enumeration.
    pub fn spectral_norm(&self) -> Result<f64> {
        Ok(self.values()?.iter().fold(0.0, |m, v| m.max(v.abs())))
    }

    /// `‖C_Z‖ = max |c(x) - a0|` by enumeration.
    pub fn cz_norm(&self) -> Result<f64> {
        let a0 = self.a0();
        Ok(self.values()?.iter().fold(0.0, |m, v| m.max((v - a0).abs())))
    }

    /// Star seminorm with an explicit method.
    pub fn star_norm_with(&self, method: NormMethod) -> Result<f64> {
        self.op.star_seminorm(method)
    }

    /// Quadratic form of an at most 2-local Hamiltonian.
    pub fn to_qubo(&self) -> Result<Qubo> {
        let k = self.locality();
        if k > 2 {
            return Err(Error::NotQubo(k));
        }
        let n = self.n();
        let mut linear = vec![0.0; n];
        let mut quadratic = Vec::new();
        for (z, a) in self.coefficients() {
            match z.count_ones() {
                0 => {}
                1 => linear[z.trailing_zeros() as usize] = a,
                _ => {
                    let i = z.trailing_zeros() as usize;
                    let j = 63 - z.leading_zeros() as usize;
                    quadratic.push((i, j, a));
                }
            }
        }
        Qubo::new(n, self.a0(), linear, quadratic)
    }
}

/// Diagonal Hamiltonian of a cost function.
pub fn to_hamiltonian(c: &CostFunction) -> Result<DiagonalHam> {
    DiagonalHam::from_cost(c)
}

/// `H_y = |y><y|` as a Pauli-Z polynomial with coefficients `±2^{-n}`.
pub fn projector_ham(y: u64, n: usize) -> Result<DiagonalHam> {
    if n > PROJECTOR_LIMIT {
        return Err(Error::SizeLimit { what: "projector qubits", limit: PROJECTOR_LIMIT, got: n });
    }
    if n < 64 && y >> n != 0 {
        return Err(Error::LengthMismatch { expected: n, got: 64 - y.leading_zeros() as usize });
    }
    let mut op = PauliSum::exact(n);
    let c = 1.0 / (1u64 << n) as f64;
    for z in 0..1u64 << n {
        let s = if (z & y).count_ones().is_multiple_of(2) { c } else { -c };
        op.add_term(0, z, C64::new(s, 0.0));
    }
    Ok(DiagonalHam::wrap(op))
}
