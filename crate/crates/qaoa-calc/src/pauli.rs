//! Exact algebra of n-qubit Pauli sums in symplectic bit-mask form.
//!
//! A term with masks `(x, z)` and coefficient `c` denotes `c * X^x Z^z`, where
//! `X^x = prod_j X_j^{x_j}` and likewise for `Z`. Since `Y = i X Z`, a `Y_j`
//! factor is stored as `x_j = z_j = 1` with the factor `i` folded into the
//! coefficient. Qubit `j` (0-based) is bit `j` of both masks.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default magnitude at or below which coefficients are dropped.
pub const PRUNE_TOL: f64 = 1e-14;
/// Largest supported qubit count for bit-mask storage.
pub const MAX_QUBITS: usize = 64;
/// Default qubit limit for dense matrix construction.
pub const DENSE_LIMIT: usize = 14;

/// Single weighted Pauli string.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliTerm {
    pub n: usize,
    pub xmask: u64,
    pub zmask: u64,
    pub coeff: C64,
}

impl PauliTerm {
    pub fn weight(&self) -> u32 {
        (self.xmask | self.zmask).count_ones()
    }
}

/// Method used by [`PauliSum::star_seminorm`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormMethod {
    /// `(max - min) / 2` over the diagonal; requires a diagonal operator.
    ExactDiagonal,
    /// Sum of non-identity coefficient magnitudes.
    CoefficientBound,
    /// Half the spectral spread of the dense matrix.
    Dense,
}

/// Complex-weighted sum of Pauli strings.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n: usize,
    tol: f64,
    terms: BTreeMap<(u64, u64), C64>,
}

/// Sign of `X^{x1} Z^{z1} X^{x2} Z^{z2}` relative to `X^{x1^x2} Z^{z1^z2}`.
#[inline]
fn product_sign(z1: u64, x2: u64) -> f64 {
    if (z1 & x2).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// True when the two strings anticommute.
#[inline]
pub fn anticommutes(x1: u64, z1: u64, x2: u64, z2: u64) -> bool {
    ((x1 & z2).count_ones() + (z1 & x2).count_ones()) % 2 == 1
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliSum {
    /// Empty sum on `n` qubits with the default prune tolerance.
    pub fn new(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits supported");
        PauliSum { n, tol: PRUNE_TOL, terms: BTreeMap::new() }
    }

    /// Empty sum that never prunes (tolerance 0).
    pub fn exact(n: usize) -> Self {
        Self::new(n).with_tolerance(0.0)
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self.prune();
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn identity(n: usize, c: f64) -> Self {
        Self::term(n, 0, 0, C64::new(c, 0.0))
    }

    /// Single stored term `coeff * X^x Z^z`.
    pub fn term(n: usize, xmask: u64, zmask: u64, coeff: C64) -> Self {
        let mut s = Self::new(n);
        s.add_term(xmask, zmask, coeff);
        s
    }

    pub fn x(n: usize, j: usize) -> Self {
        Self::term(n, 1 << j, 0, C64::new(1.0, 0.0))
    }

    pub fn y(n: usize, j: usize) -> Self {
        Self::term(n, 1 << j, 1 << j, C64::new(0.0, 1.0))
    }

    pub fn z(n: usize, j: usize) -> Self {
        Self::term(n, 0, 1 << j, C64::new(1.0, 0.0))
    }

    /// Product of `Z_j` over the set bits of `mask`.
    pub fn z_string(n: usize, mask: u64, c: f64) -> Self {
        Self::term(n, 0, mask, C64::new(c, 0.0))
    }

    /// Builds `coeff * P_{j1} P_{j2} ...` from letters `I`, `X`, `Y`, `Z` on 0-based qubits.
    pub fn from_letters(n: usize, letters: &[(usize, char)], coeff: C64) -> Result<Self> {
        let mut x = 0u64;
        let mut z = 0u64;
        let mut c = coeff;
        for &(j, l) in letters {
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, n });
            }
            let bit = 1u64 << j;
            if (x | z) & bit != 0 {
                return Err(Error::InvalidParameter(format!("qubit {} repeated", j + 1)));
            }
            match l.to_ascii_uppercase() {
                'I' => {}
                'X' => x |= bit,
                'Z' => z |= bit,
                'Y' => {
                    x |= bit;
                    z |= bit;
                    c *= C64::i();
                }
                other => return Err(Error::Parse(format!("unknown Pauli letter {other}"))),
            }
        }
        Ok(Self::term(n, x, z, c))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Stored coefficient of `X^x Z^z` (zero if absent).
    pub fn coeff(&self, xmask: u64, zmask: u64) -> C64 {
        self.terms.get(&(xmask, zmask)).copied().unwrap_or_default()
    }

    pub fn identity_coeff(&self) -> C64 {
        self.coeff(0, 0)
    }

    /// Terms in lexicographic mask order.
    pub fn terms(&self) -> impl Iterator<Item = PauliTerm> + '_ {
        let n = self.n;
        self.terms.iter().map(move |(&(xmask, zmask), &coeff)| PauliTerm { n, xmask, zmask, coeff })
    }

    /// Adds `coeff * X^x Z^z`, merging with an existing term and pruning.
    pub fn add_term(&mut self, xmask: u64, zmask: u64, coeff: C64) {
        let full = full_mask(self.n);
        debug_assert!(xmask & !full == 0 && zmask & !full == 0);
        let e = self.terms.entry((xmask, zmask)).or_default();
        *e += coeff;
        if e.norm() <= self.tol {
            self.terms.remove(&(xmask, zmask));
        }
    }

    fn prune(&mut self) {
        let tol = self.tol;
        self.terms.retain(|_, c| c.norm() > tol);
    }

    fn check_dim(&self, other: &PauliSum) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    fn combined_tol(&self, other: &PauliSum) -> f64 {
        self.tol.min(other.tol)
    }

    fn from_map(n: usize, tol: f64, map: BTreeMap<(u64, u64), C64>) -> Self {
        let mut s = PauliSum { n, tol, terms: map };
        s.prune();
        s
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_dim(other)?;
        let mut map = self.terms.clone();
        for (k, &c) in &other.terms {
            *map.entry(*k).or_default() += c;
        }
        Ok(Self::from_map(self.n, self.combined_tol(other), map))
    }

    pub fn sub(&self, other: &PauliSum) -> Result<PauliSum> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: C64) -> PauliSum {
        let map = self.terms.iter().map(|(&k, &v)| (k, v * c)).collect();
        Self::from_map(self.n, self.tol, map)
    }

    pub fn scale_real(&self, c: f64) -> PauliSum {
        self.scale(C64::new(c, 0.0))
    }

    /// Exact product `a * b`.
    pub fn mul(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_dim(other)?;
        let mut map: BTreeMap<(u64, u64), C64> = BTreeMap::new();
        for (&(x1, z1), &c1) in &self.terms {
            for (&(x2, z2), &c2) in &other.terms {
                let c = c1 * c2 * product_sign(z1, x2);
                *map.entry((x1 ^ x2, z1 ^ z2)).or_default() += c;
            }
        }
        Ok(Self::from_map(self.n, self.combined_tol(other), map))
    }

    /// Exact commutator `a b - b a`.
    pub fn commutator(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_dim(other)?;
        let mut map: BTreeMap<(u64, u64), C64> = BTreeMap::new();
        for (&(x1, z1), &c1) in &self.terms {
            for (&(x2, z2), &c2) in &other.terms {
                if anticommutes(x1, z1, x2, z2) {
                    let c = c1 * c2 * (2.0 * product_sign(z1, x2));
                    *map.entry((x1 ^ x2, z1 ^ z2)).or_default() += c;
                }
            }
        }
        Ok(Self::from_map(self.n, self.combined_tol(other), map))
    }

    /// Adjoint term by term: `(c X^x Z^z)^dagger = conj(c) (-1)^{|x&z|} X^x Z^z`.
    pub fn adjoint(&self) -> PauliSum {
        let map = self.terms.iter().map(|(&(x, z), &c)| ((x, z), c.conj() * product_sign(z, x))).collect();
        Self::from_map(self.n, self.tol, map)
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.keys().all(|&(x, _)| x == 0)
    }

    /// True when the sum equals its adjoint within `tol` per coefficient.
    pub fn is_hermitian_within(&self, tol: f64) -> bool {
        let adj = self.adjoint();
        self.max_abs_diff(&adj) <= tol
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_hermitian_within(self.tol.max(1e-12))
    }

    /// Largest coefficient discrepancy between two sums.
    pub fn max_abs_diff(&self, other: &PauliSum) -> f64 {
        let mut m: f64 = 0.0;
        for (k, &c) in &self.terms {
            let d = c - other.terms.get(k).copied().unwrap_or_default();
            m = m.max(d.norm());
        }
        for (k, &c) in &other.terms {
            if !self.terms.contains_key(k) {
                m = m.max(c.norm());
            }
        }
        m
    }

    /// Keeps the terms acting trivially outside the qubit set `mask`.
    pub fn restrict_mask(&self, mask: u64) -> PauliSum {
        let map = self.terms.iter().filter(|(&(x, z), _)| (x | z) & !mask == 0).map(|(&k, &v)| (k, v)).collect();
        Self::from_map(self.n, self.tol, map)
    }

    /// Keeps the terms acting within the 0-based qubit set `qubits`.
    pub fn restrict(&self, qubits: &[usize]) -> Result<PauliSum> {
        let mut mask = 0u64;
        for &q in qubits {
            if q >= self.n {
                return Err(Error::IndexOutOfRange { index: q, n: self.n });
            }
            mask |= 1 << q;
        }
        Ok(self.restrict_mask(mask))
    }

    /// `<s|A|s>` for `|s> = |+>^n`: the sum of coefficients of pure I/X strings.
    pub fn plus_expectation(&self) -> C64 {
        self.terms.iter().filter(|(&(_, z), _)| z == 0).map(|(_, &c)| c).sum()
    }

    /// Union of all term supports.
    pub fn support_mask(&self) -> u64 {
        self.terms.keys().fold(0, |acc, &(x, z)| acc | x | z)
    }

    /// Largest weight among non-identity terms (0 for a multiple of the identity).
    pub fn locality(&self) -> usize {
        self.terms.keys().map(|&(x, z)| (x | z).count_ones() as usize).max().unwrap_or(0)
    }

    /// Conjugation `e^{i theta P} A e^{-i theta P}` by a Hermitian Pauli string `P = X^xg Z^zg`.
    pub fn conjugate_rotation(&self, xg: u64, zg: u64, theta: f64) -> PauliSum {
        debug_assert!((xg & zg).count_ones().is_multiple_of(2), "generator must be Hermitian");
        let (s, c) = (2.0 * theta).sin_cos();
        let mut map: BTreeMap<(u64, u64), C64> = BTreeMap::new();
        for (&(x, z), &v) in &self.terms {
            if anticommutes(x, z, xg, zg) {
                *map.entry((x, z)).or_default() += v * c;
                let w = v * C64::new(0.0, -s) * product_sign(z, xg);
                *map.entry((x ^ xg, z ^ zg)).or_default() += w;
            } else {
                *map.entry((x, z)).or_default() += v;
            }
        }
        Self::from_map(self.n, self.tol, map)
    }

    /// In-place [`PauliSum::conjugate_rotation`]; only anticommuting terms are touched.
    pub fn conjugate_rotation_in_place(&mut self, xg: u64, zg: u64, theta: f64) {
        debug_assert!((xg & zg).count_ones().is_multiple_of(2), "generator must be Hermitian");
        let (s, c) = (2.0 * theta).sin_cos();
        let moving: Vec<((u64, u64), C64)> =
            self.terms.iter().filter(|(&(x, z), _)| anticommutes(x, z, xg, zg)).map(|(&k, &v)| (k, v)).collect();
        for &(k, v) in &moving {
            if let Some(e) = self.terms.get_mut(&k) {
                *e = v * c;
            }
        }
        for &((x, z), v) in &moving {
            let w = v * C64::new(0.0, -s) * product_sign(z, xg);
            *self.terms.entry((x ^ xg, z ^ zg)).or_default() += w;
        }
        let tol = self.tol;
        for &((x, z), _) in &moving {
            for k in [(x, z), (x ^ xg, z ^ zg)] {
                if self.terms.get(&k).is_some_and(|v| v.norm() <= tol) {
                    self.terms.remove(&k);
                }
            }
        }
    }

    /// True when some term anticommutes with `X^xg Z^zg`.
    pub fn any_anticommuting(&self, xg: u64, zg: u64) -> bool {
        self.terms.keys().any(|&(x, z)| anticommutes(x, z, xg, zg))
    }

    /// Diagonal values `a(x) = sum_z a_z (-1)^{z.x}` for every basis state of a diagonal sum.
    pub fn diagonal_values(&self) -> Result<Vec<f64>> {
        if !self.is_diagonal() {
            return Err(Error::NotDiagonal);
        }
        if self.n > 26 {
            return Err(Error::SizeLimit { what: "diagonal enumeration qubits", limit: 26, got: self.n });
        }
        let mut v = vec![0.0; 1usize << self.n];
        for (&(_, z), &c) in &self.terms {
            v[z as usize] += c.re;
        }
        walsh_hadamard(&mut v);
        Ok(v)
    }

    /// Dense `2^n x 2^n` matrix; basis index bit `j` is qubit `j`.
    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        self.to_dense_limited(DENSE_LIMIT)
    }

    pub fn to_dense_limited(&self, limit: usize) -> Result<DMatrix<C64>> {
        if self.n > limit {
            return Err(Error::SizeLimit { what: "dense matrix qubits", limit, got: self.n });
        }
        let dim = 1usize << self.n;
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        for (&(x, z), &c) in &self.terms {
            for y in 0..dim {
                let sign = product_sign(z, y as u64);
                m[(y ^ x as usize, y)] += c * sign;
            }
        }
        Ok(m)
    }

    /// Star seminorm `min_a ||A + a I||` or an upper bound on it.
    pub fn star_seminorm(&self, method: NormMethod) -> Result<f64> {
        match method {
            NormMethod::ExactDiagonal => {
                let v = self.diagonal_values()?;
                let (lo, hi) = min_max(&v);
                Ok((hi - lo) / 2.0)
            }
            NormMethod::CoefficientBound => {
                Ok(self.terms.iter().filter(|(&k, _)| k != (0, 0)).map(|(_, c)| c.norm()).sum())
            }
            NormMethod::Dense => {
                let herm = if self.is_hermitian_within(1e-10) {
                    self.clone()
                } else if self.scale(C64::i()).is_hermitian_within(1e-10) {
                    self.scale(C64::i())
                } else {
                    return Err(Error::NotHermitian);
                };
                let ev = crate::dense::hermitian_eigenvalues(&herm.to_dense()?);
                let (lo, hi) = min_max(&ev);
                Ok((hi - lo) / 2.0)
            }
        }
    }

    /// Star seminorm choosing the most exact affordable method.
    pub fn star_seminorm_auto(&self) -> f64 {
        if self.is_diagonal() && self.n <= 24 {
            if let Ok(v) = self.star_seminorm(NormMethod::ExactDiagonal) {
                return v;
            }
        }
        if self.n <= 10 {
            if let Ok(v) = self.star_seminorm(NormMethod::Dense) {
                return v;
            }
        }
        self.star_seminorm(NormMethod::CoefficientBound).unwrap_or(f64::INFINITY)
    }

    /// Spectral norm of the dense matrix.
    pub fn spectral_norm_dense(&self) -> Result<f64> {
        Ok(crate::dense::spectral_norm(&self.to_dense()?))
    }
}

pub(crate) fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// In-place unnormalized Walsh-Hadamard transform.
pub fn walsh_hadamard(v: &mut [f64]) {
    let len = v.len();
    debug_assert!(len.is_power_of_two());
    let mut h = 1;
    while h < len {
        for i in (0..len).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

fn fmt_coeff(c: C64) -> String {
    if c.im == 0.0 {
        format!("({})", c.re)
    } else if c.im < 0.0 {
        format!("({}-{}i)", c.re, -c.im)
    } else {
        format!("({}+{}i)", c.re, c.im)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(x, z), &c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let ys = (x & z).count_ones();
            // Letter form coefficient: stored c = letter * i^{#Y}.
            let letter = c * C64::i().powu(ys).conj();
            write!(f, "{}", fmt_coeff(letter))?;
            if x | z == 0 {
                write!(f, " I")?;
            }
            for j in 0..self.n {
                let b = 1u64 << j;
                let l = match (x & b != 0, z & b != 0) {
                    (false, false) => continue,
                    (true, false) => 'X',
                    (false, true) => 'Z',
                    (true, true) => 'Y',
                };
                write!(f, " {}{}", l, j + 1)?;
            }
        }
        Ok(())
    }
}
