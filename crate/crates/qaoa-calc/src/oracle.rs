//! Dense statevector ground truth for QAOA circuits, quenches and sum-of-paths amplitudes.

use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::cost::CostFunction;
use crate::dense::HermitianEigen;
use crate::error::{Error, Result};
use crate::grad::MixerSpec;
use crate::pauli::{PauliSum, C64};
use crate::series::QaoaSchedule;

/// Default qubit limit for the transverse-field statevector path.
pub const FAST_LIMIT: usize = 24;
/// Default qubit limit for dense-exponential paths.
pub const DENSE_EXP_LIMIT: usize = 12;
/// Largest number of enumerated paths in the sum-of-paths expansion.
pub const PATH_LIMIT: u32 = 24;
/// Magic bytes of the amplitude dump format.
pub const DUMP_MAGIC: &[u8; 8] = b"QAOAVEC1";

const PAR_THRESHOLD: usize = 1 << 14;

/// Configurable oracle size limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub fast: usize,
    pub dense: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { fast: FAST_LIMIT, dense: DENSE_EXP_LIMIT }
    }
}

/// Dense amplitude vector; index bit `j` is qubit `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// Uniform superposition `|s> = |+>^n`.
    pub fn plus(n: usize) -> Self {
        let a = C64::new(1.0 / ((1u64 << n) as f64).sqrt(), 0.0);
        StateVector { n, amps: vec![a; 1 << n] }
    }

    pub fn basis(n: usize, x: u64) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[x as usize] = C64::new(1.0, 0.0);
        StateVector { n, amps }
    }

    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    /// Wraps and normalizes explicit amplitudes.
    pub fn from_amps(n: usize, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != 1 << n {
            return Err(Error::LengthMismatch { expected: 1 << n, got: amps.len() });
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("zero state".into()));
        }
        Ok(StateVector { n, amps: amps.into_iter().map(|a| a / norm).collect() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Multiplies amplitude `x` by `e^{-i gamma c(x)}`.
    pub fn apply_phase(&mut self, values: &[f64], gamma: f64) {
        let f = |(a, &v): (&mut C64, &f64)| *a *= C64::from_polar(1.0, -gamma * v);
        if self.amps.len() >= PAR_THRESHOLD {
            self.amps.par_iter_mut().zip(values.par_iter()).for_each(f);
        } else {
            self.amps.iter_mut().zip(values.iter()).for_each(f);
        }
    }

    /// Applies `e^{-i beta X_j}` on every qubit.
    pub fn apply_tf_mixer(&mut self, beta: f64) {
        let (c, s) = (beta.cos(), beta.sin());
        let ms = C64::new(0.0, -s);
        for j in 0..self.n {
            let h = 1usize << j;
            let rot = |chunk: &mut [C64]| {
                let (lo, hi) = chunk.split_at_mut(h);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = x * c + y * ms;
                    *b = y * c + x * ms;
                }
            };
            if self.amps.len() >= PAR_THRESHOLD {
                self.amps.par_chunks_mut(2 * h).for_each(rot);
            } else {
                self.amps.chunks_mut(2 * h).for_each(rot);
            }
        }
    }

    /// Applies a dense matrix.
    pub fn apply_dense(&mut self, u: &DMatrix<C64>) {
        let v = DVector::from_column_slice(&self.amps);
        self.amps = (u * v).iter().copied().collect();
    }

    /// `A|psi>` for a Pauli sum (not normalized).
    pub fn apply_pauli(&self, op: &PauliSum) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        for t in op.terms() {
            for (y, &a) in self.amps.iter().enumerate() {
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let sign = if (t.zmask & y as u64).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
                out[y ^ t.xmask as usize] += t.coeff * a * sign;
            }
        }
        out
    }

    /// `e^{-i beta T}` for Hermitian `T` with `T^3 = T`: `I + (cos beta - 1) T^2 - i sin beta T`.
    pub fn apply_cubic_involution(&mut self, t: &PauliSum, beta: f64) {
        let t1 = self.apply_pauli(t);
        let t2 = StateVector { n: self.n, amps: t1.clone() }.apply_pauli(t);
        let (c, s) = (beta.cos(), beta.sin());
        for ((a, b1), b2) in self.amps.iter_mut().zip(&t1).zip(&t2) {
            *a += b2 * (c - 1.0) + b1 * C64::new(0.0, -s);
        }
    }

    /// `sum_x |psi_x|^2 c(x)`.
    pub fn expectation(&self, values: &[f64]) -> f64 {
        self.amps.iter().zip(values).map(|(a, v)| a.norm_sqr() * v).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<psi|A|psi>`.
    pub fn operator_expectation(&self, op: &PauliSum) -> C64 {
        let v = self.apply_pauli(op);
        self.amps.iter().zip(&v).map(|(a, b)| a.conj() * b).sum()
    }

    /// Probability mass on basis states failing `feasible`.
    pub fn leakage(&self, feasible: impl Fn(u64) -> bool) -> f64 {
        self.amps.iter().enumerate().filter(|(x, _)| !feasible(*x as u64)).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Writes the `QAOAVEC1` dump: 16-byte header then little-endian `(re, im)` f64 pairs.
    pub fn write_dump<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        w.write_all(DUMP_MAGIC)?;
        w.write_all(&(self.n as u32).to_le_bytes())?;
        w.write_all(&0u32.to_le_bytes())?;
        for a in &self.amps {
            w.write_all(&a.re.to_le_bytes())?;
            w.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads a `QAOAVEC1` dump.
    pub fn read_dump<R: Read>(r: &mut R) -> Result<Self> {
        let io = |e: std::io::Error| Error::Parse(format!("amplitude dump: {e}"));
        let mut head = [0u8; 16];
        r.read_exact(&mut head).map_err(io)?;
        if &head[..8] != DUMP_MAGIC {
            return Err(Error::Parse("amplitude dump: bad magic".into()));
        }
        let n = u32::from_le_bytes(head[8..12].try_into().unwrap()) as usize;
        if n > 30 {
            return Err(Error::SizeLimit { what: "dump qubits", limit: 30, got: n });
        }
        let mut amps = Vec::with_capacity(1 << n);
        let mut buf = [0u8; 16];
        for _ in 0..1usize << n {
            r.read_exact(&mut buf).map_err(io)?;
            let re = f64::from_le_bytes(buf[..8].try_into().unwrap());
            let im = f64::from_le_bytes(buf[8..].try_into().unwrap());
            amps.push(C64::new(re, im));
        }
        Ok(StateVector { n, amps })
    }
}

/// Initial state of a simulation.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialState {
    Plus,
    Zero,
    Custom(StateVector),
}

/// How a non-transverse-field mixer unitary is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MixerMode {
    /// `e^{-i beta B̃}` via dense eigendecomposition.
    Hamiltonian,
    /// Ordered product of partial mixers `prod_j e^{-i beta B̃_j}`.
    Sequential,
}

enum MixerImpl {
    Tf,
    Eigen(HermitianEigen),
    Partials(Vec<PauliSum>),
}

/// Runs the circuit `U_M(beta_p) U_P(gamma_p) ... U_M(beta_1) U_P(gamma_1)` on the initial state.
pub fn simulate(
    c: &CostFunction,
    sched: &QaoaSchedule,
    mixer: &MixerSpec,
    init: InitialState,
    mode: MixerMode,
) -> Result<StateVector> {
    simulate_with_limits(c, sched, mixer, init, mode, OracleLimits::default())
}

pub fn simulate_with_limits(
    c: &CostFunction,
    sched: &QaoaSchedule,
    mixer: &MixerSpec,
    init: InitialState,
    mode: MixerMode,
    limits: OracleLimits,
) -> Result<StateVector> {
    let n = c.n();
    let is_tf = matches!(mixer, MixerSpec::TransverseField);
    let limit = if is_tf || mode == MixerMode::Sequential { limits.fast } else { limits.dense };
    if n > limit {
        return Err(Error::SizeLimit { what: "oracle qubits", limit, got: n });
    }
    let values = c.values()?;
    let mut psi = match init {
        InitialState::Plus => StateVector::plus(n),
        InitialState::Zero => StateVector::zero(n),
        InitialState::Custom(s) => {
            if s.n() != n {
                return Err(Error::DimensionMismatch { left: n, right: s.n() });
            }
            s
        }
    };
    let imp = if is_tf {
        MixerImpl::Tf
    } else {
        match mode {
            MixerMode::Hamiltonian => {
                MixerImpl::Eigen(HermitianEigen::new(&mixer.pauli(n)?.to_dense_limited(limits.dense)?))
            }
            MixerMode::Sequential => MixerImpl::Partials(mixer.partial_terms(n)?),
        }
    };
    for (g, b) in sched.gammas().iter().zip(sched.betas()) {
        psi.apply_phase(&values, *g);
        match &imp {
            MixerImpl::Tf => psi.apply_tf_mixer(*b),
            MixerImpl::Eigen(e) => psi.apply_dense(&e.expm_minus_i(*b)),
            MixerImpl::Partials(ts) => {
                for t in ts {
                    psi.apply_cubic_involution(t, *b);
                }
            }
        }
    }
    Ok(psi)
}

/// Standard QAOA state from `|s>` with the transverse-field mixer.
pub fn qaoa_state(c: &CostFunction, sched: &QaoaSchedule) -> Result<StateVector> {
    simulate(c, sched, &MixerSpec::TransverseField, InitialState::Plus, MixerMode::Hamiltonian)
}

/// `<C>_p` from the statevector.
pub fn qaoa_expectation(c: &CostFunction, sched: &QaoaSchedule) -> Result<f64> {
    let psi = qaoa_state(c, sched)?;
    Ok(psi.expectation(&c.values()?))
}

/// `<x|e^{-i beta B}|y>` for Hamming distance `d`: `cos^{n-d} beta (-i sin beta)^d`.
pub fn mixing_matrix_element(beta: f64, n: usize, d: usize) -> Result<C64> {
    if d > n {
        return Err(Error::InvalidParameter(format!("distance {d} exceeds {n}")));
    }
    let c = beta.cos().powi((n - d) as i32);
    let s = C64::new(0.0, -beta.sin()).powu(d as u32);
    Ok(s * c)
}

/// Amplitude `<x|gamma beta>_p` by direct summation over intermediate strings.
#[allow(clippy::needless_range_loop)]
pub fn sum_of_paths_amplitude(c: &CostFunction, sched: &QaoaSchedule, x: u64) -> Result<C64> {
    let n = c.n();
    let p = sched.p();
    let bits = (n * p) as u32;
    if bits > PATH_LIMIT {
        return Err(Error::SizeLimit { what: "path enumeration bits", limit: PATH_LIMIT as usize, got: bits as usize });
    }
    let init = C64::new(1.0 / ((1u64 << n) as f64).sqrt(), 0.0);
    if p == 0 {
        return Ok(init);
    }
    let values = c.values()?;
    let mask = (1u64 << n) - 1;
    let u: Vec<Vec<C64>> = sched
        .betas()
        .iter()
        .map(|&b| (0..=n).map(|d| mixing_matrix_element(b, n, d).expect("d <= n")).collect())
        .collect();
    let mut total = C64::new(0.0, 0.0);
    for path in 0..1u64 << bits {
        let mut w = init;
        for j in 0..p {
            let z = (path >> (j * n)) & mask;
            let next = if j + 1 < p { (path >> ((j + 1) * n)) & mask } else { x };
            w *= C64::from_polar(1.0, -sched.gammas()[j] * values[z as usize]);
            w *= u[j][(z ^ next).count_ones() as usize];
        }
        total += w;
    }
    Ok(total)
}

/// `e^{-i tau H}|s>` for `H = a C + b B` with the transverse-field `B`.
pub fn quench_simulate(c: &CostFunction, a: f64, b: f64, tau: f64) -> Result<StateVector> {
    let n = c.n();
    if n > DENSE_EXP_LIMIT {
        return Err(Error::SizeLimit { what: "quench qubits", limit: DENSE_EXP_LIMIT, got: n });
    }
    let h = quench_hamiltonian(c, a, b)?;
    let mut psi = StateVector::plus(n);
    psi.apply_dense(&HermitianEigen::new(&h).expm_minus_i(tau));
    Ok(psi)
}

/// Dense `a C + b B`.
pub fn quench_hamiltonian(c: &CostFunction, a: f64, b: f64) -> Result<DMatrix<C64>> {
    let n = c.n();
    let bm = MixerSpec::TransverseField.pauli(n)?.scale_real(b).to_dense_limited(DENSE_EXP_LIMIT)?;
    let mut h = bm;
    for (x, v) in c.values()?.into_iter().enumerate() {
        h[(x, x)] += C64::new(a * v, 0.0);
    }
    Ok(h)
}

/// `<psi|M|psi>` for a dense matrix.
pub fn dense_expectation(psi: &StateVector, m: &DMatrix<C64>) -> C64 {
    let v = DVector::from_column_slice(psi.amps());
    (v.adjoint() * m * &v)[(0, 0)]
}
