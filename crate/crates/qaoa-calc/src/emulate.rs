//! Classical randomized samplers for leading-order QAOA_1 output distributions.
//!
//! Every draw uses its own generator: `ChaCha8Rng::seed_from_u64(seed)` with the stream set to
//! the draw index (see [`RNG_ALGORITHM`]), so sample `i` depends only on `(seed, i)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cost::{CostFunction, CostKind};
use crate::error::{Error, Result};
use crate::series::QaoaSchedule;

/// Identifier of the per-draw generator construction.
pub const RNG_ALGORITHM: &str = "chacha8-seed_from_u64-stream=draw_index";
/// Largest `n` for which [`derivative_bound`] enumerates.
pub const DERIVATIVE_ENUM_LIMIT: usize = 12;
/// Largest `n` for [`exact_induced_distribution`].
pub const INDUCED_ENUM_LIMIT: usize = 12;
/// Default small-β constant `b` in `|β| ≤ b/n`.
pub const DEFAULT_SMALL_BETA_CONSTANT: f64 = 0.4;

/// How a derivative bound was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundMethod {
    /// Exact maximum over all `x` and `j`.
    Enumerated,
    /// `2·(max weighted degree)` for MaxCut.
    MaxCutDegree,
    /// `|α|` for the Hamming ramp.
    RampSlope,
    /// `max_j Σ_{clauses ∋ j} (max c_i - min c_i)`, never above `2‖C_Z‖`.
    ClauseRange,
}

/// A value `K` with `|∂_j c(x)| ≤ K` for all `j, x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeBound {
    pub value: f64,
    pub method: BoundMethod,
}

/// Exact `max |∂_j c|` for `n ≤ 12`, otherwise a structural bound.
pub fn derivative_bound(c: &CostFunction) -> DerivativeBound {
    if c.n() <= DERIVATIVE_ENUM_LIMIT {
        return DerivativeBound { value: enumerated_derivative_max(c), method: BoundMethod::Enumerated };
    }
    structural_derivative_bound(c)
}

/// `max_{x,j} |∂_j c(x)|` by enumeration of all `n·2^n` differences.
pub fn enumerated_derivative_max(c: &CostFunction) -> f64 {
    let n = c.n();
    (0..1u64 << n)
        .into_par_iter()
        .map(|x| (0..n).map(|j| c.partial_unchecked(j, x).abs()).fold(0.0, f64::max))
        .reduce(|| 0.0, f64::max)
}

/// Bound from instance structure alone.
pub fn structural_derivative_bound(c: &CostFunction) -> DerivativeBound {
    match c.kind() {
        CostKind::MaxCut(g) => {
            let mut deg = vec![0.0; g.n()];
            for (e, &(u, v)) in g.edges().iter().enumerate() {
                deg[u] += g.weight(e).abs();
                deg[v] += g.weight(e).abs();
            }
            let value = 2.0 * deg.into_iter().fold(0.0, f64::max);
            DerivativeBound { value, method: BoundMethod::MaxCutDegree }
        }
        CostKind::HammingRamp { alpha } => DerivativeBound { value: alpha.abs(), method: BoundMethod::RampSlope },
        _ => {
            let range = (0..c.n())
                .map(|j| {
                    c.clauses_of(j)
                        .iter()
                        .map(|&ci| {
                            let t = c.clauses()[ci].table();
                            let hi = t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                            let lo = t.iter().copied().fold(f64::INFINITY, f64::min);
                            hi - lo
                        })
                        .sum::<f64>()
                })
                .fold(0.0, f64::max);
            DerivativeBound { value: range, method: BoundMethod::ClauseRange }
        }
    }
}

/// Flip-bias rule of the sampler.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SamplerMode {
    /// `δ = 2nγβ ∂_j c(x_0)`; requires `|γβ| ≤ 1/(2nK)`.
    LeadingOrder,
    /// `δ = 2nβ sin(γ ∂_j c(x_0))`; requires `|β| ≤ b/n` with `b ≤ 1/2`.
    SmallBeta { b: f64 },
    /// Leading-order rule with `γβ` replaced by `Σ_{i≤j} γ_i β_j` of a QAOA_p schedule.
    /// No error guarantee is claimed for this mode.
    EffectiveAngles,
}

/// Sampler parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplerConfig {
    pub gamma: f64,
    pub beta: f64,
    /// Derivative bound `K`.
    pub k: f64,
    pub mode: SamplerMode,
    pub seed: u64,
}

impl SamplerConfig {
    /// Leading-order QAOA_1 sampler.
    pub fn leading_order(gamma: f64, beta: f64, k: f64, seed: u64) -> Self {
        Self { gamma, beta, k, mode: SamplerMode::LeadingOrder, seed }
    }

    /// Small-β sampler with the default constant `b = 0.4`.
    pub fn small_beta(gamma: f64, beta: f64, k: f64, seed: u64) -> Self {
        Self { gamma, beta, k, mode: SamplerMode::SmallBeta { b: DEFAULT_SMALL_BETA_CONSTANT }, seed }
    }

    /// Effective-angle sampler for a QAOA_p schedule (`γ' = Σ_{i≤j}γ_iβ_j`, `β' = 1`).
    pub fn effective_angles(sched: &QaoaSchedule, k: f64, seed: u64) -> Self {
        Self { gamma: sched.leading_coefficient(), beta: 1.0, k, mode: SamplerMode::EffectiveAngles, seed }
    }

    /// Checks the mode's precondition for an `n`-variable instance.
    pub fn validate(&self, n: usize) -> Result<()> {
        if n == 0 || n > 64 {
            return Err(Error::InvalidParameter(format!("sampler needs 1 ≤ n ≤ 64, got {n}")));
        }
        if !self.gamma.is_finite() || !self.beta.is_finite() || self.k < 0.0 || !self.k.is_finite() {
            return Err(Error::InvalidParameter("sampler angles and K must be finite, K ≥ 0".into()));
        }
        let nf = n as f64;
        match self.mode {
            SamplerMode::LeadingOrder | SamplerMode::EffectiveAngles => {
                let value = (self.gamma * self.beta).abs();
                let bound = 1.0 / (2.0 * nf * self.k);
                if value > bound {
                    return Err(Error::SamplerBound { quantity: "|gamma*beta|", value, bound });
                }
            }
            SamplerMode::SmallBeta { b } => {
                if !(b > 0.0 && b <= 0.5) {
                    return Err(Error::InvalidParameter(format!("small-beta constant must lie in (0, 1/2], got {b}")));
                }
                let value = self.beta.abs();
                let bound = b / nf;
                if value > bound {
                    return Err(Error::SamplerBound { quantity: "|beta|", value, bound });
                }
            }
        }
        Ok(())
    }

    /// `δ` for drawing `(x_0, j)`.
    fn delta(&self, c: &CostFunction, x0: u64, j: usize) -> f64 {
        let n = c.n() as f64;
        let d = c.partial_unchecked(j, x0);
        match self.mode {
            SamplerMode::LeadingOrder | SamplerMode::EffectiveAngles => 2.0 * n * self.gamma * self.beta * d,
            SamplerMode::SmallBeta { .. } => 2.0 * n * self.beta * (self.gamma * d).sin(),
        }
    }

    /// Flip probability `½ + ½δ`, rejecting out-of-range biases.
    fn flip_probability(&self, c: &CostFunction, x0: u64, j: usize) -> Result<f64> {
        let delta = self.delta(c, x0, j);
        if delta.abs() > 1.0 + 1e-12 {
            return Err(Error::SamplerBound { quantity: "|delta|", value: delta.abs(), bound: 1.0 });
        }
        Ok((0.5 + 0.5 * delta).clamp(0.0, 1.0))
    }
}

fn draw(c: &CostFunction, cfg: &SamplerConfig, index: u64) -> Result<u64> {
    let n = c.n();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let x0 = rng.random::<u64>() & mask;
    let j = rng.random_range(0..n);
    let coin: f64 = rng.random();
    let p = cfg.flip_probability(c, x0, j)?;
    Ok(if coin < p { x0 ^ (1 << j) } else { x0 })
}

/// Draws `count` bitstrings; draw `i` is a function of `(seed, i)` only.
pub fn sample(c: &CostFunction, cfg: &SamplerConfig, count: usize) -> Result<Vec<u64>> {
    sample_range(c, cfg, 0, count)
}

/// Draws with indices `start..start+count`.
pub fn sample_range(c: &CostFunction, cfg: &SamplerConfig, start: u64, count: usize) -> Result<Vec<u64>> {
    cfg.validate(c.n())?;
    (0..count as u64).into_par_iter().map(|i| draw(c, cfg, start + i)).collect()
}

/// Small-β sampler with unrestricted `γ` and constant `b`.
pub fn sample_small_beta(c: &CostFunction, gamma: f64, beta: f64, b: f64, count: usize, seed: u64) -> Result<Vec<u64>> {
    let cfg = SamplerConfig { gamma, beta, k: 0.0, mode: SamplerMode::SmallBeta { b }, seed };
    sample(c, &cfg, count)
}

/// Output distribution of the sampler, by enumerating every `(x_0, j, coin)` outcome.
pub fn exact_induced_distribution(c: &CostFunction, cfg: &SamplerConfig) -> Result<Vec<f64>> {
    let n = c.n();
    if n > INDUCED_ENUM_LIMIT {
        return Err(Error::SizeLimit { what: "induced-distribution qubits", limit: INDUCED_ENUM_LIMIT, got: n });
    }
    cfg.validate(n)?;
    let dim = 1usize << n;
    let w = 1.0 / (dim as f64 * n as f64);
    let mut dist = vec![0.0; dim];
    for x0 in 0..dim as u64 {
        for j in 0..n {
            let p = cfg.flip_probability(c, x0, j)?;
            dist[(x0 ^ (1 << j)) as usize] += w * p;
            dist[x0 as usize] += w * (1.0 - p);
        }
    }
    Ok(dist)
}

/// Empirical frequencies of `samples` over `2^n` outcomes.
pub fn empirical_distribution(samples: &[u64], n: usize) -> Vec<f64> {
    let counts = histogram(samples, n);
    let total = samples.len().max(1) as f64;
    counts.into_iter().map(|k| k as f64 / total).collect()
}

/// Outcome counts over `2^n` cells.
pub fn histogram(samples: &[u64], n: usize) -> Vec<u64> {
    let mut counts = vec![0u64; 1 << n];
    for &x in samples {
        counts[x as usize] += 1;
    }
    counts
}

/// `½ Σ |p - q|`.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch { expected: p.len(), got: q.len() });
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Pearson statistic of `counts` against `expected` probabilities and its degrees of freedom.
/// Cells with zero expected probability are skipped; a nonzero count there gives `+∞`.
pub fn chi_square(counts: &[u64], expected: &[f64]) -> Result<(f64, usize)> {
    if counts.len() != expected.len() {
        return Err(Error::LengthMismatch { expected: expected.len(), got: counts.len() });
    }
    let total: u64 = counts.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&k, &p) in counts.iter().zip(expected) {
        let e = p * total as f64;
        if e <= 0.0 {
            if k > 0 {
                return Ok((f64::INFINITY, cells.saturating_sub(1)));
            }
            continue;
        }
        stat += (k as f64 - e).powi(2) / e;
        cells += 1;
    }
    Ok((stat, cells.saturating_sub(1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{generate_instance, Graph, InstanceSpec};
    use crate::exact::small_beta_p1;
    use crate::series::leading_order_qaoa1;

    fn qubo6(seed: u64) -> CostFunction {
        generate_instance(&InstanceSpec::RandomQubo { n: 6, density: 0.6, integer: false }, seed).unwrap()
    }

    #[test]
    fn maxcut_structural_dominates_exact() {
        let g = Graph::random_gnp(9, 0.5, &mut ChaCha8Rng::seed_from_u64(3));
        let c = CostFunction::maxcut(&g);
        let exact = enumerated_derivative_max(&c);
        let s = structural_derivative_bound(&c);
        assert_eq!(s.method, BoundMethod::MaxCutDegree);
        assert_eq!(s.value, 2.0 * g.max_degree() as f64);
        assert!(s.value >= exact);
    }

    #[test]
    fn ramp_bound_is_alpha() {
        let c = CostFunction::hamming_ramp(15, -2.5);
        let k = derivative_bound(&c);
        assert_eq!(k.method, BoundMethod::RampSlope);
        assert_eq!(k.value, 2.5);
        assert_eq!(enumerated_derivative_max(&CostFunction::hamming_ramp(5, -2.5)), 2.5);
    }

    #[test]
    fn enumerated_bound_matches_brute_force() {
        let c = qubo6(11);
        let v = c.values().unwrap();
        let mut m: f64 = 0.0;
        for x in 0..64usize {
            for j in 0..6 {
                m = m.max((v[x ^ (1 << j)] - v[x]).abs());
            }
        }
        let k = derivative_bound(&c);
        assert_eq!(k.method, BoundMethod::Enumerated);
        assert!((k.value - m).abs() < 1e-12);
        assert!(structural_derivative_bound(&c).value >= m - 1e-12);
    }

    #[test]
    fn zero_angles_give_uniform() {
        let c = qubo6(1);
        let cfg = SamplerConfig::leading_order(0.0, 0.3, derivative_bound(&c).value, 5);
        let d = exact_induced_distribution(&c, &cfg).unwrap();
        assert!(d.iter().all(|p| (p - 1.0 / 64.0).abs() < 1e-15));
    }

    #[test]
    fn induced_distribution_equals_leading_order() {
        for seed in 0..5 {
            let c = qubo6(seed);
            let k = derivative_bound(&c).value;
            let gb = 1.0 / (2.0 * 6.0 * k);
            let (g, b) = (0.7 * gb.sqrt(), 0.9 * gb.sqrt());
            let cfg = SamplerConfig::leading_order(g, b, k, seed);
            let d = exact_induced_distribution(&c, &cfg).unwrap();
            let lo = leading_order_qaoa1(&c, g, b).unwrap().probabilities().unwrap();
            for (a, b) in d.iter().zip(&lo) {
                assert!((a - b).abs() < 1e-14);
            }
            assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn induced_small_beta_matches_formula() {
        let c = qubo6(7);
        let (g, b) = (1.2, 0.1 / 6.0);
        let cfg = SamplerConfig::small_beta(g, b, 0.0, 1);
        let d = exact_induced_distribution(&c, &cfg).unwrap();
        let f = small_beta_p1(&c, g, b).unwrap();
        for (a, b) in d.iter().zip(&f.probabilities) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn small_argument_matches_leading_order() {
        let c = qubo6(2);
        let k = derivative_bound(&c).value;
        let (g, b) = (1e-5, 1e-3);
        let lo = exact_induced_distribution(&c, &SamplerConfig::leading_order(g, b, k, 0)).unwrap();
        let sb = exact_induced_distribution(&c, &SamplerConfig::small_beta(g, b, k, 0)).unwrap();
        assert!(tv_distance(&lo, &sb).unwrap() < 1e-12);
    }

    #[test]
    fn precondition_refusals() {
        let c = qubo6(3);
        let k = derivative_bound(&c).value;
        let err = sample(&c, &SamplerConfig::leading_order(1.0, 1.0, k, 0), 10).unwrap_err();
        assert!(matches!(err, Error::SamplerBound { quantity: "|gamma*beta|", .. }));
        let err = sample_small_beta(&c, 3.0, 0.1, 0.4, 10, 0).unwrap_err();
        assert!(matches!(err, Error::SamplerBound { quantity: "|beta|", .. }));
        assert!(sample_small_beta(&c, 3.0, 0.01, 0.9, 10, 0).is_err());
    }

    #[test]
    fn draws_are_index_addressed() {
        let c = qubo6(4);
        let k = derivative_bound(&c).value;
        let cfg = SamplerConfig::leading_order(0.05, 0.05, k, 99);
        let all = sample(&c, &cfg, 1000).unwrap();
        let tail = sample_range(&c, &cfg, 600, 400).unwrap();
        assert_eq!(&all[600..], &tail[..]);
        assert_eq!(all, sample(&c, &cfg, 1000).unwrap());
        let other = sample(&c, &SamplerConfig { seed: 100, ..cfg }, 1000).unwrap();
        assert_ne!(all, other);
    }

    #[test]
    fn effective_angles_use_leading_coefficient() {
        let c = qubo6(5);
        let k = derivative_bound(&c).value;
        let sched = QaoaSchedule::new(vec![0.01, 0.02], vec![0.03, 0.01]).unwrap();
        let cfg = SamplerConfig::effective_angles(&sched, k, 0);
        let d = exact_induced_distribution(&c, &cfg).unwrap();
        let coef = 0.01 * 0.03 + 0.01 * 0.01 + 0.02 * 0.01;
        let lo = leading_order_qaoa1(&c, coef, 1.0).unwrap().probabilities().unwrap();
        assert!(tv_distance(&d, &lo).unwrap() < 1e-14);
    }

    #[test]
    fn chi_square_handles_zero_cells() {
        let (s, dof) = chi_square(&[5, 5, 0], &[0.5, 0.5, 0.0]).unwrap();
        assert_eq!((s, dof), (0.0, 1));
        assert!(chi_square(&[5, 4, 1], &[0.5, 0.5, 0.0]).unwrap().0.is_infinite());
    }
}
