//! Statistical and exact checks of the classical samplers against the statevector oracle.

use qaoa_calc::cost::{generate_instance, CostFunction, Graph, InstanceSpec};
use qaoa_calc::emulate::{
    chi_square, derivative_bound, exact_induced_distribution, histogram, sample, sample_small_beta, tv_distance,
    SamplerConfig,
};
use qaoa_calc::hamop::to_hamiltonian;
use qaoa_calc::oracle::qaoa_state;
use qaoa_calc::series::{error_bounds, QaoaSchedule};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn max2sat6(seed: u64) -> CostFunction {
    generate_instance(&InstanceSpec::RandomKSat { n: 6, k: 2, m: 12 }, seed).unwrap()
}

fn oracle_probs(c: &CostFunction, g: f64, b: f64) -> Vec<f64> {
    qaoa_state(c, &QaoaSchedule::single(g, b)).unwrap().probabilities()
}

#[test]
fn million_draws_pass_chi_square() {
    let c = CostFunction::maxcut(&Graph::cycle(6).unwrap());
    let k = derivative_bound(&c).value;
    let gb = 0.9 / (2.0 * 6.0 * k);
    let cfg = SamplerConfig::leading_order(gb.sqrt(), gb.sqrt(), k, 2024);
    let draws = sample(&c, &cfg, 1_000_000).unwrap();
    let exact = exact_induced_distribution(&c, &cfg).unwrap();
    let (stat, dof) = chi_square(&histogram(&draws, 6), &exact).unwrap();
    let critical = ChiSquared::new(dof as f64).unwrap().inverse_cdf(0.999);
    assert!(stat < critical, "chi2 {stat} >= {critical} (dof {dof})");
}

#[test]
fn sampler_mean_reproduces_leading_order_expectation() {
    let c = max2sat6(3);
    let k = derivative_bound(&c).value;
    let gb = 1.0 / (2.0 * 6.0 * k);
    let cfg = SamplerConfig::leading_order(gb.sqrt(), -gb.sqrt(), k, 17);
    let draws = sample(&c, &cfg, 200_000).unwrap();
    let costs: Vec<f64> = draws.iter().map(|&x| c.eval(x)).collect();
    let m = costs.len() as f64;
    let mean = costs.iter().sum::<f64>() / m;
    let var = costs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let se = (var / m).sqrt();
    let v = c.values().unwrap();
    let dc = c.divergence_vector(1).unwrap();
    let c0 = v.iter().sum::<f64>() / 64.0;
    let cdc = v.iter().zip(&dc).map(|(a, b)| a * b).sum::<f64>() / 64.0;
    let target = c0 - 2.0 * cfg.gamma * cfg.beta * cdc;
    assert!((mean - target).abs() <= 4.0 * se, "mean {mean} target {target} se {se}");
}

#[test]
fn zero_angle_sampler_mean_is_uniform_average() {
    let c = max2sat6(8);
    let cfg = SamplerConfig::leading_order(0.0, 0.0, derivative_bound(&c).value, 1);
    let draws = sample(&c, &cfg, 100_000).unwrap();
    let costs: Vec<f64> = draws.iter().map(|&x| c.eval(x)).collect();
    let m = costs.len() as f64;
    let mean = costs.iter().sum::<f64>() / m;
    let var = costs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let c0 = c.values().unwrap().iter().sum::<f64>() / 64.0;
    assert!((mean - c0).abs() <= 4.0 * (var / m).sqrt());
}

#[test]
fn max2sat_sampler_within_probability_bound() {
    for seed in 0..5 {
        let c = max2sat6(seed);
        let h = to_hamiltonian(&c).unwrap();
        let k = derivative_bound(&c).value;
        for eps in [0.5, 0.1] {
            let eb = error_bounds(&h, 0.0, 0.0).unwrap();
            let (gmax, _, bprob) = eb.eps_ranges(eps);
            let g = gmax;
            let b = bprob.min(1.0 / (2.0 * 6.0 * k * g));
            let cfg = SamplerConfig::leading_order(g, b, k, seed);
            let induced = exact_induced_distribution(&c, &cfg).unwrap();
            let p1 = oracle_probs(&c, g, b);
            let worst = induced.iter().zip(&p1).map(|(a, q)| (a - q).abs()).fold(0.0, f64::max);
            assert!(worst <= eps / 64.0, "seed {seed} eps {eps}: {worst}");
            assert!(tv_distance(&induced, &p1).unwrap() <= eps);
        }
    }
}

#[test]
fn small_beta_sampler_per_string_bound() {
    let n = 6usize;
    let (g, b) = (1.2, 0.1 / n as f64);
    for seed in 0..5 {
        let c = max2sat6(seed);
        let cfg = SamplerConfig::small_beta(g, b, 0.0, seed);
        let induced = exact_induced_distribution(&c, &cfg).unwrap();
        let p1 = oracle_probs(&c, g, b);
        let nf = n as f64;
        let bound = 2.0 / 64.0 * 2.0 * nf * nf * b * b * (2.0 * nf * b).exp();
        for (a, q) in induced.iter().zip(&p1) {
            assert!((a - q).abs() <= bound, "{} > {bound}", (a - q).abs());
        }
    }
}

#[test]
fn small_beta_draws_are_reproducible() {
    let c = max2sat6(1);
    let a = sample_small_beta(&c, 2.0, 0.05, 0.4, 5000, 9).unwrap();
    let b = sample_small_beta(&c, 2.0, 0.05, 0.4, 5000, 9).unwrap();
    assert_eq!(a, b);
}
