//! Shared random generators for the integration and acceptance suites.

#![allow(dead_code)]

use plapk::{
    CanonicalFamily, ExponentField, GridFunction, GrowthData, Nonlinearity, ParameterFunction,
    ProblemInstance, WeightField,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_grid_function(rng: &mut ChaCha8Rng, t: usize, scale: f64) -> GridFunction {
    let interior: Vec<f64> = (0..t).map(|_| rng.gen_range(-scale..scale)).collect();
    GridFunction::from_interior(&interior)
}

pub fn random_exponents(rng: &mut ChaCha8Rng, t: usize, lo: f64, hi: f64) -> ExponentField {
    let p: Vec<f64> = (0..t + 2).map(|_| rng.gen_range(lo..hi)).collect();
    ExponentField::new(t, p).unwrap()
}

pub fn random_weights(rng: &mut ChaCha8Rng, t: usize) -> WeightField {
    let h: Vec<f64> = (0..t + 2).map(|_| rng.gen_range(0.5..2.0)).collect();
    WeightField::new(t, h).unwrap()
}

pub fn random_parameter(rng: &mut ChaCha8Rng, t: usize) -> ParameterFunction {
    ParameterFunction::new(t, (0..t).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap()
}

/// Canonical family with a >= 0, a nonzero b entry and ρ in [0, 0.9).
pub fn random_canonical(
    rng: &mut ChaCha8Rng,
    t: usize,
    a_max: f64,
    q_lo: f64,
    q_hi: f64,
) -> CanonicalFamily {
    let a: Vec<f64> = (0..t).map(|_| rng.gen_range(0.0..a_max.max(1e-9))).collect();
    let mut b: Vec<f64> = (0..t).map(|_| rng.gen_range(-2.0..2.0)).collect();
    if b.iter().all(|v| v.abs() < 0.1) {
        b[0] = 1.0;
    }
    let q: Vec<f64> = (0..t).map(|_| rng.gen_range(q_lo..q_hi)).collect();
    let rho = rng.gen_range(0.0..0.9);
    CanonicalFamily::new(GrowthData::new(a, b, q).unwrap(), rho).unwrap()
}

/// Fully random instance for gradient checks (no regime constraint).
pub fn random_instance(rng: &mut ChaCha8Rng, t: usize) -> ProblemInstance {
    let p = random_exponents(rng, t, 1.5, 4.0);
    let h = random_weights(rng, t);
    let lambda = rng.gen_range(0.05..2.0);
    let f = Nonlinearity::Canonical(random_canonical(rng, t, 2.0, 1.0, 3.0));
    let u = random_parameter(rng, t);
    ProblemInstance::new(p, h, lambda, f, u).unwrap()
}

/// Random instance with p⁻ > q⁺ + 1 (strictly coercive regime).
pub fn random_strictly_coercive(rng: &mut ChaCha8Rng, t: usize) -> ProblemInstance {
    let q_hi = rng.gen_range(1.05..1.4);
    let f = Nonlinearity::Canonical(random_canonical(rng, t, 1.0, 1.0, q_hi));
    let p = random_exponents(rng, t, q_hi + 1.2, 4.0);
    let h = random_weights(rng, t);
    let lambda = rng.gen_range(0.05..1.0);
    let u = random_parameter(rng, t);
    ProblemInstance::new(p, h, lambda, f, u).unwrap()
}

/// Random instance with p⁻ = q⁺ + 1 and λ strictly below λ*.
pub fn random_borderline_admissible(rng: &mut ChaCha8Rng, t: usize) -> ProblemInstance {
    let q_top = rng.gen_range(1.0..1.6);
    // exponents at least q_top + 1 with the minimum attained
    let mut p: Vec<f64> = (0..t + 2)
        .map(|_| q_top + 1.0 + rng.gen_range(0.0..0.8))
        .collect();
    p[rng.gen_range(0..t + 2)] = q_top + 1.0;
    let p = ExponentField::new(t, p).unwrap();
    let mut q: Vec<f64> = (0..t).map(|_| rng.gen_range(1.0..q_top)).collect();
    q[rng.gen_range(0..t)] = q_top;
    let a: Vec<f64> = (0..t).map(|_| rng.gen_range(0.1..1.0)).collect();
    let mut b: Vec<f64> = (0..t).map(|_| rng.gen_range(-2.0..2.0)).collect();
    if b.iter().all(|v| v.abs() < 0.1) {
        b[0] = 1.0;
    }
    let growth = GrowthData::new(a, b, q).unwrap();
    let f = Nonlinearity::Canonical(CanonicalFamily::new(growth.clone(), rng.gen_range(0.0..0.9)).unwrap());
    let h = random_weights(rng, t);
    let (lambda_star, _) = plapk::constants::lambda_threshold(&p, &h, &f.growth().unwrap()).unwrap();
    let lambda = lambda_star * rng.gen_range(0.1..0.9);
    let u = random_parameter(rng, t);
    ProblemInstance::new(p, h, lambda, f, u).unwrap()
}

/// Random linear instance: p ≡ 2, x-independent forcing (a ≡ 0).
pub fn random_linear(rng: &mut ChaCha8Rng, t: usize) -> ProblemInstance {
    let p = ExponentField::uniform(t, 2.0).unwrap();
    let h = random_weights(rng, t);
    let lambda = rng.gen_range(0.05..2.0);
    let mut b: Vec<f64> = (0..t).map(|_| rng.gen_range(-2.0..2.0)).collect();
    if b.iter().all(|v| v.abs() < 0.1) {
        b[0] = 1.0;
    }
    let a = vec![0.0; t];
    let q = vec![1.0; t];
    let growth = GrowthData::new(a, b, q).unwrap();
    let f = Nonlinearity::Canonical(CanonicalFamily::new(growth, rng.gen_range(0.0..0.9)).unwrap());
    let u = random_parameter(rng, t);
    ProblemInstance::new(p, h, lambda, f, u).unwrap()
}

/// The T=3 reference instance: p ≡ 2, h ≡ 1, λ = 1, f ≡ 1; minimizer
/// (0, 1.5, 2, 1.5, 0) with energy -2.5.
pub fn reference_linear_instance() -> ProblemInstance {
    let t = 3;
    ProblemInstance::new(
        ExponentField::uniform(t, 2.0).unwrap(),
        WeightField::uniform(t, 1.0).unwrap(),
        1.0,
        Nonlinearity::constant(t, 1.0),
        ParameterFunction::uniform(t, 0.0),
    )
    .unwrap()
}
