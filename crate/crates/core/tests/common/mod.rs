#![allow(dead_code)]

use num_complex::Complex64;
use pointer_entropy::{FockSuperposition, NoiseTerms, SystemState};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Fock superposition `c₀..c_{n_max}` with independent standard-normal real and
/// imaginary parts.
pub fn random_fock(rng: &mut impl Rng, n_max: usize) -> SystemState {
    let coeffs = (0..=n_max)
        .map(|_| {
            Complex64::new(
                StandardNormal.sample(&mut *rng),
                StandardNormal.sample(&mut *rng),
            )
        })
        .collect();
    SystemState::Fock(FockSuperposition::new(coeffs).expect("non-zero coefficients"))
}

/// Noise with log-uniform product in `[1/2, max_product]` and ratio in `[1/5, 5]`.
pub fn random_noise(rng: &mut impl Rng, max_product: f64) -> NoiseTerms {
    let product = 0.5 * (max_product / 0.5).powf(rng.random::<f64>());
    let ratio = 25f64.powf(rng.random::<f64>()) / 5.0;
    NoiseTerms::from_product(product, ratio).expect("positive inputs")
}

pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    lo * (hi / lo).powf(rng.random::<f64>())
}
