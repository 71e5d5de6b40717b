//! Differential entropies (nats) and the collective entropy of a simultaneous measurement.

use std::f64::consts::PI;

use crate::apparatus::NoiseTerms;
use crate::bounds::gaussian_weight;
use crate::distributions::{
    inferred_momentum_density_with, inferred_position_density_with, Discretization,
};
use crate::error::{domain, Result};
use crate::grid::{trapezoid, ProbabilityDensity};
use crate::states::SystemState;

/// Samples below this contribute nothing (`0 ln 0 = 0`).
const ENTROPY_FLOOR: f64 = 1e-300;

/// Marginal entropies of the inferred position and momentum and their sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyResult {
    pub s_x: f64,
    pub s_p: f64,
    pub collective: f64,
}

impl EntropyResult {
    pub fn new(s_x: f64, s_p: f64) -> Self {
        Self {
            s_x,
            s_p,
            collective: s_x + s_p,
        }
    }
}

/// `−∫ f ln f` by the trapezoidal rule.
pub fn differential_entropy(density: &ProbabilityDensity) -> f64 {
    entropy_of_samples(density.values(), density.grid().spacing())
}

pub(crate) fn entropy_of_samples(values: &[f64], h: f64) -> f64 {
    let integrand: Vec<f64> = values
        .iter()
        .map(|&f| if f < ENTROPY_FLOOR { 0.0 } else { -f * f.ln() })
        .collect();
    trapezoid(&integrand, h)
}

pub fn marginal_entropies(state: &SystemState, noise: &NoiseTerms) -> Result<EntropyResult> {
    marginal_entropies_with(state, noise, &Discretization::default())
}

pub fn marginal_entropies_with(
    state: &SystemState,
    noise: &NoiseTerms,
    disc: &Discretization,
) -> Result<EntropyResult> {
    let (x, p) = rayon::join(
        || inferred_position_density_with(state, noise, disc),
        || inferred_momentum_density_with(state, noise, disc),
    );
    Ok(EntropyResult::new(
        differential_entropy(&x?),
        differential_entropy(&p?),
    ))
}

/// Closed-form collective entropy of a squeezed vacuum with position variance `sigma2`:
/// `1 + ln π − ½ ln[λ_G(σ, δ_X) λ_G(1/(2σ), δ_P)]`.
pub fn squeezed_collective_entropy_closed_form(sigma2: f64, noise: &NoiseTerms) -> Result<f64> {
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(domain(format!(
            "squeezed variance must be positive, got {sigma2}"
        )));
    }
    let sigma = sigma2.sqrt();
    let weight_x = gaussian_weight(sigma, noise.delta_x())?;
    let weight_p = gaussian_weight(0.5 / sigma, noise.delta_p())?;
    Ok(1.0 + PI.ln() - 0.5 * (weight_x * weight_p).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::states::{make_squeezed, position_density, FockSuperposition};

    const OMEGA: f64 = 2.837_877_066_409_345_5;

    #[test]
    fn gaussian_entropy() {
        let g = Grid::new(-12.0, 12.0, 4097).unwrap();
        for var in [0.3, 1.0, 2.2] {
            let d = ProbabilityDensity::gaussian(g, 0.0, var).unwrap();
            let exact = 0.5 * (2.0 * PI * std::f64::consts::E * var).ln();
            assert!((differential_entropy(&d) - exact).abs() < 1e-6);
        }
    }

    #[test]
    fn uniform_entropy_is_zero() {
        let g = Grid::new(0.0, 1.0, 1001).unwrap();
        let d = ProbabilityDensity::from_fn(g, |_| 1.0).unwrap();
        assert!(differential_entropy(&d).abs() < 1e-6);
    }

    #[test]
    fn fock_one_entropy_matches_oversampled_quadrature() {
        let state = SystemState::Fock(FockSuperposition::number_state(1).unwrap());
        let g = state.position_grid(4097).unwrap();
        let s = differential_entropy(&position_density(&state, &g).unwrap());
        // Oracle: closed-form density at 10x resolution.
        let fine = g.refined(10);
        let f: Vec<f64> = fine
            .points()
            .map(|x| 2.0 * x * x * (-x * x).exp() / PI.sqrt())
            .collect();
        let oracle = entropy_of_samples(&f, fine.spacing());
        assert!((s - oracle).abs() < 1e-6);
        // ln(√π/2) − ψ(3/2) + 3/2, evaluated in 30-digit arithmetic
        assert!((s - 1.342_727_788_386_178_3).abs() < 1e-6);
    }

    #[test]
    fn vacuum_at_minimal_noise_reaches_omega() {
        let half = 0.5f64.sqrt();
        let noise = NoiseTerms::new(half, half).unwrap();
        let r = marginal_entropies(&make_squeezed(0.5).unwrap(), &noise).unwrap();
        assert!((r.s_x - 1.418_938_533_204_672_7).abs() < 1e-6);
        assert!((r.s_p - r.s_x).abs() < 1e-9);
        assert!((r.collective - OMEGA).abs() < 1e-5);
        assert_eq!(r.collective, r.s_x + r.s_p);
    }

    #[test]
    fn closed_form_special_values() {
        let half = 0.5f64.sqrt();
        let noise = NoiseTerms::new(half, half).unwrap();
        assert!(
            (squeezed_collective_entropy_closed_form(0.5, &noise).unwrap() - OMEGA).abs() < 1e-14
        );
        let noise = NoiseTerms::new(1.0, 0.5).unwrap();
        assert!(
            (squeezed_collective_entropy_closed_form(1.0, &noise).unwrap() - OMEGA).abs() < 1e-14
        );
        assert!(squeezed_collective_entropy_closed_form(0.0, &noise).is_err());
    }

    #[test]
    fn closed_form_at_minimal_variance() {
        for (dx, dp) in [(0.8, 1.3), (2.0, 0.4), (1.0, 1.0)] {
            let noise = NoiseTerms::new(dx, dp).unwrap();
            let s = squeezed_collective_entropy_closed_form(dx / (2.0 * dp), &noise).unwrap();
            let expected = 1.0 + (2.0 * PI * (dx * dp + 0.5)).ln();
            assert!((s - expected).abs() < 1e-13);
        }
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let noise = NoiseTerms::new(0.9, 1.4).unwrap();
        for sigma2 in [0.2, 0.5, 1.7] {
            let r = marginal_entropies(&make_squeezed(sigma2).unwrap(), &noise).unwrap();
            let exact = squeezed_collective_entropy_closed_form(sigma2, &noise).unwrap();
            assert!((r.collective - exact).abs() < 1e-5);
        }
    }

    #[test]
    fn fock_one_exceeds_omega() {
        let half = 0.5f64.sqrt();
        let noise = NoiseTerms::new(half, half).unwrap();
        let state = SystemState::Fock(FockSuperposition::number_state(1).unwrap());
        let r = marginal_entropies(&state, &noise).unwrap();
        assert!(r.collective > OMEGA + 0.01);
    }
}
