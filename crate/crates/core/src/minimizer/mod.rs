//! Numerical search for minimal-entropy states among truncated Fock superpositions.
//!
//! The search runs Nelder–Mead over the real and imaginary parts of `c₀..c_N`,
//! normalizing inside the objective, from several seeded random starts.
//!
//! The collective entropy is blind to phase-space displacements, so with a generous
//! cutoff the minimum is a whole family of displaced states. Each restart first
//! minimizes the entropy plus a penalty on `⟨x⟩² + ⟨p⟩²`, then polishes without the
//! penalty and keeps the uncentred state only if it is lower by more than
//! `degeneracy_tol`. A small cutoff breaks the displacement symmetry and can make the
//! uncentred state strictly better.

mod nelder_mead;

pub use nelder_mead::{nelder_mead, nelder_mead_restarted, SimplexOptions, SimplexResult};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::apparatus::NoiseTerms;
use crate::distributions::FockSmoother;
use crate::entropy::entropy_of_samples;
use crate::error::{domain, Error, Result};
use crate::grid::trapezoid;
use crate::states::MAX_FOCK_ORDER;

/// Largest squeezed-state weight allowed outside the first `MAX_FOCK_ORDER + 1` levels.
pub const SQUEEZED_TRUNCATION_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    /// Fock cutoff; the search space is `c₀..c_{n_max}`.
    pub n_max: usize,
    /// Iteration cap of a single simplex run.
    pub max_iters: usize,
    /// Objective spread at which a simplex run stops.
    pub simplex_tol: f64,
    /// Number of random initializations.
    pub restarts: usize,
    pub seed: u64,
    pub initial_step: f64,
    /// Simplex re-seeds at the incumbent within one restart.
    pub polish_rounds: usize,
    /// Lattice spacing of the inferred densities inside the objective.
    pub grid_spacing: f64,
    /// Weight of the `⟨x⟩² + ⟨p⟩²` penalty of the first pass; zero runs a single
    /// unpenalized pass.
    pub centering_weight: f64,
    /// Entropy decrease required to give up the centred state.
    pub degeneracy_tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            n_max: 12,
            max_iters: 5000,
            simplex_tol: 1e-9,
            restarts: 8,
            seed: 0,
            initial_step: 0.5,
            polish_rounds: 40,
            grid_spacing: 0.04,
            centering_weight: 1.0,
            degeneracy_tol: 1e-6,
        }
    }
}

impl OptimizerConfig {
    fn validate(&self) -> Result<()> {
        if self.n_max < 1 || self.n_max > MAX_FOCK_ORDER {
            return Err(domain(format!(
                "Fock cutoff must lie in [1, {MAX_FOCK_ORDER}], got {}",
                self.n_max
            )));
        }
        if !(self.simplex_tol > 0.0 && self.initial_step > 0.0 && self.grid_spacing > 0.0)
            || !(self.centering_weight >= 0.0 && self.centering_weight.is_finite())
            || !(self.degeneracy_tol >= 0.0)
        {
            return Err(domain("tolerances, step and spacing must be positive"));
        }
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(domain("need at least one restart and one iteration"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    /// Normalized Fock amplitudes.
    pub coeffs: Vec<Complex64>,
    pub entropy: f64,
    pub iterations: usize,
    pub converged: bool,
    pub restart: usize,
}

/// Collective entropy of Fock superpositions up to a fixed order for one setup.
#[derive(Debug, Clone)]
pub struct FockEntropyModel {
    position: FockSmoother,
    momentum: FockSmoother,
}

impl FockEntropyModel {
    pub fn new(n_max: usize, noise: &NoiseTerms, spacing: f64) -> Result<Self> {
        let (position, momentum) = rayon::join(
            || FockSmoother::new(n_max, noise.delta_x(), spacing),
            || FockSmoother::new(n_max, noise.delta_p(), spacing),
        );
        Ok(Self {
            position: position?,
            momentum: momentum?,
        })
    }

    pub fn n_max(&self) -> usize {
        self.position.order()
    }

    /// Collective entropy of the normalized state `coeffs`.
    pub fn collective_entropy(&self, coeffs: &[Complex64]) -> f64 {
        let mut buf = Vec::new();
        let mut momentum = Vec::new();
        self.entropy_with(coeffs, &mut buf, &mut momentum)
    }

    fn entropy_with(
        &self,
        coeffs: &[Complex64],
        buf: &mut Vec<f64>,
        momentum: &mut Vec<Complex64>,
    ) -> f64 {
        momentum.clear();
        momentum.extend(coeffs.iter().enumerate().map(|(n, c)| {
            // (-i)^n c_n
            match n % 4 {
                0 => *c,
                1 => Complex64::new(c.im, -c.re),
                2 => -c,
                _ => Complex64::new(-c.im, c.re),
            }
        }));
        let mut total = 0.0;
        for (smoother, amps) in [(&self.position, coeffs), (&self.momentum, &momentum[..])] {
            smoother.density_into(amps, buf);
            let h = smoother.grid().spacing();
            let mass = trapezoid(buf, h);
            buf.iter_mut().for_each(|v| *v = (*v / mass).max(0.0));
            total += entropy_of_samples(buf, h);
        }
        total
    }

    /// Objective over `2(n_max + 1)` reals `(Re c₀, Im c₀, Re c₁, …)`: the collective
    /// entropy plus `centering_weight · (⟨x⟩² + ⟨p⟩²)`.
    ///
    /// The entropy is blind to phase-space displacements; the penalty selects the centred
    /// member of each displacement family.
    pub fn objective(&self, centering_weight: f64) -> impl FnMut(&[f64]) -> f64 + '_ {
        let mut coeffs = Vec::with_capacity(self.n_max() + 1);
        let mut buf = Vec::new();
        let mut momentum = Vec::new();
        move |v: &[f64]| {
            if !unpack(v, &mut coeffs) {
                return f64::MAX;
            }
            let penalty = if centering_weight > 0.0 {
                2.0 * centering_weight * lowering_expectation(&coeffs).norm_sqr()
            } else {
                0.0
            };
            self.entropy_with(&coeffs, &mut buf, &mut momentum) + penalty
        }
    }
}

/// `⟨a⟩ = Σ √(n+1) c̄_n c_{n+1}`; `⟨x⟩ = √2 Re⟨a⟩`, `⟨p⟩ = √2 Im⟨a⟩`.
pub fn lowering_expectation(coeffs: &[Complex64]) -> Complex64 {
    coeffs
        .windows(2)
        .enumerate()
        .map(|(n, w)| w[0].conj() * w[1] * ((n + 1) as f64).sqrt())
        .sum()
}

/// Unit-norm coefficients from interleaved real/imaginary parts; false for a zero vector.
fn unpack(v: &[f64], out: &mut Vec<Complex64>) -> bool {
    out.clear();
    out.extend(v.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])));
    let norm2: f64 = out.iter().map(|c| c.norm_sqr()).sum();
    if !(norm2 > 1e-300) {
        return false;
    }
    let scale = norm2.sqrt().recip();
    out.iter_mut().for_each(|c| *c *= scale);
    true
}

fn rescale_to_unit(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

/// Runs every restart and returns them in restart order.
pub fn search_restarts(
    noise: &NoiseTerms,
    config: &OptimizerConfig,
) -> Result<Vec<OptimizationResult>> {
    config.validate()?;
    let model = FockEntropyModel::new(config.n_max, noise, config.grid_spacing)?;
    search_restarts_with(&model, config)
}

pub fn search_restarts_with(
    model: &FockEntropyModel,
    config: &OptimizerConfig,
) -> Result<Vec<OptimizationResult>> {
    config.validate()?;
    let dim = 2 * (model.n_max() + 1);
    let options = SimplexOptions {
        max_iters: config.max_iters,
        tol: config.simplex_tol,
        initial_step: config.initial_step,
    };
    (0..config.restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(restart as u64);
            let init: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            let found = nelder_mead_restarted(
                model.objective(config.centering_weight),
                &init,
                &options,
                config.polish_rounds,
                rescale_to_unit,
            )?;
            let mut coeffs = Vec::new();
            unpack(&found.argmin, &mut coeffs);
            let mut best = OptimizationResult {
                entropy: model.collective_entropy(&coeffs),
                coeffs,
                iterations: found.iterations,
                converged: found.converged,
                restart,
            };
            if config.centering_weight > 0.0 {
                let mut start = found.argmin;
                rescale_to_unit(&mut start);
                let free = nelder_mead_restarted(
                    model.objective(0.0),
                    &start,
                    &options,
                    config.polish_rounds,
                    rescale_to_unit,
                )?;
                let mut coeffs = Vec::new();
                unpack(&free.argmin, &mut coeffs);
                best.iterations += free.iterations;
                if free.value < best.entropy - config.degeneracy_tol {
                    best.coeffs = coeffs;
                    best.entropy = free.value;
                    best.converged = free.converged;
                }
            }
            Ok(best)
        })
        .collect()
}

/// Lowest-entropy restart (ties go to the earlier restart).
pub fn find_minimal_entropy_state(
    noise: &NoiseTerms,
    config: &OptimizerConfig,
) -> Result<OptimizationResult> {
    select_best(search_restarts(noise, config)?)
}

pub fn select_best(results: Vec<OptimizationResult>) -> Result<OptimizationResult> {
    let any_converged = results.iter().any(|r| r.converged);
    let best = results
        .into_iter()
        .reduce(|a, b| if b.entropy < a.entropy { b } else { a })
        .ok_or_else(|| domain("no restarts were run"))?;
    if any_converged {
        Ok(best)
    } else {
        Err(Error::NonConvergence {
            best: Box::new(best),
        })
    }
}

/// Fock amplitudes `⟨n|σ⟩` of the squeezed vacuum with position variance `sigma2`
/// for `n ≤ n_max`, and the weight left beyond `n_max`.
///
/// With `r = −½ ln(2σ²)`: `⟨2m|σ⟩ = (−tanh r)^m √((2m)!) / (2^m m! √(cosh r))`; odd
/// amplitudes vanish.
pub fn squeezed_fock_amplitudes(sigma2: f64, n_max: usize) -> Result<(Vec<f64>, f64)> {
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(domain(format!(
            "squeezed variance must be positive, got {sigma2}"
        )));
    }
    let r = -0.5 * (2.0 * sigma2).ln();
    let ratio = -r.tanh();
    let mut amps = vec![0.0; n_max + 1];
    let mut a = r.cosh().powf(-0.5);
    let mut m = 0usize;
    while 2 * m <= n_max {
        amps[2 * m] = a;
        let k = m as f64;
        a *= ratio * ((2.0 * k + 1.0) * (2.0 * k + 2.0)).sqrt() / (2.0 * (k + 1.0));
        m += 1;
    }
    let kept: f64 = amps.iter().map(|a| a * a).sum();
    Ok((amps, (1.0 - kept).max(0.0)))
}

/// `|⟨σ|ψ⟩|²` for `ψ = Σ c_n |n⟩` (normalized internally).
pub fn fidelity_with_squeezed(coeffs: &[Complex64], sigma2: f64) -> Result<f64> {
    if coeffs.len() > MAX_FOCK_ORDER + 1 {
        return Err(Error::Capability(format!(
            "Fock order {} exceeds the supported maximum {MAX_FOCK_ORDER}",
            coeffs.len() - 1
        )));
    }
    let (amps, deficit) = squeezed_fock_amplitudes(sigma2, MAX_FOCK_ORDER)?;
    if deficit >= SQUEEZED_TRUNCATION_LIMIT {
        return Err(Error::Capability(format!(
            "squeezed state with variance {sigma2} leaves {deficit:.3e} of its weight above \
             Fock order {MAX_FOCK_ORDER}"
        )));
    }
    let norm2: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    if !(norm2 > 0.0) {
        return Err(domain("coefficients must not all vanish"));
    }
    let overlap: Complex64 = coeffs.iter().zip(&amps).map(|(c, s)| c * *s).sum();
    Ok((overlap.norm_sqr() / norm2).min(1.0))
}

/// `|⟨a|b⟩|²` for normalized coefficient lists of possibly different length.
pub fn fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    let overlap: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    overlap.norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::optimal_bound;
    use crate::entropy::marginal_entropies;
    use crate::grid::Grid;
    use crate::states::{position_density, FockSuperposition, SystemState};

    fn real(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn fidelity_examples() {
        assert!((fidelity_with_squeezed(&real(&[1.0]), 0.5).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(
            fidelity_with_squeezed(&real(&[0.0, 1.0]), 1.7).unwrap(),
            0.0
        );
        let (amps, _) = squeezed_fock_amplitudes(1.0, 40).unwrap();
        assert!(fidelity_with_squeezed(&real(&amps), 1.0).unwrap() >= 1.0 - 1e-10);
        assert!(matches!(
            fidelity_with_squeezed(&real(&[1.0]), 1e-4),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn squeezed_expansion_reproduces_the_gaussian() {
        let sigma2 = 0.3;
        let (amps, deficit) = squeezed_fock_amplitudes(sigma2, 60).unwrap();
        assert!(deficit < 1e-12);
        let state = SystemState::Fock(FockSuperposition::from_real(&amps).unwrap());
        let g = Grid::new(-6.0, 6.0, 601).unwrap();
        let d = position_density(&state, &g).unwrap();
        for (x, v) in g.points().zip(d.values()) {
            let exact =
                (-x * x / (2.0 * sigma2)).exp() / (2.0 * std::f64::consts::PI * sigma2).sqrt();
            assert!((v - exact).abs() < 1e-9);
        }
    }

    #[test]
    fn truncated_expansion_deficit_is_small_at_default_cutoff() {
        for sigma2 in [0.25, 0.5, 1.0] {
            let (_, deficit) = squeezed_fock_amplitudes(sigma2, 12).unwrap();
            assert!(deficit < 1e-7, "sigma2 = {sigma2}: {deficit}");
        }
    }

    #[test]
    fn model_matches_general_quadrature() {
        let noise = NoiseTerms::new(0.8, 0.9).unwrap();
        let model = FockEntropyModel::new(4, &noise, 0.04).unwrap();
        let coeffs = FockSuperposition::new(vec![
            Complex64::new(0.5, 0.2),
            Complex64::new(0.1, -0.3),
            Complex64::new(-0.4, 0.0),
            Complex64::new(0.0, 0.2),
            Complex64::new(0.3, 0.3),
        ])
        .unwrap();
        let fast = model.collective_entropy(coeffs.coeffs());
        let slow = marginal_entropies(&SystemState::Fock(coeffs), &noise)
            .unwrap()
            .collective;
        assert!((fast - slow).abs() < 1e-8, "{fast} vs {slow}");
    }

    #[test]
    fn objective_ignores_global_phase_and_scale() {
        let noise = NoiseTerms::new(1.0, 0.5).unwrap();
        let model = FockEntropyModel::new(3, &noise, 0.05).unwrap();
        let mut f = model.objective(0.0);
        let v = [0.3, -0.1, 0.2, 0.5, -0.7, 0.05, 0.1, 0.4];
        let base = f(&v);
        let phase = Complex64::from_polar(1.0, 1.234);
        let rotated: Vec<f64> = v
            .chunks(2)
            .flat_map(|p| {
                let c = Complex64::new(p[0], p[1]) * phase;
                [c.re, c.im]
            })
            .collect();
        assert!((f(&rotated) - base).abs() < 1e-12);
        let scaled: Vec<f64> = v.iter().map(|x| 3.0 * x).collect();
        assert!((f(&scaled) - base).abs() < 1e-12);
    }

    #[test]
    fn small_search_finds_vacuum_and_is_deterministic() {
        let half = 0.5f64.sqrt();
        let noise = NoiseTerms::new(half, half).unwrap();
        let config = OptimizerConfig {
            n_max: 4,
            restarts: 2,
            seed: 7,
            ..Default::default()
        };
        let a = find_minimal_entropy_state(&noise, &config).unwrap();
        let b = find_minimal_entropy_state(&noise, &config).unwrap();
        assert_eq!(a, b);
        assert!((a.entropy - optimal_bound(&noise).bound).abs() < 1e-3);
        assert!(fidelity_with_squeezed(&a.coeffs, 0.5).unwrap() > 0.999);
        let norm: f64 = a.coeffs.iter().map(|c| c.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lowering_expectation_matches_moments() {
        let state = FockSuperposition::new(vec![
            Complex64::new(0.6, 0.1),
            Complex64::new(-0.2, 0.4),
            Complex64::new(0.3, -0.5),
        ])
        .unwrap();
        let a = lowering_expectation(state.coeffs());
        let (mx, _) = state.position_moments();
        let (mp, _) = state.momentum_moments();
        assert!((mx - 2f64.sqrt() * a.re).abs() < 1e-12);
        assert!((mp - 2f64.sqrt() * a.im).abs() < 1e-12);
    }

    #[test]
    fn invalid_config() {
        let noise = NoiseTerms::new(1.0, 1.0).unwrap();
        let config = OptimizerConfig {
            n_max: 0,
            ..Default::default()
        };
        assert!(search_restarts(&noise, &config).is_err());
    }
}
