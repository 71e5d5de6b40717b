//! Entropic lower bounds on the collective entropy.
//!
//! The two-parameter family `Λ(λ_X, λ_P)` follows from applying the entropy
//! inequality for convolutions to both inferred marginals. Setting `λ_X = λ_P = λ`
//! and eliminating the state with `S[|ψ|²] + S[|ψ̃|²] ≥ 1 + ln π` gives the
//! state-free single parameter bound `Λ_S(λ)`, maximal at `λ = 1/(1 + 2δ_Xδ_P)`.

use std::f64::consts::{LN_2, PI};

use crate::apparatus::NoiseTerms;
use crate::distributions::{convolve, Discretization};
use crate::entropy::{differential_entropy, marginal_entropies_with};
use crate::error::{domain, Error, Result};
use crate::grid::ProbabilityDensity;
use crate::states::{momentum_density, position_density, SystemState};

/// Slack granted to every "entropy ≥ bound" comparison.
pub const BOUND_TOL: f64 = 1e-5;

/// Weighting parameters `(λ_X, λ_P)`, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    lambda_x: f64,
    lambda_p: f64,
}

impl BoundParams {
    pub fn new(lambda_x: f64, lambda_p: f64) -> Result<Self> {
        check_unit(lambda_x)?;
        check_unit(lambda_p)?;
        Ok(Self { lambda_x, lambda_p })
    }

    pub fn equal(lambda: f64) -> Result<Self> {
        Self::new(lambda, lambda)
    }

    pub fn lambda_x(&self) -> f64 {
        self.lambda_x
    }

    pub fn lambda_p(&self) -> f64 {
        self.lambda_p
    }
}

fn check_unit(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(domain(format!(
            "weighting parameter must lie in [0, 1], got {lambda}"
        )))
    }
}

/// `t ln t` with the limit 0 at `t = 0`.
fn xlogx(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t * t.ln()
    }
}

/// `Θ(λ) = ((1−λ)/2)[1 − ln(1−λ)] − (λ/2) ln λ`.
pub fn theta(lambda: f64) -> Result<f64> {
    check_unit(lambda)?;
    let mu = 1.0 - lambda;
    Ok(0.5 * mu - 0.5 * xlogx(mu) - 0.5 * xlogx(lambda))
}

/// `λ_G(σ_f, σ_g) = σ_f² / (σ_f² + σ_g²)`.
pub fn gaussian_weight(spread_f: f64, spread_g: f64) -> Result<f64> {
    if !(spread_f > 0.0 && spread_g > 0.0) {
        return Err(domain(format!(
            "spreads must be positive, got ({spread_f}, {spread_g})"
        )));
    }
    let (a, b) = (spread_f * spread_f, spread_g * spread_g);
    Ok(a / (a + b))
}

/// `Λ(λ_X, λ_P)` from the bare-state entropies `S[|ψ|²]`, `S[|ψ̃|²]`.
pub fn lieb_lower_bound(
    entropy_x_system: f64,
    entropy_p_system: f64,
    noise: &NoiseTerms,
    params: &BoundParams,
) -> f64 {
    let (lx, lp) = (params.lambda_x, params.lambda_p);
    let two_pi = 2.0 * PI;
    lx * entropy_x_system
        + lp * entropy_p_system
        + 0.5 * (1.0 - lx) * (two_pi * noise.delta_x().powi(2)).ln()
        + 0.5 * (1.0 - lp) * (two_pi * noise.delta_p().powi(2)).ln()
        + theta(lx).expect("validated parameter")
        + theta(lp).expect("validated parameter")
}

/// `1 + ln π`, the right-hand side of the position–momentum entropic inequality.
pub fn hirschman_constant() -> f64 {
    1.0 + PI.ln()
}

/// Bare-state entropies `(S[|ψ|²], S[|ψ̃|²])`.
pub fn system_entropies(state: &SystemState, disc: &Discretization) -> Result<(f64, f64)> {
    let x = position_density(state, &disc.position_grid(state)?)?;
    let p = momentum_density(state, &disc.momentum_grid(state)?)?;
    Ok((differential_entropy(&x), differential_entropy(&p)))
}

/// `S[|ψ|²] + S[|ψ̃|²] − (1 + ln π)`; non-negative up to quadrature error.
pub fn hirschman_deficit(state: &SystemState) -> Result<f64> {
    hirschman_deficit_with(state, &Discretization::default())
}

pub fn hirschman_deficit_with(state: &SystemState, disc: &Discretization) -> Result<f64> {
    let (sx, sp) = system_entropies(state, disc)?;
    Ok(sx + sp - hirschman_constant())
}

/// `Λ_S(λ) = 1 − λ ln(λ/π) + (1−λ) ln(2πδ_Xδ_P/(1−λ))`.
pub fn single_param_bound(noise: &NoiseTerms, lambda: f64) -> Result<f64> {
    check_unit(lambda)?;
    let mu = 1.0 - lambda;
    let log_pi = PI.ln();
    let log_noise = (2.0 * PI * noise.product()).ln();
    Ok(1.0 - xlogx(lambda) + lambda * log_pi - xlogx(mu) + mu * log_noise)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalBound {
    pub bound: f64,
    pub lambda: f64,
}

/// Maximum of `Λ_S`: `1 + ln[2π(δ_Xδ_P + 1/2)]` at `λ = 1/(1 + 2δ_Xδ_P)`.
pub fn optimal_bound(noise: &NoiseTerms) -> OptimalBound {
    let q = noise.product();
    OptimalBound {
        bound: 1.0 + (2.0 * PI * (q + 0.5)).ln(),
        lambda: 1.0 / (1.0 + 2.0 * q),
    }
}

/// Golden-section maximization of `Λ_S` over `[0, 1]`; `Λ_S` is strictly concave.
pub fn maximize_single_param(noise: &NoiseTerms, tol: f64) -> OptimalBound {
    let f = |l: f64| single_param_bound(noise, l).expect("bracket stays in [0, 1]");
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (0.0, 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    let lambda = 0.5 * (a + b);
    OptimalBound {
        bound: f(lambda),
        lambda,
    }
}

/// `Ω = 1 + ln(2π)`.
pub fn wehrl_constant() -> f64 {
    1.0 + (2.0 * PI).ln()
}

/// State-free balanced bound `1 + ln(2π √(2δ_Xδ_P))`.
pub fn balanced_state_free_bound(noise: &NoiseTerms) -> f64 {
    1.0 + (2.0 * PI * (2.0 * noise.product()).sqrt()).ln()
}

/// `σ²_min = δ_X / (2δ_P)`, the variance of the minimal-entropy squeezed state.
pub fn minimal_variance(noise: &NoiseTerms) -> f64 {
    noise.delta_x() / (2.0 * noise.delta_p())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiebCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl LiebCheck {
    pub fn gap(&self) -> f64 {
        self.lhs - self.rhs
    }

    pub fn holds(&self) -> bool {
        self.gap() >= -BOUND_TOL
    }
}

/// Both sides of `S[f*g] ≥ λS[f] + (1−λ)S[g] − [λ ln λ + (1−λ) ln(1−λ)]/2`.
pub fn lieb_convolution_check(
    f: &ProbabilityDensity,
    g: &ProbabilityDensity,
    lambda: f64,
) -> Result<LiebCheck> {
    check_unit(lambda)?;
    let lhs = differential_entropy(&convolve(f, g)?);
    let rhs = lambda * differential_entropy(f) + (1.0 - lambda) * differential_entropy(g)
        - 0.5 * (xlogx(lambda) + xlogx(1.0 - lambda));
    Ok(LiebCheck { lhs, rhs })
}

/// State-independent bounds of a setup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseBounds {
    pub omega: f64,
    /// `Λ(0, 0) = 1 + ln(2πδ_Xδ_P)`.
    pub noise_bound: f64,
    pub balanced_state_free: f64,
    pub single_param: f64,
    pub single_param_lambda: f64,
    pub optimal: f64,
    pub optimal_lambda: f64,
}

pub fn noise_bounds(noise: &NoiseTerms, lambda: f64) -> Result<NoiseBounds> {
    let optimal = optimal_bound(noise);
    Ok(NoiseBounds {
        omega: wehrl_constant(),
        noise_bound: 1.0 + (2.0 * PI * noise.product()).ln(),
        balanced_state_free: balanced_state_free_bound(noise),
        single_param: single_param_bound(noise, lambda)?,
        single_param_lambda: lambda,
        optimal: optimal.bound,
        optimal_lambda: optimal.lambda,
    })
}

/// Every bound next to the measured collective entropy of one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub params: BoundParams,
    pub entropy_x_system: f64,
    pub entropy_p_system: f64,
    pub s_x: f64,
    pub s_p: f64,
    pub collective: f64,
    pub omega: f64,
    pub lambda_family: f64,
    /// `Λ(1, 1)`.
    pub system_bound: f64,
    /// `Λ(0, 0)`.
    pub noise_bound: f64,
    /// `Λ(1/2, 1/2)`.
    pub balanced_bound: f64,
    /// `Λ_S` at the mean of `λ_X` and `λ_P`.
    pub single_param: f64,
    pub optimal: f64,
    pub optimal_lambda: f64,
}

impl BoundReport {
    /// Named bounds valid for this noise; Ω only holds for products of at least 1/2.
    pub fn bounds(&self, noise: &NoiseTerms) -> Vec<(&'static str, f64)> {
        let mut out = vec![
            ("lambda_family", self.lambda_family),
            ("system_bound", self.system_bound),
            ("noise_bound", self.noise_bound),
            ("balanced_bound", self.balanced_bound),
            ("single_param", self.single_param),
            ("optimal", self.optimal),
        ];
        if !noise.is_sub_minimal() {
            out.push(("omega", self.omega));
        }
        out
    }
}

pub fn report(
    state: &SystemState,
    noise: &NoiseTerms,
    params: &BoundParams,
) -> Result<BoundReport> {
    report_with(state, noise, params, &Discretization::default())
}

pub fn report_with(
    state: &SystemState,
    noise: &NoiseTerms,
    params: &BoundParams,
    disc: &Discretization,
) -> Result<BoundReport> {
    let (sx_sys, sp_sys) = system_entropies(state, disc)?;
    let measured = marginal_entropies_with(state, noise, disc)?;
    let lambda = 0.5 * (params.lambda_x + params.lambda_p);
    let free = noise_bounds(noise, lambda)?;
    let family = |lx: f64, lp: f64| {
        lieb_lower_bound(
            sx_sys,
            sp_sys,
            noise,
            &BoundParams {
                lambda_x: lx,
                lambda_p: lp,
            },
        )
    };
    let out = BoundReport {
        params: *params,
        entropy_x_system: sx_sys,
        entropy_p_system: sp_sys,
        s_x: measured.s_x,
        s_p: measured.s_p,
        collective: measured.collective,
        omega: free.omega,
        lambda_family: family(params.lambda_x, params.lambda_p),
        system_bound: family(1.0, 1.0),
        noise_bound: family(0.0, 0.0),
        balanced_bound: family(0.5, 0.5),
        single_param: free.single_param,
        optimal: free.optimal,
        optimal_lambda: free.optimal_lambda,
    };
    for (name, bound) in out.bounds(noise) {
        if out.collective < bound - BOUND_TOL {
            return Err(Error::BoundViolation {
                name,
                bound,
                collective: out.collective,
            });
        }
    }
    Ok(out)
}

/// `ln 2 + (Λ(0,0) + Λ(1,1))/2`, the balanced bound rebuilt from its endpoints.
pub fn balanced_from_endpoints(noise_bound: f64, system_bound: f64) -> f64 {
    LN_2 + 0.5 * (noise_bound + system_bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_squeezed, FockSuperposition};

    const OMEGA: f64 = 2.837_877_066_409_345_5;

    #[test]
    fn theta_values() {
        assert_eq!(theta(0.0).unwrap(), 0.5);
        assert_eq!(theta(1.0).unwrap(), 0.0);
        assert!((theta(0.5).unwrap() - 0.596_573_590_279_972_7).abs() < 1e-15);
        assert!(theta(1.5).is_err());
        assert!(theta(-0.1).is_err());
    }

    #[test]
    fn gaussian_weight_values() {
        assert_eq!(gaussian_weight(1.0, 1.0).unwrap(), 0.5);
        assert!((gaussian_weight(2.0, 1.0).unwrap() - 0.8).abs() < 1e-15);
        assert!((gaussian_weight(1e-6, 1.0).unwrap() - 1e-12).abs() < 1e-20);
        assert!(gaussian_weight(0.0, 1.0).is_err());
    }

    #[test]
    fn family_special_cases() {
        let noise = NoiseTerms::new(0.8, 1.7).unwrap();
        let (sx, sp) = (1.234, 0.987);
        let l00 = lieb_lower_bound(sx, sp, &noise, &BoundParams::equal(0.0).unwrap());
        let l11 = lieb_lower_bound(sx, sp, &noise, &BoundParams::equal(1.0).unwrap());
        let lhh = lieb_lower_bound(sx, sp, &noise, &BoundParams::equal(0.5).unwrap());
        assert!((l00 - (1.0 + (2.0 * PI * 0.8 * 1.7).ln())).abs() < 1e-14);
        assert!((l11 - (sx + sp)).abs() < 1e-14);
        assert!((lhh - balanced_from_endpoints(l00, l11)).abs() < 1e-14);
        assert!(BoundParams::new(0.3, 1.01).is_err());
    }

    #[test]
    fn single_param_endpoints_and_optimum() {
        let noise = NoiseTerms::new(1.3, 0.9).unwrap();
        let q = 1.3 * 0.9;
        assert!(
            (single_param_bound(&noise, 0.0).unwrap() - (1.0 + (2.0 * PI * q).ln())).abs() < 1e-14
        );
        assert!((single_param_bound(&noise, 1.0).unwrap() - hirschman_constant()).abs() < 1e-14);
        let star = 1.0 / (1.0 + 2.0 * q);
        let expected = 1.0 + (2.0 * PI * (q + 0.5)).ln();
        assert!((single_param_bound(&noise, star).unwrap() - expected).abs() < 1e-14);
        assert!(single_param_bound(&noise, 1.2).is_err());
    }

    #[test]
    fn single_param_reduces_to_family_plus_hirschman() {
        let noise = NoiseTerms::new(0.6, 1.1).unwrap();
        let split = 0.37;
        let (sx, sp) = (
            split * hirschman_constant(),
            (1.0 - split) * hirschman_constant(),
        );
        for lambda in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let family = lieb_lower_bound(sx, sp, &noise, &BoundParams::equal(lambda).unwrap());
            assert!((family - single_param_bound(&noise, lambda).unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn optimal_bound_values() {
        let half = 0.5f64.sqrt();
        let min = optimal_bound(&NoiseTerms::new(half, half).unwrap());
        assert!((min.bound - OMEGA).abs() < 1e-14);
        assert!((min.lambda - 0.5).abs() < 1e-14);
        // 1 + ln(3π) and 1 + ln(21π) in 30-digit arithmetic
        let one = optimal_bound(&NoiseTerms::new(1.0, 1.0).unwrap());
        assert!((one.bound - 3.243_342_174_517_51).abs() < 1e-13);
        let ten = optimal_bound(&NoiseTerms::new(10.0, 1.0).unwrap());
        assert!((ten.bound - 5.189_252_323_572_823).abs() < 1e-13);
    }

    #[test]
    fn golden_section_agrees_with_closed_form() {
        for q in [0.5, 1.0, 3.7, 10.0, 250.0] {
            let noise = NoiseTerms::from_product(q, 1.0).unwrap();
            let closed = optimal_bound(&noise);
            let numeric = maximize_single_param(&noise, 1e-12);
            assert!((closed.bound - numeric.bound).abs() < 1e-9);
            // the maximum is flat, so the argmax is only resolved to about √ε
            assert!((closed.lambda - numeric.lambda).abs() < 1e-6);
        }
    }

    #[test]
    fn wehrl_constant_value() {
        assert!((wehrl_constant() - OMEGA).abs() < 1e-15);
        let above = optimal_bound(&NoiseTerms::new(1.0, 0.6).unwrap());
        assert!(above.bound - wehrl_constant() > 0.0);
    }

    #[test]
    fn minimal_variance_values() {
        assert_eq!(minimal_variance(&NoiseTerms::new(0.7, 0.7).unwrap()), 0.5);
        assert_eq!(minimal_variance(&NoiseTerms::new(1.0, 0.5).unwrap()), 1.0);
        assert_eq!(minimal_variance(&NoiseTerms::new(0.5, 1.0).unwrap()), 0.25);
    }

    #[test]
    fn lieb_equality_for_matched_gaussians() {
        let (a2, b2) = (0.6, 1.5);
        let grid = crate::grid::Grid::new(-12.0, 12.0, 2401).unwrap();
        let f = ProbabilityDensity::gaussian(grid, 0.0, a2).unwrap();
        let g = ProbabilityDensity::gaussian(grid, 0.0, b2).unwrap();
        let lambda = gaussian_weight(a2.sqrt(), b2.sqrt()).unwrap();
        let tight = lieb_convolution_check(&f, &g, lambda).unwrap();
        assert!(tight.gap().abs() < 1e-5);
        let loose = lieb_convolution_check(&f, &g, 0.9 * lambda).unwrap();
        assert!(loose.gap() > 1e-4);
    }

    #[test]
    fn lieb_holds_for_bimodal_mixture() {
        let grid = crate::grid::Grid::new(-12.0, 12.0, 2401).unwrap();
        let f = ProbabilityDensity::from_fn(grid, |x| {
            (-(x - 2.0).powi(2) / 0.5).exp() + (-(x + 2.0).powi(2) / 0.5).exp()
        })
        .unwrap();
        let g = ProbabilityDensity::gaussian(grid, 0.0, 0.8).unwrap();
        for lambda in [0.0, 0.3, 0.7, 1.0] {
            assert!(lieb_convolution_check(&f, &g, lambda).unwrap().holds());
        }
    }

    #[test]
    fn hirschman_saturation_and_fock_one() {
        assert!(
            hirschman_deficit(&make_squeezed(0.37).unwrap())
                .unwrap()
                .abs()
                < 1e-5
        );
        let one = SystemState::Fock(FockSuperposition::number_state(1).unwrap());
        // 2(ln(√π/2) − ψ(3/2) + 3/2) − 1 − ln π in 30-digit arithmetic
        assert!((hirschman_deficit(&one).unwrap() - 0.540_725_690_922_956_3).abs() < 1e-5);
    }

    #[test]
    fn report_for_saturating_vacuum() {
        let half = 0.5f64.sqrt();
        let noise = NoiseTerms::new(half, half).unwrap();
        let r = report(
            &make_squeezed(0.5).unwrap(),
            &noise,
            &BoundParams::equal(0.5).unwrap(),
        )
        .unwrap();
        assert!((r.collective - OMEGA).abs() < 1e-5);
        assert!((r.optimal - OMEGA).abs() < 1e-12);
        assert!((r.optimal_lambda - 0.5).abs() < 1e-12);
    }

    #[test]
    fn report_for_fock_one_is_strict() {
        let half = 0.5f64.sqrt();
        let noise = NoiseTerms::new(half, half).unwrap();
        let one = SystemState::Fock(FockSuperposition::number_state(1).unwrap());
        let r = report(&one, &noise, &BoundParams::new(0.2, 0.9).unwrap()).unwrap();
        assert!(r.collective > r.optimal + 1e-3);
    }

    #[test]
    fn report_at_product_two() {
        let noise = NoiseTerms::from_product(2.0, 1.0).unwrap();
        let state = make_squeezed(minimal_variance(&noise)).unwrap();
        let r = report(&state, &noise, &BoundParams::equal(0.2).unwrap()).unwrap();
        assert!((r.collective - (1.0 + (5.0 * PI).ln())).abs() < 1e-5);
    }

    #[test]
    fn single_param_is_concave() {
        let noise = NoiseTerms::from_product(1.7, 2.0).unwrap();
        let values: Vec<f64> = (0..=200)
            .map(|i| single_param_bound(&noise, i as f64 / 200.0).unwrap())
            .collect();
        for w in values.windows(3) {
            assert!(w[0] - 2.0 * w[1] + w[2] <= 1e-9);
        }
    }
}
