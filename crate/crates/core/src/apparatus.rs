//! Measurement setups and the noise terms that summarize them.

use crate::error::{domain, Result};

/// Slack allowed below `δ_X δ_P = 1/2` for noise derived from a physical setup.
pub const MIN_PRODUCT_SLACK: f64 = 1e-12;

/// Two squeezed-vacuum pointers coupled to `x` and `p` for an interaction time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSetup {
    kappa1: f64,
    kappa2: f64,
    t: f64,
    sigma1_sq: f64,
    sigma2_sq: f64,
}

impl MeasurementSetup {
    pub fn new(kappa1: f64, kappa2: f64, t: f64, sigma1_sq: f64, sigma2_sq: f64) -> Result<Self> {
        let all = [kappa1, kappa2, t, sigma1_sq, sigma2_sq];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(domain("setup parameters must be finite"));
        }
        if !(t > 0.0) {
            return Err(domain(format!(
                "interaction time must be positive, got {t}"
            )));
        }
        if !(sigma1_sq > 0.0 && sigma2_sq > 0.0) {
            return Err(domain(format!(
                "pointer variances must be positive, got {sigma1_sq} and {sigma2_sq}"
            )));
        }
        if kappa1 == 0.0 || kappa2 == 0.0 {
            return Err(domain("coupling strengths must be non-zero"));
        }
        Ok(Self {
            kappa1,
            kappa2,
            t,
            sigma1_sq,
            sigma2_sq,
        })
    }

    pub fn kappa1(&self) -> f64 {
        self.kappa1
    }

    pub fn kappa2(&self) -> f64 {
        self.kappa2
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn sigma1_sq(&self) -> f64 {
        self.sigma1_sq
    }

    pub fn sigma2_sq(&self) -> f64 {
        self.sigma2_sq
    }

    /// `κ₁²κ₂²T⁴/16`, the pointer-variance product at which the noise product is minimal.
    fn balance_product(&self) -> f64 {
        let c1 = self.kappa1 * self.t;
        let c2 = self.kappa2 * self.t;
        c1 * c1 * c2 * c2 / 16.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseOrigin {
    Setup,
    Direct,
}

/// Gaussian smoothing widths `(δ_X, δ_P)` of the inferred position and momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseTerms {
    delta_x: f64,
    delta_p: f64,
    origin: NoiseOrigin,
}

impl NoiseTerms {
    /// Direct construction; products below 1/2 are allowed but flagged by
    /// [`NoiseTerms::is_sub_minimal`].
    pub fn new(delta_x: f64, delta_p: f64) -> Result<Self> {
        if !(delta_x > 0.0 && delta_x.is_finite() && delta_p > 0.0 && delta_p.is_finite()) {
            return Err(domain(format!(
                "noise terms must be positive and finite, got ({delta_x}, {delta_p})"
            )));
        }
        Ok(Self {
            delta_x,
            delta_p,
            origin: NoiseOrigin::Direct,
        })
    }

    /// Noise terms with product `product` and ratio `δ_X/δ_P = ratio`.
    pub fn from_product(product: f64, ratio: f64) -> Result<Self> {
        if !(product > 0.0 && ratio > 0.0) {
            return Err(domain(format!(
                "product and ratio must be positive, got ({product}, {ratio})"
            )));
        }
        Self::new((product * ratio).sqrt(), (product / ratio).sqrt())
    }

    pub fn delta_x(&self) -> f64 {
        self.delta_x
    }

    pub fn delta_p(&self) -> f64 {
        self.delta_p
    }

    pub fn origin(&self) -> NoiseOrigin {
        self.origin
    }

    pub fn product(&self) -> f64 {
        self.delta_x * self.delta_p
    }

    /// True when the product lies below the physical floor 1/2.
    pub fn is_sub_minimal(&self) -> bool {
        self.product() < 0.5 - MIN_PRODUCT_SLACK
    }
}

/// Noise terms of a setup:
/// `δ_X² = σ₁²/(κ₁T)² + (κ₂T)²/(16σ₂²)`, `δ_P² = σ₂²/(κ₂T)² + (κ₁T)²/(16σ₁²)`.
pub fn noise_terms(setup: &MeasurementSetup) -> NoiseTerms {
    let c1 = setup.kappa1 * setup.t;
    let c2 = setup.kappa2 * setup.t;
    let delta_x = (setup.sigma1_sq / (c1 * c1) + c2 * c2 / (16.0 * setup.sigma2_sq)).sqrt();
    let delta_p = (setup.sigma2_sq / (c2 * c2) + c1 * c1 / (16.0 * setup.sigma1_sq)).sqrt();
    NoiseTerms {
        delta_x,
        delta_p,
        origin: NoiseOrigin::Setup,
    }
}

pub fn noise_product(noise: &NoiseTerms) -> f64 {
    noise.product()
}

/// Whether `σ₁²σ₂²` equals `κ₁²κ₂²T⁴/16` to relative tolerance `tol`.
pub fn is_minimal_product(setup: &MeasurementSetup, tol: f64) -> bool {
    let target = setup.balance_product();
    (setup.sigma1_sq * setup.sigma2_sq - target).abs() <= tol * target
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unit_setup_noise() {
        let setup = MeasurementSetup::new(1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let n = noise_terms(&setup);
        let expected = 1.030_776_406_404_415_1;
        assert!((n.delta_x() - expected).abs() < 1e-15);
        assert!((n.delta_p() - expected).abs() < 1e-15);
        assert_eq!(n.origin(), NoiseOrigin::Setup);
    }

    #[test]
    fn balanced_setup_reaches_the_floor() {
        let setup = MeasurementSetup::new(1.0, 1.0, 1.0, 0.25, 0.25).unwrap();
        let n = noise_terms(&setup);
        assert!((n.delta_x() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((noise_product(&n) - 0.5).abs() < 1e-15);
        assert!(is_minimal_product(&setup, 1e-9));
    }

    #[test]
    fn invalid_setups() {
        assert!(MeasurementSetup::new(1.0, 1.0, 0.0, 1.0, 1.0).is_err());
        assert!(MeasurementSetup::new(0.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(MeasurementSetup::new(1.0, 1.0, 1.0, -1.0, 1.0).is_err());
        assert!(MeasurementSetup::new(-1.0, 1.0, 1.0, 1.0, 1.0).is_ok());
        assert!(NoiseTerms::new(0.0, 1.0).is_err());
    }

    #[test]
    fn minimal_product_predicate() {
        let unit = MeasurementSetup::new(1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert!(!is_minimal_product(&unit, 1e-9));
        assert!(is_minimal_product(&unit, 1e300));
    }

    #[test]
    fn direct_products() {
        let half = NoiseTerms::new(0.5f64.sqrt(), 0.5f64.sqrt()).unwrap();
        assert!((noise_product(&half) - 0.5).abs() < 1e-15);
        assert!(!half.is_sub_minimal());
        assert_eq!(noise_product(&NoiseTerms::new(1.0, 1.0).unwrap()), 1.0);
        assert_eq!(noise_product(&NoiseTerms::new(2.0, 0.5).unwrap()), 1.0);
        assert!(NoiseTerms::new(0.4, 1.0).unwrap().is_sub_minimal());
    }

    #[test]
    fn depends_only_on_kappa_t() {
        let a = noise_terms(&MeasurementSetup::new(2.0, 0.7, 3.0, 0.3, 1.9).unwrap());
        let b = noise_terms(&MeasurementSetup::new(6.0, 2.1, 1.0, 0.3, 1.9).unwrap());
        assert!((a.delta_x() - b.delta_x()).abs() < 1e-14);
        assert!((a.delta_p() - b.delta_p()).abs() < 1e-14);
    }

    fn log_uniform() -> impl Strategy<Value = f64> {
        (-2.0f64..2.0).prop_map(|e| 10f64.powf(e))
    }

    proptest! {
        #[test]
        fn setup_noise_never_beats_the_floor(
            k1 in log_uniform(), k2 in log_uniform(), t in log_uniform(),
            s1 in log_uniform(), s2 in log_uniform(),
        ) {
            let setup = MeasurementSetup::new(k1, k2, t, s1, s2).unwrap();
            prop_assert!(noise_product(&noise_terms(&setup)) >= 0.5 - MIN_PRODUCT_SLACK);
        }
    }
}
