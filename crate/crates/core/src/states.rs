//! System states and their position/momentum densities (ħ = 1, vacuum variance 1/2).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::grid::{cubic_interpolate, trapezoid, Grid, ProbabilityDensity};

/// Highest Fock order the Hermite recurrence is used for.
pub const MAX_FOCK_ORDER: usize = 64;

/// Default number of grid points for automatically derived grids.
pub const DEFAULT_GRID_POINTS: usize = 4097;

/// Largest probability mass a grid may cut off before densities are rejected.
pub const TRUNCATION_LIMIT: f64 = 1e-8;

/// Squeezed vacuum centred at the origin, specified by its position variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedVacuum {
    sigma2: f64,
}

impl SqueezedVacuum {
    pub fn new(sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(domain(format!(
                "squeezed variance must be positive, got {sigma2}"
            )));
        }
        Ok(Self { sigma2 })
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn momentum_variance(&self) -> f64 {
        0.25 / self.sigma2
    }
}

/// Finite superposition of number states, normalized on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FockSuperposition {
    coeffs: Vec<Complex64>,
}

impl FockSuperposition {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(domain("Fock superposition needs at least one coefficient"));
        }
        if coeffs.len() > MAX_FOCK_ORDER + 1 {
            return Err(Error::Capability(format!(
                "Fock order {} exceeds the supported maximum {MAX_FOCK_ORDER}",
                coeffs.len() - 1
            )));
        }
        let norm2: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if !(norm2 > 0.0 && norm2.is_finite()) {
            return Err(domain(format!(
                "cannot normalize coefficients with norm² {norm2}"
            )));
        }
        let scale = norm2.sqrt().recip();
        Ok(Self {
            coeffs: coeffs.into_iter().map(|c| c * scale).collect(),
        })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// The number state `|n⟩`.
    pub fn number_state(n: usize) -> Result<Self> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Highest order with a non-zero amplitude.
    pub fn max_order(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| c.norm_sqr() > 0.0)
            .unwrap_or(0)
    }

    /// Amplitudes of the momentum wavefunction in the Hermite basis: `(-i)^n c_n`.
    pub fn momentum_coeffs(&self) -> Vec<Complex64> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * minus_i_pow(n))
            .collect()
    }

    /// `(⟨x⟩, Var x)` from ladder-operator matrix elements.
    pub fn position_moments(&self) -> (f64, f64) {
        ladder_moments(&self.coeffs)
    }

    /// `(⟨p⟩, Var p)`.
    pub fn momentum_moments(&self) -> (f64, f64) {
        ladder_moments(&self.momentum_coeffs())
    }
}

/// Mean and variance of the quadrature whose wavefunction is `Σ c_n ψ_n`.
fn ladder_moments(coeffs: &[Complex64]) -> (f64, f64) {
    let mut lower = Complex64::new(0.0, 0.0);
    let mut lower2 = Complex64::new(0.0, 0.0);
    let mut number = 0.0;
    for (n, c) in coeffs.iter().enumerate() {
        number += n as f64 * c.norm_sqr();
        if let Some(next) = coeffs.get(n + 1) {
            lower += c.conj() * next * ((n + 1) as f64).sqrt();
        }
        if let Some(next2) = coeffs.get(n + 2) {
            lower2 += c.conj() * next2 * (((n + 1) * (n + 2)) as f64).sqrt();
        }
    }
    let mean = std::f64::consts::SQRT_2 * lower.re;
    let second = lower2.re + number + 0.5;
    (mean, second - mean * mean)
}

fn minus_i_pow(n: usize) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// Wavefunction sampled on a uniform grid, normalized under the trapezoidal rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GridWavefunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl GridWavefunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.count() {
            return Err(domain(format!(
                "{} samples for a {}-point grid",
                values.len(),
                grid.count()
            )));
        }
        let probs: Vec<f64> = values.iter().map(|v| v.norm_sqr()).collect();
        let norm2 = trapezoid(&probs, grid.spacing());
        if !(norm2 > 0.0 && norm2.is_finite()) {
            return Err(domain(format!(
                "cannot normalize wavefunction with norm² {norm2}"
            )));
        }
        let scale = norm2.sqrt().recip();
        Ok(Self {
            grid,
            values: values.into_iter().map(|v| v * scale).collect(),
        })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.points().map(f).collect();
        Self::new(grid, values)
    }

    /// Builds `ψ(x)` on `xgrid` from momentum samples by the inverse continuum Fourier transform.
    pub fn from_momentum(pgrid: Grid, momentum: &[Complex64], xgrid: Grid) -> Result<Self> {
        if momentum.len() != pgrid.count() {
            return Err(domain("momentum samples do not match their grid"));
        }
        let values = fourier_transform(&pgrid, momentum, &xgrid, 1.0);
        Self::new(xgrid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn amplitude(&self, x: f64) -> Complex64 {
        cubic_interpolate(&self.grid, &self.values, x)
    }

    fn position_moments(&self) -> (f64, f64) {
        let density = self.native_density();
        let mean = trapezoid(
            &self
                .grid
                .points()
                .zip(&density)
                .map(|(x, f)| x * f)
                .collect::<Vec<_>>(),
            self.grid.spacing(),
        );
        let second = trapezoid(
            &self
                .grid
                .points()
                .zip(&density)
                .map(|(x, f)| x * x * f)
                .collect::<Vec<_>>(),
            self.grid.spacing(),
        );
        (mean, second - mean * mean)
    }

    /// Moments of `-i d/dx` from central differences.
    fn momentum_moments(&self) -> (f64, f64) {
        let h = self.grid.spacing();
        let n = self.values.len();
        let deriv: Vec<Complex64> = (0..n)
            .map(|i| {
                let prev = if i == 0 {
                    Complex64::default()
                } else {
                    self.values[i - 1]
                };
                let next = self.values.get(i + 1).copied().unwrap_or_default();
                (next - prev) / (2.0 * h)
            })
            .collect();
        let mean_terms: Vec<f64> = self
            .values
            .iter()
            .zip(&deriv)
            .map(|(v, d)| (v.conj() * d).im)
            .collect();
        let second_terms: Vec<f64> = deriv.iter().map(|d| d.norm_sqr()).collect();
        let mean = trapezoid(&mean_terms, h);
        (mean, trapezoid(&second_terms, h) - mean * mean)
    }

    fn native_density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }
}

/// The state being measured.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemState {
    Squeezed(SqueezedVacuum),
    Fock(FockSuperposition),
    Grid(GridWavefunction),
}

impl From<SqueezedVacuum> for SystemState {
    fn from(s: SqueezedVacuum) -> Self {
        SystemState::Squeezed(s)
    }
}

impl From<FockSuperposition> for SystemState {
    fn from(s: FockSuperposition) -> Self {
        SystemState::Fock(s)
    }
}

impl From<GridWavefunction> for SystemState {
    fn from(s: GridWavefunction) -> Self {
        SystemState::Grid(s)
    }
}

/// Squeezed vacuum with position variance `sigma2`; momentum variance is `1/(4 sigma2)`.
pub fn make_squeezed(sigma2: f64) -> Result<SystemState> {
    SqueezedVacuum::new(sigma2).map(SystemState::Squeezed)
}

/// Normalized Hermite function `ψ_n(x) = (2ⁿ n! √π)^(-1/2) H_n(x) e^(-x²/2)`.
pub fn hermite_wavefunction(n: usize, x: f64) -> Result<f64> {
    if n > MAX_FOCK_ORDER {
        return Err(Error::Capability(format!(
            "Hermite order {n} exceeds the supported maximum {MAX_FOCK_ORDER}"
        )));
    }
    let mut out = vec![0.0; n + 1];
    hermite_wavefunctions(x, &mut out);
    Ok(out[n])
}

/// Fills `out[k] = ψ_k(x)` for `k < out.len()` using the normalized three-term recurrence.
pub fn hermite_wavefunctions(x: f64, out: &mut [f64]) {
    let Some(first) = out.first_mut() else {
        return;
    };
    *first = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if out.len() > 1 {
        out[1] = std::f64::consts::SQRT_2 * x * out[0];
    }
    for k in 1..out.len().saturating_sub(1) {
        let kf = k as f64;
        out[k + 1] = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
    }
}

/// `Σ c_n ψ_n(x)`.
pub(crate) fn hermite_sum(coeffs: &[Complex64], x: f64, scratch: &mut Vec<f64>) -> Complex64 {
    scratch.resize(coeffs.len(), 0.0);
    hermite_wavefunctions(x, scratch);
    coeffs
        .iter()
        .zip(scratch.iter())
        .fold(Complex64::default(), |acc, (c, h)| acc + c * *h)
}

fn gaussian_amplitude(variance: f64, x: f64) -> f64 {
    (2.0 * PI * variance).powf(-0.25) * (-x * x / (4.0 * variance)).exp()
}

/// Continuum Fourier transform by trapezoidal quadrature:
/// `out(k) = (2π)^(-1/2) ∫ f(x) e^(sign·i k x) dx`.
pub(crate) fn fourier_transform(
    from: &Grid,
    values: &[Complex64],
    to: &Grid,
    sign: f64,
) -> Vec<Complex64> {
    use rayon::prelude::*;

    let h = from.spacing();
    let last = values.len() - 1;
    let weights: Vec<Complex64> = values
        .iter()
        .enumerate()
        .map(|(j, v)| {
            if j == 0 || j == last {
                v * (0.5 * h)
            } else {
                v * h
            }
        })
        .collect();
    let prefactor = (2.0 * PI).sqrt().recip();
    const REANCHOR: usize = 128;
    (0..to.count())
        .into_par_iter()
        .map(|i| {
            let k = to.point(i);
            let step = Complex64::from_polar(1.0, sign * k * h);
            let mut acc = Complex64::default();
            let mut phase = Complex64::default();
            for (j, w) in weights.iter().enumerate() {
                if j % REANCHOR == 0 {
                    phase = Complex64::from_polar(1.0, sign * k * from.point(j));
                }
                acc += w * phase;
                phase *= step;
            }
            acc * prefactor
        })
        .collect()
}

impl SystemState {
    /// `ψ(x)`.
    pub fn position_amplitude(&self, x: f64) -> Complex64 {
        match self {
            SystemState::Squeezed(s) => Complex64::new(gaussian_amplitude(s.sigma2, x), 0.0),
            SystemState::Fock(f) => hermite_sum(&f.coeffs, x, &mut Vec::new()),
            SystemState::Grid(g) => g.amplitude(x),
        }
    }

    /// `(⟨x⟩, Var x)` of the state.
    pub fn position_moments(&self) -> (f64, f64) {
        match self {
            SystemState::Squeezed(s) => (0.0, s.sigma2),
            SystemState::Fock(f) => f.position_moments(),
            SystemState::Grid(g) => g.position_moments(),
        }
    }

    /// `(⟨p⟩, Var p)` of the state.
    pub fn momentum_moments(&self) -> (f64, f64) {
        match self {
            SystemState::Squeezed(s) => (0.0, s.momentum_variance()),
            SystemState::Fock(f) => f.momentum_moments(),
            SystemState::Grid(g) => g.momentum_moments(),
        }
    }

    /// Default position grid: `mean ± (8 sd + 2)`, widened to cover Hermite turning points.
    pub fn position_grid(&self, count: usize) -> Result<Grid> {
        let (mean, var) = self.position_moments();
        let (lo, hi) = self.auto_extent(mean, var);
        match self {
            SystemState::Grid(g) => Grid::new(lo.min(g.grid.min()), hi.max(g.grid.max()), count),
            _ => Grid::new(lo, hi, count),
        }
    }

    pub fn momentum_grid(&self, count: usize) -> Result<Grid> {
        let (mean, var) = self.momentum_moments();
        let (lo, hi) = self.auto_extent(mean, var);
        Grid::new(lo, hi, count)
    }

    fn auto_extent(&self, mean: f64, var: f64) -> (f64, f64) {
        let half = 8.0 * var.max(0.0).sqrt() + 2.0;
        let (mut lo, mut hi) = (mean - half, mean + half);
        if let SystemState::Fock(f) = self {
            let turning = (2.0 * f.max_order() as f64 + 1.0).sqrt() + 6.0;
            lo = lo.min(-turning);
            hi = hi.max(turning);
        }
        (lo, hi)
    }

    fn momentum_amplitudes(&self, grid: &Grid) -> Vec<Complex64> {
        match self {
            SystemState::Squeezed(s) => grid
                .points()
                .map(|p| Complex64::new(gaussian_amplitude(s.momentum_variance(), p), 0.0))
                .collect(),
            SystemState::Fock(f) => {
                let coeffs = f.momentum_coeffs();
                let mut scratch = Vec::new();
                grid.points()
                    .map(|p| hermite_sum(&coeffs, p, &mut scratch))
                    .collect()
            }
            SystemState::Grid(g) => fourier_transform(&g.grid, &g.values, grid, -1.0),
        }
    }

    fn position_amplitudes(&self, grid: &Grid) -> Vec<Complex64> {
        match self {
            SystemState::Grid(g) if g.grid == *grid => g.values.clone(),
            SystemState::Fock(f) => {
                let mut scratch = Vec::new();
                grid.points()
                    .map(|x| hermite_sum(&f.coeffs, x, &mut scratch))
                    .collect()
            }
            _ => grid.points().map(|x| self.position_amplitude(x)).collect(),
        }
    }
}

fn density_from_amplitudes(grid: Grid, amplitudes: &[Complex64]) -> Result<ProbabilityDensity> {
    let values: Vec<f64> = amplitudes.iter().map(|a| a.norm_sqr()).collect();
    let deficit = 1.0 - trapezoid(&values, grid.spacing());
    if deficit >= TRUNCATION_LIMIT {
        return Err(Error::Truncation {
            deficit,
            limit: TRUNCATION_LIMIT,
        });
    }
    ProbabilityDensity::normalized(grid, values)
}

/// `|ψ(x)|²` on `grid`.
pub fn position_density(state: &SystemState, grid: &Grid) -> Result<ProbabilityDensity> {
    density_from_amplitudes(*grid, &state.position_amplitudes(grid))
}

/// `|ψ̃(p)|²` on `grid` (unitary convention `ψ̃(p) = (2π)^(-1/2) ∫ ψ(x) e^(-ipx) dx`).
pub fn momentum_density(state: &SystemState, grid: &Grid) -> Result<ProbabilityDensity> {
    density_from_amplitudes(*grid, &state.momentum_amplitudes(grid))
}

/// `ψ̃(p)` sampled on `grid`.
pub fn momentum_wavefunction(state: &SystemState, grid: &Grid) -> Vec<Complex64> {
    state.momentum_amplitudes(grid)
}

pub fn state_variance(density: &ProbabilityDensity) -> f64 {
    density.variance()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn squeezed_rejects_non_positive_variance() {
        assert!(matches!(make_squeezed(-1.0), Err(Error::Domain(_))));
        assert!(matches!(make_squeezed(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn vacuum_variances_are_one_half() {
        let s = make_squeezed(0.5).unwrap();
        let g = Grid::new(-8.0, 8.0, 1025).unwrap();
        assert!((position_density(&s, &g).unwrap().variance() - 0.5).abs() < 1e-6);
        assert!((momentum_density(&s, &g).unwrap().variance() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn squeezed_momentum_variance() {
        let s = make_squeezed(1.0).unwrap();
        let g = s.momentum_grid(DEFAULT_GRID_POINTS).unwrap();
        assert!((momentum_density(&s, &g).unwrap().variance() - 0.25).abs() < 1e-6);
        let s = make_squeezed(2.0).unwrap();
        let g = s.momentum_grid(DEFAULT_GRID_POINTS).unwrap();
        assert!((momentum_density(&s, &g).unwrap().variance() - 0.125).abs() < 1e-6);
    }

    #[test]
    fn hermite_closed_forms() {
        assert!((hermite_wavefunction(0, 0.0).unwrap() - 0.751_125_544_464_942_5).abs() < 1e-15);
        assert_eq!(hermite_wavefunction(1, 0.0).unwrap(), 0.0);
        // H_5 evaluated with factorial normalization in 30-digit arithmetic.
        let expected = -0.399_391_462_813_750_7;
        assert!((hermite_wavefunction(5, 1.3).unwrap() - expected).abs() < 1e-14);
        assert!(matches!(
            hermite_wavefunction(65, 0.0),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        let g = Grid::new(-14.0, 14.0, 4001).unwrap();
        let n = 20;
        let table: Vec<Vec<f64>> = g
            .points()
            .map(|x| {
                let mut v = vec![0.0; n + 1];
                hermite_wavefunctions(x, &mut v);
                v
            })
            .collect();
        for a in [0, 3, 7, 20] {
            for b in [0, 3, 7, 20] {
                let prod: Vec<f64> = table.iter().map(|row| row[a] * row[b]).collect();
                let overlap = trapezoid(&prod, g.spacing());
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((overlap - expected).abs() < 1e-12, "<{a}|{b}> = {overlap}");
            }
        }
    }

    #[test]
    fn fock_ground_state_is_vacuum() {
        let g = Grid::new(-8.0, 8.0, 1025).unwrap();
        let fock = SystemState::Fock(FockSuperposition::from_real(&[1.0]).unwrap());
        let vac = make_squeezed(0.5).unwrap();
        let a = position_density(&fock, &g).unwrap();
        let b = position_density(&vac, &g).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn fock_one_density_closed_form() {
        let g = Grid::new(-9.0, 9.0, 2049).unwrap();
        let fock = SystemState::Fock(FockSuperposition::number_state(1).unwrap());
        let d = position_density(&fock, &g).unwrap();
        for (x, v) in g.points().zip(d.values()) {
            let exact = 2.0 * x * x * (-x * x).exp() / PI.sqrt();
            assert!((v - exact).abs() < 1e-12);
        }
        assert_eq!(d.values()[1024], 0.0);
        assert!((d.variance() - 1.5).abs() < 1e-9);
        let m = momentum_density(&fock, &g).unwrap();
        for (a, b) in d.values().iter().zip(m.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn ladder_moments_match_quadrature() {
        let state =
            FockSuperposition::new(vec![c(0.3, 0.1), c(-0.5, 0.4), c(0.2, -0.7), c(0.1, 0.2)])
                .unwrap();
        let s = SystemState::Fock(state);
        for (analytic, density) in [
            (
                s.position_moments(),
                position_density(&s, &s.position_grid(4097).unwrap()).unwrap(),
            ),
            (
                s.momentum_moments(),
                momentum_density(&s, &s.momentum_grid(4097).unwrap()).unwrap(),
            ),
        ] {
            assert!((analytic.0 - density.mean()).abs() < 1e-9);
            assert!((analytic.1 - density.variance()).abs() < 1e-9);
        }
    }

    #[test]
    fn narrow_grid_reports_truncation() {
        let s = make_squeezed(1.0).unwrap();
        let g = Grid::new(-2.0, 2.0, 401).unwrap();
        match position_density(&s, &g) {
            Err(Error::Truncation { deficit, .. }) => assert!(deficit > 0.01),
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn grid_gaussian_momentum_variance() {
        let g = Grid::new(-10.0, 10.0, 2049).unwrap();
        let psi = GridWavefunction::from_fn(g, |x| c((-x * x / 2.0).exp(), 0.0)).unwrap();
        let s = SystemState::Grid(psi);
        let pg = s.momentum_grid(2049).unwrap();
        let m = momentum_density(&s, &pg).unwrap();
        assert!((m.variance() - 0.5).abs() < 1e-6);
        let (_, var) = s.momentum_moments();
        assert!((var - 0.5).abs() < 1e-4);
    }

    #[test]
    fn grid_wavefunction_round_trip() {
        // ψ̃ of a displaced, chirped Gaussian sampled in momentum space.
        let pg = Grid::new(-12.0, 12.0, 1537).unwrap();
        let xg = Grid::new(-14.0, 14.0, 1793).unwrap();
        let target: Vec<Complex64> = pg
            .points()
            .map(|p| Complex64::from_polar((-(p - 0.7).powi(2) / 1.6).exp(), 0.3 * p * p))
            .collect();
        let psi = GridWavefunction::from_momentum(pg, &target, xg).unwrap();
        let state = SystemState::Grid(psi);
        let back = momentum_density(&state, &pg).unwrap();
        let reference =
            ProbabilityDensity::normalized(pg, target.iter().map(|v| v.norm_sqr()).collect())
                .unwrap();
        for (a, b) in back.values().iter().zip(reference.values()) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }
}
