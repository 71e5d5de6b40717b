//! Uniform grids, trapezoidal quadrature and normalized 1-D densities.

use crate::error::{domain, Error, Result};

/// Tolerance on the trapezoidal integral of a [`ProbabilityDensity`].
pub const NORMALIZATION_TOL: f64 = 1e-6;

/// A uniform grid of `count` points from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    min: f64,
    max: f64,
    count: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(domain(format!(
                "grid bounds must be finite, got [{min}, {max}]"
            )));
        }
        if min >= max {
            return Err(domain(format!("grid needs min < max, got [{min}, {max}]")));
        }
        if count < 2 {
            return Err(domain(format!("grid needs at least 2 points, got {count}")));
        }
        Ok(Self { min, max, count })
    }

    /// Symmetric grid `center ± half_width`.
    pub fn centered(center: f64, half_width: f64, count: usize) -> Result<Self> {
        Self::new(center - half_width, center + half_width, count)
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.max
        } else {
            self.min + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.point(i))
    }

    /// Extends the grid by `pad` whole spacings on each side, keeping the lattice.
    pub fn padded(&self, pad: usize) -> Grid {
        let h = self.spacing();
        Grid {
            min: self.min - pad as f64 * h,
            max: self.max + pad as f64 * h,
            count: self.count + 2 * pad,
        }
    }

    /// Number of whole spacings needed to cover `width` on each side.
    pub fn pad_for(&self, width: f64) -> usize {
        (width / self.spacing()).ceil().max(0.0) as usize
    }

    /// Same extent, `factor`-times finer spacing.
    pub fn refined(&self, factor: usize) -> Grid {
        Grid {
            min: self.min,
            max: self.max,
            count: (self.count - 1) * factor.max(1) + 1,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.min && x <= self.max
    }
}

/// Trapezoidal rule for samples on a uniform grid with spacing `h`.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, inner @ .., last] => h * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}

/// A non-negative density sampled on a uniform grid, normalized under the trapezoidal rule.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDensity {
    grid: Grid,
    values: Vec<f64>,
}

impl ProbabilityDensity {
    /// Validates an already-normalized density.
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        check_samples(&grid, &values)?;
        let mass = trapezoid(&values, grid.spacing());
        if (mass - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDensity(format!(
                "trapezoidal integral is {mass}, expected 1 within {NORMALIZATION_TOL:e}"
            )));
        }
        Ok(Self { grid, values })
    }

    /// Rescales non-negative samples to unit mass.
    pub fn normalized(grid: Grid, mut values: Vec<f64>) -> Result<Self> {
        check_samples(&grid, &values)?;
        let mass = trapezoid(&values, grid.spacing());
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidDensity(format!(
                "cannot normalize mass {mass}"
            )));
        }
        values.iter_mut().for_each(|v| *v /= mass);
        Ok(Self { grid, values })
    }

    /// Samples `f` on `grid` and normalizes.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.points().map(f).collect();
        Self::normalized(grid, values)
    }

    /// Normal density with the given mean and variance.
    pub fn gaussian(grid: Grid, mean: f64, variance: f64) -> Result<Self> {
        if !(variance > 0.0) {
            return Err(domain(format!("variance must be positive, got {variance}")));
        }
        let norm = 1.0 / (2.0 * std::f64::consts::PI * variance).sqrt();
        Self::from_fn(grid, |x| {
            norm * (-(x - mean).powi(2) / (2.0 * variance)).exp()
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn mean(&self) -> f64 {
        let weighted: Vec<f64> = self
            .grid
            .points()
            .zip(&self.values)
            .map(|(x, f)| x * f)
            .collect();
        trapezoid(&weighted, self.grid.spacing())
    }

    /// Second central moment under the trapezoidal rule.
    pub fn variance(&self) -> f64 {
        let h = self.grid.spacing();
        let mean = self.mean();
        let second: Vec<f64> = self
            .grid
            .points()
            .zip(&self.values)
            .map(|(x, f)| x * x * f)
            .collect();
        trapezoid(&second, h) - mean * mean
    }

    /// Cubic Lagrange interpolation; zero outside the grid.
    pub fn value_at(&self, x: f64) -> f64 {
        cubic_interpolate(&self.grid, &self.values, x).max(0.0)
    }
}

fn check_samples(grid: &Grid, values: &[f64]) -> Result<()> {
    if values.len() != grid.count() {
        return Err(Error::InvalidDensity(format!(
            "{} samples for a {}-point grid",
            values.len(),
            grid.count()
        )));
    }
    if let Some((i, v)) = values
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
    {
        return Err(Error::InvalidDensity(format!(
            "sample {i} is {v}; densities must be finite and non-negative"
        )));
    }
    Ok(())
}

/// Four-point Lagrange interpolation of uniformly sampled data; zero outside the grid.
pub(crate) fn cubic_interpolate<T>(grid: &Grid, values: &[T], x: f64) -> T
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    if !grid.contains(x) {
        return T::default();
    }
    let n = grid.count();
    let t = (x - grid.min()) / grid.spacing();
    if n < 4 {
        let i = (t.floor() as usize).min(n - 2);
        let s = t - i as f64;
        return values[i] * (1.0 - s) + values[i + 1] * s;
    }
    let i = (t.floor() as usize).clamp(1, n - 3);
    let s = t - i as f64;
    let w0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
    let w1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    let w2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
    let w3 = (s + 1.0) * s * (s - 1.0) / 6.0;
    values[i - 1] * w0 + values[i] * w1 + values[i + 1] * w2 + values[i + 2] * w3
}
