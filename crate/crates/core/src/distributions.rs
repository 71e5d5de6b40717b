//! Inferred-measurement densities: Gaussian smoothing of `|ψ|²`, `|ψ̃|²` and of the
//! Wigner function.
//!
//! All smoothing uses a sampled Gaussian kernel renormalized over the grid lattice, so
//! mass is conserved to rounding and a width far below the grid spacing degenerates to
//! the identity instead of a spike.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::apparatus::NoiseTerms;
use crate::error::{domain, Error, Result};
use crate::grid::{cubic_interpolate, trapezoid, Grid, ProbabilityDensity};
use crate::states::{
    hermite_sum, hermite_wavefunctions, momentum_density, position_density, SystemState,
    DEFAULT_GRID_POINTS, MAX_FOCK_ORDER,
};

/// Output grids are widened by this many noise widths on each side.
pub const WIDENING: f64 = 8.0;
/// The kernel is evaluated out to this many widths; beyond it the weights underflow 1e-31.
const KERNEL_REACH: f64 = 12.0;
/// Largest allowed mass drift of a convolution before renormalization.
pub const CONVOLUTION_DRIFT_TOL: f64 = 1e-6;
/// Smoothed-Wigner values down to this level are treated as quadrature noise and clamped.
pub const NEGATIVITY_TOL: f64 = 1e-9;
/// Tolerance on 2-D normalization.
pub const JOINT_NORMALIZATION_TOL: f64 = 1e-5;
/// Largest Fock order the Wigner quadrature accepts.
pub const MAX_WIGNER_FOCK_ORDER: usize = 16;
/// Per-axis cap on joint-density grids.
pub const MAX_JOINT_POINTS: usize = 1025;

/// Grid choices for densities derived from a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discretization {
    pub points: usize,
    pub position: Option<Grid>,
    pub momentum: Option<Grid>,
}

impl Default for Discretization {
    fn default() -> Self {
        Self {
            points: DEFAULT_GRID_POINTS,
            position: None,
            momentum: None,
        }
    }
}

impl Discretization {
    pub fn with_points(points: usize) -> Self {
        Self {
            points,
            ..Self::default()
        }
    }

    pub fn position_grid(&self, state: &SystemState) -> Result<Grid> {
        self.position
            .map_or_else(|| state.position_grid(self.points), Ok)
    }

    pub fn momentum_grid(&self, state: &SystemState) -> Result<Grid> {
        self.momentum
            .map_or_else(|| state.momentum_grid(self.points), Ok)
    }
}

/// Symmetric half-kernel `w[0..=K]` with `w[0] + 2 Σ w[k] = 1`.
fn lattice_kernel(h: f64, delta: f64, max_reach: usize) -> Vec<f64> {
    let reach = ((KERNEL_REACH * delta / h).ceil() as usize).clamp(1, max_reach.max(1));
    let mut w: Vec<f64> = (0..=reach)
        .map(|k| {
            let u = k as f64 * h / delta;
            (-0.5 * u * u).exp()
        })
        .collect();
    let total = w[0] + 2.0 * w[1..].iter().sum::<f64>();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

/// Discrete convolution of `input` with a symmetric half-kernel, output padded by `pad`.
fn smooth(input: &[f64], kernel: &[f64], pad: usize) -> Vec<f64> {
    let n = input.len() as isize;
    let reach = kernel.len() as isize - 1;
    let pad = pad as isize;
    (0..(n + 2 * pad))
        .into_par_iter()
        .with_min_len(256)
        .map(|i| {
            // input index j contributes with kernel offset |i - pad - j|
            let centre = i - pad;
            let lo = (centre - reach).max(0);
            let hi = (centre + reach).min(n - 1);
            (lo..=hi)
                .map(|j| kernel[(centre - j).unsigned_abs()] * input[j as usize])
                .sum()
        })
        .collect()
}

/// Gaussian smoothing of a density with standard deviation `delta`.
///
/// The output grid is the input lattice widened by `8·delta` on each side.
pub fn convolve_gaussian(density: &ProbabilityDensity, delta: f64) -> Result<ProbabilityDensity> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(domain(format!("noise width must be positive, got {delta}")));
    }
    let grid = density.grid();
    let h = grid.spacing();
    let pad = grid.pad_for(WIDENING * delta);
    let kernel = lattice_kernel(h, delta, grid.count() + pad);
    let out_grid = grid.padded(pad);
    let values = smooth(density.values(), &kernel, pad);
    let mass = trapezoid(&values, h);
    if (mass - 1.0).abs() > CONVOLUTION_DRIFT_TOL {
        return Err(Error::NumericalConsistency(format!(
            "Gaussian convolution drifted to mass {mass}"
        )));
    }
    ProbabilityDensity::normalized(out_grid, values)
}

/// Convolution of two densities, `(f * g)(x) = ∫ f(y) g(x - y) dy`.
///
/// `g` is resampled onto the spacing of `f` when the grids differ.
pub fn convolve(f: &ProbabilityDensity, g: &ProbabilityDensity) -> Result<ProbabilityDensity> {
    let h = f.grid().spacing();
    let g_grid = *g.grid();
    let same_spacing = ((g_grid.spacing() - h) / h).abs() < 1e-12;
    let (g_grid, g_values) = if same_spacing {
        (g_grid, g.values().to_vec())
    } else {
        let count = ((g_grid.max() - g_grid.min()) / h).ceil() as usize + 1;
        let regrid = Grid::new(g_grid.min(), g_grid.min() + (count - 1) as f64 * h, count)?;
        let vals = regrid.points().map(|x| g.value_at(x)).collect();
        (regrid, vals)
    };
    let fv = f.values();
    let nf = fv.len();
    let ng = g_values.len();
    let out_grid = Grid::new(
        f.grid().min() + g_grid.min(),
        f.grid().min() + g_grid.min() + (nf + ng - 2) as f64 * h,
        nf + ng - 1,
    )?;
    let values: Vec<f64> = (0..nf + ng - 1)
        .into_par_iter()
        .with_min_len(256)
        .map(|i| {
            let lo = i.saturating_sub(ng - 1);
            let hi = i.min(nf - 1);
            h * (lo..=hi).map(|j| fv[j] * g_values[i - j]).sum::<f64>()
        })
        .collect();
    ProbabilityDensity::normalized(out_grid, values)
}

/// Density of the inferred position: `|ψ|²` smoothed with width `δ_X`.
pub fn inferred_position_density(
    state: &SystemState,
    noise: &NoiseTerms,
) -> Result<ProbabilityDensity> {
    inferred_position_density_with(state, noise, &Discretization::default())
}

pub fn inferred_position_density_with(
    state: &SystemState,
    noise: &NoiseTerms,
    disc: &Discretization,
) -> Result<ProbabilityDensity> {
    let density = position_density(state, &disc.position_grid(state)?)?;
    convolve_gaussian(&density, noise.delta_x())
}

/// Density of the inferred momentum: `|ψ̃|²` smoothed with width `δ_P`.
pub fn inferred_momentum_density(
    state: &SystemState,
    noise: &NoiseTerms,
) -> Result<ProbabilityDensity> {
    inferred_momentum_density_with(state, noise, &Discretization::default())
}

pub fn inferred_momentum_density_with(
    state: &SystemState,
    noise: &NoiseTerms,
    disc: &Discretization,
) -> Result<ProbabilityDensity> {
    let density = momentum_density(state, &disc.momentum_grid(state)?)?;
    convolve_gaussian(&density, noise.delta_p())
}

/// Precomputed smoothed products `G_δ * (ψ_m ψ_n)` for fast inferred densities of
/// Fock superpositions up to a fixed order.
///
/// The density of `Σ c_n ψ_n` smoothed with width `delta` is
/// `Σ_{m,n} Re(c̄_m c_n) K_mn`, so each evaluation is a short sum of precomputed rows.
#[derive(Debug, Clone)]
pub struct FockSmoother {
    order: usize,
    grid: Grid,
    rows: Vec<Vec<f64>>,
}

impl FockSmoother {
    /// `spacing` sets the lattice of both the Hermite samples and the output grid.
    pub fn new(order: usize, delta: f64, spacing: f64) -> Result<Self> {
        if order > MAX_FOCK_ORDER {
            return Err(Error::Capability(format!(
                "Fock order {order} exceeds the supported maximum {MAX_FOCK_ORDER}"
            )));
        }
        if !(delta > 0.0 && spacing > 0.0) {
            return Err(domain("noise width and spacing must be positive"));
        }
        let half = (2.0 * order as f64 + 1.0).sqrt() + 7.0;
        let count = (2.0 * half / spacing).ceil() as usize + 1;
        let input = Grid::centered(0.0, 0.5 * (count - 1) as f64 * spacing, count)?;
        let table: Vec<Vec<f64>> = input
            .points()
            .map(|x| {
                let mut v = vec![0.0; order + 1];
                hermite_wavefunctions(x, &mut v);
                v
            })
            .collect();
        let pad = input.pad_for(WIDENING * delta);
        let kernel = lattice_kernel(spacing, delta, count + pad);
        let mut rows = Vec::with_capacity((order + 1) * (order + 2) / 2);
        for m in 0..=order {
            for n in m..=order {
                let product: Vec<f64> = table.iter().map(|row| row[m] * row[n]).collect();
                rows.push(smooth(&product, &kernel, pad));
            }
        }
        Ok(Self {
            order,
            grid: input.padded(pad),
            rows,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Unnormalized smoothed density of `Σ c_n ψ_n`; `coeffs.len()` must be `order + 1`.
    pub fn density_into(&self, coeffs: &[Complex64], out: &mut Vec<f64>) {
        assert_eq!(coeffs.len(), self.order + 1, "coefficient count mismatch");
        out.clear();
        out.resize(self.grid.count(), 0.0);
        let mut row = self.rows.iter();
        for m in 0..=self.order {
            for n in m..=self.order {
                let k = row.next().expect("row table sized by order");
                let mut w = (coeffs[m].conj() * coeffs[n]).re;
                if m != n {
                    w *= 2.0;
                }
                if w != 0.0 {
                    out.iter_mut().zip(k).for_each(|(o, v)| *o += w * v);
                }
            }
        }
    }
}

/// Wigner function sampled on a phase-space grid; `values[i * np + k] = W(x_i, p_k)`.
#[derive(Debug, Clone)]
pub struct WignerGrid {
    xgrid: Grid,
    pgrid: Grid,
    values: Vec<f64>,
}

impl WignerGrid {
    fn new(xgrid: Grid, pgrid: Grid, values: Vec<f64>) -> Result<Self> {
        let bound = 1.0 / PI + 1e-9;
        if let Some(v) = values.iter().find(|v| !(v.abs() <= bound)) {
            return Err(Error::NumericalConsistency(format!(
                "Wigner value {v} exceeds the pure-state bound 1/π"
            )));
        }
        let out = Self {
            xgrid,
            pgrid,
            values,
        };
        let mass = out.integral();
        if (mass - 1.0).abs() > JOINT_NORMALIZATION_TOL {
            return Err(Error::NumericalConsistency(format!(
                "Wigner function integrates to {mass} on the grid"
            )));
        }
        Ok(out)
    }

    pub fn xgrid(&self) -> &Grid {
        &self.xgrid
    }

    pub fn pgrid(&self) -> &Grid {
        &self.pgrid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize, k: usize) -> f64 {
        self.values[i * self.pgrid.count() + k]
    }

    pub fn integral(&self) -> f64 {
        integrate_2d(&self.values, &self.xgrid, &self.pgrid)
    }

    /// `∫ W(x, p) dp` on the x grid.
    pub fn position_marginal(&self) -> Vec<f64> {
        let np = self.pgrid.count();
        self.values
            .chunks(np)
            .map(|row| trapezoid(row, self.pgrid.spacing()))
            .collect()
    }
}

fn integrate_2d(values: &[f64], xgrid: &Grid, pgrid: &Grid) -> f64 {
    let rows: Vec<f64> = values
        .chunks(pgrid.count())
        .map(|row| trapezoid(row, pgrid.spacing()))
        .collect();
    trapezoid(&rows, xgrid.spacing())
}

/// `W(x,p) = (1/π) ∫ ψ̄(x+y) ψ(x−y) e^(2ipy) dy`.
///
/// Squeezed vacua use the closed form `(1/π) exp(−x²/(2σ²) − 2σ²p²)`.
pub fn wigner_grid(state: &SystemState, xgrid: &Grid, pgrid: &Grid) -> Result<WignerGrid> {
    match state {
        SystemState::Squeezed(s) => {
            let sigma2 = s.sigma2();
            let values = xgrid
                .points()
                .flat_map(|x| {
                    pgrid
                        .points()
                        .map(move |p| (-x * x / (2.0 * sigma2) - 2.0 * sigma2 * p * p).exp() / PI)
                })
                .collect();
            WignerGrid::new(*xgrid, *pgrid, values)
        }
        _ => wigner_by_quadrature(state, xgrid, pgrid),
    }
}

/// Wigner function by trapezoidal quadrature along `y`, for any supported state.
pub fn wigner_by_quadrature(state: &SystemState, xgrid: &Grid, pgrid: &Grid) -> Result<WignerGrid> {
    if let SystemState::Fock(f) = state {
        if f.max_order() > MAX_WIGNER_FOCK_ORDER {
            return Err(Error::Capability(format!(
                "Wigner grids support Fock orders up to {MAX_WIGNER_FOCK_ORDER}, got {}",
                f.max_order()
            )));
        }
    }
    let support = state.position_grid(2)?;
    let (_, pvar) = state.momentum_moments();
    let p_reach = pgrid.min().abs().max(pgrid.max().abs()) + 8.0 * pvar.sqrt() + 2.0;
    // Resolve e^(2ipy) against the state's own momentum content.
    let h_target = PI / (4.0 * p_reach);
    let hx = xgrid.spacing();
    let refine = ((0.5 * hx / h_target).ceil() as usize).max(1);
    let hy = 0.5 * hx / refine as f64;
    let stride = 2 * refine;
    let y_reach = 0.5 * (support.max() - support.min());
    let ky = (y_reach / hy).ceil() as usize;

    let lattice_len = (xgrid.count() - 1) * stride + 2 * ky + 1;
    let lattice_min = xgrid.min() - ky as f64 * hy;
    let amplitudes: Vec<Complex64> = match state {
        SystemState::Fock(f) => {
            let coeffs = f.coeffs();
            (0..lattice_len)
                .into_par_iter()
                .with_min_len(512)
                .map_init(Vec::new, |scratch, j| {
                    hermite_sum(coeffs, lattice_min + j as f64 * hy, scratch)
                })
                .collect()
        }
        SystemState::Grid(g) => (0..lattice_len)
            .map(|j| cubic_interpolate(g.grid(), g.values(), lattice_min + j as f64 * hy))
            .collect(),
        SystemState::Squeezed(_) => (0..lattice_len)
            .map(|j| state.position_amplitude(lattice_min + j as f64 * hy))
            .collect(),
    };

    let np = pgrid.count();
    // cos/sin(2 p_k y_j) for j = 1..=ky
    let mut cos_table = vec![0.0; np * ky];
    let mut sin_table = vec![0.0; np * ky];
    for k in 0..np {
        let p = pgrid.point(k);
        for j in 1..=ky {
            let (s, c) = (2.0 * p * j as f64 * hy).sin_cos();
            cos_table[k * ky + j - 1] = c;
            sin_table[k * ky + j - 1] = s;
        }
    }

    let values: Vec<f64> = (0..xgrid.count())
        .into_par_iter()
        .flat_map_iter(|i| {
            let centre = ky + i * stride;
            let g0 = amplitudes[centre].norm_sqr();
            let (re, im): (Vec<f64>, Vec<f64>) = (1..=ky)
                .map(|j| {
                    let g = amplitudes[centre + j].conj() * amplitudes[centre - j];
                    let w = if j == ky { 0.5 } else { 1.0 };
                    (w * g.re, w * g.im)
                })
                .unzip();
            let cos_table = &cos_table;
            let sin_table = &sin_table;
            (0..np).map(move |k| {
                let c = &cos_table[k * ky..(k + 1) * ky];
                let s = &sin_table[k * ky..(k + 1) * ky];
                let tail: f64 = re
                    .iter()
                    .zip(c)
                    .zip(im.iter().zip(s))
                    .map(|((r, c), (m, s))| r * c - m * s)
                    .sum();
                hy * (g0 + 2.0 * tail) / PI
            })
        })
        .collect();
    WignerGrid::new(*xgrid, *pgrid, values)
}

/// Joint density of inferred position and momentum; `values[i * np + k]`.
#[derive(Debug, Clone)]
pub struct JointDensity {
    xgrid: Grid,
    pgrid: Grid,
    values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    P,
}

impl JointDensity {
    /// Clamps quadrature-level negativity and normalizes; larger negativity is an error.
    pub fn new(xgrid: Grid, pgrid: Grid, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != xgrid.count() * pgrid.count() {
            return Err(domain("joint density shape mismatch"));
        }
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min >= -NEGATIVITY_TOL) {
            return Err(Error::NumericalConsistency(format!(
                "smoothed Wigner function reaches {min:e}, below the clamping threshold"
            )));
        }
        values.iter_mut().for_each(|v| *v = v.max(0.0));
        let mass = integrate_2d(&values, &xgrid, &pgrid);
        if (mass - 1.0).abs() > JOINT_NORMALIZATION_TOL {
            return Err(Error::NumericalConsistency(format!(
                "joint density integrates to {mass}"
            )));
        }
        values.iter_mut().for_each(|v| *v /= mass);
        Ok(Self {
            xgrid,
            pgrid,
            values,
        })
    }

    pub fn xgrid(&self) -> &Grid {
        &self.xgrid
    }

    pub fn pgrid(&self) -> &Grid {
        &self.pgrid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize, k: usize) -> f64 {
        self.values[i * self.pgrid.count() + k]
    }
}

/// Smooths the Wigner function with the Gaussian filter of the noise terms on grids
/// chosen from the state's extent, capped at [`MAX_JOINT_POINTS`] per axis.
pub fn joint_inferred_density(state: &SystemState, noise: &NoiseTerms) -> Result<JointDensity> {
    let xgrid = joint_axis(&state.position_grid(2)?, noise.delta_x())?;
    let pgrid = joint_axis(&state.momentum_grid(2)?, noise.delta_p())?;
    joint_inferred_density_on(state, noise, &xgrid, &pgrid)
}

fn joint_axis(extent: &Grid, delta: f64) -> Result<Grid> {
    let inner = extent.max() - extent.min();
    let span = inner + 2.0 * WIDENING * delta;
    // a few spacings of headroom for the ceil() in the padding
    let h = span / (MAX_JOINT_POINTS - 5) as f64;
    let count = (inner / h).ceil() as usize + 1;
    Grid::new(extent.min(), extent.min() + (count - 1) as f64 * h, count)
}

/// Joint density with the Wigner function sampled on the given inner grids; the
/// result lives on those grids widened by `8δ` per axis.
pub fn joint_inferred_density_on(
    state: &SystemState,
    noise: &NoiseTerms,
    xgrid: &Grid,
    pgrid: &Grid,
) -> Result<JointDensity> {
    let wigner = wigner_grid(state, xgrid, pgrid)?;
    smooth_wigner(&wigner, noise)
}

/// Separable Gaussian smoothing of a Wigner grid.
pub fn smooth_wigner(wigner: &WignerGrid, noise: &NoiseTerms) -> Result<JointDensity> {
    let (xg, pg) = (wigner.xgrid, wigner.pgrid);
    let pad_x = xg.pad_for(WIDENING * noise.delta_x());
    let pad_p = pg.pad_for(WIDENING * noise.delta_p());
    let kx = lattice_kernel(xg.spacing(), noise.delta_x(), xg.count() + pad_x);
    let kp = lattice_kernel(pg.spacing(), noise.delta_p(), pg.count() + pad_p);
    let np_out = pg.count() + 2 * pad_p;
    let nx_out = xg.count() + 2 * pad_x;

    let rows: Vec<Vec<f64>> = wigner
        .values
        .chunks(pg.count())
        .map(|row| smooth(row, &kp, pad_p))
        .collect();
    let columns: Vec<Vec<f64>> = (0..np_out)
        .into_par_iter()
        .map(|k| {
            let column: Vec<f64> = rows.iter().map(|r| r[k]).collect();
            smooth(&column, &kx, pad_x)
        })
        .collect();
    let mut values = vec![0.0; nx_out * np_out];
    for (k, column) in columns.iter().enumerate() {
        for (i, v) in column.iter().enumerate() {
            values[i * np_out + k] = *v;
        }
    }
    JointDensity::new(xg.padded(pad_x), pg.padded(pad_p), values)
}

/// Integrates out the other axis and renormalizes.
pub fn marginalize(joint: &JointDensity, axis: Axis) -> Result<ProbabilityDensity> {
    let np = joint.pgrid.count();
    match axis {
        Axis::X => {
            let values = joint
                .values
                .chunks(np)
                .map(|row| trapezoid(row, joint.pgrid.spacing()))
                .collect();
            ProbabilityDensity::normalized(joint.xgrid, values)
        }
        Axis::P => {
            let values = (0..np)
                .map(|k| {
                    let column: Vec<f64> = joint.values[k..].iter().step_by(np).copied().collect();
                    trapezoid(&column, joint.xgrid.spacing())
                })
                .collect();
            ProbabilityDensity::normalized(joint.pgrid, values)
        }
    }
}
