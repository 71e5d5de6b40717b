//! Self-check suites run by `verify`.

use std::f64::consts::PI;

use clap::ValueEnum;
use num_complex::Complex64;
use pointer_entropy::apparatus::noise_terms;
use pointer_entropy::bounds::{
    balanced_state_free_bound, gaussian_weight, hirschman_deficit, lieb_convolution_check,
    lieb_lower_bound, minimal_variance, optimal_bound, single_param_bound, system_entropies,
    wehrl_constant, BoundParams, BOUND_TOL,
};
use pointer_entropy::distributions::{
    inferred_momentum_density, inferred_position_density, joint_inferred_density, marginalize,
    Axis, Discretization,
};
use pointer_entropy::entropy::marginal_entropies;
use pointer_entropy::states::make_squeezed;
use pointer_entropy::{
    FockSuperposition, Grid, MeasurementSetup, NoiseTerms, ProbabilityDensity, SystemState,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;
use crate::table::{Row, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    NoiseFloor,
    BoundOrdering,
    Lieb,
    Hirschman,
    Saturation,
    Family,
    Marginals,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Self::NoiseFloor => "noise-floor",
            Self::BoundOrdering => "bound-ordering",
            Self::Lieb => "lieb",
            Self::Hirschman => "hirschman",
            Self::Saturation => "saturation",
            Self::Family => "family",
            Self::Marginals => "marginals",
        }
    }
}

/// Outcome of one suite: the smallest inequality slack and the largest deviation in
/// equality cases. The first failing case is kept as the detail.
struct SuiteReport {
    cases: usize,
    min_slack: f64,
    max_deviation: f64,
    failure: Option<String>,
}

impl SuiteReport {
    fn new() -> Self {
        Self {
            cases: 0,
            min_slack: f64::NAN,
            max_deviation: f64::NAN,
            failure: None,
        }
    }

    /// Inequality case: passes when `slack ≥ −tol`.
    fn check(&mut self, slack: f64, tol: f64, describe: impl FnOnce() -> String) {
        self.cases += 1;
        self.min_slack = self.min_slack.min(slack);
        if !(slack >= -tol) && self.failure.is_none() {
            self.failure = Some(describe());
        }
    }

    /// Equality case: passes when `|deviation| < tol`.
    fn check_equal(&mut self, deviation: f64, tol: f64, describe: impl FnOnce() -> String) {
        self.cases += 1;
        self.max_deviation = self.max_deviation.max(deviation.abs());
        if !(deviation.abs() < tol) && self.failure.is_none() {
            self.failure = Some(describe());
        }
    }

    fn fail(&mut self, detail: String) {
        self.cases += 1;
        self.failure.get_or_insert(detail);
    }
}

pub struct VerifyOptions {
    pub seed: u64,
    pub injected: Option<NoiseTerms>,
}

const REFERENCE_NOISE: [(f64, f64); 5] = [
    (
        std::f64::consts::FRAC_1_SQRT_2,
        std::f64::consts::FRAC_1_SQRT_2,
    ),
    (1.0, 0.5),
    (1.0, 1.0),
    (0.3, 5.0),
    (10.0, 2.0),
];

fn random_fock(rng: &mut ChaCha8Rng, n_max: usize) -> Result<SystemState, CliError> {
    let coeffs = (0..=n_max)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    Ok(SystemState::Fock(FockSuperposition::new(coeffs)?))
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo * (hi / lo).powf(rng.random::<f64>())
}

fn noise_floor(opts: &VerifyOptions) -> Result<SuiteReport, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut r = SuiteReport::new();
    for _ in 0..1000 {
        let p: Vec<f64> = (0..5).map(|_| log_uniform(&mut rng, 1e-2, 1e2)).collect();
        let setup = MeasurementSetup::new(p[0], p[1], p[2], p[3], p[4])?;
        let product = noise_terms(&setup).product();
        r.check(product - 0.5, 1e-12, || {
            format!("product {product} for {setup:?}")
        });
    }
    Ok(r)
}

fn bound_ordering(opts: &VerifyOptions) -> Result<SuiteReport, CliError> {
    let mut r = SuiteReport::new();
    let mut noises: Vec<NoiseTerms> = REFERENCE_NOISE
        .iter()
        .map(|&(dx, dp)| NoiseTerms::new(dx, dp))
        .collect::<Result<_, _>>()?;
    noises.extend(opts.injected);
    for noise in &noises {
        if noise.is_sub_minimal() {
            r.fail(format!(
                "sub-minimal noise product {} flagged (delta_x {}, delta_p {})",
                noise.product(),
                noise.delta_x(),
                noise.delta_p()
            ));
            continue;
        }
        let opt = optimal_bound(noise).bound;
        r.check(opt - wehrl_constant(), 1e-12, || {
            format!("optimal below omega at {noise:?}")
        });
        r.check(opt - balanced_state_free_bound(noise), 1e-12, || {
            format!("optimal below the balanced bound at {noise:?}")
        });
        for i in 0..=100 {
            let lambda = i as f64 / 100.0;
            let slack = opt - single_param_bound(noise, lambda)?;
            r.check(slack, 1e-12, || {
                format!("optimal below lambda = {lambda} at {noise:?}")
            });
        }
    }
    Ok(r)
}

fn lieb(opts: &VerifyOptions) -> Result<SuiteReport, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let grid = Grid::new(-20.0, 20.0, 2001)?;
    let mut r = SuiteReport::new();
    for (vf, vg) in [(0.5, 0.5), (0.3, 2.0), (1.7, 0.8)] {
        let f = ProbabilityDensity::gaussian(grid, 0.0, vf)?;
        let g = ProbabilityDensity::gaussian(grid, 0.0, vg)?;
        let tight = lieb_convolution_check(&f, &g, gaussian_weight(vf.sqrt(), vg.sqrt())?)?;
        r.check_equal(tight.gap(), BOUND_TOL, || {
            format!("Gaussian equality gap {:e}", tight.gap())
        });
    }
    for _ in 0..20 {
        let (w, m) = (rng.random_range(0.05..0.95), rng.random_range(-2.0..2.0));
        let (v1, v2, vg) = (
            rng.random_range(0.1..2.0),
            rng.random_range(0.1..2.0),
            rng.random_range(0.1..3.0),
        );
        let lambda: f64 = rng.random();
        let f = ProbabilityDensity::from_fn(grid, |x| {
            let n = |mu: f64, v: f64| (-(x - mu).powi(2) / (2.0 * v)).exp() / (2.0 * PI * v).sqrt();
            w * n(m, v1) + (1.0 - w) * n(-m, v2)
        })?;
        let g = ProbabilityDensity::gaussian(grid, 0.0, vg)?;
        let check = lieb_convolution_check(&f, &g, lambda)?;
        r.check(check.gap(), BOUND_TOL, || {
            format!("gap {:e} at lambda {lambda}", check.gap())
        });
    }
    Ok(r)
}

fn hirschman(opts: &VerifyOptions) -> Result<SuiteReport, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut r = SuiteReport::new();
    for _ in 0..20 {
        let n_max = rng.random_range(0..=8);
        let d = hirschman_deficit(&random_fock(&mut rng, n_max)?)?;
        r.check(d, BOUND_TOL, || format!("deficit {d:e} for a random state"));
    }
    for _ in 0..5 {
        let sigma2 = log_uniform(&mut rng, 0.05, 5.0);
        let d = hirschman_deficit(&make_squeezed(sigma2)?)?;
        r.check_equal(d, BOUND_TOL, || {
            format!("squeezed sigma2 {sigma2}: deficit {d:e}")
        });
    }
    Ok(r)
}

fn saturation(_: &VerifyOptions) -> Result<SuiteReport, CliError> {
    let mut r = SuiteReport::new();
    for (product, ratio) in [(0.5, 1.0), (1.0, 2.0), (2.0, 0.5), (10.0, 3.0)] {
        let noise = NoiseTerms::from_product(product, ratio)?;
        let s = marginal_entropies(&make_squeezed(minimal_variance(&noise))?, &noise)?.collective;
        let err = (s - optimal_bound(&noise).bound).abs();
        r.check_equal(err, BOUND_TOL, || {
            format!("product {product}: |S - optimal| = {err:e}")
        });
    }
    Ok(r)
}

fn family(opts: &VerifyOptions) -> Result<SuiteReport, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut r = SuiteReport::new();
    let noises = [(1.0, 0.5), (1.0, 1.0), (0.3, 5.0)];
    for _ in 0..5 {
        let state = random_fock(&mut rng, 6)?;
        let (sx, sp) = system_entropies(&state, &Discretization::default())?;
        for &(dx, dp) in &noises {
            let noise = NoiseTerms::new(dx, dp)?;
            let s = marginal_entropies(&state, &noise)?.collective;
            for i in 0..=10 {
                for k in 0..=10 {
                    let params = BoundParams::new(i as f64 / 10.0, k as f64 / 10.0)?;
                    let slack = s - lieb_lower_bound(sx, sp, &noise, &params);
                    r.check(slack, BOUND_TOL, || {
                        format!("S below the family bound by {:e}", -slack)
                    });
                }
            }
        }
    }
    Ok(r)
}

fn marginals(_: &VerifyOptions) -> Result<SuiteReport, CliError> {
    let mut r = SuiteReport::new();
    let noise = NoiseTerms::new(1.2, 0.9)?;
    let states = [
        make_squeezed(0.5)?,
        SystemState::Fock(FockSuperposition::number_state(1)?),
    ];
    for state in &states {
        let joint = joint_inferred_density(state, &noise)?;
        for (axis, direct) in [
            (Axis::X, inferred_position_density(state, &noise)?),
            (Axis::P, inferred_momentum_density(state, &noise)?),
        ] {
            let m = marginalize(&joint, axis)?;
            let err = m
                .grid()
                .points()
                .zip(m.values())
                .map(|(x, v)| (v - direct.value_at(x)).abs())
                .fold(0.0, f64::max);
            r.check_equal(err, BOUND_TOL, || format!("sup-norm difference {err:e}"));
        }
    }
    Ok(r)
}

/// Runs the selected suites (all by default) and reports whether every one passed.
pub fn run(suite: Option<Suite>, opts: &VerifyOptions) -> Result<(Table, bool), CliError> {
    let selected: Vec<Suite> = match suite {
        Some(s) => vec![s],
        None => Suite::value_variants().to_vec(),
    };
    let mut table = Table::default();
    let mut all_passed = true;
    for suite in selected {
        let report = match suite {
            Suite::NoiseFloor => noise_floor(opts),
            Suite::BoundOrdering => bound_ordering(opts),
            Suite::Lieb => lieb(opts),
            Suite::Hirschman => hirschman(opts),
            Suite::Saturation => saturation(opts),
            Suite::Family => family(opts),
            Suite::Marginals => marginals(opts),
        }
        .unwrap_or_else(|e| {
            let mut r = SuiteReport::new();
            r.fail(e.to_string());
            r
        });
        let passed = report.failure.is_none();
        all_passed &= passed;
        let mut row = Row::new();
        row.push("suite", suite.name())
            .push("cases", report.cases)
            .push("passed", passed)
            .push("min_slack", report.min_slack)
            .push("max_deviation", report.max_deviation)
            .push("detail", report.failure.unwrap_or_default());
        table.push(row);
    }
    Ok((table, all_passed))
}
