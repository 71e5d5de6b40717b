//! Record builders behind the `entropy`, `bounds`, `sweep` and `minimize` subcommands.

use pointer_entropy::bounds::{
    lieb_lower_bound, minimal_variance, noise_bounds, optimal_bound, report_with,
    single_param_bound, system_entropies, BoundParams,
};
use pointer_entropy::distributions::Discretization;
use pointer_entropy::entropy::{marginal_entropies_with, squeezed_collective_entropy_closed_form};
use pointer_entropy::minimizer::{
    fidelity_with_squeezed, find_minimal_entropy_state, OptimizationResult, OptimizerConfig,
};
use pointer_entropy::states::make_squeezed;
use pointer_entropy::{Error, NoiseTerms};

use crate::error::{status, CliError};
use crate::spec::{StateSpec, SweepParam, SweepSpec};
use crate::table::{Row, Table};

/// `|optimal − Ω|` below which the two are reported equal.
const EQUALITY_TOL: f64 = 1e-12;

/// A table plus the exit status it should be reported with.
pub struct Output {
    pub table: Table,
    pub status: u8,
}

impl From<Table> for Output {
    fn from(table: Table) -> Self {
        Self {
            table,
            status: status::SUCCESS,
        }
    }
}

fn single(row: Row) -> Table {
    let mut t = Table::default();
    t.push(row);
    t
}

fn push_noise(row: &mut Row, noise: &NoiseTerms) {
    row.push("delta_x", noise.delta_x())
        .push("delta_p", noise.delta_p())
        .push("noise_product", noise.product());
}

pub fn entropy(
    state: &StateSpec,
    noise: &NoiseTerms,
    disc: &Discretization,
) -> Result<Output, CliError> {
    let system = state.resolve(Some(noise))?;
    let s = marginal_entropies_with(&system, noise, disc)?;
    let mut row = Row::new();
    row.push("state", state.to_string());
    push_noise(&mut row, noise);
    row.push("s_x", s.s_x)
        .push("s_p", s.s_p)
        .push("collective", s.collective);
    Ok(single(row).into())
}

pub fn bounds(
    state: Option<&StateSpec>,
    noise: &NoiseTerms,
    lambda: Option<f64>,
    disc: &Discretization,
) -> Result<Output, CliError> {
    let lambda = lambda.unwrap_or_else(|| optimal_bound(noise).lambda);
    let free = noise_bounds(noise, lambda)?;
    let mut row = Row::new();
    if let Some(spec) = state {
        row.push("state", spec.to_string());
    }
    push_noise(&mut row, noise);
    row.push("sub_minimal", noise.is_sub_minimal())
        .push("omega", free.omega)
        .push("noise_bound", free.noise_bound)
        .push("balanced_state_free", free.balanced_state_free)
        .push("lambda", lambda)
        .push("single_param", free.single_param)
        .push("optimal", free.optimal)
        .push("optimal_lambda", free.optimal_lambda)
        .push(
            "optimal_equals_omega",
            (free.optimal - free.omega).abs() <= EQUALITY_TOL,
        );
    if let Some(spec) = state {
        let system = spec.resolve(Some(noise))?;
        let params = BoundParams::equal(lambda)?;
        let r = report_with(&system, noise, &params, disc)?;
        row.push("entropy_x_system", r.entropy_x_system)
            .push("entropy_p_system", r.entropy_p_system)
            .push("s_x", r.s_x)
            .push("s_p", r.s_p)
            .push("collective", r.collective)
            .push("lambda_family", r.lambda_family)
            .push("system_bound", r.system_bound)
            .push("balanced_bound", r.balanced_bound);
    }
    Ok(single(row).into())
}

pub fn sweep(
    spec: &SweepSpec,
    state: Option<&StateSpec>,
    noise: Option<&NoiseTerms>,
    lambda: Option<f64>,
    disc: &Discretization,
) -> Result<Output, CliError> {
    let mut table = Table::default();
    match spec.param {
        SweepParam::Product => {
            let ratio = noise.map_or(1.0, |n| n.delta_x() / n.delta_p());
            for q in spec.values() {
                let noise = NoiseTerms::from_product(q, ratio)?;
                table.push(bound_row(q, state, &noise, lambda, disc)?);
            }
        }
        SweepParam::Sigma2 => {
            if state.is_some() {
                return Err(CliError::config(
                    "a sigma2 sweep defines the state; drop --state",
                ));
            }
            let noise =
                noise.ok_or_else(|| CliError::config("a sigma2 sweep needs --noise or --setup"))?;
            let optimal = optimal_bound(noise);
            for sigma2 in spec.values() {
                let s = marginal_entropies_with(&make_squeezed(sigma2)?, noise, disc)?;
                let mut row = Row::new();
                row.push("sigma2", sigma2);
                push_noise(&mut row, noise);
                row.push("s_x", s.s_x)
                    .push("s_p", s.s_p)
                    .push("collective", s.collective)
                    .push(
                        "closed_form",
                        squeezed_collective_entropy_closed_form(sigma2, noise)?,
                    )
                    .push("optimal", optimal.bound)
                    .push("sigma2_min", minimal_variance(noise));
                table.push(row);
            }
        }
        SweepParam::Lambda => {
            if lambda.is_some() {
                return Err(CliError::config(
                    "a lambda sweep defines lambda; drop --lambda",
                ));
            }
            let noise =
                noise.ok_or_else(|| CliError::config("a lambda sweep needs --noise or --setup"))?;
            let optimal = optimal_bound(noise);
            let measured = match state {
                Some(spec) => {
                    let system = spec.resolve(Some(noise))?;
                    let (sx, sp) = system_entropies(&system, disc)?;
                    let collective = marginal_entropies_with(&system, noise, disc)?.collective;
                    Some((sx, sp, collective))
                }
                None => None,
            };
            for l in spec.values() {
                let mut row = Row::new();
                row.push("lambda", l);
                push_noise(&mut row, noise);
                row.push("single_param", single_param_bound(noise, l)?)
                    .push("optimal", optimal.bound)
                    .push("optimal_lambda", optimal.lambda);
                if let Some((sx, sp, collective)) = measured {
                    let family = lieb_lower_bound(sx, sp, noise, &BoundParams::equal(l)?);
                    row.push("lambda_family", family)
                        .push("collective", collective);
                }
                table.push(row);
            }
        }
    }
    Ok(table.into())
}

fn bound_row(
    q: f64,
    state: Option<&StateSpec>,
    noise: &NoiseTerms,
    lambda: Option<f64>,
    disc: &Discretization,
) -> Result<Row, CliError> {
    let lambda = lambda.unwrap_or_else(|| optimal_bound(noise).lambda);
    let free = noise_bounds(noise, lambda)?;
    let mut row = Row::new();
    row.push("noise_product", q)
        .push("delta_x", noise.delta_x())
        .push("delta_p", noise.delta_p());
    if let Some(spec) = state {
        if let StateSpec::Squeezed(_) | StateSpec::SqueezedMin = spec {
            row.push(
                "sigma2",
                spec.squeezed_variance(Some(noise)).expect("squeezed spec"),
            );
        }
        let s = marginal_entropies_with(&spec.resolve(Some(noise))?, noise, disc)?;
        row.push("s_x", s.s_x)
            .push("s_p", s.s_p)
            .push("collective", s.collective);
    }
    row.push("omega", free.omega)
        .push("noise_bound", free.noise_bound)
        .push("balanced_state_free", free.balanced_state_free)
        .push("lambda", lambda)
        .push("single_param", free.single_param)
        .push("optimal", free.optimal)
        .push("optimal_lambda", free.optimal_lambda);
    Ok(row)
}

pub fn minimize(noise: &NoiseTerms, config: &OptimizerConfig) -> Result<Output, CliError> {
    let (result, exit) = match find_minimal_entropy_state(noise, config) {
        Ok(r) => (r, status::SUCCESS),
        Err(Error::NonConvergence { best }) => (*best, status::NON_CONVERGENCE),
        Err(e) => return Err(e.into()),
    };
    Ok(Output {
        table: single(minimize_row(noise, config, &result)),
        status: exit,
    })
}

fn minimize_row(noise: &NoiseTerms, config: &OptimizerConfig, r: &OptimizationResult) -> Row {
    let optimal = optimal_bound(noise).bound;
    let sigma2 = minimal_variance(noise);
    let mut row = Row::new();
    push_noise(&mut row, noise);
    row.push("n_max", config.n_max)
        .push("seed", config.seed)
        .push("restarts", config.restarts)
        .push("best_restart", r.restart)
        .push("converged", r.converged)
        .push("iterations", r.iterations)
        .push("entropy", r.entropy)
        .push("optimal", optimal)
        .push("gap", r.entropy - optimal)
        .push("sigma2_min", sigma2)
        // NaN when the squeezed state does not fit the Fock cutoff of the fidelity
        .push(
            "fidelity",
            fidelity_with_squeezed(&r.coeffs, sigma2).unwrap_or(f64::NAN),
        );
    for (n, c) in r.coeffs.iter().enumerate() {
        row.push(format!("c{n}_re"), c.re)
            .push(format!("c{n}_im"), c.im);
    }
    row
}
