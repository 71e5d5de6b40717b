// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod error;
mod spec;
mod table;
mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pointer_entropy::apparatus::noise_terms;
use pointer_entropy::distributions::Discretization;
use pointer_entropy::minimizer::OptimizerConfig;
use pointer_entropy::{Grid, MeasurementSetup, NoiseTerms};

use commands::Output;
use error::{status, CliError};
use spec::{parse_grid, parse_noise, parse_setup, parse_state, parse_sweep, StateSpec, SweepSpec};
use verify::{Suite, VerifyOptions};

/// Collective entropy and entropic uncertainty bounds for simultaneous position and
/// momentum measurements with two meter pointers.
#[derive(Debug, Parser)]
#[command(name = "pointer-entropy", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Seed for random restarts and randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct NoiseArgs {
    /// Physical setup `k1,k2,T,s1,s2` (couplings, interaction time, pointer variances).
    #[arg(long, value_parser = parse_setup, conflicts_with = "noise", value_name = "K1,K2,T,S1,S2")]
    setup: Option<MeasurementSetup>,

    /// Noise terms `dX,dP` given directly.
    #[arg(long, value_parser = parse_noise, value_name = "DX,DP")]
    noise: Option<NoiseTerms>,
}

impl NoiseArgs {
    fn get(&self) -> Option<NoiseTerms> {
        self.noise.or_else(|| self.setup.as_ref().map(noise_terms))
    }

    fn require(&self) -> Result<NoiseTerms, CliError> {
        self.get()
            .ok_or_else(|| CliError::config("one of --noise or --setup is required"))
    }
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Override both quadrature grids with `min:max:count`.
    #[arg(long, value_parser = parse_grid, value_name = "MIN:MAX:COUNT", allow_hyphen_values = true)]
    grid: Option<Grid>,
}

impl GridArgs {
    fn discretization(&self) -> Discretization {
        Discretization {
            position: self.grid,
            momentum: self.grid,
            ..Discretization::default()
        }
    }
}

const STATE_HELP: &str =
    "System state: vacuum, squeezed:<variance>, squeezed:min, or fock:<c0,c1,...>";

#[derive(Debug, Subcommand)]
enum Command {
    /// Marginal and collective entropies of the inferred distributions.
    Entropy {
        #[arg(long, value_parser = parse_state, help = STATE_HELP)]
        state: StateSpec,
        #[command(flatten)]
        noise: NoiseArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Lower bounds on the collective entropy, with the measured value if a state is given.
    Bounds {
        #[arg(long, value_parser = parse_state, help = STATE_HELP)]
        state: Option<StateSpec>,
        #[command(flatten)]
        noise: NoiseArgs,
        /// Weighting parameter; defaults to the optimal one.
        #[arg(long)]
        lambda: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Table of entropies and bounds over a range of one parameter.
    Sweep {
        /// `param:min:max:count` with param one of product, sigma2, lambda.
        #[arg(long, value_parser = parse_sweep, value_name = "PARAM:MIN:MAX:COUNT")]
        sweep: SweepSpec,
        #[arg(long, value_parser = parse_state, help = STATE_HELP)]
        state: Option<StateSpec>,
        #[command(flatten)]
        noise: NoiseArgs,
        /// Fixed weighting parameter for product sweeps; defaults to the optimal one per point.
        #[arg(long)]
        lambda: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Numerical search for the minimal-entropy state of a setup.
    Minimize {
        #[command(flatten)]
        noise: NoiseArgs,
        /// Highest Fock level of the search space.
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        /// Number of random initializations.
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        /// Iteration cap of each simplex run.
        #[arg(long, default_value_t = 5000)]
        max_iters: usize,
    },
    /// Run the built-in property suites.
    Verify {
        /// Run only this suite.
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        /// Extra noise terms checked by the bound-ordering suite.
        #[command(flatten)]
        noise: NoiseArgs,
    },
}

fn check_lambda(lambda: Option<f64>) -> Result<(), CliError> {
    match lambda {
        Some(l) if !(0.0..=1.0).contains(&l) => Err(CliError::config(format!(
            "--lambda must lie in [0, 1], got {l}"
        ))),
        _ => Ok(()),
    }
}

fn execute(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Entropy { state, noise, grid } => {
            commands::entropy(state, &noise.require()?, &grid.discretization())
        }
        Command::Bounds {
            state,
            noise,
            lambda,
            grid,
        } => {
            check_lambda(*lambda)?;
            commands::bounds(
                state.as_ref(),
                &noise.require()?,
                *lambda,
                &grid.discretization(),
            )
        }
        Command::Sweep {
            sweep,
            state,
            noise,
            lambda,
            grid,
        } => {
            check_lambda(*lambda)?;
            commands::sweep(
                sweep,
                state.as_ref(),
                noise.get().as_ref(),
                *lambda,
                &grid.discretization(),
            )
        }
        Command::Minimize {
            noise,
            n_max,
            restarts,
            max_iters,
        } => {
            let config = OptimizerConfig {
                n_max: *n_max,
                restarts: *restarts,
                max_iters: *max_iters,
                seed: cli.seed,
                ..OptimizerConfig::default()
            };
            commands::minimize(&noise.require()?, &config)
        }
        Command::Verify { suite, noise } => {
            let opts = VerifyOptions {
                seed: cli.seed,
                injected: noise.get(),
            };
            let (table, passed) = verify::run(*suite, &opts)?;
            Ok(Output {
                table,
                status: if passed {
                    status::SUCCESS
                } else {
                    status::CHECK_FAILED
                },
            })
        }
    }
}

fn write(cli: &Cli, output: &Output) -> Result<(), CliError> {
    let sink: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    let record = !matches!(cli.command, Command::Sweep { .. } | Command::Verify { .. });
    match cli.format {
        Format::Csv => output.table.write_csv(&mut sink)?,
        Format::Json => output.table.write_json(record, &mut sink)?,
    }
    sink.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(&cli).and_then(|output| {
        write(&cli, &output)?;
        Ok(output.status)
    });
    match result {
        Ok(code) => {
            if code == status::NON_CONVERGENCE {
                eprintln!("error: no restart converged; the best result was written");
            } else if code == status::CHECK_FAILED {
                eprintln!("error: at least one verification suite failed");
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_status())
        }
    }
}
