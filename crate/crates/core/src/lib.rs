//! Entropic uncertainty for simultaneous position and momentum measurements made with
//! two meter pointers.
//!
//! Units have `ħ = 1`. The vacuum has position and momentum variance `1/2`.
//!
//! * [`states`]: squeezed vacua, Fock superpositions and sampled wavefunctions.
//! * [`apparatus`]: coupling setups and the noise widths `δ_X`, `δ_P` they induce.
//! * [`distributions`]: inferred marginals, Wigner functions and joint densities.
//! * [`entropy`]: differential and collective entropies.
//! * [`bounds`]: lower bounds on the collective entropy.
//! * [`minimizer`]: numerical search for minimal-entropy states.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod apparatus;
pub mod bounds;
pub mod distributions;
pub mod entropy;
pub mod error;
pub mod grid;
pub mod minimizer;
pub mod states;

pub use apparatus::{noise_terms, MeasurementSetup, NoiseTerms};
pub use bounds::{optimal_bound, report, BoundParams, BoundReport, OptimalBound};
pub use entropy::{marginal_entropies, EntropyResult};
pub use error::{Error, Result};
pub use grid::{Grid, ProbabilityDensity};
pub use minimizer::{find_minimal_entropy_state, OptimizationResult, OptimizerConfig};
pub use states::{FockSuperposition, GridWavefunction, SqueezedVacuum, SystemState};
