//! Phase-retrieval solvers based on reweighted Wirtinger flow.
//!
//! The library recovers a signal `x` from intensity measurements
//! `y_i = |⟨a_i, x⟩|²` by minimizing the weighted fourth-order objective
//! `f(z) = (1/2m) Σ ω_i (|⟨a_i, z⟩|² - y_i)²` with spectral initialization
//! followed by backtracking gradient descent, refreshing the weights
//! `ω_i = 1/(|residual_i| + η)` between descent rounds. Unit weights give
//! plain Wirtinger flow; hard 0/1 weights give a truncated baseline.
//!
//! Modules:
//! * [`measurement`] — Gaussian and coded-diffraction-pattern ensembles,
//!   forward/adjoint maps, intensities; [`fft`] — in-house radix-2 FFT.
//! * [`objective`] — weighted objective, Wirtinger gradient, weight updates.
//! * [`init`] — spectral initialization via matrix-free power iteration.
//! * [`solve`] — line search, inner descent, and the outer reweighted loop.
//! * [`metrics`] — phase-invariant distance, NMSE, region and
//!   regularity-condition diagnostics.
//! * [`rng`] — reproducible seeded randomness (xoshiro256**, Box–Muller).
//!
//! The single inner-product convention throughout is `⟨a, z⟩ = a* z`,
//! conjugate-linear in the first argument.
//!
//! # Example
//!
//! ```
//! use rwf_core::prelude::*;
//!
//! let mut rng = Rng::seed_from_u64(7);
//! let x = Signal::random(32, FieldKind::Real, &mut rng).unwrap();
//! let ensemble = gen_gaussian_ensemble(32, 8 * 32, FieldKind::Real, 11).unwrap();
//! let y = ensemble.intensities(&x, None).unwrap();
//!
//! let cfg = SolverConfig::new(Method::Rwf);
//! let report = solve(&ensemble, &y, &cfg, Some(&x), 13).unwrap();
//! assert!(report.converged);
//! assert!(report.final_nmse.unwrap() < 1e-5);
//! ```

pub mod error;
pub mod fft;
pub mod init;
pub mod measurement;
pub mod metrics;
pub mod objective;
pub mod rng;
pub mod signal;
pub mod solve;

/// Common imports for downstream users.
pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::fft::{fft, Direction};
    pub use crate::init::{init_scale, spectral_init, InitReport};
    pub use crate::measurement::{
        gen_cdp_ensemble, gen_gaussian_ensemble, IntensityVector, MeasurementEnsemble,
    };
    pub use crate::metrics::{dist, in_region_e, nmse, rc_probe, RcReport, TrialRecord};
    pub use crate::objective::{
        compute_truncation_weights, compute_weights, compute_weights_uniform, objective_value,
        wirtinger_gradient, WeightMode, WeightVector,
    };
    pub use crate::rng::{mix, Rng};
    pub use crate::signal::{inner, FieldKind, Signal};
    pub use crate::solve::{
        backtrack_stepsize, inner_gd, solve, solve_from, Method, SolverConfig, SolverReport,
        StepsizeMode, StopReason,
    };
}
