//! Spectral initialization via matrix-free power iteration.
//!
//! The start point is the leading eigenvector of
//! `Y = (1/m) Σ y_i a_i a_i*`, scaled so that
//! `‖z0‖ = λ` with `λ² = n·Σ y_i / Σ ‖a_i‖²`. `Y` is never formed: one
//! application is `v ↦ adjoint_accumulate(y ⊙ forward(v)) / m`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measurement::{IntensityVector, MeasurementEnsemble};
use crate::rng::Rng;
use crate::signal::{inner, Signal};

/// Default power-iteration stopping tolerance (successive-iterate sine
/// distance) and iteration cap; the method has no prescribed stopping rule.
pub const DEFAULT_POWER_TOL: f64 = 1e-6;
pub const DEFAULT_POWER_MAX_ITERS: usize = 1000;

/// Result of spectral initialization.
#[derive(Debug, Clone)]
pub struct InitReport {
    /// Start iterate with `‖z0‖ = lambda`.
    pub z0: Signal,
    /// Norm scale `λ`.
    pub lambda: f64,
    /// `‖Y v - ρ v‖` at termination for the unit eigenvector estimate `v`.
    pub eig_residual: f64,
    pub iterations_used: usize,
    /// Seed of the random start vector.
    pub seed: u64,
}

/// Scale estimate `λ = sqrt(n · Σ y_i / Σ ‖a_i‖²)`.
pub fn init_scale(ensemble: &MeasurementEnsemble, y: &IntensityVector) -> Result<f64> {
    if y.len() != ensemble.m() {
        return Err(Error::LengthMismatch {
            expected: ensemble.m(),
            got: y.len(),
        });
    }
    let sum_y = y.sum();
    if !(sum_y > 0.0) {
        return Err(Error::DegenerateInput(
            "intensity sum is not positive; cannot estimate signal scale".into(),
        ));
    }
    let denom = ensemble.sum_row_norms_sqr();
    Ok((ensemble.n() as f64 * sum_y / denom).sqrt())
}

fn apply_y(
    ensemble: &MeasurementEnsemble,
    y: &IntensityVector,
    v: &Signal,
) -> Result<Vec<Complex64>> {
    let fwd = ensemble.forward(v)?;
    let m = ensemble.m() as f64;
    let coeffs: Vec<Complex64> = fwd
        .iter()
        .zip(y.values())
        .map(|(f, &yi)| f * (yi / m))
        .collect();
    ensemble.adjoint_accumulate(&coeffs)
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    norm
}

/// Power iteration for the leading eigenvector of `Y`, scaled to `λ`.
///
/// Starts from a seeded random unit vector (real for real-field ensembles)
/// and stops when the sine distance between successive normalized iterates
/// drops below `tol` or after `max_iters` applications.
pub fn spectral_init(
    ensemble: &MeasurementEnsemble,
    y: &IntensityVector,
    max_iters: usize,
    tol: f64,
    seed: u64,
) -> Result<InitReport> {
    if max_iters == 0 {
        return Err(Error::InvalidParameter("max_iters must be >= 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    let lambda = init_scale(ensemble, y)?;

    let n = ensemble.n();
    let field = ensemble.field_kind();
    let mut rng = Rng::seed_from_u64(seed);
    let mut v = Signal::random(n, field, &mut rng)?.values().to_vec();
    normalize(&mut v);

    let mut iterations_used = 0;
    for _ in 0..max_iters {
        let mut w = apply_y(ensemble, y, &Signal::new(v.clone(), field)?)?;
        iterations_used += 1;
        let norm = normalize(&mut w);
        if norm == 0.0 {
            return Err(Error::DegenerateInput(
                "power iteration hit the null space of Y".into(),
            ));
        }
        // sin^2 between unit vectors, invariant to global phase.
        let overlap = inner(&v, &w).norm();
        let sine = (1.0 - (overlap * overlap).min(1.0)).max(0.0).sqrt();
        v = w;
        if sine < tol {
            break;
        }
    }

    // One extra application for the Rayleigh quotient and residual.
    let yv = apply_y(ensemble, y, &Signal::new(v.clone(), field)?)?;
    let rho = inner(&v, &yv).re;
    let eig_residual = yv
        .iter()
        .zip(&v)
        .map(|(a, b)| (a - b * rho).norm_sqr())
        .sum::<f64>()
        .sqrt();

    let z0 = Signal::new(v.iter().map(|x| x * lambda).collect(), field)?;
    Ok(InitReport {
        z0,
        lambda,
        eig_residual,
        iterations_used,
        seed,
    })
}
