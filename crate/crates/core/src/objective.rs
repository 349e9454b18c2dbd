//! Weighted intensity objective, its Wirtinger gradient, and weight updates.
//!
//! The objective is `f(z) = (1/2m) Σ ω_i (|⟨a_i, z⟩|² - y_i)²` with gradient
//! `∇f(z) = (1/m) Σ ω_i (|⟨a_i, z⟩|² - y_i) a_i a_i* z`. The Wirtinger
//! convention means the directional derivative of `f` along `v` equals
//! `2·Re(⟨∇f(z), v⟩)`.
//!
//! Weights are recomputed once per outer iteration from the previous iterate
//! and held fixed through the inner descent; reweighted mode uses
//! `ω_i = 1 / (||⟨a_i, z⟩|² - y_i| + η_i)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measurement::{IntensityVector, MeasurementEnsemble};
use crate::signal::Signal;

/// How the per-measurement weights were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    /// Adaptive weights `1/(|residual| + η)`.
    Reweighted,
    /// All weights exactly 1 (plain Wirtinger flow).
    Unit,
    /// Hard 0/1 truncation on the residual magnitude.
    Truncated,
}

/// Per-measurement weights `ω_i` with the parameters that produced them.
#[derive(Debug, Clone)]
pub struct WeightVector {
    omegas: Vec<f64>,
    etas: Vec<f64>,
    mode: WeightMode,
}

impl WeightVector {
    /// Unit weights: `ω_i = 1` exactly.
    pub fn unit(m: usize) -> Self {
        WeightVector {
            omegas: vec![1.0; m],
            etas: Vec::new(),
            mode: WeightMode::Unit,
        }
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn etas(&self) -> &[f64] {
        &self.etas
    }

    pub fn mode(&self) -> WeightMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }
}

fn residuals(
    ensemble: &MeasurementEnsemble,
    y: &IntensityVector,
    z: &Signal,
) -> Result<Vec<f64>> {
    if y.len() != ensemble.m() {
        return Err(Error::LengthMismatch {
            expected: ensemble.m(),
            got: y.len(),
        });
    }
    let fwd = ensemble.forward(z)?;
    Ok(fwd
        .iter()
        .zip(y.values())
        .map(|(f, &yi)| f.norm_sqr() - yi)
        .collect())
}

/// Adaptive weights `ω_i = 1 / (||⟨a_i, z_prev⟩|² - y_i| + η_i)`.
pub fn compute_weights(
    ensemble: &MeasurementEnsemble,
    y: &IntensityVector,
    z_prev: &Signal,
    etas: &[f64],
) -> Result<WeightVector> {
    if etas.len() != ensemble.m() {
        return Err(Error::LengthMismatch {
            expected: ensemble.m(),
            got: etas.len(),
        });
    }
    if let Some(bad) = etas.iter().find(|&&e| !(e > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "eta must be positive, got {bad}"
        )));
    }
    let omegas = residuals(ensemble, y, z_prev)?
        .iter()
        .zip(etas)
        .map(|(r, eta)| 1.0 / (r.abs() + eta))
        .collect();
    Ok(WeightVector {
        omegas,
        etas: etas.to_vec(),
        mode: WeightMode::Reweighted,
    })
}

/// Adaptive weights with a single η broadcast to every measurement.
pub fn compute_weights_uniform(
    ensemble: &MeasurementEnsemble,
    y: &IntensityVector,
    z_prev: &Signal,
    eta: f64,
) -> Result<WeightVector> {
    compute_weights(ensemble, y, z_prev, &vec![eta; ensemble.m()])
}

/// Truncation weights: `ω_i = 0` when `||⟨a_i, z_prev⟩|² - y_i| >= C`, else 1.
pub fn compute_truncation_weights(
    ensemble: &MeasurementEnsemble,
    y: &IntensityVector,
    z_prev: &Signal,
    threshold: f64,
) -> Result<WeightVector> {
    if !(threshold > 0.0) || !threshold.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "truncation threshold must be positive and finite, got {threshold}"
        )));
    }
    let omegas = residuals(ensemble, y, z_prev)?
        .iter()
        .map(|r| if r.abs() >= threshold { 0.0 } else { 1.0 })
        .collect();
    Ok(WeightVector {
        omegas,
        etas: Vec::new(),
        mode: WeightMode::Truncated,
    })
}

/// Objective value `(1/2m) Σ ω_i (|⟨a_i, z⟩|² - y_i)²`.
pub fn objective_value(
    ensemble: &MeasurementEnsemble,
    y: &IntensityVector,
    weights: &WeightVector,
    z: &Signal,
) -> Result<f64> {
    if weights.len() != ensemble.m() {
        return Err(Error::LengthMismatch {
            expected: ensemble.m(),
            got: weights.len(),
        });
    }
    let fwd = ensemble.forward(z)?;
    objective_from_forward(&fwd, y, weights)
}

/// Objective value from precomputed measurement values `f_i = ⟨a_i, z⟩`.
///
/// The forward map is linear in `z`, so line searches can evaluate
/// candidates from `forward(z) - τ·forward(∇f)` without touching the
/// ensemble again.
pub fn objective_from_forward(
    fwd: &[Complex64],
    y: &IntensityVector,
    weights: &WeightVector,
) -> Result<f64> {
    if fwd.len() != y.len() || weights.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: y.len(),
            got: fwd.len().min(weights.len()),
        });
    }
    let m = y.len() as f64;
    Ok(fwd
        .iter()
        .zip(y.values())
        .zip(weights.omegas())
        .map(|((f, &yi), &w)| {
            let r = f.norm_sqr() - yi;
            w * r * r
        })
        .sum::<f64>()
        / (2.0 * m))
}

/// Adjoint coefficients `(1/m) ω_i (|f_i|² - y_i) f_i` of the Wirtinger
/// gradient, from precomputed measurement values.
pub fn gradient_coeffs(
    fwd: &[Complex64],
    y: &IntensityVector,
    weights: &WeightVector,
) -> Result<Vec<Complex64>> {
    if fwd.len() != y.len() || weights.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: y.len(),
            got: fwd.len().min(weights.len()),
        });
    }
    let m = y.len() as f64;
    Ok(fwd
        .iter()
        .zip(y.values())
        .zip(weights.omegas())
        .map(|((f, &yi), &w)| f * (w * (f.norm_sqr() - yi) / m))
        .collect())
}

/// Wirtinger gradient `(1/m) Σ ω_i (|⟨a_i, z⟩|² - y_i) a_i a_i* z`.
///
/// Computed as an adjoint accumulation with coefficients
/// `(1/m) ω_i (|f_i|² - y_i) f_i` where `f_i = ⟨a_i, z⟩`, so Gaussian and
/// CDP ensembles share one code path.
pub fn wirtinger_gradient(
    ensemble: &MeasurementEnsemble,
    y: &IntensityVector,
    weights: &WeightVector,
    z: &Signal,
) -> Result<Vec<Complex64>> {
    if weights.len() != ensemble.m() || y.len() != ensemble.m() {
        return Err(Error::LengthMismatch {
            expected: ensemble.m(),
            got: weights.len().min(y.len()),
        });
    }
    let fwd = ensemble.forward(z)?;
    let coeffs = gradient_coeffs(&fwd, y, weights)?;
    ensemble.adjoint_accumulate(&coeffs)
}
