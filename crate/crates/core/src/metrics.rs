//! Phase-invariant distance, NMSE, success judgment, and empirical
//! regularity-condition diagnostics.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measurement::{IntensityVector, MeasurementEnsemble};
use crate::objective::{compute_weights_uniform, wirtinger_gradient};
use crate::signal::{inner, FieldKind, Signal};

/// Residual bound defining the region `E(z)` where weights lie in
/// `[1, 10/9]` and geometric convergence holds.
pub const REGION_E_BOUND: f64 = 0.1;

/// Optimal alignment phase `φ(z) = argmin_φ ‖z - x e^{jφ}‖`.
///
/// Complex field: `φ = arg(x* z)`. When both signals are real-kind the
/// ambiguity group is `{±1}`, so `φ` is restricted to `{0, π}`.
pub fn alignment_phase(z: &Signal, x: &Signal) -> Result<f64> {
    if z.len() != x.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: z.len(),
        });
    }
    let ip = inner(x.values(), z.values());
    if z.field_kind() == FieldKind::Real && x.field_kind() == FieldKind::Real {
        Ok(if ip.re >= 0.0 { 0.0 } else { std::f64::consts::PI })
    } else if ip.norm() == 0.0 {
        Ok(0.0)
    } else {
        Ok(ip.arg())
    }
}

/// Phase-ambiguity-invariant distance `min_φ ‖z - x e^{jφ}‖`.
///
/// Closed form via the optimal phase `φ* = arg(x* z)` (sign alignment for
/// real-kind pairs): the minimum satisfies
/// `dist² = ‖z‖² + ‖x‖² - 2|x* z|`, but the norm is evaluated directly at
/// `φ*` to stay accurate when `z ≈ x e^{jφ}`, where the expanded form
/// cancels catastrophically.
pub fn dist(z: &Signal, x: &Signal) -> Result<f64> {
    let phi = alignment_phase(z, x)?;
    let rot = Complex64::from_polar(1.0, phi);
    Ok(z
        .values()
        .iter()
        .zip(x.values())
        .map(|(zv, xv)| (zv - xv * rot).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Normalized error `dist(z, x) / ‖x‖`; success threshold in the
/// experiments is `1e-5`.
pub fn nmse(z: &Signal, x: &Signal) -> Result<f64> {
    let norm_x = x.norm();
    if norm_x == 0.0 {
        return Err(Error::DegenerateInput("ground truth has zero norm".into()));
    }
    Ok(dist(z, x)? / norm_x)
}

/// True iff `max_i ||⟨a_i, z⟩|² - y_i| < 0.1`.
pub fn in_region_e(
    ensemble: &MeasurementEnsemble,
    y: &IntensityVector,
    z: &Signal,
) -> Result<bool> {
    if y.len() != ensemble.m() {
        return Err(Error::LengthMismatch {
            expected: ensemble.m(),
            got: y.len(),
        });
    }
    let fwd = ensemble.forward(z)?;
    let max_res = fwd
        .iter()
        .zip(y.values())
        .map(|(f, &yi)| (f.norm_sqr() - yi).abs())
        .fold(0.0, f64::max);
    Ok(max_res < REGION_E_BOUND)
}

/// One regularity-condition probe at a point `z` near `x`.
///
/// `satisfied` is exactly `lhs_curvature >= dist_sq/alpha +
/// grad_norm_sq/beta_rc`; the local-curvature and local-smoothness sides are
/// reported separately with their shared fourth-moment term.
#[derive(Debug, Clone)]
pub struct RcReport {
    pub z_probe: Signal,
    /// Aligned difference `e^{-jφ(z)} z - x`.
    pub h: Vec<Complex64>,
    /// `Re(⟨∇f(z), z - x e^{jφ(z)}⟩)` with reweighted weights at `z`.
    pub lhs_curvature: f64,
    pub dist_sq: f64,
    pub grad_norm_sq: f64,
    /// `(1/m) Σ |a_i* h|⁴`.
    pub fourth_moment: f64,
    pub alpha: f64,
    pub beta_rc: f64,
    pub delta: f64,
    /// Regularity condition holds at this probe.
    pub satisfied: bool,
    /// `(1/α + (1+δ)/4)·dist² + (1/10m)·Σ|a_i* h|⁴`.
    pub curvature_rhs: f64,
    pub curvature_ok: bool,
    /// `β·((1+δ)/4·dist² + (1/10m)·Σ|a_i* h|⁴)`, compared against `‖∇f‖²`.
    pub smoothness_rhs: f64,
    pub smoothness_ok: bool,
    /// Probe lies inside `E(z)`; probes outside are evaluated but flagged.
    pub in_region: bool,
}

/// Evaluate the regularity condition and its curvature/smoothness sides at
/// `z`, with reweighted weights (η = 0.9) computed at the probe point.
pub fn rc_probe(
    ensemble: &MeasurementEnsemble,
    y: &IntensityVector,
    x: &Signal,
    z: &Signal,
    alpha: f64,
    beta_rc: f64,
    delta: f64,
) -> Result<RcReport> {
    if !(alpha > 0.0) || !(beta_rc > 0.0) {
        return Err(Error::InvalidParameter(
            "alpha and beta_rc must be positive".into(),
        ));
    }
    let m = ensemble.m() as f64;
    let phi = alignment_phase(z, x)?;
    let rot = Complex64::from_polar(1.0, phi);
    let h: Vec<Complex64> = z
        .values()
        .iter()
        .zip(x.values())
        .map(|(zv, xv)| zv * rot.conj() - xv)
        .collect();
    let dist_sq = h.iter().map(|v| v.norm_sqr()).sum::<f64>();

    let weights = compute_weights_uniform(ensemble, y, z, 0.9)?;
    let grad = wirtinger_gradient(ensemble, y, &weights, z)?;
    let grad_norm_sq: f64 = grad.iter().map(|g| g.norm_sqr()).sum();

    // direction z - x e^{jφ} = e^{jφ} h
    let lhs_curvature: f64 = grad
        .iter()
        .zip(&h)
        .map(|(g, hv)| (g.conj() * (rot * hv)).re)
        .sum();

    // |a_i* h| = |a_i* (z - x e^{jφ})|, so reuse the forward map on e^{jφ}h.
    let dir = Signal::new(h.iter().map(|v| v * rot).collect(), FieldKind::Complex)?;
    let fourth_moment = ensemble
        .forward(&dir)?
        .iter()
        .map(|f| {
            let p = f.norm_sqr();
            p * p
        })
        .sum::<f64>()
        / m;

    let rhs = dist_sq / alpha + grad_norm_sq / beta_rc;
    let curvature_rhs = (1.0 / alpha + (1.0 + delta) / 4.0) * dist_sq + fourth_moment / 10.0;
    let smoothness_rhs = beta_rc * ((1.0 + delta) / 4.0 * dist_sq + fourth_moment / 10.0);
    let in_region = in_region_e(ensemble, y, z)?;

    Ok(RcReport {
        z_probe: z.clone(),
        h,
        lhs_curvature,
        dist_sq,
        grad_norm_sq,
        fourth_moment,
        alpha,
        beta_rc,
        delta,
        satisfied: lhs_curvature >= rhs,
        curvature_rhs,
        curvature_ok: lhs_curvature >= curvature_rhs,
        smoothness_rhs,
        smoothness_ok: grad_norm_sq <= smoothness_rhs,
        in_region,
    })
}

/// One Monte-Carlo trial outcome.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub field_kind: FieldKind,
    pub method: &'static str,
    pub success: bool,
    pub final_nmse: f64,
    pub outer_iters: usize,
    pub total_grad_steps: usize,
    pub wall_time_seconds: f64,
}
