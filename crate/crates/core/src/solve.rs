//! Outer reweighted loop, inner gradient descent, and backtracking line
//! search. Plain and truncated flows are the same loop with different weight
//! modes: unit weights run as a single inner descent against the flat step
//! budget, truncation recomputes 0/1 weights each outer iteration.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::init::{spectral_init, DEFAULT_POWER_MAX_ITERS, DEFAULT_POWER_TOL};
use crate::measurement::{IntensityVector, MeasurementEnsemble};
use crate::metrics::nmse;
use crate::objective::{
    compute_truncation_weights, compute_weights_uniform, gradient_coeffs, objective_from_forward,
    WeightVector,
};
use crate::signal::Signal;

/// Inner stop when the gradient norm falls to double-precision noise.
const GRAD_NOISE_FLOOR: f64 = 1e-12;
/// Outer stop when successive outer iterates coincide to noise level.
const OUTER_FIXED_POINT_TOL: f64 = 1e-14;

/// Solver family; all three share initialization and descent machinery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    Rwf,
    Wf,
    TwfLite,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Rwf => "rwf",
            Method::Wf => "wf",
            Method::TwfLite => "twf-lite",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepsizeMode {
    /// Halving line search with the sufficient-decrease test.
    Backtracking,
    /// Constant stepsize; `fixed_mu` (default `0.2/n`).
    Fixed,
}

/// All solver tunables.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub method: Method,
    /// Maximum outer (reweighting) iterations.
    pub max_outer_iters: usize,
    /// Maximum gradient steps per outer iteration.
    pub max_inner_steps: usize,
    /// Total gradient-step cap for the unit/truncated modes, which do not
    /// bound work by the outer count.
    pub flat_iteration_budget: usize,
    /// Sufficient-decrease parameter in (0, 1).
    pub beta: f64,
    /// Weight parameter η, broadcast to every measurement.
    pub eta: f64,
    /// Truncation threshold; `None` selects `5 × mean residual magnitude`,
    /// recomputed each outer iteration.
    pub trunc_c: Option<f64>,
    pub stepsize_mode: StepsizeMode,
    /// Constant stepsize; `None` selects `0.2/n`.
    pub fixed_mu: Option<f64>,
    /// Success threshold on NMSE against the ground truth.
    pub success_nmse: f64,
    /// Line-search halving cap before declaring stagnation.
    pub max_halvings: usize,
}

impl SolverConfig {
    pub fn new(method: Method) -> Self {
        SolverConfig {
            method,
            max_outer_iters: 300,
            max_inner_steps: 500,
            flat_iteration_budget: 150_000,
            beta: 0.1,
            eta: 0.9,
            trunc_c: None,
            stepsize_mode: StepsizeMode::Backtracking,
            fixed_mu: None,
            success_nmse: 1e-5,
            max_halvings: 60,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must be in (0,1), got {}",
                self.beta
            )));
        }
        if self.max_outer_iters == 0 || self.max_inner_steps == 0 {
            return Err(Error::InvalidParameter(
                "iteration limits must be >= 1".into(),
            ));
        }
        if self.flat_iteration_budget == 0 {
            return Err(Error::InvalidParameter(
                "flat iteration budget must be >= 1".into(),
            ));
        }
        if !(self.success_nmse > 0.0) {
            return Err(Error::InvalidParameter(
                "success_nmse must be positive".into(),
            ));
        }
        if !(self.eta > 0.0) {
            return Err(Error::InvalidParameter("eta must be positive".into()));
        }
        if self.max_halvings == 0 {
            return Err(Error::InvalidParameter(
                "max_halvings must be >= 1".into(),
            ));
        }
        if let Some(mu) = self.fixed_mu {
            if !(mu > 0.0) {
                return Err(Error::InvalidParameter("fixed_mu must be positive".into()));
            }
        }
        if let Some(c) = self.trunc_c {
            if !(c > 0.0) || !c.is_finite() {
                return Err(Error::InvalidParameter(
                    "trunc_c must be positive and finite".into(),
                ));
            }
        }
        Ok(())
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig::new(Method::Rwf)
    }
}

/// One logged point of the optimization trace.
#[derive(Debug, Clone)]
pub struct TracePoint {
    /// Outer iteration the step belongs to (0 for the start point).
    pub outer: usize,
    /// Step index within the inner run (0 for the start point).
    pub inner: usize,
    /// Gradient steps taken since the solve began.
    pub cumulative_step: usize,
    pub objective: f64,
    /// NMSE against the ground truth, when one was supplied.
    pub nmse: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// NMSE fell below `success_nmse`.
    Success,
    /// Outer iteration limit reached.
    OuterBudgetExhausted,
    /// Total gradient-step budget reached.
    StepBudgetExhausted,
    /// Successive outer iterates coincide to noise level.
    OuterFixedPoint,
    /// Gradient norm fell to the noise floor.
    GradientVanished,
    /// Line search could not find decrease.
    LineSearchStagnated,
}

/// Full solve outcome with per-step trace.
#[derive(Debug, Clone)]
pub struct SolverReport {
    pub z_final: Signal,
    pub outer_iters: usize,
    pub total_grad_steps: usize,
    pub trace: Vec<TracePoint>,
    pub converged: bool,
    pub stop_reason: StopReason,
    /// Final NMSE when a ground truth was supplied.
    pub final_nmse: Option<f64>,
}

/// Why an inner descent returned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerStop {
    StepLimit,
    GradientVanished,
    LineSearchStagnated,
    Success,
}

/// Result of one inner gradient-descent run under frozen weights.
#[derive(Debug, Clone)]
pub struct InnerRun {
    pub z: Signal,
    pub trace: Vec<TracePoint>,
    pub steps: usize,
    pub stop: InnerStop,
}

/// Backtracking line search: the largest `τ = 2^{-k}` satisfying
/// `f(z - τ∇f) < f(z) - τβ‖∇f‖²`.
///
/// Errors with [`Error::ZeroGradient`] on a zero gradient and
/// [`Error::LineSearchStagnation`] when `max_halvings` is exceeded (callers
/// treat the latter as a normal inner-convergence stop).
pub fn backtrack_stepsize<F>(
    mut f_at: F,
    grad: &[Complex64],
    z: &Signal,
    beta: f64,
    max_halvings: usize,
) -> Result<f64>
where
    F: FnMut(&Signal) -> Result<f64>,
{
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "beta must be in (0,1), got {beta}"
        )));
    }
    let grad_norm_sq: f64 = grad.iter().map(|g| g.norm_sqr()).sum();
    if grad_norm_sq == 0.0 {
        return Err(Error::ZeroGradient);
    }
    let f_z = f_at(z)?;
    let mut tau = 1.0;
    for _ in 0..=max_halvings {
        let candidate = z.axpy(Complex64::new(-tau, 0.0), grad)?;
        if f_at(&candidate)? < f_z - tau * beta * grad_norm_sq {
            return Ok(tau);
        }
        tau *= 0.5;
    }
    Err(Error::LineSearchStagnation {
        halvings: max_halvings,
    })
}

/// Inner gradient descent on the frozen-weight objective.
///
/// Runs at most `max_steps` steps from `z_start`, stopping early when the
/// gradient vanishes, the line search stagnates, or (with a ground truth)
/// the NMSE drops below `cfg.success_nmse`. In backtracking mode the logged
/// objective strictly decreases across accepted steps.
///
/// `outer_index` and `prior_steps` only label the emitted trace points.
#[allow(clippy::too_many_arguments)]
pub fn inner_gd(
    ensemble: &MeasurementEnsemble,
    y: &IntensityVector,
    weights: &WeightVector,
    z_start: &Signal,
    cfg: &SolverConfig,
    ground_truth: Option<&Signal>,
    max_steps: usize,
    outer_index: usize,
    prior_steps: usize,
) -> Result<InnerRun> {
    cfg.validate()?;
    let mu = match cfg.stepsize_mode {
        StepsizeMode::Fixed => cfg.fixed_mu.unwrap_or(0.2 / ensemble.n() as f64),
        StepsizeMode::Backtracking => 0.0,
    };

    let mut z = z_start.clone();
    let mut fwd = ensemble.forward(&z)?;
    let mut f_z = objective_from_forward(&fwd, y, weights)?;
    let mut trace = Vec::new();
    let mut steps = 0;
    let mut stop = InnerStop::StepLimit;

    'outer: while steps < max_steps {
        let coeffs = gradient_coeffs(&fwd, y, weights)?;
        let grad = ensemble.adjoint_accumulate(&coeffs)?;
        let grad_norm_sq: f64 = grad.iter().map(|g| g.norm_sqr()).sum();
        if grad_norm_sq.sqrt() <= GRAD_NOISE_FLOOR {
            stop = InnerStop::GradientVanished;
            break;
        }

        // Candidate intensities are affine in τ: forward(z - τ g) =
        // forward(z) - τ forward(g), so line-search attempts cost O(m).
        let fwd_grad = ensemble.forward(&Signal::new(
            grad.clone(),
            crate::signal::FieldKind::Complex,
        )?)?;
        let eval_tau = |tau: f64| -> Result<f64> {
            let cand: Vec<Complex64> = fwd
                .iter()
                .zip(&fwd_grad)
                .map(|(a, b)| a - b * tau)
                .collect();
            objective_from_forward(&cand, y, weights)
        };

        let tau = match cfg.stepsize_mode {
            StepsizeMode::Fixed => mu,
            StepsizeMode::Backtracking => {
                let mut tau = 1.0;
                let mut accepted = None;
                for _ in 0..=cfg.max_halvings {
                    if eval_tau(tau)? < f_z - tau * cfg.beta * grad_norm_sq {
                        accepted = Some(tau);
                        break;
                    }
                    tau *= 0.5;
                }
                match accepted {
                    Some(t) => t,
                    None => {
                        stop = InnerStop::LineSearchStagnated;
                        break 'outer;
                    }
                }
            }
        };

        z = z.axpy(Complex64::new(-tau, 0.0), &grad)?;
        fwd = ensemble.forward(&z)?;
        f_z = objective_from_forward(&fwd, y, weights)?;
        steps += 1;

        let step_nmse = match ground_truth {
            Some(x) => Some(nmse(&z, x)?),
            None => None,
        };
        trace.push(TracePoint {
            outer: outer_index,
            inner: steps,
            cumulative_step: prior_steps + steps,
            objective: f_z,
            nmse: step_nmse,
        });
        if let Some(v) = step_nmse {
            if v < cfg.success_nmse {
                stop = InnerStop::Success;
                break;
            }
        }
    }

    Ok(InnerRun {
        z,
        trace,
        steps,
        stop,
    })
}

fn weights_for(
    method: Method,
    ensemble: &MeasurementEnsemble,
    y: &IntensityVector,
    z: &Signal,
    cfg: &SolverConfig,
) -> Result<WeightVector> {
    match method {
        Method::Rwf => compute_weights_uniform(ensemble, y, z, cfg.eta),
        Method::Wf => Ok(WeightVector::unit(ensemble.m())),
        Method::TwfLite => {
            let threshold = match cfg.trunc_c {
                Some(c) => c,
                None => {
                    let fwd = ensemble.forward(z)?;
                    let mean = fwd
                        .iter()
                        .zip(y.values())
                        .map(|(f, &yi)| (f.norm_sqr() - yi).abs())
                        .sum::<f64>()
                        / ensemble.m() as f64;
                    if mean > 0.0 {
                        5.0 * mean
                    } else {
                        1.0
                    }
                }
            };
            compute_truncation_weights(ensemble, y, z, threshold)
        }
    }
}

/// Full solve starting from spectral initialization (`seed` drives the
/// power-method start vector).
pub fn solve(
    ensemble: &MeasurementEnsemble,
    y: &IntensityVector,
    cfg: &SolverConfig,
    ground_truth: Option<&Signal>,
    seed: u64,
) -> Result<SolverReport> {
    cfg.validate()?;
    let init = spectral_init(ensemble, y, DEFAULT_POWER_MAX_ITERS, DEFAULT_POWER_TOL, seed)?;
    solve_from(ensemble, y, cfg, ground_truth, init.z0)
}

/// Full solve from an explicit start iterate (also the test hook for forcing
/// `z0 = x`).
pub fn solve_from(
    ensemble: &MeasurementEnsemble,
    y: &IntensityVector,
    cfg: &SolverConfig,
    ground_truth: Option<&Signal>,
    z0: Signal,
) -> Result<SolverReport> {
    cfg.validate()?;
    let m = ensemble.m();
    let mut z = z0;
    let mut trace = Vec::new();
    let mut total_steps = 0usize;
    let mut outer_iters = 0usize;

    let start_nmse = match ground_truth {
        Some(x) => Some(nmse(&z, x)?),
        None => None,
    };

    // Initial trace point under the first weight vector.
    let w0 = weights_for(cfg.method, ensemble, y, &z, cfg)?;
    let fwd0 = ensemble.forward(&z)?;
    trace.push(TracePoint {
        outer: 0,
        inner: 0,
        cumulative_step: 0,
        objective: objective_from_forward(&fwd0, y, &w0)?,
        nmse: start_nmse,
    });

    if let Some(v) = start_nmse {
        if v < cfg.success_nmse {
            return Ok(SolverReport {
                z_final: z,
                outer_iters: 0,
                total_grad_steps: 0,
                trace,
                converged: true,
                stop_reason: StopReason::Success,
                final_nmse: start_nmse,
            });
        }
    }

    let flat_budget = cfg.flat_iteration_budget;
    let mut stop_reason;

    loop {
        let k = outer_iters + 1;
        // Per-method outer bound: reweighted mode is capped by the outer
        // count, unit/truncated modes by the flat step budget.
        match cfg.method {
            Method::Rwf => {
                if k > cfg.max_outer_iters {
                    stop_reason = StopReason::OuterBudgetExhausted;
                    break;
                }
            }
            Method::Wf => {
                if k > 1 {
                    stop_reason = StopReason::StepBudgetExhausted;
                    break;
                }
            }
            Method::TwfLite => {
                if total_steps >= flat_budget {
                    stop_reason = StopReason::StepBudgetExhausted;
                    break;
                }
            }
        }

        let weights = weights_for(cfg.method, ensemble, y, &z, cfg)?;
        let max_steps = match cfg.method {
            Method::Rwf => cfg.max_inner_steps,
            Method::Wf => flat_budget,
            Method::TwfLite => cfg.max_inner_steps.min(flat_budget - total_steps),
        };

        let run = inner_gd(
            ensemble,
            y,
            &weights,
            &z,
            cfg,
            ground_truth,
            max_steps,
            k,
            total_steps,
        )?;
        outer_iters = k;
        total_steps += run.steps;
        trace.extend(run.trace);

        let moved_sq: f64 = run
            .z
            .values()
            .iter()
            .zip(z.values())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let z_prev_norm = z.norm();
        z = run.z;

        match run.stop {
            InnerStop::Success => {
                stop_reason = StopReason::Success;
                break;
            }
            InnerStop::GradientVanished if cfg.method == Method::Wf => {
                stop_reason = StopReason::GradientVanished;
                break;
            }
            _ => {}
        }

        if moved_sq.sqrt() < OUTER_FIXED_POINT_TOL * z_prev_norm.max(1.0) {
            stop_reason = StopReason::OuterFixedPoint;
            break;
        }
    }

    let final_nmse = match ground_truth {
        Some(x) => Some(nmse(&z, x)?),
        None => None,
    };
    let converged = match final_nmse {
        Some(v) => v < cfg.success_nmse,
        None => {
            // Documented limitation: without a ground truth, declare
            // recovery on gradient norm <= 1e-10 * m.
            let weights = weights_for(cfg.method, ensemble, y, &z, cfg)?;
            let fwd = ensemble.forward(&z)?;
            let coeffs = gradient_coeffs(&fwd, y, &weights)?;
            let grad = ensemble.adjoint_accumulate(&coeffs)?;
            let gnorm: f64 = grad.iter().map(|g| g.norm_sqr()).sum::<f64>().sqrt();
            gnorm <= 1e-10 * m as f64
        }
    };
    if converged && final_nmse.is_some() {
        stop_reason = StopReason::Success;
    }

    Ok(SolverReport {
        z_final: z,
        outer_iters,
        total_grad_steps: total_steps,
        trace,
        converged,
        stop_reason,
        final_nmse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::gen_gaussian_ensemble;
    use crate::metrics::dist;
    use crate::objective::{objective_value, wirtinger_gradient};
    use crate::rng::Rng;
    use crate::signal::FieldKind;

    fn scalar_instance() -> (MeasurementEnsemble, IntensityVector) {
        let e = MeasurementEnsemble::from_vectors(
            vec![vec![Complex64::new(1.0, 0.0)]],
            FieldKind::Real,
        )
        .unwrap();
        (e, IntensityVector::from_values(vec![1.0]))
    }

    #[test]
    fn backtracking_quadratic_stub_accepts_full_step() {
        // f(z) = ||z||^2/2, gradient z: f(0) = 0 < f(z) - 0.1||z||^2.
        let z = Signal::real(vec![3.0, -4.0]).unwrap();
        let grad = z.values().to_vec();
        let tau = backtrack_stepsize(
            |s: &Signal| Ok(0.5 * s.norm_sqr()),
            &grad,
            &z,
            0.1,
            60,
        )
        .unwrap();
        assert_eq!(tau, 1.0);
    }

    #[test]
    fn backtracking_halves_near_beta_one() {
        // Same stub at z = (1): tau = 1 fails for beta > 1/2, tau = 0.5
        // works while beta < 0.75.
        let z = Signal::real(vec![1.0]).unwrap();
        let grad = z.values().to_vec();
        let tau = backtrack_stepsize(
            |s: &Signal| Ok(0.5 * s.norm_sqr()),
            &grad,
            &z,
            0.6,
            60,
        )
        .unwrap();
        assert_eq!(tau, 0.5);
    }

    #[test]
    fn backtracking_rejects_zero_gradient() {
        let z = Signal::real(vec![1.0]).unwrap();
        let grad = vec![Complex64::default()];
        assert!(matches!(
            backtrack_stepsize(|s: &Signal| Ok(0.5 * s.norm_sqr()), &grad, &z, 0.1, 60),
            Err(Error::ZeroGradient)
        ));
    }

    #[test]
    fn backtracking_stagnates_on_hostile_objective() {
        // No tau can satisfy the test when f never decreases.
        let z = Signal::real(vec![1.0]).unwrap();
        let grad = vec![Complex64::new(1.0, 0.0)];
        let result = backtrack_stepsize(|_: &Signal| Ok(1.0), &grad, &z, 0.1, 10);
        assert!(matches!(result, Err(Error::LineSearchStagnation { halvings: 10 })));
    }

    #[test]
    fn inner_gd_at_optimum_takes_no_steps() {
        let (e, y) = scalar_instance();
        let x = Signal::real(vec![1.0]).unwrap();
        let cfg = SolverConfig::new(Method::Rwf);
        let w = WeightVector::unit(1);
        let run = inner_gd(&e, &y, &w, &x, &cfg, Some(&x), 100, 1, 0).unwrap();
        assert_eq!(run.steps, 0);
        assert_eq!(run.stop, InnerStop::GradientVanished);
        assert_eq!(run.z.values(), x.values());
    }

    #[test]
    fn inner_gd_scalar_descent() {
        // n = m = 1, a = 1, y = 1, start z = 2: objective decreases from
        // 4.5 toward 0 and |z| -> 1.
        let (e, y) = scalar_instance();
        let z0 = Signal::real(vec![2.0]).unwrap();
        let cfg = SolverConfig::new(Method::Wf);
        let w = WeightVector::unit(1);
        let run = inner_gd(&e, &y, &w, &z0, &cfg, None, 200, 1, 0).unwrap();
        let f0 = objective_value(&e, &y, &w, &z0).unwrap();
        assert!((f0 - 4.5).abs() < 1e-12);
        let mut last = f0;
        for point in &run.trace {
            assert!(point.objective < last, "objective must strictly decrease");
            last = point.objective;
        }
        assert!((run.z.values()[0].re.abs() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn solve_recovers_well_sampled_real_instance() {
        // m/n = 8: reweighted flow succeeds in about one outer iteration.
        let n = 64;
        let e = gen_gaussian_ensemble(n, 8 * n, FieldKind::Real, 501).unwrap();
        let mut rng = Rng::seed_from_u64(502);
        let x = Signal::random(n, FieldKind::Real, &mut rng).unwrap();
        let y = e.intensities(&x, None).unwrap();
        let cfg = SolverConfig::new(Method::Rwf);
        let report = solve(&e, &y, &cfg, Some(&x), 503).unwrap();
        assert!(report.converged, "stop: {:?}", report.stop_reason);
        assert!(report.final_nmse.unwrap() < 1e-5);
        assert!(report.outer_iters <= 3, "outer iters {}", report.outer_iters);

        // Plain flow also succeeds at this oversampling.
        let cfg = SolverConfig::new(Method::Wf);
        let report = solve(&e, &y, &cfg, Some(&x), 503).unwrap();
        assert!(report.converged, "WF stop: {:?}", report.stop_reason);
    }

    #[test]
    fn solve_from_ground_truth_succeeds_immediately() {
        let (e, y) = scalar_instance();
        let x = Signal::real(vec![1.0]).unwrap();
        let cfg = SolverConfig::new(Method::Rwf);
        let report = solve_from(&e, &y, &cfg, Some(&x), x.clone()).unwrap();
        assert!(report.converged);
        assert_eq!(report.total_grad_steps, 0);
        assert_eq!(report.stop_reason, StopReason::Success);
    }

    #[test]
    fn wf_trajectory_equals_unit_weight_inner_run() {
        // Plain flow is the same code path as a single unit-weight descent.
        let n = 16;
        let e = gen_gaussian_ensemble(n, 6 * n, FieldKind::Real, 601).unwrap();
        let mut rng = Rng::seed_from_u64(602);
        let x = Signal::random(n, FieldKind::Real, &mut rng).unwrap();
        let y = e.intensities(&x, None).unwrap();
        let mut cfg = SolverConfig::new(Method::Wf);
        cfg.flat_iteration_budget = 50;

        let init = spectral_init(&e, &y, 1000, 1e-6, 603).unwrap();
        let report = solve_from(&e, &y, &cfg, Some(&x), init.z0.clone()).unwrap();

        let w = WeightVector::unit(e.m());
        let run = inner_gd(&e, &y, &w, &init.z0, &cfg, Some(&x), 50, 1, 0).unwrap();
        assert_eq!(report.z_final.values(), run.z.values(), "bit-identical iterates");
        assert_eq!(report.total_grad_steps, run.steps);
    }

    #[test]
    fn weight_refresh_changes_objective() {
        // After an inner run stalls away from the optimum, recomputed
        // weights give a different gradient at the same point.
        let n = 8;
        let e = gen_gaussian_ensemble(n, 2 * n, FieldKind::Real, 701).unwrap();
        let mut rng = Rng::seed_from_u64(702);
        let x = Signal::random(n, FieldKind::Real, &mut rng).unwrap();
        let y = e.intensities(&x, None).unwrap();
        let z_prev = Signal::random(n, FieldKind::Real, &mut rng).unwrap();
        let cfg = SolverConfig::new(Method::Rwf);

        let stale = compute_weights_uniform(&e, &y, &z_prev, cfg.eta).unwrap();
        let run = inner_gd(&e, &y, &stale, &z_prev, &cfg, Some(&x), 150, 1, 0).unwrap();
        let z = &run.z;
        assert!(nmse(z, &x).unwrap() > 1e-5, "instance must not be solved yet");

        let fresh = compute_weights_uniform(&e, &y, z, cfg.eta).unwrap();
        let g_stale = wirtinger_gradient(&e, &y, &stale, z).unwrap();
        let g_fresh = wirtinger_gradient(&e, &y, &fresh, z).unwrap();
        let n_stale: f64 = g_stale.iter().map(|g| g.norm_sqr()).sum::<f64>().sqrt();
        let n_fresh: f64 = g_fresh.iter().map(|g| g.norm_sqr()).sum::<f64>().sqrt();
        assert!(
            (n_stale - n_fresh).abs() > 1e-12 * n_stale.max(n_fresh),
            "refreshed weights must change the gradient: {n_stale} vs {n_fresh}"
        );
    }

    #[test]
    fn budget_accounting() {
        let n = 16;
        let e = gen_gaussian_ensemble(n, 2 * n, FieldKind::Real, 801).unwrap();
        let mut rng = Rng::seed_from_u64(802);
        let x = Signal::random(n, FieldKind::Real, &mut rng).unwrap();
        let y = e.intensities(&x, None).unwrap();

        let mut cfg = SolverConfig::new(Method::Rwf);
        cfg.max_outer_iters = 5;
        cfg.max_inner_steps = 20;
        let report = solve(&e, &y, &cfg, Some(&x), 803).unwrap();
        assert!(report.total_grad_steps <= 5 * 20);

        let mut cfg = SolverConfig::new(Method::TwfLite);
        cfg.flat_iteration_budget = 73;
        cfg.max_inner_steps = 20;
        let report = solve(&e, &y, &cfg, Some(&x), 803).unwrap();
        assert!(report.total_grad_steps <= 73);

        let mut cfg = SolverConfig::new(Method::Wf);
        cfg.flat_iteration_budget = 41;
        let report = solve(&e, &y, &cfg, Some(&x), 803).unwrap();
        assert!(report.total_grad_steps <= 41);
    }

    #[test]
    fn phase_equivalent_ground_truth() {
        // Rotating the ground truth by a global phase leaves NMSE unchanged.
        let n = 16;
        let e = gen_gaussian_ensemble(n, 8 * n, FieldKind::Complex, 901).unwrap();
        let mut rng = Rng::seed_from_u64(902);
        let x = Signal::random(n, FieldKind::Complex, &mut rng).unwrap();
        let y = e.intensities(&x, None).unwrap();
        let cfg = SolverConfig::new(Method::Rwf);

        let report_a = solve(&e, &y, &cfg, Some(&x), 903).unwrap();
        let rotated = x.scale(Complex64::from_polar(1.0, 0.83));
        let report_b = solve(&e, &y, &cfg, Some(&rotated), 903).unwrap();
        let (a, b) = (report_a.final_nmse.unwrap(), report_b.final_nmse.unwrap());
        assert!((a - b).abs() <= 1e-12, "nmse {a} vs {b}");
    }

    #[test]
    fn fixed_step_geometric_convergence_inside_region() {
        // Once the iterate drops into E(z), the fixed-step trajectory obeys
        // dist(z_t, x) <= (1/8)(1 - mu/4)^{t-1} ||x||.
        let n = 64;
        let e = gen_gaussian_ensemble(n, 8 * n, FieldKind::Real, 1001).unwrap();
        let mut rng = Rng::seed_from_u64(1002);
        let raw = Signal::random(n, FieldKind::Real, &mut rng).unwrap();
        let x = raw.scale(Complex64::new(1.0 / raw.norm(), 0.0));
        let y = e.intensities(&x, None).unwrap();

        let mut cfg = SolverConfig::new(Method::Rwf);
        cfg.stepsize_mode = StepsizeMode::Fixed;
        let mu = 0.2 / n as f64;
        cfg.fixed_mu = Some(mu);
        let report = solve(&e, &y, &cfg, Some(&x), 1003).unwrap();
        assert!(report.converged);

        // Replay the trace and apply the bound from the first point in E(z).
        let mut entered = None;
        for (idx, point) in report.trace.iter().enumerate() {
            // NMSE < 5e-3 at n=64, ||x||=1 implies the worst residual is
            // far below 0.1; use the trace NMSE as the entry detector and
            // confirm region membership at the final iterate.
            if point.nmse.unwrap() < 5e-3 {
                entered = Some(idx);
                break;
            }
        }
        let entered = entered.expect("trajectory must approach x");
        for (t, point) in report.trace[entered..].iter().enumerate() {
            let bound = (1.0 / 8.0) * (1.0 - mu / 4.0).powi(t as i32);
            assert!(
                point.nmse.unwrap() <= bound,
                "step {t}: nmse {} above bound {bound}",
                point.nmse.unwrap()
            );
        }
        assert!(crate::metrics::in_region_e(&e, &y, &report.z_final).unwrap());
    }

    #[test]
    fn descent_is_monotone_within_inner_runs() {
        let n = 32;
        let e = gen_gaussian_ensemble(n, 3 * n, FieldKind::Real, 1101).unwrap();
        let mut rng = Rng::seed_from_u64(1102);
        let x = Signal::random(n, FieldKind::Real, &mut rng).unwrap();
        let y = e.intensities(&x, None).unwrap();
        let mut cfg = SolverConfig::new(Method::Rwf);
        cfg.max_outer_iters = 4;
        cfg.max_inner_steps = 50;
        let report = solve(&e, &y, &cfg, Some(&x), 1103).unwrap();

        let mut last: Option<(usize, f64)> = None;
        for point in &report.trace {
            if let Some((outer, f)) = last {
                if outer == point.outer {
                    assert!(
                        point.objective < f,
                        "objective rose within outer {} at step {}",
                        point.outer,
                        point.inner
                    );
                }
            }
            last = Some((point.outer, point.objective));
        }
    }

    #[test]
    fn invalid_config_rejected() {
        let mut cfg = SolverConfig::new(Method::Rwf);
        cfg.beta = 1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = SolverConfig::new(Method::Rwf);
        cfg.success_nmse = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = SolverConfig::new(Method::Rwf);
        cfg.max_outer_iters = 0;
        assert!(cfg.validate().is_err());
    }
}
