//! The benchmark experiments. Each produces a CSV string (the image
//! experiment additionally produces the recovered picture); callers own all
//! file I/O. Output bytes are a pure function of the configuration — trials
//! carry independent derived seeds, so worker count never changes results —
//! with one exception: the sweep's `mean_wall_time` column reports measured
//! time and is excluded from determinism guarantees.

use num_complex::Complex64;
use rayon::prelude::*;

use rwf_core::measurement::gen_gaussian_ensemble;
use rwf_core::metrics::{alignment_phase, nmse, rc_probe, TrialRecord};
use rwf_core::objective::{compute_weights_uniform, objective_value, WeightVector};
use rwf_core::rng::{mix, Rng};
use rwf_core::signal::{FieldKind, Signal};
use rwf_core::solve::{solve, Method};

use crate::config::{EpsRegime, Experiment, ExperimentConfig};
use crate::error::{BenchError, Result};
use crate::ppm::PpmImage;
use crate::trial::{build_instance, fmt_f64, run_trial, trial_seed, TrialModel};

/// Stream labels for instance components shared by several experiments
/// (`1..3` are claimed by the per-trial derivation in [`crate::trial`]).
const LABEL_PROBE: u64 = 4;
const LABEL_PERTURBATION: u64 = 5;
const LABEL_TRACE_INSTANCE: u64 = 10;

fn sorted_methods(cfg: &ExperimentConfig) -> Vec<Method> {
    let mut methods = cfg.methods.clone();
    methods.sort_by_key(|m| m.as_str());
    methods.dedup();
    methods
}

fn sorted_ratios(cfg: &ExperimentConfig) -> Vec<f64> {
    let mut ratios = cfg.mn_ratios.clone();
    ratios.sort_by(|a, b| a.total_cmp(b));
    ratios.dedup();
    ratios
}

fn measurements_for_ratio(n: usize, ratio: f64) -> usize {
    ((ratio * n as f64).round() as usize).max(1)
}

struct PointSummary {
    trials: usize,
    successes: usize,
    mean_nmse: f64,
    mean_outer_iters: f64,
    mean_wall_time: f64,
}

fn summarize(records: &[TrialRecord]) -> PointSummary {
    let trials = records.len();
    let successes = records.iter().filter(|r| r.success).count();
    let inv = 1.0 / trials as f64;
    PointSummary {
        trials,
        successes,
        mean_nmse: records.iter().map(|r| r.final_nmse).sum::<f64>() * inv,
        mean_outer_iters: records.iter().map(|r| r.outer_iters as f64).sum::<f64>() * inv,
        mean_wall_time: records.iter().map(|r| r.wall_time_seconds).sum::<f64>() * inv,
    }
}

/// Recovery-rate sweep over m/n ratios (one row per method and ratio).
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<String> {
    let mut csv =
        String::from("method,mn_ratio,trials,successes,rate,mean_nmse,mean_iters,mean_wall_time\n");
    for method in sorted_methods(cfg) {
        for &ratio in &sorted_ratios(cfg) {
            let m = measurements_for_ratio(cfg.n, ratio);
            let model = TrialModel::Gaussian {
                m,
                field_kind: cfg.field_kind,
            };
            let records: Vec<TrialRecord> = (0..cfg.trials_per_point as u64)
                .into_par_iter()
                .map(|i| {
                    let seed = trial_seed(cfg.base_seed, method, ratio.to_bits(), i);
                    run_trial(cfg.n, model, method, &cfg.solver, seed).map(|(rec, _)| rec)
                })
                .collect::<Result<_>>()?;
            let s = summarize(&records);
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                method.as_str(),
                fmt_f64(ratio),
                s.trials,
                s.successes,
                fmt_f64(s.successes as f64 / s.trials as f64),
                fmt_f64(s.mean_nmse),
                fmt_f64(s.mean_outer_iters),
                fmt_f64(s.mean_wall_time),
            ));
        }
    }
    Ok(csv)
}

/// Per-step NMSE traces for every method on one shared instance, or an
/// η-sweep of the reweighted method when `eta_sweep` is set.
pub fn run_trace(cfg: &ExperimentConfig) -> Result<String> {
    let m = measurements_for_ratio(cfg.n, cfg.trace_mn_ratio);
    let model = TrialModel::Gaussian {
        m,
        field_kind: cfg.field_kind,
    };
    let instance_seed = mix(cfg.base_seed, &[LABEL_TRACE_INSTANCE]);
    let instance = build_instance(cfg.n, model, instance_seed)?;
    let y = instance.ensemble.intensities(&instance.x, None)?;

    // (label, method, eta override)
    let runs: Vec<(String, Method, Option<f64>)> = if cfg.eta_sweep.is_empty() {
        sorted_methods(cfg)
            .into_iter()
            .map(|mth| (mth.as_str().to_string(), mth, None))
            .collect()
    } else {
        cfg.eta_sweep
            .iter()
            .map(|&eta| (format!("rwf(eta={})", fmt_f64(eta)), Method::Rwf, Some(eta)))
            .collect()
    };

    let traces: Vec<(String, Vec<(usize, f64)>)> = runs
        .into_par_iter()
        .map(|(label, method, eta)| -> Result<_> {
            let mut solver = cfg.solver.clone();
            solver.method = method;
            if let Some(eta) = eta {
                solver.eta = eta;
            }
            let report = solve(
                &instance.ensemble,
                &y,
                &solver,
                Some(&instance.x),
                instance.init_seed,
            )?;
            let points = report
                .trace
                .iter()
                .map(|p| (p.cumulative_step, p.nmse.unwrap_or(f64::NAN)))
                .collect();
            Ok((label, points))
        })
        .collect::<Result<_>>()?;

    let mut csv = String::from("method,step,nmse\n");
    for (label, points) in traces {
        for (step, value) in points {
            csv.push_str(&format!("{label},{step},{}\n", fmt_f64(value)));
        }
    }
    Ok(csv)
}

/// Mean outer-iteration counts over a quota of successful trials per ratio.
///
/// Attempts run in seed order until the quota is met or the attempt cap
/// (`quota × quota_cap_factor`) is hit; unmet quotas flag the row and the
/// overall result.
pub fn run_iters(cfg: &ExperimentConfig) -> Result<(String, bool)> {
    let method = *cfg.methods.first().unwrap_or(&Method::Rwf);
    let quota = cfg.trials_per_point;
    let cap = quota * cfg.quota_cap_factor;
    let mut csv = String::from("mn_ratio,successes,attempts,mean_outer_iters,quota_met\n");
    let mut all_met = true;

    for &ratio in &sorted_ratios(cfg) {
        let m = measurements_for_ratio(cfg.n, ratio);
        let model = TrialModel::Gaussian {
            m,
            field_kind: cfg.field_kind,
        };
        let mut successes: Vec<usize> = Vec::with_capacity(quota);
        let mut attempts = 0u64;

        // Batched so attempts can run in parallel while the counted set —
        // everything up to the quota-th success in seed order — stays
        // deterministic.
        let batch = quota.max(8) as u64;
        'ratio: while (attempts as usize) < cap && successes.len() < quota {
            let end = (attempts + batch).min(cap as u64);
            let outcomes: Vec<TrialRecord> = (attempts..end)
                .into_par_iter()
                .map(|i| {
                    let seed = trial_seed(cfg.base_seed, method, ratio.to_bits(), i);
                    run_trial(cfg.n, model, method, &cfg.solver, seed).map(|(rec, _)| rec)
                })
                .collect::<Result<_>>()?;
            for rec in outcomes {
                attempts += 1;
                if rec.success {
                    successes.push(rec.outer_iters);
                    if successes.len() == quota {
                        break 'ratio;
                    }
                }
            }
        }

        let met = successes.len() == quota;
        all_met &= met;
        let mean = if successes.is_empty() {
            String::new()
        } else {
            fmt_f64(successes.iter().sum::<usize>() as f64 / successes.len() as f64)
        };
        csv.push_str(&format!(
            "{},{},{attempts},{mean},{}\n",
            fmt_f64(ratio),
            successes.len(),
            u8::from(met),
        ));
    }
    Ok((csv, all_met))
}

/// Recovery rates on the coded-diffraction model as the mask count varies.
pub fn run_cdp_sweep(cfg: &ExperimentConfig) -> Result<String> {
    let mut l_values = cfg.l_values.clone();
    l_values.sort_unstable();
    l_values.dedup();

    let mut csv = String::from("method,L,rate\n");
    for method in sorted_methods(cfg) {
        for &masks in &l_values {
            let model = TrialModel::Cdp { masks };
            let records: Vec<TrialRecord> = (0..cfg.trials_per_point as u64)
                .into_par_iter()
                .map(|i| {
                    let seed = trial_seed(cfg.base_seed, method, masks as u64, i);
                    run_trial(cfg.n, model, method, &cfg.solver, seed).map(|(rec, _)| rec)
                })
                .collect::<Result<_>>()?;
            let successes = records.iter().filter(|r| r.success).count();
            csv.push_str(&format!(
                "{},{masks},{}\n",
                method.as_str(),
                fmt_f64(successes as f64 / records.len() as f64),
            ));
        }
    }
    Ok(csv)
}

/// Recover an RGB picture channel-by-channel through the coded-diffraction
/// model. Channels share the ensemble and start seed, so equal channels
/// recover identically.
pub fn run_image(cfg: &ExperimentConfig, input: &PpmImage) -> Result<(String, PpmImage)> {
    let pixels = input.width * input.height;
    let n = pixels.next_power_of_two();
    let ensemble = rwf_core::measurement::gen_cdp_ensemble(
        n,
        cfg.image_l,
        mix(cfg.base_seed, &[2]),
    )?;
    let init_seed = mix(cfg.base_seed, &[3]);
    let method = *cfg.methods.first().unwrap_or(&Method::Rwf);
    let mut solver = cfg.solver.clone();
    solver.method = method;

    let channels: Vec<(f64, Vec<u8>)> = (0..3usize)
        .into_par_iter()
        .map(|c| -> Result<(f64, Vec<u8>)> {
            // Zero-pad the flattened channel up to the transform length; the
            // padding is stripped again below.
            let mut values: Vec<Complex64> = input
                .channel(c)
                .into_iter()
                .map(|v| Complex64::new(v, 0.0))
                .collect();
            values.resize(n, Complex64::default());
            let x = Signal::complex(values)?;
            let y = ensemble.intensities(&x, None)?;
            let report = solve(&ensemble, &y, &solver, Some(&x), init_seed)?;

            let error = nmse(&report.z_final, &x)?;
            let phi = alignment_phase(&report.z_final, &x)?;
            let rot = Complex64::from_polar(1.0, -phi);
            let bytes = report.z_final.values()[..pixels]
                .iter()
                .map(|v| (v * rot).re.round().clamp(0.0, 255.0) as u8)
                .collect();
            Ok((error, bytes))
        })
        .collect::<Result<_>>()?;

    let mut csv = String::from("channel,nmse\n");
    for (name, (error, _)) in ["r", "g", "b"].iter().zip(&channels) {
        csv.push_str(&format!("{name},{}\n", fmt_f64(*error)));
    }

    let mut data = vec![0u8; 3 * pixels];
    for (c, (_, bytes)) in channels.iter().enumerate() {
        for (i, &b) in bytes.iter().enumerate() {
            data[3 * i + c] = b;
        }
    }
    Ok((csv, PpmImage::new(input.width, input.height, data)?))
}

/// Objective landscape over a 2D grid: the reweighted objective (weights
/// frozen at a perturbation of the ground truth) next to the unweighted one.
pub fn run_landscape(cfg: &ExperimentConfig) -> Result<String> {
    let x = Signal::real(cfg.landscape_x.clone())
        .map_err(|e| BenchError::Config(e.to_string()))?;
    let n = x.len();
    let ensemble = gen_gaussian_ensemble(n, cfg.landscape_m, FieldKind::Real, mix(cfg.base_seed, &[2]))?;
    let y = ensemble.intensities(&x, None)?;

    // Weights are computed once, at a perturbed copy of x, and frozen.
    let mut rng = Rng::seed_from_u64(mix(cfg.base_seed, &[LABEL_PERTURBATION]));
    let noise = Signal::random(n, FieldKind::Real, &mut rng)?;
    let z0 = x.axpy(
        Complex64::new(cfg.landscape_perturbation / noise.norm(), 0.0),
        noise.values(),
    )?;
    let weighted = compute_weights_uniform(&ensemble, &y, &z0, cfg.solver.eta)?;
    let unit = WeightVector::unit(ensemble.m());

    let grid: Vec<f64> = (0..cfg.grid_points)
        .map(|i| {
            cfg.grid_min
                + (cfg.grid_max - cfg.grid_min) * i as f64 / (cfg.grid_points - 1) as f64
        })
        .collect();

    let mut csv = String::from("z1,z2,f_weighted,f_unweighted\n");
    for &z1 in &grid {
        for &z2 in &grid {
            let z = Signal::real(vec![z1, z2]).map_err(|e| BenchError::Config(e.to_string()))?;
            let fw = objective_value(&ensemble, &y, &weighted, &z)?;
            let fu = objective_value(&ensemble, &y, &unit, &z)?;
            csv.push_str(&format!(
                "{},{},{},{}\n",
                fmt_f64(z1),
                fmt_f64(z2),
                fmt_f64(fw),
                fmt_f64(fu)
            ));
        }
    }
    Ok(csv)
}

/// Regularity-condition probes at random points near the ground truth.
pub fn run_rc_probe(cfg: &ExperimentConfig) -> Result<String> {
    let n = cfg.n;
    let m = cfg.rc_measurements();
    let field = cfg.field_kind;
    let mut signal_rng = Rng::seed_from_u64(mix(cfg.base_seed, &[1]));
    let x = Signal::random(n, field, &mut signal_rng)?;
    let ensemble = gen_gaussian_ensemble(n, m, field, mix(cfg.base_seed, &[2]))?;
    let y = ensemble.intensities(&x, None)?;

    let eps = match cfg.rc_eps_regime {
        EpsRegime::Gaussian => x.norm() / 8.0,
        EpsRegime::Cdp => x.norm() / (8.0 * (n as f64).sqrt()),
    };
    let alpha = cfg.rc_alpha;
    let beta = cfg.rc_beta_value();

    let rows: Vec<(usize, f64, f64, f64, bool)> = (0..cfg.rc_probes)
        .into_par_iter()
        .map(|p| -> Result<_> {
            let mut rng = Rng::seed_from_u64(mix(cfg.base_seed, &[LABEL_PROBE, p as u64]));
            let raw = Signal::random(n, field, &mut rng)?;
            let s = eps * (1.0 - rng.next_f64()); // uniform in (0, eps]
            let z = x.axpy(Complex64::new(s / raw.norm(), 0.0), raw.values())?;
            let report = rc_probe(&ensemble, &y, &x, &z, alpha, beta, cfg.rc_delta)?;
            let rhs = report.dist_sq / alpha + report.grad_norm_sq / beta;
            Ok((p, s, report.lhs_curvature, rhs, report.satisfied))
        })
        .collect::<Result<_>>()?;

    let satisfied = rows.iter().filter(|r| r.4).count();
    let fraction = satisfied as f64 / rows.len().max(1) as f64;

    let mut csv = String::from("probe,s,lhs,rhs,satisfied,fraction\n");
    for (p, s, lhs, rhs, ok) in rows {
        csv.push_str(&format!(
            "{p},{},{},{},{},\n",
            fmt_f64(s),
            fmt_f64(lhs),
            fmt_f64(rhs),
            u8::from(ok)
        ));
    }
    csv.push_str(&format!("summary,,,,,{}\n", fmt_f64(fraction)));
    Ok(csv)
}

/// Dispatch an experiment to its runner. The image experiment is handled by
/// the caller (it needs file I/O for its input and two outputs).
pub fn run_csv_experiment(cfg: &ExperimentConfig) -> Result<(String, bool)> {
    match cfg.experiment {
        Experiment::Sweep => Ok((run_sweep(cfg)?, true)),
        Experiment::Trace => Ok((run_trace(cfg)?, true)),
        Experiment::Iters => run_iters(cfg),
        Experiment::CdpSweep => Ok((run_cdp_sweep(cfg)?, true)),
        Experiment::Landscape => Ok((run_landscape(cfg)?, true)),
        Experiment::RcProbe => Ok((run_rc_probe(cfg)?, true)),
        Experiment::Image => Err(BenchError::Config(
            "image experiment requires input handling; use the image runner".into(),
        )),
    }
}
