//! Experiment configuration: flat `key=value` files with section prefixes.
//!
//! Every key mirrors a configuration field (`solver.`-prefixed keys map onto
//! the solver block; `solver.T` and `solver.T1` are accepted aliases for the
//! iteration limits). Unknown keys are hard errors so typos cannot silently
//! change an experiment. Blank lines and lines starting with `#` are ignored.
//!
//! The `profile` key (or `--profile`) selects desk- or paper-scale defaults
//! for `n` and `trials_per_point`; explicit keys override the profile.

use std::path::PathBuf;

use rwf_core::signal::FieldKind;
use rwf_core::solve::{Method, SolverConfig, StepsizeMode};

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Sweep,
    Trace,
    Iters,
    CdpSweep,
    Image,
    Landscape,
    RcProbe,
}

impl Experiment {
    pub fn as_str(&self) -> &'static str {
        match self {
            Experiment::Sweep => "sweep",
            Experiment::Trace => "trace",
            Experiment::Iters => "iters",
            Experiment::CdpSweep => "cdp-sweep",
            Experiment::Image => "image",
            Experiment::Landscape => "landscape",
            Experiment::RcProbe => "rc-probe",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sweep" => Ok(Experiment::Sweep),
            "trace" => Ok(Experiment::Trace),
            "iters" => Ok(Experiment::Iters),
            "cdp-sweep" => Ok(Experiment::CdpSweep),
            "image" => Ok(Experiment::Image),
            "landscape" => Ok(Experiment::Landscape),
            "rc-probe" => Ok(Experiment::RcProbe),
            other => Err(BenchError::Config(format!("unknown experiment '{other}'"))),
        }
    }
}

/// Desk-scale defaults keep every experiment minutes-fast; the paper profile
/// restores the problem sizes the figures were produced at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Desk,
    Paper,
}

impl Profile {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Profile::Desk),
            "paper" => Ok(Profile::Paper),
            other => Err(BenchError::Config(format!("unknown profile '{other}'"))),
        }
    }

    fn default_n(&self) -> usize {
        match self {
            Profile::Desk => 64,
            Profile::Paper => 256,
        }
    }

    fn default_trials(&self) -> usize {
        match self {
            Profile::Desk => 20,
            Profile::Paper => 50,
        }
    }
}

/// Which neighborhood radius the regularity-condition probes use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsRegime {
    /// `ε = ‖x‖/8`.
    Gaussian,
    /// `ε = ‖x‖/(8√n)`.
    Cdp,
}

/// Fully-resolved experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub profile: Profile,
    pub n: usize,
    pub field_kind: FieldKind,
    pub mn_ratios: Vec<f64>,
    pub l_values: Vec<usize>,
    pub trials_per_point: usize,
    pub methods: Vec<Method>,
    pub base_seed: u64,
    pub output_path: Option<PathBuf>,
    pub input_path: Option<PathBuf>,
    pub image_output_path: Option<PathBuf>,
    pub image_l: usize,
    pub solver: SolverConfig,
    // trace
    pub trace_mn_ratio: f64,
    pub eta_sweep: Vec<f64>,
    // iters
    pub quota_cap_factor: usize,
    // landscape
    pub grid_points: usize,
    pub grid_min: f64,
    pub grid_max: f64,
    pub landscape_m: usize,
    pub landscape_x: Vec<f64>,
    pub landscape_perturbation: f64,
    // rc-probe
    pub rc_probes: usize,
    pub rc_m: Option<usize>,
    pub rc_alpha: f64,
    pub rc_beta: Option<f64>,
    pub rc_delta: f64,
    pub rc_eps_regime: EpsRegime,
}

impl ExperimentConfig {
    /// Profile-resolved defaults for an experiment.
    pub fn defaults(experiment: Experiment, profile: Profile) -> Self {
        ExperimentConfig {
            experiment,
            profile,
            n: profile.default_n(),
            field_kind: FieldKind::Real,
            mn_ratios: (2..=16).map(|k| k as f64 / 2.0).collect(),
            l_values: (2..=8).collect(),
            trials_per_point: profile.default_trials(),
            methods: match experiment {
                Experiment::CdpSweep => vec![Method::Rwf, Method::Wf],
                Experiment::Iters => vec![Method::Rwf],
                _ => vec![Method::Rwf, Method::Wf, Method::TwfLite],
            },
            base_seed: 1,
            output_path: None,
            input_path: None,
            image_output_path: None,
            image_l: 7,
            solver: SolverConfig::new(Method::Rwf),
            trace_mn_ratio: 2.5,
            eta_sweep: Vec::new(),
            quota_cap_factor: 20,
            grid_points: 101,
            grid_min: -1.0,
            grid_max: 1.0,
            landscape_m: 100,
            landscape_x: vec![0.5, 0.5],
            landscape_perturbation: 0.1,
            rc_probes: 100,
            rc_m: None,
            rc_alpha: 10.0,
            rc_beta: None,
            rc_delta: 0.01,
            rc_eps_regime: EpsRegime::Gaussian,
        }
    }

    /// The regularity-condition measurement count: explicit `rc_m` or
    /// `round(8 n ln n)`.
    pub fn rc_measurements(&self) -> usize {
        self.rc_m
            .unwrap_or(((8 * self.n) as f64 * (self.n as f64).ln()).round() as usize)
    }

    /// `β` default `700 + 4n` unless configured.
    pub fn rc_beta_value(&self) -> f64 {
        self.rc_beta.unwrap_or(700.0 + 4.0 * self.n as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(BenchError::Config("n must be >= 1".into()));
        }
        if self.trials_per_point == 0 {
            return Err(BenchError::Config("trials_per_point must be >= 1".into()));
        }
        if self.mn_ratios.iter().any(|&r| !(r > 0.0)) {
            return Err(BenchError::Config("mn_ratios must be positive".into()));
        }
        if self.l_values.iter().any(|&l| l == 0) {
            return Err(BenchError::Config("l_values must be >= 1".into()));
        }
        if self.methods.is_empty() {
            return Err(BenchError::Config("methods must not be empty".into()));
        }
        if self.grid_points < 2 {
            return Err(BenchError::Config("grid_points must be >= 2".into()));
        }
        if !(self.grid_min < self.grid_max) {
            return Err(BenchError::Config("grid_min must be < grid_max".into()));
        }
        if self.quota_cap_factor == 0 {
            return Err(BenchError::Config("quota_cap_factor must be >= 1".into()));
        }
        self.solver
            .validate()
            .map_err(|e| BenchError::Config(e.to_string()))?;
        match self.experiment {
            Experiment::CdpSweep | Experiment::Image => {
                if !self.n.is_power_of_two() && self.experiment == Experiment::CdpSweep {
                    return Err(BenchError::Config(format!(
                        "cdp-sweep requires power-of-two n, got {}",
                        self.n
                    )));
                }
            }
            Experiment::Landscape => {
                if self.landscape_x.len() != 2 {
                    return Err(BenchError::Config(
                        "landscape requires a length-2 ground truth (landscape_x)".into(),
                    ));
                }
                if self.landscape_m == 0 {
                    return Err(BenchError::Config("landscape_m must be >= 1".into()));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

fn parse_u64(key: &str, v: &str) -> Result<u64> {
    v.parse()
        .map_err(|_| BenchError::Config(format!("{key}: expected integer, got '{v}'")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.parse()
        .map_err(|_| BenchError::Config(format!("{key}: expected integer, got '{v}'")))
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse()
        .map_err(|_| BenchError::Config(format!("{key}: expected number, got '{v}'")))
}

fn parse_f64_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_f64(key, s))
        .collect()
}

fn parse_usize_list(key: &str, v: &str) -> Result<Vec<usize>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_usize(key, s))
        .collect()
}

fn parse_method(v: &str) -> Result<Method> {
    match v.to_ascii_lowercase().as_str() {
        "rwf" => Ok(Method::Rwf),
        "wf" => Ok(Method::Wf),
        "twf-lite" | "twf" => Ok(Method::TwfLite),
        other => Err(BenchError::Config(format!("unknown method '{other}'"))),
    }
}

fn parse_field_kind(v: &str) -> Result<FieldKind> {
    match v.to_ascii_lowercase().as_str() {
        "real" => Ok(FieldKind::Real),
        "complex" => Ok(FieldKind::Complex),
        other => Err(BenchError::Config(format!("unknown field_kind '{other}'"))),
    }
}

/// Parse config text. `experiment_override` comes from the CLI subcommand;
/// if the file also names an experiment the two must agree.
/// `profile_override` is the `--profile` flag.
pub fn parse_config(
    text: &str,
    experiment_override: Option<Experiment>,
    profile_override: Option<Profile>,
) -> Result<ExperimentConfig> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            BenchError::Config(format!("line {}: expected key=value, got '{line}'", lineno + 1))
        })?;
        pairs.push((lineno + 1, key.trim().to_string(), value.trim().to_string()));
    }

    // Resolve the experiment and profile first; they set the defaults the
    // remaining keys override.
    let mut experiment = experiment_override;
    let mut profile = profile_override;
    for (_, key, value) in &pairs {
        match key.as_str() {
            "experiment" => {
                let exp = Experiment::parse(value)?;
                if let Some(cli) = experiment_override {
                    if cli != exp {
                        return Err(BenchError::Config(format!(
                            "config experiment '{}' conflicts with subcommand '{}'",
                            exp.as_str(),
                            cli.as_str()
                        )));
                    }
                }
                experiment = Some(exp);
            }
            "profile" => {
                if profile_override.is_none() {
                    profile = Some(Profile::parse(value)?);
                }
            }
            _ => {}
        }
    }
    let experiment = experiment
        .ok_or_else(|| BenchError::Config("no experiment given (config or subcommand)".into()))?;
    let mut cfg = ExperimentConfig::defaults(experiment, profile.unwrap_or(Profile::Desk));

    for (lineno, key, value) in &pairs {
        let err = |msg: String| BenchError::Config(format!("line {lineno}: {msg}"));
        match key.as_str() {
            "experiment" | "profile" => {}
            "n" => cfg.n = parse_usize(key, value)?,
            "field_kind" => cfg.field_kind = parse_field_kind(value)?,
            "mn_ratios" => cfg.mn_ratios = parse_f64_list(key, value)?,
            "l_values" => cfg.l_values = parse_usize_list(key, value)?,
            "trials_per_point" => cfg.trials_per_point = parse_usize(key, value)?,
            "methods" => {
                cfg.methods = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(parse_method)
                    .collect::<Result<Vec<_>>>()?;
            }
            "base_seed" => cfg.base_seed = parse_u64(key, value)?,
            "output_path" => cfg.output_path = Some(PathBuf::from(value)),
            "input_path" => cfg.input_path = Some(PathBuf::from(value)),
            "image_output_path" => cfg.image_output_path = Some(PathBuf::from(value)),
            "image_l" => cfg.image_l = parse_usize(key, value)?,
            "trace_mn_ratio" => cfg.trace_mn_ratio = parse_f64(key, value)?,
            "eta_sweep" => cfg.eta_sweep = parse_f64_list(key, value)?,
            "quota_cap_factor" => cfg.quota_cap_factor = parse_usize(key, value)?,
            "grid_points" => cfg.grid_points = parse_usize(key, value)?,
            "grid_min" => cfg.grid_min = parse_f64(key, value)?,
            "grid_max" => cfg.grid_max = parse_f64(key, value)?,
            "landscape_m" => cfg.landscape_m = parse_usize(key, value)?,
            "landscape_x" => cfg.landscape_x = parse_f64_list(key, value)?,
            "landscape_perturbation" => cfg.landscape_perturbation = parse_f64(key, value)?,
            "rc_probes" => cfg.rc_probes = parse_usize(key, value)?,
            "rc_m" => cfg.rc_m = Some(parse_usize(key, value)?),
            "rc_alpha" => cfg.rc_alpha = parse_f64(key, value)?,
            "rc_beta" => cfg.rc_beta = Some(parse_f64(key, value)?),
            "rc_delta" => cfg.rc_delta = parse_f64(key, value)?,
            "rc_eps_regime" => {
                cfg.rc_eps_regime = match value.as_str() {
                    "gaussian" => EpsRegime::Gaussian,
                    "cdp" => EpsRegime::Cdp,
                    other => return Err(err(format!("unknown rc_eps_regime '{other}'"))),
                }
            }
            "solver.max_outer_iters" | "solver.T" => {
                cfg.solver.max_outer_iters = parse_usize(key, value)?
            }
            "solver.max_inner_steps" | "solver.T1" => {
                cfg.solver.max_inner_steps = parse_usize(key, value)?
            }
            "solver.flat_iteration_budget" => {
                cfg.solver.flat_iteration_budget = parse_usize(key, value)?
            }
            "solver.beta" => cfg.solver.beta = parse_f64(key, value)?,
            "solver.eta" => cfg.solver.eta = parse_f64(key, value)?,
            "solver.trunc_c" => cfg.solver.trunc_c = Some(parse_f64(key, value)?),
            "solver.stepsize_mode" => {
                cfg.solver.stepsize_mode = match value.as_str() {
                    "backtracking" => StepsizeMode::Backtracking,
                    "fixed" => StepsizeMode::Fixed,
                    other => return Err(err(format!("unknown stepsize_mode '{other}'"))),
                }
            }
            "solver.fixed_mu" => cfg.solver.fixed_mu = Some(parse_f64(key, value)?),
            "solver.success_nmse" => cfg.solver.success_nmse = parse_f64(key, value)?,
            "solver.max_halvings" => cfg.solver.max_halvings = parse_usize(key, value)?,
            other => {
                return Err(err(format!("unknown key '{other}'")));
            }
        }
    }

    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_sweep_config() {
        let cfg = parse_config(
            "experiment=sweep\nn=32\nmn_ratios=2,4,8\nmethods=rwf,wf\nbase_seed=9\n",
            None,
            None,
        )
        .unwrap();
        assert_eq!(cfg.experiment, Experiment::Sweep);
        assert_eq!(cfg.n, 32);
        assert_eq!(cfg.mn_ratios, vec![2.0, 4.0, 8.0]);
        assert_eq!(cfg.methods, vec![Method::Rwf, Method::Wf]);
        assert_eq!(cfg.base_seed, 9);
        // Desk defaults fill the rest.
        assert_eq!(cfg.trials_per_point, 20);
        assert_eq!(cfg.solver.max_outer_iters, 300);
    }

    #[test]
    fn unknown_key_is_hard_error() {
        let err = parse_config("experiment=sweep\nmn_ratio=2\n", None, None).unwrap_err();
        assert!(err.to_string().contains("unknown key"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn solver_aliases() {
        let cfg = parse_config(
            "experiment=sweep\nsolver.T=7\nsolver.T1=9\n",
            None,
            None,
        )
        .unwrap();
        assert_eq!(cfg.solver.max_outer_iters, 7);
        assert_eq!(cfg.solver.max_inner_steps, 9);
        let cfg = parse_config(
            "experiment=sweep\nsolver.max_outer_iters=3\nsolver.max_inner_steps=4\n",
            None,
            None,
        )
        .unwrap();
        assert_eq!(cfg.solver.max_outer_iters, 3);
        assert_eq!(cfg.solver.max_inner_steps, 4);
    }

    #[test]
    fn profile_sets_scale_and_explicit_keys_win() {
        let cfg = parse_config("experiment=sweep\nprofile=paper\n", None, None).unwrap();
        assert_eq!(cfg.n, 256);
        assert_eq!(cfg.trials_per_point, 50);
        let cfg = parse_config("experiment=sweep\nprofile=paper\nn=96\n", None, None).unwrap();
        assert_eq!(cfg.n, 96);
        // CLI profile beats the file's profile key.
        let cfg =
            parse_config("experiment=sweep\nprofile=paper\n", None, Some(Profile::Desk)).unwrap();
        assert_eq!(cfg.n, 64);
    }

    #[test]
    fn experiment_mismatch_rejected() {
        let err = parse_config("experiment=trace\n", Some(Experiment::Sweep), None).unwrap_err();
        assert!(err.to_string().contains("conflicts"), "{err}");
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let cfg = parse_config(
            "# recovery sweep\n\nexperiment=sweep\n  n=16\n",
            None,
            None,
        )
        .unwrap();
        assert_eq!(cfg.n, 16);
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(parse_config("experiment=sweep\nn=zero\n", None, None).is_err());
        assert!(parse_config("experiment=sweep\nmn_ratios=-1\n", None, None).is_err());
        assert!(parse_config("experiment=sweep\nsolver.beta=1.5\n", None, None).is_err());
        assert!(parse_config("experiment=landscape\nlandscape_x=1,2,3\n", None, None).is_err());
    }
}
