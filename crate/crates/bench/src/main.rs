//! Benchmark CLI.
//!
//! ```text
//! rwf-bench <sweep|trace|iters|cdp-sweep|image|landscape|rc-probe>
//!           --config <path> [--out <path>] [--jobs <k>]
//!           [--profile <desk|paper>] [--seed <u64>]
//! ```
//!
//! Exit codes: 0 success, 2 config error, 3 I/O error, 4 quota failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use rwf_bench::config::{parse_config, Experiment, ExperimentConfig, Profile};
use rwf_bench::error::{BenchError, Result};
use rwf_bench::experiments::{run_csv_experiment, run_image};
use rwf_bench::ppm::{read_ppm, write_ppm};

#[derive(Parser, Debug)]
#[command(
    name = "rwf-bench",
    about = "Phase-retrieval benchmark experiments (reweighted Wirtinger flow and baselines)"
)]
struct Cli {
    /// Experiment to run: sweep | trace | iters | cdp-sweep | image |
    /// landscape | rc-probe
    experiment: String,

    /// Experiment configuration file (key=value lines)
    #[arg(long)]
    config: PathBuf,

    /// Output CSV path (overrides the config's output_path)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker thread cap; results are byte-identical for any value
    #[arg(long, default_value_t = 0)]
    jobs: usize,

    /// Scale preset: desk (n=64, 20 trials) or paper (n=256, 50 trials)
    #[arg(long)]
    profile: Option<String>,

    /// Override the config's base_seed
    #[arg(long)]
    seed: Option<u64>,
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let experiment = Experiment::parse(&cli.experiment)?;
    let profile = cli
        .profile
        .as_deref()
        .map(Profile::parse)
        .transpose()?;
    let text = std::fs::read_to_string(&cli.config).map_err(|source| BenchError::Io {
        path: cli.config.display().to_string(),
        source,
    })?;
    let mut cfg = parse_config(&text, Some(experiment), profile)?;
    if let Some(seed) = cli.seed {
        cfg.base_seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_path = Some(out.clone());
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli)?;
    let out_path = cfg
        .output_path
        .clone()
        .ok_or_else(|| BenchError::Config("no output path (config output_path or --out)".into()))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| BenchError::Config(format!("cannot build worker pool: {e}")))?;

    match cfg.experiment {
        Experiment::Image => {
            let input_path = cfg
                .input_path
                .clone()
                .ok_or_else(|| BenchError::Config("image experiment needs input_path".into()))?;
            let bytes = std::fs::read(&input_path).map_err(|source| BenchError::Io {
                path: input_path.display().to_string(),
                source,
            })?;
            let input = read_ppm(&bytes, &input_path.display().to_string())?;
            let (csv, recovered) = pool.install(|| run_image(&cfg, &input))?;
            let ppm_path = cfg
                .image_output_path
                .clone()
                .unwrap_or_else(|| out_path.with_extension("ppm"));
            write_bytes(&out_path, csv.as_bytes())?;
            write_bytes(&ppm_path, &write_ppm(&recovered))?;
            eprintln!(
                "image: wrote {} and {}",
                out_path.display(),
                ppm_path.display()
            );
            Ok(())
        }
        _ => {
            let (csv, quota_met) = pool.install(|| run_csv_experiment(&cfg))?;
            write_bytes(&out_path, csv.as_bytes())?;
            eprintln!("{}: wrote {}", cfg.experiment.as_str(), out_path.display());
            if !quota_met {
                return Err(BenchError::Quota(format!(
                    "success quota not reached for some rows; see {}",
                    out_path.display()
                )));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
