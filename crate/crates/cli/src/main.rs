use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fbnewton::forward::ScatterRecord;
use fbnewton::harness::experiment::{
    disk_oracle_error, reconstruction_error, run_forward, run_reconstruct, write_run_artifacts,
};
use fbnewton::harness::sweep::{run_sweep, write_sweep_csv};
use fbnewton::harness::verify::run_battery;
use fbnewton::harness::{ExperimentConfig, ShapeSpec};
use fbnewton::newton::Termination;
use fbnewton::Error;

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_VERIFICATION: u8 = 4;

/// Oracle tolerance for `forward --verify-oracle`.
const ORACLE_TOLERANCE: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "fbnewton", version, about = "Elastic obstacle reconstruction experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Directory for every output file.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate scattered data and write record.json.
    Forward {
        /// Experiment TOML.
        #[arg(long)]
        config: PathBuf,
        /// Override the config seed used for the noise draw.
        #[arg(long)]
        seed: Option<u64>,
        /// Compare disk data with the analytic series.
        #[arg(long)]
        verify_oracle: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Reconstruct the boundary from a record.
    Reconstruct {
        /// record.json written by `forward`.
        #[arg(long)]
        record: PathBuf,
        /// Experiment TOML.
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run the inequality, decay and noise-scaling battery.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Reconstruct every aperture x delta x seed cell of the config grid.
    Sweep {
        /// Experiment TOML.
        #[arg(long)]
        config: PathBuf,
        /// Replace the grid seeds with this single seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Validation(String),
    Numerical(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } | Error::Io(_) | Error::Json(_) | Error::Csv(_) | Error::Toml(_) => {
                Failure::Validation(e.to_string())
            }
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

fn load_config(path: &Path) -> Result<ExperimentConfig, Failure> {
    ExperimentConfig::load(path).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

fn forward(config: &Path, seed: Option<u64>, verify_oracle: bool, out: &Path) -> Result<(), Failure> {
    let mut cfg = load_config(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if verify_oracle && !matches!(cfg.shape, ShapeSpec::Disk { .. }) {
        return Err(Failure::Validation(format!(
            "--verify-oracle needs a disk shape, config has `{}`",
            cfg.shape.name()
        )));
    }
    let fwd = run_forward(&cfg)?;
    std::fs::create_dir_all(out)?;
    let path = out.join("record.json");
    fwd.record.save(&path)?;
    let rel = &fwd.report.relative_residuals;
    let worst = rel.iter().copied().fold(0.0, f64::max);
    let mean = rel.iter().sum::<f64>() / rel.len() as f64;
    println!(
        "wrote {} ({} sources x {} receivers, delta = {}, seed = {})",
        path.display(),
        fwd.record.sources.len(),
        fwd.record.receivers.len(),
        cfg.noise.delta,
        cfg.seed
    );
    println!("MFS relative boundary residual: max {worst:.3e}, mean {mean:.3e}, warnings {}", fwd.report.warnings);
    if verify_oracle {
        let err = disk_oracle_error(&cfg.shape, &fwd.clean)?.unwrap_or(f64::NAN);
        println!("oracle max relative error: {err:.3e} (tolerance {ORACLE_TOLERANCE:e})");
        if err.is_nan() || err > ORACLE_TOLERANCE {
            return Err(Failure::Verification(format!("oracle error {err:e} exceeds {ORACLE_TOLERANCE:e}")));
        }
    }
    Ok(())
}

fn reconstruct(record: &Path, config: &Path, out: &Path) -> Result<(), Failure> {
    let cfg = load_config(config)?;
    let rec = ScatterRecord::load(record).map_err(|e| Failure::Validation(format!("{}: {e}", record.display())))?;
    let run = run_reconstruct(&cfg, &rec)?;
    let paths = write_run_artifacts(out, &cfg, &rec, &run)?;
    for p in &paths {
        println!("wrote {}", p.display());
    }
    let err = reconstruction_error(&cfg, &run);
    println!(
        "termination {:?} after {} iterations (N = {}, R = {}), last e_M {:.3e}",
        run.termination,
        run.iterations(),
        run.truncation_order,
        run.expansion_radius,
        run.updates.last().copied().unwrap_or(f64::NAN)
    );
    if !rec.aperture.is_full() {
        println!("partial aperture [{}, {})", rec.aperture.lo, rec.aperture.hi);
    }
    println!("boundary error vs {} ({}): {:.4e}", cfg.shape.name(), err.metric.name(), err.value);
    match run.termination {
        Termination::Converged | Termination::MaxIterations => Ok(()),
        Termination::Diverged | Termination::ModalFailure => Err(Failure::Numerical(format!(
            "reconstruction {:?}: {}",
            run.termination,
            run.message.unwrap_or_default()
        ))),
    }
}

fn verify(out: &Path) -> Result<(), Failure> {
    let report = run_battery()?;
    std::fs::create_dir_all(out)?;
    report.write_csv(File::create(out.join("verify.csv"))?)?;
    let text = report.to_text();
    std::fs::write(out.join("verify.txt"), &text)?;
    print!("{text}");
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{} checks failed", report.failures().count())))
    }
}

fn sweep(config: &Path, seed: Option<u64>, workers: usize, out: &Path) -> Result<(), Failure> {
    let mut cfg = load_config(config)?;
    if let Some(s) = seed {
        cfg.sweep.seeds = vec![s];
    }
    if workers == 0 {
        return Err(Failure::Validation("--workers must be at least 1".into()));
    }
    let rows = run_sweep(&cfg, workers)?;
    std::fs::create_dir_all(out)?;
    let path = out.join("sweep.csv");
    write_sweep_csv(File::create(&path)?, &rows)?;
    let failed = rows.iter().filter(|r| r.termination == "error").count();
    println!("wrote {} ({} cells, {failed} failed)", path.display(), rows.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Forward { config, seed, verify_oracle, common } => forward(config, *seed, *verify_oracle, &common.out_dir),
        Command::Reconstruct { record, config, common } => reconstruct(record, config, &common.out_dir),
        Command::Verify { common } => verify(&common.out_dir),
        Command::Sweep { config, seed, workers, common } => sweep(config, *seed, *workers, &common.out_dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(EXIT_NUMERICAL)
        }
        Err(Failure::Verification(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(EXIT_VERIFICATION)
        }
    }
}
