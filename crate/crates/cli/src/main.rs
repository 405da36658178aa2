use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bec_phonon::scenario::{run_sweep, run_trajectory, verify, Scenario, VerifyOptions};
use bec_phonon_cli::{
    rates_report, sweep_csv, sweep_gnuplot, trajectory_csv, trajectory_gnuplot, verify_report,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Decoherence of squeezed phonon states in a uniform Bose-Einstein condensate.
#[derive(Parser)]
#[command(name = "bec-phonon", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Purity, nonclassical depth, squeezing and occupation over time.
    Trajectory(Output),
    /// Purity-minimum time and condensate half-life across frequencies.
    Sweep(Output),
    /// Print the damping-rate breakdown for a scenario.
    Rates {
        #[command(flatten)]
        source: Source,
        /// Override the mode frequency (rad/s).
        #[arg(long)]
        omega: Option<f64>,
    },
    /// Cross-check the closed forms against numerical oracles.
    Verify {
        /// Relative tolerance of the collision integrals.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Flip the sign of the damping term in the drift (tests the checks).
        #[arg(long, hide = true)]
        flip_gamma_sign: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Fig1,
    Fig2,
}

#[derive(Args)]
struct Source {
    /// Scenario file (TOML).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Relative tolerance of the collision integrals.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct Output {
    #[command(flatten)]
    source: Source,
    /// Output CSV; relative paths go under $BEC_PHONON_OUT_DIR when set.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a gnuplot script next to the CSV.
    #[arg(long, requires = "out")]
    gnuplot: bool,
}

impl Source {
    fn load(&self, default: &str) -> Result<Scenario> {
        let mut s = match (&self.config, self.preset) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                Scenario::from_toml_str(&text).with_context(|| format!("in {}", path.display()))?
            }
            (None, Some(Preset::Fig1)) => Scenario::preset("fig1")?,
            (None, Some(Preset::Fig2)) => Scenario::preset("fig2")?,
            (None, None) => Scenario::preset(default)?,
        };
        if let Some(tol) = self.tolerance {
            if !(tol.is_finite() && tol > 0.0) {
                bail!("--tolerance must be positive");
            }
            s.rate.quadrature.rel_tol = tol;
        }
        Ok(s)
    }
}

fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os("BEC_PHONON_OUT_DIR") {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn emit(out: &Output, csv: &str, script: impl FnOnce(&str) -> String) -> Result<()> {
    let Some(path) = &out.out else {
        print!("{csv}");
        return Ok(());
    };
    let path = resolve(path);
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
    if out.gnuplot {
        let name = path
            .file_name()
            .unwrap_or_default()
            .to_string_lossy()
            .into_owned();
        let gp = path.with_extension("gp");
        std::fs::write(&gp, script(&name)).with_context(|| format!("writing {}", gp.display()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Trajectory(out) => {
            let tr = run_trajectory(&out.source.load("fig1")?)?;
            emit(&out, &trajectory_csv(&tr), trajectory_gnuplot)?;
        }
        Command::Sweep(out) => {
            let curves = run_sweep(&out.source.load("fig2")?)?;
            emit(&out, &sweep_csv(&curves), |name| {
                sweep_gnuplot(name, &curves)
            })?;
        }
        Command::Rates { source, omega } => {
            let mut s = source.load("fig1")?;
            if let Some(w) = omega {
                s.omega = w;
            }
            print!("{}", rates_report(&s)?);
        }
        Command::Verify {
            tolerance,
            flip_gamma_sign,
        } => {
            let mut opts = VerifyOptions {
                flip_gamma_sign,
                ..VerifyOptions::default()
            };
            if let Some(t) = tolerance {
                if !(t.is_finite() && t > 0.0) {
                    bail!("--tolerance must be positive");
                }
                opts.quadrature_tolerance = t;
            }
            let report = verify(&opts)?;
            print!("{}", verify_report(&report));
            return Ok(report.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
