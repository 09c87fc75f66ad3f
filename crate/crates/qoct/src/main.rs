use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qoct::config::RunConfig;
use qoct::{pipeline, selftest, AppResult};

#[derive(Parser)]
#[command(name = "qoct", version, about = "Quantum OCT simulation and calibration pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Interferograms from the quadrature engine and/or closed forms.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Worker threads for the τ loop.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// FFT calibration of measured VIS-VIS and IR-VIS interferograms.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Zero-padding factor; overrides `analyze.zero_pad`.
        #[arg(long)]
        zero_pad: Option<usize>,
    },
    /// Source brightness and generation-rate report.
    Source {
        #[command(flatten)]
        common: Common,
    },
    /// Runs the acceptance suite.
    Selftest {
        /// Run a single criterion.
        #[arg(long)]
        only: Option<u8>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn load(c: &Common) -> AppResult<(RunConfig, PathBuf)> {
    let cfg = RunConfig::load(&c.config)?;
    let out = pipeline::prepare_out(cfg.output_dir(c.out.as_deref()))?;
    Ok((cfg, out))
}

fn run(cmd: Command) -> AppResult<bool> {
    match cmd {
        Command::Simulate { common, threads } => {
            let (cfg, out) = load(&common)?;
            let r = pipeline::simulate(&cfg, &out, threads)?;
            println!("simulate: case {}, {} files in {}", r.case, r.files.len(), out.display());
            if let Some(d) = &r.max_relative_deviation {
                println!("max relative deviation (M): {:.3e}", d.total);
            }
        }
        Command::Analyze { common, zero_pad } => {
            let (cfg, out) = load(&common)?;
            let r = pipeline::analyze(&cfg, &out, zero_pad)?;
            for t in &r.terms {
                println!(
                    "{}: corrected FWHM {:.4} rad/fs ({:.2} THz), axial resolution {:.4} um",
                    t.term, t.corrected_fwhm, t.corrected_fwhm_thz, t.axial_resolution_um
                );
            }
        }
        Command::Source { common } => {
            let (cfg, out) = load(&common)?;
            let r = pipeline::source(&cfg, &out)?;
            println!(
                "S0/P {:.3} cps/(THz mW), B {:.2} THz, report in {}",
                r.s0_per_thz_mw,
                r.b_thz,
                out.display()
            );
        }
        Command::Selftest { only, threads } => {
            let outcomes = qoct::par::with_threads(threads, || match only {
                Some(id) => selftest::by_id(id).into_iter().collect::<Vec<_>>(),
                None => selftest::run_all(),
            });
            if outcomes.is_empty() {
                return Err(qoct::AppError::config("--only", "criteria are numbered 1 to 8"));
            }
            for o in &outcomes {
                println!("{o}");
            }
            return Ok(outcomes.iter().all(|o| o.passed()));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
