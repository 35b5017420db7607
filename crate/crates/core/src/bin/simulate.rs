// SPDX-License-Identifier: Apache-2.0

//! simulate gp|twa|sweep|analyze --config <path> [--resume <ckpt>] [--workers N] [--seed S]
//!
//! Exit codes: 0 ok, 2 configuration, 3 divergence, 4 no signal or failed
//! fit, 5 I/O.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use kerrsim::config::{RunConfig, OUTPUT_ROOT_ENV};
use kerrsim::runner::{PointOutcome, Runner, SweepReport};
use kerrsim::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Gp,
    Twa,
    Sweep,
    Analyze,
}

#[derive(Debug, Parser)]
#[command(name = "simulate", version, about = "Kerr soliton mean-field and truncated Wigner runs")]
struct Cli {
    command: Command,
    #[arg(long)]
    config: PathBuf,
    /// Checkpoint to continue from (twa, sweep).
    #[arg(long)]
    resume: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output root; artifacts go to <root>/<run.output>.
    #[arg(long, env = OUTPUT_ROOT_ENV, default_value = ".")]
    output_root: PathBuf,
}

fn run(cli: &Cli) -> kerrsim::Result<()> {
    let config = RunConfig::load(&cli.config)?;
    let runner = Runner::new(config, &cli.output_root, cli.workers, cli.seed)?;
    match cli.command {
        Command::Gp => {
            let (_, record) = runner.run_gp()?;
            let last = record.ticks.last().expect("record has ticks");
            println!("N_tot = {:.6e}  contrast = {:.4}  tau = {:.1}", last.n_tot, last.contrast, last.tau);
            if runner.config.spectrum.is_some() {
                let (spec, comb) = runner.gp_spectrum()?;
                println!(
                    "comb spacing = {:.4} ± {:.1e} kappa ({} lines, bin {:.3})",
                    comb.spacing,
                    comb.uncertainty,
                    comb.peaks.len(),
                    spec.bin()
                );
            }
        }
        Command::Twa => match runner.run_twa(cli.resume.as_deref())? {
            PointOutcome::Complete(record) => {
                let last = record.ticks.last().expect("record has ticks");
                println!(
                    "tau = {:.1}  N_tot = {:.6e} ± {:.1e}  contrast = {:.4} ± {:.1e}",
                    last.tau, last.n_tot, last.n_tot_se, last.contrast, last.contrast_se
                );
            }
            PointOutcome::Halted { checkpoint, time } => {
                println!("halted at t = {time}; resume from {}", checkpoint.display());
            }
        },
        Command::Sweep => {
            let have_spectrum = cli.resume.is_some() && runner.dir.join("spectrum_twa.toml").exists();
            if runner.config.spectrum.is_some() && !have_spectrum {
                let (_, comb) = runner.twa_spectrum()?;
                if let Err(e) = comb {
                    log::warn!("Wigner spectrum: {e}");
                }
            }
            if let Some(report) = runner.run_sweep(cli.resume.as_deref())? {
                print_report(&report);
                require_fits(&report)?;
            }
        }
        Command::Analyze => {
            let report = runner.run_analyze()?;
            print_report(&report);
            require_fits(&report)?;
        }
    }
    Ok(())
}

/// The report is written either way; a failed fit still sets the exit code.
fn require_fits(r: &SweepReport) -> kerrsim::Result<()> {
    match r.points.iter().find(|p| p.fit.is_none()) {
        Some(p) => Err(Error::NoSignal(format!(
            "gap fit failed at ntilde = {:e}: {}",
            p.ntilde,
            p.fit_error.as_deref().unwrap_or("")
        ))),
        None => Ok(()),
    }
}

fn print_report(r: &SweepReport) {
    println!("{:>10} {:>12} {:>12} {:>12} {:>16}", "ntilde", "N_tot", "Lambda", "CI95", "window");
    for p in &r.points {
        match &p.fit {
            Some(f) => println!(
                "{:>10.1e} {:>12.4e} {:>12.4e} {:>12.2e} {:>7.1}..{:<7.1}",
                p.ntilde, p.n_tot, f.lambda, f.lambda_ci, f.window.0, f.window.1
            ),
            None => println!(
                "{:>10.1e} {:>12.4e}  fit failed: {}",
                p.ntilde,
                p.n_tot,
                p.fit_error.as_deref().unwrap_or("")
            ),
        }
    }
    if let Some(a) = &r.gap_vs_ntilde {
        println!("Lambda ~ ntilde^a:  a = {:.3} ± {:.3}", a.exponent, a.exponent_ci);
    }
    if let Some(a) = &r.gap_vs_ntot {
        println!("Lambda ~ N_tot^eta: eta = {:.3} ± {:.3}", a.exponent, a.exponent_ci);
    }
    if let Some(a) = &r.ntot_vs_ntilde {
        println!("N_tot ~ ntilde^s:   s = {:.4} ± {:.4}", a.exponent, a.exponent_ci);
    }
    println!("Lambda monotone in ntilde: {}", r.gap_monotone);
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
