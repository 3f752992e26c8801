use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stdg::analysis::{Axis, VerifyOptions};
use stdg::commands::{self, exit};
use stdg::setup::RunConfig;

/// Space-time DG solver for coupled hyperbolic-parabolic systems.
#[derive(Debug, Parser)]
#[command(name = "stdg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// March one configuration and write the slab-end summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Refine time or space dyadically and fit convergence rates.
    Converge {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "time")]
        axis: Axis,
        #[arg(long, default_value_t = 4)]
        levels: usize,
        /// Exit with code 4 when the fitted rate misses its target.
        #[arg(long)]
        assert_rates: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the operator identities and the Radau exactness table.
    Verify {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 20240611)]
        seed: u64,
        /// Negate the boundary correction (mutation check).
        #[arg(long, hide = true)]
        flip_jpartial: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &PathBuf) -> Result<RunConfig, ExitCode> {
    RunConfig::from_file(path).map_err(|e| fail(&e))
}

fn fail(e: &stdg::Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(commands::exit_code(e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out } => {
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let dir = commands::output_dir(&cfg, out.as_deref());
            match commands::run(&cfg, &dir) {
                Ok(o) => {
                    println!("nu = {:.8} (nu0 = {:.8}), {} unknowns per time node", o.nu, o.nu0, o.dim);
                    for f in &o.files {
                        println!("wrote {}", f.display());
                    }
                    ExitCode::from(exit::OK)
                }
                Err(e) => fail(&e),
            }
        }
        Command::Converge { config, axis, levels, assert_rates, out } => {
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let dir = commands::output_dir(&cfg, out.as_deref());
            match commands::converge(&cfg, axis, levels, &dir) {
                Ok((report, path)) => {
                    for (row, rate) in report.rows.iter().zip(report.local_rates()) {
                        let rate = rate.map(|r| format!("{r:.3}")).unwrap_or_else(|| "-".into());
                        println!(
                            "level {} h={:.4e} tau={:.4e} err_tau_nu={:.4e} err_sup={:.4e} err_nu={:.4e} rate={rate}",
                            row.level, row.h, row.tau, row.errors.tau_nu, row.errors.sup_energy, row.errors.nu
                        );
                    }
                    println!(
                        "fitted rates: tau_nu {:.3}, sup_energy {:.3}, nu {:.3}",
                        report.rate_tau_nu, report.rate_sup_energy, report.rate_nu
                    );
                    if report.non_monotone {
                        println!("warning: error sequence is not monotone");
                    }
                    println!("wrote {}", path.display());
                    match commands::check_rates(&report, &cfg) {
                        Some(msg) if assert_rates => {
                            eprintln!("rate assertion failed: {msg}");
                            ExitCode::from(exit::RATE)
                        }
                        _ => ExitCode::from(exit::OK),
                    }
                }
                Err(e) => fail(&e),
            }
        }
        Command::Verify { trials, seed, flip_jpartial, out } => {
            let opts = VerifyOptions { trials, seed, flip_jpartial, ..VerifyOptions::default() };
            match commands::verify(&opts, out.as_deref()) {
                Ok(report) => {
                    println!("{report}");
                    ExitCode::from(if report.passed() { exit::OK } else { exit::VERIFY_FAILED })
                }
                Err(e) => fail(&e),
            }
        }
    }
}
