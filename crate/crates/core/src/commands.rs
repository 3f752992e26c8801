//! The batch commands behind the command-line front end. Each returns data
//! and writes its files; mapping to exit codes is left to the caller.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use crate::analysis::{convergence_study, verify_identities, Axis, ConvergenceReport, IdentityReport, VerifyOptions};
use crate::error::{Error, Result};
use crate::setup::{RunConfig, Setup};
use crate::solver::write_summary_csv;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const VERIFY_FAILED: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const SOLVER: u8 = 3;
    pub const RATE: u8 = 4;
}

/// Exit code for an error raised by one of the commands.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config { .. } | Error::Input(_) | Error::Infeasible(_) => exit::CONFIG,
        Error::Solver { .. } | Error::Numeric(_) | Error::Io(_) => exit::SOLVER,
    }
}

/// Output directory: the explicit override, else `output.dir`, else `out`.
pub fn output_dir(cfg: &RunConfig, over: Option<&Path>) -> PathBuf {
    over.map(Path::to_path_buf).or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub nu: f64,
    pub nu0: f64,
    pub dim: usize,
    pub files: Vec<PathBuf>,
}

/// March one configuration; writes `summary.csv` and, if requested,
/// `fields_NNNN.csv` at every slab end.
pub fn run(cfg: &RunConfig, out: &Path) -> Result<RunOutcome> {
    let setup = Setup::new(cfg)?;
    let traj = setup.solve()?;
    fs::create_dir_all(out)?;
    let mut files = vec![out.join("summary.csv")];
    write_summary_csv(&setup.space, &setup.ops, &setup.rule, &traj, create(&files[0])?)?;
    if cfg.write_fields {
        for n in 0..=traj.n_slabs() {
            let path = out.join(format!("fields_{n:04}.csv"));
            setup.space.write_fields_csv(traj.trace(n), create(&path)?)?;
            files.push(path);
        }
    }
    Ok(RunOutcome { nu: setup.nu, nu0: setup.nu0, dim: setup.space.dim(), files })
}

/// Convergence study along `axis`; writes `convergence_<axis>.csv`.
pub fn converge(cfg: &RunConfig, axis: Axis, levels: usize, out: &Path) -> Result<(ConvergenceReport, PathBuf)> {
    cfg.validate()?;
    let report = convergence_study(cfg, axis, levels)?;
    fs::create_dir_all(out)?;
    let name = match axis {
        Axis::Time => "convergence_time.csv",
        Axis::Space => "convergence_space.csv",
    };
    let path = out.join(name);
    report.write_csv(create(&path)?)?;
    Ok((report, path))
}

/// Rate assertion: `k + 1 +- 0.2` in time, at least `r - 0.2` in space.
/// Returns a description of the violation, if any.
pub fn check_rates(report: &ConvergenceReport, cfg: &RunConfig) -> Option<String> {
    let rate = report.rate_tau_nu;
    match report.axis {
        Axis::Time => {
            let expected = cfg.time_degree as f64 + 1.0;
            ((rate - expected).abs() > 0.2 || !rate.is_finite())
                .then(|| format!("temporal rate {rate:.3} outside {expected} +- 0.2"))
        }
        Axis::Space => {
            let bound = cfg.space_degree as f64 - 0.2;
            (!(rate >= bound)).then(|| format!("spatial rate {rate:.3} below {bound}"))
        }
    }
}

/// Identity sweep; writes `verify.txt` when an output directory is given.
pub fn verify(opts: &VerifyOptions, out: Option<&Path>) -> Result<IdentityReport> {
    let report = verify_identities(opts)?;
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("verify.txt"), format!("{report}\n"))?;
    }
    Ok(report)
}
