use std::io::Write;

use crate::error::{input, Result};
use crate::setup::{CaseKind, RunConfig, Setup};

use super::errors::{discrete_error, ErrorValues};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Time,
    Space,
}

impl std::str::FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "time" => Ok(Axis::Time),
            "space" => Ok(Axis::Space),
            _ => Err(format!("unknown axis '{s}', expected time or space")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    pub level: usize,
    pub h: f64,
    pub tau: f64,
    pub k: usize,
    pub r: usize,
    pub errors: ErrorValues,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub axis: Axis,
    pub rows: Vec<StudyRow>,
    pub rate_tau_nu: f64,
    pub rate_sup_energy: f64,
    pub rate_nu: f64,
    /// Set when some error sequence fails to decrease.
    pub non_monotone: bool,
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_rate(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

impl ConvergenceReport {
    fn from_rows(axis: Axis, rows: Vec<StudyRow>) -> Self {
        let x: Vec<f64> = rows.iter().map(|r| if axis == Axis::Time { r.tau } else { r.h }).collect();
        let pick = |f: fn(&ErrorValues) -> f64| rows.iter().map(|r| f(&r.errors)).collect::<Vec<_>>();
        let (a, b, c) = (pick(|e| e.tau_nu), pick(|e| e.sup_energy), pick(|e| e.nu));
        let non_monotone = [&a, &b, &c].iter().any(|s| s.windows(2).any(|w| !(w[1] < w[0])));
        Self {
            axis,
            rate_tau_nu: fit_rate(&x, &a),
            rate_sup_energy: fit_rate(&x, &b),
            rate_nu: fit_rate(&x, &c),
            non_monotone,
            rows,
        }
    }

    /// Observed rate of `err_tau_nu` between consecutive levels.
    pub fn local_rates(&self) -> Vec<Option<f64>> {
        let x = |r: &StudyRow| if self.axis == Axis::Time { r.tau } else { r.h };
        (0..self.rows.len())
            .map(|i| {
                (i > 0).then(|| {
                    let (a, b) = (&self.rows[i - 1], &self.rows[i]);
                    (b.errors.tau_nu / a.errors.tau_nu).ln() / (x(b) / x(a)).ln()
                })
            })
            .collect()
    }

    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "level,h,tau,k,r,err_tau_nu,err_sup_energy,err_nu,rate_tau_nu")?;
        for (row, rate) in self.rows.iter().zip(self.local_rates()) {
            let rate = rate.map(|v| format!("{v:.6}")).unwrap_or_default();
            writeln!(
                out,
                "{},{:.12e},{:.12e},{},{},{:.12e},{:.12e},{:.12e},{}",
                row.level, row.h, row.tau, row.k, row.r, row.errors.tau_nu, row.errors.sup_energy, row.errors.nu, rate
            )?;
        }
        Ok(())
    }
}

/// Refine one axis dyadically starting from `base`, holding the other fixed.
pub fn convergence_study(base: &RunConfig, axis: Axis, levels: usize) -> Result<ConvergenceReport> {
    if levels < 3 {
        return input(format!("a rate fit needs at least 3 levels, got {levels}"));
    }
    if !matches!(base.case, CaseKind::Manufactured | CaseKind::Polynomial) {
        return input("convergence studies need a manufactured case with a known exact solution");
    }
    let mut rows = Vec::with_capacity(levels);
    for level in 0..levels {
        let mut cfg = base.clone();
        let f = 1usize << level;
        match axis {
            Axis::Time => cfg.n_slabs *= f,
            Axis::Space => {
                cfg.nx *= f;
                cfg.ny *= f;
            }
        }
        let setup = Setup::new(&cfg)?;
        let traj = setup.solve()?;
        let case = setup.case.as_ref().expect("manufactured case");
        let errors = discrete_error(&setup.space, &cfg.material, &setup.rule, &traj, &|t, x| case.exact(t, x))?;
        rows.push(StudyRow {
            level,
            h: setup.space.mesh().h,
            tau: setup.rule.mesh.max_tau(),
            k: cfg.time_degree,
            r: cfg.space_degree,
            errors,
        });
    }
    Ok(ConvergenceReport::from_rows(axis, rows))
}
