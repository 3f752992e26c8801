//! Run configuration (flat `key = value` text) and the assembled objects of
//! a simulation.

use std::collections::HashMap;
use std::path::PathBuf;

use crate::analysis::ManufacturedCase;
use crate::error::{Error, Result};
use crate::fespace::DiscreteSpace;
use crate::mesh::{Mesh, Rect};
use crate::operators::{default_penalty, Material, OperatorSet};
use crate::solver::{march, Trajectory};
use crate::timeslab::{TemporalRule, TimeMesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    /// Sine-profile manufactured solution with its source.
    Manufactured,
    /// Biquadratic-profile manufactured solution with its source.
    Polynomial,
    /// Zero source and zero initial data.
    Zero,
    /// Zero source, manufactured initial data.
    Free,
}

impl std::str::FromStr for CaseKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "manufactured" => Ok(Self::Manufactured),
            "polynomial" => Ok(Self::Polynomial),
            "zero" => Ok(Self::Zero),
            "free" => Ok(Self::Free),
            _ => Err(format!("unknown case '{s}', expected manufactured, polynomial, zero or free")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NuSetting {
    /// `nu0(gamma) + 0.1`.
    Auto,
    Value(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub rect: Rect,
    pub nx: usize,
    pub ny: usize,
    pub space_degree: usize,
    pub t_final: f64,
    pub n_slabs: usize,
    pub time_degree: usize,
    pub nu: NuSetting,
    /// Coercivity target `gamma` used to compute `nu0`.
    pub coercivity: f64,
    pub gamma_v: Option<f64>,
    pub gamma_p: Option<f64>,
    pub material: Material,
    pub case: CaseKind,
    pub output_dir: Option<PathBuf>,
    pub write_fields: bool,
    /// Line on which each key was set, for diagnostics.
    pub lines: HashMap<String, usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            rect: Rect::unit(),
            nx: 4,
            ny: 4,
            space_degree: 1,
            t_final: 1.0,
            n_slabs: 4,
            time_degree: 1,
            nu: NuSetting::Auto,
            coercivity: 0.1,
            gamma_v: None,
            gamma_p: None,
            material: Material::default(),
            case: CaseKind::Manufactured,
            output_dir: None,
            write_fields: false,
            lines: HashMap::new(),
        }
    }
}

pub const KEYS: &[&str] = &[
    "domain.x0",
    "domain.x1",
    "domain.y0",
    "domain.y1",
    "mesh.nx",
    "mesh.ny",
    "space.degree",
    "time.T",
    "time.N",
    "time.degree",
    "time.nu",
    "time.coercivity",
    "penalty.gamma_v",
    "penalty.gamma_p",
    "material.rho",
    "material.alpha",
    "material.c0",
    "material.lambda",
    "material.mu",
    "material.k11",
    "material.k12",
    "material.k22",
    "case",
    "output.dir",
    "output.fields",
];

fn at(line: usize, message: impl Into<String>) -> Error {
    Error::Config { line: Some(line), message: message.into() }
}

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| at(line, format!("{key}: cannot parse '{value}'")))
}

impl RunConfig {
    /// Parse `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| at(line, format!("expected 'key = value', found '{content}'")))?;
            let (key, value) = (key.trim(), value.trim());
            if cfg.lines.insert(key.to_string(), line).is_some() {
                return Err(at(line, format!("duplicate key '{key}'")));
            }
            cfg.set(line, key, value)?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config { line: None, message: format!("cannot read {}: {e}", path.display()) })?;
        Self::parse(&text)
    }

    fn set(&mut self, line: usize, key: &str, value: &str) -> Result<()> {
        let m = &mut self.material;
        match key {
            "domain.x0" => self.rect.x0 = parse_num(line, key, value)?,
            "domain.x1" => self.rect.x1 = parse_num(line, key, value)?,
            "domain.y0" => self.rect.y0 = parse_num(line, key, value)?,
            "domain.y1" => self.rect.y1 = parse_num(line, key, value)?,
            "mesh.nx" => self.nx = parse_num(line, key, value)?,
            "mesh.ny" => self.ny = parse_num(line, key, value)?,
            "space.degree" => self.space_degree = parse_num(line, key, value)?,
            "time.T" => self.t_final = parse_num(line, key, value)?,
            "time.N" => self.n_slabs = parse_num(line, key, value)?,
            "time.degree" => self.time_degree = parse_num(line, key, value)?,
            "time.nu" => {
                self.nu = if value == "auto" { NuSetting::Auto } else { NuSetting::Value(parse_num(line, key, value)?) }
            }
            "time.coercivity" => self.coercivity = parse_num(line, key, value)?,
            "penalty.gamma_v" => self.gamma_v = Some(parse_num(line, key, value)?),
            "penalty.gamma_p" => self.gamma_p = Some(parse_num(line, key, value)?),
            "material.rho" => m.rho = parse_num(line, key, value)?,
            "material.alpha" => m.alpha = parse_num(line, key, value)?,
            "material.c0" => m.c0 = parse_num(line, key, value)?,
            "material.lambda" => m.lambda = parse_num(line, key, value)?,
            "material.mu" => m.mu = parse_num(line, key, value)?,
            "material.k11" => m.k[0][0] = parse_num(line, key, value)?,
            "material.k12" => {
                let v = parse_num(line, key, value)?;
                m.k[0][1] = v;
                m.k[1][0] = v;
            }
            "material.k22" => m.k[1][1] = parse_num(line, key, value)?,
            "case" => self.case = value.parse().map_err(|e: String| at(line, e))?,
            "output.dir" => self.output_dir = Some(PathBuf::from(value)),
            "output.fields" => self.write_fields = parse_num(line, key, value)?,
            _ => return Err(at(line, format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Line on which `key` was set, if it came from a file.
    pub fn line_of(&self, key: &str) -> Option<usize> {
        self.lines.get(key).copied()
    }

    fn fail(&self, keys: &[&str], message: impl Into<String>) -> Error {
        let line = keys.iter().find_map(|k| self.line_of(k));
        Error::Config { line, message: message.into() }
    }

    pub fn penalties(&self) -> (f64, f64) {
        let d = default_penalty(self.space_degree);
        (self.gamma_v.unwrap_or(d), self.gamma_p.unwrap_or(d))
    }

    /// Check every field; returns `(nu, nu0)`.
    pub fn validate(&self) -> Result<(f64, f64)> {
        let r = self.rect;
        if !(r.width() > 0.0 && r.height() > 0.0) || ![r.x0, r.x1, r.y0, r.y1].iter().all(|v| v.is_finite()) {
            return Err(self.fail(&["domain.x1", "domain.x0", "domain.y1", "domain.y0"], "domain must have positive area"));
        }
        if self.nx == 0 || self.ny == 0 {
            return Err(self.fail(&["mesh.nx", "mesh.ny"], "element counts must be at least 1"));
        }
        if self.space_degree > 8 {
            return Err(self.fail(&["space.degree"], "space degree above 8 is not supported"));
        }
        if self.time_degree > 8 {
            return Err(self.fail(&["time.degree"], "time degree above 8 is not supported"));
        }
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(self.fail(&["time.T"], "final time must be positive"));
        }
        if self.n_slabs == 0 {
            return Err(self.fail(&["time.N"], "slab count must be at least 1"));
        }
        let (gv, gp) = self.penalties();
        if !(gv > 0.0 && gv.is_finite()) {
            return Err(self.fail(&["penalty.gamma_v"], "penalty gamma_v must be positive"));
        }
        if !(gp > 0.0 && gp.is_finite()) {
            return Err(self.fail(&["penalty.gamma_p"], "penalty gamma_p must be positive"));
        }
        if let Err(e) = self.material.validate() {
            let keys: &[&str] = match &e {
                Error::Input(s) if s.contains("rho") => &["material.rho"],
                Error::Input(s) if s.contains("alpha") => &["material.alpha"],
                Error::Input(s) if s.contains("c0") => &["material.c0"],
                Error::Input(s) if s.contains("Lame") => &["material.mu", "material.lambda"],
                _ => &["material.k11", "material.k12", "material.k22"],
            };
            return Err(self.fail(keys, e.to_string()));
        }
        if !(self.coercivity > 0.0) {
            return Err(self.fail(&["time.coercivity"], "coercivity target must be positive"));
        }
        let nu0 = self
            .material
            .compute_nu0(self.coercivity)
            .map_err(|e| self.fail(&["time.coercivity", "material.k11"], e.to_string()))?;
        let nu = match self.nu {
            NuSetting::Auto => nu0 + 0.1,
            NuSetting::Value(v) => {
                if !v.is_finite() || v < nu0 {
                    return Err(self.fail(
                        &["time.nu"],
                        format!(
                            "weight nu = {v} violates the coercivity condition <(nu M0 + M1) x, x> >= gamma <x, x> \
                             (gamma = {}, requires nu >= nu0 = {nu0:.8})",
                            self.coercivity
                        ),
                    ));
                }
                v
            }
        };
        Ok((nu, nu0))
    }
}

/// Every object needed to march one configuration.
pub struct Setup {
    pub config: RunConfig,
    pub nu: f64,
    pub nu0: f64,
    pub space: DiscreteSpace,
    pub ops: OperatorSet,
    pub rule: TemporalRule,
    pub case: Option<ManufacturedCase>,
    pub initial: Vec<f64>,
}

impl Setup {
    pub fn new(config: &RunConfig) -> Result<Self> {
        let (nu, nu0) = config.validate()?;
        let mesh = Mesh::build(config.rect, config.nx, config.ny)?;
        let space = DiscreteSpace::new(mesh, config.space_degree)?;
        let (gv, gp) = config.penalties();
        let ops = OperatorSet::assemble(&config.material, &space, gv, gp)?;
        let rule = TemporalRule::new(TimeMesh::uniform(config.t_final, config.n_slabs)?, config.time_degree, nu)?;
        let case = match config.case {
            CaseKind::Manufactured | CaseKind::Free => Some(ManufacturedCase::standard(config.material, config.rect)),
            CaseKind::Polynomial => Some(ManufacturedCase::polynomial(config.material, config.rect)),
            CaseKind::Zero => None,
        };
        let initial = match &case {
            Some(c) => space.project_l2(|x| c.initial(x)),
            None => vec![0.0; space.dim()],
        };
        Ok(Self { config: config.clone(), nu, nu0, space, ops, rule, case, initial })
    }

    /// Whether the configured case carries a source term.
    pub fn has_source(&self) -> bool {
        matches!(self.config.case, CaseKind::Manufactured | CaseKind::Polynomial)
    }

    pub fn solve(&self) -> Result<Trajectory> {
        let source = self.case.as_ref().filter(|_| self.has_source());
        match source {
            Some(c) => {
                let f = |t: f64, x: [f64; 2]| c.source(t, x);
                march(&self.space, &self.ops, &self.rule, Some(&f), self.initial.clone())
            }
            None => march(&self.space, &self.ops, &self.rule, None, self.initial.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let text = "\
# comment
domain.x0 = -1
domain.x1 = 1   # trailing
domain.y0 = 0
domain.y1 = 2
mesh.nx = 3
mesh.ny = 5
space.degree = 2
time.T = 0.5
time.N = 7
time.degree = 0
time.nu = 4.5
time.coercivity = 0.2
penalty.gamma_v = 12
penalty.gamma_p = 13
material.rho = 2
material.alpha = 0.5
material.c0 = 3
material.lambda = 0.1
material.mu = 0.7
material.k11 = 2
material.k12 = 0.25
material.k22 = 1
case = zero
output.dir = out
output.fields = true
";
        let c = RunConfig::parse(text).unwrap();
        assert_eq!(c.rect, Rect::new(-1.0, 1.0, 0.0, 2.0));
        assert_eq!((c.nx, c.ny, c.space_degree, c.n_slabs, c.time_degree), (3, 5, 2, 7, 0));
        assert_eq!(c.nu, NuSetting::Value(4.5));
        assert_eq!(c.material.k, [[2.0, 0.25], [0.25, 1.0]]);
        assert_eq!(c.case, CaseKind::Zero);
        assert!(c.write_fields);
        assert_eq!(c.penalties(), (12.0, 13.0));
        assert_eq!(c.line_of("mesh.ny"), Some(7));
        assert_eq!(KEYS.len(), 25);
        c.validate().unwrap();
    }

    #[test]
    fn errors_carry_lines() {
        let e = RunConfig::parse("mesh.nx = 2\nmesh.ny = x\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: Some(2), .. }));
        let e = RunConfig::parse("bogus = 1").unwrap_err();
        assert!(matches!(e, Error::Config { line: Some(1), .. }));
        let e = RunConfig::parse("mesh.nx = 1\nmesh.nx = 2").unwrap_err();
        assert!(matches!(e, Error::Config { line: Some(2), .. }));
        let c = RunConfig::parse("\n\nmaterial.rho = -1\n").unwrap();
        assert!(matches!(c.validate().unwrap_err(), Error::Config { line: Some(3), .. }));
    }

    #[test]
    fn nu_below_threshold_is_rejected() {
        let c = RunConfig::parse("time.nu = 1.0").unwrap();
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("coercivity condition") && msg.contains("line 1"), "{msg}");
        let (nu, nu0) = RunConfig::default().validate().unwrap();
        assert!((nu - nu0 - 0.1).abs() < 1e-15);
    }
}
