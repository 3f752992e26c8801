//! Algebraic identities of the spatial operators and exactness of the
//! weighted Radau rule, collected into a pass/fail report.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{apply_a, fit_rate, ManufacturedCase};
use crate::error::{input, Result};
use crate::fespace::{DiscreteSpace, P, Q1, Q2, S11, S12, S22, V1, V2};
use crate::mesh::{face_quadrature, Mesh, Rect};
use crate::operators::{assemble_ah, assemble_jpartial_scaled, Material};
use crate::sparse::{dot, norm2, CsrMatrix, SparseLu};
use crate::timeslab::weighted_gauss_radau;

/// Relative tolerance of every algebraic identity.
pub const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Elements per direction on the unit square.
    pub meshes: Vec<usize>,
    pub degrees: Vec<usize>,
    /// Random vectors per configuration.
    pub trials: usize,
    pub seed: u64,
    /// Meshes of the consistency rate fit (at least three).
    pub consistency_meshes: Vec<usize>,
    pub radau_degrees: Vec<usize>,
    pub radau_params: Vec<f64>,
    /// Use `-J_d` in place of `J_d`. Only meant to show that the report
    /// detects a broken correction.
    pub flip_jpartial: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            meshes: vec![1, 2, 4, 8],
            degrees: vec![0, 1, 2],
            trials: 100,
            seed: 20240611,
            consistency_meshes: vec![4, 8, 16],
            radau_degrees: vec![0, 1, 2, 3],
            radau_params: vec![0.0, 1e-6, 0.1, 1.0, 5.0],
            flip_jpartial: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub config: String,
    pub value: f64,
    pub tolerance: f64,
    /// `value <= tolerance`, or `value >= tolerance` for rates.
    pub passed: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IdentityReport {
    pub checks: Vec<Check>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Largest value among checks with the given name.
    pub fn worst(&self, name: &str) -> Option<f64> {
        self.checks.iter().filter(|c| c.name == name).map(|c| c.value).reduce(f64::max)
    }

    fn upper(&mut self, name: &'static str, config: String, value: f64, tolerance: f64) {
        let passed = value.is_finite() && value <= tolerance;
        self.checks.push(Check { name, config, value, tolerance, passed });
    }

    fn lower(&mut self, name: &'static str, config: String, value: f64, bound: f64) {
        let passed = value.is_finite() && value >= bound;
        self.checks.push(Check { name, config, value, tolerance: bound, passed });
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let rel = if c.name == "consistency_rate" { ">=" } else { "<=" };
            writeln!(
                f,
                "{:<18} {:<22} {:>12.4e} {rel} {:<10.3e} {}",
                c.name,
                c.config,
                c.value,
                c.tolerance,
                if c.passed { "PASS" } else { "FAIL" }
            )?;
        }
        let failed = self.failures().count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// `sum_bnd int v . (sigma n) - p (qbar . n)` by direct face quadrature of
/// the traces.
pub fn boundary_sums(space: &DiscreteSpace, y: &[f64]) -> Result<f64> {
    let order = space.degree() + 2;
    let mut total = 0.0;
    for face in &space.mesh().boundary_faces {
        let e = face.plus.element;
        let n = face.normal;
        for (x, w) in face_quadrature(face, order)? {
            let u = space.evaluate(y, e, x)?;
            let sn = [u[S11] * n[0] + u[S12] * n[1], u[S12] * n[0] + u[S22] * n[1]];
            total += w * (u[V1] * sn[0] + u[V2] * sn[1] - u[P] * (u[Q1] * n[0] + u[Q2] * n[1]));
        }
    }
    Ok(total)
}

/// Zero the pressure coefficients whose basis functions have a nonzero
/// trace on the domain boundary.
fn clear_boundary_pressure(space: &DiscreteSpace, y: &mut [f64]) {
    let n = space.basis().n_line();
    let r = space.degree();
    for face in &space.mesh().boundary_faces {
        let e = face.plus.element;
        for iy in 0..n {
            for ix in 0..n {
                let on_face = r == 0
                    || match face.plus.local_face {
                        crate::mesh::BOTTOM => iy == 0,
                        crate::mesh::TOP => iy == n - 1,
                        crate::mesh::LEFT => ix == 0,
                        _ => ix == n - 1,
                    };
                if on_face {
                    y[space.dof(e, P, space.basis().local_index(ix, iy))] = 0.0;
                }
            }
        }
    }
}

fn restrict(space: &DiscreteSpace, y: &[f64], comps: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; y.len()];
    for (i, v) in y.iter().enumerate() {
        if comps.contains(&space.dof_location(i).1) {
            out[i] = *v;
        }
    }
    out
}

/// Skew defect, boundary identity, conditional duality and the vanishing of
/// interior terms for constant fields on one configuration.
fn algebraic_checks(report: &mut IdentityReport, opts: &VerifyOptions, n: usize, r: usize) -> Result<()> {
    let space = DiscreteSpace::new(Mesh::build(Rect::unit(), n, n)?, r)?;
    let ah = assemble_ah(&space);
    let jp = assemble_jpartial_scaled(&space, if opts.flip_jpartial { -1.0 } else { 1.0 });
    let skew = ah.combine(1.0, &jp, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ ((n as u64) << 8) ^ r as u64);
    let config = format!("{n}x{n} r={r}");

    let (mut skew_max, mut bnd_max, mut dual_max) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..opts.trials {
        let y = random_vector(&mut rng, space.dim());
        let ahy = ah.matvec(&y);
        let scale = norm2(&y) * (norm2(&ahy) + 1.0);
        skew_max = skew_max.max(skew.bilinear(&y, &y).abs() / scale);
        let bnd = boundary_sums(&space, &y)?;
        bnd_max = bnd_max.max((dot(&y, &ahy) - bnd).abs() / scale);

        let mut yp = restrict(&space, &y, &[P]);
        clear_boundary_pressure(&space, &mut yp);
        let yq = restrict(&space, &y, &[Q1, Q2]);
        // <grad_dg p, qbar> + <div_dg qbar, p>
        let grad = ah.bilinear(&yq, &yp);
        let div = ah.bilinear(&yp, &yq);
        let dscale = norm2(&yq) * (norm2(&ah.matvec(&yp)) + 1.0) + norm2(&yp) * (norm2(&ah.matvec(&yq)) + 1.0);
        dual_max = dual_max.max((grad + div).abs() / dscale);
    }
    report.upper("skew_defect", config.clone(), skew_max, IDENTITY_TOL);
    report.upper("boundary_identity", config.clone(), bnd_max, IDENTITY_TOL);
    report.upper("duality", config.clone(), dual_max, IDENTITY_TOL);

    if n >= 3 {
        let ones = vec![1.0; space.dim()];
        let ahy = ah.matvec(&ones);
        let mut worst = 0.0f64;
        for e in &space.mesh().elements {
            let touches_boundary = space.mesh().boundary_faces.iter().any(|f| f.plus.element == e.id);
            if !touches_boundary {
                let base = space.dof(e.id, 0, 0);
                for v in &ahy[base..base + 8 * space.n_local()] {
                    worst = worst.max(v.abs());
                }
            }
        }
        report.upper("constant_interior", config, worst, IDENTITY_TOL);
    }
    Ok(())
}

/// `|| M^{-1} (A_h + J_d) Pi U - Pi A U ||_H` for the smooth sine fields.
pub fn consistency_error(n: usize, r: usize) -> Result<(f64, f64)> {
    let space = DiscreteSpace::new(Mesh::build(Rect::unit(), n, n)?, r)?;
    let case = ManufacturedCase::standard(Material::default(), Rect::unit());
    let t = 0.7;
    let y = space.project_l2(|x| case.exact(t, x));
    let target = space.project_l2(|x| apply_a(&case.jet(0, t, x)));
    let op: CsrMatrix = assemble_ah(&space).combine(1.0, &assemble_jpartial_scaled(&space, 1.0), 1.0);
    let lu = SparseLu::factor(&space.mass_matrix())?;
    let riesz = lu.solve(&op.matvec(&y));
    let diff: Vec<f64> = riesz.iter().zip(&target).map(|(a, b)| a - b).collect();
    Ok((space.mesh().h, space.norm(&diff)))
}

/// `int_{-1}^{1} exp(-c (s + 1)) s^j ds` from the Taylor series of the
/// weight. Only terms with `n + j` even survive, all of one sign.
pub fn weighted_moment(c: f64, j: usize) -> f64 {
    let mut sum = 0.0;
    let mut coeff = 1.0; // (-c)^n / n!
    for n in 0..400 {
        if n > 0 {
            coeff *= -c / n as f64;
        }
        if (n + j) % 2 == 0 {
            let term = coeff * 2.0 / (n + j + 1) as f64;
            sum += term;
            if n > 2 * c as usize + 4 && term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
    }
    (-c).exp() * sum
}

/// Worst relative error of the `(k + 1)`-point rule over the monomials
/// `s^j`, `j <= 2k`, scaled by the zeroth moment.
pub fn radau_exactness(k: usize, c: f64) -> Result<f64> {
    let rule = weighted_gauss_radau(k, c)?;
    let m0 = weighted_moment(c, 0);
    let mut worst = 0.0f64;
    for j in 0..=2 * k {
        let q: f64 = rule.nodes.iter().zip(&rule.weights).map(|(s, w)| w * s.powi(j as i32)).sum();
        let exact = weighted_moment(c, j);
        worst = worst.max((q - exact).abs() / exact.abs().max(m0));
    }
    Ok(worst)
}

/// Run every identity over the configured sweep.
pub fn verify_identities(opts: &VerifyOptions) -> Result<IdentityReport> {
    if opts.meshes.iter().any(|&n| n == 0) || opts.trials == 0 {
        return input("verification needs nonempty meshes and at least one trial");
    }
    let mut report = IdentityReport::default();
    for &n in &opts.meshes {
        for &r in &opts.degrees {
            algebraic_checks(&mut report, opts, n, r)?;
        }
    }

    if opts.consistency_meshes.len() >= 3 {
        for &r in opts.degrees.iter().filter(|&&r| r >= 1) {
            let (mut hs, mut errs) = (Vec::new(), Vec::new());
            for &n in &opts.consistency_meshes {
                let (h, e) = consistency_error(n, r)?;
                hs.push(h);
                errs.push(e);
            }
            let rate = fit_rate(&hs, &errs);
            let config = format!("r={r} n={:?}", opts.consistency_meshes);
            report.lower("consistency_rate", config, rate, r as f64 - 0.2);
        }
    }

    for &k in &opts.radau_degrees {
        for &c in &opts.radau_params {
            report.upper("radau_exactness", format!("k={k} c={c}"), radau_exactness(k, c)?, IDENTITY_TOL);
        }
    }
    Ok(report)
}
