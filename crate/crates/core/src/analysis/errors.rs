use crate::error::{input, Result};
use crate::fespace::{DiscreteSpace, METRIC, N_COMPONENTS};
use crate::operators::{Material, PointMatrix};
use crate::quadrature::gauss_legendre;
use crate::solver::Trajectory;
use crate::timeslab::TemporalRule;

/// Errors of a fully discrete solution against an exact one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorValues {
    /// `||U - U_h||_{tau,nu}` from the Radau nodes.
    pub tau_nu: f64,
    /// Square root of the largest sampled `<M0 e(t), e(t)>`.
    pub sup_energy: f64,
    /// `||U - U_h||_nu` from an over-resolved Gauss rule in time.
    pub nu: f64,
}

/// Spatial error integrals with exact fields sampled at quadrature points.
pub struct SpatialErrors<'a> {
    space: &'a DiscreteSpace,
    /// Per quadrature point: reference basis values and weight.
    points: Vec<(f64, f64, f64, Vec<f64>)>,
    m0: PointMatrix,
}

impl<'a> SpatialErrors<'a> {
    pub fn new(space: &'a DiscreteSpace, material: &Material) -> Self {
        let r = space.degree();
        let (x, w) = gauss_legendre((2 * r + 2).max(r + 4));
        let mut points = Vec::with_capacity(x.len() * x.len());
        for j in 0..x.len() {
            for i in 0..x.len() {
                points.push((x[i], x[j], w[i] * w[j], space.basis().values(x[i], x[j])));
            }
        }
        Self { space, points, m0: material.m0_form() }
    }

    fn integrate(
        &self,
        coeffs: &[f64],
        exact: &dyn Fn([f64; 2]) -> [f64; N_COMPONENTS],
        density: impl Fn(&[f64; N_COMPONENTS]) -> f64,
    ) -> f64 {
        let mut sum = 0.0;
        for e in &self.space.mesh().elements {
            let jac = e.jacobian_det();
            for (xi, eta, w, phi) in &self.points {
                let uh = self.space.combine_local(coeffs, e.id, phi);
                let u = exact(e.map(*xi, *eta));
                let mut d = [0.0; N_COMPONENTS];
                for c in 0..N_COMPONENTS {
                    d[c] = u[c] - uh[c];
                }
                sum += jac * w * density(&d);
            }
        }
        sum
    }

    /// `||U - U_h||_H^2`.
    pub fn h_sq(&self, coeffs: &[f64], exact: &dyn Fn([f64; 2]) -> [f64; N_COMPONENTS]) -> f64 {
        self.integrate(coeffs, exact, |d| d.iter().zip(&METRIC).map(|(x, g)| g * x * x).sum())
    }

    /// `<M0 (U - U_h), U - U_h>`.
    pub fn energy_sq(&self, coeffs: &[f64], exact: &dyn Fn([f64; 2]) -> [f64; N_COMPONENTS]) -> f64 {
        self.integrate(coeffs, exact, |d| {
            let mut s = 0.0;
            for i in 0..N_COMPONENTS {
                for j in 0..N_COMPONENTS {
                    s += d[i] * self.m0[i][j] * d[j];
                }
            }
            s
        })
    }

    /// Squared `L^2` error of a single component, without the metric weight.
    pub fn component_sq(&self, coeffs: &[f64], comp: usize, exact: &dyn Fn([f64; 2]) -> f64) -> f64 {
        self.integrate(
            coeffs,
            &|x| {
                let mut v = [0.0; N_COMPONENTS];
                v[comp] = exact(x);
                v
            },
            |d| d[comp] * d[comp],
        )
    }
}

/// Errors of Theorem-type norms; see [`ErrorValues`].
pub fn discrete_error(
    space: &DiscreteSpace,
    material: &Material,
    rule: &TemporalRule,
    traj: &Trajectory,
    exact: &dyn Fn(f64, [f64; 2]) -> [f64; N_COMPONENTS],
) -> Result<ErrorValues> {
    if traj.n_slabs() != rule.n_slabs()
        || traj.initial.len() != space.dim()
        || traj.nodes.iter().any(|s| s.len() != rule.k + 1 || s.iter().any(|v| v.len() != space.dim()))
    {
        return input("trajectory does not match the temporal rule and discrete space");
    }
    let se = SpatialErrors::new(space, material);
    let (gx, gw) = gauss_legendre(rule.k + 5);

    let mut tau_nu = 0.0;
    let mut nu_sq = 0.0;
    let mut sup = se.energy_sq(&traj.initial, &|x| exact(0.0, x));
    for n in 0..rule.n_slabs() {
        let slab = rule.slab(n);
        let mut q = 0.0;
        for (j, &t) in slab.nodes.iter().enumerate() {
            let u = &traj.nodes[n][j];
            q += slab.weights[j] * se.h_sq(u, &|x| exact(t, x));
            sup = sup.max(se.energy_sq(u, &|x| exact(t, x)));
        }
        tau_nu += rule.slab_factor(n) * q;

        let plus = traj.right_limit(rule, n);
        sup = sup.max(se.energy_sq(&plus, &|x| exact(slab.start, x)));

        for (s, w) in gx.iter().zip(&gw) {
            let t = slab.start + 0.5 * slab.tau() * (s + 1.0);
            let u = traj.value_at(rule, t)?;
            nu_sq += 0.5 * slab.tau() * w * (-2.0 * rule.nu * t).exp() * se.h_sq(&u, &|x| exact(t, x));
            sup = sup.max(se.energy_sq(&u, &|x| exact(t, x)));
        }
    }
    Ok(ErrorValues { tau_nu: tau_nu.sqrt(), sup_energy: sup.sqrt(), nu: nu_sq.sqrt() })
}
