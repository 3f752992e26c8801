use faer::{Mat, Side};

use crate::error::{input, Error, Result};
use crate::fespace::{METRIC, N_COMPONENTS, P, Q1, Q2, S11, S12, S22, V1, V2};

/// Constant coefficients of the coupled system with isotropic elasticity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub rho: f64,
    pub alpha: f64,
    pub c0: f64,
    pub lambda: f64,
    pub mu: f64,
    /// Symmetric permeability tensor.
    pub k: [[f64; 2]; 2],
}

impl Default for Material {
    fn default() -> Self {
        Self { rho: 1.0, alpha: 1.0, c0: 1.0, lambda: 1.0, mu: 1.0, k: [[1.0, 0.0], [0.0, 1.0]] }
    }
}

pub type PointMatrix = [[f64; N_COMPONENTS]; N_COMPONENTS];

impl Material {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.rho, self.alpha, self.c0, self.lambda, self.mu, self.k[0][0], self.k[0][1], self.k[1][0], self.k[1][1]];
        if finite.iter().any(|v| !v.is_finite()) {
            return input("material parameters must be finite");
        }
        if self.rho <= 0.0 {
            return input(format!("density rho must be positive, got {}", self.rho));
        }
        if self.alpha < 0.0 {
            return input(format!("coupling alpha must be nonnegative, got {}", self.alpha));
        }
        if self.c0 <= 0.0 {
            return input(format!("storage coefficient c0 must be positive, got {}", self.c0));
        }
        if self.mu <= 0.0 || self.lambda < 0.0 {
            return input(format!("Lame parameters need mu > 0 and lambda >= 0, got mu = {}, lambda = {}", self.mu, self.lambda));
        }
        if self.k[0][1] != self.k[1][0] {
            return input("permeability tensor must be symmetric");
        }
        if self.k[0][0] <= 0.0 || self.k[0][0] * self.k[1][1] - self.k[0][1] * self.k[1][0] <= 0.0 {
            return input("permeability tensor must be positive definite");
        }
        Ok(())
    }

    pub fn k_inv(&self) -> [[f64; 2]; 2] {
        let k = self.k;
        let det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
        [[k[1][1] / det, -k[0][1] / det], [-k[1][0] / det, k[0][0] / det]]
    }

    /// Smallest eigenvalue of the inverse permeability.
    pub fn k_inv_min_eigenvalue(&self) -> f64 {
        let m = self.k_inv();
        let (tr, det) = (m[0][0] + m[1][1], m[0][0] * m[1][1] - m[0][1] * m[1][0]);
        0.5 * (tr - (tr * tr - 4.0 * det).max(0.0).sqrt())
    }

    /// `C eps` for a symmetric tensor stored as `(11, 22, 12)`.
    pub fn elasticity(&self, eps: [f64; 3]) -> [f64; 3] {
        let tr = eps[0] + eps[1];
        [2.0 * self.mu * eps[0] + self.lambda * tr, 2.0 * self.mu * eps[1] + self.lambda * tr, 2.0 * self.mu * eps[2]]
    }

    /// `S sigma`, the inverse of [`elasticity`](Self::elasticity).
    pub fn compliance(&self, sigma: [f64; 3]) -> [f64; 3] {
        let a = 0.5 / self.mu;
        let b = self.lambda / (2.0 * self.mu * (2.0 * self.mu + 2.0 * self.lambda));
        let tr = sigma[0] + sigma[1];
        [a * sigma[0] - b * tr, a * sigma[1] - b * tr, a * sigma[2]]
    }

    /// Smallest eigenvalue of `S` on symmetric tensors.
    pub fn compliance_min_eigenvalue(&self) -> f64 {
        0.5 / (self.mu + self.lambda)
    }

    /// Pointwise form of `M0`: `U^T m V = <M0 U, V>_H` per unit area.
    pub fn m0_form(&self) -> PointMatrix {
        let mut m = [[0.0; N_COMPONENTS]; N_COMPONENTS];
        m[V1][V1] = self.rho;
        m[V2][V2] = self.rho;
        let a = 0.5 / self.mu;
        let b = self.lambda / (2.0 * self.mu * (2.0 * self.mu + 2.0 * self.lambda));
        m[S11][S11] = a - b;
        m[S22][S22] = a - b;
        m[S11][S22] = -b;
        m[S22][S11] = -b;
        m[S12][S12] = 2.0 * a;
        m[P][P] = self.c0;
        m
    }

    /// Pointwise form of `M1`.
    pub fn m1_form(&self) -> PointMatrix {
        let mut m = [[0.0; N_COMPONENTS]; N_COMPONENTS];
        let ki = self.k_inv();
        let (v, q) = ([V1, V2], [Q1, Q2]);
        let a = self.alpha;
        for i in 0..2 {
            for j in 0..2 {
                m[v[i]][v[j]] = -a * a * ki[i][j];
                m[v[i]][q[j]] = -a * ki[i][j];
                m[q[i]][v[j]] = -a * ki[i][j];
                m[q[i]][q[j]] = ki[i][j];
            }
        }
        m
    }

    /// Smallest eigenvalue of `nu M0 + M1` relative to the inner product of `H`.
    pub fn coercivity_margin(&self, nu: f64) -> Result<f64> {
        let (m0, m1) = (self.m0_form(), self.m1_form());
        let s: Vec<f64> = METRIC.iter().map(|g| 1.0 / g.sqrt()).collect();
        let a = Mat::from_fn(N_COMPONENTS, N_COMPONENTS, |i, j| s[i] * (nu * m0[i][j] + m1[i][j]) * s[j]);
        let eig = a
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Numeric(format!("pointwise eigenproblem failed: {e:?}")))?;
        Ok(eig[0])
    }

    /// Smallest `nu` with `<(nu M0 + M1) x, x> >= gamma <x, x>`, to within 1e-8.
    pub fn compute_nu0(&self, gamma: f64) -> Result<f64> {
        self.validate()?;
        if !(gamma > 0.0) || !gamma.is_finite() {
            return input(format!("coercivity target must be positive, got {gamma}"));
        }
        let kmin = self.k_inv_min_eigenvalue();
        if gamma >= kmin {
            return Err(Error::Infeasible(format!(
                "the flux block is independent of nu and has smallest eigenvalue {kmin:.6} (inverse permeability), \
                 which does not exceed the target gamma = {gamma}"
            )));
        }
        let ok = |nu: f64| self.coercivity_margin(nu).map(|m| m >= gamma);
        let mut hi = 1.0;
        while !ok(hi)? {
            hi *= 2.0;
            if hi > 1e15 {
                return Err(Error::Infeasible(format!("no weight up to {hi:e} reaches gamma = {gamma}")));
            }
        }
        let mut lo = 0.0;
        if ok(lo)? {
            return Ok(0.0);
        }
        while hi - lo > 1e-10 * hi.max(1.0) {
            let mid = 0.5 * (lo + hi);
            if ok(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compliance_inverts_elasticity() {
        let m = Material { lambda: 2.3, mu: 0.7, ..Default::default() };
        for s in [[1.0, 0.0, 0.0], [0.3, -1.2, 0.8], [0.0, 0.0, 1.0]] {
            let back = m.elasticity(m.compliance(s));
            for i in 0..3 {
                assert!((back[i] - s[i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn nu0_closed_form() {
        let m = Material::default();
        let nu0 = m.compute_nu0(0.1).unwrap();
        assert!((nu0 - (1.1 + 1.0 / 0.9)).abs() < 1e-7, "{nu0}");
    }

    #[test]
    fn nu0_decoupled() {
        let m = Material { alpha: 0.0, rho: 2.0, c0: 3.0, lambda: 0.0, mu: 0.25, ..Default::default() };
        let smin = m.compliance_min_eigenvalue();
        let expected = 0.5 / 2.0f64.min(3.0).min(smin);
        assert!((m.compute_nu0(0.5).unwrap() - expected).abs() < 1e-7);
    }

    #[test]
    fn nu0_infeasible() {
        let e = Material::default().compute_nu0(2.0).unwrap_err();
        assert!(matches!(e, Error::Infeasible(ref s) if s.contains("flux block")));
    }

    #[test]
    fn validation() {
        assert!(Material { rho: 0.0, ..Default::default() }.validate().is_err());
        assert!(Material { k: [[1.0, 2.0], [2.0, 1.0]], ..Default::default() }.validate().is_err());
        assert!(Material { k: [[1.0, 0.1], [0.0, 1.0]], ..Default::default() }.validate().is_err());
        assert!(Material::default().validate().is_ok());
    }
}
