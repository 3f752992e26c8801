//! Material coefficients and assembly of the spatial operators `M0`, `M1`,
//! `A_h`, the boundary correction `J_d` and the boundary penalty `J_gamma`.

mod assembly;
mod material;

pub use assembly::{assemble_ah, assemble_jgamma, assemble_jpartial, assemble_load, assemble_m0, assemble_m1};
#[allow(unused_imports)]
pub(crate) use assembly::{assemble_jpartial_scaled, BOUNDARY_TERMS, DG_TERMS};
pub use material::{Material, PointMatrix};

use crate::error::Result;
use crate::fespace::DiscreteSpace;
use crate::sparse::CsrMatrix;

/// Default boundary penalty `10 (r + 1)^2`.
pub fn default_penalty(degree: usize) -> f64 {
    10.0 * ((degree + 1) * (degree + 1)) as f64
}

/// Every assembled spatial operator of the scheme.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub m0: CsrMatrix,
    pub m1: CsrMatrix,
    pub ah: CsrMatrix,
    pub jpartial: CsrMatrix,
    pub jgamma: CsrMatrix,
    pub mass: CsrMatrix,
}

impl OperatorSet {
    pub fn assemble(material: &Material, space: &DiscreteSpace, gamma_v: f64, gamma_p: f64) -> Result<Self> {
        material.validate()?;
        Ok(Self {
            m0: assemble_m0(material, space),
            m1: assemble_m1(material, space),
            ah: assemble_ah(space),
            jpartial: assemble_jpartial(space),
            jgamma: assemble_jgamma(space, gamma_v, gamma_p)?,
            mass: space.mass_matrix(),
        })
    }

    /// `M1 + A_h + J_d + J_gamma`, the operator paired with node values.
    pub fn spatial(&self) -> CsrMatrix {
        self.m1
            .combine(1.0, &self.ah, 1.0)
            .combine(1.0, &self.jpartial, 1.0)
            .combine(1.0, &self.jgamma, 1.0)
    }

    /// `A_h + J_d`, skew-symmetric by construction.
    pub fn skew_part(&self) -> CsrMatrix {
        self.ah.combine(1.0, &self.jpartial, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.m0.n_rows()
    }
}
