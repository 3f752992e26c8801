use std::f64::consts::PI;

use crate::error::{input, Result};
use crate::fespace::{N_COMPONENTS, P, Q1, Q2, S11, S12, S22, V1, V2};
use crate::mesh::Rect;
use crate::operators::Material;

/// Spatial shape shared by all manufactured fields; vanishes on the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// `sin(pi xi) sin(pi eta)` in rescaled coordinates.
    Sine,
    /// `16 xi (1 - xi) eta (1 - eta)`, biquadratic.
    Bubble,
}

impl Profile {
    /// Value, gradient and Hessian `(a_xx, a_xy, a_yy)` at `x`.
    pub fn eval(self, rect: &Rect, x: [f64; 2]) -> (f64, [f64; 2], [f64; 3]) {
        let (lx, ly) = (rect.width(), rect.height());
        let (s, t) = ((x[0] - rect.x0) / lx, (x[1] - rect.y0) / ly);
        let (f, df, ddf, g, dg, ddg) = match self {
            Profile::Sine => (
                (PI * s).sin(),
                PI * (PI * s).cos(),
                -PI * PI * (PI * s).sin(),
                (PI * t).sin(),
                PI * (PI * t).cos(),
                -PI * PI * (PI * t).sin(),
            ),
            Profile::Bubble => (4.0 * s * (1.0 - s), 4.0 - 8.0 * s, -8.0, 4.0 * t * (1.0 - t), 4.0 - 8.0 * t, -8.0),
        };
        let (dfx, ddfx) = (df / lx, ddf / (lx * lx));
        let (dgy, ddgy) = (dg / ly, ddg / (ly * ly));
        (f * g, [dfx * g, f * dgy], [ddfx * g, dfx * dgy, f * ddgy])
    }
}

/// `amp * sin(omega t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wave {
    pub amp: f64,
    pub omega: f64,
    pub phase: f64,
}

impl Wave {
    pub fn sin(omega: f64) -> Self {
        Self { amp: 1.0, omega, phase: 0.0 }
    }

    pub fn cos(omega: f64) -> Self {
        Self { amp: 1.0, omega, phase: 0.5 * PI }
    }

    /// Derivatives of order 0, 1 and 2.
    pub fn eval(&self, t: f64) -> [f64; 3] {
        let arg = self.omega * t + self.phase;
        let (s, c) = arg.sin_cos();
        [self.amp * s, self.amp * self.omega * c, -self.amp * self.omega * self.omega * s]
    }
}

/// Closed-form `u = scale * a(x) (g1(t), g2(t))`, `p = a(x) g3(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ManufacturedCase {
    pub material: Material,
    pub rect: Rect,
    pub profile: Profile,
    pub scale: f64,
    pub waves: [Wave; 3],
}

/// Values and spatial gradients of the eight components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldJet {
    pub value: [f64; N_COMPONENTS],
    pub grad: [[f64; 2]; N_COMPONENTS],
}

impl ManufacturedCase {
    /// `u = (sin t, cos t) sin(pi x) sin(pi y)`, `p = sin(2t) sin(pi x) sin(pi y)`.
    pub fn standard(material: Material, rect: Rect) -> Self {
        Self { material, rect, profile: Profile::Sine, scale: 1.0, waves: [Wave::sin(1.0), Wave::cos(1.0), Wave::sin(2.0)] }
    }

    /// Same temporal behaviour with a biquadratic spatial profile.
    pub fn polynomial(material: Material, rect: Rect) -> Self {
        Self { profile: Profile::Bubble, ..Self::standard(material, rect) }
    }

    pub fn validate(&self) -> Result<()> {
        self.material.validate()?;
        if !self.scale.is_finite() {
            return input("manufactured amplitude must be finite");
        }
        Ok(())
    }

    /// Displacement and pressure with time derivatives up to order two:
    /// `[u1, u2, p][order]`.
    fn time_parts(&self, t: f64) -> [[f64; 3]; 3] {
        let mut g = [self.waves[0].eval(t), self.waves[1].eval(t), self.waves[2].eval(t)];
        for d in 0..3 {
            g[0][d] *= self.scale;
            g[1][d] *= self.scale;
        }
        g
    }

    /// `U` and its spatial gradient after differentiating `order` times in time.
    pub fn jet(&self, order: usize, t: f64, x: [f64; 2]) -> FieldJet {
        assert!(order <= 1, "only U and its first time derivative are available");
        let (a, da, h) = self.profile.eval(&self.rect, x);
        let g = self.time_parts(t);
        let m = &self.material;
        // displacement-like factors entering v (one time derivative more) and sigma
        let gv = [g[0][order + 1], g[1][order + 1]];
        let gu = [g[0][order], g[1][order]];
        let gp = g[2][order];

        let mut value = [0.0; N_COMPONENTS];
        let mut grad = [[0.0; 2]; N_COMPONENTS];

        value[V1] = a * gv[0];
        value[V2] = a * gv[1];
        grad[V1] = [da[0] * gv[0], da[1] * gv[0]];
        grad[V2] = [da[0] * gv[1], da[1] * gv[1]];

        // strain of u and its gradient
        let eps = [gu[0] * da[0], gu[1] * da[1], 0.5 * (gu[0] * da[1] + gu[1] * da[0])];
        let deps = [
            [gu[0] * h[0], gu[0] * h[1]],
            [gu[1] * h[1], gu[1] * h[2]],
            [0.5 * (gu[0] * h[1] + gu[1] * h[0]), 0.5 * (gu[0] * h[2] + gu[1] * h[1])],
        ];
        let sig = m.elasticity(eps);
        let dsig = [
            m.elasticity([deps[0][0], deps[1][0], deps[2][0]]),
            m.elasticity([deps[0][1], deps[1][1], deps[2][1]]),
        ];
        for (i, c) in [S11, S22, S12].into_iter().enumerate() {
            value[c] = sig[i];
            grad[c] = [dsig[0][i], dsig[1][i]];
        }

        value[P] = a * gp;
        grad[P] = [da[0] * gp, da[1] * gp];

        // qbar = -K grad p + alpha v
        let k = m.k;
        let kgrad = [k[0][0] * da[0] + k[0][1] * da[1], k[1][0] * da[0] + k[1][1] * da[1]];
        let dkgrad = [
            [k[0][0] * h[0] + k[0][1] * h[1], k[0][0] * h[1] + k[0][1] * h[2]],
            [k[1][0] * h[0] + k[1][1] * h[1], k[1][0] * h[1] + k[1][1] * h[2]],
        ];
        for i in 0..2 {
            let c = Q1 + i;
            value[c] = -kgrad[i] * gp + m.alpha * value[V1 + i];
            grad[c] = [
                -dkgrad[i][0] * gp + m.alpha * grad[V1 + i][0],
                -dkgrad[i][1] * gp + m.alpha * grad[V1 + i][1],
            ];
        }
        FieldJet { value, grad }
    }

    /// Exact `U(t, x)`.
    pub fn exact(&self, t: f64, x: [f64; 2]) -> [f64; N_COMPONENTS] {
        self.jet(0, t, x).value
    }

    /// Initial datum `U(0) = (u1, C eps(u0), p0, -K grad p0 + alpha u1)`.
    pub fn initial(&self, x: [f64; 2]) -> [f64; N_COMPONENTS] {
        self.exact(0.0, x)
    }

    /// Source `F = M0 dU/dt + M1 U + A U` for the operators used by the scheme.
    pub fn source(&self, t: f64, x: [f64; 2]) -> [f64; N_COMPONENTS] {
        let u = self.jet(0, t, x);
        let du = self.jet(1, t, x).value;
        let mut f = apply_m0(&self.material, &du);
        let m1 = apply_m1(&self.material, &u.value);
        let a = apply_a(&u);
        for c in 0..N_COMPONENTS {
            f[c] += m1[c] + a[c];
        }
        f
    }

    /// Body force `f` of the second-order system.
    pub fn body_force(&self, t: f64, x: [f64; 2]) -> [f64; 2] {
        let m = &self.material;
        let (a, da, h) = self.profile.eval(&self.rect, x);
        let g = self.time_parts(t);
        let acc = [a * g[0][2], a * g[1][2]];
        // div C eps(u) for u = a (g1, g2)
        let (l, mu) = (m.lambda, m.mu);
        let div = [
            (l + 2.0 * mu) * h[0] * g[0][0] + mu * h[2] * g[0][0] + (l + mu) * h[1] * g[1][0],
            (l + 2.0 * mu) * h[2] * g[1][0] + mu * h[0] * g[1][0] + (l + mu) * h[1] * g[0][0],
        ];
        let gradp = [da[0] * g[2][0], da[1] * g[2][0]];
        [
            (m.rho * acc[0] - div[0] + m.alpha * gradp[0]) / m.rho,
            (m.rho * acc[1] - div[1] + m.alpha * gradp[1]) / m.rho,
        ]
    }

    /// Mass source `g` of the second-order system.
    pub fn mass_source(&self, t: f64, x: [f64; 2]) -> f64 {
        let m = &self.material;
        let (a, da, h) = self.profile.eval(&self.rect, x);
        let g = self.time_parts(t);
        let div_ut = da[0] * g[0][1] + da[1] * g[1][1];
        let div_kgrad = (m.k[0][0] * h[0] + 2.0 * m.k[0][1] * h[1] + m.k[1][1] * h[2]) * g[2][0];
        m.c0 * a * g[2][1] + m.alpha * div_ut - div_kgrad
    }

    /// Displacement `u(t, x)`.
    pub fn displacement(&self, t: f64, x: [f64; 2]) -> [f64; 2] {
        let (a, _, _) = self.profile.eval(&self.rect, x);
        let g = self.time_parts(t);
        [a * g[0][0], a * g[1][0]]
    }

    pub fn pressure(&self, t: f64, x: [f64; 2]) -> f64 {
        let (a, _, _) = self.profile.eval(&self.rect, x);
        a * self.time_parts(t)[2][0]
    }
}

/// `M0 U` as a field.
pub fn apply_m0(m: &Material, u: &[f64; N_COMPONENTS]) -> [f64; N_COMPONENTS] {
    let mut out = [0.0; N_COMPONENTS];
    out[V1] = m.rho * u[V1];
    out[V2] = m.rho * u[V2];
    let s = m.compliance([u[S11], u[S22], u[S12]]);
    out[S11] = s[0];
    out[S22] = s[1];
    out[S12] = s[2];
    out[P] = m.c0 * u[P];
    out
}

/// `M1 U` as a field.
pub fn apply_m1(m: &Material, u: &[f64; N_COMPONENTS]) -> [f64; N_COMPONENTS] {
    let ki = m.k_inv();
    let a = m.alpha;
    let mut out = [0.0; N_COMPONENTS];
    for i in 0..2 {
        for j in 0..2 {
            out[V1 + i] += -a * a * ki[i][j] * u[V1 + j] - a * ki[i][j] * u[Q1 + j];
            out[Q1 + i] += -a * ki[i][j] * u[V1 + j] + ki[i][j] * u[Q1 + j];
        }
    }
    out
}

/// `A U` from values and gradients.
pub fn apply_a(u: &FieldJet) -> [f64; N_COMPONENTS] {
    let g = &u.grad;
    let mut out = [0.0; N_COMPONENTS];
    out[V1] = -(g[S11][0] + g[S12][1]);
    out[V2] = -(g[S12][0] + g[S22][1]);
    out[S11] = -g[V1][0];
    out[S22] = -g[V2][1];
    out[S12] = -0.5 * (g[V1][1] + g[V2][0]);
    out[P] = g[Q1][0] + g[Q2][1];
    out[Q1] = g[P][0];
    out[Q2] = g[P][1];
    out
}
