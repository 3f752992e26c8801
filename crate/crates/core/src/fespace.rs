//! Broken tensor-product polynomial spaces for the eight-component unknown
//! `(v1, v2, s11, s22, s12, p, q1, q2)`.

use std::io::Write;

use faer::linalg::solvers::DenseSolveCore;
use faer::Mat;

use crate::error::{input, Error, Result};
use crate::mesh::{Element, Mesh, BOTTOM, LEFT, RIGHT, TOP};
use crate::quadrature::{gauss_legendre, gauss_lobatto_nodes, Lagrange1d};
use crate::sparse::{CsrMatrix, Triplets};

pub const N_COMPONENTS: usize = 8;

/// Component indices.
pub const V1: usize = 0;
pub const V2: usize = 1;
pub const S11: usize = 2;
pub const S22: usize = 3;
pub const S12: usize = 4;
pub const P: usize = 5;
pub const Q1: usize = 6;
pub const Q2: usize = 7;

/// Weights turning the component-wise product into the inner product of
/// `H`; the off-diagonal stress entry counts twice.
pub const METRIC: [f64; N_COMPONENTS] = [1.0, 1.0, 1.0, 1.0, 2.0, 1.0, 1.0, 1.0];

pub const COMPONENT_NAMES: [&str; N_COMPONENTS] = ["v1", "v2", "s11", "s22", "s12", "p", "q1", "q2"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Velocity,
    Stress,
    Pressure,
    Flux,
}

impl Field {
    pub fn components(self) -> std::ops::Range<usize> {
        match self {
            Field::Velocity => V1..S11,
            Field::Stress => S11..P,
            Field::Pressure => P..Q1,
            Field::Flux => Q1..N_COMPONENTS,
        }
    }
}

/// Nodal `Q_r` basis on `[-1, 1]^2`.
#[derive(Debug, Clone)]
pub struct ReferenceBasis {
    degree: usize,
    line: Lagrange1d,
    /// 1D Gauss points and weights used for all volume and face integrals.
    quad: (Vec<f64>, Vec<f64>),
    /// `line` values and derivatives at the 1D Gauss points.
    line_vals: Vec<Vec<f64>>,
    line_ders: Vec<Vec<f64>>,
    /// 1D mass matrix and its inverse.
    mass_1d: Vec<Vec<f64>>,
    mass_1d_inv: Vec<Vec<f64>>,
}

impl ReferenceBasis {
    pub fn new(degree: usize) -> Result<Self> {
        Self::with_quadrature(degree, 2 * degree + 2)
    }

    /// Basis with a `points x points` Gauss rule.
    pub fn with_quadrature(degree: usize, points: usize) -> Result<Self> {
        if points < degree + 1 {
            return input(format!("{points} quadrature points cannot integrate the degree-{degree} mass matrix"));
        }
        let nodes = if degree == 0 { vec![0.0] } else { gauss_lobatto_nodes(degree + 1) };
        let line = Lagrange1d::new(nodes)?;
        let quad = gauss_legendre(points);
        let line_vals: Vec<Vec<f64>> = quad.0.iter().map(|&x| line.values(x)).collect();
        let line_ders: Vec<Vec<f64>> = quad.0.iter().map(|&x| line.derivatives(x)).collect();
        let n = degree + 1;
        let mut mass_1d = vec![vec![0.0; n]; n];
        for (q, w) in quad.1.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    mass_1d[i][j] += w * line_vals[q][i] * line_vals[q][j];
                }
            }
        }
        let m = Mat::from_fn(n, n, |i, j| mass_1d[i][j]);
        let inv = m.partial_piv_lu().inverse();
        let mass_1d_inv: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| inv[(i, j)]).collect()).collect();
        if mass_1d_inv.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("reference mass matrix is singular".into()));
        }
        Ok(Self { degree, line, quad, line_vals, line_ders, mass_1d, mass_1d_inv })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_line(&self) -> usize {
        self.degree + 1
    }

    /// `(r + 1)^2`.
    pub fn n_local(&self) -> usize {
        self.n_line() * self.n_line()
    }

    /// Local index of the tensor basis function `l_ix(xi) l_iy(eta)`.
    #[inline]
    pub fn local_index(&self, ix: usize, iy: usize) -> usize {
        iy * self.n_line() + ix
    }

    pub fn line_basis(&self) -> &Lagrange1d {
        &self.line
    }

    /// Reference coordinates of the nodal points in local index order.
    pub fn nodal_points(&self) -> Vec<[f64; 2]> {
        let x = self.line.nodes();
        let n = self.n_line();
        (0..self.n_local()).map(|a| [x[a % n], x[a / n]]).collect()
    }

    pub fn values(&self, xi: f64, eta: f64) -> Vec<f64> {
        let (lx, ly) = (self.line.values(xi), self.line.values(eta));
        let n = self.n_line();
        (0..self.n_local()).map(|a| lx[a % n] * ly[a / n]).collect()
    }

    /// Reference gradients.
    pub fn gradients(&self, xi: f64, eta: f64) -> Vec<[f64; 2]> {
        let (lx, ly) = (self.line.values(xi), self.line.values(eta));
        let (dx, dy) = (self.line.derivatives(xi), self.line.derivatives(eta));
        let n = self.n_line();
        (0..self.n_local()).map(|a| [dx[a % n] * ly[a / n], lx[a % n] * dy[a / n]]).collect()
    }

    pub fn quadrature_1d(&self) -> (&[f64], &[f64]) {
        (&self.quad.0, &self.quad.1)
    }

    /// Tensor Gauss rule on the reference square: `(xi, eta, weight)`.
    pub fn volume_quadrature(&self) -> Vec<(f64, f64, f64)> {
        let (x, w) = &self.quad;
        let mut out = Vec::with_capacity(x.len() * x.len());
        for j in 0..x.len() {
            for i in 0..x.len() {
                out.push((x[i], x[j], w[i] * w[j]));
            }
        }
        out
    }

    /// Reference mass matrix entry `int phi_a phi_b`.
    pub fn mass(&self, a: usize, b: usize) -> f64 {
        let n = self.n_line();
        self.mass_1d[a % n][b % n] * self.mass_1d[a / n][b / n]
    }

    /// Reference convection entry `int (d phi_b / d xi_dir) phi_a`.
    pub fn convection(&self, dir: usize, a: usize, b: usize) -> f64 {
        let n = self.n_line();
        let (w, vals, ders) = (&self.quad.1, &self.line_vals, &self.line_ders);
        let (along, across) = if dir == 0 { (a % n, a / n) } else { (a / n, a % n) };
        let (along_b, across_b) = if dir == 0 { (b % n, b / n) } else { (b / n, b % n) };
        let d: f64 = (0..w.len()).map(|q| w[q] * ders[q][along_b] * vals[q][along]).sum();
        d * self.mass_1d[across][across_b]
    }

    /// Apply the inverse reference mass matrix to one local vector.
    pub fn apply_mass_inverse(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n_line();
        let inv = &self.mass_1d_inv;
        let mut tmp = vec![0.0; n * n];
        for iy in 0..n {
            for ix in 0..n {
                tmp[iy * n + ix] = (0..n).map(|jx| inv[ix][jx] * rhs[iy * n + jx]).sum();
            }
        }
        let mut out = vec![0.0; n * n];
        for iy in 0..n {
            for ix in 0..n {
                out[iy * n + ix] = (0..n).map(|jy| inv[iy][jy] * tmp[jy * n + ix]).sum();
            }
        }
        out
    }

    /// Reference coordinates of the point with face parameter `s` on a local face.
    pub fn face_point(local_face: usize, s: f64) -> [f64; 2] {
        match local_face {
            BOTTOM => [s, -1.0],
            RIGHT => [1.0, s],
            TOP => [s, 1.0],
            LEFT => [-1.0, s],
            _ => panic!("invalid local face {local_face}"),
        }
    }

    /// Trace values on a local face at the 1D Gauss points: `[q][a]`.
    pub fn face_traces(&self, local_face: usize) -> Vec<Vec<f64>> {
        self.quad
            .0
            .iter()
            .map(|&s| {
                let p = Self::face_point(local_face, s);
                self.values(p[0], p[1])
            })
            .collect()
    }
}

/// The broken product space over a mesh.
#[derive(Debug, Clone)]
pub struct DiscreteSpace {
    mesh: Mesh,
    basis: ReferenceBasis,
}

impl DiscreteSpace {
    pub fn new(mesh: Mesh, degree: usize) -> Result<Self> {
        Ok(Self { mesh, basis: ReferenceBasis::new(degree)? })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn basis(&self) -> &ReferenceBasis {
        &self.basis
    }

    pub fn degree(&self) -> usize {
        self.basis.degree
    }

    pub fn n_local(&self) -> usize {
        self.basis.n_local()
    }

    /// `8 * n_elements * (r + 1)^2`.
    pub fn dim(&self) -> usize {
        N_COMPONENTS * self.mesh.n_elements() * self.n_local()
    }

    #[inline]
    pub fn dof(&self, element: usize, component: usize, local: usize) -> usize {
        (element * N_COMPONENTS + component) * self.n_local() + local
    }

    /// Inverse of [`dof`](Self::dof).
    pub fn dof_location(&self, dof: usize) -> (usize, usize, usize) {
        let nl = self.n_local();
        let local = dof % nl;
        let ec = dof / nl;
        (ec / N_COMPONENTS, ec % N_COMPONENTS, local)
    }

    fn element(&self, id: usize) -> Result<&Element> {
        self.mesh
            .elements
            .get(id)
            .ok_or_else(|| Error::Input(format!("element {id} out of range")))
    }

    fn check_len(&self, coeffs: &[f64]) -> Result<()> {
        if coeffs.len() != self.dim() {
            return input(format!("coefficient vector has length {}, expected {}", coeffs.len(), self.dim()));
        }
        Ok(())
    }

    /// `L^2` projection of a field given pointwise, component by component.
    pub fn project_l2(&self, f: impl Fn([f64; 2]) -> [f64; N_COMPONENTS]) -> Vec<f64> {
        let nl = self.n_local();
        let quad = self.basis.volume_quadrature();
        let phi: Vec<Vec<f64>> = quad.iter().map(|&(x, y, _)| self.basis.values(x, y)).collect();
        let mut out = vec![0.0; self.dim()];
        for e in &self.mesh.elements {
            // the Jacobian cancels against the element mass matrix
            let mut rhs = vec![vec![0.0; nl]; N_COMPONENTS];
            for (q, &(xi, eta, w)) in quad.iter().enumerate() {
                let val = f(e.map(xi, eta));
                for c in 0..N_COMPONENTS {
                    if val[c] != 0.0 {
                        for a in 0..nl {
                            rhs[c][a] += w * val[c] * phi[q][a];
                        }
                    }
                }
            }
            for (c, r) in rhs.iter().enumerate() {
                let loc = self.basis.apply_mass_inverse(r);
                let base = self.dof(e.id, c, 0);
                out[base..base + nl].copy_from_slice(&loc);
            }
        }
        out
    }

    /// Nodal interpolation at the Lagrange points.
    pub fn interpolate(&self, f: impl Fn([f64; 2]) -> [f64; N_COMPONENTS]) -> Vec<f64> {
        let pts = self.basis.nodal_points();
        let mut out = vec![0.0; self.dim()];
        for e in &self.mesh.elements {
            for (a, p) in pts.iter().enumerate() {
                let val = f(e.map(p[0], p[1]));
                for c in 0..N_COMPONENTS {
                    out[self.dof(e.id, c, a)] = val[c];
                }
            }
        }
        out
    }

    /// All components at a point of the closed element, using that element's
    /// local expansion (one-sided trace on faces).
    pub fn evaluate(&self, coeffs: &[f64], element: usize, x: [f64; 2]) -> Result<[f64; N_COMPONENTS]> {
        self.check_len(coeffs)?;
        let e = self.element(element)?;
        if !e.contains(x) {
            return input(format!("point {x:?} lies outside element {element}"));
        }
        let r = e.inverse_map(x);
        Ok(self.evaluate_reference(coeffs, element, r[0], r[1]))
    }

    pub fn evaluate_field(&self, coeffs: &[f64], field: Field, element: usize, x: [f64; 2]) -> Result<Vec<f64>> {
        let all = self.evaluate(coeffs, element, x)?;
        Ok(all[field.components()].to_vec())
    }

    pub(crate) fn evaluate_reference(&self, coeffs: &[f64], element: usize, xi: f64, eta: f64) -> [f64; N_COMPONENTS] {
        let phi = self.basis.values(xi, eta);
        self.combine_local(coeffs, element, &phi)
    }

    pub(crate) fn combine_local(&self, coeffs: &[f64], element: usize, phi: &[f64]) -> [f64; N_COMPONENTS] {
        let mut out = [0.0; N_COMPONENTS];
        for (c, o) in out.iter_mut().enumerate() {
            let base = self.dof(element, c, 0);
            *o = phi.iter().zip(&coeffs[base..base + phi.len()]).map(|(p, u)| p * u).sum();
        }
        out
    }

    /// Physical gradients of all components at a point of the element.
    pub fn gradient(&self, coeffs: &[f64], element: usize, x: [f64; 2]) -> Result<[[f64; 2]; N_COMPONENTS]> {
        self.check_len(coeffs)?;
        let e = self.element(element)?;
        if !e.contains(x) {
            return input(format!("point {x:?} lies outside element {element}"));
        }
        let r = e.inverse_map(x);
        let g = self.basis.gradients(r[0], r[1]);
        let (sx, sy) = (2.0 / e.hx(), 2.0 / e.hy());
        let mut out = [[0.0; 2]; N_COMPONENTS];
        for (c, o) in out.iter_mut().enumerate() {
            let base = self.dof(element, c, 0);
            for (a, ga) in g.iter().enumerate() {
                o[0] += ga[0] * sx * coeffs[base + a];
                o[1] += ga[1] * sy * coeffs[base + a];
            }
        }
        Ok(out)
    }

    /// Mass matrix of the inner product of `H` on the discrete space.
    pub fn mass_matrix(&self) -> CsrMatrix {
        let nl = self.n_local();
        let mut t = Triplets::with_capacity(self.dim(), self.dim(), self.dim() * nl);
        for e in &self.mesh.elements {
            let jac = e.jacobian_det();
            for (c, g) in METRIC.iter().enumerate() {
                for a in 0..nl {
                    for b in 0..nl {
                        t.push(self.dof(e.id, c, a), self.dof(e.id, c, b), g * jac * self.basis.mass(a, b));
                    }
                }
            }
        }
        t.into_csr()
    }

    /// `<X, Y>_H` for coefficient vectors.
    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        let nl = self.n_local();
        let mut sum = 0.0;
        for e in &self.mesh.elements {
            let jac = e.jacobian_det();
            for (c, g) in METRIC.iter().enumerate() {
                let base = self.dof(e.id, c, 0);
                let (xs, ys) = (&x[base..base + nl], &y[base..base + nl]);
                let mut s = 0.0;
                for a in 0..nl {
                    for b in 0..nl {
                        s += xs[a] * self.basis.mass(a, b) * ys[b];
                    }
                }
                sum += g * jac * s;
            }
        }
        sum
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        self.inner(x, x).max(0.0).sqrt()
    }

    /// Squared `L^2` norm of the selected components.
    pub fn component_norm_sq(&self, x: &[f64], components: std::ops::Range<usize>) -> f64 {
        let nl = self.n_local();
        let mut sum = 0.0;
        for e in &self.mesh.elements {
            let jac = e.jacobian_det();
            for c in components.clone() {
                let base = self.dof(e.id, c, 0);
                let xs = &x[base..base + nl];
                let mut s = 0.0;
                for a in 0..nl {
                    for b in 0..nl {
                        s += xs[a] * self.basis.mass(a, b) * xs[b];
                    }
                }
                sum += METRIC[c] * jac * s;
            }
        }
        sum
    }

    /// Per-element nodal values as CSV: element, x, y and the eight components.
    pub fn write_fields_csv(&self, coeffs: &[f64], mut out: impl Write) -> Result<()> {
        self.check_len(coeffs)?;
        write!(out, "element,x,y")?;
        for name in COMPONENT_NAMES {
            write!(out, ",{name}")?;
        }
        writeln!(out)?;
        let pts = self.basis.nodal_points();
        for e in &self.mesh.elements {
            for p in &pts {
                let x = e.map(p[0], p[1]);
                let v = self.evaluate_reference(coeffs, e.id, p[0], p[1]);
                write!(out, "{},{:.12e},{:.12e}", e.id, x[0], x[1])?;
                for c in v {
                    write!(out, ",{c:.12e}")?;
                }
                writeln!(out)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Rect;

    fn space(n: usize, r: usize) -> DiscreteSpace {
        DiscreteSpace::new(Mesh::build(Rect::unit(), n, n).unwrap(), r).unwrap()
    }

    #[test]
    fn nodal_matrix_is_identity() {
        for r in 0..4 {
            let b = ReferenceBasis::new(r).unwrap();
            for (a, p) in b.nodal_points().iter().enumerate() {
                let v = b.values(p[0], p[1]);
                for (j, vj) in v.iter().enumerate() {
                    assert!((vj - if j == a { 1.0 } else { 0.0 }).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let b = ReferenceBasis::new(3).unwrap();
        let h = 1e-6;
        for &(x, y) in &[(0.1, -0.3), (-0.77, 0.52), (0.9, 0.9)] {
            let g = b.gradients(x, y);
            let (xp, xm) = (b.values(x + h, y), b.values(x - h, y));
            let (yp, ym) = (b.values(x, y + h), b.values(x, y - h));
            for a in 0..b.n_local() {
                assert!((g[a][0] - (xp[a] - xm[a]) / (2.0 * h)).abs() < 1e-6);
                assert!((g[a][1] - (yp[a] - ym[a]) / (2.0 * h)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn dof_map_is_bijective() {
        let s = space(2, 2);
        let mut seen = vec![false; s.dim()];
        for e in 0..4 {
            for c in 0..N_COMPONENTS {
                for a in 0..s.n_local() {
                    let d = s.dof(e, c, a);
                    assert!(!seen[d]);
                    seen[d] = true;
                    assert_eq!(s.dof_location(d), (e, c, a));
                }
            }
        }
        assert!(seen.iter().all(|&b| b));
        assert_eq!(s.dim(), 8 * 4 * 9);
    }

    #[test]
    fn projection_reproduces_discrete_functions() {
        let s = space(3, 2);
        let f = |x: [f64; 2]| {
            let mut v = [0.0; 8];
            for (c, vc) in v.iter_mut().enumerate() {
                *vc = (c as f64 + 1.0) * x[0] * x[0] * x[1] - x[1] * x[1] + 0.5 * c as f64;
            }
            v
        };
        let pi = s.project_l2(f);
        let ip = s.interpolate(f);
        for (a, b) in pi.iter().zip(&ip) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn evaluate_constants_and_linears() {
        let s = space(2, 1);
        let c = s.project_l2(|x| [x[0], 2.0 * x[1], 1.0, 0.0, x[0] - x[1], 1.0, 0.0, 3.0]);
        let v = s.evaluate(&c, 3, [0.7, 0.6]).unwrap();
        assert!((v[P] - 1.0).abs() < 1e-12);
        assert!((v[V1] - 0.7).abs() < 1e-12 && (v[V2] - 1.2).abs() < 1e-12);
        assert!((v[S12] - 0.1).abs() < 1e-12);
        assert!(s.evaluate(&c, 0, [0.7, 0.6]).is_err());
        let g = s.gradient(&c, 3, [0.7, 0.6]).unwrap();
        assert!((g[V2][1] - 2.0).abs() < 1e-12 && g[V2][0].abs() < 1e-12);
    }

    #[test]
    fn traces_differ_for_discontinuous_data() {
        let s = space(2, 0);
        let mut c = vec![0.0; s.dim()];
        c[s.dof(1, P, 0)] = 1.0;
        let left = s.evaluate(&c, 0, [0.5, 0.25]).unwrap()[P];
        let right = s.evaluate(&c, 1, [0.5, 0.25]).unwrap()[P];
        assert_eq!(right - left, 1.0);
    }

    #[test]
    fn mass_matrix_spd_and_metric() {
        let s = space(2, 1);
        let m = s.mass_matrix();
        assert_eq!(m.asymmetry(), 0.0);
        let ones = s.project_l2(|_| [1.0; 8]);
        assert!((m.bilinear(&ones, &ones) - 9.0).abs() < 1e-12);
        assert!((s.inner(&ones, &ones) - 9.0).abs() < 1e-12);
        let eig = m.to_dense().self_adjoint_eigenvalues(faer::Side::Lower).unwrap();
        assert!(eig[0] > 0.0);
    }

    #[test]
    fn convection_matches_quadrature() {
        let b = ReferenceBasis::new(2).unwrap();
        let quad = b.volume_quadrature();
        for a in 0..9 {
            for bb in 0..9 {
                for dir in 0..2 {
                    let q: f64 = quad
                        .iter()
                        .map(|&(x, y, w)| w * b.gradients(x, y)[bb][dir] * b.values(x, y)[a])
                        .sum();
                    assert!((q - b.convection(dir, a, bb)).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn field_csv_layout() {
        let s = space(1, 1);
        let c = vec![0.0; s.dim()];
        let mut buf = Vec::new();
        s.write_fields_csv(&c, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert_eq!(text.lines().next().unwrap(), "element,x,y,v1,v2,s11,s22,s12,p,q1,q2");
    }
}
