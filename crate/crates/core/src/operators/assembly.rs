use crate::error::{input, Result};
use crate::fespace::{DiscreteSpace, METRIC, N_COMPONENTS, P, Q1, Q2, S11, S12, S22, V1, V2};
use crate::mesh::Face;
use crate::sparse::{CsrMatrix, Triplets};

use super::material::{Material, PointMatrix};

/// `(kappa, trial component, test component, direction)`: each entry adds
/// `kappa` times the DG derivative of the trial component in the given
/// direction, tested against the test component.
pub(crate) const DG_TERMS: [(f64, usize, usize, usize); 12] = [
    // -Div_dg sigma against w
    (-1.0, S11, V1, 0),
    (-1.0, S12, V1, 1),
    (-1.0, S12, V2, 0),
    (-1.0, S22, V2, 1),
    // -Grad_dg v against tau
    (-1.0, V1, S11, 0),
    (-1.0, V2, S22, 1),
    (-1.0, V1, S12, 1),
    (-1.0, V2, S12, 0),
    // div_dg qbar against q
    (1.0, Q1, P, 0),
    (1.0, Q2, P, 1),
    // grad_dg p against rbar
    (1.0, P, Q1, 0),
    (1.0, P, Q2, 1),
];

/// Boundary correction terms `(kappa, trial, test, direction)`; each adds
/// `kappa * n_d * int trial test` on boundary faces.
pub(crate) const BOUNDARY_TERMS: [(f64, usize, usize, usize); 6] = [
    (-1.0, S11, V1, 0),
    (-1.0, S12, V1, 1),
    (-1.0, S12, V2, 0),
    (-1.0, S22, V2, 1),
    (1.0, Q1, P, 0),
    (1.0, Q2, P, 1),
];

/// `int_e phi_a^X phi_b^Y ds` for the local faces of two elements meeting at `face`.
fn face_mass(space: &DiscreteSpace, face: &Face, face_x: usize, face_y: usize) -> Vec<Vec<f64>> {
    let basis = space.basis();
    let (_, w) = basis.quadrature_1d();
    let (tx, ty) = (basis.face_traces(face_x), basis.face_traces(face_y));
    let nl = space.n_local();
    let mut m = vec![vec![0.0; nl]; nl];
    for q in 0..w.len() {
        let wq = 0.5 * w[q] * face.measure;
        for a in 0..nl {
            if tx[q][a] == 0.0 {
                continue;
            }
            for b in 0..nl {
                m[a][b] += wq * tx[q][a] * ty[q][b];
            }
        }
    }
    m
}

fn push_block(t: &mut Triplets, space: &DiscreteSpace, test: (usize, usize), trial: (usize, usize), scale: f64, block: &[Vec<f64>]) {
    if scale == 0.0 {
        return;
    }
    for (a, row) in block.iter().enumerate() {
        let r = space.dof(test.0, test.1, a);
        for (b, v) in row.iter().enumerate() {
            t.push(r, space.dof(trial.0, trial.1, b), scale * v);
        }
    }
}

fn pointwise(space: &DiscreteSpace, form: &PointMatrix) -> CsrMatrix {
    let nl = space.n_local();
    let basis = space.basis();
    let mut t = Triplets::new(space.dim(), space.dim());
    for e in &space.mesh().elements {
        let jac = e.jacobian_det();
        for (ci, row) in form.iter().enumerate() {
            for (cj, &f) in row.iter().enumerate() {
                if f == 0.0 {
                    continue;
                }
                for a in 0..nl {
                    for b in 0..nl {
                        t.push(space.dof(e.id, ci, a), space.dof(e.id, cj, b), f * jac * basis.mass(a, b));
                    }
                }
            }
        }
    }
    t.into_csr()
}

/// Matrix of `<M0 U, V>_H`; rows are test functions, columns trial functions.
pub fn assemble_m0(material: &Material, space: &DiscreteSpace) -> CsrMatrix {
    pointwise(space, &material.m0_form())
}

pub fn assemble_m1(material: &Material, space: &DiscreteSpace) -> CsrMatrix {
    pointwise(space, &material.m1_form())
}

/// Matrix of `<A_h Y, Z>` built from the DG gradient and divergence.
pub fn assemble_ah(space: &DiscreteSpace) -> CsrMatrix {
    let nl = space.n_local();
    let basis = space.basis();
    let mesh = space.mesh();
    let mut t = Triplets::new(space.dim(), space.dim());

    let conv: Vec<Vec<Vec<f64>>> = (0..2)
        .map(|d| (0..nl).map(|a| (0..nl).map(|b| basis.convection(d, a, b)).collect()).collect())
        .collect();
    for e in &mesh.elements {
        let scale = [2.0 / e.hx(), 2.0 / e.hy()];
        let jac = e.jacobian_det();
        for &(kappa, trial, test, d) in &DG_TERMS {
            push_block(&mut t, space, (e.id, test), (e.id, trial), kappa * jac * scale[d], &conv[d]);
        }
    }

    for face in &mesh.interior_faces {
        let minus = face.minus.expect("interior face has two sides");
        let plus = face.plus;
        let pp = face_mass(space, face, plus.local_face, plus.local_face);
        let mp = face_mass(space, face, minus.local_face, plus.local_face);
        let pm = face_mass(space, face, plus.local_face, minus.local_face);
        let mm = face_mass(space, face, minus.local_face, minus.local_face);
        let (pe, me) = (plus.element, minus.element);
        for &(kappa, trial, test, d) in &DG_TERMS {
            let s = 0.5 * kappa * face.normal[d];
            push_block(&mut t, space, (pe, test), (pe, trial), -s, &pp);
            push_block(&mut t, space, (me, test), (pe, trial), -s, &mp);
            push_block(&mut t, space, (pe, test), (me, trial), s, &pm);
            push_block(&mut t, space, (me, test), (me, trial), s, &mm);
        }
    }

    for face in &mesh.boundary_faces {
        let lf = face.plus.local_face;
        let m = face_mass(space, face, lf, lf);
        let e = face.plus.element;
        for &(kappa, trial, test, d) in &DG_TERMS {
            push_block(&mut t, space, (e, test), (e, trial), -kappa * face.normal[d], &m);
        }
    }
    t.into_csr()
}

/// Boundary correction `J_d(U, V) = -sum <U2 n, V1> + sum <U4 . n, V3>`.
pub fn assemble_jpartial(space: &DiscreteSpace) -> CsrMatrix {
    assemble_jpartial_scaled(space, 1.0)
}

pub(crate) fn assemble_jpartial_scaled(space: &DiscreteSpace, sign: f64) -> CsrMatrix {
    let mut t = Triplets::new(space.dim(), space.dim());
    for face in &space.mesh().boundary_faces {
        let lf = face.plus.local_face;
        let m = face_mass(space, face, lf, lf);
        let e = face.plus.element;
        for &(kappa, trial, test, d) in &BOUNDARY_TERMS {
            push_block(&mut t, space, (e, test), (e, trial), sign * kappa * face.normal[d], &m);
        }
    }
    t.into_csr()
}

/// Boundary penalty `sum (1/h) (gamma_v <U1, V1> + gamma_p <U3, V3>)`.
pub fn assemble_jgamma(space: &DiscreteSpace, gamma_v: f64, gamma_p: f64) -> Result<CsrMatrix> {
    if !(gamma_v > 0.0 && gamma_p > 0.0) || !gamma_v.is_finite() || !gamma_p.is_finite() {
        return input(format!("penalties must be positive, got gamma_v = {gamma_v}, gamma_p = {gamma_p}"));
    }
    let h = space.mesh().h;
    let mut t = Triplets::new(space.dim(), space.dim());
    for face in &space.mesh().boundary_faces {
        let lf = face.plus.local_face;
        let m = face_mass(space, face, lf, lf);
        let e = face.plus.element;
        for (c, g) in [(V1, gamma_v), (V2, gamma_v), (P, gamma_p)] {
            push_block(&mut t, space, (e, c), (e, c), g / h, &m);
        }
    }
    Ok(t.into_csr())
}

/// Load vector `<F, phi>_H` for a pointwise field.
pub fn assemble_load(space: &DiscreteSpace, f: impl Fn([f64; 2]) -> [f64; N_COMPONENTS]) -> Vec<f64> {
    let nl = space.n_local();
    let basis = space.basis();
    let quad = basis.volume_quadrature();
    let phi: Vec<Vec<f64>> = quad.iter().map(|&(x, y, _)| basis.values(x, y)).collect();
    let mut out = vec![0.0; space.dim()];
    for e in &space.mesh().elements {
        let jac = e.jacobian_det();
        for (q, &(xi, eta, w)) in quad.iter().enumerate() {
            let val = f(e.map(xi, eta));
            for c in 0..N_COMPONENTS {
                if val[c] == 0.0 {
                    continue;
                }
                let s = METRIC[c] * jac * w * val[c];
                let base = space.dof(e.id, c, 0);
                for a in 0..nl {
                    out[base + a] += s * phi[q][a];
                }
            }
        }
    }
    out
}
