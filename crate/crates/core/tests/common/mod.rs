//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use stdg::fespace::DiscreteSpace;
use stdg::operators::Material;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Kronrod value, error estimate, and the Kronrod integral of `|f|`.
fn kronrod(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64, f64) {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let fc = f(c);
    let (mut k, mut g, mut abs) = (WGK[7] * fc, WG[3] * fc, WGK[7] * fc.abs());
    for j in 0..7 {
        let (l, r) = (f(c - h * XGK[j]), f(c + h * XGK[j]));
        k += WGK[j] * (l + r);
        abs += WGK[j] * (l.abs() + r.abs());
        if j % 2 == 1 {
            g += WG[j / 2] * (l + r);
        }
    }
    (k * h, (k - g).abs() * h, abs * h)
}

fn adapt(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
    let (k, err, abs) = kronrod(f, a, b);
    // below the rounding floor of the local integral no refinement helps
    if err <= tol.max(50.0 * f64::EPSILON * abs) || depth == 0 {
        return k;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth - 1) + adapt(f, m, b, 0.5 * tol, depth - 1)
}

/// Adaptive Gauss–Kronrod (7/15) integral of `f` over `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    adapt(&f, a, b, tol, 30)
}

/// Non-adaptive 15-point Kronrod rule, for integrands smooth on `[a, b]`.
pub fn kronrod15(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    kronrod(&f, a, b).0
}

/// Gauss points on `[0, 1]` (three points, exact to degree five).
pub const G3: [(f64, f64); 3] = [
    (0.1127016653792583114820734, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.8872983346207416885179266, 5.0 / 18.0),
];

/// `sum_bnd int v . (sigma n) - p (qbar . n)` from traces of `y`.
pub fn boundary_oracle(space: &DiscreteSpace, y: &[f64]) -> f64 {
    let (x, w) = stdg::quadrature::gauss_legendre(space.degree() + 2);
    let mut total = 0.0;
    for face in &space.mesh().boundary_faces {
        let n = face.normal;
        for (s, ws) in x.iter().zip(&w) {
            let t = 0.5 * (s + 1.0);
            let p = [
                face.start[0] + t * (face.end[0] - face.start[0]),
                face.start[1] + t * (face.end[1] - face.start[1]),
            ];
            let u = space.evaluate(y, face.plus.element, p).unwrap();
            let sn = [u[2] * n[0] + u[4] * n[1], u[4] * n[0] + u[3] * n[1]];
            let val = u[0] * sn[0] + u[1] * sn[1] - u[5] * (u[6] * n[0] + u[7] * n[1]);
            total += 0.5 * ws * face.measure * val;
        }
    }
    total
}

/// Value and gradient of each of the eight components at a point.
#[derive(Clone, Copy)]
pub struct Point {
    pub u: [f64; 8],
    pub g: [[f64; 2]; 8],
}

fn bilinear(a: usize, x: [f64; 2]) -> (f64, [f64; 2]) {
    let l = |i: usize, t: f64| if i == 0 { 1.0 - t } else { t };
    let dl = |i: usize| if i == 0 { -1.0 } else { 1.0 };
    let (ix, iy) = (a % 2, a / 2);
    (l(ix, x[0]) * l(iy, x[1]), [dl(ix) * l(iy, x[1]), l(ix, x[0]) * dl(iy)])
}

/// Unit vector field `phi_a e_c` on the unit square, bilinear basis.
fn unit(c: usize, a: usize, x: [f64; 2]) -> Point {
    let (v, g) = bilinear(a, x);
    let mut p = Point { u: [0.0; 8], g: [[0.0; 2]; 8] };
    p.u[c] = v;
    p.g[c] = g;
    p
}

fn tensor(u: &[f64; 8]) -> [[f64; 2]; 2] {
    [[u[2], u[4]], [u[4], u[3]]]
}

fn frob(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> f64 {
    a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]
}

fn kinv(m: &Material) -> [[f64; 2]; 2] {
    let k = m.k;
    let det = k[0][0] * k[1][1] - k[0][1] * k[1][0];
    [[k[1][1] / det, -k[0][1] / det], [-k[1][0] / det, k[0][0] / det]]
}

fn mv(a: [[f64; 2]; 2], v: [f64; 2]) -> [f64; 2] {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

fn d2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// `<M0 U, Z>` density.
pub fn m0_density(m: &Material, u: &Point, z: &Point) -> f64 {
    let s = tensor(&u.u);
    let tr = s[0][0] + s[1][1];
    let c = m.lambda / (2.0 * m.mu + 2.0 * m.lambda);
    let mut ss = s;
    ss[0][0] -= c * tr;
    ss[1][1] -= c * tr;
    let ss = [[ss[0][0] / (2.0 * m.mu), ss[0][1] / (2.0 * m.mu)], [ss[1][0] / (2.0 * m.mu), ss[1][1] / (2.0 * m.mu)]];
    m.rho * d2([u.u[0], u.u[1]], [z.u[0], z.u[1]]) + frob(ss, tensor(&z.u)) + m.c0 * u.u[5] * z.u[5]
}

/// `<M1 U, Z>` density.
pub fn m1_density(m: &Material, u: &Point, z: &Point) -> f64 {
    let ki = kinv(m);
    let (v, q) = ([u.u[0], u.u[1]], [u.u[6], u.u[7]]);
    let (w, r) = ([z.u[0], z.u[1]], [z.u[6], z.u[7]]);
    let a = m.alpha;
    -a * a * d2(mv(ki, v), w) - a * d2(mv(ki, q), w) - a * d2(mv(ki, v), r) + d2(mv(ki, q), r)
}

/// Volume density of `<A U, Z>` for smooth fields.
pub fn a_density(u: &Point, z: &Point) -> f64 {
    let g = &u.g;
    let div_s = [g[2][0] + g[4][1], g[4][0] + g[3][1]];
    let grad_v = [[g[0][0], g[0][1]], [g[1][0], g[1][1]]];
    let div_q = g[6][0] + g[7][1];
    -d2(div_s, [z.u[0], z.u[1]]) - frob(grad_v, tensor(&z.u)) + div_q * z.u[5] + d2(g[5], [z.u[6], z.u[7]])
}

/// Boundary density of `(A_h + J_d + J_gamma)(U, Z)` on a single element:
/// `(v (x) n) : tau - p rbar . n + (gamma_v v . w + gamma_p p q) / h`.
pub fn boundary_density(u: &Point, z: &Point, n: [f64; 2], gv: f64, gp: f64, h: f64) -> f64 {
    let vn = [[u.u[0] * n[0], u.u[0] * n[1]], [u.u[1] * n[0], u.u[1] * n[1]]];
    frob(vn, tensor(&z.u)) - u.u[5] * d2([z.u[6], z.u[7]], n)
        + (gv * d2([u.u[0], u.u[1]], [z.u[0], z.u[1]]) + gp * u.u[5] * z.u[5]) / h
}

/// Dense `k = 0` slab system on the unit square as a single bilinear
/// element: `(M0 + w L) U = w <F, .> + M0 U_prev` with
/// `w = (1 - e^{-2 nu tau}) / (2 nu)`.
pub struct DenseSlab {
    pub matrix: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

pub fn dense_k0_slab(
    m: &Material,
    gv: f64,
    gp: f64,
    nu: f64,
    tau: f64,
    source: impl Fn([f64; 2]) -> [f64; 8],
    prev: &[f64],
) -> DenseSlab {
    let n = 32;
    let w = (1.0 - (-2.0 * nu * tau).exp()) / (2.0 * nu);
    let h = 2f64.sqrt();
    let dof = |c: usize, a: usize| c * 4 + a;
    let mut m0 = vec![vec![0.0; n]; n];
    let mut l = vec![vec![0.0; n]; n];
    let mut load = vec![0.0; n];
    let faces: [([f64; 2], [f64; 2], [f64; 2]); 4] = [
        ([0.0, 0.0], [1.0, 0.0], [0.0, -1.0]),
        ([1.0, 0.0], [1.0, 1.0], [1.0, 0.0]),
        ([0.0, 1.0], [1.0, 1.0], [0.0, 1.0]),
        ([0.0, 0.0], [0.0, 1.0], [-1.0, 0.0]),
    ];
    for ct in 0..8 {
        for a in 0..4 {
            for cu in 0..8 {
                for b in 0..4 {
                    let (mut s0, mut s1) = (0.0, 0.0);
                    for &(x, wx) in &G3 {
                        for &(y, wy) in &G3 {
                            let (u, z) = (unit(cu, b, [x, y]), unit(ct, a, [x, y]));
                            s0 += wx * wy * m0_density(m, &u, &z);
                            s1 += wx * wy * (m1_density(m, &u, &z) + a_density(&u, &z));
                        }
                    }
                    for (p0, p1, nrm) in faces {
                        for &(s, ws) in &G3 {
                            let x = [p0[0] + s * (p1[0] - p0[0]), p0[1] + s * (p1[1] - p0[1])];
                            s1 += ws * boundary_density(&unit(cu, b, x), &unit(ct, a, x), nrm, gv, gp, h);
                        }
                    }
                    m0[dof(ct, a)][dof(cu, b)] = s0;
                    l[dof(ct, a)][dof(cu, b)] = s1;
                }
            }
            for &(x, wx) in &G3 {
                for &(y, wy) in &G3 {
                    let f = source([x, y]);
                    let fz = unit(ct, a, [x, y]);
                    let t = tensor(&fz.u);
                    let ft = [[f[2], f[4]], [f[4], f[3]]];
                    load[dof(ct, a)] += wx
                        * wy
                        * (f[0] * fz.u[0] + f[1] * fz.u[1] + frob(ft, t) + f[5] * fz.u[5] + f[6] * fz.u[6] + f[7] * fz.u[7]);
                }
            }
        }
    }
    let mut matrix = vec![vec![0.0; n]; n];
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            matrix[i][j] = m0[i][j] + w * l[i][j];
            rhs[i] += m0[i][j] * prev[j];
        }
        rhs[i] += w * load[i];
    }
    DenseSlab { matrix, rhs }
}

/// Gaussian elimination with partial pivoting.
pub fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut x = b.to_vec();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs())).unwrap();
        m.swap(k, p);
        x.swap(k, p);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            if f != 0.0 {
                for j in k..n {
                    m[i][j] -= f * m[k][j];
                }
                x[i] -= f * x[k];
            }
        }
    }
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| m[k][j] * x[j]).sum();
        x[k] = (x[k] - s) / m[k][k];
    }
    x
}

/// Least-squares slope of `log y` over `log x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}
