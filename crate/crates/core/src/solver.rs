//! Per-slab space-time systems and the time-marching loop.
//!
//! On slab `n` the discrete solution is represented by its values `U_j` at
//! the weighted Radau nodes. Testing with the Lagrange basis `l_i` gives the
//! block rows
//!
//! ```text
//! sum_j (w^_i l^'_j(s_i) + l^_i(-1) l^_j(-1)) M0 U_j + w_i L U_i
//!     = w_i F(t_i) + l^_i(-1) M0 U^-_{n-1}
//! ```
//!
//! with `L = M1 + A_h + J_d + J_gamma` and physical weights `w_i`.

use std::io::Write;

use crate::error::{input, Error, Result};
use crate::fespace::{DiscreteSpace, Field, N_COMPONENTS};
use crate::operators::{assemble_load, OperatorSet};
use crate::sparse::{dot, norm2, CsrMatrix, SparseLu, Triplets};
use crate::timeslab::{SlabRule, TemporalRule};

/// Pointwise source `F(t, x)` in component order.
pub type Source<'a> = &'a dyn Fn(f64, [f64; 2]) -> [f64; N_COMPONENTS];

const RESIDUAL_TOL: f64 = 1e-10;

/// Temporal coefficients of one slab.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalCoefficients {
    /// `w^_i l^'_j(s_i) + l^_i(-1) l^_j(-1)`.
    pub derivative: Vec<Vec<f64>>,
    /// `l^_i(-1)`.
    pub left: Vec<f64>,
    /// Physical weights `w_i`.
    pub weights: Vec<f64>,
}

impl TemporalCoefficients {
    pub fn new(slab: &SlabRule) -> Self {
        let basis = slab.basis();
        let nodes = &slab.reference.nodes;
        let left = basis.values(-1.0);
        let derivative = nodes
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let d = basis.derivatives(s);
                (0..nodes.len()).map(|j| slab.reference.weights[i] * d[j] + left[i] * left[j]).collect()
            })
            .collect();
        Self { derivative, left, weights: slab.weights.clone() }
    }
}

/// Assembled linear system of one slab.
#[derive(Debug, Clone)]
pub struct SlabSystem {
    pub slab: usize,
    /// Temporal nodes per slab, `k + 1`.
    pub n_nodes: usize,
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
}

/// Block matrix of a slab from `M0` and the node operator `L`.
pub fn slab_matrix(m0: &CsrMatrix, spatial: &CsrMatrix, coeffs: &TemporalCoefficients) -> CsrMatrix {
    let dim = m0.n_rows();
    let nk = coeffs.weights.len();
    let mut t = Triplets::with_capacity(nk * dim, nk * dim, nk * nk * m0.nnz() + nk * spatial.nnz());
    for i in 0..nk {
        for j in 0..nk {
            t.add_block(i * dim, j * dim, coeffs.derivative[i][j], m0);
        }
        t.add_block(i * dim, i * dim, coeffs.weights[i], spatial);
    }
    t.into_csr()
}

/// Right-hand side of a slab from node load vectors and the previous trace.
pub fn slab_rhs(m0: &CsrMatrix, coeffs: &TemporalCoefficients, loads: &[Vec<f64>], prev_trace: &[f64]) -> Vec<f64> {
    let dim = m0.n_rows();
    let nk = coeffs.weights.len();
    let jump = m0.matvec(prev_trace);
    let mut rhs = vec![0.0; nk * dim];
    for i in 0..nk {
        let block = &mut rhs[i * dim..(i + 1) * dim];
        for (r, b) in block.iter_mut().enumerate() {
            *b = coeffs.left[i] * jump[r] + coeffs.weights[i] * loads.get(i).map_or(0.0, |l| l[r]);
        }
    }
    rhs
}

/// Load vectors `<F(t_i), .>_H` at the Radau nodes of a slab.
pub fn node_loads(space: &DiscreteSpace, slab: &SlabRule, source: Option<Source>) -> Vec<Vec<f64>> {
    match source {
        None => Vec::new(),
        Some(f) => slab.nodes.iter().map(|&t| assemble_load(space, |x| f(t, x))).collect(),
    }
}

pub fn assemble_slab(
    space: &DiscreteSpace,
    ops: &OperatorSet,
    rule: &TemporalRule,
    n: usize,
    source: Option<Source>,
    prev_trace: &[f64],
) -> Result<SlabSystem> {
    if n >= rule.n_slabs() {
        return input(format!("slab {n} out of range"));
    }
    if prev_trace.len() != ops.dim() || space.dim() != ops.dim() {
        return input("trace, space and operators disagree in dimension");
    }
    let slab = rule.slab(n);
    let coeffs = TemporalCoefficients::new(slab);
    let matrix = slab_matrix(&ops.m0, &ops.spatial(), &coeffs);
    let rhs = slab_rhs(&ops.m0, &coeffs, &node_loads(space, slab, source), prev_trace);
    Ok(SlabSystem { slab: n, n_nodes: rule.k + 1, matrix, rhs })
}

fn split(x: Vec<f64>, nk: usize) -> Vec<Vec<f64>> {
    let dim = x.len() / nk;
    x.chunks(dim).map(<[f64]>::to_vec).collect()
}

fn solve_factored(lu: &SparseLu, matrix: &CsrMatrix, rhs: &[f64], slab: usize) -> Result<Vec<f64>> {
    let b_norm = norm2(rhs);
    if b_norm == 0.0 {
        return Ok(vec![0.0; rhs.len()]);
    }
    let mut x = lu.solve(rhs);
    let mut rel = f64::INFINITY;
    for _ in 0..3 {
        let r: Vec<f64> = rhs.iter().zip(matrix.matvec(&x)).map(|(b, ax)| b - ax).collect();
        rel = norm2(&r) / b_norm;
        if !rel.is_finite() {
            break;
        }
        if rel <= RESIDUAL_TOL {
            return Ok(x);
        }
        let dx = lu.solve(&r);
        x.iter_mut().zip(dx).for_each(|(xi, d)| *xi += d);
    }
    Err(Error::Solver {
        slab,
        reason: format!("relative residual {rel:.3e} exceeds {RESIDUAL_TOL:e}"),
        condition: lu.condition_estimate(),
    })
}

/// Factor and solve one slab system; returns the node values.
pub fn solve_slab(system: &SlabSystem) -> Result<Vec<Vec<f64>>> {
    if system.rhs.len() != system.matrix.n_rows() || system.n_nodes == 0 {
        return input("right-hand side length does not match the slab matrix");
    }
    let lu = factor(&system.matrix, system.slab)?;
    let x = solve_factored(&lu, &system.matrix, &system.rhs, system.slab)?;
    Ok(split(x, system.n_nodes))
}

fn factor(matrix: &CsrMatrix, slab: usize) -> Result<SparseLu> {
    SparseLu::factor(matrix).map_err(|e| Error::Solver {
        slab,
        reason: e.to_string(),
        condition: f64::INFINITY,
    })
}

/// Fully discrete solution: node values of every slab.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub initial: Vec<f64>,
    /// `nodes[n][j]` is the value at the `j`-th Radau node of slab `n`.
    pub nodes: Vec<Vec<Vec<f64>>>,
}

impl Trajectory {
    pub fn n_slabs(&self) -> usize {
        self.nodes.len()
    }

    /// `U^-(t_n)` for `n = 0..=N`, with `U^-(t_0)` the initial value.
    pub fn trace(&self, n: usize) -> &[f64] {
        if n == 0 {
            &self.initial
        } else {
            self.nodes[n - 1].last().unwrap()
        }
    }

    /// `U^+(t_n)`, the right limit at the start of slab `n`.
    pub fn right_limit(&self, rule: &TemporalRule, n: usize) -> Vec<f64> {
        let l = rule.slab(n).basis().values(-1.0);
        combine(&self.nodes[n], &l)
    }

    /// `U^+(t_n) - U^-(t_n)`.
    pub fn jump(&self, rule: &TemporalRule, n: usize) -> Vec<f64> {
        let plus = self.right_limit(rule, n);
        plus.iter().zip(self.trace(n)).map(|(a, b)| a - b).collect()
    }

    /// Value at time `t`, left-continuous at slab ends.
    pub fn value_at(&self, rule: &TemporalRule, t: f64) -> Result<Vec<f64>> {
        if t == 0.0 {
            return Ok(self.initial.clone());
        }
        let n = rule.mesh.slab_of(t).ok_or_else(|| Error::Input(format!("time {t} outside the time mesh")))?;
        Ok(combine(&self.nodes[n], &rule.slab(n).basis_values(t)))
    }
}

fn combine(values: &[Vec<f64>], weights: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; values[0].len()];
    for (v, w) in values.iter().zip(weights) {
        out.iter_mut().zip(v).for_each(|(o, x)| *o += w * x);
    }
    out
}

/// `U_{0,h}`: the `L^2` projection of the initial data.
pub fn initial_state(space: &DiscreteSpace, u0: impl Fn([f64; 2]) -> [f64; N_COMPONENTS]) -> Vec<f64> {
    space.project_l2(u0)
}

/// Time marcher that factors each distinct slab matrix once.
pub struct Marcher<'a> {
    space: &'a DiscreteSpace,
    ops: &'a OperatorSet,
    spatial: CsrMatrix,
    cache: Option<(u64, CsrMatrix, SparseLu, TemporalCoefficients)>,
    factorizations: usize,
}

impl<'a> Marcher<'a> {
    pub fn new(space: &'a DiscreteSpace, ops: &'a OperatorSet) -> Result<Self> {
        if space.dim() != ops.dim() {
            return input("space and operators disagree in dimension");
        }
        Ok(Self { space, ops, spatial: ops.spatial(), cache: None, factorizations: 0 })
    }

    /// Number of LU factorizations performed so far.
    pub fn factorizations(&self) -> usize {
        self.factorizations
    }

    pub fn step(&mut self, rule: &TemporalRule, n: usize, source: Option<Source>, prev: &[f64]) -> Result<Vec<Vec<f64>>> {
        let slab = rule.slab(n);
        let key = slab.tau().to_bits() ^ (rule.k as u64).rotate_left(48) ^ rule.nu.to_bits().rotate_left(17);
        let coeffs = TemporalCoefficients::new(slab);
        let stale = match &self.cache {
            Some((k, _, _, c)) => *k != key || *c != coeffs,
            None => true,
        };
        if stale {
            let matrix = slab_matrix(&self.ops.m0, &self.spatial, &coeffs);
            let lu = factor(&matrix, n)?;
            self.factorizations += 1;
            self.cache = Some((key, matrix, lu, coeffs));
        }
        let (_, matrix, lu, coeffs) = self.cache.as_ref().unwrap();
        let rhs = slab_rhs(&self.ops.m0, coeffs, &node_loads(self.space, slab, source), prev);
        let x = solve_factored(lu, matrix, &rhs, n)?;
        Ok(split(x, rule.k + 1))
    }

    pub fn march(&mut self, rule: &TemporalRule, source: Option<Source>, initial: Vec<f64>) -> Result<Trajectory> {
        if initial.len() != self.ops.dim() {
            return input("initial state has the wrong dimension");
        }
        let mut nodes: Vec<Vec<Vec<f64>>> = Vec::with_capacity(rule.n_slabs());
        for n in 0..rule.n_slabs() {
            let prev = if n == 0 { &initial } else { nodes[n - 1].last().unwrap() };
            let step = self.step(rule, n, source, prev)?;
            nodes.push(step);
        }
        Ok(Trajectory { initial, nodes })
    }
}

/// March over all slabs of `rule`.
pub fn march(
    space: &DiscreteSpace,
    ops: &OperatorSet,
    rule: &TemporalRule,
    source: Option<Source>,
    initial: Vec<f64>,
) -> Result<Trajectory> {
    Marcher::new(space, ops)?.march(rule, source, initial)
}

/// `<M0 U, U>`.
pub fn energy(ops: &OperatorSet, u: &[f64]) -> f64 {
    dot(u, &ops.m0.matvec(u))
}

/// Slab-end summary: `t`, field `L^2` norms and the energy `<M0 U, U>`.
pub fn write_summary_csv(
    space: &DiscreteSpace,
    ops: &OperatorSet,
    rule: &TemporalRule,
    traj: &Trajectory,
    mut out: impl Write,
) -> Result<()> {
    writeln!(out, "n,t,norm_v,norm_sigma,norm_p,norm_qbar,energy")?;
    for n in 0..=traj.n_slabs() {
        let u = traj.trace(n);
        let t = rule.mesh.points()[n];
        let norms: Vec<f64> = [Field::Velocity, Field::Stress, Field::Pressure, Field::Flux]
            .iter()
            .map(|f| space.component_norm_sq(u, f.components()).sqrt())
            .collect();
        writeln!(
            out,
            "{n},{t:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            norms[0],
            norms[1],
            norms[2],
            norms[3],
            energy(ops, u)
        )?;
    }
    Ok(())
}
