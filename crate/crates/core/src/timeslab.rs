//! Time slabs, exponentially weighted right Gauss–Radau rules, temporal
//! interpolants and the weighted time-mesh norms.

use faer::{Mat, Side};

use crate::error::{input, Error, Result};
use crate::quadrature::{gauss_legendre, Lagrange1d};

/// Quadrature rule on the reference interval `(-1, 1]` for the weight
/// `exp(-c (s + 1))`. The last node is exactly `1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadauRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub c: f64,
}

/// `(k + 1)`-point right Radau rule exact for `exp(-c (s + 1)) p(s)`, `p` of
/// degree `<= 2k`.
///
/// The recurrence coefficients of the weight are generated by the
/// discretized Stieltjes procedure on a Gauss–Legendre grid fine enough to
/// resolve the exponential to rounding level. The last diagonal entry of
/// the Jacobi matrix is then modified so that `+1` becomes an eigenvalue.
pub fn weighted_gauss_radau(k: usize, c: f64) -> Result<RadauRule> {
    if !c.is_finite() || c < 0.0 {
        return input(format!("weight parameter must be finite and nonnegative, got {c}"));
    }
    let m = 64usize.max(8 * c.ceil() as usize + 2 * k + 2);
    let (x, w) = gauss_legendre(m);
    let wt: Vec<f64> = x.iter().zip(&w).map(|(x, w)| w * (-c * (x + 1.0)).exp()).collect();

    // Stieltjes: monic orthogonal polynomials on the discrete measure.
    let mut alpha = Vec::with_capacity(k + 1);
    let mut beta = Vec::with_capacity(k + 1);
    let mut p_prev = vec![0.0; m];
    let mut p_cur = vec![1.0; m];
    let mut norm_prev = 1.0;
    for j in 0..=k {
        let norm: f64 = wt.iter().zip(&p_cur).map(|(w, p)| w * p * p).sum();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Numeric(format!(
                "Stieltjes recurrence broke down at degree {j} (k = {k}, c = {c}, norm = {norm:e})"
            )));
        }
        let a: f64 = wt.iter().zip(&p_cur).zip(&x).map(|((w, p), x)| w * x * p * p).sum::<f64>() / norm;
        let b = if j == 0 { norm } else { norm / norm_prev };
        alpha.push(a);
        beta.push(b);
        if j < k {
            let next: Vec<f64> = (0..m).map(|i| (x[i] - a) * p_cur[i] - if j == 0 { 0.0 } else { b * p_prev[i] }).collect();
            p_prev = std::mem::replace(&mut p_cur, next);
        }
        norm_prev = norm;
    }

    // Radau modification: force +1 to be a node.
    if k > 0 {
        let (mut q_prev, mut q_cur) = (0.0, 1.0);
        for j in 0..k {
            let q_next = (1.0 - alpha[j]) * q_cur - if j == 0 { 0.0 } else { beta[j] * q_prev };
            q_prev = q_cur;
            q_cur = q_next;
        }
        if q_cur == 0.0 || !q_cur.is_finite() {
            return Err(Error::Numeric(format!(
                "Radau modification failed: orthogonal polynomial of degree {k} vanishes at +1 (c = {c})"
            )));
        }
        alpha[k] = 1.0 - beta[k] * q_prev / q_cur;
    } else {
        alpha[0] = 1.0;
    }

    let n = k + 1;
    let jacobi = Mat::from_fn(n, n, |i, j| {
        if i == j {
            alpha[i]
        } else if i == j + 1 {
            beta[i].sqrt()
        } else if j == i + 1 {
            beta[j].sqrt()
        } else {
            0.0
        }
    });
    let eig = jacobi
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numeric(format!("Jacobi eigenproblem failed (k = {k}, c = {c}): {e:?}")))?;
    let s = eig.S().column_vector();
    let u = eig.U();
    let mut nodes: Vec<f64> = (0..n).map(|i| s[i]).collect();
    let weights: Vec<f64> = (0..n).map(|i| beta[0] * u[(0, i)] * u[(0, i)]).collect();

    if (nodes[n - 1] - 1.0).abs() > 1e-10 {
        return Err(Error::Numeric(format!(
            "largest Radau node {} differs from +1 (k = {k}, c = {c})",
            nodes[n - 1]
        )));
    }
    nodes[n - 1] = 1.0;
    for i in 0..n {
        if !(nodes[i] > -1.0) || (i > 0 && nodes[i] <= nodes[i - 1]) {
            return Err(Error::Numeric(format!("Radau nodes not increasing in (-1, 1]: {nodes:?}")));
        }
        if !(weights[i] > 0.0) {
            return Err(Error::Numeric(format!("nonpositive Radau weight: {weights:?}")));
        }
    }
    Ok(RadauRule { nodes, weights, c })
}

/// Partition `0 = t_0 < ... < t_N = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeMesh {
    points: Vec<f64>,
    /// Common step of a uniform mesh, so every slab sees bitwise the same `tau`.
    step: Option<f64>,
}

impl TimeMesh {
    pub fn uniform(t_final: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return input("slab count must be positive");
        }
        if !(t_final > 0.0) || !t_final.is_finite() {
            return input(format!("final time must be positive, got {t_final}"));
        }
        let tau = t_final / n as f64;
        let mut points: Vec<f64> = (0..=n).map(|i| i as f64 * tau).collect();
        points[n] = t_final;
        Ok(Self { points, step: Some(tau) })
    }

    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 || points[0] != 0.0 {
            return input("time mesh must start at 0 and contain at least one slab");
        }
        if points.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return input("time mesh points must be strictly increasing");
        }
        Ok(Self { points, step: None })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn n_slabs(&self) -> usize {
        self.points.len() - 1
    }

    pub fn start(&self, n: usize) -> f64 {
        self.points[n]
    }

    pub fn end(&self, n: usize) -> f64 {
        self.points[n + 1]
    }

    pub fn tau(&self, n: usize) -> f64 {
        self.step.unwrap_or(self.points[n + 1] - self.points[n])
    }

    pub fn max_tau(&self) -> f64 {
        (0..self.n_slabs()).map(|n| self.tau(n)).fold(0.0, f64::max)
    }

    pub fn final_time(&self) -> f64 {
        *self.points.last().unwrap()
    }

    /// Slab index with `t` in `(t_n, t_{n+1}]`; `t = 0` maps to slab 0.
    pub fn slab_of(&self, t: f64) -> Option<usize> {
        if t < 0.0 || t > self.final_time() {
            return None;
        }
        Some(self.points[1..].partition_point(|&p| p < t).min(self.n_slabs() - 1))
    }
}

/// Weighted Radau data of one slab.
#[derive(Debug, Clone)]
pub struct SlabRule {
    pub start: f64,
    pub end: f64,
    pub reference: RadauRule,
    tau: f64,
    /// Physical nodes `t_{n,mu}`.
    pub nodes: Vec<f64>,
    /// Physical weights `tau_n / 2 * w_mu`.
    pub weights: Vec<f64>,
    basis: Lagrange1d,
}

impl SlabRule {
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn to_reference(&self, t: f64) -> f64 {
        2.0 * (t - self.start) / self.tau() - 1.0
    }

    /// Lagrange basis on the Radau nodes.
    pub fn basis(&self) -> &Lagrange1d {
        &self.basis
    }

    pub fn basis_values(&self, t: f64) -> Vec<f64> {
        self.basis.values(self.to_reference(t))
    }

    /// `Q_n` applied to node values of an integrand.
    pub fn apply(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}

/// Per-slab weighted Radau rules of degree `k` for weight exponent `nu`.
#[derive(Debug, Clone)]
pub struct TemporalRule {
    pub k: usize,
    pub nu: f64,
    pub mesh: TimeMesh,
    slabs: Vec<SlabRule>,
}

impl TemporalRule {
    pub fn new(mesh: TimeMesh, k: usize, nu: f64) -> Result<Self> {
        if !(nu >= 0.0) || !nu.is_finite() {
            return input(format!("weight exponent must be finite and nonnegative, got {nu}"));
        }
        let mut slabs: Vec<SlabRule> = Vec::with_capacity(mesh.n_slabs());
        for n in 0..mesh.n_slabs() {
            let (a, b) = (mesh.start(n), mesh.end(n));
            let tau = mesh.tau(n);
            let reference = match slabs.last() {
                Some(prev) if prev.tau().to_bits() == tau.to_bits() => prev.reference.clone(),
                _ => weighted_gauss_radau(k, nu * tau)?,
            };
            let nodes = reference.nodes.iter().map(|s| a + 0.5 * tau * (s + 1.0)).collect::<Vec<_>>();
            let mut nodes = nodes;
            nodes[k] = b;
            let weights = reference.weights.iter().map(|w| 0.5 * tau * w).collect();
            let basis = Lagrange1d::new(reference.nodes.clone())?;
            slabs.push(SlabRule { start: a, end: b, reference, tau, nodes, weights, basis });
        }
        Ok(Self { k, nu, mesh, slabs })
    }

    pub fn n_slabs(&self) -> usize {
        self.slabs.len()
    }

    pub fn slab(&self, n: usize) -> &SlabRule {
        &self.slabs[n]
    }

    pub fn slabs(&self) -> &[SlabRule] {
        &self.slabs
    }

    /// `e^{-2 nu t_{n-1}}` for slab `n` (zero-based).
    pub fn slab_factor(&self, n: usize) -> f64 {
        (-2.0 * self.nu * self.slabs[n].start).exp()
    }

    /// `sum_n e^{-2 nu t_{n-1}} Q_n[f]` for a nonnegative integrand given at
    /// the Radau nodes of every slab.
    pub fn weighted_sum(&self, integrand: &[Vec<f64>]) -> Result<f64> {
        self.check_shape(integrand)?;
        if integrand.iter().flatten().any(|v| *v < 0.0 || v.is_nan()) {
            return input("weighted sum expects a nonnegative integrand");
        }
        Ok(self.weighted_sum_unchecked(integrand))
    }

    fn weighted_sum_unchecked(&self, integrand: &[Vec<f64>]) -> f64 {
        self.slabs
            .iter()
            .enumerate()
            .map(|(n, s)| self.slab_factor(n) * s.apply(&integrand[n]))
            .sum()
    }

    /// `||w||^2_{tau,nu}` from node values of a scalar function.
    pub fn norm_sq(&self, values: &[Vec<f64>]) -> Result<f64> {
        self.check_shape(values)?;
        let sq: Vec<Vec<f64>> = values.iter().map(|v| v.iter().map(|x| x * x).collect()).collect();
        Ok(self.weighted_sum_unchecked(&sq))
    }

    /// `sum_n e^{-2 nu t_{n-1}} Q_n[w z]`.
    pub fn pairing(&self, w: &[Vec<f64>], z: &[Vec<f64>]) -> Result<f64> {
        self.check_shape(w)?;
        self.check_shape(z)?;
        let prod: Vec<Vec<f64>> = w.iter().zip(z).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y).collect()).collect();
        Ok(self.weighted_sum_unchecked(&prod))
    }

    /// Sample `f` at every Radau node.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<Vec<f64>> {
        self.slabs.iter().map(|s| s.nodes.iter().map(|&t| f(t)).collect()).collect()
    }

    fn check_shape(&self, values: &[Vec<f64>]) -> Result<()> {
        if values.len() != self.slabs.len() || values.iter().any(|v| v.len() != self.k + 1) {
            return input(format!(
                "expected {} slabs with {} node values each",
                self.slabs.len(),
                self.k + 1
            ));
        }
        Ok(())
    }
}

/// Piecewise polynomial of degree `k`, left-continuous at slab ends, given by
/// its values at the Radau nodes of each slab and at `t = 0`.
#[derive(Debug, Clone)]
pub struct RadauInterpolant<'a> {
    rule: &'a TemporalRule,
    initial: f64,
    values: Vec<Vec<f64>>,
}

/// `I_tau f` from `f(0)` and node values per slab.
pub fn interpolate_radau(rule: &TemporalRule, initial: f64, values: Vec<Vec<f64>>) -> Result<RadauInterpolant<'_>> {
    rule.check_shape(&values)?;
    Ok(RadauInterpolant { rule, initial, values })
}

impl RadauInterpolant<'_> {
    pub fn eval(&self, t: f64) -> Option<f64> {
        if t == 0.0 {
            return Some(self.initial);
        }
        let n = self.rule.mesh.slab_of(t)?;
        let s = self.rule.slab(n);
        Some(s.basis.interpolate(&self.values[n], s.to_reference(t)))
    }

    /// Right limit at the start of slab `n`.
    pub fn right_limit(&self, n: usize) -> f64 {
        self.rule.slab(n).basis.interpolate(&self.values[n], -1.0)
    }
}

/// Continuous piecewise polynomial of degree `k + 1` interpolating at each
/// slab start and its Radau nodes.
#[derive(Debug, Clone)]
pub struct RadauPlusInterpolant<'a> {
    rule: &'a TemporalRule,
    bases: Vec<Lagrange1d>,
    values: Vec<Vec<f64>>,
}

/// `I^{k+1}_tau f` from `f(t_{n-1})` and the node values of every slab.
pub fn interpolate_radau_plus(
    rule: &TemporalRule,
    starts: Vec<f64>,
    values: Vec<Vec<f64>>,
) -> Result<RadauPlusInterpolant<'_>> {
    rule.check_shape(&values)?;
    if starts.len() != rule.n_slabs() {
        return input(format!("expected {} slab start values", rule.n_slabs()));
    }
    let mut bases = Vec::with_capacity(rule.n_slabs());
    let mut all = Vec::with_capacity(rule.n_slabs());
    for (n, (f0, vals)) in starts.into_iter().zip(values).enumerate() {
        let mut nodes = vec![-1.0];
        nodes.extend_from_slice(&rule.slab(n).reference.nodes);
        bases.push(Lagrange1d::new(nodes)?);
        let mut v = vec![f0];
        v.extend(vals);
        all.push(v);
    }
    Ok(RadauPlusInterpolant { rule, bases, values: all })
}

impl RadauPlusInterpolant<'_> {
    pub fn eval(&self, t: f64) -> Option<f64> {
        let n = self.rule.mesh.slab_of(t)?;
        Some(self.bases[n].interpolate(&self.values[n], self.rule.slab(n).to_reference(t)))
    }

    pub fn derivative(&self, t: f64) -> Option<f64> {
        let n = self.rule.mesh.slab_of(t)?;
        let s = self.rule.slab(n);
        Some(self.bases[n].interpolate_derivative(&self.values[n], s.to_reference(t)) * 2.0 / s.tau())
    }
}
