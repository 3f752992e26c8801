//! One-dimensional Gauss rules and Lagrange interpolation helpers shared by
//! the spatial and temporal discretizations.

use crate::error::{Error, Result};

/// Legendre polynomial `P_n(x)` and its derivative.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = if (1.0 - x * x).abs() < 1e-300 {
        // P_n'(±1) = (±1)^{n+1} n(n+1)/2
        let s = if x > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        s * nf * (nf + 1.0) / 2.0
    } else {
        nf * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, dp)
}

/// `n`-point Gauss–Legendre rule on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one point");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `n`-point Gauss–Lobatto–Legendre nodes on `[-1, 1]` (`n >= 2`), ascending.
pub fn gauss_lobatto_nodes(n: usize) -> Vec<f64> {
    assert!(n >= 2, "Gauss-Lobatto rule needs at least two points");
    let m = n - 1;
    let mut nodes = vec![0.0; n];
    nodes[0] = -1.0;
    nodes[m] = 1.0;
    let mf = m as f64;
    for i in 1..m {
        // interior nodes are the roots of P_m'
        let mut x = -(std::f64::consts::PI * i as f64 / mf).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(m, x);
            let ddp = (2.0 * x * dp - mf * (mf + 1.0) * p) / (1.0 - x * x);
            let dx = dp / ddp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
    }
    nodes
}

/// Lagrange basis on a set of distinct 1D nodes.
#[derive(Debug, Clone)]
pub struct Lagrange1d {
    nodes: Vec<f64>,
    denominators: Vec<f64>,
}

impl Lagrange1d {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Input("Lagrange basis needs at least one node".into()));
        }
        let mut denominators = Vec::with_capacity(nodes.len());
        for (j, &xj) in nodes.iter().enumerate() {
            let mut d = 1.0;
            for (m, &xm) in nodes.iter().enumerate() {
                if m != j {
                    d *= xj - xm;
                }
            }
            if d == 0.0 || !d.is_finite() {
                return Err(Error::Input("Lagrange nodes must be distinct".into()));
            }
            denominators.push(d);
        }
        Ok(Self { nodes, denominators })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn values(&self, x: f64) -> Vec<f64> {
        (0..self.nodes.len())
            .map(|j| {
                let mut v = 1.0;
                for (m, &xm) in self.nodes.iter().enumerate() {
                    if m != j {
                        v *= x - xm;
                    }
                }
                v / self.denominators[j]
            })
            .collect()
    }

    pub fn derivatives(&self, x: f64) -> Vec<f64> {
        let n = self.nodes.len();
        (0..n)
            .map(|j| {
                let mut sum = 0.0;
                for m in 0..n {
                    if m == j {
                        continue;
                    }
                    let mut prod = 1.0;
                    for l in 0..n {
                        if l != j && l != m {
                            prod *= x - self.nodes[l];
                        }
                    }
                    sum += prod;
                }
                sum / self.denominators[j]
            })
            .collect()
    }

    /// Evaluate the interpolant with the given nodal values.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        self.values(x).iter().zip(values).map(|(l, v)| l * v).sum()
    }

    pub fn interpolate_derivative(&self, values: &[f64], x: f64) -> f64 {
        self.derivatives(x).iter().zip(values).map(|(l, v)| l * v).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_monomials() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-14, "n={n} deg={deg}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn lobatto_nodes_are_symmetric_roots() {
        let x = gauss_lobatto_nodes(3);
        assert_eq!(x, vec![-1.0, 0.0, 1.0]);
        let x = gauss_lobatto_nodes(4);
        let r = (1.0f64 / 5.0).sqrt();
        assert!((x[1] + r).abs() < 1e-15 && (x[2] - r).abs() < 1e-15);
    }

    #[test]
    fn lagrange_partition_of_unity_and_derivative() {
        let l = Lagrange1d::new(gauss_lobatto_nodes(5)).unwrap();
        for &x in &[-0.9, -0.2, 0.33, 0.8] {
            let s: f64 = l.values(x).iter().sum();
            assert!((s - 1.0).abs() < 1e-14);
            let ds: f64 = l.derivatives(x).iter().sum();
            assert!(ds.abs() < 1e-12);
            let h = 1e-6;
            let fd: Vec<f64> = l
                .values(x + h)
                .iter()
                .zip(l.values(x - h))
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect();
            for (a, b) in fd.iter().zip(l.derivatives(x)) {
                assert!((a - b).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn duplicate_nodes_rejected() {
        assert!(Lagrange1d::new(vec![0.0, 0.0]).is_err());
    }
}
