//! Compressed sparse row matrices and a direct sparse LU wrapper.

use std::io::Write;

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::error::{Error, Result};

/// Coordinate-format accumulator; duplicate entries are summed.
#[derive(Debug, Clone, Default)]
pub struct Triplets {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl Triplets {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        Self { n_rows, n_cols, entries: Vec::new() }
    }

    pub fn with_capacity(n_rows: usize, n_cols: usize, cap: usize) -> Self {
        Self { n_rows, n_cols, entries: Vec::with_capacity(cap) }
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.n_rows && col < self.n_cols);
        if value != 0.0 {
            self.entries.push((row, col, value));
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Append a scaled copy of `m` with its origin shifted to `(r0, c0)`.
    pub fn add_block(&mut self, r0: usize, c0: usize, scale: f64, m: &CsrMatrix) {
        if scale == 0.0 {
            return;
        }
        for r in 0..m.n_rows {
            for (c, v) in m.row(r) {
                self.push(r0 + r, c0 + c, scale * v);
            }
        }
    }

    pub fn into_csr(mut self) -> CsrMatrix {
        self.entries.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; self.n_rows + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..self.n_rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        CsrMatrix { n_rows: self.n_rows, n_cols: self.n_cols, row_ptr, col_idx, values }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Triplets::new(n_rows, n_cols).into_csr()
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&c) {
            Ok(i) => self.values[span.start + i],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_cols);
        (0..self.n_rows).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect()
    }

    /// `y^T A x`.
    pub fn bilinear(&self, y: &[f64], x: &[f64]) -> f64 {
        dot(y, &self.matvec(x))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Triplets::with_capacity(self.n_cols, self.n_rows, self.nnz());
        for r in 0..self.n_rows {
            for (c, v) in self.row(r) {
                t.push(c, r, v);
            }
        }
        t.into_csr()
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        let mut t = Triplets::with_capacity(self.n_rows, self.n_cols, self.nnz() + other.nnz());
        for (m, s) in [(self, a), (other, b)] {
            for r in 0..m.n_rows {
                for (c, v) in m.row(r) {
                    t.push(r, c, s * v);
                }
            }
        }
        t.into_csr()
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut m = self.clone();
        m.values.iter_mut().for_each(|v| *v *= s);
        m
    }

    /// Largest `|A_ij - A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let t = self.transpose();
        let d = self.combine(1.0, &t, -1.0);
        d.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn norm_1(&self) -> f64 {
        let mut col = vec![0.0; self.n_cols];
        for r in 0..self.n_rows {
            for (c, v) in self.row(r) {
                col[c] += v.abs();
            }
        }
        col.into_iter().fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let mut m = Mat::zeros(self.n_rows, self.n_cols);
        for r in 0..self.n_rows {
            for (c, v) in self.row(r) {
                m[(r, c)] += v;
            }
        }
        m
    }

    pub fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let trip: Vec<Triplet<usize, usize, f64>> = (0..self.n_rows)
            .flat_map(|r| self.row(r).map(move |(c, v)| Triplet::new(r, c, v)))
            .collect();
        SparseColMat::try_new_from_triplets(self.n_rows, self.n_cols, &trip)
            .map_err(|e| Error::Numeric(format!("sparse matrix construction failed: {e:?}")))
    }

    /// Coordinate text export, one `row col value` line per stored entry.
    pub fn write_coo(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "{} {} {}", self.n_rows, self.n_cols, self.nnz())?;
        for r in 0..self.n_rows {
            for (c, v) in self.row(r) {
                writeln!(out, "{r} {c} {v:.17e}")?;
            }
        }
        Ok(())
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Sparse LU factorization with partial pivoting.
pub struct SparseLu {
    lu: Lu<usize, f64>,
    n: usize,
    norm_1: f64,
}

impl std::fmt::Debug for SparseLu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SparseLu").field("n", &self.n).field("norm_1", &self.norm_1).finish()
    }
}

impl SparseLu {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        if a.n_rows != a.n_cols {
            return Err(Error::Numeric(format!("cannot factor a {}x{} matrix", a.n_rows, a.n_cols)));
        }
        let lu = a
            .to_faer()?
            .sp_lu()
            .map_err(|e| Error::Numeric(format!("sparse LU failed: {e:?}")))?;
        Ok(Self { lu, n: a.n_rows, norm_1: a.norm_1() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut b = Mat::from_fn(self.n, 1, |i, _| rhs[i]);
        self.lu.solve_in_place(b.as_mut());
        (0..self.n).map(|i| b[(i, 0)]).collect()
    }

    pub fn solve_transpose(&self, rhs: &[f64]) -> Vec<f64> {
        let mut b = Mat::from_fn(self.n, 1, |i, _| rhs[i]);
        self.lu.solve_transpose_in_place(b.as_mut());
        (0..self.n).map(|i| b[(i, 0)]).collect()
    }

    /// Hager–Higham estimate of the 1-norm condition number.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 1.0;
        }
        let mut x = vec![1.0 / n as f64; n];
        let mut est = 0.0;
        for _ in 0..5 {
            let y = self.solve(&x);
            let y_norm: f64 = y.iter().map(|v| v.abs()).sum();
            if !y_norm.is_finite() {
                return f64::INFINITY;
            }
            if y_norm <= est {
                break;
            }
            est = y_norm;
            let xi: Vec<f64> = y.iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
            let z = self.solve_transpose(&xi);
            let (j, zmax) = z.iter().enumerate().fold((0, 0.0), |(bj, bv), (j, v)| if v.abs() > bv { (j, v.abs()) } else { (bj, bv) });
            if zmax <= dot(&z, &x) {
                break;
            }
            x = vec![0.0; n];
            x[j] = 1.0;
        }
        est * self.norm_1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use faer::linalg::solvers::DenseSolveCore;

    fn sample() -> CsrMatrix {
        let mut t = Triplets::new(3, 3);
        for (r, c, v) in [(0, 0, 4.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0), (2, 2, 2.0), (1, 2, -1.0), (0, 0, 1.0)] {
            t.push(r, c, v);
        }
        t.into_csr()
    }

    #[test]
    fn duplicates_summed_and_lookup() {
        let m = sample();
        assert_eq!(m.get(0, 0), 5.0);
        assert_eq!(m.get(2, 0), 0.0);
        assert_eq!(m.nnz(), 6);
        assert_eq!(m.matvec(&[1.0, 1.0, 1.0]), vec![6.0, 3.0, 2.0]);
        assert_eq!(m.asymmetry(), 1.0);
        assert_eq!(m.transpose().get(2, 1), -1.0);
    }

    #[test]
    fn lu_solves_and_estimates_condition() {
        let m = sample();
        let lu = SparseLu::factor(&m).unwrap();
        let x = lu.solve(&[1.0, 2.0, 3.0]);
        let r = m.matvec(&x);
        for (a, b) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        let xt = lu.solve_transpose(&[1.0, 0.0, 0.0]);
        let rt = m.transpose().matvec(&xt);
        assert!((rt[0] - 1.0).abs() < 1e-14 && rt[1].abs() < 1e-14);
        let dense = m.to_dense();
        let inv = dense.partial_piv_lu().inverse();
        let mut inv1 = 0.0f64;
        for j in 0..3 {
            inv1 = inv1.max((0..3).map(|i| inv[(i, j)].abs()).sum());
        }
        let exact = inv1 * m.norm_1();
        let est = lu.condition_estimate();
        assert!(est <= exact * (1.0 + 1e-12) && est >= exact / 3.0, "{est} vs {exact}");
    }

    #[test]
    fn coo_export() {
        let mut buf = Vec::new();
        sample().write_coo(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().count(), 7);
        assert!(s.starts_with("3 3 6"));
    }
}
