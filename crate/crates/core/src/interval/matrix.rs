use serde::{Deserialize, Serialize};

use super::{Interval, IntervalError, IntervalVector};

/// Row-major interval matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Interval>,
}

fn mismatch(msg: String) -> IntervalError {
    IntervalError::ShapeMismatch(msg)
}

impl IntervalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Interval>) -> Result<Self, IntervalError> {
        if rows == 0 || cols == 0 || rows * cols != entries.len() {
            return Err(mismatch(format!("{rows}x{cols} with {} entries", entries.len())));
        }
        Ok(IntervalMatrix { rows, cols, entries })
    }

    pub fn from_rows<const C: usize>(rows: &[[Interval; C]]) -> Self {
        let entries = rows.iter().flat_map(|r| r.iter().copied()).collect();
        IntervalMatrix::new(rows.len(), C, entries).expect("non-empty rows")
    }

    pub fn from_points<const C: usize>(rows: &[[f64; C]]) -> Self {
        let entries = rows.iter().flat_map(|r| r.iter().map(|&x| Interval::point(x))).collect();
        IntervalMatrix::new(rows.len(), C, entries).expect("non-empty rows")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntervalMatrix::new(rows, cols, vec![Interval::ZERO; rows * cols]).expect("positive shape")
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntervalMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Interval::ONE);
        }
        m
    }

    pub fn diag(d: &[Interval]) -> Self {
        let mut m = IntervalMatrix::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m.set(i, i, *x);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Interval {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: Interval) {
        self.entries[i * self.cols + j] = x;
    }

    pub fn entries(&self) -> &[Interval] {
        &self.entries
    }

    pub fn transpose(&self) -> IntervalMatrix {
        let mut t = IntervalMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, o: &IntervalMatrix) -> Result<IntervalMatrix, IntervalError> {
        if self.cols != o.rows {
            return Err(mismatch(format!("matmul {}x{} by {}x{}", self.rows, self.cols, o.rows, o.cols)));
        }
        let mut p = IntervalMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                p.set(i, j, (0..self.cols).map(|k| self.get(i, k) * o.get(k, j)).sum());
            }
        }
        Ok(p)
    }

    pub fn matvec(&self, v: &IntervalVector) -> Result<IntervalVector, IntervalError> {
        if self.cols != v.dim() {
            return Err(mismatch(format!("matvec {}x{} by {}", self.rows, self.cols, v.dim())));
        }
        let e = (0..self.rows).map(|i| (0..self.cols).map(|k| self.get(i, k) * v[k]).sum()).collect();
        IntervalVector::new(e)
    }

    fn zip(&self, o: &IntervalMatrix, f: impl Fn(Interval, Interval) -> Interval) -> Result<IntervalMatrix, IntervalError> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(mismatch(format!("{}x{} vs {}x{}", self.rows, self.cols, o.rows, o.cols)));
        }
        let e = self.entries.iter().zip(&o.entries).map(|(a, b)| f(*a, *b)).collect();
        IntervalMatrix::new(self.rows, self.cols, e)
    }

    pub fn add(&self, o: &IntervalMatrix) -> Result<IntervalMatrix, IntervalError> {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &IntervalMatrix) -> Result<IntervalMatrix, IntervalError> {
        self.zip(o, |a, b| a - b)
    }

    pub fn hull(&self, o: &IntervalMatrix) -> Result<IntervalMatrix, IntervalError> {
        self.zip(o, |a, b| a.hull(b))
    }

    pub fn scale(&self, k: Interval) -> IntervalMatrix {
        IntervalMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|a| *a * k).collect() }
    }

    /// (M + Mᵀ)/2. The diagonal is copied unchanged and the two off-diagonal
    /// entries are made identical, so the result is a set of symmetric
    /// matrices.
    pub fn sym_part(&self) -> Result<IntervalMatrix, IntervalError> {
        if !self.is_square() {
            return Err(mismatch(format!("sym_part of {}x{}", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut s = self.clone();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = (self.get(i, j) + self.get(j, i)).scale(0.5);
                s.set(i, j, v);
                s.set(j, i, v);
            }
        }
        Ok(s)
    }

    /// `Mᵀ·Q + Q·M` for diagonal `Q = diag(q)`.
    pub fn cone_form(&self, q: &[Interval]) -> Result<IntervalMatrix, IntervalError> {
        if !self.is_square() || q.len() != self.rows {
            return Err(mismatch(format!("cone form of {}x{} with diag of {}", self.rows, self.cols, q.len())));
        }
        let n = self.rows;
        let mut s = IntervalMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                // (MᵀQ)_ij = M_ji q_j, (QM)_ij = q_i M_ij
                let v = self.get(j, i) * q[j] + q[i] * self.get(i, j);
                s.set(i, j, v);
                s.set(j, i, v);
            }
        }
        Ok(s)
    }

    pub fn subset(&self, o: &IntervalMatrix) -> bool {
        self.rows == o.rows && self.cols == o.cols && self.entries.iter().zip(&o.entries).all(|(a, b)| a.subset(*b))
    }

    pub fn contains(&self, m: &[f64]) -> bool {
        m.len() == self.entries.len() && self.entries.iter().zip(m).all(|(a, &b)| a.contains(b))
    }

    pub fn mid(&self) -> Vec<f64> {
        self.entries.iter().map(|a| a.mid()).collect()
    }

    /// Upper bound on the max-row-sum norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| Interval::point(self.get(i, j).mag())).sum::<Interval>().hi())
            .fold(0.0, f64::max)
    }
}
