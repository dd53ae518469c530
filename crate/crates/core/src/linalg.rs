//! Exact sparse vectors and dense matrices, generic over the scalar.
//!
//! The scalar only needs the `num-traits` ring interface plus a total order
//! and signs, so any exact field type works (the crate root fixes
//! [`crate::Rat`] as the default). Floating point does not satisfy `Ord` and
//! is deliberately not admitted: every identity in this crate is checked
//! exactly.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

/// Scalar bound for all exact linear algebra in this crate.
pub trait Scalar:
    Clone + Ord + Zero + One + Signed + fmt::Debug + fmt::Display
{
}

impl<T> Scalar for T where T: Clone + Ord + Zero + One + Signed + fmt::Debug + fmt::Display {}

/// Finitely supported vector over a countable basis `I` with exact
/// coefficients. Zero entries are never stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SparseVec<I: Ord + Clone, T> {
    entries: BTreeMap<I, T>,
}

impl<I: Ord + Clone, T: Scalar> Default for SparseVec<I, T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<I: Ord + Clone, T: Scalar> SparseVec<I, T> {
    pub fn zero() -> Self {
        SparseVec { entries: BTreeMap::new() }
    }

    /// The basic vector `e_i`, the characteristic function of `{i}`.
    pub fn basic(index: I) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(index, T::one());
        SparseVec { entries }
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (I, T)>) -> Self {
        let mut v = SparseVec::zero();
        for (i, c) in entries {
            v.add_to(i, c);
        }
        v
    }

    fn add_to(&mut self, index: I, coeff: T) {
        if coeff.is_zero() {
            return;
        }
        match self.entries.remove(&index) {
            None => {
                self.entries.insert(index, coeff);
            }
            Some(old) => {
                let sum = old + coeff;
                if !sum.is_zero() {
                    self.entries.insert(index, sum);
                }
            }
        }
    }

    pub fn coeff(&self, index: &I) -> T {
        self.entries.get(index).cloned().unwrap_or_else(T::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &I> {
        self.entries.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&I, &T)> {
        self.entries.iter()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Exact l1 norm: the sum of absolute coefficients.
    pub fn norm1(&self) -> T {
        self.entries
            .values()
            .fold(T::zero(), |acc, c| acc + c.abs())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, c) in &other.entries {
            out.add_to(i.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, factor: &T) -> Self {
        if factor.is_zero() {
            return SparseVec::zero();
        }
        SparseVec {
            entries: self
                .entries
                .iter()
                .map(|(i, c)| (i.clone(), c.clone() * factor.clone()))
                .collect(),
        }
    }

    /// Push the vector forward along a basis map, merging fibers exactly.
    /// This is the linear extension of `e_i -> e_{phi(i)}`.
    pub fn push_forward<J: Ord + Clone>(&self, phi: impl Fn(&I) -> J) -> SparseVec<J, T> {
        let mut out = SparseVec::zero();
        for (i, c) in &self.entries {
            out.add_to(phi(i), c.clone());
        }
        out
    }
}

impl<I: Ord + Clone + fmt::Display, T: Scalar> fmt::Display for SparseVec<I, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in &self.entries {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "{c}*e[{i}]")?;
            first = false;
        }
        Ok(())
    }
}

/// Dense row-major matrix with exact entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Option<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return None;
        }
        Some(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, x)| acc + a.clone() * x.clone())
            })
            .collect()
    }

    pub fn mul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out: Matrix<T> = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k).clone();
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j).clone();
                    out.set(i, j, cur + a.clone() * other.get(k, j).clone());
                }
            }
        }
        out
    }

    pub fn col_norm1(&self, j: usize) -> T {
        (0..self.rows).fold(T::zero(), |acc, i| acc + self.get(i, j).abs())
    }

    /// Operator norm as a map l1 -> l1: the maximum column l1 norm. Exact.
    pub fn op_norm1(&self) -> T {
        (0..self.cols)
            .map(|j| self.col_norm1(j))
            .max()
            .unwrap_or_else(T::zero)
    }

    pub fn is_nonexpansive(&self) -> bool {
        self.op_norm1() <= T::one()
    }

    /// Exact rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..m.cols {
            let pivot = (row..m.rows).find(|&r| !m.get(r, col).is_zero());
            let Some(p) = pivot else { continue };
            if p != row {
                for j in 0..m.cols {
                    let a = m.get(row, j).clone();
                    let b = m.get(p, j).clone();
                    m.set(row, j, b);
                    m.set(p, j, a);
                }
            }
            let inv_pivot = m.get(row, col).clone();
            for r in row + 1..m.rows {
                let factor = m.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in col..m.cols {
                    let v = m.get(r, j).clone()
                        - m.get(row, j).clone() * factor.clone() / inv_pivot.clone();
                    m.set(r, j, v);
                }
            }
            rank += 1;
            row += 1;
            if row == m.rows {
                break;
            }
        }
        rank
    }

    /// A particular solution `X` of `self * X = rhs`, if one exists.
    pub fn solve(&self, rhs: &Matrix<T>) -> Option<Matrix<T>> {
        assert_eq!(self.rows, rhs.rows, "dimension mismatch");
        // Gauss-Jordan on the augmented system.
        let mut a = self.clone();
        let mut b = rhs.clone();
        let mut pivot_cols = Vec::new();
        let mut row = 0;
        for col in 0..a.cols {
            let Some(p) = (row..a.rows).find(|&r| !a.get(r, col).is_zero()) else {
                continue;
            };
            for j in 0..a.cols {
                let (x, y) = (a.get(row, j).clone(), a.get(p, j).clone());
                a.set(row, j, y);
                a.set(p, j, x);
            }
            for j in 0..b.cols {
                let (x, y) = (b.get(row, j).clone(), b.get(p, j).clone());
                b.set(row, j, y);
                b.set(p, j, x);
            }
            let piv = a.get(row, col).clone();
            for j in 0..a.cols {
                let v = a.get(row, j).clone() / piv.clone();
                a.set(row, j, v);
            }
            for j in 0..b.cols {
                let v = b.get(row, j).clone() / piv.clone();
                b.set(row, j, v);
            }
            for r in 0..a.rows {
                if r == row {
                    continue;
                }
                let factor = a.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in 0..a.cols {
                    let v = a.get(r, j).clone() - a.get(row, j).clone() * factor.clone();
                    a.set(r, j, v);
                }
                for j in 0..b.cols {
                    let v = b.get(r, j).clone() - b.get(row, j).clone() * factor.clone();
                    b.set(r, j, v);
                }
            }
            pivot_cols.push((row, col));
            row += 1;
            if row == a.rows {
                break;
            }
        }
        // Inconsistent rows: zero row in a with nonzero entry in b.
        for r in row..a.rows {
            if (0..a.cols).all(|j| a.get(r, j).is_zero())
                && (0..b.cols).any(|j| !b.get(r, j).is_zero())
            {
                return None;
            }
        }
        let mut x = Matrix::zeros(self.cols, rhs.cols);
        for (r, c) in pivot_cols {
            for j in 0..b.cols {
                x.set(c, j, b.get(r, j).clone());
            }
        }
        Some(x)
    }
}

impl<T: Scalar> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

/// Exact l1 norm of a dense coordinate vector.
pub fn dense_norm1<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, c| acc + c.abs())
}
