//! Dense matrices over exact rationals.
//!
//! Supplies the determinant (fraction-free Bareiss elimination), linear
//! solves, and Schur complements that the characteristic-polynomial and
//! reduction modules are built on. Sizes here are tiny, so everything is
//! straightforward dense arithmetic.

use num::{One, Zero};

use crate::rat::{rat_to_f64, Rat};
use crate::{Error, Result};

/// Row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Rat::one();
        }
        m
    }

    /// Builds from rows; all rows must share one length.
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn row_count(&self) -> usize {
        self.rows
    }

    pub fn col_count(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|i| (0..i).all(|j| self.at(i, j) == self.at(j, i)))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *t.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        t
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: &Rat) -> Self {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.at(i, k);
                if aik.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = aik * other.at(k, j);
                    *out.at_mut(i, j) += t;
                }
            }
        }
        out
    }

    /// Rows `rows` and columns `cols`, in the order given.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zero(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                *out.at_mut(i, j) = self.at(r, c).clone();
            }
        }
        out
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| rat_to_f64(self.at(i, j))).collect())
            .collect()
    }

    /// Determinant by fraction-free Bareiss elimination with row pivoting.
    pub fn det(&self) -> Rat {
        assert!(self.is_square(), "determinant needs a square matrix");
        let n = self.rows;
        if n == 0 {
            return Rat::one();
        }
        let mut a: Vec<Vec<Rat>> = (0..n)
            .map(|i| (0..n).map(|j| self.at(i, j).clone()).collect())
            .collect();
        let mut negate = false;
        let mut prev = Rat::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        negate = !negate;
                    }
                    None => return Rat::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                }
                a[i][k] = Rat::zero();
            }
            prev = a[k][k].clone();
        }
        let d = std::mem::take(&mut a[n - 1][n - 1]);
        if negate {
            -d
        } else {
            d
        }
    }

    /// Solves `self · X = rhs` by Gaussian elimination with pivoting.
    /// Errors if the matrix is singular.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        assert!(self.is_square());
        assert_eq!(self.rows, rhs.rows);
        let n = self.rows;
        let w = rhs.cols;
        let mut a: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.at(i, j).clone())
                    .chain((0..w).map(|j| rhs.at(i, j).clone()))
                    .collect()
            })
            .collect();
        for k in 0..n {
            if a[k][k].is_zero() {
                let r = (k + 1..n)
                    .find(|&r| !a[r][k].is_zero())
                    .ok_or_else(|| Error::Internal("singular system".into()))?;
                a.swap(k, r);
            }
            let pivot = a[k][k].clone();
            for j in k..n + w {
                a[k][j] = &a[k][j] / &pivot;
            }
            for i in 0..n {
                if i == k || a[i][k].is_zero() {
                    continue;
                }
                let factor = a[i][k].clone();
                for j in k..n + w {
                    let t = &factor * &a[k][j];
                    a[i][j] = &a[i][j] - &t;
                }
            }
        }
        let mut out = Self::zero(n, w);
        for i in 0..n {
            for j in 0..w {
                *out.at_mut(i, j) = a[i][n + j].clone();
            }
        }
        Ok(out)
    }

    /// Schur complement onto `keep` after eliminating `elim`:
    /// `A − B·D⁻¹·C` in the block order (keep, elim). Errors if the `elim`
    /// principal block is singular.
    pub fn schur_complement(&self, keep: &[usize], elim: &[usize]) -> Result<Self> {
        assert!(self.is_square());
        if elim.is_empty() {
            return Ok(self.submatrix(keep, keep));
        }
        let a = self.submatrix(keep, keep);
        let b = self.submatrix(keep, elim);
        let c = self.submatrix(elim, keep);
        let d = self.submatrix(elim, elim);
        let x = d.solve(&c)?;
        Ok(a.sub(&b.mul(&x)))
    }
}
