use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::scalar::{from_bigint_ratio, rational_parts, Field, Scalar};

/// Dense row-major matrix over a [`Field`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub reduced: Matrix,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Matrix {
        Matrix { field, rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<Scalar>>, cols: usize) -> Matrix {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r);
        }
        Matrix { field, rows: nrows, cols, data }
    }

    pub fn from_i64(field: Field, rows: &[&[i64]]) -> Matrix {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows.iter().map(|r| r.iter().map(|&x| field.from_i64(x)).collect()).collect();
        Matrix::from_rows(field, rows, cols)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(field: Field, nrows: usize, columns: &[Vec<Scalar>]) -> Matrix {
        let mut m = Matrix::zeros(field, nrows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), nrows);
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Scalar) {
        self.data[i * self.cols + j] = x;
    }

    pub fn add_at(&mut self, i: usize, j: usize, x: &Scalar) {
        let k = i * self.cols + j;
        self.data[k] += x;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Scalar>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Matrix::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.add_at(i, j, &(a * b));
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = self.field.zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        Matrix { field: self.field, rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.scale(&-self.field.one()))
    }

    /// Stacks `self` above `other`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { field: self.field, rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        self.transpose().vstack(&other.transpose()).transpose()
    }

    pub fn rref(&self) -> Rref {
        match self.field {
            Field::Rationals => self.rref_fraction_free(),
            Field::Prime(_) => self.rref_gauss_jordan(),
        }
    }

    fn rref_gauss_jordan(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv().expect("nonzero pivot");
            for j in c..m.cols {
                let x = m.get(r, j) * &inv;
                m.set(r, j, x);
            }
            for i in 0..m.rows {
                if i != r && !m.get(i, c).is_zero() {
                    let factor = m.get(i, c).clone();
                    for j in c..m.cols {
                        let x = m.get(i, j) - &(&factor * m.get(r, j));
                        m.set(i, j, x);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { reduced: m, pivots }
    }

    /// Bareiss elimination on the integer matrix obtained by clearing
    /// denominators row by row; divisions are deferred to the final
    /// back-substitution.
    fn rref_fraction_free(&self) -> Rref {
        let mut a: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| {
                let parts: Vec<(BigInt, BigInt)> = self.row(i).iter().map(rational_parts).collect();
                let l = parts.iter().fold(BigInt::one(), |acc, (_, d)| acc.lcm(d));
                parts.into_iter().map(|(n, d)| n * (&l / d)).collect()
            })
            .collect();
        let mut prev = BigInt::one();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(r, p);
            for i in r + 1..self.rows {
                for j in c + 1..self.cols {
                    let v = (&a[r][c] * &a[i][j] - &a[i][c] * &a[r][j]) / &prev;
                    a[i][j] = v;
                }
                a[i][c] = BigInt::zero();
            }
            prev = a[r][c].clone();
            pivots.push(c);
            r += 1;
        }
        // Back-substitution in ℚ on the echelon rows.
        let rank = pivots.len();
        let mut m = Matrix::zeros(self.field, self.rows, self.cols);
        for (i, row) in a.iter().enumerate().take(rank) {
            let piv = &row[pivots[i]];
            for (j, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    m.set(i, j, from_bigint_ratio(x.clone(), piv.clone()));
                }
            }
        }
        for (i, &c) in pivots.iter().enumerate().rev() {
            for k in 0..i {
                if !m.get(k, c).is_zero() {
                    let factor = m.get(k, c).clone();
                    for j in c..self.cols {
                        let x = m.get(k, j) - &(&factor * m.get(i, j));
                        m.set(k, j, x);
                    }
                }
            }
        }
        Rref { reduced: m, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the null space, one column per free variable. Basis vector
    /// `k` has a 1 at the `k`-th free column and 0 at the other free columns.
    pub fn kernel(&self) -> Matrix {
        let Rref { reduced, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Matrix::zeros(self.field, self.cols, free.len());
        for (col, &f) in free.iter().enumerate() {
            k.set(f, col, self.field.one());
            for (i, &p) in pivots.iter().enumerate() {
                k.set(p, col, -reduced.get(i, f));
            }
        }
        k
    }

    /// Canonical basis of the column space: the nonzero rows of the RREF of
    /// the transpose, returned as columns.
    pub fn column_space(&self) -> Matrix {
        let Rref { reduced, pivots } = self.transpose().rref();
        let mut out = Matrix::zeros(self.field, self.rows, pivots.len());
        for i in 0..pivots.len() {
            for j in 0..self.rows {
                out.set(j, i, reduced.get(i, j).clone());
            }
        }
        out
    }

    /// Some `x` with `self · x = b`, or `None` when `b` is outside the image.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let aug = self.hstack(&Matrix::from_columns(self.field, self.rows, &[b.to_vec()]));
        let Rref { reduced, pivots } = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![self.field.zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = reduced.get(i, self.cols).clone();
        }
        Some(x)
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let aug = self.hstack(&Matrix::identity(self.field, n));
        let Rref { reduced, pivots } = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, reduced.get(i, n + j).clone());
            }
        }
        Some(inv)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_agrees_across_strategies() {
        let q = Field::Rationals;
        let m = Matrix::from_i64(q, &[&[2, 4, 6, 1], &[1, 2, 3, 5], &[0, 1, 1, 1], &[3, 7, 10, 7]]);
        let a = m.rref_fraction_free();
        let b = m.rref_gauss_jordan();
        assert_eq!(a.pivots, b.pivots);
        assert_eq!(a.reduced, b.reduced);
    }

    #[test]
    fn kernel_and_rank_nullity() {
        let q = Field::Rationals;
        let m = Matrix::from_i64(q, &[&[1, 2, 3], &[2, 4, 6]]);
        let k = m.kernel();
        assert_eq!(k.cols(), 2);
        assert!(m.mul(&k).is_zero());
        assert_eq!(m.rank() + k.cols(), 3);
    }

    #[test]
    fn f2_all_ones_block() {
        let f2 = Field::Prime(2);
        let m = Matrix::from_i64(f2, &[&[1, 1], &[1, 1]]);
        assert_eq!(m.rank(), 1);
        assert_eq!(m.kernel().cols(), 1);
    }

    #[test]
    fn solve_cases() {
        let f2 = Field::Prime(2);
        let m = Matrix::from_i64(f2, &[&[1, 1]]);
        let x = m.solve(&[f2.one()]).unwrap();
        assert_eq!(m.apply(&x), vec![f2.one()]);
        let z = Matrix::zeros(f2, 1, 2);
        assert!(z.solve(&[f2.one()]).is_none());
    }

    #[test]
    fn inverse_roundtrip() {
        let q = Field::Rationals;
        let m = Matrix::from_i64(q, &[&[2, 1], &[7, 4]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(q, 2));
        assert!(Matrix::from_i64(q, &[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn column_space_is_canonical() {
        let q = Field::Rationals;
        let a = Matrix::from_i64(q, &[&[1, 2], &[1, 2]]);
        let b = Matrix::from_i64(q, &[&[3, 0], &[3, 0]]);
        assert_eq!(a.column_space(), b.column_space());
    }
}
