use std::collections::BTreeMap;

use super::graded::SparseVec;
use super::matrix::Matrix;
use crate::scalar::{Field, Scalar};

/// Incremental row echelon form over sparse rows, for large homogeneous
/// constraint systems whose solution space is wanted.
#[derive(Clone)]
pub struct SparseEchelon {
    field: Field,
    cols: usize,
    rows: BTreeMap<usize, SparseVec>,
}

fn axpy(a: &SparseVec, c: &Scalar, b: &SparseVec) -> SparseVec {
    // a - c * b
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, -(c * &b[j].1)));
            j += 1;
        } else {
            let x = &a[i].1 - &(c * &b[j].1);
            if !x.is_zero() {
                out.push((a[i].0, x));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

impl SparseEchelon {
    pub fn new(field: Field, cols: usize) -> SparseEchelon {
        SparseEchelon { field, cols, rows: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds a row (entries need not be sorted; duplicates are summed).
    pub fn push(&mut self, row: SparseVec) {
        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (i, x) in row {
            debug_assert!(i < self.cols);
            let e = acc.entry(i).or_insert_with(|| self.field.zero());
            *e += &x;
        }
        let mut r: SparseVec = acc.into_iter().filter(|(_, x)| !x.is_zero()).collect();
        while let Some((lead, c)) = r.first().cloned() {
            match self.rows.get(&lead) {
                Some(p) => r = axpy(&r, &c, p),
                None => {
                    let inv = c.inv().expect("nonzero lead");
                    let r: SparseVec = r.into_iter().map(|(i, x)| (i, &x * &inv)).collect();
                    self.rows.insert(lead, r);
                    return;
                }
            }
        }
    }

    /// Basis of the solution space of `rows · x = 0` as columns, one per free
    /// variable (in increasing order), with the free variables returned too.
    pub fn kernel(&self) -> (Matrix, Vec<usize>) {
        let reduced = self.reduced();
        let free: Vec<usize> = (0..self.cols).filter(|c| !reduced.contains_key(c)).collect();
        let pos: BTreeMap<usize, usize> = free.iter().enumerate().map(|(k, &f)| (f, k)).collect();
        let mut k = Matrix::zeros(self.field, self.cols, free.len());
        for (col, &f) in free.iter().enumerate() {
            k.set(f, col, self.field.one());
        }
        for (&p, row) in &reduced {
            for (i, x) in row.iter().skip(1) {
                k.set(p, pos[i], -x.clone());
            }
        }
        (k, free)
    }

    fn reduced(&self) -> BTreeMap<usize, SparseVec> {
        let mut done: BTreeMap<usize, SparseVec> = BTreeMap::new();
        for (&p, row) in self.rows.iter().rev() {
            let mut r = row.clone();
            let mut idx = 1;
            while idx < r.len() {
                let (c, x) = r[idx].clone();
                if let Some(q) = done.get(&c) {
                    r = axpy(&r, &x, q);
                } else {
                    idx += 1;
                }
            }
            done.insert(p, r);
        }
        done
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agrees_with_dense_kernel() {
        let q = Field::Rationals;
        let m = Matrix::from_i64(q, &[&[1, 2, 0, 3], &[2, 4, 1, 7], &[0, 0, 1, 1], &[3, 6, 1, 10]]);
        let mut e = SparseEchelon::new(q, 4);
        for i in 0..m.rows() {
            e.push(m.row(i).iter().cloned().enumerate().collect());
        }
        let (k, free) = e.kernel();
        assert_eq!(k, m.kernel());
        assert_eq!(free, vec![1, 3]);
        assert_eq!(e.rank(), 2);
    }
}
