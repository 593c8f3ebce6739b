//! Dense and sparse exact linear algebra over the rationals.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use crate::error::{Error, Result};
use crate::rational::Q;

pub type Vector = Vec<Q>;

pub fn zero_vec(n: usize) -> Vector {
    vec![Q::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> Vector {
    let mut v = zero_vec(n);
    v[i] = Q::one();
    v
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn add_into(acc: &mut [Q], v: &[Q]) {
    for (a, b) in acc.iter_mut().zip(v) {
        if !b.is_zero() {
            *a += b;
        }
    }
}

pub fn add_scaled(acc: &mut [Q], c: &Q, v: &[Q]) {
    if c.is_zero() {
        return;
    }
    for (a, b) in acc.iter_mut().zip(v) {
        if !b.is_zero() {
            *a += c * b;
        }
    }
}

pub fn scale(c: &Q, v: &[Q]) -> Vector {
    v.iter().map(|x| c * x).collect()
}

pub fn sub(a: &[Q], b: &[Q]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    let mut s = Q::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x * y;
        }
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vector>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![zero_vec(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = Q::one();
        }
        m
    }

    pub fn from_rows(cols: usize, data: Vec<Vector>) -> Self {
        debug_assert!(data.iter().all(|r| r.len() == cols));
        Matrix { rows: data.len(), cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(rows: usize, cols: &[Vector]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..rows {
                m.data[i][j] = c[i].clone();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j][i] = self.data[i][j].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k][j];
                    if !b.is_zero() {
                        out.data[i][j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Q]) -> Vector {
        self.data.iter().map(|row| dot(row, v)).collect()
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| sub(a, b)).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| is_zero_vec(r))
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.data[i][c].is_zero()) else {
                continue;
            };
            m.data.swap(r, p);
            let inv = Q::one() / &m.data[r][c];
            for x in m.data[r].iter_mut() {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
            let pivot_row = m.data[r].clone();
            for i in 0..m.rows {
                if i != r && !m.data[i][c].is_zero() {
                    let f = m.data[i][c].clone();
                    for (x, y) in m.data[i].iter_mut().zip(&pivot_row) {
                        if !y.is_zero() {
                            *x -= &f * y;
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        self.rref().1.len()
    }

    /// Basis of the right kernel `{x : A x = 0}`.
    pub fn kernel(&self) -> Vec<Vector> {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = zero_vec(self.cols);
            v[free] = Q::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r.data[row][free].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Some solution of `A x = b`, if one exists.
    pub fn solve(&self, b: &[Q]) -> Option<Vector> {
        let mut aug = self.clone();
        for (i, row) in aug.data.iter_mut().enumerate() {
            row.push(b[i].clone());
        }
        aug.cols += 1;
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = zero_vec(self.cols);
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r.data[row][self.cols].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.data[i][j] = self.data[i][j].clone();
            }
            aug.data[i][n + i] = Q::one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let data = r.data.iter().map(|row| row[n..].to_vec()).collect();
        Some(Matrix { rows: n, cols: n, data })
    }
}

/// Outcome of a span-membership test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// Coefficients of the generators reproducing the target.
    Member { witness: Vector },
    /// A functional vanishing on every generator with value 1 on the target.
    NotMember { functional: Vector },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }
}

/// Decides whether `target` lies in the span of `gens` (all of length `dim`).
pub fn membership(dim: usize, gens: &[Vector], target: &[Q]) -> Membership {
    let a = Matrix::from_cols(dim, gens);
    if let Some(w) = a.solve(target) {
        return Membership::Member { witness: w };
    }
    // Kernel of the matrix whose rows are the generators.
    let rows = Matrix::from_rows(dim, gens.to_vec());
    let ker = if gens.is_empty() {
        (0..dim).map(|i| unit_vec(dim, i)).collect()
    } else {
        rows.kernel()
    };
    for f in ker {
        let v = dot(&f, target);
        if !v.is_zero() {
            return Membership::NotMember { functional: scale(&(Q::one() / v), &f) };
        }
    }
    unreachable!("target outside the span always admits a separating functional")
}

/// Row-reduced basis of the span of `gens`.
pub fn span_basis(dim: usize, gens: &[Vector]) -> Vec<Vector> {
    if gens.is_empty() {
        return Vec::new();
    }
    let (r, pivots) = Matrix::from_rows(dim, gens.to_vec()).rref();
    r.data.into_iter().take(pivots.len()).collect()
}

/// Rank of a sparse matrix given by rows, via exact elimination.
pub fn sparse_rank(rows: Vec<BTreeMap<usize, Q>>) -> usize {
    let mut pivots: BTreeMap<usize, BTreeMap<usize, Q>> = BTreeMap::new();
    for mut row in rows {
        loop {
            let Some((&lead, _)) = row.iter().next() else { break };
            match pivots.get(&lead) {
                Some(prow) => {
                    let f = row[&lead].clone() / &prow[&lead];
                    for (c, v) in prow {
                        let e = row.entry(*c).or_insert_with(Q::zero);
                        *e -= &f * v;
                        if e.is_zero() {
                            row.remove(c);
                        }
                    }
                }
                None => {
                    pivots.insert(lead, row);
                    break;
                }
            }
        }
    }
    pivots.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn m(rows: &[&[i64]]) -> Matrix {
        let cols = rows[0].len();
        Matrix::from_rows(cols, rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
    }

    #[test]
    fn rank_kernel_solve() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let k = a.kernel();
        assert_eq!(k.len(), 1);
        assert!(is_zero_vec(&a.apply(&k[0])));
        let b = vec![q(6), q(12), q(2)];
        let x = a.solve(&b).unwrap();
        assert_eq!(a.apply(&x), b);
        assert!(a.solve(&[q(1), q(0), q(0)]).is_none());
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(&[&[0, 1], &[-1, 0]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), Matrix::identity(2));
        assert!(m(&[&[1, 1], &[1, 1]]).inverse().is_none());
    }

    #[test]
    fn membership_certificates() {
        let gens = vec![vec![q(1), q(1), q(0)], vec![q(0), q(1), q(1)]];
        match membership(3, &gens, &[q(1), q(2), q(1)]) {
            Membership::Member { witness } => assert_eq!(witness, vec![q(1), q(1)]),
            other => panic!("{other:?}"),
        }
        match membership(3, &gens, &[q(1), q(0), q(0)]) {
            Membership::NotMember { functional } => {
                for g in &gens {
                    assert!(dot(&functional, g).is_zero());
                }
                assert_eq!(dot(&functional, &[q(1), q(0), q(0)]), q(1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sparse_rank_matches_dense() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1], &[0, 2, 2]]);
        let rows = a
            .data
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect())
            .collect();
        assert_eq!(sparse_rank(rows), a.rank());
    }
}
