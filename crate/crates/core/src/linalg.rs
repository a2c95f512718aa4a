//! Exact linear algebra over the rationals: sparse coordinate vectors and
//! dense Gauss–Jordan elimination.

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::rational::{format_q, parse_q, Q};

/// Sparse coordinate vector. Indices strictly increasing, no zero entries.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec(Vec<(usize, Q)>);

impl SparseVec {
    pub fn zero() -> Self {
        SparseVec(Vec::new())
    }

    pub fn unit(index: usize) -> Self {
        SparseVec(vec![(index, Q::from_integer(1.into()))])
    }

    pub fn from_entries(mut entries: Vec<(usize, Q)>) -> Self {
        entries.sort_by_key(|(i, _)| *i);
        let mut out: Vec<(usize, Q)> = Vec::with_capacity(entries.len());
        for (i, c) in entries {
            match out.last_mut() {
                Some((j, acc)) if *j == i => *acc += c,
                _ => out.push((i, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        SparseVec(out)
    }

    pub fn from_dense(v: &[Q]) -> Self {
        SparseVec(
            v.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i, c.clone()))
                .collect(),
        )
    }

    pub fn to_dense(&self, len: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); len];
        for (i, c) in &self.0 {
            v[*i] = c.clone();
        }
        v
    }

    pub fn entries(&self) -> &[(usize, Q)] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.0.len()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.last().map(|(i, _)| *i)
    }

    pub fn get(&self, index: usize) -> Q {
        match self.0.binary_search_by_key(&index, |(i, _)| *i) {
            Ok(p) => self.0[p].1.clone(),
            Err(_) => Q::zero(),
        }
    }

    pub fn scaled(&self, s: &Q) -> SparseVec {
        if s.is_zero() {
            return SparseVec::zero();
        }
        SparseVec(self.0.iter().map(|(i, c)| (*i, c * s)).collect())
    }

    /// `self + s * other`
    pub fn add_scaled(&self, s: &Q, other: &SparseVec) -> SparseVec {
        if s.is_zero() || other.is_zero() {
            return self.clone();
        }
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut x, mut y) = (0, 0);
        while x < a.len() || y < b.len() {
            if y == b.len() || (x < a.len() && a[x].0 < b[y].0) {
                out.push(a[x].clone());
                x += 1;
            } else if x == a.len() || b[y].0 < a[x].0 {
                out.push((b[y].0, &b[y].1 * s));
                y += 1;
            } else {
                let c = &a[x].1 + &b[y].1 * s;
                if !c.is_zero() {
                    out.push((a[x].0, c));
                }
                x += 1;
                y += 1;
            }
        }
        SparseVec(out)
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        self.add_scaled(&Q::from_integer(1.into()), other)
    }

    pub fn neg(&self) -> SparseVec {
        SparseVec(self.0.iter().map(|(i, c)| (*i, -c)).collect())
    }

    /// `Some(λ)` when `self = λ * base` (λ may be zero), `None` otherwise.
    /// `base` must be nonzero.
    pub fn multiple_of(&self, base: &SparseVec) -> Option<Q> {
        let (i0, c0) = base.0.first()?;
        let lambda = self.get(*i0) / c0;
        if *self == base.scaled(&lambda) {
            Some(lambda)
        } else {
            None
        }
    }
}

/// On-disk form of a sparse vector: `[[index, "p/q"], ...]`.
impl Serialize for SparseVec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for (i, c) in &self.0 {
            seq.serialize_element(&(i, format_q(c)))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for SparseVec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: Vec<(usize, String)> = Vec::deserialize(d)?;
        let mut entries = Vec::with_capacity(raw.len());
        for (i, s) in raw {
            let c = parse_q(&s).map_err(serde::de::Error::custom)?;
            entries.push((i, c));
        }
        let mut sorted = entries.clone();
        sorted.sort_by_key(|(i, _)| *i);
        let v = SparseVec::from_entries(entries);
        if v.0.len() != sorted.len() || sorted.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(serde::de::Error::custom(
                "sparse vector has duplicate indices or zero entries",
            ));
        }
        Ok(v)
    }
}

/// Dense rational matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<Q>>,
}

/// Reduced row echelon form: nonzero rows only, with their pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rows: Vec<Vec<Q>>,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![vec![Q::zero(); cols]; rows] }
    }

    pub fn from_rows(cols: usize, data: Vec<Vec<Q>>) -> Self {
        assert!(data.iter().all(|r| r.len() == cols), "ragged matrix");
        Matrix { rows: data.len(), cols, data }
    }

    /// Matrix whose columns are the given sparse vectors, each of length `len`.
    pub fn from_columns(len: usize, columns: &[SparseVec]) -> Self {
        let mut m = Matrix::zeros(len, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, c) in col.entries() {
                m.data[*i][j] = c.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i][j] = v;
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i]
    }

    pub fn into_rows(self) -> Vec<Vec<Q>> {
        self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j][i] = self.data[i][j].clone();
            }
        }
        t
    }

    /// `self * v` for a dense column vector.
    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.cols);
        self.data
            .iter()
            .map(|row| row.iter().zip(v).fold(Q::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    pub fn echelon(&self) -> Echelon {
        let mut rows = self.data.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..self.cols {
            if r == rows.len() {
                break;
            }
            let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
                continue;
            };
            rows.swap(r, p);
            let inv = Q::from_integer(1.into()) / &rows[r][col];
            for x in rows[r].iter_mut() {
                *x *= &inv;
            }
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i == r || row[col].is_zero() {
                    continue;
                }
                let f = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                    if !p.is_zero() {
                        *x -= &f * p;
                    }
                }
            }
            pivots.push(col);
            r += 1;
        }
        rows.truncate(r);
        Echelon { rows, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    pub fn is_nonsingular(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Canonical particular solution of `self * x = b` (free variables set
    /// to zero), or `None` if the system is inconsistent.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            aug.data[i][..self.cols].clone_from_slice(&self.data[i]);
            aug.data[i][self.cols] = b[i].clone();
        }
        let ech = aug.echelon();
        if ech.pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Q::zero(); self.cols];
        for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
            x[p] = row[self.cols].clone();
        }
        Some(x)
    }
}

/// Rank of a family of sparse vectors living in a space of dimension `len`.
pub fn rank_of(len: usize, vectors: &[SparseVec]) -> usize {
    if vectors.is_empty() || len == 0 {
        return 0;
    }
    let rows = vectors.iter().map(|v| v.to_dense(len)).collect();
    Matrix::from_rows(len, rows).rank()
}

/// Canonical basis (reduced echelon rows) of the span of `vectors`.
pub fn span_basis(len: usize, vectors: &[SparseVec]) -> Vec<SparseVec> {
    if vectors.is_empty() || len == 0 {
        return Vec::new();
    }
    let rows = vectors.iter().map(|v| v.to_dense(len)).collect();
    Matrix::from_rows(len, rows)
        .echelon()
        .rows
        .iter()
        .map(|r| SparseVec::from_dense(r))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, q_frac};

    fn m(rows: &[&[i64]]) -> Matrix {
        let cols = rows[0].len();
        Matrix::from_rows(cols, rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
    }

    #[test]
    fn rank_and_solve() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let x = a.solve(&[q(2), q(4), q(0)]).unwrap();
        assert_eq!(a.apply(&x), vec![q(2), q(4), q(0)]);
        assert!(a.solve(&[q(1), q(0), q(0)]).is_none());
    }

    #[test]
    fn solve_fractional() {
        let a = m(&[&[2, 0], &[0, 3]]);
        assert_eq!(a.solve(&[q(1), q(1)]).unwrap(), vec![q_frac(1, 2), q_frac(1, 3)]);
        assert!(a.is_nonsingular());
    }

    #[test]
    fn sparse_ops() {
        let a = SparseVec::from_entries(vec![(3, q(1)), (0, q(2)), (3, q(-1))]);
        assert_eq!(a.entries(), &[(0, q(2))]);
        let b = SparseVec::from_entries(vec![(0, q(1)), (2, q(5))]);
        let c = a.add_scaled(&q(-2), &b);
        assert_eq!(c.entries(), &[(2, q(-10))]);
        assert_eq!(b.scaled(&q(3)).multiple_of(&b), Some(q(3)));
        assert_eq!(a.multiple_of(&b), None);
        assert_eq!(SparseVec::zero().multiple_of(&b), Some(q(0)));
    }

    #[test]
    fn span_basis_is_echelon() {
        let vs = vec![
            SparseVec::from_entries(vec![(0, q(1)), (1, q(1))]),
            SparseVec::from_entries(vec![(0, q(2)), (1, q(2))]),
            SparseVec::from_entries(vec![(1, q(1))]),
        ];
        let b = span_basis(2, &vs);
        assert_eq!(b, vec![SparseVec::unit(0), SparseVec::unit(1)]);
        assert_eq!(rank_of(2, &vs), 2);
    }
}
