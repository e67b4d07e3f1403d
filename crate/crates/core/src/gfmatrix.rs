//! Dense matrices over a [`Field`] with exact Gaussian elimination.

use std::fmt;

use itertools::Itertools;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::galois::{Field, FieldSpec};

/// Column-count ceiling for [`GfMatrix::every_w_columns_independent`].
pub const MAX_SUBSET_COLS: usize = 64;
/// Subset-size ceiling for [`GfMatrix::every_w_columns_independent`].
pub const MAX_SUBSET_WIDTH: usize = 6;

#[derive(Clone, PartialEq, Eq)]
pub struct GfMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
    field: Field,
}

/// Outcome of solving `M x = rhs` by elimination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<u32>),
    /// Consistent, with `free` free variables; `particular` sets all of them to zero.
    Underdetermined { particular: Vec<u32>, free: usize },
    Inconsistent,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub matrix: GfMatrix,
    pub pivots: Vec<usize>,
}

impl fmt::Debug for GfMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GfMatrix {}x{} over {:?}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl GfMatrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        GfMatrix { rows, cols, data: vec![0; rows * cols], field: field.clone() }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from row-major data, validating every entry.
    pub fn from_vec(field: &Field, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        for &x in &data {
            field.element(x as u64)?;
        }
        Ok(GfMatrix { rows, cols, data, field: field.clone() })
    }

    pub fn from_rows(field: &Field, rows: &[Vec<u32>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_vec(field, rows.len(), cols, rows.concat())
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(field: &Field, height: usize, columns: &[Vec<u32>]) -> Result<Self> {
        let mut m = Self::zeros(field, height, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != height {
                return Err(Error::DimensionMismatch("column length".into()));
            }
            for (i, &x) in c.iter().enumerate() {
                field.element(x as u64)?;
                m.set(i, j, x);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        debug_assert!(self.field.contains(v as u64));
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> GfMatrix {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Submatrix made of the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> GfMatrix {
        let mut m = Self::zeros(&self.field, self.rows, cols.len());
        for r in 0..self.rows {
            for (k, &c) in cols.iter().enumerate() {
                m.set(r, k, self.get(r, c));
            }
        }
        m
    }

    pub fn select_rows(&self, rows: &[usize]) -> GfMatrix {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        GfMatrix { rows: rows.len(), cols: self.cols, data, field: self.field.clone() }
    }

    pub fn mul(&self, other: &GfMatrix) -> Result<GfMatrix> {
        if self.field != other.field {
            return Err(Error::MixedFields);
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[u32]) -> Result<Vec<u32>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for {} columns",
                x.len(),
                self.cols
            )));
        }
        let f = &self.field;
        Ok((0..self.rows)
            .map(|r| f.sum(self.row(r).iter().zip(x).map(|(&a, &b)| f.mul(a, b))))
            .collect())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Reduced row echelon form. Pivots are taken at the first nonzero entry scanning
    /// columns left to right.
    pub fn rref(&self) -> Echelon {
        let mut m = self.clone();
        let pivots = m.eliminate(self.cols);
        Echelon { matrix: m, pivots }
    }

    /// In-place Gauss-Jordan elimination restricted to the first `limit` columns.
    fn eliminate(&mut self, limit: usize) -> Vec<usize> {
        let f = self.field.clone();
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut row = 0;
        for c in 0..limit {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| self.get(r, c) != 0) else {
                continue;
            };
            if p != row {
                for j in 0..cols {
                    self.data.swap(p * cols + j, row * cols + j);
                }
            }
            let inv = f.inv(self.get(row, c)).expect("pivot is nonzero");
            for j in c..cols {
                let v = f.mul(self.get(row, j), inv);
                self.set(row, j, v);
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let factor = self.get(r, c);
                if factor == 0 {
                    continue;
                }
                for j in c..cols {
                    let v = f.sub(self.get(r, j), f.mul(factor, self.get(row, j)));
                    self.set(r, j, v);
                }
            }
            pivots.push(c);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.forward_rank()
    }

    /// Row-echelon rank without back substitution.
    fn forward_rank(&mut self) -> usize {
        let f = self.field.clone();
        let cols = self.cols;
        let mut row = 0;
        for c in 0..cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| self.get(r, c) != 0) else {
                continue;
            };
            if p != row {
                for j in 0..cols {
                    self.data.swap(p * cols + j, row * cols + j);
                }
            }
            let inv = f.inv(self.get(row, c)).expect("pivot is nonzero");
            for r in row + 1..self.rows {
                let factor = self.get(r, c);
                if factor == 0 {
                    continue;
                }
                let k = f.mul(factor, inv);
                for j in c..cols {
                    let v = f.sub(self.get(r, j), f.mul(k, self.get(row, j)));
                    self.set(r, j, v);
                }
            }
            row += 1;
        }
        row
    }

    pub fn determinant(&self) -> Result<u32> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let f = self.field.clone();
        let mut m = self.clone();
        let n = self.rows;
        let mut det = 1;
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| m.get(r, c) != 0) else {
                return Ok(0);
            };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = f.neg(det);
            }
            let pivot = m.get(c, c);
            det = f.mul(det, pivot);
            let inv = f.inv(pivot)?;
            for r in c + 1..n {
                let k = f.mul(m.get(r, c), inv);
                if k == 0 {
                    continue;
                }
                for j in c..n {
                    let v = f.sub(m.get(r, j), f.mul(k, m.get(c, j)));
                    m.set(r, j, v);
                }
            }
        }
        Ok(det)
    }

    /// Solves `self * x = rhs`, reporting whether the solution is unique.
    pub fn solve(&self, rhs: &[u32]) -> Result<Solution> {
        if rhs.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side of length {} for {} rows",
                rhs.len(),
                self.rows
            )));
        }
        let f = &self.field;
        let w = self.cols + 1;
        let mut aug = Self::zeros(f, self.rows, w);
        for (r, &v) in rhs.iter().enumerate() {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, f.element(v as u64)?);
        }
        let pivots = aug.eliminate(self.cols);
        if (pivots.len()..self.rows).any(|r| aug.get(r, self.cols) != 0) {
            return Ok(Solution::Inconsistent);
        }
        let mut x = vec![0; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(r, self.cols);
        }
        if pivots.len() == self.cols {
            Ok(Solution::Unique(x))
        } else {
            Ok(Solution::Underdetermined { particular: x, free: self.cols - pivots.len() })
        }
    }

    /// The unique `x` with `self * x = rhs`; requires full column rank.
    pub fn solve_unique(&self, rhs: &[u32]) -> Result<Vec<u32>> {
        let rank = self.rank();
        if rank < self.cols {
            return Err(Error::RankDeficient { rank, needed: self.cols });
        }
        match self.solve(rhs)? {
            Solution::Unique(x) => Ok(x),
            Solution::Inconsistent => Err(Error::Inconsistent),
            Solution::Underdetermined { .. } => unreachable!("full column rank"),
        }
    }

    /// Basis of the right kernel, one basis vector per row.
    pub fn null_space_basis(&self) -> GfMatrix {
        let f = &self.field;
        let Echelon { matrix: e, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Self::zeros(f, free.len(), self.cols);
        for (k, &fc) in free.iter().enumerate() {
            basis.set(k, fc, 1);
            for (r, &pc) in pivots.iter().enumerate() {
                basis.set(k, pc, f.neg(e.get(r, fc)));
            }
        }
        basis
    }

    /// True iff every `w` distinct columns are linearly independent. With `w == rows` this is the
    /// MDS test for the code whose parity-check matrix is `self`.
    pub fn every_w_columns_independent(&self, w: usize) -> Result<bool> {
        if w == 0 || w > self.rows {
            return Err(Error::InvalidParameter(format!("w = {w} with {} rows", self.rows)));
        }
        if self.cols > MAX_SUBSET_COLS || w > MAX_SUBSET_WIDTH {
            return Err(Error::ResourceGuard(format!(
                "column-subset test limited to {MAX_SUBSET_COLS} columns and w <= {MAX_SUBSET_WIDTH}"
            )));
        }
        if w > self.cols {
            return Ok(true);
        }
        Ok((0..self.cols)
            .combinations(w)
            .all(|subset| self.select_columns(&subset).rank() == w))
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    field: FieldSpec,
    data: Vec<Vec<u32>>,
}

impl Serialize for GfMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            field: self.field.spec(),
            data: self.to_rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GfMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        let field = Field::new(j.field).map_err(D::Error::custom)?;
        if j.data.len() != j.rows || j.data.iter().any(|r| r.len() != j.cols) {
            return Err(D::Error::custom("matrix data does not match rows/cols"));
        }
        GfMatrix::from_vec(&field, j.rows, j.cols, j.data.concat()).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u32) -> Field {
        Field::of_order(q).unwrap()
    }

    /// Cofactor-expansion determinant, independent of elimination.
    fn det_cofactor(m: &GfMatrix) -> u32 {
        let n = m.rows();
        let fld = m.field();
        if n == 1 {
            return m.get(0, 0);
        }
        let mut acc = 0;
        for j in 0..n {
            let rows: Vec<usize> = (1..n).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let minor = m.select_rows(&rows).select_columns(&cols);
            let term = fld.mul(m.get(0, j), det_cofactor(&minor));
            acc = if j % 2 == 0 { fld.add(acc, term) } else { fld.sub(acc, term) };
        }
        acc
    }

    #[test]
    fn rank_basics() {
        let g2 = f(2);
        assert_eq!(GfMatrix::identity(&g2, 5).rank(), 5);
        let ones = GfMatrix::from_rows(&g2, &[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(ones.rank(), 1);
        assert_eq!(GfMatrix::zeros(&g2, 3, 4).rank(), 0);
    }

    #[test]
    fn solve_examples() {
        let g7 = f(7);
        let id = GfMatrix::identity(&g7, 3);
        assert_eq!(id.solve_unique(&[4, 0, 6]).unwrap(), vec![4, 0, 6]);

        let g2 = f(2);
        let m = GfMatrix::from_rows(&g2, &[vec![1], vec![1]]).unwrap();
        assert_eq!(m.solve_unique(&[1, 0]), Err(Error::Inconsistent));

        let v = GfMatrix::from_rows(&g7, &[vec![1, 1], vec![1, 3]]).unwrap();
        assert_eq!(v.solve_unique(&[0, 0]).unwrap(), vec![0, 0]);

        let wide = GfMatrix::from_rows(&g7, &[vec![1, 1]]).unwrap();
        assert!(matches!(wide.solve_unique(&[1]), Err(Error::RankDeficient { rank: 1, needed: 2 })));
        assert!(matches!(wide.solve(&[1]).unwrap(), Solution::Underdetermined { free: 1, .. }));
    }

    #[test]
    fn column_independence_examples() {
        let g7 = f(7);
        let vand2 = GfMatrix::from_rows(&g7, &[vec![1; 6], (1..=6).collect()]).unwrap();
        assert!(vand2.every_w_columns_independent(2).unwrap());
        let rep = GfMatrix::from_rows(&g7, &[vec![1, 1, 1], vec![2, 2, 3]]).unwrap();
        assert!(!rep.every_w_columns_independent(2).unwrap());

        let g16 = f(16);
        let pts: Vec<u32> = (0..10).collect();
        let vand3 = GfMatrix::from_rows(
            &g16,
            &[vec![1; 10], pts.clone(), pts.iter().map(|&a| g16.mul(a, a)).collect()],
        )
        .unwrap();
        // 3x3 Vandermonde minors checked by cofactor expansion.
        for s in (0..10).combinations(3) {
            assert_ne!(det_cofactor(&vand3.select_columns(&s)), 0);
        }
        assert!(vand3.every_w_columns_independent(3).unwrap());
        assert!(vand3.every_w_columns_independent(7).is_err());
    }

    #[test]
    fn null_space_examples() {
        let g2 = f(2);
        assert_eq!(GfMatrix::identity(&g2, 4).null_space_basis().rows(), 0);
        assert_eq!(GfMatrix::zeros(&g2, 2, 5).null_space_basis().rows(), 5);
        let ones = GfMatrix::from_rows(&g2, &[vec![1, 1, 1, 1]]).unwrap();
        let basis = ones.null_space_basis();
        assert_eq!(basis.rows(), 3);
        // the kernel of the parity code is exactly the even-weight words
        let mut span = std::collections::BTreeSet::new();
        for mask in 0u32..8 {
            let mut w = vec![0u32; 4];
            for (k, row) in (0..3).map(|k| (k, basis.row(k))) {
                if mask >> k & 1 == 1 {
                    for j in 0..4 {
                        w[j] ^= row[j];
                    }
                }
            }
            span.insert(w);
        }
        let even: std::collections::BTreeSet<Vec<u32>> = (0u32..16)
            .filter(|x| x.count_ones() % 2 == 0)
            .map(|x| (0..4).map(|j| x >> j & 1).collect())
            .collect();
        assert_eq!(span, even);
        for k in 0..3 {
            assert_eq!(basis.row(k).iter().filter(|&&x| x == 1).count() % 2, 0);
        }
    }

    #[test]
    fn determinant_matches_cofactor() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for q in [2, 3, 7, 16] {
            let fl = f(q);
            for n in 1..=5 {
                let data = (0..n * n).map(|_| rng.gen_range(0..q)).collect();
                let m = GfMatrix::from_vec(&fl, n, n, data).unwrap();
                let d = m.determinant().unwrap();
                assert_eq!(d, det_cofactor(&m));
                assert_eq!(d != 0, m.rank() == n);
            }
        }
    }

    #[test]
    fn json_format() {
        let g7 = f(7);
        let m = GfMatrix::from_rows(&g7, &[vec![1, 2], vec![3, 4]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":2,"cols":2,"field":{"p":7,"k":1},"data":[[1,2],[3,4]]}"#);
        let back: GfMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<GfMatrix>(
            r#"{"rows":1,"cols":2,"field":{"p":7,"k":1},"data":[[1,9]]}"#
        )
        .is_err());
    }
}
