//! Exact dense linear algebra over a prime field.
//!
//! Gaussian elimination in fraction-free form is all the decoding layers
//! need: reduced row echelon form, rank, determinant, inverse, nullspace,
//! and affine solution sets.  [`AffineSpace`] is kept in a canonical form
//! (reduced basis, coset representative with zeros in the pivot columns)
//! so structural equality is set equality.

use crate::fields::PrimeField;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl Mat {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Mat {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(field: PrimeField, rows: Vec<Vec<u64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let q = field.order();
        let data: Vec<u64> = rows.into_iter().flatten().collect();
        assert!(data.iter().all(|&x| x < q), "entry out of field");
        Mat {
            field,
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Mat {
        let mut m = Mat::zeros(self.field, rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                m[(i, j)] = self[(r, c)];
            }
        }
        m
    }

    pub fn transpose(&self) -> Mat {
        let mut m = Mat::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let f = &self.field;
        let mut m = Mat::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    m[(i, j)] = f.add(m[(i, j)], f.mul(a, other[(l, j)]));
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &x)| f.add(acc, f.mul(a, x)))
            })
            .collect()
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let f = self.field;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self[(i, c)] != 0) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = f.inv(self[(r, c)]);
            for j in c..self.cols {
                self[(r, j)] = f.mul(self[(r, j)], inv);
            }
            for i in 0..self.rows {
                if i != r && self[(i, c)] != 0 {
                    let factor = self[(i, c)];
                    for j in c..self.cols {
                        let sub = f.mul(factor, self[(r, j)]);
                        self[(i, j)] = f.sub(self[(i, j)], sub);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
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
        self.clone().rref().len()
    }

    pub fn det(&self) -> u64 {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let f = self.field;
        let mut m = self.clone();
        let n = m.rows;
        let mut det = 1u64;
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| m[(i, c)] != 0) else {
                return 0;
            };
            if p != c {
                m.swap_rows(c, p);
                det = f.neg(det);
            }
            det = f.mul(det, m[(c, c)]);
            let inv = f.inv(m[(c, c)]);
            for i in c + 1..n {
                if m[(i, c)] != 0 {
                    let factor = f.mul(m[(i, c)], inv);
                    for j in c..n {
                        let sub = f.mul(factor, m[(c, j)]);
                        m[(i, j)] = f.sub(m[(i, j)], sub);
                    }
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Mat> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let mut aug = Mat::zeros(self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)];
            }
            aug[(i, n + i)] = 1;
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots.iter().any(|&c| c >= n) {
            return None;
        }
        let mut inv = Mat::zeros(self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)];
            }
        }
        Some(inv)
    }

    /// Basis of { x : A x = 0 }, one vector per free column, in column order.
    pub fn nullspace(&self) -> Vec<Vec<u64>> {
        let f = self.field;
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![0u64; self.cols];
                v[fc] = 1;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(m[(r, fc)]);
                }
                v
            })
            .collect()
    }

    /// Solutions of A x = b as a particular vector plus a kernel basis,
    /// or None when the system is inconsistent.
    pub fn solve(&self, b: &[u64]) -> Option<(Vec<u64>, Vec<Vec<u64>>)> {
        assert_eq!(self.rows, b.len(), "dimension mismatch");
        let mut aug = Mat::zeros(self.field, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)];
            }
            aug[(i, self.cols)] = b[i];
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut particular = vec![0u64; self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            particular[pc] = aug[(r, self.cols)];
        }
        Some((particular, self.nullspace()))
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = u64;
    fn index(&self, (r, c): (usize, usize)) -> &u64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut u64 {
        &mut self.data[r * self.cols + c]
    }
}

/// An affine subspace { offset + sum c_i b_i } of F_q^ambient in canonical
/// form: the basis rows are in reduced echelon form and the offset has
/// zeros in every pivot column, so equal spaces compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSpace {
    field: PrimeField,
    offset: Vec<u64>,
    basis: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl AffineSpace {
    pub fn new(field: PrimeField, offset: Vec<u64>, basis: Vec<Vec<u64>>) -> Self {
        let ambient = offset.len();
        assert!(basis.iter().all(|v| v.len() == ambient), "ragged basis");
        let mut m = Mat::from_rows(field, basis.clone());
        if m.rows() == 0 {
            m = Mat::zeros(field, 0, ambient);
        }
        let pivots = m.rref();
        let reduced: Vec<Vec<u64>> = (0..pivots.len()).map(|i| m.row(i).to_vec()).collect();
        let mut off = offset;
        for (row, &pc) in reduced.iter().zip(&pivots) {
            let c = off[pc];
            if c != 0 {
                for (o, &r) in off.iter_mut().zip(row) {
                    *o = field.sub(*o, field.mul(c, r));
                }
            }
        }
        AffineSpace {
            field,
            offset: off,
            basis: reduced,
            pivots,
        }
    }

    /// The zero-dimensional space holding a single point.
    pub fn point(field: PrimeField, p: Vec<u64>) -> Self {
        Self::new(field, p, Vec::new())
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn ambient(&self) -> usize {
        self.offset.len()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn offset(&self) -> &[u64] {
        &self.offset
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    /// Number of points, None on u128 overflow.
    pub fn size(&self) -> Option<u128> {
        (self.field.order() as u128).checked_pow(self.dim() as u32)
    }

    /// The point at the given parameter vector.
    pub fn at(&self, params: &[u64]) -> Vec<u64> {
        assert_eq!(params.len(), self.dim(), "parameter count mismatch");
        let f = &self.field;
        let mut p = self.offset.clone();
        for (c, row) in params.iter().zip(&self.basis) {
            if *c == 0 {
                continue;
            }
            for (o, &r) in p.iter_mut().zip(row) {
                *o = f.add(*o, f.mul(*c, r));
            }
        }
        p
    }

    pub fn contains(&self, p: &[u64]) -> bool {
        if p.len() != self.ambient() {
            return false;
        }
        let f = &self.field;
        let mut r: Vec<u64> = p.iter().zip(&self.offset).map(|(&a, &b)| f.sub(a, b)).collect();
        for (row, &pc) in self.basis.iter().zip(&self.pivots) {
            let c = r[pc];
            if c != 0 {
                for (x, &b) in r.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(c, b));
                }
            }
        }
        r.iter().all(|&x| x == 0)
    }

    /// All points, in odometer order of the parameters.  Caller guards size.
    pub fn enumerate(&self) -> Vec<Vec<u64>> {
        let n = self
            .size()
            .expect("affine space too large to enumerate");
        assert!(n <= 1 << 24, "affine space too large to enumerate");
        let q = self.field.order();
        let mut out = Vec::with_capacity(n as usize);
        let mut params = vec![0u64; self.dim()];
        loop {
            out.push(self.at(&params));
            let mut i = 0;
            loop {
                if i == params.len() {
                    return out;
                }
                params[i] += 1;
                if params[i] < q {
                    break;
                }
                params[i] = 0;
                i += 1;
            }
        }
    }

    /// Projection onto the first `len` coordinates.
    pub fn truncate(&self, len: usize) -> AffineSpace {
        assert!(len <= self.ambient());
        AffineSpace::new(
            self.field,
            self.offset[..len].to_vec(),
            self.basis.iter().map(|r| r[..len].to_vec()).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn f13() -> PrimeField {
        PrimeField::new(13).unwrap()
    }

    #[test]
    fn determinant_and_inverse() {
        let f = f13();
        let a = Mat::from_rows(f, vec![vec![1, 2], vec![3, 4]]);
        assert_eq!(a.det(), 11); // 4 - 6 = -2
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Mat::identity(f, 2));
        assert_eq!(inv.mul(&a), Mat::identity(f, 2));

        let singular = Mat::from_rows(f, vec![vec![1, 2], vec![2, 4]]);
        assert_eq!(singular.det(), 0);
        assert!(singular.inverse().is_none());
        assert_eq!(singular.rank(), 1);
    }

    #[test]
    fn rref_known_form() {
        let f = f13();
        let mut a = Mat::from_rows(f, vec![vec![0, 2, 4], vec![3, 6, 9]]);
        let pivots = a.rref();
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(a.row(0), &[1, 0, 12]); // row ops: R2/3 - (R1/2)*2 etc.
        assert_eq!(a.row(1), &[0, 1, 2]);
    }

    #[test]
    fn nullspace_matches_rank() {
        let f = f13();
        let a = Mat::from_rows(f, vec![vec![1, 2, 3], vec![2, 4, 6]]);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert_eq!(a.mul_vec(v), vec![0, 0]);
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let f = f13();
        let a = Mat::from_rows(f, vec![vec![1, 1], vec![2, 2]]);
        assert!(a.solve(&[1, 2]).unwrap().1.len() == 1);
        assert!(a.solve(&[1, 3]).is_none());

        let b = Mat::from_rows(f, vec![vec![1, 2], vec![3, 4]]);
        let (x, kern) = b.solve(&[5, 6]).unwrap();
        assert!(kern.is_empty());
        assert_eq!(b.mul_vec(&x), vec![5, 6]);
    }

    #[test]
    fn random_solve_roundtrip() {
        let f = f13();
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..200 {
            let rows = rng.random_range(1..5);
            let cols = rng.random_range(1..5);
            let mut a = Mat::zeros(f, rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    a[(i, j)] = f.uniform(&mut rng);
                }
            }
            let x: Vec<u64> = (0..cols).map(|_| f.uniform(&mut rng)).collect();
            let b = a.mul_vec(&x);
            let (p, kern) = a.solve(&b).expect("constructed system is consistent");
            assert_eq!(a.mul_vec(&p), b);
            for k in &kern {
                assert_eq!(a.mul_vec(k), vec![0; rows]);
            }
            assert_eq!(kern.len(), cols - a.rank());
        }
    }

    #[test]
    fn affine_space_canonical_equality() {
        let f = f13();
        // Same line through (1,1) along (1,2), presented two ways.
        let s1 = AffineSpace::new(f, vec![1, 1], vec![vec![1, 2]]);
        let s2 = AffineSpace::new(f, vec![2, 3], vec![vec![2, 4]]);
        assert_eq!(s1, s2);
        assert_eq!(s1.dim(), 1);
        assert!(s1.contains(&[3, 5]));
        assert!(!s1.contains(&[3, 6]));
    }

    #[test]
    fn affine_space_enumerate_and_truncate() {
        let f = f13();
        let s = AffineSpace::new(f, vec![0, 1, 2], vec![vec![1, 0, 0], vec![0, 1, 0]]);
        let pts = s.enumerate();
        assert_eq!(pts.len(), 169);
        assert!(pts.iter().all(|p| p[2] == 2));
        assert!(pts.iter().all(|p| s.contains(p)));

        let t = s.truncate(2);
        assert_eq!(t.dim(), 2);
        assert_eq!(t.enumerate().len(), 169);

        let pt = AffineSpace::point(f, vec![5, 6]);
        assert_eq!(pt.dim(), 0);
        assert_eq!(pt.enumerate(), vec![vec![5, 6]]);
        assert!(pt.contains(&[5, 6]));
        assert!(!pt.contains(&[5, 7]));
    }

    #[test]
    fn truncation_is_projection() {
        let f = f13();
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..50 {
            let ambient = 4;
            let dim = rng.random_range(0..3);
            let offset: Vec<u64> = (0..ambient).map(|_| f.uniform(&mut rng)).collect();
            let basis: Vec<Vec<u64>> = (0..dim)
                .map(|_| (0..ambient).map(|_| f.uniform(&mut rng)).collect())
                .collect();
            let s = AffineSpace::new(f, offset, basis);
            let t = s.truncate(2);
            for p in s.enumerate() {
                assert!(t.contains(&p[..2]));
            }
            // Every truncated point lifts back to some full point.
            let full = s.enumerate();
            for tp in t.enumerate() {
                assert!(full.iter().any(|p| p[..2] == tp[..]));
            }
        }
    }
}
