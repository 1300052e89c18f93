//! Subspace-evasive sets cut out by sparse power forms.
//!
//! One block is the variety V of the system f_i(x) = sum_j A[i][j] x_j^{d_j}
//! = 0 (i = 1..v) in F_q^w with w = v*v, where A is a v-by-w Cauchy matrix
//! (every minor of every size is nonsingular) and the degree sequence is
//! strictly decreasing with the first v exponents coprime to q-1.  The set
//! is the b-fold product of V inside F_q^{w b}.  Fixing the last w-v
//! coordinates of a block determines the first v uniquely, which gives a
//! bijection with F_q^{(w-v) b} used for encoding, and any affine subspace
//! of dimension at most v meets the set in a short, explicitly computable
//! list.  Larger fields also have to satisfy a growth condition for the
//! intersection lists to stay bounded asymptotically; that condition has no
//! closed form reproduced here and is not checked, only the structural
//! requirements are.

use crate::fields::{root_exponent, PrimeField};
use crate::linalg::{AffineSpace, Mat};
use itertools::Itertools;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvasiveError {
    #[error("v must be at least 2 so each block carries input coordinates")]
    DimensionTooSmall,
    #[error("field order {q} too small, need q > {min}")]
    FieldTooSmall { q: u64, min: u64 },
    #[error("block count b must be at least 1")]
    ZeroBlocks,
    #[error("coefficient matrix failed the all-minors regularity check")]
    NotStronglyRegular,
    #[error("expected vector length {expected}, got {got}")]
    InputLength { expected: usize, got: usize },
    #[error("coordinate {0} outside the field")]
    CoordOutOfField(u64),
    #[error("point does not lie in the set")]
    NotMember,
    #[error("subspace dimension {dim} exceeds the supported bound {max}")]
    DimensionTooLarge { dim: usize, max: usize },
}

#[derive(Debug, Clone)]
pub struct EvasiveSystem {
    field: PrimeField,
    v: usize,
    w: usize,
    b: usize,
    coeffs: Mat,
    degrees: Vec<u64>,
    solved_inv: Mat,
    root_exps: Vec<u128>,
}

/// True when every r-by-r minor over every row and column subset is
/// nonsingular, r up to the row count.
pub fn strongly_regular(m: &Mat) -> bool {
    let rows = m.rows();
    let cols = m.cols();
    for r in 1..=rows.min(cols) {
        for row_set in (0..rows).combinations(r) {
            for col_set in (0..cols).combinations(r) {
                if m.submatrix(&row_set, &col_set).det() == 0 {
                    return false;
                }
            }
        }
    }
    true
}

impl EvasiveSystem {
    /// Build the system for F_q with block form count v and b blocks.
    pub fn build(field: PrimeField, v: usize, b: usize) -> Result<Self, EvasiveError> {
        if v < 2 {
            return Err(EvasiveError::DimensionTooSmall);
        }
        if b < 1 {
            return Err(EvasiveError::ZeroBlocks);
        }
        let w = v * v;
        let q = field.order();
        // Cauchy nodes x_i = i, y_j = v + j must stay distinct with nonzero
        // pairwise sums mod q.
        let min = (2 * v + w) as u64;
        if q <= min {
            return Err(EvasiveError::FieldTooSmall { q, min });
        }
        let mut coeffs = Mat::zeros(field, v, w);
        for i in 0..v {
            for j in 0..w {
                let s = (i as u64 + 1) + (v as u64 + j as u64 + 1);
                coeffs[(i, j)] = field.inv(s % q);
            }
        }
        if !strongly_regular(&coeffs) {
            return Err(EvasiveError::NotStronglyRegular);
        }
        let degrees = degree_sequence(q, v, w);
        let solved_cols: Vec<usize> = (0..v).collect();
        let all_rows: Vec<usize> = (0..v).collect();
        let solved_inv = coeffs
            .submatrix(&all_rows, &solved_cols)
            .inverse()
            .expect("leading v-by-v minor is nonsingular");
        let root_exps = degrees[..v]
            .iter()
            .map(|&d| root_exponent(d as u128, (q - 1) as u128).expect("head degrees coprime"))
            .collect();
        Ok(EvasiveSystem {
            field,
            v,
            w,
            b,
            coeffs,
            degrees,
            solved_inv,
            root_exps,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn forms(&self) -> usize {
        self.v
    }

    pub fn block_width(&self) -> usize {
        self.w
    }

    pub fn blocks(&self) -> usize {
        self.b
    }

    /// Ambient dimension w * b.
    pub fn ambient(&self) -> usize {
        self.w * self.b
    }

    /// Input dimension (w - v) * b of the encoding bijection.
    pub fn input_len(&self) -> usize {
        (self.w - self.v) * self.b
    }

    pub fn coeff_matrix(&self) -> &Mat {
        &self.coeffs
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    fn check_coords(&self, xs: &[u64]) -> Result<(), EvasiveError> {
        match xs.iter().find(|&&x| x >= self.field.order()) {
            Some(&x) => Err(EvasiveError::CoordOutOfField(x)),
            None => Ok(()),
        }
    }

    /// Map (w - v) * b free coordinates to the unique set point carrying
    /// them in the trailing positions of each block.
    pub fn encode(&self, input: &[u64]) -> Result<Vec<u64>, EvasiveError> {
        if input.len() != self.input_len() {
            return Err(EvasiveError::InputLength {
                expected: self.input_len(),
                got: input.len(),
            });
        }
        self.check_coords(input)?;
        let f = &self.field;
        let free = self.w - self.v;
        let mut out = Vec::with_capacity(self.ambient());
        for block in input.chunks(free) {
            // rhs_i = - sum over free columns of A[i][j] x_j^{d_j}
            let mut rhs = vec![0u64; self.v];
            for (jj, &x) in block.iter().enumerate() {
                let j = self.v + jj;
                let xp = f.pow(x, self.degrees[j] as u128);
                for (i, r) in rhs.iter_mut().enumerate() {
                    *r = f.sub(*r, f.mul(self.coeffs[(i, j)], xp));
                }
            }
            let y = self.solved_inv.mul_vec(&rhs);
            for i in 0..self.v {
                out.push(f.pow(y[i], self.root_exps[i]));
            }
            out.extend_from_slice(block);
        }
        debug_assert!(self.is_member(&out));
        Ok(out)
    }

    /// Inverse of [`encode`]: project a set point onto its free coordinates.
    pub fn decode(&self, point: &[u64]) -> Result<Vec<u64>, EvasiveError> {
        if point.len() != self.ambient() {
            return Err(EvasiveError::InputLength {
                expected: self.ambient(),
                got: point.len(),
            });
        }
        self.check_coords(point)?;
        if !self.is_member(point) {
            return Err(EvasiveError::NotMember);
        }
        let mut out = Vec::with_capacity(self.input_len());
        for block in point.chunks(self.w) {
            out.extend_from_slice(&block[self.v..]);
        }
        Ok(out)
    }

    fn forms_vanish(&self, block: &[u64]) -> bool {
        let f = &self.field;
        for i in 0..self.v {
            let mut acc = 0u64;
            for (j, &x) in block.iter().enumerate() {
                let xp = f.pow(x, self.degrees[j] as u128);
                acc = f.add(acc, f.mul(self.coeffs[(i, j)], xp));
            }
            if acc != 0 {
                return false;
            }
        }
        true
    }

    pub fn is_member(&self, point: &[u64]) -> bool {
        point.len() == self.ambient()
            && point.iter().all(|&x| x < self.field.order())
            && point.chunks(self.w).all(|blk| self.forms_vanish(blk))
    }

    /// All points of the set lying on the affine subspace, for subspaces of
    /// dimension at most v.  Works block by block: enumerate the projected
    /// sub-coset of the current block, keep the points where the forms
    /// vanish, restrict the parameter space to their preimage, recurse.
    pub fn intersect(&self, space: &AffineSpace) -> Result<Vec<Vec<u64>>, EvasiveError> {
        if space.ambient() != self.ambient() {
            return Err(EvasiveError::InputLength {
                expected: self.ambient(),
                got: space.ambient(),
            });
        }
        if space.dim() > self.v {
            return Err(EvasiveError::DimensionTooLarge {
                dim: space.dim(),
                max: self.v,
            });
        }
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(self.ambient());
        self.intersect_rec(
            space.offset().to_vec(),
            space.basis().to_vec(),
            &mut prefix,
            &mut out,
        );
        Ok(out)
    }

    fn intersect_rec(
        &self,
        offset: Vec<u64>,
        basis: Vec<Vec<u64>>,
        prefix: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
    ) {
        let f = &self.field;
        if offset.is_empty() {
            out.push(prefix.clone());
            return;
        }
        let w = self.w;
        // Restriction of the parameter map to this block: columns are the
        // leading w coordinates of the remaining directions.
        let mut block_map = Mat::zeros(self.field, w, basis.len());
        for (c, dir) in basis.iter().enumerate() {
            for r in 0..w {
                block_map[(r, c)] = dir[r];
            }
        }
        // Basis of the image, to enumerate each projected point once.
        let mut image_rows = Mat::zeros(self.field, basis.len(), w);
        for (r, dir) in basis.iter().enumerate() {
            for c in 0..w {
                image_rows[(r, c)] = dir[c];
            }
        }
        let pivots = image_rows.rref();
        let image_dim = pivots.len();
        let q = f.order();
        let mut combo = vec![0u64; image_dim];
        loop {
            // Projected block point for this combination.
            let mut point: Vec<u64> = offset[..w].to_vec();
            for (i, &c) in combo.iter().enumerate() {
                if c != 0 {
                    for (p, col) in point.iter_mut().zip(image_rows.row(i)) {
                        *p = f.add(*p, f.mul(c, *col));
                    }
                }
            }
            if self.forms_vanish(&point) {
                // Preimage parameters of this block point.
                let m: Vec<u64> = point
                    .iter()
                    .zip(&offset[..w])
                    .map(|(&p, &z)| f.sub(p, z))
                    .collect();
                let (particular, kernel) = block_map
                    .solve(&m)
                    .expect("image point has a preimage by construction");
                // Substitute the particular solution into the tail and
                // restrict the directions to the kernel.
                let tail = &offset[w..];
                let mut new_offset = tail.to_vec();
                for (i, &c) in particular.iter().enumerate() {
                    if c != 0 {
                        for (o, &d) in new_offset.iter_mut().zip(&basis[i][w..]) {
                            *o = f.add(*o, f.mul(c, d));
                        }
                    }
                }
                let new_basis: Vec<Vec<u64>> = kernel
                    .iter()
                    .map(|k| {
                        let mut dir = vec![0u64; tail.len()];
                        for (i, &c) in k.iter().enumerate() {
                            if c != 0 {
                                for (o, &d) in dir.iter_mut().zip(&basis[i][w..]) {
                                    *o = f.add(*o, f.mul(c, d));
                                }
                            }
                        }
                        dir
                    })
                    .collect();
                let depth = prefix.len();
                prefix.extend_from_slice(&point);
                self.intersect_rec(new_offset, new_basis, prefix, out);
                prefix.truncate(depth);
            }
            // Odometer step over the image combinations.
            let mut i = 0;
            loop {
                if i == combo.len() {
                    return;
                }
                combo[i] += 1;
                if combo[i] < q {
                    break;
                }
                combo[i] = 0;
                i += 1;
            }
        }
    }
}

/// Strictly decreasing degrees: tail (w-v+1 .. 2), head the v smallest
/// integers above w-v+1 coprime to q-1, in descending order.
fn degree_sequence(q: u64, v: usize, w: usize) -> Vec<u64> {
    let tail_top = (w - v + 1) as u64;
    let mut head = Vec::with_capacity(v);
    let mut cand = tail_top + 1;
    while head.len() < v {
        if num_integer::gcd(cand, q - 1) == 1 {
            head.push(cand);
        }
        cand += 1;
    }
    head.reverse();
    let mut degrees = head;
    degrees.extend((2..=tail_top).rev());
    debug_assert!(degrees.windows(2).all(|p| p[0] > p[1]));
    debug_assert_eq!(degrees.len(), w);
    degrees
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use std::collections::BTreeMap;

    fn sys13() -> EvasiveSystem {
        EvasiveSystem::build(PrimeField::new(13).unwrap(), 2, 1).unwrap()
    }

    #[test]
    fn build_rejects_degenerate_shapes() {
        let f13 = PrimeField::new(13).unwrap();
        assert!(matches!(
            EvasiveSystem::build(f13, 1, 1),
            Err(EvasiveError::DimensionTooSmall)
        ));
        assert!(matches!(
            EvasiveSystem::build(f13, 2, 0),
            Err(EvasiveError::ZeroBlocks)
        ));
        // v=3 needs q > 15.
        assert!(matches!(
            EvasiveSystem::build(f13, 3, 1),
            Err(EvasiveError::FieldTooSmall { q: 13, min: 15 })
        ));
        assert!(EvasiveSystem::build(PrimeField::new(17).unwrap(), 3, 1).is_ok());
        let f7 = PrimeField::new(7).unwrap();
        assert!(matches!(
            EvasiveSystem::build(f7, 2, 1),
            Err(EvasiveError::FieldTooSmall { q: 7, min: 8 })
        ));
    }

    #[test]
    fn cauchy_matrix_mod_13() {
        let s = sys13();
        let expect = [[10u64, 8, 11, 2], [8, 11, 2, 5]];
        for i in 0..2 {
            for j in 0..4 {
                assert_eq!(s.coeff_matrix()[(i, j)], expect[i][j]);
            }
        }
        assert!(strongly_regular(s.coeff_matrix()));
    }

    #[test]
    fn degree_sequences_are_deterministic() {
        assert_eq!(sys13().degrees(), &[7, 5, 3, 2]);
        let s37 = EvasiveSystem::build(PrimeField::new(37).unwrap(), 2, 2).unwrap();
        assert_eq!(s37.degrees(), &[7, 5, 3, 2]);
        // q=31: q-1=30, smallest coprime above 3 is 7, then 11.
        let s31 = EvasiveSystem::build(PrimeField::new(31).unwrap(), 2, 1).unwrap();
        assert_eq!(s31.degrees(), &[11, 7, 3, 2]);
    }

    #[test]
    fn encode_matches_hand_computation() {
        let s = sys13();
        // Free coordinates (1, 0): solve the 2x2 system by hand gives the
        // block point (2, 2, 1, 0).
        let p = s.encode(&[1, 0]).unwrap();
        assert_eq!(p, vec![2, 2, 1, 0]);
        assert!(s.is_member(&p));
        assert_eq!(s.decode(&p).unwrap(), vec![1, 0]);
        assert_eq!(s.encode(&[0, 0]).unwrap(), vec![0, 0, 0, 0]);
    }

    // The whole block variety, by brute force: exactly q^{w-v} points, one
    // per assignment of the free coordinates, and encode hits each.
    #[test]
    fn encode_is_the_variety_bijection() {
        let s = sys13();
        let q = 13u64;
        let mut by_free: BTreeMap<(u64, u64), Vec<u64>> = BTreeMap::new();
        let mut count = 0usize;
        for x0 in 0..q {
            for x1 in 0..q {
                for x2 in 0..q {
                    for x3 in 0..q {
                        let p = vec![x0, x1, x2, x3];
                        if s.is_member(&p) {
                            count += 1;
                            assert!(
                                by_free.insert((x2, x3), p).is_none(),
                                "free coordinates determine the point"
                            );
                        }
                    }
                }
            }
        }
        assert_eq!(count, 169);
        for x2 in 0..q {
            for x3 in 0..q {
                assert_eq!(s.encode(&[x2, x3]).unwrap(), by_free[&(x2, x3)]);
            }
        }
    }

    #[test]
    fn decode_rejects_corruption() {
        let s = sys13();
        let mut p = s.encode(&[5, 9]).unwrap();
        p[0] = s.field().add(p[0], 1);
        assert_eq!(s.decode(&p), Err(EvasiveError::NotMember));
        assert_eq!(
            s.decode(&[1, 2, 3]),
            Err(EvasiveError::InputLength {
                expected: 4,
                got: 3
            })
        );
        assert_eq!(s.encode(&[13, 0]), Err(EvasiveError::CoordOutOfField(13)));
    }

    #[test]
    fn multi_block_roundtrip() {
        let s = EvasiveSystem::build(PrimeField::new(37).unwrap(), 2, 2).unwrap();
        assert_eq!(s.ambient(), 8);
        assert_eq!(s.input_len(), 4);
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..300 {
            let input: Vec<u64> = (0..4).map(|_| s.field().uniform(&mut rng)).collect();
            let p = s.encode(&input).unwrap();
            assert!(s.is_member(&p));
            assert_eq!(s.decode(&p).unwrap(), input);
        }
    }

    #[test]
    fn intersect_zero_dimensional() {
        let s = sys13();
        let member = s.encode(&[3, 7]).unwrap();
        let hit = s
            .intersect(&AffineSpace::point(s.field(), member.clone()))
            .unwrap();
        assert_eq!(hit, vec![member]);
        let miss = s
            .intersect(&AffineSpace::point(s.field(), vec![1, 1, 1, 1]))
            .unwrap();
        assert!(miss.is_empty());
    }

    #[test]
    fn intersect_rejects_large_dimension() {
        let s = sys13();
        let basis = vec![
            vec![1, 0, 0, 0],
            vec![0, 1, 0, 0],
            vec![0, 0, 1, 0],
        ];
        let space = AffineSpace::new(s.field(), vec![0; 4], basis);
        assert_eq!(
            s.intersect(&space),
            Err(EvasiveError::DimensionTooLarge { dim: 3, max: 2 })
        );
    }

    fn scan_oracle(s: &EvasiveSystem, space: &AffineSpace) -> Vec<Vec<u64>> {
        let mut pts: Vec<Vec<u64>> = space
            .enumerate()
            .into_iter()
            .filter(|p| s.is_member(p))
            .collect();
        pts.sort();
        pts
    }

    #[test]
    fn intersect_matches_full_scan() {
        for (q, b) in [(13u64, 1usize), (13, 2), (37, 1)] {
            let s = EvasiveSystem::build(PrimeField::new(q).unwrap(), 2, b).unwrap();
            let mut rng = ChaCha12Rng::seed_from_u64(1000 + q + b as u64);
            for trial in 0..150 {
                let dim = trial % 3; // 0, 1, 2 = v
                let offset: Vec<u64> = (0..s.ambient())
                    .map(|_| s.field().uniform(&mut rng))
                    .collect();
                // Half the trials pass through a set point so hits exist.
                let offset = if trial % 2 == 0 {
                    let input: Vec<u64> = (0..s.input_len())
                        .map(|_| s.field().uniform(&mut rng))
                        .collect();
                    s.encode(&input).unwrap()
                } else {
                    offset
                };
                let basis: Vec<Vec<u64>> = (0..dim)
                    .map(|_| {
                        (0..s.ambient())
                            .map(|_| s.field().uniform(&mut rng))
                            .collect()
                    })
                    .collect();
                let space = AffineSpace::new(s.field(), offset, basis);
                let mut got = s.intersect(&space).unwrap();
                got.sort();
                // No dedup: the recursion must not emit duplicates.
                assert_eq!(got, scan_oracle(&s, &space));
            }
        }
    }
}
