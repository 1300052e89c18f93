//! Algebraic manipulation detection code over F_{q^mu}.
//!
//! A message x = (x_1..x_d) is authenticated by a fresh uniform key r and
//! the tag f(x, r) = r^{d+2} + sum_i x_i r^i.  Whatever additive offset
//! (dx, dr, dt) with dx != 0 an adversary applies without seeing r, the
//! verification equation becomes a nonzero polynomial in r of degree at
//! most d+1, so the forgery passes with probability at most (d+1)/q^mu.
//! The exponent d+2 must not vanish in the field, hence (d+2) mod q != 0.

use crate::fields::{ExtElem, ExtField};
use num_bigint::BigUint;
use num_rational::Ratio;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AmdError {
    #[error("block count d must be at least 1")]
    ZeroBlocks,
    #[error("d+2 = {0} is divisible by the field characteristic")]
    DegenerateExponent(usize),
    #[error("expected {expected} message blocks, got {got}")]
    BlockCountMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone)]
pub struct AmdParams {
    field: ExtField,
    d: usize,
}

/// Systematic codeword: message blocks, key, tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmdCodeword {
    pub x: Vec<ExtElem>,
    pub r: ExtElem,
    pub t: ExtElem,
}

impl AmdParams {
    pub fn new(field: ExtField, d: usize) -> Result<Self, AmdError> {
        if d == 0 {
            return Err(AmdError::ZeroBlocks);
        }
        if (d as u64 + 2) % field.base().order() == 0 {
            return Err(AmdError::DegenerateExponent(d + 2));
        }
        Ok(AmdParams { field, d })
    }

    pub fn field(&self) -> &ExtField {
        &self.field
    }

    pub fn blocks(&self) -> usize {
        self.d
    }

    /// Codeword length in base field coordinates: (d+2) * mu.
    pub fn coord_len(&self) -> usize {
        (self.d + 2) * self.field.degree()
    }

    pub fn tag(&self, x: &[ExtElem], r: &ExtElem) -> Result<ExtElem, AmdError> {
        if x.len() != self.d {
            return Err(AmdError::BlockCountMismatch {
                expected: self.d,
                got: x.len(),
            });
        }
        let f = &self.field;
        let mut t = f.zero();
        let mut r_pow = f.one();
        for xi in x {
            r_pow = f.mul(&r_pow, r);
            t = f.add(&t, &f.mul(xi, &r_pow));
        }
        // r_pow is now r^d; raise to r^{d+2}.
        let r2 = f.mul(r, r);
        t = f.add(&t, &f.mul(&r_pow, &r2));
        Ok(t)
    }

    pub fn encode<R: Rng + ?Sized>(
        &self,
        x: &[ExtElem],
        rng: &mut R,
    ) -> Result<AmdCodeword, AmdError> {
        let r = self.field.uniform(rng);
        self.encode_with_key(x, r)
    }

    pub fn encode_with_key(&self, x: &[ExtElem], r: ExtElem) -> Result<AmdCodeword, AmdError> {
        let t = self.tag(x, &r)?;
        Ok(AmdCodeword {
            x: x.to_vec(),
            r,
            t,
        })
    }

    /// The message when the tag checks out, None on rejection.
    pub fn verify(&self, cw: &AmdCodeword) -> Option<Vec<ExtElem>> {
        let t = self.tag(&cw.x, &cw.r).ok()?;
        if t == cw.t {
            Some(cw.x.clone())
        } else {
            None
        }
    }

    /// Forgery probability bound (d+1)/q^mu, exact.
    pub fn failure_bound(&self) -> Ratio<BigUint> {
        let q = BigUint::from(self.field.base().order());
        Ratio::new(
            BigUint::from(self.d as u64 + 1),
            q.pow(self.field.degree() as u32),
        )
    }

    /// Base field coordinates x_1 .. x_d, r, t.
    pub fn flatten(&self, cw: &AmdCodeword) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.coord_len());
        for xi in &cw.x {
            out.extend_from_slice(xi);
        }
        out.extend_from_slice(&cw.r);
        out.extend_from_slice(&cw.t);
        out
    }

    pub fn unflatten(&self, coords: &[u64]) -> Result<AmdCodeword, AmdError> {
        if coords.len() != self.coord_len() {
            return Err(AmdError::BlockCountMismatch {
                expected: self.coord_len(),
                got: coords.len(),
            });
        }
        let mu = self.field.degree();
        let x: Vec<ExtElem> = (0..self.d)
            .map(|i| coords[i * mu..(i + 1) * mu].to_vec())
            .collect();
        let r = coords[self.d * mu..(self.d + 1) * mu].to_vec();
        let t = coords[(self.d + 1) * mu..(self.d + 2) * mu].to_vec();
        Ok(AmdCodeword { x, r, t })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::PrimeField;
    use num_traits::One;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn params(q: u64, mu: usize, d: usize) -> AmdParams {
        let base = PrimeField::new(q).unwrap();
        let ext = ExtField::new(base, mu).unwrap();
        AmdParams::new(ext, d).unwrap()
    }

    #[test]
    fn rejects_degenerate_parameters() {
        let base = PrimeField::new(13).unwrap();
        let ext = ExtField::new(base, 1).unwrap();
        assert!(matches!(
            AmdParams::new(ext.clone(), 0),
            Err(AmdError::ZeroBlocks)
        ));
        // d + 2 = 13 vanishes mod 13.
        assert!(matches!(
            AmdParams::new(ext, 11),
            Err(AmdError::DegenerateExponent(13))
        ));
    }

    #[test]
    fn tag_matches_hand_computation() {
        let p = params(13, 1, 1);
        // f(4, 2) = 2^3 + 4*2 = 16 = 3 mod 13.
        let cw = p.encode_with_key(&[vec![4]], vec![2]).unwrap();
        assert_eq!(cw.t, vec![3]);
        assert_eq!(p.verify(&cw), Some(vec![vec![4]]));

        let mut bad = cw.clone();
        bad.x[0] = vec![5];
        assert_eq!(p.verify(&bad), None);
        let mut bad_tag = cw.clone();
        bad_tag.t = vec![4];
        assert_eq!(p.verify(&bad_tag), None);
    }

    #[test]
    fn roundtrip_for_every_key() {
        let p = params(13, 1, 2);
        let x = vec![vec![7], vec![11]];
        for r in 0..13u64 {
            let cw = p.encode_with_key(&x, vec![r]).unwrap();
            assert_eq!(p.verify(&cw), Some(x.clone()));
        }
    }

    #[test]
    fn flatten_roundtrip() {
        let p = params(13, 2, 2);
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let x = vec![p.field().uniform(&mut rng), p.field().uniform(&mut rng)];
        let cw = p.encode(&x, &mut rng).unwrap();
        let coords = p.flatten(&cw);
        assert_eq!(coords.len(), p.coord_len());
        assert_eq!(p.unflatten(&coords).unwrap(), cw);
    }

    #[test]
    fn failure_bound_values() {
        let two_13 = Ratio::new(BigUint::from(2u32), BigUint::from(13u32));
        assert_eq!(params(13, 1, 1).failure_bound(), two_13);
        let three_169 = Ratio::new(BigUint::from(3u32), BigUint::from(169u32));
        assert_eq!(params(13, 2, 2).failure_bound(), three_169);
        // q=2, mu=1, d=1: bound (d+1)/q = 1, the degenerate extreme.
        assert!(params(2, 1, 1).failure_bound().is_one());
    }

    // For any additive offset with dx != 0, at most d+1 of the q^mu keys
    // accept the forged word.  Exhaustive over keys, sampled over offsets.
    #[test]
    fn forgery_count_at_most_d_plus_one() {
        let p = params(13, 1, 2);
        let f = p.field().clone();
        let x = vec![vec![3], vec![9]];
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        for _ in 0..200 {
            let dx: Vec<ExtElem> = (0..2).map(|_| f.uniform(&mut rng)).collect();
            if dx.iter().all(|b| f.is_zero(b)) {
                continue;
            }
            let dr = f.uniform(&mut rng);
            let dt = f.uniform(&mut rng);
            let mut hits = 0;
            for r in 0..13u64 {
                let cw = p.encode_with_key(&x, vec![r]).unwrap();
                let forged = AmdCodeword {
                    x: vec![f.add(&cw.x[0], &dx[0]), f.add(&cw.x[1], &dx[1])],
                    r: f.add(&cw.r, &dr),
                    t: f.add(&cw.t, &dt),
                };
                if p.verify(&forged).is_some() {
                    hits += 1;
                }
            }
            assert!(hits <= 3, "d+1 = 3 exceeded: {hits} accepting keys");
        }
    }

    // The same game over a quadratic extension, Monte Carlo, checked
    // against the exact bound with generous slack.
    #[test]
    fn forgery_rate_quadratic_extension() {
        let p = params(13, 2, 2);
        let f = p.field().clone();
        let mut rng = ChaCha12Rng::seed_from_u64(4242);
        let trials = 20_000u64;
        let mut hits = 0u64;
        for _ in 0..trials {
            let x = vec![f.uniform(&mut rng), f.uniform(&mut rng)];
            let cw = p.encode(&x, &mut rng).unwrap();
            let mut dx0 = f.uniform(&mut rng);
            if f.is_zero(&dx0) {
                dx0 = f.one();
            }
            let forged = AmdCodeword {
                x: vec![f.add(&cw.x[0], &dx0), cw.x[1].clone()],
                r: f.add(&cw.r, &f.uniform(&mut rng)),
                t: f.add(&cw.t, &f.uniform(&mut rng)),
            };
            if p.verify(&forged).is_some() {
                hits += 1;
            }
        }
        // Bound 3/169 with 4 sigma of slack.
        let bound = 3.0 / 169.0;
        let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
        assert!((hits as f64 / trials as f64) <= bound + 4.0 * sigma);
    }
}
