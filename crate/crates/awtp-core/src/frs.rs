//! Folded Reed-Solomon codes and linear-algebraic list decoding.
//!
//! A message polynomial f of degree below k over F_q is folded u-at-a-time:
//! symbol j of the codeword is (f(g^{ju}), ..., f(g^{ju+u-1})) for a fixed
//! generator g, so the code has N symbols over F_q^u and needs q > N u.
//!
//! Decoding interpolates Q(X, Y_1..Y_v) = A_0(X) + sum_i A_i(X) Y_i through
//! the received word using u-v+1 sliding windows per symbol, then reads the
//! candidate message coefficients off a k-by-k lower-triangular linear
//! system.  Every codeword agreeing with the received word on more than
//! N/(v+1) + (v/(v+1)) * uR/(u-v+1) symbols lands in the solution set, an
//! affine subspace of dimension at most v-1.  The set can also be empty on
//! adversarial inputs; callers treat that as a decoding failure.

use crate::fields::PrimeField;
use crate::linalg::{AffineSpace, Mat};
use num_rational::Ratio;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrsError {
    #[error("field order {q} too small for {points} evaluation points")]
    FieldTooSmall { q: u64, points: usize },
    #[error("folding u must be at least 1")]
    ZeroFolding,
    #[error("symbol count N must be at least 1")]
    ZeroSymbols,
    #[error("window count v = {v} out of range 1..=u = {u}")]
    BadWindowCount { v: usize, u: usize },
    #[error("dimension k = {k} out of range 1..={max}")]
    BadDimension { k: usize, max: usize },
    #[error("expected {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("word shape mismatch: expected {n} symbols of width {u}")]
    ShapeMismatch { n: usize, u: usize },
    #[error("coordinate {0} outside the field")]
    CoordOutOfField(u64),
    #[error("search space of {0} candidates exceeds the brute force cap")]
    TooLarge(u128),
    #[error("interpolation produced no polynomial")]
    InterpolationFailed,
    #[error("cannot parse word: {0}")]
    Parse(String),
}

const BRUTE_FORCE_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrsCodeword {
    pub symbols: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReceivedWord {
    pub symbols: Vec<Vec<u64>>,
}

impl From<&FrsCodeword> for ReceivedWord {
    fn from(c: &FrsCodeword) -> Self {
        ReceivedWord {
            symbols: c.symbols.clone(),
        }
    }
}

/// Number of symbol positions where the two words differ.
pub fn symbol_distance(a: &[Vec<u64>], b: &[Vec<u64>]) -> usize {
    assert_eq!(a.len(), b.len(), "word length mismatch");
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// One text line per symbol, coordinates space-separated base 10.
pub fn format_symbols(symbols: &[Vec<u64>]) -> String {
    let mut out = String::new();
    for sym in symbols {
        let line: Vec<String> = sym.iter().map(|x| x.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_symbols(text: &str) -> Result<Vec<Vec<u64>>, FrsError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let sym: Result<Vec<u64>, _> = line.split_whitespace().map(str::parse::<u64>).collect();
        out.push(sym.map_err(|e| FrsError::Parse(format!("line {}: {e}", lineno + 1)))?);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct FrsParams {
    field: PrimeField,
    u: usize,
    n_sym: usize,
    k: usize,
    v: usize,
    gamma: u64,
    gamma_pows: Vec<u64>,
}

impl FrsParams {
    pub fn new(
        field: PrimeField,
        u: usize,
        n_sym: usize,
        k: usize,
        v: usize,
    ) -> Result<Self, FrsError> {
        if u == 0 {
            return Err(FrsError::ZeroFolding);
        }
        if n_sym == 0 {
            return Err(FrsError::ZeroSymbols);
        }
        let points = u * n_sym;
        if field.order() as usize <= points {
            return Err(FrsError::FieldTooSmall {
                q: field.order(),
                points,
            });
        }
        if v == 0 || v > u {
            return Err(FrsError::BadWindowCount { v, u });
        }
        if k == 0 || k > points {
            return Err(FrsError::BadDimension { k, max: points });
        }
        let gamma = field.generator();
        let mut gamma_pows = Vec::with_capacity(points);
        let mut p = 1u64;
        for _ in 0..points {
            gamma_pows.push(p);
            p = field.mul(p, gamma);
        }
        Ok(FrsParams {
            field,
            u,
            n_sym,
            k,
            v,
            gamma,
            gamma_pows,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn folding(&self) -> usize {
        self.u
    }

    pub fn symbols(&self) -> usize {
        self.n_sym
    }

    pub fn dimension(&self) -> usize {
        self.k
    }

    pub fn windows(&self) -> usize {
        self.v
    }

    pub fn generator(&self) -> u64 {
        self.gamma
    }

    /// k / (u N).
    pub fn rate(&self) -> Ratio<u64> {
        Ratio::new(self.k as u64, (self.u * self.n_sym) as u64)
    }

    fn eval(&self, coeffs: &[u64], x: u64) -> u64 {
        let f = &self.field;
        coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn encode(&self, coeffs: &[u64]) -> Result<FrsCodeword, FrsError> {
        if coeffs.len() != self.k {
            return Err(FrsError::CoefficientCount {
                expected: self.k,
                got: coeffs.len(),
            });
        }
        if let Some(&c) = coeffs.iter().find(|&&c| c >= self.field.order()) {
            return Err(FrsError::CoordOutOfField(c));
        }
        let symbols = (0..self.n_sym)
            .map(|j| {
                (0..self.u)
                    .map(|s| self.eval(coeffs, self.gamma_pows[j * self.u + s]))
                    .collect()
            })
            .collect();
        Ok(FrsCodeword { symbols })
    }

    /// Smallest agreement that forces a codeword into the decoder output:
    /// the least integer strictly above N(u-v+1)+vk over (v+1)(u-v+1).
    pub fn agreement_threshold(&self) -> usize {
        let num = (self.n_sym * (self.u - self.v + 1) + self.v * self.k) as u64;
        let den = ((self.v + 1) * (self.u - self.v + 1)) as u64;
        (num / den) as usize + 1
    }

    /// Largest error weight with guaranteed list decoding, None when even
    /// error-free words fall short of the agreement threshold.
    pub fn decoding_radius(&self) -> Option<usize> {
        let t = self.agreement_threshold();
        if t > self.n_sym {
            None
        } else {
            Some(self.n_sym - t)
        }
    }

    fn check_shape(&self, y: &ReceivedWord) -> Result<(), FrsError> {
        if y.symbols.len() != self.n_sym || y.symbols.iter().any(|s| s.len() != self.u) {
            return Err(FrsError::ShapeMismatch {
                n: self.n_sym,
                u: self.u,
            });
        }
        for sym in &y.symbols {
            if let Some(&c) = sym.iter().find(|&&c| c >= self.field.order()) {
                return Err(FrsError::CoordOutOfField(c));
            }
        }
        Ok(())
    }

    /// List decode: the affine space of coefficient vectors containing
    /// every codeword that agrees with y on at least the threshold number
    /// of symbols, or None when the candidate system is inconsistent.
    pub fn list_decode(&self, y: &ReceivedWord) -> Result<Option<AffineSpace>, FrsError> {
        self.check_shape(y)?;
        let f = &self.field;
        let (u, v, k) = (self.u, self.v, self.k);
        let n0 = (u - v + 1) * self.n_sym;
        let d_room = n0 as i64 - k as i64 + 1;
        let deg = if d_room > 0 {
            d_room as usize / (v + 1)
        } else {
            0
        };
        let a0_len = deg + k;
        let ai_len = deg + 1;
        let unknowns = a0_len + v * ai_len;
        debug_assert!(unknowns > n0, "interpolation must be underdetermined");

        let mut m = Mat::zeros(self.field, n0, unknowns);
        let mut row = 0;
        for j in 0..self.n_sym {
            for s in 0..=(u - v) {
                let alpha = self.gamma_pows[j * u + s];
                let mut ap = 1u64;
                for c in 0..a0_len {
                    m[(row, c)] = ap;
                    ap = f.mul(ap, alpha);
                }
                for i in 1..=v {
                    let yv = y.symbols[j][s + i - 1];
                    let mut ap = yv;
                    let base = a0_len + (i - 1) * ai_len;
                    for c in 0..ai_len {
                        m[(row, base + c)] = ap;
                        ap = f.mul(ap, alpha);
                    }
                }
                row += 1;
            }
        }
        let kernel = m.nullspace();
        let qvec = kernel.first().ok_or(FrsError::InterpolationFailed)?;

        let a0 = &qvec[..a0_len];
        let ais: Vec<&[u64]> = (0..v)
            .map(|i| &qvec[a0_len + i * ai_len..a0_len + (i + 1) * ai_len])
            .collect();
        // Strip the common power of X; every interpolation point is a power
        // of the generator, hence nonzero, so Q/X^shift interpolates too.
        // Afterwards some polynomial has a nonzero constant coefficient,
        // which caps the solution space dimension at v-1 (or empties it).
        let shift = (0..a0_len)
            .find(|&mm| a0[mm] != 0 || ais.iter().any(|ai| ai.get(mm).is_some_and(|&c| c != 0)))
            .expect("kernel vector is nonzero");
        let coeff_a0 = |mm: usize| a0.get(mm + shift).copied().unwrap_or(0);
        let coeff_ai = |i: usize, mm: usize| ais[i].get(mm + shift).copied().unwrap_or(0);

        // Lower-triangular system on the message coefficients: row i is
        // sum_{j<=i} B_{i-j}(g^j) f_j = -a0_i with B_m(X) = sum_s a_{s,m} X^{s-1}.
        let mut t = Mat::zeros(self.field, k, k);
        for i in 0..k {
            for j in 0..=i {
                let x = self.gamma_pows[j];
                let mut b = 0u64;
                for s in (0..v).rev() {
                    b = f.add(f.mul(b, x), coeff_ai(s, i - j));
                }
                t[(i, j)] = b;
            }
        }
        let rhs: Vec<u64> = (0..k).map(|i| f.neg(coeff_a0(i))).collect();
        match t.solve(&rhs) {
            None => Ok(None),
            Some((particular, basis)) => {
                let space = AffineSpace::new(self.field, particular, basis);
                debug_assert!(space.dim() < self.v);
                Ok(Some(space))
            }
        }
    }

    /// Every coefficient vector whose codeword lies within the given symbol
    /// distance of y, by exhaustive search over all q^k candidates.
    pub fn brute_force_list(
        &self,
        y: &ReceivedWord,
        radius: usize,
    ) -> Result<Vec<Vec<u64>>, FrsError> {
        self.check_shape(y)?;
        let q = self.field.order();
        let total = (q as u128).checked_pow(self.k as u32);
        if total.is_none_or(|t| t > BRUTE_FORCE_CAP) {
            return Err(FrsError::TooLarge(total.unwrap_or(u128::MAX)));
        }
        let mut out = Vec::new();
        let mut coeffs = vec![0u64; self.k];
        loop {
            let cw = self.encode(&coeffs).expect("coefficients in range");
            if symbol_distance(&cw.symbols, &y.symbols) <= radius {
                out.push(coeffs.clone());
            }
            let mut i = 0;
            loop {
                if i == self.k {
                    return Ok(out);
                }
                coeffs[i] += 1;
                if coeffs[i] < q {
                    break;
                }
                coeffs[i] = 0;
                i += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn small() -> FrsParams {
        FrsParams::new(PrimeField::new(13).unwrap(), 2, 3, 2, 2).unwrap()
    }

    fn reference() -> FrsParams {
        FrsParams::new(PrimeField::new(37).unwrap(), 6, 6, 14, 2).unwrap()
    }

    #[test]
    fn parameter_validation() {
        let f13 = PrimeField::new(13).unwrap();
        assert!(matches!(
            FrsParams::new(f13, 2, 7, 2, 2),
            Err(FrsError::FieldTooSmall { q: 13, points: 14 })
        ));
        assert!(matches!(
            FrsParams::new(f13, 2, 3, 2, 3),
            Err(FrsError::BadWindowCount { v: 3, u: 2 })
        ));
        assert!(matches!(
            FrsParams::new(f13, 2, 3, 7, 2),
            Err(FrsError::BadDimension { k: 7, max: 6 })
        ));
        assert!(matches!(
            FrsParams::new(f13, 2, 3, 0, 1),
            Err(FrsError::BadDimension { k: 0, max: 6 })
        ));
        assert!(FrsParams::new(f13, 2, 3, 6, 2).is_ok());
    }

    #[test]
    fn encode_matches_hand_computation() {
        let p = small();
        assert_eq!(p.generator(), 2);
        // f(x) = 1 + x at points 1,2 | 4,8 | 3,6.
        let cw = p.encode(&[1, 1]).unwrap();
        assert_eq!(cw.symbols, vec![vec![2, 3], vec![5, 9], vec![4, 7]]);
        let zero = p.encode(&[0, 0]).unwrap();
        assert!(zero.symbols.iter().flatten().all(|&x| x == 0));
    }

    #[test]
    fn encode_is_linear() {
        let p = reference();
        let f = p.field();
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        for _ in 0..50 {
            let a: Vec<u64> = (0..14).map(|_| f.uniform(&mut rng)).collect();
            let b: Vec<u64> = (0..14).map(|_| f.uniform(&mut rng)).collect();
            let sum: Vec<u64> = a.iter().zip(&b).map(|(&x, &y)| f.add(x, y)).collect();
            let ca = p.encode(&a).unwrap();
            let cb = p.encode(&b).unwrap();
            let cs = p.encode(&sum).unwrap();
            for j in 0..6 {
                for s in 0..6 {
                    assert_eq!(cs.symbols[j][s], f.add(ca.symbols[j][s], cb.symbols[j][s]));
                }
            }
        }
    }

    #[test]
    fn agreement_thresholds() {
        assert_eq!(small().agreement_threshold(), 3);
        assert_eq!(small().decoding_radius(), Some(0));
        assert_eq!(reference().agreement_threshold(), 4);
        assert_eq!(reference().decoding_radius(), Some(2));
        let f = PrimeField::new(37).unwrap();
        assert_eq!(
            FrsParams::new(f, 4, 4, 4, 2).unwrap().agreement_threshold(),
            3
        );
        // Unfolded unique decoding: strictly more than (N+k)/2 agreements.
        let f101 = PrimeField::new(101).unwrap();
        assert_eq!(
            FrsParams::new(f101, 1, 10, 4, 1)
                .unwrap()
                .agreement_threshold(),
            8
        );
    }

    #[test]
    fn clean_words_land_in_the_list_space() {
        for p in [small(), reference()] {
            let f = p.field();
            let mut rng = ChaCha12Rng::seed_from_u64(5);
            for _ in 0..40 {
                let coeffs: Vec<u64> = (0..p.dimension()).map(|_| f.uniform(&mut rng)).collect();
                let cw = p.encode(&coeffs).unwrap();
                let space = p
                    .list_decode(&ReceivedWord::from(&cw))
                    .unwrap()
                    .expect("clean word cannot yield an empty list");
                assert!(space.contains(&coeffs));
                assert!(space.dim() <= p.windows() - 1);
            }
        }
    }

    #[test]
    fn corrupted_words_stay_contained() {
        let p = reference();
        let f = p.field();
        let radius = p.decoding_radius().unwrap();
        assert_eq!(radius, 2);
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        for _ in 0..100 {
            let coeffs: Vec<u64> = (0..14).map(|_| f.uniform(&mut rng)).collect();
            let cw = p.encode(&coeffs).unwrap();
            let mut y = ReceivedWord::from(&cw);
            let nerr = rng.random_range(0..=radius);
            let mut hit = rand::seq::index::sample(&mut rng, 6, nerr).into_vec();
            hit.sort();
            for j in hit {
                loop {
                    let delta: Vec<u64> = (0..6).map(|_| f.uniform(&mut rng)).collect();
                    if delta.iter().any(|&d| d != 0) {
                        for (ys, d) in y.symbols[j].iter_mut().zip(delta) {
                            *ys = f.add(*ys, d);
                        }
                        break;
                    }
                }
            }
            let space = p.list_decode(&y).unwrap().expect("within radius");
            assert!(space.contains(&coeffs));
        }
    }

    #[test]
    fn list_space_matches_brute_force() {
        let p = small();
        let f = p.field();
        let radius = p.decoding_radius().unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(303);
        let mut empties = 0;
        for _ in 0..60 {
            let symbols: Vec<Vec<u64>> = (0..3)
                .map(|_| (0..2).map(|_| f.uniform(&mut rng)).collect())
                .collect();
            let y = ReceivedWord { symbols };
            let brute = {
                let mut b = p.brute_force_list(&y, radius).unwrap();
                b.sort();
                b
            };
            let space = p.list_decode(&y).unwrap();
            let mut listed: Vec<Vec<u64>> = match &space {
                None => Vec::new(),
                Some(s) => s
                    .enumerate()
                    .into_iter()
                    .filter(|c| {
                        let cw = p.encode(c).unwrap();
                        symbol_distance(&cw.symbols, &y.symbols) <= radius
                    })
                    .collect(),
            };
            if space.is_none() {
                empties += 1;
            }
            listed.sort();
            assert_eq!(listed, brute);
        }
        // The fixed seed hits both populated solution spaces and the
        // inconsistent (empty) edge; both must agree with brute force.
        assert!(empties > 0 && empties < 60);
    }

    #[test]
    fn brute_force_guard_and_radius_extremes() {
        let p = small();
        let cw = p.encode(&[3, 4]).unwrap();
        let y = ReceivedWord::from(&cw);
        // Radius 0 finds exactly the original coefficients.
        assert_eq!(p.brute_force_list(&y, 0).unwrap(), vec![vec![3, 4]]);
        // Radius N admits everything.
        assert_eq!(p.brute_force_list(&y, 3).unwrap().len(), 169);

        let f101 = PrimeField::new(101).unwrap();
        let big = FrsParams::new(f101, 4, 25, 20, 2).unwrap();
        let yy = ReceivedWord {
            symbols: vec![vec![0; 4]; 25],
        };
        assert!(matches!(
            big.brute_force_list(&yy, 0),
            Err(FrsError::TooLarge(_))
        ));
    }

    #[test]
    fn format_parse_roundtrip() {
        let p = small();
        let cw = p.encode(&[7, 9]).unwrap();
        let text = format_symbols(&cw.symbols);
        assert_eq!(parse_symbols(&text).unwrap(), cw.symbols);
        assert!(parse_symbols("1 x\n").is_err());
    }

    #[test]
    fn shape_checks() {
        let p = small();
        let bad = ReceivedWord {
            symbols: vec![vec![1, 2], vec![3, 4]],
        };
        assert!(matches!(
            p.list_decode(&bad),
            Err(FrsError::ShapeMismatch { n: 3, u: 2 })
        ));
        let oob = ReceivedWord {
            symbols: vec![vec![1, 2], vec![3, 4], vec![5, 13]],
        };
        assert!(matches!(
            p.list_decode(&oob),
            Err(FrsError::CoordOutOfField(13))
        ));
    }
}
