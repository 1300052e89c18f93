//! Prime fields F_q and extensions F_{q^mu}.
//!
//! Prime field elements are canonical `u64` residues below q.  Extension
//! elements are coefficient vectors of length mu over the base field
//! (little-endian in the adjoined root), so the identification of F_q^mu
//! with F_{q^mu} used by the wrapping layers is the identity on this
//! representation.  The extension modulus is the first irreducible monic
//! polynomial in a deterministic lexicographic search, which makes every
//! derived object reproducible from (q, mu) alone.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field order {0} out of supported range")]
    OrderOutOfRange(u64),
    #[error("extension order q^mu overflows")]
    ExtOrderOverflow,
    #[error("exponent {d} shares a factor with the group order {order}")]
    ExponentNotCoprime { d: u128, order: u128 },
    #[error("extension degree must be at least 1")]
    ZeroDegree,
}

/// Largest supported prime, chosen so products of two residues fit in u64.
const MAX_Q: u64 = (1 << 31) - 1;

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime factors by trial division.
fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = egcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Inverse of a modulo m, for gcd(a, m) = 1.
pub(crate) fn mod_inverse(a: u128, m: u128) -> Option<u128> {
    let (g, x, _) = egcd((a % m) as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m as i128) as u128)
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// The prime field F_q.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    q: u64,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self, FieldError> {
        if q > MAX_Q {
            return Err(FieldError::OrderOutOfRange(q));
        }
        if !is_prime(q) {
            return Err(FieldError::NotPrime(q));
        }
        Ok(PrimeField { q })
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.q
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero");
        self.pow(a, (self.q - 2) as u128)
    }

    pub fn pow(&self, mut base: u64, mut e: u128) -> u64 {
        let mut acc = 1u64;
        base %= self.q;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Reduce an unconstrained integer into the field.
    pub fn from_u64(&self, a: u64) -> u64 {
        a % self.q
    }

    pub fn uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.random_range(0..self.q)
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.q
    }

    /// Smallest generator of the multiplicative group.
    pub fn generator(&self) -> u64 {
        if self.q == 2 {
            return 1;
        }
        let factors = prime_factors(self.q - 1);
        for g in 2..self.q {
            if factors
                .iter()
                .all(|&p| self.pow(g, ((self.q - 1) / p) as u128) != 1)
            {
                return g;
            }
        }
        unreachable!("every prime field has a generator")
    }

    /// Unique x with x^d = y, requiring gcd(d, q-1) = 1.
    pub fn dth_root(&self, y: u64, d: u128) -> Result<u64, FieldError> {
        let e = root_exponent(d, (self.q - 1) as u128)?;
        Ok(if y == 0 { 0 } else { self.pow(y, e) })
    }
}

/// Inverse of d modulo the group order, the exponent that undoes x -> x^d.
pub(crate) fn root_exponent(d: u128, group_order: u128) -> Result<u128, FieldError> {
    assert!(d >= 1, "root degree must be positive");
    if gcd_u128(d, group_order) != 1 {
        return Err(FieldError::ExponentNotCoprime {
            d,
            order: group_order,
        });
    }
    if group_order == 1 {
        return Ok(0);
    }
    Ok(mod_inverse(d % group_order, group_order).expect("coprime by check above"))
}

// Dense little-endian polynomials over a prime field, used for extension
// field arithmetic.  The zero polynomial is the empty vector.
mod poly {
    use super::PrimeField;

    pub fn trim(mut p: Vec<u64>) -> Vec<u64> {
        while p.last() == Some(&0) {
            p.pop();
        }
        p
    }

    pub fn sub(f: &PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out = vec![0u64; n];
        for (i, o) in out.iter_mut().enumerate() {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            *o = f.sub(x, y);
        }
        trim(out)
    }

    pub fn mul(f: &PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(x, y));
            }
        }
        trim(out)
    }

    /// Remainder of a modulo the monic polynomial m.
    pub fn rem(f: &PrimeField, a: &[u64], m: &[u64]) -> Vec<u64> {
        debug_assert_eq!(*m.last().unwrap(), 1, "modulus must be monic");
        let mut r = trim(a.to_vec());
        let dm = m.len() - 1;
        while r.len() > dm {
            let lead = *r.last().unwrap();
            let shift = r.len() - 1 - dm;
            for (j, &mj) in m.iter().enumerate() {
                let idx = shift + j;
                r[idx] = f.sub(r[idx], f.mul(lead, mj));
            }
            r = trim(r);
        }
        r
    }

    pub fn pow_mod(f: &PrimeField, base: &[u64], mut e: u128, m: &[u64]) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = rem(f, base, m);
        while e > 0 {
            if e & 1 == 1 {
                acc = rem(f, &mul(f, &acc, &b), m);
            }
            b = rem(f, &mul(f, &b, &b), m);
            e >>= 1;
        }
        acc
    }

    pub fn gcd(f: &PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut x = trim(a.to_vec());
        let mut y = trim(b.to_vec());
        while !y.is_empty() {
            let lead = f.inv(*y.last().unwrap());
            let monic: Vec<u64> = y.iter().map(|&c| f.mul(c, lead)).collect();
            let r = rem(f, &x, &monic);
            x = y;
            y = r;
        }
        x
    }

    /// s with s*a = gcd(a, m) mod m, via the extended Euclidean algorithm.
    pub fn inv_mod(f: &PrimeField, a: &[u64], m: &[u64]) -> Option<Vec<u64>> {
        let (mut r0, mut r1) = (trim(m.to_vec()), trim(a.to_vec()));
        let (mut s0, mut s1) = (Vec::new(), vec![1u64]);
        while !r1.is_empty() {
            // Divide r0 by r1: quotient accumulated into the coefficient pair.
            let mut q = vec![0u64; r0.len().saturating_sub(r1.len()) + 1];
            let inv_lead = f.inv(*r1.last().unwrap());
            let mut r = r0.clone();
            while r.len() >= r1.len() && !r.is_empty() {
                let c = f.mul(*r.last().unwrap(), inv_lead);
                let shift = r.len() - r1.len();
                q[shift] = f.add(q[shift], c);
                let scaled: Vec<u64> = std::iter::repeat(0)
                    .take(shift)
                    .chain(r1.iter().map(|&x| f.mul(x, c)))
                    .collect();
                r = sub(f, &r, &scaled);
            }
            let qs1 = mul(f, &trim(q), &s1);
            let s2 = sub(f, &s0, &qs1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
        }
        if r0.len() != 1 {
            return None; // gcd not a unit
        }
        let scale = f.inv(r0[0]);
        Some(s0.iter().map(|&c| f.mul(c, scale)).collect())
    }
}

/// The extension field F_{q^mu}, elements as length-mu coefficient vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtField {
    base: PrimeField,
    mu: usize,
    modulus: Vec<u64>,
}

pub type ExtElem = Vec<u64>;

impl ExtField {
    /// Build F_{q^mu} with the first irreducible monic modulus in
    /// lexicographic order of the constant-upward coefficient encoding.
    pub fn new(base: PrimeField, mu: usize) -> Result<Self, FieldError> {
        if mu == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = base.order() as u128;
        let mut order: u128 = 1;
        for _ in 0..mu {
            order = order.checked_mul(q).ok_or(FieldError::ExtOrderOverflow)?;
        }
        let mut idx: u128 = 0;
        loop {
            if idx >= order {
                unreachable!("irreducible polynomial of every degree exists");
            }
            let mut m = Vec::with_capacity(mu + 1);
            let mut c = idx;
            for _ in 0..mu {
                m.push((c % q) as u64);
                c /= q;
            }
            m.push(1);
            if Self::is_irreducible(&base, &m) {
                return Ok(ExtField { base, mu, modulus: m });
            }
            idx += 1;
        }
    }

    // Degree-mu monic m is irreducible iff it shares no factor with
    // X^{q^i} - X for 1 <= i <= mu/2 (those split into the irreducibles of
    // degree dividing i).
    fn is_irreducible(base: &PrimeField, m: &[u64]) -> bool {
        let mu = m.len() - 1;
        if mu == 1 {
            return true;
        }
        let x = vec![0u64, 1];
        let mut r = x.clone();
        for _ in 1..=mu / 2 {
            r = poly::pow_mod(base, &r, base.order() as u128, m);
            let g = poly::gcd(base, &poly::sub(base, &r, &x), m);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }

    pub fn base(&self) -> PrimeField {
        self.base
    }

    pub fn degree(&self) -> usize {
        self.mu
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn order(&self) -> u128 {
        (self.base.order() as u128).pow(self.mu as u32)
    }

    pub fn zero(&self) -> ExtElem {
        vec![0; self.mu]
    }

    pub fn one(&self) -> ExtElem {
        let mut e = vec![0; self.mu];
        e[0] = 1;
        e
    }

    /// Lift a base field element to the extension.
    pub fn embed(&self, a: u64) -> ExtElem {
        let mut e = vec![0; self.mu];
        e[0] = self.base.from_u64(a);
        e
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    fn pad(&self, p: Vec<u64>) -> ExtElem {
        let mut p = p;
        p.resize(self.mu, 0);
        p
    }

    fn check(&self, a: &[u64]) {
        debug_assert_eq!(a.len(), self.mu, "element width mismatch");
        debug_assert!(a.iter().all(|&c| c < self.base.order()));
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> ExtElem {
        self.check(a);
        self.check(b);
        (0..self.mu).map(|i| self.base.add(a[i], b[i])).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> ExtElem {
        self.check(a);
        self.check(b);
        (0..self.mu).map(|i| self.base.sub(a[i], b[i])).collect()
    }

    pub fn neg(&self, a: &[u64]) -> ExtElem {
        self.check(a);
        a.iter().map(|&c| self.base.neg(c)).collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> ExtElem {
        self.check(a);
        self.check(b);
        let prod = poly::mul(&self.base, a, b);
        self.pad(poly::rem(&self.base, &prod, &self.modulus))
    }

    pub fn inv(&self, a: &[u64]) -> ExtElem {
        self.check(a);
        assert!(!self.is_zero(a), "inverse of zero");
        let s = poly::inv_mod(&self.base, a, &self.modulus)
            .expect("nonzero element is invertible modulo an irreducible");
        self.pad(s)
    }

    pub fn pow(&self, a: &[u64], mut e: u128) -> ExtElem {
        self.check(a);
        let mut acc = self.one();
        let mut b = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    pub fn uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> ExtElem {
        (0..self.mu).map(|_| self.base.uniform(rng)).collect()
    }

    /// All q^mu elements in odometer order; intended for small fields.
    pub fn elements(&self) -> impl Iterator<Item = ExtElem> + '_ {
        let total = self.order();
        let q = self.base.order() as u128;
        (0..total).map(move |mut idx| {
            (0..self.mu)
                .map(|_| {
                    let c = (idx % q) as u64;
                    idx /= q;
                    c
                })
                .collect()
        })
    }

    /// Unique x with x^d = y, requiring gcd(d, q^mu - 1) = 1.
    pub fn dth_root(&self, y: &[u64], d: u128) -> Result<ExtElem, FieldError> {
        let e = root_exponent(d, self.order() - 1)?;
        Ok(if self.is_zero(y) {
            self.zero()
        } else {
            self.pow(y, e)
        })
    }
}
