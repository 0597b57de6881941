//! Sparse multivariate polynomials with coefficients in `Z/m`, used as the
//! canonical representatives of elements of finitely presented rings.
//!
//! Monomials are ordered degree-lexicographically; this is the order the
//! rewrite rules must decrease, which makes normalization terminate.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

pub type Exp = u32;

/// Exponent vector of a monomial; length is the number of ring variables.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Monomial(pub Vec<Exp>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn total_deg(&self) -> u32 {
        self.0.iter().copied().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| a.checked_add(b).expect("monomial exponent overflow"))
                .collect(),
        )
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(&a, &b)| a <= b)
    }

    /// `other / self`, assuming `self.divides(other)`.
    pub fn div_into(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(&a, &b)| b - a).collect())
    }

    /// Scales every exponent by `k` (used by perfection stages).
    pub fn scale(&self, k: u32) -> Monomial {
        Monomial(
            self.0
                .iter()
                .map(|&e| {
                    let v = e.checked_mul(k).expect("exponent overflow");
                    Exp::try_from(v).expect("exponent overflow")
                })
                .collect(),
        )
    }

    /// Exponent-wise division by `k` when every exponent is divisible.
    pub fn unscale(&self, k: u32) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for &e in &self.0 {
            if e % k != 0 {
                return None;
            }
            out.push((e / k) as Exp);
        }
        Some(Monomial(out))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_deg()
            .cmp(&other.total_deg())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial; invariant: no zero coefficients are stored.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Poly {
    pub terms: BTreeMap<Monomial, u64>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: u64, nvars: usize, modulus: u64) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(nvars), c, modulus);
        p
    }

    pub fn monomial(m: Monomial, c: u64, modulus: u64) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c, modulus);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: u64, modulus: u64) {
        if c.is_multiple_of(modulus) {
            return;
        }
        let entry = self.terms.entry(m).or_insert(0);
        *entry = addm(*entry, c % modulus, modulus);
        if *entry == 0 {
            // remove the key we just zeroed
            let key = self
                .terms
                .iter()
                .find(|&(_, &v)| v == 0)
                .map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, other: &Poly, modulus: u64) -> Poly {
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c, modulus);
        }
        out
    }

    pub fn neg(&self, modulus: u64) -> Poly {
        let mut out = Poly::zero();
        for (m, &c) in &self.terms {
            out.add_term(m.clone(), modulus - c, modulus);
        }
        out
    }

    pub fn sub(&self, other: &Poly, modulus: u64) -> Poly {
        self.add(&other.neg(modulus), modulus)
    }

    pub fn mul(&self, other: &Poly, modulus: u64) -> Poly {
        let mut out = Poly::zero();
        for (m1, &c1) in &self.terms {
            for (m2, &c2) in &other.terms {
                out.add_term(m1.mul(m2), mulm(c1, c2, modulus), modulus);
            }
        }
        out
    }

    pub fn scale_coeff(&self, c: u64, modulus: u64) -> Poly {
        let mut out = Poly::zero();
        for (m, &a) in &self.terms {
            out.add_term(m.clone(), mulm(a, c, modulus), modulus);
        }
        out
    }

    /// Multiplies every monomial by `m`.
    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(k, &v)| (k.mul(m), v)).collect(),
        }
    }

    pub fn coeff(&self, m: &Monomial) -> u64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<(&Monomial, u64)> {
        self.terms.iter().next_back().map(|(m, &c)| (m, c))
    }
}

pub fn addm(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

pub fn mulm(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn powm(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulm(acc, a, m);
        }
        a = mulm(a, a, m);
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_order_is_deglex() {
        let x2 = Monomial(vec![2, 0]);
        let xy = Monomial(vec![1, 1]);
        let y = Monomial(vec![0, 1]);
        assert!(y < xy);
        assert!(xy < x2); // same degree, lex on exponents
        assert!(Monomial::one(2) < y);
    }

    #[test]
    fn poly_arith_mod_4() {
        let m = 4;
        let x = Poly::monomial(Monomial::var(1, 0), 1, m);
        let three = Poly::constant(3, 1, m);
        let s = x.add(&three, m);
        let sq = s.mul(&s, m);
        // (x+3)^2 = x^2 + 6x + 9 = x^2 + 2x + 1 mod 4
        assert_eq!(sq.coeff(&Monomial(vec![2])), 1);
        assert_eq!(sq.coeff(&Monomial(vec![1])), 2);
        assert_eq!(sq.coeff(&Monomial(vec![0])), 1);
        let z = s.sub(&s, m);
        assert!(z.is_zero());
    }
}
