//! Universal Witt structure polynomials with exact integer coefficients.
//!
//! The cache holds the addition polynomials S_i, multiplication
//! polynomials P_i, negation polynomials (p = 2 only; for odd p negation
//! is multiplication by the Teichmüller lift of -1) and Frobenius
//! polynomials F_i, all solved from the ghost identities by exact
//! division. Term counts explode with the index, so this route is only
//! viable for small lengths; it cross-checks the ghost-lift engine and
//! answers the component-level examples. Coefficients use checked i128
//! arithmetic and report overflow instead of wrapping.

use crate::error::{Error, Result};
use crate::ring::poly::Monomial;
use crate::ring::{Ring, RingElement};
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

/// Integer polynomial in the variables `X_0..X_{v-1}, Y_0..Y_{v-1}`
/// (Y-variables absent for the one-argument families).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ZPoly {
    pub terms: BTreeMap<Monomial, i128>,
}

impl ZPoly {
    pub fn zero() -> Self {
        ZPoly::default()
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut t = BTreeMap::new();
        t.insert(Monomial::var(nvars, i), 1);
        ZPoly { terms: t }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: i128) -> Result<()> {
        if c == 0 {
            return Ok(());
        }
        let e = self.terms.entry(m.clone()).or_insert(0);
        *e = e.checked_add(c).ok_or(Error::Overflow)?;
        if *e == 0 {
            self.terms.remove(&m);
        }
        Ok(())
    }

    pub fn add(&self, o: &ZPoly) -> Result<ZPoly> {
        let mut out = self.clone();
        for (m, &c) in &o.terms {
            out.add_term(m.clone(), c)?;
        }
        Ok(out)
    }

    pub fn sub(&self, o: &ZPoly) -> Result<ZPoly> {
        let mut out = self.clone();
        for (m, &c) in &o.terms {
            out.add_term(m.clone(), c.checked_neg().ok_or(Error::Overflow)?)?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> Result<ZPoly> {
        ZPoly::zero().sub(self)
    }

    pub fn mul(&self, o: &ZPoly) -> Result<ZPoly> {
        let mut out = ZPoly::zero();
        for (m1, &c1) in &self.terms {
            for (m2, &c2) in &o.terms {
                out.add_term(m1.mul(m2), c1.checked_mul(c2).ok_or(Error::Overflow)?)?;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, k: i128) -> Result<ZPoly> {
        let mut out = ZPoly::zero();
        for (m, &c) in &self.terms {
            out.add_term(m.clone(), c.checked_mul(k).ok_or(Error::Overflow)?)?;
        }
        Ok(out)
    }

    pub fn pow(&self, e: u64) -> Result<ZPoly> {
        let mut acc = {
            let mut t = BTreeMap::new();
            t.insert(Monomial::one(self.nvars()), 1);
            ZPoly { terms: t }
        };
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    fn nvars(&self) -> usize {
        self.terms.keys().next().map(|m| m.0.len()).unwrap_or(0)
    }

    /// Exact division by the integer d; errors on any remainder.
    pub fn exact_div(&self, d: i128) -> Result<ZPoly> {
        let mut out = ZPoly::zero();
        for (m, &c) in &self.terms {
            if c % d != 0 {
                return Err(Error::InexactDivision(0));
            }
            out.add_term(m.clone(), c / d)?;
        }
        Ok(out)
    }

    /// Substitutes `vals[i]` for variable i (symbolically).
    pub fn subst(&self, vals: &[ZPoly], nvars_out: usize) -> Result<ZPoly> {
        let mut out = ZPoly::zero();
        for (m, &c) in &self.terms {
            let mut term = {
                let mut t = BTreeMap::new();
                t.insert(Monomial::one(nvars_out), c);
                ZPoly { terms: t }
            };
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&vals[i].pow(e as u64)?)?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Evaluates with the variables bound to ring elements.
    pub fn eval(&self, args: &[RingElement], ring: &Ring) -> RingElement {
        let mut acc = ring.zero();
        for (m, &c) in &self.terms {
            let mut term = ring.from_int((c % ring.modulus() as i128) as i64);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&args[i].pow(e as u64));
                }
            }
            acc = acc.add(&term);
        }
        acc
    }
}

/// Ghost polynomial `w_i` in `nvars` variables starting at `offset`:
/// `sum_j p^j X_{offset+j}^(p^(i-j))`.
pub fn ghost_poly(p: u64, i: usize, nvars: usize, offset: usize) -> Result<ZPoly> {
    let mut out = ZPoly::zero();
    let mut pj: i128 = 1;
    for j in 0..=i {
        let e = p.checked_pow((i - j) as u32).ok_or(Error::Overflow)?;
        let t = ZPoly::var(nvars, offset + j).pow(e)?.scale(pj)?;
        out = out.add(&t)?;
        pj = pj.checked_mul(p as i128).ok_or(Error::Overflow)?;
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct WittStructureCache {
    pub p: u64,
    pub n: usize,
    /// S_i(X_0..X_i, Y_0..Y_i) in 2n variables.
    pub add: Vec<ZPoly>,
    /// P_i in 2n variables.
    pub mul: Vec<ZPoly>,
    /// N_i in n variables; populated for p = 2 only.
    pub neg: Option<Vec<ZPoly>>,
    /// F_i(X_0..X_{i+1}) in n+1 variables.
    pub frob: Vec<ZPoly>,
}

/// Solves the ghost identities for all families up to length n.
/// Exact integer divisions by p^i certify the construction; an inexact
/// division signals an implementation bug.
pub fn witt_structure_polys(p: u64, n: usize) -> Result<WittStructureCache> {
    if !(2..=64).contains(&p) {
        return Err(Error::NonPrimeModulus(p));
    }
    let two_n = 2 * n;
    // ghost targets
    let mut add = Vec::with_capacity(n);
    let mut mul = Vec::with_capacity(n);
    let mut neg = if p == 2 {
        Some(Vec::with_capacity(n))
    } else {
        None
    };
    let mut frob = Vec::with_capacity(n);

    let solve_family = |targets: &dyn Fn(usize) -> Result<ZPoly>,
                        built: &mut Vec<ZPoly>,
                        nvars: usize|
     -> Result<()> {
        for i in built.len()..n {
            let mut rhs = targets(i)?;
            let mut pj: i128 = 1;
            for (j, s) in built.iter().enumerate().take(i) {
                let e = p.checked_pow((i - j) as u32).ok_or(Error::Overflow)?;
                rhs = rhs.sub(&s.pow(e)?.scale(pj)?)?;
                pj = pj.checked_mul(p as i128).ok_or(Error::Overflow)?;
                let _ = nvars;
            }
            let pi = (p as i128).checked_pow(i as u32).ok_or(Error::Overflow)?;
            built.push(rhs.exact_div(pi)?);
        }
        Ok(())
    };

    solve_family(
        &|i| ghost_poly(p, i, two_n, 0)?.add(&ghost_poly(p, i, two_n, n)?),
        &mut add,
        two_n,
    )?;
    solve_family(
        &|i| ghost_poly(p, i, two_n, 0)?.mul(&ghost_poly(p, i, two_n, n)?),
        &mut mul,
        two_n,
    )?;
    if let Some(neg) = neg.as_mut() {
        solve_family(&|i| ghost_poly(p, i, n, 0)?.neg(), neg, n)?;
    }
    solve_family(&|i| ghost_poly(p, i + 1, n + 1, 0), &mut frob, n + 1)?;

    Ok(WittStructureCache {
        p,
        n,
        add,
        mul,
        neg,
        frob,
    })
}

impl WittStructureCache {
    /// Evaluates the addition family on coordinates over any ring.
    pub fn eval_add(&self, x: &[RingElement], y: &[RingElement], ring: &Ring) -> Vec<RingElement> {
        let n = x.len().min(y.len()).min(self.n);
        let mut args: Vec<RingElement> = Vec::with_capacity(2 * self.n);
        args.extend(x.iter().take(self.n).cloned());
        args.resize(self.n, ring.zero());
        args.extend(y.iter().take(self.n).cloned());
        args.resize(2 * self.n, ring.zero());
        (0..n).map(|i| self.add[i].eval(&args, ring)).collect()
    }

    pub fn eval_mul(&self, x: &[RingElement], y: &[RingElement], ring: &Ring) -> Vec<RingElement> {
        let n = x.len().min(y.len()).min(self.n);
        let mut args: Vec<RingElement> = Vec::with_capacity(2 * self.n);
        args.extend(x.iter().take(self.n).cloned());
        args.resize(self.n, ring.zero());
        args.extend(y.iter().take(self.n).cloned());
        args.resize(2 * self.n, ring.zero());
        (0..n).map(|i| self.mul[i].eval(&args, ring)).collect()
    }

    pub fn eval_frobenius(&self, x: &[RingElement], ring: &Ring) -> Vec<RingElement> {
        let n = (x.len().saturating_sub(1)).min(self.n);
        let args: Vec<RingElement> = x.to_vec();
        (0..n).map(|i| self.frob[i].eval(&args, ring)).collect()
    }

    /// Symbolic ghost-compatibility check up to component `upto`:
    /// `w_i(S) = w_i(X) + w_i(Y)`, `w_i(P) = w_i(X)·w_i(Y)`,
    /// `w_i(F) = w_{i+1}(X)`. Exact over the integers.
    pub fn check_ghost_compatibility(&self, upto: usize) -> Result<bool> {
        let two_n = 2 * self.n;
        for i in 0..upto.min(self.n) {
            let wi = ghost_poly(self.p, i, i + 1, 0)?;
            // additive
            let lhs = wi.subst(&self.add[..=i], two_n)?;
            let rhs =
                ghost_poly(self.p, i, two_n, 0)?.add(&ghost_poly(self.p, i, two_n, self.n)?)?;
            if lhs != rhs {
                return Ok(false);
            }
            // multiplicative
            let lhs = wi.subst(&self.mul[..=i], two_n)?;
            let rhs =
                ghost_poly(self.p, i, two_n, 0)?.mul(&ghost_poly(self.p, i, two_n, self.n)?)?;
            if lhs != rhs {
                return Ok(false);
            }
            // frobenius
            let lhs = wi.subst(&self.frob[..=i], self.n + 1)?;
            let rhs = ghost_poly(self.p, i + 1, self.n + 1, 0)?;
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn first_addition_polynomials() {
        // p = 2: S_0 = X0 + Y0, S_1 = X1 + Y1 - X0·Y0
        let c = witt_structure_polys(2, 2).unwrap();
        let nv = 4;
        let x0 = ZPoly::var(nv, 0);
        let x1 = ZPoly::var(nv, 1);
        let y0 = ZPoly::var(nv, 2);
        let y1 = ZPoly::var(nv, 3);
        assert_eq!(c.add[0], x0.add(&y0).unwrap());
        let s1 = x1.add(&y1).unwrap().sub(&x0.mul(&y0).unwrap()).unwrap();
        assert_eq!(c.add[1], s1);
        // P_0 = X0·Y0 for any p
        assert_eq!(c.mul[0], x0.mul(&y0).unwrap());
    }

    #[test]
    fn p3_second_addition_polynomial() {
        // p = 3: S_1 = X1 + Y1 - (X0^2·Y0 + X0·Y0^2)
        let c = witt_structure_polys(3, 2).unwrap();
        let nv = 4;
        let x0 = ZPoly::var(nv, 0);
        let x1 = ZPoly::var(nv, 1);
        let y0 = ZPoly::var(nv, 2);
        let y1 = ZPoly::var(nv, 3);
        let mix = x0
            .pow(2)
            .unwrap()
            .mul(&y0)
            .unwrap()
            .add(&x0.mul(&y0.pow(2).unwrap()).unwrap())
            .unwrap();
        assert_eq!(c.add[1], x1.add(&y1).unwrap().sub(&mix).unwrap());
    }

    #[test]
    fn ghost_compatibility_symbolic() {
        for p in [2u64, 3] {
            let c = witt_structure_polys(p, 3).unwrap();
            assert!(c.check_ghost_compatibility(3).unwrap());
        }
    }

    #[test]
    #[ignore] // timing probe: run with --ignored --nocapture
    fn structure_polynomial_generation_cost() {
        for (p, n) in [(2u64, 4usize), (3, 3)] {
            let t = std::time::Instant::now();
            let c = witt_structure_polys(p, n).unwrap();
            let terms: usize = c.add.iter().map(|s| s.terms.len()).sum();
            std::println!("p={p}, n={n}: {terms} addition terms in {:?}", t.elapsed());
        }
    }

    #[test]
    fn cache_agrees_with_engine() {
        let cases: Vec<crate::ring::Ring> = vec![
            crate::ring::Ring::finite_field(2, 2).unwrap(),
            crate::ring::Ring::zmod(2, 2).unwrap(),
            crate::ring::Ring::prime_field(3).unwrap(),
        ];
        for ring in cases {
            let p = ring.prime();
            let c = witt_structure_polys(p, 3).unwrap();
            let mut rng = crate::rng::SplitMix64::new(0x5eed);
            for _ in 0..20 {
                let x = crate::rng::random_witt(&mut rng, &ring, 3);
                let y = crate::rng::random_witt(&mut rng, &ring, 3);
                let via_cache = c.eval_add(x.coords(), y.coords(), &ring);
                assert_eq!(x.add(&y).unwrap().coords(), &via_cache[..]);
                let via_cache = c.eval_mul(x.coords(), y.coords(), &ring);
                assert_eq!(x.mul(&y).unwrap().coords(), &via_cache[..]);
                let xf = crate::rng::random_witt(&mut rng, &ring, 4);
                let via_cache = c.eval_frobenius(xf.coords(), &ring);
                assert_eq!(xf.frobenius().unwrap().coords(), &via_cache[..]);
            }
            if p == 2 {
                let neg = c.neg.as_ref().unwrap();
                let mut rng = crate::rng::SplitMix64::new(9);
                for _ in 0..10 {
                    let x = crate::rng::random_witt(&mut rng, &ring, 3);
                    let via: Vec<_> = (0..3).map(|i| neg[i].eval(x.coords(), &ring)).collect();
                    assert_eq!(x.neg().unwrap().coords(), &via[..]);
                }
            }
        }
    }
}
