//! Truncated p-typical Witt vectors `W_n(R)`.
//!
//! A value of length n is an element of `W_n(R)`; the length doubles as
//! the effective precision, and operations that consume levels return
//! shorter vectors. Over char-p rings the Frobenius also exists as a
//! length-preserving endomorphism (`frobenius_endo`), which realizes
//! exact arithmetic in `W(R)/p^n` for semiperfect R.

pub mod curly;
pub mod engine;
pub mod universal;

pub use curly::CurlyWitt;
pub use universal::{witt_structure_polys, WittStructureCache};

use crate::error::{Error, Result};
use crate::ring::{Ring, RingElement, RingMap};
use alloc::vec::Vec;
use engine::GhostOp;

/// ```
/// use wittcalc_core::ring::Ring;
/// use wittcalc_core::witt::WittVector;
///
/// // 1 + 1 = V(1) in W_3(F_2): the carry goes into the next coordinate
/// let f2 = Ring::prime_field(2)?;
/// let one = WittVector::one(&f2, 3);
/// let two = one.add(&one)?;
/// assert_eq!(two.coords()[1], f2.one());
/// // and W_3(F_2) is Z/8: six more ones reach zero
/// let mut acc = two;
/// for _ in 0..6 {
///     acc = acc.add(&one)?;
/// }
/// assert!(acc.is_zero());
/// # Ok::<(), wittcalc_core::Error>(())
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittVector {
    ring: Ring,
    coords: Vec<RingElement>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    Finite(usize),
    /// All coordinates vanish: valuation >= length.
    AtLeast(usize),
}

impl WittVector {
    pub fn new(ring: Ring, coords: Vec<RingElement>) -> Result<WittVector> {
        for c in &coords {
            if c.ring() != &ring {
                return Err(Error::RingMismatch);
            }
        }
        Ok(WittVector { ring, coords })
    }

    pub fn zero(ring: &Ring, n: usize) -> WittVector {
        WittVector {
            ring: ring.clone(),
            coords: (0..n).map(|_| ring.zero()).collect(),
        }
    }

    pub fn one(ring: &Ring, n: usize) -> WittVector {
        Self::teichmuller(&ring.one(), n)
    }

    /// The multiplicative lift `[x] = (x, 0, ..., 0)`.
    pub fn teichmuller(x: &RingElement, n: usize) -> WittVector {
        let ring = x.ring().clone();
        let mut coords = Vec::with_capacity(n);
        if n > 0 {
            coords.push(x.clone());
            for _ in 1..n {
                coords.push(ring.zero());
            }
        }
        WittVector { ring, coords }
    }

    pub fn from_int(ring: &Ring, k: i64, n: usize) -> Result<WittVector> {
        Ok(WittVector {
            ring: ring.clone(),
            coords: engine::from_int(ring, k, n)?,
        })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[RingElement] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &RingElement {
        &self.coords[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    fn check_compat(&self, other: &WittVector) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        if self.coords.len() != other.coords.len() {
            return Err(Error::LengthMismatch(self.coords.len(), other.coords.len()));
        }
        Ok(())
    }

    /// Binary op at the common length (truncating the longer input).
    fn binop_trunc(&self, other: &WittVector, op: GhostOp) -> Result<WittVector> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        let n = self.len().min(other.len());
        let out = engine::run(
            &self.ring,
            op,
            &self.coords[..n],
            Some(&other.coords[..n]),
            n,
        )?;
        Ok(WittVector {
            ring: self.ring.clone(),
            coords: out,
        })
    }

    pub fn add(&self, other: &WittVector) -> Result<WittVector> {
        self.check_compat(other)?;
        self.binop_trunc(other, GhostOp::Add)
    }

    pub fn sub(&self, other: &WittVector) -> Result<WittVector> {
        self.check_compat(other)?;
        self.binop_trunc(other, GhostOp::Sub)
    }

    pub fn mul(&self, other: &WittVector) -> Result<WittVector> {
        self.check_compat(other)?;
        self.binop_trunc(other, GhostOp::Mul)
    }

    /// Like `add` but accepts different lengths, working at the minimum.
    pub fn add_trunc(&self, other: &WittVector) -> Result<WittVector> {
        self.binop_trunc(other, GhostOp::Add)
    }

    pub fn sub_trunc(&self, other: &WittVector) -> Result<WittVector> {
        self.binop_trunc(other, GhostOp::Sub)
    }

    pub fn mul_trunc(&self, other: &WittVector) -> Result<WittVector> {
        self.binop_trunc(other, GhostOp::Mul)
    }

    pub fn neg(&self) -> Result<WittVector> {
        if self.ring.prime() == 2 {
            let out = engine::run(&self.ring, GhostOp::Neg, &self.coords, None, self.len())?;
            Ok(WittVector {
                ring: self.ring.clone(),
                coords: out,
            })
        } else {
            // [-1] is the Teichmüller lift of -1 for odd p
            let minus_one = Self::teichmuller(&self.ring.from_int(-1), self.len());
            self.mul(&minus_one)
        }
    }

    pub fn mul_int(&self, k: i64) -> Result<WittVector> {
        let out = engine::run(
            &self.ring,
            GhostOp::MulInt(k),
            &self.coords,
            None,
            self.len(),
        )?;
        Ok(WittVector {
            ring: self.ring.clone(),
            coords: out,
        })
    }

    /// Multiplication by p. Over char-p rings this is `V(F(x))`, i.e. the
    /// shift of the coordinate-wise p-th powers.
    pub fn mul_p(&self) -> Result<WittVector> {
        if self.ring.is_char_p() {
            let p = self.ring.prime();
            let n = self.len();
            let mut coords = Vec::with_capacity(n);
            if n > 0 {
                coords.push(self.ring.zero());
                for i in 0..n - 1 {
                    coords.push(self.coords[i].pow(p));
                }
            }
            Ok(WittVector {
                ring: self.ring.clone(),
                coords,
            })
        } else {
            self.mul_int(self.ring.prime() as i64)
        }
    }

    pub fn mul_p_pow(&self, times: usize) -> Result<WittVector> {
        let mut out = self.clone();
        for _ in 0..times {
            out = out.mul_p()?;
        }
        Ok(out)
    }

    /// The Frobenius `F: W_{n+1} -> W_n`; the output is one level shorter.
    pub fn frobenius(&self) -> Result<WittVector> {
        if self.is_empty() {
            return Err(Error::PrecisionExhausted);
        }
        if self.ring.is_char_p() {
            let p = self.ring.prime();
            let coords = self.coords[..self.len() - 1]
                .iter()
                .map(|c| c.pow(p))
                .collect();
            return Ok(WittVector {
                ring: self.ring.clone(),
                coords,
            });
        }
        self.frobenius_generic()
    }

    /// Frobenius through the ghost engine, for cross-checks against the
    /// coordinate-wise fast path.
    pub fn frobenius_generic(&self) -> Result<WittVector> {
        if self.is_empty() {
            return Err(Error::PrecisionExhausted);
        }
        let out = engine::run(
            &self.ring,
            GhostOp::Frobenius,
            &self.coords,
            None,
            self.len() - 1,
        )?;
        Ok(WittVector {
            ring: self.ring.clone(),
            coords: out,
        })
    }

    /// Length-preserving Frobenius, well defined over char-p rings only.
    pub fn frobenius_endo(&self) -> Result<WittVector> {
        if !self.ring.is_char_p() {
            return Err(Error::NotCharP);
        }
        let p = self.ring.prime();
        Ok(WittVector {
            ring: self.ring.clone(),
            coords: self.coords.iter().map(|c| c.pow(p)).collect(),
        })
    }

    /// `frobenius_endo` iterated `times` times.
    pub fn frobenius_endo_pow(&self, times: u32) -> Result<WittVector> {
        if !self.ring.is_char_p() {
            return Err(Error::NotCharP);
        }
        Ok(WittVector {
            ring: self.ring.clone(),
            coords: self.coords.iter().map(|c| c.frobenius_pow(times)).collect(),
        })
    }

    /// The Verschiebung: a shift, one level longer.
    pub fn verschiebung(&self) -> WittVector {
        let mut coords = Vec::with_capacity(self.len() + 1);
        coords.push(self.ring.zero());
        coords.extend(self.coords.iter().cloned());
        WittVector {
            ring: self.ring.clone(),
            coords,
        }
    }

    pub fn verschiebung_pow(&self, times: usize) -> WittVector {
        let mut out = self.clone();
        for _ in 0..times {
            out = out.verschiebung();
        }
        out
    }

    /// Inverse of the Verschiebung on the augmentation ideal: requires a
    /// vanishing zeroth coordinate.
    pub fn fdiv(&self) -> Result<WittVector> {
        if self.is_empty() {
            return Err(Error::PrecisionExhausted);
        }
        if !self.coords[0].is_zero() {
            return Err(Error::NotInIdeal);
        }
        Ok(WittVector {
            ring: self.ring.clone(),
            coords: self.coords[1..].to_vec(),
        })
    }

    pub fn truncate(&self, m: usize) -> Result<WittVector> {
        if m > self.len() {
            return Err(Error::BadLevel(m, self.len()));
        }
        Ok(WittVector {
            ring: self.ring.clone(),
            coords: self.coords[..m].to_vec(),
        })
    }

    /// Pads with zero coordinates: the canonical lift used when a
    /// truncated value needs representing at a higher working precision.
    pub fn pad_zero(&self, n: usize) -> WittVector {
        let mut coords = self.coords.clone();
        while coords.len() < n {
            coords.push(self.ring.zero());
        }
        WittVector {
            ring: self.ring.clone(),
            coords,
        }
    }

    /// Index of the first nonzero coordinate, over a finite field.
    pub fn vp_valuation(&self) -> Result<Valuation> {
        if !self.ring.is_perfect_field() {
            return Err(Error::NotPerfectField);
        }
        Ok(self.first_nonzero_index())
    }

    /// Same as `vp_valuation` but without the perfectness guard; over a
    /// general ring this is only an upper bound for the true valuation.
    pub fn first_nonzero_index(&self) -> Valuation {
        for (i, c) in self.coords.iter().enumerate() {
            if !c.is_zero() {
                return Valuation::Finite(i);
            }
        }
        Valuation::AtLeast(self.len())
    }

    /// Exact division by p over char-p rings with Frobenius roots; the
    /// result is one level shorter.
    pub fn divide_by_p(&self) -> Result<WittVector> {
        if !self.ring.is_char_p() {
            return Err(Error::NotCharP);
        }
        if self.is_empty() {
            return Err(Error::PrecisionExhausted);
        }
        if !self.coords[0].is_zero() {
            return Err(Error::NotDivisible);
        }
        let mut coords = Vec::with_capacity(self.len() - 1);
        for c in &self.coords[1..] {
            match self.ring.frobenius_root(c)? {
                Some(r) => coords.push(r),
                None => return Err(Error::NotDivisible),
            }
        }
        Ok(WittVector {
            ring: self.ring.clone(),
            coords,
        })
    }

    pub fn divide_by_p_pow(&self, times: usize) -> Result<WittVector> {
        let mut out = self.clone();
        for _ in 0..times {
            out = out.divide_by_p()?;
        }
        Ok(out)
    }

    /// Ghost components computed in R itself (no lifting); these are only
    /// a ring homomorphism image when R has enough p-torsion-freeness.
    pub fn ghost(&self) -> Vec<RingElement> {
        let p = self.ring.prime();
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            let mut w = self.ring.zero();
            let mut pj: i64 = 1;
            for j in 0..=i {
                let mut c = self.coords[j].clone();
                for _ in 0..(i - j) {
                    c = c.pow(p);
                }
                w = w.add(&c.mul_int(pj));
                pj = pj.saturating_mul(p as i64);
            }
            out.push(w);
        }
        out
    }

    pub fn map_ring(&self, map: &RingMap) -> Result<WittVector> {
        let coords = self
            .coords
            .iter()
            .map(|c| map.apply(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(WittVector {
            ring: map.target().clone(),
            coords,
        })
    }

    /// Inverse of a unit by Newton iteration from the Teichmüller lift of
    /// the inverse residue.
    pub fn invert(&self) -> Result<WittVector> {
        let n = self.len();
        if n == 0 {
            return Err(Error::PrecisionExhausted);
        }
        let inv0 = self.ring.inverse(&self.coords[0])?;
        let mut y = WittVector::teichmuller(&inv0, n);
        let two = WittVector::from_int(&self.ring, 2, n)?;
        let one = WittVector::one(&self.ring, n);
        for _ in 0..(2 * n + 2 * self.ring.char_exponent() as usize + 4) {
            let xy = self.mul(&y)?;
            if xy == one {
                return Ok(y);
            }
            y = y.mul(&two.sub(&xy)?)?;
        }
        Err(Error::UnitInversionFailure)
    }

    pub fn is_unit(&self) -> Result<bool> {
        if self.is_empty() {
            return Err(Error::PrecisionExhausted);
        }
        self.ring.is_unit(&self.coords[0])
    }
}

/// Deterministic enumeration of all of `W_n(R)` for finite R.
pub fn all_vectors(ring: &Ring, n: usize) -> Result<impl Iterator<Item = WittVector>> {
    let card = ring.cardinality()?;
    let total = card.checked_pow(n as u32).ok_or(Error::Overflow)?;
    if total > (1 << 26) {
        return Err(Error::SearchSpaceTooLarge(total.ilog2()));
    }
    let elements: Vec<RingElement> = ring.elements()?.collect();
    let ring = ring.clone();
    let mut idx = alloc::vec![0usize; n];
    let mut done = false;
    Ok(core::iter::from_fn(move || {
        if done {
            return None;
        }
        let v = WittVector {
            ring: ring.clone(),
            coords: idx.iter().map(|&i| elements[i].clone()).collect(),
        };
        let mut i = 0;
        loop {
            if i == n {
                done = true;
                break;
            }
            idx[i] += 1;
            if idx[i] < elements.len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        Some(v)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{Relation, RingDescriptor};
    use alloc::boxed::Box;
    use alloc::vec;

    fn f2() -> Ring {
        Ring::prime_field(2).unwrap()
    }

    fn f4() -> Ring {
        Ring::finite_field(2, 2).unwrap()
    }

    #[test]
    fn one_plus_one_is_v_of_one() {
        // [1] + [1] = (0,1,0) in W_3(F_2)
        let r = f2();
        let one = WittVector::one(&r, 3);
        let two = one.add(&one).unwrap();
        assert_eq!(two.coords(), &[r.zero(), r.one(), r.zero()]);
    }

    #[test]
    fn w_n_of_f_p_is_z_mod_p_n() {
        for (p, n) in [(2u64, 3usize), (3, 3), (2, 2), (3, 2), (2, 1), (3, 1)] {
            let r = Ring::prime_field(p).unwrap();
            let pn = (p as i64).pow(n as u32);
            let mut seen = alloc::collections::BTreeSet::new();
            for k in 0..pn {
                let w = WittVector::from_int(&r, k, n).unwrap();
                let key = alloc::format!("{:?}", w.coords());
                assert!(seen.insert(key), "k -> k*1 is not injective");
                // additivity and multiplicativity on a diagonal sample
                let l = (k * 7 + 3) % pn;
                let wl = WittVector::from_int(&r, l, n).unwrap();
                assert_eq!(
                    w.add(&wl).unwrap(),
                    WittVector::from_int(&r, (k + l) % pn, n).unwrap()
                );
                assert_eq!(
                    w.mul(&wl).unwrap(),
                    WittVector::from_int(&r, (k * l) % pn, n).unwrap()
                );
            }
            assert_eq!(seen.len() as i64, pn);
        }
    }

    #[test]
    fn frobenius_teichmuller_rule() {
        let r = f4();
        let g = r.var("g").unwrap();
        let t = WittVector::teichmuller(&g, 4);
        let ft = t.frobenius().unwrap();
        assert_eq!(ft, WittVector::teichmuller(&g.pow(2), 3));
        // F(V(x)) = p*x
        let x = WittVector::teichmuller(&g, 3);
        assert_eq!(x.verschiebung().frobenius().unwrap(), x.mul_p().unwrap());
    }

    #[test]
    fn frobenius_fast_path_matches_engine() {
        for r in [f2(), f4()] {
            for v in all_vectors(&r, 3).unwrap() {
                assert_eq!(v.frobenius().unwrap(), v.frobenius_generic().unwrap());
            }
        }
    }

    #[test]
    fn frobenius_example_over_f2() {
        // F((0,1,0)) = (0,1) since FV[1] = p[1]
        let r = f2();
        let v = WittVector::new(r.clone(), vec![r.zero(), r.one(), r.zero()]).unwrap();
        let fv = v.frobenius().unwrap();
        assert_eq!(fv.coords(), &[r.zero(), r.one()]);
    }

    #[test]
    fn verschiebung_twisted_linearity() {
        // V(x)·y = V(x·F(y)) and V(x)·V(y) = p·V(x·y) in W_3(F_4)
        let r = f4();
        let g = r.var("g").unwrap();
        let x = WittVector::new(r.clone(), vec![g.clone(), r.one()]).unwrap();
        let y = WittVector::new(r.clone(), vec![g.pow(2), g.clone(), r.one()]).unwrap();
        let vx = x.verschiebung();
        let lhs = vx.mul(&y).unwrap();
        let rhs = x.mul(&y.frobenius().unwrap()).unwrap().verschiebung();
        assert_eq!(lhs, rhs);
        let vy = y.truncate(2).unwrap().verschiebung();
        let lhs2 = vx.mul(&vy).unwrap();
        let rhs2 = x
            .mul(&y.truncate(2).unwrap())
            .unwrap()
            .verschiebung()
            .mul_p()
            .unwrap();
        assert_eq!(lhs2, rhs2);
    }

    #[test]
    fn neg_of_teichmuller_for_odd_p() {
        let r = Ring::prime_field(3).unwrap();
        let one = WittVector::one(&r, 2);
        let n = one.neg().unwrap();
        assert_eq!(n, WittVector::teichmuller(&r.from_int(-1), 2));
        assert!(n.add(&one).unwrap().is_zero());
    }

    #[test]
    fn fdiv_and_divide_by_p() {
        let r = f4();
        let g = r.var("g").unwrap();
        let x = WittVector::new(r.clone(), vec![g.clone(), g.pow(2), r.one()]).unwrap();
        // fdiv(V(x)) = x
        assert_eq!(x.verschiebung().fdiv().unwrap(), x);
        // divide_by_p(p·x) = x truncated one level
        let px = x.mul_p().unwrap();
        assert_eq!(px.divide_by_p().unwrap(), x.truncate(2).unwrap());
        // a unit is not divisible
        assert!(matches!(
            WittVector::one(&r, 3).divide_by_p(),
            Err(Error::NotDivisible)
        ));
        // (0, t, 0) over F_2[t]/(t^2): t has no square root
        let rt = Ring::new(RingDescriptor::PolynomialQuotient {
            base: Box::new(RingDescriptor::PrimeField { p: 2 }),
            vars: vec!["t".into()],
            rels: vec![Relation::MonomialZero(vec![("t".into(), 2)])],
        })
        .unwrap();
        let t = rt.var("t").unwrap();
        let v = WittVector::new(rt.clone(), vec![rt.zero(), t, rt.zero()]).unwrap();
        assert!(matches!(v.divide_by_p(), Err(Error::NotDivisible)));
    }

    #[test]
    fn valuation_over_finite_fields() {
        let r = f4();
        let g = r.var("g").unwrap();
        let v = WittVector::new(r.clone(), vec![r.zero(), r.zero(), g]).unwrap();
        assert_eq!(v.vp_valuation().unwrap(), Valuation::Finite(2));
        assert_eq!(
            WittVector::zero(&r, 3).vp_valuation().unwrap(),
            Valuation::AtLeast(3)
        );
        let p1 = WittVector::one(&Ring::prime_field(2).unwrap(), 3)
            .mul_p()
            .unwrap();
        assert_eq!(p1.vp_valuation().unwrap(), Valuation::Finite(1));
    }

    #[test]
    fn teichmuller_is_multiplicative() {
        let r = f4();
        let g = r.var("g").unwrap();
        let a = WittVector::teichmuller(&g, 3);
        let b = WittVector::teichmuller(&g.pow(2), 3);
        assert_eq!(a.mul(&b).unwrap(), WittVector::teichmuller(&g.pow(3), 3));
        assert!(WittVector::teichmuller(&r.zero(), 3).is_zero());
    }

    #[test]
    fn units_invert() {
        let r = f4();
        let g = r.var("g").unwrap();
        let u = WittVector::new(r.clone(), vec![g.clone(), r.one(), g.pow(2)]).unwrap();
        let inv = u.invert().unwrap();
        assert_eq!(u.mul(&inv).unwrap(), WittVector::one(&r, 3));
        assert!(WittVector::zero(&r, 3).invert().is_err());
        // over Z/4 as well
        let z4 = Ring::zmod(2, 2).unwrap();
        let u = WittVector::new(z4.clone(), vec![z4.from_int(3), z4.from_int(2)]).unwrap();
        let inv = u.invert().unwrap();
        assert_eq!(u.mul(&inv).unwrap(), WittVector::one(&z4, 2));
    }

    #[test]
    fn ghost_additivity_over_padded_ring() {
        // over Z/p^(a+n) the ghost map is additive on sums computed in W_n
        let r = Ring::zmod(2, 5).unwrap();
        let x = WittVector::from_int(&r, 13, 3).unwrap();
        let y = WittVector::from_int(&r, 7, 3).unwrap();
        let s = x.add(&y).unwrap();
        let gx = x.ghost();
        let gy = y.ghost();
        let gs = s.ghost();
        for i in 0..3 {
            assert_eq!(gs[i], gx[i].add(&gy[i]));
        }
    }
}
