//! The ring `W_{n+1}(R)/(0,..,0,R[p])` that scalars of the truncated
//! Witt frame live in. Representatives have length n+1 with the last
//! coordinate reduced to a canonical coset representative mod R[p];
//! adding `(0,..,0,t)` changes exactly the last coordinate, so the
//! reduction is canonical.

use super::WittVector;
use crate::error::{Error, Result};
use crate::ring::Ring;
use alloc::vec::Vec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurlyWitt {
    rep: WittVector,
}

impl CurlyWitt {
    /// Wraps a representative of length n+1.
    pub fn new(rep: WittVector) -> Result<CurlyWitt> {
        if rep.is_empty() {
            return Err(Error::PrecisionExhausted);
        }
        let ring = rep.ring().clone();
        let mut coords: Vec<_> = rep.coords().to_vec();
        let last = coords.len() - 1;
        coords[last] = ring.p_torsion_reduce(&coords[last])?;
        Ok(CurlyWitt {
            rep: WittVector::new(ring, coords)?,
        })
    }

    pub fn zero(ring: &Ring, level: usize) -> Result<CurlyWitt> {
        CurlyWitt::new(WittVector::zero(ring, level + 1))
    }

    pub fn one(ring: &Ring, level: usize) -> Result<CurlyWitt> {
        CurlyWitt::new(WittVector::one(ring, level + 1))
    }

    pub fn from_int(ring: &Ring, k: i64, level: usize) -> Result<CurlyWitt> {
        CurlyWitt::new(WittVector::from_int(ring, k, level + 1)?)
    }

    /// The stored representative (length level+1, last coordinate
    /// canonical).
    pub fn rep(&self) -> &WittVector {
        &self.rep
    }

    pub fn ring(&self) -> &Ring {
        self.rep.ring()
    }

    /// The truncation level n (representatives have length n+1).
    pub fn level(&self) -> usize {
        self.rep.len() - 1
    }

    pub fn add(&self, o: &CurlyWitt) -> Result<CurlyWitt> {
        CurlyWitt::new(self.rep.add(&o.rep)?)
    }

    pub fn sub(&self, o: &CurlyWitt) -> Result<CurlyWitt> {
        CurlyWitt::new(self.rep.sub(&o.rep)?)
    }

    pub fn mul(&self, o: &CurlyWitt) -> Result<CurlyWitt> {
        CurlyWitt::new(self.rep.mul(&o.rep)?)
    }

    pub fn neg(&self) -> Result<CurlyWitt> {
        CurlyWitt::new(self.rep.neg()?)
    }

    pub fn mul_int(&self, k: i64) -> Result<CurlyWitt> {
        CurlyWitt::new(self.rep.mul_int(k)?)
    }

    pub fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }

    /// The Frobenius to `W_n(R)`; it kills the normalized subgroup, so it
    /// is well defined on classes.
    pub fn frobenius(&self) -> Result<WittVector> {
        self.rep.frobenius()
    }

    /// The projection to `W_n(R)` (drop the last coordinate).
    pub fn project(&self) -> WittVector {
        self.rep.truncate(self.rep.len() - 1).expect("level >= 0")
    }

    pub fn truncate(&self, level: usize) -> Result<CurlyWitt> {
        CurlyWitt::new(self.rep.truncate(level + 1)?)
    }

    pub fn is_unit(&self) -> Result<bool> {
        self.rep.is_unit()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witt::all_vectors;

    #[test]
    fn curly_over_char_p_matches_truncation() {
        // R[p] = R in char p, so classes biject with W_n(R)
        let r = Ring::prime_field(2).unwrap();
        let mut reps = alloc::collections::BTreeSet::new();
        for v in all_vectors(&r, 3).unwrap() {
            let c = CurlyWitt::new(v).unwrap();
            assert!(c.rep().coord(2).is_zero());
            reps.insert(alloc::format!("{:?}", c.rep().coords()));
        }
        assert_eq!(reps.len(), 4); // |W_2(F_2)|
    }

    #[test]
    fn torsion_classes_over_z4() {
        // (0,0,2) over Z/4: 2 is p-torsion, so the class is zero
        let r = Ring::zmod(2, 2).unwrap();
        let v = WittVector::new(r.clone(), alloc::vec![r.zero(), r.zero(), r.from_int(2)]).unwrap();
        assert!(CurlyWitt::new(v).unwrap().is_zero());
        // but (0,0,1) is not zero
        let v = WittVector::new(r.clone(), alloc::vec![r.zero(), r.zero(), r.one()]).unwrap();
        assert!(!CurlyWitt::new(v).unwrap().is_zero());
    }

    #[test]
    fn operations_well_defined_on_classes() {
        // adding (0,..,0,t) with t in R[p] does not change the class,
        // nor products against it; exhaustive over Z/4 at level 1
        let r = Ring::zmod(2, 2).unwrap();
        let torsion = WittVector::new(r.clone(), alloc::vec![r.zero(), r.from_int(2)]).unwrap();
        for v in all_vectors(&r, 2).unwrap() {
            let c1 = CurlyWitt::new(v.clone()).unwrap();
            let c2 = CurlyWitt::new(v.add(&torsion).unwrap()).unwrap();
            assert_eq!(c1, c2);
            assert_eq!(c1.frobenius().unwrap(), c2.frobenius().unwrap());
            for w in all_vectors(&r, 2).unwrap() {
                let d = CurlyWitt::new(w).unwrap();
                assert_eq!(c1.mul(&d).unwrap(), c2.mul(&d).unwrap());
            }
        }
    }
}
