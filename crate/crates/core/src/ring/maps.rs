//! Ring homomorphisms between supported rings, given by generator images.

use super::{Ring, RingElement};
use crate::error::{Error, Result};
use crate::ring::poly::Poly;
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

#[derive(Clone, Debug)]
pub struct RingMap {
    src: Ring,
    dst: Ring,
    /// Image of each source variable, in order.
    images: Vec<RingElement>,
}

impl RingMap {
    /// Builds and validates a homomorphism. The coefficient map is the
    /// canonical reduction `Z/p^a -> Z/p^a'`, so `a' <= a` is required,
    /// and every defining relation of the source must map to zero.
    pub fn new(src: Ring, dst: Ring, images: Vec<RingElement>) -> Result<RingMap> {
        if src.prime() != dst.prime() {
            return Err(Error::UnsupportedMap("different primes".to_string()));
        }
        if dst.char_exponent() > src.char_exponent() {
            return Err(Error::UnsupportedMap(
                "target exponent exceeds source exponent".to_string(),
            ));
        }
        if images.len() != src.vars().len() {
            return Err(Error::UnsupportedMap(format!(
                "expected {} generator images, got {}",
                src.vars().len(),
                images.len()
            )));
        }
        for im in &images {
            if im.ring() != &dst {
                return Err(Error::UnsupportedMap(
                    "generator image in the wrong ring".to_string(),
                ));
            }
        }
        let map = RingMap { src, dst, images };
        map.validate()?;
        Ok(map)
    }

    fn validate(&self) -> Result<()> {
        for rule in self.src.rules() {
            let lhs = self.apply_monomial(&rule.lhs);
            let rhs = self.apply_poly(&rule.rhs);
            if lhs != rhs {
                return Err(Error::UnsupportedMap(
                    "generator images do not satisfy the source relations".to_string(),
                ));
            }
        }
        Ok(())
    }

    pub fn identity(ring: &Ring) -> RingMap {
        let images = ring.vars().iter().map(|v| ring.var(v).unwrap()).collect();
        RingMap {
            src: ring.clone(),
            dst: ring.clone(),
            images,
        }
    }

    pub fn source(&self) -> &Ring {
        &self.src
    }

    pub fn target(&self) -> &Ring {
        &self.dst
    }

    fn apply_monomial(&self, m: &super::Monomial) -> RingElement {
        let mut acc = self.dst.one();
        for (i, &e) in m.0.iter().enumerate() {
            if e > 0 {
                acc = acc.mul(&self.images[i].pow(e as u64));
            }
        }
        acc
    }

    fn apply_poly(&self, p: &Poly) -> RingElement {
        let mut acc = self.dst.zero();
        for (m, &c) in &p.terms {
            let term = self
                .apply_monomial(m)
                .mul_int((c % self.dst.modulus()) as i64);
            acc = acc.add(&term);
        }
        acc
    }

    pub fn apply(&self, x: &RingElement) -> Result<RingElement> {
        if x.ring() != &self.src {
            return Err(Error::UnsupportedMap(
                "element does not belong to the source ring".to_string(),
            ));
        }
        Ok(self.apply_poly(x.poly()))
    }

    /// `self` after `inner`.
    pub fn compose(&self, inner: &RingMap) -> Result<RingMap> {
        if inner.dst != self.src {
            return Err(Error::UnsupportedMap("maps do not compose".to_string()));
        }
        let images = inner
            .images
            .iter()
            .map(|im| self.apply(im))
            .collect::<Result<Vec<_>>>()?;
        RingMap::new(inner.src.clone(), self.dst.clone(), images)
    }

    /// The canonical embedding of `F_{p^k}` into `F_{p^(k*m)}`: the field
    /// generator goes to the first root of its minimal polynomial in
    /// enumeration order.
    pub fn field_embedding(small: &Ring, big: &Ring) -> Result<RingMap> {
        if !small.is_perfect_field() || !big.is_perfect_field() {
            return Err(Error::UnsupportedMap("not finite fields".to_string()));
        }
        if small.prime() != big.prime() || !big.field_degree().is_multiple_of(small.field_degree())
        {
            return Err(Error::UnsupportedMap(
                "no embedding between these fields".to_string(),
            ));
        }
        if small.vars().is_empty() {
            return RingMap::new(small.clone(), big.clone(), Vec::new());
        }
        let rule = &small.rules()[0];
        for cand in big.elements()? {
            // candidate must satisfy g^k = rhs(g)
            let lhs = cand.pow(rule.lhs.0[0] as u64);
            let mut rhs = big.zero();
            for (m, &c) in &rule.rhs.terms {
                rhs = rhs.add(&cand.pow(m.0[0] as u64).mul_int(c as i64));
            }
            if lhs == rhs && !cand.is_zero() {
                return RingMap::new(small.clone(), big.clone(), alloc::vec![cand]);
            }
        }
        Err(Error::UnsupportedMap(
            "no root of the minimal polynomial".to_string(),
        ))
    }

    /// Partial inverse for maps whose generator images are single
    /// monomials in distinct variables (identities, sections, perfection
    /// inclusions): `None` when the element is not in the image.
    pub fn preimage(&self, y: &RingElement) -> Result<Option<RingElement>> {
        if y.ring() != &self.dst {
            return Err(Error::UnsupportedMap(
                "element does not belong to the target ring".to_string(),
            ));
        }
        // dst var index -> (src var index, exponent scale)
        let nv_dst = self.dst.vars().len();
        let mut back: Vec<Option<(usize, crate::ring::poly::Exp)>> = alloc::vec![None; nv_dst];
        for (i, im) in self.images.iter().enumerate() {
            let terms: Vec<_> = im.poly().terms.iter().collect();
            if terms.len() != 1 || *terms[0].1 != 1 {
                return Err(Error::UnsupportedMap(
                    "preimages need monomial generator images".to_string(),
                ));
            }
            let mono = terms[0].0;
            let nonzero: Vec<usize> = mono
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(j, _)| j)
                .collect();
            if nonzero.len() != 1 {
                return Err(Error::UnsupportedMap(
                    "preimages need single-variable generator images".to_string(),
                ));
            }
            let j = nonzero[0];
            if back[j].is_some() {
                return Err(Error::UnsupportedMap(
                    "generator images share a variable".to_string(),
                ));
            }
            back[j] = Some((i, mono.0[j]));
        }
        if self.dst.modulus() > self.src.modulus() {
            return Err(Error::UnsupportedMap(
                "coefficients do not lift".to_string(),
            ));
        }
        let nv_src = self.src.vars().len();
        let mut pre = crate::ring::poly::Poly::zero();
        for (m, &c) in &y.poly().terms {
            let mut src_m = crate::ring::poly::Monomial::one(nv_src);
            for (j, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match back[j] {
                    None => return Ok(None),
                    Some((i, s)) => {
                        if e % s != 0 {
                            return Ok(None);
                        }
                        src_m.0[i] += e / s;
                    }
                }
            }
            pre.add_term(src_m, c, self.src.modulus());
        }
        let cand = self.src.element_from_poly(pre);
        if self.apply(&cand)? == *y {
            Ok(Some(cand))
        } else {
            Ok(None)
        }
    }

    /// Checks injectivity by mapping the monomial basis (monomial
    /// bookkeeping; adequate for the perfection inclusions it documents).
    pub fn injective_on_basis(&self) -> Result<bool> {
        let mut seen = alloc::collections::BTreeSet::new();
        for b in self.src.basis()? {
            let im = self.apply_monomial(b);
            if im.is_zero() {
                return Ok(false);
            }
            if !seen.insert(alloc::format!("{:?}", im.poly())) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embeds_f2_into_f4() {
        let f2 = Ring::finite_field(2, 1).unwrap();
        let f4 = Ring::finite_field(2, 2).unwrap();
        let m = RingMap::field_embedding(&f2, &f4).unwrap();
        assert_eq!(m.apply(&f2.one()).unwrap(), f4.one());
    }

    #[test]
    fn embeds_f4_into_f16() {
        let f4 = Ring::finite_field(2, 2).unwrap();
        let f16 = Ring::finite_field(2, 4).unwrap();
        let m = RingMap::field_embedding(&f4, &f16).unwrap();
        let g = f4.var("g").unwrap();
        let img = m.apply(&g).unwrap();
        // image satisfies x^2 + x + 1 = 0
        assert_eq!(img.mul(&img).add(&img).add(&f16.one()), f16.zero());
        assert!(m.injective_on_basis().unwrap());
    }

    #[test]
    fn mod_p_reduction() {
        let z4 = Ring::zmod(2, 2).unwrap();
        let (f2, map) = z4.mod_p().unwrap();
        assert_eq!(f2.char_exponent(), 1);
        assert!(map.apply(&z4.from_int(2)).unwrap().is_zero());
        assert_eq!(map.apply(&z4.from_int(3)).unwrap(), f2.one());
    }
}
