//! Seeded deterministic randomness for the certification suites.
//! SplitMix64: same seed, same sequence, on every platform.

use crate::ring::{Ring, RingElement};
use crate::witt::WittVector;
use alloc::vec::Vec;

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `0..bound` (bound > 0).
    pub fn below(&mut self, bound: u64) -> u64 {
        // rejection sampling to stay unbiased
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % bound;
            }
        }
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len() as u64) as usize]
    }
}

/// Random canonical element: uniform coefficients on the monomial basis.
pub fn random_element(rng: &mut SplitMix64, ring: &Ring) -> RingElement {
    let basis = ring.basis().expect("finite ring required for sampling");
    let m = ring.modulus();
    let terms: Vec<(crate::ring::NamedMonomial, i64)> = basis
        .iter()
        .map(|b| {
            let named: crate::ring::NamedMonomial =
                b.0.iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (ring.vars()[i].clone(), e))
                    .collect();
            (named, rng.below(m) as i64)
        })
        .collect();
    ring.element_from_terms(&terms)
        .expect("basis monomials are valid")
}

pub fn random_witt(rng: &mut SplitMix64, ring: &Ring, n: usize) -> WittVector {
    let coords = (0..n).map(|_| random_element(rng, ring)).collect();
    WittVector::new(ring.clone(), coords).expect("same ring by construction")
}

/// Random unit (nonzero residue), by resampling.
pub fn random_unit(rng: &mut SplitMix64, ring: &Ring) -> RingElement {
    loop {
        let x = random_element(rng, ring);
        if ring.is_unit(&x).unwrap_or(false) {
            return x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_fixed_seed() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn sampling_covers_the_ring() {
        let r = Ring::finite_field(2, 2).unwrap();
        let mut rng = SplitMix64::new(7);
        let mut seen = alloc::collections::BTreeSet::new();
        for _ in 0..200 {
            seen.insert(alloc::format!("{:?}", random_element(&mut rng, &r)));
        }
        assert_eq!(seen.len(), 4);
    }
}
