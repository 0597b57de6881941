//! Exact arithmetic for p-typical Witt vectors, truncated Witt frames,
//! displays and their isogeny calculus over p-nilpotent rings.
//!
//! Everything is computed with exact modular arithmetic; there is no
//! floating point anywhere. The crate is `no_std` (alloc required); all
//! IO, text grammars and JSON live in the companion `wittcalc-cli` crate.
//!
//! Layering, bottom to top:
//!
//! * [`ring`] — finitely presented commutative rings annihilated by a
//!   prime power `p^a`, with canonical normal forms, Frobenius roots and
//!   square-zero extensions.
//! * [`witt`] — truncated p-typical Witt vectors `W_n(R)` with the
//!   Frobenius, Verschiebung, Teichmüller lifts, and division by p.
//! * [`frame`] — the frame abstraction `(S-curly, I, S, sigma, sigma_div)`
//!   and its three concrete instances.
//! * [`display`] — windows over a frame presented by invertible matrices,
//!   with the twisted structure equation for morphisms.
//! * [`isogeny`] — heights, adjugates, the homogeneous and inhomogeneous
//!   matrix equation solvers, and division of morphisms by p.
//! * [`deform`] — square-zero deformation theory: filtration lifts,
//!   unique morphism lifts, tangent spaces and the adjugate extension
//!   algorithm for truncated isogenies.
//! * [`moduli`] — enumeration of quasi-isogeny moduli points over finite
//!   fields via stable lattices, with an independent brute-force oracle.
//! * [`selftest`] — seeded certification suites for the lemma-level
//!   properties; shared by the acceptance tests and the CLI.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod deform;
pub mod display;
pub mod error;
pub mod frame;
pub mod isogeny;
pub mod mat;
pub mod moduli;
pub mod ring;
pub mod rng;
pub mod selftest;
pub mod witt;

pub use error::{Error, Result};
