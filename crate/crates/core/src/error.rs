//! Crate-wide error type.

use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    // ring construction and arithmetic
    #[error("modulus base {0} is not prime")]
    NonPrimeModulus(u64),
    #[error("inconsistent relations: {0}")]
    InconsistentRelations(String),
    #[error("unsupported ring for this operation: {0}")]
    UnsupportedRing(String),
    #[error("ring does not have characteristic p")]
    NotCharP,
    #[error("base ring is not a perfect field")]
    NotPerfectField,
    #[error("element is not a unit")]
    NotAUnit,
    #[error("unit inversion did not converge")]
    UnitInversionFailure,
    #[error("unsupported ring map: {0}")]
    UnsupportedMap(String),
    #[error("overflow in modulus arithmetic")]
    Overflow,

    // witt vectors
    #[error("witt vector length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("witt vectors over different rings")]
    RingMismatch,
    #[error("inexact division by p^{0} (implementation bug or precision loss)")]
    InexactDivision(u32),
    #[error("element is not in the augmentation ideal")]
    NotInIdeal,
    #[error("witt vector is not divisible by p")]
    NotDivisible,

    // frames and displays
    #[error("thickening kernel does not square to zero")]
    NotSquareZero,
    #[error("element does not belong to the frame domain: {0}")]
    DomainMismatch(String),
    #[error("structure matrix is not invertible")]
    NotInvertible,
    #[error("matrix shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("bad truncation level {0} (current {1})")]
    BadLevel(usize, usize),
    #[error("effective precision exhausted")]
    PrecisionExhausted,

    // isogeny calculus
    #[error("p-adic valuation of determinant differs across residue points")]
    NotDivisibleConsistently,
    #[error("search space of size ~2^{0} exceeds the exhaustion budget")]
    SearchSpaceTooLarge(u32),
    #[error("obstruction nonzero: leading Witt component {0} of the solve does not vanish")]
    ObstructionNonzero(usize),
    #[error("zeroth Witt coordinate of block {0} does not vanish")]
    ZerothCoordinateObstruction(&'static str),
    #[error("preparation failed: {0}; enlarge the ring via a perfection stage")]
    PrepFailure(String),

    // deformation and extension
    #[error("defect is not divisible by p^{0}")]
    DefectNotDivisible(usize),
    #[error("ring is not semiperfect enough for the requested division")]
    NotSemiperfect,
    #[error(
        "morphism lift system has no solution (falsifies the relative divided-Frobenius rule)"
    )]
    NoSolution,
    #[error(
        "morphism lift system has {0} solutions (falsifies the relative divided-Frobenius rule)"
    )]
    NonUniqueSolution(usize),
}

pub type Result<T> = core::result::Result<T, Error>;
