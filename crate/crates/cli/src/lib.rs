//! Command-line surface for the wittcalc exact-arithmetic library: the
//! text grammars for rings, elements, Witt vectors and frames, the JSON
//! schemas for displays and morphisms, fixture management, and the verb
//! dispatch used by the `wittcalc` binary.

pub mod commands;
pub mod fixtures;
pub mod grammar;
pub mod json;

pub use commands::{run, Outcome};
