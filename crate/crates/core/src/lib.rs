//! Workbench for iterated consistency statements.
//!
//! Ordinal notations below epsilon-zero, a sentence language with
//! consistency operators, a decision oracle for the provability-logic
//! fragment, sentence operators, the constructions built from them, and an
//! enumerator of true letterless sentences.

pub mod constructions;
pub mod enumerator;
pub mod gen;
pub mod kripke;
pub mod operators;
pub mod oracle;
pub mod ordinal;
pub mod sentence;
