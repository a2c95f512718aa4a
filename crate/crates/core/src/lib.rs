//! Exact graded-algebra engine deciding, by certificate, whether a graded
//! algebra homomorphism `H*(N) -> Λ*R^n` sending a chosen class `ω` to a
//! nonzero element can exist.
//!
//! * [`exterior`]: sparse exterior algebra over the rationals.
//! * [`ring`]: cohomology rings, constructors, Künneth ideal.
//! * [`obstruct`]: nonexistence certificates and their verifiers.
//! * [`homsearch`]: explicit homomorphism witnesses.

pub mod error;
pub mod exterior;
pub mod homsearch;
pub mod linalg;
pub mod obstruct;
pub mod rational;
pub mod ring;

pub use error::{Error, Result};
