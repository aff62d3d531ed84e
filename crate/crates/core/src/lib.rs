//! Compile QAOA circuits for QUBO problems into measurement-based patterns
//! and check every step exactly.
//!
//! The crate is layered bottom-up: [`zx`] holds the diagram rewriting
//! engine and its tensor semantics, [`problem`] the cost functions,
//! [`gatesim`] the statevector reference, [`pattern`] the measurement
//! runtime, [`compiler`] the translation itself and [`mis`] the
//! constraint-preserving ansatz for independent sets.

pub mod compiler;
pub mod error;
pub mod gatesim;
pub mod linalg;
pub mod mis;
pub mod pattern;
pub mod problem;
pub mod zx;

pub use error::{Error, Result};
