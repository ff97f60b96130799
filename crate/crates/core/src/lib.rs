//! Finite groupoids as a model for univalence and completeness of Segal
//! objects: groupoid combinatorics, isofibrations and their classification,
//! truncated simplicial machinery, Segal-object checks, a small input
//! language, and a randomized verification harness.

pub mod dsl;
pub mod error;
pub mod fib;
pub mod groupoid;
pub mod harness;
pub mod homs;
pub mod limits;
pub mod map;
pub mod paths;
pub mod segal;
pub mod simpset;

pub use error::{Budget, Error, Result};
