//! Local Galois-orbit counts for newforms: quotient rings of local fields,
//! their characters, inertial types, sign multiplicities and the resulting
//! lower bound on non-CM Galois orbits.

pub mod arith;
pub mod audit;
pub mod bound;
pub mod charenum;
pub mod discrepancy;
pub mod error;
pub mod group;
pub mod lmfdb;
pub mod quadring;
pub mod signcensus;
pub mod typecensus;

pub use error::{Error, Result};
