//! Quadratic extensions of `Q_p` and the finite rings `O_E / p_E^n`.

mod ext;
mod generators;
mod hnf;
mod predicted;
mod ring;

pub use ext::QuadExt;
pub use generators::{check_listed_generators, GeneratorCheck};
pub use hnf::Hnf2;
pub(crate) use predicted::inv_mod;
pub use predicted::{invariant_factors, predicted_structure, split_ab, sqrt_mod_prime_power, PredictedStructure, StructureRule};
pub use ring::{QuotientRing, RingElement, RingSummary, DEFAULT_BUDGET};
