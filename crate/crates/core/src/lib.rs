//! Quantum weight enumerators for stabilizer codes and for tensor networks
//! of stabilizer legos.
//!
//! The scalar path ([`scalar`], [`macwilliams`]) enumerates a group directly
//! and transforms between the `A` and `B` enumerators. The tensor path
//! ([`tensor`], [`network`]) builds enumerators lego by lego and contracts
//! them, which scales to codes far beyond direct enumeration.

pub mod code;
pub mod cyclotomic;
pub mod dense;
pub mod error;
pub mod macwilliams;
pub mod network;
pub mod pauli;
pub mod poly;
pub mod scalar;
pub mod tensor;

pub use code::{CodeFile, StabilizerGroup, DEFAULT_GROUP_CAP};
pub use cyclotomic::{Cyclo, CycloField};
pub use error::{Error, Result};
pub use macwilliams::{macwilliams, MWTransform};
pub use network::{CodeReport, ContractionPlan, NetworkFile, Strategy, TensorNetwork, DEFAULT_MEMORY_CAP};
pub use pauli::{PauliString, PhasedPauli, SiteClifford};
pub use poly::{CycloPoly, EnumPoly, SchemeKind, WeightScheme};
pub use scalar::{Convention, Distance, EnumeratorPair};
pub use tensor::{LegoBlock, TensorEnumerator};
