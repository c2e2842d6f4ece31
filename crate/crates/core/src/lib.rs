//! Exact characters of classical Lie algebras, parabolic levels, branching
//! along irreducible embeddings `A_{l+1} -> Sp/SO`, and multiplicity-free
//! verification.

pub mod branch;
pub mod caps;
pub mod charcalc;
pub mod embed;
pub mod error;
pub mod mfcheck;
pub mod rootsys;
pub mod weight;

pub use caps::Caps;
pub use charcalc::{DominantCharacter, IrrepSum};
pub use error::{Error, Result};
pub use rootsys::{Family, RootSystem};
pub use weight::{EpsCoords, Weight};
