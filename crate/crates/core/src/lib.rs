//! Unitary unit groups of modular group algebras F_(2^k) G.
//!
//! The crate builds the group algebra over a binary field, realizes it as
//! G-matrices through the regular representation, enumerates the normalized
//! and unitary unit groups, and analyses their abstract structure. The
//! [`verify`] module runs the full battery of structural checks for
//! F_(2^k) Q_8.

pub mod algebra;
pub mod gf2k;
pub mod gmatrix;
pub mod groups;
pub mod structure;
pub mod unitary;
pub mod verify;

pub use algebra::{AlgebraElement, AlgebraError, GroupAlgebra};
pub use gf2k::{FieldElement, FieldError, FieldSpec};
pub use gmatrix::{GroupMatrix, Matrix, MatrixError, Q8Blocks};
pub use groups::{GroupElement, GroupError, GroupSpec};
pub use structure::{Decomposition, DecompositionOutcome, StructureError, StructureReport};
pub use unitary::{CenterParams, EnumerationOptions, UnitGroup, UnitaryError};
