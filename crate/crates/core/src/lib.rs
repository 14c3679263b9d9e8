//! Enveloping algebras of differential graded Lie algebras over `Z_(p)`.
//!
//! The crate builds `UL` degreewise up to a cutoff, computes homology with
//! torsion, and checks the structure of the free part `FH(UL)`, the mod-`p`
//! Bockstein spectral sequence, and the divided powers on the dual `(UL)^♯`.

#![allow(clippy::needless_range_loop)]

pub mod bockstein;
pub mod dgla;
pub mod families;
pub mod gamma;
pub mod hopf;
pub mod linalg;
pub mod manifest;
pub mod pbw;
pub mod scalar;
pub mod workbench;

pub use dgla::{lie_homology, validate, DGLAPresentation, DglaError, Generator, LieHomology, ValidationReport};
pub use families::{builtin_family, FamilyParams};
pub use pbw::{Element, Monomial, TensorElement, UEATruncation, UeaError};
pub use scalar::{PLocal, PrimeContext, ScalarError, Valuation};
