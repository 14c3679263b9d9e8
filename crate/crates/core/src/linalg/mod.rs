//! Graded linear algebra over `Z_(p)` and `F_p`.

pub mod complex;
pub mod fp;
pub mod homology;
pub mod matrix;
pub mod snf;

pub use complex::{tensor_complex, ChainComplexFT, ChainMap, GradedMap, GradedBasis, LinalgError, TensorIndex};
pub use homology::{homology, induced_free_map, kunneth_free_iso, HomologyDecomposition, HomologyDegree, HomologyEntry, KunnethIso};
pub use matrix::Matrix;
pub use snf::{smith_normal_form, Snf};
