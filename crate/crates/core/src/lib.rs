//! Weyl transform, twisted convolution and their vector-measure extensions
//! on finite abelian groups, with numerical checks of the identities and
//! norm inequalities relating them.
//!
//! Mass conventions used throughout:
//! - integrals `dm` over phase space carry the Haar weight `1/|G|` per point;
//! - integrals `dν` against a vector measure carry no extra weight, the
//!   atoms already hold the mass;
//! - a density `f` embeds as the measure `μ_f` with atoms `f(ω)/|G|`.

pub mod error;
pub mod exponent;
pub mod fourier;
pub mod group;
pub mod json;
pub mod linalg;
pub mod measure;
pub mod random;
pub mod twisted;
pub mod vector_twisted;
pub mod vector_weyl;
pub mod verify;
pub mod weyl;

pub use error::{Error, Result};
pub use exponent::Exponent;
pub use group::{Character, FiniteAbelianGroup, GroupElement, HaarWeights, PhasePoint};
pub use num_complex::Complex64;
pub use weyl::{PhaseFunction, WeylOperator};
