//! Numerical laboratory for operators on spaces with a positive semidefinite
//! semi-inner product ⟨x, y⟩_A = y*Ax.

pub mod core_linalg;
pub mod error;
pub mod generators;
pub mod inequality_lab;
pub mod radii;
pub mod semi_hilbert;

pub use error::{LabError, Result};
