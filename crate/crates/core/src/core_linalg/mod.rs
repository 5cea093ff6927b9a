//! Dense complex matrix primitives.

mod io;
mod matrix;
mod spectral;

pub use io::{matrix_from_json, matrix_to_json, MatrixFile};
pub use matrix::{c, CVector, ComplexMatrix, C64, I};
pub use spectral::{
    func_calculus, hermitian_eig, hermitize, moore_penrose, power_fn, psd_power, psd_sqrt, rank,
    relative_min_eig, HermitianSpectrum, TolerancePolicy,
};
pub(crate) use spectral::{eig_of_hermitian, lambda_max};
