//! Dense linear-algebra helpers used by the estimators: pseudoinverses and
//! rank truncation, principal-branch matrix powers, and spectra.

mod eigen;
mod power;
mod svd;

pub use eigen::{eigen_delta, eigenvalues, EigenSet, EXACT_MATCHING_MAX};
pub use power::{
    frac_power, EigenDecomposition, MatrixPowers, EIGVEC_CONDITION_LIMIT, IMAG_RESIDUE_TOL,
    ZERO_EIGENVALUE_TOL,
};
pub use svd::{
    checked_inverse, condition_number, numerical_rank, pinv, pinv_rank, truncate_to_rank,
    PinvOptions, SvdFactors, DEFAULT_RTOL,
};
