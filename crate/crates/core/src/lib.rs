//! SPAM-corrected quantum process tomography.
//!
//! The crate is organized bottom-up:
//!
//! * [`hs`]: Hilbert-Schmidt vectors, transfer matrices, channel constructors
//!   and CP/TP and fidelity diagnostics.
//! * [`linalg`]: pseudoinverses, rank truncation, matrix powers, spectra.
//! * [`tomo`]: linear-inversion and least-squares process tomography, with
//!   and without correction from a calibration ("tomography on nothing")
//!   experiment.
//! * [`sim`]: noise models, experiment designs, seeded shot sampling and
//!   Monte-Carlo sweeps comparing the estimators.

mod error;
pub mod hs;
pub mod linalg;
pub mod sim;
pub mod tomo;

pub use error::{Error, Result};
