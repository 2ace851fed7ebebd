//! Process tomography estimators.
//!
//! A [`Frame`] holds the a-priori effect matrix `M0` and state matrix `S0`.
//! Gate data `P` and calibration data `I` (the same circuits with the gate
//! omitted) are `K_E x K_S` probability tables. Square frames use linear
//! inversion; overcomplete frames use rank-`d^2` least squares.

mod consistency;
mod data;
mod estimate;
mod frame;
mod overcomplete;
mod square;

pub use consistency::{
    spam_consistency_check, ConsistencyReport, OUTLIER_FRACTION, Z_FAIL, Z_OUTLIER,
};
pub use data::{DataSet, ProbMatrix, Sampling};
pub use estimate::{Diagnostics, Estimate, EstimatorKind, FrameDeviation, DIAGNOSTIC_TOL};
pub use frame::Frame;
pub use overcomplete::{
    ols_qpt, overcomplete_approx_diagnostic, overcomplete_spam_corrected_qpt, OvercompleteOptions,
    FACTORIZATION_TOL,
};
pub use square::{
    estimate_spam_error, regauge_estimate, spam_corrected_qpt, standard_qpt, DEFAULT_GAUGE_P,
    FRAME_CONDITION_LIMIT,
};

#[cfg(test)]
pub(crate) mod fixtures {
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    use super::{Frame, ProbMatrix};
    use crate::hs::{
        ket_to_density, rotated_state, vectorize, x_half_pi, HermitianBasis, PauliState,
        Superoperator, VectorKind,
    };

    fn frame_from(states: &[PauliState]) -> Frame {
        let ops: Vec<(String, DMatrix<Complex64>)> = states
            .iter()
            .map(|s| (s.label().to_string(), ket_to_density(&s.ket())))
            .collect();
        Frame::from_operators(&HermitianBasis::qubit(), &ops, &ops).unwrap()
    }

    /// Effects and states `+x, -x, +y, +z`.
    pub fn square_frame() -> Frame {
        use PauliState::*;
        frame_from(&[PlusX, MinusX, PlusY, PlusZ])
    }

    /// All six Pauli eigenstates.
    pub fn overcomplete_frame() -> Frame {
        frame_from(&PauliState::ALL)
    }

    pub fn x90_target() -> Superoperator {
        Superoperator::from_unitary(&x_half_pi(), &HermitianBasis::qubit()).unwrap()
    }

    /// `D_gamma` after `X_{pi/2}`.
    pub fn noisy_x90(gamma: f64) -> Superoperator {
        Superoperator::depolarizing(gamma, 2)
            .unwrap()
            .compose(&x90_target())
            .unwrap()
    }

    pub fn exact(m: &DMatrix<f64>, g: &Superoperator, s: &DMatrix<f64>) -> ProbMatrix {
        ProbMatrix::exact(m * g.matrix() * s)
    }

    /// `(M0 D_meas, D_prep S0)`.
    pub fn depolarized_frames(frame: &Frame, meas: f64, prep: f64) -> (DMatrix<f64>, DMatrix<f64>) {
        let dm = Superoperator::depolarizing(meas, 2).unwrap();
        let dp = Superoperator::depolarizing(prep, 2).unwrap();
        (frame.m0() * dm.matrix(), dp.matrix() * frame.s0())
    }

    /// State matrix with each labelled Pauli state rotated by `phi` toward
    /// its orthogonal partner.
    pub fn coherent_states(frame: &Frame, phi: f64) -> DMatrix<f64> {
        let basis = HermitianBasis::qubit();
        let cols: Vec<_> = frame
            .state_labels()
            .iter()
            .map(|l| {
                let s: PauliState = l.parse().unwrap();
                let rho = rotated_state(&s.ket(), &s.orthogonal().ket(), phi).unwrap();
                vectorize(&rho, &basis, VectorKind::State).unwrap().coords
            })
            .collect();
        DMatrix::from_columns(&cols)
    }
}
