use nalgebra::DMatrix;

use super::data::ProbMatrix;
use super::estimate::{regauge, Diagnostics, Estimate, EstimatorKind};
use super::frame::Frame;
use crate::hs::Superoperator;
use crate::linalg::{checked_inverse, MatrixPowers};
use crate::{Error, Result};

/// Frames whose `M0` or `S0` condition number reaches this are rejected.
pub const FRAME_CONDITION_LIMIT: f64 = 1e8;

/// Default share of SPAM error assigned to state preparation.
pub const DEFAULT_GAUGE_P: f64 = 0.5;

pub(crate) fn check_data_shape(frame: &Frame, data: &ProbMatrix, what: &'static str) -> Result<()> {
    if data.shape() != frame.data_shape() {
        return Err(Error::ShapeMismatch {
            context: what,
            lhs: data.shape(),
            rhs: frame.data_shape(),
        });
    }
    Ok(())
}

fn frame_inverses(frame: &Frame) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if !frame.is_square() {
        return Err(Error::NotSquare {
            what: "frame (use the least-squares estimators for overcomplete frames)",
            rows: frame.n_effects(),
            cols: frame.n_states(),
        });
    }
    let m0_inv = checked_inverse(frame.m0(), "effect matrix M0", FRAME_CONDITION_LIMIT)?;
    let s0_inv = checked_inverse(frame.s0(), "state matrix S0", FRAME_CONDITION_LIMIT)?;
    Ok((m0_inv, s0_inv))
}

/// Linear-inversion estimate `G0 = M0^-1 P S0^-1`. No constraints are
/// enforced.
pub fn standard_qpt(frame: &Frame, p_hat: &ProbMatrix) -> Result<Estimate> {
    check_data_shape(frame, p_hat, "gate data vs frame")?;
    let (m0_inv, s0_inv) = frame_inverses(frame)?;
    let g0 = Superoperator::from_matrix(&m0_inv * &p_hat.values * &s0_inv, frame.dim())?;
    Estimate::uncorrected(EstimatorKind::Standard, g0)
}

/// SPAM error superoperator `E = M0^-1 I S0^-1`. Not required to be a
/// physical map.
pub fn estimate_spam_error(frame: &Frame, i_hat: &ProbMatrix) -> Result<Superoperator> {
    check_data_shape(frame, i_hat, "calibration data vs frame")?;
    let (m0_inv, s0_inv) = frame_inverses(frame)?;
    Superoperator::from_matrix(&m0_inv * &i_hat.values * &s0_inv, frame.dim())
}

/// Gauge-split corrected estimate `G(p) = E^(p-1) G0 E^(-p)`, assigning the
/// share `p` of the SPAM error to state preparation: `S = E^p S0`,
/// `M = M0 E^(1-p)`.
pub fn spam_corrected_qpt(
    frame: &Frame,
    i_hat: &ProbMatrix,
    p_hat: &ProbMatrix,
    p: f64,
) -> Result<Estimate> {
    check_gauge_p(p)?;
    let g0 = standard_qpt(frame, p_hat)?.g0_hat;
    let e = estimate_spam_error(frame, i_hat)?;

    let powers = MatrixPowers::new(e.matrix())?;
    let spam = |q: f64| {
        powers.power(q).map_err(|source| Error::SpamTooLarge {
            source: Box::new(source),
        })
    };
    let g = spam(p - 1.0)? * g0.matrix() * spam(-p)?;
    let s_hat = spam(p)? * frame.s0();
    let m_hat = frame.m0() * spam(1.0 - p)?;

    let g_hat = Superoperator::from_matrix(g, frame.dim())?;
    let diagnostics = Diagnostics::of(&g_hat)?;
    Ok(Estimate {
        kind: EstimatorKind::Corrected,
        g_hat,
        g0_hat: g0,
        e_hat: Some(e),
        m_hat: Some(m_hat),
        s_hat: Some(s_hat),
        gauge_p: Some(p),
        diagnostics,
    })
}

pub(crate) fn check_gauge_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ParameterOutOfRange {
            name: "gauge_p",
            value: p,
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// Recomputes `G(p)` from an uncorrected estimate and a SPAM error matrix.
pub fn regauge_estimate(e: &Superoperator, g0: &Superoperator, p: f64) -> Result<Superoperator> {
    check_gauge_p(p)?;
    Superoperator::from_matrix(regauge(e.matrix(), g0.matrix(), p)?, g0.dim())
}
