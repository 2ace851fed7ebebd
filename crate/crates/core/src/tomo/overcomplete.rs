use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::data::ProbMatrix;
use super::estimate::{Diagnostics, Estimate, EstimatorKind, FrameDeviation};
use super::frame::Frame;
use super::square::{check_data_shape, check_gauge_p, DEFAULT_GAUGE_P};
use crate::hs::Superoperator;
use crate::linalg::{numerical_rank, pinv_rank, truncate_to_rank, MatrixPowers};
use crate::{Error, Result};

/// Relative tolerance of the `M_m-opt S_m-opt = I_t` factorization check.
pub const FACTORIZATION_TOL: f64 = 1e-9;

const CALIBRATION_RANK_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OvercompleteOptions {
    /// Truncate the gate data to rank `d^2` as well as the calibration data.
    pub truncate_p: bool,
    pub gauge_p: f64,
}

impl Default for OvercompleteOptions {
    fn default() -> Self {
        Self {
            truncate_p: true,
            gauge_p: DEFAULT_GAUGE_P,
        }
    }
}

/// Least-squares estimate `G0 = M0^+ P S0^+`, pseudoinverses at rank `d^2`.
pub fn ols_qpt(frame: &Frame, p_hat: &ProbMatrix) -> Result<Estimate> {
    check_data_shape(frame, p_hat, "gate data vs frame")?;
    let g0 = ols_matrix(frame, &p_hat.values)?;
    Estimate::uncorrected(
        EstimatorKind::Ols,
        Superoperator::from_matrix(g0, frame.dim())?,
    )
}

fn ols_matrix(frame: &Frame, p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = frame.hs_dim();
    Ok(pinv_rank(frame.m0(), n)? * p * pinv_rank(frame.s0(), n)?)
}

/// Intermediate factorizations of the truncated calibration data.
struct CalibrationFit {
    i_t: DMatrix<f64>,
    m_mopt: DMatrix<f64>,
    s_sopt: DMatrix<f64>,
    e: DMatrix<f64>,
}

fn fit_calibration(frame: &Frame, i_hat: &ProbMatrix) -> Result<CalibrationFit> {
    check_data_shape(frame, i_hat, "calibration data vs frame")?;
    let n = frame.hs_dim();
    let i_t = truncate_to_rank(&i_hat.values, n)?;
    let rank = numerical_rank(&i_t, CALIBRATION_RANK_RTOL)?;
    if rank < n {
        return Err(Error::RankDeficient {
            what: "truncated calibration data",
            rank,
            required: n,
        });
    }

    // Effect-optimal split: keep the states as close to S0 as the data allow.
    let s_mopt = pinv_rank(frame.m0(), n)? * &i_t;
    let m_mopt = &i_t * pinv_rank(&s_mopt, n)?;
    let residual = (&m_mopt * &s_mopt - &i_t).norm();
    if residual > FACTORIZATION_TOL * i_t.norm().max(1.0) {
        return Err(Error::FactorizationInvalid { residual });
    }

    let m_sopt = &i_t * pinv_rank(frame.s0(), n)?;
    let s_sopt = pinv_rank(&m_sopt, n)? * &i_t;
    let e = pinv_rank(&m_mopt, n)? * &i_t * pinv_rank(&s_sopt, n)?;
    Ok(CalibrationFit {
        i_t,
        m_mopt,
        s_sopt,
        e,
    })
}

/// SPAM-corrected estimate for frames with more than `d^2` states or effects.
///
/// The calibration table is truncated to rank `d^2` and factored twice, once
/// keeping the effects near `M0` and once keeping the states near `S0`. The
/// SPAM error `E` relating the two factorizations is split between the
/// corrected frames as `M = M_m-opt E^(1-p)` and `S = E^p S_s-opt`, and the
/// gate is fitted as `G = M^+ P_t S^+`.
pub fn overcomplete_spam_corrected_qpt(
    frame: &Frame,
    i_hat: &ProbMatrix,
    p_hat: &ProbMatrix,
    options: OvercompleteOptions,
) -> Result<Estimate> {
    check_gauge_p(options.gauge_p)?;
    check_data_shape(frame, p_hat, "gate data vs frame")?;
    let n = frame.hs_dim();
    let fit = fit_calibration(frame, i_hat)?;
    let p_t = if options.truncate_p {
        truncate_to_rank(&p_hat.values, n)?
    } else {
        p_hat.values.clone()
    };

    let powers = MatrixPowers::new(&fit.e)?;
    let spam = |q: f64| {
        powers.power(q).map_err(|source| Error::SpamTooLarge {
            source: Box::new(source),
        })
    };
    let p = options.gauge_p;
    let m_hat = &fit.m_mopt * spam(1.0 - p)?;
    let s_hat = spam(p)? * &fit.s_sopt;
    let g = pinv_rank(&m_hat, n)? * &p_t * pinv_rank(&s_hat, n)?;

    let g_hat = Superoperator::from_matrix(g, frame.dim())?;
    let g0_hat = Superoperator::from_matrix(ols_matrix(frame, &p_hat.values)?, frame.dim())?;
    let mut diagnostics = Diagnostics::of(&g_hat)?;
    diagnostics.frame_deviation = Some(FrameDeviation {
        effects: (&fit.m_mopt - frame.m0()).norm(),
        states: (&fit.s_sopt - frame.s0()).norm(),
    });
    Ok(Estimate {
        kind: EstimatorKind::OvercompleteCorrected,
        g_hat,
        g0_hat,
        e_hat: Some(Superoperator::from_matrix(fit.e, frame.dim())?),
        m_hat: Some(m_hat),
        s_hat: Some(s_hat),
        gauge_p: Some(p),
        diagnostics,
    })
}

/// Closed-form approximation to [`overcomplete_spam_corrected_qpt`] obtained
/// by treating `(AB)^+` as `B^+ A^+`:
/// `E^(p-1) M0^+ Pc P Pr S0^+ E^(-p)`, where `Pc` and `Pr` project onto the
/// column and row spaces of the truncated calibration data.
///
/// For comparison only. On exact data it coincides with the full pipeline.
pub fn overcomplete_approx_diagnostic(
    frame: &Frame,
    i_hat: &ProbMatrix,
    p_hat: &ProbMatrix,
    gauge_p: f64,
) -> Result<Superoperator> {
    check_gauge_p(gauge_p)?;
    check_data_shape(frame, p_hat, "gate data vs frame")?;
    let n = frame.hs_dim();
    let fit = fit_calibration(frame, i_hat)?;
    let i_t_pinv = pinv_rank(&fit.i_t, n)?;
    let proj_col = &fit.i_t * &i_t_pinv;
    let proj_row = &i_t_pinv * &fit.i_t;

    let powers = MatrixPowers::new(&fit.e)?;
    let spam = |q: f64| {
        powers.power(q).map_err(|source| Error::SpamTooLarge {
            source: Box::new(source),
        })
    };
    let core =
        pinv_rank(frame.m0(), n)? * proj_col * &p_hat.values * proj_row * pinv_rank(frame.s0(), n)?;
    let g = spam(gauge_p - 1.0)? * core * spam(-gauge_p)?;
    Superoperator::from_matrix(g, frame.dim())
}
