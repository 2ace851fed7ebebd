use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::hs::{cptp_report, CptpReport, Superoperator};
use crate::linalg::{eigenvalues, EigenSet, MatrixPowers};
use crate::Result;

/// Tolerance used for the `is_cp` / `is_tp` flags in estimate diagnostics.
pub const DIAGNOSTIC_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    /// `M0^-1 P S0^-1`.
    Standard,
    /// Square-frame estimate corrected with calibration data.
    Corrected,
    /// `M0^+ P S0^+`.
    Ols,
    /// Overcomplete estimate corrected with calibration data.
    OvercompleteCorrected,
}

/// `||M_m-opt - M0||_F` and `||S_s-opt - S0||_F`: SPAM discrepancy that no
/// choice of gauge can remove.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameDeviation {
    pub effects: f64,
    pub states: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub cptp: CptpReport,
    pub spectrum: EigenSet,
    pub frame_deviation: Option<FrameDeviation>,
}

impl Diagnostics {
    pub fn of(g: &Superoperator) -> Result<Self> {
        Ok(Self {
            cptp: cptp_report(g, DIAGNOSTIC_TOL)?,
            spectrum: eigenvalues(g.matrix())?,
            frame_deviation: None,
        })
    }
}

/// Result of one estimator. `g0_hat` is always the uncorrected (standard or
/// least-squares) estimate from the same gate data.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub kind: EstimatorKind,
    pub g_hat: Superoperator,
    pub g0_hat: Superoperator,
    pub e_hat: Option<Superoperator>,
    pub m_hat: Option<DMatrix<f64>>,
    pub s_hat: Option<DMatrix<f64>>,
    pub gauge_p: Option<f64>,
    pub diagnostics: Diagnostics,
}

impl Estimate {
    pub(crate) fn uncorrected(kind: EstimatorKind, g0: Superoperator) -> Result<Self> {
        let diagnostics = Diagnostics::of(&g0)?;
        Ok(Self {
            kind,
            g_hat: g0.clone(),
            g0_hat: g0,
            e_hat: None,
            m_hat: None,
            s_hat: None,
            gauge_p: None,
            diagnostics,
        })
    }

    /// For square-frame corrected estimates, `||E^(p-1) G0 E^(-p) - G||_F`
    /// recomputed from the stored parts.
    pub fn regauge_residual(&self) -> Option<Result<f64>> {
        if self.kind != EstimatorKind::Corrected {
            return None;
        }
        let (e, p) = (self.e_hat.as_ref()?, self.gauge_p?);
        Some(regauge(e.matrix(), self.g0_hat.matrix(), p).map(|g| (g - self.g_hat.matrix()).norm()))
    }
}

/// `E^(p-1) G0 E^(-p)`.
pub(crate) fn regauge(e: &DMatrix<f64>, g0: &DMatrix<f64>, p: f64) -> Result<DMatrix<f64>> {
    let powers = MatrixPowers::new(e)?;
    Ok(powers.power(p - 1.0)? * g0 * powers.power(-p)?)
}
