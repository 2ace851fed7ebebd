use nalgebra::{DMatrix, RowDVector};
use serde::{Deserialize, Serialize};

use super::design::ExperimentDesign;
use crate::hs::{
    ket_to_density, rotated_state, vectorize, x_half_pi, HermitianBasis, Outcome, PauliState,
    Superoperator, VectorKind,
};
use crate::{Error, Result};

/// Default gate depolarization retention.
pub const DEFAULT_GATE_GAMMA: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpamNoise {
    /// `D_gamma_prep` after every preparation, `D_gamma_meas` before every
    /// measurement.
    Depolarizing { gamma_prep: f64, gamma_meas: f64 },
    /// Every preparation rotated by `phi` toward its orthogonal state;
    /// measurements ideal.
    CoherentPrep { phi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub spam: SpamNoise,
    pub gate_gamma: f64,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self::depolarizing(1.0, 1.0)
    }

    pub fn depolarizing(gamma_prep: f64, gamma_meas: f64) -> Self {
        Self {
            spam: SpamNoise::Depolarizing {
                gamma_prep,
                gamma_meas,
            },
            gate_gamma: DEFAULT_GATE_GAMMA,
        }
    }

    pub fn coherent(phi: f64) -> Self {
        Self {
            spam: SpamNoise::CoherentPrep { phi },
            gate_gamma: DEFAULT_GATE_GAMMA,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name, value: f64| {
            if (0.0..=1.0).contains(&value) {
                Ok(())
            } else {
                Err(Error::ParameterOutOfRange {
                    name,
                    value,
                    range: "[0, 1]",
                })
            }
        };
        unit("gate_gamma", self.gate_gamma)?;
        match self.spam {
            SpamNoise::Depolarizing {
                gamma_prep,
                gamma_meas,
            } => {
                unit("gamma_prep", gamma_prep)?;
                unit("gamma_meas", gamma_meas)
            }
            SpamNoise::CoherentPrep { phi } => {
                if (0.0..std::f64::consts::FRAC_PI_2).contains(&phi) {
                    Ok(())
                } else {
                    Err(Error::ParameterOutOfRange {
                        name: "phi",
                        value: phi,
                        range: "[0, pi/2)",
                    })
                }
            }
        }
    }

    /// `D_gate_gamma` after `X_{pi/2}`.
    pub fn true_gate(&self) -> Result<Superoperator> {
        self.validate()?;
        Superoperator::depolarizing(self.gate_gamma, 2)?.compose(&target_gate())
    }
}

/// Ideal `X_{pi/2}` transfer matrix.
pub fn target_gate() -> Superoperator {
    Superoperator::from_unitary(&x_half_pi(), &HermitianBasis::qubit())
        .expect("X_{pi/2} is unitary")
}

/// Actual SPAM of a simulated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct TrueFrames {
    /// Tracked effects, one row each.
    pub m: DMatrix<f64>,
    /// Prepared states, one column each.
    pub s: DMatrix<f64>,
    /// "+" outcome effect of each measured basis, one row each.
    pub plus_effects: DMatrix<f64>,
}

fn ideal_effect(state: PauliState, basis: &HermitianBasis) -> Result<RowDVector<f64>> {
    let v = vectorize(&ket_to_density(&state.ket()), basis, VectorKind::Effect)?;
    Ok(v.coords.transpose())
}

/// True effect and state matrices under `noise`.
pub fn true_frames(noise: &NoiseModel, design: &ExperimentDesign) -> Result<TrueFrames> {
    noise.validate()?;
    design.validate()?;
    let basis = HermitianBasis::qubit();
    let n = basis.len();

    let mut s = DMatrix::zeros(n, design.preps.len());
    for (j, prep) in design.preps.iter().enumerate() {
        let rho = match noise.spam {
            SpamNoise::CoherentPrep { phi } => {
                rotated_state(&prep.ket(), &prep.orthogonal().ket(), phi)?
            }
            SpamNoise::Depolarizing { .. } => ket_to_density(&prep.ket()),
        };
        s.set_column(j, &vectorize(&rho, &basis, VectorKind::State)?.coords);
    }

    let mut m = DMatrix::zeros(design.tracked_effects.len(), n);
    for (i, e) in design.tracked_effects.iter().enumerate() {
        m.set_row(i, &ideal_effect(*e, &basis)?);
    }
    let mut plus = DMatrix::zeros(design.bases.len(), n);
    for (i, axis) in design.bases.iter().enumerate() {
        plus.set_row(
            i,
            &ideal_effect(PauliState::from_axis(*axis, Outcome::Plus), &basis)?,
        );
    }

    if let SpamNoise::Depolarizing {
        gamma_prep,
        gamma_meas,
    } = noise.spam
    {
        let dp = Superoperator::depolarizing(gamma_prep, 2)?;
        let dm = Superoperator::depolarizing(gamma_meas, 2)?;
        s = dp.matrix() * s;
        m *= dm.matrix();
        plus *= dm.matrix();
    }
    Ok(TrueFrames {
        m,
        s,
        plus_effects: plus,
    })
}
