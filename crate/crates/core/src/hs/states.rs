use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const KET_TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The six single-qubit Pauli eigenstates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliState {
    #[serde(rename = "+x")]
    PlusX,
    #[serde(rename = "-x")]
    MinusX,
    #[serde(rename = "+y")]
    PlusY,
    #[serde(rename = "-y")]
    MinusY,
    #[serde(rename = "+z")]
    PlusZ,
    #[serde(rename = "-z")]
    MinusZ,
}

impl PauliState {
    pub const ALL: [PauliState; 6] = [
        PauliState::PlusX,
        PauliState::MinusX,
        PauliState::PlusY,
        PauliState::MinusY,
        PauliState::PlusZ,
        PauliState::MinusZ,
    ];

    /// Ket in the computational basis, phase fixed so that the first nonzero
    /// amplitude is real and positive.
    pub fn ket(self) -> DVector<Complex64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = match self {
            PauliState::PlusX => [c(s, 0.0), c(s, 0.0)],
            PauliState::MinusX => [c(s, 0.0), c(-s, 0.0)],
            PauliState::PlusY => [c(s, 0.0), c(0.0, s)],
            PauliState::MinusY => [c(s, 0.0), c(0.0, -s)],
            PauliState::PlusZ => [c(1.0, 0.0), c(0.0, 0.0)],
            PauliState::MinusZ => [c(0.0, 0.0), c(1.0, 0.0)],
        };
        DVector::from_row_slice(&v)
    }

    /// The unique orthogonal pure state.
    pub fn orthogonal(self) -> PauliState {
        match self {
            PauliState::PlusX => PauliState::MinusX,
            PauliState::MinusX => PauliState::PlusX,
            PauliState::PlusY => PauliState::MinusY,
            PauliState::MinusY => PauliState::PlusY,
            PauliState::PlusZ => PauliState::MinusZ,
            PauliState::MinusZ => PauliState::PlusZ,
        }
    }

    pub fn axis(self) -> PauliAxis {
        match self {
            PauliState::PlusX | PauliState::MinusX => PauliAxis::X,
            PauliState::PlusY | PauliState::MinusY => PauliAxis::Y,
            PauliState::PlusZ | PauliState::MinusZ => PauliAxis::Z,
        }
    }

    pub fn outcome(self) -> Outcome {
        match self {
            PauliState::PlusX | PauliState::PlusY | PauliState::PlusZ => Outcome::Plus,
            _ => Outcome::Minus,
        }
    }

    pub fn from_axis(axis: PauliAxis, outcome: Outcome) -> PauliState {
        match (axis, outcome) {
            (PauliAxis::X, Outcome::Plus) => PauliState::PlusX,
            (PauliAxis::X, Outcome::Minus) => PauliState::MinusX,
            (PauliAxis::Y, Outcome::Plus) => PauliState::PlusY,
            (PauliAxis::Y, Outcome::Minus) => PauliState::MinusY,
            (PauliAxis::Z, Outcome::Plus) => PauliState::PlusZ,
            (PauliAxis::Z, Outcome::Minus) => PauliState::MinusZ,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PauliState::PlusX => "+x",
            PauliState::MinusX => "-x",
            PauliState::PlusY => "+y",
            PauliState::MinusY => "-y",
            PauliState::PlusZ => "+z",
            PauliState::MinusZ => "-z",
        }
    }
}

impl fmt::Display for PauliState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for PauliState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PauliState::ALL
            .into_iter()
            .find(|p| p.label() == s)
            .ok_or_else(|| Error::InvalidData(format!("unknown Pauli state label '{s}'")))
    }
}

/// A two-outcome Pauli measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    pub fn label(self) -> &'static str {
        match self {
            PauliAxis::X => "x",
            PauliAxis::Y => "y",
            PauliAxis::Z => "z",
        }
    }
}

impl fmt::Display for PauliAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for PauliAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PauliAxis::ALL
            .into_iter()
            .find(|a| a.label() == s)
            .ok_or_else(|| Error::InvalidData(format!("unknown basis label '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Outcome {
    pub fn label(self) -> &'static str {
        match self {
            Outcome::Plus => "+",
            Outcome::Minus => "-",
        }
    }

    pub fn flipped(self) -> Outcome {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" => Ok(Outcome::Plus),
            "-" => Ok(Outcome::Minus),
            _ => Err(Error::InvalidData(format!("unknown outcome label '{s}'"))),
        }
    }
}

/// `|psi><psi|`.
pub fn ket_to_density(ket: &DVector<Complex64>) -> DMatrix<Complex64> {
    ket * ket.adjoint()
}

/// Density matrix of `cos(phi)|psi> + sin(phi)|psi_perp>`.
pub fn rotated_state(
    psi: &DVector<Complex64>,
    psi_perp: &DVector<Complex64>,
    phi: f64,
) -> Result<DMatrix<Complex64>> {
    if psi.len() != psi_perp.len() {
        return Err(Error::DimensionMismatch {
            context: "rotated_state",
            expected: psi.len(),
            found: psi_perp.len(),
        });
    }
    for (name, k) in [("psi", psi), ("psi_perp", psi_perp)] {
        let norm = k.norm();
        if (norm - 1.0).abs() > KET_TOL {
            return Err(Error::InvalidKets(format!("{name} has norm {norm}")));
        }
    }
    let overlap = psi.dotc(psi_perp).norm();
    if overlap > KET_TOL {
        return Err(Error::InvalidKets(format!(
            "kets are not orthogonal (|<psi|psi_perp>| = {overlap:.3e})"
        )));
    }
    let ket = psi * c(phi.cos(), 0.0) + psi_perp * c(phi.sin(), 0.0);
    Ok(ket_to_density(&ket))
}

/// `exp(-i pi X / 4)`, the ideal `X_{pi/2}` gate.
pub fn x_half_pi() -> DMatrix<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(0.0, -s), c(0.0, -s), c(s, 0.0)])
}

pub fn pauli_x() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn pauli_y() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cmax(m: DMatrix<Complex64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn fidelity_with(rho: &DMatrix<Complex64>, psi: &DVector<Complex64>) -> f64 {
        (psi.adjoint() * rho * psi)[(0, 0)].re
    }

    #[test]
    fn rotated_state_examples() {
        let psi = PauliState::PlusZ.ket();
        let perp = PauliState::MinusZ.ket();
        let r0 = rotated_state(&psi, &perp, 0.0).unwrap();
        assert!(cmax(r0 - ket_to_density(&psi)) < 1e-15);

        let r = rotated_state(&psi, &perp, 0.1).unwrap();
        assert!((fidelity_with(&r, &psi) - 0.990_033).abs() < 1e-6);
        assert!((fidelity_with(&r, &psi) - 0.1f64.cos().powi(2)).abs() < 1e-14);

        let full = rotated_state(&psi, &perp, std::f64::consts::FRAC_PI_2).unwrap();
        assert!(cmax(full - ket_to_density(&perp)) < 1e-15);
    }

    #[test]
    fn infidelity_is_sin_squared() {
        for s in PauliState::ALL {
            let psi = s.ket();
            let perp = s.orthogonal().ket();
            for phi in [0.01, 0.05, 0.1, 0.7] {
                let r = rotated_state(&psi, &perp, phi).unwrap();
                assert!((1.0 - fidelity_with(&r, &psi) - phi.sin().powi(2)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rotated_state_rejects_bad_kets() {
        let psi = PauliState::PlusZ.ket();
        assert!(matches!(
            rotated_state(&psi, &PauliState::PlusX.ket(), 0.1),
            Err(Error::InvalidKets(_))
        ));
        let long = PauliState::MinusZ.ket() * c(2.0, 0.0);
        assert!(matches!(
            rotated_state(&psi, &long, 0.1),
            Err(Error::InvalidKets(_))
        ));
    }

    #[test]
    fn orthogonal_partner_has_positive_leading_amplitude() {
        for s in PauliState::ALL {
            let k = s.orthogonal().ket();
            let lead = k.iter().find(|z| z.norm() > 1e-12).unwrap();
            assert!(lead.im.abs() < 1e-15 && lead.re > 0.0);
            assert!(s.ket().dotc(&k).norm() < 1e-15);
            assert_eq!(s.label().parse::<PauliState>().unwrap(), s);
        }
    }
}
