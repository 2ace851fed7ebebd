use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::hs::{ket_to_density, HermitianBasis, PauliAxis, PauliState};
use crate::tomo::Frame;
use crate::{Error, Result};

/// Shots per circuit, or the infinite-shot limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shots {
    Finite(u64),
    Exact,
}

impl fmt::Display for Shots {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shots::Finite(n) => write!(f, "{n}"),
            Shots::Exact => f.write_str("exact"),
        }
    }
}

impl FromStr for Shots {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "exact" {
            return Ok(Shots::Exact);
        }
        match s.parse::<u64>() {
            Ok(n) if n >= 1 => Ok(Shots::Finite(n)),
            _ => Err(Error::InvalidData(format!(
                "shots must be a positive integer or \"exact\", got '{s}'"
            ))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ShotsRepr {
    Count(u64),
    Word(String),
}

impl Serialize for Shots {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Shots::Finite(n) => ShotsRepr::Count(*n),
            Shots::Exact => ShotsRepr::Word("exact".into()),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Shots {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = match ShotsRepr::deserialize(deserializer)? {
            ShotsRepr::Count(n) => n.to_string(),
            ShotsRepr::Word(w) => w,
        };
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Single-qubit Pauli tomography experiment: every preparation is measured
/// in every basis. Each basis measurement is one circuit with two outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentDesign {
    pub preps: Vec<PauliState>,
    pub bases: Vec<PauliAxis>,
    /// Outcomes used as rows of the effect matrix.
    pub tracked_effects: Vec<PauliState>,
    pub shots: Shots,
    pub include_calibration: bool,
}

impl ExperimentDesign {
    /// Four preparations `+x, -x, +y, +z`, bases `x, y, z`, the same four
    /// outcomes tracked: a square frame, 12 gate circuits.
    pub fn square(shots: Shots) -> Self {
        use PauliState::*;
        let four = vec![PlusX, MinusX, PlusY, PlusZ];
        Self {
            preps: four.clone(),
            bases: PauliAxis::ALL.to_vec(),
            tracked_effects: four,
            shots,
            include_calibration: true,
        }
    }

    /// All six Pauli eigenstates prepared and tracked.
    pub fn overcomplete(shots: Shots) -> Self {
        Self {
            preps: PauliState::ALL.to_vec(),
            bases: PauliAxis::ALL.to_vec(),
            tracked_effects: PauliState::ALL.to_vec(),
            shots,
            include_calibration: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.preps.is_empty() || self.bases.is_empty() || self.tracked_effects.is_empty() {
            return Err(Error::InvalidData(
                "design needs at least one preparation, basis and tracked effect".into(),
            ));
        }
        if let Some(e) = self
            .tracked_effects
            .iter()
            .find(|e| !self.bases.contains(&e.axis()))
        {
            return Err(Error::InvalidData(format!(
                "tracked effect {e} is not an outcome of any measured basis"
            )));
        }
        for (what, labels) in [
            (
                "preparations",
                self.preps.iter().map(|p| p.label()).collect::<Vec<_>>(),
            ),
            ("bases", self.bases.iter().map(|b| b.label()).collect()),
            (
                "tracked effects",
                self.tracked_effects.iter().map(|e| e.label()).collect(),
            ),
        ] {
            let mut sorted = labels.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != labels.len() {
                return Err(Error::InvalidData(format!("duplicate {what} in design")));
            }
        }
        if let Shots::Finite(0) = self.shots {
            return Err(Error::InvalidData("shots must be at least 1".into()));
        }
        Ok(())
    }

    /// Gate circuits, `|preps| * |bases|`.
    pub fn gate_circuits(&self) -> usize {
        self.preps.len() * self.bases.len()
    }

    /// All circuits including calibration.
    pub fn total_circuits(&self) -> usize {
        self.gate_circuits() * if self.include_calibration { 2 } else { 1 }
    }

    /// Index into `bases` of the basis that measures `effect`.
    pub fn basis_of(&self, effect: PauliState) -> Option<usize> {
        self.bases.iter().position(|&b| b == effect.axis())
    }

    /// The a-priori frame: ideal tracked effects and ideal preparations.
    pub fn frame(&self) -> Result<Frame> {
        self.validate()?;
        let ops = |set: &[PauliState]| {
            set.iter()
                .map(|s| (s.label().to_string(), ket_to_density(&s.ket())))
                .collect::<Vec<_>>()
        };
        Frame::from_operators(
            &HermitianBasis::qubit(),
            &ops(&self.tracked_effects),
            &ops(&self.preps),
        )
    }
}
