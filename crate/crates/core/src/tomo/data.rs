use nalgebra::DMatrix;

use crate::{Error, Result};

/// How a probability table was obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum Sampling {
    /// Exact probabilities (the infinite-shot limit).
    Exact,
    /// Empirical frequencies with per-entry shot counts.
    Shots(DMatrix<u64>),
    /// Probabilities of unknown provenance; no error bars available.
    Unknown,
}

/// `K_E x K_S` table of outcome probabilities or frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbMatrix {
    pub values: DMatrix<f64>,
    pub sampling: Sampling,
}

impl ProbMatrix {
    pub fn exact(values: DMatrix<f64>) -> Self {
        Self {
            values,
            sampling: Sampling::Exact,
        }
    }

    pub fn unknown(values: DMatrix<f64>) -> Self {
        Self {
            values,
            sampling: Sampling::Unknown,
        }
    }

    /// Frequencies in `[0, 1]` with at least one shot per entry.
    pub fn from_frequencies(values: DMatrix<f64>, shots: DMatrix<u64>) -> Result<Self> {
        if values.shape() != shots.shape() {
            return Err(Error::ShapeMismatch {
                context: "frequencies vs shot counts",
                lhs: values.shape(),
                rhs: shots.shape(),
            });
        }
        if let Some(((r, c), v)) = indexed(&values).find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(Error::ProbabilityOutOfRange {
                row: r,
                col: c,
                value: *v,
            });
        }
        if shots.iter().any(|&n| n == 0) {
            return Err(Error::InvalidData("shot counts must be at least 1".into()));
        }
        Ok(Self {
            values,
            sampling: Sampling::Shots(shots),
        })
    }

    /// Frequencies `counts / shots`.
    pub fn from_counts(counts: &DMatrix<u64>, shots: DMatrix<u64>) -> Result<Self> {
        if counts.shape() != shots.shape() {
            return Err(Error::ShapeMismatch {
                context: "counts vs shot counts",
                lhs: counts.shape(),
                rhs: shots.shape(),
            });
        }
        if counts.iter().zip(shots.iter()).any(|(c, n)| c > n) {
            return Err(Error::InvalidData("counts exceed shots".into()));
        }
        let values = counts.zip_map(&shots, |c, n| {
            if n == 0 {
                f64::NAN
            } else {
                c as f64 / n as f64
            }
        });
        Self::from_frequencies(values, shots)
    }

    pub fn shape(&self) -> (usize, usize) {
        self.values.shape()
    }

    pub fn shots(&self) -> Option<&DMatrix<u64>> {
        match &self.sampling {
            Sampling::Shots(s) => Some(s),
            _ => None,
        }
    }
}

fn indexed(m: &DMatrix<f64>) -> impl Iterator<Item = ((usize, usize), &f64)> {
    let rows = m.nrows();
    m.iter()
        .enumerate()
        .map(move |(k, v)| ((k % rows, k / rows), v))
}

/// Calibration table `I_hat` (optional) and gate table `P_hat`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    pub i_hat: Option<ProbMatrix>,
    pub p_hat: ProbMatrix,
}

impl DataSet {
    pub fn new(i_hat: Option<ProbMatrix>, p_hat: ProbMatrix) -> Result<Self> {
        if let Some(i) = &i_hat {
            if i.shape() != p_hat.shape() {
                return Err(Error::ShapeMismatch {
                    context: "calibration vs gate data",
                    lhs: i.shape(),
                    rhs: p_hat.shape(),
                });
            }
        }
        Ok(Self { i_hat, p_hat })
    }
}
