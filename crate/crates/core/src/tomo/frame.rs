use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::hs::{vectorize, HermitianBasis, VectorKind};
use crate::linalg::numerical_rank;
use crate::{Error, Result};

const RANK_RTOL: f64 = 1e-10;

/// A-priori effect matrix `M0` (rows are effect vectors) and state matrix
/// `S0` (columns are state vectors), both informationally complete.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    m0: DMatrix<f64>,
    s0: DMatrix<f64>,
    dim: usize,
    effect_labels: Vec<String>,
    state_labels: Vec<String>,
}

impl Frame {
    /// Empty label lists are filled with `E0, E1, ...` and `S0, S1, ...`.
    pub fn new(
        m0: DMatrix<f64>,
        s0: DMatrix<f64>,
        dim: usize,
        effect_labels: Vec<String>,
        state_labels: Vec<String>,
    ) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let n = dim * dim;
        if m0.ncols() != n {
            return Err(Error::ShapeMismatch {
                context: "effect matrix M0 columns vs d^2",
                lhs: m0.shape(),
                rhs: (m0.nrows(), n),
            });
        }
        if s0.nrows() != n {
            return Err(Error::ShapeMismatch {
                context: "state matrix S0 rows vs d^2",
                lhs: s0.shape(),
                rhs: (n, s0.ncols()),
            });
        }
        for (what, k) in [
            ("effect matrix M0", m0.nrows()),
            ("state matrix S0", s0.ncols()),
        ] {
            if k < n {
                return Err(Error::RankDeficient {
                    what,
                    rank: k,
                    required: n,
                });
            }
        }
        for (what, m) in [("effect matrix M0", &m0), ("state matrix S0", &s0)] {
            let rank = numerical_rank(m, RANK_RTOL)?;
            if rank < n {
                return Err(Error::RankDeficient {
                    what,
                    rank,
                    required: n,
                });
            }
        }
        let effect_labels = fill_labels(effect_labels, m0.nrows(), "E", "effect labels")?;
        let state_labels = fill_labels(state_labels, s0.ncols(), "S", "state labels")?;
        Ok(Self {
            m0,
            s0,
            dim,
            effect_labels,
            state_labels,
        })
    }

    /// Builds a frame by vectorizing labelled effect and state operators.
    pub fn from_operators(
        basis: &HermitianBasis,
        effects: &[(String, DMatrix<Complex64>)],
        states: &[(String, DMatrix<Complex64>)],
    ) -> Result<Self> {
        let n = basis.len();
        let mut m0 = DMatrix::zeros(effects.len(), n);
        for (i, (_, e)) in effects.iter().enumerate() {
            let v = vectorize(e, basis, VectorKind::Effect)?;
            m0.set_row(i, &v.coords.transpose());
        }
        let mut s0 = DMatrix::zeros(n, states.len());
        for (j, (_, r)) in states.iter().enumerate() {
            let v = vectorize(r, basis, VectorKind::State)?;
            s0.set_column(j, &v.coords);
        }
        Self::new(
            m0,
            s0,
            basis.dim(),
            effects.iter().map(|(l, _)| l.clone()).collect(),
            states.iter().map(|(l, _)| l.clone()).collect(),
        )
    }

    pub fn m0(&self) -> &DMatrix<f64> {
        &self.m0
    }

    pub fn s0(&self) -> &DMatrix<f64> {
        &self.s0
    }

    /// Hilbert-space dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Operator-space dimension `d^2`.
    pub fn hs_dim(&self) -> usize {
        self.dim * self.dim
    }

    pub fn n_effects(&self) -> usize {
        self.m0.nrows()
    }

    pub fn n_states(&self) -> usize {
        self.s0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.n_effects() == self.hs_dim() && self.n_states() == self.hs_dim()
    }

    pub fn effect_labels(&self) -> &[String] {
        &self.effect_labels
    }

    pub fn state_labels(&self) -> &[String] {
        &self.state_labels
    }

    /// Data shape `K_E x K_S`.
    pub fn data_shape(&self) -> (usize, usize) {
        (self.n_effects(), self.n_states())
    }

    /// Probabilities predicted with perfect SPAM and no gate, `M0 S0`.
    pub fn predicted_calibration(&self) -> DMatrix<f64> {
        &self.m0 * &self.s0
    }
}

fn fill_labels(
    labels: Vec<String>,
    n: usize,
    prefix: &str,
    what: &'static str,
) -> Result<Vec<String>> {
    if labels.is_empty() {
        return Ok((0..n).map(|i| format!("{prefix}{i}")).collect());
    }
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            context: what,
            expected: n,
            found: labels.len(),
        });
    }
    Ok(labels)
}
