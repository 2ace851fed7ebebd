use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::{hs_inner, HermitianBasis};
use crate::{Error, Result};

pub(crate) const HERMITIAN_TOL: f64 = 1e-10;

/// Whether a vector represents a state (column) or an effect (row).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VectorKind {
    State,
    Effect,
}

/// Real coordinates of a Hermitian operator in a [`HermitianBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct HsVector {
    pub coords: DVector<f64>,
    pub kind: VectorKind,
}

impl HsVector {
    pub fn new(coords: DVector<f64>, kind: VectorKind) -> Self {
        Self { coords, kind }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

pub(crate) fn hermiticity_deviation(op: &DMatrix<Complex64>) -> f64 {
    (op - op.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Expands a Hermitian operator in `basis`: `coords[k] = Tr[B_k^dagger op]`.
pub fn vectorize(
    op: &DMatrix<Complex64>,
    basis: &HermitianBasis,
    kind: VectorKind,
) -> Result<HsVector> {
    let d = basis.dim();
    if op.nrows() != d || op.ncols() != d {
        return Err(Error::DimensionMismatch {
            context: "vectorize",
            expected: d,
            found: op.nrows().max(op.ncols()),
        });
    }
    let deviation = hermiticity_deviation(op);
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let mut coords = DVector::zeros(basis.len());
    for (k, b) in basis.elements().iter().enumerate() {
        let z = hs_inner(b, op);
        // Residues up to the Hermiticity tolerance are rounding noise.
        if z.im.abs() > HERMITIAN_TOL {
            return Err(Error::ImaginaryResidue {
                context: "vectorize",
                residue: z.im.abs(),
                tolerance: HERMITIAN_TOL,
            });
        }
        coords[k] = z.re;
    }
    Ok(HsVector { coords, kind })
}

/// Inverse of [`vectorize`]: `op = sum_k coords[k] B_k`.
pub fn devectorize(v: &HsVector, basis: &HermitianBasis) -> Result<DMatrix<Complex64>> {
    check_len(v.len(), basis.len(), "devectorize")?;
    let d = basis.dim();
    let mut op = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
    for (c, b) in v.coords.iter().zip(basis.elements()) {
        op += b * Complex64::new(*c, 0.0);
    }
    Ok(op)
}

/// Born rule in coordinates: `Tr[E rho]` as the real inner product of the
/// coordinate vectors. No clamping is applied.
pub fn born_probability(effect: &HsVector, state: &HsVector) -> Result<f64> {
    check_len(state.len(), effect.len(), "born_probability")?;
    if effect.kind != VectorKind::Effect || state.kind != VectorKind::State {
        return Err(Error::InvalidData(format!(
            "born_probability expects (effect, state), got ({:?}, {:?})",
            effect.kind, state.kind
        )));
    }
    Ok(effect.coords.dot(&state.coords))
}

fn check_len(found: usize, expected: usize, context: &'static str) -> Result<()> {
    if found != expected {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        });
    }
    Ok(())
}
