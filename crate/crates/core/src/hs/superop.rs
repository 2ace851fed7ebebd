use nalgebra::DMatrix;
use num_complex::Complex64;

use super::basis::{hs_inner, HermitianBasis};
use super::vector::{HsVector, VectorKind};
use crate::{Error, Result};

const UNITARY_TOL: f64 = 1e-10;
const REAL_TOL: f64 = 1e-10;

/// Transfer matrix of a linear map on Hilbert-Schmidt space, in the
/// identity-first Hermitian basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    mat: DMatrix<f64>,
    dim: usize,
}

impl Superoperator {
    /// Wraps a `d^2 x d^2` real matrix.
    pub fn from_matrix(mat: DMatrix<f64>, dim: usize) -> Result<Self> {
        let n = dim * dim;
        if mat.nrows() != n || mat.ncols() != n {
            return Err(Error::ShapeMismatch {
                context: "superoperator",
                lhs: (n, n),
                rhs: mat.shape(),
            });
        }
        Ok(Self { mat, dim })
    }

    /// Infers `d` from a square `d^2 x d^2` matrix.
    pub fn from_square(mat: DMatrix<f64>) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::NotSquare {
                what: "superoperator",
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        let n = mat.nrows();
        let dim = (n as f64).sqrt().round() as usize;
        if dim * dim != n || dim < 2 {
            return Err(Error::InvalidData(format!(
                "superoperator side {n} is not a square of a dimension >= 2"
            )));
        }
        Ok(Self { mat, dim })
    }

    pub fn identity(dim: usize) -> Self {
        let n = dim * dim;
        Self {
            mat: DMatrix::identity(n, n),
            dim,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Transfer matrix of `rho -> U rho U^dagger`:
    /// `mat[i][j] = Tr[B_i^dagger U B_j U^dagger]`.
    pub fn from_unitary(u: &DMatrix<Complex64>, basis: &HermitianBasis) -> Result<Self> {
        let d = basis.dim();
        if u.nrows() != d || u.ncols() != d {
            return Err(Error::DimensionMismatch {
                context: "unitary_to_superop",
                expected: d,
                found: u.nrows(),
            });
        }
        check_unitary(u)?;
        let u_dag = u.adjoint();
        let conj: Vec<_> = basis.elements().iter().map(|b| u * b * &u_dag).collect();
        let n = basis.len();
        let mut mat = DMatrix::zeros(n, n);
        for (i, bi) in basis.elements().iter().enumerate() {
            for (j, cj) in conj.iter().enumerate() {
                let z = hs_inner(bi, cj);
                if z.im.abs() > REAL_TOL {
                    return Err(Error::ImaginaryResidue {
                        context: "unitary_to_superop",
                        residue: z.im.abs(),
                        tolerance: REAL_TOL,
                    });
                }
                mat[(i, j)] = z.re;
            }
        }
        Ok(Self { mat, dim: d })
    }

    /// `rho -> gamma rho + (1 - gamma) 1l / d`, i.e. `diag(1, gamma, ..., gamma)`.
    pub fn depolarizing(gamma: f64, dim: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::ParameterOutOfRange {
                name: "gamma",
                value: gamma,
                range: "[0, 1]",
            });
        }
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let n = dim * dim;
        let mut mat = DMatrix::from_diagonal_element(n, n, gamma);
        mat[(0, 0)] = 1.0;
        Ok(Self { mat, dim })
    }

    /// `self` after `first`: the matrix product `self * first`.
    pub fn compose(&self, first: &Superoperator) -> Result<Superoperator> {
        if self.dim != first.dim {
            return Err(Error::DimensionMismatch {
                context: "compose",
                expected: self.dim,
                found: first.dim,
            });
        }
        Ok(Self {
            mat: &self.mat * &first.mat,
            dim: self.dim,
        })
    }

    pub fn apply(&self, v: &HsVector) -> Result<HsVector> {
        if v.len() != self.mat.ncols() {
            return Err(Error::DimensionMismatch {
                context: "apply",
                expected: self.mat.ncols(),
                found: v.len(),
            });
        }
        Ok(HsVector::new(&self.mat * &v.coords, VectorKind::State))
    }

    /// Largest deviation of the first row from `(1, 0, ..., 0)`.
    pub fn tp_slack(&self) -> f64 {
        self.mat
            .row(0)
            .iter()
            .enumerate()
            .map(|(j, x)| if j == 0 { (x - 1.0).abs() } else { x.abs() })
            .fold(0.0, f64::max)
    }
}

pub(crate) fn check_unitary(u: &DMatrix<Complex64>) -> Result<()> {
    if !u.is_square() {
        return Err(Error::NotSquare {
            what: "unitary",
            rows: u.nrows(),
            cols: u.ncols(),
        });
    }
    let eye = DMatrix::<Complex64>::identity(u.nrows(), u.ncols());
    let deviation = (u.adjoint() * u - eye)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if deviation > UNITARY_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(())
}
