use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Orthonormal Hermitian operator basis with the identity element first.
///
/// For `d = 2` the elements are `{1l, X, Y, Z} / sqrt(2)`. For larger `d` the
/// generalized Gell-Mann matrices are used, ordered as identity, symmetric
/// off-diagonal pairs, antisymmetric pairs, then diagonal elements. The qubit
/// case is the same construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianBasis {
    dim: usize,
    elements: Vec<DMatrix<Complex64>>,
}

impl HermitianBasis {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let mut elements = Vec::with_capacity(dim * dim);

        elements.push(DMatrix::from_diagonal_element(
            dim,
            dim,
            Complex64::new(1.0 / (dim as f64).sqrt(), 0.0),
        ));
        for j in 0..dim {
            for k in (j + 1)..dim {
                let mut m = DMatrix::from_element(dim, dim, zero);
                m[(j, k)] = one * inv_sqrt2;
                m[(k, j)] = one * inv_sqrt2;
                elements.push(m);
            }
        }
        for j in 0..dim {
            for k in (j + 1)..dim {
                let mut m = DMatrix::from_element(dim, dim, zero);
                m[(j, k)] = Complex64::new(0.0, -inv_sqrt2);
                m[(k, j)] = Complex64::new(0.0, inv_sqrt2);
                elements.push(m);
            }
        }
        for l in 1..dim {
            let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
            let mut m = DMatrix::from_element(dim, dim, zero);
            for j in 0..l {
                m[(j, j)] = Complex64::new(norm, 0.0);
            }
            m[(l, l)] = Complex64::new(-(l as f64) * norm, 0.0);
            elements.push(m);
        }
        Ok(Self { dim, elements })
    }

    /// Normalized Pauli basis `{1l, X, Y, Z} / sqrt(2)`.
    pub fn qubit() -> Self {
        Self::new(2).expect("dimension 2 is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of elements, `d^2`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[DMatrix<Complex64>] {
        &self.elements
    }

    pub fn element(&self, k: usize) -> &DMatrix<Complex64> {
        &self.elements[k]
    }

    /// Gram matrix `G[i][j] = Tr[B_i^dagger B_j]`.
    pub fn gram(&self) -> DMatrix<Complex64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| hs_inner(&self.elements[i], &self.elements[j]))
    }
}

/// Hilbert-Schmidt inner product `Tr[A^dagger B]`.
pub fn hs_inner(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}
