//! Real matrix powers through a complex eigendecomposition.
//!
//! `A^p = V diag(lambda^p) V^-1` on the principal branch. Integer exponents
//! skip the decomposition and use repeated products and an explicit inverse,
//! so `A^1 = A` and `A^0 = 1l` hold exactly.

use std::cell::OnceCell;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::svd::checked_inverse;
use crate::{Error, Result};

/// Eigenvector-matrix condition numbers at or above this are rejected.
pub const EIGVEC_CONDITION_LIMIT: f64 = 1e8;
/// Eigenvalues with modulus below this are treated as zero.
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-10;
/// Allowed imaginary residue after reassembly, entrywise.
pub const IMAG_RESIDUE_TOL: f64 = 1e-8;
const INVERSE_CONDITION_LIMIT: f64 = 1e8;
const BRANCH_TOL: f64 = 1e-10;
const SCHUR_EPS_FACTORS: [f64; 4] = [1.0, 8.0, 64.0, 512.0];

/// `A = V diag(values) V^-1` for a diagonalizable real matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    pub vectors: DMatrix<Complex64>,
    inverse: DMatrix<Complex64>,
    pub condition: f64,
}

impl EigenDecomposition {
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        ensure_square(a)?;
        let n = a.nrows();
        let ac = a.map(|x| Complex64::new(x, 0.0));
        // The QR iteration can stall at machine precision on clustered
        // eigenvalues; relax the deflation threshold a few times before failing.
        let (q, t) = SCHUR_EPS_FACTORS
            .iter()
            .find_map(|&f| ac.clone().try_schur(f * f64::EPSILON, 10_000))
            .ok_or_else(|| Error::InvalidData("Schur iteration did not converge".into()))?
            .unpack();
        let values: Vec<Complex64> = (0..n).map(|k| t[(k, k)]).collect();

        // Eigenvectors of the triangular factor by back substitution; tiny
        // pivots are floored so exactly repeated eigenvalues do not divide by 0.
        let smin = (f64::EPSILON * t.norm()).max(f64::MIN_POSITIVE * n as f64);
        let mut x = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for k in 0..n {
            x[(k, k)] = Complex64::new(1.0, 0.0);
            for j in (0..k).rev() {
                let mut rhs = t[(j, k)];
                for m in (j + 1)..k {
                    rhs += t[(j, m)] * x[(m, k)];
                }
                let mut pivot = t[(j, j)] - t[(k, k)];
                if pivot.norm() < smin {
                    pivot = Complex64::new(smin, 0.0);
                }
                x[(j, k)] = -rhs / pivot;
            }
        }
        let mut vectors = q * x;
        for mut col in vectors.column_iter_mut() {
            let norm = col.norm();
            col /= Complex64::new(norm, 0.0);
        }

        let sv = vectors.clone().singular_values();
        let condition = if sv.min() == 0.0 {
            f64::INFINITY
        } else {
            sv.max() / sv.min()
        };
        if condition.is_nan() || condition >= EIGVEC_CONDITION_LIMIT {
            return Err(Error::NearDefective {
                condition,
                eigenvalue: closest_pair_member(&values),
            });
        }
        let inverse = vectors.clone().try_inverse().ok_or(Error::NearDefective {
            condition: f64::INFINITY,
            eigenvalue: closest_pair_member(&values),
        })?;
        Ok(Self {
            values,
            vectors,
            inverse,
            condition,
        })
    }

    /// Principal-branch `A^p`, real part after checking the imaginary residue.
    pub fn power(&self, p: f64) -> Result<DMatrix<f64>> {
        for &lambda in &self.values {
            if lambda.norm() < ZERO_EIGENVALUE_TOL {
                return Err(Error::ZeroEigenvalue { eigenvalue: lambda });
            }
            if !is_integer(p) && on_negative_real_axis(lambda) {
                return Err(Error::BranchCut { eigenvalue: lambda });
            }
        }
        let scaled = DMatrix::from_fn(self.vectors.nrows(), self.vectors.ncols(), |i, j| {
            self.vectors[(i, j)] * self.values[j].powf(p)
        });
        let full = scaled * &self.inverse;
        let residue = full.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if residue > IMAG_RESIDUE_TOL {
            return Err(Error::ImaginaryResidue {
                context: "matrix power",
                residue,
                tolerance: IMAG_RESIDUE_TOL,
            });
        }
        Ok(full.map(|z| z.re))
    }
}

fn on_negative_real_axis(lambda: Complex64) -> bool {
    lambda.re < 0.0 && lambda.im.abs() <= BRANCH_TOL * lambda.norm().max(1.0)
}

fn is_integer(p: f64) -> bool {
    p.fract() == 0.0 && p.abs() < 64.0
}

fn closest_pair_member(values: &[Complex64]) -> Complex64 {
    let mut best = (f64::INFINITY, values.first().copied().unwrap_or_default());
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            let gap = (a - b).norm();
            if gap < best.0 {
                best = (gap, *a);
            }
        }
    }
    best.1
}

fn ensure_square(a: &DMatrix<f64>) -> Result<()> {
    if !a.is_square() || a.is_empty() {
        return Err(Error::NotSquare {
            what: "matrix power input",
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(())
}

fn integer_power(a: &DMatrix<f64>, p: i32) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let base = if p < 0 {
        checked_inverse(a, "matrix power input", INVERSE_CONDITION_LIMIT)?
    } else {
        a.clone()
    };
    let mut exp = p.unsigned_abs();
    let mut acc = DMatrix::identity(n, n);
    let mut sq = base;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = &acc * &sq;
        }
        exp >>= 1;
        if exp > 0 {
            sq = &sq * &sq;
        }
    }
    Ok(acc)
}

/// Real matrix power `A^p` on the principal branch.
///
/// Non-integer `p` requires a diagonalizable `A` (eigenvector condition
/// number below 1e8) with no eigenvalue near zero or on the negative real
/// axis; violations report the offending eigenvalue.
pub fn frac_power(a: &DMatrix<f64>, p: f64) -> Result<DMatrix<f64>> {
    ensure_square(a)?;
    if !p.is_finite() {
        return Err(Error::ParameterOutOfRange {
            name: "p",
            value: p,
            range: "finite",
        });
    }
    if is_integer(p) {
        return integer_power(a, p as i32);
    }
    EigenDecomposition::new(a)?.power(p)
}

/// Several powers of one matrix, sharing a lazily built decomposition.
#[derive(Debug)]
pub struct MatrixPowers<'a> {
    a: &'a DMatrix<f64>,
    eig: OnceCell<Result<EigenDecomposition>>,
}

impl<'a> MatrixPowers<'a> {
    pub fn new(a: &'a DMatrix<f64>) -> Result<Self> {
        ensure_square(a)?;
        Ok(Self {
            a,
            eig: OnceCell::new(),
        })
    }

    pub fn power(&self, p: f64) -> Result<DMatrix<f64>> {
        if is_integer(p) {
            return integer_power(self.a, p as i32);
        }
        match self.eig.get_or_init(|| EigenDecomposition::new(self.a)) {
            Ok(eig) => eig.power(p),
            Err(e) => Err(e.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn diagonal_square_root() {
        let g2 = 0.98f64 * 0.98;
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, g2, g2, g2]));
        let r = frac_power(&a, 0.5).unwrap();
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.98, 0.98, 0.98]));
        assert!((r - expected).amax() < 1e-14);
    }

    #[test]
    fn rotation_square_root_squares_back() {
        // Complex-pair spectrum: the noisy X_{pi/2} transfer matrix.
        let a = DMatrix::from_row_slice(
            4,
            4,
            &[
                1.0, 0.0, 0.0, 0.0, //
                0.0, 0.99, 0.0, 0.0, //
                0.0, 0.0, 0.0, -0.99, //
                0.0, 0.0, 0.99, 0.0,
            ],
        );
        let r = frac_power(&a, 0.5).unwrap();
        assert!(rel_err(&(&r * &r), &a) < 1e-10);
    }

    #[test]
    fn integer_exponents_are_exact() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, -0.1, 0.9]);
        assert_eq!(frac_power(&a, 1.0).unwrap(), a);
        assert_eq!(frac_power(&a, 0.0).unwrap(), DMatrix::identity(2, 2));
        let inv = a.clone().try_inverse().unwrap();
        assert!((frac_power(&a, -1.0).unwrap() - inv).amax() < 1e-14);
        assert!((frac_power(&a, 3.0).unwrap() - &a * &a * &a).amax() < 1e-14);
    }

    #[test]
    fn negative_real_eigenvalue_is_branch_error() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -0.5]));
        match frac_power(&a, 0.5) {
            Err(Error::BranchCut { eigenvalue }) => assert!((eigenvalue.re + 0.5).abs() < 1e-12),
            other => panic!("expected branch error, got {other:?}"),
        }
        // Integer powers are unaffected.
        assert!(frac_power(&a, 2.0).is_ok());
    }

    #[test]
    fn defective_matrix_is_conditioning_error() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        match frac_power(&a, 0.5) {
            Err(Error::NearDefective { eigenvalue, .. }) => {
                assert!((eigenvalue.re - 1.0).abs() < 1e-6)
            }
            other => panic!("expected conditioning error, got {other:?}"),
        }
    }

    #[test]
    fn zero_eigenvalue_is_rejected() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0]));
        assert!(matches!(
            frac_power(&a, 0.5),
            Err(Error::ZeroEigenvalue { .. })
        ));
    }

    #[test]
    fn repeated_diagonalizable_eigenvalues() {
        let a = DMatrix::<f64>::identity(4, 4) * 0.81;
        let r = frac_power(&a, 0.5).unwrap();
        assert!((r - DMatrix::<f64>::identity(4, 4) * 0.9).amax() < 1e-14);
    }

    #[test]
    fn clustered_eigenvalues_with_tiny_coupling() {
        // Triple eigenvalue with off-diagonal noise at rounding level.
        let l = 0.950_664_580_506_006;
        let a = DMatrix::from_row_slice(
            4,
            4,
            &[
                1.0, 5.4e-16, -7.9e-17, -1.1e-16, 0.0642, l, -8.9e-16, -5.6e-17, 3.1e-16, 1.9e-15,
                l, -1.4e-15, 0.1285, -4.2e-16, 4.6e-16, l,
            ],
        );
        let half = frac_power(&a, 0.5).unwrap();
        assert!((&half * &half - &a).amax() < 1e-12);
    }

    #[test]
    fn shared_powers_match_direct() {
        let a =
            DMatrix::from_row_slice(3, 3, &[1.0, 0.03, 0.0, -0.02, 0.95, 0.01, 0.04, 0.0, 0.97]);
        let powers = MatrixPowers::new(&a).unwrap();
        for p in [-0.5, 0.25, 1.0, -1.0] {
            assert!((powers.power(p).unwrap() - frac_power(&a, p).unwrap()).amax() < 1e-14);
        }
    }
}
