use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::HermitianBasis;
use super::superop::{check_unitary, Superoperator};
use crate::Result;

/// Choi matrix `(G (x) 1l)[|bell><bell|]` with the normalized Bell state
/// `|bell> = sum_i |ii> / sqrt(d)`. Trace one for trace-preserving maps.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    pub mat: DMatrix<Complex64>,
}

impl ChoiMatrix {
    /// Real eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .mat
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(f64::NAN)
    }
}

/// Builds the Choi matrix from the transfer-matrix expansion
/// `(1/d) sum_{k,l} G[k][l] B_k (x) conj(B_l)`.
pub fn choi_from_superop(g: &Superoperator) -> Result<ChoiMatrix> {
    let basis = HermitianBasis::new(g.dim())?;
    let d = basis.dim();
    let n = basis.len();
    let mut mat = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    let conj: Vec<_> = basis.elements().iter().map(|b| b.conjugate()).collect();
    for (k, bk) in basis.elements().iter().enumerate() {
        for (l, bl) in conj.iter().enumerate() {
            let w = g.matrix()[(k, l)];
            if w != 0.0 {
                mat += bk.kronecker(bl) * Complex64::new(w, 0.0);
            }
        }
    }
    mat /= Complex64::new(d as f64, 0.0);
    Ok(ChoiMatrix { mat })
}

/// Complete-positivity and trace-preservation diagnostics. Never modifies
/// the map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CptpReport {
    /// Minimum Choi eigenvalue; negative values violate complete positivity.
    pub cp_slack: f64,
    /// Largest deviation of the transfer matrix's first row from `e_0`.
    pub tp_slack: f64,
    pub tolerance: f64,
    pub is_cp: bool,
    pub is_tp: bool,
}

pub fn cptp_report(g: &Superoperator, tol: f64) -> Result<CptpReport> {
    let cp_slack = choi_from_superop(g)?.min_eigenvalue();
    let tp_slack = g.tp_slack();
    Ok(CptpReport {
        cp_slack,
        tp_slack,
        tolerance: tol,
        is_cp: cp_slack >= -tol,
        is_tp: tp_slack <= tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FidelityConvention {
    Entanglement,
    #[default]
    Average,
}

/// Both fidelity conventions for one channel/target pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateFidelity {
    pub entanglement: f64,
    pub average: f64,
}

impl GateFidelity {
    pub fn get(&self, convention: FidelityConvention) -> f64 {
        match convention {
            FidelityConvention::Entanglement => self.entanglement,
            FidelityConvention::Average => self.average,
        }
    }
}

/// Process fidelity `F_e = Tr[T_U^T G] / d^2` against the unitary `u`, and
/// the average gate fidelity `(d F_e + 1) / (d + 1)`.
pub fn gate_fidelity(g: &Superoperator, u: &DMatrix<Complex64>) -> Result<GateFidelity> {
    check_unitary(u)?;
    let basis = HermitianBasis::new(g.dim())?;
    let target = Superoperator::from_unitary(u, &basis)?;
    Ok(fidelity_against(g, &target))
}

/// As [`gate_fidelity`] with a precomputed target transfer matrix.
pub fn fidelity_against(g: &Superoperator, target: &Superoperator) -> GateFidelity {
    let d = g.dim() as f64;
    let overlap = target.matrix().component_mul(g.matrix()).sum();
    let entanglement = overlap / (d * d);
    GateFidelity {
        entanglement,
        average: (d * entanglement + 1.0) / (d + 1.0),
    }
}
