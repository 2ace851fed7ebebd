//! Hilbert-Schmidt representation of states, effects and channels.
//!
//! Operators are expanded in an orthonormal Hermitian basis whose first
//! element is `1l / sqrt(d)`. States become real column vectors, effects real
//! row vectors, and channels real `d^2 x d^2` transfer matrices. With this
//! ordering a map is trace preserving exactly when the first row of its
//! transfer matrix is `(1, 0, ..., 0)`.

mod basis;
mod channel;
mod states;
mod superop;
mod vector;

pub use basis::{hs_inner, HermitianBasis};
pub use channel::{
    choi_from_superop, cptp_report, fidelity_against, gate_fidelity, ChoiMatrix, CptpReport,
    FidelityConvention, GateFidelity,
};
pub use states::{
    ket_to_density, pauli_x, pauli_y, pauli_z, rotated_state, x_half_pi, Outcome, PauliAxis,
    PauliState,
};
pub use superop::Superoperator;
pub use vector::{born_probability, devectorize, vectorize, HsVector, VectorKind};
