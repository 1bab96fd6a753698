//! Linear-algebra substrate: states, operator-basis vectorisation, transfer
//! matrices, Choi matrices, CPT validation and trace distance.
//!
//! Maps are represented by real `d² x d²` transfer matrices in the
//! Hilbert-Schmidt orthonormal basis returned by [`OperatorBasis`]; for a qubit
//! this is `{1, σx, σy, σz} / √2`, so a trace-preserving map has first row
//! `(1, 0, 0, 0)`.

mod basis;
mod choi;
mod distance;
mod state;
mod transfer;

pub use basis::OperatorBasis;
pub use choi::{choi_of, is_cpt, ChoiMatrix, CptReport, DEFAULT_PSD_TOL, DEFAULT_TP_TOL};
pub use distance::{trace_distance, trace_distance_diagonal, trace_norm};
pub use state::{from_pauli_vec, to_pauli_vec, DensityMatrix, PauliVec};
pub use transfer::{apply_map, CornerMatrix, TransferMatrix};

/// Tolerances used when a matrix is asserted to be a valid density matrix.
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const EIGEN_TOL: f64 = 1e-10;
