//! Building blocks of the piecewise dynamics: the inter-jump map families
//! `F(t)` and the jump channels `E`.

mod channel;
mod damping;
mod dephasing;
mod lindblad;
mod timed_map;

pub use channel::{channel_transfer, random_kraus_channel, ChannelSpec, PauliIndex};
pub use damping::{damping_amplitude, DampingParams};
pub use dephasing::{CustomProfile, DephasingProfile};
pub use lindblad::{lindblad_transfer_generator, JumpOperator, LindbladSpec};
pub use timed_map::{eval_f, eval_f_derivative, CustomTable, MapDerivative, Semigroup, TimedMapSpec};

use nalgebra::DMatrix;

use crate::C64;

pub(crate) fn cmat(dim: usize, entries: &[(f64, f64)]) -> DMatrix<C64> {
    DMatrix::from_row_iterator(dim, dim, entries.iter().map(|&(re, im)| C64::new(re, im)))
}

/// The qubit Pauli matrices `σx, σy, σz`.
pub fn pauli_matrices() -> [DMatrix<C64>; 3] {
    [
        cmat(2, &[(0., 0.), (1., 0.), (1., 0.), (0., 0.)]),
        cmat(2, &[(0., 0.), (0., -1.), (0., 1.), (0., 0.)]),
        cmat(2, &[(1., 0.), (0., 0.), (0., 0.), (-1., 0.)]),
    ]
}
