//! Renewal statistics of the jump events: waiting-time densities, survival
//! probabilities, counting probabilities `p_k(t)`, the parity function
//! `q(t) = Σ_k (-1)^k p_k(t)` and seeded trajectory sampling.

mod counting;
mod dist;
mod grid;
mod sampling;
mod weights;

pub use counting::{counting_probabilities, parity_q, CountingTable, DEFAULT_K_MAX};
pub use dist::WaitingTimeDist;
pub use grid::TimeGrid;
pub use sampling::{sample_trajectory, sample_trajectory_with, trajectory_rng, JumpTrajectory};
pub use weights::ProductWeights;
