//! Completely positive, trace-preserving dynamical maps assembled from
//! piecewise dynamics: a continuous evolution `F(t)` interrupted by a quantum
//! channel `E` applied at the event times of a renewal process with waiting
//! time density `f(t)`.
//!
//! The crate is organised bottom-up:
//!
//! - [`qstate`]: density matrices, operator-basis vectorisation, transfer and
//!   Choi matrices, CPT checks, trace distance.
//! - [`renewal`]: waiting-time distributions, counting statistics, the parity
//!   function `q(t)` and trajectory sampling.
//! - [`blocks`]: the inter-jump map families and the jump channels.
//! - [`engines`]: the four routes to `Λ(t)` (Volterra quadrature, Monte Carlo,
//!   closed-form scalar assembly, memory-kernel master equation) and the
//!   limiting-case kernels.
//! - [`witness`]: trace-distance non-Markovianity detection and parameter
//!   surfaces.
//! - [`validation`]: the self-check suite behind `pwd validate`.

pub mod blocks;
pub mod engines;
pub mod error;
pub(crate) mod linalg;
pub mod qstate;
pub mod renewal;
pub mod validation;
pub mod witness;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
