use super::DensityMatrix;
use crate::{Error, Result};

/// Sum of absolute eigenvalues of a Hermitian operator.
pub fn trace_norm(op: &DensityMatrix) -> f64 {
    let m = op.matrix();
    if op.dim() == 2 {
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let b = m[(0, 1)];
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        return (mean + radius).abs() + (mean - radius).abs();
    }
    op.eigenvalues().iter().map(|x| x.abs()).sum()
}

/// `½ ‖ρ1 − ρ2‖₁`.
pub fn trace_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch { expected: rho1.dim(), found: rho2.dim() });
    }
    Ok(0.5 * trace_norm(&rho1.difference(rho2)?))
}

/// Trace distance after a qubit map `diag(1, x, y, z) (+ corner)` for an
/// initial pair with population difference `delta_p` and coherence
/// difference `delta_c = (re, im)`.
pub fn trace_distance_diagonal(x: f64, y: f64, z: f64, delta_p: f64, delta_c: (f64, f64)) -> f64 {
    let (re, im) = delta_c;
    (delta_p * delta_p * z * z + re * re * x * x + im * im * y * y).sqrt()
}
