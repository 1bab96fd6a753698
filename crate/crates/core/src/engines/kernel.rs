use nalgebra::{DMatrix, DVector};

use super::{ScalarLabel, ScalarSolution, StateSeries};
use crate::blocks::{channel_transfer, lindblad_transfer_generator, ChannelSpec, LindbladSpec};
use crate::linalg::{from_row_major, gemv_acc, to_row_major};
use crate::qstate::{to_pauli_vec, DensityMatrix};
use crate::renewal::{ProductWeights, TimeGrid, WaitingTimeDist};
use crate::{Error, Result};

/// Renewal kernel `k` with `k̂ = f̂/ĝ`, split as `k = point_mass·δ(t) + regular(t)`.
#[derive(Clone, Debug)]
pub struct RenewalKernel {
    pub regular: ScalarSolution,
    pub point_mass: f64,
}

/// Solves `k_r − f ∗ k_r = f′ + f(0) f` for the regular part; the point
/// mass is `f(0)`. Follows from `k̂ = u f̂ + k̂ f̂` after separating the delta.
pub fn renewal_kernel_k(w: &WaitingTimeDist, grid: &TimeGrid) -> Result<RenewalKernel> {
    w.validate()?;
    let weights = ProductWeights::new(w, grid);
    let f0 = w.initial_density();
    let rhs: Vec<f64> = grid.nodes().map(|t| w.dpdf(t) + f0 * w.pdf(t)).collect();
    let ones = vec![1.0; grid.len()];
    let values = weights.solve_scalar(1.0, &ones, &rhs).ok_or(Error::SingularSystem(1))?;
    Ok(RenewalKernel { regular: ScalarSolution { grid: *grid, values, label: ScalarLabel::Kernel }, point_mass: f0 })
}

/// Integrates `dρ/dt = ℒρ + ∫₀^t k(t−τ) e^{(t−τ)ℒ} (E − 1) ρ(τ) dτ`. The
/// point mass of `k` contributes `f(0)(E − 1)ρ(t)`; the regular part is
/// convolved with the trapezoidal rule and the step is implicit trapezoidal.
pub fn integrate_budini(
    l: &LindbladSpec,
    channel: &ChannelSpec,
    w: &WaitingTimeDist,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
) -> Result<StateSeries> {
    let dim = l.dim();
    if channel.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: channel.dim() });
    }
    if rho0.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: rho0.dim() });
    }
    let n = dim * dim;
    let h = grid.step();
    let gen = lindblad_transfer_generator(l).into_matrix();
    let jump = channel_transfer(channel).into_matrix() - DMatrix::<f64>::identity(n, n);
    let kernel = renewal_kernel_k(w, grid)?;

    let b: Vec<Vec<f64>> = grid
        .nodes()
        .zip(&kernel.regular.values)
        .map(|(t, &k)| to_row_major(&((&gen * t).exp() * &jump * k)))
        .collect();
    let inst = &gen + &jump * kernel.point_mass;
    let inst_flat = to_row_major(&inst);
    let system = DMatrix::<f64>::identity(n, n) - (&inst + from_row_major(n, &b[0]) * (0.5 * h)) * (0.5 * h);
    let lu = system.lu();
    if !lu.is_invertible() {
        return Err(Error::SingularSystem(1));
    }

    let y0 = to_pauli_vec(rho0).into_coeffs();
    let mut ys: Vec<Vec<f64>> = vec![y0.as_slice().to_vec()];
    let mut r_prev = vec![0.0; n];
    gemv_acc(&mut r_prev, &inst_flat, &ys[0], n, 1.0);
    for step in 0..grid.steps() {
        let next = step + 1;
        let mut conv = vec![0.0; n];
        gemv_acc(&mut conv, &b[next], &ys[0], n, 0.5 * h);
        for j in 1..next {
            gemv_acc(&mut conv, &b[next - j], &ys[j], n, h);
        }
        let known: Vec<f64> = (0..n).map(|i| ys[step][i] + 0.5 * h * (r_prev[i] + conv[i])).collect();
        let y_next = lu.solve(&DVector::from_vec(known)).ok_or(Error::SingularSystem(next))?;
        let y_next = y_next.as_slice().to_vec();
        let mut r = conv;
        gemv_acc(&mut r, &inst_flat, &y_next, n, 1.0);
        gemv_acc(&mut r, &b[0], &y_next, n, 0.5 * h);
        r_prev = r;
        ys.push(y_next);
    }
    Ok(StateSeries { grid: *grid, dim, coeffs: ys.into_iter().map(DVector::from_vec).collect() })
}
