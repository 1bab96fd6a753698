use super::MapTrajectory;
use crate::blocks::{eval_f_derivative, TimedMapSpec};
use crate::renewal::{ProductWeights, WaitingTimeDist};
use crate::{Error, Result};
use nalgebra::DMatrix;

/// Max-norm residual per node of
/// `Λ̇(t) = ∫₀^t f(t−τ) F(t−τ) Λ̇(τ) dτ + g(t) Ḟ(t)`,
/// which a trajectory computed with `E = 1` must satisfy. `Λ̇` is taken by
/// second-order differences (central inside, one-sided at the ends).
pub fn reset_equation_residual(f: &TimedMapSpec, w: &WaitingTimeDist, traj: &MapTrajectory) -> Result<Vec<f64>> {
    let grid = &traj.grid;
    if grid.steps() < 2 {
        return Err(Error::param("steps", "need at least 2 steps for differences"));
    }
    if f.dim() != traj.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: traj.dim() });
    }
    let h = grid.step();
    let last = grid.steps();
    let m = |k: usize| traj.maps[k].matrix();
    let dl: Vec<DMatrix<f64>> = (0..=last)
        .map(|k| {
            if k == 0 {
                (m(0) * -3.0 + m(1) * 4.0 - m(2)) / (2.0 * h)
            } else if k == last {
                (m(last) * 3.0 - m(last - 1) * 4.0 + m(last - 2)) / (2.0 * h)
            } else {
                (m(k + 1) - m(k - 1)) / (2.0 * h)
            }
        })
        .collect();
    let fs: Vec<DMatrix<f64>> = f.tabulate(grid)?.into_iter().map(|x| x.into_matrix()).collect();
    let weights = ProductWeights::new(w, grid);
    let g = weights.survival();

    let mut out = Vec::with_capacity(grid.len());
    for n in 0..=last {
        let mut rhs = eval_f_derivative(f, grid.t(n))?.matrix.into_matrix() * g[n];
        for j in 0..=n {
            let wt = weights.weight(n, j);
            if wt != 0.0 {
                rhs += &fs[n - j] * &dl[j] * wt;
            }
        }
        out.push((&dl[n] - rhs).amax());
    }
    Ok(out)
}
