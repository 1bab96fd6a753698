use nalgebra::DMatrix;

use super::{EngineKind, MapTrajectory, ProcessSpec, Provenance};
use crate::linalg::{from_row_major, gemm, gemm_acc, to_row_major};
use crate::qstate::TransferMatrix;
use crate::renewal::ProductWeights;
use crate::{Error, Result};

/// Marches `Λ(t) = g(t)F(t) + ∫₀^t f(t−τ) F(t−τ) E Λ(τ) dτ` forward on the
/// grid with product-integration weights. The current node enters through
/// the implicit system `(I − α₀ F(0)E) Λ_n = RHS_n`.
pub fn solve_volterra_map(p: &ProcessSpec) -> Result<MapTrajectory> {
    let weights = ProductWeights::new(&p.waiting, &p.grid);
    let n = p.dim() * p.dim();
    let e = to_row_major(p.channel_matrix().matrix());
    let f_table: Vec<Vec<f64>> = p.map.tabulate(&p.grid)?.iter().map(|m| to_row_major(m.matrix())).collect();
    let kernel: Vec<Vec<f64>> = f_table
        .iter()
        .map(|f| {
            let mut k = vec![0.0; n * n];
            gemm(&mut k, f, &e, n);
            k
        })
        .collect();

    let a0 = weights.lag_zero();
    let system = DMatrix::<f64>::identity(n, n) - from_row_major(n, &kernel[0]) * a0;
    let inverse = system.try_inverse().ok_or(Error::SingularSystem(1))?;
    let inverse = to_row_major(&inverse);

    let g = weights.survival();
    let mut lambda: Vec<Vec<f64>> = Vec::with_capacity(p.grid.len());
    lambda.push(f_table[0].clone());
    let mut rhs = vec![0.0; n * n];
    for step in 1..p.grid.len() {
        for (r, f) in rhs.iter_mut().zip(&f_table[step]) {
            *r = g[step] * f;
        }
        gemm_acc(&mut rhs, &kernel[step], &lambda[0], n, weights.origin(step));
        for j in 1..step {
            gemm_acc(&mut rhs, &kernel[step - j], &lambda[j], n, weights.interior(step - j));
        }
        let mut next = vec![0.0; n * n];
        gemm(&mut next, &inverse, &rhs, n);
        lambda.push(next);
    }

    let dim = p.dim();
    let maps = lambda
        .iter()
        .map(|l| TransferMatrix::new(dim, from_row_major(n, l)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MapTrajectory { grid: p.grid, maps, provenance: Provenance::deterministic(EngineKind::Volterra, &p.grid) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::{ChannelSpec, PauliIndex, TimedMapSpec};
    use crate::renewal::{TimeGrid, WaitingTimeDist};

    #[test]
    fn identity_family_gives_identity() {
        let grid = TimeGrid::new(3.0, 300).unwrap();
        for w in [WaitingTimeDist::exponential(2.0).unwrap(), WaitingTimeDist::erlang(3, 1.5).unwrap()] {
            let p = ProcessSpec::new(TimedMapSpec::Identity { dim: 2 }, ChannelSpec::Pauli(PauliIndex::I), w, grid).unwrap();
            let traj = solve_volterra_map(&p).unwrap();
            for m in &traj.maps {
                assert!(m.max_abs_diff(&TransferMatrix::identity(2)) < 1e-13);
            }
        }
    }

    #[test]
    fn pauli_z_jumps_give_parity_on_coherences() {
        let grid = TimeGrid::new(2.0, 8000).unwrap();
        let w = WaitingTimeDist::exponential(1.0).unwrap();
        let p = ProcessSpec::new(TimedMapSpec::Identity { dim: 2 }, ChannelSpec::Pauli(PauliIndex::Z), w, grid).unwrap();
        let traj = solve_volterra_map(&p).unwrap();
        for (k, m) in traj.maps.iter().enumerate().step_by(400) {
            let want = (-2.0 * grid.t(k)).exp();
            assert!((m.get(1, 1) - want).abs() < 1e-8, "t={}", grid.t(k));
            assert!((m.get(2, 2) - want).abs() < 1e-8);
            assert!((m.get(3, 3) - 1.0).abs() < 1e-13);
            assert!(m.tp_residual() < 1e-13);
        }
    }
}
