use super::{EngineKind, MapTrajectory, ProcessSpec, Provenance};
use crate::blocks::{eval_f, TimedMapSpec};
use crate::linalg::{from_row_major, gemm, identity_flat, to_row_major};
use crate::qstate::TransferMatrix;
use crate::renewal::{sample_trajectory_with, trajectory_rng};
use crate::{Error, Result};

/// Trajectories per work unit. Units are summed in index order, so results
/// do not depend on the number of worker threads.
pub const MC_CHUNK: usize = 1024;

/// Sample mean of `Λ(t_n)` with entrywise standard errors.
#[derive(Clone, Debug)]
pub struct MonteCarloResult {
    pub trajectory: MapTrajectory,
    pub stderr: Vec<TransferMatrix>,
}

impl MonteCarloResult {
    /// Largest standard error over all entries and nodes.
    pub fn max_stderr(&self) -> f64 {
        self.stderr.iter().map(|m| m.matrix().amax()).fold(0.0, f64::max)
    }
}

struct Sums {
    sum: Vec<f64>,
    sq: Vec<f64>,
}

struct Sampler<'a> {
    p: &'a ProcessSpec,
    n: usize,
    e: Vec<f64>,
    /// Semigroup propagators on the grid; `None` for closed-form families.
    table: Option<Vec<Vec<f64>>>,
}

impl Sampler<'_> {
    fn f_at(&self, t: f64) -> Result<Vec<f64>> {
        Ok(to_row_major(eval_f(&self.p.map, t)?.matrix()))
    }

    fn run(&self, index: u64, seed: u64, out: &mut Sums) -> Result<()> {
        let (n, grid) = (self.n, &self.p.grid);
        let mut rng = trajectory_rng(seed, index);
        let jumps = sample_trajectory_with(&self.p.waiting, grid.t_max(), &mut rng).jump_times;
        if matches!(self.p.map, TimedMapSpec::Custom(_)) {
            if let Some(&t) = jumps.first() {
                return Err(Error::OffGrid(t));
            }
        }

        // The realisation density weights the first segment with g and the
        // later ones with f, so an ordinary renewal record s_1 < … < s_k read
        // backwards from t is an exact draw: the sample at t is
        // F(s_1) E F(s_2 − s_1) E ⋯ E F(t − s_k).
        let mut prefix = identity_flat(n);
        let mut s_last = 0.0;
        // Semigroups: anchor = prefix · F(t_{j0} − s_last), j0 the first node ≥ s_last.
        let mut anchor = (0usize, prefix.clone());
        let mut next = 0;
        let mut tmp = vec![0.0; n * n];
        let mut sample = vec![0.0; n * n];
        for node in 0..grid.len() {
            let t = grid.t(node);
            while next < jumps.len() && jumps[next] <= t {
                let s = jumps[next];
                gemm(&mut tmp, &prefix, &self.f_at(s - s_last)?, n);
                gemm(&mut prefix, &tmp, &self.e, n);
                s_last = s;
                if self.table.is_some() {
                    let j0 = grid.first_node_at_or_after(s);
                    let mut a = vec![0.0; n * n];
                    gemm(&mut a, &prefix, &self.f_at(grid.t(j0) - s)?, n);
                    anchor = (j0, a);
                }
                next += 1;
            }
            match &self.table {
                Some(table) => gemm(&mut sample, &anchor.1, &table[node - anchor.0], n),
                None => gemm(&mut sample, &prefix, &self.f_at(t - s_last)?, n),
            }
            let base = node * n * n;
            for (k, &x) in sample.iter().enumerate() {
                out.sum[base + k] += x;
                out.sq[base + k] += x * x;
            }
        }
        Ok(())
    }
}

/// Averages `F(t − t_k) E ⋯ E F(t_1)` over `n_traj` sampled jump records
/// with density `f(t − t_k) ⋯ f(t_2 − t_1) g(t_1)`. Trajectory `i` draws
/// from stream `i` of the generator seeded with `seed`.
pub fn simulate_monte_carlo(p: &ProcessSpec, n_traj: usize, seed: u64) -> Result<MonteCarloResult> {
    if n_traj == 0 {
        return Err(Error::param("n_traj", "must be at least 1"));
    }
    let n = p.dim() * p.dim();
    let table = match &p.map {
        TimedMapSpec::Semigroup(_) => Some(p.map.tabulate(&p.grid)?.iter().map(|m| to_row_major(m.matrix())).collect()),
        _ => None,
    };
    let sampler = Sampler { p, n, e: to_row_major(p.channel_matrix().matrix()), table };
    let len = p.grid.len() * n * n;

    let chunks: Vec<(usize, usize)> =
        (0..n_traj).step_by(MC_CHUNK).map(|start| (start, (start + MC_CHUNK).min(n_traj))).collect();
    let run_chunk = |&(start, end): &(usize, usize)| -> Result<Sums> {
        let mut s = Sums { sum: vec![0.0; len], sq: vec![0.0; len] };
        for i in start..end {
            sampler.run(i as u64, seed, &mut s)?;
        }
        Ok(s)
    };
    #[cfg(feature = "parallel")]
    let partial: Vec<Result<Sums>> = {
        use rayon::prelude::*;
        chunks.par_iter().map(run_chunk).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let partial: Vec<Result<Sums>> = chunks.iter().map(run_chunk).collect();

    let mut total = Sums { sum: vec![0.0; len], sq: vec![0.0; len] };
    for s in partial {
        let s = s?;
        total.sum.iter_mut().zip(&s.sum).for_each(|(a, b)| *a += b);
        total.sq.iter_mut().zip(&s.sq).for_each(|(a, b)| *a += b);
    }

    let count = n_traj as f64;
    let dim = p.dim();
    let mut maps = Vec::with_capacity(p.grid.len());
    let mut stderr = Vec::with_capacity(p.grid.len());
    for node in 0..p.grid.len() {
        let r = node * n * n..(node + 1) * n * n;
        let mean: Vec<f64> = total.sum[r.clone()].iter().map(|s| s / count).collect();
        let se: Vec<f64> = total.sq[r]
            .iter()
            .zip(&mean)
            .map(|(sq, m)| {
                if n_traj < 2 {
                    return 0.0;
                }
                let var = ((sq - count * m * m) / (count - 1.0)).max(0.0);
                (var / count).sqrt()
            })
            .collect();
        maps.push(TransferMatrix::new(dim, from_row_major(n, &mean))?);
        stderr.push(TransferMatrix::new(dim, from_row_major(n, &se))?);
    }
    let provenance = Provenance {
        engine: EngineKind::MonteCarlo,
        step: p.grid.step(),
        steps: p.grid.steps(),
        seed: Some(seed),
        n_traj: Some(n_traj),
    };
    Ok(MonteCarloResult { trajectory: MapTrajectory { grid: p.grid, maps, provenance }, stderr })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::{ChannelSpec, DephasingProfile, PauliIndex};
    use crate::renewal::{TimeGrid, WaitingTimeDist};

    #[test]
    fn no_jumps_reproduces_f() {
        let grid = TimeGrid::new(3.0, 30).unwrap();
        let map = TimedMapSpec::Dephasing(DephasingProfile::cosine(1.0).unwrap());
        let w = WaitingTimeDist::exponential(1e-9).unwrap();
        let p = ProcessSpec::new(map.clone(), ChannelSpec::Pauli(PauliIndex::X), w, grid).unwrap();
        let mc = simulate_monte_carlo(&p, 200, 3).unwrap();
        for (k, m) in mc.trajectory.maps.iter().enumerate() {
            assert!(m.max_abs_diff(&eval_f(&map, grid.t(k)).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn chunking_is_deterministic() {
        let grid = TimeGrid::new(1.0, 10).unwrap();
        let w = WaitingTimeDist::erlang(2, 3.0).unwrap();
        let p = ProcessSpec::new(TimedMapSpec::Identity { dim: 2 }, ChannelSpec::Pauli(PauliIndex::Z), w, grid).unwrap();
        let a = simulate_monte_carlo(&p, 3000, 11).unwrap();
        let b = simulate_monte_carlo(&p, 3000, 11).unwrap();
        for (x, y) in a.trajectory.maps.iter().zip(&b.trajectory.maps) {
            assert_eq!(x, y);
        }
    }
}
