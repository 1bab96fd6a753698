use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::WaitingTimeDist;
use crate::{Error, Result};

/// Jump times of one realisation on `[0, horizon]`.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpTrajectory {
    pub jump_times: Vec<f64>,
    pub horizon: f64,
}

impl JumpTrajectory {
    /// Number of jumps at or before `t`.
    pub fn count_until(&self, t: f64) -> usize {
        self.jump_times.partition_point(|&s| s <= t)
    }
}

/// Generator for trajectory `index` of a run seeded with `seed`. Streams are
/// disjoint, so a trajectory's draws never depend on how work is split.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn sample_trajectory_with<R: rand::Rng + ?Sized>(
    w: &WaitingTimeDist,
    horizon: f64,
    rng: &mut R,
) -> JumpTrajectory {
    let mut jump_times = Vec::new();
    let mut t = w.sample(rng);
    while t <= horizon {
        jump_times.push(t);
        t += w.sample(rng);
    }
    JumpTrajectory { jump_times, horizon }
}

pub fn sample_trajectory(w: &WaitingTimeDist, horizon: f64, seed: u64) -> Result<JumpTrajectory> {
    if !(horizon > 0.0) {
        return Err(Error::param("horizon", format!("must be positive, got {horizon}")));
    }
    Ok(sample_trajectory_with(w, horizon, &mut trajectory_rng(seed, 0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn times_are_increasing_and_inside_horizon() {
        let w = WaitingTimeDist::erlang(2, 5.0).unwrap();
        for seed in 0..50 {
            let tr = sample_trajectory(&w, 3.0, seed).unwrap();
            assert!(tr.jump_times.windows(2).all(|p| p[0] < p[1]));
            assert!(tr.jump_times.iter().all(|&t| (0.0..=3.0).contains(&t)));
        }
    }

    #[test]
    fn same_seed_same_trajectory() {
        let w = WaitingTimeDist::exponential(1.0).unwrap();
        assert_eq!(sample_trajectory(&w, 10.0, 7).unwrap(), sample_trajectory(&w, 10.0, 7).unwrap());
        assert_ne!(sample_trajectory(&w, 10.0, 7).unwrap(), sample_trajectory(&w, 10.0, 8).unwrap());
    }

    #[test]
    fn tiny_horizon_is_almost_always_empty() {
        let w = WaitingTimeDist::exponential(1.0).unwrap();
        let empty = (0..1000)
            .filter(|&s| sample_trajectory(&w, 1e-6, s).unwrap().jump_times.is_empty())
            .count();
        assert!(empty >= 999);
    }

    #[test]
    fn rejects_nonpositive_horizon() {
        let w = WaitingTimeDist::exponential(1.0).unwrap();
        assert!(sample_trajectory(&w, 0.0, 1).is_err());
    }
}
