use super::{ProductWeights, TimeGrid, WaitingTimeDist};

pub const DEFAULT_K_MAX: usize = 40;

/// Counting probabilities `p_k(t_n)` for `k = 0..=k_max`.
#[derive(Clone, Debug)]
pub struct CountingTable {
    grid: TimeGrid,
    p: Vec<Vec<f64>>,
}

impl CountingTable {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn k_max(&self) -> usize {
        self.p.len() - 1
    }

    pub fn p(&self, k: usize, n: usize) -> f64 {
        self.p[k][n]
    }

    /// Series `p_k(t_n)` over the grid.
    pub fn series(&self, k: usize) -> &[f64] {
        &self.p[k]
    }

    /// `Σ_{k ≤ k_max} p_k(t_n)`.
    pub fn total(&self, n: usize) -> f64 {
        self.p.iter().map(|row| row[n]).sum()
    }

    /// Truncated alternating sum `Σ_k (−1)^k p_k(t_n)`.
    pub fn parity_sum(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|n| {
                self.p
                    .iter()
                    .enumerate()
                    .map(|(k, row)| if k % 2 == 0 { row[n] } else { -row[n] })
                    .sum()
            })
            .collect()
    }
}

/// `p_0 = g`, `p_k = f ∗ p_{k−1}` by product integration.
pub fn counting_probabilities(w: &WaitingTimeDist, grid: &TimeGrid, k_max: usize) -> CountingTable {
    let weights = ProductWeights::new(w, grid);
    let mut p = Vec::with_capacity(k_max + 1);
    p.push(weights.survival().to_vec());
    for k in 1..=k_max {
        let next = weights.convolve(&p[k - 1]);
        p.push(next);
    }
    CountingTable { grid: *grid, p }
}

/// Parity function from `q + f ∗ q = g`; `q(0) = 1`.
pub fn parity_q(w: &WaitingTimeDist, grid: &TimeGrid) -> Vec<f64> {
    let weights = ProductWeights::new(w, grid);
    parity_q_with(&weights)
}

pub(crate) fn parity_q_with(weights: &ProductWeights) -> Vec<f64> {
    let ones = vec![1.0; weights.grid().len()];
    weights
        .solve_scalar(-1.0, &ones, weights.survival())
        .expect("1 + α₀ is positive")
}
