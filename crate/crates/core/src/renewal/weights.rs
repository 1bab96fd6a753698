use super::{TimeGrid, WaitingTimeDist};

const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// 8-point Gauss-Legendre rule on `[a, b]`.
fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
        acc += w * (f(c - r * x) + f(c + r * x));
    }
    acc * r
}

/// Product-integration weights for `∫₀^{t_n} f(t_n − τ) y(τ) dτ` with `y`
/// interpolated linearly between grid nodes and `f` integrated exactly
/// against each hat function.
///
/// For every `n` the weights are non-negative and sum to `1 − g(t_n)`, so a
/// Volterra solve built on them keeps `g + f∗1 = 1` on the grid.
#[derive(Clone, Debug)]
pub struct ProductWeights {
    grid: TimeGrid,
    /// `∫_cell f(u) (t_{m+1} − u)/h du` on cell `[t_m, t_{m+1}]`.
    alpha: Vec<f64>,
    /// `∫_cell f(u) (u − t_m)/h du`.
    beta: Vec<f64>,
    survival: Vec<f64>,
}

impl ProductWeights {
    pub fn new(w: &WaitingTimeDist, grid: &TimeGrid) -> Self {
        let h = grid.step();
        let survival: Vec<f64> = grid.nodes().map(|t| w.sf(t)).collect();
        let mut alpha = Vec::with_capacity(grid.steps());
        let mut beta = Vec::with_capacity(grid.steps());
        for m in 0..grid.steps() {
            let t0 = grid.t(m);
            let mass = survival[m] - survival[m + 1];
            let b = gauss_legendre(|s| w.pdf(t0 + s) * s / h, 0.0, h);
            beta.push(b);
            alpha.push(mass - b);
        }
        Self { grid: *grid, alpha, beta, survival }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Survival probability at each node.
    pub fn survival(&self) -> &[f64] {
        &self.survival
    }

    /// Weight of the current node `j = n` (lag 0), the implicit term.
    pub fn lag_zero(&self) -> f64 {
        self.alpha[0]
    }

    /// Weight of node `j` in the integral up to node `n` (lag `m = n − j`).
    #[inline]
    pub fn weight(&self, n: usize, j: usize) -> f64 {
        debug_assert!(j <= n && n <= self.grid.steps());
        let m = n - j;
        let mut w = 0.0;
        if m >= 1 {
            w += self.beta[m - 1];
        }
        if m < n {
            w += self.alpha[m];
        }
        w
    }

    /// All weights for node `n`, indexed by `j = 0..=n`.
    pub fn row(&self, n: usize) -> Vec<f64> {
        (0..=n).map(|j| self.weight(n, j)).collect()
    }

    /// Interior weight for lag `m` (`1 ≤ m < n`).
    #[inline]
    pub(crate) fn interior(&self, m: usize) -> f64 {
        self.beta[m - 1] + self.alpha[m]
    }

    /// Weight of the `j = 0` node for `n ≥ 1`.
    #[inline]
    pub(crate) fn origin(&self, n: usize) -> f64 {
        self.beta[n - 1]
    }
}


impl ProductWeights {
    /// `(f ∗ y)(t_n)` for every node, `y` tabulated on the grid.
    pub fn convolve(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.grid.len());
        let mut out = vec![0.0; y.len()];
        for n in 1..y.len() {
            let mut acc = self.origin(n) * y[0] + self.lag_zero() * y[n];
            for j in 1..n {
                acc += self.interior(n - j) * y[j];
            }
            out[n] = acc;
        }
        out
    }

    /// Solves `x(t) − s ∫₀^t f(t−τ) m(t−τ) x(τ) dτ = rhs(t)` on the grid,
    /// with `m` and `rhs` tabulated. Returns `None` if the implicit
    /// coefficient `1 − s·α₀·m(0)` vanishes.
    pub fn solve_scalar(&self, sign: f64, m: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
        let len = self.grid.len();
        assert!(m.len() == len && rhs.len() == len);
        let diag = 1.0 - sign * self.lag_zero() * m[0];
        if diag == 0.0 || !diag.is_finite() {
            return None;
        }
        let mut x = vec![0.0; len];
        x[0] = rhs[0];
        for n in 1..len {
            let mut acc = self.origin(n) * m[n] * x[0];
            for j in 1..n {
                acc += self.interior(n - j) * m[n - j] * x[j];
            }
            x[n] = (rhs[n] + sign * acc) / diag;
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_sum_to_cdf_and_are_nonnegative() {
        for w in [
            WaitingTimeDist::exponential(3.0).unwrap(),
            WaitingTimeDist::erlang(2, 1.0).unwrap(),
            WaitingTimeDist::erlang(3, 25.0).unwrap(),
        ] {
            let grid = TimeGrid::new(4.0, 40).unwrap();
            let pw = ProductWeights::new(&w, &grid);
            for n in 1..=40 {
                let row = pw.row(n);
                assert!(row.iter().all(|&x| x >= -1e-17), "{w:?} n={n}");
                let s: f64 = row.iter().sum();
                assert!((s + pw.survival()[n] - 1.0).abs() < 1e-14, "{w:?} n={n}");
            }
        }
    }

    #[test]
    fn integrates_linear_functions_exactly() {
        // ∫₀^t f(t−τ) τ dτ for the exponential: t − (1 − e^{−t})
        let w = WaitingTimeDist::exponential(1.0).unwrap();
        let grid = TimeGrid::new(2.0, 7).unwrap();
        let pw = ProductWeights::new(&w, &grid);
        for n in 1..=7 {
            let t = grid.t(n);
            let approx: f64 = (0..=n).map(|j| pw.weight(n, j) * grid.t(j)).sum();
            let exact = t - (1.0 - (-t).exp());
            assert!((approx - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn lag_zero_approaches_half_step_density() {
        let w = WaitingTimeDist::exponential(2.0).unwrap();
        let grid = TimeGrid::new(1.0, 1000).unwrap();
        let pw = ProductWeights::new(&w, &grid);
        assert!((pw.lag_zero() - 0.5 * grid.step() * 2.0).abs() < 1e-5);
    }
}
