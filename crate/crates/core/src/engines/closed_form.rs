use super::{solve_volterra_map, EngineKind, MapTrajectory, ProcessSpec, Provenance, ScalarLabel, ScalarSolution, Sign};
use crate::blocks::{ChannelSpec, DampingParams, DephasingProfile, PauliIndex, TimedMapSpec};
use crate::qstate::TransferMatrix;
use crate::renewal::{ProductWeights, TimeGrid, WaitingTimeDist};
use crate::{Error, Result};

/// Diagonal-plus-corner map assembled from scalar functionals, with the
/// label of the function sitting in each of the `(x, y, z)` diagonal slots.
#[derive(Clone, Debug)]
pub struct Assembly {
    pub trajectory: MapTrajectory,
    pub labels: [ScalarLabel; 3],
    /// Max difference between the corner from the matrix solve and from its
    /// scalar equation (damping only).
    pub corner_check: Option<f64>,
}

pub(crate) fn functional_with(weights: &ProductWeights, sign: Sign, m: &[f64]) -> Result<Vec<f64>> {
    let rhs: Vec<f64> = weights.survival().iter().zip(m).map(|(g, m)| g * m).collect();
    weights.solve_scalar(-sign.value(), m, &rhs).ok_or(Error::SingularSystem(1))
}

/// `L±_f[M]`: solves `x(t) ± ∫₀^t f(t−τ) M(t−τ) x(τ) dτ = g(t) M(t)` with the
/// same quadrature as the matrix solver. `m` is `M` tabulated on `grid`.
pub fn scalar_functional(
    sign: Sign,
    m: &[f64],
    w: &WaitingTimeDist,
    grid: &TimeGrid,
    label: ScalarLabel,
) -> Result<ScalarSolution> {
    if m.len() != grid.len() {
        return Err(Error::DimensionMismatch { expected: grid.len(), found: m.len() });
    }
    let values = functional_with(&ProductWeights::new(w, grid), sign, m)?;
    Ok(ScalarSolution { grid: *grid, values, label })
}

fn pauli_of(channel: &ChannelSpec) -> Result<PauliIndex> {
    channel.pauli_index().ok_or(Error::NonPauliChannel)
}

fn label(sign: Sign, plus: ScalarLabel, minus: ScalarLabel) -> ScalarLabel {
    match sign {
        Sign::Plus => plus,
        Sign::Minus => minus,
    }
}

fn provenance(grid: &TimeGrid) -> Provenance {
    Provenance::deterministic(EngineKind::ClosedForm, grid)
}

/// `Λ_d(t) = diag(1, X, Y, Z)` for `F_d = diag(1, D, D, 1)` and a Pauli jump
/// channel. Slot `i` holds `L−[M_i]` when `ε_i = +1` and `L+[M_i]` when
/// `ε_i = −1`, with `M = (D, D, 1)`.
pub fn assemble_lambda_dephasing(
    d: &DephasingProfile,
    w: &WaitingTimeDist,
    channel: &ChannelSpec,
    grid: &TimeGrid,
) -> Result<Assembly> {
    let eps = pauli_of(channel)?.signs();
    let weights = ProductWeights::new(w, grid);
    let dv: Vec<f64> = grid.nodes().map(|t| d.value(t)).collect();
    let ones = vec![1.0; grid.len()];

    let sx = Sign::for_channel_sign(eps[0]);
    let sy = Sign::for_channel_sign(eps[1]);
    let sz = Sign::for_channel_sign(eps[2]);
    let x = functional_with(&weights, sx, &dv)?;
    let y = if sy == sx { x.clone() } else { functional_with(&weights, sy, &dv)? };
    let z = functional_with(&weights, sz, &ones)?;
    let labels = [
        label(sx, ScalarLabel::DPlus, ScalarLabel::DMinus),
        label(sy, ScalarLabel::DPlus, ScalarLabel::DMinus),
        label(sz, ScalarLabel::Q, ScalarLabel::One),
    ];
    let maps = (0..grid.len())
        .map(|n| TransferMatrix::from_diagonal(2, &[1.0, x[n], y[n], z[n]]))
        .collect::<Result<Vec<_>>>()?;
    Ok(Assembly { trajectory: MapTrajectory { grid: *grid, maps, provenance: provenance(grid) }, labels, corner_check: None })
}

/// Corner `W` of the damping map from its own scalar equation, read off the
/// `(z, 0)` row of the matrix equation:
/// `W − ε_z (f G²) ∗ W = g (G² − 1) + (f (G² − 1)) ∗ 1`.
pub fn damping_corner_scalar(
    params: &DampingParams,
    w: &WaitingTimeDist,
    channel: &ChannelSpec,
    grid: &TimeGrid,
) -> Result<ScalarSolution> {
    let ez = pauli_of(channel)?.signs()[2];
    let weights = ProductWeights::new(w, grid);
    let g2: Vec<f64> = grid.nodes().map(|t| params.amplitude(t).powi(2)).collect();
    let shifted: Vec<f64> = g2.iter().map(|x| x - 1.0).collect();
    let mut rhs: Vec<f64> = weights.survival().iter().zip(&shifted).map(|(g, s)| g * s).collect();
    for (n, r) in rhs.iter_mut().enumerate().skip(1) {
        *r += (0..=n).map(|j| weights.weight(n, j) * shifted[n - j]).sum::<f64>();
    }
    let values = weights.solve_scalar(ez, &g2, &rhs).ok_or(Error::SingularSystem(1))?;
    Ok(ScalarSolution { grid: *grid, values, label: ScalarLabel::W })
}

/// `Λ₊(t) = diag(1, X, Y, Z) + B(W)` for the damping family and a Pauli jump
/// channel. `X, Y` are `g± = L±[G]` and `Z` is `h± = L±[G²]`, signs fixed
/// as in [`assemble_lambda_dephasing`]. `W` is taken from the matrix solve
/// and compared with [`damping_corner_scalar`].
pub fn assemble_lambda_damping(
    params: &DampingParams,
    w: &WaitingTimeDist,
    channel: &ChannelSpec,
    grid: &TimeGrid,
) -> Result<Assembly> {
    params.validate()?;
    let eps = pauli_of(channel)?.signs();
    let weights = ProductWeights::new(w, grid);
    let gv: Vec<f64> = grid.nodes().map(|t| params.amplitude(t)).collect();
    let g2: Vec<f64> = gv.iter().map(|g| g * g).collect();

    let sx = Sign::for_channel_sign(eps[0]);
    let sy = Sign::for_channel_sign(eps[1]);
    let sz = Sign::for_channel_sign(eps[2]);
    let x = functional_with(&weights, sx, &gv)?;
    let y = if sy == sx { x.clone() } else { functional_with(&weights, sy, &gv)? };
    let z = functional_with(&weights, sz, &g2)?;
    let labels = [
        label(sx, ScalarLabel::GPlus, ScalarLabel::GMinus),
        label(sy, ScalarLabel::GPlus, ScalarLabel::GMinus),
        label(sz, ScalarLabel::HPlus, ScalarLabel::HMinus),
    ];

    let matrix = solve_volterra_map(&ProcessSpec::new(TimedMapSpec::Damping(*params), channel.clone(), *w, *grid)?)?;
    let corner = matrix.entry(3, 0);
    let scalar = damping_corner_scalar(params, w, channel, grid)?;
    let check = corner.iter().zip(&scalar.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    let maps = (0..grid.len())
        .map(|n| TransferMatrix::diagonal_plus_corner(x[n], y[n], z[n], corner[n]))
        .collect();
    Ok(Assembly {
        trajectory: MapTrajectory { grid: *grid, maps, provenance: provenance(grid) },
        labels,
        corner_check: Some(check),
    })
}
