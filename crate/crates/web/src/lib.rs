//! Browser bindings: scalar-function curves for the two worked examples and a
//! trace-distance witness for a user-chosen pair of orthogonal states.

use pwd_core::blocks::{ChannelSpec, DampingParams, DephasingProfile, PauliIndex, TimedMapSpec};
use pwd_core::engines::{assemble_lambda_damping, assemble_lambda_dephasing, solve_volterra_map, ProcessSpec};
use pwd_core::qstate::DensityMatrix;
use pwd_core::renewal::{TimeGrid, WaitingTimeDist};
use pwd_core::witness::{detect_growth, trace_distance_series, StatePair, DEFAULT_EPS_GROWTH};
use wasm_bindgen::prelude::*;

/// Cap on grid size so slider drags stay interactive.
pub const MAX_STEPS: usize = 4000;

/// Named series on a shared time axis, with growth statistics per series.
#[wasm_bindgen]
#[derive(Clone, Debug)]
pub struct Curves {
    t: Vec<f64>,
    names: Vec<String>,
    series: Vec<Vec<f64>>,
    nm: Vec<f64>,
}

#[wasm_bindgen]
impl Curves {
    pub fn t(&self) -> Vec<f64> {
        self.t.clone()
    }

    pub fn count(&self) -> usize {
        self.series.len()
    }

    pub fn name(&self, i: usize) -> String {
        self.names[i].clone()
    }

    pub fn series(&self, i: usize) -> Vec<f64> {
        self.series[i].clone()
    }

    /// Sum of positive increments of series `i`.
    pub fn nm_measure(&self, i: usize) -> f64 {
        self.nm[i]
    }

    pub fn detected(&self, i: usize) -> bool {
        self.nm[i] > 0.0
    }
}

impl Curves {
    fn new(grid: &TimeGrid, named: Vec<(String, Vec<f64>)>) -> Self {
        let nm = named.iter().map(|(_, s)| detect_growth(s, grid, DEFAULT_EPS_GROWTH).nm_measure).collect();
        let (names, series) = named.into_iter().unzip();
        Self { t: grid.nodes().collect(), names, series, nm }
    }
}

fn grid(t_max: f64, steps: usize) -> pwd_core::Result<TimeGrid> {
    TimeGrid::new(t_max, steps.clamp(2, MAX_STEPS))
}

/// `|d−|, |d+|, |q|` for `D(t) = cos t`, Erlang(3, Γ) and a σx channel.
pub fn dephasing(ratio: f64, t_max: f64, steps: usize) -> pwd_core::Result<Curves> {
    let g = grid(t_max, steps)?;
    let a = assemble_lambda_dephasing(
        &DephasingProfile::cosine(1.0)?,
        &WaitingTimeDist::erlang(3, ratio)?,
        &ChannelSpec::Pauli(PauliIndex::X),
        &g,
    )?;
    Ok(labelled(&g, &a.trajectory, &a.labels.map(|l| l.name())))
}

/// `|g−|, |g+|, |h+|` for the damping map with `γ/λ = gamma_ratio`,
/// Erlang(2, Γ) and a σx channel.
pub fn damping(gamma_ratio: f64, ratio: f64, t_max: f64, steps: usize) -> pwd_core::Result<Curves> {
    let g = grid(t_max, steps)?;
    let a = assemble_lambda_damping(
        &DampingParams::new(1.0, gamma_ratio)?,
        &WaitingTimeDist::erlang(2, ratio)?,
        &ChannelSpec::Pauli(PauliIndex::X),
        &g,
    )?;
    Ok(labelled(&g, &a.trajectory, &a.labels.map(|l| l.name())))
}

fn labelled(g: &TimeGrid, traj: &pwd_core::engines::MapTrajectory, labels: &[&str; 3]) -> Curves {
    let named = (0..3)
        .map(|k| (labels[k].to_string(), traj.entry(k + 1, k + 1).iter().map(|x| x.abs()).collect()))
        .collect();
    Curves::new(g, named)
}

/// Trace distance between the antipodal pure states along the Bloch
/// direction `(θ, φ)`, for either example at ratio `Γ/λ`.
pub fn witness(example: &str, ratio: f64, theta: f64, phi: f64, t_max: f64, steps: usize) -> pwd_core::Result<Curves> {
    let g = grid(t_max, steps)?;
    let p = match example {
        "damping" => ProcessSpec::new(
            TimedMapSpec::Damping(DampingParams::new(1.0, 3.0)?),
            ChannelSpec::Pauli(PauliIndex::X),
            WaitingTimeDist::erlang(2, ratio)?,
            g,
        )?,
        _ => ProcessSpec::new(
            TimedMapSpec::Dephasing(DephasingProfile::cosine(1.0)?),
            ChannelSpec::Pauli(PauliIndex::X),
            WaitingTimeDist::erlang(3, ratio)?,
            g,
        )?,
    };
    let traj = solve_volterra_map(&p)?;
    let (x, y, z) = (theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
    let pair = StatePair::new(DensityMatrix::from_bloch(x, y, z)?, DensityMatrix::from_bloch(-x, -y, -z)?)?;
    Ok(Curves::new(&g, vec![("D".to_string(), trace_distance_series(&traj, &pair)?)]))
}

fn js(e: pwd_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn dephasing_curves(ratio: f64, t_max: f64, steps: usize) -> Result<Curves, JsError> {
    dephasing(ratio, t_max, steps).map_err(js)
}

#[wasm_bindgen]
pub fn damping_curves(gamma_ratio: f64, ratio: f64, t_max: f64, steps: usize) -> Result<Curves, JsError> {
    damping(gamma_ratio, ratio, t_max, steps).map_err(js)
}

#[wasm_bindgen]
pub fn witness_curve(example: &str, ratio: f64, theta: f64, phi: f64, t_max: f64, steps: usize) -> Result<Curves, JsError> {
    witness(example, ratio, theta, phi, t_max, steps).map_err(js)
}
