//! Routes from a process specification `(F, E, f)` to the dynamical map
//! `Λ(t)` and to state trajectories.

mod closed_form;
mod kernel;
mod master;
mod monte_carlo;
mod reset;
mod volterra;

pub use closed_form::{
    assemble_lambda_damping, assemble_lambda_dephasing, damping_corner_scalar, scalar_functional, Assembly,
};
pub(crate) use closed_form::functional_with;
pub use kernel::{integrate_budini, renewal_kernel_k, RenewalKernel};
pub use master::{initial_derivative, integrate_master_equation, StateSeries};
pub use monte_carlo::{simulate_monte_carlo, MonteCarloResult, MC_CHUNK};
pub use reset::reset_equation_residual;
pub use volterra::solve_volterra_map;

use std::fmt;

use serde::Serialize;

use crate::blocks::{channel_transfer, ChannelSpec, TimedMapSpec};
use crate::qstate::{is_cpt, CptReport, TransferMatrix};
use crate::renewal::{TimeGrid, WaitingTimeDist};
use crate::{Error, Result};

/// The triple `(F, E, f)` on a uniform grid.
#[derive(Clone, Debug)]
pub struct ProcessSpec {
    pub map: TimedMapSpec,
    pub channel: ChannelSpec,
    pub waiting: WaitingTimeDist,
    pub grid: TimeGrid,
}

impl ProcessSpec {
    pub fn new(map: TimedMapSpec, channel: ChannelSpec, waiting: WaitingTimeDist, grid: TimeGrid) -> Result<Self> {
        if map.dim() != channel.dim() {
            return Err(Error::DimensionMismatch { expected: map.dim(), found: channel.dim() });
        }
        waiting.validate()?;
        let f0 = waiting.initial_density();
        if f0 > 0.0 && grid.step() >= 2.0 / f0 {
            return Err(Error::param(
                "steps",
                format!("step {} must be below 2/f(0) = {} for the implicit solve", grid.step(), 2.0 / f0),
            ));
        }
        Ok(Self { map, channel, waiting, grid })
    }

    pub fn dim(&self) -> usize {
        self.map.dim()
    }

    pub fn channel_matrix(&self) -> TransferMatrix {
        channel_transfer(&self.channel)
    }

    pub fn with_grid(&self, grid: TimeGrid) -> Result<Self> {
        Self::new(self.map.clone(), self.channel.clone(), self.waiting, grid)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    Volterra,
    MonteCarlo,
    ClosedForm,
    MasterEquation,
    Budini,
    /// `F(t)` alone, without jumps.
    Free,
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Volterra => "volterra",
            Self::MonteCarlo => "monte_carlo",
            Self::ClosedForm => "closed_form",
            Self::MasterEquation => "master_equation",
            Self::Budini => "budini",
            Self::Free => "free",
        })
    }
}

/// How a trajectory was produced.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub engine: EngineKind,
    pub step: f64,
    pub steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_traj: Option<usize>,
}

impl Provenance {
    pub(crate) fn deterministic(engine: EngineKind, grid: &TimeGrid) -> Self {
        Self { engine, step: grid.step(), steps: grid.steps(), seed: None, n_traj: None }
    }
}

/// `Λ(t_n)` at every grid node.
#[derive(Clone, Debug)]
pub struct MapTrajectory {
    pub grid: TimeGrid,
    pub maps: Vec<TransferMatrix>,
    pub provenance: Provenance,
}

impl MapTrajectory {
    /// The jump-free evolution `F(t_n)`.
    pub fn free(map: &TimedMapSpec, grid: TimeGrid) -> Result<Self> {
        Ok(Self { maps: map.tabulate(&grid)?, provenance: Provenance::deterministic(EngineKind::Free, &grid), grid })
    }

    pub fn dim(&self) -> usize {
        self.maps[0].dim()
    }

    /// Series of one matrix entry.
    pub fn entry(&self, i: usize, j: usize) -> Vec<f64> {
        self.maps.iter().map(|m| m.get(i, j)).collect()
    }

    /// Largest entrywise difference over all nodes.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.maps.iter().zip(&other.maps).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max)
    }

    /// Copy with `w` added to the bottom-left corner of every node.
    pub fn with_corner(&self, w: f64) -> Self {
        let mut out = self.clone();
        for m in &mut out.maps {
            let mut x = m.matrix().clone();
            let last = x.nrows() - 1;
            x[(last, 0)] += w;
            *m = TransferMatrix::new(m.dim(), x).expect("same shape");
        }
        out
    }

    /// Worst CPT report over the nodes, by minimum Choi eigenvalue and TP residual.
    pub fn cpt_summary(&self, tol_psd: f64, tol_tp: f64) -> CptReport {
        let mut worst = CptReport { completely_positive: true, trace_preserving: true, min_eigenvalue: f64::INFINITY, tp_residual: 0.0 };
        for m in &self.maps {
            let r = is_cpt(m, tol_psd, tol_tp);
            worst.completely_positive &= r.completely_positive;
            worst.trace_preserving &= r.trace_preserving;
            worst.min_eigenvalue = worst.min_eigenvalue.min(r.min_eigenvalue);
            worst.tp_residual = worst.tp_residual.max(r.tp_residual);
        }
        worst
    }
}

/// Names of the scalar functions built from `L±_f[M]`:
/// `d± = L±[D]`, `q = L+[1]`, `1 = L−[1]`, `g± = L±[G]`, `h± = L±[G²]`,
/// the corner `W` and the renewal kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarLabel {
    DPlus,
    DMinus,
    Q,
    One,
    GPlus,
    GMinus,
    HPlus,
    HMinus,
    W,
    Kernel,
    /// `L±[M]` for a user-supplied `M`.
    Functional,
}

impl ScalarLabel {
    pub fn name(self) -> &'static str {
        match self {
            Self::DPlus => "d_plus",
            Self::DMinus => "d_minus",
            Self::Q => "q",
            Self::One => "one",
            Self::GPlus => "g_plus",
            Self::GMinus => "g_minus",
            Self::HPlus => "h_plus",
            Self::HMinus => "h_minus",
            Self::W => "w",
            Self::Kernel => "kernel",
            Self::Functional => "functional",
        }
    }
}

impl fmt::Display for ScalarLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarSolution {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
    pub label: ScalarLabel,
}

/// Sign of a functional: `L+` solves `x + (fM)∗x = gM`, `L−` solves `x − (fM)∗x = gM`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Self::Plus => 1.0,
            Self::Minus => -1.0,
        }
    }

    /// Sign selected by a channel eigenvalue `ε`: the entry `ĝM/(1 − εf̂M)`
    /// is `L−[M]` for `ε = +1` and `L+[M]` for `ε = −1`.
    pub fn for_channel_sign(eps: f64) -> Self {
        if eps > 0.0 {
            Self::Minus
        } else {
            Self::Plus
        }
    }
}
