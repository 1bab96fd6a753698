//! Versioned JSON run configuration and its translation into engine inputs.

use nalgebra::DMatrix;
use pwd_core::blocks::{
    pauli_matrices, random_kraus_channel, ChannelSpec, DampingParams, DephasingProfile, LindbladSpec, PauliIndex,
    TimedMapSpec,
};
use pwd_core::engines::ProcessSpec;
use pwd_core::qstate::DensityMatrix;
use pwd_core::renewal::{TimeGrid, WaitingTimeDist};
use pwd_core::witness::{DEFAULT_EPS_GROWTH, DEFAULT_RANDOM_PAIRS};
use pwd_core::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub map: MapConfig,
    pub channel: ChannelConfig,
    pub waiting_time: WaitingConfig,
    pub grid: GridConfig,
    pub engine: EngineConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<InitialState>,
    #[serde(default)]
    pub witness: WitnessConfig,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapConfig {
    Identity,
    Dephasing { profile: ProfileConfig },
    Damping { lambda: f64, gamma: f64 },
    /// `H = ω σz / 2` plus named jump operators.
    Semigroup {
        #[serde(default)]
        omega: f64,
        #[serde(default)]
        jumps: Vec<JumpConfig>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    Cosine { frequency: f64 },
    Exponential { rate: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpConfig {
    pub rate: f64,
    pub operator: NamedOperator,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedOperator {
    SigmaX,
    SigmaY,
    SigmaZ,
    /// `|0⟩⟨1|`
    SigmaMinus,
    /// `|1⟩⟨0|`
    SigmaPlus,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelConfig {
    Pauli { index: PauliIndex },
    AmplitudeDamping { p: f64 },
    /// Each operator is a row-major list of rows of `[re, im]` pairs.
    Kraus { operators: Vec<Vec<Vec<[f64; 2]>>> },
    RandomKraus { rank: usize, seed: u64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WaitingConfig {
    Exponential { rate: f64 },
    Erlang { stages: u32, rate: f64 },
    /// No jumps at all: the run reports `F(t)` itself.
    None,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t_max: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EngineConfig {
    Volterra,
    MonteCarlo { n_traj: usize, seed: u64 },
    ClosedForm,
    MasterEquation,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    pub bloch: [f64; 3],
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WitnessConfig {
    pub random_pairs: usize,
    pub seed: u64,
    pub eps_growth: f64,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        Self { random_pairs: DEFAULT_RANDOM_PAIRS, seed: 0, eps_growth: DEFAULT_EPS_GROWTH }
    }
}

/// Engine inputs built from a config.
pub struct Resolved {
    pub map: TimedMapSpec,
    pub channel: ChannelSpec,
    pub waiting: Option<WaitingTimeDist>,
    pub grid: TimeGrid,
    pub rho0: Option<DensityMatrix>,
}

impl Resolved {
    /// `None` for jump-free runs.
    pub fn process(&self) -> Result<Option<ProcessSpec>, CliError> {
        self.waiting
            .map(|w| ProcessSpec::new(self.map.clone(), self.channel.clone(), w, self.grid))
            .transpose()
            .map_err(|e| CliError::config("process", e))
    }
}

pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config(format!("{path}: {}", e.into_inner()))
    })?;
    if cfg.version != SCHEMA_VERSION {
        return Err(CliError::Config(format!("version: unsupported schema version {} (expected {SCHEMA_VERSION})", cfg.version)));
    }
    Ok(cfg)
}

fn named(op: NamedOperator) -> DMatrix<C64> {
    let [x, y, z] = pauli_matrices();
    let one = C64::new(1.0, 0.0);
    match op {
        NamedOperator::SigmaX => x,
        NamedOperator::SigmaY => y,
        NamedOperator::SigmaZ => z,
        NamedOperator::SigmaMinus => DMatrix::from_row_slice(2, 2, &[C64::default(), one, C64::default(), C64::default()]),
        NamedOperator::SigmaPlus => DMatrix::from_row_slice(2, 2, &[C64::default(), C64::default(), one, C64::default()]),
    }
}

pub fn resolve(cfg: &RunConfig) -> Result<Resolved, CliError> {
    let map = match &cfg.map {
        MapConfig::Identity => TimedMapSpec::Identity { dim: 2 },
        MapConfig::Dephasing { profile } => TimedMapSpec::Dephasing(
            match *profile {
                ProfileConfig::Cosine { frequency } => DephasingProfile::cosine(frequency),
                ProfileConfig::Exponential { rate } => DephasingProfile::exponential(rate),
            }
            .map_err(|e| CliError::config("map.profile", e))?,
        ),
        MapConfig::Damping { lambda, gamma } => {
            TimedMapSpec::Damping(DampingParams::new(*lambda, *gamma).map_err(|e| CliError::config("map", e))?)
        }
        MapConfig::Semigroup { omega, jumps } => {
            let mut l = LindbladSpec::precession(*omega);
            for (k, j) in jumps.iter().enumerate() {
                l = l.with_jump(j.rate, named(j.operator)).map_err(|e| CliError::config(&format!("map.jumps[{k}]"), e))?;
            }
            TimedMapSpec::semigroup(l)
        }
    };
    let channel = match &cfg.channel {
        ChannelConfig::Pauli { index } => ChannelSpec::Pauli(*index),
        ChannelConfig::AmplitudeDamping { p } => {
            ChannelSpec::amplitude_damping(*p).map_err(|e| CliError::config("channel.p", e))?
        }
        ChannelConfig::Kraus { operators } => {
            let ops = operators
                .iter()
                .enumerate()
                .map(|(k, rows)| {
                    let n = rows.len();
                    if n == 0 || rows.iter().any(|r| r.len() != n) {
                        return Err(CliError::Config(format!("channel.operators[{k}]: must be a non-empty square matrix")));
                    }
                    Ok(DMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
                })
                .collect::<Result<Vec<_>, _>>()?;
            ChannelSpec::kraus(ops).map_err(|e| CliError::config("channel.operators", e))?
        }
        ChannelConfig::RandomKraus { rank, seed } => {
            random_kraus_channel(2, *rank, &mut ChaCha8Rng::seed_from_u64(*seed))
                .map_err(|e| CliError::config("channel.rank", e))?
        }
    };
    let waiting = match cfg.waiting_time {
        WaitingConfig::Exponential { rate } => Some(WaitingTimeDist::exponential(rate)),
        WaitingConfig::Erlang { stages, rate } => Some(WaitingTimeDist::erlang(stages, rate)),
        WaitingConfig::None => None,
    }
    .transpose()
    .map_err(|e| CliError::config("waiting_time", e))?;
    let grid = TimeGrid::new(cfg.grid.t_max, cfg.grid.steps).map_err(|e| CliError::config("grid", e))?;
    if cfg.grid.steps < 2 {
        return Err(CliError::Config("grid.steps: must be at least 2".into()));
    }
    let rho0 = cfg
        .initial_state
        .map(|s| DensityMatrix::from_bloch(s.bloch[0], s.bloch[1], s.bloch[2]))
        .transpose()
        .map_err(|e| CliError::config("initial_state.bloch", e))?;
    if !(cfg.witness.eps_growth >= 0.0) {
        return Err(CliError::Config("witness.eps_growth: must be non-negative".into()));
    }
    if let EngineConfig::MonteCarlo { n_traj: 0, .. } = cfg.engine {
        return Err(CliError::Config("engine.n_traj: must be positive".into()));
    }
    Ok(Resolved { map, channel, waiting, grid, rho0 })
}
