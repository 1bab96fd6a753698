//! Subcommand implementations.

use std::path::Path;
use std::time::Instant;

use nalgebra::DVector;
use pwd_core::engines::{
    assemble_lambda_damping, assemble_lambda_dephasing, integrate_master_equation, simulate_monte_carlo,
    solve_volterra_map, EngineKind, MapTrajectory, ProcessSpec, Provenance,
};
use pwd_core::blocks::TimedMapSpec;
use pwd_core::qstate::{from_pauli_vec, to_pauli_vec, DensityMatrix, PauliVec, TransferMatrix, DEFAULT_PSD_TOL, DEFAULT_TP_TOL};
use pwd_core::validation::{run_validation, Fault, Level};
use pwd_core::witness::{
    pair_search, sweep_surface, witness_functions, GrowthInterval, SurfaceExample, SurfaceParams,
};
use serde::Serialize;
use serde_json::json;

use crate::config::{self, EngineConfig, Resolved, RunConfig};
use crate::output::{header, num, row, sidecar, write_json, write_text};
use crate::CliError;

struct Loaded {
    cfg: RunConfig,
    resolved: Resolved,
}

fn load(path: &Path) -> Result<Loaded, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let cfg = config::parse(&text)?;
    let resolved = config::resolve(&cfg)?;
    Ok(Loaded { cfg, resolved })
}

struct EngineRun {
    traj: MapTrajectory,
    /// Pauli-vector coefficients of `ρ(t_n)` when an initial state is given.
    states: Option<Vec<DVector<f64>>>,
    mc_max_stderr: Option<f64>,
}

fn apply_all(traj: &MapTrajectory, rho0: &DensityMatrix) -> Result<Vec<DVector<f64>>, CliError> {
    let v0 = to_pauli_vec(rho0);
    Ok(traj.maps.iter().map(|m| m.apply_vec(&v0).map(PauliVec::into_coeffs)).collect::<pwd_core::Result<_>>()?)
}

/// Λ(t) from four master-equation runs: `I/2` and `(I + σ_k)/2`.
fn master_map(p: &ProcessSpec) -> Result<MapTrajectory, CliError> {
    let mixed = integrate_master_equation(p, &DensityMatrix::maximally_mixed(2))?;
    let mut axes = Vec::with_capacity(3);
    for k in 0..3 {
        let mut b = [0.0; 3];
        b[k] = 1.0;
        axes.push(integrate_master_equation(p, &DensityMatrix::from_bloch(b[0], b[1], b[2])?)?);
    }
    let s = std::f64::consts::SQRT_2;
    let maps = (0..p.grid.len())
        .map(|n| {
            let y0 = mixed.vec(n).into_coeffs();
            let mut m = nalgebra::DMatrix::zeros(4, 4);
            m.set_column(0, &(&y0 * s));
            for (k, a) in axes.iter().enumerate() {
                m.set_column(k + 1, &((a.vec(n).into_coeffs() - &y0) * s));
            }
            TransferMatrix::new(2, m)
        })
        .collect::<pwd_core::Result<_>>()?;
    Ok(MapTrajectory {
        grid: p.grid,
        maps,
        provenance: Provenance { engine: EngineKind::MasterEquation, step: p.grid.step(), steps: p.grid.steps(), seed: None, n_traj: None },
    })
}

fn run_engine(cfg: &RunConfig, r: &Resolved) -> Result<EngineRun, CliError> {
    let Some(p) = r.process()? else {
        let traj = MapTrajectory::free(&r.map, r.grid)?;
        let states = r.rho0.as_ref().map(|rho| apply_all(&traj, rho)).transpose()?;
        return Ok(EngineRun { traj, states, mc_max_stderr: None });
    };
    let mut mc_max_stderr = None;
    let mut states = None;
    let traj = match cfg.engine {
        EngineConfig::Volterra => solve_volterra_map(&p)?,
        EngineConfig::MonteCarlo { n_traj, seed } => {
            let mc = simulate_monte_carlo(&p, n_traj, seed)?;
            mc_max_stderr = Some(mc.max_stderr());
            mc.trajectory
        }
        EngineConfig::ClosedForm => match &p.map {
            TimedMapSpec::Dephasing(d) => assemble_lambda_dephasing(d, &p.waiting, &p.channel, &p.grid)?.trajectory,
            TimedMapSpec::Damping(params) => assemble_lambda_damping(params, &p.waiting, &p.channel, &p.grid)?.trajectory,
            _ => return Err(CliError::Config("engine: closed_form needs a dephasing or damping map".into())),
        },
        EngineConfig::MasterEquation => {
            if let Some(rho) = &r.rho0 {
                states = Some(integrate_master_equation(&p, rho)?.coeffs);
            }
            master_map(&p)?
        }
    };
    if states.is_none() {
        states = r.rho0.as_ref().map(|rho| apply_all(&traj, rho)).transpose()?;
    }
    Ok(EngineRun { traj, states, mc_max_stderr })
}

fn tolerances(cfg: &RunConfig) -> serde_json::Value {
    json!({ "choi_psd": DEFAULT_PSD_TOL, "tp_residual": DEFAULT_TP_TOL, "eps_growth": cfg.witness.eps_growth })
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

pub fn simulate(config_path: &Path, out: &Path) -> Result<(), CliError> {
    let started = Instant::now();
    let Loaded { cfg, resolved } = load(config_path)?;
    let run = run_engine(&cfg, &resolved)?;

    let mut csv = String::new();
    let mut names = vec!["t".to_string()];
    for i in 0..4 {
        for j in 0..4 {
            names.push(format!("L{i}{j}"));
        }
    }
    if run.states.is_some() {
        names.extend(["rho00", "rho01_re", "rho01_im", "rho11"].map(String::from));
    }
    header(&mut csv, &names.iter().map(String::as_str).collect::<Vec<_>>());
    for (n, (t, m)) in run.traj.grid.nodes().zip(&run.traj.maps).enumerate() {
        let mut fields = vec![num(t)];
        fields.extend(m.matrix().transpose().iter().map(|&x| num(x)));
        if let Some(states) = &run.states {
            let rho = from_pauli_vec(&PauliVec::new(2, states[n].clone())?);
            let x = rho.matrix();
            fields.extend([x[(0, 0)].re, x[(0, 1)].re, x[(0, 1)].im, x[(1, 1)].re].map(num));
        }
        row(&mut csv, fields);
    }
    write_text(out, &csv)?;

    let cpt = run.traj.cpt_summary(DEFAULT_PSD_TOL, DEFAULT_TP_TOL);
    let meta = json!({
        "tool": "pwd",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "simulate",
        "output": file_name(out),
        "config": cfg,
        "provenance": run.traj.provenance,
        "tolerances": tolerances(&cfg),
        "cpt": cpt,
        "monte_carlo_max_stderr": run.mc_max_stderr,
        "wall_seconds": started.elapsed().as_secs_f64(),
    });
    write_json(&sidecar(out, ".meta.json"), &meta)
}

#[derive(Serialize)]
struct PairSummary<'a> {
    name: &'a str,
    nm_measure: f64,
    detected: bool,
    intervals: &'a [GrowthInterval],
}

pub fn witness(config_path: &Path, out: &Path) -> Result<(), CliError> {
    let started = Instant::now();
    let Loaded { cfg, resolved } = load(config_path)?;
    let run = run_engine(&cfg, &resolved)?;
    let w = cfg.witness;
    let report = pair_search(&run.traj, w.random_pairs, w.seed, w.eps_growth)?;

    let mut csv = String::new();
    header(&mut csv, &["pair", "t", "D", "dD_forward", "growing"]);
    for p in &report.pairs {
        let d = &p.d_values;
        for (n, t) in report.grid.nodes().enumerate() {
            let (inc, growing) = match d.get(n + 1) {
                Some(next) => {
                    let inc = next - d[n];
                    (num(inc), if inc > w.eps_growth { "1" } else { "0" })
                }
                None => (String::new(), "0"),
            };
            row(&mut csv, [p.name.clone(), num(t), num(d[n]), inc, growing.to_string()]);
        }
    }
    write_text(out, &csv)?;

    let best = report.best();
    let functions = witness_functions(&run.traj, w.eps_growth)?;
    let functions = (functions.fallback.is_none()).then(|| {
        let layers: Vec<_> = functions
            .series
            .iter()
            .zip(&functions.growth)
            .map(|((name, _), g)| PairSummary { name, nm_measure: g.nm_measure, detected: g.detected, intervals: &g.intervals })
            .collect();
        json!({ "detected": functions.detected, "functions": layers })
    });
    let pairs: Vec<_> = report
        .pairs
        .iter()
        .map(|p| PairSummary { name: &p.name, nm_measure: p.growth.nm_measure, detected: p.growth.detected, intervals: &p.growth.intervals })
        .collect();
    let summary = json!({
        "detected": report.detected,
        "nm_measure": report.nm_measure,
        "best_pair": best.name,
        "intervals": best.growth.intervals,
        "pairs": pairs,
        "diagonal_witness": functions,
    });
    write_json(&sidecar(out, ".summary.json"), &summary)?;
    let meta = json!({
        "tool": "pwd",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "witness",
        "output": file_name(out),
        "config": cfg,
        "provenance": run.traj.provenance,
        "tolerances": tolerances(&cfg),
        "wall_seconds": started.elapsed().as_secs_f64(),
    });
    write_json(&sidecar(out, ".meta.json"), &meta)
}

/// Optional overrides of the surface defaults.
pub struct SurfaceRanges {
    pub tmax: Option<f64>,
    pub tsteps: Option<usize>,
    pub ratio_min: Option<f64>,
    pub ratio_max: Option<f64>,
    pub ratio_steps: Option<usize>,
    pub gamma_ratio: Option<f64>,
}

pub fn surface(example: SurfaceExample, r: SurfaceRanges, out: &Path) -> Result<(), CliError> {
    let started = Instant::now();
    let mut params = SurfaceParams::defaults(example);
    if let Some(t) = r.tmax {
        params.t_max = t;
    }
    if let Some(n) = r.tsteps {
        params.t_steps = n;
    }
    if let Some(g) = r.gamma_ratio {
        params.gamma_ratio = g;
    }
    if r.ratio_min.is_some() || r.ratio_max.is_some() || r.ratio_steps.is_some() {
        params = params
            .with_log_ratios(r.ratio_min.unwrap_or(0.25), r.ratio_max.unwrap_or(25.0), r.ratio_steps.unwrap_or(40))
            .map_err(|e| CliError::config("ratio", e))?;
    }
    let data = sweep_surface(&params).map_err(|e| match e {
        pwd_core::Error::InvalidParameter { .. } => CliError::config("surface", e),
        e => CliError::Engine(e),
    })?;

    let mut layers: Vec<_> = data.layers.iter().collect();
    layers.sort_by(|a, b| a.name.cmp(&b.name));
    let mut csv = String::new();
    header(&mut csv, &["lambda_t", "ratio", "layer", "value"]);
    for (i, ratio) in data.ratios.iter().enumerate() {
        for (n, lt) in data.lambda_t.iter().enumerate() {
            for l in &layers {
                row(&mut csv, [num(*lt), num(*ratio), l.name.clone(), num(l.values[i][n])]);
            }
        }
    }
    write_text(out, &csv)?;
    let meta = json!({
        "tool": "pwd",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "surface",
        "output": file_name(out),
        "params": data.params,
        "growth": data.growth,
        "wall_seconds": started.elapsed().as_secs_f64(),
    });
    write_json(&sidecar(out, ".meta.json"), &meta)
}

pub fn validate(level: Level, fault: Option<Fault>, out: Option<&Path>) -> Result<(), CliError> {
    let report = run_validation(level, fault)?;
    for c in &report.checks {
        eprintln!(
            "{} {:<52} observed {:.3e} required {:.3e}",
            if c.passed { "ok  " } else { "FAIL" },
            c.name,
            c.observed,
            c.required
        );
    }
    match out {
        Some(path) => write_json(path, &report)?,
        None => println!("{}", serde_json::to_string_pretty(&report).expect("serialisable")),
    }
    if report.passed {
        Ok(())
    } else {
        let names: Vec<_> = report.failures().map(|c| c.name.as_str()).collect();
        Err(CliError::Validation(names.join(", ")))
    }
}
