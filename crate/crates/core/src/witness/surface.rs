use serde::Serialize;

use super::{detect_growth, DEFAULT_EPS_GROWTH};
use crate::blocks::DampingParams;
use crate::engines::{functional_with, Sign};
use crate::renewal::{ProductWeights, TimeGrid, WaitingTimeDist};
use crate::{Error, Result};

// Internal step is at most this fraction of the fastest time scale.
const FINE_STEP_SCALE: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceExample {
    /// `D = cos λt`, Erlang(3) waiting times.
    Dephasing,
    /// Damping family with fixed `γ/λ`, Erlang(2) waiting times.
    Damping,
}

impl std::str::FromStr for SurfaceExample {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dephasing" => Ok(Self::Dephasing),
            "damping" => Ok(Self::Damping),
            _ => Err(Error::param("example", format!("expected `dephasing` or `damping`, got `{s}`"))),
        }
    }
}

/// Sweep over `λt ∈ [0, t_max]` and the ratios `Γ/λ`, with `Γ` the
/// per-stage rate of the Erlang waiting time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurfaceParams {
    pub example: SurfaceExample,
    pub lambda: f64,
    /// Horizon in units of `1/λ`.
    pub t_max: f64,
    pub t_steps: usize,
    pub ratios: Vec<f64>,
    /// `γ/λ` of the damping family.
    pub gamma_ratio: f64,
    pub stages: u32,
    pub eps_growth: f64,
}

impl SurfaceParams {
    pub fn defaults(example: SurfaceExample) -> Self {
        Self {
            example,
            lambda: 1.0,
            t_max: 15.0,
            t_steps: 150,
            ratios: log_spaced(0.25, 25.0, 40),
            gamma_ratio: 3.0,
            stages: match example {
                SurfaceExample::Dephasing => 3,
                SurfaceExample::Damping => 2,
            },
            eps_growth: DEFAULT_EPS_GROWTH,
        }
    }

    pub fn with_log_ratios(mut self, min: f64, max: f64, steps: usize) -> Result<Self> {
        if !(min > 0.0 && max >= min && steps >= 1) {
            return Err(Error::param("ratio", format!("need 0 < min ≤ max and steps ≥ 1, got {min}, {max}, {steps}")));
        }
        self.ratios = log_spaced(min, max, steps);
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) {
            return Err(Error::param("lambda", "must be positive"));
        }
        if self.ratios.is_empty() || self.ratios.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
            return Err(Error::param("ratio", "ratios must be positive and finite"));
        }
        if self.example == SurfaceExample::Damping && !(self.gamma_ratio > 0.0) {
            return Err(Error::param("gamma_ratio", "must be positive"));
        }
        TimeGrid::new(self.t_max, self.t_steps)?;
        Ok(())
    }

    pub fn layer_names(&self) -> &'static [&'static str] {
        match self.example {
            SurfaceExample::Dephasing => &["d_minus", "d_plus", "q"],
            SurfaceExample::Damping => &["g_minus", "g_plus", "h_minus", "h_plus"],
        }
    }
}

fn log_spaced(min: f64, max: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![min];
    }
    let (a, b) = (min.ln(), max.ln());
    (0..steps).map(|k| (a + (b - a) * k as f64 / (steps - 1) as f64).exp()).collect()
}

/// One named field on the `(ratio, λt)` grid; `values[ratio][t]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurfaceLayer {
    pub name: String,
    pub values: Vec<Vec<f64>>,
}

/// Growth statistics of a layer at one ratio, on the internal fine grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LayerGrowth {
    pub ratio: f64,
    pub layer: String,
    pub nm_measure: f64,
    pub detected: bool,
    pub intervals: usize,
    /// Start of the first growth interval in units of `1/λ`.
    pub first_start: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurfaceData {
    pub params: SurfaceParams,
    pub lambda_t: Vec<f64>,
    pub ratios: Vec<f64>,
    pub layers: Vec<SurfaceLayer>,
    pub growth: Vec<LayerGrowth>,
}

impl SurfaceData {
    pub fn layer(&self, name: &str) -> Option<&SurfaceLayer> {
        self.layers.iter().find(|l| l.name == name)
    }

    pub fn growth_of(&self, layer: &str) -> impl Iterator<Item = &LayerGrowth> + '_ {
        let layer = layer.to_string();
        self.growth.iter().filter(move |g| g.layer == layer)
    }
}

struct Column {
    coarse: Vec<Vec<f64>>,
    growth: Vec<LayerGrowth>,
}

fn column(p: &SurfaceParams, coarse: &TimeGrid, ratio: f64) -> Result<Column> {
    let rate = ratio * p.lambda;
    let target = FINE_STEP_SCALE / rate.max(p.lambda);
    let factor = (coarse.step() / target).ceil().max(1.0) as usize;
    let fine = coarse.refine(factor);
    let w = WaitingTimeDist::erlang(p.stages, rate)?;
    let weights = ProductWeights::new(&w, &fine);
    let solve = |sign: Sign, m: &[f64]| functional_with(&weights, sign, m);

    let fields: Vec<Vec<f64>> = match p.example {
        SurfaceExample::Dephasing => {
            let d: Vec<f64> = fine.nodes().map(|t| (p.lambda * t).cos()).collect();
            let ones = vec![1.0; fine.len()];
            vec![solve(Sign::Minus, &d)?, solve(Sign::Plus, &d)?, solve(Sign::Plus, &ones)?]
        }
        SurfaceExample::Damping => {
            let params = DampingParams::new(p.lambda, p.gamma_ratio * p.lambda)?;
            let g: Vec<f64> = fine.nodes().map(|t| params.amplitude(t)).collect();
            let g2: Vec<f64> = g.iter().map(|x| x * x).collect();
            vec![solve(Sign::Minus, &g)?, solve(Sign::Plus, &g)?, solve(Sign::Minus, &g2)?, solve(Sign::Plus, &g2)?]
        }
    };

    let mut coarse_fields = Vec::with_capacity(fields.len());
    let mut growth = Vec::with_capacity(fields.len());
    for (name, values) in p.layer_names().iter().zip(fields) {
        let abs: Vec<f64> = values.iter().map(|x| x.abs()).collect();
        let report = detect_growth(&abs, &fine, p.eps_growth);
        growth.push(LayerGrowth {
            ratio,
            layer: name.to_string(),
            nm_measure: report.nm_measure,
            detected: report.detected,
            intervals: report.intervals.len(),
            first_start: report.first_start().map(|t| t * p.lambda),
        });
        coarse_fields.push((0..coarse.len()).map(|n| abs[n * factor]).collect());
    }
    Ok(Column { coarse: coarse_fields, growth })
}

/// Tabulates the moduli of the scalar functions of the chosen example over
/// `(Γ/λ, λt)`. Each ratio is solved on an internally refined grid; the
/// layers are sampled back onto the output grid and the growth statistics
/// use the refined series.
pub fn sweep_surface(params: &SurfaceParams) -> Result<SurfaceData> {
    params.validate()?;
    let coarse = TimeGrid::new(params.t_max / params.lambda, params.t_steps)?;
    let run = |&ratio: &f64| column(params, &coarse, ratio);
    #[cfg(feature = "parallel")]
    let columns: Vec<Result<Column>> = {
        use rayon::prelude::*;
        params.ratios.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let columns: Vec<Result<Column>> = params.ratios.iter().map(run).collect();

    let names = params.layer_names();
    let mut layers: Vec<SurfaceLayer> =
        names.iter().map(|n| SurfaceLayer { name: n.to_string(), values: Vec::with_capacity(params.ratios.len()) }).collect();
    let mut growth = Vec::new();
    for c in columns {
        let c = c?;
        for (layer, values) in layers.iter_mut().zip(c.coarse) {
            layer.values.push(values);
        }
        growth.extend(c.growth);
    }
    Ok(SurfaceData {
        params: params.clone(),
        lambda_t: coarse.nodes().map(|t| t * params.lambda).collect(),
        ratios: params.ratios.clone(),
        layers,
        growth,
    })
}
