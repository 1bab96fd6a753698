use serde::Serialize;

use crate::renewal::TimeGrid;

/// Absolute per-step increment above which a series counts as growing.
pub const DEFAULT_EPS_GROWTH: f64 = 1e-9;

/// Maximal run of steps whose increment exceeds the threshold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthInterval {
    pub t_start: f64,
    pub t_end: f64,
    pub max_increment: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub intervals: Vec<GrowthInterval>,
    /// `Σ max(0, D_{i+1} − D_i)` over all steps.
    pub nm_measure: f64,
    pub detected: bool,
}

impl GrowthReport {
    pub fn first_start(&self) -> Option<f64> {
        self.intervals.first().map(|i| i.t_start)
    }
}

/// Scans forward differences of `series` sampled on `grid`.
pub fn detect_growth(series: &[f64], grid: &TimeGrid, eps_growth: f64) -> GrowthReport {
    let mut intervals = Vec::new();
    let mut nm_measure = 0.0;
    let mut open: Option<GrowthInterval> = None;
    for (i, pair) in series.windows(2).enumerate() {
        let inc = pair[1] - pair[0];
        nm_measure += inc.max(0.0);
        if inc > eps_growth {
            let cur = open.get_or_insert(GrowthInterval { t_start: grid.t(i), t_end: grid.t(i + 1), max_increment: inc });
            cur.t_end = grid.t(i + 1);
            cur.max_increment = cur.max_increment.max(inc);
        } else if let Some(done) = open.take() {
            intervals.push(done);
        }
    }
    intervals.extend(open);
    let detected = !intervals.is_empty();
    GrowthReport { intervals, nm_measure, detected }
}
