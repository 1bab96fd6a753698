use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::{detect_growth, GrowthReport};
use crate::engines::MapTrajectory;
use crate::qstate::{from_pauli_vec, to_pauli_vec, trace_norm, DensityMatrix, PauliVec};
use crate::renewal::TimeGrid;
use crate::{Error, Result, C64};

/// Random orthogonal pure pairs tried on top of the axis pairs.
pub const DEFAULT_RANDOM_PAIRS: usize = 32;

// Off-diagonal entries below this count as zero when recognising the
// diagonal-plus-corner shape.
const SHAPE_TOL: f64 = 1e-12;

/// Two initial states to be tracked under the same map.
#[derive(Clone, Debug, PartialEq)]
pub struct StatePair {
    pub rho1: DensityMatrix,
    pub rho2: DensityMatrix,
}

impl StatePair {
    pub fn new(rho1: DensityMatrix, rho2: DensityMatrix) -> Result<Self> {
        if rho1.dim() != rho2.dim() {
            return Err(Error::DimensionMismatch { expected: rho1.dim(), found: rho2.dim() });
        }
        if rho1.max_abs_diff(&rho2) == 0.0 {
            return Err(Error::InvalidState("pair members coincide".into()));
        }
        Ok(Self { rho1, rho2 })
    }

    pub fn dim(&self) -> usize {
        self.rho1.dim()
    }

    /// Population difference `(ρ1 − ρ2)_{00}` (qubit).
    pub fn delta_p(&self) -> f64 {
        (self.rho1.matrix()[(0, 0)] - self.rho2.matrix()[(0, 0)]).re
    }

    /// Coherence difference `(ρ1 − ρ2)_{01}` as `(re, im)` (qubit).
    pub fn delta_c(&self) -> (f64, f64) {
        let c = self.rho1.matrix()[(0, 1)] - self.rho2.matrix()[(0, 1)];
        (c.re, c.im)
    }

    fn difference_vec(&self) -> DVector<f64> {
        to_pauli_vec(&self.rho1).into_coeffs() - to_pauli_vec(&self.rho2).into_coeffs()
    }

    /// Antipodal pairs `|k±⟩` along the axes `x, y, z` (first two levels for `d > 2`).
    pub fn axis_pairs(dim: usize) -> Vec<(String, StatePair)> {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let z = C64::new(0.0, 0.0);
        let vec = |a: C64, b: C64| {
            let mut v = vec![z; dim];
            v[0] = a;
            v[1] = b;
            v
        };
        let pure = |v: Vec<C64>| DensityMatrix::pure(&v).expect("normalised");
        let one = C64::new(1.0, 0.0);
        [
            ("x", vec(one * r, one * r), vec(one * r, -one * r)),
            ("y", vec(one * r, C64::new(0.0, r)), vec(one * r, C64::new(0.0, -r))),
            ("z", vec(one, z), vec(z, one)),
        ]
        .into_iter()
        .map(|(name, a, b)| (name.to_string(), StatePair { rho1: pure(a), rho2: pure(b) }))
        .collect()
    }

    /// Haar-random pure state and a random pure state orthogonal to it.
    pub fn random_orthogonal<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let mut gauss = || -> DVector<C64> {
            DVector::from_fn(dim, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        };
        let a = gauss();
        let a = &a / C64::new(a.norm(), 0.0);
        let b = gauss();
        let b = &b - &a * a.dotc(&b);
        let b = &b / C64::new(b.norm(), 0.0);
        let rho = |v: &DVector<C64>| DensityMatrix::new(v * v.adjoint()).expect("pure state");
        Self { rho1: rho(&a), rho2: rho(&b) }
    }
}

fn distance_of(dim: usize, coeffs: DVector<f64>) -> f64 {
    let op = from_pauli_vec(&PauliVec::new(dim, coeffs).expect("length d²"));
    0.5 * trace_norm(&op)
}

/// `D(t_n) = ½‖Λ(t_n)(ρ1 − ρ2)‖₁`. Only the traceless difference is
/// propagated, so a corner entry of `Λ` never contributes.
pub fn trace_distance_series(traj: &MapTrajectory, pair: &StatePair) -> Result<Vec<f64>> {
    if pair.dim() != traj.dim() {
        return Err(Error::DimensionMismatch { expected: traj.dim(), found: pair.dim() });
    }
    let dv = pair.difference_vec();
    Ok(traj.maps.iter().map(|m| distance_of(pair.dim(), m.matrix() * &dv)).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct PairReport {
    pub name: String,
    pub d_values: Vec<f64>,
    pub growth: GrowthReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub grid: TimeGrid,
    pub pairs: Vec<PairReport>,
    /// Index into `pairs` with the largest measure.
    pub best_pair: usize,
    pub nm_measure: f64,
    pub detected: bool,
}

impl WitnessReport {
    fn from_pairs(grid: TimeGrid, pairs: Vec<PairReport>) -> Self {
        let mut best_pair = 0;
        for (i, p) in pairs.iter().enumerate() {
            if p.growth.nm_measure > pairs[best_pair].growth.nm_measure {
                best_pair = i;
            }
        }
        let nm_measure = pairs.get(best_pair).map_or(0.0, |p| p.growth.nm_measure);
        let detected = pairs.iter().any(|p| p.growth.detected);
        Self { grid, pairs, best_pair, nm_measure, detected }
    }

    pub fn best(&self) -> &PairReport {
        &self.pairs[self.best_pair]
    }
}

fn evaluate(traj: &MapTrajectory, named: Vec<(String, StatePair)>, eps: f64) -> Result<Vec<PairReport>> {
    let run = |(name, pair): &(String, StatePair)| -> Result<PairReport> {
        let d_values = trace_distance_series(traj, pair)?;
        let growth = detect_growth(&d_values, &traj.grid, eps);
        Ok(PairReport { name: name.clone(), d_values, growth })
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        named.par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        named.iter().map(run).collect()
    }
}

/// Axis pairs plus `n_random` seeded random orthogonal pure pairs.
pub fn pair_search(traj: &MapTrajectory, n_random: usize, seed: u64, eps_growth: f64) -> Result<WitnessReport> {
    let dim = traj.dim();
    if dim < 2 {
        return Err(Error::param("dim", "pair search needs at least two levels"));
    }
    let mut named = StatePair::axis_pairs(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..n_random {
        named.push((format!("random_{k}"), StatePair::random_orthogonal(dim, &mut rng)));
    }
    Ok(WitnessReport::from_pairs(traj.grid, evaluate(traj, named, eps_growth)?))
}

/// `|X|, |Y|, |Z|` of a diagonal-plus-corner qubit trajectory, or pair-based
/// detection when the trajectory has another shape.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessFunctions {
    /// `("abs_x", series), ("abs_y", …), ("abs_z", …)`; empty on fallback.
    pub series: Vec<(String, Vec<f64>)>,
    pub growth: Vec<GrowthReport>,
    pub detected: bool,
    pub fallback: Option<WitnessReport>,
}

pub fn witness_functions(traj: &MapTrajectory, eps_growth: f64) -> Result<WitnessFunctions> {
    let entries: Option<Vec<[f64; 4]>> =
        traj.maps.iter().map(|m| m.diagonal_plus_corner_entries(SHAPE_TOL)).collect();
    let Some(entries) = entries else {
        let report = pair_search(traj, super::DEFAULT_RANDOM_PAIRS, 0, eps_growth)?;
        return Ok(WitnessFunctions { series: Vec::new(), growth: Vec::new(), detected: report.detected, fallback: Some(report) });
    };
    let mut series = Vec::with_capacity(3);
    let mut growth = Vec::with_capacity(3);
    for (k, name) in ["abs_x", "abs_y", "abs_z"].into_iter().enumerate() {
        let s: Vec<f64> = entries.iter().map(|e| e[k].abs()).collect();
        growth.push(detect_growth(&s, &traj.grid, eps_growth));
        series.push((name.to_string(), s));
    }
    let detected = growth.iter().any(|g| g.detected);
    Ok(WitnessFunctions { series, growth, detected, fallback: None })
}
