//! Trace-distance non-Markovianity: distinguishability series, growth
//! detection, witness functions for diagonal qubit maps, state-pair search
//! and parameter surfaces.

mod growth;
mod pairs;
mod surface;

pub use growth::{detect_growth, GrowthInterval, GrowthReport, DEFAULT_EPS_GROWTH};
pub use pairs::{
    pair_search, trace_distance_series, witness_functions, PairReport, StatePair, WitnessFunctions, WitnessReport,
    DEFAULT_RANDOM_PAIRS,
};
pub use surface::{sweep_surface, LayerGrowth, SurfaceData, SurfaceExample, SurfaceLayer, SurfaceParams};
