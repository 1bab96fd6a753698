use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// User-supplied coherence factor `D(t)` with optional analytic derivative.
#[derive(Clone)]
pub struct CustomProfile {
    pub label: String,
    value: ScalarFn,
    derivative: Option<ScalarFn>,
}

impl CustomProfile {
    pub fn new(
        label: impl Into<String>,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: Option<ScalarFn>,
    ) -> Self {
        Self { label: label.into(), value: Arc::new(value), derivative }
    }
}

impl fmt::Debug for CustomProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomProfile")
            .field("label", &self.label)
            .field("has_derivative", &self.derivative.is_some())
            .finish()
    }
}

/// Coherence factor `D(t)` of the dephasing map `diag(1, D, D, 1)`.
/// Complete positivity needs `|D(t)| ≤ 1` and `D(0) = 1`.
#[derive(Clone, Debug)]
pub enum DephasingProfile {
    /// `cos(λt)`
    Cosine { frequency: f64 },
    /// `e^{−κt}`
    Exponential { rate: f64 },
    Custom(CustomProfile),
}

impl DephasingProfile {
    pub fn cosine(frequency: f64) -> Result<Self> {
        if !(frequency > 0.0 && frequency.is_finite()) {
            return Err(Error::param("frequency", format!("must be positive, got {frequency}")));
        }
        Ok(Self::Cosine { frequency })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::param("rate", format!("must be positive, got {rate}")));
        }
        Ok(Self::Exponential { rate })
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Self::Cosine { frequency } => (frequency * t).cos(),
            Self::Exponential { rate } => (-rate * t).exp(),
            Self::Custom(c) => (c.value)(t),
        }
    }

    pub fn derivative(&self, t: f64) -> Option<f64> {
        match self {
            Self::Cosine { frequency } => Some(-frequency * (frequency * t).sin()),
            Self::Exponential { rate } => Some(-rate * (-rate * t).exp()),
            Self::Custom(c) => c.derivative.as_ref().map(|d| d(t)),
        }
    }

    /// Flags `D(0) ≠ 1` or `|D| > 1` at any of the sampled times.
    pub fn check_normalisation(&self, times: impl IntoIterator<Item = f64>) -> Result<()> {
        if (self.value(0.0) - 1.0).abs() > 1e-12 {
            return Err(Error::param("dephasing", format!("D(0) = {} differs from 1", self.value(0.0))));
        }
        for t in times {
            let d = self.value(t);
            if !(d.abs() <= 1.0 + 1e-12) {
                return Err(Error::param("dephasing", format!("|D({t})| = {} exceeds 1", d.abs())));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins() {
        let c = DephasingProfile::cosine(2.0).unwrap();
        assert_eq!(c.value(0.0), 1.0);
        assert_eq!(c.derivative(0.0), Some(-0.0));
        assert!(c.check_normalisation((0..100).map(|k| k as f64 * 0.1)).is_ok());
        assert!(DephasingProfile::cosine(0.0).is_err());
    }

    #[test]
    fn custom_violations_are_flagged() {
        let bad = DephasingProfile::Custom(CustomProfile::new("grows", |t: f64| 1.0 + t, None));
        assert!(bad.check_normalisation([0.0, 0.5]).is_err());
        let shifted = DephasingProfile::Custom(CustomProfile::new("shift", |t: f64| 0.5 * t.cos(), None));
        assert!(shifted.check_normalisation([0.0]).is_err());
        assert_eq!(shifted.derivative(1.0), None);
    }
}
