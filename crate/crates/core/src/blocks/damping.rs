use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Parameters of the vacuum-coupled two-level damping map `F₊(t)`:
/// `λ` (spectral width) and `γ` (coupling), both rates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DampingParams {
    pub lambda: f64,
    pub gamma: f64,
}

// |γ̃| below this fraction of λ is treated as the exceptional point.
const DEGENERATE_REL: f64 = 1e-8;

/// `sinh(x)/x`
fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

/// `sin(x)/x`
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

impl DampingParams {
    pub fn new(lambda: f64, gamma: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::param("lambda", format!("must be positive, got {lambda}")));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::param("gamma", format!("must be positive, got {gamma}")));
        }
        Ok(Self { lambda, gamma })
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.lambda, self.gamma).map(|_| ())
    }

    /// `λ² − 2γλ`; negative values give the oscillating branch.
    pub fn discriminant(&self) -> f64 {
        self.lambda * self.lambda - 2.0 * self.gamma * self.lambda
    }

    /// `G(t) = e^{−λt/2}[cosh(γ̃t/2) + (λ/γ̃) sinh(γ̃t/2)]`, `γ̃ = √(λ² − 2γλ)`,
    /// evaluated branch-explicitly so no complex arithmetic is needed.
    pub fn amplitude(&self, t: f64) -> f64 {
        let (lambda, disc) = (self.lambda, self.discriminant());
        let gt = disc.abs().sqrt();
        let half = 0.5 * lambda * t;
        if gt < DEGENERATE_REL * lambda {
            (-half).exp() * (1.0 + half)
        } else if disc > 0.0 {
            let x = 0.5 * gt * t;
            if x < 1.0 {
                (-half).exp() * (x.cosh() + half * sinhc(x))
            } else {
                let r = lambda / gt;
                0.5 * ((1.0 + r) * (x - half).exp() + (1.0 - r) * (-x - half).exp())
            }
        } else {
            let x = 0.5 * gt * t;
            (-half).exp() * (x.cos() + half * sinc(x))
        }
    }

    /// `G'(t) = −γλ (t/2) e^{−λt/2} sinh(γ̃t/2)/(γ̃t/2)` on all branches.
    pub fn amplitude_derivative(&self, t: f64) -> f64 {
        let (lambda, gamma, disc) = (self.lambda, self.gamma, self.discriminant());
        let gt = disc.abs().sqrt();
        let half = 0.5 * lambda * t;
        let pre = -gamma * lambda * 0.5 * t;
        if gt < DEGENERATE_REL * lambda {
            pre * (-half).exp()
        } else if disc > 0.0 {
            let x = 0.5 * gt * t;
            if x < 1.0 {
                pre * (-half).exp() * sinhc(x)
            } else {
                -(gamma * lambda / gt) * 0.5 * ((x - half).exp() - (-x - half).exp())
            }
        } else {
            let x = 0.5 * gt * t;
            pre * (-half).exp() * sinc(x)
        }
    }
}

pub fn damping_amplitude(lambda: f64, gamma: f64, t: f64) -> Result<f64> {
    let p = DampingParams::new(lambda, gamma)?;
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    Ok(p.amplitude(t))
}
