use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Waiting-time density of the renewal process.
///
/// `Erlang { stages: n, rate }` is the `n`-fold convolution of identical
/// exponentials `rate·e^{-rate·t}`; `rate` is the per-stage rate, so the mean
/// waiting time is `n / rate`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WaitingTimeDist {
    Exponential { rate: f64 },
    Erlang { stages: u32, rate: f64 },
}

fn check_rate(rate: f64) -> Result<()> {
    if rate > 0.0 && rate.is_finite() {
        Ok(())
    } else {
        Err(Error::param("rate", format!("must be positive and finite, got {rate}")))
    }
}

impl WaitingTimeDist {
    pub fn exponential(rate: f64) -> Result<Self> {
        check_rate(rate)?;
        Ok(Self::Exponential { rate })
    }

    pub fn erlang(stages: u32, rate: f64) -> Result<Self> {
        check_rate(rate)?;
        if stages == 0 {
            return Err(Error::param("stages", "must be at least 1"));
        }
        Ok(Self::Erlang { stages, rate })
    }

    /// Re-checks parameters of a value built directly or deserialised.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Exponential { rate } => Self::exponential(rate).map(|_| ()),
            Self::Erlang { stages, rate } => Self::erlang(stages, rate).map(|_| ()),
        }
    }

    pub fn rate(&self) -> f64 {
        match *self {
            Self::Exponential { rate } | Self::Erlang { rate, .. } => rate,
        }
    }

    pub fn stages(&self) -> u32 {
        match *self {
            Self::Exponential { .. } => 1,
            Self::Erlang { stages, .. } => stages,
        }
    }

    pub fn mean(&self) -> f64 {
        self.stages() as f64 / self.rate()
    }

    fn check_time(t: f64) -> Result<()> {
        if t >= 0.0 {
            Ok(())
        } else {
            Err(Error::NegativeTime(t))
        }
    }

    pub fn density(&self, t: f64) -> Result<f64> {
        Self::check_time(t)?;
        Ok(self.pdf(t))
    }

    pub fn survival(&self, t: f64) -> Result<f64> {
        Self::check_time(t)?;
        Ok(self.sf(t))
    }

    pub fn density_derivative(&self, t: f64) -> Result<f64> {
        Self::check_time(t)?;
        Ok(self.dpdf(t))
    }

    /// `f(0)`: the rate for one stage, zero otherwise.
    pub fn initial_density(&self) -> f64 {
        self.pdf(0.0)
    }

    /// Erlang density with `n` stages at the same rate.
    fn erlang_pdf(n: u32, rate: f64, t: f64) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let mut term = rate * (-rate * t).exp();
        for k in 1..n {
            term *= rate * t / k as f64;
        }
        term
    }

    fn erlang_sf(n: u32, rate: f64, t: f64) -> f64 {
        let x = rate * t;
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..n {
            term *= x / j as f64;
            sum += term;
        }
        (-x).exp() * sum
    }

    pub(crate) fn pdf(&self, t: f64) -> f64 {
        Self::erlang_pdf(self.stages(), self.rate(), t)
    }

    pub(crate) fn sf(&self, t: f64) -> f64 {
        Self::erlang_sf(self.stages(), self.rate(), t)
    }

    /// `f_n' = Γ (f_{n-1} − f_n)`, with `f_0` contributing nothing for `t ≥ 0`.
    pub(crate) fn dpdf(&self, t: f64) -> f64 {
        let (n, rate) = (self.stages(), self.rate());
        rate * (Self::erlang_pdf(n - 1, rate, t) - Self::erlang_pdf(n, rate, t))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let rate = self.rate();
        (0..self.stages()).map(|_| rng.sample::<f64, _>(Exp1) / rate).sum()
    }
}
