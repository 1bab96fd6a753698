use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniform time grid `t_n = n·h`, `n = 0..=steps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    step: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, steps: usize) -> Result<Self> {
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::param("t_max", format!("must be positive and finite, got {t_max}")));
        }
        if steps == 0 {
            return Err(Error::param("steps", "must be at least 1"));
        }
        Ok(Self { step: t_max / steps as f64, steps })
    }

    pub fn from_step(step: f64, steps: usize) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::param("step", format!("must be positive and finite, got {step}")));
        }
        if steps == 0 {
            return Err(Error::param("steps", "must be at least 1"));
        }
        Ok(Self { step, steps })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of nodes, `steps + 1`.
    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t(&self, n: usize) -> f64 {
        n as f64 * self.step
    }

    pub fn t_max(&self) -> f64 {
        self.t(self.steps)
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(move |n| self.t(n))
    }

    /// Same horizon with `factor` times as many steps.
    pub fn refine(&self, factor: usize) -> Self {
        Self { step: self.step / factor as f64, steps: self.steps * factor.max(1) }
    }

    /// Index of the first node with `t_n >= t`.
    pub fn first_node_at_or_after(&self, t: f64) -> usize {
        let mut n = (t / self.step).ceil().max(0.0) as usize;
        while n > 0 && self.t(n - 1) >= t {
            n -= 1;
        }
        while self.t(n) < t {
            n += 1;
        }
        n
    }

    /// Node index if `t` sits on the grid within a relative tolerance.
    pub fn node_index(&self, t: f64) -> Option<usize> {
        let x = t / self.step;
        let n = x.round();
        if n < 0.0 || n as usize > self.steps || (x - n).abs() > 1e-9 {
            return None;
        }
        Some(n as usize)
    }
}
