use serde::Serialize;

use crate::error::{Error, Result};

/// Relative tolerance for a step to divide its interval.
const DIVISIBILITY_TOL: f64 = 1e-9;

/// Uniform grid `x_i = x₀ + i h`, `t_j = t₀ + j τ` on `[x₀, X] × [t₀, T]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub x0: f64,
    pub x_end: f64,
    pub t0: f64,
    pub t_end: f64,
    pub h: f64,
    pub tau: f64,
    pub n1: usize,
    pub n2: usize,
    /// `τ / h`, fixed at construction.
    pub r: f64,
}

fn step_count(start: f64, end: f64, step: f64, axis: &str) -> Result<usize> {
    if !(start.is_finite() && end.is_finite() && step.is_finite()) {
        return Err(Error::InvalidArgument(format!("{axis}: non-finite grid parameter")));
    }
    if step <= 0.0 {
        return Err(Error::InvalidArgument(format!("{axis}: step must be positive")));
    }
    let len = end - start;
    if len <= 0.0 {
        return Err(Error::InvalidArgument(format!("{axis}: empty interval [{start}, {end}]")));
    }
    let count = (len / step).round();
    if count < 1.0 || (count * step - len).abs() > DIVISIBILITY_TOL * len {
        return Err(Error::InvalidArgument(format!("{axis}: step {step} does not divide the interval length {len}")));
    }
    Ok(count as usize)
}

impl GridSpec {
    pub fn new(x0: f64, x_end: f64, t0: f64, t_end: f64, h: f64, tau: f64) -> Result<Self> {
        let n1 = step_count(x0, x_end, h, "x")?;
        let n2 = step_count(t0, t_end, tau, "t")?;
        Ok(GridSpec { x0, x_end, t0, t_end, h, tau, n1, n2, r: tau / h })
    }

    /// Unit square `[0, 1]²` with the given steps.
    pub fn unit_square(h: f64, tau: f64) -> Result<Self> {
        Self::new(0.0, 1.0, 0.0, 1.0, h, tau)
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.h
    }

    pub fn t(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.tau
    }

    /// Same domain with steps divided by `fx` and `ft`.
    pub fn refined(&self, fx: f64, ft: f64) -> Result<Self> {
        Self::new(self.x0, self.x_end, self.t0, self.t_end, self.h / fx, self.tau / ft)
    }
}
