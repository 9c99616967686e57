use crate::error::{Error, Result};

use super::LagrangianSpec;

/// Sampled trajectory `x(t)`; interpreted as piecewise linear between samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    times: Vec<f64>,
    positions: Vec<f64>,
}

impl Path {
    pub fn new(times: Vec<f64>, positions: Vec<f64>) -> Result<Self> {
        if times.len() != positions.len() {
            return Err(Error::InvalidParameter(format!("{} times but {} positions", times.len(), positions.len())));
        }
        if times.len() < 2 {
            return Err(Error::PathTooShort(times.len()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("path times must be strictly increasing".into()));
        }
        if times.iter().chain(&positions).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("path sample".into()));
        }
        Ok(Self { times, positions })
    }

    /// `n` equally spaced samples of `f` over `[t0, t1]`.
    pub fn sample(t0: f64, t1: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::PathTooShort(n));
        }
        let h = (t1 - t0) / (n - 1) as f64;
        let times: Vec<f64> = (0..n).map(|k| if k + 1 == n { t1 } else { t0 + k as f64 * h }).collect();
        let positions = times.iter().map(|&t| f(t)).collect();
        Self::new(times, positions)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn positions_mut(&mut self) -> &mut [f64] {
        &mut self.positions
    }
}

/// `S = ∫ (½ m ẋ² − V(x)) dt` along a piecewise-linear path.
///
/// The kinetic term uses the exact segment velocity, the potential term the
/// trapezoid rule, so the result is exact for free piecewise-linear paths.
pub fn action(path: &Path, lagrangian: &LagrangianSpec) -> Result<f64> {
    let m = lagrangian.mass();
    let v: Vec<f64> = path.positions.iter().map(|&x| lagrangian.potential_at(x)).collect::<Result<_>>()?;
    let mut s = 0.0;
    for k in 0..path.times.len() - 1 {
        let dt = path.times[k + 1] - path.times[k];
        let vel = (path.positions[k + 1] - path.positions[k]) / dt;
        s += (0.5 * m * vel * vel - 0.5 * (v[k] + v[k + 1])) * dt;
    }
    Ok(s)
}
