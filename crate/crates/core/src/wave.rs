use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid1D;

/// Complex amplitudes sampled on a [`Grid1D`].
///
/// All norms and overlaps use trapezoid weights on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: Grid1D,
    amplitudes: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: Grid1D, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "{} amplitudes for a grid of {} points",
                amplitudes.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, amplitudes })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self { grid, amplitudes: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Self {
        let amplitudes = grid.points().map(f).collect();
        Self { grid, amplitudes }
    }

    /// Normalised Gaussian `exp(-(x-c)²/4σ² + i·k·x)`; `sigma` is the standard
    /// deviation of |ψ|² and `wavenumber` is p/ħ.
    pub fn gaussian(grid: Grid1D, center: f64, sigma: f64, wavenumber: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("Gaussian width must be positive, got {sigma}")));
        }
        let amp = (2.0 * PI * sigma * sigma).powf(-0.25);
        Self::from_fn(grid, |x| {
            let d = x - center;
            Complex64::from_polar(amp * (-d * d / (4.0 * sigma * sigma)).exp(), wavenumber * x)
        })
        .normalize()
    }

    /// Amplitude 1 at the grid point nearest `x`, zero elsewhere (not normalised).
    pub fn unit_spike(grid: Grid1D, x: f64) -> Self {
        let mut psi = Self::zeros(grid);
        psi.amplitudes[grid.nearest_index(x)] = Complex64::new(1.0, 0.0);
        psi
    }

    #[inline]
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().enumerate().map(|(i, a)| a.norm_sqr() * self.grid.weight(i)).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Rescales to unit trapezoid norm; the global phase is untouched.
    pub fn normalize(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if !(n2 >= 1e-300) || !n2.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let s = 1.0 / n2.sqrt();
        Ok(Self { grid: self.grid, amplitudes: self.amplitudes.iter().map(|a| a * s).collect() })
    }

    /// ⟨self|other⟩ = Σ conj(aᵢ)·bᵢ·wᵢ.
    pub fn inner_product(&self, other: &WaveFunction) -> Result<Complex64> {
        inner_product(self, other)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self { grid: self.grid, amplitudes: self.amplitudes.iter().map(|a| a * factor).collect() }
    }

    pub fn add(&self, other: &WaveFunction) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let amplitudes = self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a + b).collect();
        Ok(Self { grid: self.grid, amplitudes })
    }

    /// ‖self − other‖ under trapezoid weights.
    pub fn distance(&self, other: &WaveFunction) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let d2: f64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .enumerate()
            .map(|(i, (a, b))| (a - b).norm_sqr() * self.grid.weight(i))
            .sum();
        Ok(d2.sqrt())
    }

    /// ⟨x⟩ of |ψ|², normalised by the current norm.
    pub fn mean_position(&self) -> f64 {
        let n2 = self.norm_sqr();
        self.grid
            .points()
            .zip(&self.amplitudes)
            .enumerate()
            .map(|(i, (x, a))| x * a.norm_sqr() * self.grid.weight(i))
            .sum::<f64>()
            / n2
    }

    /// Standard deviation of |ψ|² (normalised by the current norm).
    pub fn position_spread(&self) -> f64 {
        let n2 = self.norm_sqr();
        let mean = self.mean_position();
        let var = self
            .grid
            .points()
            .zip(&self.amplitudes)
            .enumerate()
            .map(|(i, (x, a))| (x - mean).powi(2) * a.norm_sqr() * self.grid.weight(i))
            .sum::<f64>()
            / n2;
        var.sqrt()
    }

    /// Largest |ψ|² among the `margin` outermost points on either side.
    pub fn edge_density(&self, margin: usize) -> f64 {
        let n = self.amplitudes.len();
        let m = margin.min(n);
        self.amplitudes[..m].iter().chain(&self.amplitudes[n - m..]).map(|a| a.norm_sqr()).fold(0.0, f64::max)
    }
}

/// ⟨a|b⟩ with trapezoid weights. Both functions must share a grid.
pub fn inner_product(a: &WaveFunction, b: &WaveFunction) -> Result<Complex64> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    Ok(a.amplitudes.iter().zip(&b.amplitudes).enumerate().map(|(i, (x, y))| x.conj() * y * a.grid.weight(i)).sum())
}
