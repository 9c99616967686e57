//! Closed-form kernels and the band-limited one-slice transfer matrix.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::units::UnitSystem;

use super::{LagrangianSpec, PotentialSpec};

/// Fraction of the Nyquist band over which the slice kernel is exact.
/// Between this and Nyquist the spectral weight rolls off smoothly to zero.
pub const FLAT_BAND_FRACTION: f64 = 0.3;

fn check_finite(z: Complex64, what: &str) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// `√(m / 2πiħε)` on the principal branch (phase −π/4).
fn fresnel_prefactor(mass: f64, hbar: f64, duration: f64) -> Complex64 {
    Complex64::from_polar((mass / (2.0 * PI * hbar * duration)).sqrt(), -PI / 4.0)
}

/// Midpoint-rule short-time kernel
/// `√(m/2πiħε)·exp{(i/ħ)[m(x_to−x_from)²/2ε − ε·V((x_from+x_to)/2)]}`.
pub fn short_time_kernel(
    x_from: f64,
    x_to: f64,
    epsilon: f64,
    lagrangian: &LagrangianSpec,
    units: &UnitSystem,
) -> Result<Complex64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("time step must be positive, got {epsilon}")));
    }
    let (m, hbar) = (lagrangian.mass(), units.hbar());
    let d = x_to - x_from;
    let v_mid = lagrangian.potential_at(0.5 * (x_from + x_to))?;
    let phase = (m * d * d / (2.0 * epsilon) - epsilon * v_mid) / hbar;
    check_finite(fresnel_prefactor(m, hbar, epsilon) * Complex64::from_polar(1.0, phase), "short-time kernel")
}

/// Exact propagator `K(x_b, T; x_a, 0)` for free and constant-force motion.
pub fn analytic_kernel(
    x_a: f64,
    x_b: f64,
    duration: f64,
    lagrangian: &LagrangianSpec,
    units: &UnitSystem,
) -> Result<Complex64> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::InvalidParameter(format!("duration must be positive, got {duration}")));
    }
    let (m, hbar, t) = (lagrangian.mass(), units.hbar(), duration);
    let d = x_b - x_a;
    let classical = match lagrangian.potential() {
        PotentialSpec::Free => m * d * d / (2.0 * t),
        PotentialSpec::ConstantForce { force: f } => {
            m * d * d / (2.0 * t) + f * t * (x_a + x_b) / 2.0 - f * f * t.powi(3) / (24.0 * m)
        }
        PotentialSpec::Tabulated(_) => return Err(Error::UnsupportedPotential("tabulated")),
    };
    check_finite(fresnel_prefactor(m, hbar, t) * Complex64::from_polar(1.0, classical / hbar), "analytic kernel")
}

/// Reject grids whose neighbour spacing cannot resolve one slice:
/// `dx² > πħε/m` means the kinetic phase between adjacent points exceeds π/2.
pub fn check_resolution(grid: &Grid1D, epsilon: f64, mass: f64, units: &UnitSystem) -> Result<()> {
    let dx2 = grid.dx() * grid.dx();
    let limit = PI * units.hbar() * epsilon / mass;
    if dx2 > limit {
        return Err(Error::GridTooCoarse { dx2, limit });
    }
    Ok(())
}

/// Spectral weight: 1 on the flat band, C∞ step down to 0 at Nyquist.
fn band_weight(fraction_of_nyquist: f64) -> f64 {
    let t = (fraction_of_nyquist - FLAT_BAND_FRACTION) / (1.0 - FLAT_BAND_FRACTION);
    if t <= 0.0 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        b / (a + b)
    }
}

/// Free one-slice kernel projected onto the grid's wavenumber band, times dx:
///
/// `K(j·dx) = (dx/π) ∫₀^{π/dx} σ(k) e^{−iħεk²/2m} cos(k·j·dx) dk`, `j = 0..n`.
///
/// Evaluated by the trapezoid rule on `Q` nodes with `k_q = qπ/(Q·dx)`, so
/// `cos(k_q·j·dx) = cos(π·(qj mod 2Q)/Q)` comes from one table. `Q` is chosen
/// so the implied periodic image lies at least 8× beyond both the grid span
/// and the kernel's reach `πħε/(m·dx)`.
pub fn band_limited_free_kernel(grid: &Grid1D, epsilon: f64, mass: f64, units: &UnitSystem) -> Vec<Complex64> {
    let n = grid.len();
    let dx = grid.dx();
    let reach = PI * units.hbar() * epsilon / (mass * dx);
    let q_nodes = ((4.0 * grid.span().max(reach) / dx).ceil() as usize).max(8);
    let k_nyq = PI / dx;
    let chirp = units.hbar() * epsilon / (2.0 * mass);

    let spectral: Vec<Complex64> = (0..=q_nodes)
        .map(|q| {
            let frac = q as f64 / q_nodes as f64;
            let k = frac * k_nyq;
            let w = if q == 0 || q == q_nodes { 0.5 } else { 1.0 };
            Complex64::from_polar(w * band_weight(frac), -chirp * k * k)
        })
        .collect();
    let cos_table: Vec<f64> = (0..2 * q_nodes).map(|r| (PI * r as f64 / q_nodes as f64).cos()).collect();
    let scale = dx / PI * (k_nyq / q_nodes as f64);
    let period = 2 * q_nodes;

    (0..n)
        .into_par_iter()
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut r = 0usize;
            for s in &spectral {
                acc += s * cos_table[r];
                r += j;
                if r >= period {
                    r %= period;
                }
            }
            acc * scale
        })
        .collect()
}

/// One-slice transfer matrix, row-major: `M[j][i]` maps amplitude at `x_i`
/// to `x_j` over one step `epsilon`, including the midpoint potential phase.
pub fn slice_matrix(
    grid: &Grid1D,
    epsilon: f64,
    lagrangian: &LagrangianSpec,
    units: &UnitSystem,
) -> Result<Vec<Complex64>> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("time step must be positive, got {epsilon}")));
    }
    check_resolution(grid, epsilon, lagrangian.mass(), units)?;
    let n = grid.len();
    let free = band_limited_free_kernel(grid, epsilon, lagrangian.mass(), units);
    let xs: Vec<f64> = grid.points().collect();
    let coupling = epsilon / units.hbar();

    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            (0..n)
                .map(|i| {
                    let k = free[j.abs_diff(i)];
                    match lagrangian.potential() {
                        PotentialSpec::Free => Ok(k),
                        _ => {
                            let v = lagrangian.potential_at(0.5 * (xs[i] + xs[j]))?;
                            Ok(k * Complex64::from_polar(1.0, -coupling * v))
                        }
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let matrix: Vec<Complex64> = rows.into_iter().flatten().collect();
    if matrix.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite("slice matrix".into()));
    }
    Ok(matrix)
}
