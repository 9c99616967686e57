use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::units::UnitSystem;

use super::{kernel, LagrangianSpec, PotentialSpec, TimeSlicing};

/// Classical position at time `t` on the path from `x_a` (t = 0) to `x_b` (t = T).
pub fn classical_position(lagrangian: &LagrangianSpec, x_a: f64, x_b: f64, duration: f64, t: f64) -> Result<f64> {
    let straight = x_a + (x_b - x_a) * t / duration;
    match lagrangian.potential() {
        PotentialSpec::Free => Ok(straight),
        PotentialSpec::ConstantForce { force } => Ok(straight + force * t * (t - duration) / (2.0 * lagrangian.mass())),
        PotentialSpec::Tabulated(_) => Err(Error::UnsupportedPotential("tabulated")),
    }
}

/// Tube mask `cos²(π·d / 2h)` for `d < h`, zero beyond.
///
/// The mask rises smoothly from the tube wall to 1 on the classical path and
/// is nondecreasing in `h` at every `d`.
#[inline]
pub fn tube_aperture(distance: f64, half_width: f64) -> f64 {
    let r = distance.abs() / half_width;
    if r >= 1.0 {
        0.0
    } else {
        (0.5 * PI * r).cos().powi(2)
    }
}

/// `|K_tube(x_a→x_b)| / |K_full(x_a→x_b)|`, where `K_tube` suppresses every
/// intermediate slice outside the tube around the classical path.
pub fn tube_amplitude_fraction(
    grid: &Grid1D,
    slicing: &TimeSlicing,
    lagrangian: &LagrangianSpec,
    units: &UnitSystem,
    half_width: f64,
    endpoints: (f64, f64),
) -> Result<f64> {
    if !(half_width > 0.0) || half_width.is_nan() {
        return Err(Error::InvalidParameter(format!("tube half width must be positive, got {half_width}")));
    }
    if slicing.is_identity() {
        return Err(Error::InvalidParameter("tube study needs at least one slice".into()));
    }
    let (x_a, x_b) = endpoints;
    let t_total = slicing.total_time();
    let eps = slicing.epsilon();
    let n_slices = slicing.n_slices();
    let xs: Vec<f64> = grid.points().collect();

    // masks[s-1] applies after slice s, for the N-1 intermediate times
    let masks: Vec<Vec<f64>> = (1..n_slices)
        .map(|s| {
            let xc = classical_position(lagrangian, x_a, x_b, t_total, s as f64 * eps)?;
            Ok(xs.iter().map(|&x| tube_aperture(x - xc, half_width)).collect())
        })
        .collect::<Result<_>>()?;

    let m = kernel::slice_matrix(grid, eps, lagrangian, units)?;
    let n = grid.len();
    let (ia, ib) = (grid.nearest_index(x_a), grid.nearest_index(x_b));

    let run = |masked: bool| {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[ia] = Complex64::new(1.0, 0.0);
        for s in 1..=n_slices {
            v = super::matvec(&m, &v);
            if masked && s < n_slices {
                for (a, w) in v.iter_mut().zip(&masks[s - 1]) {
                    *a *= *w;
                }
            }
        }
        v[ib]
    };

    let full = run(false).norm();
    if !(full > 0.0) || !full.is_finite() {
        return Err(Error::NonFinite(format!("full kernel magnitude {full}")));
    }
    Ok(run(true).norm() / full)
}
