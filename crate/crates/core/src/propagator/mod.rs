//! Time-sliced path-integral propagators.
//!
//! A slice of duration ε maps amplitudes between grid points through the
//! short-time kernel; composing `N` slices integrates over every broken-line
//! path through the grid. The one-slice matrix uses the free kernel projected
//! onto the wavenumbers the grid can represent (see [`kernel::slice_matrix`]),
//! which keeps matrix powers bounded; the potential enters as the exact
//! midpoint phase `e^{−iεV((x+x')/2)/ħ}`.

mod action;
pub mod kernel;
mod lagrangian;
mod tube;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::units::UnitSystem;
use crate::wave::WaveFunction;

pub use action::{action, Path};
pub use kernel::{analytic_kernel, short_time_kernel};
pub use lagrangian::{LagrangianSpec, PotentialSpec, TabulatedPotential};
pub use tube::{classical_position, tube_amplitude_fraction, tube_aperture};

/// Splits `[0, T]` into `N` equal steps of `ε = T/N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSlicing {
    total_time: f64,
    n_slices: usize,
}

impl TimeSlicing {
    pub fn new(total_time: f64, n_slices: usize) -> Result<Self> {
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(Error::InvalidParameter(format!("total time must be positive, got {total_time}")));
        }
        if n_slices == 0 {
            return Err(Error::InvalidParameter("need at least one time slice".into()));
        }
        Ok(Self { total_time, n_slices })
    }

    /// Zero-duration slicing; composes to the identity.
    pub fn identity() -> Self {
        Self { total_time: 0.0, n_slices: 0 }
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn n_slices(&self) -> usize {
        self.n_slices
    }

    pub fn epsilon(&self) -> f64 {
        if self.n_slices == 0 {
            0.0
        } else {
            self.total_time / self.n_slices as f64
        }
    }

    pub fn is_identity(&self) -> bool {
        self.n_slices == 0
    }
}

/// Dense `n × n` transfer matrix over `time_span`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    grid: Grid1D,
    matrix: Vec<Complex64>,
    time_span: f64,
    lagrangian_id: String,
}

impl Propagator {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn time_span(&self) -> f64 {
        self.time_span
    }

    pub fn lagrangian_id(&self) -> &str {
        &self.lagrangian_id
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    /// Entry mapping grid point `from` to grid point `to`.
    #[inline]
    pub fn element(&self, to: usize, from: usize) -> Complex64 {
        self.matrix[to * self.grid.len() + from]
    }

    /// Kernel density `K(x_b, T; x_a, 0) ≈ M[b][a]/dx` at the nearest grid points.
    pub fn kernel(&self, x_a: f64, x_b: f64) -> Complex64 {
        let (a, b) = (self.grid.nearest_index(x_a), self.grid.nearest_index(x_b));
        self.element(b, a) / self.grid.dx()
    }
}

fn identity_matrix(n: usize) -> Vec<Complex64> {
    let mut m = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        m[i * n + i] = Complex64::new(1.0, 0.0);
    }
    m
}

/// `a · b` for row-major `n × n` complex matrices.
fn matmul(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(0.0, 0.0); n * n];
    let one = [1.0, 0.0];
    let zero = [0.0, 0.0];
    let s = n as isize;
    // SAFETY: Complex64 is repr(C) {re, im}, layout-identical to [f64; 2];
    // all three buffers hold n*n elements with row stride n and column stride 1.
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            n,
            n,
            n,
            one,
            a.as_ptr() as *const [f64; 2],
            s,
            1,
            b.as_ptr() as *const [f64; 2],
            s,
            1,
            zero,
            c.as_mut_ptr() as *mut [f64; 2],
            s,
            1,
        );
    }
    c
}

/// `y = M·x` for a row-major square matrix; rows are independent, so the
/// result does not depend on how rows are scheduled.
fn matvec(m: &[Complex64], x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    m.par_chunks(n).map(|row| row.iter().zip(x).fold(Complex64::new(0.0, 0.0), |acc, (a, b)| acc + a * b)).collect()
}

/// `(M_ε)^N` for the given Lagrangian, built by repeated squaring.
pub fn compose_propagator(
    grid: &Grid1D,
    slicing: &TimeSlicing,
    lagrangian: &LagrangianSpec,
    units: &UnitSystem,
) -> Result<Propagator> {
    let n = grid.len();
    let matrix = if slicing.is_identity() {
        identity_matrix(n)
    } else {
        let mut base = kernel::slice_matrix(grid, slicing.epsilon(), lagrangian, units)?;
        let mut exp = slicing.n_slices();
        let mut acc: Option<Vec<Complex64>> = None;
        loop {
            if exp & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => matmul(&a, &base, n),
                });
            }
            exp >>= 1;
            if exp == 0 {
                break;
            }
            base = matmul(&base, &base, n);
        }
        acc.expect("n_slices >= 1")
    };
    if matrix.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite("composed propagator".into()));
    }
    Ok(Propagator { grid: *grid, matrix, time_span: slicing.total_time(), lagrangian_id: lagrangian.id() })
}

/// `ψ' = M·ψ`. No renormalisation: norm drift is left visible to the caller.
pub fn propagate(psi: &WaveFunction, prop: &Propagator) -> Result<WaveFunction> {
    if psi.grid() != prop.grid() {
        return Err(Error::GridMismatch);
    }
    WaveFunction::new(*psi.grid(), matvec(&prop.matrix, psi.amplitudes()))
}

/// Same result as `propagate(psi, compose_propagator(..))`, computed as `N`
/// one-slice matrix-vector products.
pub fn propagate_sliced(
    psi: &WaveFunction,
    slicing: &TimeSlicing,
    lagrangian: &LagrangianSpec,
    units: &UnitSystem,
) -> Result<WaveFunction> {
    if slicing.is_identity() {
        return Ok(psi.clone());
    }
    let m = kernel::slice_matrix(psi.grid(), slicing.epsilon(), lagrangian, units)?;
    let mut v = psi.amplitudes().to_vec();
    for _ in 0..slicing.n_slices() {
        v = matvec(&m, &v);
    }
    WaveFunction::new(*psi.grid(), v)
}

/// Single entry `K(x_b, T; x_a, 0) = (M_ε^N)[b][a] / dx` at the nearest grid
/// points, computed by propagating a unit spike instead of forming `M^N`.
pub fn kernel_element(
    grid: &Grid1D,
    slicing: &TimeSlicing,
    lagrangian: &LagrangianSpec,
    units: &UnitSystem,
    x_a: f64,
    x_b: f64,
) -> Result<Complex64> {
    let spike = WaveFunction::unit_spike(*grid, x_a);
    let out = propagate_sliced(&spike, slicing, lagrangian, units)?;
    Ok(out.amplitudes()[grid.nearest_index(x_b)] / grid.dx())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat() -> UnitSystem {
        UnitSystem::natural()
    }

    #[test]
    fn slicing_validation() {
        assert!(TimeSlicing::new(1.0, 0).is_err());
        assert!(TimeSlicing::new(0.0, 4).is_err());
        assert_eq!(TimeSlicing::new(1.0, 4).unwrap().epsilon(), 0.25);
        assert_eq!(TimeSlicing::identity().epsilon(), 0.0);
    }

    #[test]
    fn identity_slicing_leaves_state_unchanged() {
        let g = Grid1D::new(-5.0, 5.0, 101).unwrap();
        let l = LagrangianSpec::free(1.0).unwrap();
        let p = compose_propagator(&g, &TimeSlicing::identity(), &l, &nat()).unwrap();
        let psi = WaveFunction::gaussian(g, 0.5, 0.7, 1.0).unwrap();
        assert_eq!(propagate(&psi, &p).unwrap(), psi);
    }

    #[test]
    fn single_slice_equals_slice_matrix() {
        let g = Grid1D::new(-3.0, 3.0, 61).unwrap();
        let l = LagrangianSpec::constant_force(1.0, 0.5).unwrap();
        let s = TimeSlicing::new(0.2, 1).unwrap();
        let p = compose_propagator(&g, &s, &l, &nat()).unwrap();
        let m = kernel::slice_matrix(&g, 0.2, &l, &nat()).unwrap();
        assert_eq!(p.matrix(), &m[..]);
    }

    #[test]
    fn matrix_power_agrees_with_spike_propagation() {
        let g = Grid1D::new(-6.0, 6.0, 121).unwrap();
        let l = LagrangianSpec::constant_force(1.0, 1.0).unwrap();
        let s = TimeSlicing::new(0.6, 5).unwrap();
        let p = compose_propagator(&g, &s, &l, &nat()).unwrap();
        for &(a, b) in &[(0.0, 1.0), (-1.0, 0.5), (2.0, 2.0)] {
            let direct = kernel_element(&g, &s, &l, &nat(), a, b).unwrap();
            assert!((p.kernel(a, b) - direct).norm() < 1e-12 * (1.0 + direct.norm()));
        }
    }

    #[test]
    fn grid_mismatch_on_propagate() {
        let g = Grid1D::new(-3.0, 3.0, 61).unwrap();
        let h = Grid1D::new(-3.0, 3.0, 62).unwrap();
        let l = LagrangianSpec::free(1.0).unwrap();
        let p = compose_propagator(&g, &TimeSlicing::identity(), &l, &nat()).unwrap();
        assert_eq!(propagate(&WaveFunction::zeros(h), &p), Err(Error::GridMismatch));
    }

    #[test]
    fn tabulated_potential_outside_table() {
        let g = Grid1D::new(-3.0, 3.0, 61).unwrap();
        let table = TabulatedPotential::new(Grid1D::new(-1.0, 1.0, 5).unwrap(), vec![0.0; 5]).unwrap();
        let l = LagrangianSpec::new(1.0, PotentialSpec::Tabulated(table)).unwrap();
        let s = TimeSlicing::new(0.5, 2).unwrap();
        assert!(matches!(compose_propagator(&g, &s, &l, &nat()), Err(Error::OutOfTable { .. })));
    }

    #[test]
    fn tabulated_linear_table_matches_constant_force() {
        let g = Grid1D::new(-4.0, 4.0, 161).unwrap();
        let f = 0.8;
        let table = TabulatedPotential::new(g, g.points().map(|x| -f * x).collect()).unwrap();
        let tab = LagrangianSpec::new(1.0, PotentialSpec::Tabulated(table)).unwrap();
        let cf = LagrangianSpec::constant_force(1.0, f).unwrap();
        let s = TimeSlicing::new(0.5, 4).unwrap();
        let a = compose_propagator(&g, &s, &tab, &nat()).unwrap();
        let b = compose_propagator(&g, &s, &cf, &nat()).unwrap();
        let worst = a.matrix().iter().zip(b.matrix()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(worst < 1e-12, "{worst}");
    }
}
