use serde::Serialize;

use crate::error::{Error, Result};

/// Uniform one-dimensional grid `x_min, x_min + dx, …, x_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if x_min >= x_max {
            return Err(Error::InvalidGrid(format!("x_min ({x_min}) must be below x_max ({x_max})")));
        }
        if n_points < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {n_points}")));
        }
        let grid = Self { x_min, x_max, n_points };
        if !(grid.dx() > 0.0) {
            return Err(Error::InvalidGrid("spacing underflows to zero".into()));
        }
        Ok(grid)
    }

    #[inline]
    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    #[inline]
    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn span(&self) -> f64 {
        self.x_max - self.x_min
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.span() / (self.n_points - 1) as f64
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        // pin the last point so the grid ends exactly at x_max
        if i + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + i as f64 * self.dx()
        }
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.point(i))
    }

    /// Trapezoid quadrature weight of sample `i`.
    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.n_points {
            0.5 * self.dx()
        } else {
            self.dx()
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }

    /// Index of the grid point closest to `x` (clamped to the grid).
    pub fn nearest_index(&self, x: f64) -> usize {
        let t = ((x - self.x_min) / self.dx()).round();
        if t <= 0.0 {
            0
        } else {
            (t as usize).min(self.n_points - 1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_grids() {
        assert!(Grid1D::new(1.0, 1.0, 10).is_err());
        assert!(Grid1D::new(2.0, 1.0, 10).is_err());
        assert!(Grid1D::new(0.0, 1.0, 1).is_err());
        assert!(Grid1D::new(0.0, f64::INFINITY, 10).is_err());
    }

    #[test]
    fn points_are_uniform_and_pinned() {
        let g = Grid1D::new(-20.0, 20.0, 801).unwrap();
        assert_eq!(g.dx(), 0.05);
        assert_eq!(g.point(0), -20.0);
        assert_eq!(g.point(800), 20.0);
        let pts: Vec<f64> = g.points().collect();
        for w in pts.windows(2) {
            assert!(w[1] > w[0]);
            assert!((w[1] - w[0] - 0.05).abs() < 1e-12);
        }
        assert_eq!(g.nearest_index(1.0), 420);
        assert_eq!(g.nearest_index(-100.0), 0);
        assert_eq!(g.nearest_index(100.0), 800);
    }

    #[test]
    fn trapezoid_weights_sum_to_span() {
        let g = Grid1D::new(0.0, 3.0, 31).unwrap();
        let total: f64 = (0..g.len()).map(|i| g.weight(i)).sum();
        assert!((total - 3.0).abs() < 1e-12);
    }
}
