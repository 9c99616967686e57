use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Grid1D;

/// Potential values sampled on their own uniform grid, linearly interpolated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TabulatedPotential {
    grid: Grid1D,
    values: Vec<f64>,
}

impl TabulatedPotential {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "{} potential values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("tabulated potential value {v}")));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_at(&self, x: f64) -> Result<f64> {
        let g = &self.grid;
        // half-ulp slack so midpoints of the table's own end points are accepted
        let slack = 1e-12 * g.span();
        if !(x >= g.x_min() - slack && x <= g.x_max() + slack) {
            return Err(Error::OutOfTable { x, min: g.x_min(), max: g.x_max() });
        }
        let t = ((x - g.x_min()) / g.dx()).clamp(0.0, (g.len() - 1) as f64);
        let i = (t.floor() as usize).min(g.len() - 2);
        let frac = t - i as f64;
        Ok(self.values[i] * (1.0 - frac) + self.values[i + 1] * frac)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum PotentialSpec {
    Free,
    /// Uniform force `F` along +x, i.e. `V(x) = -F·x`.
    ConstantForce {
        force: f64,
    },
    Tabulated(TabulatedPotential),
}

impl PotentialSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            PotentialSpec::Free => "free",
            PotentialSpec::ConstantForce { .. } => "constant-force",
            PotentialSpec::Tabulated(_) => "tabulated",
        }
    }

    pub fn value_at(&self, x: f64) -> Result<f64> {
        match self {
            PotentialSpec::Free => Ok(0.0),
            PotentialSpec::ConstantForce { force } => Ok(-force * x),
            PotentialSpec::Tabulated(t) => t.value_at(x),
        }
    }
}

/// `L = ½ m ẋ² − V(x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LagrangianSpec {
    mass: f64,
    potential: PotentialSpec,
}

impl LagrangianSpec {
    pub fn new(mass: f64, potential: PotentialSpec) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidParameter(format!("mass must be positive and finite, got {mass}")));
        }
        if let PotentialSpec::ConstantForce { force } = potential {
            if !force.is_finite() {
                return Err(Error::NonFinite(format!("force {force}")));
            }
        }
        Ok(Self { mass, potential })
    }

    pub fn free(mass: f64) -> Result<Self> {
        Self::new(mass, PotentialSpec::Free)
    }

    pub fn constant_force(mass: f64, force: f64) -> Result<Self> {
        Self::new(mass, PotentialSpec::ConstantForce { force })
    }

    #[inline]
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    pub fn potential_at(&self, x: f64) -> Result<f64> {
        self.potential.value_at(x)
    }

    /// Short human-readable identifier, e.g. `constant-force(m=1,F=2)`.
    pub fn id(&self) -> String {
        match &self.potential {
            PotentialSpec::Free => format!("free(m={})", self.mass),
            PotentialSpec::ConstantForce { force } => format!("constant-force(m={},F={})", self.mass, force),
            PotentialSpec::Tabulated(t) => format!("tabulated(m={},n={})", self.mass, t.values.len()),
        }
    }
}
