use serde::Serialize;

/// Reduced Planck constant in J·s (exact since the 2019 SI redefinition).
pub const HBAR_SI: f64 = 1.054_571_817e-34;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitMode {
    Si,
    Natural,
}

/// Selects the value of ħ used by every formula in the crate.
///
/// Natural mode (ħ = 1) is used for kernel convergence work at O(1) scales;
/// SI mode reproduces laboratory-scale spreading estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitSystem {
    hbar: f64,
    mode: UnitMode,
}

impl UnitSystem {
    pub const fn si() -> Self {
        Self { hbar: HBAR_SI, mode: UnitMode::Si }
    }

    pub const fn natural() -> Self {
        Self { hbar: 1.0, mode: UnitMode::Natural }
    }

    pub fn new(mode: UnitMode) -> Self {
        match mode {
            UnitMode::Si => Self::si(),
            UnitMode::Natural => Self::natural(),
        }
    }

    #[inline]
    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mode(&self) -> UnitMode {
        self.mode
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self::natural()
    }
}
