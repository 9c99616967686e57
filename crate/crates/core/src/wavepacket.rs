//! Free Gaussian spreading estimates.
//!
//! These use the uncertainty convention `m·Δv₀·Δx₀ = ħ`, so the total spread
//! after `Δt` is `Δx₁ = Δx₀·√(1 + (ħΔt/mΔx₀²)²)`. A minimum-uncertainty
//! Gaussian whose |ψ|² has standard deviation σ₀ instead satisfies
//! `σ(t) = σ₀·√(1 + (ħt/2mσ₀²)²)`; see [`gaussian_sigma_at`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::units::UnitSystem;
use crate::wave::WaveFunction;

/// CODATA 2018 electron mass, kg.
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
/// Electron Compton wavelength h/(m_e·c), m.
pub const ELECTRON_COMPTON_WAVELENGTH: f64 = 2.426_310_238_67e-12;
/// Rounded Compton wavelength used by the default electron preset, m.
pub const ROUNDED_COMPTON_WAVELENGTH: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianPacket {
    pub mass: f64,
    pub center: f64,
    pub width: f64,
    pub velocity: f64,
}

impl GaussianPacket {
    pub fn new(mass: f64, center: f64, width: f64, velocity: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidParameter(format!("mass must be positive and finite, got {mass}")));
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParameter(format!("width must be positive and finite, got {width}")));
        }
        if !(center.is_finite() && velocity.is_finite()) {
            return Err(Error::NonFinite("packet center/velocity".into()));
        }
        Ok(Self { mass, center, width, velocity })
    }

    /// Electron localised to the Compton wavelength: rounded to 1e-11 m by
    /// default, or the exact value 2.43e-12 m.
    pub fn electron(exact_compton: bool) -> Self {
        let width = if exact_compton { ELECTRON_COMPTON_WAVELENGTH } else { ROUNDED_COMPTON_WAVELENGTH };
        Self { mass: ELECTRON_MASS, center: 0.0, width, velocity: 0.0 }
    }

    /// 1 kg object with the same 1e-11 m initial uncertainty.
    pub fn elevator() -> Self {
        Self { mass: 1.0, center: 0.0, width: ROUNDED_COMPTON_WAVELENGTH, velocity: 0.0 }
    }

    /// Sampled minimum-uncertainty state: |ψ|² has standard deviation
    /// `width`, mean `center` and mean momentum `m·velocity`.
    pub fn wavefunction(&self, grid: Grid1D, units: &UnitSystem) -> Result<WaveFunction> {
        WaveFunction::gaussian(grid, self.center, self.width, self.mass * self.velocity / units.hbar())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpreadReport {
    pub rate: f64,
    pub delta_x_v: f64,
    pub delta_x_1: f64,
    pub delta_t: f64,
}

fn check_duration(delta_t: f64) -> Result<()> {
    if delta_t >= 0.0 && delta_t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("elapsed time must be non-negative, got {delta_t}")))
    }
}

/// `ħ / (m·Δx₀²)`.
pub fn spread_rate(packet: &GaussianPacket, units: &UnitSystem) -> f64 {
    units.hbar() / (packet.mass * packet.width * packet.width)
}

/// Velocity-uncertainty contribution `Δx_v = ħΔt / (m·Δx₀)`.
pub fn spread_from_velocity(packet: &GaussianPacket, delta_t: f64, units: &UnitSystem) -> Result<f64> {
    check_duration(delta_t)?;
    Ok(units.hbar() * delta_t / (packet.mass * packet.width))
}

/// `Δx₁ = Δx₀·√(1 + (rate·Δt)²) = √(Δx₀² + Δx_v²)`.
pub fn spread_total(packet: &GaussianPacket, delta_t: f64, units: &UnitSystem) -> Result<f64> {
    check_duration(delta_t)?;
    Ok(packet.width * (spread_rate(packet, units) * delta_t).hypot(1.0))
}

/// Inverse of [`spread_total`]: time for the spread to reach `target`.
pub fn wait_time_for_spread(packet: &GaussianPacket, target: f64, units: &UnitSystem) -> Result<f64> {
    let w = packet.width;
    if !(target >= w) {
        return Err(Error::TargetBelowInitial { target, initial: w });
    }
    Ok(packet.mass * w / units.hbar() * ((target - w) * (target + w)).sqrt())
}

pub fn spread_report(packet: &GaussianPacket, delta_t: f64, units: &UnitSystem) -> Result<SpreadReport> {
    Ok(SpreadReport {
        rate: spread_rate(packet, units),
        delta_x_v: spread_from_velocity(packet, delta_t, units)?,
        delta_x_1: spread_total(packet, delta_t, units)?,
        delta_t,
    })
}

/// Initial width minimising [`spread_total`] at fixed `m` and `Δt`: `√(ħΔt/m)`.
pub fn optimal_initial_width(mass: f64, delta_t: f64, units: &UnitSystem) -> f64 {
    (units.hbar() * delta_t / mass).sqrt()
}

/// Standard deviation of |ψ|² for a free minimum-uncertainty Gaussian.
pub fn gaussian_sigma_at(mass: f64, sigma0: f64, t: f64, units: &UnitSystem) -> f64 {
    sigma0 * (units.hbar() * t / (2.0 * mass * sigma0 * sigma0)).hypot(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn electron_rate() {
        let si = UnitSystem::si();
        let r = spread_rate(&GaussianPacket::electron(false), &si);
        assert!(rel(r, 1.158e18) < 1e-3, "{r}");
        let exact = spread_rate(&GaussianPacket::electron(true), &si);
        assert!(rel(exact, 1.96e19) < 5e-3, "{exact}");
    }

    #[test]
    fn elevator_rate_and_spread() {
        let si = UnitSystem::si();
        let p = GaussianPacket::elevator();
        assert!(rel(spread_rate(&p, &si), 1.0546e-12) < 1e-4);
        assert!(rel(spread_from_velocity(&p, 1.0, &si).unwrap(), 1.0546e-23) < 1e-4);
        // the elevator's spread after one second is indistinguishable from its start
        assert_eq!(spread_total(&p, 1.0, &si).unwrap(), p.width);
    }

    #[test]
    fn electron_one_second() {
        let si = UnitSystem::si();
        let p = GaussianPacket::electron(false);
        let dxv = spread_from_velocity(&p, 1.0, &si).unwrap();
        assert!(rel(dxv, 1.158e7) < 1e-3);
        let total = spread_total(&p, 1.0, &si).unwrap();
        assert!(rel(total, dxv) < 1e-15);
        let exact = spread_from_velocity(&GaussianPacket::electron(true), 1.0, &si).unwrap();
        assert!(rel(exact, 4.77e7) < 5e-3, "{exact}");
    }

    #[test]
    fn wait_times() {
        let si = UnitSystem::si();
        let t = wait_time_for_spread(&GaussianPacket::elevator(), 1.0, &si).unwrap();
        assert!(rel(t, 9.4825e22) < 1e-4, "{t}");
        let t = wait_time_for_spread(&GaussianPacket::electron(false), 1.0, &si).unwrap();
        assert!(rel(t, 8.638e-8) < 1e-3, "{t}");
        let p = GaussianPacket::elevator();
        assert_eq!(wait_time_for_spread(&p, p.width, &si).unwrap(), 0.0);
        assert!(matches!(wait_time_for_spread(&p, 0.5 * p.width, &si), Err(Error::TargetBelowInitial { .. })));
    }

    #[test]
    fn trivial_points() {
        let nat = UnitSystem::natural();
        let p = GaussianPacket::new(2.0, 0.0, 0.5, 0.0).unwrap();
        assert_eq!(spread_from_velocity(&p, 0.0, &nat).unwrap(), 0.0);
        assert_eq!(spread_total(&p, 0.0, &nat).unwrap(), 0.5);
        let t1 = 1.0 / spread_rate(&p, &nat);
        assert!(rel(spread_total(&p, t1, &nat).unwrap(), 0.5 * 2f64.sqrt()) < 1e-15);
        let q = GaussianPacket::new(2.0, 0.0, 1.0, 0.0).unwrap();
        assert!(rel(spread_rate(&p, &nat), 4.0 * spread_rate(&q, &nat)) < 1e-15);
        assert!(spread_total(&p, -1.0, &nat).is_err());
    }

    #[test]
    fn packet_validation() {
        assert!(GaussianPacket::new(0.0, 0.0, 1.0, 0.0).is_err());
        assert!(GaussianPacket::new(1.0, 0.0, -1.0, 0.0).is_err());
        assert!(GaussianPacket::new(1.0, f64::NAN, 1.0, 0.0).is_err());
    }

    fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if f(c) < f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn width_minimising_total_spread() {
        let nat = UnitSystem::natural();
        for &(m, dt) in &[(1.0, 1.0), (3.0, 0.2), (0.5, 7.0)] {
            let f = |w: f64| spread_total(&GaussianPacket::new(m, 0.0, w, 0.0).unwrap(), dt, &nat).unwrap();
            let best = golden_section_min(f, 1e-3, 10.0);
            assert!(rel(best, optimal_initial_width(m, dt, &nat)) < 1e-6);
        }
    }

    proptest! {
        #[test]
        fn pythagorean_and_monotone(m in 1e-3f64..1e3, w in 1e-3f64..1e2, dt in 0.0f64..1e4) {
            let nat = UnitSystem::natural();
            let p = GaussianPacket::new(m, 0.0, w, 0.0).unwrap();
            let total = spread_total(&p, dt, &nat).unwrap();
            let dxv = spread_from_velocity(&p, dt, &nat).unwrap();
            let pyth = (w * w + dxv * dxv).sqrt();
            prop_assert!((total - pyth).abs() <= 1e-12 * pyth);
            prop_assert!(total >= w.max(dxv) * (1.0 - 1e-15));
            prop_assert!(spread_total(&p, dt * 1.01 + 1e-9, &nat).unwrap() > total);
        }

        #[test]
        fn round_trip(m in 1e-3f64..1e3, w in 1e-3f64..1e2, log_rt in -3.0f64..6.0) {
            let nat = UnitSystem::natural();
            let p = GaussianPacket::new(m, 0.0, w, 0.0).unwrap();
            let t = 10f64.powf(log_rt) / spread_rate(&p, &nat);
            let back = wait_time_for_spread(&p, spread_total(&p, t, &nat).unwrap(), &nat).unwrap();
            prop_assert!((back - t).abs() <= 1e-9 * t);
        }
    }
}
