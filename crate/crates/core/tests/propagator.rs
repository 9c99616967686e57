use std::f64::consts::PI;

use branchpath::propagator::{
    analytic_kernel, compose_propagator, kernel_element, propagate, propagate_sliced, tube_amplitude_fraction,
    LagrangianSpec, TimeSlicing,
};
use branchpath::wavepacket::gaussian_sigma_at;
use branchpath::{Complex64, Grid1D, UnitSystem, WaveFunction};
use proptest::prelude::*;

fn nat() -> UnitSystem {
    UnitSystem::natural()
}

fn acceptance_grid() -> Grid1D {
    Grid1D::new(-20.0, 20.0, 801).unwrap()
}

fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn composed_matrix_matches_closed_form_at_64_slices() {
    let g = acceptance_grid();
    let l = LagrangianSpec::free(1.0).unwrap();
    let p = compose_propagator(&g, &TimeSlicing::new(1.0, 64).unwrap(), &l, &nat()).unwrap();
    let exact = analytic_kernel(0.0, 1.0, 1.0, &l, &nat()).unwrap();
    assert!(rel_err(p.kernel(0.0, 1.0), exact) < 1e-2);
    // the vector route gives the same entry
    let k = kernel_element(&g, &TimeSlicing::new(1.0, 64).unwrap(), &l, &nat(), 0.0, 1.0).unwrap();
    assert!((k - p.kernel(0.0, 1.0)).norm() < 1e-12 * k.norm());
}

#[test]
fn composition_is_deterministic() {
    let g = Grid1D::new(-10.0, 10.0, 201).unwrap();
    let l = LagrangianSpec::constant_force(1.0, 0.5).unwrap();
    let s = TimeSlicing::new(1.0, 12).unwrap();
    let a = compose_propagator(&g, &s, &l, &nat()).unwrap();
    let b = compose_propagator(&g, &s, &l, &nat()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn constant_force_error_decreases_with_slices() {
    let g = acceptance_grid();
    let l = LagrangianSpec::constant_force(1.0, 1.0).unwrap();
    let exact = analytic_kernel(0.0, 1.0, 1.0, &l, &nat()).unwrap();
    let errs: Vec<f64> = [8, 16, 32, 64, 128]
        .iter()
        .map(|&n| rel_err(kernel_element(&g, &TimeSlicing::new(1.0, n).unwrap(), &l, &nat(), 0.0, 1.0).unwrap(), exact))
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    assert!(errs[3] < 2e-2);
}

#[test]
fn free_closed_form_at_displacement_two() {
    let l = LagrangianSpec::free(1.0).unwrap();
    let k = analytic_kernel(0.0, 2.0, 1.0, &l, &nat()).unwrap();
    assert!((k.norm() - (2.0 * PI).powf(-0.5)).abs() < 1e-15);
    let phase = (k.arg() - (2.0 - PI / 4.0)).rem_euclid(2.0 * PI);
    assert!(phase.min(2.0 * PI - phase) < 1e-12);
    // and the time-sliced kernel converges to it
    let s = TimeSlicing::new(1.0, 64).unwrap();
    let kd = kernel_element(&acceptance_grid(), &s, &l, &nat(), 0.0, 2.0).unwrap();
    assert!(rel_err(kd, k) < 1e-6);
}

#[test]
fn half_time_propagator_applied_twice_equals_full() {
    let g = Grid1D::new(-12.0, 12.0, 321).unwrap();
    let psi = WaveFunction::gaussian(g, -1.0, 0.8, 1.0).unwrap();
    for l in [LagrangianSpec::free(1.0).unwrap(), LagrangianSpec::constant_force(1.0, 0.7).unwrap()] {
        let full = compose_propagator(&g, &TimeSlicing::new(1.0, 32).unwrap(), &l, &nat()).unwrap();
        let half = compose_propagator(&g, &TimeSlicing::new(0.5, 16).unwrap(), &l, &nat()).unwrap();
        let a = propagate(&psi, &full).unwrap().normalize().unwrap();
        let b = propagate(&propagate(&psi, &half).unwrap(), &half).unwrap().normalize().unwrap();
        assert!(a.distance(&b).unwrap() < 1e-6);
    }
}

#[test]
fn norm_preserved_for_interior_packet() {
    let g = acceptance_grid();
    let psi = WaveFunction::gaussian(g, 0.0, 1.0, 0.0).unwrap();
    let l = LagrangianSpec::free(1.0).unwrap();
    let p = compose_propagator(&g, &TimeSlicing::new(1.0, 64).unwrap(), &l, &nat()).unwrap();
    let n = propagate(&psi, &p).unwrap().norm();
    assert!((0.999..=1.001).contains(&n), "{n}");
}

#[test]
fn moving_packet_follows_ehrenfest() {
    let g = acceptance_grid();
    let (v0, t) = (2.0, 2.0);
    let psi = WaveFunction::gaussian(g, -2.0, 1.0, v0).unwrap();
    let l = LagrangianSpec::free(1.0).unwrap();
    let out = propagate_sliced(&psi, &TimeSlicing::new(t, 64).unwrap(), &l, &nat()).unwrap();
    let shift = out.mean_position() - psi.mean_position();
    assert!((shift - v0 * t).abs() < 0.02 * v0 * t, "{shift}");
}

#[test]
fn measured_width_follows_gaussian_spreading_law() {
    // rate·T ≈ 1: ħT/(2mσ₀²) = 1 with σ₀ = 1/√2
    let g = acceptance_grid();
    let sigma0 = std::f64::consts::FRAC_1_SQRT_2;
    let psi = WaveFunction::gaussian(g, 0.0, sigma0, 0.0).unwrap();
    let l = LagrangianSpec::free(1.0).unwrap();
    for t in [0.5, 1.0, 2.0] {
        let out = propagate_sliced(&psi, &TimeSlicing::new(t, 64).unwrap(), &l, &nat()).unwrap();
        let measured = out.normalize().unwrap().position_spread();
        let law = gaussian_sigma_at(1.0, sigma0, t, &nat());
        assert!((measured - law).abs() < 0.02 * law, "t = {t}: {measured} vs {law}");
    }
}

fn tube_fraction(mass: f64, scale: f64, c: f64) -> f64 {
    // grid and endpoints scale with the free-spreading length √(ħT/m)
    let g = Grid1D::new(-20.0 * scale, 20.0 * scale, 801).unwrap();
    let l = LagrangianSpec::free(mass).unwrap();
    let h = c * (1.0 / mass).sqrt();
    tube_amplitude_fraction(&g, &TimeSlicing::new(1.0, 16).unwrap(), &l, &nat(), h, (0.0, scale)).unwrap()
}

#[test]
fn tube_of_three_and_a_half_spreading_lengths_carries_ninety_percent() {
    let light = tube_fraction(1.0, 1.0, 3.5);
    let heavy = tube_fraction(100.0, 0.1, 3.5);
    assert!(light >= 0.9, "{light}");
    assert!(heavy >= 0.9, "{heavy}");
    // a narrower tube does not
    assert!(tube_fraction(1.0, 1.0, 2.0) < 0.9);
}

#[test]
fn tube_limits() {
    let g = acceptance_grid();
    let l = LagrangianSpec::free(1.0).unwrap();
    let s = TimeSlicing::new(1.0, 16).unwrap();
    let wide = tube_amplitude_fraction(&g, &s, &l, &nat(), 1e6 * g.span(), (0.0, 1.0)).unwrap();
    assert!((wide - 1.0).abs() < 1e-10, "{wide}");
    let narrow = tube_amplitude_fraction(&g, &s, &l, &nat(), 0.1 * g.dx(), (0.0, 1.0)).unwrap();
    assert!(narrow < 1e-10, "{narrow}");
}

fn small_grid() -> Grid1D {
    Grid1D::new(-12.0, 12.0, 241).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tube_fraction_nondecreasing_in_width(h in 0.2f64..6.0, dh in 0.01f64..3.0, f in -1.0f64..1.0) {
        let g = small_grid();
        let l = LagrangianSpec::constant_force(1.0, f).unwrap();
        let s = TimeSlicing::new(1.0, 8).unwrap();
        let a = tube_amplitude_fraction(&g, &s, &l, &nat(), h, (0.0, 1.0)).unwrap();
        let b = tube_amplitude_fraction(&g, &s, &l, &nat(), h + dh, (0.0, 1.0)).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b >= a - 1e-12, "{} -> {}", a, b);
    }

    #[test]
    fn interior_packets_keep_their_norm(x0 in -3.0f64..3.0, sigma in 0.7f64..1.5, k in -1.5f64..1.5,
                                        f in -1.0f64..1.0) {
        let g = acceptance_grid();
        let l = LagrangianSpec::constant_force(1.0, f).unwrap();
        let psi = WaveFunction::gaussian(g, x0, sigma, k).unwrap();
        let out = propagate_sliced(&psi, &TimeSlicing::new(1.0, 64).unwrap(), &l, &nat()).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-3, "{}", out.norm());
    }

    #[test]
    fn slicing_composes(x0 in -2.0f64..2.0, sigma in 0.7f64..1.5, k in -1.0f64..1.0, f in -1.0f64..1.0,
                        n in 2usize..12) {
        let g = small_grid();
        let l = LagrangianSpec::constant_force(1.0, f).unwrap();
        let psi = WaveFunction::gaussian(g, x0, sigma, k).unwrap();
        let eps = 1.0 / 16.0;
        let whole = propagate_sliced(&psi, &TimeSlicing::new(2.0 * n as f64 * eps, 2 * n).unwrap(), &l, &nat()).unwrap();
        let half = TimeSlicing::new(n as f64 * eps, n).unwrap();
        let twice = propagate_sliced(&propagate_sliced(&psi, &half, &l, &nat()).unwrap(), &half, &l, &nat()).unwrap();
        prop_assert!(whole.normalize().unwrap().distance(&twice.normalize().unwrap()).unwrap() < 1e-6);
    }
}
