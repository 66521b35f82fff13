mod common;

use common::*;
use miura_scatter::direct::{forward, ScatteringSamples};
use miura_scatter::numerics::{distance_mod_pi, relative_l2_error, ComplexFunction, RealFunction, UniformGrid};
use miura_scatter::phase::*;
use miura_scatter::transform::{to_zsakns, SchrodingerProblem};
use miura_scatter::Error;
use num_complex::Complex64;
use statrs::function::erf::erfc;
use std::f64::consts::PI;

/// Gaussian `u`, `p` with the phase `φ = ∫ₓ^∞ p` in closed form.
fn analytic_pair(grid: UniformGrid) -> (ComplexFunction, RealFunction) {
    let (a, c, w) = (0.5, 3.0, 0.5);
    let phi = RealFunction::from_fn(grid, |x| 0.5 * a * w * PI.sqrt() * erfc((x - c) / w));
    let v = ComplexFunction::from_fn(grid, |x| {
        let u = 0.5 * (-((x - 2.0) / w).powi(2)).exp();
        let p = a * (-((x - c) / w).powi(2)).exp();
        let f = 0.5 * a * w * PI.sqrt() * erfc((x - c) / w);
        Complex64::new(-u, p) * Complex64::cis(-2.0 * f)
    });
    (v, phi)
}

#[test]
fn contraction_ratios_on_the_test_family() {
    for (name, zp) in test_family(default_grid()) {
        let onset = find_x0(zp.v(), TAIL_THRESHOLD).unwrap();
        let fp = fixed_point_phi(zp.v(), onset.index, 1e-12, 50).unwrap();
        assert!(fp.iterations <= 50, "{name}");
        let worst = fp.contraction_ratios.iter().copied().fold(0.0, f64::max);
        assert!(worst <= 0.55, "{name}: ratio {worst}");
    }
}

#[test]
fn phase_matches_integral_of_p() {
    let sp = gaussian_problem(default_grid(), 0.5, 0.2);
    let zp = to_zsakns(&sp);
    let onset = find_x0(zp.v(), TAIL_THRESHOLD).unwrap();
    let fp = fixed_point_phi(zp.v(), onset.index, 1e-12, 50).unwrap();
    let phi = extend_phi(zp.v(), &fp).unwrap();
    assert_eq!(*phi.values().last().unwrap(), 0.0);
    assert_eq!(phi.values()[onset.index], fp.values[0]);
    let err = phi.values().iter().zip(zp.phi().values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-5, "max error {err}");
    assert!(ode_residual(zp.v(), &phi) < 1e-4);
}

#[test]
fn extension_is_fourth_order() {
    let err = |n: usize| {
        let grid = UniformGrid::new(8.0, n).unwrap();
        let (v, exact) = analytic_pair(grid);
        let start = (n - 1) / 2;
        let tail = FixedPoint {
            start,
            values: exact.values()[start..].to_vec(),
            iterations: 0,
            contraction_ratios: vec![],
        };
        let phi = extend_phi(&v, &tail).unwrap();
        phi.values().iter().zip(exact.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    };
    let (coarse, fine) = (err(129), err(257));
    let ratio = coarse / fine;
    assert!((12.0..20.0).contains(&ratio), "{coarse:e} / {fine:e} = {ratio}");
}

#[test]
fn algebraic_round_trip() {
    let grid = default_grid();
    let problems = [gaussian_problem(grid, 0.5, 0.0), gaussian_problem(grid, 0.3, 2.5), step_problem(grid, 1.2)];
    for sp in problems {
        let zp = to_zsakns(&sp);
        let pots = recover_potentials(zp.v(), zp.phi(), zp.beta()).unwrap();
        for (a, b) in pots.u.values().iter().zip(sp.u().values()).chain(pots.p.values().iter().zip(sp.p().values())) {
            assert!((a - b).abs() <= 1e-10);
        }
        assert!(distance_mod_pi(pots.alpha, sp.alpha()) <= 1e-12);
    }
}

#[test]
fn constant_s_calibrates_to_zero_potential() {
    let grid = UniformGrid::new(4.0, 257).unwrap();
    let k = miura_scatter::SymmetricKGrid::new(16.0, 512).unwrap();
    for alpha in [0.0, 0.4, PI / 2.0, 3.0] {
        let zero = SchrodingerProblem::zero(grid, alpha).unwrap();
        let s = forward(&zero, &k).unwrap();
        let c = s.values()[0];
        let r = inverse_scatter(s, &InverseConfig::new(grid)).unwrap();
        assert!(r.v.max_abs() < 1e-12);
        assert!(r.u.max_abs() < 1e-12);
        assert!(r.p.max_abs() < 1e-12);
        assert!(distance_mod_pi(r.alpha, 0.5 * c.arg() - PI / 2.0) < 1e-12);
        assert!(distance_mod_pi(r.alpha, alpha) < 1e-12, "alpha {alpha}: {}", r.alpha);
    }
}

#[test]
fn non_unimodular_data_is_rejected() {
    let k = miura_scatter::SymmetricKGrid::new(16.0, 512).unwrap();
    let s = ScatteringSamples::new(k, vec![Complex64::new(1.1, 0.0); 512]).unwrap();
    let err = inverse_scatter(s, &InverseConfig::new(UniformGrid::new(4.0, 257).unwrap())).unwrap_err();
    match err.root() {
        Error::Rejected(report) => assert!(!report.check("unimodularity").unwrap().passed),
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn gaussian_round_trip_at_half_amplitude() {
    let grid = default_grid();
    let sp = gaussian_problem(grid, 0.5, 1.0);
    let r = inverse_scatter(forward(&sp, &default_k_grid()).unwrap(), &InverseConfig::new(grid)).unwrap();
    let (eu, ep) = (relative_l2_error(&r.u, sp.u()).unwrap(), relative_l2_error(&r.p, sp.p()).unwrap());
    assert!(eu <= 5e-2 && ep <= 5e-2, "u {eu:e}, p {ep:e}");
    assert!(distance_mod_pi(r.alpha, 1.0) <= 1e-3);
    assert!(r.diagnostics.contraction_ratios.iter().all(|&q| q <= 0.55));
}
