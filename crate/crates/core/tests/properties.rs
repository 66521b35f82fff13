mod common;

use common::*;
use miura_scatter::direct::{forward, jost_matrix, ScatteringSamples};
use miura_scatter::io::parse_scattering_csv;
use miura_scatter::marchenko::{build_omega, extract_v, ZeroNodeRule, PAIR_TOLERANCE, RESIDUAL_TOLERANCE};
use miura_scatter::numerics::{distance_mod_pi, reduce_mod_pi, ComplexFunction, SymmetricKGrid, UniformGrid};
use miura_scatter::phase::recover_potentials;
use miura_scatter::problem::RunConfig;
use miura_scatter::scatdata::{extract_f, extract_gamma};
use miura_scatter::transform::{to_zsakns, SchrodingerProblem};
use num_complex::Complex64;
use proptest::prelude::*;

fn small_grid() -> UniformGrid {
    UniformGrid::new(6.0, 241).unwrap()
}

fn bump_problem(a: f64, b: f64, cu: f64, cp: f64, alpha: f64) -> SchrodingerProblem {
    let g = small_grid();
    SchrodingerProblem::new(gaussian(g, a, cu, 0.5), gaussian(g, b, cp, 0.5), alpha).unwrap()
}

fn synthetic(shift: f64) -> ScatteringSamples {
    let kg = SymmetricKGrid::new(16.0, 512).unwrap();
    let vals = kg.nodes().iter().map(|&k| Complex64::cis(2.0 * shift) + 0.3 / Complex64::new(1.0, -2.0 * k)).collect();
    ScatteringSamples::new(kg, vals).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn zero_potential_gives_constant_s(alpha in 0.0..std::f64::consts::PI) {
        let sp = SchrodingerProblem::zero(small_grid(), alpha).unwrap();
        let s = forward(&sp, &SymmetricKGrid::new(8.0, 64).unwrap()).unwrap();
        for z in s.values() {
            prop_assert!((z + Complex64::cis(2.0 * alpha)).norm() < 1e-8);
        }
    }

    #[test]
    fn jost_structure(a in -0.5..0.5f64, b in -0.5..0.5f64, cu in 1.0..4.0f64, k in -20.0..20.0f64) {
        let zp = to_zsakns(&bump_problem(a, b, cu, 2.5, 0.3));
        let j = jost_matrix(&zp, k).unwrap();
        prop_assert!(j.det_defect() < 1e-8);
        prop_assert!(j.symmetry_defect() < 1e-8);
    }

    #[test]
    fn algebraic_inversion(a in -0.5..0.5f64, b in -0.5..0.5f64, cu in 1.0..4.0f64, cp in 1.0..4.0f64, alpha in 0.0..std::f64::consts::PI) {
        let sp = bump_problem(a, b, cu, cp, alpha);
        let zp = to_zsakns(&sp);
        let pots = recover_potentials(zp.v(), zp.phi(), zp.beta()).unwrap();
        for (x, y) in pots.u.values().iter().zip(sp.u().values()).chain(pots.p.values().iter().zip(sp.p().values())) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
        prop_assert!(distance_mod_pi(pots.alpha, alpha) <= 1e-12);
    }

    #[test]
    fn gamma_is_equivariant(gamma in 0.0..std::f64::consts::PI, delta in -3.0..3.0f64) {
        let s = synthetic(gamma);
        let rotated = s.map(|_, z| z * Complex64::cis(2.0 * delta));
        let g0 = extract_gamma(&s, 0.1, 0.2).unwrap().gamma;
        let g1 = extract_gamma(&rotated, 0.1, 0.2).unwrap().gamma;
        prop_assert!(distance_mod_pi(g1, reduce_mod_pi(g0 + delta)) < 1e-6);
    }

    #[test]
    fn extraction_is_linear(a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let grid = UniformGrid::new(2.0, 17).unwrap();
        let (s1, s2) = (synthetic(0.0), synthetic(0.0).map(|k, z| z + 0.1 * Complex64::cis(k) / (1.0 + k * k)));
        let comb = s1.map(|_, z| a * (z - 1.0)).values().iter().zip(s2.values()).map(|(x, y)| x + b * (y - 1.0) + 1.0).collect();
        let comb = ScatteringSamples::new(s1.k_grid().clone(), comb).unwrap();
        let (f1, f2, fc) = (extract_f(&s1, 0.0, grid), extract_f(&s2, 0.0, grid), extract_f(&comb, 0.0, grid));
        for ((x, y), z) in f1.positive.values().iter().zip(f2.positive.values()).zip(fc.positive.values()) {
            prop_assert!((a * x + b * y - z).norm() < 1e-12);
        }
    }

    #[test]
    fn omega_is_hermitian(re in prop::collection::vec(-1.0..1.0f64, 9), im in prop::collection::vec(-1.0..1.0f64, 9), s in 0.0..10.0f64) {
        let vals = re.iter().zip(&im).map(|(&x, &y)| Complex64::new(x, y)).collect();
        let kern = build_omega(ComplexFunction::new(UniformGrid::new(8.0, 9).unwrap(), vals).unwrap());
        let w = kern.omega(s);
        prop_assert_eq!(w, w.adjoint());
    }

    #[test]
    fn marchenko_solves_are_consistent(c in 0.01..0.6f64, a in 0.5..2.0f64, w in -3.0..3.0f64) {
        let grid = UniformGrid::new(8.0, 129).unwrap();
        let f = ComplexFunction::from_fn(grid, |s| c * Complex64::cis(w * s) * (-a * s).exp());
        let out = extract_v(&build_omega(f), UniformGrid::new(4.0, 5).unwrap(), ZeroNodeRule::Collocation).unwrap();
        prop_assert!(out.max_residual <= RESIDUAL_TOLERANCE);
        prop_assert!(out.max_pair_defect <= PAIR_TOLERANCE);
    }

    #[test]
    fn scattering_csv_round_trip(vals in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 1..20)) {
        let n = 2 * vals.len();
        let kg = SymmetricKGrid::new(3.0, n).unwrap();
        let z: Vec<Complex64> = vals.iter().chain(vals.iter()).map(|&(a, b)| Complex64::new(a, b)).collect();
        let mut text = String::from("k,re_S,im_S\n");
        for (k, v) in kg.nodes().iter().zip(&z) {
            text += &format!("{k},{},{}\n", v.re, v.im);
        }
        let s = parse_scattering_csv(&text).unwrap();
        prop_assert_eq!(s.values(), &z[..]);
    }

    #[test]
    fn csv_parser_never_panics(text in "\\PC{0,200}") {
        let _ = parse_scattering_csv(&text);
    }

    #[test]
    fn config_parser_never_panics(text in "\\PC{0,200}") {
        if let Ok(cfg) = RunConfig::from_json(&text) {
            let _ = cfg.validate();
        }
    }
}
