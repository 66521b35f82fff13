//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use common::*;
use miura_scatter::direct::{forward, jost_function, jost_matrix, jost_table, scattering_from_table, winding_number};
use miura_scatter::marchenko::{build_omega, extract_v, ZeroNodeRule};
use miura_scatter::numerics::{distance_mod_pi, relative_l2_error, ComplexFunction, SymmetricKGrid, UniformGrid};
use miura_scatter::phase::{find_x0, fixed_point_phi, inverse_scatter, recover_potentials, InverseConfig, TAIL_THRESHOLD};
use miura_scatter::scatdata::{extract_gamma, ScatConfig};
use miura_scatter::transform::{to_zsakns, SchrodingerProblem};
use miura_scatter::{direct::ScatteringSamples, mat2::Mat2};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::time::Instant;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn det_and_symmetry(m: &Mat2) -> (f64, f64) {
    let det = (m.det() - 1.0).norm();
    let sym = (m.get(0, 1) - m.get(1, 0).conj()).norm().max((m.get(1, 1) - m.get(0, 0).conj()).norm());
    (det, sym)
}

fn zero_potential() -> Outcome {
    let (grid, kg, alpha) = (default_grid(), default_k_grid(), 0.7);
    let sp = SchrodingerProblem::zero(grid, alpha).unwrap();
    let s = forward(&sp, &kg).unwrap();
    let s_dev = s.values().iter().map(|z| (z + Complex64::cis(2.0 * alpha)).norm()).fold(0.0, f64::max);
    let zp = to_zsakns(&sp);
    let mut id_dev = 0.0f64;
    let mut jf_dev = 0.0f64;
    for &k in kg.nodes().iter().step_by(16) {
        id_dev = id_dev.max((jost_matrix(&zp, k).unwrap().psi0 - Mat2::IDENTITY).max_abs());
        jf_dev = jf_dev.max((jost_function(&sp, k).unwrap().s - k * Complex64::cis(alpha)).norm());
    }
    outcome(
        s_dev < 1e-8 && id_dev < 1e-10 && jf_dev < 1e-8,
        format!("|S + e^(2i beta)| {s_dev:.1e}, |Psi - I| {id_dev:.1e}, |s - k e^(i alpha)| {jf_dev:.1e}"),
    )
}

fn structure_and_class(tables: &[(&str, Vec<Mat2>, f64)], kg: &SymmetricKGrid) -> (Outcome, Outcome) {
    let (mut det, mut sym) = (0.0f64, 0.0f64);
    let mut class_ok = true;
    let mut worst_unimod = 0.0f64;
    let mut windings = Vec::new();
    for (name, table, beta) in tables {
        for m in table {
            let (d, s) = det_and_symmetry(m);
            det = det.max(d);
            sym = sym.max(s);
        }
        let s = scattering_from_table(table, kg, *beta).unwrap();
        let defect = s.unimodularity_defect();
        let w = winding_number(&s).unwrap().winding;
        worst_unimod = worst_unimod.max(defect);
        class_ok &= defect < 1e-6 && w == 0 && s.masked.is_empty();
        windings.push(format!("{name} {w}"));
    }
    (
        outcome(det <= 1e-8 && sym <= 1e-8, format!("max |det - 1| {det:.1e}, max symmetry defect {sym:.1e}")),
        outcome(class_ok, format!("max ||S| - 1| {worst_unimod:.1e}, windings [{}]", windings.join(", "))),
    )
}

fn fourier_round_trip() -> Outcome {
    let (kg, gamma) = (default_k_grid(), 0.7);
    let f0 = |z: f64| Complex64::new((-z).exp(), 0.0);
    let s = ScatteringSamples::new(kg.clone(), synthetic_s(&kg, gamma, f0, 40.0, 40_000)).unwrap();
    let scat = ScatConfig::default();
    let g = extract_gamma(&s, scat.band_fraction, scat.spread_tol).unwrap().gamma;
    let grid = UniformGrid::new(4.0, 257).unwrap();
    let f = scat.extract(&s, g, grid).positive;
    let err = relative_l2_error(&f, &ComplexFunction::from_fn(grid, f0)).unwrap();
    let dg = distance_mod_pi(g, gamma);
    outcome(dg <= 1e-4 && err <= 1e-2, format!("|gamma error| {dg:.1e}, relative L2 error of F on [0,4] {err:.1e}"))
}

fn marchenko_closed_form(pipeline_residual: f64) -> Outcome {
    let (c, a) = (0.2, 1.0);
    let kern = build_omega(ComplexFunction::from_fn(UniformGrid::new(12.0, 481).unwrap(), |s| {
        Complex64::new(c * (-a * s).exp(), 0.0)
    }));
    let out = extract_v(&kern, UniformGrid::new(4.0, 17).unwrap(), ZeroNodeRule::Collocation).unwrap();
    let err = out
        .v
        .grid()
        .nodes()
        .zip(out.v.values())
        .map(|(x, z)| {
            let m = c * (-a * x).exp();
            (z - m / (1.0 - m * m / (4.0 * a * a))).norm()
        })
        .fold(0.0, f64::max);
    let residual = out.max_residual.max(pipeline_residual);
    outcome(
        err <= 1e-6 && residual <= 1e-8 && out.max_pair_defect <= 1e-8,
        format!("closed-form error {err:.1e}, max residual {residual:.1e}, pair defect {:.1e}", out.max_pair_defect),
    )
}

fn contraction(extra: &[(Vec<f64>, usize)]) -> Outcome {
    let mut runs: Vec<(Vec<f64>, usize)> = extra.to_vec();
    for (_, zp) in test_family(default_grid()) {
        let onset = find_x0(zp.v(), TAIL_THRESHOLD).unwrap();
        let fp = fixed_point_phi(zp.v(), onset.index, 1e-12, 50).unwrap();
        runs.push((fp.contraction_ratios, fp.iterations));
    }
    let worst = runs.iter().flat_map(|(r, _)| r.iter().copied()).fold(0.0, f64::max);
    let iters = runs.iter().map(|(_, n)| *n).max().unwrap();
    outcome(worst <= 0.55 && iters <= 50, format!("max ratio {worst:.3} over {} inputs, max iterations {iters}", runs.len()))
}

fn algebraic_inversion() -> Outcome {
    let grid = default_grid();
    let mut problems = vec![step_problem(grid, 2.9)];
    for (amp, alpha) in [(0.3, 0.0), (0.5, FRAC_PI_4), (-0.4, 3.0)] {
        problems.push(gaussian_problem(grid, amp, alpha));
    }
    let (mut pot, mut ang) = (0.0f64, 0.0f64);
    for sp in &problems {
        let zp = to_zsakns(sp);
        let r = recover_potentials(zp.v(), zp.phi(), zp.beta()).unwrap();
        for (a, b) in r.u.values().iter().zip(sp.u().values()).chain(r.p.values().iter().zip(sp.p().values())) {
            pot = pot.max((a - b).abs());
        }
        ang = ang.max(distance_mod_pi(r.alpha, sp.alpha()));
    }
    outcome(pot <= 1e-10 && ang <= 1e-12, format!("max |(u,p) error| {pot:.1e}, max alpha error {ang:.1e}"))
}

fn cross_route(kg: &SymmetricKGrid) -> Outcome {
    let grid = default_grid();
    let problems = [gaussian_problem(grid, 0.5, 0.3), step_problem(grid, 1.7), SchrodingerProblem::zero(grid, 2.2).unwrap()];
    let mut worst = 0.0f64;
    for sp in &problems {
        for &k in kg.nodes().iter().filter(|k| (0.5..=32.0).contains(&k.abs())) {
            let jf = jost_function(sp, k).unwrap();
            worst = worst.max((jf.s - jf.dirac_route).norm());
        }
    }
    outcome(worst <= 1e-10, format!("max |Schrodinger route - Dirac route| {worst:.1e}"))
}

struct Trip {
    u: f64,
    p: f64,
    alpha: f64,
    residual: f64,
    ratios: Vec<f64>,
    iterations: usize,
}

fn round_trips(grid: UniformGrid, kg: &SymmetricKGrid, marchenko_step: Option<f64>, alphas: &[f64]) -> Vec<Trip> {
    let base = gaussian_problem(grid, 0.3, 0.0);
    let zp = to_zsakns(&base);
    let table = jost_table(&zp, kg).unwrap();
    let mut cfg = InverseConfig::new(grid);
    cfg.options.marchenko_step = marchenko_step;
    alphas
        .iter()
        .map(|&alpha| {
            let sp = SchrodingerProblem::new(base.u().clone(), base.p().clone(), alpha).unwrap();
            let beta = to_zsakns(&sp).beta();
            let r = inverse_scatter(scattering_from_table(&table, kg, beta).unwrap(), &cfg).unwrap();
            Trip {
                u: relative_l2_error(&r.u, sp.u()).unwrap(),
                p: relative_l2_error(&r.p, sp.p()).unwrap(),
                alpha: distance_mod_pi(r.alpha, alpha),
                residual: r.diagnostics.marchenko_residual,
                ratios: r.diagnostics.contraction_ratios.clone(),
                iterations: r.diagnostics.iterations,
            }
        })
        .collect()
}

fn full_round_trip(coarse: &[Trip], fine: &[Trip], alphas: &[f64]) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for ((c, f), a) in coarse.iter().zip(fine).zip(alphas) {
        let within = c.u <= 5e-2 && c.p <= 5e-2 && c.alpha <= 1e-3;
        let reduced = f.u <= c.u / 2.0 && f.p <= c.p / 2.0;
        ok &= within && reduced;
        parts.push(format!(
            "alpha {a:.3}: u {:.1e} -> {:.1e}, p {:.1e} -> {:.1e}, alpha error {:.1e}",
            c.u, f.u, c.p, f.p, c.alpha
        ));
    }
    outcome(ok, parts.join("; "))
}

fn calibration(coarse: &[Trip], alphas: &[f64]) -> Outcome {
    let grid = UniformGrid::new(4.0, 257).unwrap();
    let kg = SymmetricKGrid::new(16.0, 512).unwrap();
    let mut zero_err = 0.0f64;
    for &alpha in alphas {
        let s = forward(&SchrodingerProblem::zero(grid, alpha).unwrap(), &kg).unwrap();
        let r = inverse_scatter(s, &InverseConfig::new(grid)).unwrap();
        zero_err = zero_err.max(distance_mod_pi(r.alpha, alpha));
    }
    let worst = coarse.iter().map(|t| t.alpha).fold(0.0, f64::max);
    let all = coarse.iter().all(|t| t.u <= 5e-2 && t.p <= 5e-2 && t.alpha <= 1e-3);
    outcome(
        zero_err <= 1e-12 && all,
        format!("zero-potential alpha error {zero_err:.1e}, Gaussian round-trip alpha error {worst:.1e} for all three alpha"),
    )
}

fn main() {
    let start = Instant::now();
    let grid = default_grid();
    let kg = default_k_grid();
    let alphas = [0.0, FRAC_PI_4, FRAC_PI_2];

    let tables: Vec<(&str, Vec<Mat2>, f64)> = test_family(grid)
        .into_iter()
        .map(|(name, zp)| (name, jost_table(&zp, &kg).unwrap(), zp.beta()))
        .collect();
    let coarse = round_trips(grid, &kg, None, &alphas);
    let fine = round_trips(
        UniformGrid::new(16.0, 4095).unwrap(),
        &SymmetricKGrid::new(128.0, 16384).unwrap(),
        Some(1.0 / 32.0),
        &alphas,
    );
    let residual = coarse.iter().chain(&fine).map(|t| t.residual).fold(0.0, f64::max);
    let extra: Vec<(Vec<f64>, usize)> = coarse.iter().chain(&fine).map(|t| (t.ratios.clone(), t.iterations)).collect();

    let (c2, c3) = structure_and_class(&tables, &kg);
    let results = [
        ("zero-potential identities", zero_potential()),
        ("Jost structure", c2),
        ("class-S conformance", c3),
        ("Fourier round trip", fourier_round_trip()),
        ("Marchenko correctness", marchenko_closed_form(residual)),
        ("contraction", contraction(&extra)),
        ("algebraic inversion", algebraic_inversion()),
        ("full round trip", full_round_trip(&coarse, &fine, &alphas)),
        ("cross-route consistency", cross_route(&kg)),
        ("convention calibration", calibration(&coarse, &alphas)),
    ];
    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        println!("criterion {:>2} {:<26} {}  {}", i + 1, name, if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} of {} passed in {:.1?}", results.len() - failed, results.len(), start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
