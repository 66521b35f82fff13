#![allow(dead_code)]

use miura_scatter::numerics::{ComplexFunction, RealFunction, SymmetricKGrid, UniformGrid};
use miura_scatter::transform::{to_zsakns, SchrodingerProblem, ZsAknsProblem};
use num_complex::Complex64;

pub fn default_grid() -> UniformGrid {
    UniformGrid::new(16.0, 2048).unwrap()
}

pub fn default_k_grid() -> SymmetricKGrid {
    SymmetricKGrid::new(64.0, 4096).unwrap()
}

pub fn gaussian(grid: UniformGrid, amplitude: f64, center: f64, width: f64) -> RealFunction {
    RealFunction::from_fn(grid, |x| amplitude * (-((x - center) / width).powi(2)).exp())
}

pub fn indicator(grid: UniformGrid, height: f64, from: f64, to: f64) -> RealFunction {
    RealFunction::from_fn(grid, |x| if x >= from && x <= to { height } else { 0.0 })
}

/// Gaussian `u` and `p` of amplitude `amp`, centered at 2 and 3.
pub fn gaussian_problem(grid: UniformGrid, amp: f64, alpha: f64) -> SchrodingerProblem {
    SchrodingerProblem::new(gaussian(grid, amp, 2.0, 0.5), gaussian(grid, amp, 3.0, 0.5), alpha).unwrap()
}

pub fn step_problem(grid: UniformGrid, alpha: f64) -> SchrodingerProblem {
    SchrodingerProblem::new(indicator(grid, 0.3, 1.0, 2.0), RealFunction::zeros(grid), alpha).unwrap()
}

/// `v = 0.4 e^{2ix} exp(−(x−2)²)` given directly on the canonical side.
pub fn complex_synthetic(grid: UniformGrid, beta: f64) -> ZsAknsProblem {
    let v = ComplexFunction::from_fn(grid, |x| Complex64::cis(2.0 * x) * 0.4 * (-(x - 2.0) * (x - 2.0)).exp());
    ZsAknsProblem::new(v, beta).unwrap()
}

/// The canonical test family: zero, step, Gaussian and complex synthetic.
pub fn test_family(grid: UniformGrid) -> Vec<(&'static str, ZsAknsProblem)> {
    vec![
        ("zero", ZsAknsProblem::new(ComplexFunction::zeros(grid), 0.4).unwrap()),
        ("step", to_zsakns(&step_problem(grid, 0.3))),
        ("gaussian", to_zsakns(&gaussian_problem(grid, 0.5, 0.7))),
        ("complex", complex_synthetic(grid, 1.1)),
    ]
}

/// `e^{2iγ} + ∫₀^{ζ_max} F(ζ) e^{2ikζ} dζ` with `F` replaced by its
/// piecewise-linear interpolant on `n` cells; each cell is integrated exactly.
pub fn synthetic_s(k: &SymmetricKGrid, gamma: f64, f: impl Fn(f64) -> Complex64, zeta_max: f64, n: usize) -> Vec<Complex64> {
    let d = zeta_max / n as f64;
    let samples: Vec<Complex64> = (0..=n).map(|m| f(m as f64 * d)).collect();
    k.nodes()
        .iter()
        .map(|&kk| {
            let w = 2.0 * kk;
            let x = w * d;
            // interior weight d·sinc²(x/2); end weights ∫(1 − t/d)e^{±iwt}
            let (interior, left) = if x.abs() < 1e-4 {
                (d * (1.0 - x * x / 12.0), Complex64::new(d / 2.0, w * d * d / 6.0))
            } else {
                let e = Complex64::cis(x);
                (d * (2.0 * (1.0 - x.cos()) / (x * x)), Complex64::new(0.0, 1.0 / w) - (e - 1.0) / (w * w * d))
            };
            let step = Complex64::cis(x);
            let mut phase = Complex64::new(1.0, 0.0);
            let mut sum = samples[0] * left;
            for s in &samples[1..n] {
                phase *= step;
                sum += s * interior * phase;
            }
            phase *= step;
            sum += samples[n] * left.conj() * phase;
            Complex64::cis(2.0 * gamma) + sum
        })
        .collect()
}
