//! Recovery of the phase `φ` from `v` and of `(u, p, α)`, plus the full
//! inverse pipeline `S → (u, p, α)`.
//!
//! Near infinity `φ` is the fixed point of
//! `(Tf)(x) = ∫ₓ^∞ (v₁ sin 2f + v₂ cos 2f) dt`, `v₁ = Re v`, `v₂ = Im v`,
//! which contracts in the norm `∫|f′|` once `∫_{x₀}^∞ (|v₁| + |v₂|) < ¼`.
//! The solution is continued to `x = 0` through `φ′ = −v₁ sin 2φ − v₂ cos 2φ`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use crate::direct::ScatteringSamples;
use crate::error::{Error, Result, StageExt};
use crate::marchenko::{build_omega, extract_v, ZeroNodeRule};
use crate::numerics::{reduce_mod_pi, ComplexFunction, RealFunction, UniformGrid};
use crate::scatdata::{ScatConfig, ScatteringData, ValidationReport};

/// Tail threshold of the contraction lemma.
pub const TAIL_THRESHOLD: f64 = 0.25;
/// A stricter threshold leaving a safety margin below ¼.
pub const SAFE_TAIL_THRESHOLD: f64 = 0.2;
pub const FIXED_POINT_TOLERANCE: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 200;
/// Largest admissible `|(−u + ip)e^{−2iφ} − v|` after recovery.
pub const RECOVERY_TOLERANCE: f64 = 1e-10;

fn tail_trapezoid(values: &[f64], h: f64) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    for j in (0..values.len().saturating_sub(1)).rev() {
        out[j] = out[j + 1] + 0.5 * h * (values[j] + values[j + 1]);
    }
    out
}

fn total_variation(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Onset of the contraction region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContractionOnset {
    pub index: usize,
    pub x0: f64,
    /// `∫_{x₀}^{x_max} (|Re v| + |Im v|)`.
    pub tail: f64,
}

/// Smallest grid node whose tail integral of `|Re v| + |Im v|` is strictly
/// below `threshold`.
pub fn find_x0(v: &ComplexFunction, threshold: f64) -> Result<ContractionOnset> {
    let grid = *v.grid();
    let mass: Vec<f64> = v.values().iter().map(|z| z.re.abs() + z.im.abs()).collect();
    let tail = tail_trapezoid(&mass, grid.step());
    let index = tail.iter().position(|&t| t < threshold).unwrap_or(grid.len() - 1);
    if index + 1 == grid.len() {
        return Err(Error::DomainTooShort(format!(
            "tail mass of v does not fall below {threshold} before x_max = {}; increase x_max",
            grid.x_max()
        )));
    }
    Ok(ContractionOnset { index, x0: grid.node(index), tail: tail[index] })
}

/// Fixed point of `T` on `[x₀, x_max]`.
#[derive(Debug, Clone)]
pub struct FixedPoint {
    pub start: usize,
    /// `φ(x_j)` for `j ≥ start`.
    pub values: Vec<f64>,
    pub iterations: usize,
    /// `‖f_{n+2} − f_{n+1}‖_Y / ‖f_{n+1} − f_n‖_Y`.
    pub contraction_ratios: Vec<f64>,
}

pub fn fixed_point_phi(v: &ComplexFunction, start: usize, tol: f64, max_iterations: usize) -> Result<FixedPoint> {
    let grid = *v.grid();
    if start >= grid.len() {
        return Err(Error::Domain(format!("start index {start} outside a grid of {} nodes", grid.len())));
    }
    let h = grid.step();
    let vs = &v.values()[start..];
    let mut f = vec![0.0f64; vs.len()];
    let mut ratios = Vec::new();
    let mut prev_step: Option<f64> = None;
    for it in 1..=max_iterations {
        let integrand: Vec<f64> =
            vs.iter().zip(&f).map(|(z, &fj)| z.re * (2.0 * fj).sin() + z.im * (2.0 * fj).cos()).collect();
        let next = tail_trapezoid(&integrand, h);
        let diff: Vec<f64> = next.iter().zip(&f).map(|(a, b)| a - b).collect();
        let step = total_variation(&diff);
        if let Some(p) = prev_step.filter(|&p| p > 0.0) {
            ratios.push(step / p);
        }
        f = next;
        if step < tol {
            return Ok(FixedPoint { start, values: f, iterations: it, contraction_ratios: ratios });
        }
        prev_step = Some(step);
    }
    Err(Error::ContractionFailure { iterations: max_iterations, last_step: prev_step.unwrap_or(f64::NAN) })
}

fn phi_rhs(v: Complex64, phi: f64) -> f64 {
    -v.re * (2.0 * phi).sin() - v.im * (2.0 * phi).cos()
}

/// Continues the fixed point to `[0, x₀]` with backward RK4.
pub fn extend_phi(v: &ComplexFunction, tail: &FixedPoint) -> Result<RealFunction> {
    let grid = *v.grid();
    let n = grid.len();
    if tail.start + tail.values.len() != n {
        return Err(Error::Domain("fixed point does not reach x_max".into()));
    }
    let h = grid.step();
    let mut phi = vec![0.0; n];
    phi[tail.start..].copy_from_slice(&tail.values);
    for j in (1..=tail.start).rev() {
        let x = grid.node(j);
        let (v0, vm, v1) = (v.values()[j], v.interp_cubic(x - 0.5 * h), v.values()[j - 1]);
        let y = phi[j];
        let k1 = phi_rhs(v0, y);
        let k2 = phi_rhs(vm, y - 0.5 * h * k1);
        let k3 = phi_rhs(vm, y - 0.5 * h * k2);
        let k4 = phi_rhs(v1, y - h * k3);
        let next = y - h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !next.is_finite() {
            return Err(Error::Integration(format!("phase became non-finite at x = {}", grid.node(j - 1))));
        }
        phi[j - 1] = next;
    }
    RealFunction::new(grid, phi)
}

/// Max over interior nodes of `|φ′ + v₁ sin 2φ + v₂ cos 2φ|` with central differences.
pub fn ode_residual(v: &ComplexFunction, phi: &RealFunction) -> f64 {
    let h = phi.grid().step();
    let (p, vv) = (phi.values(), v.values());
    (1..p.len().saturating_sub(1))
        .map(|j| ((p[j + 1] - p[j - 1]) / (2.0 * h) - phi_rhs(vv[j], p[j])).abs())
        .fold(0.0, f64::max)
}

/// `(u, p, α)` recovered from `(v, φ, β)`.
#[derive(Debug, Clone)]
pub struct Potentials {
    pub u: RealFunction,
    pub p: RealFunction,
    pub alpha: f64,
}

pub fn recover_potentials(v: &ComplexFunction, phi: &RealFunction, beta: f64) -> Result<Potentials> {
    v.check_same_grid(phi.grid())?;
    let grid = *v.grid();
    let mut u = Vec::with_capacity(grid.len());
    let mut p = Vec::with_capacity(grid.len());
    for (&z, &f) in v.values().iter().zip(phi.values()) {
        let (s, c) = (2.0 * f).sin_cos();
        let uj = -z.re * c + z.im * s;
        let pj = z.re * s + z.im * c;
        let back = Complex64::new(-uj, pj) * Complex64::cis(-2.0 * f);
        if (back - z).norm() > RECOVERY_TOLERANCE * z.norm().max(1.0) {
            return Err(Error::Inconsistent(format!("recovered potentials do not reproduce v: {back} vs {z}")));
        }
        u.push(uj);
        p.push(pj);
    }
    Ok(Potentials {
        u: RealFunction::new(grid, u)?,
        p: RealFunction::new(grid, p)?,
        alpha: reduce_mod_pi(beta - phi.values()[0]),
    })
}

/// Tunable parts of the inverse pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InverseOptions {
    /// Step of the Marchenko grid; defaults to `x_max / 256`.
    pub marchenko_step: Option<f64>,
    /// Range on which `F` is sampled; defaults to `x_max`.
    pub zeta_max: Option<f64>,
    /// Relative `L¹` tail of `F` that may be dropped from the kernel.
    pub trim_tolerance: f64,
    pub zero_node: ZeroNodeRule,
    pub x0_threshold: f64,
    pub fixed_point_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for InverseOptions {
    fn default() -> Self {
        Self {
            marchenko_step: None,
            zeta_max: None,
            trim_tolerance: 1e-6,
            zero_node: ZeroNodeRule::Collocation,
            x0_threshold: TAIL_THRESHOLD,
            fixed_point_tolerance: FIXED_POINT_TOLERANCE,
            max_iterations: MAX_ITERATIONS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseConfig {
    /// Output grid for `v`, `φ`, `u`, `p`.
    pub grid: UniformGrid,
    pub options: InverseOptions,
    pub scat: ScatConfig,
}

impl InverseConfig {
    pub fn new(grid: UniformGrid) -> Self {
        Self { grid, options: InverseOptions::default(), scat: ScatConfig::default() }
    }

    pub fn marchenko_grid(&self) -> Result<UniformGrid> {
        let x_max = self.grid.x_max();
        let h = self.options.marchenko_step.unwrap_or(x_max / 256.0);
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Domain(format!("Marchenko step must be positive, got {h}")));
        }
        let intervals = (x_max / h).round().max(1.0) as usize;
        UniformGrid::new(x_max, intervals + 1)
    }

    pub fn zeta_grid(&self) -> Result<UniformGrid> {
        let h = self.marchenko_grid()?.step();
        let zeta_max = self.options.zeta_max.unwrap_or(self.grid.x_max());
        let intervals = (zeta_max / h).round().max(1.0) as usize;
        UniformGrid::with_step(h, intervals + 1)
    }
}

#[derive(Debug, Clone)]
pub struct PhaseSolution {
    pub phi: RealFunction,
    pub x0: f64,
    pub iterations: usize,
    pub contraction_ratios: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub marchenko_residual: f64,
    pub pair_defect: f64,
    pub pivot_ratio: f64,
    /// `F` range used by the kernel after trimming.
    pub kernel_range: f64,
    /// Dropped kernel tail mass plus the frequency-truncation estimate of `F`.
    pub truncation_estimate: f64,
    pub ode_residual: f64,
    pub x0: f64,
    pub iterations: usize,
    pub contraction_ratios: Vec<f64>,
    pub validation: ValidationReport,
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub v: ComplexFunction,
    pub phase: PhaseSolution,
    pub u: RealFunction,
    pub p: RealFunction,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub diagnostics: Diagnostics,
}

impl ReconstructionResult {
    /// `φ(0)`, the estimate of `∫ p`.
    pub fn p0_estimate(&self) -> f64 {
        self.phase.phi.values()[0]
    }
}

/// `S → (u, p, α)`.
///
/// With `S − e^{2iγ} = ∫F e^{2ikζ}` the kernel is built from `−F`, and the
/// boundary parameter is `β = (γ − π/2) mod π`; both choices follow from the
/// forward convention `S = −a/ā`, under which `v ≡ 0` gives `S ≡ −e^{2iβ}`.
pub fn inverse_scatter(samples: ScatteringSamples, cfg: &InverseConfig) -> Result<ReconstructionResult> {
    let opts = &cfg.options;
    let data = ScatteringData::new(samples, &cfg.scat, cfg.zeta_grid()?).stage("validation")?;
    let beta = reduce_mod_pi(data.gamma - FRAC_PI_2);

    let kernel = build_omega(data.f.positive.map(|z| -z)).trimmed(opts.trim_tolerance);
    let extracted = extract_v(&kernel, cfg.marchenko_grid()?, opts.zero_node).stage("marchenko")?;
    let v = extracted.v.resample(cfg.grid);

    let onset = find_x0(&v, opts.x0_threshold).stage("phase")?;
    let tail = fixed_point_phi(&v, onset.index, opts.fixed_point_tolerance, opts.max_iterations).stage("phase")?;
    let phi = extend_phi(&v, &tail).stage("phase")?;
    let pots = recover_potentials(&v, &phi, beta).stage("recovery")?;

    let diagnostics = Diagnostics {
        marchenko_residual: extracted.max_residual,
        pair_defect: extracted.max_pair_defect,
        pivot_ratio: extracted.max_pivot_ratio,
        kernel_range: kernel.range(),
        truncation_estimate: extracted.truncation_estimate + data.f.truncation_estimate,
        ode_residual: ode_residual(&v, &phi),
        x0: onset.x0,
        iterations: tail.iterations,
        contraction_ratios: tail.contraction_ratios.clone(),
        validation: data.validation.clone(),
    };
    Ok(ReconstructionResult {
        phase: PhaseSolution {
            phi,
            x0: onset.x0,
            iterations: tail.iterations,
            contraction_ratios: tail.contraction_ratios,
        },
        v,
        u: pots.u,
        p: pots.p,
        alpha: pots.alpha,
        beta,
        gamma: data.gamma,
        diagnostics,
    })
}
