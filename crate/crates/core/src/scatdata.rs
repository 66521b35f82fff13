//! Validation of candidate scattering functions and extraction of the data
//! `(γ, F)` of the representation `S(k) = e^{2iγ} + ∫ F(ζ) e^{2ikζ} dζ`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::direct::{winding_number, ScatteringSamples};
use crate::error::{Error, Result};
use crate::numerics::{fourier_integral, reduce_mod_pi, ComplexFunction, UniformGrid};

/// Tolerances and sampling choices for class-𝒮 checks and `F` extraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScatConfig {
    /// Fraction of each half of the k-grid used to estimate the limit `e^{2iγ}`.
    pub band_fraction: f64,
    /// Largest admissible `|S − mean|` inside the band.
    pub spread_tol: f64,
    pub unimodularity_tol: f64,
    /// Largest admissible `|S(+K) − S(−K)|`.
    pub limit_gap_tol: f64,
    /// `F` is sampled on `[−zeta_max, zeta_max]`.
    pub zeta_max: f64,
    /// Sampling step for `F`; defaults to `π/(2 k_max)`.
    pub zeta_step: Option<f64>,
    /// Remove the jump of `F` at the origin analytically before the quadrature.
    pub jump_correction: bool,
}

impl Default for ScatConfig {
    fn default() -> Self {
        Self {
            band_fraction: 0.1,
            spread_tol: 0.2,
            unimodularity_tol: 1e-6,
            limit_gap_tol: 0.1,
            zeta_max: 16.0,
            zeta_step: None,
            jump_correction: true,
        }
    }
}

impl ScatConfig {
    /// `F` on `grid` with the configured extraction.
    pub fn extract(&self, s: &ScatteringSamples, gamma: f64, grid: UniformGrid) -> ExtractedF {
        let jump = if self.jump_correction {
            estimate_jump(s, gamma, self.band_fraction)
        } else {
            Complex64::default()
        };
        extract_f_with_jump(s, gamma, grid, jump)
    }

    /// Nonnegative `ζ` grid used for `F` given the frequency range.
    pub fn zeta_grid(&self, k_max: f64) -> Result<UniformGrid> {
        let step = self.zeta_step.unwrap_or(PI / (2.0 * k_max));
        let intervals = (self.zeta_max / step).round().max(1.0) as usize;
        UniformGrid::with_step(step, intervals + 1)
    }
}

/// `γ` and the spread of `S` over the band it was estimated from.
#[derive(Debug, Clone, Copy)]
pub struct GammaEstimate {
    pub gamma: f64,
    pub spread: f64,
}

fn band(s: &ScatteringSamples, fraction: f64) -> Vec<Complex64> {
    let pts: Vec<Complex64> = s.valid().map(|(_, z)| z).collect();
    let half = pts.len() / 2;
    let m = ((fraction * half as f64).ceil() as usize).clamp(1, half.max(1));
    pts[..m].iter().chain(&pts[pts.len() - m..]).copied().collect()
}

/// `γ = ½ arg(mean of S over the outer band)`, reduced into `[0, π)`.
pub fn extract_gamma(s: &ScatteringSamples, fraction: f64, spread_tol: f64) -> Result<GammaEstimate> {
    let outer = band(s, fraction);
    if outer.is_empty() {
        return Err(Error::Domain("no valid scattering samples".into()));
    }
    let mean = outer.iter().sum::<Complex64>() / outer.len() as f64;
    let spread = outer.iter().map(|z| (z - mean).norm()).fold(0.0, f64::max);
    if spread > spread_tol {
        return Err(Error::TailNotSettled { spread });
    }
    Ok(GammaEstimate { gamma: reduce_mod_pi(0.5 * mean.arg()), spread })
}

/// Extracted `F` on `ζ ≥ 0` with diagnostics on the discarded `ζ < 0` side.
#[derive(Debug, Clone)]
pub struct ExtractedF {
    /// `F(ζ_j)`, right limit at `ζ = 0`.
    pub positive: ComplexFunction,
    /// `F(−ζ_j)`, left limit at `ζ = 0`.
    pub negative: ComplexFunction,
    pub negative_l2: f64,
    /// `F(0−) − F(0+)` removed analytically before the quadrature.
    pub jump: Complex64,
    /// Largest per-node estimate of the frequency-truncation error.
    pub truncation_estimate: f64,
}

/// Decay rate of the one-sided exponential carrying the jump model.
pub const JUMP_MODEL_RATE: f64 = 1.0;

/// `F(0−) − F(0+)` from the `1/k` tail of `S`: a jump `J` at the origin
/// gives `S(k) − e^{2iγ} ≈ −iJ/(2k)`, so `J = 2i · mean(k (S − e^{2iγ}))`
/// over the outer band. Odd errors in the limit cancel in the symmetric mean.
pub fn estimate_jump(s: &ScatteringSamples, gamma: f64, fraction: f64) -> Complex64 {
    let limit = Complex64::cis(2.0 * gamma);
    let pts: Vec<(f64, Complex64)> = s.valid().collect();
    let half = pts.len() / 2;
    if half == 0 {
        return Complex64::default();
    }
    let m = ((fraction * half as f64).ceil() as usize).clamp(1, half);
    let outer = pts[..m].iter().chain(&pts[pts.len() - m..]);
    let mean = outer.map(|&(k, z)| k * (z - limit)).sum::<Complex64>() / (2 * m) as f64;
    Complex64::new(0.0, 2.0) * mean
}

/// `F(ζ) = (1/π) ∫ (S(k) − e^{2iγ}) e^{−2ikζ} dk` on `±ζ` for the nodes of `grid`.
pub fn extract_f(s: &ScatteringSamples, gamma: f64, grid: UniformGrid) -> ExtractedF {
    extract_f_with_jump(s, gamma, grid, Complex64::default())
}

/// As [`extract_f`], with a jump `J = F(0−) − F(0+)` carried by the model
/// `J e^{λζ}[ζ < 0]`, whose transform `J/(λ + 2ik)` is subtracted from `S`
/// before the quadrature and whose values are added back exactly. The
/// remainder is continuous at the origin, so its truncation error falls
/// like `1/K²` instead of `1/K`.
pub fn extract_f_with_jump(s: &ScatteringSamples, gamma: f64, grid: UniformGrid, jump: Complex64) -> ExtractedF {
    let limit = Complex64::cis(2.0 * gamma);
    let diff: Vec<Complex64> = s
        .k_grid()
        .nodes()
        .iter()
        .zip(s.values())
        .enumerate()
        .map(|(i, (&k, &z))| {
            if s.masked.contains(&i) {
                Complex64::default()
            } else {
                z - limit - jump / Complex64::new(JUMP_MODEL_RATE, 2.0 * k)
            }
        })
        .collect();
    let kg = s.k_grid();
    let trunc = std::cell::Cell::new(0.0f64);
    let sample = |zeta: f64| {
        let est = fourier_integral(kg, &diff, zeta);
        trunc.set(trunc.get().max(est.truncation_estimate));
        est.value
    };
    let positive = ComplexFunction::from_fn(grid, sample);
    let negative = ComplexFunction::from_fn(grid, |z| sample(-z) + jump * (-JUMP_MODEL_RATE * z).exp());
    let negative_l2 = negative.l2_norm();
    ExtractedF { positive, negative, negative_l2, jump, truncation_estimate: trunc.get() }
}

/// Outcome of one class-𝒮 criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Class-𝒮 report; validation never fails, it records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub max_unimodularity_defect: f64,
    pub winding: Option<i64>,
    pub winding_raw: Option<f64>,
    pub limit_gap: Option<f64>,
    pub gamma: Option<f64>,
    pub tail_spread: f64,
    pub f_l1: Option<f64>,
    pub f_l2: Option<f64>,
    /// Informational: mass of `F` on `ζ < 0`, unused by the reconstruction.
    pub f_negative_l2: Option<f64>,
    pub masked_nodes: usize,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl ValidationReport {
    pub fn failures(&self) -> Vec<String> {
        self.checks.iter().filter(|c| !c.passed).map(|c| format!("{}: {}", c.name, c.detail)).collect()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const CHECK_UNIMODULAR: &str = "unimodularity";
pub const CHECK_WINDING: &str = "winding";
pub const CHECK_LIMITS: &str = "limits";
pub const CHECK_TAIL: &str = "tail";
pub const CHECK_MASKED: &str = "evaluation";

pub fn validate_class_s(s: &ScatteringSamples, cfg: &ScatConfig) -> ValidationReport {
    let mut checks = Vec::new();
    let defect = s.unimodularity_defect();
    checks.push(Check {
        name: CHECK_UNIMODULAR.into(),
        passed: defect <= cfg.unimodularity_tol,
        detail: format!("max ||S|-1| = {defect:.3e} (tolerance {:.1e})", cfg.unimodularity_tol),
    });
    checks.push(Check {
        name: CHECK_MASKED.into(),
        passed: s.masked.is_empty(),
        detail: format!("{} masked nodes", s.masked.len()),
    });

    let (mut winding, mut winding_raw, mut limit_gap) = (None, None, None);
    match winding_number(s) {
        Ok(w) => {
            winding = Some(w.winding);
            winding_raw = Some(w.raw);
            limit_gap = Some(w.limit_gap);
            checks.push(Check {
                name: CHECK_WINDING.into(),
                passed: w.winding == 0,
                detail: format!("W = {} (raw {:.4})", w.winding, w.raw),
            });
            checks.push(Check {
                name: CHECK_LIMITS.into(),
                passed: w.limit_gap <= cfg.limit_gap_tol,
                detail: format!("|S(K)-S(-K)| = {:.3e} (tolerance {:.1e})", w.limit_gap, cfg.limit_gap_tol),
            });
        }
        Err(e) => checks.push(Check { name: CHECK_WINDING.into(), passed: false, detail: e.to_string() }),
    }

    let outer = band(s, cfg.band_fraction);
    let mean = outer.iter().sum::<Complex64>() / outer.len().max(1) as f64;
    let tail_spread = outer.iter().map(|z| (z - mean).norm()).fold(0.0, f64::max);
    let (mut gamma, mut f_l1, mut f_l2, mut f_negative_l2) = (None, None, None, None);
    match extract_gamma(s, cfg.band_fraction, cfg.spread_tol) {
        Ok(g) => {
            gamma = Some(g.gamma);
            checks.push(Check {
                name: CHECK_TAIL.into(),
                passed: true,
                detail: format!("spread {:.3e} (tolerance {:.1e})", g.spread, cfg.spread_tol),
            });
            if let Ok(grid) = cfg.zeta_grid(s.k_grid().k_max()) {
                let f = cfg.extract(s, g.gamma, grid);
                f_l1 = Some(f.positive.l1_norm() + f.negative.l1_norm());
                f_l2 = Some((f.positive.l2_norm().powi(2) + f.negative_l2.powi(2)).sqrt());
                f_negative_l2 = Some(f.negative_l2);
            }
        }
        Err(e) => checks.push(Check { name: CHECK_TAIL.into(), passed: false, detail: e.to_string() }),
    }

    let passed = checks.iter().all(|c| c.passed);
    ValidationReport {
        max_unimodularity_defect: defect,
        winding,
        winding_raw,
        limit_gap,
        gamma,
        tail_spread,
        f_l1,
        f_l2,
        f_negative_l2,
        masked_nodes: s.masked.len(),
        checks,
        passed,
    }
}

/// Validated scattering function with its representation data.
#[derive(Debug, Clone)]
pub struct ScatteringData {
    pub samples: ScatteringSamples,
    pub gamma: f64,
    pub f: ExtractedF,
    pub validation: ValidationReport,
}

impl ScatteringData {
    /// Validates `samples` and extracts `(γ, F)` with `F` sampled on `grid`.
    /// Out-of-class input is rejected with the report attached.
    pub fn new(samples: ScatteringSamples, cfg: &ScatConfig, grid: UniformGrid) -> Result<Self> {
        let validation = validate_class_s(&samples, cfg);
        if !validation.passed {
            return Err(Error::Rejected(Box::new(validation)));
        }
        let gamma = extract_gamma(&samples, cfg.band_fraction, cfg.spread_tol)?.gamma;
        let f = cfg.extract(&samples, gamma, grid);
        Ok(Self { samples, gamma, f, validation })
    }
}
