//! Jost solutions of the canonical ZS-AKNS system and the forward map
//! `(u, p, α) → S(k)`.
//!
//! The matrix Jost solution `Ψ(x,k) → e^{ikxσ₃}` is integrated in the
//! de-oscillated variable `M = e^{−ikxσ₃}Ψ`, which satisfies
//! `M′ = −[[0, v e^{−2ikx}], [v̄ e^{2ikx}, 0]] M` with `M(x_max) = I`.
//! Removing the carrier keeps a fixed-step integrator accurate at large
//! `|k|`. Each step is a fourth-order Magnus exponential, so `det M = 1`
//! and the column symmetry hold to rounding.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::numerics::{ComplexFunction, SymmetricKGrid};
use crate::transform::{dirac_jost_column, to_zsakns, SchrodingerProblem, ZsAknsProblem};

/// The Magnus step is capped at `STEP_FACTOR / max(1, |k|)`.
pub const STEP_FACTOR: f64 = 0.2;
/// Hard limit on the number of steps per frequency.
pub const MAX_STEPS: usize = 100_000_000;
/// Scattering denominators below this magnitude mask the node.
pub const DENOMINATOR_FLOOR: f64 = 1e-12;

/// Jost matrix `Ψ(0,k)` and, on request, the de-oscillated profile
/// `M(x_j,k)` at every grid node.
#[derive(Debug, Clone)]
pub struct JostMatrix {
    pub k: f64,
    pub psi0: Mat2,
    pub profile: Option<Vec<Mat2>>,
}

impl JostMatrix {
    /// `|det Ψ(0,k) − 1|`.
    pub fn det_defect(&self) -> f64 {
        (self.psi0.det() - 1.0).norm()
    }

    /// Deviation from `ψ₂ = σ₁ ψ̄₁`, i.e. `ψ₁₂ = conj ψ₂₁`, `ψ₂₂ = conj ψ₁₁`.
    pub fn symmetry_defect(&self) -> f64 {
        let m = &self.psi0;
        (m.get(0, 1) - m.get(1, 0).conj()).norm().max((m.get(1, 1) - m.get(0, 0).conj()).norm())
    }
}

fn substeps(h: f64, k: f64) -> usize {
    let cap = STEP_FACTOR / k.abs().max(1.0);
    ((h / cap).ceil() as usize).max(1)
}

fn integrate_jost(zp: &ZsAknsProblem, k: f64, keep_profile: bool) -> Result<JostMatrix> {
    if !k.is_finite() {
        return Err(Error::Domain(format!("k must be finite, got {k}")));
    }
    let v = zp.v();
    let grid = *v.grid();
    let n = grid.len();
    let h = grid.step();
    let m = substeps(h, k);
    if (n - 1).saturating_mul(m) > MAX_STEPS {
        return Err(Error::Integration(format!(
            "k = {k} needs {} steps, more than the limit {MAX_STEPS}",
            (n - 1) * m
        )));
    }
    let generator = |x: f64, vx: Complex64| {
        let e = Complex64::cis(-2.0 * k * x);
        Mat2::new(Complex64::default(), -vx * e, -(vx.conj() * e.conj()), Complex64::default())
    };
    let mut state = Mat2::IDENTITY;
    let mut profile = keep_profile.then(|| vec![Mat2::IDENTITY; n]);
    let ds = -h / m as f64;
    let (c1, c2) = (0.5 - 3f64.sqrt() / 6.0, 0.5 + 3f64.sqrt() / 6.0);
    let bracket = 3f64.sqrt() * ds * ds / 12.0;
    for j in (0..n - 1).rev() {
        let x_right = grid.node(j + 1);
        for s in 0..m {
            let x0 = x_right + s as f64 * ds;
            let (xa, xb) = (x0 + c1 * ds, x0 + c2 * ds);
            let a1 = generator(xa, v.interp_cubic(xa));
            let a2 = generator(xb, v.interp_cubic(xb));
            let omega = (a1 + a2) * (0.5 * ds) + (a2 * a1 - a1 * a2) * bracket;
            state = omega.exp_traceless() * state;
        }
        if !state.is_finite() {
            return Err(Error::Integration(format!("non-finite Jost solution at x = {}, k = {k}", grid.node(j))));
        }
        if let Some(p) = profile.as_mut() {
            p[j] = state;
        }
    }
    Ok(JostMatrix { k, psi0: state, profile })
}

/// `Ψ(0,k)` for the canonical system.
pub fn jost_matrix(zp: &ZsAknsProblem, k: f64) -> Result<JostMatrix> {
    integrate_jost(zp, k, false)
}

/// As [`jost_matrix`], keeping `M(x_j, k)` at every node.
pub fn jost_matrix_profile(zp: &ZsAknsProblem, k: f64) -> Result<JostMatrix> {
    integrate_jost(zp, k, true)
}

/// Sampled scattering function on a symmetric frequency grid.
#[derive(Debug, Clone)]
pub struct ScatteringSamples {
    k_grid: SymmetricKGrid,
    values: Vec<Complex64>,
    /// `β` of the generating ZS-AKNS problem, when known.
    pub beta_used: Option<f64>,
    /// `|denominator|` per node; `None` for externally supplied data.
    pub denominators: Option<Vec<f64>>,
    /// Nodes whose evaluation failed; their values are excluded downstream.
    pub masked: Vec<usize>,
}

impl ScatteringSamples {
    pub fn new(k_grid: SymmetricKGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != k_grid.len() {
            return Err(Error::Domain(format!(
                "{} scattering values for {} frequencies",
                values.len(),
                k_grid.len()
            )));
        }
        if let Some(j) = values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Domain(format!("non-finite scattering value at node {j}")));
        }
        Ok(Self { k_grid, values, beta_used: None, denominators: None, masked: Vec::new() })
    }

    pub fn k_grid(&self) -> &SymmetricKGrid {
        &self.k_grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(k, S(k))` pairs, skipping masked nodes.
    pub fn valid(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.k_grid
            .nodes()
            .iter()
            .copied()
            .zip(self.values.iter().copied())
            .enumerate()
            .filter(|(i, _)| !self.masked.contains(i))
            .map(|(_, kv)| kv)
    }

    /// `max ||S(k)| − 1|` over valid nodes.
    pub fn unimodularity_defect(&self) -> f64 {
        self.valid().map(|(_, s)| (s.norm() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Pointwise map of the values (grid unchanged).
    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let values = self.k_grid.nodes().iter().zip(&self.values).map(|(&k, &s)| f(k, s)).collect();
        Self { values, ..self.clone() }
    }
}

/// `S = −a/ā` with `a = e^{iβ}ψ₁₁(0,k) + e^{−iβ}ψ₂₁(0,k)`, evaluated from a
/// computed Jost matrix. Returns `(S, |ā|)`.
pub fn scattering_value(psi0: &Mat2, beta: f64) -> (Complex64, f64) {
    let eb = Complex64::cis(beta);
    let num = eb * psi0.get(0, 0) + eb.conj() * psi0.get(1, 0);
    let den = eb.conj() * psi0.get(0, 0).conj() + eb * psi0.get(1, 0).conj();
    (-num / den, den.norm())
}

/// `Ψ(0,k)` at every node of the grid. Independent of `β`.
pub fn jost_table(zp: &ZsAknsProblem, k_grid: &SymmetricKGrid) -> Result<Vec<Mat2>> {
    k_grid.nodes().iter().map(|&k| jost_matrix(zp, k).map(|j| j.psi0)).collect()
}

/// Scattering function for boundary parameter `beta` from precomputed Jost matrices.
pub fn scattering_from_table(table: &[Mat2], k_grid: &SymmetricKGrid, beta: f64) -> Result<ScatteringSamples> {
    if table.len() != k_grid.len() {
        return Err(Error::Domain(format!("{} Jost matrices for {} frequencies", table.len(), k_grid.len())));
    }
    let mut values = Vec::with_capacity(k_grid.len());
    let mut dens = Vec::with_capacity(k_grid.len());
    let mut masked = Vec::new();
    for (i, psi0) in table.iter().enumerate() {
        let (s, den) = scattering_value(psi0, beta);
        dens.push(den);
        if den < DENOMINATOR_FLOOR || !(s.re.is_finite() && s.im.is_finite()) {
            masked.push(i);
            values.push(Complex64::new(1.0, 0.0));
        } else {
            values.push(s);
        }
    }
    Ok(ScatteringSamples { k_grid: k_grid.clone(), values, beta_used: Some(beta), denominators: Some(dens), masked })
}

pub fn scattering_function(zp: &ZsAknsProblem, k_grid: &SymmetricKGrid) -> Result<ScatteringSamples> {
    scattering_from_table(&jost_table(zp, k_grid)?, k_grid, zp.beta())
}

/// Forward map of a Schrödinger problem.
pub fn forward(sp: &SchrodingerProblem, k_grid: &SymmetricKGrid) -> Result<ScatteringSamples> {
    scattering_function(&to_zsakns(sp), k_grid)
}

/// `f(0,k)` and `f^{[1]}(0,k)` of the Schrödinger Jost solution.
#[derive(Debug, Clone, Copy)]
pub struct SchrodingerJost {
    pub f0: Complex64,
    pub f0_quasi: Complex64,
}

fn require_nonzero(k: f64) -> Result<()> {
    if k == 0.0 || !k.is_finite() {
        return Err(Error::Domain(format!("Schrödinger Jost quantities need a nonzero real k, got {k}")));
    }
    Ok(())
}

/// First column `y = U e^{iφσ₃}ψ₁` at `x = 0`: `f = y₂`, `f^{[1]} = k y₁`.
pub fn schrodinger_jost(sp: &SchrodingerProblem, k: f64) -> Result<SchrodingerJost> {
    require_nonzero(k)?;
    let zp = to_zsakns(sp);
    let jost = jost_matrix(&zp, k)?;
    let phi0 = zp.phi().values()[0];
    let z = [jost.psi0.get(0, 0) * Complex64::cis(phi0), jost.psi0.get(1, 0) * Complex64::cis(-phi0)];
    let y = crate::transform::U.mul_vec(z);
    Ok(SchrodingerJost { f0: y[1], f0_quasi: k * y[0] })
}

/// Profiles `f(x_j, k)` and `f^{[1]}(x_j, k) = k y₁(x_j, k)`.
pub fn schrodinger_jost_profile(
    sp: &SchrodingerProblem,
    k: f64,
) -> Result<(ComplexFunction, ComplexFunction)> {
    require_nonzero(k)?;
    let y = dirac_jost_column(sp, k)?;
    let grid = *sp.grid();
    let f = ComplexFunction::new(grid, y.iter().map(|c| c[1]).collect())?;
    let fq = ComplexFunction::new(grid, y.iter().map(|c| k * c[0]).collect())?;
    Ok((f, fq))
}

/// Jost function evaluated two ways, plus the unsigned ratio `s/s̄`.
#[derive(Debug, Clone, Copy)]
pub struct JostFunction {
    /// `sin α f^{[1]}(0,k) + k cos α f(0,k)`.
    pub s: Complex64,
    /// `k(e^{i(α+p₀)}w₁(0,k) + e^{−i(α+p₀)}w₂(0,k))` from the canonical system.
    pub dirac_route: Complex64,
    /// `s/s̄`; equals `−S(k)` under the normative sign convention.
    pub ratio: Complex64,
}

pub fn jost_function(sp: &SchrodingerProblem, k: f64) -> Result<JostFunction> {
    require_nonzero(k)?;
    let zp = to_zsakns(sp);
    let jost = jost_matrix(&zp, k)?;
    let alpha = sp.alpha();
    let phi0 = zp.phi().values()[0];
    let z = [jost.psi0.get(0, 0) * Complex64::cis(phi0), jost.psi0.get(1, 0) * Complex64::cis(-phi0)];
    let y = crate::transform::U.mul_vec(z);
    let (f0, f0_quasi) = (y[1], k * y[0]);
    let s = alpha.sin() * f0_quasi + k * alpha.cos() * f0;
    let b = Complex64::cis(alpha + zp.p0());
    let dirac_route = k * (b * jost.psi0.get(0, 0) + b.conj() * jost.psi0.get(1, 0));
    Ok(JostFunction { s, dirac_route, ratio: s / s.conj() })
}

/// Winding number of a sampled unimodular function.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct Winding {
    pub winding: i64,
    /// Total unwrapped phase change divided by `2π`.
    pub raw: f64,
    /// `|S(+K) − S(−K)|`.
    pub limit_gap: f64,
    pub warning: Option<String>,
}

/// Largest admissible phase increment between adjacent nodes.
pub const MAX_PHASE_INCREMENT: f64 = PI / 2.0;
/// Limit-equality warning threshold for `|S(+K) − S(−K)|`.
pub const LIMIT_GAP_WARNING: f64 = 0.1;

pub fn winding_number(s: &ScatteringSamples) -> Result<Winding> {
    let pts: Vec<(f64, Complex64)> = s.valid().collect();
    if pts.len() < 2 {
        return Err(Error::Domain("winding number needs at least two valid nodes".into()));
    }
    let mut total = 0.0;
    for w in pts.windows(2) {
        let inc = (w[1].1 / w[0].1).arg();
        if inc.abs() >= MAX_PHASE_INCREMENT {
            return Err(Error::UnderResolved { k_left: w[0].0, k_right: w[1].0, increment: inc });
        }
        total += inc;
    }
    let raw = total / (2.0 * PI);
    let limit_gap = (pts[pts.len() - 1].1 - pts[0].1).norm();
    let warning = (limit_gap > LIMIT_GAP_WARNING)
        .then(|| format!("limits at ±k_max differ by {limit_gap:.3e}; winding number may be ill-defined"));
    Ok(Winding { winding: raw.round() as i64, raw, limit_gap, warning })
}
