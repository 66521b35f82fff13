//! Nyström solution of the Marchenko equation
//! `Γ(x,ζ) + Ω(x+ζ) + ∫₀^∞ Γ(x,t) Ω(x+t+ζ) dt = 0` with
//! `Ω = [[0, F̄], [F, 0]]`, and recovery of `v(x) = −Γ₁₂(x,0)`.
//!
//! Both rows of `Γ` solve the same system
//! `g₁ + H g₂ = r₁`, `g₂ + H̄ g₁ = r₂` with `H_ij = w_j F(x + t_i + t_j)`:
//! row 1 is `(Γ₁₁, Γ₁₂)` with `r = (0, −F̄)`, row 2 is `(Γ₂₁, Γ₂₂)` with
//! `r = (−F, 0)`. One factorization per `x` serves both.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::numerics::{ComplexFunction, ComplexMatrix, LuFactors, SampledFunction, UniformGrid};

/// Largest admissible `|Γ₁₂(x,0) − conj Γ₂₁(x,0)|`.
pub const PAIR_TOLERANCE: f64 = 1e-8;
/// Largest admissible max-norm residual of the discretized equation.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

/// `F` on `[0, L]` with the matrix kernel `Ω` built from it.
#[derive(Debug, Clone)]
pub struct MarchenkoKernel {
    f: ComplexFunction,
    dropped_mass: f64,
}

pub fn build_omega(f: ComplexFunction) -> MarchenkoKernel {
    MarchenkoKernel { f, dropped_mass: 0.0 }
}

impl MarchenkoKernel {
    pub fn f(&self) -> &ComplexFunction {
        &self.f
    }

    pub fn step(&self) -> f64 {
        self.f.grid().step()
    }

    /// Right end of the sampled range; `F` vanishes beyond it.
    pub fn range(&self) -> f64 {
        self.f.grid().x_max()
    }

    /// Linear interpolation inside the range, zero outside.
    pub fn f_at(&self, s: f64) -> Complex64 {
        if s < 0.0 {
            return Complex64::default();
        }
        self.f.interp_linear(s)
    }

    pub fn omega(&self, s: f64) -> Mat2 {
        let f = self.f_at(s);
        Mat2::new(Complex64::default(), f.conj(), f, Complex64::default())
    }

    /// `∫ |F|` discarded by [`MarchenkoKernel::trimmed`].
    pub fn dropped_mass(&self) -> f64 {
        self.dropped_mass
    }

    /// Shortens the range to the smallest node beyond which the trapezoid
    /// mass of `|F|` is at most `rel_tol · ‖F‖₁`.
    pub fn trimmed(&self, rel_tol: f64) -> Self {
        let grid = *self.f.grid();
        let h = grid.step();
        let v = self.f.values();
        let total = self.f.l1_norm();
        let mut tail = 0.0;
        let mut last = v.len() - 1;
        while last > 1 {
            let cell = 0.5 * h * (v[last].norm() + v[last - 1].norm());
            if tail + cell > rel_tol * total {
                break;
            }
            tail += cell;
            last -= 1;
        }
        let values = v[..=last].to_vec();
        let grid = UniformGrid::with_step(h, values.len()).expect("sub-grid of a valid grid");
        let f = SampledFunction::new(grid, values).expect("finite values");
        Self { f, dropped_mass: self.dropped_mass + tail }
    }
}

/// `Γ(x,·)` on the Nyström nodes.
#[derive(Debug, Clone)]
pub struct MarchenkoSolution {
    pub x: f64,
    pub zeta: UniformGrid,
    pub gamma_row: Vec<Mat2>,
    /// Max-norm of the discretized equation after the solve.
    pub residual: f64,
    pub pivot_ratio: f64,
}

impl MarchenkoSolution {
    pub fn gamma12_at_zero(&self) -> Complex64 {
        self.gamma_row[0].get(0, 1)
    }

    pub fn gamma21_at_zero(&self) -> Complex64 {
        self.gamma_row[0].get(1, 0)
    }
}

pub fn solve_marchenko(kern: &MarchenkoKernel, x: f64) -> Result<MarchenkoSolution> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("Marchenko point must be finite and nonnegative, got {x}")));
    }
    let h = kern.step();
    let n = if x < kern.range() { ((kern.range() - x) / h + 1e-9).floor() as usize + 1 } else { 1 };
    let zeta = UniformGrid::with_step(h, n.max(2))?;
    let samples: Vec<Complex64> = (0..2 * n - 1).map(|m| kern.f_at(x + m as f64 * h)).collect();
    let weight = |j: usize| if n == 1 { 0.0 } else if j == 0 || j == n - 1 { 0.5 * h } else { h };

    let mut a = ComplexMatrix::identity(2 * n);
    for i in 0..n {
        for j in 0..n {
            let hij = samples[i + j] * weight(j);
            a[(i, n + j)] = hij;
            a[(n + i, j)] = hij.conj();
        }
    }
    let mut rhs1 = vec![Complex64::default(); 2 * n];
    let mut rhs2 = vec![Complex64::default(); 2 * n];
    for i in 0..n {
        rhs1[n + i] = -samples[i].conj();
        rhs2[i] = -samples[i];
    }
    let lu = LuFactors::factor(a.clone())?;
    let row1 = lu.solve(&rhs1);
    let row2 = lu.solve(&rhs2);
    let residual = [(&row1, &rhs1), (&row2, &rhs2)]
        .iter()
        .map(|(g, r)| a.mul_vec(g).iter().zip(r.iter()).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max))
        .fold(0.0, f64::max);

    let mut gamma_row: Vec<Mat2> =
        (0..n).map(|i| Mat2::new(row1[i], row1[n + i], row2[i], row2[n + i])).collect();
    if n == 1 {
        gamma_row.push(Mat2::ZERO);
    }
    Ok(MarchenkoSolution { x, zeta, gamma_row, residual, pivot_ratio: lu.pivot_ratio() })
}

/// How `Γ₁₂(x,0)` is read off the Nyström solution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroNodeRule {
    /// Use the value at the collocation node `ζ = 0`.
    #[default]
    Collocation,
    /// Extrapolate linearly from the nodes `ζ = h` and `ζ = 2h`.
    Extrapolate,
}

/// `v` on the Marchenko grid with solver diagnostics.
#[derive(Debug, Clone)]
pub struct ExtractedV {
    pub v: ComplexFunction,
    pub max_residual: f64,
    pub max_pair_defect: f64,
    pub max_pivot_ratio: f64,
    /// Tail mass of `|F|` dropped from the kernel.
    pub truncation_estimate: f64,
}

pub fn extract_v(kern: &MarchenkoKernel, x_grid: UniformGrid, rule: ZeroNodeRule) -> Result<ExtractedV> {
    let mut values = Vec::with_capacity(x_grid.len());
    let (mut max_residual, mut max_pair, mut max_ratio) = (0.0f64, 0.0f64, 0.0f64);
    for x in x_grid.nodes() {
        let sol = solve_marchenko(kern, x)?;
        if sol.residual > RESIDUAL_TOLERANCE {
            return Err(Error::Inconsistent(format!(
                "Marchenko residual {:.3e} at x = {x} exceeds {RESIDUAL_TOLERANCE:.0e}",
                sol.residual
            )));
        }
        let pair = (sol.gamma12_at_zero() - sol.gamma21_at_zero().conj()).norm();
        if pair > PAIR_TOLERANCE {
            return Err(Error::Inconsistent(format!(
                "conjugate-pair defect {pair:.3e} at x = {x} exceeds {PAIR_TOLERANCE:.0e}"
            )));
        }
        max_residual = max_residual.max(sol.residual);
        max_pair = max_pair.max(pair);
        max_ratio = max_ratio.max(sol.pivot_ratio);
        let g = &sol.gamma_row;
        let g12 = match rule {
            ZeroNodeRule::Extrapolate if g.len() >= 3 => 2.0 * g[1].get(0, 1) - g[2].get(0, 1),
            _ => g[0].get(0, 1),
        };
        values.push(-g12);
    }
    Ok(ExtractedV {
        v: SampledFunction::new(x_grid, values)?,
        max_residual,
        max_pair_defect: max_pair,
        max_pivot_ratio: max_ratio,
        truncation_estimate: kern.dropped_mass(),
    })
}
