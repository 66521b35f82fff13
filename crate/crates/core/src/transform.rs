//! The three equivalent problem forms and the maps between them:
//! energy-dependent Schrödinger `(u, p, α)` → non-canonical Dirac system with
//! potential `P` → canonical ZS-AKNS system with potential `v` and boundary
//! parameter `β`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::direct;
use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::numerics::{
    reduce_mod_pi, ComplexFunction, RealFunction, UniformGrid, DEFAULT_TAIL_TOLERANCE,
};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `U` with `y = U z`.
pub const U: Mat2 = Mat2::new(I, Complex64::new(0.0, -1.0), ONE, ONE);
pub const SIGMA1: Mat2 = Mat2::new(ZERO, ONE, ONE, ZERO);
/// Real antisymmetric form used by the Dirac system `σ₂y′ + Py = ky`.
pub const SIGMA2: Mat2 = Mat2::new(ZERO, ONE, Complex64::new(-1.0, 0.0), ZERO);
pub const SIGMA3: Mat2 = Mat2::new(ONE, ZERO, ZERO, Complex64::new(-1.0, 0.0));

/// Energy-dependent Schrödinger problem parameterised by the Riccati
/// representative `u` of `q = u′ + u²`, the potential `p` and the boundary
/// parameter `α ∈ [0, π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchrodingerProblem {
    u: RealFunction,
    p: RealFunction,
    alpha: f64,
}

/// Mass of `|u| + |p|` beyond `0.9·x_max`, relative to the total, above which
/// the truncation is flagged.
pub const PROBLEM_TAIL_THRESHOLD: f64 = 1e-6;

impl SchrodingerProblem {
    pub fn new(u: RealFunction, p: RealFunction, alpha: f64) -> Result<Self> {
        u.check_same_grid(p.grid())?;
        if !(0.0..PI).contains(&alpha) {
            return Err(Error::Domain(format!("alpha must lie in [0, π), got {alpha}")));
        }
        Ok(Self { u, p, alpha })
    }

    pub fn zero(grid: UniformGrid, alpha: f64) -> Result<Self> {
        Self::new(RealFunction::zeros(grid), RealFunction::zeros(grid), alpha)
    }

    pub fn u(&self) -> &RealFunction {
        &self.u
    }

    pub fn p(&self) -> &RealFunction {
        &self.p
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn grid(&self) -> &UniformGrid {
        self.u.grid()
    }

    /// Relative mass of `|u| + |p|` on `[0.9·x_max, x_max]`.
    pub fn tail_fraction(&self) -> f64 {
        let grid = *self.grid();
        let start = (0.9 * (grid.len() - 1) as f64).floor() as usize;
        let h = grid.step();
        let w: Vec<f64> = self.u.values().iter().zip(self.p.values()).map(|(a, b)| a.abs() + b.abs()).collect();
        let total: f64 = w.iter().sum::<f64>() * h;
        if total == 0.0 {
            return 0.0;
        }
        w[start..].iter().sum::<f64>() * h / total
    }

    /// Fails when the potentials have not decayed inside the grid.
    pub fn check_truncation(&self, threshold: f64) -> Result<()> {
        let frac = self.tail_fraction();
        if frac > threshold {
            return Err(Error::DomainTooShort(format!(
                "{:.2e} of the mass of |u|+|p| lies beyond 0.9·x_max = {}; increase x_max",
                frac,
                0.9 * self.grid().x_max()
            )));
        }
        Ok(())
    }
}

/// Pointwise potential `P(x) = [[0, −u], [−u, 2p]]` of the non-canonical
/// Dirac system.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracSystem {
    u: RealFunction,
    p: RealFunction,
}

impl DiracSystem {
    pub fn from_problem(sp: &SchrodingerProblem) -> Self {
        Self { u: sp.u.clone(), p: sp.p.clone() }
    }

    pub fn potential_at(&self, j: usize) -> Mat2 {
        let (u, p) = (self.u.values()[j], self.p.values()[j]);
        Mat2::real(0.0, -u, -u, 2.0 * p)
    }

    pub fn grid(&self) -> &UniformGrid {
        self.u.grid()
    }
}

/// Canonical ZS-AKNS problem `w′ + Vw = ikσ₃w`, `V = [[0, v], [v̄, 0]]`,
/// with boundary condition `e^{iβ}w₁(0) + e^{−iβ}w₂(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZsAknsProblem {
    v: ComplexFunction,
    beta: f64,
    p0: f64,
    phi: RealFunction,
}

impl ZsAknsProblem {
    /// A canonical problem given directly by its potential (`φ ≡ 0`).
    pub fn new(v: ComplexFunction, beta: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::Domain("beta must be finite".into()));
        }
        let phi = RealFunction::zeros(*v.grid());
        Ok(Self { v, beta: reduce_mod_pi(beta), p0: 0.0, phi })
    }

    pub fn v(&self) -> &ComplexFunction {
        &self.v
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn phi(&self) -> &RealFunction {
        &self.phi
    }

    pub fn grid(&self) -> &UniformGrid {
        self.v.grid()
    }
}

/// `φ(x) = ∫ₓ^{x_max} p` together with `p₀ = φ(0)`.
#[derive(Debug, Clone)]
pub struct Phase {
    pub phi: RealFunction,
    pub p0: f64,
    pub warning: Option<String>,
}

pub fn phi_from_p(p: &RealFunction) -> Phase {
    let tail = crate::numerics::tail_integral_with_tolerance(p, DEFAULT_TAIL_TOLERANCE);
    let p0 = tail.values.values()[0];
    Phase { phi: tail.values, p0, warning: tail.warning }
}

/// `v = (−u + ip)e^{−2iφ}`, `β = (α + p₀) mod π`.
pub fn to_zsakns(sp: &SchrodingerProblem) -> ZsAknsProblem {
    let Phase { phi, p0, .. } = phi_from_p(&sp.p);
    let values = sp
        .u
        .values()
        .iter()
        .zip(sp.p.values())
        .zip(phi.values())
        .map(|((&u, &p), &f)| Complex64::new(-u, p) * Complex64::cis(-2.0 * f))
        .collect();
    let v = ComplexFunction::new(*sp.grid(), values).expect("finite inputs give finite v");
    ZsAknsProblem { v, beta: reduce_mod_pi(sp.alpha + p0), p0, phi }
}

/// Central differences inside, second-order one-sided differences at the ends.
pub(crate) fn derivative(values: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = values.len();
    let mut d = vec![ZERO; n];
    if n == 2 {
        let s = (values[1] - values[0]) / h;
        return vec![s, s];
    }
    for j in 1..n - 1 {
        d[j] = (values[j + 1] - values[j - 1]) / (2.0 * h);
    }
    d[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
    d[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h);
    d
}

/// `y^{[1]} = y′ − uy`.
pub fn quasi_derivative(y: &ComplexFunction, u: &RealFunction) -> Result<ComplexFunction> {
    y.check_same_grid(u.grid())?;
    let dy = derivative(y.values(), y.grid().step());
    let values = dy.iter().zip(y.values()).zip(u.values()).map(|((&d, &yv), &uv)| d - yv * uv).collect();
    ComplexFunction::new(*y.grid(), values)
}

/// First Jost column of the Dirac system at every node, split as
/// `y = U·(e^{ikx}a, e^{−ikx}b)` with slowly varying envelopes
/// `a = e^{iφ}M₁₁`, `b = e^{−iφ}M₂₁`.
pub fn dirac_jost_envelope(
    sp: &SchrodingerProblem,
    k: f64,
) -> Result<(ZsAknsProblem, Vec<Complex64>, Vec<Complex64>)> {
    let zp = to_zsakns(sp);
    let jost = direct::jost_matrix_profile(&zp, k)?;
    let profile = jost.profile.as_ref().expect("profile requested");
    let (a, b) = profile
        .iter()
        .zip(zp.phi.values())
        .map(|(m, &phi)| (m.get(0, 0) * Complex64::cis(phi), m.get(1, 0) * Complex64::cis(-phi)))
        .unzip();
    Ok((zp, a, b))
}

/// `y = U e^{iφσ₃} ψ₁` at every node.
pub fn dirac_jost_column(sp: &SchrodingerProblem, k: f64) -> Result<Vec<[Complex64; 2]>> {
    let (_, a, b) = dirac_jost_envelope(sp, k)?;
    Ok(sp
        .grid()
        .nodes()
        .zip(a.iter().zip(&b))
        .map(|(x, (&a, &b))| U.mul_vec([a * Complex64::cis(k * x), b * Complex64::cis(-k * x)]))
        .collect())
}

/// Max-norm over interior nodes of the residual of `σ₂y′ + Py − ky` for the
/// Dirac Jost column built from the ZS-AKNS one. The carrier `e^{±ikx}` is
/// differentiated exactly and the envelopes by central differences.
pub fn chain_residual(sp: &SchrodingerProblem, k: f64) -> Result<f64> {
    if k == 0.0 || !k.is_finite() {
        return Err(Error::Domain(format!("chain residual needs a nonzero real k, got {k}")));
    }
    let (_, a, b) = dirac_jost_envelope(sp, k)?;
    let grid = *sp.grid();
    let h = grid.step();
    let da = derivative(&a, h);
    let db = derivative(&b, h);
    let dirac = DiracSystem::from_problem(sp);
    let mut worst = 0.0f64;
    for j in 1..a.len() - 1 {
        let x = grid.node(j);
        let (ep, em) = (Complex64::cis(k * x), Complex64::cis(-k * x));
        let y = U.mul_vec([a[j] * ep, b[j] * em]);
        let dy = U.mul_vec([(da[j] + I * k * a[j]) * ep, (db[j] - I * k * b[j]) * em]);
        let s = SIGMA2.mul_vec(dy);
        let py = dirac.potential_at(j).mul_vec(y);
        let r0 = s[0] + py[0] - k * y[0];
        let r1 = s[1] + py[1] - k * y[1];
        worst = worst.max(r0.norm().max(r1.norm()));
    }
    Ok(worst)
}
