//! Uniform grids, trapezoid quadrature, dense complex solves and the
//! truncated Fourier integral used by every other module.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Uniform grid `x_j = j*h` on `[0, x_max]` with `n` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    x_max: f64,
    n: usize,
    h: f64,
}

impl UniformGrid {
    pub fn new(x_max: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("grid needs at least 2 nodes, got {n}")));
        }
        if !(x_max.is_finite() && x_max > 0.0) {
            return Err(Error::Domain(format!("grid length must be positive, got {x_max}")));
        }
        Ok(Self { x_max, n, h: x_max / (n - 1) as f64 })
    }

    /// Grid with spacing `h` covering `[0, (n-1) h]`.
    pub fn with_step(h: f64, n: usize) -> Result<Self> {
        Self::new(h * (n - 1) as f64, n)
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn node(&self, j: usize) -> f64 {
        if j + 1 == self.n {
            self.x_max
        } else {
            j as f64 * self.h
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.node(j))
    }

    /// Same length, twice as many intervals.
    pub fn refined(&self) -> Self {
        Self::new(self.x_max, 2 * self.n - 1).expect("refining a valid grid")
    }

    /// Index of the largest node `<= x` (clamped to the grid).
    pub fn cell_of(&self, x: f64) -> usize {
        if x <= 0.0 {
            return 0;
        }
        let j = (x / self.h).floor() as usize;
        j.min(self.n - 2)
    }

    pub fn contains(&self, x: f64) -> bool {
        let slack = 1e-12 * self.x_max;
        x >= -slack && x <= self.x_max + slack
    }
}

/// Scalar types the sampled-function machinery works with.
pub trait Scalar:
    Copy
    + Default
    + std::fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<f64, Output = Self>
    + std::iter::Sum
{
    fn modulus(self) -> f64;
    fn is_finite(self) -> bool;
}

impl Scalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Scalar for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Values of a function at the nodes of a [`UniformGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction<T> {
    grid: UniformGrid,
    values: Vec<T>,
}

pub type RealFunction = SampledFunction<f64>;
pub type ComplexFunction = SampledFunction<Complex64>;

impl<T: Scalar> SampledFunction<T> {
    pub fn new(grid: UniformGrid, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Domain(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite sample at node {j}")));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: UniformGrid, f: impl Fn(f64) -> T) -> Self {
        let values = grid.nodes().map(f).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: UniformGrid) -> Self {
        Self { grid, values: vec![T::default(); grid.len()] }
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> SampledFunction<U> {
        SampledFunction { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map<U: Scalar, V: Scalar>(
        &self,
        other: &SampledFunction<U>,
        f: impl Fn(T, U) -> V,
    ) -> Result<SampledFunction<V>> {
        self.check_same_grid(other.grid())?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(SampledFunction { grid: self.grid, values })
    }

    pub fn check_same_grid(&self, other: &UniformGrid) -> Result<()> {
        if self.grid.len() != other.len() || (self.grid.x_max() - other.x_max()).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "grid mismatch: {} nodes on [0, {}] vs {} nodes on [0, {}]",
                self.grid.len(),
                self.grid.x_max(),
                other.len(),
                other.x_max()
            )));
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.modulus()).fold(0.0, f64::max)
    }

    /// Trapezoid estimate of the L1 norm.
    pub fn l1_norm(&self) -> f64 {
        trapezoid(self.grid.step(), self.values.iter().map(|v| v.modulus()))
    }

    /// Trapezoid estimate of the L2 norm.
    pub fn l2_norm(&self) -> f64 {
        trapezoid(self.grid.step(), self.values.iter().map(|v| v.modulus().powi(2))).sqrt()
    }

    /// Piecewise-linear interpolant, zero outside the grid.
    pub fn interp_linear(&self, x: f64) -> T {
        if !self.grid.contains(x) {
            return T::default();
        }
        let j = self.grid.cell_of(x);
        let t = ((x - self.grid.node(j)) / self.grid.step()).clamp(0.0, 1.0);
        self.values[j] * (1.0 - t) + self.values[j + 1] * t
    }

    /// Four-point Lagrange interpolant (one-sided stencils near the ends).
    pub fn interp_cubic(&self, x: f64) -> T {
        let n = self.grid.len();
        if n < 4 {
            return self.interp_linear(x);
        }
        let h = self.grid.step();
        let j = self.grid.cell_of(x);
        let start = j.saturating_sub(1).min(n - 4);
        let t = (x - start as f64 * h) / h;
        let w = lagrange4(t);
        (0..4).map(|i| self.values[start + i] * w[i]).sum()
    }

    /// Resample onto another grid with the cubic interpolant.
    pub fn resample(&self, grid: UniformGrid) -> Self {
        SampledFunction::from_fn(grid, |x| self.interp_cubic(x))
    }
}

impl ComplexFunction {
    pub fn re(&self) -> RealFunction {
        self.map(|z| z.re)
    }

    pub fn im(&self) -> RealFunction {
        self.map(|z| z.im)
    }
}

/// Lagrange weights for nodes 0,1,2,3 evaluated at `t`.
fn lagrange4(t: f64) -> [f64; 4] {
    let (a, b, c, d) = (t, t - 1.0, t - 2.0, t - 3.0);
    [-b * c * d / 6.0, a * c * d / 2.0, -a * b * d / 2.0, a * b * c / 6.0]
}

fn trapezoid(h: f64, values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut first = None;
    let mut last = 0.0;
    for v in values {
        if first.is_none() {
            first = Some(v);
        }
        sum += v;
        last = v;
    }
    match first {
        None => 0.0,
        Some(f) => h * (sum - 0.5 * (f + last)),
    }
}

/// Composite trapezoid approximation of the integral over `[a, b]`.
///
/// Endpoints between nodes are handled by linear interpolation, which keeps
/// the rule exact for piecewise-linear data.
pub fn integrate<T: Scalar>(f: &SampledFunction<T>, a: f64, b: f64) -> Result<T> {
    let grid = f.grid();
    if !(a <= b) || !grid.contains(a) || !grid.contains(b) {
        return Err(Error::Domain(format!(
            "integration interval [{a}, {b}] outside [0, {}]",
            grid.x_max()
        )));
    }
    let a = a.clamp(0.0, grid.x_max());
    let b = b.clamp(0.0, grid.x_max());
    if a == b {
        return Ok(T::default());
    }
    let h = grid.step();
    let ja = grid.cell_of(a);
    let jb = grid.cell_of(b);
    let seg = |x0: f64, x1: f64| (f.interp_linear(x0) + f.interp_linear(x1)) * (0.5 * (x1 - x0));
    if ja == jb {
        return Ok(seg(a, b));
    }
    let mut total = seg(a, grid.node(ja + 1));
    let inner = &f.values()[ja + 1..=jb];
    if inner.len() > 1 {
        total = total + trapezoid_scalar(h, inner);
    }
    total = total + seg(grid.node(jb), b);
    Ok(total)
}

fn trapezoid_scalar<T: Scalar>(h: f64, v: &[T]) -> T {
    let n = v.len();
    let inner: T = v[1..n - 1].iter().copied().sum();
    (inner + (v[0] + v[n - 1]) * 0.5) * h
}

/// Result of [`tail_integral`]: the tail function plus its decay diagnostic.
#[derive(Debug, Clone)]
pub struct TailIntegral<T> {
    pub values: SampledFunction<T>,
    /// `|∫|` of the integrand over the last 10% of the grid.
    pub tail_mass: f64,
    /// Set when `tail_mass` exceeds the configured tolerance.
    pub warning: Option<String>,
}

pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-8;

/// `∫_{x_j}^{x_{j+1}}` of the cubic through the four nearest nodes
/// (trapezoid when the grid has fewer than four nodes).
fn cell_integral<T: Scalar>(v: &[T], j: usize, h: f64) -> T {
    let n = v.len();
    let c = h / 24.0;
    if n < 4 {
        (v[j] + v[j + 1]) * (0.5 * h)
    } else if j == 0 {
        (v[0] * 9.0 + v[1] * 19.0 - v[2] * 5.0 + v[3]) * c
    } else if j + 2 == n {
        (v[n - 4] - v[n - 3] * 5.0 + v[n - 2] * 19.0 + v[n - 1] * 9.0) * c
    } else {
        ((v[j] + v[j + 1]) * 13.0 - v[j - 1] - v[j + 2]) * c
    }
}

/// `g(x_j) = ∫_{x_j}^{x_max} f`, accumulated from the right with
/// fourth-order cell rules.
pub fn tail_integral<T: Scalar>(f: &SampledFunction<T>) -> TailIntegral<T> {
    tail_integral_with_tolerance(f, DEFAULT_TAIL_TOLERANCE)
}

/// As [`tail_integral`]; the decay warning fires when the mass over the last
/// 10% of the grid exceeds `rel_tol * ‖f‖₁`.
pub fn tail_integral_with_tolerance<T: Scalar>(
    f: &SampledFunction<T>,
    rel_tol: f64,
) -> TailIntegral<T> {
    let grid = *f.grid();
    let n = grid.len();
    let h = grid.step();
    let v = f.values();
    let mut out = vec![T::default(); n];
    for j in (0..n - 1).rev() {
        out[j] = out[j + 1] + cell_integral(v, j, h);
    }
    let start = ((0.9 * (n - 1) as f64).floor() as usize).min(n - 1);
    let tail_mass = out[start].modulus();
    let scale = f.l1_norm();
    let warning = (tail_mass > rel_tol * scale && scale > 0.0).then(|| {
        format!(
            "integrand does not decay: mass {tail_mass:.3e} over the last 10% of [0, {}]",
            grid.x_max()
        )
    });
    TailIntegral { values: SampledFunction { grid, values: out }, tail_mass, warning }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::default(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Domain("matrix must be square".into()));
        }
        Ok(Self { n, data: rows.concat() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.data.chunks_exact(self.n).map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Pivots smaller than this (relative to the largest matrix entry) are treated as singular.
pub const PIVOT_THRESHOLD: f64 = 1e-13;

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    /// Smallest pivot magnitude seen during elimination.
    pub min_pivot: f64,
    /// Largest pivot magnitude seen during elimination.
    pub max_pivot: f64,
}

impl LuFactors {
    pub fn factor(mut a: ComplexMatrix) -> Result<Self> {
        let n = a.n;
        let scale = a.data.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut min_pivot = f64::INFINITY;
        let mut max_pivot = 0.0f64;
        for k in 0..n {
            let (p, pmag) = (k..n)
                .map(|i| (i, a[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmag <= PIVOT_THRESHOLD * scale {
                return Err(Error::Singular { pivot: pmag, column: k });
            }
            min_pivot = min_pivot.min(pmag);
            max_pivot = max_pivot.max(pmag);
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    a.data.swap(p * n + j, k * n + j);
                }
            }
            let pivot_inv = a[(k, k)].inv();
            let (upper, lower) = a.data.split_at_mut((k + 1) * n);
            let pivot_row = &upper[k * n + k + 1..k * n + n];
            for row in lower.chunks_exact_mut(n) {
                let factor = row[k] * pivot_inv;
                row[k] = factor;
                if factor == Complex64::default() {
                    continue;
                }
                for (dst, &src) in row[k + 1..].iter_mut().zip(pivot_row) {
                    *dst -= factor * src;
                }
            }
        }
        Ok(Self { lu: a, perm, min_pivot, max_pivot })
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu.data[i * n..i * n + i];
            let s: Complex64 = row.iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu.data[i * n + i + 1..(i + 1) * n];
            let s: Complex64 = row.iter().zip(&x[i + 1..]).map(|(a, b)| a * b).sum();
            x[i] = (x[i] - s) / self.lu.data[i * n + i];
        }
        x
    }

    /// Ratio of extreme pivots; a cheap lower bound on the condition number.
    pub fn pivot_ratio(&self) -> f64 {
        self.max_pivot / self.min_pivot
    }
}

/// Solution of a dense system together with its relative residual.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    pub x: Vec<Complex64>,
    /// `‖Ax − b‖ / ‖b‖` (absolute residual when `b = 0`).
    pub residual: f64,
}

pub fn solve_dense(a: &ComplexMatrix, b: &[Complex64]) -> Result<DenseSolution> {
    if b.len() != a.dim() {
        return Err(Error::Domain(format!(
            "right-hand side has length {}, matrix is {}x{}",
            b.len(),
            a.dim(),
            a.dim()
        )));
    }
    let lu = LuFactors::factor(a.clone())?;
    let x = lu.solve(b);
    let residual = relative_residual(a, &x, b);
    Ok(DenseSolution { x, residual })
}

pub fn relative_residual(a: &ComplexMatrix, x: &[Complex64], b: &[Complex64]) -> f64 {
    let ax = a.mul_vec(x);
    let r = ax.iter().zip(b).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
    let bn = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if bn > 0.0 {
        r / bn
    } else {
        r
    }
}

/// Symmetric frequency grid `±(j + ½)Δk`, `j = 0..m-1`, in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricKGrid {
    k_max: f64,
    nodes: Vec<f64>,
}

impl SymmetricKGrid {
    /// `n_k` nodes (even) spread over `[-k_max, k_max]`.
    pub fn new(k_max: f64, n_k: usize) -> Result<Self> {
        if n_k < 2 || !n_k.is_multiple_of(2) {
            return Err(Error::Domain(format!("k-grid size must be even and >= 2, got {n_k}")));
        }
        if !(k_max.is_finite() && k_max > 0.0) {
            return Err(Error::Domain(format!("k_max must be positive, got {k_max}")));
        }
        let m = n_k / 2;
        let dk = k_max / m as f64;
        let nodes = (0..n_k).map(|i| (i as f64 - m as f64 + 0.5) * dk).collect();
        Ok(Self { k_max, nodes })
    }

    /// Accept an externally supplied grid; it must be increasing, symmetric
    /// about zero, avoid zero and be uniformly spaced.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        let n = nodes.len();
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::Domain(format!("k-grid needs an even number of nodes, got {n}")));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("k-grid must be strictly increasing".into()));
        }
        let dk = nodes[1] - nodes[0];
        let scale = nodes[n - 1].abs().max(1.0);
        for i in 0..n / 2 {
            if (nodes[i] + nodes[n - 1 - i]).abs() > 1e-9 * scale {
                return Err(Error::Domain("k-grid must be symmetric about 0".into()));
            }
        }
        if nodes.windows(2).any(|w| ((w[1] - w[0]) - dk).abs() > 1e-6 * dk) {
            return Err(Error::Domain("k-grid must be uniformly spaced".into()));
        }
        let k_max = nodes[n - 1] + 0.5 * dk;
        Ok(Self { k_max, nodes })
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn step(&self) -> f64 {
        self.nodes[1] - self.nodes[0]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Quadrature value of a Fourier integral with an estimate of the error
/// from truncating the frequency range.
#[derive(Debug, Clone, Copy)]
pub struct FourierEstimate {
    pub value: Complex64,
    pub truncation_estimate: f64,
}

/// Midpoint-rule approximation of `(1/π) ∫ g(k) e^{-2ikζ} dk` over the grid.
pub fn fourier_integral(k: &SymmetricKGrid, g: &[Complex64], zeta: f64) -> FourierEstimate {
    debug_assert_eq!(k.len(), g.len());
    let dk = k.step();
    let sum: Complex64 = k.nodes().iter().zip(g).map(|(&kk, &gk)| gk * Complex64::cis(-2.0 * kk * zeta)).sum();
    let value = sum * (dk / PI);
    // Leading boundary term of integrating the tail by parts.
    let edge = g[0].norm() + g[g.len() - 1].norm();
    let denom = 2.0 * PI * zeta.abs().max(PI / (2.0 * k.k_max()));
    FourierEstimate { value, truncation_estimate: edge / denom }
}

/// Reduce an angle into `[0, π)`.
pub fn reduce_mod_pi(theta: f64) -> f64 {
    let r = theta.rem_euclid(PI);
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// Distance between two angles modulo π.
pub fn distance_mod_pi(a: f64, b: f64) -> f64 {
    let d = reduce_mod_pi(a - b);
    d.min(PI - d)
}

/// `‖a − b‖₂ / ‖b‖₂`, or the absolute error when `b` vanishes.
pub fn relative_l2_error<T: Scalar>(a: &SampledFunction<T>, b: &SampledFunction<T>) -> Result<f64> {
    let diff = a.zip_map(b, |x, y| x - y)?;
    let scale = b.l2_norm();
    Ok(if scale > 0.0 { diff.l2_norm() / scale } else { diff.l2_norm() })
}
