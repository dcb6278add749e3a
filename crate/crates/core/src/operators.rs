//! The vacuum vector, grid application of the five observables and the
//! Fourier pair `U`, `U^{-1}`.
//!
//! Units are fixed by `hbar = 1`, so `||f||^2 = int |f|^2`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::numerics::{integrate_lenient, QuadratureConfig};
use crate::{Complex64, Error, Result, I};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Observable {
    X,
    P,
    XplusP,
    XPplusPX,
    /// `(X^2 + P^2) / 2`
    Harmonic,
}

impl Observable {
    pub const ALL: [Observable; 5] = [
        Observable::X,
        Observable::P,
        Observable::XplusP,
        Observable::XPplusPX,
        Observable::Harmonic,
    ];

    /// Lowercase command-line token.
    pub fn token(self) -> &'static str {
        match self {
            Observable::X => "x",
            Observable::P => "p",
            Observable::XplusP => "x+p",
            Observable::XPplusPX => "xp+px",
            Observable::Harmonic => "harmonic",
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Observable::ALL
            .into_iter()
            .find(|o| o.token() == lower)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown observable '{s}'")))
    }
}

/// `Phi(s) = pi^{-1/4} exp(-s^2/2)`.
pub fn vacuum(s: f64) -> f64 {
    PI.powf(-0.25) * (-0.5 * s * s).exp()
}

pub(crate) fn vacuum_c(s: f64) -> Complex64 {
    Complex64::new(vacuum(s), 0.0)
}

/// Samples of a function on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Vec<f64>,
    values: Vec<Complex64>,
    /// Points at each end produced by one-sided stencils.
    edge: usize,
}

impl SampledFunction {
    pub const MIN_LEN: usize = 5;

    pub fn new(grid: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if grid.len() != values.len() || grid.len() < Self::MIN_LEN {
            return Err(Error::InvalidArgument(format!(
                "grid/value lengths {} / {} (need equal, >= {})",
                grid.len(),
                values.len(),
                Self::MIN_LEN
            )));
        }
        let h = grid[1] - grid[0];
        if !(h > 0.0) {
            return Err(Error::InvalidArgument("grid must be increasing".into()));
        }
        let span = (grid[grid.len() - 1] - grid[0]).abs().max(h);
        for w in grid.windows(2) {
            if ((w[1] - w[0]) - h).abs() > 1e-12 * span.max(1.0) {
                return Err(Error::InvalidArgument("grid must be uniform".into()));
            }
        }
        Ok(Self {
            grid,
            values,
            edge: 0,
        })
    }

    /// Tabulates `f` on `n` uniform points spanning `[a, b]`.
    pub fn tabulate<F: Fn(f64) -> Complex64>(a: f64, b: f64, n: usize, f: F) -> Result<Self> {
        let grid = uniform_grid(a, b, n)?;
        let values = grid.iter().map(|&s| f(s)).collect();
        Self::new(grid, values)
    }

    /// Tabulates on `[-radius, radius]` with step `step`.
    pub fn symmetric<F: Fn(f64) -> Complex64>(radius: f64, step: f64, f: F) -> Result<Self> {
        let n = (2.0 * radius / step).round() as usize + 1;
        Self::tabulate(-radius, radius, n, f)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    /// Number of flagged boundary points on each side.
    pub fn edge(&self) -> usize {
        self.edge
    }

    /// Indices whose values came from centred stencils only.
    pub fn interior(&self) -> std::ops::Range<usize> {
        self.edge..self.len() - self.edge
    }

    fn with_values(&self, values: Vec<Complex64>, edge: usize) -> Self {
        Self {
            grid: self.grid.clone(),
            values,
            edge: edge.max(self.edge),
        }
    }

    pub fn map<F: Fn(f64, Complex64) -> Complex64>(&self, f: F) -> Self {
        let values = self
            .grid
            .iter()
            .zip(&self.values)
            .map(|(&s, &v)| f(s, v))
            .collect();
        self.with_values(values, self.edge)
    }

    /// Pointwise linear combination `a * self + b * other` on a shared grid.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&u, &v)| a * u + b * v)
            .collect();
        Ok(self.with_values(values, self.edge.max(other.edge)))
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() || (self.grid[0] - other.grid[0]).abs() > 1e-12 {
            return Err(Error::InvalidArgument("grids differ".into()));
        }
        Ok(())
    }

    /// Largest `|self - other|` over the points with index in `range`.
    pub fn max_diff_in(&self, other: &Self, range: std::ops::Range<usize>) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(range
            .map(|k| (self.values[k] - other.values[k]).norm())
            .fold(0.0, f64::max))
    }

    /// Largest deviation over points unflagged in both functions, skipping
    /// `extra` further points per side.
    pub fn max_interior_diff(&self, other: &Self, extra: usize) -> Result<f64> {
        let edge = self.edge.max(other.edge) + extra;
        self.max_diff_in(other, edge..self.len().saturating_sub(edge))
    }

    /// `int |f|^2` by the trapezoid rule on the samples.
    pub fn norm_sq(&self) -> f64 {
        let h = self.step();
        let n = self.len();
        let mut acc = 0.5 * (self.values[0].norm_sqr() + self.values[n - 1].norm_sqr());
        for v in &self.values[1..n - 1] {
            acc += v.norm_sqr();
        }
        acc * h
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Local cubic (four-point Lagrange) interpolation; zero outside the grid.
    pub fn interpolate(&self, x: f64) -> Complex64 {
        let n = self.len();
        let a = self.grid[0];
        let h = self.step();
        let u = (x - a) / h;
        if u < 0.0 || u > (n - 1) as f64 {
            return Complex64::new(0.0, 0.0);
        }
        let j = (u.floor() as usize).clamp(1, n - 3);
        let t = u - j as f64;
        let (p0, p1, p2, p3) = (
            self.values[j - 1],
            self.values[j],
            self.values[j + 1],
            self.values[j + 2],
        );
        // nodes at t = -1, 0, 1, 2
        let l0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
        let l1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        let l2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
        let l3 = (t + 1.0) * t * (t - 1.0) / 6.0;
        p0 * l0 + p1 * l1 + p2 * l2 + p3 * l3
    }
}

pub fn uniform_grid(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if n < SampledFunction::MIN_LEN || !(a < b) {
        return Err(Error::InvalidArgument(format!(
            "uniform grid [{a}, {b}] with {n} points"
        )));
    }
    let h = (b - a) / (n - 1) as f64;
    Ok((0..n).map(|k| a + k as f64 * h).collect())
}

/// Fourth-order first derivative on the samples, one-sided at the ends.
fn derivative(values: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = values.len();
    let f = values;
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    for k in 2..n - 2 {
        d[k] = (f[k - 2] - f[k - 1] * 8.0 + f[k + 1] * 8.0 - f[k + 2]) / (12.0 * h);
    }
    for k in 0..2 {
        d[k] = forward_first(&f[k..k + 5], h);
        let m = n - 1 - k;
        d[m] = -forward_first(&[f[m], f[m - 1], f[m - 2], f[m - 3], f[m - 4]], h);
    }
    d
}

fn forward_first(f: &[Complex64], h: f64) -> Complex64 {
    (f[0] * -25.0 + f[1] * 48.0 - f[2] * 36.0 + f[3] * 16.0 - f[4] * 3.0) / (12.0 * h)
}

/// Fourth-order second derivative, one-sided (six-point) at the ends.
fn second_derivative(values: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = values.len();
    let f = values;
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    let h2 = h * h;
    for k in 2..n - 2 {
        d[k] = (-f[k - 2] + f[k - 1] * 16.0 - f[k] * 30.0 + f[k + 1] * 16.0 - f[k + 2]) / (12.0 * h2);
    }
    let one_sided = |g: [Complex64; 6]| {
        (g[0] * 45.0 - g[1] * 154.0 + g[2] * 214.0 - g[3] * 156.0 + g[4] * 61.0 - g[5] * 10.0)
            / (12.0 * h2)
    };
    if n >= 6 {
        for k in 0..2 {
            d[k] = one_sided([f[k], f[k + 1], f[k + 2], f[k + 3], f[k + 4], f[k + 5]]);
            let m = n - 1 - k;
            d[m] = one_sided([f[m], f[m - 1], f[m - 2], f[m - 3], f[m - 4], f[m - 5]]);
        }
    }
    d
}

/// Second-order central first derivative, used only to detect unresolved grids.
fn coarse_derivative_gap(values: &[Complex64], fine: &[Complex64], h: f64) -> f64 {
    let n = values.len();
    let mut gap: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for k in 2..n - 2 {
        let coarse = (values[k + 1] - values[k - 1]) / (2.0 * h);
        gap = gap.max((coarse - fine[k]).norm());
        scale = scale.max(fine[k].norm()).max(values[k].norm());
    }
    if scale == 0.0 {
        0.0
    } else {
        gap / scale
    }
}

/// Threshold on the relative disagreement of second- and fourth-order
/// derivative stencils above which a grid is declared too coarse.
pub const COARSE_GRID_THRESHOLD: f64 = 0.1;

/// Applies `T` to grid samples with fourth-order central differences.
///
/// * `X`: `s f`
/// * `P`: `-i f'`
/// * `X+P`: `s f - i f'`
/// * `XP+PX`: `-i (2 s f' + f)`
/// * `(X^2+P^2)/2`: `s^2 f / 2 - f'' / 2`
///
/// The two points at each end come from one-sided stencils and are flagged
/// through [`SampledFunction::edge`].
pub fn apply(observable: Observable, f: &SampledFunction) -> Result<SampledFunction> {
    let h = f.step();
    if observable == Observable::X {
        return Ok(f.map(|s, v| v * s));
    }
    let d1 = derivative(&f.values, h);
    let gap = coarse_derivative_gap(&f.values, &d1, h);
    if gap > COARSE_GRID_THRESHOLD {
        return Err(Error::GridTooCoarse(gap));
    }
    let values: Vec<Complex64> = match observable {
        Observable::X => unreachable!(),
        Observable::P => d1.iter().map(|&d| -I * d).collect(),
        Observable::XplusP => f
            .grid
            .iter()
            .zip(f.values.iter().zip(&d1))
            .map(|(&s, (&v, &d))| v * s - I * d)
            .collect(),
        Observable::XPplusPX => f
            .grid
            .iter()
            .zip(f.values.iter().zip(&d1))
            .map(|(&s, (&v, &d))| -I * (d * (2.0 * s) + v))
            .collect(),
        Observable::Harmonic => {
            let d2 = second_derivative(&f.values, h);
            f.grid
                .iter()
                .zip(f.values.iter().zip(&d2))
                .map(|(&s, (&v, &dd))| v * (0.5 * s * s) - dd * 0.5)
                .collect()
        }
    };
    Ok(f.with_values(values, 2))
}

/// Applies `T` at one point to a function, differentiating with centred
/// fourth-order stencils of step `h`.
pub fn apply_at<F: Fn(f64) -> Complex64>(observable: Observable, f: &F, s: f64, h: f64) -> Complex64 {
    let d1 = || (f(s - 2.0 * h) - f(s - h) * 8.0 + f(s + h) * 8.0 - f(s + 2.0 * h)) / (12.0 * h);
    match observable {
        Observable::X => f(s) * s,
        Observable::P => -I * d1(),
        Observable::XplusP => f(s) * s - I * d1(),
        Observable::XPplusPX => -I * (d1() * (2.0 * s) + f(s)),
        Observable::Harmonic => {
            let d2 = (-f(s - 2.0 * h) + f(s - h) * 16.0 - f(s) * 30.0 + f(s + h) * 16.0
                - f(s + 2.0 * h))
                / (12.0 * h * h);
            f(s) * (0.5 * s * s) - d2 * 0.5
        }
    }
}

/// Quadrature settings for transforms of interpolated samples; the
/// interpolant is only accurate to `O(h^4)`, so tolerances are relaxed.
pub fn transform_config() -> QuadratureConfig {
    QuadratureConfig::default().with_tolerances(1e-11, 1e-9)
}

fn transform(f: &SampledFunction, out_grid: &[f64], sign: f64) -> Result<SampledFunction> {
    let n = f.len();
    let ends = f.values[0].norm().max(f.values[n - 1].norm());
    let cfg = transform_config();
    if ends > cfg.abs_tol.max(1e-10) {
        return Err(Error::NonDecaying(ends));
    }
    let (a, b) = (f.grid[0], f.grid[n - 1]);
    let norm = (2.0 * PI).powf(-0.5);
    let mut values = Vec::with_capacity(out_grid.len());
    for &t in out_grid {
        let integrand = |lam: f64| Complex64::new(0.0, sign * lam * t).exp() * f.interpolate(lam);
        let r = integrate_lenient(integrand, a, b, &cfg)?;
        values.push(r.value * norm);
    }
    SampledFunction::new(out_grid.to_vec(), values)
}

/// `(U f)(t) = (2 pi)^{-1/2} int e^{i lambda t} f(lambda) d lambda` on `t_grid`.
pub fn fourier(f: &SampledFunction, t_grid: &[f64]) -> Result<SampledFunction> {
    transform(f, t_grid, 1.0)
}

/// `(U^{-1} f)(lambda) = (2 pi)^{-1/2} int e^{-i lambda t} f(t) dt`.
pub fn inverse_fourier(f: &SampledFunction, lambda_grid: &[f64]) -> Result<SampledFunction> {
    transform(f, lambda_grid, -1.0)
}
