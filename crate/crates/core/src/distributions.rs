//! Densities of the vacuum laws by inverting characteristic functions, and
//! the law attached to each observable.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charfn::cf_closed;
use crate::numerics::{kronrod_nodes, kronrod_weights};
use crate::{Complex64, Error, Observable, Result, I};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum LawTag {
    Gaussian { variance: f64 },
    /// Characteristic function `(sech alpha t)^rho`.
    Ghs { alpha: f64, rho: f64 },
    PointMass { location: f64 },
}

impl LawTag {
    pub fn mean(&self) -> f64 {
        match *self {
            LawTag::PointMass { location } => location,
            _ => 0.0,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            LawTag::Gaussian { variance } => variance,
            LawTag::Ghs { alpha, rho } => rho * alpha * alpha,
            LawTag::PointMass { .. } => 0.0,
        }
    }

    /// Truncation window for inverting this law's characteristic function.
    pub fn window(&self) -> f64 {
        match *self {
            LawTag::Gaussian { variance } => (80.0 / variance).sqrt(),
            LawTag::Ghs { alpha, rho } => 40.0 / (alpha * rho),
            LawTag::PointMass { .. } => InversionConfig::default().window,
        }
    }
}

pub fn classify(observable: Observable) -> LawTag {
    match observable {
        Observable::X | Observable::P => LawTag::Gaussian { variance: 0.5 },
        Observable::XplusP => LawTag::Gaussian { variance: 1.0 },
        Observable::XPplusPX => LawTag::Ghs {
            alpha: 2.0,
            rho: 0.5,
        },
        Observable::Harmonic => LawTag::PointMass { location: 0.5 },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityTable {
    pub x_grid: Vec<f64>,
    pub density: Vec<f64>,
    /// Known law, when the table was produced for an observable.
    pub law_tag: Option<LawTag>,
    /// Largest quadrature error over the grid.
    pub error_estimate: f64,
}

impl DensityTable {
    fn trapezoid<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        self.x_grid
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(x, d)| 0.5 * (x[1] - x[0]) * (f(x[0], d[0]) + f(x[1], d[1])))
            .sum()
    }

    pub fn mass(&self) -> f64 {
        self.trapezoid(|_, d| d)
    }

    pub fn mean(&self) -> f64 {
        self.trapezoid(|x, d| x * d) / self.mass()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.trapezoid(|x, d| (x - m).powi(2) * d) / self.mass()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InversionConfig {
    /// The `t` integral runs over `[-window, window]`.
    pub window: f64,
    /// Width of the fixed Gauss-Kronrod panels in `t`.
    pub panel: f64,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self {
            window: 40.0,
            panel: 0.125,
        }
    }
}

impl InversionConfig {
    pub fn for_law(law: LawTag) -> Self {
        Self {
            window: law.window(),
            ..Self::default()
        }
    }
}

/// Above this mean `|cf|` on the outer half of the window the law is taken
/// to carry a point mass.
pub const POINT_MASS_THRESHOLD: f64 = 0.5;

/// `density(x) = (1 / 2 pi) int_{-W}^{W} e^{-itx} cf(t) dt` on `x_grid`.
pub fn invert_cf(
    cf: &(dyn Fn(f64) -> Complex64 + Sync),
    x_grid: &[f64],
    cfg: &InversionConfig,
) -> Result<DensityTable> {
    if !(cfg.window > 0.0 && cfg.panel > 0.0) {
        return Err(Error::InvalidConfig(format!("{cfg:?}")));
    }
    let w = cfg.window;
    let n = (2.0 * w / cfg.panel).ceil() as usize;
    let width = 2.0 * w / n as f64;
    let mut nodes = Vec::with_capacity(15 * n);
    for k in 0..n {
        let a = -w + k as f64 * width;
        nodes.extend_from_slice(&kronrod_nodes(a, a + width));
    }
    let values: Vec<Complex64> = nodes.par_iter().map(|&t| cf(t)).collect();

    let tail: Vec<f64> = nodes
        .iter()
        .zip(&values)
        .filter(|(t, _)| t.abs() >= 0.5 * w)
        .map(|(_, v)| v.norm())
        .collect();
    let tail_mean = tail.iter().sum::<f64>() / tail.len().max(1) as f64;
    if tail_mean > POINT_MASS_THRESHOLD {
        return Err(Error::NonIntegrableCf(tail_mean));
    }

    let (wk, wg) = kronrod_weights();
    let half = 0.5 * width;
    let rows: Vec<(f64, f64)> = x_grid
        .par_iter()
        .map(|&x| {
            let mut total = Complex64::new(0.0, 0.0);
            let mut err = 0.0;
            for k in 0..n {
                let mut kron = Complex64::new(0.0, 0.0);
                let mut gauss = Complex64::new(0.0, 0.0);
                for j in 0..15 {
                    let idx = 15 * k + j;
                    let f = (-I * (nodes[idx] * x)).exp() * values[idx];
                    kron += f * wk[j];
                    gauss += f * wg[j];
                }
                total += kron * half;
                err += ((kron - gauss) * half).norm();
            }
            (total.re / (2.0 * PI), err / (2.0 * PI))
        })
        .collect();
    Ok(DensityTable {
        x_grid: x_grid.to_vec(),
        density: rows.iter().map(|r| r.0).collect(),
        law_tag: None,
        error_estimate: rows.iter().map(|r| r.1).fold(0.0, f64::max),
    })
}

/// A tabulated density, or the location of a point mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LawDensity {
    Table(DensityTable),
    PointMass { location: f64 },
}

/// Density of the vacuum law of `observable` from its closed-form
/// characteristic function.
pub fn density_for(observable: Observable, x_grid: &[f64]) -> Result<LawDensity> {
    let law = classify(observable);
    let cf = move |t: f64| cf_closed(observable, t);
    match invert_cf(&cf, x_grid, &InversionConfig::for_law(law)) {
        Ok(mut table) => {
            table.law_tag = Some(law);
            Ok(LawDensity::Table(table))
        }
        Err(Error::NonIntegrableCf(_)) => match law {
            LawTag::PointMass { location } => Ok(LawDensity::PointMass { location }),
            other => Err(Error::InvalidArgument(format!(
                "{observable} law {other:?} has a non-decaying characteristic function"
            ))),
        },
        Err(e) => Err(e),
    }
}
