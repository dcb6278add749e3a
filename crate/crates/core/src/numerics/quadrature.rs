//! Adaptive Gauss-Kronrod (7/15) quadrature for complex integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::{Complex64, Error, Result};

/// Kronrod abscissae on [-1, 1], non-negative half, descending.
pub(crate) const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

pub(crate) const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// Gauss weights for the odd-indexed Kronrod abscissae (1, 3, 5, 7).
pub(crate) const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// The fifteen Kronrod nodes of `[a, b]` in ascending order.
pub fn kronrod_nodes(a: f64, b: f64) -> [f64; 15] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [0.0; 15];
    for j in 0..7 {
        out[j] = c - h * XGK[j];
        out[14 - j] = c + h * XGK[j];
    }
    out[7] = c;
    out
}

/// Kronrod and Gauss weights aligned with [`kronrod_nodes`], unscaled.
pub fn kronrod_weights() -> ([f64; 15], [f64; 15]) {
    let mut wk = [0.0; 15];
    let mut wg = [0.0; 15];
    for j in 0..8 {
        wk[j] = WGK[j];
        wk[14 - j] = WGK[j];
    }
    for (k, &w) in WG.iter().enumerate() {
        let j = 2 * k + 1;
        wg[j] = w;
        wg[14 - j] = w;
    }
    (wk, wg)
}

/// Truncation and tolerance settings shared by every integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Integrals over the real line are taken over `[-radius, radius]`.
    pub radius: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Intervals narrower than this are never bisected.
    pub min_interval: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            radius: 12.0,
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 4000,
            min_interval: 1e-12,
        }
    }
}

impl QuadratureConfig {
    pub fn new(
        radius: f64,
        abs_tol: f64,
        rel_tol: f64,
        max_subdivisions: usize,
        min_interval: f64,
    ) -> Result<Self> {
        let cfg = Self {
            radius,
            abs_tol,
            rel_tol,
            max_subdivisions,
            min_interval,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.radius > 0.0
            && self.abs_tol > 0.0
            && self.rel_tol > 0.0
            && self.max_subdivisions >= 1
            && self.min_interval > 0.0
            && self.min_interval < self.radius;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("{self:?}")))
        }
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    /// Tighter copy used for integrals nested inside another integral.
    pub fn nested(&self) -> Self {
        self.with_tolerances(self.abs_tol * 0.1, self.rel_tol * 0.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl IntegralResult {
    pub fn zero() -> Self {
        Self {
            value: Complex64::new(0.0, 0.0),
            error_estimate: 0.0,
            evaluations: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `[s0, +inf)`
    Up,
    /// `(-inf, s0]`
    Down,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One Gauss-Kronrod panel: (Kronrod value, error estimate).
pub(crate) fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = fc.norm() * WGK[7];
    let mut fv1 = [Complex64::new(0.0, 0.0); 7];
    let mut fv2 = [Complex64::new(0.0, 0.0); 7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += (f1 + f2) * WGK[j];
        res_abs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            res_g += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).norm();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }
    let value = res_k * h;
    let err = rescale_error(((res_k - res_g) * h).norm(), res_abs * h.abs(), res_asc * h.abs());
    (value, err)
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err;
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let floor = 50.0 * f64::EPSILON * res_abs;
        if floor > scaled {
            scaled = floor;
        }
    }
    scaled
}

/// Adaptive integral of `f` over `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the total
/// error is below `max(abs_tol, rel_tol * |I|)`. Finitely many jump points are
/// fine: their panels simply keep being bisected. On failure the best estimate
/// travels inside [`Error::NonConvergence`].
pub fn integrate_line<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInterval { a, b });
    }
    integrate_segments(&f, &[a, b], cfg)
}

/// Like [`integrate_line`] with known break points inside `[a, b]`.
pub fn integrate_with_breaks<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInterval { a, b });
    }
    let mut points = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&p| p > a && p < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    points.extend(inner);
    points.push(b);
    integrate_segments(&f, &points, cfg)
}

const SEED_PANEL: f64 = 1.0;
const MAX_SEED_PANELS: f64 = 1024.0;

fn integrate_segments<F: Fn(f64) -> Complex64>(
    f: &F,
    points: &[f64],
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    let mut heap = BinaryHeap::new();
    let mut frozen_value = Complex64::new(0.0, 0.0);
    let mut frozen_error = 0.0;
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    let mut evaluations = 0;
    for w in points.windows(2) {
        // unit-width seed panels so narrow features are not missed
        let pieces = ((w[1] - w[0]) / SEED_PANEL).ceil().clamp(1.0, MAX_SEED_PANELS) as usize;
        let width = (w[1] - w[0]) / pieces as f64;
        for k in 0..pieces {
            let a = w[0] + k as f64 * width;
            let b = if k + 1 == pieces { w[1] } else { a + width };
            let (value, error) = gk15(f, a, b);
            evaluations += 15;
            total += value;
            total_err += error;
            heap.push(Segment { a, b, value, error });
        }
    }
    let mut subdivisions = heap.len();
    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.norm());
        if total_err <= tol {
            return Ok(IntegralResult {
                value: total,
                error_estimate: total_err,
                evaluations,
            });
        }
        let worst = match heap.pop() {
            Some(s) => s,
            None => break,
        };
        if worst.b - worst.a < 2.0 * cfg.min_interval {
            frozen_value += worst.value;
            frozen_error += worst.error;
            continue;
        }
        if subdivisions >= cfg.max_subdivisions {
            heap.push(worst);
            break;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk15(f, worst.a, mid);
        let (v2, e2) = gk15(f, mid, worst.b);
        evaluations += 30;
        subdivisions += 1;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        if heap.len() % 64 == 0 {
            // re-sum to stop drift from the incremental updates
            total = heap.iter().map(|s| s.value).sum::<Complex64>() + frozen_value;
            total_err = heap.iter().map(|s| s.error).sum::<f64>() + frozen_error;
        }
    }
    let value = heap.iter().map(|s| s.value).sum::<Complex64>() + frozen_value;
    let error_estimate = heap.iter().map(|s| s.error).sum::<f64>() + frozen_error;
    Err(Error::NonConvergence {
        best: IntegralResult {
            value,
            error_estimate,
            evaluations,
        },
    })
}

/// Half-line integral, truncated so the window covers both
/// `[s0 - radius, s0]` (resp. `[s0, s0 + radius]`) and the part of the
/// Gaussian core `[-radius, radius]` on the requested side.
pub fn integrate_halfline<F: Fn(f64) -> Complex64>(
    f: F,
    s0: f64,
    direction: Direction,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    let (a, b) = halfline_window(s0, direction, cfg.radius);
    integrate_line(f, a, b, cfg)
}

pub(crate) fn halfline_window(s0: f64, direction: Direction, radius: f64) -> (f64, f64) {
    match direction {
        Direction::Up => (s0, (s0 + radius).max(radius)),
        Direction::Down => ((s0 - radius).min(-radius), s0),
    }
}

/// Integral accepting a non-converged best estimate.
///
/// Nested kernels call this: a sub-integral that stalls at its tolerance
/// still contributes its best value and an honest error estimate.
pub(crate) fn integrate_lenient<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    integrate_line(f, a, b, cfg).or_else(Error::best_estimate)
}
