//! Vacuum characteristic functions `<Phi, e^{itT} Phi>` by three engines:
//! closed forms, the boundary jump of the resolvent matrix element across
//! the real axis, and the oscillator eigen-expansion.
//!
//! The jump engine evaluates
//!
//! ```text
//! (1 / 2 pi i) int_{-R}^{R} e^{itx} [ e^{t eps} M(x - i eps) - e^{-t eps} M(x + i eps) ] dx
//! ```
//!
//! for each `eps` of a decreasing schedule and extrapolates linearly to
//! `eps = 0`. The boundary values `M(x ± i eps)` do not depend on `t`, so
//! they are tabulated once per `eps` in a [`BoundaryProfile`] and reused for
//! every `t`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::numerics::{kronrod_nodes, kronrod_weights, QuadratureConfig};
use crate::resolvent::{matrix_element, MatrixElement};
use crate::spectral::vacuum_weights;
use crate::{Complex64, Error, Observable, Result, I};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EngineTag {
    ClosedForm,
    BoundaryJump,
    SpectralExpansion,
}

impl EngineTag {
    pub const ALL: [EngineTag; 3] = [
        EngineTag::ClosedForm,
        EngineTag::BoundaryJump,
        EngineTag::SpectralExpansion,
    ];

    pub fn token(self) -> &'static str {
        match self {
            EngineTag::ClosedForm => "closed",
            EngineTag::BoundaryJump => "jump",
            EngineTag::SpectralExpansion => "spectral",
        }
    }
}

impl fmt::Display for EngineTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for EngineTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        EngineTag::ALL
            .into_iter()
            .find(|e| e.token() == lower)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown engine '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfSample {
    pub t: f64,
    pub value: Complex64,
    pub error_estimate: f64,
    pub engine: EngineTag,
    /// False when the jump engine's eps sequence stopped contracting.
    pub converged: bool,
}

impl CfSample {
    fn exact(t: f64, value: Complex64, engine: EngineTag) -> Self {
        Self {
            t,
            value,
            error_estimate: 0.0,
            engine,
            converged: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpConfig {
    /// Strictly decreasing, inside `(0, 1)`.
    pub eps_schedule: Vec<f64>,
    /// The `x` integral runs over `[-radius, radius]`.
    pub radius: f64,
    /// Settings for the matrix elements.
    pub quadrature: QuadratureConfig,
    /// Absolute target for the `x` integral at each eps level.
    pub profile_tol: f64,
}

impl Default for JumpConfig {
    fn default() -> Self {
        Self {
            eps_schedule: vec![1e-1, 1e-2, 1e-3],
            radius: 12.0,
            quadrature: QuadratureConfig::default(),
            profile_tol: 1e-8,
        }
    }
}

impl JumpConfig {
    pub const MIN_RADIUS: f64 = 8.0;

    pub fn new(eps_schedule: Vec<f64>, radius: f64, quadrature: QuadratureConfig) -> Result<Self> {
        let cfg = Self {
            eps_schedule,
            radius,
            quadrature,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let eps = &self.eps_schedule;
        if eps.is_empty() {
            return Err(Error::InvalidConfig("empty eps schedule".into()));
        }
        if eps.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
            return Err(Error::InvalidConfig(format!("eps values must lie in (0, 1): {eps:?}")));
        }
        if eps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidConfig(format!(
                "eps schedule must be strictly decreasing: {eps:?}"
            )));
        }
        if !(self.radius >= Self::MIN_RADIUS) || !self.radius.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "jump radius must be at least {}, got {}",
                Self::MIN_RADIUS,
                self.radius
            )));
        }
        if !(self.profile_tol > 0.0) {
            return Err(Error::InvalidConfig("profile tolerance must be positive".into()));
        }
        self.quadrature.validate()
    }
}

/// Closed-form vacuum characteristic functions.
pub fn cf_closed(observable: Observable, t: f64) -> Complex64 {
    match observable {
        Observable::X | Observable::P => Complex64::new((-t * t / 4.0).exp(), 0.0),
        Observable::XplusP => Complex64::new((-t * t / 2.0).exp(), 0.0),
        Observable::XPplusPX => Complex64::new((2.0 * t).cosh().recip().sqrt(), 0.0),
        Observable::Harmonic => (I * (t / 2.0)).exp(),
    }
}

/// Boundary values `M(x ∓ i eps)` tabulated on Gauss-Kronrod panels of
/// `[-radius, radius]`.
pub struct BoundaryProfile {
    eps: f64,
    panels: Vec<Panel>,
}

#[derive(Clone)]
struct Panel {
    a: f64,
    b: f64,
    x: [f64; 15],
    lower: [Complex64; 15],
    upper: [Complex64; 15],
    /// Matrix-element error, summed over both sides.
    node_err: [f64; 15],
}

/// Matrix element evaluator used to build a profile.
pub type BoundaryFn<'a> = &'a (dyn Fn(Complex64) -> Result<MatrixElement> + Sync);

const MAX_REFINE_ROUNDS: usize = 24;

impl Panel {
    fn build(m: BoundaryFn<'_>, eps: f64, a: f64, b: f64) -> Result<Self> {
        let x = kronrod_nodes(a, b);
        let zero = Complex64::new(0.0, 0.0);
        let mut lower = [zero; 15];
        let mut upper = [zero; 15];
        let mut node_err = [0.0; 15];
        for j in 0..15 {
            let lo = m(Complex64::new(x[j], -eps))?;
            let up = m(Complex64::new(x[j], eps))?;
            lower[j] = lo.value;
            upper[j] = up.value;
            node_err[j] = lo.error_estimate + up.error_estimate;
        }
        Ok(Self {
            a,
            b,
            x,
            lower,
            upper,
            node_err,
        })
    }

    /// `(Kronrod, Gauss, propagated node error)` of the jump integrand at `t`,
    /// before the `1 / 2 pi i` factor.
    fn integrate(&self, t: f64, eps: f64) -> (Complex64, Complex64, f64) {
        let (wk, wg) = kronrod_weights();
        let half = 0.5 * (self.b - self.a);
        let (grow, shrink) = ((t * eps).exp(), (-t * eps).exp());
        let mut kron = Complex64::new(0.0, 0.0);
        let mut gauss = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        for j in 0..15 {
            let phase = (I * (t * self.x[j])).exp();
            let f = phase * (self.lower[j] * grow - self.upper[j] * shrink);
            kron += f * wk[j];
            gauss += f * wg[j];
            err += wk[j] * self.node_err[j] * grow.max(shrink);
        }
        (kron * half, gauss * half, err * half)
    }

    fn quadrature_error(&self, ts: &[f64], eps: f64) -> f64 {
        ts.iter()
            .map(|&t| {
                let (k, g, _) = self.integrate(t, eps);
                (k - g).norm() / (2.0 * PI)
            })
            .fold(0.0, f64::max)
    }
}

impl BoundaryProfile {
    /// Tabulates `m` at `x ± i eps`, refining panels until the jump integral
    /// at `t = 0` and `t = ±t_max` meets `tol`.
    pub fn build(m: BoundaryFn<'_>, eps: f64, radius: f64, t_max: f64, tol: f64) -> Result<Self> {
        let t_max = t_max.abs();
        let width = if t_max > 0.0 { (2.0 / t_max).min(1.0) } else { 1.0 };
        let n = (2.0 * radius / width).ceil() as usize;
        let w = 2.0 * radius / n as f64;
        let bounds: Vec<(f64, f64)> = (0..n)
            .map(|k| (-radius + k as f64 * w, -radius + (k + 1) as f64 * w))
            .collect();
        let probe = [0.0, t_max, -t_max];
        let mut panels = build_panels(m, eps, &bounds)?;
        for _ in 0..MAX_REFINE_ROUNDS {
            let errs: Vec<f64> = panels
                .par_iter()
                .map(|p| p.quadrature_error(&probe, eps))
                .collect();
            let total: f64 = errs.iter().sum();
            if total <= tol {
                break;
            }
            let cut = tol / panels.len() as f64;
            let mut split = Vec::new();
            let mut keep = Vec::with_capacity(panels.len());
            for (p, e) in panels.into_iter().zip(errs) {
                if e > cut && p.b - p.a > 1e-9 {
                    let mid = 0.5 * (p.a + p.b);
                    split.push((p.a, mid));
                    split.push((mid, p.b));
                } else {
                    keep.push(p);
                }
            }
            if split.is_empty() {
                panels = keep;
                break;
            }
            keep.extend(build_panels(m, eps, &split)?);
            keep.sort_by(|p, q| p.a.total_cmp(&q.a));
            panels = keep;
        }
        Ok(Self { eps, panels })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn panel_count(&self) -> usize {
        self.panels.len()
    }

    /// Unsigned jump integral at `t` divided by `2 pi i`, with its error.
    pub fn jump(&self, t: f64) -> (Complex64, f64) {
        let mut value = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        for p in &self.panels {
            let (k, g, e) = p.integrate(t, self.eps);
            value += k;
            err += (k - g).norm() + e;
        }
        (value / (2.0 * PI * I), err / (2.0 * PI))
    }
}

fn build_panels(m: BoundaryFn<'_>, eps: f64, bounds: &[(f64, f64)]) -> Result<Vec<Panel>> {
    bounds
        .par_iter()
        .map(|&(a, b)| Panel::build(m, eps, a, b))
        .collect()
}

/// Orientation of the jump integrand, fixed by requiring the point mass
/// `1 / (z - 1/2)` to integrate to `+1` at `t = 0`.
pub fn orientation() -> f64 {
    static SIGN: OnceLock<f64> = OnceLock::new();
    *SIGN.get_or_init(|| {
        let m = |z: Complex64| -> Result<MatrixElement> {
            Ok(MatrixElement {
                z,
                value: 1.0 / (z - 0.5),
                error_estimate: 0.0,
            })
        };
        let cfg = JumpConfig::default();
        let profile = BoundaryProfile::build(&m, 1e-2, cfg.radius, 0.0, 1e-10)
            .expect("calibration kernel is exact");
        profile.jump(0.0).0.re.signum()
    })
}

/// One `t` of the jump engine with every eps level kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpEvaluation {
    pub sample: CfSample,
    /// Jump integral at each eps of the schedule, in schedule order.
    pub levels: Vec<Complex64>,
}

fn extrapolate(t: f64, eps: &[f64], levels: &[(Complex64, f64)]) -> JumpEvaluation {
    let k = levels.len();
    let (vk, ek) = levels[k - 1];
    let (value, correction, converged) = if k >= 2 {
        let (vp, _) = levels[k - 2];
        let ratio = eps[k - 1] / (eps[k - 2] - eps[k - 1]);
        let correction = (vk - vp) * ratio;
        let converged = if k >= 3 {
            let d_last = (vk - vp).norm();
            let d_prev = (vp - levels[k - 3].0).norm();
            d_last <= d_prev || d_last < 1e-8
        } else {
            true
        };
        (vk + correction, correction.norm(), converged)
    } else {
        (vk, eps[0], true)
    };
    JumpEvaluation {
        sample: CfSample {
            t,
            value,
            error_estimate: ek + correction,
            engine: EngineTag::BoundaryJump,
            converged,
        },
        levels: levels.iter().map(|l| l.0).collect(),
    }
}

/// Jump-engine evaluations on a grid of `t`, sharing one profile per eps.
pub fn cf_jump_grid(
    observable: Observable,
    ts: &[f64],
    jcfg: &JumpConfig,
) -> Result<Vec<JumpEvaluation>> {
    jcfg.validate()?;
    let qcfg = jcfg.quadrature;
    let m = move |z: Complex64| matrix_element(observable, z, &qcfg);
    cf_jump_grid_with(&m, ts, jcfg)
}

/// [`cf_jump_grid`] for an arbitrary matrix element.
pub fn cf_jump_grid_with(
    m: BoundaryFn<'_>,
    ts: &[f64],
    jcfg: &JumpConfig,
) -> Result<Vec<JumpEvaluation>> {
    jcfg.validate()?;
    let sign = orientation();
    let t_max = ts.iter().fold(0.0f64, |acc, t| acc.max(t.abs()));
    let mut per_t: Vec<Vec<(Complex64, f64)>> = vec![Vec::new(); ts.len()];
    for &eps in &jcfg.eps_schedule {
        let profile = BoundaryProfile::build(m, eps, jcfg.radius, t_max, jcfg.profile_tol)?;
        let values: Vec<(Complex64, f64)> = ts.par_iter().map(|&t| profile.jump(t)).collect();
        for (slot, (v, e)) in per_t.iter_mut().zip(values) {
            slot.push((v * sign, e));
        }
    }
    Ok(ts
        .iter()
        .zip(&per_t)
        .map(|(&t, levels)| extrapolate(t, &jcfg.eps_schedule, levels))
        .collect())
}

/// Jump-engine value at one `t`; fails if the eps sequence is not contracting.
pub fn cf_jump(observable: Observable, t: f64, jcfg: &JumpConfig) -> Result<CfSample> {
    let eval = cf_jump_grid(observable, &[t], jcfg)?.remove(0);
    if eval.sample.converged {
        Ok(eval.sample)
    } else {
        Err(Error::JumpNonConvergence { t })
    }
}

/// `sum_n w_n e^{it lambda_n}` over the oscillator levels.
pub fn cf_spectral(observable: Observable, t: f64) -> Result<CfSample> {
    if observable != Observable::Harmonic {
        return Err(Error::UnsupportedObservable(observable.to_string()));
    }
    let w = vacuum_weights();
    let value = w
        .iter()
        .map(|lw| lw.weight * (I * (t * lw.eigenvalue)).exp())
        .sum();
    let error_estimate = w.iter().map(|lw| lw.weight_error).sum();
    Ok(CfSample {
        t,
        value,
        error_estimate,
        engine: EngineTag::SpectralExpansion,
        converged: true,
    })
}

/// Evaluates characteristic functions on a `t` grid.
pub trait CfEngine: Send + Sync {
    fn tag(&self) -> EngineTag;

    fn name(&self) -> &'static str {
        self.tag().token()
    }

    fn supports(&self, observable: Observable) -> bool;

    /// Samples ordered as `ts`.
    fn evaluate(&self, observable: Observable, ts: &[f64]) -> Result<Vec<CfSample>>;
}

pub struct ClosedFormEngine;

impl CfEngine for ClosedFormEngine {
    fn tag(&self) -> EngineTag {
        EngineTag::ClosedForm
    }

    fn supports(&self, _: Observable) -> bool {
        true
    }

    fn evaluate(&self, observable: Observable, ts: &[f64]) -> Result<Vec<CfSample>> {
        Ok(ts
            .iter()
            .map(|&t| CfSample::exact(t, cf_closed(observable, t), self.tag()))
            .collect())
    }
}

pub struct BoundaryJumpEngine {
    pub config: JumpConfig,
}

impl CfEngine for BoundaryJumpEngine {
    fn tag(&self) -> EngineTag {
        EngineTag::BoundaryJump
    }

    fn supports(&self, _: Observable) -> bool {
        true
    }

    fn evaluate(&self, observable: Observable, ts: &[f64]) -> Result<Vec<CfSample>> {
        Ok(cf_jump_grid(observable, ts, &self.config)?
            .into_iter()
            .map(|e| e.sample)
            .collect())
    }
}

pub struct SpectralEngine;

impl CfEngine for SpectralEngine {
    fn tag(&self) -> EngineTag {
        EngineTag::SpectralExpansion
    }

    fn supports(&self, observable: Observable) -> bool {
        observable == Observable::Harmonic
    }

    fn evaluate(&self, observable: Observable, ts: &[f64]) -> Result<Vec<CfSample>> {
        ts.iter().map(|&t| cf_spectral(observable, t)).collect()
    }
}

/// Engines registered by name.
pub struct EngineRegistry {
    engines: Vec<Box<dyn CfEngine>>,
}

impl EngineRegistry {
    pub fn empty() -> Self {
        Self {
            engines: Vec::new(),
        }
    }

    /// Closed form, boundary jump (with `jump`) and spectral expansion.
    pub fn standard(jump: JumpConfig) -> Self {
        let mut r = Self::empty();
        r.register(Box::new(ClosedFormEngine));
        r.register(Box::new(BoundaryJumpEngine { config: jump }));
        r.register(Box::new(SpectralEngine));
        r
    }

    /// Adds an engine, replacing any with the same name.
    pub fn register(&mut self, engine: Box<dyn CfEngine>) {
        self.engines.retain(|e| e.name() != engine.name());
        self.engines.push(engine);
    }

    pub fn get(&self, name: &str) -> Option<&dyn CfEngine> {
        let lower = name.trim().to_ascii_lowercase();
        self.engines
            .iter()
            .find(|e| e.name() == lower)
            .map(|e| e.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.engines.iter().map(|e| e.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn CfEngine> {
        self.engines.iter().map(|e| e.as_ref())
    }
}

/// Finite-difference step for [`moments`].
pub const MOMENT_STEP: f64 = 1e-2;

/// Raw moments `m_k = i^{-k} cf^{(k)}(0)`, `k = 1..=order`, from seven
/// samples spaced `MOMENT_STEP` apart and fourth-order stencils.
pub fn moments(observable: Observable, order: usize, engine: &dyn CfEngine) -> Result<Vec<f64>> {
    if order == 0 || order > 4 {
        return Err(Error::InvalidArgument(format!("moment order {order} outside 1..=4")));
    }
    if !engine.supports(observable) {
        return Err(Error::UnsupportedObservable(format!("{observable} under {}", engine.name())));
    }
    let h = MOMENT_STEP;
    let ts: Vec<f64> = (-3..=3).map(|k| k as f64 * h).collect();
    let s = engine.evaluate(observable, &ts)?;
    let f = |k: i32| s[(k + 3) as usize].value;
    let d = [
        (f(-2) - f(-1) * 8.0 + f(1) * 8.0 - f(2)) / (12.0 * h),
        (-f(-2) + f(-1) * 16.0 - f(0) * 30.0 + f(1) * 16.0 - f(2)) / (12.0 * h * h),
        (f(-3) - f(-2) * 8.0 + f(-1) * 13.0 - f(1) * 13.0 + f(2) * 8.0 - f(3)) / (8.0 * h.powi(3)),
        (-f(-3) + f(-2) * 12.0 - f(-1) * 39.0 + f(0) * 56.0 - f(1) * 39.0 + f(2) * 12.0 - f(3))
            / (6.0 * h.powi(4)),
    ];
    let mut out = Vec::with_capacity(order);
    let mut i_pow = Complex64::new(1.0, 0.0);
    for dk in d.iter().take(order) {
        i_pow *= -I;
        out.push((i_pow * dk).re);
    }
    Ok(out)
}

/// `(mean, variance)` from the first two moments.
pub fn mean_variance(observable: Observable, engine: &dyn CfEngine) -> Result<(f64, f64)> {
    let m = moments(observable, 2, engine)?;
    Ok((m[0], m[1] - m[0] * m[0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(a: f64, b: f64, step: f64) -> Vec<f64> {
        let n = ((b - a) / step).round() as usize;
        (0..=n).map(|k| a + k as f64 * step).collect()
    }

    #[test]
    fn closed_forms() {
        assert_eq!(cf_closed(Observable::X, 0.0), Complex64::new(1.0, 0.0));
        let v = cf_closed(Observable::XPplusPX, 0.5);
        assert!((v.re - 0.805_018_182_194_592_049).abs() < 1e-15);
        let v = cf_closed(Observable::XPplusPX, 1.0);
        assert!((v.re - 0.515_560_111_756_213_828).abs() < 1e-15);
        for t in grid(-4.0, 4.0, 0.1) {
            assert!((cf_closed(Observable::Harmonic, t).norm() - 1.0).abs() < 1e-15);
            assert_eq!(cf_closed(Observable::X, t), cf_closed(Observable::P, t));
        }
    }

    #[test]
    fn jump_config_validation() {
        assert!(JumpConfig::default().validate().is_ok());
        let q = QuadratureConfig::default();
        assert!(JumpConfig::new(vec![0.01, 0.1], 12.0, q).is_err());
        assert!(JumpConfig::new(vec![1.0, 0.1], 12.0, q).is_err());
        assert!(JumpConfig::new(vec![0.1], 4.0, q).is_err());
        assert!(JumpConfig::new(vec![], 12.0, q).is_err());
    }

    #[test]
    fn orientation_is_positive() {
        assert_eq!(orientation(), 1.0);
    }

    #[test]
    fn lorentzian_mass_captured() {
        let m = |z: Complex64| matrix_element(Observable::Harmonic, z, &QuadratureConfig::default());
        let p = BoundaryProfile::build(&m, 1e-3, 12.0, 0.0, 1e-10).unwrap();
        let (mass, _) = p.jump(0.0);
        assert!(mass.re >= 1.0 - 1e-3 && mass.re <= 1.0 + 1e-9, "{mass}");
    }

    #[test]
    fn position_jump_matches_closed_form() {
        let ts = grid(-3.0, 3.0, 0.5);
        let evals = cf_jump_grid(Observable::X, &ts, &JumpConfig::default()).unwrap();
        for e in &evals {
            let exact = cf_closed(Observable::X, e.sample.t);
            assert!((e.sample.value - exact).norm() < 1e-4, "t = {}: {}", e.sample.t, e.sample.value);
            assert!(e.sample.converged);
            // Poisson smoothing error shrinks along the schedule
            let errs: Vec<f64> = e.levels.iter().map(|v| (v - exact).norm()).collect();
            assert!(errs.windows(2).all(|w| w[1] <= w[0] + 1e-12), "t = {}: {errs:?}", e.sample.t);
        }
    }

    #[test]
    fn single_point_jump() {
        let s = cf_jump(Observable::Harmonic, 0.0, &JumpConfig::default()).unwrap();
        assert!((s.value - 1.0).norm() < 1e-4);
        assert!((s.value - 1.0).norm() <= s.error_estimate.max(1e-6));
    }

    #[test]
    fn spectral_engine() {
        assert!((cf_spectral(Observable::Harmonic, 0.0).unwrap().value - 1.0).norm() < 1e-10);
        let v = cf_spectral(Observable::Harmonic, PI).unwrap().value;
        assert!((v - I).norm() < 1e-10);
        assert!(matches!(cf_spectral(Observable::X, 1.0), Err(Error::UnsupportedObservable(_))));
    }

    #[test]
    fn registry_lookup() {
        let r = EngineRegistry::standard(JumpConfig::default());
        assert_eq!(r.names(), vec!["closed", "jump", "spectral"]);
        assert_eq!(r.get("Jump").unwrap().tag(), EngineTag::BoundaryJump);
        assert!(r.get("nope").is_none());
        assert!(!r.get("spectral").unwrap().supports(Observable::X));
        let mut r = r;
        r.register(Box::new(ClosedFormEngine));
        assert_eq!(r.names().len(), 3);
        assert_eq!("SPECTRAL".parse::<EngineTag>().unwrap(), EngineTag::SpectralExpansion);
    }

    #[test]
    fn finite_difference_moments() {
        let closed = ClosedFormEngine;
        let (m, v) = mean_variance(Observable::X, &closed).unwrap();
        assert!(m.abs() < 1e-10 && (v - 0.5).abs() < 1e-8);
        let (m, v) = mean_variance(Observable::XplusP, &closed).unwrap();
        assert!(m.abs() < 1e-10 && (v - 1.0).abs() < 1e-8);
        let (m, v) = mean_variance(Observable::Harmonic, &SpectralEngine).unwrap();
        assert!((m - 0.5).abs() < 1e-8 && v.abs() < 1e-6);
        // Gaussian(1/2): fourth moment 3 sigma^4 = 3/4
        let m4 = moments(Observable::X, 4, &closed).unwrap();
        assert!((m4[2]).abs() < 1e-6 && (m4[3] - 0.75).abs() < 1e-4, "{m4:?}");
        assert!(moments(Observable::X, 5, &closed).is_err());
        assert!(moments(Observable::X, 2, &SpectralEngine).is_err());
    }
}
