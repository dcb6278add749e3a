//! Spectral diagnostics: approximate eigenvectors with their residuals,
//! the unboundedness witness for `R(z;X)`, solutions of the defect equations
//! `(T ± i) f = g`, and oscillator eigendata.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::numerics::{incomplete_gamma_upper, integrate_line, kummer_1f1, QuadratureConfig};
use crate::operators::{vacuum_c, SampledFunction};
use crate::resolvent::{resolve_x_plus_p, resolve_xp_plus_px, Input};
use crate::{Complex64, Error, Observable, Result, I};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxEigenReport {
    pub observable: Observable,
    pub z: f64,
    /// `beta` for `P`, `eps` otherwise.
    pub parameter: f64,
    pub vector_norm: f64,
    pub residual_norm: f64,
    pub closed_form_residual: f64,
    pub discrepancy: f64,
}

impl ApproxEigenReport {
    fn new(
        observable: Observable,
        z: f64,
        parameter: f64,
        vector_norm: f64,
        residual_norm: f64,
        closed_form_residual: f64,
    ) -> Self {
        Self {
            observable,
            z,
            parameter,
            vector_norm,
            residual_norm,
            closed_form_residual,
            discrepancy: (residual_norm - closed_form_residual).abs(),
        }
    }
}

fn check_parameter(name: &str, p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive, got {p}")))
    }
}

fn tight() -> QuadratureConfig {
    QuadratureConfig::default().with_tolerances(1e-15, 1e-13)
}

/// `(z - T) g` from `g` and its exact derivative `dg` at one point.
fn residual_at(observable: Observable, z: f64, s: f64, g: Complex64, dg: Complex64) -> Complex64 {
    let tg = match observable {
        Observable::P => -I * dg,
        Observable::XplusP => g * s - I * dg,
        Observable::XPplusPX => -I * (dg * (2.0 * s) + g),
        _ => unreachable!("no approximate eigenvector family"),
    };
    g * z - tg
}

/// `int_a^b |f|^2`, integrated strictly.
fn norm_sq_on<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(integrate_line(|s| Complex64::new(f(s).norm_sqr(), 0.0), a, b, cfg)
        .or_else(Error::best_estimate)?
        .value
        .re)
}

/// `g_beta(s) = beta^{1/4} e^{-beta s^2} e^{izs}` against `P`.
///
/// Squared norms are `sqrt(pi/2)` and `beta sqrt(pi/2)`; the report holds
/// the norms themselves.
pub fn approx_eigvec_p(z: f64, beta: f64) -> Result<ApproxEigenReport> {
    check_parameter("beta", beta)?;
    let g = |s: f64| beta.powf(0.25) * (-beta * s * s).exp() * (I * z * s).exp();
    let dg = |s: f64| g(s) * (I * z - 2.0 * beta * s);
    let radius = (40.0 / beta).sqrt().max(12.0);
    let cfg = tight();
    let vn = norm_sq_on(g, -radius, radius, &cfg)?;
    let rn = norm_sq_on(
        |s| residual_at(Observable::P, z, s, g(s), dg(s)),
        -radius,
        radius,
        &cfg,
    )?;
    let closed = (beta * (PI / 2.0).sqrt()).sqrt();
    Ok(ApproxEigenReport::new(
        Observable::P,
        z,
        beta,
        vn.sqrt(),
        rn.sqrt(),
        closed,
    ))
}

fn sum_vector(z: f64, eps: f64) -> impl Fn(f64) -> Complex64 {
    move |s: f64| {
        eps.sqrt() * PI.powf(-0.25) * (-0.5 * eps * eps * s * s).exp() * (I * (s * z - 0.5 * s * s)).exp()
    }
}

fn sum_radius(eps: f64) -> f64 {
    80f64.sqrt() / eps
}

/// `g_eps(s) = eps^{1/2} pi^{-1/4} e^{-eps^2 s^2/2} e^{i(sz - s^2/2)}`
/// against `X+P`; unit norm and residual `eps / sqrt 2`.
pub fn approx_eigvec_x_plus_p(z: f64, eps: f64) -> Result<ApproxEigenReport> {
    check_parameter("eps", eps)?;
    let g = sum_vector(z, eps);
    let dg = |s: f64| g(s) * (I * (z - s) - eps * eps * s);
    let radius = sum_radius(eps);
    let cfg = tight();
    let vn = norm_sq_on(&g, -radius, radius, &cfg)?;
    let rn = norm_sq_on(
        |s| residual_at(Observable::XplusP, z, s, g(s), dg(s)),
        -radius,
        radius,
        &cfg,
    )?;
    Ok(ApproxEigenReport::new(
        Observable::XplusP,
        z,
        eps,
        vn.sqrt(),
        rn.sqrt(),
        eps / 2f64.sqrt(),
    ))
}

/// `int s^2 |g_eps|^2`, which is `1 / (2 eps^2)`.
pub fn second_moment_x_plus_p(eps: f64) -> Result<f64> {
    check_parameter("eps", eps)?;
    let g = sum_vector(0.0, eps);
    let radius = sum_radius(eps);
    let f = |s: f64| Complex64::new(s * s * g(s).norm_sqr(), 0.0);
    Ok(integrate_line(f, -radius, radius, &tight())
        .or_else(Error::best_estimate)?
        .value
        .re)
}

/// `g_eps(s) = Gamma(0, 2 eps^2)^{-1/2} |s|^{-1/2 + iz/2} e^{-s^2}` for
/// `|s| >= eps`, zero on `(-eps, eps)`, against `XP+PX`.
pub fn approx_eigvec_xp_plus_px(z: f64, eps: f64) -> Result<ApproxEigenReport> {
    check_parameter("eps", eps)?;
    let gamma = incomplete_gamma_upper(0.0, 2.0 * eps * eps)?;
    let c = gamma.powf(-0.5);
    let expo = Complex64::new(-0.5, 0.5 * z);
    let g = |s: f64| c * (expo * s.abs().ln()).exp() * (-s * s).exp();
    let dg = |s: f64| g(s) * (expo / s - 2.0 * s);
    // both sides |s| >= eps, integrated in v = ln|s|
    let top = 8f64.ln();
    if eps.ln() >= top {
        return Err(Error::InvalidArgument(format!("eps = {eps} leaves no support")));
    }
    let cfg = tight();
    let side = |sign: f64| -> Result<(f64, f64)> {
        let vol = |f: &dyn Fn(f64) -> Complex64| {
            norm_sq_on(|v: f64| f(sign * v.exp()) * (0.5 * v).exp(), eps.ln(), top, &cfg)
        };
        let vn = vol(&g)?;
        let rn = vol(&|s| residual_at(Observable::XPplusPX, z, s, g(s), dg(s)))?;
        Ok((vn, rn))
    };
    let (v1, r1) = side(1.0)?;
    let (v2, r2) = side(-1.0)?;
    let closed = 2.0 * c * (-eps * eps).exp() * (1.0 + 2.0 * eps * eps).sqrt();
    Ok(ApproxEigenReport::new(
        Observable::XPplusPX,
        z,
        eps,
        (v1 + v2).sqrt(),
        (r1 + r2).sqrt(),
        closed,
    ))
}

/// `(||G_n||^2, ||g_n||^2)` for `g_n` the indicator of `[z-1, z-1/n]` and
/// `G_n = g_n / (z - s)`.
pub fn unbounded_witness_x(z: f64, n: u32) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if n == 1 {
        return Ok((0.0, 0.0));
    }
    let (a, b) = (z - 1.0, z - 1.0 / n as f64);
    let cfg = tight();
    // s = z - e^{-v}: ds / (z - s)^2 = e^{v} dv on [0, ln n]
    let big = integrate_line(|v| Complex64::new(v.exp(), 0.0), 0.0, (n as f64).ln(), &cfg)?;
    let small = integrate_line(|_| Complex64::new(1.0, 0.0), a, b, &cfg)?;
    Ok((big.value.re, small.value.re))
}

/// Smooth bump `exp(-1 / (1 - u^2))` with `u` mapping `[a, b]` onto `[-1, 1]`.
pub fn bump(a: f64, b: f64) -> impl Fn(f64) -> Complex64 + Sync + Copy {
    move |s: f64| {
        let u = (2.0 * s - a - b) / (b - a);
        if u.abs() < 1.0 {
            Complex64::new((-1.0 / (1.0 - u * u)).exp(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DefectSign {
    /// `(T + i) f = g`
    Plus,
    /// `(T - i) f = g`
    Minus,
}

/// Sampled solution of `(T ± i) f = g` on `[-radius, radius]` with spacing
/// `step`.
///
/// `X+P` uses `f = -R(∓i; X+P) g`. For `XP+PX`, `Plus` integrates
/// `s f' = (i/2) g` inward from infinity on each side and `Minus` uses
/// `f = -R(i; XP+PX) g`; `g` must vanish near the origin.
pub fn defect_solution(
    observable: Observable,
    sign: DefectSign,
    g: Input<'_>,
    radius: f64,
    step: f64,
    cfg: &QuadratureConfig,
) -> Result<SampledFunction> {
    let z = match sign {
        DefectSign::Plus => -I,
        DefectSign::Minus => I,
    };
    match observable {
        Observable::XplusP => {
            sample(radius, step, |s| Ok(-resolve_x_plus_p(z, g, s, cfg)?))
        }
        Observable::XPplusPX => {
            let near: f64 = (-4..=4)
                .map(|k| g(k as f64 * step).norm())
                .fold(0.0, f64::max);
            if near > 0.0 {
                return Err(Error::BadSupport(near));
            }
            match sign {
                DefectSign::Minus => sample(radius, step, |s| Ok(-resolve_xp_plus_px(z, g, s, cfg)?)),
                DefectSign::Plus => {
                    let r = cfg.radius.max(radius);
                    let tail = |s: f64| -> Complex64 {
                        let f = |w: f64| g(w) / w;
                        if s > 0.0 {
                            if s >= r {
                                return Complex64::new(0.0, 0.0);
                            }
                            -0.5 * I * lenient_value(f, s, r, cfg)
                        } else {
                            if s <= -r {
                                return Complex64::new(0.0, 0.0);
                            }
                            0.5 * I * lenient_value(f, -r, s, cfg)
                        }
                    };
                    let right = tail(f64::MIN_POSITIVE);
                    let left = tail(-f64::MIN_POSITIVE);
                    SampledFunction::symmetric(radius, step, |s| {
                        if s == 0.0 {
                            0.5 * (left + right)
                        } else {
                            tail(s)
                        }
                    })
                }
            }
        }
        other => Err(Error::UnsupportedObservable(other.to_string())),
    }
}

fn lenient_value<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Complex64 {
    integrate_line(f, a, b, cfg)
        .or_else(Error::best_estimate)
        .map(|r| r.value)
        .unwrap_or_default()
}

fn sample<F: Fn(f64) -> Result<Complex64>>(radius: f64, step: f64, f: F) -> Result<SampledFunction> {
    let n = (2.0 * radius / step).round() as usize + 1;
    let grid = crate::operators::uniform_grid(-radius, radius, n)?;
    let values = grid.iter().map(|&s| f(s)).collect::<Result<Vec<_>>>()?;
    SampledFunction::new(grid, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

/// Oscillator level `n >= 1` with eigenvalue `n - 1/2`.
///
/// Odd `n` uses `M1(s sqrt2; lambda) = e^{-s^2/2} 1F1(1/4 - lambda/2; 1/2; s^2)`,
/// even `n` uses `M2(s sqrt2; lambda) = s sqrt2 e^{-s^2/2} 1F1(3/4 - lambda/2; 3/2; s^2)`;
/// both truncate to polynomials. The unit-norm constant is computed
/// numerically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub index: usize,
    pub eigenvalue: f64,
    pub parity: Parity,
    scale: f64,
}

impl EigenPair {
    fn raw(&self, s: f64) -> f64 {
        let lam = self.eigenvalue;
        let c = |v: f64| Complex64::new(v, 0.0);
        let x = s * s;
        let gauss = (-0.5 * x).exp();
        match self.parity {
            Parity::Even => gauss * kummer_1f1(c(0.25 - 0.5 * lam), c(0.5), x).map_or(f64::NAN, |v| v.re),
            Parity::Odd => {
                s * 2f64.sqrt() * gauss * kummer_1f1(c(0.75 - 0.5 * lam), c(1.5), x).map_or(f64::NAN, |v| v.re)
            }
        }
    }

    /// Normalised eigenfunction at `s`.
    pub fn value(&self, s: f64) -> Complex64 {
        Complex64::new(self.scale * self.raw(s), 0.0)
    }

    /// Beyond this radius the eigenfunction is below double precision.
    pub fn support_radius(&self) -> f64 {
        (2.0 * self.index as f64).sqrt() + 10.0
    }
}

pub fn oscillator_eigenpair(n: usize) -> Result<EigenPair> {
    if n == 0 {
        return Err(Error::InvalidArgument("oscillator levels start at n = 1".into()));
    }
    let parity = if n % 2 == 1 { Parity::Even } else { Parity::Odd };
    let mut pair = EigenPair {
        index: n,
        eigenvalue: n as f64 - 0.5,
        parity,
        scale: 1.0,
    };
    let r = pair.support_radius();
    let mass = integrate_line(
        |s| Complex64::new(pair.raw(s).powi(2), 0.0),
        -r,
        r,
        &tight(),
    )
    .or_else(Error::best_estimate)?
    .value
    .re;
    pair.scale = mass.sqrt().recip();
    Ok(pair)
}

/// `|<Phi, psi_n>|^2` for one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelWeight {
    pub index: usize,
    pub eigenvalue: f64,
    pub weight: f64,
    pub weight_error: f64,
}

/// Levels retained in the vacuum expansion.
pub const VACUUM_LEVELS: usize = 16;

fn level_weight(n: usize) -> Result<LevelWeight> {
    let pair = oscillator_eigenpair(n)?;
    let r = pair.support_radius();
    let ip = integrate_line(|s| vacuum_c(s) * pair.value(s), -r, r, &tight())
        .or_else(Error::best_estimate)?;
    Ok(LevelWeight {
        index: n,
        eigenvalue: pair.eigenvalue,
        weight: ip.value.norm_sqr(),
        weight_error: 2.0 * ip.value.norm() * ip.error_estimate + ip.error_estimate.powi(2),
    })
}

/// Vacuum spectral weights of the oscillator, computed once.
pub fn vacuum_weights() -> &'static [LevelWeight] {
    static WEIGHTS: OnceLock<Vec<LevelWeight>> = OnceLock::new();
    WEIGHTS.get_or_init(|| {
        (1..=VACUUM_LEVELS)
            .map(|n| level_weight(n).expect("oscillator levels are finite polynomials"))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{apply, vacuum};

    #[test]
    fn momentum_reports() {
        let r = approx_eigvec_p(0.3, 2.0).unwrap();
        assert!((r.closed_form_residual.powi(2) - 2.0 * (PI / 2.0).sqrt()).abs() < 1e-12);
        assert!((r.closed_form_residual.powi(2) - 2.5066).abs() < 1e-4);
        for (z, beta) in [(0.0, 1e-2), (1.5, 0.1), (-4.0, 1.0), (2.0, 2.0)] {
            let r = approx_eigvec_p(z, beta).unwrap();
            assert!(r.discrepancy < 1e-6, "{r:?}");
            assert!((r.vector_norm.powi(2) - (PI / 2.0).sqrt()).abs() < 1e-9, "{r:?}");
        }
        let small = approx_eigvec_p(0.0, 1e-3).unwrap().residual_norm;
        let large = approx_eigvec_p(0.0, 1e-1).unwrap().residual_norm;
        assert!(small < large);
        assert!(approx_eigvec_p(0.0, 0.0).is_err());
    }

    #[test]
    fn sum_reports() {
        let r = approx_eigvec_x_plus_p(0.7, 0.1).unwrap();
        assert!((r.closed_form_residual.powi(2) - 0.005).abs() < 1e-15);
        for eps in [1e-2, 0.1, 1.0] {
            for z in [-1.0, 0.0, 2.5] {
                let r = approx_eigvec_x_plus_p(z, eps).unwrap();
                assert!(r.discrepancy < 1e-6, "{r:?}");
                assert!((r.vector_norm - 1.0).abs() < 1e-9, "{r:?}");
            }
        }
        assert!((second_moment_x_plus_p(1.0).unwrap() - 0.5).abs() < 1e-10);
        assert!((second_moment_x_plus_p(0.25).unwrap() - 8.0).abs() < 1e-8);
    }

    #[test]
    fn dilation_reports() {
        let r = approx_eigvec_xp_plus_px(0.0, 0.5).unwrap();
        assert!((r.closed_form_residual - 2.549_739_432_552_249_94).abs() < 1e-10);
        for eps in [0.25, 0.5, 1.0] {
            for z in [-2.0, 0.0, 1.0] {
                let r = approx_eigvec_xp_plus_px(z, eps).unwrap();
                assert!(r.discrepancy < 1e-6, "{r:?}");
                assert!((r.vector_norm - 1.0).abs() < 1e-9, "{r:?}");
            }
        }
        let a = approx_eigvec_xp_plus_px(0.0, 1e-2).unwrap().residual_norm;
        let b = approx_eigvec_xp_plus_px(0.0, 1e-1).unwrap().residual_norm;
        assert!(a < b);
    }

    #[test]
    fn residuals_monotone_in_parameter() {
        let grid = [1e-3, 1e-2, 1e-1, 1.0];
        type Family = fn(f64, f64) -> Result<ApproxEigenReport>;
        for family in [approx_eigvec_p as Family, approx_eigvec_x_plus_p, approx_eigvec_xp_plus_px] {
            let rs: Vec<f64> = grid.iter().map(|&p| family(0.5, p).unwrap().residual_norm).collect();
            assert!(rs.windows(2).all(|w| w[0] < w[1]), "{rs:?}");
        }
    }

    #[test]
    fn witness_values() {
        assert_eq!(unbounded_witness_x(0.3, 1).unwrap(), (0.0, 0.0));
        for (n, z) in [(2u32, 0.0), (5, 1.7), (100, -3.0)] {
            let (big, small) = unbounded_witness_x(z, n).unwrap();
            assert!((big - (n as f64 - 1.0)).abs() < 1e-10);
            assert!((small - (1.0 - 1.0 / n as f64)).abs() < 1e-10);
        }
        let ratio = |n| {
            let (b, s) = unbounded_witness_x(0.0, n).unwrap();
            (b / s).sqrt()
        };
        assert!(ratio(100) > ratio(10));
        assert!(unbounded_witness_x(0.0, 0).is_err());
    }

    #[test]
    fn bump_is_compact_and_smooth() {
        let b = bump(1.0, 2.0);
        assert_eq!(b(0.99), Complex64::new(0.0, 0.0));
        assert_eq!(b(2.0), Complex64::new(0.0, 0.0));
        assert!((b(1.5).re - (-1.0f64).exp()).abs() < 1e-15);
    }

    fn round_trip(observable: Observable, sign: DefectSign, g: Input<'_>, exclude: f64) -> f64 {
        let cfg = QuadratureConfig::default();
        let step = 1.0 / 128.0;
        let f = defect_solution(observable, sign, g, 8.0, step, &cfg).unwrap();
        let shift = match sign {
            DefectSign::Plus => I,
            DefectSign::Minus => -I,
        };
        // each side separately: the solution may jump at the origin
        let pieces: Vec<std::ops::Range<usize>> = if exclude > 0.0 {
            let left = f.grid().iter().position(|&s| s > -exclude).unwrap();
            let right = f.grid().iter().position(|&s| s >= exclude).unwrap();
            vec![0..left, right..f.len()]
        } else {
            vec![0..f.len()]
        };
        let mut worst: f64 = 0.0;
        for range in pieces {
            let part = SampledFunction::new(
                f.grid()[range.clone()].to_vec(),
                f.values()[range].to_vec(),
            )
            .unwrap();
            let tf = apply(observable, &part).unwrap();
            let lhs = tf.combine(Complex64::new(1.0, 0.0), &part, shift).unwrap();
            for k in lhs.interior() {
                let s = lhs.grid()[k];
                worst = worst.max((lhs.values()[k] - g(s)).norm());
            }
        }
        worst
    }

    #[test]
    fn defect_round_trips() {
        let b = bump(1.0, 2.0);
        let two = |s: f64| bump(1.0, 2.0)(s) + bump(-3.0, -0.5)(s) * 0.5;
        for sign in [DefectSign::Plus, DefectSign::Minus] {
            let e = round_trip(Observable::XplusP, sign, &b, 0.0);
            assert!(e < 1e-4, "X+P {sign:?}: {e}");
            let e = round_trip(Observable::XPplusPX, sign, &two, 0.1);
            assert!(e < 1e-4, "XP+PX {sign:?}: {e}");
        }
    }

    #[test]
    fn defect_properties() {
        let cfg = QuadratureConfig::default();
        let b = bump(1.0, 2.0);
        let zero = |_: f64| Complex64::new(0.0, 0.0);
        for o in [Observable::XplusP, Observable::XPplusPX] {
            for sign in [DefectSign::Plus, DefectSign::Minus] {
                let f = defect_solution(o, sign, &zero, 4.0, 0.125, &cfg).unwrap();
                assert!(f.values().iter().all(|v| v.norm() == 0.0));
            }
        }
        let f = defect_solution(Observable::XplusP, DefectSign::Minus, &b, 8.0, 1.0 / 64.0, &cfg).unwrap();
        for (s, v) in f.grid().iter().zip(f.values()) {
            if *s < 1.0 {
                assert_eq!(v.norm(), 0.0, "s = {s}");
            }
        }
        // decay at radius - 1
        let radius = 12.0;
        for (o, sign) in [
            (Observable::XplusP, DefectSign::Plus),
            (Observable::XplusP, DefectSign::Minus),
            (Observable::XPplusPX, DefectSign::Plus),
        ] {
            let f = defect_solution(o, sign, &b, radius, 1.0 / 32.0, &cfg).unwrap();
            let at = |s: f64| f.interpolate(s).norm();
            assert!(at(radius - 1.0) < 1e-3 && at(1.0 - radius) < 1e-3, "{o} {sign:?}");
        }
        assert!(matches!(
            defect_solution(Observable::XPplusPX, DefectSign::Plus, &vacuum_c, 4.0, 0.125, &cfg),
            Err(Error::BadSupport(_))
        ));
        assert!(matches!(
            defect_solution(Observable::P, DefectSign::Plus, &b, 4.0, 0.125, &cfg),
            Err(Error::UnsupportedObservable(_))
        ));
    }

    /// Normalised Hermite function of quantum number `m` by recurrence.
    fn hermite_function(m: usize, s: f64) -> f64 {
        let mut prev = 0.0;
        let mut cur = PI.powf(-0.25) * (-0.5 * s * s).exp();
        for k in 0..m {
            let next = (2.0 / (k as f64 + 1.0)).sqrt() * s * cur - (k as f64 / (k as f64 + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
        }
        cur
    }

    #[test]
    fn eigenpairs_match_hermite_functions() {
        for n in 1..=10 {
            let p = oscillator_eigenpair(n).unwrap();
            assert_eq!(p.eigenvalue, (2.0 * n as f64 - 1.0) / 2.0);
            assert_eq!(p.parity, if n % 2 == 1 { Parity::Even } else { Parity::Odd });
            let sign = (p.value(0.7).re / hermite_function(n - 1, 0.7)).signum();
            for s in [-3.1, -0.4, 0.0, 0.7, 2.5] {
                assert!((p.value(s).re - sign * hermite_function(n - 1, s)).abs() < 1e-10, "n = {n}, s = {s}");
            }
        }
        let ground = oscillator_eigenpair(1).unwrap();
        assert!((ground.value(0.3).re - vacuum(0.3)).abs() < 1e-12);
        let first = oscillator_eigenpair(2).unwrap();
        let ratio = first.value(0.5).re / (0.5 * (-0.125f64).exp());
        assert!((first.value(1.5).re / (1.5 * (-1.125f64).exp()) - ratio).abs() < 1e-12);
        assert!(oscillator_eigenpair(0).is_err());
    }

    #[test]
    fn eigenpairs_orthonormal() {
        let pairs: Vec<EigenPair> = (1..=6).map(|n| oscillator_eigenpair(n).unwrap()).collect();
        for p in &pairs {
            for q in &pairs {
                let cfg = QuadratureConfig::default().with_tolerances(1e-13, 1e-12);
                let ip = integrate_line(|s| p.value(s) * q.value(s), -14.0, 14.0, &cfg).unwrap().value.re;
                let expected = if p.index == q.index { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < 1e-8, "<{}, {}> = {ip}", p.index, q.index);
            }
        }
    }

    #[test]
    fn eigenpairs_solve_weber_equation() {
        for n in 1..=6 {
            let p = oscillator_eigenpair(n).unwrap();
            let f = SampledFunction::symmetric(10.0, 1.0 / 128.0, |s| p.value(s)).unwrap();
            let hf = apply(Observable::Harmonic, &f).unwrap();
            let target = f.map(|_, v| v * p.eigenvalue);
            assert!(hf.max_interior_diff(&target, 0).unwrap() < 1e-6, "n = {n}");
        }
    }

    #[test]
    fn vacuum_weights_concentrate_on_ground_state() {
        let w = vacuum_weights();
        assert_eq!(w.len(), VACUUM_LEVELS);
        assert!((w[0].weight - 1.0).abs() < 1e-10);
        assert_eq!(w[0].eigenvalue, 0.5);
        for lw in &w[1..] {
            assert!(lw.weight < 1e-10, "{lw:?}");
        }
    }
}
