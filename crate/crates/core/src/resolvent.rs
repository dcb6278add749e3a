//! Resolvent kernels `R(z;T) g(s)` and the vacuum matrix element
//! `M(z) = <Phi, R(z;T) Phi>`.
//!
//! Each observable has one [`ResolventKernel`] implementation, looked up by
//! [`kernel_for`]. Pointwise evaluation works for any Gaussian-damped `g`.
//! The vacuum element is computed by a route specialised to `Phi`:
//!
//! * `X`: one adaptive integral of `Phi^2 / (z - s)`.
//! * `P`, `X+P`: the half-line kernel is swept across the outer quadrature
//!   nodes, so each inner integral is the previous one times a phase plus a
//!   short panel.
//! * `XP+PX`: the dilation integral is swapped with the `s` integral, which
//!   leaves one integral in the dilation variable plus two Mellin integrals.
//! * Harmonic: the eigen-expansion over oscillator levels.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::numerics::{
    gk15, integrate_halfline, integrate_lenient, integrate_with_breaks, kronrod_nodes,
    kronrod_weights, mellin_half, Direction, IntegralResult, QuadratureConfig,
};
use crate::operators::vacuum_c;
use crate::spectral::{oscillator_eigenpair, vacuum_weights};
use crate::{Complex64, Error, Observable, Result, I};

/// Region of the `z` plane in which a kernel formula is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Validity {
    UpperHalf,
    LowerHalf,
    ImAboveMinusOne,
    SpectralExpansion,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolventQuery {
    pub observable: Observable,
    pub z: Complex64,
    pub validity: Validity,
}

impl ResolventQuery {
    pub fn new(observable: Observable, z: Complex64) -> Result<Self> {
        let validity = match observable {
            Observable::X | Observable::P | Observable::XplusP => {
                if z.im > 0.0 {
                    Validity::UpperHalf
                } else if z.im < 0.0 {
                    Validity::LowerHalf
                } else {
                    return Err(Error::RealZ { z });
                }
            }
            Observable::XPplusPX => {
                if z.im > -1.0 {
                    Validity::ImAboveMinusOne
                } else {
                    return Err(Error::OutsideStrip { z });
                }
            }
            Observable::Harmonic => {
                if let Some(eigenvalue) = oscillator_level_at(z) {
                    return Err(Error::AtEigenvalue { z, eigenvalue });
                }
                Validity::SpectralExpansion
            }
        };
        Ok(Self {
            observable,
            z,
            validity,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixElement {
    pub z: Complex64,
    pub value: Complex64,
    pub error_estimate: f64,
}

impl MatrixElement {
    fn from_integral(z: Complex64, r: IntegralResult) -> Self {
        Self {
            z,
            value: r.value,
            error_estimate: r.error_estimate,
        }
    }
}

/// Function argument accepted by the pointwise kernels.
pub type Input<'a> = &'a (dyn Fn(f64) -> Complex64 + Sync);

pub trait ResolventKernel: Send + Sync {
    fn observable(&self) -> Observable;

    /// `R(z;T) g` evaluated at `s`.
    fn resolve(&self, z: Complex64, g: Input<'_>, s: f64, cfg: &QuadratureConfig)
        -> Result<Complex64>;

    /// `<Phi, R(z;T) Phi>`.
    fn vacuum_element(&self, z: Complex64, cfg: &QuadratureConfig) -> Result<MatrixElement>;
}

struct PositionKernel;
struct MomentumKernel;
struct SumKernel;
struct DilationKernel;
struct OscillatorKernel;

static POSITION: PositionKernel = PositionKernel;
static MOMENTUM: MomentumKernel = MomentumKernel;
static SUM: SumKernel = SumKernel;
static DILATION: DilationKernel = DilationKernel;
static OSCILLATOR: OscillatorKernel = OscillatorKernel;

/// The registered kernel for `observable`.
pub fn kernel_for(observable: Observable) -> &'static dyn ResolventKernel {
    match observable {
        Observable::X => &POSITION,
        Observable::P => &MOMENTUM,
        Observable::XplusP => &SUM,
        Observable::XPplusPX => &DILATION,
        Observable::Harmonic => &OSCILLATOR,
    }
}

pub fn matrix_element(
    observable: Observable,
    z: Complex64,
    cfg: &QuadratureConfig,
) -> Result<MatrixElement> {
    kernel_for(observable).vacuum_element(z, cfg)
}

fn require_off_axis(z: Complex64) -> Result<()> {
    if z.im == 0.0 || !z.im.is_finite() {
        Err(Error::RealZ { z })
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------- X

/// `g(s) / (z - s)`.
pub fn resolve_x(z: Complex64, g: Input<'_>, s: f64) -> Result<Complex64> {
    if z.im == 0.0 && s == z.re {
        return Err(Error::PoleHit { z: z.re });
    }
    Ok(g(s) / (z - s))
}

impl ResolventKernel for PositionKernel {
    fn observable(&self) -> Observable {
        Observable::X
    }

    fn resolve(&self, z: Complex64, g: Input<'_>, s: f64, _: &QuadratureConfig) -> Result<Complex64> {
        resolve_x(z, g, s)
    }

    fn vacuum_element(&self, z: Complex64, cfg: &QuadratureConfig) -> Result<MatrixElement> {
        require_off_axis(z)?;
        let r = cfg.radius;
        let f = |s: f64| {
            let phi = vacuum_c(s);
            phi * phi / (z - s)
        };
        // the integrand peaks with width |Im z| at s = Re z
        let w = z.im.abs();
        let breaks = [z.re - 10.0 * w, z.re - w, z.re, z.re + w, z.re + 10.0 * w];
        let res = integrate_with_breaks(f, -r, r, &breaks, cfg).or_else(Error::best_estimate)?;
        Ok(MatrixElement::from_integral(z, res))
    }
}

// ------------------------------------------------------- P and X+P

/// The two half-line kernels share the form
/// `c * int exp(phase(s) - phase(w)) g(w) dw` over `w < s` (`Im z > 0`,
/// `c = -i`) or `w > s` (`Im z < 0`, `c = i`).
#[derive(Clone, Copy)]
struct HalfLine {
    z: Complex64,
    chirp: bool,
}

impl HalfLine {
    fn new(z: Complex64, chirp: bool) -> Result<Self> {
        require_off_axis(z)?;
        Ok(Self { z, chirp })
    }

    fn phase(&self, s: f64) -> Complex64 {
        let p = I * self.z * s;
        if self.chirp {
            p - I * (0.5 * s * s)
        } else {
            p
        }
    }

    fn upper(&self) -> bool {
        self.z.im > 0.0
    }

    fn prefactor(&self) -> Complex64 {
        if self.upper() {
            -I
        } else {
            I
        }
    }

    fn resolve(&self, g: Input<'_>, s: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
        let ps = self.phase(s);
        let f = |w: f64| (ps - self.phase(w)).exp() * g(w);
        let dir = if self.upper() {
            Direction::Down
        } else {
            Direction::Up
        };
        let r = integrate_halfline(f, s, dir, cfg).or_else(Error::best_estimate)?;
        Ok(self.prefactor() * r.value)
    }

    /// `<Phi, R Phi>` by sweeping the inner integral across the outer nodes.
    fn vacuum_element(&self, cfg: &QuadratureConfig) -> MatrixElement {
        let r = cfg.radius;
        let panels = (2.0 * r / SWEEP_PANEL).ceil() as usize;
        let width = 2.0 * r / panels as f64;
        let mut nodes = Vec::with_capacity(15 * panels);
        for k in 0..panels {
            let a = -r + k as f64 * width;
            nodes.extend_from_slice(&kronrod_nodes(a, a + width));
        }
        let mut inner = vec![(Complex64::new(0.0, 0.0), 0.0); nodes.len()];
        let mut acc = Complex64::new(0.0, 0.0);
        let mut acc_err = 0.0;
        let step = |prev: f64, s: f64, acc: &mut Complex64, acc_err: &mut f64| {
            let ps = self.phase(s);
            let carry = (ps - self.phase(prev)).exp();
            let f = |w: f64| (ps - self.phase(w)).exp() * vacuum_c(w);
            let (lo, hi) = if prev < s { (prev, s) } else { (s, prev) };
            let (v, e) = gk15(&f, lo, hi);
            *acc = carry * *acc + v;
            *acc_err = carry.norm() * *acc_err + e;
        };
        if self.upper() {
            let mut prev = -r;
            for (k, &s) in nodes.iter().enumerate() {
                step(prev, s, &mut acc, &mut acc_err);
                inner[k] = (acc, acc_err);
                prev = s;
            }
        } else {
            let mut prev = r;
            for (k, &s) in nodes.iter().enumerate().rev() {
                step(prev, s, &mut acc, &mut acc_err);
                inner[k] = (acc, acc_err);
                prev = s;
            }
        }
        let (wk, wg) = kronrod_weights();
        let half = 0.5 * width;
        let mut value = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        for k in 0..panels {
            let mut kron = Complex64::new(0.0, 0.0);
            let mut gauss = Complex64::new(0.0, 0.0);
            for j in 0..15 {
                let idx = 15 * k + j;
                let phi = vacuum_c(nodes[idx]);
                let (v, e) = inner[idx];
                kron += phi * v * wk[j];
                gauss += phi * v * wg[j];
                err += half * wk[j] * phi.re * e;
            }
            value += kron * half;
            err += ((kron - gauss) * half).norm();
        }
        MatrixElement {
            z: self.z,
            value: self.prefactor() * value,
            error_estimate: err,
        }
    }
}

/// Outer panel width of the half-line sweep.
const SWEEP_PANEL: f64 = 0.125;

/// `-i int_{-inf}^s e^{iz(s-w)} g(w) dw` for `Im z > 0`,
/// `i int_s^inf e^{iz(s-w)} g(w) dw` for `Im z < 0`.
pub fn resolve_p(z: Complex64, g: Input<'_>, s: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    HalfLine::new(z, false)?.resolve(g, s, cfg)
}

/// The `P` kernel with the extra chirp `e^{i(w^2 - s^2)/2}`.
pub fn resolve_x_plus_p(
    z: Complex64,
    g: Input<'_>,
    s: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    HalfLine::new(z, true)?.resolve(g, s, cfg)
}

impl ResolventKernel for MomentumKernel {
    fn observable(&self) -> Observable {
        Observable::P
    }

    fn resolve(&self, z: Complex64, g: Input<'_>, s: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
        resolve_p(z, g, s, cfg)
    }

    fn vacuum_element(&self, z: Complex64, cfg: &QuadratureConfig) -> Result<MatrixElement> {
        Ok(HalfLine::new(z, false)?.vacuum_element(cfg))
    }
}

impl ResolventKernel for SumKernel {
    fn observable(&self) -> Observable {
        Observable::XplusP
    }

    fn resolve(&self, z: Complex64, g: Input<'_>, s: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
        resolve_x_plus_p(z, g, s, cfg)
    }

    fn vacuum_element(&self, z: Complex64, cfg: &QuadratureConfig) -> Result<MatrixElement> {
        Ok(HalfLine::new(z, true)?.vacuum_element(cfg))
    }
}

// ----------------------------------------------------------- XP+PX

/// `R(z; XP+PX)` prepared for one input `g`.
///
/// With `a = (z + i) / 2i`, the Mellin constants `K± = int_0^inf w^{a-1} g(±w) dw`
/// are computed once because every `s` needs them when `Im z <= 0`.
pub struct DilationResolvent<'a> {
    z: Complex64,
    a: Complex64,
    g: Input<'a>,
    g0: Complex64,
    /// `(K+, K-)`; present on the lower branch only.
    mellin: Option<(Complex64, Complex64)>,
    cfg: QuadratureConfig,
}

fn dilation_exponent(z: Complex64) -> Result<Complex64> {
    if !(z.im > -1.0) || !z.is_finite() {
        return Err(Error::OutsideStrip { z });
    }
    Ok((z + I) / (2.0 * I))
}

/// Length of the dilation-variable window for decay rate `Re a`.
fn dilation_window(a: Complex64) -> f64 {
    (45.0 / a.re.max(1e-3)).min(700.0)
}

impl<'a> DilationResolvent<'a> {
    pub fn new(z: Complex64, g: Input<'a>, cfg: &QuadratureConfig) -> Result<Self> {
        let a = dilation_exponent(z)?;
        let mellin = if z.im > 0.0 {
            None
        } else {
            let q = a - 1.0;
            let kp = mellin_half(|w| g(w), q, cfg)?.value;
            let km = mellin_half(|w| g(-w), q, cfg)?.value;
            Some((kp, km))
        };
        Ok(Self {
            z,
            a,
            g,
            g0: g(0.0),
            mellin,
            cfg: *cfg,
        })
    }

    /// Solution started from `s = 0`:
    /// `-(i/2) int_0^inf e^{-a u} g(s e^{-u}) du`, equal to `g(0)/(z+i)` at 0.
    fn regular(&self, s: f64) -> Result<Complex64> {
        if s == 0.0 {
            return Ok(self.g0 / (self.z + I));
        }
        let a = self.a;
        let f = |u: f64| (-a * u).exp() * ((self.g)(s * (-u).exp()) - self.g0);
        let r = integrate_lenient(f, 0.0, dilation_window(a), &self.cfg)?;
        Ok(-0.5 * I * (r.value + self.g0 / a))
    }

    pub fn at(&self, s: f64) -> Result<Complex64> {
        let u = self.regular(s)?;
        match self.mellin {
            None => Ok(u),
            Some(_) if s == 0.0 => Ok(u),
            Some((kp, km)) => {
                let k = if s > 0.0 { kp } else { km };
                let power = (-self.a * s.abs().ln()).exp();
                Ok(0.5 * I * k * power + u)
            }
        }
    }
}

/// `R(z; XP+PX) g (s)` for `Im z > -1`.
///
/// For `Im z > 0` this is the solution regular at the origin; for
/// `-1 < Im z <= 0` it is `(i/2) |s|^{-a} int_{|s|}^inf w^{a-1} g(w sgn s) dw`.
pub fn resolve_xp_plus_px(
    z: Complex64,
    g: Input<'_>,
    s: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    DilationResolvent::new(z, g, cfg)?.at(s)
}

impl ResolventKernel for DilationKernel {
    fn observable(&self) -> Observable {
        Observable::XPplusPX
    }

    fn resolve(&self, z: Complex64, g: Input<'_>, s: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
        resolve_xp_plus_px(z, g, s, cfg)
    }

    fn vacuum_element(&self, z: Complex64, cfg: &QuadratureConfig) -> Result<MatrixElement> {
        let a = dilation_exponent(z)?;
        // int Phi(s) Phi(s e^{-u}) ds = sqrt(2 / (1 + e^{-2u}))
        let f = |u: f64| (-a * u).exp() * (SQRT_2 / (1.0 + (-2.0 * u).exp()).sqrt() - SQRT_2);
        let r = integrate_lenient(f, 0.0, dilation_window(a), cfg)?;
        let mut value = -0.5 * I * (r.value + SQRT_2 / a);
        let mut err = 0.5 * r.error_estimate;
        if z.im <= 0.0 {
            let k = mellin_half(vacuum_c, a - 1.0, cfg)?;
            let j = mellin_half(vacuum_c, -a, cfg)?;
            value += I * k.value * j.value;
            err += k.error_estimate * j.value.norm() + j.error_estimate * k.value.norm();
        }
        Ok(MatrixElement {
            z,
            value,
            error_estimate: err,
        })
    }
}

// -------------------------------------------------------- Harmonic

/// Number of oscillator levels in the pointwise eigen-expansion.
pub const HARMONIC_LEVELS: usize = 24;

fn oscillator_level_at(z: Complex64) -> Option<f64> {
    if z.im != 0.0 {
        return None;
    }
    let k = z.re + 0.5;
    (k >= 1.0 && k.fract() == 0.0).then_some(z.re)
}

/// `<Phi, R(z; H) Phi> = sum_n w_n / (z - lambda_n)` with numerically
/// computed vacuum weights `w_n`.
pub fn resolve_harmonic_elem(z: Complex64) -> Result<Complex64> {
    ResolventQuery::new(Observable::Harmonic, z)?;
    Ok(vacuum_weights()
        .iter()
        .map(|lw| lw.weight / (z - lw.eigenvalue))
        .sum())
}

impl ResolventKernel for OscillatorKernel {
    fn observable(&self) -> Observable {
        Observable::Harmonic
    }

    fn resolve(&self, z: Complex64, g: Input<'_>, s: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
        ResolventQuery::new(Observable::Harmonic, z)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 1..=HARMONIC_LEVELS {
            let pair = oscillator_eigenpair(n)?;
            let radius = cfg.radius.max(pair.support_radius());
            let c = integrate_lenient(|w| pair.value(w) * g(w), -radius, radius, cfg)?;
            acc += pair.value(s) * c.value / (z - pair.eigenvalue);
        }
        Ok(acc)
    }

    fn vacuum_element(&self, z: Complex64, _: &QuadratureConfig) -> Result<MatrixElement> {
        let value = resolve_harmonic_elem(z)?;
        let tail: f64 = vacuum_weights()
            .iter()
            .map(|lw| lw.weight_error / (z - lw.eigenvalue).norm())
            .sum();
        Ok(MatrixElement {
            z,
            value,
            error_estimate: tail,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate_line;
    use crate::operators::{apply, vacuum, SampledFunction};

    use std::f64::consts::PI;

    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn phi(s: f64) -> Complex64 {
        vacuum_c(s)
    }

    fn zero(_: f64) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn position_kernel_values() {
        let v = resolve_x(I, &phi, 0.0).unwrap();
        assert!(close(v, -I * PI.powf(-0.25), 1e-15));
        assert_eq!(resolve_x(Complex64::new(2.0, 1.0), &zero, 0.3).unwrap(), zero(0.0));
        assert!(matches!(
            resolve_x(Complex64::new(0.5, 0.0), &phi, 0.5),
            Err(Error::PoleHit { .. })
        ));
    }

    #[test]
    fn momentum_kernel_golden() {
        let v = resolve_p(I, &phi, 0.0, &cfg()).unwrap();
        assert!(close(v, Complex64::new(0.0, -0.492_497_653_293_844_352), 1e-10));
        assert_eq!(resolve_p(I, &zero, 0.4, &cfg()).unwrap(), zero(0.0));
        assert!(matches!(
            resolve_p(Complex64::new(1.0, 0.0), &phi, 0.0, &cfg()),
            Err(Error::RealZ { .. })
        ));
    }

    #[test]
    fn full_line_plane_wave_against_gaussian() {
        let z = Complex64::new(0.0, 2.0);
        let s = 1.0;
        let f = |w: f64| (I * z * (s - w)).exp() * phi(w);
        let num = integrate_line(f, -14.0, 14.0, &cfg()).unwrap().value;
        let exact = SQRT_2 * PI.powf(0.25) * (I * s * z - z * z / 2.0).exp();
        assert!(close(num, exact, 1e-9));
    }

    #[test]
    fn sum_kernel_vanishes_left_of_support() {
        let bump = |s: f64| {
            let u = 2.0 * s - 3.0;
            if u.abs() < 1.0 {
                Complex64::new((-1.0 / (1.0 - u * u)).exp(), 0.0)
            } else {
                zero(s)
            }
        };
        for s in [-3.0, 0.0, 0.99] {
            assert_eq!(resolve_x_plus_p(I, &bump, s, &cfg()).unwrap(), zero(s));
        }
        assert!(resolve_x_plus_p(I, &bump, 1.6, &cfg()).unwrap().norm() > 1e-3);
        assert_eq!(resolve_x_plus_p(I, &zero, 0.2, &cfg()).unwrap(), zero(0.0));
    }

    #[test]
    fn dilation_kernel_origin_and_symmetry() {
        for z in [I, Complex64::new(1.0, -0.5), Complex64::new(-2.0, 0.3)] {
            let v = resolve_xp_plus_px(z, &phi, 0.0, &cfg()).unwrap();
            assert!(close(v, vacuum_c(0.0) / (z + I), 1e-14));
            for s in [0.3, 1.7] {
                let plus = resolve_xp_plus_px(z, &phi, s, &cfg()).unwrap();
                let minus = resolve_xp_plus_px(z, &phi, -s, &cfg()).unwrap();
                assert!(close(plus, minus, 1e-10), "z = {z}, s = {s}");
            }
        }
        assert_eq!(resolve_xp_plus_px(I, &zero, 0.7, &cfg()).unwrap(), zero(0.0));
        assert!(matches!(
            resolve_xp_plus_px(Complex64::new(0.0, -1.0), &phi, 1.0, &cfg()),
            Err(Error::OutsideStrip { .. })
        ));
    }

    #[test]
    fn dilation_branch_continuity_at_origin() {
        let z = Complex64::new(0.7, 0.6);
        let target = vacuum_c(0.0) / (z + I);
        for s in [1e-3, -1e-3] {
            let v = resolve_xp_plus_px(z, &phi, s, &cfg()).unwrap();
            assert!(close(v, target, 1e-3));
        }
    }

    #[test]
    fn harmonic_element() {
        let v = resolve_harmonic_elem(I).unwrap();
        assert!(close(v, Complex64::new(-0.5, -1.0) / 1.25, 1e-10));
        let v = resolve_harmonic_elem(1.5 * I).unwrap();
        assert!(close(v, 1.0 / (1.5 * I - 0.5), 1e-10));
        let y = 1e6;
        assert!(close(resolve_harmonic_elem(y * I).unwrap() * (y * I), Complex64::new(1.0, 0.0), 1e-5));
        for k in [0.5, 1.5, 4.5] {
            assert!(matches!(
                resolve_harmonic_elem(Complex64::new(k, 0.0)),
                Err(Error::AtEigenvalue { .. })
            ));
        }
        assert!(resolve_harmonic_elem(Complex64::new(1.0, 0.0)).is_ok());
    }

    #[test]
    fn harmonic_pointwise_expansion() {
        let z = Complex64::new(0.3, 0.8);
        for s in [0.0, 0.9, -2.0] {
            let v = kernel_for(Observable::Harmonic).resolve(z, &phi, s, &cfg()).unwrap();
            assert!(close(v, phi(s) / (z - 0.5), 1e-9));
        }
    }

    #[test]
    fn position_element_golden_and_oracle() {
        let m = matrix_element(Observable::X, I, &cfg()).unwrap();
        assert!(close(m.value, Complex64::new(0.0, -0.757_872_156_141_312_106), 1e-10));
        let z = Complex64::new(0.4, 0.2);
        let m = matrix_element(Observable::X, z, &cfg()).unwrap();
        let oracle = integrate_line(
            |s| Complex64::new((-s * s).exp() / PI.sqrt(), 0.0) / (z - s),
            -12.0,
            12.0,
            &cfg().with_tolerances(1e-13, 1e-13),
        )
        .unwrap();
        assert!(close(m.value, oracle.value, 1e-9));
        assert!(m.error_estimate >= 0.0);
    }

    fn nested_element(observable: Observable, z: Complex64) -> Complex64 {
        let c = cfg();
        let inner = c.nested();
        let k = kernel_for(observable);
        let f = |s: f64| phi(s) * k.resolve(z, &phi, s, &inner).unwrap();
        integrate_line(f, -12.0, 12.0, &c.with_tolerances(1e-9, 1e-9))
            .or_else(Error::best_estimate)
            .unwrap()
            .value
    }

    #[test]
    fn momentum_element_matches_position() {
        for z in [I, Complex64::new(1.3, 0.01), Complex64::new(-0.7, -0.3), Complex64::new(10.0, 1e-3)] {
            let p = matrix_element(Observable::P, z, &cfg()).unwrap();
            let x = matrix_element(Observable::X, z, &cfg()).unwrap();
            assert!(close(p.value, x.value, 1e-9), "z = {z}: {} vs {}", p.value, x.value);
        }
        let p = matrix_element(Observable::P, I, &cfg()).unwrap();
        assert!(close(p.value, Complex64::new(0.0, -0.757_872_156_141_312_106), 1e-10));
    }

    #[test]
    fn momentum_element_matches_reduced_gaussian_form() {
        // inner products of shifted vacua: int Phi(s) Phi(s - v) ds = e^{-v^2/4}
        let z = Complex64::new(0.8, 0.5);
        let f = |v: f64| (I * z * v).exp() * (-v * v / 4.0).exp();
        let reduced = -I * integrate_line(f, 0.0, 30.0, &cfg()).unwrap().value;
        let m = matrix_element(Observable::P, z, &cfg()).unwrap();
        assert!(close(m.value, reduced, 1e-9));
    }

    #[test]
    fn sweep_matches_nested_quadrature() {
        for o in [Observable::P, Observable::XplusP] {
            for z in [Complex64::new(0.5, 1.0), Complex64::new(-1.0, -0.25)] {
                let fast = matrix_element(o, z, &cfg()).unwrap().value;
                let slow = nested_element(o, z);
                assert!(close(fast, slow, 1e-7), "{o} z = {z}: {fast} vs {slow}");
            }
        }
    }

    #[test]
    fn sum_element_golden_and_gaussian_law() {
        let m = matrix_element(Observable::XplusP, I, &cfg()).unwrap();
        assert!(close(m.value, Complex64::new(0.0, -0.655_679_542_418_798_472), 1e-10));
        for z in [Complex64::new(2.0, 0.05), Complex64::new(-6.0, -0.5)] {
            let m = matrix_element(Observable::XplusP, z, &cfg()).unwrap();
            let law = |s: f64| Complex64::new(INV_SQRT_2PI * (-0.5 * s * s).exp(), 0.0) / (z - s);
            let oracle = integrate_with_breaks(law, -14.0, 14.0, &[z.re], &cfg()).unwrap();
            assert!(close(m.value, oracle.value, 1e-9), "z = {z}");
        }
    }

    /// Lower branch in polar form:
    /// `(i / sqrt 2) int_1^inf u^{(z-i)/2i} / sqrt(1 + u^2) du`.
    fn dilation_polar(z: Complex64) -> Complex64 {
        let a = (z - I) / (2.0 * I);
        let f = |v: f64| {
            let u = v.exp();
            (a * v).exp() * u / (1.0 + u * u).sqrt()
        };
        let r = integrate_line(f, 0.0, 200.0, &cfg().with_tolerances(1e-14, 1e-13)).unwrap();
        I / SQRT_2 * r.value
    }

    #[test]
    fn dilation_element_goldens_and_polar_oracle() {
        let m = matrix_element(Observable::XPplusPX, Complex64::new(1.0, -0.5), &cfg()).unwrap();
        let golden = Complex64::new(0.416_714_307_834_451_794, 0.563_761_576_805_391_183);
        assert!(close(m.value, golden, 1e-9), "{}", m.value);
        let m = matrix_element(Observable::XPplusPX, Complex64::new(-2.0, -0.25), &cfg()).unwrap();
        let golden = Complex64::new(-0.472_223_951_313_733_969, 0.235_237_495_580_525_968);
        assert!(close(m.value, golden, 1e-9), "{}", m.value);
        for z in [Complex64::new(0.3, -0.01), Complex64::new(5.0, -0.6)] {
            let m = matrix_element(Observable::XPplusPX, z, &cfg()).unwrap();
            assert!(close(m.value, dilation_polar(z), 1e-9), "z = {z}");
            let up = matrix_element(Observable::XPplusPX, z.conj(), &cfg()).unwrap();
            assert!(close(up.value, dilation_polar(z).conj(), 1e-9), "z = {z}");
        }
        assert!(matches!(
            matrix_element(Observable::XPplusPX, Complex64::new(0.0, -1.5), &cfg()),
            Err(Error::OutsideStrip { .. })
        ));
    }

    #[test]
    fn dilation_element_matches_pointwise_kernel() {
        for z in [Complex64::new(0.5, 0.7), Complex64::new(-1.0, -0.4)] {
            let fast = matrix_element(Observable::XPplusPX, z, &cfg()).unwrap().value;
            let g: Input<'_> = &phi;
            let prepared = DilationResolvent::new(z, g, &cfg().nested()).unwrap();
            let f = |s: f64| phi(s) * prepared.at(s).unwrap();
            // the lower branch has an integrable |s|^{-a} singularity at 0
            let slow = integrate_with_breaks(f, -12.0, 12.0, &[0.0], &cfg().with_tolerances(1e-9, 1e-9))
                .or_else(Error::best_estimate)
                .unwrap()
                .value;
            assert!(close(fast, slow, 1e-6), "z = {z}: {fast} vs {slow}");
        }
    }

    #[test]
    fn dilation_density_on_real_axis() {
        // Im M(x - i0) / pi is the vacuum law of XP+PX
        for (x, rho) in [(0.0, 0.417_313_420_837_036_590), (1.0, 0.193_783_492_497_018_590)] {
            let m = matrix_element(Observable::XPplusPX, Complex64::new(x, 0.0), &cfg()).unwrap();
            assert!((m.value.im / PI - rho).abs() < 1e-9, "x = {x}");
        }
    }

    #[test]
    fn conjugate_symmetry() {
        for o in Observable::ALL {
            for z in [Complex64::new(0.7, 0.4), Complex64::new(-2.0, 0.9), Complex64::new(3.0, 0.05)] {
                let a = matrix_element(o, z, &cfg()).unwrap().value;
                let b = matrix_element(o, z.conj(), &cfg()).unwrap().value;
                assert!(close(b, a.conj(), 1e-8), "{o} z = {z}");
            }
        }
    }

    #[test]
    fn herglotz_sign_for_position() {
        for x in [-3.0, -0.5, 0.0, 1.2, 6.0] {
            for eps in [1.0, 0.1, 1e-3] {
                let up = matrix_element(Observable::X, Complex64::new(x, eps), &cfg()).unwrap();
                let down = matrix_element(Observable::X, Complex64::new(x, -eps), &cfg()).unwrap();
                assert!(up.value.im < 0.0 && down.value.im > 0.0, "x = {x}, eps = {eps}");
            }
        }
    }

    #[test]
    fn decay_along_imaginary_axis() {
        for o in Observable::ALL {
            let mags: Vec<f64> = [4.0, 8.0, 16.0]
                .iter()
                .map(|&y| matrix_element(o, Complex64::new(0.0, y), &cfg()).unwrap().value.norm())
                .collect();
            assert!(mags[0] > mags[1] && mags[1] > mags[2], "{o}: {mags:?}");
            for (m, y) in mags.iter().zip([4.0, 8.0, 16.0]) {
                assert!(m * y <= 1.0 + 1e-9, "{o}: |y M(iy)| = {}", m * y);
            }
        }
    }

    fn identity_error(o: Observable, z: Complex64) -> f64 {
        let c = cfg();
        let k = kernel_for(o);
        let f = SampledFunction::symmetric(6.0, 1.0 / 64.0, |s| k.resolve(z, &phi, s, &c).unwrap())
            .unwrap();
        let tf = apply(o, &f).unwrap();
        let rhs = f
            .map(|s, v| z * v - Complex64::new(vacuum(s), 0.0));
        tf.max_interior_diff(&rhs, 0).unwrap()
    }

    #[test]
    fn resolvent_identity_on_grid() {
        for o in [Observable::X, Observable::P, Observable::XplusP] {
            for z in [2.0 * I, -2.0 * I, Complex64::new(1.0, 1.0), Complex64::new(1.0, -1.0)] {
                let e = identity_error(o, z);
                assert!(e < 1e-4, "{o} z = {z}: {e}");
            }
        }
    }

    #[test]
    fn query_validity() {
        use Validity::*;
        assert_eq!(ResolventQuery::new(Observable::P, I).unwrap().validity, UpperHalf);
        assert_eq!(ResolventQuery::new(Observable::X, -I).unwrap().validity, LowerHalf);
        assert!(ResolventQuery::new(Observable::XplusP, Complex64::new(1.0, 0.0)).is_err());
        assert_eq!(
            ResolventQuery::new(Observable::XPplusPX, Complex64::new(1.0, -0.5)).unwrap().validity,
            ImAboveMinusOne
        );
        assert_eq!(
            ResolventQuery::new(Observable::Harmonic, Complex64::new(1.0, 0.0)).unwrap().validity,
            SpectralExpansion
        );
    }
}
