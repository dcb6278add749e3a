use std::f64::consts::PI;

use super::quadrature::{integrate_line, QuadratureConfig};
use crate::{Complex64, Error, Result};

/// Maximum number of `1F1` series terms.
pub const KUMMER_TERM_CAP: usize = 500;

/// Rising factorial `(a)_n = a (a+1) ... (a+n-1)`, `(a)_0 = 1`.
pub fn pochhammer(a: Complex64, n: usize) -> Complex64 {
    (0..n).fold(Complex64::new(1.0, 0.0), |acc, k| acc * (a + k as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: Complex64,
    pub terms: usize,
}

fn nonpositive_integer(c: Complex64) -> Option<usize> {
    if c.im == 0.0 && c.re <= 0.0 && c.re.fract() == 0.0 {
        Some((-c.re) as usize)
    } else {
        None
    }
}

/// Kummer's confluent hypergeometric series `1F1(y; c; x)`.
pub fn kummer_1f1(y: Complex64, c: Complex64, x: f64) -> Result<Complex64> {
    kummer_1f1_series(y, c, x).map(|s| s.value)
}

/// `1F1` together with the number of terms summed.
///
/// A non-positive integer `y = -n` gives a polynomial of exactly `n + 1`
/// terms. Otherwise terms are added until two consecutive ones fall below
/// machine precision relative to the running sum while the term ratio is
/// already contracting.
pub fn kummer_1f1_series(y: Complex64, c: Complex64, x: f64) -> Result<SeriesSum> {
    if nonpositive_integer(c).is_some() {
        return Err(Error::PoleAtC { c });
    }
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    if let Some(n) = nonpositive_integer(y) {
        for k in 0..n {
            term *= (y + k as f64) / (c + k as f64) * (x / (k + 1) as f64);
            sum += term;
        }
        return Ok(SeriesSum {
            value: sum,
            terms: n + 1,
        });
    }
    let tol = f64::EPSILON;
    let mut small = 0;
    for k in 0..KUMMER_TERM_CAP - 1 {
        let ratio = (y + k as f64) / (c + k as f64) * (x / (k + 1) as f64);
        term *= ratio;
        sum += term;
        if term.norm() <= tol * sum.norm() && ratio.norm() < 1.0 {
            small += 1;
            if small == 2 {
                return Ok(SeriesSum {
                    value: sum,
                    terms: k + 2,
                });
            }
        } else {
            small = 0;
        }
    }
    Err(Error::SeriesNonConvergence {
        terms: KUMMER_TERM_CAP,
    })
}

/// Upper incomplete Gamma function `Gamma(a, b) = int_b^inf t^{a-1} e^{-t} dt`.
///
/// Evaluated through `t = b e^v`, which turns the integrand into
/// `b^a e^{a v} exp(-b e^v)` on `[0, inf)`.
pub fn incomplete_gamma_upper(a: f64, b: f64) -> Result<f64> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "incomplete Gamma needs b > 0, got {b}"
        )));
    }
    let cutoff = b.max(1.0) + 80.0 + 10.0 * a.abs();
    let v_max = (cutoff / b).ln();
    let ln_b = b.ln();
    let f = |v: f64| Complex64::new((a * (ln_b + v) - b * v.exp()).exp(), 0.0);
    let cfg = QuadratureConfig::default().with_tolerances(1e-300, 1e-14);
    let r = integrate_line(f, 0.0, v_max, &cfg).or_else(Error::best_estimate)?;
    Ok(r.value.re)
}

/// `int_R exp(i alpha t - eps t^2) dt = sqrt(pi/eps) exp(-alpha^2 / (4 eps))`
/// for `Re eps > 0`, principal square root.
pub fn gaussian_integral(alpha: f64, eps: Complex64) -> Result<Complex64> {
    if !(eps.re > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Gaussian integral needs Re(eps) > 0, got {eps}"
        )));
    }
    Ok((Complex64::new(PI, 0.0) / eps).sqrt() * (-(alpha * alpha) / (4.0 * eps)).exp())
}
