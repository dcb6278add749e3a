//! Quadrature and special-function kernels.
//!
//! All routines are pure functions of their arguments.

mod quadrature;
mod special;

pub use quadrature::{
    integrate_halfline, integrate_line, integrate_with_breaks, kronrod_nodes, kronrod_weights,
    Direction, IntegralResult, QuadratureConfig,
};
pub(crate) use quadrature::{gk15, integrate_lenient};
pub use special::{
    gaussian_integral, incomplete_gamma_upper, kummer_1f1, kummer_1f1_series, pochhammer,
    SeriesSum, KUMMER_TERM_CAP,
};

/// Integral of `s^q h(s)` over `(0, inf)` for `Re q > -1` and `h` smooth at
/// the origin, truncated at `cfg.radius`.
///
/// The piece on `(0, 1]` subtracts `h(0)` (integrated exactly) and maps the
/// rest through `s = e^{-v}`, which removes both the power singularity and
/// the logarithmic oscillation of `s^q` near the origin.
pub(crate) fn mellin_half<H: Fn(f64) -> crate::Complex64>(
    h: H,
    q: crate::Complex64,
    cfg: &QuadratureConfig,
) -> crate::Result<IntegralResult> {
    let h0 = h(0.0);
    let qp1 = q + 1.0;
    // (s^q (h(s) - h0)) ds with s = e^{-v}: e^{-(q+1) v} (h(e^{-v}) - h0) dv
    let near = |v: f64| (-qp1 * v).exp() * (h((-v).exp()) - h0);
    let decay = qp1.re.max(1e-3);
    let v_max = (45.0 / decay).min(700.0);
    let a = integrate_lenient(near, 0.0, v_max, cfg)?;
    let far_end = cfg.radius.max(1.0) + 1.0;
    let b = integrate_lenient(
        |s: f64| (q * s.ln()).exp() * h(s),
        1.0,
        far_end,
        cfg,
    )?;
    Ok(IntegralResult {
        value: a.value + h0 / qp1 + b.value,
        error_estimate: a.error_estimate + b.error_estimate,
        evaluations: a.evaluations + b.evaluations,
    })
}
