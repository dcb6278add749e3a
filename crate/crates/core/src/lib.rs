//! Vacuum characteristic functions of the observables `X`, `P`, `X+P`,
//! `XP+PX` and `(X^2+P^2)/2` on `L^2(R)`.
//!
//! Every observable exposes an explicit resolvent kernel
//! ([`resolvent::ResolventKernel`]). The vacuum matrix element
//! `<Phi, R(z;T) Phi>` built from those kernels is fed into a boundary-jump
//! contour engine ([`charfn::BoundaryJumpEngine`]) that recovers
//! `<Phi, exp(itT) Phi>`. Closed forms and a spectral expansion are registered
//! next to it as interchangeable engines ([`charfn::EngineRegistry`]).

pub mod charfn;
pub mod distributions;
mod error;
pub mod numerics;
pub mod operators;
pub mod resolvent;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use operators::Observable;

/// The universal scalar.
pub type ComplexValue = Complex64;

/// Imaginary unit.
pub const I: Complex64 = Complex64::new(0.0, 1.0);
