//! Closed-form spherical-harmonic expansion of Fisher-Bingham (FB5 / Kent)
//! densities and the 3D spatial fading correlation (SFC) it induces between
//! antenna elements.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: log-gamma, `e^{-κ}`-scaled half-integer Bessel `I`, spherical
//!   Bessel `j`, and the sine-power integral `G(p, q)`.
//! * [`sht`]: directions, associated Legendre functions, `Y_ℓ^m`, coefficient
//!   tables, Wigner-d(π/2) tables and Wigner-D rotation of coefficients.
//! * [`fb5`]: FB5 parameters and densities, truncation rules, the closed-form
//!   coefficient engine and mixtures.
//! * [`sfc`]: array geometries and the closed-form correlation.
//! * [`oracle`]: brute-force quadrature used as ground truth.
//! * [`validation`]: the acceptance checks, shared by the CLI and the test suite.
//!
//! ```
//! use fbsfc::fb5::{standard_fb_coeffs, TruncationPolicy};
//! use fbsfc::sht::WignerPi2Table;
//!
//! let table = WignerPi2Table::new(20);
//! let c = standard_fb_coeffs(25.0, 10.0, 20, &table, TruncationPolicy::for_params(25.0, 10.0)).unwrap();
//! assert!((c.get(0, 0).re - 0.5 / std::f64::consts::PI.sqrt()).abs() < 1e-12);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fb5;
pub mod io;
pub(crate) mod mp;
pub mod oracle;
pub mod sfc;
pub mod sht;
pub mod specfun;
pub mod validation;

pub use error::{Error, Result};

pub type Vec3 = [f64; 3];

pub(crate) fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub(crate) fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
