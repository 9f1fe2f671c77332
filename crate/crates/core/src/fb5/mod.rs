//! Fisher-Bingham (FB5 / Kent) distributions and their spherical-harmonic
//! coefficients.
//!
//! All quantities that grow like `e^κ` (Bessel values, the normalising
//! constant) are carried with that factor removed; it cancels in every
//! density and coefficient.

mod engine;
mod mixture;
mod params;

pub use engine::{fb5_coeffs, standard_fb_coeffs};
pub use mixture::{mixture_coeffs, MixtureModel};
pub use params::{fb5_pdf, fb5_pdf_direct, frame_to_rotation, standard_fb_pdf, Fb5Density, Fb5Params};
pub(crate) use params::check_shape;

/// Frame-to-Euler extraction lives with the rotation types.
pub use crate::sht::euler_from_rotation;

use crate::error::{Error, Result};
use crate::specfun::scaled_bessel_i_half;

/// Truncation of the `n` (Bessel) and `t` (ovalness) series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncationPolicy {
    pub n: usize,
    pub t: usize,
}

impl TruncationPolicy {
    pub fn new(n: usize, t: usize) -> Result<Self> {
        if n < 24 || t < 12 {
            return Err(Error::Constraint(format!("truncation needs N >= 24 and T >= 12, got N={n}, T={t}")));
        }
        Ok(TruncationPolicy { n, t })
    }

    /// The default rule for a given `(κ, β)`.
    pub fn for_params(kappa: f64, beta: f64) -> Self {
        TruncationPolicy { n: truncation_n(kappa), t: truncation_t(beta) }
    }

    pub fn extended(&self, dn: usize, dt: usize) -> Self {
        TruncationPolicy { n: self.n + dn, t: self.t + dt }
    }
}

/// `N = ⌈3κ/2 + 24⌉`.
pub fn truncation_n(kappa: f64) -> usize {
    (1.5 * kappa.max(0.0) + 24.0).ceil() as usize
}

/// `T = ⌈36β/25 + 12⌉`.
pub fn truncation_t(beta: f64) -> usize {
    (36.0 * beta.max(0.0) / 25.0 + 12.0).ceil() as usize
}

/// Last retained term of the `t` series, `S(β,T) = β^{2T} / (T!² 2^{2T})`.
pub fn truncation_t_term(beta: f64, t: usize) -> f64 {
    let ln = 2.0 * t as f64 * (beta / 2.0).ln() - 2.0 * libm::lgamma(t as f64 + 1.0);
    if beta == 0.0 {
        if t == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        ln.exp()
    }
}

/// Scaled normalising constant `e^{-κ} C(κ, β)`.
///
/// `C = 2π Σ_r Γ(r+½)/Γ(r+1) β^{2r} (κ/2)^{-2r-½} I_{2r+½}(κ)`, summed until a
/// term falls below `1e-18` of the running total.
pub fn normalization_scaled(kappa: f64, beta: f64) -> Result<f64> {
    check_shape(kappa, beta)?;
    if kappa == 0.0 {
        return Ok(4.0 * std::f64::consts::PI);
    }
    // j[n] = e^{-κ} √(π/(2κ)) I_{n+1/2}(κ)
    let mut len = (2.0 * kappa).ceil() as usize + 64;
    loop {
        let seq = scaled_bessel_i_half(len, kappa)?;
        let scale = (std::f64::consts::PI / (2.0 * kappa)).sqrt();
        let x2 = (2.0 * beta / kappa).powi(2);
        let mut gamma_ratio = std::f64::consts::PI.sqrt();
        let mut pow = 1.0;
        let mut sum = 0.0;
        let mut r = 0;
        while 2 * r <= len {
            let term = gamma_ratio * pow * seq.get(2 * r) * scale;
            sum += term;
            if term <= 1e-18 * sum {
                return Ok(4.0 * std::f64::consts::PI.sqrt() * sum);
            }
            gamma_ratio *= (r as f64 + 0.5) / (r as f64 + 1.0);
            pow *= x2;
            r += 1;
        }
        len *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::gauss_legendre;
    use std::f64::consts::PI;

    /// `e^{-κ} ∫ e^{κ cos θ + β sin²θ cos 2φ} ds` by Gauss-Legendre in cos θ × trapezoid in φ.
    fn normalization_by_quadrature(kappa: f64, beta: f64) -> f64 {
        let (x, w) = gauss_legendre(400);
        let nphi = 256;
        let mut s = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            // φ-integral of e^{a cos 2φ}
            let a = beta * (1.0 - xi * xi);
            let ring: f64 = (0..nphi).map(|j| (a * (2.0 * PI * j as f64 / nphi as f64 * 2.0).cos()).exp()).sum::<f64>()
                * (2.0 * PI / nphi as f64);
            s += wi * (kappa * (xi - 1.0)).exp() * ring;
        }
        s
    }

    #[test]
    fn normalization_examples() {
        assert!((normalization_scaled(0.0, 0.0).unwrap() - 4.0 * PI).abs() < 1e-14);
        let want = 2.0 * PI * (1.0 - (-20f64).exp()) / 10.0;
        assert!((normalization_scaled(10.0, 0.0).unwrap() - want).abs() < 1e-15);
        for &(k, b) in &[(25.0, 10.0), (1.0, 0.5), (100.0, 49.0), (60.0, 30.0), (200.0, 100.0)] {
            let c = normalization_scaled(k, b).unwrap();
            let q = normalization_by_quadrature(k, b);
            assert!((c - q).abs() <= 1e-10 * q, "κ={k} β={b}: {c} vs {q}");
        }
        assert!(matches!(normalization_scaled(10.0, 6.0), Err(Error::Constraint(_))));
    }

    #[test]
    fn normalization_small_kappa_limit() {
        let c = normalization_scaled(1e-9, 0.0).unwrap();
        assert!((c - 4.0 * PI).abs() < 1e-7);
    }

    #[test]
    fn truncation_rules() {
        assert_eq!(truncation_n(0.0), 24);
        assert_eq!(truncation_n(100.0), 174);
        assert_eq!(truncation_t(0.0), 12);
        assert_eq!(truncation_t(49.0), 83);
        for &b in &[5.0, 10.0, 25.0, 49.0] {
            assert!(truncation_t_term(b, truncation_t(b)) < 1e-16, "β={b}");
        }
        assert!(TruncationPolicy::new(23, 12).is_err());
        assert_eq!(TruncationPolicy::for_params(100.0, 49.0), TruncationPolicy { n: 174, t: 83 });
    }
}
