//! Scalar special functions: log-gamma, exponentially scaled half-integer
//! modified Bessel functions, spherical Bessel functions and the sine-power
//! integral `G(p, q) = ∫₀^π sin^p θ e^{iqθ} dθ`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(libm::lgamma(x))
}

/// `e^{-κ} I_{n+1/2}(κ)` for `n = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledBesselSeq {
    kappa: f64,
    values: Vec<f64>,
}

impl ScaledBesselSeq {
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, n: usize) -> f64 {
        self.values[n]
    }

    pub fn max_index(&self) -> usize {
        self.values.len() - 1
    }
}

/// Start index for the downward ratio recurrence of `I_{n+1/2}(κ)`.
pub(crate) fn bessel_ratio_start(n_max: usize, kappa: f64) -> usize {
    n_max + 40 + 2 * kappa.ceil() as usize
}

/// Scaled half-integer modified Bessel functions `e^{-κ} I_{n+1/2}(κ)`, `n = 0..=N`.
///
/// The ratios `I_{n+1/2}/I_{n-1/2}` come from the continued fraction
/// `r_n = κ / ((2n+1) + κ r_{n+1})` run downward from far above `N`; the
/// sequence is anchored at the closed form for `n = 0`.
pub fn scaled_bessel_i_half(n_max: usize, kappa: f64) -> Result<ScaledBesselSeq> {
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(Error::Domain(format!("kappa must be finite and >= 0, got {kappa}")));
    }
    let mut values = vec![0.0; n_max + 1];
    if kappa == 0.0 {
        return Ok(ScaledBesselSeq { kappa, values });
    }
    let ratios = bessel_ratios(n_max, kappa);
    // e^{-κ} sinh κ = -expm1(-2κ)/2
    values[0] = (2.0 / (PI * kappa)).sqrt() * (-(-2.0 * kappa).exp_m1() / 2.0);
    for n in 1..=n_max {
        values[n] = values[n - 1] * ratios[n];
    }
    Ok(ScaledBesselSeq { kappa, values })
}

/// `ratios[n] = I_{n+1/2}(κ) / I_{n-1/2}(κ)` for `1 ≤ n ≤ n_max` (entry 0 unused).
fn bessel_ratios(n_max: usize, kappa: f64) -> Vec<f64> {
    let start = bessel_ratio_start(n_max, kappa);
    let mut r = 0.0;
    let mut ratios = vec![0.0; n_max + 1];
    for n in (1..=start).rev() {
        r = kappa / ((2 * n + 1) as f64 + kappa * r);
        if n <= n_max {
            ratios[n] = r;
        }
    }
    ratios
}

/// Spherical Bessel function of the first kind `j_ℓ(x)`.
pub fn spherical_bessel_j(ell: usize, x: f64) -> Result<f64> {
    Ok(spherical_bessel_j_seq(ell, x)?[ell])
}

/// `j_0(x), …, j_L(x)`.
///
/// Upward recurrence is used only while it is stable (`n ≤ x`); above that the
/// ratios `j_n / j_{n-1}` come from a downward continued fraction.
pub fn spherical_bessel_j_seq(l_max: usize, x: f64) -> Result<Vec<f64>> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("spherical_bessel_j requires finite x >= 0, got {x}")));
    }
    let mut out = vec![0.0; l_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return Ok(out);
    }
    out[0] = j0(x);
    if l_max == 0 {
        return Ok(out);
    }
    out[1] = j1(x);
    let n0 = l_max.min(x.floor() as usize).max(1);
    for n in 1..n0 {
        out[n + 1] = (2 * n + 1) as f64 / x * out[n] - out[n - 1];
    }
    if n0 < l_max {
        let top = (l_max as f64).max(x);
        let start = top.ceil() as usize + 60 + (5.0 * top.sqrt()).ceil() as usize;
        let mut rho = 0.0;
        let mut ratios = vec![0.0; l_max + 1];
        for n in (n0 + 1..=start).rev() {
            rho = x / ((2 * n + 1) as f64 - x * rho);
            if n <= l_max {
                ratios[n] = rho;
            }
        }
        for n in n0 + 1..=l_max {
            out[n] = out[n - 1] * ratios[n];
        }
    }
    Ok(out)
}

fn j0(x: f64) -> f64 {
    if x < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

fn j1(x: f64) -> f64 {
    if x < 0.1 {
        // x/3 Σ_k (-x²/2)^k / (k! (5)(7)…(2k+3))
        let mut term = x / 3.0;
        let mut sum = term;
        for k in 1..12 {
            term *= -x * x / (2.0 * k as f64 * (2 * k + 3) as f64);
            sum += term;
        }
        sum
    } else {
        (x.sin() / x - x.cos()) / x
    }
}

/// `G(p, q) = ∫₀^π sin^p θ e^{iqθ} dθ` in closed form.
///
/// A Gamma function at a non-positive integer contributes a zero reciprocal, so
/// parity-forbidden pairs return exactly zero.
pub fn g_integral(p: i64, q: i64) -> Result<Complex64> {
    if p < 0 {
        return Err(Error::Domain(format!("g_integral requires p >= 0, got {p}")));
    }
    // arguments (p+q+2)/2 and (p-q+2)/2, kept doubled to stay integral
    let a1 = p + q + 2;
    let a2 = p - q + 2;
    if is_gamma_pole(a1) || is_gamma_pole(a2) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (l1, s1) = libm::lgamma_r(a1 as f64 / 2.0);
    let (l2, s2) = libm::lgamma_r(a2 as f64 / 2.0);
    let pf = p as f64;
    let log_mag = libm::lgamma(pf + 2.0) - pf * std::f64::consts::LN_2 - (pf + 1.0).ln() - (l1 + l2);
    let mag = PI * (s1 * s2) as f64 * log_mag.exp();
    Ok(i_pow(q) * mag)
}

fn is_gamma_pole(doubled: i64) -> bool {
    doubled <= 0 && doubled % 2 == 0
}

/// `i^k` for any integer `k`, exact.
pub fn i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}
