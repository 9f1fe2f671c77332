//! Closed-form coefficients of the standard FB density.
//!
//! For even `m` (odd `m` vanish identically),
//!
//! ```text
//! f_ℓ^m = π √((2ℓ+1)/π) (−1)^{m/2} / C̃ · Σ_{u'} Δ^ℓ_{u',0} Δ^ℓ_{u',m} E_m(u')
//! E_m(u') = Σ_{|u| ≤ N} a(u) B_m(u+u')
//! a(u)    = Σ_{n ≤ N} (2n+1) J_n (Δ^n_{u,0})²,   J_n = e^{−κ} √(π/2κ) I_{n+½}(κ)
//! B_m(q)  = Σ_{t ≤ T} (β/2)^{2t+m/2} / (t! (t+m/2)!) · G(4t+m+1, q)
//! ```
//!
//! `a(u)` is the Fourier coefficient of `e^{κ(cos θ − 1)}` and `B_m` folds the
//! azimuthal Bessel series into the sine-power integrals. The sums cancel
//! heavily once `β` is large (`B_m` is built from terms of size `~e^β`), so
//! everything up to `E_m` runs in extended precision sized from `β`. Only the
//! real part survives: the odd-`q` contributions of `G` cancel in pairs
//! `u' ↔ −u'`.
//!
//! Cost: `O(L (N+L) T)` for `B`, `O(L² N)` for `E`, `O(L³)` for the final
//! contraction.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::params::{check_shape, Fb5Params};
use super::{frame_to_rotation, normalization_scaled, TruncationPolicy};
use crate::error::{Error, Result};
use crate::mp::Mp;
use crate::sht::{euler_from_rotation, rotate_coeffs, CoeffTable, WignerPi2Table};
use crate::specfun::bessel_ratio_start;

/// Working precision in bits for ovalness `β`.
pub(crate) fn working_precision(beta: f64) -> usize {
    let bits = 128 + (beta.max(0.0) * std::f64::consts::LOG2_E).ceil() as usize;
    bits.div_ceil(64) * 64
}

/// Coefficients `f_ℓ^m`, `ℓ ≤ L`, of the standard FB density (mean ẑ, major axis x̂).
pub fn standard_fb_coeffs(
    kappa: f64,
    beta: f64,
    l: usize,
    table: &WignerPi2Table,
    policy: TruncationPolicy,
) -> Result<CoeffTable> {
    standard_fb_coeffs_with_precision(kappa, beta, l, table, policy, working_precision(beta))
}

pub(crate) fn standard_fb_coeffs_with_precision(
    kappa: f64,
    beta: f64,
    l: usize,
    table: &WignerPi2Table,
    policy: TruncationPolicy,
    prec: usize,
) -> Result<CoeffTable> {
    check_shape(kappa, beta)?;
    if table.l_max() < l {
        return Err(Error::BandLimit(format!("Wigner table L={} is below band-limit {l}", table.l_max())));
    }
    if kappa == 0.0 {
        // uniform density: only the constant term survives
        let mut out = CoeffTable::zeros(l);
        out.set(0, 0, Complex64::new(0.5 / PI.sqrt(), 0.0));
        return Ok(out);
    }
    let c_scaled = normalization_scaled(kappa, beta)?;
    let n = policy.n;
    let a = fourier_a(n, kappa, prec);
    let q_max = n + l;
    let g = SinePowerTable::new(4 * policy.t + l + 1, q_max, prec);
    let half_beta = Mp::from_f64(beta / 2.0, prec);
    let half_beta_sq = &half_beta * &half_beta;

    let mut out = CoeffTable::zeros(l);
    // c_{0,m} = (β/2)^{m/2} / (m/2)!
    let mut c0 = Mp::one(prec);
    for m in (0..=l).step_by(2) {
        let h = (m / 2) as i64;
        if m > 0 {
            c0 = (&c0 * &half_beta).div_i(h);
        }
        // B_m(q) for even q in [0, q_max]
        let mut b = vec![Mp::zero(prec); q_max / 2 + 1];
        let mut c = c0.clone();
        for t in 0..=policy.t {
            if t > 0 {
                let tt = t as i64;
                c = (&c * &half_beta_sq).div_i(tt * (tt + h));
            }
            if c.is_zero() {
                break;
            }
            let p = 4 * t + m + 1;
            for (qi, bq) in b.iter_mut().enumerate() {
                *bq = &*bq + &(&c * g.get(p, 2 * qi));
            }
        }
        // E_m(u') for 0 ≤ u' ≤ L
        let e: Vec<Mp> = (0..=l as i64)
            .map(|up| {
                let mut s = Mp::zero(prec);
                let mut u = -(n as i64) + (up - n as i64).rem_euclid(2);
                while u <= n as i64 {
                    let q = (u + up).unsigned_abs() as usize;
                    s = s + &a[u.unsigned_abs() as usize] * &b[q / 2];
                    u += 2;
                }
                s
            })
            .collect();

        let sign = if h % 2 == 0 { 1.0 } else { -1.0 };
        for ell in m..=l {
            // D(u') = Δ_{u',0} Δ_{u',m} is even in u'; fold onto u' ≥ 0
            let mut s = Mp::zero(prec);
            for up in (ell % 2..=ell).step_by(2) {
                let d = table.get(ell, up as i64, 0) * table.get(ell, up as i64, m as i64);
                let w = if up == 0 { d } else { 2.0 * d };
                s = s + &(&Mp::from_f64(w, prec) * &e[up]);
            }
            let v = sign * PI * ((2 * ell + 1) as f64 / PI).sqrt() * s.to_f64() / c_scaled;
            out.set(ell, m as i64, Complex64::new(v, 0.0));
            out.set(ell, -(m as i64), Complex64::new(v, 0.0));
        }
    }
    Ok(out)
}

/// `a(u) = e^{−κ} I_u(κ)` assembled as `Σ_{n ≤ N} (2n+1) J_n (Δ^n_{u,0})²`, `u = 0..=N`.
pub(crate) fn fourier_a(n: usize, kappa: f64, prec: usize) -> Vec<Mp> {
    let j = scaled_modified_spherical(n, kappa, prec);
    let mut a = vec![Mp::zero(prec); n + 1];
    // s_diag = (Δ^k_{k,0})²
    let mut s_diag = Mp::one(prec);
    for (k, jk) in j.iter().enumerate().take(n + 1) {
        let kk = k as i64;
        if k > 0 {
            s_diag = s_diag.mul_i(2 * kk - 1).div_i(2 * kk);
        }
        let weight = jk.mul_i(2 * kk + 1);
        let mut s = s_diag.clone();
        let mut u = kk;
        loop {
            a[u as usize] = &a[u as usize] + &(&weight * &s);
            if u < 2 {
                break;
            }
            // (Δ_{u−2,0})² from (Δ_{u,0})²
            let v = u - 2;
            s = s.mul_i((kk - v - 1) * (kk + v + 2)).div_i((kk - v) * (kk + v + 1));
            u = v;
        }
    }
    a
}

/// `J_n = e^{−κ} √(π/(2κ)) I_{n+½}(κ)` for `n = 0..=N` (with `J_0(0) = 1`).
pub(crate) fn scaled_modified_spherical(n: usize, kappa: f64, prec: usize) -> Vec<Mp> {
    let mut j = vec![Mp::zero(prec); n + 1];
    if kappa == 0.0 {
        j[0] = Mp::one(prec);
        return j;
    }
    let k = Mp::from_f64(kappa, prec);
    // J_0 = (1 − e^{−2κ}) / (2κ)
    let e = (-(&k + &k)).exp();
    j[0] = (Mp::one(prec) - e) / (&k + &k);
    let start = bessel_ratio_start(n, kappa) + prec / 2;
    let mut r = Mp::zero(prec);
    let mut ratios = vec![Mp::zero(prec); n + 1];
    for i in (1..=start).rev() {
        r = &k / &(Mp::from_i64(2 * i as i64 + 1, prec) + &(&k * &r));
        if i <= n {
            ratios[i] = r.clone();
        }
    }
    for i in 1..=n {
        j[i] = &j[i - 1] * &ratios[i];
    }
    j
}

/// `Re G(p, q)` for odd `p ≤ p_max` and even `0 ≤ q ≤ q_max`.
pub(crate) struct SinePowerTable {
    q_cols: usize,
    vals: Vec<Mp>,
}

impl SinePowerTable {
    pub(crate) fn new(p_max: usize, q_max: usize, prec: usize) -> Self {
        let q_cols = q_max / 2 + 1;
        let p_rows = p_max.div_ceil(2).max(1);
        let mut vals = Vec::with_capacity(p_rows * q_cols);
        // G(1, q) = 2 / (1 − q²)
        for qi in 0..q_cols {
            let q = 2 * qi as i64;
            vals.push(Mp::from_i64(2, prec).div_i(1 - q * q));
        }
        // G(p, q) = G(p−2, q) p(p−1) / (p² − q²)
        for pi in 1..p_rows {
            let p = 2 * pi as i64 + 1;
            for qi in 0..q_cols {
                let q = 2 * qi as i64;
                let prev = &vals[(pi - 1) * q_cols + qi];
                let v = prev.mul_i(p * (p - 1)).div_i(p * p - q * q);
                vals.push(v);
            }
        }
        SinePowerTable { q_cols, vals }
    }

    #[inline]
    pub(crate) fn get(&self, p: usize, q: usize) -> &Mp {
        &self.vals[(p / 2) * self.q_cols + q / 2]
    }
}

/// Coefficients of an arbitrary FB5 density: the standard table rotated by the
/// Euler angles of the frame.
pub fn fb5_coeffs(
    params: &Fb5Params,
    l: usize,
    table: &WignerPi2Table,
    policy: TruncationPolicy,
) -> Result<CoeffTable> {
    let standard = standard_fb_coeffs(params.kappa(), params.beta(), l, table, policy)?;
    let angles = euler_from_rotation(&frame_to_rotation(params)?)?;
    rotate_coeffs(&standard, &angles, table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::gauss_legendre;
    use crate::specfun::{g_integral, scaled_bessel_i_half};

    #[test]
    fn uniform_density() {
        let t = WignerPi2Table::new(8);
        let c = standard_fb_coeffs(0.0, 0.0, 8, &t, TruncationPolicy::for_params(0.0, 0.0)).unwrap();
        assert!((c.get(0, 0).re - 0.5 / PI.sqrt()).abs() < 1e-16);
        for (ell, _, v) in c.iter() {
            if ell > 0 {
                assert_eq!(v.norm(), 0.0);
            }
        }
        // the general path approaches the same table as κ → 0
        let near = standard_fb_coeffs(1e-9, 0.0, 8, &t, TruncationPolicy::for_params(1e-9, 0.0)).unwrap();
        assert!(near.max_abs_diff(&c) < 1e-9);
    }

    #[test]
    fn precision_formula() {
        assert_eq!(working_precision(0.0), 128);
        assert_eq!(working_precision(49.0), 256);
        assert_eq!(working_precision(10.0), 192);
    }

    #[test]
    fn sine_power_table_matches_closed_form() {
        let g = SinePowerTable::new(61, 80, 192);
        for p in (1..=61).step_by(2) {
            for q in (0..=80).step_by(2) {
                let want = g_integral(p as i64, q as i64).unwrap().re;
                let got = g.get(p, q).to_f64();
                assert!((got - want).abs() <= 1e-12 * want.abs(), "p={p} q={q}: {got} vs {want}");
            }
        }
        for q in (0..=80).step_by(2) {
            let exact = 2.0 / (1.0 - (q * q) as f64);
            assert!((g.get(1, q).to_f64() - exact).abs() <= 4e-16 * exact.abs());
        }
    }

    #[test]
    fn scaled_modified_spherical_matches_f64_sequence() {
        for &k in &[0.5, 25.0, 100.0, 200.0] {
            let mp = scaled_modified_spherical(150, k, 192);
            let f = scaled_bessel_i_half(150, k).unwrap();
            let s = (PI / (2.0 * k)).sqrt();
            for (n, v) in mp.iter().enumerate().take(151) {
                let want = f.get(n) * s;
                if want > 1e-290 {
                    assert!((v.to_f64() - want).abs() <= 2e-13 * want, "κ={k} n={n}");
                }
            }
        }
    }

    /// `e^{−κ} I_u(κ) = (1/π) ∫₀^π e^{κ(cos t − 1)} cos(u t) dt`.
    fn integer_bessel_scaled(u: usize, kappa: f64) -> f64 {
        let (x, w) = gauss_legendre(200);
        let pieces = 16;
        let h = PI / pieces as f64;
        let mut s = 0.0;
        for k in 0..pieces {
            for (xi, wi) in x.iter().zip(&w) {
                let t = k as f64 * h + 0.5 * h * (xi + 1.0);
                s += wi * 0.5 * h * (kappa * (t.cos() - 1.0)).exp() * (u as f64 * t).cos();
            }
        }
        s / PI
    }

    #[test]
    fn fourier_a_is_integer_order_bessel() {
        for &k in &[1.0, 25.0, 100.0] {
            let n = super::super::truncation_n(k);
            let a = fourier_a(n, k, 256);
            for u in [0usize, 1, 2, 7, 30, 60].into_iter().filter(|&u| u < a.len()) {
                let want = integer_bessel_scaled(u, k);
                let got = a[u].to_f64();
                assert!((got - want).abs() <= 1e-13 * want.abs() + 1e-15, "κ={k} u={u}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn extra_precision_changes_nothing() {
        let t = WignerPi2Table::new(40);
        for &(k, b) in &[(25.0, 10.0), (100.0, 49.0)] {
            let pol = TruncationPolicy::for_params(k, b);
            let base = standard_fb_coeffs(k, b, 40, &t, pol).unwrap();
            let more = standard_fb_coeffs_with_precision(k, b, 40, &t, pol, working_precision(b) + 128).unwrap();
            assert!(base.max_abs_diff(&more) <= 1e-15, "κ={k} β={b}: {}", base.max_abs_diff(&more));
        }
    }

    #[test]
    fn structure_of_standard_table() {
        let t = WignerPi2Table::new(30);
        let c = standard_fb_coeffs(25.0, 10.0, 30, &t, TruncationPolicy::for_params(25.0, 10.0)).unwrap();
        for (_, m, v) in c.iter() {
            assert_eq!(v.im, 0.0);
            if m % 2 != 0 {
                assert_eq!(v, Complex64::new(0.0, 0.0));
            }
        }
        assert!(c.conjugate_symmetry_error() == 0.0);
        assert!(standard_fb_coeffs(25.0, 10.0, 31, &t, TruncationPolicy::for_params(25.0, 10.0)).is_err());
    }
}
