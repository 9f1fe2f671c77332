use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::Vec3;

/// A point on the unit sphere in co-latitude / longitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    theta: f64,
    phi: f64,
}

impl Direction {
    /// Builds a direction, folding `theta` into `[0, π]` and `phi` into `[0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Self {
        let mut t = theta.rem_euclid(TAU);
        let mut p = phi;
        if t > PI {
            t = TAU - t;
            p += PI;
        }
        Direction { theta: t, phi: wrap_angle(p) }
    }

    /// Direction of a nonzero vector.
    pub fn from_vector(v: &Vec3) -> Result<Self> {
        let rho = v[0].hypot(v[1]);
        if rho == 0.0 && v[2] == 0.0 || !(rho.is_finite() && v[2].is_finite()) {
            return Err(Error::Domain("direction of a zero or non-finite vector".into()));
        }
        Ok(Direction { theta: rho.atan2(v[2]), phi: wrap_angle(v[1].atan2(v[0])) })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn unit_vector(&self) -> Vec3 {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Folds an angle into `[0, 2π)`.
pub(crate) fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Index of `(ℓ, m)`, `0 ≤ m ≤ ℓ`, in a lower-triangular table.
#[inline]
pub(crate) fn tri(ell: usize, m: usize) -> usize {
    ell * (ell + 1) / 2 + m
}

/// Orthonormalised associated Legendre values `N_ℓ^m P_ℓ^m(x)` for
/// `0 ≤ m ≤ ℓ ≤ L`, triangular layout (see [`tri`]).
///
/// `Y_ℓ^m(θ, φ)` is this value at `x = cos θ` times `e^{imφ}`.
pub(crate) fn legendre_normalized_table(l_max: usize, x: f64) -> Vec<f64> {
    let rec = recurrence(l_max);
    let s = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    let mut out = vec![0.0; tri(l_max, l_max) + 1];
    let mut pmm = 0.5 / PI.sqrt();
    for m in 0..=l_max {
        if m > 0 {
            pmm *= -rec.diag[m] * s;
        }
        out[tri(m, m)] = pmm;
        if m == l_max {
            break;
        }
        let mut p_prev = pmm;
        let mut p = rec.a[tri(m + 1, m)] * x * pmm;
        out[tri(m + 1, m)] = p;
        for ell in m + 2..=l_max {
            let k = tri(ell, m);
            let next = rec.a[k] * (x * p - p_prev * rec.inv_prev[k]);
            out[k] = next;
            p_prev = p;
            p = next;
        }
    }
    out
}

/// Coefficients of the three-term recurrence, which depend only on `(ℓ, m)`.
struct Recurrence {
    l_max: usize,
    /// `a_ℓ^m = √((4ℓ²−1)/(ℓ²−m²))`
    a: Vec<f64>,
    /// `1 / a_{ℓ−1}^m`
    inv_prev: Vec<f64>,
    /// `√((2m+1)/(2m))`
    diag: Vec<f64>,
}

impl Recurrence {
    fn new(l_max: usize) -> Self {
        let n = tri(l_max, l_max) + 1;
        let mut a = vec![0.0; n];
        let mut inv_prev = vec![0.0; n];
        for m in 0..=l_max {
            for ell in m + 1..=l_max {
                let l2 = (ell * ell) as f64;
                a[tri(ell, m)] = ((4.0 * l2 - 1.0) / (l2 - (m * m) as f64)).sqrt();
                if ell > m + 1 {
                    inv_prev[tri(ell, m)] = 1.0 / a[tri(ell - 1, m)];
                }
            }
        }
        let diag = (0..=l_max).map(|m| if m == 0 { 1.0 } else { ((2 * m + 1) as f64 / (2 * m) as f64).sqrt() }).collect();
        Recurrence { l_max, a, inv_prev, diag }
    }
}

thread_local! {
    static RECURRENCE: std::cell::RefCell<std::rc::Rc<Recurrence>> =
        std::cell::RefCell::new(std::rc::Rc::new(Recurrence::new(64)));
}

/// Shared recurrence coefficients covering at least degree `l_max`.
fn recurrence(l_max: usize) -> std::rc::Rc<Recurrence> {
    RECURRENCE.with(|cell| {
        let mut r = cell.borrow_mut();
        if r.l_max < l_max {
            *r = std::rc::Rc::new(Recurrence::new(l_max.max(2 * r.l_max)));
        }
        r.clone()
    })
}

/// Associated Legendre function `P_ℓ^m(x)` with the Condon–Shortley phase.
///
/// Evaluated through the orthonormalised recurrence and carried in log space so
/// the factorial normalisation never overflows.
pub fn assoc_legendre(ell: usize, m: usize, x: f64) -> Result<f64> {
    if m > ell {
        return Err(Error::Domain(format!("order m={m} exceeds degree ℓ={ell}")));
    }
    if !(x.abs() <= 1.0) {
        return Err(Error::Domain(format!("assoc_legendre requires |x| <= 1, got {x}")));
    }
    let s = ((1.0 - x) * (1.0 + x)).sqrt();
    if m > 0 && s == 0.0 {
        return Ok(0.0);
    }
    // ln |N_m^m P_m^m|, sign (-1)^m
    let mut ln_pmm = -0.5 * (4.0 * PI).ln();
    for k in 1..=m {
        ln_pmm += 0.5 * ((2 * k + 1) as f64 / (2 * k) as f64).ln();
    }
    if m > 0 {
        ln_pmm += m as f64 * s.ln();
    }
    let mut sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };

    // r_ℓ = N_ℓ^m P_ℓ^m / (N_m^m P_m^m), rescaled to stay in range
    const BIG: f64 = 1e200;
    let mut ln_scale = 0.0;
    let mut r_prev = 0.0;
    let mut r = 1.0;
    let mut a_prev = f64::INFINITY;
    for l in m + 1..=ell {
        let a = if l == m + 1 {
            ((2 * m + 3) as f64).sqrt()
        } else {
            let l2 = (l * l) as f64;
            ((4.0 * l2 - 1.0) / (l2 - (m * m) as f64)).sqrt()
        };
        let next = a * (x * r - r_prev / a_prev);
        r_prev = r;
        r = next;
        a_prev = a;
        if r.abs() > BIG {
            r /= BIG;
            r_prev /= BIG;
            ln_scale += BIG.ln();
        }
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    if r < 0.0 {
        sign = -sign;
    }
    let ln_norm = 0.5
        * (((2 * ell + 1) as f64 / (4.0 * PI)).ln() + libm::lgamma((ell - m + 1) as f64)
            - libm::lgamma((ell + m + 1) as f64));
    Ok(sign * (ln_pmm + ln_scale + r.abs().ln() - ln_norm).exp())
}

/// Orthonormal spherical harmonic `Y_ℓ^m(θ, φ) = N_ℓ^m P_ℓ^m(cos θ) e^{imφ}`.
pub fn ylm(ell: usize, m: i64, dir: Direction) -> Result<Complex64> {
    let am = m.unsigned_abs() as usize;
    if am > ell {
        return Err(Error::Domain(format!("|m|={am} exceeds degree ℓ={ell}")));
    }
    let table = legendre_normalized_table(ell, dir.theta.cos());
    let p = table[tri(ell, am)];
    let y = Complex64::from_polar(1.0, am as f64 * dir.phi) * p;
    Ok(if m < 0 { negate_order(y, am) } else { y })
}

/// `Y_ℓ^{-m} = (-1)^m conj(Y_ℓ^m)`.
#[inline]
pub(crate) fn negate_order(y: Complex64, m: usize) -> Complex64 {
    if m.is_multiple_of(2) {
        y.conj()
    } else {
        -y.conj()
    }
}

/// All `Y_ℓ^m(dir)` for `ℓ ≤ L`, indexed by `ℓ(ℓ+1)+m`.
pub fn ylm_all(l_max: usize, dir: Direction) -> Vec<Complex64> {
    let table = legendre_normalized_table(l_max, dir.theta.cos());
    let mut out = vec![Complex64::new(0.0, 0.0); (l_max + 1) * (l_max + 1)];
    let e1 = Complex64::from_polar(1.0, dir.phi);
    let mut eim = Complex64::new(1.0, 0.0);
    for m in 0..=l_max {
        if m > 0 {
            // recompute periodically to limit drift of the repeated product
            eim = if m % 16 == 0 { Complex64::from_polar(1.0, m as f64 * dir.phi) } else { eim * e1 };
        }
        for ell in m..=l_max {
            let y = eim * table[tri(ell, m)];
            let base = ell * (ell + 1);
            out[base + m] = y;
            if m > 0 {
                out[base - m] = negate_order(y, m);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// `P_ℓ^m` from the explicit Rodrigues-type sum (small ℓ only).
    fn legendre_explicit(ell: usize, m: usize, x: f64) -> f64 {
        // P_ℓ^m(x) = (-1)^m (1-x²)^{m/2} d^m/dx^m P_ℓ(x), P_ℓ(x) = 2^{-ℓ} Σ_k (-1)^k C(ℓ,k) C(2ℓ-2k,ℓ) x^{ℓ-2k}
        let fact = |n: usize| (1..=n).fold(1.0, |a, b| a * b as f64);
        let mut d = 0.0;
        for k in 0..=ell / 2 {
            let pow = ell - 2 * k;
            if pow < m {
                continue;
            }
            let c = fact(ell) / (fact(k) * fact(ell - k)) * fact(2 * ell - 2 * k) / (fact(ell) * fact(ell - 2 * k));
            let falling = fact(pow) / fact(pow - m);
            d += if k % 2 == 0 { 1.0 } else { -1.0 } * c * falling * x.powi((pow - m) as i32);
        }
        d /= 2f64.powi(ell as i32);
        let cs = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        cs * (1.0 - x * x).powf(m as f64 / 2.0) * d
    }

    #[test]
    fn direction_normalizes() {
        let d = Direction::new(-0.3, -0.1);
        assert!((d.theta() - 0.3).abs() < 1e-15);
        assert!((d.phi() - (PI - 0.1)).abs() < 1e-15);
        let d = Direction::new(1.0, 7.0);
        assert!((d.phi() - (7.0 - TAU)).abs() < 1e-15);
        let v = Direction::new(2.0, 4.0).unit_vector();
        assert!((crate::norm(&v) - 1.0).abs() < 1e-15);
        let back = Direction::from_vector(&v).unwrap();
        assert!((back.theta() - 2.0).abs() < 1e-14 && (back.phi() - 4.0).abs() < 1e-14);
        assert!(Direction::from_vector(&[0.0; 3]).is_err());
    }

    #[test]
    fn legendre_examples() {
        assert!((assoc_legendre(0, 0, 0.3).unwrap() - 1.0).abs() < 1e-15);
        assert!((assoc_legendre(1, 1, 0.0).unwrap() + 1.0).abs() < 1e-15);
        assert!((assoc_legendre(2, 0, 0.0).unwrap() + 0.5).abs() < 1e-15);
        assert!(assoc_legendre(2, 0, 1.5).is_err());
        assert!(assoc_legendre(2, 3, 0.5).is_err());
    }

    #[test]
    fn legendre_matches_explicit_polynomials() {
        for ell in 0..=12 {
            for m in 0..=ell {
                for &x in &[-0.93, -0.4, 0.0, 0.21, 0.77, 0.999] {
                    let want = legendre_explicit(ell, m, x);
                    let got = assoc_legendre(ell, m, x).unwrap();
                    // the explicit sum cancels near roots, so the floor is absolute
                    assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "ℓ={ell} m={m} x={x}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn legendre_large_degree_stays_finite_and_consistent() {
        // P_ℓ^ℓ(x) = (-1)^ℓ (2ℓ-1)!! (1-x²)^{ℓ/2}
        for &x in &[0.0f64, 0.5, 0.9] {
            for ell in [50usize, 150, 300] {
                let mut ln = 0.0;
                for k in 1..=ell {
                    ln += ((2 * k - 1) as f64).ln();
                }
                ln += ell as f64 / 2.0 * (1.0 - x * x).ln();
                let got = assoc_legendre(ell, ell, x).unwrap();
                let sign = if ell % 2 == 0 { 1.0 } else { -1.0 };
                if ln < 700.0 {
                    let want = sign * ln.exp();
                    assert!((got - want).abs() <= 1e-12 * want.abs(), "ℓ={ell} x={x}");
                } else {
                    assert!(got.is_infinite() || (got.abs().ln() - ln).abs() < 1e-12 * ln);
                }
            }
        }
        // P_ℓ(x) three-term recurrence at ℓ = 300
        let x = 0.37;
        let p = |l| assoc_legendre(l, 0, x).unwrap();
        let (a, b, c) = (p(298), p(299), p(300));
        let lhs = 300.0 * c;
        let rhs = 599.0 * x * b - 299.0 * a;
        assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1e-3));
    }

    #[test]
    fn ylm_examples() {
        let any = Direction::new(0.7, 2.1);
        assert!((ylm(0, 0, any).unwrap() - Complex64::new(0.5 / PI.sqrt(), 0.0)).norm() < 1e-15);
        let north = Direction::new(0.0, 0.0);
        assert!((ylm(1, 0, north).unwrap().re - (3.0 / (4.0 * PI)).sqrt()).abs() < 1e-15);
        let eq = Direction::new(PI / 2.0, 0.0);
        let y11 = ylm(1, 1, eq).unwrap();
        assert!((y11.re + (3.0 / (8.0 * PI)).sqrt()).abs() < 1e-15 && y11.im.abs() < 1e-15);
        assert!(ylm(1, 2, eq).is_err());
    }

    #[test]
    fn ylm_relates_to_unnormalized_legendre() {
        let fact = |n: usize| (1..=n).fold(1.0, |a, b| a * b as f64);
        let dir = Direction::new(1.1, 0.4);
        for ell in 0..10usize {
            for m in 0..=ell {
                let n = ((2 * ell + 1) as f64 / (4.0 * PI) * fact(ell - m) / fact(ell + m)).sqrt();
                let want = Complex64::from_polar(n * assoc_legendre(ell, m, dir.theta().cos()).unwrap(), m as f64 * dir.phi());
                assert!((ylm(ell, m as i64, dir).unwrap() - want).norm() < 1e-14);
            }
        }
    }

    proptest! {
        #[test]
        fn ylm_all_agrees_with_ylm(theta in 0.0..PI, phi in 0.0..TAU) {
            let dir = Direction::new(theta, phi);
            let all = ylm_all(24, dir);
            for ell in 0..=24usize {
                for m in -(ell as i64)..=ell as i64 {
                    let y = ylm(ell, m, dir).unwrap();
                    let idx = (ell * (ell + 1)) as i64 + m;
                    prop_assert!((all[idx as usize] - y).norm() < 1e-13);
                }
            }
        }

        #[test]
        fn unit_vector_has_unit_norm(theta in -10.0..10.0f64, phi in -10.0..10.0f64) {
            let d = Direction::new(theta, phi);
            prop_assert!((0.0..=PI).contains(&d.theta()));
            prop_assert!((0.0..TAU).contains(&d.phi()));
            prop_assert!((crate::norm(&d.unit_vector()) - 1.0).abs() <= 1e-15);
        }
    }
}
