//! Brute-force ground truth: tensor-product sphere quadrature, numerical
//! spherical-harmonic transforms, direct SFC integration and the spatial
//! reconstruction error.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fb5::{standard_fb_coeffs, standard_fb_pdf, MixtureModel, TruncationPolicy};
use crate::sht::{legendre_normalized_table, synthesize_grid, tri, CoeffTable, Direction, WignerPi2Table};
use crate::{dot, sub, Vec3};

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d.is_finite() { d } else { dp };
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[n - 1 - i] = z;
        x[i] = -z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (z * p1 - p0) / (z * z - 1.0))
}

/// Tensor rule: Gauss–Legendre in `cos θ` × uniform `φ`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    thetas: Vec<f64>,
    cos_weights: Vec<f64>,
    n_phi: usize,
    order: usize,
}

impl QuadratureRule {
    /// Polynomial degree integrated exactly.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.thetas.len() * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn phis(&self) -> Vec<f64> {
        (0..self.n_phi).map(|j| 2.0 * PI * j as f64 / self.n_phi as f64).collect()
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// `(direction, weight)` pairs, rings in ascending `θ`.
    pub fn nodes(&self) -> impl Iterator<Item = (Direction, f64)> + '_ {
        let dphi = 2.0 * PI / self.n_phi as f64;
        self.thetas.iter().zip(&self.cos_weights).flat_map(move |(&t, &w)| {
            (0..self.n_phi).map(move |j| (Direction::new(t, j as f64 * dphi), w * dphi))
        })
    }

    /// `Σ_nodes f(x̂) w`.
    pub fn integrate<T, F>(&self, f: F) -> T
    where
        T: std::iter::Sum<T> + std::ops::Mul<f64, Output = T>,
        F: Fn(Direction) -> T,
    {
        self.nodes().map(|(d, w)| f(d) * w).sum()
    }
}

/// `L+1` Gauss–Legendre rings × `2L+2` longitudes, exact through degree `2L+1`.
pub fn quadrature_nodes(l: usize) -> QuadratureRule {
    let (x, w) = gauss_legendre(l + 1);
    // descending cos θ gives ascending θ
    let thetas = x.iter().rev().map(|c| c.acos()).collect();
    let cos_weights = w.into_iter().rev().collect();
    QuadratureRule { thetas, cos_weights, n_phi: 2 * l + 2, order: 2 * l + 1 }
}

/// `f_ℓ^m = Σ_nodes f(x̂) conj(Y_ℓ^m(x̂)) w` for `ℓ ≤ L`.
///
/// Exact for band-limited `f` of degree `≤ L` when `rule.order() ≥ 2L`.
pub fn numeric_sht<F, T>(f: F, l: usize, rule: &QuadratureRule) -> Result<CoeffTable>
where
    F: Fn(Direction) -> T,
    T: Into<Complex64>,
{
    if rule.order < 2 * l {
        return Err(Error::BandLimit(format!("rule of order {} cannot resolve degree {l}", rule.order)));
    }
    let phis = rule.phis();
    let dphi = 2.0 * PI / rule.n_phi as f64;
    let mut out = CoeffTable::zeros(l);
    let mut ring = vec![Complex64::new(0.0, 0.0); rule.n_phi];
    for (&theta, &w) in rule.thetas.iter().zip(&rule.cos_weights) {
        for (r, &p) in ring.iter_mut().zip(&phis) {
            *r = f(Direction::new(theta, p)).into();
        }
        let plm = legendre_normalized_table(l, theta.cos());
        for m in -(l as i64)..=l as i64 {
            // F_m = Σ_j f(θ, φ_j) e^{−imφ_j} Δφ
            let fm: Complex64 = ring
                .iter()
                .zip(&phis)
                .map(|(v, &p)| v * Complex64::from_polar(1.0, -(m as f64) * p))
                .sum::<Complex64>()
                * dphi;
            let am = m.unsigned_abs() as usize;
            let sign = if m < 0 && am % 2 == 1 { -1.0 } else { 1.0 };
            for ell in am..=l {
                let v = out.get(ell, m) + fm * (w * sign * plm[tri(ell, am)]);
                out.set(ell, m, v);
            }
        }
    }
    Ok(out)
}

/// Quadrature degree adequate for the SFC integrand at separation `k d`.
pub fn sfc_rule_order(kd: f64, model: &MixtureModel) -> usize {
    let spread = model
        .components()
        .iter()
        .map(|(_, p)| (2.0 * (p.kappa() + 2.0 * p.beta()) * 37.0).sqrt())
        .fold(0.0, f64::max);
    (2.0 * kd).ceil() as usize + 40 + spread.ceil() as usize
}

/// `ρ = Σ_nodes h(x̂) e^{ik(z_p − z_q)·x̂} w`.
pub fn sfc_numeric(model: &MixtureModel, z_p: &Vec3, z_q: &Vec3, lambda: f64, rule: &QuadratureRule) -> Result<Complex64> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("wavelength must be positive, got {lambda}")));
    }
    let k = 2.0 * PI / lambda;
    let d = sub(z_p, z_q);
    let h = model.density()?;
    Ok(rule.integrate(|dir| {
        let x = dir.unit_vector();
        Complex64::from_polar(h.pdf_at(&x), k * dot(&d, &x))
    }))
}

/// Equiangular `L × L` evaluation grid: `θ_j = π(2j+1)/(2L)`, `φ_k = 2πk/L`.
pub fn equiangular_grid(l: usize) -> (Vec<f64>, Vec<f64>) {
    let lf = l as f64;
    let thetas = (0..l).map(|j| PI * (2 * j + 1) as f64 / (2.0 * lf)).collect();
    let phis = (0..l).map(|k| 2.0 * PI * k as f64 / lf).collect();
    (thetas, phis)
}

/// Mean squared error over the `L × L` equiangular grid between the standard FB
/// density and its expansion through degree `L − 1`.
pub fn spatial_error(kappa: f64, beta: f64, l: usize, table: &WignerPi2Table) -> Result<f64> {
    if l == 0 {
        return Err(Error::Domain("spatial error needs L >= 1".into()));
    }
    let coeffs = standard_fb_coeffs(kappa, beta, l - 1, table, TruncationPolicy::for_params(kappa, beta))?;
    spatial_error_from_coeffs(kappa, beta, &coeffs, l)
}

/// [`spatial_error`] for a precomputed standard table of band-limit `≥ L − 1`.
pub fn spatial_error_from_coeffs(kappa: f64, beta: f64, coeffs: &CoeffTable, l: usize) -> Result<f64> {
    if l == 0 || coeffs.l_max() + 1 < l {
        return Err(Error::BandLimit(format!("need coefficients through degree {}", l.saturating_sub(1))));
    }
    let c = coeffs.with_band_limit(l - 1);
    let (thetas, phis) = equiangular_grid(l);
    let approx = synthesize_grid(&c, &thetas, &phis);
    let mut err = 0.0;
    for (i, &t) in thetas.iter().enumerate() {
        for (j, &p) in phis.iter().enumerate() {
            let f = standard_fb_pdf(Direction::new(t, p), kappa, beta)?;
            err += (approx[i * phis.len() + j] - f).norm_sqr();
        }
    }
    Ok(err / (l * l) as f64)
}
