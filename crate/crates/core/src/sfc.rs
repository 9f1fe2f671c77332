//! Array geometries and the closed-form spatial fading correlation
//!
//! ```text
//! ρ(z_p − z_q) = 4π Σ_ℓ i^ℓ j_ℓ(k d) Σ_m ĥ_ℓ^m Y_ℓ^m(d̂),   d = z_p − z_q
//! ```
//!
//! where `ĥ` are the coefficients of the angle-of-arrival density.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sht::{legendre_normalized_table, tri, CoeffTable, Direction};
use crate::specfun::{i_pow, spherical_bessel_j_seq};
use crate::{dot, norm, scale, sub, Vec3};

/// Element positions in metres; elements are addressed 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    positions: Vec<Vec3>,
    label: String,
}

impl ArrayGeometry {
    pub fn new(positions: Vec<Vec3>, label: impl Into<String>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::Constraint("a geometry needs at least one element".into()));
        }
        if positions.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Constraint("element coordinates must be finite".into()));
        }
        Ok(ArrayGeometry { positions, label: label.into() })
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Position of element `p` (1-based).
    pub fn element(&self, p: usize) -> Result<Vec3> {
        if p == 0 || p > self.positions.len() {
            return Err(Error::Index(format!("element {p} not in 1..={}", self.positions.len())));
        }
        Ok(self.positions[p - 1])
    }

    pub fn translated(&self, v: &Vec3) -> Self {
        let positions = self.positions.iter().map(|z| [z[0] + v[0], z[1] + v[1], z[2] + v[2]]).collect();
        ArrayGeometry { positions, label: self.label.clone() }
    }

    pub fn scaled(&self, s: f64) -> Self {
        ArrayGeometry { positions: self.positions.iter().map(|z| scale(z, s)).collect(), label: self.label.clone() }
    }

    /// Closest other element to `p` (1-based; lowest index wins ties within 1e-9 relative).
    pub fn nearest_neighbor(&self, p: usize) -> Result<usize> {
        let zp = self.element(p)?;
        let mut best: Option<(usize, f64)> = None;
        for (i, z) in self.positions.iter().enumerate() {
            if i + 1 == p {
                continue;
            }
            let d = norm(&sub(z, &zp));
            match best {
                Some((_, bd)) if d >= bd * (1.0 - 1e-9) => {}
                _ => best = Some((i + 1, d)),
            }
        }
        best.map(|(i, _)| i).ok_or_else(|| Error::Index("single-element geometry has no neighbour".into()))
    }
}

/// Uniform circular array in the x–y plane: `z_p = R(cos 2πp/M, sin 2πp/M, 0)`, `p = 1..=M`.
pub fn uca_positions(m: usize, radius: f64) -> Result<ArrayGeometry> {
    if m == 0 || !(radius >= 0.0) {
        return Err(Error::Constraint(format!("UCA needs M >= 1 and R >= 0, got M={m}, R={radius}")));
    }
    let positions = (1..=m)
        .map(|p| {
            let a = 2.0 * PI * p as f64 / m as f64;
            [radius * a.cos(), radius * a.sin(), 0.0]
        })
        .collect();
    ArrayGeometry::new(positions, format!("uca-{m}"))
}

/// The 20 vertices of a regular dodecahedron with circumradius `R`.
///
/// Order: the cube vertices `(±1,±1,±1)`, then `(0,±1/φ,±φ)`, `(±1/φ,±φ,0)`,
/// `(±φ,0,±1/φ)`, with `+` before `−` in each slot, all scaled by `R/√3`.
pub fn rda_positions(radius: f64) -> Result<ArrayGeometry> {
    if !(radius > 0.0) {
        return Err(Error::Constraint(format!("RDA needs R > 0, got {radius}")));
    }
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let ig = 1.0 / g;
    let pm = [1.0, -1.0];
    let mut v: Vec<Vec3> = Vec::with_capacity(20);
    for &a in &pm {
        for &b in &pm {
            for &c in &pm {
                v.push([a, b, c]);
            }
        }
    }
    for &a in &pm {
        for &b in &pm {
            v.push([0.0, a * ig, b * g]);
        }
    }
    for &a in &pm {
        for &b in &pm {
            v.push([a * ig, b * g, 0.0]);
        }
    }
    for &a in &pm {
        for &b in &pm {
            v.push([a * g, 0.0, b * ig]);
        }
    }
    let s = radius / 3f64.sqrt();
    ArrayGeometry::new(v.iter().map(|p| scale(p, s)).collect(), "rda-20")
}

/// `e^{ik z·x̂}`, `k = 2π/λ`.
pub fn steering_phase(z: &Vec3, dir: Direction, lambda: f64) -> Result<Complex64> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("wavelength must be positive, got {lambda}")));
    }
    Ok(Complex64::from_polar(1.0, 2.0 * PI / lambda * dot(z, &dir.unit_vector())))
}

/// Correlation between elements `p` and `q` (1-based).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SfcRequest {
    pub p: usize,
    pub q: usize,
    pub lambda: f64,
    /// Degree truncation; chosen by [`ell_truncation`] when `None`.
    pub l_sum: Option<usize>,
    pub tol: f64,
}

impl SfcRequest {
    pub fn new(p: usize, q: usize, lambda: f64) -> Self {
        SfcRequest { p, q, lambda, l_sum: None, tol: 1e-14 }
    }
}

/// Starting degree `⌈e·kd/2⌉ + 20` for the plane-wave sum.
pub fn ell_truncation_base(kd: f64) -> usize {
    (std::f64::consts::E * kd.max(0.0) / 2.0).ceil() as usize + 20
}

/// Degree at which the plane-wave sum may stop: the base rule, extended while
/// the next degree's bound `4π |j_ℓ(kd)| Σ_m |ĥ_ℓ^m|` exceeds `tol`.
pub fn ell_truncation(kd: f64, tol: f64, coeffs: &CoeffTable) -> Result<usize> {
    Ok(truncate_with_bessel(kd, tol, coeffs)?.0)
}

/// [`ell_truncation`] together with `j_ℓ(kd)` for every degree it needed.
fn truncate_with_bessel(kd: f64, tol: f64, coeffs: &CoeffTable) -> Result<(usize, Vec<f64>)> {
    if !(kd >= 0.0) {
        return Err(Error::Domain(format!("k·d must be >= 0, got {kd}")));
    }
    let base = ell_truncation_base(kd);
    let l_max = coeffs.l_max();
    let mut j = spherical_bessel_j_seq(base.min(l_max) + 1, kd)?;
    if kd == 0.0 {
        return Ok((base, j));
    }
    if base > l_max {
        // the tail beyond the table must already be negligible
        let bound = 4.0 * PI * j[l_max + 1].abs() * degree_abs_sum(coeffs, l_max).max(1.0);
        if bound > tol {
            return Err(Error::BandLimit(format!("plane-wave sum needs degree > {l_max} for k·d = {kd}")));
        }
        return Ok((base, j));
    }
    let mut l = base;
    while l < l_max {
        if l + 1 >= j.len() {
            j = spherical_bessel_j_seq(l_max + 1, kd)?;
        }
        if 4.0 * PI * j[l + 1].abs() * degree_abs_sum(coeffs, l + 1) <= tol {
            break;
        }
        l += 1;
    }
    Ok((l, j))
}

fn degree_abs_sum(coeffs: &CoeffTable, ell: usize) -> f64 {
    coeffs.degree(ell).iter().map(|c| c.norm()).sum()
}

fn check_mass(coeffs: &CoeffTable) -> Result<()> {
    let mass = 2.0 * PI.sqrt() * coeffs.get(0, 0);
    if (mass - 1.0).norm() > 1e-10 {
        return Err(Error::Constraint(format!("density does not integrate to one (∫h = {mass})")));
    }
    Ok(())
}

/// `Σ_m ĥ_ℓ^m Y_ℓ^m(dir)` for `ℓ ≤ l`.
fn directional_sums(coeffs: &CoeffTable, dir: Direction, l: usize) -> Vec<Complex64> {
    let plm = legendre_normalized_table(l, dir.theta().cos());
    let h = coeffs.as_slice();
    let mut inner = vec![Complex64::new(0.0, 0.0); l + 1];
    let e1 = Complex64::from_polar(1.0, dir.phi());
    let mut eim = Complex64::new(1.0, 0.0);
    for m in 0..=l {
        if m > 0 {
            eim = if m % 16 == 0 { Complex64::from_polar(1.0, m as f64 * dir.phi()) } else { eim * e1 };
        }
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        for ell in m..=l {
            let p = plm[tri(ell, m)];
            let base = ell * (ell + 1);
            let mut t = h[base + m] * eim;
            if m > 0 {
                t += h[base - m] * eim.conj() * sign;
            }
            inner[ell] += t * p;
        }
    }
    inner
}

/// `4π Σ_{ℓ ≤ l} i^ℓ j_ℓ inner_ℓ`.
fn plane_wave_sum(inner: &[Complex64], j: &[f64], l: usize) -> Complex64 {
    let rho: Complex64 = (0..=l).map(|ell| i_pow(ell as i64) * j[ell] * inner[ell]).sum();
    rho * (4.0 * PI)
}

/// Closed-form correlation `ρ(z_p − z_q)` for the density with coefficients `coeffs`.
pub fn sfc_closed_form(req: &SfcRequest, geometry: &ArrayGeometry, coeffs: &CoeffTable) -> Result<Complex64> {
    let zp = geometry.element(req.p)?;
    let zq = geometry.element(req.q)?;
    sfc_closed_form_at(&sub(&zp, &zq), req.lambda, req.l_sum, req.tol, coeffs)
}

/// [`sfc_closed_form`] for an explicit separation vector.
pub fn sfc_closed_form_at(d: &Vec3, lambda: f64, l_sum: Option<usize>, tol: f64, coeffs: &CoeffTable) -> Result<Complex64> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("wavelength must be positive, got {lambda}")));
    }
    check_mass(coeffs)?;
    let dist = norm(d);
    if dist == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let kd = 2.0 * PI / lambda * dist;
    let (l, j) = match l_sum {
        Some(l) => (l.min(coeffs.l_max()), spherical_bessel_j_seq(l, kd)?),
        None => {
            let (l, j) = truncate_with_bessel(kd, tol, coeffs)?;
            (l.min(coeffs.l_max()), j)
        }
    };
    let inner = directional_sums(coeffs, Direction::from_vector(d)?, l);
    Ok(plane_wave_sum(&inner, &j, l))
}

/// Geometry families whose size scales with a radius.
#[derive(Debug, Clone, PartialEq)]
pub enum GeometryFamily {
    Uca { elements: usize },
    Rda,
    /// Fixed shape given at unit radius, scaled by `R`.
    Custom(ArrayGeometry),
}

impl GeometryFamily {
    pub fn at_radius(&self, radius: f64) -> Result<ArrayGeometry> {
        match self {
            GeometryFamily::Uca { elements } => uca_positions(*elements, radius),
            GeometryFamily::Rda => rda_positions(radius.max(f64::MIN_POSITIVE)),
            GeometryFamily::Custom(g) => Ok(g.scaled(radius)),
        }
    }
}

/// Correlation against array size.
#[derive(Debug, Clone, PartialEq)]
pub struct SfcCurve {
    pub r_over_lambda: Vec<f64>,
    pub values: Vec<Complex64>,
}

/// `ρ(z_p − z_q)` at each `R/λ` in `grid`.
///
/// Every family scales linearly with `R`, so the separation direction is fixed
/// and the angular sums are formed once for the whole curve.
pub fn sfc_curve(
    coeffs: &CoeffTable,
    family: &GeometryFamily,
    pair: (usize, usize),
    lambda: f64,
    grid: &[f64],
    tol: f64,
) -> Result<SfcCurve> {
    if grid.is_empty() {
        return Err(Error::Domain("empty R/λ grid".into()));
    }
    if grid.windows(2).any(|w| !(w[1] >= w[0])) || !(grid[0] >= 0.0) {
        return Err(Error::Domain("R/λ grid must be ascending and non-negative".into()));
    }
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("wavelength must be positive, got {lambda}")));
    }
    check_mass(coeffs)?;
    let unit = family.at_radius(1.0)?;
    let d1 = sub(&unit.element(pair.0)?, &unit.element(pair.1)?);
    let one = Complex64::new(1.0, 0.0);
    let dist1 = norm(&d1);
    if dist1 == 0.0 {
        return Ok(SfcCurve { r_over_lambda: grid.to_vec(), values: vec![one; grid.len()] });
    }
    let inner = directional_sums(coeffs, Direction::from_vector(&d1)?, coeffs.l_max());
    let values = grid
        .iter()
        .map(|&r| {
            // |z_p − z_q| = R·dist1, so kd = 2π (R/λ) dist1
            let kd = 2.0 * PI * r * dist1;
            if kd == 0.0 {
                return Ok(one);
            }
            let (l, j) = truncate_with_bessel(kd, tol, coeffs)?;
            Ok(plane_wave_sum(&inner, &j, l.min(coeffs.l_max())))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SfcCurve { r_over_lambda: grid.to_vec(), values })
}
