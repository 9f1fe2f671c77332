use crate::error::{Error, Result};
use crate::sht::{Direction, RotationMatrix};
use crate::{cross, dot, norm, scale, sub, Vec3};

use super::normalization_scaled;

/// Five-parameter Fisher-Bingham (Kent) distribution.
///
/// Density `C(κ,β)⁻¹ exp(κ μ·x + β[(η₁·x)² − (η₂·x)²])`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fb5Params {
    kappa: f64,
    beta: f64,
    mu: Vec3,
    eta1: Vec3,
    eta2: Vec3,
}

const UNIT_TOL: f64 = 1e-12;
const ORTHO_TOL: f64 = 1e-10;
const REPAIR_TOL: f64 = 1e-6;

pub(crate) fn check_shape(kappa: f64, beta: f64) -> Result<()> {
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(Error::Constraint(format!("kappa must be finite and >= 0, got {kappa}")));
    }
    if !(beta >= 0.0) || beta > kappa / 2.0 {
        return Err(Error::Constraint(format!("need 0 <= beta <= kappa/2, got beta={beta}, kappa={kappa}")));
    }
    Ok(())
}

fn frame_defect(mu: &Vec3, eta1: &Vec3, eta2: &Vec3) -> (f64, f64) {
    let unit = [mu, eta1, eta2].iter().map(|v| (norm(v) - 1.0).abs()).fold(0.0, f64::max);
    let ortho = [dot(mu, eta1), dot(mu, eta2), dot(eta1, eta2)].iter().map(|d| d.abs()).fold(0.0, f64::max);
    (unit, ortho)
}

impl Fb5Params {
    /// Requires an orthonormal frame (unit within 1e-12, orthogonal within 1e-10).
    pub fn new(kappa: f64, beta: f64, mu: Vec3, eta1: Vec3, eta2: Vec3) -> Result<Self> {
        check_shape(kappa, beta)?;
        let (unit, ortho) = frame_defect(&mu, &eta1, &eta2);
        if !(unit <= UNIT_TOL && ortho <= ORTHO_TOL) {
            return Err(Error::Constraint(format!(
                "frame is not orthonormal (norm defect {unit:e}, orthogonality defect {ortho:e})"
            )));
        }
        Ok(Fb5Params { kappa, beta, mu, eta1, eta2 })
    }

    /// Like [`Fb5Params::new`] but repairs a frame that is orthonormal to within
    /// 1e-6 by Gram–Schmidt (μ kept, then η₁, then η₂).
    pub fn with_repaired_frame(kappa: f64, beta: f64, mu: Vec3, eta1: Vec3, eta2: Vec3) -> Result<Self> {
        check_shape(kappa, beta)?;
        let (unit, ortho) = frame_defect(&mu, &eta1, &eta2);
        if !(unit <= REPAIR_TOL && ortho <= REPAIR_TOL) {
            return Err(Error::Constraint(format!(
                "frame too far from orthonormal to repair (norm defect {unit:e}, orthogonality defect {ortho:e})"
            )));
        }
        let mu = scale(&mu, 1.0 / norm(&mu));
        let e1 = sub(&eta1, &scale(&mu, dot(&eta1, &mu)));
        let e1 = scale(&e1, 1.0 / norm(&e1));
        let e2 = sub(&sub(&eta2, &scale(&mu, dot(&eta2, &mu))), &scale(&e1, dot(&eta2, &e1)));
        let e2 = scale(&e2, 1.0 / norm(&e2));
        Self::new(kappa, beta, mu, e1, e2)
    }

    /// Standard orientation: μ = ẑ, η₁ = x̂, η₂ = ŷ.
    pub fn standard(kappa: f64, beta: f64) -> Result<Self> {
        Self::new(kappa, beta, [0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mu(&self) -> Vec3 {
        self.mu
    }

    pub fn eta1(&self) -> Vec3 {
        self.eta1
    }

    pub fn eta2(&self) -> Vec3 {
        self.eta2
    }

    /// `A = η₁η₁ᵀ − η₂η₂ᵀ`.
    pub fn a_matrix(&self) -> [[f64; 3]; 3] {
        let mut a = [[0.0; 3]; 3];
        for (i, row) in a.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.eta1[i] * self.eta1[j] - self.eta2[i] * self.eta2[j];
            }
        }
        a
    }
}

/// Rotation taking the standard frame to `[η₁ η₂ μ]`.
///
/// A left-handed frame has η₂ negated first; the density only sees `η₂η₂ᵀ`.
pub fn frame_to_rotation(params: &Fb5Params) -> Result<RotationMatrix> {
    let mut e2 = params.eta2;
    if dot(&cross(&params.eta1, &e2), &params.mu) < 0.0 {
        e2 = scale(&e2, -1.0);
    }
    RotationMatrix::from_columns(&params.eta1, &e2, &params.mu)
}

/// Scaled standard-FB exponent `κ(cos θ − 1) + β sin²θ cos 2φ` at a unit vector.
#[inline]
pub(crate) fn standard_exponent(kappa: f64, beta: f64, x: &Vec3) -> f64 {
    let rho2 = x[0] * x[0] + x[1] * x[1];
    // cos θ − 1 without cancellation near the pole
    let zm1 = if x[2] > 0.0 { -rho2 / (1.0 + x[2]) } else { x[2] - 1.0 };
    kappa * zm1 + beta * (x[0] * x[0] - x[1] * x[1])
}

/// Standard FB density `C⁻¹ exp(κ cos θ + β sin²θ cos 2φ)`.
pub fn standard_fb_pdf(dir: Direction, kappa: f64, beta: f64) -> Result<f64> {
    check_shape(kappa, beta)?;
    let c = normalization_scaled(kappa, beta)?;
    Ok(standard_exponent(kappa, beta, &dir.unit_vector()).exp() / c)
}

/// FB5 density, evaluated as the standard density at `R⁻¹ x`.
pub fn fb5_pdf(dir: Direction, params: &Fb5Params) -> Result<f64> {
    Fb5Density::new(params)?.pdf(dir)
}

/// FB5 density from the direct exponential form.
pub fn fb5_pdf_direct(dir: Direction, params: &Fb5Params) -> Result<f64> {
    let c = normalization_scaled(params.kappa, params.beta)?;
    let x = dir.unit_vector();
    let (a, b) = (dot(&params.eta1, &x), dot(&params.eta2, &x));
    Ok((params.kappa * (dot(&params.mu, &x) - 1.0) + params.beta * (a * a - b * b)).exp() / c)
}

/// FB5 density with the normalisation and rotation precomputed.
#[derive(Debug, Clone)]
pub struct Fb5Density {
    kappa: f64,
    beta: f64,
    c_scaled: f64,
    rotation: RotationMatrix,
}

impl Fb5Density {
    pub fn new(params: &Fb5Params) -> Result<Self> {
        Ok(Fb5Density {
            kappa: params.kappa,
            beta: params.beta,
            c_scaled: normalization_scaled(params.kappa, params.beta)?,
            rotation: frame_to_rotation(params)?,
        })
    }

    pub fn pdf(&self, dir: Direction) -> Result<f64> {
        Ok(self.pdf_at(&dir.unit_vector()))
    }

    /// Density at a unit vector.
    pub fn pdf_at(&self, x: &Vec3) -> f64 {
        let local = self.rotation.apply_inverse(x);
        standard_exponent(self.kappa, self.beta, &local).exp() / self.c_scaled
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sht::euler_from_rotation;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    pub(crate) fn random_frame(rng: &mut ChaCha8Rng) -> (Vec3, Vec3, Vec3) {
        let mut v = || -> Vec3 {
            let z: f64 = rng.random_range(-1.0..1.0);
            let p: f64 = rng.random_range(0.0..2.0 * PI);
            let r = (1.0 - z * z).sqrt();
            [r * p.cos(), r * p.sin(), z]
        };
        let mu = v();
        let w = v();
        let e1 = cross(&mu, &w);
        let e1 = scale(&e1, 1.0 / norm(&e1));
        let e2 = cross(&mu, &e1);
        (mu, e1, e2)
    }

    #[test]
    fn shape_constraints() {
        assert!(Fb5Params::standard(10.0, 5.0).is_ok());
        assert!(matches!(Fb5Params::standard(10.0, 5.1), Err(Error::Constraint(_))));
        assert!(Fb5Params::standard(-1.0, 0.0).is_err());
        assert!(Fb5Params::new(1.0, 0.0, [0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn a_matrix_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (mu, e1, e2) = random_frame(&mut rng);
        let p = Fb5Params::new(5.0, 1.0, mu, e1, e2).unwrap();
        let a = p.a_matrix();
        let apply = |v: &Vec3| -> Vec3 { [dot(&a[0].clone(), v), dot(&a[1].clone(), v), dot(&a[2].clone(), v)] };
        for (v, lam) in [(e1, 1.0), (e2, -1.0), (mu, 0.0)] {
            let av = apply(&v);
            for i in 0..3 {
                assert!((av[i] - lam * v[i]).abs() < 1e-14);
            }
            assert!((a[0][1] - a[1][0]).abs() < 1e-16);
        }
    }

    #[test]
    fn repair_frame() {
        let p = Fb5Params::with_repaired_frame(4.0, 1.0, [0.0, 1e-7, 1.0], [1.0, 0.0, 2e-7], [0.0, 1.0, 0.0]).unwrap();
        let (u, o) = frame_defect(&p.mu(), &p.eta1(), &p.eta2());
        assert!(u < 1e-15 && o < 1e-15);
        assert!(Fb5Params::with_repaired_frame(4.0, 1.0, [0.0, 1e-3, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn frame_rotation_examples() {
        let id = frame_to_rotation(&Fb5Params::standard(1.0, 0.0).unwrap()).unwrap();
        assert_eq!(id, RotationMatrix::IDENTITY);
        let p = Fb5Params::new(100.0, 49.0, [0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]).unwrap();
        let r = frame_to_rotation(&p).unwrap();
        assert_eq!(r.column(0), [1.0, 0.0, 0.0]);
        assert_eq!(r.column(1), [0.0, 0.0, -1.0]);
        assert_eq!(r.column(2), [0.0, 1.0, 0.0]);
        assert!((r.det() - 1.0).abs() < 1e-15);
        // a right-handed frame passes through unchanged
        let q = Fb5Params::new(2.0, 0.5, [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]).unwrap();
        assert_eq!(frame_to_rotation(&q).unwrap().column(1), [1.0, 0.0, 0.0]);
    }

    #[test]
    fn figure_frame_euler_angles() {
        let p = Fb5Params::new(100.0, 49.0, [0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]).unwrap();
        let a = euler_from_rotation(&frame_to_rotation(&p).unwrap()).unwrap();
        assert!((a.varphi() - FRAC_PI_2).abs() < 1e-15);
        assert!((a.vartheta() - FRAC_PI_2).abs() < 1e-15);
        // η₂ was negated, so ω lands on 3π/2; ω + π describes the same density
        assert!((a.omega() - 3.0 * FRAC_PI_2).abs() < 1e-15);
        let alt = crate::sht::rotation_matrix(&crate::sht::EulerAngles::new(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2));
        let alt_params = Fb5Params::new(100.0, 49.0, alt.column(2), alt.column(0), alt.column(1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let d = Direction::new(rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI));
            let a = fb5_pdf(d, &p).unwrap();
            let b = fb5_pdf(d, &alt_params).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
        }
    }

    #[test]
    fn uniform_and_periodicity() {
        let d = Direction::new(1.2, 0.3);
        assert!((standard_fb_pdf(d, 0.0, 0.0).unwrap() - 1.0 / (4.0 * PI)).abs() < 1e-17);
        for &(k, b) in &[(25.0, 10.0), (100.0, 49.0), (3.0, 1.5)] {
            for &(t, p) in &[(0.1, 0.2), (1.0, 2.0), (2.5, 4.0)] {
                let f1 = standard_fb_pdf(Direction::new(t, p), k, b).unwrap();
                let f2 = standard_fb_pdf(Direction::new(t, p + PI), k, b).unwrap();
                assert!((f1 - f2).abs() <= 1e-14 * f1);
            }
        }
    }

    #[test]
    fn rotated_and_direct_forms_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let (mu, e1, e2) = random_frame(&mut rng);
            let k: f64 = rng.random_range(0.0..60.0);
            let b: f64 = rng.random_range(0.0..k / 2.0);
            let p = Fb5Params::new(k, b, mu, e1, e2).unwrap();
            let dens = Fb5Density::new(&p).unwrap();
            for _ in 0..100 {
                let d = Direction::new(rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI));
                let a = dens.pdf(d).unwrap();
                let c = fb5_pdf_direct(d, &p).unwrap();
                assert!((a - c).abs() <= 1e-12 * c, "{a} vs {c}");
            }
        }
        let id = Fb5Params::standard(25.0, 10.0).unwrap();
        let d = Direction::new(0.4, 1.9);
        assert_eq!(fb5_pdf(d, &id).unwrap(), standard_fb_pdf(d, 25.0, 10.0).unwrap());
    }

    #[test]
    fn figure_frame_peaks_near_mean() {
        let p = Fb5Params::new(100.0, 49.0, [0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]).unwrap();
        let dens = Fb5Density::new(&p).unwrap();
        let (mut best, mut arg) = (0.0, [0.0; 3]);
        for i in 0..=180 {
            for j in 0..360 {
                let d = Direction::new(i as f64 * PI / 180.0, j as f64 * PI / 180.0);
                let v = dens.pdf(d).unwrap();
                if v > best {
                    best = v;
                    arg = d.unit_vector();
                }
            }
        }
        assert!((arg[1] - 1.0).abs() < 1e-12, "max at {arg:?}");
    }
}
