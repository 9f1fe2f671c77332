use num_complex::Complex64;

use super::coeffs::CoeffTable;
use super::harmonics::tri;
use super::rotation::EulerAngles;
use crate::error::{Error, Result};
use crate::specfun::i_pow;

/// `Δ^ℓ_{u,m} = d^ℓ_{u,m}(π/2)` for every `ℓ ≤ L`.
///
/// Only the wedge `0 ≤ m ≤ u ≤ ℓ` is stored; other entries follow from
/// `d_{u,-m} = (-1)^{ℓ+u} d_{u,m}`, `d_{-u,m} = (-1)^{ℓ+m} d_{u,m}` and
/// `d_{u,m} = (-1)^{u-m} d_{m,u}`.
#[derive(Debug, Clone)]
pub struct WignerPi2Table {
    l_max: usize,
    wedges: Vec<Vec<f64>>,
}

#[inline]
fn parity(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

impl WignerPi2Table {
    /// Builds all degrees up to `L` by the degree-raising recursion
    /// (each wedge is seeded from the previous degree's last row).
    pub fn new(l_max: usize) -> Self {
        let mut wedges: Vec<Vec<f64>> = Vec::with_capacity(l_max + 1);
        wedges.push(vec![1.0]);
        for ell in 1..=l_max {
            let prev = &wedges[ell - 1];
            let mut w = vec![0.0; tri(ell, ell) + 1];
            let lf = ell as f64;
            w[tri(ell, 0)] = -((2.0 * lf - 1.0) / (2.0 * lf)).sqrt() * prev[tri(ell - 1, 0)];
            for mp in 1..=ell {
                let mpf = mp as f64;
                w[tri(ell, mp)] = (lf * (2.0 * lf - 1.0) / (2.0 * (lf + mpf) * (lf + mpf - 1.0))).sqrt()
                    * prev[tri(ell - 1, mp - 1)];
            }
            for mp in 0..=ell {
                let mpf = mp as f64;
                for m in (mp..ell).rev() {
                    let mf = m as f64;
                    let den = ((lf - mf) * (lf + mf + 1.0)).sqrt();
                    let d1 = w[tri(m + 1, mp)];
                    let d2 = if m + 2 <= ell { w[tri(m + 2, mp)] } else { 0.0 };
                    let c2 = ((lf - mf - 1.0) * (lf + mf + 2.0)).sqrt();
                    w[tri(m, mp)] = (2.0 * mpf * d1 - c2 * d2) / den;
                }
            }
            wedges.push(w);
        }
        WignerPi2Table { l_max, wedges }
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    /// `d^ℓ_{u,m}(π/2)` for any `|u|, |m| ≤ ℓ ≤ L`.
    pub fn get(&self, ell: usize, u: i64, m: i64) -> f64 {
        let l = ell as i64;
        let (mut u, mut m) = (u, m);
        let mut sign = 1.0;
        if m < 0 {
            sign *= parity(l + u);
            m = -m;
        }
        if u < 0 {
            sign *= parity(l + m);
            u = -u;
        }
        if u < m {
            sign *= parity(u - m);
            std::mem::swap(&mut u, &mut m);
        }
        sign * self.wedges[ell][tri(u as usize, m as usize)]
    }

    /// Dense `(2ℓ+1)²` block, row `u+ℓ`, column `m+ℓ`.
    pub fn block(&self, ell: usize) -> Vec<f64> {
        let n = 2 * ell + 1;
        let l = ell as i64;
        let mut b = vec![0.0; n * n];
        for u in -l..=l {
            for m in -l..=l {
                b[((u + l) as usize) * n + (m + l) as usize] = self.get(ell, u, m);
            }
        }
        b
    }

    fn check_degree(&self, ell: usize) -> Result<()> {
        if ell > self.l_max {
            return Err(Error::BandLimit(format!("degree {ell} exceeds Wigner table L={}", self.l_max)));
        }
        Ok(())
    }
}

/// Wigner `d^ℓ_{m,m'}(θ) = i^{m'-m} Σ_u Δ_{u,m} Δ_{u,m'} e^{iuθ}`.
pub fn wigner_d(ell: usize, m: i64, mprime: i64, theta: f64, table: &WignerPi2Table) -> Result<f64> {
    table.check_degree(ell)?;
    let l = ell as i64;
    if m.abs() > l || mprime.abs() > l {
        return Err(Error::Domain(format!("orders ({m},{mprime}) exceed degree {ell}")));
    }
    let mut s = Complex64::new(0.0, 0.0);
    for u in -l..=l {
        s += Complex64::from_polar(table.get(ell, u, m) * table.get(ell, u, mprime), u as f64 * theta);
    }
    Ok((i_pow(mprime - m) * s).re)
}

/// Rotates a coefficient table:
/// `out_ℓ^m = Σ_{m'} e^{-imφ} d^ℓ_{m,m'}(ϑ) e^{-im'ω} f_ℓ^{m'}`.
///
/// The `d(ϑ)` factor is applied in its `Δ · diag(e^{iuϑ}) · Δ` form, so each
/// degree costs `O(ℓ²)`.
pub fn rotate_coeffs(coeffs: &CoeffTable, angles: &EulerAngles, table: &WignerPi2Table) -> Result<CoeffTable> {
    let l_max = coeffs.l_max();
    if l_max > table.l_max {
        return Err(Error::BandLimit(format!(
            "coefficient band-limit {l_max} exceeds Wigner table L={}",
            table.l_max
        )));
    }
    let (phi, theta, omega) = (angles.varphi(), angles.vartheta(), angles.omega());
    if theta == 0.0 {
        // rotation about ẑ only: d(0) is the identity
        let mut out = coeffs.clone();
        for ell in 0..=l_max {
            let l = ell as i64;
            for (mi, v) in out.degree_mut(ell).iter_mut().enumerate() {
                let m = mi as i64 - l;
                if m != 0 {
                    *v *= Complex64::from_polar(1.0, -(m as f64) * (phi + omega));
                }
            }
        }
        return Ok(out);
    }
    let mut out = CoeffTable::zeros(l_max);
    for ell in 0..=l_max {
        let l = ell as i64;
        let n = 2 * ell + 1;
        let block = table.block(ell);
        let c = coeffs.degree(ell);
        let x: Vec<Complex64> = (-l..=l)
            .map(|mp| c[(mp + l) as usize] * Complex64::from_polar(1.0, -(mp as f64) * omega) * i_pow(mp))
            .collect();
        let z: Vec<Complex64> = (0..n)
            .map(|ui| {
                let row = &block[ui * n..(ui + 1) * n];
                let y: Complex64 = row.iter().zip(&x).map(|(d, xv)| xv * d).sum();
                y * Complex64::from_polar(1.0, (ui as i64 - l) as f64 * theta)
            })
            .collect();
        let dst = out.degree_mut(ell);
        for mi in 0..n {
            let m = mi as i64 - l;
            let w: Complex64 = (0..n).map(|ui| z[ui] * block[ui * n + mi]).sum();
            dst[mi] = w * i_pow(-m) * Complex64::from_polar(1.0, -(m as f64) * phi);
        }
    }
    Ok(out)
}
