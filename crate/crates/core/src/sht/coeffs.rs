use num_complex::Complex64;

use super::harmonics::{legendre_normalized_table, tri, ylm_all, Direction};
use crate::error::{Error, Result};

/// Spherical-harmonic coefficients `f_ℓ^m` for `0 ≤ ℓ ≤ L`, `|m| ≤ ℓ`,
/// stored densely at index `ℓ(ℓ+1)+m`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable {
    l_max: usize,
    data: Vec<Complex64>,
}

#[inline]
fn idx(ell: usize, m: i64) -> usize {
    ((ell * (ell + 1)) as i64 + m) as usize
}

impl CoeffTable {
    pub fn zeros(l_max: usize) -> Self {
        CoeffTable { l_max, data: vec![Complex64::new(0.0, 0.0); (l_max + 1) * (l_max + 1)] }
    }

    pub fn from_fn<F: FnMut(usize, i64) -> Complex64>(l_max: usize, mut f: F) -> Self {
        let mut t = Self::zeros(l_max);
        for ell in 0..=l_max {
            for m in -(ell as i64)..=ell as i64 {
                t.data[idx(ell, m)] = f(ell, m);
            }
        }
        t
    }

    /// Wraps a flat vector in `ℓ(ℓ+1)+m` order.
    pub fn from_vec(l_max: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != (l_max + 1) * (l_max + 1) {
            return Err(Error::BandLimit(format!(
                "{} entries cannot form a table with L={l_max}",
                data.len()
            )));
        }
        Ok(CoeffTable { l_max, data })
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Panics if `(ℓ, m)` is outside the table.
    pub fn get(&self, ell: usize, m: i64) -> Complex64 {
        assert!(ell <= self.l_max && m.unsigned_abs() as usize <= ell, "({ell},{m}) outside table");
        self.data[idx(ell, m)]
    }

    pub fn try_get(&self, ell: usize, m: i64) -> Option<Complex64> {
        (ell <= self.l_max && m.unsigned_abs() as usize <= ell).then(|| self.data[idx(ell, m)])
    }

    pub fn set(&mut self, ell: usize, m: i64, v: Complex64) {
        assert!(ell <= self.l_max && m.unsigned_abs() as usize <= ell, "({ell},{m}) outside table");
        self.data[idx(ell, m)] = v;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// The `2ℓ+1` entries of degree `ℓ`, `m = -ℓ..=ℓ`.
    pub fn degree(&self, ell: usize) -> &[Complex64] {
        &self.data[ell * ell..(ell + 1) * (ell + 1)]
    }

    pub fn degree_mut(&mut self, ell: usize) -> &mut [Complex64] {
        &mut self.data[ell * ell..(ell + 1) * (ell + 1)]
    }

    /// Iterates `(ℓ, m, value)` with ℓ ascending, then m ascending.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, Complex64)> + '_ {
        (0..=self.l_max).flat_map(move |ell| (-(ell as i64)..=ell as i64).map(move |m| (ell, m, self.data[idx(ell, m)])))
    }

    /// `Σ_m |f_ℓ^m|²`.
    pub fn degree_power(&self, ell: usize) -> f64 {
        self.degree(ell).iter().map(|c| c.norm_sqr()).sum()
    }

    /// Copy with band-limit `l`, zero-padding or truncating as needed.
    pub fn with_band_limit(&self, l: usize) -> CoeffTable {
        let mut out = CoeffTable::zeros(l);
        let n = (l.min(self.l_max) + 1).pow(2);
        out.data[..n].copy_from_slice(&self.data[..n]);
        out
    }

    /// Largest `|a - b|` over the union of both tables, missing entries read as zero.
    pub fn max_abs_diff(&self, other: &CoeffTable) -> f64 {
        let l = self.l_max.max(other.l_max);
        let zero = Complex64::new(0.0, 0.0);
        (0..(l + 1) * (l + 1))
            .map(|i| (self.data.get(i).copied().unwrap_or(zero) - other.data.get(i).copied().unwrap_or(zero)).norm())
            .fold(0.0, f64::max)
    }

    /// Largest deviation from `f_ℓ^{-m} = (-1)^m conj(f_ℓ^m)`.
    pub fn conjugate_symmetry_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for ell in 0..=self.l_max {
            for m in 0..=ell as i64 {
                let pos = self.data[idx(ell, m)];
                let neg = self.data[idx(ell, -m)];
                let want = if m % 2 == 0 { pos.conj() } else { -pos.conj() };
                worst = worst.max((neg - want).norm());
            }
        }
        worst
    }

    /// `self += w · other` over the common band.
    pub fn add_scaled(&mut self, other: &CoeffTable, w: f64) {
        let n = (self.l_max.min(other.l_max) + 1).pow(2);
        for (a, b) in self.data[..n].iter_mut().zip(&other.data[..n]) {
            *a += b * w;
        }
    }
}

/// `Σ_{ℓ ≤ L} Σ_m f_ℓ^m Y_ℓ^m(dir)`.
pub fn synthesize(coeffs: &CoeffTable, dir: Direction) -> Complex64 {
    let y = ylm_all(coeffs.l_max, dir);
    coeffs.data.iter().zip(&y).map(|(c, y)| c * y).sum()
}

/// Synthesis on a tensor grid; output is row-major with `phi` fastest.
///
/// Separable: one Legendre table per ring, then a length-`2L+1` Fourier sum per
/// point.
pub fn synthesize_grid(coeffs: &CoeffTable, thetas: &[f64], phis: &[f64]) -> Vec<Complex64> {
    let l_max = coeffs.l_max;
    let mut out = Vec::with_capacity(thetas.len() * phis.len());
    let mut ring = vec![Complex64::new(0.0, 0.0); 2 * l_max + 1];
    // e^{imφ} for every φ, m = 0..=L
    let phases: Vec<Vec<Complex64>> =
        phis.iter().map(|&p| (0..=l_max).map(|m| Complex64::from_polar(1.0, m as f64 * p)).collect()).collect();
    for &theta in thetas {
        let p = legendre_normalized_table(l_max, theta.cos());
        ring.iter_mut().for_each(|r| *r = Complex64::new(0.0, 0.0));
        for ell in 0..=l_max {
            for m in 0..=ell {
                let pl = p[tri(ell, m)];
                ring[l_max + m] += coeffs.data[idx(ell, m as i64)] * pl;
                if m > 0 {
                    let s = if m % 2 == 0 { pl } else { -pl };
                    ring[l_max - m] += coeffs.data[idx(ell, -(m as i64))] * s;
                }
            }
        }
        for ph in &phases {
            let mut v = ring[l_max];
            for m in 1..=l_max {
                v += ring[l_max + m] * ph[m] + ring[l_max - m] * ph[m].conj();
            }
            out.push(v);
        }
    }
    out
}
