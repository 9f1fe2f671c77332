use std::f64::consts::PI;

use super::harmonics::wrap_angle;
use crate::error::{Error, Result};
use crate::Vec3;

/// zyz Euler angles `(φ, ϑ, ω)`; the rotation is `R_z(φ) R_y(ϑ) R_z(ω)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    varphi: f64,
    vartheta: f64,
    omega: f64,
}

impl EulerAngles {
    /// Normalises into `φ, ω ∈ [0, 2π)`, `ϑ ∈ [0, π]` without changing the rotation.
    pub fn new(varphi: f64, vartheta: f64, omega: f64) -> Self {
        let mut t = vartheta.rem_euclid(2.0 * PI);
        let (mut p, mut o) = (varphi, omega);
        if t > PI {
            // R_y(-t) = R_z(π) R_y(t) R_z(-π)
            t = 2.0 * PI - t;
            p += PI;
            o -= PI;
        }
        EulerAngles { varphi: wrap_angle(p), vartheta: t, omega: wrap_angle(o) }
    }

    pub fn identity() -> Self {
        EulerAngles { varphi: 0.0, vartheta: 0.0, omega: 0.0 }
    }

    pub fn varphi(&self) -> f64 {
        self.varphi
    }

    pub fn vartheta(&self) -> f64 {
        self.vartheta
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Angles of the inverse rotation.
    pub fn inverse(&self) -> Self {
        EulerAngles::new(PI - self.omega, self.vartheta, PI - self.varphi)
    }
}

/// Proper rotation matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix([[f64; 3]; 3]);

impl RotationMatrix {
    pub const IDENTITY: RotationMatrix = RotationMatrix([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    /// Accepts `m` if it is orthogonal with determinant +1 to within `1e-10`.
    pub fn new(m: [[f64; 3]; 3]) -> Result<Self> {
        let r = RotationMatrix(m);
        let err = r.orthogonality_error();
        let det = r.det();
        if !(err <= 1e-10) || !((det - 1.0).abs() <= 1e-10) {
            return Err(Error::Constraint(format!(
                "not a proper rotation (orthogonality error {err:e}, det {det})"
            )));
        }
        Ok(r)
    }

    pub fn from_columns(c0: &Vec3, c1: &Vec3, c2: &Vec3) -> Result<Self> {
        Self::new([[c0[0], c1[0], c2[0]], [c0[1], c1[1], c2[1]], [c0[2], c1[2], c2[2]]])
    }

    pub(crate) fn from_rows_unchecked(m: [[f64; 3]; 3]) -> Self {
        RotationMatrix(m)
    }

    pub fn rows(&self) -> &[[f64; 3]; 3] {
        &self.0
    }

    /// 1-based entry `R_{ab}`.
    pub fn entry(&self, a: usize, b: usize) -> f64 {
        self.0[a - 1][b - 1]
    }

    pub fn column(&self, j: usize) -> Vec3 {
        [self.0[0][j], self.0[1][j], self.0[2][j]]
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    /// `Rᵀ v`.
    pub fn apply_inverse(&self, v: &Vec3) -> Vec3 {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[1][0] * v[1] + m[2][0] * v[2],
            m[0][1] * v[0] + m[1][1] * v[1] + m[2][1] * v[2],
            m[0][2] * v[0] + m[1][2] * v[1] + m[2][2] * v[2],
        ]
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        RotationMatrix([[m[0][0], m[1][0], m[2][0]], [m[0][1], m[1][1], m[2][1]], [m[0][2], m[1][2], m[2][2]]])
    }

    pub fn mul(&self, other: &RotationMatrix) -> Self {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        RotationMatrix(out)
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// `max |RᵀR − I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let p = self.transpose().mul(self);
        let mut e: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                e = e.max((p.0[i][j] - want).abs());
            }
        }
        e
    }

    pub fn max_abs_diff(&self, other: &RotationMatrix) -> f64 {
        let mut e: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                e = e.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        e
    }
}

fn rz(a: f64) -> RotationMatrix {
    let (s, c) = a.sin_cos();
    RotationMatrix([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
}

fn ry(a: f64) -> RotationMatrix {
    let (s, c) = a.sin_cos();
    RotationMatrix([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])
}

/// `R = R_z(φ) R_y(ϑ) R_z(ω)`.
pub fn rotation_matrix(angles: &EulerAngles) -> RotationMatrix {
    rz(angles.varphi).mul(&ry(angles.vartheta)).mul(&rz(angles.omega))
}

/// Inverse of [`rotation_matrix`].
///
/// At the gimbal poles `R₃₃ = ±1` only `φ ± ω` is determined; `ω = 0` is
/// returned there.
pub fn euler_from_rotation(r: &RotationMatrix) -> Result<EulerAngles> {
    if !(r.orthogonality_error() <= 1e-10) || !((r.det() - 1.0).abs() <= 1e-10) {
        return Err(Error::Constraint("euler_from_rotation needs a proper rotation".into()));
    }
    let e = |a, b| r.entry(a, b);
    let s = e(1, 3).hypot(e(2, 3));
    if s < 1e-15 {
        // R = R_z(φ ± ω) diag(1, ±1, ±1) form
        return Ok(if e(3, 3) > 0.0 {
            EulerAngles::new(e(2, 1).atan2(e(1, 1)), 0.0, 0.0)
        } else {
            EulerAngles::new((-e(2, 1)).atan2(-e(1, 1)), PI, 0.0)
        });
    }
    let vartheta = s.atan2(e(3, 3));
    let varphi = e(2, 3).atan2(e(1, 3));
    let omega = e(3, 2).atan2(-e(3, 1));
    Ok(EulerAngles::new(varphi, vartheta, omega))
}
