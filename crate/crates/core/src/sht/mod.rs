//! Spherical-harmonic infrastructure.
//!
//! Conventions: `Y_ℓ^m(θ, φ) = N_ℓ^m P_ℓ^m(cos θ) e^{imφ}` with the
//! Condon–Shortley phase inside `P_ℓ^m`, orthonormal on the unit sphere.
//! Rotations are zyz, `R = R_z(φ) R_y(ϑ) R_z(ω)`.

mod coeffs;
mod harmonics;
mod rotation;
mod wigner;

pub use coeffs::{synthesize, synthesize_grid, CoeffTable};
pub use harmonics::{assoc_legendre, ylm, ylm_all, Direction};
pub(crate) use harmonics::{legendre_normalized_table, tri};
pub use rotation::{euler_from_rotation, rotation_matrix, EulerAngles, RotationMatrix};
pub use wigner::{rotate_coeffs, wigner_d, WignerPi2Table};

/// Alias matching the table constructor's role as an operation.
pub fn wigner_pi2_table(l_max: usize) -> WignerPi2Table {
    WignerPi2Table::new(l_max)
}
