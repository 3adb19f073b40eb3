//! Product unitaries `U_A ⊗ U_B` and their action on states and Bloch data.

use crate::error::{Error, Result};
use crate::linalg::{det2, kron, CMat, Mat2, Mat4, Real3, C64};
use crate::qstate::{from_bloch, pauli, to_bloch, BlochRep, DensityMatrix};

/// Largest tolerated entry of `U†U − I`.
pub const UNITARY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalUnitary {
    ua: Mat2,
    ub: Mat2,
}

impl LocalUnitary {
    /// Validates both factors and rescales each to unit determinant.
    pub fn new(ua: Mat2, ub: Mat2) -> Result<Self> {
        Ok(LocalUnitary { ua: to_special(ua)?, ub: to_special(ub)? })
    }

    pub fn identity() -> Self {
        LocalUnitary { ua: Mat2::identity(), ub: Mat2::identity() }
    }

    pub fn ua(&self) -> &Mat2 {
        &self.ua
    }

    pub fn ub(&self) -> &Mat2 {
        &self.ub
    }

    pub fn kron(&self) -> Mat4 {
        kron(&self.ua, &self.ub)
    }

    /// `(U_A ⊗ U_B) ρ (U_A ⊗ U_B)†`.
    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        rho.conjugated(&self.kron())
    }

    /// SO(3) images of the two factors.
    pub fn rotations(&self) -> (Real3, Real3) {
        (so3(&self.ua), so3(&self.ub))
    }

    /// Bloch data of the transformed state, without forming 4×4 matrices.
    pub fn apply_bloch(&self, rep: &BlochRep) -> BlochRep {
        let (ra, rb) = self.rotations();
        rep.rotated(&ra, &rb)
    }

    /// Largest unitarity residual of the two factors.
    pub fn residual(&self) -> f64 {
        unitarity_residual(&self.ua).max(unitarity_residual(&self.ub))
    }

    pub(crate) fn from_trusted(ua: Mat2, ub: Mat2) -> Self {
        LocalUnitary { ua, ub }
    }
}

pub fn unitarity_residual(u: &Mat2) -> f64 {
    (u.adjoint() * *u).max_abs_diff(&Mat2::identity())
}

fn to_special(u: Mat2) -> Result<Mat2> {
    let residual = unitarity_residual(&u);
    if residual > UNITARY_TOL {
        return Err(Error::NotUnitary { residual });
    }
    Ok(u.scale(det2(&u).sqrt().inv()))
}

/// `R_ij = ½ tr(σ_i U σ_j U†)`, so that `U (n·σ) U† = (R n)·σ`.
pub fn so3(u: &Mat2) -> Real3 {
    let ud = u.adjoint();
    let mut out = [[0.0; 3]; 3];
    for (j, col) in (1..=3).map(|j| *u * pauli(j) * ud).enumerate() {
        for (i, row) in out.iter_mut().enumerate() {
            row[j] = 0.5 * pauli(i + 1).trace_product(&col).re;
        }
    }
    out
}

/// `exp(−i θ σ_k / 2)`.
pub fn axis_rotation(k: usize, theta: f64) -> Mat2 {
    let (s, c) = (0.5 * theta).sin_cos();
    let p = pauli(k);
    Mat2::identity().scale_real(c) + p.scale(C64::new(0.0, -s))
}

/// Transformed state via the Bloch route; exposed for cross-checking
/// [`LocalUnitary::apply`].
pub fn apply_via_bloch(u: &LocalUnitary, rho: &DensityMatrix) -> DensityMatrix {
    from_bloch(&u.apply_bloch(&to_bloch(rho)))
}

impl Default for LocalUnitary {
    fn default() -> Self {
        Self::identity()
    }
}

/// Complex 2×2 from row-major `(re, im)` pairs.
pub fn mat2_from_pairs(p: [(f64, f64); 4]) -> Mat2 {
    CMat([
        [C64::new(p[0].0, p[0].1), C64::new(p[1].0, p[1].1)],
        [C64::new(p[2].0, p[2].1), C64::new(p[3].0, p[3].1)],
    ])
}
