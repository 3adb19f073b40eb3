//! One- and two-qubit states: construction, Bloch decomposition, spectra,
//! partial traces and entropies.
//!
//! Conventions: σ₁ = X, σ₂ = Y, σ₃ = Z, and the two-qubit computational
//! basis is ordered |00⟩, |01⟩, |10⟩, |11⟩ with qubit A as the leading
//! tensor factor.

use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    eigenvalues_hermitian2, eigenvalues_jacobi, kron, CMat, Mat2, Mat4, Real3, C64, C_I, C_ONE,
    C_ZERO,
};

/// Largest tolerated entry of `M − M†` for a state.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Largest tolerated deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted as non-negative. Boundary states of the
/// tetrahedron are exactly rank deficient and must pass.
pub const PSD_TOL: f64 = 1e-10;

/// Pauli matrix by index: 0 is the identity, 1..=3 are X, Y, Z.
pub fn pauli(index: usize) -> Mat2 {
    match index {
        0 => Mat2::identity(),
        1 => CMat([[C_ZERO, C_ONE], [C_ONE, C_ZERO]]),
        2 => CMat([[C_ZERO, -C_I], [C_I, C_ZERO]]),
        3 => CMat([[C_ONE, C_ZERO], [C_ZERO, -C_ONE]]),
        _ => panic!("Pauli index {index} out of range"),
    }
}

/// `σ_μ ⊗ σ_ν` for μ, ν ∈ 0..4.
static PAULI_PRODUCTS: LazyLock<[[Mat4; 4]; 4]> = LazyLock::new(|| {
    let mut out = [[Mat4::zeros(); 4]; 4];
    for (mu, row) in out.iter_mut().enumerate() {
        for (nu, m) in row.iter_mut().enumerate() {
            *m = kron(&pauli(mu), &pauli(nu));
        }
    }
    out
});

pub fn pauli_product(mu: usize, nu: usize) -> &'static Mat4 {
    &PAULI_PRODUCTS[mu][nu]
}

/// Two-qubit density operator.
///
/// Values built through [`DensityMatrix::new`] are validated. Values built
/// from Bloch data through [`from_bloch`] are Hermitian with unit trace by
/// construction but may fail positivity; use [`DensityMatrix::is_physical`]
/// or the family constructors in [`crate::statefam`], which check it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(Mat4);

impl DensityMatrix {
    pub fn new(m: Mat4) -> Result<Self> {
        validate_state(&m)?;
        Ok(DensityMatrix(m))
    }

    /// Wraps a matrix known to be Hermitian with unit trace.
    pub(crate) fn from_trusted(m: Mat4) -> Self {
        DensityMatrix(m)
    }

    /// Projector onto a (not necessarily normalized) pure state.
    pub fn from_pure(psi: [C64; 4]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm <= 0.0 {
            return Err(Error::Domain("zero state vector".into()));
        }
        let mut m = Mat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = psi[i] * psi[j].conj() / norm;
            }
        }
        Ok(DensityMatrix(m))
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(Mat4::identity().scale_real(0.25))
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        eigenvalues_jacobi(&self.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[3]
    }

    pub fn is_physical(&self) -> bool {
        self.min_eigenvalue() >= -PSD_TOL
    }

    /// Returns `self` if it is positive semidefinite within [`PSD_TOL`].
    pub fn require_physical(self) -> Result<Self> {
        let min_eigenvalue = self.min_eigenvalue();
        if min_eigenvalue < -PSD_TOL {
            Err(Error::NotPositive { min_eigenvalue })
        } else {
            Ok(self)
        }
    }

    /// Convex combination `q·self + (1 − q)·other`.
    pub fn mix(&self, other: &DensityMatrix, q: f64) -> DensityMatrix {
        DensityMatrix(self.0.scale_real(q) + other.0.scale_real(1.0 - q))
    }

    /// `U ρ U†` for a 4×4 unitary `U`.
    pub fn conjugated(&self, u: &Mat4) -> DensityMatrix {
        DensityMatrix(self.0.conjugate_by(u))
    }
}

/// Single-qubit density operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitState(Mat2);

impl QubitState {
    pub fn new(m: Mat2) -> Result<Self> {
        validate_state(&m)?;
        Ok(QubitState(m))
    }

    pub(crate) fn from_trusted(m: Mat2) -> Self {
        QubitState(m)
    }

    pub fn maximally_mixed() -> Self {
        QubitState(Mat2::identity().scale_real(0.5))
    }

    /// `(I + n·σ)/2`. Positivity requires `|n| ≤ 1`.
    pub fn from_bloch_vector(n: [f64; 3]) -> Result<Self> {
        let len = crate::linalg::norm3(&n);
        if len > 1.0 + PSD_TOL {
            return Err(Error::NotPositive { min_eigenvalue: 0.5 * (1.0 - len) });
        }
        Ok(QubitState(qubit_matrix(n)))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn bloch_vector(&self) -> [f64; 3] {
        [1, 2, 3].map(|k| self.0.trace_product(&pauli(k)).re)
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        eigenvalues_hermitian2(&self.0)
    }
}

pub(crate) fn qubit_matrix(n: [f64; 3]) -> Mat2 {
    CMat([
        [C64::new(0.5 * (1.0 + n[2]), 0.0), C64::new(0.5 * n[0], -0.5 * n[1])],
        [C64::new(0.5 * n[0], 0.5 * n[1]), C64::new(0.5 * (1.0 - n[2]), 0.0)],
    ])
}

fn validate_state<const N: usize>(m: &CMat<N>) -> Result<()> {
    let deviation = m.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let trace = m.trace();
    if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
        return Err(Error::NotNormalized { trace: trace.re });
    }
    if !psd_check(m, PSD_TOL)? {
        return Err(Error::NotPositive { min_eigenvalue: eigenvalues_jacobi(m)[N - 1] });
    }
    Ok(())
}

/// Local Bloch vectors and correlation matrix of a two-qubit operator:
/// `ρ = ¼(I + r·σ⊗I + I⊗s·σ + Σ t_ij σ_i⊗σ_j)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BlochRep {
    pub r: [f64; 3],
    pub s: [f64; 3],
    pub t: Real3,
}

impl BlochRep {
    pub fn new(r: [f64; 3], s: [f64; 3], t: Real3) -> Self {
        BlochRep { r, s, t }
    }

    /// Diagonal correlation matrix `T = diag(v)`.
    pub fn diagonal(r: [f64; 3], s: [f64; 3], v: [f64; 3]) -> Self {
        BlochRep { r, s, t: crate::linalg::diag3(v) }
    }

    /// The 15 real parameters `(r, s, T row-major)`.
    pub fn to_params(&self) -> [f64; 15] {
        let mut out = [0.0; 15];
        out[..3].copy_from_slice(&self.r);
        out[3..6].copy_from_slice(&self.s);
        for i in 0..3 {
            out[6 + 3 * i..9 + 3 * i].copy_from_slice(&self.t[i]);
        }
        out
    }

    pub fn from_params(p: &[f64; 15]) -> Self {
        let mut rep = BlochRep::default();
        rep.r.copy_from_slice(&p[..3]);
        rep.s.copy_from_slice(&p[3..6]);
        for i in 0..3 {
            rep.t[i].copy_from_slice(&p[6 + 3 * i..9 + 3 * i]);
        }
        rep
    }

    /// Bloch data of `(U_A ⊗ U_B) ρ (U_A ⊗ U_B)†` given the SO(3) images
    /// `ra`, `rb` of the two factors: `r ↦ R_A r`, `s ↦ R_B s`,
    /// `T ↦ R_A T R_Bᵀ`.
    pub fn rotated(&self, ra: &Real3, rb: &Real3) -> BlochRep {
        use crate::linalg::{mat3_mul, mat3_transpose, mat3_vec};
        BlochRep {
            r: mat3_vec(ra, &self.r),
            s: mat3_vec(rb, &self.s),
            t: mat3_mul(&mat3_mul(ra, &self.t), &mat3_transpose(rb)),
        }
    }

    pub fn max_abs_diff(&self, other: &BlochRep) -> f64 {
        self.to_params()
            .iter()
            .zip(other.to_params().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Builds `ρ` from Bloch data. Hermitian with unit trace; positivity is not
/// checked.
pub fn from_bloch(rep: &BlochRep) -> DensityMatrix {
    let mut m = Mat4::identity();
    for i in 0..3 {
        m = m + pauli_product(i + 1, 0).scale_real(rep.r[i]);
        m = m + pauli_product(0, i + 1).scale_real(rep.s[i]);
        for j in 0..3 {
            if rep.t[i][j] != 0.0 {
                m = m + pauli_product(i + 1, j + 1).scale_real(rep.t[i][j]);
            }
        }
    }
    DensityMatrix::from_trusted(m.scale_real(0.25))
}

/// `r_i = tr(ρ σ_i⊗I)`, `s_j = tr(ρ I⊗σ_j)`, `t_ij = tr(ρ σ_i⊗σ_j)`.
pub fn to_bloch(rho: &DensityMatrix) -> BlochRep {
    let m = rho.matrix();
    let mut rep = BlochRep::default();
    for i in 0..3 {
        rep.r[i] = m.trace_product(pauli_product(i + 1, 0)).re;
        rep.s[i] = m.trace_product(pauli_product(0, i + 1)).re;
        for j in 0..3 {
            rep.t[i][j] = m.trace_product(pauli_product(i + 1, j + 1)).re;
        }
    }
    rep
}

/// True iff the smallest eigenvalue of the Hermitian matrix is `≥ −tol`.
pub fn psd_check<const N: usize>(m: &CMat<N>, tol: f64) -> Result<bool> {
    let eig = hermitian_eigenvalues(m)?;
    Ok(eig[N - 1] >= -tol)
}

/// Eigenvalues of a Hermitian matrix in descending order: closed form for
/// 2×2, Jacobi otherwise.
pub fn hermitian_eigenvalues<const N: usize>(m: &CMat<N>) -> Result<[f64; N]> {
    let deviation = m.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    if N == 2 {
        let e = eigenvalues_hermitian2(&CMat([[m.0[0][0], m.0[0][1]], [m.0[1][0], m.0[1][1]]]));
        let mut out = [0.0; N];
        out[0] = e[0];
        out[1] = e[1];
        return Ok(out);
    }
    Ok(eigenvalues_jacobi(m))
}

/// `tr_A` of an arbitrary two-qubit operator.
pub fn partial_trace_a_op(m: &Mat4) -> Mat2 {
    let mut out = Mat2::zeros();
    for b in 0..2 {
        for c in 0..2 {
            out.0[b][c] = m.0[b][c] + m.0[2 + b][2 + c];
        }
    }
    out
}

/// Reduced state of qubit B.
pub fn partial_trace_a(rho: &DensityMatrix) -> QubitState {
    QubitState::from_trusted(partial_trace_a_op(rho.matrix()))
}

/// States with a real spectrum, for entropy evaluation.
pub trait Spectrum {
    fn spectrum(&self) -> Vec<f64>;
}

impl Spectrum for QubitState {
    fn spectrum(&self) -> Vec<f64> {
        self.eigenvalues().to_vec()
    }
}

impl Spectrum for DensityMatrix {
    fn spectrum(&self) -> Vec<f64> {
        self.eigenvalues().to_vec()
    }
}

/// von Neumann entropy in bits. Eigenvalues in `[−PSD_TOL, 0)` count as 0.
pub fn von_neumann_entropy<S: Spectrum>(state: &S) -> Result<f64> {
    let mut h = 0.0;
    for lambda in state.spectrum() {
        if lambda < -PSD_TOL {
            return Err(Error::NotPositive { min_eigenvalue: lambda });
        }
        if lambda > 0.0 {
            h -= lambda * lambda.log2();
        }
    }
    Ok(h.max(0.0))
}

/// Binary Shannon entropy in bits; `p` is clamped from `[−1e-12, 1 + 1e-12]`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&p) || p.is_nan() {
        return Err(Error::Domain(format!("binary entropy argument {p} outside [0, 1]")));
    }
    Ok(h2(p))
}

/// Unchecked binary entropy, clamping into `[0, 1]`.
#[inline]
pub(crate) fn h2(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    let q = 1.0 - p;
    let mut h = 0.0;
    if p > 0.0 {
        h -= p * p.log2();
    }
    if q > 0.0 {
        h -= q * q.log2();
    }
    h
}

/// Standard two-qubit Bell states.
pub mod bell {
    use super::*;

    const R: f64 = std::f64::consts::FRAC_1_SQRT_2;

    /// (|00⟩ + |11⟩)/√2
    pub fn phi_plus() -> DensityMatrix {
        DensityMatrix::from_pure([C64::new(R, 0.0), C_ZERO, C_ZERO, C64::new(R, 0.0)]).unwrap()
    }

    /// (|00⟩ − |11⟩)/√2
    pub fn phi_minus() -> DensityMatrix {
        DensityMatrix::from_pure([C64::new(R, 0.0), C_ZERO, C_ZERO, C64::new(-R, 0.0)]).unwrap()
    }

    /// (|01⟩ + |10⟩)/√2
    pub fn psi_plus() -> DensityMatrix {
        DensityMatrix::from_pure([C_ZERO, C64::new(R, 0.0), C64::new(R, 0.0), C_ZERO]).unwrap()
    }

    /// (|01⟩ − |10⟩)/√2, the singlet.
    pub fn psi_minus() -> DensityMatrix {
        DensityMatrix::from_pure([C_ZERO, C64::new(R, 0.0), C64::new(-R, 0.0), C_ZERO]).unwrap()
    }
}
