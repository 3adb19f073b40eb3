//! Fixed-size dense complex matrices and the small eigensolvers used
//! throughout the crate.
//!
//! Everything here is sized for one and two qubits. The 4×4 Hermitian
//! eigensolver is a cyclic complex Jacobi iteration; 2×2 Hermitian and 3×3
//! real-symmetric spectra use closed forms.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

pub type C64 = Complex64;

pub(crate) const C_ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const C_ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const C_I: C64 = C64::new(0.0, 1.0);

/// Off-diagonal Frobenius norm at which the Jacobi sweeps stop.
pub const JACOBI_OFF_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;

/// Square complex matrix of order `N`, stored row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat<const N: usize>(pub [[C64; N]; N]);

pub type Mat2 = CMat<2>;
pub type Mat4 = CMat<4>;

/// Real 3×3 matrix, row-major.
pub type Real3 = [[f64; 3]; 3];

impl<const N: usize> Default for CMat<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> CMat<N> {
    pub fn zeros() -> Self {
        CMat([[C_ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = C_ONE;
        }
        m
    }

    pub fn from_real_diagonal(d: [f64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = C64::new(d[i], 0.0);
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[i][j]
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                out.0[j][i] = self.0[i][j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn scale(&self, k: C64) -> Self {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|z| *z *= k);
        out
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(C64::new(k, 0.0))
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        *u * *self * u.adjoint()
    }

    /// Largest entry magnitude of `self − self†`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..N {
            for j in i..N {
                worst = worst.max((self.0[i][j] - self.0[j][i].conj()).norm());
            }
        }
        worst
    }

    /// Largest entry magnitude of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        let mut acc = C_ZERO;
        for i in 0..N {
            for k in 0..N {
                acc += self.0[i][k] * other.0[k][i];
            }
        }
        acc
    }

    /// Frobenius norm of the strictly off-diagonal part.
    pub fn off_diagonal_norm(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..N {
            for j in 0..N {
                if i != j {
                    acc += self.0[i][j].norm_sqr();
                }
            }
        }
        acc.sqrt()
    }
}

impl<const N: usize> Add for CMat<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..N {
            for j in 0..N {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

impl<const N: usize> Sub for CMat<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..N {
            for j in 0..N {
                out.0[i][j] -= rhs.0[i][j];
            }
        }
        out
    }
}

impl<const N: usize> Mul for CMat<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == C_ZERO {
                    continue;
                }
                for j in 0..N {
                    out.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        out
    }
}

/// Kronecker product `a ⊗ b`, with qubit A as the most significant index.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    out
}

/// Determinant of a 2×2 complex matrix.
pub fn det2(m: &Mat2) -> C64 {
    m.0[0][0] * m.0[1][1] - m.0[0][1] * m.0[1][0]
}

/// Eigenvalues of a 2×2 Hermitian matrix, descending.
pub fn eigenvalues_hermitian2(m: &Mat2) -> [f64; 2] {
    let a = m.0[0][0].re;
    let d = m.0[1][1].re;
    let b = m.0[0][1];
    let mean = 0.5 * (a + d);
    let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [mean + half_gap, mean - half_gap]
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations,
/// returned in descending order.
pub fn eigenvalues_jacobi<const N: usize>(m: &CMat<N>) -> [f64; N] {
    let mut a = *m;
    // Symmetrize so rounding in the input cannot stall convergence.
    for i in 0..N {
        a.0[i][i] = C64::new(a.0[i][i].re, 0.0);
        for j in (i + 1)..N {
            let avg = 0.5 * (a.0[i][j] + a.0[j][i].conj());
            a.0[i][j] = avg;
            a.0[j][i] = avg.conj();
        }
    }
    let scale = a.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1.0);
    for _ in 0..JACOBI_MAX_SWEEPS {
        if a.off_diagonal_norm() < JACOBI_OFF_TOL * scale {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                jacobi_rotate(&mut a, p, q);
            }
        }
    }
    let mut eig = [0.0; N];
    for (i, e) in eig.iter_mut().enumerate() {
        *e = a.0[i][i].re;
    }
    eig.sort_by(|x, y| y.total_cmp(x));
    eig
}

/// One two-sided rotation `A ← G† A G` annihilating `A[p][q]`.
fn jacobi_rotate<const N: usize>(a: &mut CMat<N>, p: usize, q: usize) {
    let apq = a.0[p][q];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    // Phase the (p, q) element real, then apply a real Jacobi rotation.
    let phase = apq / mag;
    let app = a.0[p][p].re;
    let aqq = a.0[q][q].re;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // G = diag(1, conj(phase)) · [[c, s], [-s, c]] on the (p, q) block.
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = phase.conj() * (-s);
    let g_qq = phase.conj() * c;
    for k in 0..N {
        let akp = a.0[k][p];
        let akq = a.0[k][q];
        a.0[k][p] = akp * g_pp + akq * g_qp;
        a.0[k][q] = akp * g_pq + akq * g_qq;
    }
    for k in 0..N {
        let apk = a.0[p][k];
        let aqk = a.0[q][k];
        a.0[p][k] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a.0[q][k] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a.0[p][q] = C_ZERO;
    a.0[q][p] = C_ZERO;
    a.0[p][p] = C64::new(a.0[p][p].re, 0.0);
    a.0[q][q] = C64::new(a.0[q][q].re, 0.0);
}

/// Eigenvalues of a real symmetric 3×3 matrix in descending order.
///
/// Cyclic Jacobi rather than the trigonometric closed form: the latter loses
/// half the digits when two eigenvalues nearly coincide, which is common for
/// correlation matrices.
pub fn eigenvalues_symmetric3(m: &Real3) -> [f64; 3] {
    let mut a = *m;
    let frob2: f64 = a.iter().flatten().map(|x| x * x).sum();
    for _ in 0..32 {
        let off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        if off <= 1e-36 * frob2 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q] == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
            let c = 1.0 / t.hypot(1.0);
            let s = t * c;
            for row in a.iter_mut() {
                let (x, y) = (row[p], row[q]);
                row[p] = c * x - s * y;
                row[q] = s * x + c * y;
            }
            for k in 0..3 {
                let (x, y) = (a[p][k], a[q][k]);
                a[p][k] = c * x - s * y;
                a[q][k] = s * x + c * y;
            }
            a[p][q] = 0.0;
            a[q][p] = 0.0;
        }
    }
    let mut eig = [a[0][0], a[1][1], a[2][2]];
    eig.sort_by(|x, y| y.total_cmp(x));
    eig
}

pub fn mat3_mul(a: &Real3, b: &Real3) -> Real3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat3_transpose(a: &Real3) -> Real3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[j][i] = a[i][j];
        }
    }
    out
}

pub fn mat3_vec(a: &Real3, v: &[f64; 3]) -> [f64; 3] {
    [
        a[0][0] * v[0] + a[0][1] * v[1] + a[0][2] * v[2],
        a[1][0] * v[0] + a[1][1] * v[1] + a[1][2] * v[2],
        a[2][0] * v[0] + a[2][1] * v[1] + a[2][2] * v[2],
    ]
}

pub fn diag3(v: [f64; 3]) -> Real3 {
    [[v[0], 0.0, 0.0], [0.0, v[1], 0.0], [0.0, 0.0, v[2]]]
}

pub fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn jacobi_matches_diagonal_input() {
        let m = Mat4::from_real_diagonal([0.1, 0.4, 0.2, 0.3]);
        assert_eq!(eigenvalues_jacobi(&m), [0.4, 0.3, 0.2, 0.1]);
    }

    #[test]
    fn jacobi_on_complex_hermitian_preserves_trace_and_frobenius() {
        let mut m = Mat4::zeros();
        let vals = [
            (0, 0, 0.3, 0.0),
            (0, 1, 0.1, -0.2),
            (0, 3, -0.05, 0.07),
            (1, 1, 0.2, 0.0),
            (1, 2, 0.04, 0.11),
            (2, 2, 0.25, 0.0),
            (2, 3, -0.09, -0.01),
            (3, 3, 0.25, 0.0),
        ];
        for &(i, j, re, im) in &vals {
            m.0[i][j] = C64::new(re, im);
            m.0[j][i] = C64::new(re, -im);
        }
        let eig = eigenvalues_jacobi(&m);
        assert_abs_diff_eq!(eig.iter().sum::<f64>(), 1.0, epsilon = 1e-13);
        let frob: f64 = m.0.iter().flatten().map(|z| z.norm_sqr()).sum();
        assert_abs_diff_eq!(eig.iter().map(|e| e * e).sum::<f64>(), frob, epsilon = 1e-13);
        // M − λI must be singular: its smallest squared singular value vanishes
        // up to rounding.
        for &e in &eig {
            let shifted = m - Mat4::identity().scale_real(e);
            let min_sv = eigenvalues_jacobi(&(shifted.adjoint() * shifted))[3];
            assert!(min_sv.abs() < 1e-15, "eigenvalue {e} residual {min_sv}");
        }
    }

    #[test]
    fn symmetric3_accurate_near_degeneracy() {
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let r = mat3_mul(&[[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]], &[[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]]);
        let d = [0.5, 0.5 - 1e-9, 0.2];
        let m = mat3_mul(&mat3_mul(&r, &diag3(d)), &mat3_transpose(&r));
        for (x, y) in eigenvalues_symmetric3(&m).iter().zip(d) {
            assert!((x - y).abs() < 1e-15, "{x} vs {y}");
        }
    }

    #[test]
    fn symmetric3_agrees_with_complex_jacobi() {
        let m = [[0.9, 0.2, -0.1], [0.2, 0.5, 0.3], [-0.1, 0.3, 0.1]];
        let mut c = CMat::<3>::zeros();
        for i in 0..3 {
            for j in 0..3 {
                c.0[i][j] = C64::new(m[i][j], 0.0);
            }
        }
        let a = eigenvalues_symmetric3(&m);
        let b = eigenvalues_jacobi(&c);
        for k in 0..3 {
            assert_abs_diff_eq!(a[k], b[k], epsilon = 1e-12);
        }
    }

    #[test]
    fn hermitian2_closed_form() {
        let mut m = Mat2::zeros();
        m.0[0][0] = C64::new(0.7, 0.0);
        m.0[1][1] = C64::new(0.3, 0.0);
        m.0[0][1] = C64::new(0.1, 0.2);
        m.0[1][0] = C64::new(0.1, -0.2);
        let e = eigenvalues_hermitian2(&m);
        let j = eigenvalues_jacobi(&m);
        assert_abs_diff_eq!(e[0], j[0], epsilon = 1e-14);
        assert_abs_diff_eq!(e[1], j[1], epsilon = 1e-14);
    }

    #[test]
    fn kron_orders_qubit_a_first() {
        let mut x = Mat2::zeros();
        x.0[0][1] = C_ONE;
        x.0[1][0] = C_ONE;
        let k = kron(&x, &Mat2::identity());
        assert_eq!(k.get(0, 2), C_ONE);
        assert_eq!(k.get(1, 3), C_ONE);
        assert_eq!(k.get(0, 1), C_ZERO);
    }
}
