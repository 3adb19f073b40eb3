//! State families: Bell-diagonal and diagonal-T states, tetrahedron edges,
//! the line AO′, the symmetric family along AO, the mixture ρ₁(x), and random
//! states and local unitaries.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{det2, diag3, CMat, Mat2, Mat4, Real3, C64};
use crate::measures::PauliAxis;
use crate::qstate::{bell, from_bloch, BlochRep, DensityMatrix};
use crate::unitary::LocalUnitary;

/// Slack on the tetrahedron inequalities (eigenvalue tolerance × 4).
pub const TETRA_TOL: f64 = 4e-10;
/// Slack on the closed-form parameter bounds of the edge and line families.
pub const BOUND_TOL: f64 = 1e-12;

pub const VERTEX_A: [f64; 3] = [-1.0, -1.0, -1.0];
pub const VERTEX_B: [f64; 3] = [1.0, -1.0, 1.0];
pub const VERTEX_C: [f64; 3] = [-1.0, 1.0, 1.0];
pub const VERTEX_D: [f64; 3] = [1.0, 1.0, -1.0];

/// Diagonal of the correlation matrix of a diagonal-T state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrVector(pub [f64; 3]);

impl CorrVector {
    pub fn new(v: [f64; 3]) -> Self {
        CorrVector(v)
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.0
    }

    pub fn diag(&self) -> Real3 {
        diag3(self.0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    /// Four times the eigenvalues of the Bell-diagonal state.
    pub fn tetrahedron_margins(&self) -> [f64; 4] {
        let [a, b, c] = self.0;
        [1.0 - a - b - c, 1.0 - a + b + c, 1.0 + a - b + c, 1.0 + a + b - c]
    }

    pub fn in_tetrahedron(&self) -> bool {
        self.tetrahedron_margins().iter().all(|&m| m >= -TETRA_TOL)
    }

    pub fn require_tetrahedron(&self) -> Result<()> {
        if self.in_tetrahedron() {
            Ok(())
        } else {
            Err(Error::OutsideTetrahedron { v: self.0 })
        }
    }

    /// Separable Bell-diagonal states: `Σ|v_i| ≤ 1`.
    pub fn in_octahedron(&self) -> bool {
        self.0.iter().map(|x| x.abs()).sum::<f64>() <= 1.0 + TETRA_TOL
    }
}

/// `¼(I + Σ v_i σ_i⊗σ_i)`.
pub fn bell_diagonal(v: &CorrVector) -> Result<DensityMatrix> {
    v.require_tetrahedron()?;
    Ok(from_bloch(&BlochRep::diagonal([0.0; 3], [0.0; 3], v.0)))
}

/// Diagonal-T state with local Bloch vectors `r`, `s`; fails unless PSD.
pub fn tilde_state(r: [f64; 3], s: [f64; 3], v: &CorrVector) -> Result<DensityMatrix> {
    from_bloch(&BlochRep::diagonal(r, s, v.0)).require_physical()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Edge {
    AB,
    AC,
    AD,
    CD,
    BD,
    BC,
}

impl Edge {
    pub const ALL: [Edge; 6] = [Edge::AB, Edge::AC, Edge::AD, Edge::CD, Edge::BD, Edge::BC];
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Edge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Edge::ALL
            .into_iter()
            .find(|e| e.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown edge '{s}'")))
    }
}

/// Positivity constraints for diagonal-T states on one tetrahedron edge.
///
/// Only component `free_axis` of `r` and `s` may be nonzero, with
/// `r_k = r_sign · s_k` and `s_k² ≤ 1 − v_b²`, `b = bound_axis`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeConstraint {
    pub edge: Edge,
    pub endpoints: ([f64; 3], [f64; 3]),
    pub free_axis: PauliAxis,
    pub r_sign: f64,
    pub bound_axis: PauliAxis,
}

impl EdgeConstraint {
    /// Point on the edge; `t ∈ [−1, 1]` runs from the first endpoint to the
    /// second.
    pub fn point(&self, t: f64) -> CorrVector {
        let (p, q) = self.endpoints;
        let w = 0.5 * (1.0 + t);
        CorrVector([0, 1, 2].map(|i| (1.0 - w) * p[i] + w * q[i]))
    }

    /// Largest admissible `s_k²` at `v`.
    pub fn bound(&self, v: &CorrVector) -> f64 {
        let x = v.0[self.bound_axis.slot()];
        1.0 - x * x
    }

    /// Local Bloch vectors for free component `s_k`.
    pub fn local_vectors(&self, sk: f64) -> ([f64; 3], [f64; 3]) {
        let mut r = [0.0; 3];
        let mut s = [0.0; 3];
        s[self.free_axis.slot()] = sk;
        r[self.free_axis.slot()] = self.r_sign * sk;
        (r, s)
    }

    /// Edge state at parameter `t` with free component `s_k`.
    pub fn state(&self, t: f64, sk: f64) -> Result<DensityMatrix> {
        if !(-1.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("edge parameter {t} outside [-1, 1]")));
        }
        let v = self.point(t);
        let bound = self.bound(&v);
        if sk * sk > bound + BOUND_TOL {
            return Err(Error::Unphysical(format!(
                "edge {}: s{}^2 = {} exceeds {}",
                self.edge,
                self.free_axis.index(),
                sk * sk,
                bound
            )));
        }
        let (r, s) = self.local_vectors(sk);
        tilde_state(r, s, &v)
    }
}

pub fn edge_constraints(edge: Edge) -> EdgeConstraint {
    let (endpoints, free, sign, bound) = match edge {
        Edge::AB => ((VERTEX_A, VERTEX_B), 2, -1.0, 1),
        Edge::AC => ((VERTEX_A, VERTEX_C), 1, -1.0, 3),
        Edge::AD => ((VERTEX_A, VERTEX_D), 3, -1.0, 2),
        Edge::CD => ((VERTEX_C, VERTEX_D), 2, 1.0, 1),
        Edge::BD => ((VERTEX_B, VERTEX_D), 1, 1.0, 3),
        Edge::BC => ((VERTEX_B, VERTEX_C), 3, 1.0, 2),
    };
    EdgeConstraint {
        edge,
        endpoints,
        free_axis: PauliAxis::new(free).unwrap(),
        r_sign: sign,
        bound_axis: PauliAxis::new(bound).unwrap(),
    }
}

/// Bloch data on the segment AO′: `v = (a0, a0, 1 + 2a0)`,
/// `r = (−s1, −s2, s3)`. Only the closed-form bounds are checked.
pub fn line_aoprime_rep(a0: f64, s: [f64; 3]) -> Result<BlochRep> {
    if !(-1.0..=0.0).contains(&a0) {
        return Err(Error::Domain(format!("a0 = {a0} outside [-1, 0]")));
    }
    let [s1, s2, s3] = s;
    let b1 = (1.0 + 0.5 * a0).min(0.5 * (1.0 - a0));
    let b12 = -4.0 * a0 * (1.0 + a0);
    if s3.abs() > 1.0 + a0 + BOUND_TOL
        || s1.abs() > b1 + BOUND_TOL
        || s1 * s1 + s2 * s2 > b12 + BOUND_TOL
    {
        return Err(Error::Unphysical(format!("line AO' bounds violated at a0 = {a0}, s = {s:?}")));
    }
    Ok(BlochRep::diagonal([-s1, -s2, s3], s, [a0, a0, 1.0 + 2.0 * a0]))
}

pub fn line_aoprime_state(a0: f64, s1: f64, s2: f64, s3: f64) -> Result<DensityMatrix> {
    from_bloch(&line_aoprime_rep(a0, [s1, s2, s3])?).require_physical()
}

/// Parameters of the family on the line AO with `v = (v0, v0, v0)` and
/// `s, r ∝ (1, w1, w0)` saturating the positivity conditions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricFamilyParams {
    pub v0: f64,
    pub w0: f64,
    pub w1: f64,
    pub sign_s: i8,
    pub sign_r: i8,
}

impl SymmetricFamilyParams {
    pub fn new(v0: f64, w0: f64, w1: f64) -> Self {
        SymmetricFamilyParams { v0, w0, w1, sign_s: 1, sign_r: 1 }
    }

    pub fn with_signs(mut self, sign_s: i8, sign_r: i8) -> Self {
        self.sign_s = sign_s;
        self.sign_r = sign_r;
        self
    }

    /// `(c1, c2)`; `|s1 + r1| = c1`, `|s1 − r1| = c2`.
    pub fn c1_c2(&self) -> (f64, f64) {
        let norm = 1.0 + self.w0 * self.w0 + self.w1 * self.w1;
        let v0 = self.v0;
        let c1 = (1.0 + v0) / norm.sqrt();
        let c2 = ((1.0 - 2.0 * v0 - 3.0 * v0 * v0).max(0.0) / norm).sqrt();
        (c1, c2)
    }
}

/// Bloch data of the symmetric family; positivity is not checked.
pub fn symmetric_family_rep(p: &SymmetricFamilyParams) -> Result<BlochRep> {
    if !(-1.0..=0.0).contains(&p.v0) {
        return Err(Error::Domain(format!("v0 = {} outside [-1, 0]", p.v0)));
    }
    if p.sign_s.abs() != 1 || p.sign_r.abs() != 1 {
        return Err(Error::Domain("family signs must be +1 or -1".into()));
    }
    let (c1, c2) = p.c1_c2();
    let s1 = f64::from(p.sign_s) * 0.5 * (c1 + c2);
    let r1 = f64::from(p.sign_r) * 0.5 * (c1 - c2);
    Ok(BlochRep::diagonal(
        [r1, p.w1 * r1, p.w0 * r1],
        [s1, p.w1 * s1, p.w0 * s1],
        [p.v0; 3],
    ))
}

pub fn symmetric_family_state(p: &SymmetricFamilyParams) -> Result<DensityMatrix> {
    from_bloch(&symmetric_family_rep(p)?).require_physical()
}

/// `x|Φ⁺⟩⟨Φ⁺| + (1 − x)|Ψ⁻⟩⟨Ψ⁻|`.
pub fn rho1(x: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("mixing weight {x} outside [0, 1]")));
    }
    Ok(bell::phi_plus().mix(&bell::psi_minus(), x))
}

pub fn singlet() -> DensityMatrix {
    bell::psi_minus()
}

pub fn phi_plus() -> DensityMatrix {
    bell::phi_plus()
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Uniform point of the tetrahedron (Dirichlet weights on the vertices).
pub fn tetrahedron_point<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let w: [f64; 4] = std::array::from_fn(|_| -(1.0 - rng.random::<f64>()).ln());
    let total: f64 = w.iter().sum();
    let verts = [VERTEX_A, VERTEX_B, VERTEX_C, VERTEX_D];
    [0, 1, 2].map(|i| (0..4).map(|k| w[k] / total * verts[k][i]).sum())
}

/// Uniform point of the unit ball.
pub fn ball_point<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let g: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let norm = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
    let len = rng.random::<f64>().cbrt();
    g.map(|x| len * x / norm)
}

/// Haar-random element of SU(2): orthonormalized complex-Gaussian columns,
/// rescaled to unit determinant.
pub fn haar_su2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let a = [complex_gaussian(rng), complex_gaussian(rng)];
    let b = [complex_gaussian(rng), complex_gaussian(rng)];
    let na = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt();
    let e0 = [a[0] / na, a[1] / na];
    let overlap = e0[0].conj() * b[0] + e0[1].conj() * b[1];
    let c = [b[0] - overlap * e0[0], b[1] - overlap * e0[1]];
    let nc = (c[0].norm_sqr() + c[1].norm_sqr()).sqrt();
    let e1 = [c[0] / nc, c[1] / nc];
    let u = CMat([[e0[0], e1[0]], [e0[1], e1[1]]]);
    u.scale(det2(&u).sqrt().inv())
}

pub fn haar_local_unitary<R: Rng + ?Sized>(rng: &mut R) -> LocalUnitary {
    let ua = haar_su2(rng);
    let ub = haar_su2(rng);
    LocalUnitary::from_trusted(ua, ub)
}

/// `G G† / tr(G G†)` for a 4 × `rank` complex-Gaussian `G`.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, rank: usize) -> Result<DensityMatrix> {
    if !(1..=4).contains(&rank) {
        return Err(Error::Domain(format!("rank {rank} not in 1..=4")));
    }
    let mut g = [[C64::new(0.0, 0.0); 4]; 4];
    for row in g.iter_mut() {
        for z in row.iter_mut().take(rank) {
            *z = complex_gaussian(rng);
        }
    }
    let mut m = Mat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            m.0[i][j] = (0..rank).map(|k| g[i][k] * g[j][k].conj()).sum();
        }
    }
    let tr = m.trace().re;
    let mut m = m.scale_real(1.0 / tr);
    // Exact Hermiticity, so validation never trips on rounding.
    for i in 0..4 {
        m.0[i][i].im = 0.0;
        for j in 0..i {
            m.0[i][j] = m.0[j][i].conj();
        }
    }
    Ok(DensityMatrix::from_trusted(m))
}
