//! Geometry of the correlation tetrahedron: the level surface `M = 1`, the
//! auxiliary polyhedron P, containment and line-intersection tests, and
//! critical parameters of the NAQC boundary.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::measures::CoherenceKind;
use crate::naqc::{naqc_edge_ab, naqc_from_bloch, threshold};
use crate::statefam::{symmetric_family_rep, CorrVector, SymmetricFamilyParams};

pub const THETA_MIN: f64 = PI;
pub const THETA_MAX: f64 = 1.5 * PI;
/// Default θ samples per boundary curve.
pub const DEFAULT_SURFACE_SAMPLES: usize = 10_000;

/// Cyclic assignment `(i, j, k)` of `(sin θ, cos θ, v_k)` to coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    B123,
    B231,
    B312,
}

impl Branch {
    pub const ALL: [Branch; 3] = [Branch::B123, Branch::B231, Branch::B312];

    /// Zero-based `(i, j, k)`.
    pub fn slots(self) -> (usize, usize, usize) {
        match self {
            Branch::B123 => (0, 1, 2),
            Branch::B231 => (1, 2, 0),
            Branch::B312 => (2, 0, 1),
        }
    }
}

/// A point of the patch of the surface `M = 1` next to vertex A.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelSurfacePatch {
    pub branch: Branch,
    pub theta: f64,
    pub vk: f64,
}

/// Admissible `v_k` at angle θ: `[max(sin θ, cos θ), 1 + sin θ + cos θ]`.
pub fn vk_interval(theta: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    (s.max(c), 1.0 + s + c)
}

pub fn surface_point(patch: &LevelSurfacePatch) -> Result<CorrVector> {
    const TOL: f64 = 1e-12;
    if !(THETA_MIN - TOL..=THETA_MAX + TOL).contains(&patch.theta) {
        return Err(Error::Domain(format!("theta = {} outside [pi, 1.5 pi]", patch.theta)));
    }
    let (lo, hi) = vk_interval(patch.theta);
    if patch.vk < lo - TOL || patch.vk > hi + TOL {
        return Err(Error::Domain(format!("v_k = {} outside [{lo}, {hi}]", patch.vk)));
    }
    let (i, j, k) = patch.branch.slots();
    let (s, c) = patch.theta.sin_cos();
    let mut v = [0.0; 3];
    v[i] = s;
    v[j] = c;
    v[k] = patch.vk;
    Ok(CorrVector(v))
}

fn theta_grid(n: usize) -> impl Iterator<Item = f64> {
    let n = n.max(2);
    (0..n).map(move |m| THETA_MIN + FRAC_PI_2 * m as f64 / (n - 1) as f64)
}

/// Points on the boundary of the patch next to A: for each branch, the seam
/// `v_k = max(sin θ, cos θ)` and the face curve `v_k = 1 + sin θ + cos θ`.
pub fn surface_boundary_points(n: usize) -> Vec<CorrVector> {
    let mut out = Vec::with_capacity(6 * n);
    for branch in Branch::ALL {
        for theta in theta_grid(n) {
            let (lo, hi) = vk_interval(theta);
            for vk in [lo, hi] {
                out.push(surface_point(&LevelSurfacePatch { branch, theta, vk }).unwrap());
            }
        }
    }
    out
}

/// Plane `n·v + 1 = 0`; `n·v + 1 ≥ 0` is the side containing the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plane {
    pub normal: [f64; 3],
}

impl Plane {
    pub fn eval(&self, v: &[f64; 3]) -> f64 {
        self.normal[0] * v[0] + self.normal[1] * v[1] + self.normal[2] * v[2] + 1.0
    }
}

/// Coefficients `(a, c)` of the facet `a v1 + a v2 + c v3 + 1 = 0` through
/// `(v0, v0, v0)`, `(−1, γ, γ)` and `(γ, −1, γ)`.
pub fn facet_plane(v0: f64, gamma: f64) -> Result<(f64, f64)> {
    if v0 == 0.0 || (1.0 + gamma) == 0.0 {
        return Err(Error::DegenerateFacet(format!("v0 = {v0}, gamma = {gamma}")));
    }
    let a = (v0 - gamma) / (v0 * (1.0 + gamma));
    let c = -1.0 / v0 - 2.0 * a;
    if !a.is_finite() || !c.is_finite() {
        return Err(Error::DegenerateFacet(format!("v0 = {v0}, gamma = {gamma}")));
    }
    Ok((a, c))
}

/// Polyhedron spanned by `(v0, v0, v0)`, the three permutations of
/// `(−1, γ, γ)`, and the point reflections of all four.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolyhedronP {
    pub v0: f64,
    pub gamma: f64,
    pub vertices: [[f64; 3]; 8],
}

impl PolyhedronP {
    pub fn new(v0: f64, gamma: f64) -> Self {
        let near = [
            [v0, v0, v0],
            [-1.0, gamma, gamma],
            [gamma, -1.0, gamma],
            [gamma, gamma, -1.0],
        ];
        let mut vertices = [[0.0; 3]; 8];
        for (m, p) in near.iter().enumerate() {
            vertices[m] = *p;
            vertices[m + 4] = p.map(|x| -x);
        }
        PolyhedronP { v0, gamma, vertices }
    }

    /// The three facets meeting at `(v0, v0, v0)` (the coefficient `c` sits on
    /// each coordinate in turn) and their point reflections.
    pub fn facets_near_a(&self) -> Result<Vec<Plane>> {
        let (a, c) = facet_plane(self.v0, self.gamma)?;
        let mut out = Vec::with_capacity(6);
        for k in 0..3 {
            let mut normal = [a; 3];
            normal[k] = c;
            out.push(Plane { normal });
        }
        let reflected: Vec<Plane> = out.iter().map(|p| Plane { normal: p.normal.map(|x| -x) }).collect();
        out.extend(reflected);
        Ok(out)
    }
}

/// Smallest facet value over the sampled patch boundary and its point
/// reflection, paired with the facet of matching orientation. Negative
/// values mean the boundary leaves P.
pub fn surface_facet_margin(v0: f64, gamma: f64, n_samples: usize) -> Result<f64> {
    let facets = PolyhedronP::new(v0, gamma).facets_near_a()?;
    let (near, far) = facets.split_at(3);
    let mut margin = f64::INFINITY;
    for p in surface_boundary_points(n_samples) {
        let v = p.as_array();
        let w = v.map(|x| -x);
        for plane in near {
            margin = margin.min(plane.eval(&v));
        }
        for plane in far {
            margin = margin.min(plane.eval(&w));
        }
    }
    Ok(margin)
}

/// True when the sampled boundary of the patch next to A lies on the origin
/// side of every facet of P through `(v0, v0, v0)`.
pub fn surface_inside_p(v0: f64, gamma: f64, n_samples: usize) -> Result<bool> {
    Ok(surface_facet_margin(v0, gamma, n_samples)? >= 0.0)
}

/// Whether `(1 + a0) sin θ + (b0 − a0) cos θ = a0 (1 + b0)` has a root with
/// θ ∈ [π, 3π/2].
pub fn fg_intersection_exists(a0: f64, b0: f64) -> bool {
    const TOL: f64 = 1e-12;
    let a = 1.0 + a0;
    let b = b0 - a0;
    let rhs = a0 * (1.0 + b0);
    let r = a.hypot(b);
    if r < TOL {
        return rhs.abs() < TOL;
    }
    let ratio = rhs / r;
    if ratio.abs() > 1.0 {
        return false;
    }
    // A sin θ + B cos θ = R sin(θ + φ).
    let phi = b.atan2(a);
    let base = ratio.asin();
    for root in [base - phi, PI - base - phi] {
        for turn in -2..=2 {
            let theta = root + 2.0 * PI * f64::from(turn);
            if (THETA_MIN - TOL..=THETA_MAX + TOL).contains(&theta) {
                return true;
            }
        }
    }
    false
}

/// The `a0 < 0` at which the line FG becomes tangent to the face curve of
/// the patch boundary, for given `b0`.
pub fn fg_tangent_a0(b0: f64) -> Result<f64> {
    let f = |a0: f64| a0 * a0 * (1.0 + b0).powi(2) - (1.0 + a0).powi(2) - (b0 - a0).powi(2);
    bisect(f, -1.0 + 1e-9, 0.0, 1e-15)
}

/// Maximum of the closed-form AB-edge NAQC over the free component `s2` at
/// fixed `v1`.
pub fn max_edge_ab(v1: f64, kind: CoherenceKind) -> f64 {
    let bound = (1.0 - v1 * v1).max(0.0).sqrt();
    let f = |s2: f64| naqc_edge_ab(v1, s2.clamp(-bound, bound), kind).unwrap_or(f64::NEG_INFINITY);
    let n = 2001;
    let (mut best_s, mut best) = (0.0, f64::NEG_INFINITY);
    for m in 0..n {
        let s2 = -bound + 2.0 * bound * m as f64 / (n - 1) as f64;
        let val = f(s2);
        if val > best {
            best = val;
            best_s = s2;
        }
    }
    let h = 2.0 * bound / (n - 1) as f64;
    let (x, fx) = golden_max(&f, (best_s - h).max(-bound), (best_s + h).min(bound), 1e-13);
    if fx > best {
        let _ = x;
        fx
    } else {
        best
    }
}

/// `|v1|` on edge AB where the best NAQC over `s2` reaches the threshold:
/// `√6 − 2` for l1.
pub fn critical_edge_b0(kind: CoherenceKind) -> Result<f64> {
    let cm = threshold(kind);
    bisect(|v1| max_edge_ab(v1, kind) - cm, 0.0, 1.0 - 1e-12, 1e-13)
}

/// Number of points used to check monotonicity of the bisection objective.
pub const MONOTONE_PROBES: usize = 33;

/// `v0` on the line AO at which the NAQC of the symmetric family with shape
/// `(w0, w1)` equals the threshold.
pub fn critical_v0(kind: CoherenceKind, w0: f64, w1: f64, tol: f64) -> Result<f64> {
    let cm = threshold(kind);
    let f = |v0: f64| -> f64 {
        let rep = symmetric_family_rep(&SymmetricFamilyParams::new(v0, w0, w1)).unwrap();
        naqc_from_bloch(&rep, kind) - cm
    };
    let (lo, hi) = (-0.999, -FRAC_1_SQRT_2);
    let mut prev = f(lo);
    for m in 1..MONOTONE_PROBES {
        let x = lo + (hi - lo) * m as f64 / (MONOTONE_PROBES - 1) as f64;
        let y = f(x);
        if y > prev + 1e-12 {
            return Err(Error::NonMonotone { at: x });
        }
        prev = y;
    }
    bisect(f, lo, hi, tol)
}

/// Root of `f` on `[lo, hi]` to within `tol`, requiring a sign change.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let (f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }
    let lo_positive = f_lo > 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section search for a maximum of a unimodal function.
pub fn golden_max<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::bell_m;
    use crate::statefam::bell_diagonal;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn surface_point_examples() {
        let theta = 1.25 * PI;
        let (lo, _) = vk_interval(theta);
        let v = surface_point(&LevelSurfacePatch { branch: Branch::B123, theta, vk: lo }).unwrap();
        for x in v.0 {
            assert_abs_diff_eq!(x, -FRAC_1_SQRT_2, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(bell_m(&bell_diagonal(&v).unwrap()), 1.0, epsilon = 1e-12);

        let v = surface_point(&LevelSurfacePatch { branch: Branch::B123, theta: PI, vk: 0.0 }).unwrap();
        assert_abs_diff_eq!(v.0[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.0[1], -1.0);
        assert_abs_diff_eq!(bell_m(&bell_diagonal(&v).unwrap()), 1.0, epsilon = 1e-12);

        assert!(surface_point(&LevelSurfacePatch { branch: Branch::B123, theta, vk: 0.5 }).is_err());
        assert!(surface_point(&LevelSurfacePatch { branch: Branch::B123, theta: 0.0, vk: 0.0 }).is_err());
    }

    #[test]
    fn facet_plane_passes_through_defining_vertices() {
        for (v0, gamma) in [(-FRAC_1_SQRT_2, 2.0 - 6f64.sqrt()), (-0.7082, -0.3813), (-0.8, 0.2)] {
            let (a, c) = facet_plane(v0, gamma).unwrap();
            let plane = Plane { normal: [a, a, c] };
            for p in [[v0, v0, v0], [-1.0, gamma, gamma], [gamma, -1.0, gamma]] {
                assert_abs_diff_eq!(plane.eval(&p), 0.0, epsilon = 1e-12);
            }
        }
        assert!(matches!(facet_plane(0.0, 0.3), Err(Error::DegenerateFacet(_))));
        assert!(matches!(facet_plane(-0.5, -1.0), Err(Error::DegenerateFacet(_))));
    }

    #[test]
    fn polyhedron_is_centrally_symmetric() {
        let p = PolyhedronP::new(-0.7, -0.4);
        for m in 0..4 {
            assert_eq!(p.vertices[m + 4], p.vertices[m].map(|x| -x));
        }
    }

    #[test]
    fn chosen_polyhedron_contains_the_patch() {
        assert!(surface_inside_p(-FRAC_1_SQRT_2, 2.0 - 6f64.sqrt(), DEFAULT_SURFACE_SAMPLES).unwrap());
        assert!(!surface_inside_p(-FRAC_1_SQRT_2, -0.35, DEFAULT_SURFACE_SAMPLES).unwrap());
    }

    #[test]
    fn fg_examples() {
        assert!(fg_intersection_exists(-1.0, -0.3813));
        assert!(fg_intersection_exists(-1.0, 0.2));
        // Far below the tangent value there is no root.
        assert!(!fg_intersection_exists(-0.75, -0.3813));
        let b0 = -0.3813;
        let t = fg_tangent_a0(b0).unwrap();
        assert!(fg_intersection_exists(t + 1e-6, b0));
        assert!(!fg_intersection_exists(t - 1e-6, b0));
    }

    fn fg_grid(a0: f64, b0: f64, n: usize) -> bool {
        let g = |t: f64| (1.0 + a0) * t.sin() + (b0 - a0) * t.cos() - a0 * (1.0 + b0);
        let thetas: Vec<f64> = theta_grid(n).collect();
        thetas.windows(2).any(|w| g(w[0]) * g(w[1]) <= 0.0)
    }

    #[test]
    fn fg_matches_grid_oracle() {
        assert_eq!(fg_intersection_exists(-0.5, -0.3813), fg_grid(-0.5, -0.3813, 10_000));
        for a0 in [-0.95, -0.8, -0.6, -0.3, -0.1] {
            for b0 in [-0.6, -0.3813, -0.1, 0.2] {
                let exact = fg_intersection_exists(a0, b0);
                let grid = fg_grid(a0, b0, 10_000);
                // Tangencies can be missed by the grid but not the other way.
                assert!(exact || !grid, "a0={a0} b0={b0}");
                if exact != grid {
                    let t = fg_tangent_a0(b0).unwrap();
                    assert!((a0 - t).abs() < 1e-3);
                }
            }
        }
    }

    #[test]
    fn critical_edge_values() {
        assert_abs_diff_eq!(critical_edge_b0(CoherenceKind::L1).unwrap(), 6f64.sqrt() - 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(critical_edge_b0(CoherenceKind::RelativeEntropy).unwrap(), 0.3813, epsilon = 5e-5);
    }

    #[test]
    fn critical_v0_w_swap_symmetry() {
        for kind in CoherenceKind::ALL {
            let a = critical_v0(kind, 0.6, -1.4, 1e-9).unwrap();
            let b = critical_v0(kind, -1.4, 0.6, 1e-9).unwrap();
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn critical_point_is_outside_level_surface() {
        for kind in CoherenceKind::ALL {
            for (w0, w1) in [(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (-2.0, 0.5)] {
                let v0 = critical_v0(kind, w0, w1, 1e-9).unwrap();
                let m = bell_m(&bell_diagonal(&CorrVector([v0; 3])).unwrap());
                assert!(m > 1.0, "{kind} w=({w0},{w1}) v0c={v0} M={m}");
            }
        }
    }

    #[test]
    fn bisect_reports_missing_bracket() {
        assert!(matches!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-9), Err(Error::Bracket { .. })));
        assert_abs_diff_eq!(bisect(|x| x - 0.3, 0.0, 1.0, 1e-12).unwrap(), 0.3, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn surface_points_have_unit_m(k in 0usize..3, t in 0.0..=1.0f64, u in 0.0..=1.0f64) {
            let theta = THETA_MIN + FRAC_PI_2 * t;
            let (lo, hi) = vk_interval(theta);
            let patch = LevelSurfacePatch { branch: Branch::ALL[k], theta, vk: lo + u * (hi - lo) };
            let v = surface_point(&patch).unwrap();
            prop_assert!(v.in_tetrahedron());
            let m = bell_m(&bell_diagonal(&v).unwrap());
            prop_assert!((m - 1.0).abs() < 1e-10, "M = {m}");
        }
    }
}
