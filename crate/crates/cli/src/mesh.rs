//! Vertex lists for the `M = 1` surface and the NAQC iso-surfaces over the
//! Bell-diagonal tetrahedron.

use naqc::geometry::{surface_point, vk_interval, Branch, LevelSurfacePatch, THETA_MAX, THETA_MIN};
use naqc::linalg::diag3;
use naqc::measures::bell_m_from_t;
use naqc::{naqc_bell_diag, threshold, CoherenceKind, CorrVector, Exec};

pub const MIN_RESOLUTION: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    /// Defining function at each vertex: `M − 1`, or `C^na − C^m`.
    pub residuals: Vec<f64>,
    /// Fraction of grid points inside the tetrahedron with `C^na > C^m`
    /// (iso-surfaces only).
    pub naqc_fraction: Option<f64>,
}

/// Sign flips of two coordinates map the patch next to A onto the patches
/// next to the other three vertices.
const EVEN_FLIPS: [[f64; 3]; 4] = [[1.0, 1.0, 1.0], [-1.0, -1.0, 1.0], [-1.0, 1.0, -1.0], [1.0, -1.0, -1.0]];

/// `n × n` samples per branch and patch of the parametrized surface.
pub fn bell_surface(n: usize) -> Mesh {
    let mut vertices = Vec::with_capacity(4 * 3 * n * n);
    for flip in EVEN_FLIPS {
        for branch in Branch::ALL {
            for a in 0..n {
                let theta = THETA_MIN + (THETA_MAX - THETA_MIN) * a as f64 / (n - 1) as f64;
                let (lo, hi) = vk_interval(theta);
                for b in 0..n {
                    let vk = lo + (hi - lo) * b as f64 / (n - 1) as f64;
                    let v = surface_point(&LevelSurfacePatch { branch, theta, vk }).expect("on the patch").0;
                    vertices.push([0, 1, 2].map(|i| flip[i] * v[i]));
                }
            }
        }
    }
    let residuals = vertices.iter().map(|v| bell_m_from_t(&diag3(*v)) - 1.0).collect();
    Mesh { vertices, residuals, naqc_fraction: None }
}

/// Crossings of `C^na = C^m` along the edges of a regular `n³` grid on
/// `[−1, 1]³`, located by linear interpolation between grid points that lie
/// in the tetrahedron.
pub fn naqc_surface(kind: CoherenceKind, n: usize, exec: Exec) -> Mesh {
    let cm = threshold(kind);
    let coord = |i: usize| -1.0 + 2.0 * i as f64 / (n - 1) as f64;
    let idx = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    let field: Vec<Option<f64>> = exec.map_range(n * n * n, |m| {
        let v = CorrVector([coord(m / (n * n)), coord(m / n % n), coord(m % n)]);
        naqc_bell_diag(&v, kind).ok().map(|c| c - cm)
    });
    let inside = field.iter().flatten().count();
    let positive = field.iter().flatten().filter(|&&f| f > 0.0).count();

    let mut vertices = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let Some(fa) = field[idx(i, j, k)] else { continue };
                let here = [i, j, k];
                for axis in 0..3 {
                    if here[axis] + 1 == n {
                        continue;
                    }
                    let mut next = here;
                    next[axis] += 1;
                    let Some(fb) = field[idx(next[0], next[1], next[2])] else { continue };
                    if (fa > 0.0) == (fb > 0.0) {
                        continue;
                    }
                    let t = fa / (fa - fb);
                    let mut v = here.map(coord);
                    v[axis] += t * (coord(next[axis]) - v[axis]);
                    vertices.push(v);
                }
            }
        }
    }
    let residuals = vertices
        .iter()
        .map(|v| naqc_bell_diag(&CorrVector(*v), kind).map_or(f64::NAN, |c| c - cm))
        .collect();
    let naqc_fraction = (inside > 0).then(|| positive as f64 / inside as f64);
    Mesh { vertices, residuals, naqc_fraction }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_vertices_lie_on_the_surface() {
        let mesh = bell_surface(12);
        assert_eq!(mesh.vertices.len(), 4 * 3 * 144);
        assert!(mesh.residuals.iter().all(|r| r.abs() <= 1e-6));
        assert!(mesh.vertices.iter().all(|v| CorrVector(*v).in_tetrahedron()));
    }

    #[test]
    fn l1_vertices_are_exact_and_re_region_is_smaller() {
        let l1 = naqc_surface(CoherenceKind::L1, 25, Exec::Sequential);
        assert!(!l1.vertices.is_empty());
        for (v, r) in l1.vertices.iter().zip(&l1.residuals) {
            let sum: f64 = v.iter().map(|x| x.abs()).sum();
            assert!((sum - 6f64.sqrt()).abs() < 1e-12);
            assert!(r.abs() < 1e-12);
        }
        let re = naqc_surface(CoherenceKind::RelativeEntropy, 25, Exec::Sequential);
        assert!(re.naqc_fraction.unwrap() < l1.naqc_fraction.unwrap());
    }
}
