//! Maximization of NAQC over local unitaries, over the shape of the
//! symmetric family, over rotated correlation matrices of Bell-diagonal
//! states, and over the line AO′ family; Monte Carlo hierarchy scans.

mod scan;
pub mod simplex;

pub use scan::{
    fidelity_bound, hierarchy_scan, hierarchy_scan_with, Family, Sample, ScanConfig, ScanSummary,
    StateRecord,
};

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::linalg::{diag3, mat3_mul, mat3_transpose, Real3};
use crate::measures::{bell_m_from_t, CoherenceKind};
use crate::naqc::{naqc_from_bloch, naqc_value};
use crate::par::Exec;
use crate::qstate::{from_bloch, h2, to_bloch, BlochRep, DensityMatrix};
use crate::rng::{derive_seed, substream};
use crate::statefam::{
    haar_local_unitary, line_aoprime_rep, symmetric_family_rep, CorrVector, SymmetricFamilyParams,
};
use crate::unitary::{axis_rotation, LocalUnitary};
use simplex::nelder_mead;

const HAAR_LABEL: u64 = 0x4841_4152;

/// Haar starting points refined by the simplex search.
pub const REFINE_STARTS: usize = 3;
/// Initial simplex edge, in radians, for the unitary chart.
pub const REFINE_STEP: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptBudget {
    pub haar_samples: usize,
    pub refine_iters: usize,
    pub seed: u64,
}

impl Default for OptBudget {
    fn default() -> Self {
        OptBudget { haar_samples: 10_000, refine_iters: 200, seed: 0 }
    }
}

impl OptBudget {
    /// Sample count of the long-running mode.
    pub const LONG_RUN_SAMPLES: usize = 10_000_000;

    pub fn with_seed(seed: u64) -> Self {
        OptBudget { seed, ..Self::default() }
    }
}

/// Rotation angles `(α, β, γ)` per qubit; each factor is
/// `R_x(α) R_y(β) R_z(γ)` with `R_k(θ) = exp(−iθσ_k/2)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct UnitaryAngles(pub [f64; 6]);

impl UnitaryAngles {
    pub fn factors(&self) -> (crate::linalg::Mat2, crate::linalg::Mat2) {
        let f = |a: &[f64]| axis_rotation(1, a[0]) * axis_rotation(2, a[1]) * axis_rotation(3, a[2]);
        (f(&self.0[..3]), f(&self.0[3..]))
    }

    pub fn to_local_unitary(&self) -> LocalUnitary {
        let (a, b) = self.factors();
        LocalUnitary::from_trusted(a, b)
    }

    /// SO(3) images of the two factors, without forming 2×2 matrices.
    pub fn rotations(&self) -> (Real3, Real3) {
        let f = |a: &[f64]| mat3_mul(&mat3_mul(&rot(0, a[0]), &rot(1, a[1])), &rot(2, a[2]));
        (f(&self.0[..3]), f(&self.0[3..]))
    }
}

/// Right-handed rotation by `theta` about coordinate axis `k`.
fn rot(k: usize, theta: f64) -> Real3 {
    let (s, c) = theta.sin_cos();
    let (i, j) = ((k + 1) % 3, (k + 2) % 3);
    let mut m = [[0.0; 3]; 3];
    m[k][k] = 1.0;
    m[i][i] = c;
    m[j][j] = c;
    m[j][i] = s;
    m[i][j] = -s;
    m
}

/// Candidate unitaries: the identity at index 0, then Haar samples
/// `1..=haar_samples`, each drawn from its own substream so a smaller budget
/// sees a prefix of a larger one.
#[derive(Clone, Debug)]
pub struct HaarCandidates {
    seed: u64,
    rotations: Vec<(Real3, Real3)>,
}

impl HaarCandidates {
    pub fn new(budget: &OptBudget, exec: Exec) -> Self {
        let seed = derive_seed(budget.seed, HAAR_LABEL);
        let rotations = exec.map_range(budget.haar_samples + 1, |i| Self::unitary_at(seed, i).rotations());
        HaarCandidates { seed, rotations }
    }

    fn unitary_at(seed: u64, i: usize) -> LocalUnitary {
        if i == 0 {
            LocalUnitary::identity()
        } else {
            haar_local_unitary(&mut substream(seed, i as u64))
        }
    }

    pub fn unitary(&self, i: usize) -> LocalUnitary {
        Self::unitary_at(self.seed, i)
    }

    pub fn len(&self) -> usize {
        self.rotations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rotations.is_empty()
    }

    pub fn rotation(&self, i: usize) -> &(Real3, Real3) {
        &self.rotations[i]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptResult {
    /// Best NAQC over the candidates and their refinements.
    pub value: f64,
    pub argmax: LocalUnitary,
    /// NAQC of the untransformed state.
    pub identity_value: f64,
    /// Best value before refinement.
    pub sampled_value: f64,
}

/// `max_{U_A ⊗ U_B} C^na((U_A ⊗ U_B) ρ (U_A ⊗ U_B)†)` over Haar samples,
/// followed by simplex refinement from the best few.
pub fn optimized_naqc(rho: &DensityMatrix, kind: CoherenceKind, budget: &OptBudget) -> OptResult {
    optimized_naqc_with(rho, kind, budget, Exec::default())
}

pub fn optimized_naqc_with(rho: &DensityMatrix, kind: CoherenceKind, budget: &OptBudget, exec: Exec) -> OptResult {
    let candidates = HaarCandidates::new(budget, exec);
    optimize_with_candidates(rho, kind, &candidates, budget.refine_iters, exec)
}

/// [`optimized_naqc`] with a precomputed candidate set, for scans that
/// optimize many states under one budget.
pub fn optimize_with_candidates(
    rho: &DensityMatrix,
    kind: CoherenceKind,
    candidates: &HaarCandidates,
    refine_iters: usize,
    exec: Exec,
) -> OptResult {
    let rep = to_bloch(rho);
    let values = exec.map_range(candidates.len(), |i| {
        let (ra, rb) = candidates.rotation(i);
        naqc_from_bloch(&rep.rotated(ra, rb), kind)
    });
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let sampled_value = values[order[0]];

    let mut best = (sampled_value, candidates.unitary(order[0]));
    if refine_iters > 0 {
        for &start in order.iter().take(REFINE_STARTS) {
            let u0 = candidates.unitary(start);
            let (r0a, r0b) = candidates.rotation(start);
            let objective = |x: &[f64; 6]| {
                let (ra, rb) = UnitaryAngles(*x).rotations();
                -naqc_from_bloch(&rep.rotated(&mat3_mul(r0a, &ra), &mat3_mul(r0b, &rb)), kind)
            };
            let m = nelder_mead(objective, [0.0; 6], REFINE_STEP, refine_iters, 1e-13);
            if -m.fx > best.0 {
                let (da, db) = UnitaryAngles(m.x).factors();
                best = (-m.fx, LocalUnitary::from_trusted(*u0.ua() * da, *u0.ub() * db));
            }
        }
    }

    // Report values from the matrix route; the identity is always a candidate.
    let identity_value = naqc_value(rho, kind);
    let refined = naqc_value(&best.1.apply(rho), kind);
    let (value, argmax) = if refined >= identity_value {
        (refined, best.1)
    } else {
        (identity_value, LocalUnitary::identity())
    };
    OptResult { value, argmax, identity_value, sampled_value }
}

/// Maximum of the symmetric-family NAQC over the shape `(w0, w1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WMax {
    pub value: f64,
    pub w0: f64,
    pub w1: f64,
    pub sign: i8,
    /// Largest value on the boundary of the search box.
    pub boundary_value: f64,
}

pub const W_BOX: f64 = 3.0;

fn symmetric_value(v0: f64, w0: f64, w1: f64, sign: i8, kind: CoherenceKind) -> f64 {
    let p = SymmetricFamilyParams::new(v0, w0, w1).with_signs(sign, sign);
    symmetric_family_rep(&p).map_or(f64::NEG_INFINITY, |rep| naqc_from_bloch(&rep, kind))
}

/// Grid scan over `[−3, 3]²` for both sign choices, then optional simplex
/// refinement inside the box.
pub fn maximize_over_w(v0: f64, kind: CoherenceKind, grid: usize, refine: bool) -> WMax {
    let n = grid.max(2);
    let at = |m: usize| -W_BOX + 2.0 * W_BOX * m as f64 / (n - 1) as f64;
    let mut best = WMax { value: f64::NEG_INFINITY, w0: 0.0, w1: 0.0, sign: 1, boundary_value: f64::NEG_INFINITY };
    for sign in [1i8, -1] {
        for a in 0..n {
            for b in 0..n {
                let (w0, w1) = (at(a), at(b));
                let val = symmetric_value(v0, w0, w1, sign, kind);
                if a == 0 || b == 0 || a == n - 1 || b == n - 1 {
                    best.boundary_value = best.boundary_value.max(val);
                }
                if val > best.value {
                    best = WMax { value: val, w0, w1, sign, ..best };
                }
            }
        }
    }
    if refine {
        let sign = best.sign;
        let f = |x: &[f64; 2]| {
            if x[0].abs() > W_BOX || x[1].abs() > W_BOX {
                f64::INFINITY
            } else {
                -symmetric_value(v0, x[0], x[1], sign, kind)
            }
        };
        let step = 2.0 * W_BOX / (n - 1) as f64;
        let m = nelder_mead(f, [best.w0, best.w1], step, 500, 1e-15);
        if -m.fx > best.value {
            best.value = -m.fx;
            best.w0 = m.x[0];
            best.w1 = m.x[1];
        }
    }
    best
}

/// Right-hand side of the relative-entropy NAQC of a Bell-diagonal state
/// transformed to correlation matrix `T`:
/// `½ Σ_{i≠j} H((1 + t_ij)/2) − Σ_i H((1 + |t_i|)/2)`, `t_i` the rows of T.
pub fn c4_objective(t: &Real3) -> f64 {
    let mut total = 0.0;
    for (i, row) in t.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if i != j {
                total += 0.5 * h2(0.5 * (1.0 + x));
            }
        }
        let len = row.iter().map(|x| x * x).sum::<f64>().sqrt().min(1.0);
        total -= h2(0.5 * (1.0 + len));
    }
    total
}

/// Bell-diagonal `v` that is physical and satisfies `M ≤ 1`.
pub fn c4_feasible(v: &[f64; 3]) -> bool {
    CorrVector(*v).in_tetrahedron() && bell_m_from_t(&diag3(*v)) <= 1.0 + 1e-12
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct C4Max {
    pub value: f64,
    pub v: [f64; 3],
    pub t: Real3,
}

/// Maximum of [`c4_objective`] over `T = R_A diag(v) R_Bᵀ` with `v` in the
/// tetrahedron and `M ≤ 1` (hence `|v|² ≤ 3/2`): grid and simplex over `v`,
/// then Haar rotations and a joint simplex over `v` and both rotations.
pub fn max_c4_over_t(grid: usize, budget: &OptBudget, exec: Exec) -> C4Max {
    let n = grid.max(2);
    let at = |m: usize| -1.0 + 2.0 * m as f64 / (n - 1) as f64;
    let pts: Vec<[f64; 3]> = (0..n * n * n).map(|m| [at(m / (n * n)), at(m / n % n), at(m % n)]).collect();
    let vals = exec.map_range(pts.len(), |m| {
        if c4_feasible(&pts[m]) {
            c4_objective(&diag3(pts[m]))
        } else {
            f64::NEG_INFINITY
        }
    });
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));

    let diag_objective = |x: &[f64; 3]| if c4_feasible(x) { -c4_objective(&diag3(*x)) } else { f64::INFINITY };
    let mut best_v = pts[order[0]];
    let mut best = vals[order[0]];
    for &start in order.iter().take(REFINE_STARTS) {
        let m = nelder_mead(diag_objective, pts[start], 1.0 / (n - 1) as f64, 2000, 1e-15);
        if -m.fx > best {
            best = -m.fx;
            best_v = m.x;
        }
    }

    let candidates = HaarCandidates::new(budget, exec);
    let rvals = exec.map_range(candidates.len(), |i| {
        let (ra, rb) = candidates.rotation(i);
        c4_objective(&mat3_mul(&mat3_mul(ra, &diag3(best_v)), &mat3_transpose(rb)))
    });
    let mut rorder: Vec<usize> = (0..rvals.len()).collect();
    rorder.sort_by(|&a, &b| rvals[b].total_cmp(&rvals[a]).then(a.cmp(&b)));

    let mut best_t = diag3(best_v);
    for &start in rorder.iter().take(REFINE_STARTS) {
        let (r0a, r0b) = *candidates.rotation(start);
        let build = |x: &[f64; 9]| {
            let mut ang = [0.0; 6];
            ang.copy_from_slice(&x[3..]);
            let (ra, rb) = UnitaryAngles(ang).rotations();
            let ra = mat3_mul(&r0a, &ra);
            let rb = mat3_mul(&r0b, &rb);
            mat3_mul(&mat3_mul(&ra, &diag3([x[0], x[1], x[2]])), &mat3_transpose(&rb))
        };
        let f = |x: &[f64; 9]| {
            if c4_feasible(&[x[0], x[1], x[2]]) {
                -c4_objective(&build(x))
            } else {
                f64::INFINITY
            }
        };
        let mut x0 = [0.0; 9];
        x0[..3].copy_from_slice(&best_v);
        let m = nelder_mead(f, x0, 0.1, budget.refine_iters.max(1) * 5, 1e-15);
        if -m.fx > best {
            best = -m.fx;
            best_v = [m.x[0], m.x[1], m.x[2]];
            best_t = build(&m.x);
        }
    }
    C4Max { value: best, v: best_v, t: best_t }
}

/// Maximum NAQC on the line AO′ at fixed `a0` over admissible `s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineMax {
    pub value: f64,
    pub s: [f64; 3],
}

fn direction(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

/// Largest `ρ` such that `s = ρ d` gives a physical state on AO′. The
/// admissible set is convex and contains `s = 0`, so bisection applies.
pub fn line_aoprime_radius(a0: f64, d: &[f64; 3]) -> f64 {
    let ok = |rho: f64| {
        line_aoprime_rep(a0, d.map(|x| rho * x)).is_ok_and(|rep| from_bloch(&rep).is_physical())
    };
    let (mut lo, mut hi) = (0.0, 2.0);
    if !ok(lo) {
        return 0.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Radial chart: direction `(θ, φ)` and fraction `f ∈ [0, 1]` of the
/// largest admissible radius. Grid over the chart, then simplex refinement.
pub fn maximize_line_aoprime(a0: f64, kind: CoherenceKind, grid: usize, exec: Exec) -> LineMax {
    use std::f64::consts::PI;
    let n = grid.max(4);
    let fractions = [1.0, 0.9, 0.75, 0.5];
    let point = |x: &[f64; 3]| -> [f64; 3] {
        let f = x[2].clamp(0.0, 1.0);
        let d = direction(x[0], x[1]);
        let r = f * line_aoprime_radius(a0, &d);
        d.map(|c| r * c)
    };
    let value = |s: &[f64; 3]| line_aoprime_rep(a0, *s).map_or(f64::NEG_INFINITY, |rep| naqc_from_bloch(&rep, kind));
    let chart: Vec<[f64; 3]> = (0..n * 2 * n * fractions.len())
        .map(|m| {
            let t = m / (2 * n * fractions.len());
            let p = m / fractions.len() % (2 * n);
            let f = fractions[m % fractions.len()];
            [PI * (t as f64 + 0.5) / n as f64, PI * p as f64 / n as f64, f]
        })
        .collect();
    let vals = exec.map_range(chart.len(), |m| value(&point(&chart[m])));
    let mut order: Vec<usize> = (0..chart.len()).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));

    let mut best = LineMax { value: vals[order[0]], s: point(&chart[order[0]]) };
    for &start in order.iter().take(REFINE_STARTS) {
        let f = |x: &[f64; 3]| -value(&point(x));
        let m = nelder_mead(f, chart[start], 0.1, 400, 1e-15);
        if -m.fx > best.value {
            best = LineMax { value: -m.fx, s: point(&m.x) };
        }
    }
    best
}

/// The shape optimum of the symmetric family at `v0 = −1/√2`.
pub fn symmetric_optimum_state(kind: CoherenceKind) -> (WMax, DensityMatrix) {
    let w = maximize_over_w(-FRAC_1_SQRT_2, kind, 121, true);
    let p = SymmetricFamilyParams::new(-FRAC_1_SQRT_2, w.w0, w.w1).with_signs(w.sign, w.sign);
    let rep: BlochRep = symmetric_family_rep(&p).unwrap();
    (w, from_bloch(&rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::bell;
    use crate::statefam::tests::arb_state;
    use crate::statefam::{bell_diagonal, line_aoprime_state};
    use crate::unitary::so3;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn angle_rotations_match_so3() {
        let a = UnitaryAngles([0.3, -1.1, 2.0, 0.7, 0.2, -0.4]);
        let (fa, fb) = a.factors();
        let (ra, rb) = a.rotations();
        let (sa, sb) = (so3(&fa), so3(&fb));
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(ra[i][j], sa[i][j], epsilon = 1e-14);
                assert_abs_diff_eq!(rb[i][j], sb[i][j], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn bell_state_is_already_optimal() {
        let budget = OptBudget { haar_samples: 200, refine_iters: 50, seed: 1 };
        let r = optimized_naqc(&bell::phi_plus(), CoherenceKind::L1, &budget);
        assert_abs_diff_eq!(r.value, 3.0, epsilon = 1e-6);
    }

    #[test]
    fn identity_is_a_candidate() {
        let rho = bell_diagonal(&CorrVector([-0.9, -0.8, -0.7])).unwrap();
        let budget = OptBudget { haar_samples: 0, refine_iters: 0, seed: 0 };
        let r = optimized_naqc(&rho, CoherenceKind::L1, &budget);
        assert_eq!(r.value, naqc_value(&rho, CoherenceKind::L1));
        assert_eq!(r.argmax, LocalUnitary::identity());
    }

    #[test]
    fn deterministic_and_mode_independent() {
        let rho = crate::statefam::random_state(&mut substream(4, 0), 3).unwrap();
        let budget = OptBudget { haar_samples: 300, refine_iters: 40, seed: 9 };
        let a = optimized_naqc_with(&rho, CoherenceKind::RelativeEntropy, &budget, Exec::Sequential);
        let b = optimized_naqc_with(&rho, CoherenceKind::RelativeEntropy, &budget, Exec::Parallel);
        let c = optimized_naqc_with(&rho, CoherenceKind::RelativeEntropy, &budget, Exec::Sequential);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.argmax, b.argmax);
        assert_eq!(a, c);
    }

    #[test]
    fn larger_budget_sees_a_superset() {
        let rho = crate::statefam::random_state(&mut substream(8, 0), 4).unwrap();
        for kind in CoherenceKind::ALL {
            let small = optimized_naqc(&rho, kind, &OptBudget { haar_samples: 100, refine_iters: 0, seed: 2 });
            let large = optimized_naqc(&rho, kind, &OptBudget { haar_samples: 10_000, refine_iters: 0, seed: 2 });
            assert!(large.sampled_value >= small.sampled_value);
            let small_r = optimized_naqc(&rho, kind, &OptBudget { haar_samples: 100, refine_iters: 200, seed: 2 });
            let large_r = optimized_naqc(&rho, kind, &OptBudget { haar_samples: 10_000, refine_iters: 200, seed: 2 });
            assert!(large_r.value >= small_r.value - 2e-3);
        }
    }

    #[test]
    fn w_maximum_at_vertex_a() {
        for kind in CoherenceKind::ALL {
            let w = maximize_over_w(-1.0, kind, 13, false);
            assert_abs_diff_eq!(w.value, 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn c4_objective_examples() {
        assert_eq!(c4_objective(&[[0.0; 3]; 3]), 0.0);
        let t = diag3([-FRAC_1_SQRT_2; 3]);
        assert!(c4_objective(&t) < crate::naqc::threshold(CoherenceKind::RelativeEntropy));
        // Same functional as the general route on r = s = 0.
        let rep = BlochRep::new([0.0; 3], [0.0; 3], [[-0.3, 0.2, 0.1], [0.0, -0.5, 0.2], [0.1, 0.1, -0.4]]);
        assert_abs_diff_eq!(
            c4_objective(&rep.t),
            naqc_from_bloch(&rep, CoherenceKind::RelativeEntropy),
            epsilon = 1e-12
        );
    }

    #[test]
    fn line_radius_is_on_the_boundary() {
        let a0 = -0.7082;
        let d = direction(1.1, 3.5);
        let r = line_aoprime_radius(a0, &d);
        assert!(r > 0.0);
        let inside = d.map(|x| (r - 1e-9) * x);
        assert!(line_aoprime_state(a0, inside[0], inside[1], inside[2]).is_ok());
        let outside = d.map(|x| (r + 1e-6) * x);
        assert!(line_aoprime_state(a0, outside[0], outside[1], outside[2]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn optimized_value_is_bounded(rho in arb_state()) {
            let budget = OptBudget { haar_samples: 64, refine_iters: 30, seed: 5 };
            for kind in CoherenceKind::ALL {
                let r = optimized_naqc(&rho, kind, &budget);
                prop_assert!(r.value <= crate::naqc::C_MAX + 1e-9);
                prop_assert!(r.value >= naqc_value(&rho, kind) - 1e-12);
                prop_assert!(r.argmax.residual() < 1e-12);
            }
        }
    }
}
