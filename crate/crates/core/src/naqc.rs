//! Conditional ensembles, the NAQC functional and criterion, closed forms
//! for Bell-diagonal and edge states, and the normalized quantifiers.

use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron, Mat2};
use crate::measures::{bell_m, coherence, coherence_of_bloch, CoherenceKind, PauliAxis};
use crate::optimize::{optimized_naqc, OptBudget};
use crate::qstate::{h2, partial_trace_a_op, pauli, BlochRep, DensityMatrix, QubitState};
use crate::statefam::CorrVector;
use crate::unitary::LocalUnitary;

/// Outcomes with probability below this carry no weight.
pub const BRANCH_TOL: f64 = 1e-12;

/// Largest NAQC value of any two-qubit state, reached by the Bell states.
pub const C_MAX: f64 = 3.0;

static THRESHOLD_RE: LazyLock<f64> = LazyLock::new(|| 3.0 * h2(0.5 + 3f64.sqrt() / 6.0));
static THRESHOLD_L1: LazyLock<f64> = LazyLock::new(|| 6f64.sqrt());

/// Single-qubit bound `C^m`: √6 for l1 and `3H(1/2 + √3/6)` for relative
/// entropy.
pub fn threshold(kind: CoherenceKind) -> f64 {
    match kind {
        CoherenceKind::L1 => *THRESHOLD_L1,
        CoherenceKind::RelativeEntropy => *THRESHOLD_RE,
    }
}

/// Bob's states after Alice measures σ_axis, indexed by outcome `a = 0, 1`
/// (eigenvalue `(−1)^a`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionalEnsemble {
    pub axis: PauliAxis,
    pub branches: [(f64, QubitState); 2],
}

/// `Π_i^a = (I + (−1)^a σ_i)/2`.
pub fn projector(axis: PauliAxis, a: usize) -> Mat2 {
    let sign = if a == 0 { 0.5 } else { -0.5 };
    Mat2::identity().scale_real(0.5) + pauli(axis.index()).scale_real(sign)
}

pub fn conditional_ensemble(rho: &DensityMatrix, axis: PauliAxis) -> ConditionalEnsemble {
    let branch = |a: usize| {
        let p4 = kron(&projector(axis, a), &Mat2::identity());
        let reduced = partial_trace_a_op(&(p4 * *rho.matrix() * p4));
        let p = reduced.trace().re;
        if p < BRANCH_TOL {
            (p.max(0.0), QubitState::maximally_mixed())
        } else {
            (p, QubitState::from_trusted(reduced.scale_real(1.0 / p)))
        }
    };
    ConditionalEnsemble { axis, branches: [branch(0), branch(1)] }
}

/// `½ Σ_{i≠j} Σ_a p(a|σ_i) C^{σ_j}(ρ_{B|σ_i^a})`, evaluated from the
/// conditional density matrices.
pub fn naqc_value(rho: &DensityMatrix, kind: CoherenceKind) -> f64 {
    let mut total = 0.0;
    for i in PauliAxis::ALL {
        let ens = conditional_ensemble(rho, i);
        for (p, state) in ens.branches {
            if p < BRANCH_TOL {
                continue;
            }
            for j in PauliAxis::ALL.into_iter().filter(|&j| j != i) {
                total += p * coherence(&state, j, kind);
            }
        }
    }
    0.5 * total
}

/// Same functional as [`naqc_value`], from Bloch data: outcome `a = ±1` of
/// σ_i has probability `(1 + a r_i)/2` and leaves Bob with Bloch vector
/// `(s + a t_i)/(1 + a r_i)`, `t_i` the i-th row of T.
pub fn naqc_from_bloch(rep: &BlochRep, kind: CoherenceKind) -> f64 {
    let mut total = 0.0;
    for i in PauliAxis::ALL {
        let row = rep.t[i.slot()];
        for a in [1.0, -1.0] {
            let w = 1.0 + a * rep.r[i.slot()];
            let p = 0.5 * w;
            if p < BRANCH_TOL {
                continue;
            }
            let n = [0, 1, 2].map(|k| (rep.s[k] + a * row[k]) / w);
            for j in PauliAxis::ALL.into_iter().filter(|&j| j != i) {
                total += p * coherence_of_bloch(&n, j, kind);
            }
        }
    }
    0.5 * total
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaqcReport {
    pub kind: CoherenceKind,
    pub value: f64,
    pub threshold: f64,
    pub bell_m: f64,
    pub achieves_naqc: bool,
    pub bell_nonlocal: bool,
}

impl NaqcReport {
    pub fn from_values(kind: CoherenceKind, value: f64, bell_m: f64) -> Self {
        let threshold = threshold(kind);
        NaqcReport {
            kind,
            value,
            threshold,
            bell_m,
            achieves_naqc: value > threshold,
            bell_nonlocal: bell_m > 1.0,
        }
    }

    pub fn margin(&self) -> f64 {
        self.value - self.threshold
    }

    /// NAQC without CHSH violation.
    pub fn is_counterexample(&self) -> bool {
        self.achieves_naqc && !self.bell_nonlocal
    }
}

pub fn naqc_report(rho: &DensityMatrix, kind: CoherenceKind) -> NaqcReport {
    NaqcReport::from_values(kind, naqc_value(rho, kind), bell_m(rho))
}

/// Closed form on Bell-diagonal states: `Σ|v_i|` for l1 and
/// `3 − Σ H((1 + v_i)/2)` for relative entropy.
pub fn naqc_bell_diag(v: &CorrVector, kind: CoherenceKind) -> Result<f64> {
    v.require_tetrahedron()?;
    Ok(bell_diag_unchecked(v.as_array(), kind))
}

pub(crate) fn bell_diag_unchecked(v: [f64; 3], kind: CoherenceKind) -> f64 {
    match kind {
        CoherenceKind::L1 => v.iter().map(|x| x.abs()).sum(),
        CoherenceKind::RelativeEntropy => 3.0 - v.iter().map(|x| h2(0.5 * (1.0 + x))).sum::<f64>(),
    }
}

/// Closed form on edge AB, `v = (v1, −1, v1)` with `r = (0, −s2, 0)`,
/// `s = (0, s2, 0)`.
pub fn naqc_edge_ab(v1: f64, s2: f64, kind: CoherenceKind) -> Result<f64> {
    if !(-1.0..=1.0).contains(&v1) || s2 * s2 > 1.0 - v1 * v1 + 1e-12 {
        return Err(Error::Unphysical(format!(
            "edge AB needs s2^2 <= 1 - v1^2, got v1 = {v1}, s2 = {s2}"
        )));
    }
    let len = (v1 * v1 + s2 * s2).sqrt();
    Ok(match kind {
        CoherenceKind::L1 => 1.0 + v1.abs() + len,
        CoherenceKind::RelativeEntropy => {
            2.0 + h2(0.5 * (1.0 + s2)) - 2.0 * h2(0.5 * (1.0 + len.min(1.0)))
        }
    })
}

/// NAQC of `(U_A ⊗ U_B) ρ (U_A ⊗ U_B)†`. Unitarity of the factors is
/// enforced when the [`LocalUnitary`] is built.
pub fn naqc_under_unitary(rho: &DensityMatrix, u: &LocalUnitary, kind: CoherenceKind) -> f64 {
    naqc_value(&u.apply(rho), kind)
}

/// `max{0, (C − C^m)/(C_max − C^m)}` with `C` the plain NAQC value, or its
/// maximum over local unitaries when `optimized` is set.
pub fn naqc_quantifier(
    rho: &DensityMatrix,
    kind: CoherenceKind,
    optimized: bool,
    budget: &OptBudget,
) -> f64 {
    let c = if optimized { optimized_naqc(rho, kind, budget).value } else { naqc_value(rho, kind) };
    quantifier_of(c, kind)
}

pub fn quantifier_of(c: f64, kind: CoherenceKind) -> f64 {
    let cm = threshold(kind);
    ((c - cm) / (C_MAX - cm)).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag3, Mat2};
    use crate::qstate::{bell, from_bloch, to_bloch};
    use crate::statefam::tests::{arb_local_unitary, arb_state, tetra_point};
    use crate::statefam::{bell_diagonal, rho1, tilde_state};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn thresholds() {
        assert_abs_diff_eq!(threshold(CoherenceKind::L1), 6f64.sqrt());
        assert_abs_diff_eq!(threshold(CoherenceKind::RelativeEntropy), 2.2320, epsilon = 5e-5);
    }

    #[test]
    fn ensemble_examples() {
        let mixed = DensityMatrix::maximally_mixed();
        for axis in PauliAxis::ALL {
            let e = conditional_ensemble(&mixed, axis);
            for (p, s) in e.branches {
                assert_abs_diff_eq!(p, 0.5, epsilon = 1e-15);
                assert!(s.matrix().max_abs_diff(QubitState::maximally_mixed().matrix()) < 1e-15);
            }
        }
        let e = conditional_ensemble(&bell::psi_minus(), PauliAxis::Z);
        assert_abs_diff_eq!(e.branches[0].0, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(e.branches[1].0, 0.5, epsilon = 1e-15);
        assert!(e.branches[0].1.matrix().max_abs_diff(&Mat2::from_real_diagonal([0.0, 1.0])) < 1e-15);
        assert!(e.branches[1].1.matrix().max_abs_diff(&Mat2::from_real_diagonal([1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn zero_probability_branch_is_dropped() {
        // |00⟩: measuring Z on A never yields −1.
        let rho = from_bloch(&BlochRep::diagonal([0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [0.0, 0.0, 1.0]));
        let e = conditional_ensemble(&rho, PauliAxis::Z);
        assert!(e.branches[1].0 < BRANCH_TOL);
        assert_eq!(e.branches[1].1, QubitState::maximally_mixed());
        assert_abs_diff_eq!(naqc_value(&rho, CoherenceKind::L1), naqc_from_bloch(&to_bloch(&rho), CoherenceKind::L1), epsilon = 1e-12);
    }

    #[test]
    fn value_examples() {
        let singlet = bell_diagonal(&CorrVector::new([-1.0; 3])).unwrap();
        assert_abs_diff_eq!(naqc_value(&singlet, CoherenceKind::L1), 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(naqc_value(&singlet, CoherenceKind::RelativeEntropy), 3.0, epsilon = 1e-10);
        for kind in CoherenceKind::ALL {
            assert_abs_diff_eq!(naqc_value(&DensityMatrix::maximally_mixed(), kind), 0.0, epsilon = 1e-15);
        }
        let rho = bell_diagonal(&CorrVector::new([-0.8, -0.7, -0.6])).unwrap();
        assert_abs_diff_eq!(naqc_value(&rho, CoherenceKind::L1), 2.1, epsilon = 1e-12);
    }

    #[test]
    fn report_examples() {
        let r = naqc_report(&bell::phi_plus(), CoherenceKind::L1);
        assert_abs_diff_eq!(r.value, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.bell_m, 2.0, epsilon = 1e-12);
        assert!(r.achieves_naqc && r.bell_nonlocal);

        let gap = bell_diagonal(&CorrVector::new([-0.72; 3])).unwrap();
        let r = naqc_report(&gap, CoherenceKind::L1);
        assert_abs_diff_eq!(r.value, 2.16, epsilon = 1e-12);
        assert_abs_diff_eq!(r.bell_m, 1.0368, epsilon = 1e-12);
        assert!(!r.achieves_naqc && r.bell_nonlocal);

        let r = naqc_report(&DensityMatrix::maximally_mixed(), CoherenceKind::RelativeEntropy);
        assert!(!r.achieves_naqc && !r.bell_nonlocal);
    }

    #[test]
    fn bell_diag_closed_form_examples() {
        let a = CorrVector::new([-1.0; 3]);
        assert_eq!(naqc_bell_diag(&a, CoherenceKind::L1).unwrap(), 3.0);
        assert_eq!(naqc_bell_diag(&a, CoherenceKind::RelativeEntropy).unwrap(), 3.0);
        assert!(matches!(
            naqc_bell_diag(&CorrVector::new([0.5, 0.5, 0.6]), CoherenceKind::L1),
            Err(Error::OutsideTetrahedron { .. })
        ));
    }

    #[test]
    fn edge_ab_examples() {
        let v1 = 6f64.sqrt() - 2.0;
        let s2 = (1.0 - v1 * v1).sqrt();
        assert_abs_diff_eq!(naqc_edge_ab(v1, s2, CoherenceKind::L1).unwrap(), 6f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(naqc_edge_ab(0.0, 1.0, CoherenceKind::L1).unwrap(), 2.0);
        assert!(naqc_edge_ab(0.5, 0.9, CoherenceKind::L1).is_err());
    }

    #[test]
    fn c5_state_reaches_sqrt6() {
        let k = 1.0 / 3f64.sqrt();
        let rep = BlochRep::new([k; 3], [-k; 3], [[-1.0 / 3.0; 3]; 3]);
        let rho = from_bloch(&rep).require_physical().unwrap();
        assert_abs_diff_eq!(naqc_value(&rho, CoherenceKind::L1), 6f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(
            naqc_under_unitary(&rho, &LocalUnitary::identity(), CoherenceKind::L1),
            6f64.sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn quantifier_examples() {
        let budget = OptBudget { haar_samples: 50, refine_iters: 20, seed: 3 };
        for opt in [false, true] {
            assert_abs_diff_eq!(
                naqc_quantifier(&bell::phi_plus(), CoherenceKind::L1, opt, &budget),
                1.0,
                epsilon = 1e-9
            );
            assert_eq!(
                naqc_quantifier(&DensityMatrix::maximally_mixed(), CoherenceKind::L1, opt, &budget),
                0.0
            );
        }
        // Plain Q vanishes on ρ1(x) for small x; the optimized one does not.
        let rho = rho1(0.139).unwrap();
        assert_eq!(naqc_quantifier(&rho, CoherenceKind::L1, false, &budget), 0.0);
        let budget = OptBudget { haar_samples: 2000, refine_iters: 200, seed: 3 };
        assert!(naqc_quantifier(&rho, CoherenceKind::L1, true, &budget) > 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn bloch_route_matches_definition(rho in arb_state()) {
            let rep = to_bloch(&rho);
            for kind in CoherenceKind::ALL {
                let a = naqc_value(&rho, kind);
                let b = naqc_from_bloch(&rep, kind);
                prop_assert!((a - b).abs() < 1e-10, "{kind}: {a} vs {b}");
            }
        }

        #[test]
        fn ensemble_reassembles(rho in arb_state(), k in 0usize..3) {
            let axis = PauliAxis::ALL[k];
            let e = conditional_ensemble(&rho, axis);
            prop_assert!((e.branches[0].0 + e.branches[1].0 - 1.0).abs() < 1e-12);
            for (a, (p, state)) in e.branches.iter().enumerate() {
                // Oracle: tr_A((Π ⊗ I) ρ) without the right-hand projector.
                let direct = partial_trace_a_op(&(kron(&projector(axis, a), &Mat2::identity()) * *rho.matrix()));
                if *p >= BRANCH_TOL {
                    prop_assert!(state.matrix().scale_real(*p).max_abs_diff(&direct) < 1e-12);
                }
            }
        }

        #[test]
        fn closed_form_matches_definition(v in tetra_point()) {
            let rho = bell_diagonal(&v).unwrap();
            for kind in CoherenceKind::ALL {
                let a = naqc_value(&rho, kind);
                let b = naqc_bell_diag(&v, kind).unwrap();
                prop_assert!((a - b).abs() < 1e-10);
            }
        }

        #[test]
        fn edge_ab_matches_definition(v1 in -1.0..=1.0f64, u in -1.0..=1.0f64) {
            let s2 = u * (1.0 - v1 * v1).sqrt();
            let rho = tilde_state([0.0, -s2, 0.0], [0.0, s2, 0.0], &CorrVector::new([v1, -1.0, v1])).unwrap();
            for kind in CoherenceKind::ALL {
                let a = naqc_value(&rho, kind);
                let b = naqc_edge_ab(v1, s2, kind).unwrap();
                prop_assert!((a - b).abs() < 1e-10, "{kind}: {a} vs {b}");
            }
        }

        #[test]
        fn value_bounded(rho in arb_state()) {
            for kind in CoherenceKind::ALL {
                let c = naqc_value(&rho, kind);
                prop_assert!((0.0..=C_MAX + 1e-9).contains(&c));
            }
        }

        #[test]
        fn convex(a in arb_state(), b in arb_state(), q in 0.0..=1.0f64) {
            let mix = a.mix(&b, q);
            for kind in CoherenceKind::ALL {
                let lhs = naqc_value(&mix, kind);
                let rhs = q * naqc_value(&a, kind) + (1.0 - q) * naqc_value(&b, kind);
                prop_assert!(lhs <= rhs + 1e-9);
            }
        }

        #[test]
        fn closed_form_symmetries(v in tetra_point(), perm in 0usize..6, flips in 0u8..8) {
            let x = v.as_array();
            let p = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]][perm];
            let y = p.map(|i| x[i]);
            for kind in CoherenceKind::ALL {
                prop_assert!((bell_diag_unchecked(x, kind) - bell_diag_unchecked(y, kind)).abs() < 1e-12);
            }
            let z = [0, 1, 2].map(|i| if flips >> i & 1 == 1 { -x[i] } else { x[i] });
            prop_assert!((bell_diag_unchecked(x, CoherenceKind::L1) - bell_diag_unchecked(z, CoherenceKind::L1)).abs() < 1e-12);
        }

        #[test]
        fn l1_mean_inequality_bound(v in tetra_point(), r in crate::statefam::tests::ball(1.0), s in crate::statefam::tests::ball(1.0), u in arb_local_unitary()) {
            if let Ok(rho) = tilde_state(r, s, &v) {
                let bound = (3.0 * v.norm_sqr() + 6.0 * (s[0] * s[0] + s[1] * s[1] + s[2] * s[2])).sqrt();
                prop_assert!(naqc_under_unitary(&rho, &u, CoherenceKind::L1) <= bound + 1e-10);
            }
        }
    }

    #[test]
    fn diagonal_t_bloch_route() {
        let rep = BlochRep::new([0.1, 0.0, -0.05], [0.0, 0.1, 0.05], diag3([-0.5, -0.4, -0.3]));
        let rho = from_bloch(&rep).require_physical().unwrap();
        for kind in CoherenceKind::ALL {
            assert_abs_diff_eq!(naqc_value(&rho, kind), naqc_from_bloch(&rep, kind), epsilon = 1e-12);
        }
    }
}
