//! Coherence of a qubit in a Pauli eigenbasis, the Bell-CHSH quantity M and
//! teleportation fidelity.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues_symmetric3, mat3_mul, mat3_transpose, norm3, CMat, Mat2, Real3, C64};
use crate::qstate::{h2, to_bloch, von_neumann_entropy, DensityMatrix, QubitState};
use crate::statefam::CorrVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoherenceKind {
    L1,
    RelativeEntropy,
}

impl CoherenceKind {
    pub const ALL: [CoherenceKind; 2] = [CoherenceKind::L1, CoherenceKind::RelativeEntropy];

    pub fn tag(self) -> &'static str {
        match self {
            CoherenceKind::L1 => "l1",
            CoherenceKind::RelativeEntropy => "re",
        }
    }
}

impl fmt::Display for CoherenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for CoherenceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(CoherenceKind::L1),
            "re" | "relative-entropy" | "relative_entropy" => Ok(CoherenceKind::RelativeEntropy),
            other => Err(Error::Domain(format!("unknown coherence kind '{other}'"))),
        }
    }
}

/// Index of a Pauli operator, 1 = X, 2 = Y, 3 = Z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliAxis(u8);

impl PauliAxis {
    pub const X: PauliAxis = PauliAxis(1);
    pub const Y: PauliAxis = PauliAxis(2);
    pub const Z: PauliAxis = PauliAxis(3);
    pub const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    pub fn new(index: u8) -> Result<Self> {
        if (1..=3).contains(&index) {
            Ok(PauliAxis(index))
        } else {
            Err(Error::Domain(format!("Pauli axis {index} not in 1..=3")))
        }
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Zero-based position in a 3-vector.
    pub fn slot(self) -> usize {
        self.0 as usize - 1
    }
}

/// Columns are the +1 and −1 eigenvectors of σ_axis: (1, ±1)/√2 for X,
/// (1, ±i)/√2 for Y, the computational basis for Z.
fn eigenbasis(axis: PauliAxis) -> Mat2 {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let re = |x: f64| C64::new(x, 0.0);
    match axis.0 {
        1 => CMat([[re(r), re(r)], [re(r), re(-r)]]),
        2 => CMat([[re(r), re(r)], [C64::new(0.0, r), C64::new(0.0, -r)]]),
        _ => Mat2::identity(),
    }
}

/// Coherence of `state` in the eigenbasis of σ_basis.
///
/// l1: sum of off-diagonal magnitudes. Relative entropy: `S(ρ_diag) − S(ρ)`.
pub fn coherence(state: &QubitState, basis: PauliAxis, kind: CoherenceKind) -> f64 {
    let v = eigenbasis(basis);
    let m = v.adjoint() * *state.matrix() * v;
    match kind {
        CoherenceKind::L1 => m.get(0, 1).norm() + m.get(1, 0).norm(),
        CoherenceKind::RelativeEntropy => {
            let diag = h2(m.get(0, 0).re);
            let s = von_neumann_entropy(state).unwrap_or(0.0);
            (diag - s).max(0.0)
        }
    }
}

/// [`coherence`] for the qubit `(I + n·σ)/2`, evaluated in closed form.
#[inline]
pub fn coherence_of_bloch(n: &[f64; 3], basis: PauliAxis, kind: CoherenceKind) -> f64 {
    let nj = n[basis.slot()];
    let len2 = n[0] * n[0] + n[1] * n[1] + n[2] * n[2];
    match kind {
        CoherenceKind::L1 => (len2 - nj * nj).max(0.0).sqrt(),
        CoherenceKind::RelativeEntropy => {
            let len = len2.sqrt().min(1.0);
            (h2(0.5 * (1.0 + nj)) - h2(0.5 * (1.0 + len))).max(0.0)
        }
    }
}

/// Sum of the two largest eigenvalues of `TᵀT`.
pub fn bell_m_from_t(t: &Real3) -> f64 {
    let e = eigenvalues_symmetric3(&mat3_mul(&mat3_transpose(t), t));
    e[0] + e[1]
}

/// Bell-CHSH quantity `M(ρ)`; the state violates CHSH iff `M > 1`.
pub fn bell_m(rho: &DensityMatrix) -> f64 {
    bell_m_from_t(&to_bloch(rho).t)
}

/// Maximal CHSH expectation `2√M`.
pub fn bmax(rho: &DensityMatrix) -> f64 {
    2.0 * bell_m(rho).sqrt()
}

/// Average teleportation fidelity `1/2 + Σ|v_i|/6` of a diagonal-T channel.
pub fn teleportation_fidelity(v: &CorrVector) -> f64 {
    0.5 + v.as_array().iter().map(|x| x.abs()).sum::<f64>() / 6.0
}

/// Length of a Bloch vector; `QubitState::bloch_vector` composed with a norm.
pub fn bloch_length(state: &QubitState) -> f64 {
    norm3(&state.bloch_vector())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::diag3;
    use crate::qstate::{bell, BlochRep, from_bloch};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn qubit(n: [f64; 3]) -> QubitState {
        QubitState::from_bloch_vector(n).unwrap()
    }

    #[test]
    fn coherence_examples() {
        assert_abs_diff_eq!(coherence(&qubit([0.0, 0.0, 0.7]), PauliAxis::Z, CoherenceKind::L1), 0.0);
        assert_abs_diff_eq!(
            coherence(&qubit([-0.6, 0.0, 0.0]), PauliAxis::Z, CoherenceKind::L1),
            0.6,
            epsilon = 1e-15
        );
        for i in PauliAxis::ALL {
            for j in PauliAxis::ALL {
                if i == j {
                    continue;
                }
                let mut n = [0.0; 3];
                n[i.slot()] = -0.35;
                let want = 1.0 - h2(0.5 * (1.0 + 0.35));
                let got = coherence(&qubit(n), j, CoherenceKind::RelativeEntropy);
                assert_abs_diff_eq!(got, want, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("l1".parse::<CoherenceKind>().unwrap(), CoherenceKind::L1);
        assert_eq!("RE".parse::<CoherenceKind>().unwrap(), CoherenceKind::RelativeEntropy);
        assert!("l2".parse::<CoherenceKind>().is_err());
        assert!(PauliAxis::new(0).is_err());
        assert!(PauliAxis::new(4).is_err());
    }

    #[test]
    fn bell_m_examples() {
        assert_abs_diff_eq!(bell_m(&bell::psi_minus()), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(bmax(&bell::psi_minus()), 2.0 * 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(bell_m(&DensityMatrix::maximally_mixed()), 0.0, epsilon = 1e-15);
        let rho = from_bloch(&BlochRep::diagonal([0.0; 3], [0.0; 3], [-0.8, -0.6, 0.5]));
        assert_abs_diff_eq!(bell_m(&rho), 0.64 + 0.36, epsilon = 1e-12);
        assert_abs_diff_eq!(bell_m_from_t(&diag3([-0.72; 3])), 2.0 * 0.72 * 0.72, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_examples() {
        assert_abs_diff_eq!(teleportation_fidelity(&CorrVector::new([-1.0; 3])), 1.0);
        assert_abs_diff_eq!(teleportation_fidelity(&CorrVector::new([0.0; 3])), 0.5);
    }

    /// Phase convention of the eigenbasis does not matter: any rephasing of
    /// the eigenvectors gives the same values.
    #[test]
    fn insensitive_to_eigenvector_phases() {
        let state = qubit([0.3, -0.5, 0.4]);
        for axis in PauliAxis::ALL {
            let v = eigenbasis(axis);
            let phases = CMat([
                [C64::from_polar(1.0, 0.7), C64::new(0.0, 0.0)],
                [C64::new(0.0, 0.0), C64::from_polar(1.0, -2.1)],
            ]);
            let w = v * phases;
            let m = w.adjoint() * *state.matrix() * w;
            let l1 = 2.0 * m.get(0, 1).norm();
            assert_abs_diff_eq!(l1, coherence(&state, axis, CoherenceKind::L1), epsilon = 1e-14);
            let re = h2(m.get(0, 0).re) - von_neumann_entropy(&state).unwrap();
            assert_abs_diff_eq!(
                re,
                coherence(&state, axis, CoherenceKind::RelativeEntropy),
                epsilon = 1e-14
            );
        }
    }

    fn ball_point() -> impl Strategy<Value = [f64; 3]> {
        (0.0..=1.0f64, -1.0..=1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(u, z, phi)| {
            let len = u.cbrt();
            let rho = (1.0 - z * z).sqrt();
            [len * rho * phi.cos(), len * rho * phi.sin(), len * z]
        })
    }

    proptest! {
        #[test]
        fn closed_form_matches_matrix_route(n in ball_point()) {
            let q = qubit(n);
            for axis in PauliAxis::ALL {
                for kind in CoherenceKind::ALL {
                    let a = coherence(&q, axis, kind);
                    let b = coherence_of_bloch(&n, axis, kind);
                    prop_assert!((a - b).abs() < 1e-10, "{axis:?} {kind}: {a} vs {b}");
                }
            }
        }

        #[test]
        fn l1_complementarity(n in ball_point()) {
            let q = qubit(n);
            let total: f64 = PauliAxis::ALL.iter().map(|&a| coherence(&q, a, CoherenceKind::L1)).sum();
            prop_assert!(total <= 6f64.sqrt() + 1e-10);
        }

        #[test]
        fn coherence_nonnegative_and_zero_on_axis(n in ball_point(), k in 0usize..3, x in -1.0..=1.0f64) {
            let q = qubit(n);
            for axis in PauliAxis::ALL {
                for kind in CoherenceKind::ALL {
                    prop_assert!(coherence(&q, axis, kind) >= 0.0);
                }
            }
            let mut m = [0.0; 3];
            m[k] = x;
            let axis = PauliAxis::ALL[k];
            for kind in CoherenceKind::ALL {
                prop_assert!(coherence(&qubit(m), axis, kind) <= 1e-10);
            }
        }

        #[test]
        fn fidelity_range_on_tetrahedron(v in crate::statefam::tests::tetra_point()) {
            let f = teleportation_fidelity(&v);
            prop_assert!((0.5..=1.0 + 1e-12).contains(&f));
        }
    }
}
