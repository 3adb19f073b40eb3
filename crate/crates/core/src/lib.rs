//! Nonlocal advantage of quantum coherence (NAQC) and Bell-CHSH
//! nonlocality for two-qubit states.
//!
//! The crate evaluates the NAQC functional for the l1-norm and
//! relative-entropy coherence measures, compares it against the Bell-CHSH
//! quantity `M(ρ)`, and provides the state families, geometric constructions
//! and optimizers needed to probe whether every NAQC state violates CHSH.
//!
//! ```
//! use naqc::{naqc_report, bell_diagonal, CorrVector, CoherenceKind};
//!
//! let rho = bell_diagonal(&CorrVector::new([-0.9, -0.9, -0.9])).unwrap();
//! let r = naqc_report(&rho, CoherenceKind::L1);
//! assert!(r.achieves_naqc && r.bell_nonlocal);
//! ```

pub mod error;
pub mod geometry;
pub mod linalg;
pub mod measures;
pub mod naqc;
pub mod optimize;
pub mod par;
pub mod qstate;
pub mod rng;
pub mod statefam;
pub mod unitary;
pub mod verify;

pub use error::{Error, Result};
pub use measures::{bell_m, bmax, coherence, teleportation_fidelity, CoherenceKind, PauliAxis};
pub use naqc::{
    conditional_ensemble, naqc_bell_diag, naqc_edge_ab, naqc_from_bloch, naqc_quantifier, naqc_report,
    naqc_under_unitary, naqc_value, threshold, ConditionalEnsemble, NaqcReport,
};
pub use optimize::{hierarchy_scan, maximize_over_w, max_c4_over_t, optimized_naqc, OptBudget};
pub use par::Exec;
pub use qstate::{from_bloch, to_bloch, BlochRep, DensityMatrix, QubitState};
pub use statefam::{
    bell_diagonal, edge_constraints, line_aoprime_state, rho1, symmetric_family_state, tilde_state,
    CorrVector, Edge, SymmetricFamilyParams,
};
pub use unitary::LocalUnitary;
