//! Monte Carlo scans for states that show NAQC without violating CHSH.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{optimize_with_candidates, HaarCandidates, OptBudget};
use crate::error::{Error, Result};
use crate::geometry::{bisect, critical_edge_b0};
use crate::measures::{bell_m_from_t, teleportation_fidelity, CoherenceKind};
use crate::naqc::{naqc_from_bloch, threshold, NaqcReport};
use crate::par::Exec;
use crate::qstate::{from_bloch, h2, to_bloch, BlochRep, DensityMatrix};
use crate::rng::{derive_seed, substream, StreamRng};
use crate::statefam::{ball_point, line_aoprime_rep, random_state, tetrahedron_point, CorrVector};

const FAMILY_LABEL: u64 = 0x4641_4d49;
/// Rejection-sampling attempts per state before giving up.
pub const MAX_ATTEMPTS: usize = 1_000_000;
/// Counterexample records kept in a summary.
pub const MAX_RECORDS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Uniform `v` in the tetrahedron, `r`, `s` uniform in the unit ball,
    /// kept when physical.
    DiagonalT,
    BellDiagonal,
    /// `v = (0, −1, 0)`, `r = (0, −s2, 0)`, `s = (0, s2, 0)`.
    OctahedronVertex,
    /// `v = −(1, 1, 1)/√2` with `|r_i + s_i| ≤ 1 + v0`, `|r_i − s_i| ≤ 1 − v0`.
    V0Family,
    /// `v = (a0, a0, 1 + 2a0)` at `a0 = −1/√2`.
    LineAOprime,
    /// Ginibre states of rank uniform in 1..=4.
    Random,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::DiagonalT,
        Family::BellDiagonal,
        Family::OctahedronVertex,
        Family::V0Family,
        Family::LineAOprime,
        Family::Random,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Family::DiagonalT => "diagonal-t",
            Family::BellDiagonal => "bell-diagonal",
            Family::OctahedronVertex => "octahedron-vertex",
            Family::V0Family => "v0-family",
            Family::LineAOprime => "line-aoprime",
            Family::Random => "random",
        }
    }

    /// Families whose correlation matrix is diagonal, so the teleportation
    /// fidelity formula applies.
    pub fn has_diagonal_t(self) -> bool {
        self != Family::Random
    }

    /// Draws state `index` of the family from its own substream.
    pub fn sample(self, seed: u64, index: usize) -> Result<Sample> {
        let mut rng = substream(derive_seed(seed, FAMILY_LABEL), index as u64);
        let mut rejected = 0;
        loop {
            if let Some(rep) = self.propose(&mut rng) {
                let rho = from_bloch(&rep);
                if rho.is_physical() {
                    return Ok(Sample { rep, rho, rejected });
                }
            }
            rejected += 1;
            if rejected >= MAX_ATTEMPTS {
                return Err(Error::Unphysical(format!(
                    "{}: no physical sample after {MAX_ATTEMPTS} attempts",
                    self.tag()
                )));
            }
        }
    }

    fn propose(self, rng: &mut StreamRng) -> Option<BlochRep> {
        match self {
            Family::DiagonalT => {
                let v = tetrahedron_point(rng);
                Some(BlochRep::diagonal(ball_point(rng), ball_point(rng), v))
            }
            Family::BellDiagonal => Some(BlochRep::diagonal([0.0; 3], [0.0; 3], tetrahedron_point(rng))),
            Family::OctahedronVertex => {
                let s2 = rng.random_range(-1.0..=1.0);
                Some(BlochRep::diagonal([0.0, -s2, 0.0], [0.0, s2, 0.0], [0.0, -1.0, 0.0]))
            }
            Family::V0Family => {
                let v0 = -FRAC_1_SQRT_2;
                let (bu, bd) = (1.0 + v0, 1.0 - v0);
                let mut r = [0.0; 3];
                let mut s = [0.0; 3];
                for k in 0..3 {
                    let u = rng.random_range(-bu..=bu);
                    let d = rng.random_range(-bd..=bd);
                    r[k] = 0.5 * (u + d);
                    s[k] = 0.5 * (u - d);
                }
                Some(BlochRep::diagonal(r, s, [v0; 3]))
            }
            Family::LineAOprime => {
                let a0 = -FRAC_1_SQRT_2;
                let b1 = (1.0 + 0.5 * a0).min(0.5 * (1.0 - a0));
                let b2 = (-4.0 * a0 * (1.0 + a0)).sqrt();
                let s = [
                    rng.random_range(-b1..=b1),
                    rng.random_range(-b2..=b2),
                    rng.random_range(-(1.0 + a0)..=1.0 + a0),
                ];
                line_aoprime_rep(a0, s).ok()
            }
            Family::Random => {
                let rank = rng.random_range(1..=4);
                random_state(rng, rank).ok().map(|rho| to_bloch(&rho))
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub rep: BlochRep,
    pub rho: DensityMatrix,
    pub rejected: usize,
}

static RE_EDGE_B0: LazyLock<f64> =
    LazyLock::new(|| critical_edge_b0(CoherenceKind::RelativeEntropy).expect("edge threshold bracket"));

/// `v` on edge AC, `(−1, v, v)`, where the Bell-diagonal relative-entropy
/// NAQC equals its threshold.
static RE_BELL_DIAG_V: LazyLock<f64> = LazyLock::new(|| {
    let cm = threshold(CoherenceKind::RelativeEntropy);
    let f = |v: f64| 3.0 - h2(0.0) - 2.0 * h2(0.5 * (1.0 + v)) - cm;
    bisect(f, -1.0, -0.5, 1e-15).expect("Bell-diagonal threshold bracket")
});

/// Infimum of the teleportation fidelity over diagonal-T states with NAQC
/// (or over Bell-diagonal states when `bell_diagonal` is set).
pub fn fidelity_bound(kind: CoherenceKind, bell_diagonal: bool) -> f64 {
    match (kind, bell_diagonal) {
        (CoherenceKind::L1, false) => 6f64.sqrt() / 3.0,
        (CoherenceKind::L1, true) => (3.0 + 6f64.sqrt()) / 6.0,
        (CoherenceKind::RelativeEntropy, false) => 0.5 + (1.0 + 2.0 * *RE_EDGE_B0) / 6.0,
        (CoherenceKind::RelativeEntropy, true) => 0.5 + (1.0 - 2.0 * *RE_BELL_DIAG_V) / 6.0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub family: Family,
    pub n: usize,
    pub kind: CoherenceKind,
    /// Maximize over local unitaries before comparing with the threshold.
    pub optimize: bool,
    pub budget: OptBudget,
}

/// One evaluated state, with the Bloch data needed to rebuild it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub index: usize,
    pub bloch: BlochRep,
    pub value: f64,
    pub bell_m: f64,
    pub fidelity: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub config: ScanConfig,
    pub n_states: usize,
    pub rejected: usize,
    pub bell_nonlocal: usize,
    pub naqc: usize,
    /// States with NAQC and `M ≤ 1`.
    pub counterexamples: usize,
    pub max_value: f64,
    /// Largest `C^na − C^m` among states with `M ≤ 1`.
    pub max_margin_bell_local: Option<f64>,
    /// State attaining `max_margin_bell_local`.
    pub worst: Option<StateRecord>,
    pub fidelity_bound: Option<f64>,
    pub fidelity_checked: usize,
    pub fidelity_violations: usize,
    pub min_fidelity_naqc: Option<f64>,
    pub counterexample_records: Vec<StateRecord>,
    pub failed_samples: usize,
}

impl ScanSummary {
    fn empty(config: ScanConfig) -> Self {
        let fidelity_bound =
            config.family.has_diagonal_t().then(|| fidelity_bound(config.kind, config.family == Family::BellDiagonal));
        ScanSummary {
            config,
            n_states: 0,
            rejected: 0,
            bell_nonlocal: 0,
            naqc: 0,
            counterexamples: 0,
            max_value: f64::NEG_INFINITY,
            max_margin_bell_local: None,
            worst: None,
            fidelity_bound,
            fidelity_checked: 0,
            fidelity_violations: 0,
            min_fidelity_naqc: None,
            counterexample_records: Vec::new(),
            failed_samples: 0,
        }
    }

    /// No counterexamples and no fidelity violations.
    pub fn passed(&self) -> bool {
        self.counterexamples == 0 && self.fidelity_violations == 0 && self.failed_samples == 0
    }

    fn merge(mut self, other: ScanSummary) -> ScanSummary {
        self.n_states += other.n_states;
        self.rejected += other.rejected;
        self.bell_nonlocal += other.bell_nonlocal;
        self.naqc += other.naqc;
        self.counterexamples += other.counterexamples;
        self.max_value = self.max_value.max(other.max_value);
        if other.max_margin_bell_local > self.max_margin_bell_local {
            self.max_margin_bell_local = other.max_margin_bell_local;
            self.worst = other.worst;
        }
        self.fidelity_checked += other.fidelity_checked;
        self.fidelity_violations += other.fidelity_violations;
        self.min_fidelity_naqc = min_opt(self.min_fidelity_naqc, other.min_fidelity_naqc);
        let room = MAX_RECORDS.saturating_sub(self.counterexample_records.len());
        self.counterexample_records.extend(other.counterexample_records.into_iter().take(room));
        self.failed_samples += other.failed_samples;
        self
    }
}

fn min_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

pub fn hierarchy_scan(config: &ScanConfig) -> ScanSummary {
    hierarchy_scan_with(config, Exec::default())
}

/// Samples `config.n` states and tallies NAQC and CHSH verdicts. States are
/// processed in fixed chunks and merged in index order, so the summary does
/// not depend on `exec`.
pub fn hierarchy_scan_with(config: &ScanConfig, exec: Exec) -> ScanSummary {
    let candidates = config.optimize.then(|| HaarCandidates::new(&config.budget, exec));
    let cfg = *config;
    exec.fold_chunks(
        config.n,
        || ScanSummary::empty(cfg),
        |acc, i| {
            let sample = match cfg.family.sample(cfg.budget.seed, i) {
                Ok(s) => s,
                Err(_) => {
                    acc.failed_samples += 1;
                    return;
                }
            };
            acc.n_states += 1;
            acc.rejected += sample.rejected;
            let m = bell_m_from_t(&sample.rep.t);
            let plain = naqc_from_bloch(&sample.rep, cfg.kind);
            let (value, bloch) = match &candidates {
                Some(c) => {
                    let r = optimize_with_candidates(&sample.rho, cfg.kind, c, cfg.budget.refine_iters, Exec::Sequential);
                    (r.value, r.argmax.apply_bloch(&sample.rep))
                }
                None => (plain, sample.rep),
            };
            let report = NaqcReport::from_values(cfg.kind, value, m);
            let fidelity = cfg
                .family
                .has_diagonal_t()
                .then(|| teleportation_fidelity(&CorrVector([0, 1, 2].map(|k| sample.rep.t[k][k]))));
            let record = StateRecord { index: i, bloch, value, bell_m: m, fidelity };

            acc.max_value = acc.max_value.max(value);
            if report.bell_nonlocal {
                acc.bell_nonlocal += 1;
            } else if Some(report.margin()) > acc.max_margin_bell_local {
                acc.max_margin_bell_local = Some(report.margin());
                acc.worst = Some(record);
            }
            if report.achieves_naqc {
                acc.naqc += 1;
            }
            if report.is_counterexample() {
                acc.counterexamples += 1;
                if acc.counterexample_records.len() < MAX_RECORDS {
                    acc.counterexample_records.push(record);
                }
            }
            if let (Some(f), Some(bound)) = (fidelity, acc.fidelity_bound) {
                if plain > threshold(cfg.kind) {
                    acc.fidelity_checked += 1;
                    acc.min_fidelity_naqc = min_opt(acc.min_fidelity_naqc, Some(f));
                    if f <= bound {
                        acc.fidelity_violations += 1;
                    }
                }
            }
        },
        ScanSummary::merge,
    )
}
