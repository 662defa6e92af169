//! Solve reports: exact cost, assignment, solver parameters, RNG seed,
//! timings and per-phase diagnostics, serialized as JSON.

use crate::cost::ExactCost;
use serde::{Deserialize, Serialize};

/// Wall-clock phase buckets. `guess_setup_ns` covers only the size-free
/// per-guess machinery (sample drawing, guess decoding, bookkeeping); all
/// work that scales with the instance (estimator argmins, exact-b greedy
/// rounds, clear-cut scans) lands in `dense_ns`, and the constrained finish
/// in `finish_ns`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub prepass_ns: u64,
    pub guess_setup_ns: u64,
    pub dense_ns: u64,
    pub finish_ns: u64,
    pub total_ns: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReportDetail {
    Fragile(crate::fragile::FragileDetail),
    Rigid(crate::rigid::RigidDetail),
    Hierarchical(crate::rigid::HierDetail),
    Oracle(OracleDetail),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleDetail {
    pub method: String,
    pub cap: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub algorithm: String,
    pub cost: ExactCost,
    pub assignment: Vec<usize>,
    pub seed: u64,
    pub timings: PhaseTimings,
    pub detail: ReportDetail,
}

impl SolveReport {
    /// The report with timings zeroed: every remaining field is a pure
    /// function of (instance, parameters, seed), so reruns must match this
    /// view byte for byte.
    pub fn deterministic_view(&self) -> SolveReport {
        let mut view = self.clone();
        view.timings = PhaseTimings::default();
        view
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn canonical_json(&self) -> String {
        self.deterministic_view().to_json()
    }

    pub fn from_json(text: &str) -> crate::error::Result<SolveReport> {
        Ok(serde_json::from_str(text)?)
    }
}
