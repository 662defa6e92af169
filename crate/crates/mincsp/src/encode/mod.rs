//! Encoders between concrete problems and MIN-kCSP instances.
//!
//! Every encoder preserves the objective exactly: for each source-problem
//! assignment, the direct evaluator and the encoded instance agree as exact
//! rationals. Encoders also attach per-constraint fragility metadata where
//! the constraint family is 0/1-valued.

pub mod gb;
pub mod hier;
pub mod ksat;
pub mod mwc;
pub mod ncp;
pub mod ugp;

use crate::csp::PenaltyTable;
use std::collections::BTreeMap;

/// Accumulates numerators per variable subset, merging repeated constraints
/// over the same subset into one table. BTreeMap keeps table order (and so
/// serialized instances) deterministic.
pub(crate) struct TableBuilder {
    entries: usize,
    map: BTreeMap<Vec<usize>, Vec<u64>>,
    /// per-table upper bound on any entry: the sum of added weights
    capacity: BTreeMap<Vec<usize>, u64>,
}

impl TableBuilder {
    pub(crate) fn new(domain: usize, k: usize) -> Self {
        TableBuilder {
            entries: domain.pow(k as u32),
            map: BTreeMap::new(),
            capacity: BTreeMap::new(),
        }
    }

    /// Numerator buffer for `vars`, created zeroed on first use. `weight` is
    /// the maximum this addition contributes to any single entry.
    pub(crate) fn slot(&mut self, vars: &[usize], weight: u64) -> &mut Vec<u64> {
        *self.capacity.entry(vars.to_vec()).or_insert(0) += weight;
        self.map
            .entry(vars.to_vec())
            .or_insert_with(|| vec![0; self.entries])
    }

    /// Largest per-table capacity: the tightest valid scale `eta`.
    pub(crate) fn max_capacity(&self) -> u64 {
        self.capacity.values().copied().max().unwrap_or(0)
    }

    pub(crate) fn finish(self) -> Vec<PenaltyTable> {
        self.map
            .into_iter()
            .map(|(vars, numerators)| PenaltyTable::new(vars, numerators))
            .collect()
    }
}
