//! MIN-kCSP instances: variables over a constant-size domain, arity-k
//! penalty tables with integer numerators over a shared scale `eta`, and the
//! exact evaluation primitives every solver builds on (objective, one-variable
//! rewrites, per-variable costs `b`).

use crate::cost::ExactCost;
use crate::error::{Error, Result};
use crate::fragility::LogicalConstraint;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Hard ceiling on constraint arity; tables hold `|D|^k` entries.
pub const MAX_ARITY: usize = 6;

/// Value domain `{0, .., size-1}`, constant per instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domain {
    size: usize,
}

impl Domain {
    pub fn new(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::invalid(format!("domain size {size} < 2")));
        }
        Ok(Domain { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }
}

/// A total map variable -> domain value; what every solver produces and
/// every evaluator scores.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(Vec<usize>);

impl Assignment {
    pub fn new(values: Vec<usize>) -> Self {
        Assignment(values)
    }

    pub fn constant(n: usize, value: usize) -> Self {
        Assignment(vec![value; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[usize] {
        &self.0
    }

    pub fn get(&self, v: usize) -> usize {
        self.0[v]
    }

    /// Copy with position `v` set to `i`; bounds are checked by
    /// [`CspInstance::rewrite`], which knows the domain.
    pub(crate) fn with_value(&self, v: usize, i: usize) -> Assignment {
        let mut out = self.0.clone();
        out[v] = i;
        Assignment(out)
    }

    pub(crate) fn set(&mut self, v: usize, i: usize) {
        self.0[v] = i;
    }

    pub fn hamming(&self, other: &Assignment) -> usize {
        self.0
            .iter()
            .zip(other.0.iter())
            .filter(|(a, b)| a != b)
            .count()
    }
}

/// One merged penalty table: the (sorted) variable subset it constrains and
/// one numerator per local assignment in canonical row-major order
/// (`sum_j local[j] * |D|^(k-1-j)`, variables ascending).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PenaltyTable {
    pub vars: Vec<usize>,
    pub numerators: Vec<u64>,
}

impl PenaltyTable {
    pub fn new(vars: Vec<usize>, numerators: Vec<u64>) -> Self {
        PenaltyTable { vars, numerators }
    }
}

/// Canonical index of a local assignment.
pub fn local_index(domain: usize, locals: &[usize]) -> usize {
    let mut idx = 0;
    for &v in locals {
        idx = idx * domain + v;
    }
    idx
}

/// Index of `x` restricted to `vars`, with up to two positional overrides.
#[inline]
fn index_with(
    domain: usize,
    vars: &[usize],
    x: &[usize],
    o1: Option<(usize, usize)>,
    o2: Option<(usize, usize)>,
) -> usize {
    let mut idx = 0;
    for &v in vars {
        let mut val = x[v];
        if let Some((ov, oi)) = o1 {
            if ov == v {
                val = oi;
            }
        }
        if let Some((ov, oi)) = o2 {
            if ov == v {
                val = oi;
            }
        }
        idx = idx * domain + val;
    }
    idx
}

/// On-demand penalty evaluation for structured instances (a Gale-Berlekamp
/// board at m = 500 has 250 000 pair constraints computable from the matrix;
/// materializing tables for it is wasteful).
pub trait PenaltySource: Send + Sync + std::fmt::Debug {
    /// Numerator of the table over `vars` (a sorted size-k subset) at the
    /// local assignment `local`; 0 when no constraint exists on `vars`.
    fn numerator(&self, vars: &[usize], local: &[usize]) -> u64;
    /// Visit every subset carrying a table, in a fixed deterministic order.
    fn visit_subsets(&self, visit: &mut dyn FnMut(&[usize]));
    /// Visit every table subset containing `v`.
    fn visit_subsets_containing(&self, v: usize, visit: &mut dyn FnMut(&[usize]));
    fn table_count(&self) -> usize;
}

#[derive(Clone, Debug)]
pub(crate) struct ExplicitTables {
    pub(crate) tables: Vec<PenaltyTable>,
    /// Table indices containing each variable; gives O(tables-on-v) `b`.
    pub(crate) by_var: Vec<Vec<u32>>,
}

#[derive(Clone, Debug)]
pub(crate) enum Store {
    Explicit(ExplicitTables),
    Implicit(Arc<dyn PenaltySource>),
}

/// A MIN-kCSP instance. Immutable after construction and safe to share
/// across threads; all evaluation methods are pure.
#[derive(Clone, Debug)]
pub struct CspInstance {
    n: usize,
    k: usize,
    domain: Domain,
    eta: u64,
    store: Store,
    /// Pre-merge 0/1 constraints (fragility metadata); `None` when the
    /// instance was loaded from JSON or is implicit.
    pub(crate) logical: Option<Vec<LogicalConstraint>>,
}

impl CspInstance {
    /// Explicit instance; enforces the normalized-scale invariant
    /// `0 <= numerator <= eta` on every table entry.
    pub fn explicit(
        n: usize,
        k: usize,
        domain: Domain,
        eta: u64,
        tables: Vec<PenaltyTable>,
    ) -> Result<Self> {
        let inst = Self::explicit_weighted(n, k, domain, eta, tables)?;
        if let Store::Explicit(es) = &inst.store {
            for t in &es.tables {
                if let Some(&bad) = t.numerators.iter().find(|&&u| u > eta) {
                    return Err(Error::invalid(format!(
                        "numerator {bad} exceeds scale eta = {eta}"
                    )));
                }
            }
        }
        Ok(inst)
    }

    /// Explicit instance whose numerators may exceed `eta`. Produced by
    /// arity padding, where per-table weights are bounded by a combinatorial
    /// expression rather than 1; evaluation is unaffected.
    pub fn explicit_weighted(
        n: usize,
        k: usize,
        domain: Domain,
        eta: u64,
        mut tables: Vec<PenaltyTable>,
    ) -> Result<Self> {
        if k == 0 || k > MAX_ARITY {
            return Err(Error::invalid(format!("arity {k} outside 1..={MAX_ARITY}")));
        }
        if n < k {
            return Err(Error::invalid(format!("n = {n} smaller than arity {k}")));
        }
        if eta == 0 {
            return Err(Error::invalid("eta must be positive".to_string()));
        }
        let entries = domain
            .size()
            .checked_pow(k as u32)
            .ok_or_else(|| Error::invalid("|D|^k overflows".to_string()))?;
        for t in &tables {
            if t.vars.len() != k {
                return Err(Error::invalid(format!(
                    "table over {:?} has arity {} != {k}",
                    t.vars,
                    t.vars.len()
                )));
            }
            if t.vars.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid(format!(
                    "table vars {:?} not sorted/distinct",
                    t.vars
                )));
            }
            if *t.vars.last().unwrap() >= n {
                return Err(Error::invalid(format!(
                    "table vars {:?} out of range for n = {n}",
                    t.vars
                )));
            }
            if t.numerators.len() != entries {
                return Err(Error::invalid(format!(
                    "table over {:?} has {} numerators, expected {entries}",
                    t.vars,
                    t.numerators.len()
                )));
            }
        }
        tables.sort_by(|a, b| a.vars.cmp(&b.vars));
        if tables.windows(2).any(|w| w[0].vars == w[1].vars) {
            return Err(Error::invalid(
                "more than one table for the same subset; merge before construction".to_string(),
            ));
        }
        let mut by_var = vec![Vec::new(); n];
        for (ti, t) in tables.iter().enumerate() {
            for &v in &t.vars {
                by_var[v].push(ti as u32);
            }
        }
        Ok(CspInstance {
            n,
            k,
            domain,
            eta,
            store: Store::Explicit(ExplicitTables { tables, by_var }),
            logical: None,
        })
    }

    /// Implicit instance backed by a penalty-evaluation source.
    pub fn implicit(
        n: usize,
        k: usize,
        domain: Domain,
        eta: u64,
        source: Arc<dyn PenaltySource>,
    ) -> Result<Self> {
        if k == 0 || k > MAX_ARITY {
            return Err(Error::invalid(format!("arity {k} outside 1..={MAX_ARITY}")));
        }
        if n < k {
            return Err(Error::invalid(format!("n = {n} smaller than arity {k}")));
        }
        if eta == 0 {
            return Err(Error::invalid("eta must be positive".to_string()));
        }
        Ok(CspInstance {
            n,
            k,
            domain,
            eta,
            store: Store::Implicit(source),
            logical: None,
        })
    }

    /// Attach pre-merge fragility metadata (one 0/1 mask per logical
    /// constraint, over its own support).
    pub fn with_fragility(mut self, logical: Vec<LogicalConstraint>) -> Result<Self> {
        for c in &logical {
            c.validate(self.n, self.k, self.domain.size())?;
        }
        self.logical = Some(logical);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn domain_size(&self) -> usize {
        self.domain.size()
    }

    pub fn eta(&self) -> u64 {
        self.eta
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self.store, Store::Explicit(_))
    }

    pub fn table_count(&self) -> usize {
        match &self.store {
            Store::Explicit(es) => es.tables.len(),
            Store::Implicit(src) => src.table_count(),
        }
    }

    /// Stored tables, when explicit.
    pub fn tables(&self) -> Option<&[PenaltyTable]> {
        match &self.store {
            Store::Explicit(es) => Some(&es.tables),
            Store::Implicit(_) => None,
        }
    }

    pub(crate) fn check_assignment(&self, x: &Assignment) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::invalid(format!(
                "assignment length {} != n = {}",
                x.len(),
                self.n
            )));
        }
        if let Some(&bad) = x.values().iter().find(|&&v| v >= self.domain.size()) {
            return Err(Error::invalid(format!(
                "assignment value {bad} outside domain of size {}",
                self.domain.size()
            )));
        }
        Ok(())
    }

    pub(crate) fn check_var_value(&self, v: usize, i: usize) -> Result<()> {
        if v >= self.n {
            return Err(Error::invalid(format!("variable {v} out of range")));
        }
        if i >= self.domain.size() {
            return Err(Error::invalid(format!("value {i} outside domain")));
        }
        Ok(())
    }

    /// Copy of `x` with variable `v` set to `i`; `rewrite(x, v, x_v) == x`.
    pub fn rewrite(&self, x: &Assignment, v: usize, i: usize) -> Result<Assignment> {
        self.check_assignment(x)?;
        self.check_var_value(v, i)?;
        Ok(x.with_value(v, i))
    }

    /// Total penalty mass of `x`, exactly: the sum of all table numerators
    /// at `x` over `eta`. Runs in O(#tables * k) in explicit mode.
    pub fn objective(&self, x: &Assignment) -> Result<ExactCost> {
        self.check_assignment(x)?;
        Ok(ExactCost::new(self.objective_num(x.values()), self.eta))
    }

    pub(crate) fn objective_num(&self, x: &[usize]) -> u64 {
        let d = self.domain.size();
        match &self.store {
            Store::Explicit(es) => es
                .tables
                .iter()
                .map(|t| t.numerators[index_with(d, &t.vars, x, None, None)])
                .sum(),
            Store::Implicit(src) => {
                let mut total = 0u64;
                let mut local = [0usize; MAX_ARITY];
                src.visit_subsets(&mut |vars| {
                    for (slot, &v) in vars.iter().enumerate() {
                        local[slot] = x[v];
                    }
                    total += src.numerator(vars, &local[..vars.len()]);
                });
                total
            }
        }
    }

    /// `b(x, v, i)`: total penalty of the constraints containing `v` when
    /// `v` is set to `i` and every other variable follows `x`.
    pub fn b_value(&self, x: &Assignment, v: usize, i: usize) -> Result<ExactCost> {
        self.check_assignment(x)?;
        self.check_var_value(v, i)?;
        Ok(ExactCost::new(self.b_value_num(x.values(), v, i), self.eta))
    }

    pub(crate) fn b_value_num(&self, x: &[usize], v: usize, i: usize) -> u64 {
        let d = self.domain.size();
        match &self.store {
            Store::Explicit(es) => es.by_var[v]
                .iter()
                .map(|&ti| {
                    let t = &es.tables[ti as usize];
                    t.numerators[index_with(d, &t.vars, x, Some((v, i)), None)]
                })
                .sum(),
            Store::Implicit(src) => {
                let mut total = 0u64;
                let mut local = [0usize; MAX_ARITY];
                src.visit_subsets_containing(v, &mut |vars| {
                    for (slot, &u) in vars.iter().enumerate() {
                        local[slot] = if u == v { i } else { x[u] };
                    }
                    total += src.numerator(vars, &local[..vars.len()]);
                });
                total
            }
        }
    }

    /// All `b(x, v, i)` numerators at once, row-major `v * |D| + i`.
    /// One pass over the tables instead of n * |D| separate walks.
    pub(crate) fn b_matrix(&self, x: &[usize]) -> Vec<u64> {
        let d = self.domain.size();
        let mut out = vec![0u64; self.n * d];
        match &self.store {
            Store::Explicit(es) => {
                for t in &es.tables {
                    let base = index_with(d, &t.vars, x, None, None);
                    let mut stride = t.numerators.len(); // |D|^k
                    for &v in &t.vars {
                        stride /= d;
                        let digit = x[v];
                        let line = base - digit * stride;
                        for i in 0..d {
                            out[v * d + i] += t.numerators[line + i * stride];
                        }
                    }
                }
            }
            Store::Implicit(src) => {
                let mut local = [0usize; MAX_ARITY];
                src.visit_subsets(&mut |vars| {
                    for (slot, &v) in vars.iter().enumerate() {
                        local[slot] = x[v];
                    }
                    for (slot, &v) in vars.iter().enumerate() {
                        let keep = local[slot];
                        for i in 0..d {
                            local[slot] = i;
                            out[v * d + i] += src.numerator(vars, &local[..vars.len()]);
                        }
                        local[slot] = keep;
                    }
                });
            }
        }
        out
    }

    /// Penalty mass of the constraints containing `v` whose other variables
    /// are all `placed`, with `v` evaluated at `i`: the prefix score of a
    /// greedy extension.
    pub(crate) fn placed_score_num(
        &self,
        x: &[usize],
        placed: &[bool],
        v: usize,
        i: usize,
    ) -> u64 {
        let d = self.domain.size();
        match &self.store {
            Store::Explicit(es) => {
                let mut total = 0u64;
                for &ti in &es.by_var[v] {
                    let t = &es.tables[ti as usize];
                    if t.vars.iter().any(|&u| u != v && !placed[u]) {
                        continue;
                    }
                    total += t.numerators[index_with(d, &t.vars, x, Some((v, i)), None)];
                }
                total
            }
            Store::Implicit(src) => {
                let mut total = 0u64;
                let mut local = [0usize; MAX_ARITY];
                src.visit_subsets_containing(v, &mut |vars| {
                    if vars.iter().any(|&u| u != v && !placed[u]) {
                        return;
                    }
                    for (slot, &u) in vars.iter().enumerate() {
                        local[slot] = if u == v { i } else { x[u] };
                    }
                    total += src.numerator(vars, &local[..vars.len()]);
                });
                total
            }
        }
    }

    /// All `b(x, v, i)` numerators over `eta` at once, row-major
    /// `v * |D| + i`; one pass over the tables.
    pub fn b_matrix_nums(&self, x: &Assignment) -> Result<Vec<u64>> {
        self.check_assignment(x)?;
        Ok(self.b_matrix(x.values()))
    }

    /// Point query: numerator of the table over `vars` at `local`
    /// (0 when no table exists). `vars` must be sorted.
    pub fn penalty_numerator(&self, vars: &[usize], local: &[usize]) -> u64 {
        debug_assert_eq!(vars.len(), local.len());
        if vars.len() != self.k {
            // No tables exist off the instance arity ("p_I = 0 otherwise").
            return 0;
        }
        match &self.store {
            Store::Explicit(es) => {
                match es.tables.binary_search_by(|t| t.vars.as_slice().cmp(vars)) {
                    Ok(ti) => {
                        es.tables[ti].numerators[local_index(self.domain.size(), local)]
                    }
                    Err(_) => 0,
                }
            }
            Store::Implicit(src) => src.numerator(vars, local),
        }
    }

    pub(crate) fn visit_subsets(&self, visit: &mut dyn FnMut(&[usize])) {
        match &self.store {
            Store::Explicit(es) => {
                for t in &es.tables {
                    visit(&t.vars);
                }
            }
            Store::Implicit(src) => src.visit_subsets(visit),
        }
    }

    pub(crate) fn visit_subsets_containing(&self, v: usize, visit: &mut dyn FnMut(&[usize])) {
        match &self.store {
            Store::Explicit(es) => {
                for &ti in &es.by_var[v] {
                    visit(&es.tables[ti as usize].vars);
                }
            }
            Store::Implicit(src) => src.visit_subsets_containing(v, visit),
        }
    }

    /// Serialize to the canonical JSON instance format. Implicit instances
    /// are materialized.
    pub fn to_json(&self) -> String {
        let d = self.domain.size();
        let entries = d.pow(self.k as u32);
        let tables: Vec<TableJson> = match &self.store {
            Store::Explicit(es) => es
                .tables
                .iter()
                .map(|t| TableJson {
                    vars: t.vars.clone(),
                    numerators: t.numerators.clone(),
                })
                .collect(),
            Store::Implicit(src) => {
                let mut tables = Vec::with_capacity(src.table_count());
                let mut local = vec![0usize; self.k];
                src.visit_subsets(&mut |vars| {
                    let mut numerators = Vec::with_capacity(entries);
                    for code in 0..entries {
                        let mut c = code;
                        for slot in (0..self.k).rev() {
                            local[slot] = c % d;
                            c /= d;
                        }
                        numerators.push(src.numerator(vars, &local));
                    }
                    tables.push(TableJson {
                        vars: vars.to_vec(),
                        numerators,
                    });
                });
                tables.sort_by(|a, b| a.vars.cmp(&b.vars));
                tables
            }
        };
        let doc = CspJson {
            n: self.n,
            k: self.k,
            domain_size: d,
            eta: self.eta,
            tables,
        };
        serde_json::to_string_pretty(&doc).expect("instance serialization cannot fail")
    }

    /// Load an explicit instance from the JSON format. Fragility metadata is
    /// not part of the format, so per-constraint operations are unavailable
    /// on loaded instances.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CspJson = serde_json::from_str(text)?;
        let tables = doc
            .tables
            .into_iter()
            .map(|t| PenaltyTable::new(t.vars, t.numerators))
            .collect();
        Self::explicit(doc.n, doc.k, Domain::new(doc.domain_size)?, doc.eta, tables)
    }
}

#[derive(Serialize, Deserialize)]
struct CspJson {
    n: usize,
    k: usize,
    domain_size: usize,
    eta: u64,
    tables: Vec<TableJson>,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    vars: Vec<usize>,
    numerators: Vec<u64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::gb::GbInstance;
    use rand::Rng;

    /// Independent naive scorer: walks every size-k variable subset and
    /// re-derives the canonical local index digit by digit. Shares only the
    /// instance type with the implementation above.
    fn naive_objective_num(inst: &CspInstance, x: &[usize]) -> u64 {
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            let mut out = Vec::new();
            let mut cur = Vec::new();
            fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
                if cur.len() == k {
                    out.push(cur.clone());
                    return;
                }
                for v in start..n {
                    cur.push(v);
                    rec(v + 1, n, k, cur, out);
                    cur.pop();
                }
            }
            rec(0, n, k, &mut cur, &mut out);
            out
        }
        let d = inst.domain_size();
        let mut total = 0u64;
        for vars in subsets(inst.n(), inst.arity()) {
            let mut idx = 0usize;
            for &v in &vars {
                idx = idx * d + x[v];
            }
            let local: Vec<usize> = vars.iter().map(|&v| x[v]).collect();
            debug_assert_eq!(idx, local_index(d, &local));
            total += inst.penalty_numerator(&vars, &local);
        }
        total
    }

    fn random_instance(n: usize, k: usize, d: usize, eta: u64, seed: u64) -> CspInstance {
        let mut rng = crate::rng::derive_rng(seed, crate::rng::stream::VERIFIER, 99);
        let mut tables = Vec::new();
        let mut cur: Vec<usize> = (0..k).collect();
        // every k-subset gets a random table
        loop {
            let entries = d.pow(k as u32);
            let numerators: Vec<u64> = (0..entries).map(|_| rng.random_range(0..=eta)).collect();
            tables.push(PenaltyTable::new(cur.clone(), numerators));
            // next combination
            let mut idx = k;
            loop {
                if idx == 0 {
                    return CspInstance::explicit(n, k, Domain::new(d).unwrap(), eta, tables)
                        .unwrap();
                }
                idx -= 1;
                if cur[idx] + 1 <= n - (k - idx) {
                    cur[idx] += 1;
                    for j in idx + 1..k {
                        cur[j] = cur[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    fn random_assignment(n: usize, d: usize, rng: &mut impl Rng) -> Assignment {
        Assignment::new((0..n).map(|_| rng.random_range(0..d)).collect())
    }

    #[test]
    fn objective_zero_on_matching_gb_board() {
        // all-(+1) 2x2 board scored at the all-alpha switch setting
        let gb = GbInstance::from_pm1(&[vec![1, 1], vec![1, 1]]).unwrap();
        let inst = gb.to_csp();
        let x = Assignment::constant(4, 0);
        assert_eq!(inst.objective(&x).unwrap(), ExactCost::zero());
    }

    #[test]
    fn objective_counts_single_lit_bulb() {
        let gb = GbInstance::from_pm1(&[vec![1, -1], vec![1, 1]]).unwrap();
        let inst = gb.to_csp();
        let x = Assignment::constant(4, 0);
        assert_eq!(inst.objective(&x).unwrap(), ExactCost::integer(1));
    }

    #[test]
    fn objective_matches_independent_naive_scorer() {
        let inst = random_instance(6, 2, 3, 5, 11);
        let mut rng = crate::rng::derive_rng(12, crate::rng::stream::VERIFIER, 0);
        for _ in 0..50 {
            let x = random_assignment(6, 3, &mut rng);
            assert_eq!(
                inst.objective_num(x.values()),
                naive_objective_num(&inst, x.values())
            );
        }
    }

    #[test]
    fn rewrite_identities() {
        let inst = random_instance(5, 2, 3, 2, 3);
        let x = Assignment::new(vec![0, 0, 0, 1, 2]);
        // rewrite at the current value is the identity
        assert_eq!(inst.rewrite(&x, 1, x.get(1)).unwrap(), x);
        let y = inst.rewrite(&x, 1, 2).unwrap();
        assert_eq!(y.values(), &[0, 2, 0, 1, 2]);
        // reverting restores the original
        assert_eq!(inst.rewrite(&y, 1, x.get(1)).unwrap(), x);
        assert!(inst.rewrite(&x, 7, 0).is_err());
        assert!(inst.rewrite(&x, 0, 9).is_err());
    }

    #[test]
    fn objective_rejects_bad_assignments() {
        let inst = random_instance(5, 2, 2, 1, 3);
        assert!(inst.objective(&Assignment::constant(4, 0)).is_err());
        assert!(inst.objective(&Assignment::constant(5, 3)).is_err());
    }

    #[test]
    fn b_value_on_gb_row_flip() {
        // all-(+1) m x m board at all-alpha: b(row, alpha) = 0, b(row, beta) = m
        let m = 4;
        let rows: Vec<Vec<i8>> = vec![vec![1; m]; m];
        let gb = GbInstance::from_pm1(&rows).unwrap();
        let inst = gb.to_csp();
        let x = Assignment::constant(2 * m, 0);
        for r in 0..m {
            assert_eq!(inst.b_value(&x, r, 0).unwrap(), ExactCost::zero());
            assert_eq!(inst.b_value(&x, r, 1).unwrap(), ExactCost::integer(m as u64));
        }
    }

    #[test]
    fn b_value_matches_naive_recount() {
        let inst = random_instance(6, 2, 3, 4, 21);
        let mut rng = crate::rng::derive_rng(22, crate::rng::stream::VERIFIER, 1);
        for _ in 0..20 {
            let x = random_assignment(6, 3, &mut rng);
            for v in 0..6 {
                for i in 0..3 {
                    // naive: rewrite, then sum over subsets containing v
                    let y = inst.rewrite(&x, v, i).unwrap();
                    let mut expect = 0u64;
                    for u in 0..6 {
                        if u == v {
                            continue;
                        }
                        let vars = if u < v { vec![u, v] } else { vec![v, u] };
                        let local: Vec<usize> = vars.iter().map(|&w| y.get(w)).collect();
                        expect += inst.penalty_numerator(&vars, &local);
                    }
                    assert_eq!(inst.b_value_num(x.values(), v, i), expect);
                }
            }
        }
    }

    #[test]
    fn objective_equals_scaled_b_sum() {
        // k * Obj(x) = sum_v b(x, v, x_v), exactly
        for (n, k, d) in [(6, 2, 3), (6, 3, 2), (5, 2, 2)] {
            let inst = random_instance(n, k, d, 3, n as u64 * 7 + k as u64);
            let mut rng = crate::rng::derive_rng(5, crate::rng::stream::VERIFIER, 2);
            for _ in 0..25 {
                let x = random_assignment(n, d, &mut rng);
                let lhs = inst.objective_num(x.values()) * k as u64;
                let rhs: u64 = (0..n)
                    .map(|v| inst.b_value_num(x.values(), v, x.get(v)))
                    .sum();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn b_matrix_agrees_with_b_value() {
        let inst = random_instance(6, 3, 2, 2, 31);
        let mut rng = crate::rng::derive_rng(6, crate::rng::stream::VERIFIER, 3);
        for _ in 0..10 {
            let x = random_assignment(6, 2, &mut rng);
            let mat = inst.b_matrix(x.values());
            for v in 0..6 {
                for i in 0..2 {
                    assert_eq!(mat[v * 2 + i], inst.b_value_num(x.values(), v, i));
                }
            }
        }
    }

    #[test]
    fn implicit_and_explicit_gb_agree() {
        let gb = GbInstance::from_pm1(&[
            vec![1, -1, 1],
            vec![-1, -1, 1],
            vec![1, 1, -1],
        ])
        .unwrap();
        let exp = gb.to_csp();
        let imp = gb.to_csp_implicit();
        let mut rng = crate::rng::derive_rng(9, crate::rng::stream::VERIFIER, 4);
        for _ in 0..30 {
            let x = random_assignment(6, 2, &mut rng);
            assert_eq!(exp.objective_num(x.values()), imp.objective_num(x.values()));
            for v in 0..6 {
                for i in 0..2 {
                    assert_eq!(
                        exp.b_value_num(x.values(), v, i),
                        imp.b_value_num(x.values(), v, i)
                    );
                }
            }
            assert_eq!(exp.b_matrix(x.values()), imp.b_matrix(x.values()));
        }
    }

    #[test]
    fn json_round_trip_preserves_objective() {
        let inst = random_instance(6, 2, 3, 4, 77);
        let text = inst.to_json();
        let back = CspInstance::from_json(&text).unwrap();
        let mut rng = crate::rng::derive_rng(10, crate::rng::stream::VERIFIER, 5);
        for _ in 0..20 {
            let x = random_assignment(6, 3, &mut rng);
            assert_eq!(inst.objective_num(x.values()), back.objective_num(x.values()));
        }
        assert_eq!(back.eta(), inst.eta());
        assert_eq!(back.table_count(), inst.table_count());
    }

    #[test]
    fn degenerate_n_equals_k_accepted_smaller_rejected() {
        let d = Domain::new(2).unwrap();
        let t = PenaltyTable::new(vec![0, 1], vec![0, 1, 1, 0]);
        assert!(CspInstance::explicit(2, 2, d, 1, vec![t.clone()]).is_ok());
        assert!(CspInstance::explicit(1, 2, d, 1, vec![]).is_err());
    }

    #[test]
    fn duplicate_subset_rejected() {
        let d = Domain::new(2).unwrap();
        let t = PenaltyTable::new(vec![0, 1], vec![0, 1, 1, 0]);
        assert!(CspInstance::explicit(3, 2, d, 1, vec![t.clone(), t]).is_err());
    }
}
