//! Independent exact solvers used as ground truth.
//!
//! Deliberately simple — plain enumeration, no pruning, no branch-and-bound —
//! so they stay trustworthy. The objective is re-scored here from materialized
//! (subset, numerators) pairs with its own local-index derivation; the only
//! thing shared with the solver stack is the instance types themselves.

use crate::cost::ExactCost;
use crate::csp::{Assignment, CspInstance};
use crate::encode::gb::GbInstance;
use crate::encode::hier::{HierProblem, Trunk};
use crate::error::{Error, Result};

pub const DEFAULT_CSP_CAP: u64 = 1 << 24;
pub const DEFAULT_GB_CAP: usize = 24;
pub const DEFAULT_HIER_CAP: u64 = 1 << 24;

#[derive(Clone, Debug)]
pub struct OracleSolution {
    pub assignment: Assignment,
    pub cost: ExactCost,
}

/// Materialized scoring view of an instance, rebuilt from point queries.
struct Scorer {
    domain: usize,
    tables: Vec<(Vec<usize>, Vec<u64>)>,
}

impl Scorer {
    fn new(inst: &CspInstance) -> Self {
        let d = inst.domain_size();
        let k = inst.arity();
        let entries = d.pow(k as u32);
        let mut tables = Vec::with_capacity(inst.table_count());
        let mut local = vec![0usize; k];
        inst.visit_subsets(&mut |vars| {
            let mut numerators = Vec::with_capacity(entries);
            for code in 0..entries {
                let mut c = code;
                for slot in (0..k).rev() {
                    local[slot] = c % d;
                    c /= d;
                }
                numerators.push(inst.penalty_numerator(vars, &local));
            }
            tables.push((vars.to_vec(), numerators));
        });
        Scorer { domain: d, tables }
    }

    fn score(&self, x: &[usize]) -> u64 {
        let mut total = 0u64;
        for (vars, numerators) in &self.tables {
            let mut idx = 0usize;
            for &v in vars {
                idx = idx * self.domain + x[v];
            }
            total += numerators[idx];
        }
        total
    }
}

/// True constrained optimum by exhaustive search over the free variables,
/// in counting order, so ties resolve to the lexicographically smallest
/// optimal assignment.
pub fn exact_csp(
    inst: &CspInstance,
    pinned: &[Option<usize>],
    cap: u64,
) -> Result<OracleSolution> {
    let n = inst.n();
    let d = inst.domain_size();
    if pinned.len() != n {
        return Err(Error::invalid(format!(
            "pin vector length {} != n = {n}",
            pinned.len()
        )));
    }
    if let Some(bad) = pinned.iter().flatten().find(|&&v| v >= d) {
        return Err(Error::invalid(format!("pinned value {bad} outside domain")));
    }
    let free: Vec<usize> = (0..n).filter(|&v| pinned[v].is_none()).collect();
    let states = (d as u64).checked_pow(free.len() as u32);
    if states.is_none_or(|s| s > cap) {
        return Err(Error::CapExceeded(format!(
            "{d}^{} assignments exceed the oracle cap {cap}",
            free.len()
        )));
    }
    let states = states.unwrap();

    let scorer = Scorer::new(inst);
    let mut x: Vec<usize> = pinned.iter().map(|p| p.unwrap_or(0)).collect();
    let mut best_cost = u64::MAX;
    let mut best: Vec<usize> = x.clone();
    for code in 0..states {
        let mut c = code;
        for &v in free.iter().rev() {
            x[v] = (c % d as u64) as usize;
            c /= d as u64;
        }
        let cost = scorer.score(&x);
        if cost < best_cost {
            best_cost = cost;
            best.copy_from_slice(&x);
        }
    }
    Ok(OracleSolution {
        assignment: Assignment::new(best),
        cost: ExactCost::new(best_cost, inst.eta()),
    })
}

#[derive(Clone, Debug)]
pub struct GbOracle {
    /// +1 = switch untouched, -1 = flipped
    pub rows: Vec<i8>,
    pub cols: Vec<i8>,
    pub cost: ExactCost,
}

/// True optimum of the switching game: enumerate all 2^m row settings; for
/// each, every column is optimized independently (lit vs m - lit).
pub fn exact_gb(gb: &GbInstance, cap_m: usize) -> Result<GbOracle> {
    let m = gb.m();
    if m > cap_m || m >= 64 {
        return Err(Error::CapExceeded(format!(
            "board side {m} exceeds the row-enumeration cap {cap_m}"
        )));
    }
    // column bitmasks over rows
    let cols: Vec<u64> = (0..m)
        .map(|c| {
            (0..m)
                .filter(|&r| gb.bit(r, c))
                .fold(0u64, |mask, r| mask | (1 << r))
        })
        .collect();
    let mut best_cost = u64::MAX;
    let mut best_rows = 0u64;
    for xbits in 0..1u64 << m {
        let mut cost = 0u64;
        for &col in &cols {
            let lit = (col ^ xbits).count_ones() as u64;
            cost += lit.min(m as u64 - lit);
        }
        if cost < best_cost {
            best_cost = cost;
            best_rows = xbits;
        }
    }
    let rows: Vec<i8> = (0..m)
        .map(|r| if (best_rows >> r) & 1 == 1 { -1 } else { 1 })
        .collect();
    let col_signs: Vec<i8> = cols
        .iter()
        .map(|&col| {
            let lit = (col ^ best_rows).count_ones() as u64;
            // flip the column only when strictly better; ties stay untouched
            if m as u64 - lit < lit {
                -1
            } else {
                1
            }
        })
        .collect();
    Ok(GbOracle {
        rows,
        cols: col_signs,
        cost: ExactCost::integer(best_cost),
    })
}

#[derive(Clone, Debug)]
pub struct HierOracle {
    pub trunk: Trunk,
    pub assignment: Assignment,
    pub cost: ExactCost,
}

/// True optimal M-level clustering: enumerate every trunk and every cluster
/// assignment.
pub fn exact_hier(hp: &HierProblem, cap: u64) -> Result<HierOracle> {
    let trunks = Trunk::enumerate(hp.clusters, hp.levels);
    let d = hp.clusters as u64;
    let states = d.checked_pow(hp.n as u32);
    let total = states.and_then(|s| s.checked_mul(trunks.len() as u64));
    if total.is_none_or(|t| t > cap) {
        return Err(Error::CapExceeded(format!(
            "{} trunks x {d}^{} assignments exceed the oracle cap {cap}",
            trunks.len(),
            hp.n
        )));
    }
    let states = states.unwrap();

    let mut best: Option<(u64, usize, Vec<usize>)> = None;
    for (ti, trunk) in trunks.iter().enumerate() {
        // f-matrix of this trunk
        let dd = hp.clusters;
        let mut f = vec![0u64; dd * dd];
        for i in 0..dd {
            for j in 0..dd {
                f[i * dd + j] = trunk.lca_depth(i, j)? as u64;
            }
        }
        let mut x = vec![0usize; hp.n];
        for code in 0..states {
            let mut c = code;
            for slot in (0..hp.n).rev() {
                x[slot] = (c % d) as usize;
                c /= d;
            }
            let mut cost = 0u64;
            for u in 0..hp.n {
                for v in u + 1..hp.n {
                    cost += f[x[u] * dd + x[v]].abs_diff(hp.dissimilarity(u, v) as u64);
                }
            }
            if best.as_ref().is_none_or(|(b, _, _)| cost < *b) {
                best = Some((cost, ti, x.clone()));
            }
        }
    }
    let (cost, ti, x) = best.expect("at least one clustering exists");
    Ok(HierOracle {
        trunk: trunks[ti].clone(),
        assignment: Assignment::new(x),
        cost: ExactCost::new(cost, hp.levels as u64),
    })
}
