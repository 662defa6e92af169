//! Additive-error solver: returns an assignment within an additive budget of
//! the constrained optimum. Used as the pre-pass and as the finisher of both
//! approximation schemes, so it supports pinned variables and per-variable
//! linear cost terms.
//!
//! Two backends. EXACT enumerates every assignment of the free set (with a
//! feasibility cap) and is the true constrained optimum. SAMPLED mirrors the
//! schemes' own sample-and-guess structure: draw t free variables, enumerate
//! all their assignments, greedily extend each in random order against the
//! already-placed variables, and keep the best completion; its guarantee is
//! statistical and is validated against EXACT in the test suite.

use crate::cost::{binomial, lcm, ExactCost};
use crate::csp::{Assignment, CspInstance, Domain, PenaltyTable, MAX_ARITY};
use crate::enumerate::{decode_counting, for_each_combination, for_each_gray};
use crate::error::{Error, Result};
use crate::rng::sample_distinct_sorted;
use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const DEFAULT_ADDITIVE_CAP: u64 = 1 << 20;

/// Per-(variable, value) linear costs c(v, i) >= 0 added to the objective;
/// exact, over a common denominator.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinearCosts {
    /// row-major v * |D| + i
    pub num: Vec<u64>,
    pub den: u64,
}

impl LinearCosts {
    pub fn zero(n: usize, domain: usize) -> Self {
        LinearCosts {
            num: vec![0; n * domain],
            den: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AdditiveRequest<'a> {
    pub inst: &'a CspInstance,
    /// `None` marks the free set T; `Some(value)` pins the variable.
    pub pinned: Vec<Option<usize>>,
    pub linear: Option<LinearCosts>,
    /// Additive budget as a fraction of C(|T|, k); consulted by SAMPLED to
    /// size its sample, ignored by EXACT.
    pub epsilon: ExactCost,
}

impl<'a> AdditiveRequest<'a> {
    /// Unconstrained request over all variables.
    pub fn whole(inst: &'a CspInstance, epsilon: ExactCost) -> Self {
        AdditiveRequest {
            inst,
            pinned: vec![None; inst.n()],
            linear: None,
            epsilon,
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.inst.n();
        let d = self.inst.domain_size();
        if self.pinned.len() != n {
            return Err(Error::invalid(format!(
                "pin vector length {} != n = {n}",
                self.pinned.len()
            )));
        }
        if let Some(bad) = self.pinned.iter().flatten().find(|&&v| v >= d) {
            return Err(Error::invalid(format!("pinned value {bad} outside domain")));
        }
        if let Some(lin) = &self.linear {
            if lin.num.len() != n * d || lin.den == 0 {
                return Err(Error::invalid("linear cost table malformed".to_string()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "backend", rename_all = "snake_case")]
pub enum AdditiveBackend {
    /// Exhaustive over |D|^|T|; refuses to run past `cap`.
    Exact { cap: u64 },
    /// Sample-and-greedy; `t = None` derives the sample size from epsilon
    /// (ceil(4 / eps^2)), always capped so |D|^t <= cap.
    Sampled {
        t: Option<usize>,
        cap: u64,
        seed: u64,
    },
}

impl AdditiveBackend {
    pub fn exact() -> Self {
        AdditiveBackend::Exact {
            cap: DEFAULT_ADDITIVE_CAP,
        }
    }

    pub fn sampled(t: usize, seed: u64) -> Self {
        AdditiveBackend::Sampled {
            t: Some(t),
            cap: DEFAULT_ADDITIVE_CAP,
            seed,
        }
    }

    /// Same backend, different sampled seed; EXACT is unaffected.
    pub fn reseeded(self, new_seed: u64) -> Self {
        match self {
            AdditiveBackend::Sampled { t, cap, .. } => AdditiveBackend::Sampled {
                t,
                cap,
                seed: new_seed,
            },
            exact => exact,
        }
    }
}

/// Total cost (objective plus linear terms) of a full assignment.
fn total_cost(inst: &CspInstance, x: &[usize], linear: Option<&LinearCosts>) -> ExactCost {
    let obj = ExactCost::new(inst.objective_num(x), inst.eta());
    match linear {
        None => obj,
        Some(lin) => {
            let d = inst.domain_size();
            let lsum: u64 = x.iter().enumerate().map(|(v, &i)| lin.num[v * d + i]).sum();
            obj.add(ExactCost::new(lsum, lin.den))
        }
    }
}

/// Solve the request within its backend's contract. The returned cost is the
/// exact total (objective plus linear terms); the assignment agrees with the
/// pins everywhere outside T.
pub fn additive_solve(
    req: &AdditiveRequest,
    backend: AdditiveBackend,
) -> Result<(Assignment, ExactCost)> {
    req.validate()?;
    let inst = req.inst;
    let free: Vec<usize> = (0..inst.n())
        .filter(|&v| req.pinned[v].is_none())
        .collect();
    if free.is_empty() {
        // nothing to optimize: score the pinned assignment
        let x: Vec<usize> = req.pinned.iter().map(|p| p.unwrap()).collect();
        let cost = total_cost(inst, &x, req.linear.as_ref());
        return Ok((Assignment::new(x), cost));
    }
    match backend {
        AdditiveBackend::Exact { cap } => solve_exact(req, &free, cap),
        AdditiveBackend::Sampled { t, cap, seed } => solve_sampled(req, &free, t, cap, seed),
    }
}

fn solve_exact(
    req: &AdditiveRequest,
    free: &[usize],
    cap: u64,
) -> Result<(Assignment, ExactCost)> {
    let inst = req.inst;
    let d = inst.domain_size();
    let states = (d as u64).checked_pow(free.len() as u32);
    if states.is_none_or(|s| s > cap) {
        return Err(Error::CapExceeded(format!(
            "{d}^{} assignments exceed the additive cap {cap}",
            free.len()
        )));
    }
    let lin = req.linear.as_ref();
    let (lnum, lden): (&[u64], u64) = match lin {
        Some(l) => (&l.num, l.den),
        None => (&[], 1),
    };
    let lin_at = |v: usize, i: usize| -> u64 {
        if lnum.is_empty() {
            0
        } else {
            lnum[v * d + i]
        }
    };

    let mut x: Vec<usize> = req.pinned.iter().map(|p| p.unwrap_or(0)).collect();
    let mut cost_num = inst.objective_num(&x);
    let mut lin_num: u64 = (0..inst.n()).map(|v| lin_at(v, x[v])).sum();
    let eta = inst.eta();
    let combined = |cost_num: u64, lin_num: u64| -> u128 {
        cost_num as u128 * lden as u128 + lin_num as u128 * eta as u128
    };

    let mut best_total = combined(cost_num, lin_num);
    let mut best_x = x.clone();
    let mut digits = vec![0usize; free.len()];
    for_each_gray(d, &mut digits, |_, idx, old, new| {
        let v = free[idx];
        // b-values ignore the variable's own current entry, so the delta is
        // well-defined before x is updated
        let gained = inst.b_value_num(&x, v, new);
        let lost = inst.b_value_num(&x, v, old);
        cost_num = cost_num + gained - lost;
        lin_num = lin_num + lin_at(v, new) - lin_at(v, old);
        x[v] = new;
        let total = combined(cost_num, lin_num);
        if total < best_total || (total == best_total && x < best_x) {
            best_total = total;
            best_x.copy_from_slice(&x);
        }
    });
    debug_assert_eq!(inst.objective_num(&best_x) as u128 * lden as u128
        + (0..inst.n()).map(|v| lin_at(v, best_x[v])).sum::<u64>() as u128 * eta as u128,
        best_total);
    let cost = total_cost(inst, &best_x, lin);
    Ok((Assignment::new(best_x), cost))
}

fn solve_sampled(
    req: &AdditiveRequest,
    free: &[usize],
    t: Option<usize>,
    cap: u64,
    seed: u64,
) -> Result<(Assignment, ExactCost)> {
    let inst = req.inst;
    let d = inst.domain_size();
    // largest sample enumerable under the cap
    let mut t_cap = 0usize;
    let mut states = 1u64;
    while let Some(next) = states.checked_mul(d as u64) {
        if next > cap {
            break;
        }
        states = next;
        t_cap += 1;
    }
    let t_default = match (req.epsilon.num, req.epsilon.den) {
        (0, _) => usize::MAX,
        (num, den) => {
            // ceil(4 / eps^2) = ceil(4 den^2 / num^2), exactly
            let num2 = num as u128 * num as u128;
            let den2 = 4u128 * den as u128 * den as u128;
            usize::try_from(den2.div_ceil(num2)).unwrap_or(usize::MAX)
        }
    };
    let t_eff = t.unwrap_or(t_default).min(free.len()).min(t_cap);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample_pos = sample_distinct_sorted(&mut rng, t_eff, free.len());
    let sample: Vec<usize> = sample_pos.iter().map(|&p| free[p]).collect();
    let rest: Vec<usize> = free
        .iter()
        .copied()
        .filter(|v| !sample.contains(v))
        .collect();

    let lin = req.linear.as_ref();
    let lin_at = |v: usize, i: usize| -> u64 {
        match lin {
            Some(l) => l.num[v * d + i],
            None => 0,
        }
    };
    let lden = lin.map_or(1, |l| l.den);
    let eta = inst.eta();

    let mut placed = vec![false; inst.n()];
    for v in 0..inst.n() {
        placed[v] = req.pinned[v].is_some();
    }

    let mut best: Option<(u128, Vec<usize>)> = None;
    let mut sample_vals = vec![0usize; t_eff];
    let mut order = rest.clone();
    let enumerations = (d as u64).pow(t_eff as u32);
    for code in 0..enumerations {
        decode_counting(code as usize, d, &mut sample_vals);
        let mut x: Vec<usize> = req.pinned.iter().map(|p| p.unwrap_or(0)).collect();
        let mut placed = placed.clone();
        for (s, &v) in sample.iter().enumerate() {
            x[v] = sample_vals[s];
            placed[v] = true;
        }
        order.shuffle(&mut rng);
        for &v in &order {
            // score each value against the placed prefix plus linear terms
            let mut best_i = 0usize;
            let mut best_score = u128::MAX;
            for i in 0..d {
                let partial = inst.placed_score_num(&x, &placed, v, i);
                let score =
                    partial as u128 * lden as u128 + lin_at(v, i) as u128 * eta as u128;
                if score < best_score {
                    best_score = score;
                    best_i = i;
                }
            }
            x[v] = best_i;
            placed[v] = true;
        }
        let cost_num = inst.objective_num(&x);
        let lin_num: u64 = (0..inst.n()).map(|v| lin_at(v, x[v])).sum();
        let total = cost_num as u128 * lden as u128 + lin_num as u128 * eta as u128;
        if best.as_ref().is_none_or(|(b, _)| total < *b) {
            best = Some((total, x));
        }
    }
    let (_, best_x) = best.expect("at least one enumeration ran");
    let cost = total_cost(inst, &best_x, lin);
    Ok((Assignment::new(best_x), cost))
}

/// The instance over the tricky set after fixing the clear-cut set, plus the
/// constant penalty mass entirely inside the fixed set. Constraints mixing
/// fixed and tricky variables are reduced to their tricky support and spread
/// over all size-k tricky supersets with uniform binomial weights, so the
/// decomposition below holds exactly for every tricky assignment y:
///
/// ```text
/// Obj(base with T := y) = sum_K q_K(y) + constant
/// ```
#[derive(Clone, Debug)]
pub struct PaddedSubproblem {
    /// arity-k instance over the tricky variables (reindexed 0..|T|-1) with
    /// scale eta * L; table weights may exceed the scale
    pub instance: CspInstance,
    /// original variable ids in local order
    pub tricky: Vec<usize>,
    /// sum of p_I(base) over subsets inside the fixed set, over eta
    pub constant: ExactCost,
}

impl PaddedSubproblem {
    /// Map a local solution back onto the full variable set over `base`.
    pub fn lift(&self, base: &Assignment, y: &Assignment) -> Assignment {
        let mut out = base.clone();
        for (local, &orig) in self.tricky.iter().enumerate() {
            out.set(orig, y.get(local));
        }
        out
    }
}

/// Evaluate the padded decomposition at `y`: sum_K q_K(y) + constant.
pub fn padded_objective(ps: &PaddedSubproblem, y: &Assignment) -> Result<ExactCost> {
    Ok(ps.instance.objective(y)?.add(ps.constant))
}

/// Build the padded subproblem. `clear` and `tricky` must partition the
/// variables; requires |tricky| >= k (callers fall back to exhaustive
/// enumeration below that).
pub fn build_padded_subproblem(
    inst: &CspInstance,
    base: &Assignment,
    clear: &[usize],
    tricky: &[usize],
) -> Result<PaddedSubproblem> {
    inst.check_assignment(base)?;
    let n = inst.n();
    let k = inst.arity();
    let d = inst.domain_size();
    let mut seen = vec![false; n];
    for &v in clear.iter().chain(tricky.iter()) {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(Error::invalid(
                "clear/tricky sets must partition the variables".to_string(),
            ));
        }
    }
    if !seen.iter().all(|&s| s) {
        return Err(Error::invalid(
            "clear/tricky sets must partition the variables".to_string(),
        ));
    }
    let t_len = tricky.len();
    if t_len < k {
        return Err(Error::invalid(format!(
            "tricky set of size {t_len} below arity {k}; enumerate it exhaustively instead"
        )));
    }
    let mut tricky_sorted = tricky.to_vec();
    tricky_sorted.sort_unstable();

    // local index of each tricky variable
    let mut t_local = vec![usize::MAX; n];
    for (l, &v) in tricky_sorted.iter().enumerate() {
        t_local[v] = l;
    }
    let is_tricky = |v: usize| t_local[v] != usize::MAX;

    // padding weights: a reduced arity-j constraint is spread over
    // C(|T|-j, k-j) supersets, each at weight L / C(|T|-j, k-j)
    let binoms: Vec<u64> = (0..=k).map(|j| binomial(t_len - j, k - j)).collect();
    let scale = binoms[1..].iter().fold(1u64, |acc, &b| lcm(acc, b));
    let eta_q = inst
        .eta()
        .checked_mul(scale)
        .ok_or_else(|| Error::Internal("padding scale overflow".to_string()))?;

    let mut const_num = 0u64;
    let x = base.values();

    let tables = if k == 2 {
        padded_tables_k2(
            inst, x, &tricky_sorted, &t_local, scale, &mut const_num,
        )
    } else {
        padded_tables_generic(
            inst,
            x,
            &tricky_sorted,
            &t_local,
            &is_tricky,
            &binoms,
            scale,
            &mut const_num,
        )
    };

    let instance = CspInstance::explicit_weighted(
        t_len,
        k,
        Domain::new(d)?,
        eta_q,
        tables,
    )?;
    Ok(PaddedSubproblem {
        instance,
        tricky: tricky_sorted,
        constant: ExactCost::new(const_num, inst.eta()),
    })
}

/// Dense k = 2 construction: tables inside T copy over at weight L; tables
/// crossing into the fixed set reduce to per-variable rows S1 and spread at
/// weight L / (|T| - 1) over every pair containing the variable.
fn padded_tables_k2(
    inst: &CspInstance,
    x: &[usize],
    tricky: &[usize],
    t_local: &[usize],
    scale: u64,
    const_num: &mut u64,
) -> Vec<PenaltyTable> {
    let d = inst.domain_size();
    let t_len = tricky.len();
    let w = scale / (t_len as u64 - 1);
    let pair = |a: usize, b: usize| -> usize {
        debug_assert!(a < b);
        a * t_len + b
    };
    let mut dense: Vec<u64> = vec![0; t_len * t_len * d * d];
    let mut s1: Vec<u64> = vec![0; t_len * d];
    inst.visit_subsets(&mut |vars| {
        let (u, v) = (vars[0], vars[1]);
        let (lu, lv) = (t_local[u], t_local[v]);
        match (lu != usize::MAX, lv != usize::MAX) {
            (true, true) => {
                let base = pair(lu, lv) * d * d;
                for a in 0..d {
                    for b in 0..d {
                        dense[base + a * d + b] +=
                            scale * inst.penalty_numerator(vars, &[a, b]);
                    }
                }
            }
            (true, false) => {
                for a in 0..d {
                    s1[lu * d + a] += inst.penalty_numerator(vars, &[a, x[v]]);
                }
            }
            (false, true) => {
                for b in 0..d {
                    s1[lv * d + b] += inst.penalty_numerator(vars, &[x[u], b]);
                }
            }
            (false, false) => {
                *const_num += inst.penalty_numerator(vars, &[x[u], x[v]]);
            }
        }
    });
    let active: Vec<usize> = (0..t_len)
        .filter(|&a| (0..d).any(|i| s1[a * d + i] != 0))
        .collect();
    for &a in &active {
        for b in 0..t_len {
            if b == a {
                continue;
            }
            let (lo, hi) = (a.min(b), a.max(b));
            let base = pair(lo, hi) * d * d;
            for i in 0..d {
                let add = w * s1[a * d + i];
                if add == 0 {
                    continue;
                }
                for j in 0..d {
                    // a's value sits in the slot matching its sort position
                    let idx = if a == lo { i * d + j } else { j * d + i };
                    dense[base + idx] += add;
                }
            }
        }
    }
    let mut tables = Vec::new();
    for a in 0..t_len {
        for b in a + 1..t_len {
            let base = pair(a, b) * d * d;
            if dense[base..base + d * d].iter().any(|&u| u != 0) {
                tables.push(PenaltyTable::new(
                    vec![a, b],
                    dense[base..base + d * d].to_vec(),
                ));
            }
        }
    }
    tables
}

#[allow(clippy::too_many_arguments)]
fn padded_tables_generic(
    inst: &CspInstance,
    x: &[usize],
    tricky: &[usize],
    t_local: &[usize],
    is_tricky: &dyn Fn(usize) -> bool,
    binoms: &[u64],
    scale: u64,
    const_num: &mut u64,
) -> Vec<PenaltyTable> {
    let d = inst.domain_size();
    let k = inst.arity();
    let mut builder = crate::encode::TableBuilder::new(d, k);
    let mut local = [0usize; MAX_ARITY];
    inst.visit_subsets(&mut |vars| {
        let j_vars: Vec<usize> = vars.iter().copied().filter(|&v| is_tricky(v)).collect();
        let j = j_vars.len();
        if j == 0 {
            for (slot, &v) in vars.iter().enumerate() {
                local[slot] = x[v];
            }
            *const_num += inst.penalty_numerator(vars, &local[..vars.len()]);
            return;
        }
        // reduce the table to its tricky support at the base values
        let mut reduced = vec![0u64; d.pow(j as u32)];
        let mut j_vals = vec![0usize; j];
        for (code, slot_val) in reduced.iter_mut().enumerate() {
            decode_counting(code, d, &mut j_vals);
            let mut jv = 0usize;
            for (slot, &v) in vars.iter().enumerate() {
                local[slot] = if is_tricky(v) {
                    let val = j_vals[jv];
                    jv += 1;
                    val
                } else {
                    x[v]
                };
            }
            *slot_val = inst.penalty_numerator(vars, &local[..vars.len()]);
        }
        if j == k {
            let key: Vec<usize> = j_vars.iter().map(|&v| t_local[v]).collect();
            let table = builder.slot(&key, scale);
            for (idx, &u) in reduced.iter().enumerate() {
                table[idx] += scale * u;
            }
            return;
        }
        let w = scale / binoms[j];
        let j_locals: Vec<usize> = j_vars.iter().map(|&v| t_local[v]).collect();
        let others: Vec<usize> = (0..tricky.len())
            .filter(|l| !j_locals.contains(l))
            .collect();
        let mut k_vals = vec![0usize; k];
        for_each_combination(&others, k - j, &mut |extra| {
            let mut key: Vec<usize> = j_locals.iter().chain(extra.iter()).copied().collect();
            key.sort_unstable();
            let pos: Vec<usize> = j_locals
                .iter()
                .map(|l| key.binary_search(l).unwrap())
                .collect();
            let table = builder.slot(&key, w);
            for (code, entry) in table.iter_mut().enumerate() {
                decode_counting(code, d, &mut k_vals);
                let mut jidx = 0usize;
                for &p in &pos {
                    jidx = jidx * d + k_vals[p];
                }
                *entry += w * reduced[jidx];
            }
        });
    });
    builder.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::Domain;
    use crate::encode::gb::GbInstance;
    use crate::oracle;
    use rand::Rng;

    fn random_instance(n: usize, k: usize, d: usize, eta: u64, seed: u64) -> CspInstance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tables = Vec::new();
        let pool: Vec<usize> = (0..n).collect();
        let entries = d.pow(k as u32);
        for_each_combination(&pool, k, &mut |vars| {
            let numerators: Vec<u64> = (0..entries).map(|_| rng.random_range(0..=eta)).collect();
            tables.push(PenaltyTable::new(vars.to_vec(), numerators));
        });
        CspInstance::explicit(n, k, Domain::new(d).unwrap(), eta, tables).unwrap()
    }

    #[test]
    fn exact_on_cost_zero_board() {
        let gb = GbInstance::from_pm1(&vec![vec![1; 3]; 3]).unwrap();
        let inst = gb.to_csp();
        let req = AdditiveRequest::whole(&inst, ExactCost::new(1, 10));
        let (x, cost) = additive_solve(&req, AdditiveBackend::exact()).unwrap();
        assert!(cost.is_zero());
        assert_eq!(inst.objective(&x).unwrap(), cost);
    }

    #[test]
    fn empty_free_set_returns_pinned_cost() {
        let gb = GbInstance::from_pm1(&[vec![1, -1], vec![-1, 1]]).unwrap();
        let inst = gb.to_csp();
        let pinned: Vec<Option<usize>> = vec![Some(0), Some(1), Some(0), Some(1)];
        let req = AdditiveRequest {
            inst: &inst,
            pinned: pinned.clone(),
            linear: None,
            epsilon: ExactCost::new(1, 10),
        };
        let (x, cost) = additive_solve(&req, AdditiveBackend::exact()).unwrap();
        let expect = Assignment::new(vec![0, 1, 0, 1]);
        assert_eq!(x, expect);
        assert_eq!(cost, inst.objective(&expect).unwrap());
    }

    #[test]
    fn exact_matches_oracle_on_random_instances() {
        for seed in 0..10u64 {
            let inst = random_instance(8, 2, 2, 3, seed);
            let req = AdditiveRequest::whole(&inst, ExactCost::new(1, 10));
            let (x, cost) = additive_solve(&req, AdditiveBackend::exact()).unwrap();
            let o = oracle::exact_csp(&inst, &vec![None; 8], oracle::DEFAULT_CSP_CAP).unwrap();
            assert_eq!(cost, o.cost);
            assert_eq!(x, o.assignment, "tie-break must match the oracle's");
        }
    }

    #[test]
    fn exact_respects_pins_and_monotone_pinning() {
        for seed in 0..8u64 {
            let inst = random_instance(7, 2, 3, 2, 100 + seed);
            let whole = AdditiveRequest::whole(&inst, ExactCost::new(1, 10));
            let (opt, opt_cost) = additive_solve(&whole, AdditiveBackend::exact()).unwrap();
            // pin a few variables to their optimal values
            let mut pinned = vec![None; 7];
            for v in [0usize, 3, 5] {
                pinned[v] = Some(opt.get(v));
            }
            let req = AdditiveRequest {
                inst: &inst,
                pinned,
                linear: None,
                epsilon: ExactCost::new(1, 10),
            };
            let (x, cost) = additive_solve(&req, AdditiveBackend::exact()).unwrap();
            assert_eq!(x.get(0), opt.get(0));
            assert_eq!(cost, opt_cost, "pinning optimal values keeps the optimum");
        }
    }

    #[test]
    fn exact_cap_exceeded() {
        let inst = random_instance(8, 2, 2, 1, 5);
        let req = AdditiveRequest::whole(&inst, ExactCost::new(1, 10));
        assert!(matches!(
            additive_solve(&req, AdditiveBackend::Exact { cap: 8 }),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn linear_terms_steer_the_exact_optimum() {
        // a table-free instance decided purely by linear costs
        let inst = CspInstance::explicit(3, 2, Domain::new(2).unwrap(), 1, vec![]).unwrap();
        let mut lin = LinearCosts::zero(3, 2);
        lin.num = vec![5, 0, 0, 7, 2, 3]; // prefers (1, 0, 0)
        let req = AdditiveRequest {
            inst: &inst,
            pinned: vec![None; 3],
            linear: Some(lin),
            epsilon: ExactCost::new(1, 10),
        };
        let (x, cost) = additive_solve(&req, AdditiveBackend::exact()).unwrap();
        assert_eq!(x.values(), &[1, 0, 0]);
        assert_eq!(cost, ExactCost::integer(2));
    }

    #[test]
    fn sampled_with_full_sample_reduces_to_exact() {
        for seed in 0..6u64 {
            let inst = random_instance(6, 2, 2, 2, 200 + seed);
            let req = AdditiveRequest::whole(&inst, ExactCost::new(1, 10));
            let (xe, ce) = additive_solve(&req, AdditiveBackend::exact()).unwrap();
            let (xs, cs) =
                additive_solve(&req, AdditiveBackend::sampled(6, seed)).unwrap();
            assert_eq!(ce, cs);
            assert_eq!(xe, xs);
        }
    }

    #[test]
    fn sampled_statistical_contract_against_exact() {
        // cost <= constrained OPT + eps' |T|^k in at least 90% of seeded runs
        let eps = ExactCost::new(1, 5);
        let mut within = 0usize;
        let total = 100usize;
        for seed in 0..total as u64 {
            let inst = random_instance(9, 2, 2, 2, 300 + seed);
            let req = AdditiveRequest::whole(&inst, eps);
            let (_, exact_cost) = additive_solve(&req, AdditiveBackend::exact()).unwrap();
            let (_, sampled_cost) =
                additive_solve(&req, AdditiveBackend::sampled(4, 900 + seed)).unwrap();
            assert!(sampled_cost >= exact_cost);
            // budget eps * |T|^k = (1/5) * 81
            let budget = eps.mul_int(81);
            if sampled_cost <= exact_cost.add(budget) {
                within += 1;
            }
        }
        assert!(
            within >= 90,
            "sampled backend met its budget in only {within}/{total} runs"
        );
    }

    #[test]
    fn padding_identity_collapses_without_fixed_set() {
        let inst = random_instance(6, 2, 3, 2, 41);
        let base = Assignment::constant(6, 0);
        let all: Vec<usize> = (0..6).collect();
        let ps = build_padded_subproblem(&inst, &base, &[], &all).unwrap();
        assert!(ps.constant.is_zero());
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..30 {
            let y = Assignment::new((0..6).map(|_| rng.random_range(0..3)).collect());
            assert_eq!(
                padded_objective(&ps, &y).unwrap(),
                inst.objective(&y).unwrap()
            );
        }
    }

    #[test]
    fn padding_identity_exact_for_random_splits() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for (k, n) in [(2usize, 7usize), (3, 7), (2, 10), (3, 9)] {
            for round in 0..8u64 {
                let inst = random_instance(n, k, 2, 2, 500 + round + k as u64 * 31);
                let base =
                    Assignment::new((0..n).map(|_| rng.random_range(0..2)).collect());
                // random split keeping |T| >= k
                let t_len = rng.random_range(k..=n - 1);
                let tricky = sample_distinct_sorted(&mut rng, t_len, n);
                let clear: Vec<usize> = (0..n).filter(|v| !tricky.contains(v)).collect();
                let ps = build_padded_subproblem(&inst, &base, &clear, &tricky).unwrap();
                for _ in 0..10 {
                    let y = Assignment::new(
                        (0..t_len).map(|_| rng.random_range(0..2)).collect(),
                    );
                    let lifted = ps.lift(&base, &y);
                    assert_eq!(
                        padded_objective(&ps, &y).unwrap(),
                        inst.objective(&lifted).unwrap(),
                        "padding decomposition must be exact (k = {k}, n = {n})"
                    );
                }
            }
        }
    }

    #[test]
    fn padded_weights_respect_the_mixture_bound() {
        // every q entry is within sum_j C(k,j) C(|C|, k-j) / C(|T|-j, k-j)
        let mut rng = ChaCha8Rng::seed_from_u64(88);
        for k in [2usize, 3] {
            let n = 9;
            let inst = random_instance(n, k, 2, 1, 600 + k as u64);
            let base = Assignment::new((0..n).map(|_| rng.random_range(0..2)).collect());
            let tricky: Vec<usize> = (0..n / 2).collect();
            let clear: Vec<usize> = (n / 2..n).collect();
            let ps = build_padded_subproblem(&inst, &base, &clear, &tricky).unwrap();
            let (t_len, c_len) = (tricky.len(), clear.len());
            let mut bound = ExactCost::zero();
            for j in 1..=k {
                bound = bound.add(ExactCost::new(
                    binomial(k, j) * binomial(c_len, k - j),
                    binomial(t_len - j, k - j),
                ));
            }
            let eta_q = ps.instance.eta();
            for table in ps.instance.tables().unwrap() {
                for &u in &table.numerators {
                    assert!(
                        ExactCost::new(u, eta_q) <= bound,
                        "q entry {u}/{eta_q} above the mixture bound {bound}"
                    );
                }
            }
        }
    }

    #[test]
    fn undersized_tricky_set_rejected() {
        let inst = random_instance(6, 3, 2, 1, 9);
        let base = Assignment::constant(6, 0);
        let err = build_padded_subproblem(&inst, &base, &[0, 1, 2, 3], &[4, 5]);
        assert!(err.is_err());
    }
}
