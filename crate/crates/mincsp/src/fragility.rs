//! Per-constraint fragility and the fragile-dense property.
//!
//! A 0/1 constraint is fragile when changing any single variable of a
//! satisfied assignment unsatisfies it; equivalently, every axis-aligned
//! line of its truth table holds at most one satisfied cell. An instance is
//! fragile-dense at density `delta` when for every assignment x, variable v
//! and distinct values i != j:
//!
//! ```text
//! b(x, v, i) + b(x, v, j) >= delta * C(n-1, k-1)
//! ```
//!
//! The verifier checks the inequality exhaustively when `|D|^n` is small and
//! by sampling otherwise; sampling can only refute, never prove.

use crate::cost::{binomial, ExactCost};
use crate::csp::{Assignment, CspInstance, MAX_ARITY};
use crate::enumerate::for_each_gray;
use crate::error::{Error, Result};
use crate::rng::{derive_rng, stream};
use rand::Rng;

/// Above this many assignments the verifier switches to sampled mode.
pub const EXHAUSTIVE_CAP: u64 = 1 << 20;

/// One pre-merge 0/1 constraint: its support (which may be smaller than the
/// instance arity for padded encodings) and a violation mask in canonical
/// local order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalConstraint {
    pub vars: Vec<usize>,
    pub unsat: Vec<bool>,
}

impl LogicalConstraint {
    pub fn new(vars: Vec<usize>, unsat: Vec<bool>) -> Self {
        LogicalConstraint { vars, unsat }
    }

    pub(crate) fn validate(&self, n: usize, k: usize, domain: usize) -> Result<()> {
        if self.vars.is_empty() || self.vars.len() > k {
            return Err(Error::invalid(format!(
                "logical constraint arity {} outside 1..={k}",
                self.vars.len()
            )));
        }
        if self.vars.windows(2).any(|w| w[0] >= w[1]) || *self.vars.last().unwrap() >= n {
            return Err(Error::invalid(format!(
                "logical constraint vars {:?} not sorted/distinct/in-range",
                self.vars
            )));
        }
        let want = domain.pow(self.vars.len() as u32);
        if self.unsat.len() != want {
            return Err(Error::invalid(format!(
                "logical constraint mask has {} entries, expected {want}",
                self.unsat.len()
            )));
        }
        Ok(())
    }

    /// Fragility over the constraint's own support: along every axis line,
    /// at most one satisfied cell. An always-violated constraint is vacuously
    /// fragile; an always-satisfied one is not (for |D| >= 2).
    pub fn is_fragile(&self, domain: usize) -> bool {
        let arity = self.vars.len();
        let len = self.unsat.len();
        let mut stride = len;
        for _axis in 0..arity {
            stride /= domain;
            for idx in 0..len {
                // visit each line once, from its digit-0 cell
                if (idx / stride) % domain != 0 {
                    continue;
                }
                let satisfied = (0..domain)
                    .filter(|&i| !self.unsat[idx + i * stride])
                    .count();
                if satisfied > 1 {
                    return false;
                }
            }
        }
        true
    }
}

impl CspInstance {
    /// Number of fragile pre-merge constraints containing `v`.
    ///
    /// Requires fragility metadata, which only encoder-built explicit
    /// instances carry.
    pub fn count_fragile_constraints(&self, v: usize) -> Result<u64> {
        self.check_var_value(v, 0)?;
        let logical = self.logical.as_ref().ok_or_else(|| {
            Error::Unsupported(
                "per-constraint fragility metadata unavailable (implicit instance or loaded from JSON)"
                    .to_string(),
            )
        })?;
        let d = self.domain_size();
        Ok(logical
            .iter()
            .filter(|c| c.vars.binary_search(&v).is_ok() && c.is_fragile(d))
            .count() as u64)
    }

    /// The density implied by per-variable fragile-constraint counts:
    /// `min_v count(v) / (eta * C(n-1, k-1))`. The instance is fragile-dense
    /// at any delta up to this value.
    pub fn fragile_density_from_counts(&self) -> Result<ExactCost> {
        let scale = self.eta() * binomial(self.n() - 1, self.arity() - 1);
        let mut min: Option<u64> = None;
        for v in 0..self.n() {
            let c = self.count_fragile_constraints(v)?;
            min = Some(min.map_or(c, |m| m.min(c)));
        }
        Ok(ExactCost::new(min.unwrap_or(0), scale.max(1)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    /// Every assignment checked: a proof.
    Exhaustive,
    /// Random assignments only: a refutation-only check.
    Sampled { trials: u64 },
}

/// The (x, v, i, j) minimizing b(x,v,i) + b(x,v,j) among checked states.
#[derive(Clone, Debug)]
pub struct PairWitness {
    pub x: Assignment,
    pub v: usize,
    pub i: usize,
    pub j: usize,
    pub pair_sum: ExactCost,
}

#[derive(Clone, Debug)]
pub struct FragileDenseReport {
    pub mode: VerifyMode,
    pub delta: ExactCost,
    pub pass: bool,
    pub assignments_checked: u64,
    /// min over checked (x, v, i, j) of b(x,v,i) + b(x,v,j)
    pub min_pair_sum: ExactCost,
    pub min_witness: PairWitness,
    /// min_pair_sum / C(n-1, k-1): the largest delta the checked states allow
    pub measured_delta: ExactCost,
}

impl FragileDenseReport {
    /// The violating (x, v, i, j), present exactly when the check failed.
    pub fn failure_witness(&self) -> Option<&PairWitness> {
        if self.pass {
            None
        } else {
            Some(&self.min_witness)
        }
    }
}

/// Check the fragile-dense inequality at density `delta`.
///
/// Exhaustive when `|D|^n <= 2^20`, otherwise sampled over `trials` random
/// assignments drawn from `rng_seed`.
pub fn verify_fragile_dense(
    inst: &CspInstance,
    delta: ExactCost,
    trials: u64,
    rng_seed: u64,
) -> Result<FragileDenseReport> {
    if delta.is_zero() || delta > ExactCost::integer(1) {
        return Err(Error::invalid(format!("delta {delta} outside (0, 1]")));
    }
    let n = inst.n();
    let d = inst.domain_size();
    let exhaustive = (d as u64)
        .checked_pow(n as u32)
        .is_some_and(|states| states <= EXHAUSTIVE_CAP);

    let mut tracker = MinTracker::new(inst);
    let mut checked = 0u64;
    if exhaustive {
        let mut x = vec![0usize; n];
        let mut bmat: Vec<i64> = inst.b_matrix(&x).iter().map(|&u| u as i64).collect();
        tracker.observe(&x, &bmat);
        checked += 1;
        for_each_gray(d, &mut x, |x, v, old, _new| {
            // x[v] changed; refresh b rows of every co-constrained variable
            inst.visit_subsets_containing(v, &mut |vars| {
                for &w in vars {
                    if w == v {
                        continue;
                    }
                    for i in 0..d {
                        let with_new = numerator_override(inst, vars, x, (w, i), None);
                        let with_old = numerator_override(inst, vars, x, (w, i), Some((v, old)));
                        bmat[w * d + i] += with_new as i64 - with_old as i64;
                    }
                }
            });
            tracker.observe(x, &bmat);
            checked += 1;
        });
    } else {
        let mut rng = derive_rng(rng_seed, stream::VERIFIER, 0);
        let mut x = vec![0usize; n];
        for _ in 0..trials {
            for slot in x.iter_mut() {
                *slot = rng.random_range(0..d);
            }
            let bmat: Vec<i64> = inst.b_matrix(&x).iter().map(|&u| u as i64).collect();
            tracker.observe(&x, &bmat);
            checked += 1;
        }
    }

    let (min_num, min_witness) = tracker.finish();
    let eta = inst.eta();
    let scale = binomial(n - 1, inst.arity() - 1);
    // min_pair >= delta * C(n-1, k-1), cross-multiplied
    let pass = min_num as u128 * delta.den as u128
        >= delta.num as u128 * scale as u128 * eta as u128;
    Ok(FragileDenseReport {
        mode: if exhaustive {
            VerifyMode::Exhaustive
        } else {
            VerifyMode::Sampled { trials }
        },
        delta,
        pass,
        assignments_checked: checked,
        min_pair_sum: ExactCost::new(min_num, eta),
        min_witness,
        measured_delta: ExactCost::new(min_num, eta * scale.max(1)),
    })
}

fn numerator_override(
    inst: &CspInstance,
    vars: &[usize],
    x: &[usize],
    o1: (usize, usize),
    o2: Option<(usize, usize)>,
) -> u64 {
    let mut local = [0usize; MAX_ARITY];
    for (slot, &u) in vars.iter().enumerate() {
        let mut val = x[u];
        if o1.0 == u {
            val = o1.1;
        }
        if let Some((ov, oi)) = o2 {
            if ov == u {
                val = oi;
            }
        }
        local[slot] = val;
    }
    inst.penalty_numerator(vars, &local[..vars.len()])
}

struct MinTracker<'a> {
    inst: &'a CspInstance,
    best_num: u64,
    witness: Option<PairWitness>,
}

impl<'a> MinTracker<'a> {
    fn new(inst: &'a CspInstance) -> Self {
        MinTracker {
            inst,
            best_num: u64::MAX,
            witness: None,
        }
    }

    fn observe(&mut self, x: &[usize], bmat: &[i64]) {
        let d = self.inst.domain_size();
        for v in 0..self.inst.n() {
            let row = &bmat[v * d..(v + 1) * d];
            // two smallest entries; their sum is the min over value pairs
            let (mut i1, mut i2) = if row[0] <= row[1] { (0, 1) } else { (1, 0) };
            for i in 2..d {
                if row[i] < row[i1] {
                    i2 = i1;
                    i1 = i;
                } else if row[i] < row[i2] {
                    i2 = i;
                }
            }
            let sum = (row[i1] + row[i2]) as u64;
            if sum < self.best_num {
                self.best_num = sum;
                self.witness = Some(PairWitness {
                    x: Assignment::new(x.to_vec()),
                    v,
                    i: i1.min(i2),
                    j: i1.max(i2),
                    pair_sum: ExactCost::new(sum, self.inst.eta()),
                });
            }
        }
    }

    fn finish(self) -> (u64, PairWitness) {
        let w = self.witness.expect("at least one assignment checked");
        (self.best_num, w)
    }
}
