//! Recursive approximation scheme for rigid MIN-2CSPs: correlation
//! clustering with a fixed cluster count and, through trunk enumeration,
//! hierarchical clustering.
//!
//! Each recursion frame holds a tricky set T and pins for everything else.
//! It solves the pinned problem additively; if that answer is expensive
//! relative to |T|^2 (or the depth budget is spent) it is returned as-is.
//! Otherwise the frame samples vertices of T, guesses their values
//! exhaustively, runs the two greedy rounds, freezes the clear-cut margin
//! winners, and recurses on the rest. The best clustering over all guesses
//! and the frame's own additive answer wins.

use crate::additive::{additive_solve, AdditiveBackend, AdditiveRequest};
use crate::cost::{binomial, ExactCost};
use crate::csp::{Assignment, CspInstance};
use crate::encode::hier::{hier_to_rigid_csp, tree_cost, HierProblem, Trunk};
use crate::enumerate::decode_counting;
use crate::error::{Error, Result};
use crate::fragile::SampleCount;
use crate::report::{PhaseTimings, ReportDetail, SolveReport};
use crate::rng::{derive_rng, derive_seed, stream};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::time::Instant;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RigidPtasParams {
    pub epsilon: ExactCost,
    /// rigidity density; 1/M for hierarchical encodings
    pub delta: ExactCost,
    pub samples: SampleCount,
    pub guess_cap: u64,
    /// recursion depth bound; defaults to |D| + 1
    pub depth_override: Option<usize>,
    pub seed: u64,
    pub backend: AdditiveBackend,
}

impl RigidPtasParams {
    pub fn new(epsilon: ExactCost, delta: ExactCost, seed: u64) -> Self {
        RigidPtasParams {
            epsilon,
            delta,
            samples: SampleCount::Auto,
            guess_cap: crate::fragile::DEFAULT_GUESS_CAP,
            depth_override: None,
            seed,
            backend: AdditiveBackend::exact(),
        }
    }

    pub fn with_samples(mut self, s: usize) -> Self {
        self.samples = SampleCount::Fixed(s);
        self
    }

    pub fn with_backend(mut self, backend: AdditiveBackend) -> Self {
        self.backend = backend;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.epsilon.is_zero() {
            return Err(Error::invalid("epsilon must be positive".to_string()));
        }
        if self.delta.is_zero() || self.delta > ExactCost::integer(1) {
            return Err(Error::invalid("delta must lie in (0, 1]".to_string()));
        }
        Ok(())
    }
}

/// Sample size from the scheme's own formula (natural logarithm):
/// ceil(432^2 |D|^4 ln(1440 |D|^3 / delta) / (2 delta^4)).
pub fn auto_sample_count_rigid(delta: ExactCost, domain: usize) -> u64 {
    let d = domain as f64;
    let inv_delta = delta.den as f64 / delta.num as f64;
    let ratio = 1440.0 * d.powi(3) * inv_delta;
    (432.0f64.powi(2) * d.powi(4) * ratio.ln() * inv_delta.powi(4) / 2.0).ceil() as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameBranch {
    /// additive answer returned because it crossed the cost threshold
    Threshold,
    /// additive answer returned because the depth budget was spent
    DepthLimit,
    /// guesses enumerated and children recursed
    Recursed,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrameRecord {
    pub frame: u64,
    pub depth: usize,
    pub tricky: usize,
    pub additive_cost: ExactCost,
    pub threshold: ExactCost,
    pub branch: FrameBranch,
    pub guesses: u64,
    pub best_cost: ExactCost,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RigidTrace {
    pub frames: Vec<FrameRecord>,
    pub frame_count: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RigidDetail {
    pub params: RigidPtasParams,
    pub trace: RigidTrace,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HierDetail {
    pub params: RigidPtasParams,
    pub levels: usize,
    pub clusters: usize,
    pub trunk_count: u64,
    pub per_trunk_cost: Vec<ExactCost>,
    pub winning_trunk_index: usize,
    /// parent choices for levels 2..=M, flattened; empty at M = 1
    pub winning_trunk_parents: Vec<usize>,
    pub winning: Box<RigidDetail>,
}

struct Solver<'a> {
    inst: &'a CspInstance,
    params: &'a RigidPtasParams,
    s: usize,
    depth_bound: usize,
    trace: RigidTrace,
    timings: PhaseTimings,
    /// results per (depth, pins): distinct guesses frequently freeze the same
    /// clear-cut values, and frames with equal pins are identical
    /// computations because their RNG streams are content-keyed
    memo: HashMap<(usize, Vec<Option<usize>>), (Assignment, ExactCost)>,
}

/// Content-keyed stream id for a frame: equal (depth, pins) means an equal
/// stream, so equal subproblems are literally the same computation.
fn frame_stream_id(depth: usize, pinned: &[Option<usize>]) -> u64 {
    let mut h = 0xcbf29ce484222325u64 ^ (depth as u64).wrapping_mul(0x100000001b3);
    for p in pinned {
        let v = match p {
            None => u64::MAX,
            Some(val) => *val as u64,
        };
        h ^= v.wrapping_add(0x9e3779b97f4a7c15);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Solve a rigid MIN-2CSP. The caller supplies the rigidity density delta
/// (1/M for hierarchical encodings).
pub fn solve_rigid(inst: &CspInstance, params: &RigidPtasParams) -> Result<SolveReport> {
    params.validate()?;
    if inst.arity() != 2 {
        return Err(Error::invalid(format!(
            "rigid solver requires arity 2, got {}",
            inst.arity()
        )));
    }
    let start = Instant::now();
    let s = match params.samples {
        SampleCount::Auto => {
            usize::try_from(auto_sample_count_rigid(params.delta, inst.domain_size()))
                .map_err(|_| Error::CapExceeded("formula sample size too large".to_string()))?
        }
        SampleCount::Fixed(s) => s,
    };
    if s == 0 {
        return Err(Error::invalid("sample count must be positive".to_string()));
    }
    let mut solver = Solver {
        inst,
        params,
        s,
        depth_bound: params.depth_override.unwrap_or(inst.domain_size() + 1),
        trace: RigidTrace {
            frames: Vec::new(),
            frame_count: 0,
        },
        timings: PhaseTimings::default(),
        memo: HashMap::new(),
    };
    let tricky: Vec<usize> = (0..inst.n()).collect();
    let (x, cost) = solver.recurse(tricky, vec![None; inst.n()], 0)?;
    solver.timings.total_ns = start.elapsed().as_nanos() as u64;
    Ok(SolveReport {
        algorithm: "rigid-ptas".to_string(),
        cost,
        assignment: x.values().to_vec(),
        seed: params.seed,
        timings: solver.timings,
        detail: ReportDetail::Rigid(RigidDetail {
            params: params.clone(),
            trace: solver.trace,
        }),
    })
}

impl<'a> Solver<'a> {
    fn recurse(
        &mut self,
        tricky: Vec<usize>,
        pinned: Vec<Option<usize>>,
        depth: usize,
    ) -> Result<(Assignment, ExactCost)> {
        if let Some(hit) = self.memo.get(&(depth, pinned.clone())) {
            return Ok(hit.clone());
        }
        let frame_id = self.trace.frame_count;
        self.trace.frame_count += 1;
        let stream_id = frame_stream_id(depth, &pinned);
        let inst = self.inst;
        let d = inst.domain_size();
        let delta = self.params.delta;
        let t_len = tricky.len() as u64;

        // pinned-constrained additive answer, budget
        // (eps / (1 + eps)) delta^3 |T|^2 / (6 * 72^2 |D|^3) of C(|T|, 2)
        let eps = self.params.epsilon;
        let budget = ExactCost::new(eps.num, eps.den + eps.num)
            .mul(delta)
            .mul(delta)
            .mul(delta)
            .mul_int(t_len * t_len)
            .div_int(6 * 72 * 72 * (d as u64).pow(3))
            .div_int(binomial(tricky.len(), 2).max(1));
        let backend = self
            .params
            .backend
            .reseeded(derive_seed(self.params.seed, stream::RIGID_ADDITIVE, stream_id));
        let t0 = Instant::now();
        let (x_a, additive_cost) = additive_solve(
            &AdditiveRequest {
                inst,
                pinned: pinned.clone(),
                linear: None,
                epsilon: budget,
            },
            backend,
        )?;
        self.timings.prepass_ns += t0.elapsed().as_nanos() as u64;

        let threshold = ExactCost::new(
            delta.num.pow(3) * t_len * t_len,
            delta.den.pow(3) * 6 * 72 * 72 * (d as u64).pow(3),
        );

        if additive_cost >= threshold || depth >= self.depth_bound {
            let branch = if additive_cost >= threshold {
                FrameBranch::Threshold
            } else {
                FrameBranch::DepthLimit
            };
            self.trace.frames.push(FrameRecord {
                frame: frame_id,
                depth,
                tricky: tricky.len(),
                additive_cost,
                threshold,
                branch,
                guesses: 0,
                best_cost: additive_cost,
            });
            debug_assert!(agrees_with_pins(&x_a, &pinned));
            self.memo
                .insert((depth, pinned), (x_a.clone(), additive_cost));
            return Ok((x_a, additive_cost));
        }

        // draw s vertices of T with replacement; guess their values
        let tg = Instant::now();
        let mut rng = derive_rng(self.params.seed, stream::RIGID_SAMPLES, stream_id);
        let draws: Vec<usize> = (0..self.s)
            .map(|_| tricky[rng.random_range(0..tricky.len())])
            .collect();
        let mut guessed = draws.clone();
        guessed.sort_unstable();
        guessed.dedup();
        let guess_count = (d as u64).checked_pow(guessed.len() as u32);
        if guess_count.is_none_or(|g| g > self.params.guess_cap) {
            return Err(Error::CapExceeded(format!(
                "{d}^{} guesses exceed the guess cap {}; lower the sample count",
                guessed.len(),
                self.params.guess_cap
            )));
        }
        let guess_count = guess_count.unwrap();
        self.timings.guess_setup_ns += tg.elapsed().as_nanos() as u64;

        let pins: Vec<(usize, usize)> = pinned
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|val| (v, val)))
            .collect();

        let mut best = (x_a, additive_cost);
        let mut guess_vals = vec![0usize; guessed.len()];
        let mut guess: Vec<Option<usize>> = vec![None; inst.n()];
        for code in 0..guess_count {
            let tg = Instant::now();
            decode_counting(code as usize, d, &mut guess_vals);
            for (&v, &val) in guessed.iter().zip(guess_vals.iter()) {
                guess[v] = Some(val);
            }
            self.timings.guess_setup_ns += tg.elapsed().as_nanos() as u64;

            let td = Instant::now();
            // first greedy round from the sampled estimator plus pinned mass
            let mut x1: Vec<usize> = pinned.iter().map(|p| p.unwrap_or(0)).collect();
            for &v in &tricky {
                x1[v] = self.estimator_argmin(v, &draws, &guess, &pins, t_len);
            }
            // second greedy round from exact b against the frozen x1
            let bmat = inst.b_matrix(&x1);
            let mut x2 = x1.clone();
            for &v in &tricky {
                let row = &bmat[v * d..(v + 1) * d];
                let mut best_i = 0usize;
                for (i, &score) in row.iter().enumerate().skip(1) {
                    if score < row[best_i] {
                        best_i = i;
                    }
                }
                x2[v] = best_i;
            }
            // clear-cut margin delta |T| / 12|D|
            let margin_num = delta.num as i128 * t_len as i128 * inst.eta() as i128;
            let margin_den = 12 * d as i128 * delta.den as i128;
            let mut child_tricky = Vec::new();
            let mut child_pinned = pinned.clone();
            for &v in &tricky {
                let chosen = bmat[v * d + x2[v]];
                let clear = (0..d).all(|j| {
                    j == x2[v] || {
                        let gap = bmat[v * d + j] as i128 - chosen as i128;
                        gap * margin_den > margin_num
                    }
                });
                if clear {
                    child_pinned[v] = Some(x2[v]);
                } else {
                    child_tricky.push(v);
                }
            }
            self.timings.dense_ns += td.elapsed().as_nanos() as u64;

            let child = self.recurse(child_tricky, child_pinned, depth + 1)?;
            if child.1 < best.1 {
                best = child;
            }
        }

        self.trace.frames.push(FrameRecord {
            frame: frame_id,
            depth,
            tricky: tricky.len(),
            additive_cost,
            threshold,
            branch: FrameBranch::Recursed,
            guesses: guess_count,
            best_cost: best.1,
        });
        debug_assert!(agrees_with_pins(&best.0, &pinned));
        self.memo.insert((depth, pinned), best.clone());
        Ok(best)
    }

    /// argmin_i of |T| * (sampled-draw mass) + s * (pinned mass), the exact
    /// numerator ordering of the frame estimator. Draws equal to v are
    /// skipped (no self-pair penalty is defined).
    fn estimator_argmin(
        &self,
        v: usize,
        draws: &[usize],
        guess: &[Option<usize>],
        pins: &[(usize, usize)],
        t_len: u64,
    ) -> usize {
        let inst = self.inst;
        let d = inst.domain_size();
        let mut best_i = 0usize;
        let mut best_score = u128::MAX;
        for i in 0..d {
            let mut sampled = 0u64;
            for &u in draws {
                if u == v {
                    continue;
                }
                let val = guess[u].expect("drawn vertices are always guessed");
                sampled += pair_numerator(inst, u, val, v, i);
            }
            let mut pinned_mass = 0u64;
            for &(u, val) in pins {
                pinned_mass += pair_numerator(inst, u, val, v, i);
            }
            let score =
                t_len as u128 * sampled as u128 + self.s as u128 * pinned_mass as u128;
            if score < best_score {
                best_score = score;
                best_i = i;
            }
        }
        best_i
    }
}

fn pair_numerator(inst: &CspInstance, u: usize, u_val: usize, v: usize, v_val: usize) -> u64 {
    if u < v {
        inst.penalty_numerator(&[u, v], &[u_val, v_val])
    } else {
        inst.penalty_numerator(&[v, u], &[v_val, u_val])
    }
}

fn agrees_with_pins(x: &Assignment, pinned: &[Option<usize>]) -> bool {
    pinned
        .iter()
        .enumerate()
        .all(|(v, p)| p.is_none_or(|val| x.get(v) == val))
}

/// One frame of the principal path: the branch that always guesses the
/// reference assignment correctly. A diagnostic walker used to measure the
/// finishing behavior of the recursion against a known optimum.
#[derive(Clone, Debug)]
pub struct PrincipalFrame {
    pub depth: usize,
    pub tricky: Vec<usize>,
    /// tricky vertices frozen by this frame
    pub clear_cut: Vec<usize>,
    /// do the pins entering this frame agree with the reference
    pub pins_correct: bool,
    /// Some(branch) when the walk stopped here
    pub end: Option<FrameBranch>,
}

/// Walk the recursion branch that guesses `reference` on every draw,
/// recording tricky sets and clear-cut extractions per frame.
pub fn trace_principal_path(
    inst: &CspInstance,
    reference: &Assignment,
    params: &RigidPtasParams,
) -> Result<Vec<PrincipalFrame>> {
    params.validate()?;
    inst.check_assignment(reference)?;
    if inst.arity() != 2 {
        return Err(Error::invalid("principal path requires arity 2".to_string()));
    }
    let s = match params.samples {
        SampleCount::Auto => auto_sample_count_rigid(params.delta, inst.domain_size()) as usize,
        SampleCount::Fixed(s) => s,
    };
    let d = inst.domain_size();
    let delta = params.delta;
    let depth_bound = params.depth_override.unwrap_or(d + 1);
    let solver = Solver {
        inst,
        params,
        s,
        depth_bound,
        trace: RigidTrace {
            frames: Vec::new(),
            frame_count: 0,
        },
        timings: PhaseTimings::default(),
        memo: HashMap::new(),
    };

    let mut frames = Vec::new();
    let mut tricky: Vec<usize> = (0..inst.n()).collect();
    let mut pinned: Vec<Option<usize>> = vec![None; inst.n()];
    for depth in 0..=depth_bound {
        let t_len = tricky.len() as u64;
        let pins_correct = pinned
            .iter()
            .enumerate()
            .all(|(v, p)| p.is_none_or(|val| val == reference.get(v)));
        // threshold decision mirrors the real frame
        let eps = params.epsilon;
        let budget = ExactCost::new(eps.num, eps.den + eps.num)
            .mul(delta)
            .mul(delta)
            .mul(delta)
            .mul_int(t_len * t_len)
            .div_int(6 * 72 * 72 * (d as u64).pow(3))
            .div_int(binomial(tricky.len(), 2).max(1));
        let stream_id = frame_stream_id(depth, &pinned);
        let backend = params
            .backend
            .reseeded(derive_seed(params.seed, stream::RIGID_ADDITIVE, stream_id));
        let (_, additive_cost) = additive_solve(
            &AdditiveRequest {
                inst,
                pinned: pinned.clone(),
                linear: None,
                epsilon: budget,
            },
            backend,
        )?;
        let threshold = ExactCost::new(
            delta.num.pow(3) * t_len * t_len,
            delta.den.pow(3) * 6 * 72 * 72 * (d as u64).pow(3),
        );
        if additive_cost >= threshold || depth >= depth_bound {
            let branch = if additive_cost >= threshold {
                FrameBranch::Threshold
            } else {
                FrameBranch::DepthLimit
            };
            frames.push(PrincipalFrame {
                depth,
                tricky: tricky.clone(),
                clear_cut: Vec::new(),
                pins_correct,
                end: Some(branch),
            });
            return Ok(frames);
        }

        let mut rng = derive_rng(params.seed, stream::RIGID_SAMPLES, stream_id);
        let draws: Vec<usize> = (0..s)
            .map(|_| tricky[rng.random_range(0..tricky.len())])
            .collect();
        // the principal guess: reference values on the drawn vertices
        let mut guess: Vec<Option<usize>> = vec![None; inst.n()];
        for &u in &draws {
            guess[u] = Some(reference.get(u));
        }
        let pins: Vec<(usize, usize)> = pinned
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|val| (v, val)))
            .collect();
        let mut x1: Vec<usize> = pinned.iter().map(|p| p.unwrap_or(0)).collect();
        for &v in &tricky {
            x1[v] = solver.estimator_argmin(v, &draws, &guess, &pins, t_len);
        }
        let bmat = inst.b_matrix(&x1);
        let mut x2 = x1.clone();
        for &v in &tricky {
            let row = &bmat[v * d..(v + 1) * d];
            let mut best_i = 0usize;
            for (i, &score) in row.iter().enumerate().skip(1) {
                if score < row[best_i] {
                    best_i = i;
                }
            }
            x2[v] = best_i;
        }
        let margin_num = delta.num as i128 * t_len as i128 * inst.eta() as i128;
        let margin_den = 12 * d as i128 * delta.den as i128;
        let mut clear = Vec::new();
        let mut next_tricky = Vec::new();
        for &v in &tricky {
            let chosen = bmat[v * d + x2[v]];
            let ok = (0..d).all(|j| {
                j == x2[v] || {
                    let gap = bmat[v * d + j] as i128 - chosen as i128;
                    gap * margin_den > margin_num
                }
            });
            if ok {
                clear.push(v);
                pinned[v] = Some(x2[v]);
            } else {
                next_tricky.push(v);
            }
        }
        frames.push(PrincipalFrame {
            depth,
            tricky: tricky.clone(),
            clear_cut: clear,
            pins_correct,
            end: None,
        });
        tricky = next_tricky;
    }
    Ok(frames)
}

/// Vertices that are delta |cluster| / 3 clear in exact b at the reference:
/// the margin that makes a vertex obvious for the finishing argument.
pub fn obvious_vertices(
    inst: &CspInstance,
    reference: &Assignment,
    delta: ExactCost,
) -> Result<Vec<bool>> {
    inst.check_assignment(reference)?;
    let n = inst.n();
    let d = inst.domain_size();
    let mut cluster_size = vec![0u64; d];
    for v in 0..n {
        cluster_size[reference.get(v)] += 1;
    }
    let bmat = inst.b_matrix(reference.values());
    let mut out = vec![false; n];
    for v in 0..n {
        let own = reference.get(v);
        let chosen = bmat[v * d + own];
        // margin delta |C| / 3, cross-multiplied
        let margin_num = delta.num as i128 * cluster_size[own] as i128 * inst.eta() as i128;
        let margin_den = 3 * delta.den as i128;
        out[v] = (0..d).all(|j| {
            j == own || {
                let gap = bmat[v * d + j] as i128 - chosen as i128;
                gap * margin_den > margin_num
            }
        });
    }
    Ok(out)
}

/// Number of reference clusters whose intersection with `tricky` holds no
/// obvious vertex (empty clusters count as finished).
pub fn finished_cluster_count(
    inst: &CspInstance,
    reference: &Assignment,
    delta: ExactCost,
    tricky: &[usize],
) -> Result<usize> {
    let obvious = obvious_vertices(inst, reference, delta)?;
    let d = inst.domain_size();
    let mut unfinished = vec![false; d];
    for &v in tricky {
        if obvious[v] {
            unfinished[reference.get(v)] = true;
        }
    }
    Ok(unfinished.iter().filter(|&&u| !u).count())
}

/// Hierarchical clustering: enumerate trunks, solve the rigid encoding of
/// each with delta = 1/M, return the cheapest tree.
pub fn solve_hierarchical(hp: &HierProblem, params: &RigidPtasParams) -> Result<SolveReport> {
    let start = Instant::now();
    let delta = ExactCost::new(1, hp.levels as u64);
    if hp.clusters == 1 {
        // a single trunk and a single clustering: nothing to search
        let trunk = Trunk::enumerate(1, hp.levels).pop().expect("one trunk");
        let x = Assignment::constant(hp.n, 0);
        let cost = tree_cost(hp, &trunk, &x)?;
        let inner = RigidDetail {
            params: RigidPtasParams {
                delta,
                ..params.clone()
            },
            trace: RigidTrace {
                frames: Vec::new(),
                frame_count: 0,
            },
        };
        return Ok(SolveReport {
            algorithm: "hier-ptas".to_string(),
            cost,
            assignment: x.values().to_vec(),
            seed: params.seed,
            timings: PhaseTimings {
                total_ns: start.elapsed().as_nanos() as u64,
                ..PhaseTimings::default()
            },
            detail: ReportDetail::Hierarchical(HierDetail {
                params: params.clone(),
                levels: hp.levels,
                clusters: hp.clusters,
                trunk_count: 1,
                per_trunk_cost: vec![cost],
                winning_trunk_index: 0,
                winning_trunk_parents: Vec::new(),
                winning: Box::new(inner),
            }),
        });
    }

    let trunks = Trunk::enumerate(hp.clusters, hp.levels);
    let mut per_trunk_cost = Vec::with_capacity(trunks.len());
    let mut best: Option<(usize, SolveReport)> = None;
    let mut timings = PhaseTimings::default();
    for (ti, trunk) in trunks.iter().enumerate() {
        let inst = hier_to_rigid_csp(hp, trunk)?;
        let trunk_params = RigidPtasParams {
            delta,
            seed: derive_seed(params.seed, stream::HIER_TRUNK, ti as u64),
            ..params.clone()
        };
        let report = solve_rigid(&inst, &trunk_params)?;
        timings.prepass_ns += report.timings.prepass_ns;
        timings.guess_setup_ns += report.timings.guess_setup_ns;
        timings.dense_ns += report.timings.dense_ns;
        timings.finish_ns += report.timings.finish_ns;
        per_trunk_cost.push(report.cost);
        if best.as_ref().is_none_or(|(_, b)| report.cost < b.cost) {
            best = Some((ti, report));
        }
    }
    let (winning_trunk_index, winner) = best.expect("at least one trunk");
    let ReportDetail::Rigid(inner) = winner.detail else {
        return Err(Error::Internal("rigid solve produced a foreign detail".to_string()));
    };
    timings.total_ns = start.elapsed().as_nanos() as u64;
    Ok(SolveReport {
        algorithm: "hier-ptas".to_string(),
        cost: winner.cost,
        assignment: winner.assignment,
        seed: params.seed,
        timings,
        detail: ReportDetail::Hierarchical(HierDetail {
            params: params.clone(),
            levels: hp.levels,
            clusters: hp.clusters,
            trunk_count: trunks.len() as u64,
            per_trunk_cost,
            winning_trunk_index,
            winning_trunk_parents: trunks[winning_trunk_index].flat_parents(),
            winning: Box::new(inner),
        }),
    })
}
