//! Reproducible planted-instance generators: a known zero-cost solution plus
//! independent noise, so the planted cost upper-bounds the optimum and the
//! noise level is a tunable difficulty knob. Same seed, same instance,
//! byte for byte, on every platform.

use crate::cost::{binomial, ExactCost};
use crate::csp::{Assignment, CspInstance};
use crate::encode::gb::GbInstance;
use crate::encode::hier::{HierProblem, Trunk};
use crate::encode::ksat::{Conjunction, DnfInstance};
use crate::encode::ncp::{NcpInstance, XorEquation};
use crate::encode::ugp::{UgpEdge, UgpInstance};
use crate::error::{Error, Result};
use crate::fragility::verify_fragile_dense;
use crate::rng::{derive_rng, sample_distinct_sorted, stream};
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Clone, Debug)]
pub struct PlantedGb {
    pub board: GbInstance,
    /// planted row switches, +-1
    pub rows: Vec<i8>,
    pub cols: Vec<i8>,
    /// lit bulbs at the planted switches = number of noise flips
    pub planted_cost: u64,
}

impl PlantedGb {
    /// The planted switches as a CSP assignment (rows then columns, -1 -> 1).
    pub fn csp_assignment(&self) -> Assignment {
        Assignment::new(
            self.rows
                .iter()
                .chain(self.cols.iter())
                .map(|&s| (s == -1) as usize)
                .collect(),
        )
    }
}

/// Rank-1 board x* y*^T with each entry independently negated with
/// probability `noise`.
pub fn planted_gb(m: usize, noise: f64, seed: u64) -> Result<PlantedGb> {
    if m == 0 {
        return Err(Error::invalid("board side must be positive".to_string()));
    }
    if !(0.0..0.5).contains(&noise) {
        return Err(Error::invalid(format!("noise {noise} outside [0, 0.5)")));
    }
    let mut rng = derive_rng(seed, stream::GENERATOR, 0);
    let rows: Vec<i8> = (0..m).map(|_| if rng.random() { -1 } else { 1 }).collect();
    let cols: Vec<i8> = (0..m).map(|_| if rng.random() { -1 } else { 1 }).collect();
    let mut flips = 0u64;
    let mut entries = vec![vec![1i8; m]; m];
    for (r, row) in entries.iter_mut().enumerate() {
        for (c, e) in row.iter_mut().enumerate() {
            *e = rows[r] * cols[c];
            if rng.random::<f64>() < noise {
                *e = -*e;
                flips += 1;
            }
        }
    }
    Ok(PlantedGb {
        board: GbInstance::from_pm1(&entries)?,
        rows,
        cols,
        planted_cost: flips,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CspTemplate {
    /// XOR equations of the given arity
    Ncp { arity: usize },
    /// permutation constraints over the given color count
    Ugp { colors: usize },
    /// DNF conjunctions of the given arity
    Ksat { arity: usize },
}

#[derive(Clone, Debug)]
pub struct PlantedCsp {
    pub inst: CspInstance,
    pub planted: Assignment,
    /// fragile density implied by per-variable fragile-constraint counts
    pub delta: ExactCost,
    pub planted_cost: ExactCost,
}

/// Planted fragile instance: `density` scales the constraint count against
/// C(n, k); each constraint is built satisfied at the planted assignment and
/// flipped to violated with probability `noise`.
pub fn planted_csp(
    n: usize,
    template: CspTemplate,
    density: f64,
    noise: f64,
    seed: u64,
    required_delta: Option<ExactCost>,
) -> Result<PlantedCsp> {
    if !(0.0..=1.0).contains(&noise) {
        return Err(Error::invalid(format!("noise {noise} outside [0, 1]")));
    }
    if density <= 0.0 {
        return Err(Error::invalid("density must be positive".to_string()));
    }
    let mut rng = derive_rng(seed, stream::GENERATOR, 1);
    let (inst, planted, planted_cost) = match template {
        CspTemplate::Ncp { arity } => {
            let count = (density * binomial(n, arity) as f64).ceil() as usize;
            let planted: Vec<usize> = (0..n).map(|_| rng.random_range(0..2)).collect();
            let equations: Vec<XorEquation> = (0..count)
                .map(|_| {
                    let vars = sample_distinct_sorted(&mut rng, arity, n);
                    let parity = vars.iter().fold(0usize, |p, &v| p ^ planted[v]);
                    let mut rhs = parity == 1;
                    if rng.random::<f64>() < noise {
                        rhs = !rhs;
                    }
                    XorEquation::new(vars, rhs).expect("distinct sorted vars")
                })
                .collect();
            let ncp = NcpInstance::new(n, equations)?;
            let cost = ncp.direct_cost(&planted, arity)?;
            (ncp.to_csp(arity)?, planted, cost)
        }
        CspTemplate::Ugp { colors } => {
            let count = (density * binomial(n, 2) as f64).ceil() as usize;
            let planted: Vec<usize> = (0..n).map(|_| rng.random_range(0..colors)).collect();
            let edges: Vec<UgpEdge> = (0..count)
                .map(|_| {
                    let pair = sample_distinct_sorted(&mut rng, 2, n);
                    let (u, v) = (pair[0], pair[1]);
                    let mut perm: Vec<usize> = (0..colors).collect();
                    perm.shuffle(&mut rng);
                    // make the planted coloring satisfy the edge
                    let z = perm.iter().position(|&c| c == planted[u]).unwrap();
                    perm.swap(planted[v], z);
                    if rng.random::<f64>() < noise {
                        // swap the planted image away: now violated
                        let mut z = rng.random_range(0..colors);
                        while z == planted[v] {
                            z = rng.random_range(0..colors);
                        }
                        perm.swap(planted[v], z);
                    }
                    UgpEdge { u, v, perm }
                })
                .collect();
            let ugp = UgpInstance::new(n, colors, edges)?;
            let cost = ugp.direct_cost(&planted);
            (ugp.to_csp()?, planted, cost)
        }
        CspTemplate::Ksat { arity } => {
            let count = (density * binomial(n, arity) as f64).ceil() as usize;
            let planted: Vec<usize> = (0..n).map(|_| rng.random_range(0..2)).collect();
            let conjunctions: Vec<Conjunction> = (0..count)
                .map(|_| {
                    let vars = sample_distinct_sorted(&mut rng, arity, n);
                    let mut literals: Vec<(usize, bool)> =
                        vars.iter().map(|&v| (v, planted[v] == 1)).collect();
                    if rng.random::<f64>() < noise {
                        let flip = rng.random_range(0..arity);
                        literals[flip].1 = !literals[flip].1;
                    }
                    Conjunction::new(literals).expect("distinct vars")
                })
                .collect();
            let dnf = DnfInstance::new(n, arity, conjunctions)?;
            let cost = dnf.direct_cost(&planted);
            (dnf.to_csp()?, planted, cost)
        }
    };
    let delta = inst.fragile_density_from_counts()?;
    if delta.is_zero() {
        return Err(Error::invalid(
            "density too low: some variable sees no fragile constraint".to_string(),
        ));
    }
    if let Some(required) = required_delta {
        if delta < required {
            return Err(Error::invalid(format!(
                "declared density {delta} below the required {required}"
            )));
        }
    }
    let check = verify_fragile_dense(&inst, delta, 50, seed)?;
    if !check.pass {
        return Err(Error::Internal(
            "generated instance failed its own density check".to_string(),
        ));
    }
    Ok(PlantedCsp {
        inst,
        planted: Assignment::new(planted),
        delta,
        planted_cost,
    })
}

#[derive(Clone, Debug)]
pub struct PlantedHier {
    pub problem: HierProblem,
    pub trunk: Trunk,
    pub assignment: Assignment,
    pub planted_cost: ExactCost,
}

/// Planted M-level hierarchy: a random trunk and cluster assignment (each
/// cluster nonempty when n >= d) define F exactly; noise then perturbs each
/// pair entry by one step, staying inside 0..=M, so the planted cost is the
/// perturbation count over M.
pub fn planted_hier(
    n: usize,
    levels: usize,
    clusters: usize,
    noise: f64,
    seed: u64,
) -> Result<PlantedHier> {
    if !(0.0..=1.0).contains(&noise) {
        return Err(Error::invalid(format!("noise {noise} outside [0, 1]")));
    }
    if n < clusters {
        return Err(Error::invalid(
            "need at least one object per planted cluster".to_string(),
        ));
    }
    let mut rng = derive_rng(seed, stream::GENERATOR, 2);
    let parents: Vec<Vec<usize>> = (0..levels.saturating_sub(1))
        .map(|_| (0..clusters).map(|_| rng.random_range(0..clusters)).collect())
        .collect();
    let trunk = Trunk::new(levels, clusters, parents)?;
    // nonempty planted clusters: first d objects seed them, the rest spread
    let mut assignment: Vec<usize> = (0..n)
        .map(|v| if v < clusters { v } else { rng.random_range(0..clusters) })
        .collect();
    assignment.shuffle(&mut rng);
    let m = levels as u32;
    let mut matrix = vec![0u32; n * n];
    let mut perturbed = 0u64;
    for u in 0..n {
        for v in u + 1..n {
            let mut f = trunk.lca_depth(assignment[u], assignment[v])? as u32;
            if rng.random::<f64>() < noise {
                // one step, staying inside the range
                f = if f == 0 {
                    1
                } else if f == m {
                    m - 1
                } else if rng.random() {
                    f + 1
                } else {
                    f - 1
                };
                perturbed += 1;
            }
            matrix[u * n + v] = f;
            matrix[v * n + u] = f;
        }
    }
    Ok(PlantedHier {
        problem: HierProblem::new(n, levels, clusters, matrix)?,
        trunk,
        assignment: Assignment::new(assignment),
        planted_cost: ExactCost::new(perturbed, levels as u64),
    })
}

/// Correlation clustering: the M = 1 special case.
pub fn planted_cc(n: usize, clusters: usize, noise: f64, seed: u64) -> Result<PlantedHier> {
    planted_hier(n, 1, clusters, noise, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::hier::tree_cost;
    use crate::oracle;

    #[test]
    fn zero_noise_gb_has_zero_oracle_cost() {
        for seed in 0..5 {
            let p = planted_gb(6, 0.0, seed).unwrap();
            assert_eq!(p.planted_cost, 0);
            assert!(oracle::exact_gb(&p.board, 24).unwrap().cost.is_zero());
            // planted switches light nothing
            assert_eq!(p.board.lit_count_pm1(&p.rows, &p.cols), 0);
        }
    }

    #[test]
    fn planted_cost_upper_bounds_oracle() {
        for seed in 0..20 {
            let p = planted_gb(8, 0.05, seed).unwrap();
            let opt = oracle::exact_gb(&p.board, 24).unwrap().cost;
            assert!(opt <= ExactCost::integer(p.planted_cost));
        }
    }

    #[test]
    fn planted_mean_matches_binomial_expectation() {
        // mean planted cost over many seeds within 3 standard errors of
        // p * m^2 (sum of independent Bernoulli flips)
        let (m, p, runs) = (16usize, 0.05f64, 1000u64);
        let mut total = 0u64;
        for seed in 0..runs {
            total += planted_gb(m, p, seed).unwrap().planted_cost;
        }
        let mean = total as f64 / runs as f64;
        let expect = p * (m * m) as f64;
        let se = ((m * m) as f64 * p * (1.0 - p) / runs as f64).sqrt();
        assert!(
            (mean - expect).abs() <= 3.0 * se,
            "mean {mean} vs {expect} +- {}",
            3.0 * se
        );
    }

    #[test]
    fn same_seed_reproduces_identical_instances() {
        let a = planted_gb(10, 0.1, 42).unwrap();
        let b = planted_gb(10, 0.1, 42).unwrap();
        assert_eq!(a.board, b.board);
        assert_eq!(a.rows, b.rows);
        let h1 = planted_hier(8, 2, 2, 0.2, 9).unwrap();
        let h2 = planted_hier(8, 2, 2, 0.2, 9).unwrap();
        assert_eq!(h1.problem, h2.problem);
        let c1 = planted_csp(8, CspTemplate::Ncp { arity: 2 }, 0.9, 0.1, 7, None).unwrap();
        let c2 = planted_csp(8, CspTemplate::Ncp { arity: 2 }, 0.9, 0.1, 7, None).unwrap();
        assert_eq!(c1.inst.to_json(), c2.inst.to_json());
    }

    #[test]
    fn noise_parameter_validated() {
        assert!(planted_gb(4, 0.5, 1).is_err());
        assert!(planted_gb(4, -0.1, 1).is_err());
    }

    #[test]
    fn planted_csp_zero_noise_is_cost_zero_and_dense() {
        for template in [
            CspTemplate::Ncp { arity: 2 },
            CspTemplate::Ugp { colors: 3 },
            CspTemplate::Ksat { arity: 2 },
        ] {
            let p = planted_csp(8, template, 1.0, 0.0, 3, None).unwrap();
            assert!(p.planted_cost.is_zero(), "{template:?}");
            assert!(!p.delta.is_zero());
            assert_eq!(
                p.inst.objective(&p.planted).unwrap(),
                ExactCost::zero(),
                "{template:?}"
            );
            let o = oracle::exact_csp(
                &p.inst,
                &vec![None; 8],
                oracle::DEFAULT_CSP_CAP,
            )
            .unwrap();
            assert!(o.cost.is_zero());
        }
    }

    #[test]
    fn ugp_template_tables_are_permutations() {
        let p = planted_csp(7, CspTemplate::Ugp { colors: 3 }, 1.0, 0.3, 11, None).unwrap();
        // every variable sees only fragile (permutation) constraints
        for v in 0..7 {
            assert!(p.inst.count_fragile_constraints(v).unwrap() > 0);
        }
    }

    #[test]
    fn ncp_template_planted_bound() {
        let p = planted_csp(10, CspTemplate::Ncp { arity: 3 }, 0.5, 0.05, 13, None).unwrap();
        let o = oracle::exact_csp(&p.inst, &vec![None; 10], oracle::DEFAULT_CSP_CAP).unwrap();
        assert!(o.cost <= p.planted_cost);
        assert_eq!(p.inst.objective(&p.planted).unwrap(), p.planted_cost);
    }

    #[test]
    fn required_delta_enforced() {
        let err = planted_csp(
            8,
            CspTemplate::Ncp { arity: 2 },
            0.3,
            0.0,
            5,
            Some(ExactCost::integer(1)),
        );
        assert!(err.is_err());
    }

    #[test]
    fn planted_hier_zero_noise_solves_to_zero() {
        let p = planted_hier(8, 2, 2, 0.0, 17).unwrap();
        assert!(p.planted_cost.is_zero());
        assert_eq!(
            tree_cost(&p.problem, &p.trunk, &p.assignment).unwrap(),
            ExactCost::zero()
        );
        let o = oracle::exact_hier(&p.problem, oracle::DEFAULT_HIER_CAP).unwrap();
        assert!(o.cost.is_zero());
    }

    #[test]
    fn hier_noise_mean_matches_expectation() {
        // mean planted cost ~ noise * C(n, 2) / M
        let (n, m, d, noise, runs) = (8usize, 2usize, 2usize, 0.3f64, 400u64);
        let mut total = ExactCost::zero();
        for seed in 0..runs {
            total = total.add(planted_hier(n, m, d, noise, seed).unwrap().planted_cost);
        }
        let mean = total.to_f64() / runs as f64;
        let pairs = binomial(n, 2) as f64;
        let expect = noise * pairs / m as f64;
        let se = (pairs * noise * (1.0 - noise) / runs as f64).sqrt() / m as f64;
        assert!(
            (mean - expect).abs() <= 3.0 * se,
            "mean {mean} vs {expect} +- {}",
            3.0 * se
        );
    }

    #[test]
    fn hier_matrix_always_symmetric_in_range() {
        for seed in 0..10 {
            let p = planted_hier(7, 3, 3, 0.5, seed).unwrap();
            for u in 0..7 {
                for v in 0..7 {
                    let f = p.problem.dissimilarity(u, v);
                    assert_eq!(f, p.problem.dissimilarity(v, u));
                    assert!(f <= 3);
                }
            }
        }
    }
}
