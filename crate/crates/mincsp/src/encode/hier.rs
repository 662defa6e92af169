//! Hierarchical clustering with a fixed number of clusters, and its M = 1
//! special case, correlation clustering.
//!
//! An M-level clustering is a rooted tree with all objects at depth M + 1.
//! The trunk is the subtree of internal nodes; its leaves (depth M) are the
//! clusters. For clusters i, j let f(i, j) be the depth of their lowest
//! common ancestor, so f(i, i) = M and, at M = 1, f(i, j) = [i = j]. Fitting
//! a dissimilarity matrix F means minimizing sum over pairs of
//! |F(u, v) - f(cluster(u), cluster(v))| / M. With the trunk fixed this is a
//! MIN-2CSP over the cluster domain, rigid with delta = 1/M.

use crate::cost::ExactCost;
use crate::csp::{Assignment, CspInstance, Domain, PenaltyTable};
use crate::error::{Error, Result};
use crate::fragility::LogicalConstraint;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HierProblem {
    pub n: usize,
    /// number of levels M
    pub levels: usize,
    /// cluster budget d
    pub clusters: usize,
    /// symmetric n x n matrix with entries in 0..=M; diagonal ignored
    matrix: Vec<u32>,
}

impl HierProblem {
    pub fn new(n: usize, levels: usize, clusters: usize, matrix: Vec<u32>) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("need at least two objects".to_string()));
        }
        if levels < 1 || clusters < 1 {
            return Err(Error::invalid("levels and clusters must be >= 1".to_string()));
        }
        if matrix.len() != n * n {
            return Err(Error::invalid(format!(
                "dissimilarity matrix has {} entries, expected {}",
                matrix.len(),
                n * n
            )));
        }
        for u in 0..n {
            for v in 0..n {
                if matrix[u * n + v] > levels as u32 {
                    return Err(Error::invalid(format!(
                        "F({u}, {v}) = {} exceeds M = {levels}",
                        matrix[u * n + v]
                    )));
                }
                if matrix[u * n + v] != matrix[v * n + u] {
                    return Err(Error::invalid("dissimilarity matrix not symmetric".to_string()));
                }
            }
        }
        Ok(HierProblem { n, levels, clusters, matrix })
    }

    pub fn dissimilarity(&self, u: usize, v: usize) -> u32 {
        self.matrix[u * self.n + v]
    }

    /// Text format: header "n M d", then n rows of n integers.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<usize> = lines
            .next()
            .ok_or_else(|| Error::invalid("empty file".to_string()))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::invalid("bad header".to_string())))
            .collect::<Result<_>>()?;
        let [n, levels, clusters] = header[..] else {
            return Err(Error::invalid("header must be: n M d".to_string()));
        };
        let mut matrix = Vec::with_capacity(n * n);
        for _ in 0..n {
            let row: Vec<u32> = lines
                .next()
                .ok_or_else(|| Error::invalid("missing matrix row".to_string()))?
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::invalid("bad matrix entry".to_string())))
                .collect::<Result<_>>()?;
            if row.len() != n {
                return Err(Error::invalid("matrix row length mismatch".to_string()));
            }
            matrix.extend(row);
        }
        Self::new(n, levels, clusters, matrix)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.n, self.levels, self.clusters);
        for u in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|v| self.matrix[u * self.n + v].to_string())
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

/// The internal-node tree of an M-level clustering with d labeled cluster
/// slots per level. `parents[l - 2][node]` is the parent of `node` at level
/// `l` (levels 2..=M); level-1 nodes hang off the root. Empty clusters are
/// permitted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trunk {
    levels: usize,
    slots: usize,
    parents: Vec<Vec<usize>>,
}

impl Trunk {
    pub fn new(levels: usize, slots: usize, parents: Vec<Vec<usize>>) -> Result<Self> {
        if levels < 1 || slots < 1 {
            return Err(Error::invalid("levels and slots must be >= 1".to_string()));
        }
        if parents.len() != levels.saturating_sub(1) {
            return Err(Error::invalid(format!(
                "expected {} parent maps, got {}",
                levels - 1,
                parents.len()
            )));
        }
        for level in &parents {
            if level.len() != slots || level.iter().any(|&p| p >= slots) {
                return Err(Error::invalid("parent map out of range".to_string()));
            }
        }
        Ok(Trunk { levels, slots, parents })
    }

    /// The unique single-level trunk: clusters directly under the root.
    pub fn flat(slots: usize) -> Self {
        Trunk { levels: 1, slots, parents: Vec::new() }
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    /// All labeled trunks with `clusters` slots per level: parent choices
    /// for levels 2..=M give exactly d^((M-1)d) of them.
    pub fn enumerate(clusters: usize, levels: usize) -> Vec<Trunk> {
        let choice_nodes = (levels - 1) * clusters;
        let total = (clusters as u64).pow(choice_nodes as u32);
        let mut out = Vec::with_capacity(total as usize);
        for code in 0..total {
            let mut c = code;
            let mut parents = Vec::with_capacity(levels - 1);
            for _ in 0..levels - 1 {
                let mut level = Vec::with_capacity(clusters);
                for _ in 0..clusters {
                    level.push((c % clusters as u64) as usize);
                    c /= clusters as u64;
                }
                parents.push(level);
            }
            out.push(Trunk { levels, slots: clusters, parents });
        }
        out
    }

    /// f(i, j): depth of the lowest common ancestor of clusters i and j
    /// (root at depth 0, clusters at depth M). f(i, i) = M.
    pub fn lca_depth(&self, i: usize, j: usize) -> Result<usize> {
        if i >= self.slots || j >= self.slots {
            return Err(Error::invalid(format!("cluster label out of range: {i}, {j}")));
        }
        let (mut a, mut b) = (i, j);
        let mut depth = self.levels;
        while depth > 0 {
            if a == b {
                return Ok(depth);
            }
            if depth >= 2 {
                a = self.parents[depth - 2][a];
                b = self.parents[depth - 2][b];
            }
            depth -= 1;
        }
        Ok(0)
    }

    /// Levels 2..=M concatenated; the serialized form used in reports.
    pub fn flat_parents(&self) -> Vec<usize> {
        self.parents.iter().flatten().copied().collect()
    }

    /// Shape canonicalization of the subtrunk induced by the occupied
    /// clusters, for recovered-vs-planted comparisons up to relabeling.
    pub fn canonical_shape(&self, occupied: &[bool]) -> String {
        fn canon(children: &mut Vec<String>) -> String {
            children.sort();
            format!("({})", children.join(""))
        }
        // current[i] = canonical string of the subtree rooted at node i of
        // the level being processed, for nodes with occupied descendants
        let mut current: Vec<Option<String>> = occupied
            .iter()
            .map(|&o| if o { Some("()".to_string()) } else { None })
            .collect();
        for level in (2..=self.levels).rev() {
            let mut next: Vec<Vec<String>> = vec![Vec::new(); self.slots];
            for (node, label) in current.into_iter().enumerate() {
                if let Some(s) = label {
                    next[self.parents[level - 2][node]].push(s);
                }
            }
            current = next
                .into_iter()
                .map(|mut ch| if ch.is_empty() { None } else { Some(canon(&mut ch)) })
                .collect();
        }
        let mut top: Vec<String> = current.into_iter().flatten().collect();
        canon(&mut top)
    }
}

/// Encode the fixed-trunk fitting problem as a MIN-2CSP over the cluster
/// domain: p_{u,v}(i, j) = |f(i, j) - F(u, v)| / M, a (1/M)-rigid instance.
/// Fragility masks attach only at M = 1 where tables are 0/1.
pub fn hier_to_rigid_csp(hp: &HierProblem, trunk: &Trunk) -> Result<CspInstance> {
    if trunk.levels() != hp.levels || trunk.slots() != hp.clusters {
        return Err(Error::invalid(format!(
            "trunk shape ({}, {}) does not match problem ({}, {})",
            trunk.levels(),
            trunk.slots(),
            hp.levels,
            hp.clusters
        )));
    }
    if hp.clusters < 2 {
        return Err(Error::invalid(
            "CSP encoding needs at least two clusters; d = 1 has a single clustering".to_string(),
        ));
    }
    let d = hp.clusters;
    let m_levels = hp.levels as u64;
    // f is a property of the trunk alone; precompute it
    let mut f = vec![0u64; d * d];
    for i in 0..d {
        for j in 0..d {
            f[i * d + j] = trunk.lca_depth(i, j)? as u64;
        }
    }
    let mut tables = Vec::with_capacity(hp.n * (hp.n - 1) / 2);
    let mut logical = Vec::new();
    for u in 0..hp.n {
        for v in u + 1..hp.n {
            let fv = hp.dissimilarity(u, v) as u64;
            let numerators: Vec<u64> = (0..d * d).map(|idx| f[idx].abs_diff(fv)).collect();
            if m_levels == 1 {
                logical.push(LogicalConstraint::new(
                    vec![u, v],
                    numerators.iter().map(|&x| x == 1).collect(),
                ));
            }
            tables.push(PenaltyTable::new(vec![u, v], numerators));
        }
    }
    let inst = CspInstance::explicit(hp.n, 2, Domain::new(d)?, m_levels, tables)?;
    if m_levels == 1 {
        inst.with_fragility(logical)
    } else {
        Ok(inst)
    }
}

/// Direct tree-cost evaluator: sum over pairs of |F - f| over M.
pub fn tree_cost(hp: &HierProblem, trunk: &Trunk, x: &Assignment) -> Result<ExactCost> {
    if x.len() != hp.n {
        return Err(Error::invalid("assignment length mismatch".to_string()));
    }
    let mut total = 0u64;
    for u in 0..hp.n {
        for v in u + 1..hp.n {
            let f = trunk.lca_depth(x.get(u), x.get(v))? as u64;
            total += f.abs_diff(hp.dissimilarity(u, v) as u64);
        }
    }
    Ok(ExactCost::new(total, hp.levels as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn single_level_trunk_is_unique() {
        let trunks = Trunk::enumerate(2, 1);
        assert_eq!(trunks.len(), 1);
        let t = &trunks[0];
        assert_eq!(t.lca_depth(0, 0).unwrap(), 1);
        assert_eq!(t.lca_depth(0, 1).unwrap(), 0);
    }

    #[test]
    fn two_level_trunk_counts_match_bound() {
        // d = 2, M = 2: at most 2^2 labeled trunks
        assert_eq!(Trunk::enumerate(2, 2).len(), 4);
        assert_eq!(Trunk::enumerate(3, 2).len(), 27);
        assert_eq!(Trunk::enumerate(3, 3).len(), 729);
        for (d, m) in [(2usize, 2usize), (3, 2), (2, 3), (3, 3)] {
            let bound = (d as u64).pow(((m - 1) * d) as u32);
            assert!(Trunk::enumerate(d, m).len() as u64 <= bound);
        }
    }

    #[test]
    fn enumeration_matches_independent_recursive_count() {
        // independent count: parent choices per non-root non-level-1 node
        fn count(d: usize, m: usize) -> u64 {
            if m == 1 {
                return 1;
            }
            (d as u64).pow(((m - 1) * d) as u32)
        }
        for (d, m) in [(2usize, 1usize), (2, 2), (3, 2), (2, 3)] {
            assert_eq!(Trunk::enumerate(d, m).len() as u64, count(d, m));
        }
    }

    #[test]
    fn lca_depth_cases_at_two_levels() {
        // clusters 0, 1 share middle parent 0; cluster 2 hangs off parent 1
        let t = Trunk::new(2, 3, vec![vec![0, 0, 1]]).unwrap();
        assert_eq!(t.lca_depth(0, 0).unwrap(), 2);
        assert_eq!(t.lca_depth(0, 1).unwrap(), 1);
        assert_eq!(t.lca_depth(0, 2).unwrap(), 0);
        assert!(t.lca_depth(0, 3).is_err());
    }

    #[test]
    fn lca_depth_symmetric_and_self_maximal() {
        let mut rng = crate::rng::derive_rng(16, crate::rng::stream::VERIFIER, 60);
        for _ in 0..20 {
            let (d, m) = (3, 3);
            let parents: Vec<Vec<usize>> = (0..m - 1)
                .map(|_| (0..d).map(|_| rng.random_range(0..d)).collect())
                .collect();
            let t = Trunk::new(m, d, parents).unwrap();
            for i in 0..d {
                assert_eq!(t.lca_depth(i, i).unwrap(), m);
                for j in 0..d {
                    assert_eq!(t.lca_depth(i, j).unwrap(), t.lca_depth(j, i).unwrap());
                    assert!(t.lca_depth(i, j).unwrap() <= m);
                }
            }
        }
    }

    #[test]
    fn correlation_clustering_penalties() {
        // M = 1: edge (F = 1) costs 0 within a cluster, 1 across;
        // non-edge (F = 0) costs 1 within a cluster (uncut non-edge)
        let hp = HierProblem::new(2, 1, 2, vec![0, 1, 1, 0]).unwrap();
        let trunk = Trunk::flat(2);
        let inst = hier_to_rigid_csp(&hp, &trunk).unwrap();
        let same = Assignment::new(vec![0, 0]);
        let diff = Assignment::new(vec![0, 1]);
        assert_eq!(inst.objective(&same).unwrap(), ExactCost::zero());
        assert_eq!(inst.objective(&diff).unwrap(), ExactCost::integer(1));

        let non_edge = HierProblem::new(2, 1, 2, vec![0, 0, 0, 0]).unwrap();
        let inst = hier_to_rigid_csp(&non_edge, &trunk).unwrap();
        assert_eq!(inst.objective(&same).unwrap(), ExactCost::integer(1));
        assert_eq!(inst.objective(&diff).unwrap(), ExactCost::zero());
    }

    #[test]
    fn csp_objective_equals_tree_cost() {
        let mut rng = crate::rng::derive_rng(17, crate::rng::stream::VERIFIER, 61);
        let (n, m, d) = (6, 2, 3);
        let mut matrix = vec![0u32; n * n];
        for u in 0..n {
            for v in u + 1..n {
                let f = rng.random_range(0..=m as u32);
                matrix[u * n + v] = f;
                matrix[v * n + u] = f;
            }
        }
        let hp = HierProblem::new(n, m, d, matrix).unwrap();
        for trunk in Trunk::enumerate(d, m).into_iter().take(9) {
            let inst = hier_to_rigid_csp(&hp, &trunk).unwrap();
            for _ in 0..100 {
                let x = Assignment::new((0..n).map(|_| rng.random_range(0..d)).collect());
                assert_eq!(inst.objective(&x).unwrap(), tree_cost(&hp, &trunk, &x).unwrap());
            }
        }
    }

    #[test]
    fn canonical_shape_identifies_isomorphic_trunks() {
        // both clusters under middle node 0 vs both under middle node 1
        let a = Trunk::new(2, 2, vec![vec![0, 0]]).unwrap();
        let b = Trunk::new(2, 2, vec![vec![1, 1]]).unwrap();
        let split = Trunk::new(2, 2, vec![vec![0, 1]]).unwrap();
        let occ = vec![true, true];
        assert_eq!(a.canonical_shape(&occ), b.canonical_shape(&occ));
        assert_ne!(a.canonical_shape(&occ), split.canonical_shape(&occ));
    }

    #[test]
    fn text_round_trip() {
        let hp = HierProblem::new(3, 2, 2, vec![0, 1, 2, 1, 0, 1, 2, 1, 0]).unwrap();
        let back = HierProblem::parse(&hp.to_text()).unwrap();
        assert_eq!(hp, back);
        // asymmetric matrix rejected
        assert!(HierProblem::new(2, 1, 2, vec![0, 1, 0, 0]).is_err());
    }
}
