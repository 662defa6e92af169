//! Unique games: MIN-2CSP whose constraints are permutations over a color
//! domain; an edge (u, v, pi) is satisfied iff x_u = pi(x_v). Permutation
//! tables are fragile by construction, which the encoder re-checks.

use crate::cost::ExactCost;
use crate::csp::{CspInstance, Domain};
use crate::encode::TableBuilder;
use crate::error::{Error, Result};
use crate::fragility::LogicalConstraint;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UgpEdge {
    pub u: usize,
    pub v: usize,
    /// satisfied iff x_u = perm[x_v]; must be a bijection on 0..colors
    pub perm: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UgpInstance {
    pub n: usize,
    pub colors: usize,
    pub edges: Vec<UgpEdge>,
}

impl UgpInstance {
    pub fn new(n: usize, colors: usize, edges: Vec<UgpEdge>) -> Result<Self> {
        if colors < 2 {
            return Err(Error::invalid("need at least two colors".to_string()));
        }
        for e in &edges {
            if e.u == e.v || e.u >= n || e.v >= n {
                return Err(Error::invalid(format!(
                    "edge ({}, {}) invalid for n = {n}",
                    e.u, e.v
                )));
            }
            let mut seen = vec![false; colors];
            if e.perm.len() != colors || e.perm.iter().any(|&c| c >= colors || std::mem::replace(&mut seen[c], true)) {
                return Err(Error::invalid(format!(
                    "edge ({}, {}): {:?} is not a permutation of 0..{colors}",
                    e.u, e.v, e.perm
                )));
            }
        }
        Ok(UgpInstance { n, colors, edges })
    }

    /// Text format: header "n colors m", then per edge "u v p0 p1 ... ".
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<usize> = lines
            .next()
            .ok_or_else(|| Error::invalid("empty file".to_string()))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::invalid("bad header".to_string())))
            .collect::<Result<_>>()?;
        let [n, colors, m] = header[..] else {
            return Err(Error::invalid("header must be: n colors m".to_string()));
        };
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let toks: Vec<usize> = lines
                .next()
                .ok_or_else(|| Error::invalid("missing edge line".to_string()))?
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::invalid("bad edge line".to_string())))
                .collect::<Result<_>>()?;
            if toks.len() != 2 + colors {
                return Err(Error::invalid("edge line length mismatch".to_string()));
            }
            edges.push(UgpEdge {
                u: toks[0],
                v: toks[1],
                perm: toks[2..].to_vec(),
            });
        }
        Self::new(n, colors, edges)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.n, self.colors, self.edges.len());
        for e in &self.edges {
            out.push_str(&format!("{} {}", e.u, e.v));
            for p in &e.perm {
                out.push_str(&format!(" {p}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn violated_count(&self, x: &[usize]) -> u64 {
        self.edges
            .iter()
            .filter(|e| x[e.u] != e.perm[x[e.v]])
            .count() as u64
    }

    pub fn direct_cost(&self, x: &[usize]) -> ExactCost {
        ExactCost::new(self.violated_count(x), self.merge_eta())
    }

    /// Largest number of edges merged onto one variable pair.
    fn merge_eta(&self) -> u64 {
        let mut builder = TableBuilder::new(self.colors, 2);
        for e in &self.edges {
            let vars = [e.u.min(e.v), e.u.max(e.v)];
            builder.slot(&vars, 1);
        }
        builder.max_capacity().max(1)
    }

    pub fn to_csp(&self) -> Result<CspInstance> {
        if self.n < 2 {
            return Err(Error::invalid("need at least two variables".to_string()));
        }
        let d = self.colors;
        let eta = self.merge_eta();
        let mut builder = TableBuilder::new(d, 2);
        let mut logical = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let vars = [e.u.min(e.v), e.u.max(e.v)];
            let mut unsat = vec![false; d * d];
            for lo in 0..d {
                for hi in 0..d {
                    // local order follows sorted vars
                    let (xu, xv) = if e.u < e.v { (lo, hi) } else { (hi, lo) };
                    unsat[lo * d + hi] = xu != e.perm[xv];
                }
            }
            let mask = LogicalConstraint::new(vars.to_vec(), unsat.clone());
            if !mask.is_fragile(d) {
                return Err(Error::Internal(
                    "permutation constraint failed its fragility check".to_string(),
                ));
            }
            let table = builder.slot(&vars, 1);
            for (idx, &u) in unsat.iter().enumerate() {
                table[idx] += u as u64;
            }
            logical.push(mask);
        }
        CspInstance::explicit(self.n, 2, Domain::new(d)?, eta, builder.finish())?
            .with_fragility(logical)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::Assignment;
    use rand::seq::SliceRandom;
    use rand::Rng;

    #[test]
    fn identity_edge_satisfied_on_equal_colors() {
        let ugp = UgpInstance::new(
            2,
            3,
            vec![UgpEdge { u: 0, v: 1, perm: vec![0, 1, 2] }],
        )
        .unwrap();
        let inst = ugp.to_csp().unwrap();
        assert_eq!(
            inst.objective(&Assignment::new(vec![0, 0])).unwrap(),
            ExactCost::zero()
        );
        assert_eq!(
            inst.objective(&Assignment::new(vec![0, 1])).unwrap(),
            ExactCost::integer(1)
        );
    }

    #[test]
    fn objective_matches_direct_count_with_merges() {
        let mut rng = crate::rng::derive_rng(12, crate::rng::stream::VERIFIER, 30);
        let (n, d) = (6, 3);
        let mut edges = Vec::new();
        for _ in 0..15 {
            let u = rng.random_range(0..n);
            let mut v = rng.random_range(0..n);
            while v == u {
                v = rng.random_range(0..n);
            }
            let mut perm: Vec<usize> = (0..d).collect();
            perm.shuffle(&mut rng);
            edges.push(UgpEdge { u, v, perm });
        }
        let ugp = UgpInstance::new(n, d, edges).unwrap();
        let inst = ugp.to_csp().unwrap();
        for _ in 0..100 {
            let x: Vec<usize> = (0..n).map(|_| rng.random_range(0..d)).collect();
            assert_eq!(
                inst.objective(&Assignment::new(x.clone())).unwrap(),
                ugp.direct_cost(&x)
            );
        }
    }

    #[test]
    fn malformed_permutation_rejected() {
        assert!(UgpInstance::new(
            3,
            3,
            vec![UgpEdge { u: 0, v: 1, perm: vec![0, 0, 2] }]
        )
        .is_err());
        assert!(UgpInstance::new(
            3,
            3,
            vec![UgpEdge { u: 1, v: 1, perm: vec![0, 1, 2] }]
        )
        .is_err());
    }
}
