//! Multiway cut: color a graph with d colors, terminal t_i forced to color
//! i, minimizing bichromatic edges. The terminal requirement is folded into
//! the edge constraints: an edge is satisfied only if it is monochromatic
//! AND its terminal endpoints (if any) carry their required colors.

use crate::cost::ExactCost;
use crate::csp::{CspInstance, Domain};
use crate::encode::TableBuilder;
use crate::error::{Error, Result};
use crate::fragility::LogicalConstraint;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MwcInstance {
    pub n: usize,
    pub colors: usize,
    pub edges: Vec<(usize, usize)>,
    /// (vertex, required color); at most one entry per vertex
    pub terminals: Vec<(usize, usize)>,
}

impl MwcInstance {
    pub fn new(
        n: usize,
        colors: usize,
        edges: Vec<(usize, usize)>,
        terminals: Vec<(usize, usize)>,
    ) -> Result<Self> {
        if colors < 2 {
            return Err(Error::invalid("need at least two colors".to_string()));
        }
        for &(u, v) in &edges {
            if u == v || u >= n || v >= n {
                return Err(Error::invalid(format!("edge ({u}, {v}) invalid for n = {n}")));
            }
        }
        let mut seen = vec![false; n];
        for &(t, c) in &terminals {
            if t >= n || c >= colors {
                return Err(Error::invalid(format!("terminal ({t}, {c}) out of range")));
            }
            if std::mem::replace(&mut seen[t], true) {
                return Err(Error::invalid(format!("vertex {t} is a terminal twice")));
            }
        }
        Ok(MwcInstance { n, colors, edges, terminals })
    }

    /// Text format: header "n colors m t", then m edge lines "u v", then
    /// t terminal lines "vertex color".
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<usize> = lines
            .next()
            .ok_or_else(|| Error::invalid("empty file".to_string()))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::invalid("bad header".to_string())))
            .collect::<Result<_>>()?;
        let [n, colors, m, t] = header[..] else {
            return Err(Error::invalid("header must be: n colors m t".to_string()));
        };
        let mut pairs = Vec::with_capacity(m + t);
        for _ in 0..m + t {
            let toks: Vec<usize> = lines
                .next()
                .ok_or_else(|| Error::invalid("missing line".to_string()))?
                .split_whitespace()
                .map(|x| x.parse().map_err(|_| Error::invalid("bad line".to_string())))
                .collect::<Result<_>>()?;
            let [a, b] = toks[..] else {
                return Err(Error::invalid("expected two integers per line".to_string()));
            };
            pairs.push((a, b));
        }
        let terminals = pairs.split_off(m);
        Self::new(n, colors, pairs, terminals)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} {} {} {}\n",
            self.n,
            self.colors,
            self.edges.len(),
            self.terminals.len()
        );
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        for &(t, c) in &self.terminals {
            out.push_str(&format!("{t} {c}\n"));
        }
        out
    }

    fn required(&self, v: usize) -> Option<usize> {
        self.terminals.iter().find(|&&(t, _)| t == v).map(|&(_, c)| c)
    }

    pub fn violated_count(&self, x: &[usize]) -> u64 {
        self.edges
            .iter()
            .filter(|&&(u, v)| {
                let mono = x[u] == x[v];
                let term_ok = self.required(u).is_none_or(|c| x[u] == c)
                    && self.required(v).is_none_or(|c| x[v] == c);
                !(mono && term_ok)
            })
            .count() as u64
    }

    pub fn direct_cost(&self, x: &[usize]) -> ExactCost {
        ExactCost::new(self.violated_count(x), self.merge_eta())
    }

    fn merge_eta(&self) -> u64 {
        let mut builder = TableBuilder::new(self.colors, 2);
        for &(u, v) in &self.edges {
            builder.slot(&[u.min(v), u.max(v)], 1);
        }
        builder.max_capacity().max(1)
    }

    pub fn to_csp(&self) -> Result<CspInstance> {
        if self.n < 2 {
            return Err(Error::invalid("need at least two vertices".to_string()));
        }
        let d = self.colors;
        let eta = self.merge_eta();
        let mut builder = TableBuilder::new(d, 2);
        let mut logical = Vec::with_capacity(self.edges.len());
        for &(u, v) in &self.edges {
            let (lo, hi) = (u.min(v), u.max(v));
            let (req_lo, req_hi) = (self.required(lo), self.required(hi));
            let mut unsat = vec![false; d * d];
            for a in 0..d {
                for b in 0..d {
                    let ok = a == b
                        && req_lo.is_none_or(|c| a == c)
                        && req_hi.is_none_or(|c| b == c);
                    unsat[a * d + b] = !ok;
                }
            }
            let mask = LogicalConstraint::new(vec![lo, hi], unsat.clone());
            let table = builder.slot(&[lo, hi], 1);
            for (idx, &un) in unsat.iter().enumerate() {
                table[idx] += un as u64;
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
    use rand::Rng;

    #[test]
    fn monochromatic_but_miscolored_terminal_is_violated() {
        // edge (t1, u), terminal t1 requires color 1; coloring both 0 fails
        let mwc = MwcInstance::new(2, 2, vec![(0, 1)], vec![(0, 1)]).unwrap();
        let inst = mwc.to_csp().unwrap();
        assert_eq!(
            inst.objective(&Assignment::new(vec![0, 0])).unwrap(),
            ExactCost::integer(1)
        );
        assert_eq!(
            inst.objective(&Assignment::new(vec![1, 1])).unwrap(),
            ExactCost::zero()
        );
    }

    #[test]
    fn edge_constraints_are_fragile() {
        let mwc = MwcInstance::new(4, 3, vec![(0, 1), (1, 2), (2, 3)], vec![(0, 2)]).unwrap();
        let inst = mwc.to_csp().unwrap();
        for v in 0..4 {
            // each vertex sees exactly its incident edges as fragile constraints
            let deg = mwc.edges.iter().filter(|&&(a, b)| a == v || b == v).count() as u64;
            assert_eq!(inst.count_fragile_constraints(v).unwrap(), deg);
        }
    }

    #[test]
    fn objective_matches_direct_count() {
        let mut rng = crate::rng::derive_rng(15, crate::rng::stream::VERIFIER, 50);
        let (n, d) = (6, 3);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < 0.7 {
                    edges.push((u, v));
                }
            }
        }
        let mwc = MwcInstance::new(n, d, edges, vec![(0, 0), (1, 1), (2, 2)]).unwrap();
        let inst = mwc.to_csp().unwrap();
        for _ in 0..100 {
            let x: Vec<usize> = (0..n).map(|_| rng.random_range(0..d)).collect();
            assert_eq!(
                inst.objective(&Assignment::new(x.clone())).unwrap(),
                mwc.direct_cost(&x)
            );
        }
    }

    #[test]
    fn duplicate_terminal_rejected() {
        assert!(MwcInstance::new(3, 2, vec![], vec![(0, 0), (0, 1)]).is_err());
    }
}
