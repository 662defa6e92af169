//! MIN-kSAT in its disjunctive-normal-form reading: minimize the number of
//! unsatisfied conjunctions, each over k distinct literals. A conjunction
//! has exactly one satisfying local assignment, so its table is fragile.

use crate::cost::ExactCost;
use crate::csp::{CspInstance, Domain};
use crate::encode::TableBuilder;
use crate::error::{Error, Result};
use crate::fragility::LogicalConstraint;

/// A conjunction of literals over distinct variables; `(v, true)` requires
/// x_v = 1 and `(v, false)` requires x_v = 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conjunction {
    pub literals: Vec<(usize, bool)>,
}

impl Conjunction {
    pub fn new(mut literals: Vec<(usize, bool)>) -> Result<Self> {
        literals.sort_unstable();
        if literals.is_empty() || literals.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::invalid(format!(
                "conjunction {literals:?} empty or with repeated variables"
            )));
        }
        Ok(Conjunction { literals })
    }

    fn satisfied(&self, x: &[usize]) -> bool {
        self.literals.iter().all(|&(v, want)| (x[v] == 1) == want)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DnfInstance {
    pub n: usize,
    pub k: usize,
    pub conjunctions: Vec<Conjunction>,
}

impl DnfInstance {
    pub fn new(n: usize, k: usize, conjunctions: Vec<Conjunction>) -> Result<Self> {
        for c in &conjunctions {
            if c.literals.len() != k {
                return Err(Error::invalid(format!(
                    "conjunction has {} literals, expected {k}",
                    c.literals.len()
                )));
            }
            if c.literals.last().unwrap().0 >= n {
                return Err(Error::invalid("literal variable out of range".to_string()));
            }
        }
        Ok(DnfInstance { n, k, conjunctions })
    }

    /// Text format: header "n k m", then per conjunction a line of signed
    /// 1-based literals (negative = negated, i.e. requires x_v = 0).
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<usize> = lines
            .next()
            .ok_or_else(|| Error::invalid("empty file".to_string()))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::invalid("bad header".to_string())))
            .collect::<Result<_>>()?;
        let [n, k, m] = header[..] else {
            return Err(Error::invalid("header must be: n k m".to_string()));
        };
        let mut conjunctions = Vec::with_capacity(m);
        for _ in 0..m {
            let lits: Vec<i64> = lines
                .next()
                .ok_or_else(|| Error::invalid("missing conjunction line".to_string()))?
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::invalid("bad literal".to_string())))
                .collect::<Result<_>>()?;
            let literals = lits
                .into_iter()
                .map(|l| {
                    if l == 0 {
                        Err(Error::invalid("literal 0 is not allowed".to_string()))
                    } else {
                        Ok(((l.unsigned_abs() as usize) - 1, l > 0))
                    }
                })
                .collect::<Result<_>>()?;
            conjunctions.push(Conjunction::new(literals)?);
        }
        Self::new(n, k, conjunctions)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.n, self.k, self.conjunctions.len());
        for c in &self.conjunctions {
            let lits: Vec<String> = c
                .literals
                .iter()
                .map(|&(v, want)| {
                    if want {
                        format!("{}", v + 1)
                    } else {
                        format!("-{}", v as i64 + 1)
                    }
                })
                .collect();
            out.push_str(&lits.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn unsatisfied_count(&self, x: &[usize]) -> u64 {
        self.conjunctions
            .iter()
            .filter(|c| !c.satisfied(x))
            .count() as u64
    }

    pub fn direct_cost(&self, x: &[usize]) -> ExactCost {
        ExactCost::new(self.unsatisfied_count(x), self.merge_eta())
    }

    fn merge_eta(&self) -> u64 {
        let mut builder = TableBuilder::new(2, self.k);
        for c in &self.conjunctions {
            let vars: Vec<usize> = c.literals.iter().map(|&(v, _)| v).collect();
            builder.slot(&vars, 1);
        }
        builder.max_capacity().max(1)
    }

    pub fn to_csp(&self) -> Result<CspInstance> {
        if self.n < self.k {
            return Err(Error::invalid(format!(
                "n = {} smaller than arity {}",
                self.n, self.k
            )));
        }
        let k = self.k;
        let eta = self.merge_eta();
        let mut builder = TableBuilder::new(2, k);
        let mut logical = Vec::with_capacity(self.conjunctions.len());
        for c in &self.conjunctions {
            let vars: Vec<usize> = c.literals.iter().map(|&(v, _)| v).collect();
            // the single satisfying cell, in canonical local order
            let sat_idx = c
                .literals
                .iter()
                .fold(0usize, |idx, &(_, want)| idx * 2 + want as usize);
            let unsat: Vec<bool> = (0..1usize << k).map(|idx| idx != sat_idx).collect();
            let mask = LogicalConstraint::new(vars.clone(), unsat.clone());
            if !mask.is_fragile(2) {
                return Err(Error::Internal(
                    "conjunction failed its fragility check".to_string(),
                ));
            }
            let table = builder.slot(&vars, 1);
            for (idx, &u) in unsat.iter().enumerate() {
                table[idx] += u as u64;
            }
            logical.push(mask);
        }
        CspInstance::explicit(self.n, k, Domain::new(2)?, eta, builder.finish())?
            .with_fragility(logical)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::Assignment;
    use rand::Rng;

    #[test]
    fn violated_literal_unsatisfies_conjunction() {
        // (v0 and not v1) at v0 = v1 = true: one unsatisfied conjunction
        let dnf = DnfInstance::new(
            2,
            2,
            vec![Conjunction::new(vec![(0, true), (1, false)]).unwrap()],
        )
        .unwrap();
        let inst = dnf.to_csp().unwrap();
        assert_eq!(
            inst.objective(&Assignment::new(vec![1, 1])).unwrap(),
            ExactCost::integer(1)
        );
        assert_eq!(
            inst.objective(&Assignment::new(vec![1, 0])).unwrap(),
            ExactCost::zero()
        );
    }

    #[test]
    fn objective_matches_direct_count() {
        let mut rng = crate::rng::derive_rng(14, crate::rng::stream::VERIFIER, 40);
        let (n, k) = (7, 3);
        let conjunctions: Vec<Conjunction> = (0..25)
            .map(|_| {
                let vars = crate::rng::sample_distinct_sorted(&mut rng, k, n);
                Conjunction::new(vars.into_iter().map(|v| (v, rng.random())).collect()).unwrap()
            })
            .collect();
        let dnf = DnfInstance::new(n, k, conjunctions).unwrap();
        let inst = dnf.to_csp().unwrap();
        for _ in 0..100 {
            let x: Vec<usize> = (0..n).map(|_| rng.random_range(0..2)).collect();
            assert_eq!(
                inst.objective(&Assignment::new(x.clone())).unwrap(),
                dnf.direct_cost(&x)
            );
        }
    }

    #[test]
    fn repeated_variable_rejected() {
        assert!(Conjunction::new(vec![(0, true), (0, false)]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let dnf = DnfInstance::new(
            4,
            2,
            vec![
                Conjunction::new(vec![(0, true), (3, false)]).unwrap(),
                Conjunction::new(vec![(1, false), (2, true)]).unwrap(),
            ],
        )
        .unwrap();
        let back = DnfInstance::parse(&dnf.to_text()).unwrap();
        assert_eq!(dnf, back);
    }
}
