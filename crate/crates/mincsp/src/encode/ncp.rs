//! Nearest codeword: XOR equations over F2, i.e. maximum-likelihood decoding
//! of a linear code. Equations of arity below k are lifted to arity k by a
//! uniform mixture over padding variables, so the encoded instance keeps a
//! uniform arity without changing the objective.

use crate::cost::{binomial, lcm, ExactCost};
use crate::csp::{CspInstance, Domain};
use crate::encode::TableBuilder;
use crate::enumerate::for_each_combination;
use crate::error::{Error, Result};
use crate::fragility::LogicalConstraint;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XorEquation {
    /// sorted distinct variable indices, 1 <= len <= k
    pub vars: Vec<usize>,
    pub rhs: bool,
}

impl XorEquation {
    pub fn new(mut vars: Vec<usize>, rhs: bool) -> Result<Self> {
        vars.sort_unstable();
        if vars.is_empty() || vars.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!(
                "equation variables {vars:?} empty or repeated"
            )));
        }
        Ok(XorEquation { vars, rhs })
    }

    fn violated(&self, x: &[usize]) -> bool {
        let parity = self.vars.iter().fold(0usize, |p, &v| p ^ (x[v] & 1));
        (parity == 1) != self.rhs
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NcpInstance {
    pub n: usize,
    pub equations: Vec<XorEquation>,
}

impl NcpInstance {
    pub fn new(n: usize, equations: Vec<XorEquation>) -> Result<Self> {
        for eq in &equations {
            if *eq.vars.last().unwrap() >= n {
                return Err(Error::invalid(format!(
                    "equation over {:?} out of range for n = {n}",
                    eq.vars
                )));
            }
        }
        Ok(NcpInstance { n, equations })
    }

    /// Text format: header "n m", then one equation per line: "rhs i1 i2 ..".
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::invalid("empty equation file".to_string()))?;
        let mut parts = header.split_whitespace();
        let n: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::invalid("bad header".to_string()))?;
        let m: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::invalid("bad header".to_string()))?;
        let mut equations = Vec::with_capacity(m);
        for _ in 0..m {
            let line = lines
                .next()
                .ok_or_else(|| Error::invalid("missing equation line".to_string()))?;
            let mut toks = line.split_whitespace();
            let rhs: u8 = toks
                .next()
                .and_then(|t| t.parse().ok())
                .filter(|&b| b <= 1)
                .ok_or_else(|| Error::invalid(format!("bad rhs in {line:?}")))?;
            let vars: Vec<usize> = toks
                .map(|t| t.parse().map_err(|_| Error::invalid(format!("bad index in {line:?}"))))
                .collect::<Result<_>>()?;
            equations.push(XorEquation::new(vars, rhs == 1)?);
        }
        Self::new(n, equations)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.equations.len());
        for eq in &self.equations {
            out.push_str(&(eq.rhs as u8).to_string());
            for v in &eq.vars {
                out.push_str(&format!(" {v}"));
            }
            out.push('\n');
        }
        out
    }

    /// Number of violated equations under `x` (values taken mod 2).
    pub fn violated_count(&self, x: &[usize]) -> u64 {
        self.equations.iter().filter(|eq| eq.violated(x)).count() as u64
    }

    /// The encoded instance's exact cost for a given violation count:
    /// each equation carries total weight L over scale eta.
    pub fn direct_cost(&self, x: &[usize], k: usize) -> Result<ExactCost> {
        let (unit, eta) = self.scales(k)?;
        Ok(ExactCost::new(self.violated_count(x) * unit, eta))
    }

    /// (per-equation weight L, scale eta) used by `to_csp`.
    fn scales(&self, k: usize) -> Result<(u64, u64)> {
        let mut unit = 1u64;
        for eq in &self.equations {
            let j = eq.vars.len();
            if j > k {
                return Err(Error::invalid(format!(
                    "equation arity {j} exceeds target arity {k}"
                )));
            }
            if j < k {
                let combos = binomial(self.n - j, k - j);
                if combos > 1 << 22 {
                    return Err(Error::CapExceeded(
                        "arity padding would materialize too many tables".to_string(),
                    ));
                }
                unit = lcm(unit, combos);
            }
        }
        // eta = max total weight landing on one subset
        let mut builder = TableBuilder::new(2, k);
        for eq in &self.equations {
            let j = eq.vars.len();
            if j == k {
                builder.slot(&eq.vars, unit);
            } else {
                let w = unit / binomial(self.n - j, k - j);
                let pool: Vec<usize> = (0..self.n).filter(|v| !eq.vars.contains(v)).collect();
                for_each_combination(&pool, k - j, &mut |extra| {
                    let mut vars = eq.vars.clone();
                    vars.extend_from_slice(extra);
                    vars.sort_unstable();
                    builder.slot(&vars, w);
                });
            }
        }
        Ok((unit, builder.max_capacity().max(1)))
    }

    /// Encode as an arity-k fragile CSP over {0, 1}.
    pub fn to_csp(&self, k: usize) -> Result<CspInstance> {
        if self.n < k {
            return Err(Error::invalid(format!(
                "n = {} smaller than arity {k}",
                self.n
            )));
        }
        let (unit, eta) = self.scales(k)?;
        let mut builder = TableBuilder::new(2, k);
        let mut logical = Vec::with_capacity(self.equations.len());
        for eq in &self.equations {
            let j = eq.vars.len();
            // fragility mask over the equation's own support
            let unsat: Vec<bool> = (0..1usize << j)
                .map(|code| {
                    let parity = (0..j).fold(0usize, |p, s| p ^ ((code >> (j - 1 - s)) & 1));
                    (parity == 1) != eq.rhs
                })
                .collect();
            let mask = LogicalConstraint::new(eq.vars.clone(), unsat.clone());
            if !mask.is_fragile(2) {
                return Err(Error::Internal(
                    "XOR constraint failed its fragility check".to_string(),
                ));
            }
            logical.push(mask);

            if j == k {
                let table = builder.slot(&eq.vars, unit);
                for (code, &u) in unsat.iter().enumerate() {
                    if u {
                        table[code] += unit;
                    }
                }
            } else {
                let w = unit / binomial(self.n - j, k - j);
                let pool: Vec<usize> = (0..self.n).filter(|v| !eq.vars.contains(v)).collect();
                for_each_combination(&pool, k - j, &mut |extra| {
                    let mut vars = eq.vars.clone();
                    vars.extend_from_slice(extra);
                    vars.sort_unstable();
                    // positions of the equation's variables inside the padded subset
                    let pos: Vec<usize> = eq
                        .vars
                        .iter()
                        .map(|v| vars.binary_search(v).unwrap())
                        .collect();
                    let table = builder.slot(&vars, w);
                    for code in 0..1usize << k {
                        let parity = pos
                            .iter()
                            .fold(0usize, |p, &s| p ^ ((code >> (k - 1 - s)) & 1));
                        if (parity == 1) != eq.rhs {
                            table[code] += w;
                        }
                    }
                });
            }
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
    fn single_equation_objective() {
        let ncp =
            NcpInstance::new(2, vec![XorEquation::new(vec![0, 1], false).unwrap()]).unwrap();
        let inst = ncp.to_csp(2).unwrap();
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
    fn csp_objective_equals_direct_xor_count() {
        let mut rng = crate::rng::derive_rng(8, crate::rng::stream::VERIFIER, 20);
        let n = 6;
        let equations: Vec<XorEquation> = (0..20)
            .map(|_| {
                let a = rng.random_range(0..n);
                let mut b = rng.random_range(0..n);
                while b == a {
                    b = rng.random_range(0..n);
                }
                XorEquation::new(vec![a, b], rng.random()).unwrap()
            })
            .collect();
        let ncp = NcpInstance::new(n, equations).unwrap();
        let inst = ncp.to_csp(2).unwrap();
        for _ in 0..100 {
            let x: Vec<usize> = (0..n).map(|_| rng.random_range(0..2)).collect();
            assert_eq!(
                inst.objective(&Assignment::new(x.clone())).unwrap(),
                ncp.direct_cost(&x, 2).unwrap()
            );
        }
    }

    #[test]
    fn padding_preserves_objective_and_fragility_metadata() {
        // mixed arity: unary, binary and ternary equations lifted to k = 3
        let mut rng = crate::rng::derive_rng(9, crate::rng::stream::VERIFIER, 21);
        let n = 7;
        let mut equations = Vec::new();
        for arity in [1usize, 2, 3, 3, 2, 1, 3] {
            let vars = crate::rng::sample_distinct_sorted(&mut rng, arity, n);
            equations.push(XorEquation::new(vars, rng.random()).unwrap());
        }
        let ncp = NcpInstance::new(n, equations).unwrap();
        let inst = ncp.to_csp(3).unwrap();
        for _ in 0..100 {
            let x: Vec<usize> = (0..n).map(|_| rng.random_range(0..2)).collect();
            assert_eq!(
                inst.objective(&Assignment::new(x.clone())).unwrap(),
                ncp.direct_cost(&x, 3).unwrap()
            );
        }
        // every variable of every equation still sees its fragile constraint
        assert!(inst.count_fragile_constraints(0).is_ok());
    }

    #[test]
    fn arity_above_k_rejected() {
        let ncp =
            NcpInstance::new(4, vec![XorEquation::new(vec![0, 1, 2], true).unwrap()]).unwrap();
        assert!(ncp.to_csp(2).is_err());
    }

    #[test]
    fn text_round_trip() {
        let ncp = NcpInstance::new(
            5,
            vec![
                XorEquation::new(vec![0, 3], true).unwrap(),
                XorEquation::new(vec![1, 2, 4], false).unwrap(),
            ],
        )
        .unwrap();
        let back = NcpInstance::parse(&ncp.to_text()).unwrap();
        assert_eq!(ncp, back);
        assert!(NcpInstance::parse("3 1\n2 0 1\n").is_err());
    }
}
