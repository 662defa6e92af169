//! The Gale-Berlekamp switching game and its equivalent formulations.
//!
//! An m x m board of +-1 entries; whole-row and whole-column switches invert
//! signs; minimize the number of lit bulbs. Equivalently: nearest rank-1 +-1
//! matrix in Hamming distance, XOR-equation fitting over F2, or maximizing
//! the bilinear form x^T M y. As a CSP: variables are the 2m switches
//! (rows 0..m-1, then columns m..2m-1) over {0, 1} with the bit mapping
//! +1 -> 0, -1 -> 1, and one fragile parity table per (row, column) pair.

use crate::csp::{Assignment, CspInstance, Domain, PenaltySource, PenaltyTable};
use crate::error::{Error, Result};
use crate::fragility::LogicalConstraint;
use std::sync::Arc;

/// Bit-packed m x m board; bit set means the entry is -1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GbInstance {
    m: usize,
    bits: Vec<u64>,
}

impl GbInstance {
    /// Board from rows of +-1 entries.
    pub fn from_pm1(rows: &[Vec<i8>]) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::invalid("empty board".to_string()));
        }
        let mut gb = GbInstance {
            m,
            bits: vec![0; (m * m).div_ceil(64)],
        };
        for (r, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::invalid(format!(
                    "row {r} has {} entries, expected {m}",
                    row.len()
                )));
            }
            for (c, &e) in row.iter().enumerate() {
                match e {
                    1 => {}
                    -1 => gb.set_bit(r, c),
                    _ => return Err(Error::invalid(format!("entry {e} not in {{-1, +1}}"))),
                }
            }
        }
        Ok(gb)
    }

    /// Board from a bit predicate (`true` means the entry is -1).
    pub fn from_bits(m: usize, mut set: impl FnMut(usize, usize) -> bool) -> Self {
        let mut gb = GbInstance {
            m,
            bits: vec![0; (m * m).div_ceil(64)],
        };
        for r in 0..m {
            for c in 0..m {
                if set(r, c) {
                    gb.set_bit(r, c);
                }
            }
        }
        gb
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn set_bit(&mut self, r: usize, c: usize) {
        let idx = r * self.m + c;
        self.bits[idx / 64] |= 1 << (idx % 64);
    }

    /// True when the entry is -1.
    pub fn bit(&self, r: usize, c: usize) -> bool {
        let idx = r * self.m + c;
        (self.bits[idx / 64] >> (idx % 64)) & 1 == 1
    }

    pub fn entry(&self, r: usize, c: usize) -> i8 {
        if self.bit(r, c) {
            -1
        } else {
            1
        }
    }

    /// Text format: first line m, then m lines of m characters from {+, -}.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let m: usize = lines
            .next()
            .ok_or_else(|| Error::invalid("empty board file".to_string()))?
            .trim()
            .parse()
            .map_err(|_| Error::invalid("bad board header".to_string()))?;
        if m == 0 {
            return Err(Error::invalid("board side must be positive".to_string()));
        }
        let mut gb = GbInstance {
            m,
            bits: vec![0; (m * m).div_ceil(64)],
        };
        for r in 0..m {
            let line = lines
                .next()
                .ok_or_else(|| Error::invalid(format!("missing board row {r}")))?
                .trim();
            if line.len() != m {
                return Err(Error::invalid(format!(
                    "board row {r} has {} characters, expected {m}",
                    line.len()
                )));
            }
            for (c, ch) in line.chars().enumerate() {
                match ch {
                    '+' => {}
                    '-' => gb.set_bit(r, c),
                    _ => {
                        return Err(Error::invalid(format!(
                            "board character {ch:?} not in {{+, -}}"
                        )))
                    }
                }
            }
        }
        Ok(gb)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.m);
        for r in 0..self.m {
            for c in 0..self.m {
                out.push(if self.bit(r, c) { '-' } else { '+' });
            }
            out.push('\n');
        }
        out
    }

    /// Lit bulbs after flipping the marked rows and columns; a bulb (r, c)
    /// is lit iff entry-bit XOR row-flip XOR column-flip is 1.
    pub fn lit_count(&self, rows: &[bool], cols: &[bool]) -> u64 {
        let mut lit = 0;
        for r in 0..self.m {
            for c in 0..self.m {
                if self.bit(r, c) ^ rows[r] ^ cols[c] {
                    lit += 1;
                }
            }
        }
        lit
    }

    /// Lit bulbs under +-1 switch vectors: d(M, x y^T).
    pub fn lit_count_pm1(&self, x: &[i8], y: &[i8]) -> u64 {
        let rows: Vec<bool> = x.iter().map(|&v| v == -1).collect();
        let cols: Vec<bool> = y.iter().map(|&v| v == -1).collect();
        self.lit_count(&rows, &cols)
    }

    /// The CSP image of a switch setting: rows then columns, flipped -> 1.
    pub fn csp_assignment(&self, rows: &[bool], cols: &[bool]) -> Assignment {
        let values = rows
            .iter()
            .chain(cols.iter())
            .map(|&b| b as usize)
            .collect();
        Assignment::new(values)
    }

    /// Explicit fragile MIN-2CSP: n = 2m variables, |D| = 2, eta = 1, one
    /// table per (row, column) pair and none for row-row or column-column
    /// pairs. Carries fragility metadata.
    pub fn to_csp(&self) -> CspInstance {
        let m = self.m;
        let domain = Domain::new(2).expect("binary domain");
        let mut tables = Vec::with_capacity(m * m);
        let mut logical = Vec::with_capacity(m * m);
        for r in 0..m {
            for c in 0..m {
                let e = self.bit(r, c);
                // local order (row value a, column value b): lit iff e ^ a ^ b
                let unsat: Vec<bool> = (0..4).map(|idx| e ^ (idx / 2 == 1) ^ (idx % 2 == 1)).collect();
                let numerators = unsat.iter().map(|&u| u as u64).collect();
                tables.push(PenaltyTable::new(vec![r, m + c], numerators));
                logical.push(LogicalConstraint::new(vec![r, m + c], unsat));
            }
        }
        CspInstance::explicit(2 * m, 2, domain, 1, tables)
            .and_then(|inst| inst.with_fragility(logical))
            .expect("GB encoding is always well-formed")
    }

    /// Implicit variant: penalties evaluated from the bit matrix on demand.
    pub fn to_csp_implicit(&self) -> CspInstance {
        let m = self.m;
        let domain = Domain::new(2).expect("binary domain");
        let source = Arc::new(GbPenaltySource { board: self.clone() });
        CspInstance::implicit(2 * m, 2, domain, 1, source)
            .expect("GB encoding is always well-formed")
    }
}

#[derive(Debug)]
struct GbPenaltySource {
    board: GbInstance,
}

impl PenaltySource for GbPenaltySource {
    fn numerator(&self, vars: &[usize], local: &[usize]) -> u64 {
        let m = self.board.m;
        let (r, col) = (vars[0], vars[1]);
        if r >= m || col < m {
            return 0; // row-row or column-column pair: no constraint
        }
        let lit = self.board.bit(r, col - m) ^ (local[0] == 1) ^ (local[1] == 1);
        lit as u64
    }

    fn visit_subsets(&self, visit: &mut dyn FnMut(&[usize])) {
        let m = self.board.m;
        for r in 0..m {
            for c in 0..m {
                visit(&[r, m + c]);
            }
        }
    }

    fn visit_subsets_containing(&self, v: usize, visit: &mut dyn FnMut(&[usize])) {
        let m = self.board.m;
        if v < m {
            for c in 0..m {
                visit(&[v, m + c]);
            }
        } else {
            for r in 0..m {
                visit(&[r, v]);
            }
        }
    }

    fn table_count(&self) -> usize {
        self.board.m * self.board.m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GbEquivalences {
    /// d(M, x y^T): entries where the board differs from the rank-1 matrix
    pub d_rank1: u64,
    /// XOR-mismatch count under the bit mapping +1 -> 0, -1 -> 1
    pub xor_count: u64,
    /// x^T M y
    pub bilinear: i64,
}

/// Evaluate the three equivalent formulations at one switch setting.
/// Contract: `d_rank1 == xor_count` and `bilinear == m^2 - 2 * d_rank1`.
pub fn gb_equivalences(gb: &GbInstance, x: &[i8], y: &[i8]) -> Result<GbEquivalences> {
    let m = gb.m();
    if x.len() != m || y.len() != m {
        return Err(Error::invalid(format!(
            "switch vectors of length {}/{} for an {m} x {m} board",
            x.len(),
            y.len()
        )));
    }
    if x.iter().chain(y.iter()).any(|&v| v != 1 && v != -1) {
        return Err(Error::invalid("switch entries must be +-1".to_string()));
    }
    let mut d_rank1 = 0u64;
    let mut xor_count = 0u64;
    let mut bilinear = 0i64;
    for r in 0..m {
        for c in 0..m {
            let e = gb.entry(r, c);
            if e != x[r] * y[c] {
                d_rank1 += 1;
            }
            if gb.bit(r, c) ^ (x[r] == -1) ^ (y[c] == -1) {
                xor_count += 1;
            }
            bilinear += x[r] as i64 * e as i64 * y[c] as i64;
        }
    }
    Ok(GbEquivalences {
        d_rank1,
        xor_count,
        bilinear,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::ExactCost;
    use rand::Rng;

    fn random_board(m: usize, rng: &mut impl Rng) -> GbInstance {
        GbInstance::from_bits(m, |_, _| rng.random())
    }

    fn random_pm1(m: usize, rng: &mut impl Rng) -> Vec<i8> {
        (0..m).map(|_| if rng.random() { 1 } else { -1 }).collect()
    }

    #[test]
    fn all_plus_board_costs_zero_at_all_alpha() {
        let gb = GbInstance::from_pm1(&vec![vec![1; 3]; 3]).unwrap();
        let inst = gb.to_csp();
        let x = Assignment::constant(6, 0);
        assert_eq!(inst.objective(&x).unwrap(), ExactCost::zero());
    }

    #[test]
    fn single_minus_board_has_opt_one_at_m_two() {
        // lit-bulb parity is invariant under switch flips on a 2x2 board
        let gb = GbInstance::from_pm1(&[vec![-1, 1], vec![1, 1]]).unwrap();
        let inst = gb.to_csp();
        let mut best = u64::MAX;
        for code in 0..16usize {
            let x = Assignment::new((0..4).map(|b| (code >> b) & 1).collect());
            best = best.min(inst.objective(&x).unwrap().num);
        }
        assert_eq!(best, 1);
    }

    #[test]
    fn objective_matches_lit_count_simulation() {
        let mut rng = crate::rng::derive_rng(3, crate::rng::stream::VERIFIER, 10);
        let gb = random_board(4, &mut rng);
        let inst = gb.to_csp();
        for _ in 0..100 {
            let rows: Vec<bool> = (0..4).map(|_| rng.random()).collect();
            let cols: Vec<bool> = (0..4).map(|_| rng.random()).collect();
            let x = gb.csp_assignment(&rows, &cols);
            assert_eq!(
                inst.objective(&x).unwrap(),
                ExactCost::integer(gb.lit_count(&rows, &cols))
            );
        }
    }

    #[test]
    fn equivalences_on_exact_rank_one() {
        let mut rng = crate::rng::derive_rng(4, crate::rng::stream::VERIFIER, 11);
        let m = 5;
        let x = random_pm1(m, &mut rng);
        let y = random_pm1(m, &mut rng);
        let rows: Vec<Vec<i8>> = (0..m)
            .map(|r| (0..m).map(|c| x[r] * y[c]).collect())
            .collect();
        let gb = GbInstance::from_pm1(&rows).unwrap();
        let eq = gb_equivalences(&gb, &x, &y).unwrap();
        assert_eq!(eq.d_rank1, 0);
        assert_eq!(eq.xor_count, 0);
        assert_eq!(eq.bilinear, (m * m) as i64);

        // negated board: full disagreement
        let neg: Vec<Vec<i8>> = rows.iter().map(|r| r.iter().map(|&e| -e).collect()).collect();
        let gbn = GbInstance::from_pm1(&neg).unwrap();
        let eqn = gb_equivalences(&gbn, &x, &y).unwrap();
        assert_eq!(eqn.d_rank1, (m * m) as u64);
        assert_eq!(eqn.xor_count, (m * m) as u64);
        assert_eq!(eqn.bilinear, -((m * m) as i64));
    }

    #[test]
    fn equivalence_identities_hold_on_random_boards() {
        let mut rng = crate::rng::derive_rng(5, crate::rng::stream::VERIFIER, 12);
        for _ in 0..50 {
            let m = 5;
            let gb = random_board(m, &mut rng);
            let x = random_pm1(m, &mut rng);
            let y = random_pm1(m, &mut rng);
            let eq = gb_equivalences(&gb, &x, &y).unwrap();
            assert_eq!(eq.d_rank1, eq.xor_count);
            assert_eq!(eq.bilinear, (m * m) as i64 - 2 * eq.d_rank1 as i64);
            assert_eq!(eq.d_rank1, gb.lit_count_pm1(&x, &y));
        }
    }

    #[test]
    fn equivalences_rejects_bad_input() {
        let gb = GbInstance::from_pm1(&[vec![1, 1], vec![1, 1]]).unwrap();
        assert!(gb_equivalences(&gb, &[1], &[1, 1]).is_err());
        assert!(gb_equivalences(&gb, &[1, 2], &[1, 1]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let mut rng = crate::rng::derive_rng(6, crate::rng::stream::VERIFIER, 13);
        let gb = random_board(5, &mut rng);
        let back = GbInstance::parse(&gb.to_text()).unwrap();
        assert_eq!(gb, back);
        assert!(GbInstance::parse("2\n+-\n+x\n").is_err());
        assert!(GbInstance::parse("0\n").is_err());
    }
}
