//! Exact rational arithmetic for objective values, margins and thresholds.
//!
//! Every cost in this crate is an integer numerator over an instance-wide
//! scale. Comparisons cross-multiply in 128 bits; nothing here touches
//! floating point, so ties break identically on every platform and rerun.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

/// An exact non-negative rational.
///
/// Used both for costs (numerator over the instance scale `eta`, or
/// `eta * M` for hierarchical objectives) and for solver parameters such as
/// epsilon and delta. The representation is not normalized; equality and
/// ordering are value-based (cross-multiplied).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ExactCost {
    pub num: u64,
    pub den: u64,
}

impl ExactCost {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "ExactCost denominator must be positive");
        ExactCost { num, den }
    }

    pub fn zero() -> Self {
        ExactCost { num: 0, den: 1 }
    }

    pub fn integer(n: u64) -> Self {
        ExactCost { num: n, den: 1 }
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Parse either `"p/q"` or a plain decimal such as `"0.25"` exactly.
    pub fn parse(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let num: u64 = p.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            let den: u64 = q.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            if den == 0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(ExactCost::new(num, den).reduced())
        } else if let Some((int, frac)) = s.split_once('.') {
            let int: u64 = if int.is_empty() {
                0
            } else {
                int.parse().map_err(|_| format!("bad number {s:?}"))?
            };
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(format!("bad number {s:?}"));
            }
            let den = 10u64
                .checked_pow(frac.len() as u32)
                .ok_or_else(|| format!("too many digits in {s:?}"))?;
            let frac_num: u64 = frac.parse().map_err(|_| format!("bad number {s:?}"))?;
            let num = int
                .checked_mul(den)
                .and_then(|v| v.checked_add(frac_num))
                .ok_or_else(|| format!("overflow parsing {s:?}"))?;
            Ok(ExactCost::new(num, den).reduced())
        } else {
            let num: u64 = s.parse().map_err(|_| format!("bad number {s:?}"))?;
            Ok(ExactCost::integer(num))
        }
    }

    pub fn reduced(self) -> Self {
        let g = gcd(self.num.max(1), self.den);
        ExactCost { num: self.num / g, den: self.den / g }
    }

    fn from_u128(num: u128, den: u128) -> Self {
        debug_assert!(den > 0);
        let g = gcd128(num.max(1), den);
        let (num, den) = (num / g, den / g);
        assert!(
            num <= u64::MAX as u128 && den <= u64::MAX as u128,
            "exact cost overflow: {num}/{den}"
        );
        ExactCost { num: num as u64, den: den as u64 }
    }

    pub fn add(self, other: Self) -> Self {
        if self.den == other.den {
            match self.num.checked_add(other.num) {
                Some(num) => return ExactCost { num, den: self.den },
                None => {}
            }
        }
        let num =
            self.num as u128 * other.den as u128 + other.num as u128 * self.den as u128;
        Self::from_u128(num, self.den as u128 * other.den as u128)
    }

    /// |self - other|, exact.
    pub fn abs_diff(self, other: Self) -> Self {
        let a = self.num as u128 * other.den as u128;
        let b = other.num as u128 * self.den as u128;
        Self::from_u128(a.abs_diff(b), self.den as u128 * other.den as u128)
    }

    pub fn mul(self, other: Self) -> Self {
        Self::from_u128(
            self.num as u128 * other.num as u128,
            self.den as u128 * other.den as u128,
        )
    }

    pub fn mul_int(self, f: u64) -> Self {
        Self::from_u128(self.num as u128 * f as u128, self.den as u128)
    }

    pub fn div_int(self, f: u64) -> Self {
        assert!(f > 0);
        Self::from_u128(self.num as u128, self.den as u128 * f as u128)
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialEq for ExactCost {
    fn eq(&self, other: &Self) -> bool {
        self.num as u128 * other.den as u128 == other.num as u128 * self.den as u128
    }
}

impl Eq for ExactCost {}

impl PartialOrd for ExactCost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactCost {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl fmt::Display for ExactCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

fn gcd128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return a.max(b).max(1);
    }
    a / gcd(a, b) * b
}

/// Binomial coefficient with the usual `k > n -> 0` convention.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    assert!(acc <= u64::MAX as u128, "binomial overflow");
    acc as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_cross_multiplied() {
        assert_eq!(ExactCost::new(1, 2), ExactCost::new(2, 4));
        assert!(ExactCost::new(1, 3) < ExactCost::new(1, 2));
        assert!(ExactCost::new(5, 1) > ExactCost::new(9, 2));
    }

    #[test]
    fn add_and_diff_are_exact() {
        let a = ExactCost::new(1, 6).add(ExactCost::new(1, 3));
        assert_eq!(a, ExactCost::new(1, 2));
        assert_eq!(
            ExactCost::new(3, 4).abs_diff(ExactCost::new(1, 6)),
            ExactCost::new(7, 12)
        );
    }

    #[test]
    fn parse_accepts_fractions_and_decimals() {
        assert_eq!(ExactCost::parse("3/4").unwrap(), ExactCost::new(3, 4));
        assert_eq!(ExactCost::parse("0.05").unwrap(), ExactCost::new(1, 20));
        assert_eq!(ExactCost::parse("2").unwrap(), ExactCost::integer(2));
        assert!(ExactCost::parse("1/0").is_err());
        assert!(ExactCost::parse("x").is_err());
    }

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(6, 2), 15);
        assert_eq!(binomial(10, 3), 120);
        assert_eq!(binomial(4, 0), 1);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(800, 2), 319_600);
    }

    #[test]
    fn lcm_gcd_basics() {
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(lcm(4, 6), 12);
        assert_eq!(lcm(1, 7), 7);
    }
}
