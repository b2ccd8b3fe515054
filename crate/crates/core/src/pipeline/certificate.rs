use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Lower and upper rational bounds on `e`.
pub const E_LOWER: (u64, u64) = (2_718_281, 1_000_000);
pub const E_UPPER: (u64, u64) = (2_718_282, 1_000_000);

/// A named inequality `lhs relation rhs` with both sides rendered as exact
/// rationals, or as decimals when the side is a certified bound involving `e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub name: String,
    pub lhs: String,
    pub relation: String,
    pub rhs: String,
    pub pass: bool,
}

impl Certificate {
    pub fn new(name: &str, lhs: impl Into<String>, relation: &str, rhs: impl Into<String>, pass: bool) -> Self {
        Certificate { name: name.into(), lhs: lhs.into(), relation: relation.into(), rhs: rhs.into(), pass }
    }

    pub(crate) fn le(name: &str, lhs: &BigRational, rhs: &BigRational) -> Self {
        Self::new(name, rational_string(lhs), "<=", rational_string(rhs), lhs <= rhs)
    }

    pub(crate) fn lt(name: &str, lhs: &BigRational, rhs: &BigRational) -> Self {
        Self::new(name, rational_string(lhs), "<", rational_string(rhs), lhs < rhs)
    }

    pub(crate) fn eq(name: &str, lhs: &BigRational, rhs: &BigRational) -> Self {
        Self::new(name, rational_string(lhs), "==", rational_string(rhs), lhs == rhs)
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.pass { "ok" } else { "FAILED" };
        write!(f, "[{tag}] {}: {} {} {}", self.name, self.lhs, self.relation, self.rhs)
    }
}

pub fn rational_string(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub(crate) fn int(x: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(x.into())
}

pub(crate) fn frac(p: impl Into<BigInt>, q: impl Into<BigInt>) -> BigRational {
    BigRational::new(p.into(), q.into())
}

/// Fixed-point lower bounds `floor(scale * e^-j)` for `0 <= j <= max_j`.
///
/// Each entry is derived from the previous one by multiplying with the lower
/// bound `1 / E_UPPER` and flooring, so every entry is a lower bound.
pub(crate) struct ExpLower {
    pub scale: BigUint,
    neg: Vec<BigUint>,
}

impl ExpLower {
    pub fn new(max_j: u64) -> Self {
        let digits = 40 + (max_j as f64 * std::f64::consts::LOG10_E).ceil() as usize;
        let scale = num_traits::pow(BigUint::from(10u32), digits);
        let mut neg = Vec::with_capacity(max_j as usize + 1);
        neg.push(scale.clone());
        for j in 1..=max_j as usize {
            let next = &neg[j - 1] * BigUint::from(E_UPPER.1) / BigUint::from(E_UPPER.0);
            neg.push(next);
        }
        ExpLower { scale, neg }
    }

    pub fn max_j(&self) -> u64 {
        self.neg.len() as u64 - 1
    }

    /// Lower bound for `scale * e^-j`.
    pub fn neg(&self, j: u64) -> &BigUint {
        &self.neg[j as usize]
    }

    /// Lower bound for `scale * e^(2 - l)`, `l >= 1`.
    pub fn pigeonhole_weight(&self, l: u64) -> BigUint {
        if l == 1 {
            &self.scale * BigUint::from(E_LOWER.0) / BigUint::from(E_LOWER.1)
        } else {
            self.neg(l - 2).clone()
        }
    }

    /// Whether `units / scale >= target`.
    pub fn at_least(&self, units: &BigUint, target: &BigRational) -> bool {
        let lhs = BigInt::from(units.clone()) * target.denom();
        let rhs = target.numer() * BigInt::from(self.scale.clone());
        lhs >= rhs
    }

    pub fn render(&self, units: &BigUint) -> String {
        decimal(&BigRational::new(units.clone().into(), self.scale.clone().into()))
    }
}

/// Scientific rendering with 12 significant digits.
pub fn decimal(x: &BigRational) -> String {
    if x.is_zero() {
        return "0".into();
    }
    if let Some(v) = x.to_f64().filter(|v| v.is_finite() && *v != 0.0) {
        return format!("{v:.12e}");
    }
    let neg = x.numer() < &BigInt::zero();
    let mut num = x.numer().magnitude().clone();
    let den = x.denom().magnitude().clone();
    let mut exp: i64 = 0;
    let ten = BigUint::from(10u32);
    while num < den {
        num *= &ten;
        exp -= 1;
    }
    while num >= &den * &ten {
        exp += 1;
        num /= &ten;
    }
    let mantissa = (BigUint::from(10u64.pow(12)) * &num / &den).to_f64().unwrap_or(0.0) / 1e12;
    let sign = if neg { "-" } else { "" };
    format!("{sign}{mantissa:.12}e{exp}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_lower_bounds() {
        let e = ExpLower::new(300);
        for j in [0u64, 1, 2, 10, 100, 300] {
            let approx = e.neg(j).to_f64().unwrap_or(0.0);
            let ratio = approx / (e.scale.to_f64().unwrap() * (-(j as f64)).exp());
            assert!(ratio <= 1.0 && ratio > 0.9999, "j={j} ratio={ratio}");
        }
        let w1 = e.pigeonhole_weight(1);
        assert!(e.at_least(&w1, &frac(2718, 1000)));
        assert!(!e.at_least(&w1, &frac(2719, 1000)));
        assert_eq!(e.pigeonhole_weight(2), e.scale);
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal(&frac(1, 4)), "2.500000000000e-1");
        let tiny = BigRational::new(1.into(), num_traits::pow(BigInt::from(10), 400));
        assert_eq!(decimal(&tiny), "1.000000000000e-400");
    }
}
