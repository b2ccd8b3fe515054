//! Exact walk distributions and the concentration functionals built on them.

mod distribution;
mod fourier;
mod inversion;

use std::fmt;

use num_bigint::BigUint;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::group::{AbelianGroup, GroupElement};

pub use distribution::{walk_distribution, word_walk_distribution, Distribution, Extremum, WINDOW_CAP};
pub use fourier::{
    fourier_coefficient, fourier_exp_bound, level_statistic, word_exp_bound, word_fourier_coefficient,
    LevelStatistic,
};
pub use inversion::{inversion_exact, inversion_residual};

/// The multiset `A = {a_1, ..., a_n}` as distinct elements with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightMultiset {
    group: AbelianGroup,
    items: Vec<(GroupElement, u64)>,
}

impl WeightMultiset {
    pub fn new(group: AbelianGroup, items: Vec<(GroupElement, u64)>) -> Result<Self> {
        let mut items: Vec<(GroupElement, u64)> = items;
        if let Some((x, _)) = items.iter().find(|(x, _)| !group.contains(x)) {
            return Err(Error::GroupMismatch(format!("{x} is not an element of {group}")));
        }
        if items.iter().any(|(_, m)| *m == 0) {
            return invalid("multiplicities must be positive");
        }
        items.sort();
        let mut merged: Vec<(GroupElement, u64)> = Vec::with_capacity(items.len());
        for (x, m) in items {
            match merged.last_mut() {
                Some((y, k)) if *y == x => *k += m,
                _ => merged.push((x, m)),
            }
        }
        if merged.is_empty() {
            return invalid("the multiset must be nonempty");
        }
        Ok(WeightMultiset { group, items: merged })
    }

    pub fn from_elements(group: AbelianGroup, xs: &[GroupElement]) -> Result<Self> {
        Self::new(group, xs.iter().map(|x| (x.clone(), 1)).collect())
    }

    /// Multiset of integers (reduced into the group when it is finite).
    pub fn from_ints(group: AbelianGroup, xs: &[i64]) -> Result<Self> {
        let elems = xs.iter().map(|&x| group.scalar(x)).collect::<Result<Vec<_>>>()?;
        Self::from_elements(group, &elems)
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn items(&self) -> &[(GroupElement, u64)] {
        &self.items
    }

    /// Total multiplicity.
    pub fn n(&self) -> u64 {
        self.items.iter().map(|(_, m)| m).sum()
    }

    /// Elements listed with repetition, in canonical order.
    pub fn expanded(&self) -> Vec<GroupElement> {
        self.items
            .iter()
            .flat_map(|(x, m)| std::iter::repeat_n(x.clone(), *m as usize))
            .collect()
    }

    pub fn multiplicity(&self, x: &GroupElement) -> u64 {
        self.items
            .binary_search_by(|(y, _)| y.cmp(x))
            .map(|i| self.items[i].1)
            .unwrap_or(0)
    }

    /// `a in A` implies `-a in A` with the same multiplicity.
    pub fn is_symmetric(&self) -> bool {
        self.items.iter().all(|(x, m)| self.multiplicity(&self.group.neg(x)) == *m)
    }

    /// `{phi(a) : a in A}` with multiplicities kept.
    pub fn map(&self, f: impl Fn(&GroupElement) -> GroupElement) -> Result<Self> {
        Self::new(self.group.clone(), self.items.iter().map(|(x, m)| (f(x), *m)).collect())
    }

    pub fn max_abs(&self) -> i64 {
        if self.group.is_torsion_free() {
            self.items.iter().map(|(x, _)| x.scalar().abs()).max().unwrap_or(0)
        } else {
            0
        }
    }
}

impl fmt::Display for WeightMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (x, m)) in self.items.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if *m == 1 {
                write!(f, "{x}")?;
            } else {
                write!(f, "{x}^[{m}]")?;
            }
        }
        write!(f, "}}")
    }
}

/// Law of the coefficients `x_i` of a walk `sum a_i x_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StepLaw {
    /// `P(0) = 1 - alpha`, `P(1) = P(-1) = alpha / 2`.
    Lazy {
        #[serde(with = "ratio_string")]
        alpha: Ratio<u64>,
    },
    /// `P(1) = alpha`, `P(0) = 1 - alpha`.
    Bernoulli01 {
        #[serde(with = "ratio_string")]
        alpha: Ratio<u64>,
    },
    /// `P(1) = P(-1) = 1/2`.
    Signed,
    /// `X_j` uniform on the multiset `A` (the word walk).
    UniformOnA,
}

impl StepLaw {
    pub fn lazy(alpha: Ratio<u64>) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(StepLaw::Lazy { alpha })
    }

    pub fn bernoulli01(alpha: Ratio<u64>) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(StepLaw::Bernoulli01 { alpha })
    }

    /// Coefficient values with integer weights over a common denominator.
    pub(crate) fn coefficient_weights(&self) -> Result<(Vec<(i64, u64)>, u64)> {
        let (support, den) = match *self {
            StepLaw::Lazy { alpha } => {
                check_alpha(alpha)?;
                let (p, q) = (*alpha.numer(), *alpha.denom());
                (vec![(-1, p), (0, 2 * (q - p)), (1, p)], 2 * q)
            }
            StepLaw::Bernoulli01 { alpha } => {
                check_alpha(alpha)?;
                let (p, q) = (*alpha.numer(), *alpha.denom());
                (vec![(0, q - p), (1, p)], q)
            }
            StepLaw::Signed => (vec![(-1, 1), (1, 1)], 2),
            StepLaw::UniformOnA => {
                return Err(Error::Unsupported(
                    "the uniform-on-A law defines a word walk; use word_walk_distribution".into(),
                ))
            }
        };
        Ok((support.into_iter().filter(|(_, w)| *w > 0).collect(), den))
    }
}

pub(crate) fn check_alpha(alpha: Ratio<u64>) -> Result<()> {
    if alpha > Ratio::one() {
        return invalid(format!("alpha = {alpha} is outside [0, 1]"));
    }
    Ok(())
}

pub(crate) mod ratio_string {
    use num_rational::Ratio;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<u64>, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_ratio(&s).map_err(D::Error::custom)
    }
}

/// Parses `"p/q"`, `"p"` or a short decimal such as `"0.25"`.
pub fn parse_ratio(s: &str) -> Result<Ratio<u64>> {
    let s = s.trim();
    let bad = || Error::Parse(format!("cannot parse {s:?} as a nonnegative rational"));
    if let Some((p, q)) = s.split_once('/') {
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        let q: u64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(p, q));
    }
    if let Some((i, f)) = s.split_once('.') {
        if f.len() > 12 || !f.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let i: u64 = if i.is_empty() { 0 } else { i.parse().map_err(|_| bad())? };
        let den = 10u64.pow(f.len() as u32);
        let f: u64 = if f.is_empty() { 0 } else { f.parse().map_err(|_| bad())? };
        return Ok(Ratio::new(i * den + f, den));
    }
    Ok(Ratio::from_integer(s.parse().map_err(|_| bad())?))
}

pub(crate) fn big_ratio(r: Ratio<u64>) -> BigRational {
    BigRational::new((*r.numer()).into(), (*r.denom()).into())
}

/// `rho(A)`: the largest point probability of `sum a_i x_i` with signed steps.
pub fn rho_classical(a: &WeightMultiset) -> Result<Extremum> {
    Ok(walk_distribution(a, StepLaw::Signed)?.max_point())
}

/// `rho_xi(A)`: sup-discrepancy from uniform of the lazy walk on a finite group.
pub fn rho_xi(a: &WeightMultiset, alpha: Ratio<u64>) -> Result<Extremum> {
    walk_distribution(a, StepLaw::lazy(alpha)?)?.sup_discrepancy()
}

/// `rho_m(A)` for a symmetric `A`: the largest point probability of the
/// `m`-step word walk over `Z`, or its sup-discrepancy from uniform over a
/// finite group.
pub fn rho_m(a: &WeightMultiset, m: u64) -> Result<Extremum> {
    if !a.is_symmetric() {
        return invalid("rho_m needs a symmetric multiset");
    }
    let dist = word_walk_distribution(a, m)?;
    if a.group().is_torsion_free() {
        Ok(dist.max_point())
    } else {
        dist.sup_discrepancy()
    }
}

/// `rho*_m(A)`: the largest fraction of `m`-subsets of indices with a common sum.
pub fn rho_star_m(a: &WeightMultiset, m: u64) -> Result<Extremum> {
    distribution::subset_sum_counts(a, m).map(|d| d.max_point())
}

/// `rho*(A) = rho*_{floor(n/2)}(A)`.
pub fn rho_star(a: &WeightMultiset) -> Result<Extremum> {
    rho_star_m(a, a.n() / 2)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `binom(n, m) alpha^m (1 - alpha)^(n - m)`.
pub fn binomial_point_mass(n: u64, alpha: Ratio<u64>, m: u64) -> Result<BigRational> {
    check_alpha(alpha)?;
    if m > n {
        return invalid(format!("m = {m} exceeds n = {n}"));
    }
    let p = big_ratio(alpha);
    let q = BigRational::one() - &p;
    let c = BigRational::from_integer(binomial(n, m).into());
    Ok(c * num_traits::pow(p, m as usize) * num_traits::pow(q, (n - m) as usize))
}

/// `binom(n, floor(n/2)) / 2^n`, the largest signed-walk concentration of `n`
/// nonzero integers.
pub fn erdos_bound(n: u64) -> BigRational {
    BigRational::new(binomial(n, n / 2).into(), (BigUint::one() << n as usize).into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    fn z() -> AbelianGroup {
        AbelianGroup::integers()
    }

    #[test]
    fn multiset_basics() {
        let a = WeightMultiset::from_ints(z(), &[3, -1, 3, 0]).unwrap();
        assert_eq!(a.n(), 4);
        assert_eq!(a.items().len(), 3);
        assert_eq!(a.multiplicity(&GroupElement(vec![3])), 2);
        assert!(!a.is_symmetric());
        assert!(WeightMultiset::from_ints(z(), &[-2, 2, 0]).unwrap().is_symmetric());
        assert!(WeightMultiset::from_ints(z(), &[]).is_err());
        let z5 = AbelianGroup::cyclic(5).unwrap();
        assert!(WeightMultiset::from_ints(z5, &[1, 4]).unwrap().is_symmetric());
    }

    #[test]
    fn rho_classical_examples() {
        let v = |xs: &[i64]| rho_classical(&WeightMultiset::from_ints(z(), xs).unwrap()).unwrap().value;
        assert_eq!(v(&[1, 1]), r(1, 2));
        assert_eq!(v(&[1, 2]), r(1, 4));
        assert_eq!(v(&[0, 0]), r(1, 1));
        assert_eq!(erdos_bound(2), r(1, 2));
    }

    #[test]
    fn rho_xi_examples() {
        let z5 = AbelianGroup::cyclic(5).unwrap();
        let a = WeightMultiset::from_ints(z5.clone(), &[1, 1, 1]).unwrap();
        let e = rho_xi(&a, Ratio::one()).unwrap();
        assert_eq!(e.value, r(1, 5));
        assert_eq!(e.witness, z5.zero());

        let zeros = WeightMultiset::from_ints(z5, &[0, 0]).unwrap();
        assert_eq!(rho_xi(&zeros, Ratio::new(1, 3)).unwrap().value, r(4, 5));

        let z2 = AbelianGroup::cyclic(2).unwrap();
        let a = WeightMultiset::from_ints(z2, &[1]).unwrap();
        assert_eq!(rho_xi(&a, Ratio::new(1, 2)).unwrap().value, r(0, 1));

        assert!(rho_xi(&WeightMultiset::from_ints(z(), &[1]).unwrap(), Ratio::one()).is_err());
    }

    #[test]
    fn rho_star_examples() {
        let v = |xs: &[i64], m| rho_star_m(&WeightMultiset::from_ints(z(), xs).unwrap(), m).unwrap().value;
        assert_eq!(v(&[1, 1, 2], 2), r(2, 3));
        assert_eq!(v(&[1, 2, 3], 2), r(1, 3));
        assert_eq!(v(&[4, -7, 9, 1], 4), r(1, 1));
        assert!(rho_star_m(&WeightMultiset::from_ints(z(), &[1]).unwrap(), 2).is_err());
        assert!(rho_star_m(&WeightMultiset::from_ints(z(), &[1]).unwrap(), 0).is_err());
    }

    #[test]
    fn rho_m_examples() {
        let a = WeightMultiset::from_ints(z(), &[-1, 1]).unwrap();
        assert_eq!(rho_m(&a, 3).unwrap().value, r(3, 8));
        assert_eq!(rho_m(&a, 1).unwrap().value, r(1, 2));
        let z2 = AbelianGroup::cyclic(2).unwrap();
        let a = WeightMultiset::from_ints(z2, &[1, 1]).unwrap();
        assert_eq!(rho_m(&a, 1).unwrap().value, r(1, 2));
        assert!(rho_m(&WeightMultiset::from_ints(z(), &[1, 2]).unwrap(), 2).is_err());
    }

    #[test]
    fn binomial_mass_examples() {
        assert_eq!(binomial_point_mass(4, Ratio::new(1, 2), 2).unwrap(), r(6, 16));
        assert_eq!(binomial_point_mass(3, Ratio::new(2, 3), 2).unwrap(), r(4, 9));
        assert_eq!(binomial_point_mass(5, Ratio::one(), 5).unwrap(), r(1, 1));
        assert!(binomial_point_mass(3, Ratio::new(1, 2), 4).is_err());
    }

    #[test]
    fn parse_ratio_forms() {
        assert_eq!(parse_ratio("2/3").unwrap(), Ratio::new(2, 3));
        assert_eq!(parse_ratio("0.25").unwrap(), Ratio::new(1, 4));
        assert_eq!(parse_ratio("1").unwrap(), Ratio::one());
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("-1/2").is_err());
    }

    #[test]
    fn step_law_json() {
        let law = StepLaw::lazy(Ratio::new(2, 3)).unwrap();
        let s = serde_json::to_string(&law).unwrap();
        assert_eq!(s, r#"{"kind":"lazy","alpha":"2/3"}"#);
        let back: StepLaw = serde_json::from_str(&s).unwrap();
        assert_eq!(back, law);
        let signed: StepLaw = serde_json::from_str(r#"{"kind":"signed"}"#).unwrap();
        assert_eq!(signed, StepLaw::Signed);
    }
}
