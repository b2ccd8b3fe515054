//! Reference enumerators that walk every outcome tuple, word or subset.
//! They are slow on purpose and serve as oracles for the exact engines.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::concentration::{StepLaw, WeightMultiset};
use crate::error::{invalid, Error, Result};
use crate::group::GroupElement;

/// Largest number of outcomes any enumerator visits.
pub const BRUTE_CAP: u128 = 5_000_000;

pub type PointMasses = BTreeMap<GroupElement, BigRational>;

fn guard(count: u128) -> Result<()> {
    if count > BRUTE_CAP {
        return Err(Error::Resource(format!("{count} outcomes exceed the enumeration cap")));
    }
    Ok(())
}

/// Law of `sum a_i x_i` by visiting every coefficient tuple.
pub fn walk(a: &WeightMultiset, law: StepLaw) -> Result<PointMasses> {
    let (coeffs, den) = law.coefficient_weights()?;
    let xs = a.expanded();
    guard((coeffs.len() as u128).saturating_pow(xs.len() as u32))?;
    let g = a.group();
    let mut out = PointMasses::new();
    let total = BigRational::from_integer(num_traits::pow(BigUint::from(den), xs.len()).into());
    let mut idx = vec![0usize; xs.len()];
    loop {
        let mut s = g.zero();
        let mut w = BigUint::one();
        for (x, &j) in xs.iter().zip(&idx) {
            s = g.add(&s, &g.scale(x, coeffs[j].0));
            w *= coeffs[j].1;
        }
        *out.entry(s).or_insert_with(BigRational::zero) += BigRational::from_integer(w.into()) / &total;
        if !advance(&mut idx, coeffs.len()) {
            break;
        }
    }
    Ok(out)
}

/// Law of `X_1 + ... + X_m` by visiting all `n^m` index words.
pub fn word_walk(a: &WeightMultiset, m: u64) -> Result<PointMasses> {
    if m == 0 {
        return invalid("m must be positive");
    }
    let xs = a.expanded();
    guard((xs.len() as u128).saturating_pow(m as u32))?;
    let g = a.group();
    let unit = BigRational::new(BigUint::one().into(), num_traits::pow(BigUint::from(xs.len()), m as usize).into());
    let mut out = PointMasses::new();
    let mut idx = vec![0usize; m as usize];
    loop {
        let s = idx.iter().fold(g.zero(), |s, &j| g.add(&s, &xs[j]));
        *out.entry(s).or_insert_with(BigRational::zero) += &unit;
        if !advance(&mut idx, xs.len()) {
            break;
        }
    }
    Ok(out)
}

/// `rho*_m(A)` by listing every `m`-subset of indices.
pub fn rho_star_m(a: &WeightMultiset, m: u64) -> Result<BigRational> {
    let xs = a.expanded();
    let n = xs.len();
    let m = m as usize;
    if m == 0 || m > n {
        return invalid("m out of range");
    }
    guard(crate::concentration::binomial(n as u64, m as u64).try_into().unwrap_or(u128::MAX))?;
    let g = a.group();
    let mut counts: BTreeMap<GroupElement, u64> = BTreeMap::new();
    let mut pick: Vec<usize> = (0..m).collect();
    let mut total = 0u64;
    loop {
        let s = pick.iter().fold(g.zero(), |s, &j| g.add(&s, &xs[j]));
        *counts.entry(s).or_default() += 1;
        total += 1;
        let mut i = m;
        loop {
            if i == 0 {
                let best = counts.values().copied().max().unwrap_or(0);
                return Ok(BigRational::new(best.into(), total.into()));
            }
            i -= 1;
            if pick[i] < n - m + i {
                break;
            }
        }
        pick[i] += 1;
        for j in i + 1..m {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

/// Largest point probability of a finitely supported law.
pub fn max_mass(p: &PointMasses) -> BigRational {
    p.values().cloned().max().unwrap_or_else(BigRational::zero)
}

/// `sup_a |P(a) - 1/|G||` over every element of a finite group.
pub fn sup_discrepancy(p: &PointMasses, a: &WeightMultiset) -> Result<BigRational> {
    let g = a.group();
    let order = g.order_or_err()?;
    let u = BigRational::new(BigUint::one().into(), BigUint::from(order).into());
    let mut best = BigRational::zero();
    for x in g.elements()? {
        let v = p.get(&x).cloned().unwrap_or_else(BigRational::zero);
        let d = if v >= u { v - &u } else { &u - v };
        if d > best {
            best = d;
        }
    }
    Ok(best)
}

fn advance(idx: &mut [usize], base: usize) -> bool {
    for d in idx.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concentration::{self as conc, walk_distribution, word_walk_distribution};
    use crate::group::AbelianGroup;
    use num_rational::Ratio;
    use proptest::prelude::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    fn same(exact: &conc::Distribution, brute: &PointMasses) -> bool {
        let support = exact.support();
        support.len() == brute.len() && support.iter().all(|(x, p)| brute.get(x) == Some(p))
    }

    #[test]
    fn walk_examples() {
        let z5 = AbelianGroup::cyclic(5).unwrap();
        let a = WeightMultiset::from_ints(z5.clone(), &[1, 1, 1]).unwrap();
        let p = walk(&a, StepLaw::Signed).unwrap();
        // sums 3, 1, -1, -3 with masses 1/8, 3/8, 3/8, 1/8 reduce to 3, 1, 4, 2
        assert_eq!(p[&z5.scalar(1).unwrap()], r(3, 8));
        assert_eq!(p[&z5.scalar(4).unwrap()], r(3, 8));
        assert_eq!(p[&z5.scalar(2).unwrap()], r(1, 8));
        assert_eq!(p[&z5.scalar(3).unwrap()], r(1, 8));
        assert!(!p.contains_key(&z5.zero()));
        let d = walk_distribution(&a, StepLaw::Signed).unwrap();
        assert!(same(&d, &p));
        assert!(d.is_normalized());

        let zeros = WeightMultiset::from_ints(AbelianGroup::integers(), &[0, 0, 0]).unwrap();
        let d = walk_distribution(&zeros, StepLaw::lazy(Ratio::new(1, 3)).unwrap()).unwrap();
        assert_eq!(d.support(), vec![(GroupElement(vec![0]), r(1, 1))]);

        let z2 = AbelianGroup::cyclic(2).unwrap();
        let a = WeightMultiset::from_ints(z2.clone(), &[1]).unwrap();
        let d = walk_distribution(&a, StepLaw::lazy(Ratio::new(1, 2)).unwrap()).unwrap();
        assert_eq!(d.prob(&z2.zero()), r(1, 2));
        assert_eq!(d.prob(&z2.scalar(1).unwrap()), r(1, 2));
    }

    #[test]
    fn word_walk_examples() {
        let z = AbelianGroup::integers();
        let a = WeightMultiset::from_ints(z.clone(), &[-1, 1]).unwrap();
        let d = word_walk_distribution(&a, 3).unwrap();
        assert_eq!(d.prob(&GroupElement(vec![3])), r(1, 8));
        assert_eq!(d.prob(&GroupElement(vec![-3])), r(1, 8));
        assert_eq!(d.prob(&GroupElement(vec![1])), r(3, 8));
        assert_eq!(d.prob(&GroupElement(vec![-1])), r(3, 8));
        assert!(same(&d, &word_walk(&a, 3).unwrap()));

        let b = WeightMultiset::from_ints(z, &[2, 5, 5]).unwrap();
        let d = word_walk_distribution(&b, 1).unwrap();
        assert_eq!(d.prob(&GroupElement(vec![5])), r(2, 3));

        let z3 = AbelianGroup::cyclic(3).unwrap();
        let a = WeightMultiset::from_ints(z3.clone(), &[1, 2]).unwrap();
        let d = word_walk_distribution(&a, 2).unwrap();
        assert_eq!(d.prob(&z3.zero()), r(1, 2));
        assert_eq!(d.prob(&z3.scalar(1).unwrap()), r(1, 4));
        assert_eq!(d.prob(&z3.scalar(2).unwrap()), r(1, 4));
    }

    #[test]
    fn passing_claim_example() {
        // A = {1,1,2}, m = 2, alpha = 2/3: both sides are 8/27.
        let a = WeightMultiset::from_ints(AbelianGroup::integers(), &[1, 1, 2]).unwrap();
        let alpha = Ratio::new(2, 3);
        let lhs = max_mass(&walk(&a, StepLaw::bernoulli01(alpha).unwrap()).unwrap());
        let rhs = conc::rho_star_m(&a, 2).unwrap().value * conc::binomial_point_mass(3, alpha, 2).unwrap();
        assert_eq!(lhs, r(8, 27));
        assert_eq!(rhs, r(8, 27));
    }

    fn small_int_multiset() -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec(-6i64..7, 1..8)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn walk_matches_enumeration(xs in small_int_multiset(), p in 0u64..6, kind in 0u8..3) {
            let a = WeightMultiset::from_ints(AbelianGroup::integers(), &xs).unwrap();
            let alpha = Ratio::new(p, 5);
            let law = match kind {
                0 => StepLaw::lazy(alpha).unwrap(),
                1 => StepLaw::bernoulli01(alpha).unwrap(),
                _ => StepLaw::Signed,
            };
            let d = walk_distribution(&a, law).unwrap();
            prop_assert!(same(&d, &walk(&a, law).unwrap()));
            prop_assert!(d.is_normalized());
        }

        #[test]
        fn finite_walk_matches_enumeration(q in 2u64..13, xs in prop::collection::vec(0i64..13, 1..8), p in 0u64..4) {
            let g = AbelianGroup::cyclic(q).unwrap();
            let a = WeightMultiset::from_ints(g, &xs).unwrap();
            let law = StepLaw::lazy(Ratio::new(p, 3)).unwrap();
            let d = walk_distribution(&a, law).unwrap();
            let brute = walk(&a, law).unwrap();
            prop_assert!(same(&d, &brute));
            prop_assert_eq!(d.sup_discrepancy().unwrap().value, sup_discrepancy(&brute, &a).unwrap());
        }

        #[test]
        fn product_group_walk(xs in prop::collection::vec((0i64..2, 0i64..6), 1..6)) {
            let g = AbelianGroup::finite(vec![2, 6]).unwrap();
            let elems: Vec<GroupElement> = xs.iter().map(|&(u, v)| g.element(&[u, v]).unwrap()).collect();
            let a = WeightMultiset::from_elements(g, &elems).unwrap();
            let law = StepLaw::lazy(Ratio::new(1, 2)).unwrap();
            prop_assert!(same(&walk_distribution(&a, law).unwrap(), &walk(&a, law).unwrap()));
        }

        #[test]
        fn word_walk_matches_enumeration(xs in prop::collection::vec(-5i64..6, 1..5), m in 1u64..5) {
            let a = WeightMultiset::from_ints(AbelianGroup::integers(), &xs).unwrap();
            prop_assert!(same(&word_walk_distribution(&a, m).unwrap(), &word_walk(&a, m).unwrap()));
            let g = AbelianGroup::cyclic(7).unwrap();
            let b = WeightMultiset::from_ints(g, &xs).unwrap();
            prop_assert!(same(&word_walk_distribution(&b, m).unwrap(), &word_walk(&b, m).unwrap()));
        }

        #[test]
        fn rho_star_matches_enumeration(xs in prop::collection::vec(-8i64..9, 1..10), m in 1u64..10) {
            let a = WeightMultiset::from_ints(AbelianGroup::integers(), &xs).unwrap();
            prop_assume!(m <= a.n());
            prop_assert_eq!(conc::rho_star_m(&a, m).unwrap().value, rho_star_m(&a, m).unwrap());
            let g = AbelianGroup::cyclic(5).unwrap();
            let b = WeightMultiset::from_ints(g, &xs).unwrap();
            prop_assert_eq!(conc::rho_star_m(&b, m).unwrap().value, rho_star_m(&b, m).unwrap());
        }

        #[test]
        fn erdos_bound_holds(xs in prop::collection::vec(prop_oneof![-30i64..0, 1i64..31], 1..21)) {
            let a = WeightMultiset::from_ints(AbelianGroup::integers(), &xs).unwrap();
            let rho = conc::rho_classical(&a).unwrap().value;
            prop_assert!(rho <= conc::erdos_bound(a.n()));
        }

        #[test]
        fn classical_dominates_rho_star(xs in prop::collection::vec(-10i64..11, 2..15)) {
            let a = WeightMultiset::from_ints(AbelianGroup::integers(), &xs).unwrap();
            let n = a.n();
            let rho = conc::rho_classical(&a).unwrap().value;
            let star = conc::rho_star_m(&a, n / 2).unwrap().value;
            prop_assert!(rho >= star * conc::erdos_bound(n));
        }

        #[test]
        fn passing_claim(xs in prop::collection::vec(-6i64..7, 1..9), p in 1u64..5, m in 0u64..9) {
            let a = WeightMultiset::from_ints(AbelianGroup::integers(), &xs).unwrap();
            prop_assume!(m >= 1 && m <= a.n());
            let alpha = Ratio::new(p, 5);
            let d = walk_distribution(&a, StepLaw::bernoulli01(alpha).unwrap()).unwrap();
            let rhs = conc::rho_star_m(&a, m).unwrap().value * conc::binomial_point_mass(a.n(), alpha, m).unwrap();
            prop_assert!(d.max_point().value >= rhs);
        }

        #[test]
        fn zero_one_and_signed_agree_over_z(xs in prop::collection::vec(-9i64..10, 1..10)) {
            // 2 * (0/1 walk) - sum a_i is the signed walk, so both maxima coincide
            let a = WeightMultiset::from_ints(AbelianGroup::integers(), &xs).unwrap();
            let signed = conc::rho_classical(&a).unwrap().value;
            let d = walk_distribution(&a, StepLaw::bernoulli01(Ratio::new(1, 2)).unwrap()).unwrap();
            prop_assert_eq!(d.max_point().value, signed);
        }

        #[test]
        fn rho_xi_below_trivial_bound(q in 2u64..20, xs in prop::collection::vec(0i64..20, 1..7), p in 0u64..5) {
            let g = AbelianGroup::cyclic(q).unwrap();
            let a = WeightMultiset::from_ints(g, &xs).unwrap();
            let v = conc::rho_xi(&a, Ratio::new(p, 4)).unwrap().value;
            prop_assert!(v <= BigRational::one() - BigRational::new(1.into(), (q as i64).into()));
        }
    }
}
