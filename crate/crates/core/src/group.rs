//! Finite Abelian groups `Z/q1 x ... x Z/qd`, the torsion-free line `Z`, and the
//! canonical bilinear pairing used for Fourier analysis.
//!
//! Elements of a finite group are stored with every coordinate reduced into
//! `[0, qj)`. The canonical order is lexicographic on coordinates, which for a
//! finite group coincides with the mixed-radix index returned by
//! [`AbelianGroup::index_of`]. Every sup/argmax witness in the crate is the
//! smallest element in this order.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest group for which subgroup enumeration is attempted.
pub const SUBGROUP_ENUMERATION_CAP: u64 = 10_000;

/// Largest number of subgroups kept by [`enumerate_subgroups`].
pub const SUBGROUP_COUNT_CAP: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroup {
    factors: Vec<u64>,
    torsion_free: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(pub Vec<i64>);

impl GroupElement {
    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    /// The single coordinate of an element of a cyclic group or of `Z`.
    pub fn scalar(&self) -> i64 {
        self.0[0]
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            write!(f, "(")?;
            for (i, c) in self.0.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")
        }
    }
}

/// A point of `R/Z` stored as an exact fraction `num/den` with `0 <= num < den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FracValue {
    num: u64,
    den: u64,
}

impl FracValue {
    pub fn new(num: i64, den: u64) -> Result<Self> {
        if den == 0 {
            return invalid("zero denominator");
        }
        let d = den as i64;
        let r = num.rem_euclid(d) as u64;
        let g = r.gcd(&den).max(1);
        Ok(FracValue { num: r / g, den: den / g })
    }

    pub fn zero() -> Self {
        FracValue { num: 0, den: 1 }
    }

    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.num, self.den)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `x + y` in `R/Z`.
    pub fn add(&self, other: &FracValue) -> FracValue {
        let den = self.den.lcm(&other.den);
        let num = (self.num * (den / self.den) + other.num * (den / other.den)) % den;
        FracValue::new(num as i64, den).expect("nonzero denominator")
    }

    pub fn shifted_by_half(&self) -> FracValue {
        self.add(&FracValue { num: 1, den: 2 })
    }
}

/// Distance from `x` to the nearest integer.
pub fn frac_dist(x: &FracValue) -> Ratio<u64> {
    let r = x.num.min(x.den - x.num);
    Ratio::new(r, x.den)
}

/// Distance to the nearest integer of `num / (2 * half_den)`, expressed in units
/// of `1 / (2 * half_den)`, optionally after adding `1/2`.
///
/// `num` is a pairing numerator in units of `1 / half_den`.
#[inline]
pub fn dist_units(num: u64, half_den: u64, shifted: bool) -> u64 {
    let two = 2 * half_den;
    let mut u = (2 * num) % two;
    if shifted {
        u = (u + half_den) % two;
    }
    u.min(two - u)
}

impl AbelianGroup {
    pub fn finite(factors: Vec<u64>) -> Result<Self> {
        if factors.is_empty() {
            return invalid("a finite group needs at least one cyclic factor");
        }
        if let Some(q) = factors.iter().find(|&&q| q < 2) {
            return invalid(format!("cyclic factor {q} is smaller than 2"));
        }
        let mut order: u64 = 1;
        for &q in &factors {
            order = order
                .checked_mul(q)
                .ok_or_else(|| Error::Resource("group order overflows u64".into()))?;
        }
        if order > i64::MAX as u64 / 4 {
            return Err(Error::Resource("group order too large".into()));
        }
        Ok(AbelianGroup { factors, torsion_free: false })
    }

    pub fn cyclic(q: u64) -> Result<Self> {
        Self::finite(vec![q])
    }

    pub fn integers() -> Self {
        AbelianGroup { factors: Vec::new(), torsion_free: true }
    }

    pub fn is_finite(&self) -> bool {
        !self.torsion_free
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion_free
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    /// Number of coordinates of an element.
    pub fn dim(&self) -> usize {
        if self.torsion_free {
            1
        } else {
            self.factors.len()
        }
    }

    /// `|G|`, or `None` for `Z`.
    pub fn order(&self) -> Option<u64> {
        if self.torsion_free {
            None
        } else {
            Some(self.factors.iter().product())
        }
    }

    pub(crate) fn order_or_err(&self) -> Result<u64> {
        self.order()
            .ok_or_else(|| Error::Unsupported("the torsion-free group Z has no finite order".into()))
    }

    /// Least common multiple of the cyclic factors; every pairing value has a
    /// denominator dividing it.
    pub fn exponent(&self) -> Result<u64> {
        if self.torsion_free {
            return Err(Error::Unsupported("Z has no finite exponent".into()));
        }
        Ok(self.factors.iter().fold(1u64, |acc, &q| acc.lcm(&q)))
    }

    /// Builds an element, reducing each coordinate modulo its factor.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.dim() {
            return invalid(format!(
                "element has {} coordinates, group has {}",
                coords.len(),
                self.dim()
            ));
        }
        if self.torsion_free {
            return Ok(GroupElement(coords.to_vec()));
        }
        Ok(GroupElement(
            coords
                .iter()
                .zip(&self.factors)
                .map(|(&c, &q)| c.rem_euclid(q as i64))
                .collect(),
        ))
    }

    /// Element of a cyclic group or of `Z` from a single integer.
    pub fn scalar(&self, x: i64) -> Result<GroupElement> {
        self.element(&[x])
    }

    pub fn contains(&self, e: &GroupElement) -> bool {
        if e.0.len() != self.dim() {
            return false;
        }
        self.torsion_free
            || e.0.iter().zip(&self.factors).all(|(&c, &q)| c >= 0 && (c as u64) < q)
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![0; self.dim()])
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        if self.torsion_free {
            return GroupElement(vec![a.0[0] + b.0[0]]);
        }
        GroupElement(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.factors)
                .map(|((&x, &y), &q)| (x + y).rem_euclid(q as i64))
                .collect(),
        )
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        self.scale(a, -1)
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &GroupElement, k: i64) -> GroupElement {
        if self.torsion_free {
            return GroupElement(vec![a.0[0] * k]);
        }
        GroupElement(
            a.0.iter()
                .zip(&self.factors)
                .map(|(&x, &q)| {
                    let q = q as i128;
                    ((x as i128 * k as i128).rem_euclid(q)) as i64
                })
                .collect(),
        )
    }

    /// Mixed-radix index of an element (first coordinate most significant).
    pub fn index_of(&self, e: &GroupElement) -> usize {
        debug_assert!(self.is_finite());
        let mut idx = 0usize;
        for (&c, &q) in e.0.iter().zip(&self.factors) {
            idx = idx * q as usize + c as usize;
        }
        idx
    }

    pub fn element_at(&self, mut idx: usize) -> GroupElement {
        debug_assert!(self.is_finite());
        let mut coords = vec![0i64; self.factors.len()];
        for (j, &q) in self.factors.iter().enumerate().rev() {
            coords[j] = (idx % q as usize) as i64;
            idx /= q as usize;
        }
        GroupElement(coords)
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> Result<impl Iterator<Item = GroupElement> + '_> {
        let n = self.order_or_err()? as usize;
        Ok((0..n).map(move |i| self.element_at(i)))
    }

    /// Index arithmetic for finite groups.
    pub(crate) fn arith(&self) -> Result<IndexArith> {
        let order = self.order_or_err()? as usize;
        Ok(IndexArith { factors: self.factors.clone(), order })
    }

    /// Numerator of `zeta . a` in units of `1/exponent`.
    pub(crate) fn pairing_num(&self, zeta: &GroupElement, a: &GroupElement, exponent: u64) -> u64 {
        let mut acc: u128 = 0;
        for ((&z, &x), &q) in zeta.0.iter().zip(&a.0).zip(&self.factors) {
            let w = (exponent / q) as u128;
            acc += (z as u128 * x as u128 % q as u128) * w;
        }
        (acc % exponent as u128) as u64
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.torsion_free {
            return write!(f, "Z");
        }
        for (i, q) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " x ")?;
            }
            write!(f, "Z/{q}")?;
        }
        Ok(())
    }
}

/// Arithmetic on mixed-radix indices of a finite group.
#[derive(Clone, Debug)]
pub(crate) struct IndexArith {
    factors: Vec<u64>,
    pub order: usize,
}

impl IndexArith {
    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        if self.factors.len() == 1 {
            let s = a + b;
            return if s >= self.order { s - self.order } else { s };
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0usize;
        let mut stride = 1usize;
        for &q in self.factors.iter().rev() {
            let q = q as usize;
            let s = (a % q + b % q) % q;
            out += s * stride;
            stride *= q;
            a /= q;
            b /= q;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        self.scale(a, -1)
    }

    #[inline]
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    pub fn scale(&self, a: usize, k: i64) -> usize {
        if self.factors.len() == 1 {
            let q = self.order as i128;
            return ((a as i128 * k as i128).rem_euclid(q)) as usize;
        }
        let mut a = a;
        let mut out = 0usize;
        let mut stride = 1usize;
        for &q in self.factors.iter().rev() {
            let qi = q as i128;
            let c = (a as u64 % q) as i128;
            out += ((c * k as i128).rem_euclid(qi)) as usize * stride;
            stride *= q as usize;
            a /= q as usize;
        }
        out
    }
}

/// The canonical pairing `zeta . a = sum_j zeta_j a_j / q_j mod 1`.
pub fn pairing(zeta: &GroupElement, a: &GroupElement, group: &AbelianGroup) -> Result<FracValue> {
    if group.is_torsion_free() {
        return Err(Error::Unsupported("pairing requires a finite group".into()));
    }
    if !group.contains(zeta) || !group.contains(a) {
        return invalid("pairing arguments are not elements of the group");
    }
    let l = group.exponent()?;
    FracValue::new(group.pairing_num(zeta, a, l) as i64, l)
}

/// The units of `Z/qZ`.
pub fn reduced_elements(q: u64) -> Result<Vec<u64>> {
    if q < 2 {
        return invalid(format!("modulus {q} is smaller than 2"));
    }
    Ok((1..q).filter(|a| a.gcd(&q) == 1).collect())
}

/// All subgroups with at most `max_size` elements, as index sets sorted by
/// size and then lexicographically.
pub(crate) fn subgroup_indices(group: &AbelianGroup, max_size: usize) -> Result<Vec<Vec<usize>>> {
    let order = group.order_or_err()?;
    if order > SUBGROUP_ENUMERATION_CAP {
        return Err(Error::Resource(format!(
            "subgroup enumeration is capped at |G| <= {SUBGROUP_ENUMERATION_CAP}, got {order}"
        )));
    }
    let ar = group.arith()?;
    let n = order as usize;

    let mut cyclic: BTreeSet<Vec<usize>> = BTreeSet::new();
    for g in 0..n {
        let mut h = vec![0usize];
        let mut x = g;
        while x != 0 {
            h.push(x);
            x = ar.add(x, g);
        }
        if h.len() <= max_size {
            h.sort_unstable();
            cyclic.insert(h);
        }
    }
    let cyclic: Vec<Vec<usize>> = cyclic.into_iter().collect();

    let mut all: BTreeSet<Vec<usize>> = cyclic.iter().cloned().collect();
    let mut frontier: Vec<Vec<usize>> = cyclic.clone();
    let mut mark = vec![false; n];
    while let Some(h) = frontier.pop() {
        for c in &cyclic {
            if c.iter().all(|x| h.binary_search(x).is_ok()) {
                continue;
            }
            let mut joined = Vec::new();
            for &x in &h {
                for &y in c {
                    let s = ar.add(x, y);
                    if !mark[s] {
                        mark[s] = true;
                        joined.push(s);
                    }
                }
                if joined.len() > max_size {
                    break;
                }
            }
            for &s in &joined {
                mark[s] = false;
            }
            if joined.len() > max_size {
                continue;
            }
            joined.sort_unstable();
            if all.insert(joined.clone()) {
                if all.len() > SUBGROUP_COUNT_CAP {
                    return Err(Error::Resource(format!(
                        "more than {SUBGROUP_COUNT_CAP} subgroups"
                    )));
                }
                frontier.push(joined);
            }
        }
    }
    let mut out: Vec<Vec<usize>> = all.into_iter().collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// Every subgroup of cardinality at most `max_size`, each listed in canonical
/// element order. Subgroups are sorted by size, then lexicographically.
pub fn enumerate_subgroups(group: &AbelianGroup, max_size: usize) -> Result<Vec<Vec<GroupElement>>> {
    Ok(subgroup_indices(group, max_size)?
        .into_iter()
        .map(|h| h.into_iter().map(|i| group.element_at(i)).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frac(n: u64, d: u64) -> Ratio<u64> {
        Ratio::new(n, d)
    }

    #[test]
    fn pairing_examples() {
        let z4 = AbelianGroup::cyclic(4).unwrap();
        let v = pairing(&z4.scalar(3).unwrap(), &z4.scalar(2).unwrap(), &z4).unwrap();
        assert_eq!(v.ratio(), frac(1, 2));

        let z5 = AbelianGroup::cyclic(5).unwrap();
        let v = pairing(&z5.scalar(0).unwrap(), &z5.scalar(3).unwrap(), &z5).unwrap();
        assert_eq!(v.ratio(), frac(0, 1));

        let g = AbelianGroup::finite(vec![2, 3]).unwrap();
        let v = pairing(&g.element(&[1, 1]).unwrap(), &g.element(&[1, 2]).unwrap(), &g).unwrap();
        assert_eq!(v.ratio(), frac(1, 6));
    }

    #[test]
    fn pairing_rejects_integers() {
        let z = AbelianGroup::integers();
        let e = z.scalar(1).unwrap();
        assert!(matches!(pairing(&e, &e, &z), Err(Error::Unsupported(_))));
    }

    #[test]
    fn frac_dist_examples() {
        assert_eq!(frac_dist(&FracValue::new(7, 10).unwrap()), frac(3, 10));
        assert_eq!(frac_dist(&FracValue::zero()), frac(0, 1));
        assert_eq!(frac_dist(&FracValue::new(1, 3).unwrap()), frac(1, 3));
        assert_eq!(frac_dist(&FracValue::new(1, 2).unwrap()), frac(1, 2));
    }

    #[test]
    fn dist_units_matches_frac_dist() {
        for den in 2..12u64 {
            for num in 0..den {
                let x = FracValue::new(num as i64, den).unwrap();
                let d = dist_units(num, den, false);
                assert_eq!(Ratio::new(d, 2 * den), frac_dist(&x));
                let ds = dist_units(num, den, true);
                assert_eq!(Ratio::new(ds, 2 * den), frac_dist(&x.shifted_by_half()));
            }
        }
    }

    #[test]
    fn reduced_elements_examples() {
        assert_eq!(reduced_elements(6).unwrap(), vec![1, 5]);
        assert_eq!(reduced_elements(5).unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(reduced_elements(12).unwrap(), vec![1, 5, 7, 11]);
        assert!(reduced_elements(1).is_err());
    }

    fn brute_subgroups(group: &AbelianGroup, max_size: usize) -> BTreeSet<Vec<usize>> {
        // every subset closed under addition containing 0 (tiny groups only)
        let n = group.order().unwrap() as usize;
        let ar = group.arith().unwrap();
        let mut out = BTreeSet::new();
        for mask in 0u32..(1 << n) {
            if mask & 1 == 0 {
                continue;
            }
            let set: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            if set.len() > max_size {
                continue;
            }
            let closed = set
                .iter()
                .all(|&a| set.iter().all(|&b| mask >> ar.add(a, b) & 1 == 1));
            if closed {
                out.insert(set);
            }
        }
        out
    }

    #[test]
    fn subgroup_examples() {
        let z6 = AbelianGroup::cyclic(6).unwrap();
        let subs = subgroup_indices(&z6, 6).unwrap();
        assert_eq!(subs, vec![vec![0], vec![0, 3], vec![0, 2, 4], vec![0, 1, 2, 3, 4, 5]]);

        let z5 = AbelianGroup::cyclic(5).unwrap();
        assert_eq!(subgroup_indices(&z5, 4).unwrap(), vec![vec![0]]);

        let v4 = AbelianGroup::finite(vec![2, 2]).unwrap();
        let subs = subgroup_indices(&v4, 2).unwrap();
        assert_eq!(subs.len(), 4);
        assert_eq!(subs[0], vec![0]);
    }

    #[test]
    fn subgroups_match_brute_force() {
        for factors in [vec![12], vec![2, 4], vec![2, 2, 2], vec![3, 3], vec![2, 6], vec![16]] {
            let g = AbelianGroup::finite(factors).unwrap();
            let n = g.order().unwrap() as usize;
            for max in [1, 2, 4, n] {
                let fast: BTreeSet<Vec<usize>> = subgroup_indices(&g, max).unwrap().into_iter().collect();
                assert_eq!(fast, brute_subgroups(&g, max), "{g} max {max}");
            }
        }
    }

    #[test]
    fn subgroup_cap_enforced() {
        let g = AbelianGroup::cyclic(10_007).unwrap();
        assert!(matches!(enumerate_subgroups(&g, 10), Err(Error::Resource(_))));
    }

    #[test]
    fn index_roundtrip_is_canonical_order() {
        let g = AbelianGroup::finite(vec![3, 4, 2]).unwrap();
        let elems: Vec<_> = g.elements().unwrap().collect();
        let mut sorted = elems.clone();
        sorted.sort();
        assert_eq!(elems, sorted);
        for (i, e) in elems.iter().enumerate() {
            assert_eq!(g.index_of(e), i);
        }
    }

    #[test]
    fn non_degenerate_pairing() {
        for factors in [vec![7], vec![2, 3], vec![4, 6], vec![2, 2, 3]] {
            let g = AbelianGroup::finite(factors).unwrap();
            for zeta in g.elements().unwrap().skip(1) {
                assert!(g
                    .elements()
                    .unwrap()
                    .any(|a| pairing(&zeta, &a, &g).unwrap() != FracValue::zero()));
            }
        }
    }

    #[test]
    fn character_orthogonality() {
        let g = AbelianGroup::finite(vec![3, 4]).unwrap();
        let n = g.order().unwrap() as f64;
        for zeta in g.elements().unwrap() {
            let (mut re, mut im) = (0.0, 0.0);
            for a in g.elements().unwrap() {
                let t = 2.0 * std::f64::consts::PI * pairing(&zeta, &a, &g).unwrap().to_f64();
                re += t.cos();
                im += t.sin();
            }
            let expect = if zeta == g.zero() { n } else { 0.0 };
            assert!((re - expect).abs() < 1e-9 && im.abs() < 1e-9);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn group_and_triple() -> impl Strategy<Value = (Vec<u64>, Vec<i64>, Vec<i64>, Vec<i64>)> {
            prop::collection::vec(2u64..9, 1..4).prop_flat_map(|f| {
                let d = f.len();
                (
                    Just(f),
                    prop::collection::vec(0i64..100, d),
                    prop::collection::vec(0i64..100, d),
                    prop::collection::vec(0i64..100, d),
                )
            })
        }

        proptest! {
            #[test]
            fn bilinear_and_symmetric((f, z1, z2, a) in group_and_triple()) {
                let g = AbelianGroup::finite(f).unwrap();
                let z1 = g.element(&z1).unwrap();
                let z2 = g.element(&z2).unwrap();
                let a = g.element(&a).unwrap();
                let lhs = pairing(&g.add(&z1, &z2), &a, &g).unwrap();
                let rhs = pairing(&z1, &a, &g).unwrap().add(&pairing(&z2, &a, &g).unwrap());
                prop_assert_eq!(lhs, rhs);
                prop_assert_eq!(pairing(&z1, &a, &g).unwrap(), pairing(&a, &z1, &g).unwrap());
                prop_assert_eq!(pairing(&g.zero(), &a, &g).unwrap(), FracValue::zero());
            }

            #[test]
            fn frac_dist_triangle(n1 in 0i64..1000, n2 in 0i64..1000, den in 1u64..60) {
                let x = FracValue::new(n1, den).unwrap();
                let y = FracValue::new(n2, den).unwrap();
                prop_assert!(frac_dist(&x.add(&y)) <= frac_dist(&x) + frac_dist(&y));
            }
        }
    }
}
