//! Generalized arithmetic progressions (GAPs), coset-progressions `H + P`,
//! sumsets, the dividing lemma and a brute-force minimal-cover search.

mod cover;

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::group::{AbelianGroup, GroupElement};

pub use cover::{minimal_cover, search_cover, CoverOptions, CoverOutcome};

/// Largest number of representations enumerated when listing a progression or
/// a sumset.
pub const ENUMERATION_CAP: u128 = 2_000_000;

pub type ElementSet = BTreeSet<GroupElement>;

/// `{ g0 + m1 g1 + ... + mr gr : lower_i <= m_i <= upper_i }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gap {
    group: AbelianGroup,
    base: GroupElement,
    generators: Vec<GroupElement>,
    lower: Vec<i64>,
    upper: Vec<i64>,
}

impl Gap {
    pub fn new(
        group: AbelianGroup,
        base: GroupElement,
        generators: Vec<GroupElement>,
        lower: Vec<i64>,
        upper: Vec<i64>,
    ) -> Result<Self> {
        if generators.len() != lower.len() || lower.len() != upper.len() {
            return invalid("generators and bounds must have equal length");
        }
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return invalid("lower bound exceeds upper bound");
        }
        if !group.contains(&base) || generators.iter().any(|g| !group.contains(g)) {
            return Err(Error::GroupMismatch("GAP element outside its group".into()));
        }
        Ok(Gap { group, base, generators, lower, upper })
    }

    /// Symmetric GAP `{ sum m_i g_i : |m_i| <= N_i }`.
    pub fn symmetric(group: AbelianGroup, generators: Vec<GroupElement>, bounds: Vec<i64>) -> Result<Self> {
        if bounds.iter().any(|&n| n < 0) {
            return invalid("symmetric bounds must be nonnegative");
        }
        let lower = bounds.iter().map(|n| -n).collect();
        let base = group.zero();
        Gap::new(group, base, generators, lower, bounds)
    }

    /// Rank-0 progression `{base}`.
    pub fn point(group: AbelianGroup, base: GroupElement) -> Result<Self> {
        Gap::new(group, base, Vec::new(), Vec::new(), Vec::new())
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }
    pub fn base(&self) -> &GroupElement {
        &self.base
    }
    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }
    pub fn lower(&self) -> &[i64] {
        &self.lower
    }
    pub fn upper(&self) -> &[i64] {
        &self.upper
    }
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.base == self.group.zero() && self.lower.iter().zip(&self.upper).all(|(l, u)| *l == -u)
    }

    /// Number of coefficient vectors, `prod (N'_i - N_i + 1)`.
    pub fn volume(&self) -> u128 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| (u - l + 1) as u128)
            .product()
    }

    /// The same GAP translated by `shift`.
    pub fn translate(&self, shift: &GroupElement) -> Gap {
        Gap { base: self.group.add(&self.base, shift), ..self.clone() }
    }

    fn check_cap(&self, factor: u128) -> Result<()> {
        if self.volume().saturating_mul(factor) > ENUMERATION_CAP {
            return Err(Error::Resource(format!(
                "progression volume {} x {} exceeds enumeration cap",
                self.volume(),
                factor
            )));
        }
        Ok(())
    }

    /// Every `g0 + sum m_i g_i` in coefficient order, with repetition.
    pub(crate) fn combos(&self) -> Result<Vec<GroupElement>> {
        self.check_cap(1)?;
        let mut out = vec![self.base.clone()];
        for ((g, &l), &u) in self.generators.iter().zip(&self.lower).zip(&self.upper) {
            let steps: Vec<GroupElement> = (l..=u).map(|m| self.group.scale(g, m)).collect();
            let mut next = Vec::with_capacity(out.len() * steps.len());
            for x in &out {
                for s in &steps {
                    next.push(self.group.add(x, s));
                }
            }
            out = next;
        }
        Ok(out)
    }

    pub fn elements(&self) -> Result<ElementSet> {
        Ok(self.combos()?.into_iter().collect())
    }

    /// True iff every element has a unique coefficient vector.
    pub fn is_proper(&self) -> Result<bool> {
        let combos = self.combos()?;
        let mut seen = HashSet::with_capacity(combos.len());
        Ok(combos.into_iter().all(|x| seen.insert(x)))
    }

    /// `P_t`, the symmetric GAP with every bound multiplied by `t`.
    pub fn dilate(&self, t: u32) -> Result<Gap> {
        if !self.is_symmetric() {
            return invalid("dilation is defined for symmetric GAPs only");
        }
        if t == 0 {
            return invalid("dilation factor must be positive");
        }
        let t = t as i64;
        Ok(Gap {
            lower: self.lower.iter().map(|n| n * t).collect(),
            upper: self.upper.iter().map(|n| n * t).collect(),
            ..self.clone()
        })
    }
}

/// `H + P` with the subgroup `H` listed explicitly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetProgression {
    subgroup: Vec<GroupElement>,
    gap: Gap,
}

impl CosetProgression {
    pub fn new(subgroup: Vec<GroupElement>, gap: Gap) -> Result<Self> {
        let group = gap.group();
        let mut h: Vec<GroupElement> = subgroup;
        h.sort();
        h.dedup();
        if h.iter().any(|x| !group.contains(x)) {
            return Err(Error::GroupMismatch("subgroup element outside the group".into()));
        }
        if h.binary_search(&group.zero()).is_err() {
            return invalid("subgroup does not contain zero");
        }
        if group.is_torsion_free() && h.len() != 1 {
            return invalid("the only finite subgroup of Z is {0}");
        }
        for a in &h {
            for b in &h {
                if h.binary_search(&group.sub(a, b)).is_err() {
                    return invalid("subgroup is not closed under subtraction");
                }
            }
        }
        Ok(CosetProgression { subgroup: h, gap })
    }

    /// Trusted constructor for subgroups produced by enumeration.
    pub(crate) fn from_parts(subgroup: Vec<GroupElement>, gap: Gap) -> Self {
        CosetProgression { subgroup, gap }
    }

    /// `{0} + P`.
    pub fn from_gap(gap: Gap) -> Self {
        let zero = gap.group().zero();
        CosetProgression { subgroup: vec![zero], gap }
    }

    pub fn subgroup(&self) -> &[GroupElement] {
        &self.subgroup
    }
    pub fn gap(&self) -> &Gap {
        &self.gap
    }
    pub fn group(&self) -> &AbelianGroup {
        self.gap.group()
    }
    pub fn rank(&self) -> usize {
        self.gap.rank()
    }
    pub fn is_symmetric(&self) -> bool {
        self.gap.is_symmetric()
    }

    /// `|H| * volume(P)`, the cardinality when proper.
    pub fn nominal_size(&self) -> u128 {
        self.subgroup.len() as u128 * self.gap.volume()
    }

    pub fn elements(&self) -> Result<ElementSet> {
        self.gap.check_cap(self.subgroup.len() as u128)?;
        let group = self.group();
        let mut out = ElementSet::new();
        for p in self.gap.combos()? {
            for h in &self.subgroup {
                out.insert(group.add(&p, h));
            }
        }
        Ok(out)
    }

    pub fn contains(&self, x: &GroupElement) -> Result<bool> {
        Ok(self.elements()?.contains(x))
    }

    /// `P` proper and `|H + P| = |H| |P|`.
    pub fn is_proper(&self) -> Result<bool> {
        Ok(self.elements()?.len() as u128 == self.nominal_size())
    }

    pub fn dilate(&self, t: u32) -> Result<CosetProgression> {
        Ok(CosetProgression { subgroup: self.subgroup.clone(), gap: self.gap.dilate(t)? })
    }

    /// `H + P_t` is proper.
    pub fn is_t_proper(&self, t: u32) -> Result<bool> {
        self.dilate(t)?.is_proper()
    }

    pub fn translate(&self, shift: &GroupElement) -> CosetProgression {
        CosetProgression { subgroup: self.subgroup.clone(), gap: self.gap.translate(shift) }
    }
}

/// JSON literal `{"base", "gens", "lower", "upper", "subgroup"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgressionLiteral {
    pub base: GroupElement,
    pub gens: Vec<GroupElement>,
    pub lower: Vec<i64>,
    pub upper: Vec<i64>,
    #[serde(default)]
    pub subgroup: Vec<GroupElement>,
}

impl CosetProgression {
    pub fn literal(&self) -> ProgressionLiteral {
        ProgressionLiteral {
            base: self.gap.base.clone(),
            gens: self.gap.generators.clone(),
            lower: self.gap.lower.clone(),
            upper: self.gap.upper.clone(),
            subgroup: self.subgroup.clone(),
        }
    }

    pub fn from_literal(group: &AbelianGroup, lit: &ProgressionLiteral) -> Result<Self> {
        let gap = Gap::new(group.clone(), lit.base.clone(), lit.gens.clone(), lit.lower.clone(), lit.upper.clone())?;
        let subgroup = if lit.subgroup.is_empty() { vec![group.zero()] } else { lit.subgroup.clone() };
        CosetProgression::new(subgroup, gap)
    }
}

fn check_members(group: &AbelianGroup, xs: &ElementSet) -> Result<()> {
    if let Some(x) = xs.iter().find(|x| !group.contains(x)) {
        return Err(Error::GroupMismatch(format!("{x} is not an element of {group}")));
    }
    Ok(())
}

/// `X + Y`.
pub fn minkowski_sum(group: &AbelianGroup, xs: &ElementSet, ys: &ElementSet) -> Result<ElementSet> {
    check_members(group, xs)?;
    check_members(group, ys)?;
    if (xs.len() as u128) * (ys.len() as u128) > ENUMERATION_CAP * 8 {
        return Err(Error::Resource("sumset too large to enumerate".into()));
    }
    let mut out = ElementSet::new();
    for x in xs {
        for y in ys {
            out.insert(group.add(x, y));
        }
    }
    Ok(out)
}

/// `kX = X + ... + X` (k summands).
pub fn iterated_sumset(group: &AbelianGroup, xs: &ElementSet, k: u32) -> Result<ElementSet> {
    if k == 0 {
        return invalid("iterated sumset needs k >= 1");
    }
    check_members(group, xs)?;
    let mut acc = xs.clone();
    for _ in 1..k {
        acc = minkowski_sum(group, &acc, xs)?;
        if acc.len() as u128 > ENUMERATION_CAP {
            return Err(Error::Resource("iterated sumset exceeds enumeration cap".into()));
        }
    }
    Ok(acc)
}

/// Given a symmetric 2-proper `H + P` containing `kX` with `0 in X`, returns
/// `H + { sum x_i a_i : |x_i| <= floor(2 N_i / k) }` with the directions whose
/// bound floors to zero removed. The result contains `X`.
pub fn divide_progression(hp: &CosetProgression, k: u32, xs: &ElementSet) -> Result<CosetProgression> {
    if k == 0 {
        return invalid("k must be positive");
    }
    if !hp.is_symmetric() {
        return invalid("divided progression must be symmetric");
    }
    let group = hp.group().clone();
    if !xs.contains(&group.zero()) {
        return Err(Error::ZeroNotInSet);
    }
    if !hp.is_t_proper(2)? {
        return Err(Error::NotTwoProper);
    }
    let members = hp.elements()?;
    let kx = iterated_sumset(&group, xs, k)?;
    if let Some(w) = kx.iter().find(|x| !members.contains(x)) {
        return Err(Error::ContainmentFailed(w.to_string()));
    }
    let mut gens = Vec::new();
    let mut bounds = Vec::new();
    for (g, &n) in hp.gap().generators().iter().zip(hp.gap().upper()) {
        let b = 2 * n / k as i64;
        if b > 0 {
            gens.push(g.clone());
            bounds.push(b);
        }
    }
    let out = CosetProgression::from_parts(hp.subgroup().to_vec(), Gap::symmetric(group, gens, bounds)?);
    let inside = out.elements()?;
    if let Some(w) = xs.iter().find(|x| !inside.contains(x)) {
        return Err(Error::ContainmentFailed(w.to_string()));
    }
    Ok(out)
}

/// Upper bound on `|divide_progression(hp, k, X)|` as an exact rational
/// `(numerator, denominator)`: `|H| prod_{i kept} (4 N_i / k + 1)`.
pub fn divided_size_bound(hp: &CosetProgression, k: u32) -> (u128, u128) {
    let k = k as u128;
    let mut num = hp.subgroup().len() as u128;
    let mut den = 1u128;
    for &n in hp.gap().upper() {
        let n = n as u128;
        if 2 * n >= k {
            num *= 4 * n + k;
            den *= k;
        }
    }
    (num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> AbelianGroup {
        AbelianGroup::integers()
    }

    fn ints(g: &AbelianGroup, xs: &[i64]) -> ElementSet {
        xs.iter().map(|&x| g.scalar(x).unwrap()).collect()
    }

    fn sym(g: &AbelianGroup, gens: &[i64], bounds: &[i64]) -> Gap {
        Gap::symmetric(
            g.clone(),
            gens.iter().map(|&x| g.scalar(x).unwrap()).collect(),
            bounds.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn elements_examples() {
        let g = z();
        let p = sym(&g, &[2, 3], &[1, 1]);
        assert_eq!(p.elements().unwrap(), ints(&g, &[-5, -3, -2, -1, 0, 1, 2, 3, 5]));

        let p = Gap::point(g.clone(), g.scalar(7).unwrap()).unwrap();
        assert_eq!(p.elements().unwrap(), ints(&g, &[7]));

        let z6 = AbelianGroup::cyclic(6).unwrap();
        let hp = CosetProgression::new(ints(&z6, &[0, 3]).into_iter().collect(), sym(&z6, &[2], &[1])).unwrap();
        assert_eq!(hp.elements().unwrap(), ints(&z6, &[0, 1, 2, 3, 4, 5]));
    }

    #[test]
    fn properness_examples() {
        let g = z();
        assert!(sym(&g, &[2, 3], &[1, 1]).is_proper().unwrap());
        let p = sym(&g, &[1, 2], &[1, 1]);
        assert_eq!(p.elements().unwrap().len(), 7);
        assert!(!p.is_proper().unwrap());
        assert!(Gap::point(g.clone(), g.zero()).unwrap().is_proper().unwrap());
    }

    #[test]
    fn coset_progression_requires_subgroup() {
        let z6 = AbelianGroup::cyclic(6).unwrap();
        let bad = CosetProgression::new(ints(&z6, &[0, 2]).into_iter().collect(), sym(&z6, &[1], &[1]));
        assert!(bad.is_err());
        let no_zero = CosetProgression::new(ints(&z6, &[3]).into_iter().collect(), sym(&z6, &[1], &[1]));
        assert!(no_zero.is_err());
    }

    #[test]
    fn literal_json() {
        let z6 = AbelianGroup::cyclic(6).unwrap();
        let hp = CosetProgression::new(ints(&z6, &[0, 3]).into_iter().collect(), sym(&z6, &[2], &[1])).unwrap();
        let s = serde_json::to_string(&hp.literal()).unwrap();
        assert_eq!(s, r#"{"base":[0],"gens":[[2]],"lower":[-1],"upper":[1],"subgroup":[[0],[3]]}"#);
        let back: ProgressionLiteral = serde_json::from_str(&s).unwrap();
        assert_eq!(CosetProgression::from_literal(&z6, &back).unwrap(), hp);
    }

    #[test]
    fn dilate_examples() {
        let g = z();
        let p = sym(&g, &[3], &[2]);
        assert_eq!(p.dilate(2).unwrap(), sym(&g, &[3], &[4]));
        assert_eq!(p.dilate(1).unwrap(), p);
        let unit = sym(&g, &[1], &[1]);
        let d3 = unit.dilate(3).unwrap().elements().unwrap();
        assert_eq!(d3, ints(&g, &[-3, -2, -1, 0, 1, 2, 3]));
        assert_eq!(d3, iterated_sumset(&g, &unit.elements().unwrap(), 3).unwrap());
        let shifted = Gap::new(g.clone(), g.scalar(1).unwrap(), vec![g.scalar(1).unwrap()], vec![-1], vec![1]).unwrap();
        assert!(shifted.dilate(2).is_err());
    }

    #[test]
    fn t_proper_examples() {
        let g = z();
        assert!(CosetProgression::from_gap(sym(&g, &[10], &[1])).is_t_proper(2).unwrap());
        assert!(CosetProgression::from_gap(sym(&g, &[1], &[2])).is_t_proper(2).unwrap());
        let z6 = AbelianGroup::cyclic(6).unwrap();
        let hp = CosetProgression::from_gap(sym(&z6, &[2], &[1]));
        assert!(hp.is_proper().unwrap());
        assert!(!hp.is_t_proper(2).unwrap());
        assert_eq!(hp.dilate(2).unwrap().elements().unwrap().len(), 3);
    }

    #[test]
    fn sumset_examples() {
        let g = z();
        assert_eq!(minkowski_sum(&g, &ints(&g, &[0, 1]), &ints(&g, &[0, 1])).unwrap(), ints(&g, &[0, 1, 2]));
        let x = ints(&g, &[4, 9, -2]);
        assert_eq!(minkowski_sum(&g, &x, &ints(&g, &[0])).unwrap(), x);
        assert_eq!(
            minkowski_sum(&g, &ints(&g, &[1, 3]), &ints(&g, &[10, 20])).unwrap(),
            ints(&g, &[11, 13, 21, 23])
        );
        assert_eq!(iterated_sumset(&g, &ints(&g, &[0, 1]), 3).unwrap(), ints(&g, &[0, 1, 2, 3]));
        assert_eq!(
            iterated_sumset(&g, &ints(&g, &[0, 2, 4, 6]), 2).unwrap(),
            ints(&g, &[0, 2, 4, 6, 8, 10, 12])
        );
        assert_eq!(iterated_sumset(&g, &ints(&g, &[5]), 4).unwrap(), ints(&g, &[20]));
    }

    #[test]
    fn sumset_group_mismatch() {
        let z5 = AbelianGroup::cyclic(5).unwrap();
        let g = z();
        let bad: ElementSet = ints(&g, &[9]);
        assert!(matches!(minkowski_sum(&z5, &bad, &bad), Err(Error::GroupMismatch(_))));
    }

    #[test]
    fn divide_examples() {
        let g = z();
        let hp = CosetProgression::from_gap(sym(&g, &[1], &[4]));
        let x = ints(&g, &[0, 1, 2]);
        let out = divide_progression(&hp, 2, &x).unwrap();
        assert_eq!(out.gap().upper(), &[4]);

        let hp = CosetProgression::from_gap(sym(&g, &[1], &[8]));
        let out = divide_progression(&hp, 8, &ints(&g, &[0, 1])).unwrap();
        assert_eq!(out.gap().upper(), &[2]);

        let hp = CosetProgression::from_gap(sym(&g, &[1, 100], &[4, 4]));
        let x = ints(&g, &[0, 1, 100]);
        let out = divide_progression(&hp, 4, &x).unwrap();
        assert_eq!(out.gap().upper(), &[2, 2]);
        let inside = out.elements().unwrap();
        assert!(x.iter().all(|e| inside.contains(e)));
    }

    #[test]
    fn divide_drops_dead_directions() {
        let g = z();
        let hp = CosetProgression::from_gap(sym(&g, &[1, 1000], &[8, 1]));
        let out = divide_progression(&hp, 4, &ints(&g, &[0, 1, 2])).unwrap();
        assert_eq!(out.rank(), 1);
        assert_eq!(out.gap().upper(), &[4]);
    }

    #[test]
    fn divide_error_paths() {
        let g = z();
        let hp = CosetProgression::from_gap(sym(&g, &[1], &[4]));
        assert_eq!(divide_progression(&hp, 2, &ints(&g, &[1, 2])), Err(Error::ZeroNotInSet));
        assert!(matches!(
            divide_progression(&hp, 2, &ints(&g, &[0, 3])),
            Err(Error::ContainmentFailed(_))
        ));
        let z6 = AbelianGroup::cyclic(6).unwrap();
        let hp = CosetProgression::from_gap(sym(&z6, &[2], &[1]));
        assert_eq!(divide_progression(&hp, 1, &ints(&z6, &[0])), Err(Error::NotTwoProper));
    }

    #[test]
    fn divided_size_bound_can_exceed_two_over_k() {
        // k = 3, N = 3: the kept direction has 2*floor(6/3)+1 = 5 elements,
        // more than (2/k)(2N+1) = 14/3.
        let g = z();
        let hp = CosetProgression::from_gap(sym(&g, &[1], &[3]));
        let out = divide_progression(&hp, 3, &ints(&g, &[0, 1])).unwrap();
        let size = out.elements().unwrap().len() as u128;
        assert_eq!(size, 5);
        assert!(3 * size > 2 * 7);
        let (num, den) = divided_size_bound(&hp, 3);
        assert!(size * den <= num);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn dilate_equals_iterated_sum(g1 in 1i64..12, g2 in 13i64..60, n1 in 0i64..3, n2 in 0i64..3, t in 1u32..4) {
                let g = z();
                let p = sym(&g, &[g1, g2], &[n1, n2]);
                prop_assume!(p.is_proper().unwrap());
                let lhs = p.dilate(t).unwrap().elements().unwrap();
                let rhs = iterated_sumset(&g, &p.elements().unwrap(), t).unwrap();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn cardinality_vs_volume(q in 2u64..30, g1 in 0i64..30, g2 in 0i64..30, n1 in 0i64..4, n2 in 0i64..4) {
                let zq = AbelianGroup::cyclic(q).unwrap();
                let hp = CosetProgression::from_gap(sym(&zq, &[g1, g2], &[n1, n2]));
                let size = hp.elements().unwrap().len() as u128;
                prop_assert!(size <= hp.nominal_size());
                prop_assert_eq!(size == hp.nominal_size(), hp.is_proper().unwrap());
            }

            #[test]
            fn divide_contains_x(n in 1i64..12, k in 1u32..6, raw in prop::collection::vec(-20i64..20, 1..5)) {
                let g = z();
                let hp = CosetProgression::from_gap(sym(&g, &[1], &[n]));
                let reach = n / k as i64;
                let scaled: Vec<i64> = raw.iter().map(|r| r % (reach + 1)).collect();
                let mut x = ints(&g, &scaled);
                x.insert(g.zero());
                let out = divide_progression(&hp, k, &x).unwrap();
                let inside = out.elements().unwrap();
                prop_assert!(x.iter().all(|e| inside.contains(e)));
                let (num, den) = divided_size_bound(&hp, k);
                prop_assert!(inside.len() as u128 * den <= num);
            }
        }
    }
}
