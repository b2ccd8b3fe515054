use std::f64::consts::TAU;

use num_bigint::BigUint;
use num_integer::Roots;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::certificate::{int, ExpLower};
use super::Mode;
use crate::concentration::{check_alpha, WeightMultiset};
use crate::error::{invalid, Error, Result};
use crate::group::{dist_units, AbelianGroup, GroupElement, IndexArith};

/// Largest group on which level and dual sets are evaluated.
pub const PIPELINE_GROUP_CAP: u64 = 250_000;

/// Character values `zeta . a` on a finite group, indexed by canonical order.
pub(crate) struct Characters {
    group: AbelianGroup,
    l: u64,
    cyclic: Option<u64>,
    elems: Vec<GroupElement>,
    pub ar: IndexArith,
}

impl Characters {
    pub fn new(group: &AbelianGroup) -> Result<Self> {
        let order = group.order_or_err()?;
        if order > PIPELINE_GROUP_CAP {
            return Err(Error::Resource(format!("|G| = {order} exceeds the pipeline cap {PIPELINE_GROUP_CAP}")));
        }
        let cyclic = (group.factors().len() == 1).then_some(order);
        let elems = if cyclic.is_some() { Vec::new() } else { group.elements()?.collect() };
        Ok(Characters { group: group.clone(), l: group.exponent()?, cyclic, elems, ar: group.arith()? })
    }

    pub fn order(&self) -> usize {
        self.ar.order
    }

    /// `4 L^2`: the denominator of squared distances.
    pub fn scale(&self) -> u128 {
        4 * self.l as u128 * self.l as u128
    }

    #[inline]
    fn num(&self, z: usize, a: usize) -> u64 {
        match self.cyclic {
            Some(q) => (z as u64 * a as u64) % q,
            None => self.group.pairing_num(&self.elems[z], &self.elems[a], self.l),
        }
    }

    /// `||zeta . a (+ 1/2)||^2` in units of `1 / 4L^2`.
    #[inline]
    pub fn dist2(&self, z: usize, a: usize, shifted: bool) -> u128 {
        let d = dist_units(self.num(z, a), self.l, shifted) as u128;
        d * d
    }

    pub fn cos(&self, z: usize, a: usize) -> f64 {
        (TAU * self.num(z, a) as f64 / self.l as f64).cos()
    }

    /// Level statistic of every `zeta` as numerators over `4 L^2`.
    pub fn statistics(&self, items: &[(usize, u64)], shifted: bool) -> Vec<u128> {
        (0..self.order())
            .map(|z| items.iter().map(|&(a, m)| m as u128 * self.dist2(z, a, shifted)).sum())
            .collect()
    }

    pub fn element(&self, idx: usize) -> GroupElement {
        self.group.element_at(idx)
    }
}

pub(crate) fn indexed_items(a: &WeightMultiset) -> Vec<(usize, u64)> {
    a.items().iter().map(|(x, m)| (a.group().index_of(x), *m)).collect()
}

fn indices_of(group: &AbelianGroup, xs: &[GroupElement]) -> Result<Vec<usize>> {
    xs.iter()
        .map(|x| {
            if group.contains(x) {
                Ok(group.index_of(x))
            } else {
                Err(Error::GroupMismatch(format!("{x} is not an element of {group}")))
            }
        })
        .collect()
}

/// The nested level sets `S_l = { zeta : c * sum_i ||a_i . zeta (+ 1/2)||^2 <= l }`,
/// possibly restricted to a branch of the group.
#[derive(Clone, Debug)]
pub struct LevelSetFamily {
    group: AbelianGroup,
    coefficient: Ratio<u64>,
    shifted: bool,
    stats: Vec<u128>,
    scale: u128,
    /// Smallest `l >= 1` with `zeta` in `S_l`; 0 outside the branch.
    levels: Vec<u64>,
    cumulative: Vec<u64>,
}

impl LevelSetFamily {
    pub fn new(a: &WeightMultiset, coefficient: Ratio<u64>, shifted: bool) -> Result<Self> {
        let chars = Characters::new(a.group())?;
        let stats = chars.statistics(&indexed_items(a), shifted);
        Ok(Self::from_stats(a.group().clone(), coefficient, shifted, stats, chars.scale(), |_| true))
    }

    pub(crate) fn from_stats(
        group: AbelianGroup,
        coefficient: Ratio<u64>,
        shifted: bool,
        stats: Vec<u128>,
        scale: u128,
        keep: impl Fn(usize) -> bool,
    ) -> Self {
        let (cn, cd) = (*coefficient.numer() as u128, *coefficient.denom() as u128);
        let levels: Vec<u64> = stats
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                if !keep(i) {
                    0
                } else {
                    let q = cd * scale;
                    (cn * s).div_ceil(q).max(1) as u64
                }
            })
            .collect();
        let top = levels.iter().copied().max().unwrap_or(0) as usize;
        let mut cumulative = vec![0u64; top + 1];
        for &l in levels.iter().filter(|&&l| l > 0) {
            cumulative[l as usize] += 1;
        }
        for l in 1..cumulative.len() {
            cumulative[l] += cumulative[l - 1];
        }
        LevelSetFamily { group, coefficient, shifted, stats, scale, levels, cumulative }
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn coefficient(&self) -> Ratio<u64> {
        self.coefficient
    }

    pub fn shifted(&self) -> bool {
        self.shifted
    }

    /// Exact statistic of the `idx`-th element, as a numerator over [`Self::scale`].
    pub fn statistic(&self, idx: usize) -> u128 {
        self.stats[idx]
    }

    pub fn scale(&self) -> u128 {
        self.scale
    }

    /// Level from which on every branch element belongs to `S_l`.
    pub fn max_level(&self) -> u64 {
        self.cumulative.len().saturating_sub(1) as u64
    }

    pub fn branch_size(&self) -> u64 {
        self.cumulative.last().copied().unwrap_or(0)
    }

    pub fn size(&self, l: u64) -> u64 {
        if l as usize >= self.cumulative.len() {
            self.branch_size()
        } else {
            self.cumulative[l as usize]
        }
    }

    pub fn indices(&self, l: u64) -> Vec<usize> {
        (0..self.levels.len()).filter(|&i| self.levels[i] != 0 && self.levels[i] <= l).collect()
    }

    pub fn members(&self, l: u64) -> Vec<GroupElement> {
        self.indices(l).into_iter().map(|i| self.group.element_at(i)).collect()
    }

    /// Fixed-point lower bound of `sum_{l >= 1} e^{-2(l-1)} |S_l|`, truncated
    /// at the level where the sets stabilise.
    pub(crate) fn level_sum_lower(&self, exp: &ExpLower) -> BigUint {
        (1..=self.max_level()).map(|l| BigUint::from(self.size(l)) * exp.neg(2 * (l - 1))).sum()
    }

    /// Level up to which the pigeonhole search can possibly need to run.
    pub(crate) fn search_horizon(&self, target: &BigRational) -> u64 {
        let ln_target = approx_ln(target);
        let ln_b = (self.branch_size().max(1) as f64).ln();
        let beyond = (2.0 + ln_b - ln_target).ceil().max(0.0) as u64 + 2;
        self.max_level().max(beyond).max(1)
    }

    /// Smallest `l` with a certified `|S_l| e^{2-l} >= target`.
    pub(crate) fn pigeonhole_level(&self, target: &BigRational, exp: &ExpLower) -> Option<u64> {
        (1..=exp.max_j() + 2).find(|&l| exp.at_least(&(BigUint::from(self.size(l)) * exp.pigeonhole_weight(l)), target))
    }
}

fn approx_ln(x: &BigRational) -> f64 {
    if let Some(v) = x.to_f64().filter(|v| *v > 0.0 && v.is_finite()) {
        return v.ln();
    }
    let bits = x.numer().bits() as f64 - x.denom().bits() as f64;
    bits * std::f64::consts::LN_2
}

fn four_alpha(alpha: Ratio<u64>) -> Result<Ratio<u64>> {
    check_alpha(alpha)?;
    Ok(alpha * 4)
}

/// `S_l = { zeta : 4 alpha sum_i ||a_i . zeta (+ 1/2)||^2 <= l }`.
pub fn level_set(a: &WeightMultiset, alpha: Ratio<u64>, l: u64, shifted: bool) -> Result<Vec<GroupElement>> {
    if l == 0 {
        return invalid("level must be at least 1");
    }
    Ok(LevelSetFamily::new(a, four_alpha(alpha)?, shifted)?.members(l))
}

/// Smallest `l0` with `|S_l0| e^{2 - l0} >= rho |G|` (`rho |G| / 2` for the
/// shifted statistic), certified with rational bounds on `e`.
pub fn find_l0(
    a: &WeightMultiset,
    alpha: Ratio<u64>,
    rho: &BigRational,
    shifted: bool,
) -> Result<(u64, Vec<GroupElement>)> {
    if !rho.is_positive() {
        return invalid("rho must be positive");
    }
    let family = LevelSetFamily::new(a, four_alpha(alpha)?, shifted)?;
    let order = a.group().order_or_err()?;
    let mut target = rho * int(order);
    if shifted {
        target /= int(2);
    }
    let exp = ExpLower::new(family.search_horizon(&target));
    let l0 = family
        .pigeonhole_level(&target, &exp)
        .ok_or_else(|| Error::InvalidArgument("no level satisfies the pigeonhole inequality".into()))?;
    Ok((l0, family.members(l0)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AveragingSplit {
    pub kept: Vec<(GroupElement, u64)>,
    pub exceptional: Vec<(GroupElement, u64)>,
    /// `sum_i sum_{zeta in S} ||a_i . zeta||^2` as a numerator over `4 L^2`.
    pub total: u128,
}

pub(crate) struct IndexSplit {
    pub kept: Vec<(usize, u64)>,
    pub exceptional: Vec<(usize, u64)>,
    pub total: u128,
}

pub(crate) fn split_indices(
    chars: &Characters,
    items: &[(usize, u64)],
    s: &[usize],
    coefficient: Ratio<u64>,
    l0: u64,
    n_prime: u64,
    shifted: bool,
) -> IndexSplit {
    let (cn, cd) = (*coefficient.numer() as u128, *coefficient.denom() as u128);
    let bound = l0 as u128 * s.len() as u128 * chars.scale() * cd;
    let mut out = IndexSplit { kept: Vec::new(), exceptional: Vec::new(), total: 0 };
    for &(a, m) in items {
        let t: u128 = s.iter().map(|&z| chars.dist2(z, a, shifted)).sum();
        out.total += m as u128 * t;
        if t * cn * n_prime as u128 <= bound {
            out.kept.push((a, m));
        } else {
            out.exceptional.push((a, m));
        }
    }
    out
}

/// Splits `A` into the elements with `sum_{zeta in S} ||a . zeta||^2 <= l0 |S| / (c n')`
/// and the exceptional rest, where `c` is the level-set coefficient.
pub fn averaging_split(
    a: &WeightMultiset,
    s: &[GroupElement],
    coefficient: Ratio<u64>,
    l0: u64,
    n_prime: u64,
    shifted: bool,
) -> Result<AveragingSplit> {
    if n_prime == 0 || n_prime > a.n() {
        return invalid(format!("n' = {n_prime} must lie in [1, {}]", a.n()));
    }
    let chars = Characters::new(a.group())?;
    let s = indices_of(a.group(), s)?;
    let sp = split_indices(&chars, &indexed_items(a), &s, coefficient, l0, n_prime, shifted);
    let back = |v: Vec<(usize, u64)>| v.into_iter().map(|(i, m)| (chars.element(i), m)).collect();
    Ok(AveragingSplit { kept: back(sp.kept), exceptional: back(sp.exceptional), total: sp.total })
}

pub(crate) fn dual_indices(chars: &Characters, s: &[usize], shifted: bool) -> Vec<usize> {
    let bound = s.len() as u128 * chars.scale();
    (0..chars.order())
        .filter(|&a| {
            let mut acc = 0u128;
            for &z in s {
                acc += 200 * chars.dist2(z, a, shifted);
                if acc > bound {
                    return false;
                }
            }
            true
        })
        .collect()
}

/// `S* = { a : sum_{zeta in S} ||a . zeta (+ 1/2)||^2 <= |S| / 200 }`.
pub fn dual_set(group: &AbelianGroup, s: &[GroupElement], shifted: bool) -> Result<Vec<GroupElement>> {
    if s.is_empty() {
        return invalid("dual set of an empty level set");
    }
    let chars = Characters::new(group)?;
    let s = indices_of(group, s)?;
    Ok(dual_indices(&chars, &s, shifted).into_iter().map(|i| chars.element(i)).collect())
}

/// `sum_{a in G} T_a^2` with `T_a = sum_{zeta in S} cos(2 pi a . zeta)`, by
/// orthogonality: `|G| / 2 * (|S| + #{zeta in S : -zeta in S})`.
pub(crate) fn ta_square_sum(chars: &Characters, s: &[usize]) -> BigRational {
    let mut member = vec![false; chars.order()];
    for &z in s {
        member[z] = true;
    }
    let mirrored = s.iter().filter(|&&z| member[chars.ar.neg(z)]).count();
    int(chars.order() as u64) * int((s.len() + mirrored) as u64) / int(2)
}

pub(crate) fn ta_square_sum_float(chars: &Characters, s: &[usize]) -> f64 {
    (0..chars.order())
        .map(|a| {
            let t: f64 = s.iter().map(|&z| chars.cos(z, a)).sum();
            t * t
        })
        .sum()
}

/// `k = floor(sqrt(alpha n' / (D l0)))` with the mode's `alpha` and `D`.
pub fn choose_k(alpha: Ratio<u64>, n_prime: u64, l0: u64, mode: Mode) -> Result<u64> {
    check_alpha(alpha)?;
    if n_prime == 0 || l0 == 0 {
        return invalid("n' and l0 must be positive");
    }
    let one = Ratio::from_integer(1u64);
    let (eff, d): (Ratio<u128>, u128) = match mode {
        Mode::Abelian => (widen(alpha.min(one - alpha)), 200),
        Mode::AbelianDoubled => (widen(alpha), 200),
        Mode::Word => (widen(alpha), 100),
        Mode::RhoStar => (rho_star_alpha(alpha), 200),
    };
    let x = eff.numer() * n_prime as u128 / (eff.denom() * d * l0 as u128);
    Ok(x.sqrt() as u64)
}

fn widen(r: Ratio<u64>) -> Ratio<u128> {
    Ratio::new(*r.numer() as u128, *r.denom() as u128)
}

/// `alpha' = alpha (1 - alpha) / 2`.
pub fn rho_star_alpha(alpha: Ratio<u64>) -> Ratio<u128> {
    let a = widen(alpha);
    a * (Ratio::from_integer(1) - a) / 2
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Containment {
    pub holds: bool,
    /// Multiple `l` and an element of `l A'` outside the relevant dual set.
    pub witness: Option<(u64, GroupElement)>,
}

pub(crate) fn containment_indices(
    ar: &IndexArith,
    a_prime: &[usize],
    k: u64,
    dual1: &[usize],
    dual2: Option<&[usize]>,
) -> Option<(u64, usize)> {
    let n = ar.order;
    let mask = |d: &[usize]| {
        let mut m = vec![false; n];
        for &x in d {
            m[x] = true;
        }
        m
    };
    let m1 = mask(dual1);
    let m2 = dual2.map(mask);
    let mut layer = vec![false; n];
    layer[0] = true;
    for l in 1..=k {
        let mut next = vec![false; n];
        for x in (0..n).filter(|&x| layer[x]) {
            for &a in a_prime {
                next[ar.add(x, a)] = true;
            }
        }
        layer = next;
        let target = match (&m2, l % 2) {
            (Some(m2), 1) => m2,
            _ => &m1,
        };
        if let Some(x) = (0..n).find(|&x| layer[x] && !target[x]) {
            return Some((l, x));
        }
    }
    None
}

/// Checks `l A' ⊆ S*` for `1 <= l <= k`. With a second (shifted) dual set,
/// even multiples are checked against the first and odd ones against the
/// second.
pub fn sumset_containment_check(
    group: &AbelianGroup,
    a_prime: &[GroupElement],
    k: u64,
    dual: &[GroupElement],
    dual_shifted: Option<&[GroupElement]>,
) -> Result<Containment> {
    let ar = group.arith()?;
    let mut ap = indices_of(group, a_prime)?;
    ap.sort_unstable();
    ap.dedup();
    let d1 = indices_of(group, dual)?;
    let d2 = dual_shifted.map(|d| indices_of(group, d)).transpose()?;
    let w = containment_indices(&ar, &ap, k, &d1, d2.as_deref());
    Ok(Containment { holds: w.is_none(), witness: w.map(|(l, x)| (l, group.element_at(x))) })
}
