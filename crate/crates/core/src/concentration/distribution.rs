use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{CheckedAdd, CheckedMul, Zero};

use super::{binomial, StepLaw, WeightMultiset};
use crate::error::{invalid, Error, Result};
use crate::group::{AbelianGroup, GroupElement, IndexArith};

/// Largest number of integer positions a walk over `Z` may occupy.
pub const WINDOW_CAP: u64 = 10_000_000;

/// Exact law of a walk: integer weights over a common denominator, indexed by
/// canonical element order (finite groups) or by `offset + i` (over `Z`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    group: AbelianGroup,
    offset: i64,
    weights: Vec<BigUint>,
    den: BigUint,
}

/// A supremum together with its smallest witness in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extremum {
    pub value: BigRational,
    pub witness: GroupElement,
}

impl Distribution {
    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn den(&self) -> &BigUint {
        &self.den
    }

    pub fn weights(&self) -> &[BigUint] {
        &self.weights
    }

    /// Value at position 0 (always 0 for finite groups).
    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn element_at(&self, i: usize) -> GroupElement {
        if self.group.is_torsion_free() {
            GroupElement(vec![self.offset + i as i64])
        } else {
            self.group.element_at(i)
        }
    }

    fn position(&self, x: &GroupElement) -> Option<usize> {
        if !self.group.contains(x) {
            return None;
        }
        if self.group.is_torsion_free() {
            let i = x.scalar() - self.offset;
            (0..self.weights.len() as i64).contains(&i).then_some(i as usize)
        } else {
            Some(self.group.index_of(x))
        }
    }

    pub fn prob(&self, x: &GroupElement) -> BigRational {
        let w = self.position(x).map(|i| self.weights[i].clone()).unwrap_or_default();
        BigRational::new(w.into(), self.den.clone().into())
    }

    /// Nonzero point masses in canonical order.
    pub fn support(&self) -> Vec<(GroupElement, BigRational)> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| !w.is_zero())
            .map(|(i, w)| (self.element_at(i), BigRational::new(w.clone().into(), self.den.clone().into())))
            .collect()
    }

    pub fn is_normalized(&self) -> bool {
        self.weights.iter().sum::<BigUint>() == self.den
    }

    pub fn to_f64(&self) -> Vec<f64> {
        let den = big_to_f64(&self.den);
        self.weights.iter().map(|w| big_to_f64(w) / den).collect()
    }

    /// Largest point probability.
    pub fn max_point(&self) -> Extremum {
        let mut best = 0usize;
        for (i, w) in self.weights.iter().enumerate() {
            if *w > self.weights[best] {
                best = i;
            }
        }
        Extremum {
            value: BigRational::new(self.weights[best].clone().into(), self.den.clone().into()),
            witness: self.element_at(best),
        }
    }

    /// `sup_a |P(a) - 1/|G||` over a finite group.
    pub fn sup_discrepancy(&self) -> Result<Extremum> {
        let order = self.group.order_or_err()?;
        let g = BigUint::from(order);
        let gap = |w: &BigUint| {
            let s = w * &g;
            if s >= self.den {
                s - &self.den
            } else {
                &self.den - s
            }
        };
        let mut best = 0usize;
        let mut best_gap = gap(&self.weights[0]);
        for (i, w) in self.weights.iter().enumerate().skip(1) {
            let d = gap(w);
            if d > best_gap {
                best = i;
                best_gap = d;
            }
        }
        Ok(Extremum {
            value: BigRational::new(best_gap.into(), (&self.den * g).into()),
            witness: self.element_at(best),
        })
    }
}

pub(crate) fn big_to_f64(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_string().parse().unwrap_or(f64::INFINITY);
    }
    let shift = bits - 900;
    let top: BigUint = x >> shift as usize;
    top.to_string().parse::<f64>().unwrap_or(f64::INFINITY) * 2f64.powi(shift as i32)
}

trait Weight: Clone + Zero + CheckedAdd + CheckedMul + From<u64> {
    fn into_big(self) -> BigUint;
}

impl Weight for u128 {
    fn into_big(self) -> BigUint {
        BigUint::from(self)
    }
}

impl Weight for BigUint {
    fn into_big(self) -> BigUint {
        self
    }
}

fn to_big<W: Weight>(v: Vec<W>) -> Vec<BigUint> {
    v.into_iter().map(Weight::into_big).collect()
}

/// A block of `count` identical independent steps.
struct Block<P> {
    shifts: Vec<(P, u64)>,
    count: u64,
}

fn merge<P: Ord + Copy>(mut shifts: Vec<(P, u64)>) -> Vec<(P, u64)> {
    shifts.sort();
    let mut out: Vec<(P, u64)> = Vec::with_capacity(shifts.len());
    for (p, w) in shifts {
        match out.last_mut() {
            Some((q, v)) if *q == p => *v += w,
            _ => out.push((p, w)),
        }
    }
    out
}

fn run_finite<W: Weight>(ar: &IndexArith, blocks: &[Block<usize>]) -> Option<Vec<W>> {
    let n = ar.order;
    let mut cur = vec![W::zero(); n];
    cur[0] = W::from(1);
    let mut next = vec![W::zero(); n];
    let weights: Vec<Vec<(usize, W)>> = blocks
        .iter()
        .map(|b| b.shifts.iter().map(|&(s, w)| (s, W::from(w))).collect())
        .collect();
    for (block, shifts) in blocks.iter().zip(&weights) {
        for _ in 0..block.count {
            next.iter_mut().for_each(|x| *x = W::zero());
            for (i, x) in cur.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (s, w) in shifts {
                    let j = ar.add(i, *s);
                    next[j] = next[j].checked_add(&x.checked_mul(w)?)?;
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
    }
    Some(cur)
}

fn run_int<W: Weight>(blocks: &[Block<i64>]) -> Option<(i64, Vec<W>)> {
    let mut lo = 0i64;
    let mut cur = vec![W::from(1)];
    for block in blocks {
        let smin = block.shifts.iter().map(|s| s.0).min().unwrap_or(0);
        let smax = block.shifts.iter().map(|s| s.0).max().unwrap_or(0);
        let shifts: Vec<(usize, W)> = block.shifts.iter().map(|&(s, w)| ((s - smin) as usize, W::from(w))).collect();
        for _ in 0..block.count {
            let mut next = vec![W::zero(); cur.len() + (smax - smin) as usize];
            for (i, x) in cur.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (s, w) in &shifts {
                    let j = i + s;
                    next[j] = next[j].checked_add(&x.checked_mul(w)?)?;
                }
            }
            lo += smin;
            cur = next;
        }
    }
    Some((lo, cur))
}

fn int_width(blocks: &[Block<i64>]) -> u128 {
    blocks
        .iter()
        .map(|b| {
            let smin = b.shifts.iter().map(|s| s.0).min().unwrap_or(0);
            let smax = b.shifts.iter().map(|s| s.0).max().unwrap_or(0);
            (smax - smin) as u128 * b.count as u128
        })
        .sum()
}

fn trim(group: AbelianGroup, mut offset: i64, mut weights: Vec<BigUint>, den: BigUint) -> Distribution {
    if group.is_torsion_free() {
        let first = weights.iter().position(|w| !w.is_zero()).unwrap_or(0);
        let last = weights.iter().rposition(|w| !w.is_zero()).unwrap_or(0);
        weights = weights[first..=last].to_vec();
        offset += first as i64;
    }
    Distribution { group, offset, weights, den }
}

fn convolve(group: &AbelianGroup, blocks: Vec<(Vec<(GroupElement, u64)>, u64)>, den: BigUint) -> Result<Distribution> {
    if group.is_torsion_free() {
        let blocks: Vec<Block<i64>> = blocks
            .into_iter()
            .map(|(s, count)| Block { shifts: merge(s.into_iter().map(|(x, w)| (x.scalar(), w)).collect()), count })
            .collect();
        let width = int_width(&blocks);
        if width >= WINDOW_CAP as u128 {
            return Err(Error::Resource(format!("walk window of {width} positions exceeds {WINDOW_CAP}")));
        }
        let (lo, w) = match run_int::<u128>(&blocks) {
            Some((lo, w)) => (lo, to_big(w)),
            None => run_int::<BigUint>(&blocks).map(|(lo, w)| (lo, to_big(w))).expect("big integers do not overflow"),
        };
        return Ok(trim(group.clone(), lo, w, den));
    }
    let ar = group.arith()?;
    let blocks: Vec<Block<usize>> = blocks
        .into_iter()
        .map(|(s, count)| Block {
            shifts: merge(s.into_iter().map(|(x, w)| (group.index_of(&x), w)).collect()),
            count,
        })
        .collect();
    let w = match run_finite::<u128>(&ar, &blocks) {
        Some(w) => to_big(w),
        None => to_big(run_finite::<BigUint>(&ar, &blocks).expect("big integers do not overflow")),
    };
    Ok(trim(group.clone(), 0, w, den))
}

/// Exact law of `S = sum_i a_i x_i` with i.i.d. coefficients drawn from `law`.
pub fn walk_distribution(a: &WeightMultiset, law: StepLaw) -> Result<Distribution> {
    let (coeffs, den) = law.coefficient_weights()?;
    let group = a.group();
    let blocks = a
        .items()
        .iter()
        .map(|(x, mult)| (coeffs.iter().map(|&(c, w)| (group.scale(x, c), w)).collect(), *mult))
        .collect();
    convolve(group, blocks, num_traits::pow(BigUint::from(den), a.n() as usize))
}

/// Exact law of `X_1 + ... + X_m` with `X_j` uniform on the multiset `A`.
pub fn word_walk_distribution(a: &WeightMultiset, m: u64) -> Result<Distribution> {
    if m == 0 {
        return invalid("word walks need m >= 1");
    }
    let step: Vec<(GroupElement, u64)> = a.items().to_vec();
    convolve(a.group(), vec![(step, m)], num_traits::pow(BigUint::from(a.n()), m as usize))
}

fn subset_dp<W: Weight>(positions: &[usize], width: usize, m: usize, add: impl Fn(usize, usize) -> usize) -> Option<Vec<W>> {
    let mut dp: Vec<Vec<W>> = vec![vec![W::zero(); width]; m + 1];
    dp[0][0] = W::from(1);
    for (i, &p) in positions.iter().enumerate() {
        for c in (1..=m.min(i + 1)).rev() {
            let (lower, upper) = dp.split_at_mut(c);
            let prev = &lower[c - 1];
            let row = &mut upper[0];
            for (s, x) in prev.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let j = add(s, p);
                row[j] = row[j].checked_add(x)?;
            }
        }
    }
    dp.pop()
}

/// Numbers of `m`-subsets of indices by their sum, over `binom(n, m)`.
pub(crate) fn subset_sum_counts(a: &WeightMultiset, m: u64) -> Result<Distribution> {
    let n = a.n();
    if m == 0 || m > n {
        return invalid(format!("m = {m} must lie in [1, n = {n}]"));
    }
    let group = a.group();
    let den = binomial(n, m);
    let xs = a.expanded();
    let m = m as usize;
    if group.is_torsion_free() {
        // shift every entry by c >= 0 so positions are nonnegative; an m-subset
        // sum s then sits at position s + m c
        let c = -xs.iter().map(|x| x.scalar()).min().unwrap_or(0).min(0);
        let pos: Vec<usize> = xs.iter().map(|x| (x.scalar() + c) as usize).collect();
        let top = pos.iter().copied().max().unwrap_or(0) as u64;
        let width = top.saturating_mul(m as u64) + 1;
        if width.saturating_mul(m as u64 + 1) > 40 * WINDOW_CAP {
            return Err(Error::Resource("subset-sum table too large".into()));
        }
        let add = |s: usize, p: usize| s + p;
        let w = match subset_dp::<u128>(&pos, width as usize, m, add) {
            Some(w) => to_big(w),
            None => to_big(subset_dp::<BigUint>(&pos, width as usize, m, add).expect("no overflow")),
        };
        return Ok(trim(group.clone(), -(m as i64) * c, w, den));
    }
    let ar = group.arith()?;
    let pos: Vec<usize> = xs.iter().map(|x| group.index_of(x)).collect();
    let add = |s: usize, p: usize| ar.add(s, p);
    let w = match subset_dp::<u128>(&pos, ar.order, m, add) {
        Some(w) => to_big(w),
        None => to_big(subset_dp::<BigUint>(&pos, ar.order, m, add).expect("no overflow")),
    };
    Ok(trim(group.clone(), 0, w, den))
}
