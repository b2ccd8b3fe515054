//! Brute-force search for the smallest proper coset-progression covering a
//! finite set.
//!
//! For each subgroup `H` (smallest first) the search works in `G/H`, draws
//! generators from popular differences of `X`, and for every generator tuple
//! grows the leading bounds while the last bound is read off a table of
//! minimal multiples.

use std::collections::{HashMap, HashSet};

use num_integer::Integer;

use super::{CosetProgression, ElementSet, Gap, ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::group::{subgroup_indices, AbelianGroup, GroupElement, IndexArith, SUBGROUP_ENUMERATION_CAP};

/// Largest `|X|` accepted by the search.
pub const SEARCH_CAP: usize = 5_000;

const POOL_CAP: usize = 200;
const SUPPLEMENT_BASE: usize = 20;
const UNSET: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct CoverOptions {
    pub max_rank: usize,
    pub require_symmetric: bool,
    /// Covers must be `t`-proper for this `t`.
    pub properness: u32,
    /// Work units (table lookups and enumerated combinations) before giving up.
    pub budget: u64,
    /// Skip `H = G` (only meaningful for finite groups).
    pub exclude_full_group: bool,
    /// Only report covers of at most this many elements.
    pub size_limit: Option<u128>,
    /// Number of translation anchors tried when symmetry is not required.
    pub max_anchors: usize,
}

impl Default for CoverOptions {
    fn default() -> Self {
        CoverOptions {
            max_rank: 2,
            require_symmetric: true,
            properness: 1,
            budget: 400_000_000,
            exclude_full_group: false,
            size_limit: None,
            max_anchors: 32,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CoverOutcome {
    /// Best cover, present only when the search ran to completion.
    pub cover: Option<CosetProgression>,
    /// Best cover seen before the budget ran out.
    pub partial: Option<CosetProgression>,
    pub budget_exhausted: bool,
    pub work: u64,
    pub diagnostic: String,
}

/// Smallest proper cover of `X` of rank at most `max_rank` found within the
/// default budget.
pub fn minimal_cover(
    group: &AbelianGroup,
    xs: &ElementSet,
    max_rank: usize,
    require_symmetric: bool,
) -> Result<Option<CosetProgression>> {
    let opts = CoverOptions { max_rank, require_symmetric, ..CoverOptions::default() };
    Ok(search_cover(group, xs, &opts)?.cover)
}

pub fn search_cover(group: &AbelianGroup, xs: &ElementSet, opts: &CoverOptions) -> Result<CoverOutcome> {
    if xs.is_empty() {
        return Err(Error::InvalidArgument("cannot cover the empty set".into()));
    }
    if xs.len() > SEARCH_CAP {
        return Err(Error::Resource(format!("|X| = {} exceeds the search cap {SEARCH_CAP}", xs.len())));
    }
    if let Some(x) = xs.iter().find(|x| !group.contains(x)) {
        return Err(Error::GroupMismatch(format!("{x} is not an element of {group}")));
    }
    if opts.properness == 0 {
        return Err(Error::InvalidArgument("properness factor must be positive".into()));
    }
    let zero = group.zero();
    if opts.require_symmetric && !xs.contains(&zero) {
        return Err(Error::ZeroNotInSet);
    }
    if group.is_torsion_free() && xs.iter().any(|x| x.scalar().unsigned_abs() > 1 << 40) {
        return Err(Error::Resource("integer coordinates above 2^40".into()));
    }

    let anchors: Vec<GroupElement> = if opts.require_symmetric {
        vec![zero.clone()]
    } else {
        let mut a: Vec<GroupElement> = xs.iter().take(opts.max_anchors.max(1)).cloned().collect();
        if xs.contains(&zero) && !a.contains(&zero) {
            a.insert(0, zero.clone());
        }
        a
    };

    let mut diagnostic = String::new();
    let mut search = Searcher::new(group, opts);

    let subgroups: Vec<Vec<usize>> = match group.order() {
        None => vec![vec![0]],
        Some(n) if n <= SUBGROUP_ENUMERATION_CAP => subgroup_indices(group, n as usize)?,
        Some(n) => {
            diagnostic.push_str("group too large for subgroup enumeration; only H = {0} and H = G searched; ");
            vec![vec![0], (0..n as usize).collect()]
        }
    };
    if let Some(n) = group.order() {
        search.limit = search.limit.min(n as u128);
    } else {
        for anchor in &anchors {
            let d = xs.iter().fold(0i64, |acc, x| acc.gcd(&(x.scalar() - anchor.scalar())));
            if d != 0 {
                let reach = xs.iter().map(|x| ((x.scalar() - anchor.scalar()) / d).abs()).max().unwrap_or(0);
                search.limit = search.limit.min(2 * reach as u128 + 1);
            }
        }
    }

    'outer: for h in &subgroups {
        let h_size = h.len() as u128;
        if opts.exclude_full_group && group.order() == Some(h.len() as u64) {
            continue;
        }
        if h_size > search.limit {
            break;
        }
        let space = Space::new(group, h)?;
        let h_elems: Vec<GroupElement> = match group.order() {
            None => vec![zero.clone()],
            Some(_) => h.iter().map(|&i| group.element_at(i)).collect(),
        };
        for anchor in &anchors {
            let ctx = Context::new(group, space.clone(), h_elems.clone(), anchor.clone(), xs);
            for r in 0..=opts.max_rank {
                search.search_rank(&ctx, r);
                if search.exhausted {
                    break 'outer;
                }
            }
        }
    }

    let best = search.best.take().map(|c| c.into_progression(group));
    if search.exhausted {
        diagnostic.push_str(&format!("budget of {} work units exhausted", opts.budget));
    } else if best.is_none() {
        diagnostic.push_str("no cover within the searched space");
    }
    let (cover, partial) = if search.exhausted { (None, best) } else { (best, None) };
    Ok(CoverOutcome { cover, partial, budget_exhausted: search.exhausted, work: search.work, diagnostic })
}

/// `Z`, or the quotient `G/H` addressed by element indices.
#[derive(Clone)]
enum Space {
    Int,
    Quot { ar: IndexArith, rep: Vec<u32>, cosets: u128 },
}

impl Space {
    fn new(group: &AbelianGroup, h: &[usize]) -> Result<Space> {
        if group.is_torsion_free() {
            return Ok(Space::Int);
        }
        let ar = group.arith()?;
        let n = ar.order;
        let mut rep = vec![UNSET; n];
        for a in 0..n {
            if rep[a] == UNSET {
                for &x in h {
                    rep[ar.add(a, x)] = a as u32;
                }
            }
        }
        let cosets = (n / h.len()) as u128;
        Ok(Space::Quot { ar, rep, cosets })
    }

    #[inline]
    fn sub(&self, a: i64, b: i64) -> i64 {
        match self {
            Space::Int => a - b,
            Space::Quot { ar, .. } => ar.sub(a as usize, b as usize) as i64,
        }
    }

    #[inline]
    fn add(&self, a: i64, b: i64) -> i64 {
        match self {
            Space::Int => a + b,
            Space::Quot { ar, .. } => ar.add(a as usize, b as usize) as i64,
        }
    }

    #[inline]
    fn scale(&self, a: i64, k: i64) -> i64 {
        match self {
            Space::Int => a * k,
            Space::Quot { ar, .. } => ar.scale(a as usize, k) as i64,
        }
    }

    /// Representative of the coset `a + H`.
    #[inline]
    fn key(&self, a: i64) -> i64 {
        match self {
            Space::Int => a,
            Space::Quot { rep, .. } => rep[a as usize] as i64,
        }
    }

    /// Representative of `{g, -g} + H`.
    fn canon(&self, g: i64) -> i64 {
        match self {
            Space::Int => g.abs(),
            Space::Quot { .. } => self.key(g).min(self.key(self.scale(g, -1))),
        }
    }

    fn cosets(&self) -> Option<u128> {
        match self {
            Space::Int => None,
            Space::Quot { cosets, .. } => Some(*cosets),
        }
    }
}

struct Context {
    space: Space,
    h_elems: Vec<GroupElement>,
    h_size: u128,
    anchor: GroupElement,
    xs: Vec<i64>,
    pool: Vec<i64>,
}

impl Context {
    fn new(group: &AbelianGroup, space: Space, h_elems: Vec<GroupElement>, anchor: GroupElement, xs: &ElementSet) -> Self {
        let mut pts: Vec<i64> = xs
            .iter()
            .map(|x| {
                let d = group.sub(x, &anchor);
                let raw = if group.is_torsion_free() { d.scalar() } else { group.index_of(&d) as i64 };
                space.key(raw)
            })
            .collect();
        pts.sort_unstable();
        pts.dedup();
        let pool = build_pool(&space, &pts);
        let h_size = h_elems.len() as u128;
        Context { space, h_elems, h_size, anchor, xs: pts, pool }
    }
}

/// Nonzero classes of `X - X` up to sign, most frequent first, topped up with
/// sums and differences of the leaders (and the gcd over `Z`).
fn build_pool(space: &Space, xs: &[i64]) -> Vec<i64> {
    let mut freq: HashMap<i64, u64> = HashMap::new();
    for (i, &x) in xs.iter().enumerate() {
        for &y in &xs[i + 1..] {
            let d = space.canon(space.sub(x, y));
            if d != 0 {
                *freq.entry(d).or_default() += 1;
            }
        }
    }
    let mut ranked: Vec<(i64, u64)> = freq.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut pool: Vec<i64> = ranked.iter().take(POOL_CAP).map(|p| p.0).collect();
    let mut seen: HashSet<i64> = pool.iter().copied().collect();

    if let Space::Int = space {
        let d = xs.iter().fold(0i64, |acc, &x| acc.gcd(&x));
        if d != 0 && !seen.contains(&d) {
            if pool.len() == POOL_CAP {
                if let Some(last) = pool.pop() {
                    seen.remove(&last);
                }
            }
            pool.insert(0, d);
            seen.insert(d);
        }
    }

    let leaders: Vec<i64> = pool.iter().take(SUPPLEMENT_BASE).copied().collect();
    let mut extra = Vec::new();
    for (i, &a) in leaders.iter().enumerate() {
        for &b in &leaders[i + 1..] {
            for c in [space.add(a, b), space.sub(a, b)] {
                let c = space.canon(c);
                if c != 0 && seen.insert(c) {
                    extra.push(c);
                }
            }
        }
    }
    extra.sort_unstable();
    for c in extra {
        if pool.len() >= POOL_CAP {
            break;
        }
        pool.push(c);
    }
    pool
}

fn pool_size_for_rank(r: usize) -> usize {
    match r {
        0..=2 => POOL_CAP,
        3 => 40,
        _ => 16,
    }
}

#[derive(Clone, Debug)]
struct Candidate {
    size: u128,
    rank: usize,
    gens: Vec<GroupElement>,
    subgroup: Vec<GroupElement>,
    bounds: Vec<i64>,
    anchor: GroupElement,
}

impl Candidate {
    #[allow(clippy::type_complexity)]
    fn order_key(&self) -> (u128, usize, &[GroupElement], &[GroupElement], &[i64], &GroupElement) {
        (self.size, self.rank, &self.gens, &self.subgroup, &self.bounds, &self.anchor)
    }

    fn into_progression(self, group: &AbelianGroup) -> CosetProgression {
        let lower = self.bounds.iter().map(|b| -b).collect();
        let gap = Gap {
            group: group.clone(),
            base: self.anchor,
            generators: self.gens,
            lower,
            upper: self.bounds,
        };
        CosetProgression::from_parts(self.subgroup, gap)
    }
}

enum Table {
    Int { g: i64, bound: i64 },
    Dense,
}

struct Searcher<'a> {
    group: &'a AbelianGroup,
    opts: &'a CoverOptions,
    work: u64,
    exhausted: bool,
    best: Option<Candidate>,
    limit: u128,
    scratch: Vec<u32>,
    touched: Vec<usize>,
}

impl<'a> Searcher<'a> {
    fn new(group: &'a AbelianGroup, opts: &'a CoverOptions) -> Self {
        let n = group.order().unwrap_or(0) as usize;
        Searcher {
            group,
            opts,
            work: 0,
            exhausted: false,
            best: None,
            limit: opts.size_limit.unwrap_or(u128::MAX),
            scratch: vec![UNSET; n],
            touched: Vec::new(),
        }
    }

    fn charge(&mut self, units: u64) -> bool {
        self.work = self.work.saturating_add(units);
        if self.work > self.opts.budget {
            self.exhausted = true;
        }
        self.exhausted
    }

    fn vol_limit(&self, ctx: &Context) -> u128 {
        self.limit / ctx.h_size
    }

    fn search_rank(&mut self, ctx: &Context, r: usize) {
        if r == 0 {
            if ctx.xs.iter().all(|&x| x == 0) {
                self.consider(ctx, &[], &[]);
            }
            return;
        }
        let min_vol = 3u128.saturating_pow(r as u32);
        let m = ctx.pool.len().min(pool_size_for_rank(r));
        if m < r {
            return;
        }
        let mut idx: Vec<usize> = (0..r).collect();
        loop {
            if self.vol_limit(ctx) < min_vol {
                return;
            }
            let gens: Vec<i64> = idx.iter().map(|&i| ctx.pool[i]).collect();
            self.evaluate(ctx, &gens);
            if self.exhausted {
                return;
            }
            // next combination in lexicographic order
            let mut i = r;
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                if idx[i] < m - r + i {
                    break;
                }
                if i == 0 {
                    return;
                }
            }
            idx[i] += 1;
            for j in i + 1..r {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }

    fn build_table(&mut self, ctx: &Context, g: i64, bound: i64) -> Table {
        match &ctx.space {
            Space::Int => Table::Int { g, bound },
            Space::Quot { .. } => {
                for &t in &self.touched {
                    self.scratch[t] = UNSET;
                }
                self.touched.clear();
                let sp = &ctx.space;
                let mut pos = 0i64;
                let mut neg = 0i64;
                let mut m: i64 = 0;
                while m <= bound {
                    for v in [pos, neg] {
                        let k = sp.key(v) as usize;
                        if self.scratch[k] == UNSET {
                            self.scratch[k] = m as u32;
                            self.touched.push(k);
                        }
                    }
                    m += 1;
                    pos = sp.add(pos, g);
                    neg = sp.sub(neg, g);
                    if sp.key(pos) == 0 {
                        break;
                    }
                }
                self.work += m as u64;
                Table::Dense
            }
        }
    }

    #[inline]
    fn lookup(&self, ctx: &Context, table: &Table, y: i64) -> Option<i64> {
        match table {
            Table::Int { g, bound } => {
                if y % g == 0 {
                    let m = (y / g).abs();
                    (m <= *bound).then_some(m)
                } else {
                    None
                }
            }
            Table::Dense => {
                let t = self.scratch[ctx.space.key(y) as usize];
                (t != UNSET).then_some(t as i64)
            }
        }
    }

    fn evaluate(&mut self, ctx: &Context, gens: &[i64]) {
        let r = gens.len();
        let rest = 3u128.pow(r as u32 - 1);
        let mut bound = (self.vol_limit(ctx) / rest).saturating_sub(1) / 2;
        if let Some(c) = ctx.space.cosets() {
            bound = bound.min(c);
        }
        let bound = bound.min(i64::MAX as u128 / 4) as i64;
        if bound < 1 {
            return;
        }
        let table = self.build_table(ctx, gens[r - 1], bound);
        if r == 1 {
            self.charge(ctx.xs.len() as u64);
            let mut worst = 0i64;
            for &x in &ctx.xs {
                match self.lookup(ctx, &table, x) {
                    Some(m) => worst = worst.max(m),
                    None => return,
                }
            }
            if worst >= 1 {
                self.consider(ctx, gens, &[worst]);
            }
            return;
        }
        self.descend(ctx, gens, &table, 0, vec![0], 1, &mut Vec::new());
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &mut self,
        ctx: &Context,
        gens: &[i64],
        table: &Table,
        d: usize,
        combos: Vec<i64>,
        prod: u128,
        bounds: &mut Vec<i64>,
    ) {
        let r = gens.len();
        let sp = &ctx.space;
        if d + 2 == r {
            let g = gens[d];
            let mut cur: Vec<Option<i64>> = Vec::with_capacity(ctx.xs.len());
            for &x in &ctx.xs {
                let mut best: Option<i64> = None;
                for &c in &combos {
                    if let Some(m) = self.lookup(ctx, table, sp.sub(x, c)) {
                        best = Some(best.map_or(m, |b| b.min(m)));
                    }
                }
                cur.push(best);
            }
            if self.charge((ctx.xs.len() * combos.len()) as u64) {
                return;
            }
            let mut v: i64 = 1;
            while prod * (2 * v as u128 + 1) * 3 <= self.vol_limit(ctx) {
                let steps = [sp.scale(g, v), sp.scale(g, -v)];
                for (i, &x) in ctx.xs.iter().enumerate() {
                    for &c in &combos {
                        let base = sp.sub(x, c);
                        for &s in &steps {
                            if let Some(m) = self.lookup(ctx, table, sp.sub(base, s)) {
                                cur[i] = Some(cur[i].map_or(m, |b| b.min(m)));
                            }
                        }
                    }
                }
                if self.charge((2 * ctx.xs.len() * combos.len()) as u64) {
                    return;
                }
                if cur.iter().all(Option::is_some) {
                    let last = cur.iter().map(|m| m.unwrap_or(0)).max().unwrap_or(0);
                    if last >= 1 {
                        bounds.push(v);
                        bounds.push(last);
                        self.consider(ctx, gens, bounds);
                        bounds.truncate(bounds.len() - 2);
                    }
                }
                v += 1;
            }
            return;
        }
        let g = gens[d];
        let rest = 3u128.pow((r - 1 - d) as u32);
        let mut v: i64 = 1;
        while prod * (2 * v as u128 + 1) * rest <= self.vol_limit(ctx) {
            let mut next = Vec::with_capacity(combos.len() * (2 * v as usize + 1));
            for &c in &combos {
                for m in -v..=v {
                    next.push(sp.add(c, sp.scale(g, m)));
                }
            }
            bounds.push(v);
            self.descend(ctx, gens, table, d + 1, next, prod * (2 * v as u128 + 1), bounds);
            bounds.pop();
            if self.exhausted {
                return;
            }
            v += 1;
        }
    }

    fn to_element(&self, ctx: &Context, g: i64) -> GroupElement {
        match ctx.space {
            Space::Int => GroupElement(vec![g]),
            Space::Quot { .. } => self.group.element_at(g as usize),
        }
    }

    fn consider(&mut self, ctx: &Context, gens: &[i64], bounds: &[i64]) {
        let vol: u128 = bounds.iter().map(|&b| 2 * b as u128 + 1).product();
        let size = ctx.h_size * vol;
        if size > self.limit {
            return;
        }
        let mut pairs: Vec<(GroupElement, i64, i64)> = gens
            .iter()
            .zip(bounds)
            .map(|(&g, &b)| (self.to_element(ctx, ctx.space.canon(g)), b, g))
            .collect();
        pairs.sort();
        let cand = Candidate {
            size,
            rank: gens.len(),
            gens: pairs.iter().map(|p| p.0.clone()).collect(),
            subgroup: ctx.h_elems.clone(),
            bounds: pairs.iter().map(|p| p.1).collect(),
            anchor: ctx.anchor.clone(),
        };
        if let Some(best) = &self.best {
            if cand.order_key() >= best.order_key() {
                return;
            }
        }
        let raw: Vec<i64> = pairs.iter().map(|p| p.2).collect();
        if !self.is_t_proper(ctx, &raw, &cand.bounds) {
            return;
        }
        self.limit = size;
        self.best = Some(cand);
    }

    /// Distinct cosets for every coefficient vector of `P_t`.
    fn is_t_proper(&mut self, ctx: &Context, gens: &[i64], bounds: &[i64]) -> bool {
        let t = self.opts.properness as i64;
        let vol: u128 = bounds.iter().map(|&b| 2 * (b * t) as u128 + 1).product();
        if ctx.space.cosets().is_some_and(|c| vol > c) || vol > ENUMERATION_CAP {
            return false;
        }
        self.charge(vol as u64);
        let sp = &ctx.space;
        let mut pts = vec![0i64];
        for (&g, &b) in gens.iter().zip(bounds) {
            let b = b * t;
            let mut next = Vec::with_capacity(pts.len() * (2 * b as usize + 1));
            for &p in &pts {
                for m in -b..=b {
                    next.push(sp.add(p, sp.scale(g, m)));
                }
            }
            pts = next;
        }
        let mut seen = HashSet::with_capacity(pts.len());
        pts.into_iter().all(|p| seen.insert(sp.key(p)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(g: &AbelianGroup, xs: &[i64]) -> ElementSet {
        xs.iter().map(|&x| g.scalar(x).unwrap()).collect()
    }

    fn gens_of(hp: &CosetProgression) -> Vec<i64> {
        hp.gap().generators().iter().map(|g| g.scalar()).collect()
    }

    fn check(hp: &CosetProgression, xs: &ElementSet) {
        assert!(hp.is_proper().unwrap());
        let e = hp.elements().unwrap();
        assert!(xs.iter().all(|x| e.contains(x)));
        assert_eq!(e.len() as u128, hp.nominal_size());
    }

    /// Exhaustive smallest symmetric proper cover over Z with rank <= 2 and
    /// generators in `1..=gmax`.
    fn oracle_z(xs: &[i64], gmax: i64) -> u128 {
        let g = AbelianGroup::integers();
        let set = ints(&g, xs);
        if xs.iter().all(|&x| x == 0) {
            return 1;
        }
        let mut best = u128::MAX;
        let covers = |gens: &[i64], bounds: &[i64]| -> bool {
            let p = Gap::symmetric(
                g.clone(),
                gens.iter().map(|&x| g.scalar(x).unwrap()).collect(),
                bounds.to_vec(),
            )
            .unwrap();
            let e = p.elements().unwrap();
            set.iter().all(|x| e.contains(x)) && p.is_proper().unwrap()
        };
        for a in 1..=gmax {
            for n in 1..=gmax {
                if covers(&[a], &[n]) {
                    best = best.min(2 * n as u128 + 1);
                }
            }
        }
        for a in 1..=gmax {
            for b in a + 1..=gmax {
                for n1 in 1..=6 {
                    for n2 in 1..=6 {
                        let size = ((2 * n1 + 1) * (2 * n2 + 1)) as u128;
                        if size < best && covers(&[a, b], &[n1, n2]) {
                            best = size;
                        }
                    }
                }
            }
        }
        best
    }

    #[test]
    fn cover_even_numbers() {
        let g = AbelianGroup::integers();
        let xs = ints(&g, &[0, 2, 4, 6]);
        let hp = minimal_cover(&g, &xs, 1, true).unwrap().unwrap();
        assert_eq!(gens_of(&hp), vec![2]);
        assert_eq!(hp.gap().upper(), &[3]);
        assert_eq!(hp.nominal_size(), 7);
        check(&hp, &xs);
    }

    #[test]
    fn cover_zero() {
        let g = AbelianGroup::integers();
        let xs = ints(&g, &[0]);
        let hp = minimal_cover(&g, &xs, 2, true).unwrap().unwrap();
        assert_eq!(hp.rank(), 0);
        assert_eq!(hp.elements().unwrap().len(), 1);
    }

    #[test]
    fn cover_two_scales() {
        let g = AbelianGroup::integers();
        let xs = ints(&g, &[0, 1, 100, 101]);
        let hp = minimal_cover(&g, &xs, 2, true).unwrap().unwrap();
        assert_eq!(gens_of(&hp), vec![1, 100]);
        assert_eq!(hp.gap().upper(), &[1, 1]);
        assert_eq!(hp.nominal_size(), 9);
        check(&hp, &xs);
        assert_eq!(oracle_z(&[0, 1, 100, 101], 101), 9);
    }

    #[test]
    fn cover_uses_subgroup() {
        // {0, 3} in Z/6 is exactly the subgroup of order 2.
        let z6 = AbelianGroup::cyclic(6).unwrap();
        let xs = ints(&z6, &[0, 3]);
        let hp = minimal_cover(&z6, &xs, 1, true).unwrap().unwrap();
        assert_eq!(hp.rank(), 0);
        assert_eq!(hp.subgroup().len(), 2);
    }

    #[test]
    fn cover_in_cyclic_group() {
        let z101 = AbelianGroup::cyclic(101).unwrap();
        let xs = ints(&z101, &[0, 7, 14, 21, 94]);
        let hp = minimal_cover(&z101, &xs, 1, true).unwrap().unwrap();
        check(&hp, &xs);
        assert_eq!(hp.nominal_size(), 7);
        assert_eq!(hp.gap().generators()[0], z101.scalar(7).unwrap());
    }

    #[test]
    fn two_proper_requirement() {
        let z11 = AbelianGroup::cyclic(11).unwrap();
        let xs = ints(&z11, &[0, 1, 2, 3, 8, 9, 10]);
        let opts = CoverOptions { max_rank: 1, properness: 2, ..CoverOptions::default() };
        let out = search_cover(&z11, &xs, &opts).unwrap();
        let hp = out.cover.unwrap();
        assert!(hp.is_t_proper(2).unwrap() || hp.subgroup().len() == 11);
        assert_eq!(hp.subgroup().len(), 11);
    }

    #[test]
    fn non_symmetric_cover_is_a_translate() {
        let g = AbelianGroup::integers();
        let xs = ints(&g, &[10, 13, 16]);
        let hp = minimal_cover(&g, &xs, 1, false).unwrap().unwrap();
        check(&hp, &xs);
        assert_eq!(hp.nominal_size(), 3);
        assert_eq!(hp.gap().base(), &g.scalar(13).unwrap());
        assert!(minimal_cover(&g, &xs, 1, true).is_err());
    }

    #[test]
    fn budget_exhaustion_reports_no_cover() {
        let g = AbelianGroup::integers();
        let xs = ints(&g, &[0, 3, 7, 12, 40, 41, 97]);
        let opts = CoverOptions { budget: 10, ..CoverOptions::default() };
        let out = search_cover(&g, &xs, &opts).unwrap();
        assert!(out.budget_exhausted);
        assert!(out.cover.is_none());
        assert!(!out.diagnostic.is_empty());
    }

    #[test]
    fn size_limit_and_exclusion() {
        let z7 = AbelianGroup::cyclic(7).unwrap();
        let all: ElementSet = z7.elements().unwrap().collect();
        let opts = CoverOptions { exclude_full_group: true, ..CoverOptions::default() };
        let hp = search_cover(&z7, &all, &opts).unwrap().cover.unwrap();
        assert_eq!(hp.nominal_size(), 7);
        assert_eq!(hp.subgroup().len(), 1);
        let opts = CoverOptions { size_limit: Some(5), ..CoverOptions::default() };
        assert!(search_cover(&z7, &all, &opts).unwrap().cover.is_none());
    }

    #[test]
    fn matches_exhaustive_oracle_on_small_sets() {
        let g = AbelianGroup::integers();
        let cases: [&[i64]; 6] = [
            &[0, 3, 5],
            &[0, 1, 2, 10, 11, 12],
            &[0, 4, 8, 9],
            &[0, 5, 6, 11],
            &[-6, 0, 6, 7],
            &[0, 2, 3, 7],
        ];
        for xs in cases {
            let set = ints(&g, xs);
            let hp = minimal_cover(&g, &set, 2, true).unwrap().unwrap();
            check(&hp, &set);
            let gmax = xs.iter().map(|x| x.abs()).max().unwrap() * 2;
            assert_eq!(hp.nominal_size(), oracle_z(xs, gmax), "X = {xs:?}");
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn cover_is_proper_and_contains_x(raw in prop::collection::vec(-15i64..15, 1..6)) {
                let g = AbelianGroup::integers();
                let mut xs = ints(&g, &raw);
                xs.insert(g.zero());
                let hp = minimal_cover(&g, &xs, 2, true).unwrap().unwrap();
                check(&hp, &xs);
                prop_assert!(hp.nominal_size() >= oracle_z(&xs.iter().map(|x| x.scalar()).collect::<Vec<_>>(), 30));
            }

            #[test]
            fn cyclic_cover_is_proper(q in 5u64..40, raw in prop::collection::vec(0i64..40, 1..6)) {
                let zq = AbelianGroup::cyclic(q).unwrap();
                let mut xs = ints(&zq, &raw);
                xs.insert(zq.zero());
                let hp = minimal_cover(&zq, &xs, 2, true).unwrap().unwrap();
                check(&hp, &xs);
            }
        }
    }
}
