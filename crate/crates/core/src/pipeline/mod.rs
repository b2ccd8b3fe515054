//! Executable inverse theorems: from large concentration to coset-progression
//! structure, with every intermediate inequality checked exactly.

mod certificate;
mod stages;

use std::fmt;
use std::str::FromStr;

use num_rational::{BigRational, Ratio};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::concentration::{
    binomial_point_mass, check_alpha, rho_m, rho_star_m, rho_xi, walk_distribution, StepLaw, WeightMultiset,
};
use crate::error::{invalid, Error, Result};
use crate::group::{AbelianGroup, GroupElement};
use crate::progression::{
    divide_progression, iterated_sumset, search_cover, CosetProgression, CoverOptions, ElementSet,
    ProgressionLiteral,
};

pub use certificate::{decimal, rational_string, Certificate, E_LOWER, E_UPPER};
pub use stages::{
    averaging_split, choose_k, dual_set, find_l0, level_set, rho_star_alpha, sumset_containment_check,
    AveragingSplit, Containment, LevelSetFamily, PIPELINE_GROUP_CAP,
};

use certificate::{frac, int, ExpLower};
use stages::{containment_indices, dual_indices, indexed_items, split_indices, ta_square_sum, ta_square_sum_float, Characters};

/// Largest `|G| |S|` for which the float evaluation of `sum_a T_a^2` is run.
const FLOAT_CHECK_CAP: u64 = 20_000_000;
const FLOAT_CHECK_TOL: f64 = 1e-9;
/// Sets larger than this are reported by size only.
const REPORT_SET_CAP: usize = 4_096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Lazy walk, level sets of `A`.
    Abelian,
    /// Lazy walk, structure on `{2a : a in A}`. Reconstructed: level sets are
    /// taken on `2A` with coefficient `alpha`, from
    /// `(1 - alpha + alpha cos x)^2 <= 1 - 4 alpha ||2x / 2pi||^2`.
    AbelianDoubled,
    /// Symmetric word walk with `m` steps.
    Word,
    /// Integer multisets under `rho*_m`, embedded in `Z/p`.
    RhoStar,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "abelian" | "abelian-rho-xi" => Ok(Mode::Abelian),
            "abelian-doubled" => Ok(Mode::AbelianDoubled),
            "word" | "word-rho-m" => Ok(Mode::Word),
            "rho-star" | "constrained-rho-star" => Ok(Mode::RhoStar),
            _ => Err(Error::Parse(format!("unknown mode {s:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::Abelian => "abelian",
            Mode::AbelianDoubled => "abelian-doubled",
            Mode::Word => "word",
            Mode::RhoStar => "rho-star",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub mode: Mode,
    /// Laziness of the walk in the abelian modes.
    pub alpha: Option<Ratio<u64>>,
    /// Number of steps in word mode; subset size in rho-star mode
    /// (default `floor(n/2)`).
    pub m: Option<u64>,
    pub n_prime: u64,
    pub max_rank: usize,
    pub cover_budget: u64,
}

impl PipelineConfig {
    pub fn new(mode: Mode, n_prime: u64, max_rank: usize) -> Self {
        PipelineConfig { mode, alpha: None, m: None, n_prime, max_rank, cover_budget: CoverOptions::default().budget }
    }

    pub fn with_alpha(mut self, alpha: Ratio<u64>) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_m(mut self, m: u64) -> Self {
        self.m = Some(m);
        self
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Embedding {
    /// Translation `N` applied before reducing modulo `p`.
    pub shift: i64,
    pub prime: u64,
    /// Smallest non-exceptional element; the cover is `a1 + P`.
    pub a1: Option<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrossCheck {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineReport {
    pub mode: Mode,
    pub group: String,
    /// Group on which level and dual sets live (`Z/p` in rho-star mode).
    pub working_group: String,
    pub rho_kind: String,
    pub rho: String,
    /// `c` in `S_l = { zeta : c * statistic(zeta) <= l }`.
    pub coefficient: String,
    /// `all`, or `unshifted` / `shifted` for the two word-mode branches.
    pub branch: String,
    pub l0: u64,
    pub level_set_size: u64,
    pub level_set: Option<Vec<GroupElement>>,
    pub a_prime: Vec<(GroupElement, u64)>,
    pub exceptional: Vec<(GroupElement, u64)>,
    pub k_raw: u64,
    pub k: u64,
    pub sub_threshold: bool,
    pub dual_size: u64,
    pub dual: Option<Vec<GroupElement>>,
    pub dual_shifted_size: Option<u64>,
    pub dual_shifted: Option<Vec<GroupElement>>,
    pub containment: Containment,
    /// The set the cover is required to contain.
    pub covered: Vec<GroupElement>,
    pub cover: Option<ProgressionLiteral>,
    pub cover_size: Option<u64>,
    pub cover_diagnostic: String,
    pub embedding: Option<Embedding>,
    pub certificates: Vec<Certificate>,
    pub cross_checks: Vec<CrossCheck>,
    pub passed: bool,
}

impl PipelineReport {
    pub fn failed_certificates(&self) -> Vec<&Certificate> {
        self.certificates.iter().filter(|c| !c.pass).collect()
    }
}

struct Prepared {
    work: WeightMultiset,
    /// Original item index for each working item.
    origin: Vec<Vec<(GroupElement, u64)>>,
    rho_kind: &'static str,
    rho: BigRational,
    target: BigRational,
    coefficient: Ratio<u64>,
    word_split: bool,
    k_alpha: Ratio<u64>,
    certificates: Vec<Certificate>,
    embedding: Option<Embedding>,
}

/// Runs the level-set / averaging / dual-set / sumset / cover pipeline.
pub fn recover_structure(a: &WeightMultiset, cfg: &PipelineConfig) -> Result<PipelineReport> {
    let n = a.n();
    if n == 0 {
        return invalid("the multiset is empty");
    }
    if cfg.n_prime == 0 || cfg.n_prime > n {
        return invalid(format!("n' = {} must lie in [1, {n}]", cfg.n_prime));
    }
    let prep = match cfg.mode {
        Mode::Abelian | Mode::AbelianDoubled => prepare_abelian(a, cfg)?,
        Mode::Word => prepare_word(a, cfg)?,
        Mode::RhoStar => prepare_rho_star(a, cfg)?,
    };
    if !prep.rho.is_positive() {
        return invalid("concentration is zero; there is nothing to invert");
    }
    run(a, cfg, prep)
}

fn origin_identity(a: &WeightMultiset) -> Vec<Vec<(GroupElement, u64)>> {
    a.items().iter().map(|it| vec![it.clone()]).collect()
}

fn require_finite(a: &WeightMultiset, mode: Mode) -> Result<u64> {
    a.group()
        .order()
        .ok_or_else(|| Error::Unsupported(format!("{mode} mode needs a finite group")))
}

fn prepare_abelian(a: &WeightMultiset, cfg: &PipelineConfig) -> Result<Prepared> {
    let order = require_finite(a, cfg.mode)?;
    let alpha = cfg.alpha.ok_or_else(|| Error::InvalidArgument("abelian modes need alpha".into()))?;
    check_alpha(alpha)?;
    if alpha.is_zero() {
        return invalid("alpha must be positive");
    }
    let rho = rho_xi(a, alpha)?.value;
    let target = &rho * int(order);
    if cfg.mode == Mode::Abelian {
        let one = Ratio::from_integer(1);
        if alpha == one {
            return invalid("abelian mode needs alpha < 1; use abelian-doubled for alpha = 1");
        }
        return Ok(Prepared {
            work: a.clone(),
            origin: origin_identity(a),
            rho_kind: "rho_xi",
            rho,
            target,
            coefficient: alpha.min(one - alpha) * 4,
            word_split: false,
            k_alpha: alpha,
            certificates: Vec::new(),
            embedding: None,
        });
    }
    let g = a.group().clone();
    let work = a.map(|x| g.scale(x, 2))?;
    let origin = work
        .items()
        .iter()
        .map(|(y, _)| a.items().iter().filter(|(x, _)| &g.scale(x, 2) == y).cloned().collect())
        .collect();
    Ok(Prepared {
        work,
        origin,
        rho_kind: "rho_xi",
        rho,
        target,
        coefficient: alpha,
        word_split: false,
        k_alpha: alpha,
        certificates: Vec::new(),
        embedding: None,
    })
}

fn prepare_word(a: &WeightMultiset, cfg: &PipelineConfig) -> Result<Prepared> {
    let order = require_finite(a, cfg.mode)?;
    let m = cfg.m.ok_or_else(|| Error::InvalidArgument("word mode needs m".into()))?;
    let n = a.n();
    if m == 0 || m > n {
        return invalid(format!("word mode needs 1 <= m <= n, got m = {m}, n = {n}"));
    }
    if !a.is_symmetric() {
        return invalid("word mode needs a symmetric multiset");
    }
    let rho = rho_m(a, m)?.value;
    let target = &rho * int(order) / int(2);
    Ok(Prepared {
        work: a.clone(),
        origin: origin_identity(a),
        rho_kind: "rho_m",
        rho,
        target,
        coefficient: Ratio::new(4 * m, n),
        word_split: true,
        k_alpha: Ratio::new(m, n),
        certificates: Vec::new(),
        embedding: None,
    })
}

fn next_prime(mut x: u64) -> u64 {
    loop {
        x += 1;
        if x >= 2 && (2..).take_while(|d: &u64| d * d <= x).all(|d| !x.is_multiple_of(d)) {
            return x;
        }
    }
}

fn prepare_rho_star(a: &WeightMultiset, cfg: &PipelineConfig) -> Result<Prepared> {
    if !a.group().is_torsion_free() {
        return Err(Error::Unsupported("rho-star mode works on integer multisets".into()));
    }
    let n = a.n();
    let m = cfg.m.unwrap_or(n / 2);
    if m == 0 || m >= n {
        return invalid(format!("rho-star mode needs 1 <= m < n, got m = {m}, n = {n}"));
    }
    let alpha = Ratio::new(m, n);
    let mut certificates = Vec::new();

    let rho_star = rho_star_m(a, m)?.value;
    let rho = &rho_star * binomial_point_mass(n, alpha, m)?;
    let walk = walk_distribution(a, StepLaw::bernoulli01(alpha)?)?.max_point().value;
    certificates.push(Certificate::le("passing_to_rho_xi", &rho, &walk));

    let big_m = a.max_abs().max(1);
    let shift = 4 * n as i64 * big_m;
    let translated = a.map(|x| GroupElement(vec![x.scalar() + shift]))?;
    let moved = rho_star_m(&translated, m)?.value;
    certificates.push(Certificate::eq("translation_invariance", &moved, &rho_star));

    let p = next_prime(2 * n * (big_m + shift + 1) as u64);
    if p > PIPELINE_GROUP_CAP {
        return Err(Error::Resource(format!("embedding prime {p} exceeds the pipeline cap {PIPELINE_GROUP_CAP}")));
    }
    let spread: i64 = translated.items().iter().map(|(x, k)| x.scalar().abs() * *k as i64).sum();
    certificates.push(Certificate::lt("freiman_embedding", &int(2 * spread), &int(p)));

    let zp = AbelianGroup::cyclic(p)?;
    let items: Vec<(GroupElement, u64)> = translated
        .items()
        .iter()
        .map(|(x, k)| (GroupElement(vec![x.scalar().rem_euclid(p as i64)]), *k))
        .collect();
    let work = WeightMultiset::new(zp, items)?;
    let origin = work
        .items()
        .iter()
        .map(|(y, _)| {
            a.items().iter().filter(|(x, _)| x.scalar() + shift == y.scalar()).cloned().collect()
        })
        .collect();
    Ok(Prepared {
        work,
        origin,
        rho_kind: "rho_star_m * binomial point mass",
        target: &rho * int(p),
        rho,
        coefficient: Ratio::new(m * (n - m), n * n),
        word_split: false,
        k_alpha: alpha,
        certificates,
        embedding: Some(Embedding { shift, prime: p, a1: None }),
    })
}

fn bound_ratio(c: Ratio<u64>) -> BigRational {
    frac(*c.numer(), *c.denom())
}

fn run(input: &WeightMultiset, cfg: &PipelineConfig, prep: Prepared) -> Result<PipelineReport> {
    let Prepared { work, origin, rho_kind, rho, target, coefficient, word_split, k_alpha, mut certificates, mut embedding } =
        prep;
    let g = work.group().clone();
    let chars = Characters::new(&g)?;
    let order = chars.order() as u64;
    let scale = chars.scale();
    let items = indexed_items(&work);

    // Level-set families: one over all of G, or the shifted/unshifted branches.
    let families: Vec<(String, LevelSetFamily)> = if word_split {
        let s0 = chars.statistics(&items, false);
        let s1 = chars.statistics(&items, true);
        let g1: Vec<bool> = s0.iter().zip(&s1).map(|(a, b)| a >= b).collect();
        let shifted = LevelSetFamily::from_stats(g.clone(), coefficient, true, s1, scale, |i| g1[i]);
        let plain = LevelSetFamily::from_stats(g.clone(), coefficient, false, s0, scale, |i| !g1[i]);
        vec![("unshifted".into(), plain), ("shifted".into(), shifted)]
    } else {
        let stats = chars.statistics(&items, false);
        vec![("all".into(), LevelSetFamily::from_stats(g.clone(), coefficient, false, stats, scale, |_| true))]
    };
    let horizon = families
        .iter()
        .map(|(_, f)| f.search_horizon(&target).max(2 * f.max_level()))
        .max()
        .unwrap_or(1);
    let exp = ExpLower::new(horizon);
    let sums: Vec<_> = families.iter().map(|(_, f)| f.level_sum_lower(&exp)).collect();
    let chosen = (0..families.len()).fold(0, |best, i| if sums[i] > sums[best] { i } else { best });
    if word_split {
        let total: num_bigint::BigUint = sums.iter().sum();
        let full = &target * int(2);
        certificates.push(Certificate::new(
            "level_sum_both_branches",
            exp.render(&total),
            ">=",
            decimal(&full),
            exp.at_least(&total, &full),
        ));
    }
    let (branch, family) = &families[chosen];
    certificates.push(Certificate::new(
        "level_sum",
        exp.render(&sums[chosen]),
        ">=",
        decimal(&target),
        exp.at_least(&sums[chosen], &target),
    ));

    let l0 = family
        .pigeonhole_level(&target, &exp)
        .ok_or_else(|| Error::InvalidArgument("no level satisfies the pigeonhole inequality".into()))?;
    let weight = num_bigint::BigUint::from(family.size(l0)) * exp.pigeonhole_weight(l0);
    certificates.push(Certificate::new(
        "pigeonhole_level",
        exp.render(&weight),
        ">=",
        decimal(&target),
        exp.at_least(&weight, &target),
    ));
    let shifted = family.shifted();
    let s = family.indices(l0);
    let s_len = s.len() as u64;

    let split = split_indices(&chars, &items, &s, coefficient, l0, cfg.n_prime, shifted);
    let c = bound_ratio(coefficient);
    certificates.push(Certificate::le(
        "averaging_double_count",
        &frac(split.total, scale),
        &(int(l0 * s_len) / &c),
    ));
    let kept_set: std::collections::BTreeSet<usize> = split.kept.iter().map(|(i, _)| *i).collect();
    let expand = |keep: bool| -> Vec<(GroupElement, u64)> {
        items
            .iter()
            .zip(&origin)
            .filter(|((i, _), _)| kept_set.contains(i) == keep)
            .flat_map(|(_, o)| o.iter().cloned())
            .collect()
    };
    let a_prime = expand(true);
    let exceptional = expand(false);
    let exc_count: u64 = exceptional.iter().map(|(_, k)| k).sum();
    certificates.push(Certificate::le("exceptional_count", &int(exc_count), &int(cfg.n_prime)));

    let dual = dual_indices(&chars, &s, false);
    let dual_shifted = shifted.then(|| dual_indices(&chars, &s, true));
    for (name, d) in [("dual_bound", Some(&dual)), ("dual_bound_shifted", dual_shifted.as_ref())] {
        if let Some(d) = d {
            certificates.push(Certificate::le(name, &int(d.len() as u64), &(int(4 * order) / int(s_len))));
        }
    }
    let ta = ta_square_sum(&chars, &s);
    certificates.push(Certificate::le("ta_square_sum", &ta, &int(order * s_len)));
    let mut cross_checks = Vec::new();
    if order * s_len <= FLOAT_CHECK_CAP {
        let value = ta_square_sum_float(&chars, &s);
        let reference = ta.to_f64().unwrap_or(f64::NAN);
        let pass = (value - reference).abs() <= FLOAT_CHECK_TOL * reference.max(1.0);
        cross_checks.push(CrossCheck { name: "ta_square_sum_float".into(), value, reference, tolerance: FLOAT_CHECK_TOL, pass });
    }

    let k_raw = choose_k(k_alpha, cfg.n_prime, l0, cfg.mode)?;
    let k = k_raw.max(1);
    let kept_idx: Vec<usize> = kept_set.iter().copied().collect();
    let witness = containment_indices(&chars.ar, &kept_idx, k_raw, &dual, dual_shifted.as_deref());
    let containment = Containment { holds: witness.is_none(), witness: witness.map(|(l, x)| (l, g.element_at(x))) };
    certificates.push(Certificate::new(
        "sumset_containment",
        witness.map_or("none".to_string(), |(l, x)| format!("{} in {l}A'", g.element_at(x))),
        "==",
        "none",
        witness.is_none(),
    ));

    let outcome = match cfg.mode {
        Mode::RhoStar => {
            let shift = embedding.as_ref().map_or(0, |e| e.shift);
            rho_star_cover(&a_prime, k, shift, cfg, &mut certificates)?
        }
        _ => {
            let mut xs: ElementSet = kept_idx.iter().map(|&i| g.element_at(i)).collect();
            xs.insert(g.zero());
            let (cover, diagnostic) = cover_stage(&g, &xs, k, cfg)?;
            CoverResult { covered: xs.into_iter().collect(), cover, diagnostic, a1: None }
        }
    };
    if let (Some(e), Some(a1)) = (embedding.as_mut(), outcome.a1) {
        e.a1 = Some(a1);
    }
    let cover_group = if cfg.mode == Mode::RhoStar { input.group().clone() } else { g.clone() };
    let mut cover_size = None;
    if let Some(cover) = &outcome.cover {
        let elems = cover.elements()?;
        cover_size = Some(elems.len() as u64);
        let missing = outcome.covered.iter().filter(|x| !elems.contains(x)).count();
        certificates.push(Certificate::eq("cover_contains", &int(missing as u64), &BigRational::zero()));
        certificates.push(Certificate::eq(
            "cover_proper",
            &int(elems.len() as u64),
            &int(cover.nominal_size().to_u64().unwrap_or(u64::MAX)),
        ));
        certificates.push(Certificate::le("cover_rank", &int(cover.rank() as u64), &int(cfg.max_rank as u64)));
        debug_assert_eq!(cover.group(), &cover_group);
    }

    let cap = |v: Vec<usize>| (v.len() <= REPORT_SET_CAP).then(|| v.into_iter().map(|i| g.element_at(i)).collect());
    let passed = certificates.iter().all(|c| c.pass) && cross_checks.iter().all(|c| c.pass);
    Ok(PipelineReport {
        mode: cfg.mode,
        group: input.group().to_string(),
        working_group: g.to_string(),
        rho_kind: rho_kind.into(),
        rho: rational_string(&rho),
        coefficient: coefficient.to_string(),
        branch: branch.clone(),
        l0,
        level_set_size: s_len,
        level_set: cap(s),
        a_prime,
        exceptional,
        k_raw,
        k,
        sub_threshold: k_raw == 0,
        dual_size: dual.len() as u64,
        dual: cap(dual),
        dual_shifted_size: dual_shifted.as_ref().map(|d| d.len() as u64),
        dual_shifted: dual_shifted.and_then(cap),
        containment,
        covered: outcome.covered,
        cover: outcome.cover.as_ref().map(|c| c.literal()),
        cover_size,
        cover_diagnostic: outcome.diagnostic,
        embedding,
        certificates,
        cross_checks,
        passed,
    })
}

struct CoverResult {
    covered: Vec<GroupElement>,
    cover: Option<CosetProgression>,
    diagnostic: String,
    a1: Option<i64>,
}

/// Symmetric cover of `X` (which contains 0): directly for `k = 1`, otherwise a
/// 2-proper cover of `kX` divided by `k`.
fn cover_stage(
    group: &AbelianGroup,
    xs: &ElementSet,
    k: u64,
    cfg: &PipelineConfig,
) -> Result<(Option<CosetProgression>, String)> {
    let k32 = u32::try_from(k).map_err(|_| Error::Resource(format!("k = {k} is too large")))?;
    let target = if k == 1 { xs.clone() } else { iterated_sumset(group, xs, k32)? };
    let opts = CoverOptions {
        max_rank: cfg.max_rank,
        require_symmetric: true,
        properness: if k == 1 { 1 } else { 2 },
        budget: cfg.cover_budget,
        ..CoverOptions::default()
    };
    let outcome = match search_cover(group, &target, &opts) {
        Ok(o) => o,
        Err(e @ Error::Resource(_)) => return Ok((None, e.to_string())),
        Err(e) => return Err(e),
    };
    let mut diagnostic = outcome.diagnostic.clone();
    let Some(hq) = outcome.cover else {
        if outcome.budget_exhausted {
            diagnostic.push_str("cover search budget exhausted");
        } else {
            diagnostic.push_str(&format!("no cover of rank <= {}", cfg.max_rank));
        }
        return Ok((None, diagnostic));
    };
    if k == 1 {
        return Ok((Some(hq), diagnostic));
    }
    match divide_progression(&hq, k32, xs) {
        Ok(p) => Ok((Some(p), diagnostic)),
        Err(e) => Ok((None, format!("{diagnostic}dividing failed: {e}"))),
    }
}

fn rho_star_cover(
    a_prime: &[(GroupElement, u64)],
    k: u64,
    shift: i64,
    cfg: &PipelineConfig,
    certificates: &mut Vec<Certificate>,
) -> Result<CoverResult> {
    let z = AbelianGroup::integers();
    let a1_set: ElementSet = a_prime.iter().map(|(x, _)| x.clone()).collect();
    let Some(a1) = a1_set.iter().next().map(|x| x.scalar()) else {
        return Ok(CoverResult { covered: Vec::new(), cover: None, diagnostic: "every element is exceptional".into(), a1: None });
    };
    let b1: ElementSet = a1_set.iter().map(|x| GroupElement(vec![x.scalar() - a1])).collect();
    let reach = b1.iter().map(|x| x.scalar()).max().unwrap_or(0);
    certificates.push(Certificate::lt(
        "translation_disjointness",
        &int(2 * k as i64 * reach),
        &int(shift + a1),
    ));
    let (cover, diagnostic) = cover_stage(&z, &b1, k, cfg)?;
    let base = GroupElement(vec![a1]);
    Ok(CoverResult { covered: a1_set.into_iter().collect(), cover: cover.map(|p| p.translate(&base)), diagnostic, a1: Some(a1) })
}
