//! Seeded desk-scale experiments: anti-concentration corollaries, forward
//! bounds, random-walk mixing and lattice-vector counting.

mod counting;
mod mixing;

use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::concentration::{
    binomial_point_mass, erdos_bound, rho_classical, rho_star_m, walk_distribution, StepLaw, WeightMultiset,
};
use crate::error::{invalid, Error, Result};
use crate::group::{AbelianGroup, GroupElement};
use crate::pipeline::rational_string;
use crate::progression::Gap;

pub use counting::{claim_bound, count_vectors, fit_claim_constant, ClaimCell, ClaimFit};
pub use mixing::{
    fit_mixing_exponent, mixing_experiment, progression_obstruction_check, walk_profile, MixingConfig, MixingPoint,
    MixingReport, MixingTrial, ObstructionReport, RankCheck, Schedule, SlopeFit,
};

/// The generator behind every experiment: ChaCha8, seeded from a `u64`.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 })
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErdosConfig {
    pub trials: usize,
    pub n_values: Vec<u64>,
    pub q_values: Vec<u64>,
    pub seed: u64,
    /// Fraction of the `a_i` required to be reduced modulo `q`.
    pub epsilon: f64,
    /// Flag instances with `sqrt(n) sup_a P > limit`.
    pub limit: f64,
}

impl Default for ErdosConfig {
    fn default() -> Self {
        ErdosConfig {
            trials: 50,
            n_values: vec![16, 36, 64, 100],
            q_values: vec![101, 199],
            seed: 1,
            epsilon: 1.0,
            limit: 1.0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErdosCell {
    pub q: u64,
    pub n: u64,
    pub max_statistic: f64,
    pub worst: Vec<i64>,
    pub flagged: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErdosReport {
    pub config: ErdosConfig,
    pub cells: Vec<ErdosCell>,
    pub max_statistic: f64,
    pub pass: bool,
}

/// `sup_a P(sum a_i x_i = a)` for signed steps on `Z/q`, and `sqrt(n)` times it.
/// Rejects instances with fewer than `ceil(epsilon n)` reduced elements.
pub fn erdos_statistic(a: &WeightMultiset, epsilon: f64) -> Result<(BigRational, f64)> {
    let g = a.group();
    let q = match g.factors() {
        [q] if !g.is_torsion_free() => *q,
        _ => return Err(Error::Unsupported("the corollary is checked on cyclic groups".into())),
    };
    let reduced: u64 = a.items().iter().filter(|(x, _)| (x.scalar() as u64).gcd(&q) == 1).map(|(_, m)| m).sum();
    let need = (epsilon * a.n() as f64).ceil() as u64;
    if reduced < need.max(1) {
        return invalid(format!("only {reduced} of {} elements are reduced modulo {q}", a.n()));
    }
    let sup = rho_classical(a)?.value;
    let stat = (a.n() as f64).sqrt() * to_f64(&sup);
    Ok((sup, stat))
}

pub fn check_erdos_corollary(cfg: &ErdosConfig) -> Result<ErdosReport> {
    let mut rng = rng(cfg.seed);
    let mut cells = Vec::new();
    for &q in &cfg.q_values {
        let reduced = crate::group::reduced_elements(q)?;
        for &n in &cfg.n_values {
            let g = AbelianGroup::cyclic(q)?;
            let mut cell = ErdosCell { q, n, max_statistic: 0.0, worst: Vec::new(), flagged: 0 };
            for _ in 0..cfg.trials {
                let xs: Vec<i64> = (0..n).map(|_| *reduced.choose(&mut rng).unwrap() as i64).collect();
                let a = WeightMultiset::from_ints(g.clone(), &xs)?;
                let (_, stat) = erdos_statistic(&a, cfg.epsilon)?;
                if stat > cfg.limit {
                    cell.flagged += 1;
                }
                if stat > cell.max_statistic {
                    cell.max_statistic = stat;
                    cell.worst = xs;
                }
            }
            cells.push(cell);
        }
    }
    let max_statistic = cells.iter().map(|c| c.max_statistic).fold(0.0, f64::max);
    Ok(ErdosReport { config: cfg.clone(), pass: max_statistic <= cfg.limit, max_statistic, cells })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ForwardMode {
    /// Distinct values, `n^{3/2} rho*(A)`.
    Distinct,
    /// Distinct values, `n sqrt(m) rho*_m(A)`.
    DistinctM,
    /// No value repeated more than `(1 - epsilon) n` times, `sqrt(m) rho*_m(A)`.
    Spread { epsilon: f64 },
}

/// The normalised statistic of the forward corollaries for an integer multiset.
pub fn forward_statistic(a: &WeightMultiset, mode: ForwardMode, m: u64) -> Result<(BigRational, f64)> {
    if !a.group().is_torsion_free() {
        return Err(Error::Unsupported("forward bounds are stated over Z".into()));
    }
    let n = a.n();
    let top = a.items().iter().map(|(_, k)| *k).max().unwrap_or(0);
    let nf = n as f64;
    match mode {
        ForwardMode::Distinct | ForwardMode::DistinctM if top > 1 => invalid("the values must be distinct"),
        ForwardMode::Spread { epsilon } if top as f64 > (1.0 - epsilon) * nf => {
            invalid(format!("a value is repeated {top} > (1 - {epsilon}) n times"))
        }
        ForwardMode::Distinct => {
            let rho = rho_star_m(a, n / 2)?.value;
            let s = nf.powf(1.5) * to_f64(&rho);
            Ok((rho, s))
        }
        ForwardMode::DistinctM => {
            let rho = rho_star_m(a, m)?.value;
            let s = nf * (m as f64).sqrt() * to_f64(&rho);
            Ok((rho, s))
        }
        ForwardMode::Spread { .. } => {
            let rho = rho_star_m(a, m)?.value;
            let s = (m as f64).sqrt() * to_f64(&rho);
            Ok((rho, s))
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ForwardConfig {
    pub mode: ForwardMode,
    pub trials: usize,
    pub n: u64,
    pub m: u64,
    pub seed: u64,
    /// Values are drawn from `[-range, range]`.
    pub range: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ForwardTrial {
    pub values: Vec<i64>,
    pub rho: String,
    pub statistic: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ForwardReport {
    pub config: ForwardConfig,
    pub trials: Vec<ForwardTrial>,
    pub max: f64,
    pub median: f64,
}

pub fn check_forward_bounds(cfg: &ForwardConfig) -> Result<ForwardReport> {
    if cfg.n == 0 || cfg.m > cfg.n {
        return invalid("need n >= 1 and m <= n");
    }
    let distinct = !matches!(cfg.mode, ForwardMode::Spread { .. });
    if distinct && (2 * cfg.range + 1) < cfg.n as i64 {
        return invalid("range too small for distinct values");
    }
    let mut rng = rng(cfg.seed);
    let z = AbelianGroup::integers();
    let pool: Vec<i64> = (-cfg.range..=cfg.range).collect();
    let mut trials = Vec::new();
    while trials.len() < cfg.trials {
        let values: Vec<i64> = if distinct {
            pool.choose_multiple(&mut rng, cfg.n as usize).copied().collect()
        } else {
            (0..cfg.n).map(|_| rng.gen_range(-cfg.range..=cfg.range)).collect()
        };
        let a = WeightMultiset::from_ints(z.clone(), &values)?;
        match forward_statistic(&a, cfg.mode, cfg.m) {
            Ok((rho, statistic)) => trials.push(ForwardTrial { values, rho: rational_string(&rho), statistic }),
            Err(Error::InvalidArgument(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    let stats: Vec<f64> = trials.iter().map(|t| t.statistic).collect();
    Ok(ForwardReport {
        config: cfg.clone(),
        max: stats.iter().copied().fold(0.0, f64::max),
        median: median(&stats).unwrap_or(0.0),
        trials,
    })
}

/// Both sides of `sup_a P(sum a_i x_i = a) >= rho*_m(A) binom(n,m) alpha^m (1-alpha)^{n-m}`
/// for `x_i` in `{0, 1}` with `P(x_i = 1) = alpha`.
pub fn passing_claim(a: &WeightMultiset, m: u64, alpha: Ratio<u64>) -> Result<(BigRational, BigRational)> {
    let lhs = walk_distribution(a, StepLaw::bernoulli01(alpha)?)?.max_point().value;
    let rhs = rho_star_m(a, m)?.value * binomial_point_mass(a.n(), alpha, m)?;
    Ok((lhs, rhs))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErdosCheck {
    pub rho: String,
    pub rho_star: String,
    pub bound: String,
    /// `rho(A) <= binom(n, n/2) / 2^n`.
    pub upper_holds: bool,
    /// `rho(A) >= rho*(A) binom(n, n/2) / 2^n`.
    pub lower_holds: bool,
}

/// Checks the Erdős upper bound and the comparison with `rho*` on a multiset of
/// nonzero integers.
pub fn erdos_check(a: &WeightMultiset) -> Result<ErdosCheck> {
    if !a.group().is_torsion_free() {
        return Err(Error::Unsupported("the Erdős bound is checked over Z".into()));
    }
    if a.multiplicity(&a.group().zero()) > 0 {
        return invalid("the Erdős bound needs nonzero elements");
    }
    let n = a.n();
    let rho = rho_classical(a)?.value;
    let rho_star = rho_star_m(a, n / 2)?.value;
    let bound = erdos_bound(n);
    Ok(ErdosCheck {
        upper_holds: rho <= bound,
        lower_holds: rho >= &rho_star * &bound,
        rho: rational_string(&rho),
        rho_star: rational_string(&rho_star),
        bound: rational_string(&bound),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ForwardExampleTrial {
    pub a: Vec<GroupElement>,
    pub rho: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ForwardExampleReport {
    pub n: u64,
    pub dilate_size: u64,
    pub bound: String,
    pub trials: Vec<ForwardExampleTrial>,
    pub violations: usize,
}

/// Samples `A` uniformly from a symmetric proper GAP `P` and checks
/// `rho(A) >= 1 / |nP|`.
pub fn check_forward_example(p: &Gap, n: u64, trials: usize, seed: u64) -> Result<ForwardExampleReport> {
    if !p.is_symmetric() || !p.is_proper()? {
        return invalid("the progression must be symmetric and proper");
    }
    if n == 0 || n > 12 {
        return invalid("n must lie in [1, 12]");
    }
    let group = p.group().clone();
    let elems: Vec<GroupElement> = p.elements()?.into_iter().collect();
    let dilate_size = p.dilate(n as u32)?.elements()?.len() as u64;
    let bound = BigRational::new(1.into(), dilate_size.into());
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let a: Vec<GroupElement> = (0..n).map(|_| elems.choose(&mut rng).unwrap().clone()).collect();
        let rho = rho_classical(&WeightMultiset::from_elements(group.clone(), &a)?)?.value;
        out.push(ForwardExampleTrial { pass: rho >= bound, rho: rational_string(&rho), a });
    }
    let violations = out.iter().filter(|t| !t.pass).count();
    Ok(ForwardExampleReport { n, dilate_size, bound: rational_string(&bound), trials: out, violations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(g: &AbelianGroup, xs: &[i64]) -> WeightMultiset {
        WeightMultiset::from_ints(g.clone(), xs).unwrap()
    }

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn erdos_corollary_examples() {
        let g = AbelianGroup::cyclic(101).unwrap();
        let (sup, stat) = erdos_statistic(&ints(&g, &[1, 1, 1, 1]), 1.0).unwrap();
        assert_eq!(sup, r(3, 8));
        assert!((stat - 0.75).abs() < 1e-12);
        assert!(erdos_statistic(&ints(&g, &[0, 0, 0]), 0.5).is_err());

        let g = AbelianGroup::cyclic(97).unwrap();
        let (sup, stat) = erdos_statistic(&ints(&g, &[1; 20]), 1.0).unwrap();
        assert_eq!(sup, r(184_756, 1 << 20));
        assert!((stat - 0.7881).abs() < 1e-3);
    }

    #[test]
    fn erdos_corollary_small_grid() {
        let cfg = ErdosConfig { trials: 5, n_values: vec![16], q_values: vec![101], ..ErdosConfig::default() };
        let rep = check_erdos_corollary(&cfg).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.cells.len(), 1);
    }

    #[test]
    fn forward_examples() {
        let z = AbelianGroup::integers();
        let (rho, s) = forward_statistic(&ints(&z, &[1, 2]), ForwardMode::DistinctM, 1).unwrap();
        assert_eq!(rho, r(1, 2));
        assert!((s - 1.0).abs() < 1e-12);
        let a: Vec<i64> = (1..=12).collect();
        let (rho, s) = forward_statistic(&ints(&z, &a), ForwardMode::DistinctM, 6).unwrap();
        // 58 of the 924 six-subsets of {1..12} sum to 39.
        assert_eq!(rho, r(58, 924));
        assert!((s - 12.0 * 6f64.sqrt() * 58.0 / 924.0).abs() < 1e-9);
        let mut rep = vec![5i64; 11];
        rep.push(6);
        assert!(forward_statistic(&ints(&z, &rep), ForwardMode::Distinct, 6).is_err());
        assert!(forward_statistic(&ints(&z, &rep), ForwardMode::Spread { epsilon: 0.5 }, 6).is_err());
    }

    #[test]
    fn forward_harness_runs() {
        for mode in [ForwardMode::Distinct, ForwardMode::DistinctM, ForwardMode::Spread { epsilon: 0.25 }] {
            let cfg = ForwardConfig { mode, trials: 4, n: 10, m: 3, seed: 7, range: 15 };
            let rep = check_forward_bounds(&cfg).unwrap();
            assert_eq!(rep.trials.len(), 4);
            assert!(rep.max >= rep.median);
        }
    }

    #[test]
    fn passing_claim_equality_witness() {
        let z = AbelianGroup::integers();
        let (lhs, rhs) = passing_claim(&ints(&z, &[1, 1, 2]), 2, Ratio::new(2, 3)).unwrap();
        assert_eq!(lhs, r(8, 27));
        assert_eq!(rhs, r(8, 27));
    }

    #[test]
    fn erdos_check_examples() {
        let z = AbelianGroup::integers();
        let c = erdos_check(&ints(&z, &[1, 1, 1, 1])).unwrap();
        assert!(c.upper_holds && c.lower_holds);
        assert_eq!(c.rho, "3/8");
        assert!(erdos_check(&ints(&z, &[0, 1])).is_err());
    }

    #[test]
    fn forward_example_checks() {
        let z = AbelianGroup::integers();
        let p = Gap::symmetric(z.clone(), vec![z.scalar(1).unwrap()], vec![2]).unwrap();
        let rep = check_forward_example(&p, 4, 20, 3).unwrap();
        assert_eq!(rep.dilate_size, 17);
        assert_eq!(rep.violations, 0);
        let p0 = Gap::point(z.clone(), z.zero()).unwrap();
        let rep = check_forward_example(&p0, 3, 2, 3).unwrap();
        assert!(rep.trials.iter().all(|t| t.rho == "1"));
        let p2 = Gap::symmetric(z.clone(), vec![z.scalar(1).unwrap(), z.scalar(10).unwrap()], vec![1, 1]).unwrap();
        let rep = check_forward_example(&p2, 3, 10, 5).unwrap();
        assert_eq!(rep.dilate_size, 49);
        assert_eq!(rep.violations, 0);
    }

    #[test]
    fn seeded_rng_is_reproducible() {
        let a: Vec<u32> = (0..4).map(|_| rng(9).gen()).collect();
        let b: Vec<u32> = (0..4).map(|_| rng(9).gen()).collect();
        assert_eq!(a, b);
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
    }
}
