use std::f64::consts::TAU;
use std::sync::Arc;

use rand::seq::index::sample;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::{median, rng};
use crate::error::{invalid, Result};
use crate::group::{reduced_elements, AbelianGroup};
use crate::progression::{search_cover, CoverOptions, ElementSet};

const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Schedule {
    /// Least `m <= max_m` found by doubling and bisection (distances are
    /// non-increasing in `m`).
    Exact { max_m: u64 },
    /// Least `m` among the listed step counts.
    Steps { steps: Vec<u64> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MixingConfig {
    pub q: u64,
    pub k: usize,
    /// `s_i`: each of `a_i` and `-a_i` appears `s_i` times. Empty means all 1.
    pub multiplicities: Vec<u64>,
    /// Copies of 0 among the steps.
    pub laziness: u64,
    pub delta: f64,
    pub schedule: Schedule,
    pub seed: u64,
    pub trials: usize,
}

impl MixingConfig {
    pub fn new(q: u64, k: usize) -> Self {
        MixingConfig {
            q,
            k,
            multiplicities: Vec::new(),
            laziness: 0,
            delta: 0.1,
            schedule: Schedule::Exact { max_m: 1 << 30 },
            seed: 1,
            trials: 20,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingPoint {
    pub m: u64,
    /// `q sup_a |P(S_m = a) - 1/q|`.
    pub discrepancy: f64,
    /// `sum_a |P(S_m = a) - 1/q| / 2`.
    pub total_variation: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MixingTrial {
    pub generators: Vec<u64>,
    pub points: Vec<MixingPoint>,
    /// Least `m` with total variation at most `delta`; none when unresolved.
    pub mixing_time: Option<u64>,
    pub monotone: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MixingReport {
    pub config: MixingConfig,
    pub trials: Vec<MixingTrial>,
    pub median_mixing_time: Option<f64>,
    pub unresolved: usize,
    pub monotone: bool,
}

/// Character values of a symmetric step law on `Z/q`, with the inverse FFT used
/// to recover `m`-step distributions.
pub struct WalkProfile {
    q: usize,
    phi: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

/// Steps `±a_i` with multiplicity `s_i` each, plus `laziness` copies of 0.
pub fn walk_profile(q: u64, generators: &[u64], multiplicities: &[u64], laziness: u64) -> Result<WalkProfile> {
    if q < 2 {
        return invalid("q must be at least 2");
    }
    if multiplicities.len() != generators.len() {
        return invalid("one multiplicity per generator");
    }
    let total = laziness + 2 * multiplicities.iter().sum::<u64>();
    if total == 0 {
        return invalid("the step law is empty");
    }
    let qf = q as f64;
    let phi = (0..q)
        .map(|z| {
            let s: f64 = generators
                .iter()
                .zip(multiplicities)
                .map(|(&a, &s)| 2.0 * s as f64 * (TAU * ((a % q) * z % q) as f64 / qf).cos())
                .sum();
            (laziness as f64 + s) / total as f64
        })
        .collect();
    let fft = FftPlanner::new().plan_fft_inverse(q as usize);
    Ok(WalkProfile { q: q as usize, phi, fft })
}

impl WalkProfile {
    /// `|phi(zeta)|` for every character.
    pub fn characters(&self) -> &[f64] {
        &self.phi
    }

    pub fn distribution(&self, m: u64) -> Vec<f64> {
        let mut buf: Vec<Complex<f64>> = self
            .phi
            .iter()
            .map(|&p| {
                let v = if m <= i32::MAX as u64 { p.powi(m as i32) } else { p.powf(m as f64) };
                Complex::new(v, 0.0)
            })
            .collect();
        self.fft.process(&mut buf);
        buf.iter().map(|c| c.re / self.q as f64).collect()
    }

    pub fn point(&self, m: u64) -> MixingPoint {
        let u = 1.0 / self.q as f64;
        let dist = self.distribution(m);
        let dev = dist.iter().map(|p| (p - u).abs());
        let (mut sup, mut sum) = (0.0f64, 0.0);
        for d in dev {
            sup = sup.max(d);
            sum += d;
        }
        MixingPoint { m, discrepancy: sup * self.q as f64, total_variation: sum / 2.0 }
    }

    /// Least `m` with total variation at most `delta` under the schedule, and
    /// every point evaluated on the way.
    pub fn mixing_time(&self, delta: f64, schedule: &Schedule) -> (Option<u64>, Vec<MixingPoint>) {
        let mut points = Vec::new();
        let eval = |m: u64, points: &mut Vec<MixingPoint>| {
            let p = self.point(m);
            points.push(p);
            p.total_variation <= delta
        };
        let found = match schedule {
            Schedule::Steps { steps } => {
                let mut steps = steps.clone();
                steps.sort_unstable();
                steps.dedup();
                let mut hit = None;
                for m in steps {
                    if eval(m, &mut points) && hit.is_none() {
                        hit = Some(m);
                    }
                }
                hit
            }
            Schedule::Exact { max_m } => {
                if eval(0, &mut points) {
                    Some(0)
                } else {
                    let mut hi = 1u64;
                    let mut ok = false;
                    while hi <= *max_m {
                        if eval(hi, &mut points) {
                            ok = true;
                            break;
                        }
                        hi *= 2;
                    }
                    if !ok && eval(*max_m, &mut points) {
                        hi = *max_m;
                        ok = true;
                    }
                    if ok {
                        let mut lo = hi / 2;
                        while hi - lo > 1 {
                            let mid = lo + (hi - lo) / 2;
                            if eval(mid, &mut points) {
                                hi = mid;
                            } else {
                                lo = mid;
                            }
                        }
                        Some(hi)
                    } else {
                        None
                    }
                }
            }
        };
        points.sort_by_key(|p| p.m);
        points.dedup_by_key(|p| p.m);
        (found, points)
    }
}

fn monotone(points: &[MixingPoint]) -> bool {
    points.windows(2).all(|w| {
        w[1].total_variation <= w[0].total_variation + MONOTONE_SLACK
            && w[1].discrepancy <= w[0].discrepancy * (1.0 + MONOTONE_SLACK) + MONOTONE_SLACK
    })
}

pub fn mixing_experiment(cfg: &MixingConfig) -> Result<MixingReport> {
    if cfg.k == 0 {
        return invalid("need at least one generator");
    }
    let pool = reduced_elements(cfg.q)?;
    if pool.len() < cfg.k {
        return invalid(format!("Z/{} has fewer than {} reduced elements", cfg.q, cfg.k));
    }
    let mults = if cfg.multiplicities.is_empty() { vec![1; cfg.k] } else { cfg.multiplicities.clone() };
    if mults.len() != cfg.k || mults.contains(&0) {
        return invalid("need one positive multiplicity per generator");
    }
    let mut rng = rng(cfg.seed);
    let mut trials = Vec::with_capacity(cfg.trials);
    for _ in 0..cfg.trials {
        let mut generators: Vec<u64> = sample(&mut rng, pool.len(), cfg.k).into_iter().map(|i| pool[i]).collect();
        generators.sort_unstable();
        let profile = walk_profile(cfg.q, &generators, &mults, cfg.laziness)?;
        let (mixing_time, points) = profile.mixing_time(cfg.delta, &cfg.schedule);
        trials.push(MixingTrial { monotone: monotone(&points), generators, points, mixing_time });
    }
    let times: Vec<f64> = trials.iter().filter_map(|t| t.mixing_time.map(|m| m as f64)).collect();
    let unresolved = trials.len() - times.len();
    let median_mixing_time = if unresolved * 2 < trials.len() {
        let mut all: Vec<f64> = trials.iter().map(|t| t.mixing_time.map_or(f64::INFINITY, |m| m as f64)).collect();
        all.sort_by(|a, b| a.total_cmp(b));
        median(&all).filter(|m| m.is_finite())
    } else {
        None
    };
    Ok(MixingReport {
        monotone: trials.iter().all(|t| t.monotone),
        config: cfg.clone(),
        trials,
        median_mixing_time,
        unresolved,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SlopeFit {
    pub k: usize,
    pub points: Vec<(u64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Least-squares fit of `ln m*(q) = s ln q + b` over the median mixing times.
pub fn fit_mixing_exponent(
    k: usize,
    q_values: &[u64],
    delta: f64,
    trials: usize,
    seed: u64,
    tolerance: f64,
) -> Result<(SlopeFit, Vec<MixingReport>)> {
    if q_values.len() < 2 {
        return invalid("need at least two moduli to fit a slope");
    }
    let mut reports = Vec::new();
    let mut points = Vec::new();
    for (i, &q) in q_values.iter().enumerate() {
        let cfg = MixingConfig { delta, trials, seed: seed.wrapping_add(i as u64), ..MixingConfig::new(q, k) };
        let rep = mixing_experiment(&cfg)?;
        if let Some(m) = rep.median_mixing_time {
            points.push((q, m));
        }
        reports.push(rep);
    }
    let target = 2.0 / k as f64;
    let (slope, intercept) = least_squares(&points);
    let pass = points.len() == q_values.len() && (slope - target).abs() <= tolerance;
    Ok((SlopeFit { k, points, slope, intercept, target, tolerance, pass }, reports))
}

fn least_squares(points: &[(u64, f64)]) -> (f64, f64) {
    let xs: Vec<f64> = points.iter().map(|(q, _)| (*q as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, m)| m.max(1.0).ln()).collect();
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return (f64::NAN, f64::NAN);
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RankCheck {
    pub rank: usize,
    /// `|G| / (C delta m^{r/2})`.
    pub threshold: f64,
    pub cover_size: Option<u64>,
    /// Whether a cover within the threshold exists; none when the search was cut short.
    pub beats: Option<bool>,
    pub diagnostic: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub q: u64,
    pub generators: Vec<u64>,
    pub m: u64,
    pub delta: f64,
    pub c: f64,
    pub ranks: Vec<RankCheck>,
    /// No economical cover of any rank below `k`; none when unresolved.
    pub holds: Option<bool>,
    pub discrepancy: f64,
    pub total_variation: f64,
    /// `q sup_a |P(S_m = a) - 1/q| <= delta`.
    pub mixing_at_m: bool,
    pub consistent: Option<bool>,
}

/// Whether no symmetric proper coset-progression of rank `r < k` and size at most
/// `|G| / (C delta m^{r/2})` contains the generators. The whole group is not
/// counted as a cover.
pub fn progression_obstruction_check(
    q: u64,
    generators: &[u64],
    m: u64,
    delta: f64,
    c: f64,
    budget: u64,
) -> Result<ObstructionReport> {
    if generators.is_empty() {
        return invalid("need at least one generator");
    }
    if !(delta > 0.0 && c > 0.0) {
        return invalid("delta and C must be positive");
    }
    let g = AbelianGroup::cyclic(q)?;
    let mut xs = ElementSet::new();
    xs.insert(g.zero());
    for &a in generators {
        let e = g.scalar(a as i64)?;
        xs.insert(g.neg(&e));
        xs.insert(e);
    }
    let mut ranks = Vec::new();
    for r in 0..generators.len() {
        let threshold = q as f64 / (c * delta * (m as f64).powf(r as f64 / 2.0));
        if threshold < 1.0 {
            ranks.push(RankCheck { rank: r, threshold, cover_size: None, beats: Some(false), diagnostic: String::new() });
            continue;
        }
        let opts = CoverOptions {
            max_rank: r,
            require_symmetric: true,
            properness: 1,
            budget,
            exclude_full_group: true,
            size_limit: Some(threshold.floor() as u128),
            ..CoverOptions::default()
        };
        let out = search_cover(&g, &xs, &opts)?;
        let (cover_size, beats) = match (&out.cover, out.budget_exhausted) {
            (Some(cv), _) => (Some(cv.elements()?.len() as u64), Some(true)),
            (None, true) => (None, None),
            (None, false) => (None, Some(false)),
        };
        ranks.push(RankCheck { rank: r, threshold, cover_size, beats, diagnostic: out.diagnostic });
    }
    let holds = if ranks.iter().any(|r| r.beats == Some(true)) {
        Some(false)
    } else if ranks.iter().all(|r| r.beats == Some(false)) {
        Some(true)
    } else {
        None
    };
    let profile = walk_profile(q, generators, &vec![1; generators.len()], 0)?;
    let point = profile.point(m);
    let mixing_at_m = point.discrepancy <= delta;
    Ok(ObstructionReport {
        q,
        generators: generators.to_vec(),
        m,
        delta,
        c,
        ranks,
        consistent: holds.map(|h| h == mixing_at_m),
        holds,
        discrepancy: point.discrepancy,
        total_variation: point.total_variation,
        mixing_at_m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lazy_walk_mod_3() {
        // Steps 0, +1, -1 with probabilities 1/2, 1/4, 1/4: nontrivial characters
        // equal 1/2 + cos(2 pi / 3) / 2 = 1/4, so P_10(0) - 1/3 = (2/3) 4^-10.
        let p = walk_profile(3, &[1], &[1], 2).unwrap();
        let dist = p.distribution(10);
        let expect0 = 1.0 / 3.0 + 2.0 / 3.0 * 0.25f64.powi(10);
        assert!((dist[0] - expect0).abs() < 1e-15);
        let pt = p.point(10);
        assert!(pt.discrepancy < 1e-2);
        // Direct ten-fold convolution.
        let mut v = vec![1.0, 0.0, 0.0];
        for _ in 0..10 {
            v = (0..3).map(|x| 0.5 * v[x] + 0.25 * v[(x + 1) % 3] + 0.25 * v[(x + 2) % 3]).collect();
        }
        for (a, b) in v.iter().zip(&dist) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn trivial_cases() {
        let p = walk_profile(7, &[2], &[1], 0).unwrap();
        let pt = p.point(0);
        assert!((pt.total_variation - 6.0 / 7.0).abs() < 1e-12);
        let (m, _) = p.mixing_time(2.0, &Schedule::Exact { max_m: 100 });
        assert_eq!(m, Some(0));
        let (m, _) = p.mixing_time(2.0, &Schedule::Steps { steps: vec![5, 3] });
        assert_eq!(m, Some(3));
    }

    #[test]
    fn exact_schedule_finds_least_time() {
        let p = walk_profile(31, &[3, 7], &[1, 1], 0).unwrap();
        let (m, points) = p.mixing_time(0.1, &Schedule::Exact { max_m: 1 << 20 });
        let m = m.unwrap();
        assert!(p.point(m).total_variation <= 0.1);
        assert!(p.point(m - 1).total_variation > 0.1);
        assert!(monotone(&points));
        // Even modulus with no laziness never mixes.
        let p = walk_profile(8, &[1], &[1], 0).unwrap();
        assert_eq!(p.mixing_time(0.1, &Schedule::Exact { max_m: 1 << 12 }).0, None);
    }

    #[test]
    fn experiment_is_monotone_and_seeded() {
        let cfg = MixingConfig { trials: 5, laziness: 2, ..MixingConfig::new(101, 2) };
        let a = mixing_experiment(&cfg).unwrap();
        let b = mixing_experiment(&cfg).unwrap();
        assert!(a.monotone);
        assert_eq!(a.unresolved, 0);
        let ga: Vec<_> = a.trials.iter().map(|t| t.generators.clone()).collect();
        let gb: Vec<_> = b.trials.iter().map(|t| t.generators.clone()).collect();
        assert_eq!(ga, gb);
        for t in &a.trials {
            assert!(t.generators.windows(2).all(|w| w[0] != w[1]));
        }
    }

    #[test]
    fn single_generator_exponent() {
        // k = 1: m* grows like q^2.
        let (fit, _) = fit_mixing_exponent(1, &[31, 61, 101], 0.1, 3, 5, 0.3).unwrap();
        assert!(fit.pass, "slope {}", fit.slope);
    }

    #[test]
    fn obstruction_examples() {
        // k = 1: threshold below one, nothing can beat it.
        let rep = progression_obstruction_check(101, &[3], 10, 0.1, 1000.0, 1_000_000).unwrap();
        assert_eq!(rep.holds, Some(true));
        // k = 2, a = (1, 2): the rank-1 cover {-2..2} has 5 elements.
        let rep = progression_obstruction_check(101, &[1, 2], 4, 0.1, 100.0, 10_000_000).unwrap();
        assert_eq!(rep.ranks[1].cover_size, Some(5));
        assert_eq!(rep.holds, Some(false));
        let rep = progression_obstruction_check(101, &[1, 2], 4, 0.1, 102.0, 10_000_000).unwrap();
        assert_eq!(rep.holds, Some(true));
        // Generators inside the subgroup of order 10 in Z/100.
        let rep = progression_obstruction_check(100, &[10, 30], 4, 0.1, 1.0, 10_000_000).unwrap();
        assert_eq!(rep.ranks[0].cover_size, Some(10));
        assert_eq!(rep.holds, Some(false));
    }
}
