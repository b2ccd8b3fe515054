use std::f64::consts::TAU;

use num_rational::Ratio;

use super::{check_alpha, StepLaw, WeightMultiset};
use crate::error::{invalid, Error, Result};
use crate::group::{dist_units, GroupElement};

/// `sum_i ||zeta . a_i (+ 1/2)||^2` as the exact fraction `num / den`, where
/// `den = 4 L^2` and `L` is the exponent of the group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelStatistic {
    pub num: u128,
    pub den: u128,
}

impl LevelStatistic {
    pub fn ratio(&self) -> Ratio<u128> {
        Ratio::new(self.num, self.den)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn check_zeta(a: &WeightMultiset, zeta: &GroupElement) -> Result<u64> {
    let g = a.group();
    if g.is_torsion_free() {
        return Err(Error::Unsupported("characters are evaluated on finite groups only".into()));
    }
    if !g.contains(zeta) {
        return Err(Error::GroupMismatch(format!("{zeta} is not an element of {g}")));
    }
    g.exponent()
}

pub fn level_statistic(a: &WeightMultiset, zeta: &GroupElement, shifted: bool) -> Result<LevelStatistic> {
    let l = check_zeta(a, zeta)?;
    let g = a.group();
    let num = a
        .items()
        .iter()
        .map(|(x, m)| {
            let d = dist_units(g.pairing_num(zeta, x, l), l, shifted) as u128;
            d * d * *m as u128
        })
        .sum();
    Ok(LevelStatistic { num, den: 4 * l as u128 * l as u128 })
}

/// Phases `zeta . a` in `[0, 1)` with multiplicities.
fn phases(a: &WeightMultiset, zeta: &GroupElement) -> Result<Vec<(f64, u64)>> {
    let l = check_zeta(a, zeta)?;
    let g = a.group();
    Ok(a.items()
        .iter()
        .map(|(x, m)| (g.pairing_num(zeta, x, l) as f64 / l as f64, *m))
        .collect())
}

/// `|E e(zeta . S)|` for `S = sum a_i x_i` with coefficients drawn from `law`.
pub fn fourier_coefficient(a: &WeightMultiset, law: StepLaw, zeta: &GroupElement) -> Result<f64> {
    let ph = phases(a, zeta)?;
    let factor = |t: f64| -> Result<f64> {
        let c = (TAU * t).cos();
        Ok(match law {
            StepLaw::Lazy { alpha } => {
                let al = alpha_f64(alpha);
                (1.0 - al + al * c).abs()
            }
            StepLaw::Bernoulli01 { alpha } => {
                let al = alpha_f64(alpha);
                let s = (TAU * t).sin();
                ((1.0 - al + al * c).powi(2) + (al * s).powi(2)).sqrt()
            }
            StepLaw::Signed => c.abs(),
            StepLaw::UniformOnA => {
                return Err(Error::Unsupported("use word_fourier_coefficient for word walks".into()))
            }
        })
    };
    let mut acc = 1.0;
    for (t, m) in ph {
        acc *= factor(t)?.powi(m as i32);
    }
    Ok(acc)
}

/// `|(1/n) sum_i e(zeta . a_i)|^m`, the character of the `m`-step word walk.
pub fn word_fourier_coefficient(a: &WeightMultiset, m: u64, zeta: &GroupElement) -> Result<f64> {
    let ph = phases(a, zeta)?;
    let n = a.n() as f64;
    let (re, im) = ph.iter().fold((0.0, 0.0), |(re, im), &(t, k)| {
        (re + k as f64 * (TAU * t).cos(), im + k as f64 * (TAU * t).sin())
    });
    Ok(((re / n).hypot(im / n)).powi(m as i32))
}

fn alpha_f64(alpha: Ratio<u64>) -> f64 {
    *alpha.numer() as f64 / *alpha.denom() as f64
}

/// `exp(-8 min(alpha, 1 - alpha) sum_i ||zeta . a_i (+ 1/2)||^2)`.
pub fn fourier_exp_bound(a: &WeightMultiset, alpha: Ratio<u64>, zeta: &GroupElement, shifted: bool) -> Result<f64> {
    check_alpha(alpha)?;
    if !shifted && (*alpha.numer() == 0 || alpha == Ratio::from_integer(1)) {
        return invalid("the exponential bound needs 0 < alpha < 1");
    }
    let al = alpha_f64(alpha);
    let s = level_statistic(a, zeta, shifted)?.to_f64();
    Ok((-8.0 * al.min(1.0 - al) * s).exp())
}

/// `exp(-(8/n) min(sum ||zeta . a_i||^2, sum ||zeta . a_i + 1/2||^2))`, which
/// dominates `|(1/n) sum_i cos(2 pi zeta . a_i)|`.
pub fn word_exp_bound(a: &WeightMultiset, zeta: &GroupElement) -> Result<f64> {
    let s0 = level_statistic(a, zeta, false)?.to_f64();
    let s1 = level_statistic(a, zeta, true)?.to_f64();
    Ok((-8.0 / a.n() as f64 * s0.min(s1)).exp())
}
