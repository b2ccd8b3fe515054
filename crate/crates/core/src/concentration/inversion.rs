//! Fourier inversion `P(x) = |G|^{-1} sum_zeta phi(zeta) e(-zeta . x)`, checked in
//! floating point and exactly in the cyclotomic field `Q(e(1/L))`.

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{walk_distribution, StepLaw, WeightMultiset};
use crate::error::{Error, Result};

/// Largest `|recovered - P(x)|` over the group when the law is rebuilt from
/// its characters in double precision.
pub fn inversion_residual(a: &WeightMultiset, law: StepLaw) -> Result<f64> {
    let g = a.group();
    let order = g.order_or_err()?;
    let l = g.exponent()?;
    let (coeffs, den) = law.coefficient_weights()?;
    let elems: Vec<_> = g.elements()?.collect();
    let chars: Vec<(f64, f64)> = elems
        .iter()
        .map(|zeta| {
            let mut acc = (1.0, 0.0);
            for (x, m) in a.items() {
                let t = g.pairing_num(zeta, x, l) as f64 / l as f64;
                let f = coeffs.iter().fold((0.0, 0.0), |(re, im), &(c, w)| {
                    let th = TAU * t * c as f64;
                    (re + w as f64 * th.cos(), im + w as f64 * th.sin())
                });
                let f = (f.0 / den as f64, f.1 / den as f64);
                for _ in 0..*m {
                    acc = (acc.0 * f.0 - acc.1 * f.1, acc.0 * f.1 + acc.1 * f.0);
                }
            }
            acc
        })
        .collect();
    let dist = walk_distribution(a, law)?;
    let mut worst = 0.0f64;
    for x in &elems {
        let mut re = 0.0;
        for (zeta, &(cr, ci)) in elems.iter().zip(&chars) {
            let th = -TAU * g.pairing_num(zeta, x, l) as f64 / l as f64;
            re += cr * th.cos() - ci * th.sin();
        }
        let p: f64 = num_traits::ToPrimitive::to_f64(&dist.prob(x)).unwrap_or(f64::NAN);
        worst = worst.max((re / order as f64 - p).abs());
    }
    Ok(worst)
}

/// Minimal polynomial of `e(1/l)` over the integers, lowest degree first.
fn cyclotomic(l: usize) -> Vec<i128> {
    let mut phis: Vec<Vec<i128>> = vec![vec![]; l + 1];
    for d in 1..=l {
        if !l.is_multiple_of(d) {
            continue;
        }
        let mut p = vec![0i128; d + 1];
        p[0] = -1;
        p[d] = 1;
        for e in 1..d {
            if d % e == 0 {
                p = div_monic(&p, &phis[e]);
            }
        }
        phis[d] = p;
    }
    phis.swap_remove(l)
}

fn div_monic(num: &[i128], den: &[i128]) -> Vec<i128> {
    let mut rem = num.to_vec();
    let dl = den.len();
    let mut q = vec![0i128; num.len() + 1 - dl];
    for i in (0..q.len()).rev() {
        let c = rem[i + dl - 1];
        q[i] = c;
        for j in 0..dl {
            rem[i + j] -= c * den[j];
        }
    }
    q
}

fn reduce(mut p: Vec<i128>, phi: &[i128]) -> Vec<i128> {
    let dl = phi.len();
    while p.len() >= dl {
        let c = p.pop().unwrap_or(0);
        let top = p.len();
        for j in 0..dl - 1 {
            p[top + 1 - dl + j] -= c * phi[j];
        }
    }
    p
}

/// Group-ring product in `Z[Z/l]`.
fn ring_mul(a: &[i128], b: &[i128]) -> Result<Vec<i128>> {
    let l = a.len();
    let mut out = vec![0i128; l];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            let t = x.checked_mul(y).and_then(|t| t.checked_add(out[(i + j) % l]));
            out[(i + j) % l] = t.ok_or_else(|| Error::Resource("exact inversion overflows i128".into()))?;
        }
    }
    Ok(out)
}

/// Whether inversion reproduces every point probability exactly.
pub fn inversion_exact(a: &WeightMultiset, law: StepLaw) -> Result<bool> {
    let g = a.group();
    let order = g.order_or_err()?;
    let l = g.exponent()? as usize;
    let (coeffs, den) = law.coefficient_weights()?;
    let elems: Vec<_> = g.elements()?.collect();
    // chi(zeta) scaled by den^n, as an element of Z[Z/l].
    let mut chars = Vec::with_capacity(elems.len());
    for zeta in &elems {
        let mut acc = vec![0i128; l];
        acc[0] = 1;
        for (x, m) in a.items() {
            let e = g.pairing_num(zeta, x, l as u64) as i64;
            let mut f = vec![0i128; l];
            for &(c, w) in &coeffs {
                f[(c * e).rem_euclid(l as i64) as usize] += w as i128;
            }
            for _ in 0..*m {
                acc = ring_mul(&acc, &f)?;
            }
        }
        chars.push(acc);
    }
    let phi = cyclotomic(l);
    let dist = walk_distribution(a, law)?;
    let scale = BigRational::from_integer(BigInt::from(den).pow(a.n() as u32) * BigInt::from(order));
    for x in &elems {
        let mut total = vec![0i128; l];
        for (zeta, chi) in elems.iter().zip(&chars) {
            let back = (l - g.pairing_num(zeta, x, l as u64) as usize) % l;
            for (i, &c) in chi.iter().enumerate() {
                total[(i + back) % l] += c;
            }
        }
        let total = reduce(total, &phi);
        if total.iter().skip(1).any(|&c| c != 0) {
            return Ok(false);
        }
        let want = dist.prob(x) * &scale;
        let got = BigRational::from_integer(total.first().copied().unwrap_or(0).into());
        if want != got {
            return Ok(false);
        }
    }
    Ok(true)
}
