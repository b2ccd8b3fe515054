use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub const MAX_KR: u32 = 3;
pub const MAX_S: u64 = 100;

/// Number of `k`-tuples of integers whose largest absolute value is exactly `alpha`.
fn column_count(k: u32, alpha: u64) -> u128 {
    if alpha == 0 {
        1
    } else {
        (2 * alpha as u128 + 1).pow(k) - (2 * alpha as u128 - 1).pow(k)
    }
}

fn count_columns(k: u32, r: u32, budget: u64) -> u128 {
    if r == 0 {
        return 1;
    }
    (0..=budget).map(|alpha| column_count(k, alpha) * count_columns(k, r - 1, budget / alpha.max(1))).sum()
}

/// Number of integer vectors `x_1..x_k` in `Z^r` with
/// `prod_j max(1, alpha_j) <= s`, where `alpha_j = max_i |x_ij|`.
pub fn count_vectors(k: u32, r: u32, s: u64) -> Result<u128> {
    if !(1..=MAX_KR).contains(&k) || !(1..=MAX_KR).contains(&r) || !(1..=MAX_S).contains(&s) {
        return invalid(format!("count_vectors needs 1 <= k, r <= {MAX_KR} and 1 <= s <= {MAX_S}"));
    }
    Ok(count_columns(k, r, s))
}

/// `2^{c k r} s^k (ln s)^{r-1}`.
pub fn claim_bound(k: u32, r: u32, s: u64, c: f64) -> f64 {
    let s = s as f64;
    (c * (k * r) as f64).exp2() * s.powi(k as i32) * s.ln().powi(r as i32 - 1)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClaimCell {
    pub k: u32,
    pub r: u32,
    pub s: u64,
    pub count: u128,
    /// Smallest `c` for which the bound holds on this cell.
    pub required_c: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClaimFit {
    pub c: f64,
    pub limit: f64,
    pub pass: bool,
    pub worst: Option<ClaimCell>,
    pub cells: Vec<ClaimCell>,
}

/// Least `c` making `count_vectors <= claim_bound` on the whole grid.
pub fn fit_claim_constant(ks: &[u32], rs: &[u32], ss: &[u64], limit: f64) -> Result<ClaimFit> {
    let mut cells = Vec::new();
    for &k in ks {
        for &r in rs {
            for &s in ss {
                if s < 2 {
                    return invalid("the bound vanishes at s = 1 for r >= 2; start the grid at s = 2");
                }
                let count = count_vectors(k, r, s)?;
                let base = claim_bound(k, r, s, 0.0);
                let required_c = ((count as f64 / base).log2() / (k * r) as f64).max(0.0);
                cells.push(ClaimCell { k, r, s, count, required_c });
            }
        }
    }
    let worst = cells.iter().max_by(|a, b| a.required_c.total_cmp(&b.required_c)).cloned();
    let c = worst.as_ref().map_or(0.0, |w| w.required_c);
    let ok = cells.iter().all(|cell| cell.count as f64 <= claim_bound(cell.k, cell.r, cell.s, c) * (1.0 + 1e-12));
    Ok(ClaimFit { c, limit, pass: ok && c <= limit, worst, cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct enumeration of all `k x r` integer matrices with entries in `[-s, s]`.
    fn brute(k: u32, r: u32, s: u64) -> u128 {
        let cells = (k * r) as usize;
        let s = s as i64;
        let width = (2 * s + 1) as usize;
        let mut count = 0u128;
        let mut idx = vec![0usize; cells];
        loop {
            let mut prod: u64 = 1;
            for j in 0..r as usize {
                let alpha = (0..k as usize).map(|i| (idx[i * r as usize + j] as i64 - s).unsigned_abs()).max().unwrap();
                prod = prod.saturating_mul(alpha.max(1));
            }
            if prod <= s as u64 {
                count += 1;
            }
            let mut p = 0;
            loop {
                if p == cells {
                    return count;
                }
                idx[p] += 1;
                if idx[p] < width {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
        }
    }

    #[test]
    fn examples() {
        assert_eq!(count_vectors(1, 1, 3).unwrap(), 7);
        assert_eq!(count_vectors(1, 1, 1).unwrap(), 3);
        // |x1|, |x2| in {0,1}: 9 vectors; one coordinate of size 2 and the other in {0,1}: 2 * 2 * 3.
        assert_eq!(count_vectors(1, 2, 2).unwrap(), 21);
        assert_eq!(count_vectors(1, 3, 2).unwrap(), 81);
        assert!(count_vectors(4, 1, 2).is_err());
        assert!(count_vectors(1, 1, 101).is_err());
    }

    #[test]
    fn matches_enumeration() {
        for (k, r, s) in [(1, 1, 9), (2, 1, 5), (1, 2, 7), (2, 2, 4), (3, 1, 3), (1, 3, 4), (2, 3, 2), (3, 2, 2)] {
            assert_eq!(count_vectors(k, r, s).unwrap(), brute(k, r, s), "k={k} r={r} s={s}");
        }
    }

    #[test]
    fn monotone_in_s() {
        for k in 1..=3 {
            for r in 1..=3 {
                let counts: Vec<u128> = (1..=30).map(|s| count_vectors(k, r, s).unwrap()).collect();
                assert!(counts.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }

    #[test]
    fn fitted_constant() {
        let ss: Vec<u64> = (2..=100).collect();
        let fit = fit_claim_constant(&[1, 2, 3], &[1, 2, 3], &ss, 4.0).unwrap();
        assert!(fit.pass, "c = {}", fit.c);
        assert_eq!(fit.cells.len(), 9 * 99);
        assert!(fit_claim_constant(&[1], &[2], &[1], 4.0).is_err());
    }
}
