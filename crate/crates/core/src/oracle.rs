//! Brute-force reference for the multibid price.
//!
//! Shares no code with [`crate::strategic`]: feasibility is decided by
//! sorting the augmented vector and evaluating every block size.

use crate::bids::BidVector;
use crate::error::{Error, Result};

/// Points in the uniform grid over `(0, max bid]`.
pub const GRID_POINTS: usize = 10_000;

fn brute_price(mut all: Vec<f64>) -> f64 {
    all.sort_by(|a, b| b.total_cmp(a));
    let (mut best, mut price) = (f64::NEG_INFINITY, 0.0);
    for (k, &b) in all.iter().enumerate() {
        let r = (k + 1) as f64 * b;
        if r >= best {
            best = r;
            price = b;
        }
    }
    price
}

fn feasible(others: &[f64], b: f64, copies: usize) -> bool {
    let mut all = others.to_vec();
    all.extend(std::iter::repeat_n(b, copies));
    brute_price(all) <= b
}

/// Minimal total payment `u * b` over `u` in `[1, n]` (where `n` counts the
/// deviating bidder) and `b` in the candidate set `{R/m : 1 <= m <= n+u}`
/// (each with a few ulps of upward slack), the other bids, and a grid.
pub fn multibid_oracle(others: &BidVector) -> Result<f64> {
    if others.is_empty() {
        return Err(Error::EmptyOthers);
    }
    let w = others.as_slice();
    let n = w.len() + 1;
    let revenue = w
        .iter()
        .enumerate()
        .map(|(k, &b)| (k + 1) as f64 * b)
        .fold(0.0, f64::max);
    let top = w[0];
    let mut best = f64::INFINITY;
    for u in 1..=n {
        let mut candidates: Vec<f64> = w.to_vec();
        for m in 1..=n + u {
            let mut b = revenue / m as f64;
            for _ in 0..5 {
                candidates.push(b);
                b = b.next_up();
            }
        }
        candidates.extend((1..=GRID_POINTS).map(|g| top * g as f64 / GRID_POINTS as f64));
        candidates.sort_by(f64::total_cmp);
        for b in candidates {
            let total = u as f64 * b;
            if total >= best {
                break;
            }
            if feasible(w, b, u) {
                best = total;
                break;
            }
        }
    }
    Ok(best)
}
