//! Miner deviations: padding the block with self-paid bids at the
//! monopolistic price, and dropping genuine bids.

use super::{
    exact_mean_over_masks, partition_bids, rsop_on_bids, rsop_sampled_revenue, sample_seed,
    Estimate, Partition, EXACT_PARTITION_LIMIT,
};
use crate::bids::BidVector;
use crate::error::{Error, Result};
use crate::mechanism::monopolistic_outcome;

/// Hard cap on vector length for exhaustive subset search.
pub const EXHAUSTIVE_SUBSET_LIMIT: usize = 16;

/// Partition evaluations allowed for exhaustive subset search. Every
/// subset `S` costs `2^|S|`, so the total is `3^n`.
pub const SUBSET_EVALUATION_BUDGET: u64 = 1 << 24;

/// Genuine bids plus miner-owned copies at the monopolistic price.
#[derive(Clone, Debug, PartialEq)]
pub struct FalseBids {
    pub bids: BidVector,
    /// `miner_owned[rank]` marks the inserted copies.
    pub miner_owned: Vec<bool>,
    pub price: f64,
}

/// Adds `copies` miner-owned bids equal to the monopolistic price of `bids`.
/// The copies rank after every genuine bid of the same value. An empty
/// vector has price zero and is returned unchanged.
pub fn false_bid_strategy(bids: &BidVector, copies: usize) -> FalseBids {
    let price = monopolistic_outcome(bids).price;
    if bids.is_empty() || copies == 0 {
        return FalseBids {
            bids: bids.clone(),
            miner_owned: vec![false; bids.len()],
            price,
        };
    }
    let at = bids.num_at_least(price);
    let augmented = bids
        .with_copies(price, copies)
        .expect("monopolistic price of a non-empty vector is a valid bid");
    let miner_owned = (0..augmented.len())
        .map(|r| (at..at + copies).contains(&r))
        .collect();
    FalseBids {
        bids: augmented,
        miner_owned,
        price,
    }
}

/// Miner's net take for one partition: it keeps `1 - alpha` of every fee,
/// but the fees on its own winning bids come out of its pocket, so the net
/// is `(1 - alpha) * genuine_fees - alpha * own_fees`.
pub fn false_bid_net_revenue(fb: &FalseBids, part: &Partition, alpha: f64) -> Result<f64> {
    let o = rsop_on_bids(fb.bids.as_slice(), part, alpha)?;
    let (mut genuine, mut own) = (0.0, 0.0);
    let fees = (o.winners_a.iter().map(|&i| (i, o.p_b))).chain(o.winners_b.iter().map(|&i| (i, o.p_a)));
    for (i, fee) in fees {
        if fb.miner_owned[i] {
            own += fee;
        } else {
            genuine += fee;
        }
    }
    Ok((1.0 - alpha) * genuine - alpha * own)
}

/// Expected net take under the false-bid strategy; exact for at most 20
/// bids, otherwise `samples` partitions from `seed`.
pub fn expected_false_bid_revenue(
    fb: &FalseBids,
    alpha: f64,
    samples: u64,
    seed: u64,
) -> Result<Estimate> {
    let n = fb.bids.len();
    if n <= EXACT_PARTITION_LIMIT {
        let mut total = 0.0;
        for mask in 0..1u64 << n {
            total += false_bid_net_revenue(fb, &Partition::from_mask(n, mask), alpha)?;
        }
        return Ok(Estimate {
            mean: total / (1u64 << n) as f64,
            stderr: 0.0,
            exact: true,
            samples: 1 << n,
        });
    }
    let values = (0..samples)
        .map(|s| false_bid_net_revenue(fb, &partition_bids(n, sample_seed(seed, s)), alpha))
        .collect::<Result<Vec<_>>>()?;
    Ok(Estimate::from_samples(&values))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RemovalSearch {
    /// Every subset, each scored by exact expected revenue.
    Exhaustive,
    /// Only top-`k` prefixes of the sorted vector. Prefixes longer than 20
    /// bids are scored with `samples` sampled partitions.
    Greedy { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RemovalResult {
    pub kept: BidVector,
    /// Ranks of the kept bids in the input vector.
    pub kept_ranks: Vec<usize>,
    pub expected_revenue: f64,
    /// Expected revenue with nothing removed.
    pub honest_revenue: f64,
}

fn subset(bids: &[f64], mask: u64) -> Vec<f64> {
    bids.iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, b)| *b)
        .collect()
}

/// Searches for the set of bids to keep that maximizes expected RSOP
/// revenue. Ties keep the larger set.
pub fn remove_bids_search(bids: &BidVector, mode: RemovalSearch) -> Result<RemovalResult> {
    let n = bids.len();
    let v = bids.as_slice();
    match mode {
        RemovalSearch::Exhaustive => {
            let cost = 3u64.saturating_pow(n as u32);
            if n > EXHAUSTIVE_SUBSET_LIMIT || cost > SUBSET_EVALUATION_BUDGET {
                return Err(Error::BudgetExceeded {
                    n,
                    budget: SUBSET_EVALUATION_BUDGET,
                });
            }
            let full = (1u64 << n) - 1;
            let honest = exact_mean_over_masks(v);
            let (mut best_mask, mut best) = (full, honest);
            // Larger subsets first so ties keep more bids.
            let mut masks: Vec<u64> = (0..full).collect();
            masks.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));
            for mask in masks {
                let r = exact_mean_over_masks(&subset(v, mask));
                if r > best {
                    best = r;
                    best_mask = mask;
                }
            }
            Ok(RemovalResult {
                kept: BidVector::new(subset(v, best_mask))?,
                kept_ranks: (0..n).filter(|i| best_mask >> i & 1 == 1).collect(),
                expected_revenue: best,
                honest_revenue: honest,
            })
        }
        RemovalSearch::Greedy { samples, seed } => {
            let score = |k: usize| -> f64 {
                let prefix = &v[..k];
                if k <= EXACT_PARTITION_LIMIT {
                    exact_mean_over_masks(prefix)
                } else {
                    let prefix = BidVector::new(prefix.to_vec()).expect("prefix of valid bids");
                    rsop_sampled_revenue(&prefix, samples, seed).mean
                }
            };
            let honest = score(n);
            let (mut best_k, mut best) = (n, honest);
            for k in (1..n).rev() {
                let r = score(k);
                if r > best {
                    best = r;
                    best_k = k;
                }
            }
            Ok(RemovalResult {
                kept: BidVector::new(v[..best_k].to_vec())?,
                kept_ranks: (0..best_k).collect(),
                expected_revenue: best,
                honest_revenue: honest,
            })
        }
    }
}
