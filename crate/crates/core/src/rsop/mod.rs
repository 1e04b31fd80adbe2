//! Random Sampling Optimal Price auction.
//!
//! Bids are split at random into two sides. Each side's monopolistic price
//! is computed, and every bid is offered the price of the *other* side: a
//! bid wins iff it is at least that price and pays exactly that price. An
//! empty side has price zero.
//!
//! Partitions are addressed by bid index. For a [`BidVector`] the index is
//! the rank in descending order; for a [`Block`] it is the transaction
//! order.

mod block;
mod conjecture;
mod manipulation;

pub use block::{verify_block, Block, BlockVerification, Transaction, TxFee};
pub use conjecture::{
    check_rsop_leq_monopolistic, check_rsop_subsets_leq_monopolistic, truthfulness_probe,
    utility, ConjectureCheck, Enumeration,
};
pub use manipulation::{
    expected_false_bid_revenue, false_bid_net_revenue, false_bid_strategy, remove_bids_search,
    FalseBids, RemovalResult, RemovalSearch,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bids::BidVector;
use crate::error::{Error, Result};
use crate::mechanism::monopolistic_scan;
use crate::rng::{derive_seed, Xoshiro256StarStar};

/// Largest vector for which all `2^n` partitions are enumerated.
pub const EXACT_PARTITION_LIMIT: usize = 20;

/// Default fraction of block revenue carried forward to the next miner.
pub const DEFAULT_ALPHA: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

/// Assignment of each bid index to a side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub assignment: Vec<Side>,
    /// Seed the partition was drawn from; `None` for enumerated or
    /// hand-built partitions.
    pub seed: Option<u64>,
}

impl Partition {
    /// Bit `i` of `mask` set puts index `i` in `A`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!(n <= 64);
        let assignment = (0..n)
            .map(|i| if mask >> i & 1 == 1 { Side::A } else { Side::B })
            .collect();
        Self {
            assignment,
            seed: None,
        }
    }

    pub fn from_sides(assignment: Vec<Side>) -> Self {
        Self {
            assignment,
            seed: None,
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn in_a(&self) -> usize {
        self.assignment.iter().filter(|s| **s == Side::A).count()
    }
}

/// Draws a partition of `n` indices from `seed`.
///
/// The stream generator is seeded with `seed`; index `i` takes the `i`-th
/// output and goes to `A` iff its most significant bit is 1.
pub fn partition_bids(n: usize, seed: u64) -> Partition {
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let assignment = (0..n)
        .map(|_| if rng.next_bit() { Side::A } else { Side::B })
        .collect();
    Partition {
        assignment,
        seed: Some(seed),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RsopOutcome {
    pub p_a: f64,
    pub p_b: f64,
    /// Indices in `A` with bid at least `p_b`.
    pub winners_a: Vec<usize>,
    /// Indices in `B` with bid at least `p_a`.
    pub winners_b: Vec<usize>,
    pub revenue: f64,
    pub miner_share: f64,
    pub carry_share: f64,
}

impl RsopOutcome {
    /// Price paid by `index`, if it wins.
    pub fn fee(&self, index: usize) -> Option<f64> {
        if self.winners_a.contains(&index) {
            Some(self.p_b)
        } else if self.winners_b.contains(&index) {
            Some(self.p_a)
        } else {
            None
        }
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

fn side_price(bids: &[f64], part: &Partition, side: Side) -> f64 {
    let mut mine: Vec<f64> = bids
        .iter()
        .zip(&part.assignment)
        .filter(|(_, s)| **s == side)
        .map(|(b, _)| *b)
        .collect();
    mine.sort_unstable_by(|a, b| b.total_cmp(a));
    monopolistic_scan(mine.as_slice(), usize::MAX).price
}

/// RSOP outcome for bids in arbitrary index order.
pub fn rsop_on_bids(bids: &[f64], part: &Partition, alpha: f64) -> Result<RsopOutcome> {
    if part.len() != bids.len() {
        return Err(Error::LengthMismatch {
            partition: part.len(),
            bids: bids.len(),
        });
    }
    check_alpha(alpha)?;
    let p_a = side_price(bids, part, Side::A);
    let p_b = side_price(bids, part, Side::B);
    let mut winners_a = Vec::new();
    let mut winners_b = Vec::new();
    for (i, (&b, side)) in bids.iter().zip(&part.assignment).enumerate() {
        match side {
            Side::A if b >= p_b => winners_a.push(i),
            Side::B if b >= p_a => winners_b.push(i),
            _ => {}
        }
    }
    let revenue = winners_a.len() as f64 * p_b + winners_b.len() as f64 * p_a;
    // Both subtractions are exact, so the shares add back to `revenue`
    // bit for bit; `carry_share` is within an ulp of `alpha * revenue`.
    let miner_share = revenue - alpha * revenue;
    let carry_share = revenue - miner_share;
    Ok(RsopOutcome {
        p_a,
        p_b,
        winners_a,
        winners_b,
        revenue,
        miner_share,
        carry_share,
    })
}

/// RSOP outcome for a sorted bid vector; index `i` is rank `i`.
pub fn rsop_outcome(bids: &BidVector, part: &Partition, alpha: f64) -> Result<RsopOutcome> {
    rsop_on_bids(bids.as_slice(), part, alpha)
}

/// RSOP revenue for descending `sorted` bids, with `in_a(i)` giving the
/// side of rank `i`. Allocation-free.
pub(crate) fn rsop_revenue_sorted(sorted: &[f64], in_a: impl Fn(usize) -> bool) -> f64 {
    let (mut count_a, mut count_b) = (0usize, 0usize);
    let (mut best_a, mut best_b) = (0.0f64, 0.0f64);
    let (mut p_a, mut p_b) = (0.0f64, 0.0f64);
    for (i, &b) in sorted.iter().enumerate() {
        if in_a(i) {
            count_a += 1;
            let r = count_a as f64 * b;
            if r >= best_a {
                best_a = r;
                p_a = b;
            }
        } else {
            count_b += 1;
            let r = count_b as f64 * b;
            if r >= best_b {
                best_b = r;
                p_b = b;
            }
        }
    }
    let (mut win_a, mut win_b) = (0usize, 0usize);
    for (i, &b) in sorted.iter().enumerate() {
        if in_a(i) {
            if b >= p_b {
                win_a += 1;
            }
        } else if b >= p_a {
            win_b += 1;
        }
    }
    win_a as f64 * p_b + win_b as f64 * p_a
}

/// A Monte Carlo or exact estimate of an expectation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    /// Standard error of the mean; zero for exact enumeration.
    pub stderr: f64,
    pub exact: bool,
    pub samples: u64,
}

impl Estimate {
    pub(crate) fn from_samples(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let stderr = if values.len() > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            stderr,
            exact: false,
            samples: values.len() as u64,
        }
    }
}

/// Exact expected RSOP revenue by enumerating all `2^n` partitions.
pub fn rsop_expected_revenue_exact(bids: &BidVector) -> Result<f64> {
    let n = bids.len();
    if n > EXACT_PARTITION_LIMIT {
        return Err(Error::BudgetExceeded {
            n,
            budget: 1 << EXACT_PARTITION_LIMIT,
        });
    }
    Ok(exact_mean_over_masks(bids.as_slice()))
}

pub(crate) fn exact_mean_over_masks(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    let total: f64 = (0..1u64 << n)
        .map(|mask| rsop_revenue_sorted(sorted, |i| mask >> i & 1 == 1))
        .sum();
    total / (1u64 << n) as f64
}

/// Sub-seed of Monte Carlo sample `s` under `seed`.
pub fn sample_seed(seed: u64, s: u64) -> u64 {
    derive_seed(seed, &[s])
}

/// Monte Carlo mean RSOP revenue over `samples` partitions drawn with
/// [`sample_seed`]. Deterministic for a fixed `seed` regardless of threads.
pub fn rsop_sampled_revenue(bids: &BidVector, samples: u64, seed: u64) -> Estimate {
    assert!(samples >= 1, "at least one sample is required");
    let sorted = bids.as_slice();
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let part = partition_bids(sorted.len(), sample_seed(seed, s));
            rsop_revenue_sorted(sorted, |i| part.assignment[i] == Side::A)
        })
        .collect();
    Estimate::from_samples(&values)
}

/// Expected RSOP revenue: exact for `n <= 20`, otherwise sampled.
pub fn rsop_expected_revenue(bids: &BidVector, samples: u64, seed: u64) -> Estimate {
    if bids.len() <= EXACT_PARTITION_LIMIT {
        Estimate {
            mean: exact_mean_over_masks(bids.as_slice()),
            stderr: 0.0,
            exact: true,
            samples: 1 << bids.len(),
        }
    } else {
        rsop_sampled_revenue(bids, samples, seed)
    }
}
