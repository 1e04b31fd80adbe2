//! Checkers for RSOP revenue bounds and per-realization truthfulness.

use serde::{Deserialize, Serialize};

use super::{
    partition_bids, rsop_on_bids, rsop_revenue_sorted, sample_seed, Partition, Side,
    EXACT_PARTITION_LIMIT,
};
use crate::bids::{check_value, BidVector};
use crate::error::{Error, Result};
use crate::mechanism::monopolistic_outcome;
use crate::rsop::manipulation::SUBSET_EVALUATION_BUDGET;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Enumeration {
    /// All `2^n` partitions; `n <= 20`.
    Exhaustive,
    /// `samples` partitions drawn from `seed`.
    Sampled { samples: u64, seed: u64 },
}

impl Enumeration {
    /// Exhaustive when feasible, otherwise sampled.
    pub fn auto(n: usize, samples: u64, seed: u64) -> Self {
        if n <= EXACT_PARTITION_LIMIT {
            Self::Exhaustive
        } else {
            Self::Sampled { samples, seed }
        }
    }
}

/// A partition (of a kept subset) on which RSOP beat the monopolistic
/// revenue.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub kept_ranks: Vec<usize>,
    pub partition: Partition,
    pub rsop: f64,
    pub monopolistic: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjectureCheck {
    pub holds: bool,
    pub witness: Option<Witness>,
    pub checked: u64,
    /// Largest observed `RSOP / R`.
    pub max_ratio: f64,
}

fn partitions(n: usize, how: Enumeration) -> Result<Box<dyn Iterator<Item = Partition>>> {
    match how {
        Enumeration::Exhaustive => {
            if n > EXACT_PARTITION_LIMIT {
                return Err(Error::BudgetExceeded {
                    n,
                    budget: 1 << EXACT_PARTITION_LIMIT,
                });
            }
            Ok(Box::new((0..1u64 << n).map(move |m| Partition::from_mask(n, m))))
        }
        Enumeration::Sampled { samples, seed } => Ok(Box::new(
            (0..samples).map(move |s| partition_bids(n, sample_seed(seed, s))),
        )),
    }
}

/// Checks `RSOP(b) <= R(b)` on every enumerated partition and reports the
/// first violation.
pub fn check_rsop_leq_monopolistic(bids: &BidVector, how: Enumeration) -> Result<ConjectureCheck> {
    let r = monopolistic_outcome(bids).revenue;
    let sorted = bids.as_slice();
    let mut check = ConjectureCheck {
        holds: true,
        witness: None,
        checked: 0,
        max_ratio: 0.0,
    };
    for part in partitions(sorted.len(), how)? {
        let rsop = rsop_revenue_sorted(sorted, |i| part.assignment[i] == Side::A);
        check.checked += 1;
        if r > 0.0 {
            check.max_ratio = check.max_ratio.max(rsop / r);
        }
        if rsop > r && check.witness.is_none() {
            check.holds = false;
            check.witness = Some(Witness {
                kept_ranks: (0..sorted.len()).collect(),
                partition: part,
                rsop,
                monopolistic: r,
            });
        }
    }
    Ok(check)
}

/// Checks `RSOP(b') <= R(b)` for every subset `b'` of `b` and every
/// partition of it. Costs `3^n` evaluations.
pub fn check_rsop_subsets_leq_monopolistic(bids: &BidVector) -> Result<ConjectureCheck> {
    let n = bids.len();
    if 3u64.saturating_pow(n as u32) > SUBSET_EVALUATION_BUDGET {
        return Err(Error::BudgetExceeded {
            n,
            budget: SUBSET_EVALUATION_BUDGET,
        });
    }
    let r = monopolistic_outcome(bids).revenue;
    let v = bids.as_slice();
    let mut check = ConjectureCheck {
        holds: true,
        witness: None,
        checked: 0,
        max_ratio: 0.0,
    };
    for keep in 0..1u64 << n {
        let ranks: Vec<usize> = (0..n).filter(|i| keep >> i & 1 == 1).collect();
        let sub: Vec<f64> = ranks.iter().map(|&i| v[i]).collect();
        for mask in 0..1u64 << sub.len() {
            let rsop = rsop_revenue_sorted(&sub, |i| mask >> i & 1 == 1);
            check.checked += 1;
            if r > 0.0 {
                check.max_ratio = check.max_ratio.max(rsop / r);
            }
            if rsop > r && check.witness.is_none() {
                check.holds = false;
                check.witness = Some(Witness {
                    kept_ranks: ranks.clone(),
                    partition: Partition::from_mask(sub.len(), mask),
                    rsop,
                    monopolistic: r,
                });
            }
        }
    }
    Ok(check)
}

/// Utility of bidder `index` with true value `value` when it submits `bid`
/// and everyone else bids as in `bids`. The partition is by index and does
/// not depend on the bids.
pub fn utility(bids: &[f64], index: usize, value: f64, bid: f64, part: &Partition) -> Result<f64> {
    let mut submitted = bids.to_vec();
    submitted[index] = bid;
    let o = rsop_on_bids(&submitted, part, 0.0)?;
    Ok(o.fee(index).map_or(0.0, |price| value - price))
}

/// True iff bidding the true value `v[i]` is at least as good for bidder
/// `i` as every bid in `deviations`, on the fixed partition `part`.
pub fn truthfulness_probe(
    v: &BidVector,
    i: usize,
    deviations: &[f64],
    part: &Partition,
) -> Result<bool> {
    if i >= v.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: v.len(),
        });
    }
    if part.len() != v.len() {
        return Err(Error::LengthMismatch {
            partition: part.len(),
            bids: v.len(),
        });
    }
    let value = v[i];
    let honest = utility(v, i, value, value, part)?;
    for &d in deviations {
        check_value(d)?;
        if utility(v, i, value, d, part)? > honest {
            return Ok(false);
        }
    }
    Ok(true)
}
