//! The monopolistic-price mechanism and the pay-your-bid baseline.

use serde::{Deserialize, Serialize};

use crate::bids::{BidVector, RankedBids};

/// Revenue-maximizing uniform price for a set of bids.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonopolisticOutcome {
    pub revenue: f64,
    pub k_star: usize,
    pub price: f64,
}

impl MonopolisticOutcome {
    pub const EMPTY: Self = Self {
        revenue: 0.0,
        k_star: 0,
        price: 0.0,
    };
}

/// Maximizes `k * bid(k)` over `k = 1..=min(n, cap)`, breaking ties toward
/// the larger `k`.
pub fn monopolistic_scan<R: RankedBids + ?Sized>(bids: &R, cap: usize) -> MonopolisticOutcome {
    let upto = bids.len().min(cap);
    let mut best = MonopolisticOutcome::EMPTY;
    for rank in 0..upto {
        let price = bids.bid(rank);
        let k = rank + 1;
        let revenue = k as f64 * price;
        if revenue >= best.revenue {
            best = MonopolisticOutcome {
                revenue,
                k_star: k,
                price,
            };
        }
    }
    best
}

/// Monopolistic revenue `R(b)`, the optimal block size `k*` and the price
/// `b[k*]`. An empty vector has all three equal to zero.
pub fn monopolistic_outcome(bids: &BidVector) -> MonopolisticOutcome {
    monopolistic_scan(bids, usize::MAX)
}

/// Same as [`monopolistic_outcome`] with the block holding at most `cap`
/// transactions.
pub fn monopolistic_outcome_capped(bids: &BidVector, cap: usize) -> MonopolisticOutcome {
    assert!(cap >= 1, "block capacity must be at least 1");
    monopolistic_scan(bids, cap)
}

/// Equilibrium revenue of a pay-your-bid block with room for `block_size`
/// transactions: every included transaction pays the `(block_size+1)`-th
/// highest value. With spare room the clearing bid is arbitrarily small, so
/// revenue is zero.
pub fn pay_your_bid_revenue(bids: &BidVector, block_size: usize) -> f64 {
    assert!(block_size >= 1, "block size must be at least 1");
    if block_size < bids.len() {
        block_size as f64 * bids[block_size]
    } else {
        0.0
    }
}
