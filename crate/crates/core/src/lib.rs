//! Monopolistic-price and RSOP transaction-fee auctions.
//!
//! [`mechanism`] prices a block, [`strategic`] measures what a single
//! bidder gains by shading or splitting, [`rsop`] implements the random
//! sampling auction together with block verification and miner
//! deviations, and [`experiments`] runs seeded Monte Carlo grids over the
//! value distributions in [`distributions`].

pub mod bids;
pub mod distributions;
pub mod error;
pub mod experiments;
pub mod mechanism;
pub mod numfmt;
pub mod oracle;
pub mod rng;
pub mod rsop;
pub mod strategic;

pub use bids::{parse_bid_list, BidVector, RankedBids};
pub use error::{Error, Result};
pub use mechanism::{
    monopolistic_outcome, monopolistic_outcome_capped, pay_your_bid_revenue, MonopolisticOutcome,
};
pub use strategic::{
    discount_ratio, discount_stats, multibid_price, strategic_price, worst_case_discount,
    AverageOver, DiscountStats, Mode, MultibidResult,
};
