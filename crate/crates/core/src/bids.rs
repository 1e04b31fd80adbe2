//! Bid vectors and rank-addressed views over them.
//!
//! All mechanisms in this crate are scans over bids ordered from highest to
//! lowest, so vectors are sorted once when they are built. The
//! [`RankedBids`] trait lets the leave-one-out and insert-copies variants
//! used by the strategic analysis be evaluated without allocating.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A validated list of positive, finite bids sorted in descending order.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct BidVector {
    bids: Vec<f64>,
}

impl BidVector {
    /// Validates `raw` and sorts it descending.
    pub fn new(raw: Vec<f64>) -> Result<Self> {
        for (index, &value) in raw.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteBid { index });
            }
            if value <= 0.0 {
                return Err(Error::NonPositiveBid { index, value });
            }
        }
        let mut bids = raw;
        bids.sort_unstable_by(|a, b| b.total_cmp(a));
        Ok(Self { bids })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.bids
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.bids
    }

    /// Highest bid, if any.
    pub fn max(&self) -> Option<f64> {
        self.bids.first().copied()
    }

    /// Returns a copy with `value` inserted at its sorted position.
    pub fn with_bid(&self, value: f64) -> Result<Self> {
        self.with_copies(value, 1)
    }

    /// Returns a copy with `copies` bids of `value` inserted.
    pub fn with_copies(&self, value: f64, copies: usize) -> Result<Self> {
        check_value(value)?;
        let at = self.num_at_least(value);
        let mut bids = Vec::with_capacity(self.bids.len() + copies);
        bids.extend_from_slice(&self.bids[..at]);
        bids.extend(std::iter::repeat(value).take(copies));
        bids.extend_from_slice(&self.bids[at..]);
        Ok(Self { bids })
    }

    /// Returns a copy without the bid at `rank` (0-based).
    pub fn without(&self, rank: usize) -> Result<Self> {
        if rank >= self.bids.len() {
            return Err(Error::IndexOutOfRange {
                index: rank,
                len: self.bids.len(),
            });
        }
        let mut bids = self.bids.clone();
        bids.remove(rank);
        Ok(Self { bids })
    }

    /// Multiplies every bid by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.bids.iter().map(|b| b * factor).collect())
    }

    /// Number of bids that are at least `z`, by binary search.
    pub fn num_at_least(&self, z: f64) -> usize {
        self.bids.partition_point(|&b| b >= z)
    }
}

impl Deref for BidVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.bids
    }
}

impl TryFrom<Vec<f64>> for BidVector {
    type Error = Error;

    fn try_from(raw: Vec<f64>) -> Result<Self> {
        Self::new(raw)
    }
}

impl<'de> Deserialize<'de> for BidVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<f64>::deserialize(d)?;
        Self::new(raw).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for BidVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.bids.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Parses a comma-separated bid list such as `5,2,1,1`.
///
/// Whitespace around tokens is ignored and an empty string yields an empty
/// vector.
impl FromStr for BidVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_bid_list(s).and_then(Self::new)
    }
}

/// Parses a comma-separated list of numbers without validating them as bids.
pub fn parse_bid_list(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<f64>().map_err(|_| Error::BadBidToken {
                token: tok.to_string(),
            })
        })
        .collect()
}

pub(crate) fn check_value(value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidValue(value))
    }
}

/// Read access to a descending sequence of bids by 0-based rank.
pub trait RankedBids {
    fn len(&self) -> usize;

    /// The bid at `rank`; `rank < self.len()`.
    fn bid(&self, rank: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of bids that are at least `z`.
    fn num_at_least(&self, z: f64) -> usize {
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.bid(mid) >= z {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

impl RankedBids for [f64] {
    fn len(&self) -> usize {
        <[f64]>::len(self)
    }

    fn bid(&self, rank: usize) -> f64 {
        self[rank]
    }
}

impl RankedBids for BidVector {
    fn len(&self) -> usize {
        self.bids.len()
    }

    fn bid(&self, rank: usize) -> f64 {
        self.bids[rank]
    }
}

/// A sorted vector with one rank removed.
#[derive(Clone, Copy, Debug)]
pub struct Without<'a> {
    base: &'a [f64],
    skip: usize,
}

impl<'a> Without<'a> {
    pub fn new(base: &'a [f64], skip: usize) -> Self {
        assert!(skip < base.len(), "skip rank {skip} out of range");
        Self { base, skip }
    }
}

impl RankedBids for Without<'_> {
    fn len(&self) -> usize {
        self.base.len() - 1
    }

    #[inline]
    fn bid(&self, rank: usize) -> f64 {
        if rank < self.skip {
            self.base[rank]
        } else {
            self.base[rank + 1]
        }
    }
}

/// A sorted view with `copies` bids of `value` inserted after every base bid
/// that is at least `value`.
#[derive(Clone, Copy, Debug)]
pub struct WithCopies<'a, R: RankedBids + ?Sized> {
    base: &'a R,
    value: f64,
    copies: usize,
    at: usize,
}

impl<'a, R: RankedBids + ?Sized> WithCopies<'a, R> {
    pub fn new(base: &'a R, value: f64, copies: usize) -> Self {
        let at = base.num_at_least(value);
        Self {
            base,
            value,
            copies,
            at,
        }
    }
}

impl<R: RankedBids + ?Sized> RankedBids for WithCopies<'_, R> {
    fn len(&self) -> usize {
        self.base.len() + self.copies
    }

    #[inline]
    fn bid(&self, rank: usize) -> f64 {
        if rank < self.at {
            self.base.bid(rank)
        } else if rank < self.at + self.copies {
            self.value
        } else {
            self.base.bid(rank - self.copies)
        }
    }
}
