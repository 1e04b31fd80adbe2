//! Strategic bidding against the monopolistic-price mechanism.
//!
//! A single bidder facing the bids `w` of everyone else can either bid
//! honestly, or shade down to the smallest bid that still clears (the
//! strategic price), or split into `u` equal bids that all clear (the
//! multibid price). The discount ratio measures how much such a deviation
//! saves relative to the honest payment.
//!
//! All prices are floating point. Candidate prices of the form `R / m` are
//! nudged up by at most a few ulps until `m * (R / m) >= R` holds in
//! floating point, so that every returned price actually clears when the
//! mechanism is evaluated on the resulting vector.

use std::collections::HashMap;

use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::bids::{BidVector, RankedBids, WithCopies, Without};
use crate::error::{Error, Result};
use crate::mechanism::{monopolistic_scan, MonopolisticOutcome};

/// Which deviation a strategic bidder may use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// One shaded bid.
    Single,
    /// `u` equal bids, paying `u` times the bid.
    #[default]
    Multibid,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(Self::Single),
            "multibid" => Ok(Self::Multibid),
            other => Err(Error::InvalidConfig(format!("unknown mode {other:?}"))),
        }
    }
}

/// Cheapest way to get a split bid accepted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultibidResult {
    /// Total payment `u_star * b_star`.
    pub total: f64,
    pub b_star: f64,
    pub u_star: usize,
}

/// Per-draw discount statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscountStats {
    pub delta_avg: f64,
    pub delta_max: f64,
    /// Rank (0-based, descending order) of the bidder attaining `delta_max`.
    pub argmax_user: usize,
    /// `k*` of the full honest vector.
    pub k_star: usize,
    /// Every bidder's ratio, in rank order, when all bidders were evaluated.
    pub per_user: Option<Vec<f64>>,
}

/// How `delta_avg` is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AverageOver {
    /// Every bidder.
    All,
    /// A uniform sample of `users` bidders without replacement.
    Sample { users: usize, seed: u64 },
}

/// Smallest `m >= 1` with `m * unit >= target` in floating point.
fn covering_multiple(target: f64, unit: f64) -> usize {
    let mut m = ((target / unit).ceil() as usize).max(1);
    while m > 1 && (m - 1) as f64 * unit >= target {
        m -= 1;
    }
    while (m as f64) * unit < target {
        m += 1;
    }
    m
}

/// `target / m`, raised until `m * result >= target` in floating point.
fn share(target: f64, m: usize) -> f64 {
    let mut b = target / m as f64;
    let mut guard = 0;
    while (m as f64) * b < target && guard < 64 {
        b = b.next_up();
        guard += 1;
    }
    b
}

/// Does a block of `copies` bids of `b` clear against `others`?
pub fn clears<R: RankedBids + ?Sized>(others: &R, b: f64, copies: usize) -> bool {
    monopolistic_scan(&WithCopies::new(others, b, copies), usize::MAX).price <= b
}

fn ensure_nonempty<R: RankedBids + ?Sized>(others: &R) -> Result<()> {
    if others.is_empty() {
        Err(Error::EmptyOthers)
    } else {
        Ok(())
    }
}

/// Strategic price: the smallest single bid `b` with
/// `p_monopolistic(b, others) <= b`.
pub fn strategic_price(others: &BidVector) -> Result<f64> {
    ensure_nonempty(others)?;
    Ok(strategic_price_ranked(others.as_slice()))
}

/// [`strategic_price`] over any ranked view; `others` must be non-empty.
///
/// The answer is `R / (J + 1)` where `J` is the largest rank with
/// `(J + 1) * w_J >= R`: at that level the shaded bid sits just above
/// `w_{J+1}` and is counted together with the top `J` bids. The result is
/// re-checked by direct evaluation and falls back to the candidate scan if
/// the check fails.
pub fn strategic_price_ranked<R: RankedBids + ?Sized>(others: &R) -> f64 {
    let mono = monopolistic_scan(others, usize::MAX);
    let len = others.len();
    let mut level = mono.k_star;
    for j in (mono.k_star..=len).rev() {
        if (j + 1) as f64 * others.bid(j - 1) >= mono.revenue {
            level = j;
            break;
        }
    }
    let b = share(mono.revenue, level + 1);
    if clears(others, b, 1) {
        b
    } else {
        strategic_price_by_candidates(others)
    }
}

/// Strategic price by scanning the finite candidate set
/// `{R/m : k* < m <= len+1} ∪ {w_j}` in ascending order and returning the
/// first candidate that clears by direct evaluation.
pub fn strategic_price_by_candidates<R: RankedBids + ?Sized>(others: &R) -> f64 {
    let mono = monopolistic_scan(others, usize::MAX);
    let len = others.len();
    let mut candidates: Vec<f64> = (mono.k_star + 1..=len + 1)
        .map(|m| share(mono.revenue, m))
        .chain((0..len).map(|r| others.bid(r)))
        .collect();
    candidates.sort_unstable_by(f64::total_cmp);
    candidates.dedup();
    candidates
        .into_iter()
        .find(|&b| clears(others, b, 1))
        .expect("the highest other bid always clears")
}

/// Multibid price via the closed form over ranks `j` in `[k*(w), len]`:
/// `f(j) = max(ceil(R / w_j), j + 1)`, payment `R / f(j) * (f(j) - j)`.
pub fn multibid_price(others: &BidVector) -> Result<MultibidResult> {
    ensure_nonempty(others)?;
    Ok(multibid_price_ranked(others.as_slice()))
}

/// [`multibid_price`] over any ranked view; `others` must be non-empty.
pub fn multibid_price_ranked<R: RankedBids + ?Sized>(others: &R) -> MultibidResult {
    let mono = monopolistic_scan(others, usize::MAX);
    let revenue = mono.revenue;
    let single = strategic_price_ranked(others);
    let mut best = MultibidResult {
        total: single,
        b_star: single,
        u_star: 1,
    };
    let mut alternatives = Vec::new();
    for j in mono.k_star..=others.len() {
        let f = covering_multiple(revenue, others.bid(j - 1)).max(j + 1);
        let u = f - j;
        let b = share(revenue, f);
        let total = u as f64 * b;
        if total < best.total || (total == best.total && u < best.u_star) {
            alternatives.push(best);
            best = MultibidResult {
                total,
                b_star: b,
                u_star: u,
            };
        }
    }
    if best.u_star == 1 && best.b_star == single || clears(others, best.b_star, best.u_star) {
        return best;
    }
    // Rounding pushed the optimum off the clearing set; take the cheapest
    // earlier candidate that verifies. The single-bid price always does.
    alternatives
        .into_iter()
        .rev()
        .find(|c| clears(others, c.b_star, c.u_star))
        .unwrap_or(MultibidResult {
            total: single,
            b_star: single,
            u_star: 1,
        })
}

/// Payment a deviating bidder makes under `mode`.
pub fn deviation_payment<R: RankedBids + ?Sized>(others: &R, mode: Mode) -> f64 {
    match mode {
        Mode::Single => strategic_price_ranked(others),
        Mode::Multibid => multibid_price_ranked(others).total,
    }
}

fn ratio(value: f64, payment: f64, honest_price: f64) -> f64 {
    if value < payment {
        0.0
    } else {
        (1.0 - payment / honest_price).clamp(0.0, 1.0)
    }
}

/// Discount ratio of a bidder with value `v_i` against `others`: zero if
/// the bidder cannot win, else `1 - payment / honest price`.
pub fn discount_ratio(v_i: f64, others: &BidVector, mode: Mode) -> Result<f64> {
    crate::bids::check_value(v_i)?;
    ensure_nonempty(others)?;
    let payment = deviation_payment(others.as_slice(), mode);
    let honest = monopolistic_scan(&WithCopies::new(others.as_slice(), v_i, 1), usize::MAX);
    Ok(ratio(v_i, payment, honest.price))
}

/// Worst-case discount: the largest ratio over every value in `support`.
pub fn worst_case_discount(others: &BidVector, support: &[f64], mode: Mode) -> Result<f64> {
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    support.iter().try_fold(0.0f64, |acc, &v| {
        Ok(acc.max(discount_ratio(v, others, mode)?))
    })
}

/// Discount statistics of one value profile.
///
/// `delta_max` is evaluated at the highest bidder only. Users sharing a
/// value share their leave-one-out vector, so payments are cached by value.
pub fn discount_stats(bids: &BidVector, mode: Mode, average: AverageOver) -> Result<DiscountStats> {
    let n = bids.len();
    if n < 2 {
        return Err(Error::TooFewBidders(n));
    }
    let v = bids.as_slice();
    let honest: MonopolisticOutcome = monopolistic_scan(v, usize::MAX);
    let mut cache: HashMap<u64, f64> = HashMap::new();
    let mut delta = |rank: usize| -> f64 {
        let value = v[rank];
        let payment = *cache
            .entry(value.to_bits())
            .or_insert_with(|| deviation_payment(&Without::new(v, rank), mode));
        ratio(value, payment, honest.price)
    };

    let delta_max = delta(0);
    let (delta_avg, per_user) = match average {
        AverageOver::Sample { users, seed } if users < n => {
            let mut rng = StdRng::seed_from_u64(seed);
            let picked = rand::seq::index::sample(&mut rng, n, users);
            let sum: f64 = picked.iter().map(&mut delta).sum();
            (sum / users as f64, None)
        }
        _ => {
            let all: Vec<f64> = (0..n).map(&mut delta).collect();
            (all.iter().sum::<f64>() / n as f64, Some(all))
        }
    };
    Ok(DiscountStats {
        // a rounded mean of equal ratios can land an ulp above them
        delta_avg: delta_avg.min(delta_max),
        delta_max,
        argmax_user: 0,
        k_star: honest.k_star,
        per_user,
    })
}

/// Every bidder's ratio by brute force, for cross-checking the
/// highest-bidder shortcut in [`discount_stats`].
pub fn discount_ratios_full_scan(bids: &BidVector, mode: Mode) -> Vec<f64> {
    let v = bids.as_slice();
    let honest = monopolistic_scan(v, usize::MAX);
    (0..v.len())
        .map(|rank| {
            if v.len() < 2 {
                return 0.0;
            }
            let payment = deviation_payment(&Without::new(v, rank), mode);
            ratio(v[rank], payment, honest.price)
        })
        .collect()
}
