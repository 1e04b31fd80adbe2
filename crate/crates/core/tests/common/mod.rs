//! Independent reference computations and generators shared by the
//! integration tests. Nothing here calls the library's pricing code.
#![allow(dead_code)]

use proptest::prelude::*;

/// `(revenue, k*, price)` by evaluating every block size of the sorted
/// input; ties go to the larger block.
pub fn brute_outcome(raw: &[f64]) -> (f64, usize, f64) {
    let mut v = raw.to_vec();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut best = (0.0, 0, 0.0);
    for k in 1..=v.len() {
        let r = k as f64 * v[k - 1];
        if r >= best.0 {
            best = (r, k, v[k - 1]);
        }
    }
    best
}

pub fn brute_price(raw: &[f64]) -> f64 {
    brute_outcome(raw).2
}

/// Price after adding `copies` bids of `b` to `others`.
pub fn price_with(others: &[f64], b: f64, copies: usize) -> f64 {
    let mut v = others.to_vec();
    v.extend(std::iter::repeat_n(b, copies));
    brute_price(&v)
}

/// `others` with index `i` removed.
pub fn without(v: &[f64], i: usize) -> Vec<f64> {
    let mut w = v.to_vec();
    w.remove(i);
    w
}

/// Integers in `1..=100`, as floats.
pub fn discrete(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((1u32..=100).prop_map(f64::from), 1..=max_len)
}

/// Values in `(0, 1]`.
pub fn continuous(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((1u64..=1 << 53).prop_map(|m| m as f64 / (1u64 << 53) as f64), 1..=max_len)
}

/// Either kind, with a few small integers to force ties.
pub fn any_bids(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop_oneof![
        discrete(max_len),
        continuous(max_len),
        prop::collection::vec((1u32..=4).prop_map(f64::from), 1..=max_len),
    ]
}

/// Minimal `u * b` for exactly `u` copies, scanning `{R/m}` (with a few
/// ulps of slack), the other bids and a grid, in ascending order.
pub fn p_u(others: &[f64], u: usize) -> f64 {
    let (r, _, _) = brute_outcome(others);
    let top = others.iter().cloned().fold(0.0, f64::max);
    let mut cands: Vec<f64> = others.to_vec();
    for m in 1..=others.len() + u + 1 {
        let mut b = r / m as f64;
        for _ in 0..5 {
            cands.push(b);
            b = b.next_up();
        }
    }
    cands.extend((1..=2000).map(|g| top * g as f64 / 2000.0));
    cands.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let b = cands
        .into_iter()
        .find(|&b| price_with(others, b, u) <= b)
        .expect("the top bid always clears");
    u as f64 * b
}
