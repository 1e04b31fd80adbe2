mod common;

use common::*;
use feemarket::rsop::{
    check_rsop_leq_monopolistic, check_rsop_subsets_leq_monopolistic, expected_false_bid_revenue,
    false_bid_strategy, partition_bids, remove_bids_search, rsop_expected_revenue,
    rsop_expected_revenue_exact, rsop_outcome, rsop_sampled_revenue, truthfulness_probe, utility,
    verify_block, Block, Enumeration, Partition, RemovalSearch, Side, Transaction,
};
use feemarket::{monopolistic_outcome, BidVector, Error};
use proptest::prelude::*;

fn bv(raw: &[f64]) -> BidVector {
    BidVector::new(raw.to_vec()).unwrap()
}

/// RSOP revenue straight from the definition.
fn reference_rsop(v: &[f64], in_a: &[bool]) -> f64 {
    let a: Vec<f64> = v.iter().zip(in_a).filter(|(_, s)| **s).map(|(x, _)| *x).collect();
    let b: Vec<f64> = v.iter().zip(in_a).filter(|(_, s)| !**s).map(|(x, _)| *x).collect();
    let (pa, pb) = (brute_price(&a), brute_price(&b));
    a.iter().filter(|&&x| x >= pb).count() as f64 * pb + b.iter().filter(|&&x| x >= pa).count() as f64 * pa
}

fn sides(p: &Partition) -> Vec<bool> {
    p.assignment.iter().map(|s| *s == Side::A).collect()
}

#[test]
fn outcome_examples() {
    let b = bv(&[10., 1.]);
    let split = Partition::from_mask(2, 0b01);
    let o = rsop_outcome(&b, &split, 0.).unwrap();
    assert_eq!((o.p_a, o.p_b, o.revenue), (10., 1., 1.));
    assert_eq!((o.winners_a.as_slice(), o.winners_b.as_slice()), (&[0usize][..], &[][..]));
    let o = rsop_outcome(&b, &Partition::from_mask(2, 0b11), 0.).unwrap();
    assert_eq!((o.p_b, o.revenue), (0., 0.));
    assert_eq!(o.winners_a, [0, 1]);
    let o = rsop_outcome(&bv(&[3., 2., 2.]), &Partition::from_mask(3, 0b001), 1.).unwrap();
    assert_eq!((o.miner_share, o.carry_share), (0., o.revenue));
    assert!(matches!(
        rsop_outcome(&b, &Partition::from_mask(3, 0), 0.),
        Err(Error::LengthMismatch { .. })
    ));
    assert!(matches!(rsop_outcome(&b, &split, 1.5), Err(Error::InvalidAlpha(_))));
}

#[test]
fn expected_revenue_examples() {
    assert_eq!(rsop_expected_revenue_exact(&bv(&[10., 1.])).unwrap(), 0.5);
    assert_eq!(rsop_expected_revenue_exact(&bv(&[4.2])).unwrap(), 0.);
    let e = rsop_expected_revenue(&bv(&[10., 1.]), 1, 0);
    assert!(e.exact && e.mean == 0.5);
}

#[test]
fn partition_examples() {
    assert!(partition_bids(0, 99).is_empty());
    assert_eq!(partition_bids(50, 7), partition_bids(50, 7));
    assert_ne!(partition_bids(64, 7).assignment, partition_bids(64, 8).assignment);
    let p = partition_bids(1_000_000, 12345);
    let frac = p.in_a() as f64 / 1e6;
    assert!((0.49..=0.51).contains(&frac), "{frac}");
}

#[test]
fn truthfulness_examples() {
    let v = bv(&[10., 1.]);
    let split = Partition::from_mask(2, 0b01);
    for i in 0..2 {
        assert!(truthfulness_probe(&v, i, &[v[i]], &split).unwrap());
    }
    assert!(truthfulness_probe(&v, 1, &[0.5, 2., 100.], &split).unwrap());
    assert!(matches!(
        truthfulness_probe(&v, 5, &[1.], &split),
        Err(Error::IndexOutOfRange { index: 5, len: 2 })
    ));
}

#[test]
fn conjecture_examples() {
    let c = check_rsop_leq_monopolistic(&bv(&[10., 1.]), Enumeration::Exhaustive).unwrap();
    assert!(c.holds && c.witness.is_none());
    assert_eq!(c.max_ratio * 10., 1.);
    assert!(check_rsop_leq_monopolistic(&bv(&[1.; 8]), Enumeration::Exhaustive).unwrap().holds);
    assert!(check_rsop_leq_monopolistic(&bv(&[3.]), Enumeration::Exhaustive).unwrap().holds);
}

#[test]
fn removal_examples() {
    // Every subset of (2, 2, 1, 1), scored exactly.
    let b = bv(&[2., 2., 1., 1.]);
    let r = remove_bids_search(&b, RemovalSearch::Exhaustive).unwrap();
    let mut best = (f64::NEG_INFINITY, 0u32);
    for mask in (1u32..16).rev() {
        let sub: Vec<f64> = (0..4).filter(|i| mask >> i & 1 == 1).map(|i| b[i]).collect();
        let e = rsop_expected_revenue_exact(&bv(&sub)).unwrap();
        if e > best.0 || (e == best.0 && mask.count_ones() > best.1.count_ones()) {
            best = (e, mask);
        }
    }
    assert_eq!(r.expected_revenue, best.0);
    assert_eq!(rsop_expected_revenue_exact(&bv(&[2., 2.])).unwrap(), 2.);
    assert_eq!(r.honest_revenue, 2.75);
    assert_eq!(r.kept, b);

    let single = remove_bids_search(&bv(&[7.]), RemovalSearch::Exhaustive).unwrap();
    assert_eq!((single.kept.as_slice(), single.expected_revenue), (&[7.][..], 0.));

    // n twos and n ones: keeping only the twos beats honest execution.
    let n = 32;
    let two_values: Vec<f64> = std::iter::repeat_n(2., n).chain(std::iter::repeat_n(1., n)).collect();
    let r = remove_bids_search(&bv(&two_values), RemovalSearch::Greedy { samples: 4000, seed: 1 }).unwrap();
    assert!(r.kept.len() < 2 * n);
    assert_eq!(r.kept.num_at_least(2.), n);
    assert!(r.expected_revenue > r.honest_revenue);
    // Exactly: twos alone earn 2n unless one side is empty.
    let twos_only = 2. * n as f64 * (1. - 2f64.powi(1 - n as i32));
    assert!(twos_only > two_value_exact(n));
}

#[test]
fn false_bid_examples() {
    let b = bv(&[10., 1.]);
    let honest = rsop_expected_revenue_exact(&b).unwrap();
    let padded = false_bid_strategy(&b, 100);
    assert_eq!(padded.miner_owned.iter().filter(|o| **o).count(), 100);
    let net = expected_false_bid_revenue(&padded, 0., 2000, 4).unwrap();
    assert!((net.mean - 10.).abs() < 4. * net.stderr + 1e-9, "{net:?}");
    let costly = expected_false_bid_revenue(&padded, 1., 2000, 4).unwrap();
    assert!(costly.mean <= honest * 0.0);
    assert_eq!(false_bid_strategy(&b, 0).bids, b);
}

#[test]
fn block_examples() {
    let tx = |i: u8, bid: f64| Transaction { txid: [i; 32], bid };
    let block = Block::new([9; 32], vec![tx(1, 5.), tx(2, 3.), tx(3, 3.), tx(4, 1.)], 0.1).unwrap();
    let a = verify_block(&block).unwrap();
    assert_eq!(a, verify_block(&Block::from_json_str(&block.to_json()).unwrap()).unwrap());
    let fees: f64 = a.transactions.iter().map(|t| t.fee).sum();
    assert_eq!(fees, a.outcome.revenue);
    assert_eq!(a.seed, u64::from_be_bytes([9; 8]));
    let expected = rsop_outcome(&bv(&[5., 3., 3., 1.]), &partition_bids(4, a.seed), 0.1).unwrap();
    assert_eq!(a.outcome.revenue, expected.revenue);
}

/// Exact expectation for `n` twos and `n` ones: sums over how many of each
/// land in `A`, weighted by binomial probabilities.
fn two_value_exact(n: usize) -> f64 {
    let mut ln_fact = vec![0.0f64; n + 1];
    for k in 1..=n {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    let pmf: Vec<f64> = (0..=n)
        .map(|k| (ln_fact[n] - ln_fact[k] - ln_fact[n - k] - n as f64 * 2f64.ln()).exp())
        .collect();
    let price = |twos: usize, ones: usize| -> f64 {
        if twos + ones == 0 {
            0.
        } else if 2 * twos > twos + ones {
            2.
        } else {
            1.
        }
    };
    let mut total = 0.;
    for a2 in 0..=n {
        for a1 in 0..=n {
            let (b2, b1) = (n - a2, n - a1);
            let (pa, pb) = (price(a2, a1), price(b2, b1));
            let win = |twos: usize, ones: usize, p: f64| -> f64 {
                let count = (if 2. >= p { twos } else { 0 }) + (if 1. >= p { ones } else { 0 });
                count as f64 * p
            };
            total += pmf[a2] * pmf[a1] * (win(a2, a1, pb) + win(b2, b1, pa));
        }
    }
    total
}

#[test]
fn two_value_exact_matches_enumeration() {
    for n in 1..=8 {
        let v: Vec<f64> = std::iter::repeat_n(2., n).chain(std::iter::repeat_n(1., n)).collect();
        let e = rsop_expected_revenue_exact(&bv(&v)).unwrap();
        assert!((e - two_value_exact(n)).abs() < 1e-12, "n={n}");
    }
}

#[test]
fn two_value_monte_carlo_matches_exact() {
    for n in [1024usize, 4096] {
        let v: Vec<f64> = std::iter::repeat_n(2., n).chain(std::iter::repeat_n(1., n)).collect();
        let est = rsop_sampled_revenue(&bv(&v), 1000, 2024);
        let exact = two_value_exact(n);
        let z = (est.mean - exact) / est.stderr;
        assert!(z.abs() <= 3., "n={n} mean={} exact={exact} se={}", est.mean, est.stderr);
    }
}

#[test]
fn sampled_revenue_is_thread_independent() {
    let v = feemarket::distributions::sample(&feemarket::distributions::ValueDistribution::Inverse, 300, 1).unwrap();
    let one = feemarket::experiments::with_threads(Some(1), || rsop_sampled_revenue(&v, 500, 8));
    let many = feemarket::experiments::with_threads(Some(8), || rsop_sampled_revenue(&v, 500, 8));
    assert_eq!(one, many);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn outcome_invariants(raw in any_bids(40), seed in any::<u64>(), alpha in 0.0f64..=1.0) {
        let b = bv(&raw);
        let part = partition_bids(b.len(), seed);
        let o = rsop_outcome(&b, &part, alpha).unwrap();
        let in_a = sides(&part);
        prop_assert_eq!(o.revenue, reference_rsop(&b, &in_a));
        for (i, &x) in b.iter().enumerate() {
            let wins = if in_a[i] { x >= o.p_b } else { x >= o.p_a };
            prop_assert_eq!(o.fee(i).is_some(), wins);
        }
        let fees: f64 = (0..b.len()).filter_map(|i| o.fee(i)).sum();
        prop_assert!((fees - o.revenue).abs() <= 1e-12 * o.revenue.max(1.0));
        prop_assert_eq!(o.miner_share + o.carry_share, o.revenue);
        prop_assert!(o.miner_share >= 0.0 && o.carry_share >= 0.0);
    }

    #[test]
    fn exact_expectation_matches_definition(raw in any_bids(10)) {
        let b = bv(&raw);
        let n = b.len();
        let mean = (0..1u64 << n)
            .map(|m| reference_rsop(&b, &sides(&Partition::from_mask(n, m))))
            .sum::<f64>() / (1u64 << n) as f64;
        prop_assert!((rsop_expected_revenue_exact(&b).unwrap() - mean).abs() <= 1e-12 * mean.max(1.0));
    }

    #[test]
    fn rsop_below_monopolistic_exhaustive(raw in any_bids(12)) {
        let b = bv(&raw);
        let c = check_rsop_leq_monopolistic(&b, Enumeration::Exhaustive).unwrap();
        prop_assert!(c.holds, "witness {:?}", c.witness);
        prop_assert_eq!(c.checked, 1u64 << b.len());
        prop_assert!(c.max_ratio <= 1.0);
    }

    #[test]
    fn subsets_stay_below_full_revenue(raw in any_bids(8)) {
        let b = bv(&raw);
        let c = check_rsop_subsets_leq_monopolistic(&b).unwrap();
        prop_assert!(c.holds, "witness {:?}", c.witness);
    }

    #[test]
    fn truthful_on_fixed_partitions(
        raw in any_bids(24),
        pick in any::<prop::sample::Index>(),
        seed in any::<u64>(),
        devs in prop::collection::vec(1u32..=400, 1..8),
    ) {
        let v = bv(&raw);
        let i = pick.index(v.len());
        let part = partition_bids(v.len(), seed);
        let mut deviations: Vec<f64> = devs.iter().map(|&d| d as f64 / 4.0 * v[0] / 50.0).collect();
        deviations.extend(v.iter().copied());
        prop_assert!(truthfulness_probe(&v, i, &deviations, &part).unwrap());
        let honest = utility(&v, i, v[i], v[i], &part).unwrap();
        prop_assert!(honest >= 0.0);
    }

    #[test]
    fn block_fees_sum_to_revenue(raw in any_bids(30), hash in any::<[u8; 32]>(), alpha in 0.0f64..=1.0) {
        let txs = raw.iter().enumerate().map(|(i, &bid)| {
            let mut id = [0u8; 32];
            id[..8].copy_from_slice(&(i as u64).to_le_bytes());
            Transaction { txid: id, bid }
        }).collect();
        let block = Block::new(hash, txs, alpha).unwrap();
        let a = verify_block(&block).unwrap();
        prop_assert_eq!(&a, &verify_block(&block).unwrap());
        let in_a: Vec<bool> = a.transactions.iter().map(|t| t.side == Side::A).collect();
        prop_assert_eq!(a.outcome.revenue, reference_rsop(&raw, &in_a));
        let fees: f64 = a.transactions.iter().map(|t| t.fee).sum();
        prop_assert!((fees - a.outcome.revenue).abs() <= 1e-12 * fees.max(1.0));
        prop_assert!(a.outcome.revenue <= monopolistic_outcome(&bv(&raw)).revenue);
    }
}
