//! Properties checked on every fuzz input. Parsers may reject anything, but
//! must not panic, and whatever they accept must satisfy these.

use feemarket::distributions::{parse_values_csv, Transform};
use feemarket::experiments::{read_rows_csv, rows_to_csv, ExperimentConfig};
use feemarket::rsop::{verify_block, Block};
use feemarket::{monopolistic_outcome, BidVector};

pub fn block_json(data: &[u8]) {
    let Ok(block) = Block::from_json_slice(data) else { return };
    let v = verify_block(&block).expect("parsed blocks verify");
    assert_eq!(v.transactions.len(), block.transactions.len());
    let fees: f64 = v.transactions.iter().map(|t| t.fee).sum();
    assert!(fees >= 0.0);
    assert_eq!(v.outcome.winners_a.len() + v.outcome.winners_b.len(), v.valid_txids().count());
    assert_eq!(Block::from_json_str(&block.to_json()).expect("re-parses"), block);
}

pub fn values_csv(data: &[u8]) {
    for t in [Transform::Log, Transform::Sqrt, Transform::Identity] {
        if let Ok(pool) = parse_values_csv(data, t) {
            assert!(!pool.values.is_empty());
            assert!(pool.values.iter().all(|v| v.is_finite() && *v > 0.0));
        }
    }
}

pub fn experiment_config(data: &[u8]) {
    let Ok(cfg) = ExperimentConfig::from_slice(data) else { return };
    cfg.validate().expect("parsed configs are valid");
    let again = serde_json_roundtrip(&cfg);
    assert_eq!(again, cfg);
}

fn serde_json_roundtrip(cfg: &ExperimentConfig) -> ExperimentConfig {
    let text = feemarket::numfmt::to_json(cfg);
    ExperimentConfig::from_json_str(&text).expect("serialized config re-parses")
}

pub fn bid_list(data: &[u8]) {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(b) = s.parse::<BidVector>() else { return };
    assert!(b.windows(2).all(|w| w[0] >= w[1]));
    assert!(b.iter().all(|x| x.is_finite() && *x > 0.0));
    assert_eq!(b.to_string().parse::<BidVector>().expect("display re-parses"), b);
    let o = monopolistic_outcome(&b);
    for (k, x) in b.iter().enumerate() {
        assert!((k + 1) as f64 * x <= o.revenue);
    }
}

pub fn result_csv(data: &[u8]) {
    let Ok(rows) = read_rows_csv(data) else { return };
    let text = rows_to_csv(&rows);
    let again = read_rows_csv(text.as_bytes()).expect("emitted CSV re-parses");
    assert_eq!(rows_to_csv(&again), text);
}
