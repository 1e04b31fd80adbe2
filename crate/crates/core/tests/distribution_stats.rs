use std::io::Write;

use feemarket::distributions::{
    inverse_from_uniform, load_bitcoin_values, parse_values_csv, sample, Sampler, Transform,
    ValueDistribution, ValuePool,
};
use feemarket::{discount_stats, AverageOver, Error, Mode};

const DRAWS: usize = 1_000_000;

fn all_kinds() -> Vec<ValueDistribution> {
    vec![
        ValueDistribution::DiscreteUniform,
        ValueDistribution::Uniform01,
        ValueDistribution::half_normal(),
        ValueDistribution::Inverse,
        ValueDistribution::BitcoinData {
            path: synthetic_path(),
            transform: Transform::Log,
        },
    ]
}

fn synthetic_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/synthetic_output_sums.csv")
}

#[test]
fn positive_and_deterministic() {
    for d in all_kinds() {
        let v = sample(&d, DRAWS, 3).unwrap();
        assert_eq!(v.len(), DRAWS);
        assert!(v.iter().all(|x| x.is_finite() && *x > 0.0), "{d}");
        assert_eq!(v, sample(&d, DRAWS, 3).unwrap());
    }
}

#[test]
fn discrete_values_are_integers_in_range() {
    let v = sample(&ValueDistribution::DiscreteUniform, 100_000, 1).unwrap();
    assert!(v.iter().all(|x| x.fract() == 0.0 && (1.0..=100.0).contains(x)));
    assert_eq!((v[0], v[v.len() - 1]), (100.0, 1.0));
}

#[test]
fn uniform_mean() {
    let v = sample(&ValueDistribution::Uniform01, DRAWS, 11).unwrap();
    let mean = v.iter().sum::<f64>() / DRAWS as f64;
    assert!((mean - 0.5).abs() < 0.002, "{mean}");
    assert!(v.iter().all(|x| *x <= 1.0));
}

#[test]
fn half_normal_second_moment() {
    let v = sample(&ValueDistribution::HalfNormal { sigma: 2.0 }, DRAWS, 5).unwrap();
    let m2 = v.iter().map(|x| x * x).sum::<f64>() / DRAWS as f64;
    // E[X^2] = sigma^2; sd of X^2 is sigma^2 * sqrt(2).
    let se = 4.0 * 2f64.sqrt() / (DRAWS as f64).sqrt();
    assert!((m2 - 4.0).abs() < 5.0 * se, "{m2}");
}

#[test]
fn inverse_tail() {
    assert_eq!(inverse_from_uniform(0.5), 2.0);
    assert_eq!(inverse_from_uniform(0.0), 1.0);
    let v = sample(&ValueDistribution::Inverse, DRAWS, 21).unwrap();
    assert!(v.iter().all(|x| *x >= 1.0));
    for t in [2.0, 10.0, 100.0] {
        let p = 1.0 / t;
        let observed = v.num_at_least(t) as f64 / DRAWS as f64;
        let se = (p * (1.0 - p) / DRAWS as f64).sqrt();
        assert!((observed - p).abs() < 5.0 * se, "t={t}: {observed}");
    }
}

fn pool_from(text: &str, t: Transform) -> Result<ValuePool, Error> {
    parse_values_csv(text.as_bytes(), t)
}

#[test]
fn loader_examples() {
    let p = pool_from("output_sum_satoshi\n10000\n", Transform::Sqrt).unwrap();
    assert_eq!(p.values, [100.0]);
    let p = pool_from("output_sum_satoshi\n1\n5\n", Transform::Log).unwrap();
    assert_eq!((p.values.len(), p.filtered), (1, 1));
    // Sums are whole satoshi, so e and e^2 become their nearest integers.
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "output_sum_satoshi\n3\n7").unwrap();
    let p = load_bitcoin_values(f.path(), Transform::Log).unwrap();
    assert_eq!(p.values, [3f64.ln(), 7f64.ln()]);
    let p = load_bitcoin_values(f.path(), Transform::Identity).unwrap();
    assert_eq!(p.values, [3.0, 7.0]);
}

#[test]
fn loader_errors() {
    assert!(matches!(
        load_bitcoin_values(std::path::Path::new("/no/such/file.csv"), Transform::Log),
        Err(Error::FileNotFound(_))
    ));
    assert!(matches!(
        pool_from("output_sum_satoshi\n5\nabc\n", Transform::Sqrt),
        Err(Error::MalformedRow { line: 3, .. })
    ));
    assert!(matches!(
        pool_from("output_sum_satoshi\n0\n", Transform::Sqrt),
        Err(Error::MalformedRow { line: 2, .. })
    ));
    assert!(matches!(
        pool_from("output_sum_satoshi\n1\n1\n", Transform::Log),
        Err(Error::EmptyPool { filtered: 2 })
    ));
    assert!(matches!(pool_from("value\n5\n", Transform::Sqrt), Err(Error::MalformedRow { line: 1, .. })));
}

#[test]
fn synthetic_pool_loads() {
    for t in [Transform::Log, Transform::Sqrt, Transform::Identity] {
        let p = load_bitcoin_values(&synthetic_path(), t).unwrap();
        assert_eq!(p.values.len() + p.filtered, 10_000);
    }
}

#[test]
fn scaling_the_pool_leaves_ratios_unchanged() {
    let pool = load_bitcoin_values(&synthetic_path(), Transform::Sqrt).unwrap();
    let doubled = ValuePool {
        values: pool.values.iter().map(|v| 2.0 * v).collect(),
        filtered: pool.filtered,
    };
    let (a, b) = (Sampler::from_pool(pool), Sampler::from_pool(doubled));
    for seed in 0..20 {
        let (x, y) = (a.sample(200, seed), b.sample(200, seed));
        for mode in [Mode::Single, Mode::Multibid] {
            let sx = discount_stats(&x, mode, AverageOver::All).unwrap();
            let sy = discount_stats(&y, mode, AverageOver::All).unwrap();
            assert_eq!(sx.per_user, sy.per_user);
        }
    }
}
