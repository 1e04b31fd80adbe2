//! Value distributions for the simulations.
//!
//! Four synthetic distributions plus a resampled pool of transaction output
//! sums with a value transform `v(x)`. Every sampler is driven by
//! [`Xoshiro256StarStar`] seeded with the caller's seed.

use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bids::BidVector;
use crate::error::{Error, Result};
use crate::rng::Xoshiro256StarStar;

/// Header line the output-sum CSV must carry.
pub const VALUES_CSV_HEADER: &str = "output_sum_satoshi";

/// Map from an output sum `x` to a willingness to pay `v(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    /// Natural logarithm.
    Log,
    Sqrt,
    Identity,
}

impl Transform {
    /// `None` when the transformed value would not be a positive bid.
    pub fn apply(self, x: f64) -> Option<f64> {
        let v = match self {
            Transform::Log => x.ln(),
            Transform::Sqrt => x.sqrt(),
            Transform::Identity => x,
        };
        (v.is_finite() && v > 0.0).then_some(v)
    }

    pub fn name(self) -> &'static str {
        match self {
            Transform::Log => "log",
            Transform::Sqrt => "sqrt",
            Transform::Identity => "identity",
        }
    }
}

impl std::str::FromStr for Transform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log" => Ok(Self::Log),
            "sqrt" => Ok(Self::Sqrt),
            "identity" => Ok(Self::Identity),
            other => Err(Error::InvalidConfig(format!("unknown transform {other:?}"))),
        }
    }
}

fn default_sigma() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValueDistribution {
    /// Integers `1..=100`, uniformly.
    #[serde(rename = "discrete_uniform_1_100")]
    DiscreteUniform,
    /// Uniform on `(0, 1]`.
    #[serde(rename = "uniform_01")]
    Uniform01,
    /// `|N(0, sigma^2)|`.
    HalfNormal {
        #[serde(default = "default_sigma")]
        sigma: f64,
    },
    /// `F(x) = 1 - 1/x` on `[1, inf)`.
    Inverse,
    /// Resampled transaction output sums.
    BitcoinData { path: PathBuf, transform: Transform },
}

impl ValueDistribution {
    pub fn half_normal() -> Self {
        Self::HalfNormal { sigma: 1.0 }
    }

    /// Label used in result files.
    pub fn label(&self) -> String {
        match self {
            Self::DiscreteUniform => "discrete_uniform_1_100".into(),
            Self::Uniform01 => "uniform_01".into(),
            Self::HalfNormal { .. } => "half_normal".into(),
            Self::Inverse => "inverse".into(),
            Self::BitcoinData { transform, .. } => format!("bitcoin_{}", transform.name()),
        }
    }

    /// Loads any backing data so repeated draws share it.
    pub fn prepare(&self) -> Result<Sampler> {
        let kind = match self {
            Self::DiscreteUniform => SamplerKind::DiscreteUniform,
            Self::Uniform01 => SamplerKind::Uniform01,
            Self::HalfNormal { sigma } => {
                if !(sigma.is_finite() && *sigma > 0.0) {
                    return Err(Error::InvalidConfig(format!("half-normal sigma {sigma}")));
                }
                SamplerKind::HalfNormal(*sigma)
            }
            Self::Inverse => SamplerKind::Inverse,
            Self::BitcoinData { path, transform } => {
                SamplerKind::Pool(Arc::new(load_bitcoin_values(path, *transform)?))
            }
        };
        Ok(Sampler { kind })
    }
}

impl fmt::Display for ValueDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// A distribution ready to draw from.
#[derive(Clone, Debug)]
pub struct Sampler {
    kind: SamplerKind,
}

#[derive(Clone, Debug)]
enum SamplerKind {
    DiscreteUniform,
    Uniform01,
    HalfNormal(f64),
    Inverse,
    Pool(Arc<ValuePool>),
}

impl Sampler {
    /// A sampler over an in-memory pool of values.
    pub fn from_pool(pool: ValuePool) -> Self {
        Self {
            kind: SamplerKind::Pool(Arc::new(pool)),
        }
    }

    /// `n` i.i.d. draws; identical for identical `(n, seed)`.
    pub fn sample(&self, n: usize, seed: u64) -> BidVector {
        let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
        let raw: Vec<f64> = (0..n).map(|_| self.draw(&mut rng)).collect();
        BidVector::new(raw).expect("samplers only produce positive finite values")
    }

    fn draw(&self, rng: &mut Xoshiro256StarStar) -> f64 {
        match &self.kind {
            SamplerKind::DiscreteUniform => rng.random_range(1..=100u32) as f64,
            SamplerKind::Uniform01 => 1.0 - rng.next_f64(),
            SamplerKind::HalfNormal(sigma) => loop {
                let z: f64 = rng.sample(StandardNormal);
                let v = sigma * z.abs();
                if v > 0.0 {
                    break v;
                }
            },
            SamplerKind::Inverse => inverse_from_uniform(rng.next_f64()),
            SamplerKind::Pool(pool) => pool.values[rng.random_range(0..pool.values.len())],
        }
    }
}

/// Inverse-CDF draw for `F(x) = 1 - 1/x` given `u` in `[0, 1)`.
pub fn inverse_from_uniform(u: f64) -> f64 {
    1.0 / (1.0 - u)
}

/// `n` draws from `dist` with `seed`.
pub fn sample(dist: &ValueDistribution, n: usize, seed: u64) -> Result<BidVector> {
    Ok(dist.prepare()?.sample(n, seed))
}

/// Transformed values loaded from an output-sum file.
#[derive(Clone, Debug, PartialEq)]
pub struct ValuePool {
    pub values: Vec<f64>,
    /// Rows dropped because `v(x)` was not positive.
    pub filtered: usize,
}

/// Reads the output-sum CSV at `path` and applies `transform`.
pub fn load_bitcoin_values(path: &Path, transform: Transform) -> Result<ValuePool> {
    let file = File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
        _ => Error::Io(e),
    })?;
    parse_values_csv(file, transform)
}

/// Parses output-sum CSV text: the header `output_sum_satoshi` followed by
/// one positive integer per row.
pub fn parse_values_csv<R: Read>(reader: R, transform: Transform) -> Result<ValuePool> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();
    match records.next() {
        Some(Ok(h)) if h.len() == 1 && h[0].trim() == VALUES_CSV_HEADER => {}
        Some(Ok(h)) => {
            return Err(Error::MalformedRow {
                line: 1,
                reason: format!("expected header {VALUES_CSV_HEADER:?}, found {:?}", h.as_slice()),
            })
        }
        Some(Err(e)) => return Err(csv_error(e, 1)),
        None => {
            return Err(Error::MalformedRow {
                line: 1,
                reason: "missing header".into(),
            })
        }
    }

    let mut values = Vec::new();
    let mut filtered = 0usize;
    for (i, rec) in records.enumerate() {
        let line = i as u64 + 2;
        let rec = rec.map_err(|e| csv_error(e, line))?;
        if rec.len() != 1 {
            return Err(Error::MalformedRow {
                line,
                reason: format!("expected 1 field, found {}", rec.len()),
            });
        }
        let x: u64 = rec[0].trim().parse().map_err(|_| Error::MalformedRow {
            line,
            reason: format!("{:?} is not a non-negative integer", &rec[0]),
        })?;
        if x == 0 {
            return Err(Error::MalformedRow {
                line,
                reason: "output sum must be positive".into(),
            });
        }
        match transform.apply(x as f64) {
            Some(v) => values.push(v),
            None => filtered += 1,
        }
    }
    if values.is_empty() {
        return Err(Error::EmptyPool { filtered });
    }
    Ok(ValuePool { values, filtered })
}

fn csv_error(e: csv::Error, line: u64) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(line);
    Error::MalformedRow {
        line,
        reason: e.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pool(text: &str, t: Transform) -> Result<ValuePool> {
        parse_values_csv(text.as_bytes(), t)
    }

    #[test]
    fn transforms() {
        assert_eq!(pool("output_sum_satoshi\n10000\n", Transform::Sqrt).unwrap().values, [100.0]);
        let p = pool("output_sum_satoshi\n1\n100\n", Transform::Log).unwrap();
        assert_eq!(p.filtered, 1);
        assert_eq!(p.values.len(), 1);
        assert_eq!(pool("output_sum_satoshi\n7\n", Transform::Identity).unwrap().values, [7.0]);
    }

    #[test]
    fn log_of_powers_of_e() {
        // Output sums are integers, so use the nearest integers to e^1, e^2
        // and check against ln of those.
        let p = pool("output_sum_satoshi\n3\n7\n", Transform::Log).unwrap();
        assert_eq!(p.values, [3f64.ln(), 7f64.ln()]);
        assert!((Transform::Log.apply(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        let e2 = std::f64::consts::E * std::f64::consts::E;
        assert!((Transform::Log.apply(e2).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn malformed_rows() {
        assert!(matches!(
            pool("output_sum_satoshi\n5\nabc\n", Transform::Identity),
            Err(Error::MalformedRow { line: 3, .. })
        ));
        assert!(matches!(
            pool("output_sum_satoshi\n0\n", Transform::Identity),
            Err(Error::MalformedRow { line: 2, .. })
        ));
        assert!(matches!(
            pool("sum\n5\n", Transform::Identity),
            Err(Error::MalformedRow { line: 1, .. })
        ));
        assert!(matches!(pool("", Transform::Identity), Err(Error::MalformedRow { .. })));
        assert!(matches!(
            pool("output_sum_satoshi\n1\n1\n", Transform::Log),
            Err(Error::EmptyPool { filtered: 2 })
        ));
    }

    #[test]
    fn missing_file() {
        let err = load_bitcoin_values(Path::new("/nonexistent/values.csv"), Transform::Log);
        assert!(matches!(err, Err(Error::FileNotFound(_))));
    }

    #[test]
    fn inverse_cdf() {
        assert_eq!(inverse_from_uniform(0.5), 2.0);
        assert_eq!(inverse_from_uniform(0.0), 1.0);
    }

    #[test]
    fn discrete_values_are_integers_in_range() {
        let b = sample(&ValueDistribution::DiscreteUniform, 10_000, 3).unwrap();
        assert!(b.iter().all(|&v| v.fract() == 0.0 && (1.0..=100.0).contains(&v)));
        assert_eq!(b.max(), Some(100.0));
    }

    #[test]
    fn deterministic() {
        for d in [
            ValueDistribution::DiscreteUniform,
            ValueDistribution::Uniform01,
            ValueDistribution::half_normal(),
            ValueDistribution::Inverse,
        ] {
            assert_eq!(sample(&d, 500, 11).unwrap(), sample(&d, 500, 11).unwrap());
            assert_ne!(sample(&d, 500, 11).unwrap(), sample(&d, 500, 12).unwrap());
        }
    }

    #[test]
    fn config_names() {
        let d: ValueDistribution = serde_json::from_str(r#"{"kind":"half_normal"}"#).unwrap();
        assert_eq!(d, ValueDistribution::half_normal());
        let d: ValueDistribution =
            serde_json::from_str(r#"{"kind":"bitcoin_data","path":"x.csv","transform":"sqrt"}"#)
                .unwrap();
        assert_eq!(d.label(), "bitcoin_sqrt");
        let d: ValueDistribution = serde_json::from_str(r#"{"kind":"discrete_uniform_1_100"}"#).unwrap();
        assert_eq!(d, ValueDistribution::DiscreteUniform);
    }
}
