use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, GridKind};
use super::{ResultRow, SUMMARY_RUN};
use crate::distributions::{Sampler, ValueDistribution};
use crate::error::{Error, Result};
use crate::mechanism::{monopolistic_outcome, monopolistic_outcome_capped, pay_your_bid_revenue};
use crate::rng::derive_seed;
use crate::rsop::{partition_bids, rsop_revenue_sorted, Estimate, Side};
use crate::strategic::{discount_stats, AverageOver};

/// Sub-seed labels under a run's seed.
const USER_SAMPLE_STREAM: u64 = 0;
const PARTITION_STREAM: u64 = 1;

struct Task {
    dist: usize,
    exponent: u32,
    run: usize,
}

fn tasks(cfg: &ExperimentConfig) -> Vec<Task> {
    let mut out = Vec::new();
    for dist in 0..cfg.distributions.len() {
        for exponent in cfg.n_exponents.iter() {
            for run in 0..cfg.runs_per_point {
                out.push(Task { dist, exponent, run });
            }
        }
    }
    out
}

fn run_seed(cfg: &ExperimentConfig, t: &Task) -> u64 {
    derive_seed(cfg.base_seed, &[t.dist as u64, t.exponent as u64, t.run as u64])
}

/// Monopolistic revenue, `k*` and one-partition RSOP revenue of a draw.
fn revenue_columns(bids: &crate::BidVector, seed: u64) -> (f64, usize, f64, Option<f64>) {
    let mono = monopolistic_outcome(bids);
    let part = partition_bids(bids.len(), derive_seed(seed, &[PARTITION_STREAM]));
    let rsop = rsop_revenue_sorted(bids.as_slice(), |i| part.assignment[i] == Side::A);
    let gain = (rsop > 0.0).then(|| mono.revenue / rsop - 1.0);
    (mono.revenue, mono.k_star, rsop, gain)
}

fn grid(cfg: &ExperimentConfig, kind: GridKind) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let samplers = cfg
        .distributions
        .iter()
        .map(ValueDistribution::prepare)
        .collect::<Result<Vec<Sampler>>>()?;
    let labels: Vec<String> = cfg.distributions.iter().map(|d| d.label()).collect();
    let mut rows = tasks(cfg)
        .par_iter()
        .map(|t| -> Result<ResultRow> {
            let n = 1usize << t.exponent;
            let seed = run_seed(cfg, t);
            let bids = samplers[t.dist].sample(n, seed);
            let (revenue, k_star, rsop, gain) = revenue_columns(&bids, seed);
            let (delta_avg, delta_max) = match kind {
                GridKind::Rsop => (None, None),
                GridKind::Discount => {
                    let average = match cfg.subsample_at(n) {
                        Some(users) => AverageOver::Sample {
                            users,
                            seed: derive_seed(seed, &[USER_SAMPLE_STREAM]),
                        },
                        None => AverageOver::All,
                    };
                    let stats = discount_stats(&bids, cfg.mode, average)?;
                    (Some(stats.delta_avg), Some(stats.delta_max))
                }
            };
            Ok(ResultRow {
                distribution: labels[t.dist].clone(),
                n,
                run: t.run as i64,
                delta_avg,
                delta_max,
                k_star,
                revenue_monopolistic: revenue,
                revenue_rsop: Some(rsop),
                gain_ratio_rsop: gain,
                pay_your_bid_revenue: None,
                seed_used: seed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary: Vec<ResultRow> = summarize(&rows)
        .iter()
        .map(|s| s.to_row(cfg.base_seed))
        .collect();
    rows.extend(summary);
    Ok(rows)
}

/// Discount statistics and revenues for every `(distribution, n, run)`.
pub fn run_discount_grid(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    grid(cfg, GridKind::Discount)
}

/// Monopolistic and one-partition RSOP revenues for every run; the summary
/// `gain_ratio_rsop` is `mean R / mean RSOP - 1`.
pub fn run_rsop_grid(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    grid(cfg, GridKind::Rsop)
}

/// The grid selected by `cfg.grid`.
pub fn run_grid(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    grid(cfg, cfg.grid)
}

/// Mean and standard error over runs of one `(distribution, n)` cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub distribution: String,
    pub n: usize,
    pub runs: usize,
    pub delta_avg_mean: Option<f64>,
    pub delta_avg_stderr: Option<f64>,
    pub delta_max_mean: Option<f64>,
    pub delta_max_stderr: Option<f64>,
    pub k_star_mean: f64,
    pub revenue_monopolistic_mean: f64,
    pub revenue_monopolistic_stderr: f64,
    pub revenue_rsop_mean: Option<f64>,
    pub revenue_rsop_stderr: Option<f64>,
    /// `mean R / mean RSOP - 1`; `None` if every RSOP revenue was 0.
    pub gain_ratio_rsop: Option<f64>,
    /// Runs whose RSOP revenue was 0.
    pub zero_rsop_runs: usize,
    pub pay_your_bid_mean: Option<f64>,
    pub pay_your_bid_stderr: Option<f64>,
}

fn estimate(values: &[f64]) -> Option<Estimate> {
    (!values.is_empty()).then(|| Estimate::from_samples(values))
}

impl SummaryRow {
    fn from_cell(cell: &[&ResultRow]) -> Self {
        let col = |f: &dyn Fn(&ResultRow) -> Option<f64>| -> Vec<f64> {
            cell.iter().filter_map(|r| f(r)).collect()
        };
        let delta_avg = estimate(&col(&|r| r.delta_avg));
        let delta_max = estimate(&col(&|r| r.delta_max));
        let mono = estimate(&col(&|r| Some(r.revenue_monopolistic))).expect("non-empty cell");
        let rsop_values = col(&|r| r.revenue_rsop);
        let rsop = estimate(&rsop_values);
        let pyb = estimate(&col(&|r| r.pay_your_bid_revenue));
        let k_star_mean = cell.iter().map(|r| r.k_star as f64).sum::<f64>() / cell.len() as f64;
        Self {
            distribution: cell[0].distribution.clone(),
            n: cell[0].n,
            runs: cell.len(),
            delta_avg_mean: delta_avg.map(|e| e.mean),
            delta_avg_stderr: delta_avg.map(|e| e.stderr),
            delta_max_mean: delta_max.map(|e| e.mean),
            delta_max_stderr: delta_max.map(|e| e.stderr),
            k_star_mean,
            revenue_monopolistic_mean: mono.mean,
            revenue_monopolistic_stderr: mono.stderr,
            revenue_rsop_mean: rsop.map(|e| e.mean),
            revenue_rsop_stderr: rsop.map(|e| e.stderr),
            gain_ratio_rsop: rsop
                .filter(|e| e.mean > 0.0)
                .map(|e| mono.mean / e.mean - 1.0),
            zero_rsop_runs: rsop_values.iter().filter(|&&v| v == 0.0).count(),
            pay_your_bid_mean: pyb.map(|e| e.mean),
            pay_your_bid_stderr: pyb.map(|e| e.stderr),
        }
    }

    /// The `run = -1` row carrying the cell means; `k_star` is the rounded
    /// mean.
    pub fn to_row(&self, seed: u64) -> ResultRow {
        ResultRow {
            distribution: self.distribution.clone(),
            n: self.n,
            run: SUMMARY_RUN,
            delta_avg: self.delta_avg_mean,
            delta_max: self.delta_max_mean,
            k_star: self.k_star_mean.round() as usize,
            revenue_monopolistic: self.revenue_monopolistic_mean,
            revenue_rsop: self.revenue_rsop_mean,
            gain_ratio_rsop: self.gain_ratio_rsop,
            pay_your_bid_revenue: self.pay_your_bid_mean,
            seed_used: seed,
        }
    }
}

/// Per-`(distribution, n)` summaries of the detail rows, in order of first
/// appearance. Summary rows in the input are ignored.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut cells: Vec<((&str, usize), Vec<&ResultRow>)> = Vec::new();
    for r in rows.iter().filter(|r| !r.is_summary()) {
        let key = (r.distribution.as_str(), r.n);
        match cells.iter_mut().find(|(k, _)| *k == key) {
            Some((_, cell)) => cell.push(r),
            None => cells.push((key, vec![r])),
        }
    }
    cells.iter().map(|(_, cell)| SummaryRow::from_cell(cell)).collect()
}

/// Mean revenues of both mechanisms at one block size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RevenuePoint {
    pub block_size: usize,
    pub pay_your_bid_mean: f64,
    pub pay_your_bid_stderr: f64,
    pub monopolistic_mean: f64,
    pub monopolistic_stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RevenueComparison {
    pub n: usize,
    pub runs: usize,
    pub seed: u64,
    pub points: Vec<RevenuePoint>,
    /// Capped monopolistic revenue never fell as the block size grew, in
    /// any single draw.
    pub nondecreasing_per_draw: bool,
    /// One row per `(block size, run)` plus one summary row per block size.
    /// `n` holds the block size; the population size is in the label.
    pub rows: Vec<ResultRow>,
}

/// Pay-your-bid against capped monopolistic revenue for `n` uniform
/// `(0, 1]` values, over `runs` draws seeded `derive_seed(seed, [run])`.
pub fn run_revenue_comparison(
    n: usize,
    block_sizes: &[usize],
    runs: usize,
    seed: u64,
) -> Result<RevenueComparison> {
    if n == 0 || runs == 0 || block_sizes.is_empty() || block_sizes.contains(&0) {
        return Err(Error::InvalidConfig(
            "revenue comparison needs n, runs and every block size to be positive".into(),
        ));
    }
    let sampler = ValueDistribution::Uniform01.prepare()?;
    let label = format!("uniform_01_n{n}");
    let mut order: Vec<usize> = (0..block_sizes.len()).collect();
    order.sort_by_key(|&i| block_sizes[i]);

    // per_run[run][j] = (pay-your-bid, capped revenue, capped k*) at block_sizes[j]
    let per_run: Vec<(u64, Vec<(f64, f64, usize)>)> = (0..runs)
        .into_par_iter()
        .map(|run| {
            let s = derive_seed(seed, &[run as u64]);
            let bids = sampler.sample(n, s);
            let cols = block_sizes
                .iter()
                .map(|&l| {
                    let capped = monopolistic_outcome_capped(&bids, l);
                    (pay_your_bid_revenue(&bids, l), capped.revenue, capped.k_star)
                })
                .collect();
            (s, cols)
        })
        .collect();

    let nondecreasing_per_draw = per_run.iter().all(|(_, cols)| {
        order.windows(2).all(|w| cols[w[0]].1 <= cols[w[1]].1)
    });

    let mut rows = Vec::new();
    let mut points = Vec::new();
    for (j, &l) in block_sizes.iter().enumerate() {
        let cell: Vec<ResultRow> = per_run
            .iter()
            .enumerate()
            .map(|(run, (s, cols))| ResultRow {
                distribution: label.clone(),
                n: l,
                run: run as i64,
                delta_avg: None,
                delta_max: None,
                k_star: cols[j].2,
                revenue_monopolistic: cols[j].1,
                revenue_rsop: None,
                gain_ratio_rsop: None,
                pay_your_bid_revenue: Some(cols[j].0),
                seed_used: *s,
            })
            .collect();
        let summary = SummaryRow::from_cell(&cell.iter().collect::<Vec<_>>());
        points.push(RevenuePoint {
            block_size: l,
            pay_your_bid_mean: summary.pay_your_bid_mean.expect("pay-your-bid column filled"),
            pay_your_bid_stderr: summary.pay_your_bid_stderr.expect("pay-your-bid column filled"),
            monopolistic_mean: summary.revenue_monopolistic_mean,
            monopolistic_stderr: summary.revenue_monopolistic_stderr,
        });
        rows.extend(cell);
        rows.push(summary.to_row(seed));
    }
    Ok(RevenueComparison {
        n,
        runs,
        seed,
        points,
        nondecreasing_per_draw,
        rows,
    })
}
