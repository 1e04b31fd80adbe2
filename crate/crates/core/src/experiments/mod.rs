//! Seeded Monte Carlo grids over value distributions and population sizes.
//!
//! Every run draws `n = 2^i` values with its own sub-seed
//! `derive_seed(base_seed, [distribution index, i, run])`, so runs are
//! independent tasks and results do not depend on scheduling. Rows come
//! back in `(distribution, i, run)` order followed by one summary row
//! (`run = -1`) per `(distribution, n)`.

mod config;
mod grid;
mod output;

pub use config::{ExperimentConfig, ExponentRange, GridKind, OutputFormat, OutputSpec};
pub use grid::{
    run_discount_grid, run_grid, run_revenue_comparison, run_rsop_grid, summarize,
    RevenueComparison, RevenuePoint, SummaryRow,
};
pub use output::{
    emit, emit_summary, read_rows_csv, rows_to_csv, rows_to_json, summary_path, summary_to_csv,
    RESULT_CSV_HEADER, SUMMARY_CSV_HEADER,
};

use serde::{Deserialize, Serialize};

/// Environment variable capping the worker threads used by the grids.
pub const THREADS_ENV: &str = "FEEMARKET_THREADS";

/// `run` value marking a summary row.
pub const SUMMARY_RUN: i64 = -1;

/// One observation, or a per-`(distribution, n)` mean when `run == -1`.
///
/// Columns that a grid does not compute are `None` and print as empty CSV
/// cells. `gain_ratio_rsop` is also `None` when the RSOP revenue was 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub distribution: String,
    pub n: usize,
    pub run: i64,
    pub delta_avg: Option<f64>,
    pub delta_max: Option<f64>,
    pub k_star: usize,
    pub revenue_monopolistic: f64,
    pub revenue_rsop: Option<f64>,
    pub gain_ratio_rsop: Option<f64>,
    pub pay_your_bid_revenue: Option<f64>,
    pub seed_used: u64,
}

impl ResultRow {
    pub fn is_summary(&self) -> bool {
        self.run == SUMMARY_RUN
    }
}

/// Thread count requested through [`THREADS_ENV`], if any.
pub fn threads_from_env() -> crate::Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(t) if t >= 1 => Ok(Some(t)),
            _ => Err(crate::Error::InvalidConfig(format!(
                "{THREADS_ENV} must be a positive integer, got {s:?}"
            ))),
        },
    }
}

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool
/// when `threads` is `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        None => f(),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .expect("thread pool builds")
            .install(f),
    }
}
