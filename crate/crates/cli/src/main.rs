//! `feemarket` command-line tool. Every subcommand parses its flags, calls
//! the library and prints JSON on stdout.
//!
//! Exit status: 0 on success, 1 when the library reports an error, 2 on a
//! usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use feemarket::experiments::{
    emit, emit_summary, run_grid, run_revenue_comparison, threads_from_env, with_threads,
    ExperimentConfig, OutputFormat,
};
use feemarket::numfmt::to_json;
use feemarket::oracle::multibid_oracle;
use feemarket::rng::derive_seed;
use feemarket::rsop::{
    check_rsop_leq_monopolistic, partition_bids, rsop_expected_revenue, rsop_outcome, verify_block,
    Block, Enumeration, DEFAULT_ALPHA,
};
use feemarket::{
    discount_ratio, distributions, monopolistic_outcome, monopolistic_outcome_capped,
    multibid_price, strategic_price, BidVector, Error, Mode,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "feemarket", version, about = "Transaction-fee auction toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct BidsArg {
    /// Comma-separated bids, e.g. 5,2,1,1
    #[arg(long, allow_hyphen_values = true)]
    bids: String,
}

#[derive(Args)]
struct OthersArg {
    /// Comma-separated bids of the other users
    #[arg(long, allow_hyphen_values = true)]
    others: String,
}

#[derive(Subcommand)]
enum Command {
    /// Monopolistic revenue, k* and price
    Price {
        #[command(flatten)]
        bids: BidsArg,
        /// Largest block size allowed
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Lowest single winning bid against the other users
    Strategic {
        #[command(flatten)]
        others: OthersArg,
        /// Also report the discount ratio of a user with this value
        #[arg(long, allow_hyphen_values = true)]
        value: Option<f64>,
        #[arg(long, default_value = "single")]
        mode: Mode,
    },
    /// Cheapest split bid against the other users
    Multibid {
        #[command(flatten)]
        others: OthersArg,
        /// Cross-check against the brute-force search
        #[arg(long)]
        oracle: bool,
    },
    /// RSOP outcome on one seeded partition plus the expected revenue
    Rsop {
        #[command(flatten)]
        bids: BidsArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_ALPHA, allow_hyphen_values = true)]
        alpha: f64,
        /// Partitions sampled for the expectation when n > 20
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
    },
    /// Valid transactions and fees of a block file
    VerifyBlock {
        #[arg(long)]
        file: PathBuf,
    },
    /// Run the experiment grid described by a config file
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's base_seed
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config's mode
        #[arg(long)]
        mode: Option<Mode>,
        /// Overrides the config's alpha
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        /// Overrides the config's output format
        #[arg(long)]
        format: Option<OutputFormat>,
        /// Overrides the config's output path
        #[arg(long)]
        output: Option<PathBuf>,
        /// Users sampled for delta_avg
        #[arg(long)]
        avg_subsample: Option<usize>,
    },
    /// Pay-your-bid against capped monopolistic revenue for uniform values
    CompareRevenue {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "100,500,1000,1500,2000")]
        block_sizes: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the per-run rows here
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
    },
    /// Check RSOP <= monopolistic revenue on random instances
    CheckConjectures {
        /// Largest instance size; instances up to 20 bids are exhaustive
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        #[arg(long, default_value_t = 1000)]
        instances: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Partitions sampled per instance above 20 bids
        #[arg(long, default_value_t = 4096)]
        samples: u64,
    },
}

fn bids(s: &str) -> Result<BidVector, Error> {
    s.parse()
}

fn run(cmd: Command) -> Result<String, Error> {
    Ok(match cmd {
        Command::Price { bids: b, cap } => {
            let b = bids(&b.bids)?;
            let outcome = match cap {
                Some(0) => return Err(Error::InvalidConfig("cap must be at least 1".into())),
                Some(c) => monopolistic_outcome_capped(&b, c),
                None => monopolistic_outcome(&b),
            };
            to_json(&outcome)
        }
        Command::Strategic { others, value, mode } => {
            let w = bids(&others.others)?;
            let price = strategic_price(&w)?;
            match value {
                Some(v) => to_json(&json!({
                    "price": price,
                    "discount_ratio": discount_ratio(v, &w, mode)?,
                })),
                None => to_json(&json!({ "price": price })),
            }
        }
        Command::Multibid { others, oracle } => {
            let w = bids(&others.others)?;
            let r = multibid_price(&w)?;
            if oracle {
                to_json(&json!({
                    "total": r.total,
                    "b_star": r.b_star,
                    "u_star": r.u_star,
                    "oracle_total": multibid_oracle(&w)?,
                }))
            } else {
                to_json(&r)
            }
        }
        Command::Rsop { bids: b, seed, alpha, samples } => {
            let b = bids(&b.bids)?;
            if samples == 0 {
                return Err(Error::InvalidConfig("samples must be at least 1".into()));
            }
            let part = partition_bids(b.len(), seed);
            let outcome = rsop_outcome(&b, &part, alpha)?;
            let expected = rsop_expected_revenue(&b, samples, seed);
            to_json(&json!({
                "bids": b,
                "partition": part.assignment,
                "outcome": outcome,
                "expected_revenue": expected,
            }))
        }
        Command::VerifyBlock { file } => {
            let bytes = std::fs::read(&file).map_err(|e| match e.kind() {
                std::io::ErrorKind::NotFound => Error::FileNotFound(file.clone()),
                _ => Error::Io(e),
            })?;
            to_json(&verify_block(&Block::from_json_slice(&bytes)?)?)
        }
        Command::Simulate { config, seed, mode, alpha, format, output, avg_subsample } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.base_seed = s;
            }
            if let Some(m) = mode {
                cfg.mode = m;
            }
            if let Some(a) = alpha {
                cfg.alpha = a;
            }
            if let Some(f) = format {
                cfg.output.format = f;
            }
            if let Some(p) = output {
                cfg.output.path = p;
            }
            if avg_subsample.is_some() {
                cfg.avg_subsample = avg_subsample;
            }
            cfg.validate()?;
            let rows = with_threads(threads_from_env()?, || run_grid(&cfg))?;
            emit(&rows, &cfg.output.path, cfg.output.format)?;
            let summary = emit_summary(&rows, &cfg.output.path)?;
            to_json(&json!({
                "rows": rows.len(),
                "output": cfg.output.path,
                "summary": summary,
            }))
        }
        Command::CompareRevenue { n, block_sizes, runs, seed, output, format } => {
            let c = with_threads(threads_from_env()?, || {
                run_revenue_comparison(n, &block_sizes, runs, seed)
            })?;
            if let Some(path) = output {
                emit(&c.rows, &path, format)?;
            }
            to_json(&json!({
                "n": c.n,
                "runs": c.runs,
                "seed": c.seed,
                "points": c.points,
                "nondecreasing_per_draw": c.nondecreasing_per_draw,
            }))
        }
        Command::CheckConjectures { n_max, instances, seed, samples } => {
            if n_max == 0 {
                return Err(Error::InvalidConfig("n-max must be at least 1".into()));
            }
            let dist = distributions::ValueDistribution::DiscreteUniform.prepare()?;
            let (mut checked, mut max_ratio) = (0u64, 0.0f64);
            let mut witnesses = Vec::new();
            for k in 0..instances {
                let s = derive_seed(seed, &[k]);
                let n = 1 + (s % n_max as u64) as usize;
                let b = dist.sample(n, derive_seed(s, &[0]));
                let how = Enumeration::auto(n, samples, derive_seed(s, &[1]));
                let c = check_rsop_leq_monopolistic(&b, how)?;
                checked += c.checked;
                max_ratio = max_ratio.max(c.max_ratio);
                if let Some(w) = c.witness {
                    witnesses.push(json!({ "bids": b, "witness": w }));
                }
            }
            to_json(&json!({
                "conjecture": "rsop_leq_monopolistic",
                "result": if witnesses.is_empty() { "pass" } else { "fail" },
                "instances": instances,
                "partitions_checked": checked,
                "max_ratio": max_ratio,
                "witnesses": witnesses,
            }))
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
