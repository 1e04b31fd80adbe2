use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{check_alpha, partition_bids, rsop_on_bids, Partition, RsopOutcome, Side};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Transaction {
    pub txid: [u8; 32],
    pub bid: f64,
}

/// A candidate block: header hash, ordered transactions and the carry
/// fraction. Only structural validity is modeled.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub header_hash: [u8; 32],
    pub transactions: Vec<Transaction>,
    pub alpha: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBlock {
    header_hash: String,
    alpha: f64,
    transactions: Vec<RawTx>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTx {
    txid: String,
    bid: f64,
}

fn decode_hash(field: &str, s: &str) -> Result<[u8; 32]> {
    if s.len() != 64 {
        return Err(Error::MalformedBlock(format!(
            "{field} must be 64 hex characters, got {}",
            s.len()
        )));
    }
    let mut out = [0u8; 32];
    hex::decode_to_slice(s, &mut out)
        .map_err(|e| Error::MalformedBlock(format!("{field}: {e}")))?;
    Ok(out)
}

impl Block {
    /// Builds a block, rejecting duplicate ids, non-positive bids and
    /// `alpha` outside `[0, 1]`.
    pub fn new(header_hash: [u8; 32], transactions: Vec<Transaction>, alpha: f64) -> Result<Self> {
        let block = Self {
            header_hash,
            transactions,
            alpha,
        };
        block.validate()?;
        Ok(block)
    }

    fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() {
            return Err(Error::MalformedBlock("alpha is not finite".into()));
        }
        check_alpha(self.alpha).map_err(|_| {
            Error::MalformedBlock(format!("alpha {} outside [0, 1]", self.alpha))
        })?;
        let mut seen = HashSet::with_capacity(self.transactions.len());
        for (i, tx) in self.transactions.iter().enumerate() {
            if !(tx.bid.is_finite() && tx.bid > 0.0) {
                return Err(Error::MalformedBlock(format!(
                    "transaction {i} has non-positive or non-finite bid {}",
                    tx.bid
                )));
            }
            if !seen.insert(tx.txid) {
                return Err(Error::DuplicateTxId(hex::encode(tx.txid)));
            }
        }
        Ok(())
    }

    /// Parses the JSON block format:
    /// `{"header_hash": hex64, "alpha": number, "transactions": [{"txid": hex64, "bid": number}]}`.
    pub fn from_json_slice(bytes: &[u8]) -> Result<Self> {
        let raw: RawBlock =
            serde_json::from_slice(bytes).map_err(|e| Error::MalformedBlock(e.to_string()))?;
        let header_hash = decode_hash("header_hash", &raw.header_hash)?;
        let transactions = raw
            .transactions
            .iter()
            .enumerate()
            .map(|(i, tx)| {
                Ok(Transaction {
                    txid: decode_hash(&format!("transactions[{i}].txid"), &tx.txid)?,
                    bid: tx.bid,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(header_hash, transactions, raw.alpha)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json_slice(s.as_bytes())
    }

    pub fn to_json(&self) -> String {
        let raw = RawBlock {
            header_hash: hex::encode(self.header_hash),
            alpha: self.alpha,
            transactions: self
                .transactions
                .iter()
                .map(|tx| RawTx {
                    txid: hex::encode(tx.txid),
                    bid: tx.bid,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("block serializes")
    }

    /// Partition seed: the first 8 bytes of the header hash, big-endian.
    pub fn seed(&self) -> u64 {
        let mut first = [0u8; 8];
        first.copy_from_slice(&self.header_hash[..8]);
        u64::from_be_bytes(first)
    }
}

/// Fee outcome for one transaction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TxFee {
    pub txid: String,
    pub bid: f64,
    pub side: Side,
    pub valid: bool,
    /// Zero for invalid transactions.
    pub fee: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockVerification {
    pub seed: u64,
    pub outcome: RsopOutcome,
    pub transactions: Vec<TxFee>,
}

impl BlockVerification {
    pub fn valid_txids(&self) -> impl Iterator<Item = &str> {
        self.transactions
            .iter()
            .filter(|t| t.valid)
            .map(|t| t.txid.as_str())
    }
}

/// Decides which transactions of `block` are valid and what each pays.
pub fn verify_block(block: &Block) -> Result<BlockVerification> {
    block.validate()?;
    let seed = block.seed();
    let n = block.transactions.len();
    let part: Partition = partition_bids(n, seed);
    let bids: Vec<f64> = block.transactions.iter().map(|t| t.bid).collect();
    let outcome = rsop_on_bids(&bids, &part, block.alpha)?;
    let transactions = block
        .transactions
        .iter()
        .zip(&part.assignment)
        .enumerate()
        .map(|(i, (tx, &side))| {
            let fee = outcome.fee(i);
            TxFee {
                txid: hex::encode(tx.txid),
                bid: tx.bid,
                side,
                valid: fee.is_some(),
                fee: fee.unwrap_or(0.0),
            }
        })
        .collect();
    Ok(BlockVerification {
        seed,
        outcome,
        transactions,
    })
}
