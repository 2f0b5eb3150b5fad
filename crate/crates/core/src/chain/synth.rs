//! Seeded synthetic chains with Bitcoin-shaped headers, P2PKH outputs and
//! a ground-truth UTXO index.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::address::Address;
use super::block::Block;
use super::hash::Hash256;
use super::header::{compact_to_target, BlockHeader, EASY_BITS};
use super::merkle::merkle_root;
use super::tx::{Transaction, TxIn, TxOut};
use crate::error::{Error, Result};

pub const COINBASE_VALUE: u64 = 50 * 100_000_000;
const GENESIS_TIME: u32 = 1_231_006_505;
const BLOCK_INTERVAL: u32 = 600;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n_blocks: usize,
    /// Inclusive range of non-coinbase transactions per block.
    pub txs_per_block: (usize, usize),
    pub n_addresses: usize,
    /// Inclusive range of outputs per non-coinbase transaction.
    pub outputs_per_tx: (usize, usize),
    /// Chance that a transaction spends a second input.
    pub spend_probability: f64,
    pub difficulty_bits: u32,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_blocks: 1008,
            txs_per_block: (0, 3),
            n_addresses: 200,
            outputs_per_tx: (1, 3),
            spend_probability: 0.3,
            difficulty_bits: EASY_BITS,
            seed: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UtxoRef {
    pub height: u32,
    pub txid: Hash256,
    pub vout: u32,
    pub value: u64,
}

#[derive(Clone, Debug)]
pub struct SyntheticChain {
    pub blocks: Vec<Block>,
    /// Per address, its unspent outputs ordered by (height, txid, vout).
    pub utxos: BTreeMap<Address, Vec<UtxoRef>>,
    pub addresses: Vec<Address>,
}

impl SyntheticChain {
    pub fn headers(&self) -> Vec<BlockHeader> {
        self.blocks.iter().map(|b| b.header).collect()
    }
}

struct PoolEntry {
    txid: Hash256,
    vout: u32,
    value: u64,
    address: Address,
    height: u32,
}

fn validate(config: &SynthConfig) -> Result<()> {
    if config.n_blocks == 0 {
        return Err(Error::domain("chain needs at least one block"));
    }
    if config.n_addresses == 0 {
        return Err(Error::domain("need at least one address"));
    }
    let (lo, hi) = config.outputs_per_tx;
    if lo == 0 || lo > hi || hi > 255 {
        return Err(Error::domain("outputs_per_tx must satisfy 1 <= min <= max <= 255"));
    }
    if config.txs_per_block.0 > config.txs_per_block.1 {
        return Err(Error::domain("txs_per_block min exceeds max"));
    }
    if !(0.0..=1.0).contains(&config.spend_probability) {
        return Err(Error::domain("spend_probability must lie in [0, 1]"));
    }
    let target = compact_to_target(config.difficulty_bits)?;
    // Keep mining at desk scale: expected work at most 2^16 hashes per block.
    if target < BigUint::from(1u8) << 240 {
        return Err(Error::domain("difficulty too high for synthetic mining"));
    }
    Ok(())
}

/// Mine `header` in place by incrementing the nonce.
pub fn mine(header: &mut BlockHeader) -> Result<()> {
    let target = compact_to_target(header.bits)?;
    loop {
        if BigUint::from_bytes_le(&header.hash().0) <= target {
            return Ok(());
        }
        header.nonce = header
            .nonce
            .checked_add(1)
            .ok_or_else(|| Error::domain("nonce space exhausted"))?;
    }
}

pub fn generate_synthetic_chain(config: &SynthConfig) -> Result<SyntheticChain> {
    validate(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut addresses: Vec<Address> = (0..config.n_addresses)
        .map(|_| Address::new(rng.gen()))
        .collect();
    addresses.sort();
    addresses.dedup();

    let mut pool: Vec<PoolEntry> = Vec::new();
    let mut blocks: Vec<Block> = Vec::with_capacity(config.n_blocks);
    let mut prev_hash = Hash256::ZERO;

    for height in 0..config.n_blocks as u32 {
        let coinbase = Transaction::coinbase(
            height,
            vec![TxOut {
                value: COINBASE_VALUE,
                address: *addresses.choose(&mut rng).unwrap(),
            }],
        );
        let mut txs = vec![coinbase];
        // Only outputs from earlier blocks are spendable.
        let spendable = pool.len();
        let mut available: Vec<usize> = (0..spendable).collect();
        let n_txs = if height == 0 {
            0
        } else {
            rng.gen_range(config.txs_per_block.0..=config.txs_per_block.1)
        };
        let mut spent: Vec<usize> = Vec::new();
        for _ in 0..n_txs {
            if available.is_empty() {
                break;
            }
            let n_in = if available.len() > 1 && rng.gen_bool(config.spend_probability) {
                2
            } else {
                1
            };
            let mut inputs = Vec::with_capacity(n_in);
            let mut total = 0u64;
            for _ in 0..n_in {
                let pick = available.swap_remove(rng.gen_range(0..available.len()));
                let e = &pool[pick];
                inputs.push(TxIn {
                    prev_txid: e.txid,
                    vout: e.vout,
                });
                total += e.value;
                spent.push(pick);
            }
            let mut n_out = rng.gen_range(config.outputs_per_tx.0..=config.outputs_per_tx.1);
            if (n_out as u64) > total {
                n_out = 1;
            }
            let share = total / n_out as u64;
            let outputs = (0..n_out)
                .map(|i| TxOut {
                    value: if i == 0 { total - share * (n_out as u64 - 1) } else { share },
                    address: *addresses.choose(&mut rng).unwrap(),
                })
                .collect();
            txs.push(Transaction { inputs, outputs });
        }

        spent.sort_unstable_by(|a, b| b.cmp(a));
        for idx in spent {
            pool.swap_remove(idx);
        }
        for tx in &txs {
            let id = tx.txid();
            for (vout, o) in tx.outputs.iter().enumerate() {
                pool.push(PoolEntry {
                    txid: id,
                    vout: vout as u32,
                    value: o.value,
                    address: o.address,
                    height,
                });
            }
        }

        let txids: Vec<Hash256> = txs.iter().map(Transaction::txid).collect();
        let mut header = BlockHeader {
            version: 1,
            prev_hash,
            merkle_root: merkle_root(&txids)?,
            time: GENESIS_TIME + BLOCK_INTERVAL * height,
            bits: config.difficulty_bits,
            nonce: 0,
        };
        mine(&mut header)?;
        prev_hash = header.hash();
        blocks.push(Block {
            height,
            header,
            txs,
        });
    }

    let mut utxos: BTreeMap<Address, Vec<UtxoRef>> = BTreeMap::new();
    for e in pool {
        utxos.entry(e.address).or_default().push(UtxoRef {
            height: e.height,
            txid: e.txid,
            vout: e.vout,
            value: e.value,
        });
    }
    for list in utxos.values_mut() {
        list.sort();
    }
    Ok(SyntheticChain {
        blocks,
        utxos,
        addresses,
    })
}
