//! Cost models of the two comparison protocols: BIP-37 Bloom-filter SPV and
//! downloading every block.

pub mod bloom;
pub mod merkleblock;

use std::collections::HashMap;
use std::ops::Range;

pub use bloom::BloomFilter;
pub use merkleblock::MerkleBlock;

use crate::builder::partition_chain;
use crate::chain::{Block, Hash256, Transaction};
use crate::error::{Error, Result};

pub const DEFAULT_FP_RATE: f64 = 0.0001;

/// BIP-37 relevance without filter updates: the txid, any output's hash160
/// or any spent outpoint is in the filter.
pub fn is_relevant(filter: &BloomFilter, tx: &Transaction, txid: &Hash256) -> bool {
    filter.contains(&txid.0)
        || tx.outputs.iter().any(|o| filter.contains(&o.address.hash160))
        || (!tx.is_coinbase()
            && tx.inputs.iter().any(|i| {
                let mut op = [0u8; 36];
                op[..32].copy_from_slice(&i.prev_txid.0);
                op[32..].copy_from_slice(&i.vout.to_le_bytes());
                filter.contains(&op)
            }))
}

/// Merkle block plus the matched transactions for one block.
pub fn build_merkleblock(block: &Block, filter: &BloomFilter) -> Result<(MerkleBlock, Vec<Transaction>)> {
    let txids = block.txids();
    let matches: Vec<bool> = block
        .txs
        .iter()
        .zip(&txids)
        .map(|(tx, id)| is_relevant(filter, tx, id))
        .collect();
    let mb = MerkleBlock::build(block.header, &txids, &matches)?;
    let txs = block
        .txs
        .iter()
        .zip(&matches)
        .filter(|(_, &m)| m)
        .map(|(t, _)| t.clone())
        .collect();
    Ok((mb, txs))
}

/// Precomputed per-chain data for repeated baseline costing.
pub struct ChainIndex<'a> {
    blocks: &'a [Block],
    txids: Vec<Vec<Hash256>>,
    height_of: HashMap<Hash256, usize>,
    /// `prefix[h]` = total size of blocks `0..h`.
    prefix: Vec<u64>,
}

impl<'a> ChainIndex<'a> {
    pub fn new(blocks: &'a [Block]) -> Self {
        let txids: Vec<Vec<Hash256>> = blocks.iter().map(Block::txids).collect();
        let mut height_of = HashMap::new();
        for (h, ids) in txids.iter().enumerate() {
            for id in ids {
                height_of.insert(*id, h);
            }
        }
        let mut prefix = vec![0u64];
        for b in blocks {
            prefix.push(prefix.last().unwrap() + b.serialized_len() as u64);
        }
        ChainIndex { blocks, txids, height_of, prefix }
    }

    pub fn height_of(&self, txid: &Hash256) -> Result<usize> {
        self.height_of
            .get(txid)
            .copied()
            .ok_or_else(|| Error::domain(format!("txid {txid} not in chain")))
    }

    /// Size of blocks from genesis through the one holding `txid`, inclusive.
    pub fn naive_bandwidth(&self, txid: &Hash256) -> Result<u64> {
        Ok(self.prefix[self.height_of(txid)? + 1])
    }

    /// Fresh one-element filter holding `txid`, run over `range`; the reply
    /// is every merkleblock plus every matched transaction. Message headers
    /// are not counted.
    pub fn bip37_bandwidth_over(&self, txid: &Hash256, range: Range<usize>, fp_rate: f64, tweak: u32) -> Result<u64> {
        let h = self.height_of(txid)?;
        if !range.contains(&h) || range.end > self.blocks.len() {
            return Err(Error::domain(format!("scan range {range:?} misses block {h}")));
        }
        let mut filter = BloomFilter::new(1, fp_rate, tweak);
        filter.insert(&txid.0);
        let mut total = 0u64;
        for height in range {
            let block = &self.blocks[height];
            let ids = &self.txids[height];
            let matches: Vec<bool> = block
                .txs
                .iter()
                .zip(ids)
                .map(|(tx, id)| is_relevant(&filter, tx, id))
                .collect();
            let mb = MerkleBlock::build(block.header, ids, &matches)?;
            total += mb.serialized_len() as u64;
            total += block
                .txs
                .iter()
                .zip(&matches)
                .filter(|(_, &m)| m)
                .map(|(t, _)| t.serialized_len() as u64)
                .sum::<u64>();
        }
        Ok(total)
    }

    /// BIP-37 cost scanning the period (weekly, monthly or all-time) that
    /// holds the transaction.
    pub fn bip37_bandwidth(&self, txid: &Hash256, fp_rate: f64, tweak: u32) -> Result<u64> {
        let h = self.height_of(txid)?;
        let part = partition_chain(self.blocks)?;
        let period = part.period_of(h).expect("partition covers the chain");
        self.bip37_bandwidth_over(txid, part.range(period), fp_rate, tweak)
    }
}

pub fn naive_bandwidth(txid: &Hash256, blocks: &[Block]) -> Result<u64> {
    ChainIndex::new(blocks).naive_bandwidth(txid)
}

pub fn bip37_bandwidth(txid: &Hash256, blocks: &[Block], fp_rate: f64, tweak: u32) -> Result<u64> {
    ChainIndex::new(blocks).bip37_bandwidth(txid, fp_rate, tweak)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::synth::{generate_synthetic_chain, SynthConfig};

    fn chain() -> Vec<Block> {
        generate_synthetic_chain(&SynthConfig { n_blocks: 60, seed: 21, ..Default::default() })
            .unwrap()
            .blocks
    }

    #[test]
    fn naive_is_inclusive_prefix_sum() {
        let blocks = chain();
        let idx = ChainIndex::new(&blocks);
        let g = blocks[0].txs[0].txid();
        assert_eq!(idx.naive_bandwidth(&g).unwrap(), blocks[0].serialized_len() as u64);
        let t = blocks[2].txs[0].txid();
        let want: usize = blocks[..=2].iter().map(Block::serialized_len).sum();
        assert_eq!(naive_bandwidth(&t, &blocks).unwrap(), want as u64);
        let mut last = 0;
        for b in &blocks {
            let v = idx.naive_bandwidth(&b.txs[0].txid()).unwrap();
            assert!(v > last);
            last = v;
        }
        assert!(idx.naive_bandwidth(&Hash256([9; 32])).is_err());
    }

    #[test]
    fn bip37_limits_and_determinism() {
        let blocks = chain();
        let idx = ChainIndex::new(&blocks);
        let tx = &blocks[30].txs[0];
        let id = tx.txid();
        // A filter that matches almost nothing: one merkleblock per block plus the tx.
        let quiet = idx.bip37_bandwidth_over(&id, 30..31, 1e-9, 5).unwrap();
        let (mb, matched) = build_merkleblock(&blocks[30], &{
            let mut f = BloomFilter::new(1, 1e-9, 5);
            f.insert(&id.0);
            f
        })
        .unwrap();
        assert!(matched.contains(tx));
        assert_eq!(quiet, (mb.serialized_len() + matched.iter().map(Transaction::serialized_len).sum::<usize>()) as u64);
        assert_eq!(idx.bip37_bandwidth(&id, 0.01, 9).unwrap(), idx.bip37_bandwidth(&id, 0.01, 9).unwrap());
        assert_eq!(bip37_bandwidth(&id, &blocks, 0.01, 9).unwrap(), idx.bip37_bandwidth(&id, 0.01, 9).unwrap());
        assert!(idx.bip37_bandwidth_over(&id, 0..30, 0.01, 1).is_err());
    }

    #[test]
    fn bip37_grows_with_fp_rate_on_average() {
        let blocks = chain();
        let idx = ChainIndex::new(&blocks);
        let id = blocks[40].txs[0].txid();
        let mean = |p: f64| (0..40u32).map(|s| idx.bip37_bandwidth(&id, p, s).unwrap()).sum::<u64>() as f64 / 40.0;
        let (a, b, c) = (mean(0.0001), mean(0.05), mean(0.5));
        assert!(a <= b && b <= c, "{a} {b} {c}");
    }
}
