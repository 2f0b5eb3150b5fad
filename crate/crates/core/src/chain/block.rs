use super::hash::{compact_size_len, Hash256};
use super::header::{BlockHeader, HEADER_LEN};
use super::merkle::merkle_root;
use super::tx::Transaction;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub height: u32,
    pub header: BlockHeader,
    pub txs: Vec<Transaction>,
}

impl Block {
    pub fn txids(&self) -> Vec<Hash256> {
        self.txs.iter().map(Transaction::txid).collect()
    }

    pub fn computed_merkle_root(&self) -> Result<Hash256> {
        merkle_root(&self.txids())
    }

    /// Header, CompactSize transaction count, then each transaction.
    pub fn serialized_len(&self) -> usize {
        HEADER_LEN
            + compact_size_len(self.txs.len() as u64)
            + self.txs.iter().map(Transaction::serialized_len).sum::<usize>()
    }
}
