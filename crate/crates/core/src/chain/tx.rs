//! Transactions and their canonical serialization:
//!
//! ```text
//! u32le input_count
//!   per input:  prev_txid[32] | u32le vout
//! u32le output_count
//!   per output: u64le value | u8 len (=20) | hash160[20]
//! ```

use serde::{Deserialize, Serialize};

use super::address::Address;
use super::hash::{sha256d, Hash256};
use crate::error::{Error, Result};

const INPUT_LEN: usize = 36;
const OUTPUT_LEN: usize = 8 + 1 + 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OutPoint {
    pub txid: Hash256,
    pub vout: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TxIn {
    pub prev_txid: Hash256,
    pub vout: u32,
}

impl TxIn {
    pub fn outpoint(&self) -> OutPoint {
        OutPoint {
            txid: self.prev_txid,
            vout: self.vout,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TxOut {
    pub value: u64,
    pub address: Address,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transaction {
    pub inputs: Vec<TxIn>,
    pub outputs: Vec<TxOut>,
}

impl Transaction {
    /// A coinbase spends nothing: its single input references the all-zero txid.
    /// The vout field carries the block height so every coinbase hashes uniquely.
    pub fn coinbase(height: u32, outputs: Vec<TxOut>) -> Self {
        Transaction {
            inputs: vec![TxIn {
                prev_txid: Hash256::ZERO,
                vout: height,
            }],
            outputs,
        }
    }

    pub fn is_coinbase(&self) -> bool {
        self.inputs.len() == 1 && self.inputs[0].prev_txid == Hash256::ZERO
    }

    pub fn serialized_len(&self) -> usize {
        4 + INPUT_LEN * self.inputs.len() + 4 + OUTPUT_LEN * self.outputs.len()
    }

    pub fn serialize(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.serialized_len());
        out.extend_from_slice(&(self.inputs.len() as u32).to_le_bytes());
        for i in &self.inputs {
            out.extend_from_slice(&i.prev_txid.0);
            out.extend_from_slice(&i.vout.to_le_bytes());
        }
        out.extend_from_slice(&(self.outputs.len() as u32).to_le_bytes());
        for o in &self.outputs {
            out.extend_from_slice(&o.value.to_le_bytes());
            out.push(20);
            out.extend_from_slice(&o.address.hash160);
        }
        out
    }

    /// Parse exactly one transaction; trailing bytes are an error.
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { buf: bytes, pos: 0 };
        let n_in = r.u32()? as usize;
        if n_in > bytes.len() / INPUT_LEN {
            return Err(Error::parse("input count exceeds buffer"));
        }
        let mut inputs = Vec::with_capacity(n_in);
        for _ in 0..n_in {
            let prev_txid = Hash256(r.take(32)?.try_into().unwrap());
            let vout = r.u32()?;
            inputs.push(TxIn { prev_txid, vout });
        }
        let n_out = r.u32()? as usize;
        if n_out > bytes.len() / OUTPUT_LEN {
            return Err(Error::parse("output count exceeds buffer"));
        }
        let mut outputs = Vec::with_capacity(n_out);
        for _ in 0..n_out {
            let value = u64::from_le_bytes(r.take(8)?.try_into().unwrap());
            let len = r.take(1)?[0];
            if len != 20 {
                return Err(Error::parse(format!("address payload length {len}, expected 20")));
            }
            let hash160 = r.take(20)?.try_into().unwrap();
            outputs.push(TxOut {
                value,
                address: Address::new(hash160),
            });
        }
        if r.pos != bytes.len() {
            return Err(Error::parse("trailing bytes after transaction"));
        }
        Ok(Transaction { inputs, outputs })
    }

    pub fn txid(&self) -> Hash256 {
        sha256d(&self.serialize())
    }
}

pub fn txid(tx: &Transaction) -> Hash256 {
    tx.txid()
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::parse("transaction truncated"))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}
