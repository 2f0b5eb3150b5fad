//! Line-delimited JSON chain interchange, one block per line.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::block::Block;
use super::hash::Hash256;
use super::header::BlockHeader;
use super::tx::{Transaction, TxIn, TxOut};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct JsonBlock {
    height: u32,
    header: JsonHeader,
    txs: Vec<JsonTx>,
}

#[derive(Serialize, Deserialize)]
struct JsonHeader {
    version: i32,
    prev_hash: String,
    merkle_root: String,
    time: u32,
    bits: String,
    nonce: u32,
}

#[derive(Serialize, Deserialize)]
struct JsonTx {
    inputs: Vec<JsonInput>,
    outputs: Vec<TxOut>,
}

#[derive(Serialize, Deserialize)]
struct JsonInput {
    txid: String,
    vout: u32,
}

impl From<&Block> for JsonBlock {
    fn from(b: &Block) -> Self {
        JsonBlock {
            height: b.height,
            header: JsonHeader {
                version: b.header.version,
                prev_hash: b.header.prev_hash.to_hex(),
                merkle_root: b.header.merkle_root.to_hex(),
                time: b.header.time,
                bits: format!("{:08x}", b.header.bits),
                nonce: b.header.nonce,
            },
            txs: b
                .txs
                .iter()
                .map(|tx| JsonTx {
                    inputs: tx
                        .inputs
                        .iter()
                        .map(|i| JsonInput {
                            txid: i.prev_txid.to_hex(),
                            vout: i.vout,
                        })
                        .collect(),
                    outputs: tx.outputs.clone(),
                })
                .collect(),
        }
    }
}

impl TryFrom<JsonBlock> for Block {
    type Error = Error;
    fn try_from(j: JsonBlock) -> Result<Block> {
        let bits = u32::from_str_radix(&j.header.bits, 16)
            .map_err(|e| Error::parse(format!("bad bits {:?}: {e}", j.header.bits)))?;
        let txs = j
            .txs
            .into_iter()
            .map(|t| {
                Ok(Transaction {
                    inputs: t
                        .inputs
                        .into_iter()
                        .map(|i| {
                            Ok(TxIn {
                                prev_txid: Hash256::from_hex(&i.txid)?,
                                vout: i.vout,
                            })
                        })
                        .collect::<Result<_>>()?,
                    outputs: t.outputs,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Block {
            height: j.height,
            header: BlockHeader {
                version: j.header.version,
                prev_hash: Hash256::from_hex(&j.header.prev_hash)?,
                merkle_root: Hash256::from_hex(&j.header.merkle_root)?,
                time: j.header.time,
                bits,
                nonce: j.header.nonce,
            },
            txs,
        })
    }
}

pub fn block_to_json_line(block: &Block) -> String {
    serde_json::to_string(&JsonBlock::from(block)).expect("block serializes")
}

pub fn block_from_json_line(line: &str) -> Result<Block> {
    let j: JsonBlock = serde_json::from_str(line)?;
    j.try_into()
}

pub fn write_chain<W: Write>(blocks: &[Block], mut w: W) -> Result<()> {
    for b in blocks {
        writeln!(w, "{}", block_to_json_line(b))?;
    }
    Ok(())
}

/// Read blocks, checking heights run 0, 1, 2, ...
pub fn read_chain<R: BufRead>(r: R) -> Result<Vec<Block>> {
    let mut blocks = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let b = block_from_json_line(&line)?;
        if b.height as usize != blocks.len() {
            return Err(Error::parse(format!(
                "line {}: height {} out of sequence",
                i + 1,
                b.height
            )));
        }
        blocks.push(b);
    }
    Ok(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::synth::{generate_synthetic_chain, SynthConfig};

    #[test]
    fn roundtrip_and_shape() {
        let c = generate_synthetic_chain(&SynthConfig {
            n_blocks: 30,
            seed: 5,
            ..Default::default()
        })
        .unwrap();
        let mut buf = Vec::new();
        write_chain(&c.blocks, &mut buf).unwrap();
        let back = read_chain(&buf[..]).unwrap();
        assert_eq!(back, c.blocks);

        let first = std::str::from_utf8(&buf).unwrap().lines().next().unwrap();
        let v: serde_json::Value = serde_json::from_str(first).unwrap();
        assert_eq!(v["height"], 0);
        assert_eq!(v["header"]["bits"], "207fffff");
        assert_eq!(v["header"]["prev_hash"], "00".repeat(32));
        let out = &v["txs"][0]["outputs"][0];
        assert!(out["address"].as_str().unwrap().starts_with('1'));
        assert!(out["value"].is_u64());
        assert_eq!(v["txs"][0]["inputs"][0]["vout"], 0);
    }

    #[test]
    fn rejects_out_of_order() {
        let c = generate_synthetic_chain(&SynthConfig {
            n_blocks: 3,
            ..Default::default()
        })
        .unwrap();
        let mut buf = Vec::new();
        write_chain(&[c.blocks[1].clone()], &mut buf).unwrap();
        assert!(read_chain(&buf[..]).is_err());
    }
}
