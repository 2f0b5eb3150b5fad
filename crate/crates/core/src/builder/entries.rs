use std::collections::HashMap;

use crate::chain::address::{Address, ADDRESS_PAYLOAD_LEN};
use crate::chain::{Block, Hash256, OutPoint, TxOut};
use crate::error::{Error, Result};

pub const ADDRESS_ENTRY_LEN: usize = ADDRESS_PAYLOAD_LEN + 32 + 4 + 1;

/// One unspent P2PKH output as stored in the Address database:
/// address payload (25) | txid (32) | height (4, big-endian) | vout (1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AddressEntry {
    pub address: Address,
    pub txid: Hash256,
    pub height: u32,
    pub vout: u8,
}

impl AddressEntry {
    pub fn to_bytes(&self) -> [u8; ADDRESS_ENTRY_LEN] {
        let mut out = [0u8; ADDRESS_ENTRY_LEN];
        out[..25].copy_from_slice(&self.address.payload());
        out[25..57].copy_from_slice(&self.txid.0);
        out[57..61].copy_from_slice(&self.height.to_be_bytes());
        out[61] = self.vout;
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != ADDRESS_ENTRY_LEN {
            return Err(Error::parse(format!(
                "address entry must be {ADDRESS_ENTRY_LEN} bytes"
            )));
        }
        Ok(AddressEntry {
            address: Address::from_payload(&bytes[..25])?,
            txid: Hash256(bytes[25..57].try_into().unwrap()),
            height: u32::from_be_bytes(bytes[57..61].try_into().unwrap()),
            vout: bytes[61],
        })
    }

    /// Database order: address payload, then height, txid and vout.
    pub fn sort_key(&self) -> ([u8; ADDRESS_PAYLOAD_LEN], u32, Hash256, u8) {
        (self.address.payload(), self.height, self.txid, self.vout)
    }
}

/// Unspent outputs at the chain tip with the height that created them.
pub type UtxoSnapshot = HashMap<OutPoint, (TxOut, u32)>;

pub fn utxo_snapshot(blocks: &[Block]) -> UtxoSnapshot {
    let mut set = UtxoSnapshot::new();
    for b in blocks {
        for tx in &b.txs {
            if !tx.is_coinbase() {
                for i in &tx.inputs {
                    set.remove(&i.outpoint());
                }
            }
            let id = tx.txid();
            for (vout, o) in tx.outputs.iter().enumerate() {
                set.insert(
                    OutPoint {
                        txid: id,
                        vout: vout as u32,
                    },
                    (*o, b.height),
                );
            }
        }
    }
    set
}

/// Address entries for the outputs created in `blocks` that are still unspent.
pub fn extract_address_entries(blocks: &[Block], utxo: &UtxoSnapshot) -> Result<Vec<AddressEntry>> {
    let mut entries = Vec::new();
    for b in blocks {
        for tx in &b.txs {
            let id = tx.txid();
            for (vout, o) in tx.outputs.iter().enumerate() {
                let op = OutPoint {
                    txid: id,
                    vout: vout as u32,
                };
                if !utxo.contains_key(&op) {
                    continue;
                }
                let vout = u8::try_from(vout).map_err(|_| {
                    Error::Build(format!("vout {vout} of {id} does not fit the 1-byte field"))
                })?;
                entries.push(AddressEntry {
                    address: o.address,
                    txid: id,
                    height: b.height,
                    vout,
                });
            }
        }
    }
    entries.sort_by_key(AddressEntry::sort_key);
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{Transaction, TxIn};

    #[test]
    fn layout() {
        let e = AddressEntry {
            address: Address::new([9; 20]),
            txid: Hash256([7; 32]),
            height: 0x01020304,
            vout: 5,
        };
        let b = e.to_bytes();
        assert_eq!(b.len(), 62);
        assert_eq!(&b[..25], &e.address.payload());
        assert_eq!(&b[57..61], &[1, 2, 3, 4]);
        assert_eq!(b[61], 5);
        assert_eq!(AddressEntry::from_bytes(&b).unwrap(), e);
    }

    fn out(addr: u8, value: u64) -> TxOut {
        TxOut {
            value,
            address: Address::new([addr; 20]),
        }
    }

    #[test]
    fn spent_outputs_vanish_and_multiplicity_kept() {
        let cb0 = Transaction::coinbase(0, vec![out(1, 10)]);
        let spend = Transaction {
            inputs: vec![TxIn {
                prev_txid: cb0.txid(),
                vout: 0,
            }],
            outputs: vec![out(2, 3), out(2, 3), out(2, 4)],
        };
        let cb1 = Transaction::coinbase(1, vec![out(3, 10)]);
        let hdr = crate::chain::BlockHeader {
            version: 1,
            prev_hash: Hash256::ZERO,
            merkle_root: Hash256::ZERO,
            time: 0,
            bits: 0,
            nonce: 0,
        };
        let blocks = vec![
            Block { height: 0, header: hdr, txs: vec![cb0.clone()] },
            Block { height: 1, header: hdr, txs: vec![cb1, spend.clone()] },
        ];
        let utxo = utxo_snapshot(&blocks);
        let entries = extract_address_entries(&blocks, &utxo).unwrap();
        assert_eq!(entries.len(), 4);
        assert!(entries.iter().all(|e| e.txid != cb0.txid()));
        let twos: Vec<_> = entries.iter().filter(|e| e.address == Address::new([2; 20])).collect();
        assert_eq!(twos.len(), 3);
        let pos: Vec<_> = entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.address == Address::new([2; 20]))
            .map(|(i, _)| i)
            .collect();
        assert_eq!(pos[2] - pos[0], 2, "entries of one address are adjacent");
        assert!(entries.windows(2).all(|w| w[0].sort_key() <= w[1].sort_key()));
    }
}
