//! Bitcoin-shaped chain objects: P2PKH addresses, transactions, 80-byte
//! headers, Merkle trees, SPV checks and a seeded synthetic chain generator.

pub mod address;
pub mod block;
pub mod hash;
pub mod header;
pub mod json;
pub mod merkle;
pub mod spv;
pub mod synth;
pub mod tx;

pub use address::Address;
pub use block::Block;
pub use hash::{sha256d, Hash256};
pub use header::{header_hash, pow_check, validate_header_chain, BlockHeader, ChainValidity, HEADER_LEN};
pub use merkle::merkle_root;
pub use spv::{spv_verify, SpvCheck};
pub use synth::{generate_synthetic_chain, SynthConfig, SyntheticChain, UtxoRef};
pub use tx::{txid, OutPoint, Transaction, TxIn, TxOut};
