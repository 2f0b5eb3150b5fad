//! Private SPV: Bitcoin light-client verification where the address,
//! Merkle-tree and transaction lookups go through private information
//! retrieval instead of Bloom filters.

pub mod baselines;
pub mod bench;
pub mod builder;
pub mod chain;
pub mod error;
pub mod gf256;
pub mod manifest;
pub mod net;
pub mod pir;

pub use error::{Error, Result};
