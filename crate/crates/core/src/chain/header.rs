use num_bigint::BigUint;

use super::hash::{sha256d, Hash256};
use crate::error::{Error, Result};

pub const HEADER_LEN: usize = 80;

/// Near-maximal target used by the synthetic miner (about one hash in two passes).
pub const EASY_BITS: u32 = 0x207f_ffff;
/// Compact encoding of 2^256: every hash satisfies it.
pub const MAX_TARGET_BITS: u32 = 0x2101_0000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BlockHeader {
    pub version: i32,
    pub prev_hash: Hash256,
    pub merkle_root: Hash256,
    pub time: u32,
    pub bits: u32,
    pub nonce: u32,
}

impl BlockHeader {
    pub fn serialize(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[0..4].copy_from_slice(&self.version.to_le_bytes());
        out[4..36].copy_from_slice(&self.prev_hash.0);
        out[36..68].copy_from_slice(&self.merkle_root.0);
        out[68..72].copy_from_slice(&self.time.to_le_bytes());
        out[72..76].copy_from_slice(&self.bits.to_le_bytes());
        out[76..80].copy_from_slice(&self.nonce.to_le_bytes());
        out
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != HEADER_LEN {
            return Err(Error::parse(format!("header must be 80 bytes, got {}", bytes.len())));
        }
        let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
        Ok(BlockHeader {
            version: i32::from_le_bytes(bytes[0..4].try_into().unwrap()),
            prev_hash: Hash256(bytes[4..36].try_into().unwrap()),
            merkle_root: Hash256(bytes[36..68].try_into().unwrap()),
            time: u32_at(68),
            bits: u32_at(72),
            nonce: u32_at(76),
        })
    }

    pub fn hash(&self) -> Hash256 {
        sha256d(&self.serialize())
    }
}

pub fn header_hash(header: &BlockHeader) -> Hash256 {
    header.hash()
}

/// Expand compact `bits` into the full target. Targets above 2^256 and
/// negative encodings are rejected.
pub fn compact_to_target(bits: u32) -> Result<BigUint> {
    let exponent = bits >> 24;
    let mantissa = bits & 0x007f_ffff;
    if bits & 0x0080_0000 != 0 && mantissa != 0 {
        return Err(Error::domain(format!("negative compact target {bits:#010x}")));
    }
    let target = if exponent <= 3 {
        BigUint::from(mantissa >> (8 * (3 - exponent)))
    } else {
        BigUint::from(mantissa) << (8 * (exponent - 3))
    };
    if target > BigUint::from(1u8) << 256 {
        return Err(Error::domain(format!("compact target {bits:#010x} overflows 256 bits")));
    }
    Ok(target)
}

/// Hash (read as a little-endian 256-bit integer) is at most the header's target.
pub fn pow_check(header: &BlockHeader) -> Result<bool> {
    let target = compact_to_target(header.bits)?;
    Ok(BigUint::from_bytes_le(&header.hash().0) <= target)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainValidity {
    Valid,
    Broken { height: usize, reason: String },
}

impl ChainValidity {
    pub fn is_valid(&self) -> bool {
        matches!(self, ChainValidity::Valid)
    }
}

/// Checks linkage and proof of work for a header list starting at genesis.
pub fn validate_header_chain(headers: &[BlockHeader]) -> ChainValidity {
    if headers.is_empty() {
        return ChainValidity::Broken {
            height: 0,
            reason: "empty header list".into(),
        };
    }
    if headers[0].prev_hash != Hash256::ZERO {
        return ChainValidity::Broken {
            height: 0,
            reason: "first header is not a genesis header".into(),
        };
    }
    let mut prev: Option<Hash256> = None;
    for (height, h) in headers.iter().enumerate() {
        if let Some(p) = prev {
            if h.prev_hash != p {
                return ChainValidity::Broken {
                    height,
                    reason: "prev_hash does not match the previous header".into(),
                };
            }
        }
        match pow_check(h) {
            Ok(true) => {}
            Ok(false) => {
                return ChainValidity::Broken {
                    height,
                    reason: "proof of work above target".into(),
                }
            }
            Err(e) => {
                return ChainValidity::Broken {
                    height,
                    reason: e.to_string(),
                }
            }
        }
        prev = Some(h.hash());
    }
    ChainValidity::Valid
}

#[cfg(test)]
mod tests {
    use super::*;
    use sha2::{Digest, Sha256};

    fn genesis() -> BlockHeader {
        let mut root = hex::decode("4a5e1e4baab89f3a32518a88c31bc87f618f76673e2cc77ab2127b7afdeda33b").unwrap();
        root.reverse();
        BlockHeader {
            version: 1,
            prev_hash: Hash256::ZERO,
            merkle_root: Hash256(root.try_into().unwrap()),
            time: 1231006505,
            bits: 0x1d00ffff,
            nonce: 2083236893,
        }
    }

    #[test]
    fn mainnet_genesis() {
        let g = genesis();
        let bytes = g.serialize();
        assert_eq!(bytes.len(), 80);
        // independent double SHA-256 of the same bytes
        let mut oracle: [u8; 32] = Sha256::digest(Sha256::digest(bytes)).into();
        oracle.reverse();
        assert_eq!(hex::encode(oracle), g.hash().to_display_hex());
        assert!(g.hash().to_display_hex().starts_with("000000000019d668"));
        assert_eq!(
            g.hash().to_display_hex(),
            "000000000019d6689c085ae165831e934ff763ae46a2a6c172b3f1b60a8ce26f"
        );
        assert!(pow_check(&g).unwrap());
        assert_eq!(BlockHeader::parse(&bytes).unwrap(), g);
        assert!(validate_header_chain(&[g]).is_valid());
    }

    #[test]
    fn compact_targets() {
        assert_eq!(
            compact_to_target(0x1d00ffff).unwrap(),
            BigUint::from(0xffffu32) << (8 * 26)
        );
        assert_eq!(compact_to_target(MAX_TARGET_BITS).unwrap(), BigUint::from(1u8) << 256);
        assert!(compact_to_target(0x2201_0000).is_err());
        assert!(compact_to_target(0x1d80ffff).is_err());
        assert_eq!(compact_to_target(0x0200_8000).unwrap(), BigUint::from(0x80u32));
    }

    #[test]
    fn max_target_accepts_anything() {
        let mut h = genesis();
        h.bits = MAX_TARGET_BITS;
        for nonce in 0..200 {
            h.nonce = nonce;
            assert!(pow_check(&h).unwrap());
        }
        h.bits = 0x0100_0000; // target 0
        assert!(!pow_check(&h).unwrap());
    }
}
