use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::hash::sha256d;
use crate::error::{Error, Result};

pub const P2PKH_VERSION: u8 = 0x00;
/// version + hash160 + checksum
pub const ADDRESS_PAYLOAD_LEN: usize = 25;

/// A P2PKH address.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Address {
    pub hash160: [u8; 20],
}

impl Address {
    pub fn new(hash160: [u8; 20]) -> Self {
        Address { hash160 }
    }

    /// The 25 bytes that base58 encodes: version byte, hash160, 4-byte checksum.
    pub fn payload(&self) -> [u8; ADDRESS_PAYLOAD_LEN] {
        let mut out = [0u8; ADDRESS_PAYLOAD_LEN];
        out[0] = P2PKH_VERSION;
        out[1..21].copy_from_slice(&self.hash160);
        let check = sha256d(&out[..21]);
        out[21..].copy_from_slice(&check.0[..4]);
        out
    }

    pub fn from_payload(payload: &[u8]) -> Result<Self> {
        if payload.len() != ADDRESS_PAYLOAD_LEN {
            return Err(Error::parse(format!(
                "address payload must be {ADDRESS_PAYLOAD_LEN} bytes, got {}",
                payload.len()
            )));
        }
        if payload[0] != P2PKH_VERSION {
            return Err(Error::parse(format!(
                "unsupported address version {:#04x}",
                payload[0]
            )));
        }
        let check = sha256d(&payload[..21]);
        if check.0[..4] != payload[21..] {
            return Err(Error::parse("address checksum mismatch"));
        }
        Ok(Address {
            hash160: payload[1..21].try_into().unwrap(),
        })
    }

    pub fn to_base58(&self) -> String {
        bs58::encode(self.payload()).into_string()
    }

    pub fn from_base58(s: &str) -> Result<Self> {
        let bytes = bs58::decode(s)
            .into_vec()
            .map_err(|e| Error::parse(format!("bad base58: {e}")))?;
        Self::from_payload(&bytes)
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Address({})", self.to_base58())
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_base58())
    }
}

impl FromStr for Address {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Address::from_base58(s)
    }
}

impl Serialize for Address {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_base58())
    }
}

impl<'de> Deserialize<'de> for Address {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Address::from_base58(&s).map_err(serde::de::Error::custom)
    }
}
