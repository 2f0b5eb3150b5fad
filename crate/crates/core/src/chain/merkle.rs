use super::hash::{sha256d_pair, Hash256};
use crate::error::{Error, Result};

/// Bitcoin Merkle root: hash adjacent pairs, duplicating the last node of odd levels.
pub fn merkle_root(txids: &[Hash256]) -> Result<Hash256> {
    if txids.is_empty() {
        return Err(Error::domain("merkle root of an empty transaction list"));
    }
    let mut level = txids.to_vec();
    while level.len() > 1 {
        level = next_level(&level);
    }
    Ok(level[0])
}

pub(crate) fn next_level(level: &[Hash256]) -> Vec<Hash256> {
    level
        .chunks(2)
        .map(|pair| sha256d_pair(&pair[0], pair.get(1).unwrap_or(&pair[0])))
        .collect()
}
