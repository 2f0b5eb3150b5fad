use super::hash::Hash256;
use super::header::BlockHeader;
use super::merkle::merkle_root;
use super::tx::Transaction;

/// Default confirmation depth for clients.
pub const DEFAULT_MIN_CONFIRMATIONS: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpvCheck {
    Verified,
    Failed(String),
}

impl SpvCheck {
    pub fn is_verified(&self) -> bool {
        matches!(self, SpvCheck::Verified)
    }
}

/// Inclusion of `tx` in the block at `height`, plus confirmation depth.
/// `headers` is assumed already validated.
pub fn spv_verify(
    tx: &Transaction,
    block_txids: &[Hash256],
    headers: &[BlockHeader],
    height: usize,
    min_confirmations: usize,
) -> SpvCheck {
    let Some(header) = headers.get(height) else {
        return SpvCheck::Failed(format!("no header at height {height}"));
    };
    let id = tx.txid();
    if !block_txids.contains(&id) {
        return SpvCheck::Failed(format!("txid {id} not in the block's txid list"));
    }
    match merkle_root(block_txids) {
        Ok(root) if root == header.merkle_root => {}
        Ok(_) => return SpvCheck::Failed("merkle root does not match header".into()),
        Err(e) => return SpvCheck::Failed(e.to_string()),
    }
    let confirmations = headers.len() - 1 - height;
    if confirmations < min_confirmations {
        return SpvCheck::Failed(format!(
            "{confirmations} confirmations, need {min_confirmations}"
        ));
    }
    SpvCheck::Verified
}
