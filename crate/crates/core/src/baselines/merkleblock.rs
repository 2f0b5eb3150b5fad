//! Partial Merkle trees as carried in BIP-37 merkleblock messages.

use crate::chain::hash::{compact_size_len, sha256d_pair};
use crate::chain::{BlockHeader, Hash256, HEADER_LEN};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MerkleBlock {
    pub header: BlockHeader,
    pub total_txs: u32,
    pub hashes: Vec<Hash256>,
    pub flags: Vec<bool>,
}

fn tree_width(n: usize, height: u32) -> usize {
    (n + (1 << height) - 1) >> height
}

fn tree_height(n: usize) -> u32 {
    let mut h = 0;
    while tree_width(n, h) > 1 {
        h += 1;
    }
    h
}

fn subtree_hash(height: u32, pos: usize, txids: &[Hash256]) -> Hash256 {
    if height == 0 {
        return txids[pos];
    }
    let left = subtree_hash(height - 1, pos * 2, txids);
    let right = if pos * 2 + 1 < tree_width(txids.len(), height - 1) {
        subtree_hash(height - 1, pos * 2 + 1, txids)
    } else {
        left
    };
    sha256d_pair(&left, &right)
}

impl MerkleBlock {
    /// Depth-first build: descend only into subtrees holding a match, emit
    /// the hash of every subtree where descent stops.
    pub fn build(header: BlockHeader, txids: &[Hash256], matches: &[bool]) -> Result<Self> {
        if txids.is_empty() || txids.len() != matches.len() {
            return Err(Error::domain("need one match flag per txid and at least one txid"));
        }
        let mut mb = MerkleBlock {
            header,
            total_txs: txids.len() as u32,
            hashes: Vec::new(),
            flags: Vec::new(),
        };
        mb.traverse_build(tree_height(txids.len()), 0, txids, matches);
        Ok(mb)
    }

    fn traverse_build(&mut self, height: u32, pos: usize, txids: &[Hash256], matches: &[bool]) {
        let n = txids.len();
        let lo = pos << height;
        let hi = ((pos + 1) << height).min(n);
        let parent_of_match = matches[lo..hi].iter().any(|&m| m);
        self.flags.push(parent_of_match);
        if height == 0 || !parent_of_match {
            self.hashes.push(subtree_hash(height, pos, txids));
        } else {
            self.traverse_build(height - 1, pos * 2, txids, matches);
            if pos * 2 + 1 < tree_width(n, height - 1) {
                self.traverse_build(height - 1, pos * 2 + 1, txids, matches);
            }
        }
    }

    /// Recompute the root and collect the matched txids. The root must equal
    /// the header's Merkle root and every hash and flag must be consumed.
    pub fn verify(&self) -> Result<Vec<Hash256>> {
        let n = self.total_txs as usize;
        if n == 0 || self.hashes.len() > n {
            return Err(Error::parse("implausible transaction count"));
        }
        let mut cursor = (0usize, 0usize);
        let mut matched = Vec::new();
        let root = self.traverse_extract(tree_height(n), 0, &mut cursor, &mut matched)?;
        if cursor.1 != self.hashes.len() || cursor.0.div_ceil(8) != self.flags.len().div_ceil(8) {
            return Err(Error::parse("unused hashes or flag bytes in partial tree"));
        }
        if root != self.header.merkle_root {
            return Err(Error::Integrity("partial tree root differs from header".into()));
        }
        Ok(matched)
    }

    fn traverse_extract(
        &self,
        height: u32,
        pos: usize,
        cursor: &mut (usize, usize),
        matched: &mut Vec<Hash256>,
    ) -> Result<Hash256> {
        let flag = *self
            .flags
            .get(cursor.0)
            .ok_or_else(|| Error::parse("partial tree ran out of flags"))?;
        cursor.0 += 1;
        if height == 0 || !flag {
            let h = *self
                .hashes
                .get(cursor.1)
                .ok_or_else(|| Error::parse("partial tree ran out of hashes"))?;
            cursor.1 += 1;
            if height == 0 && flag {
                matched.push(h);
            }
            return Ok(h);
        }
        let left = self.traverse_extract(height - 1, pos * 2, cursor, matched)?;
        let right = if pos * 2 + 1 < tree_width(self.total_txs as usize, height - 1) {
            let r = self.traverse_extract(height - 1, pos * 2 + 1, cursor, matched)?;
            if r == left {
                return Err(Error::parse("duplicate sibling hashes in partial tree"));
            }
            r
        } else {
            left
        };
        Ok(sha256d_pair(&left, &right))
    }

    /// header | u32 total | CompactSize n | hashes | CompactSize bytes | flag bytes
    pub fn serialized_len(&self) -> usize {
        let flag_bytes = self.flags.len().div_ceil(8);
        HEADER_LEN
            + 4
            + compact_size_len(self.hashes.len() as u64)
            + 32 * self.hashes.len()
            + compact_size_len(flag_bytes as u64)
            + flag_bytes
    }

    /// Flag bits packed least significant bit first.
    pub fn flag_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.flags.len().div_ceil(8)];
        for (i, &f) in self.flags.iter().enumerate() {
            out[i / 8] |= (f as u8) << (i % 8);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::merkle_root;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn header_for(txids: &[Hash256]) -> BlockHeader {
        BlockHeader {
            version: 1,
            prev_hash: Hash256::ZERO,
            merkle_root: merkle_root(txids).unwrap(),
            time: 0,
            bits: 0,
            nonce: 0,
        }
    }

    #[test]
    fn random_trees_verify_against_full_root() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let n = rng.gen_range(1..40);
            let txids: Vec<Hash256> = (0..n).map(|_| Hash256(rng.gen())).collect();
            let p = rng.gen::<f64>();
            let matches: Vec<bool> = (0..n).map(|_| rng.gen_bool(p)).collect();
            let mb = MerkleBlock::build(header_for(&txids), &txids, &matches).unwrap();
            let got = mb.verify().unwrap();
            let want: Vec<Hash256> = txids.iter().zip(&matches).filter(|(_, &m)| m).map(|(t, _)| *t).collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn degenerate_matches() {
        let txids: Vec<Hash256> = (0..5u8).map(|i| Hash256([i; 32])).collect();
        let none = MerkleBlock::build(header_for(&txids), &txids, &[false; 5]).unwrap();
        assert_eq!(none.hashes, vec![header_for(&txids).merkle_root]);
        assert_eq!(none.flags, vec![false]);
        assert_eq!(none.serialized_len(), 80 + 4 + 1 + 32 + 1 + 1);
        let all = MerkleBlock::build(header_for(&txids), &txids, &[true; 5]).unwrap();
        assert_eq!(all.hashes, txids);
        assert_eq!(all.verify().unwrap(), txids);
    }

    #[test]
    fn tampering_is_detected() {
        let txids: Vec<Hash256> = (0..6u8).map(|i| Hash256([i; 32])).collect();
        let mut m = [false; 6];
        m[4] = true;
        let mut mb = MerkleBlock::build(header_for(&txids), &txids, &m).unwrap();
        mb.hashes[0].0[0] ^= 1;
        assert!(mb.verify().is_err());
    }

    #[test]
    fn flag_packing() {
        let mb = MerkleBlock {
            header: header_for(&[Hash256::ZERO]),
            total_txs: 1,
            hashes: vec![],
            flags: vec![true, false, true, true, false, false, false, false, true],
        };
        assert_eq!(mb.flag_bytes(), vec![0b0000_1101, 0b1]);
    }
}
