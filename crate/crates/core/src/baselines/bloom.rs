//! BIP-37 Bloom filters.

use std::f64::consts::LN_2;
use std::io::Cursor;

pub const MAX_FILTER_BYTES: usize = 36_000;
pub const MAX_HASH_FUNCS: u32 = 50;
const SEED_STEP: u32 = 0xFBA4_C795;

pub fn murmur3_32(data: &[u8], seed: u32) -> u32 {
    murmur3::murmur3_32(&mut Cursor::new(data), seed).expect("reading from memory cannot fail")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BloomFilter {
    bits: Vec<u8>,
    n_hash_funcs: u32,
    tweak: u32,
}

impl BloomFilter {
    /// Sized for `n_elements` at false-positive rate `fp_rate`, both clamped
    /// to the protocol maxima.
    pub fn new(n_elements: usize, fp_rate: f64, tweak: u32) -> Self {
        let n = n_elements.max(1) as f64;
        let p = fp_rate.clamp(f64::MIN_POSITIVE, 1.0);
        let bytes = ((-1.0 / (LN_2 * LN_2) * n * p.ln()) / 8.0) as usize;
        let bytes = bytes.clamp(1, MAX_FILTER_BYTES);
        let funcs = ((bytes * 8) as f64 / n * LN_2) as u32;
        BloomFilter {
            bits: vec![0; bytes],
            n_hash_funcs: funcs.clamp(1, MAX_HASH_FUNCS),
            tweak,
        }
    }

    pub fn n_hash_funcs(&self) -> u32 {
        self.n_hash_funcs
    }

    pub fn size_bytes(&self) -> usize {
        self.bits.len()
    }

    fn bit_index(&self, i: u32, data: &[u8]) -> usize {
        let seed = i.wrapping_mul(SEED_STEP).wrapping_add(self.tweak);
        murmur3_32(data, seed) as usize % (self.bits.len() * 8)
    }

    pub fn insert(&mut self, data: &[u8]) {
        for i in 0..self.n_hash_funcs {
            let idx = self.bit_index(i, data);
            self.bits[idx >> 3] |= 1 << (idx & 7);
        }
    }

    pub fn contains(&self, data: &[u8]) -> bool {
        (0..self.n_hash_funcs).all(|i| {
            let idx = self.bit_index(i, data);
            self.bits[idx >> 3] & (1 << (idx & 7)) != 0
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn murmur_reference_vectors() {
        // Published MurmurHash3 x86_32 vectors as used by Bitcoin nodes.
        assert_eq!(murmur3_32(b"", 0), 0x0000_0000);
        assert_eq!(murmur3_32(b"", 0xFBA4_C795), 0x6a39_6f08);
        assert_eq!(murmur3_32(b"", 0xffff_ffff), 0x81f1_6f39);
        assert_eq!(murmur3_32(&[0x00], 0), 0x514e_28b7);
        assert_eq!(murmur3_32(&[0x00], 0xFBA4_C795), 0xea3f_0b17);
        assert_eq!(murmur3_32(&[0xff], 0), 0xfd6c_f10d);
        assert_eq!(murmur3_32(&[0x00, 0x11], 0), 0x16c6_b7ab);
        assert_eq!(murmur3_32(&[0x00, 0x11, 0x22], 0), 0x8eb5_1c3d);
        assert_eq!(murmur3_32(&[0x00, 0x11, 0x22, 0x33, 0x44, 0x55, 0x66, 0x77], 0), 0x8034_d2a0);
    }

    #[test]
    fn sizing_follows_formulas() {
        let f = BloomFilter::new(3, 0.01, 0);
        assert_eq!(f.size_bytes(), 3);
        assert_eq!(f.n_hash_funcs(), 5);
        let huge = BloomFilter::new(10_000_000, 0.0001, 0);
        assert_eq!(huge.size_bytes(), MAX_FILTER_BYTES);
        let tiny = BloomFilter::new(1, 1e-30, 0);
        assert_eq!(tiny.n_hash_funcs(), MAX_HASH_FUNCS);
    }

    #[test]
    fn empty_and_membership() {
        let mut f = BloomFilter::new(10, 0.001, 7);
        assert!(!f.contains(b"anything"));
        f.insert(b"x");
        assert!(f.contains(b"x"));
    }

    #[test]
    fn false_positive_rate_is_near_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut f = BloomFilter::new(1000, 0.01, rng.gen());
        for _ in 0..1000 {
            f.insert(&rng.gen::<[u8; 32]>());
        }
        let fp = (0..100_000).filter(|_| f.contains(&rng.gen::<[u8; 32]>())).count() as f64 / 1e5;
        assert!((0.003..=0.03).contains(&fp), "fp rate {fp}");
    }
}
