//! Single-server computational PIR with recursion depth 1.
//!
//! The query encrypts the selection vector under secret-key LWE (Regev) with
//! modulus 2^32 and plaintext modulus 2^8. The uniform `a` vectors are expanded
//! from a 32-byte seed so only the `b` components travel. The server folds the
//! database into one ciphertext per row byte; because the scheme is additively
//! homomorphic, each ciphertext decrypts to the selected row's byte.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::database::{DbShape, PirDatabase};
use crate::error::{Error, Result};

pub const DEFAULT_LWE_DIM: usize = 1024;
pub const SEED_LEN: usize = 32;
const DELTA_SHIFT: u32 = 24;
/// Centered binomial parameter for the encryption noise (sigma = 2).
const NOISE_ETA: u32 = 8;
const NOISE_SIGMA: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CpirQuery {
    pub lwe_dim: usize,
    pub seed: [u8; SEED_LEN],
    /// `b_j = <a_j, s> + e_j + 2^24 * [j == row]`, one word per database row.
    pub body: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CpirResponse {
    pub row_width: usize,
    pub lwe_dim: usize,
    /// `row_width` ciphertexts of `lwe_dim + 1` words each.
    pub words: Vec<u32>,
}

/// Client secret needed to decrypt the matching response.
#[derive(Clone)]
pub struct CpirClientState {
    secret: Vec<u32>,
    shape: DbShape,
}

impl std::fmt::Debug for CpirClientState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CpirClientState")
            .field("lwe_dim", &self.secret.len())
            .field("shape", &self.shape)
            .finish_non_exhaustive()
    }
}

fn check_noise_budget(num_rows: usize) -> Result<()> {
    // The decryption error is a sum of num_rows terms db * e, with |db| <= 255.
    let sigma = NOISE_SIGMA * 255.0 * (num_rows as f64).sqrt();
    let half_delta = (1u64 << (DELTA_SHIFT - 1)) as f64;
    if 8.0 * sigma >= half_delta {
        return Err(Error::domain(format!(
            "{num_rows} rows exceed the C-PIR noise budget"
        )));
    }
    Ok(())
}

struct MatrixStream(ChaCha20Rng);

impl MatrixStream {
    fn new(seed: &[u8; SEED_LEN]) -> Self {
        MatrixStream(ChaCha20Rng::from_seed(*seed))
    }

    fn next_row(&mut self, out: &mut [u32]) {
        for w in out.iter_mut() {
            *w = self.0.next_u32();
        }
    }
}

fn sample_noise<R: Rng + ?Sized>(rng: &mut R) -> u32 {
    let bits = rng.next_u32();
    let pos = (bits & 0xff).count_ones();
    let neg = ((bits >> 8) & 0xff).count_ones();
    debug_assert!(pos <= NOISE_ETA && neg <= NOISE_ETA);
    pos.wrapping_sub(neg)
}

fn dot(a: &[u32], s: &[u32]) -> u32 {
    a.iter()
        .zip(s)
        .fold(0u32, |acc, (&x, &y)| acc.wrapping_add(x.wrapping_mul(y)))
}

pub fn cpir_gen_query<R: Rng + ?Sized>(
    row_index: usize,
    shape: DbShape,
    lwe_dim: usize,
    rng: &mut R,
) -> Result<(CpirQuery, CpirClientState)> {
    if row_index >= shape.num_rows {
        return Err(Error::domain(format!(
            "row {row_index} out of range for {} rows",
            shape.num_rows
        )));
    }
    if lwe_dim == 0 {
        return Err(Error::domain("LWE dimension must be positive"));
    }
    check_noise_budget(shape.num_rows)?;
    let mut seed = [0u8; SEED_LEN];
    rng.fill_bytes(&mut seed);
    let secret: Vec<u32> = (0..lwe_dim).map(|_| rng.next_u32()).collect();
    let mut stream = MatrixStream::new(&seed);
    let mut a = vec![0u32; lwe_dim];
    let body = (0..shape.num_rows)
        .map(|j| {
            stream.next_row(&mut a);
            let msg = if j == row_index { 1u32 << DELTA_SHIFT } else { 0 };
            dot(&a, &secret)
                .wrapping_add(sample_noise(rng))
                .wrapping_add(msg)
        })
        .collect();
    Ok((
        CpirQuery {
            lwe_dim,
            seed,
            body,
        },
        CpirClientState { secret, shape },
    ))
}

pub fn cpir_compute(query: &CpirQuery, db: &PirDatabase) -> Result<CpirResponse> {
    if query.body.len() != db.num_rows() {
        return Err(Error::protocol(format!(
            "C-PIR query has {} rows, database has {}",
            query.body.len(),
            db.num_rows()
        )));
    }
    let n = query.lwe_dim;
    if n == 0 {
        return Err(Error::protocol("C-PIR query with zero LWE dimension"));
    }
    let stride = n + 1;
    let width = db.row_width();
    let mut words = vec![0u32; width * stride];
    let mut stream = MatrixStream::new(&query.seed);
    let mut a = vec![0u32; n];
    for (row, &b) in db.rows().zip(&query.body) {
        stream.next_row(&mut a);
        for (c, &byte) in row.iter().enumerate() {
            if byte == 0 {
                continue;
            }
            let d = byte as u32;
            let ct = &mut words[c * stride..(c + 1) * stride];
            for (acc, &x) in ct[..n].iter_mut().zip(&a) {
                *acc = acc.wrapping_add(d.wrapping_mul(x));
            }
            ct[n] = ct[n].wrapping_add(d.wrapping_mul(b));
        }
    }
    Ok(CpirResponse {
        row_width: width,
        lwe_dim: n,
        words,
    })
}

pub fn cpir_decode(response: &CpirResponse, state: &CpirClientState) -> Result<Vec<u8>> {
    let n = state.secret.len();
    if response.lwe_dim != n || response.row_width != state.shape.row_width {
        return Err(Error::protocol("C-PIR response does not match the query parameters"));
    }
    let stride = n + 1;
    if response.words.len() != response.row_width * stride {
        return Err(Error::protocol("C-PIR response has the wrong length"));
    }
    let half = 1u32 << (DELTA_SHIFT - 1);
    Ok(response
        .words
        .chunks_exact(stride)
        .map(|ct| {
            let m = ct[n].wrapping_sub(dot(&ct[..n], &state.secret));
            (m.wrapping_add(half) >> DELTA_SHIFT) as u8
        })
        .collect())
}

impl CpirQuery {
    pub fn encoded_len(num_rows: usize) -> usize {
        4 + SEED_LEN + 4 * num_rows
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(Self::encoded_len(self.body.len()));
        out.extend_from_slice(&(self.lwe_dim as u32).to_le_bytes());
        out.extend_from_slice(&self.seed);
        for w in &self.body {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 + SEED_LEN || !(bytes.len() - 4 - SEED_LEN).is_multiple_of(4) {
            return Err(Error::protocol("malformed C-PIR query"));
        }
        let lwe_dim = u32::from_le_bytes(bytes[..4].try_into().unwrap()) as usize;
        let seed = bytes[4..4 + SEED_LEN].try_into().unwrap();
        let body = words_from_le(&bytes[4 + SEED_LEN..]);
        Ok(CpirQuery {
            lwe_dim,
            seed,
            body,
        })
    }
}

impl CpirResponse {
    pub fn encoded_len(row_width: usize, lwe_dim: usize) -> usize {
        8 + 4 * row_width * (lwe_dim + 1)
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(Self::encoded_len(self.row_width, self.lwe_dim));
        out.extend_from_slice(&(self.row_width as u32).to_le_bytes());
        out.extend_from_slice(&(self.lwe_dim as u32).to_le_bytes());
        for w in &self.words {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 {
            return Err(Error::protocol("malformed C-PIR response"));
        }
        let row_width = u32::from_le_bytes(bytes[..4].try_into().unwrap()) as usize;
        let lwe_dim = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        if bytes.len() != Self::encoded_len(row_width, lwe_dim) {
            return Err(Error::protocol("C-PIR response length mismatch"));
        }
        Ok(CpirResponse {
            row_width,
            lwe_dim,
            words: words_from_le(&bytes[8..]),
        })
    }
}

fn words_from_le(bytes: &[u8]) -> Vec<u32> {
    bytes
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect()
}
