//! PIR engines behind one row-fetching contract: multi-server IT-PIR,
//! single-server C-PIR and the trivial full download.

pub mod cpir;
pub mod database;
pub mod itpir;
pub mod params;

use std::fmt;
use std::str::FromStr;

use rand::Rng;

pub use cpir::{cpir_compute, cpir_decode, cpir_gen_query, CpirClientState, CpirQuery, CpirResponse};
pub use database::{DbKind, DbShape, PirDatabase, Period};
pub use itpir::{itpir_compute, itpir_compute_raw, itpir_decode, itpir_gen_queries, row_fetch_cost, ItPirQuery, ItPirResponse};
pub use params::PirParams;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    ItPir,
    Cpir,
    /// Full database download.
    Trivial,
}

impl Backend {
    pub fn code(self) -> u8 {
        match self {
            Backend::ItPir => 0,
            Backend::Cpir => 1,
            Backend::Trivial => 2,
        }
    }

    pub fn from_code(c: u8) -> Result<Self> {
        match c {
            0 => Ok(Backend::ItPir),
            1 => Ok(Backend::Cpir),
            2 => Ok(Backend::Trivial),
            _ => Err(Error::protocol(format!("unknown backend {c}"))),
        }
    }

    /// Routing rule standing in for the hybrid scheme: one server means C-PIR,
    /// several mean IT-PIR.
    pub fn for_server_count(n: usize) -> Self {
        if n <= 1 {
            Backend::Cpir
        } else {
            Backend::ItPir
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::ItPir => "itpir",
            Backend::Cpir => "cpir",
            Backend::Trivial => "naive",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "itpir" => Ok(Backend::ItPir),
            "cpir" => Ok(Backend::Cpir),
            "naive" | "trivial" => Ok(Backend::Trivial),
            _ => Err(Error::parse(format!("unknown backend {s:?}"))),
        }
    }
}

/// Bytes moved by the client, payload only.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Bandwidth {
    pub upload: u64,
    pub download: u64,
}

impl Bandwidth {
    pub fn total(&self) -> u64 {
        self.upload + self.download
    }
}

impl std::ops::AddAssign for Bandwidth {
    fn add_assign(&mut self, rhs: Bandwidth) {
        self.upload += rhs.upload;
        self.download += rhs.download;
    }
}

impl std::ops::Sub for Bandwidth {
    type Output = Bandwidth;
    fn sub(self, rhs: Bandwidth) -> Bandwidth {
        Bandwidth {
            upload: self.upload - rhs.upload,
            download: self.download - rhs.download,
        }
    }
}

/// Anything that can privately return one row of one database.
pub trait RowFetch {
    fn shape(&self) -> DbShape;
    fn fetch_row(&mut self, row: usize) -> Result<Vec<u8>>;
    fn bandwidth(&self) -> Bandwidth;
}

/// Fetch rows `start..=end` one query per row and concatenate them.
pub fn fetch_rows<F: RowFetch + ?Sized>(fetcher: &mut F, start: usize, end: usize) -> Result<Vec<u8>> {
    let shape = fetcher.shape();
    if start > end || end >= shape.num_rows {
        return Err(Error::domain(format!(
            "row range {start}..={end} invalid for {} rows",
            shape.num_rows
        )));
    }
    let mut out = Vec::with_capacity((end - start + 1) * shape.row_width);
    for r in start..=end {
        out.extend_from_slice(&fetcher.fetch_row(r)?);
    }
    Ok(out)
}

pub fn trivial_fetch(db: &PirDatabase) -> Vec<u8> {
    db.payload().to_vec()
}

/// In-process IT-PIR against `ell` replicas of one database.
pub struct LocalItPir<'a, R> {
    db: &'a PirDatabase,
    params: PirParams,
    rng: R,
    bw: Bandwidth,
}

impl<'a, R: Rng> LocalItPir<'a, R> {
    pub fn new(db: &'a PirDatabase, params: PirParams, rng: R) -> Self {
        LocalItPir {
            db,
            params,
            rng,
            bw: Bandwidth::default(),
        }
    }
}

impl<R: Rng> RowFetch for LocalItPir<'_, R> {
    fn shape(&self) -> DbShape {
        self.db.shape()
    }

    fn fetch_row(&mut self, row: usize) -> Result<Vec<u8>> {
        let qs = itpir_gen_queries(row, self.db.shape(), &self.params, &mut self.rng)?;
        let mut rs = Vec::with_capacity(qs.len());
        for q in &qs {
            self.bw.upload += q.shares.len() as u64;
            let r = itpir_compute(q, self.db)?;
            self.bw.download += r.data.len() as u64;
            rs.push(r);
        }
        itpir_decode(&rs, &self.params)
    }

    fn bandwidth(&self) -> Bandwidth {
        self.bw
    }
}

pub struct LocalCpir<'a, R> {
    db: &'a PirDatabase,
    lwe_dim: usize,
    rng: R,
    bw: Bandwidth,
}

impl<'a, R: Rng> LocalCpir<'a, R> {
    pub fn new(db: &'a PirDatabase, lwe_dim: usize, rng: R) -> Self {
        LocalCpir {
            db,
            lwe_dim,
            rng,
            bw: Bandwidth::default(),
        }
    }
}

impl<R: Rng> RowFetch for LocalCpir<'_, R> {
    fn shape(&self) -> DbShape {
        self.db.shape()
    }

    fn fetch_row(&mut self, row: usize) -> Result<Vec<u8>> {
        let (q, st) = cpir_gen_query(row, self.db.shape(), self.lwe_dim, &mut self.rng)?;
        let q_bytes = q.encode();
        self.bw.upload += q_bytes.len() as u64;
        let r = cpir_compute(&CpirQuery::decode(&q_bytes)?, self.db)?;
        let r_bytes = r.encode();
        self.bw.download += r_bytes.len() as u64;
        cpir_decode(&CpirResponse::decode(&r_bytes)?, &st)
    }

    fn bandwidth(&self) -> Bandwidth {
        self.bw
    }
}

/// Downloads the full payload on first use and answers every row locally.
pub struct LocalTrivial<'a> {
    db: &'a PirDatabase,
    cache: Option<Vec<u8>>,
    bw: Bandwidth,
}

impl<'a> LocalTrivial<'a> {
    pub fn new(db: &'a PirDatabase) -> Self {
        LocalTrivial {
            db,
            cache: None,
            bw: Bandwidth::default(),
        }
    }
}

impl RowFetch for LocalTrivial<'_> {
    fn shape(&self) -> DbShape {
        self.db.shape()
    }

    fn fetch_row(&mut self, row: usize) -> Result<Vec<u8>> {
        let shape = self.db.shape();
        if row >= shape.num_rows {
            return Err(Error::domain(format!("row {row} out of range")));
        }
        if self.cache.is_none() {
            let all = trivial_fetch(self.db);
            self.bw.download += all.len() as u64;
            self.cache = Some(all);
        }
        let all = self.cache.as_ref().unwrap();
        Ok(all[row * shape.row_width..(row + 1) * shape.row_width].to_vec())
    }

    fn bandwidth(&self) -> Bandwidth {
        self.bw
    }
}
