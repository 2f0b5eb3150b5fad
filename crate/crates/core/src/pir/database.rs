use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DB_MAGIC: &[u8; 6] = b"PIRDB\x01";
/// magic + kind + period + row_width + num_rows + item_unit
pub const DB_HEADER_LEN: usize = 6 + 1 + 1 + 4 + 4 + 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DbKind {
    Address,
    #[serde(rename = "merkle")]
    MerkleTree,
    Transaction,
}

impl DbKind {
    pub const ALL: [DbKind; 3] = [DbKind::Address, DbKind::MerkleTree, DbKind::Transaction];

    pub fn code(self) -> u8 {
        match self {
            DbKind::Address => 0,
            DbKind::MerkleTree => 1,
            DbKind::Transaction => 2,
        }
    }

    pub fn from_code(c: u8) -> Result<Self> {
        match c {
            0 => Ok(DbKind::Address),
            1 => Ok(DbKind::MerkleTree),
            2 => Ok(DbKind::Transaction),
            _ => Err(Error::parse(format!("unknown database kind {c}"))),
        }
    }

    /// Size in bytes of one addressable item: manifest columns count in these units.
    pub fn item_unit(self) -> usize {
        match self {
            DbKind::Address => crate::builder::ADDRESS_ENTRY_LEN,
            DbKind::MerkleTree => 32,
            DbKind::Transaction => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DbKind::Address => "address",
            DbKind::MerkleTree => "merkle",
            DbKind::Transaction => "transaction",
        }
    }
}

impl fmt::Display for DbKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DbKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        DbKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::parse(format!("unknown database kind {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Period {
    Weekly,
    Monthly,
    #[serde(rename = "alltime")]
    AllTime,
}

impl Period {
    /// Most recent first, which is also the order clients probe manifests in.
    pub const ALL: [Period; 3] = [Period::Weekly, Period::Monthly, Period::AllTime];

    pub fn code(self) -> u8 {
        match self {
            Period::Weekly => 0,
            Period::Monthly => 1,
            Period::AllTime => 2,
        }
    }

    pub fn from_code(c: u8) -> Result<Self> {
        match c {
            0 => Ok(Period::Weekly),
            1 => Ok(Period::Monthly),
            2 => Ok(Period::AllTime),
            _ => Err(Error::parse(format!("unknown period {c}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Period::Weekly => "weekly",
            Period::Monthly => "monthly",
            Period::AllTime => "alltime",
        }
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Period {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Period::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::parse(format!("unknown period {s:?}")))
    }
}

/// Height and width of a database, the only thing a client needs to form queries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DbShape {
    pub num_rows: usize,
    pub row_width: usize,
}

impl DbShape {
    pub fn new(num_rows: usize, row_width: usize) -> Self {
        DbShape {
            num_rows,
            row_width,
        }
    }

    pub fn total_bytes(&self) -> usize {
        self.num_rows * self.row_width
    }
}

/// Immutable row-major byte matrix served to PIR clients.
#[derive(Clone, PartialEq, Eq)]
pub struct PirDatabase {
    kind: DbKind,
    period: Period,
    num_rows: usize,
    row_width: usize,
    payload: Vec<u8>,
}

impl fmt::Debug for PirDatabase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PirDatabase")
            .field("kind", &self.kind)
            .field("period", &self.period)
            .field("num_rows", &self.num_rows)
            .field("row_width", &self.row_width)
            .finish()
    }
}

impl PirDatabase {
    pub fn new(
        kind: DbKind,
        period: Period,
        num_rows: usize,
        row_width: usize,
        payload: Vec<u8>,
    ) -> Result<Self> {
        if num_rows == 0 || row_width == 0 {
            return Err(Error::domain("database dimensions must be positive"));
        }
        if u32::try_from(num_rows).is_err() || u32::try_from(row_width).is_err() {
            return Err(Error::domain("database dimensions exceed 32 bits"));
        }
        if payload.len() != num_rows * row_width {
            return Err(Error::domain(format!(
                "payload is {} bytes, expected {} x {}",
                payload.len(),
                num_rows,
                row_width
            )));
        }
        Ok(PirDatabase {
            kind,
            period,
            num_rows,
            row_width,
            payload,
        })
    }

    pub fn kind(&self) -> DbKind {
        self.kind
    }

    pub fn period(&self) -> Period {
        self.period
    }

    pub fn num_rows(&self) -> usize {
        self.num_rows
    }

    pub fn row_width(&self) -> usize {
        self.row_width
    }

    pub fn shape(&self) -> DbShape {
        DbShape::new(self.num_rows, self.row_width)
    }

    pub fn payload(&self) -> &[u8] {
        &self.payload
    }

    pub fn row(&self, index: usize) -> &[u8] {
        &self.payload[index * self.row_width..(index + 1) * self.row_width]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> {
        self.payload.chunks_exact(self.row_width)
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(DB_MAGIC)?;
        w.write_all(&[self.kind.code(), self.period.code()])?;
        w.write_all(&(self.row_width as u32).to_le_bytes())?;
        w.write_all(&(self.num_rows as u32).to_le_bytes())?;
        w.write_all(&[self.kind.item_unit() as u8])?;
        w.write_all(&self.payload)?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(DB_HEADER_LEN + self.payload.len());
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut header = [0u8; DB_HEADER_LEN];
        r.read_exact(&mut header)
            .map_err(|e| Error::parse(format!("truncated database header: {e}")))?;
        if &header[..6] != DB_MAGIC {
            return Err(Error::parse("bad database magic"));
        }
        let kind = DbKind::from_code(header[6])?;
        let period = Period::from_code(header[7])?;
        let row_width = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
        let num_rows = u32::from_le_bytes(header[12..16].try_into().unwrap()) as usize;
        let unit = header[16] as usize;
        if unit != kind.item_unit() {
            return Err(Error::parse(format!(
                "item unit {unit} does not match {kind} database"
            )));
        }
        let mut payload = vec![0u8; num_rows * row_width];
        r.read_exact(&mut payload)
            .map_err(|e| Error::parse(format!("truncated database payload: {e}")))?;
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(Error::parse("trailing bytes after database payload"));
        }
        PirDatabase::new(kind, period, num_rows, row_width, payload)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Self::read_from(bytes)
    }
}
