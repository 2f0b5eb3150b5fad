//! Turns a chain into the nine PIR databases (three kinds × three periods)
//! and their manifests.

mod dims;
mod entries;
mod pack;
mod partition;

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

pub use dims::{compute_dimensions, Dimensions, ItemStats};
pub use entries::{extract_address_entries, utxo_snapshot, AddressEntry, UtxoSnapshot, ADDRESS_ENTRY_LEN};
pub use pack::{build_database, LocationIndex};
pub use partition::{partition_chain, PeriodPartition, MONTHLY_BLOCKS, WEEKLY_BLOCKS};

use crate::chain::{Block, BlockHeader, HEADER_LEN};
use crate::error::{Error, Result};
use crate::manifest::Manifest;
use crate::pir::{DbKind, Period, PirDatabase};

pub const HEADERS_FILE: &str = "headers.bin";

pub type DbId = (DbKind, Period);

/// Everything a server hosts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BuildOutput {
    pub databases: BTreeMap<DbId, PirDatabase>,
    pub manifests: BTreeMap<DbId, Manifest>,
    pub headers: Vec<BlockHeader>,
}

impl BuildOutput {
    pub fn database(&self, kind: DbKind, period: Period) -> &PirDatabase {
        &self.databases[&(kind, period)]
    }

    pub fn manifest(&self, kind: DbKind, period: Period) -> &Manifest {
        &self.manifests[&(kind, period)]
    }

    pub fn db_file_name(kind: DbKind, period: Period) -> String {
        format!("{kind}-{period}.pirdb")
    }

    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for ((kind, period), db) in &self.databases {
            let f = File::create(dir.join(Self::db_file_name(*kind, *period)))?;
            db.write_to(BufWriter::new(f))?;
        }
        for m in self.manifests.values() {
            m.write_to_dir(dir)?;
        }
        let headers: Vec<u8> = self.headers.iter().flat_map(|h| h.serialize()).collect();
        std::fs::write(dir.join(HEADERS_FILE), headers)?;
        Ok(())
    }

    pub fn load_dir(dir: &Path) -> Result<Self> {
        let mut databases = BTreeMap::new();
        let mut manifests = BTreeMap::new();
        for kind in DbKind::ALL {
            for period in Period::ALL {
                let path = dir.join(Self::db_file_name(kind, period));
                let f = File::open(&path)
                    .map_err(|e| Error::NotFound(format!("{}: {e}", path.display())))?;
                let db = PirDatabase::read_from(BufReader::new(f))?;
                if (db.kind(), db.period()) != (kind, period) {
                    return Err(Error::parse(format!("{} holds {}-{}", path.display(), db.kind(), db.period())));
                }
                let m = Manifest::read_from_dir(dir, kind, period)?;
                m.validate(db.shape())?;
                databases.insert((kind, period), db);
                manifests.insert((kind, period), m);
            }
        }
        let raw = std::fs::read(dir.join(HEADERS_FILE))?;
        if raw.len() % HEADER_LEN != 0 {
            return Err(Error::parse("headers file is not a whole number of headers"));
        }
        let headers = raw
            .chunks(HEADER_LEN)
            .map(BlockHeader::parse)
            .collect::<Result<_>>()?;
        Ok(BuildOutput { databases, manifests, headers })
    }
}

/// Items for one database in packing order, keyed as in its manifest.
pub fn database_items(kind: DbKind, blocks: &[Block], utxo: &UtxoSnapshot) -> Result<Vec<(String, Vec<u8>)>> {
    Ok(match kind {
        DbKind::Address => {
            let mut items: Vec<(String, Vec<u8>)> = Vec::new();
            let mut last = None;
            for e in extract_address_entries(blocks, utxo)? {
                if last != Some(e.address) {
                    items.push((e.address.to_base58(), Vec::new()));
                    last = Some(e.address);
                }
                items.last_mut().unwrap().1.extend_from_slice(&e.to_bytes());
            }
            items
        }
        DbKind::MerkleTree => blocks
            .iter()
            .map(|b| (b.height.to_string(), b.txids().iter().flat_map(|h| h.0).collect()))
            .collect(),
        DbKind::Transaction => {
            let unspent: HashSet<_> = utxo.keys().map(|op| op.txid).collect();
            blocks
                .iter()
                .flat_map(|b| &b.txs)
                .filter_map(|tx| {
                    let id = tx.txid();
                    unspent.contains(&id).then(|| (id.to_hex(), tx.serialize()))
                })
                .collect()
        }
    })
}

fn item_stats(kind: DbKind, items: &[(String, Vec<u8>)]) -> ItemStats {
    let unit = kind.item_unit() as u64;
    ItemStats {
        n_units: items.iter().map(|(_, b)| b.len() as u64).sum::<u64>() / unit,
        n_groups: items.len() as u64,
    }
}

/// Build one database and its manifest. A period without items gets a
/// single zero row one item wide and an empty manifest.
pub fn build_one(kind: DbKind, period: Period, blocks: &[Block], utxo: &UtxoSnapshot) -> Result<(PirDatabase, Manifest)> {
    let items = database_items(kind, blocks, utxo)?;
    if items.is_empty() {
        let unit = kind.item_unit();
        return Ok((
            PirDatabase::new(kind, period, 1, unit, vec![0; unit])?,
            Manifest::empty(kind, period),
        ));
    }
    let dims = compute_dimensions(kind, period, item_stats(kind, &items))?;
    let (db, index) = build_database(kind, period, &items, dims)?;
    let manifest = Manifest::from_location_index(kind, period, index)?;
    Ok((db, manifest))
}

pub fn build_all(blocks: &[Block]) -> Result<BuildOutput> {
    let partition = partition_chain(blocks)?;
    let utxo = utxo_snapshot(blocks);
    let mut databases = BTreeMap::new();
    let mut manifests = BTreeMap::new();
    for period in Period::ALL {
        let range = partition.range(period);
        for kind in DbKind::ALL {
            let (db, m) = build_one(kind, period, &blocks[range.clone()], &utxo)?;
            databases.insert((kind, period), db);
            manifests.insert((kind, period), m);
        }
    }
    Ok(BuildOutput {
        databases,
        manifests,
        headers: blocks.iter().map(|b| b.header).collect(),
    })
}
