//! Per-database key → rectangle index, serialized as one JSON object
//! `{"key": [row_start, row_end, col_start, col_end], ...}` with sorted keys.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeTuple;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::pir::{DbKind, DbShape, Period};

/// Inclusive rectangle. Columns count item units: entries for Address and
/// Merkle databases, bytes for Transaction databases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ManifestRecord {
    pub row_start: usize,
    pub row_end: usize,
    pub col_start: usize,
    pub col_end: usize,
}

impl ManifestRecord {
    pub fn num_rows(&self) -> usize {
        self.row_end - self.row_start + 1
    }

    /// Check ordering and bounds against a database with `units_per_row`
    /// items per row.
    pub fn validate(&self, num_rows: usize, units_per_row: usize) -> Result<()> {
        let ordered = self.row_start < self.row_end
            || (self.row_start == self.row_end && self.col_start <= self.col_end);
        if !ordered {
            return Err(Error::parse(format!("rectangle {self:?} is inverted")));
        }
        if self.row_end >= num_rows || self.col_start >= units_per_row || self.col_end >= units_per_row {
            return Err(Error::parse(format!(
                "rectangle {self:?} exceeds {num_rows} rows of {units_per_row} units"
            )));
        }
        Ok(())
    }

    /// Cut the item's bytes out of the concatenated rows `row_start..=row_end`.
    pub fn slice<'a>(&self, rows: &'a [u8], row_width: usize, unit: usize) -> Result<&'a [u8]> {
        let start = self.col_start * unit;
        let end = (self.num_rows() - 1) * row_width + (self.col_end + 1) * unit;
        if rows.len() != self.num_rows() * row_width || end > rows.len() || start >= end {
            return Err(Error::protocol(format!(
                "fetched {} bytes do not cover rectangle {self:?}",
                rows.len()
            )));
        }
        Ok(&rows[start..end])
    }
}

impl Serialize for ManifestRecord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(4)?;
        for v in [self.row_start, self.row_end, self.col_start, self.col_end] {
            t.serialize_element(&v)?;
        }
        t.end()
    }
}

impl<'de> Deserialize<'de> for ManifestRecord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = ManifestRecord;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("an array of exactly 4 non-negative integers")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<ManifestRecord, A::Error> {
                let mut v = [0usize; 4];
                for (i, slot) in v.iter_mut().enumerate() {
                    *slot = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(i, &self))?;
                }
                if seq.next_element::<de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(5, &self));
                }
                Ok(ManifestRecord {
                    row_start: v[0],
                    row_end: v[1],
                    col_start: v[2],
                    col_end: v[3],
                })
            }
        }
        d.deserialize_seq(V)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub kind: DbKind,
    pub period: Period,
    pub records: BTreeMap<String, ManifestRecord>,
}

impl Manifest {
    pub fn empty(kind: DbKind, period: Period) -> Self {
        Manifest {
            kind,
            period,
            records: BTreeMap::new(),
        }
    }

    pub fn from_location_index<I>(kind: DbKind, period: Period, index: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, ManifestRecord)>,
    {
        let mut records = BTreeMap::new();
        for (key, rec) in index {
            if records.insert(key.clone(), rec).is_some() {
                return Err(Error::Build(format!("duplicate manifest key {key}")));
            }
        }
        Ok(Manifest { kind, period, records })
    }

    pub fn lookup(&self, key: &str) -> Option<&ManifestRecord> {
        self.records.get(key)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn validate(&self, shape: DbShape) -> Result<()> {
        let per_row = shape.row_width / self.kind.item_unit();
        self.records
            .values()
            .try_for_each(|r| r.validate(shape.num_rows, per_row))
    }

    pub fn to_json(&self) -> Vec<u8> {
        serde_json::to_vec(&self.records).expect("manifest serializes")
    }

    pub fn from_json(kind: DbKind, period: Period, bytes: &[u8]) -> Result<Self> {
        let records: BTreeMap<String, ManifestRecord> = serde_json::from_slice(bytes)
            .map_err(|e| Error::parse(format!("manifest {kind}-{period}: {e}")))?;
        Ok(Manifest { kind, period, records })
    }

    pub fn file_name(kind: DbKind, period: Period) -> String {
        format!("{kind}-{period}.manifest.json")
    }

    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        std::fs::write(dir.join(Self::file_name(self.kind, self.period)), self.to_json())?;
        Ok(())
    }

    pub fn read_from_dir(dir: &Path, kind: DbKind, period: Period) -> Result<Self> {
        let bytes = std::fs::read(dir.join(Self::file_name(kind, period)))?;
        Self::from_json(kind, period, &bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(a: usize, b: usize, c: usize, d: usize) -> ManifestRecord {
        ManifestRecord { row_start: a, row_end: b, col_start: c, col_end: d }
    }

    #[test]
    fn json_shape_and_roundtrip() {
        let m = Manifest::from_location_index(
            DbKind::Address,
            Period::Weekly,
            vec![
                ("1BvBMSEYstWetqTFn5Au4m4GFg7xJaNVN2".to_string(), rec(3, 3, 5, 7)),
                ("1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa".to_string(), rec(0, 0, 0, 0)),
            ],
        )
        .unwrap();
        let json = m.to_json();
        assert_eq!(
            std::str::from_utf8(&json).unwrap(),
            r#"{"1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa":[0,0,0,0],"1BvBMSEYstWetqTFn5Au4m4GFg7xJaNVN2":[3,3,5,7]}"#
        );
        assert_eq!(Manifest::from_json(DbKind::Address, Period::Weekly, &json).unwrap(), m);
    }

    #[test]
    fn arity_and_syntax_rejected() {
        for bad in [r#"{"a":[1,2,3]}"#, r#"{"a":[1,2,3,4,5]}"#, r#"{"a":[1,2,-3,4]}"#, "{", "[]"] {
            assert!(Manifest::from_json(DbKind::Address, Period::Weekly, bad.as_bytes()).is_err(), "{bad}");
        }
    }

    #[test]
    fn duplicates_rejected() {
        let r = Manifest::from_location_index(
            DbKind::MerkleTree,
            Period::Weekly,
            vec![("7".to_string(), rec(0, 0, 0, 0)), ("7".to_string(), rec(0, 0, 1, 1))],
        );
        assert!(matches!(r, Err(Error::Build(_))));
    }

    #[test]
    fn lookup_is_case_sensitive() {
        let m = Manifest::from_location_index(DbKind::Address, Period::Weekly, vec![("1Abc".to_string(), rec(0, 0, 0, 0))]).unwrap();
        assert!(m.lookup("1Abc").is_some());
        assert!(m.lookup("1abc").is_none());
        assert!(m.lookup("nope").is_none());
    }

    #[test]
    fn validation_bounds() {
        assert!(rec(1, 1, 2, 1).validate(4, 4).is_err());
        assert!(rec(1, 2, 3, 0).validate(4, 4).is_ok());
        assert!(rec(3, 4, 0, 0).validate(4, 4).is_err());
        assert!(rec(0, 0, 0, 4).validate(4, 4).is_err());
    }

    #[test]
    fn slicing_spanning_rows() {
        let rows: Vec<u8> = (0..30).collect();
        let r = rec(4, 6, 7, 2);
        assert_eq!(r.slice(&rows, 10, 1).unwrap(), &rows[7..23]);
        assert!(r.slice(&rows[..20], 10, 1).is_err());
    }

    #[test]
    fn size_grows_linearly() {
        let size = |n: usize| {
            let idx = (0..n).map(|i| (format!("{i:012}"), rec(i / 100, i / 100, i % 100, i % 100)));
            Manifest::from_location_index(DbKind::MerkleTree, Period::AllTime, idx).unwrap().to_json().len() as f64
        };
        let (a, b, c) = (size(100), size(1000), size(10_000));
        let per_a = a / 100.0;
        let per_c = c / 10_000.0;
        assert!((b / 1000.0 - per_a).abs() / per_a < 0.2);
        assert!((per_c - per_a).abs() / per_a < 0.2);
    }
}
