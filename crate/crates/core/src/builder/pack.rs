use super::dims::Dimensions;
use crate::error::{Error, Result};
use crate::manifest::ManifestRecord;
use crate::pir::{DbKind, Period, PirDatabase};

/// Key and rectangle of every item packed into a database, in packing order.
pub type LocationIndex = Vec<(String, ManifestRecord)>;

/// Pack items row-major, left to right, in the given order, zero-padding the
/// rest. Rectangles are in item units (entries, TXIDs or bytes).
pub fn build_database(
    kind: DbKind,
    period: Period,
    items: &[(String, Vec<u8>)],
    dims: Dimensions,
) -> Result<(PirDatabase, LocationIndex)> {
    let unit = kind.item_unit();
    if dims.item_unit != unit || !dims.row_width.is_multiple_of(unit) {
        return Err(Error::Build(format!(
            "dimensions {dims:?} do not fit {kind} items"
        )));
    }
    let per_row = dims.units_per_row();
    let mut payload = vec![0u8; dims.num_rows * dims.row_width];
    let mut index = Vec::with_capacity(items.len());
    let mut pos = 0usize; // in units
    for (key, bytes) in items {
        if bytes.is_empty() || bytes.len() % unit != 0 {
            return Err(Error::Build(format!(
                "item {key} is {} bytes, not a positive multiple of {unit}",
                bytes.len()
            )));
        }
        let len = bytes.len() / unit;
        let end = pos + len;
        if end > per_row * dims.num_rows {
            return Err(Error::Build(format!(
                "capacity overflow packing {key}: {end} units into {}",
                per_row * dims.num_rows
            )));
        }
        payload[pos * unit..end * unit].copy_from_slice(bytes);
        index.push((
            key.clone(),
            ManifestRecord {
                row_start: pos / per_row,
                row_end: (end - 1) / per_row,
                col_start: pos % per_row,
                col_end: (end - 1) % per_row,
            },
        ));
        pos = end;
    }
    Ok((
        PirDatabase::new(kind, period, dims.num_rows, dims.row_width, payload)?,
        index,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(kind: DbKind, per_row: usize, rows: usize) -> Dimensions {
        Dimensions {
            row_width: per_row * kind.item_unit(),
            num_rows: rows,
            item_unit: kind.item_unit(),
        }
    }

    #[test]
    fn row_major_fill_with_padding() {
        let items: Vec<_> = (0..5u8).map(|i| (format!("k{i}"), vec![i + 1; 62])).collect();
        let (db, idx) = build_database(DbKind::Address, Period::Weekly, &items, dims(DbKind::Address, 3, 3)).unwrap();
        assert_eq!(db.row(0), [vec![1; 62], vec![2; 62], vec![3; 62]].concat());
        assert_eq!(&db.row(1)[..124], [vec![4; 62], vec![5; 62]].concat());
        assert!(db.row(1)[124..].iter().all(|&b| b == 0));
        assert!(db.row(2).iter().all(|&b| b == 0));
        assert_eq!(idx[4].1, ManifestRecord { row_start: 1, row_end: 1, col_start: 1, col_end: 1 });
    }

    #[test]
    fn transaction_spans_rows() {
        let items = vec![("tx".to_string(), vec![0xaa; 1800])];
        let (_, idx) = build_database(DbKind::Transaction, Period::Monthly, &items, dims(DbKind::Transaction, 848, 4)).unwrap();
        let r = idx[0].1;
        assert_eq!(r.row_end, r.row_start + 2);
        assert_eq!(r.row_end - r.row_start + 1, 1800usize.div_ceil(848));
        assert_eq!((r.col_start, r.col_end), (0, 1800 - 2 * 848 - 1));
    }

    #[test]
    fn overflow_is_an_error() {
        let items = vec![("a".to_string(), vec![1; 32 * 5])];
        assert!(matches!(
            build_database(DbKind::MerkleTree, Period::Weekly, &items, dims(DbKind::MerkleTree, 2, 2)),
            Err(Error::Build(_))
        ));
        let items = vec![("a".to_string(), vec![1; 33])];
        assert!(build_database(DbKind::MerkleTree, Period::Weekly, &items, dims(DbKind::MerkleTree, 2, 2)).is_err());
    }
}
