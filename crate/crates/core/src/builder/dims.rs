use crate::error::{Error, Result};
use crate::pir::{DbKind, Period};

/// Aggregate sizes of the items going into one database.
///
/// `n_units` counts entries for Address, TXIDs for Merkle and bytes for
/// Transaction databases; `n_groups` counts blocks (Merkle) or transactions
/// (Transaction) and is unused for Address databases.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ItemStats {
    pub n_units: u64,
    pub n_groups: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dimensions {
    pub row_width: usize,
    pub num_rows: usize,
    pub item_unit: usize,
}

impl Dimensions {
    pub fn units_per_row(&self) -> usize {
        self.row_width / self.item_unit
    }

    pub fn capacity_units(&self) -> u64 {
        (self.units_per_row() * self.num_rows) as u64
    }
}

/// Smallest `e` with `unit * e^2 >= n`: `e` items per row, `unit * e` rows,
/// so the byte matrix is square.
fn square_entries_per_row(n: u64, unit: u64) -> u64 {
    let mut e = ((n as f64 / unit as f64).sqrt().ceil() as u64).max(1);
    while e > 1 && unit * (e - 1) * (e - 1) >= n {
        e -= 1;
    }
    while unit * e * e < n {
        e += 1;
    }
    e
}

pub fn compute_dimensions(kind: DbKind, period: Period, stats: ItemStats) -> Result<Dimensions> {
    if stats.n_units == 0 {
        return Err(Error::domain("cannot dimension an empty database"));
    }
    let unit = kind.item_unit() as u64;
    let square = matches!(kind, DbKind::Address)
        || matches!((kind, period), (DbKind::MerkleTree, Period::Weekly | Period::Monthly));
    let (per_row, rows) = if square {
        let e = square_entries_per_row(stats.n_units, unit);
        (e, unit * e)
    } else {
        // Width is the expected group size: TXIDs per block for the all-time
        // Merkle database, bytes per transaction for Transaction databases.
        if stats.n_groups == 0 {
            return Err(Error::domain("group count required for expected-width sizing"));
        }
        let per_row = stats.n_units.div_ceil(stats.n_groups);
        (per_row, stats.n_units.div_ceil(per_row))
    };
    Ok(Dimensions {
        row_width: (per_row * unit) as usize,
        num_rows: rows as usize,
        item_unit: unit as usize,
    })
}
