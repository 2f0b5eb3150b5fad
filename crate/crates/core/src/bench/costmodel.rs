//! Analytic IT-PIR bandwidth from database dimensions alone.

use crate::pir::{DbKind, DbShape, Period};

/// Dimensions reported for the 2018 mainnet build, as (kind, period,
/// units per row, rows). Units are entries for Address and Merkle
/// databases and bytes for Transaction databases.
pub const REPORTED_DIMENSIONS: [(DbKind, Period, usize, usize); 9] = [
    (DbKind::Address, Period::AllTime, 906, 56_172),
    (DbKind::Address, Period::Monthly, 214, 13_268),
    (DbKind::Address, Period::Weekly, 124, 7_688),
    (DbKind::MerkleTree, Period::AllTime, 821, 394_080),
    (DbKind::MerkleTree, Period::Monthly, 1_196, 38_272),
    (DbKind::MerkleTree, Period::Weekly, 1_184, 37_888),
    (DbKind::Transaction, Period::AllTime, 758, 20_942_782),
    (DbKind::Transaction, Period::Monthly, 848, 1_537_424),
    (DbKind::Transaction, Period::Weekly, 876, 512_460),
];

pub fn reported_shape(kind: DbKind, period: Period) -> DbShape {
    let (_, _, units, rows) = REPORTED_DIMENSIONS
        .iter()
        .find(|(k, p, _, _)| *k == kind && *p == period)
        .copied()
        .expect("every kind and period is listed");
    DbShape::new(rows, units * kind.item_unit())
}

/// Rows fetched per round; one row each unless a record spans more.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RoundRows {
    pub address: usize,
    pub merkle: usize,
    pub transaction: usize,
}

impl Default for RoundRows {
    fn default() -> Self {
        RoundRows { address: 1, merkle: 1, transaction: 1 }
    }
}

/// Bytes for one three-round lookup: per round, rows × servers × (height + width).
pub fn lookup_cost(shapes: [DbShape; 3], rows: RoundRows, servers: usize) -> u64 {
    let per = |s: DbShape, n: usize| (n * servers * (s.num_rows + s.row_width)) as u64;
    per(shapes[0], rows.address) + per(shapes[1], rows.merkle) + per(shapes[2], rows.transaction)
}

pub fn reported_lookup_cost(period: Period, rows: RoundRows, servers: usize) -> u64 {
    lookup_cost(
        [
            reported_shape(DbKind::Address, period),
            reported_shape(DbKind::MerkleTree, period),
            reported_shape(DbKind::Transaction, period),
        ],
        rows,
        servers,
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct CostModelRow {
    pub period: Period,
    pub servers: usize,
    pub bytes: u64,
    pub db_bytes: [u64; 3],
}

/// Single-row lookups against the reported dimensions for 1 and 3 servers.
pub fn reported_cost_table() -> Vec<CostModelRow> {
    let mut out = Vec::new();
    for period in [Period::AllTime, Period::Monthly, Period::Weekly] {
        for servers in [1, 3] {
            out.push(CostModelRow {
                period,
                servers,
                bytes: reported_lookup_cost(period, RoundRows::default(), servers),
                db_bytes: [DbKind::Address, DbKind::MerkleTree, DbKind::Transaction]
                    .map(|k| reported_shape(k, period).total_bytes() as u64),
            });
        }
    }
    out
}
