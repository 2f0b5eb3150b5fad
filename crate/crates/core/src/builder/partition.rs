use std::ops::Range;

use crate::chain::Block;
use crate::error::{Error, Result};
use crate::pir::Period;

pub const WEEKLY_BLOCKS: usize = 1008;
pub const MONTHLY_BLOCKS: usize = 4032;

/// Tip-anchored split of block heights into the three periods.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodPartition {
    pub alltime: Range<usize>,
    pub monthly: Range<usize>,
    pub weekly: Range<usize>,
}

impl PeriodPartition {
    pub fn for_len(n_blocks: usize) -> Result<Self> {
        if n_blocks == 0 {
            return Err(Error::domain("cannot partition an empty chain"));
        }
        let weekly_start = n_blocks.saturating_sub(WEEKLY_BLOCKS);
        let monthly_start = weekly_start.saturating_sub(MONTHLY_BLOCKS);
        Ok(PeriodPartition {
            alltime: 0..monthly_start,
            monthly: monthly_start..weekly_start,
            weekly: weekly_start..n_blocks,
        })
    }

    pub fn range(&self, period: Period) -> Range<usize> {
        match period {
            Period::Weekly => self.weekly.clone(),
            Period::Monthly => self.monthly.clone(),
            Period::AllTime => self.alltime.clone(),
        }
    }

    pub fn period_of(&self, height: usize) -> Option<Period> {
        Period::ALL.into_iter().find(|&p| self.range(p).contains(&height))
    }
}

pub fn partition_chain(blocks: &[Block]) -> Result<PeriodPartition> {
    PeriodPartition::for_len(blocks.len())
}
