use crate::error::{Error, Result};
use crate::gf256::Gf256;

/// Replication and threshold parameters of the multi-server scheme.
///
/// `ell` servers hold the database, queries stay private against any `t`
/// colluding servers, `k` servers are expected to answer and up to `v` of
/// those answers may be wrong.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PirParams {
    pub ell: usize,
    pub t: usize,
    pub k: usize,
    pub v: usize,
    pub alphas: Vec<Gf256>,
}

impl PirParams {
    /// Evaluation points are fixed to 1..=ell.
    pub fn new(ell: usize, t: usize, k: usize, v: usize) -> Result<Self> {
        if ell > 255 {
            return Err(Error::domain("at most 255 servers fit GF(2^8) evaluation points"));
        }
        let alphas = (1..=ell).map(|a| Gf256(a as u8)).collect();
        Self::with_alphas(t, k, v, alphas)
    }

    pub fn with_alphas(t: usize, k: usize, v: usize, alphas: Vec<Gf256>) -> Result<Self> {
        let ell = alphas.len();
        if !(1 <= t && t < k && k <= ell) {
            return Err(Error::domain(format!(
                "need 1 <= t < k <= ell, got t={t} k={k} ell={ell}"
            )));
        }
        if v > (k - t - 1) / 2 {
            return Err(Error::domain(format!(
                "v={v} exceeds the unique-decoding radius floor((k-t-1)/2)={}",
                (k - t - 1) / 2
            )));
        }
        check_alphas(&alphas)?;
        Ok(PirParams {
            ell,
            t,
            k,
            v,
            alphas,
        })
    }

    /// All `ell` servers expected to answer, no Byzantine budget.
    pub fn honest(ell: usize, t: usize) -> Result<Self> {
        Self::new(ell, t, ell, 0)
    }

    /// One server, no blinding (privacy level 0). Only meaningful as the
    /// single-server bandwidth baseline: the query is the plain selection vector.
    pub fn single_server_baseline() -> Self {
        PirParams {
            ell: 1,
            t: 0,
            k: 1,
            v: 0,
            alphas: vec![Gf256(1)],
        }
    }

    pub fn alpha(&self, server_index: usize) -> Result<Gf256> {
        self.alphas
            .get(server_index)
            .copied()
            .ok_or_else(|| Error::protocol(format!("server index {server_index} out of range")))
    }

    /// Minimum number of responses the decoder accepts.
    pub fn min_responses(&self) -> usize {
        if self.v > 0 {
            self.t + 2 * self.v + 1
        } else {
            self.t + 1
        }
    }
}

fn check_alphas(alphas: &[Gf256]) -> Result<()> {
    let mut seen = [false; 256];
    for a in alphas {
        if a.is_zero() {
            return Err(Error::domain("server evaluation points must be nonzero"));
        }
        if std::mem::replace(&mut seen[a.0 as usize], true) {
            return Err(Error::domain("server evaluation points must be distinct"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(PirParams::new(3, 1, 3, 0).is_ok());
        assert!(PirParams::new(4, 1, 4, 1).is_ok());
        assert!(PirParams::new(3, 0, 3, 0).is_err());
        assert!(PirParams::new(3, 3, 3, 0).is_err());
        assert!(PirParams::new(3, 1, 4, 0).is_err());
        assert!(PirParams::new(3, 1, 3, 1).is_err());
        assert!(PirParams::with_alphas(1, 2, 0, vec![Gf256(1), Gf256(1)]).is_err());
        assert!(PirParams::with_alphas(1, 2, 0, vec![Gf256(0), Gf256(1)]).is_err());
        let p = PirParams::new(3, 1, 2, 0).unwrap();
        assert_eq!(p.alphas, vec![Gf256(1), Gf256(2), Gf256(3)]);
        assert_eq!(p.min_responses(), 2);
        assert_eq!(PirParams::new(4, 1, 4, 1).unwrap().min_responses(), 4);
    }
}
