//! Multi-server information-theoretic PIR built on Shamir shares.
//!
//! For each database row `j` the client picks a random polynomial `f_j` of
//! degree `t` with `f_j(0) = 1` when `j` is the wanted row and `0` otherwise,
//! and sends server `s` the vector `(f_j(alpha_s))_j`. Each server multiplies
//! that vector into the database; the answers are shares of the wanted row,
//! which the client reconstructs column by column at zero.

use rand::Rng;

use super::database::{DbShape, PirDatabase};
use super::params::PirParams;
use crate::error::{Error, Result};
use crate::gf256::{self, berlekamp_welch, lagrange_coefficients_at_zero, Gf256};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ItPirQuery {
    pub server_index: usize,
    /// One share per database row.
    pub shares: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ItPirResponse {
    pub server_index: usize,
    /// One share per byte of the row.
    pub data: Vec<u8>,
}

pub fn itpir_gen_queries<R: Rng + ?Sized>(
    row_index: usize,
    shape: DbShape,
    params: &PirParams,
    rng: &mut R,
) -> Result<Vec<ItPirQuery>> {
    if row_index >= shape.num_rows {
        return Err(Error::domain(format!(
            "row {row_index} out of range for {} rows",
            shape.num_rows
        )));
    }
    let mut queries: Vec<ItPirQuery> = (0..params.ell)
        .map(|s| ItPirQuery {
            server_index: s,
            shares: vec![0u8; shape.num_rows],
        })
        .collect();
    let mut coeffs = vec![Gf256::ZERO; params.t];
    for j in 0..shape.num_rows {
        for c in coeffs.iter_mut() {
            *c = Gf256(rng.gen());
        }
        let secret = if j == row_index { Gf256::ONE } else { Gf256::ZERO };
        for (q, &alpha) in queries.iter_mut().zip(&params.alphas) {
            // Horner over the random coefficients, then the constant term.
            let mut acc = Gf256::ZERO;
            for &c in coeffs.iter().rev() {
                acc = (acc + c) * alpha;
            }
            q.shares[j] = (acc + secret).0;
        }
    }
    Ok(queries)
}

/// Server side: the GF(2^8) vector-by-matrix product `shares * db`.
pub fn itpir_compute(query: &ItPirQuery, db: &PirDatabase) -> Result<ItPirResponse> {
    Ok(ItPirResponse {
        server_index: query.server_index,
        data: itpir_compute_raw(&query.shares, db)?,
    })
}

pub fn itpir_compute_raw(shares: &[u8], db: &PirDatabase) -> Result<Vec<u8>> {
    if shares.len() != db.num_rows() {
        return Err(Error::protocol(format!(
            "query has {} shares, database has {} rows",
            shares.len(),
            db.num_rows()
        )));
    }
    let mut out = vec![0u8; db.row_width()];
    for (&s, row) in shares.iter().zip(db.rows()) {
        gf256::mul_acc_slice(&mut out, row, s);
    }
    Ok(out)
}

/// Reconstruct the requested row from server responses, correcting up to
/// `params.v` wrong answers.
pub fn itpir_decode(responses: &[ItPirResponse], params: &PirParams) -> Result<Vec<u8>> {
    let need = params.min_responses();
    if responses.len() < need {
        return Err(Error::InsufficientShares {
            need,
            got: responses.len(),
        });
    }
    let width = responses[0].data.len();
    if responses.iter().any(|r| r.data.len() != width) {
        return Err(Error::protocol("responses disagree on row width"));
    }
    let xs = responses
        .iter()
        .map(|r| params.alpha(r.server_index))
        .collect::<Result<Vec<_>>>()?;
    let mut seen = [false; 256];
    for x in &xs {
        if std::mem::replace(&mut seen[x.0 as usize], true) {
            return Err(Error::protocol("two responses share an evaluation point"));
        }
    }

    let t = params.t;
    let base = lagrange_coefficients_at_zero(&xs[..=t]);
    let mut row: Vec<u8> = (0..width)
        .map(|c| {
            responses[..=t]
                .iter()
                .zip(&base)
                .fold(Gf256::ZERO, |acc, (r, &l)| acc + l * Gf256(r.data[c]))
                .0
        })
        .collect();
    if params.v == 0 {
        return Ok(row);
    }

    // Columns where any extra response disagrees with the fast interpolation
    // go through the full error-correcting decoder.
    let checks: Vec<Vec<Gf256>> = xs[t + 1..]
        .iter()
        .map(|&x| lagrange_weights_at(&xs[..=t], x))
        .collect();
    for (c, out) in row.iter_mut().enumerate() {
        let consistent = responses[t + 1..].iter().zip(&checks).all(|(r, w)| {
            let predicted = responses[..=t]
                .iter()
                .zip(w)
                .fold(Gf256::ZERO, |acc, (b, &l)| acc + l * Gf256(b.data[c]));
            predicted.0 == r.data[c]
        });
        if consistent {
            continue;
        }
        let points: Vec<(Gf256, Gf256)> = xs
            .iter()
            .zip(responses)
            .map(|(&x, r)| (x, Gf256(r.data[c])))
            .collect();
        let poly = berlekamp_welch(&points, t, params.v)?;
        *out = poly.eval(Gf256::ZERO).0;
    }
    Ok(row)
}

/// Weights `w` with `f(x) = sum_i w_i f(xs_i)` for any `f` of degree < xs.len().
fn lagrange_weights_at(xs: &[Gf256], x: Gf256) -> Vec<Gf256> {
    xs.iter()
        .enumerate()
        .map(|(i, &xi)| {
            let mut num = Gf256::ONE;
            let mut den = Gf256::ONE;
            for (j, &xj) in xs.iter().enumerate() {
                if i != j {
                    num *= x + xj;
                    den *= xi + xj;
                }
            }
            num / den
        })
        .collect()
}

/// Upload plus download bytes of one row fetch against every server.
pub fn row_fetch_cost(shape: DbShape, servers: usize) -> u64 {
    (servers * (shape.num_rows + shape.row_width)) as u64
}
