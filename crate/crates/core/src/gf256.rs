//! Arithmetic over GF(2^8) with the reduction polynomial x^8 + x^4 + x^3 + x + 1,
//! plus the polynomial machinery the IT-PIR backend needs: evaluation,
//! Lagrange interpolation at zero and Berlekamp-Welch decoding.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Sub};

use crate::error::{Error, Result};

/// Low byte of the reduction polynomial 0x11b.
pub const REDUCTION_POLY: u8 = 0x1b;
const GENERATOR: u8 = 0x03;

const fn xtime_mul(mut a: u8, mut b: u8) -> u8 {
    let mut acc = 0u8;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        let carry = a & 0x80;
        a <<= 1;
        if carry != 0 {
            a ^= REDUCTION_POLY;
        }
        b >>= 1;
    }
    acc
}

const fn build_tables() -> ([u8; 512], [u8; 256]) {
    let mut exp = [0u8; 512];
    let mut log = [0u8; 256];
    let mut x = 1u8;
    let mut i = 0;
    while i < 255 {
        exp[i] = x;
        log[x as usize] = i as u8;
        x = xtime_mul(x, GENERATOR);
        i += 1;
    }
    // Doubled so exp[log a + log b] never needs a modulo.
    while i < 512 {
        exp[i] = exp[i - 255];
        i += 1;
    }
    (exp, log)
}

const TABLES: ([u8; 512], [u8; 256]) = build_tables();
static EXP: [u8; 512] = TABLES.0;
static LOG: [u8; 256] = TABLES.1;

const fn build_mul_table() -> [[u8; 256]; 256] {
    let mut t = [[0u8; 256]; 256];
    let mut a = 1;
    while a < 256 {
        let mut b = 1;
        while b < 256 {
            t[a][b] = TABLES.0[TABLES.1[a] as usize + TABLES.1[b] as usize];
            b += 1;
        }
        a += 1;
    }
    t
}

/// Full product table, `MUL_TABLE[a][b] = a * b`. Used by the row-scaling hot loops.
pub static MUL_TABLE: [[u8; 256]; 256] = build_mul_table();

/// An element of GF(2^8).
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf256(pub u8);

impl Gf256 {
    pub const ZERO: Gf256 = Gf256(0);
    pub const ONE: Gf256 = Gf256(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Multiplicative inverse; zero has none.
    pub fn inv(self) -> Result<Gf256> {
        if self.0 == 0 {
            return Err(Error::domain("zero has no multiplicative inverse"));
        }
        Ok(Gf256(EXP[255 - LOG[self.0 as usize] as usize]))
    }

    pub fn pow(self, mut e: u32) -> Gf256 {
        let mut base = self;
        let mut acc = Gf256::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }
}

impl fmt::Debug for Gf256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf256({:#04x})", self.0)
    }
}

impl From<u8> for Gf256 {
    fn from(v: u8) -> Self {
        Gf256(v)
    }
}

impl Add for Gf256 {
    type Output = Gf256;
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: Gf256) -> Gf256 {
        Gf256(self.0 ^ rhs.0)
    }
}

impl AddAssign for Gf256 {
    #[inline]
    #[allow(clippy::suspicious_op_assign_impl)]
    fn add_assign(&mut self, rhs: Gf256) {
        self.0 ^= rhs.0;
    }
}

impl Sub for Gf256 {
    type Output = Gf256;
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: Gf256) -> Gf256 {
        Gf256(self.0 ^ rhs.0)
    }
}

impl Mul for Gf256 {
    type Output = Gf256;
    #[inline]
    fn mul(self, rhs: Gf256) -> Gf256 {
        Gf256(MUL_TABLE[self.0 as usize][rhs.0 as usize])
    }
}

impl MulAssign for Gf256 {
    #[inline]
    fn mul_assign(&mut self, rhs: Gf256) {
        *self = *self * rhs;
    }
}

impl Div for Gf256 {
    type Output = Gf256;
    /// Panics on division by zero; use [`Gf256::inv`] for a fallible path.
    fn div(self, rhs: Gf256) -> Gf256 {
        assert!(rhs.0 != 0, "division by zero in GF(2^8)");
        if self.0 == 0 {
            return Gf256::ZERO;
        }
        let l = LOG[self.0 as usize] as usize + 255 - LOG[rhs.0 as usize] as usize;
        Gf256(EXP[l])
    }
}

pub fn gf_mul(a: Gf256, b: Gf256) -> Gf256 {
    a * b
}

pub fn gf_inv(a: Gf256) -> Result<Gf256> {
    a.inv()
}

/// `dst[i] ^= scalar * src[i]` for every byte.
#[inline]
pub fn mul_acc_slice(dst: &mut [u8], src: &[u8], scalar: u8) {
    debug_assert_eq!(dst.len(), src.len());
    match scalar {
        0 => {}
        1 => dst.iter_mut().zip(src).for_each(|(d, s)| *d ^= *s),
        _ => {
            let row = &MUL_TABLE[scalar as usize];
            dst.iter_mut()
                .zip(src)
                .for_each(|(d, s)| *d ^= row[*s as usize]);
        }
    }
}

/// Polynomial over GF(2^8), lowest-degree coefficient first.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    pub coeffs: Vec<Gf256>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Gf256>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn eval(&self, x: Gf256) -> Gf256 {
        self.coeffs
            .iter()
            .rev()
            .fold(Gf256::ZERO, |acc, &c| acc * x + c)
    }

    /// Polynomial long division, returning (quotient, remainder).
    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        let dd = divisor
            .degree()
            .ok_or_else(|| Error::domain("polynomial division by zero"))?;
        let lead_inv = divisor.coeffs[dd].inv()?;
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return Ok((Poly::zero(), Poly::zero()));
        };
        if nd < dd {
            return Ok((Poly::zero(), Poly::new(rem)));
        }
        let mut quot = vec![Gf256::ZERO; nd - dd + 1];
        for i in (0..=nd - dd).rev() {
            let c = rem[i + dd] * lead_inv;
            quot[i] = c;
            if c.is_zero() {
                continue;
            }
            for (j, &d) in divisor.coeffs[..=dd].iter().enumerate() {
                rem[i + j] += c * d;
            }
        }
        rem.truncate(dd);
        Ok((Poly::new(quot), Poly::new(rem)))
    }
}

fn check_xs(points: &[(Gf256, Gf256)]) -> Result<()> {
    let mut seen = [false; 256];
    for &(x, _) in points {
        if x.is_zero() {
            return Err(Error::domain("evaluation point must be nonzero"));
        }
        if std::mem::replace(&mut seen[x.0 as usize], true) {
            return Err(Error::domain(format!("duplicate x-coordinate {:#04x}", x.0)));
        }
    }
    Ok(())
}

/// Lagrange basis coefficients at zero for the given abscissae:
/// `f(0) = sum_i coeff[i] * f(xs[i])`.
pub fn lagrange_coefficients_at_zero(xs: &[Gf256]) -> Vec<Gf256> {
    xs.iter()
        .enumerate()
        .map(|(i, &xi)| {
            let mut num = Gf256::ONE;
            let mut den = Gf256::ONE;
            for (j, &xj) in xs.iter().enumerate() {
                if i != j {
                    num *= xj;
                    den *= xj + xi;
                }
            }
            num / den
        })
        .collect()
}

/// Value at zero of the degree-at-most-`t` polynomial through the first `t + 1` points.
pub fn lagrange_at_zero(points: &[(Gf256, Gf256)], t: usize) -> Result<Gf256> {
    check_xs(points)?;
    if points.len() < t + 1 {
        return Err(Error::InsufficientShares {
            need: t + 1,
            got: points.len(),
        });
    }
    let used = &points[..=t];
    let xs: Vec<Gf256> = used.iter().map(|p| p.0).collect();
    let coeffs = lagrange_coefficients_at_zero(&xs);
    Ok(used
        .iter()
        .zip(coeffs)
        .fold(Gf256::ZERO, |acc, (&(_, y), c)| acc + c * y))
}

/// Interpolating polynomial through all given points (degree < points.len()).
pub fn interpolate(points: &[(Gf256, Gf256)]) -> Result<Poly> {
    check_xs(points)?;
    let mut result = vec![Gf256::ZERO; points.len()];
    for (i, &(xi, yi)) in points.iter().enumerate() {
        // Basis polynomial prod_{j != i} (x - xj) / (xi - xj).
        let mut basis = vec![Gf256::ONE];
        let mut den = Gf256::ONE;
        for (j, &(xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut next = vec![Gf256::ZERO; basis.len() + 1];
            for (k, &b) in basis.iter().enumerate() {
                next[k] += b * xj;
                next[k + 1] += b;
            }
            basis = next;
            den *= xi + xj;
        }
        let scale = yi / den;
        for (r, b) in result.iter_mut().zip(basis) {
            *r += b * scale;
        }
    }
    Ok(Poly::new(result))
}

/// Solve `m * x = rhs` by Gaussian elimination. Free variables are set to zero.
/// Returns `None` when the system is inconsistent.
fn solve_linear(mut m: Vec<Vec<Gf256>>, mut rhs: Vec<Gf256>, n_vars: usize) -> Option<Vec<Gf256>> {
    let n_eq = m.len();
    let mut pivots = Vec::with_capacity(n_vars);
    let mut row = 0;
    for col in 0..n_vars {
        let Some(p) = (row..n_eq).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        rhs.swap(row, p);
        let inv = m[row][col].inv().ok()?;
        for x in &mut m[row][col..n_vars] {
            *x *= inv;
        }
        rhs[row] *= inv;
        for r in 0..n_eq {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col];
                let pivot = m[row].clone();
                for (x, &v) in m[r][col..n_vars].iter_mut().zip(&pivot[col..n_vars]) {
                    *x += f * v;
                }
                let v = rhs[row];
                rhs[r] += f * v;
            }
        }
        pivots.push(col);
        row += 1;
        if row == n_eq {
            break;
        }
    }
    if rhs[row..].iter().any(|v| !v.is_zero()) {
        return None;
    }
    let mut x = vec![Gf256::ZERO; n_vars];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = rhs[r];
    }
    Some(x)
}

/// Unique-decoding Reed-Solomon: find the degree-at-most-`t` polynomial agreeing
/// with all but at most `v` of the points.
pub fn berlekamp_welch(points: &[(Gf256, Gf256)], t: usize, v: usize) -> Result<Poly> {
    check_xs(points)?;
    let k = points.len();
    let need = t + 2 * v + 1;
    if k < need {
        return Err(Error::InsufficientShares { need, got: k });
    }
    if v == 0 {
        let p = interpolate(&points[..=t])?;
        if points[t + 1..].iter().all(|&(x, y)| p.eval(x) == y) {
            return Ok(p);
        }
        return Err(Error::DecodeFailure(
            "points do not lie on a single polynomial of the stated degree".into(),
        ));
    }

    // Unknowns: e_0..e_{v-1} (E monic of degree v), q_0..q_{t+v}.
    // Equation per point: Q(x) - y * (e_0 + ... + e_{v-1} x^{v-1}) = y * x^v.
    let n_q = t + v + 1;
    let n_vars = v + n_q;
    let mut m = Vec::with_capacity(k);
    let mut rhs = Vec::with_capacity(k);
    for &(x, y) in points {
        let mut eq = Vec::with_capacity(n_vars);
        let mut xp = Gf256::ONE;
        for _ in 0..v {
            eq.push(y * xp);
            xp *= x;
        }
        rhs.push(y * xp);
        let mut xq = Gf256::ONE;
        for _ in 0..n_q {
            eq.push(xq);
            xq *= x;
        }
        m.push(eq);
    }
    let sol = solve_linear(m, rhs, n_vars)
        .ok_or_else(|| Error::DecodeFailure("error-locator system is inconsistent".into()))?;
    let mut e = sol[..v].to_vec();
    e.push(Gf256::ONE);
    let e = Poly::new(e);
    let q = Poly::new(sol[v..].to_vec());
    let (p, r) = q.div_rem(&e)?;
    if r.degree().is_some() || p.degree().is_some_and(|d| d > t) {
        return Err(Error::DecodeFailure(
            "error locator does not divide the product polynomial".into(),
        ));
    }
    let agree = points.iter().filter(|&&(x, y)| p.eval(x) == y).count();
    if agree < k - v {
        return Err(Error::DecodeFailure(format!(
            "candidate agrees with only {agree} of {k} points"
        )));
    }
    Ok(p)
}
