//! C interface to the PIR-SPV library.
//!
//! Objects are opaque handles created by `*_new`/`*_open` functions and
//! released with the matching `*_free`. Every fallible call returns a
//! [`PirspvStatus`]; the message of the most recent failure on the calling
//! thread is available through [`pirspv_last_error`].
//!
//! Database kinds are coded 0 (address), 1 (Merkle) and 2 (transaction);
//! periods 0 (weekly), 1 (monthly) and 2 (all-time).

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use pirspv::chain::Address;
use pirspv::manifest::Manifest;
use pirspv::net::{ClientConfig, ClientSession};
use pirspv::pir::{itpir_compute_raw, itpir_decode, itpir_gen_queries, Backend, DbKind, ItPirResponse, Period, PirDatabase, PirParams};
use pirspv::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PirspvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InsufficientShares = 3,
    DecodeFailure = 4,
    Protocol = 5,
    Parse = 6,
    Integrity = 7,
    NotFound = 8,
    Io = 9,
    BufferTooSmall = 10,
    Internal = 11,
}

/// A PIR database loaded into memory.
pub struct PirspvDatabase(PirDatabase);

/// A key to rectangle index for one database.
pub struct PirspvManifest(Manifest);

/// Multi-server IT-PIR parameters.
pub struct PirspvParams(PirParams);

/// A connected client session.
pub struct PirspvClient(ClientSession);

/// Outcome of a full lookup for one address.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct PirspvSpvSummary {
    pub entries: usize,
    pub verified: usize,
    /// Query plus response bytes over all rounds and servers.
    pub bandwidth: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> PirspvStatus {
    match e {
        Error::Domain(_) | Error::Build(_) => PirspvStatus::InvalidArgument,
        Error::InsufficientShares { .. } => PirspvStatus::InsufficientShares,
        Error::DecodeFailure(_) => PirspvStatus::DecodeFailure,
        Error::Protocol(_) | Error::Remote(_) => PirspvStatus::Protocol,
        Error::Parse(_) | Error::Json(_) => PirspvStatus::Parse,
        Error::Integrity(_) => PirspvStatus::Integrity,
        Error::NotFound(_) => PirspvStatus::NotFound,
        Error::Io(_) => PirspvStatus::Io,
    }
}

struct Fail(PirspvStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn fail(status: PirspvStatus, msg: impl Into<String>) -> Fail {
    Fail(status, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PirspvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PirspvStatus::Ok,
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("panic inside the library".into());
            PirspvStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(fail(PirspvStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(PirspvStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn bytes_arg<'a>(p: *const u8, len: usize, what: &str) -> Result<&'a [u8], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(PirspvStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_buf<'a>(p: *mut u8, cap: usize, need: usize, what: &str) -> Result<&'a mut [u8], Fail> {
    if cap < need {
        return Err(fail(PirspvStatus::BufferTooSmall, format!("{what} needs {need} bytes, got {cap}")));
    }
    if need == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(fail(PirspvStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts_mut(p, need))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| fail(PirspvStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(fail(PirspvStatus::NullPointer, "output pointer is null"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn kind_period(kind: u8, period: u8) -> Result<(DbKind, Period), Fail> {
    Ok((DbKind::from_code(kind)?, Period::from_code(period)?))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pirspv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to fit). Returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or point to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn pirspv_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Load a `.pirdb` file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pirspv_db_open(path: *const c_char, out: *mut *mut PirspvDatabase) -> PirspvStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let file = std::fs::File::open(Path::new(path)).map_err(Error::from)?;
        let db = PirDatabase::read_from(std::io::BufReader::new(file))?;
        put(out, PirspvDatabase(db))
    })
}

/// Wrap a row-major payload as a database.
///
/// # Safety
/// `payload` must point to `num_rows * row_width` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pirspv_db_from_rows(
    kind: u8,
    period: u8,
    num_rows: usize,
    row_width: usize,
    payload: *const u8,
    out: *mut *mut PirspvDatabase,
) -> PirspvStatus {
    guard(|| {
        let (kind, period) = kind_period(kind, period)?;
        let len = num_rows
            .checked_mul(row_width)
            .ok_or_else(|| fail(PirspvStatus::InvalidArgument, "database size overflows"))?;
        let bytes = bytes_arg(payload, len, "payload")?;
        let db = PirDatabase::new(kind, period, num_rows, row_width, bytes.to_vec())?;
        put(out, PirspvDatabase(db))
    })
}

/// # Safety
/// `db` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn pirspv_db_num_rows(db: *const PirspvDatabase) -> usize {
    db.as_ref().map_or(0, |d| d.0.num_rows())
}

/// # Safety
/// `db` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn pirspv_db_row_width(db: *const PirspvDatabase) -> usize {
    db.as_ref().map_or(0, |d| d.0.row_width())
}

/// # Safety
/// `db` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pirspv_db_free(db: *mut PirspvDatabase) {
    if !db.is_null() {
        drop(Box::from_raw(db));
    }
}

/// Parse a manifest JSON document.
///
/// # Safety
/// `json` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pirspv_manifest_parse(
    kind: u8,
    period: u8,
    json: *const u8,
    len: usize,
    out: *mut *mut PirspvManifest,
) -> PirspvStatus {
    guard(|| {
        let (kind, period) = kind_period(kind, period)?;
        let m = Manifest::from_json(kind, period, bytes_arg(json, len, "json")?)?;
        put(out, PirspvManifest(m))
    })
}

/// Look up `key`; on success writes row_start, row_end, col_start, col_end
/// into `rect`. A missing key yields `PIRSPV_STATUS_NOT_FOUND`.
///
/// # Safety
/// `m` must be a live handle, `key` NUL-terminated and `rect` point to 4 writable `size_t`s.
#[no_mangle]
pub unsafe extern "C" fn pirspv_manifest_lookup(
    m: *const PirspvManifest,
    key: *const c_char,
    rect: *mut usize,
) -> PirspvStatus {
    guard(|| {
        let m = handle(m, "manifest")?;
        let key = str_arg(key, "key")?;
        if rect.is_null() {
            return Err(fail(PirspvStatus::NullPointer, "rect is null"));
        }
        let r = m.0.lookup(key).ok_or_else(|| fail(PirspvStatus::NotFound, format!("no record for {key}")))?;
        let out = std::slice::from_raw_parts_mut(rect, 4);
        out.copy_from_slice(&[r.row_start, r.row_end, r.col_start, r.col_end]);
        Ok(())
    })
}

/// # Safety
/// `m` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn pirspv_manifest_len(m: *const PirspvManifest) -> usize {
    m.as_ref().map_or(0, |m| m.0.len())
}

/// # Safety
/// `m` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pirspv_manifest_free(m: *mut PirspvManifest) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Parameters for `ell` servers at evaluation points 1..=ell, privacy `t`,
/// `k` expected responses and Byzantine budget `v`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pirspv_params_new(
    ell: usize,
    t: usize,
    k: usize,
    v: usize,
    out: *mut *mut PirspvParams,
) -> PirspvStatus {
    guard(|| put(out, PirspvParams(PirParams::new(ell, t, k, v)?)))
}

/// # Safety
/// `p` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pirspv_params_free(p: *mut PirspvParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Queries for `row` of a `num_rows`-row database. Server `s` gets bytes
/// `[s * num_rows, (s + 1) * num_rows)` of `out`, which must hold
/// `ell * num_rows` bytes.
///
/// # Safety
/// `params` must be a live handle; `out` must point to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn pirspv_itpir_gen_queries(
    params: *const PirspvParams,
    num_rows: usize,
    row: usize,
    seed: u64,
    out: *mut u8,
    cap: usize,
) -> PirspvStatus {
    guard(|| {
        let p = &handle(params, "params")?.0;
        let shape = pirspv::pir::DbShape::new(num_rows, 1);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let qs = itpir_gen_queries(row, shape, p, &mut rng)?;
        let buf = out_buf(out, cap, p.ell * num_rows, "out")?;
        for (chunk, q) in buf.chunks_mut(num_rows.max(1)).zip(&qs) {
            chunk.copy_from_slice(&q.shares);
        }
        Ok(())
    })
}

/// Server side: multiply one query into the database. `out` receives
/// `row_width` bytes.
///
/// # Safety
/// `db` must be a live handle; `shares` must point to `len` bytes and
/// `out` to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn pirspv_itpir_compute(
    db: *const PirspvDatabase,
    shares: *const u8,
    len: usize,
    out: *mut u8,
    cap: usize,
) -> PirspvStatus {
    guard(|| {
        let db = &handle(db, "db")?.0;
        let resp = itpir_compute_raw(bytes_arg(shares, len, "shares")?, db)?;
        out_buf(out, cap, resp.len(), "out")?.copy_from_slice(&resp);
        Ok(())
    })
}

/// Reconstruct a row from `n` responses of `width` bytes each, stored back
/// to back in `responses`. `servers[i]` is the 0-based server index that
/// produced response `i`.
///
/// # Safety
/// `params` must be a live handle; `servers` must hold `n` entries,
/// `responses` `n * width` bytes and `out` `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn pirspv_itpir_decode(
    params: *const PirspvParams,
    servers: *const usize,
    responses: *const u8,
    n: usize,
    width: usize,
    out: *mut u8,
    cap: usize,
) -> PirspvStatus {
    guard(|| {
        let p = &handle(params, "params")?.0;
        if n > 0 && servers.is_null() {
            return Err(fail(PirspvStatus::NullPointer, "servers is null"));
        }
        let idx: &[usize] = if n == 0 { &[] } else { std::slice::from_raw_parts(servers, n) };
        let total = n
            .checked_mul(width)
            .ok_or_else(|| fail(PirspvStatus::InvalidArgument, "response size overflows"))?;
        let data = bytes_arg(responses, total, "responses")?;
        let rs: Vec<ItPirResponse> = idx
            .iter()
            .zip(data.chunks(width.max(1)))
            .map(|(&s, d)| ItPirResponse { server_index: s, data: d.to_vec() })
            .collect();
        let row = itpir_decode(&rs, p)?;
        out_buf(out, cap, row.len(), "out")?.copy_from_slice(&row);
        Ok(())
    })
}

/// Connect to a comma-separated server list. `backend` is 0 for IT-PIR,
/// 1 for C-PIR and 2 for whole-database download.
///
/// # Safety
/// `servers` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pirspv_client_connect(
    servers: *const c_char,
    backend: u8,
    t: usize,
    seed: u64,
    out: *mut *mut PirspvClient,
) -> PirspvStatus {
    guard(|| {
        let list: Vec<String> = str_arg(servers, "servers")?.split(',').map(|s| s.trim().to_string()).collect();
        let mut cfg = ClientConfig::new(list, Backend::from_code(backend)?, t)?;
        cfg.seed = Some(seed);
        put(out, PirspvClient(ClientSession::connect(cfg)?))
    })
}

/// Run the three-round lookup for a base58 address and summarise it.
///
/// # Safety
/// `client` must be a live handle, `address` NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pirspv_client_lookup(
    client: *mut PirspvClient,
    address: *const c_char,
    min_confirmations: usize,
    out: *mut PirspvSpvSummary,
) -> PirspvStatus {
    guard(|| {
        let c = client.as_mut().ok_or_else(|| fail(PirspvStatus::NullPointer, "client is null"))?;
        let addr = Address::from_base58(str_arg(address, "address")?)?;
        if out.is_null() {
            return Err(fail(PirspvStatus::NullPointer, "out is null"));
        }
        let rep = c.0.pir_spv(&addr, min_confirmations)?;
        *out = PirspvSpvSummary {
            entries: rep.results.len(),
            verified: rep.results.iter().filter(|r| r.verified).count(),
            bandwidth: rep.total_bandwidth(),
        };
        Ok(())
    })
}

/// # Safety
/// `client` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pirspv_client_free(client: *mut PirspvClient) {
    if !client.is_null() {
        drop(Box::from_raw(client));
    }
}
