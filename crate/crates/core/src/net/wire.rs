//! Length-prefixed binary frames:
//!
//! ```text
//! u32le payload_len | u8 type | payload
//! ```
//!
//! Requests and their responses share a type byte; failures come back as
//! type 0xFF carrying `u8 code | utf8 message`.

use std::collections::BTreeMap;
use std::io::{self, Read, Write};

use crate::error::{Error, Result};
use crate::pir::{Backend, DbKind, Period};

pub const FRAME_HEADER_LEN: usize = 5;
pub const DEFAULT_MAX_FRAME: usize = 64 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum MsgType {
    GetManifest = 0x01,
    GetHeaders = 0x02,
    PirQuery = 0x03,
    GetDbMeta = 0x04,
    GetFullDb = 0x05,
    Error = 0xFF,
}

impl MsgType {
    pub const ALL: [MsgType; 6] = [
        MsgType::GetManifest,
        MsgType::GetHeaders,
        MsgType::PirQuery,
        MsgType::GetDbMeta,
        MsgType::GetFullDb,
        MsgType::Error,
    ];

    pub fn from_u8(b: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|t| *t as u8 == b)
    }

    pub fn name(self) -> &'static str {
        match self {
            MsgType::GetManifest => "get_manifest",
            MsgType::GetHeaders => "get_headers",
            MsgType::PirQuery => "pir_query",
            MsgType::GetDbMeta => "get_db_meta",
            MsgType::GetFullDb => "get_full_db",
            MsgType::Error => "error",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum ErrorCode {
    UnknownType = 1,
    Malformed = 2,
    NotFound = 3,
    QueryLength = 4,
    UnsupportedBackend = 5,
    Internal = 6,
}

impl ErrorCode {
    pub fn from_u8(b: u8) -> Option<Self> {
        use ErrorCode::*;
        [UnknownType, Malformed, NotFound, QueryLength, UnsupportedBackend, Internal]
            .into_iter()
            .find(|c| *c as u8 == b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub msg_type: u8,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn wire_len(&self) -> usize {
        FRAME_HEADER_LEN + self.payload.len()
    }
}

pub fn write_frame<W: Write>(w: &mut W, msg_type: u8, payload: &[u8]) -> io::Result<()> {
    let len = u32::try_from(payload.len())
        .map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "payload exceeds u32"))?;
    let mut head = [0u8; FRAME_HEADER_LEN];
    head[..4].copy_from_slice(&len.to_le_bytes());
    head[4] = msg_type;
    w.write_all(&head)?;
    w.write_all(payload)?;
    w.flush()
}

/// Read one frame. `Ok(None)` on a clean end of stream before any header byte.
/// Frames above `max_payload` are a protocol error; the caller should drop
/// the connection since the stream position is lost.
pub fn read_frame<R: Read>(r: &mut R, max_payload: usize) -> Result<Option<Frame>> {
    let mut head = [0u8; FRAME_HEADER_LEN];
    let mut got = 0;
    while got < FRAME_HEADER_LEN {
        match r.read(&mut head[got..]) {
            Ok(0) if got == 0 => return Ok(None),
            Ok(0) => return Err(Error::Io(io::ErrorKind::UnexpectedEof.into())),
            Ok(n) => got += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e.into()),
        }
    }
    let len = u32::from_le_bytes(head[..4].try_into().unwrap()) as usize;
    if len > max_payload {
        return Err(Error::protocol(format!("frame of {len} bytes exceeds limit {max_payload}")));
    }
    let mut payload = vec![0u8; len];
    r.read_exact(&mut payload)?;
    Ok(Some(Frame {
        msg_type: head[4],
        payload,
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Request {
    GetManifest { kind: DbKind, period: Period },
    GetHeaders { from_height: u32 },
    PirQuery { kind: DbKind, period: Period, backend: Backend, blob: Vec<u8> },
    GetDbMeta { kind: DbKind, period: Period },
    GetFullDb { kind: DbKind, period: Period },
}

/// Bytes in front of the query blob of a PIR_QUERY payload.
pub const PIR_QUERY_PREFIX_LEN: usize = 3;

impl Request {
    pub fn msg_type(&self) -> MsgType {
        match self {
            Request::GetManifest { .. } => MsgType::GetManifest,
            Request::GetHeaders { .. } => MsgType::GetHeaders,
            Request::PirQuery { .. } => MsgType::PirQuery,
            Request::GetDbMeta { .. } => MsgType::GetDbMeta,
            Request::GetFullDb { .. } => MsgType::GetFullDb,
        }
    }

    pub fn encode_payload(&self) -> Vec<u8> {
        match self {
            Request::GetManifest { kind, period }
            | Request::GetDbMeta { kind, period }
            | Request::GetFullDb { kind, period } => vec![kind.code(), period.code()],
            Request::GetHeaders { from_height } => from_height.to_le_bytes().to_vec(),
            Request::PirQuery { kind, period, backend, blob } => {
                let mut out = Vec::with_capacity(PIR_QUERY_PREFIX_LEN + blob.len());
                out.extend_from_slice(&[kind.code(), period.code(), backend.code()]);
                out.extend_from_slice(blob);
                out
            }
        }
    }

    /// Bytes of the payload that carry query data rather than routing fields.
    pub fn data_len(&self) -> usize {
        match self {
            Request::PirQuery { blob, .. } => blob.len(),
            other => other.encode_payload().len(),
        }
    }

    pub fn decode(frame: &Frame) -> std::result::Result<Self, (ErrorCode, String)> {
        let t = MsgType::from_u8(frame.msg_type)
            .filter(|t| *t != MsgType::Error)
            .ok_or((ErrorCode::UnknownType, format!("unknown message type {:#04x}", frame.msg_type)))?;
        let p = &frame.payload;
        let malformed = |m: &str| (ErrorCode::Malformed, m.to_string());
        let db_id = |p: &[u8]| -> std::result::Result<(DbKind, Period), (ErrorCode, String)> {
            if p.len() < 2 {
                return Err((ErrorCode::Malformed, "missing kind/period".into()));
            }
            let kind = DbKind::from_code(p[0]).map_err(|e| (ErrorCode::Malformed, e.to_string()))?;
            let period = Period::from_code(p[1]).map_err(|e| (ErrorCode::Malformed, e.to_string()))?;
            Ok((kind, period))
        };
        Ok(match t {
            MsgType::GetHeaders => {
                let b: [u8; 4] = p[..].try_into().map_err(|_| malformed("GET_HEADERS takes a u32"))?;
                Request::GetHeaders { from_height: u32::from_le_bytes(b) }
            }
            MsgType::PirQuery => {
                if p.len() < PIR_QUERY_PREFIX_LEN {
                    return Err(malformed("PIR_QUERY too short"));
                }
                let (kind, period) = db_id(p)?;
                let backend = Backend::from_code(p[2])
                    .map_err(|e| (ErrorCode::UnsupportedBackend, e.to_string()))?;
                Request::PirQuery { kind, period, backend, blob: p[PIR_QUERY_PREFIX_LEN..].to_vec() }
            }
            _ => {
                if p.len() != 2 {
                    return Err(malformed("expected kind and period only"));
                }
                let (kind, period) = db_id(p)?;
                match t {
                    MsgType::GetManifest => Request::GetManifest { kind, period },
                    MsgType::GetDbMeta => Request::GetDbMeta { kind, period },
                    _ => Request::GetFullDb { kind, period },
                }
            }
        })
    }
}

/// Reply to GET_DB_META.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DbMeta {
    pub kind: DbKind,
    pub period: Period,
    pub row_width: u32,
    pub num_rows: u32,
    pub item_unit: u8,
    /// Evaluation point of the answering server.
    pub alpha: u8,
}

pub const DB_META_LEN: usize = 12;

impl DbMeta {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(DB_META_LEN);
        out.extend_from_slice(&[self.kind.code(), self.period.code()]);
        out.extend_from_slice(&self.row_width.to_le_bytes());
        out.extend_from_slice(&self.num_rows.to_le_bytes());
        out.extend_from_slice(&[self.item_unit, self.alpha]);
        out
    }

    pub fn decode(p: &[u8]) -> Result<Self> {
        if p.len() != DB_META_LEN {
            return Err(Error::protocol(format!("DB meta must be {DB_META_LEN} bytes")));
        }
        Ok(DbMeta {
            kind: DbKind::from_code(p[0])?,
            period: Period::from_code(p[1])?,
            row_width: u32::from_le_bytes(p[2..6].try_into().unwrap()),
            num_rows: u32::from_le_bytes(p[6..10].try_into().unwrap()),
            item_unit: p[10],
            alpha: p[11],
        })
    }
}

pub fn encode_error(code: ErrorCode, msg: &str) -> Vec<u8> {
    let mut out = vec![code as u8];
    out.extend_from_slice(msg.as_bytes());
    out
}

pub fn decode_error(p: &[u8]) -> (Option<ErrorCode>, String) {
    match p.split_first() {
        Some((&c, rest)) => (ErrorCode::from_u8(c), String::from_utf8_lossy(rest).into_owned()),
        None => (None, String::new()),
    }
}

/// Byte counters for one message type in one direction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Flow {
    pub frames: u64,
    /// Query or response data proper.
    pub data: u64,
    /// Frame headers plus routing fields.
    pub overhead: u64,
}

impl Flow {
    pub fn total(&self) -> u64 {
        self.data + self.overhead
    }

    fn add(&mut self, data: usize, wire: usize) {
        self.frames += 1;
        self.data += data as u64;
        self.overhead += (wire - data) as u64;
    }
}

impl std::ops::AddAssign for Flow {
    fn add_assign(&mut self, o: Flow) {
        self.frames += o.frames;
        self.data += o.data;
        self.overhead += o.overhead;
    }
}

/// Per-message-type traffic of one session, seen from one end.
/// Responses are booked under the type of the request they answer.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Traffic {
    pub sent: BTreeMap<MsgType, Flow>,
    pub received: BTreeMap<MsgType, Flow>,
}

impl Traffic {
    pub fn record_sent(&mut self, t: MsgType, data: usize, wire: usize) {
        self.sent.entry(t).or_default().add(data, wire);
    }

    pub fn record_received(&mut self, t: MsgType, data: usize, wire: usize) {
        self.received.entry(t).or_default().add(data, wire);
    }

    pub fn sent_of(&self, t: MsgType) -> Flow {
        self.sent.get(&t).copied().unwrap_or_default()
    }

    pub fn received_of(&self, t: MsgType) -> Flow {
        self.received.get(&t).copied().unwrap_or_default()
    }

    pub fn merge(&mut self, other: &Traffic) {
        for (t, f) in &other.sent {
            *self.sent.entry(*t).or_default() += *f;
        }
        for (t, f) in &other.received {
            *self.received.entry(*t).or_default() += *f;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(req: Request) {
        let frame = Frame { msg_type: req.msg_type() as u8, payload: req.encode_payload() };
        let mut buf = Vec::new();
        write_frame(&mut buf, frame.msg_type, &frame.payload).unwrap();
        assert_eq!(buf.len(), frame.wire_len());
        let back = read_frame(&mut &buf[..], DEFAULT_MAX_FRAME).unwrap().unwrap();
        assert_eq!(back, frame);
        assert_eq!(Request::decode(&back).unwrap(), req);
    }

    #[test]
    fn requests_roundtrip() {
        roundtrip(Request::GetManifest { kind: DbKind::Address, period: Period::Weekly });
        roundtrip(Request::GetHeaders { from_height: 77 });
        roundtrip(Request::PirQuery {
            kind: DbKind::Transaction,
            period: Period::AllTime,
            backend: Backend::Cpir,
            blob: vec![1, 2, 3],
        });
        roundtrip(Request::GetDbMeta { kind: DbKind::MerkleTree, period: Period::Monthly });
        roundtrip(Request::GetFullDb { kind: DbKind::MerkleTree, period: Period::Weekly });
    }

    #[test]
    fn frame_layout() {
        let mut buf = Vec::new();
        write_frame(&mut buf, 0x04, &[0, 1]).unwrap();
        assert_eq!(buf, [2, 0, 0, 0, 4, 0, 1]);
    }

    #[test]
    fn bad_frames() {
        let mut buf = Vec::new();
        write_frame(&mut buf, 0x01, &[0; 10]).unwrap();
        assert!(matches!(read_frame(&mut &buf[..], 9), Err(Error::Protocol(_))));
        assert!(read_frame(&mut &buf[..7], 100).is_err());
        assert!(read_frame(&mut &[][..], 100).unwrap().is_none());
        let f = |t: u8, p: &[u8]| Request::decode(&Frame { msg_type: t, payload: p.to_vec() });
        assert_eq!(f(0x42, &[]).unwrap_err().0, ErrorCode::UnknownType);
        assert_eq!(f(0xFF, &[]).unwrap_err().0, ErrorCode::UnknownType);
        assert_eq!(f(0x01, &[0]).unwrap_err().0, ErrorCode::Malformed);
        assert_eq!(f(0x01, &[9, 0]).unwrap_err().0, ErrorCode::Malformed);
        assert_eq!(f(0x03, &[0, 0, 7, 1]).unwrap_err().0, ErrorCode::UnsupportedBackend);
    }

    #[test]
    fn meta_and_error_codecs() {
        let m = DbMeta {
            kind: DbKind::Address,
            period: Period::Weekly,
            row_width: 7688,
            num_rows: 7688,
            item_unit: 62,
            alpha: 2,
        };
        assert_eq!(DbMeta::decode(&m.encode()).unwrap(), m);
        let e = encode_error(ErrorCode::QueryLength, "bad");
        assert_eq!(decode_error(&e), (Some(ErrorCode::QueryLength), "bad".to_string()));
    }

    #[test]
    fn pir_query_accounting_splits_prefix() {
        let r = Request::PirQuery {
            kind: DbKind::Address,
            period: Period::Weekly,
            backend: Backend::ItPir,
            blob: vec![0; 40],
        };
        assert_eq!(r.data_len(), 40);
        let mut t = Traffic::default();
        t.record_sent(MsgType::PirQuery, r.data_len(), FRAME_HEADER_LEN + r.encode_payload().len());
        assert_eq!(t.sent_of(MsgType::PirQuery), Flow { frames: 1, data: 40, overhead: 8 });
    }
}
