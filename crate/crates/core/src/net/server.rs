//! Threaded TCP server answering manifest, header and PIR requests from one
//! immutable build.

use std::collections::HashMap;
use std::io::{BufReader, BufWriter};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicU8, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;

use super::wire::{
    encode_error, read_frame, write_frame, DbMeta, ErrorCode, Frame, MsgType, Request, Traffic,
    DEFAULT_MAX_FRAME, FRAME_HEADER_LEN,
};
use crate::builder::BuildOutput;
use crate::error::{Error, Result};
use crate::pir::{cpir_compute, itpir_compute_raw, Backend, CpirQuery};

/// Largest LWE dimension a C-PIR query may ask the server to work with.
pub const MAX_LWE_DIM: usize = 4096;

#[derive(Clone, Debug)]
pub struct ServerConfig {
    pub listen: String,
    /// Evaluation point of this server, 1-based.
    pub server_index: u8,
    pub backends: Vec<Backend>,
    pub max_frame: usize,
}

impl ServerConfig {
    pub fn new(listen: impl Into<String>, server_index: u8) -> Self {
        ServerConfig {
            listen: listen.into(),
            server_index,
            backends: vec![Backend::ItPir, Backend::Cpir, Backend::Trivial],
            max_frame: DEFAULT_MAX_FRAME,
        }
    }
}

/// Misbehaviour a test can switch on in a running server.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum Fault {
    None = 0,
    /// Every PIR response is XORed with a fixed mask before sending.
    CorruptPirResponses = 1,
}

struct Shared {
    data: Arc<BuildOutput>,
    config: ServerConfig,
    fault: AtomicU8,
    stopping: AtomicBool,
    next_conn: AtomicU64,
    streams: Mutex<HashMap<u64, TcpStream>>,
    sessions: Mutex<Vec<Arc<Mutex<Traffic>>>>,
}

pub struct ServerHandle {
    addr: SocketAddr,
    shared: Arc<Shared>,
    accept: Option<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn set_fault(&self, fault: Fault) {
        self.shared.fault.store(fault as u8, Ordering::SeqCst);
    }

    /// Traffic of every session so far, in accept order.
    pub fn sessions(&self) -> Vec<Traffic> {
        self.shared
            .sessions
            .lock()
            .unwrap()
            .iter()
            .map(|s| s.lock().unwrap().clone())
            .collect()
    }

    /// Stop accepting and cut every open connection, as a crash would.
    pub fn shutdown(&mut self) {
        if self.shared.stopping.swap(true, Ordering::SeqCst) {
            return;
        }
        for (_, s) in self.shared.streams.lock().unwrap().drain() {
            let _ = s.shutdown(Shutdown::Both);
        }
        // Wake the blocking accept.
        let _ = TcpStream::connect(self.addr);
        if let Some(h) = self.accept.take() {
            let _ = h.join();
        }
    }

    /// Block until the server stops.
    pub fn join(mut self) {
        if let Some(h) = self.accept.take() {
            let _ = h.join();
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.shutdown();
    }
}

pub fn spawn_server(data: Arc<BuildOutput>, config: ServerConfig) -> Result<ServerHandle> {
    if config.server_index == 0 {
        return Err(Error::domain("server index is 1-based"));
    }
    let listener = TcpListener::bind(&config.listen)?;
    let addr = listener.local_addr()?;
    let shared = Arc::new(Shared {
        data,
        config,
        fault: AtomicU8::new(Fault::None as u8),
        stopping: AtomicBool::new(false),
        next_conn: AtomicU64::new(0),
        streams: Mutex::new(HashMap::new()),
        sessions: Mutex::new(Vec::new()),
    });
    let sh = shared.clone();
    let accept = std::thread::spawn(move || {
        for stream in listener.incoming() {
            if sh.stopping.load(Ordering::SeqCst) {
                break;
            }
            let Ok(stream) = stream else { continue };
            let _ = stream.set_nodelay(true);
            let id = sh.next_conn.fetch_add(1, Ordering::SeqCst);
            if let Ok(clone) = stream.try_clone() {
                sh.streams.lock().unwrap().insert(id, clone);
            }
            let traffic = Arc::new(Mutex::new(Traffic::default()));
            sh.sessions.lock().unwrap().push(traffic.clone());
            let sh = sh.clone();
            std::thread::spawn(move || {
                serve_connection(&sh, stream, &traffic);
                sh.streams.lock().unwrap().remove(&id);
            });
        }
    });
    Ok(ServerHandle {
        addr,
        shared,
        accept: Some(accept),
    })
}

fn serve_connection(sh: &Shared, stream: TcpStream, traffic: &Mutex<Traffic>) {
    let Ok(read_half) = stream.try_clone() else { return };
    let mut r = BufReader::new(read_half);
    let mut w = BufWriter::new(stream);
    loop {
        // Oversized frames and I/O errors end the session.
        let frame = match read_frame(&mut r, sh.config.max_frame) {
            Ok(Some(f)) => f,
            _ => return,
        };
        let (reply_type, payload, data_len) = match Request::decode(&frame) {
            Ok(req) => {
                traffic.lock().unwrap().record_received(req.msg_type(), req.data_len(), frame.wire_len());
                match handle(sh, &req) {
                    Ok(p) => {
                        let n = p.len();
                        (req.msg_type(), p, n)
                    }
                    Err((code, msg)) => (MsgType::Error, encode_error(code, &msg), 0),
                }
            }
            Err((code, msg)) => {
                let t = MsgType::from_u8(frame.msg_type).unwrap_or(MsgType::Error);
                traffic.lock().unwrap().record_received(t, frame.payload.len(), frame.wire_len());
                (MsgType::Error, encode_error(code, &msg), 0)
            }
        };
        traffic
            .lock()
            .unwrap()
            .record_sent(reply_type, data_len, FRAME_HEADER_LEN + payload.len());
        if write_frame(&mut w, reply_type as u8, &payload).is_err() {
            return;
        }
    }
}

type Reply = std::result::Result<Vec<u8>, (ErrorCode, String)>;

fn handle(sh: &Shared, req: &Request) -> Reply {
    let data = &sh.data;
    let lookup = |kind, period| {
        data.databases
            .get(&(kind, period))
            .ok_or((ErrorCode::NotFound, format!("no {kind}-{period} database")))
    };
    match req {
        Request::GetManifest { kind, period } => data
            .manifests
            .get(&(*kind, *period))
            .map(|m| m.to_json())
            .ok_or((ErrorCode::NotFound, format!("no {kind}-{period} manifest"))),
        Request::GetHeaders { from_height } => Ok(data
            .headers
            .iter()
            .skip(*from_height as usize)
            .flat_map(|h| h.serialize())
            .collect()),
        Request::GetDbMeta { kind, period } => {
            let db = lookup(*kind, *period)?;
            Ok(DbMeta {
                kind: *kind,
                period: *period,
                row_width: db.row_width() as u32,
                num_rows: db.num_rows() as u32,
                item_unit: kind.item_unit() as u8,
                alpha: sh.config.server_index,
            }
            .encode())
        }
        Request::GetFullDb { kind, period } => {
            if !sh.config.backends.contains(&Backend::Trivial) {
                return Err((ErrorCode::UnsupportedBackend, "full downloads disabled".into()));
            }
            Ok(lookup(*kind, *period)?.payload().to_vec())
        }
        Request::PirQuery { kind, period, backend, blob } => {
            if !sh.config.backends.contains(backend) || *backend == Backend::Trivial {
                return Err((ErrorCode::UnsupportedBackend, format!("{backend} not served by PIR_QUERY")));
            }
            let db = lookup(*kind, *period)?;
            let mut out = match backend {
                Backend::ItPir => {
                    if blob.len() != db.num_rows() {
                        return Err((
                            ErrorCode::QueryLength,
                            format!("query has {} shares, database has {} rows", blob.len(), db.num_rows()),
                        ));
                    }
                    itpir_compute_raw(blob, db).map_err(|e| (ErrorCode::Internal, e.to_string()))?
                }
                _ => {
                    let q = CpirQuery::decode(blob).map_err(|e| (ErrorCode::Malformed, e.to_string()))?;
                    if q.lwe_dim == 0 || q.lwe_dim > MAX_LWE_DIM {
                        return Err((ErrorCode::Malformed, format!("LWE dimension {} unsupported", q.lwe_dim)));
                    }
                    if q.body.len() != db.num_rows() {
                        return Err((
                            ErrorCode::QueryLength,
                            format!("query has {} rows, database has {}", q.body.len(), db.num_rows()),
                        ));
                    }
                    cpir_compute(&q, db)
                        .map_err(|e| (ErrorCode::Internal, e.to_string()))?
                        .encode()
                }
            };
            if sh.fault.load(Ordering::SeqCst) == Fault::CorruptPirResponses as u8 {
                for b in out.iter_mut() {
                    *b ^= 0xA5;
                }
            }
            Ok(out)
        }
    }
}

/// Handy for tests that talk raw frames.
pub fn request_raw(stream: &mut TcpStream, msg_type: u8, payload: &[u8]) -> Result<Frame> {
    write_frame(stream, msg_type, payload)?;
    read_frame(stream, DEFAULT_MAX_FRAME)?.ok_or_else(|| Error::protocol("connection closed"))
}
