//! Client side of the three-round private lookup: address entries, then the
//! block's TXID list, then the transaction, followed by SPV verification.

use std::collections::BTreeMap;
use std::io::{BufReader, BufWriter};
use std::net::{TcpStream, ToSocketAddrs};
use std::time::{Duration, Instant};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::wire::{
    decode_error, read_frame, write_frame, DbMeta, ErrorCode, Flow, MsgType, Request, Traffic,
    DEFAULT_MAX_FRAME, FRAME_HEADER_LEN,
};
use crate::builder::{AddressEntry, DbId, PeriodPartition, ADDRESS_ENTRY_LEN};
use crate::chain::{spv_verify, validate_header_chain, Address, BlockHeader, ChainValidity, Hash256, Transaction, HEADER_LEN};
use crate::error::{Error, Result};
use crate::manifest::{Manifest, ManifestRecord};
use crate::pir::{
    cpir_decode, cpir_gen_query, itpir_decode, itpir_gen_queries, Backend, CpirResponse, DbKind,
    DbShape, ItPirResponse, Period, PirParams,
};

#[derive(Clone, Debug)]
pub struct ClientConfig {
    pub servers: Vec<String>,
    pub backend: Backend,
    pub params: PirParams,
    pub lwe_dim: usize,
    /// Query randomness; `None` draws from system entropy.
    pub seed: Option<u64>,
    pub max_frame: usize,
    pub io_timeout: Duration,
}

impl ClientConfig {
    /// IT-PIR needs at least `t + 1` servers; C-PIR exactly one; the naive
    /// backend talks to the first reachable server.
    pub fn new(servers: Vec<String>, backend: Backend, t: usize) -> Result<Self> {
        let params = match backend {
            Backend::ItPir => PirParams::honest(servers.len(), t)?,
            _ => PirParams::single_server_baseline(),
        };
        Ok(Self::with_params(servers, backend, params))
    }

    pub fn with_params(servers: Vec<String>, backend: Backend, params: PirParams) -> Self {
        ClientConfig {
            servers,
            backend,
            params,
            lwe_dim: crate::pir::cpir::DEFAULT_LWE_DIM,
            seed: None,
            max_frame: DEFAULT_MAX_FRAME,
            io_timeout: Duration::from_secs(300),
        }
    }
}

/// Cost of one protocol round, summed over all servers.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RoundStats {
    pub rows_fetched: usize,
    /// Query data bytes sent.
    pub upload: u64,
    /// Response data bytes received.
    pub download: u64,
    /// Frame headers and routing fields, both directions.
    pub overhead: u64,
    pub latency: Duration,
}

impl RoundStats {
    pub fn bandwidth(&self) -> u64 {
        self.upload + self.download
    }

    pub fn wire_bytes(&self) -> u64 {
        self.bandwidth() + self.overhead
    }
}

impl std::ops::AddAssign for RoundStats {
    fn add_assign(&mut self, o: RoundStats) {
        self.rows_fetched += o.rows_fetched;
        self.upload += o.upload;
        self.download += o.download;
        self.overhead += o.overhead;
        self.latency += o.latency;
    }
}

/// Outcome for one address entry.
#[derive(Clone, Debug)]
pub struct SpvResult {
    pub entry: AddressEntry,
    pub period: Option<Period>,
    pub tx_bytes: Vec<u8>,
    pub txids: Vec<Hash256>,
    pub verified: bool,
    pub failure: Option<String>,
    pub merkle_round: RoundStats,
    pub tx_round: RoundStats,
}

impl SpvResult {
    pub fn height(&self) -> u32 {
        self.entry.height
    }
}

#[derive(Clone, Debug)]
pub struct PirSpvReport {
    pub address: Address,
    /// Shared by all entries of the address.
    pub address_round: RoundStats,
    pub results: Vec<SpvResult>,
}

impl PirSpvReport {
    pub fn total_bandwidth(&self) -> u64 {
        self.address_round.bandwidth()
            + self
                .results
                .iter()
                .map(|r| r.merkle_round.bandwidth() + r.tx_round.bandwidth())
                .sum::<u64>()
    }

    pub fn all_verified(&self) -> bool {
        self.results.iter().all(|r| r.verified)
    }
}

struct Conn {
    r: BufReader<TcpStream>,
    w: BufWriter<TcpStream>,
}

struct Slot {
    addr: String,
    conn: Option<Conn>,
    traffic: Traffic,
}

impl Slot {
    fn request(&mut self, req: &Request, max_frame: usize) -> Result<Vec<u8>> {
        let conn = self
            .conn
            .as_mut()
            .ok_or_else(|| Error::protocol(format!("server {} is down", self.addr)))?;
        let out = Self::exchange(conn, &mut self.traffic, req, max_frame);
        if matches!(out, Err(Error::Io(_)) | Err(Error::Protocol(_))) {
            // Unusable stream or broken framing: stop talking to this server.
            self.conn = None;
        }
        out
    }

    fn exchange(conn: &mut Conn, traffic: &mut Traffic, req: &Request, max_frame: usize) -> Result<Vec<u8>> {
        let t = req.msg_type();
        let payload = req.encode_payload();
        write_frame(&mut conn.w, t as u8, &payload)?;
        traffic.record_sent(t, req.data_len(), FRAME_HEADER_LEN + payload.len());
        let frame = read_frame(&mut conn.r, max_frame)?
            .ok_or_else(|| Error::Io(std::io::ErrorKind::UnexpectedEof.into()))?;
        if frame.msg_type == MsgType::Error as u8 {
            traffic.record_received(t, 0, frame.wire_len());
            let (code, msg) = decode_error(&frame.payload);
            return Err(match code {
                Some(ErrorCode::NotFound) => Error::NotFound(msg),
                _ => Error::Remote(format!("{code:?}: {msg}")),
            });
        }
        traffic.record_received(t, frame.payload.len(), frame.wire_len());
        if frame.msg_type != t as u8 {
            return Err(Error::protocol(format!(
                "reply type {:#04x} to request {:#04x}",
                frame.msg_type, t as u8
            )));
        }
        Ok(frame.payload)
    }
}

type Tamper = Box<dyn FnMut(&mut Vec<u8>) + Send>;

pub struct ClientSession {
    slots: Vec<Slot>,
    config: ClientConfig,
    rng: ChaCha20Rng,
    shapes: BTreeMap<DbId, DbShape>,
    manifests: BTreeMap<DbId, Manifest>,
    headers: Vec<BlockHeader>,
    partition: Option<PeriodPartition>,
    full_dbs: BTreeMap<DbId, Vec<u8>>,
    tamper: Option<Tamper>,
}

impl ClientSession {
    /// Connect, check server evaluation points, download database shapes and
    /// manifests, and sync headers.
    pub fn connect(config: ClientConfig) -> Result<Self> {
        let n = config.servers.len();
        match config.backend {
            Backend::ItPir if n != config.params.ell => {
                return Err(Error::domain(format!(
                    "{n} servers given for ell={}",
                    config.params.ell
                )))
            }
            Backend::Cpir if n != 1 => return Err(Error::domain("C-PIR talks to exactly one server")),
            _ if n == 0 => return Err(Error::domain("no servers given")),
            _ => {}
        }
        let slots = config
            .servers
            .iter()
            .map(|addr| Slot {
                addr: addr.clone(),
                conn: open(addr, config.io_timeout).ok(),
                traffic: Traffic::default(),
            })
            .collect();
        let rng = match config.seed {
            Some(s) => ChaCha20Rng::seed_from_u64(s),
            None => ChaCha20Rng::from_entropy(),
        };
        let mut s = ClientSession {
            slots,
            config,
            rng,
            shapes: BTreeMap::new(),
            manifests: BTreeMap::new(),
            headers: Vec::new(),
            partition: None,
            full_dbs: BTreeMap::new(),
            tamper: None,
        };
        s.ensure_reachable()?;
        s.load_meta()?;
        s.load_manifests()?;
        s.sync_headers()?;
        Ok(s)
    }

    fn alive(&self) -> usize {
        self.slots.iter().filter(|s| s.conn.is_some()).count()
    }

    fn ensure_reachable(&self) -> Result<()> {
        let need = match self.config.backend {
            Backend::ItPir => self.config.params.min_responses(),
            _ => 1,
        };
        let got = self.alive();
        if got < need {
            return Err(Error::InsufficientShares { need, got });
        }
        Ok(())
    }

    fn load_meta(&mut self) -> Result<()> {
        let max = self.config.max_frame;
        for i in 0..self.slots.len() {
            if self.slots[i].conn.is_none() {
                continue;
            }
            for kind in DbKind::ALL {
                for period in Period::ALL {
                    let Ok(p) = self.slots[i].request(&Request::GetDbMeta { kind, period }, max) else {
                        self.slots[i].conn = None;
                        break;
                    };
                    let m = DbMeta::decode(&p)?;
                    if self.config.backend == Backend::ItPir && m.alpha != self.config.params.alphas[i].0 {
                        return Err(Error::protocol(format!(
                            "server {} answers as alpha {}, expected {}",
                            self.slots[i].addr, m.alpha, self.config.params.alphas[i].0
                        )));
                    }
                    if m.item_unit as usize != kind.item_unit() || m.num_rows == 0 || m.row_width == 0 {
                        return Err(Error::protocol(format!("implausible metadata {m:?}")));
                    }
                    let shape = DbShape::new(m.num_rows as usize, m.row_width as usize);
                    if let Some(prev) = self.shapes.insert((kind, period), shape) {
                        if prev != shape {
                            return Err(Error::protocol(format!("servers disagree on {kind}-{period} shape")));
                        }
                    }
                }
            }
        }
        self.ensure_reachable()
    }

    /// Ask each live server in turn until one answers.
    fn ask_any(&mut self, req: &Request) -> Result<Vec<u8>> {
        let max = self.config.max_frame;
        let mut last = Error::protocol("no live server");
        for slot in self.slots.iter_mut().filter(|s| s.conn.is_some()) {
            match slot.request(req, max) {
                Ok(p) => return Ok(p),
                Err(e @ Error::NotFound(_)) => return Err(e),
                Err(e) => last = e,
            }
        }
        Err(last)
    }

    fn load_manifests(&mut self) -> Result<()> {
        for kind in DbKind::ALL {
            for period in Period::ALL {
                let json = self.ask_any(&Request::GetManifest { kind, period })?;
                let m = Manifest::from_json(kind, period, &json)?;
                m.validate(self.shapes[&(kind, period)])?;
                self.manifests.insert((kind, period), m);
            }
        }
        Ok(())
    }

    /// Fetch headers not yet held and validate the whole chain.
    pub fn sync_headers(&mut self) -> Result<&[BlockHeader]> {
        let raw = self.ask_any(&Request::GetHeaders {
            from_height: self.headers.len() as u32,
        })?;
        if raw.len() % HEADER_LEN != 0 {
            return Err(Error::protocol("header stream is not a whole number of headers"));
        }
        let mut headers = self.headers.clone();
        for chunk in raw.chunks(HEADER_LEN) {
            headers.push(BlockHeader::parse(chunk)?);
        }
        if let ChainValidity::Broken { height, reason } = validate_header_chain(&headers) {
            return Err(Error::Integrity(format!("header chain broken at {height}: {reason}")));
        }
        self.partition = Some(PeriodPartition::for_len(headers.len())?);
        self.headers = headers;
        Ok(&self.headers)
    }

    pub fn headers(&self) -> &[BlockHeader] {
        &self.headers
    }

    pub fn manifest(&self, kind: DbKind, period: Period) -> &Manifest {
        &self.manifests[&(kind, period)]
    }

    pub fn shape(&self, kind: DbKind, period: Period) -> DbShape {
        self.shapes[&(kind, period)]
    }

    pub fn params(&self) -> &PirParams {
        &self.config.params
    }

    pub fn backend(&self) -> Backend {
        self.config.backend
    }

    pub fn live_servers(&self) -> usize {
        self.alive()
    }

    /// Applied to every transaction's bytes right after they are fetched.
    pub fn set_tamper(&mut self, tamper: Option<Tamper>) {
        self.tamper = tamper;
    }

    /// Per-server traffic, in server order.
    pub fn traffic(&self) -> Vec<Traffic> {
        self.slots.iter().map(|s| s.traffic.clone()).collect()
    }

    fn pir_flows(&self) -> (Flow, Flow) {
        let mut sent = Flow::default();
        let mut recv = Flow::default();
        for s in &self.slots {
            for t in [MsgType::PirQuery, MsgType::GetFullDb] {
                sent += s.traffic.sent_of(t);
                recv += s.traffic.received_of(t);
            }
        }
        (sent, recv)
    }

    fn measure<T>(&mut self, f: impl FnOnce(&mut Self) -> Result<(T, usize)>) -> Result<(T, RoundStats)> {
        let (s0, r0) = self.pir_flows();
        let start = Instant::now();
        let (value, rows) = f(self)?;
        let latency = start.elapsed();
        let (s1, r1) = self.pir_flows();
        Ok((
            value,
            RoundStats {
                rows_fetched: rows,
                upload: s1.data - s0.data,
                download: r1.data - r0.data,
                overhead: (s1.overhead - s0.overhead) + (r1.overhead - r0.overhead),
                latency,
            },
        ))
    }

    /// Privately fetch one row with the configured backend.
    pub fn fetch_row(&mut self, kind: DbKind, period: Period, row: usize) -> Result<Vec<u8>> {
        let shape = self.shape(kind, period);
        if row >= shape.num_rows {
            return Err(Error::domain(format!("row {row} out of range for {kind}-{period}")));
        }
        match self.config.backend {
            Backend::ItPir => self.fetch_row_itpir(kind, period, shape, row),
            Backend::Cpir => {
                let (q, state) = cpir_gen_query(row, shape, self.config.lwe_dim, &mut self.rng)?;
                let blob = q.encode();
                let resp = self.ask_any(&Request::PirQuery {
                    kind,
                    period,
                    backend: Backend::Cpir,
                    blob,
                })?;
                cpir_decode(&CpirResponse::decode(&resp)?, &state)
            }
            Backend::Trivial => {
                if !self.full_dbs.contains_key(&(kind, period)) {
                    let all = self.ask_any(&Request::GetFullDb { kind, period })?;
                    if all.len() != shape.total_bytes() {
                        return Err(Error::protocol("full database has the wrong size"));
                    }
                    self.full_dbs.insert((kind, period), all);
                }
                let all = &self.full_dbs[&(kind, period)];
                Ok(all[row * shape.row_width..(row + 1) * shape.row_width].to_vec())
            }
        }
    }

    fn fetch_row_itpir(&mut self, kind: DbKind, period: Period, shape: DbShape, row: usize) -> Result<Vec<u8>> {
        let queries = itpir_gen_queries(row, shape, &self.config.params, &mut self.rng)?;
        let max = self.config.max_frame;
        // Fan out to all servers at once.
        let answers: Vec<Option<Vec<u8>>> = std::thread::scope(|scope| {
            let handles: Vec<_> = self
                .slots
                .iter_mut()
                .zip(queries)
                .map(|(slot, q)| {
                    scope.spawn(move || {
                        slot.conn.as_ref()?;
                        let req = Request::PirQuery {
                            kind,
                            period,
                            backend: Backend::ItPir,
                            blob: q.shares,
                        };
                        slot.request(&req, max).ok()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap_or(None)).collect()
        });
        let responses: Vec<ItPirResponse> = answers
            .into_iter()
            .enumerate()
            .filter_map(|(i, a)| a.map(|data| ItPirResponse { server_index: i, data }))
            .filter(|r| r.data.len() == shape.row_width)
            .collect();
        itpir_decode(&responses, &self.config.params)
    }

    fn fetch_record(&mut self, kind: DbKind, period: Period, r: &ManifestRecord) -> Result<Vec<u8>> {
        let shape = self.shape(kind, period);
        let mut rows = Vec::with_capacity(r.num_rows() * shape.row_width);
        for row in r.row_start..=r.row_end {
            rows.extend_from_slice(&self.fetch_row(kind, period, row)?);
        }
        Ok(r.slice(&rows, shape.row_width, kind.item_unit())?.to_vec())
    }

    /// Round one against a single period. An address with no record in the
    /// period yields no entries and no traffic.
    pub fn query_address_in(&mut self, period: Period, address: &Address) -> Result<(Vec<AddressEntry>, RoundStats)> {
        let Some(rec) = self.manifest(DbKind::Address, period).lookup(&address.to_base58()).copied() else {
            return Ok((Vec::new(), RoundStats::default()));
        };
        self.measure(|s| {
            let bytes = s.fetch_record(DbKind::Address, period, &rec)?;
            let entries = bytes
                .chunks(ADDRESS_ENTRY_LEN)
                .map(AddressEntry::from_bytes)
                .collect::<Result<Vec<_>>>()?;
            if let Some(e) = entries.iter().find(|e| e.address != *address) {
                return Err(Error::Integrity(format!("entry for {} under key {address}", e.address)));
            }
            Ok((entries, rec.num_rows()))
        })
    }

    /// Round one over every period holding the address, oldest entries first.
    pub fn query_address(&mut self, address: &Address) -> Result<(Vec<AddressEntry>, RoundStats)> {
        let mut all = Vec::new();
        let mut stats = RoundStats::default();
        for period in Period::ALL {
            let (entries, s) = self.query_address_in(period, address)?;
            all.extend(entries);
            stats += s;
        }
        all.sort_by_key(AddressEntry::sort_key);
        Ok((all, stats))
    }

    pub fn period_of(&self, height: u32) -> Result<Period> {
        self.partition
            .as_ref()
            .and_then(|p| p.period_of(height as usize))
            .ok_or_else(|| Error::NotFound(format!("height {height} beyond the header chain")))
    }

    pub fn query_merkle_in(&mut self, period: Period, height: u32) -> Result<(Vec<Hash256>, RoundStats)> {
        let rec = *self
            .manifest(DbKind::MerkleTree, period)
            .lookup(&height.to_string())
            .ok_or_else(|| Error::NotFound(format!("height {height} not in the {period} Merkle database")))?;
        self.measure(|s| {
            let bytes = s.fetch_record(DbKind::MerkleTree, period, &rec)?;
            let txids = bytes.chunks(32).map(|c| Hash256(c.try_into().unwrap())).collect();
            Ok((txids, rec.num_rows()))
        })
    }

    /// Round two: the TXID list of the block at `height`.
    pub fn query_merkle(&mut self, height: u32) -> Result<(Vec<Hash256>, RoundStats)> {
        let period = self.period_of(height)?;
        self.query_merkle_in(period, height)
    }

    /// Round three against one period. The fetched bytes must hash to `txid`.
    pub fn query_transaction_in(&mut self, period: Period, txid: &Hash256) -> Result<(Transaction, Vec<u8>, RoundStats)> {
        let rec = *self
            .manifest(DbKind::Transaction, period)
            .lookup(&txid.to_hex())
            .ok_or_else(|| Error::NotFound(format!("txid {txid} not in the {period} transaction database")))?;
        let ((tx, bytes), stats) = self.measure(|s| {
            let mut bytes = s.fetch_record(DbKind::Transaction, period, &rec)?;
            if let Some(t) = s.tamper.as_mut() {
                t(&mut bytes);
            }
            let tx = Transaction::parse(&bytes)
                .map_err(|e| Error::Integrity(format!("fetched transaction {txid} does not parse: {e}")))?;
            Ok(((tx, bytes), rec.num_rows()))
        })?;
        if tx.txid() != *txid {
            return Err(Error::Integrity(format!("fetched bytes hash to {}, not {txid}", tx.txid())));
        }
        Ok((tx, bytes, stats))
    }

    pub fn query_transaction(&mut self, txid: &Hash256) -> Result<(Transaction, Vec<u8>, RoundStats)> {
        let key = txid.to_hex();
        let period = Period::ALL
            .into_iter()
            .find(|&p| self.manifest(DbKind::Transaction, p).lookup(&key).is_some())
            .ok_or_else(|| Error::NotFound(format!("txid {txid} in no transaction database")))?;
        self.query_transaction_in(period, txid)
    }

    /// Rounds two and three plus verification for one entry. Failures are
    /// reported in the result rather than returned.
    pub fn verify_entry(&mut self, entry: &AddressEntry, min_confirmations: usize) -> SpvResult {
        let mut res = SpvResult {
            entry: *entry,
            period: self.period_of(entry.height).ok(),
            tx_bytes: Vec::new(),
            txids: Vec::new(),
            verified: false,
            failure: None,
            merkle_round: RoundStats::default(),
            tx_round: RoundStats::default(),
        };
        let Some(period) = res.period else {
            res.failure = Some(format!("height {} beyond the header chain", entry.height));
            return res;
        };
        match self.query_merkle_in(period, entry.height) {
            Ok((txids, s)) => {
                res.txids = txids;
                res.merkle_round = s;
            }
            Err(e) => {
                res.failure = Some(e.to_string());
                return res;
            }
        }
        let tx = match self.query_transaction_in(period, &entry.txid) {
            Ok((tx, bytes, s)) => {
                res.tx_bytes = bytes;
                res.tx_round = s;
                tx
            }
            Err(e) => {
                res.failure = Some(e.to_string());
                return res;
            }
        };
        let pays = tx
            .outputs
            .get(entry.vout as usize)
            .is_some_and(|o| o.address == entry.address);
        if !pays {
            res.failure = Some(format!("output {} of {} does not pay {}", entry.vout, entry.txid, entry.address));
            return res;
        }
        match spv_verify(&tx, &res.txids, &self.headers, entry.height as usize, min_confirmations) {
            crate::chain::SpvCheck::Verified => res.verified = true,
            crate::chain::SpvCheck::Failed(why) => res.failure = Some(why),
        }
        res
    }

    /// The full protocol for one address.
    pub fn pir_spv(&mut self, address: &Address, min_confirmations: usize) -> Result<PirSpvReport> {
        let (entries, address_round) = self.query_address(address)?;
        let results = entries
            .iter()
            .map(|e| self.verify_entry(e, min_confirmations))
            .collect();
        Ok(PirSpvReport {
            address: *address,
            address_round,
            results,
        })
    }

    /// Fresh query randomness, e.g. between benchmark repetitions.
    pub fn reseed(&mut self, seed: u64) {
        self.rng = ChaCha20Rng::seed_from_u64(seed);
    }

    pub fn random_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

fn open(addr: &str, timeout: Duration) -> Result<Conn> {
    let sock = addr
        .to_socket_addrs()?
        .next()
        .ok_or_else(|| Error::domain(format!("cannot resolve {addr}")))?;
    let stream = TcpStream::connect_timeout(&sock, timeout)?;
    stream.set_nodelay(true)?;
    stream.set_read_timeout(Some(timeout))?;
    stream.set_write_timeout(Some(timeout))?;
    Ok(Conn {
        r: BufReader::new(stream.try_clone()?),
        w: BufWriter::new(stream),
    })
}
