//! End-to-end experiments: build and serve the databases, run every
//! protocol over sampled address entries and write the results as CSV.

pub mod costmodel;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::{ChainIndex, DEFAULT_FP_RATE};
use crate::builder::{build_all, AddressEntry, BuildOutput, ADDRESS_ENTRY_LEN};
use crate::chain::json::read_chain;
use crate::chain::synth::{generate_synthetic_chain, SynthConfig};
use crate::chain::{Address, Block};
use crate::error::{Error, Result};
use crate::net::{spawn_server, ClientConfig, ClientSession, ServerConfig, ServerHandle};
use crate::pir::{Backend, DbKind, Period, PirParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Bip37,
    Pir1,
    Pir3,
    Naive,
}

impl Protocol {
    pub const ALL: [Protocol; 4] = [Protocol::Bip37, Protocol::Pir1, Protocol::Pir3, Protocol::Naive];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Bip37 => "bip37",
            Protocol::Pir1 => "pir1",
            Protocol::Pir3 => "pir3",
            Protocol::Naive => "naive",
        }
    }

    fn servers(self) -> usize {
        match self {
            Protocol::Pir3 => 3,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainSource {
    Synthetic(SynthConfig),
    /// Line-delimited JSON chain file.
    File(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampling {
    /// Every address entry equally likely.
    Entries,
    /// Pick an address uniformly, then one of its entries.
    Addresses,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub chain: ChainSource,
    pub periods: Vec<Period>,
    pub protocols: Vec<Protocol>,
    /// Transactions sampled per period and repetition.
    pub samples: usize,
    pub repetitions: usize,
    pub fp_rate: f64,
    /// Privacy level of the multi-server runs.
    pub t: usize,
    pub seed: u64,
    pub sampling: Sampling,
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            chain: ChainSource::Synthetic(SynthConfig::default()),
            periods: Period::ALL.to_vec(),
            protocols: Protocol::ALL.to_vec(),
            samples: 100,
            repetitions: 5,
            fp_rate: DEFAULT_FP_RATE,
            t: 1,
            seed: 1,
            sampling: Sampling::Entries,
            parallel: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 || self.samples == 0 {
            return Err(Error::domain("repetitions and samples must be positive"));
        }
        if self.periods.is_empty() || self.protocols.is_empty() {
            return Err(Error::domain("at least one period and one protocol required"));
        }
        if self.t == 0 || self.t >= 3 {
            return Err(Error::domain("three servers support 1 <= t <= 2"));
        }
        Ok(())
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let c: Self = serde_json::from_slice(&std::fs::read(path)?)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load_chain(&self) -> Result<Vec<Block>> {
        match &self.chain {
            ChainSource::Synthetic(c) => Ok(generate_synthetic_chain(c)?.blocks),
            ChainSource::File(p) => read_chain(std::io::BufReader::new(std::fs::File::open(p)?)),
        }
    }
}

/// Cost of verifying one sampled transaction with one protocol.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub protocol: Protocol,
    pub period: Period,
    #[serde(skip)]
    pub repetition: usize,
    pub txid: String,
    pub bytes: u64,
    #[serde(skip)]
    pub latency_s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CdfRow {
    pub protocol: Protocol,
    pub period: Period,
    pub n_txs: usize,
    pub bytes_mean: f64,
    pub bytes_std: f64,
    pub latency_s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub protocol: Protocol,
    pub period: Period,
    pub samples: usize,
    pub bytes_mean: f64,
    pub bytes_std: f64,
}

#[derive(Clone, Debug, Default)]
pub struct ExperimentOutput {
    pub trials: Vec<TrialRecord>,
    pub cdf: Vec<CdfRow>,
    pub tables: Vec<TableRow>,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Mean and (population) standard deviation per protocol and period.
pub fn report_tables(records: &[TrialRecord]) -> Vec<TableRow> {
    let mut groups: BTreeMap<(Period, Protocol), Vec<f64>> = BTreeMap::new();
    for r in records {
        groups.entry((r.period, r.protocol)).or_default().push(r.bytes as f64);
    }
    groups
        .into_iter()
        .map(|((period, protocol), xs)| {
            let (bytes_mean, bytes_std) = mean_std(&xs);
            TableRow { protocol, period, samples: xs.len(), bytes_mean, bytes_std }
        })
        .collect()
}

pub fn format_tables(rows: &[TableRow]) -> String {
    let mut s = format!("{:<8} {:<8} {:>8} {:>16} {:>16}\n", "period", "protocol", "samples", "mean bytes", "std bytes");
    for r in rows {
        let _ = writeln!(
            s,
            "{:<8} {:<8} {:>8} {:>16.1} {:>16.1}",
            r.period.name(),
            r.protocol.name(),
            r.samples,
            r.bytes_mean,
            r.bytes_std
        );
    }
    s
}

/// Cumulative cost of the first k samples, averaged over repetitions.
pub fn cdf_rows(records: &[TrialRecord]) -> Vec<CdfRow> {
    let mut groups: BTreeMap<(Period, Protocol), BTreeMap<usize, Vec<&TrialRecord>>> = BTreeMap::new();
    for r in records {
        groups.entry((r.period, r.protocol)).or_default().entry(r.repetition).or_default().push(r);
    }
    let mut out = Vec::new();
    for ((period, protocol), reps) in groups {
        let n = reps.values().map(Vec::len).min().unwrap_or(0);
        for k in 1..=n {
            let sums: Vec<f64> = reps.values().map(|v| v[..k].iter().map(|r| r.bytes as f64).sum()).collect();
            let lat: Option<Vec<f64>> = reps
                .values()
                .map(|v| v[..k].iter().map(|r| r.latency_s).sum::<Option<f64>>())
                .collect();
            let (bytes_mean, bytes_std) = mean_std(&sums);
            out.push(CdfRow {
                protocol,
                period,
                n_txs: k,
                bytes_mean,
                bytes_std,
                latency_s: lat.map(|l| mean_std(&l).0),
            });
        }
    }
    out
}

impl ExperimentOutput {
    pub fn write_csvs(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        write_csv(&dir.join("histogram.csv"), &self.trials)?;
        write_csv(&dir.join("cdf.csv"), &self.cdf)?;
        write_csv(&dir.join("tables.csv"), &self.tables)?;
        Ok(())
    }
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.into()))?;
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.into()))?;
    }
    w.flush()?;
    Ok(())
}

/// All address entries of one period, read straight from the database.
pub fn period_entries(build: &BuildOutput, period: Period) -> Result<Vec<AddressEntry>> {
    let db = build.database(DbKind::Address, period);
    let m = build.manifest(DbKind::Address, period);
    let mut out = Vec::new();
    for r in m.records.values() {
        let rows = &db.payload()[r.row_start * db.row_width()..(r.row_end + 1) * db.row_width()];
        for chunk in r.slice(rows, db.row_width(), ADDRESS_ENTRY_LEN)?.chunks(ADDRESS_ENTRY_LEN) {
            out.push(AddressEntry::from_bytes(chunk)?);
        }
    }
    out.sort_by_key(AddressEntry::sort_key);
    Ok(out)
}

/// Draw `n` entries, without replacement while the pool allows it.
pub fn sample_entries<R: Rng>(entries: &[AddressEntry], n: usize, sampling: Sampling, rng: &mut R) -> Vec<AddressEntry> {
    if entries.is_empty() {
        return Vec::new();
    }
    match sampling {
        Sampling::Entries if n <= entries.len() => {
            sample(rng, entries.len(), n).into_iter().map(|i| entries[i]).collect()
        }
        Sampling::Entries => (0..n).map(|_| entries[rng.gen_range(0..entries.len())]).collect(),
        Sampling::Addresses => {
            let mut by_addr: BTreeMap<Address, Vec<AddressEntry>> = BTreeMap::new();
            for e in entries {
                by_addr.entry(e.address).or_default().push(*e);
            }
            let groups: Vec<_> = by_addr.into_values().collect();
            (0..n)
                .map(|_| {
                    let g = &groups[rng.gen_range(0..groups.len())];
                    g[rng.gen_range(0..g.len())]
                })
                .collect()
        }
    }
}

/// One private lookup for a sampled entry in its own period: address
/// round, Merkle round, transaction round. Returns payload bytes and
/// wall-clock time.
pub fn pir_trial(session: &mut ClientSession, period: Period, entry: &AddressEntry) -> Result<(u64, Duration)> {
    let (entries, a) = session.query_address_in(period, &entry.address)?;
    if !entries.contains(entry) {
        return Err(Error::Integrity(format!("entry {}:{} not returned", entry.txid, entry.vout)));
    }
    let res = session.verify_entry(entry, 0);
    if !res.verified {
        return Err(Error::Integrity(format!(
            "sampled entry failed verification: {}",
            res.failure.unwrap_or_default()
        )));
    }
    let bytes = a.bandwidth() + res.merkle_round.bandwidth() + res.tx_round.bandwidth();
    Ok((bytes, a.latency + res.merkle_round.latency + res.tx_round.latency))
}

pub struct Deployment {
    pub build: Arc<BuildOutput>,
    pub servers: Vec<ServerHandle>,
}

impl Deployment {
    /// Three local servers with evaluation points 1, 2, 3.
    pub fn local(build: Arc<BuildOutput>) -> Result<Self> {
        let servers = (1..=3u8)
            .map(|i| spawn_server(build.clone(), ServerConfig::new("127.0.0.1:0", i)))
            .collect::<Result<_>>()?;
        Ok(Deployment { build, servers })
    }

    pub fn addrs(&self, n: usize) -> Vec<String> {
        self.servers[..n].iter().map(|s| s.addr().to_string()).collect()
    }

    pub fn session(&self, protocol: Protocol, t: usize, seed: u64) -> Result<ClientSession> {
        let params = match protocol {
            Protocol::Pir3 => PirParams::honest(3, t)?,
            _ => PirParams::single_server_baseline(),
        };
        let mut cfg = ClientConfig::with_params(self.addrs(protocol.servers()), Backend::ItPir, params);
        cfg.seed = Some(seed);
        ClientSession::connect(cfg)
    }
}

fn run_pir_trials(
    dep: &Deployment,
    protocol: Protocol,
    period: Period,
    sampled: &[AddressEntry],
    config: &ExperimentConfig,
    seed: u64,
) -> Result<Vec<(u64, Duration)>> {
    let workers = if config.parallel {
        std::thread::available_parallelism().map_or(1, |n| n.get()).min(sampled.len()).max(1)
    } else {
        1
    };
    let chunk = sampled.len().div_ceil(workers);
    std::thread::scope(|scope| {
        let handles: Vec<_> = sampled
            .chunks(chunk.max(1))
            .enumerate()
            .map(|(w, part)| {
                scope.spawn(move || -> Result<Vec<(u64, Duration)>> {
                    let mut s = dep.session(protocol, config.t, seed.wrapping_add(w as u64))?;
                    part.iter().map(|e| pir_trial(&mut s, period, e)).collect()
                })
            })
            .collect();
        let mut out = Vec::with_capacity(sampled.len());
        for h in handles {
            out.extend(h.join().map_err(|_| Error::protocol("trial worker panicked"))??);
        }
        Ok(out)
    })
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let blocks = config.load_chain()?;
    let build = Arc::new(build_all(&blocks)?);
    let index = ChainIndex::new(&blocks);
    let needs_servers = config.protocols.iter().any(|p| matches!(p, Protocol::Pir1 | Protocol::Pir3));
    let dep = if needs_servers { Some(Deployment::local(build.clone())?) } else { None };

    let mut trials = Vec::new();
    for &period in &config.periods {
        let entries = period_entries(&build, period)?;
        for rep in 0..config.repetitions {
            let rep_seed = config.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(rep as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(rep_seed ^ period.code() as u64);
            let sampled = sample_entries(&entries, config.samples, config.sampling, &mut rng);
            let tweaks: Vec<u32> = sampled.iter().map(|_| rng.gen()).collect();
            for &protocol in &config.protocols {
                let costs: Vec<(u64, Option<f64>)> = match protocol {
                    Protocol::Naive => sampled
                        .iter()
                        .map(|e| Ok((index.naive_bandwidth(&e.txid)?, None)))
                        .collect::<Result<_>>()?,
                    Protocol::Bip37 => sampled
                        .iter()
                        .zip(&tweaks)
                        .map(|(e, &tw)| Ok((index.bip37_bandwidth(&e.txid, config.fp_rate, tw)?, None)))
                        .collect::<Result<_>>()?,
                    Protocol::Pir1 | Protocol::Pir3 => {
                        let dep = dep.as_ref().expect("servers spawned for PIR protocols");
                        run_pir_trials(dep, protocol, period, &sampled, config, rep_seed)?
                            .into_iter()
                            .map(|(b, d)| (b, Some(d.as_secs_f64())))
                            .collect()
                    }
                };
                trials.extend(sampled.iter().zip(costs).map(|(e, (bytes, latency_s))| TrialRecord {
                    protocol,
                    period,
                    repetition: rep,
                    txid: e.txid.to_hex(),
                    bytes,
                    latency_s,
                }));
            }
        }
    }
    let tables = report_tables(&trials);
    let cdf = cdf_rows(&trials);
    Ok(ExperimentOutput { trials, cdf, tables })
}
