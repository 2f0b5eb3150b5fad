use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde::Serialize;

use pirspv::bench::costmodel::reported_cost_table;
use pirspv::bench::{format_tables, run_experiment, ExperimentConfig};
use pirspv::builder::{build_all, BuildOutput};
use pirspv::chain::json::{read_chain, write_chain};
use pirspv::chain::spv::DEFAULT_MIN_CONFIRMATIONS;
use pirspv::chain::{generate_synthetic_chain, Address, SynthConfig};
use pirspv::net::{spawn_server, ClientConfig, ClientSession, RoundStats, ServerConfig};
use pirspv::pir::Backend;
use pirspv::Result;

#[derive(Parser)]
#[command(name = "pirspv", version, about = "Private SPV over PIR databases")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic chain as line-delimited JSON.
    GenChain {
        #[arg(long, default_value_t = 1008)]
        blocks: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        addresses: usize,
        /// Full generator settings as JSON; overrides the flags above.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the nine databases, manifests and header file from a chain.
    Build {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Serve a built data directory.
    Serve {
        #[arg(long)]
        data_dir: PathBuf,
        #[arg(long, default_value = "127.0.0.1:7700")]
        listen: String,
        /// 1-based; also the server's evaluation point.
        #[arg(long)]
        server_index: u8,
    },
    /// Privately look up and verify every unspent output of an address.
    Query {
        #[arg(long, value_delimiter = ',', required = true)]
        servers: Vec<String>,
        #[arg(long, default_value_t = 1)]
        t: usize,
        #[arg(long, default_value = "itpir")]
        backend: Backend,
        #[arg(long)]
        address: String,
        #[arg(long, default_value_t = DEFAULT_MIN_CONFIRMATIONS)]
        min_conf: usize,
        #[arg(long)]
        stats_out: Option<PathBuf>,
        /// Seed for query randomness; system entropy when absent.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a benchmark described by a JSON config.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        parallel: bool,
    },
    /// Print analytic IT-PIR lookup costs for the reported mainnet dimensions.
    CostModel,
}

#[derive(Serialize)]
struct StatsRow<'a> {
    round: &'a str,
    txid: String,
    rows: usize,
    upload: u64,
    download: u64,
    overhead: u64,
    latency_s: f64,
}

impl<'a> StatsRow<'a> {
    fn new(round: &'a str, txid: String, s: &RoundStats) -> Self {
        StatsRow {
            round,
            txid,
            rows: s.rows_fetched,
            upload: s.upload,
            download: s.download,
            overhead: s.overhead,
            latency_s: s.latency.as_secs_f64(),
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::GenChain { blocks, seed, addresses, config, out } => {
            let cfg = match config {
                Some(p) => serde_json::from_slice(&std::fs::read(p)?)?,
                None => SynthConfig { n_blocks: blocks, seed, n_addresses: addresses, ..Default::default() },
            };
            let chain = generate_synthetic_chain(&cfg)?;
            write_chain(&chain.blocks, BufWriter::new(File::create(&out)?))?;
            eprintln!("wrote {} blocks to {}", chain.blocks.len(), out.display());
        }
        Cmd::Build { chain, out_dir } => {
            let blocks = read_chain(BufReader::new(File::open(chain)?))?;
            let out = build_all(&blocks)?;
            out.write_to_dir(&out_dir)?;
            for ((kind, period), db) in &out.databases {
                println!(
                    "{kind}-{period}: {} rows x {} bytes, {} manifest records",
                    db.num_rows(),
                    db.row_width(),
                    out.manifest(*kind, *period).len()
                );
            }
        }
        Cmd::Serve { data_dir, listen, server_index } => {
            let data = Arc::new(BuildOutput::load_dir(&data_dir)?);
            let handle = spawn_server(data, ServerConfig::new(listen, server_index))?;
            eprintln!("serving {} as server {server_index} on {}", data_dir.display(), handle.addr());
            handle.join();
        }
        Cmd::Query { servers, t, backend, address, min_conf, stats_out, seed } => {
            let address = Address::from_base58(&address)?;
            let mut cfg = ClientConfig::new(servers, backend, t)?;
            cfg.seed = seed;
            let mut session = ClientSession::connect(cfg)?;
            let report = session.pir_spv(&address, min_conf)?;
            if report.results.is_empty() {
                println!("{address}: no unspent outputs");
            }
            for r in &report.results {
                let status = if r.verified { "verified".to_string() } else { format!("FAILED: {}", r.failure.as_deref().unwrap_or("")) };
                println!("{}:{} height {} {status}", r.entry.txid, r.entry.vout, r.entry.height);
            }
            println!("bandwidth {} bytes over {} entries", report.total_bandwidth(), report.results.len());
            if let Some(path) = stats_out {
                let mut w = csv::Writer::from_path(path).map_err(|e| pirspv::Error::Io(e.into()))?;
                let mut rows = vec![StatsRow::new("address", String::new(), &report.address_round)];
                for r in &report.results {
                    rows.push(StatsRow::new("merkle", r.entry.txid.to_hex(), &r.merkle_round));
                    rows.push(StatsRow::new("transaction", r.entry.txid.to_hex(), &r.tx_round));
                }
                for row in rows {
                    w.serialize(row).map_err(|e| pirspv::Error::Io(e.into()))?;
                }
                w.flush()?;
            }
            return Ok(report.all_verified());
        }
        Cmd::Bench { config, out_dir, parallel } => {
            let mut cfg = ExperimentConfig::from_json_file(&config)?;
            cfg.parallel |= parallel;
            let out = run_experiment(&cfg)?;
            out.write_csvs(&out_dir)?;
            print!("{}", format_tables(&out.tables));
        }
        Cmd::CostModel => {
            println!("{:<8} {:>7} {:>14}", "period", "servers", "bytes/lookup");
            for r in reported_cost_table() {
                println!("{:<8} {:>7} {:>14}", r.period.name(), r.servers, r.bytes);
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
