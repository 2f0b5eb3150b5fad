use std::collections::BTreeMap;

use pirspv::baselines::ChainIndex;
use pirspv::bench::{run_experiment, ChainSource, ExperimentConfig, Protocol, Sampling};
use pirspv::chain::synth::{generate_synthetic_chain, SynthConfig};
use pirspv::chain::Hash256;
use pirspv::pir::Period;

fn config(seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        chain: ChainSource::Synthetic(SynthConfig { n_blocks: 200, seed: 21, ..Default::default() }),
        periods: vec![Period::Weekly],
        samples: 6,
        repetitions: 2,
        seed,
        ..Default::default()
    }
}

#[test]
fn three_servers_cost_three_times_one() {
    let out = run_experiment(&config(1)).unwrap();
    let mut one: BTreeMap<(Period, usize, String), u64> = BTreeMap::new();
    let mut three = one.clone();
    for r in &out.trials {
        let key = (r.period, r.repetition, r.txid.clone());
        match r.protocol {
            Protocol::Pir1 => *one.entry(key).or_default() += r.bytes,
            Protocol::Pir3 => *three.entry(key).or_default() += r.bytes,
            _ => {}
        }
    }
    assert!(!one.is_empty());
    assert_eq!(one.len(), three.len());
    for (k, b1) in &one {
        assert_eq!(three[k], 3 * b1, "{k:?}");
    }
}

#[test]
fn naive_bytes_match_the_block_size_prefix_sum() {
    let out = run_experiment(&config(2)).unwrap();
    let chain = generate_synthetic_chain(&SynthConfig { n_blocks: 200, seed: 21, ..Default::default() }).unwrap();
    let mut height_of = BTreeMap::new();
    for b in &chain.blocks {
        for tx in &b.txs {
            height_of.insert(tx.txid(), b.height as usize);
        }
    }
    let sizes: Vec<u64> = chain.blocks.iter().map(|b| b.serialized_len() as u64).collect();
    let index = ChainIndex::new(&chain.blocks);
    for r in out.trials.iter().filter(|r| r.protocol == Protocol::Naive) {
        let txid = Hash256::from_hex(&r.txid).unwrap();
        let h = height_of[&txid];
        assert_eq!(r.bytes, sizes[..=h].iter().sum::<u64>());
        assert_eq!(r.bytes, index.naive_bandwidth(&txid).unwrap());
    }
}

#[test]
fn csv_shapes() {
    let cfg = config(3);
    let out = run_experiment(&cfg).unwrap();
    let cells = cfg.periods.len() * cfg.protocols.len();
    assert_eq!(out.trials.len(), cells * cfg.samples * cfg.repetitions);
    assert_eq!(out.tables.len(), cells);
    assert_eq!(out.cdf.len(), cells * cfg.samples);

    let dir = tempfile::tempdir().unwrap();
    out.write_csvs(dir.path()).unwrap();
    let read = |f: &str| std::fs::read_to_string(dir.path().join(f)).unwrap();
    let hist = read("histogram.csv");
    assert_eq!(hist.lines().next().unwrap(), "protocol,period,txid,bytes");
    assert_eq!(hist.lines().count(), 1 + out.trials.len());
    let cdf = read("cdf.csv");
    assert_eq!(cdf.lines().next().unwrap(), "protocol,period,n_txs,bytes_mean,bytes_std,latency_s");
    for line in cdf.lines().skip(1) {
        let latency = line.rsplit(',').next().unwrap();
        if line.starts_with("pir") {
            assert!(latency.parse::<f64>().unwrap() > 0.0);
        } else {
            assert!(latency.is_empty());
        }
    }
    let tables = read("tables.csv");
    assert_eq!(tables.lines().next().unwrap(), "protocol,period,samples,bytes_mean,bytes_std");
    assert_eq!(tables.lines().count(), 1 + cells);
}

#[test]
fn sampling_by_address_and_parallel_workers() {
    let cfg = ExperimentConfig {
        sampling: Sampling::Addresses,
        parallel: true,
        protocols: vec![Protocol::Pir1, Protocol::Pir3],
        ..config(4)
    };
    let par = run_experiment(&cfg).unwrap();
    let seq = run_experiment(&ExperimentConfig { parallel: false, ..cfg }).unwrap();
    assert_eq!(par.trials.iter().map(|r| r.bytes).collect::<Vec<_>>(), seq.trials.iter().map(|r| r.bytes).collect::<Vec<_>>());
}

#[test]
fn bip37_costs_at_least_one_merkleblock() {
    let out = run_experiment(&ExperimentConfig { protocols: vec![Protocol::Bip37], ..config(5) }).unwrap();
    for r in &out.trials {
        assert!(r.bytes > 80 + 4 + 1 + 32 + 1, "{r:?}");
    }
}
