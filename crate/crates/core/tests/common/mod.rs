#![allow(dead_code)]

use std::sync::Arc;

use pirspv::builder::{build_all, BuildOutput};
use pirspv::chain::synth::{generate_synthetic_chain, SynthConfig, SyntheticChain};
use pirspv::net::{spawn_server, ClientConfig, ClientSession, ServerConfig, ServerHandle};
use pirspv::pir::{Backend, PirParams};

pub fn chain(n_blocks: usize, seed: u64) -> SyntheticChain {
    generate_synthetic_chain(&SynthConfig { n_blocks, seed, ..Default::default() }).unwrap()
}

pub struct Cluster {
    pub chain: SyntheticChain,
    pub build: Arc<BuildOutput>,
    pub servers: Vec<ServerHandle>,
}

impl Cluster {
    pub fn new(n_blocks: usize, seed: u64, n_servers: u8) -> Self {
        let chain = chain(n_blocks, seed);
        let build = Arc::new(build_all(&chain.blocks).unwrap());
        let servers = (1..=n_servers)
            .map(|i| spawn_server(build.clone(), ServerConfig::new("127.0.0.1:0", i)).unwrap())
            .collect();
        Cluster { chain, build, servers }
    }

    pub fn addrs(&self, n: usize) -> Vec<String> {
        self.servers[..n].iter().map(|s| s.addr().to_string()).collect()
    }

    pub fn session(&self, params: PirParams, seed: u64) -> ClientSession {
        let mut cfg = ClientConfig::with_params(self.addrs(params.ell), Backend::ItPir, params);
        cfg.seed = Some(seed);
        ClientSession::connect(cfg).unwrap()
    }

    pub fn session_with(&self, backend: Backend, servers: usize, seed: u64) -> ClientSession {
        let mut cfg = ClientConfig::new(self.addrs(servers), backend, 1).unwrap();
        cfg.seed = Some(seed);
        cfg.lwe_dim = 64;
        ClientSession::connect(cfg).unwrap()
    }
}
