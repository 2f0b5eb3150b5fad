//! Framed TCP protocol, the database server and the querying client.

pub mod client;
pub mod server;
pub mod wire;

pub use client::{ClientConfig, ClientSession, PirSpvReport, RoundStats, SpvResult};
pub use server::{spawn_server, Fault, ServerConfig, ServerHandle};
pub use wire::{Flow, MsgType, Traffic};
