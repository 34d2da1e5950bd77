//! Synchronous Byzantine k-set agreement: a lockstep simulator, the
//! `⌈t/k⌉ + 1`-round agreement protocol, and a combinatorial toolkit for the
//! protocol complexes of crash and equivocation rounds.

pub mod campaign;
pub mod digest;
pub mod model;
pub mod protocol;
pub mod rng;
pub mod simnet;
pub mod topology;

pub use model::{validate_config, Config, ConfigError, ExecutionTrace, ProcessId, RawConfig, Value};
