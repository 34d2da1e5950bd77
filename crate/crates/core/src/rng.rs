//! Seeded randomness.
//!
//! Every random draw comes from ChaCha8 (`rand_chacha` 0.3) seeded with
//! `seed_from_u64(seed)` and then moved to a dedicated stream with
//! `set_stream`. Stream ids are laid out as
//!
//! ```text
//! purpose << 56 | round << 28 | process
//! ```
//!
//! so each process gets its own stream per round and schedule-level choices
//! use `process = 0x0fff_ffff`. Changing this layout changes every trace, so
//! bump [`STREAM_RULE_VERSION`] when doing so.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::ProcessId;

pub const STREAM_RULE_VERSION: u32 = 1;

const GLOBAL: u64 = 0x0fff_ffff;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Purpose {
    Schedule = 1,
    Inputs = 2,
    Behavior = 3,
    Partition = 4,
}

pub fn stream_id(purpose: Purpose, round: usize, process: Option<ProcessId>) -> u64 {
    let p = process.map(|p| p.0 as u64 & GLOBAL).unwrap_or(GLOBAL);
    ((purpose as u64) << 56) | ((round as u64 & 0x0fff_ffff) << 28) | p
}

pub fn stream(seed: u64, purpose: Purpose, round: usize, process: Option<ProcessId>) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(purpose, round, process));
    rng
}
