//! Counter-based random streams.
//!
//! Every draw comes from a ChaCha stream keyed by the run seed and a 64-bit
//! stream id, so a replicate sees the same numbers whichever worker runs it.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub type StreamRng = ChaCha12Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Purpose {
    Y = 1,
    Eps = 2,
    Pilot = 3,
    Moment = 4,
    Audit = 5,
    Data = 6,
}

/// Packs `(purpose, index, replicate)` into a stream id.
pub fn stream_id(purpose: Purpose, index: u32, replicate: u32) -> u64 {
    ((purpose as u64) << 56) | ((u64::from(index) & 0x00ff_ffff) << 32) | u64::from(replicate)
}

pub fn stream(seed: u64, stream_id: u64) -> StreamRng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}
