//! Deterministic seed derivation.
//!
//! All randomness in a run flows from a single master seed through named
//! substreams, so results are reproducible bit-for-bit regardless of
//! evaluation order or worker count.

/// Named substreams hanging off a master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    /// Synthetic-instance generation.
    InstanceGen,
    /// Per-solve randomness of the simulated quantum backend.
    Solve,
    /// Tomography sampling inside one solve.
    Tomography,
    /// Multiplicative norm estimation inside one solve.
    NormEstimate,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::InstanceGen => 0x496e7374,
            Stream::Solve => 0x536f6c76,
            Stream::Tomography => 0x546f6d6f,
            Stream::NormEstimate => 0x4e6f726d,
        }
    }
}

/// SplitMix64 finalizer; the standard 64-bit avalanche mix.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derives the seed of `stream[index]` under `base`.
pub fn derive(base: u64, stream: Stream, index: u64) -> u64 {
    splitmix64(splitmix64(base ^ stream.tag().rotate_left(17)) ^ index)
}
