//! Seeded pseudorandom function used for all membership decisions.
//!
//! Filters, partitions and layer samples are pure functions of
//! `(seed, domain, path, element)`. This replaces the read-once PRG argument
//! with a keyed-hash heuristic: every structure re-derives exactly the same
//! bits from its seed, which is what the merge/replay machinery relies on.

/// Domain separation tags so distinct uses of the same seed never collide.
#[derive(Clone, Copy, Debug)]
#[repr(u64)]
pub enum Domain {
    CounterPrime = 0x01,
    LevelFilter = 0x02,
    DetectorPart = 0x03,
    EdgeFilter = 0x04,
    LayerSample = 0x05,
    LayerSeed = 0x06,
    TerminalSample = 0x07,
    CounterSeed = 0x08,
}

#[inline]
fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Keyed 64-bit hash of `(seed, domain, a, b)`.
#[inline]
pub fn hash(seed: u64, domain: Domain, a: u64, b: u64) -> u64 {
    let mut h = splitmix(seed ^ (domain as u64).wrapping_mul(0xd6e8_feb8_6659_fd93));
    h = splitmix(h ^ a);
    splitmix(h ^ b)
}

/// Bernoulli decision at rate `num/2^16`, derived from the keyed hash.
#[inline]
pub fn coin(seed: u64, domain: Domain, a: u64, b: u64, rate_2_16: u32) -> bool {
    (hash(seed, domain, a, b) >> 48) < rate_2_16 as u64
}
