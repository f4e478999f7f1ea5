//! Random 61-bit primes and Miller–Rabin certification.
//!
//! Decision counters fingerprint a net frequency modulo a random prime. A
//! 61-bit modulus keeps the multiply-accumulate inside a `u128` while leaving
//! the pool of candidate primes (~2.5·10^16) large enough that a non-zero
//! value of magnitude ≤ 2^α-bits has a vanishing chance of being divisible by
//! the sampled prime.

use once_cell::sync::Lazy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Number of Miller–Rabin rounds used to certify a sampled candidate.
pub const MILLER_RABIN_ROUNDS: u32 = 30;

const POOL_BITS: u32 = 13;
const POOL_LEN: usize = 1 << POOL_BITS;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Miller–Rabin primality test with `rounds` random bases drawn from `rng`.
pub fn is_prime(n: u64, rounds: u32, rng: &mut impl Rng) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    // n - 1 = 2^s * d with d odd
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for _ in 0..rounds {
        let a = rng.gen_range(2..n - 1);
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Sample a uniform 61-bit prime by rejection, certified by
/// [`MILLER_RABIN_ROUNDS`] Miller–Rabin rounds. Deterministic in `seed`.
pub fn random_prime_61(seed: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let candidate = rng.gen_range(1u64 << 60..1u64 << 61) | 1;
        if is_prime(candidate, MILLER_RABIN_ROUNDS, &mut rng) {
            return candidate;
        }
    }
}

/// A fixed pool of certified 61-bit primes shared by all sketch counters.
///
/// Sketches hold hundreds of thousands of counters; rejection-sampling a
/// fresh prime per counter would dominate construction time, so counters
/// index into this pool with a keyed hash. Every pool entry is itself drawn
/// by [`random_prime_61`], so each counter's modulus is still a uniform
/// Miller–Rabin-certified 61-bit prime.
static PRIME_POOL: Lazy<Vec<u64>> = Lazy::new(|| {
    const MASTER: u64 = 0x5067_5f70_6f6f_6c31;
    crate::par::map_indexed(POOL_LEN, |i| random_prime_61(MASTER.wrapping_add(i as u64)))
});

/// Pick a pool prime from a 64-bit key.
pub fn pool_prime(key: u64) -> u64 {
    PRIME_POOL[(key >> (64 - POOL_BITS)) as usize]
}
