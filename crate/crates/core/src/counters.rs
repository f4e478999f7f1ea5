//! Decision counters: randomized zero testers for a net frequency.
//!
//! A counter accumulates deltas modulo a random 61-bit prime. If the true
//! net sum is zero the counter reads zero with certainty; a non-zero sum
//! reads zero only when the prime divides it, which for values of magnitude
//! ≤ 2^α-bits happens with probability at most `log2(α) / π(2^61)`-scale.
//! Callers that need lower error amplify with independent counters.

use crate::prf::{self, Domain};
use crate::prime;
use crate::stream::{Model, Stream, Token};
use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CounterError {
    #[error("cannot merge counters with different primes ({0} vs {1})")]
    PrimeMismatch(u64, u64),
    #[error("distinct-items counting needs an element stream")]
    NotElem,
}

/// Context sizes for error budgeting. `n` is the ambient problem size and
/// `alpha` the promised frequency bound.
#[derive(Clone, Debug)]
pub struct CounterParams {
    pub n: u64,
    pub alpha: BigUint,
}

impl CounterParams {
    pub fn new(n: u64, alpha: BigUint) -> Self {
        assert!(n >= 1, "context size must be >= 1");
        assert!(!alpha.is_zero(), "alpha must be >= 1");
        CounterParams { n, alpha }
    }
}

/// A modular accumulator over a random Miller–Rabin-certified 61-bit prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecisionCounter {
    prime: u64,
    acc: u64,
    seed: u64,
}

impl DecisionCounter {
    /// Fresh counter whose prime is rejection-sampled from the seed.
    pub fn new(seed: u64) -> Self {
        DecisionCounter { prime: prime::random_prime_61(seed), acc: 0, seed }
    }

    /// Fresh counter whose prime comes from the shared certified pool.
    /// Sketches with thousands of counters use this constructor.
    pub(crate) fn pooled(seed: u64) -> Self {
        let key = prf::hash(seed, Domain::CounterPrime, 0, 0);
        DecisionCounter { prime: prime::pool_prime(key), acc: 0, seed }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn accumulator(&self) -> u64 {
        self.acc
    }

    pub(crate) fn set_accumulator(&mut self, acc: u64) {
        debug_assert!(acc < self.prime);
        self.acc = acc;
    }

    /// Add a signed delta to the running frequency.
    pub fn add(&mut self, delta: &BigInt) {
        if let Some(small) = delta.to_i64() {
            self.add_i64(small);
        } else {
            let m = (delta.magnitude() % self.prime).to_u64().unwrap();
            let r = if delta.is_negative() { (self.prime - m) % self.prime } else { m };
            self.acc = self.madd(r);
        }
    }

    /// Fast path for deltas that fit machine words.
    pub fn add_i64(&mut self, delta: i64) {
        let m = delta.unsigned_abs() % self.prime;
        let r = if delta < 0 { (self.prime - m) % self.prime } else { m };
        self.acc = self.madd(r);
    }

    #[inline]
    fn madd(&self, r: u64) -> u64 {
        let s = self.acc + r; // both < 2^61, no overflow
        if s >= self.prime {
            s - self.prime
        } else {
            s
        }
    }

    /// True iff the accumulator is zero. One-sided: a zero net frequency
    /// always answers true; a non-zero one answers true only when the prime
    /// divides it.
    pub fn is_zero(&self) -> bool {
        self.acc == 0
    }

    /// Combine two counters over the same prime; the result is exactly the
    /// counter of the concatenated streams.
    pub fn merge(&self, other: &DecisionCounter) -> Result<DecisionCounter, CounterError> {
        if self.prime != other.prime {
            return Err(CounterError::PrimeMismatch(self.prime, other.prime));
        }
        let mut out = *self;
        out.acc = out.madd(other.acc);
        Ok(out)
    }
}

/// Ingest a full delta sequence into a fresh counter. Deterministic in
/// `seed`; the caller promises every partial sum stays within ±alpha.
pub fn counter_ingest(_params: &CounterParams, seed: u64, deltas: &[BigInt]) -> DecisionCounter {
    let mut c = DecisionCounter::new(seed);
    for d in deltas {
        c.add(d);
    }
    c
}

/// Exact distinct-items count (with one-sided per-element error): one
/// non-zero detector per element of the universe.
pub fn count_distinct(
    stream: &Stream,
    _params: &CounterParams,
    seed: u64,
) -> Result<u64, CounterError> {
    let universe = match stream.header.model {
        Model::Elem { universe } => universe,
        Model::Sgt { .. } => return Err(CounterError::NotElem),
    };
    let mut detectors: Vec<DecisionCounter> = (0..universe)
        .map(|i| DecisionCounter::pooled(prf::hash(seed, Domain::CounterSeed, i, 0)))
        .collect();
    for t in &stream.tokens {
        if let Token::Elem { index, delta } = t {
            detectors[*index as usize].add(delta);
        }
    }
    Ok(detectors.iter().filter(|d| !d.is_zero()).count() as u64)
}
