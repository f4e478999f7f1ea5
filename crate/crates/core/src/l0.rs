//! Strong ℓ0-samplers for frequency vectors whose entries may be doubly
//! exponential.
//!
//! The construction stacks three pieces:
//!
//! * [`SupportOneSketch`] — non-adaptive binary search: one decision counter
//!   per index bit, accumulating the inner product with the mask that is 1
//!   exactly where that bit of the index is 0, plus a total-mass counter.
//! * [`SupportOneDetector`] — per repetition, a seeded 4-way partition of
//!   the universe with one decision counter per part; the support is
//!   declared 1 iff every repetition shows exactly one non-zero part.
//! * [`L0Sketch`] — for each level `i = 0..=⌈log₂N⌉`, `r` repetitions of a
//!   (recovery, detector) pair over the sub-universe kept by a seeded
//!   filter of rate `2^-i`. Sampling scans for a firing detector and
//!   returns that pair's recovered index.
//!
//! Everything is linear in the frequency vector, so sketches of stream
//! pieces merge by summing counters.

use crate::counters::DecisionCounter;
use crate::prf::{self, Domain};
use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SketchError {
    #[error("sketch shapes or seeds differ; refusing to merge")]
    ShapeMismatch,
    #[error("element {0} outside universe of size {1}")]
    ElementOutOfRange(u64, u64),
    #[error("malformed sketch frame: {0}")]
    Frame(String),
}

fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Size parameters of an ℓ0 sketch. Two sketches interoperate (merge,
/// replay) only when their shapes and seeds agree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SketchShape {
    /// Universe size N; elements are 0..N-1.
    pub universe: u64,
    /// Bit length of the frequency bound alpha.
    pub alpha_bits: u64,
    /// Repetitions per level.
    pub reps: u32,
    /// Partition repetitions inside each support-1 detector.
    pub det_reps: u32,
}

impl SketchShape {
    /// Default repetition count `⌈4·(log₂N + log₂log₂α)⌉`, which pushes the
    /// per-level miss bound `(15/16)^r` below 1e-4 at N = 256.
    pub fn with_default_reps(universe: u64, alpha: &BigUint) -> Self {
        let alpha_bits = alpha.bits().max(1);
        let r = 4 * (ceil_log2(universe) + ceil_log2(alpha_bits)).max(1);
        SketchShape { universe, alpha_bits, reps: r, det_reps: r }
    }

    /// Explicit repetition counts, for banks that trade failure probability
    /// for memory.
    pub fn custom(universe: u64, alpha_bits: u64, reps: u32, det_reps: u32) -> Self {
        assert!(reps >= 1 && det_reps >= 1);
        SketchShape { universe, alpha_bits: alpha_bits.max(1), reps, det_reps }
    }

    /// Number of index-bit masks.
    pub fn mask_count(&self) -> u32 {
        ceil_log2(self.universe)
    }

    /// Levels 0..=⌈log₂N⌉ inclusive.
    pub fn levels(&self) -> u32 {
        ceil_log2(self.universe) + 1
    }

    fn counters_total(&self) -> u64 {
        let per_unit = self.mask_count() as u64 + 1 + 4 * self.det_reps as u64;
        self.levels() as u64 * self.reps as u64 * per_unit
    }
}

/// Decode a support-1 index from the zero-ness pattern of the mask
/// counters: bit `i` of the index is 1 iff the inner product with mask
/// `a_i` is zero.
pub fn decode_support_one(mask_is_zero: &[bool]) -> u64 {
    let mut s = 0u64;
    for (i, &z) in mask_is_zero.iter().enumerate() {
        if z {
            s |= 1 << i;
        }
    }
    s
}

/// Inner products of the frequency vector with the index-bit masks, plus a
/// total over all elements. Recovers the unique support element when the
/// support has size exactly 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportOneSketch {
    mask_count: u32,
    masks: Vec<DecisionCounter>,
    total: DecisionCounter,
}

impl SupportOneSketch {
    pub fn new(mask_count: u32, seed: u64) -> Self {
        let masks = (0..mask_count)
            .map(|i| DecisionCounter::pooled(prf::hash(seed, Domain::CounterSeed, 1, i as u64)))
            .collect();
        let total = DecisionCounter::pooled(prf::hash(seed, Domain::CounterSeed, 2, 0));
        SupportOneSketch { mask_count, masks, total }
    }

    #[inline]
    pub fn ingest_i64(&mut self, element: u64, delta: i64) {
        for i in 0..self.mask_count {
            if element >> i & 1 == 0 {
                self.masks[i as usize].add_i64(delta);
            }
        }
        self.total.add_i64(delta);
    }

    pub fn ingest(&mut self, element: u64, delta: &BigInt) {
        if let Some(small) = delta.to_i64() {
            self.ingest_i64(element, small);
            return;
        }
        for i in 0..self.mask_count {
            if element >> i & 1 == 0 {
                self.masks[i as usize].add(delta);
            }
        }
        self.total.add(delta);
    }

    /// Assemble the index bit-by-bit. Correct whenever the support is
    /// exactly 1 and no constituent counter false-zeroes; garbage-in under
    /// a broken promise.
    pub fn recover(&self) -> u64 {
        let bits: Vec<bool> = self.masks.iter().map(|c| c.is_zero()).collect();
        decode_support_one(&bits)
    }

    pub fn total_counter(&self) -> &DecisionCounter {
        &self.total
    }

    fn merge_from(&mut self, other: &SupportOneSketch) -> Result<(), SketchError> {
        if self.mask_count != other.mask_count {
            return Err(SketchError::ShapeMismatch);
        }
        for (a, b) in self.masks.iter_mut().zip(&other.masks) {
            *a = a.merge(b).map_err(|_| SketchError::ShapeMismatch)?;
        }
        self.total =
            self.total.merge(&other.total).map_err(|_| SketchError::ShapeMismatch)?;
        Ok(())
    }

    fn counters(&self) -> impl Iterator<Item = &DecisionCounter> {
        self.masks.iter().chain(std::iter::once(&self.total))
    }

    fn counters_mut(&mut self) -> impl Iterator<Item = &mut DecisionCounter> {
        self.masks.iter_mut().chain(std::iter::once(&mut self.total))
    }
}

/// Detects whether the support size is exactly 1 via repeated seeded 4-way
/// partitions of the universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportOneDetector {
    det_reps: u32,
    seed: u64,
    /// `det_reps * 4` counters, rep-major.
    parts: Vec<DecisionCounter>,
}

impl SupportOneDetector {
    pub fn new(det_reps: u32, seed: u64) -> Self {
        let parts = (0..det_reps * 4)
            .map(|i| DecisionCounter::pooled(prf::hash(seed, Domain::CounterSeed, 3, i as u64)))
            .collect();
        SupportOneDetector { det_reps, seed, parts }
    }

    #[inline]
    fn part_of(&self, rep: u32, element: u64) -> usize {
        (prf::hash(self.seed, Domain::DetectorPart, rep as u64, element) & 3) as usize
    }

    #[inline]
    pub fn ingest_i64(&mut self, element: u64, delta: i64) {
        for rep in 0..self.det_reps {
            let p = self.part_of(rep, element);
            self.parts[(rep * 4) as usize + p].add_i64(delta);
        }
    }

    pub fn ingest(&mut self, element: u64, delta: &BigInt) {
        if let Some(small) = delta.to_i64() {
            self.ingest_i64(element, small);
            return;
        }
        for rep in 0..self.det_reps {
            let p = self.part_of(rep, element);
            self.parts[(rep * 4) as usize + p].add(delta);
        }
    }

    /// True iff every repetition shows exactly one non-zero part sum.
    /// An all-zero sketch reads false.
    pub fn detect(&self) -> bool {
        for rep in 0..self.det_reps {
            let nonzero = (0..4)
                .filter(|&p| !self.parts[(rep * 4) as usize + p].is_zero())
                .count();
            if nonzero != 1 {
                return false;
            }
        }
        true
    }

    /// Residue audit for a recovered candidate: in every repetition the
    /// candidate must fall in the unique non-zero part. A garbage index
    /// survives this with probability about `4^-det_reps`.
    fn consistent_with(&self, element: u64) -> bool {
        for rep in 0..self.det_reps {
            let p = self.part_of(rep, element);
            if self.parts[(rep * 4) as usize + p].is_zero() {
                return false;
            }
        }
        true
    }

    fn merge_from(&mut self, other: &SupportOneDetector) -> Result<(), SketchError> {
        if self.det_reps != other.det_reps || self.seed != other.seed {
            return Err(SketchError::ShapeMismatch);
        }
        for (a, b) in self.parts.iter_mut().zip(&other.parts) {
            *a = a.merge(b).map_err(|_| SketchError::ShapeMismatch)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct SamplerUnit {
    supp1: SupportOneSketch,
    det: SupportOneDetector,
}

/// The full strong ℓ0-sampler.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct L0Sketch {
    shape: SketchShape,
    seed: u64,
    /// level-major, then repetition.
    units: Vec<SamplerUnit>,
}

/// Filter decision for `(level, rep, element)`: the top `level` bits of the
/// keyed hash must be zero, giving rate exactly `2^-level`.
#[inline]
fn level_admits(seed: u64, level: u32, rep: u32, element: u64) -> bool {
    if level == 0 {
        return true;
    }
    let h = prf::hash(seed, Domain::LevelFilter, ((level as u64) << 32) | rep as u64, element);
    h >> (64 - level) == 0
}

impl L0Sketch {
    pub fn new(shape: SketchShape, seed: u64) -> Self {
        let mut units = Vec::with_capacity((shape.levels() * shape.reps) as usize);
        for level in 0..shape.levels() {
            for rep in 0..shape.reps {
                let unit_seed = prf::hash(
                    seed,
                    Domain::CounterSeed,
                    ((level as u64) << 32) | rep as u64,
                    u64::MAX,
                );
                units.push(SamplerUnit {
                    supp1: SupportOneSketch::new(shape.mask_count(), unit_seed),
                    det: SupportOneDetector::new(shape.det_reps, unit_seed ^ 0x9e37),
                });
            }
        }
        L0Sketch { shape, seed, units }
    }

    pub fn shape(&self) -> SketchShape {
        self.shape
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    fn unit_index(&self, level: u32, rep: u32) -> usize {
        (level * self.shape.reps + rep) as usize
    }

    pub fn ingest(&mut self, element: u64, delta: &BigInt) -> Result<(), SketchError> {
        if element >= self.shape.universe {
            return Err(SketchError::ElementOutOfRange(element, self.shape.universe));
        }
        if let Some(small) = delta.to_i64() {
            self.fan_out(element, |unit| {
                unit.supp1.ingest_i64(element, small);
                unit.det.ingest_i64(element, small);
            });
        } else {
            self.fan_out(element, |unit| {
                unit.supp1.ingest(element, delta);
                unit.det.ingest(element, delta);
            });
        }
        Ok(())
    }

    pub fn ingest_i64(&mut self, element: u64, delta: i64) -> Result<(), SketchError> {
        if element >= self.shape.universe {
            return Err(SketchError::ElementOutOfRange(element, self.shape.universe));
        }
        self.fan_out(element, |unit| {
            unit.supp1.ingest_i64(element, delta);
            unit.det.ingest_i64(element, delta);
        });
        Ok(())
    }

    #[inline]
    fn fan_out(&mut self, element: u64, mut f: impl FnMut(&mut SamplerUnit)) {
        let (levels, reps, seed) = (self.shape.levels(), self.shape.reps, self.seed);
        for level in 0..levels {
            for rep in 0..reps {
                if level_admits(seed, level, rep, element) {
                    let idx = (level * reps + rep) as usize;
                    f(&mut self.units[idx]);
                }
            }
        }
    }

    /// Return one support element, or `None` (FAIL). The scan takes the
    /// first `(level, rep)` pair whose detector fires and whose recovered
    /// index passes the residue audits: the index must be admitted by that
    /// pair's filter, the pair's total counter must be non-zero, and every
    /// detector repetition must place the index in its unique non-zero
    /// part.
    pub fn sample(&self) -> Option<u64> {
        for level in 0..self.shape.levels() {
            for rep in 0..self.shape.reps {
                let unit = &self.units[self.unit_index(level, rep)];
                if !unit.det.detect() {
                    continue;
                }
                let e = unit.supp1.recover();
                if e >= self.shape.universe
                    || unit.supp1.total_counter().is_zero()
                    || !level_admits(self.seed, level, rep, e)
                    || !unit.det.consistent_with(e)
                {
                    continue;
                }
                return Some(e);
            }
        }
        None
    }

    /// The global total-mass counter (level 0 admits every element).
    pub fn total_counter(&self) -> &DecisionCounter {
        self.units[0].supp1.total_counter()
    }

    /// Per-counter modular sum. `merge ∘ ingest = ingest ∘ concat`.
    pub fn merge_from(&mut self, other: &L0Sketch) -> Result<(), SketchError> {
        if self.shape != other.shape || self.seed != other.seed {
            return Err(SketchError::ShapeMismatch);
        }
        for (a, b) in self.units.iter_mut().zip(&other.units) {
            a.supp1.merge_from(&b.supp1)?;
            a.det.merge_from(&b.det)?;
        }
        Ok(())
    }

    /// Measured size of the live state in bits (primes + residues), used
    /// for verifier-space accounting.
    pub fn state_bits(&self) -> u64 {
        self.shape.counters_total() * 128 + 256
    }

    fn counters(&self) -> impl Iterator<Item = &DecisionCounter> {
        self.units
            .iter()
            .flat_map(|u| u.supp1.counters().chain(u.det.parts.iter()))
    }

    fn counters_mut(&mut self) -> impl Iterator<Item = &mut DecisionCounter> {
        self.units
            .iter_mut()
            .flat_map(|u| u.supp1.counters_mut().chain(u.det.parts.iter_mut()))
    }

    /// Versioned binary frame: header plus the residues in canonical order.
    /// Byte-stable across runs with the same seed.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"L0SK");
        out.extend_from_slice(&1u16.to_le_bytes());
        out.extend_from_slice(&[0u8; 2]);
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&self.shape.universe.to_le_bytes());
        out.extend_from_slice(&self.shape.alpha_bits.to_le_bytes());
        out.extend_from_slice(&self.shape.reps.to_le_bytes());
        out.extend_from_slice(&self.shape.det_reps.to_le_bytes());
        out.extend_from_slice(&self.shape.counters_total().to_le_bytes());
        for c in self.counters() {
            out.extend_from_slice(&c.accumulator().to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<L0Sketch, SketchError> {
        let frame = |msg: &str| SketchError::Frame(msg.to_string());
        let mut pos = 0usize;
        let mut take = |len: usize| -> Result<&[u8], SketchError> {
            if pos + len > bytes.len() {
                return Err(frame("truncated"));
            }
            let s = &bytes[pos..pos + len];
            pos += len;
            Ok(s)
        };
        if take(4)? != b"L0SK" {
            return Err(frame("bad magic"));
        }
        let version = u16::from_le_bytes(take(2)?.try_into().unwrap());
        if version != 1 {
            return Err(frame("unsupported version"));
        }
        take(2)?;
        let seed = u64::from_le_bytes(take(8)?.try_into().unwrap());
        let universe = u64::from_le_bytes(take(8)?.try_into().unwrap());
        let alpha_bits = u64::from_le_bytes(take(8)?.try_into().unwrap());
        let reps = u32::from_le_bytes(take(4)?.try_into().unwrap());
        let det_reps = u32::from_le_bytes(take(4)?.try_into().unwrap());
        let count = u64::from_le_bytes(take(8)?.try_into().unwrap());
        if reps == 0 || det_reps == 0 {
            return Err(frame("bad shape"));
        }
        let shape = SketchShape::custom(universe, alpha_bits, reps, det_reps);
        if shape.counters_total() != count {
            return Err(frame("counter count mismatch"));
        }
        let mut sketch = L0Sketch::new(shape, seed);
        for c in sketch.counters_mut() {
            let acc = u64::from_le_bytes(take(8)?.try_into().unwrap());
            if acc >= c.prime() {
                return Err(frame("residue exceeds modulus"));
            }
            c.set_accumulator(acc);
        }
        if pos != bytes.len() {
            return Err(frame("trailing bytes"));
        }
        Ok(sketch)
    }
}

/// Multiset equality tester: insert one side with `+1` per occurrence,
/// delete the other with `-1`, then ask whether anything is left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqualitySketch {
    sketch: L0Sketch,
}

impl EqualitySketch {
    pub fn new(shape: SketchShape, seed: u64) -> Self {
        EqualitySketch { sketch: L0Sketch::new(shape, seed) }
    }

    pub fn insert(&mut self, element: u64, count: &BigInt) -> Result<(), SketchError> {
        self.sketch.ingest(element, count)
    }

    pub fn delete(&mut self, element: u64, count: &BigInt) -> Result<(), SketchError> {
        self.sketch.ingest(element, &-count.clone())
    }

    pub fn insert_i64(&mut self, element: u64, count: i64) -> Result<(), SketchError> {
        self.sketch.ingest_i64(element, count)
    }

    /// True iff the sampler FAILs and the total-mass counter is zero.
    /// Equal multisets answer true with certainty (linearity); unequal ones
    /// answer false except with sketch failure probability.
    pub fn multiset_equal(&self) -> bool {
        self.sketch.total_counter().is_zero() && self.sketch.sample().is_none()
    }

    pub fn state_bits(&self) -> u64 {
        self.sketch.state_bits()
    }

    pub fn sketch(&self) -> &L0Sketch {
        &self.sketch
    }
}
