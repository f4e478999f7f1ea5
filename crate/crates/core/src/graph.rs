//! Signed vertex-incidence ℓ0 sketches over SGT streams and the
//! Borůvka-style spanning forest built from them.
//!
//! Every vertex keeps one ℓ0 sketch per Borůvka round over the edge-slot
//! universe. An update to edge `(u, v)` enters `u`'s sketches with `+δ` and
//! `v`'s with `-δ`, so summing the sketches of a vertex set cancels its
//! internal slots and leaves a sketch of exactly the outgoing edge slots.
//! Round `t` of the forest computation consumes the round-`t` layer, which
//! is why the layers carry independent randomness.

use crate::l0::{L0Sketch, SketchShape};
use crate::par::Parallelism;
use crate::prf::{self, Domain};
use crate::stream::{Model, Stream, Token};
use num_bigint::{BigInt, BigUint};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex {0} outside the bank's vertex set of size {1}")]
    VertexOutOfRange(u32, u32),
    #[error("bank needs an SGT stream")]
    NotSgt,
    #[error("bank shapes or seeds differ; refusing to merge")]
    ShapeMismatch,
}

/// Union-find with union by size and path halving.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(len: usize) -> UnionFind {
        UnionFind { parent: (0..len).collect(), size: vec![1; len] }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut x = x;
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when the two sets were distinct and are now joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }
}

/// Canonical edge-slot pairing: `(u, v)` with `u < v` maps to
/// `v(v-1)/2 + u`.
pub fn edge_slot(u: u32, v: u32) -> u64 {
    assert!(u < v, "edge slots take canonical endpoint order");
    v as u64 * (v as u64 - 1) / 2 + u as u64
}

/// Inverse of [`edge_slot`].
pub fn slot_endpoints(slot: u64) -> (u32, u32) {
    // v is the largest integer with v(v-1)/2 <= slot
    let mut v = ((2.0 * slot as f64 + 0.25).sqrt() + 0.5) as u64;
    while v * (v - 1) / 2 > slot {
        v -= 1;
    }
    while (v + 1) * v / 2 <= slot {
        v += 1;
    }
    let u = slot - v * (v - 1) / 2;
    (u as u32, v as u32)
}

/// Per-vertex, per-round ℓ0 sketches with the incidence sign convention.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSketchBank {
    n: u32,
    rounds: u32,
    shape: SketchShape,
    seed: u64,
    /// vertex-major, then round.
    sketches: Vec<L0Sketch>,
    /// flips the ±δ endpoint convention; components are invariant to it.
    flip_orientation: bool,
}

fn ceil_log2_u32(n: u32) -> u32 {
    if n <= 1 {
        0
    } else {
        32 - (n - 1).leading_zeros()
    }
}

/// Sketch repetitions used by graph banks. Forest construction tolerates
/// per-sample misses (later rounds retry), so banks run far slimmer than
/// the default sampler shape; the residue audits keep wrong samples rare.
pub const BANK_REPS: u32 = 3;
pub const BANK_DET_REPS: u32 = 6;

/// All vertices share one sketch instance (same filters, same counter
/// primes) per round, so summing the sketches of a vertex set is exactly
/// the sketch of its outgoing edge slots. Rounds carry independent
/// randomness because round-`t` sampling is adaptive on earlier rounds.
fn round_seed(bank_seed: u64, round: u32) -> u64 {
    prf::hash(bank_seed, Domain::CounterSeed, 5, round as u64)
}

impl VertexSketchBank {
    pub fn new(n: u32, alpha: &BigUint, seed: u64) -> Self {
        Self::with_reps(n, alpha, seed, BANK_REPS, BANK_DET_REPS)
    }

    pub fn with_reps(n: u32, alpha: &BigUint, seed: u64, reps: u32, det_reps: u32) -> Self {
        assert!(n >= 1);
        let slots = (n as u64 * (n as u64 - 1) / 2).max(1);
        let shape = SketchShape::custom(slots, alpha.bits().max(1), reps, det_reps);
        let rounds = ceil_log2_u32(n) + 1;
        let sketches = (0..n as u64 * rounds as u64)
            .map(|i| {
                let t = (i % rounds as u64) as u32;
                L0Sketch::new(shape, round_seed(seed, t))
            })
            .collect();
        VertexSketchBank { n, rounds, shape, seed, sketches, flip_orientation: false }
    }

    /// Same bank with the global edge-orientation convention flipped.
    pub fn with_flipped_orientation(mut self) -> Self {
        self.flip_orientation = true;
        self
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn rounds(&self) -> u32 {
        self.rounds
    }

    pub fn sketch(&self, v: u32, round: u32) -> &L0Sketch {
        &self.sketches[(v * self.rounds + round) as usize]
    }

    /// Apply one signed edge update to both endpoint sketch stacks.
    pub fn ingest(&mut self, u: u32, v: u32, delta: &BigInt) -> Result<(), GraphError> {
        if u >= self.n || v >= self.n {
            return Err(GraphError::VertexOutOfRange(u.max(v), self.n));
        }
        assert!(u < v, "edge tokens are canonical");
        let slot = edge_slot(u, v);
        let neg = -delta.clone();
        let (du, dv) = if self.flip_orientation { (&neg, delta) } else { (delta, &neg) };
        for t in 0..self.rounds {
            self.sketches[(u * self.rounds + t) as usize].ingest(slot, du).unwrap();
            self.sketches[(v * self.rounds + t) as usize].ingest(slot, dv).unwrap();
        }
        Ok(())
    }

    pub fn ingest_token(&mut self, token: &Token) -> Result<(), GraphError> {
        match token {
            Token::Edge { u, v, delta } => self.ingest(*u, *v, delta),
            Token::Elem { .. } => Err(GraphError::NotSgt),
        }
    }

    /// Ingest a whole stream, optionally sharding across threads and
    /// merging the partial banks (linearity makes this exact).
    pub fn ingest_stream_with(
        &mut self,
        stream: &Stream,
        mode: Parallelism,
    ) -> Result<(), GraphError> {
        match stream.header.model {
            Model::Sgt { n } if n <= self.n => {}
            _ => return Err(GraphError::NotSgt),
        }
        let threads = match mode {
            Parallelism::Sequential => 1,
            #[cfg(feature = "parallel")]
            Parallelism::Rayon => rayon::current_num_threads(),
            #[cfg(not(feature = "parallel"))]
            Parallelism::Rayon => 1,
        };
        if threads <= 1 || stream.tokens.len() < 256 {
            for t in &stream.tokens {
                self.ingest_token(t)?;
            }
            return Ok(());
        }
        let chunk = stream.tokens.len().div_ceil(threads);
        let chunks: Vec<&[Token]> = stream.tokens.chunks(chunk).collect();
        let template = VertexSketchBank {
            n: self.n,
            rounds: self.rounds,
            shape: self.shape,
            seed: self.seed,
            sketches: Vec::new(),
            flip_orientation: self.flip_orientation,
        };
        let partials = crate::par::map_slice(&chunks, |part| {
            let mut bank = template.clone();
            bank.sketches = (0..bank.n as u64 * bank.rounds as u64)
                .map(|i| {
                    let t = (i % bank.rounds as u64) as u32;
                    L0Sketch::new(bank.shape, round_seed(bank.seed, t))
                })
                .collect();
            for t in *part {
                bank.ingest_token(t).expect("validated above");
            }
            bank
        });
        for p in &partials {
            self.merge_from(p)?;
        }
        Ok(())
    }

    pub fn ingest_stream(&mut self, stream: &Stream) -> Result<(), GraphError> {
        self.ingest_stream_with(stream, Parallelism::Rayon)
    }

    pub fn merge_from(&mut self, other: &VertexSketchBank) -> Result<(), GraphError> {
        if self.n != other.n
            || self.seed != other.seed
            || self.shape != other.shape
            || self.flip_orientation != other.flip_orientation
        {
            return Err(GraphError::ShapeMismatch);
        }
        for (a, b) in self.sketches.iter_mut().zip(&other.sketches) {
            a.merge_from(b).map_err(|_| GraphError::ShapeMismatch)?;
        }
        Ok(())
    }

    /// Borůvka rounds over the sketch layers: each round merges every
    /// current component's round-`t` sketches, samples one outgoing slot
    /// per component and unions the proposals in ascending-representative
    /// order. Sampled slots that fail to decode to an edge leaving the
    /// component are discarded for the round.
    pub fn spanning_forest(&self) -> Forest {
        let n = self.n as usize;
        let mut uf = UnionFind::new(n);
        let mut edges: Vec<(u32, u32)> = Vec::new();
        for t in 0..self.rounds {
            // components keyed by their minimum vertex, ascending
            let mut groups: std::collections::BTreeMap<u32, Vec<u32>> =
                std::collections::BTreeMap::new();
            let mut min_of = vec![u32::MAX; n];
            for v in 0..self.n {
                let r = uf.find(v as usize);
                min_of[r] = min_of[r].min(v);
            }
            for v in 0..self.n {
                let r = uf.find(v as usize);
                groups.entry(min_of[r]).or_default().push(v);
            }
            if groups.len() <= 1 {
                break;
            }
            let group_list: Vec<&Vec<u32>> = groups.values().collect();
            let proposals = crate::par::map_slice(&group_list, |members| {
                let mut merged = self.sketch(members[0], t).clone();
                for &v in &members[1..] {
                    merged.merge_from(self.sketch(v, t)).expect("same bank shape");
                }
                merged.sample().map(slot_endpoints)
            });
            for (members, proposal) in groups.values().zip(proposals) {
                if let Some((a, b)) = proposal {
                    if b >= self.n {
                        continue;
                    }
                    let root = uf.find(members[0] as usize);
                    let a_in = uf.find(a as usize) == root;
                    let b_in = uf.find(b as usize) == root;
                    if a_in != b_in && uf.union(a as usize, b as usize) {
                        edges.push((a, b));
                    }
                }
            }
        }
        Forest { n: self.n, edges, uf }
    }

    /// True iff the spanning forest reaches a single component.
    pub fn is_connected(&self) -> bool {
        self.spanning_forest().edges.len() as u32 == self.n - u32::from(self.n > 0)
    }
}

/// Output of the forest computation: the accepted edges plus the union-find
/// partition they induce.
#[derive(Clone, Debug)]
pub struct Forest {
    pub n: u32,
    pub edges: Vec<(u32, u32)>,
    uf: UnionFind,
}

impl Forest {
    pub fn components(&self) -> crate::oracle::Partition {
        let mut uf = self.uf.clone();
        let n = self.n as usize;
        let mut min_of = vec![u32::MAX; n];
        for v in 0..self.n {
            let r = uf.find(v as usize);
            min_of[r] = min_of[r].min(v);
        }
        let labels = (0..self.n).map(|v| min_of[uf.find(v as usize)]).collect();
        crate::oracle::Partition { labels }
    }
}
