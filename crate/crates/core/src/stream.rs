//! Stream tokens, stream files, random generators and the Equals-Index
//! adversarial stream constructions.
//!
//! A stream file is a header line `ELEM <N> <alpha>` or `SGT <n> <alpha>`
//! followed by one token per line (`<i> <±delta>` for element streams,
//! `<u> <v> <±delta>` for edge streams). Lines starting with `#` are
//! comments. Deltas are arbitrary-precision integers in decimal; `alpha`
//! bounds every running frequency in absolute value.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StreamError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid instance: {0}")]
    BadInstance(String),
    #[error("invalid parameters: {0}")]
    BadParams(String),
}

/// Which universe the stream addresses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    /// Elements drawn from `{0, .., universe-1}`.
    Elem { universe: u64 },
    /// Edge slots over vertices `{0, .., n-1}`; the graph is the support of
    /// the final frequency vector.
    Sgt { n: u32 },
}

/// Stream header: model, universe size and the frequency bound α.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StreamHeader {
    pub model: Model,
    pub alpha: BigUint,
}

impl StreamHeader {
    pub fn elem(universe: u64, alpha: BigUint) -> Self {
        assert!(!alpha.is_zero(), "alpha must be >= 1");
        StreamHeader { model: Model::Elem { universe }, alpha }
    }

    pub fn sgt(n: u32, alpha: BigUint) -> Self {
        assert!(!alpha.is_zero(), "alpha must be >= 1");
        StreamHeader { model: Model::Sgt { n }, alpha }
    }

    /// Number of distinct addressable slots (elements or edge slots).
    pub fn universe(&self) -> u64 {
        match self.model {
            Model::Elem { universe } => universe,
            Model::Sgt { n } => n as u64 * (n as u64 - 1) / 2,
        }
    }
}

/// One signed update. Edge endpoints are stored canonically (`u < v`) and
/// deltas are never zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Token {
    Elem { index: u64, delta: BigInt },
    Edge { u: u32, v: u32, delta: BigInt },
}

impl Token {
    pub fn elem(index: u64, delta: impl Into<BigInt>) -> Token {
        let delta = delta.into();
        assert!(!delta.is_zero(), "token delta must be non-zero");
        Token::Elem { index, delta }
    }

    /// Edge token; endpoints are canonicalized. Panics on self-loops.
    pub fn edge(a: u32, b: u32, delta: impl Into<BigInt>) -> Token {
        let delta = delta.into();
        assert!(!delta.is_zero(), "token delta must be non-zero");
        assert_ne!(a, b, "self-loops are not valid edge tokens");
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        Token::Edge { u, v, delta }
    }

    pub fn delta(&self) -> &BigInt {
        match self {
            Token::Elem { delta, .. } | Token::Edge { delta, .. } => delta,
        }
    }
}

/// An ordered token sequence plus its header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stream {
    pub header: StreamHeader,
    pub tokens: Vec<Token>,
}

/// Parse a stream file. Tokens outside the declared universe are rejected;
/// frequency bounds are *not* checked here (oracles do that).
pub fn parse_stream(text: &str) -> Result<Stream, StreamError> {
    let err = |line: usize, msg: &str| StreamError::Parse { line, msg: msg.to_string() };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline_no, hline) = lines.next().ok_or_else(|| err(0, "empty stream file"))?;
    let mut parts = hline.split_whitespace();
    let kind = parts.next().ok_or_else(|| err(hline_no, "missing model"))?;
    let header = match kind {
        "ELEM" => {
            let universe: u64 = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err(hline_no, "bad universe size"))?;
            let alpha: BigUint = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err(hline_no, "bad alpha"))?;
            if alpha.is_zero() {
                return Err(err(hline_no, "alpha must be >= 1"));
            }
            StreamHeader { model: Model::Elem { universe }, alpha }
        }
        "SGT" => {
            let n: u32 = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err(hline_no, "bad vertex count"))?;
            let alpha: BigUint = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err(hline_no, "bad alpha"))?;
            if alpha.is_zero() {
                return Err(err(hline_no, "alpha must be >= 1"));
            }
            StreamHeader { model: Model::Sgt { n }, alpha }
        }
        other => return Err(err(hline_no, &format!("unknown model `{other}`"))),
    };
    if parts.next().is_some() {
        return Err(err(hline_no, "trailing fields in header"));
    }

    let mut tokens = Vec::new();
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        match header.model {
            Model::Elem { universe } => {
                if fields.len() != 2 {
                    return Err(err(line_no, "expected `<i> <±delta>`"));
                }
                let index: u64 =
                    fields[0].parse().map_err(|_| err(line_no, "bad element index"))?;
                if index >= universe {
                    return Err(err(line_no, "element index outside universe"));
                }
                let delta: BigInt =
                    fields[1].parse().map_err(|_| err(line_no, "bad delta"))?;
                if delta.is_zero() {
                    return Err(err(line_no, "zero delta"));
                }
                tokens.push(Token::Elem { index, delta });
            }
            Model::Sgt { n } => {
                if fields.len() != 3 {
                    return Err(err(line_no, "expected `<u> <v> <±delta>`"));
                }
                let a: u32 = fields[0].parse().map_err(|_| err(line_no, "bad endpoint"))?;
                let b: u32 = fields[1].parse().map_err(|_| err(line_no, "bad endpoint"))?;
                if a >= n || b >= n {
                    return Err(err(line_no, "endpoint outside vertex set"));
                }
                if a == b {
                    return Err(err(line_no, "self-loop"));
                }
                let delta: BigInt =
                    fields[2].parse().map_err(|_| err(line_no, "bad delta"))?;
                if delta.is_zero() {
                    return Err(err(line_no, "zero delta"));
                }
                let (u, v) = if a < b { (a, b) } else { (b, a) };
                tokens.push(Token::Edge { u, v, delta });
            }
        }
    }
    Ok(Stream { header, tokens })
}

/// Emit the canonical text form. `parse_stream(emit_stream(s)) == s` for any
/// stream whose tokens are already canonical.
pub fn emit_stream(stream: &Stream) -> String {
    let mut out = String::new();
    match stream.header.model {
        Model::Elem { universe } => {
            writeln!(out, "ELEM {} {}", universe, stream.header.alpha).unwrap()
        }
        Model::Sgt { n } => writeln!(out, "SGT {} {}", n, stream.header.alpha).unwrap(),
    }
    for t in &stream.tokens {
        match t {
            Token::Elem { index, delta } => writeln!(out, "{} {:+}", index, delta).unwrap(),
            Token::Edge { u, v, delta } => writeln!(out, "{} {} {:+}", u, v, delta).unwrap(),
        }
    }
    out
}

/// One Equals-Index instance: `p` blocks of `q` bits each, a query string
/// `y` and a block index `j ∈ [1, p]`. Blocks are stored as integers below
/// `2^q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqIdxInstance {
    pub p: u32,
    pub q: u32,
    pub blocks: Vec<BigUint>,
    pub y: BigUint,
    pub j: u32,
}

impl EqIdxInstance {
    pub fn new(
        p: u32,
        q: u32,
        blocks: Vec<BigUint>,
        y: BigUint,
        j: u32,
    ) -> Result<Self, StreamError> {
        let bound = BigUint::one() << q;
        if blocks.len() != p as usize {
            return Err(StreamError::BadInstance(format!(
                "expected {p} blocks, got {}",
                blocks.len()
            )));
        }
        if blocks.iter().any(|b| *b >= bound) || y >= bound {
            return Err(StreamError::BadInstance(format!("block exceeds {q} bits")));
        }
        if j == 0 || j > p {
            return Err(StreamError::BadInstance(format!("index j={j} outside [1, {p}]")));
        }
        Ok(EqIdxInstance { p, q, blocks, y, j })
    }

    /// Random instance; `equal` forces `y = x_j` (otherwise `y` is resampled
    /// until it differs, which for q >= 1 always terminates).
    pub fn random(p: u32, q: u32, equal: bool, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let blocks: Vec<BigUint> = (0..p).map(|_| rng.gen_biguint(q as u64)).collect();
        let j = rng.gen_range(1..=p);
        let y = if equal {
            blocks[(j - 1) as usize].clone()
        } else {
            loop {
                let cand = rng.gen_biguint(q as u64);
                if cand != blocks[(j - 1) as usize] {
                    break cand;
                }
            }
        };
        EqIdxInstance { p, q, blocks, y, j }
    }

    /// Truth value of the instance: is `x_j = y`?
    pub fn truth(&self) -> bool {
        self.blocks[(self.j - 1) as usize] == self.y
    }
}

/// Distinct-items reduction stream: `x_i + 1` insertions of element `i-1`,
/// then `y + 1` deletions of element `j-1`. The distinct count is `p - 1`
/// iff `x_j = y`, and `p` otherwise.
pub fn gen_eqidx_distinct_items(
    inst: &EqIdxInstance,
    alpha: &BigUint,
) -> Result<Stream, StreamError> {
    if (BigUint::one() << inst.q) > *alpha {
        return Err(StreamError::BadParams(format!(
            "q = {} exceeds the bit budget of alpha",
            inst.q
        )));
    }
    let header = StreamHeader::elem(inst.p as u64, alpha.clone());
    let mut tokens = Vec::with_capacity(inst.p as usize + 1);
    for (i, x) in inst.blocks.iter().enumerate() {
        tokens.push(Token::Elem {
            index: i as u64,
            delta: BigInt::from(x + 1u32),
        });
    }
    tokens.push(Token::Elem {
        index: (inst.j - 1) as u64,
        delta: -BigInt::from(&inst.y + 1u32),
    });
    Ok(Stream { header, tokens })
}

/// Connectivity reduction stream over a bipartite `n + n` vertex set.
///
/// Each block `x_i` splits into `n` sub-blocks of `q/n` bits; Alice inserts
/// `x_{i,b} + 1` copies of edge `(left i, right b)` and Bob deletes
/// `y_b + 1` copies of `(left j, right b)`. The support graph is connected
/// iff `x_j ≠ y`.
pub fn gen_eqidx_sgt_connectivity(inst: &EqIdxInstance) -> Result<Stream, StreamError> {
    let n = inst.p;
    if n == 0 || inst.q % n != 0 {
        return Err(StreamError::BadInstance(format!(
            "q = {} does not split into {n} sub-blocks",
            inst.q
        )));
    }
    let bits = inst.q / n;
    let alpha = BigUint::one() << bits;
    let header = StreamHeader::sgt(2 * n, alpha);
    let sub_block = |x: &BigUint, b: u32| -> BigUint {
        // sub-block b (1-based) holds the most significant bits first
        let shift = (n - b) * bits;
        (x >> shift) & ((BigUint::one() << bits) - 1u32)
    };
    let mut tokens = Vec::new();
    for i in 1..=n {
        for b in 1..=n {
            let x_ib = sub_block(&inst.blocks[(i - 1) as usize], b);
            tokens.push(Token::Edge {
                u: i - 1,
                v: n + b - 1,
                delta: BigInt::from(x_ib + 1u32),
            });
        }
    }
    for b in 1..=n {
        let y_b = sub_block(&inst.y, b);
        tokens.push(Token::Edge {
            u: inst.j - 1,
            v: n + b - 1,
            delta: -BigInt::from(y_b + 1u32),
        });
    }
    Ok(Stream { header, tokens })
}

/// k-connectivity reduction stream over the complete bipartite graph with
/// `n` left and `k` right vertices (`p = k·n` pairs in row-major order).
///
/// Alice inserts pair `ℓ` `x_ℓ` times; Bob deletes pair `j` `y` times and
/// inserts every other pair once. The support graph is `K_{n,k}` minus at
/// most the `j`-th edge and is k-vertex- and k-edge-connected iff `x_j ≠ y`.
pub fn gen_eqidx_sgt_kconn(inst: &EqIdxInstance, k: u32) -> Result<Stream, StreamError> {
    if k == 0 || inst.p % k != 0 {
        return Err(StreamError::BadInstance(format!(
            "p = {} is not a multiple of k = {k}",
            inst.p
        )));
    }
    let n = inst.p / k;
    if k >= n {
        return Err(StreamError::BadParams(format!("k = {k} must be below n = {n}")));
    }
    let alpha = BigUint::one() << inst.q;
    let header = StreamHeader::sgt(n + k, alpha);
    let endpoints = |l: u32| -> (u32, u32) {
        let left = (l - 1) / k;
        let right = (l - 1) % k;
        (left, n + right)
    };
    let mut tokens = Vec::new();
    for l in 1..=inst.p {
        let x_l = &inst.blocks[(l - 1) as usize];
        if !x_l.is_zero() {
            let (u, v) = endpoints(l);
            tokens.push(Token::Edge { u, v, delta: BigInt::from(x_l.clone()) });
        }
    }
    if !inst.y.is_zero() {
        let (u, v) = endpoints(inst.j);
        tokens.push(Token::Edge { u, v, delta: -BigInt::from(inst.y.clone()) });
    }
    for l in 1..=inst.p {
        if l != inst.j {
            let (u, v) = endpoints(l);
            tokens.push(Token::Edge { u, v, delta: BigInt::one() });
        }
    }
    Ok(Stream { header, tokens })
}

/// Random SGT stream. A `cancel_fraction` of the touched edge slots receive
/// updates that sum to exactly zero (present in the stream, absent from the
/// support graph); every running frequency stays within `[-alpha, alpha]`.
/// Deterministic in `seed`.
pub fn gen_random_sgt(
    n: u32,
    alpha: &BigUint,
    density: f64,
    cancel_fraction: f64,
    seed: u64,
) -> Result<Stream, StreamError> {
    if n < 2 {
        return Err(StreamError::BadParams(format!("need n >= 2 vertices, got {n}")));
    }
    if !(0.0..=1.0).contains(&density) || !(0.0..=1.0).contains(&cancel_fraction) {
        return Err(StreamError::BadParams(
            "density and cancel_fraction must lie in [0, 1]".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut touched = Vec::new();
    for v in 1..n {
        for u in 0..v {
            if rng.gen_bool(density) {
                touched.push((u, v));
            }
        }
    }
    // exact split of the touched slots into cancelled and surviving
    let cancel_count = (cancel_fraction * touched.len() as f64).round() as usize;
    let mut order: Vec<usize> = (0..touched.len()).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let cancelled: std::collections::HashSet<usize> =
        order.into_iter().take(cancel_count).collect();

    let alpha_int = BigInt::from(alpha.clone());
    let mut queues: Vec<Vec<Token>> = Vec::with_capacity(touched.len());
    for (slot, &(u, v)) in touched.iter().enumerate() {
        let magnitude = rng.gen_biguint_below(alpha) + 1u32;
        let mut tokens = Vec::new();
        if cancelled.contains(&slot) {
            let d = BigInt::from(magnitude);
            tokens.push(Token::Edge { u, v, delta: d.clone() });
            tokens.push(Token::Edge { u, v, delta: -d });
        } else {
            let f = if rng.gen_bool(0.5) {
                BigInt::from(magnitude)
            } else {
              -BigInt::from(magnitude)
            };
            if rng.gen_bool(0.5) {
                tokens.push(Token::Edge { u, v, delta: f });
            } else {
                // two chunks; the intermediate frequency stays within ±alpha
                let a = BigInt::from(rng.gen_biguint_below(alpha))
                    - BigInt::from(rng.gen_biguint_below(alpha));
                let b = &f - &a;
                if a.is_zero() || b.is_zero() {
                    tokens.push(Token::Edge { u, v, delta: f });
                } else {
                    debug_assert!(a.abs() <= alpha_int.abs());
                    tokens.push(Token::Edge { u, v, delta: a });
                    tokens.push(Token::Edge { u, v, delta: b });
                }
            }
        }
        queues.push(tokens);
    }
    // random riffle that preserves per-slot order, so partial sums stay bounded
    let mut tokens = Vec::new();
    let mut live: Vec<usize> = (0..queues.len()).filter(|&i| !queues[i].is_empty()).collect();
    let mut cursors = vec![0usize; queues.len()];
    while !live.is_empty() {
        let pick = rng.gen_range(0..live.len());
        let qi = live[pick];
        tokens.push(queues[qi][cursors[qi]].clone());
        cursors[qi] += 1;
        if cursors[qi] == queues[qi].len() {
            live.swap_remove(pick);
        }
    }
    Ok(Stream { header: StreamHeader::sgt(n, alpha.clone()), tokens })
}

/// Deterministic graph fixtures used by tests and the CLI generator.
pub mod fixtures {
    use super::*;

    /// Unit-multiplicity SGT stream from an explicit edge list.
    pub fn edges_to_stream(n: u32, edges: &[(u32, u32)], alpha: u64) -> Stream {
        let tokens = edges.iter().map(|&(u, v)| Token::edge(u, v, 1)).collect();
        Stream { header: StreamHeader::sgt(n, BigUint::from(alpha)), tokens }
    }

    pub fn complete(n: u32) -> Stream {
        let mut edges = Vec::new();
        for v in 1..n {
            for u in 0..v {
                edges.push((u, v));
            }
        }
        edges_to_stream(n, &edges, 4)
    }

    pub fn complete_bipartite(a: u32, b: u32) -> Stream {
        let mut edges = Vec::new();
        for u in 0..a {
            for v in a..a + b {
                edges.push((u, v));
            }
        }
        edges_to_stream(a + b, &edges, 4)
    }

    pub fn cycle(n: u32) -> Stream {
        let edges: Vec<(u32, u32)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        edges_to_stream(n, &edges, 4)
    }

    pub fn path(n: u32) -> Stream {
        let edges: Vec<(u32, u32)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        edges_to_stream(n, &edges, 4)
    }

    pub fn star(leaves: u32) -> Stream {
        let edges: Vec<(u32, u32)> = (1..=leaves).map(|i| (0, i)).collect();
        edges_to_stream(leaves + 1, &edges, 4)
    }

    /// d-dimensional hypercube on `2^d` vertices (d-connected).
    pub fn hypercube(d: u32) -> Stream {
        let n = 1u32 << d;
        let mut edges = Vec::new();
        for v in 0..n {
            for bit in 0..d {
                let w = v ^ (1 << bit);
                if v < w {
                    edges.push((v, w));
                }
            }
        }
        edges_to_stream(n, &edges, 4)
    }

    /// Complete graph minus a perfect matching (requires even `n`).
    pub fn complete_minus_matching(n: u32) -> Stream {
        assert!(n % 2 == 0, "matching removal needs an even vertex count");
        let mut edges = Vec::new();
        for v in 1..n {
            for u in 0..v {
                if !(v == u + n / 2) {
                    edges.push((u, v));
                }
            }
        }
        edges_to_stream(n, &edges, 4)
    }
}
