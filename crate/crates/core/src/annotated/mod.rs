//! Prover/Verifier harness for the annotated-streaming connectivity
//! schemes.
//!
//! A run is a strictly ordered exchange: the verifier ingests the input
//! stream into small sketches, the prover (armed with the exact oracles)
//! composes a framed proof, and the verifier consumes the frames one at a
//! time without ever buffering more than the current frame. Costs are
//! measured, never declared: `hcost` is the total size of the framed proof
//! in bits, `vcost` is the peak of (verifier state + current frame).
//!
//! All schemes share one verification engine. The prover opens with a
//! branch claim; the "not connected" branch is a cut disclosure, the
//! "connected" branch is a layered proof of k disjoint paths per vertex
//! with the paper's full-disclosure consumption bookkeeping: every support
//! edge is disclosed up front with its signed multiplicity (positive block
//! first), the disclosure is equality-checked against the stream, the
//! multiplicities are scaled by `n²` into a per-sign pair of ℓ0 samplers,
//! every path edge is annotated with its claimed sign and subtracted from
//! the matching sampler, and a final residual block must drain both
//! samplers to empty.

mod frames;
mod layering;
mod prover;
mod verifier;

pub use frames::Frame;
pub use layering::{
    layer_count, layer_member, assigned_layer, vertex_path_budget, edge_path_budget,
    LayerParams, MAX_SEED_RETRIES,
};
pub use prover::{
    layered_proof_is_structural, layering_prove, prove_not_k_connected, CutProof, LayeredProof,
    VertexGroup,
};
pub use verifier::Verifier;

use crate::oracle::{self, DisjointMode};
use crate::stream::{Model, Stream};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("schemes need an SGT stream")]
    NotSgt,
    #[error("no cut of the requested size exists (graph is k-connected)")]
    NoSuchCut,
    #[error("prover could not meet the proof size bound within {MAX_SEED_RETRIES} seed retries")]
    SizeBoundExceeded,
    #[error("bad scheme parameters: {0}")]
    BadParams(String),
    #[error("malformed proof frame: {0}")]
    Frame(String),
}

/// Scheme identifiers as used by the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeId {
    /// k-vertex-connectivity with k terminal proofs.
    KVertexConn,
    /// k-edge-connectivity with a single terminal.
    KEdgeConn,
    /// gap promise: vertex connectivity < k vs >= 2k, via two terminal-set
    /// proofs with parameter 2k.
    GapVertexConn,
    /// public-coin variant: terminals sampled from the shared seed.
    AmVertexConn,
    /// SGT k-vertex-connectivity (sign-annotated disclosure).
    SgtVertexConn,
    /// SGT k-edge-connectivity.
    SgtEdgeConn,
}

impl SchemeId {
    pub const ALL: [SchemeId; 6] = [
        SchemeId::KVertexConn,
        SchemeId::KEdgeConn,
        SchemeId::GapVertexConn,
        SchemeId::AmVertexConn,
        SchemeId::SgtVertexConn,
        SchemeId::SgtEdgeConn,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SchemeId::KVertexConn => "kvconn",
            SchemeId::KEdgeConn => "keconn",
            SchemeId::GapVertexConn => "gap-vconn",
            SchemeId::AmVertexConn => "am-vconn",
            SchemeId::SgtVertexConn => "sgt-vconn",
            SchemeId::SgtEdgeConn => "sgt-econn",
        }
    }

    pub fn parse(s: &str) -> Option<SchemeId> {
        SchemeId::ALL.iter().copied().find(|id| id.name() == s)
    }

    pub fn mode(&self) -> DisjointMode {
        match self {
            SchemeId::KEdgeConn | SchemeId::SgtEdgeConn => DisjointMode::Edge,
            _ => DisjointMode::Vertex,
        }
    }
}

impl std::fmt::Display for SchemeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Verdict of a verification run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject(RejectReason),
    Output(bool),
}

impl Verdict {
    pub fn is_reject(&self) -> bool {
        matches!(self, Verdict::Reject(_))
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Accept => write!(f, "ACCEPT"),
            Verdict::Reject(r) => write!(f, "REJECT({r:?})"),
            Verdict::Output(b) => write!(f, "OUTPUT({b})"),
        }
    }
}

/// Check identifiers attached to rejections.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RejectReason {
    /// Frame sequencing or field-format violation.
    Format,
    /// Upfront disclosure does not match the input stream multiset.
    InputEquality,
    /// Path edges plus residuals fail to drain the sign samplers.
    Consumption,
    /// A frame does not parse as a path from the announced vertex.
    PathStructure,
    /// A path ends outside the previous layer.
    PathEndpoint,
    /// The announced layer is not the vertex's first sampled layer.
    LayerMembership,
    /// Per-vertex disclosure list out of order or mismatched with paths.
    Disjointness,
    /// Wrong number of paths in a vertex group.
    PathCount,
    /// Terminal announcements out of order, duplicated, or wrong.
    TerminalOrder,
    /// Not every vertex received a proof.
    Coverage,
    /// Cut declaration violates its size or shape preconditions.
    CutShape,
    /// A disclosed support edge crosses the declared cut.
    CutCrossing,
    /// A declared cut edge is absent from the disclosed support.
    CutEdgeMissing,
}

/// Prover behaviors exercised by tests and the tamper harness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProverBehavior {
    Honest,
    Tamper(TamperClass),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TamperClass {
    /// Route one path through an edge absent from the input.
    EdgeNotInInput,
    /// Lie about one disclosed multiplicity.
    MultiplicityLie,
    /// Lie about one path edge's sign annotation.
    SignLie,
    /// Two paths of one group share a vertex (or edge in edge mode).
    NonDisjointPaths,
    /// A path stops short of the previous layer.
    BrokenPath,
    /// Claim "not k-connected" on a k-connected graph with a bogus cut.
    UndersizedCut,
    /// Announce the same terminal twice.
    TerminalDuplication,
    /// Claim "k-connected" on a graph that is not, padding missing paths.
    ClaimTrueNotConnected,
}

impl TamperClass {
    pub const ALL: [TamperClass; 8] = [
        TamperClass::EdgeNotInInput,
        TamperClass::MultiplicityLie,
        TamperClass::SignLie,
        TamperClass::NonDisjointPaths,
        TamperClass::BrokenPath,
        TamperClass::UndersizedCut,
        TamperClass::TerminalDuplication,
        TamperClass::ClaimTrueNotConnected,
    ];
}

/// How terminals are organised for a scheme instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TerminalSpec {
    /// Prover-chosen terminals, announced strictly increasing, exactly
    /// `count` of them.
    Ascending { count: u32 },
    /// Two fixed disjoint vertex sets; a proof per set, in order.
    Sets(Vec<Vec<u32>>),
    /// Publicly sampled terminal list; announcements must match exactly.
    Public(Vec<u32>),
}

/// Resolved parameters of one scheme run, shared by prover and verifier.
#[derive(Clone, Debug)]
pub struct SchemeConfig {
    pub scheme: SchemeId,
    pub mode: DisjointMode,
    pub n: u32,
    pub k: u32,
    /// Disjoint-path count each vertex must prove (k, or 2k for the gap
    /// scheme).
    pub k_param: u32,
    pub terminals: TerminalSpec,
}

impl SchemeConfig {
    pub fn resolve(
        scheme: SchemeId,
        n: u32,
        k: u32,
        shared_seed: u64,
    ) -> Result<SchemeConfig, ProtocolError> {
        if k == 0 || n < 2 {
            return Err(ProtocolError::BadParams(format!("need n >= 2, k >= 1; got n={n} k={k}")));
        }
        let mode = scheme.mode();
        let (k_param, terminals) = match scheme {
            SchemeId::KVertexConn | SchemeId::SgtVertexConn => {
                if k >= n {
                    return Err(ProtocolError::BadParams(format!("k = {k} must be below n = {n}")));
                }
                (k, TerminalSpec::Ascending { count: k })
            }
            SchemeId::KEdgeConn | SchemeId::SgtEdgeConn => {
                (k, TerminalSpec::Ascending { count: 1 })
            }
            SchemeId::GapVertexConn => {
                if n < 4 * k {
                    return Err(ProtocolError::BadParams(format!(
                        "gap scheme needs n >= 4k; got n={n} k={k}"
                    )));
                }
                let t_left: Vec<u32> = (0..2 * k).collect();
                let t_right: Vec<u32> = (2 * k..4 * k).collect();
                (2 * k, TerminalSpec::Sets(vec![t_left, t_right]))
            }
            SchemeId::AmVertexConn => {
                if k >= n {
                    return Err(ProtocolError::BadParams(format!("k = {k} must be below n = {n}")));
                }
                (k, TerminalSpec::Public(sample_public_terminals(n, shared_seed)))
            }
        };
        Ok(SchemeConfig { scheme, mode, n, k, k_param, terminals })
    }

    /// Layer parameters used by every layered proof of this run.
    pub fn layer_params(&self) -> LayerParams {
        LayerParams { n: self.n, k_param: self.k_param }
    }
}

/// `2·⌈log₂ n⌉` public-coin terminals (all vertices once that clamps).
pub fn sample_public_terminals(n: u32, shared_seed: u64) -> Vec<u32> {
    let l = 2 * (32 - (n.max(2) - 1).leading_zeros());
    if l as u64 >= n as u64 {
        return (0..n).collect();
    }
    let mut picks: Vec<u32> = (0..l)
        .map(|i| {
            (crate::prf::hash(shared_seed, crate::prf::Domain::TerminalSample, i as u64, 0)
                % n as u64) as u32
        })
        .collect();
    picks.sort_unstable();
    picks.dedup();
    picks
}

/// Measured costs and verdict of one protocol run.
#[derive(Clone, Debug)]
pub struct ProofTranscript {
    pub scheme: SchemeId,
    pub k: u32,
    pub n: u32,
    pub verdict: Verdict,
    /// Total proof size in bits, measured from the encoded frames.
    pub hcost_bits: u64,
    /// Peak verifier working state in bits, including the frame buffer.
    pub vcost_bits: u64,
    /// Portion of hcost spent on the disclosure and residual blocks.
    pub disclosure_bits: u64,
    /// Portion of hcost spent on path/terminal frames.
    pub path_bits: u64,
    /// Seed retries the prover needed to meet the size bound.
    pub retries: u32,
    /// Total path length (in edges) of each constituent layered proof.
    pub path_lens: Vec<u64>,
}

impl ProofTranscript {
    /// One-line cost dump, stable key order.
    pub fn costs_line(&self) -> String {
        format!(
            "{{\"scheme\":\"{}\",\"k\":{},\"n\":{},\"hcost_bits\":{},\"vcost_bits\":{},\"verdict\":\"{}\"}}",
            self.scheme, self.k, self.n, self.hcost_bits, self.vcost_bits, self.verdict
        )
    }
}

/// Drive one full protocol run: verifier stream ingestion, prover
/// composition, frame-by-frame verification.
pub fn run_protocol(
    stream: &Stream,
    scheme: SchemeId,
    k: u32,
    behavior: ProverBehavior,
    seed: u64,
) -> Result<ProofTranscript, ProtocolError> {
    let n = match stream.header.model {
        Model::Sgt { n } => n,
        Model::Elem { .. } => return Err(ProtocolError::NotSgt),
    };
    let cfg = SchemeConfig::resolve(scheme, n, k, seed)?;
    let graph = oracle::exact_support(stream).map_err(|_| ProtocolError::NotSgt)?;
    let (frames, stats) = prover::compose(&graph, &cfg, behavior, seed)?;

    let mut verifier = Verifier::new(&stream.header, cfg.clone(), seed);
    verifier.ingest_stream(stream);
    let mut hcost = 0u64;
    let mut disclosure_bits = 0u64;
    let mut path_bits = 0u64;
    let mut verdict = None;
    for frame in &frames {
        let bytes = frame.encoded_len() as u64 * 8;
        hcost += bytes;
        if frame.is_disclosure() {
            disclosure_bits += bytes;
        } else {
            path_bits += bytes;
        }
        if verdict.is_none() {
            if let Some(v) = verifier.process(frame, bytes) {
                verdict = Some(v);
            }
        }
    }
    let verdict = verdict.unwrap_or(Verdict::Reject(RejectReason::Format));
    Ok(ProofTranscript {
        scheme,
        k,
        n,
        verdict,
        hcost_bits: hcost,
        vcost_bits: verifier.vcost_peak_bits(),
        disclosure_bits,
        path_bits,
        retries: stats.retries,
        path_lens: stats.path_lens,
    })
}

/// Run the verifier over a pre-encoded proof (CLI `verify`).
pub fn verify_encoded(
    stream: &Stream,
    scheme: SchemeId,
    k: u32,
    proof_bytes: &[u8],
    seed: u64,
) -> Result<ProofTranscript, ProtocolError> {
    let n = match stream.header.model {
        Model::Sgt { n } => n,
        Model::Elem { .. } => return Err(ProtocolError::NotSgt),
    };
    let cfg = SchemeConfig::resolve(scheme, n, k, seed)?;
    let mut verifier = Verifier::new(&stream.header, cfg, seed);
    verifier.ingest_stream(stream);
    let mut pos = 0usize;
    let mut hcost = 0u64;
    let mut disclosure_bits = 0u64;
    let mut path_bits = 0u64;
    let mut verdict = None;
    while pos < proof_bytes.len() {
        let start = pos;
        let frame = Frame::decode(proof_bytes, &mut pos)
            .map_err(|e| ProtocolError::Frame(e.to_string()))?;
        let bytes = (pos - start) as u64 * 8;
        hcost += bytes;
        if frame.is_disclosure() {
            disclosure_bits += bytes;
        } else {
            path_bits += bytes;
        }
        if verdict.is_none() {
            if let Some(v) = verifier.process(&frame, bytes) {
                verdict = Some(v);
            }
        }
    }
    let verdict = verdict.unwrap_or(Verdict::Reject(RejectReason::Format));
    Ok(ProofTranscript {
        scheme,
        k,
        n,
        verdict,
        hcost_bits: hcost,
        vcost_bits: verifier.vcost_peak_bits(),
        disclosure_bits,
        path_bits,
        retries: 0,
        path_lens: Vec::new(),
    })
}

/// Compose a proof and return its encoded frames (CLI `prove`).
pub fn prove_encoded(
    stream: &Stream,
    scheme: SchemeId,
    k: u32,
    behavior: ProverBehavior,
    seed: u64,
) -> Result<Vec<u8>, ProtocolError> {
    let n = match stream.header.model {
        Model::Sgt { n } => n,
        Model::Elem { .. } => return Err(ProtocolError::NotSgt),
    };
    let cfg = SchemeConfig::resolve(scheme, n, k, seed)?;
    let graph = oracle::exact_support(stream).map_err(|_| ProtocolError::NotSgt)?;
    let (frames, _) = prover::compose(&graph, &cfg, behavior, seed)?;
    let mut out = Vec::new();
    for f in &frames {
        f.encode(&mut out);
    }
    Ok(out)
}

/// Verify one explicit single-terminal layered proof against the stream:
/// the proof is framed (with an honest disclosure of the stream's support)
/// and fed to a fresh verifier.
pub fn verify_layered(
    stream: &Stream,
    proof: &LayeredProof,
    seed: u64,
) -> Result<ProofTranscript, ProtocolError> {
    let n = match stream.header.model {
        Model::Sgt { n } => n,
        Model::Elem { .. } => return Err(ProtocolError::NotSgt),
    };
    let graph = oracle::exact_support(stream).map_err(|_| ProtocolError::NotSgt)?;
    let cfg = prover::single_terminal_config(n, proof);
    let frames = prover::layered_proof_frames(&graph, proof);
    let mut verifier = Verifier::new(&stream.header, cfg, seed);
    verifier.ingest_stream(stream);
    let mut hcost = 0u64;
    let mut verdict = None;
    for frame in &frames {
        let bytes = frame.encoded_len() as u64 * 8;
        hcost += bytes;
        if verdict.is_none() {
            if let Some(v) = verifier.process(frame, bytes) {
                verdict = Some(v);
            }
        }
    }
    // a clean Output(true) on the single proof reads as ACCEPT
    let verdict = match verdict {
        Some(Verdict::Output(true)) => Verdict::Accept,
        Some(v) => v,
        None => Verdict::Reject(RejectReason::Format),
    };
    Ok(ProofTranscript {
        scheme: cfg_scheme_for(proof),
        k: proof.k_param,
        n,
        verdict,
        hcost_bits: hcost,
        vcost_bits: verifier.vcost_peak_bits(),
        disclosure_bits: 0,
        path_bits: 0,
        retries: proof.retries,
        path_lens: vec![proof.total_path_edges],
    })
}

fn cfg_scheme_for(proof: &LayeredProof) -> SchemeId {
    match proof.mode {
        DisjointMode::Vertex => SchemeId::KVertexConn,
        DisjointMode::Edge => SchemeId::KEdgeConn,
    }
}

/// Convenience wrappers naming the individual schemes.
pub fn scheme_kvconn(
    stream: &Stream,
    k: u32,
    seed: u64,
    behavior: ProverBehavior,
) -> Result<ProofTranscript, ProtocolError> {
    run_protocol(stream, SchemeId::KVertexConn, k, behavior, seed)
}

pub fn scheme_keconn(
    stream: &Stream,
    k: u32,
    seed: u64,
    behavior: ProverBehavior,
) -> Result<ProofTranscript, ProtocolError> {
    run_protocol(stream, SchemeId::KEdgeConn, k, behavior, seed)
}

pub fn scheme_gap_vconn(
    stream: &Stream,
    k: u32,
    seed: u64,
) -> Result<ProofTranscript, ProtocolError> {
    run_protocol(stream, SchemeId::GapVertexConn, k, ProverBehavior::Honest, seed)
}

pub fn scheme_am_vconn(
    stream: &Stream,
    k: u32,
    shared_seed: u64,
    behavior: ProverBehavior,
) -> Result<ProofTranscript, ProtocolError> {
    run_protocol(stream, SchemeId::AmVertexConn, k, behavior, shared_seed)
}

pub fn scheme_sgt(
    stream: &Stream,
    k: u32,
    mode: DisjointMode,
    seed: u64,
    behavior: ProverBehavior,
) -> Result<ProofTranscript, ProtocolError> {
    let id = match mode {
        DisjointMode::Vertex => SchemeId::SgtVertexConn,
        DisjointMode::Edge => SchemeId::SgtEdgeConn,
    };
    run_protocol(stream, id, k, behavior, seed)
}
