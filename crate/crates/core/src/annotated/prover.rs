//! Honest prover for the connectivity schemes, plus the tamper harness
//! used to measure soundness.
//!
//! The honest prover decides the branch with the exact oracles, then either
//! discloses a minimum cut or composes layered proofs: for every vertex, k
//! disjoint paths to the previous layer (or to the terminal/terminal set at
//! layer 0), extracted by deterministic max-flow. Layer seeds are retried
//! until the proof meets its size budget.

use super::frames::Frame;
use super::layering::{
    assigned_layer, edge_path_budget, layer_member, vertex_path_budget, LayerParams,
    MAX_SEED_RETRIES,
};
use super::{ProtocolError, ProverBehavior, SchemeConfig, TamperClass, TerminalSpec};
use crate::graph::edge_slot;
use crate::oracle::{self, DisjointMode, ExactGraph};
use crate::prf::{self, Domain};
use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;

/// Witness that the graph is not k-connected: a vertex cut (or edge set)
/// of size below k, plus one side of the partition it induces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutProof {
    pub mode: DisjointMode,
    pub cut_vertices: Vec<u32>,
    pub cut_edges: Vec<(u32, u32)>,
    pub side: Vec<u32>,
}

/// One vertex's group: its assigned layer and the k disjoint paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexGroup {
    pub vertex: u32,
    pub layer: u32,
    pub paths: Vec<Vec<u32>>,
}

/// A single-terminal layered proof.
#[derive(Clone, Debug)]
pub struct LayeredProof {
    pub mode: DisjointMode,
    pub terminal: u32,
    pub k_param: u32,
    pub layer_seed: u64,
    pub groups: Vec<VertexGroup>,
    pub total_path_edges: u64,
    pub retries: u32,
}

#[derive(Clone, Debug, Default)]
pub struct ProverStats {
    pub retries: u32,
    pub path_lens: Vec<u64>,
}

#[derive(Clone, Debug)]
enum UnitTarget {
    Terminal(u32),
    Set(u8, Vec<u32>),
}

#[derive(Clone, Debug)]
struct ProofUnit {
    target: UnitTarget,
    groups: Vec<VertexGroup>,
    path_edges: u64,
}

#[derive(Clone, Debug)]
struct Bundle {
    claim: bool,
    cut: Option<CutProof>,
    layer_seed: u64,
    units: Vec<ProofUnit>,
    retries: u32,
}

/// Find the minimum cut certifying "not k-connected"; errors with
/// `NoSuchCut` when the graph actually is k-connected in the mode.
pub fn prove_not_k_connected(
    graph: &ExactGraph,
    k: u32,
    mode: DisjointMode,
) -> Result<CutProof, ProtocolError> {
    match oracle::find_cut_below(graph, k, mode) {
        Ok(Some((cut_vertices, cut_edges, side))) => {
            Ok(CutProof { mode, cut_vertices, cut_edges, side })
        }
        Ok(None) => Err(ProtocolError::NoSuchCut),
        Err(e) => Err(ProtocolError::BadParams(e.to_string())),
    }
}

/// Is the graph k-connected in the given mode?
fn is_k_connected(graph: &ExactGraph, k: u32, mode: DisjointMode) -> Result<bool, ProtocolError> {
    let c = match mode {
        DisjointMode::Vertex => oracle::vertex_connectivity(graph),
        DisjointMode::Edge => oracle::min_cut(graph),
    }
    .map_err(|e| ProtocolError::BadParams(e.to_string()))?;
    Ok(c >= k)
}

/// Paths for one vertex group. `layer == 0` targets the unit terminal or
/// set; higher layers target the previous layer's sampled set.
fn group_paths(
    graph: &ExactGraph,
    cfg: &SchemeConfig,
    layer_seed: u64,
    target: &UnitTarget,
    layers: &[Vec<u32>],
    v: u32,
    layer: u32,
) -> Option<Vec<Vec<u32>>> {
    let k = cfg.k_param;
    if layer == 0 {
        match target {
            UnitTarget::Terminal(t) => {
                oracle::disjoint_paths(graph, v, *t, k, cfg.mode).ok().flatten()
            }
            UnitTarget::Set(_, set) => {
                oracle::disjoint_paths_to_set(graph, v, set, k, cfg.mode)
            }
        }
    } else {
        let targets = &layers[(layer - 1) as usize];
        debug_assert!(!layer_member(layer_seed, cfg.layer_params(), layer - 1, v));
        oracle::disjoint_paths_to_set(graph, v, targets, k, cfg.mode)
    }
}

/// Compose one unit (one terminal or one terminal set) under a fixed layer
/// seed. `pad` fills in missing paths by duplication for the cheating
/// "claim true" behavior; honest runs return None so the seed is retried.
fn compose_unit(
    graph: &ExactGraph,
    cfg: &SchemeConfig,
    layer_seed: u64,
    target: &UnitTarget,
    layers: &[Vec<u32>],
    pad: bool,
) -> Option<ProofUnit> {
    let params = cfg.layer_params();
    let skip: Vec<u32> = match target {
        UnitTarget::Terminal(t) => vec![*t],
        UnitTarget::Set(_, set) => set.clone(),
    };
    let mut groups = Vec::new();
    let mut path_edges = 0u64;
    for v in 0..cfg.n {
        if skip.contains(&v) {
            continue;
        }
        let layer = assigned_layer(layer_seed, params, v);
        let paths = match group_paths(graph, cfg, layer_seed, target, layers, v, layer) {
            Some(p) => p,
            None if pad => padded_paths(graph, cfg, layer_seed, target, layers, v, layer),
            None => return None,
        };
        path_edges += paths.iter().map(|p| p.len() as u64 - 1).sum::<u64>();
        groups.push(VertexGroup { vertex: v, layer, paths });
    }
    Some(ProofUnit { target: target.clone(), groups, path_edges })
}

/// Best-effort paths for a cheating prover: as many real disjoint paths as
/// exist, padded by duplicating the last (or a fabricated hop).
fn padded_paths(
    graph: &ExactGraph,
    cfg: &SchemeConfig,
    layer_seed: u64,
    target: &UnitTarget,
    layers: &[Vec<u32>],
    v: u32,
    layer: u32,
) -> Vec<Vec<u32>> {
    let k = cfg.k_param;
    let mut found: Vec<Vec<u32>> = Vec::new();
    for reduced in (1..k).rev() {
        let attempt = {
            let mut c = cfg.clone();
            c.k_param = reduced;
            group_paths(graph, &c, layer_seed, target, layers, v, layer)
        };
        if let Some(p) = attempt {
            found = p;
            break;
        }
    }
    if found.is_empty() {
        let fallback = match target {
            UnitTarget::Terminal(t) => *t,
            UnitTarget::Set(_, set) => set[0],
        };
        let anchor = if layer == 0 {
            fallback
        } else {
            layers[(layer - 1) as usize].first().copied().unwrap_or(fallback)
        };
        found.push(vec![v, anchor]);
    }
    while found.len() < k as usize {
        found.push(found.last().unwrap().clone());
    }
    found
}

/// Retry layer seeds until every unit composes within the size budget.
fn compose_layer_bundle(
    graph: &ExactGraph,
    cfg: &SchemeConfig,
    seed: u64,
    pad: bool,
) -> Result<Bundle, ProtocolError> {
    let params = cfg.layer_params();
    let budget = match cfg.mode {
        DisjointMode::Vertex => vertex_path_budget(cfg.n, cfg.k_param),
        DisjointMode::Edge => edge_path_budget(cfg.n, cfg.k_param),
    };
    let targets: Vec<UnitTarget> = match &cfg.terminals {
        TerminalSpec::Ascending { count } => {
            (0..*count).map(UnitTarget::Terminal).collect()
        }
        TerminalSpec::Public(list) => {
            list.iter().map(|&t| UnitTarget::Terminal(t)).collect()
        }
        TerminalSpec::Sets(sets) => sets
            .iter()
            .enumerate()
            .map(|(i, s)| UnitTarget::Set(i as u8, s.clone()))
            .collect(),
    };
    let max_attempts = if pad { 8 } else { MAX_SEED_RETRIES };
    'attempt: for attempt in 0..max_attempts {
        let layer_seed = prf::hash(seed, Domain::LayerSeed, attempt as u64, cfg.scheme as u64);
        let levels = params.levels();
        let mut layers: Vec<Vec<u32>> = Vec::with_capacity(levels as usize);
        for i in 0..levels {
            let members: Vec<u32> =
                (0..cfg.n).filter(|&v| layer_member(layer_seed, params, i, v)).collect();
            // vertex-disjoint fans need at least k targets in every layer
            if !pad && cfg.mode == DisjointMode::Vertex && (members.len() as u32) < cfg.k_param {
                continue 'attempt;
            }
            if members.is_empty() {
                continue 'attempt;
            }
            layers.push(members);
        }
        let mut units = Vec::new();
        for target in &targets {
            match compose_unit(graph, cfg, layer_seed, target, &layers, pad) {
                Some(u) if pad || u.path_edges <= budget => units.push(u),
                _ => continue 'attempt,
            }
        }
        return Ok(Bundle { claim: true, cut: None, layer_seed, units, retries: attempt });
    }
    Err(ProtocolError::SizeBoundExceeded)
}

/// Single-terminal layered proof with retries (building block for the
/// schemes, also exposed for direct verification).
pub fn layering_prove(
    graph: &ExactGraph,
    terminal: u32,
    k: u32,
    mode: DisjointMode,
    seed: u64,
) -> Result<LayeredProof, ProtocolError> {
    if !is_k_connected(graph, k, mode)? {
        return Err(ProtocolError::BadParams("graph is not k-connected".into()));
    }
    let cfg = SchemeConfig {
        scheme: match mode {
            DisjointMode::Vertex => super::SchemeId::KVertexConn,
            DisjointMode::Edge => super::SchemeId::KEdgeConn,
        },
        mode,
        n: graph.n,
        k,
        k_param: k,
        terminals: TerminalSpec::Public(vec![terminal]),
    };
    let bundle = compose_layer_bundle(graph, &cfg, seed, false)?;
    let unit = &bundle.units[0];
    Ok(LayeredProof {
        mode,
        terminal,
        k_param: k,
        layer_seed: bundle.layer_seed,
        groups: unit.groups.clone(),
        total_path_edges: unit.path_edges,
        retries: bundle.retries,
    })
}

/// Structural invariants every honest layered proof satisfies, checkable
/// before any verification runs.
pub fn layered_proof_is_structural(graph: &ExactGraph, proof: &LayeredProof) -> bool {
    let params = LayerParams { n: graph.n, k_param: proof.k_param };
    for g in &proof.groups {
        if g.paths.len() != proof.k_param as usize {
            return false;
        }
        if assigned_layer(proof.layer_seed, params, g.vertex) != g.layer {
            return false;
        }
        for p in &g.paths {
            if p.len() < 2 || p[0] != g.vertex {
                return false;
            }
            if !p.windows(2).all(|w| graph.has_edge(w[0], w[1])) {
                return false;
            }
            let end = *p.last().unwrap();
            let ok_end = if g.layer == 0 {
                end == proof.terminal
            } else {
                end == proof.terminal
                    || layer_member(proof.layer_seed, params, g.layer - 1, end)
            };
            if !ok_end {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// frame assembly
// ---------------------------------------------------------------------------

const DISCLOSE_CHUNK: usize = 128;

/// Sign-major support table: positive slots ascending, then negative slots
/// ascending.
fn support_table(graph: &ExactGraph) -> Vec<(u64, BigInt)> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (&(u, v), m) in &graph.support {
        let slot = edge_slot(u, v);
        if m.is_positive() {
            pos.push((slot, m.clone()));
        } else {
            neg.push((slot, m.clone()));
        }
    }
    pos.sort_by_key(|e| e.0);
    neg.sort_by_key(|e| e.0);
    pos.extend(neg);
    pos
}

/// Vertex-group disclosure list per the shared convention: all path
/// vertices after the start, excluding a final vertex equal to the unit
/// terminal; edge mode lists the path edge slots. Sorted and deduplicated
/// (honest groups are already duplicate-free).
fn group_disclosure(mode: DisjointMode, target: &UnitTarget, group: &VertexGroup) -> Vec<u64> {
    let terminal = match target {
        UnitTarget::Terminal(t) => Some(*t),
        UnitTarget::Set(..) => None,
    };
    let mut out = Vec::new();
    for p in &group.paths {
        match mode {
            DisjointMode::Vertex => {
                for (i, &w) in p.iter().enumerate().skip(1) {
                    if i == p.len() - 1 && Some(w) == terminal {
                        continue;
                    }
                    out.push(w as u64);
                }
            }
            DisjointMode::Edge => {
                for w in p.windows(2) {
                    out.push(edge_slot(w[0].min(w[1]), w[0].max(w[1])));
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn bundle_to_frames(
    table: &[(u64, BigInt)],
    bundle: &Bundle,
    cfg: &SchemeConfig,
    sign_lie: bool,
) -> Vec<Frame> {
    let mut frames = vec![Frame::Claim { connected: bundle.claim }];
    if !bundle.claim {
        let cut = bundle.cut.as_ref().expect("cut branch carries a cut");
        frames.push(Frame::CutDeclare {
            cut_vertices: cut.cut_vertices.clone(),
            cut_edges: cut.cut_edges.clone(),
            side: cut.side.clone(),
        });
        for chunk in table.chunks(DISCLOSE_CHUNK) {
            frames.push(Frame::Disclose { entries: chunk.to_vec() });
        }
        frames.push(Frame::DiscloseEnd);
        frames.push(Frame::End);
        return frames;
    }

    let sign_of: BTreeMap<u64, bool> =
        table.iter().map(|(slot, m)| (*slot, m.is_negative())).collect();
    frames.push(Frame::LayerSeed { seed: bundle.layer_seed });
    for chunk in table.chunks(DISCLOSE_CHUNK) {
        frames.push(Frame::Disclose { entries: chunk.to_vec() });
    }
    frames.push(Frame::DiscloseEnd);

    // usage per (slot, claimed sign), for the residual closure
    let mut usage: BTreeMap<(u64, bool), u64> = BTreeMap::new();
    let mut lie_budget = sign_lie;
    for unit in &bundle.units {
        match &unit.target {
            UnitTarget::Terminal(t) => frames.push(Frame::TerminalStart { terminal: *t }),
            UnitTarget::Set(i, _) => frames.push(Frame::SetStart { index: *i }),
        }
        for group in &unit.groups {
            frames.push(Frame::VertexStart {
                vertex: group.vertex,
                layer: group.layer,
                disclosure: group_disclosure(cfg.mode, &unit.target, group),
            });
            for p in &group.paths {
                let mut negative = Vec::with_capacity(p.len() - 1);
                for w in p.windows(2) {
                    let slot = edge_slot(w[0].min(w[1]), w[0].max(w[1]));
                    let mut neg = sign_of.get(&slot).copied().unwrap_or(false);
                    if lie_budget {
                        neg = !neg;
                        lie_budget = false;
                    }
                    *usage.entry((slot, neg)).or_default() += 1;
                    negative.push(neg);
                }
                frames.push(Frame::Path { vertices: p.clone(), negative });
            }
        }
        frames.push(Frame::TerminalEnd);
    }

    // residuals drain the scaled disclosure minus the actual usage
    let scale = BigUint::from(cfg.n as u64 * cfg.n as u64);
    let mut residual = Vec::new();
    for (slot, m) in table {
        let neg = m.is_negative();
        let scaled = m.magnitude() * &scale;
        let used = BigUint::from(usage.get(&(*slot, neg)).copied().unwrap_or(0));
        debug_assert!(used <= scaled, "edge used more often than its scaled multiplicity");
        let rem = &scaled - &used;
        if !rem.is_zero() {
            residual.push((*slot, neg, rem));
        }
    }
    for chunk in residual.chunks(DISCLOSE_CHUNK) {
        frames.push(Frame::Residual { entries: chunk.to_vec() });
    }
    frames.push(Frame::End);
    frames
}

/// Frame sequence of one explicit single-terminal layered proof (used to
/// drive the verifier over proofs produced by [`layering_prove`]).
pub fn layered_proof_frames(graph: &ExactGraph, proof: &LayeredProof) -> Vec<Frame> {
    let cfg = single_terminal_config(graph.n, proof);
    let bundle = Bundle {
        claim: true,
        cut: None,
        layer_seed: proof.layer_seed,
        units: vec![ProofUnit {
            target: UnitTarget::Terminal(proof.terminal),
            groups: proof.groups.clone(),
            path_edges: proof.total_path_edges,
        }],
        retries: proof.retries,
    };
    bundle_to_frames(&support_table(graph), &bundle, &cfg, false)
}

/// Scheme configuration equivalent to "verify this one layered proof".
pub fn single_terminal_config(n: u32, proof: &LayeredProof) -> SchemeConfig {
    SchemeConfig {
        scheme: match proof.mode {
            DisjointMode::Vertex => super::SchemeId::KVertexConn,
            DisjointMode::Edge => super::SchemeId::KEdgeConn,
        },
        mode: proof.mode,
        n,
        k: proof.k_param,
        k_param: proof.k_param,
        terminals: TerminalSpec::Public(vec![proof.terminal]),
    }
}

// ---------------------------------------------------------------------------
// behaviors
// ---------------------------------------------------------------------------

/// Compose the full frame sequence for the requested behavior.
pub fn compose(
    graph: &ExactGraph,
    cfg: &SchemeConfig,
    behavior: ProverBehavior,
    seed: u64,
) -> Result<(Vec<Frame>, ProverStats), ProtocolError> {
    let mut table = support_table(graph);
    match behavior {
        ProverBehavior::Honest => {
            let bundle = honest_bundle(graph, cfg, seed)?;
            let stats = bundle_stats(&bundle);
            Ok((bundle_to_frames(&table, &bundle, cfg, false), stats))
        }
        ProverBehavior::Tamper(class) => {
            let (bundle, sign_lie) = tampered_bundle(graph, cfg, seed, class, &mut table)?;
            let stats = bundle_stats(&bundle);
            Ok((bundle_to_frames(&table, &bundle, cfg, sign_lie), stats))
        }
    }
}

fn bundle_stats(bundle: &Bundle) -> ProverStats {
    ProverStats {
        retries: bundle.retries,
        path_lens: bundle.units.iter().map(|u| u.path_edges).collect(),
    }
}

fn honest_bundle(
    graph: &ExactGraph,
    cfg: &SchemeConfig,
    seed: u64,
) -> Result<Bundle, ProtocolError> {
    // for the gap scheme the positive branch requires the stronger promise
    let connected = is_k_connected(graph, cfg.k_param, cfg.mode)?;
    if connected {
        compose_layer_bundle(graph, cfg, seed, false)
    } else {
        let cut = prove_not_k_connected(graph, cfg.k, cfg.mode)?;
        Ok(Bundle { claim: false, cut: Some(cut), layer_seed: 0, units: Vec::new(), retries: 0 })
    }
}

fn tampered_bundle(
    graph: &ExactGraph,
    cfg: &SchemeConfig,
    seed: u64,
    class: TamperClass,
    table: &mut Vec<(u64, BigInt)>,
) -> Result<(Bundle, bool), ProtocolError> {
    let fail = |m: &str| ProtocolError::BadParams(format!("tamper not applicable: {m}"));
    match class {
        TamperClass::UndersizedCut => {
            if !is_k_connected(graph, cfg.k, cfg.mode)? {
                return Err(fail("needs a k-connected graph"));
            }
            let cut_vertices: Vec<u32> = match cfg.mode {
                DisjointMode::Vertex => (0..cfg.k - 1).collect(),
                DisjointMode::Edge => Vec::new(),
            };
            let cut_edges: Vec<(u32, u32)> = match cfg.mode {
                DisjointMode::Vertex => Vec::new(),
                DisjointMode::Edge => {
                    graph.edges().take(cfg.k as usize - 1).collect()
                }
            };
            let side = vec![(0..cfg.n).find(|v| !cut_vertices.contains(v)).unwrap()];
            let cut = CutProof { mode: cfg.mode, cut_vertices, cut_edges, side };
            Ok((
                Bundle { claim: false, cut: Some(cut), layer_seed: 0, units: Vec::new(), retries: 0 },
                false,
            ))
        }
        TamperClass::ClaimTrueNotConnected => {
            if is_k_connected(graph, cfg.k_param, cfg.mode)? {
                return Err(fail("needs a graph that is not k-connected"));
            }
            Ok((compose_layer_bundle(graph, cfg, seed, true)?, false))
        }
        TamperClass::MultiplicityLie => {
            let bundle = honest_bundle(graph, cfg, seed)?;
            let entry = table.first_mut().ok_or_else(|| fail("empty support"))?;
            // keep the multiplicity non-zero so the entry stays well-formed
            entry.1 += 1;
            if entry.1.is_zero() {
                entry.1 += 1;
            }
            Ok((bundle, false))
        }
        TamperClass::SignLie => {
            let bundle = honest_bundle(graph, cfg, seed)?;
            if !bundle.claim {
                return Err(fail("needs the connected branch"));
            }
            Ok((bundle, true))
        }
        TamperClass::TerminalDuplication => {
            let mut bundle = honest_bundle(graph, cfg, seed)?;
            if bundle.units.len() < 2 {
                return Err(fail("needs at least two terminals"));
            }
            bundle.units[1].target = bundle.units[0].target.clone();
            Ok((bundle, false))
        }
        TamperClass::EdgeNotInInput => {
            let mut bundle = honest_bundle(graph, cfg, seed)?;
            if !bundle.claim {
                return Err(fail("needs the connected branch"));
            }
            let n = cfg.n;
            'search: for unit in &mut bundle.units {
                for group in &mut unit.groups {
                    let v = group.vertex;
                    let w = *group.paths[0].last().unwrap();
                    for z in 0..n {
                        if z == v || z == w {
                            continue;
                        }
                        if !graph.has_edge(v, z) || !graph.has_edge(z, w) {
                            group.paths[0] = vec![v, z, w];
                            break 'search;
                        }
                    }
                }
                return Err(fail("graph too dense to fabricate a missing edge"));
            }
            Ok((bundle, false))
        }
        TamperClass::NonDisjointPaths => {
            let mut bundle = honest_bundle(graph, cfg, seed)?;
            if !bundle.claim {
                return Err(fail("needs the connected branch"));
            }
            if cfg.k_param < 2 {
                return Err(fail("needs k >= 2"));
            }
            let unit = &mut bundle.units[0];
            let group = &mut unit.groups[0];
            // reuse a vertex (or edge) of path 0 inside path 1
            let shared = group.paths[0].clone();
            group.paths[1] = shared;
            Ok((bundle, false))
        }
        TamperClass::BrokenPath => {
            let mut bundle = honest_bundle(graph, cfg, seed)?;
            if !bundle.claim {
                return Err(fail("needs the connected branch"));
            }
            let params = cfg.layer_params();
            let layer_seed = bundle.layer_seed;
            // an endpoint is valid iff it hits the previous layer (or the
            // unit terminal); pick a truncation that provably violates that
            let endpoint_ok = |target: &UnitTarget, layer: u32, end: u32| -> bool {
                match target {
                    UnitTarget::Terminal(t) if layer == 0 => end == *t,
                    UnitTarget::Terminal(t) => {
                        end == *t || layer_member(layer_seed, params, layer - 1, end)
                    }
                    UnitTarget::Set(_, set) if layer == 0 => set.contains(&end),
                    UnitTarget::Set(_, set) => {
                        set.contains(&end)
                            || layer_member(layer_seed, params, layer - 1, end)
                    }
                }
            };
            'out: for unit in &mut bundle.units {
                let target = unit.target.clone();
                for group in &mut unit.groups {
                    for p in &mut group.paths {
                        if p.len() >= 3 && !endpoint_ok(&target, group.layer, p[p.len() - 2]) {
                            p.pop();
                            break 'out;
                        }
                    }
                }
                // fall back to bouncing a path back to its start vertex,
                // which is never a valid endpoint of its own group
                let group = &mut unit.groups[0];
                let w = group.paths[0][1];
                group.paths[0] = vec![group.vertex, w, group.vertex];
                break;
            }
            Ok((bundle, false))
        }
    }
}
