//! Exact brute-force reference implementations: support extraction,
//! connected components, global min cut, vertex connectivity and disjoint
//! path extraction.
//!
//! These are the ground truth for every statistical test in the crate and
//! the computation engine of the honest prover. No attempt is made to be
//! fast beyond a few hundred vertices.

use crate::stream::{Model, Stream, Token};
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("operation needs an SGT stream")]
    NotSgt,
    #[error("operation needs an element stream")]
    NotElem,
    #[error("graph too small: {0}")]
    TooSmall(String),
    #[error("bad query: {0}")]
    BadQuery(String),
}

/// Exact support graph: vertex count plus the non-zero frequency of every
/// touched edge slot. Zero-frequency slots are absent by construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactGraph {
    pub n: u32,
    pub support: BTreeMap<(u32, u32), BigInt>,
}

impl ExactGraph {
    pub fn from_edges(n: u32, edges: &[(u32, u32)]) -> Self {
        let mut support = BTreeMap::new();
        for &(a, b) in edges {
            assert!(a != b && a < n && b < n);
            let key = if a < b { (a, b) } else { (b, a) };
            support.insert(key, BigInt::from(1));
        }
        ExactGraph { n, support }
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        let key = if a < b { (a, b) } else { (b, a) };
        self.support.contains_key(&key)
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.support.keys().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.support.len()
    }

    /// Sorted adjacency lists of the support graph.
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.n as usize];
        for &(u, v) in self.support.keys() {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        adj
    }

    pub fn degree_min(&self) -> u32 {
        self.adjacency().iter().map(|a| a.len() as u32).min().unwrap_or(0)
    }
}

/// Exact frequency vector of an SGT stream as a support graph.
pub fn exact_support(stream: &Stream) -> Result<ExactGraph, OracleError> {
    let n = match stream.header.model {
        Model::Sgt { n } => n,
        Model::Elem { .. } => return Err(OracleError::NotSgt),
    };
    let mut freq: BTreeMap<(u32, u32), BigInt> = BTreeMap::new();
    for t in &stream.tokens {
        match t {
            Token::Edge { u, v, delta } => {
                let e = freq.entry((*u, *v)).or_insert_with(BigInt::zero);
                *e += delta;
            }
            Token::Elem { .. } => return Err(OracleError::NotSgt),
        }
    }
    freq.retain(|_, f| !f.is_zero());
    Ok(ExactGraph { n, support: freq })
}

/// Exact frequency vector of an element stream.
pub fn exact_elem_support(stream: &Stream) -> Result<BTreeMap<u64, BigInt>, OracleError> {
    if !matches!(stream.header.model, Model::Elem { .. }) {
        return Err(OracleError::NotElem);
    }
    let mut freq: BTreeMap<u64, BigInt> = BTreeMap::new();
    for t in &stream.tokens {
        if let Token::Elem { index, delta } = t {
            *freq.entry(*index).or_insert_with(BigInt::zero) += delta;
        }
    }
    freq.retain(|_, f| !f.is_zero());
    Ok(freq)
}

/// A partition of the vertex set; every vertex is labelled with the minimum
/// vertex id of its component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub labels: Vec<u32>,
}

impl Partition {
    pub fn count(&self) -> usize {
        let mut set: Vec<u32> = self.labels.clone();
        set.sort_unstable();
        set.dedup();
        set.len()
    }

    pub fn same_component(&self, a: u32, b: u32) -> bool {
        self.labels[a as usize] == self.labels[b as usize]
    }

    pub fn groups(&self) -> Vec<Vec<u32>> {
        let mut map: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for (v, &l) in self.labels.iter().enumerate() {
            map.entry(l).or_default().push(v as u32);
        }
        map.into_values().collect()
    }
}

/// Connected components of the support graph via union-find.
pub fn components(graph: &ExactGraph) -> Partition {
    let mut uf = crate::graph::UnionFind::new(graph.n as usize);
    for &(u, v) in graph.support.keys() {
        uf.union(u as usize, v as usize);
    }
    let mut min_of = vec![u32::MAX; graph.n as usize];
    for v in 0..graph.n {
        let r = uf.find(v as usize);
        min_of[r] = min_of[r].min(v);
    }
    let labels = (0..graph.n).map(|v| min_of[uf.find(v as usize)]).collect();
    Partition { labels }
}

/// Global edge connectivity of the (unweighted) support graph, by
/// Stoer–Wagner. Returns 0 for disconnected graphs; errors for `n < 2`.
pub fn min_cut(graph: &ExactGraph) -> Result<u32, OracleError> {
    let n = graph.n as usize;
    if n < 2 {
        return Err(OracleError::TooSmall("min_cut needs n >= 2".into()));
    }
    if components(graph).count() > 1 {
        return Ok(0);
    }
    // dense weight matrix; weights stay small (unit multiplicities)
    let mut w = vec![vec![0u64; n]; n];
    for &(u, v) in graph.support.keys() {
        w[u as usize][v as usize] = 1;
        w[v as usize][u as usize] = 1;
    }
    let mut active: Vec<usize> = (0..n).collect();
    let mut best = u64::MAX;
    while active.len() > 1 {
        // maximum-adjacency ordering
        let mut order = Vec::with_capacity(active.len());
        let mut in_a = vec![false; n];
        let mut key = vec![0u64; n];
        for _ in 0..active.len() {
            let mut pick = usize::MAX;
            for &v in &active {
                if !in_a[v] && (pick == usize::MAX || key[v] > key[pick]) {
                    pick = v;
                }
            }
            in_a[pick] = true;
            order.push(pick);
            for &v in &active {
                if !in_a[v] {
                    key[v] += w[pick][v];
                }
            }
        }
        let t = *order.last().unwrap();
        let s = order[order.len() - 2];
        best = best.min(key[t]);
        // merge t into s
        for &v in &active {
            if v != s && v != t {
                w[s][v] += w[t][v];
                w[v][s] = w[s][v];
            }
        }
        active.retain(|&v| v != t);
    }
    Ok(best as u32)
}

/// Which notion of disjointness a path query uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DisjointMode {
    Vertex,
    Edge,
}

// ---------------------------------------------------------------------------
// unit-capacity max flow with deterministic lexicographic augmentation
// ---------------------------------------------------------------------------

struct FlowNet {
    adj: Vec<Vec<u32>>,
    to: Vec<u32>,
    residual: Vec<i64>,
}

impl FlowNet {
    fn new(nodes: usize) -> Self {
        FlowNet { adj: vec![Vec::new(); nodes], to: Vec::new(), residual: Vec::new() }
    }

    /// Add an arc pair: forward capacity `cap_fwd`, backward `cap_bwd`.
    /// Undirected unit edges use `(1, 1)`; directed unit arcs `(1, 0)`.
    fn add_pair(&mut self, u: usize, v: usize, cap_fwd: i64, cap_bwd: i64) -> usize {
        let idx = self.to.len();
        self.to.push(v as u32);
        self.residual.push(cap_fwd);
        self.to.push(u as u32);
        self.residual.push(cap_bwd);
        self.adj[u].push(idx as u32);
        self.adj[v].push(idx as u32 + 1);
        idx
    }

    fn sort_adjacency(&mut self) {
        let to = &self.to;
        for list in &mut self.adj {
            list.sort_by_key(|&a| (to[a as usize], a));
        }
    }

    /// One augmentation along the lexicographically smallest shortest path;
    /// returns false when the sink is unreachable.
    fn augment(&mut self, s: usize, t: usize) -> bool {
        let n = self.adj.len();
        // reverse BFS from t over residual arcs
        let mut dist = vec![u32::MAX; n];
        dist[t] = 0;
        let mut queue = std::collections::VecDeque::from([t]);
        while let Some(v) = queue.pop_front() {
            for &a in &self.adj[v] {
                // arc a leaves v; a^1 enters v — usable if residual(a^1) > 0
                let u = self.to[a as usize] as usize;
                if dist[u] == u32::MAX && self.residual[(a ^ 1) as usize] > 0 {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        if dist[s] == u32::MAX {
            return false;
        }
        // greedy walk: smallest next vertex strictly decreasing dist
        let mut path = Vec::new();
        let mut v = s;
        while v != t {
            let mut chosen = None;
            for &a in &self.adj[v] {
                let u = self.to[a as usize] as usize;
                if self.residual[a as usize] > 0 && dist[u] + 1 == dist[v] {
                    chosen = Some(a);
                    break; // adjacency sorted by target
                }
            }
            let a = chosen.expect("augmenting path must exist");
            path.push(a);
            v = self.to[a as usize] as usize;
        }
        for a in path {
            self.residual[a as usize] -= 1;
            self.residual[(a ^ 1) as usize] += 1;
        }
        true
    }

    fn max_flow(&mut self, s: usize, t: usize, limit: u32) -> u32 {
        self.sort_adjacency();
        let mut flow = 0;
        while flow < limit && self.augment(s, t) {
            flow += 1;
        }
        flow
    }

    /// Nodes reachable from `s` in the residual graph.
    fn residual_reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(v) = stack.pop() {
            for &a in &self.adj[v] {
                let u = self.to[a as usize] as usize;
                if !seen[u] && self.residual[a as usize] > 0 {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen
    }
}

/// Flow network for disjoint s-t paths. Node layout:
/// * edge mode: node v = vertex v; extra nodes appended for virtual sinks.
/// * vertex mode: v_in = 2v, v_out = 2v + 1; interior capacity 1 except at
///   protected endpoints.
struct PathNet {
    net: FlowNet,
    /// residuals at construction time, for flow-decomposition bookkeeping
    initial: Vec<i64>,
    mode: DisjointMode,
    source: usize,
    sink: usize,
}

fn build_path_net(
    graph: &ExactGraph,
    s: u32,
    targets: &[u32],
    mode: DisjointMode,
    k: u32,
    shared_target: bool,
) -> PathNet {
    let n = graph.n as usize;
    match mode {
        DisjointMode::Edge => {
            // vertices 0..n, super-sink n
            let mut net = FlowNet::new(n + 1);
            for &(u, v) in graph.support.keys() {
                net.add_pair(u as usize, v as usize, 1, 1);
            }
            let sink = n;
            for &t in targets {
                net.add_pair(t as usize, sink, k as i64, 0);
            }
            let initial = net.residual.clone();
            PathNet { net, initial, mode, source: s as usize, sink }
        }
        DisjointMode::Vertex => {
            let mut net = FlowNet::new(2 * n + 1);
            let inf = graph.n as i64 + 1;
            for v in 0..n {
                // endpoints of a vertex-disjoint family may be shared only
                // when the query targets one common terminal
                let unsplit =
                    v as u32 == s || (shared_target && targets.contains(&(v as u32)));
                let cap = if unsplit { inf } else { 1 };
                net.add_pair(2 * v, 2 * v + 1, cap, 0);
            }
            for &(u, v) in graph.support.keys() {
                net.add_pair(2 * u as usize + 1, 2 * v as usize, 1, 0);
                net.add_pair(2 * v as usize + 1, 2 * u as usize, 1, 0);
            }
            let sink = 2 * n;
            for &t in targets {
                net.add_pair(2 * t as usize + 1, sink, k as i64, 0);
            }
            let initial = net.residual.clone();
            PathNet { net, initial, mode, source: 2 * s as usize + 1, sink }
        }
    }
}

impl PathNet {
    /// Decompose the current integral flow into paths of original vertices
    /// ending at a target. Flow cycles are consumed and discarded via loop
    /// erasure.
    fn decompose(&mut self, flow: u32) -> Vec<Vec<u32>> {
        let mut paths = Vec::new();
        for _ in 0..flow {
            let mut nodes = vec![self.source];
            let mut v = self.source;
            while v != self.sink {
                let mut advanced = false;
                for &a in &self.net.adj[v] {
                    let ai = a as usize;
                    // net forward usage: residual dropped below construction value
                    if self.initial[ai] > self.net.residual[ai] {
                        self.net.residual[ai] += 1;
                        self.net.residual[ai ^ 1] -= 1;
                        v = self.net.to[ai] as usize;
                        if let Some(pos) = nodes.iter().position(|&x| x == v) {
                            nodes.truncate(pos + 1);
                        } else {
                            nodes.push(v);
                        }
                        advanced = true;
                        break;
                    }
                }
                assert!(advanced, "flow decomposition stuck");
            }
            paths.push(self.to_vertices(&nodes));
        }
        paths
    }

    fn to_vertices(&self, nodes: &[usize]) -> Vec<u32> {
        let mut out = Vec::new();
        for &nd in nodes {
            if nd == self.sink {
                continue;
            }
            let v = match self.mode {
                DisjointMode::Edge => nd as u32,
                DisjointMode::Vertex => (nd / 2) as u32,
            };
            if out.last() != Some(&v) {
                out.push(v);
            }
        }
        out
    }
}

/// Maximum number of pairwise disjoint s→t paths (Menger value), capped at
/// `limit`.
pub fn disjoint_path_count(
    graph: &ExactGraph,
    s: u32,
    t: u32,
    mode: DisjointMode,
    limit: u32,
) -> u32 {
    assert!(s != t);
    let mut pn = build_path_net(graph, s, &[t], mode, limit, true);
    pn.net.max_flow(pn.source, pn.sink, limit)
}

/// `k` pairwise disjoint paths from `s` to `t` (sharing only `s` and `t` in
/// vertex mode), or `None` iff fewer exist. Paths are re-validated before
/// being returned.
pub fn disjoint_paths(
    graph: &ExactGraph,
    s: u32,
    t: u32,
    k: u32,
    mode: DisjointMode,
) -> Result<Option<Vec<Vec<u32>>>, OracleError> {
    if s == t || s >= graph.n || t >= graph.n {
        return Err(OracleError::BadQuery(format!("bad endpoints {s}, {t}")));
    }
    Ok(disjoint_paths_inner(graph, s, &[t], k, mode, true))
}

/// `k` pairwise disjoint paths from `s`, each ending at a vertex of
/// `targets` (truncated at the first target hit), or `None` iff fewer exist.
/// In vertex mode the path endpoints are pairwise distinct.
pub fn disjoint_paths_to_set(
    graph: &ExactGraph,
    s: u32,
    targets: &[u32],
    k: u32,
    mode: DisjointMode,
) -> Option<Vec<Vec<u32>>> {
    disjoint_paths_inner(graph, s, targets, k, mode, false)
}

fn disjoint_paths_inner(
    graph: &ExactGraph,
    s: u32,
    targets: &[u32],
    k: u32,
    mode: DisjointMode,
    shared_target: bool,
) -> Option<Vec<Vec<u32>>> {
    if k == 0 {
        return Some(Vec::new());
    }
    if targets.is_empty() {
        return None;
    }
    let mut pn = build_path_net(graph, s, targets, mode, k, shared_target);
    let flow = pn.net.max_flow(pn.source, pn.sink, k);
    if flow < k {
        return None;
    }
    let target_set: std::collections::HashSet<u32> = targets.iter().copied().collect();
    let mut paths = pn.decompose(k);
    for p in &mut paths {
        if let Some(pos) = p.iter().position(|v| target_set.contains(v)) {
            p.truncate(pos + 1);
        }
    }
    let shared = if shared_target && targets.len() == 1 { Some(targets[0]) } else { None };
    debug_assert!(validate_disjoint_paths(graph, s, &target_set, &paths, mode, shared));
    Some(paths)
}

/// Literal re-validation: every path edge is in the support, every path runs
/// from `s` to a target, and the collection is disjoint in the given mode.
/// `shared_terminal` names the one vertex that path endpoints may share.
pub fn validate_disjoint_paths(
    graph: &ExactGraph,
    s: u32,
    targets: &std::collections::HashSet<u32>,
    paths: &[Vec<u32>],
    mode: DisjointMode,
    shared_terminal: Option<u32>,
) -> bool {
    let mut seen_vertices = std::collections::HashSet::new();
    let mut seen_edges = std::collections::HashSet::new();
    for p in paths {
        if p.len() < 2 || p[0] != s || !targets.contains(p.last().unwrap()) {
            return false;
        }
        for w in p.windows(2) {
            if !graph.has_edge(w[0], w[1]) {
                return false;
            }
            let key = (w[0].min(w[1]), w[0].max(w[1]));
            if mode == DisjointMode::Edge && !seen_edges.insert(key) {
                return false;
            }
        }
        if mode == DisjointMode::Vertex {
            for (i, &v) in p.iter().enumerate().skip(1) {
                if v == s {
                    return false;
                }
                if i == p.len() - 1 && Some(v) == shared_terminal {
                    continue; // endpoints may share the common terminal
                }
                if !seen_vertices.insert(v) {
                    return false;
                }
            }
        }
    }
    true
}

/// A minimum-size witness that the graph is not k-connected in the given
/// mode: the cut (vertices or edges) plus one side `S` of the partition it
/// induces. `None` when the graph is k-connected in that mode.
pub fn find_cut_below(
    graph: &ExactGraph,
    k: u32,
    mode: DisjointMode,
) -> Result<Option<(Vec<u32>, Vec<(u32, u32)>, Vec<u32>)>, OracleError> {
    if graph.n < 2 {
        return Err(OracleError::TooSmall("cut search needs n >= 2".into()));
    }
    let connectivity = match mode {
        DisjointMode::Vertex => vertex_connectivity(graph)?,
        DisjointMode::Edge => min_cut(graph)?,
    };
    if connectivity >= k {
        return Ok(None);
    }
    if connectivity == 0 {
        // disconnected: the empty cut with the first component as S
        let side = components(graph).groups().into_iter().next().unwrap();
        return Ok(Some((Vec::new(), Vec::new(), side)));
    }
    match mode {
        DisjointMode::Vertex => {
            for s in 0..graph.n {
                for t in 0..graph.n {
                    if s == t || graph.has_edge(s, t) {
                        continue;
                    }
                    // dedicated network with unbounded edge arcs: a minimum
                    // cut then consists of saturated split arcs only, which
                    // is exactly the vertex cut (valid for non-adjacent
                    // pairs)
                    let n = graph.n as usize;
                    let inf = graph.n as i64 + 1;
                    let mut net = FlowNet::new(2 * n);
                    for v in 0..n {
                        let cap = if v as u32 == s || v as u32 == t { inf } else { 1 };
                        net.add_pair(2 * v, 2 * v + 1, cap, 0);
                    }
                    for &(a, b) in graph.support.keys() {
                        net.add_pair(2 * a as usize + 1, 2 * b as usize, inf, 0);
                        net.add_pair(2 * b as usize + 1, 2 * a as usize, inf, 0);
                    }
                    let (source, sink) = (2 * s as usize + 1, 2 * t as usize);
                    let flow = net.max_flow(source, sink, graph.n);
                    if flow != connectivity {
                        continue;
                    }
                    let reach = net.residual_reachable(source);
                    let cut: Vec<u32> = (0..graph.n)
                        .filter(|&v| {
                            v != s && v != t && reach[2 * v as usize] && !reach[2 * v as usize + 1]
                        })
                        .collect();
                    debug_assert_eq!(cut.len() as u32, connectivity);
                    // S = component of s after deleting the cut
                    let adj = graph.adjacency();
                    let mut in_cut = vec![false; graph.n as usize];
                    for &v in &cut {
                        in_cut[v as usize] = true;
                    }
                    let mut side = Vec::new();
                    let mut seen = vec![false; graph.n as usize];
                    let mut stack = vec![s];
                    seen[s as usize] = true;
                    while let Some(v) = stack.pop() {
                        side.push(v);
                        for &w in &adj[v as usize] {
                            if !seen[w as usize] && !in_cut[w as usize] {
                                seen[w as usize] = true;
                                stack.push(w);
                            }
                        }
                    }
                    side.sort_unstable();
                    return Ok(Some((cut, Vec::new(), side)));
                }
            }
            Err(OracleError::BadQuery("vertex cut extraction failed".into()))
        }
        DisjointMode::Edge => {
            for t in 1..graph.n {
                let mut pn = build_path_net(graph, 0, &[t], DisjointMode::Edge, graph.n, true);
                let flow = pn.net.max_flow(pn.source, pn.sink, graph.n);
                if flow != connectivity {
                    continue;
                }
                let reach = pn.net.residual_reachable(pn.source);
                let side: Vec<u32> = (0..graph.n).filter(|&v| reach[v as usize]).collect();
                let cut: Vec<(u32, u32)> = graph
                    .edges()
                    .filter(|&(u, v)| reach[u as usize] != reach[v as usize])
                    .collect();
                debug_assert_eq!(cut.len() as u32, connectivity);
                return Ok(Some((Vec::new(), cut, side)));
            }
            Err(OracleError::BadQuery("edge cut extraction failed".into()))
        }
    }
}

/// Vertex connectivity of the support graph: `n - 1` for complete graphs,
/// otherwise the minimum over non-adjacent pairs of the vertex-disjoint path
/// count (Menger). Errors for `n < 1`.
pub fn vertex_connectivity(graph: &ExactGraph) -> Result<u32, OracleError> {
    let n = graph.n;
    if n == 0 {
        return Err(OracleError::TooSmall("vertex connectivity needs n >= 1".into()));
    }
    if n == 1 {
        return Ok(0);
    }
    let slots = n as u64 * (n as u64 - 1) / 2;
    if graph.support.len() as u64 == slots {
        return Ok(n - 1);
    }
    if components(graph).count() > 1 {
        return Ok(0);
    }
    let mut best = graph.degree_min();
    for s in 0..n {
        for t in s + 1..n {
            if !graph.has_edge(s, t) {
                let f = disjoint_path_count(graph, s, t, DisjointMode::Vertex, best);
                best = best.min(f);
                if best == 0 {
                    return Ok(0);
                }
            }
        }
    }
    Ok(best)
}
