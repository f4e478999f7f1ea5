//! Streaming verifier shared by every scheme.
//!
//! State is a handful of small sketches plus O(n)-bit bookkeeping: an
//! equality sketch checking the upfront disclosure against the input
//! stream, a pair of scaled sign samplers for the consumption check, and a
//! transient per-group equality sketch for the disjointness check. No proof
//! frame is retained beyond its processing; the peak of
//! (state + current frame) is the measured vcost.

use super::frames::Frame;
use super::layering::{layer_member, LayerParams};
use super::{RejectReason, SchemeConfig, TerminalSpec, Verdict};
use crate::graph::{edge_slot, slot_endpoints};
use crate::l0::{EqualitySketch, L0Sketch, SketchShape};
use crate::oracle::DisjointMode;
use crate::prf::{self, Domain};
use crate::stream::{Stream, StreamHeader, Token};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Repetition counts for the verifier's sketches; sized so the whole
/// verifier state stays within a few tens of KiB at n = 64 while keeping
/// the per-tamper detection probability comfortably above 0.9.
const VER_REPS: u32 = 3;
const VER_DET_REPS: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    AwaitClaim,
    AwaitCut,
    AwaitLayerSeed,
    Disclose,
    Units,
    Residual,
    CutDisclose,
    CutDone,
    Done,
}

/// Ordering tracker for sign-major ascending slot lists.
#[derive(Clone, Debug, Default)]
struct SignMajorOrder {
    in_negative_block: bool,
    last_slot: Option<u64>,
}

impl SignMajorOrder {
    fn accept(&mut self, slot: u64, negative: bool) -> bool {
        if negative && !self.in_negative_block {
            self.in_negative_block = true;
            self.last_slot = None;
        } else if !negative && self.in_negative_block {
            return false; // positive entry after the negative block started
        }
        let ok = self.last_slot.is_none_or(|prev| slot > prev);
        self.last_slot = Some(slot);
        ok
    }
}

struct GroupState {
    vertex: u32,
    layer: u32,
    sketch: EqualitySketch,
    paths_seen: u32,
    /// vertex-mode paths that contributed nothing to the disjointness
    /// multiset (possible only for the bare terminal edge; at most one
    /// such path is coherent)
    zero_contribution: u32,
}

struct CutState {
    in_cut_vertex: Vec<bool>,
    in_side: Vec<bool>,
    cut_edges: Vec<(u32, u32)>,
    cut_edge_seen: Vec<bool>,
}

pub struct Verifier {
    cfg: SchemeConfig,
    slots: u64,
    phase: Phase,
    /// disclosure equality: +stream tokens, −disclosed multiplicities
    input_eq: EqualitySketch,
    /// scaled consumption samplers by claimed sign
    pos: L0Sketch,
    neg: L0Sketch,
    disclose_order: SignMajorOrder,
    residual_order: SignMajorOrder,
    layer_seed: u64,
    cut: Option<CutState>,
    current_set: Vec<bool>,
    units_done: u32,
    unit_terminal: Option<u32>,
    unit_open: bool,
    last_terminal: Option<u32>,
    last_vertex: Option<u32>,
    proved_in_unit: u32,
    group: Option<GroupState>,
    vcost_peak: u64,
}

impl Verifier {
    pub fn new(header: &StreamHeader, cfg: SchemeConfig, seed: u64) -> Verifier {
        let n = cfg.n as u64;
        let slots = (n * (n - 1) / 2).max(1);
        let alpha_bits = header.alpha.bits().max(1);
        // the samplers hold multiplicities scaled by n², hence the wider bound
        let scaled_bits = alpha_bits + 2 * (64 - n.leading_zeros() as u64) + 1;
        let eq_shape = SketchShape::custom(slots, alpha_bits + 1, VER_REPS, VER_DET_REPS);
        let sampler_shape = SketchShape::custom(slots, scaled_bits, VER_REPS, VER_DET_REPS);
        Verifier {
            slots,
            input_eq: EqualitySketch::new(eq_shape, prf::hash(seed, Domain::CounterSeed, 10, 0)),
            pos: L0Sketch::new(sampler_shape, prf::hash(seed, Domain::CounterSeed, 11, 0)),
            neg: L0Sketch::new(sampler_shape, prf::hash(seed, Domain::CounterSeed, 12, 0)),
            disclose_order: SignMajorOrder::default(),
            residual_order: SignMajorOrder::default(),
            layer_seed: 0,
            cut: None,
            current_set: Vec::new(),
            units_done: 0,
            unit_terminal: None,
            unit_open: false,
            last_terminal: None,
            last_vertex: None,
            proved_in_unit: 0,
            group: None,
            phase: Phase::AwaitClaim,
            vcost_peak: 0,
            cfg,
        }
    }

    /// Stream-ingestion phase: fill the input-equality sketch.
    pub fn ingest_stream(&mut self, stream: &Stream) {
        for t in &stream.tokens {
            if let Token::Edge { u, v, delta } = t {
                self.input_eq.insert(edge_slot(*u, *v), delta).expect("slot in range");
            }
        }
        self.note_cost(0);
    }

    pub fn vcost_peak_bits(&self) -> u64 {
        self.vcost_peak
    }

    fn state_bits(&self) -> u64 {
        let mut bits = self.input_eq.state_bits() + self.pos.state_bits() + self.neg.state_bits();
        if let Some(g) = &self.group {
            bits += g.sketch.state_bits();
        }
        if self.cut.is_some() {
            bits += 2 * self.cfg.n as u64 + 64 * self.cfg.k as u64;
        }
        bits += self.current_set.len() as u64;
        bits + 1024 // scalars, cursors, orderings
    }

    fn note_cost(&mut self, frame_bits: u64) {
        self.vcost_peak = self.vcost_peak.max(self.state_bits() + frame_bits);
    }

    fn layer_params(&self) -> LayerParams {
        self.cfg.layer_params()
    }

    fn expected_units(&self) -> u32 {
        match &self.cfg.terminals {
            TerminalSpec::Ascending { count } => *count,
            TerminalSpec::Public(list) => list.len() as u32,
            TerminalSpec::Sets(sets) => sets.len() as u32,
        }
    }

    /// Process one frame; `Some(verdict)` ends the run.
    pub fn process(&mut self, frame: &Frame, frame_bits: u64) -> Option<Verdict> {
        let out = self.step(frame);
        self.note_cost(frame_bits);
        if let Some(Verdict::Reject(_)) = out {
            self.phase = Phase::Done;
        }
        out
    }

    fn reject(&mut self, reason: RejectReason) -> Option<Verdict> {
        Some(Verdict::Reject(reason))
    }

    fn step(&mut self, frame: &Frame) -> Option<Verdict> {
        use RejectReason as R;
        match (self.phase, frame) {
            (Phase::AwaitClaim, Frame::Claim { connected }) => {
                self.phase = if *connected { Phase::AwaitLayerSeed } else { Phase::AwaitCut };
                None
            }
            (Phase::AwaitCut, Frame::CutDeclare { cut_vertices, cut_edges, side }) => {
                self.handle_cut_declare(cut_vertices, cut_edges, side)
            }
            (Phase::AwaitLayerSeed, Frame::LayerSeed { seed }) => {
                self.layer_seed = *seed;
                self.phase = Phase::Disclose;
                None
            }
            (Phase::Disclose | Phase::CutDisclose, Frame::Disclose { entries }) => {
                for (slot, mult) in entries {
                    if let Some(v) = self.handle_disclose_entry(*slot, mult) {
                        return Some(v);
                    }
                }
                None
            }
            (Phase::Disclose | Phase::CutDisclose, Frame::DiscloseEnd) => {
                if !self.input_eq.multiset_equal() {
                    return self.reject(R::InputEquality);
                }
                if self.phase == Phase::CutDisclose {
                    let cut = self.cut.as_ref().unwrap();
                    if !cut.cut_edge_seen.iter().all(|&b| b) {
                        return self.reject(R::CutEdgeMissing);
                    }
                    self.phase = Phase::CutDone;
                } else {
                    self.phase = Phase::Units;
                }
                None
            }
            (Phase::CutDone, Frame::End) => {
                self.phase = Phase::Done;
                Some(Verdict::Output(false))
            }
            (Phase::Units, Frame::TerminalStart { terminal }) => {
                self.handle_terminal_start(*terminal)
            }
            (Phase::Units, Frame::SetStart { index }) => self.handle_set_start(*index),
            (Phase::Units, Frame::VertexStart { vertex, layer, disclosure }) => {
                self.handle_vertex_start(*vertex, *layer, disclosure)
            }
            (Phase::Units, Frame::Path { vertices, negative }) => {
                self.handle_path(vertices, negative)
            }
            (Phase::Units, Frame::TerminalEnd) => self.handle_terminal_end(),
            (Phase::Units | Phase::Residual, Frame::Residual { entries }) => {
                if self.unit_open || self.units_done != self.expected_units() {
                    return self.reject(R::Format);
                }
                self.phase = Phase::Residual;
                for (slot, negative, count) in entries {
                    if *slot >= self.slots || count.is_zero() {
                        return self.reject(R::Format);
                    }
                    if !self.residual_order.accept(*slot, *negative) {
                        return self.reject(R::Format);
                    }
                    let delta = -BigInt::from(count.clone());
                    let target = if *negative { &mut self.neg } else { &mut self.pos };
                    target.ingest(*slot, &delta).expect("slot in range");
                }
                None
            }
            (Phase::Units | Phase::Residual, Frame::End) => {
                if self.unit_open || self.units_done != self.expected_units() {
                    return self.reject(R::Format);
                }
                if !(self.pos.total_counter().is_zero()
                    && self.neg.total_counter().is_zero()
                    && self.pos.sample().is_none()
                    && self.neg.sample().is_none())
                {
                    return self.reject(R::Consumption);
                }
                self.phase = Phase::Done;
                Some(Verdict::Output(true))
            }
            _ => self.reject(R::Format),
        }
    }

    fn handle_cut_declare(
        &mut self,
        cut_vertices: &[u32],
        cut_edges: &[(u32, u32)],
        side: &[u32],
    ) -> Option<Verdict> {
        use RejectReason as R;
        let n = self.cfg.n;
        let k = self.cfg.k;
        let (is_vertex_mode, cut_len) = match self.cfg.mode {
            DisjointMode::Vertex => (true, cut_vertices.len()),
            DisjointMode::Edge => (false, cut_edges.len()),
        };
        if is_vertex_mode && !cut_edges.is_empty() {
            return self.reject(R::CutShape);
        }
        if !is_vertex_mode && !cut_vertices.is_empty() {
            return self.reject(R::CutShape);
        }
        if cut_len as u32 >= k {
            return self.reject(R::CutShape);
        }
        if side.is_empty() {
            return self.reject(R::CutShape);
        }
        let mut in_cut_vertex = vec![false; n as usize];
        for &v in cut_vertices {
            if v >= n || in_cut_vertex[v as usize] {
                return self.reject(R::CutShape);
            }
            in_cut_vertex[v as usize] = true;
        }
        for &(u, v) in cut_edges {
            if u >= v || v >= n {
                return self.reject(R::CutShape);
            }
        }
        let mut in_side = vec![false; n as usize];
        for &v in side {
            if v >= n || in_side[v as usize] || in_cut_vertex[v as usize] {
                return self.reject(R::CutShape);
            }
            in_side[v as usize] = true;
        }
        if side.len() + cut_vertices.len() >= n as usize {
            return self.reject(R::CutShape); // the far side T must be non-empty
        }
        self.cut = Some(CutState {
            in_cut_vertex,
            in_side,
            cut_edge_seen: vec![false; cut_edges.len()],
            cut_edges: cut_edges.to_vec(),
        });
        self.phase = Phase::CutDisclose;
        None
    }

    fn handle_disclose_entry(&mut self, slot: u64, mult: &BigInt) -> Option<Verdict> {
        use RejectReason as R;
        if slot >= self.slots || mult.is_zero() {
            return self.reject(R::Format);
        }
        if !self.disclose_order.accept(slot, mult.is_negative()) {
            return self.reject(R::Format);
        }
        self.input_eq.delete(slot, mult).expect("slot in range");
        if self.phase == Phase::CutDisclose {
            // every disclosed support edge must respect the declared cut
            let (a, b) = slot_endpoints(slot);
            let cut = self.cut.as_mut().unwrap();
            let allowed = match self.cfg.mode {
                DisjointMode::Vertex => {
                    cut.in_cut_vertex[a as usize]
                        || cut.in_cut_vertex[b as usize]
                        || cut.in_side[a as usize] == cut.in_side[b as usize]
                }
                DisjointMode::Edge => {
                    if let Some(i) = cut.cut_edges.iter().position(|&e| e == (a, b)) {
                        cut.cut_edge_seen[i] = true;
                        true
                    } else {
                        cut.in_side[a as usize] == cut.in_side[b as usize]
                    }
                }
            };
            if !allowed {
                return self.reject(R::CutCrossing);
            }
        } else {
            let scale = BigInt::from(self.cfg.n as u64 * self.cfg.n as u64);
            let scaled = mult.magnitude() * scale.magnitude();
            let target = if mult.is_negative() { &mut self.neg } else { &mut self.pos };
            target.ingest(slot, &BigInt::from(scaled)).expect("slot in range");
        }
        None
    }

    fn handle_terminal_start(&mut self, terminal: u32) -> Option<Verdict> {
        use RejectReason as R;
        if self.unit_open || terminal >= self.cfg.n {
            return self.reject(R::Format);
        }
        match &self.cfg.terminals {
            TerminalSpec::Ascending { count } => {
                if self.units_done >= *count {
                    return self.reject(R::TerminalOrder);
                }
                if let Some(prev) = self.last_terminal {
                    if terminal <= prev {
                        return self.reject(R::TerminalOrder);
                    }
                }
            }
            TerminalSpec::Public(list) => {
                if self.units_done as usize >= list.len()
                    || list[self.units_done as usize] != terminal
                {
                    return self.reject(R::TerminalOrder);
                }
            }
            TerminalSpec::Sets(_) => return self.reject(R::Format),
        }
        self.last_terminal = Some(terminal);
        self.unit_terminal = Some(terminal);
        self.current_set = Vec::new();
        self.open_unit();
        None
    }

    fn handle_set_start(&mut self, index: u8) -> Option<Verdict> {
        use RejectReason as R;
        if self.unit_open {
            return self.reject(R::Format);
        }
        let sets = match &self.cfg.terminals {
            TerminalSpec::Sets(s) => s,
            _ => return self.reject(R::Format),
        };
        if index as u32 != self.units_done || index as usize >= sets.len() {
            return self.reject(R::TerminalOrder);
        }
        let mut member = vec![false; self.cfg.n as usize];
        for &v in &sets[index as usize] {
            member[v as usize] = true;
        }
        self.current_set = member;
        self.unit_terminal = None;
        self.open_unit();
        None
    }

    fn open_unit(&mut self) {
        self.unit_open = true;
        self.proved_in_unit = 0;
        self.last_vertex = None;
        self.group = None;
    }

    fn close_group(&mut self) -> Option<RejectReason> {
        let group = self.group.take()?;
        if group.paths_seen != self.cfg.k_param {
            return Some(RejectReason::PathCount);
        }
        if self.cfg.mode == DisjointMode::Vertex && group.zero_contribution > 1 {
            return Some(RejectReason::Disjointness);
        }
        if !group.sketch.multiset_equal() {
            return Some(RejectReason::Disjointness);
        }
        self.proved_in_unit += 1;
        None
    }

    fn handle_vertex_start(
        &mut self,
        vertex: u32,
        layer: u32,
        disclosure: &[u64],
    ) -> Option<Verdict> {
        use RejectReason as R;
        if !self.unit_open {
            return self.reject(R::Format);
        }
        if let Some(r) = self.close_group() {
            return self.reject(r);
        }
        let n = self.cfg.n;
        if vertex >= n {
            return self.reject(R::Format);
        }
        if Some(vertex) == self.unit_terminal
            || self.current_set.get(vertex as usize).copied().unwrap_or(false)
        {
            return self.reject(R::Format);
        }
        if let Some(prev) = self.last_vertex {
            if vertex <= prev {
                return self.reject(R::Format);
            }
        }
        self.last_vertex = Some(vertex);
        // the announced layer must be the first sampled one
        let params = self.layer_params();
        if layer > params.levels() || !layer_member(self.layer_seed, params, layer, vertex) {
            return self.reject(R::LayerMembership);
        }
        for below in 0..layer {
            if layer_member(self.layer_seed, params, below, vertex) {
                return self.reject(R::LayerMembership);
            }
        }
        // disjointness disclosure: strictly increasing over the mode universe
        let universe = match self.cfg.mode {
            DisjointMode::Vertex => n as u64,
            DisjointMode::Edge => self.slots,
        };
        let mut prev: Option<u64> = None;
        for &d in disclosure {
            if d >= universe || prev.is_some_and(|p| d <= p) {
                return self.reject(R::Disjointness);
            }
            prev = Some(d);
        }
        let shape = SketchShape::custom(universe, 34, VER_REPS, VER_DET_REPS);
        let group_seed = prf::hash(
            self.layer_seed ^ self.pos.seed(),
            Domain::CounterSeed,
            13,
            ((self.units_done as u64) << 32) | vertex as u64,
        );
        let mut sketch = EqualitySketch::new(shape, group_seed);
        for &d in disclosure {
            sketch.insert_i64(d, 1).expect("range checked");
        }
        self.group =
            Some(GroupState { vertex, layer, sketch, paths_seen: 0, zero_contribution: 0 });
        self.note_cost(0);
        None
    }

    fn handle_path(&mut self, vertices: &[u32], negative: &[bool]) -> Option<Verdict> {
        use RejectReason as R;
        // on any reject the run ends, so the group need not be restored
        let Some(mut group) = self.group.take() else {
            return self.reject(R::Format);
        };
        let n = self.cfg.n;
        if vertices.len() < 2
            || negative.len() != vertices.len() - 1
            || vertices[0] != group.vertex
            || vertices.iter().any(|&v| v >= n)
            || vertices.windows(2).any(|w| w[0] == w[1])
        {
            return self.reject(R::PathStructure);
        }
        if group.paths_seen >= self.cfg.k_param {
            return self.reject(R::PathCount);
        }
        // endpoint lands in the previous layer, or directly at the
        // terminal / terminal set
        let end = *vertices.last().unwrap();
        let at_anchor = match self.unit_terminal {
            Some(t) => end == t,
            None => self.current_set.get(end as usize).copied().unwrap_or(false),
        };
        let params = self.layer_params();
        let ok_end = if group.layer == 0 {
            at_anchor
        } else {
            at_anchor || layer_member(self.layer_seed, params, group.layer - 1, end)
        };
        if !ok_end {
            return self.reject(R::PathEndpoint);
        }
        // consume edges from the sign samplers and feed the group sketch
        let mut contributed = 0u32;
        for (i, w) in vertices.windows(2).enumerate() {
            let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
            let slot = edge_slot(a, b);
            let target = if negative[i] { &mut self.neg } else { &mut self.pos };
            target.ingest_i64(slot, -1).expect("slot in range");
            if self.cfg.mode == DisjointMode::Edge {
                group.sketch.insert_i64(slot, -1).expect("range checked");
                contributed += 1;
            }
        }
        if self.cfg.mode == DisjointMode::Vertex {
            for (i, &w) in vertices.iter().enumerate().skip(1) {
                let is_last = i == vertices.len() - 1;
                if is_last && Some(w) == self.unit_terminal {
                    continue; // endpoints may share the terminal
                }
                group.sketch.insert_i64(w as u64, -1).expect("range checked");
                contributed += 1;
            }
        }
        if contributed == 0 {
            group.zero_contribution += 1;
        }
        group.paths_seen += 1;
        self.group = Some(group);
        None
    }

    fn handle_terminal_end(&mut self) -> Option<Verdict> {
        use RejectReason as R;
        if !self.unit_open {
            return self.reject(R::Format);
        }
        if let Some(r) = self.close_group() {
            return self.reject(r);
        }
        let expected = match (&self.unit_terminal, self.current_set.is_empty()) {
            (Some(_), _) => self.cfg.n - 1,
            (None, false) => {
                self.cfg.n - self.current_set.iter().filter(|&&b| b).count() as u32
            }
            (None, true) => return self.reject(R::Format),
        };
        if self.proved_in_unit != expected {
            return self.reject(R::Coverage);
        }
        self.unit_open = false;
        self.units_done += 1;
        None
    }
}
