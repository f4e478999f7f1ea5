//! Layer-set sampling for the layered connectivity proofs.
//!
//! Layer `i` keeps every vertex independently with probability
//! `min(1, (k/n)·2^i)`, derived from a transmitted layer seed so both
//! parties compute identical sets. The top layer has rate 1, so the layers
//! always cover the vertex set. A vertex's assigned layer is the first one
//! that sampled it; path endpoints must land in the previous layer, which
//! keeps the per-vertex induction well-founded.

use crate::prf::{self, Domain};

/// Seed retries the prover may spend to satisfy the size bound.
pub const MAX_SEED_RETRIES: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LayerParams {
    pub n: u32,
    pub k_param: u32,
}

/// Number of geometric layers above layer 0: the smallest `ℓ` with
/// `k·2^ℓ >= n` (that is, `⌈log₂(n/k)⌉`).
pub fn layer_count(n: u32, k_param: u32) -> u32 {
    let mut l = 0u32;
    while (k_param as u64) << l < n as u64 {
        l += 1;
    }
    l
}

impl LayerParams {
    pub fn levels(&self) -> u32 {
        layer_count(self.n, self.k_param)
    }
}

/// Membership of `v` in layer `i` under `layer_seed`.
pub fn layer_member(layer_seed: u64, params: LayerParams, layer: u32, v: u32) -> bool {
    // rate = min(1, (k/n)·2^layer); threshold in 2^64 space
    let num = (params.k_param as u128) << layer;
    if num >= params.n as u128 {
        return true;
    }
    let threshold = (num << 64) / params.n as u128;
    (prf::hash(layer_seed, Domain::LayerSample, layer as u64, v as u64) as u128) < threshold
}

/// The first layer that sampled `v`; always defined because the top layer
/// has rate 1.
pub fn assigned_layer(layer_seed: u64, params: LayerParams, v: u32) -> u32 {
    let levels = params.levels();
    for i in 0..=levels {
        if layer_member(layer_seed, params, i, v) {
            return i;
        }
    }
    levels
}

/// Honest-proof size bound for vertex mode, in total path edges:
/// `16·k·n·⌈log₂(n/k)⌉`.
pub fn vertex_path_budget(n: u32, k_param: u32) -> u64 {
    16 * k_param as u64 * n as u64 * layer_count(n, k_param).max(1) as u64
}

/// Edge-mode bound `16·k²·n·⌈log₂(n/k)⌉`.
pub fn edge_path_budget(n: u32, k_param: u32) -> u64 {
    16 * (k_param as u64).pow(2) * n as u64 * layer_count(n, k_param).max(1) as u64
}
