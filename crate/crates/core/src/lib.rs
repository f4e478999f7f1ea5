//! Streaming sketches and verification schemes for turnstile streams whose
//! frequencies may be astronomically large.
//!
//! The crate is organised around a handful of building blocks:
//!
//! * [`stream`] — token/stream file model, random generators and the
//!   Equals-Index adversarial stream constructions used as hard instances.
//! * [`counters`] — decision counters (randomized zero testers modulo a
//!   random 61-bit prime) and the distinct-items algorithm built from them.
//! * [`l0`] — strong ℓ0-samplers: support-1 recovery, support-1 detection
//!   and the full sampler with geometric subsampling.
//! * [`graph`] — signed vertex-incidence sketch banks and the Borůvka-style
//!   spanning forest over SGT streams.
//! * [`cert`] — randomized k-edge-connectivity certificates via subsampled
//!   spanning forests.
//! * [`oracle`] — exact brute-force reference implementations (support,
//!   components, min cut, vertex connectivity, disjoint paths).
//! * [`annotated`] — Prover/Verifier harness for the annotated-streaming
//!   connectivity schemes with measured hcost/vcost accounting.
//!
//! All randomized structures are deterministic functions of an explicit
//! 64-bit seed so that every run is reproducible byte-for-byte.

pub mod annotated;
pub mod cert;
pub mod counters;
pub mod graph;
pub mod l0;
pub mod oracle;
pub mod par;
pub mod prf;
pub mod prime;
pub mod stream;
