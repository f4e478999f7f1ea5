//! Property tests for the crate-wide invariants: stream round-trips,
//! linearity of counters/sketches/banks under arbitrary splits, generator
//! determinism, and support membership of sampled indices.

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use proptest::prelude::*;
use sgt_core::counters::{counter_ingest, CounterParams};
use sgt_core::graph::VertexSketchBank;
use sgt_core::l0::{L0Sketch, SketchShape};
use sgt_core::stream::{self, Stream, StreamHeader, Token};

fn arb_delta() -> impl Strategy<Value = i64> {
    prop_oneof![
        3 => -1000i64..1000,
        1 => prop::num::i64::ANY,
    ]
    .prop_map(|d| if d == 0 { 1 } else { d })
}

fn arb_elem_stream(universe: u64, max_len: usize) -> impl Strategy<Value = Stream> {
    prop::collection::vec((0..universe, arb_delta()), 0..max_len).prop_map(move |tokens| {
        Stream {
            header: StreamHeader::elem(universe, BigUint::one() << 80),
            tokens: tokens
                .into_iter()
                .map(|(i, d)| Token::Elem { index: i, delta: BigInt::from(d) })
                .collect(),
        }
    })
}

fn arb_sgt_stream(n: u32, max_len: usize) -> impl Strategy<Value = Stream> {
    prop::collection::vec((0..n, 0..n, arb_delta()), 0..max_len).prop_map(move |tokens| {
        Stream {
            header: StreamHeader::sgt(n, BigUint::one() << 80),
            tokens: tokens
                .into_iter()
                .filter(|(a, b, _)| a != b)
                .map(|(a, b, d)| Token::edge(a, b, d))
                .collect(),
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stream_round_trip(s in arb_sgt_stream(12, 40)) {
        let text = stream::emit_stream(&s);
        let parsed = stream::parse_stream(&text).unwrap();
        prop_assert_eq!(&parsed, &s);
        prop_assert_eq!(stream::emit_stream(&parsed), text);
    }

    #[test]
    fn elem_stream_round_trip(s in arb_elem_stream(32, 40)) {
        let parsed = stream::parse_stream(&stream::emit_stream(&s)).unwrap();
        prop_assert_eq!(parsed, s);
    }

    #[test]
    fn counter_split_merge(deltas in prop::collection::vec(arb_delta(), 1..50),
                           split in 0usize..50, seed in 0u64..1000) {
        let split = split.min(deltas.len());
        let deltas: Vec<BigInt> = deltas.into_iter().map(BigInt::from).collect();
        let params = CounterParams::new(8, BigUint::one() << 80);
        let whole = counter_ingest(&params, seed, &deltas);
        let a = counter_ingest(&params, seed, &deltas[..split]);
        let b = counter_ingest(&params, seed, &deltas[split..]);
        prop_assert_eq!(whole, a.merge(&b).unwrap());
    }

    #[test]
    fn sketch_split_merge(tokens in prop::collection::vec((0u64..64, arb_delta()), 1..80),
                          split in 0usize..80, seed in 0u64..1000) {
        let split = split.min(tokens.len());
        let shape = SketchShape::custom(64, 80, 3, 3);
        let mut whole = L0Sketch::new(shape, seed);
        let mut a = L0Sketch::new(shape, seed);
        let mut b = L0Sketch::new(shape, seed);
        for (i, &(e, d)) in tokens.iter().enumerate() {
            whole.ingest_i64(e, d).unwrap();
            if i < split { a.ingest_i64(e, d).unwrap() } else { b.ingest_i64(e, d).unwrap() }
        }
        a.merge_from(&b).unwrap();
        prop_assert_eq!(a, whole);
    }

    #[test]
    fn bank_split_merge(s in arb_sgt_stream(10, 60), split in 0usize..60, seed in 0u64..500) {
        let split = split.min(s.tokens.len());
        let alpha = BigUint::one() << 80;
        let mut whole = VertexSketchBank::new(10, &alpha, seed);
        let mut a = VertexSketchBank::new(10, &alpha, seed);
        let mut b = VertexSketchBank::new(10, &alpha, seed);
        for (i, t) in s.tokens.iter().enumerate() {
            whole.ingest_token(t).unwrap();
            if i < split { a.ingest_token(t).unwrap() } else { b.ingest_token(t).unwrap() }
        }
        a.merge_from(&b).unwrap();
        prop_assert_eq!(a, whole);
    }

    #[test]
    fn generators_deterministic(seed in 0u64..200) {
        let alpha = BigUint::one() << 32;
        let a = stream::gen_random_sgt(12, &alpha, 0.4, 0.3, seed).unwrap();
        let b = stream::gen_random_sgt(12, &alpha, 0.4, 0.3, seed).unwrap();
        prop_assert_eq!(stream::emit_stream(&a), stream::emit_stream(&b));
    }

    /// Sampled indices, when not FAIL, always lie in the support; signs and
    /// magnitudes affect only the failure probability.
    #[test]
    fn sample_membership(tokens in prop::collection::vec((0u64..32, arb_delta()), 0..40),
                         seed in 0u64..500) {
        let shape = SketchShape::custom(32, 80, 4, 6);
        let mut sketch = L0Sketch::new(shape, seed);
        let mut freq = std::collections::HashMap::<u64, BigInt>::new();
        for &(e, d) in &tokens {
            sketch.ingest_i64(e, d).unwrap();
            *freq.entry(e).or_default() += d;
        }
        freq.retain(|_, f| *f != BigInt::from(0));
        if let Some(e) = sketch.sample() {
            prop_assert!(freq.contains_key(&e), "sampled {e} outside support");
        } else if freq.is_empty() {
            // FAIL is mandatory on empty support
            prop_assert!(sketch.total_counter().is_zero());
        }
    }
}
