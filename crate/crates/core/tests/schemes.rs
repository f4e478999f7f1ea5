//! End-to-end protocol runs: honest completeness, tamper rejection, cut
//! proofs, layered-proof building blocks, and cost sanity.

use num_bigint::BigUint;
use sgt_core::annotated::{
    self, layered_proof_is_structural, layering_prove, prove_not_k_connected, run_protocol,
    scheme_am_vconn, scheme_gap_vconn, scheme_keconn, scheme_kvconn, scheme_sgt,
    ProverBehavior, RejectReason, SchemeId, TamperClass, Verdict,
};
use sgt_core::oracle::{self, DisjointMode};
use sgt_core::stream::{fixtures, gen_eqidx_sgt_kconn, EqIdxInstance, Stream};

fn honest(stream: &Stream, scheme: SchemeId, k: u32, seed: u64) -> Verdict {
    run_protocol(stream, scheme, k, ProverBehavior::Honest, seed).unwrap().verdict
}

#[test]
fn kvconn_complete_graph_accepts() {
    let s = fixtures::complete(5);
    for seed in 0..5 {
        assert_eq!(honest(&s, SchemeId::KVertexConn, 3, seed), Verdict::Output(true));
    }
}

#[test]
fn kvconn_underconnected_graph_outputs_false() {
    // K_5 minus a perfect-ish matching drops vertex connectivity to 2
    let mut edges = Vec::new();
    for v in 1..5u32 {
        for u in 0..v {
            if !((u, v) == (0, 1) || (u, v) == (2, 3)) {
                edges.push((u, v));
            }
        }
    }
    let s = fixtures::edges_to_stream(5, &edges, 4);
    let g = oracle::exact_support(&s).unwrap();
    let kappa = oracle::vertex_connectivity(&g).unwrap();
    assert!(kappa < 4);
    for seed in 0..5 {
        assert_eq!(honest(&s, SchemeId::KVertexConn, 4, seed), Verdict::Output(false));
    }
}

#[test]
fn keconn_cycle() {
    let s = fixtures::cycle(8);
    for seed in 0..5 {
        assert_eq!(honest(&s, SchemeId::KEdgeConn, 2, seed), Verdict::Output(true));
        assert_eq!(honest(&s, SchemeId::KEdgeConn, 3, seed), Verdict::Output(false));
    }
}

#[test]
fn gap_scheme_both_branches() {
    // K_9 has vertex connectivity 8 >= 2k for k = 4
    let s = fixtures::complete(9);
    assert_eq!(honest(&s, SchemeId::GapVertexConn, 2, 3), Verdict::Output(true));
    let tr = scheme_gap_vconn(&s, 2, 4).unwrap();
    assert_eq!(tr.verdict, Verdict::Output(true));

    // star: connectivity 1 < k
    let star = fixtures::star(8);
    assert_eq!(honest(&star, SchemeId::GapVertexConn, 2, 5), Verdict::Output(false));
}

#[test]
fn am_scheme_accepts_and_degenerates() {
    let s = fixtures::complete(6);
    let tr = scheme_am_vconn(&s, 3, 7, ProverBehavior::Honest).unwrap();
    assert_eq!(tr.verdict, Verdict::Output(true));

    // n = 4 clamps the sampled terminals to the whole vertex set
    let terms = annotated::sample_public_terminals(4, 99);
    assert_eq!(terms, vec![0, 1, 2, 3]);
    let k4 = fixtures::complete(4);
    let tr = scheme_am_vconn(&k4, 2, 99, ProverBehavior::Honest).unwrap();
    assert_eq!(tr.verdict, Verdict::Output(true));
}

#[test]
fn sgt_scheme_on_eqidx_reductions() {
    let unequal = EqIdxInstance::random(10, 6, false, 11); // k=2, n=5
    let s = gen_eqidx_sgt_kconn(&unequal, 2).unwrap();
    assert_eq!(
        scheme_sgt(&s, 2, DisjointMode::Vertex, 3, ProverBehavior::Honest).unwrap().verdict,
        Verdict::Output(true)
    );
    assert_eq!(
        scheme_sgt(&s, 2, DisjointMode::Edge, 3, ProverBehavior::Honest).unwrap().verdict,
        Verdict::Output(true)
    );

    let equal = EqIdxInstance::random(10, 6, true, 12);
    let s = gen_eqidx_sgt_kconn(&equal, 2).unwrap();
    assert_eq!(
        scheme_sgt(&s, 2, DisjointMode::Vertex, 3, ProverBehavior::Honest).unwrap().verdict,
        Verdict::Output(false)
    );
    assert_eq!(
        scheme_sgt(&s, 2, DisjointMode::Edge, 3, ProverBehavior::Honest).unwrap().verdict,
        Verdict::Output(false)
    );
}

#[test]
fn completeness_over_seeds() {
    let q4 = fixtures::hypercube(4);
    for seed in 0..20 {
        assert_eq!(honest(&q4, SchemeId::KVertexConn, 4, seed), Verdict::Output(true));
        assert_eq!(honest(&q4, SchemeId::KEdgeConn, 4, seed), Verdict::Output(true));
    }
}

#[test]
fn tampered_proofs_rejected() {
    let q4 = fixtures::hypercube(4); // sparse enough for phantom edges
    let classes = [
        TamperClass::EdgeNotInInput,
        TamperClass::MultiplicityLie,
        TamperClass::SignLie,
        TamperClass::NonDisjointPaths,
        TamperClass::BrokenPath,
        TamperClass::UndersizedCut,
    ];
    for class in classes {
        let mut rejects = 0;
        let runs = 20;
        for seed in 0..runs {
            let tr = run_protocol(
                &q4,
                SchemeId::SgtVertexConn,
                3,
                ProverBehavior::Tamper(class),
                1000 + seed,
            )
            .unwrap();
            if tr.verdict.is_reject() {
                rejects += 1;
            }
        }
        assert!(rejects * 10 >= runs * 9, "{class:?}: only {rejects}/{runs} rejected");
    }
}

#[test]
fn terminal_duplication_rejected() {
    let s = fixtures::complete(6);
    for seed in 0..10 {
        let tr = run_protocol(
            &s,
            SchemeId::KVertexConn,
            3,
            ProverBehavior::Tamper(TamperClass::TerminalDuplication),
            seed,
        )
        .unwrap();
        assert_eq!(tr.verdict, Verdict::Reject(RejectReason::TerminalOrder));
    }
}

#[test]
fn claiming_true_on_underconnected_graph_rejected() {
    let star = fixtures::star(7);
    let mut rejects = 0;
    for seed in 0..20 {
        let tr = run_protocol(
            &star,
            SchemeId::KVertexConn,
            2,
            ProverBehavior::Tamper(TamperClass::ClaimTrueNotConnected),
            seed,
        )
        .unwrap();
        if tr.verdict.is_reject() {
            rejects += 1;
        }
    }
    assert!(rejects >= 18, "only {rejects}/20 rejected");
}

#[test]
fn cut_proof_examples() {
    // star K_{1,5}: vertex cut = {center}
    let star = fixtures::star(5);
    let g = oracle::exact_support(&star).unwrap();
    let cut = prove_not_k_connected(&g, 2, DisjointMode::Vertex).unwrap();
    assert_eq!(cut.cut_vertices, vec![0]);
    assert!(!cut.side.is_empty());

    // C_8 has edge cuts of size 2
    let c8 = oracle::exact_support(&fixtures::cycle(8)).unwrap();
    let cut = prove_not_k_connected(&c8, 3, DisjointMode::Edge).unwrap();
    assert_eq!(cut.cut_edges.len(), 2);

    // K_4 is 3-connected: no cut below 2
    let k4 = oracle::exact_support(&fixtures::complete(4)).unwrap();
    assert!(matches!(
        prove_not_k_connected(&k4, 2, DisjointMode::Vertex),
        Err(annotated::ProtocolError::NoSuchCut)
    ));
}

#[test]
fn layered_proof_building_block() {
    let q4 = fixtures::hypercube(4);
    let g = oracle::exact_support(&q4).unwrap();
    for mode in [DisjointMode::Vertex, DisjointMode::Edge] {
        let proof = layering_prove(&g, 0, 4, mode, 9).unwrap();
        assert!(layered_proof_is_structural(&g, &proof));
        assert!(proof.retries <= 64);
        let tr = annotated::verify_layered(&q4, &proof, 21).unwrap();
        assert_eq!(tr.verdict, Verdict::Accept, "mode {mode:?}");
    }
    // K_{k+1}: every vertex proves k paths at layer 0 feasibly
    let k4s = fixtures::complete(4);
    let g = oracle::exact_support(&k4s).unwrap();
    let proof = layering_prove(&g, 2, 3, DisjointMode::Vertex, 1).unwrap();
    let tr = annotated::verify_layered(&k4s, &proof, 2).unwrap();
    assert_eq!(tr.verdict, Verdict::Accept);
    // C_8, k=2
    let c8 = fixtures::cycle(8);
    let g = oracle::exact_support(&c8).unwrap();
    let proof = layering_prove(&g, 5, 2, DisjointMode::Vertex, 1).unwrap();
    assert!(
        proof.total_path_edges <= annotated::vertex_path_budget(8, 2),
        "size bound violated: {}",
        proof.total_path_edges
    );
    let tr = annotated::verify_layered(&c8, &proof, 2).unwrap();
    assert_eq!(tr.verdict, Verdict::Accept);
}

#[test]
fn costs_are_measured_and_sane() {
    let s = fixtures::complete(16);
    let tr = scheme_kvconn(&s, 3, 5, ProverBehavior::Honest).unwrap();
    assert_eq!(tr.verdict, Verdict::Output(true));
    assert!(tr.hcost_bits > 0);
    assert_eq!(tr.hcost_bits, tr.disclosure_bits + tr.path_bits);
    assert!(tr.vcost_bits > 0);
    // the verifier state must not balloon with the proof
    assert!(tr.vcost_bits < tr.hcost_bits + 512 * 1024);
    let line = tr.costs_line();
    assert!(line.contains("\"scheme\":\"kvconn\"") && line.contains("\"verdict\":\"OUTPUT(true)\""));
}

#[test]
fn sgt_scheme_handles_negative_frequencies() {
    // build a stream whose support has negative multiplicities
    let alpha = BigUint::from(1u64 << 20);
    let s = sgt_core::stream::gen_random_sgt(10, &alpha, 0.8, 0.2, 77).unwrap();
    let g = oracle::exact_support(&s).unwrap();
    let kappa = oracle::vertex_connectivity(&g).unwrap();
    let k = 2;
    let expected = Verdict::Output(kappa >= k);
    let tr = scheme_sgt(&s, k, DisjointMode::Vertex, 5, ProverBehavior::Honest).unwrap();
    assert_eq!(tr.verdict, expected);
}

#[test]
fn encoded_prove_verify_round_trip() {
    let s = fixtures::complete(6);
    let bytes =
        annotated::prove_encoded(&s, SchemeId::KVertexConn, 3, ProverBehavior::Honest, 9).unwrap();
    let tr = annotated::verify_encoded(&s, SchemeId::KVertexConn, 3, &bytes, 9).unwrap();
    assert_eq!(tr.verdict, Verdict::Output(true));
    assert_eq!(tr.hcost_bits, bytes.len() as u64 * 8);

    // bytes tampered at the frame level fail to parse or verify
    let mut bad = bytes.clone();
    let last = bad.len() - 1;
    bad.truncate(last);
    assert!(annotated::verify_encoded(&s, SchemeId::KVertexConn, 3, &bad, 9).is_err());
}
