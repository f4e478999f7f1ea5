//! Command-line driver: generators, sketches, forests, certificates,
//! oracles and the prover/verifier schemes, all seeded and reproducible.
//!
//! Exit status: 0 on success / ACCEPT / true verdicts, 1 on REJECT / false
//! verdicts, 2 on usage or parse errors.

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use sgt_core::annotated::{self, ProverBehavior, SchemeId, TamperClass, Verdict};
use sgt_core::cert;
use sgt_core::graph::VertexSketchBank;
use sgt_core::l0::{L0Sketch, SketchShape};
use sgt_core::oracle;
use sgt_core::stream::{self, EqIdxInstance, Model, Stream};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "sgt", version, about = "Streaming sketches and verification schemes for support-graph-turnstile streams")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct SeedArg {
    /// Seed for all randomness (falls back to $SKETCH_SEED, then 0).
    #[arg(long)]
    seed: Option<u64>,
}

impl SeedArg {
    fn resolve(&self) -> u64 {
        self.seed
            .or_else(|| std::env::var("SKETCH_SEED").ok().and_then(|s| s.parse().ok()))
            .unwrap_or(0)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate stream files
    Gen {
        #[command(subcommand)]
        what: GenCmd,
    },
    /// Build an ℓ0 sketch of an element stream, sample it, optionally
    /// serialize the sketch
    Sketch {
        stream: PathBuf,
        #[command(flatten)]
        seed: SeedArg,
        /// Write the serialized sketch frame here
        #[arg(long)]
        out: Option<PathBuf>,
        /// Check a previously serialized sketch against this run
        #[arg(long)]
        check: Option<PathBuf>,
    },
    /// Spanning forest of an SGT stream (one edge per line)
    Forest {
        stream: PathBuf,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// k-edge-connectivity certificate and verdict
    Cert {
        stream: PathBuf,
        #[arg(long)]
        k: u32,
        /// Oversampling constant (default 20; 200 restores the analysis
        /// headroom)
        #[arg(long = "cert-constant")]
        cert_constant: Option<f64>,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Compose a scheme proof for a stream
    Prove {
        stream: PathBuf,
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        k: u32,
        #[command(flatten)]
        seed: SeedArg,
        /// Write the framed proof here (defaults to stdout)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Compose a deliberately broken proof (testing aid)
        #[arg(long)]
        tamper: Option<String>,
    },
    /// Verify a scheme proof against a stream
    Verify {
        stream: PathBuf,
        proof: PathBuf,
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        k: u32,
        #[command(flatten)]
        seed: SeedArg,
        /// Print the measured costs as one JSON line
        #[arg(long)]
        costs: bool,
    },
    /// Exact oracle queries: components | min_cut | vertex_connectivity
    Oracle { predicate: String, stream: PathBuf },
    /// Time the main pipelines on generated inputs
    Bench {
        #[command(flatten)]
        seed: SeedArg,
    },
}

#[derive(Subcommand)]
enum GenCmd {
    /// Random SGT stream
    Sgt {
        #[arg(long)]
        n: u32,
        /// Frequency bound, decimal (default 2^64)
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long = "cancel-fraction", default_value_t = 0.0)]
        cancel_fraction: f64,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Equals-Index distinct-items stream (element model)
    EqidxDistinct {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        q: u32,
        /// Force x_j = y (the cancelled instance)
        #[arg(long)]
        equal: bool,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Equals-Index connectivity stream (bipartite SGT)
    EqidxConn {
        #[arg(long)]
        n: u32,
        /// Bits per sub-block
        #[arg(long, default_value_t = 8)]
        bits: u32,
        #[arg(long)]
        equal: bool,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Equals-Index k-connectivity stream (K_{n,k} minus one edge)
    EqidxKconn {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 8)]
        q: u32,
        #[arg(long)]
        equal: bool,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Named graph fixture: complete | bipartite | cycle | path | star |
    /// hypercube | minus-matching
    Fixture {
        kind: String,
        #[arg(long)]
        n: u32,
        /// Second part size for bipartite fixtures
        #[arg(long)]
        m: Option<u32>,
    },
}

fn read_stream(path: &PathBuf) -> Result<Stream, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    stream::parse_stream(&text).map_err(|e| e.to_string())
}

fn emit_with_seed(s: &Stream, seed: u64) {
    print!("# seed {seed}\n{}", stream::emit_stream(s));
}

fn run() -> Result<ExitCode, String> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Gen { what } => run_gen(what),
        Cmd::Sketch { stream, seed, out, check } => {
            let seed = seed.resolve();
            let s = read_stream(&stream)?;
            let universe = match s.header.model {
                Model::Elem { universe } => universe,
                Model::Sgt { .. } => return Err("sketch expects an element stream".into()),
            };
            let shape = SketchShape::with_default_reps(universe.max(1), &s.header.alpha);
            let mut sketch = L0Sketch::new(shape, seed);
            for t in &s.tokens {
                if let stream::Token::Elem { index, delta } = t {
                    sketch.ingest(*index, delta).map_err(|e| e.to_string())?;
                }
            }
            println!("# seed {seed}");
            match sketch.sample() {
                Some(e) => println!("sample {e}"),
                None => println!("sample FAIL"),
            }
            if let Some(out) = out {
                std::fs::write(&out, sketch.to_bytes()).map_err(|e| e.to_string())?;
                println!("wrote {}", out.display());
            }
            if let Some(check) = check {
                let bytes = std::fs::read(&check).map_err(|e| e.to_string())?;
                let loaded = L0Sketch::from_bytes(&bytes).map_err(|e| e.to_string())?;
                let matches = loaded == sketch;
                println!("check {}", if matches { "match" } else { "MISMATCH" });
                if !matches {
                    return Ok(ExitCode::from(1));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Forest { stream, seed } => {
            let seed = seed.resolve();
            let s = read_stream(&stream)?;
            let n = match s.header.model {
                Model::Sgt { n } => n,
                Model::Elem { .. } => return Err("forest expects an SGT stream".into()),
            };
            let mut bank = VertexSketchBank::new(n, &s.header.alpha, seed);
            bank.ingest_stream(&s).map_err(|e| e.to_string())?;
            println!("# seed {seed}");
            for (u, v) in bank.spanning_forest().edges {
                println!("{u} {v}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Cert { stream, k, cert_constant, seed } => {
            let seed = seed.resolve();
            let s = read_stream(&stream)?;
            let constant = cert_constant.unwrap_or(cert::DEFAULT_CERT_CONSTANT);
            let (ok, certificate) =
                cert::k_edge_connected_with(&s, k, seed, constant).map_err(|e| e.to_string())?;
            println!("# seed {seed}");
            for (u, v) in &certificate.edges {
                println!("{u} {v}");
            }
            println!("verdict {ok}");
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Prove { stream, scheme, k, seed, out, tamper } => {
            let seed = seed.resolve();
            let s = read_stream(&stream)?;
            let id = SchemeId::parse(&scheme).ok_or_else(|| format!("unknown scheme `{scheme}`"))?;
            let behavior = match tamper {
                None => ProverBehavior::Honest,
                Some(t) => ProverBehavior::Tamper(parse_tamper(&t)?),
            };
            let bytes =
                annotated::prove_encoded(&s, id, k, behavior, seed).map_err(|e| e.to_string())?;
            match out {
                Some(path) => {
                    std::fs::write(&path, &bytes).map_err(|e| e.to_string())?;
                    println!("# seed {seed}");
                    println!("wrote {} ({} bytes)", path.display(), bytes.len());
                }
                None => std::io::stdout().write_all(&bytes).map_err(|e| e.to_string())?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { stream, proof, scheme, k, seed, costs } => {
            let seed = seed.resolve();
            let s = read_stream(&stream)?;
            let id = SchemeId::parse(&scheme).ok_or_else(|| format!("unknown scheme `{scheme}`"))?;
            let bytes = std::fs::read(&proof).map_err(|e| e.to_string())?;
            let transcript =
                annotated::verify_encoded(&s, id, k, &bytes, seed).map_err(|e| e.to_string())?;
            println!("# seed {seed}");
            println!("verdict {}", transcript.verdict);
            if costs {
                println!("{}", transcript.costs_line());
            }
            let ok = matches!(transcript.verdict, Verdict::Accept | Verdict::Output(true));
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Oracle { predicate, stream } => {
            let s = read_stream(&stream)?;
            let g = oracle::exact_support(&s).map_err(|e| e.to_string())?;
            match predicate.as_str() {
                "components" => {
                    let parts = oracle::components(&g);
                    println!("components {}", parts.count());
                    for group in parts.groups() {
                        let ids: Vec<String> = group.iter().map(|v| v.to_string()).collect();
                        println!("{}", ids.join(" "));
                    }
                }
                "min_cut" => println!("{}", oracle::min_cut(&g).map_err(|e| e.to_string())?),
                "vertex_connectivity" => {
                    println!("{}", oracle::vertex_connectivity(&g).map_err(|e| e.to_string())?)
                }
                other => return Err(format!("unknown predicate `{other}`")),
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Bench { seed } => run_bench(seed.resolve()),
    }
}

fn parse_tamper(s: &str) -> Result<TamperClass, String> {
    Ok(match s {
        "edge-not-in-input" => TamperClass::EdgeNotInInput,
        "multiplicity-lie" => TamperClass::MultiplicityLie,
        "sign-lie" => TamperClass::SignLie,
        "non-disjoint-paths" => TamperClass::NonDisjointPaths,
        "broken-path" => TamperClass::BrokenPath,
        "undersized-cut" => TamperClass::UndersizedCut,
        "terminal-duplication" => TamperClass::TerminalDuplication,
        "claim-true" => TamperClass::ClaimTrueNotConnected,
        other => return Err(format!("unknown tamper class `{other}`")),
    })
}

fn run_gen(what: GenCmd) -> Result<ExitCode, String> {
    match what {
        GenCmd::Sgt { n, alpha, density, cancel_fraction, seed } => {
            let seed = seed.resolve();
            let alpha = match alpha {
                Some(a) => a.parse::<BigUint>().map_err(|e| e.to_string())?,
                None => BigUint::from(1u8) << 64,
            };
            let s = stream::gen_random_sgt(n, &alpha, density, cancel_fraction, seed)
                .map_err(|e| e.to_string())?;
            emit_with_seed(&s, seed);
            Ok(ExitCode::SUCCESS)
        }
        GenCmd::EqidxDistinct { p, q, equal, seed } => {
            let seed = seed.resolve();
            let inst = EqIdxInstance::random(p, q, equal, seed);
            let alpha = BigUint::from(1u8) << q;
            let s = stream::gen_eqidx_distinct_items(&inst, &alpha).map_err(|e| e.to_string())?;
            emit_with_seed(&s, seed);
            Ok(ExitCode::SUCCESS)
        }
        GenCmd::EqidxConn { n, bits, equal, seed } => {
            let seed = seed.resolve();
            let inst = EqIdxInstance::random(n, n * bits, equal, seed);
            let s = stream::gen_eqidx_sgt_connectivity(&inst).map_err(|e| e.to_string())?;
            emit_with_seed(&s, seed);
            Ok(ExitCode::SUCCESS)
        }
        GenCmd::EqidxKconn { n, k, q, equal, seed } => {
            let seed = seed.resolve();
            let inst = EqIdxInstance::random(n * k, q, equal, seed);
            let s = stream::gen_eqidx_sgt_kconn(&inst, k).map_err(|e| e.to_string())?;
            emit_with_seed(&s, seed);
            Ok(ExitCode::SUCCESS)
        }
        GenCmd::Fixture { kind, n, m } => {
            let s = match kind.as_str() {
                "complete" => stream::fixtures::complete(n),
                "bipartite" => stream::fixtures::complete_bipartite(n, m.unwrap_or(n)),
                "cycle" => stream::fixtures::cycle(n),
                "path" => stream::fixtures::path(n),
                "star" => stream::fixtures::star(n),
                "hypercube" => stream::fixtures::hypercube(n),
                "minus-matching" => stream::fixtures::complete_minus_matching(n),
                other => return Err(format!("unknown fixture `{other}`")),
            };
            print!("{}", stream::emit_stream(&s));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_bench(seed: u64) -> Result<ExitCode, String> {
    println!("# seed {seed}");
    let alpha = BigUint::from(1u8) << 128;

    let t = Instant::now();
    let mut counter_acc = 0u64;
    for i in 0..20_000u64 {
        let c = sgt_core::counters::DecisionCounter::new(seed ^ i);
        counter_acc ^= c.prime();
    }
    println!("counter_setup 20000 ops in {:?} ({counter_acc:x})", t.elapsed());

    let shape = SketchShape::with_default_reps(256, &alpha);
    let t = Instant::now();
    let mut sk = L0Sketch::new(shape, seed);
    for e in 0..256u64 {
        sk.ingest_i64(e, (e as i64 % 7) + 1).map_err(|e| e.to_string())?;
    }
    let sampled = sk.sample();
    println!("l0_ingest 256 tokens + sample in {:?} (sample {sampled:?})", t.elapsed());

    let s = stream::gen_random_sgt(64, &alpha, 0.3, 0.2, seed).map_err(|e| e.to_string())?;
    let t = Instant::now();
    let mut bank = VertexSketchBank::new(64, &alpha, seed);
    bank.ingest_stream(&s).map_err(|e| e.to_string())?;
    let forest = bank.spanning_forest();
    println!(
        "forest n=64 {} tokens in {:?} ({} edges)",
        s.tokens.len(),
        t.elapsed(),
        forest.edges.len()
    );

    let fixture = stream::fixtures::complete(24);
    let t = Instant::now();
    let ok = cert::k_edge_connected(&fixture, 3, seed).map_err(|e| e.to_string())?;
    println!("cert K24 k=3 in {:?} (verdict {ok})", t.elapsed());

    let t = Instant::now();
    let tr = annotated::scheme_kvconn(&fixture, 3, seed, ProverBehavior::Honest)
        .map_err(|e| e.to_string())?;
    println!(
        "kvconn K24 k=3 in {:?} ({}, hcost {} bits, vcost {} bits)",
        t.elapsed(),
        tr.verdict,
        tr.hcost_bits,
        tr.vcost_bits
    );
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
