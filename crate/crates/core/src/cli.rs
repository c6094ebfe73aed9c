//! Command-line surface. Exit codes: 0 success, 1 domain error, 2 usage
//! error. All output is deterministic.

use std::fs;

use crate::certificate::{
    certificate_digest, certify_disjoint_conjugates, parse_certificate, serialize_certificate,
    verify_certificate,
};
use crate::complex::{build_config_complex, build_config_complex_override, CubeComplex};
use crate::crisp_wiest::{basepoint_for, build_cw_map, check_local_isometry, pi1_generators};
use crate::graph::{degree_profile, parse_graph, subdivide_for, Graph};
use crate::homology::homology;
use crate::raag::{
    build_delta, cyclic_normal_form, format_word, is_conjugate, normal_form, parse_word,
    primitive_root,
};
use crate::report::{compute_report, render_report, ReportArtifacts, ReportFormat};
use crate::subgroup::run_pipeline;

const USAGE: &str = "usage: braidlab <command> [args]

commands:
  info <graph>                      vertex/edge counts and the degree profile
  subdivide <graph> --n N           subdivide for N tokens; graph text on stdout
  build <graph> --n N [--override-subdivision] [--dump]
                                    build the configuration complex
  homology <graph> --n N [--override-subdivision]
                                    Betti numbers and torsion
  raag <graph>                      the commutation graph of the edge set
  embed <graph> --n N [--override-subdivision] [--basepoint v1,v2,...]
                                    loop generators and the local-isometry verdict
  witness <graph> --n N             the direct-product witness words
  certify-tc <graph> --n N [-o FILE]
                                    build and emit a disjoint-conjugates certificate
  verify-cert <cert-file>           re-verify a serialized certificate
  nf <graph> <word>                 canonical normal form
  conj <graph> <word> <word>        exact conjugacy decision
  root <graph> <word>               primitive root and exponent
  report <graph> --n N [--trust-paper] [--no-complex] [--format text|json]
                                    the invariant report

words use whitespace-separated tokens `<label>` or `<label>^-1` over the
graph's edge labels";

struct Args {
    positional: Vec<String>,
    n: Option<usize>,
    output: Option<String>,
    format: String,
    basepoint: Option<Vec<usize>>,
    override_subdivision: bool,
    dump: bool,
    trust_paper: bool,
    no_complex: bool,
}

fn parse_args(raw: &[String]) -> Result<Args, String> {
    let mut args = Args {
        positional: Vec::new(),
        n: None,
        output: None,
        format: "text".to_string(),
        basepoint: None,
        override_subdivision: false,
        dump: false,
        trust_paper: false,
        no_complex: false,
    };
    let mut it = raw.iter();
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--n" => {
                let v = it.next().ok_or("--n needs a value")?;
                args.n = Some(v.parse().map_err(|_| format!("bad --n value `{v}`"))?);
            }
            "-o" | "--output" => {
                args.output = Some(it.next().ok_or("-o needs a value")?.to_string());
            }
            "--format" => {
                args.format = it.next().ok_or("--format needs a value")?.to_string();
            }
            "--basepoint" => {
                let v = it.next().ok_or("--basepoint needs a value")?;
                let parsed: Result<Vec<usize>, _> =
                    v.split(',').map(|t| t.parse::<usize>()).collect();
                args.basepoint = Some(parsed.map_err(|_| format!("bad --basepoint `{v}`"))?);
            }
            "--override-subdivision" => args.override_subdivision = true,
            "--dump" => args.dump = true,
            "--trust-paper" => args.trust_paper = true,
            "--no-complex" => args.no_complex = true,
            other if other.starts_with("--") => return Err(format!("unknown flag `{other}`")),
            other => args.positional.push(other.to_string()),
        }
    }
    Ok(args)
}

fn load_graph(path: &str) -> Result<Graph, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    parse_graph(&text).map_err(|e| e.to_string())
}

fn need_n(args: &Args) -> Result<usize, String> {
    args.n.ok_or_else(|| "missing required --n".to_string())
}

fn build_for(args: &Args, g: &Graph, n: usize) -> Result<CubeComplex, String> {
    let result = if args.override_subdivision {
        build_config_complex_override(g, n)
    } else {
        build_config_complex(g, n)
    };
    result.map_err(|e| e.to_string())
}

fn fvec(v: &[usize]) -> String {
    format!(
        "[{}]",
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    )
}

/// Entry point; returns the process exit code.
pub fn cli_main() -> i32 {
    let raw: Vec<String> = std::env::args().skip(1).collect();
    match run(&raw) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("{msg}");
            eprintln!();
            eprintln!("{USAGE}");
            2
        }
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

enum CliError {
    Usage(String),
    Domain(String),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn domain(msg: impl Into<String>) -> CliError {
    CliError::Domain(msg.into())
}

fn run(raw: &[String]) -> Result<(), CliError> {
    let Some(command) = raw.first() else {
        return Err(usage("missing command"));
    };
    let args = parse_args(&raw[1..]).map_err(usage)?;
    let pos = |i: usize, what: &str| -> Result<&str, CliError> {
        args.positional
            .get(i)
            .map(|s| s.as_str())
            .ok_or_else(|| usage(format!("missing argument: {what}")))
    };
    match command.as_str() {
        "info" => {
            let g = load_graph(pos(0, "graph file")?).map_err(domain)?;
            let p = degree_profile(&g);
            println!("vertices: {}", g.vertex_count());
            println!("edges: {}", g.edge_count());
            println!("m: {}", p.m);
            println!("m3: {}", p.m3);
            println!(
                "essential: {}",
                p.essential_vertices
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            );
            Ok(())
        }
        "subdivide" => {
            let g = load_graph(pos(0, "graph file")?).map_err(domain)?;
            let n = need_n(&args).map_err(usage)?;
            let (sub, plan) = subdivide_for(&g, n).map_err(|e| domain(e.to_string()))?;
            println!("# subdivision for n={n}");
            for (i, pieces) in plan.per_edge_pieces.iter().enumerate() {
                println!(
                    "# plan: edge {i} ({}) -> {pieces} piece(s)",
                    g.edge_label(i)
                );
            }
            print!("{}", sub.to_text());
            Ok(())
        }
        "build" => {
            let g = load_graph(pos(0, "graph file")?).map_err(domain)?;
            let n = need_n(&args).map_err(usage)?;
            let cx = build_for(&args, &g, n).map_err(domain)?;
            for w in cx.warnings() {
                eprintln!("warning: {w}");
            }
            println!("f_vector: {}", fvec(&cx.f_vector()));
            println!("euler_characteristic: {}", cx.euler_characteristic());
            println!("dimension: {}", cx.dimension());
            println!("components: {}", cx.components());
            if args.dump {
                print!("{}", cx.dump());
            }
            Ok(())
        }
        "homology" => {
            let g = load_graph(pos(0, "graph file")?).map_err(domain)?;
            let n = need_n(&args).map_err(usage)?;
            let cx = build_for(&args, &g, n).map_err(domain)?;
            let h = homology(&cx);
            println!("betti: {}", fvec(&h.betti));
            let entries: Vec<String> = h
                .torsion
                .iter()
                .enumerate()
                .filter(|(_, t)| !t.is_empty())
                .map(|(dim, t)| {
                    format!(
                        "{dim}: [{}]",
                        t.iter()
                            .map(|d| d.to_string())
                            .collect::<Vec<_>>()
                            .join(", ")
                    )
                })
                .collect();
            println!("torsion: {{{}}}", entries.join(", "));
            Ok(())
        }
        "raag" => {
            let g = load_graph(pos(0, "graph file")?).map_err(domain)?;
            let delta = build_delta(&g);
            println!("generators: {}", delta.generator_count());
            for i in 0..delta.generator_count() {
                println!("gen {i} {}", delta.label(i));
            }
            for i in 0..delta.generator_count() {
                for j in i + 1..delta.generator_count() {
                    if delta.adjacent(i, j) {
                        println!("adjacent {i} {j}");
                    }
                }
            }
            let parts = delta.join_partition();
            if parts.len() <= 1 {
                println!("join_factors: 1");
            } else {
                println!("join_factors: {}", parts.len());
                for (i, part) in parts.iter().enumerate() {
                    println!(
                        "join {i}: {}",
                        part.iter()
                            .map(|g| g.to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    );
                }
            }
            Ok(())
        }
        "embed" => {
            let g = load_graph(pos(0, "graph file")?).map_err(domain)?;
            let n = need_n(&args).map_err(usage)?;
            let cx = build_for(&args, &g, n).map_err(domain)?;
            let delta = build_delta(&g);
            let map = build_cw_map(&cx, &delta).map_err(|e| domain(e.to_string()))?;
            let (ok, _) = check_local_isometry(&map);
            println!("local_isometry: {ok}");
            let base = match &args.basepoint {
                Some(verts) => basepoint_for(&cx, verts).map_err(|e| domain(e.to_string()))?,
                None => *cx
                    .cells(0)
                    .first()
                    .ok_or_else(|| domain("empty complex has no basepoint"))?,
            };
            let loops = pi1_generators(&map, &base).map_err(|e| domain(e.to_string()))?;
            println!("generators: {}", loops.len());
            for (i, l) in loops.iter().enumerate() {
                println!("loop {i}: {}", format_word(&delta, &l.word));
            }
            Ok(())
        }
        "witness" => {
            let g = load_graph(pos(0, "graph file")?).map_err(domain)?;
            let n = need_n(&args).map_err(usage)?;
            let pipeline = run_pipeline(&g, n).map_err(|e| domain(e.to_string()))?;
            println!("factors: {}", pipeline.witness.factor_count);
            for f in &pipeline.factors {
                println!(
                    "factor v{} degree={} rank={} words={}",
                    f.vertex,
                    f.degree,
                    f.rank,
                    f.free_words.len()
                );
                for (i, w) in f.free_words.iter().enumerate() {
                    println!("  word {i}: {}", format_word(&pipeline.delta, w));
                }
            }
            println!("witness_words: {}", pipeline.witness.words.len());
            for (i, (v, w)) in pipeline.witness.words.iter().enumerate() {
                println!("w {i} (v{v}): {}", format_word(&pipeline.delta, w));
            }
            for line in &pipeline.witness.transcript {
                println!("check: {line}");
            }
            println!("ok: true");
            Ok(())
        }
        "certify-tc" => {
            let g = load_graph(pos(0, "graph file")?).map_err(domain)?;
            let n = need_n(&args).map_err(usage)?;
            let pipeline = run_pipeline(&g, n).map_err(|e| domain(e.to_string()))?;
            let cert = certify_disjoint_conjugates(&pipeline).map_err(|e| domain(e.to_string()))?;
            verify_certificate(&cert).map_err(|e| domain(e.to_string()))?;
            let text = serialize_certificate(&cert);
            match &args.output {
                Some(path) => {
                    fs::write(path, &text).map_err(|e| domain(e.to_string()))?;
                    println!("digest: sha256:{}", certificate_digest(&text));
                    println!("valid: true");
                }
                None => print!("{text}"),
            }
            Ok(())
        }
        "verify-cert" => {
            let path = pos(0, "certificate file")?;
            let text = fs::read_to_string(path).map_err(|e| domain(e.to_string()))?;
            let cert = parse_certificate(&text).map_err(|e| domain(e.to_string()))?;
            match verify_certificate(&cert) {
                Ok(()) => {
                    println!("valid: true");
                    Ok(())
                }
                Err(e) => {
                    println!("valid: false");
                    Err(domain(e.to_string()))
                }
            }
        }
        "nf" => {
            let g = load_graph(pos(0, "graph file")?).map_err(domain)?;
            let delta = build_delta(&g);
            let w = parse_word(&delta, pos(1, "word")?).map_err(|e| domain(e.to_string()))?;
            let nf = normal_form(&delta, &w).map_err(|e| domain(e.to_string()))?;
            println!("nf: {}", format_word(&delta, &nf.word));
            Ok(())
        }
        "conj" => {
            let g = load_graph(pos(0, "graph file")?).map_err(domain)?;
            let delta = build_delta(&g);
            let u = parse_word(&delta, pos(1, "first word")?).map_err(|e| domain(e.to_string()))?;
            let w =
                parse_word(&delta, pos(2, "second word")?).map_err(|e| domain(e.to_string()))?;
            let verdict = is_conjugate(&delta, &u, &w).map_err(|e| domain(e.to_string()))?;
            println!("conjugate: {verdict}");
            let cu = cyclic_normal_form(&delta, &u).map_err(|e| domain(e.to_string()))?;
            println!("cyclic_nf_lhs: {}", format_word(&delta, &cu));
            let cw = cyclic_normal_form(&delta, &w).map_err(|e| domain(e.to_string()))?;
            println!("cyclic_nf_rhs: {}", format_word(&delta, &cw));
            Ok(())
        }
        "root" => {
            let g = load_graph(pos(0, "graph file")?).map_err(domain)?;
            let delta = build_delta(&g);
            let w = parse_word(&delta, pos(1, "word")?).map_err(|e| domain(e.to_string()))?;
            let (root, exp) = primitive_root(&delta, &w).map_err(|e| domain(e.to_string()))?;
            println!("root: {}", format_word(&delta, &root));
            println!("exponent: {exp}");
            Ok(())
        }
        "report" => {
            let g = load_graph(pos(0, "graph file")?).map_err(domain)?;
            let n = need_n(&args).map_err(usage)?;
            let format =
                ReportFormat::from_token(&args.format).map_err(|e| usage(e.to_string()))?;
            let mut artifacts = ReportArtifacts {
                trust_paper: args.trust_paper,
                ..Default::default()
            };
            let mut extra_caveats: Vec<String> = Vec::new();
            if !args.no_complex {
                match subdivide_for(&g, n) {
                    Ok((sub, _)) => match build_config_complex(&sub, n) {
                        Ok(cx) => {
                            artifacts.complex_dimension = Some(cx.dimension());
                            let cells: usize = cx.f_vector().iter().sum();
                            if cells <= 200_000 {
                                artifacts.betti = Some(homology(&cx).betti);
                            } else {
                                extra_caveats
                                    .push(format!("complex has {cells} cells: homology skipped"));
                            }
                        }
                        Err(e) => extra_caveats.push(format!("complex not built: {e}")),
                    },
                    Err(e) => extra_caveats.push(format!("subdivision failed: {e}")),
                }
            }
            let profile = degree_profile(&g);
            if profile.m > 0 && n >= 2 * profile.m + profile.m3 {
                match run_pipeline(&g, n) {
                    Ok(pipeline) => {
                        artifacts.witness_validated = true;
                        match certify_disjoint_conjugates(&pipeline)
                            .map_err(|e| e.to_string())
                            .and_then(|cert| {
                                verify_certificate(&cert)
                                    .map_err(|e| e.to_string())
                                    .map(|()| cert)
                            }) {
                            Ok(cert) => {
                                let text = serialize_certificate(&cert);
                                artifacts.certificate_digest = Some(certificate_digest(&text));
                            }
                            Err(e) => extra_caveats.push(format!("certificate failed: {e}")),
                        }
                    }
                    Err(e) => extra_caveats.push(format!("witness pipeline failed: {e}")),
                }
            }
            let mut report = compute_report(&g, n, &artifacts);
            report.caveats.extend(extra_caveats);
            print!("{}", render_report(&report, format));
            Ok(())
        }
        other => Err(usage(format!("unknown command `{other}`"))),
    }
}
