//! Machine-checkable certificates that two free abelian subgroups have
//! disjoint conjugates in the ambient right-angled Artin group, hence in
//! the braid group they live in.
//!
//! The rule tree has a fixed shape: a subgroup node (the braid group sits
//! inside the ambient group; every generator is a lifted token loop), over
//! a retraction node (the ambient group retracts onto the subgroup
//! generated by the union of factor supports; generator subsets always
//! span full subgraphs), over a product node (the factor supports are
//! disjoint and commute, so that subgroup is the direct product of the
//! per-vertex factors), over one root-conjugacy leaf per factor. A
//! certificate is only emitted when every side condition and leaf check
//! passes; the serialized text is self-contained and re-verifiable.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::graph::{parse_graph, Graph, GraphError};
use crate::raag::{
    build_delta, format_word, is_equal, parse_word, primitive_root, supports_commute,
    CommutationGraph, Word, WordError,
};
use crate::subgroup::{
    apply_recipe, local_factors, parse_recipe, place_basepoint, recipe_to_string, roots_disjoint,
    Pipeline, Recipe, SubgroupError,
};

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error("certificate refused: leaf at vertex {vertex} failed: {reason}")]
    Refused { vertex: usize, reason: String },
    #[error("certificate refused: {0}")]
    RefusedNode(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("certificate invalid: {0}")]
    Invalid(String),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Subgroup(#[from] SubgroupError),
}

/// One root-conjugacy leaf: the cyclic pair at an essential vertex with the
/// recorded root computations and the verdict.
#[derive(Debug, Clone)]
pub struct CertLeaf {
    pub vertex: usize,
    pub u: Word,
    pub w: Word,
    pub w_recipe: Recipe,
    pub u_root: Word,
    pub u_exp: usize,
    pub w_root: Word,
    pub w_exp: usize,
    pub verdict_disjoint: bool,
}

/// A complete certificate: the claim, its context (graph, token count,
/// basepoint placement), and the leaf data. Side conditions of the three
/// rule nodes are re-derived from the context on verification.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub n: usize,
    pub graph: Graph,
    pub parked: Vec<usize>,
    pub factor_count: usize,
    /// Union of the factor supports, as edge indices into `graph`.
    pub union_support: Vec<usize>,
    pub h0: Vec<Word>,
    pub h1: Vec<Word>,
    pub leaves: Vec<CertLeaf>,
}

/// Builds the certificate from a completed pipeline, re-checking every leaf
/// and side condition; any failure refuses the certificate.
pub fn certify_disjoint_conjugates(p: &Pipeline) -> Result<Certificate, CertificateError> {
    let delta = &p.delta;
    // Leaves first: the root computations must decide "disjoint".
    let mut leaves = Vec::new();
    for pair in &p.pairs {
        if !roots_disjoint(delta, &pair.c0_root, &pair.c1_root)? {
            return Err(CertificateError::Refused {
                vertex: pair.vertex,
                reason: "primitive roots are conjugate up to inversion".to_string(),
            });
        }
        if crate::raag::is_trivial(delta, &pair.c0)? || crate::raag::is_trivial(delta, &pair.c1)? {
            return Err(CertificateError::Refused {
                vertex: pair.vertex,
                reason: "cyclic generator is trivial".to_string(),
            });
        }
        leaves.push(CertLeaf {
            vertex: pair.vertex,
            u: pair.c0.clone(),
            w: pair.c1.clone(),
            w_recipe: pair.c1_recipe.clone(),
            u_root: pair.c0_root.clone(),
            u_exp: pair.c0_exponent,
            w_root: pair.c1_root.clone(),
            w_exp: pair.c1_exponent,
            verdict_disjoint: true,
        });
    }
    // Product node side conditions.
    for (i, a) in p.factors.iter().enumerate() {
        for b in &p.factors[i + 1..] {
            if a.support.intersection(&b.support).next().is_some() {
                return Err(CertificateError::RefusedNode(format!(
                    "product rule: supports at v{} and v{} overlap",
                    a.vertex, b.vertex
                )));
            }
            if !supports_commute(delta, &a.support, &b.support) {
                return Err(CertificateError::RefusedNode(format!(
                    "product rule: supports at v{} and v{} do not commute",
                    a.vertex, b.vertex
                )));
            }
        }
    }
    // Retraction node: H words live in the union support.
    let mut union_support: Vec<usize> = Vec::new();
    for f in &p.factors {
        union_support.extend(f.support.iter().copied());
    }
    union_support.sort_unstable();
    for word in p.h0.iter().chain(p.h1.iter()) {
        if !word.support().iter().all(|g| union_support.contains(g)) {
            return Err(CertificateError::RefusedNode(
                "retraction rule: a subgroup word leaves the union support".to_string(),
            ));
        }
    }
    Ok(Certificate {
        n: p.n,
        graph: p.graph.clone(),
        parked: p.placement.parked(),
        factor_count: p.factors.len(),
        union_support,
        h0: p.h0.clone(),
        h1: p.h1.clone(),
        leaves,
    })
}

fn words_field(delta: &CommutationGraph, words: &[Word]) -> String {
    words
        .iter()
        .map(|w| format_word(delta, w))
        .collect::<Vec<_>>()
        .join(" ; ")
}

/// Serializes the certificate; the text is self-contained (it embeds the
/// subdivided graph) and deterministic.
pub fn serialize_certificate(cert: &Certificate) -> String {
    let delta = build_delta(&cert.graph);
    let mut out = String::new();
    let _ = writeln!(out, "certificate disjoint-conjugates v1");
    let _ = writeln!(out, "n {}", cert.n);
    let _ = writeln!(
        out,
        "placement {}",
        cert.parked
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",")
    );
    let _ = writeln!(out, "graph begin");
    out.push_str(&cert.graph.to_text());
    let _ = writeln!(out, "graph end");
    let _ = writeln!(
        out,
        "claim ambient=<raag on {} generators> h0=<{}> h1=<{}>",
        delta.generator_count(),
        words_field(&delta, &cert.h0),
        words_field(&delta, &cert.h1),
    );
    let _ = writeln!(
        out,
        "rule subgroup group=<braid group of {} tokens> side_conditions=generators_lift_to_loops:checked",
        cert.n
    );
    let onto = cert
        .union_support
        .iter()
        .map(|&e| cert.graph.edge_label(e).to_string())
        .collect::<Vec<_>>()
        .join(",");
    let _ = writeln!(
        out,
        "  rule retraction onto=<{onto}> side_conditions=full_subgraph:by_construction,supports_in_union:checked"
    );
    let _ = writeln!(
        out,
        "    rule product factors={} side_conditions=supports_disjoint:checked,supports_commute:checked",
        cert.factor_count
    );
    for leaf in &cert.leaves {
        let _ = writeln!(
            out,
            "      leaf root_conj vertex={} u=<{}> w=<{}> w_recipe=<{}> u_root=<{}> u_exp={} w_root=<{}> w_exp={} verdict={}",
            leaf.vertex,
            format_word(&delta, &leaf.u),
            format_word(&delta, &leaf.w),
            recipe_to_string(&leaf.w_recipe),
            format_word(&delta, &leaf.u_root),
            leaf.u_exp,
            format_word(&delta, &leaf.w_root),
            leaf.w_exp,
            if leaf.verdict_disjoint {
                "disjoint"
            } else {
                "entangled"
            }
        );
    }
    out
}

/// Hex digest (first 16 chars of SHA-256) of a serialized certificate.
pub fn certificate_digest(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    hex[..16].to_string()
}

/// Pulls `key=<value>` out of a line; values may contain spaces.
fn angle_field(line: &str, key: &str, lineno: usize) -> Result<String, CertificateError> {
    let pat = format!("{key}=<");
    let start = line.find(&pat).ok_or_else(|| CertificateError::Parse {
        line: lineno,
        msg: format!("missing field {key}"),
    })?;
    let rest = &line[start + pat.len()..];
    let end = rest.find('>').ok_or_else(|| CertificateError::Parse {
        line: lineno,
        msg: format!("unterminated field {key}"),
    })?;
    Ok(rest[..end].to_string())
}

fn plain_field(line: &str, key: &str, lineno: usize) -> Result<String, CertificateError> {
    let pat = format!("{key}=");
    let start = line.find(&pat).ok_or_else(|| CertificateError::Parse {
        line: lineno,
        msg: format!("missing field {key}"),
    })?;
    let rest = &line[start + pat.len()..];
    Ok(rest.split_whitespace().next().unwrap_or("").to_string())
}

pub fn parse_certificate(text: &str) -> Result<Certificate, CertificateError> {
    let mut lines = text.lines().enumerate().peekable();
    let err = |line: usize, msg: &str| CertificateError::Parse {
        line,
        msg: msg.to_string(),
    };
    let (lineno, header) = lines.next().ok_or_else(|| err(0, "empty certificate"))?;
    if header.trim() != "certificate disjoint-conjugates v1" {
        return Err(err(lineno + 1, "bad header"));
    }
    let mut n: Option<usize> = None;
    let mut parked: Vec<usize> = Vec::new();
    let mut graph_text = String::new();
    let mut claim_h0 = String::new();
    let mut claim_h1 = String::new();
    let mut factor_count = 0usize;
    let mut onto_labels: Vec<String> = Vec::new();
    let mut raw_leaves: Vec<(usize, String)> = Vec::new();
    let mut saw_subgroup = false;
    let mut saw_retraction = false;
    let mut saw_product = false;
    while let Some((idx, raw)) = lines.next() {
        let lineno = idx + 1;
        let line = raw.trim_end();
        let trimmed = line.trim_start();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("n ") {
            n = Some(
                rest.trim()
                    .parse()
                    .map_err(|_| err(lineno, "bad token count"))?,
            );
        } else if let Some(rest) = trimmed.strip_prefix("placement ") {
            for tok in rest.trim().split(',').filter(|t| !t.is_empty()) {
                parked.push(tok.parse().map_err(|_| err(lineno, "bad placement"))?);
            }
        } else if trimmed == "graph begin" {
            loop {
                let Some((gidx, gline)) = lines.next() else {
                    return Err(err(lineno, "unterminated graph section"));
                };
                if gline.trim() == "graph end" {
                    break;
                }
                graph_text.push_str(gline);
                graph_text.push('\n');
                let _ = gidx;
            }
        } else if trimmed.starts_with("claim ") {
            claim_h0 = angle_field(trimmed, "h0", lineno)?;
            claim_h1 = angle_field(trimmed, "h1", lineno)?;
        } else if trimmed.starts_with("rule subgroup ") {
            if !trimmed.contains("side_conditions=generators_lift_to_loops:checked") {
                return Err(err(lineno, "subgroup rule side condition missing"));
            }
            saw_subgroup = true;
        } else if trimmed.starts_with("rule retraction ") {
            let onto = angle_field(trimmed, "onto", lineno)?;
            onto_labels = onto
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|s| s.to_string())
                .collect();
            if !trimmed.contains("full_subgraph:by_construction")
                || !trimmed.contains("supports_in_union:checked")
            {
                return Err(err(lineno, "retraction rule side conditions missing"));
            }
            saw_retraction = true;
        } else if trimmed.starts_with("rule product ") {
            factor_count = plain_field(trimmed, "factors", lineno)?
                .parse()
                .map_err(|_| err(lineno, "bad factor count"))?;
            if !trimmed.contains("supports_disjoint:checked")
                || !trimmed.contains("supports_commute:checked")
            {
                return Err(err(lineno, "product rule side conditions missing"));
            }
            saw_product = true;
        } else if trimmed.starts_with("leaf root_conj ") {
            raw_leaves.push((lineno, trimmed.to_string()));
        } else {
            return Err(err(lineno, "unrecognized line"));
        }
    }
    if !(saw_subgroup && saw_retraction && saw_product) {
        return Err(err(0, "missing rule node"));
    }
    let n = n.ok_or_else(|| err(0, "missing token count"))?;
    let graph = parse_graph(&graph_text)?;
    let delta = build_delta(&graph);
    let union_support: Vec<usize> = {
        let mut out = Vec::new();
        for label in &onto_labels {
            let idx = graph
                .edge_by_label(label)
                .ok_or_else(|| err(0, "onto label not in graph"))?;
            out.push(idx);
        }
        out.sort_unstable();
        out
    };
    let parse_words = |field: &str| -> Result<Vec<Word>, CertificateError> {
        field
            .split(';')
            .map(|chunk| Ok(parse_word(&delta, chunk.trim())?))
            .collect()
    };
    let h0 = parse_words(&claim_h0)?;
    let h1 = parse_words(&claim_h1)?;
    let mut leaves = Vec::new();
    for (lineno, line) in raw_leaves {
        let vertex = plain_field(&line, "vertex", lineno)?
            .parse()
            .map_err(|_| err(lineno, "bad vertex"))?;
        let u = parse_word(&delta, &angle_field(&line, "u", lineno)?)?;
        let w = parse_word(&delta, &angle_field(&line, "w", lineno)?)?;
        let w_recipe = parse_recipe(&angle_field(&line, "w_recipe", lineno)?)
            .ok_or_else(|| err(lineno, "bad recipe"))?;
        let u_root = parse_word(&delta, &angle_field(&line, "u_root", lineno)?)?;
        let w_root = parse_word(&delta, &angle_field(&line, "w_root", lineno)?)?;
        let u_exp = plain_field(&line, "u_exp", lineno)?
            .parse()
            .map_err(|_| err(lineno, "bad exponent"))?;
        let w_exp = plain_field(&line, "w_exp", lineno)?
            .parse()
            .map_err(|_| err(lineno, "bad exponent"))?;
        let verdict = plain_field(&line, "verdict", lineno)?;
        let verdict_disjoint = match verdict.as_str() {
            "disjoint" => true,
            "entangled" => false,
            _ => return Err(err(lineno, "bad verdict")),
        };
        leaves.push(CertLeaf {
            vertex,
            u,
            w,
            w_recipe,
            u_root,
            u_exp,
            w_root,
            w_exp,
            verdict_disjoint,
        });
    }
    Ok(Certificate {
        n,
        graph,
        parked,
        factor_count,
        union_support,
        h0,
        h1,
        leaves,
    })
}

/// Re-verifies a certificate from scratch: recomputes the canonical
/// placement and factors from the embedded graph, re-lifts the subgroup
/// generators, re-runs every root computation and conjugacy decision, and
/// re-checks every side condition. Nothing recorded is trusted.
pub fn verify_certificate(cert: &Certificate) -> Result<(), CertificateError> {
    let delta = build_delta(&cert.graph);
    let invalid = |msg: String| CertificateError::Invalid(msg);
    // Context: the canonical placement must match the recorded one.
    let placement = place_basepoint(&cert.graph, cert.n)?;
    if placement.parked() != cert.parked {
        return Err(invalid("recorded placement is not canonical".to_string()));
    }
    let factors = local_factors(&cert.graph, &delta, &placement)?;
    if factors.len() != cert.factor_count || cert.leaves.len() != cert.factor_count {
        return Err(invalid("factor count mismatch".to_string()));
    }
    // Retraction node: the union support matches and H words stay inside.
    let mut union_support: Vec<usize> = Vec::new();
    for f in &factors {
        union_support.extend(f.support.iter().copied());
    }
    union_support.sort_unstable();
    if union_support != cert.union_support {
        return Err(invalid("union support mismatch".to_string()));
    }
    for word in cert.h0.iter().chain(cert.h1.iter()) {
        if !word.support().iter().all(|g| union_support.contains(g)) {
            return Err(invalid("subgroup word leaves union support".to_string()));
        }
    }
    // Product node.
    for (i, a) in factors.iter().enumerate() {
        for b in &factors[i + 1..] {
            if a.support.intersection(&b.support).next().is_some()
                || !supports_commute(&delta, &a.support, &b.support)
            {
                return Err(invalid(format!(
                    "product side condition fails for v{} and v{}",
                    a.vertex, b.vertex
                )));
            }
        }
    }
    // Claim lists match the leaves, in factor order.
    if cert.h0.len() != cert.leaves.len() || cert.h1.len() != cert.leaves.len() {
        return Err(invalid("claim length mismatch".to_string()));
    }
    for ((leaf, h0), h1) in cert.leaves.iter().zip(&cert.h0).zip(&cert.h1) {
        if !is_equal(&delta, &leaf.u, h0)? || !is_equal(&delta, &leaf.w, h1)? {
            return Err(invalid("claim words do not match leaves".to_string()));
        }
    }
    // Leaves: recompute everything.
    for (leaf, factor) in cert.leaves.iter().zip(&factors) {
        if leaf.vertex != factor.vertex {
            return Err(invalid("leaf vertex order mismatch".to_string()));
        }
        let x = &factor.free_words[0];
        let y = &factor.free_words[1];
        if !is_equal(&delta, &leaf.u, x)? {
            return Err(invalid(format!(
                "leaf v{}: u is not the factor's first free word",
                leaf.vertex
            )));
        }
        let rebuilt = apply_recipe(x, y, &leaf.w_recipe);
        if !is_equal(&delta, &rebuilt, &leaf.w)? {
            return Err(invalid(format!(
                "leaf v{}: w does not match its recipe",
                leaf.vertex
            )));
        }
        for (word, support) in [(&leaf.u, &factor.support), (&leaf.w, &factor.support)] {
            if !word.support().is_subset(support) {
                return Err(invalid(format!(
                    "leaf v{}: word leaves the factor support",
                    leaf.vertex
                )));
            }
        }
        let (u_root, u_exp) = primitive_root(&delta, &leaf.u)?;
        let (w_root, w_exp) = primitive_root(&delta, &leaf.w)?;
        if u_exp != leaf.u_exp
            || w_exp != leaf.w_exp
            || !is_equal(&delta, &u_root, &leaf.u_root)?
            || !is_equal(&delta, &w_root, &leaf.w_root)?
        {
            return Err(invalid(format!(
                "leaf v{}: recorded root data does not recompute",
                leaf.vertex
            )));
        }
        let disjoint = roots_disjoint(&delta, &u_root, &w_root)?;
        if disjoint != leaf.verdict_disjoint {
            return Err(invalid(format!(
                "leaf v{}: recorded verdict does not recompute",
                leaf.vertex
            )));
        }
        if !leaf.verdict_disjoint {
            return Err(invalid(format!(
                "leaf v{}: verdict is entangled; certificate proves nothing",
                leaf.vertex
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{star_graph, two_tripods};
    use crate::subgroup::run_pipeline;

    #[test]
    fn two_tripod_certificate_round_trip() {
        let pipeline = run_pipeline(&two_tripods(), 6).unwrap();
        let cert = certify_disjoint_conjugates(&pipeline).unwrap();
        assert_eq!(cert.leaves.len(), 2);
        let text = serialize_certificate(&cert);
        let reparsed = parse_certificate(&text).unwrap();
        verify_certificate(&reparsed).unwrap();
        assert_eq!(serialize_certificate(&reparsed), text);
    }

    #[test]
    fn star_certificate_single_leaf() {
        let pipeline = run_pipeline(&star_graph(4).unwrap(), 2).unwrap();
        let cert = certify_disjoint_conjugates(&pipeline).unwrap();
        assert_eq!(cert.leaves.len(), 1);
        verify_certificate(&cert).unwrap();
    }

    #[test]
    fn corrupt_pair_is_refused() {
        let mut pipeline = run_pipeline(&star_graph(4).unwrap(), 2).unwrap();
        let broken = pipeline.pairs[0].clone();
        pipeline.pairs[0].c1 = broken.c0.clone();
        pipeline.pairs[0].c1_root = broken.c0_root.clone();
        pipeline.pairs[0].c1_exponent = broken.c0_exponent;
        match certify_disjoint_conjugates(&pipeline) {
            Err(CertificateError::Refused { vertex, .. }) => assert_eq!(vertex, 0),
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn tampered_leaf_fails_verification() {
        let pipeline = run_pipeline(&star_graph(4).unwrap(), 2).unwrap();
        let cert = certify_disjoint_conjugates(&pipeline).unwrap();
        let text = serialize_certificate(&cert);
        // Tamper: swap the recorded w for the recorded u.
        let u_field = {
            let line = text
                .lines()
                .find(|l| l.trim_start().starts_with("leaf"))
                .unwrap();
            angle_field(line.trim_start(), "u", 0).unwrap()
        };
        let tampered = {
            let mut out = String::new();
            for line in text.lines() {
                if line.trim_start().starts_with("leaf") {
                    let original_w = angle_field(line.trim_start(), "w", 0).unwrap();
                    out.push_str(
                        &line.replace(&format!("w=<{original_w}>"), &format!("w=<{u_field}>")),
                    );
                } else {
                    out.push_str(line);
                }
                out.push('\n');
            }
            out
        };
        let reparsed = parse_certificate(&tampered).unwrap();
        assert!(verify_certificate(&reparsed).is_err());
    }

    #[test]
    fn missing_side_condition_is_a_parse_error() {
        let pipeline = run_pipeline(&star_graph(4).unwrap(), 2).unwrap();
        let cert = certify_disjoint_conjugates(&pipeline).unwrap();
        let text = serialize_certificate(&cert);
        let broken = text.replace("supports_commute:checked", "supports_commute:skipped");
        assert!(matches!(
            parse_certificate(&broken),
            Err(CertificateError::Parse { .. })
        ));
    }

    #[test]
    fn altered_placement_fails_verification() {
        let pipeline = run_pipeline(&star_graph(4).unwrap(), 2).unwrap();
        let cert = certify_disjoint_conjugates(&pipeline).unwrap();
        let text = serialize_certificate(&cert);
        let moved = text.replace("placement 1,2", "placement 1,3");
        assert_ne!(text, moved);
        let reparsed = parse_certificate(&moved).unwrap();
        assert!(verify_certificate(&reparsed).is_err());
    }

    #[test]
    fn digest_is_stable() {
        let pipeline = run_pipeline(&star_graph(4).unwrap(), 2).unwrap();
        let cert = certify_disjoint_conjugates(&pipeline).unwrap();
        let text = serialize_certificate(&cert);
        assert_eq!(certificate_digest(&text), certificate_digest(&text));
        assert_eq!(certificate_digest(&text).len(), 16);
    }
}
