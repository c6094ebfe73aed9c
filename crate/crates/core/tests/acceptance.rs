//! Acceptance suite: one test per criterion, each printing a pass line with
//! the measured values (visible with `--nocapture`). Everything asserted
//! here is exact; derived counts are recomputed by independent oracles
//! before being compared to the frozen expectations.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use braidlab::certificate::{
    certificate_digest, certify_disjoint_conjugates, parse_certificate, serialize_certificate,
    verify_certificate,
};
use braidlab::complex::{build_config_complex, npc_check, CubeComplex};
use braidlab::crisp_wiest::{basepoint_for, build_cw_map, check_local_isometry, pi1_generators};
use braidlab::graph::{
    cycle_graph, degree_profile, is_sufficiently_subdivided, star_graph, subdivide_for,
    tripod_subdivided, two_tripods, Graph, GraphError,
};
use braidlab::homology::{betti_numbers, boundary_matrices, homology};
use braidlab::raag::{
    build_delta, cyclically_reduce, format_word, is_conjugate, is_equal, is_trivial, normal_form,
    parse_word, primitive_root, CommutationGraph, Letter, Word,
};
use braidlab::report::{compute_report, ReportArtifacts};
use braidlab::snf::{rational_rank, smith_normal_form};
use braidlab::stallings::fold_words;
use braidlab::subgroup::{
    choose_disjoint_cyclics, local_factors, place_basepoint, roots_disjoint, run_pipeline,
    validate_placement,
};

/// Brute-force configuration count: choose `n` pairwise-disjoint cells of
/// the graph (vertices or closed edges), graded by the number of edges.
fn enumeration_oracle(g: &Graph, n: usize) -> Vec<usize> {
    let nv = g.vertex_count();
    let items: Vec<(u64, usize)> = (0..nv)
        .map(|v| (1u64 << v, 0))
        .chain((0..g.edge_count()).map(|e| {
            let (u, v) = g.edge(e);
            ((1u64 << u) | (1u64 << v), 1)
        }))
        .collect();
    let mut counts = vec![0usize; n.min(g.edge_count()) + 1];
    fn rec(
        items: &[(u64, usize)],
        start: usize,
        left: usize,
        used: u64,
        dim: usize,
        counts: &mut Vec<usize>,
    ) {
        if left == 0 {
            counts[dim] += 1;
            return;
        }
        for i in start..items.len() {
            let (mask, d) = items[i];
            if used & mask == 0 {
                rec(items, i + 1, left - 1, used | mask, dim + d, counts);
            }
        }
    }
    rec(&items, 0, n, 0, 0, &mut counts);
    counts
}

#[test]
fn acceptance_01_hexagon_two_tokens_on_tripod() {
    let t3 = star_graph(3).unwrap();
    assert!(is_sufficiently_subdivided(&t3, 2).0);
    let cx = build_config_complex(&t3, 2).unwrap();
    assert_eq!(cx.f_vector(), vec![6, 6, 0]);
    assert_eq!(enumeration_oracle(&t3, 2), vec![6, 6, 0]);
    let h = homology(&cx);
    assert_eq!(h.betti, vec![1, 1]);
    assert!(!h.has_torsion());
    let delta = build_delta(&t3);
    let map = build_cw_map(&cx, &delta).unwrap();
    let base = basepoint_for(&cx, &[1, 2]).unwrap();
    let loops = pi1_generators(&map, &base).unwrap();
    assert_eq!(loops.len(), 1);
    let target = parse_word(&delta, "a c^-1 b a^-1 c b^-1").unwrap();
    let got = &loops[0].word;
    let direct = is_conjugate(&delta, got, &target).unwrap();
    let inverted = is_conjugate(&delta, &got.inverse(), &target).unwrap();
    assert!(direct || inverted);
    println!(
        "acceptance 01 PASS: hexagon f=(6,6,0), b=(1,1), generator {} target up to inversion",
        if direct {
            "matches"
        } else {
            "matches after inverting"
        },
    );
}

#[test]
fn acceptance_02_three_tokens_on_subdivided_tripod() {
    let g = tripod_subdivided();
    assert!(is_sufficiently_subdivided(&g, 3).0);
    let cx = build_config_complex(&g, 3).unwrap();
    let expected = vec![35, 60, 27, 4];
    assert_eq!(cx.f_vector(), expected);
    assert_eq!(enumeration_oracle(&g, 3), expected);
    assert_eq!(cx.euler_characteristic(), -2);
    let h = homology(&cx);
    assert_eq!(h.betti, vec![1, 3, 0, 0]);
    assert!(!h.has_torsion());
    println!("acceptance 02 PASS: tripod n=3 f=(35,60,27,4), chi=-2, b=(1,3,0,0), no torsion");
}

#[test]
fn acceptance_03_tripod_generator_conjugacy() {
    let g = tripod_subdivided();
    let delta = build_delta(&g);
    let placement = place_basepoint(&g, 3).unwrap();
    let factors = local_factors(&g, &delta, &placement).unwrap();
    let words = &factors[0].free_words;
    assert_eq!(
        format_word(&delta, &words[0]),
        "a^-1 d^-1 f b^-1 e^-1 d a f^-1 e b"
    );
    let target = parse_word(&delta, "e^-1 f d^-1 e f^-1 d").unwrap();
    // The engine's exact verdicts: each generator is conjugate to the
    // target's inverse, not to the target as printed. This is the free
    // orientation/reading convention; the inverted comparison is the
    // reproduction and the direct verdict documents the divergence.
    for w in words {
        assert!(!is_conjugate(&delta, w, &target).unwrap());
        assert!(is_conjugate(&delta, w, &target.inverse()).unwrap());
    }
    // The three generators are pairwise conjugate in the ambient group, so
    // the leaf decision must reject every generator pair and the search
    // must land on a commutator-type candidate instead.
    for i in 0..3 {
        for j in i + 1..3 {
            assert!(is_conjugate(&delta, &words[i], &words[j]).unwrap());
        }
    }
    for w in words {
        let (_, exp) = primitive_root(&delta, w).unwrap();
        assert_eq!(exp, 1);
    }
    let pair = choose_disjoint_cyclics(&delta, &factors[0], 4).unwrap();
    assert!(roots_disjoint(&delta, &pair.c0_root, &pair.c1_root).unwrap());
    let (r1, _) = primitive_root(&delta, &words[0]).unwrap();
    let (r2, _) = primitive_root(&delta, &words[1]).unwrap();
    assert!(!roots_disjoint(&delta, &r1, &r2).unwrap());
    println!(
        "acceptance 03 PASS: g1,g2,g3 conjugate to the printed word's inverse (direct verdict false, documented divergence), pairwise conjugate, leaf pair c1 accepted after {} rejections",
        pair.rejected
    );
}

#[test]
fn acceptance_04_star_words_fold_rank_and_nonconjugacy() {
    for k in [4usize, 5, 6] {
        let star = star_graph(k).unwrap();
        let delta = build_delta(&star);
        let placement = place_basepoint(&star, 2).unwrap();
        let factors = local_factors(&star, &delta, &placement).unwrap();
        let words = &factors[0].free_words;
        assert_eq!(words.len(), k - 2);
        let refs: Vec<&Word> = words.iter().collect();
        assert_eq!(fold_words(&refs).rank(), k - 2, "fold rank for T_{k}");
        for i in 0..words.len() {
            for j in i + 1..words.len() {
                assert!(
                    !is_conjugate(&delta, &words[i], &words[j]).unwrap(),
                    "T_{k} generators {i},{j} must not be conjugate"
                );
            }
        }
    }
    println!("acceptance 04 PASS: star words freely generate rank k-2 and are pairwise non-conjugate, k=4,5,6");
}

fn zoo() -> Vec<(String, Graph, usize)> {
    let mut out = Vec::new();
    out.push(("T3 n=2".to_string(), star_graph(3).unwrap(), 2));
    let (t3_sub, _) = subdivide_for(&star_graph(3).unwrap(), 3).unwrap();
    out.push(("T3 n=3".to_string(), t3_sub, 3));
    out.push(("T4 n=2".to_string(), star_graph(4).unwrap(), 2));
    out.push(("T5 n=2".to_string(), star_graph(5).unwrap(), 2));
    let (tt, _) = subdivide_for(&two_tripods(), 6).unwrap();
    out.push(("two-tripod n=6".to_string(), tt, 6));
    out.push(("K3 n=2".to_string(), cycle_graph(3), 2));
    out
}

#[test]
fn acceptance_05_local_isometry_zoo() {
    for (name, g, n) in zoo() {
        let cx = build_config_complex(&g, n).unwrap();
        let delta = build_delta(&g);
        let map = build_cw_map(&cx, &delta).unwrap();
        let (ok, violation) = check_local_isometry(&map);
        assert!(ok, "{name}: local isometry failed: {violation:?}");
    }
    println!("acceptance 05 PASS: local isometry holds on the zoo (T3 n=2,3; T4; T5; two-tripod n=6; K3)");
}

#[test]
fn acceptance_06_product_witness_two_tripods() {
    let pipeline = run_pipeline(&two_tripods(), 6).unwrap();
    let delta = &pipeline.delta;
    let profile = degree_profile(&pipeline.graph);
    assert_eq!((profile.m, profile.m3), (2, 2));
    assert!(validate_placement(&pipeline.graph, 6, &pipeline.placement));
    assert_eq!(pipeline.witness.words.len(), 4);
    // Cross-factor commutators all trivial, recomputed here.
    for (i, (va, wa)) in pipeline.witness.words.iter().enumerate() {
        for (vb, wb) in &pipeline.witness.words[i + 1..] {
            if va == vb {
                continue;
            }
            let comm = wa.concat(wb).concat(&wa.inverse()).concat(&wb.inverse());
            assert!(is_trivial(delta, &comm).unwrap());
        }
    }
    // Per-factor rank evidence: the selected pair folds to rank 2 and the
    // full word set folds to the factor rank.
    for f in &pipeline.factors {
        let selected: Vec<&Word> = f.free_words.iter().take(2).collect();
        assert_eq!(fold_words(&selected).rank(), 2);
        let all: Vec<&Word> = f.free_words.iter().collect();
        assert_eq!(fold_words(&all).rank(), f.rank);
    }
    println!("acceptance 06 PASS: product witness emits 4 words, cross-factor commutators trivial, per-factor rank evidence holds");
}

/// Signed-letter multiset of a word, for the soundness-search prechecks.
fn letter_multiset(w: &Word) -> BTreeMap<(usize, bool), usize> {
    let mut m = BTreeMap::new();
    for l in w.letters() {
        *m.entry((l.gen, l.positive)).or_insert(0) += 1;
    }
    m
}

fn scale_multiset(m: &BTreeMap<(usize, bool), usize>, k: usize) -> BTreeMap<(usize, bool), usize> {
    m.iter().map(|(&key, &v)| (key, v * k)).collect()
}

/// Bounded exhaustive soundness search: over freely reduced conjugators `g`
/// of length <= `max_len` in the given generator support and exponents
/// `1 <= i <= max_exp`, `1 <= |j| <= max_exp`, look for a coincidence
/// `g u^i g^-1 = w^j`. Pairs are pruned by two conjugacy invariants of
/// cyclically reduced cores (length and signed-letter multiset); surviving
/// pairs are checked against every conjugator.
fn soundness_search(
    delta: &CommutationGraph,
    support: &BTreeSet<usize>,
    u: &Word,
    w: &Word,
    max_len: usize,
    max_exp: usize,
) -> Option<String> {
    let (u_core, _) = cyclically_reduce(delta, u).unwrap();
    let (w_core, _) = cyclically_reduce(delta, w).unwrap();
    let u_ms = letter_multiset(&u_core);
    let w_ms = letter_multiset(&w_core);
    let w_inv_ms = letter_multiset(&w_core.inverse());
    let mut live_pairs: Vec<(usize, i64)> = Vec::new();
    for i in 1..=max_exp {
        for j in 1..=max_exp {
            if u_core.len() * i != w_core.len() * j {
                continue;
            }
            if scale_multiset(&u_ms, i) == scale_multiset(&w_ms, j) {
                live_pairs.push((i, j as i64));
            }
            if scale_multiset(&u_ms, i) == scale_multiset(&w_inv_ms, j) {
                live_pairs.push((i, -(j as i64)));
            }
        }
    }
    if live_pairs.is_empty() {
        return None;
    }
    let letters: Vec<Letter> = support
        .iter()
        .flat_map(|&gen| {
            [
                Letter {
                    gen,
                    positive: true,
                },
                Letter {
                    gen,
                    positive: false,
                },
            ]
        })
        .collect();
    let powers_w: Vec<(i64, Word)> = live_pairs
        .iter()
        .map(|&(_, j)| {
            let base = if j > 0 { w.clone() } else { w.inverse() };
            (j, base.pow(j.unsigned_abs() as usize))
        })
        .collect();
    // Iterative deepening over freely reduced conjugator strings.
    let mut stack: Vec<Letter> = Vec::new();
    fn rec(
        delta: &CommutationGraph,
        letters: &[Letter],
        stack: &mut Vec<Letter>,
        max_len: usize,
        u: &Word,
        live_pairs: &[(usize, i64)],
        powers_w: &[(i64, Word)],
    ) -> Option<String> {
        let conj = Word::new(delta, stack.clone()).unwrap();
        for (idx, &(i, j)) in live_pairs.iter().enumerate() {
            let lhs = conj.concat(&u.pow(i)).concat(&conj.inverse());
            let rhs = &powers_w[idx].1;
            debug_assert_eq!(powers_w[idx].0, j);
            if is_equal(delta, &lhs, rhs).unwrap() {
                return Some(format!("g of length {} with i={i}, j={j}", stack.len()));
            }
        }
        if stack.len() == max_len {
            return None;
        }
        for &l in letters {
            if let Some(&last) = stack.last() {
                if last.gen == l.gen && last.positive != l.positive {
                    continue;
                }
            }
            stack.push(l);
            let hit = rec(delta, letters, stack, max_len, u, live_pairs, powers_w);
            stack.pop();
            if hit.is_some() {
                return hit;
            }
        }
        None
    }
    rec(
        delta,
        &letters,
        &mut stack,
        max_len,
        u,
        &live_pairs,
        &powers_w,
    )
}

#[test]
fn acceptance_07_certificate_and_tc_report() {
    // Positive controls: the searcher must find planted coincidences
    // before its all-clear on the real pairs means anything.
    {
        let g = tripod_subdivided();
        let delta = build_delta(&g);
        let support: BTreeSet<usize> = (0..delta.generator_count()).collect();
        let u = parse_word(&delta, "d e f").unwrap();
        let conj = parse_word(&delta, "a d^-1").unwrap();
        let w = conj.concat(&u).concat(&conj.inverse());
        assert!(
            soundness_search(&delta, &support, &u, &w, 6, 4).is_some(),
            "planted conjugacy must be found"
        );
        let w2 = u.pow(2);
        assert!(
            soundness_search(&delta, &support, &u, &w2, 6, 4).is_some(),
            "planted power coincidence must be found"
        );
        let independent = parse_word(&delta, "d e^-1 f").unwrap();
        assert!(soundness_search(&delta, &support, &u, &independent, 4, 3).is_none());
    }

    // Two-tripod graph: m = 2, threshold 6.
    let pipeline = run_pipeline(&two_tripods(), 6).unwrap();
    let cert = certify_disjoint_conjugates(&pipeline).unwrap();
    verify_certificate(&cert).unwrap();
    let text = serialize_certificate(&cert);
    let reparsed = parse_certificate(&text).unwrap();
    verify_certificate(&reparsed).unwrap();
    let artifacts = ReportArtifacts {
        witness_validated: true,
        certificate_digest: Some(certificate_digest(&text)),
        ..Default::default()
    };
    let report = compute_report(&two_tripods(), 6, &artifacts);
    assert_eq!(report.tc, Some(4));
    assert_eq!(report.actdim, Some(4));
    assert_eq!(report.l2_degree, Some(2));
    for (pair, factor) in pipeline.pairs.iter().zip(&pipeline.factors) {
        let hit = soundness_search(&pipeline.delta, &factor.support, &pair.c0, &pair.c1, 6, 4);
        assert!(hit.is_none(), "soundness violation: {hit:?}");
    }

    // Single star T4: m = 1, threshold 2.
    let star_pipeline = run_pipeline(&star_graph(4).unwrap(), 2).unwrap();
    let star_cert = certify_disjoint_conjugates(&star_pipeline).unwrap();
    verify_certificate(&star_cert).unwrap();
    let star_text = serialize_certificate(&star_cert);
    let star_artifacts = ReportArtifacts {
        witness_validated: true,
        certificate_digest: Some(certificate_digest(&star_text)),
        ..Default::default()
    };
    let star_report = compute_report(&star_graph(4).unwrap(), 2, &star_artifacts);
    assert_eq!(star_report.tc, Some(2));
    for (pair, factor) in star_pipeline.pairs.iter().zip(&star_pipeline.factors) {
        let hit = soundness_search(
            &star_pipeline.delta,
            &factor.support,
            &pair.c0,
            &pair.c1,
            6,
            4,
        );
        assert!(hit.is_none(), "soundness violation: {hit:?}");
    }
    println!("acceptance 07 PASS: certificates validate end-to-end, tc = 2m reported (4 and 2), bounded soundness search finds no coincidence");
}

fn random_graph(rng: &mut StdRng, max_vertices: usize, max_edges: usize) -> Graph {
    loop {
        let nv = rng.gen_range(2..=max_vertices);
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for u in 0..nv {
            for v in u + 1..nv {
                pairs.push((u, v));
            }
        }
        let mut edges = Vec::new();
        for &pair in &pairs {
            if rng.gen_bool(0.35) {
                edges.push(pair);
            }
            if edges.len() == max_edges {
                break;
            }
        }
        if let Ok(g) = Graph::new(nv, &edges) {
            return g;
        }
    }
}

/// Reference rewriting closure: all words reachable by commuting swaps of
/// adjacent letters and deletions of adjacent inverse pairs.
fn rewriting_closure(delta: &CommutationGraph, start: &[Letter]) -> BTreeSet<Vec<Letter>> {
    let mut seen: BTreeSet<Vec<Letter>> = BTreeSet::new();
    let mut queue: VecDeque<Vec<Letter>> = VecDeque::new();
    seen.insert(start.to_vec());
    queue.push_back(start.to_vec());
    while let Some(word) = queue.pop_front() {
        for i in 0..word.len().saturating_sub(1) {
            let (a, b) = (word[i], word[i + 1]);
            if a.gen == b.gen && a.positive != b.positive {
                let mut shorter = word.clone();
                shorter.drain(i..=i + 1);
                if seen.insert(shorter.clone()) {
                    queue.push_back(shorter);
                }
            }
            if a.gen != b.gen && delta.adjacent(a.gen, b.gen) {
                let mut swapped = word.clone();
                swapped.swap(i, i + 1);
                if seen.insert(swapped.clone()) {
                    queue.push_back(swapped);
                }
            }
        }
    }
    seen
}

fn minimal_elements(closure: &BTreeSet<Vec<Letter>>) -> BTreeSet<Vec<Letter>> {
    let min_len = closure.iter().map(|w| w.len()).min().unwrap_or(0);
    closure
        .iter()
        .filter(|w| w.len() == min_len)
        .cloned()
        .collect()
}

#[test]
fn acceptance_08_property_suites() {
    let mut rng = StdRng::seed_from_u64(0x5eed_cafe);

    // Boundary and rank properties on the example zoo and random graphs.
    let mut matrix_complexes: Vec<CubeComplex> = Vec::new();
    for (name, g, n) in zoo() {
        if name.starts_with("two-tripod") {
            continue; // exercised by build and link scans, not by SNF
        }
        matrix_complexes.push(build_config_complex(&g, n).unwrap());
    }
    for _ in 0..12 {
        let g = random_graph(&mut rng, 7, 8);
        let n = rng.gen_range(1..=3.min(g.vertex_count()));
        matrix_complexes.push(braidlab::complex::build_config_complex_override(&g, n).unwrap());
    }
    for cx in &matrix_complexes {
        let cc = boundary_matrices(cx);
        for pair in cc.boundaries.windows(2) {
            assert!(pair[0].mul(&pair[1]).is_zero(), "dd != 0");
        }
        for m in &cc.boundaries {
            assert_eq!(
                smith_normal_form(m).rank,
                rational_rank(m),
                "rank oracles disagree"
            );
        }
        let h = betti_numbers(&cc);
        let alt: i64 = h
            .betti
            .iter()
            .enumerate()
            .map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum();
        assert_eq!(alt, cx.euler_characteristic());
    }

    // Normal form agrees with the brute-force rewriting closure.
    let graphs: Vec<Graph> = vec![
        tripod_subdivided(),
        star_graph(4).unwrap(),
        random_graph(&mut rng, 4, 6),
    ];
    let deltas: Vec<CommutationGraph> = graphs.iter().map(build_delta).collect();
    let mut cases = 0usize;
    while cases < 10_000 {
        let delta = &deltas[cases % deltas.len()];
        let gens = delta.generator_count().min(6);
        if gens == 0 {
            cases += 1;
            continue;
        }
        let len = rng.gen_range(0..=8);
        let letters: Vec<Letter> = (0..len)
            .map(|_| Letter {
                gen: rng.gen_range(0..gens),
                positive: rng.gen_bool(0.5),
            })
            .collect();
        let word = Word::new(delta, letters.clone()).unwrap();
        let nf = normal_form(delta, &word).unwrap();
        let closure = rewriting_closure(delta, &letters);
        let minimal = minimal_elements(&closure);
        assert!(
            minimal.contains(nf.word.letters()),
            "normal form must be a minimal rewrite"
        );
        assert_eq!(
            minimal.iter().next().map(|m| m.as_slice()),
            Some(nf.word.letters()),
            "normal form must be the lexicographically least minimal rewrite"
        );
        // A scrambled variant (inserted inverse pair + a prefix rotation
        // through the closure) stays equal; an independently sampled word
        // is equal exactly when the minimal sets coincide.
        let mut scrambled = letters.clone();
        let pos = rng.gen_range(0..=scrambled.len());
        let gen = rng.gen_range(0..gens);
        let sign = rng.gen_bool(0.5);
        scrambled.insert(
            pos,
            Letter {
                gen,
                positive: sign,
            },
        );
        scrambled.insert(
            pos + 1,
            Letter {
                gen,
                positive: !sign,
            },
        );
        let scrambled_word = Word::new(delta, scrambled).unwrap();
        assert!(is_equal(delta, &word, &scrambled_word).unwrap());
        let other_len = rng.gen_range(0..=8);
        let other: Vec<Letter> = (0..other_len)
            .map(|_| Letter {
                gen: rng.gen_range(0..gens),
                positive: rng.gen_bool(0.5),
            })
            .collect();
        let other_word = Word::new(delta, other.clone()).unwrap();
        let brute_equal = minimal == minimal_elements(&rewriting_closure(delta, &other));
        assert_eq!(
            is_equal(delta, &word, &other_word).unwrap(),
            brute_equal,
            "normal-form equality must match the rewriting closure"
        );
        cases += 1;
    }

    // Flag links on sufficiently subdivided builds.
    for (_, g, n) in zoo() {
        let cx = build_config_complex(&g, n).unwrap();
        assert!(npc_check(&cx).0);
    }
    for _ in 0..6 {
        let g = random_graph(&mut rng, 6, 6);
        let n = rng.gen_range(1..=3);
        match subdivide_for(&g, n) {
            Ok((sub, _)) => {
                if sub.vertex_count() <= 40 && sub.edge_count() <= 40 {
                    let cx = build_config_complex(&sub, n).unwrap();
                    assert!(npc_check(&cx).0);
                }
            }
            Err(GraphError::CannotSubdivide { .. }) => {
                assert!(g.edge_count() == 0 && g.vertex_count() < n);
            }
            Err(e) => panic!("unexpected subdivision error: {e}"),
        }
    }

    // Exact conjugacy agrees with an independent closure oracle: the
    // fixpoint of commuting swaps, inverse-pair deletions, and one-letter
    // rotations reaches every bounded representative of the conjugacy
    // class, and two words are conjugate iff their minimal sets meet.
    fn conjugacy_closure(delta: &CommutationGraph, start: &[Letter]) -> BTreeSet<Vec<Letter>> {
        let mut seen: BTreeSet<Vec<Letter>> = BTreeSet::new();
        let mut queue: VecDeque<Vec<Letter>> = VecDeque::new();
        seen.insert(start.to_vec());
        queue.push_back(start.to_vec());
        while let Some(word) = queue.pop_front() {
            let push = |w: Vec<Letter>,
                        seen: &mut BTreeSet<Vec<Letter>>,
                        queue: &mut VecDeque<Vec<Letter>>| {
                if seen.insert(w.clone()) {
                    queue.push_back(w);
                }
            };
            if !word.is_empty() {
                let mut rotated = word.clone();
                let first = rotated.remove(0);
                rotated.push(first);
                push(rotated, &mut seen, &mut queue);
            }
            for i in 0..word.len().saturating_sub(1) {
                let (a, b) = (word[i], word[i + 1]);
                if a.gen == b.gen && a.positive != b.positive {
                    let mut shorter = word.clone();
                    shorter.drain(i..=i + 1);
                    push(shorter, &mut seen, &mut queue);
                }
                if a.gen != b.gen && delta.adjacent(a.gen, b.gen) {
                    let mut swapped = word.clone();
                    swapped.swap(i, i + 1);
                    push(swapped, &mut seen, &mut queue);
                }
            }
        }
        seen
    }
    // Two commutation graphs: the subdivided tripod's and the denser one
    // of a hexagon's edge set (each edge disjoint from three others).
    let conj_deltas = [
        build_delta(&tripod_subdivided()),
        build_delta(&cycle_graph(6)),
    ];
    let mut agreement_checked = 0usize;
    while agreement_checked < 300 {
        let delta = &conj_deltas[agreement_checked % 2];
        let len_u = rng.gen_range(0..=6);
        let u: Vec<Letter> = (0..len_u)
            .map(|_| Letter {
                gen: rng.gen_range(0..6),
                positive: rng.gen_bool(0.5),
            })
            .collect();
        let v: Vec<Letter> = if rng.gen_bool(0.5) {
            // A genuine conjugate: x u x^-1 for a short random x.
            let xlen = rng.gen_range(0..=2);
            let x: Vec<Letter> = (0..xlen)
                .map(|_| Letter {
                    gen: rng.gen_range(0..6),
                    positive: rng.gen_bool(0.5),
                })
                .collect();
            let mut out = x.clone();
            out.extend(u.iter().copied());
            out.extend(x.iter().rev().map(|l| l.inverse()));
            out
        } else {
            let len_v = rng.gen_range(0..=6);
            (0..len_v)
                .map(|_| Letter {
                    gen: rng.gen_range(0..6),
                    positive: rng.gen_bool(0.5),
                })
                .collect()
        };
        let wu = Word::new(delta, u.clone()).unwrap();
        let wv = Word::new(delta, v.clone()).unwrap();
        let brute = {
            let cu = minimal_elements(&conjugacy_closure(delta, &u));
            let cv = minimal_elements(&conjugacy_closure(delta, &v));
            cu.intersection(&cv).next().is_some()
        };
        assert_eq!(
            is_conjugate(delta, &wu, &wv).unwrap(),
            brute,
            "conjugacy must match the closure oracle"
        );
        // The engine's cyclic core is a minimal-length class member.
        let (core, _) = cyclically_reduce(delta, &wu).unwrap();
        let closure_min = minimal_elements(&conjugacy_closure(delta, &u))
            .iter()
            .next()
            .map_or(0, |m| m.len());
        assert_eq!(core.len(), closure_min, "core length vs closure minimum");
        agreement_checked += 1;
    }

    // Cyclic reduction and primitive roots agree with the closure oracle:
    // the engine's core length is the minimal length in the conjugacy
    // closure, and for powers of cyclically reduced words the brute-force
    // root (enumerated over strings of the right length, compared by the
    // rewriting closure) matches the engine's.
    let delta = build_delta(&tripod_subdivided());
    let mut root_checked = 0usize;
    while root_checked < 25 {
        let blen = rng.gen_range(1..=3);
        let base: Vec<Letter> = (0..blen)
            .map(|_| Letter {
                gen: rng.gen_range(0..6),
                positive: rng.gen_bool(0.5),
            })
            .collect();
        let base_word = Word::new(&delta, base.clone()).unwrap();
        if is_trivial(&delta, &base_word).unwrap() {
            continue;
        }
        // Keep only cyclically reduced bases (closure-minimal length).
        let closure_min = minimal_elements(&conjugacy_closure(&delta, &base))
            .iter()
            .next()
            .unwrap()
            .len();
        let nf_len = normal_form(&delta, &base_word).unwrap().len();
        if closure_min != nf_len || nf_len != base.len() {
            continue;
        }
        let k = rng.gen_range(1..=3);
        let w = base_word.pow(k);
        let w_nf = normal_form(&delta, &w).unwrap().word;
        let (core, _) = cyclically_reduce(&delta, &w).unwrap();
        let w_closure_min = minimal_elements(&conjugacy_closure(&delta, w_nf.letters()))
            .iter()
            .next()
            .unwrap()
            .len();
        assert_eq!(core.len(), w_closure_min, "core length vs closure minimum");
        let (root, exp) = primitive_root(&delta, &w).unwrap();
        // Brute root: the maximal e dividing |w| admitting a string s of
        // length |w|/e over w's letters with s^e = w (closure equality).
        let w_letters: BTreeSet<Letter> = w_nf.letters().iter().copied().collect();
        let alphabet: Vec<Letter> = w_letters.into_iter().collect();
        let equal_to_w = |candidate: &[Letter]| -> bool {
            // Equality, not conjugacy: compare reduced closures directly.
            let c1 = minimal_elements(&rewriting_closure(&delta, candidate));
            let c2 = minimal_elements(&rewriting_closure(&delta, w_nf.letters()));
            c1 == c2
        };
        let mut brute: Option<(Vec<Letter>, usize)> = None;
        let len = w_nf.len();
        for e in (1..=len).rev() {
            if !len.is_multiple_of(e) {
                continue;
            }
            if e == 1 {
                brute = Some((w_nf.letters().to_vec(), 1));
                break;
            }
            let slen = len / e;
            let mut found: Option<Vec<Letter>> = None;
            let mut stack: Vec<Letter> = Vec::new();
            fn gen_strings(
                alphabet: &[Letter],
                slen: usize,
                stack: &mut Vec<Letter>,
                test: &mut impl FnMut(&[Letter]) -> bool,
                found: &mut Option<Vec<Letter>>,
            ) {
                if found.is_some() {
                    return;
                }
                if stack.len() == slen {
                    if test(stack) {
                        *found = Some(stack.clone());
                    }
                    return;
                }
                for &l in alphabet {
                    stack.push(l);
                    gen_strings(alphabet, slen, stack, test, found);
                    stack.pop();
                }
            }
            let mut test = |s: &[Letter]| -> bool {
                let mut powered: Vec<Letter> = Vec::with_capacity(s.len() * e);
                for _ in 0..e {
                    powered.extend_from_slice(s);
                }
                equal_to_w(&powered)
            };
            gen_strings(&alphabet, slen, &mut stack, &mut test, &mut found);
            if let Some(s) = found {
                brute = Some((s, e));
                break;
            }
        }
        let (brute_root, brute_exp) = brute.expect("w is its own 1st root");
        assert_eq!(exp, brute_exp, "primitive exponent vs brute force");
        let brute_root_word = Word::new(&delta, brute_root).unwrap();
        assert!(
            is_equal(&delta, &root, &brute_root_word).unwrap(),
            "roots are unique, so the engine and brute roots must coincide"
        );
        root_checked += 1;
    }

    // Subdivision repair always satisfies the predicate.
    for _ in 0..60 {
        let g = random_graph(&mut rng, 8, 10);
        let n = rng.gen_range(1..=5);
        match subdivide_for(&g, n) {
            Ok((sub, plan)) => {
                assert!(is_sufficiently_subdivided(&sub, n).0);
                assert!(plan.per_edge_pieces.iter().all(|&p| p >= 1 && p <= n));
                let before = degree_profile(&g);
                let after = degree_profile(&sub);
                assert_eq!((before.m, before.m3), (after.m, after.m3));
            }
            Err(GraphError::CannotSubdivide { .. }) => {
                assert!(g.edge_count() == 0 && g.vertex_count() < n);
            }
            Err(e) => panic!("unexpected subdivision error: {e}"),
        }
    }
    println!("acceptance 08 PASS: dd=0, SNF rank = fraction-free rank, normal forms match 10^4 rewriting closures, links flag, subdivision repair sound");
}

#[test]
fn acceptance_09_divergence_star_b1_reporting() {
    // The measured first Betti number of the 2-token star complex exceeds
    // the rank of the constructed free subgroup; both are reported and the
    // mismatch is documented rather than reconciled.
    let t4 = star_graph(4).unwrap();
    let cx = build_config_complex(&t4, 2).unwrap();
    let h = homology(&cx);
    assert_eq!(h.betti, vec![1, 3]);
    let delta = build_delta(&t4);
    let placement = place_basepoint(&t4, 2).unwrap();
    let factors = local_factors(&t4, &delta, &placement).unwrap();
    let refs: Vec<&Word> = factors[0].free_words.iter().collect();
    let constructed_rank = fold_words(&refs).rank();
    assert_eq!(constructed_rank, 2);
    assert_ne!(h.betti[1], constructed_rank);
    println!(
        "acceptance 09 PASS: measured b1 = {} alongside constructed free rank {} (documented divergence)",
        h.betti[1], constructed_rank
    );
}
