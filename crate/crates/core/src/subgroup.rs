//! Executable constructions behind the product-of-free-groups witness and
//! the disjoint-conjugates certificate: token placement, local free factors
//! at essential vertices, the 2m-word product witness, and the per-factor
//! cyclic pairs whose primitive roots are non-conjugate.
//!
//! Every free word produced here is lifted as an actual token loop on the
//! graph (a move is legal when the source holds a token and the target is
//! free), so membership in the braid group is witnessed by construction,
//! not asserted.
//!
//! The leaf decision procedure adopts two standard facts about right-angled
//! Artin groups: primitive roots are unique, and cyclic subgroups `<u>`,
//! `<w>` fail to have disjoint conjugates exactly when the root of `u` is
//! conjugate to the root of `w` or its inverse. Conjugacy of elements
//! supported in a generator subset is decided on the ambient commutation
//! graph; cyclic cores never leave their support, so the decision agrees
//! with the one in the parabolic subgroup.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{degree_profile, is_sufficiently_subdivided, Graph, GraphError};
use crate::raag::{
    build_delta, is_conjugate, is_trivial, normal_form, primitive_root, supports_commute,
    CommutationGraph, Word, WordError,
};
use crate::stallings::fold_words;

#[derive(Debug, Error)]
pub enum SubgroupError {
    #[error("token count {n} is below the threshold 2m+m3 = {threshold}")]
    BelowThreshold { n: usize, threshold: usize },
    #[error("graph is not sufficiently subdivided for {n} tokens ({violations} violation(s))")]
    NotSubdivided { n: usize, violations: usize },
    #[error("graph has no essential vertices")]
    NoEssentialVertices,
    #[error("not enough room for {needed} filler token(s); {available} free vertices outside the work zones")]
    InsufficientRoom { needed: usize, available: usize },
    #[error("2-neighborhood of degree-3 vertex {vertex} is not a once-subdivided tripod")]
    NotTripodLike { vertex: usize },
    #[error(
        "token move {from} -> {to} is illegal (source empty, target occupied, or no such edge)"
    )]
    IllegalMove { from: usize, to: usize },
    #[error("move sequence does not return to the starting configuration")]
    NotALoop,
    #[error("placement does not serve essential vertex {vertex}")]
    PlacementMismatch { vertex: usize },
    #[error("factor at vertex {vertex} has fewer than two free words")]
    TooFewWords { vertex: usize },
    #[error("cyclic-pair search at vertex {vertex} exhausted its budget of {budget} syllables")]
    SearchExhausted { vertex: usize, budget: usize },
    #[error("supports of factors at vertices {u} and {v} overlap")]
    SupportOverlap { u: usize, v: usize },
    #[error(
        "supports of factors at vertices {u} and {v} do not commute; subdivide the graph further"
    )]
    NonCommutingSupports { u: usize, v: usize },
    #[error("cross-factor commutator of words at vertices {u} and {v} is not trivial")]
    CommutatorNotTrivial { u: usize, v: usize },
    #[error("rank evidence failed at vertex {vertex}: folded rank {got}, expected {expected}")]
    RankCheckFailed {
        vertex: usize,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Why a token is where it is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// Serves the factor at this essential vertex.
    Serves(usize),
    Filler,
}

/// A basepoint configuration with role tags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenPlacement {
    /// `(vertex, role)` pairs; vertices are pairwise distinct.
    pub tokens: Vec<(usize, Role)>,
}

impl TokenPlacement {
    /// Parked vertices, ascending.
    pub fn parked(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.tokens.iter().map(|&(x, _)| x).collect();
        v.sort_unstable();
        v
    }

    pub fn occupied_set(&self) -> BTreeSet<usize> {
        self.tokens.iter().map(|&(x, _)| x).collect()
    }

    pub fn serving(&self, essential: usize) -> Vec<usize> {
        self.tokens
            .iter()
            .filter(|(_, r)| *r == Role::Serves(essential))
            .map(|&(x, _)| x)
            .collect()
    }
}

/// Arms of a degree-3 essential vertex, sorted by the mid vertex index:
/// `(inner edge, mid, outer edge, home)` per arm, where `home` is the
/// distance-2 vertex serving as the token seat.
fn tripod_arms(g: &Graph, v: usize) -> Result<Vec<(usize, usize, usize, usize)>, SubgroupError> {
    let profile_deg = g.degree(v);
    debug_assert_eq!(profile_deg, 3);
    let mut arms = Vec::new();
    for e in g.incident_edges(v) {
        let (a, b) = g.edge(e);
        let mid = if a == v { b } else { a };
        if g.degree(mid) != 2 {
            return Err(SubgroupError::NotTripodLike { vertex: v });
        }
        let next = g
            .neighbors(mid)
            .into_iter()
            .find(|&w| w != v)
            .ok_or(SubgroupError::NotTripodLike { vertex: v })?;
        let outer = g.edge_between(mid, next).expect("neighbor edge exists");
        arms.push((e, mid, outer, next));
    }
    arms.sort_by_key(|&(_, mid, _, _)| mid);
    // A once-subdivided tripod needs 7 distinct vertices and the homes
    // must not be essential.
    let mut seen = BTreeSet::new();
    seen.insert(v);
    for &(_, mid, _, home) in &arms {
        if !seen.insert(mid) || !seen.insert(home) {
            return Err(SubgroupError::NotTripodLike { vertex: v });
        }
        if g.degree(home) >= 3 {
            return Err(SubgroupError::NotTripodLike { vertex: v });
        }
    }
    Ok(arms)
}

/// Vertices a factor's loops move through; fillers must stay out.
fn work_zone(g: &Graph, v: usize) -> BTreeSet<usize> {
    let mut zone = BTreeSet::new();
    zone.insert(v);
    if g.degree(v) >= 4 {
        for w in g.neighbors(v) {
            zone.insert(w);
        }
    } else {
        for w in g.neighbors(v) {
            zone.insert(w);
            for x in g.neighbors(w) {
                zone.insert(x);
            }
        }
    }
    zone
}

/// Places the basepoint tokens: two at neighbors of every degree >= 4
/// essential vertex (along its two lowest-indexed edges), three at distance
/// exactly 2 from every degree-3 essential vertex (one per arm), and the
/// remaining fillers greedily at maximal distance from the essential set.
pub fn place_basepoint(g: &Graph, n: usize) -> Result<TokenPlacement, SubgroupError> {
    let profile = degree_profile(g);
    let threshold = 2 * profile.m + profile.m3;
    if n < threshold {
        return Err(SubgroupError::BelowThreshold { n, threshold });
    }
    let (ok, violations) = is_sufficiently_subdivided(g, n);
    if !ok {
        return Err(SubgroupError::NotSubdivided {
            n,
            violations: violations.len(),
        });
    }
    let mut tokens: Vec<(usize, Role)> = Vec::new();
    let mut used = BTreeSet::new();
    let mut claim =
        |vertex: usize, role: Role, used: &mut BTreeSet<usize>| -> Result<(), SubgroupError> {
            if !used.insert(vertex) {
                return Err(SubgroupError::InsufficientRoom {
                    needed: 1,
                    available: 0,
                });
            }
            tokens.push((vertex, role));
            Ok(())
        };
    for &v in &profile.essential_vertices {
        if profile.degrees[v] >= 4 {
            let edges = g.incident_edges(v);
            for &e in edges.iter().take(2) {
                let (a, b) = g.edge(e);
                let seat = if a == v { b } else { a };
                claim(seat, Role::Serves(v), &mut used)?;
            }
        } else {
            for (_, _, _, home) in tripod_arms(g, v)? {
                claim(home, Role::Serves(v), &mut used)?;
            }
        }
    }
    // Fillers: farthest-point placement from the essential set, excluding
    // every factor's work zone; ties break to the smallest index.
    let fillers = n - tokens.len();
    if fillers > 0 {
        let mut excluded = used.clone();
        for &v in &profile.essential_vertices {
            excluded.extend(work_zone(g, v));
        }
        let mut dist = vec![usize::MAX; g.vertex_count()];
        let mut queue = std::collections::VecDeque::new();
        for &v in &profile.essential_vertices {
            dist[v] = 0;
            queue.push_back(v);
        }
        while let Some(x) = queue.pop_front() {
            for y in g.neighbors(x) {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        let mut candidates: Vec<usize> = (0..g.vertex_count())
            .filter(|v| !excluded.contains(v))
            .collect();
        // Unreachable vertices (other components) count as infinitely far.
        candidates.sort_by(|&a, &b| dist[b].cmp(&dist[a]).then(a.cmp(&b)));
        if candidates.len() < fillers {
            return Err(SubgroupError::InsufficientRoom {
                needed: fillers,
                available: candidates.len(),
            });
        }
        for &v in candidates.iter().take(fillers) {
            tokens.push((v, Role::Filler));
        }
    }
    Ok(TokenPlacement { tokens })
}

/// Checks the placement invariants against the graph.
pub fn validate_placement(g: &Graph, n: usize, placement: &TokenPlacement) -> bool {
    if placement.tokens.len() != n {
        return false;
    }
    let verts = placement.parked();
    if verts.windows(2).any(|w| w[0] == w[1]) {
        return false;
    }
    let profile = degree_profile(g);
    for &v in &profile.essential_vertices {
        let serving = placement.serving(v);
        if profile.degrees[v] >= 4 {
            if serving.len() != 2 || !serving.iter().all(|&s| g.edge_between(s, v).is_some()) {
                return false;
            }
        } else {
            if serving.len() != 3 {
                return false;
            }
            let Ok(arms) = tripod_arms(g, v) else {
                return false;
            };
            let homes: BTreeSet<usize> = arms.iter().map(|&(_, _, _, h)| h).collect();
            if serving.iter().any(|s| !homes.contains(s)) {
                return false;
            }
        }
    }
    true
}

/// The local free factor at an essential vertex: its support `E_v`, the
/// free words generating `F(v)` (lifted loops), and the expected rank.
#[derive(Debug, Clone)]
pub struct LocalFactor {
    pub vertex: usize,
    pub degree: usize,
    pub support: BTreeSet<usize>,
    pub free_words: Vec<Word>,
    pub rank: usize,
}

/// Lifts a move sequence to a word: each `(from, to)` step moves a token
/// along the edge between them, signed by the stored orientation. Errors if
/// any move is illegal or the sequence is not a loop.
pub fn lift_moves(
    g: &Graph,
    delta: &CommutationGraph,
    occupied: &BTreeSet<usize>,
    moves: &[(usize, usize)],
) -> Result<Word, SubgroupError> {
    let mut state = occupied.clone();
    let mut letters = Vec::with_capacity(moves.len());
    for &(from, to) in moves {
        let edge = g
            .edge_between(from, to)
            .ok_or(SubgroupError::IllegalMove { from, to })?;
        if !state.remove(&from) || !state.insert(to) {
            return Err(SubgroupError::IllegalMove { from, to });
        }
        let (tail, _) = g.orientation(edge);
        letters.push(crate::raag::Letter {
            gen: edge,
            positive: from == tail,
        });
    }
    if &state != occupied {
        return Err(SubgroupError::NotALoop);
    }
    Ok(Word::new(delta, letters)?)
}

/// Builds the local factor at each essential vertex, in vertex order.
///
/// Degree k >= 4: `E_v` is the k edges at `v`; the two serving tokens play
/// the first two edges and each remaining edge `e_i` yields the six-move
/// loop swapping the two tokens through `e_i`, k-2 words in all. Degree 3:
/// `E_v` is the once-subdivided tripod around `v` and the three ten-move
/// loops cycle the three tokens, transcribed arm by arm.
pub fn local_factors(
    g: &Graph,
    delta: &CommutationGraph,
    placement: &TokenPlacement,
) -> Result<Vec<LocalFactor>, SubgroupError> {
    let profile = degree_profile(g);
    if profile.m == 0 {
        return Err(SubgroupError::NoEssentialVertices);
    }
    let occupied = placement.occupied_set();
    let mut factors = Vec::new();
    for &v in &profile.essential_vertices {
        let degree = profile.degrees[v];
        if degree >= 4 {
            let edges = g.incident_edges(v);
            let seat = |e: usize| -> usize {
                let (a, b) = g.edge(e);
                if a == v {
                    b
                } else {
                    a
                }
            };
            let serving = placement.serving(v);
            let (x1, x2) = (seat(edges[0]), seat(edges[1]));
            if serving.len() != 2 || !serving.contains(&x1) || !serving.contains(&x2) {
                return Err(SubgroupError::PlacementMismatch { vertex: v });
            }
            let mut free_words = Vec::new();
            for &e in &edges[2..] {
                let y = seat(e);
                let moves = [(x1, v), (v, y), (x2, v), (v, x1), (y, v), (v, x2)];
                free_words.push(lift_moves(g, delta, &occupied, &moves)?);
            }
            factors.push(LocalFactor {
                vertex: v,
                degree,
                support: edges.into_iter().collect(),
                free_words,
                rank: degree - 2,
            });
        } else {
            let arms = tripod_arms(g, v)?;
            let serving = placement.serving(v);
            if serving.len() != 3 || arms.iter().any(|&(_, _, _, h)| !serving.contains(&h)) {
                return Err(SubgroupError::PlacementMismatch { vertex: v });
            }
            let mid = |i: usize| arms[i].1;
            let home = |i: usize| arms[i].3;
            // The ten-move loop pattern over an arm triple (x, y, z).
            let loop_moves = |x: usize, y: usize, z: usize| -> [(usize, usize); 10] {
                [
                    (home(x), mid(x)),
                    (mid(x), v),
                    (v, mid(z)),
                    (home(y), mid(y)),
                    (mid(y), v),
                    (v, mid(x)),
                    (mid(x), home(x)),
                    (mid(z), v),
                    (v, mid(y)),
                    (mid(y), home(y)),
                ]
            };
            let mut free_words = Vec::new();
            for (x, y, z) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
                free_words.push(lift_moves(g, delta, &occupied, &loop_moves(x, y, z))?);
            }
            let mut support = BTreeSet::new();
            for &(inner, _, outer, _) in &arms {
                support.insert(inner);
                support.insert(outer);
            }
            factors.push(LocalFactor {
                vertex: v,
                degree,
                support,
                free_words,
                rank: 3,
            });
        }
    }
    Ok(factors)
}

/// The verified product witness: two words per factor, cross-factor support
/// commutation and commutator triviality checked, per-factor rank-2
/// evidence from folding.
#[derive(Debug, Clone)]
pub struct ProductWitness {
    /// `(essential vertex, word)`, two per factor, factor order.
    pub words: Vec<(usize, Word)>,
    pub factor_count: usize,
    pub transcript: Vec<String>,
}

pub fn product_witness(
    delta: &CommutationGraph,
    factors: &[LocalFactor],
) -> Result<ProductWitness, SubgroupError> {
    assert!(!factors.is_empty(), "product witness needs >= 1 factor");
    let mut transcript = Vec::new();
    let mut words = Vec::new();
    for f in factors {
        if f.free_words.len() < 2 {
            return Err(SubgroupError::TooFewWords { vertex: f.vertex });
        }
        let pair = [&f.free_words[0], &f.free_words[1]];
        let folded = fold_words(&pair);
        if folded.rank() != 2 {
            return Err(SubgroupError::RankCheckFailed {
                vertex: f.vertex,
                expected: 2,
                got: folded.rank(),
            });
        }
        transcript.push(format!(
            "factor v{}: selected 2 of {} free words, folded rank 2",
            f.vertex,
            f.free_words.len()
        ));
        words.push((f.vertex, f.free_words[0].clone()));
        words.push((f.vertex, f.free_words[1].clone()));
    }
    for (i, a) in factors.iter().enumerate() {
        for b in &factors[i + 1..] {
            if a.support.intersection(&b.support).next().is_some() {
                return Err(SubgroupError::SupportOverlap {
                    u: a.vertex,
                    v: b.vertex,
                });
            }
            if !supports_commute(delta, &a.support, &b.support) {
                return Err(SubgroupError::NonCommutingSupports {
                    u: a.vertex,
                    v: b.vertex,
                });
            }
            transcript.push(format!(
                "supports_commute(E_v{}, E_v{}) = true",
                a.vertex, b.vertex
            ));
        }
    }
    // Cross-factor commutators of the selected words are trivial.
    for (i, (va, wa)) in words.iter().enumerate() {
        for (vb, wb) in &words[i + 1..] {
            if va == vb {
                continue;
            }
            let comm = wa.concat(wb).concat(&wa.inverse()).concat(&wb.inverse());
            if !is_trivial(delta, &comm)? {
                return Err(SubgroupError::CommutatorNotTrivial { u: *va, v: *vb });
            }
        }
    }
    transcript.push("all cross-factor commutators trivial".to_string());
    Ok(ProductWitness {
        words,
        factor_count: factors.len(),
        transcript,
    })
}

/// How a cyclic-pair candidate is assembled from the factor's first two
/// free words `x` and `y`: a sequence of signed picks.
pub type Recipe = Vec<(u8, bool)>;

pub fn recipe_to_string(recipe: &Recipe) -> String {
    recipe
        .iter()
        .map(|&(which, positive)| {
            let name = if which == 0 { "x" } else { "y" };
            if positive {
                name.to_string()
            } else {
                format!("{name}^-1")
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn parse_recipe(text: &str) -> Option<Recipe> {
    let mut out = Vec::new();
    for token in text.split_whitespace() {
        let (base, positive) = match token.strip_suffix("^-1") {
            Some(b) => (b, false),
            None => (token, true),
        };
        let which = match base {
            "x" => 0u8,
            "y" => 1u8,
            _ => return None,
        };
        out.push((which, positive));
    }
    Some(out)
}

pub fn apply_recipe(x: &Word, y: &Word, recipe: &Recipe) -> Word {
    let mut out = x.concat(&x.inverse()); // identity with the right fingerprint
    for &(which, positive) in recipe {
        let base = if which == 0 { x } else { y };
        let factor = if positive {
            base.clone()
        } else {
            base.inverse()
        };
        out = out.concat(&factor);
    }
    out
}

fn commutator_recipe(a: &Recipe, b: &Recipe) -> Recipe {
    let inv = |r: &Recipe| -> Recipe {
        r.iter()
            .rev()
            .map(|&(which, positive)| (which, !positive))
            .collect()
    };
    let mut out = a.clone();
    out.extend(b.iter().copied());
    out.extend(inv(a));
    out.extend(inv(b));
    out
}

/// Candidate recipes in search order: `[x,y]`, `[x,[x,y]]`, then freely
/// reduced picks over x, y of syllable length 1, 2, ... in lexicographic
/// order.
fn candidate_recipes(budget: usize) -> Vec<Recipe> {
    let x: Recipe = vec![(0, true)];
    let y: Recipe = vec![(1, true)];
    let xy = commutator_recipe(&x, &y);
    let mut out = vec![xy.clone(), commutator_recipe(&x, &xy)];
    for len in 1..=budget {
        let mut stack: Recipe = Vec::new();
        gen_reduced(&mut stack, len, &mut out);
    }
    out
}

fn gen_reduced(stack: &mut Recipe, len: usize, out: &mut Vec<Recipe>) {
    if stack.len() == len {
        out.push(stack.clone());
        return;
    }
    for which in 0u8..2 {
        for positive in [true, false] {
            if let Some(&(w, p)) = stack.last() {
                if w == which && p != positive {
                    continue; // freely cancels
                }
            }
            stack.push((which, positive));
            gen_reduced(stack, len, out);
            stack.pop();
        }
    }
}

/// A per-factor cyclic pair with its machine-checked leaf data.
#[derive(Debug, Clone)]
pub struct CyclicPair {
    pub vertex: usize,
    pub c0: Word,
    pub c1: Word,
    pub c1_recipe: Recipe,
    pub c0_root: Word,
    pub c0_exponent: usize,
    pub c1_root: Word,
    pub c1_exponent: usize,
    /// Candidates rejected before `c1` was accepted.
    pub rejected: usize,
}

/// The leaf decision: `<u>` and `<w>` have disjoint conjugates iff the
/// primitive root of `u` is conjugate to neither the root of `w` nor its
/// inverse.
pub fn roots_disjoint(
    delta: &CommutationGraph,
    u_root: &Word,
    w_root: &Word,
) -> Result<bool, WordError> {
    Ok(!is_conjugate(delta, u_root, w_root)? && !is_conjugate(delta, u_root, &w_root.inverse())?)
}

/// Chooses the cyclic pair for one factor: `C0` is the first free word and
/// `C1` the first candidate in the documented search order whose primitive
/// root is non-conjugate (up to inversion) to that of `C0`.
pub fn choose_disjoint_cyclics(
    delta: &CommutationGraph,
    factor: &LocalFactor,
    syllable_budget: usize,
) -> Result<CyclicPair, SubgroupError> {
    if factor.free_words.len() < 2 {
        return Err(SubgroupError::TooFewWords {
            vertex: factor.vertex,
        });
    }
    let x = &factor.free_words[0];
    let y = &factor.free_words[1];
    let (c0_root, c0_exponent) = primitive_root(delta, x)?;
    let mut rejected = 0;
    for recipe in candidate_recipes(syllable_budget) {
        let candidate = apply_recipe(x, y, &recipe);
        if is_trivial(delta, &candidate)? {
            rejected += 1;
            continue;
        }
        let (c1_root, c1_exponent) = primitive_root(delta, &candidate)?;
        if roots_disjoint(delta, &c0_root, &c1_root)? {
            let c1 = normal_form(delta, &candidate)?.word;
            return Ok(CyclicPair {
                vertex: factor.vertex,
                c0: normal_form(delta, x)?.word,
                c1,
                c1_recipe: recipe,
                c0_root,
                c0_exponent,
                c1_root,
                c1_exponent,
                rejected,
            });
        }
        rejected += 1;
    }
    Err(SubgroupError::SearchExhausted {
        vertex: factor.vertex,
        budget: syllable_budget,
    })
}

/// Assembles `H_0 = <C0(v)>_v` and `H_1 = <C1(v)>_v` and verifies the free
/// abelian structure: cross-factor supports commute and all cross-factor
/// commutators vanish.
pub fn assemble_h0_h1(
    delta: &CommutationGraph,
    factors: &[LocalFactor],
    pairs: &[CyclicPair],
) -> Result<(Vec<Word>, Vec<Word>), SubgroupError> {
    assert_eq!(factors.len(), pairs.len());
    for (f, p) in factors.iter().zip(pairs) {
        assert_eq!(f.vertex, p.vertex);
        debug_assert!(p.c0.support().is_subset(&f.support));
        debug_assert!(p.c1.support().is_subset(&f.support));
    }
    for (i, a) in factors.iter().enumerate() {
        for b in &factors[i + 1..] {
            if !supports_commute(delta, &a.support, &b.support) {
                return Err(SubgroupError::NonCommutingSupports {
                    u: a.vertex,
                    v: b.vertex,
                });
            }
        }
    }
    let h0: Vec<Word> = pairs.iter().map(|p| p.c0.clone()).collect();
    let h1: Vec<Word> = pairs.iter().map(|p| p.c1.clone()).collect();
    for words in [&h0, &h1] {
        for i in 0..words.len() {
            for j in i + 1..words.len() {
                let comm = words[i]
                    .concat(&words[j])
                    .concat(&words[i].inverse())
                    .concat(&words[j].inverse());
                if !is_trivial(delta, &comm)? {
                    return Err(SubgroupError::CommutatorNotTrivial {
                        u: pairs[i].vertex,
                        v: pairs[j].vertex,
                    });
                }
            }
        }
    }
    Ok((h0, h1))
}

/// Checker utility for the homomorphism rule: if a generator-map
/// homomorphism `f` kills every generator of `H0` and is injective on the
/// cyclic subgroup `H1 = <w>`, then `H0` and `H1` have disjoint conjugates.
/// Injectivity on a cyclic subgroup of a torsion-free target amounts to
/// `f(w) != 1`. Verifies that the generator map actually defines a
/// homomorphism (images of adjacent generators commute). Unused by the
/// certificate chain; the pipeline relies on the subgroup, retraction, and
/// product rules only.
pub fn homomorphism_rule_check(
    src: &CommutationGraph,
    dst: &CommutationGraph,
    generator_images: &[Word],
    h0: &[Word],
    h1: &Word,
) -> Result<bool, WordError> {
    assert_eq!(generator_images.len(), src.generator_count());
    for a in 0..src.generator_count() {
        for b in a + 1..src.generator_count() {
            if !src.adjacent(a, b) {
                continue;
            }
            let (ia, ib) = (&generator_images[a], &generator_images[b]);
            let comm = ia.concat(ib).concat(&ia.inverse()).concat(&ib.inverse());
            if !is_trivial(dst, &comm)? {
                return Ok(false);
            }
        }
    }
    let apply = |w: &Word| -> Word {
        let mut out: Option<Word> = None;
        for l in w.letters() {
            let img = if l.positive {
                generator_images[l.gen].clone()
            } else {
                generator_images[l.gen].inverse()
            };
            out = Some(match out {
                None => img,
                Some(acc) => acc.concat(&img),
            });
        }
        out.unwrap_or_else(|| {
            generator_images
                .first()
                .map(|g| g.concat(&g.inverse()))
                .expect("nonempty generator list")
        })
    };
    for h in h0 {
        if !is_trivial(dst, &apply(h))? {
            return Ok(false);
        }
    }
    Ok(!is_trivial(dst, &apply(h1))?)
}

/// Everything the witness and certificate pipeline produces for a graph and
/// token count.
pub struct Pipeline {
    pub graph: Graph,
    pub delta: CommutationGraph,
    pub n: usize,
    pub placement: TokenPlacement,
    pub factors: Vec<LocalFactor>,
    pub witness: ProductWitness,
    pub pairs: Vec<CyclicPair>,
    pub h0: Vec<Word>,
    pub h1: Vec<Word>,
}

/// Default syllable budget for the cyclic-pair search.
pub const DEFAULT_SEARCH_BUDGET: usize = 4;

/// Runs placement, factors, witness, and cyclic pairs on an already
/// subdivided graph. On a geometry failure (cramped placement or a
/// degree-3 neighborhood that is not yet a tripod) the caller is expected
/// to subdivide further and retry; [`run_pipeline`] does that once.
pub fn run_pipeline_on(g: &Graph, n: usize) -> Result<Pipeline, SubgroupError> {
    let delta = build_delta(g);
    let placement = place_basepoint(g, n)?;
    let factors = local_factors(g, &delta, &placement)?;
    let witness = product_witness(&delta, &factors)?;
    let mut pairs = Vec::new();
    for f in &factors {
        pairs.push(choose_disjoint_cyclics(&delta, f, DEFAULT_SEARCH_BUDGET)?);
    }
    let (h0, h1) = assemble_h0_h1(&delta, &factors, &pairs)?;
    Ok(Pipeline {
        graph: g.clone(),
        delta,
        n,
        placement,
        factors,
        witness,
        pairs,
        h0,
        h1,
    })
}

/// Subdivides `g` for `n` tokens and runs the pipeline, re-subdividing once
/// (doubling every piece count) if the first placement attempt finds the
/// geometry too cramped.
pub fn run_pipeline(g: &Graph, n: usize) -> Result<Pipeline, SubgroupError> {
    let (subdivided, plan) = crate::graph::subdivide_for(g, n)?;
    match run_pipeline_on(&subdivided, n) {
        Ok(p) => Ok(p),
        Err(
            SubgroupError::InsufficientRoom { .. }
            | SubgroupError::NotTripodLike { .. }
            | SubgroupError::PlacementMismatch { .. },
        ) => {
            let finer = crate::graph::SubdivisionPlan {
                per_edge_pieces: plan.per_edge_pieces.iter().map(|&p| p * 2).collect(),
                target_n: n,
            };
            let refined = crate::graph::apply_subdivision(g, &finer);
            run_pipeline_on(&refined, n)
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{star_graph, subdivide_for, tripod_subdivided, two_tripods};
    use crate::raag::{format_word, parse_word};

    #[test]
    fn tripod_placement_is_the_three_leaves() {
        let g = tripod_subdivided();
        let p = place_basepoint(&g, 3).unwrap();
        assert_eq!(p.parked(), vec![4, 5, 6]);
        assert!(validate_placement(&g, 3, &p));
    }

    #[test]
    fn star4_placement_is_two_leaves() {
        let g = star_graph(4).unwrap();
        let p = place_basepoint(&g, 2).unwrap();
        assert_eq!(p.parked(), vec![1, 2]);
        assert!(validate_placement(&g, 2, &p));
    }

    #[test]
    fn two_tripod_placement_serves_both() {
        let g = two_tripods();
        let (sub, _) = subdivide_for(&g, 6).unwrap();
        let p = place_basepoint(&sub, 6).unwrap();
        assert_eq!(p.tokens.len(), 6);
        assert!(validate_placement(&sub, 6, &p));
        let profile = degree_profile(&sub);
        for &v in &profile.essential_vertices {
            assert_eq!(p.serving(v).len(), 3);
            for s in p.serving(v) {
                assert_eq!(crate::graph::edge_distance(&sub, v, s).unwrap(), 2);
            }
        }
    }

    #[test]
    fn below_threshold_rejected() {
        let g = tripod_subdivided();
        assert!(matches!(
            place_basepoint(&g, 2),
            Err(SubgroupError::BelowThreshold { threshold: 3, .. })
        ));
    }

    #[test]
    fn tripod_factor_words_match_printed_generators() {
        let g = tripod_subdivided();
        let delta = build_delta(&g);
        let placement = place_basepoint(&g, 3).unwrap();
        let factors = local_factors(&g, &delta, &placement).unwrap();
        assert_eq!(factors.len(), 1);
        let words: Vec<String> = factors[0]
            .free_words
            .iter()
            .map(|w| format_word(&delta, w))
            .collect();
        assert_eq!(words[0], "a^-1 d^-1 f b^-1 e^-1 d a f^-1 e b");
        assert_eq!(words[1], "b^-1 e^-1 d c^-1 f^-1 e b d^-1 f c");
        assert_eq!(words[2], "c^-1 f^-1 e a^-1 d^-1 f c e^-1 d a");
    }

    #[test]
    fn star5_factor_words() {
        let g = star_graph(5).unwrap();
        let delta = build_delta(&g);
        let placement = place_basepoint(&g, 2).unwrap();
        let factors = local_factors(&g, &delta, &placement).unwrap();
        assert_eq!(factors[0].free_words.len(), 3);
        let words: Vec<String> = factors[0]
            .free_words
            .iter()
            .map(|w| format_word(&delta, w))
            .collect();
        assert_eq!(words[0], "a1^-1 a3 a2^-1 a1 a3^-1 a2");
        assert_eq!(words[1], "a1^-1 a4 a2^-1 a1 a4^-1 a2");
        assert_eq!(words[2], "a1^-1 a5 a2^-1 a1 a5^-1 a2");
    }

    #[test]
    fn star_factor_words_fold_freely() {
        let g = star_graph(5).unwrap();
        let delta = build_delta(&g);
        let placement = place_basepoint(&g, 2).unwrap();
        let factors = local_factors(&g, &delta, &placement).unwrap();
        let refs: Vec<&Word> = factors[0].free_words.iter().collect();
        assert_eq!(fold_words(&refs).rank(), 3);
    }

    #[test]
    fn illegal_moves_are_rejected() {
        let g = tripod_subdivided();
        let delta = build_delta(&g);
        let occupied: BTreeSet<usize> = [4, 5, 6].into_iter().collect();
        // Source not occupied.
        assert!(matches!(
            lift_moves(&g, &delta, &occupied, &[(1, 0)]),
            Err(SubgroupError::IllegalMove { .. })
        ));
        // Not a loop.
        assert!(matches!(
            lift_moves(&g, &delta, &occupied, &[(4, 1)]),
            Err(SubgroupError::NotALoop)
        ));
    }

    #[test]
    fn product_witness_two_tripods() {
        let pipeline = run_pipeline(&two_tripods(), 6).unwrap();
        assert_eq!(pipeline.witness.words.len(), 4);
        assert_eq!(pipeline.witness.factor_count, 2);
    }

    #[test]
    fn single_factor_witness() {
        let pipeline = run_pipeline(&star_graph(4).unwrap(), 2).unwrap();
        assert_eq!(pipeline.witness.words.len(), 2);
    }

    #[test]
    fn cyclic_pair_for_tripod_rejects_conjugate_candidates() {
        let g = tripod_subdivided();
        let delta = build_delta(&g);
        let placement = place_basepoint(&g, 3).unwrap();
        let factors = local_factors(&g, &delta, &placement).unwrap();
        let pair = choose_disjoint_cyclics(&delta, &factors[0], 4).unwrap();
        assert!(roots_disjoint(&delta, &pair.c0_root, &pair.c1_root).unwrap());
        // x vs x fails the leaf check.
        let x = &factors[0].free_words[0];
        let (rx, _) = primitive_root(&delta, x).unwrap();
        assert!(!roots_disjoint(&delta, &rx, &rx).unwrap());
    }

    #[test]
    fn h0_h1_assembly_two_tripods() {
        let pipeline = run_pipeline(&two_tripods(), 6).unwrap();
        assert_eq!(pipeline.h0.len(), 2);
        assert_eq!(pipeline.h1.len(), 2);
    }

    #[test]
    fn retry_resubdivides_tight_cycle_geometry() {
        // A 4-cycle with a tail: the minimal subdivision for n = 3 keeps
        // the 4-cycle, whose two cycle arms from the essential vertex meet
        // at the antipode, so the first placement attempt fails tripod
        // geometry and the pipeline's single re-subdivision must fix it.
        let g = crate::graph::Graph::new(5, &[(0, 1), (1, 2), (2, 3), (0, 3), (0, 4)]).unwrap();
        let profile = degree_profile(&g);
        assert_eq!((profile.m, profile.m3), (1, 1));
        let (first, _) = crate::graph::subdivide_for(&g, 3).unwrap();
        assert!(matches!(
            run_pipeline_on(&first, 3),
            Err(SubgroupError::NotTripodLike { vertex: 0 })
        ));
        let pipeline = run_pipeline(&g, 3).unwrap();
        assert_eq!(pipeline.factors.len(), 1);
        assert_eq!(pipeline.factors[0].free_words.len(), 3);
        assert!(validate_placement(&pipeline.graph, 3, &pipeline.placement));
    }

    #[test]
    fn chain_of_three_tripods() {
        // Three degree-3 vertices in a row; threshold 2m + m3 = 9.
        let g = crate::graph::Graph::new(
            10,
            &[
                (0, 1),
                (0, 2),
                (0, 3),
                (3, 4),
                (4, 5),
                (4, 6),
                (6, 7),
                (7, 8),
                (7, 9),
            ],
        )
        .unwrap();
        let profile = degree_profile(&g);
        assert_eq!((profile.m, profile.m3), (3, 3));
        let pipeline = run_pipeline(&g, 9).unwrap();
        assert_eq!(pipeline.h0.len(), 3);
        assert_eq!(pipeline.h1.len(), 3);
        assert_eq!(pipeline.witness.words.len(), 6);
    }

    #[test]
    fn homomorphism_rule_utility() {
        let t4 = star_graph(4).unwrap();
        let delta = build_delta(&t4);
        // f: F4 -> F4 killing a1, a2, a3 and fixing a4.
        let images: Vec<Word> = vec![
            Word::identity(&delta),
            Word::identity(&delta),
            Word::identity(&delta),
            parse_word(&delta, "a4").unwrap(),
        ];
        let h0 = vec![parse_word(&delta, "a1 a2").unwrap()];
        let h1 = parse_word(&delta, "a4 a1").unwrap();
        assert!(homomorphism_rule_check(&delta, &delta, &images, &h0, &h1).unwrap());
        let bad_h1 = parse_word(&delta, "a1").unwrap();
        assert!(!homomorphism_rule_check(&delta, &delta, &images, &h0, &bad_h1).unwrap());
    }
}
