//! Right-angled Artin group machinery over the commutation graph of a
//! graph's edge set: words, canonical normal forms, conjugacy, primitive
//! roots, and retractions onto generator subsets.
//!
//! The commutation graph has one generator per edge of the source graph,
//! with two generators commuting exactly when the edges are disjoint.
//! Normal forms are the lexicographically least linearizations of reduced
//! traces, so two words are equal in the group iff their normal forms are
//! identical letter sequences.
//!
//! Two standard facts about right-angled Artin groups are adopted as
//! decision procedures rather than re-proved here: every nontrivial element
//! has a unique primitive root, and two cyclic subgroups `<u>`, `<w>` fail
//! to have disjoint conjugates exactly when the primitive root of `u` is
//! conjugate to the primitive root of `w` or to its inverse.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("unknown generator label `{0}`")]
    UnknownLabel(String),
    #[error("malformed word token `{0}` (expected `<label>` or `<label>^-1`)")]
    MalformedToken(String),
    #[error("word belongs to a different commutation graph")]
    GraphMismatch,
    #[error("operation requires a nontrivial word")]
    TrivialWord,
    #[error("generator index {0} out of range")]
    GeneratorOutOfRange(usize),
}

/// The commutation graph: one generator per edge of the source graph,
/// adjacency = disjointness of the underlying edges.
#[derive(Debug, Clone)]
pub struct CommutationGraph {
    labels: Vec<String>,
    /// Symmetric, irreflexive adjacency.
    adjacency: Vec<Vec<bool>>,
    /// Component index of each underlying graph edge, used to report the
    /// join decomposition when the source graph is disconnected.
    edge_component: Vec<usize>,
    origin_fingerprint: u64,
}

impl CommutationGraph {
    pub fn generator_count(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, gen: usize) -> &str {
        &self.labels[gen]
    }

    pub fn generator_by_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        a != b && self.adjacency[a][b]
    }

    pub fn origin_fingerprint(&self) -> u64 {
        self.origin_fingerprint
    }

    /// Generators grouped by connected component of the source graph.
    /// With more than one group the commutation graph is a join and the
    /// group splits as the direct product of the groups' subgroups.
    pub fn join_partition(&self) -> Vec<Vec<usize>> {
        let ncomp = self
            .edge_component
            .iter()
            .copied()
            .max()
            .map_or(0, |c| c + 1);
        let mut parts = vec![Vec::new(); ncomp];
        for (gen, &c) in self.edge_component.iter().enumerate() {
            parts[c].push(gen);
        }
        parts.retain(|p| !p.is_empty());
        parts
    }
}

/// Builds the commutation graph of `g`: generators are the edges of `g`,
/// two generators adjacent iff the edges share no endpoint.
pub fn build_delta(g: &Graph) -> CommutationGraph {
    let ne = g.edge_count();
    let mut adjacency = vec![vec![false; ne]; ne];
    for (i, row) in adjacency.iter_mut().enumerate() {
        let (a, b) = g.edge(i);
        for (j, slot) in row.iter_mut().enumerate() {
            if i == j {
                continue;
            }
            let (c, d) = g.edge(j);
            *slot = a != c && a != d && b != c && b != d;
        }
    }
    // Component of each edge via union over the vertex components.
    let mut vertex_comp: Vec<Option<usize>> = vec![None; g.vertex_count()];
    let mut next = 0;
    for start in 0..g.vertex_count() {
        if vertex_comp[start].is_some() {
            continue;
        }
        let dist = g.bfs_distances(start);
        for (v, &d) in dist.iter().enumerate() {
            if d != usize::MAX && vertex_comp[v].is_none() {
                vertex_comp[v] = Some(next);
            }
        }
        next += 1;
    }
    let edge_component: Vec<usize> = (0..ne)
        .map(|i| vertex_comp[g.edge(i).0].expect("endpoint visited"))
        .collect();
    CommutationGraph {
        labels: (0..ne).map(|i| g.edge_label(i).to_string()).collect(),
        adjacency,
        edge_component,
        origin_fingerprint: g.fingerprint(),
    }
}

/// A signed generator. Ordering is (generator index, sign) with the
/// positive letter first, which fixes the lexicographic normal form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: usize,
    pub positive: bool,
}

impl Letter {
    pub fn inverse(self) -> Letter {
        Letter {
            gen: self.gen,
            positive: !self.positive,
        }
    }

    fn rank(self) -> (usize, u8) {
        (self.gen, if self.positive { 0 } else { 1 })
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.rank().cmp(&other.rank())
    }
}

/// A group word over the generators of one commutation graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    graph_fingerprint: u64,
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(delta: &CommutationGraph, letters: Vec<Letter>) -> Result<Word, WordError> {
        for l in &letters {
            if l.gen >= delta.generator_count() {
                return Err(WordError::GeneratorOutOfRange(l.gen));
            }
        }
        Ok(Word {
            graph_fingerprint: delta.origin_fingerprint,
            letters,
        })
    }

    pub fn identity(delta: &CommutationGraph) -> Word {
        Word {
            graph_fingerprint: delta.origin_fingerprint,
            letters: Vec::new(),
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            graph_fingerprint: self.graph_fingerprint,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Concatenation `self * other` (no reduction).
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word {
            graph_fingerprint: self.graph_fingerprint,
            letters,
        }
    }

    pub fn pow(&self, k: usize) -> Word {
        let mut letters = Vec::with_capacity(self.letters.len() * k);
        for _ in 0..k {
            letters.extend_from_slice(&self.letters);
        }
        Word {
            graph_fingerprint: self.graph_fingerprint,
            letters,
        }
    }

    /// Generators occurring in the word.
    pub fn support(&self) -> BTreeSet<usize> {
        self.letters.iter().map(|l| l.gen).collect()
    }

    fn check(&self, delta: &CommutationGraph) -> Result<(), WordError> {
        if self.graph_fingerprint != delta.origin_fingerprint {
            return Err(WordError::GraphMismatch);
        }
        Ok(())
    }
}

/// Parses the word syntax: whitespace-separated tokens `<label>` or
/// `<label>^-1` over the edge labels of the source graph.
pub fn parse_word(delta: &CommutationGraph, text: &str) -> Result<Word, WordError> {
    let mut letters = Vec::new();
    for token in text.split_whitespace() {
        let (label, positive) = match token.strip_suffix("^-1") {
            Some(base) => (base, false),
            None => {
                if token.contains('^') {
                    return Err(WordError::MalformedToken(token.to_string()));
                }
                (token, true)
            }
        };
        let gen = delta
            .generator_by_label(label)
            .ok_or_else(|| WordError::UnknownLabel(label.to_string()))?;
        letters.push(Letter { gen, positive });
    }
    Word::new(delta, letters)
}

/// Renders a word in the word syntax; the identity renders as `1`.
pub fn format_word(delta: &CommutationGraph, w: &Word) -> String {
    if w.is_empty() {
        return "1".to_string();
    }
    let mut out = String::new();
    for (i, l) in w.letters.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{}", delta.label(l.gen));
        if !l.positive {
            out.push_str("^-1");
        }
    }
    out
}

/// Canonical normal form of a word: the unique lexicographically least
/// linearization of its reduced trace.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NormalForm {
    pub word: Word,
}

impl NormalForm {
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.word.support()
    }
}

/// Deletes one cancelable pair if any exists: letters `x .. x^-1` whose
/// intervening letters all commute with `x`. Repeats to a fixpoint.
fn reduce_letters(delta: &CommutationGraph, letters: &mut Vec<Letter>) {
    'outer: loop {
        for i in 0..letters.len() {
            'next_j: for j in i + 1..letters.len() {
                if letters[j].gen == letters[i].gen {
                    if letters[j].positive != letters[i].positive {
                        // All letters strictly between must commute with gen.
                        for k in i + 1..j {
                            if !delta.adjacent(letters[k].gen, letters[i].gen) {
                                continue 'next_j;
                            }
                        }
                        letters.remove(j);
                        letters.remove(i);
                        continue 'outer;
                    }
                    // Same generator, same sign blocks any later partner.
                    break 'next_j;
                }
                if !delta.adjacent(letters[j].gen, letters[i].gen) {
                    break 'next_j;
                }
            }
        }
        return;
    }
}

/// Lexicographically least linearization of the trace of `letters`
/// (assumed reduced): repeatedly emit the least letter among those with no
/// earlier dependent letter.
fn lex_least_linearization(delta: &CommutationGraph, letters: &[Letter]) -> Vec<Letter> {
    let mut remaining: Vec<Letter> = letters.to_vec();
    let mut out = Vec::with_capacity(letters.len());
    while !remaining.is_empty() {
        let mut best: Option<usize> = None;
        for (idx, l) in remaining.iter().enumerate() {
            let minimal = remaining[..idx]
                .iter()
                .all(|p| p.gen != l.gen && delta.adjacent(p.gen, l.gen));
            if minimal {
                match best {
                    None => best = Some(idx),
                    Some(b) => {
                        if remaining[idx] < remaining[b] {
                            best = Some(idx);
                        }
                    }
                }
            }
        }
        let idx = best.expect("a minimal letter always exists");
        out.push(remaining.remove(idx));
    }
    out
}

/// Canonical normal form: reduce, then take the lexicographically least
/// linearization. Identical output for all words equal in the group.
pub fn normal_form(delta: &CommutationGraph, w: &Word) -> Result<NormalForm, WordError> {
    w.check(delta)?;
    let mut letters = w.letters.clone();
    reduce_letters(delta, &mut letters);
    let letters = lex_least_linearization(delta, &letters);
    Ok(NormalForm {
        word: Word {
            graph_fingerprint: w.graph_fingerprint,
            letters,
        },
    })
}

pub fn is_trivial(delta: &CommutationGraph, w: &Word) -> Result<bool, WordError> {
    Ok(normal_form(delta, w)?.is_empty())
}

pub fn is_equal(delta: &CommutationGraph, u: &Word, w: &Word) -> Result<bool, WordError> {
    Ok(normal_form(delta, u)? == normal_form(delta, w)?)
}

/// Cyclic reduction: returns `(core, conjugator)` with
/// `w = conjugator * core * conjugator^-1` and `core` cyclically reduced
/// (no one-letter conjugation shortens it).
pub fn cyclically_reduce(delta: &CommutationGraph, w: &Word) -> Result<(Word, Word), WordError> {
    w.check(delta)?;
    let mut core = normal_form(delta, w)?.word;
    let mut conjugator = Word {
        graph_fingerprint: w.graph_fingerprint,
        letters: Vec::new(),
    };
    'shrink: loop {
        if core.is_empty() {
            break;
        }
        let mut seen = BTreeSet::new();
        let letters: Vec<Letter> = core.letters.clone();
        for l in letters {
            // Try conjugating by each distinct letter of the core, in both
            // directions; a shrink restarts the scan.
            if !seen.insert(l) {
                continue;
            }
            for candidate in [l, l.inverse()] {
                let conj = Word {
                    graph_fingerprint: core.graph_fingerprint,
                    letters: vec![candidate],
                };
                let trial = conj.inverse().concat(&core).concat(&conj);
                let trial_nf = normal_form(delta, &trial)?.word;
                if trial_nf.len() + 2 <= core.len() {
                    conjugator = conjugator.concat(&conj);
                    core = trial_nf;
                    continue 'shrink;
                }
            }
        }
        break;
    }
    let conjugator = normal_form(delta, &conjugator)?.word;
    Ok((core, conjugator))
}

/// True when no one-letter conjugation shortens the normal form of `w`.
pub fn is_cyclically_reduced(delta: &CommutationGraph, w: &Word) -> Result<bool, WordError> {
    let nf = normal_form(delta, w)?.word;
    let mut seen = BTreeSet::new();
    for &l in nf.letters.iter() {
        for candidate in [l, l.inverse()] {
            if !seen.insert(candidate) {
                continue;
            }
            let conj = Word {
                graph_fingerprint: nf.graph_fingerprint,
                letters: vec![candidate],
            };
            let trial = conj.inverse().concat(&nf).concat(&conj);
            if normal_form(delta, &trial)?.len() < nf.len() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// All cyclic representatives of a cyclically reduced core: the closure of
/// its normal form under "rotate one minimal letter to the end", each
/// canonicalized. The closure is at most the core length in size.
fn cyclic_class(delta: &CommutationGraph, core: &Word) -> BTreeSet<Vec<Letter>> {
    let mut seen: BTreeSet<Vec<Letter>> = BTreeSet::new();
    let start = lex_least_linearization(delta, &core.letters);
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(current) = queue.pop_front() {
        for idx in 0..current.len() {
            let l = current[idx];
            let minimal = current[..idx]
                .iter()
                .all(|p| p.gen != l.gen && delta.adjacent(p.gen, l.gen));
            if !minimal {
                continue;
            }
            let mut rotated: Vec<Letter> = Vec::with_capacity(current.len());
            rotated.extend_from_slice(&current[..idx]);
            rotated.extend_from_slice(&current[idx + 1..]);
            rotated.push(l);
            let canon = lex_least_linearization(delta, &rotated);
            debug_assert_eq!(canon.len(), current.len());
            if seen.insert(canon.clone()) {
                queue.push_back(canon);
            }
        }
    }
    seen
}

/// Canonical representative of the conjugacy class of `w`: the least
/// normal form over the cyclic class of its cyclically reduced core.
pub fn cyclic_normal_form(delta: &CommutationGraph, w: &Word) -> Result<Word, WordError> {
    let (core, _) = cyclically_reduce(delta, w)?;
    if core.is_empty() {
        return Ok(core);
    }
    let class = cyclic_class(delta, &core);
    let least = class.into_iter().next().expect("class is nonempty");
    Ok(Word {
        graph_fingerprint: core.graph_fingerprint,
        letters: least,
    })
}

/// Exact conjugacy decision via canonical cyclic normal forms.
pub fn is_conjugate(delta: &CommutationGraph, u: &Word, w: &Word) -> Result<bool, WordError> {
    u.check(delta)?;
    w.check(delta)?;
    let cu = cyclic_normal_form(delta, u)?;
    let cw = cyclic_normal_form(delta, w)?;
    Ok(cu == cw)
}

/// Primitive root: `w = root^exponent` with the exponent maximal.
///
/// Computed on the cyclically reduced core by testing exponents that divide
/// every signed-letter count, in decreasing order; candidate roots are
/// reconstructed from the projections of the core onto dependent letter
/// pairs, then verified by an exact equality check.
pub fn primitive_root(delta: &CommutationGraph, w: &Word) -> Result<(Word, usize), WordError> {
    w.check(delta)?;
    let (core, conjugator) = cyclically_reduce(delta, w)?;
    if core.is_empty() {
        return Err(WordError::TrivialWord);
    }
    let counts = letter_counts(&core.letters);
    let mut gcd = 0usize;
    for &(_, c) in &counts {
        gcd = num_integer::gcd(gcd, c);
    }
    let mut exponents: Vec<usize> = (2..=gcd).filter(|k| gcd.is_multiple_of(*k)).collect();
    exponents.sort_unstable_by(|a, b| b.cmp(a));
    for k in exponents {
        if core.len() % k != 0 {
            continue;
        }
        if let Some(root_letters) = trace_root(delta, &core.letters, k) {
            let root_core = Word {
                graph_fingerprint: core.graph_fingerprint,
                letters: root_letters,
            };
            if is_equal(delta, &root_core.pow(k), &core)? {
                let root = conjugator.concat(&root_core).concat(&conjugator.inverse());
                let root = normal_form(delta, &root)?.word;
                return Ok((root, k));
            }
        }
    }
    Ok((normal_form(delta, w)?.word, 1))
}

fn letter_counts(letters: &[Letter]) -> Vec<(Letter, usize)> {
    let mut counts: Vec<(Letter, usize)> = Vec::new();
    for &l in letters {
        match counts.iter_mut().find(|(x, _)| *x == l) {
            Some((_, c)) => *c += 1,
            None => counts.push((l, 1)),
        }
    }
    counts
}

/// Attempts to reconstruct a k-th root of a cyclically reduced trace from
/// its projections onto dependent letter pairs (two signed letters are
/// dependent when they share a generator or their generators do not
/// commute). The root of a trace, if it exists, is unique, and greedy
/// least-first assembly against the projection queues recovers it.
fn trace_root(delta: &CommutationGraph, letters: &[Letter], k: usize) -> Option<Vec<Letter>> {
    let counts = letter_counts(letters);
    if counts.iter().any(|&(_, c)| c % k != 0) {
        return None;
    }
    let distinct: Vec<Letter> = counts.iter().map(|&(l, _)| l).collect();
    let dependent = |a: Letter, b: Letter| a.gen == b.gen || !delta.adjacent(a.gen, b.gen);
    // Projection constraint queues for the root, one per dependent pair.
    let mut queues: Vec<(Letter, Letter, VecDeque<Letter>)> = Vec::new();
    for i in 0..distinct.len() {
        for j in i + 1..distinct.len() {
            let (x, y) = (distinct[i], distinct[j]);
            if !dependent(x, y) {
                continue;
            }
            let proj: Vec<Letter> = letters
                .iter()
                .copied()
                .filter(|&l| l == x || l == y)
                .collect();
            if !proj.len().is_multiple_of(k) {
                return None;
            }
            let block = proj.len() / k;
            for rep in 1..k {
                if proj[rep * block..(rep + 1) * block] != proj[..block] {
                    return None;
                }
            }
            queues.push((x, y, proj[..block].iter().copied().collect()));
        }
    }
    let mut remaining: Vec<(Letter, usize)> = counts.iter().map(|&(l, c)| (l, c / k)).collect();
    let total: usize = remaining.iter().map(|&(_, c)| c).sum();
    let mut root = Vec::with_capacity(total);
    for _ in 0..total {
        let mut pick: Option<Letter> = None;
        for &(l, c) in &remaining {
            if c == 0 {
                continue;
            }
            let available = queues
                .iter()
                .filter(|(x, y, _)| *x == l || *y == l)
                .all(|(_, _, q)| q.front() == Some(&l));
            if available && pick.is_none_or(|p| l < p) {
                pick = Some(l);
            }
        }
        let l = pick?;
        root.push(l);
        for (x, y, q) in queues.iter_mut() {
            if *x == l || *y == l {
                q.pop_front();
            }
        }
        let slot = remaining
            .iter_mut()
            .find(|(x, _)| *x == l)
            .expect("present");
        slot.1 -= 1;
    }
    Some(root)
}

/// Deletes the letters outside `keep` and reduces. This is the retraction
/// onto the subgroup generated by `keep` (any generator subset spans a full
/// subgraph, so the retraction always exists).
pub fn retract_to(
    delta: &CommutationGraph,
    w: &Word,
    keep: &BTreeSet<usize>,
) -> Result<Word, WordError> {
    w.check(delta)?;
    let letters: Vec<Letter> = w
        .letters
        .iter()
        .copied()
        .filter(|l| keep.contains(&l.gen))
        .collect();
    let filtered = Word {
        graph_fingerprint: w.graph_fingerprint,
        letters,
    };
    Ok(normal_form(delta, &filtered)?.word)
}

/// True iff the two generator sets are disjoint and every cross pair is
/// adjacent, i.e. the subgroups they generate commute elementwise and meet
/// trivially.
pub fn supports_commute(
    delta: &CommutationGraph,
    s1: &BTreeSet<usize>,
    s2: &BTreeSet<usize>,
) -> bool {
    if s1.intersection(s2).next().is_some() {
        return false;
    }
    s1.iter().all(|&x| s2.iter().all(|&y| delta.adjacent(x, y)))
}
