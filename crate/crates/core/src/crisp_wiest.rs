//! The cubical map from a configuration complex to the Salvetti complex of
//! its commutation graph, realized as an edge labelling: every 0-cell goes
//! to the unique vertex, and a token move along a graph edge goes to that
//! edge's generator, signed by the stored orientation.
//!
//! The Salvetti complex itself is never materialized; the commutation graph
//! plus the link conditions checked here carry the same information. The
//! literature denotes this map by either psi or phi; this module treats
//! those as one map. Once the local-isometry check passes, injectivity on
//! fundamental groups is quoted from the cited theory, not re-proved.

use std::collections::VecDeque;

use thiserror::Error;

use crate::complex::{Cell, CubeComplex};
use crate::raag::{normal_form, CommutationGraph, Letter, Word, WordError};

#[derive(Debug, Error)]
pub enum MapError {
    #[error("commutation graph was not built from the complex's source graph")]
    OriginMismatch,
    #[error("complex is disconnected ({components} components); loop generators need a connected complex")]
    Disconnected { components: usize },
    #[error("basepoint is not a 0-cell of the complex")]
    BadBasepoint,
    #[error("placement vertices collide or exceed the graph")]
    InvalidPlacement,
    #[error(transparent)]
    Word(#[from] WordError),
}

/// The labelling view of the map: source complex plus target commutation
/// graph. The generator of a 1-cell is its unique moving edge; on every
/// k-cell the k generators are pairwise adjacent because the moving edges
/// are pairwise disjoint (asserted during construction).
pub struct CubicalMap<'a> {
    complex: &'a CubeComplex,
    delta: &'a CommutationGraph,
}

/// A loop word with its witness path: `word` is the composition of the edge
/// labels along `path`, a closed edge path at `basepoint` in the 1-skeleton.
#[derive(Debug, Clone)]
pub struct LoopWord {
    pub basepoint: Cell,
    pub word: Word,
    /// 1-cells traversed, each with the direction of traversal
    /// (`true` = tail facet to head facet).
    pub path: Vec<(Cell, bool)>,
}

pub fn build_cw_map<'a>(
    complex: &'a CubeComplex,
    delta: &'a CommutationGraph,
) -> Result<CubicalMap<'a>, MapError> {
    if complex.graph().fingerprint() != delta.origin_fingerprint() {
        return Err(MapError::OriginMismatch);
    }
    let map = CubicalMap { complex, delta };
    // Pairwise adjacency of the labels on every cube.
    for dim in 2..=complex.dimension().max(0) as usize {
        for cell in complex.cells(dim) {
            let edges = cell.edge_list();
            for (i, &a) in edges.iter().enumerate() {
                for &b in &edges[i + 1..] {
                    debug_assert!(
                        delta.adjacent(a, b),
                        "cube labels must commute: edges {a}, {b}"
                    );
                }
            }
        }
    }
    Ok(map)
}

impl<'a> CubicalMap<'a> {
    pub fn complex(&self) -> &CubeComplex {
        self.complex
    }

    pub fn delta(&self) -> &CommutationGraph {
        self.delta
    }

    /// The signed generator of a traversal of `one_cell`; `forward` means
    /// tail facet to head facet.
    pub fn letter_for(&self, one_cell: &Cell, forward: bool) -> Letter {
        debug_assert_eq!(one_cell.dim(), 1);
        let gen = one_cell.edges.trailing_zeros() as usize;
        Letter {
            gen,
            positive: forward,
        }
    }

    /// The word of an edge path given as (1-cell, direction) steps.
    pub fn word_of_path(&self, path: &[(Cell, bool)]) -> Result<Word, WordError> {
        let letters: Vec<Letter> = path
            .iter()
            .map(|(cell, fwd)| self.letter_for(cell, *fwd))
            .collect();
        Word::new(self.delta, letters)
    }
}

/// A local-isometry failure witness.
#[derive(Debug, Clone)]
pub enum IsometryViolation {
    /// Two germs at a 0-cell carry the same signed generator.
    DuplicateGerm { vertex: Cell, edge: usize },
    /// Germs with pairwise-adjacent distinct generators whose spanned cube
    /// is not stored.
    MissingCube { vertex: Cell, edges: Vec<usize> },
    /// More cube-corner incidences stored than germ subsets exist; some
    /// stored cube has a missing corner 0-cell.
    StorageInconsistent { stored: u64, candidates: u64 },
}

/// Checks the local-isometry conditions at every 0-cell: injectivity (no
/// two germs share a signed generator) and fullness (every set of germs
/// carrying pairwise-adjacent distinct generators spans a stored cube).
///
/// Fullness is decided by counting: every stored k-cube meets a 0-cell in
/// a distinct pairwise-adjacent germ subset at each of its 2^k corners, so
/// the number of such subsets over all 0-cells is at least the number of
/// stored cube-corner incidences, with equality exactly when every subset's
/// cube is stored. On a mismatch a direct subset scan locates the first
/// missing cube.
pub fn check_local_isometry(map: &CubicalMap<'_>) -> (bool, Option<IsometryViolation>) {
    check_local_isometry_with_limit(map, DIRECT_SCAN_LIMIT)
}

/// The worker behind [`check_local_isometry`]; `direct_scan_limit` decides
/// when the counting criterion replaces the direct scan, so tests can force
/// either path and compare them.
fn check_local_isometry_with_limit(
    map: &CubicalMap<'_>,
    direct_scan_limit: usize,
) -> (bool, Option<IsometryViolation>) {
    let cx = map.complex;
    let delta = map.delta;
    for v in cx.cells(0) {
        let germs = cx.germs_at(v);
        for (i, a) in germs.iter().enumerate() {
            for b in &germs[i + 1..] {
                if a.edge == b.edge && a.outgoing_positive == b.outgoing_positive {
                    return (
                        false,
                        Some(IsometryViolation::DuplicateGerm {
                            vertex: *v,
                            edge: a.edge,
                        }),
                    );
                }
            }
        }
    }
    let total_cells: usize = cx.f_vector().iter().sum();
    if total_cells > direct_scan_limit {
        // Per-size counting criterion.
        let max_dim = cx.f_vector().len();
        let mut candidates = vec![0u64; max_dim + 1];
        for v in cx.cells(0) {
            let germs = cx.germs_at(v);
            let k = germs.len();
            debug_assert!(k <= 64);
            let mut adj = vec![0u64; k];
            for i in 0..k {
                for j in i + 1..k {
                    if germs[i].edge != germs[j].edge
                        && delta.adjacent(germs[i].edge, germs[j].edge)
                    {
                        adj[i] |= 1u64 << j;
                        adj[j] |= 1u64 << i;
                    }
                }
            }
            let all = if k >= 64 { !0u64 } else { (1u64 << k) - 1 };
            count_adjacent_subsets(&adj, all, 1, &mut candidates);
        }
        let mut stored = vec![0u64; max_dim + 1];
        for (k, &count) in cx.f_vector().iter().enumerate().skip(1) {
            stored[k] = (count as u64) << k;
        }
        if candidates == stored {
            return (true, None);
        }
    }
    // Exact per-subset scan: sound without any closure assumption, and the
    // witness is the first missing cube in canonical order.
    for v in cx.cells(0) {
        let germs = cx.germs_at(v);
        let mut subset: Vec<usize> = Vec::new();
        if let Some(edges) = fullness_dfs(cx, delta, v, &germs, 0, &mut subset) {
            return (
                false,
                Some(IsometryViolation::MissingCube { vertex: *v, edges }),
            );
        }
    }
    if total_cells > direct_scan_limit {
        // Counting failed but no subset is missing a cube: a stored cube
        // must reference a 0-cell that is not stored.
        let stored: u64 = cx
            .f_vector()
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| (c as u64) << k)
            .sum();
        return (
            false,
            Some(IsometryViolation::StorageInconsistent {
                stored,
                candidates: 0,
            }),
        );
    }
    (true, None)
}

/// Above this cell count the fullness check uses the subset-count
/// criterion, falling back to the direct scan only to find a witness.
const DIRECT_SCAN_LIMIT: usize = 200_000;

/// Counts nonempty pairwise-adjacent germ subsets by size. `allowed`
/// restricts candidates to indices above the last chosen germ that are
/// adjacent to everything chosen so far.
fn count_adjacent_subsets(adj: &[u64], allowed: u64, size: usize, counts: &mut [u64]) {
    let mut m = allowed;
    while m != 0 {
        let j = m.trailing_zeros() as usize;
        m &= m - 1;
        if size < counts.len() {
            counts[size] += 1;
        }
        let above = if j >= 63 { 0 } else { !0u64 << (j + 1) };
        count_adjacent_subsets(adj, allowed & adj[j] & above, size + 1, counts);
    }
}

fn fullness_dfs(
    cx: &CubeComplex,
    delta: &CommutationGraph,
    v: &Cell,
    germs: &[crate::complex::Germ],
    start: usize,
    subset: &mut Vec<usize>,
) -> Option<Vec<usize>> {
    for i in start..germs.len() {
        let compatible = subset.iter().all(|&j| {
            germs[j].edge != germs[i].edge && delta.adjacent(germs[j].edge, germs[i].edge)
        });
        if !compatible {
            continue;
        }
        subset.push(i);
        // Singletons included: the germ's own 1-cell must be stored too.
        let refs: Vec<_> = subset.iter().map(|&x| &germs[x]).collect();
        let cube = cx.spanned_cube(v, &refs);
        if !cx.contains(&cube) {
            let witness = subset.iter().map(|&x| germs[x].edge).collect();
            subset.pop();
            return Some(witness);
        }
        let deeper = fullness_dfs(cx, delta, v, germs, i + 1, subset);
        subset.pop();
        if deeper.is_some() {
            return deeper;
        }
    }
    None
}

/// The 0-cell whose parked vertices are exactly `placement`.
pub fn basepoint_for(cx: &CubeComplex, placement: &[usize]) -> Result<Cell, MapError> {
    let mut verts = 0u64;
    for &v in placement {
        if v >= cx.graph().vertex_count() || verts & (1u64 << v) != 0 {
            return Err(MapError::InvalidPlacement);
        }
        verts |= 1u64 << v;
    }
    let cell = Cell { edges: 0, verts };
    if cx.contains(&cell) {
        Ok(cell)
    } else {
        Err(MapError::BadBasepoint)
    }
}

/// Fundamental-group generators from a breadth-first spanning tree of the
/// 1-skeleton in canonical edge order: one loop word per non-tree 1-cell
/// (tree path out, the edge, tree path back). The count is E - V + 1.
pub fn pi1_generators(map: &CubicalMap<'_>, basepoint: &Cell) -> Result<Vec<LoopWord>, MapError> {
    pi1_generators_with_order(map, basepoint, false)
}

/// Same as [`pi1_generators`] but optionally scanning 1-cells in reversed
/// canonical order, which produces a different spanning tree; used by tests
/// of tree-independence.
pub fn pi1_generators_with_order(
    map: &CubicalMap<'_>,
    basepoint: &Cell,
    reverse_edge_order: bool,
) -> Result<Vec<LoopWord>, MapError> {
    let cx = map.complex;
    let components = cx.components();
    if components != 1 {
        return Err(MapError::Disconnected { components });
    }
    let base = cx.cell_index(basepoint).ok_or(MapError::BadBasepoint)?;
    let zero = cx.cells(0);
    let ones = cx.cells(1);
    // Incidence: for each 0-cell, the 1-cells at it (canonical order).
    let mut incidence: Vec<Vec<(usize, bool)>> = vec![Vec::new(); zero.len()];
    let mut endpoints: Vec<(usize, usize)> = Vec::with_capacity(ones.len());
    for (idx, cell) in ones.iter().enumerate() {
        let e = cell.edges.trailing_zeros() as usize;
        let (t, h) = cx.facets_along(cell, e);
        let ti = cx.cell_index(&t).expect("closure");
        let hi = cx.cell_index(&h).expect("closure");
        endpoints.push((ti, hi));
        incidence[ti].push((idx, true));
        incidence[hi].push((idx, false));
    }
    if reverse_edge_order {
        for inc in incidence.iter_mut() {
            inc.reverse();
        }
    }
    // BFS tree: parent step of each 0-cell.
    let mut parent: Vec<Option<(usize, bool)>> = vec![None; zero.len()];
    let mut seen = vec![false; zero.len()];
    let mut tree_edge = vec![false; ones.len()];
    let mut queue = VecDeque::new();
    seen[base] = true;
    queue.push_back(base);
    while let Some(v) = queue.pop_front() {
        for &(eidx, forward) in &incidence[v] {
            let (t, h) = endpoints[eidx];
            let w = if forward { h } else { t };
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some((eidx, forward));
                tree_edge[eidx] = true;
                queue.push_back(w);
            }
        }
    }
    // Path from the basepoint to `v` along the tree.
    let path_to = |v: usize| -> Vec<(usize, bool)> {
        let mut steps = Vec::new();
        let mut cur = v;
        while cur != base {
            let (eidx, forward) = parent[cur].expect("connected");
            steps.push((eidx, forward));
            let (t, h) = endpoints[eidx];
            cur = if forward { t } else { h };
        }
        steps.reverse();
        steps
    };
    let mut loops = Vec::new();
    for eidx in 0..ones.len() {
        if tree_edge[eidx] {
            continue;
        }
        let (t, h) = endpoints[eidx];
        let mut steps: Vec<(usize, bool)> = path_to(t);
        steps.push((eidx, true));
        let mut back = path_to(h);
        back.reverse();
        for step in back.iter_mut() {
            step.1 = !step.1;
        }
        steps.extend(back);
        let path: Vec<(Cell, bool)> = steps.into_iter().map(|(i, fwd)| (ones[i], fwd)).collect();
        let word = map.word_of_path(&path)?;
        let word = normal_form(map.delta, &word)?.word;
        loops.push(LoopWord {
            basepoint: *basepoint,
            word,
            path,
        });
    }
    Ok(loops)
}
