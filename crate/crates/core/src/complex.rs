//! The unordered combinatorial configuration space of `n` tokens on a graph,
//! built as an explicit cube complex.
//!
//! A k-cube is k pairwise-disjoint closed edges (the moving tokens) together
//! with n-k parked vertices avoiding them and each other. Cells are stored
//! as bitmasks, so builds are limited to graphs with at most 64 vertices and
//! 64 edges; the word-level pipeline has no such cap.
//!
//! The finished complex is immutable and all queries are pure functions.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{is_sufficiently_subdivided, Graph, SubdivisionViolation};

#[derive(Debug, Error)]
pub enum ComplexError {
    #[error("token count must be >= 1")]
    NoTokens,
    #[error("graph too large for the cell encoding: needs <= 64 vertices and <= 64 edges, got {vertices}/{edges}")]
    GraphTooLarge { vertices: usize, edges: usize },
    #[error("graph is not sufficiently subdivided for {n} tokens ({violations} violation(s)); build with the override to proceed")]
    InsufficientSubdivision { n: usize, violations: usize },
}

/// One cube: `edges` is the bitmask of moving edges (pairwise disjoint),
/// `verts` the bitmask of parked vertices (disjoint from the moving edges
/// and each other). The dimension is the number of moving edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cell {
    pub edges: u64,
    pub verts: u64,
}

impl Cell {
    pub fn dim(&self) -> usize {
        self.edges.count_ones() as usize
    }

    pub fn edge_list(&self) -> Vec<usize> {
        bits(self.edges)
    }

    pub fn vert_list(&self) -> Vec<usize> {
        bits(self.verts)
    }
}

fn bits(mut mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        let b = mask.trailing_zeros() as usize;
        out.push(b);
        mask &= mask - 1;
    }
    out
}

/// Lexicographic order on (ascending edge list, ascending vertex list);
/// cells are generated in exactly this order, dimension by dimension.
fn cell_cmp(a: &Cell, b: &Cell) -> std::cmp::Ordering {
    mask_lex_cmp(a.edges, b.edges).then_with(|| mask_lex_cmp(a.verts, b.verts))
}

/// Compares two bitmasks as ascending index lists in lexicographic order.
/// The lists share everything below the lowest differing bit `d`; whichever
/// mask owns `d` compares less exactly when the other still has elements
/// above `d` (otherwise the other is a proper prefix).
fn mask_lex_cmp(a: u64, b: u64) -> std::cmp::Ordering {
    if a == b {
        return std::cmp::Ordering::Equal;
    }
    let diff = a ^ b;
    let d = diff & diff.wrapping_neg();
    let above = !((d << 1).wrapping_sub(1)) & !d;
    if a & d != 0 {
        if b & above != 0 {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    } else if a & above != 0 {
        std::cmp::Ordering::Greater
    } else {
        std::cmp::Ordering::Less
    }
}

/// The graded cube complex of `n`-token configurations.
#[derive(Debug, Clone)]
pub struct CubeComplex {
    graph: Graph,
    n: usize,
    /// Cells per dimension, in canonical order.
    cells: Vec<Vec<Cell>>,
    /// Per-edge mask of vertices touched by the closed edge.
    edge_cover: Vec<u64>,
    /// Per-edge mask of edges sharing an endpoint (including itself).
    edge_conflicts: Vec<u64>,
    warnings: Vec<String>,
    built_with_override: bool,
}

/// Builds the complex, requiring the subdivision criterion.
pub fn build_config_complex(g: &Graph, n: usize) -> Result<CubeComplex, ComplexError> {
    let (ok, violations) = check_buildable(g, n)?;
    if !ok {
        return Err(ComplexError::InsufficientSubdivision {
            n,
            violations: violations.len(),
        });
    }
    Ok(build_inner(g, n, false))
}

/// Builds the complex without the subdivision precondition. The complex is
/// combinatorially well-defined for any graph; homotopy-equivalence claims
/// just do not apply.
pub fn build_config_complex_override(g: &Graph, n: usize) -> Result<CubeComplex, ComplexError> {
    check_size(g, n)?;
    Ok(build_inner(g, n, true))
}

fn check_size(g: &Graph, n: usize) -> Result<(), ComplexError> {
    if n < 1 {
        return Err(ComplexError::NoTokens);
    }
    if g.vertex_count() > 64 || g.edge_count() > 64 {
        return Err(ComplexError::GraphTooLarge {
            vertices: g.vertex_count(),
            edges: g.edge_count(),
        });
    }
    Ok(())
}

fn check_buildable(g: &Graph, n: usize) -> Result<(bool, Vec<SubdivisionViolation>), ComplexError> {
    check_size(g, n)?;
    let (ok, violations) = is_sufficiently_subdivided(g, n);
    Ok((ok, violations))
}

fn build_inner(g: &Graph, n: usize, built_with_override: bool) -> CubeComplex {
    let nv = g.vertex_count();
    let ne = g.edge_count();
    let edge_cover: Vec<u64> = (0..ne)
        .map(|i| {
            let (u, v) = g.edge(i);
            (1u64 << u) | (1u64 << v)
        })
        .collect();
    let edge_conflicts: Vec<u64> = (0..ne)
        .map(|i| {
            let mut mask = 0u64;
            for j in 0..ne {
                if edge_cover[i] & edge_cover[j] != 0 {
                    mask |= 1u64 << j;
                }
            }
            mask
        })
        .collect();
    let mut warnings = Vec::new();
    if n > nv {
        warnings.push(format!(
            "{n} tokens on {nv} vertices: no vertex cells, complex is empty"
        ));
    }
    let all_verts: u64 = if nv == 64 { !0 } else { (1u64 << nv) - 1 };
    let max_dim = n.min(ne);
    let mut cells: Vec<Vec<Cell>> = vec![Vec::new(); max_dim + 1];
    // Independent edge k-sets in lex order, then parked (n-k)-subsets of the
    // untouched vertices in lex order: the canonical enumeration.
    for (k, bucket) in cells.iter_mut().enumerate() {
        let parked = n - k;
        let mut chosen_edges: Vec<usize> = Vec::with_capacity(k);
        enumerate_edge_sets(
            ne,
            k,
            0,
            0,
            0,
            &edge_cover,
            &mut chosen_edges,
            &mut |edge_mask, covered| {
                let free = all_verts & !covered;
                if (free.count_ones() as usize) < parked {
                    return;
                }
                enumerate_vertex_sets(free, parked, &mut |vert_mask| {
                    bucket.push(Cell {
                        edges: edge_mask,
                        verts: vert_mask,
                    });
                });
            },
        );
    }
    // Buckets run to min(n, edge count), the a-priori dimension bound, so
    // the f-vector reports structurally empty top grades as zeros.
    CubeComplex {
        graph: g.clone(),
        n,
        cells,
        edge_cover,
        edge_conflicts,
        warnings,
        built_with_override,
    }
}

#[allow(clippy::too_many_arguments)]
fn enumerate_edge_sets(
    ne: usize,
    k: usize,
    start: usize,
    mask: u64,
    covered: u64,
    edge_cover: &[u64],
    chosen: &mut Vec<usize>,
    sink: &mut impl FnMut(u64, u64),
) {
    if chosen.len() == k {
        sink(mask, covered);
        return;
    }
    let need = k - chosen.len();
    if ne.saturating_sub(start) < need {
        return;
    }
    for e in start..ne {
        if covered & edge_cover[e] != 0 {
            continue;
        }
        chosen.push(e);
        enumerate_edge_sets(
            ne,
            k,
            e + 1,
            mask | (1u64 << e),
            covered | edge_cover[e],
            edge_cover,
            chosen,
            sink,
        );
        chosen.pop();
    }
}

/// Emits all `count`-subsets of the set bits of `free`, as masks, in
/// lexicographic order of the ascending index lists.
fn enumerate_vertex_sets(free: u64, count: usize, sink: &mut impl FnMut(u64)) {
    let positions = bits(free);
    if positions.len() < count {
        return;
    }
    let mut stack: Vec<usize> = Vec::with_capacity(count);
    fn rec(
        positions: &[usize],
        count: usize,
        start: usize,
        mask: u64,
        stack: &mut Vec<usize>,
        sink: &mut impl FnMut(u64),
    ) {
        if stack.len() == count {
            sink(mask);
            return;
        }
        let need = count - stack.len();
        for i in start..positions.len() {
            if positions.len() - i < need {
                break;
            }
            stack.push(i);
            rec(
                positions,
                count,
                i + 1,
                mask | (1u64 << positions[i]),
                stack,
                sink,
            );
            stack.pop();
        }
    }
    rec(&positions, count, 0, 0, &mut stack, sink);
}

impl CubeComplex {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn built_with_override(&self) -> bool {
        self.built_with_override
    }

    pub fn cells(&self, dim: usize) -> &[Cell] {
        self.cells.get(dim).map_or(&[], |v| v.as_slice())
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.cells.iter().map(|c| c.len()).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let count = c.len() as i64;
                if k % 2 == 0 {
                    count
                } else {
                    -count
                }
            })
            .sum()
    }

    /// Top nonempty grade; -1 for the empty complex.
    pub fn dimension(&self) -> i64 {
        for (k, bucket) in self.cells.iter().enumerate().rev() {
            if !bucket.is_empty() {
                return k as i64;
            }
        }
        -1
    }

    /// Index of a cell in its dimension's canonical list.
    pub fn cell_index(&self, cell: &Cell) -> Option<usize> {
        let bucket = self.cells.get(cell.dim())?;
        bucket.binary_search_by(|c| cell_cmp(c, cell)).ok()
    }

    pub fn contains(&self, cell: &Cell) -> bool {
        self.cell_index(cell).is_some()
    }

    /// The two facets obtained by parking the moving edge `e` of `cell` at
    /// its tail or head: `(tail facet, head facet)`.
    pub fn facets_along(&self, cell: &Cell, e: usize) -> (Cell, Cell) {
        debug_assert!(cell.edges & (1 << e) != 0);
        let (tail, head) = self.graph.orientation(e);
        let rest = cell.edges & !(1u64 << e);
        (
            Cell {
                edges: rest,
                verts: cell.verts | (1u64 << tail),
            },
            Cell {
                edges: rest,
                verts: cell.verts | (1u64 << head),
            },
        )
    }

    /// Number of connected components of the 1-skeleton.
    pub fn components(&self) -> usize {
        let zero = self.cells(0).len();
        if zero == 0 {
            return 0;
        }
        let mut parent: Vec<usize> = (0..zero).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut root = x;
            while parent[root] != root {
                root = parent[root];
            }
            let mut cur = x;
            while parent[cur] != root {
                let next = parent[cur];
                parent[cur] = root;
                cur = next;
            }
            root
        }
        for cell in self.cells(1) {
            let e = cell.edges.trailing_zeros() as usize;
            let (t, h) = self.facets_along(cell, e);
            let ti = self.cell_index(&t).expect("closure");
            let hi = self.cell_index(&h).expect("closure");
            let (rt, rh) = (find(&mut parent, ti), find(&mut parent, hi));
            if rt != rh {
                parent[rt] = rh;
            }
        }
        (0..zero).filter(|&i| find(&mut parent, i) == i).count()
    }

    /// Moves available at a 0-cell: for each token with an incident edge
    /// whose far endpoint is unoccupied, the 1-cell made by moving it.
    /// Returned in canonical order of the moving edge index.
    pub fn germs_at(&self, v: &Cell) -> Vec<Germ> {
        debug_assert_eq!(v.dim(), 0);
        let occupied = v.verts;
        let mut out = Vec::new();
        for e in 0..self.graph.edge_count() {
            let cover = self.edge_cover[e];
            let on_edge = occupied & cover;
            if on_edge.count_ones() != 1 {
                continue;
            }
            let token = on_edge.trailing_zeros() as usize;
            let one_cell = Cell {
                edges: 1u64 << e,
                verts: occupied & !(1u64 << token),
            };
            let (tail, _) = self.graph.orientation(e);
            out.push(Germ {
                edge: e,
                token,
                outgoing_positive: token == tail,
                one_cell,
            });
        }
        out
    }

    /// The cube spanned at `v` by a set of germs with pairwise-disjoint
    /// edges, whether or not it is stored.
    pub fn spanned_cube(&self, v: &Cell, germs: &[&Germ]) -> Cell {
        let mut edges = 0u64;
        let mut verts = v.verts;
        for g in germs {
            edges |= 1u64 << g.edge;
            verts &= !(1u64 << g.token);
        }
        Cell { edges, verts }
    }

    pub fn edges_disjoint(&self, e1: usize, e2: usize) -> bool {
        self.edge_conflicts[e1] & (1u64 << e2) == 0
    }

    /// The link of a 0-cell as an abstract simplicial complex: one vertex
    /// per germ, one (k-1)-simplex per stored k-cube cornered at `v`.
    pub fn vertex_link(&self, v: &Cell) -> VertexLink {
        assert_eq!(v.dim(), 0, "links are only defined at 0-cells");
        let germs = self.germs_at(v);
        let mut simplices: Vec<Vec<usize>> = Vec::new();
        // All germ subsets with pairwise-disjoint edges whose cube is
        // stored. A missing cube prunes all supersets: closure under faces
        // means a stored superset would force this cube to be stored too.
        let mut subset: Vec<usize> = Vec::new();
        fn rec(
            cx: &CubeComplex,
            v: &Cell,
            germs: &[Germ],
            start: usize,
            subset: &mut Vec<usize>,
            simplices: &mut Vec<Vec<usize>>,
        ) {
            for i in start..germs.len() {
                let ok = subset
                    .iter()
                    .all(|&j| cx.edges_disjoint(germs[j].edge, germs[i].edge));
                if !ok {
                    continue;
                }
                subset.push(i);
                let refs: Vec<&Germ> = subset.iter().map(|&x| &germs[x]).collect();
                let cube = cx.spanned_cube(v, &refs);
                if cx.contains(&cube) {
                    simplices.push(subset.clone());
                    rec(cx, v, germs, i + 1, subset, simplices);
                }
                subset.pop();
            }
        }
        rec(self, v, &germs, 0, &mut subset, &mut simplices);
        VertexLink { germs, simplices }
    }

    /// Canonical text dump, one `cell <dim> edges=<..> verts=<..>` line per
    /// cell in canonical order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (dim, bucket) in self.cells.iter().enumerate() {
            for cell in bucket {
                let edges = cell
                    .edge_list()
                    .iter()
                    .map(|e| e.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                let verts = cell
                    .vert_list()
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                let _ = writeln!(out, "cell {dim} edges={edges} verts={verts}");
            }
        }
        out
    }

    /// Removes one stored cell; used to manufacture defective complexes in
    /// tests of the checkers.
    #[cfg(test)]
    pub(crate) fn remove_cell(&mut self, cell: &Cell) -> bool {
        if let Some(i) = self.cell_index(cell) {
            self.cells[cell.dim()].remove(i);
            true
        } else {
            false
        }
    }
}

/// A move germ at a 0-cell: token `token` travels along `edge`;
/// `outgoing_positive` is true when the move goes tail to head.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Germ {
    pub edge: usize,
    pub token: usize,
    pub outgoing_positive: bool,
    /// The 1-cell realizing the move.
    pub one_cell: Cell,
}

/// Link of a 0-cell: vertices are germs, simplices are stored as sorted
/// germ-position lists (all faces included).
#[derive(Debug, Clone)]
pub struct VertexLink {
    pub germs: Vec<Germ>,
    pub simplices: Vec<Vec<usize>>,
}

impl VertexLink {
    pub fn vertex_count(&self) -> usize {
        self.germs.len()
    }

    pub fn simplices_of_dim(&self, d: usize) -> Vec<&Vec<usize>> {
        self.simplices.iter().filter(|s| s.len() == d + 1).collect()
    }

    pub fn has_simplex(&self, sorted: &[usize]) -> bool {
        self.simplices.iter().any(|s| s.as_slice() == sorted)
    }
}

/// A failing link witness: a clique of germs at a 0-cell whose spanning
/// cube is missing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagViolation {
    pub vertex: Cell,
    pub germ_edges: Vec<usize>,
}

/// Checks that every vertex link is flag: every clique of germs whose
/// pairwise squares exist spans a stored cube. Returns the first failure in
/// canonical order, if any.
pub fn npc_check(cx: &CubeComplex) -> (bool, Option<FlagViolation>) {
    for v in cx.cells(0) {
        let germs = cx.germs_at(v);
        let k = germs.len();
        // Adjacency = the square between the two germs is stored.
        let mut adj = vec![vec![false; k]; k];
        for i in 0..k {
            for j in i + 1..k {
                if !cx.edges_disjoint(germs[i].edge, germs[j].edge) {
                    continue;
                }
                let square = cx.spanned_cube(v, &[&germs[i], &germs[j]]);
                if cx.contains(&square) {
                    adj[i][j] = true;
                    adj[j][i] = true;
                }
            }
        }
        for clique in maximal_cliques(&adj) {
            if clique.len() < 3 {
                continue;
            }
            let refs: Vec<&Germ> = clique.iter().map(|&i| &germs[i]).collect();
            let cube = cx.spanned_cube(v, &refs);
            if !cx.contains(&cube) {
                return (
                    false,
                    Some(FlagViolation {
                        vertex: *v,
                        germ_edges: clique.iter().map(|&i| germs[i].edge).collect(),
                    }),
                );
            }
        }
    }
    (true, None)
}

/// Bron-Kerbosch with pivoting; cliques come out deterministically and each
/// is sorted ascending.
pub(crate) fn maximal_cliques(adj: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut out = Vec::new();
    let mut r = Vec::new();
    let p: Vec<usize> = (0..n).collect();
    let x = Vec::new();
    fn bk(
        adj: &[Vec<bool>],
        r: &mut Vec<usize>,
        p: Vec<usize>,
        x: Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if p.is_empty() && x.is_empty() {
            out.push(r.clone());
            return;
        }
        let pivot = p
            .iter()
            .chain(x.iter())
            .copied()
            .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count())
            .unwrap();
        let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
        let mut p = p;
        for v in candidates {
            let np: Vec<usize> = p.iter().copied().filter(|&u| adj[v][u]).collect();
            let nx: Vec<usize> = x.iter().copied().filter(|&u| adj[v][u]).collect();
            r.push(v);
            bk(adj, r, np, nx, out);
            r.pop();
            p.retain(|&u| u != v);
        }
    }
    bk(adj, &mut r, p, x, &mut out);
    for c in out.iter_mut() {
        c.sort_unstable();
    }
    out.sort();
    out
}
