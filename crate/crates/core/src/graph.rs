//! Finite simplicial graphs: parsing, degree profiles, distances, and the
//! subdivision machinery needed before a configuration complex is built.
//!
//! Graphs are immutable after construction and every operation here is a pure
//! function, so shared read access from multiple threads is safe.

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

/// Structural or parse error for graph input.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: malformed line: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: self-loop at vertex {v}")]
    SelfLoop { line: usize, v: usize },
    #[error("line {line}: duplicate edge {u} {v}")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("line {line}: index {index} out of range (limit {limit})")]
    IndexOutOfRange {
        line: usize,
        index: usize,
        limit: usize,
    },
    #[error("line {line}: duplicate label `{label}`")]
    DuplicateLabel { line: usize, label: String },
    #[error("invalid label `{label}`: {msg}")]
    InvalidLabel { label: String, msg: String },
    #[error("vertices {u} and {v} lie in different components")]
    Disconnected { u: usize, v: usize },
    #[error("star graph needs k >= 3, got {0}")]
    StarTooSmall(usize),
    #[error("graph has no edges and fewer than {n} vertices; cannot subdivide to fit {n} tokens")]
    CannotSubdivide { n: usize },
}

fn check_label(label: &str) -> Result<(), GraphError> {
    let bad = |msg: &str| GraphError::InvalidLabel {
        label: label.to_string(),
        msg: msg.to_string(),
    };
    if label.is_empty() {
        return Err(bad("empty"));
    }
    if label == "1" {
        return Err(bad("`1` is reserved for the identity word"));
    }
    if label
        .chars()
        .any(|c| c.is_whitespace() || matches!(c, '^' | '<' | '>' | ';' | ',' | '='))
    {
        return Err(bad("must not contain whitespace or `^<>;,=`"));
    }
    Ok(())
}

/// A finite simplicial graph: no self-loops, no duplicate edges.
///
/// Edges are stored with endpoints `u < v` and carry a fixed orientation;
/// the default (and the only one the constructors produce) is
/// tail = smaller index, head = larger index. Labels are used by the word
/// syntax downstream, so edge labels are required to be unique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    vertex_labels: Vec<String>,
    edge_labels: Vec<String>,
    /// Per-edge `(tail, head)`; the unordered pair equals the edge.
    orientations: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph from an edge list, labelling vertices `v{i}` and edges
    /// `e{i}` unless overridden later.
    pub fn new(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Graph {
            vertex_count,
            edges: Vec::new(),
            vertex_labels: (0..vertex_count).map(|i| format!("v{i}")).collect(),
            edge_labels: Vec::new(),
            orientations: Vec::new(),
        };
        for &(u, v) in edges {
            g.push_edge(u, v, 0)?;
        }
        for i in 0..g.edges.len() {
            g.edge_labels.push(format!("e{i}"));
        }
        Ok(g)
    }

    fn push_edge(&mut self, u: usize, v: usize, line: usize) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop { line, v: u });
        }
        let (u, v) = (u.min(v), u.max(v));
        if v >= self.vertex_count {
            return Err(GraphError::IndexOutOfRange {
                line,
                index: v,
                limit: self.vertex_count,
            });
        }
        if self.edges.contains(&(u, v)) {
            return Err(GraphError::DuplicateEdge { line, u, v });
        }
        self.edges.push((u, v));
        self.orientations.push((u, v));
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> (usize, usize) {
        self.edges[idx]
    }

    /// `(tail, head)` of the oriented edge.
    pub fn orientation(&self, idx: usize) -> (usize, usize) {
        self.orientations[idx]
    }

    pub fn edge_label(&self, idx: usize) -> &str {
        &self.edge_labels[idx]
    }

    pub fn vertex_label(&self, v: usize) -> &str {
        &self.vertex_labels[v]
    }

    /// Index of the edge with the given label, if any.
    pub fn edge_by_label(&self, label: &str) -> Option<usize> {
        self.edge_labels.iter().position(|l| l == label)
    }

    /// Unordered edge between `u` and `v`, if present.
    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges.iter().position(|&e| e == key)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    /// Edge indices incident to `v`, ascending.
    pub fn incident_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&i| self.edges[i].0 == v || self.edges[i].1 == v)
            .collect()
    }

    /// Neighbors of `v`, ascending by the incident edge index.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.incident_edges(v)
            .into_iter()
            .map(|i| {
                let (a, b) = self.edges[i];
                if a == v {
                    b
                } else {
                    a
                }
            })
            .collect()
    }

    /// Stable fingerprint of the structure and labels (FNV-1a over a canonical
    /// serialization). Used to detect words applied to the wrong graph.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        };
        eat(&self.vertex_count.to_le_bytes());
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            eat(&u.to_le_bytes());
            eat(&v.to_le_bytes());
            eat(self.edge_labels[i].as_bytes());
            eat(&self.orientations[i].0.to_le_bytes());
        }
        h
    }

    /// BFS distances from `from`; `usize::MAX` marks unreachable vertices.
    pub fn bfs_distances(&self, from: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count];
        let mut queue = VecDeque::new();
        dist[from] = 0;
        queue.push_back(from);
        while let Some(v) = queue.pop_front() {
            for w in self.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Serializes in the graph text format; parseable back by [`parse_graph`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n_vertices {}", self.vertex_count);
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "edge {u} {v}");
        }
        for (v, label) in self.vertex_labels.iter().enumerate() {
            let _ = writeln!(out, "vlabel {v} {label}");
        }
        for (i, label) in self.edge_labels.iter().enumerate() {
            let _ = writeln!(out, "elabel {i} {label}");
        }
        out
    }
}

/// Parses the graph text format.
///
/// UTF-8 lines; `#` starts a comment; first significant line
/// `n_vertices <int>`; then zero or more `edge <u> <v>` with `u < v`
/// (0-based); optional `vlabel <v> <name>` and `elabel <idx> <name>`.
/// Line order of edges fixes edge indices.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut graph: Option<Graph> = None;
    let mut seen_vlabel = vec![];
    let mut seen_elabel = vec![];
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let malformed = |msg: &str| GraphError::Malformed {
            line,
            msg: msg.to_string(),
        };
        let parse_idx = |tok: &str, what: &str| -> Result<usize, GraphError> {
            tok.parse::<usize>()
                .map_err(|_| malformed(&format!("expected {what}, got `{tok}`")))
        };
        match tokens[0] {
            "n_vertices" => {
                if graph.is_some() {
                    return Err(malformed("repeated n_vertices"));
                }
                if tokens.len() != 2 {
                    return Err(malformed("expected `n_vertices <int>`"));
                }
                let n = parse_idx(tokens[1], "a vertex count")?;
                graph = Some(Graph::new(n, &[])?);
            }
            "edge" => {
                let g = graph
                    .as_mut()
                    .ok_or_else(|| malformed("edge before n_vertices"))?;
                if tokens.len() != 3 {
                    return Err(malformed("expected `edge <u> <v>`"));
                }
                let u = parse_idx(tokens[1], "a vertex index")?;
                let v = parse_idx(tokens[2], "a vertex index")?;
                if u > v {
                    return Err(malformed("edge endpoints must satisfy u < v"));
                }
                g.push_edge(u, v, line)?;
                g.edge_labels.push(format!("e{}", g.edges.len() - 1));
            }
            "vlabel" => {
                let g = graph
                    .as_mut()
                    .ok_or_else(|| malformed("vlabel before n_vertices"))?;
                if tokens.len() != 3 {
                    return Err(malformed("expected `vlabel <v> <name>`"));
                }
                let v = parse_idx(tokens[1], "a vertex index")?;
                if v >= g.vertex_count {
                    return Err(GraphError::IndexOutOfRange {
                        line,
                        index: v,
                        limit: g.vertex_count,
                    });
                }
                if seen_vlabel.contains(&v) {
                    return Err(GraphError::DuplicateLabel {
                        line,
                        label: tokens[2].to_string(),
                    });
                }
                check_label(tokens[2])?;
                seen_vlabel.push(v);
                g.vertex_labels[v] = tokens[2].to_string();
            }
            "elabel" => {
                let g = graph
                    .as_mut()
                    .ok_or_else(|| malformed("elabel before n_vertices"))?;
                if tokens.len() != 3 {
                    return Err(malformed("expected `elabel <idx> <name>`"));
                }
                let idx = parse_idx(tokens[1], "an edge index")?;
                if idx >= g.edges.len() {
                    return Err(GraphError::IndexOutOfRange {
                        line,
                        index: idx,
                        limit: g.edges.len(),
                    });
                }
                if seen_elabel.contains(&idx) || g.edge_labels.iter().any(|l| l == tokens[2]) {
                    return Err(GraphError::DuplicateLabel {
                        line,
                        label: tokens[2].to_string(),
                    });
                }
                check_label(tokens[2])?;
                seen_elabel.push(idx);
                g.edge_labels[idx] = tokens[2].to_string();
            }
            other => {
                return Err(malformed(&format!("unknown directive `{other}`")));
            }
        }
    }
    graph.ok_or(GraphError::Malformed {
        line: 0,
        msg: "missing n_vertices".to_string(),
    })
}

/// Star with `k >= 3` leaves: vertex 0 is the center, leaves are `1..=k`.
///
/// The tripod (`k = 3`) is labelled `a, b, c`; larger stars `a1..ak`.
pub fn star_graph(k: usize) -> Result<Graph, GraphError> {
    if k < 3 {
        return Err(GraphError::StarTooSmall(k));
    }
    let edges: Vec<(usize, usize)> = (1..=k).map(|i| (0, i)).collect();
    let mut g = Graph::new(k + 1, &edges)?;
    g.vertex_labels[0] = "center".to_string();
    for i in 1..=k {
        g.vertex_labels[i] = format!("l{i}");
    }
    if k == 3 {
        for (i, name) in ["a", "b", "c"].iter().enumerate() {
            g.edge_labels[i] = name.to_string();
        }
    } else {
        for i in 0..k {
            g.edge_labels[i] = format!("a{}", i + 1);
        }
    }
    Ok(g)
}

/// The once-subdivided tripod: center 0, midpoints 1..=3, leaves 4..=6.
///
/// Outer edges (mid -> leaf) are labelled `a, b, c` and inner edges
/// (center -> mid) `d, e, f`, arm by arm, with every edge oriented away
/// from the center.
pub fn tripod_subdivided() -> Graph {
    let mut g = Graph::new(7, &[(1, 4), (2, 5), (3, 6), (0, 1), (0, 2), (0, 3)])
        .expect("static construction");
    for (i, name) in ["a", "b", "c", "d", "e", "f"].iter().enumerate() {
        g.edge_labels[i] = name.to_string();
    }
    g.vertex_labels = ["center", "m1", "m2", "m3", "l1", "l2", "l3"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    g
}

/// Two tripods whose third leaves are joined by an edge: essential vertices
/// 0 and 5, both of degree 3.
pub fn two_tripods() -> Graph {
    let mut g = Graph::new(8, &[(0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (5, 6), (5, 7)])
        .expect("static construction");
    for (i, name) in ["p1", "q1", "r1", "m", "r2", "p2", "q2"].iter().enumerate() {
        g.edge_labels[i] = name.to_string();
    }
    g
}

/// Cycle on `k >= 3` vertices.
pub fn cycle_graph(k: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (0..k)
        .map(|i| (i.min((i + 1) % k), i.max((i + 1) % k)))
        .collect();
    Graph::new(k, &edges).expect("static construction")
}

/// Path on `k >= 1` vertices (`k - 1` edges).
pub fn path_graph(k: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (0..k.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    Graph::new(k, &edges).expect("static construction")
}

/// Degree data of a graph: essential vertices are those of degree >= 3,
/// `m` counts them and `m3` counts those of degree exactly 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeProfile {
    pub degrees: Vec<usize>,
    pub essential_vertices: Vec<usize>,
    pub m: usize,
    pub m3: usize,
}

pub fn degree_profile(g: &Graph) -> DegreeProfile {
    let degrees: Vec<usize> = (0..g.vertex_count()).map(|v| g.degree(v)).collect();
    let essential_vertices: Vec<usize> =
        (0..g.vertex_count()).filter(|&v| degrees[v] >= 3).collect();
    let m = essential_vertices.len();
    let m3 = essential_vertices
        .iter()
        .filter(|&&v| degrees[v] == 3)
        .count();
    DegreeProfile {
        degrees,
        essential_vertices,
        m,
        m3,
    }
}

/// Length of a shortest edge path between `u` and `v`.
pub fn edge_distance(g: &Graph, u: usize, v: usize) -> Result<usize, GraphError> {
    let d = g.bfs_distances(u)[v];
    if d == usize::MAX {
        Err(GraphError::Disconnected { u, v })
    } else {
        Ok(d)
    }
}

/// A reason the subdivision predicate fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubdivisionViolation {
    /// Fewer vertices than tokens.
    TooFewVertices { have: usize, need: usize },
    /// Two valency-!=2 vertices closer than `n - 1` edges.
    ClosePair {
        u: usize,
        v: usize,
        distance: usize,
        need: usize,
    },
    /// A cycle through an essential vertex shorter than `n + 1` edges.
    ShortCycle {
        vertex: usize,
        length: usize,
        need: usize,
    },
}

/// Checks the subdivision criterion for `n` tokens: at least `n` vertices,
/// all distinct valency-!=2 vertices at edge distance >= n-1, and every
/// cycle through an essential vertex of length >= n+1.
pub fn is_sufficiently_subdivided(g: &Graph, n: usize) -> (bool, Vec<SubdivisionViolation>) {
    assert!(n >= 1, "token count must be >= 1");
    let mut violations = Vec::new();
    if g.vertex_count() < n {
        violations.push(SubdivisionViolation::TooFewVertices {
            have: g.vertex_count(),
            need: n,
        });
    }
    let profile = degree_profile(g);
    let special: Vec<usize> = (0..g.vertex_count())
        .filter(|&v| profile.degrees[v] != 2)
        .collect();
    for (i, &u) in special.iter().enumerate() {
        let dist = g.bfs_distances(u);
        for &v in &special[i + 1..] {
            if dist[v] != usize::MAX && dist[v] + 1 < n {
                violations.push(SubdivisionViolation::ClosePair {
                    u,
                    v,
                    distance: dist[v],
                    need: n.saturating_sub(1),
                });
            }
        }
    }
    for &v in &profile.essential_vertices {
        if let Some((len, _)) = shortest_cycle_through(g, v) {
            if len < n + 1 {
                violations.push(SubdivisionViolation::ShortCycle {
                    vertex: v,
                    length: len,
                    need: n + 1,
                });
            }
        }
    }
    (violations.is_empty(), violations)
}

/// Shortest cycle through `v`, as `(length, edge indices of a path realizing
/// it)`. For each incident edge the edge is removed and the endpoints
/// reconnected by BFS; the minimum over incident edges is a shortest cycle.
fn shortest_cycle_through(g: &Graph, v: usize) -> Option<(usize, Vec<usize>)> {
    let mut best: Option<(usize, Vec<usize>)> = None;
    for e in g.incident_edges(v) {
        let (a, b) = g.edge(e);
        let u = if a == v { b } else { a };
        if let Some(path) = bfs_path_avoiding(g, u, v, e) {
            let len = path.len() + 1;
            let mut edges = path;
            edges.push(e);
            if best.as_ref().is_none_or(|(l, _)| len < *l) {
                best = Some((len, edges));
            }
        }
    }
    best
}

/// BFS path from `from` to `to` avoiding edge `skip`; returns edge indices.
fn bfs_path_avoiding(g: &Graph, from: usize, to: usize, skip: usize) -> Option<Vec<usize>> {
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; g.vertex_count()];
    let mut seen = vec![false; g.vertex_count()];
    let mut queue = VecDeque::new();
    seen[from] = true;
    queue.push_back(from);
    while let Some(x) = queue.pop_front() {
        if x == to {
            let mut edges = Vec::new();
            let mut cur = to;
            while let Some((p, e)) = prev[cur] {
                edges.push(e);
                cur = p;
            }
            edges.reverse();
            return Some(edges);
        }
        for e in g.incident_edges(x) {
            if e == skip {
                continue;
            }
            let (a, b) = g.edge(e);
            let y = if a == x { b } else { a };
            if !seen[y] {
                seen[y] = true;
                prev[y] = Some((x, e));
                queue.push_back(y);
            }
        }
    }
    None
}

/// How each original edge was split; piece counts are per original edge
/// index. Applying the plan preserves the homeomorphism type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubdivisionPlan {
    pub per_edge_pieces: Vec<usize>,
    /// Token count the plan was computed for.
    pub target_n: usize,
}

/// Applies a piece count per edge. Original vertices keep their indices;
/// interior vertices are appended in edge order, then position order along
/// the edge (tail to head). Pieces of edge `L` are labelled `L.1 .. L.p`
/// (just `L` when unsplit) and oriented along the original edge.
pub fn apply_subdivision(g: &Graph, plan: &SubdivisionPlan) -> Graph {
    assert_eq!(plan.per_edge_pieces.len(), g.edge_count());
    let mut vertex_labels: Vec<String> = (0..g.vertex_count())
        .map(|v| g.vertex_label(v).to_string())
        .collect();
    let mut next_vertex = g.vertex_count();
    let mut edges = Vec::new();
    let mut edge_labels = Vec::new();
    let mut orientations = Vec::new();
    for (idx, &pieces) in plan.per_edge_pieces.iter().enumerate() {
        assert!(pieces >= 1, "piece counts are positive");
        let (tail, head) = g.orientation(idx);
        let label = g.edge_label(idx);
        let mut stops = vec![tail];
        for i in 1..pieces {
            vertex_labels.push(format!("{label}.v{i}"));
            stops.push(next_vertex);
            next_vertex += 1;
        }
        stops.push(head);
        for i in 0..pieces {
            let (s, t) = (stops[i], stops[i + 1]);
            edges.push((s.min(t), s.max(t)));
            // Canonical orientation, so the graph survives the text format
            // (which does not carry orientations).
            orientations.push((s.min(t), s.max(t)));
            if pieces == 1 {
                edge_labels.push(label.to_string());
            } else {
                edge_labels.push(format!("{label}.{}", i + 1));
            }
        }
    }
    Graph {
        vertex_count: next_vertex,
        edges,
        vertex_labels,
        edge_labels,
        orientations,
    }
}

/// Subdivides `g` just enough that [`is_sufficiently_subdivided`] holds for
/// `n` tokens: iterative repair that bumps the factors of edges lying on
/// violating shortest paths or cycles, capped by the always-sufficient
/// uniform factor `n`.
pub fn subdivide_for(g: &Graph, n: usize) -> Result<(Graph, SubdivisionPlan), GraphError> {
    assert!(n >= 1, "token count must be >= 1");
    if g.edge_count() == 0 {
        if g.vertex_count() >= n {
            let plan = SubdivisionPlan {
                per_edge_pieces: vec![],
                target_n: n,
            };
            return Ok((g.clone(), plan));
        }
        return Err(GraphError::CannotSubdivide { n });
    }
    let mut factors = vec![1usize; g.edge_count()];
    loop {
        let plan = SubdivisionPlan {
            per_edge_pieces: factors.clone(),
            target_n: n,
        };
        let subdivided = apply_subdivision(g, &plan);
        let (ok, violations) = is_sufficiently_subdivided(&subdivided, n);
        if ok {
            return Ok((subdivided, plan));
        }
        // Map each violation back to original edges and bump their factors.
        let piece_owner = piece_owners(&factors);
        let mut bump = vec![false; g.edge_count()];
        for violation in &violations {
            match violation {
                SubdivisionViolation::TooFewVertices { .. } => {
                    for b in bump.iter_mut() {
                        *b = true;
                    }
                }
                SubdivisionViolation::ClosePair { u, v, .. } => {
                    if let Some(path) = bfs_path_between(&subdivided, *u, *v) {
                        for e in path {
                            bump[piece_owner[e]] = true;
                        }
                    }
                }
                SubdivisionViolation::ShortCycle { vertex, .. } => {
                    if let Some((_, edges)) = shortest_cycle_through(&subdivided, *vertex) {
                        for e in edges {
                            bump[piece_owner[e]] = true;
                        }
                    }
                }
            }
        }
        let mut changed = false;
        for (i, &b) in bump.iter().enumerate() {
            if b && factors[i] < n {
                factors[i] += 1;
                changed = true;
            }
        }
        if !changed {
            // All violating edges are already at the cap; the cap is
            // sufficient, so this is unreachable for simplicial input.
            for f in factors.iter_mut() {
                *f = n;
            }
            let plan = SubdivisionPlan {
                per_edge_pieces: factors.clone(),
                target_n: n,
            };
            let subdivided = apply_subdivision(g, &plan);
            let (ok, _) = is_sufficiently_subdivided(&subdivided, n);
            if ok {
                return Ok((subdivided, plan));
            }
            return Err(GraphError::CannotSubdivide { n });
        }
    }
}

/// For a factor vector, maps each subdivided edge index back to the index of
/// the original edge it is a piece of.
fn piece_owners(factors: &[usize]) -> Vec<usize> {
    let mut owners = Vec::new();
    for (orig, &pieces) in factors.iter().enumerate() {
        for _ in 0..pieces {
            owners.push(orig);
        }
    }
    owners
}

fn bfs_path_between(g: &Graph, from: usize, to: usize) -> Option<Vec<usize>> {
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; g.vertex_count()];
    let mut seen = vec![false; g.vertex_count()];
    let mut queue = VecDeque::new();
    seen[from] = true;
    queue.push_back(from);
    while let Some(x) = queue.pop_front() {
        if x == to {
            let mut edges = Vec::new();
            let mut cur = to;
            while let Some((p, e)) = prev[cur] {
                edges.push(e);
                cur = p;
            }
            edges.reverse();
            return Some(edges);
        }
        for e in g.incident_edges(x) {
            let (a, b) = g.edge(e);
            let y = if a == x { b } else { a };
            if !seen[y] {
                seen[y] = true;
                prev[y] = Some((x, e));
                queue.push_back(y);
            }
        }
    }
    None
}
