//! Stallings folding for subgroups of free groups, used as an independent
//! rank oracle: the words label petals of a rose, folding identifies edges
//! with equal labels leaving a common vertex, and the folded core graph has
//! first Betti number equal to the rank of the subgroup the words generate.
//! When that rank equals the number of words, the words are a free basis.

use crate::raag::{Letter, Word};

/// A folded labelled graph. Edges are directed by the positive letter.
#[derive(Debug, Clone)]
pub struct FoldedGraph {
    pub vertices: usize,
    /// `(from, to, generator)` triples, deduplicated.
    pub edges: Vec<(usize, usize, usize)>,
    pub basepoint: usize,
}

impl FoldedGraph {
    /// First Betti number E - V + 1 of the (connected) folded graph.
    pub fn rank(&self) -> usize {
        self.edges.len() + 1 - self.vertices
    }
}

/// Folds the rose on the given words, read as paths of directed labelled
/// edges from a common basepoint.
pub fn fold_words(words: &[&Word]) -> FoldedGraph {
    let mut parent: Vec<usize> = vec![0];
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    let new_vertex = |parent: &mut Vec<usize>| {
        parent.push(parent.len());
        parent.len() - 1
    };
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
    for word in words {
        let mut at = 0usize;
        for (i, letter) in word.letters().iter().enumerate() {
            let last = i + 1 == word.len();
            let next = if last { 0 } else { new_vertex(&mut parent) };
            let Letter { gen, positive } = *letter;
            if positive {
                edges.push((at, next, gen));
            } else {
                edges.push((next, at, gen));
            }
            at = next;
        }
    }
    // Fold to a fixpoint: two edges with the same label leaving (or
    // entering) a common vertex force their far endpoints together.
    loop {
        let mut merged = false;
        'scan: for i in 0..edges.len() {
            for j in i + 1..edges.len() {
                let (f1, t1, g1) = edges[i];
                let (f2, t2, g2) = edges[j];
                if g1 != g2 {
                    continue;
                }
                let (f1, t1) = (find(&mut parent, f1), find(&mut parent, t1));
                let (f2, t2) = (find(&mut parent, f2), find(&mut parent, t2));
                if f1 == f2 && t1 != t2 {
                    parent[t1.max(t2)] = t1.min(t2);
                    merged = true;
                    break 'scan;
                }
                if t1 == t2 && f1 != f2 {
                    parent[f1.max(f2)] = f1.min(f2);
                    merged = true;
                    break 'scan;
                }
            }
        }
        if !merged {
            break;
        }
    }
    // Canonicalize: collapse to roots, dedupe parallel equal edges.
    let mut roots: Vec<usize> = (0..parent.len()).map(|v| find(&mut parent, v)).collect();
    let mut index_of = vec![usize::MAX; parent.len()];
    let mut count = 0;
    for &r in &roots {
        if index_of[r] == usize::MAX {
            index_of[r] = count;
            count += 1;
        }
    }
    for r in roots.iter_mut() {
        *r = index_of[*r];
    }
    let mut final_edges: Vec<(usize, usize, usize)> = edges
        .iter()
        .map(|&(f, t, g)| (roots[f], roots[t], g))
        .collect();
    final_edges.sort_unstable();
    final_edges.dedup();
    FoldedGraph {
        vertices: count,
        edges: final_edges,
        basepoint: roots[0],
    }
}
