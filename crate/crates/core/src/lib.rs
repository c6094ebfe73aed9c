//! Workbench for discretized configuration spaces of finite graphs.
//!
//! The pipeline: build the unordered combinatorial configuration space of
//! `n` tokens on a graph as an explicit cube complex, compute its exact
//! integral homology, embed its fundamental group (a graph braid group) in
//! a right-angled Artin group by labelling each token move with the edge
//! being traversed, and produce machine-checkable certificates that
//! selected cyclic subgroups have disjoint conjugates, which pins down the
//! group's topological complexity and action dimension above a token
//! threshold.
//!
//! Everything is exact: homology with unbounded integers, word decisions
//! by canonical trace normal forms, and certificates whose every rule node
//! and leaf is re-checkable from the serialized text.

pub mod certificate;
pub mod cli;
pub mod complex;
pub mod crisp_wiest;
pub mod graph;
pub mod homology;
pub mod raag;
pub mod report;
pub mod snf;
pub mod stallings;
pub mod subgroup;
