//! Ownership graph: node metadata plus a bidirectional CSR over shareholding links.
//!
//! Links point from the subsidiary to its shareholder, i.e. along the direction
//! dividends travel. `in` neighbours of a node are therefore the companies it
//! owns, `out` neighbours its shareholders.

mod cache;
mod io;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cache::{read_cache, write_cache, CACHE_VERSION};
pub use io::{load_edges, load_nodes, write_node_index, EdgeLoad, EDGE_HEADER, NODE_HEADER};

pub type NodeIx = u32;

/// Default cut-off (percent) above which a shareholding counts as substantial.
pub const DEFAULT_THRESHOLD: f64 = 10.0;

/// ISO-3166 alpha-2 jurisdiction code, or the `n.a.` sentinel.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Jurisdiction(String);

impl Jurisdiction {
    pub const NA: &'static str = "n.a.";

    /// Parses a two-letter code (case-insensitive) or the sentinel. Blank input maps to the sentinel.
    pub fn parse(raw: &str) -> Option<Self> {
        let raw = raw.trim();
        if raw.is_empty() || raw.eq_ignore_ascii_case(Self::NA) {
            return Some(Self::na());
        }
        if raw.len() == 2 && raw.bytes().all(|b| b.is_ascii_alphabetic()) {
            return Some(Jurisdiction(raw.to_ascii_uppercase()));
        }
        None
    }

    pub fn na() -> Self {
        Jurisdiction(Self::NA.to_string())
    }

    pub fn is_na(&self) -> bool {
        self.0 == Self::NA
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Equality used by the third-country test: the sentinel matches nothing, itself included.
    pub fn same_place(&self, other: &Jurisdiction) -> bool {
        !self.is_na() && self == other
    }
}

impl fmt::Display for Jurisdiction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Jurisdiction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub node_id: String,
    pub jurisdiction: Jurisdiction,
    /// NACE Rev.2 section letter; `V` when unknown.
    pub industry_section: char,
    pub name: String,
    pub is_headquarters: bool,
}

impl NodeRecord {
    pub fn new(node_id: impl Into<String>, jurisdiction: &str) -> Self {
        NodeRecord {
            node_id: node_id.into(),
            jurisdiction: Jurisdiction::parse(jurisdiction).unwrap_or_else(Jurisdiction::na),
            industry_section: 'V',
            name: String::new(),
            is_headquarters: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OwnershipEdge {
    pub subsidiary: String,
    pub shareholder: String,
    pub pct: f64,
}

/// Read access shared by the full graph and its filtered views.
pub trait Adjacency {
    fn node_count(&self) -> usize;
    fn edge_count(&self) -> usize;
    /// Shareholders of `u` (targets of `u`'s out-links).
    fn successors(&self, u: NodeIx) -> impl Iterator<Item = NodeIx> + '_;
    /// Subsidiaries of `u` (sources of `u`'s in-links).
    fn predecessors(&self, u: NodeIx) -> impl Iterator<Item = NodeIx> + '_;

    fn out_degree(&self, u: NodeIx) -> usize {
        self.successors(u).count()
    }

    fn in_degree(&self, u: NodeIx) -> usize {
        self.predecessors(u).count()
    }
}

/// Counters collected while assembling a graph.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildStats {
    pub self_loops_dropped: usize,
    pub duplicate_links_merged: usize,
    pub unknown_endpoints_dropped: usize,
}

/// Immutable directed graph with forward and reverse CSR indexes.
#[derive(Clone)]
pub struct OwnershipGraph {
    nodes: Vec<NodeRecord>,
    index: HashMap<String, NodeIx>,
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeIx>,
    out_pct: Vec<f64>,
    in_offsets: Vec<usize>,
    in_sources: Vec<NodeIx>,
    /// Position of each reverse entry in the forward arrays.
    in_edge: Vec<usize>,
    stats: BuildStats,
}

impl fmt::Debug for OwnershipGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OwnershipGraph")
            .field("nodes", &self.node_count())
            .field("edges", &self.edge_count())
            .finish()
    }
}

impl OwnershipGraph {
    /// Builds the graph; any edge naming a node not in `nodes` is an error.
    pub fn build(nodes: Vec<NodeRecord>, edges: &[OwnershipEdge]) -> Result<Self> {
        Self::build_with(nodes, edges, true)
    }

    /// Like [`build`](Self::build), but with `strict == false` edges with unknown
    /// endpoints are dropped and counted instead.
    pub fn build_with(nodes: Vec<NodeRecord>, edges: &[OwnershipEdge], strict: bool) -> Result<Self> {
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.node_id.clone(), i as NodeIx).is_some() {
                return Err(Error::DuplicateNode(n.node_id.clone()));
            }
        }
        let mut unknown = 0;
        let mut triples = Vec::with_capacity(edges.len());
        for e in edges {
            match (index.get(&e.subsidiary), index.get(&e.shareholder)) {
                (Some(&s), Some(&h)) => triples.push((s, h, e.pct)),
                (s, _) if strict => {
                    let missing = if s.is_none() { &e.subsidiary } else { &e.shareholder };
                    return Err(Error::UnknownNode(missing.clone()));
                }
                _ => unknown += 1,
            }
        }
        let mut g = Self::assemble(nodes, index, triples);
        g.stats.unknown_endpoints_dropped = unknown;
        Ok(g)
    }

    /// Builds from dense indexes; node metadata gets ids `"0".."n-1"` and the `n.a.` jurisdiction.
    pub fn from_pairs(n: usize, pairs: &[(NodeIx, NodeIx)]) -> Self {
        let nodes = (0..n).map(|i| NodeRecord::new(i.to_string(), Jurisdiction::NA)).collect();
        Self::from_indexed(nodes, pairs.iter().map(|&(u, v)| (u, v, 100.0)).collect())
    }

    /// Builds from already-indexed `(subsidiary, shareholder, pct)` triples.
    ///
    /// Panics if an index is out of range or node ids collide.
    pub fn from_indexed(nodes: Vec<NodeRecord>, triples: Vec<(NodeIx, NodeIx, f64)>) -> Self {
        let n = nodes.len();
        assert!(
            triples.iter().all(|&(u, v, _)| (u as usize) < n && (v as usize) < n),
            "edge endpoint out of range"
        );
        let mut index = HashMap::with_capacity(n);
        for (i, rec) in nodes.iter().enumerate() {
            let prev = index.insert(rec.node_id.clone(), i as NodeIx);
            assert!(prev.is_none(), "duplicate node id {}", rec.node_id);
        }
        Self::assemble(nodes, index, triples)
    }

    fn assemble(
        nodes: Vec<NodeRecord>,
        index: HashMap<String, NodeIx>,
        mut triples: Vec<(NodeIx, NodeIx, f64)>,
    ) -> Self {
        let n = nodes.len();
        let before = triples.len();
        triples.retain(|&(u, v, _)| u != v);
        let self_loops = before - triples.len();

        triples.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(b.2.total_cmp(&a.2)));
        let before = triples.len();
        // sorted with the largest pct first, so dedup keeps the strongest stake
        triples.dedup_by(|next, kept| next.0 == kept.0 && next.1 == kept.1);
        let merged = before - triples.len();

        let m = triples.len();
        let mut out_offsets = vec![0usize; n + 1];
        let mut in_offsets = vec![0usize; n + 1];
        for &(u, v, _) in &triples {
            out_offsets[u as usize + 1] += 1;
            in_offsets[v as usize + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
            in_offsets[i + 1] += in_offsets[i];
        }
        let out_targets: Vec<NodeIx> = triples.iter().map(|t| t.1).collect();
        let out_pct: Vec<f64> = triples.iter().map(|t| t.2).collect();

        // sources come out sorted per target because triples are sorted by source
        let mut cursor = in_offsets.clone();
        let mut in_sources = vec![0 as NodeIx; m];
        let mut in_edge = vec![0usize; m];
        for (e, &(u, v, _)) in triples.iter().enumerate() {
            let slot = &mut cursor[v as usize];
            in_sources[*slot] = u;
            in_edge[*slot] = e;
            *slot += 1;
        }

        OwnershipGraph {
            nodes,
            index,
            out_offsets,
            out_targets,
            out_pct,
            in_offsets,
            in_sources,
            in_edge,
            stats: BuildStats {
                self_loops_dropped: self_loops,
                duplicate_links_merged: merged,
                unknown_endpoints_dropped: 0,
            },
        }
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn node(&self, u: NodeIx) -> &NodeRecord {
        &self.nodes[u as usize]
    }

    pub fn jurisdiction(&self, u: NodeIx) -> &Jurisdiction {
        &self.nodes[u as usize].jurisdiction
    }

    pub fn lookup(&self, node_id: &str) -> Option<NodeIx> {
        self.index.get(node_id).copied()
    }

    pub fn build_stats(&self) -> &BuildStats {
        &self.stats
    }

    /// Iterates `(subsidiary, shareholder, pct)` in CSR order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeIx, NodeIx, f64)> + '_ {
        (0..self.nodes.len()).flat_map(move |u| {
            let r = self.out_offsets[u]..self.out_offsets[u + 1];
            r.map(move |e| (u as NodeIx, self.out_targets[e], self.out_pct[e]))
        })
    }

    /// Out-links of `u` as `(shareholder, pct)`.
    pub fn out_links(&self, u: NodeIx) -> impl Iterator<Item = (NodeIx, f64)> + '_ {
        let r = self.out_offsets[u as usize]..self.out_offsets[u as usize + 1];
        r.map(move |e| (self.out_targets[e], self.out_pct[e]))
    }

    /// In-links of `u` as `(subsidiary, pct)`.
    pub fn in_links(&self, u: NodeIx) -> impl Iterator<Item = (NodeIx, f64)> + '_ {
        let r = self.in_offsets[u as usize]..self.in_offsets[u as usize + 1];
        r.map(move |i| (self.in_sources[i], self.out_pct[self.in_edge[i]]))
    }

    pub fn out_slice(&self, u: NodeIx) -> &[NodeIx] {
        &self.out_targets[self.out_offsets[u as usize]..self.out_offsets[u as usize + 1]]
    }

    pub fn in_slice(&self, u: NodeIx) -> &[NodeIx] {
        &self.in_sources[self.in_offsets[u as usize]..self.in_offsets[u as usize + 1]]
    }

    pub fn has_edge(&self, u: NodeIx, v: NodeIx) -> bool {
        self.out_slice(u).binary_search(&v).is_ok()
    }

    /// Count of links with a recorded percentage of exactly zero (blank in the input).
    pub fn zero_pct_links(&self) -> usize {
        self.out_pct.iter().filter(|&&p| p == 0.0).count()
    }

    /// The same graph with every link reversed (shareholder → subsidiary).
    pub fn reversed(&self) -> Self {
        let triples = self.edges().map(|(u, v, p)| (v, u, p)).collect();
        Self::assemble(self.nodes.clone(), self.index.clone(), triples)
    }

    /// Restricts to links at or above `threshold` percent.
    pub fn substantial_view(&self, threshold: f64) -> Result<SubstantialView<'_>> {
        if !(threshold > 0.0 && threshold <= 100.0) {
            return Err(Error::InvalidThreshold(threshold));
        }
        let edge_count = self.out_pct.iter().filter(|&&p| p >= threshold).count();
        Ok(SubstantialView {
            graph: self,
            threshold,
            edge_count,
        })
    }

    /// Subgraph over `node_set`, keeping links whose endpoints are both inside.
    ///
    /// Nodes keep their relative order from the parent graph.
    pub fn induced_subgraph(&self, node_set: &[NodeIx]) -> Result<Self> {
        let mut keep: Vec<Option<NodeIx>> = vec![None; self.nodes.len()];
        let mut members: Vec<NodeIx> = node_set.to_vec();
        for &u in &members {
            if u as usize >= self.nodes.len() {
                return Err(Error::UnknownNode(u.to_string()));
            }
        }
        members.sort_unstable();
        members.dedup();
        for (new, &old) in members.iter().enumerate() {
            keep[old as usize] = Some(new as NodeIx);
        }
        let nodes: Vec<NodeRecord> = members.iter().map(|&u| self.nodes[u as usize].clone()).collect();
        let mut triples = Vec::new();
        for &u in &members {
            for (v, p) in self.out_links(u) {
                if let Some(nv) = keep[v as usize] {
                    triples.push((keep[u as usize].unwrap(), nv, p));
                }
            }
        }
        Ok(Self::from_indexed(nodes, triples))
    }

    /// Same as [`induced_subgraph`](Self::induced_subgraph) but addressed by node id.
    pub fn induced_subgraph_by_id<S: AsRef<str>>(&self, ids: &[S]) -> Result<Self> {
        let set = ids
            .iter()
            .map(|id| self.lookup(id.as_ref()).ok_or_else(|| Error::UnknownNode(id.as_ref().to_string())))
            .collect::<Result<Vec<_>>>()?;
        self.induced_subgraph(&set)
    }
}

impl Adjacency for OwnershipGraph {
    fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    fn successors(&self, u: NodeIx) -> impl Iterator<Item = NodeIx> + '_ {
        self.out_slice(u).iter().copied()
    }

    fn predecessors(&self, u: NodeIx) -> impl Iterator<Item = NodeIx> + '_ {
        self.in_slice(u).iter().copied()
    }

    fn out_degree(&self, u: NodeIx) -> usize {
        self.out_offsets[u as usize + 1] - self.out_offsets[u as usize]
    }

    fn in_degree(&self, u: NodeIx) -> usize {
        self.in_offsets[u as usize + 1] - self.in_offsets[u as usize]
    }
}

/// Links with `pct >= threshold`; borrows the parent graph.
#[derive(Clone, Copy)]
pub struct SubstantialView<'g> {
    graph: &'g OwnershipGraph,
    threshold: f64,
    edge_count: usize,
}

impl<'g> SubstantialView<'g> {
    pub fn graph(&self) -> &'g OwnershipGraph {
        self.graph
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Links of the parent graph left out of this view.
    pub fn excluded_count(&self) -> usize {
        self.graph.edge_count() - self.edge_count
    }

    pub fn contains(&self, pct: f64) -> bool {
        pct >= self.threshold
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeIx, NodeIx, f64)> + 'g {
        let t = self.threshold;
        self.graph.edges().filter(move |e| e.2 >= t)
    }
}

impl Adjacency for SubstantialView<'_> {
    fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    fn edge_count(&self) -> usize {
        self.edge_count
    }

    fn successors(&self, u: NodeIx) -> impl Iterator<Item = NodeIx> + '_ {
        let t = self.threshold;
        self.graph.out_links(u).filter(move |l| l.1 >= t).map(|l| l.0)
    }

    fn predecessors(&self, u: NodeIx) -> impl Iterator<Item = NodeIx> + '_ {
        let t = self.threshold;
        self.graph.in_links(u).filter(move |l| l.1 >= t).map(|l| l.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeRecord {
    pub node: NodeIx,
    /// Links entering the node: subsidiaries it owns.
    pub k_in: usize,
    /// Links leaving the node: its shareholders.
    pub k_out: usize,
}

pub fn degrees<G: Adjacency>(g: &G) -> Vec<DegreeRecord> {
    (0..g.node_count() as NodeIx)
        .map(|u| DegreeRecord {
            node: u,
            k_in: g.in_degree(u),
            k_out: g.out_degree(u),
        })
        .collect()
}

/// Fraction of links `(u, v)` whose reverse `(v, u)` is also present.
pub fn reciprocal_link_ratio(g: &OwnershipGraph) -> f64 {
    let m = g.edge_count();
    if m == 0 {
        return 0.0;
    }
    let reciprocated = g.edges().filter(|&(u, v, _)| g.has_edge(v, u)).count();
    reciprocated as f64 / m as f64
}
