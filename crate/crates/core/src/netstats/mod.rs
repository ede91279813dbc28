//! Degree distributions with logarithmic binning, power-law fits, and the
//! degree-resolved clustering and nearest-neighbour-degree curves.

mod powerlaw;
pub mod zeta;

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Adjacency, NodeIx, OwnershipGraph};

pub use powerlaw::{binned_exponent, fit_power_law, PowerLawFit, XMinStrategy, MIN_TAIL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeDirection {
    In,
    Out,
    Total,
}

impl FromStr for DegreeDirection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "in" => Ok(DegreeDirection::In),
            "out" => Ok(DegreeDirection::Out),
            "total" => Ok(DegreeDirection::Total),
            _ => Err(Error::InvalidParameter(format!("unknown degree direction `{s}`"))),
        }
    }
}

pub fn degree_sequence(g: &OwnershipGraph, direction: DegreeDirection) -> Vec<usize> {
    (0..g.node_count() as NodeIx)
        .map(|u| match direction {
            DegreeDirection::In => g.in_degree(u),
            DegreeDirection::Out => g.out_degree(u),
            DegreeDirection::Total => g.in_degree(u) + g.out_degree(u),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub density: f64,
}

impl LogBin {
    pub fn centre(&self) -> f64 {
        (self.lo * self.hi).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeHistogram {
    pub direction: DegreeDirection,
    /// Degree → node count, zero degrees included.
    pub raw: BTreeMap<usize, usize>,
    /// Geometric bins `[r^i, r^(i+1))` over positive degrees; density = count / (N₊ · width).
    pub bins: Vec<LogBin>,
}

impl DegreeHistogram {
    pub fn occupied_bins(&self) -> impl Iterator<Item = &LogBin> {
        self.bins.iter().filter(|b| b.count > 0)
    }

    /// Negated log-log slope over occupied bins.
    pub fn binned_exponent(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self.occupied_bins().map(|b| (b.centre(), b.density)).collect();
        binned_exponent(&pts)
    }
}

/// Raw and log-binned histogram of an arbitrary sequence of non-negative counts.
pub fn log_binned(values: &[usize], bin_ratio: f64) -> Result<(BTreeMap<usize, usize>, Vec<LogBin>)> {
    if !(bin_ratio > 1.0 && bin_ratio.is_finite()) {
        return Err(Error::InvalidParameter(format!("bin ratio must exceed 1, got {bin_ratio}")));
    }
    let mut raw = BTreeMap::new();
    for &k in values {
        *raw.entry(k).or_insert(0usize) += 1;
    }
    let positive: usize = raw.range(1..).map(|(_, c)| c).sum();
    let mut bins = Vec::new();
    if positive == 0 {
        return Ok((raw, bins));
    }
    let max = *raw.keys().next_back().unwrap() as f64;
    let mut lo = 1.0f64;
    let mut i = 0;
    while lo <= max {
        let hi = bin_ratio.powi(i + 1);
        let count: usize = raw
            .iter()
            .filter(|(&k, _)| k > 0 && (k as f64) >= lo && (k as f64) < hi)
            .map(|(_, &c)| c)
            .sum();
        bins.push(LogBin {
            lo,
            hi,
            count,
            density: count as f64 / (positive as f64 * (hi - lo)),
        });
        lo = hi;
        i += 1;
    }
    Ok((raw, bins))
}

pub fn degree_histogram(g: &OwnershipGraph, direction: DegreeDirection, bin_ratio: f64) -> Result<DegreeHistogram> {
    let (raw, bins) = log_binned(&degree_sequence(g, direction), bin_ratio)?;
    Ok(DegreeHistogram { direction, raw, bins })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub mean: f64,
    pub count: usize,
}

/// Degree k → average of a per-node quantity over nodes of total degree k.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct StatCurve {
    pub points: BTreeMap<usize, CurvePoint>,
}

impl StatCurve {
    /// Averages per-node values in node order so sums are reproducible.
    fn from_nodes(pairs: impl Iterator<Item = (usize, f64)>) -> Self {
        let mut acc: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
        for (k, v) in pairs {
            let e = acc.entry(k).or_insert((0.0, 0));
            e.0 += v;
            e.1 += 1;
        }
        StatCurve {
            points: acc
                .into_iter()
                .map(|(k, (s, c))| (k, CurvePoint { mean: s / c as f64, count: c }))
                .collect(),
        }
    }

    pub fn get(&self, k: usize) -> Option<f64> {
        self.points.get(&k).map(|p| p.mean)
    }
}

/// Undirected simple adjacency: parallel and reciprocal links collapse.
fn undirected(g: &OwnershipGraph) -> Vec<Vec<NodeIx>> {
    (0..g.node_count() as NodeIx)
        .map(|u| {
            let (a, b) = (g.out_slice(u), g.in_slice(u));
            let mut merged = Vec::with_capacity(a.len() + b.len());
            let (mut i, mut j) = (0, 0);
            while i < a.len() || j < b.len() {
                let next = match (a.get(i), b.get(j)) {
                    (Some(&x), Some(&y)) if x == y => {
                        i += 1;
                        j += 1;
                        x
                    }
                    (Some(&x), Some(&y)) if x < y => {
                        i += 1;
                        x
                    }
                    (Some(_), Some(&y)) => {
                        j += 1;
                        y
                    }
                    (Some(&x), None) => {
                        i += 1;
                        x
                    }
                    (None, Some(&y)) => {
                        j += 1;
                        y
                    }
                    (None, None) => unreachable!(),
                };
                merged.push(next);
            }
            merged
        })
        .collect()
}

/// Triangles through each node, by degree-ordered forward enumeration.
fn triangles_per_node(adj: &[Vec<NodeIx>]) -> Vec<u64> {
    let n = adj.len();
    let rank_less = |a: NodeIx, b: NodeIx| (adj[a as usize].len(), a) < (adj[b as usize].len(), b);
    let forward: Vec<Vec<NodeIx>> = (0..n as NodeIx)
        .map(|u| adj[u as usize].iter().copied().filter(|&v| rank_less(u, v)).collect())
        .collect();
    let mut tri = vec![0u64; n];
    let mut mark = vec![false; n];
    for u in 0..n {
        for &v in &forward[u] {
            mark[v as usize] = true;
        }
        for &v in &forward[u] {
            for &w in &forward[v as usize] {
                if mark[w as usize] {
                    tri[u] += 1;
                    tri[v as usize] += 1;
                    tri[w as usize] += 1;
                }
            }
        }
        for &v in &forward[u] {
            mark[v as usize] = false;
        }
    }
    tri
}

/// Local clustering on the undirected simple graph, averaged by total degree.
/// Nodes with fewer than two distinct neighbours contribute 0.
pub fn clustering_by_degree(g: &OwnershipGraph) -> StatCurve {
    let adj = undirected(g);
    let tri = triangles_per_node(&adj);
    let total = degree_sequence(g, DegreeDirection::Total);
    StatCurve::from_nodes((0..g.node_count()).map(|u| {
        let d = adj[u].len() as f64;
        let c = if d < 2.0 { 0.0 } else { 2.0 * tri[u] as f64 / (d * (d - 1.0)) };
        (total[u], c)
    }))
}

/// Mean total degree of undirected neighbours, averaged by total degree.
/// Isolated nodes have no neighbours and are left out.
pub fn knn_by_degree(g: &OwnershipGraph) -> StatCurve {
    let adj = undirected(g);
    let total = degree_sequence(g, DegreeDirection::Total);
    StatCurve::from_nodes((0..g.node_count()).filter(|&u| !adj[u].is_empty()).map(|u| {
        let s: usize = adj[u].iter().map(|&v| total[v as usize]).sum();
        (total[u], s as f64 / adj[u].len() as f64)
    }))
}
