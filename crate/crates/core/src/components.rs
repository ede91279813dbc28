//! Weak and strong components, bow-tie decomposition of the giant weak
//! component, and shortest-distance histograms between bow-tie regions.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Adjacency, NodeIx, OwnershipGraph};

const UNSEEN: u32 = u32::MAX;

/// Node → component labels. Component ids are ordered by the smallest node
/// index they contain, so labelling is independent of traversal order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabeling {
    pub labels: Vec<u32>,
    pub sizes: Vec<usize>,
}

impl ComponentLabeling {
    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }

    /// Largest component; ties go to the lowest id (smallest contained node).
    pub fn largest(&self) -> Option<u32> {
        let mut best: Option<(usize, u32)> = None;
        for (c, &s) in self.sizes.iter().enumerate() {
            if best.is_none_or(|(bs, _)| s > bs) {
                best = Some((s, c as u32));
            }
        }
        best.map(|b| b.1)
    }

    pub fn members(&self, component: u32) -> Vec<NodeIx> {
        (0..self.labels.len() as NodeIx)
            .filter(|&u| self.labels[u as usize] == component)
            .collect()
    }

    /// Renumbers raw labels so ids follow first appearance in node order.
    fn canonical(raw: &[u32], count: usize) -> Self {
        let mut remap = vec![UNSEEN; count];
        let mut next = 0u32;
        let mut labels = Vec::with_capacity(raw.len());
        let mut sizes = Vec::with_capacity(count);
        for &r in raw {
            let slot = &mut remap[r as usize];
            if *slot == UNSEEN {
                *slot = next;
                next += 1;
                sizes.push(0);
            }
            labels.push(*slot);
            sizes[*slot as usize] += 1;
        }
        ComponentLabeling { labels, sizes }
    }
}

/// Components of the undirected view.
pub fn weak_components(g: &OwnershipGraph) -> ComponentLabeling {
    let n = g.node_count();
    let mut labels = vec![UNSEEN; n];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for s in 0..n {
        if labels[s] != UNSEEN {
            continue;
        }
        let c = sizes.len() as u32;
        labels[s] = c;
        let mut size = 1;
        queue.push_back(s as NodeIx);
        while let Some(u) = queue.pop_front() {
            for &v in g.out_slice(u).iter().chain(g.in_slice(u)) {
                if labels[v as usize] == UNSEEN {
                    labels[v as usize] = c;
                    size += 1;
                    queue.push_back(v);
                }
            }
        }
        sizes.push(size);
    }
    ComponentLabeling { labels, sizes }
}

/// Strongly connected components by an explicit-stack Tarjan traversal.
pub fn strong_components(g: &OwnershipGraph) -> ComponentLabeling {
    let n = g.node_count();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<NodeIx> = Vec::new();
    let mut frames: Vec<(NodeIx, usize)> = Vec::new();
    let mut raw = vec![UNSEEN; n];
    let mut counter = 0u32;
    let mut found = 0u32;

    for s in 0..n as NodeIx {
        if index[s as usize] != UNSEEN {
            continue;
        }
        index[s as usize] = counter;
        low[s as usize] = counter;
        counter += 1;
        stack.push(s);
        on_stack[s as usize] = true;
        frames.push((s, 0));

        while let Some(frame) = frames.last_mut() {
            let v = frame.0;
            let succ = g.out_slice(v);
            if frame.1 < succ.len() {
                let w = succ[frame.1];
                frame.1 += 1;
                let wi = w as usize;
                if index[wi] == UNSEEN {
                    index[wi] = counter;
                    low[wi] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[wi] = true;
                    frames.push((w, 0));
                } else if on_stack[wi] {
                    low[v as usize] = low[v as usize].min(index[wi]);
                }
                continue;
            }
            frames.pop();
            if let Some(&(parent, _)) = frames.last() {
                low[parent as usize] = low[parent as usize].min(low[v as usize]);
            }
            if low[v as usize] == index[v as usize] {
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w as usize] = false;
                    raw[w as usize] = found;
                    if w == v {
                        break;
                    }
                }
                found += 1;
            }
        }
    }
    ComponentLabeling::canonical(&raw, found as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Region {
    Gscc,
    In,
    Out,
    Tendril,
    /// Outside the giant weak component.
    Rest,
}

impl Region {
    pub const BOWTIE: [Region; 4] = [Region::Gscc, Region::In, Region::Out, Region::Tendril];
    pub const ALL: [Region; 5] = [Region::Gscc, Region::In, Region::Out, Region::Tendril, Region::Rest];

    pub fn label(self) -> &'static str {
        match self {
            Region::Gscc => "GSCC",
            Region::In => "IN",
            Region::Out => "OUT",
            Region::Tendril => "TE",
            Region::Rest => "REST",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Region::ALL
            .into_iter()
            .find(|r| r.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown region `{s}`")))
    }
}

/// Bow-tie partition of the giant weak component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BowTie {
    pub region: Vec<Region>,
    pub gwcc_size: usize,
    pub gwcc_links: usize,
}

impl BowTie {
    pub fn size(&self, r: Region) -> usize {
        self.region.iter().filter(|&&x| x == r).count()
    }

    pub fn sizes(&self) -> BTreeMap<Region, usize> {
        let mut m: BTreeMap<Region, usize> = Region::ALL.iter().map(|&r| (r, 0)).collect();
        for &r in &self.region {
            *m.get_mut(&r).unwrap() += 1;
        }
        m
    }

    /// `(region, count, ratio)` rows for the four bow-tie regions, ratio as a
    /// percentage of the GWCC rounded half-up to three decimals.
    pub fn table(&self) -> Vec<(Region, usize, String)> {
        let sizes = self.sizes();
        Region::BOWTIE
            .iter()
            .map(|&r| (r, sizes[&r], percent_3dp(sizes[&r] as u64, self.gwcc_size as u64)))
            .collect()
    }
}

/// `count / total` as a percentage string with three decimals, rounded half-up
/// in exact integer arithmetic.
pub fn percent_3dp(count: u64, total: u64) -> String {
    if total == 0 {
        return "0.000".to_string();
    }
    let scaled = (count as u128 * 100_000 * 2 + total as u128) / (2 * total as u128);
    format!("{}.{:03}", scaled / 1000, scaled % 1000)
}

/// GWCC, its largest SCC, and the reachability-based regions around it.
pub fn bowtie_decompose(g: &OwnershipGraph) -> Result<BowTie> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let weak = weak_components(g);
    let giant = weak.largest().expect("non-empty graph has a component");
    let in_gwcc: Vec<bool> = weak.labels.iter().map(|&c| c == giant).collect();

    let strong = strong_components(g);
    let mut best: Option<(usize, u32)> = None;
    let mut seen = vec![false; strong.component_count()];
    for u in 0..n {
        let c = strong.labels[u];
        if in_gwcc[u] && !seen[c as usize] {
            seen[c as usize] = true;
            let s = strong.sizes[c as usize];
            if best.is_none_or(|(bs, _)| s > bs) {
                best = Some((s, c));
            }
        }
    }
    let core = best.expect("GWCC is non-empty").1;

    let mut region = vec![Region::Rest; n];
    for u in 0..n {
        if in_gwcc[u] {
            region[u] = if strong.labels[u] == core { Region::Gscc } else { Region::Tendril };
        }
    }
    let sources: Vec<NodeIx> = (0..n as NodeIx).filter(|&u| region[u as usize] == Region::Gscc).collect();
    for u in reach(g, &sources, Orientation::Backward).into_iter() {
        if region[u as usize] == Region::Tendril {
            region[u as usize] = Region::In;
        }
    }
    for u in reach(g, &sources, Orientation::Forward).into_iter() {
        if region[u as usize] == Region::Tendril {
            region[u as usize] = Region::Out;
        }
    }
    let gwcc_size = weak.sizes[giant as usize];
    let gwcc_links = g.edges().filter(|&(u, _, _)| in_gwcc[u as usize]).count();
    Ok(BowTie {
        region,
        gwcc_size,
        gwcc_links,
    })
}

#[derive(Clone, Copy)]
enum Orientation {
    Forward,
    Backward,
}

fn bfs_distances(g: &OwnershipGraph, sources: &[NodeIx], dir: Orientation) -> Vec<u32> {
    let mut dist = vec![UNSEEN; g.node_count()];
    let mut queue = VecDeque::with_capacity(sources.len());
    for &s in sources {
        dist[s as usize] = 0;
        queue.push_back(s);
    }
    while let Some(u) = queue.pop_front() {
        let next = match dir {
            Orientation::Forward => g.out_slice(u),
            Orientation::Backward => g.in_slice(u),
        };
        let d = dist[u as usize] + 1;
        for &v in next {
            if dist[v as usize] == UNSEEN {
                dist[v as usize] = d;
                queue.push_back(v);
            }
        }
    }
    dist
}

fn reach(g: &OwnershipGraph, sources: &[NodeIx], dir: Orientation) -> Vec<NodeIx> {
    bfs_distances(g, sources, dir)
        .iter()
        .enumerate()
        .filter(|(_, &d)| d != UNSEEN && d > 0)
        .map(|(u, _)| u as NodeIx)
        .collect()
}

/// Size → number of components of that size.
pub fn component_size_histogram(labels: &ComponentLabeling, exclude_largest: bool) -> BTreeMap<usize, usize> {
    let skip = if exclude_largest { labels.largest() } else { None };
    let mut hist = BTreeMap::new();
    for (c, &s) in labels.sizes.iter().enumerate() {
        if Some(c as u32) != skip {
            *hist.entry(s).or_insert(0) += 1;
        }
    }
    hist
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistanceDirection {
    /// From each IN node to the nearest GSCC node.
    InToGscc,
    /// From the nearest GSCC node to each OUT node.
    GsccToOut,
}

impl FromStr for DistanceDirection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "in" | "in-gscc" => Ok(DistanceDirection::InToGscc),
            "out" | "gscc-out" => Ok(DistanceDirection::GsccToOut),
            _ => Err(Error::InvalidParameter(format!("distance direction must be `in` or `out`, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceHistogram {
    pub direction: DistanceDirection,
    pub counts: BTreeMap<u32, usize>,
}

impl DistanceHistogram {
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    /// `(distance, count, ratio%)` rows with 3-dp percentages.
    pub fn rows(&self) -> Vec<(u32, usize, String)> {
        let total = self.total() as u64;
        self.counts
            .iter()
            .map(|(&d, &c)| (d, c, percent_3dp(c as u64, total)))
            .collect()
    }
}

/// Shortest hop distances between the GSCC and the IN or OUT region, by
/// multi-source BFS seeded with every GSCC node.
pub fn distance_distribution(g: &OwnershipGraph, bowtie: &BowTie, direction: DistanceDirection) -> Result<DistanceHistogram> {
    if bowtie.region.len() != g.node_count() {
        return Err(Error::InvalidParameter("bow-tie was computed on a different graph".into()));
    }
    let sources: Vec<NodeIx> = (0..g.node_count() as NodeIx)
        .filter(|&u| bowtie.region[u as usize] == Region::Gscc)
        .collect();
    let (orient, target) = match direction {
        DistanceDirection::InToGscc => (Orientation::Backward, Region::In),
        DistanceDirection::GsccToOut => (Orientation::Forward, Region::Out),
    };
    let dist = bfs_distances(g, &sources, orient);
    let mut counts = BTreeMap::new();
    for (u, &d) in dist.iter().enumerate() {
        if bowtie.region[u] == target {
            debug_assert!(d != UNSEEN && d >= 1);
            *counts.entry(d).or_insert(0) += 1;
        }
    }
    Ok(DistanceHistogram { direction, counts })
}
