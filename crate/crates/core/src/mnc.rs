//! Per-MNC subtrees over the substantial view: affiliates, ownership layers and
//! the degree sums used by the holding and conduit centralities.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Adjacency, NodeIx, SubstantialView};

/// How affiliate degrees are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeMode {
    /// Links inside the subgraph induced by the affiliates and the headquarters.
    #[default]
    Induced,
    /// Substantial links of the whole graph.
    Global,
}

impl FromStr for DegreeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "induced" => Ok(DegreeMode::Induced),
            "global" => Ok(DegreeMode::Global),
            other => Err(Error::InvalidParameter(format!("unknown degree mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DegreeSums {
    pub k_in: u64,
    pub total: u64,
    pub product: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MncSubtree {
    pub hq: NodeIx,
    /// Affiliates in increasing index order; the headquarters is not included.
    pub affiliates: Vec<NodeIx>,
    /// Layer of each affiliate (parallel to `affiliates`).
    pub layers: Vec<u32>,
    /// `(k_in, k_out)` of each affiliate (parallel to `affiliates`).
    pub degrees: Vec<(u32, u32)>,
    pub sums: DegreeSums,
    /// Direct subsidiaries of each affiliate inside the subtree, as positions.
    pub children: Vec<Vec<u32>>,
    pub mode: DegreeMode,
    position: HashMap<NodeIx, u32>,
}

impl MncSubtree {
    pub fn len(&self) -> usize {
        self.affiliates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.affiliates.is_empty()
    }

    /// Position of node `u` among the affiliates.
    pub fn position(&self, u: NodeIx) -> Option<usize> {
        self.position.get(&u).map(|&p| p as usize)
    }

    pub fn contains(&self, u: NodeIx) -> bool {
        self.position.contains_key(&u)
    }

    pub fn layer_of(&self, u: NodeIx) -> Option<u32> {
        self.position(u).map(|p| self.layers[p])
    }

    pub fn degree_of(&self, u: NodeIx) -> Option<(u32, u32)> {
        self.position(u).map(|p| self.degrees[p])
    }
}

/// Every node with a substantial path to `hq`, with its shortest distance as layer.
pub fn extract_mnc(view: &SubstantialView<'_>, hq: NodeIx) -> Result<MncSubtree> {
    extract_mnc_with(view, hq, DegreeMode::Induced)
}

pub fn extract_mnc_with(view: &SubstantialView<'_>, hq: NodeIx, mode: DegreeMode) -> Result<MncSubtree> {
    if hq as usize >= view.node_count() {
        return Err(Error::UnknownNode(hq.to_string()));
    }
    let mut dist: HashMap<NodeIx, u32> = HashMap::new();
    dist.insert(hq, 0);
    let mut queue = VecDeque::from([hq]);
    while let Some(u) = queue.pop_front() {
        let d = dist[&u];
        for s in view.predecessors(u) {
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(s) {
                e.insert(d + 1);
                queue.push_back(s);
            }
        }
    }
    dist.remove(&hq);
    let mut affiliates: Vec<NodeIx> = dist.keys().copied().collect();
    affiliates.sort_unstable();
    let layers = affiliates.iter().map(|u| dist[u]).collect();
    let position: HashMap<NodeIx, u32> = affiliates.iter().enumerate().map(|(i, &u)| (u, i as u32)).collect();
    let children = affiliates
        .iter()
        .map(|&u| {
            let mut c: Vec<u32> = view.predecessors(u).filter_map(|s| position.get(&s).copied()).collect();
            c.sort_unstable();
            c.dedup();
            c
        })
        .collect();
    let mut subtree = MncSubtree {
        hq,
        affiliates,
        layers,
        degrees: Vec::new(),
        sums: DegreeSums::default(),
        children,
        mode,
        position,
    };
    let (degrees, sums) = mnc_degrees(&subtree, view, mode);
    subtree.degrees = degrees;
    subtree.sums = sums;
    Ok(subtree)
}

pub fn extract_mnc_by_id(view: &SubstantialView<'_>, hq_id: &str) -> Result<MncSubtree> {
    let hq = view.graph().lookup(hq_id).ok_or_else(|| Error::UnknownNode(hq_id.to_string()))?;
    extract_mnc(view, hq)
}

/// Affiliate → layer, keyed by node index.
pub fn assign_layers(subtree: &MncSubtree) -> HashMap<NodeIx, u32> {
    subtree.affiliates.iter().copied().zip(subtree.layers.iter().copied()).collect()
}

/// Affiliate degrees and their sums over affiliates (headquarters excluded).
pub fn mnc_degrees(subtree: &MncSubtree, view: &SubstantialView<'_>, mode: DegreeMode) -> (Vec<(u32, u32)>, DegreeSums) {
    let inside = |v: NodeIx| v == subtree.hq || subtree.contains(v);
    let degrees: Vec<(u32, u32)> = subtree
        .affiliates
        .iter()
        .map(|&u| match mode {
            DegreeMode::Induced => (
                view.predecessors(u).filter(|&v| inside(v)).count() as u32,
                view.successors(u).filter(|&v| inside(v)).count() as u32,
            ),
            DegreeMode::Global => (view.in_degree(u) as u32, view.out_degree(u) as u32),
        })
        .collect();
    let mut sums = DegreeSums::default();
    for &(i, o) in &degrees {
        sums.k_in += i as u64;
        sums.total += (i + o) as u64;
        sums.product += i as u64 * o as u64;
    }
    (degrees, sums)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HqEntry {
    pub hq_node_id: String,
    pub mnc_name: String,
}

pub const HQ_HEADER: [&str; 2] = ["hq_node_id", "mnc_name"];

pub fn load_hqs(path: impl AsRef<Path>) -> Result<Vec<HqEntry>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != HQ_HEADER {
        return Err(Error::Malformed {
            path: path.to_path_buf(),
            line: 1,
            message: format!("expected header `{}`", HQ_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

pub fn write_hqs(path: impl AsRef<Path>, hqs: &[HqEntry]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(HQ_HEADER)?;
    for h in hqs {
        w.write_record([&h.hq_node_id, &h.mnc_name])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// File-system safe version of an MNC name.
pub fn file_stem(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    if s.is_empty() { "_".into() } else { s }
}

/// Writes `<dir>/<name>.csv` with `node_id,layer,k_in,k_out` per affiliate.
pub fn write_subtree(dir: &Path, name: &str, subtree: &MncSubtree, view: &SubstantialView<'_>) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(format!("{}.csv", file_stem(name)));
    let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(["node_id", "layer", "k_in", "k_out"])?;
    let g = view.graph();
    let mut order: Vec<usize> = (0..subtree.len()).collect();
    order.sort_by_key(|&p| (subtree.layers[p], subtree.affiliates[p]));
    for p in order {
        let (ki, ko) = subtree.degrees[p];
        w.write_record([
            g.node(subtree.affiliates[p]).node_id.as_str(),
            &subtree.layers[p].to_string(),
            &ki.to_string(),
            &ko.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Sanity identity: every subsidiary of an affiliate is itself an affiliate.
pub fn is_downward_closed(subtree: &MncSubtree, view: &SubstantialView<'_>) -> bool {
    let set: HashSet<NodeIx> = subtree.affiliates.iter().copied().collect();
    subtree
        .affiliates
        .iter()
        .chain(std::iter::once(&subtree.hq))
        .all(|&u| view.predecessors(u).all(|s| s == subtree.hq || set.contains(&s)))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::graph::{NodeRecord, OwnershipEdge, OwnershipGraph};

    /// The worked-example MNC: HQ in JP with two direct affiliates.
    pub(crate) fn toy_m1() -> OwnershipGraph {
        let nodes = [
            ("HQ", "JP"),
            ("a", "NL"),
            ("b", "GB"),
            ("c", "FR"),
            ("d", "FR"),
            ("e", "LU"),
            ("f", "GB"),
            ("g", "BM"),
            ("h", "US"),
        ]
        .iter()
        .map(|(id, j)| NodeRecord::new(*id, j))
        .collect();
        let edges: Vec<OwnershipEdge> = [
            ("a", "HQ"),
            ("h", "HQ"),
            ("b", "a"),
            ("c", "a"),
            ("d", "a"),
            ("e", "b"),
            ("f", "b"),
            ("g", "e"),
        ]
        .iter()
        .map(|(s, h)| OwnershipEdge {
            subsidiary: s.to_string(),
            shareholder: h.to_string(),
            pct: 100.0,
        })
        .collect();
        OwnershipGraph::build(nodes, &edges).unwrap()
    }

    fn by_id(g: &OwnershipGraph, s: &MncSubtree, id: &str) -> (u32, (u32, u32)) {
        let u = g.lookup(id).unwrap();
        (s.layer_of(u).unwrap(), s.degree_of(u).unwrap())
    }

    #[test]
    fn toy_m1_subtree() {
        let g = toy_m1();
        assert_eq!((g.node_count(), g.edge_count()), (9, 8));
        let view = g.substantial_view(10.0).unwrap();
        let s = extract_mnc_by_id(&view, "HQ").unwrap();
        assert_eq!(s.len(), 8);
        let layers: Vec<(&str, u32)> = ["a", "h", "b", "c", "d", "e", "f", "g"]
            .iter()
            .map(|id| (*id, by_id(&g, &s, id).0))
            .collect();
        assert_eq!(layers, vec![("a", 1), ("h", 1), ("b", 2), ("c", 2), ("d", 2), ("e", 3), ("f", 3), ("g", 4)]);
        assert_eq!(by_id(&g, &s, "a").1, (3, 1));
        assert_eq!(by_id(&g, &s, "b").1, (2, 1));
        assert_eq!(by_id(&g, &s, "e").1, (1, 1));
        assert_eq!(by_id(&g, &s, "h").1, (0, 1));
        assert_eq!(
            s.sums,
            DegreeSums {
                k_in: 6,
                total: 14,
                product: 6
            }
        );
        assert!(is_downward_closed(&s, &view));
    }

    #[test]
    fn induced_subgraph_of_toy() {
        let g = toy_m1();
        let sub = g.induced_subgraph_by_id(&["HQ", "a", "b"]).unwrap();
        let edges: Vec<(String, String)> = sub
            .edges()
            .map(|(u, v, _)| (sub.node(u).node_id.clone(), sub.node(v).node_id.clone()))
            .collect();
        assert_eq!(edges, vec![("a".into(), "HQ".into()), ("b".into(), "a".into())]);
    }

    #[test]
    fn hq_without_subsidiaries() {
        let g = OwnershipGraph::from_pairs(3, &[(0, 1)]);
        let view = g.substantial_view(10.0).unwrap();
        assert!(extract_mnc(&view, 0).unwrap().is_empty());
        assert!(matches!(extract_mnc(&view, 7), Err(Error::UnknownNode(_))));
    }

    #[test]
    fn cross_held_pair_below_layer_two() {
        // 1 → 0 (HQ), 2 → 1, {3, 4} each own part of 2 and hold each other
        let g = OwnershipGraph::from_pairs(5, &[(1, 0), (2, 1), (3, 2), (4, 2), (3, 4), (4, 3)]);
        let view = g.substantial_view(10.0).unwrap();
        let s = extract_mnc(&view, 0).unwrap();
        assert_eq!(s.layers, vec![1, 2, 3, 3]);
        assert_eq!(s.degree_of(3), Some((1, 2)));
    }

    #[test]
    fn small_degree_cases() {
        let g = OwnershipGraph::from_pairs(2, &[(1, 0)]);
        let view = g.substantial_view(10.0).unwrap();
        let s = extract_mnc(&view, 0).unwrap();
        assert_eq!(s.degrees, vec![(0, 1)]);
        assert_eq!(s.sums.k_in, 0);

        let g = OwnershipGraph::from_pairs(3, &[(1, 0), (2, 0)]);
        let view = g.substantial_view(10.0).unwrap();
        let s = extract_mnc(&view, 0).unwrap();
        assert_eq!(s.degrees, vec![(0, 1), (0, 1)]);
        assert_eq!(s.sums.total, 2);
    }

    #[test]
    fn weak_links_are_ignored_and_global_mode_counts_outside() {
        let nodes = ["hq", "x", "y", "z"].iter().map(|id| NodeRecord::new(*id, "US")).collect();
        let e = |s: &str, h: &str, pct: f64| OwnershipEdge {
            subsidiary: s.into(),
            shareholder: h.into(),
            pct,
        };
        let g = OwnershipGraph::build(nodes, &[e("x", "hq", 60.0), e("y", "x", 5.0), e("x", "z", 30.0)]).unwrap();
        let view = g.substantial_view(10.0).unwrap();
        let s = extract_mnc(&view, 0).unwrap();
        assert_eq!(s.affiliates, vec![1]);
        assert_eq!(s.degrees, vec![(0, 1)]);
        let (global, _) = mnc_degrees(&s, &view, DegreeMode::Global);
        assert_eq!(global, vec![(0, 2)]);
    }

    #[test]
    fn hq_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("hqs.csv");
        let hqs = vec![
            HqEntry {
                hq_node_id: "n1".into(),
                mnc_name: "Acme, Inc.".into(),
            },
            HqEntry {
                hq_node_id: "n9".into(),
                mnc_name: "Beta".into(),
            },
        ];
        write_hqs(&p, &hqs).unwrap();
        assert_eq!(load_hqs(&p).unwrap(), hqs);
        assert_eq!(file_stem("Acme, Inc."), "Acme__Inc_");
    }
}
