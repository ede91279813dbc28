//! Counting key firms and headquarters by jurisdiction and bow-tie region,
//! plus the ownership-chain and headquarters tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::components::{BowTie, Region};
use crate::error::{Error, Result};
use crate::graph::{Adjacency, NodeIx, OwnershipGraph, SubstantialView};
use crate::keyfirms::{KeyFirmRow, Role};
use crate::mnc::HqEntry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Hq,
    Holding,
    Hc,
    Conduit,
    Affiliates,
}

impl Dimension {
    pub const ALL: [Dimension; 5] = [Dimension::Hq, Dimension::Holding, Dimension::Hc, Dimension::Conduit, Dimension::Affiliates];

    pub fn label(self) -> &'static str {
        match self {
            Dimension::Hq => "hq",
            Dimension::Holding => "holding",
            Dimension::Hc => "hc",
            Dimension::Conduit => "conduit",
            Dimension::Affiliates => "affiliates",
        }
    }

    fn role(self) -> Option<Role> {
        match self {
            Dimension::Holding => Some(Role::Holding),
            Dimension::Hc => Some(Role::HoldingAndConduit),
            Dimension::Conduit => Some(Role::Conduit),
            _ => None,
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Dimension::ALL
            .into_iter()
            .find(|d| d.label() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown tally dimension `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TallyRow {
    pub code: String,
    pub count: usize,
    /// Share of the table total, in percent.
    pub pct: f64,
}

/// Descending by count, ties by code.
pub fn ranked(counts: BTreeMap<String, usize>) -> Vec<TallyRow> {
    let total: usize = counts.values().sum();
    let mut rows: Vec<TallyRow> = counts
        .into_iter()
        .map(|(code, count)| TallyRow {
            pct: 100.0 * count as f64 / total as f64,
            code,
            count,
        })
        .collect();
    rows.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.code.cmp(&b.code)));
    rows
}

fn top(mut rows: Vec<TallyRow>, top_k: Option<usize>) -> Vec<TallyRow> {
    if let Some(k) = top_k {
        rows.truncate(k);
    }
    rows
}

/// Key-firm rows joined to the graph and to each MNC's headquarters.
pub struct Corpus<'a> {
    pub graph: &'a OwnershipGraph,
    pub rows: &'a [KeyFirmRow],
    /// MNC name → headquarters (first entry per name).
    pub hq_of: BTreeMap<String, NodeIx>,
}

impl<'a> Corpus<'a> {
    pub fn new(graph: &'a OwnershipGraph, rows: &'a [KeyFirmRow], hqs: &[HqEntry]) -> Self {
        let mut hq_of = BTreeMap::new();
        for h in hqs {
            match graph.lookup(&h.hq_node_id) {
                Some(u) => {
                    hq_of.entry(h.mnc_name.clone()).or_insert(u);
                }
                None => log::warn!("headquarters `{}` of `{}` not in graph", h.hq_node_id, h.mnc_name),
            }
        }
        Corpus { graph, rows, hq_of }
    }

    fn node(&self, row: &KeyFirmRow) -> Option<NodeIx> {
        let u = self.graph.lookup(&row.affiliate_id);
        if u.is_none() {
            log::warn!("affiliate `{}` not in graph", row.affiliate_id);
        }
        u
    }

    fn code(&self, u: NodeIx) -> String {
        self.graph.jurisdiction(u).to_string()
    }

    /// Nodes counted under a dimension, one entry per (MNC, affiliate) row or per headquarters.
    fn members(&self, dim: Dimension) -> Vec<NodeIx> {
        match dim {
            Dimension::Hq => self.hq_of.values().copied().collect(),
            Dimension::Affiliates => self.rows.iter().filter_map(|r| self.node(r)).collect(),
            _ => {
                let role = dim.role();
                self.rows.iter().filter(|r| Some(r.role) == role).filter_map(|r| self.node(r)).collect()
            }
        }
    }
}

pub fn tally_by_jurisdiction(corpus: &Corpus<'_>, dim: Dimension) -> Vec<TallyRow> {
    let mut counts = BTreeMap::new();
    for u in corpus.members(dim) {
        *counts.entry(corpus.code(u)).or_insert(0) += 1;
    }
    ranked(counts)
}

/// Region counts per dimension; nodes outside the GWCC land in `REST`.
pub fn tally_by_bowtie(corpus: &Corpus<'_>, bowtie: &BowTie) -> BTreeMap<Dimension, BTreeMap<Region, usize>> {
    Dimension::ALL
        .into_iter()
        .map(|dim| {
            let mut counts: BTreeMap<Region, usize> = Region::ALL.into_iter().map(|r| (r, 0)).collect();
            for u in corpus.members(dim) {
                *counts.entry(bowtie.region[u as usize]).or_insert(0) += 1;
            }
            (dim, counts)
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ChainTable {
    pub firms: usize,
    /// Jurisdictions of direct substantial subsidiaries.
    pub subsidiaries: Vec<TallyRow>,
    /// Jurisdictions of direct substantial shareholders.
    pub shareholders: Vec<TallyRow>,
}

/// Over distinct key firms with `role` located in `code`, tallies the
/// jurisdictions of their direct subsidiaries and shareholders.
pub fn chain_tables(view: &SubstantialView<'_>, rows: &[KeyFirmRow], role: Role, code: &str, top_k: Option<usize>) -> ChainTable {
    let g = view.graph();
    let firms: BTreeSet<NodeIx> = rows
        .iter()
        .filter(|r| r.role == role)
        .filter_map(|r| g.lookup(&r.affiliate_id))
        .filter(|&u| g.jurisdiction(u).as_str() == code)
        .collect();
    let mut subs = BTreeMap::new();
    let mut holders = BTreeMap::new();
    for &u in &firms {
        for s in view.predecessors(u) {
            *subs.entry(g.jurisdiction(s).to_string()).or_insert(0) += 1;
        }
        for h in view.successors(u) {
            *holders.entry(g.jurisdiction(h).to_string()).or_insert(0) += 1;
        }
    }
    ChainTable {
        firms: firms.len(),
        subsidiaries: top(ranked(subs), top_k),
        shareholders: top(ranked(holders), top_k),
    }
}

/// (role, jurisdiction) pairs present among key firms, in order.
pub fn chain_keys(corpus: &Corpus<'_>) -> BTreeSet<(Role, String)> {
    corpus
        .rows
        .iter()
        .filter(|r| r.role.is_key())
        .filter_map(|r| corpus.node(r).map(|u| (r.role, corpus.code(u))))
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HqTables {
    /// Per role: share of key firms by headquarters jurisdiction.
    pub shares: BTreeMap<Role, Vec<TallyRow>>,
    /// For the leading headquarters jurisdictions: where their key firms sit, per role.
    pub locations: BTreeMap<String, BTreeMap<Role, Vec<TallyRow>>>,
}

pub fn hq_tables(corpus: &Corpus<'_>, top_k: Option<usize>) -> HqTables {
    let mut shares: BTreeMap<Role, BTreeMap<String, usize>> = Role::KEY.into_iter().map(|r| (r, BTreeMap::new())).collect();
    let mut locations: BTreeMap<String, BTreeMap<Role, BTreeMap<String, usize>>> = BTreeMap::new();
    let mut hq_totals: BTreeMap<String, usize> = BTreeMap::new();
    for r in corpus.rows.iter().filter(|r| r.role.is_key()) {
        let (Some(&hq), Some(u)) = (corpus.hq_of.get(&r.mnc), corpus.node(r)) else {
            continue;
        };
        let hq_code = corpus.code(hq);
        *shares.get_mut(&r.role).unwrap().entry(hq_code.clone()).or_insert(0) += 1;
        *hq_totals.entry(hq_code.clone()).or_insert(0) += 1;
        *locations
            .entry(hq_code)
            .or_default()
            .entry(r.role)
            .or_default()
            .entry(corpus.code(u))
            .or_insert(0) += 1;
    }
    let leaders: BTreeSet<String> = top(ranked(hq_totals), top_k).into_iter().map(|r| r.code).collect();
    HqTables {
        shares: shares.into_iter().map(|(role, c)| (role, top(ranked(c), top_k))).collect(),
        locations: locations
            .into_iter()
            .filter(|(code, _)| leaders.contains(code))
            .map(|(code, per_role)| (code, per_role.into_iter().map(|(role, c)| (role, top(ranked(c), top_k))).collect()))
            .collect(),
    }
}

fn create(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn finish(mut w: csv::Writer<BufWriter<File>>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

/// `code,count,pct`.
pub fn write_tally(path: impl AsRef<Path>, rows: &[TallyRow]) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    w.write_record(["code", "count", "pct"])?;
    for r in rows {
        w.write_record([r.code.clone(), r.count.to_string(), r.pct.to_string()])?;
    }
    finish(w, path)
}

pub fn load_tally(path: impl AsRef<Path>) -> Result<Vec<TallyRow>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(file);
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

/// `dimension,region,count,pct`, percentages within each dimension.
pub fn write_bowtie_tally(path: impl AsRef<Path>, t: &BTreeMap<Dimension, BTreeMap<Region, usize>>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    w.write_record(["dimension", "region", "count", "pct"])?;
    for (dim, counts) in t {
        let total: usize = counts.values().sum();
        for (region, &count) in counts {
            let pct = if total == 0 { 0.0 } else { 100.0 * count as f64 / total as f64 };
            w.write_record([dim.label().to_string(), region.label().to_string(), count.to_string(), pct.to_string()])?;
        }
    }
    finish(w, path)
}

/// `side,code,count,pct` with side `subsidiary` or `shareholder`.
pub fn write_chain(path: impl AsRef<Path>, t: &ChainTable) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    w.write_record(["side", "code", "count", "pct"])?;
    for (side, rows) in [("subsidiary", &t.subsidiaries), ("shareholder", &t.shareholders)] {
        for r in rows {
            w.write_record([side.to_string(), r.code.clone(), r.count.to_string(), r.pct.to_string()])?;
        }
    }
    finish(w, path)
}

/// `hq_shares.csv` (`role,code,count,pct`) and `hq_locations.csv` (`hq_code,role,code,count,pct`).
pub fn write_hq_tables(dir: impl AsRef<Path>, t: &HqTables) -> Result<()> {
    let dir = dir.as_ref();
    let path = dir.join("hq_shares.csv");
    let mut w = create(&path)?;
    w.write_record(["role", "code", "count", "pct"])?;
    for (role, rows) in &t.shares {
        for r in rows {
            w.write_record([role.label().to_string(), r.code.clone(), r.count.to_string(), r.pct.to_string()])?;
        }
    }
    finish(w, &path)?;
    let path = dir.join("hq_locations.csv");
    let mut w = create(&path)?;
    w.write_record(["hq_code", "role", "code", "count", "pct"])?;
    for (hq, per_role) in &t.locations {
        for (role, rows) in per_role {
            for r in rows {
                w.write_record([hq.clone(), role.label().to_string(), r.code.clone(), r.count.to_string(), r.pct.to_string()])?;
            }
        }
    }
    finish(w, &path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::bowtie_decompose;
    use crate::graph::{NodeRecord, OwnershipEdge};
    use crate::keyfirms::classify_all;
    use crate::mnc::tests::toy_m1;
    use crate::mnc::DegreeMode;

    fn row(mnc: &str, id: &str, role: Role) -> KeyFirmRow {
        KeyFirmRow {
            mnc: mnc.into(),
            affiliate_id: id.into(),
            layer: 1,
            k_in: 1,
            k_out: 1,
            h: None,
            t: None,
            third_country: true,
            role,
        }
    }

    fn hq(id: &str, name: &str) -> HqEntry {
        HqEntry {
            hq_node_id: id.into(),
            mnc_name: name.into(),
        }
    }

    fn small_world() -> OwnershipGraph {
        let nodes = [("h1", "JP"), ("h2", "US"), ("n1", "NL"), ("n2", "NL"), ("g1", "GB"), ("u1", "US"), ("u2", "US"), ("u3", "US")]
            .iter()
            .map(|(id, c)| NodeRecord::new(*id, c))
            .collect();
        OwnershipGraph::build(nodes, &[]).unwrap()
    }

    #[test]
    fn counting_by_jurisdiction() {
        let g = small_world();
        let rows = vec![row("A", "n1", Role::Holding), row("B", "n2", Role::Conduit), row("B", "g1", Role::Holding)];
        let hqs = [hq("h1", "A"), hq("h2", "B")];
        let c = Corpus::new(&g, &rows, &hqs);
        let mut key = tally_by_jurisdiction(&c, Dimension::Holding);
        key.extend(tally_by_jurisdiction(&c, Dimension::Conduit));
        let all = tally_by_jurisdiction(&c, Dimension::Affiliates);
        assert_eq!(all[0].code, "NL");
        assert!((all[0].pct - 200.0 / 3.0).abs() < 1e-12);
        assert!((all[1].pct - 100.0 / 3.0).abs() < 1e-12);
        assert!((all.iter().map(|r| r.pct).sum::<f64>() - 100.0).abs() < 1e-9);
        assert!(tally_by_jurisdiction(&Corpus::new(&g, &[], &hqs), Dimension::Holding).is_empty());
        assert_eq!(tally_by_jurisdiction(&c, Dimension::Hq).len(), 2);
    }

    #[test]
    fn hq_shares_by_role() {
        let g = small_world();
        let rows = vec![
            row("A", "n1", Role::Holding),
            row("B", "u1", Role::Holding),
            row("B", "u2", Role::Holding),
            row("B", "u3", Role::Holding),
        ];
        let c = Corpus::new(&g, &rows, &[hq("h1", "A"), hq("h2", "B")]);
        let t = hq_tables(&c, None);
        let h = &t.shares[&Role::Holding];
        assert_eq!((h[0].code.as_str(), h[0].pct), ("US", 75.0));
        assert_eq!((h[1].code.as_str(), h[1].pct), ("JP", 25.0));
        assert!(t.shares[&Role::Conduit].is_empty());
        assert_eq!(t.locations["US"][&Role::Holding][0].code, "US");
        assert_eq!(hq_tables(&c, Some(1)).locations.len(), 1);
    }

    #[test]
    fn toy_chain_table() {
        let g = toy_m1();
        let view = g.substantial_view(10.0).unwrap();
        let rep = classify_all(&view, &[hq("HQ", "M1")], DegreeMode::Induced);
        let t = chain_tables(&view, &rep.rows, Role::Holding, "NL", None);
        assert_eq!(t.firms, 1);
        let subs: Vec<(&str, usize)> = t.subsidiaries.iter().map(|r| (r.code.as_str(), r.count)).collect();
        assert_eq!(subs, vec![("FR", 2), ("GB", 1)]);
        assert!((t.subsidiaries[0].pct - 200.0 / 3.0).abs() < 1e-12);
        assert_eq!(t.shareholders.len(), 1);
        assert_eq!((t.shareholders[0].code.as_str(), t.shareholders[0].pct), ("JP", 100.0));
        assert_eq!(chain_tables(&view, &rep.rows, Role::Conduit, "NL", None), ChainTable::default());
    }

    #[test]
    fn bowtie_regions_of_key_firms() {
        // toy MNC whose headquarters is owned by a 2-cycle core, plus an isolated pair
        let base = toy_m1();
        let mut nodes: Vec<NodeRecord> = base.nodes().to_vec();
        for id in ["c1", "c2", "i1", "i2"] {
            nodes.push(NodeRecord::new(id, "US"));
        }
        let mut edges: Vec<OwnershipEdge> = base
            .edges()
            .map(|(u, v, p)| OwnershipEdge {
                subsidiary: base.node(u).node_id.clone(),
                shareholder: base.node(v).node_id.clone(),
                pct: p,
            })
            .collect();
        for (s, h) in [("HQ", "c1"), ("c1", "c2"), ("c2", "c1"), ("i1", "i2")] {
            edges.push(OwnershipEdge {
                subsidiary: s.into(),
                shareholder: h.into(),
                pct: 50.0,
            });
        }
        let g = OwnershipGraph::build(nodes, &edges).unwrap();
        let view = g.substantial_view(10.0).unwrap();
        let hqs = [hq("HQ", "M1")];
        let rep = classify_all(&view, &hqs, DegreeMode::Induced);
        let bt = bowtie_decompose(&g).unwrap();
        let c = Corpus::new(&g, &rep.rows, &hqs);
        let t = tally_by_bowtie(&c, &bt);
        assert_eq!(t[&Dimension::Holding][&Region::In], 1);
        assert_eq!(t[&Dimension::Hc][&Region::In], 1);
        assert_eq!(t[&Dimension::Hq][&Region::In], 1);
        assert_eq!(t[&Dimension::Affiliates].values().sum::<usize>(), 8);
        assert_eq!(bt.region[g.lookup("i1").unwrap() as usize], Region::Rest);
    }

    #[test]
    fn tally_csv_round_trip() {
        let rows = ranked(BTreeMap::from([("NL".to_string(), 2), ("GB".to_string(), 1)]));
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        write_tally(&p, &rows).unwrap();
        let back = load_tally(&p).unwrap();
        assert_eq!(back, rows);
        let p2 = dir.path().join("t2.csv");
        write_tally(&p2, &back).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(&p2).unwrap());
    }
}
