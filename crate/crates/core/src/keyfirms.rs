//! Holding and conduit centralities of affiliates and the layer-by-layer
//! identification of key companies inside an MNC subtree.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeIx, OwnershipGraph, SubstantialView};
use crate::mnc::{extract_mnc_with, DegreeMode, HqEntry, MncSubtree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub enum Role {
    #[default]
    None,
    Holding,
    Conduit,
    HoldingAndConduit,
}

impl Role {
    pub const KEY: [Role; 3] = [Role::Holding, Role::HoldingAndConduit, Role::Conduit];

    pub fn label(self) -> &'static str {
        match self {
            Role::None => "None",
            Role::Holding => "Holding",
            Role::Conduit => "Conduit",
            Role::HoldingAndConduit => "HoldingAndConduit",
        }
    }

    /// Short tag used in file names.
    pub fn tag(self) -> &'static str {
        match self {
            Role::None => "none",
            Role::Holding => "holding",
            Role::Conduit => "conduit",
            Role::HoldingAndConduit => "hc",
        }
    }

    pub fn is_key(self) -> bool {
        self != Role::None
    }

    fn holds(self) -> bool {
        matches!(self, Role::Holding | Role::HoldingAndConduit)
    }

    fn conducts(self) -> bool {
        matches!(self, Role::Conduit | Role::HoldingAndConduit)
    }

    /// Least upper bound: holding and conduit together give `HoldingAndConduit`.
    pub fn join(self, other: Role) -> Role {
        match (self.holds() || other.holds(), self.conducts() || other.conducts()) {
            (true, true) => Role::HoldingAndConduit,
            (true, false) => Role::Holding,
            (false, true) => Role::Conduit,
            (false, false) => Role::None,
        }
    }

    /// 0 for none, 1 for a single role, 2 for both.
    pub fn strength(self) -> u8 {
        self.holds() as u8 + self.conducts() as u8
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "None" | "none" => Ok(Role::None),
            "Holding" | "holding" => Ok(Role::Holding),
            "Conduit" | "conduit" => Ok(Role::Conduit),
            "HoldingAndConduit" | "hc" => Ok(Role::HoldingAndConduit),
            other => Err(Error::InvalidParameter(format!("unknown role `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentralityRecord {
    pub affiliate: NodeIx,
    pub layer: u32,
    pub k_in: u32,
    pub k_out: u32,
    /// `None` when the subtree has no internal ownership (Σ k_in = 0).
    pub h: Option<f64>,
    /// Only evaluated for first-layer affiliates and subsidiaries of holding candidates.
    pub t: Option<f64>,
    pub third_country: bool,
    pub role: Role,
}

fn affiliate_name(g: Option<&OwnershipGraph>, s: &MncSubtree, p: usize) -> String {
    let u = s.affiliates[p];
    g.map_or_else(|| u.to_string(), |g| g.node(u).node_id.clone())
}

fn checked_degree(s: &MncSubtree, p: usize, g: Option<&OwnershipGraph>) -> Result<(u64, u64)> {
    let (ki, ko) = s.degrees[p];
    if ki + ko == 0 {
        return Err(Error::IsolatedAffiliate(affiliate_name(g, s, p)));
    }
    Ok((ki as u64, ko as u64))
}

/// H = ((k_in − k_out)/Σk_in) · (Σ(k_in + k_out)/(k_in + k_out)) for the affiliate at position `p`.
pub fn holding_centrality(s: &MncSubtree, p: usize) -> Result<f64> {
    let (ki, ko) = checked_degree(s, p, None)?;
    if s.sums.k_in == 0 {
        return Err(Error::DegenerateSubtree("k_in"));
    }
    // one rounding: integer numerator and denominator
    let num = (ki as i128 - ko as i128) * s.sums.total as i128;
    let den = s.sums.k_in as i128 * (ki + ko) as i128;
    Ok(num as f64 / den as f64)
}

/// T = (k_in/Σ(k_in · k_out)) · (Σ(k_in + k_out)/(k_in + k_out)).
pub fn conduit_centrality(s: &MncSubtree, p: usize) -> Result<f64> {
    let (ki, ko) = checked_degree(s, p, None)?;
    if s.sums.product == 0 {
        return Err(Error::DegenerateSubtree("k_in · k_out"));
    }
    let num = ki as u128 * s.sums.total as u128;
    let den = s.sums.product as u128 * (ki + ko) as u128;
    Ok(num as f64 / den as f64)
}

/// Outside the headquarters' jurisdiction and outside that of at least one direct subsidiary.
pub fn third_country(s: &MncSubtree, p: usize, g: &OwnershipGraph) -> bool {
    let j = g.jurisdiction(s.affiliates[p]);
    if j.same_place(g.jurisdiction(s.hq)) {
        return false;
    }
    s.children[p]
        .iter()
        .any(|&c| !j.same_place(g.jurisdiction(s.affiliates[c as usize])))
}

/// Layer-by-layer identification. First-layer affiliates with H > 0 that meet
/// the third-country condition are expanded: each direct subsidiary with T > 0
/// meeting the condition becomes a conduit and marks its parent as holding.
/// A conduit with H > 0 meeting the condition is also a holding and is expanded
/// in turn. Each affiliate is expanded at most once.
pub fn hierarchical_identify(s: &MncSubtree, g: &OwnershipGraph) -> Result<Vec<CentralityRecord>> {
    let n = s.len();
    for p in 0..n {
        checked_degree(s, p, Some(g))?;
    }
    let h: Vec<Option<f64>> = (0..n).map(|p| holding_centrality(s, p).ok()).collect();
    let t_of = |p: usize| conduit_centrality(s, p).ok();
    let tc: Vec<bool> = (0..n).map(|p| third_country(s, p, g)).collect();
    let positive = |x: Option<f64>| x.is_some_and(|v| v > 0.0);

    let mut role = vec![Role::None; n];
    let mut t = vec![None; n];
    let mut expanded = vec![false; n];
    let mut stack = Vec::new();
    for p in 0..n {
        if s.layers[p] == 1 {
            t[p] = t_of(p);
            if positive(h[p]) && tc[p] {
                stack.push(p);
            }
        }
    }
    // lowest positions first; the result does not depend on the order
    stack.reverse();
    while let Some(p) = stack.pop() {
        if std::mem::replace(&mut expanded[p], true) {
            continue;
        }
        for &c in &s.children[p] {
            let c = c as usize;
            t[c] = t_of(c);
            if positive(t[c]) && tc[c] {
                role[p] = role[p].join(Role::Holding);
                role[c] = role[c].join(Role::Conduit);
                if positive(h[c]) {
                    role[c] = role[c].join(Role::Holding);
                    if !expanded[c] {
                        stack.push(c);
                    }
                }
            }
        }
    }
    Ok((0..n)
        .map(|p| CentralityRecord {
            affiliate: s.affiliates[p],
            layer: s.layers[p],
            k_in: s.degrees[p].0,
            k_out: s.degrees[p].1,
            h: h[p],
            t: t[p],
            third_country: tc[p],
            role: role[p],
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RoleTally {
    pub holding: usize,
    pub hc: usize,
    pub conduit: usize,
}

impl RoleTally {
    pub fn add(&mut self, role: Role) {
        match role {
            Role::Holding => self.holding += 1,
            Role::HoldingAndConduit => self.hc += 1,
            Role::Conduit => self.conduit += 1,
            Role::None => {}
        }
    }

    pub fn merge(&mut self, other: &RoleTally) {
        self.holding += other.holding;
        self.hc += other.hc;
        self.conduit += other.conduit;
    }

    pub fn get(&self, role: Role) -> usize {
        match role {
            Role::Holding => self.holding,
            Role::HoldingAndConduit => self.hc,
            Role::Conduit => self.conduit,
            Role::None => 0,
        }
    }
}

/// One line of `keyfirms.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyFirmRow {
    pub mnc: String,
    pub affiliate_id: String,
    pub layer: u32,
    pub k_in: u32,
    pub k_out: u32,
    pub h: Option<f64>,
    pub t: Option<f64>,
    pub third_country: bool,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MncSummary {
    pub mnc: String,
    pub hq_node_id: String,
    pub affiliates: usize,
    pub tally: RoleTally,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClassifyReport {
    pub rows: Vec<KeyFirmRow>,
    pub mncs: Vec<MncSummary>,
    pub totals: RoleTally,
    /// MNCs that could not be analysed, with the reason.
    pub failures: Vec<(String, String)>,
}

/// Extract → layers → degrees → identification for every headquarters.
/// Several headquarters under one MNC name are merged, keeping the strongest
/// role per affiliate.
pub fn classify_all(view: &SubstantialView<'_>, hqs: &[HqEntry], mode: DegreeMode) -> ClassifyReport {
    let g = view.graph();
    let results: Vec<Result<(MncSubtree, Vec<CentralityRecord>)>> = hqs
        .par_iter()
        .map(|e| {
            let hq = g.lookup(&e.hq_node_id).ok_or_else(|| Error::UnknownNode(e.hq_node_id.clone()))?;
            let s = extract_mnc_with(view, hq, mode)?;
            let recs = hierarchical_identify(&s, g)?;
            Ok((s, recs))
        })
        .collect();

    let mut report = ClassifyReport::default();
    // mnc name → (summary index, affiliate → row index)
    let mut by_name: BTreeMap<String, (usize, BTreeMap<NodeIx, usize>)> = BTreeMap::new();
    let mut grouped: Vec<Vec<(NodeIx, KeyFirmRow)>> = Vec::new();
    for (e, res) in hqs.iter().zip(results) {
        let (_, recs) = match res {
            Ok(x) => x,
            Err(err) => {
                log::warn!("MNC `{}` skipped: {err}", e.mnc_name);
                report.failures.push((e.mnc_name.clone(), err.to_string()));
                continue;
            }
        };
        let (idx, seen) = by_name.entry(e.mnc_name.clone()).or_insert_with(|| {
            report.mncs.push(MncSummary {
                mnc: e.mnc_name.clone(),
                hq_node_id: e.hq_node_id.clone(),
                affiliates: 0,
                tally: RoleTally::default(),
            });
            grouped.push(Vec::new());
            (report.mncs.len() - 1, BTreeMap::new())
        });
        let rows = &mut grouped[*idx];
        for r in recs {
            let row = KeyFirmRow {
                mnc: e.mnc_name.clone(),
                affiliate_id: g.node(r.affiliate).node_id.clone(),
                layer: r.layer,
                k_in: r.k_in,
                k_out: r.k_out,
                h: r.h,
                t: r.t,
                third_country: r.third_country,
                role: r.role,
            };
            match seen.get(&r.affiliate) {
                Some(&i) => {
                    if row.role.strength() > rows[i].1.role.strength() {
                        rows[i].1 = row;
                    }
                }
                None => {
                    seen.insert(r.affiliate, rows.len());
                    rows.push((r.affiliate, row));
                }
            }
        }
    }
    for (summary, mut rows) in report.mncs.iter_mut().zip(grouped) {
        rows.sort_by_key(|(u, r)| (r.layer, *u));
        summary.affiliates = rows.len();
        for (_, r) in &rows {
            summary.tally.add(r.role);
        }
        report.totals.merge(&summary.tally);
        report.rows.extend(rows.into_iter().map(|(_, r)| r));
    }
    report
}

pub const KEYFIRM_HEADER: [&str; 9] = ["mnc", "affiliate_id", "layer", "k_in", "k_out", "H", "T", "third_country", "role"];

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_keyfirms(path: impl AsRef<Path>, rows: &[KeyFirmRow]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(KEYFIRM_HEADER)?;
    for r in rows {
        w.write_record([
            r.mnc.clone(),
            r.affiliate_id.clone(),
            r.layer.to_string(),
            r.k_in.to_string(),
            r.k_out.to_string(),
            fmt_opt(r.h),
            fmt_opt(r.t),
            r.third_country.to_string(),
            r.role.label().to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn load_keyfirms(path: impl AsRef<Path>) -> Result<Vec<KeyFirmRow>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().from_reader(file);
    if rdr.headers()?.iter().ne(KEYFIRM_HEADER) {
        return Err(Error::Malformed {
            path: path.to_path_buf(),
            line: 1,
            message: format!("expected header `{}`", KEYFIRM_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |what: &str| Error::Malformed {
            path: path.to_path_buf(),
            line,
            message: format!("invalid {what}"),
        };
        if rec.len() != KEYFIRM_HEADER.len() {
            return Err(bad("field count"));
        }
        let opt = |s: &str, what: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| bad(what))
            }
        };
        out.push(KeyFirmRow {
            mnc: rec[0].to_string(),
            affiliate_id: rec[1].to_string(),
            layer: rec[2].parse().map_err(|_| bad("layer"))?,
            k_in: rec[3].parse().map_err(|_| bad("k_in"))?,
            k_out: rec[4].parse().map_err(|_| bad("k_out"))?,
            h: opt(&rec[5], "H")?,
            t: opt(&rec[6], "T")?,
            third_country: rec[7].parse().map_err(|_| bad("third_country"))?,
            role: rec[8].parse().map_err(|_| bad("role"))?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Adjacency, NodeRecord, OwnershipEdge};
    use crate::mnc::extract_mnc;
    use crate::mnc::tests::toy_m1;
    use proptest::prelude::*;

    fn role_of(g: &OwnershipGraph, recs: &[CentralityRecord], id: &str) -> Role {
        let u = g.lookup(id).unwrap();
        recs.iter().find(|r| r.affiliate == u).unwrap().role
    }

    #[test]
    fn toy_m1_centralities() {
        let g = toy_m1();
        let view = g.substantial_view(10.0).unwrap();
        let s = extract_mnc(&view, 0).unwrap();
        let pos = |id: &str| s.position(g.lookup(id).unwrap()).unwrap();
        let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
        assert!(close(holding_centrality(&s, pos("a")).unwrap(), 7.0 / 6.0));
        assert!(close(holding_centrality(&s, pos("b")).unwrap(), 7.0 / 9.0));
        assert_eq!(holding_centrality(&s, pos("e")).unwrap(), 0.0);
        assert!(close(holding_centrality(&s, pos("h")).unwrap(), -7.0 / 3.0));
        assert!(close(conduit_centrality(&s, pos("b")).unwrap(), 14.0 / 9.0));
        assert!(close(conduit_centrality(&s, pos("e")).unwrap(), 7.0 / 6.0));
        assert_eq!(conduit_centrality(&s, pos("c")).unwrap(), 0.0);
        assert!(third_country(&s, pos("a"), &g));
        assert!(!third_country(&s, pos("c"), &g));
    }

    #[test]
    fn toy_m1_roles() {
        let g = toy_m1();
        let view = g.substantial_view(10.0).unwrap();
        let recs = hierarchical_identify(&extract_mnc(&view, 0).unwrap(), &g).unwrap();
        assert_eq!(role_of(&g, &recs, "a"), Role::Holding);
        assert_eq!(role_of(&g, &recs, "b"), Role::HoldingAndConduit);
        assert_eq!(role_of(&g, &recs, "e"), Role::Conduit);
        for id in ["c", "d", "f", "g", "h"] {
            assert_eq!(role_of(&g, &recs, id), Role::None, "{id}");
        }
        let t_a = recs.iter().find(|r| r.affiliate == g.lookup("a").unwrap()).unwrap().t;
        // first-layer T is kept as a diagnostic: (3/6)·(14/4)
        assert!((t_a.unwrap() - 1.75).abs() < 1e-12);
    }

    #[test]
    fn single_jurisdiction_mnc_has_no_key_firms() {
        let g = toy_m1();
        let nodes: Vec<NodeRecord> = g.nodes().iter().map(|n| NodeRecord::new(n.node_id.clone(), "JP")).collect();
        let edges: Vec<OwnershipEdge> = g
            .edges()
            .map(|(u, v, p)| OwnershipEdge {
                subsidiary: g.node(u).node_id.clone(),
                shareholder: g.node(v).node_id.clone(),
                pct: p,
            })
            .collect();
        let g = OwnershipGraph::build(nodes, &edges).unwrap();
        let view = g.substantial_view(10.0).unwrap();
        let recs = hierarchical_identify(&extract_mnc(&view, 0).unwrap(), &g).unwrap();
        assert!(recs.iter().all(|r| r.role == Role::None));
    }

    #[test]
    fn degenerate_sums_are_signalled() {
        let g = OwnershipGraph::from_pairs(3, &[(1, 0), (2, 0)]);
        let view = g.substantial_view(10.0).unwrap();
        let s = extract_mnc(&view, 0).unwrap();
        assert!(matches!(holding_centrality(&s, 0), Err(Error::DegenerateSubtree(_))));
        assert!(matches!(conduit_centrality(&s, 0), Err(Error::DegenerateSubtree(_))));
        let recs = hierarchical_identify(&s, &g).unwrap();
        assert!(recs.iter().all(|r| r.h.is_none() && r.role == Role::None));
    }

    #[test]
    fn role_lattice() {
        assert_eq!(Role::Holding.join(Role::Conduit), Role::HoldingAndConduit);
        assert_eq!(Role::None.join(Role::Conduit), Role::Conduit);
        assert_eq!(Role::HoldingAndConduit.join(Role::None), Role::HoldingAndConduit);
        for r in [Role::None, Role::Holding, Role::Conduit, Role::HoldingAndConduit] {
            assert_eq!(r.label().parse::<Role>().unwrap(), r);
        }
    }

    /// Two disjoint copies of the toy MNC with ids suffixed `1` and `2`.
    fn twin_toy() -> (OwnershipGraph, Vec<HqEntry>) {
        let g = toy_m1();
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        for k in 1..=2 {
            for n in g.nodes() {
                let mut r = n.clone();
                r.node_id = format!("{}{k}", n.node_id);
                nodes.push(r);
            }
            for (u, v, p) in g.edges() {
                edges.push(OwnershipEdge {
                    subsidiary: format!("{}{k}", g.node(u).node_id),
                    shareholder: format!("{}{k}", g.node(v).node_id),
                    pct: p,
                });
            }
        }
        let hqs = (1..=2)
            .map(|k| HqEntry {
                hq_node_id: format!("HQ{k}"),
                mnc_name: format!("M{k}"),
            })
            .collect();
        (OwnershipGraph::build(nodes, &edges).unwrap(), hqs)
    }

    #[test]
    fn disjoint_copies_double_the_tallies() {
        let (g, hqs) = twin_toy();
        let view = g.substantial_view(10.0).unwrap();
        let rep = classify_all(&view, &hqs, DegreeMode::Induced);
        assert_eq!(
            rep.totals,
            RoleTally {
                holding: 2,
                hc: 2,
                conduit: 2
            }
        );
        assert_eq!(rep.rows.len(), 16);
        assert!(classify_all(&view, &[], DegreeMode::Induced).rows.is_empty());
    }

    #[test]
    fn unknown_hq_is_reported_and_run_continues() {
        let (g, mut hqs) = twin_toy();
        hqs.insert(
            0,
            HqEntry {
                hq_node_id: "missing".into(),
                mnc_name: "Ghost".into(),
            },
        );
        let view = g.substantial_view(10.0).unwrap();
        let rep = classify_all(&view, &hqs, DegreeMode::Induced);
        assert_eq!(rep.failures.len(), 1);
        assert_eq!(rep.mncs.len(), 2);
    }

    #[test]
    fn keyfirm_csv_round_trip() {
        let (g, hqs) = twin_toy();
        let view = g.substantial_view(10.0).unwrap();
        let rep = classify_all(&view, &hqs, DegreeMode::Induced);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("keyfirms.csv");
        write_keyfirms(&p, &rep.rows).unwrap();
        let back = load_keyfirms(&p).unwrap();
        assert_eq!(back, rep.rows);
        let p2 = dir.path().join("again.csv");
        write_keyfirms(&p2, &back).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(&p2).unwrap());
    }

    /// Random subtree: each node after the HQ picks one to three shareholders among earlier nodes.
    fn random_tree(n: usize, picks: &[(usize, usize, usize)], jur: &[u8]) -> OwnershipGraph {
        let codes = ["US", "NL", "GB", "LU"];
        let nodes = (0..n).map(|i| NodeRecord::new(format!("v{i}"), codes[jur[i] as usize % 4])).collect();
        let mut edges = Vec::new();
        for i in 1..n {
            let (a, b, c) = picks[i];
            for (k, x) in [a, b, c].into_iter().enumerate() {
                if k == 0 || x % 3 == 0 {
                    edges.push(OwnershipEdge {
                        subsidiary: format!("v{i}"),
                        shareholder: format!("v{}", x % i),
                        pct: 50.0,
                    });
                }
            }
        }
        OwnershipGraph::build(nodes, &edges).unwrap()
    }

    fn tree_strategy() -> impl Strategy<Value = OwnershipGraph> {
        (2usize..60).prop_flat_map(|n| {
            (
                proptest::collection::vec((0usize..1000, 0usize..1000, 0usize..1000), n),
                proptest::collection::vec(0u8..4, n),
            )
                .prop_map(move |(p, j)| random_tree(n, &p, &j))
        })
    }

    proptest! {
        #[test]
        fn sign_of_h_follows_degree_difference(g in tree_strategy()) {
            let view = g.substantial_view(10.0).unwrap();
            let s = extract_mnc(&view, 0).unwrap();
            for p in 0..s.len() {
                let (ki, ko) = s.degrees[p];
                if let Ok(h) = holding_centrality(&s, p) {
                    prop_assert_eq!(h > 0.0, ki > ko);
                    prop_assert_eq!(h == 0.0, ki == ko);
                }
                if let Ok(t) = conduit_centrality(&s, p) {
                    prop_assert!(t >= 0.0);
                    prop_assert_eq!(t == 0.0, ki == 0);
                }
            }
        }

        #[test]
        fn identification_ignores_adjacency_order(g in tree_strategy(), seed in 0u64..1000) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut order: Vec<usize> = (0..g.node_count()).collect();
            order[1..].shuffle(&mut rng);
            let nodes: Vec<NodeRecord> = order.iter().map(|&i| g.node(i as NodeIx).clone()).collect();
            let mut edges: Vec<OwnershipEdge> = g.edges().map(|(u, v, p)| OwnershipEdge {
                subsidiary: g.node(u).node_id.clone(),
                shareholder: g.node(v).node_id.clone(),
                pct: p,
            }).collect();
            edges.shuffle(&mut rng);
            let g2 = OwnershipGraph::build(nodes, &edges).unwrap();

            let roles = |g: &OwnershipGraph| -> BTreeMap<String, Role> {
                let view = g.substantial_view(10.0).unwrap();
                let s = extract_mnc(&view, 0).unwrap();
                hierarchical_identify(&s, g).unwrap().into_iter()
                    .map(|r| (g.node(r.affiliate).node_id.clone(), r.role)).collect()
            };
            prop_assert_eq!(roles(&g), roles(&g2));
        }

        #[test]
        fn key_firms_are_third_country_and_conduits_have_holding_parents(g in tree_strategy()) {
            let view = g.substantial_view(10.0).unwrap();
            let s = extract_mnc(&view, 0).unwrap();
            let recs = hierarchical_identify(&s, &g).unwrap();
            for (p, r) in recs.iter().enumerate() {
                if r.role.is_key() {
                    prop_assert!(r.third_country);
                }
                if r.role.conducts() {
                    let has_parent = (0..s.len()).any(|q| s.children[q].contains(&(p as u32)) && recs[q].role.holds());
                    prop_assert!(has_parent);
                }
            }
        }
    }
}
