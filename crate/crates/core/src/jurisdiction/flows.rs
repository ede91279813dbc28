//! Cross-border capital flows per jurisdiction and the sink and conduit
//! jurisdiction centralities built on them.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};

use super::profiles::{gdp, total_gdp, Profiles};
use crate::error::{Error, Result};
use crate::graph::{Adjacency, Jurisdiction, NodeIx, SubstantialView};

pub const SINK_THRESHOLD: f64 = 10.0;
pub const CONDUIT_THRESHOLD: f64 = 1.0;

/// Per-link values used instead of link counts.
#[derive(Debug, Clone, Default)]
pub struct EdgeValues(HashMap<(NodeIx, NodeIx), f64>);

impl EdgeValues {
    pub fn get(&self, u: NodeIx, v: NodeIx) -> f64 {
        self.0.get(&(u, v)).copied().unwrap_or(0.0)
    }

    pub fn insert(&mut self, u: NodeIx, v: NodeIx, value: f64) {
        self.0.insert((u, v), value);
    }

    /// Reads `subsidiary_id,shareholder_id,value`; unknown ids are an error.
    pub fn load(path: impl AsRef<Path>, view: &SubstantialView<'_>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
        let g = view.graph();
        let mut out = EdgeValues::default();
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line());
            if rec.len() != 3 {
                return Err(Error::Malformed {
                    path: path.to_path_buf(),
                    line,
                    message: "expected subsidiary_id,shareholder_id,value".into(),
                });
            }
            let u = g.lookup(&rec[0]).ok_or_else(|| Error::UnknownNode(rec[0].to_string()))?;
            let v = g.lookup(&rec[1]).ok_or_else(|| Error::UnknownNode(rec[1].to_string()))?;
            let value: f64 = rec[2].parse().ok().filter(|x: &f64| *x >= 0.0).ok_or_else(|| Error::Malformed {
                path: path.to_path_buf(),
                line,
                message: format!("invalid value `{}`", &rec[2]),
            })?;
            out.insert(u, v, value);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FlowAggregate {
    pub v_in: BTreeMap<Jurisdiction, f64>,
    pub v_out: BTreeMap<Jurisdiction, f64>,
    pub v_pass: BTreeMap<Jurisdiction, f64>,
}

impl FlowAggregate {
    pub fn codes(&self) -> BTreeSet<Jurisdiction> {
        self.v_in.keys().chain(self.v_out.keys()).chain(self.v_pass.keys()).cloned().collect()
    }

    fn get(map: &BTreeMap<Jurisdiction, f64>, j: &Jurisdiction) -> f64 {
        map.get(j).copied().unwrap_or(0.0)
    }

    pub fn total_in(&self) -> f64 {
        self.v_in.values().sum()
    }

    pub fn total_pass(&self) -> f64 {
        self.v_pass.values().sum()
    }
}

fn weight(values: Option<&EdgeValues>, u: NodeIx, v: NodeIx) -> f64 {
    values.map_or(1.0, |vals| vals.get(u, v))
}

/// V_in and V_out from substantial links whose endpoints lie in different
/// jurisdictions. Capital leaves the subsidiary's jurisdiction and enters the
/// shareholder's. The `n.a.` bucket counts as one jurisdiction here.
pub fn border_flows(view: &SubstantialView<'_>, values: Option<&EdgeValues>) -> FlowAggregate {
    let g = view.graph();
    let mut agg = FlowAggregate::default();
    for (u, v, _) in view.edges() {
        let (ju, jv) = (g.jurisdiction(u), g.jurisdiction(v));
        if ju != jv {
            let w = weight(values, u, v);
            *agg.v_out.entry(ju.clone()).or_default() += w;
            *agg.v_in.entry(jv.clone()).or_default() += w;
        }
    }
    agg
}

/// V_pass: for every two-link path x → y → z with j(x) ≠ j(y) ≠ j(z) and z in a
/// sink jurisdiction, y's jurisdiction accrues one unit (or the smaller of the
/// two link values).
pub fn pass_through(view: &SubstantialView<'_>, values: Option<&EdgeValues>, sinks: &BTreeSet<Jurisdiction>) -> BTreeMap<Jurisdiction, f64> {
    let g = view.graph();
    let mut out = BTreeMap::new();
    for y in 0..view.node_count() as NodeIx {
        let jy = g.jurisdiction(y);
        let exits: Vec<NodeIx> = view
            .successors(y)
            .filter(|&z| g.jurisdiction(z) != jy && sinks.contains(g.jurisdiction(z)))
            .collect();
        if exits.is_empty() {
            continue;
        }
        let mut acc = 0.0;
        for x in view.predecessors(y).filter(|&x| g.jurisdiction(x) != jy) {
            match values {
                None => acc += exits.len() as f64,
                Some(vals) => {
                    let w_in = vals.get(x, y);
                    acc += exits.iter().map(|&z| w_in.min(vals.get(y, z))).sum::<f64>();
                }
            }
        }
        if acc > 0.0 {
            *out.entry(jy.clone()).or_insert(0.0) += acc;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityRow {
    pub code: Jurisdiction,
    pub value: f64,
    pub flagged: bool,
}

fn evaluate(
    codes: BTreeSet<Jurisdiction>,
    profiles: &Profiles,
    what: &str,
    threshold: f64,
    share: impl Fn(&Jurisdiction) -> f64,
) -> Vec<CentralityRow> {
    let sum_gdp = total_gdp(profiles);
    let mut rows = Vec::new();
    for code in codes {
        let Some(g) = gdp(profiles, &code) else {
            warn!("{what} centrality: no GDP for {code}, skipped");
            continue;
        };
        let value = share(&code) * (sum_gdp / g);
        rows.push(CentralityRow {
            flagged: value > threshold,
            code,
            value,
        });
    }
    rows
}

/// S_j = ((V_in − V_out)/Σ V_in) · (Σ GDP/GDP_j); flagged as a sink above 10.
pub fn sink_centrality(flows: &FlowAggregate, profiles: &Profiles) -> Result<Vec<CentralityRow>> {
    let total = flows.total_in();
    if !(total > 0.0) {
        return Err(Error::InvalidParameter("no inbound cross-border flow".into()));
    }
    let mut codes = flows.codes();
    codes.extend(profiles.values().filter(|p| p.gdp.is_some()).map(|p| p.code.clone()));
    Ok(evaluate(codes, profiles, "sink", SINK_THRESHOLD, |j| {
        (FlowAggregate::get(&flows.v_in, j) - FlowAggregate::get(&flows.v_out, j)) / total
    }))
}

/// C_j = (V_pass/Σ V_pass) · (Σ GDP/GDP_j); flagged as a conduit above 1.
pub fn conduit_outward_centrality(flows: &FlowAggregate, profiles: &Profiles) -> Result<Vec<CentralityRow>> {
    let total = flows.total_pass();
    if !(total > 0.0) {
        return Err(Error::InvalidParameter("no pass-through flow".into()));
    }
    let mut codes = flows.codes();
    codes.extend(profiles.values().filter(|p| p.gdp.is_some()).map(|p| p.code.clone()));
    Ok(evaluate(codes, profiles, "conduit", CONDUIT_THRESHOLD, |j| {
        FlowAggregate::get(&flows.v_pass, j) / total
    }))
}

/// Border flows, sink centrality, then pass-through flows towards the flagged sinks.
pub fn jurisdiction_flows(
    view: &SubstantialView<'_>,
    values: Option<&EdgeValues>,
    profiles: &Profiles,
) -> Result<(FlowAggregate, Vec<CentralityRow>)> {
    let mut flows = border_flows(view, values);
    let sink = sink_centrality(&flows, profiles)?;
    let sinks: BTreeSet<Jurisdiction> = sink.iter().filter(|r| r.flagged).map(|r| r.code.clone()).collect();
    flows.v_pass = pass_through(view, values, &sinks);
    Ok((flows, sink))
}

#[cfg(test)]
mod tests {
    use super::super::profiles::JurisdictionProfile;
    use super::*;
    use crate::graph::{NodeRecord, OwnershipEdge, OwnershipGraph};

    fn j(code: &str) -> Jurisdiction {
        Jurisdiction::parse(code).unwrap()
    }

    fn profiles(gdps: &[(&str, f64)]) -> Profiles {
        gdps.iter()
            .map(|&(c, g)| {
                (
                    j(c),
                    JurisdictionProfile {
                        code: j(c),
                        gdp: Some(g),
                        gdp_year: None,
                        statutory_rate: None,
                        wtc: None,
                    },
                )
            })
            .collect()
    }

    fn flows(v: &[(&str, f64, f64, f64)]) -> FlowAggregate {
        let mut f = FlowAggregate::default();
        for &(c, vin, vout, vpass) in v {
            f.v_in.insert(j(c), vin);
            f.v_out.insert(j(c), vout);
            f.v_pass.insert(j(c), vpass);
        }
        f
    }

    fn values(rows: &[CentralityRow]) -> Vec<f64> {
        rows.iter().map(|r| r.value).collect()
    }

    #[test]
    fn sink_example() {
        let s = sink_centrality(&flows(&[("AA", 80.0, 20.0, 0.0), ("BB", 20.0, 80.0, 0.0)]), &profiles(&[("AA", 1.0), ("BB", 9.0)])).unwrap();
        assert!((s[0].value - 6.0).abs() < 1e-12);
        assert!((s[1].value + 2.0 / 3.0).abs() < 1e-12);
        assert!(!s[0].flagged);

        let s = sink_centrality(&flows(&[("AA", 5.0, 5.0, 0.0), ("BB", 3.0, 3.0, 0.0)]), &profiles(&[("AA", 1.0), ("BB", 9.0)])).unwrap();
        assert_eq!(values(&s), vec![0.0, 0.0]);

        let s = sink_centrality(&flows(&[("AA", 100.0, 1.0, 0.0), ("BB", 0.0, 99.0, 0.0)]), &profiles(&[("AA", 1.0), ("BB", 99.0)])).unwrap();
        assert!((s[0].value - 99.0).abs() < 1e-9 && s[0].flagged);
    }

    #[test]
    fn conduit_example() {
        let p = profiles(&[("AA", 1.0), ("BB", 9.0)]);
        let c = conduit_outward_centrality(&flows(&[("AA", 0.0, 0.0, 30.0), ("BB", 0.0, 0.0, 70.0)]), &p).unwrap();
        assert!((c[0].value - 3.0).abs() < 1e-12 && c[0].flagged);
        assert!((c[1].value - 7.0 / 9.0).abs() < 1e-12 && !c[1].flagged);

        let c = conduit_outward_centrality(&flows(&[("AA", 0.0, 0.0, 10.0), ("BB", 0.0, 0.0, 90.0)]), &p).unwrap();
        assert!(c.iter().all(|r| (r.value - 1.0).abs() < 1e-12 && !r.flagged));

        let c = conduit_outward_centrality(&flows(&[("AA", 0.0, 0.0, 0.0), ("BB", 0.0, 0.0, 5.0)]), &p).unwrap();
        assert_eq!(c[0].value, 0.0);
    }

    #[test]
    fn missing_gdp_is_skipped() {
        let s = sink_centrality(&flows(&[("AA", 80.0, 20.0, 0.0), ("CC", 20.0, 80.0, 0.0)]), &profiles(&[("AA", 1.0)])).unwrap();
        assert_eq!(s.len(), 1);
        assert!(sink_centrality(&FlowAggregate::default(), &profiles(&[])).is_err());
    }

    #[test]
    fn centralities_are_scale_free_in_v() {
        let p = profiles(&[("AA", 2.0), ("BB", 5.0), ("CC", 3.0)]);
        let f = flows(&[("AA", 10.0, 4.0, 3.0), ("BB", 7.0, 9.0, 1.0), ("CC", 1.0, 5.0, 6.0)]);
        let mut g = f.clone();
        for m in [&mut g.v_in, &mut g.v_out, &mut g.v_pass] {
            m.values_mut().for_each(|x| *x *= 37.5);
        }
        for (a, b) in values(&sink_centrality(&f, &p).unwrap()).iter().zip(values(&sink_centrality(&g, &p).unwrap())) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in values(&conduit_outward_centrality(&f, &p).unwrap())
            .iter()
            .zip(values(&conduit_outward_centrality(&g, &p).unwrap()))
        {
            assert!((a - b).abs() < 1e-12);
        }
    }

    /// x(FR) → y(NL) → z(BM), plus a domestic link and a weak link.
    fn chain() -> OwnershipGraph {
        let nodes = [("x", "FR"), ("y", "NL"), ("z", "BM"), ("w", "NL")]
            .iter()
            .map(|(id, c)| NodeRecord::new(*id, c))
            .collect();
        let e = |s: &str, h: &str, pct: f64| OwnershipEdge {
            subsidiary: s.into(),
            shareholder: h.into(),
            pct,
        };
        OwnershipGraph::build(nodes, &[e("x", "y", 50.0), e("y", "z", 100.0), e("w", "y", 60.0), e("x", "z", 5.0)]).unwrap()
    }

    #[test]
    fn link_count_flows_and_pass_through() {
        let g = chain();
        let view = g.substantial_view(10.0).unwrap();
        let f = border_flows(&view, None);
        assert_eq!(f.v_out, BTreeMap::from([(j("FR"), 1.0), (j("NL"), 1.0)]));
        assert_eq!(f.v_in, BTreeMap::from([(j("BM"), 1.0), (j("NL"), 1.0)]));
        let sinks = BTreeSet::from([j("BM")]);
        assert_eq!(pass_through(&view, None, &sinks), BTreeMap::from([(j("NL"), 1.0)]));
        assert!(pass_through(&view, None, &BTreeSet::new()).is_empty());

        let mut vals = EdgeValues::default();
        vals.insert(0, 1, 40.0);
        vals.insert(1, 2, 25.0);
        assert_eq!(pass_through(&view, Some(&vals), &sinks), BTreeMap::from([(j("NL"), 25.0)]));
        assert_eq!(border_flows(&view, Some(&vals)).v_in[&j("BM")], 25.0);
    }
}
