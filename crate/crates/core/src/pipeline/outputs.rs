//! Writers for every stage artifact. The CLI subcommands call these directly.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::community::{community_size_histogram, fit_size_exponent, Partition};
use crate::components::{
    component_size_histogram, distance_distribution, weak_components, BowTie, DistanceDirection, DistanceHistogram,
};
use crate::error::{Error, Result};
use crate::graph::{OwnershipGraph, SubstantialView};
use crate::jurisdiction::{
    chain_keys, chain_tables, conduit_outward_centrality, hq_tables, jurisdiction_flows, ols_regression,
    regression_inputs, tally_by_bowtie, tally_by_jurisdiction, write_bowtie_tally, write_chain, write_hq_tables,
    write_tally, CentralityRow, Corpus, Dimension, EdgeValues, FlowAggregate, Profiles,
};
use crate::keyfirms::{ClassifyReport, KeyFirmRow};
use crate::mnc::{extract_mnc_with, file_stem, write_subtree, DegreeMode, HqEntry};
use crate::netstats::{
    clustering_by_degree, degree_histogram, degree_sequence, fit_power_law, knn_by_degree, DegreeDirection, LogBin,
    StatCurve, XMinStrategy,
};

pub(crate) type CsvOut = csv::Writer<BufWriter<File>>;

pub(crate) fn create_csv(path: &Path) -> Result<CsvOut> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

pub(crate) fn finish(mut w: CsvOut, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    let text = serde_json::to_string_pretty(value)? + "\n";
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// `node_id,region` for every node; nodes outside the GWCC read `REST`.
pub fn write_bowtie(path: &Path, g: &OwnershipGraph, bt: &BowTie) -> Result<()> {
    let mut w = create_csv(path)?;
    w.write_record(["node_id", "region"])?;
    for (n, r) in g.nodes().iter().zip(&bt.region) {
        w.write_record([n.node_id.as_str(), r.label()])?;
    }
    finish(w, path)
}

/// `component,count,ratio` for the four bow-tie regions plus the GWCC total.
pub fn write_bowtie_summary(path: &Path, bt: &BowTie) -> Result<()> {
    let mut w = create_csv(path)?;
    w.write_record(["component", "count", "ratio"])?;
    for (r, count, ratio) in bt.table() {
        w.write_record([r.label(), &count.to_string(), &ratio])?;
    }
    w.write_record(["GWCC", &bt.gwcc_size.to_string(), if bt.gwcc_size > 0 { "100.000" } else { "0.000" }])?;
    finish(w, path)
}

pub fn write_distances(path: &Path, h: &DistanceHistogram) -> Result<()> {
    let mut w = create_csv(path)?;
    w.write_record(["distance", "count", "ratio"])?;
    for (d, c, ratio) in h.rows() {
        w.write_record([d.to_string(), c.to_string(), ratio])?;
    }
    finish(w, path)
}

/// Bow-tie, its summary, both distance tables and the component-size
/// distribution of everything outside the GWCC.
pub fn write_bowtie_stage(dir: &Path, g: &OwnershipGraph, bt: &BowTie) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let p = dir.join("bowtie.csv");
    write_bowtie(&p, g, bt)?;
    out.push(p);
    let p = dir.join("bowtie_summary.csv");
    write_bowtie_summary(&p, bt)?;
    out.push(p);
    for (dir_flag, name) in [(DistanceDirection::InToGscc, "distances_in.csv"), (DistanceDirection::GsccToOut, "distances_out.csv")] {
        let h = distance_distribution(g, bt, dir_flag)?;
        let p = dir.join(name);
        write_distances(&p, &h)?;
        out.push(p);
    }
    let weak = weak_components(g);
    let sizes = component_size_histogram(&weak, true);
    let p = dir.join("component_sizes.csv");
    let mut w = create_csv(&p)?;
    w.write_record(["size", "count"])?;
    for (s, c) in &sizes {
        w.write_record([s.to_string(), c.to_string()])?;
    }
    finish(w, &p)?;
    out.push(p);
    Ok(out)
}

fn write_bins(path: &Path, bins: &[LogBin]) -> Result<()> {
    let mut w = create_csv(path)?;
    w.write_record(["lo", "hi", "count", "density"])?;
    for b in bins {
        w.write_record([b.lo.to_string(), b.hi.to_string(), b.count.to_string(), b.density.to_string()])?;
    }
    finish(w, path)
}

fn write_curve(path: &Path, c: &StatCurve) -> Result<()> {
    let mut w = create_csv(path)?;
    w.write_record(["k", "mean", "count"])?;
    for (k, p) in &c.points {
        w.write_record([k.to_string(), p.mean.to_string(), p.count.to_string()])?;
    }
    finish(w, path)
}

fn fit_entry(samples: &[usize], slope: Option<f64>) -> Value {
    let s: Vec<u64> = samples.iter().filter(|&&k| k > 0).map(|&k| k as u64).collect();
    let mut v = match fit_power_law(&s, XMinStrategy::default()) {
        Ok(f) => json!({ "gamma": f.gamma, "x_min": f.x_min, "n": f.n, "log_likelihood": f.log_likelihood, "ks": f.ks }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    v["binned_slope"] = json!(slope);
    v
}

/// `pk_in.csv`, `pk_out.csv`, `ck.csv`, `knn.csv` and `fits.json`.
pub fn write_stats(dir: &Path, g: &OwnershipGraph, bin_ratio: f64) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let mut fits = serde_json::Map::new();
    for (direction, name, key) in [(DegreeDirection::In, "pk_in.csv", "in"), (DegreeDirection::Out, "pk_out.csv", "out")] {
        let h = degree_histogram(g, direction, bin_ratio)?;
        let p = dir.join(name);
        write_bins(&p, &h.bins)?;
        out.push(p);
        fits.insert(key.into(), fit_entry(&degree_sequence(g, direction), h.binned_exponent()));
    }
    let p = dir.join("ck.csv");
    write_curve(&p, &clustering_by_degree(g))?;
    out.push(p);
    let p = dir.join("knn.csv");
    write_curve(&p, &knn_by_degree(g))?;
    out.push(p);
    let p = dir.join("fits.json");
    write_json(&p, &Value::Object(fits))?;
    out.push(p);
    Ok(out)
}

/// `node_id,community_id` to `labels_path`; `dsizes.csv` (`size,count,density`),
/// `dsizes_binned.csv` and `communities.json` into `dir`.
pub fn write_communities(labels_path: &Path, dir: &Path, g: &OwnershipGraph, partition: &Partition, bin_ratio: f64) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let p = labels_path.to_path_buf();
    let mut w = create_csv(&p)?;
    w.write_record(["node_id", "community_id"])?;
    for (n, l) in g.nodes().iter().zip(&partition.labels) {
        w.write_record([n.node_id.as_str(), &l.to_string()])?;
    }
    finish(w, &p)?;
    out.push(p);

    let hist = community_size_histogram(partition, bin_ratio)?;
    let total: usize = hist.counts.values().sum();
    let p = dir.join("dsizes.csv");
    let mut w = create_csv(&p)?;
    w.write_record(["size", "count", "density"])?;
    for (s, c) in &hist.counts {
        w.write_record([s.to_string(), c.to_string(), (*c as f64 / total as f64).to_string()])?;
    }
    finish(w, &p)?;
    out.push(p);
    let p = dir.join("dsizes_binned.csv");
    write_bins(&p, &hist.bins)?;
    out.push(p);

    let fit = match fit_size_exponent(&partition.sizes(), XMinStrategy::default()) {
        Ok(f) => json!({ "gamma": f.gamma, "x_min": f.x_min, "n": f.n }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let p = dir.join("communities.json");
    write_json(
        &p,
        &json!({
            "modules": partition.module_count(),
            "codelength": partition.codelength,
            "one_module_codelength": partition.one_module_codelength,
            "size_fit": fit,
        }),
    )?;
    out.push(p);
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtractSummary {
    pub mnc: String,
    pub hq_node_id: String,
    pub file: Option<String>,
    pub affiliates: usize,
    pub max_layer: u32,
    pub error: Option<String>,
}

/// One `mnc/<name>.csv` per headquarters plus `extract.json`. MNCs that cannot
/// be extracted are listed with their error and do not stop the others.
pub fn write_extract(dir: &Path, view: &SubstantialView<'_>, hqs: &[HqEntry], mode: DegreeMode) -> Result<Vec<PathBuf>> {
    let mnc_dir = dir.join("mnc");
    fs::create_dir_all(&mnc_dir).map_err(|e| Error::io(&mnc_dir, e))?;
    let mut out = Vec::new();
    let mut summary = Vec::new();
    let mut stems: BTreeMap<String, usize> = BTreeMap::new();
    for h in hqs {
        let mut entry = ExtractSummary {
            mnc: h.mnc_name.clone(),
            hq_node_id: h.hq_node_id.clone(),
            file: None,
            affiliates: 0,
            max_layer: 0,
            error: None,
        };
        let extracted = view
            .graph()
            .lookup(&h.hq_node_id)
            .ok_or_else(|| Error::UnknownNode(h.hq_node_id.clone()))
            .and_then(|u| extract_mnc_with(view, u, mode));
        match extracted {
            Ok(s) => {
                // distinct names can share a file stem
                let stem = file_stem(&h.mnc_name);
                let seen = stems.entry(stem.clone()).or_insert(0);
                *seen += 1;
                let name = if *seen == 1 { stem } else { format!("{stem}_{seen}") };
                let p = write_subtree(&mnc_dir, &name, &s, view)?;
                entry.file = Some(format!("mnc/{name}.csv"));
                entry.affiliates = s.len();
                entry.max_layer = s.layers.iter().copied().max().unwrap_or(0);
                out.push(p);
            }
            Err(e) => {
                log::warn!("extract `{}`: {e}", h.mnc_name);
                entry.error = Some(e.to_string());
            }
        }
        summary.push(entry);
    }
    let p = dir.join("extract.json");
    write_json(&p, &summary)?;
    out.push(p);
    Ok(out)
}

/// `mnc,hq_node_id,affiliates,holding,hc,conduit` per MNC, then failures.
pub fn write_identify_summary(path: &Path, report: &ClassifyReport) -> Result<()> {
    let mut w = create_csv(path)?;
    w.write_record(["mnc", "hq_node_id", "affiliates", "holding", "hc", "conduit", "error"])?;
    for m in &report.mncs {
        w.write_record([
            m.mnc.as_str(),
            m.hq_node_id.as_str(),
            &m.affiliates.to_string(),
            &m.tally.holding.to_string(),
            &m.tally.hc.to_string(),
            &m.tally.conduit.to_string(),
            "",
        ])?;
    }
    for (name, err) in &report.failures {
        w.write_record([name.as_str(), "", "0", "0", "0", "0", err.as_str()])?;
    }
    finish(w, path)
}

fn write_centrality(path: &Path, rows: &[CentralityRow]) -> Result<()> {
    let mut w = create_csv(path)?;
    w.write_record(["code", "value", "flagged"])?;
    for r in rows {
        w.write_record([r.code.as_str(), &r.value.to_string(), if r.flagged { "1" } else { "0" }])?;
    }
    finish(w, path)
}

fn write_flows(path: &Path, f: &FlowAggregate) -> Result<()> {
    let mut w = create_csv(path)?;
    w.write_record(["code", "v_in", "v_out", "v_pass"])?;
    for code in f.codes() {
        let get = |m: &BTreeMap<_, f64>| m.get(&code).copied().unwrap_or(0.0).to_string();
        w.write_record([code.as_str().to_string(), get(&f.v_in), get(&f.v_out), get(&f.v_pass)])?;
    }
    finish(w, path)
}

/// Inputs of the jurisdiction reports.
pub struct JurisdictionInputs<'a> {
    pub view: &'a SubstantialView<'a>,
    pub rows: &'a [KeyFirmRow],
    pub hqs: &'a [HqEntry],
    pub profiles: &'a Profiles,
    pub values: Option<&'a EdgeValues>,
    pub bowtie: Option<&'a BowTie>,
    pub top_k: Option<usize>,
}

/// `flows.csv`, `sink.csv`, `conduit.csv`, `tallies/*.csv`,
/// `chains/<role>_<code>.csv`, `hq_shares.csv`, `hq_locations.csv` and
/// `regression.json` under `dir`.
pub fn write_jurisdiction_reports(dir: &Path, inp: &JurisdictionInputs<'_>) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let g = inp.view.graph();
    let (flows, sink) = jurisdiction_flows(inp.view, inp.values, inp.profiles)?;
    let p = dir.join("flows.csv");
    write_flows(&p, &flows)?;
    out.push(p);
    let p = dir.join("sink.csv");
    write_centrality(&p, &sink)?;
    out.push(p);
    let conduit = if flows.total_pass() > 0.0 {
        conduit_outward_centrality(&flows, inp.profiles)?
    } else {
        log::warn!("no pass-through flow towards sink jurisdictions; conduit table is empty");
        Vec::new()
    };
    let p = dir.join("conduit.csv");
    write_centrality(&p, &conduit)?;
    out.push(p);

    let corpus = Corpus::new(g, inp.rows, inp.hqs);
    for dim in Dimension::ALL {
        let p = dir.join("tallies").join(format!("{}.csv", dim.label()));
        write_tally(&p, &tally_by_jurisdiction(&corpus, dim))?;
        out.push(p);
    }
    if let Some(bt) = inp.bowtie {
        let p = dir.join("tallies").join("bowtie.csv");
        write_bowtie_tally(&p, &tally_by_bowtie(&corpus, bt))?;
        out.push(p);
    }
    let chain_dir = dir.join("chains");
    fs::create_dir_all(&chain_dir).map_err(|e| Error::io(&chain_dir, e))?;
    for (role, code) in chain_keys(&corpus) {
        let t = chain_tables(inp.view, inp.rows, role, &code, inp.top_k);
        let p = chain_dir.join(format!("{}_{}.csv", role.tag(), file_stem(&code)));
        write_chain(&p, &t)?;
        out.push(p);
    }
    write_hq_tables(dir, &hq_tables(&corpus, inp.top_k))?;
    out.push(dir.join("hq_shares.csv"));
    out.push(dir.join("hq_locations.csv"));

    let mut regression = serde_json::Map::new();
    for (role, (x, y)) in regression_inputs(&corpus, inp.profiles) {
        let entry = match ols_regression(&x, &y) {
            Ok(r) => serde_json::to_value(r)?,
            Err(e) => json!({ "n": x.len(), "error": e.to_string() }),
        };
        regression.insert(role.label().to_string(), entry);
    }
    let years: Vec<i32> = {
        let mut y: Vec<i32> = inp.profiles.values().filter_map(|p| p.gdp_year).collect();
        y.sort_unstable();
        y.dedup();
        y
    };
    let p = dir.join("regression.json");
    write_json(&p, &json!({ "gdp_years": years, "roles": regression }))?;
    out.push(p);
    Ok(out)
}
