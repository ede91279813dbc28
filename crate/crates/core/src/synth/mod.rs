//! Seeded synthetic corpora: a scale-free background graph, a strongly
//! connected core, and planted MNCs whose key-firm roles are known in advance.
//!
//! Every planted headquarters is owned by a core node, so the whole MNC sits
//! upstream of the core. The core is made larger than any other strongly
//! connected set and is owned by a background node, which puts every planted
//! firm in the IN region.

mod scalefree;
pub mod truth;

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::components::{strong_components, weak_components, Region};
use crate::error::{Error, Result};
use crate::graph::{Jurisdiction, NodeRecord, OwnershipEdge, OwnershipGraph, EDGE_HEADER, NODE_HEADER};
use crate::jurisdiction::{write_profiles, JurisdictionProfile, Profiles};
use crate::keyfirms::{Role, RoleTally};
use crate::mnc::{write_hqs, HqEntry};

pub use scalefree::{degree_sequence, scale_free_links};

const DEFAULT_CODES: [&str; 16] = [
    "US", "GB", "DE", "FR", "JP", "NL", "LU", "IE", "CH", "BM", "KY", "SG", "HK", "BE", "CA", "CN",
];

/// One affiliate of a template.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemplateNode {
    pub id: String,
    pub jurisdiction: String,
}

/// An MNC shape. Ids are local; they are prefixed when planted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MncTemplate {
    pub name: String,
    pub hq: TemplateNode,
    pub affiliates: Vec<TemplateNode>,
    /// `(subsidiary, shareholder)` substantial links.
    pub links: Vec<(String, String)>,
    /// Intended roles of key firms; checked against direct evaluation when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roles: Option<BTreeMap<String, Role>>,
}

impl MncTemplate {
    fn jurisdictions(&self) -> BTreeMap<String, String> {
        std::iter::once(&self.hq)
            .chain(&self.affiliates)
            .map(|n| (n.id.clone(), n.jurisdiction.clone()))
            .collect()
    }

    /// Roles by direct evaluation, failing if they contradict the intended ones.
    pub fn ground_truth(&self) -> Result<BTreeMap<String, Role>> {
        let eval = truth::evaluate(&self.hq.id, &self.jurisdictions(), &self.links);
        if let Some(intended) = &self.roles {
            for (id, &want) in intended {
                let got = eval.role.get(id).copied().unwrap_or(Role::None);
                if got != want {
                    return Err(Error::TemplateContradiction {
                        template: self.name.clone(),
                        detail: format!("`{id}` intended {want}, evaluates to {got}"),
                    });
                }
            }
            for (id, &got) in &eval.role {
                if got.is_key() && !intended.contains_key(id) {
                    return Err(Error::TemplateContradiction {
                        template: self.name.clone(),
                        detail: format!("`{id}` evaluates to {got} but no role was intended"),
                    });
                }
            }
        }
        Ok(eval.role)
    }
}

/// The worked-example MNC: HQ in JP, `a` a holding, `b` holding and conduit, `e` a conduit.
pub fn template_m1() -> MncTemplate {
    let node = |id: &str, j: &str| TemplateNode {
        id: id.into(),
        jurisdiction: j.into(),
    };
    let link = |s: &str, h: &str| (s.to_string(), h.to_string());
    MncTemplate {
        name: "M1".into(),
        hq: node("HQ", "JP"),
        affiliates: vec![
            node("a", "NL"),
            node("b", "GB"),
            node("c", "FR"),
            node("d", "FR"),
            node("e", "LU"),
            node("f", "GB"),
            node("g", "BM"),
            node("h", "US"),
        ],
        links: vec![
            link("a", "HQ"),
            link("h", "HQ"),
            link("b", "a"),
            link("c", "a"),
            link("d", "a"),
            link("e", "b"),
            link("f", "b"),
            link("g", "e"),
        ],
        roles: Some(BTreeMap::from([
            ("a".into(), Role::Holding),
            ("b".into(), Role::HoldingAndConduit),
            ("e".into(), Role::Conduit),
        ])),
    }
}

/// Parameters of randomly drawn templates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TemplatePlan {
    pub count: usize,
    pub min_affiliates: usize,
    pub max_affiliates: usize,
    /// Chance that an affiliate gets a second shareholder inside the MNC.
    pub multi_parent_rate: f64,
    /// Chance per affiliate of a link that closes a cross-shareholding cycle.
    pub cycle_rate: f64,
    /// Chance that an affiliate shares the headquarters' jurisdiction.
    pub domestic_rate: f64,
}

impl Default for TemplatePlan {
    fn default() -> Self {
        TemplatePlan {
            count: 0,
            min_affiliates: 4,
            max_affiliates: 30,
            multi_parent_rate: 0.15,
            cycle_rate: 0.05,
            domestic_rate: 0.3,
        }
    }
}

/// Draws one random template. Affiliate `i` is owned by an earlier node, so
/// every affiliate reaches the headquarters.
pub fn random_template(name: &str, plan: &TemplatePlan, codes: &[String], rng: &mut ChaCha8Rng) -> MncTemplate {
    let lo = plan.min_affiliates.max(1);
    let size = rng.random_range(lo..=plan.max_affiliates.max(lo));
    let hq_code = codes.choose(rng).expect("non-empty code list").clone();
    let ids: Vec<String> = std::iter::once("HQ".to_string()).chain((1..=size).map(|i| format!("a{i}"))).collect();
    let mut affiliates = Vec::with_capacity(size);
    let mut links: BTreeSet<(usize, usize)> = BTreeSet::new();
    for i in 1..=size {
        let jurisdiction = if rng.random_bool(plan.domestic_rate) {
            hq_code.clone()
        } else {
            codes.choose(rng).unwrap().clone()
        };
        affiliates.push(TemplateNode {
            id: ids[i].clone(),
            jurisdiction,
        });
        // bias towards recent nodes for deeper chains
        let parent = if i == 1 || rng.random_bool(0.25) { 0 } else { rng.random_range(i.saturating_sub(6).max(1)..i) };
        links.insert((i, parent));
        if i > 1 && rng.random_bool(plan.multi_parent_rate) {
            let other = rng.random_range(0..i);
            if other != parent {
                links.insert((i, other));
            }
        }
    }
    for i in 1..=size {
        if size > 1 && rng.random_bool(plan.cycle_rate) {
            // i becomes a shareholder of a later affiliate that may sit below it
            let j = rng.random_range(1..=size);
            if j != i && !links.contains(&(i, j)) {
                links.insert((j, i));
            }
        }
    }
    MncTemplate {
        name: name.to_string(),
        hq: TemplateNode {
            id: ids[0].clone(),
            jurisdiction: hq_code,
        },
        affiliates,
        links: links.into_iter().map(|(s, h)| (ids[s].clone(), ids[h].clone())).collect(),
        roles: None,
    }
}

/// Synthetic corpus description (JSON).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub seed: u64,
    /// Background nodes.
    pub nodes: usize,
    /// Background links; defaults to `nodes` (capped by what the graph can hold).
    pub edges: Option<usize>,
    pub gamma_in: f64,
    pub gamma_out: f64,
    /// Codes drawn for background nodes and random templates.
    pub jurisdictions: Vec<String>,
    /// Plant the worked-example MNC.
    pub include_m1: bool,
    pub random_mncs: TemplatePlan,
    pub templates: Vec<MncTemplate>,
    /// Fraction of planted affiliates given an extra link to a background shareholder.
    pub noise_rate: f64,
    /// Lower bound on the size of the planted core cycle.
    pub core_size: usize,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            seed: 0,
            nodes: 1000,
            edges: None,
            gamma_in: 2.44,
            gamma_out: 3.0,
            jurisdictions: DEFAULT_CODES.iter().map(|s| s.to_string()).collect(),
            include_m1: true,
            random_mncs: TemplatePlan::default(),
            templates: Vec::new(),
            noise_rate: 0.05,
            core_size: 16,
        }
    }
}

impl SynthSpec {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRow {
    pub mnc: String,
    pub affiliate_id: String,
    pub layer: u32,
    pub role: Role,
}

/// A generated corpus held in memory.
#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<OwnershipEdge>,
    pub hqs: Vec<HqEntry>,
    pub truth: Vec<TruthRow>,
    pub profiles: Profiles,
    pub tally: RoleTally,
    /// Region every planted firm is meant to occupy.
    pub target_region: Region,
    pub core_size: usize,
}

impl SynthCorpus {
    pub fn graph(&self) -> Result<OwnershipGraph> {
        OwnershipGraph::build(self.nodes.clone(), &self.edges)
    }
}

fn substantial_pct(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(1000..=10000) as f64 / 100.0
}

/// Generates the corpus described by `spec`.
pub fn generate(spec: &SynthSpec) -> Result<SynthCorpus> {
    if spec.jurisdictions.is_empty() {
        return Err(Error::InvalidParameter("jurisdiction list is empty".into()));
    }
    for c in &spec.jurisdictions {
        if Jurisdiction::parse(c).is_none_or(|j| j.is_na()) {
            return Err(Error::InvalidParameter(format!("invalid jurisdiction `{c}`")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.nodes;
    let max_links = n.saturating_mul(n.saturating_sub(1));
    let m = spec.edges.unwrap_or(n.min(max_links));
    let background = scale_free_links(n, m, spec.gamma_in, spec.gamma_out, &mut rng)?;

    let mut nodes: Vec<NodeRecord> = (0..n)
        .map(|i| {
            let mut r = NodeRecord::new(format!("n{i}"), spec.jurisdictions.choose(&mut rng).unwrap());
            r.industry_section = (b'A' + rng.random_range(0..21u8)) as char;
            r
        })
        .collect();
    let mut edges: Vec<OwnershipEdge> = background
        .iter()
        .map(|&(u, v)| OwnershipEdge {
            subsidiary: format!("n{u}"),
            shareholder: format!("n{v}"),
            pct: rng.random_range(1..=10000) as f64 / 100.0,
        })
        .collect();

    let mut templates = Vec::new();
    if spec.include_m1 {
        templates.push(template_m1());
    }
    templates.extend(spec.templates.iter().cloned());
    for k in 0..spec.random_mncs.count {
        templates.push(random_template(&format!("R{k}"), &spec.random_mncs, &spec.jurisdictions, &mut rng));
    }

    // the core must out-size every other strongly connected set
    let bg_graph = OwnershipGraph::from_pairs(n, &background);
    let scc = strong_components(&bg_graph);
    let largest_bg = scc.sizes.iter().copied().max().unwrap_or(0);
    let largest_mnc = templates.iter().map(|t| t.affiliates.len() + 1).max().unwrap_or(0);
    let core_size = spec.core_size.max(largest_bg + 1).max(largest_mnc + 1).max(2);
    for i in 0..core_size {
        nodes.push(NodeRecord::new(format!("core{i}"), spec.jurisdictions.choose(&mut rng).unwrap()));
        edges.push(OwnershipEdge {
            subsidiary: format!("core{i}"),
            shareholder: format!("core{}", (i + 1) % core_size),
            pct: 100.0,
        });
    }
    // tie the core into the largest background weak component so the planted
    // structure belongs to the giant weak component
    let wcc = weak_components(&bg_graph);
    if let Some(big) = wcc.largest() {
        let anchor = wcc.members(big)[0];
        edges.push(OwnershipEdge {
            subsidiary: "core0".into(),
            shareholder: format!("n{anchor}"),
            pct: 100.0,
        });
    }

    let mut hqs = Vec::new();
    let mut truth = Vec::new();
    let mut tally = RoleTally::default();
    let mut used_names = BTreeSet::new();
    for (k, t) in templates.iter().enumerate() {
        if !used_names.insert(t.name.clone()) {
            return Err(Error::InvalidParameter(format!("duplicate template name `{}`", t.name)));
        }
        let roles = t.ground_truth()?;
        let eval = truth::evaluate(&t.hq.id, &t.jurisdictions(), &t.links);
        let prefix = format!("m{k}_");
        let gid = |local: &str| format!("{prefix}{local}");
        let mut hq = NodeRecord::new(gid(&t.hq.id), &t.hq.jurisdiction);
        hq.is_headquarters = true;
        hq.name = t.name.clone();
        nodes.push(hq);
        for a in &t.affiliates {
            nodes.push(NodeRecord::new(gid(&a.id), &a.jurisdiction));
        }
        for (s, h) in &t.links {
            edges.push(OwnershipEdge {
                subsidiary: gid(s),
                shareholder: gid(h),
                pct: substantial_pct(&mut rng),
            });
        }
        edges.push(OwnershipEdge {
            subsidiary: gid(&t.hq.id),
            shareholder: format!("core{}", rng.random_range(0..core_size)),
            pct: substantial_pct(&mut rng),
        });
        if n > 0 {
            for a in &t.affiliates {
                if rng.random_bool(spec.noise_rate.clamp(0.0, 1.0)) {
                    edges.push(OwnershipEdge {
                        subsidiary: gid(&a.id),
                        shareholder: format!("n{}", rng.random_range(0..n)),
                        pct: rng.random_range(1..=10000) as f64 / 100.0,
                    });
                }
            }
        }
        hqs.push(HqEntry {
            hq_node_id: gid(&t.hq.id),
            mnc_name: t.name.clone(),
        });
        for (id, &layer) in &eval.layer {
            let role = roles[id];
            tally.add(role);
            truth.push(TruthRow {
                mnc: t.name.clone(),
                affiliate_id: gid(id),
                layer,
                role,
            });
        }
    }

    let profiles = synthetic_profiles(&nodes, &mut rng);
    Ok(SynthCorpus {
        nodes,
        edges,
        hqs,
        truth,
        profiles,
        tally,
        target_region: Region::In,
        core_size,
    })
}

/// GDP, tax rate and withholding-tax score for every code in use.
fn synthetic_profiles(nodes: &[NodeRecord], rng: &mut ChaCha8Rng) -> Profiles {
    let codes: BTreeSet<Jurisdiction> = nodes.iter().map(|n| n.jurisdiction.clone()).filter(|j| !j.is_na()).collect();
    codes
        .into_iter()
        .map(|code| {
            let p = JurisdictionProfile {
                code: code.clone(),
                gdp: Some((rng.random_range(10..=20000) as f64) * 1e9),
                gdp_year: Some(2015),
                statutory_rate: Some(rng.random_range(0..=35) as f64 / 100.0),
                wtc: Some(rng.random_range(0..=1000) as f64 / 1e5),
            };
            (code, p)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusFiles {
    pub nodes: PathBuf,
    pub edges: PathBuf,
    pub hqs: PathBuf,
    pub profiles: PathBuf,
    pub truth: PathBuf,
    pub targets: PathBuf,
}

#[derive(Serialize)]
struct Targets<'a> {
    key_firm_region: &'a str,
    mncs: usize,
    core_size: usize,
    tally: RoleTally,
}

/// Writes `nodes.csv`, `edges.csv`, `hqs.csv`, `profiles.csv`, `truth.csv` and `targets.json`.
pub fn write_corpus(corpus: &SynthCorpus, dir: impl AsRef<Path>) -> Result<CorpusFiles> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = CorpusFiles {
        nodes: dir.join("nodes.csv"),
        edges: dir.join("edges.csv"),
        hqs: dir.join("hqs.csv"),
        profiles: dir.join("profiles.csv"),
        truth: dir.join("truth.csv"),
        targets: dir.join("targets.json"),
    };
    let writer = |p: &Path| -> Result<csv::Writer<BufWriter<File>>> {
        Ok(csv::Writer::from_writer(BufWriter::new(File::create(p).map_err(|e| Error::io(p, e))?)))
    };

    let mut w = writer(&files.nodes)?;
    w.write_record(NODE_HEADER)?;
    for r in &corpus.nodes {
        w.write_record([
            r.node_id.as_str(),
            r.jurisdiction.as_str(),
            &r.industry_section.to_string(),
            &r.name,
            if r.is_headquarters { "1" } else { "0" },
        ])?;
    }
    w.flush().map_err(|e| Error::io(&files.nodes, e))?;

    let mut w = writer(&files.edges)?;
    w.write_record(EDGE_HEADER)?;
    for e in &corpus.edges {
        w.write_record([e.subsidiary.as_str(), e.shareholder.as_str(), &e.pct.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(&files.edges, e))?;

    let mut w = writer(&files.truth)?;
    w.write_record(["mnc", "affiliate_id", "layer", "role"])?;
    for t in &corpus.truth {
        w.write_record([t.mnc.as_str(), t.affiliate_id.as_str(), &t.layer.to_string(), t.role.label()])?;
    }
    w.flush().map_err(|e| Error::io(&files.truth, e))?;

    write_hqs(&files.hqs, &corpus.hqs)?;
    write_profiles(&files.profiles, &corpus.profiles)?;
    let targets = Targets {
        key_firm_region: corpus.target_region.label(),
        mncs: corpus.hqs.len(),
        core_size: corpus.core_size,
        tally: corpus.tally,
    };
    let text = serde_json::to_string_pretty(&targets)? + "\n";
    fs::write(&files.targets, text).map_err(|e| Error::io(&files.targets, e))?;
    Ok(files)
}

pub fn load_truth(path: impl AsRef<Path>) -> Result<Vec<TruthRow>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(file);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        out.push(TruthRow {
            mnc: rec[0].to_string(),
            affiliate_id: rec[1].to_string(),
            layer: rec[2].parse().map_err(|_| Error::InvalidParameter(format!("bad layer `{}`", &rec[2])))?,
            role: rec[3].parse()?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::bowtie_decompose;
    use crate::keyfirms::classify_all;
    use crate::mnc::DegreeMode;

    #[test]
    fn m1_template_truth() {
        let roles = template_m1().ground_truth().unwrap();
        let key: BTreeMap<&str, Role> = roles.iter().filter(|(_, r)| r.is_key()).map(|(k, &r)| (k.as_str(), r)).collect();
        assert_eq!(
            key,
            BTreeMap::from([("a", Role::Holding), ("b", Role::HoldingAndConduit), ("e", Role::Conduit)])
        );
        let eval = truth::evaluate("HQ", &template_m1().jurisdictions(), &template_m1().links);
        assert_eq!(eval.h["a"].unwrap(), truth::Ratio { num: 2 * 14, den: 6 * 4 });
        assert_eq!(eval.t["e"].unwrap().value(), 7.0 / 6.0);
    }

    #[test]
    fn contradicting_template_is_rejected() {
        let mut t = template_m1();
        t.roles.as_mut().unwrap().insert("e".into(), Role::Holding);
        assert!(matches!(t.ground_truth(), Err(Error::TemplateContradiction { .. })));
        let mut t = template_m1();
        t.roles.as_mut().unwrap().remove("e");
        assert!(matches!(t.ground_truth(), Err(Error::TemplateContradiction { .. })));
    }

    #[test]
    fn domestic_template_has_no_key_firms() {
        let mut t = template_m1();
        t.hq.jurisdiction = "JP".into();
        for a in &mut t.affiliates {
            a.jurisdiction = "JP".into();
        }
        t.roles = Some(BTreeMap::new());
        assert!(t.ground_truth().unwrap().values().all(|r| *r == Role::None));
    }

    #[test]
    fn random_templates_agree_with_identification() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let codes: Vec<String> = ["US", "NL", "LU", "GB"].iter().map(|s| s.to_string()).collect();
        let plan = TemplatePlan {
            cycle_rate: 0.2,
            multi_parent_rate: 0.3,
            ..Default::default()
        };
        let mut key = 0;
        for k in 0..100 {
            let spec = SynthSpec {
                seed: k,
                nodes: 0,
                include_m1: false,
                templates: vec![random_template("T", &plan, &codes, &mut rng)],
                ..Default::default()
            };
            let corpus = generate(&spec).unwrap();
            let g = corpus.graph().unwrap();
            let view = g.substantial_view(10.0).unwrap();
            let rep = classify_all(&view, &corpus.hqs, DegreeMode::Induced);
            let got: BTreeMap<&str, Role> = rep.rows.iter().map(|r| (r.affiliate_id.as_str(), r.role)).collect();
            let want: BTreeMap<&str, Role> = corpus.truth.iter().map(|r| (r.affiliate_id.as_str(), r.role)).collect();
            assert_eq!(got, want, "template {k}");
            key += want.values().filter(|r| r.is_key()).count();
        }
        assert!(key > 50, "templates too bland: {key} key firms");
    }

    #[test]
    fn planted_firms_sit_upstream_of_the_core() {
        let spec = SynthSpec {
            seed: 5,
            nodes: 3000,
            random_mncs: TemplatePlan {
                count: 10,
                ..Default::default()
            },
            ..Default::default()
        };
        let corpus = generate(&spec).unwrap();
        let g = corpus.graph().unwrap();
        let bt = bowtie_decompose(&g).unwrap();
        for t in &corpus.truth {
            assert_eq!(bt.region[g.lookup(&t.affiliate_id).unwrap() as usize], Region::In, "{}", t.affiliate_id);
        }
        assert_eq!(bt.size(Region::Gscc), corpus.core_size);
    }

    #[test]
    fn same_seed_same_files() {
        let spec = SynthSpec {
            seed: 3,
            nodes: 500,
            random_mncs: TemplatePlan {
                count: 3,
                ..Default::default()
            },
            ..Default::default()
        };
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let fa = write_corpus(&generate(&spec).unwrap(), a.path()).unwrap();
        let fb = write_corpus(&generate(&spec).unwrap(), b.path()).unwrap();
        for (x, y) in [(&fa.nodes, &fb.nodes), (&fa.edges, &fb.edges), (&fa.truth, &fb.truth), (&fa.profiles, &fb.profiles)] {
            assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
        }
        let truth = load_truth(&fa.truth).unwrap();
        assert_eq!(truth, generate(&spec).unwrap().truth);
    }

    #[test]
    fn corpus_ingests_cleanly() {
        let spec = SynthSpec {
            seed: 8,
            nodes: 2000,
            random_mncs: TemplatePlan {
                count: 5,
                ..Default::default()
            },
            ..Default::default()
        };
        let dir = tempfile::tempdir().unwrap();
        let files = write_corpus(&generate(&spec).unwrap(), dir.path()).unwrap();
        let nodes = crate::graph::load_nodes(&files.nodes).unwrap();
        let load = crate::graph::load_edges(&files.edges).unwrap();
        assert_eq!((load.self_loops_dropped, load.blank_pct), (0, 0));
        let g = OwnershipGraph::build_with(nodes, &load.edges, true).unwrap();
        assert_eq!(*g.build_stats(), crate::graph::BuildStats::default());
        assert_eq!(crate::graph::Adjacency::edge_count(&g), load.edges.len());
        assert_eq!(crate::mnc::load_hqs(&files.hqs).unwrap().len(), 6);
        crate::jurisdiction::load_profiles(&files.profiles).unwrap();
    }

    #[test]
    fn single_node_background_has_no_links() {
        let spec = SynthSpec {
            nodes: 1,
            include_m1: false,
            ..Default::default()
        };
        let c = generate(&spec).unwrap();
        assert!(!c.edges.iter().any(|e| e.subsidiary.starts_with('n') && e.shareholder.starts_with('n')));
        assert!(c.truth.is_empty());
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = SynthSpec {
            templates: vec![template_m1()],
            include_m1: false,
            ..Default::default()
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<SynthSpec>(&text).unwrap(), spec);
        let minimal: SynthSpec = serde_json::from_str(r#"{"seed": 4, "nodes": 10}"#).unwrap();
        assert_eq!((minimal.seed, minimal.nodes, minimal.gamma_in), (4, 10, 2.44));
        assert!(serde_json::from_str::<SynthSpec>(r#"{"sead": 4}"#).is_err());
    }
}
