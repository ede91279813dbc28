//! End-to-end runs: configuration, the seven stages, the artifact manifest
//! and the report built from it.

mod outputs;
mod report;

pub use outputs::{
    write_bowtie, write_bowtie_stage, write_bowtie_summary, write_communities, write_distances, write_extract,
    write_identify_summary, write_jurisdiction_reports, write_stats, ExtractSummary, JurisdictionInputs,
};
pub use report::{report, Report};

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::community::{detect_communities, CommunityConfig};
use crate::components::{bowtie_decompose, BowTie};
use crate::error::{Error, Result};
use crate::graph::{
    load_edges, load_nodes, read_cache, Adjacency, reciprocal_link_ratio, write_cache, write_node_index, OwnershipGraph,
    CACHE_VERSION, DEFAULT_THRESHOLD,
};
use crate::jurisdiction::{load_profiles, EdgeValues};
use crate::keyfirms::{classify_all, write_keyfirms, ClassifyReport};
use crate::mnc::{load_hqs, DegreeMode, HqEntry};

pub const CACHE_ENV: &str = "OWNET_CACHE_DIR";
pub const MANIFEST_FILE: &str = "manifest.json";
const MANIFEST_FORMAT: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Ingest,
    Bowtie,
    Stats,
    Communities,
    Extract,
    Identify,
    Jurisdiction,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::Ingest,
        Stage::Bowtie,
        Stage::Stats,
        Stage::Communities,
        Stage::Extract,
        Stage::Identify,
        Stage::Jurisdiction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Bowtie => "bowtie",
            Stage::Stats => "stats",
            Stage::Communities => "communities",
            Stage::Extract => "extract",
            Stage::Identify => "identify",
            Stage::Jurisdiction => "jurisdiction",
        }
    }
}

/// Which optional stages run. Ingest always runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StageToggles {
    pub bowtie: bool,
    pub stats: bool,
    pub communities: bool,
    pub extract: bool,
    pub identify: bool,
    pub jurisdiction: bool,
}

impl Default for StageToggles {
    fn default() -> Self {
        StageToggles {
            bowtie: true,
            stats: true,
            communities: true,
            extract: true,
            identify: true,
            jurisdiction: true,
        }
    }
}

impl StageToggles {
    pub fn enabled(&self, s: Stage) -> bool {
        match s {
            Stage::Ingest => true,
            Stage::Bowtie => self.bowtie,
            Stage::Stats => self.stats,
            Stage::Communities => self.communities,
            Stage::Extract => self.extract,
            Stage::Identify => self.identify,
            Stage::Jurisdiction => self.jurisdiction,
        }
    }

    pub fn set(&mut self, s: Stage, on: bool) {
        match s {
            Stage::Ingest => {}
            Stage::Bowtie => self.bowtie = on,
            Stage::Stats => self.stats = on,
            Stage::Communities => self.communities = on,
            Stage::Extract => self.extract = on,
            Stage::Identify => self.identify = on,
            Stage::Jurisdiction => self.jurisdiction = on,
        }
    }
}

/// Run configuration (JSON). Relative paths in a config file are resolved
/// against the file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub nodes: PathBuf,
    pub edges: PathBuf,
    pub hqs: Option<PathBuf>,
    pub profiles: Option<PathBuf>,
    /// Optional `subsidiary_id,shareholder_id,value` file for value-mode flows.
    pub edge_values: Option<PathBuf>,
    pub out_dir: PathBuf,
    /// Graph cache directory; falls back to `OWNET_CACHE_DIR`, then `<out_dir>/.cache`.
    pub cache_dir: Option<PathBuf>,
    pub rebuild_cache: bool,
    /// Reject edges naming unknown nodes instead of dropping them.
    pub strict: bool,
    pub threshold: f64,
    pub seed: u64,
    pub degree_mode: DegreeMode,
    pub bin_ratio: f64,
    pub community_trials: usize,
    /// Rows kept in chain and headquarters tables; all when absent.
    pub top_k: Option<usize>,
    pub stages: StageToggles,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            nodes: PathBuf::from("nodes.csv"),
            edges: PathBuf::from("edges.csv"),
            hqs: None,
            profiles: None,
            edge_values: None,
            out_dir: PathBuf::from("out"),
            cache_dir: None,
            rebuild_cache: false,
            strict: false,
            threshold: DEFAULT_THRESHOLD,
            seed: 0,
            degree_mode: DegreeMode::Induced,
            bin_ratio: 2.0,
            community_trials: CommunityConfig::default().trials,
            top_k: None,
            stages: StageToggles::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)?;
        if let Some(base) = path.parent() {
            cfg.resolve_against(base);
        }
        Ok(cfg)
    }

    fn resolve_against(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.nodes);
        fix(&mut self.edges);
        fix(&mut self.out_dir);
        for p in [&mut self.hqs, &mut self.profiles, &mut self.edge_values, &mut self.cache_dir].into_iter().flatten() {
            fix(p);
        }
    }

    /// Fails before any stage runs if a needed input is absent.
    pub fn validate(&self) -> Result<()> {
        let need = |p: &Path| if p.is_file() { Ok(()) } else { Err(Error::MissingInput(p.to_path_buf())) };
        need(&self.nodes)?;
        need(&self.edges)?;
        let s = &self.stages;
        if s.extract || s.identify || s.jurisdiction {
            match &self.hqs {
                Some(p) => need(p)?,
                None => return Err(Error::InvalidParameter("an HQ list is required by extract/identify/jurisdiction".into())),
            }
        }
        if s.jurisdiction {
            if !s.identify {
                return Err(Error::InvalidParameter("the jurisdiction stage needs the identify stage".into()));
            }
            match &self.profiles {
                Some(p) => need(p)?,
                None => return Err(Error::InvalidParameter("the jurisdiction stage needs a profiles file".into())),
            }
        }
        if let Some(p) = &self.edge_values {
            need(p)?;
        }
        if !(self.threshold > 0.0 && self.threshold <= 100.0) {
            return Err(Error::InvalidThreshold(self.threshold));
        }
        if !(self.bin_ratio > 1.0) {
            return Err(Error::InvalidParameter(format!("bin ratio must exceed 1, got {}", self.bin_ratio)));
        }
        Ok(())
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.cache_dir
            .clone()
            .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
            .unwrap_or_else(|| self.out_dir.join(".cache"))
    }
}

/// Counters reported by ingestion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub nodes: usize,
    pub links: usize,
    pub substantial_links: usize,
    pub threshold: f64,
    pub self_loops_dropped: usize,
    pub blank_pct: usize,
    pub zero_pct_links: usize,
    pub duplicate_links_merged: usize,
    pub unknown_endpoints_dropped: usize,
    pub reciprocal_link_ratio: f64,
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Builds the graph from CSV files.
pub fn ingest(nodes: &Path, edges: &Path, strict: bool) -> Result<(OwnershipGraph, EdgeCounters)> {
    let records = load_nodes(nodes)?;
    let load = load_edges(edges)?;
    let g = OwnershipGraph::build_with(records, &load.edges, strict)?;
    Ok((
        g,
        EdgeCounters {
            self_loops_dropped: load.self_loops_dropped,
            blank_pct: load.blank_pct,
        },
    ))
}

/// Row counters that are not recoverable from the built graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EdgeCounters {
    pub self_loops_dropped: usize,
    pub blank_pct: usize,
}

#[derive(Serialize, Deserialize)]
struct CacheSidecar {
    counters: EdgeCounters,
    duplicate_links_merged: usize,
    unknown_endpoints_dropped: usize,
}

/// Loads the graph through the cache, keyed by the content of both input
/// files. `rebuild` ignores an existing entry.
pub fn ingest_cached(nodes: &Path, edges: &Path, strict: bool, cache_dir: &Path, rebuild: bool) -> Result<(OwnershipGraph, IngestSummaryParts)> {
    let key = {
        let mut h = Sha256::new();
        h.update(CACHE_VERSION.to_le_bytes());
        h.update([strict as u8]);
        h.update(sha256_file(nodes)?.as_bytes());
        h.update(sha256_file(edges)?.as_bytes());
        hex::encode(h.finalize())
    };
    let bin = cache_dir.join(format!("{key}.ogc"));
    let side = cache_dir.join(format!("{key}.json"));
    if !rebuild && bin.is_file() && side.is_file() {
        let parsed = fs::read_to_string(&side)
            .map_err(|e| Error::io(&side, e))
            .and_then(|t| Ok(serde_json::from_str::<CacheSidecar>(&t)?));
        match (read_cache(&bin), parsed) {
            (Ok(g), Ok(s)) => {
                log::info!("graph loaded from cache {}", bin.display());
                return Ok((
                    g,
                    IngestSummaryParts {
                        counters: s.counters,
                        duplicate_links_merged: s.duplicate_links_merged,
                        unknown_endpoints_dropped: s.unknown_endpoints_dropped,
                    },
                ));
            }
            (Err(e), _) => log::warn!("ignoring unreadable cache entry: {e}"),
            (_, Err(e)) => log::warn!("ignoring unreadable cache sidecar: {e}"),
        }
    }
    let (g, counters) = ingest(nodes, edges, strict)?;
    let bs = g.build_stats().clone();
    fs::create_dir_all(cache_dir).map_err(|e| Error::io(cache_dir, e))?;
    write_cache(&g, &bin)?;
    let sidecar = CacheSidecar {
        counters,
        duplicate_links_merged: bs.duplicate_links_merged,
        unknown_endpoints_dropped: bs.unknown_endpoints_dropped,
    };
    fs::write(&side, serde_json::to_string(&sidecar)?).map_err(|e| Error::io(&side, e))?;
    Ok((
        g,
        IngestSummaryParts {
            counters,
            duplicate_links_merged: bs.duplicate_links_merged,
            unknown_endpoints_dropped: bs.unknown_endpoints_dropped,
        },
    ))
}

/// Ingestion counters that survive a cache round trip.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IngestSummaryParts {
    pub counters: EdgeCounters,
    pub duplicate_links_merged: usize,
    pub unknown_endpoints_dropped: usize,
}

pub fn ingest_summary(g: &OwnershipGraph, parts: IngestSummaryParts, threshold: f64) -> Result<IngestSummary> {
    let view = g.substantial_view(threshold)?;
    Ok(IngestSummary {
        nodes: g.node_count(),
        links: g.edge_count(),
        substantial_links: view.edge_count(),
        threshold,
        self_loops_dropped: parts.counters.self_loops_dropped,
        blank_pct: parts.counters.blank_pct,
        zero_pct_links: g.zero_pct_links(),
        duplicate_links_merged: parts.duplicate_links_merged,
        unknown_endpoints_dropped: parts.unknown_endpoints_dropped,
        reciprocal_link_ratio: reciprocal_link_ratio(g),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    /// Relative to the output directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageStatus {
    Ok,
    Skipped,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageEntry {
    pub stage: Stage,
    pub status: StageStatus,
    pub artifacts: Vec<Artifact>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: u32,
    pub complete: bool,
    pub stages: Vec<StageEntry>,
}

impl Manifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let m: Manifest = serde_json::from_str(&text).map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            line: e.line() as u64,
            message: format!("corrupt manifest: {e}"),
        })?;
        if m.format != MANIFEST_FORMAT {
            return Err(Error::Malformed {
                path: path.to_path_buf(),
                line: 0,
                message: format!("unsupported manifest format {}", m.format),
            });
        }
        Ok(m)
    }

    pub fn artifacts(&self) -> impl Iterator<Item = &Artifact> {
        self.stages.iter().flat_map(|s| &s.artifacts)
    }

    pub fn stage(&self, s: Stage) -> Option<&StageEntry> {
        self.stages.iter().find(|e| e.stage == s)
    }

    /// Digest over every artifact hash in manifest order.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for a in self.artifacts() {
            h.update(a.path.as_bytes());
            h.update([0]);
            h.update(a.sha256.as_bytes());
            h.update([0]);
        }
        hex::encode(h.finalize())
    }
}

pub(crate) fn relative(out_dir: &Path, p: &Path) -> String {
    let rel = p.strip_prefix(out_dir).unwrap_or(p);
    rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/")
}

fn artifact(out_dir: &Path, p: &Path) -> Result<Artifact> {
    let bytes = fs::read(p).map_err(|e| Error::io(p, e))?;
    Ok(Artifact {
        path: relative(out_dir, p),
        sha256: hex::encode(Sha256::digest(&bytes)),
        bytes: bytes.len() as u64,
    })
}

/// State carried between stages.
struct Run<'c> {
    cfg: &'c RunConfig,
    graph: Option<OwnershipGraph>,
    bowtie: Option<BowTie>,
    hqs: Vec<HqEntry>,
    classified: Option<ClassifyReport>,
}

impl Run<'_> {
    fn graph(&self) -> Result<&OwnershipGraph> {
        self.graph.as_ref().ok_or_else(|| Error::InvalidParameter("graph not ingested".into()))
    }

    fn stage(&mut self, s: Stage) -> Result<Vec<PathBuf>> {
        let out = &self.cfg.out_dir;
        match s {
            Stage::Ingest => {
                let (g, parts) =
                    ingest_cached(&self.cfg.nodes, &self.cfg.edges, self.cfg.strict, &self.cfg.cache_dir(), self.cfg.rebuild_cache)?;
                let summary = ingest_summary(&g, parts, self.cfg.threshold)?;
                let a = out.join("ingest.json");
                outputs::write_json(&a, &summary)?;
                let b = out.join("node_index.csv");
                write_node_index(&g, &b)?;
                if let Some(p) = &self.cfg.hqs {
                    self.hqs = load_hqs(p)?;
                }
                self.graph = Some(g);
                Ok(vec![a, b])
            }
            Stage::Bowtie => {
                let g = self.graph()?;
                let bt = bowtie_decompose(g)?;
                let files = write_bowtie_stage(out, g, &bt)?;
                self.bowtie = Some(bt);
                Ok(files)
            }
            Stage::Stats => write_stats(&out.join("stats"), self.graph()?, self.cfg.bin_ratio),
            Stage::Communities => {
                let g = self.graph()?;
                let cc = CommunityConfig {
                    seed: self.cfg.seed,
                    trials: self.cfg.community_trials.max(1),
                    ..Default::default()
                };
                let partition = detect_communities(g, &cc)?;
                write_communities(&out.join("communities.csv"), out, g, &partition, self.cfg.bin_ratio)
            }
            Stage::Extract => {
                let g = self.graph()?;
                let view = g.substantial_view(self.cfg.threshold)?;
                write_extract(out, &view, &self.hqs, self.cfg.degree_mode)
            }
            Stage::Identify => {
                let g = self.graph()?;
                let view = g.substantial_view(self.cfg.threshold)?;
                let report = classify_all(&view, &self.hqs, self.cfg.degree_mode);
                let a = out.join("keyfirms.csv");
                write_keyfirms(&a, &report.rows)?;
                let b = out.join("identify_summary.csv");
                write_identify_summary(&b, &report)?;
                self.classified = Some(report);
                Ok(vec![a, b])
            }
            Stage::Jurisdiction => {
                let g = self.graph()?;
                let view = g.substantial_view(self.cfg.threshold)?;
                let profiles = load_profiles(self.cfg.profiles.as_ref().expect("validated"))?;
                let values = match &self.cfg.edge_values {
                    Some(p) => Some(EdgeValues::load(p, &view)?),
                    None => None,
                };
                let rows = self.classified.as_ref().map(|r| r.rows.as_slice()).unwrap_or(&[]);
                let inputs = JurisdictionInputs {
                    view: &view,
                    rows,
                    hqs: &self.hqs,
                    profiles: &profiles,
                    values: values.as_ref(),
                    bowtie: self.bowtie.as_ref(),
                    top_k: self.cfg.top_k,
                };
                write_jurisdiction_reports(&out.join("reports"), &inputs)
            }
        }
    }
}

fn write_manifest(out_dir: &Path, m: &Manifest) -> Result<PathBuf> {
    let p = out_dir.join(MANIFEST_FILE);
    outputs::write_json(&p, m)?;
    Ok(p)
}

/// Runs the enabled stages in order and writes `manifest.json`. A failing
/// stage stops the run; the manifest written so far records the failure.
pub fn run_pipeline(cfg: &RunConfig) -> Result<Manifest> {
    cfg.validate()?;
    let out = &cfg.out_dir;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut run = Run {
        cfg,
        graph: None,
        bowtie: None,
        hqs: Vec::new(),
        classified: None,
    };
    let mut manifest = Manifest {
        format: MANIFEST_FORMAT,
        complete: false,
        stages: Vec::new(),
    };
    for s in Stage::ALL {
        if !cfg.stages.enabled(s) {
            manifest.stages.push(StageEntry {
                stage: s,
                status: StageStatus::Skipped,
                artifacts: Vec::new(),
                error: None,
            });
            continue;
        }
        log::info!("stage {}", s.name());
        let result = run.stage(s).and_then(|files| files.iter().map(|p| artifact(out, p)).collect::<Result<Vec<_>>>());
        match result {
            Ok(artifacts) => manifest.stages.push(StageEntry {
                stage: s,
                status: StageStatus::Ok,
                artifacts,
                error: None,
            }),
            Err(e) => {
                manifest.stages.push(StageEntry {
                    stage: s,
                    status: StageStatus::Failed,
                    artifacts: Vec::new(),
                    error: Some(e.to_string()),
                });
                write_manifest(out, &manifest)?;
                return Err(Error::Stage {
                    stage: s.name().to_string(),
                    source: Box::new(e),
                });
            }
        }
    }
    manifest.complete = true;
    write_manifest(out, &manifest)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate, write_corpus, SynthSpec, TemplatePlan};

    fn corpus(dir: &Path) -> RunConfig {
        let spec = SynthSpec {
            seed: 11,
            nodes: 400,
            random_mncs: TemplatePlan {
                count: 4,
                ..Default::default()
            },
            ..Default::default()
        };
        let files = write_corpus(&generate(&spec).unwrap(), dir.join("data")).unwrap();
        RunConfig {
            nodes: files.nodes,
            edges: files.edges,
            hqs: Some(files.hqs),
            profiles: Some(files.profiles),
            out_dir: dir.join("out"),
            cache_dir: Some(dir.join("cache")),
            ..Default::default()
        }
    }

    #[test]
    fn full_run_has_seven_stages() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = corpus(dir.path());
        let m = run_pipeline(&cfg).unwrap();
        assert!(m.complete);
        assert_eq!(m.stages.len(), 7);
        assert!(m.stages.iter().all(|s| s.status == StageStatus::Ok));
        for a in m.artifacts() {
            let p = cfg.out_dir.join(&a.path);
            assert_eq!(sha256_file(&p).unwrap(), a.sha256, "{}", a.path);
        }
        assert!(m.artifacts().any(|a| a.path == "reports/regression.json"));
        assert!(m.artifacts().any(|a| a.path == "mnc/M1.csv"));
    }

    #[test]
    fn rerun_reproduces_hashes_with_and_without_cache() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = corpus(dir.path());
        cfg.stages.communities = false;
        let a = run_pipeline(&cfg).unwrap();
        let b = run_pipeline(&cfg).unwrap();
        cfg.out_dir = dir.path().join("out2");
        cfg.rebuild_cache = true;
        let c = run_pipeline(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.digest(), c.digest());
        assert_eq!(
            fs::read(dir.path().join("out").join(MANIFEST_FILE)).unwrap(),
            fs::read(dir.path().join("out2").join(MANIFEST_FILE)).unwrap()
        );
    }

    #[test]
    fn missing_profiles_names_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = corpus(dir.path());
        let gone = dir.path().join("nowhere").join("profiles.csv");
        cfg.profiles = Some(gone.clone());
        let err = run_pipeline(&cfg).unwrap_err();
        assert!(matches!(&err, Error::MissingInput(p) if *p == gone));
        assert!(err.to_string().contains("profiles.csv"));
        assert!(!cfg.out_dir.join(MANIFEST_FILE).exists());
    }

    #[test]
    fn stage_failure_leaves_partial_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = corpus(dir.path());
        cfg.stages.communities = false;
        let bad = dir.path().join("bad_profiles.csv");
        fs::write(&bad, "code,gdp,gdp_year,statutory_rate,wtc\nUS,lots,,,\n").unwrap();
        cfg.profiles = Some(bad);
        let err = run_pipeline(&cfg).unwrap_err();
        assert!(matches!(err, Error::Stage { ref stage, .. } if stage == "jurisdiction"), "{err}");
        let m = Manifest::load(cfg.out_dir.join(MANIFEST_FILE)).unwrap();
        assert!(!m.complete);
        assert_eq!(m.stages.last().unwrap().status, StageStatus::Failed);
        assert_eq!(m.stage(Stage::Communities).unwrap().status, StageStatus::Skipped);
        assert_eq!(m.stages.len(), 7);
    }

    #[test]
    fn config_paths_resolve_against_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.json");
        fs::write(&p, r#"{"nodes": "d/nodes.csv", "edges": "/abs/edges.csv", "threshold": 20, "stages": {"communities": false}}"#).unwrap();
        let cfg = RunConfig::load(&p).unwrap();
        assert_eq!(cfg.nodes, dir.path().join("d/nodes.csv"));
        assert_eq!(cfg.edges, PathBuf::from("/abs/edges.csv"));
        assert_eq!(cfg.out_dir, dir.path().join("out"));
        assert!(!cfg.stages.communities && cfg.stages.bowtie);
        assert_eq!(cfg.threshold, 20.0);
        fs::write(&p, r#"{"nodez": "x"}"#).unwrap();
        assert!(RunConfig::load(&p).is_err());
    }
}
