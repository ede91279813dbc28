//! Human-readable summary and plot-data bundle from a finished run.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::outputs::{create_csv, finish};
use super::{Manifest, Stage, StageStatus, MANIFEST_FILE};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Report {
    pub text: String,
    pub files: Vec<PathBuf>,
}

struct Source {
    prefix: Vec<String>,
    path: PathBuf,
}

/// Concatenates CSV sources under one header, prefixing each row.
fn concat(out: &Path, header: &[&str], sources: &[Source]) -> Result<()> {
    let mut w = create_csv(out)?;
    w.write_record(header)?;
    for s in sources {
        let file = File::open(&s.path).map_err(|e| Error::io(&s.path, e))?;
        let mut rdr = csv::Reader::from_reader(file);
        for rec in rdr.records() {
            let rec = rec?;
            w.write_record(s.prefix.iter().map(String::as_str).chain(rec.iter()))?;
        }
    }
    finish(w, out)
}

fn verify(run_dir: &Path, m: &Manifest) -> Result<()> {
    for a in m.artifacts() {
        let p = run_dir.join(&a.path);
        let bytes = fs::read(&p).map_err(|e| Error::io(&p, e))?;
        let found = hex::encode(Sha256::digest(&bytes));
        if found != a.sha256 {
            return Err(Error::Integrity {
                path: p,
                expected: a.sha256.clone(),
                found,
            });
        }
    }
    Ok(())
}

fn read_rows(path: &Path) -> Result<Vec<csv::StringRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Reader::from_reader(file).records().collect::<std::result::Result<_, _>>()?)
}

/// Verifies every artifact of the run in `run_dir` against its manifest hash,
/// then writes table and figure CSVs into `out_dir`. Tables whose inputs were
/// not produced are written with a header only.
pub fn report(run_dir: &Path, out_dir: &Path) -> Result<Report> {
    let m = Manifest::load(run_dir.join(MANIFEST_FILE))?;
    verify(run_dir, &m)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let have = |rel: &str| m.artifacts().any(|a| a.path == rel);
    let src = |prefix: &[&str], rel: &str| Source {
        prefix: prefix.iter().map(|s| s.to_string()).collect(),
        path: run_dir.join(rel),
    };
    let pick = |prefix: &[&str], rel: &str| -> Vec<Source> {
        if have(rel) {
            vec![src(prefix, rel)]
        } else {
            Vec::new()
        }
    };

    let mut files = Vec::new();
    let mut emit = |name: &str, header: &[&str], sources: Vec<Source>| -> Result<()> {
        let p = out_dir.join(name);
        concat(&p, header, &sources)?;
        files.push(p);
        Ok(())
    };
    emit(
        "table1_mnc_roles.csv",
        &["mnc", "hq_node_id", "affiliates", "holding", "hc", "conduit", "error"],
        pick(&[], "identify_summary.csv"),
    )?;
    emit("table2_bowtie.csv", &["component", "count", "ratio"], pick(&[], "bowtie_summary.csv"))?;
    let mut d = pick(&["in_to_gscc"], "distances_in.csv");
    d.extend(pick(&["gscc_to_out"], "distances_out.csv"));
    emit("table3_distances.csv", &["direction", "distance", "count", "ratio"], d)?;

    let mut chains: Vec<Source> = Vec::new();
    for a in m.artifacts() {
        if let Some(name) = a.path.strip_prefix("reports/chains/").and_then(|n| n.strip_suffix(".csv")) {
            if let Some((role, code)) = name.split_once('_') {
                chains.push(src(&[role, code], &a.path));
            }
        }
    }
    emit("table5_7_chains.csv", &["role", "firm_code", "side", "code", "count", "pct"], chains)?;
    emit("table8_hq_shares.csv", &["role", "code", "count", "pct"], pick(&[], "reports/hq_shares.csv"))?;
    emit(
        "table9_hq_locations.csv",
        &["hq_code", "role", "code", "count", "pct"],
        pick(&[], "reports/hq_locations.csv"),
    )?;
    emit("fig6_pk_in.csv", &["lo", "hi", "count", "density"], pick(&[], "stats/pk_in.csv"))?;
    emit("fig6_pk_out.csv", &["lo", "hi", "count", "density"], pick(&[], "stats/pk_out.csv"))?;
    emit("fig6_ck.csv", &["k", "mean", "count"], pick(&[], "stats/ck.csv"))?;
    emit("fig6_knn.csv", &["k", "mean", "count"], pick(&[], "stats/knn.csv"))?;
    emit("fig7_dsizes.csv", &["size", "count", "density"], pick(&[], "dsizes.csv"))?;
    emit("fig8_component_sizes.csv", &["size", "count"], pick(&[], "component_sizes.csv"))?;
    let mut t = Vec::new();
    for dim in ["hq", "holding", "hc", "conduit", "affiliates"] {
        t.extend(pick(&[dim], &format!("reports/tallies/{dim}.csv")));
    }
    emit("fig9_11_tallies.csv", &["dimension", "code", "count", "pct"], t)?;
    emit(
        "tallies_bowtie.csv",
        &["dimension", "region", "count", "pct"],
        pick(&[], "reports/tallies/bowtie.csv"),
    )?;

    let mut text = String::new();
    writeln!(text, "run: {}", if m.complete { "complete" } else { "incomplete" }).unwrap();
    for s in &m.stages {
        let status = match s.status {
            StageStatus::Ok => format!("ok ({} artifacts)", s.artifacts.len()),
            StageStatus::Skipped => "skipped".to_string(),
            StageStatus::Failed => format!("FAILED: {}", s.error.as_deref().unwrap_or("")),
        };
        writeln!(text, "  {:<13} {status}", s.stage.name()).unwrap();
    }
    if have("bowtie_summary.csv") {
        writeln!(text, "\n{:<10} {:>12} {:>9}", "Component", "Count", "Ratio").unwrap();
        for r in read_rows(&run_dir.join("bowtie_summary.csv"))? {
            writeln!(text, "{:<10} {:>12} {:>9}", &r[0], &r[1], &r[2]).unwrap();
        }
    }
    if m.stage(Stage::Identify).is_some_and(|s| s.status == StageStatus::Ok) {
        let rows = read_rows(&run_dir.join("identify_summary.csv"))?;
        let sum = |i: usize| rows.iter().filter_map(|r| r[i].parse::<usize>().ok()).sum::<usize>();
        writeln!(
            text,
            "\nkey firms over {} MNCs: holding {}, holding & conduit {}, conduit {}",
            rows.len(),
            sum(3),
            sum(4),
            sum(5)
        )
        .unwrap();
    }
    writeln!(text, "\nmanifest digest {}", m.digest()).unwrap();
    let p = out_dir.join("summary.txt");
    fs::write(&p, &text).map_err(|e| Error::io(&p, e))?;
    files.push(p);
    Ok(Report { text, files })
}

#[cfg(test)]
mod tests {
    use super::super::{run_pipeline, RunConfig, StageToggles};
    use super::*;
    use crate::graph::{EDGE_HEADER, NODE_HEADER};

    fn tiny_run(dir: &Path) -> RunConfig {
        let nodes = dir.join("nodes.csv");
        let edges = dir.join("edges.csv");
        let hqs = dir.join("hqs.csv");
        fs::write(
            &nodes,
            format!("{}\nA,US,C,,1\nB,NL,K,,0\nC,NL,K,,0\nD,GB,K,,0\n", NODE_HEADER.join(",")),
        )
        .unwrap();
        fs::write(&edges, format!("{}\nB,A,50\nC,B,50\nD,C,5\nA,C,40\n", EDGE_HEADER.join(","))).unwrap();
        fs::write(&hqs, "hq_node_id,mnc_name\nD,Lonely\n").unwrap();
        RunConfig {
            nodes,
            edges,
            hqs: Some(hqs),
            out_dir: dir.join("out"),
            stages: StageToggles {
                jurisdiction: false,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn bowtie_lines_and_empty_key_firm_tables() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = tiny_run(dir.path());
        run_pipeline(&cfg).unwrap();
        let rep = report(&cfg.out_dir, &dir.path().join("report")).unwrap();
        assert!(rep.text.contains("GSCC"), "{}", rep.text);
        let t2 = fs::read_to_string(dir.path().join("report/table2_bowtie.csv")).unwrap();
        assert_eq!(t2.lines().next().unwrap(), "component,count,ratio");
        assert!(t2.contains("GSCC,3,75.000"), "{t2}");
        let chains = fs::read_to_string(dir.path().join("report/table5_7_chains.csv")).unwrap();
        assert_eq!(chains.lines().count(), 1);
        let t8 = fs::read_to_string(dir.path().join("report/table8_hq_shares.csv")).unwrap();
        assert_eq!(t8, "role,code,count,pct\n");
    }

    #[test]
    fn tampered_artifact_fails_integrity() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = tiny_run(dir.path());
        run_pipeline(&cfg).unwrap();
        fs::write(cfg.out_dir.join("bowtie.csv"), "node_id,region\n").unwrap();
        let err = report(&cfg.out_dir, &dir.path().join("report")).unwrap_err();
        assert!(matches!(err, Error::Integrity { .. }), "{err}");
    }

    #[test]
    fn corrupt_manifest_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = tiny_run(dir.path());
        run_pipeline(&cfg).unwrap();
        fs::write(cfg.out_dir.join(MANIFEST_FILE), "{\"format\": 1, \"stages\": [").unwrap();
        assert!(matches!(report(&cfg.out_dir, &dir.path().join("r")), Err(Error::Malformed { .. })));
    }
}
