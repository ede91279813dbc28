use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ownet(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ownet"))
        .args(args)
        .current_dir(cwd)
        .env_remove("OWNET_CACHE_DIR")
        .output()
        .expect("spawn ownet")
}

fn ok(o: &Output) {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
}

fn synth(dir: &Path) {
    fs::write(
        dir.join("spec.json"),
        r#"{"seed": 4, "nodes": 300, "random_mncs": {"count": 3}}"#,
    )
    .unwrap();
    ok(&ownet(&["synth", "--spec", "spec.json", "--out", "data"], dir));
}

const CONFIG: &str = r#"{
  "nodes": "data/nodes.csv",
  "edges": "data/edges.csv",
  "hqs": "data/hqs.csv",
  "profiles": "data/profiles.csv",
  "out_dir": "run",
  "cache_dir": "cache"
}"#;

#[test]
fn run_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d);
    fs::write(d.join("run.json"), CONFIG).unwrap();
    ok(&ownet(&["--config", "run.json", "--threads", "2", "run"], d));
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(d.join("run/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["stages"].as_array().unwrap().len(), 7);
    assert_eq!(manifest["complete"], true);

    let o = ownet(&["report", "--run", "run", "--out", "report"], d);
    ok(&o);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("GSCC"), "{text}");
    assert!(d.join("report/table1_mnc_roles.csv").is_file());

    ok(&ownet(&["--config", "run.json", "run", "--out", "run2", "--skip", "communities"], d));
    let m2: serde_json::Value = serde_json::from_slice(&fs::read(d.join("run2/manifest.json")).unwrap()).unwrap();
    assert_eq!(m2["stages"][3]["status"], "skipped");
    assert_eq!(manifest["stages"][0], m2["stages"][0]);
}

#[test]
fn missing_profiles_fails_with_the_file_name() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d);
    fs::remove_file(d.join("data/profiles.csv")).unwrap();
    fs::write(d.join("run.json"), CONFIG).unwrap();
    let o = ownet(&["--config", "run.json", "run"], d);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("profiles.csv"));
}

#[test]
fn subcommands_chain_through_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d);
    ok(&ownet(&["ingest", "--nodes", "data/nodes.csv", "--edges", "data/edges.csv", "--out", "g.ogc"], d));
    ok(&ownet(&["bowtie", "--graph", "g.ogc", "--out", "bowtie.csv", "--summary", "b.csv"], d));
    ok(&ownet(&["distances", "--graph", "g.ogc", "--direction", "out", "--out", "dist.csv"], d));
    ok(&ownet(&["stats", "--graph", "g.ogc", "--out", "stats"], d));
    ok(&ownet(&["--seed", "3", "communities", "--graph", "g.ogc", "--out", "comm/communities.csv"], d));
    ok(&ownet(&["extract", "--graph", "g.ogc", "--hqs", "data/hqs.csv", "--out", "ex"], d));
    ok(&ownet(&["identify", "--graph", "g.ogc", "--hqs", "data/hqs.csv", "--threshold", "10", "--out", "keyfirms.csv"], d));
    ok(&ownet(
        &[
            "jurisdiction", "--graph", "g.ogc", "--keyfirms", "keyfirms.csv", "--profiles", "data/profiles.csv", "--hqs",
            "data/hqs.csv", "--bowtie", "--out", "reports",
        ],
        d,
    ));
    for f in [
        "bowtie.csv", "dist.csv", "stats/fits.json", "stats/pk_in.csv", "comm/communities.csv", "comm/dsizes.csv",
        "ex/mnc/M1.csv", "reports/sink.csv", "reports/conduit.csv", "reports/regression.json", "reports/tallies/holding.csv",
    ] {
        assert!(d.join(f).is_file(), "{f}");
    }
    let keyfirms = fs::read_to_string(d.join("keyfirms.csv")).unwrap();
    assert!(keyfirms.starts_with("mnc,affiliate_id,layer,k_in,k_out,H,T,third_country,role\n"));
    assert!(keyfirms.contains("M1,m0_b,2,"), "{keyfirms}");
    let chains = fs::read_dir(d.join("reports/chains")).unwrap().count();
    assert!(chains > 0);
}

#[test]
fn bad_input_is_reported_not_panicked() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = ownet(&["bowtie", "--graph", "nope.ogc", "--out", "x.csv"], d);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope.ogc"));
    let o = ownet(&["run"], d);
    assert!(!o.status.success());
}
