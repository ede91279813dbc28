use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use ownet::community::{detect_communities, CommunityConfig};
use ownet::components::{bowtie_decompose, distance_distribution, DistanceDirection};
use ownet::graph::{read_cache, write_cache, write_node_index, OwnershipGraph, DEFAULT_THRESHOLD};
use ownet::jurisdiction::{load_profiles, EdgeValues};
use ownet::keyfirms::{classify_all, load_keyfirms, write_keyfirms};
use ownet::mnc::{load_hqs, DegreeMode};
use ownet::pipeline::{
    ingest, ingest_summary, report, run_pipeline, write_bowtie, write_bowtie_summary, write_communities, write_distances,
    write_extract, write_identify_summary, write_jurisdiction_reports, write_stats, IngestSummaryParts,
    JurisdictionInputs, RunConfig, Stage,
};
use ownet::synth::{generate, write_corpus, SynthSpec};

#[derive(Parser)]
#[command(name = "ownet", version, about = "Ownership-network analytics")]
struct Cli {
    /// Run configuration (JSON) used by `run`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed override for seeded stages.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphArg {
    /// Graph cache written by `ownet ingest`.
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Args)]
struct ThresholdArg {
    /// Minimum ownership percentage of a substantial link.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Build the graph from CSV files and write its binary cache.
    Ingest {
        #[arg(long)]
        nodes: PathBuf,
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Reject edges naming unknown nodes.
        #[arg(long)]
        strict: bool,
        /// Also write the `node_id,index` mapping.
        #[arg(long)]
        index: Option<PathBuf>,
    },
    /// Bow-tie region per node.
    Bowtie {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        out: PathBuf,
        /// Also write the `component,count,ratio` summary.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Shortest distances between the GSCC and IN or OUT.
    Distances {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, default_value = "in")]
        direction: DistanceDirection,
        /// Follow links against their stored orientation.
        #[arg(long)]
        reverse: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Degree distributions, clustering, neighbour degree and exponent fits.
    Stats {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        bin_ratio: f64,
    },
    /// Map-equation communities.
    Communities {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 4)]
        trials: usize,
        #[arg(long, default_value_t = 2.0)]
        bin_ratio: f64,
    },
    /// Per-MNC affiliate files.
    Extract {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        hqs: PathBuf,
        #[command(flatten)]
        threshold: ThresholdArg,
        #[arg(long, default_value = "induced")]
        degree_mode: DegreeMode,
        #[arg(long)]
        out: PathBuf,
    },
    /// Holding and conduit key firms of every MNC.
    Identify {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        hqs: PathBuf,
        #[command(flatten)]
        threshold: ThresholdArg,
        #[arg(long, default_value = "induced")]
        degree_mode: DegreeMode,
        #[arg(long)]
        out: PathBuf,
        /// Also write per-MNC role counts.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Sink and conduit jurisdictions, tallies, chains, HQ tables and regressions.
    Jurisdiction {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        keyfirms: PathBuf,
        #[arg(long)]
        profiles: PathBuf,
        /// HQ list naming each MNC's headquarters.
        #[arg(long)]
        hqs: PathBuf,
        /// `subsidiary_id,shareholder_id,value` file for value-weighted flows.
        #[arg(long)]
        edge_values: Option<PathBuf>,
        #[command(flatten)]
        threshold: ThresholdArg,
        /// Also tally key firms by bow-tie region.
        #[arg(long)]
        bowtie: bool,
        #[arg(long)]
        top_k: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic corpus.
    Synth {
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every enabled stage and write `manifest.json`.
    Run {
        /// Output directory, overriding the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Disable a stage (repeatable).
        #[arg(long, value_parser = parse_stage)]
        skip: Vec<Stage>,
        /// Ignore any cached graph.
        #[arg(long)]
        rebuild_cache: bool,
    },
    /// Verify a run's manifest and write table and figure CSVs.
    Report {
        /// Directory holding `manifest.json`.
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_stage(s: &str) -> Result<Stage, String> {
    Stage::ALL
        .into_iter()
        .find(|st| st.name() == s && *st != Stage::Ingest)
        .ok_or_else(|| format!("unknown or mandatory stage `{s}`"))
}

fn load_graph(arg: &GraphArg) -> Result<OwnershipGraph> {
    read_cache(&arg.graph).with_context(|| format!("reading graph cache {}", arg.graph.display()))
}

fn parent_dir(p: &Path) -> PathBuf {
    match p.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest {
            nodes,
            edges,
            out,
            strict,
            index,
        } => {
            let (g, counters) = ingest(&nodes, &edges, strict)?;
            let bs = g.build_stats().clone();
            let summary = ingest_summary(
                &g,
                IngestSummaryParts {
                    counters,
                    duplicate_links_merged: bs.duplicate_links_merged,
                    unknown_endpoints_dropped: bs.unknown_endpoints_dropped,
                },
                DEFAULT_THRESHOLD,
            )?;
            fs::create_dir_all(parent_dir(&out))?;
            write_cache(&g, &out)?;
            if let Some(p) = index {
                write_node_index(&g, p)?;
            }
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::Bowtie { graph, out, summary } => {
            let g = load_graph(&graph)?;
            let bt = bowtie_decompose(&g)?;
            write_bowtie(&out, &g, &bt)?;
            if let Some(p) = summary {
                write_bowtie_summary(&p, &bt)?;
            }
            for (r, count, ratio) in bt.table() {
                println!("{:<8} {count:>12} {ratio:>9}", r.label());
            }
        }
        Command::Distances {
            graph,
            direction,
            reverse,
            out,
        } => {
            let mut g = load_graph(&graph)?;
            if reverse {
                g = g.reversed();
            }
            let bt = bowtie_decompose(&g)?;
            write_distances(&out, &distance_distribution(&g, &bt, direction)?)?;
        }
        Command::Stats { graph, out, bin_ratio } => {
            let g = load_graph(&graph)?;
            write_stats(&out, &g, bin_ratio)?;
        }
        Command::Communities {
            graph,
            out,
            trials,
            bin_ratio,
        } => {
            let g = load_graph(&graph)?;
            let cfg = CommunityConfig {
                seed: cli.seed.unwrap_or(0),
                trials: trials.max(1),
                ..Default::default()
            };
            let p = detect_communities(&g, &cfg)?;
            write_communities(&out, &parent_dir(&out), &g, &p, bin_ratio)?;
            println!("{} communities, codelength {:.6} bits", p.module_count(), p.codelength);
        }
        Command::Extract {
            graph,
            hqs,
            threshold,
            degree_mode,
            out,
        } => {
            let g = load_graph(&graph)?;
            let view = g.substantial_view(threshold.threshold)?;
            write_extract(&out, &view, &load_hqs(hqs)?, degree_mode)?;
        }
        Command::Identify {
            graph,
            hqs,
            threshold,
            degree_mode,
            out,
            summary,
        } => {
            let g = load_graph(&graph)?;
            let view = g.substantial_view(threshold.threshold)?;
            let rep = classify_all(&view, &load_hqs(hqs)?, degree_mode);
            fs::create_dir_all(parent_dir(&out))?;
            write_keyfirms(&out, &rep.rows)?;
            if let Some(p) = summary {
                write_identify_summary(&p, &rep)?;
            }
            for (name, err) in &rep.failures {
                log::warn!("{name}: {err}");
            }
            let t = rep.totals;
            println!("holding {}, holding & conduit {}, conduit {}", t.holding, t.hc, t.conduit);
        }
        Command::Jurisdiction {
            graph,
            keyfirms,
            profiles,
            hqs,
            edge_values,
            threshold,
            bowtie,
            top_k,
            out,
        } => {
            let g = load_graph(&graph)?;
            let view = g.substantial_view(threshold.threshold)?;
            let values = match edge_values {
                Some(p) => Some(EdgeValues::load(p, &view)?),
                None => None,
            };
            let bt = if bowtie { Some(bowtie_decompose(&g)?) } else { None };
            let rows = load_keyfirms(&keyfirms)?;
            let hqs = load_hqs(hqs)?;
            let profiles = load_profiles(&profiles)?;
            let inputs = JurisdictionInputs {
                view: &view,
                rows: &rows,
                hqs: &hqs,
                profiles: &profiles,
                values: values.as_ref(),
                bowtie: bt.as_ref(),
                top_k,
            };
            write_jurisdiction_reports(&out, &inputs)?;
        }
        Command::Synth { spec, out } => {
            let mut s = match spec {
                Some(p) => SynthSpec::load(p)?,
                None => SynthSpec::default(),
            };
            if let Some(seed) = cli.seed {
                s.seed = seed;
            }
            let corpus = generate(&s)?;
            write_corpus(&corpus, &out)?;
            println!("{} nodes, {} links, {} MNCs", corpus.nodes.len(), corpus.edges.len(), corpus.hqs.len());
        }
        Command::Run {
            out,
            skip,
            rebuild_cache,
        } => {
            let Some(path) = cli.config else {
                bail!("`run` needs --config <file>");
            };
            let mut cfg = RunConfig::load(&path)?;
            if let Some(o) = out {
                cfg.out_dir = o;
            }
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            for s in skip {
                cfg.stages.set(s, false);
            }
            cfg.rebuild_cache |= rebuild_cache;
            let m = run_pipeline(&cfg)?;
            println!("manifest digest {}", m.digest());
        }
        Command::Report { run, out } => {
            let rep = report(&run, &out)?;
            print!("{}", rep.text);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
