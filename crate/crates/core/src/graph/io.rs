//! CSV ingestion for node metadata and shareholding links.

use std::collections::HashSet;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use log::warn;

use super::{Jurisdiction, NodeRecord, OwnershipEdge, OwnershipGraph};
use crate::error::{Error, Result};

pub const NODE_HEADER: [&str; 5] = ["node_id", "jurisdiction", "nace_section", "name", "is_hq"];
pub const EDGE_HEADER: [&str; 3] = ["subsidiary_id", "shareholder_id", "pct"];

fn open_reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(file))
}

fn check_header(rdr: &mut csv::Reader<File>, path: &Path, expected: &[&str]) -> Result<()> {
    let header = rdr.headers()?;
    let got: Vec<&str> = header.iter().collect();
    if got != expected {
        return Err(Error::Malformed {
            path: path.to_path_buf(),
            line: 1,
            message: format!("expected header `{}`, found `{}`", expected.join(","), got.join(",")),
        });
    }
    Ok(())
}

fn parse_flag(raw: &str) -> Option<bool> {
    match raw.to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "y" | "t" => Some(true),
        "" | "0" | "false" | "no" | "n" | "f" => Some(false),
        _ => None,
    }
}

fn parse_section(raw: &str) -> Option<char> {
    let mut chars = raw.chars();
    match (chars.next(), chars.next()) {
        (None, _) => Some('V'),
        (Some(c), None) if c.is_ascii_alphabetic() => Some(c.to_ascii_uppercase()),
        _ => None,
    }
}

/// Reads the node file. Duplicate ids are rejected.
pub fn load_nodes(path: impl AsRef<Path>) -> Result<Vec<NodeRecord>> {
    let path = path.as_ref();
    let mut rdr = open_reader(path)?;
    check_header(&mut rdr, path, &NODE_HEADER)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let malformed = |message: String| Error::Malformed {
            path: path.to_path_buf(),
            line,
            message,
        };
        if row.len() != NODE_HEADER.len() {
            return Err(malformed(format!("expected {} fields, found {}", NODE_HEADER.len(), row.len())));
        }
        let node_id = row[0].to_string();
        if node_id.is_empty() {
            return Err(malformed("empty node_id".into()));
        }
        let jurisdiction = Jurisdiction::parse(&row[1])
            .ok_or_else(|| malformed(format!("invalid jurisdiction `{}`", &row[1])))?;
        let industry_section =
            parse_section(&row[2]).ok_or_else(|| malformed(format!("invalid NACE section `{}`", &row[2])))?;
        let is_headquarters =
            parse_flag(&row[4]).ok_or_else(|| malformed(format!("invalid is_hq flag `{}`", &row[4])))?;
        if !seen.insert(node_id.clone()) {
            return Err(Error::DuplicateNode(node_id));
        }
        out.push(NodeRecord {
            node_id,
            jurisdiction,
            industry_section,
            name: row[3].to_string(),
            is_headquarters,
        });
    }
    Ok(out)
}

/// Parsed edge file plus the counters reported during ingestion.
#[derive(Debug, Clone, Default)]
pub struct EdgeLoad {
    pub edges: Vec<OwnershipEdge>,
    pub self_loops_dropped: usize,
    /// Rows whose pct was blank; kept with pct = 0, so never substantial.
    pub blank_pct: usize,
}

pub fn load_edges(path: impl AsRef<Path>) -> Result<EdgeLoad> {
    let path = path.as_ref();
    let mut rdr = open_reader(path)?;
    check_header(&mut rdr, path, &EDGE_HEADER)?;
    let mut load = EdgeLoad::default();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != EDGE_HEADER.len() {
            return Err(Error::Malformed {
                path: path.to_path_buf(),
                line,
                message: format!("expected 3 fields, found {}", row.len()),
            });
        }
        let pct = if row[2].is_empty() {
            load.blank_pct += 1;
            0.0
        } else {
            row[2].parse::<f64>().map_err(|_| Error::Malformed {
                path: path.to_path_buf(),
                line,
                message: format!("invalid pct `{}`", &row[2]),
            })?
        };
        if !(0.0..=100.0).contains(&pct) {
            return Err(Error::PctOutOfRange {
                path: path.to_path_buf(),
                line,
                value: pct,
            });
        }
        if row[0] == row[1] {
            load.self_loops_dropped += 1;
            continue;
        }
        load.edges.push(OwnershipEdge {
            subsidiary: row[0].to_string(),
            shareholder: row[1].to_string(),
            pct,
        });
    }
    if load.self_loops_dropped > 0 {
        warn!("{}: dropped {} self-loop rows", path.display(), load.self_loops_dropped);
    }
    if load.blank_pct > 0 {
        warn!("{}: {} rows without pct ingested as 0%", path.display(), load.blank_pct);
    }
    Ok(load)
}

/// Writes the `node_id,index` mapping used by every index-based output.
pub fn write_node_index(graph: &OwnershipGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(["node_id", "index"])?;
    for (i, n) in graph.nodes().iter().enumerate() {
        w.write_record([n.node_id.as_str(), &i.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
