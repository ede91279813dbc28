//! Versioned binary snapshot of a built graph.
//!
//! Layout (little endian): magic `OWNETGC\0`, u32 version, u64 node count,
//! per node `id, jurisdiction, name` as u32-length-prefixed UTF-8 plus a u8
//! NACE letter and a u8 HQ flag, u64 edge count, then `(u32, u32, f64)` per edge.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Jurisdiction, NodeIx, NodeRecord, OwnershipGraph};
use crate::error::{Error, Result};
use crate::graph::Adjacency;

const MAGIC: &[u8; 8] = b"OWNETGC\0";
pub const CACHE_VERSION: u32 = 1;

pub fn write_cache(graph: &OwnershipGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    w.write_all(MAGIC).map_err(io)?;
    w.write_all(&CACHE_VERSION.to_le_bytes()).map_err(io)?;
    w.write_all(&(graph.node_count() as u64).to_le_bytes()).map_err(io)?;
    for n in graph.nodes() {
        for s in [n.node_id.as_str(), n.jurisdiction.as_str(), n.name.as_str()] {
            w.write_all(&(s.len() as u32).to_le_bytes()).map_err(io)?;
            w.write_all(s.as_bytes()).map_err(io)?;
        }
        w.write_all(&[n.industry_section as u8, n.is_headquarters as u8]).map_err(io)?;
    }
    w.write_all(&(graph.edge_count() as u64).to_le_bytes()).map_err(io)?;
    for (u, v, p) in graph.edges() {
        w.write_all(&u.to_le_bytes()).map_err(io)?;
        w.write_all(&v.to_le_bytes()).map_err(io)?;
        w.write_all(&p.to_le_bytes()).map_err(io)?;
    }
    w.flush().map_err(io)
}

struct Cursor<'a, R> {
    inner: R,
    path: &'a Path,
}

impl<R: Read> Cursor<'_, R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.inner.read_exact(&mut buf).map_err(|e| Error::Cache {
            path: self.path.to_path_buf(),
            message: format!("truncated file ({e})"),
        })?;
        Ok(buf)
    }

    fn u32(&mut self) -> Result<u32> {
        self.bytes::<4>().map(u32::from_le_bytes)
    }

    fn u64(&mut self) -> Result<u64> {
        self.bytes::<8>().map(u64::from_le_bytes)
    }

    fn string(&mut self) -> Result<String> {
        let len = self.u32()? as usize;
        let mut buf = vec![0u8; len];
        self.inner.read_exact(&mut buf).map_err(|e| self.corrupt(format!("truncated string ({e})")))?;
        String::from_utf8(buf).map_err(|_| self.corrupt("invalid UTF-8".into()))
    }

    fn corrupt(&self, message: String) -> Error {
        Error::Cache {
            path: self.path.to_path_buf(),
            message,
        }
    }
}

pub fn read_cache(path: impl AsRef<Path>) -> Result<OwnershipGraph> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut c = Cursor {
        inner: BufReader::new(file),
        path,
    };
    if &c.bytes::<8>()? != MAGIC {
        return Err(c.corrupt("not a graph cache".into()));
    }
    let version = c.u32()?;
    if version != CACHE_VERSION {
        return Err(c.corrupt(format!("version {version}, expected {CACHE_VERSION}")));
    }
    let n = c.u64()? as usize;
    let mut nodes = Vec::with_capacity(n);
    for _ in 0..n {
        let node_id = c.string()?;
        let jur = c.string()?;
        let jurisdiction = Jurisdiction::parse(&jur).ok_or_else(|| c.corrupt(format!("bad jurisdiction {jur}")))?;
        let name = c.string()?;
        let [section, hq] = c.bytes::<2>()?;
        nodes.push(NodeRecord {
            node_id,
            jurisdiction,
            industry_section: section as char,
            name,
            is_headquarters: hq != 0,
        });
    }
    let m = c.u64()? as usize;
    let mut triples = Vec::with_capacity(m);
    for _ in 0..m {
        let u: NodeIx = c.u32()?;
        let v: NodeIx = c.u32()?;
        let p = f64::from_le_bytes(c.bytes::<8>()?);
        if u as usize >= n || v as usize >= n {
            return Err(c.corrupt(format!("edge ({u}, {v}) out of range")));
        }
        triples.push((u, v, p));
    }
    let mut seen = std::collections::HashSet::with_capacity(n);
    if let Some(dup) = nodes.iter().find(|r| !seen.insert(r.node_id.as_str())) {
        return Err(c.corrupt(format!("duplicate node id {}", dup.node_id)));
    }
    Ok(OwnershipGraph::from_indexed(nodes, triples))
}
