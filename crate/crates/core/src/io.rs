//! Readers and writers for complexes, metadata, partitions and reports.
//!
//! Simplex lists hold one simplex per line as whitespace- or comma-separated
//! node ids; `#` starts a comment. Partition and report files are CSV with a
//! header row, and every writer has a matching reader.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::complex::{build_complex, BuildOptions, Link, SimplicialComplex};
use crate::error::{Error, Result};
use crate::hodge::{boundary_1, boundary_2, hodge_l1, normalized_l1, DTot};
use crate::lifting::{transition_matrix, LiftedLineGraph};
use crate::metrics::{CompositeRow, MetricsReport, NodeMetadata, METRIC_NAMES};
use crate::sparse::SparseMatrix;

pub fn read_simplices<R: BufRead>(r: R) -> Result<Vec<Vec<u64>>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let ids = body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<u64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse {
                line: i + 1,
                msg: format!("bad node id: {e}"),
            })?;
        out.push(ids);
    }
    Ok(out)
}

pub fn write_simplices<W: Write>(x: &SimplicialComplex, mut w: W) -> Result<()> {
    for s in x.simplices() {
        let line: Vec<String> = s.iter().map(u64::to_string).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    Ok(BufWriter::new(File::create(path)?))
}

/// Reads a simplex list plus an optional separate triangle list.
pub fn read_complex(path: &Path, triangles: Option<&Path>, opts: BuildOptions) -> Result<SimplicialComplex> {
    let mut simplices = read_simplices(open(path)?)?;
    if let Some(t) = triangles {
        let tris = read_simplices(open(t)?)?;
        if let Some(bad) = tris.iter().find(|s| s.len() != 3) {
            return Err(Error::Config(format!("triangle file holds a simplex of size {}", bad.len())));
        }
        simplices.extend(tris);
    }
    build_complex(&simplices, opts)
}

pub fn write_complex(x: &SimplicialComplex, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    write_simplices(x, &mut w)?;
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct MetadataRow {
    node_id: u64,
    similarity_attr: Option<String>,
    overlap_attr: Option<f64>,
}

/// Metadata CSV with header `node_id,similarity_attr,overlap_attr`; empty fields are missing values.
pub fn read_metadata<R: Read>(r: R) -> Result<NodeMetadata> {
    let mut meta = NodeMetadata::default();
    for row in csv::Reader::from_reader(r).deserialize() {
        let row: MetadataRow = row?;
        if let Some(s) = row.similarity_attr.filter(|s| !s.is_empty()) {
            meta.similarity.insert(row.node_id, s);
        }
        if let Some(v) = row.overlap_attr {
            meta.overlap.insert(row.node_id, v);
        }
    }
    Ok(meta)
}

pub fn write_metadata<W: Write>(meta: &NodeMetadata, w: W) -> Result<()> {
    let mut ids: Vec<u64> = meta.similarity.keys().chain(meta.overlap.keys()).copied().collect();
    ids.sort_unstable();
    ids.dedup();
    let mut out = csv::Writer::from_writer(w);
    for id in ids {
        out.serialize(MetadataRow {
            node_id: id,
            similarity_attr: meta.similarity.get(&id).cloned(),
            overlap_attr: meta.overlap.get(&id).copied(),
        })?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct PartitionRow {
    link_lo: u64,
    link_hi: u64,
    community: usize,
}

/// `link_lo,link_hi,community` in original node ids, one row per link in canonical order.
pub fn write_partition<W: Write>(x: &SimplicialComplex, assignment: &[usize], w: W) -> Result<()> {
    if assignment.len() != x.n1() {
        return Err(Error::DimensionMismatch {
            expected: x.n1(),
            found: assignment.len(),
        });
    }
    let mut out = csv::Writer::from_writer(w);
    for (l, &c) in x.links().iter().zip(assignment) {
        out.serialize(PartitionRow {
            link_lo: x.original_id(l.lo),
            link_hi: x.original_id(l.hi),
            community: c,
        })?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_partition<R: Read>(x: &SimplicialComplex, r: R) -> Result<Vec<usize>> {
    let dense: std::collections::HashMap<u64, usize> =
        x.original_ids().iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let mut assignment = vec![usize::MAX; x.n1()];
    for row in csv::Reader::from_reader(r).deserialize() {
        let row: PartitionRow = row?;
        let lookup = |id: u64| dense.get(&id).copied();
        let (Some(a), Some(b)) = (lookup(row.link_lo), lookup(row.link_hi)) else {
            return Err(Error::Config(format!("unknown node in link ({}, {})", row.link_lo, row.link_hi)));
        };
        let k = x.link_index(Link::new(a, b)).ok_or(Error::UnknownLink(a, b))?;
        assignment[k] = row.community;
    }
    if let Some(k) = assignment.iter().position(|&c| c == usize::MAX) {
        let l = x.links()[k];
        return Err(Error::Config(format!(
            "partition misses link ({}, {})",
            x.original_id(l.lo),
            x.original_id(l.hi)
        )));
    }
    Ok(assignment)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionSidecar {
    pub method: String,
    pub t: usize,
    pub seed: Option<u64>,
    pub score: f64,
    pub n_communities: usize,
    pub condition_star: Option<bool>,
}

pub fn write_json<T: Serialize, W: Write>(value: &T, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>, R: Read>(r: R) -> Result<T> {
    Ok(serde_json::from_reader(r)?)
}

/// Writes `<stem>.csv` and `<stem>.json` next to each other.
pub fn save_partition(
    x: &SimplicialComplex,
    assignment: &[usize],
    sidecar: &PartitionSidecar,
    dir: &Path,
    stem: &str,
) -> Result<()> {
    let mut w = create(&dir.join(format!("{stem}.csv")))?;
    write_partition(x, assignment, &mut w)?;
    w.flush()?;
    let mut j = create(&dir.join(format!("{stem}.json")))?;
    write_json(sidecar, &mut j)?;
    j.flush()?;
    Ok(())
}

pub fn load_partition(x: &SimplicialComplex, dir: &Path, stem: &str) -> Result<(Vec<usize>, PartitionSidecar)> {
    let a = read_partition(x, open(&dir.join(format!("{stem}.csv")))?)?;
    let s = read_json(open(&dir.join(format!("{stem}.json")))?)?;
    Ok((a, s))
}

pub fn write_reports<W: Write>(reports: &[MetricsReport], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in reports {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_reports<R: Read>(r: R) -> Result<Vec<MetricsReport>> {
    Ok(csv::Reader::from_reader(r).deserialize().collect::<std::result::Result<_, _>>()?)
}

#[derive(Debug, Serialize, Deserialize)]
struct CompositeCsvRow {
    method: String,
    enrichment: f64,
    overlap_quality: f64,
    community_coverage: f64,
    overlap_coverage: f64,
    composite: f64,
    undefined: String,
}

pub fn write_composite<W: Write>(rows: &[CompositeRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        let undefined: Vec<&str> = METRIC_NAMES
            .iter()
            .zip(r.undefined)
            .filter(|(_, u)| *u)
            .map(|(n, _)| *n)
            .collect();
        out.serialize(CompositeCsvRow {
            method: r.method.clone(),
            enrichment: r.normalized[0],
            overlap_quality: r.normalized[1],
            community_coverage: r.normalized[2],
            overlap_coverage: r.normalized[3],
            composite: r.composite,
            undefined: undefined.join(";"),
        })?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_composite<R: Read>(r: R) -> Result<Vec<CompositeRow>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .map(|row| {
            let row: CompositeCsvRow = row?;
            let flags: Vec<&str> = row.undefined.split(';').collect();
            Ok(CompositeRow {
                method: row.method,
                normalized: [
                    row.enrichment,
                    row.overlap_quality,
                    row.community_coverage,
                    row.overlap_coverage,
                ],
                undefined: METRIC_NAMES.map(|n| flags.contains(&n)),
                composite: row.composite,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongRow {
    pub metric: String,
    pub t: usize,
    pub method: String,
    pub value: f64,
}

/// One row per defined metric value, keyed by (metric, t, method); networks are averaged.
pub fn long_format(reports: &[MetricsReport]) -> Vec<LongRow> {
    let mut acc: std::collections::BTreeMap<(usize, usize, String), (f64, usize)> = Default::default();
    for r in reports {
        for (k, v) in r.values().into_iter().enumerate() {
            if let Some(v) = v {
                let e = acc.entry((k, r.t, r.method.clone())).or_insert((0.0, 0));
                e.0 += v;
                e.1 += 1;
            }
        }
    }
    acc.into_iter()
        .map(|((k, t, method), (s, n))| LongRow {
            metric: METRIC_NAMES[k].to_string(),
            t,
            method,
            value: s / n as f64,
        })
        .collect()
}

pub fn write_long<W: Write>(rows: &[LongRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_long<R: Read>(r: R) -> Result<Vec<LongRow>> {
    Ok(csv::Reader::from_reader(r).deserialize().collect::<std::result::Result<_, _>>()?)
}

/// `internal,original` node id pairs.
pub fn write_node_map<W: Write>(x: &SimplicialComplex, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["internal", "original"])?;
    for (i, id) in x.original_ids().iter().enumerate() {
        out.write_record([i.to_string(), id.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

fn dump<T: crate::sparse::Scalar + std::fmt::Display>(m: &SparseMatrix<T>, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    m.write_coordinate(&mut w)?;
    w.flush()?;
    Ok(())
}

/// Writes `B1`, `B2`, `L1`, `D_tot` and the normalized Laplacian as coordinate dumps.
pub fn dump_operators(x: &SimplicialComplex, dir: &Path) -> Result<()> {
    dump(&boundary_1(x), &dir.join("B1.txt"))?;
    dump(&boundary_2(x), &dir.join("B2.txt"))?;
    dump(&hodge_l1(x), &dir.join("L1.txt"))?;
    dump(&SparseMatrix::diagonal(DTot::of(x).as_slice()), &dir.join("Dtot.txt"))?;
    dump(&normalized_l1(x)?, &dir.join("L1_normalized.txt"))?;
    let mut w = create(&dir.join("nodes.csv"))?;
    write_node_map(x, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Writes the lifted adjacency, its three parts and the transition matrix.
pub fn dump_lifted(g: &LiftedLineGraph, dir: &Path) -> Result<()> {
    dump(&g.adjacency(), &dir.join("A_hat.txt"))?;
    dump(g.a_lower(), &dir.join("A_lower.txt"))?;
    dump(g.a_upper(), &dir.join("A_upper.txt"))?;
    dump(&SparseMatrix::diagonal(g.a_self()), &dir.join("A_self.txt"))?;
    dump(&transition_matrix(g)?, &dir.join("P_hat.txt"))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::synth_two_triangles;

    #[test]
    fn simplex_lists() {
        let text = "# a comment\n1 2 3\n3,4\n\n3 5 # trailing\n4 5\n";
        let s = read_simplices(text.as_bytes()).unwrap();
        assert_eq!(s, vec![vec![1, 2, 3], vec![3, 4], vec![3, 5], vec![4, 5]]);
        let x = build_complex(&s, BuildOptions::default()).unwrap();
        assert_eq!(x, synth_two_triangles());
        let mut buf = Vec::new();
        write_simplices(&x, &mut buf).unwrap();
        let back = build_complex(&read_simplices(&buf[..]).unwrap(), BuildOptions::default()).unwrap();
        assert_eq!(back, x);
        assert!(matches!(
            read_simplices("1 x\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn metadata_roundtrip_with_missing_values() {
        let text = "node_id,similarity_attr,overlap_attr\n1,a,2\n2,,1.5\n3,b,\n";
        let m = read_metadata(text.as_bytes()).unwrap();
        assert_eq!(m.similarity.len(), 2);
        assert_eq!(m.overlap[&2], 1.5);
        assert!(!m.overlap.contains_key(&3));
        let mut buf = Vec::new();
        write_metadata(&m, &mut buf).unwrap();
        assert_eq!(read_metadata(&buf[..]).unwrap(), m);
    }

    #[test]
    fn partition_roundtrip() {
        let x = synth_two_triangles();
        let a = vec![0, 0, 0, 1, 1, 1];
        let mut buf = Vec::new();
        write_partition(&x, &a, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("link_lo,link_hi,community\n1,2,0\n"));
        assert_eq!(read_partition(&x, &buf[..]).unwrap(), a);
        assert!(read_partition(&x, "link_lo,link_hi,community\n1,2,0\n".as_bytes()).is_err());
        assert!(read_partition(&x, "link_lo,link_hi,community\n1,5,0\n".as_bytes()).is_err());
    }
}
