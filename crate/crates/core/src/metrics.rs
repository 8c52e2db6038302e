//! Evaluation of link partitions against node metadata.
//!
//! A node belongs to every community of its incident links. Only nontrivial
//! communities count, meaning those whose links touch at least three distinct
//! nodes. Mutual information is reported in bits.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};

/// Smallest number of induced nodes for a community to count.
pub const NONTRIVIAL_NODES: usize = 3;
/// Upper bound on quantile bins for non-integer overlap attributes.
pub const MAX_BINS: usize = 8;

/// Per-node attributes keyed by original node id.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NodeMetadata {
    pub similarity: BTreeMap<u64, String>,
    pub overlap: BTreeMap<u64, f64>,
}

impl NodeMetadata {
    /// Restriction to the nodes of `x`.
    pub fn slice(&self, x: &SimplicialComplex) -> NodeMetadata {
        let ids: BTreeSet<u64> = x.original_ids().iter().copied().collect();
        NodeMetadata {
            similarity: self
                .similarity
                .iter()
                .filter(|(k, _)| ids.contains(k))
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
            overlap: self.overlap.iter().filter(|(k, _)| ids.contains(k)).map(|(k, v)| (*k, *v)).collect(),
        }
    }
}

fn check_len(x: &SimplicialComplex, assignment: &[usize]) -> Result<()> {
    if assignment.len() != x.n1() {
        return Err(Error::DimensionMismatch {
            expected: x.n1(),
            found: assignment.len(),
        });
    }
    Ok(())
}

/// Community ids of the links incident to each node.
pub fn node_memberships(x: &SimplicialComplex, assignment: &[usize]) -> Result<Vec<BTreeSet<usize>>> {
    check_len(x, assignment)?;
    Ok((0..x.n0())
        .map(|i| x.incident_links(i).iter().map(|&k| assignment[k]).collect())
        .collect())
}

/// Whether each community id in `0..=max` induces at least three nodes.
pub fn nontrivial_communities(x: &SimplicialComplex, assignment: &[usize]) -> Result<Vec<bool>> {
    check_len(x, assignment)?;
    let n_comm = assignment.iter().max().map_or(0, |m| m + 1);
    let mut nodes: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n_comm];
    for (k, &c) in assignment.iter().enumerate() {
        let l = x.links()[k];
        nodes[c].insert(l.lo);
        nodes[c].insert(l.hi);
    }
    Ok(nodes.iter().map(|s| s.len() >= NONTRIVIAL_NODES).collect())
}

/// Memberships restricted to nontrivial communities.
pub fn nontrivial_memberships(x: &SimplicialComplex, assignment: &[usize]) -> Result<Vec<BTreeSet<usize>>> {
    let keep = nontrivial_communities(x, assignment)?;
    Ok(node_memberships(x, assignment)?
        .into_iter()
        .map(|s| s.into_iter().filter(|&c| keep[c]).collect())
        .collect())
}

/// A metric value together with the number of nodes dropped for missing metadata.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    /// `None` when the metric is undefined on this input.
    pub value: Option<f64>,
    pub dropped: usize,
}

/// Mean label agreement over node pairs sharing a nontrivial community,
/// divided by the mean over all node pairs.
pub fn enrichment(x: &SimplicialComplex, assignment: &[usize], meta: &NodeMetadata) -> Result<Measured> {
    let member = nontrivial_memberships(x, assignment)?;
    let labelled: Vec<(usize, &str)> = (0..x.n0())
        .filter_map(|i| meta.similarity.get(&x.original_id(i)).map(|s| (i, s.as_str())))
        .collect();
    let dropped = x.n0() - labelled.len();
    if dropped > 0 {
        log::info!("enrichment: {dropped} nodes without a similarity label");
    }
    let (mut all_n, mut all_s, mut in_n, mut in_s) = (0u64, 0u64, 0u64, 0u64);
    for (p, &(i, li)) in labelled.iter().enumerate() {
        for &(j, lj) in &labelled[p + 1..] {
            let s = u64::from(li == lj);
            all_n += 1;
            all_s += s;
            if !member[i].is_disjoint(&member[j]) {
                in_n += 1;
                in_s += s;
            }
        }
    }
    let value = if in_n == 0 || all_s == 0 {
        None
    } else {
        Some((in_s as f64 / in_n as f64) / (all_s as f64 / all_n as f64))
    };
    Ok(Measured { value, dropped })
}

fn is_integral(v: &[f64]) -> bool {
    v.iter().all(|y| y.is_finite() && y.fract() == 0.0)
}

/// Discretizes an attribute: integers are kept as they are, anything else
/// goes into `min(8, distinct)` quantile bins with ties kept together.
pub fn discretize(values: &[f64]) -> Vec<i64> {
    if is_integral(values) {
        return values.iter().map(|&v| v as i64).collect();
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut distinct = sorted.clone();
    distinct.dedup();
    let bins = distinct.len().min(MAX_BINS);
    let n = values.len();
    values
        .iter()
        .map(|v| {
            let below = sorted.partition_point(|s| s < v);
            ((bins * below / n).min(bins - 1)) as i64
        })
        .collect()
}

/// Plug-in mutual information in bits between two discrete sequences.
pub fn mutual_information(a: &[i64], b: &[i64]) -> f64 {
    let n = a.len().min(b.len());
    if n == 0 {
        return 0.0;
    }
    let mut joint: HashMap<(i64, i64), usize> = HashMap::new();
    let mut pa: HashMap<i64, usize> = HashMap::new();
    let mut pb: HashMap<i64, usize> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1;
        *pa.entry(x).or_default() += 1;
        *pb.entry(y).or_default() += 1;
    }
    let nf = n as f64;
    let mut cells: Vec<_> = joint.into_iter().collect();
    cells.sort_unstable();
    let mi: f64 = cells
        .iter()
        .map(|&((x, y), c)| {
            let c = c as f64;
            c / nf * (c * nf / (pa[&x] as f64 * pb[&y] as f64)).log2()
        })
        .sum();
    mi.max(0.0)
}

/// Mutual information between the number of nontrivial memberships per node
/// and the overlap attribute.
pub fn overlap_quality(x: &SimplicialComplex, assignment: &[usize], meta: &NodeMetadata) -> Result<Measured> {
    let member = nontrivial_memberships(x, assignment)?;
    let (m, y): (Vec<i64>, Vec<f64>) = (0..x.n0())
        .filter_map(|i| meta.overlap.get(&x.original_id(i)).map(|&v| (member[i].len() as i64, v)))
        .unzip();
    let dropped = x.n0() - m.len();
    if dropped > 0 {
        log::info!("overlap quality: {dropped} nodes without an overlap attribute");
    }
    let value = (!m.is_empty()).then(|| mutual_information(&m, &discretize(&y)));
    Ok(Measured { value, dropped })
}

/// Fraction of nodes in at least one nontrivial community.
pub fn community_coverage(x: &SimplicialComplex, assignment: &[usize]) -> Result<f64> {
    let member = nontrivial_memberships(x, assignment)?;
    if member.is_empty() {
        return Ok(0.0);
    }
    Ok(member.iter().filter(|s| !s.is_empty()).count() as f64 / member.len() as f64)
}

/// Mean number of nontrivial memberships per node.
pub fn overlap_coverage(x: &SimplicialComplex, assignment: &[usize]) -> Result<f64> {
    let member = nontrivial_memberships(x, assignment)?;
    if member.is_empty() {
        return Ok(0.0);
    }
    Ok(member.iter().map(BTreeSet::len).sum::<usize>() as f64 / member.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub network: String,
    pub method: String,
    pub t: usize,
    pub enrichment: Option<f64>,
    /// Bits.
    pub overlap_quality: Option<f64>,
    pub community_coverage: f64,
    pub overlap_coverage: f64,
    pub dropped_similarity: usize,
    pub dropped_overlap: usize,
}

impl MetricsReport {
    pub fn values(&self) -> [Option<f64>; 4] {
        [
            self.enrichment,
            self.overlap_quality,
            Some(self.community_coverage),
            Some(self.overlap_coverage),
        ]
    }
}

pub const METRIC_NAMES: [&str; 4] = ["enrichment", "overlap_quality", "community_coverage", "overlap_coverage"];

pub fn evaluate(
    x: &SimplicialComplex,
    assignment: &[usize],
    meta: &NodeMetadata,
    network: &str,
    method: &str,
    t: usize,
) -> Result<MetricsReport> {
    let e = enrichment(x, assignment, meta)?;
    let q = overlap_quality(x, assignment, meta)?;
    Ok(MetricsReport {
        network: network.to_string(),
        method: method.to_string(),
        t,
        enrichment: e.value,
        overlap_quality: q.value,
        community_coverage: community_coverage(x, assignment)?,
        overlap_coverage: overlap_coverage(x, assignment)?,
        dropped_similarity: e.dropped,
        dropped_overlap: q.dropped,
    })
}

/// Per-method means over networks; undefined values are skipped, and a metric
/// undefined on every network stays undefined.
pub fn average_by_method(reports: &[MetricsReport]) -> Vec<(String, [Option<f64>; 4])> {
    let mut acc: BTreeMap<&str, [(f64, usize); 4]> = BTreeMap::new();
    for r in reports {
        let slot = acc.entry(r.method.as_str()).or_insert([(0.0, 0); 4]);
        for (s, v) in slot.iter_mut().zip(r.values()) {
            if let Some(v) = v {
                s.0 += v;
                s.1 += 1;
            }
        }
    }
    acc.into_iter()
        .map(|(m, s)| (m.to_string(), s.map(|(sum, n)| (n > 0).then(|| sum / n as f64))))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeRow {
    pub method: String,
    pub normalized: [f64; 4],
    /// Metrics that were undefined and entered the sum as zero.
    pub undefined: [bool; 4],
    pub composite: f64,
}

/// Divides each metric by its maximum over methods and sums the four results.
pub fn composite(methods: &[(String, [Option<f64>; 4])]) -> Result<Vec<CompositeRow>> {
    if methods.len() < 2 {
        return Err(Error::Config("composite scores need at least two methods".into()));
    }
    let mut max = [0.0f64; 4];
    for (_, v) in methods {
        for (m, x) in max.iter_mut().zip(v) {
            if let Some(x) = x {
                *m = m.max(*x);
            }
        }
    }
    Ok(methods
        .iter()
        .map(|(name, v)| {
            let mut normalized = [0.0; 4];
            let mut undefined = [false; 4];
            for k in 0..4 {
                match v[k] {
                    Some(x) if max[k] > 0.0 => normalized[k] = x / max[k],
                    Some(_) => {}
                    None => undefined[k] = true,
                }
            }
            CompositeRow {
                method: name.clone(),
                composite: normalized.iter().sum(),
                normalized,
                undefined,
            }
        })
        .collect())
}
