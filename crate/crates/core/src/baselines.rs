//! Graph-only link partitioning baselines.
//!
//! Three weighted line graphs (`C`, `D`, `E1`) partitioned by Louvain, and a
//! dendrogram method (`S`) that agglomerates links by neighbourhood similarity
//! and cuts at maximal partition density. All of them look only at the
//! skeleton; filled triangles are ignored.
//!
//! The entry formulas are reconstructions of the usual definitions:
//!
//! * `C[a,b] = 1` when links `a != b` share a node.
//! * `D[a,b] = sum over shared nodes i of 1 / (k_i - 1)`, `a != b`.
//! * `E1[a,b] = sum over shared nodes i of 1 / k_i`, including `a == b`
//!   unless the self term is switched off.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::complex::{Link, SimplicialComplex};
use crate::error::{Error, Result};
use crate::louvain::{canonical_labels, louvain, merge_to_count, modularity, Partition, WeightedGraph};
use crate::partitioner::LinkOrder;
use crate::sparse::SparseMatrix;
use crate::stability::{effective_graph, DENSE_STATE_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LineGraphKind {
    C,
    D,
    E1,
}

impl LineGraphKind {
    pub fn name(self) -> &'static str {
        match self {
            LineGraphKind::C => "C",
            LineGraphKind::D => "D",
            LineGraphKind::E1 => "E1",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineGraphVariant {
    pub kind: LineGraphKind,
    pub adjacency: WeightedGraph,
}

/// Weighted line graph of the skeleton. `e1_self` controls the diagonal of `E1`.
pub fn line_graph(x: &SimplicialComplex, kind: LineGraphKind, e1_self: bool) -> LineGraphVariant {
    let mut trip = Vec::new();
    for i in 0..x.n0() {
        let inc = x.incident_links(i);
        let k = inc.len() as f64;
        let w = match kind {
            LineGraphKind::C => 1.0,
            LineGraphKind::D if inc.len() >= 2 => 1.0 / (k - 1.0),
            LineGraphKind::D => continue,
            LineGraphKind::E1 => 1.0 / k,
        };
        for (p, &a) in inc.iter().enumerate() {
            for &b in &inc[p + 1..] {
                trip.push((a, b, w));
                trip.push((b, a, w));
            }
            if kind == LineGraphKind::E1 && e1_self {
                trip.push((a, a, w));
            }
        }
    }
    LineGraphVariant {
        kind,
        adjacency: SparseMatrix::from_triplets(x.n1(), x.n1(), trip),
    }
}

fn closed_neighborhood(x: &SimplicialComplex, node: usize) -> BTreeSet<usize> {
    let mut s: BTreeSet<usize> = x.neighbors(node).into_iter().collect();
    s.insert(node);
    s
}

/// Jaccard similarity of the inclusive neighbourhoods of the two far endpoints;
/// zero for links without a shared node.
pub fn link_similarity(x: &SimplicialComplex, e1: Link, e2: Link) -> f64 {
    if e1 == e2 {
        return 1.0;
    }
    let shared = [e1.lo, e1.hi].into_iter().find(|&v| e2.contains(v));
    let Some(k) = shared else { return 0.0 };
    let (i, j) = (e1.other(k).unwrap(), e2.other(k).unwrap());
    let (ni, nj) = (closed_neighborhood(x, i), closed_neighborhood(x, j));
    let inter = ni.intersection(&nj).count();
    let union = ni.union(&nj).count();
    inter as f64 / union as f64
}

/// Partition density `(2/M) sum_c m_c (m_c - n_c + 1) / ((n_c - 2)(n_c - 1))`;
/// communities inducing at most two nodes contribute zero.
pub fn partition_density(x: &SimplicialComplex, assignment: &[usize]) -> Result<f64> {
    if assignment.len() != x.n1() {
        return Err(Error::DimensionMismatch {
            expected: x.n1(),
            found: assignment.len(),
        });
    }
    if assignment.is_empty() {
        return Ok(0.0);
    }
    let n_comm = assignment.iter().max().map_or(0, |m| m + 1);
    let mut links = vec![0usize; n_comm];
    let mut nodes: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n_comm];
    for (k, &c) in assignment.iter().enumerate() {
        let l = x.links()[k];
        links[c] += 1;
        nodes[c].insert(l.lo);
        nodes[c].insert(l.hi);
    }
    let total: f64 = links
        .iter()
        .zip(&nodes)
        .filter(|(_, n)| n.len() > 2)
        .map(|(&m, n)| {
            let (m, n) = (m as f64, n.len() as f64);
            m * (m - (n - 1.0)) / ((n - 2.0) * (n - 1.0))
        })
        .sum();
    Ok(2.0 * total / x.n1() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    /// Cluster ids: leaves are `0..n_leaves`, merge `k` creates cluster `n_leaves + k`.
    pub a: usize,
    pub b: usize,
    pub similarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub n_leaves: usize,
    pub merges: Vec<Merge>,
}

struct UnionFind {
    parent: Vec<usize>,
    cluster: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            cluster: (0..n).collect(),
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }
}

/// Candidate pairs of adjacent links with their similarity, sorted by
/// decreasing similarity and then lexicographically.
fn similarity_pairs(x: &SimplicialComplex) -> Vec<(f64, usize, usize)> {
    let mut pairs = Vec::new();
    for i in 0..x.n0() {
        let inc = x.incident_links(i);
        for (p, &a) in inc.iter().enumerate() {
            for &b in &inc[p + 1..] {
                let (a, b) = (a.min(b), a.max(b));
                pairs.push((link_similarity(x, x.links()[a], x.links()[b]), a, b));
            }
        }
    }
    pairs.sort_by(|p, q| q.0.total_cmp(&p.0).then((p.1, p.2).cmp(&(q.1, q.2))));
    pairs.dedup_by(|p, q| (p.1, p.2) == (q.1, q.2));
    pairs
}

/// Single-linkage agglomeration of links over [`link_similarity`].
pub fn dendrogram(x: &SimplicialComplex) -> Dendrogram {
    let n = x.n1();
    let mut uf = UnionFind::new(n);
    let mut merges = Vec::new();
    for (s, a, b) in similarity_pairs(x) {
        let (ra, rb) = (uf.find(a), uf.find(b));
        if ra == rb {
            continue;
        }
        let (ca, cb) = (uf.cluster[ra], uf.cluster[rb]);
        merges.push(Merge {
            a: ca.min(cb),
            b: ca.max(cb),
            similarity: s,
        });
        uf.parent[rb] = ra;
        uf.cluster[ra] = n + merges.len() - 1;
    }
    Dendrogram { n_leaves: n, merges }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DendrogramCut {
    pub partition: Partition,
    pub density: f64,
    /// Similarity of the last merge included; `None` for the all-singleton cut.
    pub similarity: Option<f64>,
}

/// Cuts the dendrogram after the similarity level with the highest partition
/// density. The all-singleton state is a candidate, and the earliest level
/// wins ties.
pub fn dendrogram_cut(x: &SimplicialComplex) -> Result<DendrogramCut> {
    let n = x.n1();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let d = dendrogram(x);
    let mut leaf_uf = UnionFind::new(2 * n);
    let mut best_assign: Vec<usize> = (0..n).collect();
    let mut best = partition_density(x, &best_assign)?;
    let mut best_level = None;
    let mut idx = 0;
    while idx < d.merges.len() {
        let level = d.merges[idx].similarity;
        while idx < d.merges.len() && d.merges[idx].similarity == level {
            let m = d.merges[idx];
            let new = n + idx;
            leaf_uf.parent[m.a] = new;
            leaf_uf.parent[m.b] = new;
            idx += 1;
        }
        let roots: Vec<usize> = (0..n).map(|k| leaf_uf.find(k)).collect();
        let assign = canonical_labels(&roots);
        let dens = partition_density(x, &assign)?;
        if dens > best {
            best = dens;
            best_assign = assign;
            best_level = Some(level);
        }
    }
    Ok(DendrogramCut {
        partition: Partition::from_assignment(&best_assign),
        density: best,
        similarity: best_level,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineOptions {
    pub t: usize,
    pub order: LinkOrder,
    pub e1_self: bool,
    pub dense_limit: usize,
}

impl Default for BaselineOptions {
    fn default() -> Self {
        BaselineOptions {
            t: 1,
            order: LinkOrder::Canonical,
            e1_self: true,
            dense_limit: DENSE_STATE_LIMIT,
        }
    }
}

/// Louvain on a line graph, optionally merged down to `target` communities.
/// The score is the objective on that line graph.
pub fn partition_line_graph(
    x: &SimplicialComplex,
    kind: LineGraphKind,
    opts: &BaselineOptions,
    target: Option<usize>,
) -> Result<Partition> {
    let lg = line_graph(x, kind, opts.e1_self);
    let adj = effective_graph(&lg.adjacency, opts.t, opts.dense_limit)?;
    let mut p = louvain(&adj, &opts.order.links(x.n1()))?;
    if let Some(k) = target {
        p = merge_to_count(&adj, &p, k)?;
    }
    p.score = modularity(&adj, &p.assignment)?;
    p.t = opts.t;
    Ok(p)
}
