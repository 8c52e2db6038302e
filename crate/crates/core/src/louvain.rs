//! Modularity and the Louvain method on weighted symmetric graphs.
//!
//! Self-loops follow the usual convention: a loop of weight `w` on node `i`
//! contributes `w` to `A_ii` and `w` to `k_i`, so `2m = sum_ij A_ij`.
//!
//! Moves are deterministic for a given node order. A node leaves its
//! community only for a strictly better one (ties keep the current
//! community); among equally good targets the lowest community id wins.
//! Community ids inside a level are numbered by first appearance in the
//! iteration order, and later levels iterate over communities in that order.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

pub type WeightedGraph = SparseMatrix<f64>;

/// Relative slack below which two gains count as equal.
const GAIN_TOLERANCE: f64 = 1e-12;
const MAX_PASSES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub n_communities: usize,
    /// Objective of the partition reached at the end of the level.
    pub objective: f64,
    /// Objective change of each accepted move, in move order.
    pub gains: Vec<f64>,
}

/// Assignment of every state (node, link or oriented link) to a community.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    /// Community id per state, contiguous `0..C`.
    pub assignment: Vec<usize>,
    pub levels: Vec<LevelSummary>,
    /// Modularity (`t = 1`) or Markov stability (`t > 1`) of the assignment.
    pub score: f64,
    /// Markov time the score refers to.
    pub t: usize,
}

impl Partition {
    /// Wraps a raw assignment, relabelling communities by first appearance.
    pub fn from_assignment(assignment: &[usize]) -> Self {
        Partition {
            assignment: canonical_labels(assignment),
            levels: Vec::new(),
            score: f64::NAN,
            t: 1,
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn n_communities(&self) -> usize {
        self.assignment.iter().max().map_or(0, |&m| m + 1)
    }

    /// States of each community, ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_communities()];
        for (s, &c) in self.assignment.iter().enumerate() {
            out[c].push(s);
        }
        out
    }
}

/// Relabels communities `0..C` in order of first appearance.
pub fn canonical_labels(assignment: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    assignment
        .iter()
        .map(|&c| {
            let next = map.len();
            *map.entry(c).or_insert(next)
        })
        .collect()
}

/// `Q = (1/2m) sum_C [ sum_{i,j in C} A_ij - (sum_{i in C} k_i)^2 / 2m ]`.
pub fn modularity(adj: &WeightedGraph, assignment: &[usize]) -> Result<f64> {
    if assignment.len() != adj.nrows() || adj.nrows() != adj.ncols() {
        return Err(Error::DimensionMismatch {
            expected: adj.nrows(),
            found: assignment.len(),
        });
    }
    let n_comm = assignment.iter().max().map_or(0, |&m| m + 1);
    let mut inner = vec![0.0; n_comm];
    let mut tot = vec![0.0; n_comm];
    let mut m2 = 0.0;
    for (r, c, v) in adj.triplets() {
        m2 += v;
        tot[assignment[r]] += v;
        if assignment[r] == assignment[c] {
            inner[assignment[r]] += v;
        }
    }
    if m2 == 0.0 {
        return Ok(0.0);
    }
    Ok(inner
        .iter()
        .zip(&tot)
        .map(|(i, t)| i - t * t / m2)
        .sum::<f64>()
        / m2)
}

pub fn natural_order(n: usize) -> Vec<usize> {
    (0..n).collect()
}

pub fn shuffled_order(n: usize, seed: u64) -> Vec<usize> {
    let mut order = natural_order(n);
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}

fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::InvalidOrder(n));
    }
    let mut seen = vec![false; n];
    for &v in order {
        if v >= n || seen[v] {
            return Err(Error::InvalidOrder(n));
        }
        seen[v] = true;
    }
    Ok(())
}

/// One coarse-graining level: adjacency without loops plus loop weights.
struct LevelGraph {
    adj: Vec<Vec<(usize, f64)>>,
    self_loop: Vec<f64>,
    degree: Vec<f64>,
    m2: f64,
}

impl LevelGraph {
    fn new(adj: Vec<Vec<(usize, f64)>>, self_loop: Vec<f64>) -> Self {
        let degree: Vec<f64> = adj
            .iter()
            .zip(&self_loop)
            .map(|(row, l)| row.iter().map(|e| e.1).sum::<f64>() + l)
            .collect();
        let m2 = degree.iter().sum();
        LevelGraph {
            adj,
            self_loop,
            degree,
            m2,
        }
    }

    fn n(&self) -> usize {
        self.adj.len()
    }

    /// Local moving phase. Returns community per node (first-appearance
    /// labels) and the accepted gains.
    fn local_moves(&self) -> (Vec<usize>, Vec<f64>) {
        let n = self.n();
        let mut comm: Vec<usize> = (0..n).collect();
        let mut gains = Vec::new();
        if self.m2 <= 0.0 {
            return (comm, gains);
        }
        let mut tot = self.degree.clone();
        let mut w = vec![0.0; n];
        let mut seen = vec![false; n];
        let mut touched: Vec<usize> = Vec::new();
        for _ in 0..MAX_PASSES {
            let mut moved = 0usize;
            for i in 0..n {
                let ci = comm[i];
                let ki = self.degree[i];
                touched.clear();
                for &(j, a) in &self.adj[i] {
                    let c = comm[j];
                    if !seen[c] {
                        seen[c] = true;
                        w[c] = 0.0;
                        touched.push(c);
                    }
                    w[c] += a;
                }
                tot[ci] -= ki;
                let w_ci = if seen[ci] { w[ci] } else { 0.0 };
                let stay = w_ci - tot[ci] * ki / self.m2;
                let slack = GAIN_TOLERANCE * ki;
                let mut best = stay;
                let mut best_c = ci;
                touched.sort_unstable();
                for &c in &touched {
                    if c == ci {
                        continue;
                    }
                    let g = w[c] - tot[c] * ki / self.m2;
                    if g > best + slack {
                        best = g;
                        best_c = c;
                    }
                }
                for &c in &touched {
                    seen[c] = false;
                }
                tot[best_c] += ki;
                comm[i] = best_c;
                if best_c != ci {
                    moved += 1;
                    gains.push(2.0 * (best - stay) / self.m2);
                }
            }
            if moved == 0 {
                break;
            }
        }
        (canonical_labels(&comm), gains)
    }

    fn aggregate(&self, comm: &[usize], n_comm: usize) -> LevelGraph {
        let mut self_loop = vec![0.0; n_comm];
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_comm];
        for i in 0..self.n() {
            let ci = comm[i];
            self_loop[ci] += self.self_loop[i];
            for &(j, a) in &self.adj[i] {
                let cj = comm[j];
                if ci == cj {
                    self_loop[ci] += a;
                } else {
                    rows[ci].push((cj, a));
                }
            }
        }
        let adj = rows
            .into_iter()
            .map(|mut row| {
                row.sort_by_key(|e| e.0);
                let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
                for (c, a) in row {
                    match merged.last_mut() {
                        Some(last) if last.0 == c => last.1 += a,
                        _ => merged.push((c, a)),
                    }
                }
                merged
            })
            .collect();
        LevelGraph::new(adj, self_loop)
    }

    fn modularity(&self, comm: &[usize], n_comm: usize) -> f64 {
        if self.m2 <= 0.0 {
            return 0.0;
        }
        let mut inner = vec![0.0; n_comm];
        let mut tot = vec![0.0; n_comm];
        for i in 0..self.n() {
            tot[comm[i]] += self.degree[i];
            inner[comm[i]] += self.self_loop[i];
            for &(j, a) in &self.adj[i] {
                if comm[j] == comm[i] {
                    inner[comm[i]] += a;
                }
            }
        }
        inner.iter().zip(&tot).map(|(i, t)| i - t * t / self.m2).sum::<f64>() / self.m2
    }
}

/// Runs the Louvain method on `adj`, visiting nodes in `order` on the first level.
///
/// `adj` must be square, symmetric and non-negative. Levels are added until a
/// level merges nothing.
pub fn louvain(adj: &WeightedGraph, order: &[usize]) -> Result<Partition> {
    let n = adj.nrows();
    if adj.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: adj.ncols(),
        });
    }
    check_permutation(order, n)?;
    let mut pos = vec![0usize; n];
    for (k, &v) in order.iter().enumerate() {
        pos[v] = k;
    }
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut self_loop = vec![0.0; n];
    for (r, c, v) in adj.triplets() {
        if r == c {
            self_loop[pos[r]] += v;
        } else {
            rows[pos[r]].push((pos[c], v));
        }
    }
    for row in &mut rows {
        row.sort_by_key(|e| e.0);
    }
    let mut graph = LevelGraph::new(rows, self_loop);

    // internal[k] = community of internal node k at the current level
    let mut internal: Vec<usize> = (0..n).collect();
    let mut levels = Vec::new();
    loop {
        let (comm, gains) = graph.local_moves();
        let n_comm = comm.iter().max().map_or(0, |&m| m + 1);
        if gains.is_empty() {
            break;
        }
        let objective = graph.modularity(&comm, n_comm);
        for c in internal.iter_mut() {
            *c = comm[*c];
        }
        levels.push(LevelSummary {
            n_communities: n_comm,
            objective,
            gains,
        });
        if n_comm == graph.n() {
            break;
        }
        graph = graph.aggregate(&comm, n_comm);
    }

    let mut assignment = vec![0usize; n];
    for (k, &v) in order.iter().enumerate() {
        assignment[v] = internal[k];
    }
    let assignment = canonical_labels(&assignment);
    let score = modularity(adj, &assignment)?;
    Ok(Partition {
        assignment,
        levels,
        score,
        t: 1,
    })
}

/// Greedily merges the pair of communities whose union loses the least
/// objective until at most `target` communities remain. Ties go to the
/// lexicographically smallest pair. Partitions already at or below the
/// target are returned unchanged. If the merged partition scores below the
/// single community (whose objective is exactly zero), the single community
/// is returned instead.
pub fn merge_to_count(adj: &WeightedGraph, partition: &Partition, target: usize) -> Result<Partition> {
    let target = target.max(1);
    let mut assignment = partition.assignment.clone();
    if assignment.len() != adj.nrows() {
        return Err(Error::DimensionMismatch {
            expected: adj.nrows(),
            found: assignment.len(),
        });
    }
    let mut n_comm = partition.n_communities();
    if n_comm <= target {
        return Ok(partition.clone());
    }
    let m2: f64 = adj.triplets().map(|t| t.2).sum();
    let mut between = vec![vec![0.0; n_comm]; n_comm];
    let mut tot = vec![0.0; n_comm];
    for (r, c, v) in adj.triplets() {
        between[assignment[r]][assignment[c]] += v;
        tot[assignment[r]] += v;
    }
    let mut alive: Vec<bool> = vec![true; n_comm];
    let mut absorbed: Vec<usize> = (0..n_comm).collect();
    while n_comm > target {
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..alive.len() {
            if !alive[a] {
                continue;
            }
            for b in a + 1..alive.len() {
                if !alive[b] {
                    continue;
                }
                let gain = 2.0 * (between[a][b] - tot[a] * tot[b] / m2) / m2;
                if best.is_none_or(|(g, _, _)| gain > g + GAIN_TOLERANCE) {
                    best = Some((gain, a, b));
                }
            }
        }
        let (_, a, b) = best.expect("at least two communities");
        for k in 0..alive.len() {
            between[a][k] += between[b][k];
        }
        for k in 0..alive.len() {
            between[k][a] += between[k][b];
        }
        tot[a] += tot[b];
        alive[b] = false;
        absorbed[b] = a;
        n_comm -= 1;
    }
    for c in assignment.iter_mut() {
        let mut r = *c;
        while absorbed[r] != r {
            r = absorbed[r];
        }
        *c = r;
    }
    let mut assignment = canonical_labels(&assignment);
    let mut score = modularity(adj, &assignment)?;
    if score < -GAIN_TOLERANCE {
        assignment = vec![0; assignment.len()];
        score = modularity(adj, &assignment)?;
    }
    Ok(Partition {
        assignment,
        levels: partition.levels.clone(),
        score,
        t: partition.t,
    })
}
