//! Synthetic complexes for tests, examples and benchmarks.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{build_complex, BuildOptions, ClosurePolicy, SimplicialComplex, WalkStatus};
use crate::error::{Error, Result};
use crate::metrics::NodeMetadata;

/// Two triangles sharing node 3; only the left one (`{1,2,3}`) is filled.
pub fn synth_two_triangles() -> SimplicialComplex {
    build_complex(
        &[vec![1, 2, 3], vec![3, 4], vec![3, 5], vec![4, 5]],
        BuildOptions::default(),
    )
    .expect("valid fixture")
}

/// Erdős–Rényi skeleton with each 3-clique filled independently.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomComplexSpec {
    pub nodes: usize,
    pub p: f64,
    pub fill: f64,
}

/// Attempts made before a generator gives up on producing a walkable complex.
pub const MAX_ATTEMPTS: usize = 1000;

fn er_complex(spec: &RandomComplexSpec, rng: &mut ChaCha8Rng) -> Result<SimplicialComplex> {
    let n = spec.nodes;
    let mut adj = vec![vec![false; n]; n];
    let mut links = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(spec.p) {
                adj[i][j] = true;
                adj[j][i] = true;
                links.push((i, j));
            }
        }
    }
    let mut triangles = Vec::new();
    for &(i, j) in &links {
        for k in j + 1..n {
            if adj[i][k] && adj[j][k] && rng.gen_bool(spec.fill) {
                triangles.push([i, j, k]);
            }
        }
    }
    SimplicialComplex::from_dense(n, links, triangles, ClosurePolicy::Reject)
}

/// A connected, non-bipartite random complex. Candidates failing the check
/// are redrawn from the same stream.
pub fn random_complex(spec: &RandomComplexSpec, seed: u64) -> Result<SimplicialComplex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let x = er_complex(spec, &mut rng)?;
        if x.n1() > 0 && x.validate_walk_assumptions() == WalkStatus::Ok {
            return Ok(x);
        }
    }
    Err(Error::SamplingExhausted {
        attempts: MAX_ATTEMPTS,
        found: 0,
        requested: 1,
    })
}

/// Parameters for a random suite: node counts, edge probabilities and fill
/// rates drawn uniformly from the given ranges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteSpec {
    pub nodes: (usize, usize),
    pub p: (f64, f64),
    pub fill: (f64, f64),
}

impl Default for SuiteSpec {
    fn default() -> Self {
        SuiteSpec {
            nodes: (10, 60),
            p: (0.1, 0.4),
            fill: (0.0, 1.0),
        }
    }
}

impl SuiteSpec {
    pub fn draw(&self, rng: &mut impl Rng) -> RandomComplexSpec {
        RandomComplexSpec {
            nodes: rng.gen_range(self.nodes.0..=self.nodes.1),
            p: rng.gen_range(self.p.0..=self.p.1),
            fill: rng.gen_range(self.fill.0..=self.fill.1),
        }
    }
}

/// `count` random complexes; complex `k` uses parameters drawn from `seed`
/// and is generated from its own derived seed.
pub fn random_suite(spec: &SuiteSpec, count: usize, seed: u64) -> Result<Vec<SimplicialComplex>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let s = spec.draw(&mut rng);
            random_complex(&s, rng.gen())
        })
        .collect()
}

/// `rows x cols` grid of nodes, every cell split by its main diagonal into
/// two filled triangles.
pub fn triangulated_grid(rows: usize, cols: usize) -> Result<SimplicialComplex> {
    let id = |r: usize, c: usize| r * cols + c;
    let mut links = Vec::new();
    let mut triangles = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                links.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                links.push((id(r, c), id(r + 1, c)));
            }
            if r + 1 < rows && c + 1 < cols {
                links.push((id(r, c), id(r + 1, c + 1)));
                triangles.push([id(r, c), id(r, c + 1), id(r + 1, c + 1)]);
                triangles.push([id(r, c), id(r + 1, c), id(r + 1, c + 1)]);
            }
        }
    }
    SimplicialComplex::from_dense(rows * cols, links, triangles, ClosurePolicy::Reject)
}

/// Grid with roughly `target` links plus triangles, two rows high per column pair.
pub fn grid_with_size(target: usize) -> Result<SimplicialComplex> {
    // each cell adds 3 links and 2 triangles
    let cells = (target / 5).max(1);
    let rows = ((cells as f64).sqrt().round() as usize).max(1);
    let cols = cells.div_ceil(rows);
    triangulated_grid(rows + 1, cols + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantedOverlapSpec {
    pub blocks: usize,
    pub block_size: usize,
    /// Nodes placed in two blocks at once.
    pub overlap_nodes: usize,
    pub p_in: f64,
    pub p_out: f64,
    /// Probability that a 3-clique inside a block is filled.
    pub triangle_rate: f64,
}

impl Default for PlantedOverlapSpec {
    fn default() -> Self {
        PlantedOverlapSpec {
            blocks: 3,
            block_size: 8,
            overlap_nodes: 2,
            p_in: 0.7,
            p_out: 0.02,
            triangle_rate: 1.0,
        }
    }
}

/// Dense blocks with shared nodes. Metadata: the (first) block label as the
/// similarity attribute and the true number of blocks as the overlap attribute.
/// Node ids start at 1.
pub fn synth_planted_overlap(spec: &PlantedOverlapSpec, seed: u64) -> Result<(SimplicialComplex, NodeMetadata)> {
    if spec.blocks < 2 {
        return Err(Error::Config("planted overlap needs at least two blocks".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let mut member: Vec<Vec<usize>> = (0..spec.blocks * spec.block_size)
            .map(|v| vec![v / spec.block_size])
            .collect();
        let blocks: Vec<usize> = (0..spec.blocks).collect();
        for _ in 0..spec.overlap_nodes {
            let pair: Vec<usize> = blocks.choose_multiple(&mut rng, 2).copied().collect();
            member.push(pair);
        }
        let n = member.len();
        let shared = |i: usize, j: usize| member[i].iter().find(|b| member[j].contains(b)).copied();
        let mut simplices: BTreeSet<Vec<u64>> = (1..=n as u64).map(|v| vec![v]).collect();
        let mut adj = vec![vec![false; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let p = if shared(i, j).is_some() { spec.p_in } else { spec.p_out };
                if rng.gen_bool(p) {
                    adj[i][j] = true;
                    simplices.insert(vec![i as u64 + 1, j as u64 + 1]);
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if !adj[i][j] {
                    continue;
                }
                for k in j + 1..n {
                    let same_block = member[i]
                        .iter()
                        .any(|b| member[j].contains(b) && member[k].contains(b));
                    if adj[i][k] && adj[j][k] && same_block && rng.gen_bool(spec.triangle_rate) {
                        simplices.insert(vec![i as u64 + 1, j as u64 + 1, k as u64 + 1]);
                    }
                }
            }
        }
        let simplices: Vec<Vec<u64>> = simplices.into_iter().collect();
        let x = build_complex(&simplices, BuildOptions::default())?;
        if x.validate_walk_assumptions() != WalkStatus::Ok {
            continue;
        }
        let mut meta = NodeMetadata::default();
        for (v, m) in member.iter().enumerate() {
            meta.similarity.insert(v as u64 + 1, format!("block{}", m[0]));
            meta.overlap.insert(v as u64 + 1, m.len() as f64);
        }
        return Ok((x, meta));
    }
    Err(Error::SamplingExhausted {
        attempts: MAX_ATTEMPTS,
        found: 0,
        requested: 1,
    })
}

/// Groups of filled cliques: cliques inside a group are chained by single
/// links, and groups are chained by single links between their first cliques.
pub fn clique_of_cliques(groups: usize, cliques: usize, size: usize) -> Result<SimplicialComplex> {
    let mut simplices = Vec::new();
    let node = |g: usize, c: usize, v: usize| (((g * cliques) + c) * size + v) as u64;
    for g in 0..groups {
        for c in 0..cliques {
            for a in 0..size {
                for b in a + 1..size {
                    for d in b + 1..size {
                        simplices.push(vec![node(g, c, a), node(g, c, b), node(g, c, d)]);
                    }
                    simplices.push(vec![node(g, c, a), node(g, c, b)]);
                }
            }
            for c2 in c + 1..cliques {
                simplices.push(vec![node(g, c, c2 % size), node(g, c2, c % size)]);
            }
        }
        if g + 1 < groups {
            simplices.push(vec![node(g, 0, size - 1), node(g + 1, 0, size - 1)]);
        }
    }
    build_complex(&simplices, BuildOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_triangles_fixture() {
        let x = synth_two_triangles();
        assert_eq!((x.n0(), x.n1(), x.n2()), (5, 6, 1));
        let ids: Vec<(u64, u64)> = x
            .links()
            .iter()
            .map(|l| (x.original_id(l.lo), x.original_id(l.hi)))
            .collect();
        assert_eq!(ids, vec![(1, 2), (1, 3), (2, 3), (3, 4), (3, 5), (4, 5)]);
    }

    #[test]
    fn random_complexes_are_walkable_and_deterministic() {
        let spec = RandomComplexSpec {
            nodes: 20,
            p: 0.2,
            fill: 0.5,
        };
        let a = random_complex(&spec, 3).unwrap();
        assert_eq!(a.validate_walk_assumptions(), WalkStatus::Ok);
        assert_eq!(a, random_complex(&spec, 3).unwrap());
        let suite = random_suite(&SuiteSpec::default(), 5, 1).unwrap();
        assert!(suite.iter().all(|x| (10..=60).contains(&x.n0())));
    }

    #[test]
    fn grid_counts() {
        let g = triangulated_grid(3, 4).unwrap();
        assert_eq!(g.n0(), 12);
        assert_eq!(g.n1(), 3 * 3 + 2 * 4 + 6);
        assert_eq!(g.n2(), 12);
        let big = grid_with_size(1000).unwrap();
        let size = big.n1() + big.n2();
        assert!((900..1200).contains(&size), "{size}");
    }

    #[test]
    fn planted_overlap_metadata() {
        let spec = PlantedOverlapSpec {
            blocks: 2,
            block_size: 6,
            overlap_nodes: 1,
            ..Default::default()
        };
        let (x, meta) = synth_planted_overlap(&spec, 9).unwrap();
        assert_eq!(x.n0(), 13);
        assert_eq!(meta.overlap[&13], 2.0);
        assert_eq!(meta.overlap[&1], 1.0);
        let none = PlantedOverlapSpec {
            triangle_rate: 0.0,
            ..spec
        };
        assert_eq!(synth_planted_overlap(&none, 9).unwrap().0.n2(), 0);
    }

    #[test]
    fn cliques_of_cliques_are_connected() {
        let x = clique_of_cliques(2, 3, 4).unwrap();
        assert_eq!(x.n0(), 24);
        assert_eq!(x.validate_walk_assumptions(), WalkStatus::Ok);
    }
}
