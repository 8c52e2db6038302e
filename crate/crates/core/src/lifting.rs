//! The lifted line graph: one state per oriented link.
//!
//! States `0..n1` are links in reference orientation and `n1..2n1` their
//! reversals. With `B1h = [B1, -B1]` and `B2h = [B2; -B2]`:
//!
//! * lower adjacency `Al = (B1h-)^T B1h+ + (B1h+)^T B1h-`,
//! * upper adjacency `Au = B2h+ (B2h-)^T + B2h- (B2h+)^T`,
//! * self loops `As = diag(D_tot, D_tot)`,
//!
//! where `+`/`-` are entrywise positive/negative parts. The transition matrix
//! `P = A diag(A 1)^{-1}` is column-stochastic and acts on column
//! distributions: `p_{t+1} = P p_t`.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::hodge::{boundary_1, boundary_2, DTot};
use crate::sparse::{SignedSparseMatrix, SparseMatrix};

/// Index of an oriented link in the lifted state space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientedLinkId(pub usize);

impl OrientedLinkId {
    pub fn reference(link: usize) -> Self {
        OrientedLinkId(link)
    }

    pub fn reversed(link: usize, n1: usize) -> Self {
        OrientedLinkId(link + n1)
    }

    pub fn reverse(self, n1: usize) -> Self {
        OrientedLinkId((self.0 + n1) % (2 * n1))
    }

    pub fn link(self, n1: usize) -> usize {
        self.0 % n1
    }

    pub fn is_reference(self, n1: usize) -> bool {
        self.0 < n1
    }
}

/// Weighted symmetric adjacency over the `2 n1` oriented-link states.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedLineGraph {
    n1: usize,
    a_lower: SignedSparseMatrix,
    a_upper: SignedSparseMatrix,
    a_self: Vec<i64>,
}

/// Builds `Al`, `Au` and `As` from the boundary operators.
pub fn lift(x: &SimplicialComplex) -> LiftedLineGraph {
    let b1 = boundary_1(x);
    let b2 = boundary_2(x);
    let b1h = b1.hstack(&b1.scale(-1)).expect("same rows");
    let b2h = b2.vstack(&b2.scale(-1)).expect("same columns");

    let (b1p, b1m) = (b1h.positive_part(), b1h.negative_part());
    let a_lower = b1m
        .transpose()
        .matmul(&b1p)
        .and_then(|a| a.add(&b1p.transpose().matmul(&b1m)?))
        .expect("shapes agree");

    let (b2p, b2m) = (b2h.positive_part(), b2h.negative_part());
    let a_upper = b2p
        .matmul(&b2m.transpose())
        .and_then(|a| a.add(&b2m.matmul(&b2p.transpose())?))
        .expect("shapes agree");

    let d = DTot::of(x).0;
    let a_self = d.iter().chain(d.iter()).copied().collect();
    LiftedLineGraph {
        n1: x.n1(),
        a_lower,
        a_upper,
        a_self,
    }
}

impl LiftedLineGraph {
    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n_states(&self) -> usize {
        2 * self.n1
    }

    pub fn a_lower(&self) -> &SignedSparseMatrix {
        &self.a_lower
    }

    pub fn a_upper(&self) -> &SignedSparseMatrix {
        &self.a_upper
    }

    pub fn a_self(&self) -> &[i64] {
        &self.a_self
    }

    /// `A = Al + Au + As`.
    pub fn adjacency(&self) -> SignedSparseMatrix {
        self.a_lower
            .add(&self.a_upper)
            .and_then(|a| a.add(&SparseMatrix::diagonal(&self.a_self)))
            .expect("same shape")
    }

    /// Top-left block `A_I`: pairs with equal orientation type.
    pub fn block_i(&self) -> SignedSparseMatrix {
        self.adjacency().block(0, 0, self.n1, self.n1)
    }

    /// Top-right block `A_II`: reference state against reversed state.
    pub fn block_ii(&self) -> SignedSparseMatrix {
        self.adjacency().block(0, self.n1, self.n1, self.n1)
    }

    /// Row sums of `A` (the lifted degrees `k_hat`).
    pub fn degrees(&self) -> Vec<i64> {
        let lo = self.a_lower.row_sums();
        let up = self.a_upper.row_sums();
        (0..self.n_states()).map(|s| lo[s] + up[s] + self.a_self[s]).collect()
    }

    /// `2 m_hat = sum_ij A_ij`.
    pub fn total_weight(&self) -> i64 {
        self.degrees().iter().sum()
    }
}

/// Column-stochastic `P = A diag(A 1)^{-1}`.
pub fn transition_matrix(g: &LiftedLineGraph) -> Result<SparseMatrix<f64>> {
    let a = g.adjacency();
    let deg = g.degrees();
    if let Some(s) = deg.iter().position(|&d| d <= 0) {
        return Err(Error::ZeroRowSum(s));
    }
    Ok(SparseMatrix::from_triplets(
        a.nrows(),
        a.ncols(),
        a.triplets().map(|(r, c, v)| (r, c, v as f64 / deg[c] as f64)),
    ))
}

/// Adjacency `A_I + A_II` of the graph with both orientations of a link merged.
pub fn supernode_graph(g: &LiftedLineGraph) -> SignedSparseMatrix {
    g.block_i().add(&g.block_ii()).expect("same shape")
}

/// Monte-Carlo estimate of `P^steps e_start`.
///
/// Each step stays with probability 1/2, takes a lower-adjacent move with
/// probability `(deg i + deg j) / d` and an upper-adjacent move with
/// probability `3 deg(i,j) / d`, `d = 2 (deg i + deg j + 3 deg(i,j))`; the
/// target inside each class is drawn proportionally to `Al` or `Au`.
pub fn simulate_walk(
    g: &LiftedLineGraph,
    start: OrientedLinkId,
    steps: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let n = g.n_states();
    if start.0 >= n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: start.0 + 1,
        });
    }
    let sampler = WalkSampler::new(g)?;
    const BATCH: usize = 8192;
    let batches = samples.div_ceil(BATCH);
    let counts = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let size = BATCH.min(samples - b * BATCH);
            let mut counts = vec![0u64; n];
            for _ in 0..size {
                let mut s = start.0;
                for _ in 0..steps {
                    s = sampler.step(s, &mut rng);
                }
                counts[s] += 1;
            }
            counts
        })
        .reduce(
            || vec![0u64; n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(counts.iter().map(|&c| c as f64 / samples as f64).collect())
}

struct WalkSampler {
    lower: Vec<Option<(Vec<usize>, WeightedIndex<i64>)>>,
    upper: Vec<Option<(Vec<usize>, WeightedIndex<i64>)>>,
    lower_w: Vec<i64>,
    upper_w: Vec<i64>,
}

impl WalkSampler {
    fn new(g: &LiftedLineGraph) -> Result<Self> {
        let table = |m: &SignedSparseMatrix| -> Vec<Option<(Vec<usize>, WeightedIndex<i64>)>> {
            (0..m.nrows())
                .map(|r| {
                    let (cols, vals) = m.row(r);
                    WeightedIndex::new(vals.iter().copied())
                        .ok()
                        .map(|w| (cols.to_vec(), w))
                })
                .collect()
        };
        let lower_w = g.a_lower.row_sums();
        let upper_w = g.a_upper.row_sums();
        for s in 0..g.n_states() {
            if g.a_self[s] <= 0 {
                return Err(Error::ZeroRowSum(s));
            }
        }
        Ok(WalkSampler {
            lower: table(&g.a_lower),
            upper: table(&g.a_upper),
            lower_w,
            upper_w,
        })
    }

    fn step<R: Rng>(&self, s: usize, rng: &mut R) -> usize {
        // Self-loop weight equals lower + upper weight, hence the 1/2 stay.
        let total = 2 * (self.lower_w[s] + self.upper_w[s]);
        let u = rng.gen_range(0..total);
        if u < total / 2 {
            s
        } else if u < total / 2 + self.lower_w[s] {
            let (cols, w) = self.lower[s].as_ref().expect("positive lower weight");
            cols[w.sample(rng)]
        } else {
            let (cols, w) = self.upper[s].as_ref().expect("positive upper weight");
            cols[w.sample(rng)]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{build_complex, BuildOptions};

    fn cx(s: &[&[u64]]) -> SimplicialComplex {
        build_complex(&s.iter().map(|v| v.to_vec()).collect::<Vec<_>>(), BuildOptions::default()).unwrap()
    }

    #[test]
    fn oriented_ids() {
        let s = OrientedLinkId::reference(2);
        assert_eq!(s.reverse(5), OrientedLinkId(7));
        assert_eq!(s.reverse(5).reverse(5), s);
        assert_eq!(OrientedLinkId::reversed(2, 5).link(5), 2);
        assert!(!OrientedLinkId(7).is_reference(5));
    }

    #[test]
    fn filled_triangle_lift() {
        let g = lift(&cx(&[&[1, 2, 3]]));
        let a = g.adjacency();
        for e in 0..3 {
            assert_eq!(a.get(e, e + 3), 3);
            assert_eq!(g.a_lower().get(e, e + 3), 2);
            assert_eq!(g.a_upper().get(e, e + 3), 1);
        }
        assert_eq!(g.a_self(), &[7; 6]);
        assert_eq!(g.degrees(), vec![14; 6]);
        assert!(a.is_symmetric());
    }

    #[test]
    fn single_edge_lift() {
        let g = lift(&cx(&[&[1, 2]]));
        assert_eq!(g.a_lower().to_dense(), nalgebra::DMatrix::from_row_slice(2, 2, &[0., 2., 2., 0.]));
        assert_eq!(g.a_upper().nnz(), 0);
        assert_eq!(g.a_self(), &[2, 2]);
        let p = transition_matrix(&g).unwrap();
        for (_, _, v) in p.triplets() {
            assert_eq!(v, 0.5);
        }
        assert_eq!(supernode_graph(&g).to_dense()[(0, 0)], 4.0);
    }

    #[test]
    fn filled_triangle_transition() {
        let g = lift(&cx(&[&[1, 2, 3]]));
        let p = transition_matrix(&g).unwrap();
        for s in 0..6 {
            assert_eq!(p.get(s, s), 0.5);
        }
        assert!((p.get(3, 0) - 3.0 / 14.0).abs() < 1e-16);
        for c in p.col_sums() {
            assert!((c - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn walk_start_and_one_step() {
        let g = lift(&cx(&[&[1, 2]]));
        let p0 = simulate_walk(&g, OrientedLinkId(1), 0, 10, 3).unwrap();
        assert_eq!(p0, vec![0.0, 1.0]);
        let p1 = simulate_walk(&g, OrientedLinkId(0), 1, 40_000, 3).unwrap();
        assert!((p1[0] - 0.5).abs() < 3.0 * (0.25f64 / 40_000.0).sqrt());
        let again = simulate_walk(&g, OrientedLinkId(0), 1, 40_000, 3).unwrap();
        assert_eq!(p1, again);
    }

    #[test]
    fn filled_triangle_walk_mixes_to_uniform() {
        let g = lift(&cx(&[&[1, 2, 3]]));
        let n = 60_000;
        let p = simulate_walk(&g, OrientedLinkId(0), 60, n, 11).unwrap();
        let sigma = ((1.0 / 6.0) * (5.0 / 6.0) / n as f64).sqrt();
        for v in p {
            assert!((v - 1.0 / 6.0).abs() < 4.0 * sigma, "{v}");
        }
    }
}
