//! Markov stability: modularity over paths of length `t`.
//!
//! With `T = A diag(k)^{-1}` the stability matrix has entries `(T^t)_ij k_j`,
//! which equals `T^{t-1} A`. It is symmetric (the walk is reversible), its
//! degrees are again `k`, and at `t = 1` it is `A` itself, so the stability
//! `R(A, t)` is the modularity of the partition on this matrix.

use std::collections::VecDeque;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::louvain::{modularity, WeightedGraph};
use crate::sparse::SparseMatrix;

/// Largest state count for which dense operators are formed by default.
pub const DENSE_STATE_LIMIT: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityMatrix {
    pub t: usize,
    pub matrix: DMatrix<f64>,
}

impl StabilityMatrix {
    /// Nonzero entries as a sparse weighted graph for the optimizer.
    pub fn to_graph(&self) -> WeightedGraph {
        let n = self.matrix.nrows();
        SparseMatrix::from_triplets(
            n,
            n,
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter_map(|(i, j)| {
                let v = self.matrix[(i, j)];
                (v != 0.0).then_some((i, j, v))
            }),
        )
    }

    pub fn asymmetry(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).amax()
    }
}

pub(crate) fn is_connected(adj: &WeightedGraph) -> bool {
    let n = adj.nrows();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for &v in adj.row(u).0 {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    count == n
}

/// `(T^t)_ij k_j` for `t >= 1` with the default dense limit.
pub fn stability_matrix(adj: &WeightedGraph, t: usize) -> Result<StabilityMatrix> {
    stability_matrix_limited(adj, t, DENSE_STATE_LIMIT)
}

pub fn stability_matrix_limited(adj: &WeightedGraph, t: usize, limit: usize) -> Result<StabilityMatrix> {
    let n = adj.nrows();
    if t == 0 {
        return Err(Error::Config("Markov time must be at least 1".into()));
    }
    if n > limit {
        return Err(Error::SizeLimitExceeded {
            what: "stability matrix",
            size: n,
            limit,
        });
    }
    if !is_connected(adj) {
        return Err(Error::NotConnected);
    }
    let a = adj.to_dense();
    if t == 1 {
        return Ok(StabilityMatrix { t, matrix: a });
    }
    let k: Vec<f64> = (0..n).map(|i| a.row(i).sum()).collect();
    let mut trans = a.clone();
    for (j, kj) in k.iter().enumerate() {
        trans.column_mut(j).unscale_mut(*kj);
    }
    let m = matrix_power(&trans, t - 1) * &a;
    let sym = (&m + m.transpose()) * 0.5;
    Ok(StabilityMatrix { t, matrix: sym })
}

fn matrix_power(m: &DMatrix<f64>, mut e: usize) -> DMatrix<f64> {
    let n = m.nrows();
    let mut result = DMatrix::identity(n, n);
    let mut base = m.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    result
}

/// Markov stability `R(A, t)` of an assignment.
pub fn stability(adj: &WeightedGraph, assignment: &[usize], t: usize) -> Result<f64> {
    let s = stability_matrix(adj, t)?;
    modularity(&s.to_graph(), assignment)
}

/// The graph whose plain modularity is `R(A, t)`.
pub fn effective_graph(adj: &WeightedGraph, t: usize, limit: usize) -> Result<WeightedGraph> {
    if t == 1 {
        return Ok(adj.clone());
    }
    Ok(stability_matrix_limited(adj, t, limit)?.to_graph())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> WeightedGraph {
        SparseMatrix::from_triplets(n, n, edges.iter().flat_map(|&(a, b)| [(a, b, 1.0), (b, a, 1.0)]))
    }

    #[test]
    fn one_step_is_the_adjacency() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        let s = stability_matrix(&g, 1).unwrap();
        assert_eq!(s.matrix, g.to_dense());
        assert_eq!(
            stability(&g, &[0, 0, 1, 1], 1).unwrap(),
            modularity(&g, &[0, 0, 1, 1]).unwrap()
        );
    }

    #[test]
    fn two_steps_match_dense_power() {
        // 4-cycle with a chord
        let g = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        let a = g.to_dense();
        let k: Vec<f64> = (0..4).map(|i| a.row(i).sum()).collect();
        // independent oracle: explicit T, explicit T*T, then scale columns by k
        let mut t = DMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                t[(i, j)] = a[(i, j)] / k[j];
            }
        }
        let t2 = &t * &t;
        let s = stability_matrix(&g, 2).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((s.matrix[(i, j)] - t2[(i, j)] * k[j]).abs() < 1e-14);
            }
        }
        assert!(s.asymmetry() < 1e-10);
        let total: f64 = s.matrix.iter().sum();
        assert!((total - 10.0).abs() < 1e-12);
    }

    #[test]
    fn long_times_approach_null_model() {
        let g = graph(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]);
        let s = stability_matrix(&g, 200).unwrap();
        let a = g.to_dense();
        let k: Vec<f64> = (0..5).map(|i| a.row(i).sum()).collect();
        let m2: f64 = k.iter().sum();
        for i in 0..5 {
            for j in 0..5 {
                assert!((s.matrix[(i, j)] - k[i] * k[j] / m2).abs() < 1e-9);
            }
        }
        assert!(stability(&g, &[0, 0, 0, 1, 1], 200).unwrap().abs() < 1e-9);
    }

    #[test]
    fn disconnected_and_oversized_inputs() {
        let g = graph(4, &[(0, 1), (2, 3)]);
        assert!(matches!(stability_matrix(&g, 2), Err(Error::NotConnected)));
        let h = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        assert!(matches!(
            stability_matrix_limited(&h, 2, 2),
            Err(Error::SizeLimitExceeded { .. })
        ));
    }
}
