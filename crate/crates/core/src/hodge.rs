//! Boundary operators and Hodge 1-Laplacians.
//!
//! `B1`, `B2`, `L1` and `D_tot` are exact integer matrices. Division by
//! `D_tot` happens once, when the normalized Laplacian is formed.

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::sparse::{SignedSparseMatrix, SparseMatrix};

/// Node-to-link boundary `B1` (`n0 x n1`): link `[i,j]` maps to `[j] - [i]`.
pub fn boundary_1(x: &SimplicialComplex) -> SignedSparseMatrix {
    SparseMatrix::from_triplets(
        x.n0(),
        x.n1(),
        x.links()
            .iter()
            .enumerate()
            .flat_map(|(k, l)| [(l.lo, k, -1), (l.hi, k, 1)]),
    )
}

/// Link-to-triangle boundary `B2` (`n1 x n2`): `[i,j,k]` maps to `[j,k] - [i,k] + [i,j]`.
pub fn boundary_2(x: &SimplicialComplex) -> SignedSparseMatrix {
    SparseMatrix::from_triplets(
        x.n1(),
        x.n2(),
        x.triangles().iter().enumerate().flat_map(|(t, tri)| {
            tri.faces().map(|(face, sign)| {
                let row = x.link_index(face).expect("closed complex");
                (row, t, sign)
            })
        }),
    )
}

/// Hodge 1-Laplacian `L1 = B1^T B1 + B2 B2^T`.
pub fn hodge_l1(x: &SimplicialComplex) -> SignedSparseMatrix {
    let b1 = boundary_1(x);
    let b2 = boundary_2(x);
    let down = b1.transpose().matmul(&b1).expect("shapes agree");
    let up = b2.matmul(&b2.transpose()).expect("shapes agree");
    down.add(&up).expect("shapes agree")
}

/// Diagonal of `D_tot`: `deg(i) + deg(j) + 3 deg(i,j)` per link.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DTot(pub Vec<i64>);

impl DTot {
    pub fn of(x: &SimplicialComplex) -> DTot {
        DTot((0..x.n1()).map(|k| x.total_degree(k) as i64).collect())
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    fn check_positive(&self) -> Result<()> {
        match self.0.iter().position(|&d| d <= 0) {
            Some(k) => Err(Error::ZeroDegree(k)),
            None => Ok(()),
        }
    }
}

/// Normalized Hodge 1-Laplacian `L1 D_tot^{-1}` (right normalization).
pub fn normalized_l1(x: &SimplicialComplex) -> Result<SparseMatrix<f64>> {
    let d = DTot::of(x);
    d.check_positive()?;
    let l1 = hodge_l1(x);
    Ok(SparseMatrix::from_triplets(
        l1.nrows(),
        l1.ncols(),
        l1.triplets().map(|(r, c, v)| (r, c, v as f64 / d.0[c] as f64)),
    ))
}

/// Applies `M^t` to a link flow, with `M = (I - L1 D_tot^{-1}) / 2`.
///
/// `M` is the projection `V^T P V / 2` of the lifted walk, so this is the
/// lift-propagate-project dynamics run for `t` steps.
pub fn project_propagate(x: &SimplicialComplex, flow: &[f64], steps: usize) -> Result<Vec<f64>> {
    if flow.len() != x.n1() {
        return Err(Error::DimensionMismatch {
            expected: x.n1(),
            found: flow.len(),
        });
    }
    let mut f = flow.to_vec();
    if steps == 0 {
        return Ok(f);
    }
    let lap = normalized_l1(x)?;
    for _ in 0..steps {
        let lf = lap.mul_vec(&f)?;
        for (fi, li) in f.iter_mut().zip(lf) {
            *fi = 0.5 * (*fi - li);
        }
    }
    Ok(f)
}
