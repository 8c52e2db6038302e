//! Numerical checks of the spectral structure of the lifted walk.
//!
//! `P = A W^{-1}` with `W = diag(d)` is similar to the symmetric matrix
//! `W^{-1/2} A W^{-1/2}`, so every spectrum here comes from a symmetric
//! eigensolve. Since the two halves of `d` agree, the blocks `P_I + P_II`
//! and `P_I - P_II` are handled the same way with `W_I = diag(d_I)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::hodge::{boundary_1, boundary_2, hodge_l1, normalized_l1, DTot};
use crate::lifting::{lift, transition_matrix, LiftedLineGraph};
use crate::sparse::{SignedSparseMatrix, SparseMatrix};
use crate::stability::DENSE_STATE_LIMIT;

/// Tolerance for matching eigenvalue multisets.
pub const SPECTRUM_TOLERANCE: f64 = 1e-8;
/// Tolerance for accepting a vector as an eigenvector.
pub const EIGENPAIR_TOLERANCE: f64 = 1e-10;
/// Eigenvalues of the normalized Laplacian below this count as zero.
pub const KERNEL_TOLERANCE: f64 = 1e-8;

/// `max |(I - L1 D^{-1}) V^T - 2 V^T P|` over all entries.
pub fn verify_lifting_identity(x: &SimplicialComplex) -> Result<f64> {
    let n1 = x.n1();
    let g = lift(x);
    let p = transition_matrix(&g)?;
    let m = SparseMatrix::<f64>::identity(n1).sub(&normalized_l1(x)?)?;
    let lhs = m.hstack(&m.scale(-1.0))?;
    let top = p.block(0, 0, n1, 2 * n1);
    let bottom = p.block(n1, 0, n1, 2 * n1);
    let rhs = top.sub(&bottom)?.scale(2.0);
    Ok(lhs.sub(&rhs)?.max_abs())
}

fn check_size(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::SizeLimitExceeded {
            what: "dense eigensolve",
            size: n,
            limit,
        });
    }
    Ok(())
}

/// `W^{-1/2} A W^{-1/2}` for a symmetric `A` and positive weights `w`.
fn symmetrize(a: &SignedSparseMatrix, w: &[i64]) -> DMatrix<f64> {
    let s: Vec<f64> = w.iter().map(|&d| 1.0 / (d as f64).sqrt()).collect();
    let mut m = DMatrix::zeros(a.nrows(), a.ncols());
    for (r, c, v) in a.triplets() {
        m[(r, c)] = v as f64 * s[r] * s[c];
    }
    m
}

fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Largest gap between two sorted multisets of equal size; infinite if the sizes differ.
pub fn multiset_gap(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub full_spectrum: Vec<f64>,
    pub even_spectrum: Vec<f64>,
    pub odd_spectrum: Vec<f64>,
    /// Gap between the full spectrum and the union of even and odd parts.
    pub max_gap: f64,
    pub one_in_even: bool,
    pub stationary: Vec<f64>,
    /// `max |P pi - pi|`.
    pub stationary_residual: f64,
    /// `max |V^T pi|`.
    pub projection_residual: f64,
}

impl SpectrumReport {
    /// Odd eigenvalues equal to `1/2`, i.e. the kernel of the normalized Laplacian.
    pub fn harmonic_count(&self) -> usize {
        self.odd_spectrum.iter().filter(|&&l| (l - 0.5).abs() < KERNEL_TOLERANCE).count()
    }

    pub fn passes(&self) -> bool {
        self.max_gap <= SPECTRUM_TOLERANCE
            && self.one_in_even
            && self.stationary_residual <= 1e-12
            && self.projection_residual <= 1e-12
    }
}

pub fn spectrum_decomposition(g: &LiftedLineGraph) -> Result<SpectrumReport> {
    spectrum_decomposition_limited(g, DENSE_STATE_LIMIT)
}

pub fn spectrum_decomposition_limited(g: &LiftedLineGraph, limit: usize) -> Result<SpectrumReport> {
    check_size(g.n_states(), limit)?;
    let d = g.degrees();
    if let Some(k) = d.iter().position(|&v| v <= 0) {
        return Err(Error::ZeroRowSum(k));
    }
    let n1 = g.n1();
    let full_spectrum = sorted_eigenvalues(symmetrize(&g.adjacency(), &d));
    let (bi, bii) = (g.block_i(), g.block_ii());
    let even_spectrum = sorted_eigenvalues(symmetrize(&bi.add(&bii)?, &d[..n1]));
    let odd_spectrum = sorted_eigenvalues(symmetrize(&bi.sub(&bii)?, &d[..n1]));
    let union: Vec<f64> = even_spectrum.iter().chain(&odd_spectrum).copied().collect();
    let max_gap = multiset_gap(&full_spectrum, &union);
    let one_in_even = even_spectrum.iter().any(|&l| (l - 1.0).abs() <= SPECTRUM_TOLERANCE);
    let st = stationary_projection(g)?;
    Ok(SpectrumReport {
        full_spectrum,
        even_spectrum,
        odd_spectrum,
        max_gap,
        one_in_even,
        stationary: st.pi,
        stationary_residual: st.fixed_point_residual,
        projection_residual: st.projection_residual,
    })
}

/// Eigenpairs `(lambda, x)` of `P_I + P_II`, with `x` normalized to unit max norm.
pub fn even_eigenpairs(g: &LiftedLineGraph) -> Result<Vec<(f64, Vec<f64>)>> {
    let n1 = g.n1();
    check_size(g.n_states(), DENSE_STATE_LIMIT)?;
    let d = &g.degrees()[..n1];
    let sym = symmetrize(&g.block_i().add(&g.block_ii())?, d);
    let eig = sym.symmetric_eigen();
    Ok((0..n1)
        .map(|k| {
            let u = eig.eigenvectors.column(k);
            let mut x: Vec<f64> = (0..n1).map(|i| u[i] * (d[i] as f64).sqrt()).collect();
            let norm = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            x.iter_mut().for_each(|v| *v /= norm);
            (eig.eigenvalues[k], x)
        })
        .collect())
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Checks that `[x; x]` is an eigenvector of `P` when `x` is one of `P_I + P_II`.
/// Returns `max |P [x; x] - lambda [x; x]|`.
pub fn lift_even_eigenvector(g: &LiftedLineGraph, x: &[f64], lambda: f64) -> Result<f64> {
    let n1 = g.n1();
    if x.len() != n1 {
        return Err(Error::DimensionMismatch {
            expected: n1,
            found: x.len(),
        });
    }
    let p = transition_matrix(g)?;
    let even = p.block(0, 0, n1, n1).add(&p.block(0, n1, n1, n1))?;
    let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let lx: Vec<f64> = x.iter().map(|v| lambda * v).collect();
    let residual = max_abs_diff(&even.mul_vec(x)?, &lx);
    if residual > EIGENPAIR_TOLERANCE * scale {
        return Err(Error::NotAnEigenpair { residual });
    }
    let xx: Vec<f64> = x.iter().chain(x).copied().collect();
    let lxx: Vec<f64> = lx.iter().chain(&lx).copied().collect();
    Ok(max_abs_diff(&p.mul_vec(&xx)?, &lxx))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryCheck {
    pub pi: Vec<f64>,
    pub fixed_point_residual: f64,
    pub projection_residual: f64,
}

/// `pi = d / 2m`, with the residuals of `P pi = pi` and `V^T pi = 0`.
pub fn stationary_projection(g: &LiftedLineGraph) -> Result<StationaryCheck> {
    let d = g.degrees();
    let total = g.total_weight() as f64;
    let pi: Vec<f64> = d.iter().map(|&v| v as f64 / total).collect();
    let p = transition_matrix(g)?;
    let fixed_point_residual = max_abs_diff(&p.mul_vec(&pi)?, &pi);
    let n1 = g.n1();
    let projection_residual = max_abs_diff(&pi[..n1], &pi[n1..]);
    Ok(StationaryCheck {
        pi,
        fixed_point_residual,
        projection_residual,
    })
}

/// Exact rank over the rationals by fraction-free sparse elimination.
///
/// Each reduction step replaces a row by an integer combination with the
/// pivot row and divides out the content, so entries stay small. Arithmetic
/// is checked and reports [`Error::Overflow`] rather than wrapping.
pub fn exact_rank(m: &SignedSparseMatrix) -> Result<usize> {
    type Row = Vec<(usize, i128)>;
    let ncols = m.ncols();
    let mut buckets: Vec<Vec<Row>> = vec![Vec::new(); ncols];
    for r in 0..m.nrows() {
        let (cols, vals) = m.row(r);
        let row: Row = cols.iter().zip(vals).map(|(&c, &v)| (c, v as i128)).collect();
        if let Some(&(c, _)) = row.first() {
            buckets[c].push(row);
        }
    }
    let mut rank = 0;
    for c in 0..ncols {
        let mut rows = std::mem::take(&mut buckets[c]);
        if rows.is_empty() {
            continue;
        }
        let best = (0..rows.len())
            .min_by_key(|&i| (rows[i].len(), rows[i][0].1.unsigned_abs()))
            .expect("nonempty");
        let pivot = rows.swap_remove(best);
        rank += 1;
        let a = pivot[0].1;
        for row in rows {
            let b = row[0].1;
            let reduced = combine(&row, a, &pivot, b)?;
            if let Some(&(lead, _)) = reduced.first() {
                buckets[lead].push(reduced);
            }
        }
    }
    Ok(rank)
}

/// `a * r - b * p` with the content divided out; both rows start at the same column.
fn combine(r: &[(usize, i128)], a: i128, p: &[(usize, i128)], b: i128) -> Result<Vec<(usize, i128)>> {
    let mut out = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (0, 0);
    let mul = |x: i128, y: i128| x.checked_mul(y).ok_or(Error::Overflow);
    while i < r.len() || j < p.len() {
        let (col, v) = match (r.get(i), p.get(j)) {
            (Some(&(cr, vr)), Some(&(cp, vp))) if cr == cp => {
                i += 1;
                j += 1;
                (cr, mul(a, vr)?.checked_sub(mul(b, vp)?).ok_or(Error::Overflow)?)
            }
            (Some(&(cr, vr)), Some(&(cp, _))) if cr < cp => {
                i += 1;
                (cr, mul(a, vr)?)
            }
            (Some(&(cr, vr)), None) => {
                i += 1;
                (cr, mul(a, vr)?)
            }
            (_, Some(&(cp, vp))) => {
                j += 1;
                (cp, mul(b, vp)?.checked_neg().ok_or(Error::Overflow)?)
            }
            (None, None) => unreachable!(),
        };
        if v != 0 {
            out.push((col, v));
        }
    }
    let g = out.iter().fold(0i128, |g, &(_, v)| gcd(g, v));
    if g > 1 {
        out.iter_mut().for_each(|e| e.1 /= g);
    }
    Ok(out)
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i128
}

/// First Betti number `n1 - rank B1 - rank B2`.
pub fn betti_1(x: &SimplicialComplex) -> Result<usize> {
    Ok(x.n1() - exact_rank(&boundary_1(x))? - exact_rank(&boundary_2(x))?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HodgeCheck {
    pub betti_1: usize,
    /// Zero eigenvalues of the normalized Laplacian.
    pub kernel_dim: usize,
    pub min_l1_eigenvalue: f64,
    /// `max |B1 B2|`, zero for a valid complex.
    pub boundary_residual: i64,
}

pub fn hodge_check(x: &SimplicialComplex) -> Result<HodgeCheck> {
    check_size(x.n1(), DENSE_STATE_LIMIT)?;
    let l1 = hodge_l1(x);
    let d = DTot::of(x);
    let l1_eigs = sorted_eigenvalues(l1.to_dense());
    let normalized = sorted_eigenvalues(symmetrize(&l1, d.as_slice()));
    let b = boundary_1(x).matmul(&boundary_2(x))?;
    Ok(HodgeCheck {
        betti_1: betti_1(x)?,
        kernel_dim: normalized.iter().filter(|&&l| l.abs() < KERNEL_TOLERANCE).count(),
        min_l1_eigenvalue: l1_eigs.first().copied().unwrap_or(0.0),
        boundary_residual: b.triplets().map(|(_, _, v)| v.abs()).max().unwrap_or(0),
    })
}

/// Dense `P` as an `nalgebra` matrix, for callers that want to inspect it.
pub fn dense_transition(g: &LiftedLineGraph) -> Result<DMatrix<f64>> {
    check_size(g.n_states(), DENSE_STATE_LIMIT)?;
    Ok(transition_matrix(g)?.to_dense())
}

/// `P^t e_start` computed by repeated sparse products.
pub fn transition_column(g: &LiftedLineGraph, start: usize, t: usize) -> Result<Vec<f64>> {
    let p = transition_matrix(g)?;
    let mut v = vec![0.0; g.n_states()];
    v[start] = 1.0;
    for _ in 0..t {
        v = p.mul_vec(&v)?;
    }
    Ok(v)
}
