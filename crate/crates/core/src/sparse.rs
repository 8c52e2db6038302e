//! Compressed-row sparse matrices with integer or float entries.
//!
//! Assembly goes through coordinate triplets; duplicates are summed and
//! explicit zeros dropped, so two matrices with the same entries compare equal.

use std::fmt::Display;
use std::io::{BufRead, Write};
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::DMatrix;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Entry type of a [`SparseMatrix`].
pub trait Scalar:
    Copy + PartialEq + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
}

impl<T> Scalar for T where
    T: Copy + PartialEq + Zero + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Neg<Output = T>
{
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<T>,
}

/// Integer-valued matrices: boundary operators, `L1`, lifted adjacencies.
pub type SignedSparseMatrix = SparseMatrix<i64>;

impl<T: Scalar> SparseMatrix<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self
    where
        T: num_traits::One,
    {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, T::one())))
    }

    pub fn diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        Self::from_triplets(n, n, diag.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    /// Assembles from `(row, col, value)` triplets. Panics on out-of-range indices.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: impl IntoIterator<Item = (usize, usize, T)>) -> Self {
        let mut trip: Vec<(usize, usize, T)> = triplets.into_iter().collect();
        trip.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(trip.len());
        let mut values: Vec<T> = Vec::with_capacity(trip.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in trip {
            assert!(r < nrows && c < ncols, "triplet ({r},{c}) outside {nrows}x{ncols}");
            if last == Some((r, c)) {
                let top = values.last_mut().unwrap();
                *top = *top + v;
            } else {
                indptr[r + 1] += 1;
                indices.push(c);
                values.push(v);
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        SparseMatrix {
            nrows,
            ncols,
            indptr,
            indices,
            values,
        }
        .pruned()
    }

    fn pruned(self) -> Self {
        if self.values.iter().all(|v| !v.is_zero()) {
            return self;
        }
        let (nrows, ncols) = (self.nrows, self.ncols);
        let trip: Vec<_> = self.triplets().filter(|t| !t.2.is_zero()).collect();
        let mut indptr = vec![0usize; nrows + 1];
        for &(r, _, _) in &trip {
            indptr[r + 1] += 1;
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        SparseMatrix {
            nrows,
            ncols,
            indptr,
            indices: trip.iter().map(|t| t.1).collect(),
            values: trip.iter().map(|t| t.2).collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `r`.
    pub fn row(&self, r: usize) -> (&[usize], &[T]) {
        let span = self.indptr[r]..self.indptr[r + 1];
        (&self.indices[span.clone()], &self.values[span])
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(p) => vals[p],
            Err(_) => T::zero(),
        }
    }

    /// Entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.ncols, self.nrows, self.triplets().map(|(r, c, v)| (c, r, v)))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> SparseMatrix<U> {
        SparseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            indptr: self.indptr.clone(),
            indices: self.indices.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
        .pruned()
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self::from_triplets(
            self.nrows,
            self.ncols,
            self.triplets().chain(other.triplets()),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self::from_triplets(
            self.nrows,
            self.ncols,
            self.triplets().chain(other.triplets().map(|(r, c, v)| (r, c, -v))),
        ))
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.nrows != other.nrows {
            return Err(Error::DimensionMismatch {
                expected: self.nrows,
                found: other.nrows,
            });
        }
        if self.ncols != other.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                found: other.ncols,
            });
        }
        Ok(())
    }

    /// Sparse product `self * other` (row-wise Gustavson accumulation).
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                found: other.nrows,
            });
        }
        let n = other.ncols;
        let mut acc = vec![T::zero(); n];
        let mut mark = vec![usize::MAX; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut indptr = Vec::with_capacity(self.nrows + 1);
        indptr.push(0);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for r in 0..self.nrows {
            touched.clear();
            let (cols, vals) = self.row(r);
            for (&k, &a) in cols.iter().zip(vals) {
                let (ocols, ovals) = other.row(k);
                for (&c, &b) in ocols.iter().zip(ovals) {
                    if mark[c] != r {
                        mark[c] = r;
                        acc[c] = T::zero();
                        touched.push(c);
                    }
                    acc[c] = acc[c] + a * b;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                if !acc[c].is_zero() {
                    indices.push(c);
                    values.push(acc[c]);
                }
            }
            indptr.push(indices.len());
        }
        Ok(SparseMatrix {
            nrows: self.nrows,
            ncols: n,
            indptr,
            indices,
            values,
        })
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                found: x.len(),
            });
        }
        Ok((0..self.nrows)
            .map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter().zip(vals).fold(T::zero(), |s, (&c, &v)| s + v * x[c])
            })
            .collect())
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.nrows)
            .map(|r| self.row(r).1.iter().fold(T::zero(), |s, &v| s + v))
            .collect()
    }

    pub fn col_sums(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.ncols];
        for (_, c, v) in self.triplets() {
            out[c] = out[c] + v;
        }
        out
    }

    pub fn diag(&self) -> Vec<T> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.nrows == self.ncols && self.triplets().all(|(r, c, v)| self.get(c, r) == v)
    }

    /// Sub-block `rows x cols` starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_triplets(
            rows,
            cols,
            self.triplets()
                .filter(|&(r, c, _)| r >= r0 && r < r0 + rows && c >= c0 && c < c0 + cols)
                .map(|(r, c, v)| (r - r0, c - c0, v)),
        )
    }

    /// Horizontal concatenation `[self other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.nrows != other.nrows {
            return Err(Error::DimensionMismatch {
                expected: self.nrows,
                found: other.nrows,
            });
        }
        let off = self.ncols;
        Ok(Self::from_triplets(
            self.nrows,
            self.ncols + other.ncols,
            self.triplets().chain(other.triplets().map(|(r, c, v)| (r, c + off, v))),
        ))
    }

    /// Vertical concatenation `[self; other]`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.ncols != other.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                found: other.ncols,
            });
        }
        let off = self.nrows;
        Ok(Self::from_triplets(
            self.nrows + other.nrows,
            self.ncols,
            self.triplets().chain(other.triplets().map(|(r, c, v)| (r + off, c, v))),
        ))
    }

    pub fn to_dense(&self) -> DMatrix<f64>
    where
        T: ToPrimitive,
    {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v.to_f64().expect("finite entry");
        }
        m
    }

    pub fn to_f64(&self) -> SparseMatrix<f64>
    where
        T: ToPrimitive,
    {
        SparseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            indptr: self.indptr.clone(),
            indices: self.indices.clone(),
            values: self.values.iter().map(|v| v.to_f64().expect("finite entry")).collect(),
        }
    }

    /// Writes the coordinate dump: a `nrows ncols nnz` header, then `row col value` lines.
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> std::io::Result<()>
    where
        T: Display,
    {
        writeln!(w, "{} {} {}", self.nrows, self.ncols, self.nnz())?;
        for (r, c, v) in self.triplets() {
            writeln!(w, "{r} {c} {v}")?;
        }
        Ok(())
    }

    /// Reads a dump written by [`SparseMatrix::write_coordinate`].
    pub fn read_coordinate<R: BufRead>(r: R) -> Result<Self>
    where
        T: FromStr,
    {
        let mut lines = r.lines().enumerate();
        let (nrows, ncols, nnz) = loop {
            let (i, line) = lines.next().ok_or(Error::Parse {
                line: 0,
                msg: "missing header".into(),
            })?;
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let f: Vec<usize> = line
                .split_whitespace()
                .map(|s| s.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse {
                    line: i + 1,
                    msg: e.to_string(),
                })?;
            if f.len() != 3 {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: "header must be `nrows ncols nnz`".into(),
                });
            }
            break (f[0], f[1], f[2]);
        };
        let mut trip = Vec::with_capacity(nnz);
        for (i, line) in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            let mut it = line.split_whitespace();
            let r: usize = it.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad("bad row"))?;
            let c: usize = it.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad("bad column"))?;
            let v: T = it.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad("bad value"))?;
            if r >= nrows || c >= ncols {
                return Err(bad("entry outside matrix"));
            }
            trip.push((r, c, v));
        }
        if trip.len() != nnz {
            return Err(Error::Parse {
                line: 0,
                msg: format!("header announces {nnz} entries, found {}", trip.len()),
            });
        }
        Ok(Self::from_triplets(nrows, ncols, trip))
    }
}

impl SparseMatrix<f64> {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl SparseMatrix<i64> {
    /// Entrywise positive part `max(a, 0)`.
    pub fn positive_part(&self) -> Self {
        self.map(|v| v.max(0))
    }

    /// Entrywise negative part `max(-a, 0)`.
    pub fn negative_part(&self) -> Self {
        self.map(|v| (-v).max(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates_and_drop_zeros() {
        let m = SparseMatrix::from_triplets(2, 3, vec![(0, 1, 2i64), (0, 1, 3), (1, 2, 4), (1, 2, -4), (1, 0, 1)]);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 1), 5);
        assert_eq!(m.get(1, 2), 0);
        assert_eq!(m.get(1, 0), 1);
    }

    #[test]
    fn product_matches_dense() {
        let a = SparseMatrix::from_triplets(2, 3, vec![(0, 0, 1i64), (0, 2, -2), (1, 1, 3)]);
        let b = SparseMatrix::from_triplets(3, 2, vec![(0, 1, 4i64), (1, 0, 5), (2, 0, 1), (2, 1, 1)]);
        let c = a.matmul(&b).unwrap();
        assert_eq!(c.to_dense(), a.to_dense() * b.to_dense());
        assert!(a.matmul(&a).is_err());
    }

    #[test]
    fn parts_and_stacking() {
        let a = SparseMatrix::from_triplets(1, 3, vec![(0, 0, -1i64), (0, 2, 2)]);
        assert_eq!(a.positive_part().get(0, 2), 2);
        assert_eq!(a.positive_part().get(0, 0), 0);
        assert_eq!(a.negative_part().get(0, 0), 1);
        let h = a.hstack(&a.scale(-1)).unwrap();
        assert_eq!((h.nrows(), h.ncols()), (1, 6));
        assert_eq!(h.get(0, 3), 1);
        let v = a.vstack(&a).unwrap();
        assert_eq!(v.block(1, 0, 1, 3), a);
    }

    #[test]
    fn coordinate_dump_roundtrip() {
        let m = SparseMatrix::from_triplets(3, 2, vec![(0, 1, 0.25f64), (2, 0, -1.0 / 3.0)]);
        let mut buf = Vec::new();
        m.write_coordinate(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("3 2 2\n"));
        let back = SparseMatrix::<f64>::read_coordinate(&buf[..]).unwrap();
        assert_eq!(back, m);
        assert!(SparseMatrix::<f64>::read_coordinate(&b"3 2 5\n0 0 1\n"[..]).is_err());
    }
}
