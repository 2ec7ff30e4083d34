// SPDX-License-Identifier: Apache-2.0

//! Exact integer matrix algebra: Hermite normal form, rank, integer kernels,
//! saturation and the rank of alternating forms.
//!
//! Every entry is a [`BigInt`]. Hermite intermediates grow quickly even for
//! tiny matrices, so there is no fixed-width path.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("expected {expected} entries for a {rows}x{cols} matrix, got {got}")]
    EntryCount {
        rows: usize,
        cols: usize,
        expected: usize,
        got: usize,
    },
    #[error("row {row} has {got} entries, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not alternating (needs M^T = -M and a zero diagonal)")]
    NotAlternating,
}

/// Converts a slice of machine integers into a lattice vector.
pub fn int_vector(values: &[i64]) -> Vec<BigInt> {
    values.iter().map(|&v| BigInt::from(v)).collect()
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self, LatticeError> {
        if data.len() != rows * cols {
            return Err(LatticeError::EntryCount {
                rows,
                cols,
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows of anything convertible into [`BigInt`].
    ///
    /// An empty row list gives a `0 x 0` matrix; use [`IntMatrix::from_row_vecs`]
    /// when the column count must survive an empty row list.
    pub fn from_rows<T>(rows: Vec<Vec<T>>) -> Result<Self, LatticeError>
    where
        T: Into<BigInt>,
    {
        let cols = rows.first().map_or(0, Vec::len);
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(Into::into).collect())
            .collect();
        Self::from_row_vecs(cols, rows)
    }

    pub fn from_row_vecs(cols: usize, rows: Vec<Vec<BigInt>>) -> Result<Self, LatticeError> {
        let n_rows = rows.len();
        let mut data = Vec::with_capacity(n_rows * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(LatticeError::RaggedRow {
                    row: i,
                    expected: cols,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(IntMatrix {
            rows: n_rows,
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// `M^T = -M` with zero diagonal.
    pub fn is_alternating(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows;
        (0..n).all(|i| {
            self.get(i, i).is_zero() && (i + 1..n).all(|j| (self.get(i, j) + self.get(j, i)).is_zero())
        })
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &IntMatrix) -> Result<IntMatrix, LatticeError> {
        if self.cols != rhs.rows {
            return Err(LatticeError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>, LatticeError> {
        if v.len() != self.cols {
            return Err(LatticeError::Dimension(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// `a^T M b`.
    pub fn bilinear(&self, a: &[BigInt], b: &[BigInt]) -> BigInt {
        debug_assert_eq!(a.len(), self.rows);
        debug_assert_eq!(b.len(), self.cols);
        let mut acc = BigInt::zero();
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            acc += ai * dot(self.row(i), b);
        }
        acc
    }

    pub fn add(&self, rhs: &IntMatrix) -> Result<IntMatrix, LatticeError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(LatticeError::Dimension("matrix sum of different shapes".into()));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, k: &BigInt) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * k).collect(),
        }
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &IntMatrix) -> Result<IntMatrix, LatticeError> {
        if self.cols != other.cols {
            return Err(LatticeError::Dimension("vstack with different column counts".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// `G M G^T` for a `g x n` matrix `G` and an `n x n` matrix `M`.
    pub fn congruence(&self, g: &IntMatrix) -> Result<IntMatrix, LatticeError> {
        g.mul(self)?.mul(&g.transpose())
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt, LatticeError> {
        if !self.is_square() {
            return Err(LatticeError::Dimension("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.row_vecs();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        Ok(if n == 0 { sign } else { sign * &a[n - 1][n - 1] })
    }

    /// Entries as machine integers, if they all fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(ToPrimitive::to_i64).collect())
            .collect()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{:?}", self.row_vecs().iter().map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>()).collect::<Vec<_>>())
    }
}

pub(crate) fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let mut acc = BigInt::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// `target -= q * source` on row vectors.
fn row_sub_multiple(rows: &mut [Vec<BigInt>], target: usize, source: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let (t, s) = if target < source {
        let (lo, hi) = rows.split_at_mut(source);
        (&mut lo[target], &hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(target);
        (&mut hi[0], &lo[source])
    };
    for (x, y) in t.iter_mut().zip(s.iter()) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

fn negate_row(row: &mut [BigInt]) {
    for x in row.iter_mut() {
        *x = -std::mem::take(x);
    }
}

/// Output of [`hnf`]: `u * m == h` with `u` unimodular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hermite {
    pub h: IntMatrix,
    pub u: IntMatrix,
}

impl Hermite {
    /// Number of nonzero rows of `h`.
    pub fn rank(&self) -> usize {
        (0..self.h.rows())
            .take_while(|&i| self.h.row(i).iter().any(|x| !x.is_zero()))
            .count()
    }
}

/// Row-style Hermite normal form.
///
/// Pivot columns strictly increase down the rows, pivots are positive, the
/// entries above each pivot lie in `[0, pivot)` and zero rows sit at the
/// bottom.
pub fn hnf(m: &IntMatrix) -> Hermite {
    let (h, u) = hnf_rows(m.row_vecs(), m.cols(), true);
    let rows = m.rows();
    Hermite {
        h: IntMatrix::from_row_vecs(m.cols(), h).expect("shape preserved"),
        u: IntMatrix::from_row_vecs(rows, u).expect("shape preserved"),
    }
}

fn hnf_rows(
    mut h: Vec<Vec<BigInt>>,
    cols: usize,
    track: bool,
) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let rows = h.len();
    let mut u: Vec<Vec<BigInt>> = if track {
        (0..rows)
            .map(|i| (0..rows).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect()
    } else {
        Vec::new()
    };
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // Euclid on the column below r until a single nonzero entry remains.
        loop {
            let pivot = (r..rows)
                .filter(|&i| !h[i][c].is_zero())
                .min_by(|&a, &b| h[a][c].abs().cmp(&h[b][c].abs()));
            let Some(p) = pivot else { break };
            h.swap(r, p);
            if track {
                u.swap(r, p);
            }
            let mut clean = true;
            for i in r + 1..rows {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = &h[i][c] / &h[r][c];
                row_sub_multiple(&mut h, i, r, &q);
                if track {
                    row_sub_multiple(&mut u, i, r, &q);
                }
                if !h[i][c].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            negate_row(&mut h[r]);
            if track {
                negate_row(&mut u[r]);
            }
        }
        for i in 0..r {
            if h[i][c].is_zero() {
                continue;
            }
            let q = h[i][c].div_floor(&h[r][c]);
            row_sub_multiple(&mut h, i, r, &q);
            if track {
                row_sub_multiple(&mut u, i, r, &q);
            }
        }
        r += 1;
    }
    (h, u)
}

/// Returns true when `m` is already in row Hermite normal form.
pub fn is_hermite(m: &IntMatrix) -> bool {
    let mut last_pivot: Option<usize> = None;
    let mut seen_zero_row = false;
    for i in 0..m.rows() {
        let row = m.row(i);
        match row.iter().position(|x| !x.is_zero()) {
            None => seen_zero_row = true,
            Some(p) => {
                if seen_zero_row || last_pivot.is_some_and(|lp| p <= lp) {
                    return false;
                }
                let pivot = &row[p];
                if !pivot.is_positive() {
                    return false;
                }
                for k in 0..i {
                    let above = m.get(k, p);
                    if above.is_negative() || above >= pivot {
                        return false;
                    }
                }
                last_pivot = Some(p);
            }
        }
    }
    true
}

/// Rank over the rationals.
pub fn rank(m: &IntMatrix) -> usize {
    rank_of_rows(m.row_vecs(), m.cols())
}

pub(crate) fn rank_of_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> usize {
    let (h, _) = hnf_rows(rows, cols, false);
    h.iter().take_while(|r| r.iter().any(|x| !x.is_zero())).count()
}

/// Saturated integer basis of `{a : M a = 0}`.
pub fn kernel(m: &IntMatrix) -> Sublattice {
    let cols = m.cols();
    if m.rows() == 0 {
        return Sublattice::full(cols);
    }
    let dec = hnf(&m.transpose());
    let r = dec.rank();
    let basis: Vec<Vec<BigInt>> = (r..cols).map(|i| dec.u.row(i).to_vec()).collect();
    Sublattice::from_rows(cols, basis).expect("kernel rows have the ambient length")
}

/// Half the rank of an alternating matrix.
pub fn skew_rank(m: &IntMatrix) -> Result<usize, LatticeError> {
    if !m.is_alternating() {
        return Err(LatticeError::NotAlternating);
    }
    let r = rank(m);
    debug_assert!(r.is_multiple_of(2), "alternating forms have even rank");
    Ok(r / 2)
}

/// Smallest sublattice with the same rational span and torsion-free quotient.
pub fn saturate(b: &Sublattice) -> Sublattice {
    let n = b.ambient_rank();
    if b.rank() == 0 {
        return Sublattice::zero(n);
    }
    let orthogonal = kernel(b.generators());
    kernel(orthogonal.generators())
}

/// A subgroup `B` of `Z^n`, stored as the nonzero rows of its Hermite form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Sublattice {
    ambient: usize,
    basis: IntMatrix,
}

impl Sublattice {
    /// Normalizes arbitrary generators; dependent or zero rows are allowed.
    pub fn new(generators: &IntMatrix) -> Sublattice {
        Self::from_rows(generators.cols(), generators.row_vecs()).expect("rows match the column count")
    }

    pub fn from_rows(ambient: usize, rows: Vec<Vec<BigInt>>) -> Result<Sublattice, LatticeError> {
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != ambient) {
            return Err(LatticeError::RaggedRow {
                row: i,
                expected: ambient,
                got: r.len(),
            });
        }
        let (h, _) = hnf_rows(rows, ambient, false);
        let kept: Vec<Vec<BigInt>> = h.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
        Ok(Sublattice {
            ambient,
            basis: IntMatrix::from_row_vecs(ambient, kept)?,
        })
    }

    pub fn full(n: usize) -> Sublattice {
        Sublattice {
            ambient: n,
            basis: IntMatrix::identity(n),
        }
    }

    pub fn zero(n: usize) -> Sublattice {
        Sublattice {
            ambient: n,
            basis: IntMatrix::zeros(0, n),
        }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn generators(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.basis.row_vecs()
    }

    /// Lattice membership, by reduction against the Hermite basis.
    pub fn contains(&self, v: &[BigInt]) -> bool {
        if v.len() != self.ambient {
            return false;
        }
        let mut v = v.to_vec();
        for i in 0..self.rank() {
            let row = self.basis.row(i);
            let p = row.iter().position(|x| !x.is_zero()).expect("stored rows are nonzero");
            if v[..p].iter().any(|x| !x.is_zero()) {
                return false;
            }
            let (q, rem) = v[p].div_rem(&row[p]);
            if !rem.is_zero() {
                return false;
            }
            for (x, y) in v.iter_mut().zip(row) {
                *x -= &q * y;
            }
        }
        v.iter().all(Zero::is_zero)
    }

    /// Whether `v` lies in the rational span.
    pub fn spans(&self, v: &[BigInt]) -> bool {
        let mut rows = self.rows();
        rows.push(v.to_vec());
        rank_of_rows(rows, self.ambient) == self.rank()
    }

    pub fn join(&self, other: &Sublattice) -> Sublattice {
        let mut rows = self.rows();
        rows.extend(other.rows());
        Self::from_rows(self.ambient, rows).expect("same ambient rank")
    }

    pub fn with_vector(&self, v: &[BigInt]) -> Sublattice {
        let mut rows = self.rows();
        rows.push(v.to_vec());
        Self::from_rows(self.ambient, rows).expect("same ambient rank")
    }

    pub fn scaled(&self, k: &BigInt) -> Sublattice {
        Sublattice::new(&self.basis.scale(k))
    }

    pub fn is_saturated(&self) -> bool {
        saturate(self) == *self
    }

    /// Index of `self` inside its saturation.
    pub fn index_in_saturation(&self) -> BigInt {
        let sat = saturate(self);
        // Same rational span means same pivot columns, and projecting onto those
        // columns is injective, so the index is a ratio of triangular determinants.
        let pivots = |s: &Sublattice| {
            let mut prod = BigInt::one();
            for i in 0..s.rank() {
                let row = s.basis.row(i);
                let p = row.iter().find(|x| !x.is_zero()).expect("nonzero row");
                prod *= p;
            }
            prod
        };
        pivots(self) / pivots(&sat)
    }
}

impl fmt::Debug for Sublattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sublattice(n={}, {:?})", self.ambient, self.basis)
    }
}
