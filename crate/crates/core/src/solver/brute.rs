// SPDX-License-Identifier: Apache-2.0

//! Exhaustive oracle: the largest rank spanned by pairwise commuting vectors
//! with entries in `[-b, b]`.
//!
//! Deliberately independent of the rest of the solver. Commutators are
//! computed straight from the entries of `Lambda` in machine integers, and
//! ranks by plain fraction-free elimination. The result is a lower bound for
//! the dimension, and equal to it once `b` is large enough to reach a basis
//! of some optimal sublattice.

use num_traits::ToPrimitive;

use super::SolverError;
use crate::pairing::{MultiparameterMatrix, Pairing};

/// Size caps for the exhaustive search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BruteForceLimits {
    pub max_rank: usize,
    pub max_vectors: usize,
}

impl Default for BruteForceLimits {
    fn default() -> Self {
        BruteForceLimits {
            max_rank: 6,
            max_vectors: 20_000,
        }
    }
}

impl BruteForceLimits {
    /// Whether rank `n` at entry bound `b` is within the caps.
    pub fn admits(&self, n: usize, bound: u32) -> bool {
        let width = 2 * u64::from(bound) + 1;
        n <= self.max_rank && width.checked_pow(n as u32).is_some_and(|t| t <= self.max_vectors as u64)
    }
}

/// Commutator data as machine integers: for every pair `i < j`, the free
/// exponents and the torsion exponent of `lambda_ij`.
struct Table {
    n: usize,
    torsion_order: i64,
    free: Vec<Vec<i64>>,
    torsion: Vec<i64>,
}

impl Table {
    fn pair(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    /// `a^T M` for every free form `M`, then for the torsion form, laid out
    /// one row of length `n` after another.
    fn image(&self, a: &[i64]) -> Vec<i64> {
        let n = self.n;
        let k = self.free.first().map_or(0, Vec::len);
        let mut out = vec![0i64; (k + 1) * n];
        for i in 0..n {
            for j in i + 1..n {
                let p = self.pair(i, j);
                let coefficients = self.free[p].iter().chain(std::iter::once(&self.torsion[p]));
                for (l, &e) in coefficients.enumerate() {
                    out[l * n + j] += a[i] * e;
                    out[l * n + i] -= a[j] * e;
                }
            }
        }
        out
    }

    fn commute(&self, image: &[i64], b: &[i64]) -> bool {
        let (free, torsion) = image.split_at(image.len() - self.n);
        let dot = |r: &[i64]| r.iter().zip(b).map(|(x, y)| x * y).sum::<i64>();
        free.chunks(self.n).all(|r| dot(r) == 0) && dot(torsion).rem_euclid(self.torsion_order) == 0
    }
}

fn small(x: &num_bigint::BigInt) -> Result<i64, SolverError> {
    x.to_i64()
        .filter(|v| v.abs() < 1 << 20)
        .ok_or_else(|| SolverError::TooLarge(format!("exponent {x} does not fit the oracle")))
}

/// Oracle for `P(Lambda)`.
pub fn brute_force_dimension(lambda: &MultiparameterMatrix, bound: u32) -> Result<usize, SolverError> {
    let n = lambda.rank();
    let k = lambda.value_group().free_rank();
    let mut free = vec![vec![0; k]; n * n];
    let mut torsion = vec![0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let e = lambda.entry(i, j);
            free[i * n + j] = e.free_part().iter().map(small).collect::<Result<_, _>>()?;
            torsion[i * n + j] = e.torsion_part() as i64;
        }
    }
    let table = Table {
        n,
        torsion_order: lambda.value_group().torsion_order() as i64,
        free,
        torsion,
    };
    run(&table, bound)
}

/// Oracle for a pairing given by its forms.
pub fn brute_force_pairing(p: &Pairing, bound: u32) -> Result<usize, SolverError> {
    let n = p.rank();
    let mut free = vec![vec![0; p.free_forms().len()]; n * n];
    let mut torsion = vec![0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            free[i * n + j] = p.free_forms().iter().map(|f| small(f.get(i, j))).collect::<Result<_, _>>()?;
            torsion[i * n + j] = small(p.torsion_form().get(i, j))?;
        }
    }
    let table = Table {
        n,
        torsion_order: p.value_group().torsion_order() as i64,
        free,
        torsion,
    };
    run(&table, bound)
}

fn run(table: &Table, bound: u32) -> Result<usize, SolverError> {
    let n = table.n;
    if !BruteForceLimits::default().admits(n, bound) {
        return Err(SolverError::TooLarge(format!("rank {n} at entry bound {bound}")));
    }
    let vectors = box_vectors(n, bound as i64);
    let words = vectors.len().div_ceil(64);
    let mut adjacency = vec![vec![0u64; words]; vectors.len()];
    for i in 0..vectors.len() {
        let image = table.image(&vectors[i]);
        for j in i + 1..vectors.len() {
            if table.commute(&image, &vectors[j]) {
                adjacency[i][j / 64] |= 1 << (j % 64);
                adjacency[j][i / 64] |= 1 << (i % 64);
            }
        }
    }
    let mut search = Clique {
        vectors: &vectors,
        adjacency: &adjacency,
        best: 0,
        n,
    };
    let all: Vec<usize> = (0..vectors.len()).collect();
    search.extend(&mut Vec::new(), &all);
    Ok(search.best)
}

/// Nonzero vectors in `[-b, b]^n` whose first nonzero entry is positive.
fn box_vectors(n: usize, b: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![-b; n];
    loop {
        if cur.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0) {
            out.push(cur.clone());
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            if cur[i] < b {
                cur[i] += 1;
                break;
            }
            cur[i] = -b;
            i += 1;
        }
    }
}

struct Clique<'a> {
    vectors: &'a [Vec<i64>],
    adjacency: &'a [Vec<u64>],
    best: usize,
    n: usize,
}

impl Clique<'_> {
    /// `chosen` is independent and pairwise commuting; `candidates` commute
    /// with all of it, lie outside its span and come later in the fixed
    /// order. Vectors inside the span never raise the rank, so they are
    /// dropped as soon as they fall into it.
    fn extend(&mut self, chosen: &mut Vec<usize>, candidates: &[usize]) {
        self.best = self.best.max(chosen.len());
        if self.best == self.n || candidates.is_empty() {
            return;
        }
        let mut reach = Echelon::new(self.n);
        for &i in chosen.iter().chain(candidates) {
            reach.insert(&self.vectors[i]);
            if reach.rank() > self.best {
                break;
            }
        }
        if reach.rank() <= self.best {
            return;
        }
        let mut base = Echelon::new(self.n);
        for &i in chosen.iter() {
            base.insert(&self.vectors[i]);
        }
        for (pos, &c) in candidates.iter().enumerate() {
            let mut span = base;
            span.insert(&self.vectors[c]);
            let next: Vec<usize> = candidates[pos + 1..]
                .iter()
                .copied()
                .filter(|&d| self.adjacency[c][d / 64] >> (d % 64) & 1 == 1 && !span.contains(&self.vectors[d]))
                .collect();
            chosen.push(c);
            self.extend(chosen, &next);
            chosen.pop();
            if self.best == self.n {
                return;
            }
        }
    }
}

/// Widest vector the oracle handles; matches `BruteForceLimits::max_rank`.
const WIDTH: usize = 6;

/// Row echelon basis over `Q`, kept fraction-free. Fixed-size storage keeps
/// the inner loop of the clique search free of allocation.
#[derive(Clone, Copy)]
struct Echelon {
    cols: usize,
    len: usize,
    pivots: [usize; WIDTH],
    rows: [[i128; WIDTH]; WIDTH],
}

impl Echelon {
    fn new(cols: usize) -> Self {
        assert!(cols <= WIDTH, "oracle vectors have at most {WIDTH} entries");
        Echelon {
            cols,
            len: 0,
            pivots: [0; WIDTH],
            rows: [[0; WIDTH]; WIDTH],
        }
    }

    fn rank(&self) -> usize {
        self.len
    }

    fn reduce(&self, v: &[i64]) -> [i128; WIDTH] {
        let mut out = [0i128; WIDTH];
        for (o, &x) in out.iter_mut().zip(v) {
            *o = i128::from(x);
        }
        let v = &mut out[..self.cols];
        for (&p, r) in self.pivots.iter().zip(&self.rows).take(self.len) {
            if v[p] == 0 {
                continue;
            }
            let (a, b) = (r[p], v[p]);
            for j in 0..self.cols {
                v[j] = v[j] * a - r[j] * b;
            }
            // Content removal only once entries grow; it keeps products of
            // two stored entries far from overflow.
            if v.iter().any(|x| x.abs() > 1 << 40) {
                let g = v.iter().fold(0i128, |g, &x| gcd(g, x.abs()));
                v.iter_mut().for_each(|x| *x /= g);
            }
        }
        out
    }

    fn contains(&self, v: &[i64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Adds `v` if it is independent; reports whether it was.
    fn insert(&mut self, v: &[i64]) -> bool {
        let r = self.reduce(v);
        match r.iter().position(|&x| x != 0) {
            Some(p) => {
                self.pivots[self.len] = p;
                self.rows[self.len] = r;
                self.len += 1;
                true
            }
            None => false,
        }
    }
}

/// Rank over `Q`.
#[cfg(test)]
fn rank(rows: &[&[i64]]) -> usize {
    let mut e = Echelon::new(rows.first().map_or(0, |r| r.len()));
    rows.iter().filter(|r| e.insert(r)).count()
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
