// SPDX-License-Identifier: Apache-2.0

//! Upper bounds on the largest common isotropic subspace.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lattice::{self, IntMatrix, Sublattice};

/// The forms induced on `outer / inner`, written in a complement basis.
///
/// `inner` must pair trivially with all of `outer` (a radical, or an
/// isotropic `W` inside `W^perp`), which makes the induced forms well defined.
pub(crate) struct Quotient {
    dim: usize,
    forms: Vec<IntMatrix>,
}

impl Quotient {
    pub(crate) fn new(n: usize, forms: &[IntMatrix], inner: &Sublattice, outer: &Sublattice) -> Quotient {
        let mut chosen = inner.rows();
        let mut rank = inner.rank();
        let mut complement = Vec::new();
        for v in outer.rows() {
            if rank == outer.rank() {
                break;
            }
            chosen.push(v.clone());
            let r = lattice::rank_of_rows(chosen.clone(), n);
            if r > rank {
                rank = r;
                complement.push(v);
            } else {
                chosen.pop();
            }
        }
        let dim = complement.len();
        let c = IntMatrix::from_row_vecs(n, complement).expect("rows have length n");
        let forms = forms
            .iter()
            .map(|f| f.congruence(&c).expect("shapes agree"))
            .filter(|f| !f.is_zero())
            .collect();
        Quotient { dim, forms }
    }

    pub(crate) fn dim(&self) -> usize {
        self.dim
    }

    pub(crate) fn forms(&self) -> &[IntMatrix] {
        &self.forms
    }

    /// Any common isotropic subspace is isotropic for each member of the
    /// pencil, so its dimension is at most `dim - skew_rank(sum c_l F_l)`.
    pub(crate) fn upper_bound(&self, combos: &[Vec<BigInt>]) -> usize {
        if self.forms.is_empty() {
            return self.dim;
        }
        let full = self.dim / 2;
        let mut best = 0;
        for c in combos {
            let combo = combine(&self.forms, c, self.dim);
            let r = lattice::rank(&combo) / 2;
            best = best.max(r);
            if best == full {
                break;
            }
        }
        self.dim - best
    }

    /// A `g`-dimensional isotropic `W` puts the whole of `Lambda^2 W` into the
    /// annihilator of the forms inside `Lambda^2 V`, so
    /// `g(g-1)/2 <= C(dim, 2) - (number of independent forms)`.
    pub(crate) fn exterior_bound(&self) -> usize {
        let pairs: Vec<(usize, usize)> = (0..self.dim)
            .flat_map(|i| (i + 1..self.dim).map(move |j| (i, j)))
            .collect();
        let flat: Vec<Vec<BigInt>> = self
            .forms
            .iter()
            .map(|f| pairs.iter().map(|&(i, j)| f.get(i, j).clone()).collect())
            .collect();
        let independent = lattice::rank_of_rows(flat, pairs.len());
        let room = pairs.len() - independent;
        let mut g = 0;
        while g < self.dim && (g + 1) * g / 2 <= room {
            g += 1;
        }
        g
    }
}

pub(crate) fn combine(forms: &[IntMatrix], c: &[BigInt], dim: usize) -> IntMatrix {
    let mut acc = IntMatrix::zeros(dim, dim);
    for (f, ci) in forms.iter().zip(c.iter().cycle()) {
        if !ci.is_zero() {
            acc = acc.add(&f.scale(ci)).expect("same shape");
        }
    }
    acc
}

/// Deterministic pencil coefficients: unit vectors, then sign patterns with a
/// leading `+1`, then seeded pseudorandom vectors with entries in `[-3, 3]`.
pub(crate) fn pencil_combinations(k: usize, samples: usize, seed: u64) -> Vec<Vec<BigInt>> {
    let mut out: Vec<Vec<BigInt>> = (0..k)
        .map(|l| (0..k).map(|i| BigInt::from(i64::from(i == l))).collect())
        .collect();
    let target = samples.max(k);
    if k >= 2 {
        let patterns = 1u64 << (k - 1).min(20);
        for mask in 0..patterns {
            if out.len() >= target {
                break;
            }
            let v = (0..k)
                .map(|i| {
                    if i == 0 || mask >> (i - 1) & 1 == 0 {
                        BigInt::from(1)
                    } else {
                        BigInt::from(-1)
                    }
                })
                .collect();
            out.push(v);
        }
    }
    out.extend(random_combinations(k, target.saturating_sub(out.len()), seed));
    out
}

/// A handful of generic combinations for cheap bounds inside the search.
pub(crate) fn quick_combinations(k: usize, seed: u64) -> Vec<Vec<BigInt>> {
    let mut out = random_combinations(k, 4, seed ^ 0x9e37_79b9_7f4a_7c15);
    out.push(vec![BigInt::from(1); k]);
    out
}

fn random_combinations(k: usize, count: usize, seed: u64) -> Vec<Vec<BigInt>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count && k > 0 {
        let v: Vec<i64> = (0..k).map(|_| rng.gen_range(-3..=3)).collect();
        if v.iter().any(|&x| x != 0) {
            out.push(v.into_iter().map(BigInt::from).collect());
        }
    }
    out
}
