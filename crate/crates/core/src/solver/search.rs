// SPDX-License-Identifier: Apache-2.0

//! Deterministic branch and bound for large common isotropic sublattices.
//!
//! A node is a saturated isotropic `W`. Every isotropic space containing `W`
//! lies in `P = W^perp`, and any `v` in `P` outside `W` extends `W`. Children
//! are scored by the pencil bound of `W + v` inside its own perp and explored
//! best first; a node whose bound cannot beat the incumbent is cut.

use std::cmp::Reverse;
use std::collections::HashSet;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::bounds::{self, Quotient};
use super::{perp, DimensionOptions};
use crate::lattice::{self, IntMatrix, Sublattice};

/// Largest number of candidates scored at one node.
const MAX_CANDIDATES: usize = 400;
/// Coefficient enumeration is used while `(2b + 1)^s` stays below this.
const ENUMERATION_CAP: usize = 3_000;

pub(crate) struct Problem<'a> {
    pub n: usize,
    pub forms: &'a [IntMatrix],
}

struct Search<'a> {
    problem: &'a Problem<'a>,
    opts: &'a DimensionOptions,
    deadline: Instant,
    target: usize,
    best: Sublattice,
    nodes: usize,
    visited: HashSet<Sublattice>,
    quick: Vec<Vec<BigInt>>,
}

struct Child {
    bound: usize,
    perp_dim: usize,
    order: usize,
    space: Sublattice,
    perp: Sublattice,
}

/// Returns the best isotropic sublattice found, starting from `start` (which
/// must be isotropic) and stopping early once `target` is reached.
pub(crate) fn search(
    problem: &Problem<'_>,
    start: Sublattice,
    hint: Option<Sublattice>,
    target: usize,
    opts: &DimensionOptions,
    deadline: Instant,
) -> Sublattice {
    let mut best = start.clone();
    if let Some(h) = hint {
        if h.rank() > best.rank() {
            best = h;
        }
    }
    let mut s = Search {
        problem,
        opts,
        deadline,
        target,
        best,
        nodes: 0,
        visited: HashSet::new(),
        quick: bounds::quick_combinations(problem.forms.len(), opts.seed),
    };
    let p = perp(problem.n, problem.forms, &start);
    s.visit(start, p);
    s.best
}

impl Search<'_> {
    fn exhausted(&self) -> bool {
        self.best.rank() >= self.target || self.nodes >= self.opts.node_limit || Instant::now() >= self.deadline
    }

    fn bound(&self, w: &Sublattice, p: &Sublattice) -> usize {
        let q = Quotient::new(self.problem.n, self.problem.forms, w, p);
        w.rank() + q.upper_bound(&self.quick).min(q.exterior_bound())
    }

    fn visit(&mut self, w: Sublattice, p: Sublattice) {
        if self.exhausted() || !self.visited.insert(w.clone()) {
            return;
        }
        self.nodes += 1;
        if w.rank() > self.best.rank() {
            self.best = w.clone();
        }
        if p.rank() == w.rank() || self.bound(&w, &p) <= self.best.rank() {
            return;
        }

        let mut children = Vec::new();
        let mut seen = HashSet::new();
        for (order, v) in self.candidates(&w, &p).into_iter().enumerate() {
            let space = lattice::saturate(&w.with_vector(&v));
            if self.visited.contains(&space) || !seen.insert(space.clone()) {
                continue;
            }
            let child_perp = perp(self.problem.n, self.problem.forms, &space);
            let bound = self.bound(&space, &child_perp);
            if bound <= self.best.rank() {
                continue;
            }
            children.push(Child {
                bound,
                perp_dim: child_perp.rank(),
                order,
                space,
                perp: child_perp,
            });
        }
        children.sort_by_key(|c| (Reverse(c.bound), Reverse(c.perp_dim), c.order));
        for child in children {
            if self.exhausted() {
                return;
            }
            if child.bound > self.best.rank() {
                self.visit(child.space, child.perp);
            }
        }
    }

    /// Candidate extension vectors in `P`, outside the span of `W`, in a
    /// fixed order: kernels of pencil members on `P`, the basis of `P`, their
    /// pairwise sums and differences, then bounded coefficient vectors in
    /// graded lexicographic order.
    fn candidates(&self, w: &Sublattice, p: &Sublattice) -> Vec<Vec<BigInt>> {
        let n = self.problem.n;
        let basis = p.rows();
        let s = basis.len();
        let pm = IntMatrix::from_row_vecs(n, basis.clone()).expect("rows have length n");
        let mut raw: Vec<Vec<BigInt>> = Vec::new();

        let units = bounds::pencil_combinations(self.problem.forms.len(), 0, 0);
        for c in units.iter().chain(&self.quick) {
            let combo = bounds::combine(self.problem.forms, c, n);
            let restricted = combo.congruence(&pm).expect("shapes agree");
            let kernel: Vec<Vec<BigInt>> = lattice::kernel(&restricted)
                .rows()
                .iter()
                .map(|x| lift(x, &basis))
                .filter(|v| !w.spans(v))
                .collect();
            push_with_pairs(&mut raw, &kernel);
        }

        push_with_pairs(&mut raw, &basis);

        let b = self.opts.search_bound as i64;
        let width = (2 * b + 1) as usize;
        if b > 0 && width.checked_pow(s as u32).is_some_and(|t| t <= ENUMERATION_CAP) {
            for coeffs in graded_vectors(s, b) {
                raw.push(lift(&coeffs, &basis));
            }
        }

        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for v in raw {
            let Some(v) = primitive(v) else { continue };
            if seen.contains(&v) || w.spans(&v) {
                continue;
            }
            seen.insert(v.clone());
            out.push(v);
            if out.len() >= MAX_CANDIDATES {
                break;
            }
        }
        out
    }
}

fn push_with_pairs(out: &mut Vec<Vec<BigInt>>, vs: &[Vec<BigInt>]) {
    out.extend(vs.iter().cloned());
    for (i, a) in vs.iter().enumerate() {
        for b in &vs[i + 1..] {
            out.push(a.iter().zip(b).map(|(x, y)| x + y).collect());
            out.push(a.iter().zip(b).map(|(x, y)| x - y).collect());
        }
    }
}

fn lift(coeffs: &[BigInt], basis: &[Vec<BigInt>]) -> Vec<BigInt> {
    let n = basis.first().map_or(0, Vec::len);
    let mut v = vec![BigInt::zero(); n];
    for (c, row) in coeffs.iter().zip(basis) {
        if c.is_zero() {
            continue;
        }
        for (x, y) in v.iter_mut().zip(row) {
            *x += c * y;
        }
    }
    v
}

/// Divides out the content and makes the first nonzero entry positive.
fn primitive(mut v: Vec<BigInt>) -> Option<Vec<BigInt>> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return None;
    }
    let first_negative = v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    let g = if first_negative { -g } else { g };
    for x in v.iter_mut() {
        *x = &*x / &g;
    }
    Some(v)
}

/// Nonzero vectors in `[-b, b]^s` with a positive leading entry, ordered by
/// L1 norm and then lexicographically.
fn graded_vectors(s: usize, b: i64) -> Vec<Vec<BigInt>> {
    let mut all = Vec::new();
    let mut cur = vec![-b; s];
    loop {
        if let Some(first) = cur.iter().find(|&&x| x != 0) {
            if *first > 0 {
                all.push(cur.clone());
            }
        }
        let mut i = 0;
        loop {
            if i == s {
                all.sort_by_key(|v: &Vec<i64>| (v.iter().map(|x| x.abs()).sum::<i64>(), v.clone()));
                return all.into_iter().map(|v| v.into_iter().map(BigInt::from).collect()).collect();
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
