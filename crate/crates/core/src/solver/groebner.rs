// SPDX-License-Identifier: Apache-2.0

//! Certificates that no common isotropic subspace of a given dimension exists.
//!
//! Every `g`-dimensional subspace of `Q^N` is the row space of `[I | X]` after
//! permuting columns so that some `g` columns are pivots. For each choice of
//! pivot columns the isotropy conditions `w_s^T F w_t = 0` are quadrics in the
//! `g (N - g)` entries of `X`. If the reduced Groebner basis of every chart is
//! `{1}` there is no solution even over the algebraic closure, hence none over
//! `Q`. Buchberger's algorithm with the product and chain criteria, over `Q`,
//! graded reverse lexicographic order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::time::Instant;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::lattice::IntMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Refutation {
    NoSubspace,
    Unknown,
}

/// Tries to prove that the forms have no common isotropic subspace of
/// dimension `g`.
pub(crate) fn refute_isotropic(forms: &[IntMatrix], g: usize, step_limit: usize, deadline: Instant) -> Refutation {
    let n = forms.first().map_or(0, IntMatrix::rows);
    if g > n {
        return Refutation::NoSubspace;
    }
    if g <= 1 || forms.is_empty() {
        return Refutation::Unknown;
    }
    for pivots in subsets(n, g) {
        let system = chart_equations(forms, &pivots);
        match inconsistent(system, step_limit, deadline) {
            Some(true) => continue,
            _ => return Refutation::Unknown,
        }
    }
    Refutation::NoSubspace
}

/// Entry of the chart matrix: a constant or a variable.
#[derive(Clone, Copy)]
enum Entry {
    Zero,
    One,
    Var(usize),
}

fn chart_equations(forms: &[IntMatrix], pivots: &[usize]) -> Vec<Poly> {
    let n = forms[0].rows();
    let g = pivots.len();
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let nvars = g * free.len();
    let row = |s: usize| -> Vec<Entry> {
        (0..n)
            .map(|c| {
                if c == pivots[s] {
                    Entry::One
                } else if let Some(t) = free.iter().position(|&f| f == c) {
                    Entry::Var(s * free.len() + t)
                } else {
                    Entry::Zero
                }
            })
            .collect()
    };
    let rows: Vec<Vec<Entry>> = (0..g).map(row).collect();
    let mut out = Vec::new();
    for f in forms {
        for s in 0..g {
            for t in s + 1..g {
                let mut acc: BTreeMap<Mono, BigRational> = BTreeMap::new();
                for (c, x) in rows[s].iter().enumerate() {
                    for (d, y) in rows[t].iter().enumerate() {
                        let coeff = f.get(c, d);
                        if coeff.is_zero() {
                            continue;
                        }
                        let mut exps = vec![0u16; nvars];
                        match (x, y) {
                            (Entry::Zero, _) | (_, Entry::Zero) => continue,
                            (Entry::One, Entry::One) => {}
                            (Entry::Var(i), Entry::One) | (Entry::One, Entry::Var(i)) => exps[*i] += 1,
                            (Entry::Var(i), Entry::Var(j)) => {
                                exps[*i] += 1;
                                exps[*j] += 1;
                            }
                        }
                        *acc.entry(Mono(exps)).or_insert_with(BigRational::zero) += BigRational::from(coeff.clone());
                    }
                }
                let p = Poly::from_map(acc);
                if !p.is_zero() {
                    out.push(p);
                }
            }
        }
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Exponent vector, ordered by graded reverse lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Mono(Vec<u16>);

impl Mono {
    fn degree(&self) -> u32 {
        self.0.iter().map(|&e| u32::from(e)).sum()
    }

    fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn divides(&self, other: &Mono) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn quotient(&self, by: &Mono) -> Mono {
        Mono(self.0.iter().zip(&by.0).map(|(a, b)| a - b).collect())
    }

    fn times(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn lcm(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    fn coprime(&self, other: &Mono) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for (a, b) in self.0.iter().zip(&other.0).rev() {
                if a != b {
                    return b.cmp(a);
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Terms in increasing monomial order, so the leading term is last.
#[derive(Clone, Debug, PartialEq)]
struct Poly(Vec<(Mono, BigRational)>);

impl Poly {
    fn from_map(map: BTreeMap<Mono, BigRational>) -> Poly {
        Poly(map.into_iter().filter(|(_, c)| !c.is_zero()).collect())
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn leading(&self) -> &(Mono, BigRational) {
        self.0.last().expect("nonzero polynomial")
    }

    fn monic(mut self) -> Poly {
        let lc = self.leading().1.clone();
        for (_, c) in self.0.iter_mut() {
            *c = &*c / &lc;
        }
        self
    }

    /// `self - c * m * other`.
    fn sub_scaled(&self, c: &BigRational, m: &Mono, other: &Poly) -> Poly {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let mut a = self.0.iter().peekable();
        let mut b = other.0.iter().map(|(mo, co)| (mo.times(m), co * c)).peekable();
        loop {
            let ord = match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (Some(x), Some(y)) => x.0.cmp(&y.0),
            };
            match ord {
                Ordering::Less => out.push(a.next().expect("peeked").clone()),
                Ordering::Greater => {
                    let (mo, co) = b.next().expect("peeked");
                    out.push((mo, -co));
                }
                Ordering::Equal => {
                    let (mo, x) = a.next().expect("peeked").clone();
                    let (_, y) = b.next().expect("peeked");
                    let d = x - y;
                    if !d.is_zero() {
                        out.push((mo, d));
                    }
                }
            }
        }
        Poly(out)
    }
}

/// Full reduction of `f` by `basis` (all monic).
fn reduce(f: Poly, basis: &[Poly]) -> Poly {
    let mut p = f;
    let mut remainder: Vec<(Mono, BigRational)> = Vec::new();
    while let Some((m, c)) = p.0.last().cloned() {
        if let Some(g) = basis.iter().find(|g| g.leading().0.divides(&m)) {
            p = p.sub_scaled(&c, &m.quotient(&g.leading().0), g);
        } else {
            remainder.push(p.0.pop().expect("nonempty"));
        }
    }
    remainder.reverse();
    Poly(remainder)
}

fn s_poly(f: &Poly, g: &Poly) -> Poly {
    let l = f.leading().0.lcm(&g.leading().0);
    let a = Poly(
        f.0.iter()
            .map(|(m, c)| (m.times(&l.quotient(&f.leading().0)), c.clone()))
            .collect(),
    );
    a.sub_scaled(&BigRational::one(), &l.quotient(&g.leading().0), g)
}

/// `Some(true)` when the ideal is the unit ideal, `Some(false)` when a
/// Groebner basis without constants was completed, `None` on budget exhaustion.
fn inconsistent(polys: Vec<Poly>, step_limit: usize, deadline: Instant) -> Option<bool> {
    let mut basis: Vec<Poly> = Vec::new();
    let mut pending: Vec<(usize, usize)> = Vec::new();
    let add = |basis: &mut Vec<Poly>, pending: &mut Vec<(usize, usize)>, p: Poly| -> bool {
        if p.leading().0.is_constant() {
            return true;
        }
        let k = basis.len();
        basis.push(p.monic());
        pending.extend((0..k).map(|i| (i, k)));
        false
    };
    for f in polys {
        let r = reduce(f, &basis);
        if !r.is_zero() && add(&mut basis, &mut pending, r) {
            return Some(true);
        }
    }
    let mut steps = 0usize;
    while !pending.is_empty() {
        // Normal selection strategy: smallest lcm first.
        let pos = (0..pending.len())
            .min_by(|&x, &y| {
                let (i, j) = pending[x];
                let (k, l) = pending[y];
                let a = basis[i].leading().0.lcm(&basis[j].leading().0);
                let b = basis[k].leading().0.lcm(&basis[l].leading().0);
                a.cmp(&b).then((j, i).cmp(&(l, k)))
            })
            .expect("nonempty");
        let (i, j) = pending.swap_remove(pos);
        let (li, lj) = (&basis[i].leading().0, &basis[j].leading().0);
        if li.coprime(lj) || chain_redundant(&basis, &pending, i, j) {
            continue;
        }
        steps += 1;
        if steps > step_limit || Instant::now() >= deadline {
            return None;
        }
        let r = reduce(s_poly(&basis[i], &basis[j]), &basis);
        if !r.is_zero() && add(&mut basis, &mut pending, r) {
            return Some(true);
        }
    }
    Some(false)
}

fn chain_redundant(basis: &[Poly], pending: &[(usize, usize)], i: usize, j: usize) -> bool {
    let l = basis[i].leading().0.lcm(&basis[j].leading().0);
    let open: HashSet<(usize, usize)> = pending.iter().copied().collect();
    let is_open = |a: usize, b: usize| open.contains(&(a.min(b), a.max(b)));
    (0..basis.len()).any(|k| k != i && k != j && basis[k].leading().0.divides(&l) && !is_open(i, k) && !is_open(j, k))
}
