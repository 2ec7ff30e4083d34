// SPDX-License-Identifier: Apache-2.0

//! Elements of `F*A` for `A = Z^n`, as finite sums `sum c * q^v * X^a`.
//!
//! The cocycle is the reordering cost of `X^a X^b` into the canonical
//! monomial `X_1^(a_1+b_1) ... X_n^(a_n+b_n)`:
//! `tau(a, b) = prod_{i > j} lambda_ij^(a_i b_j)`.
//! Scalars are rationals times value-group monomials; summands with the same
//! lattice exponent but different `q`-parts are kept apart.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::pairing::MultiparameterMatrix;
use crate::value_group::{GroupElement, ValueGroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TwistedError {
    #[error("elements live in different algebras")]
    ContextMismatch,
    #[error("exponent vector has length {got}, expected {expected}")]
    VectorLength { expected: usize, got: usize },
    #[error("only single monomials are invertible here")]
    NotMonomial,
}

type Key = (Vec<BigInt>, GroupElement);

/// A finite sum of terms `c * q^v * X^a`; no stored coefficient is zero.
#[derive(Clone, Debug)]
pub struct TwistedElement {
    context: Arc<MultiparameterMatrix>,
    terms: BTreeMap<Key, BigRational>,
}

impl PartialEq for TwistedElement {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.context, &other.context) || self.context == other.context) && self.terms == other.terms
    }
}

impl Eq for TwistedElement {}

fn check_len(n: usize, v: &[BigInt]) -> Result<(), TwistedError> {
    if v.len() == n {
        Ok(())
    } else {
        Err(TwistedError::VectorLength {
            expected: n,
            got: v.len(),
        })
    }
}

/// `tau(a, b) = sum_{i > j} a_i b_j lambda_ij` in exponent notation.
pub fn cocycle(lambda: &MultiparameterMatrix, a: &[BigInt], b: &[BigInt]) -> Result<GroupElement, TwistedError> {
    let n = lambda.rank();
    check_len(n, a)?;
    check_len(n, b)?;
    Ok(cocycle_unchecked(lambda, a, b))
}

fn cocycle_unchecked(lambda: &MultiparameterMatrix, a: &[BigInt], b: &[BigInt]) -> GroupElement {
    let g = lambda.value_group();
    let mut acc = g.identity();
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(i) {
            if bj.is_zero() {
                continue;
            }
            let term = g.power(lambda.entry(i, j), &(ai * bj));
            acc = g.combine(&acc, &term).expect("entries belong to the group");
        }
    }
    acc
}

/// `[X^a, X^b] = X^a X^b (X^a)^-1 (X^b)^-1`, computed inside the algebra.
pub fn commutator_units(lambda: &MultiparameterMatrix, a: &[BigInt], b: &[BigInt]) -> Result<GroupElement, TwistedError> {
    let ctx = Arc::new(lambda.clone());
    let x = TwistedElement::basis(&ctx, a.to_vec())?;
    let y = TwistedElement::basis(&ctx, b.to_vec())?;
    let p = x.multiply(&y)?.multiply(&x.inverse()?)?.multiply(&y.inverse()?)?;
    let ((exp, q), c) = p.single_term().expect("a product of monomials is a monomial");
    debug_assert!(exp.iter().all(Zero::is_zero) && c.is_one());
    Ok(q.clone())
}

impl TwistedElement {
    pub fn zero(context: &Arc<MultiparameterMatrix>) -> Self {
        TwistedElement {
            context: Arc::clone(context),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(context: &Arc<MultiparameterMatrix>) -> Self {
        let n = context.rank();
        Self::basis(context, vec![BigInt::zero(); n]).expect("length matches")
    }

    /// The basis element `X^a` (written `a-bar` in the literature).
    pub fn basis(context: &Arc<MultiparameterMatrix>, a: Vec<BigInt>) -> Result<Self, TwistedError> {
        let q = context.value_group().identity();
        Self::monomial(context, BigRational::one(), q, a)
    }

    /// `c * q^v * X^a`.
    pub fn monomial(
        context: &Arc<MultiparameterMatrix>,
        c: BigRational,
        q: GroupElement,
        a: Vec<BigInt>,
    ) -> Result<Self, TwistedError> {
        check_len(context.rank(), &a)?;
        let mut e = Self::zero(context);
        if !c.is_zero() {
            e.terms.insert((a, q), c);
        }
        Ok(e)
    }

    /// The generator `X_i` (0-based).
    pub fn generator(context: &Arc<MultiparameterMatrix>, i: usize) -> Self {
        let mut a = vec![BigInt::zero(); context.rank()];
        a[i] = BigInt::one();
        Self::basis(context, a).expect("length matches")
    }

    pub fn context(&self) -> &MultiparameterMatrix {
        &self.context
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as `((a, q^v), c)`.
    pub fn terms(&self) -> impl Iterator<Item = (&Key, &BigRational)> {
        self.terms.iter()
    }

    pub fn support(&self) -> BTreeSet<Vec<BigInt>> {
        self.terms.keys().map(|(a, _)| a.clone()).collect()
    }

    fn same_context(&self, other: &Self) -> Result<(), TwistedError> {
        if Arc::ptr_eq(&self.context, &other.context) || self.context == other.context {
            Ok(())
        } else {
            Err(TwistedError::ContextMismatch)
        }
    }

    fn accumulate(terms: &mut BTreeMap<Key, BigRational>, key: Key, c: BigRational) {
        use std::collections::btree_map::Entry;
        match terms.entry(key) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, TwistedError> {
        self.same_context(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            Self::accumulate(&mut out.terms, k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        out.terms.values_mut().for_each(|c| *c = -c.clone());
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TwistedError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.context);
        }
        let mut out = self.clone();
        out.terms.values_mut().for_each(|x| *x *= c);
        out
    }

    /// Bilinear extension of `X^a X^b = tau(a, b) X^(a+b)`.
    pub fn multiply(&self, other: &Self) -> Result<Self, TwistedError> {
        self.same_context(other)?;
        let g: &ValueGroup = self.context.value_group();
        let mut out = Self::zero(&self.context);
        for ((a, u), c) in &self.terms {
            for ((b, v), d) in &other.terms {
                let tau = cocycle_unchecked(&self.context, a, b);
                let q = g.combine(&g.combine(u, v).expect("same group"), &tau).expect("same group");
                let sum = a.iter().zip(b).map(|(x, y)| x + y).collect();
                Self::accumulate(&mut out.terms, (sum, q), c * d);
            }
        }
        Ok(out)
    }

    fn single_term(&self) -> Option<(&Key, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// Inverse of a monomial: `(c q^v X^a)^-1 = c^-1 q^-v tau(a, -a)^-1 X^-a`.
    pub fn inverse(&self) -> Result<Self, TwistedError> {
        let ((a, v), c) = self.single_term().ok_or(TwistedError::NotMonomial)?;
        let g = self.context.value_group();
        let minus: Vec<BigInt> = a.iter().map(|x| -x).collect();
        let tau = cocycle_unchecked(&self.context, a, &minus);
        let q = g.inverse(&g.combine(v, &tau).expect("same group"));
        Self::monomial(&self.context, c.recip(), q, minus)
    }
}

fn graded_key(a: &[BigInt]) -> (BigInt, Vec<BigInt>) {
    (a.iter().map(|x| x.abs()).sum(), a.to_vec())
}

impl fmt::Display for TwistedElement {
    /// Terms `c * q1^v1 * ... * X1^a1 * ... * Xn^an`, in graded lexicographic
    /// order of the lattice exponent.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let g = self.context.value_group();
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|x, y| graded_key(&x.0 .0).cmp(&graded_key(&y.0 .0)).then(x.0 .1.cmp(&y.0 .1)));
        for (idx, ((a, q), c)) in terms.into_iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (name, e) in g.generators().iter().zip(q.free_part()) {
                if !e.is_zero() {
                    write!(f, " * {name}^{e}")?;
                }
            }
            if q.torsion_part() != 0 {
                write!(f, " * zeta{}^{}", g.torsion_order(), q.torsion_part())?;
            }
            for (i, e) in a.iter().enumerate() {
                if !e.is_zero() {
                    write!(f, " * X{}^{e}", i + 1)?;
                }
            }
        }
        Ok(())
    }
}
