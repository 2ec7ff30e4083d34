// SPDX-License-Identifier: Apache-2.0

//! Dimension of `F*A`: the largest rank of a sublattice `B` on which the
//! commutator pairing is trivial.
//!
//! The computation never looks at the torsion form. If `B` is isotropic for
//! every free form then `m * B` is isotropic for the whole pairing and has the
//! same rank, so the supremum only depends on the free forms. What remains is
//! the largest common isotropic subspace of a family of integer alternating
//! forms. A rational isotropic subspace of dimension `g` meets `Z^n` in a
//! rank-`g` sublattice, so lattices and rational subspaces give the same
//! answer and all the linear algebra below is done over `Q` with integer
//! representatives.
//!
//! * No form: the algebra is commutative and the answer is `n`.
//! * One form of rank `2r`: every maximal isotropic subspace has dimension
//!   `n - r`, so the answer is exact.
//! * Several forms: a certified interval. Lower bounds come from explicit
//!   witnesses found by a deterministic search; upper bounds are the minimum
//!   of the pencil bound `n - skew_rank(sum c_l M_l)`, a dimension count on
//!   the second exterior power, and (for small quotients) a Groebner-basis
//!   proof that no isotropic subspace of the next size exists even over the
//!   algebraic closure.

mod bounds;
mod brute;
mod groebner;
mod search;

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use serde::ser::{Error as _, SerializeStruct};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::lattice::{self, IntMatrix, LatticeError, Sublattice};
use crate::pairing::{pairing_of, MultiparameterMatrix, Pairing};

pub use brute::{brute_force_dimension, brute_force_pairing, BruteForceLimits};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("dimension is only known to lie in [{lower}, {upper}]")]
    Inconclusive { lower: usize, upper: usize },
    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),
}

/// Tuning knobs for [`dimension`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionOptions {
    /// Coefficient bound for enumerated candidate vectors.
    pub search_bound: u32,
    /// Number of pencil combinations tried for the upper bound.
    pub combo_samples: usize,
    /// Wall-clock cap. Exhausting it widens the interval, never invalidates it.
    pub time_budget: Duration,
    /// Seed for the pseudorandom pencil combinations.
    pub seed: u64,
    /// Deterministic cap on search nodes.
    pub node_limit: usize,
    /// Largest number of chart variables handed to the Groebner certificate.
    pub groebner_max_vars: usize,
    /// Deterministic cap on S-polynomial reductions per chart.
    pub groebner_step_limit: usize,
}

impl Default for DimensionOptions {
    fn default() -> Self {
        DimensionOptions {
            search_bound: 2,
            combo_samples: 64,
            time_budget: Duration::from_secs(10),
            seed: 0x5eed,
            node_limit: 20_000,
            groebner_max_vars: 16,
            groebner_step_limit: 4_000,
        }
    }
}

/// Certified interval for `dim(F*A)` plus a commutative sublattice of rank
/// `lower`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionResult {
    pub lower: usize,
    pub upper: usize,
    pub exact: bool,
    pub witness: Sublattice,
}

impl DimensionResult {
    /// The dimension, when the interval has collapsed.
    pub fn value(&self) -> Option<usize> {
        self.exact.then_some(self.lower)
    }
}

impl Serialize for DimensionResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let witness = crate::json::rows_to_i64(&self.witness.rows()).map_err(S::Error::custom)?;
        let mut s = serializer.serialize_struct("DimensionResult", 4)?;
        s.serialize_field("lower", &self.lower)?;
        s.serialize_field("upper", &self.upper)?;
        s.serialize_field("exact", &self.exact)?;
        s.serialize_field("witness", &witness)?;
        s.end()
    }
}

/// Free forms of the pairing; the torsion form is dropped (see module docs).
pub fn free_reduction(p: &Pairing) -> Vec<IntMatrix> {
    p.free_forms().to_vec()
}

/// Exact answer for a single alternating form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingleFormDimension {
    pub dimension: usize,
    /// Saturated maximal isotropic sublattice.
    pub witness: Sublattice,
}

/// `n - skew_rank(M)`, with a witness built from the kernel of `M` plus one
/// vector from each hyperbolic plane.
///
/// All maximal isotropic subspaces of a single alternating form have the
/// same dimension, so extending greedily through `W^perp` cannot get stuck.
pub fn dim_single_form(m: &IntMatrix) -> Result<SingleFormDimension, SolverError> {
    let r = lattice::skew_rank(m)?;
    let w = extend_single(m, lattice::kernel(m));
    debug_assert_eq!(w.rank(), m.rows() - r);
    Ok(SingleFormDimension {
        dimension: m.rows() - r,
        witness: w,
    })
}

/// Greedy extension of an isotropic `w` containing the kernel.
fn extend_single(m: &IntMatrix, mut w: Sublattice) -> Sublattice {
    let n = m.rows();
    let forms = std::slice::from_ref(m);
    loop {
        let p = perp(n, forms, &w);
        if p.rank() == w.rank() {
            break;
        }
        let v = p
            .rows()
            .into_iter()
            .find(|v| !w.spans(v))
            .expect("perp is strictly larger than W");
        w = lattice::saturate(&w.with_vector(&v));
    }
    w
}

/// Common orthogonal of `w` under every form: `{y : w^T M_l y = 0}`.
pub(crate) fn perp(n: usize, forms: &[IntMatrix], w: &Sublattice) -> Sublattice {
    let rows = w.rows();
    let mut stacked = Vec::with_capacity(rows.len() * forms.len());
    for f in forms {
        let ft = f.transpose();
        for r in &rows {
            stacked.push(ft.mul_vec(r).expect("vector matches the form"));
        }
    }
    let m = IntMatrix::from_row_vecs(n, stacked).expect("rows have length n");
    lattice::kernel(&m)
}

/// A maximal linearly independent subfamily of the nonzero forms, as integer
/// matrices spanning the same rational space.
pub(crate) fn independent_forms(n: usize, forms: &[IntMatrix]) -> Vec<IntMatrix> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let flat: Vec<Vec<BigInt>> = forms
        .iter()
        .map(|f| pairs.iter().map(|&(i, j)| f.get(i, j).clone()).collect())
        .collect();
    let span = Sublattice::from_rows(pairs.len(), flat).expect("upper triangles have equal length");
    span.rows()
        .into_iter()
        .map(|row| {
            let mut f = IntMatrix::zeros(n, n);
            for (v, &(i, j)) in row.into_iter().zip(&pairs) {
                f.set(j, i, -v.clone());
                f.set(i, j, v);
            }
            f
        })
        .collect()
}

/// Dimension of `P(Lambda)`.
pub fn dimension(lambda: &MultiparameterMatrix, opts: &DimensionOptions) -> DimensionResult {
    dimension_of_pairing(&pairing_of(lambda), opts)
}

pub fn dimension_of_pairing(p: &Pairing, opts: &DimensionOptions) -> DimensionResult {
    dimension_with_hint(p, opts, None)
}

/// Like [`dimension_of_pairing`], seeding the lower bound with a known
/// commutative sublattice (ignored if it is not commutative).
pub fn dimension_with_hint(p: &Pairing, opts: &DimensionOptions, hint: Option<&Sublattice>) -> DimensionResult {
    let deadline = Instant::now() + opts.time_budget;
    let n = p.rank();
    let forms = independent_forms(n, &free_reduction(p));
    let hint = hint.filter(|h| h.ambient_rank() == n && h.rank() > 0 && isotropic(&forms, h));

    let (lower_space, upper) = match forms.len() {
        0 => (Sublattice::full(n), n),
        1 => {
            let single = dim_single_form(&forms[0]).expect("independent forms are alternating");
            // Any isotropic start extends to a maximal one, so a hint costs nothing.
            let witness = match hint {
                Some(h) => extend_single(&forms[0], lattice::saturate(&lattice::kernel(&forms[0]).join(h))),
                None => single.witness,
            };
            (witness, single.dimension)
        }
        _ => general_dimension(n, &forms, opts, deadline, hint),
    };
    let witness = commutative_witness(p, lower_space);
    let lower = witness.rank();
    debug_assert!(1 <= lower && lower <= upper && upper <= n);
    DimensionResult {
        lower,
        upper,
        exact: lower == upper,
        witness,
    }
}

/// `rk(A) - dim(F*A)`; refuses when the dimension is not certified.
pub fn codimension(lambda: &MultiparameterMatrix, opts: &DimensionOptions) -> Result<usize, SolverError> {
    let d = dimension(lambda, opts);
    match d.value() {
        Some(v) => Ok(lambda.rank() - v),
        None => Err(SolverError::Inconclusive {
            lower: d.lower,
            upper: d.upper,
        }),
    }
}

fn isotropic(forms: &[IntMatrix], b: &Sublattice) -> bool {
    let rows = b.rows();
    forms.iter().all(|f| {
        rows.iter()
            .enumerate()
            .all(|(i, x)| rows[i + 1..].iter().all(|y| num_traits::Zero::is_zero(&f.bilinear(x, y))))
    })
}

/// Scales a free-isotropic sublattice by the torsion order when the torsion
/// form does not already vanish on it.
fn commutative_witness(p: &Pairing, w: Sublattice) -> Sublattice {
    if p.is_commutative(&w).expect("same ambient rank") {
        return w;
    }
    let scaled = w.scaled(&BigInt::from(p.value_group().torsion_order()));
    debug_assert!(p.is_commutative(&scaled).unwrap_or(false));
    scaled
}

/// Interval for two or more independent forms. Returns the best isotropic
/// sublattice found and the certified upper bound.
fn general_dimension(
    n: usize,
    forms: &[IntMatrix],
    opts: &DimensionOptions,
    deadline: Instant,
    hint: Option<&Sublattice>,
) -> (Sublattice, usize) {
    let radical = crate::pairing::common_kernel(n, forms);
    let quotient = bounds::Quotient::new(n, forms, &radical, &Sublattice::full(n));
    let combos = bounds::pencil_combinations(forms.len(), opts.combo_samples, opts.seed);
    let mut upper = radical.rank() + quotient.upper_bound(&combos).min(quotient.exterior_bound());

    let start = radical.clone();
    let best = search::search(
        &search::Problem { n, forms },
        start,
        hint.map(lattice::saturate),
        upper,
        opts,
        deadline,
    );
    // Out of time before the search moved: any vector outside the radical
    // still extends it.
    let best = if best.rank() == radical.rank() && radical.rank() < n {
        let e = (0..n)
            .map(|i| (0..n).map(|j| BigInt::from(u8::from(i == j))).collect::<Vec<_>>())
            .find(|e| !radical.spans(e))
            .expect("radical is proper");
        lattice::saturate(&radical.with_vector(&e))
    } else {
        best
    };
    let lower = best.rank();

    // Tighten the upper bound one step at a time while the quotient is small.
    while upper > lower && Instant::now() < deadline {
        let target = upper - radical.rank();
        let dim = quotient.dim();
        if target * (dim - target) > opts.groebner_max_vars {
            break;
        }
        match groebner::refute_isotropic(quotient.forms(), target, opts.groebner_step_limit, deadline) {
            groebner::Refutation::NoSubspace => upper -= 1,
            groebner::Refutation::Unknown => break,
        }
    }
    (best, upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::int_vector;
    use crate::value_group::ValueGroup;

    fn mat(rows: Vec<Vec<i64>>) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    fn pairing(forms: Vec<IntMatrix>, torsion_order: u64) -> Pairing {
        let n = forms.first().map_or(0, IntMatrix::rows);
        let g = ValueGroup::numbered(forms.len(), torsion_order).unwrap();
        Pairing::from_forms(g, forms, IntMatrix::zeros(n, n)).unwrap()
    }

    fn symplectic4() -> IntMatrix {
        mat(vec![vec![0, 1, 0, 0], vec![-1, 0, 0, 0], vec![0, 0, 0, 1], vec![0, 0, -1, 0]])
    }

    #[test]
    fn single_form_extends_the_hint() {
        let p = pairing(vec![symplectic4()], 1);
        let hint = Sublattice::from_rows(4, vec![int_vector(&[1, 0, 1, 0])]).unwrap();
        let d = dimension_with_hint(&p, &DimensionOptions::default(), Some(&hint));
        assert_eq!(d.value(), Some(2));
        assert!(d.witness.contains(&int_vector(&[1, 0, 1, 0])));
        // A hint that does not commute is ignored.
        let bad = Sublattice::from_rows(4, vec![int_vector(&[1, 0, 0, 0]), int_vector(&[0, 1, 0, 0])]).unwrap();
        assert_eq!(dimension_with_hint(&p, &DimensionOptions::default(), Some(&bad)).value(), Some(2));
    }

    #[test]
    fn free_reduction_drops_torsion() {
        let g = ValueGroup::new(Vec::<String>::new(), 5).unwrap();
        let t = mat(vec![vec![0, 1, 2], vec![4, 0, 3], vec![3, 2, 0]]);
        let p = Pairing::from_forms(g, vec![], t).unwrap();
        assert!(free_reduction(&p).is_empty());
        let d = dimension_of_pairing(&p, &DimensionOptions::default());
        assert_eq!((d.lower, d.upper, d.exact), (3, 3, true));
        assert!(p.is_commutative(&d.witness).unwrap());
        assert_eq!(d.witness, Sublattice::full(3).scaled(&BigInt::from(5)));

        let g = ValueGroup::numbered(1, 2).unwrap();
        let m1 = mat(vec![vec![0, 1], vec![-1, 0]]);
        let p = Pairing::from_forms(g, vec![m1.clone()], mat(vec![vec![0, 1], vec![1, 0]])).unwrap();
        assert_eq!(free_reduction(&p), vec![m1]);
    }

    #[test]
    fn single_form_examples() {
        assert_eq!(dim_single_form(&IntMatrix::zeros(3, 3)).unwrap().dimension, 3);
        let s = dim_single_form(&mat(vec![vec![0, 1], vec![-1, 0]])).unwrap();
        assert_eq!(s.dimension, 1);
        let s = dim_single_form(&symplectic4()).unwrap();
        assert_eq!(s.dimension, 2);
        assert!(isotropic(&[symplectic4()], &s.witness));
        assert!(s.witness.is_saturated());
        assert!(matches!(
            dim_single_form(&mat(vec![vec![0, 1], vec![1, 0]])),
            Err(SolverError::Lattice(LatticeError::NotAlternating))
        ));
    }

    #[test]
    fn two_forms_on_three_generators() {
        let p = pairing(
            vec![
                mat(vec![vec![0, 1, 0], vec![-1, 0, 0], vec![0, 0, 0]]),
                mat(vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, -1, 0]]),
            ],
            1,
        );
        let d = dimension_of_pairing(&p, &DimensionOptions::default());
        assert!(d.exact);
        // <e1, e3> kills both forms.
        assert_eq!(d.lower, 2);
        assert!(p.is_commutative(&d.witness).unwrap());
        assert!(d.witness.contains(&int_vector(&[1, 0, 0])));
    }

    #[test]
    fn elementary_forms_span_everything() {
        // All elementary forms on Z^4: no two independent vectors commute.
        let mut forms = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                let mut f = IntMatrix::zeros(4, 4);
                f.set(i, j, BigInt::from(1));
                f.set(j, i, BigInt::from(-1));
                forms.push(f);
            }
        }
        let d = dimension_of_pairing(&pairing(forms, 1), &DimensionOptions::default());
        assert_eq!((d.lower, d.upper), (1, 1));
    }

    #[test]
    fn hint_is_used_and_validated() {
        let p = pairing(vec![symplectic4(), mat(vec![vec![0, 0, 1, 0], vec![0, 0, 0, 0], vec![-1, 0, 0, 0], vec![0, 0, 0, 0]])], 1);
        let good = Sublattice::from_rows(4, vec![int_vector(&[0, 1, 0, 0]), int_vector(&[0, 0, 0, 1])]).unwrap();
        let d = dimension_with_hint(&p, &DimensionOptions::default(), Some(&good));
        assert!(d.lower >= 2);
        let bad = Sublattice::full(4);
        let d2 = dimension_with_hint(&p, &DimensionOptions::default(), Some(&bad));
        assert_eq!(d.upper, d2.upper);
        assert!(p.is_commutative(&d2.witness).unwrap());
    }

    #[test]
    fn codimension_examples() {
        let c = MultiparameterMatrix::commutative(3, ValueGroup::trivial()).unwrap();
        assert_eq!(codimension(&c, &DimensionOptions::default()).unwrap(), 0);
        let g = ValueGroup::new(vec!["q"], 1).unwrap();
        let q = g.generator(0);
        let id = g.identity();
        let s4 = MultiparameterMatrix::from_upper(4, g, |i, j| {
            if (i, j) == (0, 1) || (i, j) == (2, 3) {
                q.clone()
            } else {
                id.clone()
            }
        })
        .unwrap();
        assert_eq!(codimension(&s4, &DimensionOptions::default()).unwrap(), 2);
    }

    #[test]
    fn independent_forms_removes_dependencies() {
        let a = mat(vec![vec![0, 2], vec![-2, 0]]);
        let b = mat(vec![vec![0, 3], vec![-3, 0]]);
        assert_eq!(independent_forms(2, &[a, b, IntMatrix::zeros(2, 2)]).len(), 1);
    }

    #[test]
    fn result_serializes_to_the_documented_shape() {
        let d = DimensionResult {
            lower: 1,
            upper: 2,
            exact: false,
            witness: Sublattice::from_rows(2, vec![int_vector(&[1, 1])]).unwrap(),
        };
        assert_eq!(
            serde_json::to_string(&d).unwrap(),
            r#"{"lower":1,"upper":2,"exact":false,"witness":[[1,1]]}"#
        );
    }
}
