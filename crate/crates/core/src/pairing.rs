// SPDX-License-Identifier: Apache-2.0

//! Multiparameter matrices and the commutator pairing they induce on `Z^n`.
//!
//! For `P(Lambda)` generated by `X_1..X_n` with `X_i X_j = lambda_ij X_j X_i`,
//! the group commutator of monomials is biadditive and alternating:
//! `[X^a, X^b] = prod_{i,j} lambda_ij^(a_i b_j)`. In exponent notation this is
//! one integer alternating form per free generator of the value group plus an
//! alternating form mod `m` for the torsion part.

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::lattice::{self, IntMatrix, Sublattice};
use crate::value_group::{GroupElement, MergeMode, ValueGroup, ValueGroupError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PairingError {
    #[error("rank must be at least 1")]
    ZeroRank,
    #[error("expected {expected} entries, got {got}")]
    EntryCount { expected: usize, got: usize },
    #[error("lambda_{i}{i} must be the identity", i = .0 + 1)]
    Diagonal(usize),
    #[error("lambda_{i}{j} * lambda_{j}{i} must be the identity", i = .0 + 1, j = .1 + 1)]
    NotAntisymmetric(usize, usize),
    #[error("entry ({i}, {j}) does not belong to the value group", i = .0 + 1, j = .1 + 1)]
    ForeignEntry(usize, usize),
    #[error("vector has length {got}, expected {expected}")]
    VectorLength { expected: usize, got: usize },
    #[error("sublattice lives in Z^{got}, expected Z^{expected}")]
    AmbientMismatch { expected: usize, got: usize },
    #[error("restriction needs a sublattice of rank at least 1")]
    EmptySublattice,
    #[error(transparent)]
    ValueGroup(#[from] ValueGroupError),
}

/// `Lambda = (lambda_ij)`: an `n x n` multiplicatively antisymmetric matrix
/// with entries in a [`ValueGroup`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiparameterMatrix {
    rank: usize,
    group: ValueGroup,
    entries: Vec<GroupElement>,
}

impl MultiparameterMatrix {
    /// Validates `lambda_ii = 1` and `lambda_ij lambda_ji = 1`.
    pub fn new(rank: usize, group: ValueGroup, entries: Vec<GroupElement>) -> Result<Self, PairingError> {
        if rank == 0 {
            return Err(PairingError::ZeroRank);
        }
        if entries.len() != rank * rank {
            return Err(PairingError::EntryCount {
                expected: rank * rank,
                got: entries.len(),
            });
        }
        for i in 0..rank {
            for j in 0..rank {
                if !group.contains(&entries[i * rank + j]) {
                    return Err(PairingError::ForeignEntry(i, j));
                }
            }
        }
        for i in 0..rank {
            if !entries[i * rank + i].is_identity() {
                return Err(PairingError::Diagonal(i));
            }
            for j in i + 1..rank {
                let prod = group.combine(&entries[i * rank + j], &entries[j * rank + i])?;
                if !prod.is_identity() {
                    return Err(PairingError::NotAntisymmetric(i, j));
                }
            }
        }
        Ok(MultiparameterMatrix { rank, group, entries })
    }

    /// Builds the matrix from the entries above the diagonal; the rest is
    /// filled in by antisymmetry. `upper(i, j)` is called for `i < j` (0-based).
    pub fn from_upper<F>(rank: usize, group: ValueGroup, mut upper: F) -> Result<Self, PairingError>
    where
        F: FnMut(usize, usize) -> GroupElement,
    {
        if rank == 0 {
            return Err(PairingError::ZeroRank);
        }
        let mut entries = vec![group.identity(); rank * rank];
        for i in 0..rank {
            for j in i + 1..rank {
                let e = upper(i, j);
                if !group.contains(&e) {
                    return Err(PairingError::ForeignEntry(i, j));
                }
                entries[j * rank + i] = group.inverse(&e);
                entries[i * rank + j] = e;
            }
        }
        Self::new(rank, group, entries)
    }

    /// The commutative quantum torus (Laurent polynomial ring) of rank `n`.
    pub fn commutative(rank: usize, group: ValueGroup) -> Result<Self, PairingError> {
        let id = group.identity();
        Self::from_upper(rank, group, |_, _| id.clone())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn value_group(&self) -> &ValueGroup {
        &self.group
    }

    /// `lambda_ij`, 0-based.
    pub fn entry(&self, i: usize, j: usize) -> &GroupElement {
        &self.entries[i * self.rank + j]
    }

    pub fn is_commutative(&self) -> bool {
        self.entries.iter().all(GroupElement::is_identity)
    }
}

/// The alternating biadditive map `Z^n x Z^n -> ValueGroup`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pairing {
    rank: usize,
    group: ValueGroup,
    free_forms: Vec<IntMatrix>,
    torsion_form: IntMatrix,
}

impl Pairing {
    /// Assembles a pairing from explicit forms. Each form must be alternating
    /// `n x n`; the torsion form is reduced mod `m`.
    pub fn from_forms(
        group: ValueGroup,
        free_forms: Vec<IntMatrix>,
        torsion_form: IntMatrix,
    ) -> Result<Pairing, PairingError> {
        let rank = torsion_form.rows();
        if free_forms.len() != group.free_rank() {
            return Err(PairingError::EntryCount {
                expected: group.free_rank(),
                got: free_forms.len(),
            });
        }
        for f in free_forms.iter().chain(std::iter::once(&torsion_form)) {
            if f.rows() != rank || f.cols() != rank {
                return Err(PairingError::EntryCount {
                    expected: rank * rank,
                    got: f.rows() * f.cols(),
                });
            }
        }
        if let Some(l) = free_forms.iter().position(|f| !f.is_alternating()) {
            let f = &free_forms[l];
            let (i, j) = first_asymmetry(f);
            return Err(PairingError::NotAntisymmetric(i, j));
        }
        let m = group.torsion_order();
        let mut t = IntMatrix::zeros(rank, rank);
        for i in 0..rank {
            for j in 0..rank {
                t.set(i, j, BigInt::from(group.reduce_torsion(torsion_form.get(i, j))));
            }
        }
        for i in 0..rank {
            if !t.get(i, i).is_zero() {
                return Err(PairingError::Diagonal(i));
            }
            for j in i + 1..rank {
                if group.reduce_torsion(&(t.get(i, j) + t.get(j, i))) != 0 {
                    return Err(PairingError::NotAntisymmetric(i, j));
                }
            }
        }
        debug_assert!(m >= 1);
        Ok(Pairing {
            rank,
            group,
            free_forms,
            torsion_form: t,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn value_group(&self) -> &ValueGroup {
        &self.group
    }

    pub fn free_forms(&self) -> &[IntMatrix] {
        &self.free_forms
    }

    /// Alternating mod `m`, entries in `[0, m)`.
    pub fn torsion_form(&self) -> &IntMatrix {
        &self.torsion_form
    }

    /// `[X^a, X^b]` in exponent notation.
    pub fn commutator(&self, a: &[BigInt], b: &[BigInt]) -> Result<GroupElement, PairingError> {
        for v in [a, b] {
            if v.len() != self.rank {
                return Err(PairingError::VectorLength {
                    expected: self.rank,
                    got: v.len(),
                });
            }
        }
        Ok(self.commutator_unchecked(a, b))
    }

    pub(crate) fn commutator_unchecked(&self, a: &[BigInt], b: &[BigInt]) -> GroupElement {
        let free = self.free_forms.iter().map(|m| m.bilinear(a, b)).collect();
        let torsion = self.group.reduce_torsion(&self.torsion_form.bilinear(a, b));
        GroupElement::from_parts(free, torsion)
    }

    /// Whether `F*B` is commutative, i.e. the pairing vanishes on every pair
    /// of generators of `B`.
    pub fn is_commutative(&self, b: &Sublattice) -> Result<bool, PairingError> {
        self.check_ambient(b)?;
        let rows = b.rows();
        for (i, gi) in rows.iter().enumerate() {
            for gj in &rows[i + 1..] {
                if !self.commutator_unchecked(gi, gj).is_identity() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn check_ambient(&self, b: &Sublattice) -> Result<(), PairingError> {
        if b.ambient_rank() != self.rank {
            return Err(PairingError::AmbientMismatch {
                expected: self.rank,
                got: b.ambient_rank(),
            });
        }
        Ok(())
    }

    /// Vectors with a power that pairs trivially with everything: the
    /// saturated common kernel of the free forms.
    ///
    /// Torsion never matters here: if `a` kills every free form then `m * a`
    /// kills the whole pairing.
    pub fn radical(&self) -> Sublattice {
        common_kernel(self.rank, &self.free_forms)
    }

    /// `F*A` has center exactly `F` (equivalently, is simple).
    pub fn center_is_f(&self) -> bool {
        self.radical().rank() == 0
    }

    /// The pairing on `Z^g` obtained from the generators of `B`:
    /// forms `G M G^T`. The sublattice is used as given, saturated or not.
    pub fn restrict(&self, b: &Sublattice) -> Result<Pairing, PairingError> {
        self.check_ambient(b)?;
        if b.rank() == 0 {
            return Err(PairingError::EmptySublattice);
        }
        let g = b.generators();
        let free_forms = self
            .free_forms
            .iter()
            .map(|m| m.congruence(g).expect("shapes agree"))
            .collect();
        let torsion_form = self.torsion_form.congruence(g).expect("shapes agree");
        Pairing::from_forms(self.group.clone(), free_forms, torsion_form)
    }

    /// The multiparameter matrix with `lambda_ij = [e_i, e_j]`.
    pub fn to_matrix(&self) -> MultiparameterMatrix {
        let n = self.rank;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let free = self.free_forms.iter().map(|m| m.get(i, j).clone()).collect();
                let t = self.torsion_form.get(i, j);
                let t = self.group.reduce_torsion(t) as i64;
                entries.push(self.group.element(free, t).expect("one exponent per generator"));
            }
        }
        MultiparameterMatrix::new(n, self.group.clone(), entries).expect("pairings are alternating")
    }
}

fn first_asymmetry(f: &IntMatrix) -> (usize, usize) {
    let n = f.rows();
    for i in 0..n {
        if !f.get(i, i).is_zero() {
            return (i, i);
        }
        for j in i + 1..n {
            if !(f.get(i, j) + f.get(j, i)).is_zero() {
                return (i, j);
            }
        }
    }
    (0, 0)
}

/// Saturated `{a : M_l a = 0 for all l}`.
pub(crate) fn common_kernel(n: usize, forms: &[IntMatrix]) -> Sublattice {
    let mut stacked = IntMatrix::zeros(0, n);
    for f in forms {
        stacked = stacked.vstack(f).expect("square forms of the same size");
    }
    lattice::kernel(&stacked)
}

/// The commutator pairing of `Lambda`.
pub fn pairing_of(lambda: &MultiparameterMatrix) -> Pairing {
    let n = lambda.rank();
    let g = lambda.value_group();
    let k = g.free_rank();
    let mut free_forms = vec![IntMatrix::zeros(n, n); k];
    let mut torsion = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let e = lambda.entry(i, j);
            for (l, form) in free_forms.iter_mut().enumerate() {
                form.set(i, j, e.free_part()[l].clone());
            }
            torsion.set(i, j, BigInt::from(e.torsion_part()));
        }
    }
    Pairing::from_forms(g.clone(), free_forms, torsion).expect("multiparameter matrices are antisymmetric")
}

/// `Lambda'` with `lambda'_ij = lambda_ji`.
pub fn transpose(lambda: &MultiparameterMatrix) -> MultiparameterMatrix {
    let n = lambda.rank();
    let entries = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| lambda.entry(j, i).clone())
        .collect();
    MultiparameterMatrix::new(n, lambda.value_group().clone(), entries).expect("transpose stays antisymmetric")
}

/// Multiparameter matrix of `P(Lambda1) (x)_F P(Lambda2)`: block diagonal,
/// with the two factors commuting elementwise.
pub fn tensor(
    lambda1: &MultiparameterMatrix,
    lambda2: &MultiparameterMatrix,
    mode: MergeMode,
) -> Result<MultiparameterMatrix, PairingError> {
    let merged = lambda1.value_group().merge(lambda2.value_group(), mode)?;
    let (n1, n2) = (lambda1.rank(), lambda2.rank());
    let n = n1 + n2;
    let g = merged.group;
    let mut entries = vec![g.identity(); n * n];
    for i in 0..n1 {
        for j in 0..n1 {
            entries[i * n + j] = merged.first.apply(&g, lambda1.entry(i, j));
        }
    }
    for i in 0..n2 {
        for j in 0..n2 {
            entries[(n1 + i) * n + n1 + j] = merged.second.apply(&g, lambda2.entry(i, j));
        }
    }
    MultiparameterMatrix::new(n, g, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::int_vector;

    fn bq() -> MultiparameterMatrix {
        let g = ValueGroup::new(vec!["q"], 1).unwrap();
        let q = g.generator(0);
        MultiparameterMatrix::from_upper(2, g, |_, _| q.clone()).unwrap()
    }

    fn single_form(rows: Vec<Vec<i64>>) -> Pairing {
        let m = IntMatrix::from_rows(rows).unwrap();
        let n = m.rows();
        Pairing::from_forms(ValueGroup::numbered(1, 1).unwrap(), vec![m], IntMatrix::zeros(n, n)).unwrap()
    }

    fn independent3() -> MultiparameterMatrix {
        let g = ValueGroup::numbered(3, 1).unwrap();
        let gg = g.clone();
        MultiparameterMatrix::from_upper(3, g, |i, j| {
            let idx = match (i, j) {
                (0, 1) => 0,
                (0, 2) => 1,
                _ => 2,
            };
            gg.generator(idx)
        })
        .unwrap()
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let g = ValueGroup::new(vec!["q"], 1).unwrap();
        let q = g.generator(0);
        let id = g.identity();
        let diag = vec![q.clone(), id.clone(), id.clone(), id.clone()];
        assert_eq!(MultiparameterMatrix::new(2, g.clone(), diag), Err(PairingError::Diagonal(0)));
        let sym = vec![id.clone(), q.clone(), q.clone(), id.clone()];
        assert_eq!(MultiparameterMatrix::new(2, g.clone(), sym), Err(PairingError::NotAntisymmetric(0, 1)));
        assert_eq!(MultiparameterMatrix::new(0, g, vec![]), Err(PairingError::ZeroRank));
    }

    #[test]
    fn pairing_of_bq_is_symplectic() {
        let p = pairing_of(&bq());
        assert_eq!(p.free_forms(), &[IntMatrix::from_rows(vec![vec![0, 1], vec![-1, 0]]).unwrap()]);
    }

    #[test]
    fn pairing_of_commutative_is_zero() {
        let lambda = MultiparameterMatrix::commutative(3, ValueGroup::numbered(2, 1).unwrap()).unwrap();
        let p = pairing_of(&lambda);
        assert!(p.free_forms().iter().all(IntMatrix::is_zero));
        assert!(p.torsion_form().is_zero());
    }

    #[test]
    fn pairing_of_independent_reads_off_elementary_forms() {
        let p = pairing_of(&independent3());
        for (l, (i, j)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
            let mut e = IntMatrix::zeros(3, 3);
            e.set(i, j, BigInt::from(1));
            e.set(j, i, BigInt::from(-1));
            assert_eq!(p.free_forms()[l], e);
        }
    }

    #[test]
    fn commutator_examples() {
        let lambda = bq();
        let p = pairing_of(&lambda);
        let a = int_vector(&[3, -2]);
        assert!(p.commutator(&a, &a).unwrap().is_identity());
        assert_eq!(p.commutator(&int_vector(&[1, 0]), &int_vector(&[0, 1])).unwrap(), *lambda.entry(0, 1));
        let doubled = p.commutator(&int_vector(&[2, 0]), &int_vector(&[0, 1])).unwrap();
        assert_eq!(doubled.free_part(), &[BigInt::from(2)]);
        assert!(p.commutator(&int_vector(&[1]), &a).is_err());
    }

    #[test]
    fn torsion_commutator() {
        let g = ValueGroup::new(Vec::<String>::new(), 3).unwrap();
        let w = g.element_i64(&[], 1).unwrap();
        let lambda = MultiparameterMatrix::from_upper(2, g, |_, _| w.clone()).unwrap();
        let p = pairing_of(&lambda);
        assert_eq!(p.commutator(&int_vector(&[1, 0]), &int_vector(&[0, 2])).unwrap().torsion_part(), 2);
        assert!(p.commutator(&int_vector(&[3, 0]), &int_vector(&[0, 1])).unwrap().is_identity());
        assert_eq!(p.commutator(&int_vector(&[0, 1]), &int_vector(&[1, 0])).unwrap().torsion_part(), 2);
    }

    #[test]
    fn is_commutative_examples() {
        let p = pairing_of(&bq());
        let line = Sublattice::from_rows(2, vec![int_vector(&[5, 7])]).unwrap();
        assert!(p.is_commutative(&line).unwrap());
        assert!(!p.is_commutative(&Sublattice::full(2)).unwrap());

        let lambda = independent3();
        let t = tensor(&lambda, &transpose(&lambda), MergeMode::Shared).unwrap();
        let diag = Sublattice::from_rows(
            6,
            (0..3)
                .map(|i| {
                    let mut v = vec![0i64; 6];
                    v[i] = 1;
                    v[3 + i] = 1;
                    int_vector(&v)
                })
                .collect(),
        )
        .unwrap();
        assert!(pairing_of(&t).is_commutative(&diag).unwrap());
    }

    #[test]
    fn radical_examples() {
        let zero = single_form(vec![vec![0, 0], vec![0, 0]]);
        assert_eq!(zero.radical(), Sublattice::full(2));
        let p = single_form(vec![vec![0, 1, 0], vec![-1, 0, 0], vec![0, 0, 0]]);
        assert_eq!(p.radical().rows(), vec![int_vector(&[0, 0, 1])]);
        assert_eq!(pairing_of(&bq()).radical().rank(), 0);
    }

    #[test]
    fn center_examples() {
        let lambda = MultiparameterMatrix::commutative(2, ValueGroup::trivial()).unwrap();
        assert!(!pairing_of(&lambda).center_is_f());
        assert!(pairing_of(&bq()).center_is_f());
        let p = single_form(vec![
            vec![0, 1, 0, 0],
            vec![-1, 0, 0, 0],
            vec![0, 0, 0, 1],
            vec![0, 0, -1, 0],
        ]);
        assert!(p.center_is_f());
    }

    #[test]
    fn tensor_examples() {
        let c2 = MultiparameterMatrix::commutative(2, ValueGroup::trivial()).unwrap();
        let c3 = MultiparameterMatrix::commutative(3, ValueGroup::trivial()).unwrap();
        let t = tensor(&c2, &c3, MergeMode::Shared).unwrap();
        assert_eq!(t.rank(), 5);
        assert!(t.is_commutative());

        let t = tensor(&bq(), &bq(), MergeMode::Disjoint).unwrap();
        assert_eq!(t.value_group().free_rank(), 2);
        let p = pairing_of(&t);
        for i in 0..2 {
            for j in 2..4 {
                let mut a = vec![BigInt::zero(); 4];
                let mut b = vec![BigInt::zero(); 4];
                a[i] = BigInt::from(1);
                b[j] = BigInt::from(1);
                assert!(p.commutator(&a, &b).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn tensor_rejects_incompatible_torsion() {
        let g4 = ValueGroup::new(Vec::<String>::new(), 4).unwrap();
        let g6 = ValueGroup::new(Vec::<String>::new(), 6).unwrap();
        let a = MultiparameterMatrix::commutative(1, g4).unwrap();
        let b = MultiparameterMatrix::commutative(1, g6).unwrap();
        assert!(matches!(
            tensor(&a, &b, MergeMode::Shared),
            Err(PairingError::ValueGroup(ValueGroupError::IncompatibleTorsion(4, 6)))
        ));
    }

    #[test]
    fn transpose_examples() {
        let c = MultiparameterMatrix::commutative(3, ValueGroup::trivial()).unwrap();
        assert_eq!(transpose(&c), c);
        let lambda = independent3();
        assert_eq!(transpose(&transpose(&lambda)), lambda);
        let t = transpose(&bq());
        assert_eq!(t.entry(0, 1).free_part(), &[BigInt::from(-1)]);
    }

    #[test]
    fn restrict_examples() {
        let p = pairing_of(&bq());
        assert_eq!(p.restrict(&Sublattice::full(2)).unwrap(), p);
        let b = Sublattice::from_rows(2, vec![int_vector(&[2, 0]), int_vector(&[0, 1])]).unwrap();
        let r = p.restrict(&b).unwrap();
        assert_eq!(r.free_forms()[0], IntMatrix::from_rows(vec![vec![0, 2], vec![-2, 0]]).unwrap());
        let witness = Sublattice::from_rows(2, vec![int_vector(&[1, 1])]).unwrap();
        let r = p.restrict(&witness).unwrap();
        assert!(r.free_forms().iter().all(IntMatrix::is_zero));
        assert_eq!(p.restrict(&Sublattice::zero(2)), Err(PairingError::EmptySublattice));
    }

    #[test]
    fn to_matrix_round_trip() {
        let lambda = independent3();
        assert_eq!(pairing_of(&lambda).to_matrix(), lambda);
    }
}
