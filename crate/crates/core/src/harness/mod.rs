// SPDX-License-Identifier: Apache-2.0

//! Instance generators and mechanical checks of the tensor-product dimension
//! statements.
//!
//! Notation: `r_i` is the rank of a factor, `d_i` its dimension, `d` the
//! dimension of the tensor product. The statements checked are
//!
//! * superadditivity `d >= d1 + d2`;
//! * `d <= min(d1 + r2, d2 + r1) - 1` when `d_i < r_i` for both factors, and the
//!   weak form without the `- 1` in general;
//! * the strict form `d < min(...) - 1` when both factors have dimension and
//!   codimension at least 2 and center `F`;
//! * additivity `d = d1 + d2` when some factor has codimension at most 1, when
//!   `codim_1 >= codim_2 = 2` with the strict hypotheses, and for chains of
//!   rank-2 factors.
//!
//! Dimensions can be intervals, so conclusions are only claimed when the
//! interval endpoints decide them.

mod campaign;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::instance::InstanceFile;
use crate::lattice::{IntMatrix, Sublattice};
use crate::pairing::{pairing_of, tensor, MultiparameterMatrix, PairingError};
use crate::solver::{dimension, dimension_with_hint, DimensionOptions, DimensionResult};
use crate::value_group::{MergeMode, ValueGroup};

pub use campaign::{run_campaign, CampaignConfig, OracleTally, Report, Tally};

// ---------------------------------------------------------------------------
// generators

/// `lambda_ij = q_(i,j)` for `i < j`, all multiplicatively independent.
pub fn gen_independent(n: usize) -> MultiparameterMatrix {
    let names: Vec<String> = (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| format!("q_({i},{j})")))
        .collect();
    let g = ValueGroup::new(names, 1).expect("names are distinct");
    let gg = g.clone();
    let mut next = 0;
    MultiparameterMatrix::from_upper(n, g, |_, _| {
        next += 1;
        gg.generator(next - 1)
    })
    .expect("rank is positive")
}

/// `(Lambda, Lambda^T)` with `Lambda = gen_independent(n)`.
pub fn gen_transpose_pair(n: usize) -> (MultiparameterMatrix, MultiparameterMatrix) {
    let l = gen_independent(n);
    let t = crate::pairing::transpose(&l);
    (l, t)
}

/// Seeded random exponents in `[-bound, bound]` above the diagonal; torsion
/// residues uniform in `[0, m)`.
pub fn gen_random(n: usize, k: usize, m: u64, bound: u32, seed: u64) -> MultiparameterMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gen_random_with(&mut rng, n, k, m, bound)
}

pub(crate) fn gen_random_with<R: Rng>(rng: &mut R, n: usize, k: usize, m: u64, bound: u32) -> MultiparameterMatrix {
    let g = ValueGroup::numbered(k, m).expect("torsion order is positive");
    let gg = g.clone();
    let b = i64::from(bound);
    MultiparameterMatrix::from_upper(n, g, |_, _| {
        let free: Vec<i64> = (0..k).map(|_| rng.gen_range(-b..=b)).collect();
        let t = rng.gen_range(0..m) as i64;
        gg.element_i64(&free, t).expect("lengths match")
    })
    .expect("rank is positive")
}

/// The Laurent polynomial ring in `n` variables.
pub fn gen_commutative(n: usize) -> MultiparameterMatrix {
    MultiparameterMatrix::commutative(n, ValueGroup::trivial()).expect("rank is positive")
}

/// `r` hyperbolic planes `X_{2i-1} X_{2i} = q X_{2i} X_{2i-1}` over a single
/// parameter called `name`; rank `2r`, dimension `r`, center `F`.
pub fn gen_symplectic(r: usize, name: &str) -> MultiparameterMatrix {
    let g = ValueGroup::new(vec![name.to_string()], 1).expect("one name");
    let (q, id) = (g.generator(0), g.identity());
    MultiparameterMatrix::from_upper(2 * r, g, |i, j| if i % 2 == 0 && j == i + 1 { q.clone() } else { id.clone() })
        .expect("rank is positive")
}

/// A random sublattice of finite index: rows of `D U` with `U` a random
/// unimodular matrix and `D` diagonal with entries in `[1, max_diag]`.
pub fn gen_finite_index(n: usize, max_diag: u32, seed: u64) -> Sublattice {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = IntMatrix::identity(n);
    // Random elementary row operations keep U unimodular.
    for _ in 0..3 * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j {
            continue;
        }
        let c = BigInt::from(rng.gen_range(-2i64..=2));
        for col in 0..n {
            let v = u.get(i, col) + &c * u.get(j, col);
            u.set(i, col, v);
        }
    }
    let rows = (0..n)
        .map(|i| {
            let d = BigInt::from(rng.gen_range(1..=max_diag.max(1)));
            u.row(i).iter().map(|x| x * &d).collect()
        })
        .collect();
    Sublattice::from_rows(n, rows).expect("rows have length n")
}

// ---------------------------------------------------------------------------
// verdicts

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Statement {
    Superadditivity,
    UpperBound,
    WeakUpperBound,
    StrictUpperBound,
    AdditivityCodimLe1,
    AdditivityCodim2,
    WeylAnalogue,
}

impl Statement {
    pub const ALL: [Statement; 7] = [
        Statement::Superadditivity,
        Statement::UpperBound,
        Statement::WeakUpperBound,
        Statement::StrictUpperBound,
        Statement::AdditivityCodimLe1,
        Statement::AdditivityCodim2,
        Statement::WeylAnalogue,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Statement::Superadditivity => "superadditivity",
            Statement::UpperBound => "upper_bound",
            Statement::WeakUpperBound => "weak_upper_bound",
            Statement::StrictUpperBound => "strict_upper_bound",
            Statement::AdditivityCodimLe1 => "additivity_codim_le1",
            Statement::AdditivityCodim2 => "additivity_codim2",
            Statement::WeylAnalogue => "weyl_analogue",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Holds,
    Violated,
    Inconclusive,
}

/// Everything a verdict was decided from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerdictData {
    pub ranks: Vec<usize>,
    pub factor_dims: Vec<DimensionResult>,
    pub center_is_f: Vec<bool>,
    pub tensor: DimensionResult,
    /// The right-hand side compared against, as an interval when factor
    /// dimensions are intervals.
    pub bound: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub statement: Statement,
    pub hypotheses_met: bool,
    pub conclusion: Outcome,
    pub data: VerdictData,
    /// The factors as instance files; filled in for violations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<Vec<InstanceFile>>,
}

/// One factor of a tensor product with its invariants.
#[derive(Clone, Debug)]
pub struct Factor {
    pub lambda: MultiparameterMatrix,
    pub dim: DimensionResult,
    pub center_is_f: bool,
}

impl Factor {
    pub fn new(lambda: MultiparameterMatrix, opts: &DimensionOptions) -> Factor {
        let dim = dimension(&lambda, opts);
        let center_is_f = pairing_of(&lambda).center_is_f();
        Factor { lambda, dim, center_is_f }
    }

    pub fn rank(&self) -> usize {
        self.lambda.rank()
    }

    fn exact_codim(&self) -> Option<usize> {
        self.dim.value().map(|d| self.rank() - d)
    }
}

/// A family of factors and the dimension of their tensor product.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub factors: Vec<Factor>,
    pub product: MultiparameterMatrix,
    pub tensor: DimensionResult,
}

/// Block-diagonal sum of the factor witnesses: commutative in the product.
fn concatenated_witness(factors: &[Factor]) -> Sublattice {
    let n: usize = factors.iter().map(Factor::rank).sum();
    let mut rows = Vec::new();
    let mut offset = 0;
    for f in factors {
        for r in f.dim.witness.rows() {
            let mut v = vec![BigInt::from(0); n];
            v[offset..offset + f.rank()].clone_from_slice(&r);
            rows.push(v);
        }
        offset += f.rank();
    }
    Sublattice::from_rows(n, rows).expect("rows have length n")
}

impl Analysis {
    /// Tensors the factors left to right, merging value groups with `mode`.
    pub fn new(lambdas: &[MultiparameterMatrix], mode: MergeMode, opts: &DimensionOptions) -> Result<Analysis, PairingError> {
        assert!(!lambdas.is_empty(), "at least one factor");
        let factors: Vec<Factor> = lambdas.iter().map(|l| Factor::new(l.clone(), opts)).collect();
        let mut product = lambdas[0].clone();
        for l in &lambdas[1..] {
            product = tensor(&product, l, mode)?;
        }
        let hint = concatenated_witness(&factors);
        let tensor = dimension_with_hint(&pairing_of(&product), opts, Some(&hint));
        Ok(Analysis {
            factors,
            product,
            tensor,
        })
    }

    fn data(&self, bound: Option<(usize, usize)>) -> VerdictData {
        VerdictData {
            ranks: self.factors.iter().map(Factor::rank).collect(),
            factor_dims: self.factors.iter().map(|f| f.dim.clone()).collect(),
            center_is_f: self.factors.iter().map(|f| f.center_is_f).collect(),
            tensor: self.tensor.clone(),
            bound,
        }
    }

    fn verdict(&self, statement: Statement, hypotheses_met: bool, conclusion: Outcome, bound: Option<(usize, usize)>) -> Verdict {
        let instance = (conclusion == Outcome::Violated).then(|| {
            self.factors
                .iter()
                .filter_map(|f| InstanceFile::from_matrix(&f.lambda).ok())
                .collect()
        });
        Verdict {
            statement,
            hypotheses_met,
            conclusion,
            data: self.data(bound),
            instance,
        }
    }

    fn pair(&self) -> (&Factor, &Factor) {
        assert_eq!(self.factors.len(), 2, "pair statements need two factors");
        (&self.factors[0], &self.factors[1])
    }

    /// `min(d1 + r2, d2 + r1)` evaluated at the lower and upper ends of the
    /// factor intervals.
    fn rhs(&self) -> (usize, usize) {
        let (a, b) = self.pair();
        let lo = (a.dim.lower + b.rank()).min(b.dim.lower + a.rank());
        let hi = (a.dim.upper + b.rank()).min(b.dim.upper + a.rank());
        (lo, hi)
    }

    /// `d >= d1 + d2`.
    pub fn superadditivity(&self) -> Verdict {
        let lo: usize = self.factors.iter().map(|f| f.dim.lower).sum();
        let hi: usize = self.factors.iter().map(|f| f.dim.upper).sum();
        let conclusion = at_least(&self.tensor, lo, hi);
        self.verdict(Statement::Superadditivity, true, conclusion, Some((lo, hi)))
    }

    /// `d <= min(d1 + r2, d2 + r1) - 1` under `d_i < r_i`; otherwise the weak
    /// bound without the `- 1`.
    pub fn upper_bound(&self) -> Verdict {
        let (a, b) = self.pair();
        let (lo, hi) = self.rhs();
        let met = match (a.exact_codim(), b.exact_codim()) {
            (Some(c1), Some(c2)) => c1 > 0 && c2 > 0,
            _ => false,
        };
        if met {
            let bound = (lo - 1, hi - 1);
            self.verdict(Statement::UpperBound, true, at_most(&self.tensor, bound.0, bound.1), Some(bound))
        } else {
            self.verdict(Statement::WeakUpperBound, false, at_most(&self.tensor, lo, hi), Some((lo, hi)))
        }
    }

    /// `d < min(d1 + r2, d2 + r1) - 1` when `d_i >= 2`, `codim_i >= 2` and
    /// both centers are `F`. Vacuously true when the hypotheses fail.
    pub fn strict(&self) -> Verdict {
        let (a, b) = self.pair();
        let (lo, hi) = self.rhs();
        let bound = Some((lo.saturating_sub(1), hi.saturating_sub(1)));
        if a.dim.value().is_none() || b.dim.value().is_none() {
            return self.verdict(Statement::StrictUpperBound, false, Outcome::Inconclusive, bound);
        }
        let met = [a, b]
            .iter()
            .all(|f| f.dim.lower >= 2 && f.exact_codim().is_some_and(|c| c >= 2) && f.center_is_f);
        if !met {
            return self.verdict(Statement::StrictUpperBound, false, Outcome::Holds, bound);
        }
        let conclusion = if self.tensor.upper + 1 < lo {
            Outcome::Holds
        } else if self.tensor.lower + 1 >= hi {
            Outcome::Violated
        } else {
            Outcome::Inconclusive
        };
        self.verdict(Statement::StrictUpperBound, true, conclusion, bound)
    }

    /// `d = d1 + d2` under whichever additivity criterion applies.
    pub fn additivity(&self) -> Verdict {
        let (a, b) = self.pair();
        let sum = (a.dim.lower + b.dim.lower, a.dim.upper + b.dim.upper);
        let (c1, c2) = match (a.exact_codim(), b.exact_codim()) {
            (Some(c1), Some(c2)) => (c1, c2),
            _ => return self.verdict(Statement::AdditivityCodimLe1, false, Outcome::Inconclusive, Some(sum)),
        };
        let statement = if c1 <= 1 || c2 <= 1 {
            Some(Statement::AdditivityCodimLe1)
        } else if a.dim.lower >= 2 && b.dim.lower >= 2 && a.center_is_f && b.center_is_f && c1.min(c2) == 2 {
            Some(Statement::AdditivityCodim2)
        } else {
            None
        };
        match statement {
            Some(s) => self.verdict(s, true, equals(&self.tensor, sum.0, sum.1), Some(sum)),
            None => self.verdict(Statement::AdditivityCodimLe1, false, Outcome::Holds, Some(sum)),
        }
    }

    /// `d = sum d_j` for a chain of rank-2 factors.
    pub fn weyl_chain(&self) -> Verdict {
        let met = self.factors.iter().all(|f| f.rank() == 2);
        let lo: usize = self.factors.iter().map(|f| f.dim.lower).sum();
        let hi: usize = self.factors.iter().map(|f| f.dim.upper).sum();
        let conclusion = if met { equals(&self.tensor, lo, hi) } else { Outcome::Holds };
        self.verdict(Statement::WeylAnalogue, met, conclusion, Some((lo, hi)))
    }
}

/// Decides `d >= x` for `x` somewhere in `[lo, hi]`.
fn at_least(d: &DimensionResult, lo: usize, hi: usize) -> Outcome {
    if d.lower >= hi {
        Outcome::Holds
    } else if d.upper < lo {
        Outcome::Violated
    } else {
        Outcome::Inconclusive
    }
}

/// Decides `d <= x` for `x` somewhere in `[lo, hi]`.
fn at_most(d: &DimensionResult, lo: usize, hi: usize) -> Outcome {
    if d.upper <= lo {
        Outcome::Holds
    } else if d.lower > hi {
        Outcome::Violated
    } else {
        Outcome::Inconclusive
    }
}

fn equals(d: &DimensionResult, lo: usize, hi: usize) -> Outcome {
    match (at_least(d, lo, hi), at_most(d, lo, hi)) {
        (Outcome::Holds, Outcome::Holds) => Outcome::Holds,
        (Outcome::Violated, _) | (_, Outcome::Violated) => Outcome::Violated,
        _ => Outcome::Inconclusive,
    }
}

pub fn check_superadditivity(l1: &MultiparameterMatrix, l2: &MultiparameterMatrix, mode: MergeMode, opts: &DimensionOptions) -> Result<Verdict, PairingError> {
    Ok(Analysis::new(&[l1.clone(), l2.clone()], mode, opts)?.superadditivity())
}

pub fn check_upper_bound(l1: &MultiparameterMatrix, l2: &MultiparameterMatrix, mode: MergeMode, opts: &DimensionOptions) -> Result<Verdict, PairingError> {
    Ok(Analysis::new(&[l1.clone(), l2.clone()], mode, opts)?.upper_bound())
}

pub fn check_strict(l1: &MultiparameterMatrix, l2: &MultiparameterMatrix, mode: MergeMode, opts: &DimensionOptions) -> Result<Verdict, PairingError> {
    Ok(Analysis::new(&[l1.clone(), l2.clone()], mode, opts)?.strict())
}

pub fn check_additivity(l1: &MultiparameterMatrix, l2: &MultiparameterMatrix, mode: MergeMode, opts: &DimensionOptions) -> Result<Verdict, PairingError> {
    Ok(Analysis::new(&[l1.clone(), l2.clone()], mode, opts)?.additivity())
}

pub fn check_weyl_chain(factors: &[MultiparameterMatrix], mode: MergeMode, opts: &DimensionOptions) -> Result<Verdict, PairingError> {
    Ok(Analysis::new(factors, mode, opts)?.weyl_chain())
}
