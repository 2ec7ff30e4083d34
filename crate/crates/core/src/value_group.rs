// SPDX-License-Identifier: Apache-2.0

//! The subgroup of `F*` generated by the multiparameters, written additively
//! as `Z^k (+) Z/m`.
//!
//! A scalar `q1^v1 ... qk^vk * zeta^t` is stored as its exponent vector
//! `(v1, .., vk)` together with the residue `t` of the root of unity `zeta`
//! of order `m`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValueGroupError {
    #[error("generator names must be nonempty")]
    EmptyName,
    #[error("generator name `{0}` appears more than once")]
    DuplicateName(String),
    #[error("torsion order must be at least 1")]
    ZeroTorsion,
    #[error("element has {got} free exponents but the group has {expected} generators")]
    FreeLength { expected: usize, got: usize },
    #[error("torsion residue {residue} is out of range for order {order}")]
    TorsionRange { residue: u64, order: u64 },
    #[error("elements belong to different value groups")]
    Mismatch,
    #[error("cannot share torsion of orders {0} and {1}")]
    IncompatibleTorsion(u64, u64),
}

/// How two value groups are combined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MergeMode {
    /// Generators with equal names are the same scalar.
    #[default]
    Shared,
    /// Generators of the second group are kept apart from the first.
    Disjoint,
}

impl std::str::FromStr for MergeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "shared" => Ok(MergeMode::Shared),
            "disjoint" => Ok(MergeMode::Disjoint),
            other => Err(format!("unknown merge mode `{other}` (expected shared or disjoint)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ValueGroup {
    free: Vec<String>,
    torsion_order: u64,
}

impl ValueGroup {
    pub fn new<S: Into<String>>(free: Vec<S>, torsion_order: u64) -> Result<Self, ValueGroupError> {
        let free: Vec<String> = free.into_iter().map(Into::into).collect();
        if torsion_order == 0 {
            return Err(ValueGroupError::ZeroTorsion);
        }
        let mut seen = BTreeSet::new();
        for name in &free {
            if name.is_empty() {
                return Err(ValueGroupError::EmptyName);
            }
            if !seen.insert(name.as_str()) {
                return Err(ValueGroupError::DuplicateName(name.clone()));
            }
        }
        Ok(ValueGroup { free, torsion_order })
    }

    /// The trivial group: no generators, no torsion.
    pub fn trivial() -> Self {
        ValueGroup {
            free: Vec::new(),
            torsion_order: 1,
        }
    }

    /// `k` free generators named `q1..qk` and torsion of order `m`.
    pub fn numbered(k: usize, torsion_order: u64) -> Result<Self, ValueGroupError> {
        Self::new((1..=k).map(|i| format!("q{i}")).collect(), torsion_order)
    }

    pub fn free_rank(&self) -> usize {
        self.free.len()
    }

    pub fn generators(&self) -> &[String] {
        &self.free
    }

    pub fn torsion_order(&self) -> u64 {
        self.torsion_order
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.free.iter().position(|n| n == name)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            free: vec![BigInt::zero(); self.free.len()],
            torsion: 0,
        }
    }

    /// Validated element; the torsion residue is reduced mod `m`.
    pub fn element(&self, free: Vec<BigInt>, torsion: i64) -> Result<GroupElement, ValueGroupError> {
        if free.len() != self.free.len() {
            return Err(ValueGroupError::FreeLength {
                expected: self.free.len(),
                got: free.len(),
            });
        }
        Ok(GroupElement {
            free,
            torsion: reduce_mod(&BigInt::from(torsion), self.torsion_order),
        })
    }

    pub fn element_i64(&self, free: &[i64], torsion: i64) -> Result<GroupElement, ValueGroupError> {
        self.element(free.iter().map(|&x| BigInt::from(x)).collect(), torsion)
    }

    /// The `i`-th free generator.
    pub fn generator(&self, i: usize) -> GroupElement {
        let mut e = self.identity();
        e.free[i] = BigInt::from(1);
        e
    }

    pub fn contains(&self, e: &GroupElement) -> bool {
        e.free.len() == self.free.len() && e.torsion < self.torsion_order
    }

    fn check(&self, e: &GroupElement) -> Result<(), ValueGroupError> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(ValueGroupError::Mismatch)
        }
    }

    /// The group law (product of scalars).
    pub fn combine(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, ValueGroupError> {
        self.check(a)?;
        self.check(b)?;
        Ok(GroupElement {
            free: a.free.iter().zip(&b.free).map(|(x, y)| x + y).collect(),
            torsion: (a.torsion + b.torsion) % self.torsion_order,
        })
    }

    pub fn inverse(&self, a: &GroupElement) -> GroupElement {
        GroupElement {
            free: a.free.iter().map(|x| -x).collect(),
            torsion: (self.torsion_order - a.torsion % self.torsion_order) % self.torsion_order,
        }
    }

    /// `k`-fold power (`k * a` additively).
    pub fn power(&self, a: &GroupElement, k: &BigInt) -> GroupElement {
        GroupElement {
            free: a.free.iter().map(|x| x * k).collect(),
            torsion: reduce_mod(&(BigInt::from(a.torsion) * k), self.torsion_order),
        }
    }

    pub fn is_identity(&self, e: &GroupElement) -> bool {
        e.is_identity()
    }

    /// Reduces an arbitrary integer into `[0, m)`.
    pub fn reduce_torsion(&self, t: &BigInt) -> u64 {
        reduce_mod(t, self.torsion_order)
    }

    /// Places two value groups side by side.
    pub fn merge(&self, other: &ValueGroup, mode: MergeMode) -> Result<Merged, ValueGroupError> {
        let (m1, m2) = (self.torsion_order, other.torsion_order);
        let torsion_order = match mode {
            MergeMode::Shared => {
                if m1 > 1 && m2 > 1 && m1 != m2 {
                    return Err(ValueGroupError::IncompatibleTorsion(m1, m2));
                }
                m1.max(m2)
            }
            MergeMode::Disjoint => m1.lcm(&m2),
        };
        let mut names = self.free.clone();
        let first: Vec<usize> = (0..names.len()).collect();
        let mut second = Vec::with_capacity(other.free.len());
        match mode {
            MergeMode::Shared => {
                let mut lookup: HashMap<String, usize> =
                    names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
                for name in &other.free {
                    let idx = *lookup.entry(name.clone()).or_insert_with(|| {
                        names.push(name.clone());
                        names.len() - 1
                    });
                    second.push(idx);
                }
            }
            MergeMode::Disjoint => {
                let mut taken: BTreeSet<String> = names.iter().cloned().collect();
                taken.extend(other.free.iter().cloned());
                for name in &other.free {
                    let fresh = if self.free.contains(name) {
                        let mut candidate = format!("{name}'");
                        while taken.contains(&candidate) {
                            candidate.push('\'');
                        }
                        candidate
                    } else {
                        name.clone()
                    };
                    taken.insert(fresh.clone());
                    names.push(fresh);
                    second.push(names.len() - 1);
                }
            }
        }
        let group = ValueGroup {
            free: names,
            torsion_order,
        };
        Ok(Merged {
            first: Embedding {
                map: first,
                torsion_scale: torsion_order / m1,
            },
            second: Embedding {
                map: second,
                torsion_scale: torsion_order / m2,
            },
            group,
        })
    }
}

impl fmt::Display for ValueGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.free.join(", "))?;
        if self.torsion_order > 1 {
            write!(f, " x Z/{}", self.torsion_order)?;
        }
        Ok(())
    }
}

fn reduce_mod(t: &BigInt, m: u64) -> u64 {
    t.mod_floor(&BigInt::from(m)).to_u64().expect("residue below m fits")
}

/// A scalar of the value group in exponent notation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    free: Vec<BigInt>,
    torsion: u64,
}

impl GroupElement {
    /// Unchecked constructor; the torsion residue must already be reduced.
    pub(crate) fn from_parts(free: Vec<BigInt>, torsion: u64) -> GroupElement {
        GroupElement { free, torsion }
    }

    pub fn free_part(&self) -> &[BigInt] {
        &self.free
    }

    pub fn torsion_part(&self) -> u64 {
        self.torsion
    }

    pub fn is_identity(&self) -> bool {
        self.torsion == 0 && self.free.iter().all(Zero::is_zero)
    }
}

/// Result of [`ValueGroup::merge`].
#[derive(Clone, Debug)]
pub struct Merged {
    pub group: ValueGroup,
    pub first: Embedding,
    pub second: Embedding,
}

/// Injective homomorphism from one factor into the merged group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    /// Old generator index to new generator index.
    pub map: Vec<usize>,
    /// A root of unity of order `m_i` becomes `zeta_m^(m / m_i)`.
    pub torsion_scale: u64,
}

impl Embedding {
    pub fn apply(&self, target: &ValueGroup, e: &GroupElement) -> GroupElement {
        let mut out = target.identity();
        for (old, new) in self.map.iter().enumerate() {
            out.free[*new] += &e.free[old];
        }
        out.torsion = (e.torsion * self.torsion_scale) % target.torsion_order;
        out
    }
}
