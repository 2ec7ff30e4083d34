// SPDX-License-Identifier: Apache-2.0

//! JSON instance files.
//!
//! ```json
//! {"rank": 2,
//!  "value_group": {"free": ["q"], "torsion_order": 1},
//!  "lambda": [{"i": 1, "j": 2, "exponents": {"q": 1}, "torsion": 0}]}
//! ```
//!
//! Only entries with `i < j` are written (1-based); the rest of the matrix is
//! the antisymmetric completion and missing entries are the identity.

use std::collections::{BTreeMap, HashSet};
use std::io::Read;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pairing::MultiparameterMatrix;
use crate::value_group::ValueGroup;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("malformed instance at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid field `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("cannot read instance: {0}")]
    Io(String),
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> InstanceError {
    InstanceError::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueGroupSpec {
    pub free: Vec<String>,
    pub torsion_order: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaEntry {
    pub i: usize,
    pub j: usize,
    #[serde(default)]
    pub exponents: BTreeMap<String, i64>,
    #[serde(default)]
    pub torsion: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub rank: usize,
    pub value_group: ValueGroupSpec,
    pub lambda: Vec<LambdaEntry>,
}

impl InstanceFile {
    /// Canonical form: entries in row-major order, identity entries and zero
    /// exponents omitted.
    pub fn from_matrix(lambda: &MultiparameterMatrix) -> Result<InstanceFile, InstanceError> {
        let g = lambda.value_group();
        let n = lambda.rank();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let e = lambda.entry(i, j);
                if e.is_identity() {
                    continue;
                }
                let mut exponents = BTreeMap::new();
                for (name, x) in g.generators().iter().zip(e.free_part()) {
                    if x.sign() != num_bigint::Sign::NoSign {
                        let v = x
                            .to_i64()
                            .ok_or_else(|| invalid(format!("lambda[{}]", entries.len()), "exponent exceeds 64 bits"))?;
                        exponents.insert(name.clone(), v);
                    }
                }
                entries.push(LambdaEntry {
                    i: i + 1,
                    j: j + 1,
                    exponents,
                    torsion: e.torsion_part() as i64,
                });
            }
        }
        Ok(InstanceFile {
            rank: n,
            value_group: ValueGroupSpec {
                free: g.generators().to_vec(),
                torsion_order: g.torsion_order(),
            },
            lambda: entries,
        })
    }

    pub fn to_matrix(&self) -> Result<MultiparameterMatrix, InstanceError> {
        if self.rank == 0 {
            return Err(invalid("rank", "must be at least 1"));
        }
        let m = self.value_group.torsion_order;
        let group = ValueGroup::new(self.value_group.free.clone(), m)
            .map_err(|e| invalid("value_group", e.to_string()))?;
        let n = self.rank;
        let mut upper = vec![group.identity(); n * n];
        let mut seen = HashSet::new();
        for (idx, entry) in self.lambda.iter().enumerate() {
            let field = format!("lambda[{idx}]");
            if !(1 <= entry.i && entry.i < entry.j && entry.j <= n) {
                return Err(invalid(
                    format!("{field}.i/j"),
                    format!("need 1 <= i < j <= {n}, got i = {}, j = {}", entry.i, entry.j),
                ));
            }
            if !seen.insert((entry.i, entry.j)) {
                return Err(invalid(field, format!("duplicate entry ({}, {})", entry.i, entry.j)));
            }
            let mut free = vec![BigInt::from(0); group.free_rank()];
            for (name, &x) in &entry.exponents {
                let pos = group
                    .index_of(name)
                    .ok_or_else(|| invalid(format!("{field}.exponents.{name}"), "unknown generator"))?;
                free[pos] = BigInt::from(x);
            }
            if entry.torsion < 0 || entry.torsion as u64 >= m {
                return Err(invalid(
                    format!("{field}.torsion"),
                    format!("{} is outside [0, {m})", entry.torsion),
                ));
            }
            upper[(entry.i - 1) * n + entry.j - 1] =
                group.element(free, entry.torsion).map_err(|e| invalid(field, e.to_string()))?;
        }
        MultiparameterMatrix::from_upper(n, group, |i, j| upper[i * n + j].clone())
            .map_err(|e| invalid("lambda", e.to_string()))
    }
}

pub fn parse_str(text: &str) -> Result<MultiparameterMatrix, InstanceError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| InstanceError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    file.to_matrix()
}

pub fn parse_reader<R: Read>(mut reader: R) -> Result<MultiparameterMatrix, InstanceError> {
    let mut text = String::new();
    reader.read_to_string(&mut text).map_err(|e| InstanceError::Io(e.to_string()))?;
    parse_str(&text)
}

/// Canonical pretty-printed JSON (with a trailing newline).
pub fn to_json_string(lambda: &MultiparameterMatrix) -> Result<String, InstanceError> {
    let file = InstanceFile::from_matrix(lambda)?;
    let mut s = serde_json::to_string_pretty(&file).expect("instance files serialize");
    s.push('\n');
    Ok(s)
}
