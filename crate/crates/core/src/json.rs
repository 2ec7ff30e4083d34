// SPDX-License-Identifier: Apache-2.0

//! Integer conversions at the JSON boundary.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

pub(crate) fn to_i64(x: &BigInt) -> Result<i64, String> {
    x.to_i64().ok_or_else(|| format!("integer {x} does not fit in 64 bits"))
}

pub(crate) fn rows_to_i64(rows: &[Vec<BigInt>]) -> Result<Vec<Vec<i64>>, String> {
    rows.iter().map(|r| r.iter().map(to_i64).collect()).collect()
}
