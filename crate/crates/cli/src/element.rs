// SPDX-License-Identifier: Apache-2.0

//! JSON terms for `element-mul`:
//! `[{"c": "3/2", "q": {"q": 1}, "torsion": 0, "x": [1, 0]}, ...]`.
//! `c` may be an integer or a rational string; `q` and `torsion` default to
//! the identity.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use qtorus::pairing::MultiparameterMatrix;
use qtorus::twisted::TwistedElement;
use serde_json::{json, Value};

pub fn int_value(x: &BigInt) -> Value {
    x.to_i64().map(Value::from).unwrap_or_else(|| Value::String(x.to_string()))
}

fn coefficient(v: &Value) -> Result<BigRational, String> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(|i| BigRational::from(BigInt::from(i)))
            .ok_or_else(|| format!("coefficient {n} is not an integer; quote rationals as \"p/q\"")),
        Value::String(s) => s.parse::<BigRational>().map_err(|e| format!("coefficient {s:?}: {e}")),
        other => Err(format!("coefficient {other} is neither a number nor a string")),
    }
}

pub fn parse(ctx: &Arc<MultiparameterMatrix>, text: &str) -> Result<TwistedElement, String> {
    let terms: Vec<BTreeMap<String, Value>> = serde_json::from_str(text).map_err(|e| format!("element: {e}"))?;
    let g = ctx.value_group();
    let mut acc = TwistedElement::zero(ctx);
    for (idx, term) in terms.iter().enumerate() {
        let at = |field: &str| format!("term {idx}: {field}");
        if let Some(key) = term.keys().find(|k| !["c", "q", "torsion", "x"].contains(&k.as_str())) {
            return Err(format!("{}: unknown field", at(key)));
        }
        let c = match term.get("c") {
            Some(v) => coefficient(v).map_err(|e| format!("{}: {e}", at("c")))?,
            None => BigRational::from(BigInt::from(1)),
        };
        let mut free = vec![BigInt::from(0); g.free_rank()];
        if let Some(q) = term.get("q") {
            let q: BTreeMap<String, i64> = serde_json::from_value(q.clone()).map_err(|e| format!("{}: {e}", at("q")))?;
            for (name, e) in q {
                let pos = g.index_of(&name).ok_or_else(|| format!("{}: unknown generator {name}", at("q")))?;
                free[pos] = BigInt::from(e);
            }
        }
        let torsion = match term.get("torsion") {
            Some(t) => t.as_i64().ok_or_else(|| format!("{}: not an integer", at("torsion")))?,
            None => 0,
        };
        let x: Vec<i64> = match term.get("x") {
            Some(x) => serde_json::from_value(x.clone()).map_err(|e| format!("{}: {e}", at("x")))?,
            None => vec![0; ctx.rank()],
        };
        let q = g.element(free, torsion).map_err(|e| format!("{}: {e}", at("q")))?;
        let mono = TwistedElement::monomial(ctx, c, q, x.into_iter().map(BigInt::from).collect())
            .map_err(|e| format!("{}: {e}", at("x")))?;
        acc = acc.add(&mono).map_err(|e| e.to_string())?;
    }
    Ok(acc)
}

pub fn to_json(e: &TwistedElement) -> Value {
    let g = e.context().value_group();
    let terms: Vec<Value> = e
        .terms()
        .map(|((x, q), c)| {
            let qmap: BTreeMap<&str, Value> = g
                .generators()
                .iter()
                .zip(q.free_part())
                .filter(|(_, v)| v.sign() != num_bigint::Sign::NoSign)
                .map(|(n, v)| (n.as_str(), int_value(v)))
                .collect();
            json!({
                "c": c.to_string(),
                "q": qmap,
                "torsion": q.torsion_part(),
                "x": x.iter().map(int_value).collect::<Vec<_>>(),
            })
        })
        .collect();
    Value::Array(terms)
}
