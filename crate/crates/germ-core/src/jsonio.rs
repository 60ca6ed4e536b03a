//! JSON encoding and decoding for the exact-arithmetic types.
//!
//! Conventions: field elements are bracketed coefficient strings of
//! decimal integers ("[3,0,1]"), so no reader ever guesses a platform
//! integer width; contexts are {p, m, modulus}; precision is an integer
//! bound or `null` for exact values; one-variable series are
//! {val, prec, coeffs}; two-variable series are {prec, terms} with
//! terms [i, j, "[c0,...]"]. Decoding is context-bound: the caller fixes
//! the field first and every element is validated into it.

use serde_json::{json, Value};

use crate::biseries::BiSeries;
use crate::conn::SeriesMat;
use crate::error::{Error, Result};
use crate::ffield::{FieldCtx, FieldElt};
use crate::parabolic::Partition;
use crate::series::{Series1, PREC_EXACT};
use crate::ypoly::YPoly;
use std::collections::BTreeMap;

fn bad(msg: impl Into<String>) -> Error {
    Error::BadInput(msg.into())
}

// ---------------------------------------------------------------------------
// Field elements and contexts
// ---------------------------------------------------------------------------

/// "[c0,c1,...]" with decimal coefficients, least degree first.
pub fn elt_to_json(e: &FieldElt) -> Value {
    let inner: Vec<String> = e.coeffs().iter().map(u64::to_string).collect();
    Value::String(format!("[{}]", inner.join(",")))
}

/// Parse a bracketed coefficient string into the given field.
pub fn elt_from_json(ctx: &FieldCtx, v: &Value) -> Result<FieldElt> {
    let s = v
        .as_str()
        .ok_or_else(|| bad("field element must be a string like \"[3,0,1]\""))?;
    let body = s
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| bad(format!("field element {s:?} is not bracketed")))?;
    let trimmed = body.trim();
    if trimmed.is_empty() {
        return Ok(ctx.zero());
    }
    let coeffs: Vec<u64> = trimmed
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| bad(format!("coefficient {t:?} is not a decimal integer")))
        })
        .collect::<Result<_>>()?;
    ctx.from_coeffs(&coeffs)
}

/// {p, m, modulus} with the modulus as prime-field coefficients,
/// constant term first, leading 1 last.
pub fn ctx_to_json(ctx: &FieldCtx) -> Value {
    json!({
        "p": ctx.p(),
        "m": ctx.degree(),
        "modulus": ctx.modulus(),
    })
}

/// Read a context: p required; m defaults to 1; an explicit modulus
/// overrides the canonical choice and must match m.
pub fn ctx_from_json(v: &Value) -> Result<FieldCtx> {
    let obj = v.as_object().ok_or_else(|| bad("context must be an object"))?;
    let p = obj
        .get("p")
        .and_then(Value::as_u64)
        .ok_or_else(|| bad("context needs a prime p"))?;
    let m = match obj.get("m") {
        None | Some(Value::Null) => 1,
        Some(x) => x
            .as_u64()
            .ok_or_else(|| bad("field degree m must be a positive integer"))?
            as usize,
    };
    match obj.get("modulus") {
        None | Some(Value::Null) => FieldCtx::canonical(p, m),
        Some(Value::Array(arr)) => {
            let coeffs: Vec<u64> = arr
                .iter()
                .map(|x| x.as_u64().ok_or_else(|| bad("modulus coefficients must be integers")))
                .collect::<Result<_>>()?;
            if coeffs.len() != m + 1 {
                return Err(bad(format!(
                    "modulus has degree {} but m = {m}",
                    coeffs.len().saturating_sub(1)
                )));
            }
            FieldCtx::from_modulus(p, coeffs)
        }
        Some(_) => Err(bad("modulus must be an array of integers")),
    }
}

// ---------------------------------------------------------------------------
// Precision
// ---------------------------------------------------------------------------

/// Integer bound, or null for exact.
pub fn prec_to_json(prec: i64) -> Value {
    if prec >= PREC_EXACT {
        Value::Null
    } else {
        json!(prec)
    }
}

/// Null (or absent upstream) means exact.
pub fn prec_from_json(v: &Value) -> Result<i64> {
    match v {
        Value::Null => Ok(PREC_EXACT),
        _ => v
            .as_i64()
            .filter(|&n| n < PREC_EXACT)
            .ok_or_else(|| bad("prec must be an integer or null")),
    }
}

// ---------------------------------------------------------------------------
// Series
// ---------------------------------------------------------------------------

/// {val, prec, coeffs} with coefficient strings from the valuation up.
pub fn series_to_json(s: &Series1) -> Value {
    json!({
        "val": match s.ord() {
            Some(v) => json!(v),
            None => Value::Null,
        },
        "prec": prec_to_json(s.prec()),
        "coeffs": dense_coeffs(s),
    })
}

fn dense_coeffs(s: &Series1) -> Vec<Value> {
    match s.ord() {
        None => Vec::new(),
        Some(v) => {
            let top = s.iter_terms().map(|(e, _)| e).max().unwrap();
            (v..=top).map(|e| elt_to_json(&s.coeff(e))).collect()
        }
    }
}

/// Read {val, prec, coeffs}; a null/absent val with empty coeffs is zero.
pub fn series_from_json(ctx: &FieldCtx, v: &Value) -> Result<Series1> {
    let obj = v
        .as_object()
        .ok_or_else(|| bad("series must be an object with val, prec, coeffs"))?;
    let prec = prec_from_json(obj.get("prec").unwrap_or(&Value::Null))?;
    let coeffs = match obj.get("coeffs") {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(arr)) => arr
            .iter()
            .map(|x| elt_from_json(ctx, x))
            .collect::<Result<Vec<_>>>()?,
        Some(_) => return Err(bad("coeffs must be an array of coefficient strings")),
    };
    let val = match obj.get("val") {
        None | Some(Value::Null) => {
            if coeffs.iter().any(|c| !c.is_zero()) {
                return Err(bad("nonzero series needs a valuation"));
            }
            return Ok(Series1::zero(ctx, prec));
        }
        Some(x) => x.as_i64().ok_or_else(|| bad("val must be an integer"))?,
    };
    Ok(Series1::new(ctx.clone(), val, coeffs, prec))
}

/// {prec, terms} with terms [i, j, "[c0,...]"], sorted by (i, j).
pub fn biseries_to_json(b: &BiSeries) -> Value {
    let terms: Vec<Value> = b
        .iter_terms()
        .map(|(&(i, j), c)| json!([i, j, elt_to_json(c)]))
        .collect();
    json!({ "prec": prec_to_json(b.prec()), "terms": terms })
}

/// Read {prec, terms}.
pub fn biseries_from_json(ctx: &FieldCtx, v: &Value) -> Result<BiSeries> {
    let obj = v
        .as_object()
        .ok_or_else(|| bad("two-variable series must be an object with prec, terms"))?;
    let prec = prec_from_json(obj.get("prec").unwrap_or(&Value::Null))?;
    let arr = match obj.get("terms") {
        None | Some(Value::Null) => &Vec::new(),
        Some(Value::Array(a)) => a,
        Some(_) => return Err(bad("terms must be an array")),
    };
    let mut terms = BTreeMap::new();
    for t in arr {
        let triple = t
            .as_array()
            .filter(|a| a.len() == 3)
            .ok_or_else(|| bad("each term must be [i, j, coefficient]"))?;
        let i = triple[0]
            .as_i64()
            .filter(|&e| e >= 0)
            .ok_or_else(|| bad("x-exponent must be a non-negative integer"))?;
        let j = triple[1]
            .as_i64()
            .filter(|&e| e >= 0)
            .ok_or_else(|| bad("y-exponent must be a non-negative integer"))?;
        let c = elt_from_json(ctx, &triple[2])?;
        if terms.insert((i, j), c).is_some() {
            return Err(bad(format!("duplicate term at exponent ({i}, {j})")));
        }
    }
    Ok(BiSeries::new(ctx.clone(), terms, prec))
}

/// A polynomial in y as the array of its coefficient series, degree 0 first.
pub fn ypoly_to_json(w: &YPoly) -> Value {
    Value::Array(w.coeffs().iter().map(series_to_json).collect())
}

/// Read an array of series as a y-polynomial.
pub fn ypoly_from_json(ctx: &FieldCtx, v: &Value) -> Result<YPoly> {
    let arr = v
        .as_array()
        .ok_or_else(|| bad("y-polynomial must be an array of series"))?;
    if arr.is_empty() {
        return Err(bad("y-polynomial needs at least one coefficient"));
    }
    let coeffs = arr
        .iter()
        .map(|x| series_from_json(ctx, x))
        .collect::<Result<Vec<_>>>()?;
    Ok(YPoly::new(ctx.clone(), coeffs))
}

// ---------------------------------------------------------------------------
// Matrices and partitions
// ---------------------------------------------------------------------------

/// Row-major nested arrays of series.
pub fn mat_to_json(m: &SeriesMat) -> Value {
    Value::Array(
        m.iter()
            .map(|row| Value::Array(row.iter().map(series_to_json).collect()))
            .collect(),
    )
}

/// Read a square row-major matrix of series.
pub fn mat_from_json(ctx: &FieldCtx, v: &Value) -> Result<SeriesMat> {
    let rows = v
        .as_array()
        .ok_or_else(|| bad("matrix must be an array of rows"))?;
    let r = rows.len();
    if r == 0 {
        return Err(bad("matrix must be nonempty"));
    }
    let mut out = Vec::with_capacity(r);
    for row in rows {
        let cells = row
            .as_array()
            .filter(|a| a.len() == r)
            .ok_or_else(|| bad("matrix rows must all have the same square length"))?;
        out.push(
            cells
                .iter()
                .map(|x| series_from_json(ctx, x))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(out)
}

/// Field-element matrix as nested arrays of coefficient strings.
pub fn fmat_to_json(m: &[Vec<FieldElt>]) -> Value {
    Value::Array(
        m.iter()
            .map(|row| Value::Array(row.iter().map(elt_to_json).collect()))
            .collect(),
    )
}

/// Decreasing positive parts.
pub fn partition_from_json(v: &Value) -> Result<Partition> {
    let arr = v
        .as_array()
        .ok_or_else(|| bad("partition must be an array of positive integers"))?;
    let parts = arr
        .iter()
        .map(|x| {
            x.as_u64()
                .filter(|&n| n > 0)
                .map(|n| n as usize)
                .ok_or_else(|| bad("partition parts must be positive integers"))
        })
        .collect::<Result<Vec<_>>>()?;
    Partition::new(parts)
}

/// Partition as a JSON array.
pub fn partition_to_json(lam: &Partition) -> Value {
    json!(lam.parts())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn element_round_trip() {
        let ctx = FieldCtx::canonical(5, 2).unwrap();
        let e = ctx.gen().add(&ctx.from_scalar(3));
        let v = elt_to_json(&e);
        assert_eq!(v, Value::String("[3,1]".into()));
        assert_eq!(elt_from_json(&ctx, &v).unwrap(), e);
        assert_eq!(
            elt_from_json(&ctx, &Value::String("[]".into())).unwrap(),
            ctx.zero()
        );
        assert!(elt_from_json(&ctx, &json!(3)).is_err());
    }

    #[test]
    fn context_round_trip() {
        let ctx = FieldCtx::canonical(7, 3).unwrap();
        let v = ctx_to_json(&ctx);
        let back = ctx_from_json(&v).unwrap();
        assert_eq!(back, ctx);
        // Defaults: m = 1, canonical modulus.
        let plain = ctx_from_json(&json!({"p": 5})).unwrap();
        assert_eq!(plain.degree(), 1);
        assert!(ctx_from_json(&json!({"p": 5, "m": 2, "modulus": [1, 1]})).is_err());
    }

    #[test]
    fn series_round_trip_including_exact_and_zero() {
        let ctx = FieldCtx::prime(5).unwrap();
        let s = Series1::new(
            ctx.clone(),
            -1,
            vec![ctx.from_scalar(2), ctx.zero(), ctx.from_scalar(4)],
            8,
        );
        let v = series_to_json(&s);
        assert_eq!(series_from_json(&ctx, &v).unwrap(), s);
        let exact = Series1::monomial(ctx.one(), 3);
        let v = series_to_json(&exact);
        assert_eq!(v.get("prec"), Some(&Value::Null));
        assert_eq!(series_from_json(&ctx, &v).unwrap(), exact);
        let zero = Series1::zero(&ctx, 6);
        let v = series_to_json(&zero);
        assert_eq!(series_from_json(&ctx, &v).unwrap(), zero);
    }

    #[test]
    fn biseries_round_trip_and_validation() {
        let ctx = FieldCtx::prime(5).unwrap();
        let mut terms = BTreeMap::new();
        terms.insert((0, 2), ctx.one());
        terms.insert((1, 1), ctx.from_scalar(3));
        terms.insert((2, 0), ctx.from_scalar(2));
        let b = BiSeries::new(ctx.clone(), terms, 9);
        let v = biseries_to_json(&b);
        assert_eq!(biseries_from_json(&ctx, &v).unwrap(), b);
        let dup = json!({"prec": 5, "terms": [[0,0,"[1]"],[0,0,"[2]"]]});
        assert!(biseries_from_json(&ctx, &dup).is_err());
        let neg = json!({"prec": 5, "terms": [[-1,0,"[1]"]]});
        assert!(biseries_from_json(&ctx, &neg).is_err());
    }

    #[test]
    fn matrix_and_partition_round_trip() {
        let ctx = FieldCtx::prime(5).unwrap();
        let m: SeriesMat = vec![
            vec![Series1::one(&ctx), Series1::zero(&ctx, 4)],
            vec![Series1::monomial(ctx.from_scalar(2), 1), Series1::one(&ctx)],
        ];
        let v = mat_to_json(&m);
        assert_eq!(mat_from_json(&ctx, &v).unwrap(), m);
        let one = json!({"val": 0, "prec": null, "coeffs": ["[1]"]});
        assert!(mat_from_json(&ctx, &json!([[one]])).is_ok());
        let ragged = json!([[one, one], [one]]);
        assert!(mat_from_json(&ctx, &ragged).is_err());
        let lam = Partition::new(vec![3, 1]).unwrap();
        assert_eq!(
            partition_from_json(&partition_to_json(&lam)).unwrap().parts(),
            lam.parts()
        );
        assert!(partition_from_json(&json!([1, 3])).is_err());
    }
}
