//! JSON encoding of functions. Rationals are written as `"p/q"` strings.
//!
//! ```text
//! {"kind": "concave"|"convex", "n": 1|2, "pieces": [[c.., d], ..],
//!  "support"|"domain": [[x, y], ..] or null, "m": int, "sign": "+"|"-"}
//! ```

use num_traits::ToPrimitive;
use serde_json::{json, Value};

use super::{Base, PLConcaveFn, PLConvexFn, SConcaveFn, Sign};
use crate::error::{Error, Result};
use crate::geometry::polytope::Polytope;
use crate::geometry::rational::*;
use crate::geometry::simplex::Affine;

fn bad(msg: &str) -> Error {
    Error::InvalidInput(msg.to_string())
}

fn q_json(x: &Q) -> Value {
    Value::String(fmt_q(x))
}

fn parse_q_json(v: &Value) -> Result<Q> {
    match v {
        Value::String(s) => parse_q(s),
        Value::Number(n) => parse_q(&n.to_string()),
        _ => Err(bad("expected a rational")),
    }
}

fn points_json(pts: &[Point]) -> Value {
    Value::Array(pts.iter().map(|p| Value::Array(p.iter().map(q_json).collect())).collect())
}

fn pieces_json(pieces: &[Affine]) -> Value {
    Value::Array(
        pieces
            .iter()
            .map(|p| {
                let mut row: Vec<Value> = p.coeffs.iter().map(q_json).collect();
                row.push(q_json(&p.constant));
                Value::Array(row)
            })
            .collect(),
    )
}

fn parse_rows(v: &Value, width: usize) -> Result<Vec<Vec<Q>>> {
    let rows = v.as_array().ok_or_else(|| bad("expected an array of rows"))?;
    rows.iter()
        .map(|r| {
            let r = r.as_array().ok_or_else(|| bad("expected a row"))?;
            if r.len() != width {
                return Err(bad("row has the wrong length"));
            }
            r.iter().map(parse_q_json).collect()
        })
        .collect()
}

fn m_json(m: &Q) -> Value {
    match (m.is_integer(), m.to_integer().to_i64()) {
        (true, Some(k)) => json!(k),
        _ => q_json(m),
    }
}

pub fn base_to_json(base: &Base, m: Option<&Q>) -> Value {
    let mut obj = match base {
        Base::Concave(f) => json!({
            "kind": "concave",
            "n": f.n(),
            "pieces": pieces_json(f.pieces()),
            "support": points_json(f.support().vertices()),
        }),
        Base::Convex(f) => json!({
            "kind": "convex",
            "n": f.n(),
            "pieces": pieces_json(f.pieces()),
            "domain": f.domain().map(|d| points_json(d.vertices())).unwrap_or(Value::Null),
        }),
    };
    if let Some(m) = m {
        obj["m"] = m_json(m);
        obj["sign"] = json!(match base {
            Base::Concave(_) => "+",
            Base::Convex(_) => "-",
        });
    }
    obj
}

pub fn sfn_to_json(g: &SConcaveFn) -> Value {
    base_to_json(g.base(), Some(g.m()))
}

/// Parses a function document; `m` is returned when present.
pub fn parse_fn(v: &Value) -> Result<(Base, Option<Q>)> {
    let kind = v["kind"].as_str().ok_or_else(|| bad("missing \"kind\""))?;
    let n = v["n"].as_u64().ok_or_else(|| bad("missing \"n\""))? as usize;
    if !(1..=2).contains(&n) {
        return Err(bad("\"n\" must be 1 or 2"));
    }
    let pieces: Vec<Affine> = parse_rows(&v["pieces"], n + 1)?
        .into_iter()
        .map(|mut r| {
            let d = r.pop().expect("width n + 1");
            Affine::new(r, d)
        })
        .collect();
    let body = |key: &str| -> Result<Option<Polytope>> {
        match &v[key] {
            Value::Null => Ok(None),
            b => Ok(Some(Polytope::hull(&parse_rows(b, n)?)?)),
        }
    };
    let base = match kind {
        "concave" => {
            let s = body("support")?.ok_or_else(|| bad("concave functions need \"support\""))?;
            Base::Concave(PLConcaveFn::new(n, s, pieces)?)
        }
        "convex" => Base::Convex(PLConvexFn::new(n, pieces, body("domain")?)?),
        other => return Err(bad(&format!("unknown kind {other:?}"))),
    };
    let m = match &v["m"] {
        Value::Null => None,
        m => Some(parse_q_json(m)?),
    };
    if let Some(s) = v["sign"].as_str() {
        let sign = match s {
            "+" => Sign::Positive,
            "-" | "\u{2212}" => Sign::Negative,
            _ => return Err(bad("\"sign\" must be \"+\" or \"-\"")),
        };
        let expected = match base {
            Base::Concave(_) => Sign::Positive,
            Base::Convex(_) => Sign::Negative,
        };
        if sign != expected {
            return Err(bad("\"sign\" does not match \"kind\""));
        }
    }
    Ok((base, m))
}

pub fn parse_sfn(v: &Value) -> Result<SConcaveFn> {
    let (base, m) = parse_fn(v)?;
    SConcaveFn::new(base, m.ok_or_else(|| bad("missing \"m\""))?)
}

pub fn to_string(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{random_fn, RandomKind};

    #[test]
    fn roundtrip_is_byte_identical() {
        for (seed, kind) in [(1, RandomKind::Concave), (2, RandomKind::ConvexCoercive), (3, RandomKind::ClassF)] {
            let f = random_fn(seed, kind, 2, 3).unwrap();
            let a = to_string(&base_to_json(&f, Some(&q(4))));
            let (g, m) = parse_fn(&serde_json::from_str(&a).unwrap()).unwrap();
            assert_eq!(g, f);
            assert_eq!(a, to_string(&base_to_json(&g, m.as_ref())));
        }
    }

    #[test]
    fn unicode_minus_and_mismatched_sign() {
        let doc = json!({"kind": "convex", "n": 1, "pieces": [["1", "1"], ["−1", "1"]], "domain": null, "m": 3, "sign": "−"});
        assert!(parse_sfn(&doc).is_ok());
        let doc = json!({"kind": "convex", "n": 1, "pieces": [["1", "1"], ["-1", "1"]], "domain": null, "m": 3, "sign": "+"});
        assert!(parse_sfn(&doc).is_err());
    }
}
