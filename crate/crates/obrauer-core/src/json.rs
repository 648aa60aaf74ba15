//! Canonical JSON encoding (schema 1).
//!
//! Scalars: integers as numbers when they fit in an i64, other rationals as
//! `"p/q"` strings, non-constant polynomials as a list of
//! `{"coeff": c, "mono": [[symbol, exponent], ...]}` in increasing monomial
//! order. Object keys are sorted, so output is byte-stable.

use serde_json::{json, Map, Value};

use crate::diagrams::{Endpoint, Matching, Morphism, NormalDiagram, Word};
use crate::quotients::WalledBrauer;
use crate::scalars::{fmt_rat, parse_rat, rat_to_i64, Monomial, Poly, Rat, Sym};
use crate::verify::CheckReport;

pub const SCHEMA: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed JSON: {0}")]
pub struct JsonError(pub String);

fn bad<T>(msg: impl Into<String>) -> Result<T, JsonError> {
    Err(JsonError(msg.into()))
}

pub fn rat_to_json(r: &Rat) -> Value {
    match rat_to_i64(r) {
        Some(n) => json!(n),
        None => json!(fmt_rat(r)),
    }
}

pub fn rat_from_json(v: &Value) -> Result<Rat, JsonError> {
    match v {
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(Rat::from_integer(i.into())),
            None => bad(format!("non-integer number {n}")),
        },
        Value::String(s) => parse_rat(s).map_err(|e| JsonError(e.to_string())),
        _ => bad(format!("expected a rational, got {v}")),
    }
}

pub fn scalar_to_json(p: &Poly) -> Value {
    if let Some(r) = p.as_rat() {
        return rat_to_json(&r);
    }
    Value::Array(
        p.terms()
            .map(|(m, c)| {
                let mono: Vec<Value> = m.pairs().iter().map(|(s, e)| json!([s.name(), e])).collect();
                json!({"coeff": rat_to_json(c), "mono": mono})
            })
            .collect(),
    )
}

pub fn scalar_from_json(v: &Value) -> Result<Poly, JsonError> {
    let Value::Array(items) = v else {
        return Ok(Poly::from_rat(rat_from_json(v)?));
    };
    let mut p = Poly::zero();
    for it in items {
        let c = rat_from_json(it.get("coeff").ok_or_else(|| JsonError("term without coeff".into()))?)?;
        let Some(Value::Array(mono)) = it.get("mono") else {
            return bad("term without mono");
        };
        let mut pairs = Vec::new();
        for f in mono {
            let (Some(s), Some(e)) = (f.get(0).and_then(Value::as_str), f.get(1).and_then(Value::as_u64)) else {
                return bad(format!("bad factor {f}"));
            };
            let sym = Sym::parse(s).ok_or_else(|| JsonError(format!("unknown symbol {s}")))?;
            pairs.push((sym, e as u32));
        }
        p.add_term(Monomial::from_pairs(pairs), c);
    }
    Ok(p)
}

/// `{"match": [[input, output], ...], "dots": {output: k}}`, inputs ascending.
pub fn diagram_to_json(d: &NormalDiagram) -> Value {
    let m = &d.matching;
    let pairs: Vec<Value> = m
        .inputs()
        .into_iter()
        .map(|i| json!([m.endpoint(i).to_string(), m.endpoint(m.partner(i)).to_string()]))
        .collect();
    let mut dots = Map::new();
    for o in m.outputs() {
        if d.dots_on(o) > 0 {
            dots.insert(m.endpoint(o).to_string(), json!(d.dots_on(o)));
        }
    }
    json!({"match": pairs, "dots": dots})
}

pub fn diagram_from_json(v: &Value, src: &Word, tgt: &Word) -> Result<NormalDiagram, JsonError> {
    let n = src.len() + tgt.len();
    let index = |s: &str| -> Result<usize, JsonError> {
        let ep = Endpoint::parse(s).ok_or_else(|| JsonError(format!("bad endpoint {s}")))?;
        let len = match ep.side {
            crate::diagrams::Side::Bottom => src.len(),
            crate::diagrams::Side::Top => tgt.len(),
        };
        if ep.pos >= len {
            return bad(format!("endpoint {s} out of range"));
        }
        Ok(match ep.side {
            crate::diagrams::Side::Bottom => ep.pos,
            crate::diagrams::Side::Top => src.len() + ep.pos,
        })
    };
    let Some(Value::Array(pairs)) = v.get("match") else {
        return bad("diagram without match");
    };
    let mut pair = vec![usize::MAX; n];
    for p in pairs {
        let (Some(a), Some(b)) = (p.get(0).and_then(Value::as_str), p.get(1).and_then(Value::as_str)) else {
            return bad(format!("bad pair {p}"));
        };
        let (a, b) = (index(a)?, index(b)?);
        pair[a] = b;
        pair[b] = a;
    }
    let matching = Matching::from_pairs(src.clone(), tgt.clone(), pair).map_err(|e| JsonError(e.to_string()))?;
    let mut dots = vec![0u32; n];
    if let Some(Value::Object(ds)) = v.get("dots") {
        for (k, c) in ds {
            let Some(c) = c.as_u64() else {
                return bad(format!("bad dot count {c}"));
            };
            dots[index(k)?] = c as u32;
        }
    }
    NormalDiagram::new(matching, dots).map_err(|e| JsonError(e.to_string()))
}

pub fn morphism_to_json(f: &Morphism) -> Value {
    let terms: Vec<Value> = f
        .terms
        .iter()
        .map(|(d, c)| {
            let mut v = diagram_to_json(d);
            v["coeff"] = scalar_to_json(c);
            v
        })
        .collect();
    json!({"schema": SCHEMA, "src": f.src.to_string(), "tgt": f.tgt.to_string(), "terms": terms})
}

fn word_field(v: &Value, key: &str) -> Result<Word, JsonError> {
    let s = v.get(key).and_then(Value::as_str).ok_or_else(|| JsonError(format!("missing {key}")))?;
    Word::parse(s).map_err(|e| JsonError(e.to_string()))
}

pub fn morphism_from_json(v: &Value) -> Result<Morphism, JsonError> {
    if v.get("schema").and_then(Value::as_u64) != Some(SCHEMA) {
        return bad("unsupported schema");
    }
    let (src, tgt) = (word_field(v, "src")?, word_field(v, "tgt")?);
    let mut f = Morphism::zero(&src, &tgt);
    let Some(Value::Array(terms)) = v.get("terms") else {
        return bad("missing terms");
    };
    for t in terms {
        let d = diagram_from_json(t, &src, &tgt)?;
        let c = scalar_from_json(t.get("coeff").ok_or_else(|| JsonError("term without coeff".into()))?)?;
        f.add_term(d, c);
    }
    Ok(f)
}

/// A basis listing; each element carries its bubble monomial as `coeff`.
pub fn basis_to_json(src: &Word, tgt: &Word, basis: &[(NormalDiagram, Monomial)]) -> Value {
    let elems: Vec<Value> = basis
        .iter()
        .map(|(d, b)| {
            let mut v = diagram_to_json(d);
            v["coeff"] = scalar_to_json(&Poly::monomial(b.clone(), Rat::from_integer(1.into())));
            v
        })
        .collect();
    json!({"schema": SCHEMA, "src": src.to_string(), "tgt": tgt.to_string(), "dim": basis.len(), "basis": elems})
}

/// Structure constants: `products[i][j]` lists `[k, coeff]` with
/// `b_i . b_j = sum coeff b_k`.
pub fn walled_brauer_to_json(mode: &str, b: &WalledBrauer) -> Value {
    let basis: Vec<Value> = b.basis.iter().map(diagram_to_json).collect();
    let products: Vec<Value> = b
        .table
        .iter()
        .map(|row| {
            Value::Array(
                row.iter()
                    .map(|cell| Value::Array(cell.iter().map(|(k, c)| json!([k, scalar_to_json(c)])).collect()))
                    .collect(),
            )
        })
        .collect();
    json!({
        "schema": SCHEMA,
        "mode": mode,
        "word": b.word.to_string(),
        "dim": b.basis.len(),
        "basis": basis,
        "products": products,
    })
}

pub fn report_to_json(r: &CheckReport) -> Value {
    json!({
        "name": r.name,
        "status": if r.passed { "pass" } else { "fail" },
        "witness": r.witness,
        "ms": r.millis as u64,
    })
}

pub fn reports_to_json(rs: &[CheckReport]) -> Value {
    let all = rs.iter().all(|r| r.passed);
    json!({
        "schema": SCHEMA,
        "passed": all,
        "reports": rs.iter().map(report_to_json).collect::<Vec<_>>(),
    })
}

/// Compact canonical text.
pub fn to_canonical(v: &Value) -> String {
    serde_json::to_string(v).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_combination;
    use crate::rewrite::Engine;
    use crate::scalars::ratio;

    #[test]
    fn scalars() {
        assert_eq!(scalar_to_json(&Poly::int(-4)), json!(-4));
        assert_eq!(scalar_to_json(&Poly::from_rat(ratio(3, -6))), json!("-1/2"));
        let p = Poly::parse("D1^2 - 1/3*m2 + 5").unwrap();
        let v = scalar_to_json(&p);
        assert_eq!(scalar_from_json(&v).unwrap(), p);
        assert_eq!(
            to_canonical(&scalar_to_json(&Poly::parse("2*D1").unwrap())),
            r#"[{"coeff":2,"mono":[["D1",1]]}]"#
        );
    }

    #[test]
    fn morphism_encoding() {
        let c = parse_combination("(1[^] * x) . s + D2 * x * x").unwrap();
        let f = Engine::filtered().normalize_sum(&c.terms, &c.src, &c.tgt).unwrap();
        let v = morphism_to_json(&f);
        assert_eq!(morphism_from_json(&v).unwrap(), f);
        let text = to_canonical(&v);
        assert!(text.starts_with(r#"{"schema":1,"src":"^^","terms":["#));
        assert!(text.contains(r#""match":[["b1","t2"],["b2","t1"]]"#));
    }

    #[test]
    fn rejects_garbage() {
        assert!(morphism_from_json(&json!({"schema": 2})).is_err());
        let v = json!({"schema": 1, "src": "^", "tgt": "^", "terms": [{"match": [["b1", "t2"]], "coeff": 1}]});
        assert!(morphism_from_json(&v).is_err());
    }
}
