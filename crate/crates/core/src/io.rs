//! JSON formats for pictures, lattices, polytopes, flag points and collapse
//! traces. Rationals are `[numerator, denominator]` pairs; integers that do
//! not fit in 64 bits are written as decimal strings.

use std::collections::{BTreeMap, HashMap};

use num::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::collapse::CollapseTrace;
use crate::compat::{flag_point_from_labels, FlagPoint};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::kostant::{Coweight, KostantPicture};
use crate::lattice::{Lattice, TermVector};
use crate::perm::Permutation;
use crate::polytope::MvPolytope;

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

fn int_value(v: &BigInt) -> Value {
    match i64::try_from(v) {
        Ok(x) => json!(x),
        Err(_) => json!(v.to_string()),
    }
}

fn value_int(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Parse(format!("not an integer: {n}"))),
        Value::String(s) => s.parse().map_err(parse_err),
        _ => Err(Error::Parse(format!("not an integer: {v}"))),
    }
}

pub fn ratio_value<F: Field>(c: &F) -> Value {
    let (n, d) = c.to_ratio();
    json!([int_value(&n), int_value(&d)])
}

pub fn value_ratio<F: Field>(v: &Value) -> Result<F> {
    let pair = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::Parse(format!("expected [num, den], got {v}")))?;
    let num = value_int(&pair[0])?;
    let den = value_int(&pair[1])?;
    if den == BigInt::from(0) {
        return Err(Error::Parse("zero denominator".into()));
    }
    Ok(F::from_ratio(&num, &den))
}

#[derive(Serialize, Deserialize)]
struct PictureJson {
    n: usize,
    loops: Vec<[usize; 2]>,
}

pub fn picture_value(p: &KostantPicture) -> Value {
    json!({
        "n": p.n(),
        "loops": p.intervals().iter().map(|&(l, r)| [l, r]).collect::<Vec<_>>(),
    })
}

pub fn picture_from_value(v: &Value) -> Result<KostantPicture> {
    let pj: PictureJson = serde_json::from_value(v.clone()).map_err(parse_err)?;
    KostantPicture::new(pj.n, pj.loops.into_iter().map(|[l, r]| (l, r)))
}

pub fn picture_to_json(p: &KostantPicture) -> String {
    picture_value(p).to_string()
}

pub fn picture_from_json(s: &str) -> Result<KostantPicture> {
    picture_from_value(&serde_json::from_str(s).map_err(parse_err)?)
}

fn term_vector_value<F: Field>(v: &TermVector<F>) -> Value {
    Value::Array(
        v.terms()
            .iter()
            .map(|(d, i, c)| json!([ratio_value(c), d, i]))
            .collect(),
    )
}

/// A generator is either a list of `[[num, den], j, i]` terms or a string
/// such as `"t^-2e1+3e2"`.
fn term_vector_from_value<F: Field>(v: &Value) -> Result<TermVector<F>> {
    if let Value::String(s) = v {
        return TermVector::parse(s);
    }
    let terms = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("expected a list of terms, got {v}")))?;
    let mut out = Vec::new();
    for t in terms {
        let t = t
            .as_array()
            .filter(|a| a.len() == 3)
            .ok_or_else(|| Error::Parse(format!("expected [[num,den], j, i], got {t}")))?;
        let c = value_ratio(&t[0])?;
        let d = t[1].as_i64().ok_or_else(|| Error::Parse("bad degree".into()))?;
        let i = t[2].as_u64().ok_or_else(|| Error::Parse("bad column".into()))? as usize;
        out.push((c, d, i));
    }
    Ok(TermVector::new(out))
}

/// Canonical dump: window, depths, and the generators `t^{-delta_i} e_i`
/// followed by the reduced basis of `Y / Y_0`.
pub fn lattice_value<F: Field>(y: &Lattice<F>) -> Value {
    let w = y.window();
    json!({
        "n": y.n(),
        "window": [w.lo, w.hi],
        "delta": y.delta().0,
        "generators": y.generators().iter().map(term_vector_value).collect::<Vec<_>>(),
    })
}

/// Reads `{"n", "generators", ["window"], ["delta"]}`. A window fixes `hi`;
/// a `delta` entry is checked against the lattice.
pub fn lattice_from_value<F: Field>(v: &Value) -> Result<Lattice<F>> {
    let n = v["n"]
        .as_u64()
        .ok_or_else(|| Error::Parse("missing n".into()))? as usize;
    let gens = v["generators"]
        .as_array()
        .ok_or_else(|| Error::Parse("missing generators".into()))?
        .iter()
        .map(term_vector_from_value)
        .collect::<Result<Vec<TermVector<F>>>>()?;
    let hi = match &v["window"] {
        Value::Null => None,
        w => {
            let bounds: [i64; 2] = serde_json::from_value(w.clone()).map_err(parse_err)?;
            Some(bounds[1])
        }
    };
    let y = Lattice::from_generators(n, &gens, hi)?;
    if let Value::Array(_) = &v["delta"] {
        let delta: Vec<i64> = serde_json::from_value(v["delta"].clone()).map_err(parse_err)?;
        if delta != y.delta().0 {
            return Err(Error::Parse(format!(
                "delta {delta:?} does not match the generators ({})",
                y.delta()
            )));
        }
    }
    Ok(y)
}

pub fn lattice_to_json<F: Field>(y: &Lattice<F>) -> String {
    lattice_value(y).to_string()
}

pub fn lattice_from_json<F: Field>(s: &str) -> Result<Lattice<F>> {
    lattice_from_value(&serde_json::from_str(s).map_err(parse_err)?)
}

pub fn polytope_value(poly: &MvPolytope) -> Value {
    let vertices: serde_json::Map<String, Value> = poly
        .vertex_by_perm
        .iter()
        .map(|(w, v)| (w.key(), json!(v.0)))
        .collect();
    let facets: Vec<Value> = poly
        .facets
        .iter()
        .map(|(cols, c)| json!({"I": cols, "c": c}))
        .collect();
    json!({
        "n": poly.n,
        "lambda": poly.lambda.0,
        "vertices": poly.vertices.iter().map(|v| &v.0).collect::<Vec<_>>(),
        "vertex_by_perm": vertices,
        "facets": facets,
    })
}

/// Reads a polytope from its vertex map; vertices and facets are recomputed
/// and must match any listed ones.
pub fn polytope_from_value(v: &Value) -> Result<MvPolytope> {
    let n = v["n"]
        .as_u64()
        .ok_or_else(|| Error::Parse("missing n".into()))? as usize;
    let lambda = Coweight(serde_json::from_value(v["lambda"].clone()).map_err(parse_err)?);
    let map: BTreeMap<String, Vec<i64>> =
        serde_json::from_value(v["vertex_by_perm"].clone()).map_err(parse_err)?;
    let mut by_perm = BTreeMap::new();
    for (k, x) in map {
        by_perm.insert(Permutation::parse(&k)?, Coweight(x));
    }
    let poly = MvPolytope::from_vertex_map(n, lambda, by_perm)?;
    if let Value::Array(vs) = &v["vertices"] {
        let listed: Vec<Coweight> = vs
            .iter()
            .map(|x| serde_json::from_value(x.clone()).map(Coweight).map_err(parse_err))
            .collect::<Result<_>>()?;
        if listed != poly.vertices {
            return Err(Error::Parse("vertices do not match the vertex map".into()));
        }
    }
    if let Value::Array(fs) = &v["facets"] {
        let listed: BTreeMap<Vec<usize>, i64> = fs
            .iter()
            .map(|f| {
                let cols: Vec<usize> = serde_json::from_value(f["I"].clone()).map_err(parse_err)?;
                let b = f["c"].as_i64().ok_or_else(|| Error::Parse("bad bound".into()))?;
                Ok((cols, b))
            })
            .collect::<Result<_>>()?;
        if listed != poly.facets {
            return Err(Error::Parse("facets do not match the vertices".into()));
        }
    }
    Ok(poly)
}

pub fn polytope_to_json(poly: &MvPolytope) -> String {
    polytope_value(poly).to_string()
}

pub fn polytope_from_json(s: &str) -> Result<MvPolytope> {
    polytope_from_value(&serde_json::from_str(s).map_err(parse_err)?)
}

pub fn flag_point_value<F: Field>(pt: &FlagPoint<F>) -> Value {
    let coeffs: serde_json::Map<String, Value> = pt
        .coeffs
        .iter()
        .map(|(l, a)| (l.label(), Value::Array(a.iter().map(ratio_value).collect())))
        .collect();
    json!({ "coeffs": coeffs })
}

pub fn flag_point_from_value<F: Field>(p: &KostantPicture, v: &Value) -> Result<FlagPoint<F>> {
    let obj = v["coeffs"]
        .as_object()
        .ok_or_else(|| Error::Parse("missing coeffs".into()))?;
    let mut coeffs: HashMap<String, Vec<F>> = HashMap::new();
    for (k, a) in obj {
        let a = a
            .as_array()
            .ok_or_else(|| Error::Parse(format!("coefficients of {k} are not a list")))?
            .iter()
            .map(value_ratio)
            .collect::<Result<Vec<F>>>()?;
        coeffs.insert(k.clone(), a);
    }
    flag_point_from_labels(p, &coeffs)
}

pub fn trace_value(t: &CollapseTrace) -> Value {
    let steps: Vec<Value> = t
        .steps
        .iter()
        .zip(&t.order)
        .zip(&t.offsets)
        .map(|((s, label), h)| {
            json!({
                "column": label,
                "position": s.column,
                "offset": h,
                "removed": s.removed,
                "joins": s.joins.iter().map(|j| json!({
                    "loop": j.joined.label(),
                    "left": j.left.label(),
                    "right": j.right.label(),
                })).collect::<Vec<_>>(),
                "picture": picture_value(&s.picture),
            })
        })
        .collect();
    json!({
        "initial": picture_value(&t.initial),
        "order": t.order,
        "steps": steps,
    })
}
