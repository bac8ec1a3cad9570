//! Canonical JSON encoding and pointer-tracking decoding.
//!
//! Exact rationals are strings `"p/q"`, complex numbers are
//! `{"re": .., "im": ..}` and object keys are always sorted.

use num_complex::Complex64;
use serde_json::{json, Map, Value};
use thiserror::Error;

use zastava::polyalg::RatPoly;
use zastava::rootdata::{ColoredDivisor, Coweight, RootSystem, RootSystemSpec};
use zastava::scalar::{fmt_rational, parse_rational, Rational, Scalar};
use zastava::superpotential::{SuperParams, Variant};
use zastava::zastava::{Coord, SL2Map, ZastavaPoint};

/// A schema violation at a JSON pointer.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{pointer}: {message}")]
pub struct DecodeError {
    pub pointer: String,
    pub message: String,
}

/// A value together with its JSON pointer.
#[derive(Clone, Copy)]
pub struct At<'a> {
    pub value: &'a Value,
    ptr: &'a str,
}

/// Owned pointer storage so that `At` can borrow child pointers.
pub struct Cursor {
    value: Value,
}

impl Cursor {
    pub fn new(value: Value) -> Self {
        Cursor { value }
    }

    pub fn root(&self) -> At<'_> {
        At {
            value: &self.value,
            ptr: "",
        }
    }
}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

pub type DResult<T> = Result<T, DecodeError>;

impl<'a> At<'a> {
    pub fn pointer(&self) -> String {
        if self.ptr.is_empty() {
            "/".to_string()
        } else {
            self.ptr.to_string()
        }
    }

    pub fn err<T>(&self, message: impl Into<String>) -> DResult<T> {
        Err(DecodeError {
            pointer: self.pointer(),
            message: message.into(),
        })
    }

    fn child<R>(&self, value: &Value, seg: &str, f: impl FnOnce(At<'_>) -> DResult<R>) -> DResult<R> {
        let ptr = format!("{}/{}", self.ptr, escape(seg));
        f(At { value, ptr: &ptr })
    }

    pub fn object(&self) -> DResult<&'a Map<String, Value>> {
        self.value.as_object().map_or_else(|| self.err("expected an object"), Ok)
    }

    pub fn array(&self) -> DResult<&'a Vec<Value>> {
        self.value.as_array().map_or_else(|| self.err("expected an array"), Ok)
    }

    pub fn has(&self, key: &str) -> bool {
        self.value.get(key).is_some_and(|v| !v.is_null())
    }

    /// Decodes a required field.
    pub fn field<R>(&self, key: &str, f: impl FnOnce(At<'_>) -> DResult<R>) -> DResult<R> {
        let obj = self.object()?;
        match obj.get(key) {
            Some(v) => self.child(v, key, f),
            None => self.err(format!("missing field {key:?}")),
        }
    }

    /// Decodes an optional field; `null` counts as absent.
    pub fn opt_field<R>(&self, key: &str, f: impl FnOnce(At<'_>) -> DResult<R>) -> DResult<Option<R>> {
        let obj = self.object()?;
        match obj.get(key) {
            Some(Value::Null) | None => Ok(None),
            Some(v) => self.child(v, key, f).map(Some),
        }
    }

    pub fn list<R>(&self, mut f: impl FnMut(At<'_>) -> DResult<R>) -> DResult<Vec<R>> {
        self.array()?
            .iter()
            .enumerate()
            .map(|(k, v)| self.child(v, &k.to_string(), &mut f))
            .collect()
    }

    pub fn str(&self) -> DResult<&'a str> {
        self.value.as_str().map_or_else(|| self.err("expected a string"), Ok)
    }

    pub fn i64(&self) -> DResult<i64> {
        self.value.as_i64().map_or_else(|| self.err("expected an integer"), Ok)
    }

    pub fn usize(&self) -> DResult<usize> {
        self.value
            .as_u64()
            .map_or_else(|| self.err("expected a non-negative integer"), |v| Ok(v as usize))
    }

    pub fn f64(&self) -> DResult<f64> {
        match self.value {
            Value::Number(n) => n.as_f64().map_or_else(|| self.err("expected a number"), Ok),
            Value::String(s) => match parse_rational(s) {
                Ok(q) => Ok(q.to_complex().re),
                Err(e) => self.err(e.to_string()),
            },
            _ => self.err("expected a number"),
        }
    }

    pub fn rational(&self) -> DResult<Rational> {
        match self.value {
            Value::String(s) => parse_rational(s).or_else(|e| self.err(e.to_string())),
            Value::Number(n) if n.is_i64() => Ok(Rational::from_i64(n.as_i64().expect("checked"))),
            _ => self.err("expected a rational string \"p/q\""),
        }
    }

    pub fn complex(&self) -> DResult<Complex64> {
        match self.value {
            Value::Object(_) => Ok(Complex64::new(
                self.field("re", |a| a.f64())?,
                self.opt_field("im", |a| a.f64())?.unwrap_or(0.0),
            )),
            _ => Ok(Complex64::new(self.f64()?, 0.0)),
        }
    }
}

/// Scalars with a JSON representation.
pub trait JsonScalar: Scalar {
    fn encode(&self) -> Value;
    fn decode(at: At<'_>) -> DResult<Self>;
}

impl JsonScalar for Rational {
    fn encode(&self) -> Value {
        Value::String(fmt_rational(self))
    }

    fn decode(at: At<'_>) -> DResult<Self> {
        at.rational()
    }
}

/// Non-finite floats have no JSON number form and are written as strings.
pub fn encode_f64(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::String(x.to_string())
    }
}

impl JsonScalar for Complex64 {
    fn encode(&self) -> Value {
        json!({ "re": encode_f64(self.re), "im": encode_f64(self.im) })
    }

    fn decode(at: At<'_>) -> DResult<Self> {
        at.complex()
    }
}

pub fn encode_vec<S: JsonScalar>(v: &[S]) -> Value {
    Value::Array(v.iter().map(JsonScalar::encode).collect())
}

pub fn encode_matrix<S: JsonScalar>(m: &[Vec<S>]) -> Value {
    Value::Array(m.iter().map(|row| encode_vec(row)).collect())
}

pub fn encode_poly<S: JsonScalar>(p: &RatPoly<S>) -> Value {
    json!({ "domain": S::DOMAIN, "coeffs": encode_vec(p.coeffs()) })
}

/// Accepts `{"domain":..,"coeffs":[..]}` or a bare coefficient array.
pub fn decode_poly<S: JsonScalar>(at: At<'_>) -> DResult<RatPoly<S>> {
    let coeffs = if at.value.is_object() {
        at.field("coeffs", |a| a.list(S::decode))?
    } else {
        at.list(S::decode)?
    };
    Ok(RatPoly::new(coeffs))
}

pub fn encode_root_system(rs: &RootSystem) -> Value {
    match rs.name() {
        Some(name) => json!({ "type": name }),
        None => json!({ "cartan": rs.cartan() }),
    }
}

pub fn decode_root_system(at: At<'_>) -> DResult<RootSystem> {
    let spec = if let Value::String(s) = at.value {
        RootSystemSpec::Named(s.clone())
    } else if at.has("type") {
        RootSystemSpec::Named(at.field("type", |a| a.str().map(str::to_string))?)
    } else if at.has("cartan") {
        RootSystemSpec::Cartan(at.field("cartan", |a| a.list(|row| row.list(|x| x.i64())))?)
    } else {
        return at.err("expected {\"type\": ..} or {\"cartan\": [[..]]}");
    };
    RootSystem::build(&spec).or_else(|e| at.err(format!("{}: {e}", e.name())))
}

pub fn encode_coweight(c: &Coweight) -> Value {
    json!(c.pairings)
}

pub fn decode_coweight(at: At<'_>) -> DResult<Coweight> {
    Ok(Coweight::new(at.list(|a| a.i64())?))
}

pub fn encode_divisor<S: JsonScalar>(d: &ColoredDivisor<S>) -> Value {
    Value::Array(
        d.entries()
            .iter()
            .map(|(p, c)| json!({ "point": p.encode(), "color": c }))
            .collect(),
    )
}

pub fn encode_point<S: JsonScalar>(p: &ZastavaPoint<S>) -> Value {
    let mut points = Map::new();
    for (i, node) in p.nodes().iter().enumerate() {
        let coords = node
            .iter()
            .map(|c| json!({ "w": c.w.encode(), "y": c.y.encode() }))
            .collect();
        points.insert(i.to_string(), Value::Array(coords));
    }
    json!({ "root_system": encode_root_system(p.root_system()), "points": points })
}

/// `{"root_system":..,"points":{"0":[{"w":..,"y":..}],..}}`; `fallback`
/// supplies the root system when the field is absent. Missing node keys
/// denote empty nodes.
pub fn decode_point<S: JsonScalar>(at: At<'_>, fallback: Option<&RootSystem>) -> DResult<ZastavaPoint<S>> {
    let rs = match (at.opt_field("root_system", decode_root_system)?, fallback) {
        (Some(rs), _) => rs,
        (None, Some(rs)) => rs.clone(),
        (None, None) => return at.err("missing field \"root_system\" (or pass --rs)"),
    };
    let nodes = at.field("points", |pts| {
        let obj = pts.object()?;
        let mut nodes: Vec<Vec<Coord<S>>> = vec![Vec::new(); rs.rank()];
        for key in obj.keys() {
            let i: usize = match key.parse() {
                Ok(i) if i < rs.rank() => i,
                _ => {
                    return pts.field(key, |a| {
                        a.err(format!("node key must be an index below {}", rs.rank()))
                    })
                }
            };
            nodes[i] = pts.field(key, |node| {
                node.list(|c| Ok(Coord::new(c.field("w", S::decode)?, c.field("y", S::decode)?)))
            })?;
        }
        Ok(nodes)
    })?;
    ZastavaPoint::new(rs, nodes).or_else(|e| at.err(format!("{}: {e}", e.name())))
}

pub fn encode_map<S: JsonScalar>(m: &SL2Map<S>) -> Value {
    json!({ "Q": encode_vec(m.q.coeffs()), "R": encode_vec(m.r.coeffs()) })
}

pub fn decode_map<S: JsonScalar>(at: At<'_>) -> DResult<SL2Map<S>> {
    let q = at.field("Q", decode_poly::<S>)?;
    let r = at.field("R", decode_poly::<S>)?;
    SL2Map::new(q, r).or_else(|e| at.err(format!("{}: {e}", e.name())))
}

pub fn decode_variant(at: At<'_>) -> DResult<Variant> {
    at.str()?.parse().or_else(|e: String| at.err(e))
}

/// Superpotential parameters:
/// `{"root_system","alpha","lambdas","z","h_alpha","h_lambda"?,"kappa"?,"variant"?}`.
pub fn decode_super_params(at: At<'_>, fallback: Option<&RootSystem>) -> DResult<SuperParams<Complex64>> {
    let rs = match (at.opt_field("root_system", decode_root_system)?, fallback) {
        (Some(rs), _) => rs,
        (None, Some(rs)) => rs.clone(),
        (None, None) => return at.err("missing field \"root_system\" (or pass --rs)"),
    };
    let alpha = at.field("alpha", |a| a.list(|x| x.usize()))?;
    let lambdas = at.opt_field("lambdas", |a| a.list(decode_coweight))?.unwrap_or_default();
    let z = at.opt_field("z", |a| a.list(|x| x.complex()))?.unwrap_or_default();
    let h_alpha = match at.opt_field("h_alpha", |a| a.list(|x| x.complex()))? {
        Some(h) => h,
        None => vec![Complex64::new(0.0, 0.0); rs.rank()],
    };
    let h_lambda = at.opt_field("h_lambda", |a| a.list(|x| x.complex()))?;
    let kappa = at.opt_field("kappa", |a| a.complex())?.unwrap_or(Complex64::new(1.0, 0.0));
    let variant = at.opt_field("variant", decode_variant)?.unwrap_or_default();
    SuperParams::new(rs, alpha, lambdas, z, h_alpha, h_lambda, kappa, variant)
        .or_else(|e| at.err(format!("{}: {e}", e.name())))
}

pub fn encode_super_params(p: &SuperParams<Complex64>) -> Value {
    json!({
        "root_system": encode_root_system(&p.rs),
        "alpha": p.alpha,
        "lambdas": p.lambdas.iter().map(encode_coweight).collect::<Vec<_>>(),
        "z": encode_vec(&p.z),
        "h_alpha": encode_vec(&p.h_alpha),
        "h_lambda": encode_vec(&p.h_lambda),
        "kappa": p.kappa.encode(),
        "variant": p.variant.to_string(),
    })
}

/// Canonical text: sorted keys, two-space indentation, trailing newline.
pub fn to_canonical(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values are serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use zastava::scalar::{int, rat};

    fn decode<T>(text: &str, f: impl FnOnce(At<'_>) -> DResult<T>) -> DResult<T> {
        let c = Cursor::new(serde_json::from_str(text).unwrap());
        f(c.root())
    }

    #[test]
    fn point_round_trip() {
        let text = r#"{"root_system":{"type":"A1"},"points":{"0":[{"w":"1/1","y":"2/1"},{"w":"0/1","y":"1/1"}]}}"#;
        let p: ZastavaPoint<Rational> = decode(text, |a| decode_point(a, None)).unwrap();
        assert_eq!(p.node(0)[0].w, int(0));
        let v = encode_point(&p);
        let again: ZastavaPoint<Rational> =
            decode(&v.to_string(), |a| decode_point(a, None)).unwrap();
        assert_eq!(again, p);
        assert_eq!(to_canonical(&v), to_canonical(&encode_point(&again)));
    }

    #[test]
    fn errors_carry_pointers() {
        let text = r#"{"root_system":{"type":"A1"},"points":{"0":[{"w":"1/0","y":"2/1"}]}}"#;
        let e = decode(text, |a| decode_point::<Rational>(a, None)).unwrap_err();
        assert_eq!(e.pointer, "/points/0/0/w");
        assert!(e.message.contains("zero denominator"));
        let e = decode(r#"{"points":{}}"#, |a| decode_point::<Rational>(a, None)).unwrap_err();
        assert_eq!(e.pointer, "/");
        let e = decode(r#"{"type":"Z9"}"#, decode_root_system).unwrap_err();
        assert!(e.message.starts_with("UnknownType"));
    }

    #[test]
    fn scalars() {
        assert_eq!(rat(-2, 4).encode(), json!("-1/2"));
        assert_eq!(decode("\"3\"", |a| a.rational()).unwrap(), int(3));
        assert_eq!(
            decode(r#"{"re":1.5,"im":"1/2"}"#, |a| a.complex()).unwrap(),
            Complex64::new(1.5, 0.5)
        );
        assert_eq!(decode("2", |a| a.complex()).unwrap(), Complex64::new(2.0, 0.0));
    }

    #[test]
    fn map_and_params() {
        let m: SL2Map<Rational> =
            decode(r#"{"Q":["0/1","-1/1","1/1"],"R":["1/1","1/1"]}"#, decode_map).unwrap();
        assert_eq!(encode_map(&m), json!({"Q":["0/1","-1/1","1/1"],"R":["1/1","1/1"]}));
        let text = r#"{"root_system":"A1","alpha":[1],"lambdas":[[2]],"z":[0],"h_alpha":[0.5],"variant":"(+,+)"}"#;
        let p = decode(text, |a| decode_super_params(a, None)).unwrap();
        assert_eq!(p.variant, Variant::PLUS_PLUS);
        assert_eq!(p.h_lambda, vec![Complex64::new(0.5, 0.0)]);
    }
}
