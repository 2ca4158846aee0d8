//! JSON encoding of signature documents, equations, and the morphism DSL.
//!
//! Morphism expressions are nested arrays with a fixed tag vocabulary:
//! `id, comp, tau, opinj, proj, tuple, case, deriv, curry, uncurry, weaken,
//! sigma`.  Composition is applicative order: `["comp", f, g]` means
//! "g then f".  Output is canonical: object keys sorted, arrays
//! order-preserving, so serialization is byte-stable.

use serde_json::{json, Map, Value};

use crate::equation::{Equation, Orientation};
use crate::error::{Error, Result};
use crate::modcalc::{ModuleExpr, MorphismExpr};
use crate::model::EqVerdict;
use crate::rewrite::Regime;
use crate::signature::{AlgebraicSignature, TwoSignature};

/// A 2-signature plus its presentation metadata, as carried by a `.json`
/// signature document.
#[derive(Debug, Clone)]
pub struct SignatureDocument {
    pub two: TwoSignature,
    pub regime: Regime,
    pub fuel: usize,
}

pub const DEFAULT_FUEL: usize = 1000;

fn err(msg: impl Into<String>) -> Error {
    Error::Document(msg.into())
}

fn sub_signature(ambient: &AlgebraicSignature, names: &[Value]) -> Result<AlgebraicSignature> {
    AlgebraicSignature::new(
        names
            .iter()
            .map(|v| {
                let name = v
                    .as_str()
                    .ok_or_else(|| err("signature member name must be a string"))?;
                let decl = ambient
                    .op(name)
                    .ok_or_else(|| Error::UnknownOp(name.to_string()))?;
                Ok((decl.name.clone(), decl.arity.clone()))
            })
            .collect::<Result<Vec<_>>>()?,
    )
}

fn sig_to_json(sig: &AlgebraicSignature, ambient: &AlgebraicSignature) -> Value {
    if sig == ambient {
        Value::Null
    } else {
        Value::Array(sig.ops().iter().map(|o| json!(o.name)).collect())
    }
}

pub fn module_to_json(m: &ModuleExpr, ambient: &AlgebraicSignature) -> Value {
    match m {
        ModuleExpr::Theta => json!("theta"),
        ModuleExpr::Deriv(inner) => json!(["deriv", module_to_json(inner, ambient)]),
        ModuleExpr::Prod(ms) => json!([
            "prod",
            ms.iter().map(|x| module_to_json(x, ambient)).collect::<Vec<_>>()
        ]),
        ModuleExpr::Sig(sig) => match sig_to_json(sig, ambient) {
            Value::Null => json!(["sig"]),
            names => json!(["sig", names]),
        },
    }
}

pub fn module_from_json(v: &Value, ambient: &AlgebraicSignature) -> Result<ModuleExpr> {
    match v {
        Value::String(s) if s == "theta" => Ok(ModuleExpr::Theta),
        Value::Array(items) => {
            let tag = items
                .first()
                .and_then(Value::as_str)
                .ok_or_else(|| err("module expression tag must be a string"))?;
            match (tag, &items[1..]) {
                ("deriv", [inner]) => Ok(ModuleExpr::deriv(module_from_json(inner, ambient)?)),
                ("prod", [Value::Array(ms)]) => Ok(ModuleExpr::Prod(
                    ms.iter()
                        .map(|x| module_from_json(x, ambient))
                        .collect::<Result<Vec<_>>>()?,
                )),
                ("sig", []) => Ok(ModuleExpr::Sig(ambient.clone())),
                ("sig", [Value::Array(names)]) => {
                    Ok(ModuleExpr::Sig(sub_signature(ambient, names)?))
                }
                _ => Err(err(format!("malformed module expression: {v}"))),
            }
        }
        _ => Err(err(format!("malformed module expression: {v}"))),
    }
}

pub fn morphism_to_json(e: &MorphismExpr, ambient: &AlgebraicSignature) -> Value {
    match e {
        MorphismExpr::Id(m) => json!(["id", module_to_json(m, ambient)]),
        MorphismExpr::Comp(f, g) => json!([
            "comp",
            morphism_to_json(f, ambient),
            morphism_to_json(g, ambient)
        ]),
        MorphismExpr::Tau(sig) => match sig_to_json(sig, ambient) {
            Value::Null => json!(["tau"]),
            names => json!(["tau", names]),
        },
        MorphismExpr::OpInj { sig, op } => match sig_to_json(sig, ambient) {
            Value::Null => json!(["opinj", op]),
            names => json!(["opinj", names, op]),
        },
        MorphismExpr::Proj(i) => json!(["proj", i]),
        MorphismExpr::Tuple(fs) => json!([
            "tuple",
            fs.iter().map(|f| morphism_to_json(f, ambient)).collect::<Vec<_>>()
        ]),
        MorphismExpr::Case { sig, arms } => json!([
            "case",
            sig.ops()
                .iter()
                .zip(arms)
                .map(|(op, arm)| json!([op.name, morphism_to_json(arm, ambient)]))
                .collect::<Vec<_>>()
        ]),
        MorphismExpr::DerivM(f) => json!(["deriv", morphism_to_json(f, ambient)]),
        MorphismExpr::Curry(f) => json!(["curry", morphism_to_json(f, ambient)]),
        MorphismExpr::Uncurry(f) => json!(["uncurry", morphism_to_json(f, ambient)]),
        MorphismExpr::Weaken(m) => json!(["weaken", module_to_json(m, ambient)]),
        MorphismExpr::SigmaSubst => json!(["sigma"]),
    }
}

pub fn morphism_from_json(v: &Value, ambient: &AlgebraicSignature) -> Result<MorphismExpr> {
    let items = v
        .as_array()
        .ok_or_else(|| err(format!("morphism expression must be an array: {v}")))?;
    let tag = items
        .first()
        .and_then(Value::as_str)
        .ok_or_else(|| err("morphism expression tag must be a string"))?;
    let bad = || err(format!("malformed `{tag}` expression: {v}"));
    match (tag, &items[1..]) {
        ("id", [m]) => Ok(MorphismExpr::Id(module_from_json(m, ambient)?)),
        ("comp", [f, g]) => Ok(MorphismExpr::comp(
            morphism_from_json(f, ambient)?,
            morphism_from_json(g, ambient)?,
        )),
        ("tau", []) => Ok(MorphismExpr::Tau(ambient.clone())),
        ("tau", [Value::Array(names)]) => {
            Ok(MorphismExpr::Tau(sub_signature(ambient, names)?))
        }
        ("opinj", [Value::String(op)]) => Ok(MorphismExpr::OpInj {
            sig: ambient.clone(),
            op: op.clone(),
        }),
        ("opinj", [Value::Array(names), Value::String(op)]) => Ok(MorphismExpr::OpInj {
            sig: sub_signature(ambient, names)?,
            op: op.clone(),
        }),
        ("proj", [i]) => Ok(MorphismExpr::Proj(
            i.as_u64().ok_or_else(bad)? as usize
        )),
        ("tuple", [Value::Array(fs)]) => Ok(MorphismExpr::Tuple(
            fs.iter()
                .map(|f| morphism_from_json(f, ambient))
                .collect::<Result<Vec<_>>>()?,
        )),
        ("case", [Value::Array(pairs)]) => {
            let mut names = Vec::new();
            let mut arms = Vec::new();
            for pair in pairs {
                let entry = pair.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
                names.push(entry[0].clone());
                arms.push(morphism_from_json(&entry[1], ambient)?);
            }
            Ok(MorphismExpr::Case {
                sig: sub_signature(ambient, &names)?,
                arms,
            })
        }
        ("deriv", [f]) => Ok(MorphismExpr::DerivM(Box::new(morphism_from_json(
            f, ambient,
        )?))),
        ("curry", [f]) => Ok(MorphismExpr::curry(morphism_from_json(f, ambient)?)),
        ("uncurry", [f]) => Ok(MorphismExpr::uncurry(morphism_from_json(f, ambient)?)),
        ("weaken", [m]) => Ok(MorphismExpr::Weaken(module_from_json(m, ambient)?)),
        ("sigma", []) => Ok(MorphismExpr::SigmaSubst),
        _ => Err(bad()),
    }
}

fn orientation_str(o: Orientation) -> &'static str {
    match o {
        Orientation::LeftToRight => "lr",
        Orientation::RightToLeft => "rl",
        Orientation::Unoriented => "unoriented",
    }
}

fn orientation_from_str(s: &str) -> Result<Orientation> {
    match s {
        "lr" => Ok(Orientation::LeftToRight),
        "rl" => Ok(Orientation::RightToLeft),
        "unoriented" => Ok(Orientation::Unoriented),
        other => Err(err(format!("unknown orientation `{other}`"))),
    }
}

pub fn equation_to_json(eq: &Equation, ambient: &AlgebraicSignature) -> Value {
    json!({
        "name": eq.name,
        "source": module_to_json(&eq.source, ambient),
        "target": module_to_json(&eq.target, ambient),
        "lhs": morphism_to_json(&eq.lhs, ambient),
        "rhs": morphism_to_json(&eq.rhs, ambient),
        "orient": orientation_str(eq.orientation),
    })
}

pub fn equation_from_json(v: &Value, ambient: &AlgebraicSignature) -> Result<Equation> {
    let obj = v
        .as_object()
        .ok_or_else(|| err("equation must be an object"))?;
    let field = |k: &str| -> Result<&Value> {
        obj.get(k)
            .ok_or_else(|| err(format!("equation missing field `{k}`")))
    };
    Equation::new(
        field("name")?
            .as_str()
            .ok_or_else(|| err("equation name must be a string"))?,
        module_from_json(field("source")?, ambient)?,
        module_from_json(field("target")?, ambient)?,
        morphism_from_json(field("lhs")?, ambient)?,
        morphism_from_json(field("rhs")?, ambient)?,
        orientation_from_str(
            field("orient")?
                .as_str()
                .ok_or_else(|| err("orientation must be a string"))?,
        )?,
        ambient,
    )
}

fn regime_str(r: Regime) -> &'static str {
    match r {
        Regime::Terminating => "terminating",
        Regime::Confluent => "confluent",
        Regime::Unoriented => "unoriented",
    }
}

fn regime_from_str(s: &str) -> Result<Regime> {
    match s {
        "terminating" => Ok(Regime::Terminating),
        "confluent" => Ok(Regime::Confluent),
        "unoriented" => Ok(Regime::Unoriented),
        other => Err(err(format!("unknown regime `{other}`"))),
    }
}

pub fn verdict_str(v: EqVerdict) -> &'static str {
    match v {
        EqVerdict::Equal => "equal",
        EqVerdict::Distinct => "distinct",
        EqVerdict::Unknown => "unknown",
    }
}

pub fn document_to_json(doc: &SignatureDocument) -> Value {
    let sig = &doc.two.sig;
    let mut obj = Map::new();
    obj.insert(
        "ops".into(),
        Value::Array(
            sig.ops()
                .iter()
                .map(|o| json!({"name": o.name, "arity": o.arity.entries()}))
                .collect(),
        ),
    );
    obj.insert(
        "equations".into(),
        Value::Array(
            doc.two
                .equations
                .iter()
                .map(|eq| equation_to_json(eq, sig))
                .collect(),
        ),
    );
    obj.insert("regime".into(), json!(regime_str(doc.regime)));
    obj.insert("fuel".into(), json!(doc.fuel));
    Value::Object(obj)
}

pub fn document_from_json(v: &Value) -> Result<SignatureDocument> {
    let obj = v
        .as_object()
        .ok_or_else(|| err("signature document must be an object"))?;
    let ops = obj
        .get("ops")
        .and_then(Value::as_array)
        .ok_or_else(|| err("signature document needs an `ops` array"))?;
    let sig = AlgebraicSignature::new(
        ops.iter()
            .map(|o| {
                let entry = o.as_object().ok_or_else(|| err("op entry must be an object"))?;
                let name = entry
                    .get("name")
                    .and_then(Value::as_str)
                    .ok_or_else(|| err("op needs a string `name`"))?;
                let arity: Vec<usize> = entry
                    .get("arity")
                    .and_then(Value::as_array)
                    .ok_or_else(|| err("op needs an `arity` array"))?
                    .iter()
                    .map(|n| {
                        n.as_u64()
                            .map(|n| n as usize)
                            .ok_or_else(|| err("arity entries must be naturals"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((name.to_string(), arity.into()))
            })
            .collect::<Result<Vec<_>>>()?,
    )?;
    let equations = match obj.get("equations") {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(eqs)) => eqs
            .iter()
            .map(|e| equation_from_json(e, &sig))
            .collect::<Result<Vec<_>>>()?,
        Some(_) => return Err(err("`equations` must be an array")),
    };
    let regime = match obj.get("regime") {
        None | Some(Value::Null) => Regime::Confluent,
        Some(Value::String(s)) => regime_from_str(s)?,
        Some(_) => return Err(err("`regime` must be a string")),
    };
    let fuel = match obj.get("fuel") {
        None | Some(Value::Null) => DEFAULT_FUEL,
        Some(n) => n
            .as_u64()
            .map(|n| n as usize)
            .ok_or_else(|| err("`fuel` must be a natural"))?,
    };
    Ok(SignatureDocument {
        two: TwoSignature::new(sig, equations)?,
        regime,
        fuel,
    })
}

/// Canonical serialization: sorted keys (the default map is ordered),
/// two-space indentation, trailing newline.
pub fn to_canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

pub fn parse_document(text: &str) -> Result<SignatureDocument> {
    let v: Value =
        serde_json::from_str(text).map_err(|e| err(format!("invalid JSON: {e}")))?;
    document_from_json(&v)
}
