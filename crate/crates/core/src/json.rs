//! Versioned JSON documents for signatures, quantales, schemas, theories,
//! structures and morphisms. Every top-level document carries `"format": 1`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::formula::{HornFormula, Variable};
use crate::quantale::{theory_met, theory_pmet, theory_vcat, theory_vgph, theory_vrgph, Quantale};
use crate::schema::{AxiomSchema, Sigma};
use crate::signature::{RelationSymbol, Signature, SignatureOrder};
use crate::structure::{Edge, Element, Morphism, Structure};
use crate::theory::Theory;

pub const FORMAT: u64 = 1;

/// Parses JSON text, reporting the line and column of syntax errors.
pub fn parse_text(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        position: e.column(),
        message: format!("line {}: {e}", e.line()),
    })
}

fn decode<T: for<'de> Deserialize<'de>>(what: &str, v: &Value) -> Result<T> {
    T::deserialize(v).map_err(|e| Error::Document(format!("{what}: {e}")))
}

fn encode<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("documents serialize")
}

fn check_format(what: &str, v: &Value) -> Result<()> {
    match v.get("format") {
        Some(Value::Number(n)) if n.as_u64() == Some(FORMAT) => Ok(()),
        Some(other) => Err(Error::Document(format!("{what}: unsupported format {other}"))),
        None => Err(Error::Document(format!("{what}: missing \"format\": {FORMAT}"))),
    }
}

/// Removes `format` from a top-level document before decoding its body.
fn body(what: &str, v: &Value) -> Result<Value> {
    check_format(what, v)?;
    let mut v = v.clone();
    if let Value::Object(m) = &mut v {
        m.remove("format");
    }
    Ok(v)
}

fn with_format(mut v: Value) -> Value {
    if let Value::Object(m) = &mut v {
        let mut out = serde_json::Map::new();
        out.insert("format".into(), Value::from(FORMAT));
        out.append(m);
        return Value::Object(out);
    }
    v
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuantaleDoc {
    #[serde(default = "default_quantale_name")]
    name: String,
    elements: Vec<String>,
    leq: Vec<(String, String)>,
    tensor: BTreeMap<String, String>,
    unit: String,
}

fn default_quantale_name() -> String {
    "quantale".into()
}

fn quantale_doc(q: &Quantale) -> QuantaleDoc {
    let e = q.elements();
    let n = e.len();
    let mut leq = Vec::new();
    let mut tensor = BTreeMap::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && q.leq(a, b) {
                leq.push((e[a].clone(), e[b].clone()));
            }
            tensor.insert(format!("{},{}", e[a], e[b]), e[q.tensor(a, b)].clone());
        }
    }
    QuantaleDoc {
        name: q.name().to_string(),
        elements: e.to_vec(),
        leq,
        tensor,
        unit: e[q.unit()].clone(),
    }
}

fn quantale_from_doc(d: QuantaleDoc) -> Result<Quantale> {
    let n = d.elements.len();
    let idx = |s: &str| -> Result<usize> {
        d.elements
            .iter()
            .position(|e| e == s)
            .ok_or_else(|| Error::InvalidQuantale(format!("unknown element `{s}`")))
    };
    let mut leq = vec![vec![false; n]; n];
    for (a, b) in &d.leq {
        leq[idx(a)?][idx(b)?] = true;
    }
    let mut tensor = vec![vec![0; n]; n];
    for (a, ea) in d.elements.iter().enumerate() {
        for (b, eb) in d.elements.iter().enumerate() {
            let key = format!("{ea},{eb}");
            let v = d
                .tensor
                .get(&key)
                .ok_or_else(|| Error::InvalidQuantale(format!("tensor has no entry for \"{key}\"")))?;
            tensor[a][b] = idx(v)?;
        }
    }
    if d.tensor.len() != n * n {
        return Err(Error::InvalidQuantale("tensor has entries for unknown pairs".into()));
    }
    Quantale::from_tables(d.name, d.elements.clone(), leq, tensor, idx(&d.unit)?)
}

/// A quantale body, or the name of a builtin. Laws are not checked here.
fn quantale_from_body(v: &Value) -> Result<Quantale> {
    match v {
        Value::String(name) => {
            Quantale::builtin(name).ok_or_else(|| Error::Document(format!("unknown builtin quantale `{name}`")))
        }
        _ => quantale_from_doc(decode("quantale", v)?),
    }
}

pub fn quantale_to_value(q: &Quantale) -> Value {
    with_format(encode(&quantale_doc(q)))
}

/// Reads a quantale document without checking the quantale laws, so that a
/// law report can be produced for it.
pub fn quantale_from_value(v: &Value) -> Result<Quantale> {
    quantale_from_body(&body("quantale", v)?)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SymbolDoc {
    name: String,
    arity: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum OrderDoc {
    Discrete,
    Explicit(Vec<(String, String)>),
    Quantale(Value),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SignatureDoc {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    symbols: Vec<SymbolDoc>,
    order: OrderDoc,
}

fn signature_doc(sig: &Signature) -> SignatureDoc {
    let symbols = || {
        sig.symbols()
            .iter()
            .map(|s| SymbolDoc {
                name: s.name.clone(),
                arity: s.arity,
            })
            .collect()
    };
    match sig.order() {
        SignatureOrder::Discrete => SignatureDoc {
            symbols: symbols(),
            order: OrderDoc::Discrete,
        },
        SignatureOrder::Explicit(pairs) => SignatureDoc {
            symbols: symbols(),
            order: OrderDoc::Explicit(pairs.clone()),
        },
        SignatureOrder::QuantaleInduced(q) => SignatureDoc {
            symbols: vec![],
            order: OrderDoc::Quantale(encode(&quantale_doc(q))),
        },
    }
}

fn signature_from_body(v: &Value) -> Result<Arc<Signature>> {
    let d: SignatureDoc = decode("signature", v)?;
    let symbols = || {
        d.symbols
            .iter()
            .map(|s| RelationSymbol::new(&s.name, s.arity))
            .collect()
    };
    let sig = match &d.order {
        OrderDoc::Discrete => Signature::discrete(symbols())?,
        OrderDoc::Explicit(pairs) => Signature::new(symbols(), SignatureOrder::Explicit(pairs.clone()))?,
        OrderDoc::Quantale(q) => {
            if !d.symbols.is_empty() {
                return Err(Error::Document(
                    "signature: quantale-induced symbols are implied by the quantale".into(),
                ));
            }
            let q = quantale_from_body(q)?;
            q.require_laws()?;
            Signature::from_quantale(Arc::new(q))
        }
    };
    Ok(Arc::new(sig))
}

pub fn signature_to_value(sig: &Signature) -> Value {
    with_format(encode(&signature_doc(sig)))
}

pub fn signature_from_value(v: &Value) -> Result<Arc<Signature>> {
    signature_from_body(&body("signature", v)?)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShapeDoc {
    name: String,
    arity: usize,
    premises: Vec<Vec<String>>,
    conclusion: Vec<String>,
    #[serde(default = "yes")]
    monotone: bool,
}

fn yes() -> bool {
    true
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum CustomSchemaDoc {
    Tensor(ShapeDoc),
    Projection {
        #[serde(flatten)]
        shape: ShapeDoc,
        index: usize,
    },
    Constant {
        #[serde(flatten)]
        shape: ShapeDoc,
        symbol: String,
    },
    /// Keys are comma-joined premise labels in premise order.
    Table {
        #[serde(flatten)]
        shape: ShapeDoc,
        entries: BTreeMap<String, String>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SchemaBody {
    Builtin(String),
    Custom(CustomSchemaDoc),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemaDoc {
    schema: SchemaBody,
}

fn vars(names: &[String]) -> Vec<Variable> {
    names.iter().map(Variable::new).collect()
}

fn names(vars: &[Variable]) -> Vec<String> {
    vars.iter().map(|v| v.0.clone()).collect()
}

fn schema_doc(s: &AxiomSchema) -> SchemaDoc {
    if AxiomSchema::builtin(&s.name).as_ref() == Some(s) {
        return SchemaDoc {
            schema: SchemaBody::Builtin(s.name.clone()),
        };
    }
    let shape = ShapeDoc {
        name: s.name.clone(),
        arity: s.arity,
        premises: s.premises.iter().map(|p| names(p)).collect(),
        conclusion: names(&s.conclusion),
        monotone: s.monotone,
    };
    let custom = match &s.sigma {
        Sigma::TensorComposite => CustomSchemaDoc::Tensor(shape),
        Sigma::Projection(index) => CustomSchemaDoc::Projection { shape, index: *index },
        Sigma::Constant(symbol) => CustomSchemaDoc::Constant {
            shape,
            symbol: symbol.clone(),
        },
        Sigma::Table(t) => CustomSchemaDoc::Table {
            shape,
            entries: t.iter().map(|(k, v)| (k.join(","), v.clone())).collect(),
        },
    };
    SchemaDoc {
        schema: SchemaBody::Custom(custom),
    }
}

fn schema_from_doc(d: SchemaDoc) -> Result<AxiomSchema> {
    let custom = match d.schema {
        SchemaBody::Builtin(name) => {
            return AxiomSchema::builtin(&name)
                .ok_or_else(|| Error::InvalidSchema(format!("unknown builtin schema `{name}`")))
        }
        SchemaBody::Custom(c) => c,
    };
    let (shape, sigma) = match custom {
        CustomSchemaDoc::Tensor(shape) => (shape, Sigma::TensorComposite),
        CustomSchemaDoc::Projection { shape, index } => (shape, Sigma::Projection(index)),
        CustomSchemaDoc::Constant { shape, symbol } => (shape, Sigma::Constant(symbol)),
        CustomSchemaDoc::Table { shape, entries } => {
            let table = entries
                .into_iter()
                .map(|(k, v)| (k.split(',').map(str::to_string).collect(), v))
                .collect();
            (shape, Sigma::Table(table))
        }
    };
    Ok(AxiomSchema {
        name: shape.name,
        arity: shape.arity,
        premises: shape.premises.iter().map(|p| vars(p)).collect(),
        conclusion: vars(&shape.conclusion),
        sigma,
        monotone: shape.monotone,
    })
}

pub fn schema_to_value(s: &AxiomSchema) -> Value {
    encode(&schema_doc(s))
}

pub fn schema_from_value(v: &Value) -> Result<AxiomSchema> {
    schema_from_doc(decode("schema", v)?)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TheoryDoc {
    name: String,
    signature: Value,
    #[serde(default)]
    base: bool,
    #[serde(default)]
    axioms: Vec<String>,
    #[serde(default)]
    schemas: Vec<Value>,
}

/// `{"generator": "vcat", "quantale": ...}` builds one of the quantale theories.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratedDoc {
    generator: String,
    quantale: Value,
    #[serde(default)]
    name: Option<String>,
}

pub fn theory_to_value(t: &Theory) -> Value {
    let doc = TheoryDoc {
        name: t.name().to_string(),
        signature: encode(&signature_doc(t.signature())),
        base: t.has_base(),
        axioms: t.axioms().iter().map(|a| a.to_string()).collect(),
        schemas: t.schemas().iter().map(schema_to_value).collect(),
    };
    with_format(encode(&doc))
}

pub fn theory_from_value(v: &Value) -> Result<Theory> {
    let v = body("theory", v)?;
    if v.get("generator").is_some() {
        let g: GeneratedDoc = decode("theory", &v)?;
        let q = Arc::new(quantale_from_body(&g.quantale)?);
        let t = match g.generator.as_str() {
            "vgph" => theory_vgph(&q)?,
            "vrgph" => theory_vrgph(&q)?,
            "vcat" => theory_vcat(&q)?,
            "pmet" => theory_pmet(&q)?,
            "met" => theory_met(&q)?,
            other => return Err(Error::Document(format!("theory: unknown generator `{other}`"))),
        };
        return Ok(match g.name {
            Some(n) => t.with_name(n),
            None => t,
        });
    }
    let d: TheoryDoc = decode("theory", &v)?;
    let sig = signature_from_body(&d.signature)?;
    let axioms = d
        .axioms
        .iter()
        .map(|a| a.parse::<HornFormula>())
        .collect::<Result<Vec<_>>>()?;
    let schemas = d.schemas.iter().map(schema_from_value).collect::<Result<Vec<_>>>()?;
    Theory::new(d.name, sig, axioms, schemas, d.base)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StructureDoc {
    carrier: Vec<String>,
    /// `[symbol, arg1, …, argn]`.
    edges: Vec<Vec<String>>,
}

fn structure_doc(x: &Structure) -> StructureDoc {
    StructureDoc {
        carrier: x.carrier().to_vec(),
        edges: x
            .edges()
            .map(|e| {
                std::iter::once(x.signature().name(e.symbol).to_string())
                    .chain(e.tuple.iter().map(|&a| x.name(a).to_string()))
                    .collect()
            })
            .collect(),
    }
}

fn structure_from_doc(d: StructureDoc, sig: &Arc<Signature>) -> Result<Structure> {
    let lookup = |name: &str| -> Result<Element> {
        d.carrier
            .iter()
            .position(|c| c == name)
            .map(|i| Element(i as u32))
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    };
    let mut edges = Vec::with_capacity(d.edges.len());
    for e in &d.edges {
        let (sym, args) = e
            .split_first()
            .ok_or_else(|| Error::Document("structure: empty edge".into()))?;
        let symbol = sig.resolve(sym)?;
        let tuple = args.iter().map(|a| lookup(a)).collect::<Result<Vec<_>>>()?;
        edges.push(Edge { symbol, tuple });
    }
    Structure::new(sig.clone(), d.carrier, edges)
}

pub fn structure_to_value(x: &Structure) -> Value {
    with_format(encode(&structure_doc(x)))
}

/// Reads a structure over `sig` (usually the signature of the theory in use).
pub fn structure_from_value(v: &Value, sig: &Arc<Signature>) -> Result<Structure> {
    structure_from_doc(decode("structure", &body("structure", v)?)?, sig)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MorphismDoc {
    source: StructureDoc,
    target: StructureDoc,
    map: BTreeMap<String, String>,
}

pub fn morphism_to_value(f: &Morphism) -> Value {
    let doc = MorphismDoc {
        source: structure_doc(f.source()),
        target: structure_doc(f.target()),
        map: f.map_string().into_iter().collect(),
    };
    with_format(encode(&doc))
}

/// Reads a morphism; the map must be total but need not preserve edges.
pub fn morphism_from_value(v: &Value, sig: &Arc<Signature>) -> Result<Morphism> {
    let d: MorphismDoc = decode("morphism", &body("morphism", v)?)?;
    let x = Arc::new(structure_from_doc(d.source, sig)?);
    let y = Arc::new(structure_from_doc(d.target, sig)?);
    if let Some(extra) = d.map.keys().find(|k| x.element(k).is_none()) {
        return Err(Error::UnknownElement(extra.clone()));
    }
    let pairs: Vec<(&str, &str)> = d.map.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    Morphism::from_names(x, y, &pairs)
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}
