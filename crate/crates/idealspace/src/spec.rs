//! Relation-spec files.
//!
//! A spec file is a JSON document. Either the whole document is a relation
//! node, or it is an object with a `relation` node and optionally a `code`
//! node (for `morcheck`):
//!
//! ```json
//! {"finite": {"carrier": [0, 1], "pairs": [[0, 0], [0, 1], [1, 1]]}}
//! {"catalog": {"name": "rationals", "params": {"coding": "dyadic"}}}
//! {"closure": NODE}             transitive closure
//! {"reflexive-closure": NODE}   reflexive transitive closure
//! {"strictify": NODE}
//! {"po-repair": NODE}
//! {"product": [NODE, NODE]}
//! {"coproduct": [NODE, NODE]}
//! {"extend": {"base": NODE, "u": SET}}  or  {"extend": {"base": NODE, "family": [SET, ...]}}
//! {"engine": NODE}              the output relation of the interpolation engine
//! ```
//!
//! A `SET` is a list of naturals or one of `"all"`, `"evens"`, `"odds"`.
//! Code nodes:
//!
//! ```json
//! {"identity": NODE}
//! {"compose": [CODE, CODE]}
//! {"graph": {"map": [[x, y], ...], "source": NODE, "target": NODE}}
//! {"pairs": {"relation": NODE, "source": NODE, "target": NODE}}
//! {"projection": {"left": NODE, "right": NODE, "side": "left"}}
//! {"injection": {"left": NODE, "right": NODE, "side": "right"}}
//! ```
//!
//! Errors carry a JSON pointer to the offending node.

use std::collections::BTreeMap;
use std::fmt;

use idealspace_core::closures::{po_repair, reflexive_transitive_closure, strictify, transitive_closure};
use idealspace_core::constructions::{
    coproduct, extend_with_closed_family, injection_code, product, projection_code, ExtensionSpec, SetSource,
};
use idealspace_core::engine::{complete, EngineConfig};
use idealspace_core::morphisms::{compose, graph_code, identity_code, FunctionCode};
use idealspace_core::relations::{catalog, FiniteRelation, Param, Params};
use idealspace_core::{ElemSet, PairSet, RelationSource};
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecError {
    /// JSON pointer to the node at fault; empty for the document root.
    pub pointer: String,
    pub message: String,
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = if self.pointer.is_empty() { "/" } else { &self.pointer };
        write!(f, "{at}: {}", self.message)
    }
}

impl std::error::Error for SpecError {}

fn err<T>(pointer: &str, message: impl Into<String>) -> Result<T, SpecError> {
    Err(SpecError {
        pointer: pointer.to_string(),
        message: message.into(),
    })
}

fn child(pointer: &str, key: impl fmt::Display) -> String {
    let key = key.to_string().replace('~', "~0").replace('/', "~1");
    format!("{pointer}/{key}")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetNode {
    Finite(ElemSet),
    All,
    Evens,
    Odds,
}

impl SetNode {
    fn source(&self) -> SetSource {
        match self {
            SetNode::Finite(s) => SetSource::Finite(s.clone()),
            SetNode::All => SetSource::All,
            SetNode::Evens => SetSource::Evens,
            SetNode::Odds => SetSource::Odds,
        }
    }
}

/// A parsed relation node, with its pointer kept for later errors.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Finite { carrier: Option<ElemSet>, pairs: PairSet },
    Catalog { name: String, params: Params },
    Closure(Box<Node>),
    ReflexiveClosure(Box<Node>),
    Strictify(Box<Node>),
    PoRepair(Box<Node>),
    Product(Box<Node>, Box<Node>),
    Coproduct(Box<Node>, Box<Node>),
    Extend { base: Box<Node>, family: Vec<SetNode> },
    Engine(Box<Node>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum CodeNode {
    Identity(Node),
    Compose(Box<CodeNode>, Box<CodeNode>),
    Graph { map: BTreeMap<u64, u64>, source: Node, target: Node },
    Pairs { relation: Node, source: Node, target: Node },
    Projection { left: Node, right: Node, first: bool },
    Injection { left: Node, right: Node, first: bool },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    pub relation: Node,
    pub code: Option<CodeNode>,
}

/// Settings that reach into relation building.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuildOptions {
    pub engine: EngineConfig,
    /// Stage at which graph-code hypotheses are checked.
    pub stage: u64,
}

pub fn parse_document(text: &str) -> Result<Document, SpecError> {
    let value: Value = serde_json::from_str(text).or_else(|e| err("", format!("invalid JSON: {e}")))?;
    document(&value)
}

pub fn document(v: &Value) -> Result<Document, SpecError> {
    match v.as_object() {
        Some(obj) if obj.contains_key("relation") => {
            for key in obj.keys() {
                if key != "relation" && key != "code" {
                    return err(&child("", key), "unknown key; expected relation or code");
                }
            }
            let relation = node(&obj["relation"], "/relation")?;
            let code = obj.get("code").map(|c| code_node(c, "/code")).transpose()?;
            Ok(Document { relation, code })
        }
        _ => Ok(Document {
            relation: node(v, "")?,
            code: None,
        }),
    }
}

fn single_key<'a>(v: &'a Value, at: &str, what: &str) -> Result<(&'a str, &'a Value), SpecError> {
    match v.as_object() {
        Some(obj) if obj.len() == 1 => {
            let (k, v) = obj.iter().next().expect("one entry");
            Ok((k.as_str(), v))
        }
        _ => err(at, format!("expected a {what}: an object with exactly one key")),
    }
}

fn nat(v: &Value, at: &str) -> Result<u64, SpecError> {
    v.as_u64().map_or_else(|| err(at, "expected a natural number"), Ok)
}

fn array<'a>(v: &'a Value, at: &str) -> Result<&'a Vec<Value>, SpecError> {
    v.as_array().map_or_else(|| err(at, "expected an array"), Ok)
}

fn field<'a>(v: &'a Value, at: &str, key: &str) -> Result<&'a Value, SpecError> {
    match v.get(key) {
        Some(x) => Ok(x),
        None => err(at, format!("missing key {key:?}")),
    }
}

fn nat_pair(v: &Value, at: &str) -> Result<(u64, u64), SpecError> {
    match v.as_array().map(Vec::as_slice) {
        Some([a, b]) => Ok((nat(a, &child(at, 0))?, nat(b, &child(at, 1))?)),
        _ => err(at, "expected a pair [a, b]"),
    }
}

fn two_nodes(v: &Value, at: &str) -> Result<(Box<Node>, Box<Node>), SpecError> {
    match v.as_array().map(Vec::as_slice) {
        Some([a, b]) => Ok((Box::new(node(a, &child(at, 0))?), Box::new(node(b, &child(at, 1))?))),
        _ => err(at, "expected two relation nodes [left, right]"),
    }
}

fn set_node(v: &Value, at: &str) -> Result<SetNode, SpecError> {
    match v {
        Value::String(s) => match s.as_str() {
            "all" => Ok(SetNode::All),
            "evens" => Ok(SetNode::Evens),
            "odds" => Ok(SetNode::Odds),
            other => err(at, format!("unknown set {other:?}; expected all, evens, odds or a list")),
        },
        Value::Array(xs) => {
            let set = xs
                .iter()
                .enumerate()
                .map(|(i, x)| nat(x, &child(at, i)))
                .collect::<Result<_, _>>()?;
            Ok(SetNode::Finite(set))
        }
        _ => err(at, "expected a set: a list of naturals or all, evens, odds"),
    }
}

fn param(v: &Value, at: &str) -> Result<Param, SpecError> {
    match v {
        Value::Bool(b) => Ok(Param::Bool(*b)),
        Value::String(s) => Ok(Param::Text(s.clone())),
        Value::Number(_) => Ok(Param::Nat(nat(v, at)?)),
        Value::Array(xs) => xs
            .iter()
            .enumerate()
            .map(|(i, x)| param(x, &child(at, i)))
            .collect::<Result<_, _>>()
            .map(Param::List),
        _ => err(at, "parameters are naturals, booleans, strings or lists of these"),
    }
}

fn params(v: Option<&Value>, at: &str) -> Result<Params, SpecError> {
    let Some(v) = v else { return Ok(Params::new()) };
    let Some(obj) = v.as_object() else {
        return err(at, "expected an object of parameters");
    };
    obj.iter()
        .map(|(k, x)| Ok((k.clone(), param(x, &child(at, k))?)))
        .collect()
}

pub fn node(v: &Value, at: &str) -> Result<Node, SpecError> {
    let (key, body) = single_key(v, at, "relation node")?;
    let inner = child(at, key);
    let boxed = |n| node(n, &inner).map(Box::new);
    match key {
        "finite" => {
            let pairs_at = child(&inner, "pairs");
            let pairs = array(field(body, &inner, "pairs")?, &pairs_at)?
                .iter()
                .enumerate()
                .map(|(i, p)| nat_pair(p, &child(&pairs_at, i)))
                .collect::<Result<PairSet, _>>()?;
            let carrier = match body.get("carrier") {
                None => None,
                Some(c) => {
                    let c_at = child(&inner, "carrier");
                    let set: ElemSet = array(c, &c_at)?
                        .iter()
                        .enumerate()
                        .map(|(i, x)| nat(x, &child(&c_at, i)))
                        .collect::<Result<_, _>>()?;
                    if let Some(&(a, b)) = pairs.iter().find(|(a, b)| !set.contains(a) || !set.contains(b)) {
                        return err(&pairs_at, format!("pair ({a}, {b}) leaves the carrier"));
                    }
                    Some(set)
                }
            };
            Ok(Node::Finite { carrier, pairs })
        }
        "catalog" => {
            let name = field(body, &inner, "name")?
                .as_str()
                .map_or_else(|| err(&child(&inner, "name"), "expected a string"), Ok)?;
            let params = params(body.get("params"), &child(&inner, "params"))?;
            let node = Node::Catalog {
                name: name.to_string(),
                params,
            };
            // fail early on names and parameters
            build(&node, &BuildOptions::default()).map_err(|e| SpecError {
                pointer: inner.clone(),
                message: e.message,
            })?;
            Ok(node)
        }
        "closure" => Ok(Node::Closure(boxed(body)?)),
        "reflexive-closure" => Ok(Node::ReflexiveClosure(boxed(body)?)),
        "strictify" => Ok(Node::Strictify(boxed(body)?)),
        "po-repair" => Ok(Node::PoRepair(boxed(body)?)),
        "engine" => Ok(Node::Engine(boxed(body)?)),
        "product" => two_nodes(body, &inner).map(|(a, b)| Node::Product(a, b)),
        "coproduct" => two_nodes(body, &inner).map(|(a, b)| Node::Coproduct(a, b)),
        "extend" => {
            let base = Box::new(node(field(body, &inner, "base")?, &child(&inner, "base"))?);
            let family = match (body.get("u"), body.get("family")) {
                (Some(u), None) => Vec::from([set_node(u, &child(&inner, "u"))?]),
                (None, Some(f)) => {
                    let f_at = child(&inner, "family");
                    array(f, &f_at)?
                        .iter()
                        .enumerate()
                        .map(|(i, s)| set_node(s, &child(&f_at, i)))
                        .collect::<Result<_, _>>()?
                }
                _ => return err(&inner, "expected exactly one of \"u\" and \"family\""),
            };
            Ok(Node::Extend { base, family })
        }
        other => err(
            at,
            format!(
                "unknown relation node {other:?}; expected finite, catalog, closure, reflexive-closure, \
                 strictify, po-repair, product, coproduct, extend or engine"
            ),
        ),
    }
}

fn side(v: &Value, at: &str) -> Result<bool, SpecError> {
    match v.get("side").map(Value::as_str) {
        None | Some(Some("left")) => Ok(true),
        Some(Some("right")) => Ok(false),
        _ => err(&child(at, "side"), "expected left or right"),
    }
}

pub fn code_node(v: &Value, at: &str) -> Result<CodeNode, SpecError> {
    let (key, body) = single_key(v, at, "code node")?;
    let inner = child(at, key);
    let sub = |k: &str| node(field(body, &inner, k)?, &child(&inner, k));
    match key {
        "identity" => Ok(CodeNode::Identity(node(body, &inner)?)),
        "compose" => match body.as_array().map(Vec::as_slice) {
            Some([a, b]) => Ok(CodeNode::Compose(
                Box::new(code_node(a, &child(&inner, 0))?),
                Box::new(code_node(b, &child(&inner, 1))?),
            )),
            _ => err(&inner, "expected two code nodes [first, second]"),
        },
        "graph" => {
            let map_at = child(&inner, "map");
            let mut map = BTreeMap::new();
            for (i, p) in array(field(body, &inner, "map")?, &map_at)?.iter().enumerate() {
                let (x, y) = nat_pair(p, &child(&map_at, i))?;
                if map.insert(x, y).is_some() {
                    return err(&child(&map_at, i), format!("{x} is mapped twice"));
                }
            }
            Ok(CodeNode::Graph {
                map,
                source: sub("source")?,
                target: sub("target")?,
            })
        }
        "pairs" => Ok(CodeNode::Pairs {
            relation: sub("relation")?,
            source: sub("source")?,
            target: sub("target")?,
        }),
        "projection" => Ok(CodeNode::Projection {
            left: sub("left")?,
            right: sub("right")?,
            first: side(body, &inner)?,
        }),
        "injection" => Ok(CodeNode::Injection {
            left: sub("left")?,
            right: sub("right")?,
            first: side(body, &inner)?,
        }),
        other => err(
            at,
            format!("unknown code node {other:?}; expected identity, compose, graph, pairs, projection or injection"),
        ),
    }
}

/// Errors while turning a parsed node into a relation.
fn build_err(message: impl fmt::Display) -> SpecError {
    SpecError {
        pointer: String::new(),
        message: message.to_string(),
    }
}

pub fn build(node: &Node, opts: &BuildOptions) -> Result<RelationSource, SpecError> {
    Ok(match node {
        Node::Finite { carrier, pairs } => {
            let r = match carrier {
                Some(c) => FiniteRelation::new(c.clone(), pairs.clone()).map_err(build_err)?,
                None => FiniteRelation::from_pairs(pairs.iter().copied()),
            };
            r.as_source()
        }
        Node::Catalog { name, params } => catalog(name, params).map_err(build_err)?,
        Node::Closure(n) => transitive_closure(&build(n, opts)?),
        Node::ReflexiveClosure(n) => reflexive_transitive_closure(&build(n, opts)?),
        Node::Strictify(n) => strictify(&build(n, opts)?),
        Node::PoRepair(n) => po_repair(&build(n, opts)?),
        Node::Product(a, b) => product(&build(a, opts)?, &build(b, opts)?),
        Node::Coproduct(a, b) => coproduct(&build(a, opts)?, &build(b, opts)?),
        Node::Extend { .. } => extend_with_closed_family(&extension(node, opts)?.expect("an extend node")),
        Node::Engine(n) => complete(&build(n, opts)?, opts.engine).x_relation(),
    })
}

/// The extension spec of an `extend` node.
pub fn extension(node: &Node, opts: &BuildOptions) -> Result<Option<ExtensionSpec>, SpecError> {
    let Node::Extend { base, family } = node else {
        return Ok(None);
    };
    let family = family.iter().map(SetNode::source).collect();
    Ok(Some(ExtensionSpec::family(build(base, opts)?, family)))
}

pub fn build_code(code: &CodeNode, opts: &BuildOptions) -> Result<FunctionCode, SpecError> {
    Ok(match code {
        CodeNode::Identity(n) => identity_code(&build(n, opts)?),
        CodeNode::Compose(a, b) => compose(&build_code(a, opts)?, &build_code(b, opts)?),
        CodeNode::Graph { map, source, target } => {
            graph_code(map, &build(source, opts)?, &build(target, opts)?, opts.stage).map_err(build_err)?
        }
        CodeNode::Pairs { relation, source, target } => {
            FunctionCode::new(build(relation, opts)?, build(source, opts)?, build(target, opts)?)
        }
        CodeNode::Projection { left, right, first } => {
            projection_code(&build(left, opts)?, &build(right, opts)?, *first)
        }
        CodeNode::Injection { left, right, first } => injection_code(&build(left, opts)?, &build(right, opts)?, *first),
    })
}
