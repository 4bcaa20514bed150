//! Declarative descriptions of trees, maps, and functions.
//!
//! Every input object has two textual forms that parse to the same spec:
//!
//! * a JSON document, e.g. `{"kind": "affine-path", "a": 2, "b": 1}`;
//! * an inline shorthand, e.g. `affine-path:a=2,b=1` (an argument that
//!   starts with `{` is treated as JSON, so both fit in one CLI flag).
//!
//! Unknown fields and unknown kinds are rejected so a typo fails loudly
//! instead of silently building a different object. Paths appear in JSON as
//! arrays of child indices (`[0, 1]`) and inline as dot-separated indices
//! (`0.1`, with `root` for the empty path).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::compop::{MapMetadata, SelfMap, TableDefault};
use crate::error::{Error, Result};
use crate::lip::TreeFunction;
use crate::scalar::Scalar;
use crate::tree::{TreeModel, VertexPath};

/// Description of a tree model.
///
/// JSON form: `{"kind": K, "params": {...}}` with `K` one of `"path"`,
/// `"homogeneous"` (params `{"q": int}`), `"comb"`, or `"custom-table"`
/// (params `{"entries": [[path, arity], ...], "default": arity}` plus an
/// optional `"name"`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeSpec {
    Path,
    Homogeneous {
        q: u32,
    },
    Comb,
    CustomTable {
        name: Option<String>,
        entries: Vec<(VertexPath, u32)>,
        default: u32,
    },
}

/// Description of a self-map of a tree.
///
/// JSON form: a flat object tagged by `"kind"`:
///
/// * `{"kind": "affine-path", "a": int, "b": int, "fixzero": bool}`
///   (`fixzero` defaults to `false`);
/// * `{"kind": "constant", "target": path}`;
/// * `{"kind": "comb"}`;
/// * `{"kind": "table", "entries": [[path, path], ...], "default":
///   "identity" | "error"}`.
///
/// Any of them may carry a `"metadata"` object whose fields replace the
/// facts the constructor derives, e.g. `{"metadata": {"injective": true}}`.
#[derive(Clone, Debug)]
pub enum MapSpec {
    AffinePath {
        a: u64,
        b: u64,
        fixzero: bool,
        metadata: Option<MapMetadata>,
    },
    Constant {
        target: VertexPath,
        metadata: Option<MapMetadata>,
    },
    Comb {
        metadata: Option<MapMetadata>,
    },
    Table {
        entries: Vec<(VertexPath, VertexPath)>,
        default: TableDefault,
        metadata: Option<MapMetadata>,
    },
}

/// Description of a function on a tree.
///
/// JSON form: either an explicit table
/// `{"kind": "table", "entries": [[path, re, im], ...]}` where `re` and `im`
/// are numbers or strings (strings and integers are parsed exactly, so
/// `"3/2"` stays a rational; JSON floats make the value inexact), or a named
/// construction `{"kind": "builtin", "name": N, "params": {...}}` with `N`
/// one of `"indicator"` (params `{"vertex": path}`), `"linear"`,
/// `"harmonic"`, `"power-mu"` (params `{"mu": float}`), `"bump"` (params
/// `{"center": path, "radius": int}`), or `"tent"` (params `{"m": int}`).
#[derive(Clone, Debug, PartialEq)]
pub enum FunctionSpec {
    Table { entries: Vec<(VertexPath, Scalar)> },
    Indicator { vertex: VertexPath },
    Linear,
    Harmonic,
    PowerMu { mu: f64 },
    Bump { center: VertexPath, radius: u64 },
    Tent { m: u64 },
}

/// A full run description, the JSON document behind a `--spec file.json`
/// flag. Every field is optional; explicit CLI flags override spec fields.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default, rename_all = "kebab-case")]
pub struct RunSpec {
    pub tree: Option<TreeSpec>,
    pub map: Option<MapSpec>,
    pub function: Option<FunctionSpec>,
    /// Scalar weight, in the syntax `Scalar::parse` accepts (`"3/2"`,
    /// `"0.5+2i"`, ...).
    pub lambda: Option<String>,
    pub vertex: Option<VertexPath>,
    pub depth: Option<u64>,
    pub horizon: Option<u64>,
    pub sample_depth: Option<u64>,
    pub steps: Option<u64>,
    pub format: Option<String>,
}

impl RunSpec {
    pub fn from_json(text: &str) -> Result<RunSpec> {
        serde_json::from_str(text).map_err(|e| Error::InvalidSpec(format!("bad run spec: {e}")))
    }
}

// Deserializing through `Value` lets each kind keep `deny_unknown_fields`,
// which serde's internally tagged enums cannot express.

impl<'de> Deserialize<'de> for TreeSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let value = Value::deserialize(d)?;
        TreeSpec::from_value(&value).map_err(serde::de::Error::custom)
    }
}

impl<'de> Deserialize<'de> for MapSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let value = Value::deserialize(d)?;
        MapSpec::from_value(&value).map_err(serde::de::Error::custom)
    }
}

impl<'de> Deserialize<'de> for FunctionSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let value = Value::deserialize(d)?;
        FunctionSpec::from_value(&value).map_err(serde::de::Error::custom)
    }
}

impl TreeSpec {
    pub fn from_value(value: &Value) -> Result<TreeSpec> {
        let doc: TreeDoc = from_doc(value, "tree")?;
        match doc.kind.as_str() {
            "path" => {
                expect_no_params("path", doc.params.as_ref())?;
                Ok(TreeSpec::Path)
            }
            "comb" => {
                expect_no_params("comb", doc.params.as_ref())?;
                Ok(TreeSpec::Comb)
            }
            "homogeneous" => {
                let p: HomogeneousParams = required_params("homogeneous", doc.params.as_ref())?;
                Ok(TreeSpec::Homogeneous { q: p.q })
            }
            "custom-table" => {
                let p: CustomTableParams = required_params("custom-table", doc.params.as_ref())?;
                Ok(TreeSpec::CustomTable {
                    name: p.name,
                    entries: p.entries,
                    default: p.default,
                })
            }
            other => Err(Error::InvalidSpec(format!(
                "unknown tree kind `{other}`; expected path, homogeneous, comb, or custom-table"
            ))),
        }
    }

    pub fn from_json(text: &str) -> Result<TreeSpec> {
        TreeSpec::from_value(&parse_json(text, "tree")?)
    }

    /// Accepts either a JSON document (first character `{`) or the inline
    /// shorthand `path`, `homogeneous:q=2`, `comb`.
    pub fn parse_arg(arg: &str) -> Result<TreeSpec> {
        let arg = arg.trim();
        if arg.starts_with('{') {
            return TreeSpec::from_json(arg);
        }
        let (kind, rest) = split_kind(arg);
        match kind {
            "path" => {
                expect_no_pairs("path", rest)?;
                Ok(TreeSpec::Path)
            }
            "comb" => {
                expect_no_pairs("comb", rest)?;
                Ok(TreeSpec::Comb)
            }
            "homogeneous" => {
                let mut pairs = Pairs::parse(rest)?;
                let q = pairs.take_u32("q")?;
                pairs.finish("homogeneous")?;
                Ok(TreeSpec::Homogeneous { q })
            }
            "custom-table" => Err(Error::InvalidSpec(
                "custom-table trees need a JSON document; the arity table does not fit inline"
                    .into(),
            )),
            other => Err(Error::InvalidSpec(format!(
                "unknown tree `{other}`; expected path, homogeneous:q=N, or comb"
            ))),
        }
    }

    pub fn build(&self) -> Result<TreeModel> {
        match self {
            TreeSpec::Path => Ok(TreeModel::path()),
            TreeSpec::Homogeneous { q } => TreeModel::homogeneous(*q),
            TreeSpec::Comb => Ok(TreeModel::comb()),
            TreeSpec::CustomTable {
                name,
                entries,
                default,
            } => {
                let table = to_unique_map(entries.clone(), "arity table")?;
                let name = name.clone().unwrap_or_else(|| "custom-table".into());
                TreeModel::custom_table(name, table, *default)
            }
        }
    }
}

impl MapSpec {
    pub fn from_value(value: &Value) -> Result<MapSpec> {
        match kind_of(value, "map")? {
            "affine-path" => {
                let doc: AffineDoc = from_doc(value, "affine-path map")?;
                Ok(MapSpec::AffinePath {
                    a: doc.a,
                    b: doc.b,
                    fixzero: doc.fixzero,
                    metadata: doc.metadata,
                })
            }
            "constant" => {
                let doc: ConstantDoc = from_doc(value, "constant map")?;
                Ok(MapSpec::Constant {
                    target: doc.target,
                    metadata: doc.metadata,
                })
            }
            "comb" => {
                let doc: CombDoc = from_doc(value, "comb map")?;
                Ok(MapSpec::Comb {
                    metadata: doc.metadata,
                })
            }
            "table" => {
                let doc: TableDoc = from_doc(value, "table map")?;
                Ok(MapSpec::Table {
                    entries: doc.entries,
                    default: parse_table_default(&doc.default)?,
                    metadata: doc.metadata,
                })
            }
            other => Err(Error::InvalidSpec(format!(
                "unknown map kind `{other}`; expected affine-path, constant, comb, or table"
            ))),
        }
    }

    pub fn from_json(text: &str) -> Result<MapSpec> {
        MapSpec::from_value(&parse_json(text, "map")?)
    }

    /// Accepts either a JSON document or the inline shorthand
    /// `affine-path:a=2,b=1,fixzero`, `constant:target=0.1`, `comb`.
    pub fn parse_arg(arg: &str) -> Result<MapSpec> {
        let arg = arg.trim();
        if arg.starts_with('{') {
            return MapSpec::from_json(arg);
        }
        let (kind, rest) = split_kind(arg);
        match kind {
            "affine-path" => {
                let mut pairs = Pairs::parse(rest)?;
                let a = pairs.take_u64("a")?;
                let b = pairs.take_u64_or("b", 0)?;
                let fixzero = pairs.take_flag("fixzero");
                pairs.finish("affine-path")?;
                Ok(MapSpec::AffinePath {
                    a,
                    b,
                    fixzero,
                    metadata: None,
                })
            }
            "constant" => {
                let mut pairs = Pairs::parse(rest)?;
                let target = pairs.take_path("target")?;
                pairs.finish("constant")?;
                Ok(MapSpec::Constant {
                    target,
                    metadata: None,
                })
            }
            "comb" => {
                expect_no_pairs("comb", rest)?;
                Ok(MapSpec::Comb { metadata: None })
            }
            "table" => Err(Error::InvalidSpec(
                "table maps need a JSON document; the image table does not fit inline".into(),
            )),
            other => Err(Error::InvalidSpec(format!(
                "unknown map `{other}`; expected affine-path:a=..,b=.., constant:target=.., or comb"
            ))),
        }
    }

    /// Builds the map, checking it against the tree it is declared on.
    /// `affine-path` and `comb` maps come with their own tree; passing a
    /// different one is an error rather than a silent reinterpretation.
    pub fn build(&self, tree: Option<&TreeModel>) -> Result<SelfMap> {
        let map = match self {
            MapSpec::AffinePath { a, b, fixzero, .. } => {
                expect_tree("affine-path", tree, "path")?;
                SelfMap::affine_path(*a, *b, *fixzero)?
            }
            MapSpec::Constant { target, .. } => {
                let tree = tree.cloned().unwrap_or_else(TreeModel::path);
                SelfMap::constant_map(tree, target.clone())?
            }
            MapSpec::Comb { .. } => {
                expect_tree("comb", tree, "comb")?;
                SelfMap::comb_map()
            }
            MapSpec::Table {
                entries, default, ..
            } => {
                let tree = tree.cloned().unwrap_or_else(TreeModel::path);
                let table = to_unique_map(entries.clone(), "image table")?;
                SelfMap::table_map(tree, table, *default)?
            }
        };
        match self.metadata() {
            Some(overlay) => Ok(map.with_metadata(map.metadata().overlaid(overlay))),
            None => Ok(map),
        }
    }

    pub fn metadata(&self) -> Option<&MapMetadata> {
        match self {
            MapSpec::AffinePath { metadata, .. }
            | MapSpec::Constant { metadata, .. }
            | MapSpec::Comb { metadata }
            | MapSpec::Table { metadata, .. } => metadata.as_ref(),
        }
    }
}

impl FunctionSpec {
    pub fn from_value(value: &Value) -> Result<FunctionSpec> {
        match kind_of(value, "function")? {
            "table" => {
                let doc: TableFnDoc = from_doc(value, "table function")?;
                let mut entries = Vec::with_capacity(doc.entries.len());
                for (vertex, re, im) in doc.entries {
                    entries.push((vertex, combine_components(re.to_real()?, im.to_real()?)));
                }
                Ok(FunctionSpec::Table { entries })
            }
            "builtin" => {
                let doc: BuiltinDoc = from_doc(value, "builtin function")?;
                let params = doc.params.as_ref();
                match doc.name.as_str() {
                    "indicator" => {
                        let p: IndicatorParams = required_params("indicator", params)?;
                        Ok(FunctionSpec::Indicator { vertex: p.vertex })
                    }
                    "linear" => {
                        expect_no_params("linear", params)?;
                        Ok(FunctionSpec::Linear)
                    }
                    "harmonic" => {
                        expect_no_params("harmonic", params)?;
                        Ok(FunctionSpec::Harmonic)
                    }
                    "power-mu" => {
                        let p: PowerMuParams = required_params("power-mu", params)?;
                        Ok(FunctionSpec::PowerMu { mu: p.mu })
                    }
                    "bump" => {
                        let p: BumpParams = required_params("bump", params)?;
                        Ok(FunctionSpec::Bump {
                            center: p.center,
                            radius: p.radius,
                        })
                    }
                    "tent" => {
                        let p: TentParams = required_params("tent", params)?;
                        Ok(FunctionSpec::Tent { m: p.m })
                    }
                    other => Err(Error::InvalidSpec(format!(
                        "unknown builtin function `{other}`; expected indicator, linear, \
                         harmonic, power-mu, bump, or tent"
                    ))),
                }
            }
            other => Err(Error::InvalidSpec(format!(
                "unknown function kind `{other}`; expected table or builtin"
            ))),
        }
    }

    pub fn from_json(text: &str) -> Result<FunctionSpec> {
        FunctionSpec::from_value(&parse_json(text, "function")?)
    }

    /// Accepts either a JSON document or the inline shorthand
    /// `indicator:vertex=0.1`, `linear`, `harmonic`, `power-mu:mu=1.5`,
    /// `bump:center=0,radius=2`, `tent:m=4`.
    pub fn parse_arg(arg: &str) -> Result<FunctionSpec> {
        let arg = arg.trim();
        if arg.starts_with('{') {
            return FunctionSpec::from_json(arg);
        }
        let (kind, rest) = split_kind(arg);
        match kind {
            "indicator" => {
                let mut pairs = Pairs::parse(rest)?;
                let vertex = pairs.take_path("vertex")?;
                pairs.finish("indicator")?;
                Ok(FunctionSpec::Indicator { vertex })
            }
            "linear" => {
                expect_no_pairs("linear", rest)?;
                Ok(FunctionSpec::Linear)
            }
            "harmonic" => {
                expect_no_pairs("harmonic", rest)?;
                Ok(FunctionSpec::Harmonic)
            }
            "power-mu" => {
                let mut pairs = Pairs::parse(rest)?;
                let mu = pairs.take_f64("mu")?;
                pairs.finish("power-mu")?;
                Ok(FunctionSpec::PowerMu { mu })
            }
            "bump" => {
                let mut pairs = Pairs::parse(rest)?;
                let center = pairs.take_path("center")?;
                let radius = pairs.take_u64("radius")?;
                pairs.finish("bump")?;
                Ok(FunctionSpec::Bump { center, radius })
            }
            "tent" => {
                let mut pairs = Pairs::parse(rest)?;
                let m = pairs.take_u64("m")?;
                pairs.finish("tent")?;
                Ok(FunctionSpec::Tent { m })
            }
            "table" => Err(Error::InvalidSpec(
                "table functions need a JSON document; the value table does not fit inline".into(),
            )),
            other => Err(Error::InvalidSpec(format!(
                "unknown function `{other}`; expected indicator:vertex=.., linear, harmonic, \
                 power-mu:mu=.., bump:center=..,radius=.., or tent:m=.."
            ))),
        }
    }

    pub fn build(&self) -> Result<TreeFunction> {
        match self {
            FunctionSpec::Table { entries } => {
                let table = to_unique_map(entries.clone(), "value table")?;
                Ok(TreeFunction::from_table(table))
            }
            FunctionSpec::Indicator { vertex } => Ok(TreeFunction::indicator(vertex.clone())),
            FunctionSpec::Linear => Ok(TreeFunction::linear()),
            FunctionSpec::Harmonic => Ok(TreeFunction::harmonic()),
            FunctionSpec::PowerMu { mu } => {
                if !mu.is_finite() {
                    return Err(Error::InvalidSpec(format!(
                        "power-mu exponent must be finite, got {mu}"
                    )));
                }
                Ok(TreeFunction::power_mu(*mu))
            }
            FunctionSpec::Bump { center, radius } => {
                if *radius == 0 {
                    return Err(Error::InvalidSpec("bump radius must be >= 1".into()));
                }
                Ok(TreeFunction::bump(center.clone(), *radius))
            }
            FunctionSpec::Tent { m } => {
                if *m == 0 {
                    return Err(Error::InvalidSpec("tent slope width must be >= 1".into()));
                }
                Ok(TreeFunction::tent(*m))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// JSON documents, one struct per kind so `deny_unknown_fields` applies.

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeDoc {
    kind: String,
    #[serde(default)]
    params: Option<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HomogeneousParams {
    q: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CustomTableParams {
    #[serde(default)]
    name: Option<String>,
    entries: Vec<(VertexPath, u32)>,
    default: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AffineDoc {
    #[allow(dead_code)]
    kind: String,
    a: u64,
    b: u64,
    #[serde(default)]
    fixzero: bool,
    #[serde(default)]
    metadata: Option<MapMetadata>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantDoc {
    #[allow(dead_code)]
    kind: String,
    target: VertexPath,
    #[serde(default)]
    metadata: Option<MapMetadata>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CombDoc {
    #[allow(dead_code)]
    kind: String,
    #[serde(default)]
    metadata: Option<MapMetadata>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableDoc {
    #[allow(dead_code)]
    kind: String,
    entries: Vec<(VertexPath, VertexPath)>,
    default: String,
    #[serde(default)]
    metadata: Option<MapMetadata>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFnDoc {
    #[allow(dead_code)]
    kind: String,
    entries: Vec<(VertexPath, NumberSpec, NumberSpec)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BuiltinDoc {
    #[allow(dead_code)]
    kind: String,
    name: String,
    #[serde(default)]
    params: Option<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IndicatorParams {
    vertex: VertexPath,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PowerMuParams {
    mu: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BumpParams {
    center: VertexPath,
    radius: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TentParams {
    m: u64,
}

/// A real number in a function table: JSON integers and strings parse
/// exactly, JSON floats stay floating-point.
#[derive(Deserialize)]
#[serde(untagged)]
enum NumberSpec {
    Int(i64),
    Float(f64),
    Text(String),
}

enum RealValue {
    Exact(BigRational),
    Float(f64),
}

impl NumberSpec {
    fn to_real(&self) -> Result<RealValue> {
        match self {
            NumberSpec::Int(n) => Ok(RealValue::Exact(BigRational::from_integer(BigInt::from(
                *n,
            )))),
            NumberSpec::Float(x) => Ok(RealValue::Float(*x)),
            NumberSpec::Text(s) => match Scalar::parse(s)? {
                Scalar::Exact(e) if e.im.is_zero() => Ok(RealValue::Exact(e.re)),
                Scalar::Float(c) if c.im == 0.0 => Ok(RealValue::Float(c.re)),
                _ => Err(Error::InvalidSpec(format!(
                    "table component `{s}` must be real; give the imaginary part \
                     as the third entry"
                ))),
            },
        }
    }
}

fn combine_components(re: RealValue, im: RealValue) -> Scalar {
    match (re, im) {
        (RealValue::Exact(a), RealValue::Exact(b)) => Scalar::exact(a, b),
        (a, b) => Scalar::Float(Complex64::new(approx_real(a), approx_real(b))),
    }
}

fn approx_real(v: RealValue) -> f64 {
    match v {
        RealValue::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
        RealValue::Float(x) => x,
    }
}

// ---------------------------------------------------------------------------
// Shared helpers.

fn parse_json(text: &str, what: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::InvalidSpec(format!("bad {what} JSON: {e}")))
}

fn kind_of<'v>(value: &'v Value, what: &str) -> Result<&'v str> {
    value
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::InvalidSpec(format!("{what} spec needs a string `kind` field")))
}

fn from_doc<T: DeserializeOwned>(value: &Value, what: &str) -> Result<T> {
    serde_json::from_value(value.clone())
        .map_err(|e| Error::InvalidSpec(format!("bad {what} spec: {e}")))
}

fn required_params<T: DeserializeOwned>(kind: &str, params: Option<&Value>) -> Result<T> {
    let value =
        params.ok_or_else(|| Error::InvalidSpec(format!("`{kind}` needs a `params` object")))?;
    serde_json::from_value(value.clone())
        .map_err(|e| Error::InvalidSpec(format!("bad `{kind}` params: {e}")))
}

fn expect_no_params(kind: &str, params: Option<&Value>) -> Result<()> {
    match params {
        None => Ok(()),
        Some(Value::Object(m)) if m.is_empty() => Ok(()),
        Some(_) => Err(Error::InvalidSpec(format!("`{kind}` takes no params"))),
    }
}

fn parse_table_default(text: &str) -> Result<TableDefault> {
    match text {
        "identity" => Ok(TableDefault::Identity),
        "error" => Ok(TableDefault::Undefined),
        other => Err(Error::InvalidSpec(format!(
            "unknown table default `{other}`; expected identity or error"
        ))),
    }
}

fn to_unique_map<V>(entries: Vec<(VertexPath, V)>, what: &str) -> Result<BTreeMap<VertexPath, V>> {
    let mut out = BTreeMap::new();
    for (vertex, value) in entries {
        let key = vertex.clone();
        if out.insert(vertex, value).is_some() {
            return Err(Error::InvalidSpec(format!(
                "{what} lists vertex {key} twice"
            )));
        }
    }
    Ok(out)
}

fn expect_tree(kind: &str, tree: Option<&TreeModel>, wanted: &str) -> Result<()> {
    match tree {
        None => Ok(()),
        Some(t) if t.name() == wanted => Ok(()),
        Some(t) => Err(Error::InvalidSpec(format!(
            "{kind} maps act on the {wanted} tree, not `{}`",
            t.name()
        ))),
    }
}

// Inline shorthand: `kind` or `kind:key=value,key=value,flag`.

fn split_kind(arg: &str) -> (&str, Option<&str>) {
    match arg.split_once(':') {
        Some((kind, rest)) => (kind, Some(rest)),
        None => (arg, None),
    }
}

fn expect_no_pairs(kind: &str, rest: Option<&str>) -> Result<()> {
    match rest {
        None | Some("") => Ok(()),
        Some(r) => Err(Error::InvalidSpec(format!(
            "`{kind}` takes no arguments, got `{r}`"
        ))),
    }
}

struct Pairs {
    entries: Vec<(String, Option<String>)>,
}

impl Pairs {
    fn parse(rest: Option<&str>) -> Result<Pairs> {
        let mut entries: Vec<(String, Option<String>)> = Vec::new();
        if let Some(rest) = rest {
            for piece in rest.split(',') {
                let piece = piece.trim();
                if piece.is_empty() {
                    continue;
                }
                let (key, value) = match piece.split_once('=') {
                    Some((k, v)) => (k.trim().to_string(), Some(v.trim().to_string())),
                    None => (piece.to_string(), None),
                };
                if entries.iter().any(|(k, _)| *k == key) {
                    return Err(Error::InvalidSpec(format!("duplicate key `{key}`")));
                }
                entries.push((key, value));
            }
        }
        Ok(Pairs { entries })
    }

    fn take(&mut self, key: &str) -> Option<Option<String>> {
        let at = self.entries.iter().position(|(k, _)| k == key)?;
        Some(self.entries.remove(at).1)
    }

    fn take_value(&mut self, key: &str) -> Result<String> {
        match self.take(key) {
            Some(Some(v)) => Ok(v),
            Some(None) => Err(Error::InvalidSpec(format!("key `{key}` needs a value"))),
            None => Err(Error::InvalidSpec(format!("missing key `{key}`"))),
        }
    }

    fn take_flag(&mut self, key: &str) -> bool {
        matches!(self.take(key), Some(None) | Some(Some(_)))
    }

    fn take_u64(&mut self, key: &str) -> Result<u64> {
        let v = self.take_value(key)?;
        v.parse().map_err(|_| {
            Error::InvalidSpec(format!("`{key}` must be a nonnegative integer, got `{v}`"))
        })
    }

    fn take_u64_or(&mut self, key: &str, default: u64) -> Result<u64> {
        match self.take(key) {
            None => Ok(default),
            Some(Some(v)) => v.parse().map_err(|_| {
                Error::InvalidSpec(format!("`{key}` must be a nonnegative integer, got `{v}`"))
            }),
            Some(None) => Err(Error::InvalidSpec(format!("key `{key}` needs a value"))),
        }
    }

    fn take_u32(&mut self, key: &str) -> Result<u32> {
        let v = self.take_value(key)?;
        v.parse().map_err(|_| {
            Error::InvalidSpec(format!("`{key}` must be a nonnegative integer, got `{v}`"))
        })
    }

    fn take_f64(&mut self, key: &str) -> Result<f64> {
        let v = self.take_value(key)?;
        v.parse()
            .map_err(|_| Error::InvalidSpec(format!("`{key}` must be a number, got `{v}`")))
    }

    fn take_path(&mut self, key: &str) -> Result<VertexPath> {
        parse_inline_path(&self.take_value(key)?)
    }

    fn finish(&mut self, kind: &str) -> Result<()> {
        match self.entries.first() {
            None => Ok(()),
            Some((key, _)) => Err(Error::InvalidSpec(format!(
                "`{kind}` does not take a key `{key}`"
            ))),
        }
    }
}

/// Inline path syntax: dot-separated child indices, `root` (or the empty
/// string) for the root.
pub fn parse_inline_path(text: &str) -> Result<VertexPath> {
    let text = text.trim();
    if text.is_empty() || text == "root" {
        return Ok(VertexPath::root());
    }
    let mut indices = Vec::new();
    for piece in text.split('.') {
        let index: u32 = piece.trim().parse().map_err(|_| {
            Error::InvalidSpec(format!("bad path `{text}`: `{piece}` is not a child index"))
        })?;
        indices.push(index);
    }
    Ok(VertexPath::from_indices(indices))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(indices: &[u32]) -> VertexPath {
        VertexPath::from_indices(indices.to_vec())
    }

    #[test]
    fn tree_specs_from_json() {
        assert_eq!(
            TreeSpec::from_json(r#"{"kind": "path"}"#).unwrap(),
            TreeSpec::Path
        );
        assert_eq!(
            TreeSpec::from_json(r#"{"kind": "path", "params": {}}"#).unwrap(),
            TreeSpec::Path
        );
        assert_eq!(
            TreeSpec::from_json(r#"{"kind": "comb"}"#).unwrap(),
            TreeSpec::Comb
        );
        let homog = TreeSpec::from_json(r#"{"kind": "homogeneous", "params": {"q": 3}}"#).unwrap();
        assert_eq!(homog, TreeSpec::Homogeneous { q: 3 });
        let tree = homog.build().unwrap();
        assert_eq!(tree.arity(&VertexPath::root()), 3);

        let custom = TreeSpec::from_json(
            r#"{"kind": "custom-table",
                "params": {"entries": [[[], 2], [[0], 3]], "default": 1}}"#,
        )
        .unwrap();
        let tree = custom.build().unwrap();
        assert_eq!(tree.arity(&VertexPath::root()), 2);
        assert_eq!(tree.arity(&path(&[0])), 3);
        assert_eq!(tree.arity(&path(&[1])), 1);
    }

    #[test]
    fn tree_specs_reject_junk() {
        // Unknown field, unknown kind, missing and extra params.
        assert!(TreeSpec::from_json(r#"{"kind": "path", "prams": {}}"#).is_err());
        assert!(TreeSpec::from_json(r#"{"kind": "pathh"}"#).is_err());
        assert!(TreeSpec::from_json(r#"{"kind": "homogeneous"}"#).is_err());
        assert!(
            TreeSpec::from_json(r#"{"kind": "homogeneous", "params": {"q": 2, "r": 1}}"#).is_err()
        );
        assert!(TreeSpec::from_json(r#"{"kind": "path", "params": {"q": 1}}"#).is_err());
        assert!(
            TreeSpec::from_json(r#"{"kind": "homogeneous", "params": {"q": 0}}"#)
                .unwrap()
                .build()
                .is_err()
        );
        // Duplicate vertex in an arity table.
        let doubled = TreeSpec::from_json(
            r#"{"kind": "custom-table",
                "params": {"entries": [[[0], 2], [[0], 3]], "default": 1}}"#,
        )
        .unwrap();
        assert!(doubled.build().is_err());
    }

    #[test]
    fn tree_inline_shorthand() {
        assert_eq!(TreeSpec::parse_arg("path").unwrap(), TreeSpec::Path);
        assert_eq!(TreeSpec::parse_arg("comb").unwrap(), TreeSpec::Comb);
        assert_eq!(
            TreeSpec::parse_arg("homogeneous:q=2").unwrap(),
            TreeSpec::Homogeneous { q: 2 }
        );
        assert_eq!(
            TreeSpec::parse_arg(r#"{"kind": "path"}"#).unwrap(),
            TreeSpec::Path
        );
        assert!(TreeSpec::parse_arg("custom-table").is_err());
        assert!(TreeSpec::parse_arg("homogeneous:q=2,r=3").is_err());
        assert!(TreeSpec::parse_arg("path:q=1").is_err());
    }

    #[test]
    fn map_specs_from_json() {
        let spec = MapSpec::from_json(r#"{"kind": "affine-path", "a": 2, "b": 1}"#).unwrap();
        let map = spec.build(None).unwrap();
        assert_eq!(map.metadata().lipschitz_number, Some(2));

        let pinned =
            MapSpec::from_json(r#"{"kind": "affine-path", "a": 2, "b": 1, "fixzero": true}"#)
                .unwrap();
        let map = pinned.build(None).unwrap();
        // The pin bends increments near the origin, so the stretch grows to
        // a + b and parent separation is no longer exactly geometric.
        assert_eq!(map.metadata().lipschitz_number, Some(3));
        let gs = map.metadata().geometric_separation.as_ref().unwrap();
        assert!(!gs.parent_exact);

        let constant = MapSpec::from_json(r#"{"kind": "constant", "target": [0, 0]}"#).unwrap();
        let map = constant.build(None).unwrap();
        assert_eq!(map.image(&path(&[0, 1, 0])).unwrap(), path(&[0, 0]));

        let comb = MapSpec::from_json(r#"{"kind": "comb"}"#).unwrap();
        let map = comb.build(Some(&TreeModel::comb())).unwrap();
        assert_eq!(map.metadata().lipschitz_number, Some(3));

        let table = MapSpec::from_json(
            r#"{"kind": "table", "entries": [[[0], [0, 0]]], "default": "identity"}"#,
        )
        .unwrap();
        let map = table.build(None).unwrap();
        assert_eq!(map.image(&path(&[0])).unwrap(), path(&[0, 0]));
        assert_eq!(map.image(&path(&[0, 1])).unwrap(), path(&[0, 1]));
    }

    #[test]
    fn map_metadata_overlay_wins() {
        let spec = MapSpec::from_json(
            r#"{"kind": "affine-path", "a": 2, "b": 0,
                "metadata": {"injective": false, "lipschitz_number": 7}}"#,
        )
        .unwrap();
        let map = spec.build(None).unwrap();
        assert_eq!(map.metadata().injective, Some(false));
        assert_eq!(map.metadata().lipschitz_number, Some(7));
        // Fields absent from the overlay keep their derived values; doubling
        // with b = 0 fixes the origin.
        assert_eq!(map.metadata().periodic_point_free, Some(false));
    }

    #[test]
    fn map_specs_reject_junk() {
        assert!(MapSpec::from_json(r#"{"kind": "affine-path", "a": 2}"#).is_err());
        assert!(MapSpec::from_json(r#"{"kind": "affine-path", "a": 2, "b": 0, "c": 1}"#).is_err());
        assert!(MapSpec::from_json(r#"{"kind": "constant"}"#).is_err());
        assert!(
            MapSpec::from_json(r#"{"kind": "table", "entries": [], "default": "banana"}"#).is_err()
        );
        assert!(MapSpec::from_json(r#"{"kind": "table", "entries": []}"#).is_err());
        assert!(MapSpec::from_json(r#"{"kind": "rotation"}"#).is_err());
        assert!(MapSpec::from_json(r#"{"kind": "comb", "metadata": {"injectve": true}}"#).is_err());
        // Tree mismatch caught at build time.
        let spec = MapSpec::from_json(r#"{"kind": "affine-path", "a": 1, "b": 1}"#).unwrap();
        assert!(spec.build(Some(&TreeModel::comb())).is_err());
    }

    #[test]
    fn map_inline_shorthand() {
        let spec = MapSpec::parse_arg("affine-path:a=2,b=0,fixzero").unwrap();
        match spec {
            MapSpec::AffinePath { a, b, fixzero, .. } => {
                assert_eq!((a, b, fixzero), (2, 0, true));
            }
            other => panic!("wrong spec {other:?}"),
        }
        let spec = MapSpec::parse_arg("affine-path:a=3").unwrap();
        match spec {
            MapSpec::AffinePath { a, b, fixzero, .. } => {
                assert_eq!((a, b, fixzero), (3, 0, false));
            }
            other => panic!("wrong spec {other:?}"),
        }
        let spec = MapSpec::parse_arg("constant:target=0.1").unwrap();
        match spec {
            MapSpec::Constant { ref target, .. } => assert_eq!(*target, path(&[0, 1])),
            other => panic!("wrong spec {other:?}"),
        }
        assert!(MapSpec::parse_arg("affine-path:a=2,a=3").is_err());
        assert!(MapSpec::parse_arg("affine-path:b=1").is_err());
        assert!(MapSpec::parse_arg("table").is_err());
        assert!(MapSpec::parse_arg("comb:x=1").is_err());
    }

    #[test]
    fn function_specs_from_json() {
        let table = FunctionSpec::from_json(
            r#"{"kind": "table", "entries": [[[0], 1, 0], [[0, 0], "3/2", "-1/2"]]}"#,
        )
        .unwrap();
        let f = table.build().unwrap();
        assert_eq!(f.eval(&path(&[0])), Scalar::one());
        let v = f.eval(&path(&[0, 0]));
        assert!(v.is_exact());
        assert_eq!(
            v,
            Scalar::exact("3/2".parse().unwrap(), "-1/2".parse().unwrap())
        );
        assert_eq!(f.eval(&path(&[1])), Scalar::zero());

        // A float component makes the whole value inexact.
        let table =
            FunctionSpec::from_json(r#"{"kind": "table", "entries": [[[0], 1.5, 0]]}"#).unwrap();
        assert!(!table.build().unwrap().eval(&path(&[0])).is_exact());

        let ind = FunctionSpec::from_json(
            r#"{"kind": "builtin", "name": "indicator", "params": {"vertex": [0, 1]}}"#,
        )
        .unwrap();
        let f = ind.build().unwrap();
        assert_eq!(f.eval(&path(&[0, 1])), Scalar::one());
        assert_eq!(f.eval(&path(&[0])), Scalar::zero());

        let lin = FunctionSpec::from_json(r#"{"kind": "builtin", "name": "linear"}"#).unwrap();
        assert_eq!(
            lin.build().unwrap().eval(&path(&[0, 0])),
            Scalar::from_integer(2)
        );

        let pw = FunctionSpec::from_json(
            r#"{"kind": "builtin", "name": "power-mu", "params": {"mu": 2.0}}"#,
        )
        .unwrap();
        assert_eq!(pw, FunctionSpec::PowerMu { mu: 2.0 });
    }

    #[test]
    fn function_specs_reject_junk() {
        assert!(FunctionSpec::from_json(r#"{"kind": "builtin", "name": "sine"}"#).is_err());
        assert!(FunctionSpec::from_json(
            r#"{"kind": "builtin", "name": "indicator", "params": {"vertx": [0]}}"#
        )
        .is_err());
        assert!(FunctionSpec::from_json(
            r#"{"kind": "builtin", "name": "linear", "params": {"q": 1}}"#
        )
        .is_err());
        assert!(
            FunctionSpec::from_json(r#"{"kind": "table", "entries": [[[0], "1+2i", 0]]}"#).is_err()
        );
        assert!(FunctionSpec::from_json(r#"{"kind": "table", "entries": [[[0], 1]]}"#).is_err());
    }

    #[test]
    fn function_inline_shorthand() {
        let f = FunctionSpec::parse_arg("indicator:vertex=0.1").unwrap();
        assert_eq!(
            f,
            FunctionSpec::Indicator {
                vertex: path(&[0, 1])
            }
        );
        let f = FunctionSpec::parse_arg("indicator:vertex=root").unwrap();
        assert_eq!(
            f,
            FunctionSpec::Indicator {
                vertex: VertexPath::root()
            }
        );
        assert_eq!(
            FunctionSpec::parse_arg("linear").unwrap(),
            FunctionSpec::Linear
        );
        assert_eq!(
            FunctionSpec::parse_arg("power-mu:mu=1.5").unwrap(),
            FunctionSpec::PowerMu { mu: 1.5 }
        );
        assert_eq!(
            FunctionSpec::parse_arg("tent:m=4").unwrap(),
            FunctionSpec::Tent { m: 4 }
        );
        assert!(FunctionSpec::parse_arg("indicator:vertex=0.x").is_err());
        assert!(FunctionSpec::parse_arg("table").is_err());
    }

    #[test]
    fn run_spec_round_trip() {
        let spec = RunSpec::from_json(
            r#"{
                "tree": {"kind": "path"},
                "map": {"kind": "affine-path", "a": 2, "b": 0},
                "function": {"kind": "builtin", "name": "linear"},
                "lambda": "3/2",
                "vertex": [0, 0],
                "depth": 6,
                "horizon": 48,
                "sample-depth": 3,
                "format": "json"
            }"#,
        )
        .unwrap();
        assert_eq!(spec.tree, Some(TreeSpec::Path));
        assert!(spec.map.is_some());
        assert_eq!(spec.lambda.as_deref(), Some("3/2"));
        assert_eq!(spec.vertex, Some(path(&[0, 0])));
        assert_eq!(spec.depth, Some(6));
        assert_eq!(spec.sample_depth, Some(3));

        assert!(RunSpec::from_json(r#"{"lambada": "1"}"#).is_err());
        assert!(RunSpec::from_json("{}").unwrap().tree.is_none());
    }

    #[test]
    fn inline_paths() {
        assert_eq!(parse_inline_path("root").unwrap(), VertexPath::root());
        assert_eq!(parse_inline_path("").unwrap(), VertexPath::root());
        assert_eq!(parse_inline_path("0").unwrap(), path(&[0]));
        assert_eq!(parse_inline_path("0.1.2").unwrap(), path(&[0, 1, 2]));
        assert!(parse_inline_path("0..1").is_err());
        assert!(parse_inline_path("a.b").is_err());
    }
}
