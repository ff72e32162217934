//! File formats, output manifests and the on-disk ball catalog cache.
//!
//! Every document is JSON with sorted object keys; rationals are strings
//! `"p/q"` in lowest terms (integers as `"p/1"`) and ball codes
//! are lowercase hex.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::canon::CanonicalCode;
use crate::error::{Error, Result};
use crate::free_group::Word;
use crate::graph::{BoundedDegreeGraph, SchreierGraph};
use crate::local_test::{Clause, LocalTest, Membership};
use crate::pirs::{OpenBox, Region};
use crate::rational::{self, Rational};
use crate::stats::{enumerate_balls, enumerate_schreier_balls, BallCatalog, IndexKind, StatVector};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_canonical_json<T: Serialize>(x: &T) -> Result<String> {
    // `Value` objects are backed by a sorted map
    let v = serde_json::to_value(x).map_err(parse_err)?;
    let mut s = serde_json::to_string_pretty(&v).map_err(parse_err)?;
    s.push('\n');
    Ok(s)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Reads a file and returns its contents with their digest.
pub fn read_with_digest(path: &Path) -> Result<(String, String)> {
    let bytes = fs::read(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let digest = sha256_hex(&bytes);
    let text = String::from_utf8(bytes).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok((text, digest))
}

/// Either kind of input graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyGraph {
    Plain(BoundedDegreeGraph),
    Schreier(SchreierGraph),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum GraphDoc {
    Graph {
        n: usize,
        edges: Vec<[usize; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        delta: Option<usize>,
    },
    Schreier {
        d: usize,
        n: usize,
        perms: Vec<Vec<usize>>,
    },
}

pub fn graph_to_value(g: &AnyGraph) -> Value {
    let doc = match g {
        AnyGraph::Plain(g) => GraphDoc::Graph {
            n: g.n(),
            edges: g.edges().into_iter().map(|(u, v)| [u, v]).collect(),
            delta: (g.delta() != g.max_degree()).then_some(g.delta()),
        },
        AnyGraph::Schreier(g) => GraphDoc::Schreier { d: g.d(), n: g.n(), perms: g.perms().to_vec() },
    };
    serde_json::to_value(doc).expect("graph documents serialize")
}

pub fn graph_from_value(v: Value) -> Result<AnyGraph> {
    match serde_json::from_value(v).map_err(parse_err)? {
        GraphDoc::Graph { n, edges, delta } => {
            let edges: Vec<(usize, usize)> = edges.into_iter().map(|[u, v]| (u, v)).collect();
            Ok(AnyGraph::Plain(match delta {
                Some(delta) => BoundedDegreeGraph::new(n, delta, &edges)?,
                None => BoundedDegreeGraph::from_edges(n, &edges)?,
            }))
        }
        GraphDoc::Schreier { d, n, perms } => {
            if perms.len() != d || perms.iter().any(|p| p.len() != n) {
                return Err(Error::InvalidSchreier(format!("expected {d} permutations of {n} points")));
            }
            Ok(AnyGraph::Schreier(SchreierGraph::new(perms)?))
        }
    }
}

pub fn parse_graph(text: &str) -> Result<AnyGraph> {
    graph_from_value(serde_json::from_str(text).map_err(parse_err)?)
}

fn kind_to_value(kind: IndexKind, r: usize) -> Value {
    match kind {
        IndexKind::Plain { delta } => serde_json::json!({ "kind": "graph", "delta": delta, "r": r }),
        IndexKind::Schreier { d } => serde_json::json!({ "kind": "schreier", "d": d, "r": r }),
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum KindDoc {
    Graph { delta: usize, r: usize },
    Schreier { d: usize, r: usize },
}

fn kind_from_value(v: Value) -> Result<(IndexKind, usize)> {
    Ok(match serde_json::from_value(v).map_err(parse_err)? {
        KindDoc::Graph { delta, r } => (IndexKind::Plain { delta }, r),
        KindDoc::Schreier { d, r } => (IndexKind::Schreier { d }, r),
    })
}

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("missing field {key:?}")))
}

fn rational_from_value(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => rational::parse(s),
        Value::Number(n) if n.is_i64() => Ok(rational::int(n.as_i64().unwrap())),
        _ => Err(Error::Parse(format!("expected a rational string, got {v}"))),
    }
}

/// `{catalog: {kind, delta|d, r}, entries: {hex: "p/q"}}`.
pub fn stats_to_value(s: &StatVector) -> Value {
    let entries: BTreeMap<String, String> =
        s.entries.iter().map(|(c, x)| (c.to_hex(), rational::to_string(x))).collect();
    serde_json::json!({ "catalog": kind_to_value(s.kind, s.radius), "entries": entries })
}

/// Parses and re-validates a statistics vector.
pub fn stats_from_value(v: &Value) -> Result<StatVector> {
    let (kind, radius) = kind_from_value(get(v, "catalog")?.clone())?;
    let obj = get(v, "entries")?.as_object().ok_or_else(|| Error::Parse("entries must be an object".into()))?;
    let mut entries = BTreeMap::new();
    for (k, x) in obj {
        entries.insert(CanonicalCode::from_hex(k)?, rational_from_value(x)?);
    }
    let s = StatVector { radius, kind, entries };
    s.validate()?;
    Ok(s)
}

/// `{catalog: {...}, boxes: [{hex: ["lo", "hi"]}]}`.
pub fn region_to_value(r: &Region) -> Value {
    let boxes: Vec<BTreeMap<String, [String; 2]>> = r
        .boxes
        .iter()
        .map(|b| {
            b.bounds
                .iter()
                .map(|(c, (lo, hi))| (c.to_hex(), [rational::to_string(lo), rational::to_string(hi)]))
                .collect()
        })
        .collect();
    serde_json::json!({ "catalog": kind_to_value(r.kind, r.radius), "boxes": boxes })
}

pub fn region_from_value(v: &Value) -> Result<Region> {
    let (kind, radius) = kind_from_value(get(v, "catalog")?.clone())?;
    let boxes = get(v, "boxes")?.as_array().ok_or_else(|| Error::Parse("boxes must be an array".into()))?;
    let mut out = Vec::with_capacity(boxes.len());
    for b in boxes {
        let obj = b.as_object().ok_or_else(|| Error::Parse("each box must be an object".into()))?;
        let mut bounds = BTreeMap::new();
        for (k, pair) in obj {
            let pair = pair
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| Error::Parse(format!("bounds of {k} must be [lo, hi]")))?;
            bounds
                .insert(CanonicalCode::from_hex(k)?, (rational_from_value(&pair[0])?, rational_from_value(&pair[1])?));
        }
        out.push(OpenBox { bounds });
    }
    Ok(Region { kind, radius, boxes: out })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClauseDoc {
    pattern: Vec<(String, String)>,
    value: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TestDoc {
    d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    clauses: Vec<ClauseDoc>,
    default: String,
}

/// `{d, k?, clauses: [{pattern: [["a1", "in"]], value: "p/q"}], default}`.
pub fn test_to_value(t: &LocalTest) -> Value {
    let clauses = t
        .clauses()
        .iter()
        .map(|c| ClauseDoc {
            pattern: c
                .pattern
                .iter()
                .map(|(w, m)| (w.to_string(), if *m == Membership::In { "in" } else { "out" }.to_string()))
                .collect(),
            value: rational::to_string(&c.value),
        })
        .collect();
    let doc = TestDoc { d: t.d(), k: Some(t.radius()), clauses, default: rational::to_string(t.default_value()) };
    serde_json::to_value(doc).expect("test documents serialize")
}

pub fn test_from_value(v: Value) -> Result<LocalTest> {
    let doc: TestDoc = serde_json::from_value(v).map_err(parse_err)?;
    let mut clauses = Vec::with_capacity(doc.clauses.len());
    for c in doc.clauses {
        let mut pattern = Vec::with_capacity(c.pattern.len());
        for (w, m) in c.pattern {
            let m = match m.as_str() {
                "in" => Membership::In,
                "out" => Membership::Out,
                _ => return Err(Error::Parse(format!("membership must be \"in\" or \"out\", got {m:?}"))),
            };
            pattern.push((Word::parse(&w)?, m));
        }
        clauses.push(Clause::new(pattern, rational::parse(&c.value)?));
    }
    let default = rational::parse(&doc.default)?;
    match doc.k {
        Some(k) => LocalTest::new(doc.d, k, clauses, default),
        None => LocalTest::with_minimal_window(doc.d, clauses, default),
    }
}

/// Provenance record attached to every command output.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Manifest {
    pub command: String,
    /// Input name to SHA-256 of its bytes.
    pub inputs: BTreeMap<String, String>,
    pub params: BTreeMap<String, Value>,
    pub version: String,
    pub deterministic: bool,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        Manifest {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            params: BTreeMap::new(),
            version: TOOL_VERSION.to_string(),
            deterministic: true,
        }
    }

    pub fn input(&mut self, name: &str, digest: String) -> &mut Self {
        self.inputs.insert(name.to_string(), digest);
        self
    }

    pub fn param(&mut self, name: &str, v: impl Into<Value>) -> &mut Self {
        self.params.insert(name.to_string(), v.into());
        self
    }
}

pub fn catalog_to_value(c: &BallCatalog) -> Value {
    let codes: Vec<String> = c.codes.iter().map(CanonicalCode::to_hex).collect();
    serde_json::json!({ "catalog": kind_to_value(c.kind, c.radius), "codes": codes, "partial": c.partial })
}

pub fn catalog_from_value(v: &Value) -> Result<BallCatalog> {
    let (kind, radius) = kind_from_value(get(v, "catalog")?.clone())?;
    let codes = get(v, "codes")?.as_array().ok_or_else(|| Error::Parse("codes must be an array".into()))?;
    let mut out = Vec::with_capacity(codes.len());
    for c in codes {
        out.push(CanonicalCode::from_hex(c.as_str().ok_or_else(|| Error::Parse("codes must be strings".into()))?)?);
    }
    if !out.is_sorted() {
        return Err(Error::Parse("catalog codes are not sorted".into()));
    }
    let partial = get(v, "partial")?.as_bool().ok_or_else(|| Error::Parse("partial must be a boolean".into()))?;
    Ok(BallCatalog { kind, radius, codes: out, partial })
}

fn cache_path(dir: &Path, kind: IndexKind, r: usize, cap: usize) -> PathBuf {
    let k = match kind {
        IndexKind::Plain { delta } => format!("graph-delta{delta}"),
        IndexKind::Schreier { d } => format!("schreier-d{d}"),
    };
    dir.join(format!("ballcat-{k}-r{r}-cap{cap}-v{TOOL_VERSION}.json"))
}

/// Builds a catalog, reading and filling the cache in `dir` when given.
/// A cached file that fails to parse is rebuilt and overwritten.
pub fn cached_catalog(dir: Option<&Path>, kind: IndexKind, r: usize, cap: usize) -> Result<BallCatalog> {
    let build = || match kind {
        IndexKind::Plain { delta } => enumerate_balls(delta, r, cap),
        IndexKind::Schreier { d } => enumerate_schreier_balls(d, r, cap),
    };
    let Some(dir) = dir else { return build() };
    let path = cache_path(dir, kind, r, cap);
    if let Ok(text) = fs::read_to_string(&path) {
        if let Ok(c) = serde_json::from_str::<Value>(&text).map_err(parse_err).and_then(|v| catalog_from_value(&v)) {
            if c.kind == kind && c.radius == r {
                return Ok(c);
            }
        }
    }
    let c = build()?;
    fs::create_dir_all(dir).map_err(|e| Error::Parse(format!("{}: {e}", dir.display())))?;
    fs::write(&path, to_canonical_json(&catalog_to_value(&c))?)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok(c)
}
