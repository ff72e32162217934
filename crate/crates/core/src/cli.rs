//! The `locstat` command line. Commands run in-process through [`run`],
//! which returns the exit code and the exact bytes to print, so reruns can
//! be compared without spawning processes.
//!
//! Exit codes: 0 success, 1 property violation, 2 usage or input error,
//! 3 resource cap reached.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::audit;
use crate::corpus::{GraphCorpus, DEFAULT_CORPUS_CAP};
use crate::encoding::{decode_graph, decode_schreier, encode_graph, encode_schreier, GadgetLayout, OrderingPolicy};
use crate::error::{Error, Result};
use crate::free_group::DEFAULT_PSEUDO_CAP;
use crate::graph::SchreierGraph;
use crate::io::{
    cached_catalog, graph_from_value, graph_to_value, read_with_digest, region_from_value, region_to_value,
    stats_to_value, test_from_value, test_to_value, to_canonical_json, AnyGraph, Manifest,
};
use crate::local_test::{
    enumerate_schreier_graphs, sofic_bracket, sofic_lower_search, standard_suite, DEFAULT_TUPLE_CAP,
};
use crate::pirs::{irs_upper_bound, m_machine, MachineCaps, MachineOutcome, Region};
use crate::rational::{self, Rational};
use crate::reductions::{
    capped_lsdf, greedy_net, lsdf_from_bound, net_from_lsdf, schreier_bound_from_sparse, sparse_bound_from_schreier,
    BoundOracle, EpsilonNet, LsdfAnswer, OracleKind, Provenance, StatSet, TransferredBound,
};
use crate::stats::{neighborhood_stats, schreier_stats, IndexKind, StatVector};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "locstat", version, about = "Exact local statistics of bounded-degree graphs and Schreier graphs")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CatalogKind {
    Graph,
    Schreier,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NetMode {
    Greedy,
    Lsdf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    /// Sparse bound from a Schreier bound for `F_2`.
    SchreierToSparse,
    /// Schreier bound from a sparse bound for degree 3.
    SparseToSchreier,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Radius-r neighborhood statistics of a graph or Schreier graph.
    Stats {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        r: usize,
    },
    /// Catalog of all radius-r balls.
    Ballcat {
        #[arg(long, value_enum)]
        kind: CatalogKind,
        /// Degree bound (graph catalogs).
        #[arg(long)]
        delta: Option<usize>,
        /// Rank (Schreier catalogs).
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        r: usize,
        /// Largest ball, in vertices (graph catalogs).
        #[arg(long, default_value_t = 64)]
        cap_vertices: usize,
        /// Pseudo-subgroups enumerated (Schreier catalogs).
        #[arg(long, default_value_t = DEFAULT_PSEUDO_CAP)]
        cap_pseudo: usize,
        /// Directory for cached catalogs.
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Graph to F_2 action, or Schreier graph to cubic graph.
    Encode {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Inverse of `encode`.
    Decode {
        #[arg(long)]
        graph: PathBuf,
        /// Degree bound when decoding an F_2 action.
        #[arg(long)]
        delta: Option<usize>,
        /// Rank when decoding a cubic graph.
        #[arg(long)]
        d: Option<usize>,
    },
    /// Schreier graphs on n points.
    EnumSchreier {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        /// One graph per conjugacy class.
        #[arg(long)]
        dedup: bool,
        /// Print the graphs, not only their number.
        #[arg(long)]
        list: bool,
        #[arg(long, default_value_t = DEFAULT_TUPLE_CAP)]
        cap_tuples: usize,
    },
    /// Best value of a local test over small Schreier graphs.
    SoficLb {
        /// Local test document; omit to run the built-in suite.
        #[arg(long)]
        test: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        /// Schreier regularity bound, for a two-sided bracket.
        #[arg(long, requires = "theta")]
        bound: Option<usize>,
        /// Target bracket width.
        #[arg(long)]
        theta: Option<String>,
        #[arg(long, default_value_t = DEFAULT_TUPLE_CAP)]
        cap_tuples: usize,
        #[arg(long, default_value_t = DEFAULT_PSEUDO_CAP)]
        cap_pseudo: usize,
    },
    /// Upper bound on a local test over P-IRS(k).
    PirsUpper {
        #[arg(long)]
        test: Option<PathBuf>,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_PSEUDO_CAP)]
        cap_pseudo: usize,
    },
    /// Searches k = 2r+1..=kmax for a P-IRS image inside a region.
    PirsCheck {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        region: PathBuf,
        #[arg(long)]
        kmax: usize,
        #[arg(long, default_value_t = DEFAULT_PSEUDO_CAP)]
        cap_pseudo: usize,
        #[arg(long, default_value_t = 100_000)]
        cap_branches: usize,
    },
    /// An epsilon-net of small graphs.
    Net {
        #[arg(long)]
        delta: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        eps: String,
        #[arg(long, value_enum, default_value_t = NetMode::Greedy)]
        mode: NetMode,
        /// Largest graph scanned (greedy mode).
        #[arg(long, default_value_t = 6)]
        size_cap: usize,
        /// Claimed regularity bound (lsdf mode).
        #[arg(long)]
        bound: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        cap_rounds: usize,
        #[arg(long, default_value_t = DEFAULT_CORPUS_CAP)]
        cap_graphs: usize,
    },
    /// Is there a small graph with statistics in a region?
    Lsdf {
        #[arg(long)]
        delta: usize,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        region: PathBuf,
        /// Claimed regularity bound; a miss below it answers "no".
        #[arg(long)]
        bound: Option<usize>,
        /// Largest graph searched when no bound is given.
        #[arg(long, default_value_t = 6)]
        size_cap: usize,
        #[arg(long, default_value_t = DEFAULT_CORPUS_CAP)]
        cap_graphs: usize,
    },
    /// Transfers a claimed regularity bound through an encoding.
    Reduce {
        #[arg(long, value_enum)]
        direction: Direction,
        /// The claimed input bound (a constant).
        #[arg(long)]
        bound: usize,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        r: usize,
        /// Degree bound of the sparse side.
        #[arg(long, default_value_t = 3)]
        delta: usize,
        /// Rank of the Schreier side.
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = DEFAULT_TUPLE_CAP)]
        cap_tuples: usize,
        /// Largest corpus enumerated to cross-check a count.
        #[arg(long, default_value_t = 8)]
        enum_limit: usize,
        #[arg(long, default_value_t = DEFAULT_CORPUS_CAP)]
        cap_graphs: usize,
    },
    /// Runs the seeded acceptance checks.
    Selftest {
        /// Criteria to run, e.g. `1,2,9`; all by default.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u8>,
        #[arg(long, default_value_t = audit::DEFAULT_SEED)]
        seed: u64,
    },
}

/// Everything a command prints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Done {
    code: i32,
    manifest: Manifest,
    result: Value,
    table: String,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, color: bool) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: EXIT_OK, stdout: text, stderr: String::new() }
            };
        }
    };
    match execute(&cli.command, color) {
        Ok(done) => {
            let stdout = match cli.format {
                Format::Json => match to_canonical_json(&json!({ "manifest": done.manifest, "result": done.result })) {
                    Ok(s) => s,
                    Err(e) => return failure(&e),
                },
                Format::Table => done.table,
            };
            Outcome { code: done.code, stdout, stderr: String::new() }
        }
        Err(e) => failure(&e),
    }
}

fn failure(e: &Error) -> Outcome {
    let code = match e {
        Error::CapExceeded { .. } => EXIT_CAP,
        _ => EXIT_USAGE,
    };
    Outcome { code, stdout: String::new(), stderr: format!("error: {e}\n") }
}

/// Left-aligned columns separated by two spaces.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (i, c) in row.iter().enumerate() {
            width[i] = width[i].max(c.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, c) in cells.iter().enumerate() {
            if i + 1 == cells.len() {
                s.push_str(c);
            } else {
                let _ = write!(s, "{c:<w$}  ", w = width[i]);
            }
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(header.to_vec());
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
    out
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn load_json(path: &Path) -> Result<(Value, String)> {
    let (text, digest) = read_with_digest(path)?;
    let v = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok((v, digest))
}

/// Accepts a bare document or the output of another command that carries
/// it under `result.<field>`.
fn unwrap_doc(v: Value, field: &str) -> Value {
    match v.pointer(&format!("/result/{field}")) {
        Some(inner) if v.get("manifest").is_some() => inner.clone(),
        _ => v,
    }
}

fn load_graph(path: &Path) -> Result<(AnyGraph, Value, String)> {
    let (v, digest) = load_json(path)?;
    let g = graph_from_value(unwrap_doc(v.clone(), "graph"))?;
    Ok((g, v, digest))
}

fn parse_rational(s: &str, name: &str) -> Result<Rational> {
    rational::parse(s).map_err(|_| usage(format!("--{name} must be a rational such as 1/2, got {s:?}")))
}

fn stats_rows(s: &StatVector) -> Result<Vec<Vec<String>>> {
    s.entries.iter().map(|(c, x)| Ok(vec![c.to_hex(), c.decode()?.n().to_string(), rational::to_string(x)])).collect()
}

fn graph_summary(g: &AnyGraph) -> String {
    match g {
        AnyGraph::Plain(g) => format!("graph n={} edges={:?}", g.n(), g.edges()),
        AnyGraph::Schreier(g) => format!("schreier d={} n={} perms={:?}", g.d(), g.n(), g.perms()),
    }
}

fn load_test(path: Option<&Path>, m: &mut Manifest) -> Result<Vec<(String, crate::local_test::LocalTest)>> {
    match path {
        Some(p) => {
            let (v, digest) = load_json(p)?;
            m.input("test", digest);
            Ok(vec![("test".to_string(), test_from_value(unwrap_doc(v, "test"))?)])
        }
        None => Ok(standard_suite().into_iter().map(|(n, t)| (n.to_string(), t)).collect()),
    }
}

fn net_value(net: &EpsilonNet) -> Value {
    let provenance = match &net.provenance {
        Provenance::OracleCertified { trust } => json!({ "certified": true, "trust": trust }),
        Provenance::CapLimited { cap } => json!({ "certified": false, "cap": cap }),
    };
    json!({
        "delta": net.delta,
        "eps": rational::to_string(&net.eps),
        "r": net.r,
        "members": net.graphs.iter().map(|g| graph_to_value(&AnyGraph::Plain(g.clone()))).collect::<Vec<_>>(),
        "max_vertices": net.max_vertices(),
        "provenance": provenance,
    })
}

fn transfer_value(t: &TransferredBound) -> Value {
    json!({
        "n": t.n,
        "eps0": rational::to_string(&t.eps0),
        "r0": t.r0,
        "oracle_value": t.oracle_value,
        "enumerated": t.enumerated,
        "sentinel": t.sentinel,
        "trust": t.trust,
    })
}

fn execute(cmd: &Command, color: bool) -> Result<Done> {
    match cmd {
        Command::Stats { graph, r } => {
            let mut m = Manifest::new("stats");
            let (g, _, digest) = load_graph(graph)?;
            m.input("graph", digest).param("r", *r);
            let s = match &g {
                AnyGraph::Plain(g) => neighborhood_stats(g, *r)?,
                AnyGraph::Schreier(g) => schreier_stats(g, *r)?,
            };
            s.validate()?;
            let table = table(&["code", "vertices", "fraction"], &stats_rows(&s)?);
            Ok(Done { code: EXIT_OK, manifest: m, result: json!({ "stats": stats_to_value(&s) }), table })
        }
        Command::Ballcat { kind, delta, d, r, cap_vertices, cap_pseudo, cache_dir } => {
            let mut m = Manifest::new("ballcat");
            let k = match kind {
                CatalogKind::Graph => IndexKind::Plain { delta: delta.ok_or_else(|| usage("--delta is required"))? },
                CatalogKind::Schreier => IndexKind::Schreier { d: d.ok_or_else(|| usage("--d is required"))? },
            };
            let cap = match k {
                IndexKind::Plain { delta } => {
                    m.param("delta", delta).param("cap_vertices", *cap_vertices);
                    *cap_vertices
                }
                IndexKind::Schreier { d } => {
                    m.param("d", d).param("cap_pseudo", *cap_pseudo);
                    *cap_pseudo
                }
            };
            m.param("r", *r);
            let c = cached_catalog(cache_dir.as_deref(), k, *r, cap)?;
            let rows = c
                .codes
                .iter()
                .enumerate()
                .map(|(i, code)| Ok(vec![i.to_string(), code.to_hex(), code.decode()?.n().to_string()]))
                .collect::<Result<Vec<_>>>()?;
            let mut t = table(&["index", "code", "vertices"], &rows);
            if c.partial {
                t.push_str("partial: vertex cap reached\n");
            }
            let code = if c.partial { EXIT_CAP } else { EXIT_OK };
            Ok(Done { code, manifest: m, result: crate::io::catalog_to_value(&c), table: t })
        }
        Command::Encode { graph } => {
            let mut m = Manifest::new("encode");
            let (g, _, digest) = load_graph(graph)?;
            m.input("graph", digest);
            let (out, result) = match &g {
                AnyGraph::Plain(g) => {
                    let s = AnyGraph::Schreier(encode_graph(g, &OrderingPolicy::Ascending)?);
                    let v = json!({ "graph": graph_to_value(&s), "delta": g.delta() });
                    (s, v)
                }
                AnyGraph::Schreier(s) => {
                    let h = AnyGraph::Plain(encode_schreier(s, &GadgetLayout::new(s.d())?)?);
                    let v = json!({ "graph": graph_to_value(&h), "d": s.d() });
                    (h, v)
                }
            };
            Ok(Done { code: EXIT_OK, manifest: m, result, table: format!("{}\n", graph_summary(&out)) })
        }
        Command::Decode { graph, delta, d } => {
            let mut m = Manifest::new("decode");
            let (g, raw, digest) = load_graph(graph)?;
            m.input("graph", digest);
            let carried =
                |key: &str| raw.pointer(&format!("/result/{key}")).and_then(Value::as_u64).map(|x| x as usize);
            let (out, bad) = match &g {
                AnyGraph::Schreier(s) => {
                    let delta = delta.or(carried("delta")).ok_or_else(|| usage("--delta is required"))?;
                    m.param("delta", delta);
                    let (h, bad) = decode_schreier(s, delta)?;
                    (AnyGraph::Plain(h), bad)
                }
                AnyGraph::Plain(h) => {
                    let d = d.or(carried("d")).ok_or_else(|| usage("--d is required"))?;
                    m.param("d", d);
                    let (s, bad) = decode_graph(h, d)?;
                    (AnyGraph::Schreier(s), bad)
                }
            };
            let result = json!({ "graph": graph_to_value(&out), "bad_fraction": rational::to_string(&bad) });
            let table = format!("{}\nbad fraction {}\n", graph_summary(&out), rational::to_string(&bad));
            Ok(Done { code: EXIT_OK, manifest: m, result, table })
        }
        Command::EnumSchreier { d, n, dedup, list, cap_tuples } => {
            let mut m = Manifest::new("enum-schreier");
            m.param("d", *d).param("n", *n).param("dedup", *dedup).param("cap_tuples", *cap_tuples);
            let mut count = 0usize;
            let mut graphs = Vec::new();
            let mut rows = Vec::new();
            for g in enumerate_schreier_graphs(*d, *n, *dedup, *cap_tuples)? {
                count += 1;
                if *list {
                    rows.push(vec![count.to_string(), format!("{:?}", g.perms())]);
                    graphs.push(graph_to_value(&AnyGraph::Schreier(g)));
                }
            }
            let mut t = if *list { table(&["#", "perms"], &rows) } else { String::new() };
            let _ = writeln!(t, "count {count}");
            let mut result = json!({ "count": count });
            if *list {
                result["graphs"] = Value::Array(graphs);
            }
            Ok(Done { code: EXIT_OK, manifest: m, result, table: t })
        }
        Command::SoficLb { test, n_max, bound, theta, cap_tuples, cap_pseudo } => {
            let mut m = Manifest::new("sofic-lb");
            m.param("n_max", *n_max).param("cap_tuples", *cap_tuples);
            let tests = load_test(test.as_deref(), &mut m)?;
            let mut results = serde_json::Map::new();
            let mut rows = Vec::new();
            for (name, t) in &tests {
                let (lower, witness) = sofic_lower_search(t, *n_max, *cap_tuples)?;
                let mut entry = json!({
                    "lower": rational::to_string(&lower),
                    "witness": graph_to_value(&AnyGraph::Schreier(witness.clone())),
                    "test": test_to_value(t),
                });
                let mut row = vec![name.clone(), rational::to_string(&lower), format!("{:?}", witness.perms())];
                if let (Some(b), Some(th)) = (bound, theta) {
                    let th = parse_rational(th, "theta")?;
                    let oracle = |_: &Rational, _: usize| *b;
                    let br = sofic_bracket(t, &th, &oracle, (*cap_pseudo, *cap_tuples))?;
                    entry["bracket"] = json!({
                        "lower": rational::to_string(&br.lower),
                        "upper": rational::to_string(&br.upper),
                        "epsilon": rational::to_string(&br.epsilon),
                        "n_bound": br.n_bound,
                        "degenerate_m": br.degenerate_m,
                        "witness": graph_to_value(&AnyGraph::Schreier(br.witness.clone())),
                    });
                    row.push(format!("[{}, {}]", rational::to_string(&br.lower), rational::to_string(&br.upper)));
                } else {
                    row.push("-".into());
                }
                results.insert(name.clone(), entry);
                rows.push(row);
            }
            if let (Some(b), Some(_)) = (bound, theta) {
                m.param("bound", *b).param("theta", theta.clone().unwrap_or_default());
            }
            let table = table(&["test", "lower", "witness", "bracket"], &rows);
            Ok(Done { code: EXIT_OK, manifest: m, result: Value::Object(results), table })
        }
        Command::PirsUpper { test, k, cap_pseudo } => {
            let mut m = Manifest::new("pirs-upper");
            m.param("k", *k).param("cap_pseudo", *cap_pseudo);
            let tests = load_test(test.as_deref(), &mut m)?;
            let mut results = serde_json::Map::new();
            let mut rows = Vec::new();
            for (name, t) in &tests {
                let u = irs_upper_bound(t, *k, *cap_pseudo)?;
                results.insert(name.clone(), json!({ "upper": rational::to_string(&u), "test": test_to_value(t) }));
                rows.push(vec![name.clone(), rational::to_string(&u)]);
            }
            Ok(Done {
                code: EXIT_OK,
                manifest: m,
                result: Value::Object(results),
                table: table(&["test", "upper"], &rows),
            })
        }
        Command::PirsCheck { d, r, region, kmax, cap_pseudo, cap_branches } => {
            let mut m = Manifest::new("pirs-check");
            let (v, digest) = load_json(region)?;
            m.input("region", digest).param("d", *d).param("r", *r).param("kmax", *kmax);
            m.param("cap_pseudo", *cap_pseudo).param("cap_branches", *cap_branches);
            let reg = region_from_value(&unwrap_doc(v, "region"))?;
            let caps = MachineCaps { pseudo: *cap_pseudo, branches: *cap_branches };
            match m_machine(*d, *r, &reg, *kmax, caps)? {
                MachineOutcome::Halted { k } => Ok(Done {
                    code: EXIT_OK,
                    manifest: m,
                    result: json!({ "outcome": "halted", "k": k }),
                    table: format!("halted({k})\n"),
                }),
                MachineOutcome::CapReached { k_max, witness } => {
                    let mut t = format!("not contained up to k = {k_max}; witness:\n");
                    t.push_str(&table(&["code", "vertices", "fraction"], &stats_rows(&witness)?));
                    Ok(Done {
                        code: EXIT_VIOLATION,
                        manifest: m,
                        result: json!({ "outcome": "cap_reached", "k_max": k_max, "witness": stats_to_value(&witness) }),
                        table: t,
                    })
                }
            }
        }
        Command::Net { delta, r, eps, mode, size_cap, bound, cap_rounds, cap_graphs } => {
            let mut m = Manifest::new("net");
            let e = parse_rational(eps, "eps")?;
            m.param("delta", *delta).param("r", *r).param("eps", rational::to_string(&e));
            let mut corpus = GraphCorpus::new(*delta, *cap_graphs);
            let net = match mode {
                NetMode::Greedy => {
                    m.param("mode", "greedy").param("size_cap", *size_cap);
                    greedy_net(&mut corpus, &e, *r, *size_cap)?
                }
                NetMode::Lsdf => {
                    let b = bound.ok_or_else(|| usage("--bound is required in lsdf mode"))?;
                    m.param("mode", "lsdf").param("bound", b).param("cap_rounds", *cap_rounds);
                    let oracle = BoundOracle::constant(OracleKind::Sparse { delta: *delta }, b);
                    let mut lsdf = |c: &mut GraphCorpus, e: &Rational, r: usize, s: &dyn StatSet| {
                        lsdf_from_bound(c, e, r, s, &oracle)
                    };
                    net_from_lsdf(&mut corpus, &e, *r, &mut lsdf, &oracle.trust, *cap_rounds)?.0
                }
            };
            let rows: Vec<Vec<String>> = net
                .graphs
                .iter()
                .enumerate()
                .map(|(i, g)| vec![i.to_string(), g.n().to_string(), format!("{:?}", g.edges())])
                .collect();
            let mut t = table(&["#", "n", "edges"], &rows);
            let _ = writeln!(t, "{} members, largest {} vertices", net.graphs.len(), net.max_vertices());
            Ok(Done { code: EXIT_OK, manifest: m, result: net_value(&net), table: t })
        }
        Command::Lsdf { delta, eps, region, bound, size_cap, cap_graphs } => {
            let mut m = Manifest::new("lsdf");
            let e = parse_rational(eps, "eps")?;
            let (v, digest) = load_json(region)?;
            let reg: Region = region_from_value(&unwrap_doc(v, "region"))?;
            if reg.kind != (IndexKind::Plain { delta: *delta }) {
                return Err(usage(format!("region is indexed by {:?}, expected degree {delta} balls", reg.kind)));
            }
            m.input("region", digest).param("delta", *delta).param("eps", rational::to_string(&e));
            let mut corpus = GraphCorpus::new(*delta, *cap_graphs);
            let ans = match bound {
                Some(b) => {
                    m.param("bound", *b);
                    let oracle = BoundOracle::constant(OracleKind::Sparse { delta: *delta }, *b);
                    lsdf_from_bound(&mut corpus, &e, reg.radius, &reg, &oracle)?
                }
                None => {
                    m.param("size_cap", *size_cap);
                    capped_lsdf(&mut corpus, reg.radius, &reg, *size_cap, None)?
                }
            };
            Ok(match ans {
                LsdfAnswer::Yes(g) => {
                    let s = neighborhood_stats(&g, reg.radius)?;
                    debug_assert!(reg.contains(&s));
                    let g = AnyGraph::Plain(g);
                    Done {
                        code: EXIT_OK,
                        table: format!("yes: {}\n", graph_summary(&g)),
                        result: json!({ "answer": "yes", "graph": graph_to_value(&g), "stats": stats_to_value(&s) }),
                        manifest: m,
                    }
                }
                LsdfAnswer::No => {
                    Done { code: EXIT_OK, manifest: m, result: json!({ "answer": "no" }), table: "no\n".into() }
                }
                LsdfAnswer::Unknown(cap) => Done {
                    code: EXIT_CAP,
                    manifest: m,
                    result: json!({ "answer": "unknown", "size_cap": cap }),
                    table: format!("unknown: nothing found up to {cap} vertices\n"),
                },
            })
        }
        Command::Reduce { direction, bound, eps, r, delta, d, cap_tuples, enum_limit, cap_graphs } => {
            let mut m = Manifest::new("reduce");
            let e = parse_rational(eps, "eps")?;
            m.param("bound", *bound).param("eps", rational::to_string(&e)).param("r", *r);
            let t = match direction {
                Direction::SchreierToSparse => {
                    m.param("direction", "schreier-to-sparse").param("delta", *delta).param("cap_tuples", *cap_tuples);
                    let oracle = BoundOracle::constant(OracleKind::Schreier { d: 2 }, *bound);
                    sparse_bound_from_schreier(&oracle, *delta, &e, *r, *cap_tuples)?
                }
                Direction::SparseToSchreier => {
                    m.param("direction", "sparse-to-schreier").param("d", *d).param("enum_limit", *enum_limit);
                    let oracle = BoundOracle::constant(OracleKind::Sparse { delta: 3 }, *bound);
                    let mut corpus = GraphCorpus::new(3, *cap_graphs);
                    schreier_bound_from_sparse(&oracle, &mut corpus, *d, &e, *r, *enum_limit)?
                }
            };
            let table = format!(
                "N = {} (input bound {} at eps0 = {}, r0 = {}){}\n",
                t.n,
                t.oracle_value,
                rational::to_string(&t.eps0),
                t.r0,
                if t.sentinel { ", sentinel" } else { "" }
            );
            Ok(Done { code: EXIT_OK, manifest: m, result: transfer_value(&t), table })
        }
        Command::Selftest { criteria, seed } => {
            let mut m = Manifest::new("selftest");
            m.param("seed", *seed);
            let ids: Vec<u8> =
                if criteria.is_empty() { audit::CRITERIA.iter().map(|c| c.0).collect() } else { criteria.clone() };
            m.param("criteria", ids.clone());
            let reports: Vec<audit::Report> = ids.iter().map(|&id| audit::run(id, *seed)).collect();
            let all = reports.iter().all(|r| r.passed);
            let mut t = String::new();
            for r in &reports {
                let mark = match (r.passed, color) {
                    (true, true) => "\x1b[32mPASS\x1b[0m",
                    (false, true) => "\x1b[31mFAIL\x1b[0m",
                    (true, false) => "PASS",
                    (false, false) => "FAIL",
                };
                let _ = writeln!(t, "{mark}  {}  {}: {}", r.id, r.title, r.detail);
            }
            let result = json!({
                "passed": all,
                "criteria": reports
                    .iter()
                    .map(|r| json!({ "id": r.id, "title": r.title, "passed": r.passed, "detail": r.detail }))
                    .collect::<Vec<_>>(),
            });
            Ok(Done { code: if all { EXIT_OK } else { EXIT_VIOLATION }, manifest: m, result, table: t })
        }
    }
}

/// Writes a fixed set of inputs to a scratch directory and returns it with
/// every non-selftest command line over them.
pub fn sample_invocations(dir: &Path) -> Result<Vec<Vec<String>>> {
    let io_err = |e: std::io::Error| Error::Parse(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io_err)?;
    let write = |name: &str, v: &Value| -> Result<String> {
        let p = dir.join(name);
        std::fs::write(&p, to_canonical_json(v)?).map_err(io_err)?;
        Ok(p.display().to_string())
    };
    let k13 = write("k13.json", &graph_to_value(&AnyGraph::Plain(crate::graph::BoundedDegreeGraph::star(3))))?;
    let edge = write("edge.json", &graph_to_value(&AnyGraph::Plain(crate::graph::BoundedDegreeGraph::path(2))))?;
    let sch = SchreierGraph::new(vec![vec![1, 2, 0], vec![0, 2, 1]])?;
    let sch = write("schreier.json", &graph_to_value(&AnyGraph::Schreier(sch)))?;
    let cat = crate::stats::enumerate_schreier_balls(2, 0, DEFAULT_PSEUDO_CAP)?;
    let allcube = write("allcube.json", &region_to_value(&Region::whole_cube(&cat)))?;
    let cat3 = crate::stats::enumerate_balls(3, 1, 64)?;
    let cube3 = write("cube3.json", &region_to_value(&Region::whole_cube(&cat3)))?;
    let tests = standard_suite();
    let test = write("a1sq.json", &test_to_value(&tests[1].1))?;
    let enc = run(["locstat", "encode", "--graph", &edge], false);
    if enc.code != EXIT_OK {
        return Err(Error::Mismatch(format!("encode failed: {}", enc.stderr)));
    }
    let enc_path = dir.join("edge.encoded.json");
    std::fs::write(&enc_path, &enc.stdout).map_err(io_err)?;
    let enc_path = enc_path.display().to_string();
    let cmds: Vec<Vec<&str>> = vec![
        vec!["stats", "--graph", &k13, "--r", "1"],
        vec!["stats", "--graph", &sch, "--r", "1"],
        vec!["--format", "table", "stats", "--graph", &k13, "--r", "1"],
        vec!["ballcat", "--kind", "graph", "--delta", "3", "--r", "1"],
        vec!["ballcat", "--kind", "schreier", "--d", "2", "--r", "1", "--format", "table"],
        vec!["encode", "--graph", &edge],
        vec!["encode", "--graph", &sch],
        vec!["decode", "--graph", &enc_path],
        vec!["enum-schreier", "--d", "2", "--n", "3", "--dedup", "--list"],
        vec!["sofic-lb", "--test", &test, "--n-max", "3"],
        vec!["pirs-upper", "--test", &test, "--k", "2"],
        vec!["pirs-check", "--d", "2", "--r", "0", "--region", &allcube, "--kmax", "3"],
        vec!["net", "--delta", "2", "--r", "1", "--eps", "1/2", "--size-cap", "5"],
        vec!["net", "--delta", "3", "--r", "1", "--eps", "1/2", "--mode", "lsdf", "--bound", "4"],
        vec!["lsdf", "--delta", "3", "--eps", "1/4", "--region", &cube3, "--bound", "3"],
        vec!["reduce", "--direction", "schreier-to-sparse", "--bound", "2", "--eps", "1/2", "--r", "0"],
        vec!["reduce", "--direction", "sparse-to-schreier", "--bound", "17", "--eps", "1/2", "--r", "1"],
    ];
    Ok(cmds.into_iter().map(|c| std::iter::once("locstat").chain(c).map(String::from).collect()).collect())
}

/// Runs every sample invocation twice and compares the output bytes.
pub fn determinism_check() -> Result<String> {
    let dir = std::env::temp_dir().join(format!("locstat-determinism-{}", std::process::id()));
    let cmds = sample_invocations(&dir)?;
    let mut checked = 0;
    for c in &cmds {
        let a = run(c.iter(), false);
        let b = run(c.iter(), false);
        if a != b {
            return Err(Error::Mismatch(format!("{} differs between runs", c[1..].join(" "))));
        }
        if a.code != EXIT_OK {
            return Err(Error::Mismatch(format!("{} exited with {}: {}", c[1..].join(" "), a.code, a.stderr)));
        }
        checked += 1;
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{checked} commands byte-identical across two runs"))
}
