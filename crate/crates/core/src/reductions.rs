//! Oracle-driven reductions between regularity bounds, local-statistic
//! decision functions and `ε`-nets. True bounds are not computable, so
//! every entry point takes the bound as a caller-supplied oracle and
//! records how far it is trusted.

use std::fmt;

use crate::corpus::GraphCorpus;
use crate::encoding::{
    decode_graph, decode_schreier, encoded_epsilon, graph_to_schreier_radius, schreier_to_graph_radius, GadgetLayout,
};
use crate::error::{Error, Result};
use crate::graph::BoundedDegreeGraph;
use crate::local_test::enumerate_schreier_graphs;
use crate::pirs::Region;
use crate::rational::{int, Rational};
use crate::stats::{neighborhood_stats, stat_distance, StatVector};

/// Which regularity bound an oracle claims to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleKind {
    /// `N_Δ(ε, r)` for graphs of maximum degree `≤ delta`.
    Sparse { delta: usize },
    /// `N*_d(ε, r)` for `F_d` Schreier graphs.
    Schreier { d: usize },
}

type BoundFn<'a> = Box<dyn Fn(&Rational, usize) -> usize + 'a>;

/// A claimed regularity bound `(ε, r) ↦ N`.
pub struct BoundOracle<'a> {
    f: BoundFn<'a>,
    pub kind: OracleKind,
    /// Free-form statement of why the bound is believed.
    pub trust: String,
}

impl<'a> BoundOracle<'a> {
    pub fn new(kind: OracleKind, trust: impl Into<String>, f: impl Fn(&Rational, usize) -> usize + 'a) -> Self {
        BoundOracle { f: Box::new(f), kind, trust: trust.into() }
    }

    /// A stub returning `n` everywhere.
    pub fn constant(kind: OracleKind, n: usize) -> Self {
        Self::new(kind, format!("constant stub {n}"), move |_, _| n)
    }

    /// The bound, clamped to at least 1.
    pub fn bound(&self, eps: &Rational, r: usize) -> usize {
        (self.f)(eps, r).max(1)
    }
}

impl fmt::Debug for BoundOracle<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoundOracle({:?}, {:?})", self.kind, self.trust)
    }
}

/// Answer of a local-statistic decision function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LsdfAnswer {
    /// A graph whose statistics lie in the query set.
    Yes(BoundedDegreeGraph),
    No,
    /// The search stopped at this vertex cap without a trusted bound.
    Unknown(usize),
}

/// A set of statistics vectors that can be tested for membership.
pub trait StatSet {
    fn contains(&self, v: &StatVector) -> bool;
}

impl StatSet for Region {
    fn contains(&self, v: &StatVector) -> bool {
        Region::contains(self, v)
    }
}

/// Points at `d_∞` distance at least `radius` from every center: the
/// complement of the union of open balls.
#[derive(Clone, Debug)]
pub struct OutsideBalls {
    pub centers: Vec<StatVector>,
    pub radius: Rational,
}

impl StatSet for OutsideBalls {
    fn contains(&self, v: &StatVector) -> bool {
        self.centers.iter().all(|c| stat_distance(c, v).map(|x| x >= self.radius).unwrap_or(false))
    }
}

fn find_in(corpus: &mut GraphCorpus, r: usize, n_max: usize, s: &dyn StatSet) -> Result<Option<BoundedDegreeGraph>> {
    for n in 1..=n_max {
        let (graphs, stats) = corpus.level_stats(n, r)?;
        if let Some(i) = stats.iter().position(|v| s.contains(v)) {
            return Ok(Some(graphs[i].clone()));
        }
    }
    Ok(None)
}

/// Decides by brute force over all graphs with at most `oracle(ε, r)`
/// vertices. "Yes" always carries a witness of least size; "no" is only
/// as good as the oracle.
pub fn lsdf_from_bound(
    corpus: &mut GraphCorpus,
    eps: &Rational,
    r: usize,
    s: &dyn StatSet,
    oracle: &BoundOracle,
) -> Result<LsdfAnswer> {
    if oracle.kind != (OracleKind::Sparse { delta: corpus.delta() }) {
        return Err(Error::Mismatch(format!("need a sparse bound for Δ = {}, got {:?}", corpus.delta(), oracle.kind)));
    }
    Ok(match find_in(corpus, r, oracle.bound(eps, r), s)? {
        Some(g) => LsdfAnswer::Yes(g),
        None => LsdfAnswer::No,
    })
}

/// Searches up to `size_cap` vertices; answers "no" only when a trusted
/// bound is supplied and the cap reaches it.
pub fn capped_lsdf(
    corpus: &mut GraphCorpus,
    r: usize,
    s: &dyn StatSet,
    size_cap: usize,
    trusted_n: Option<usize>,
) -> Result<LsdfAnswer> {
    Ok(match find_in(corpus, r, size_cap, s)? {
        Some(g) => LsdfAnswer::Yes(g),
        None if trusted_n.is_some_and(|n| size_cap >= n) => LsdfAnswer::No,
        None => LsdfAnswer::Unknown(size_cap),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Built from "no" answers of an oracle-backed decision function.
    OracleCertified { trust: String },
    /// Stopped by a size or iteration cap; coverage is not certified.
    CapLimited { cap: usize },
}

/// Graphs whose radius-`r` statistics are meant to come within `ε` of
/// every graph of maximum degree `≤ delta`.
#[derive(Clone, Debug)]
pub struct EpsilonNet {
    pub delta: usize,
    pub eps: Rational,
    pub r: usize,
    pub graphs: Vec<BoundedDegreeGraph>,
    pub stats: Vec<StatVector>,
    pub provenance: Provenance,
}

impl EpsilonNet {
    /// Largest member.
    pub fn max_vertices(&self) -> usize {
        self.graphs.iter().map(BoundedDegreeGraph::n).max().unwrap_or(0)
    }

    /// Least distance from `v` to a member.
    pub fn distance_to(&self, v: &StatVector) -> Result<Rational> {
        let mut best: Option<Rational> = None;
        for s in &self.stats {
            let x = stat_distance(s, v)?;
            if best.as_ref().is_none_or(|b| x < *b) {
                best = Some(x);
            }
        }
        best.ok_or(Error::EmptyGraph)
    }

    pub fn covers(&self, g: &BoundedDegreeGraph) -> Result<bool> {
        Ok(self.distance_to(&neighborhood_stats(g, self.r)?)? <= self.eps)
    }
}

/// Builds an `ε`-net from a decision function. Each round asks for a graph
/// `ε/2`-far from all members; a "yes" adds the least such graph, a "no"
/// ends the loop. `lsdf` receives `(ε/2, r, set)`.
pub fn net_from_lsdf(
    corpus: &mut GraphCorpus,
    eps: &Rational,
    r: usize,
    lsdf: &mut dyn FnMut(&mut GraphCorpus, &Rational, usize, &dyn StatSet) -> Result<LsdfAnswer>,
    trust: &str,
    max_rounds: usize,
) -> Result<(EpsilonNet, usize)> {
    let half = eps / int(2);
    let mut graphs: Vec<BoundedDegreeGraph> = Vec::new();
    let mut stats: Vec<StatVector> = Vec::new();
    let mut provenance = None;
    for _ in 0..max_rounds {
        let far = OutsideBalls { centers: stats.clone(), radius: half.clone() };
        match lsdf(corpus, &half, r, &far)? {
            LsdfAnswer::Yes(w) => {
                let ws = neighborhood_stats(&w, r)?;
                if !far.contains(&ws) {
                    return Err(Error::Mismatch("decision function returned a witness outside the set".into()));
                }
                // least witness in the fixed enumeration
                let g = find_in(corpus, r, w.n(), &far)?.unwrap_or(w);
                stats.push(neighborhood_stats(&g, r)?);
                graphs.push(g);
            }
            LsdfAnswer::No => {
                provenance = Some(Provenance::OracleCertified { trust: trust.to_string() });
                break;
            }
            LsdfAnswer::Unknown(cap) => {
                provenance = Some(Provenance::CapLimited { cap });
                break;
            }
        }
    }
    let provenance = provenance.unwrap_or(Provenance::CapLimited { cap: max_rounds });
    let net = EpsilonNet { delta: corpus.delta(), eps: eps.clone(), r, graphs, stats, provenance };
    let n = net.max_vertices();
    Ok((net, n))
}

/// Scans graphs by increasing size and keeps every graph more than `ε`
/// from all kept ones.
pub fn greedy_net(corpus: &mut GraphCorpus, eps: &Rational, r: usize, size_cap: usize) -> Result<EpsilonNet> {
    if size_cap == 0 {
        return Err(Error::Mismatch("size cap must be at least 1".into()));
    }
    let mut graphs: Vec<BoundedDegreeGraph> = Vec::new();
    let mut stats: Vec<StatVector> = Vec::new();
    for n in 1..=size_cap {
        let (level, level_stats) = corpus.level_stats(n, r)?;
        for (g, s) in level.iter().zip(level_stats) {
            let far = stats.iter().map(|t| stat_distance(t, s)).collect::<Result<Vec<_>>>()?;
            if far.iter().all(|x| x > eps) {
                stats.push(s.clone());
                graphs.push(g.clone());
            }
        }
    }
    Ok(EpsilonNet {
        delta: corpus.delta(),
        eps: eps.clone(),
        r,
        graphs,
        stats,
        provenance: Provenance::CapLimited { cap: size_cap },
    })
}

/// Result of transferring a bound through an encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferredBound {
    pub n: usize,
    pub eps0: Rational,
    pub r0: usize,
    /// Value of the input oracle at `(ε₀, r₀)`.
    pub oracle_value: usize,
    /// Largest decoded size found by enumeration, when enumeration ran.
    pub enumerated: Option<usize>,
    /// Set when nothing decoded to a nonempty object and `n` fell back to 1.
    pub sentinel: bool,
    pub trust: String,
}

/// A sparse bound from a Schreier bound: decode every `F_2` action with at
/// most `N*_2(ε₀, r₀)` points and take the largest decoded graph.
pub fn sparse_bound_from_schreier(
    oracle: &BoundOracle,
    delta: usize,
    eps: &Rational,
    r: usize,
    tuple_cap: usize,
) -> Result<TransferredBound> {
    if oracle.kind != (OracleKind::Schreier { d: 2 }) {
        return Err(Error::Mismatch(format!("need a Schreier bound for d = 2, got {:?}", oracle.kind)));
    }
    let eps0 = encoded_epsilon(eps);
    let r0 = graph_to_schreier_radius(delta, r);
    let m = oracle.bound(&eps0, r0);
    let mut best = 0;
    for n in 1..=m {
        for g in enumerate_schreier_graphs(2, n, false, tuple_cap)? {
            best = best.max(decode_schreier(&g, delta)?.0.n());
        }
    }
    Ok(TransferredBound {
        n: best.max(1),
        eps0,
        r0,
        oracle_value: m,
        enumerated: Some(best),
        sentinel: best == 0,
        trust: format!("transferred from: {}", oracle.trust),
    })
}

/// A Schreier bound from a sparse bound for `Δ = 3`: decode graphs with at
/// most `N_3(ε₀, r₀)` vertices. Every good block owns its cycle and its
/// outgoing gadgets, so a decoded action has at most `⌊M / block⌋` points;
/// when `M ≤ enum_limit` this count is cross-checked by enumeration.
pub fn schreier_bound_from_sparse(
    oracle: &BoundOracle,
    corpus: &mut GraphCorpus,
    d: usize,
    eps: &Rational,
    r: usize,
    enum_limit: usize,
) -> Result<TransferredBound> {
    if oracle.kind != (OracleKind::Sparse { delta: 3 }) || corpus.delta() != 3 {
        return Err(Error::Mismatch(format!("need a sparse bound for Δ = 3, got {:?}", oracle.kind)));
    }
    let layout = GadgetLayout::new(d)?;
    let eps0 = encoded_epsilon(eps);
    let r0 = schreier_to_graph_radius(d, r);
    let m = oracle.bound(&eps0, r0);
    let counted = m / layout.block_size();
    let enumerated = if m <= enum_limit {
        let mut best = 0;
        for g in corpus.up_to(m)? {
            best = best.max(decode_graph(&g, d)?.0.n());
        }
        assert!(best <= counted, "decoded {best} points from {m} vertices");
        Some(best)
    } else {
        None
    };
    Ok(TransferredBound {
        n: counted.max(1),
        eps0,
        r0,
        oracle_value: m,
        enumerated,
        sentinel: counted == 0,
        trust: format!("transferred from: {}", oracle.trust),
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::canon::canonical_code;
    use crate::pirs::OpenBox;
    use crate::rational::{one, ratio};
    use crate::stats::IndexKind;

    fn region(delta: usize, r: usize, boxes: Vec<OpenBox>) -> Region {
        Region { kind: IndexKind::Plain { delta }, radius: r, boxes }
    }

    fn whole(delta: usize, r: usize) -> Region {
        region(delta, r, vec![OpenBox::default()])
    }

    #[test]
    fn lsdf_examples() {
        let mut c = GraphCorpus::new(3, 10_000);
        let o = BoundOracle::constant(OracleKind::Sparse { delta: 3 }, 4);
        let yes = lsdf_from_bound(&mut c, &ratio(1, 4), 1, &whole(3, 1), &o).unwrap();
        assert!(matches!(yes, LsdfAnswer::Yes(ref g) if g.n() == 1));
        let no = lsdf_from_bound(&mut c, &ratio(1, 4), 1, &region(3, 1, vec![]), &o).unwrap();
        assert_eq!(no, LsdfAnswer::No);
        // more than half of the vertices see an isolated point
        let point = canonical_code(&BoundedDegreeGraph::new(1, 3, &[]).unwrap().ball(0, 1).unwrap());
        let b = OpenBox { bounds: BTreeMap::from([(point, (ratio(1, 2), ratio(11, 10)))]) };
        let ans = lsdf_from_bound(&mut c, &ratio(1, 4), 1, &region(3, 1, vec![b]), &o).unwrap();
        assert!(matches!(ans, LsdfAnswer::Yes(ref g) if g.n() == 1));
    }

    #[test]
    fn capped_examples() {
        let mut c = GraphCorpus::new(3, 10_000);
        assert!(matches!(capped_lsdf(&mut c, 1, &whole(3, 1), 1, None).unwrap(), LsdfAnswer::Yes(_)));
        assert_eq!(capped_lsdf(&mut c, 1, &region(3, 1, vec![]), 1, Some(1)).unwrap(), LsdfAnswer::No);
        assert_eq!(capped_lsdf(&mut c, 1, &region(3, 1, vec![]), 2, None).unwrap(), LsdfAnswer::Unknown(2));
        let tri = canonical_code(&BoundedDegreeGraph::complete(3).ball(0, 1).unwrap());
        let b = OpenBox { bounds: BTreeMap::from([(tri, (ratio(1, 2), ratio(11, 10)))]) };
        match capped_lsdf(&mut c, 1, &region(3, 1, vec![b]), 3, None).unwrap() {
            LsdfAnswer::Yes(g) => assert!(crate::corpus::isomorphic(&g, &BoundedDegreeGraph::complete(3))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nets() {
        let mut c = GraphCorpus::new(3, 10_000);
        let oracle = BoundOracle::constant(OracleKind::Sparse { delta: 3 }, 3);
        let mut lsdf =
            |c: &mut GraphCorpus, e: &Rational, r: usize, s: &dyn StatSet| lsdf_from_bound(c, e, r, s, &oracle);
        let (net, n) = net_from_lsdf(&mut c, &ratio(1, 2), 0, &mut lsdf, "stub", 100).unwrap();
        assert_eq!((net.graphs.len(), n), (1, 1));
        let (net, n) = net_from_lsdf(&mut c, &one(), 2, &mut lsdf, "stub", 100).unwrap();
        assert!(matches!(net.provenance, Provenance::OracleCertified { .. }));
        assert!(n <= 3);
        for g in c.up_to(3).unwrap() {
            assert!(net.distance_to(&neighborhood_stats(&g, 2).unwrap()).unwrap() < ratio(1, 2));
        }

        let single = greedy_net(&mut c, &one(), 1, 5).unwrap();
        assert_eq!(single.graphs.len(), 1);
        let mut c2 = GraphCorpus::new(2, 10_000);
        let g = greedy_net(&mut c2, &ratio(1, 4), 1, 8).unwrap();
        for i in 0..g.stats.len() {
            for j in 0..i {
                assert!(stat_distance(&g.stats[i], &g.stats[j]).unwrap() > ratio(1, 4));
            }
        }
        for h in c2.up_to(8).unwrap() {
            assert!(g.covers(&h).unwrap());
        }
        let mut rng = crate::sample::rng(5);
        for _ in 0..50 {
            let n = rand::Rng::random_range(&mut rng, 1..=30);
            let h = crate::sample::random_graph(&mut rng, n, 2);
            assert!(g.covers(&h).unwrap(), "{h:?}");
        }
    }

    #[test]
    fn transfers() {
        let o = BoundOracle::constant(OracleKind::Schreier { d: 2 }, 2);
        let t = sparse_bound_from_schreier(&o, 3, &ratio(1, 2), 0, 1000).unwrap();
        assert!(t.n >= 1 && t.n <= 2);
        assert_eq!(t.r0, 4);
        let one_point = BoundOracle::constant(OracleKind::Schreier { d: 2 }, 1);
        let t = sparse_bound_from_schreier(&one_point, 3, &ratio(1, 2), 0, 1000).unwrap();
        assert!(t.sentinel);
        assert_eq!(t.n, 1);

        let mut c = GraphCorpus::new(3, 100_000);
        let s17 = BoundOracle::constant(OracleKind::Sparse { delta: 3 }, 17);
        let t = schreier_bound_from_sparse(&s17, &mut c, 2, &ratio(1, 2), 1, 6).unwrap();
        assert_eq!((t.n, t.r0, t.enumerated), (1, 24, None));
        let s6 = BoundOracle::constant(OracleKind::Sparse { delta: 3 }, 6);
        let t = schreier_bound_from_sparse(&s6, &mut c, 2, &ratio(1, 2), 1, 6).unwrap();
        assert_eq!((t.n, t.enumerated, t.sentinel), (1, Some(0), true));
    }
}
