//! Seeded end-to-end checks of the library's core guarantees, shared by the
//! `selftest` command and the acceptance test suite. Every comparison is
//! exact.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::canon::canonical_code;
use crate::corpus::{isomorphic, GraphCorpus};
use crate::encoding::{decode_graph, decode_schreier, encode_graph, encode_schreier, GadgetLayout, OrderingPolicy};
use crate::error::{Error, Result};
use crate::free_group::{
    enumerate_pseudo_subgroups, pseudo_to_ball, stab_window, stallings_membership, Letter, Window, Word,
    DEFAULT_PSEUDO_CAP,
};
use crate::graph::SchreierGraph;
use crate::local_test::{sofic_lower_search, standard_suite, DEFAULT_TUPLE_CAP};
use crate::pirs::{
    build_pirs, check_containment, irs_upper_bound, m_machine, max_over_image, stats_map, Containment, MachineCaps,
    MachineOutcome, OpenBox, Region,
};
use crate::rational::{one, ratio, zero, Rational};
use crate::reductions::{lsdf_from_bound, net_from_lsdf, BoundOracle, LsdfAnswer, OracleKind, Provenance, StatSet};
use crate::sample::{random_graph, random_graph_without_isolated, random_rational, random_schreier, rng, SeededRng};
use crate::stats::{enumerate_schreier_balls, neighborhood_stats, schreier_stats, stat_distance};

/// Seed shared by every check unless overridden.
pub const DEFAULT_SEED: u64 = 20_240_601;

pub const CRITERIA: [(u8, &str); 9] = [
    (1, "statistics vectors sum to one"),
    (2, "stabilizer windows determine Schreier balls"),
    (3, "codec round trips"),
    (4, "pseudo-subgroup census and Stallings membership"),
    (5, "P-IRS soundness and monotone images"),
    (6, "sofic lower bounds below IRS upper bounds"),
    (7, "m_machine behavior"),
    (8, "LSDF-driven net covers a random sample"),
    (9, "byte-identical command reruns"),
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {} [{mark}] {}: {}", self.id, self.title, self.detail)
    }
}

/// Fails the enclosing check with a formatted message.
macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(Error::Mismatch(format!($($msg)+)));
        }
    };
}

/// Runs criterion `id` (1 to 9). Criterion 9 reruns every command of
/// [`crate::cli`] in-process.
pub fn run(id: u8, seed: u64) -> Report {
    let title = CRITERIA.iter().find(|(i, _)| *i == id).map(|(_, t)| *t).unwrap_or("unknown criterion");
    let outcome = match id {
        1 => normalization(seed),
        2 => duality(seed),
        3 => codecs(seed),
        4 => census(seed),
        5 => pirs_soundness(seed),
        6 => sofic_sandwich(),
        7 => machine(seed),
        8 => lsdf_net(seed),
        9 => crate::cli::determinism_check(),
        _ => Err(Error::Mismatch(format!("no criterion {id}"))),
    };
    match outcome {
        Ok(detail) => Report { id, title, passed: true, detail },
        Err(e) => Report { id, title, passed: false, detail: e.to_string() },
    }
}

pub fn run_all(seed: u64) -> Vec<Report> {
    CRITERIA.iter().map(|&(id, _)| run(id, seed)).collect()
}

fn normalization(seed: u64) -> Result<String> {
    let mut rng = rng(seed);
    for i in 0..100 {
        let n = rng.random_range(1..=40);
        let delta = rng.random_range(1..=4);
        let g = random_graph(&mut rng, n, delta);
        for r in 0..=2 {
            let s = neighborhood_stats(&g, r)?;
            ensure!(s.total() == one(), "graph {i} (n = {n}) at r = {r} sums to {}", s.total());
            s.validate()?;
        }
    }
    for i in 0..100 {
        let n = rng.random_range(1..=8);
        let g = random_schreier(&mut rng, 2, n);
        for r in 0..=2 {
            let s = schreier_stats(&g, r)?;
            ensure!(s.total() == one(), "Schreier graph {i} at r = {r} sums to {}", s.total());
            s.validate()?;
        }
    }
    Ok("100 graphs and 100 Schreier graphs at r = 0, 1, 2".into())
}

fn schreier_corpus(rng: &mut SeededRng, count: usize, n_max: usize) -> Vec<SchreierGraph> {
    (0..count)
        .map(|_| {
            let n = rng.random_range(1..=n_max);
            random_schreier(rng, 2, n)
        })
        .collect()
}

fn duality(seed: u64) -> Result<String> {
    let mut rng = rng(seed);
    let corpus = schreier_corpus(&mut rng, 200, 6);
    let mut checked = 0;
    for r in 0..=1 {
        let window = Arc::new(Window::new(2, 2 * r + 1)?);
        for (i, g) in corpus.iter().enumerate() {
            for v in 0..g.n() {
                let from_window = canonical_code(&pseudo_to_ball(&stab_window(g, v, &window)?, r)?);
                let direct = canonical_code(&g.ball(v, r)?);
                ensure!(from_window == direct, "graph {i}, vertex {v}, r = {r}: {from_window} vs {direct}");
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (graph, vertex, radius) triples"))
}

fn codecs(seed: u64) -> Result<String> {
    let mut rng = rng(seed);
    for i in 0..100 {
        let delta = rng.random_range(1..=4);
        // a perfect matching needs an even vertex count
        let n = if delta == 1 { 2 * rng.random_range(1..=10) } else { rng.random_range(2..=20) };
        let g = random_graph_without_isolated(&mut rng, n, delta);
        let (h, bad) = decode_schreier(&encode_graph(&g, &OrderingPolicy::Ascending)?, delta)?;
        ensure!(bad == zero(), "graph {i}: bad fraction {bad}");
        ensure!(isomorphic(&g, &h), "graph {i} does not survive the round trip");
    }
    let layout = GadgetLayout::new(2)?;
    for i in 0..100 {
        let n = rng.random_range(1..=6);
        let g = random_schreier(&mut rng, 2, n);
        let (h, bad) = decode_graph(&encode_schreier(&g, &layout)?, 2)?;
        ensure!(bad == zero(), "Schreier graph {i}: bad fraction {bad}");
        ensure!(h.canonical_form() == g.canonical_form(), "Schreier graph {i} is not conjugate to its round trip");
    }
    let one_point = encode_schreier(&SchreierGraph::trivial(2), &layout)?;
    ensure!(
        one_point.n() == 17 && one_point.max_degree() == 3,
        "one-point encoding has {} vertices and maximum degree {}",
        one_point.n(),
        one_point.max_degree()
    );
    Ok("100 graph and 100 Schreier round trips; one point encodes to 17 vertices of degree ≤ 3".into())
}

fn random_word(rng: &mut SeededRng, d: usize, max_len: usize) -> Word {
    let len = rng.random_range(1..=max_len);
    loop {
        let w = Word::reduce((0..len).map(|_| Letter::from_slot(rng.random_range(0..2 * d), d)));
        if !w.is_empty() {
            return w;
        }
    }
}

/// Reduced products of at most `factors` generators or inverses.
fn short_products(gens: &[Word], factors: usize) -> HashSet<Word> {
    let alphabet: Vec<Word> = gens.iter().flat_map(|g| [g.clone(), g.inverse()]).collect();
    let mut seen: HashSet<Word> = HashSet::from([Word::identity()]);
    let mut frontier = vec![Word::identity()];
    for _ in 0..factors {
        let mut next = Vec::new();
        for w in &frontier {
            for a in &alphabet {
                let p = w.mul(a);
                if seen.insert(p.clone()) {
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    seen
}

/// Elements of `⟨gens⟩` reachable from the identity by right
/// multiplication with generators while every partial product has length
/// at most `max_len`.
fn bounded_closure(gens: &[Word], max_len: usize) -> HashSet<Word> {
    let alphabet: Vec<Word> = gens.iter().flat_map(|g| [g.clone(), g.inverse()]).collect();
    let mut seen: HashSet<Word> = HashSet::from([Word::identity()]);
    let mut stack = vec![Word::identity()];
    while let Some(w) = stack.pop() {
        for a in &alphabet {
            let p = w.mul(a);
            if p.len() <= max_len && seen.insert(p.clone()) {
                stack.push(p);
            }
        }
    }
    seen
}

fn census(seed: u64) -> Result<String> {
    let w1 = Arc::new(Window::new(2, 1)?);
    let count = enumerate_pseudo_subgroups(&w1, DEFAULT_PSEUDO_CAP)?.len();
    ensure!(count == 4, "W_2(1) has {count} pseudo-subgroups");
    let w2 = Window::new(2, 2)?;
    ensure!(w2.len() == 17, "|W_2(2)| = {}", w2.len());
    let mut rng = rng(seed);
    let probe = Window::new(2, 3)?;
    let mut members = 0;
    for i in 0..50 {
        let m = rng.random_range(1..=2);
        let gens: Vec<Word> = (0..m).map(|_| random_word(&mut rng, 2, 3)).collect();
        for p in &short_products(&gens, 6) {
            ensure!(stallings_membership(2, &gens, p), "set {i}: product {p} rejected");
        }
        let reachable = bounded_closure(&gens, 9);
        for w in probe.words() {
            let inside = stallings_membership(2, &gens, w);
            ensure!(inside == reachable.contains(w), "set {i}: {w} membership {inside} disagrees with the closure");
            members += inside as usize;
        }
    }
    Ok(format!("4 pseudo-subgroups, |W_2(2)| = 17, 50 generator sets agree ({members} short members)"))
}

fn pirs_soundness(seed: u64) -> Result<String> {
    let mut rng = rng(seed);
    let corpus = schreier_corpus(&mut rng, 100, 6);
    let polys = (1..=3).map(|k| build_pirs(2, k, DEFAULT_PSEUDO_CAP)).collect::<Result<Vec<_>>>()?;
    for p in &polys {
        for (i, g) in corpus.iter().enumerate() {
            let mu = p.empirical(g)?;
            ensure!(p.contains_point(&mu), "graph {i}: empirical law outside P-IRS_2({})", p.k());
        }
    }
    let maps = polys.iter().map(|p| stats_map(p, 0, DEFAULT_PSEUDO_CAP)).collect::<Result<Vec<_>>>()?;
    let width = maps[0].catalog.len();
    for j in 0..20 {
        let obj: Vec<Rational> = (0..width).map(|_| random_rational(&mut rng, 10, 7)).collect();
        let best = (0..3).map(|i| max_over_image(&polys[i], &maps[i], &obj)).collect::<Result<Vec<_>>>()?;
        ensure!(best[1] <= best[0] && best[2] <= best[1], "objective {j}: optima {best:?} increase with k");
    }
    Ok("100 empirical laws feasible for k = 1, 2, 3; 20 objectives monotone".into())
}

fn sofic_sandwich() -> Result<String> {
    let mut lines = Vec::new();
    for (name, t) in standard_suite() {
        let (lower, _) = sofic_lower_search(&t, 5, DEFAULT_TUPLE_CAP)?;
        let upper = irs_upper_bound(&t, 3.max(t.radius()), DEFAULT_PSEUDO_CAP)?;
        ensure!(lower <= upper, "{name}: lower {lower} above upper {upper}");
        if name == "a1_in" {
            ensure!(lower == one() && upper == one(), "{name}: expected 1 = 1, got {lower}, {upper}");
        }
        if name == "contradictory" {
            ensure!(lower == zero() && upper == zero(), "{name}: expected 0 = 0, got {lower}, {upper}");
        }
        lines.push(format!("{name} {lower}≤{upper}"));
    }
    Ok(lines.join(", "))
}

fn machine(seed: u64) -> Result<String> {
    let catalog = enumerate_schreier_balls(2, 0, DEFAULT_PSEUDO_CAP)?;
    let caps = MachineCaps::default();
    let whole = Region::whole_cube(&catalog);
    let out = m_machine(2, 0, &whole, 3, caps)?;
    ensure!(out == MachineOutcome::Halted { k: 1 }, "whole cube: {out:?}");

    let trivial = canonical_code(&SchreierGraph::trivial(2).ball(0, 0)?);
    let punctured = Region {
        kind: catalog.kind,
        radius: 0,
        boxes: vec![OpenBox { bounds: [(trivial.clone(), (ratio(-1, 10), one()))].into() }],
    };
    match m_machine(2, 0, &punctured, 3, caps)? {
        MachineOutcome::CapReached { k_max: 3, witness } => {
            ensure!(witness.get(&trivial) == one(), "persisting witness is not the trivial action: {witness:?}")
        }
        other => return Err(Error::Mismatch(format!("punctured cube: {other:?}"))),
    }

    let mut rng = rng(seed);
    for i in 0..5 {
        let f = catalog.codes[rng.random_range(0..catalog.len())].clone();
        let a = ratio(rng.random_range(1..=10), 10);
        let b = &a - ratio(rng.random_range(1..=10), 20);
        let mut boxes = vec![
            OpenBox { bounds: [(f.clone(), (ratio(-1, 10), a))].into() },
            OpenBox { bounds: [(f, (b, ratio(11, 10)))].into() },
        ];
        // an extra box that may or may not overlap
        let g = catalog.codes[rng.random_range(0..catalog.len())].clone();
        boxes.push(OpenBox { bounds: [(g, (ratio(1, 4), ratio(3, 4)))].into() });
        let region = Region { kind: catalog.kind, radius: 0, boxes };
        let MachineOutcome::Halted { k } = m_machine(2, 0, &region, 3, caps)? else {
            return Err(Error::Mismatch(format!("region {i} did not halt")));
        };
        let next = build_pirs(2, k + 1, DEFAULT_PSEUDO_CAP)?;
        let map = stats_map(&next, 0, DEFAULT_PSEUDO_CAP)?;
        let c = check_containment(&next, &map, &region, caps.branches)?;
        ensure!(c == Containment::Contained, "region {i} halted at {k} but not at {}", k + 1);
    }
    Ok("whole cube halts at k = 1; punctured cube keeps its witness to k = 3; 5 regions stay halted".into())
}

fn lsdf_net(seed: u64) -> Result<String> {
    let eps = ratio(1, 2);
    let (delta, r, n_max) = (3, 1, 8);
    let mut corpus = GraphCorpus::new(delta, crate::corpus::DEFAULT_CORPUS_CAP);
    let oracle = BoundOracle::new(OracleKind::Sparse { delta }, "exhaustive search to 8 vertices", |_, _| n_max);
    let mut witnesses = Vec::new();
    let mut lsdf = |c: &mut GraphCorpus, e: &Rational, r: usize, s: &dyn StatSet| {
        let ans = lsdf_from_bound(c, e, r, s, &oracle)?;
        if let LsdfAnswer::Yes(g) = &ans {
            witnesses.push((g.clone(), s.contains(&neighborhood_stats(g, r)?)));
        }
        Ok(ans)
    };
    let (net, _) = net_from_lsdf(&mut corpus, &eps, r, &mut lsdf, &oracle.trust, 10_000)?;
    ensure!(
        matches!(net.provenance, Provenance::OracleCertified { .. }),
        "loop did not terminate: {:?}",
        net.provenance
    );
    ensure!(witnesses.iter().all(|(_, ok)| *ok), "a yes-witness failed to re-validate");
    let half = &eps / crate::rational::int(2);
    for i in 0..net.stats.len() {
        for j in 0..i {
            ensure!(stat_distance(&net.stats[i], &net.stats[j])? >= half, "members {j} and {i} are closer than ε/2");
        }
    }
    let mut rng = rng(seed);
    let mut worst = zero();
    for i in 0..50 {
        let n = rng.random_range(1..=40);
        let g = random_graph(&mut rng, n, delta);
        let dist = net.distance_to(&neighborhood_stats(&g, r)?)?;
        ensure!(dist <= eps, "sample {i} (n = {n}) is at distance {dist}");
        worst = worst.max(dist);
    }
    Ok(format!(
        "{} members, {} witnesses re-validated, worst sample distance {worst}",
        net.graphs.len(),
        witnesses.len()
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_criteria_pass() {
        for id in [2, 4] {
            let r = run(id, DEFAULT_SEED);
            assert!(r.passed, "{r}");
        }
        assert!(!run(42, DEFAULT_SEED).passed);
    }

    #[test]
    fn short_products_are_closed_under_small_steps() {
        let p = short_products(&[Word::parse("a1").unwrap()], 3);
        assert_eq!(p.len(), 7);
        let c = bounded_closure(&[Word::parse("a1^2 a2").unwrap(), Word::parse("a1 a2").unwrap()], 6);
        assert!(c.contains(&Word::parse("a1").unwrap()));
    }
}
