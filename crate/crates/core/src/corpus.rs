//! Isomorphism-free enumeration of small bounded-degree graphs and their
//! canonical forms.

use std::collections::BTreeMap;

use crate::canon::{canonical_code, canonical_order, CanonicalCode};
use crate::error::{Error, Result};
use crate::graph::BoundedDegreeGraph;
use crate::stats::{neighborhood_stats, StatVector};

/// Canonical form of an unrooted graph: the sorted codes of its
/// components, each the least rooted code over all roots.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GraphCode(pub Vec<CanonicalCode>);

/// Canonical code and canonical relabeling (old ↦ new) of `g`.
pub fn canonical_graph(g: &BoundedDegreeGraph) -> (GraphCode, Vec<usize>) {
    let n = g.n();
    let mut comps: Vec<(CanonicalCode, Vec<usize>)> = g
        .components()
        .into_iter()
        .map(|comp| {
            comp.iter()
                .map(|&v| {
                    let (ball, verts) = g.ball_with_vertices(v, n).expect("vertex in range");
                    let order = canonical_order(&ball);
                    let code = canonical_code(&ball);
                    (code, order.into_iter().map(|i| verts[i]).collect::<Vec<_>>())
                })
                .min_by(|a, b| a.0.cmp(&b.0))
                .expect("nonempty component")
        })
        .collect();
    comps.sort_by(|a, b| (a.1.len(), &a.0).cmp(&(b.1.len(), &b.0)));
    let mut perm = vec![0; n];
    let mut next = 0;
    for (_, order) in &comps {
        for &v in order {
            perm[v] = next;
            next += 1;
        }
    }
    (GraphCode(comps.into_iter().map(|c| c.0).collect()), perm)
}

/// `g` relabeled into its canonical form.
pub fn canonical_relabel(g: &BoundedDegreeGraph) -> BoundedDegreeGraph {
    g.relabel(&canonical_graph(g).1)
}

pub fn graph_code(g: &BoundedDegreeGraph) -> GraphCode {
    canonical_graph(g).0
}

pub fn isomorphic(g: &BoundedDegreeGraph, h: &BoundedDegreeGraph) -> bool {
    g.n() == h.n() && g.num_edges() == h.num_edges() && graph_code(g) == graph_code(h)
}

/// Graphs of maximum degree `≤ delta` up to isomorphism, in canonical
/// labeling, ordered by vertex count and then by canonical code.
#[derive(Clone, Debug)]
pub struct GraphCorpus {
    delta: usize,
    levels: Vec<Vec<BoundedDegreeGraph>>,
    cap: usize,
    // (r, n) -> statistics of level n, in level order
    stats: BTreeMap<(usize, usize), Vec<StatVector>>,
}

/// Default limit on graphs held by a corpus.
pub const DEFAULT_CORPUS_CAP: usize = 2_000_000;

impl GraphCorpus {
    /// Level `n` holds graphs on `n` vertices; level 0 is empty.
    pub fn new(delta: usize, cap: usize) -> Self {
        let point = BoundedDegreeGraph::new(1, delta, &[]).expect("point");
        GraphCorpus { delta, levels: vec![Vec::new(), vec![point]], cap, stats: BTreeMap::new() }
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    fn total(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Graphs on exactly `n ≥ 1` vertices. Each arises from one on
    /// `n − 1` vertices by adding a vertex; duplicates are merged by code.
    pub fn level(&mut self, n: usize) -> Result<&[BoundedDegreeGraph]> {
        while self.levels.len() <= n {
            let m = self.levels.len() - 1;
            let mut next: BTreeMap<GraphCode, BoundedDegreeGraph> = BTreeMap::new();
            for g in &self.levels[m] {
                let open: Vec<usize> = (0..m).filter(|&v| g.degree(v) < self.delta).collect();
                for mask in 0u64..(1u64 << open.len()) {
                    if mask.count_ones() as usize > self.delta {
                        continue;
                    }
                    let mut edges = g.edges();
                    edges.extend((0..open.len()).filter(|&i| mask >> i & 1 == 1).map(|i| (open[i], m)));
                    let h = BoundedDegreeGraph::new(m + 1, self.delta, &edges)?;
                    let (code, perm) = canonical_graph(&h);
                    next.entry(code).or_insert_with(|| h.relabel(&perm));
                }
                if self.total() + next.len() > self.cap {
                    return Err(Error::CapExceeded {
                        what: format!("graphs of degree ≤ {}", self.delta),
                        cap: self.cap,
                    });
                }
            }
            self.levels.push(next.into_values().collect());
        }
        Ok(&self.levels[n])
    }

    /// Radius-`r` statistics of `level(n)`, computed once.
    pub fn level_stats(&mut self, n: usize, r: usize) -> Result<(&[BoundedDegreeGraph], &[StatVector])> {
        self.level(n)?;
        if !self.stats.contains_key(&(r, n)) {
            let v = self.levels[n].iter().map(|g| neighborhood_stats(g, r)).collect::<Result<Vec<_>>>()?;
            self.stats.insert((r, n), v);
        }
        Ok((&self.levels[n], &self.stats[&(r, n)]))
    }

    /// All graphs with `1..=n_max` vertices, in enumeration order.
    pub fn up_to(&mut self, n_max: usize) -> Result<Vec<BoundedDegreeGraph>> {
        self.level(n_max.max(1))?;
        Ok(self.levels[1..=n_max].iter().flatten().cloned().collect())
    }
}
