//! Neighborhood statistics, the `d_∞` metric and ball catalogs.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::ball::RootedBall;
use crate::canon::{canonical_code, CanonicalCode};
use crate::error::{Error, Result};
use crate::free_group::{enumerate_pseudo_subgroups, pseudo_to_ball, Window};
use crate::graph::{BoundedDegreeGraph, SchreierGraph};
use crate::rational::{int, one, zero, Rational};

/// Which balls index a statistics vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IndexKind {
    /// Unlabeled balls of maximum degree at most `delta`.
    Plain { delta: usize },
    /// Edge-labeled balls of `F_d` Schreier graphs.
    Schreier { d: usize },
}

/// Sparse exact statistics vector `F ↦ u_r(F, G)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatVector {
    pub radius: usize,
    pub kind: IndexKind,
    pub entries: BTreeMap<CanonicalCode, Rational>,
}

impl StatVector {
    /// Mass of `code` (zero when absent).
    pub fn get(&self, code: &CanonicalCode) -> Rational {
        self.entries.get(code).cloned().unwrap_or_else(zero)
    }

    pub fn total(&self) -> Rational {
        self.entries.values().fold(zero(), |a, b| a + b)
    }

    /// Checks that entries lie in `[0, 1]`, sum to 1 and match the kind.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Mismatch(m));
        for (code, x) in &self.entries {
            if x.is_negative() || *x > one() || x.is_zero() {
                return bad(format!("entry {code} = {x} outside (0, 1]"));
            }
            let ball = code.decode()?;
            let ok = match self.kind {
                IndexKind::Plain { delta } => {
                    ball.labels().is_none() && (0..ball.n()).all(|v| ball.neighbors(v).len() <= delta)
                }
                IndexKind::Schreier { d } => ball.labels() == Some(d),
            };
            if !ok || ball.radius() > self.radius {
                return bad(format!("entry {code} does not match the index kind or radius"));
            }
        }
        if self.total() != one() {
            return bad(format!("entries sum to {}", self.total()));
        }
        Ok(())
    }

    /// Weighted average `Σ w_i x_i / Σ w_i` of vectors with equal parameters.
    pub fn mix(parts: &[(Rational, &StatVector)]) -> Result<StatVector> {
        let (_, first) = parts.first().ok_or(Error::EmptyGraph)?;
        let total = parts.iter().fold(zero(), |a, (w, _)| a + w);
        let mut entries: BTreeMap<CanonicalCode, Rational> = BTreeMap::new();
        for (w, v) in parts {
            check_same(first, v)?;
            for (c, x) in &v.entries {
                *entries.entry(c.clone()).or_insert_with(zero) += w * x / &total;
            }
        }
        Ok(StatVector { radius: first.radius, kind: first.kind, entries })
    }
}

fn check_same(x: &StatVector, y: &StatVector) -> Result<()> {
    if x.radius != y.radius || x.kind != y.kind {
        return Err(Error::Mismatch(format!(
            "statistics at radius {} ({:?}) and radius {} ({:?})",
            x.radius, x.kind, y.radius, y.kind
        )));
    }
    Ok(())
}

fn tally(n: usize, codes: impl Iterator<Item = Result<CanonicalCode>>) -> Result<BTreeMap<CanonicalCode, Rational>> {
    let mut counts: BTreeMap<CanonicalCode, i64> = BTreeMap::new();
    for c in codes {
        *counts.entry(c?).or_default() += 1;
    }
    let n = int(n as i64);
    Ok(counts.into_iter().map(|(c, k)| (c, int(k) / &n)).collect())
}

/// `u_r(·, G)`: the fraction of vertices with each ball type.
pub fn neighborhood_stats(g: &BoundedDegreeGraph, r: usize) -> Result<StatVector> {
    if g.n() == 0 {
        return Err(Error::EmptyGraph);
    }
    let entries = tally(g.n(), (0..g.n()).map(|v| g.ball(v, r).map(|b| canonical_code(&b))))?;
    Ok(StatVector { radius: r, kind: IndexKind::Plain { delta: g.delta() }, entries })
}

/// `u*_r(·, G)` for a Schreier graph.
pub fn schreier_stats(g: &SchreierGraph, r: usize) -> Result<StatVector> {
    if g.n() == 0 {
        return Err(Error::EmptyGraph);
    }
    let entries = tally(g.n(), (0..g.n()).map(|v| g.ball(v, r).map(|b| canonical_code(&b))))?;
    Ok(StatVector { radius: r, kind: IndexKind::Schreier { d: g.d() }, entries })
}

/// `d_∞(x, y) = max_F |x(F) − y(F)|`, exactly.
pub fn stat_distance(x: &StatVector, y: &StatVector) -> Result<Rational> {
    check_same(x, y)?;
    let keys: BTreeSet<&CanonicalCode> = x.entries.keys().chain(y.entries.keys()).collect();
    Ok(keys.into_iter().map(|c| (x.get(c) - y.get(c)).abs()).max().unwrap_or_else(zero))
}

/// Sorted, duplicate-free list of ball codes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallCatalog {
    pub kind: IndexKind,
    pub radius: usize,
    pub codes: Vec<CanonicalCode>,
    /// Set when the vertex cap cut the enumeration short.
    pub partial: bool,
}

impl BallCatalog {
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn index_of(&self, code: &CanonicalCode) -> Option<usize> {
        self.codes.binary_search(code).ok()
    }

    pub fn contains(&self, code: &CanonicalCode) -> bool {
        self.index_of(code).is_some()
    }

    /// Dense coordinates of `v` in catalog order.
    pub fn coordinates(&self, v: &StatVector) -> Result<Vec<Rational>> {
        if v.kind != self.kind || v.radius != self.radius {
            return Err(Error::Mismatch("statistics and catalog parameters differ".into()));
        }
        if let Some(c) = v.entries.keys().find(|c| !self.contains(c)) {
            return Err(Error::Mismatch(format!("ball {c} is not in the catalog")));
        }
        Ok(self.codes.iter().map(|c| v.get(c)).collect())
    }
}

/// Rooted graphs of maximum degree `≤ delta` with every vertex within `r`
/// of the root, up to rooted isomorphism, with at most `cap` vertices.
///
/// Every such graph arises by adding its vertices in BFS order, each new
/// vertex joined to a nonempty set of earlier ones including one at
/// distance `< r`; the levels are deduplicated by canonical code.
pub fn enumerate_balls(delta: usize, r: usize, cap: usize) -> Result<BallCatalog> {
    if cap == 0 {
        return Err(Error::Mismatch("vertex cap must be at least 1".into()));
    }
    let point = RootedBall::new(0, r, None, vec![Vec::new()], vec![0])?;
    let mut all: BTreeSet<CanonicalCode> = BTreeSet::new();
    let mut level: BTreeMap<CanonicalCode, RootedBall> = BTreeMap::from([(canonical_code(&point), point)]);
    let mut size = 1;
    let mut partial = false;
    while !level.is_empty() {
        all.extend(level.keys().cloned());
        let mut next: BTreeMap<CanonicalCode, RootedBall> = BTreeMap::new();
        for b in level.values() {
            for child in extensions(b, delta, r) {
                next.entry(canonical_code(&child)).or_insert(child);
            }
        }
        if size == cap {
            partial = !next.is_empty();
            break;
        }
        level = next;
        size += 1;
    }
    Ok(BallCatalog { kind: IndexKind::Plain { delta }, radius: r, codes: all.into_iter().collect(), partial })
}

fn extensions(b: &RootedBall, delta: usize, r: usize) -> Vec<RootedBall> {
    let n = b.n();
    let dist = b.distances();
    let open: Vec<usize> = (0..n).filter(|&v| b.neighbors(v).len() < delta).collect();
    let mut out = Vec::new();
    if open.len() >= 31 {
        return out;
    }
    for mask in 1u32..(1 << open.len()) {
        let chosen: Vec<usize> = (0..open.len()).filter(|&i| mask >> i & 1 == 1).map(|i| open[i]).collect();
        if chosen.iter().map(|&v| dist[v]).min().unwrap() + 1 > r || chosen.len() > delta {
            continue;
        }
        let mut adj = b.adj.clone();
        adj.push(chosen.iter().map(|&v| (v, 0)).collect());
        for &v in &chosen {
            adj[v].push((n, 0));
        }
        let mut loops = b.loops.clone();
        loops.push(0);
        out.push(RootedBall::new(0, r, None, adj, loops).expect("extension stays a ball"));
    }
    out
}

/// The Schreier-realizable balls of radius `r`: one per pseudo-subgroup of
/// `W_d(2r+1)`.
pub fn enumerate_schreier_balls(d: usize, r: usize, cap: usize) -> Result<BallCatalog> {
    let window = Arc::new(Window::new(d, 2 * r + 1)?);
    let subs = enumerate_pseudo_subgroups(&window, cap)?;
    let mut codes = BTreeSet::new();
    for s in &subs {
        codes.insert(canonical_code(&pseudo_to_ball(s, r)?));
    }
    Ok(BallCatalog { kind: IndexKind::Schreier { d }, radius: r, codes: codes.into_iter().collect(), partial: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn star(k: usize) -> BoundedDegreeGraph {
        BoundedDegreeGraph::star(k)
    }

    #[test]
    fn star_statistics() {
        let s = neighborhood_stats(&star(3), 1).unwrap();
        let mut masses: Vec<Rational> = s.entries.values().cloned().collect();
        masses.sort();
        assert_eq!(masses, vec![ratio(1, 4), ratio(3, 4)]);
        let center = canonical_code(&star(3).ball(0, 1).unwrap());
        assert_eq!(s.get(&center), ratio(1, 4));
        s.validate().unwrap();
    }

    #[test]
    fn cycles_are_homogeneous() {
        for n in 5..9 {
            let s = neighborhood_stats(&BoundedDegreeGraph::cycle(n), 1).unwrap();
            assert_eq!(s.entries.len(), 1);
            assert_eq!(s.total(), one());
        }
    }

    #[test]
    fn point_and_empty() {
        let g = BoundedDegreeGraph::new(1, 0, &[]).unwrap();
        let s = neighborhood_stats(&g, 0).unwrap();
        assert_eq!(s.entries.values().cloned().collect::<Vec<_>>(), vec![one()]);
        assert_eq!(neighborhood_stats(&BoundedDegreeGraph::empty(), 1), Err(Error::EmptyGraph));
    }

    #[test]
    fn schreier_examples() {
        let t = schreier_stats(&SchreierGraph::trivial(2), 1).unwrap();
        assert_eq!(t.entries.len(), 1);
        let swap = SchreierGraph::new(vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(schreier_stats(&swap, 1).unwrap().entries.len(), 1);
        let three = SchreierGraph::new(vec![vec![1, 0, 2], vec![0, 1, 2]]).unwrap();
        let mut masses: Vec<Rational> = schreier_stats(&three, 1).unwrap().entries.into_values().collect();
        masses.sort();
        assert_eq!(masses, vec![ratio(1, 3), ratio(2, 3)]);
    }

    #[test]
    fn distances() {
        let s3 = neighborhood_stats(&star(3).with_delta(4).unwrap(), 1).unwrap();
        let c4 = neighborhood_stats(&BoundedDegreeGraph::cycle(4).with_delta(4).unwrap(), 1).unwrap();
        // every C4 ball is a cherry, a type K_{1,3} never shows
        assert_eq!(stat_distance(&s3, &c4).unwrap(), one());
        let p4 = neighborhood_stats(&BoundedDegreeGraph::path(4).with_delta(4).unwrap(), 1).unwrap();
        assert_eq!(stat_distance(&s3, &p4).unwrap(), ratio(1, 2));
        assert_eq!(stat_distance(&s3, &s3).unwrap(), zero());
        let p = neighborhood_stats(&BoundedDegreeGraph::new(1, 4, &[]).unwrap(), 1).unwrap();
        assert_eq!(stat_distance(&p, &c4).unwrap(), one());
        let other = neighborhood_stats(&star(3), 1).unwrap();
        assert!(stat_distance(&other, &c4).is_err());
    }

    #[test]
    fn plain_catalogs() {
        assert_eq!(enumerate_balls(2, 1, 10).unwrap().len(), 4);
        assert_eq!(enumerate_balls(0, 3, 10).unwrap().len(), 1);
        let c = enumerate_balls(3, 1, 10).unwrap();
        assert_eq!(c.len(), 8);
        assert!(!c.partial);
        assert!(c.contains(&canonical_code(&star(3).ball(0, 1).unwrap())));
        let cut = enumerate_balls(3, 1, 2).unwrap();
        assert!(cut.partial);
        assert_eq!(cut.len(), 2);
        // paths and cycles of radius two: point, edge, cherry, triangle,
        // P3 at an end, P4 at an inner vertex, P5 middle, C4, C5, paw-free cases
        let c2 = enumerate_balls(2, 2, 10).unwrap();
        let mut oracle = BTreeSet::new();
        for n in 1..=5 {
            let p = BoundedDegreeGraph::path(n);
            for v in 0..n {
                if let Ok(b) = p.ball(v, 2) {
                    if b.n() == n {
                        oracle.insert(canonical_code(&b));
                    }
                }
            }
        }
        for n in 3..=5 {
            oracle.insert(canonical_code(&BoundedDegreeGraph::cycle(n).ball(0, 2).unwrap()));
        }
        assert_eq!(c2.codes, oracle.into_iter().collect::<Vec<_>>());
    }

    #[test]
    fn schreier_catalogs() {
        assert_eq!(enumerate_schreier_balls(2, 0, 100).unwrap().len(), 4);
        assert_eq!(enumerate_schreier_balls(1, 0, 100).unwrap().len(), 2);
        let c = enumerate_schreier_balls(1, 1, 100).unwrap();
        // cycles of length 1, 2, 3 and the infinite line seen at radius 1
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn mixing() {
        let a = neighborhood_stats(&star(3), 1).unwrap();
        let b = neighborhood_stats(&BoundedDegreeGraph::complete(4), 1).unwrap();
        let u = neighborhood_stats(&star(3).disjoint_union(&BoundedDegreeGraph::complete(4)), 1).unwrap();
        assert_eq!(StatVector::mix(&[(int(4), &a), (int(4), &b)]).unwrap(), u);
    }
}
