//! Seeded random graphs, actions and objectives for tests and audits.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{BoundedDegreeGraph, SchreierGraph};
use crate::rational::Rational;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random graph on `n` vertices with maximum degree `≤ delta`: random
/// candidate edges are kept while both ends have room.
pub fn random_graph(rng: &mut SeededRng, n: usize, delta: usize) -> BoundedDegreeGraph {
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    pairs.shuffle(rng);
    let keep = rng.random_range(0..=pairs.len());
    let mut deg = vec![0; n];
    let mut edges = Vec::new();
    for &(a, b) in &pairs[..keep] {
        if deg[a] < delta && deg[b] < delta {
            deg[a] += 1;
            deg[b] += 1;
            edges.push((a, b));
        }
    }
    BoundedDegreeGraph::new(n, delta, &edges).expect("degrees respected")
}

/// Like [`random_graph`], then every isolated vertex is joined to some
/// vertex with room; draws repeat until none is left isolated. Needs
/// `n ≥ 2`, `delta ≥ 1`, and `n` even when `delta = 1`.
pub fn random_graph_without_isolated(rng: &mut SeededRng, n: usize, delta: usize) -> BoundedDegreeGraph {
    assert!(n >= 2 && delta >= 1 && (delta > 1 || n.is_multiple_of(2)), "no graph on {n} vertices fits");
    loop {
        let g = random_graph(rng, n, delta);
        let mut edges = g.edges();
        let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
        for v in 0..n {
            if deg[v] == 0 {
                let mut cands: Vec<usize> = (0..n).filter(|&u| u != v && deg[u] < delta).collect();
                cands.shuffle(rng);
                if let Some(&u) = cands.first() {
                    edges.push((v.min(u), v.max(u)));
                    deg[u] += 1;
                    deg[v] += 1;
                }
            }
        }
        if deg.iter().all(|&x| x > 0) {
            return BoundedDegreeGraph::new(n, delta, &edges).expect("degrees respected");
        }
    }
}

pub fn random_permutation(rng: &mut SeededRng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

pub fn random_schreier(rng: &mut SeededRng, d: usize, n: usize) -> SchreierGraph {
    SchreierGraph::new((0..d).map(|_| random_permutation(rng, n)).collect()).expect("permutations")
}

/// A rational with numerator in `[-num, num]` and denominator in `[1, den]`.
pub fn random_rational(rng: &mut SeededRng, num: i64, den: i64) -> Rational {
    Rational::new(rng.random_range(-num..=num).into(), rng.random_range(1..=den).into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_bounded() {
        let a = random_graph(&mut rng(7), 20, 3);
        let b = random_graph(&mut rng(7), 20, 3);
        assert_eq!(a, b);
        assert!(a.max_degree() <= 3);
        let c = random_graph_without_isolated(&mut rng(1), 9, 2);
        assert!((0..9).all(|v| c.degree(v) > 0));
        let s = random_schreier(&mut rng(3), 2, 6);
        assert_eq!((s.d(), s.n()), (2, 6));
    }
}
