//! Rooted balls, optionally edge-labeled by free-group letters.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::free_group::Letter;

/// A rooted graph all of whose vertices lie within `radius` of the root.
///
/// For labeled balls, `adj[x]` holds `(y, mask)` where bit `ℓ.slot(d)` of
/// `mask` is set iff the letter `ℓ` labels the edge from `x` to `y`, i.e.
/// `ℓ·x = y`; `loops[x]` is the same mask for `y = x`. Unlabeled balls use
/// mask 0 and carry no loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedBall {
    pub(crate) root: usize,
    pub(crate) radius: usize,
    pub(crate) labels: Option<usize>,
    pub(crate) adj: Vec<Vec<(usize, u32)>>,
    pub(crate) loops: Vec<u32>,
}

/// Maps a label mask from `x → y` to the mask seen from `y → x`.
pub fn invert_mask(mask: u32, d: usize) -> u32 {
    let low = (1u32 << d) - 1;
    ((mask & low) << d) | ((mask >> d) & low)
}

impl RootedBall {
    /// Builds a ball from adjacency lists. Lists are sorted internally.
    pub fn new(
        root: usize,
        radius: usize,
        labels: Option<usize>,
        mut adj: Vec<Vec<(usize, u32)>>,
        loops: Vec<u32>,
    ) -> Result<Self> {
        for row in &mut adj {
            row.sort_unstable();
        }
        let b = RootedBall { root, radius, labels, adj, loops };
        b.check()?;
        Ok(b)
    }

    pub(crate) fn check(&self) -> Result<()> {
        let n = self.adj.len();
        let bad = |m: String| Err(Error::InvalidGraph(m));
        if self.root >= n || self.loops.len() != n {
            return bad("root or loop table out of range".into());
        }
        if let Some(d) = self.labels {
            if d == 0 || 2 * d > 32 {
                return bad(format!("unsupported generator count {d}"));
            }
        }
        for (x, row) in self.adj.iter().enumerate() {
            for w in row.windows(2) {
                if w[0].0 == w[1].0 {
                    return bad(format!("parallel adjacency entries at {x}"));
                }
            }
            for &(y, mask) in row {
                if y >= n || y == x {
                    return bad(format!("bad neighbor {y} of {x}"));
                }
                let back = self.adj[y].iter().find(|e| e.0 == x).map(|e| e.1);
                let want = match self.labels {
                    Some(d) => invert_mask(mask, d),
                    None => 0,
                };
                if back != Some(want) {
                    return bad(format!("asymmetric edge {x}-{y}"));
                }
                if self.labels.is_some() && mask == 0 {
                    return bad(format!("labeled edge {x}-{y} without labels"));
                }
            }
            if let Some(d) = self.labels {
                if invert_mask(self.loops[x], d) != self.loops[x] {
                    return bad(format!("loop labels at {x} not closed under inversion"));
                }
            } else if self.loops[x] != 0 {
                return bad(format!("unlabeled ball has a loop at {x}"));
            }
        }
        let dist = self.distances();
        if dist.iter().any(|&x| x > self.radius) {
            return bad(format!("vertex farther than radius {} from the root", self.radius));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// `Some(d)` for a Schreier-labeled ball.
    pub fn labels(&self) -> Option<usize> {
        self.labels
    }

    pub fn neighbors(&self, x: usize) -> &[(usize, u32)] {
        &self.adj[x]
    }

    pub fn loop_mask(&self, x: usize) -> u32 {
        self.loops[x]
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// BFS distance from the root, ignoring labels and directions;
    /// `usize::MAX` for unreachable vertices.
    pub fn distances(&self) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        dist[self.root] = 0;
        let mut q = VecDeque::from([self.root]);
        while let Some(x) = q.pop_front() {
            for &(y, _) in &self.adj[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    q.push_back(y);
                }
            }
        }
        dist
    }

    /// Largest root distance (the smallest radius this ball fits in).
    pub fn eccentricity(&self) -> usize {
        self.distances().into_iter().max().unwrap_or(0)
    }

    /// Number of label slots at `x`, counted with multiplicity; a loop
    /// labeled `{a_i, a_i⁻¹}` counts twice.
    pub fn slot_count(&self, x: usize) -> usize {
        let edges: u32 = self.adj[x].iter().map(|e| e.1.count_ones()).sum();
        (edges + self.loops[x].count_ones()) as usize
    }

    /// The unique `y` with `ℓ` on the edge `x → y`, if it is in the ball.
    pub fn follow(&self, x: usize, l: Letter) -> Option<usize> {
        let d = self.labels?;
        let bit = 1u32 << l.slot(d);
        if self.loops[x] & bit != 0 {
            return Some(x);
        }
        self.adj[x].iter().find(|e| e.1 & bit != 0).map(|e| e.0)
    }

    /// Applies `perm` (old index ↦ new index) to the vertices.
    pub fn relabel(&self, perm: &[usize]) -> RootedBall {
        let n = self.n();
        let mut adj = vec![Vec::new(); n];
        let mut loops = vec![0; n];
        for x in 0..n {
            adj[perm[x]] = self.adj[x].iter().map(|&(y, m)| (perm[y], m)).collect();
            adj[perm[x]].sort_unstable();
            loops[perm[x]] = self.loops[x];
        }
        RootedBall { root: perm[self.root], radius: self.radius, labels: self.labels, adj, loops }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_inversion() {
        // d = 2: bits a1=0, a2=1, a1^-1=2, a2^-1=3
        assert_eq!(invert_mask(0b0001, 2), 0b0100);
        assert_eq!(invert_mask(0b1010, 2), 0b1010);
        assert_eq!(invert_mask(0b0011, 2), 0b1100);
    }

    #[test]
    fn rejects_far_vertices() {
        let adj = vec![vec![(1, 0)], vec![(0, 0), (2, 0)], vec![(1, 0)]];
        assert!(RootedBall::new(0, 1, None, adj.clone(), vec![0; 3]).is_err());
        assert!(RootedBall::new(1, 1, None, adj, vec![0; 3]).is_ok());
    }

    #[test]
    fn rejects_asymmetric_labels() {
        let adj = vec![vec![(1, 0b0001)], vec![(0, 0b0001)]];
        assert!(RootedBall::new(0, 1, Some(2), adj, vec![0b1010, 0b1010]).is_err());
        let adj = vec![vec![(1, 0b0001)], vec![(0, 0b0100)]];
        assert!(RootedBall::new(0, 1, Some(2), adj, vec![0b1010, 0b1010]).is_ok());
    }
}
