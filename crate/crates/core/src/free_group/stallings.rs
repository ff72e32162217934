//! Stallings foldings: a folded automaton for a finitely generated subgroup
//! of a free group, used for membership and for intersecting a subgroup
//! with a window of short words.

use fixedbitset::FixedBitSet;

use super::window::Window;
use super::word::{Letter, Word};

const NONE: usize = usize::MAX;

/// Folded core graph of `⟨gens⟩`. State 0 is the base state.
#[derive(Clone, Debug)]
pub struct StallingsGraph {
    d: usize,
    // trans[state][slot]
    trans: Vec<Vec<usize>>,
}

struct Folder {
    d: usize,
    parent: Vec<usize>,
    trans: Vec<Vec<usize>>,
    pending: Vec<(usize, usize, usize)>,
}

impl Folder {
    fn new_state(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.trans.push(vec![NONE; 2 * self.d]);
        self.parent.len() - 1
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn inv_slot(&self, s: usize) -> usize {
        (s + self.d) % (2 * self.d)
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        let (keep, gone) = if a < b { (a, b) } else { (b, a) };
        self.parent[gone] = keep;
        let moved = std::mem::replace(&mut self.trans[gone], vec![NONE; 2 * self.d]);
        for (s, t) in moved.into_iter().enumerate() {
            if t != NONE {
                self.pending.push((keep, s, t));
            }
        }
    }

    fn add_edge(&mut self, u: usize, s: usize, v: usize) {
        self.pending.push((u, s, v));
        while let Some((u, s, v)) = self.pending.pop() {
            let u = self.find(u);
            let v = self.find(v);
            let cur = self.trans[u][s];
            if cur == NONE {
                self.trans[u][s] = v;
                let is = self.inv_slot(s);
                let back = self.trans[v][is];
                if back == NONE {
                    self.trans[v][is] = u;
                } else {
                    let w = self.find(back);
                    if w != u {
                        self.union(u, w);
                    }
                }
            } else {
                let w = self.find(cur);
                if w != v {
                    self.union(v, w);
                }
            }
        }
    }
}

impl StallingsGraph {
    /// Folds the wedge of loops spelling each generator at the base.
    pub fn from_generators<'a>(d: usize, gens: impl IntoIterator<Item = &'a Word>) -> Self {
        let mut f = Folder { d, parent: Vec::new(), trans: Vec::new(), pending: Vec::new() };
        let base = f.new_state();
        for g in gens {
            let letters = g.letters();
            if letters.is_empty() {
                continue;
            }
            debug_assert!(letters.iter().all(|l| (l.generator as usize) < d));
            let mut cur = base;
            for (i, l) in letters.iter().enumerate() {
                let next = if i + 1 == letters.len() { base } else { f.new_state() };
                f.add_edge(cur, l.slot(d), next);
                cur = next;
            }
        }
        // renumber surviving states with the base first
        let n = f.parent.len();
        let mut roots: Vec<usize> = (0..n).filter(|&x| f.find(x) == x).collect();
        let base_root = f.find(base);
        roots.sort_by_key(|&r| (r != base_root, r));
        let mut new_id = vec![NONE; n];
        for (i, &r) in roots.iter().enumerate() {
            new_id[r] = i;
        }
        let mut trans = vec![vec![NONE; 2 * d]; roots.len()];
        for &r in &roots {
            for s in 0..2 * d {
                let t = f.trans[r][s];
                if t != NONE {
                    let t = f.find(t);
                    trans[new_id[r]][s] = new_id[t];
                }
            }
        }
        let mut g = StallingsGraph { d, trans };
        g.trim();
        g
    }

    /// Removes hanging trees (non-base states of degree 1), leaving the core.
    fn trim(&mut self) {
        let n = self.trans.len();
        let mut alive = vec![true; n];
        loop {
            let mut changed = false;
            for x in 1..n {
                if !alive[x] {
                    continue;
                }
                let deg = self.trans[x].iter().filter(|&&t| t != NONE && alive[t]).count();
                if deg <= 1 {
                    alive[x] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if alive.iter().all(|&a| a) {
            return;
        }
        let mut new_id = vec![NONE; n];
        let mut next = 0;
        for x in 0..n {
            if alive[x] {
                new_id[x] = next;
                next += 1;
            }
        }
        let trans = (0..n)
            .filter(|&x| alive[x])
            .map(|x| self.trans[x].iter().map(|&t| if t != NONE && alive[t] { new_id[t] } else { NONE }).collect())
            .collect();
        self.trans = trans;
    }

    pub fn num_states(&self) -> usize {
        self.trans.len()
    }

    pub fn transition(&self, state: usize, l: Letter) -> Option<usize> {
        let t = self.trans[state][l.slot(self.d)];
        (t != NONE).then_some(t)
    }

    /// No state has two outgoing transitions with the same letter, and
    /// transitions come in inverse pairs.
    pub fn is_folded(&self) -> bool {
        self.trans.iter().enumerate().all(|(u, row)| {
            row.iter().enumerate().all(|(s, &v)| v == NONE || self.trans[v][(s + self.d) % (2 * self.d)] == u)
        })
    }

    /// `w ∈ ⟨gens⟩`: reading `w` from the base returns to the base.
    pub fn contains(&self, w: &Word) -> bool {
        let mut state = 0;
        for &l in w.letters() {
            if l.generator as usize >= self.d {
                return false;
            }
            match self.transition(state, l) {
                Some(t) => state = t,
                None => return false,
            }
        }
        state == 0
    }

    /// `⟨gens⟩ ∩ W_d(k)` as a set over `window`.
    pub fn intersect_window(&self, window: &Window) -> FixedBitSet {
        let mut out = window.empty_set();
        let mut stack = vec![(0usize, 0usize)];
        while let Some((state, idx)) = stack.pop() {
            if state == 0 {
                out.insert(idx);
            }
            for l in Letter::all(self.d) {
                if let (Some(t), Some(j)) = (self.transition(state, l), window.append(idx, l)) {
                    stack.push((t, j));
                }
            }
        }
        out
    }
}

/// Subgroup membership by folding: `w ∈ ⟨gens⟩`.
pub fn stallings_membership(d: usize, gens: &[Word], w: &Word) -> bool {
    StallingsGraph::from_generators(d, gens).contains(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn cyclic_subgroup() {
        assert!(stallings_membership(2, &[w("a1")], &w("a1^3")));
        assert!(stallings_membership(2, &[w("a1")], &w("a1^-2")));
        assert!(!stallings_membership(2, &[w("a1")], &w("a2")));
    }

    #[test]
    fn no_a1_loop_at_base() {
        assert!(!stallings_membership(2, &[w("a1^2"), w("a2")], &w("a1")));
        assert!(stallings_membership(2, &[w("a1^2"), w("a2")], &w("a2 a1^2 a2^-1")));
    }

    #[test]
    fn conjugate_generator() {
        let g = [w("a1 a2 a1^-1")];
        assert!(!stallings_membership(2, &g, &w("a2")));
        assert!(stallings_membership(2, &g, &w("a1 a2^5 a1^-1")));
    }

    #[test]
    fn folding_merges_common_prefixes() {
        let g = StallingsGraph::from_generators(2, &[w("a1 a2"), w("a1 a1")]);
        assert!(g.is_folded());
        // a1 a2 and a1 a1 share the first edge: states base, x; x -a2-> base, x -a1-> base
        assert_eq!(g.num_states(), 2);
        assert!(g.contains(&w("a1^2 a2^-1 a1^-1")));
    }

    #[test]
    fn full_group_folds_to_one_state() {
        let g = StallingsGraph::from_generators(2, &[w("a1"), w("a2")]);
        assert_eq!(g.num_states(), 1);
        let win = Window::new(2, 3).unwrap();
        assert_eq!(g.intersect_window(&win).count_ones(..), win.len());
    }

    #[test]
    fn trivial_subgroup() {
        let g = StallingsGraph::from_generators(2, &[]);
        let win = Window::new(2, 2).unwrap();
        let s = g.intersect_window(&win);
        assert_eq!(s.ones().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn window_intersection_matches_membership() {
        let gens = [w("a1 a2 a1^-1"), w("a2^2")];
        let g = StallingsGraph::from_generators(2, &gens);
        let win = Window::new(2, 4).unwrap();
        let s = g.intersect_window(&win);
        for (i, x) in win.words().iter().enumerate() {
            assert_eq!(s.contains(i), g.contains(x), "{x}");
        }
    }
}
