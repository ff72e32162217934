use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::stallings::StallingsGraph;
use super::window::Window;
use super::word::{Letter, Word};
use crate::ball::RootedBall;
use crate::error::{Error, Result};
use crate::graph::SchreierGraph;

/// Default limit on the number of pseudo-subgroups enumerated.
pub const DEFAULT_PSEUDO_CAP: usize = 200_000;

/// A subset `S ⊆ W_d(k)` with `⟨S⟩ ∩ W_d(k) = S`.
#[derive(Clone)]
pub struct PseudoSubgroup {
    window: Arc<Window>,
    members: FixedBitSet,
}

/// `⟨words of set⟩ ∩ W_d(k)`.
pub fn closure(window: &Window, set: &FixedBitSet) -> FixedBitSet {
    StallingsGraph::from_generators(window.d(), window.words_of(set)).intersect_window(window)
}

/// Whether `set` is a pseudo-subgroup of `window`.
pub fn is_pseudo_subgroup(window: &Window, set: &FixedBitSet) -> bool {
    set.len() == window.len() && set.contains(0) && closure(window, set) == *set
}

impl PseudoSubgroup {
    pub fn new(window: Arc<Window>, members: FixedBitSet) -> Result<Self> {
        let mut members = members;
        if members.len() > window.len() {
            return Err(Error::NotPseudoSubgroup("set larger than its window".into()));
        }
        members.grow(window.len());
        if !members.contains(0) {
            return Err(Error::NotPseudoSubgroup("identity missing".into()));
        }
        let inv = window.inverse_table();
        if let Some(i) = members.ones().find(|&i| !members.contains(inv[i])) {
            return Err(Error::NotPseudoSubgroup(format!("{} present without its inverse", window.word(i))));
        }
        let c = closure(&window, &members);
        if let Some(i) = c.difference(&members).next() {
            return Err(Error::NotPseudoSubgroup(format!("generated subgroup also contains {}", window.word(i))));
        }
        Ok(PseudoSubgroup { window, members })
    }

    pub(crate) fn new_unchecked(window: Arc<Window>, members: FixedBitSet) -> Self {
        debug_assert_eq!(members.len(), window.len());
        PseudoSubgroup { window, members }
    }

    /// The whole window (the intersection with `F_d` itself).
    pub fn full(window: Arc<Window>) -> Self {
        let members = window.full_set();
        PseudoSubgroup { window, members }
    }

    /// `{e}` (the intersection with the trivial subgroup).
    pub fn trivial(window: Arc<Window>) -> Self {
        let mut members = window.empty_set();
        members.insert(0);
        PseudoSubgroup { window, members }
    }

    pub fn window(&self) -> &Arc<Window> {
        &self.window
    }

    pub fn members(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.window.index_of(w).is_some_and(|i| self.members.contains(i))
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.window.words_of(&self.members)
    }

    /// `S ∩ W_d(j)` over `smaller`, which must be `W_d(j)` for `j ≤ k`.
    pub fn restrict(&self, smaller: &Arc<Window>) -> Result<PseudoSubgroup> {
        if smaller.d() != self.window.d() || smaller.radius() > self.window.radius() {
            return Err(Error::WindowTooSmall { have: self.window.radius(), need: smaller.radius() });
        }
        Ok(PseudoSubgroup::new_unchecked(smaller.clone(), truncate(&self.members, smaller.len())))
    }

    /// `{w ∈ W_d(k−2) : g w g⁻¹ ∈ S}` as a set over `smaller = W_d(k−2)`.
    pub fn conjugation_image(&self, g: Letter, smaller: &Window) -> FixedBitSet {
        let mut out = smaller.empty_set();
        for (i, w) in smaller.words().iter().enumerate() {
            if self.contains(&w.conjugate_by(g)) {
                out.insert(i);
            }
        }
        out
    }
}

impl PartialEq for PseudoSubgroup {
    fn eq(&self, other: &Self) -> bool {
        self.window.d() == other.window.d()
            && self.window.radius() == other.window.radius()
            && self.members == other.members
    }
}

impl Eq for PseudoSubgroup {}

impl fmt::Debug for PseudoSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PseudoSubgroup(W_{}({}): {self})", self.window.d(), self.window.radius())
    }
}

impl fmt::Display for PseudoSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ws: Vec<String> =
            self.words().map(|w| if w.is_empty() { "e".to_string() } else { w.to_string() }).collect();
        write!(f, "{{{}}}", ws.join(", "))
    }
}

/// The bits of `set` below `len`, as a set of capacity `len`.
pub fn truncate(set: &FixedBitSet, len: usize) -> FixedBitSet {
    let mut out = FixedBitSet::with_capacity(len);
    out.extend(set.ones().take_while(|&i| i < len));
    out
}

/// All pseudo-subgroups of `window`, sorted by size and then by members.
///
/// Closed sets are listed with Ganter's NextClosure over the inverse pairs
/// `{w, w⁻¹}`, using the Stallings closure. Fails once more than `cap`
/// sets have been found.
pub fn enumerate_pseudo_subgroups(window: &Arc<Window>, cap: usize) -> Result<Vec<PseudoSubgroup>> {
    let inv = window.inverse_table();
    // pair p ↔ the representative word index reps[p] (smaller of w, w⁻¹)
    let reps: Vec<usize> = (1..window.len()).filter(|&i| i < inv[i]).collect();
    let m = reps.len();
    let mut pair_of = vec![usize::MAX; window.len()];
    for (p, &i) in reps.iter().enumerate() {
        pair_of[i] = p;
        pair_of[inv[i]] = p;
    }
    let close_pairs = |pairs: &FixedBitSet| -> FixedBitSet {
        let words: Vec<&Word> = pairs.ones().map(|p| window.word(reps[p])).collect();
        let set = StallingsGraph::from_generators(window.d(), words).intersect_window(window);
        let mut out = FixedBitSet::with_capacity(m);
        out.extend(set.ones().filter(|&i| i != 0).map(|i| pair_of[i]));
        out
    };
    let to_words = |pairs: &FixedBitSet| -> FixedBitSet {
        let mut s = window.empty_set();
        s.insert(0);
        for p in pairs.ones() {
            s.insert(reps[p]);
            s.insert(inv[reps[p]]);
        }
        s
    };

    let mut out = Vec::new();
    let mut a = close_pairs(&FixedBitSet::with_capacity(m));
    loop {
        if out.len() >= cap {
            return Err(Error::CapExceeded {
                what: format!("pseudo-subgroups of W_{}({})", window.d(), window.radius()),
                cap,
            });
        }
        out.push(PseudoSubgroup::new_unchecked(window.clone(), to_words(&a)));
        let mut next = None;
        for i in (0..m).rev() {
            if a.contains(i) {
                continue;
            }
            let mut seed = truncate(&a, i);
            seed.grow(m);
            seed.insert(i);
            let b = close_pairs(&seed);
            // accept iff b adds nothing below i
            if b.ones().take_while(|&j| j < i).all(|j| a.contains(j)) {
                next = Some(b);
                break;
            }
        }
        match next {
            Some(b) => a = b,
            None => break,
        }
    }
    out.sort_by(|x, y| (x.len(), x.members.as_slice()).cmp(&(y.len(), y.members.as_slice())));
    Ok(out)
}

/// `{w ∈ W_d(k) : w·v = v}` for the right-to-left action.
pub fn stab_window(g: &SchreierGraph, v: usize, window: &Arc<Window>) -> Result<PseudoSubgroup> {
    if v >= g.n() {
        return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
    }
    if g.d() != window.d() {
        return Err(Error::Mismatch(format!("graph has d = {}, window has d = {}", g.d(), window.d())));
    }
    // image[i] = words[i]·v; words[i] = ℓ·u with u shorter, so image[i] = ℓ·image[u]
    let mut image = vec![0usize; window.len()];
    image[0] = v;
    let mut members = window.empty_set();
    members.insert(0);
    for i in 1..window.len() {
        let w = window.word(i);
        let rest = Word::from(w.letters()[1..].to_vec());
        let j = window.index_of(&rest).expect("suffix of a window word");
        image[i] = g.act(w.letters()[0], image[j]);
        if image[i] == v {
            members.insert(i);
        }
    }
    Ok(PseudoSubgroup::new_unchecked(window.clone(), members))
}

/// The radius-`r` ball determined by a pseudo-subgroup of `W_d(2r+1)`.
///
/// Vertices are the classes of `W_d(r)` under `u ∼ v ⟺ v⁻¹u ∈ S` (that
/// is, `u·o = v·o` for the base point `o`), the root is the class of `e`,
/// and `g` labels the edge from `[u]` to `[w]` iff `w⁻¹gu ∈ S`.
pub fn pseudo_to_ball(s: &PseudoSubgroup, r: usize) -> Result<RootedBall> {
    let window = s.window();
    let d = window.d();
    if window.radius() != 2 * r + 1 {
        return Err(Error::WindowTooSmall { have: window.radius(), need: 2 * r + 1 });
    }
    if !is_pseudo_subgroup(window, s.members()) {
        return Err(Error::NotPseudoSubgroup(format!("{s}")));
    }
    let inner = window.prefix_len(r);
    let mut class_of = vec![usize::MAX; inner];
    let mut reps: Vec<usize> = Vec::new();
    for u in 0..inner {
        let wu = window.word(u);
        let found = reps.iter().position(|&v| s.contains(&window.word(v).inverse().mul(wu)));
        class_of[u] = match found {
            Some(c) => c,
            None => {
                reps.push(u);
                reps.len() - 1
            }
        };
    }
    let n = reps.len();
    let mut adj: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
    let mut loops = vec![0u32; n];
    for (x, &u) in reps.iter().enumerate() {
        let wu = window.word(u);
        for l in Letter::all(d) {
            let gu = Word::letter(l).mul(wu);
            for (y, &w) in reps.iter().enumerate() {
                if s.contains(&window.word(w).inverse().mul(&gu)) {
                    if x == y {
                        loops[x] |= 1 << l.slot(d);
                    } else {
                        match adj[x].iter_mut().find(|e| e.0 == y) {
                            Some(e) => e.1 |= 1 << l.slot(d),
                            None => adj[x].push((y, 1 << l.slot(d))),
                        }
                    }
                }
            }
        }
    }
    debug_assert!(class_of.iter().all(|&c| c < n));
    RootedBall::new(0, r, Some(d), adj, loops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonical_code;

    fn win(d: usize, k: usize) -> Arc<Window> {
        Arc::new(Window::new(d, k).unwrap())
    }

    fn set(w: &Window, words: &[&str]) -> FixedBitSet {
        let ws: Vec<Word> = words.iter().map(|s| Word::parse(s).unwrap()).collect();
        w.set_of(&ws).unwrap()
    }

    #[test]
    fn census_at_radius_one() {
        let w = win(2, 1);
        let all = enumerate_pseudo_subgroups(&w, 100).unwrap();
        let shown: Vec<String> = all.iter().map(|s| s.to_string()).collect();
        assert_eq!(shown, vec!["{e}", "{e, a1, a1^-1}", "{e, a2, a2^-1}", "{e, a1, a2, a1^-1, a2^-1}"]);
        assert_eq!(enumerate_pseudo_subgroups(&win(1, 1), 100).unwrap().len(), 2);
        assert_eq!(enumerate_pseudo_subgroups(&win(1, 0), 100).unwrap().len(), 1);
    }

    #[test]
    fn rank_one_windows() {
        // subgroups of Z meet [-k, k] in multiples of m ≤ k, or only 0
        for k in 1..6 {
            let n = enumerate_pseudo_subgroups(&win(1, k), 100).unwrap().len();
            assert_eq!(n, k + 1);
        }
    }

    #[test]
    fn enumeration_matches_subset_scan() {
        let w = win(2, 2);
        let listed = enumerate_pseudo_subgroups(&w, 10_000).unwrap();
        for s in &listed {
            PseudoSubgroup::new(w.clone(), s.members().clone()).unwrap();
        }
        // scan inversion-closed subsets containing e
        let inv = w.inverse_table();
        let reps: Vec<usize> = (1..w.len()).filter(|&i| i < inv[i]).collect();
        let mut count = 0;
        for mask in 0u32..(1 << reps.len()) {
            let mut s = w.empty_set();
            s.insert(0);
            for (p, &i) in reps.iter().enumerate() {
                if mask >> p & 1 == 1 {
                    s.insert(i);
                    s.insert(inv[i]);
                }
            }
            if is_pseudo_subgroup(&w, &s) {
                count += 1;
                assert!(listed.iter().any(|x| *x.members() == s));
            }
        }
        assert_eq!(count, listed.len());
    }

    #[test]
    fn cap_is_reported() {
        assert!(matches!(enumerate_pseudo_subgroups(&win(2, 1), 3), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn checker_rejects() {
        let w = win(2, 2);
        assert!(PseudoSubgroup::new(w.clone(), set(&w, &["a1", "a1^-1"])).is_err());
        assert!(PseudoSubgroup::new(w.clone(), set(&w, &["e", "a1"])).is_err());
        assert!(PseudoSubgroup::new(w.clone(), set(&w, &["e", "a1", "a1^-1"])).is_err());
        assert!(PseudoSubgroup::new(w.clone(), set(&w, &["e", "a1", "a1^-1", "a1^2", "a1^-2"])).is_ok());
    }

    #[test]
    fn stabilizer_windows() {
        let g = SchreierGraph::new(vec![vec![1, 0], vec![0, 1]]).unwrap();
        let s1 = stab_window(&g, 0, &win(2, 1)).unwrap();
        assert_eq!(s1.to_string(), "{e, a2, a2^-1}");
        let s2 = stab_window(&g, 0, &win(2, 2)).unwrap();
        assert_eq!(s2.to_string(), "{e, a2, a2^-1, a1 a1, a2 a2, a1^-1 a1^-1, a2^-1 a2^-1}");
        let t = SchreierGraph::trivial(2);
        assert_eq!(stab_window(&t, 0, &win(2, 3)).unwrap().len(), 53);
        assert!(stab_window(&g, 2, &win(2, 1)).is_err());
    }

    #[test]
    fn stabilizer_uses_right_to_left_action() {
        // a1 a2 fixes 0 only under the right-to-left convention here
        let g = SchreierGraph::new(vec![vec![1, 0, 2], vec![1, 2, 0]]).unwrap();
        let s = stab_window(&g, 0, &win(2, 2)).unwrap();
        let w = Word::parse("a1 a2").unwrap();
        assert_eq!(s.contains(&w), g.act_word(&w, 0) == 0);
        assert!(PseudoSubgroup::new(s.window().clone(), s.members().clone()).is_ok());
    }

    #[test]
    fn full_window_is_one_vertex() {
        let b = pseudo_to_ball(&PseudoSubgroup::full(win(2, 3)), 1).unwrap();
        assert_eq!(b.n(), 1);
        assert_eq!(b.loop_mask(0), 0b1111);
    }

    #[test]
    fn trivial_subgroup_is_a_star() {
        let b = pseudo_to_ball(&PseudoSubgroup::trivial(win(2, 3)), 1).unwrap();
        assert_eq!(b.n(), 5);
        assert_eq!(b.num_edges(), 4);
        assert_eq!(b.neighbors(0).len(), 4);
        assert_eq!(b.loop_mask(0), 0);
    }

    #[test]
    fn ball_matches_schreier_ball() {
        let g = SchreierGraph::new(vec![vec![1, 0], vec![0, 1]]).unwrap();
        let s = stab_window(&g, 0, &win(2, 3)).unwrap();
        let b = pseudo_to_ball(&s, 1).unwrap();
        assert_eq!(b.n(), 2);
        assert_eq!(canonical_code(&b), canonical_code(&g.ball(0, 1).unwrap()));
    }

    #[test]
    fn ball_needs_exact_window() {
        assert!(pseudo_to_ball(&PseudoSubgroup::full(win(2, 2)), 1).is_err());
    }
}
