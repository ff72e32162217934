//! Local tests on subsets of the free group, their values on Schreier
//! graphs, and brute-force sofic brackets.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use num_traits::Signed;

use crate::ball::RootedBall;
use crate::canon::canonical_code;
use crate::error::{Error, Result};
use crate::free_group::{enumerate_pseudo_subgroups, pseudo_to_ball, stab_window, PseudoSubgroup, Window, Word};
use crate::graph::SchreierGraph;
use crate::rational::{int, one, zero, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Membership {
    In,
    Out,
}

/// Matches when every `In` word is in the set and every `Out` word is not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub pattern: Vec<(Word, Membership)>,
    pub value: Rational,
}

impl Clause {
    pub fn new(pattern: Vec<(Word, Membership)>, value: Rational) -> Self {
        Clause { pattern, value }
    }
}

/// A rational function of `S ∩ W_d(k)`: the value of the first matching
/// clause, or `default`.
#[derive(Clone)]
pub struct LocalTest {
    d: usize,
    window: Arc<Window>,
    clauses: Vec<Clause>,
    default: Rational,
    // compiled[c] = (window index, required presence)
    compiled: Vec<Vec<(usize, bool)>>,
}

impl LocalTest {
    pub fn new(d: usize, k: usize, clauses: Vec<Clause>, default: Rational) -> Result<Self> {
        let window = Arc::new(Window::new(d, k)?);
        let mut compiled = Vec::with_capacity(clauses.len());
        for c in &clauses {
            let mut row = Vec::with_capacity(c.pattern.len());
            for (w, m) in &c.pattern {
                if w.rank() > d {
                    return Err(Error::InvalidTest(format!("{w} uses a generator beyond a{d}")));
                }
                let i = window
                    .index_of(w)
                    .ok_or_else(|| Error::InvalidTest(format!("pattern word {w} is longer than k = {k}")))?;
                row.push((i, *m == Membership::In));
            }
            compiled.push(row);
        }
        Ok(LocalTest { d, window, clauses, default, compiled })
    }

    /// Same as [`LocalTest::new`] with `k` the longest pattern word.
    pub fn with_minimal_window(d: usize, clauses: Vec<Clause>, default: Rational) -> Result<Self> {
        let k = clauses.iter().flat_map(|c| c.pattern.iter().map(|(w, _)| w.len())).max().unwrap_or(0);
        Self::new(d, k, clauses, default)
    }

    /// `1[w ∈ S]`.
    pub fn indicator(d: usize, w: &Word) -> Result<Self> {
        Self::with_minimal_window(d, vec![Clause::new(vec![(w.clone(), Membership::In)], one())], zero())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn radius(&self) -> usize {
        self.window.radius()
    }

    pub fn window(&self) -> &Arc<Window> {
        &self.window
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn default_value(&self) -> &Rational {
        &self.default
    }

    /// All values the test can take.
    pub fn values(&self) -> impl Iterator<Item = &Rational> {
        self.clauses.iter().map(|c| &c.value).chain(std::iter::once(&self.default))
    }

    fn eval_with(&self, contains: impl Fn(usize) -> bool) -> Rational {
        for (c, row) in self.clauses.iter().zip(&self.compiled) {
            if row.iter().all(|&(i, present)| contains(i) == present) {
                return c.value.clone();
            }
        }
        self.default.clone()
    }

    /// Value on `s`, a set over `W_d(k')` for some `k' ≥ k` (window
    /// indices of shorter words are shared).
    pub fn eval_test(&self, s: &FixedBitSet) -> Result<Rational> {
        if s.len() < self.window.len() {
            return Err(Error::WindowTooSmall { have: s.len(), need: self.window.len() });
        }
        Ok(self.eval_with(|i| s.contains(i)))
    }

    pub fn eval_pseudo(&self, s: &PseudoSubgroup) -> Result<Rational> {
        if s.window().d() != self.d {
            return Err(Error::Mismatch(format!("test has d = {}, set has d = {}", self.d, s.window().d())));
        }
        self.eval_test(s.members())
    }

    /// Value on `Stab(root) ∩ W_d(k)` read off the ball by tracing words
    /// from the root.
    pub fn test_on_ball(&self, ball: &RootedBall) -> Result<Rational> {
        if ball.labels() != Some(self.d) {
            return Err(Error::Mismatch("test needs a ball labeled by the same generators".into()));
        }
        let k = self.radius();
        // a ball with every slot filled is a whole orbit, so any radius works
        let closed = (0..ball.n()).all(|x| ball.slot_count(x) == 2 * self.d);
        if ball.radius() < k && !closed {
            return Err(Error::RadiusTooSmall { have: ball.radius(), need: k });
        }
        let trace = |i: usize| -> bool {
            let w = self.window.word(i);
            let mut x = ball.root();
            for &l in w.letters().iter().rev() {
                x = ball.follow(x, l).expect("words of length ≤ k stay inside the ball");
            }
            x == ball.root()
        };
        Ok(self.eval_with(trace))
    }

    /// `val(T, G)`: the average over vertices of the value on stabilizers.
    pub fn val(&self, g: &SchreierGraph) -> Result<Rational> {
        if g.d() != self.d {
            return Err(Error::Mismatch(format!("test has d = {}, graph has d = {}", self.d, g.d())));
        }
        let mut total = zero();
        for v in 0..g.n() {
            total += self.eval_pseudo(&stab_window(g, v, &self.window)?)?;
        }
        Ok(total / int(g.n() as i64))
    }
}

impl fmt::Debug for LocalTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LocalTest(d={}, k={}, {self})", self.d, self.radius())
    }
}

impl fmt::Display for LocalTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            let parts: Vec<String> = c
                .pattern
                .iter()
                .map(|(w, m)| {
                    let w = if w.is_empty() { "e".to_string() } else { w.to_string() };
                    format!("{w} {} S", if *m == Membership::In { "∈" } else { "∉" })
                })
                .collect();
            write!(f, "[{}] → {}; ", parts.join(" ∧ "), crate::rational::to_string(&c.value))?;
        }
        write!(f, "else {}", crate::rational::to_string(&self.default))
    }
}

/// Advances `p` to the next permutation in lexicographic order.
pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        p.reverse();
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Number of `d`-tuples of permutations of `n` points, if it fits.
pub fn tuple_count(d: usize, n: usize) -> Option<usize> {
    let f = (1..=n).try_fold(1usize, |a, b| a.checked_mul(b))?;
    (0..d).try_fold(1usize, |a, _| a.checked_mul(f))
}

/// Default cap on permutation tuples visited by one enumeration.
pub const DEFAULT_TUPLE_CAP: usize = 5_000_000;

/// All `d`-tuples of permutations of `n` points, in lexicographic order.
/// With `dedup`, only the canonical representative of each
/// simultaneous-conjugacy class is kept.
pub fn enumerate_schreier_graphs(d: usize, n: usize, dedup: bool, cap: usize) -> Result<SchreierTuples> {
    if n == 0 || d == 0 {
        return Err(Error::Mismatch("need n ≥ 1 and d ≥ 1".into()));
    }
    match tuple_count(d, n) {
        Some(c) if c <= cap => {}
        _ => return Err(Error::CapExceeded { what: format!("{d}-tuples of permutations of {n} points"), cap }),
    }
    Ok(SchreierTuples { perms: Some(vec![(0..n).collect(); d]), dedup })
}

/// Iterator returned by [`enumerate_schreier_graphs`].
pub struct SchreierTuples {
    perms: Option<Vec<Vec<usize>>>,
    dedup: bool,
}

impl Iterator for SchreierTuples {
    type Item = SchreierGraph;

    fn next(&mut self) -> Option<SchreierGraph> {
        loop {
            let cur = self.perms.as_mut()?;
            let g = SchreierGraph::from_valid(cur.clone());
            // odometer: the last permutation moves fastest
            let mut advanced = false;
            for p in cur.iter_mut().rev() {
                if next_permutation(p) {
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                self.perms = None;
            }
            if !self.dedup || g.canonical_form() == g {
                return Some(g);
            }
        }
    }
}

/// Largest `val(t, G)` over Schreier graphs with at most `n_max` vertices,
/// with the first maximizer in (size, lexicographic) order.
pub fn sofic_lower_search(t: &LocalTest, n_max: usize, cap: usize) -> Result<(Rational, SchreierGraph)> {
    if n_max == 0 {
        return Err(Error::Mismatch("n_max must be at least 1".into()));
    }
    let mut best: Option<(Rational, SchreierGraph)> = None;
    let mut visited = 0usize;
    for n in 1..=n_max {
        visited = visited.saturating_add(tuple_count(t.d(), n).unwrap_or(usize::MAX));
        if visited > cap {
            return Err(Error::CapExceeded { what: format!("Schreier graphs with ≤ {n_max} vertices"), cap });
        }
        for g in enumerate_schreier_graphs(t.d(), n, false, cap)? {
            let v = t.val(&g)?;
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, g));
            }
        }
    }
    Ok(best.expect("at least one graph"))
}

/// `β ≤ val_sof(T) ≤ β + Θ`, given a Schreier regularity bound.
#[derive(Clone, Debug)]
pub struct SoficBracket {
    pub lower: Rational,
    pub upper: Rational,
    pub witness: SchreierGraph,
    pub theta: Rational,
    pub epsilon: Rational,
    /// `max` of the test over the ball catalog.
    pub m: Rational,
    pub catalog_size: usize,
    /// Vertex bound returned by the oracle.
    pub n_bound: usize,
    /// Set when `m ≤ 0` and `max(|values|, 1)` replaced it.
    pub degenerate_m: bool,
}

/// Brackets `val_sof(t)` using `oracle(ε, r)`, a claimed vertex bound for
/// `ε`-approximating radius-`r` Schreier statistics. With `r = k` and
/// `ε = Θ / (|catalog|·m)`, the best value over graphs of at most
/// `oracle(ε, r)` vertices is within `Θ` below `val_sof`.
pub fn sofic_bracket(
    t: &LocalTest,
    theta: &Rational,
    oracle: &dyn Fn(&Rational, usize) -> usize,
    caps: (usize, usize),
) -> Result<SoficBracket> {
    if !theta.is_positive() {
        return Err(Error::Mismatch("Θ must be positive".into()));
    }
    let (pseudo_cap, tuple_cap) = caps;
    let r = t.radius();
    let window = Arc::new(Window::new(t.d(), 2 * r + 1)?);
    let mut codes = BTreeSet::new();
    let mut m: Option<Rational> = None;
    for s in enumerate_pseudo_subgroups(&window, pseudo_cap)? {
        let ball = pseudo_to_ball(&s, r)?;
        if codes.insert(canonical_code(&ball)) {
            let v = t.test_on_ball(&ball)?;
            if m.as_ref().is_none_or(|x| v > *x) {
                m = Some(v);
            }
        }
    }
    let mut m = m.expect("the full window is always a pseudo-subgroup");
    let degenerate_m = !m.is_positive();
    if degenerate_m {
        m = t.values().map(|v| v.abs()).max().unwrap_or_else(zero).max(one());
    }
    let epsilon = theta / (int(codes.len() as i64) * &m);
    let n_bound = oracle(&epsilon, r).max(1);
    let (lower, witness) = sofic_lower_search(t, n_bound, tuple_cap)?;
    Ok(SoficBracket {
        upper: &lower + theta,
        lower,
        witness,
        theta: theta.clone(),
        epsilon,
        m,
        catalog_size: codes.len(),
        n_bound,
        degenerate_m,
    })
}

/// The ten tests used across examples and acceptance checks, `d = 2`.
pub fn standard_suite() -> Vec<(&'static str, LocalTest)> {
    use Membership::{In, Out};
    let w = |s: &str| Word::parse(s).expect("literal word");
    let c = |pat: &[(&str, Membership)], v: Rational| Clause::new(pat.iter().map(|(s, m)| (w(s), *m)).collect(), v);
    let t = |clauses: Vec<Clause>, default: Rational| {
        LocalTest::with_minimal_window(2, clauses, default).expect("valid literal test")
    };
    vec![
        ("a1_in", t(vec![c(&[("a1", In)], one())], zero())),
        ("a1_out_a1sq_in", t(vec![c(&[("a1", Out), ("a1^2", In)], one())], zero())),
        ("contradictory", t(vec![c(&[("a1", In), ("a1", Out)], one())], zero())),
        ("a2_in", t(vec![c(&[("a2", In)], one())], zero())),
        ("a1_and_a2_in", t(vec![c(&[("a1", In), ("a2", In)], one())], zero())),
        ("a1_and_a2_out", t(vec![c(&[("a1", Out), ("a2", Out)], one())], zero())),
        ("a1a2_in_a1_out", t(vec![c(&[("a1 a2", In), ("a1", Out)], one())], zero())),
        (
            "weighted",
            t(
                vec![
                    c(&[("a1", In), ("a2", Out)], Rational::new(3.into(), 4.into())),
                    c(&[("a2", In)], Rational::new((-1).into(), 2.into())),
                ],
                Rational::new(1.into(), 3.into()),
            ),
        ),
        ("conj_in_a2_out", t(vec![c(&[("a1 a2 a1^-1", In), ("a2", Out)], one())], zero())),
        ("a1cube_in_a1_out", t(vec![c(&[("a1^3", In), ("a1", Out)], one())], zero())),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn suite(name: &str) -> LocalTest {
        standard_suite().into_iter().find(|(n, _)| *n == name).unwrap().1
    }

    #[test]
    fn eval_examples() {
        let t = suite("a1_in");
        let win = Window::new(2, 1).unwrap();
        assert_eq!(t.eval_test(&win.set_of(&[w("e"), w("a1"), w("a1^-1")]).unwrap()).unwrap(), one());
        assert_eq!(t.eval_test(&win.set_of(&[w("e")]).unwrap()).unwrap(), zero());
        let c = suite("contradictory");
        assert_eq!(c.eval_test(&win.full_set()).unwrap(), zero());
        assert_eq!(c.eval_test(&win.set_of(&[w("e")]).unwrap()).unwrap(), zero());
        assert!(LocalTest::new(2, 1, vec![Clause::new(vec![(w("a1^2"), Membership::In)], one())], zero()).is_err());
        assert!(LocalTest::indicator(1, &w("a2")).is_err());
    }

    #[test]
    fn values_on_balls() {
        let t = suite("a1_in");
        let full = PseudoSubgroup::full(Arc::new(Window::new(2, 3).unwrap()));
        assert_eq!(t.test_on_ball(&pseudo_to_ball(&full, 1).unwrap()).unwrap(), one());
        let star = PseudoSubgroup::trivial(Arc::new(Window::new(2, 3).unwrap()));
        assert_eq!(t.test_on_ball(&pseudo_to_ball(&star, 1).unwrap()).unwrap(), zero());
        let deep = suite("a1cube_in_a1_out");
        assert!(matches!(deep.test_on_ball(&pseudo_to_ball(&star, 1).unwrap()), Err(Error::RadiusTooSmall { .. })));
    }

    #[test]
    fn val_examples() {
        let t = suite("a1_in");
        // σ_1 = (0 1)(2)(3 4 5) has one fixed point
        let g = SchreierGraph::new(vec![vec![1, 0, 2, 4, 5, 3], vec![0, 1, 2, 3, 4, 5]]).unwrap();
        assert_eq!(t.val(&g).unwrap(), ratio(1, 6));
        assert_eq!(t.val(&SchreierGraph::trivial(2)).unwrap(), one());
        let swap = SchreierGraph::new(vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(suite("a1_out_a1sq_in").val(&swap).unwrap(), one());
        assert!(t.val(&SchreierGraph::trivial(3)).is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_schreier_graphs(2, 1, false, 100).unwrap().count(), 1);
        assert_eq!(enumerate_schreier_graphs(2, 2, false, 100).unwrap().count(), 4);
        assert_eq!(enumerate_schreier_graphs(2, 3, false, 100).unwrap().count(), 36);
        assert_eq!(enumerate_schreier_graphs(1, 3, true, 100).unwrap().count(), 3);
        assert_eq!(enumerate_schreier_graphs(1, 5, true, 1000).unwrap().count(), 7);
        assert!(enumerate_schreier_graphs(2, 4, false, 100).is_err());
    }

    #[test]
    fn conjugacy_class_counts() {
        // pairs of permutations of 3 points up to simultaneous conjugation:
        // Burnside gives (1/6)·Σ_g |C(g)|² = (36 + 3·4 + 2·9)/6 = 11
        assert_eq!(enumerate_schreier_graphs(2, 3, true, 100).unwrap().count(), 11);
        // n = 4: (1/24)(576 + 6·16 + 3·64 + 8·9 + 6·16) = 43
        assert_eq!(enumerate_schreier_graphs(2, 4, true, 1000).unwrap().count(), 43);
    }

    #[test]
    fn lower_search_examples() {
        let (v, g) = sofic_lower_search(&suite("a1_in"), 1, 1000).unwrap();
        assert_eq!((v, g.n()), (one(), 1));
        let (v, g) = sofic_lower_search(&suite("a1_out_a1sq_in"), 2, 1000).unwrap();
        assert_eq!(v, one());
        assert_eq!(g.perms()[0], vec![1, 0]);
        let (v, _) = sofic_lower_search(&suite("contradictory"), 3, 1000).unwrap();
        assert_eq!(v, zero());
    }

    #[test]
    fn brackets() {
        let theta = ratio(1, 10);
        let b = sofic_bracket(&suite("a1_in"), &theta, &|_, _| 1, (10_000, 1000)).unwrap();
        assert_eq!((b.lower.clone(), b.upper.clone()), (one(), ratio(11, 10)));
        assert_eq!(b.catalog_size, 1512);
        let c = sofic_bracket(&suite("contradictory"), &theta, &|_, _| 2, (10_000, 1000)).unwrap();
        assert_eq!((c.lower.clone(), c.upper.clone()), (zero(), theta.clone()));
        assert!(c.degenerate_m);
        let (direct, _) = sofic_lower_search(&suite("weighted"), 3, 1000).unwrap();
        let wb = sofic_bracket(&suite("weighted"), &theta, &|_, _| 3, (10_000, 1000)).unwrap();
        assert_eq!(wb.lower, direct);
        assert_eq!(wb.m, ratio(3, 4));
    }
}
