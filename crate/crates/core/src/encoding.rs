//! Codecs between bounded-degree graphs and free-group Schreier graphs.
//!
//! A graph becomes an `F_2` action on its directed edges: `a` rotates the
//! out-edges of a vertex, `b` reverses an edge. An `F_d` action becomes a
//! graph of maximum degree 3: every point is a `2d`-cycle (one vertex per
//! letter) and every `a_i`-edge is a path gadget identified by a pendant
//! of length `i` next to its target end.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::free_group::Letter;
use crate::graph::{BoundedDegreeGraph, SchreierGraph};
use crate::rational::{int, one, Rational};

/// Cyclic order of out-edges at each vertex.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum OrderingPolicy {
    /// Neighbors in increasing order.
    #[default]
    Ascending,
    /// `orders[v]` lists the neighbors of `v` in cyclic order.
    Explicit(Vec<Vec<usize>>),
}

impl OrderingPolicy {
    fn order(&self, g: &BoundedDegreeGraph, v: usize) -> Result<Vec<usize>> {
        match self {
            OrderingPolicy::Ascending => Ok(g.neighbors(v).to_vec()),
            OrderingPolicy::Explicit(orders) => {
                let o = orders.get(v).ok_or_else(|| Error::Mismatch(format!("no cyclic order for vertex {v}")))?;
                let mut sorted = o.clone();
                sorted.sort_unstable();
                if sorted != g.neighbors(v) {
                    return Err(Error::Mismatch(format!("cyclic order at {v} is not a permutation of its neighbors")));
                }
                Ok(o.clone())
            }
        }
    }
}

/// Directed edges `(u, v)` of `g` in lexicographic order.
pub fn directed_edges(g: &BoundedDegreeGraph) -> Vec<(usize, usize)> {
    (0..g.n()).flat_map(|u| g.neighbors(u).iter().map(move |&v| (u, v))).collect()
}

/// The `F_2` action on directed edges. `a` sends `(u, v)` to the next
/// out-edge of `u` in the cyclic order; `b` sends it to `(v, u)`.
pub fn encode_graph(g: &BoundedDegreeGraph, policy: &OrderingPolicy) -> Result<SchreierGraph> {
    if let Some(v) = (0..g.n()).find(|&v| g.degree(v) == 0) {
        return Err(Error::InvalidGraph(format!("vertex {v} is isolated")));
    }
    if g.n() == 0 {
        return Err(Error::EmptyGraph);
    }
    let edges = directed_edges(g);
    let index: BTreeMap<(usize, usize), usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut a = vec![0; edges.len()];
    let mut b = vec![0; edges.len()];
    for u in 0..g.n() {
        let order = policy.order(g, u)?;
        for (j, &v) in order.iter().enumerate() {
            let next = order[(j + 1) % order.len()];
            a[index[&(u, v)]] = index[&(u, next)];
        }
    }
    for (i, &(u, v)) in edges.iter().enumerate() {
        b[i] = index[&(v, u)];
    }
    SchreierGraph::new(vec![a, b])
}

/// Reads a graph back from an `F_2` action. Good `a`-cycles have length at
/// most `delta` and every point on them is swapped by `b` with a distinct
/// point off the cycle; they become vertices (ordered by least point), and
/// `b`-swaps between good cycles become edges.
pub fn decode_schreier(g: &SchreierGraph, delta: usize) -> Result<(BoundedDegreeGraph, Rational)> {
    if g.d() != 2 {
        return Err(Error::Mismatch(format!("expected an F_2 action, got d = {}", g.d())));
    }
    let n = g.n();
    let (a, b) = (&g.perms()[0], &g.perms()[1]);
    let mut cycle_of = vec![usize::MAX; n];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for s in 0..n {
        if cycle_of[s] != usize::MAX {
            continue;
        }
        let mut c = vec![s];
        let mut x = a[s];
        while x != s {
            c.push(x);
            x = a[x];
        }
        for &x in &c {
            cycle_of[x] = cycles.len();
        }
        cycles.push(c);
    }
    let good: Vec<bool> = cycles
        .iter()
        .enumerate()
        .map(|(ci, c)| c.len() <= delta && c.iter().all(|&x| b[x] != x && b[b[x]] == x && cycle_of[b[x]] != ci))
        .collect();
    // cycles are discovered in order of their least point
    let mut vertex_of = vec![usize::MAX; cycles.len()];
    let mut count = 0;
    for (ci, &ok) in good.iter().enumerate() {
        if ok {
            vertex_of[ci] = count;
            count += 1;
        }
    }
    let mut edges = BTreeSet::new();
    let mut covered = 0usize;
    for (ci, c) in cycles.iter().enumerate() {
        if !good[ci] {
            continue;
        }
        covered += c.len();
        for &x in c {
            let cj = cycle_of[b[x]];
            if good[cj] {
                let (u, v) = (vertex_of[ci], vertex_of[cj]);
                edges.insert((u.min(v), u.max(v)));
            }
        }
    }
    let edges: Vec<(usize, usize)> = edges.into_iter().collect();
    let graph = BoundedDegreeGraph::new(count, delta, &edges)?;
    Ok((graph, bad_fraction(n - covered, n)))
}

fn bad_fraction(bad: usize, total: usize) -> Rational {
    if total == 0 {
        one()
    } else {
        int(bad as i64) / int(total as i64)
    }
}

/// Pendant lengths per generator (`a_i` gets `i`, counting from 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GadgetLayout {
    pub d: usize,
}

impl GadgetLayout {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Mismatch(format!("gadget encoding needs d ≥ 2, got {d}")));
        }
        Ok(GadgetLayout { d })
    }

    /// Edges on the main path of every gadget.
    pub fn path_edges(&self) -> usize {
        2 * self.d + 2
    }

    /// Fresh vertices in the gadget of generator `i` (0-based).
    pub fn gadget_vertices(&self, i: usize) -> usize {
        2 * self.d + 1 + (i + 1)
    }

    /// Vertices contributed by one point of the action.
    pub fn block_size(&self) -> usize {
        2 * self.d + (0..self.d).map(|i| self.gadget_vertices(i)).sum::<usize>()
    }
}

/// The block-and-gadget graph of an action. Block vertices come first
/// (`x·2d + slot`, slots `a_1, …, a_d, a_1⁻¹, …, a_d⁻¹`), then gadgets in
/// order of point and generator.
pub fn encode_schreier(g: &SchreierGraph, layout: &GadgetLayout) -> Result<BoundedDegreeGraph> {
    let d = layout.d;
    if g.d() != d {
        return Err(Error::Mismatch(format!("layout has d = {d}, action has d = {}", g.d())));
    }
    let n = g.n();
    let slot = |x: usize, l: Letter| x * 2 * d + l.slot(d);
    let mut edges = Vec::new();
    for x in 0..n {
        for s in 0..2 * d {
            edges.push((x * 2 * d + s, x * 2 * d + (s + 1) % (2 * d)));
        }
    }
    let mut next = n * 2 * d;
    let mut fresh = || {
        next += 1;
        next - 1
    };
    for x in 0..n {
        for i in 0..d {
            let from = slot(x, Letter::pos(i as u8));
            let to = slot(g.perms()[i][x], Letter::neg(i as u8));
            // from → 2d+1 inner vertices → to; the last inner one carries the pendant
            let mut prev = from;
            let mut pre_target = from;
            for _ in 0..2 * d + 1 {
                let v = fresh();
                edges.push((prev, v));
                prev = v;
                pre_target = v;
            }
            edges.push((prev, to));
            let mut tail = pre_target;
            for _ in 0..=i {
                let v = fresh();
                edges.push((tail, v));
                tail = v;
            }
        }
    }
    let total = next;
    debug_assert_eq!(total, n * layout.block_size());
    BoundedDegreeGraph::new(total, 3, &edges)
}

/// All simple cycles of length exactly `len`, each listed once starting
/// at its least vertex in the direction of its smaller second vertex.
pub fn cycles_of_length(h: &BoundedDegreeGraph, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if len < 3 {
        return out;
    }
    let mut path = Vec::with_capacity(len);
    let mut on_path = vec![false; h.n()];
    for s in 0..h.n() {
        path.clear();
        path.push(s);
        on_path[s] = true;
        extend_cycle(h, len, &mut path, &mut on_path, &mut out);
        on_path[s] = false;
    }
    out
}

fn extend_cycle(h: &BoundedDegreeGraph, len: usize, path: &mut Vec<usize>, on: &mut [bool], out: &mut Vec<Vec<usize>>) {
    let s = path[0];
    let last = *path.last().unwrap();
    if path.len() == len {
        if h.has_edge(last, s) && path[1] < path[len - 1] {
            out.push(path.clone());
        }
        return;
    }
    for &v in h.neighbors(last) {
        if v > s && !on[v] {
            on[v] = true;
            path.push(v);
            extend_cycle(h, len, path, on, out);
            path.pop();
            on[v] = false;
        }
    }
}

#[derive(Clone, Debug)]
struct Gadget {
    /// The other cycle vertex.
    end: usize,
    generator: usize,
    /// True when this end is the source (`a_i`) end.
    source: bool,
    vertices: Vec<usize>,
}

/// Follows degree-2 vertices from `prev → cur` until a vertex of another
/// degree; returns the chain (excluding `prev`) and the stopping vertex.
fn walk(h: &BoundedDegreeGraph, mut prev: usize, mut cur: usize, limit: usize) -> Option<(Vec<usize>, usize)> {
    let mut chain = Vec::new();
    for _ in 0..limit {
        if h.degree(cur) != 2 {
            return Some((chain, cur));
        }
        chain.push(cur);
        let next = *h.neighbors(cur).iter().find(|&&w| w != prev)?;
        prev = cur;
        cur = next;
    }
    None
}

/// Parses the gadget leaving cycle vertex `c` through `out`.
fn parse_gadget(h: &BoundedDegreeGraph, d: usize, c: usize, out: usize) -> Option<Gadget> {
    let limit = 4 * d + 8;
    let (first, p) = walk(h, c, out, limit)?;
    if h.degree(p) != 3 {
        return None;
    }
    let came_from = *first.last().unwrap_or(&c);
    let others: Vec<usize> = h.neighbors(p).iter().copied().filter(|&w| w != came_from).collect();
    let mut pendant = None;
    let mut onward = None;
    for &w in &others {
        let (chain, stop) = walk(h, p, w, limit)?;
        if h.degree(stop) == 1 && stop != c {
            let mut vs = chain;
            vs.push(stop);
            if pendant.replace(vs).is_some() {
                return None;
            }
        } else {
            if onward.is_some() {
                return None;
            }
            onward = Some((chain, stop));
        }
    }
    let pendant = pendant?;
    let (second, end) = onward?;
    let main_edges = first.len() + 1 + second.len() + 1;
    let generator = pendant.len().checked_sub(1)?;
    if main_edges != 2 * d + 2 || generator >= d || end == c || h.degree(end) != 3 {
        return None;
    }
    // the pendant sits next to the target end
    let source = match (first.len(), second.len()) {
        (f, 0) if f == 2 * d => true,
        (0, s) if s == 2 * d => false,
        _ => return None,
    };
    let mut vertices = first;
    vertices.push(p);
    vertices.extend(second);
    vertices.extend(pendant);
    Some(Gadget { end, generator, source, vertices })
}

/// Reads an action back from a graph. Good blocks are `2d`-cycles whose
/// vertices each start or end a distinct gadget, carrying every label
/// once; they become points ordered by least vertex. Gadgets joining good
/// blocks give partial `a_i`-edges, and the missing ones are completed by
/// pairing points without an outgoing `a_i` with points without an
/// incoming one, in increasing order.
pub fn decode_graph(h: &BoundedDegreeGraph, d: usize) -> Result<(SchreierGraph, Rational)> {
    if d < 2 {
        return Err(Error::Mismatch(format!("gadget decoding needs d ≥ 2, got {d}")));
    }
    let mut used = vec![false; h.n()];
    // block: (cycle vertices, slot vertex per letter slot, gadgets per slot)
    let mut blocks: Vec<(Vec<usize>, Vec<usize>, Vec<Gadget>)> = Vec::new();
    for cycle in cycles_of_length(h, 2 * d) {
        if cycle.iter().any(|&v| used[v] || h.degree(v) != 3) {
            continue;
        }
        let on: BTreeSet<usize> = cycle.iter().copied().collect();
        let mut slots = vec![usize::MAX; 2 * d];
        let mut gadgets: Vec<Option<Gadget>> = vec![None; 2 * d];
        let mut ok = true;
        for &c in &cycle {
            let outs: Vec<usize> = h.neighbors(c).iter().copied().filter(|w| !on.contains(w)).collect();
            let parsed = match outs.as_slice() {
                [o] => parse_gadget(h, d, c, *o),
                _ => None,
            };
            match parsed {
                Some(gd) => {
                    let l = if gd.source { Letter::pos(gd.generator as u8) } else { Letter::neg(gd.generator as u8) };
                    let s = l.slot(d);
                    if slots[s] != usize::MAX {
                        ok = false;
                        break;
                    }
                    slots[s] = c;
                    gadgets[s] = Some(gd);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            for &v in &cycle {
                used[v] = true;
            }
            blocks.push((cycle, slots, gadgets.into_iter().map(|g| g.expect("all slots filled")).collect()));
        }
    }
    blocks.sort_by_key(|b| *b.0.iter().min().unwrap());
    let n = blocks.len();
    let mut point_of_slot: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for (x, (_, slots, _)) in blocks.iter().enumerate() {
        for (s, &v) in slots.iter().enumerate() {
            point_of_slot.insert(v, (x, s));
        }
    }
    let mut covered: BTreeSet<usize> = BTreeSet::new();
    let mut perms = vec![vec![usize::MAX; n]; d];
    let mut has_in = vec![vec![false; n]; d];
    for (x, (cycle, _, gadgets)) in blocks.iter().enumerate() {
        covered.extend(cycle.iter().copied());
        for (s, gd) in gadgets.iter().enumerate() {
            covered.extend(gd.vertices.iter().copied());
            if s >= d {
                continue;
            }
            // a_i edge x → y when the far end is y's a_i⁻¹ slot
            if let Some(&(y, t)) = point_of_slot.get(&gd.end) {
                if t == s + d {
                    perms[s][x] = y;
                    has_in[s][y] = true;
                }
            }
        }
    }
    for i in 0..d {
        let outs: Vec<usize> = (0..n).filter(|&x| perms[i][x] == usize::MAX).collect();
        let ins: Vec<usize> = (0..n).filter(|&y| !has_in[i][y]).collect();
        assert_eq!(outs.len(), ins.len(), "partial a{} edges form a partial bijection", i + 1);
        for (x, y) in outs.into_iter().zip(ins) {
            perms[i][x] = y;
        }
    }
    let action = SchreierGraph::new(perms)?;
    Ok((action, bad_fraction(h.n() - covered.len(), h.n())))
}

/// Radius needed in the encoded action to see a radius-`r` ball of a
/// degree-`delta` graph.
pub fn graph_to_schreier_radius(delta: usize, r: usize) -> usize {
    (delta + 1) * (r + 1)
}

/// Radius needed in the encoded graph to see a radius-`r` ball of an
/// `F_d` action.
pub fn schreier_to_graph_radius(d: usize, r: usize) -> usize {
    (5 * d + 2) * (r + 1)
}

/// `ε₀ = ε / 4`.
pub fn encoded_epsilon(eps: &Rational) -> Rational {
    eps / int(4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::zero;

    fn edge() -> BoundedDegreeGraph {
        BoundedDegreeGraph::path(2)
    }

    #[test]
    fn single_edge() {
        let s = encode_graph(&edge(), &OrderingPolicy::Ascending).unwrap();
        assert_eq!(s.perms(), &[vec![0, 1], vec![1, 0]]);
        let (g, bad) = decode_schreier(&s, 3).unwrap();
        assert_eq!(g.edges(), vec![(0, 1)]);
        assert_eq!(bad, zero());
    }

    #[test]
    fn triangle() {
        let s = encode_graph(&BoundedDegreeGraph::complete(3), &OrderingPolicy::Ascending).unwrap();
        assert_eq!(s.n(), 6);
        for p in s.perms() {
            assert!((0..6).all(|x| p[x] != x && p[p[x]] == x));
        }
    }

    #[test]
    fn figure_sized_graph() {
        // 7 vertices, 6 edges: a tree
        let g = BoundedDegreeGraph::from_edges(7, &[(0, 1), (1, 2), (1, 3), (3, 4), (4, 5), (4, 6)]).unwrap();
        let s = encode_graph(&g, &OrderingPolicy::Ascending).unwrap();
        assert_eq!(s.n(), 12);
        assert_eq!(decode_schreier(&s, 3).unwrap().0, g);
    }

    #[test]
    fn explicit_order() {
        let g = BoundedDegreeGraph::star(3);
        let pol = OrderingPolicy::Explicit(vec![vec![3, 2, 1], vec![0], vec![0], vec![0]]);
        let s = encode_graph(&g, &pol).unwrap();
        let asc = encode_graph(&g, &OrderingPolicy::Ascending).unwrap();
        assert_ne!(s, asc);
        assert_eq!(decode_schreier(&s, 3).unwrap().0, g);
        let bad = OrderingPolicy::Explicit(vec![vec![1, 1, 2], vec![0], vec![0], vec![0]]);
        assert!(encode_graph(&g, &bad).is_err());
    }

    #[test]
    fn rejects_isolated() {
        let g = BoundedDegreeGraph::new(3, 2, &[(0, 1)]).unwrap();
        assert!(encode_graph(&g, &OrderingPolicy::Ascending).is_err());
    }

    #[test]
    fn trivial_action_decodes_to_nothing() {
        let (g, bad) = decode_schreier(&SchreierGraph::trivial(2), 3).unwrap();
        assert_eq!(g.n(), 0);
        assert_eq!(bad, one());
    }

    #[test]
    fn block_sizes() {
        let layout = GadgetLayout::new(2).unwrap();
        assert_eq!(layout.block_size(), 17);
        let h = encode_schreier(&SchreierGraph::trivial(2), &layout).unwrap();
        assert_eq!(h.n(), 17);
        assert_eq!(h.max_degree(), 3);
        assert_eq!(cycles_of_length(&h, 4).len(), 1);
        assert!(GadgetLayout::new(1).is_err());
    }

    #[test]
    fn schreier_round_trip() {
        let g = SchreierGraph::new(vec![vec![1, 2, 0], vec![0, 2, 1]]).unwrap();
        let h = encode_schreier(&g, &GadgetLayout::new(2).unwrap()).unwrap();
        assert_eq!(cycles_of_length(&h, 4).len(), 3);
        let (back, bad) = decode_graph(&h, 2).unwrap();
        assert_eq!(back, g);
        assert_eq!(bad, zero());
    }

    #[test]
    fn bare_cycle_is_bad() {
        let (g, bad) = decode_graph(&BoundedDegreeGraph::cycle(4), 2).unwrap();
        assert_eq!(g.n(), 0);
        assert_eq!(bad, one());
    }

    #[test]
    fn completion_pairs_missing_edges() {
        // subdivide a cycle edge of block 0 so only block 1 stays good; its
        // gadgets into block 0 still parse, leaving edges to complete
        let g = SchreierGraph::new(vec![vec![1, 0], vec![1, 0]]).unwrap();
        let h = encode_schreier(&g, &GadgetLayout::new(2).unwrap()).unwrap();
        let extra = h.n();
        let mut edges: Vec<(usize, usize)> = h.edges().into_iter().filter(|&e| e != (0, 1)).collect();
        edges.extend([(0, extra), (extra, 1)]);
        let cut = BoundedDegreeGraph::new(h.n() + 1, 3, &edges).unwrap();
        let (back, bad) = decode_graph(&cut, 2).unwrap();
        assert_eq!(back, SchreierGraph::trivial(2));
        // block 1 and all four gadgets at its slots are covered; block 0's
        // five cycle vertices are not
        assert_eq!(bad, crate::rational::ratio(5, 35));
    }
}
