//! Finite bounded-degree graphs and free-group Schreier graphs.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use crate::ball::RootedBall;
use crate::error::{Error, Result};
use crate::free_group::{Letter, Word};

/// A finite simple graph with every degree at most `delta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedDegreeGraph {
    delta: usize,
    adj: Vec<Vec<usize>>,
}

impl BoundedDegreeGraph {
    pub fn new(n: usize, delta: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange { vertex: u.max(v), n });
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (v, row) in adj.iter_mut().enumerate() {
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!("parallel edge at {v}")));
            }
            if row.len() > delta {
                return Err(Error::InvalidGraph(format!("vertex {v} has degree {} > {delta}", row.len())));
            }
        }
        Ok(BoundedDegreeGraph { delta, adj })
    }

    /// Degree cap set to the maximum degree.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut deg = vec![0usize; n];
        for &(u, v) in edges {
            if u < n && v < n {
                deg[u] += 1;
                deg[v] += 1;
            }
        }
        Self::new(n, deg.into_iter().max().unwrap_or(0), edges)
    }

    pub fn empty() -> Self {
        BoundedDegreeGraph { delta: 0, adj: Vec::new() }
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::new(n, 2, &edges).expect("cycle needs n ≥ 3")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges).expect("path")
    }

    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Self::from_edges(leaves + 1, &edges).expect("star")
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        Self::from_edges(n, &edges).expect("complete")
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, row) in self.adj.iter().enumerate() {
            out.extend(row.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Same graph with a different degree cap (must still hold).
    pub fn with_delta(&self, delta: usize) -> Result<Self> {
        if self.max_degree() > delta {
            return Err(Error::InvalidGraph(format!("max degree {} exceeds {delta}", self.max_degree())));
        }
        Ok(BoundedDegreeGraph { delta, adj: self.adj.clone() })
    }

    /// Vertices of `other` are shifted by `self.n()`; cap is the larger one.
    pub fn disjoint_union(&self, other: &Self) -> Self {
        let shift = self.n();
        let mut adj = self.adj.clone();
        adj.extend(other.adj.iter().map(|row| row.iter().map(|&v| v + shift).collect()));
        BoundedDegreeGraph { delta: self.delta.max(other.delta), adj }
    }

    /// Applies `perm` (old ↦ new).
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let mut adj = vec![Vec::new(); self.n()];
        for (u, row) in self.adj.iter().enumerate() {
            let mut r: Vec<usize> = row.iter().map(|&v| perm[v]).collect();
            r.sort_unstable();
            adj[perm[u]] = r;
        }
        BoundedDegreeGraph { delta: self.delta, adj }
    }

    /// The induced rooted ball of radius `r` around `v`.
    pub fn ball(&self, v: usize, r: usize) -> Result<RootedBall> {
        self.ball_with_vertices(v, r).map(|(b, _)| b)
    }

    /// The ball together with the original vertex of each ball vertex.
    pub fn ball_with_vertices(&self, v: usize, r: usize) -> Result<(RootedBall, Vec<usize>)> {
        let n = self.n();
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        let order = bfs_within(v, r, |x| self.adj[x].iter().copied());
        let local = local_index(&order, n);
        let adj: Vec<Vec<(usize, u32)>> = order
            .iter()
            .map(|&x| self.adj[x].iter().filter_map(|&y| local.get(&y).map(|&j| (j, 0u32))).collect())
            .collect();
        let ball = RootedBall::new(0, r, None, adj, vec![0; order.len()])?;
        Ok((ball, order))
    }

    /// Connected components, each sorted, in order of least vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if !seen[s] {
                let mut comp = bfs_within(s, n, |x| self.adj[x].iter().copied());
                for &x in &comp {
                    seen[x] = true;
                }
                comp.sort_unstable();
                out.push(comp);
            }
        }
        out
    }
}

fn local_index(order: &[usize], _n: usize) -> BTreeMap<usize, usize> {
    order.iter().enumerate().map(|(i, &x)| (x, i)).collect()
}

/// Vertices within distance `r` of `v`, in BFS order.
fn bfs_within<I: Iterator<Item = usize>>(v: usize, r: usize, nbrs: impl Fn(usize) -> I) -> Vec<usize> {
    let mut dist: BTreeMap<usize, usize> = BTreeMap::from([(v, 0)]);
    let mut order = vec![v];
    let mut q = VecDeque::from([v]);
    while let Some(x) = q.pop_front() {
        let dx = dist[&x];
        if dx == r {
            continue;
        }
        for y in nbrs(x) {
            if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(y) {
                e.insert(dx + 1);
                order.push(y);
                q.push_back(y);
            }
        }
    }
    order
}

/// An action of the free group `F_d` on `{0,…,n−1}`, stored as the `d`
/// permutations `σ_i` (the action of `a_i`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SchreierGraph {
    perms: Vec<Vec<usize>>,
    inverses: Vec<Vec<usize>>,
}

/// First violated Schreier axiom, with witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchreierViolation {
    NoGenerators,
    /// `perms[generator]` has the wrong length.
    WrongLength {
        generator: usize,
        len: usize,
        n: usize,
    },
    /// `perms[generator][vertex]` is not a vertex.
    OutOfRange {
        generator: usize,
        vertex: usize,
        image: usize,
    },
    /// `a_i ∈ c(x,y)` but `a_i⁻¹ ∉ c(y,x)` (or the reverse).
    LabelSymmetry {
        x: usize,
        y: usize,
        label: String,
    },
    /// The letter `label` leaves `x` along zero or several edges.
    NotUnique {
        x: usize,
        label: String,
        targets: Vec<usize>,
    },
}

impl fmt::Display for SchreierViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NoGenerators => write!(f, "no generators"),
            Self::WrongLength { generator, len, n } => {
                write!(f, "permutation {} has length {len}, expected {n}", generator + 1)
            }
            Self::OutOfRange { generator, vertex, image } => {
                write!(f, "a{} sends {vertex} to {image}, outside the vertex set", generator + 1)
            }
            Self::LabelSymmetry { x, y, label } => {
                write!(f, "label symmetry fails: {label} on ({x},{y}) without its inverse on ({y},{x})")
            }
            Self::NotUnique { x, label, targets } => {
                write!(f, "label {label} leaves {x} towards {targets:?}, expected exactly one vertex")
            }
        }
    }
}

/// Checks both Schreier axioms for the edge labeling derived from `perms`:
/// `a_i ∈ c(x,y)` iff `σ_i(x) = y`, and `a_i⁻¹ ∈ c(x,y)` iff `σ_i(y) = x`.
pub fn validate_schreier(perms: &[Vec<usize>]) -> std::result::Result<(), SchreierViolation> {
    let d = perms.len();
    if d == 0 {
        return Err(SchreierViolation::NoGenerators);
    }
    let n = perms[0].len();
    for (i, p) in perms.iter().enumerate() {
        if p.len() != n {
            return Err(SchreierViolation::WrongLength { generator: i, len: p.len(), n });
        }
        if let Some((x, &y)) = p.iter().enumerate().find(|(_, &y)| y >= n) {
            return Err(SchreierViolation::OutOfRange { generator: i, vertex: x, image: y });
        }
    }
    // derived labeling: labels[(x, y)] = mask
    let mut labels: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    for (i, p) in perms.iter().enumerate() {
        for (x, &y) in p.iter().enumerate() {
            *labels.entry((x, y)).or_default() |= 1 << Letter::pos(i as u8).slot(d);
            *labels.entry((y, x)).or_default() |= 1 << Letter::neg(i as u8).slot(d);
        }
    }
    for (&(x, y), &mask) in &labels {
        let back = labels.get(&(y, x)).copied().unwrap_or(0);
        if crate::ball::invert_mask(mask, d) & !back != 0 {
            let bit =
                (0..2 * d).find(|&s| (mask >> s) & 1 == 1 && (back >> Letter::from_slot(s, d).inv().slot(d)) & 1 == 0);
            let label = Letter::from_slot(bit.unwrap_or(0), d).to_string();
            return Err(SchreierViolation::LabelSymmetry { x, y, label });
        }
    }
    for x in 0..n {
        for l in Letter::all(d) {
            let bit = 1 << l.slot(d);
            let targets: Vec<usize> =
                labels.range((x, 0)..(x + 1, 0)).filter(|(_, &m)| m & bit != 0).map(|(&(_, y), _)| y).collect();
            if targets.len() != 1 {
                return Err(SchreierViolation::NotUnique { x, label: l.to_string(), targets });
            }
        }
    }
    Ok(())
}

impl SchreierGraph {
    pub fn new(perms: Vec<Vec<usize>>) -> Result<Self> {
        validate_schreier(&perms).map_err(|v| Error::InvalidSchreier(v.to_string()))?;
        Ok(Self::from_valid(perms))
    }

    pub(crate) fn from_valid(perms: Vec<Vec<usize>>) -> Self {
        let inverses = perms
            .iter()
            .map(|p| {
                let mut inv = vec![0; p.len()];
                for (x, &y) in p.iter().enumerate() {
                    inv[y] = x;
                }
                inv
            })
            .collect();
        SchreierGraph { perms, inverses }
    }

    /// The action of `F_d` on one point.
    pub fn trivial(d: usize) -> Self {
        Self::from_valid(vec![vec![0]; d])
    }

    pub fn n(&self) -> usize {
        self.perms[0].len()
    }

    pub fn d(&self) -> usize {
        self.perms.len()
    }

    pub fn perms(&self) -> &[Vec<usize>] {
        &self.perms
    }

    pub fn act(&self, l: Letter, v: usize) -> usize {
        let i = l.generator as usize;
        if l.inverse {
            self.inverses[i][v]
        } else {
            self.perms[i][v]
        }
    }

    /// `w·v` where `w = ℓ_1⋯ℓ_m` acts right to left: `ℓ_m` is applied first.
    pub fn act_word(&self, w: &Word, v: usize) -> usize {
        w.letters().iter().rev().fold(v, |x, &l| self.act(l, x))
    }

    /// Label mask of the derived edge `x → y` (bits `ℓ` with `ℓ·x = y`).
    pub fn label_mask(&self, x: usize, y: usize) -> u32 {
        let d = self.d();
        Letter::all(d).filter(|&l| self.act(l, x) == y).fold(0, |m, l| m | 1 << l.slot(d))
    }

    /// Rooted edge-labeled ball of radius `r` around `v`. Distance ignores
    /// labels and directions; loops and parallel labels are kept.
    pub fn ball(&self, v: usize, r: usize) -> Result<RootedBall> {
        let n = self.n();
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        let d = self.d();
        if 2 * d > 32 {
            return Err(Error::Mismatch(format!("balls support at most 16 generators, got {d}")));
        }
        let order = bfs_within(v, r, |x| Letter::all(d).map(move |l| self.act(l, x)));
        let local = local_index(&order, n);
        let mut adj = vec![Vec::new(); order.len()];
        let mut loops = vec![0u32; order.len()];
        for (i, &x) in order.iter().enumerate() {
            let mut row: BTreeMap<usize, u32> = BTreeMap::new();
            for l in Letter::all(d) {
                let y = self.act(l, x);
                if let Some(&j) = local.get(&y) {
                    if j == i {
                        loops[i] |= 1 << l.slot(d);
                    } else {
                        *row.entry(j).or_default() |= 1 << l.slot(d);
                    }
                }
            }
            adj[i] = row.into_iter().collect();
        }
        RootedBall::new(0, r, Some(d), adj, loops)
    }

    /// Vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Self) -> Result<Self> {
        if self.d() != other.d() {
            return Err(Error::Mismatch(format!("generator counts {} and {}", self.d(), other.d())));
        }
        let shift = self.n();
        let perms = self
            .perms
            .iter()
            .zip(&other.perms)
            .map(|(a, b)| a.iter().copied().chain(b.iter().map(|&y| y + shift)).collect())
            .collect();
        Ok(Self::from_valid(perms))
    }

    /// Conjugates every permutation by `perm` (old ↦ new).
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let perms = self
            .perms
            .iter()
            .map(|p| {
                let mut q = vec![0; p.len()];
                for (x, &y) in p.iter().enumerate() {
                    q[perm[x]] = perm[y];
                }
                q
            })
            .collect();
        Self::from_valid(perms)
    }

    /// Connected components (orbits of the action), each sorted.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut q = VecDeque::from([s]);
            while let Some(x) = q.pop_front() {
                for l in Letter::all(self.d()) {
                    let y = self.act(l, x);
                    if !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                        q.push_back(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Labeled BFS order of the orbit of `start`, and the generator table
    /// in that order.
    fn labeled_bfs(&self, start: usize) -> (Vec<usize>, Vec<u32>) {
        let d = self.d();
        let mut pos: BTreeMap<usize, usize> = BTreeMap::from([(start, 0)]);
        let mut order = vec![start];
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            for l in Letter::all(d) {
                let y = self.act(l, x);
                if let std::collections::btree_map::Entry::Vacant(e) = pos.entry(y) {
                    e.insert(order.len());
                    order.push(y);
                }
            }
            i += 1;
        }
        let table =
            order.iter().flat_map(|&x| (0..d).map(|g| pos[&self.perms[g][x]] as u32).collect::<Vec<_>>()).collect();
        (order, table)
    }

    /// Canonical relabeling for simultaneous conjugacy: each orbit is
    /// numbered by the labeled BFS from its best start vertex, orbits are
    /// sorted by (size, table). Returns the relabeling (old ↦ new).
    pub fn canonical_relabeling(&self) -> Vec<usize> {
        let mut comps: Vec<(usize, Vec<u32>, Vec<usize>)> = self
            .orbits()
            .into_iter()
            .map(|comp| {
                let (order, table) =
                    comp.iter().map(|&s| self.labeled_bfs(s)).min_by(|a, b| a.1.cmp(&b.1)).expect("nonempty orbit");
                (order.len(), table, order)
            })
            .collect();
        comps.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        let mut perm = vec![0; self.n()];
        let mut next = 0;
        for (_, _, order) in comps {
            for x in order {
                perm[x] = next;
                next += 1;
            }
        }
        perm
    }

    /// Canonical representative of the simultaneous-conjugacy class.
    pub fn canonical_form(&self) -> SchreierGraph {
        self.relabel(&self.canonical_relabeling())
    }
}
