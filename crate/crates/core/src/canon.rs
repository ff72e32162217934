//! Canonical codes for rooted (labeled) balls.
//!
//! The code of a ball is the lexicographically least BFS code over all BFS
//! orderings from the root. A BFS code lists, for each vertex after the
//! root in order, its edges to earlier vertices (position and label mask)
//! and its loop mask. Search is exhaustive backtracking; branches that are
//! images of already explored branches under automorphisms found along the
//! way are skipped, which keeps highly symmetric balls cheap.

use std::cmp::Ordering;
use std::fmt;

use crate::ball::RootedBall;
use crate::error::{Error, Result};

const UNSET: usize = usize::MAX;

/// Canonical code of a rooted ball; equal codes ⟺ isomorphic as rooted
/// (label-preserving) graphs.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(Vec<u8>);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let bytes = hex::decode(s).map_err(|e| Error::Parse(format!("bad code {s:?}: {e}")))?;
        let code = CanonicalCode(bytes);
        code.decode()?;
        Ok(code)
    }

    /// Whether the code describes a labeled (Schreier) ball.
    pub fn is_labeled(&self) -> bool {
        self.0.first() == Some(&1)
    }

    /// Rebuilds the ball in canonical vertex order (root = 0). Its radius
    /// is set to the root eccentricity.
    pub fn decode(&self) -> Result<RootedBall> {
        let bad = || Error::Parse("malformed canonical code".into());
        let mut r = Reader { bytes: &self.0, at: 0 };
        let labeled = match r.byte().ok_or_else(bad)? {
            0 => None,
            1 => Some(r.varint().ok_or_else(bad)? as usize),
            _ => return Err(bad()),
        };
        let n = r.varint().ok_or_else(bad)? as usize;
        if n == 0 || n > 1 << 24 {
            return Err(bad());
        }
        let mut adj: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
        let mut loops = vec![0u32; n];
        if labeled.is_some() {
            loops[0] = r.varint().ok_or_else(bad)?;
        }
        for x in 1..n {
            let count = r.varint().ok_or_else(bad)? as usize;
            if count == 0 || count > x {
                return Err(bad());
            }
            for _ in 0..count {
                let y = r.varint().ok_or_else(bad)? as usize;
                if y >= x {
                    return Err(bad());
                }
                let mask = if labeled.is_some() { r.varint().ok_or_else(bad)? } else { 0 };
                let back = match labeled {
                    Some(d) => crate::ball::invert_mask(mask, d),
                    None => 0,
                };
                adj[x].push((y, mask));
                adj[y].push((x, back));
            }
            if labeled.is_some() {
                loops[x] = r.varint().ok_or_else(bad)?;
            }
        }
        if r.at != self.0.len() {
            return Err(bad());
        }
        let mut ball = RootedBall { root: 0, radius: n, labels: labeled, adj, loops };
        for row in &mut ball.adj {
            row.sort_unstable();
        }
        ball.radius = ball.eccentricity();
        ball.check()?;
        Ok(ball)
    }
}

impl fmt::Debug for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalCode({})", self.to_hex())
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl Reader<'_> {
    fn byte(&mut self) -> Option<u8> {
        let b = *self.bytes.get(self.at)?;
        self.at += 1;
        Some(b)
    }

    fn varint(&mut self) -> Option<u32> {
        let mut v: u64 = 0;
        for shift in (0..35).step_by(7) {
            let b = self.byte()?;
            v |= u64::from(b & 0x7f) << shift;
            if b & 0x80 == 0 {
                return u32::try_from(v).ok();
            }
        }
        None
    }
}

fn put_varint(out: &mut Vec<u8>, mut v: u32) {
    loop {
        let b = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(b);
            return;
        }
        out.push(b | 0x80);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Entry {
    back: Vec<(u32, u32)>,
    loops: u32,
}

struct Search<'a> {
    ball: &'a RootedBall,
    order: Vec<usize>,
    pos: Vec<usize>,
    entries: Vec<Entry>,
    best_order: Vec<usize>,
    best_entries: Vec<Entry>,
    best_version: u64,
    autos: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn entry_for(&self, v: usize) -> Entry {
        let mut back: Vec<(u32, u32)> = self.ball.adj[v]
            .iter()
            .filter(|&&(y, _)| self.pos[y] != UNSET && y != v)
            .map(|&(y, m)| (self.pos[y] as u32, m))
            .collect();
        back.sort_unstable();
        Entry { back, loops: self.ball.loops[v] }
    }

    fn undiscovered(&self, v: usize) -> Vec<usize> {
        self.ball.adj[v].iter().map(|e| e.0).filter(|&y| self.pos[y] == UNSET).collect()
    }

    /// Orbit representative lookup for automorphisms fixing the current prefix.
    fn orbit_roots(&self) -> Option<Vec<usize>> {
        let fixing: Vec<&Vec<usize>> = self.autos.iter().filter(|g| self.order.iter().all(|&v| g[v] == v)).collect();
        if fixing.is_empty() {
            return None;
        }
        let n = self.ball.n();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for g in fixing {
            for x in 0..n {
                let (a, b) = (find(&mut parent, x), find(&mut parent, g[x]));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        Some((0..n).map(|x| find(&mut parent, x)).collect())
    }

    /// Explores all BFS continuations of the current prefix. Returns the
    /// depth to unwind to after an automorphism was found.
    fn go(&mut self, mut frontier: usize, mut less: bool) -> Option<usize> {
        let n = self.ball.n();
        while frontier < self.order.len() && self.undiscovered(self.order[frontier]).is_empty() {
            frontier += 1;
        }
        if self.order.len() == n || frontier >= self.order.len() {
            if less || self.best_order.is_empty() {
                self.best_order = self.order.clone();
                self.best_entries = self.entries.clone();
                self.best_version += 1;
                return None;
            }
            // equal code: best_order[i] ↦ order[i] is an automorphism
            let mut g = vec![UNSET; n];
            for (&a, &b) in self.best_order.iter().zip(&self.order) {
                g[a] = b;
            }
            let common = self.best_order.iter().zip(&self.order).take_while(|(a, b)| a == b).count();
            self.autos.push(g);
            return Some(common);
        }
        let depth = self.order.len();
        let candidates = self.undiscovered(self.order[frontier]);
        let mut explored: Vec<usize> = Vec::new();
        for c in candidates {
            if !explored.is_empty() {
                if let Some(roots) = self.orbit_roots() {
                    if explored.iter().any(|&e| roots[e] == roots[c]) {
                        continue;
                    }
                }
            }
            self.pos[c] = depth;
            self.order.push(c);
            let entry = self.entry_for(c);
            let child_less = if less || self.best_order.is_empty() {
                true
            } else {
                match entry.cmp(&self.best_entries[depth - 1]) {
                    Ordering::Less => true,
                    Ordering::Equal => false,
                    Ordering::Greater => {
                        self.order.pop();
                        self.pos[c] = UNSET;
                        explored.push(c);
                        continue;
                    }
                }
            };
            self.entries.push(entry);
            let version = self.best_version;
            let jump = self.go(frontier, child_less);
            self.entries.pop();
            self.order.pop();
            self.pos[c] = UNSET;
            explored.push(c);
            if self.best_version != version {
                // the new best runs through this prefix
                less = false;
            }
            if let Some(t) = jump {
                if t < depth {
                    return Some(t);
                }
            }
        }
        None
    }
}

/// The canonical vertex order: position `i` holds the original vertex.
pub fn canonical_order(ball: &RootedBall) -> Vec<usize> {
    let n = ball.n();
    let mut s = Search {
        ball,
        order: vec![ball.root],
        pos: vec![UNSET; n],
        entries: Vec::new(),
        best_order: Vec::new(),
        best_entries: Vec::new(),
        best_version: 0,
        autos: Vec::new(),
    };
    s.pos[ball.root] = 0;
    s.go(0, false);
    s.best_order
}

/// Canonical code of a rooted ball.
pub fn canonical_code(ball: &RootedBall) -> CanonicalCode {
    let order = canonical_order(ball);
    encode_in_order(ball, &order)
}

fn encode_in_order(ball: &RootedBall, order: &[usize]) -> CanonicalCode {
    let n = ball.n();
    let mut pos = vec![UNSET; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut out = Vec::with_capacity(4 + 3 * n);
    match ball.labels {
        None => out.push(0),
        Some(d) => {
            out.push(1);
            put_varint(&mut out, d as u32);
        }
    }
    put_varint(&mut out, order.len() as u32);
    if ball.labels.is_some() {
        put_varint(&mut out, ball.loops[order[0]]);
    }
    for (i, &v) in order.iter().enumerate().skip(1) {
        let mut back: Vec<(usize, u32)> =
            ball.adj[v].iter().filter(|e| pos[e.0] < i).map(|&(y, m)| (pos[y], m)).collect();
        back.sort_unstable();
        put_varint(&mut out, back.len() as u32);
        for (y, m) in back {
            put_varint(&mut out, y as u32);
            if ball.labels.is_some() {
                put_varint(&mut out, m);
            }
        }
        if ball.labels.is_some() {
            put_varint(&mut out, ball.loops[v]);
        }
    }
    CanonicalCode(out)
}
