//! Pseudo-IRS polytopes: probability vectors over the pseudo-subgroups of
//! `W_d(k)` that are conjugation-invariant where conjugation stays inside
//! the window, their images in statistics space, and containment checks
//! against unions of open boxes.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use num_traits::{Signed, Zero};

use crate::canon::{canonical_code, CanonicalCode};
use crate::error::{Error, Result};
use crate::free_group::{enumerate_pseudo_subgroups, pseudo_to_ball, stab_window, Letter, PseudoSubgroup, Window};
use crate::graph::SchreierGraph;
use crate::local_test::LocalTest;
use crate::lp::{feasible, maximize, Cmp, Feasibility, LinearSystem, LpOutcome};
use crate::rational::{int, one, zero, Rational};
use crate::stats::{enumerate_schreier_balls, BallCatalog, IndexKind, StatVector};

/// The linear system of `P-IRS_d(k)` over its pseudo-subgroups.
#[derive(Clone, Debug)]
pub struct PirsPolytope {
    d: usize,
    k: usize,
    window: Arc<Window>,
    vars: Vec<PseudoSubgroup>,
    index: HashMap<FixedBitSet, usize>,
    system: LinearSystem,
    conjugation_rows: usize,
}

/// Builds `P-IRS_d(k)`: `μ ≥ 0`, `Σμ = 1`, and for every letter `g` and
/// set `T ⊆ W_d(k−2)`
/// `Σ_{c_g(S) = T} μ(S) = Σ_{S ∩ W_d(k−2) = T} μ(S)`
/// with `c_g(S) = {w ∈ W_d(k−2) : g w g⁻¹ ∈ S}`.
pub fn build_pirs(d: usize, k: usize, cap: usize) -> Result<PirsPolytope> {
    let window = Arc::new(Window::new(d, k)?);
    let vars = enumerate_pseudo_subgroups(&window, cap)?;
    let index = vars.iter().enumerate().map(|(i, s)| (s.members().clone(), i)).collect();
    let mut system = LinearSystem::new(vars.len());
    system.add_row((0..vars.len()).map(|i| (i, one())).collect(), Cmp::Eq, one())?;
    let mut conjugation_rows = 0;
    if k >= 3 {
        let smaller = Window::new(d, k - 2)?;
        let restricted: Vec<FixedBitSet> =
            vars.iter().map(|s| crate::free_group::truncate_set(s.members(), smaller.len())).collect();
        for g in Letter::all(d) {
            let mut rows: BTreeMap<Vec<usize>, BTreeMap<usize, Rational>> = BTreeMap::new();
            for (i, s) in vars.iter().enumerate() {
                let image: Vec<usize> = s.conjugation_image(g, &smaller).ones().collect();
                *rows.entry(image).or_default().entry(i).or_insert_with(zero) += one();
                let res: Vec<usize> = restricted[i].ones().collect();
                *rows.entry(res).or_default().entry(i).or_insert_with(zero) -= one();
            }
            for coeffs in rows.into_values() {
                let coeffs: Vec<(usize, Rational)> = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
                if !coeffs.is_empty() {
                    system.add_row(coeffs, Cmp::Eq, zero())?;
                    conjugation_rows += 1;
                }
            }
        }
    }
    Ok(PirsPolytope { d, k, window, vars, index, system, conjugation_rows })
}

impl PirsPolytope {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn window(&self) -> &Arc<Window> {
        &self.window
    }

    pub fn variables(&self) -> &[PseudoSubgroup] {
        &self.vars
    }

    pub fn system(&self) -> &LinearSystem {
        &self.system
    }

    pub fn conjugation_rows(&self) -> usize {
        self.conjugation_rows
    }

    pub fn index_of(&self, s: &FixedBitSet) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// The point mass on the whole window.
    pub fn full_point_mass(&self) -> Vec<Rational> {
        let full = self.window.full_set();
        let mut mu = vec![zero(); self.vars.len()];
        mu[self.index[&full]] = one();
        mu
    }

    /// Law of `Stab(v) ∩ W_d(k)` for a uniform vertex `v` of `g`.
    pub fn empirical(&self, g: &SchreierGraph) -> Result<Vec<Rational>> {
        if g.d() != self.d {
            return Err(Error::Mismatch(format!("graph has d = {}, polytope has d = {}", g.d(), self.d)));
        }
        let mut mu = vec![zero(); self.vars.len()];
        let w = int(g.n() as i64);
        for v in 0..g.n() {
            let s = stab_window(g, v, &self.window)?;
            let i = self.index_of(s.members()).expect("stabilizer windows are pseudo-subgroups");
            mu[i] += one() / &w;
        }
        Ok(mu)
    }

    pub fn contains_point(&self, mu: &[Rational]) -> bool {
        self.system.satisfies(mu)
    }
}

/// The 0/1 map from `P-IRS_d(k)` to radius-`r` statistics: variable `S`
/// goes to the ball of `S ∩ W_d(2r+1)`.
#[derive(Clone, Debug)]
pub struct StatsMap {
    pub catalog: BallCatalog,
    /// `column[s]` = catalog index of the ball of variable `s`.
    pub column: Vec<usize>,
}

pub fn stats_map(p: &PirsPolytope, r: usize, cap: usize) -> Result<StatsMap> {
    if p.k < 2 * r + 1 {
        return Err(Error::WindowTooSmall { have: p.k, need: 2 * r + 1 });
    }
    let catalog = enumerate_schreier_balls(p.d, r, cap)?;
    let inner = Arc::new(Window::new(p.d, 2 * r + 1)?);
    let mut cache: HashMap<FixedBitSet, usize> = HashMap::new();
    let mut column = Vec::with_capacity(p.vars.len());
    for s in &p.vars {
        let res = s.restrict(&inner)?;
        let c = match cache.get(res.members()) {
            Some(&c) => c,
            None => {
                let code = canonical_code(&pseudo_to_ball(&res, r)?);
                let c = catalog.index_of(&code).expect("realizable balls are in the catalog");
                cache.insert(res.members().clone(), c);
                c
            }
        };
        column.push(c);
    }
    Ok(StatsMap { catalog, column })
}

impl StatsMap {
    /// Dense 0/1 matrix, catalog rows by variable columns.
    pub fn matrix(&self) -> Vec<Vec<u8>> {
        let mut m = vec![vec![0u8; self.column.len()]; self.catalog.len()];
        for (s, &f) in self.column.iter().enumerate() {
            m[f][s] = 1;
        }
        m
    }

    /// Image coordinates of `mu`.
    pub fn apply(&self, mu: &[Rational]) -> Vec<Rational> {
        let mut x = vec![zero(); self.catalog.len()];
        for (s, m) in mu.iter().enumerate() {
            if !m.is_zero() {
                x[self.column[s]] += m;
            }
        }
        x
    }

    /// Image of `mu` as a statistics vector.
    pub fn image(&self, mu: &[Rational]) -> StatVector {
        let entries = self
            .apply(mu)
            .into_iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(f, x)| (self.catalog.codes[f].clone(), x))
            .collect();
        StatVector { radius: self.catalog.radius, kind: self.catalog.kind, entries }
    }

    /// Row `Σ_{S ↦ F} μ(S)` for catalog entry `f`, times `scale`.
    fn coordinate_row(&self, f: usize, scale: &Rational) -> Vec<(usize, Rational)> {
        self.column.iter().enumerate().filter(|(_, &c)| c == f).map(|(s, _)| (s, scale.clone())).collect()
    }

    /// Pulls an objective on statistics back to the variables.
    pub fn pull_back(&self, c: &[Rational]) -> Vec<Rational> {
        self.column.iter().map(|&f| c[f].clone()).collect()
    }
}

/// Maximum of `obj · U(μ)` over the image of the polytope.
pub fn max_over_image(p: &PirsPolytope, map: &StatsMap, obj: &[Rational]) -> Result<Rational> {
    match maximize(&p.system, &map.pull_back(obj))? {
        LpOutcome::Optimal { value, .. } => Ok(value),
        other => Err(Error::Mismatch(format!("polytope LP returned {other:?}"))),
    }
}

/// `max Σ_S μ(S)·t(S ∩ W_d(k_T))` over `P-IRS_d(k)`.
pub fn irs_upper_bound(t: &LocalTest, k: usize, cap: usize) -> Result<Rational> {
    if k < t.radius() {
        return Err(Error::WindowTooSmall { have: k, need: t.radius() });
    }
    let p = build_pirs(t.d(), k, cap)?;
    let obj = p.vars.iter().map(|s| t.eval_test(s.members())).collect::<Result<Vec<_>>>()?;
    match maximize(&p.system, &obj)? {
        LpOutcome::Optimal { value, .. } => Ok(value),
        other => Err(Error::Mismatch(format!("polytope LP returned {other:?}"))),
    }
}

/// An open box `lo < x_F < hi` on the listed coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct OpenBox {
    pub bounds: BTreeMap<CanonicalCode, (Rational, Rational)>,
}

impl OpenBox {
    pub fn contains(&self, v: &StatVector) -> bool {
        self.bounds.iter().all(|(c, (lo, hi))| {
            let x = v.get(c);
            *lo < x && x < *hi
        })
    }
}

/// A finite union of open boxes in radius-`r` statistics space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub kind: IndexKind,
    pub radius: usize,
    pub boxes: Vec<OpenBox>,
}

impl Region {
    /// Checks coordinates against `catalog` and `lo < hi` everywhere.
    pub fn validate(&self, catalog: &BallCatalog) -> Result<()> {
        if catalog.kind != self.kind || catalog.radius != self.radius {
            return Err(Error::InvalidRegion("catalog parameters differ from the region's".into()));
        }
        for b in &self.boxes {
            for (c, (lo, hi)) in &b.bounds {
                if !catalog.contains(c) {
                    return Err(Error::InvalidRegion(format!("coordinate {c} is not in the catalog")));
                }
                if lo >= hi {
                    return Err(Error::InvalidRegion(format!("empty interval on {c}")));
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, v: &StatVector) -> bool {
        v.kind == self.kind && v.radius == self.radius && self.boxes.iter().any(|b| b.contains(v))
    }

    /// One box `−1/10 < x_F < 11/10` on every coordinate.
    pub fn whole_cube(catalog: &BallCatalog) -> Region {
        let lo = Rational::new((-1).into(), 10.into());
        let hi = Rational::new(11.into(), 10.into());
        let bounds = catalog.codes.iter().map(|c| (c.clone(), (lo.clone(), hi.clone()))).collect();
        Region { kind: catalog.kind, radius: catalog.radius, boxes: vec![OpenBox { bounds }] }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Containment {
    Contained,
    /// A point of the polytope whose image lies outside the region.
    NotContained {
        witness: StatVector,
        mu: Vec<Rational>,
    },
}

/// Decides whether the image of `p` lies in the region. The complement of
/// the union is the intersection over boxes of the union of their closed
/// faces `x ≤ lo`, `x ≥ hi`; branches pick one face per box and are
/// explored depth first, pruning as soon as a partial choice is
/// infeasible. At most `branch_cap` LPs are solved.
pub fn check_containment(p: &PirsPolytope, map: &StatsMap, region: &Region, branch_cap: usize) -> Result<Containment> {
    region.validate(&map.catalog)?;
    let faces: Vec<Vec<(usize, Cmp, Rational)>> = region
        .boxes
        .iter()
        .map(|b| {
            let mut fs = Vec::new();
            for (c, (lo, hi)) in &b.bounds {
                let f = map.catalog.index_of(c).expect("validated");
                // statistics lie in [0, 1]
                if !lo.is_negative() {
                    fs.push((f, Cmp::Le, lo.clone()));
                }
                if *hi <= one() {
                    fs.push((f, Cmp::Ge, hi.clone()));
                }
            }
            fs.sort_by_key(|a| (a.0, a.1 == Cmp::Ge));
            fs
        })
        .collect();
    let mut solves = 0usize;
    let mut sys = p.system.clone();
    match dfs(map, &faces, 0, &mut sys, &mut solves, branch_cap)? {
        Some(mu) => Ok(Containment::NotContained { witness: map.image(&mu), mu }),
        None => Ok(Containment::Contained),
    }
}

fn dfs(
    map: &StatsMap,
    faces: &[Vec<(usize, Cmp, Rational)>],
    depth: usize,
    sys: &mut LinearSystem,
    solves: &mut usize,
    cap: usize,
) -> Result<Option<Vec<Rational>>> {
    *solves += 1;
    if *solves > cap {
        return Err(Error::CapExceeded { what: "containment LP branches".into(), cap });
    }
    let point = match feasible(sys) {
        Feasibility::Feasible(x) => x,
        Feasibility::Infeasible => return Ok(None),
    };
    if depth == faces.len() {
        return Ok(Some(point));
    }
    for (f, cmp, v) in &faces[depth] {
        sys.add_row(map.coordinate_row(*f, &one()), *cmp, v.clone())?;
        let found = dfs(map, faces, depth + 1, sys, solves, cap)?;
        sys.pop_row();
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// Outcome of the capped machine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MachineOutcome {
    Halted { k: usize },
    CapReached { k_max: usize, witness: StatVector },
}

/// Runs `k = 2r+1, …, k_max` and halts at the first `k` whose polytope
/// image is contained in the region.
pub fn m_machine(d: usize, r: usize, region: &Region, k_max: usize, caps: MachineCaps) -> Result<MachineOutcome> {
    if k_max < 2 * r + 1 {
        return Err(Error::WindowTooSmall { have: k_max, need: 2 * r + 1 });
    }
    let mut witness = None;
    for k in 2 * r + 1..=k_max {
        let p = build_pirs(d, k, caps.pseudo)?;
        let map = stats_map(&p, r, caps.pseudo)?;
        match check_containment(&p, &map, region, caps.branches)? {
            Containment::Contained => return Ok(MachineOutcome::Halted { k }),
            Containment::NotContained { witness: w, .. } => witness = Some(w),
        }
    }
    Ok(MachineOutcome::CapReached { k_max, witness: witness.expect("at least one round") })
}

/// Resource caps for [`m_machine`].
#[derive(Clone, Copy, Debug)]
pub struct MachineCaps {
    pub pseudo: usize,
    pub branches: usize,
}

impl Default for MachineCaps {
    fn default() -> Self {
        MachineCaps { pseudo: crate::free_group::DEFAULT_PSEUDO_CAP, branches: 100_000 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_test::{sofic_lower_search, standard_suite};
    use crate::rational::ratio;
    use crate::stats::schreier_stats;

    const CAP: usize = 10_000;

    #[test]
    fn small_polytopes() {
        let p = build_pirs(2, 1, CAP).unwrap();
        assert_eq!(p.variables().len(), 4);
        assert_eq!(p.conjugation_rows(), 0);
        assert_eq!(p.system().rows().len(), 1);
        let full = p.full_point_mass();
        assert!(p.contains_point(&full));
        match maximize(p.system(), &full).unwrap() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, one()),
            other => panic!("{other:?}"),
        }
        assert_eq!(build_pirs(2, 2, CAP).unwrap().conjugation_rows(), 0);
        let p3 = build_pirs(2, 3, CAP).unwrap();
        assert!(p3.conjugation_rows() > 0);
        assert!(p3.contains_point(&p3.full_point_mass()));
    }

    #[test]
    fn empirical_points_are_feasible() {
        let p = build_pirs(2, 3, CAP).unwrap();
        let g = SchreierGraph::new(vec![vec![1, 2, 0, 4, 3], vec![0, 3, 4, 1, 2]]).unwrap();
        let mu = p.empirical(&g).unwrap();
        assert!(p.contains_point(&mu));
        // a point mass on a non-normal stabilizer fails the conjugation rows
        let mut bad = vec![zero(); p.variables().len()];
        let path = SchreierGraph::new(vec![vec![1, 0, 2], vec![0, 2, 1]]).unwrap();
        let s = stab_window(&path, 0, p.window()).unwrap();
        bad[p.index_of(s.members()).unwrap()] = one();
        assert!(!p.contains_point(&bad));
    }

    #[test]
    fn stats_map_examples() {
        let p = build_pirs(2, 1, CAP).unwrap();
        let m = stats_map(&p, 0, CAP).unwrap();
        let mut cols = m.column.clone();
        cols.sort();
        assert_eq!(cols, vec![0, 1, 2, 3]);
        let trivial = schreier_stats(&SchreierGraph::trivial(2), 0).unwrap();
        assert_eq!(m.image(&p.full_point_mass()), trivial);
        let p3 = build_pirs(2, 3, CAP).unwrap();
        let m1 = stats_map(&p3, 1, CAP).unwrap();
        let g = SchreierGraph::new(vec![vec![1, 2, 0, 3], vec![0, 3, 2, 1]]).unwrap();
        assert_eq!(m1.image(&p3.empirical(&g).unwrap()), schreier_stats(&g, 1).unwrap());
        assert!(stats_map(&p, 1, CAP).is_err());
    }

    #[test]
    fn upper_bounds() {
        for (name, t) in standard_suite() {
            if t.radius() > 1 {
                continue;
            }
            let u1 = irs_upper_bound(&t, 1, CAP).unwrap();
            let u2 = irs_upper_bound(&t, 2, CAP).unwrap();
            let u3 = irs_upper_bound(&t, 3, CAP).unwrap();
            let (lb, _) = sofic_lower_search(&t, 3, 100_000).unwrap();
            assert!(lb <= u3 && u3 <= u2 && u2 <= u1, "{name}: {lb} {u3} {u2} {u1}");
            match name {
                "a1_in" => assert_eq!(u3, one()),
                "contradictory" => assert_eq!(u3, zero()),
                _ => {}
            }
        }
    }

    fn r0_map(k: usize) -> (PirsPolytope, StatsMap) {
        let p = build_pirs(2, k, CAP).unwrap();
        let m = stats_map(&p, 0, CAP).unwrap();
        (p, m)
    }

    #[test]
    fn containment_examples() {
        let (p, m) = r0_map(1);
        let cube = Region::whole_cube(&m.catalog);
        assert_eq!(check_containment(&p, &m, &cube, 100).unwrap(), Containment::Contained);
        let empty = Region { kind: cube.kind, radius: 0, boxes: vec![] };
        assert!(matches!(check_containment(&p, &m, &empty, 100).unwrap(), Containment::NotContained { .. }));
        // exclude the trivial-action point: x_full < 1
        let trivial = schreier_stats(&SchreierGraph::trivial(2), 0).unwrap();
        let code = trivial.entries.keys().next().unwrap().clone();
        let mut b = OpenBox::default();
        b.bounds.insert(code, (ratio(-1, 10), one()));
        let region = Region { kind: cube.kind, radius: 0, boxes: vec![b] };
        match check_containment(&p, &m, &region, 100).unwrap() {
            Containment::NotContained { witness, .. } => assert_eq!(witness, trivial),
            Containment::Contained => panic!("trivial action lies outside"),
        }
    }

    #[test]
    fn machine_examples() {
        let cat = enumerate_schreier_balls(2, 0, CAP).unwrap();
        let cube = Region::whole_cube(&cat);
        assert_eq!(m_machine(2, 0, &cube, 3, MachineCaps::default()).unwrap(), MachineOutcome::Halted { k: 1 });
        let trivial = schreier_stats(&SchreierGraph::trivial(2), 0).unwrap();
        let code = trivial.entries.keys().next().unwrap().clone();
        let mut b = OpenBox::default();
        b.bounds.insert(code, (ratio(-1, 10), one()));
        let region = Region { kind: cube.kind, radius: 0, boxes: vec![b] };
        match m_machine(2, 0, &region, 2, MachineCaps::default()).unwrap() {
            MachineOutcome::CapReached { witness, .. } => assert_eq!(witness, trivial),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn union_needs_every_box() {
        // four half-spaces x_F > 1/4 cover the simplex only together
        let (p, m) = r0_map(2);
        let boxes: Vec<OpenBox> = m
            .catalog
            .codes
            .iter()
            .map(|c| OpenBox { bounds: BTreeMap::from([(c.clone(), (ratio(1, 5), ratio(2, 1)))]) })
            .collect();
        let region = Region { kind: m.catalog.kind, radius: 0, boxes: boxes.clone() };
        assert_eq!(check_containment(&p, &m, &region, 1000).unwrap(), Containment::Contained);
        let region = Region { kind: m.catalog.kind, radius: 0, boxes: boxes[..3].to_vec() };
        match check_containment(&p, &m, &region, 1000).unwrap() {
            Containment::NotContained { witness, .. } => assert!(!region.contains(&witness)),
            Containment::Contained => panic!(),
        }
        let tight: Vec<OpenBox> = m
            .catalog
            .codes
            .iter()
            .map(|c| OpenBox { bounds: BTreeMap::from([(c.clone(), (ratio(1, 4), ratio(2, 1)))]) })
            .collect();
        // the barycenter has every coordinate exactly 1/4
        let region = Region { kind: m.catalog.kind, radius: 0, boxes: tight };
        match check_containment(&p, &m, &region, 1000).unwrap() {
            Containment::NotContained { witness, .. } => {
                assert!(witness.entries.values().all(|x| *x == ratio(1, 4)))
            }
            Containment::Contained => panic!(),
        }
    }

    #[test]
    fn containment_against_grid() {
        // at k = 1 the polytope is the simplex, so its image is the hull of
        // the point-mass images; a grid point outside the region refutes
        // containment and a contained answer must hold on every grid point
        use crate::sample::rng;
        use rand::Rng;
        let (p, m) = r0_map(1);
        let nv = p.variables().len();
        let mut grid = Vec::new();
        let den = 6i64;
        let mut parts = vec![0i64; nv];
        fn fill(i: usize, left: i64, parts: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
            if i + 1 == parts.len() {
                parts[i] = left;
                out.push(parts.clone());
                return;
            }
            for a in 0..=left {
                parts[i] = a;
                fill(i + 1, left - a, parts, out);
            }
        }
        fill(0, den, &mut parts, &mut grid);
        let images: Vec<StatVector> =
            grid.iter().map(|g| m.image(&g.iter().map(|&a| ratio(a, den)).collect::<Vec<_>>())).collect();
        let mut rng = rng(11);
        for _ in 0..40 {
            let boxes: Vec<OpenBox> = (0..rng.random_range(1..=4))
                .map(|_| OpenBox {
                    bounds: m
                        .catalog
                        .codes
                        .iter()
                        .filter_map(|c| {
                            if rng.random_bool(0.5) {
                                return None;
                            }
                            let lo = rng.random_range(-1..=3);
                            Some((c.clone(), (ratio(lo, 4), ratio(rng.random_range(lo + 1..=5), 4))))
                        })
                        .collect(),
                })
                .collect();
            let region = Region { kind: m.catalog.kind, radius: 0, boxes };
            let grid_inside = images.iter().all(|x| region.contains(x));
            match check_containment(&p, &m, &region, 10_000).unwrap() {
                Containment::Contained => assert!(grid_inside),
                Containment::NotContained { witness, .. } => assert!(!region.contains(&witness)),
            }
        }
    }
}
