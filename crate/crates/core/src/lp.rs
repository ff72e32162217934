//! Exact rational linear programming: a dense two-phase simplex with
//! Bland's rule.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{zero, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

/// One constraint `Σ coeffs · x  cmp  rhs`, stored sparsely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<(usize, Rational)>,
    pub cmp: Cmp,
    pub rhs: Rational,
}

/// Linear constraints over `n` variables with optional bounds. Variables
/// default to `x ≥ 0` with no upper bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    n: usize,
    lower: Vec<Option<Rational>>,
    upper: Vec<Option<Rational>>,
    rows: Vec<Row>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Unbounded,
    Infeasible,
}

impl LinearSystem {
    pub fn new(n: usize) -> Self {
        LinearSystem { n, lower: vec![Some(zero()); n], upper: vec![None; n], rows: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn bounds(&self, j: usize) -> (Option<&Rational>, Option<&Rational>) {
        (self.lower[j].as_ref(), self.upper[j].as_ref())
    }

    /// `None` removes the bound on that side.
    pub fn set_bounds(&mut self, j: usize, lo: Option<Rational>, hi: Option<Rational>) {
        self.lower[j] = lo;
        self.upper[j] = hi;
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, Rational)>, cmp: Cmp, rhs: Rational) -> Result<()> {
        if let Some(&(j, _)) = coeffs.iter().find(|(j, _)| *j >= self.n) {
            return Err(Error::Mismatch(format!("row mentions variable {j} of {}", self.n)));
        }
        self.rows.push(Row { coeffs, cmp, rhs });
        Ok(())
    }

    pub(crate) fn pop_row(&mut self) {
        self.rows.pop();
    }

    /// Adds a dense row.
    pub fn add_dense(&mut self, coeffs: &[Rational], cmp: Cmp, rhs: Rational) -> Result<()> {
        if coeffs.len() != self.n {
            return Err(Error::Mismatch(format!("row width {} for {} variables", coeffs.len(), self.n)));
        }
        let sparse = coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(j, c)| (j, c.clone())).collect();
        self.add_row(sparse, cmp, rhs)
    }

    /// Whether `x` satisfies every bound and row exactly.
    pub fn satisfies(&self, x: &[Rational]) -> bool {
        if x.len() != self.n {
            return false;
        }
        let bounds_ok = (0..self.n).all(|j| {
            self.lower[j].as_ref().is_none_or(|l| x[j] >= *l) && self.upper[j].as_ref().is_none_or(|u| x[j] <= *u)
        });
        bounds_ok
            && self.rows.iter().all(|r| {
                let lhs = r.coeffs.iter().fold(zero(), |a, (j, c)| a + c * &x[*j]);
                match r.cmp {
                    Cmp::Le => lhs <= r.rhs,
                    Cmp::Ge => lhs >= r.rhs,
                    Cmp::Eq => lhs == r.rhs,
                }
            })
    }
}

/// Whether the system has a solution, with one if so.
pub fn feasible(sys: &LinearSystem) -> Feasibility {
    match solve(sys, None) {
        LpOutcome::Optimal { point, .. } => Feasibility::Feasible(point),
        LpOutcome::Infeasible => Feasibility::Infeasible,
        LpOutcome::Unbounded => unreachable!("phase one is bounded"),
    }
}

/// Maximizes `obj · x` over the system.
pub fn maximize(sys: &LinearSystem, obj: &[Rational]) -> Result<LpOutcome> {
    if obj.len() != sys.n {
        return Err(Error::Mismatch(format!("objective width {} for {} variables", obj.len(), sys.n)));
    }
    Ok(solve(sys, Some(obj)))
}

/// Minimizes `obj · x` over the system.
pub fn minimize(sys: &LinearSystem, obj: &[Rational]) -> Result<LpOutcome> {
    let neg: Vec<Rational> = obj.iter().map(|c| -c).collect();
    Ok(match maximize(sys, &neg)? {
        LpOutcome::Optimal { value, point } => LpOutcome::Optimal { value: -value, point },
        other => other,
    })
}

// x_j = offset_j + Σ sign · y_col
struct VarMap {
    offset: Rational,
    cols: Vec<(usize, bool)>,
}

struct Tableau {
    // rows[i] has `width + 1` entries; the last is the right-hand side
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    // reduced costs for minimization; last entry is −(objective value)
    cost: Vec<Rational>,
    width: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for x in self.rows[r].iter_mut() {
                if !x.is_zero() {
                    *x /= &p;
                }
            }
        }
        let nz: Vec<usize> = (0..=self.width).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<Rational>| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for &j in &nz {
                let delta = &f * &pivot_row[j];
                row[j] -= delta;
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost);
        self.basis[r] = c;
    }

    /// Sets the cost row to `c` reduced against the current basis.
    fn set_costs(&mut self, c: &[Rational]) {
        let mut cost: Vec<Rational> = c.to_vec();
        cost.push(zero());
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost[b].clone();
            if cb.is_zero() {
                continue;
            }
            for j in 0..=self.width {
                if !self.rows[i][j].is_zero() {
                    let delta = &cb * &self.rows[i][j];
                    cost[j] -= delta;
                }
            }
        }
        self.cost = cost;
    }

    /// Bland's rule. Returns false if unbounded.
    fn run(&mut self, allowed: &[bool]) -> bool {
        loop {
            let Some(c) = (0..self.width).find(|&j| allowed[j] && self.cost[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(Rational, usize, usize)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[self.width] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((q, b, _)) => ratio < *q || (ratio == *q && self.basis[i] < *b),
                    };
                    if better {
                        best = Some((ratio, self.basis[i], i));
                    }
                }
            }
            match best {
                Some((_, _, r)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

fn solve(sys: &LinearSystem, obj: Option<&[Rational]>) -> LpOutcome {
    // substitute bounds: shifted or split variables
    let mut maps = Vec::with_capacity(sys.n);
    let mut ny = 0;
    let mut rows: Vec<(Vec<(usize, Rational)>, Cmp, Rational)> = Vec::new();
    for j in 0..sys.n {
        let m = match &sys.lower[j] {
            Some(l) => {
                ny += 1;
                VarMap { offset: l.clone(), cols: vec![(ny - 1, true)] }
            }
            None => {
                ny += 2;
                VarMap { offset: zero(), cols: vec![(ny - 2, true), (ny - 1, false)] }
            }
        };
        if let Some(u) = &sys.upper[j] {
            let coeffs = m.cols.iter().map(|&(c, s)| (c, if s { Rational::one() } else { -Rational::one() })).collect();
            rows.push((coeffs, Cmp::Le, u - &m.offset));
        }
        maps.push(m);
    }
    for r in &sys.rows {
        let mut coeffs: Vec<(usize, Rational)> = Vec::new();
        let mut rhs = r.rhs.clone();
        for (j, a) in &r.coeffs {
            rhs -= a * &maps[*j].offset;
            for &(c, s) in &maps[*j].cols {
                coeffs.push((c, if s { a.clone() } else { -a }));
            }
        }
        rows.push((coeffs, r.cmp, rhs));
    }
    // normalize to rhs ≥ 0 and lay out slack / artificial columns
    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.1 != Cmp::Eq).count();
    let mut n_art = 0;
    for r in rows.iter_mut() {
        if r.2.is_negative() {
            r.2 = -r.2.clone();
            for (_, a) in r.0.iter_mut() {
                *a = -a.clone();
            }
            r.1 = match r.1 {
                Cmp::Le => Cmp::Ge,
                Cmp::Ge => Cmp::Le,
                Cmp::Eq => Cmp::Eq,
            };
        }
        if r.1 != Cmp::Le {
            n_art += 1;
        }
    }
    let width = ny + n_slack + n_art;
    let mut t = Tableau { rows: Vec::with_capacity(m), basis: Vec::with_capacity(m), cost: Vec::new(), width };
    let (mut next_slack, mut next_art) = (ny, ny + n_slack);
    for (coeffs, cmp, rhs) in rows {
        let mut row = vec![zero(); width + 1];
        for (c, a) in coeffs {
            row[c] += a;
        }
        row[width] = rhs;
        match cmp {
            Cmp::Le => {
                row[next_slack] = Rational::one();
                t.basis.push(next_slack);
                next_slack += 1;
            }
            Cmp::Ge => {
                row[next_slack] = -Rational::one();
                next_slack += 1;
                row[next_art] = Rational::one();
                t.basis.push(next_art);
                next_art += 1;
            }
            Cmp::Eq => {
                row[next_art] = Rational::one();
                t.basis.push(next_art);
                next_art += 1;
            }
        }
        t.rows.push(row);
    }
    let is_art = |j: usize| j >= ny + n_slack && j < width;
    // phase one
    if n_art > 0 {
        let c: Vec<Rational> = (0..width).map(|j| if is_art(j) { Rational::one() } else { zero() }).collect();
        t.set_costs(&c);
        let all = vec![true; width];
        t.run(&all);
        if !t.cost[width].is_zero() {
            return LpOutcome::Infeasible;
        }
        // drive zero-level artificials out of the basis; drop redundant rows
        let mut i = 0;
        while i < t.rows.len() {
            if is_art(t.basis[i]) {
                match (0..width).find(|&j| !is_art(j) && !t.rows[i][j].is_zero()) {
                    Some(j) => {
                        t.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }
    let allowed: Vec<bool> = (0..width).map(|j| !is_art(j)).collect();
    let mut c = vec![zero(); width];
    let mut const_term = zero();
    if let Some(obj) = obj {
        for (j, a) in obj.iter().enumerate() {
            const_term += a * &maps[j].offset;
            for &(col, s) in &maps[j].cols {
                // minimize −obj
                c[col] = if s { -a.clone() } else { a.clone() };
            }
        }
    }
    t.set_costs(&c);
    if !t.run(&allowed) {
        return LpOutcome::Unbounded;
    }
    let mut y = vec![zero(); width];
    for (i, &b) in t.basis.iter().enumerate() {
        y[b] = t.rows[i][width].clone();
    }
    let point: Vec<Rational> = maps
        .iter()
        .map(|m| m.cols.iter().fold(m.offset.clone(), |acc, &(col, s)| if s { acc + &y[col] } else { acc - &y[col] }))
        .collect();
    // cost[width] holds −min(−obj·y) = max over y
    let value = &t.cost[width] + const_term;
    debug_assert!(sys.satisfies(&point));
    LpOutcome::Optimal { value, point }
}
