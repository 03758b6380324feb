//! Exact two-phase primal simplex over rationals with Bland's rule.
//!
//! Every outcome carries a witness that [`LpOutcome::verify`] re-checks with
//! plain arithmetic: a feasible optimal point, a feasible point plus an
//! improving ray, or a Farkas multiplier vector proving infeasibility.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{pair, Rational, SparseVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: SparseVec,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    fn holds_at(&self, x: &SparseVec) -> bool {
        let lhs = pair(&self.coeffs, x);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }
}

/// Variables are the indices appearing anywhere in the problem. They are
/// free unless listed in `nonneg`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LpProblem {
    pub objective: SparseVec,
    pub rows: Vec<Constraint>,
    pub nonneg: BTreeSet<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum LpOutcome {
    Optimal {
        value: Rational,
        point: SparseVec,
    },
    /// `point` is feasible and `point + t·ray` stays feasible for all `t ≥ 0`
    /// while strictly improving the objective.
    Unbounded {
        point: SparseVec,
        ray: SparseVec,
    },
    /// One multiplier per row: `≥ 0` on `≤` rows, `≤ 0` on `≥` rows. The
    /// combined row has zero coefficients on free variables, nonnegative
    /// ones on nonnegative variables, and a negative right-hand side.
    Infeasible {
        farkas: Vec<Rational>,
    },
}

impl LpProblem {
    pub fn new(objective: SparseVec) -> Self {
        LpProblem {
            objective,
            ..Default::default()
        }
    }

    pub fn add_row(&mut self, coeffs: SparseVec, relation: Relation, rhs: Rational) {
        self.rows.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn set_nonneg(&mut self, var: usize) {
        self.nonneg.insert(var);
    }

    pub fn variables(&self) -> Vec<usize> {
        let mut vars: BTreeSet<usize> = self.nonneg.clone();
        vars.extend(self.objective.support());
        for r in &self.rows {
            vars.extend(r.coeffs.support());
        }
        vars.into_iter().collect()
    }

    pub fn is_feasible_point(&self, x: &SparseVec) -> bool {
        self.nonneg.iter().all(|&j| !x.get(j).is_negative())
            && self.rows.iter().all(|r| r.holds_at(x))
    }
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpOutcome::Infeasible { .. })
    }

    /// Re-checks the outcome's witness against `p` with exact arithmetic.
    pub fn verify(&self, p: &LpProblem, sense: Sense) -> bool {
        match self {
            LpOutcome::Optimal { value, point } => {
                p.is_feasible_point(point) && pair(&p.objective, point) == *value
            }
            LpOutcome::Unbounded { point, ray } => {
                let ray_ok = p.nonneg.iter().all(|&j| !ray.get(j).is_negative())
                    && p.rows.iter().all(|r| {
                        let d = pair(&r.coeffs, ray);
                        match r.relation {
                            Relation::Le => !d.is_positive(),
                            Relation::Eq => d.is_zero(),
                            Relation::Ge => !d.is_negative(),
                        }
                    });
                let gain = pair(&p.objective, ray);
                let improving = match sense {
                    Sense::Maximize => gain.is_positive(),
                    Sense::Minimize => gain.is_negative(),
                };
                p.is_feasible_point(point) && ray_ok && improving
            }
            LpOutcome::Infeasible { farkas } => {
                if farkas.len() != p.rows.len() {
                    return false;
                }
                let mut combined: BTreeMap<usize, Rational> = BTreeMap::new();
                let mut rhs = Rational::zero();
                for (y, row) in farkas.iter().zip(&p.rows) {
                    let sign_ok = match row.relation {
                        Relation::Le => !y.is_negative(),
                        Relation::Ge => !y.is_positive(),
                        Relation::Eq => true,
                    };
                    if !sign_ok {
                        return false;
                    }
                    for (&j, a) in row.coeffs.iter() {
                        *combined.entry(j).or_insert_with(Rational::zero) += &(y * a);
                    }
                    rhs += &(y * &row.rhs);
                }
                let coeffs_ok = combined.iter().all(|(j, c)| {
                    if p.nonneg.contains(j) {
                        !c.is_negative()
                    } else {
                        c.is_zero()
                    }
                });
                coeffs_ok && rhs.is_negative()
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ColKind {
    Structural,
    Slack,
    Artificial,
}

struct Tableau {
    /// `rows[i]` has `ncols + 1` entries; the last one is the right-hand side.
    rows: Vec<Vec<Rational>>,
    /// Reduced costs; the last entry holds minus the current objective.
    obj: Vec<Rational>,
    basis: Vec<usize>,
    kinds: Vec<ColKind>,
}

enum Phase {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn ncols(&self) -> usize {
        self.kinds.len()
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let n = self.ncols() + 1;
        let piv = self.rows[p][q].clone();
        let mut nz = Vec::new();
        for j in 0..n {
            if !self.rows[p][j].is_zero() {
                if j != q {
                    let v = &self.rows[p][j] / &piv;
                    self.rows[p][j] = v;
                }
                nz.push(j);
            }
        }
        self.rows[p][q] = Rational::one();
        let prow = std::mem::take(&mut self.rows[p]);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == p || row[q].is_zero() {
                continue;
            }
            let f = row[q].clone();
            for &j in &nz {
                let delta = &f * &prow[j];
                row[j] -= &delta;
            }
        }
        if !self.obj[q].is_zero() {
            let f = self.obj[q].clone();
            for &j in &nz {
                let delta = &f * &prow[j];
                self.obj[j] -= &delta;
            }
        }
        self.rows[p] = prow;
        self.basis[p] = q;
    }

    /// Minimizes over the current reduced-cost row with Bland's rule.
    fn run(&mut self, allow: impl Fn(ColKind) -> bool) -> Phase {
        let rhs = self.ncols();
        loop {
            let entering =
                (0..self.ncols()).find(|&j| allow(self.kinds[j]) && self.obj[j].is_negative());
            let Some(q) = entering else {
                return Phase::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[q].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[q];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((p, _)) => self.pivot(p, q),
                None => return Phase::Unbounded(q),
            }
        }
    }

    fn set_objective(&mut self, costs: &[Rational]) {
        let rhs = self.ncols();
        let mut obj = costs.to_vec();
        obj.push(Rational::zero());
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &costs[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for j in 0..=rhs {
                if !row[j].is_zero() {
                    let delta = cb * &row[j];
                    obj[j] -= &delta;
                }
            }
        }
        self.obj = obj;
    }

    fn column_values(&self) -> Vec<Rational> {
        let rhs = self.ncols();
        let mut x = vec![Rational::zero(); self.ncols()];
        for (i, &b) in self.basis.iter().enumerate() {
            x[b] = self.rows[i][rhs].clone();
        }
        x
    }
}

/// Column layout of the standardized problem.
struct Layout {
    vars: Vec<usize>,
    /// Per variable: (positive column, optional negative column).
    cols: Vec<(usize, Option<usize>)>,
}

impl Layout {
    fn to_point(&self, colvals: &[Rational]) -> SparseVec {
        SparseVec::from_entries(self.vars.iter().zip(&self.cols).map(|(&v, &(p, n))| {
            let mut x = colvals[p].clone();
            if let Some(n) = n {
                x -= &colvals[n];
            }
            (v, x)
        }))
    }
}

/// Solves `p` exactly. Never fails: every case is an [`LpOutcome`].
pub fn lp_solve(p: &LpProblem, sense: Sense) -> LpOutcome {
    let vars = p.variables();
    let mut kinds = Vec::new();
    let mut cols = Vec::with_capacity(vars.len());
    let mut col_of: BTreeMap<usize, usize> = BTreeMap::new();
    for (idx, &v) in vars.iter().enumerate() {
        let pos = kinds.len();
        kinds.push(ColKind::Structural);
        let neg = if p.nonneg.contains(&v) {
            None
        } else {
            kinds.push(ColKind::Structural);
            Some(pos + 1)
        };
        cols.push((pos, neg));
        col_of.insert(v, idx);
    }
    let layout = Layout { vars, cols };

    // Standardize rows to `M z = b`, `b ≥ 0`, recording sign flips and the
    // column that starts as the identity for each row.
    let m = p.rows.len();
    let mut signs = Vec::with_capacity(m);
    let mut slack_col = vec![None; m];
    for (i, r) in p.rows.iter().enumerate() {
        if r.relation != Relation::Eq {
            slack_col[i] = Some(kinds.len());
            kinds.push(ColKind::Slack);
        }
    }
    let mut init_col = vec![0usize; m];
    let mut needs_art = vec![false; m];
    for (i, r) in p.rows.iter().enumerate() {
        let s = if r.rhs.is_negative() { -1 } else { 1 };
        signs.push(s);
        let slack_sign = match r.relation {
            Relation::Le => 1,
            Relation::Ge => -1,
            Relation::Eq => 0,
        };
        if slack_sign * s == 1 {
            init_col[i] = slack_col[i].unwrap();
        } else {
            needs_art[i] = true;
            init_col[i] = kinds.len();
            kinds.push(ColKind::Artificial);
        }
    }
    let ncols = kinds.len();
    let mut rows = Vec::with_capacity(m);
    for (i, r) in p.rows.iter().enumerate() {
        let sign = if signs[i] < 0 {
            -Rational::one()
        } else {
            Rational::one()
        };
        let mut row = vec![Rational::zero(); ncols + 1];
        for (v, a) in r.coeffs.iter() {
            let (pos, neg) = layout.cols[col_of[v]];
            row[pos] = a * &sign;
            if let Some(neg) = neg {
                row[neg] = -(a * &sign);
            }
        }
        if let Some(sc) = slack_col[i] {
            row[sc] = match r.relation {
                Relation::Le => sign.clone(),
                _ => -sign.clone(),
            };
        }
        if needs_art[i] {
            row[init_col[i]] = Rational::one();
        }
        row[ncols] = &r.rhs * &sign;
        rows.push(row);
    }

    let mut tab = Tableau {
        rows,
        obj: Vec::new(),
        basis: init_col.clone(),
        kinds,
    };

    // Phase 1: minimize the sum of artificials.
    let phase1_costs: Vec<Rational> = tab
        .kinds
        .iter()
        .map(|k| {
            if *k == ColKind::Artificial {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();
    if needs_art.iter().any(|&a| a) {
        tab.set_objective(&phase1_costs);
        tab.run(|_| true);
        if !tab.obj[ncols].is_zero() {
            // Duals π_i = c0_i − reduced_cost(init col); y_i = −π_i · sign_i.
            let farkas = (0..m)
                .map(|i| {
                    let c0 = &phase1_costs[init_col[i]];
                    let pi = c0 - &tab.obj[init_col[i]];
                    if signs[i] < 0 {
                        pi
                    } else {
                        -pi
                    }
                })
                .collect();
            return LpOutcome::Infeasible { farkas };
        }
        // Drive artificials out of the basis, dropping redundant rows.
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.kinds[tab.basis[i]] == ColKind::Artificial {
                let q = (0..ncols)
                    .find(|&j| tab.kinds[j] != ColKind::Artificial && !tab.rows[i][j].is_zero());
                match q {
                    Some(q) => tab.pivot(i, q),
                    None => {
                        tab.rows.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    // Phase 2 in minimization form.
    let flip = match sense {
        Sense::Maximize => -Rational::one(),
        Sense::Minimize => Rational::one(),
    };
    let mut costs = vec![Rational::zero(); ncols];
    for (idx, &v) in layout.vars.iter().enumerate() {
        let c = &p.objective.get(v) * &flip;
        let (pos, neg) = layout.cols[idx];
        if let Some(neg) = neg {
            costs[neg] = -c.clone();
        }
        costs[pos] = c;
    }
    tab.set_objective(&costs);
    let status = tab.run(|k| k != ColKind::Artificial);
    let colvals = tab.column_values();
    let point = layout.to_point(&colvals);
    match status {
        Phase::Optimal => LpOutcome::Optimal {
            value: pair(&p.objective, &point),
            point,
        },
        Phase::Unbounded(q) => {
            let mut dir = vec![Rational::zero(); ncols];
            dir[q] = Rational::one();
            for (i, &b) in tab.basis.iter().enumerate() {
                dir[b] = -tab.rows[i][q].clone();
            }
            LpOutcome::Unbounded {
                point,
                ray: layout.to_point(&dir),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn v(entries: &[(usize, i64)]) -> SparseVec {
        SparseVec::from_entries(entries.iter().map(|&(k, c)| (k, q(c))))
    }

    #[test]
    fn bounded_single_variable() {
        let mut p = LpProblem::new(v(&[(0, 1)]));
        p.add_row(v(&[(0, 1)]), Relation::Le, q(3));
        let out = lp_solve(&p, Sense::Maximize);
        assert!(out.verify(&p, Sense::Maximize));
        assert_eq!(
            out,
            LpOutcome::Optimal {
                value: q(3),
                point: v(&[(0, 3)])
            }
        );
    }

    #[test]
    fn unbounded_ray_points_along_x() {
        let mut p = LpProblem::new(v(&[(0, 1)]));
        p.add_row(v(&[(0, 1)]), Relation::Ge, q(0));
        let out = lp_solve(&p, Sense::Maximize);
        assert!(out.verify(&p, Sense::Maximize));
        match out {
            LpOutcome::Unbounded { ray, .. } => assert!(ray.get(0).is_positive()),
            other => panic!("expected unbounded, got {other:?}"),
        }
    }

    #[test]
    fn triangle_maximum_matches_vertex_enumeration() {
        // Vertices (0,0), (1,0), (0,1): x+y takes 0, 1, 1.
        let brute = [(0, 0), (1, 0), (0, 1)]
            .iter()
            .map(|(x, y)| x + y)
            .max()
            .unwrap();
        let mut p = LpProblem::new(v(&[(0, 1), (1, 1)]));
        p.set_nonneg(0);
        p.set_nonneg(1);
        p.add_row(v(&[(0, 1), (1, 1)]), Relation::Le, q(1));
        let out = lp_solve(&p, Sense::Maximize);
        assert!(out.verify(&p, Sense::Maximize));
        assert_eq!(out.value(), Some(&q(brute)));
    }

    #[test]
    fn infeasible_has_farkas_certificate() {
        let mut p = LpProblem::new(v(&[(0, 1)]));
        p.add_row(v(&[(0, 1)]), Relation::Ge, q(2));
        p.add_row(v(&[(0, 1)]), Relation::Le, q(1));
        let out = lp_solve(&p, Sense::Minimize);
        assert!(out.is_infeasible());
        assert!(out.verify(&p, Sense::Minimize));
    }

    #[test]
    fn equality_rows_with_negative_rhs_and_free_variables() {
        // min x0 + x1 s.t. x0 - x1 = -3, x0 >= -5 (free vars), x1 <= 4
        let mut p = LpProblem::new(v(&[(0, 1), (1, 1)]));
        p.add_row(v(&[(0, 1), (1, -1)]), Relation::Eq, q(-3));
        p.add_row(v(&[(0, 1)]), Relation::Ge, q(-5));
        p.add_row(v(&[(1, 1)]), Relation::Le, q(4));
        let out = lp_solve(&p, Sense::Minimize);
        assert!(out.verify(&p, Sense::Minimize));
        assert_eq!(out.value(), Some(&q(-7)));
    }

    #[test]
    fn redundant_equalities_are_tolerated() {
        let mut p = LpProblem::new(v(&[(0, 1)]));
        p.set_nonneg(0);
        p.set_nonneg(1);
        p.add_row(v(&[(0, 1), (1, 1)]), Relation::Eq, q(2));
        p.add_row(v(&[(0, 2), (1, 2)]), Relation::Eq, q(4));
        let out = lp_solve(&p, Sense::Maximize);
        assert!(out.verify(&p, Sense::Maximize));
        assert_eq!(out.value(), Some(&q(2)));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Classic cycling example (Beale) under the largest-coefficient rule.
        let r = |n: i64, d: i64| Rational::new(n, d);
        let mut p = LpProblem::new(SparseVec::from_entries([
            (0, r(3, 4)),
            (1, r(-150, 1)),
            (2, r(1, 50)),
            (3, r(-6, 1)),
        ]));
        for j in 0..4 {
            p.set_nonneg(j);
        }
        p.add_row(
            SparseVec::from_entries([(0, r(1, 4)), (1, r(-60, 1)), (2, r(-1, 25)), (3, r(9, 1))]),
            Relation::Le,
            r(0, 1),
        );
        p.add_row(
            SparseVec::from_entries([(0, r(1, 2)), (1, r(-90, 1)), (2, r(-1, 50)), (3, r(3, 1))]),
            Relation::Le,
            r(0, 1),
        );
        p.add_row(
            SparseVec::from_entries([(2, r(1, 1))]),
            Relation::Le,
            r(1, 1),
        );
        let out = lp_solve(&p, Sense::Maximize);
        assert!(out.verify(&p, Sense::Maximize));
        assert_eq!(out.value(), Some(&r(1, 20)));
    }
}
