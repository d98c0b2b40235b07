//! Dense two-phase tableau simplex with Bland's anti-cycling rule.
//!
//! Works over any [`Scalar`]: with [`crate::exact::ExactReal`] every pivot is
//! exact. With `f64` pricing is Dantzig's rule (Bland's after a run of
//! degenerate pivots), small pivots are skipped, the tableau is rebuilt from
//! the original data by an LU solve every [`REFACTOR_INTERVAL`] pivots and
//! before any verdict, and a residual report is attached to the solution.

use std::cmp::Ordering;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::scalar::Scalar;

/// Smallest pivot magnitude accepted in float mode.
pub const PIVOT_TOL: f64 = 1e-12;
/// Reduced-cost and feasibility tolerance in float mode.
pub const OPT_TOL: f64 = 1e-10;
/// Float mode: pivots between tableau rebuilds.
pub const REFACTOR_INTERVAL: usize = 20;
/// Float mode: degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_RUN: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarBound {
    NonNegative,
    NonPositive,
    Free,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem<S> {
    pub direction: Direction,
    pub objective: Vec<S>,
    pub rows: Vec<Vec<S>>,
    pub senses: Vec<Sense>,
    pub rhs: Vec<S>,
    pub bounds: Vec<VarBound>,
}

impl<S: Scalar> LpProblem<S> {
    pub fn new(direction: Direction, objective: Vec<S>, bounds: Vec<VarBound>) -> Self {
        LpProblem {
            direction,
            objective,
            rows: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
            bounds,
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<S>, sense: Sense, rhs: S) {
        self.rows.push(coeffs);
        self.senses.push(sense);
        self.rhs.push(rhs);
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn check_dimensions(&self) -> Result<(), LpError> {
        let n = self.objective.len();
        if self.bounds.len() != n {
            return Err(LpError::DimensionMismatch {
                what: "variable bounds",
                expected: n,
                found: self.bounds.len(),
            });
        }
        let m = self.rows.len();
        for (what, found) in [("row senses", self.senses.len()), ("right-hand side", self.rhs.len())] {
            if found != m {
                return Err(LpError::DimensionMismatch { what, expected: m, found });
            }
        }
        for row in &self.rows {
            if row.len() != n {
                return Err(LpError::DimensionMismatch { what: "row length", expected: n, found: row.len() });
            }
        }
        let finite = |v: &S| v.to_f64().is_finite();
        if !(self.objective.iter().all(finite)
            && self.rhs.iter().all(finite)
            && self.rows.iter().flatten().all(finite))
        {
            return Err(LpError::NonFinite);
        }
        Ok(())
    }

    /// Row activity `Σ_j a_ij x_j`.
    pub fn activity(&self, row: usize, x: &[S]) -> S {
        self.rows[row]
            .iter()
            .zip(x)
            .fold(S::zero(), |acc, (a, v)| acc + &(a.clone() * v))
    }

    pub fn objective_value(&self, x: &[S]) -> S {
        self.objective
            .iter()
            .zip(x)
            .fold(S::zero(), |acc, (c, v)| acc + &(c.clone() * v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Origin of a standard-form column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    /// Original variable, with the sign it enters the standard form with.
    Structural { var: usize, negated: bool },
    Slack { row: usize },
    Artificial { row: usize },
}

#[derive(Debug, Clone)]
pub struct LpSolution<S> {
    pub status: LpStatus,
    /// Objective value in the problem's own direction (optimal only).
    pub value: Option<S>,
    pub point: Vec<S>,
    /// One multiplier per row; `y·b` equals the optimal value.
    pub duals: Vec<S>,
    /// Basic column per standard-form row.
    pub basis: Vec<Column>,
    pub iterations: usize,
    /// Float mode: worst primal/dual/gap residual at the returned point.
    pub residual: Option<f64>,
    pub tableau_log: Option<String>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch { what: &'static str, expected: usize, found: usize },
    #[error("problem data contains non-finite entries")]
    NonFinite,
    #[error("numeric breakdown after {iterations} pivots (largest entry {max_entry:e}, smallest pivot {min_pivot:e})")]
    NumericBreakdown { iterations: usize, max_entry: f64, min_pivot: f64 },
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub dump_tableau: bool,
    pub max_iterations: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { dump_tableau: false, max_iterations: 200_000 }
    }
}

pub fn solve<S: Scalar>(problem: &LpProblem<S>) -> Result<LpSolution<S>, LpError> {
    solve_with(problem, &SolveOptions::default())
}

struct Tableau<S> {
    columns: Vec<Column>,
    /// m rows of `ncols + 1` entries, the last being the right-hand side.
    rows: Vec<Vec<S>>,
    basis: Vec<usize>,
    /// Reduced costs, last entry is minus the objective value.
    costs: Vec<S>,
    /// Column that formed the identity in row i at the start.
    initial: Vec<usize>,
    /// +1/-1 applied to row i to make its right-hand side nonnegative.
    row_negated: Vec<bool>,
    iterations: usize,
    min_pivot: f64,
    log: Option<String>,
    /// Rows as first built, for float refactorisation.
    original: Vec<Vec<S>>,
    /// Cost vector of the current phase.
    phase_cost: Vec<S>,
    since_refactor: usize,
}

impl<S: Scalar> Tableau<S> {
    fn width(&self) -> usize {
        self.columns.len()
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let piv = self.rows[r][e].clone();
        self.min_pivot = self.min_pivot.min(piv.to_f64().abs());
        let inv = S::one() / &piv;
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = v.clone() * &inv;
            }
        }
        let pivot_row = self.rows[r].clone();
        let nz: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[e].is_zero() {
                continue;
            }
            let factor = row[e].clone();
            for &j in &nz {
                row[j].sub_mul_assign(&factor, &pivot_row[j]);
            }
            row[e] = S::zero();
        }
        if !self.costs[e].is_zero() {
            let factor = self.costs[e].clone();
            for &j in &nz {
                self.costs[j].sub_mul_assign(&factor, &pivot_row[j]);
            }
            self.costs[e] = S::zero();
        }
        self.basis[r] = e;
        self.iterations += 1;
        self.since_refactor += 1;
        if let Some(log) = self.log.as_mut() {
            let _ = writeln!(log, "pivot {}: enter {:?} at row {}", self.iterations, self.columns[e], r);
        }
    }

    fn reset_costs(&mut self, cost: &[S]) {
        self.phase_cost = cost.to_vec();
        let w = self.width();
        let mut d: Vec<S> = cost.to_vec();
        d.push(S::zero());
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for j in 0..=w {
                if !row[j].is_zero() {
                    d[j].sub_mul_assign(cb, &row[j]);
                }
            }
        }
        self.costs = d;
    }

    /// Float mode: recompute `B⁻¹ [A | b]` and the reduced costs from the
    /// original rows, discarding accumulated roundoff.
    fn refactor(&mut self) -> Result<(), LpError> {
        self.since_refactor = 0;
        let m = self.rows.len();
        if S::EXACT || m == 0 {
            return Ok(());
        }
        let w = self.width();
        let basis_matrix = DMatrix::from_fn(m, m, |i, k| self.original[i][self.basis[k]].to_f64());
        let data = DMatrix::from_fn(m, w + 1, |i, j| self.original[i][j].to_f64());
        let solved = basis_matrix.lu().solve(&data).ok_or_else(|| self.breakdown())?;
        let scale = 1.0 + solved.column(w).amax();
        for i in 0..m {
            for j in 0..=w {
                let mut v = solved[(i, j)];
                if v.abs() < 1e-15 * scale {
                    v = 0.0;
                }
                if j == w && v < 0.0 && v > -1e-9 * scale {
                    v = 0.0;
                }
                self.rows[i][j] = S::from_f64(v).ok_or_else(|| self.breakdown())?;
            }
        }
        for (i, &b) in self.basis.clone().iter().enumerate() {
            for (k, row) in self.rows.iter_mut().enumerate() {
                row[b] = if k == i { S::one() } else { S::zero() };
            }
        }
        let cost = std::mem::take(&mut self.phase_cost);
        self.reset_costs(&cost);
        Ok(())
    }

    /// Runs the simplex until optimal or unbounded; returns false when
    /// unbounded.
    fn optimise(&mut self, allowed: &dyn Fn(usize) -> bool, max_iter: usize) -> Result<bool, LpError> {
        let rhs = self.width();
        let mut degenerate = 0usize;
        loop {
            if self.iterations >= max_iter {
                return Err(self.breakdown());
            }
            if !S::EXACT && self.since_refactor >= REFACTOR_INTERVAL {
                self.refactor()?;
            }
            let candidates = (0..self.width()).filter(|&j| allowed(j) && self.costs[j].sign_tol(OPT_TOL) == Ordering::Less);
            let entering = if S::EXACT || degenerate >= DEGENERATE_RUN {
                candidates.min()
            } else {
                candidates.min_by(|&a, &b| self.costs[a].cmp_tol(&self.costs[b], 0.0).then(a.cmp(&b)))
            };
            let Some(e) = entering else {
                if !S::EXACT && self.since_refactor > 0 {
                    self.refactor()?;
                    continue;
                }
                return Ok(true);
            };
            let pivot_tol = if S::EXACT {
                0.0
            } else {
                let col_max = self.rows.iter().map(|r| r[e].to_f64().abs()).fold(0.0, f64::max);
                PIVOT_TOL * (1.0 + col_max)
            };
            let mut leave: Option<usize> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][e].sign_tol(pivot_tol) != Ordering::Greater {
                    continue;
                }
                leave = Some(match leave {
                    None => i,
                    Some(b) => {
                        let lhs = self.rows[i][rhs].clone() * &self.rows[b][e];
                        let rhs_v = self.rows[b][rhs].clone() * &self.rows[i][e];
                        match lhs.cmp_tol(&rhs_v, PIVOT_TOL) {
                            Ordering::Less => i,
                            Ordering::Greater => b,
                            Ordering::Equal => {
                                if self.basis[i] < self.basis[b] {
                                    i
                                } else {
                                    b
                                }
                            }
                        }
                    }
                });
            }
            let Some(r) = leave else {
                if !S::EXACT && self.since_refactor > 0 {
                    self.refactor()?;
                    continue;
                }
                return Ok(false);
            };
            let before = self.costs[rhs].clone();
            self.pivot(r, e);
            if self.costs[rhs].cmp_tol(&before, OPT_TOL) == Ordering::Equal {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            if !S::EXACT && !self.costs[rhs].to_f64().is_finite() {
                return Err(self.breakdown());
            }
        }
    }

    fn breakdown(&self) -> LpError {
        let max_entry = self
            .rows
            .iter()
            .flatten()
            .map(|v| v.to_f64().abs())
            .fold(0.0, f64::max);
        LpError::NumericBreakdown { iterations: self.iterations, max_entry, min_pivot: self.min_pivot }
    }

    fn dump(&mut self, title: &str) {
        if self.log.is_none() {
            return;
        }
        let mut text = String::new();
        let _ = writeln!(text, "== {title}");
        let _ = writeln!(
            text,
            "cost | {}",
            self.costs.iter().map(|v| v.to_text()).collect::<Vec<_>>().join(" ")
        );
        for (i, row) in self.rows.iter().enumerate() {
            let _ = writeln!(
                text,
                "{:?} | {}",
                self.columns[self.basis[i]],
                row.iter().map(|v| v.to_text()).collect::<Vec<_>>().join(" ")
            );
        }
        if let Some(log) = self.log.as_mut() {
            log.push_str(&text);
        }
    }
}

pub fn solve_with<S: Scalar>(problem: &LpProblem<S>, options: &SolveOptions) -> Result<LpSolution<S>, LpError> {
    problem.check_dimensions()?;
    let m = problem.num_rows();
    let n = problem.num_vars();
    let minimise_sign = match problem.direction {
        Direction::Minimize => S::one(),
        Direction::Maximize => -S::one(),
    };

    // Standard form columns.
    let mut columns = Vec::new();
    let mut cost = Vec::new();
    for (var, bound) in problem.bounds.iter().enumerate() {
        let c = minimise_sign.clone() * &problem.objective[var];
        match bound {
            VarBound::NonNegative => {
                columns.push(Column::Structural { var, negated: false });
                cost.push(c);
            }
            VarBound::NonPositive => {
                columns.push(Column::Structural { var, negated: true });
                cost.push(-c);
            }
            VarBound::Free => {
                columns.push(Column::Structural { var, negated: false });
                cost.push(c.clone());
                columns.push(Column::Structural { var, negated: true });
                cost.push(-c);
            }
        }
    }
    let row_negated: Vec<bool> = problem.rhs.iter().map(|b| b.sign_tol(0.0) == Ordering::Less).collect();
    let mut slack_col = vec![None; m];
    for (row, sense) in problem.senses.iter().enumerate() {
        if *sense != Sense::Eq {
            slack_col[row] = Some(columns.len());
            columns.push(Column::Slack { row });
            cost.push(S::zero());
        }
    }
    let mut initial = vec![0; m];
    for row in 0..m {
        let slack_positive = matches!((problem.senses[row], row_negated[row]), (Sense::Le, false) | (Sense::Ge, true));
        if slack_positive {
            initial[row] = slack_col[row].expect("inequality row has a slack");
        } else {
            initial[row] = columns.len();
            columns.push(Column::Artificial { row });
            cost.push(S::zero());
        }
    }
    let width = columns.len();
    let mut rows = vec![vec![S::zero(); width + 1]; m];
    for (j, col) in columns.iter().enumerate() {
        match *col {
            Column::Structural { var, negated } => {
                for (i, row) in rows.iter_mut().enumerate() {
                    let a = &problem.rows[i][var];
                    if a.is_zero() {
                        continue;
                    }
                    let mut v = a.clone();
                    if negated != row_negated[i] {
                        v = -v;
                    }
                    row[j] = v;
                }
            }
            Column::Slack { row } => {
                let base = if problem.senses[row] == Sense::Le { S::one() } else { -S::one() };
                rows[row][j] = if row_negated[row] { -base } else { base };
            }
            Column::Artificial { row } => rows[row][j] = S::one(),
        }
    }
    for i in 0..m {
        let b = problem.rhs[i].clone();
        rows[i][width] = if row_negated[i] { -b } else { b };
    }

    let original = if S::EXACT { Vec::new() } else { rows.clone() };
    let mut tab = Tableau {
        columns,
        rows,
        basis: initial.clone(),
        costs: Vec::new(),
        initial,
        row_negated,
        iterations: 0,
        min_pivot: f64::INFINITY,
        log: options.dump_tableau.then(String::new),
        original,
        phase_cost: Vec::new(),
        since_refactor: 0,
    };

    // Phase 1: minimise the sum of artificials.
    let is_artificial: Vec<bool> = tab.columns.iter().map(|c| matches!(c, Column::Artificial { .. })).collect();
    if is_artificial.iter().any(|&a| a) {
        let phase1: Vec<S> = is_artificial.iter().map(|&a| if a { S::one() } else { S::zero() }).collect();
        tab.reset_costs(&phase1);
        tab.dump("phase 1 start");
        tab.optimise(&|_| true, options.max_iterations)?;
        let infeasibility = -tab.costs[width].clone();
        let scale = 1.0 + problem.rhs.iter().map(|b| b.to_f64().abs()).fold(0.0, f64::max);
        if infeasibility.sign_tol(1e-9 * scale) == Ordering::Greater {
            tab.dump("infeasible");
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                value: None,
                point: Vec::new(),
                duals: Vec::new(),
                basis: tab.basis.iter().map(|&j| tab.columns[j]).collect(),
                iterations: tab.iterations,
                residual: None,
                tableau_log: tab.log,
            });
        }
        // Drive basic artificials out where a structural pivot exists.
        for r in 0..m {
            if !is_artificial[tab.basis[r]] {
                continue;
            }
            if let Some(e) = (0..width).find(|&j| !is_artificial[j] && tab.rows[r][j].sign_tol(PIVOT_TOL) != Ordering::Equal) {
                tab.pivot(r, e);
            }
        }
    }

    tab.reset_costs(&cost);
    tab.dump("phase 2 start");
    let bounded = tab.optimise(&|j| !is_artificial[j], options.max_iterations)?;
    tab.dump("final");
    let basis_cols: Vec<Column> = tab.basis.iter().map(|&j| tab.columns[j]).collect();
    if !bounded {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            value: None,
            point: Vec::new(),
            duals: Vec::new(),
            basis: basis_cols,
            iterations: tab.iterations,
            residual: None,
            tableau_log: tab.log,
        });
    }

    let mut point = vec![S::zero(); n];
    for (i, &j) in tab.basis.iter().enumerate() {
        if let Column::Structural { var, negated } = tab.columns[j] {
            let v = tab.rows[i][width].clone();
            point[var] = if negated { point[var].clone() - &v } else { point[var].clone() + &v };
        }
    }
    let mut duals = Vec::with_capacity(m);
    for i in 0..m {
        let col = tab.initial[i];
        let mut y = S::zero();
        for (k, row) in tab.rows.iter().enumerate() {
            let cb = &cost[tab.basis[k]];
            if !cb.is_zero() && !row[col].is_zero() {
                y = y + &(cb.clone() * &row[col]);
            }
        }
        if tab.row_negated[i] {
            y = -y;
        }
        duals.push(minimise_sign.clone() * &y);
    }
    let value = problem.objective_value(&point);
    let residual = (!S::EXACT).then(|| float_residual(problem, &point, &duals, &value));
    Ok(LpSolution {
        status: LpStatus::Optimal,
        value: Some(value),
        point,
        duals,
        basis: basis_cols,
        iterations: tab.iterations,
        residual,
        tableau_log: tab.log,
    })
}

fn float_residual<S: Scalar>(problem: &LpProblem<S>, x: &[S], y: &[S], value: &S) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..problem.num_rows() {
        let act = problem.activity(i, x).to_f64();
        let b = problem.rhs[i].to_f64();
        let viol = match problem.senses[i] {
            Sense::Le => (act - b).max(0.0),
            Sense::Ge => (b - act).max(0.0),
            Sense::Eq => (act - b).abs(),
        };
        worst = worst.max(viol);
    }
    for (v, bound) in x.iter().zip(&problem.bounds) {
        let v = v.to_f64();
        let viol = match bound {
            VarBound::NonNegative => (-v).max(0.0),
            VarBound::NonPositive => v.max(0.0),
            VarBound::Free => 0.0,
        };
        worst = worst.max(viol);
    }
    let dual_value: f64 = y.iter().zip(&problem.rhs).map(|(a, b)| a.to_f64() * b.to_f64()).sum();
    worst.max((dual_value - value.to_f64()).abs())
}

/// Checks LP weak-duality conditions for row multipliers `y`: sign
/// conditions per row sense and the reduced-cost conditions per variable
/// bound. Returns the worst violation (zero for exact certificates).
pub fn dual_violation<S: Scalar>(problem: &LpProblem<S>, y: &[S], tol: f64) -> Option<String> {
    let min = problem.direction == Direction::Minimize;
    for (i, (yi, sense)) in y.iter().zip(&problem.senses).enumerate() {
        let s = yi.sign_tol(tol);
        let ok = match (sense, min) {
            (Sense::Eq, _) => true,
            (Sense::Le, true) | (Sense::Ge, false) => s != Ordering::Greater,
            (Sense::Ge, true) | (Sense::Le, false) => s != Ordering::Less,
        };
        if !ok {
            return Some(format!("row {i} multiplier has the wrong sign: {yi}"));
        }
    }
    for j in 0..problem.num_vars() {
        let mut reduced = problem.objective[j].clone();
        for (i, yi) in y.iter().enumerate() {
            reduced.sub_mul_assign(yi, &problem.rows[i][j]);
        }
        let s = reduced.sign_tol(tol);
        let ok = match (problem.bounds[j], min) {
            (VarBound::Free, _) => s == Ordering::Equal,
            (VarBound::NonNegative, true) | (VarBound::NonPositive, false) => s != Ordering::Less,
            (VarBound::NonPositive, true) | (VarBound::NonNegative, false) => s != Ordering::Greater,
        };
        if !ok {
            return Some(format!("variable {j} reduced cost {reduced} violates dual feasibility"));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ExactReal;

    fn q(p: i64, d: i64) -> ExactReal {
        ExactReal::from_ratio(p, d)
    }

    #[test]
    fn box_maximum() {
        let mut lp = LpProblem::new(Direction::Maximize, vec![1.0, 1.0], vec![VarBound::NonNegative; 2]);
        lp.add_row(vec![1.0, 0.0], Sense::Le, 1.0);
        lp.add_row(vec![0.0, 1.0], Sense::Le, 1.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.value.unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(sol.point, vec![1.0, 1.0]);
        assert!(dual_violation(&lp, &sol.duals, 1e-9).is_none());
    }

    #[test]
    fn detects_infeasibility() {
        let mut lp = LpProblem::new(Direction::Maximize, vec![q(1, 1)], vec![VarBound::NonNegative]);
        lp.add_row(vec![q(1, 1)], Sense::Le, q(-1, 1));
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn single_pivot_is_exact() {
        let mut lp = LpProblem::new(Direction::Maximize, vec![q(1, 3)], vec![VarBound::NonNegative]);
        lp.add_row(vec![q(1, 1)], Sense::Le, q(2, 7));
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.value, Some(q(2, 21)));
        assert_eq!(sol.duals, vec![q(1, 3)]);
    }

    #[test]
    fn detects_unboundedness() {
        let mut lp = LpProblem::new(Direction::Maximize, vec![1.0, 0.0], vec![VarBound::NonNegative; 2]);
        lp.add_row(vec![-1.0, 1.0], Sense::Le, 1.0);
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn free_and_nonpositive_variables() {
        // min x - y  s.t. x + y = 1, x - y >= -3, x free, y <= 0 ... y = 1 - x <= 0 ⇒ x >= 1
        let mut lp = LpProblem::new(
            Direction::Minimize,
            vec![q(1, 1), q(-1, 1)],
            vec![VarBound::Free, VarBound::NonPositive],
        );
        lp.add_row(vec![q(1, 1), q(1, 1)], Sense::Eq, q(1, 1));
        lp.add_row(vec![q(1, 1), q(-1, 1)], Sense::Ge, q(-3, 1));
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        // x - y = 2x - 1 minimised at x = 1
        assert_eq!(sol.value, Some(q(1, 1)));
        let yb = sol.duals.iter().zip(&lp.rhs).fold(q(0, 1), |a, (y, b)| a + &(y.clone() * b));
        assert_eq!(yb, q(1, 1));
        assert!(dual_violation(&lp, &sol.duals, 0.0).is_none());
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Beale's classic cycling example; Bland's rule must terminate.
        let mut lp = LpProblem::new(
            Direction::Minimize,
            vec![q(-3, 4), q(150, 1), q(-1, 50), q(6, 1)],
            vec![VarBound::NonNegative; 4],
        );
        lp.add_row(vec![q(1, 4), q(-60, 1), q(-1, 25), q(9, 1)], Sense::Le, q(0, 1));
        lp.add_row(vec![q(1, 2), q(-90, 1), q(-1, 50), q(3, 1)], Sense::Le, q(0, 1));
        lp.add_row(vec![q(0, 1), q(0, 1), q(1, 1), q(0, 1)], Sense::Le, q(1, 1));
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.value, Some(q(-1, 20)));
    }

    #[test]
    fn tableau_dump_is_plain_text() {
        let mut lp = LpProblem::new(Direction::Maximize, vec![q(1, 1)], vec![VarBound::NonNegative]);
        lp.add_row(vec![q(2, 1)], Sense::Le, q(1, 1));
        let sol = solve_with(&lp, &SolveOptions { dump_tableau: true, ..Default::default() }).unwrap();
        let log = sol.tableau_log.unwrap();
        assert!(log.contains("== final"));
        assert!(log.contains("1/2"));
    }

    #[test]
    fn float_refactorisation_tracks_exact_optimum() {
        // Dense 40 x 12 problem, long enough to pass several rebuilds.
        let mut state = 7u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as i64 % 19 - 9
        };
        let n = 12;
        let c: Vec<i64> = (0..n).map(|_| next().abs() + 1).collect();
        let rows: Vec<(Vec<i64>, i64)> = (0..40).map(|_| ((0..n).map(|_| next()).collect(), next().abs() + 5)).collect();
        let mut exact = LpProblem::new(Direction::Maximize, c.iter().map(|&v| q(v, 1)).collect(), vec![VarBound::NonNegative; n]);
        let mut float = LpProblem::new(Direction::Maximize, c.iter().map(|&v| v as f64).collect(), vec![VarBound::NonNegative; n]);
        for (a, b) in &rows {
            exact.add_row(a.iter().map(|&v| q(v, 1)).collect(), Sense::Le, q(*b, 1));
            float.add_row(a.iter().map(|&v| v as f64).collect(), Sense::Le, *b as f64);
        }
        exact.add_row(vec![q(1, 1); n], Sense::Le, q(50, 1));
        float.add_row(vec![1.0; n], Sense::Le, 50.0);
        let e = solve(&exact).unwrap();
        let f = solve(&float).unwrap();
        assert_eq!(e.status, LpStatus::Optimal);
        assert_eq!(f.status, LpStatus::Optimal);
        assert!((e.value.unwrap().to_f64() - f.value.unwrap()).abs() < 1e-9);
        assert!(f.residual.unwrap() < 1e-9);
    }

    #[test]
    fn rejects_ragged_rows() {
        let mut lp = LpProblem::new(Direction::Minimize, vec![1.0, 1.0], vec![VarBound::NonNegative; 2]);
        lp.add_row(vec![1.0], Sense::Le, 1.0);
        assert!(matches!(solve(&lp), Err(LpError::DimensionMismatch { .. })));
    }
}
