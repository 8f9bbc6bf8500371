//! Bounded-variable primal simplex for `max c·x  s.t.  Ax <= b,  l <= x <= u`.
//!
//! Revised method with an explicit dense basis inverse and sparse columns,
//! Dantzig pricing, and Bland's rule once a run of degenerate pivots gets
//! long. Phase 1 minimises the sum of bound violations of the basic
//! variables, so a solve can start from any basis: the slack basis, or the
//! basis of a previous solve after rows were appended or bounds tightened.

use std::time::Instant;

use crate::scalar::Scalar;

/// Pivots between refactorizations of the basis inverse (inexact scalars only).
const REFACTOR_INTERVAL: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct LpRow<T> {
    pub coefficients: Vec<(usize, T)>,
    pub rhs: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<T> {
    var_count: usize,
    objective: Vec<(usize, T)>,
    rows: Vec<LpRow<T>>,
    lower: Vec<T>,
    upper: Vec<T>,
}

impl<T: Scalar> LinearProgram<T> {
    /// Empty maximisation problem with every variable in `[0, 1]`.
    pub fn new(var_count: usize) -> Self {
        LinearProgram {
            var_count,
            objective: Vec::new(),
            rows: Vec::new(),
            lower: vec![T::zero(); var_count],
            upper: vec![T::one(); var_count],
        }
    }

    pub fn with_objective(mut self, objective: Vec<(usize, T)>) -> Self {
        self.objective = objective;
        self
    }

    pub fn add_row(&mut self, coefficients: Vec<(usize, T)>, rhs: T) {
        debug_assert!(coefficients.iter().all(|(j, _)| *j < self.var_count));
        self.rows.push(LpRow { coefficients, rhs });
    }

    pub fn set_bounds(&mut self, var: usize, lower: T, upper: T) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[LpRow<T>] {
        &self.rows
    }

    pub fn objective(&self) -> &[(usize, T)] {
        &self.objective
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    pub fn objective_value(&self, x: &[T]) -> T {
        self.objective.iter().fold(T::zero(), |acc, (j, c)| acc + c.clone() * x[*j].clone())
    }

    /// Largest row or bound violation of `x`.
    pub fn max_violation(&self, x: &[T]) -> T {
        let mut worst = T::zero();
        for row in &self.rows {
            let lhs =
                row.coefficients.iter().fold(T::zero(), |a, (j, c)| a + c.clone() * x[*j].clone());
            worst = T::max_of(worst, lhs - row.rhs.clone());
        }
        for ((l, u), v) in self.lower.iter().zip(&self.upper).zip(x) {
            worst = T::max_of(worst, l.clone() - v.clone());
            worst = T::max_of(worst, v.clone() - u.clone());
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    IterationLimit,
    TimeLimit,
    /// Not reachable with bounded structural variables; reported as an
    /// internal error by callers.
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
}

/// Status of every structural variable followed by every row slack.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    pub structural: Vec<VarStatus>,
    pub slack: Vec<VarStatus>,
}

#[derive(Debug, Clone)]
pub struct LpOutcome<T> {
    pub status: LpStatus,
    pub value: T,
    pub primal: Vec<T>,
    pub iterations: usize,
    pub basis: Option<Basis>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolveLimits {
    /// Overrides the default pivot limit of `50 * (rows + vars)`.
    pub max_iterations: Option<usize>,
    pub deadline: Option<Instant>,
}

pub fn solve_lp<T: Scalar>(lp: &LinearProgram<T>) -> LpOutcome<T> {
    solve_lp_from(lp, None, SolveLimits::default())
}

/// Solves starting from `warm` when given. Rows appended after `warm` was
/// taken start with their slack basic; an unusable basis falls back to the
/// slack basis.
pub fn solve_lp_from<T: Scalar>(
    lp: &LinearProgram<T>,
    warm: Option<&Basis>,
    limits: SolveLimits,
) -> LpOutcome<T> {
    for j in 0..lp.var_count {
        if lp.lower[j] > lp.upper[j] {
            return infeasible(lp, 0);
        }
    }
    let mut simplex = Simplex::new(lp);
    if !warm.is_some_and(|b| simplex.load_basis(b)) {
        simplex.slack_basis();
    }
    simplex.run(limits)
}

fn infeasible<T: Scalar>(lp: &LinearProgram<T>, iterations: usize) -> LpOutcome<T> {
    LpOutcome {
        status: LpStatus::Infeasible,
        value: T::zero(),
        primal: vec![T::zero(); lp.var_count],
        iterations,
        basis: None,
    }
}

struct Simplex<'a, T> {
    lp: &'a LinearProgram<T>,
    m: usize,
    nv: usize,
    /// Structural columns, sparse by row.
    columns: Vec<Vec<(usize, T)>>,
    cost: Vec<T>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    status: Vec<VarStatus>,
    x: Vec<T>,
    /// Row-major `m x m` inverse of the basis matrix.
    binv: Vec<T>,
}

impl<'a, T: Scalar> Simplex<'a, T> {
    fn new(lp: &'a LinearProgram<T>) -> Self {
        let m = lp.rows.len();
        let nv = lp.var_count;
        let mut columns = vec![Vec::new(); nv];
        for (i, row) in lp.rows.iter().enumerate() {
            for (j, a) in &row.coefficients {
                if !a.is_zero() {
                    columns[*j].push((i, a.clone()));
                }
            }
        }
        let mut cost = vec![T::zero(); nv + m];
        for (j, c) in &lp.objective {
            cost[*j] = cost[*j].clone() + c.clone();
        }
        Simplex {
            lp,
            m,
            nv,
            columns,
            cost,
            rhs: lp.rows.iter().map(|r| r.rhs.clone()).collect(),
            basis: Vec::new(),
            status: Vec::new(),
            x: vec![T::zero(); nv + m],
            binv: Vec::new(),
        }
    }

    fn lower(&self, j: usize) -> T {
        if j < self.nv {
            self.lp.lower[j].clone()
        } else {
            T::zero()
        }
    }

    fn upper(&self, j: usize) -> Option<T> {
        (j < self.nv).then(|| self.lp.upper[j].clone())
    }

    fn slack_basis(&mut self) {
        self.status = vec![VarStatus::AtLower; self.nv];
        self.status.extend(std::iter::repeat_n(VarStatus::Basic, self.m));
        self.basis = (self.nv..self.nv + self.m).collect();
        self.place_nonbasic();
        let ok = self.refactor();
        debug_assert!(ok, "slack basis is the identity");
    }

    fn load_basis(&mut self, warm: &Basis) -> bool {
        if warm.structural.len() != self.nv || warm.slack.len() > self.m {
            return false;
        }
        let mut status = warm.structural.clone();
        status.extend(warm.slack.iter().copied());
        status.extend(std::iter::repeat_n(VarStatus::Basic, self.m - warm.slack.len()));
        for (j, s) in status.iter_mut().enumerate() {
            if *s == VarStatus::AtUpper && self.upper(j).is_none() {
                *s = VarStatus::AtLower;
            }
        }
        let basis: Vec<usize> = (0..self.nv + self.m).filter(|&j| status[j] == VarStatus::Basic).collect();
        if basis.len() != self.m {
            return false;
        }
        self.status = status;
        self.basis = basis;
        self.place_nonbasic();
        self.refactor()
    }

    fn place_nonbasic(&mut self) {
        for j in 0..self.nv + self.m {
            self.x[j] = match self.status[j] {
                VarStatus::AtLower => self.lower(j),
                VarStatus::AtUpper => self.upper(j).expect("finite upper bound"),
                VarStatus::Basic => T::zero(),
            };
        }
    }

    /// Column `j` of `[A | I]` as sparse entries.
    fn column(&self, j: usize) -> ColumnRef<'_, T> {
        if j < self.nv {
            ColumnRef::Sparse(&self.columns[j])
        } else {
            ColumnRef::Unit(j - self.nv)
        }
    }

    /// Rebuilds the basis inverse by Gauss-Jordan elimination and recomputes
    /// the basic values. Returns false for a singular basis.
    fn refactor(&mut self) -> bool {
        let m = self.m;
        // Augmented [B | I], reduced to [I | B^-1].
        let width = 2 * m;
        let mut work = vec![T::zero(); m * width];
        for (p, &j) in self.basis.iter().enumerate() {
            match self.column(j) {
                ColumnRef::Sparse(col) => {
                    for (i, a) in col {
                        work[i * width + p] = a.clone();
                    }
                }
                ColumnRef::Unit(i) => work[i * width + p] = T::one(),
            }
        }
        for i in 0..m {
            work[i * width + m + i] = T::one();
        }
        let mut row_of_pos = vec![0usize; m];
        let mut used = vec![false; m];
        for p in 0..m {
            let mut best: Option<usize> = None;
            for i in 0..m {
                if used[i] || work[i * width + p].is_zero() {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some(b) => work[i * width + p].abs() > work[b * width + p].abs(),
                };
                if better {
                    best = Some(i);
                }
            }
            let Some(r) = best else {
                return false;
            };
            if work[r * width + p].abs() <= T::pivot_tol() {
                return false;
            }
            used[r] = true;
            row_of_pos[p] = r;
            let pivot = work[r * width + p].clone();
            for c in 0..width {
                if !work[r * width + c].is_zero() {
                    work[r * width + c] = work[r * width + c].clone() / pivot.clone();
                }
            }
            let pivot_row: Vec<(usize, T)> = (0..width)
                .filter(|&c| !work[r * width + c].is_zero())
                .map(|c| (c, work[r * width + c].clone()))
                .collect();
            for i in 0..m {
                if i == r {
                    continue;
                }
                let f = work[i * width + p].clone();
                if f.is_zero() {
                    continue;
                }
                for (c, v) in &pivot_row {
                    work[i * width + c] = work[i * width + c].clone() - f.clone() * v.clone();
                }
            }
        }
        let mut binv = vec![T::zero(); m * m];
        for p in 0..m {
            let r = row_of_pos[p];
            binv[p * m..(p + 1) * m].clone_from_slice(&work[r * width + m..r * width + width]);
        }
        self.binv = binv;
        self.recompute_basic_values();
        true
    }

    fn recompute_basic_values(&mut self) {
        let m = self.m;
        // residual = b - N x_N
        let mut residual = self.rhs.clone();
        for j in 0..self.nv + self.m {
            if self.status[j] == VarStatus::Basic || self.x[j].is_zero() {
                continue;
            }
            let xj = self.x[j].clone();
            match self.column(j) {
                ColumnRef::Sparse(col) => {
                    for (i, a) in col {
                        residual[*i] = residual[*i].clone() - a.clone() * xj.clone();
                    }
                }
                ColumnRef::Unit(i) => residual[i] = residual[i].clone() - xj,
            }
        }
        for p in 0..m {
            let row = &self.binv[p * m..(p + 1) * m];
            let v = row
                .iter()
                .zip(&residual)
                .filter(|(b, r)| !b.is_zero() && !r.is_zero())
                .fold(T::zero(), |acc, (b, r)| acc + b.clone() * r.clone());
            self.x[self.basis[p]] = v;
        }
    }

    /// Phase-1 gradient of basic variables, or `None` when all are feasible.
    fn infeasibility_gradient(&self) -> Option<Vec<T>> {
        let tol = T::feasibility_tol();
        let mut any = false;
        let g = self
            .basis
            .iter()
            .map(|&j| {
                let x = &self.x[j];
                if *x < self.lower(j) - tol.clone() {
                    any = true;
                    T::one()
                } else if self.upper(j).is_some_and(|u| *x > u + tol.clone()) {
                    any = true;
                    -T::one()
                } else {
                    T::zero()
                }
            })
            .collect();
        any.then_some(g)
    }

    fn run(&mut self, limits: SolveLimits) -> LpOutcome<T> {
        let m = self.m;
        let total = self.nv + m;
        let max_iterations = limits.max_iterations.unwrap_or(50 * (m + self.nv).max(1));
        let bland_after = 5 * (m + self.nv).max(1);
        let mut degenerate_run = 0usize;
        let mut bland = false;
        let mut iterations = 0usize;
        let mut since_refactor = 0usize;

        loop {
            if iterations >= max_iterations {
                return self.outcome(LpStatus::IterationLimit, iterations);
            }
            if iterations.is_multiple_of(64) && limits.deadline.is_some_and(|d| Instant::now() >= d) {
                return self.outcome(LpStatus::TimeLimit, iterations);
            }
            let phase_one = self.infeasibility_gradient();
            let basic_cost: Vec<T> = match &phase_one {
                Some(g) => g.clone(),
                None => self.basis.iter().map(|&j| self.cost[j].clone()).collect(),
            };

            // y = c_B^T B^-1
            let mut y = vec![T::zero(); m];
            for (p, cb) in basic_cost.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                for (yi, b) in y.iter_mut().zip(&self.binv[p * m..(p + 1) * m]) {
                    if !b.is_zero() {
                        *yi = yi.clone() + cb.clone() * b.clone();
                    }
                }
            }

            // Pricing.
            let opt_tol = T::optimality_tol();
            let mut entering: Option<(usize, T)> = None;
            for j in 0..total {
                let state = self.status[j];
                if state == VarStatus::Basic {
                    continue;
                }
                if self.upper(j).is_some_and(|u| u <= self.lower(j)) {
                    continue;
                }
                let cj = if phase_one.is_some() { T::zero() } else { self.cost[j].clone() };
                let d = match self.column(j) {
                    ColumnRef::Sparse(col) => col
                        .iter()
                        .fold(cj, |acc, (i, a)| acc - y[*i].clone() * a.clone()),
                    ColumnRef::Unit(i) => cj - y[i].clone(),
                };
                let eligible = match state {
                    VarStatus::AtLower => d > opt_tol,
                    VarStatus::AtUpper => d < -opt_tol.clone(),
                    VarStatus::Basic => false,
                };
                if !eligible {
                    continue;
                }
                if bland {
                    entering = Some((j, d));
                    break;
                }
                if entering.as_ref().is_none_or(|(_, best)| d.abs() > best.abs()) {
                    entering = Some((j, d));
                }
            }

            let Some((enter, _)) = entering else {
                if phase_one.is_some() {
                    return self.outcome(LpStatus::Infeasible, iterations);
                }
                return self.outcome(LpStatus::Optimal, iterations);
            };

            // alpha = B^-1 a_enter
            let mut alpha = vec![T::zero(); m];
            match self.column(enter) {
                ColumnRef::Sparse(col) => {
                    for (i, a) in col {
                        for (p, al) in alpha.iter_mut().enumerate() {
                            let b = &self.binv[p * m + i];
                            if !b.is_zero() {
                                *al = al.clone() + b.clone() * a.clone();
                            }
                        }
                    }
                }
                ColumnRef::Unit(i) => {
                    for (p, al) in alpha.iter_mut().enumerate() {
                        *al = self.binv[p * m + i].clone();
                    }
                }
            }

            let increasing = self.status[enter] == VarStatus::AtLower;
            let feas_tol = T::feasibility_tol();
            let piv_tol = T::pivot_tol();
            // (step, basis position or None for a bound flip, leaves at upper)
            let mut best: Option<(T, Option<usize>, bool)> =
                self.upper(enter).map(|u| (u - self.lower(enter), None, false));
            for p in 0..m {
                if alpha[p].abs() <= piv_tol {
                    continue;
                }
                // Rate of change of basic variable p per unit step.
                let rate = if increasing { -alpha[p].clone() } else { alpha[p].clone() };
                let j = self.basis[p];
                let xj = self.x[j].clone();
                let lo = self.lower(j);
                let up = self.upper(j);
                let below = phase_one.is_some() && xj < lo.clone() - feas_tol.clone();
                let above = phase_one.is_some()
                    && up.as_ref().is_some_and(|u| xj > u.clone() + feas_tol.clone());
                let limit = if below {
                    (rate > T::zero()).then(|| ((lo - xj) / rate.clone(), false))
                } else if above {
                    (rate < T::zero()).then(|| ((xj - up.unwrap()) / -rate.clone(), true))
                } else if rate < T::zero() {
                    Some(((xj - lo) / -rate.clone(), false))
                } else {
                    up.map(|u| ((u - xj) / rate.clone(), true))
                };
                let Some((step, at_upper)) = limit else {
                    continue;
                };
                let step = T::max_of(step, T::zero());
                let replace = match &best {
                    None => true,
                    Some((s, pos, _)) => {
                        if step < *s {
                            true
                        } else if step > *s {
                            false
                        } else if bland {
                            pos.is_some_and(|q| j < self.basis[q])
                        } else {
                            pos.is_some_and(|q| alpha[p].abs() > alpha[q].abs())
                        }
                    }
                };
                if replace {
                    best = Some((step, Some(p), at_upper));
                }
            }
            let Some((step, leaving, leaves_at_upper)) = best else {
                return self.outcome(LpStatus::Unbounded, iterations);
            };

            iterations += 1;
            if step <= feas_tol {
                degenerate_run += 1;
                if degenerate_run > bland_after {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }

            let signed_step = if increasing { step.clone() } else { -step.clone() };
            self.x[enter] = self.x[enter].clone() + signed_step.clone();
            for (p, a) in alpha.iter().enumerate() {
                if !a.is_zero() {
                    let j = self.basis[p];
                    self.x[j] = self.x[j].clone() - a.clone() * signed_step.clone();
                }
            }

            match leaving {
                None => {
                    self.status[enter] = if increasing { VarStatus::AtUpper } else { VarStatus::AtLower };
                    self.x[enter] = if increasing {
                        self.upper(enter).expect("flip needs an upper bound")
                    } else {
                        self.lower(enter)
                    };
                }
                Some(r) => {
                    let out = self.basis[r];
                    if leaves_at_upper {
                        self.status[out] = VarStatus::AtUpper;
                        self.x[out] = self.upper(out).expect("upper bound");
                    } else {
                        self.status[out] = VarStatus::AtLower;
                        self.x[out] = self.lower(out);
                    }
                    self.status[enter] = VarStatus::Basic;
                    self.basis[r] = enter;
                    self.pivot_inverse(r, &alpha);
                    since_refactor += 1;
                    if !T::EXACT && since_refactor >= REFACTOR_INTERVAL {
                        since_refactor = 0;
                        if !self.refactor() {
                            // Numerical breakdown: restart from the slack basis.
                            self.slack_basis();
                        }
                    }
                }
            }
        }
    }

    fn pivot_inverse(&mut self, r: usize, alpha: &[T]) {
        let m = self.m;
        let pivot = alpha[r].clone();
        for c in 0..m {
            if !self.binv[r * m + c].is_zero() {
                self.binv[r * m + c] = self.binv[r * m + c].clone() / pivot.clone();
            }
        }
        let pivot_row: Vec<(usize, T)> = (0..m)
            .filter(|&c| !self.binv[r * m + c].is_zero())
            .map(|c| (c, self.binv[r * m + c].clone()))
            .collect();
        for (p, a) in alpha.iter().enumerate() {
            if p == r || a.is_zero() {
                continue;
            }
            let f = a.clone();
            for (c, v) in &pivot_row {
                self.binv[p * m + c] = self.binv[p * m + c].clone() - f.clone() * v.clone();
            }
        }
    }

    fn outcome(&mut self, status: LpStatus, iterations: usize) -> LpOutcome<T> {
        if status == LpStatus::Optimal && !T::EXACT {
            // Clean accumulated drift in the basic values.
            if self.refactor() {
                for j in 0..self.nv {
                    let lo = self.lower(j);
                    let up = self.upper(j).expect("structural upper bound");
                    if self.x[j] < lo {
                        self.x[j] = lo;
                    } else if self.x[j] > up {
                        self.x[j] = up;
                    }
                }
            }
        }
        let primal: Vec<T> = self.x[..self.nv].to_vec();
        let value = self.lp.objective_value(&primal);
        let basis = Basis {
            structural: self.status[..self.nv].to_vec(),
            slack: self.status[self.nv..].to_vec(),
        };
        LpOutcome { status, value, primal, iterations, basis: Some(basis) }
    }
}

enum ColumnRef<'a, T> {
    Sparse(&'a [(usize, T)]),
    Unit(usize),
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn single_bounded_variable() {
        let mut lp = LinearProgram::<f64>::new(1).with_objective(vec![(0, 1.0)]);
        lp.add_row(vec![(0, 1.0)], 1.0);
        let out = solve_lp(&lp);
        assert_eq!(out.status, LpStatus::Optimal);
        assert_eq!(out.value, 1.0);
    }

    #[test]
    fn fractional_optimum_exact() {
        // max x + y + z, pairwise sums <= 1: optimum 3/2 at (1/2, 1/2, 1/2).
        let mut lp = LinearProgram::<BigRational>::new(3)
            .with_objective((0..3).map(|j| (j, q(1, 1))).collect());
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            lp.add_row(vec![(a, q(1, 1)), (b, q(1, 1))], q(1, 1));
        }
        let out = solve_lp(&lp);
        assert_eq!(out.status, LpStatus::Optimal);
        assert_eq!(out.value, q(3, 2));
        assert!(out.primal.iter().all(|v| *v == q(1, 2)));
    }

    #[test]
    fn bound_flips_and_upper_bounds() {
        // max 3x + 2y, x + y <= 1.5, both in [0, 1]
        let mut lp = LinearProgram::<f64>::new(2).with_objective(vec![(0, 3.0), (1, 2.0)]);
        lp.add_row(vec![(0, 1.0), (1, 1.0)], 1.5);
        let out = solve_lp(&lp);
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.value - 4.0).abs() < 1e-12);
        assert!((out.primal[0] - 1.0).abs() < 1e-12 && (out.primal[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn phase_one_from_infeasible_start() {
        // Fix x to 1 (lower bound), so the slack basis violates x + y <= 1.5 only if y large.
        let mut lp = LinearProgram::<f64>::new(3).with_objective(vec![(1, 1.0), (2, 1.0)]);
        lp.add_row(vec![(0, 1.0), (1, 1.0)], 1.0);
        lp.add_row(vec![(0, 1.0), (2, 1.0)], 1.5);
        lp.set_bounds(0, 1.0, 1.0);
        let out = solve_lp(&lp);
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.value - 0.5).abs() < 1e-12, "{}", out.value);
        assert!(lp.max_violation(&out.primal) <= 1e-9);
    }

    #[test]
    fn detects_infeasibility() {
        let mut lp = LinearProgram::<f64>::new(2);
        lp.add_row(vec![(0, 1.0), (1, 1.0)], 1.0);
        lp.set_bounds(0, 1.0, 1.0);
        lp.set_bounds(1, 1.0, 1.0);
        assert_eq!(solve_lp(&lp).status, LpStatus::Infeasible);
        let mut crossed = LinearProgram::<f64>::new(1);
        crossed.set_bounds(0, 1.0, 0.0);
        assert_eq!(solve_lp(&crossed).status, LpStatus::Infeasible);
    }

    #[test]
    fn warm_start_after_adding_a_row() {
        let mut lp = LinearProgram::<f64>::new(3)
            .with_objective(vec![(0, 1.0), (1, 1.0), (2, 1.0)]);
        lp.add_row(vec![(0, 1.0), (1, 1.0)], 1.0);
        lp.add_row(vec![(1, 1.0), (2, 1.0)], 1.0);
        let first = solve_lp(&lp);
        assert!((first.value - 2.0).abs() < 1e-12);
        lp.add_row(vec![(0, 1.0), (2, 1.0)], 1.0);
        let warm = solve_lp_from(&lp, first.basis.as_ref(), SolveLimits::default());
        let cold = solve_lp(&lp);
        assert_eq!(warm.status, LpStatus::Optimal);
        assert!((warm.value - 1.5).abs() < 1e-9);
        assert!((cold.value - warm.value).abs() < 1e-9);
        assert!(lp.max_violation(&warm.primal) <= 1e-7);
    }

    #[test]
    fn warm_start_after_fixing_a_basic_variable() {
        let mut lp = LinearProgram::<f64>::new(3)
            .with_objective(vec![(0, 1.0), (1, 1.0), (2, 1.0)]);
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            lp.add_row(vec![(a, 1.0), (b, 1.0)], 1.0);
        }
        let root = solve_lp(&lp);
        assert!((root.value - 1.5).abs() < 1e-9);
        lp.set_bounds(0, 0.0, 0.0);
        let down = solve_lp_from(&lp, root.basis.as_ref(), SolveLimits::default());
        assert_eq!(down.status, LpStatus::Optimal);
        assert!((down.value - 1.0).abs() < 1e-9);
        lp.set_bounds(0, 1.0, 1.0);
        let up = solve_lp_from(&lp, root.basis.as_ref(), SolveLimits::default());
        assert!((up.value - 1.0).abs() < 1e-9);
        assert!((up.primal[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_warm_basis_falls_back() {
        let mut lp = LinearProgram::<f64>::new(2).with_objective(vec![(0, 1.0), (1, 1.0)]);
        lp.add_row(vec![(0, 1.0), (1, 1.0)], 1.0);
        let bogus = Basis { structural: vec![VarStatus::Basic; 2], slack: vec![VarStatus::Basic] };
        let out = solve_lp_from(&lp, Some(&bogus), SolveLimits::default());
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_lp() {
        let lp = LinearProgram::<f64>::new(2).with_objective(vec![(0, 2.0), (1, -1.0)]);
        let out = solve_lp(&lp);
        assert_eq!(out.status, LpStatus::Optimal);
        assert_eq!(out.value, 2.0);
        assert_eq!(out.primal, vec![1.0, 0.0]);
    }

    #[test]
    fn iteration_limit_is_reported() {
        let mut lp = LinearProgram::<f64>::new(3)
            .with_objective(vec![(0, 1.0), (1, 1.0), (2, 1.0)]);
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            lp.add_row(vec![(a, 1.0), (b, 1.0)], 1.0);
        }
        let out = solve_lp_from(
            &lp,
            None,
            SolveLimits { max_iterations: Some(1), deadline: None },
        );
        assert_eq!(out.status, LpStatus::IterationLimit);
    }
}
