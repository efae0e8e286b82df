//! Dense revised simplex for small linear programs.
//!
//! Bounded-variable primal simplex in two phases, Dantzig pricing with a
//! permanent switch to Bland's rule on stall so cycling cannot occur. The
//! basis inverse is kept explicitly and refactorized periodically from an LU
//! decomposition. Problem sizes here are a few hundred rows at most.

use crate::error::{Error, Result};
use crate::linalg::{Lu, Mat};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Copy)]
pub struct LpTolerances {
    pub feasibility: f64,
    pub optimality: f64,
}

impl Default for LpTolerances {
    fn default() -> Self {
        LpTolerances {
            feasibility: 1e-9,
            optimality: 1e-9,
        }
    }
}

/// A dense LP: optimize c'x subject to row constraints and variable bounds.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub maximize: bool,
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub senses: Vec<Sense>,
    pub rhs: Vec<f64>,
    /// Per-variable (lower, upper); infinities allowed.
    pub bounds: Vec<(f64, f64)>,
    pub tol: LpTolerances,
}

pub const MAX_VARIABLES: usize = 20_000;
pub const MAX_CONSTRAINTS: usize = 500;

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective in the caller's orientation (meaningful for Optimal only).
    pub objective: f64,
    pub x: Vec<f64>,
    /// Dual value per original row (caller orientation).
    pub duals: Vec<f64>,
    pub iterations: usize,
    pub max_primal_residual: f64,
}

impl LinearProgram {
    fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        let m = self.rows.len();
        if n == 0 {
            return Err(Error::parameter("LP has no variables".to_string()));
        }
        if n > MAX_VARIABLES || m > MAX_CONSTRAINTS {
            return Err(Error::resource(format!(
                "LP size {n} variables x {m} constraints exceeds limits \
                 ({MAX_VARIABLES} x {MAX_CONSTRAINTS})"
            )));
        }
        if self.senses.len() != m || self.rhs.len() != m {
            return Err(Error::parameter(
                "rows, senses, and rhs must have equal lengths".to_string(),
            ));
        }
        if self.bounds.len() != n {
            return Err(Error::parameter(
                "bounds must cover every variable".to_string(),
            ));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::parameter(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::parameter(format!("row {i} has non-finite entries")));
            }
        }
        if self.objective.iter().any(|v| !v.is_finite())
            || self.rhs.iter().any(|v| !v.is_finite())
        {
            return Err(Error::parameter(
                "objective and rhs must be finite".to_string(),
            ));
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo > hi || lo.is_nan() || hi.is_nan() {
                return Err(Error::parameter(format!(
                    "variable {j} has empty bound interval [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }
}

/// Solves the LP, returning an optimal basic solution with certified
/// residuals, or the Infeasible/Unbounded status.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let mut solver = Simplex::new(lp);
    solver.solve(None)
}

/// Solves with a caller-supplied starting basis (structural variable
/// indices, one per row). The basis must be primal feasible with the
/// remaining variables resting at bounds; falls back to phase 1 otherwise.
pub fn solve_lp_with_basis(lp: &LinearProgram, basis: &[usize]) -> Result<LpSolution> {
    lp.validate()?;
    if basis.len() != lp.rows.len() {
        return Err(Error::parameter(
            "starting basis must supply one variable per row".to_string(),
        ));
    }
    let mut solver = Simplex::new(lp);
    solver.solve(Some(basis))
}

#[derive(Clone, Copy, PartialEq, Debug)]
enum VarState {
    Basic(usize), // position in the basis
    AtLower,
    AtUpper,
    FreeAtZero,
}

struct Simplex {
    m: usize,           // rows
    n_total: usize,     // structural + slack + artificial
    n_struct: usize,    // caller variables
    n_slack: usize,     // slack variables
    cols: Vec<Vec<f64>>, // column-major constraint matrix
    b: Vec<f64>,
    cost: Vec<f64>,      // phase-2 cost (min orientation)
    lower: Vec<f64>,
    upper: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    binv: Mat,
    xb: Vec<f64>,       // basic variable values
    maximize: bool,
    tol: LpTolerances,
    iterations: usize,
    bland: bool,
    stall: usize,
    last_objective: f64,
    /// Set after a singular-basis rescue: Bland pricing and tight refactor.
    rescue_mode: bool,
}

const REFACTOR_EVERY: usize = 16;
const REFACTOR_RESCUE: usize = 4;
const STALL_SWITCH: usize = 60;

impl Simplex {
    fn new(lp: &LinearProgram) -> Simplex {
        let m = lp.rows.len();
        let n = lp.objective.len();
        let n_slack = lp
            .senses
            .iter()
            .filter(|s| !matches!(s, Sense::Eq))
            .count();
        let n_total = n + n_slack + m; // artificials appended last
        let mut cols: Vec<Vec<f64>> = vec![vec![0.0; m]; n_total];
        for (i, row) in lp.rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                cols[j][i] = v;
            }
        }
        let mut lower = Vec::with_capacity(n_total);
        let mut upper = Vec::with_capacity(n_total);
        for &(lo, hi) in &lp.bounds {
            lower.push(lo);
            upper.push(hi);
        }
        // slacks: A x + s = b with s >= 0 for <=, s <= 0 for >=
        let mut slack_idx = n;
        for (i, sense) in lp.senses.iter().enumerate() {
            match sense {
                Sense::Le => {
                    cols[slack_idx][i] = 1.0;
                    lower.push(0.0);
                    upper.push(f64::INFINITY);
                    slack_idx += 1;
                }
                Sense::Ge => {
                    cols[slack_idx][i] = 1.0;
                    lower.push(f64::NEG_INFINITY);
                    upper.push(0.0);
                    slack_idx += 1;
                }
                Sense::Eq => {}
            }
        }
        // artificials get bounds [0, inf) for phase 1, clamped to 0 afterwards
        for _ in 0..m {
            lower.push(0.0);
            upper.push(f64::INFINITY);
        }
        let sign = if lp.maximize { -1.0 } else { 1.0 };
        let mut cost = vec![0.0; n_total];
        for (j, &c) in lp.objective.iter().enumerate() {
            cost[j] = sign * c;
        }
        Simplex {
            m,
            n_total,
            n_struct: n,
            n_slack,
            cols,
            b: lp.rhs.clone(),
            cost,
            lower,
            upper,
            state: vec![VarState::AtLower; n_total],
            basis: Vec::new(),
            binv: Mat::identity(m),
            xb: vec![0.0; m],
            maximize: lp.maximize,
            tol: lp.tol,
            iterations: 0,
            bland: false,
            stall: 0,
            last_objective: f64::INFINITY,
            rescue_mode: false,
        }
    }

    /// Resting value of a nonbasic variable.
    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.state[j] {
            VarState::AtLower => self.lower[j],
            VarState::AtUpper => self.upper[j],
            VarState::FreeAtZero => 0.0,
            VarState::Basic(_) => unreachable!(),
        }
    }

    /// Rests doubly-bounded variables at the bound the phase-2 objective
    /// prefers, so negligible-weight variables start optimal.
    fn initial_states(&mut self) {
        for j in 0..(self.n_struct + self.n_slack) {
            let lo = self.lower[j];
            let hi = self.upper[j];
            self.state[j] = match (lo.is_finite(), hi.is_finite()) {
                (true, true) => {
                    if self.cost[j] < 0.0 {
                        VarState::AtUpper
                    } else {
                        VarState::AtLower
                    }
                }
                (true, false) => VarState::AtLower,
                (false, true) => VarState::AtUpper,
                (false, false) => VarState::FreeAtZero,
            };
        }
    }

    /// Installs the caller's basis if it is primal feasible; true on success.
    fn try_starting_basis(&mut self, basis: &[usize]) -> bool {
        let mut seen = vec![false; self.n_total];
        for &j in basis {
            if j >= self.n_struct || seen[j] {
                return false;
            }
            seen[j] = true;
        }
        self.basis = basis.to_vec();
        for (pos, &j) in basis.iter().enumerate() {
            self.state[j] = VarState::Basic(pos);
        }
        let feasible = self.refactor().is_ok()
            && self.basis.clone().iter().enumerate().all(|(pos, &j)| {
                let v = self.xb[pos];
                v >= self.lower[j] - self.tol.feasibility
                    && v <= self.upper[j] + self.tol.feasibility
            });
        if !feasible {
            self.basis.clear();
            self.initial_states();
            return false;
        }
        true
    }

    fn solve(&mut self, starting_basis: Option<&[usize]>) -> Result<LpSolution> {
        match self.solve_attempt(starting_basis) {
            Err(Error::Solver(msg)) if msg.contains("refactorization") && !self.rescue_mode => {
                // a drifted inverse let a structurally singular pivot through;
                // restart from scratch under Bland pricing with tight refactor
                self.rescue_mode = true;
                self.bland = true;
                let art0 = self.n_struct + self.n_slack;
                for j in art0..self.n_total {
                    self.upper[j] = f64::INFINITY;
                }
                self.basis.clear();
                self.stall = 0;
                self.last_objective = f64::INFINITY;
                self.solve_attempt(None)
            }
            other => other,
        }
    }

    fn solve_attempt(&mut self, starting_basis: Option<&[usize]>) -> Result<LpSolution> {
        self.initial_states();
        let art0 = self.n_struct + self.n_slack;
        let warm = match starting_basis {
            Some(basis) => self.try_starting_basis(basis),
            None => false,
        };
        if warm {
            // artificials unused: pin them out of the problem
            for j in art0..self.n_total {
                self.upper[j] = 0.0;
                self.state[j] = VarState::AtLower;
            }
        } else {
            // phase 1: artificial basis absorbing the residual
            let mut residual = self.b.clone();
            for j in 0..art0 {
                let v = self.nonbasic_value(j);
                if v != 0.0 {
                    for i in 0..self.m {
                        residual[i] -= self.cols[j][i] * v;
                    }
                }
            }
            self.basis = (0..self.m).map(|i| art0 + i).collect();
            for i in 0..self.m {
                self.cols[art0 + i][i] = if residual[i] >= 0.0 { 1.0 } else { -1.0 };
                self.state[art0 + i] = VarState::Basic(i);
                self.xb[i] = residual[i].abs();
            }
            self.binv = Mat::identity(self.m);
            for i in 0..self.m {
                self.binv[(i, i)] = if residual[i] >= 0.0 { 1.0 } else { -1.0 };
            }

            let mut phase1_cost = vec![0.0; self.n_total];
            for j in art0..self.n_total {
                phase1_cost[j] = 1.0;
            }
            let p1 = self.run_phase(&phase1_cost, true)?;
            if p1 > self.tol.feasibility.max(1e-7) {
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    objective: f64::NAN,
                    x: vec![f64::NAN; self.n_struct],
                    duals: vec![f64::NAN; self.m],
                    iterations: self.iterations,
                    max_primal_residual: p1,
                });
            }
        }
        // clamp artificials so they cannot re-enter or move off zero
        for j in art0..self.n_total {
            self.upper[j] = 0.0;
            if !matches!(self.state[j], VarState::Basic(_)) {
                self.state[j] = VarState::AtLower;
            }
        }
        let cost = self.cost.clone();
        self.bland = false;
        self.stall = 0;
        self.last_objective = f64::INFINITY;
        let obj = self.run_phase(&cost, false)?;
        if !obj.is_finite() {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                objective: if self.maximize {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                },
                x: vec![f64::NAN; self.n_struct],
                duals: vec![f64::NAN; self.m],
                iterations: self.iterations,
                max_primal_residual: f64::NAN,
            });
        }

        let x = self.extract_solution();
        let duals = self.extract_duals(&cost);
        let residual = self.primal_residual(&x);
        if residual > 1e-6 {
            return Err(Error::solver(format!(
                "optimal basis fails feasibility check: residual {residual:.3e} \
                 after {} iterations",
                self.iterations
            )));
        }
        let sign = if self.maximize { -1.0 } else { 1.0 };
        Ok(LpSolution {
            status: LpStatus::Optimal,
            objective: sign * obj,
            x,
            duals: duals.into_iter().map(|y| sign * y).collect(),
            iterations: self.iterations,
            max_primal_residual: residual,
        })
    }

    /// Runs the simplex on the given cost vector. Returns the optimal value,
    /// or +inf to signal unboundedness in phase 2.
    fn run_phase(&mut self, cost: &[f64], phase1: bool) -> Result<f64> {
        let max_iter = 400 * (self.m + self.n_total) + 20_000;
        let mut since_refactor = 0;
        loop {
            self.iterations += 1;
            if self.iterations > max_iter {
                return Err(Error::solver(format!(
                    "simplex stalled: {} iterations without convergence \
                     (m={}, n={}, objective {:.6e}, bland={})",
                    self.iterations,
                    self.m,
                    self.n_total,
                    self.current_objective(cost),
                    self.bland
                )));
            }
            // y = c_B B^{-1}
            let cb: Vec<f64> = self.basis.iter().map(|&j| cost[j]).collect();
            let mut y = vec![0.0; self.m];
            for i in 0..self.m {
                if cb[i] != 0.0 {
                    for k in 0..self.m {
                        y[k] += cb[i] * self.binv[(i, k)];
                    }
                }
            }
            // pricing
            let mut entering: Option<(usize, f64, bool)> = None; // (j, |d|, increase)
            for j in 0..self.n_total {
                if matches!(self.state[j], VarState::Basic(_)) {
                    continue;
                }
                if phase1 == false && j >= self.n_struct + self.n_slack {
                    continue; // artificials stay out in phase 2
                }
                if self.lower[j] == self.upper[j] {
                    continue; // fixed
                }
                let d = cost[j] - dot(&y, &self.cols[j]);
                let (eligible, increase) = match self.state[j] {
                    VarState::AtLower => (d < -self.tol.optimality, true),
                    VarState::AtUpper => (d > self.tol.optimality, false),
                    VarState::FreeAtZero => (d.abs() > self.tol.optimality, d < 0.0),
                    VarState::Basic(_) => unreachable!(),
                };
                if !eligible {
                    continue;
                }
                if self.bland {
                    entering = Some((j, d.abs(), increase));
                    break;
                }
                match entering {
                    Some((_, best, _)) if d.abs() <= best => {}
                    _ => entering = Some((j, d.abs(), increase)),
                }
            }
            let Some((j_in, _, increase)) = entering else {
                return Ok(self.current_objective(cost));
            };

            // direction through the basis: w = B^{-1} A_j
            let aj = &self.cols[j_in];
            let mut w = vec![0.0; self.m];
            for i in 0..self.m {
                let mut s = 0.0;
                for k in 0..self.m {
                    s += self.binv[(i, k)] * aj[k];
                }
                w[i] = s;
            }
            let dir = if increase { 1.0 } else { -1.0 };

            // ratio test: basic vars move by -dir * w per unit of t >= 0
            let mut t_max = self.upper[j_in] - self.lower[j_in]; // bound flip distance
            if !matches!(self.state[j_in], VarState::FreeAtZero) && !t_max.is_finite() {
                t_max = f64::INFINITY;
            }
            let mut leaving: Option<usize> = None; // basis position
            for i in 0..self.m {
                let delta = -dir * w[i];
                if delta.abs() < 1e-9 {
                    continue;
                }
                let bi = self.basis[i];
                let room = if delta > 0.0 {
                    self.upper[bi] - self.xb[i]
                } else {
                    self.lower[bi] - self.xb[i]
                };
                let t = room / delta;
                let t = if t < 0.0 { 0.0 } else { t };
                if t < t_max - 1e-12 {
                    t_max = t;
                    leaving = Some(i);
                } else if (t - t_max).abs() <= 1e-12 && t <= t_max + 1e-12 {
                    let replace = match leaving {
                        None => true,
                        Some(cur) => {
                            if self.bland {
                                // Bland tie-break toward the smallest index
                                bi < self.basis[cur]
                            } else {
                                // stability tie-break toward the larger pivot
                                w[i].abs() > w[cur].abs()
                            }
                        }
                    };
                    if replace {
                        t_max = t.min(t_max);
                        leaving = Some(i);
                    }
                }
            }

            if !t_max.is_finite() {
                if phase1 {
                    return Err(Error::solver(
                        "phase-1 objective unbounded; artificial setup is broken".to_string(),
                    ));
                }
                return Ok(f64::INFINITY);
            }

            let t = t_max.max(0.0);
            // apply the step
            for i in 0..self.m {
                self.xb[i] += -dir * w[i] * t;
            }
            let new_value = match self.state[j_in] {
                VarState::AtLower => self.lower[j_in] + dir * t,
                VarState::AtUpper => self.upper[j_in] + dir * t,
                VarState::FreeAtZero => dir * t,
                VarState::Basic(_) => unreachable!(),
            };

            match leaving {
                None => {
                    // bound flip: entering variable traverses to its other bound
                    self.state[j_in] = if increase {
                        VarState::AtUpper
                    } else {
                        VarState::AtLower
                    };
                }
                Some(pos) => {
                    let j_out = self.basis[pos];
                    let delta = -dir * w[pos];
                    self.state[j_out] = if delta > 0.0 {
                        VarState::AtUpper
                    } else {
                        VarState::AtLower
                    };
                    if !self.upper[j_out].is_finite() && !self.lower[j_out].is_finite() {
                        self.state[j_out] = VarState::FreeAtZero;
                    }
                    self.basis[pos] = j_in;
                    self.state[j_in] = VarState::Basic(pos);
                    self.xb[pos] = new_value;
                    self.update_inverse(pos, &w)?;
                    since_refactor += 1;
                    let interval = if self.rescue_mode {
                        REFACTOR_RESCUE
                    } else {
                        REFACTOR_EVERY
                    };
                    if since_refactor >= interval {
                        self.refactor()?;
                        since_refactor = 0;
                    }
                }
            }

            // stall detection drives the permanent switch to Bland's rule
            if !self.bland {
                let obj = self.current_objective(cost);
                if obj < self.last_objective - 1e-13 {
                    self.last_objective = obj;
                    self.stall = 0;
                } else {
                    self.stall += 1;
                    if self.stall >= STALL_SWITCH {
                        self.bland = true;
                    }
                }
            }
        }
    }

    fn current_objective(&self, cost: &[f64]) -> f64 {
        let mut obj = 0.0;
        for i in 0..self.m {
            obj += cost[self.basis[i]] * self.xb[i];
        }
        for j in 0..self.n_total {
            if !matches!(self.state[j], VarState::Basic(_)) && cost[j] != 0.0 {
                obj += cost[j] * self.nonbasic_value(j);
            }
        }
        obj
    }

    /// Gauss-Jordan update of the explicit inverse after a pivot.
    fn update_inverse(&mut self, pos: usize, w: &[f64]) -> Result<()> {
        let pivot = w[pos];
        if pivot.abs() < 1e-7 {
            // rebuild from scratch; the rank-one update would be unstable
            return self.refactor();
        }
        let inv_pivot = 1.0 / pivot;
        let pivot_row: Vec<f64> = (0..self.m).map(|k| self.binv[(pos, k)] * inv_pivot).collect();
        for i in 0..self.m {
            if i == pos {
                continue;
            }
            let factor = w[i];
            if factor == 0.0 {
                continue;
            }
            for k in 0..self.m {
                self.binv[(i, k)] -= factor * pivot_row[k];
            }
        }
        for k in 0..self.m {
            self.binv[(pos, k)] = pivot_row[k];
        }
        Ok(())
    }

    /// Rebuilds the inverse and basic values from the basis columns.
    fn refactor(&mut self) -> Result<()> {
        let mut bmat = Mat::zeros(self.m, self.m);
        for (pos, &j) in self.basis.iter().enumerate() {
            for i in 0..self.m {
                bmat[(i, pos)] = self.cols[j][i];
            }
        }
        let lu = Lu::factor(&bmat).map_err(|e| {
            if std::env::var("GAUSSLAB_LP_DEBUG").is_ok() {
                let mut sorted = self.basis.clone();
                sorted.sort_unstable();
                let dups = sorted.windows(2).filter(|w| w[0] == w[1]).count();
                eprintln!(
                    "refactor failure: m={} dups={} basis={:?}",
                    self.m, dups, sorted
                );
            }
            Error::solver(format!("basis refactorization failed: {e}"))
        })?;
        let mut inv = Mat::zeros(self.m, self.m);
        let mut e = vec![0.0; self.m];
        for col in 0..self.m {
            e[col] = 1.0;
            let x = lu.solve(&e);
            for i in 0..self.m {
                inv[(i, col)] = x[i];
            }
            e[col] = 0.0;
        }
        self.binv = inv;
        // recompute basic values: x_B = B^{-1}(b - N x_N)
        let mut rhs = self.b.clone();
        for j in 0..self.n_total {
            if matches!(self.state[j], VarState::Basic(_)) {
                continue;
            }
            let v = self.nonbasic_value(j);
            if v != 0.0 {
                for i in 0..self.m {
                    rhs[i] -= self.cols[j][i] * v;
                }
            }
        }
        for i in 0..self.m {
            let mut s = 0.0;
            for k in 0..self.m {
                s += self.binv[(i, k)] * rhs[k];
            }
            self.xb[i] = s;
        }
        Ok(())
    }

    fn extract_solution(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n_struct];
        for j in 0..self.n_struct {
            x[j] = match self.state[j] {
                VarState::Basic(pos) => self.xb[pos],
                _ => self.nonbasic_value(j),
            };
        }
        x
    }

    fn extract_duals(&self, cost: &[f64]) -> Vec<f64> {
        let cb: Vec<f64> = self.basis.iter().map(|&j| cost[j]).collect();
        let mut y = vec![0.0; self.m];
        for i in 0..self.m {
            if cb[i] != 0.0 {
                for k in 0..self.m {
                    y[k] += cb[i] * self.binv[(i, k)];
                }
            }
        }
        y
    }

    fn primal_residual(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.m {
            let mut ax = 0.0;
            for j in 0..self.n_struct {
                ax += self.cols[j][i] * x[j];
            }
            // include slack/artificial contributions
            for j in self.n_struct..self.n_total {
                let v = match self.state[j] {
                    VarState::Basic(pos) => self.xb[pos],
                    _ => self.nonbasic_value(j),
                };
                if v != 0.0 {
                    ax += self.cols[j][i] * v;
                }
            }
            worst = worst.max((ax - self.b[i]).abs() / (1.0 + self.b[i].abs()));
        }
        for j in 0..self.n_struct {
            if x[j] < self.lower[j] - 1e-9 {
                worst = worst.max(self.lower[j] - x[j]);
            }
            if x[j] > self.upper[j] + 1e-9 {
                worst = worst.max(x[j] - self.upper[j]);
            }
        }
        worst
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(
        maximize: bool,
        objective: Vec<f64>,
        rows: Vec<Vec<f64>>,
        senses: Vec<Sense>,
        rhs: Vec<f64>,
        bounds: Vec<(f64, f64)>,
    ) -> LinearProgram {
        LinearProgram {
            maximize,
            objective,
            rows,
            senses,
            rhs,
            bounds,
            tol: LpTolerances::default(),
        }
    }

    #[test]
    fn max_x_with_upper_bound() {
        // max x s.t. x <= 3, x >= 0
        let p = lp(
            true,
            vec![1.0],
            vec![vec![1.0]],
            vec![Sense::Le],
            vec![3.0],
            vec![(0.0, f64::INFINITY)],
        );
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 3.0).abs() < 1e-9);
        assert!((s.x[0] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn l1_distance_to_ones_is_zero() {
        // min |x1 - 1| + |x2 - 1| via splits: min u1+v1+u2+v2
        // s.t. xi + ui - vi = 1, u, v >= 0, xi free
        let inf = f64::INFINITY;
        let p = lp(
            false,
            vec![0.0, 0.0, 1.0, 1.0, 1.0, 1.0],
            vec![
                vec![1.0, 0.0, 1.0, -1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0, 0.0, 1.0, -1.0],
            ],
            vec![Sense::Eq, Sense::Eq],
            vec![1.0, 1.0],
            vec![
                (-inf, inf),
                (-inf, inf),
                (0.0, inf),
                (0.0, inf),
                (0.0, inf),
                (0.0, inf),
            ],
        );
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(s.objective.abs() < 1e-9);
        assert!((s.x[0] - 1.0).abs() < 1e-9 && (s.x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_system_is_reported() {
        let p = lp(
            false,
            vec![1.0],
            vec![vec![1.0], vec![1.0]],
            vec![Sense::Ge, Sense::Le],
            vec![2.0, 1.0],
            vec![(0.0, f64::INFINITY)],
        );
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_problem_is_reported() {
        let p = lp(
            true,
            vec![1.0],
            vec![vec![0.0]],
            vec![Sense::Le],
            vec![1.0],
            vec![(0.0, f64::INFINITY)],
        );
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_with_box_bounds() {
        // max g1 + 2 g2 s.t. g1 + g2 = 0, gi in [-1, 1] -> g = (-1, 1), obj 1
        let p = lp(
            true,
            vec![1.0, 2.0],
            vec![vec![1.0, 1.0]],
            vec![Sense::Eq],
            vec![0.0],
            vec![(-1.0, 1.0), (-1.0, 1.0)],
        );
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 1.0).abs() < 1e-9);
        assert!((s.x[0] + 1.0).abs() < 1e-9 && (s.x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn duals_satisfy_complementary_slackness() {
        // min -(y1 l1 + y2 l2) s.t. l1 + l2 = 0, l in [-1,1]: duals recover
        // the interpolating "polynomial" on interior variables
        let p = lp(
            true,
            vec![2.0, 1.0, -0.5],
            vec![vec![1.0, 1.0, 1.0]],
            vec![Sense::Eq],
            vec![0.0],
            vec![(-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)],
        );
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        // max 2 l1 + l2 - 0.5 l3 with sum zero: l1 = 1, l3 = -1, l2 = 0
        assert!((s.objective - 2.5).abs() < 1e-9);
        // interior variable l2 has zero reduced cost: c2 - y = 0 -> y = 1
        assert!((s.duals[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_ties_terminate() {
        // many redundant rows force degenerate pivots
        let inf = f64::INFINITY;
        let p = lp(
            true,
            vec![1.0, 1.0],
            vec![
                vec![1.0, 0.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0],
                vec![0.0, 1.0],
                vec![0.0, 1.0],
            ],
            vec![Sense::Le; 5],
            vec![1.0, 1.0, 1.5, 1.0, 1.0],
            vec![(0.0, inf), (0.0, inf)],
        );
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 1.5).abs() < 1e-9);
    }

    #[test]
    fn size_limits_are_resource_errors() {
        let p = lp(
            false,
            vec![0.0; 2],
            vec![vec![0.0; 2]; MAX_CONSTRAINTS + 1],
            vec![Sense::Le; MAX_CONSTRAINTS + 1],
            vec![0.0; MAX_CONSTRAINTS + 1],
            vec![(0.0, 1.0); 2],
        );
        assert!(matches!(solve_lp(&p), Err(Error::Resource(_))));
    }

    #[test]
    fn random_lps_agree_with_dense_enumeration() {
        // on tiny LPs, compare against brute-force vertex enumeration
        use crate::rng::stream_rng;
        use rand::Rng;
        let mut rng = stream_rng(99, 0);
        for trial in 0..40 {
            let n = 3usize;
            let m = 2usize;
            let obj: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let rows: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let rhs: Vec<f64> = (0..m).map(|_| rng.gen_range(-0.5..0.5)).collect();
            let p = lp(
                true,
                obj.clone(),
                rows.clone(),
                vec![Sense::Eq; m],
                rhs.clone(),
                vec![(-1.0, 1.0); n],
            );
            let s = solve_lp(&p).unwrap();
            if s.status != LpStatus::Optimal {
                continue;
            }
            // brute force: for every pair of variables fixed to a bound
            // combination, solve the 2x2-ish system for the rest; simpler:
            // dense grid search refined once
            let mut best = f64::NEG_INFINITY;
            let steps = 60;
            for i in 0..=steps {
                let x0 = -1.0 + 2.0 * i as f64 / steps as f64;
                // solve the equality system for x1, x2 given x0
                let a11 = rows[0][1];
                let a12 = rows[0][2];
                let a21 = rows[1][1];
                let a22 = rows[1][2];
                let det = a11 * a22 - a12 * a21;
                if det.abs() < 1e-9 {
                    continue;
                }
                let r1 = rhs[0] - rows[0][0] * x0;
                let r2 = rhs[1] - rows[1][0] * x0;
                let x1 = (r1 * a22 - a12 * r2) / det;
                let x2 = (a11 * r2 - r1 * a21) / det;
                if x1.abs() <= 1.0 + 1e-9 && x2.abs() <= 1.0 + 1e-9 {
                    best = best.max(obj[0] * x0 + obj[1] * x1 + obj[2] * x2);
                }
            }
            if best.is_finite() {
                assert!(
                    s.objective >= best - 1e-6,
                    "trial {trial}: simplex {} < grid {best}",
                    s.objective
                );
            }
        }
    }
}
