//! Dense simplex for `max cᵀx  s.t.  A x ≤ b` with free variables.
//!
//! The tableau is built for the dual program `min bᵀy  s.t.  Aᵀy = c, y ≥ 0`,
//! which has one row per variable rather than one per constraint. The primal
//! optimizer is read back from the simplex multipliers. Pricing is
//! largest-coefficient until a run of degenerate pivots is seen, after which
//! Bland's rule takes over for the rest of the solve.

use nalgebra::{DMatrix, DVector};

/// Outcome of a linear program.
#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: DVector<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal { .. } => LpStatus::Optimal,
            LpOutcome::Infeasible => LpStatus::Infeasible,
            LpOutcome::Unbounded => LpStatus::Unbounded,
        }
    }

    pub fn optimizer(&self) -> Option<&DVector<f64>> {
        match self {
            LpOutcome::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }
}

/// Maximizes `c·x` subject to `A x ≤ b`.
pub fn solve_lp(c: &DVector<f64>, a: &DMatrix<f64>, b: &DVector<f64>) -> LpOutcome {
    LinearProgram::new(a, b).maximize(c)
}

const DEGENERATE_RUN: usize = 20;
const PIVOT_TOL: f64 = 1e-11;

/// Constraint set `A x ≤ b` prepared for repeated solves with different objectives.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    /// Unit-norm constraint rows.
    rows: DMatrix<f64>,
    rhs: Vec<f64>,
    vars: usize,
    /// A zero row with negative right-hand side was present.
    contradictory: bool,
}

impl LinearProgram {
    pub fn new(a: &DMatrix<f64>, b: &DVector<f64>) -> Self {
        assert_eq!(a.nrows(), b.len(), "A and b row counts differ");
        let n = a.ncols();
        let mut kept = Vec::with_capacity(a.nrows());
        let mut rhs = Vec::with_capacity(a.nrows());
        let mut contradictory = false;
        for (k, row) in a.row_iter().enumerate() {
            let norm = row.norm();
            if norm > 0.0 {
                kept.push(row / norm);
                rhs.push(b[k] / norm);
            } else if b[k] < 0.0 {
                contradictory = true;
            }
        }
        let rows = if kept.is_empty() {
            DMatrix::zeros(0, n)
        } else {
            DMatrix::from_rows(&kept)
        };
        Self {
            rows,
            rhs,
            vars: n,
            contradictory,
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn maximize(&self, c: &DVector<f64>) -> LpOutcome {
        assert_eq!(c.len(), self.vars, "objective length differs from variable count");
        if self.contradictory {
            return LpOutcome::Infeasible;
        }
        let scale = c.amax();
        if scale == 0.0 {
            return match self.feasible_point() {
                Some(x) => LpOutcome::Optimal { x, value: 0.0 },
                None => LpOutcome::Infeasible,
            };
        }
        let unit: Vec<f64> = c.iter().map(|v| v / scale).collect();
        match dual_simplex(&self.rows, &self.rhs, &unit) {
            DualResult::Optimal(x) => {
                let value = c.dot(&x);
                LpOutcome::Optimal { x, value }
            }
            DualResult::Unbounded => LpOutcome::Infeasible,
            DualResult::Infeasible => match self.feasible_point() {
                Some(_) => LpOutcome::Unbounded,
                None => LpOutcome::Infeasible,
            },
        }
    }

    /// Finds some `x` with `A x ≤ b`, or `None` when the set is empty.
    pub fn feasible_point(&self) -> Option<DVector<f64>> {
        if self.contradictory {
            return None;
        }
        let (k, n) = self.rows.shape();
        // max −s  s.t.  a·x − s ≤ b,  −s ≤ 1
        let mut ext = DMatrix::zeros(k + 1, n + 1);
        ext.view_mut((0, 0), (k, n)).copy_from(&self.rows);
        for r in 0..k {
            ext[(r, n)] = -1.0;
        }
        ext[(k, n)] = -1.0;
        let mut rhs = self.rhs.clone();
        rhs.push(1.0);
        let mut obj = vec![0.0; n + 1];
        obj[n] = -1.0;
        match dual_simplex(&ext, &rhs, &obj) {
            DualResult::Optimal(sol) => {
                let tol = feas_tol(&self.rhs);
                let x = sol.rows(0, n).into_owned();
                (self.max_violation(&x) <= tol).then_some(x)
            }
            // The auxiliary program is always feasible and bounded.
            _ => None,
        }
    }

    /// Largest `a·x − b` over the normalized rows.
    pub fn max_violation(&self, x: &DVector<f64>) -> f64 {
        let lhs = &self.rows * x;
        lhs.iter()
            .zip(&self.rhs)
            .map(|(l, r)| l - r)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Rows added per round when a working-set optimum violates lazy rows.
const ROWS_PER_ROUND: usize = 4;

/// Repeated solves where most rows are expected to be inactive.
///
/// The leading `core` rows are always present. The remaining rows are only
/// added to the working set once an optimum violates them, and stay there for
/// later solves. An optimum of the working set that satisfies every lazy row
/// is optimal for the whole program.
#[derive(Debug, Clone)]
pub struct RowGeneration {
    core: LinearProgram,
    lazy: LinearProgram,
    active: Vec<bool>,
    working: LinearProgram,
    tol: f64,
}

impl RowGeneration {
    pub fn new(a: &DMatrix<f64>, b: &DVector<f64>, core: usize) -> Self {
        assert_eq!(a.nrows(), b.len(), "A and b row counts differ");
        let core = core.min(a.nrows());
        let lazy_rows = a.nrows() - core;
        let head = LinearProgram::new(&a.rows(0, core).into_owned(), &b.rows(0, core).into_owned());
        let lazy = LinearProgram::new(&a.rows(core, lazy_rows).into_owned(), &b.rows(core, lazy_rows).into_owned());
        let tol = feas_tol(&head.rhs).max(feas_tol(&lazy.rhs));
        RowGeneration {
            working: head.clone(),
            active: vec![false; lazy.rhs.len()],
            core: head,
            lazy,
            tol,
        }
    }

    /// Lazy rows currently in the working set.
    pub fn working_rows(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    fn rebuild(&mut self) {
        let picked: Vec<usize> = (0..self.active.len()).filter(|&i| self.active[i]).collect();
        let n = self.core.vars;
        let k = self.core.rhs.len();
        let mut rows = DMatrix::zeros(k + picked.len(), n);
        rows.view_mut((0, 0), (k, n)).copy_from(&self.core.rows);
        let mut rhs = self.core.rhs.clone();
        for (r, &i) in picked.iter().enumerate() {
            rows.row_mut(k + r).copy_from(&self.lazy.rows.row(i));
            rhs.push(self.lazy.rhs[i]);
        }
        self.working = LinearProgram {
            rows,
            rhs,
            vars: n,
            contradictory: self.core.contradictory,
        };
    }

    pub fn maximize(&mut self, c: &DVector<f64>) -> LpOutcome {
        if self.lazy.contradictory {
            return LpOutcome::Infeasible;
        }
        loop {
            let out = self.working.maximize(c);
            let x = match &out {
                LpOutcome::Optimal { x, .. } => x,
                // A relaxation with no feasible point proves the full program infeasible.
                LpOutcome::Infeasible => return out,
                LpOutcome::Unbounded => {
                    if self.active.iter().all(|&a| a) {
                        return out;
                    }
                    self.active.iter_mut().for_each(|a| *a = true);
                    self.rebuild();
                    continue;
                }
            };
            if self.active.is_empty() {
                return out;
            }
            let lhs = &self.lazy.rows * x;
            let mut violated: Vec<(usize, f64)> = lhs
                .iter()
                .zip(&self.lazy.rhs)
                .enumerate()
                .filter(|&(i, _)| !self.active[i])
                .map(|(i, (l, r))| (i, l - r))
                .filter(|&(_, v)| v > self.tol)
                .collect();
            if violated.is_empty() {
                return out;
            }
            violated.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            for &(i, _) in violated.iter().take(ROWS_PER_ROUND) {
                self.active[i] = true;
            }
            self.rebuild();
        }
    }
}

fn feas_tol(rhs: &[f64]) -> f64 {
    1e-9 * rhs.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

enum DualResult {
    Optimal(DVector<f64>),
    /// Dual unbounded: primal infeasible.
    Unbounded,
    /// Dual infeasible: primal unbounded or infeasible.
    Infeasible,
}

struct Tableau {
    m: usize,
    /// Columns: K structural (one per primal row), then m artificials, then rhs.
    width: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
    structural: usize,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.width - 1)
    }

    fn pivot(&mut self, pr: usize, pc: usize, reduced: &mut [f64]) {
        let w = self.width;
        let p = self.at(pr, pc);
        let (before, rest) = self.data.split_at_mut(pr * w);
        let (prow, after) = rest.split_at_mut(w);
        for v in prow.iter_mut() {
            *v /= p;
        }
        for row in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let f = row[pc];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * pv;
                }
                row[pc] = 0.0;
            }
        }
        let f = reduced[pc];
        if f != 0.0 {
            for (v, pv) in reduced.iter_mut().zip(prow.iter()) {
                *v -= f * pv;
            }
            reduced[pc] = 0.0;
        }
        self.basis[pr] = pc;
    }

    /// Runs simplex iterations on `reduced` (last entry is −objective).
    /// Returns false when an improving column has no positive entry.
    fn optimize(&mut self, reduced: &mut [f64], cost_tol: f64) -> bool {
        let mut degenerate = 0usize;
        let mut bland = false;
        let cap = 50 * (self.structural + self.m) + 1000;
        for _ in 0..cap {
            let entering = if bland {
                (0..self.structural).find(|&k| reduced[k] < -cost_tol)
            } else {
                let mut best = None;
                let mut best_val = -cost_tol;
                for (k, &r) in reduced[..self.structural].iter().enumerate() {
                    if r < best_val {
                        best_val = r;
                        best = Some(k);
                    }
                }
                best
            };
            let Some(pc) = entering else {
                return true;
            };

            let mut leave: Option<(usize, f64, f64)> = None;
            for r in 0..self.m {
                let a = self.at(r, pc);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r).max(0.0) / a;
                    leave = match leave {
                        None => Some((r, ratio, a)),
                        Some((br, bratio, ba)) => {
                            let tie = (ratio - bratio).abs() <= 1e-12 * (1.0 + bratio.abs());
                            let better = if tie {
                                if bland {
                                    self.basis[r] < self.basis[br]
                                } else {
                                    a > ba
                                }
                            } else {
                                ratio < bratio
                            };
                            if better {
                                Some((r, ratio, a))
                            } else {
                                Some((br, bratio, ba))
                            }
                        }
                    };
                }
            }
            let Some((pr, ratio, _)) = leave else {
                return false;
            };
            if ratio <= 1e-14 {
                degenerate += 1;
                if degenerate >= DEGENERATE_RUN {
                    bland = true;
                }
            } else {
                degenerate = 0;
            }
            self.pivot(pr, pc, reduced);
        }
        log::warn!("simplex iteration cap reached; returning current basis");
        true
    }
}

/// Simplex on `min rhsᵀy  s.t.  rowsᵀ y = c, y ≥ 0`; returns the primal optimizer.
fn dual_simplex(rows: &DMatrix<f64>, rhs: &[f64], c: &[f64]) -> DualResult {
    let (k, m) = rows.shape();
    let width = k + m + 1;
    let mut data = vec![0.0; m * width];
    let mut sign = vec![1.0; m];
    for j in 0..m {
        sign[j] = if c[j] < 0.0 { -1.0 } else { 1.0 };
        let row = &mut data[j * width..(j + 1) * width];
        for r in 0..k {
            row[r] = sign[j] * rows[(r, j)];
        }
        row[k + j] = 1.0;
        row[width - 1] = sign[j] * c[j];
    }
    let mut tab = Tableau {
        m,
        width,
        data,
        basis: (k..k + m).collect(),
        structural: k,
    };

    // Phase 1: drive the artificials out.
    let mut reduced = vec![0.0; width];
    for j in 0..m {
        for col in 0..k {
            reduced[col] -= tab.at(j, col);
        }
        reduced[width - 1] -= tab.rhs(j);
    }
    tab.optimize(&mut reduced, 1e-12);
    let infeasibility = -reduced[width - 1];
    if infeasibility > 1e-9 {
        return DualResult::Infeasible;
    }
    for r in 0..m {
        if tab.basis[r] >= k {
            let best = (0..k)
                .map(|col| (col, tab.at(r, col).abs()))
                .max_by(|a, b| a.1.total_cmp(&b.1));
            if let Some((col, mag)) = best {
                if mag > 1e-9 {
                    tab.pivot(r, col, &mut reduced);
                }
            }
        }
    }

    // Phase 2 over the structural columns; artificials stay for pricing only.
    let cost = |col: usize| if col < k { rhs[col] } else { 0.0 };
    let mut reduced = vec![0.0; width];
    for (col, r) in reduced.iter_mut().enumerate().take(k + m) {
        *r = cost(col);
    }
    for r in 0..m {
        let cb = cost(tab.basis[r]);
        if cb != 0.0 {
            for col in 0..width {
                reduced[col] -= cb * tab.at(r, col);
            }
        }
    }
    let tol = 1e-10 * rhs.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    if !tab.optimize(&mut reduced, tol) {
        return DualResult::Unbounded;
    }

    let x = DVector::from_iterator(m, (0..m).map(|j| -sign[j] * reduced[k + j]));
    DualResult::Optimal(refine(rows, rhs, &tab.basis, k, x))
}

/// Re-solves the active rows directly when the final basis is fully structural.
fn refine(
    rows: &DMatrix<f64>,
    rhs: &[f64],
    basis: &[usize],
    structural: usize,
    x: DVector<f64>,
) -> DVector<f64> {
    if basis.iter().any(|&b| b >= structural) {
        return x;
    }
    let m = basis.len();
    let active = DMatrix::from_fn(m, m, |r, c| rows[(basis[r], c)]);
    let target = DVector::from_iterator(m, basis.iter().map(|&b| rhs[b]));
    let Some(refined) = active.lu().solve(&target) else {
        return x;
    };
    let viol = |v: &DVector<f64>| {
        (rows * v)
            .iter()
            .zip(rhs)
            .map(|(l, r)| l - r)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    if refined.iter().all(|v| v.is_finite()) && viol(&refined) <= viol(&x).max(0.0) + 1e-12 {
        refined
    } else {
        x
    }
}
