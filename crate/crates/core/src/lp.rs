//! Dense linear programming and polyhedral redundancy tests.
//!
//! Problems are small (tens of rows), so a two-phase tableau simplex with
//! Bland's rule is used throughout.

use serde::Serialize;

use crate::error::{Error, Result};

/// Pivot and feasibility tolerance.
pub const LP_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 100_000;

/// {z : a_i·z ≤ b_i}, with strict rows flagged. Strictness does not change
/// any closure computation here; it is kept for membership tests.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyhedron {
    dim: usize,
    rows: Vec<Vec<f64>>,
    b: Vec<f64>,
    open_row: Vec<bool>,
}

impl Polyhedron {
    pub fn new(dim: usize) -> Self {
        Self { dim, rows: Vec::new(), b: Vec::new(), open_row: Vec::new() }
    }

    /// Axis-aligned box {z : lower ≤ z ≤ upper} as 2n closed rows.
    pub fn axis_box(lower: &[f64], upper: &[f64]) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::domain("box bounds have different lengths"));
        }
        let n = lower.len();
        let mut p = Self::new(n);
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            p.push(e.clone(), upper[i], false)?;
            e[i] = -1.0;
            p.push(e, -lower[i], false)?;
        }
        Ok(p)
    }

    pub fn push(&mut self, row: Vec<f64>, b: f64, open: bool) -> Result<()> {
        if row.len() != self.dim {
            return Err(Error::domain(format!("row has length {}, polyhedron dimension is {}", row.len(), self.dim)));
        }
        if row.iter().any(|v| !v.is_finite()) || b.is_nan() {
            return Err(Error::domain("polyhedron rows must be finite"));
        }
        self.rows.push(row);
        self.b.push(b);
        self.open_row.push(open);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn rhs(&self, i: usize) -> f64 {
        self.b[i]
    }

    pub fn is_open(&self, i: usize) -> bool {
        self.open_row[i]
    }

    /// Slack b_i − a_i·z of every row.
    pub fn slacks(&self, z: &[f64]) -> Vec<f64> {
        self.rows.iter().zip(&self.b).map(|(a, b)| b - dot(a, z)).collect()
    }

    /// Membership up to `tol`. Open rows are strict only when `tol` is zero.
    pub fn contains(&self, z: &[f64], tol: f64) -> bool {
        self.slacks(z).iter().zip(&self.open_row).all(|(&s, &open)| if open && tol == 0.0 { s > 0.0 } else { s >= -tol })
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn intersect(&self, other: &Polyhedron) -> Result<Polyhedron> {
        if self.dim != other.dim {
            return Err(Error::domain(format!("cannot intersect dimensions {} and {}", self.dim, other.dim)));
        }
        let mut p = self.clone();
        p.rows.extend(other.rows.iter().cloned());
        p.b.extend(&other.b);
        p.open_row.extend(&other.open_row);
        Ok(p)
    }

    pub fn without_row(&self, i: usize) -> Polyhedron {
        let mut p = self.clone();
        p.rows.remove(i);
        p.b.remove(i);
        p.open_row.remove(i);
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpResult {
    pub status: LpStatus,
    /// Optimal value; +∞ when unbounded, NaN when infeasible.
    pub value: f64,
    /// Maximizer when optimal, empty otherwise.
    pub witness: Vec<f64>,
}

/// Maximize c·z over the closure of `region`.
pub fn lp_maximize(c: &[f64], region: &Polyhedron) -> Result<LpResult> {
    if c.len() != region.dim {
        return Err(Error::domain(format!("objective has length {}, region dimension is {}", c.len(), region.dim)));
    }
    if c.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("objective must be finite"));
    }
    Tableau::build(c, region).solve()
}

/// Outcome of maximizing a row's normal over the other constraints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RowSupport {
    /// The maximum exceeds the row offset (or is unbounded).
    Exceeds(f64),
    /// The row is implied by the remaining constraints.
    Within(f64),
    /// The remaining constraints do not meet the box.
    Infeasible,
}

/// Maximizes a_i·z over (region without row i) ∩ `bx`.
pub fn row_support(region: &Polyhedron, i: usize, bx: &Polyhedron) -> Result<RowSupport> {
    if i >= region.len() {
        return Err(Error::domain(format!("row {i} out of range for {} rows", region.len())));
    }
    let rest = region.without_row(i).intersect(bx)?;
    let res = lp_maximize(region.row(i), &rest)?;
    let b = region.rhs(i);
    Ok(match res.status {
        LpStatus::Infeasible => RowSupport::Infeasible,
        LpStatus::Unbounded => RowSupport::Exceeds(f64::INFINITY),
        LpStatus::Optimal if res.value > b + LP_TOL * b.abs().max(1.0) => RowSupport::Exceeds(res.value),
        LpStatus::Optimal => RowSupport::Within(res.value),
    })
}

/// True iff row i of `region` is not implied by the other rows within `bx`.
/// An infeasible intersection reports `false`; use [`row_support`] to tell
/// the cases apart.
pub fn constraint_nonredundant(region: &Polyhedron, i: usize, bx: &Polyhedron) -> Result<bool> {
    Ok(matches!(row_support(region, i, bx)?, RowSupport::Exceeds(_)))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Tableau over [z⁺, z⁻, slack, artificial | rhs] with one row per constraint.
struct Tableau {
    n: usize,
    rows: usize,
    cols: usize,
    n_real: usize,
    t: Vec<f64>,
    basis: Vec<usize>,
    cost: Vec<f64>,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn build(c: &[f64], region: &Polyhedron) -> Self {
        let n = region.dim;
        let k = region.len();
        let n_art = region.b.iter().filter(|&&b| b < 0.0).count();
        let n_real = 2 * n + k;
        let cols = n_real + n_art;
        let width = cols + 1;
        let mut t = vec![0.0; k * width];
        let mut basis = vec![0; k];
        let mut art = n_real;
        for i in 0..k {
            let sign = if region.b[i] < 0.0 { -1.0 } else { 1.0 };
            let r = &mut t[i * width..(i + 1) * width];
            for j in 0..n {
                r[j] = sign * region.rows[i][j];
                r[n + j] = -sign * region.rows[i][j];
            }
            r[2 * n + i] = sign;
            r[cols] = sign * region.b[i];
            if sign < 0.0 {
                r[art] = 1.0;
                basis[i] = art;
                art += 1;
            } else {
                basis[i] = 2 * n + i;
            }
        }
        let mut cost = vec![0.0; cols];
        for j in 0..n {
            cost[j] = c[j];
            cost[n + j] = -c[j];
        }
        Self { n, rows: k, cols, n_real, t, basis, cost }
    }

    fn width(&self) -> usize {
        self.cols + 1
    }

    fn rhs(&self, i: usize) -> f64 {
        self.t[i * self.width() + self.cols]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width();
        let p = self.t[pr * w + pc];
        for v in &mut self.t[pr * w..(pr + 1) * w] {
            *v /= p;
        }
        let prow: Vec<f64> = self.t[pr * w..(pr + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == pr {
                continue;
            }
            let f = self.t[i * w + pc];
            if f != 0.0 {
                for (v, pv) in self.t[i * w..(i + 1) * w].iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
                self.t[i * w + pc] = 0.0;
            }
        }
        self.basis[pr] = pc;
    }

    /// Primal simplex maximizing `cost` over columns `< active`.
    fn run(&mut self, cost: &[f64], active: usize) -> Result<Phase> {
        let w = self.width();
        for _ in 0..MAX_PIVOTS {
            let mut entering = None;
            for j in 0..active {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut r = cost[j];
                for i in 0..self.rows {
                    r -= cost[self.basis[i]] * self.t[i * w + j];
                }
                if r > LP_TOL {
                    entering = Some(j);
                    break;
                }
            }
            let Some(pc) = entering else {
                return Ok(Phase::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.t[i * w + pc];
                if a > LP_TOL {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - LP_TOL || (ratio <= lr + LP_TOL && self.basis[i] < self.basis[li]) {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((pr, _)) = leave else {
                return Ok(Phase::Unbounded);
            };
            self.pivot(pr, pc);
        }
        Err(Error::Solver(format!("simplex exceeded {MAX_PIVOTS} pivots")))
    }

    fn objective(&self, cost: &[f64]) -> f64 {
        (0..self.rows).map(|i| cost[self.basis[i]] * self.rhs(i)).sum()
    }

    fn solve(mut self) -> Result<LpResult> {
        let w = self.width();
        if self.cols > self.n_real {
            let mut phase1 = vec![0.0; self.cols];
            for v in &mut phase1[self.n_real..] {
                *v = -1.0;
            }
            self.run(&phase1, self.cols)?;
            let scale = (0..self.rows).map(|i| self.rhs(i).abs()).fold(1.0, f64::max);
            if self.objective(&phase1) < -LP_TOL * scale {
                return Ok(LpResult { status: LpStatus::Infeasible, value: f64::NAN, witness: Vec::new() });
            }
            for i in 0..self.rows {
                if self.basis[i] >= self.n_real {
                    if let Some(j) = (0..self.n_real).find(|&j| self.t[i * w + j].abs() > LP_TOL) {
                        self.pivot(i, j);
                    }
                }
            }
        }
        let cost = std::mem::take(&mut self.cost);
        match self.run(&cost, self.n_real)? {
            Phase::Unbounded => Ok(LpResult { status: LpStatus::Unbounded, value: f64::INFINITY, witness: Vec::new() }),
            Phase::Optimal => {
                let mut z = vec![0.0; self.n];
                for i in 0..self.rows {
                    let b = self.basis[i];
                    if b < self.n {
                        z[b] += self.rhs(i);
                    } else if b < 2 * self.n {
                        z[b - self.n] -= self.rhs(i);
                    }
                }
                let value = cost[..self.n].iter().zip(&z).map(|(c, x)| c * x).sum();
                Ok(LpResult { status: LpStatus::Optimal, value, witness: z })
            }
        }
    }
}
