//! Dense two-phase tableau simplex for small linear programs.
//!
//! Maximizes `cᵀx` subject to `A_ub x ≤ b_ub`, `A_eq x = b_eq`, `x ≥ 0`.
//! Pivoting follows Bland's rule, so the method terminates on degenerate
//! problems at the cost of some extra pivots.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub c: Vec<f64>,
    pub a_ub: Vec<Vec<f64>>,
    pub b_ub: Vec<f64>,
    pub a_eq: Vec<Vec<f64>>,
    pub b_eq: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// `rows × (cols + 1)`, last column is the right-hand side.
    a: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, j: usize) {
        let w = self.cols + 1;
        let inv = 1.0 / self.a[r][j];
        for v in self.a[r].iter_mut() {
            *v *= inv;
        }
        let prow = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[j];
            if f != 0.0 {
                for k in 0..w {
                    row[k] -= f * prow[k];
                }
            }
        }
        self.basis[r] = j;
    }

    /// Reduced costs `c_j - c_Bᵀ B⁻¹ A_j` for objective `obj`.
    fn reduced(&self, obj: &[f64]) -> (Vec<f64>, f64) {
        let mut red = obj.to_vec();
        let mut value = 0.0;
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = obj[b];
            if cb != 0.0 {
                for k in 0..self.cols {
                    red[k] -= cb * self.a[i][k];
                }
                value += cb * self.a[i][self.cols];
            }
        }
        (red, value)
    }

    /// Runs Bland's rule on `obj`; columns with `allowed[j] == false` never enter.
    fn optimize(&mut self, obj: &[f64], allowed: &[bool]) -> Result<bool> {
        for _ in 0..MAX_PIVOTS {
            let (red, _) = self.reduced(obj);
            let Some(j) = (0..self.cols).find(|&j| allowed[j] && red[j] > PIVOT_TOL) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.a.iter().enumerate() {
                let aij = row[j];
                if aij > PIVOT_TOL {
                    let ratio = row[self.cols] / aij;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-15
                                || (ratio <= lr + 1e-15 && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, j),
            }
        }
        Err(Error::Solver(format!("no optimum after {MAX_PIVOTS} pivots")))
    }
}

impl LinearProgram {
    pub fn new(c: Vec<f64>) -> Self {
        Self {
            c,
            ..Self::default()
        }
    }

    pub fn add_le(&mut self, row: Vec<f64>, b: f64) {
        self.a_ub.push(row);
        self.b_ub.push(b);
    }

    pub fn add_eq(&mut self, row: Vec<f64>, b: f64) {
        self.a_eq.push(row);
        self.b_eq.push(b);
    }

    pub fn maximize(&self) -> Result<LpOutcome> {
        let n = self.c.len();
        if self.a_ub.iter().chain(&self.a_eq).any(|r| r.len() != n) {
            return Err(Error::Solver("constraint row length mismatch".into()));
        }
        let n_ub = self.a_ub.len();
        let rows: Vec<(&[f64], f64, bool)> = self
            .a_ub
            .iter()
            .zip(&self.b_ub)
            .map(|(r, &b)| (r.as_slice(), b, true))
            .chain(self.a_eq.iter().zip(&self.b_eq).map(|(r, &b)| (r.as_slice(), b, false)))
            .collect();
        let m = rows.len();
        // artificial variable for every row that cannot start on its slack
        let needs_art: Vec<bool> = rows.iter().map(|&(_, b, ub)| !ub || b < 0.0).collect();
        let n_art = needs_art.iter().filter(|&&v| v).count();
        let cols = n + n_ub + n_art;
        let mut a = vec![vec![0.0; cols + 1]; m];
        let mut basis = vec![0; m];
        let mut art = n + n_ub;
        for (i, &(row, b, ub)) in rows.iter().enumerate() {
            let sign = if b < 0.0 { -1.0 } else { 1.0 };
            for k in 0..n {
                a[i][k] = sign * row[k];
            }
            if ub {
                a[i][n + i] = sign;
            }
            a[i][cols] = sign * b;
            if needs_art[i] {
                a[i][art] = 1.0;
                basis[i] = art;
                art += 1;
            } else {
                basis[i] = n + i;
            }
        }
        let mut t = Tableau { a, basis, cols };

        if n_art > 0 {
            let mut phase1 = vec![0.0; cols];
            for v in phase1[n + n_ub..].iter_mut() {
                *v = -1.0;
            }
            let all = vec![true; cols];
            t.optimize(&phase1, &all)?;
            let (_, value) = t.reduced(&phase1);
            if value < -FEAS_TOL {
                return Ok(LpOutcome::Infeasible);
            }
            // drive remaining artificials out, dropping redundant rows
            let mut i = 0;
            while i < t.a.len() {
                if t.basis[i] >= n + n_ub {
                    match (0..n + n_ub).find(|&j| t.a[i][j].abs() > PIVOT_TOL) {
                        Some(j) => {
                            t.pivot(i, j);
                            i += 1;
                        }
                        None => {
                            t.a.remove(i);
                            t.basis.remove(i);
                        }
                    }
                } else {
                    i += 1;
                }
            }
        }

        let mut obj = vec![0.0; cols];
        obj[..n].copy_from_slice(&self.c);
        let allowed: Vec<bool> = (0..cols).map(|j| j < n + n_ub).collect();
        if !t.optimize(&obj, &allowed)? {
            return Ok(LpOutcome::Unbounded);
        }
        let mut x = vec![0.0; n];
        for (i, &b) in t.basis.iter().enumerate() {
            if b < n {
                x[b] = t.a[i][cols].max(0.0);
            }
        }
        let objective = x.iter().zip(&self.c).map(|(a, b)| a * b).sum();
        Ok(LpOutcome::Optimal { x, objective })
    }
}
