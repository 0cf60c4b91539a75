//! Dense two-phase simplex with Bland's rule.

use serde::Serialize;

use crate::error::{Error, Result};

/// Pivot and feasibility tolerance.
pub const LP_TOL: f64 = 1e-9;

const MAX_PIVOTS: usize = 1_000_000;

/// maximize `c·x` subject to `eq` rows `a·x = b`, `le` rows `a·x <= b`, `x >= 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearProgram {
    pub n_vars: usize,
    pub objective: Vec<f64>,
    pub eq: Vec<(Vec<f64>, f64)>,
    pub le: Vec<(Vec<f64>, f64)>,
}

impl LinearProgram {
    pub fn new(n_vars: usize) -> Self {
        Self {
            n_vars,
            objective: vec![0.0; n_vars],
            eq: Vec::new(),
            le: Vec::new(),
        }
    }

    pub fn maximize(mut self, c: Vec<f64>) -> Self {
        self.objective = c;
        self
    }

    pub fn add_eq(&mut self, row: Vec<f64>, b: f64) {
        self.eq.push((row, b));
    }

    pub fn add_le(&mut self, row: Vec<f64>, b: f64) {
        self.le.push((row, b));
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::MalformedLp(msg));
        if self.objective.len() != self.n_vars {
            return bad(format!(
                "objective has {} coefficients for {} variables",
                self.objective.len(),
                self.n_vars
            ));
        }
        for (k, (row, b)) in self.eq.iter().chain(&self.le).enumerate() {
            if row.len() != self.n_vars {
                return bad(format!("row {k} has {} coefficients", row.len()));
            }
            if !b.is_finite() || row.iter().any(|x| !x.is_finite()) {
                return bad(format!("row {k} is not finite"));
            }
        }
        if self.objective.iter().any(|x| !x.is_finite()) {
            return bad("objective is not finite".into());
        }
        Ok(())
    }

    /// Largest violation of the constraints at `x`.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let dot = |row: &[f64]| row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        let eq = self.eq.iter().map(|(r, b)| (dot(r) - b).abs());
        let le = self.le.iter().map(|(r, b)| (dot(r) - b).max(0.0));
        let neg = x.iter().map(|v| (-v).max(0.0));
        eq.chain(le).chain(neg).fold(0.0, f64::max)
    }
}

/// `y` with `yᵀA >= 0` columnwise, `y_le >= 0` and `yᵀb = -1`, which rules
/// out any `x >= 0` satisfying the constraints.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FarkasCertificate {
    pub y_eq: Vec<f64>,
    pub y_le: Vec<f64>,
}

impl FarkasCertificate {
    /// Checks the certificate by direct arithmetic.
    pub fn verify(&self, lp: &LinearProgram, tol: f64) -> bool {
        if self.y_eq.len() != lp.eq.len() || self.y_le.len() != lp.le.len() {
            return false;
        }
        if self.y_le.iter().any(|&y| y < -tol) {
            return false;
        }
        let rows = lp
            .eq
            .iter()
            .zip(&self.y_eq)
            .chain(lp.le.iter().zip(&self.y_le));
        let mut col = vec![0.0; lp.n_vars];
        let mut yb = 0.0;
        for ((row, b), y) in rows {
            yb += y * b;
            for (c, a) in col.iter_mut().zip(row) {
                *c += y * a;
            }
        }
        yb < -0.5 && col.iter().all(|&c| c >= -tol)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LpOutcome {
    Optimal { value: f64, x: Vec<f64> },
    Infeasible { certificate: FarkasCertificate },
    Unbounded,
}

struct Tableau {
    /// `m` rows of `cols + 1` entries; the last is the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    /// Reduced costs, `cols` entries.
    r: Vec<f64>,
    /// Columns allowed to enter.
    enter_limit: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        for v in &mut self.t[row] {
            *v /= p;
        }
        let prow = self.t[row].clone();
        for (i, line) in self.t.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = line[col];
            if f != 0.0 {
                for (v, pv) in line.iter_mut().zip(&prow) {
                    *v -= f * pv;
                    if v.abs() < 1e-14 {
                        *v = 0.0;
                    }
                }
            }
        }
        let f = self.r[col];
        if f != 0.0 {
            for (v, pv) in self.r.iter_mut().zip(&prow) {
                *v -= f * pv;
            }
        }
        self.basis[row] = col;
    }

    fn set_costs(&mut self, c: &[f64]) {
        let cols = self.r.len();
        self.r = c.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = c[b];
            if cb != 0.0 {
                for j in 0..cols {
                    self.r[j] -= cb * self.t[i][j];
                }
            }
        }
    }

    /// Runs to optimality; false if unbounded.
    fn run(&mut self) -> Result<bool> {
        let rhs = self.r.len();
        for _ in 0..MAX_PIVOTS {
            let Some(col) = (0..self.enter_limit).find(|&j| self.r[j] > LP_TOL) else {
                return Ok(true);
            };
            let mut best: Option<(f64, usize, usize)> = None;
            for (i, line) in self.t.iter().enumerate() {
                if line[col] > LP_TOL {
                    let ratio = line[rhs] / line[col];
                    let better = match best {
                        None => true,
                        Some((r0, _, b0)) => {
                            ratio < r0 - LP_TOL || (ratio <= r0 + LP_TOL && self.basis[i] < b0)
                        }
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            match best {
                Some((_, row, _)) => self.pivot(row, col),
                None => return Ok(false),
            }
        }
        Err(Error::MalformedLp("pivot limit reached".into()))
    }
}

/// Solves `lp`. Infeasible answers carry a Farkas certificate read off the
/// phase-one duals.
pub fn simplex_solve(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;
    let n = lp.n_vars;
    let n_le = lp.le.len();
    let m = lp.eq.len() + n_le;
    let art0 = n + n_le;
    let cols = art0 + m;
    let mut sign = vec![1.0; m];
    let mut t = Vec::with_capacity(m);
    for (i, (row, b)) in lp.eq.iter().chain(&lp.le).enumerate() {
        let mut line = vec![0.0; cols + 1];
        line[..n].copy_from_slice(row);
        if i >= lp.eq.len() {
            line[n + i - lp.eq.len()] = 1.0;
        }
        line[cols] = *b;
        if *b < 0.0 {
            sign[i] = -1.0;
            for v in &mut line {
                *v = -*v;
            }
        }
        line[art0 + i] = 1.0;
        t.push(line);
    }
    let mut tab = Tableau {
        t,
        basis: (art0..cols).collect(),
        r: vec![0.0; cols],
        enter_limit: art0,
    };

    // phase one: maximize minus the sum of artificials
    let mut c1 = vec![0.0; cols];
    for c in &mut c1[art0..] {
        *c = -1.0;
    }
    tab.set_costs(&c1);
    tab.run()?;
    let infeas: f64 = tab
        .basis
        .iter()
        .zip(&tab.t)
        .filter(|(&b, _)| b >= art0)
        .map(|(_, line)| line[cols])
        .sum();
    let scale = lp
        .eq
        .iter()
        .chain(&lp.le)
        .map(|(_, b)| b.abs())
        .fold(1.0, f64::max);
    if infeas > LP_TOL * scale {
        // y = c_B B^-1, with B^-1 sitting in the artificial columns
        let mut y = vec![0.0; m];
        for (i, &b) in tab.basis.iter().enumerate() {
            if b >= art0 {
                for (k, yk) in y.iter_mut().enumerate() {
                    *yk -= tab.t[i][art0 + k];
                }
            }
        }
        let y: Vec<f64> = y.iter().zip(&sign).map(|(a, s)| a * s).collect();
        let yb: f64 = y
            .iter()
            .zip(lp.eq.iter().chain(&lp.le))
            .map(|(a, (_, b))| a * b)
            .sum();
        let y: Vec<f64> = y.iter().map(|a| a / yb.abs()).collect();
        let (y_eq, y_le) = y.split_at(lp.eq.len());
        return Ok(LpOutcome::Infeasible {
            certificate: FarkasCertificate {
                y_eq: y_eq.to_vec(),
                y_le: y_le.to_vec(),
            },
        });
    }

    // drive remaining artificials out of the basis; drop redundant rows
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= art0 {
            match (0..art0).find(|&j| tab.t[i][j].abs() > LP_TOL) {
                Some(j) => tab.pivot(i, j),
                None => {
                    tab.t.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    let mut c2 = vec![0.0; cols];
    c2[..n].copy_from_slice(&lp.objective);
    tab.set_costs(&c2);
    if !tab.run()? {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![0.0; n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.t[i][cols].max(0.0);
        }
    }
    let value = x.iter().zip(&lp.objective).map(|(a, c)| a * c).sum();
    Ok(LpOutcome::Optimal { value, x })
}
