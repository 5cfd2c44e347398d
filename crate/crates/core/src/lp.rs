//! Dense two-phase simplex for small linear programs.
//!
//! `maximize c·x  s.t.  A x <= b,  l <= x <= u`. Bounds are folded into the
//! tableau (shifted variables plus explicit upper-bound rows), Bland's rule
//! prevents cycling on the heavily degenerate reward-design programs, and the
//! final basic solution is re-solved from the original data so the returned
//! point carries no accumulated tableau error.

use std::fmt;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::linalg::Lu;

const PIVOT_EPS: f64 = 1e-10;
const COST_EPS: f64 = 1e-10;
const PHASE1_EPS: f64 = 1e-9;
const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
            LpStatus::IterationLimit => "stopped at the iteration limit",
        })
    }
}

/// `coeffs · x <= bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<(f64, f64)>,
    pub variable_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective_value: f64,
}

impl LpSolution {
    fn failed(status: LpStatus, n: usize) -> Self {
        LpSolution {
            status,
            x: vec![f64::NAN; n],
            objective_value: f64::NAN,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// x = lower + y
    Lower(f64, usize),
    /// x = upper - y
    Upper(f64, usize),
    /// x = y_plus - y_minus
    Free(usize, usize),
}

impl LpProblem {
    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_vars();
        if self.bounds.len() != n {
            return Err(Error::DimensionMismatch {
                what: "variable bounds",
                expected: n,
                found: self.bounds.len(),
            });
        }
        if self.variable_names.len() != n {
            return Err(Error::DimensionMismatch {
                what: "variable names",
                expected: n,
                found: self.variable_names.len(),
            });
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "constraint row",
                    expected: n,
                    found: c.coeffs.len(),
                });
            }
            if c.coeffs.iter().any(|v| !v.is_finite()) || !c.bound.is_finite() {
                return Err(Error::InvalidParameter(format!("non-finite data in row {i}")));
            }
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite objective".into()));
        }
        for (j, &(l, u)) in self.bounds.iter().enumerate() {
            if l.is_nan() || u.is_nan() || l > u || l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(Error::InvalidParameter(format!(
                    "variable {j} has invalid bounds [{l}, {u}]"
                )));
            }
        }
        Ok(())
    }

    /// Largest violation of rows and bounds at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self
            .constraints
            .iter()
            .map(|c| c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - c.bound);
        let bounds = self
            .bounds
            .iter()
            .zip(x)
            .flat_map(|(&(l, u), &v)| [l - v, v - u]);
        rows.chain(bounds).fold(0.0, f64::max)
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn solve(&self) -> Result<LpSolution> {
        solve_lp(self)
    }

    /// Plain-text dump: one variable or constraint per line, shortest
    /// round-trip decimal for every coefficient.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "lp v1");
        let _ = writeln!(out, "variables {}", self.n_vars());
        for (name, (l, u)) in self.variable_names.iter().zip(&self.bounds) {
            let _ = writeln!(out, "var {name} {l} {u}");
        }
        let _ = writeln!(out, "maximize {}", join(&self.objective));
        for c in &self.constraints {
            let _ = writeln!(out, "row {} <= {}", join(&c.coeffs), c.bound);
        }
        out.push_str("end\n");
        out
    }

    /// Parses the format written by [`LpProblem::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::parse(0, format!("unexpected end of input, expected {what}")))
        };
        let num = |line: usize, tok: &str| -> Result<f64> {
            tok.parse::<f64>()
                .map_err(|_| Error::parse(line, format!("invalid number '{tok}'")))
        };

        let (ln, l) = next("header")?;
        if l != "lp v1" {
            return Err(Error::parse(ln, "expected 'lp v1'"));
        }
        let (ln, l) = next("variables")?;
        let n: usize = l
            .strip_prefix("variables ")
            .and_then(|t| t.trim().parse().ok())
            .ok_or_else(|| Error::parse(ln, "expected 'variables <count>'"))?;
        if n > 100_000 {
            return Err(Error::parse(ln, "too many variables"));
        }
        let mut names = Vec::with_capacity(n);
        let mut bounds = Vec::with_capacity(n);
        for _ in 0..n {
            let (ln, l) = next("var")?;
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() != 4 || toks[0] != "var" {
                return Err(Error::parse(ln, "expected 'var <name> <lower> <upper>'"));
            }
            names.push(toks[1].to_string());
            bounds.push((num(ln, toks[2])?, num(ln, toks[3])?));
        }
        let (ln, l) = next("maximize")?;
        let objective = l
            .strip_prefix("maximize")
            .ok_or_else(|| Error::parse(ln, "expected 'maximize'"))?
            .split_whitespace()
            .map(|t| num(ln, t))
            .collect::<Result<Vec<_>>>()?;
        let mut constraints = Vec::new();
        loop {
            let (ln, l) = next("row or end")?;
            if l == "end" {
                break;
            }
            let body = l
                .strip_prefix("row ")
                .ok_or_else(|| Error::parse(ln, "expected 'row ... <= b' or 'end'"))?;
            let (lhs, rhs) = body
                .split_once("<=")
                .ok_or_else(|| Error::parse(ln, "missing '<='"))?;
            let coeffs = lhs
                .split_whitespace()
                .map(|t| num(ln, t))
                .collect::<Result<Vec<_>>>()?;
            constraints.push(Constraint {
                coeffs,
                bound: num(ln, rhs.trim())?,
            });
        }
        if let Some((ln, _)) = lines.next() {
            return Err(Error::parse(ln, "trailing content after 'end'"));
        }
        let lp = LpProblem {
            objective,
            constraints,
            bounds,
            variable_names: names,
        };
        lp.validate().map_err(|e| Error::parse(0, e.to_string()))?;
        Ok(lp)
    }
}

struct Tableau {
    /// Row-major `m x (cols + 1)`, last column is the right-hand side.
    t: Vec<f64>,
    m: usize,
    cols: usize,
    basis: Vec<usize>,
    cost: Vec<f64>,
}

impl Tableau {
    fn w(&self) -> usize {
        self.cols + 1
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.w() + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.t[i * self.w() + self.cols]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.w();
        let p = self.t[pr * w + pc];
        for j in 0..w {
            self.t[pr * w + j] /= p;
        }
        self.t[pr * w + pc] = 1.0;
        let pivot_row: Vec<f64> = self.t[pr * w..(pr + 1) * w].to_vec();
        for i in 0..self.m {
            if i == pr {
                continue;
            }
            let f = self.t[i * w + pc];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * w..(i + 1) * w];
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= f * p;
            }
            row[pc] = 0.0;
        }
        let f = self.cost[pc];
        if f != 0.0 {
            for (x, p) in self.cost.iter_mut().zip(&pivot_row) {
                *x -= f * p;
            }
            self.cost[pc] = 0.0;
        }
        self.basis[pr] = pc;
    }

    /// Bland's rule iterations until no improving column among `allowed`.
    fn run(&mut self, allowed: usize, pivots: &mut usize) -> LpStatus {
        loop {
            let Some(pc) = (0..allowed).find(|&j| self.cost[j] > COST_EPS) else {
                return LpStatus::Optimal;
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, pc);
                if a <= PIVOT_EPS {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                        if ratio < br && !tie || tie && self.basis[i] < self.basis[bi] {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((pr, _)) = best else {
                return LpStatus::Unbounded;
            };
            self.pivot(pr, pc);
            *pivots += 1;
            if *pivots > MAX_PIVOTS {
                return LpStatus::IterationLimit;
            }
        }
    }
}

/// Solves a well-formed [`LpProblem`]; infeasible and unbounded programs are
/// reported through [`LpSolution::status`].
pub fn solve_lp(lp: &LpProblem) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.n_vars();

    // Shift or split every variable so the standard-form columns are >= 0.
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0;
    let mut upper_rows: Vec<(usize, f64)> = Vec::new();
    for &(l, u) in &lp.bounds {
        if l.is_finite() {
            maps.push(VarMap::Lower(l, ncols));
            if u.is_finite() {
                upper_rows.push((ncols, u - l));
            }
            ncols += 1;
        } else if u.is_finite() {
            maps.push(VarMap::Upper(u, ncols));
            ncols += 1;
        } else {
            maps.push(VarMap::Free(ncols, ncols + 1));
            ncols += 2;
        }
    }

    let m = lp.constraints.len() + upper_rows.len();
    let mut a = vec![0.0; m * ncols];
    let mut b = vec![0.0; m];
    for (i, c) in lp.constraints.iter().enumerate() {
        let mut rhs = c.bound;
        for (j, &coef) in c.coeffs.iter().enumerate() {
            match maps[j] {
                VarMap::Lower(l, col) => {
                    a[i * ncols + col] += coef;
                    rhs -= coef * l;
                }
                VarMap::Upper(u, col) => {
                    a[i * ncols + col] -= coef;
                    rhs -= coef * u;
                }
                VarMap::Free(p, q) => {
                    a[i * ncols + p] += coef;
                    a[i * ncols + q] -= coef;
                }
            }
        }
        b[i] = rhs;
    }
    for (k, &(col, width)) in upper_rows.iter().enumerate() {
        let i = lp.constraints.len() + k;
        a[i * ncols + col] = 1.0;
        b[i] = width;
    }
    let mut cost_y = vec![0.0; ncols];
    for (j, &c) in lp.objective.iter().enumerate() {
        match maps[j] {
            VarMap::Lower(_, col) => cost_y[col] += c,
            VarMap::Upper(_, col) => cost_y[col] -= c,
            VarMap::Free(p, q) => {
                cost_y[p] += c;
                cost_y[q] -= c;
            }
        }
    }

    // Columns: y, slacks, artificials. Rows with negative rhs are negated and
    // start with an artificial basic variable.
    let negated: Vec<bool> = b.iter().map(|&v| v < 0.0).collect();
    let n_art = negated.iter().filter(|&&x| x).count();
    let slack0 = ncols;
    let art0 = ncols + m;
    let cols = art0 + n_art;
    let w = cols + 1;
    let mut t = vec![0.0; m * w];
    let mut basis = vec![0; m];
    let mut k = 0;
    for i in 0..m {
        let sign = if negated[i] { -1.0 } else { 1.0 };
        for j in 0..ncols {
            t[i * w + j] = sign * a[i * ncols + j];
        }
        t[i * w + slack0 + i] = sign;
        t[i * w + cols] = sign * b[i];
        if negated[i] {
            t[i * w + art0 + k] = 1.0;
            basis[i] = art0 + k;
            k += 1;
        } else {
            basis[i] = slack0 + i;
        }
    }
    // Standard-form copy for the final basis re-solve.
    let original = t.clone();

    let mut tab = Tableau {
        t,
        m,
        cols,
        basis,
        cost: vec![0.0; w],
    };
    let mut pivots = 0;

    if n_art > 0 {
        for j in art0..cols {
            tab.cost[j] = -1.0;
        }
        for i in 0..m {
            if tab.basis[i] >= art0 {
                for j in 0..w {
                    tab.cost[j] += tab.t[i * w + j];
                }
            }
        }
        match tab.run(cols, &mut pivots) {
            LpStatus::Optimal => {}
            LpStatus::Unbounded => unreachable!("phase one is bounded"),
            other => return Ok(LpSolution::failed(other, n)),
        }
        let infeasibility: f64 = (0..m)
            .filter(|&i| tab.basis[i] >= art0)
            .map(|i| tab.rhs(i).abs())
            .sum();
        let scale = 1.0 + b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if infeasibility > PHASE1_EPS * scale {
            return Ok(LpSolution::failed(LpStatus::Infeasible, n));
        }
        // Drive zero-valued artificials out of the basis where possible.
        for i in 0..m {
            if tab.basis[i] >= art0 {
                if let Some(j) = (0..art0).find(|&j| tab.at(i, j).abs() > PIVOT_EPS) {
                    tab.pivot(i, j);
                }
            }
        }
    }

    // Phase two: canonical reduced costs for the real objective.
    let mut cost = vec![0.0; w];
    cost[..ncols].copy_from_slice(&cost_y);
    for i in 0..m {
        let cb = if tab.basis[i] < ncols { cost_y[tab.basis[i]] } else { 0.0 };
        if cb != 0.0 {
            for j in 0..w {
                cost[j] -= cb * tab.t[i * w + j];
            }
        }
    }
    for c in cost.iter_mut().take(cols).skip(art0) {
        *c = 0.0;
    }
    tab.cost = cost;
    match tab.run(art0, &mut pivots) {
        LpStatus::Optimal => {}
        other => return Ok(LpSolution::failed(other, n)),
    }

    let y = basic_solution(&tab, &original, w);
    let x: Vec<f64> = maps
        .iter()
        .map(|&mp| match mp {
            VarMap::Lower(l, col) => l + y[col],
            VarMap::Upper(u, col) => u - y[col],
            VarMap::Free(p, q) => y[p] - y[q],
        })
        .collect();
    let x: Vec<f64> = x
        .into_iter()
        .zip(&lp.bounds)
        .map(|(v, &(l, u))| v.clamp(l, u))
        .collect();
    Ok(LpSolution {
        objective_value: lp.objective_at(&x),
        x,
        status: LpStatus::Optimal,
    })
}

/// Values of the standard-form columns at the final basis, re-solved from
/// the original rows; falls back to the tableau if the basis is singular.
fn basic_solution(tab: &Tableau, original: &[f64], w: usize) -> Vec<f64> {
    let m = tab.m;
    let mut y = vec![0.0; tab.cols];
    let mut bmat = vec![0.0; m * m];
    for i in 0..m {
        for (k, &col) in tab.basis.iter().enumerate() {
            bmat[i * m + k] = original[i * w + col];
        }
    }
    let rhs: Vec<f64> = (0..m).map(|i| original[i * w + tab.cols]).collect();
    match Lu::factor(m, bmat) {
        Ok(lu) => {
            let sol = lu.solve(&rhs);
            for (k, &col) in tab.basis.iter().enumerate() {
                y[col] = sol[k].max(0.0);
            }
        }
        Err(_) => {
            for (i, &col) in tab.basis.iter().enumerate() {
                y[col] = tab.rhs(i).max(0.0);
            }
        }
    }
    y
}
