//! Exact-rational simplex (two phases, Bland's rule) with Farkas
//! certificates for infeasible systems.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::tensor::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub rel: Relation,
    pub rhs: Rational,
}

/// `minimize c·x` subject to the constraints and `x ≥ 0`.
/// Without an objective only feasibility is decided.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub constraints: Vec<Constraint>,
    pub objective: Option<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        x: Vec<Rational>,
        value: Rational,
    },
    /// Multipliers `y`, one per constraint, with `y ≥ 0` on `≥` rows,
    /// `y ≤ 0` on `≤` rows, `yᵀA ≤ 0` columnwise and `yᵀb > 0`.
    Infeasible {
        farkas: Vec<Rational>,
    },
    Unbounded,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            ..Default::default()
        }
    }

    pub fn add(&mut self, coeffs: Vec<(usize, Rational)>, rel: Relation, rhs: Rational) {
        self.constraints.push(Constraint { coeffs, rel, rhs });
    }

    /// Checks `x ≥ 0` and every constraint exactly.
    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| {
                let lhs: Rational = c.coeffs.iter().map(|(j, a)| a * &x[*j]).sum();
                match c.rel {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                }
            })
    }

    /// Independent check of an infeasibility certificate.
    pub fn verify_farkas(&self, y: &[Rational]) -> bool {
        if y.len() != self.constraints.len() {
            return false;
        }
        let signs_ok = self.constraints.iter().zip(y).all(|(c, yi)| match c.rel {
            Relation::Ge => !yi.is_negative(),
            Relation::Le => !yi.is_positive(),
            Relation::Eq => true,
        });
        if !signs_ok {
            return false;
        }
        let mut col = vec![Rational::zero(); self.num_vars];
        for (c, yi) in self.constraints.iter().zip(y) {
            for (j, a) in &c.coeffs {
                col[*j] += a * yi;
            }
        }
        let yb: Rational = self
            .constraints
            .iter()
            .zip(y)
            .map(|(c, yi)| &c.rhs * yi)
            .sum();
        col.iter().all(|v| !v.is_positive()) && yb.is_positive()
    }

    pub fn solve(&self) -> LpOutcome {
        Simplex::build(self).run(self)
    }
}

struct Simplex {
    /// Rows of `[A | rhs]` over all columns (structural, slack, artificial).
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Reduced costs, last entry holds minus the objective value.
    obj: Vec<Rational>,
    n_struct: usize,
    art_start: usize,
    flipped: Vec<bool>,
}

impl Simplex {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.constraints.len();
        let n_slack = lp
            .constraints
            .iter()
            .filter(|c| c.rel != Relation::Eq)
            .count();
        let n_struct = lp.num_vars;
        let art_start = n_struct + n_slack;
        let ncols = art_start + m;
        let mut rows = Vec::with_capacity(m);
        let mut flipped = Vec::with_capacity(m);
        let mut slack = n_struct;
        for (r, c) in lp.constraints.iter().enumerate() {
            let mut row = vec![Rational::zero(); ncols + 1];
            for (j, a) in &c.coeffs {
                row[*j] += a;
            }
            match c.rel {
                Relation::Le => {
                    row[slack] = Rational::one();
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -Rational::one();
                    slack += 1;
                }
                Relation::Eq => {}
            }
            row[ncols] = c.rhs.clone();
            let flip = c.rhs.is_negative();
            if flip {
                for v in row.iter_mut() {
                    *v = -v.clone();
                }
            }
            row[art_start + r] = Rational::one();
            rows.push(row);
            flipped.push(flip);
        }
        // Phase one cost: the sum of the artificial variables.
        let mut obj = vec![Rational::zero(); ncols + 1];
        for j in art_start..ncols {
            obj[j] = Rational::one();
        }
        for row in &rows {
            for (o, v) in obj.iter_mut().zip(row) {
                *o -= v;
            }
        }
        Simplex {
            rows,
            basis: (art_start..ncols).collect(),
            obj,
            n_struct,
            art_start,
            flipped,
        }
    }

    fn ncols(&self) -> usize {
        self.obj.len() - 1
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let inv = Rational::one() / &self.rows[r][col];
        for v in self.rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *v -= &f * p;
                    }
                }
            }
        }
        if !self.obj[col].is_zero() {
            let f = self.obj[col].clone();
            for (v, p) in self.obj.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[r] = col;
    }

    /// Bland's rule over columns `< limit`. Returns false if unbounded.
    fn optimize(&mut self, limit: usize) -> bool {
        let rhs = self.ncols();
        loop {
            let Some(col) = (0..limit).find(|&j| self.obj[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(Rational, usize, usize)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[col].is_positive() {
                    let ratio = &row[rhs] / &row[col];
                    let better = match &best {
                        None => true,
                        Some((br, _, bb)) => ratio < *br || (ratio == *br && self.basis[i] < *bb),
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            match best {
                Some((_, r, _)) => self.pivot(r, col),
                None => return false,
            }
        }
    }

    fn run(mut self, lp: &LinearProgram) -> LpOutcome {
        let ncols = self.ncols();
        self.optimize(ncols);
        let value = -self.obj[ncols].clone();
        if value.is_positive() {
            // y_i = c_art - r_art = 1 - r_art, un-flipped to the original row sign.
            let farkas = (0..self.rows.len())
                .map(|i| {
                    let y = Rational::one() - &self.obj[self.art_start + i];
                    if self.flipped[i] {
                        -y
                    } else {
                        y
                    }
                })
                .collect();
            return LpOutcome::Infeasible { farkas };
        }
        // Drive remaining artificials (all at zero) out of the basis.
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.art_start {
                match (0..self.art_start).find(|&j| !self.rows[i][j].is_zero()) {
                    Some(j) => self.pivot(i, j),
                    None => {
                        self.rows.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        let mut cost = vec![Rational::zero(); ncols];
        if let Some(c) = &lp.objective {
            for (j, v) in c.iter().enumerate() {
                cost[j] = v.clone();
            }
        }
        self.obj = vec![Rational::zero(); ncols + 1];
        self.obj[..ncols].clone_from_slice(&cost);
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if !cost[b].is_zero() {
                for (o, v) in self.obj.iter_mut().zip(row) {
                    *o -= &cost[b] * v;
                }
            }
        }
        if lp.objective.is_some() && !self.optimize(self.art_start) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![Rational::zero(); self.n_struct];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < self.n_struct {
                x[b] = row[ncols].clone();
            }
        }
        let value = lp
            .objective
            .as_ref()
            .map(|c| c.iter().zip(&x).map(|(a, b)| a * b).sum())
            .unwrap_or_else(Rational::zero);
        LpOutcome::Optimal { x, value }
    }
}
