//! Exact rational linear programming by dense two-phase simplex with
//! Bland's rule. Sized for the desk-scale projective-norm programs: tens
//! of variables and constraints, all arithmetic in `BigRational`.

use crate::error::{Error, Result};
use crate::scalar::Rational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    /// sparse row: (variable index, coefficient)
    pub terms: Vec<(usize, Rational)>,
    pub rel: Rel,
    pub rhs: Rational,
}

/// Minimize `objective · x` over `x ≥ 0` subject to the constraints.
#[derive(Clone, Debug)]
pub struct Lp {
    pub num_vars: usize,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub value: Rational,
    pub x: Vec<Rational>,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.rows[row][col].clone();
        debug_assert!(!piv.is_zero());
        for v in self.rows[row].iter_mut() {
            *v /= &piv;
        }
        self.rhs[row] /= &piv;
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let factor = self.rows[i][col].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..self.ncols {
                let delta = &factor * &self.rows[row][j];
                self.rows[i][j] -= delta;
            }
            let delta = &factor * &self.rhs[row];
            self.rhs[i] -= delta;
        }
        self.basis[row] = col;
    }

    /// Bland-rule simplex on the given objective, restricted to columns
    /// `j < active_cols`. Returns the optimal objective value.
    fn optimize(&mut self, cost: &[Rational], active_cols: usize) -> Result<Rational> {
        loop {
            // reduced costs d_j = c_j - c_B . T_j
            let mut entering = None;
            for j in 0..active_cols {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut zj = Rational::zero();
                for (i, &bi) in self.basis.iter().enumerate() {
                    if !cost[bi].is_zero() {
                        zj += &cost[bi] * &self.rows[i][j];
                    }
                }
                if cost[j].clone() - zj < Rational::zero() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else {
                let mut val = Rational::zero();
                for (i, &bi) in self.basis.iter().enumerate() {
                    val += &cost[bi] * &self.rhs[i];
                }
                return Ok(val);
            };
            // ratio test; Bland tie-break on the smallest basic variable index
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][col].is_positive() {
                    let ratio = &self.rhs[i] / &self.rows[i][col];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((row, _)) = leave else {
                return Err(Error::Infeasible("linear program is unbounded".into()));
            };
            self.pivot(row, col);
        }
    }
}

pub fn solve(lp: &Lp) -> Result<LpSolution> {
    let n = lp.num_vars;
    let m = lp.constraints.len();
    // normalized dense rows with rhs >= 0
    let mut dense: Vec<(Vec<Rational>, Rel, Rational)> = Vec::with_capacity(m);
    for c in &lp.constraints {
        let mut row = vec![Rational::zero(); n];
        for (j, v) in &c.terms {
            if *j >= n {
                return Err(Error::Domain(format!("variable index {} out of range", j)));
            }
            row[*j] += v;
        }
        let (row, rel, rhs) = if c.rhs.is_negative() {
            let flipped = match c.rel {
                Rel::Le => Rel::Ge,
                Rel::Ge => Rel::Le,
                Rel::Eq => Rel::Eq,
            };
            (
                row.into_iter().map(|v| -v).collect::<Vec<_>>(),
                flipped,
                -c.rhs.clone(),
            )
        } else {
            (row, c.rel, c.rhs.clone())
        };
        dense.push((row, rel, rhs));
    }

    let num_slack = dense
        .iter()
        .filter(|(_, rel, _)| matches!(rel, Rel::Le | Rel::Ge))
        .count();
    let num_artificial = dense
        .iter()
        .filter(|(_, rel, _)| matches!(rel, Rel::Eq | Rel::Ge))
        .count();
    let total = n + num_slack + num_artificial;

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_slack = n;
    let mut next_art = n + num_slack;
    for (row, rel, b) in dense {
        let mut full = vec![Rational::zero(); total];
        full[..n].clone_from_slice(&row);
        match rel {
            Rel::Le => {
                full[next_slack] = Rational::one();
                basis.push(next_slack);
                next_slack += 1;
            }
            Rel::Ge => {
                full[next_slack] = -Rational::one();
                next_slack += 1;
                full[next_art] = Rational::one();
                basis.push(next_art);
                next_art += 1;
            }
            Rel::Eq => {
                full[next_art] = Rational::one();
                basis.push(next_art);
                next_art += 1;
            }
        }
        rows.push(full);
        rhs.push(b);
    }

    let mut t = Tableau {
        rows,
        rhs,
        basis,
        ncols: total,
    };

    if num_artificial > 0 {
        let mut phase1 = vec![Rational::zero(); total];
        for c in phase1.iter_mut().skip(n + num_slack) {
            *c = Rational::one();
        }
        let v = t.optimize(&phase1, total)?;
        if !v.is_zero() {
            return Err(Error::Infeasible(
                "no feasible decomposition exists".into(),
            ));
        }
        // drive remaining artificials out of the basis
        for i in 0..t.basis.len() {
            if t.basis[i] >= n + num_slack {
                if let Some(col) = (0..n + num_slack).find(|&j| !t.rows[i][j].is_zero()) {
                    t.pivot(i, col);
                }
            }
        }
        // rows still basic in an artificial are identically zero; blank
        // the artificial columns so they can never re-enter
        for row in t.rows.iter_mut() {
            for v in row.iter_mut().skip(n + num_slack) {
                *v = Rational::zero();
            }
        }
    }

    let mut cost = vec![Rational::zero(); total];
    cost[..n].clone_from_slice(&lp.objective);
    let value = t.optimize(&cost, n + num_slack)?;

    let mut x = vec![Rational::zero(); n];
    for (i, &bi) in t.basis.iter().enumerate() {
        if bi < n {
            x[bi] = t.rhs[i].clone();
        }
    }
    Ok(LpSolution { value, x })
}
