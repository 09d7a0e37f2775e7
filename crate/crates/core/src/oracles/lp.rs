//! Exact two-phase simplex over the rationals with Bland's rule.
//!
//! All variables are free; the solver splits each into a nonnegative pair.

use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Scalar>,
    pub relation: Relation,
    pub rhs: Scalar,
}

impl Constraint {
    pub fn new(coeffs: Vec<Scalar>, relation: Relation, rhs: Scalar) -> Self {
        Constraint {
            coeffs,
            relation,
            rhs,
        }
    }

    pub fn holds_at(&self, point: &[Scalar]) -> bool {
        let lhs = self
            .coeffs
            .iter()
            .zip(point)
            .filter(|(a, _)| !a.is_zero())
            .fold(Scalar::zero(), |acc, (a, x)| acc + a * x);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearProgram {
    num_vars: usize,
    constraints: Vec<Constraint>,
    objective: Option<Vec<Scalar>>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            constraints: Vec::new(),
            objective: None,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn add(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub fn push(&mut self, coeffs: Vec<Scalar>, relation: Relation, rhs: Scalar) {
        self.add(Constraint::new(coeffs, relation, rhs));
    }

    pub fn pop(&mut self) -> Option<Constraint> {
        self.constraints.pop()
    }

    pub fn set_objective(&mut self, objective: Vec<Scalar>) {
        self.objective = Some(objective);
    }

    pub fn objective(&self) -> Option<&[Scalar]> {
        self.objective.as_deref()
    }

    pub fn satisfied_by(&self, point: &[Scalar]) -> bool {
        point.len() == self.num_vars && self.constraints.iter().all(|c| c.holds_at(point))
    }

    fn validate(&self) -> Result<()> {
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != self.num_vars {
                return Err(Error::MalformedLp(format!(
                    "constraint {i} has {} coefficients, expected {}",
                    c.coeffs.len(),
                    self.num_vars
                )));
            }
        }
        if let Some(obj) = &self.objective {
            if obj.len() != self.num_vars {
                return Err(Error::MalformedLp(format!(
                    "objective has {} coefficients, expected {}",
                    obj.len(),
                    self.num_vars
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { point: Vec<Scalar>, value: Scalar },
}

/// Dense tableau `rows · cols` with the right-hand side in the last column.
struct Tableau {
    rows: Vec<Vec<Scalar>>,
    basis: Vec<usize>,
    cols: usize,
    pivots: u64,
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Scalar {
        &self.rows[r][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        self.pivots += 1;
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Minimizes `cost · x` over the allowed columns. Returns `false` when
    /// the objective is unbounded below.
    fn minimize(&mut self, cost: &[Scalar], allowed: &[bool]) -> bool {
        let m = self.rows.len();
        loop {
            let mut in_basis = vec![false; self.cols];
            for &b in &self.basis {
                in_basis[b] = true;
            }
            let entering = (0..self.cols).find(|&j| {
                if !allowed[j] || in_basis[j] {
                    return false;
                }
                let reduced = (0..m).fold(cost[j].clone(), |acc, i| {
                    let a = &self.rows[i][j];
                    if a.is_zero() || cost[self.basis[i]].is_zero() {
                        acc
                    } else {
                        acc - &cost[self.basis[i]] * a
                    }
                });
                reduced.is_negative()
            });
            let Some(j) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Scalar)> = None;
            for i in 0..m {
                let a = &self.rows[i][j];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
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
            match leave {
                Some((i, _)) => self.pivot(i, j),
                None => return false,
            }
        }
    }

    fn value_of(&self, col: usize) -> Scalar {
        self.basis
            .iter()
            .position(|&b| b == col)
            .map_or_else(Scalar::zero, |r| self.rhs(r).clone())
    }
}

struct Solved {
    outcome: LpOutcome,
    pivots: u64,
}

fn solve(lp: &LinearProgram, objective: Option<&[Scalar]>) -> Result<Solved> {
    lp.validate()?;
    let n = lp.num_vars;
    let m = lp.constraints.len();
    // columns: x⁺ (n), x⁻ (n), one slack per inequality, one artificial per row
    let slack_count = lp
        .constraints
        .iter()
        .filter(|c| c.relation != Relation::Eq)
        .count();
    let art_start = 2 * n + slack_count;
    let cols = art_start + m;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut slack = 2 * n;
    for (i, c) in lp.constraints.iter().enumerate() {
        let mut row = vec![Scalar::zero(); cols + 1];
        for (j, a) in c.coeffs.iter().enumerate() {
            if !a.is_zero() {
                row[j] = a.clone();
                row[n + j] = -a.clone();
            }
        }
        match c.relation {
            Relation::Le => {
                row[slack] = Scalar::one();
                slack += 1;
            }
            Relation::Ge => {
                row[slack] = -Scalar::one();
                slack += 1;
            }
            Relation::Eq => {}
        }
        row[cols] = c.rhs.clone();
        if row[cols].is_negative() {
            for v in row.iter_mut() {
                *v = -std::mem::take(v);
            }
        }
        row[art_start + i] = Scalar::one();
        rows.push(row);
        basis.push(art_start + i);
    }
    let mut t = Tableau {
        rows,
        basis,
        cols,
        pivots: 0,
    };

    let phase1: Vec<Scalar> = (0..cols)
        .map(|j| {
            if j >= art_start {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        })
        .collect();
    let all = vec![true; cols];
    t.minimize(&phase1, &all);
    let infeasible = t
        .basis
        .iter()
        .enumerate()
        .any(|(r, &b)| b >= art_start && !t.rhs(r).is_zero());
    if infeasible {
        return Ok(Solved {
            outcome: LpOutcome::Infeasible,
            pivots: t.pivots,
        });
    }
    // drive zero-valued artificials out of the basis; rows with no
    // replacement are redundant and dropped
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= art_start {
            match (0..art_start).find(|&j| !t.rows[r][j].is_zero()) {
                Some(j) => t.pivot(r, j),
                None => {
                    t.rows.remove(r);
                    t.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }
    let allowed: Vec<bool> = (0..cols).map(|j| j < art_start).collect();
    let mut value = Scalar::zero();
    if let Some(obj) = objective {
        let cost: Vec<Scalar> = (0..cols)
            .map(|j| match j {
                j if j < n => obj[j].clone(),
                j if j < 2 * n => -obj[j - n].clone(),
                _ => Scalar::zero(),
            })
            .collect();
        if !t.minimize(&cost, &allowed) {
            return Ok(Solved {
                outcome: LpOutcome::Unbounded,
                pivots: t.pivots,
            });
        }
        value = t
            .basis
            .iter()
            .enumerate()
            .fold(Scalar::zero(), |acc, (r, &b)| acc + &cost[b] * t.rhs(r));
    }
    let point: Vec<Scalar> = (0..n).map(|j| t.value_of(j) - t.value_of(n + j)).collect();
    debug_assert!(lp.satisfied_by(&point));
    Ok(Solved {
        outcome: LpOutcome::Optimal { point, value },
        pivots: t.pivots,
    })
}

/// A point satisfying every constraint, or `None` when the system is
/// infeasible. The second component counts simplex pivots.
pub fn lp_feasible(lp: &LinearProgram) -> Result<(Option<Vec<Scalar>>, u64)> {
    let s = solve(lp, None)?;
    let point = match s.outcome {
        LpOutcome::Optimal { point, .. } => Some(point),
        _ => None,
    };
    Ok((point, s.pivots))
}

/// Minimizes the objective (zero when none is set). The second component
/// counts simplex pivots.
pub fn lp_minimize(lp: &LinearProgram) -> Result<(LpOutcome, u64)> {
    let zero = vec![Scalar::zero(); lp.num_vars];
    let s = solve(lp, Some(lp.objective.as_deref().unwrap_or(&zero)))?;
    Ok((s.outcome, s.pivots))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    #[test]
    fn infeasible_box() {
        let mut lp = LinearProgram::new(1);
        lp.push(vec![int(1)], Relation::Ge, int(1));
        lp.push(vec![int(1)], Relation::Le, int(0));
        assert_eq!(lp_feasible(&lp).unwrap().0, None);
        assert_eq!(lp_minimize(&lp).unwrap().0, LpOutcome::Infeasible);
    }

    #[test]
    fn minimize_on_interval() {
        let mut lp = LinearProgram::new(1);
        lp.push(vec![int(1)], Relation::Ge, int(1));
        lp.push(vec![int(1)], Relation::Le, int(2));
        lp.set_objective(vec![int(1)]);
        assert_eq!(
            lp_minimize(&lp).unwrap().0,
            LpOutcome::Optimal {
                point: vec![int(1)],
                value: int(1)
            }
        );
    }

    #[test]
    fn unbounded_and_free_variables() {
        let mut lp = LinearProgram::new(1);
        lp.push(vec![int(1)], Relation::Le, int(-3));
        lp.set_objective(vec![int(-1)]);
        assert_eq!(
            lp_minimize(&lp).unwrap().0,
            LpOutcome::Optimal {
                point: vec![int(-3)],
                value: int(3)
            }
        );
        lp.set_objective(vec![int(1)]);
        assert_eq!(lp_minimize(&lp).unwrap().0, LpOutcome::Unbounded);
    }

    #[test]
    fn equalities_and_redundancy() {
        let mut lp = LinearProgram::new(2);
        lp.push(vec![int(1), int(1)], Relation::Eq, int(1));
        lp.push(vec![int(2), int(2)], Relation::Eq, int(2));
        lp.push(vec![int(1), int(-1)], Relation::Eq, ratio(1, 3));
        let p = lp_feasible(&lp).unwrap().0.unwrap();
        assert_eq!(p, vec![ratio(2, 3), ratio(1, 3)]);
    }

    #[test]
    fn malformed() {
        let mut lp = LinearProgram::new(2);
        lp.push(vec![int(1)], Relation::Eq, int(1));
        assert!(matches!(lp_feasible(&lp), Err(Error::MalformedLp(_))));
    }
}
