//! Uniform-width CNF formulas and DIMACS I/O.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    var: usize,
    positive: bool,
}

impl Literal {
    /// `var` is 1-based.
    pub fn new(var: usize, positive: bool) -> Self {
        Literal { var, positive }
    }

    pub fn from_dimacs(lit: i64) -> Option<Self> {
        (lit != 0).then(|| Literal::new(lit.unsigned_abs() as usize, lit > 0))
    }

    pub fn to_dimacs(self) -> i64 {
        if self.positive {
            self.var as i64
        } else {
            -(self.var as i64)
        }
    }

    pub fn var(self) -> usize {
        self.var
    }

    pub fn is_positive(self) -> bool {
        self.positive
    }
}

/// A k-SAT formula: every clause mentions exactly `k` distinct variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    k: usize,
    clauses: Vec<Vec<Literal>>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, k: usize, clauses: Vec<Vec<Literal>>) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::Invalid("formula needs at least one variable".into()));
        }
        if k == 0 {
            return Err(Error::Invalid("clause width k must be at least 1".into()));
        }
        for (j, clause) in clauses.iter().enumerate() {
            if clause.len() != k {
                return Err(Error::Invalid(format!(
                    "clause {} has width {}, expected uniform width {k}",
                    j + 1,
                    clause.len()
                )));
            }
            let mut vars = BTreeSet::new();
            for lit in clause {
                if lit.var == 0 || lit.var > num_vars {
                    return Err(Error::Invalid(format!(
                        "clause {} mentions variable {} outside 1..={num_vars}",
                        j + 1,
                        lit.var
                    )));
                }
                if !vars.insert(lit.var) {
                    return Err(Error::Invalid(format!(
                        "clause {} repeats variable {}",
                        j + 1,
                        lit.var
                    )));
                }
            }
        }
        Ok(CnfFormula {
            num_vars,
            k,
            clauses,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// `assignment[i]` is the value of variable `i + 1`.
    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.num_vars
            && self
                .clauses
                .iter()
                .all(|c| c.iter().any(|lit| assignment[lit.var - 1] == lit.positive))
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause {
                let _ = write!(out, "{} ", lit.to_dimacs());
            }
            out.push_str("0\n");
        }
        out
    }
}

/// Strict DIMACS reader: clause width must be uniform, the clause count must
/// match the header, and empty clauses are rejected.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<Literal>> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut current_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::parse(line_no, "duplicate header"));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(Error::parse(
                    line_no,
                    "expected header `p cnf <vars> <clauses>`",
                ));
            }
            let n = parts[2]
                .parse()
                .map_err(|_| Error::parse(line_no, "bad variable count"))?;
            let m = parts[3]
                .parse()
                .map_err(|_| Error::parse(line_no, "bad clause count"))?;
            header = Some((n, m));
            continue;
        }
        let Some((n, _)) = header else {
            return Err(Error::parse(line_no, "clause before `p cnf` header"));
        };
        for tok in line.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad literal {tok:?}")))?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(Error::parse(line_no, "empty clause"));
                }
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            if lit.unsigned_abs() as usize > n {
                return Err(Error::parse(
                    line_no,
                    format!("literal {lit} out of range for {n} variables"),
                ));
            }
            if current.is_empty() {
                current_line = line_no;
            }
            current.push(Literal::from_dimacs(lit).expect("nonzero literal"));
        }
    }
    let Some((n, m)) = header else {
        return Err(Error::parse(0, "missing `p cnf` header"));
    };
    if !current.is_empty() {
        return Err(Error::parse(current_line, "clause not terminated by 0"));
    }
    if clauses.len() != m {
        return Err(Error::parse(
            0,
            format!("header declares {m} clauses, found {}", clauses.len()),
        ));
    }
    let k = clauses.iter().map(Vec::len).max().unwrap_or(1);
    CnfFormula::new(n, k, clauses)
}
