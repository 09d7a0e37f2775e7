//! Independent ground-truth solvers.
//!
//! Source-problem oracles enumerate solutions directly; inversion oracles
//! work on the compiled network only. Exhaustive oracles are deterministic:
//! witnesses follow the lexicographic rule regardless of parallelism.

mod binary;
mod falsify;
mod lp;
mod patterns;
mod source;
mod verdict;

pub use binary::{invert_binary_bruteforce, invert_binary_naive};
pub use falsify::{falsify_real, FalsifyOptions};
pub use lp::{lp_feasible, lp_minimize, Constraint, LinearProgram, LpOutcome, Relation};
pub use patterns::{enumerate_patterns_invert, ActivationPattern, AffineExpr, Region};
pub use source::{
    solve_cvp01_bruteforce, solve_halfclique_bruteforce, solve_sat_bruteforce,
    solve_vertexcover_bruteforce,
};
pub use verdict::{Certificate, Decision, OracleConfig, Stats, Verdict, CAP_ENV};

use crate::{Error, Result};

fn check_cap(what: &'static str, size: usize, cap: usize) -> Result<()> {
    if size > cap {
        return Err(Error::CapExceeded { what, size, cap });
    }
    Ok(())
}

/// Index of latent `bits` in lexicographic order when coordinate `i` is bit
/// `n − 1 − i` of the index.
pub(crate) fn lex_bit(index: u64, n: usize, i: usize) -> bool {
    (index >> (n - 1 - i)) & 1 == 1
}
