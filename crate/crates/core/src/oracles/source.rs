//! Brute force for the four source problems.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use super::verdict::{Certificate, Decision, OracleConfig, Stats, Verdict};
use super::{check_cap, lex_bit};
use crate::instances::{CnfFormula, CvpInstance, HalfCliqueQuery, VertexCoverQuery};
use crate::net::i128_budget;
use crate::scalar::{self, lcm_of_denominators, Scalar};
use crate::{Error, Result};

fn bits_to_scalars(index: u64, n: usize) -> Vec<Scalar> {
    (0..n)
        .map(|i| scalar::int(lex_bit(index, n, i) as i64))
        .collect()
}

fn verdict(found: Option<u64>, n: usize, examined: u64, best: Option<Scalar>) -> Verdict {
    Verdict {
        decision: Decision::from_bool(found.is_some()),
        witness: found.map(|idx| bits_to_scalars(idx, n)),
        certificate: Certificate::Exhaustive,
        stats: Stats {
            latents: examined,
            ..Stats::default()
        },
        best,
    }
}

/// Tries assignments in lexicographic order (`FALSE < TRUE`, variable 1
/// most significant) and stops at the first satisfying one.
pub fn solve_sat_bruteforce(f: &CnfFormula, cfg: &OracleConfig) -> Result<Verdict> {
    let n = f.num_vars();
    check_cap("sat variables", n, cfg.sat_cap.min(63))?;
    let masks: Vec<(u64, u64)> = f
        .clauses()
        .iter()
        .map(|c| {
            c.iter().fold((0u64, 0u64), |(pos, neg), lit| {
                let bit = 1u64 << (n - lit.var());
                if lit.is_positive() {
                    (pos | bit, neg)
                } else {
                    (pos, neg | bit)
                }
            })
        })
        .collect();
    let total = 1u64 << n;
    for a in 0..total {
        if masks
            .iter()
            .all(|&(pos, neg)| a & pos != 0 || !a & neg != 0)
        {
            return Ok(verdict(Some(a), n, a + 1, None));
        }
    }
    Ok(verdict(None, n, total, None))
}

/// Minimum of `‖By − t‖_p^p` over `y ∈ {0,1}^n` by a Gray-code walk on
/// integer-scaled data; YES iff the minimum is at most `r^p`. The witness is
/// the lexicographically smallest minimizer.
pub fn solve_cvp01_bruteforce(c: &CvpInstance, cfg: &OracleConfig) -> Result<Verdict> {
    let n = c.num_vectors();
    check_cap("cvp vectors", n, cfg.cvp_cap.min(63))?;
    let p = c.p();
    let scale = lcm_of_denominators(c.basis_rows().iter().flatten().chain(c.target()));
    let to_int = |v: &Scalar| (v * &scale).to_integer();
    let cols: Vec<Vec<BigInt>> = (0..n)
        .map(|j| (0..c.dim()).map(|r| to_int(c.entry(r, j))).collect())
        .collect();
    let start: Vec<BigInt> = c.target().iter().map(|t| -to_int(t)).collect();

    let bound: BigInt = (0..c.dim())
        .map(|r| cols.iter().map(|col| col[r].abs()).sum::<BigInt>() + start[r].abs())
        .max()
        .unwrap_or_default();
    let fits = bound.pow(p) * BigInt::from(c.dim()) < i128_budget();
    let (min, best_idx) = if fits {
        let cols: Vec<Vec<i128>> = cols
            .iter()
            .map(|col| col.iter().map(|v| v.to_i128().expect("bounded")).collect())
            .collect();
        let start: Vec<i128> = start
            .iter()
            .map(|v| v.to_i128().expect("bounded"))
            .collect();
        let (m, idx) = gray_walk(n, start, &cols, |r| {
            r.iter().map(|v| v.abs().pow(p)).sum::<i128>()
        });
        (BigInt::from(m), idx)
    } else {
        gray_walk(n, start, &cols, |r| {
            r.iter().map(|v| v.abs().pow(p)).sum::<BigInt>()
        })
    };
    let best = Scalar::new(min, scale.pow(p));
    let yes = best <= scalar::pow(c.radius(), p);
    Ok(verdict(yes.then_some(best_idx), n, 1u64 << n, Some(best)))
}

fn gray_walk<T, F>(n: usize, mut residual: Vec<T>, cols: &[Vec<T>], cost: F) -> (T, u64)
where
    T: Clone + Ord + for<'a> std::ops::AddAssign<&'a T> + for<'a> std::ops::SubAssign<&'a T>,
    F: Fn(&[T]) -> T,
{
    let mut code = 0u64;
    let mut best = (cost(&residual), 0u64);
    for step in 1..(1u64 << n) {
        let flip = step.trailing_zeros() as usize;
        // bit `flip` of the code is coordinate n − 1 − flip
        let col = &cols[n - 1 - flip];
        code ^= 1 << flip;
        if code & (1 << flip) != 0 {
            residual.iter_mut().zip(col).for_each(|(r, v)| *r += v);
        } else {
            residual.iter_mut().zip(col).for_each(|(r, v)| *r -= v);
        }
        let v = cost(&residual);
        if v < best.0 || (v == best.0 && code < best.1) {
            best = (v, code);
        }
    }
    best
}

fn adjacency(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> Vec<u64> {
    let mut adj = vec![0u64; n];
    for (i, j) in edges {
        adj[i] |= 1 << (n - 1 - j);
        adj[j] |= 1 << (n - 1 - i);
    }
    adj
}

/// Subsets of size `n/2` in lexicographic order; YES at the first clique of
/// total weight strictly below `M`.
pub fn solve_halfclique_bruteforce(
    q: &HalfCliqueQuery,
    p: u32,
    cfg: &OracleConfig,
) -> Result<Verdict> {
    let g = q.graph();
    let n = g.num_vertices();
    if !n.is_multiple_of(2) {
        return Err(Error::Invalid(
            "half-clique needs an even vertex count".into(),
        ));
    }
    check_cap("graph vertices", n, cfg.graph_cap.min(63))?;
    let adj = adjacency(n, g.edges().map(|(i, j, _)| (i, j)));
    let mut examined = 0;
    for mask in 0..1u64 << n {
        if mask.count_ones() as usize != n / 2 {
            continue;
        }
        examined += 1;
        let members: Vec<usize> = (0..n).filter(|&i| lex_bit(mask, n, i)).collect();
        let clique = members
            .iter()
            .all(|&i| (adj[i] | 1 << (n - 1 - i)) & mask == mask);
        if !clique {
            continue;
        }
        let w = g.clique_weight(&members, p);
        if w < *q.bound() {
            return Ok(verdict(Some(mask), n, examined, Some(w)));
        }
    }
    Ok(verdict(None, n, examined, None))
}

/// Subsets of size `q` in lexicographic order; YES at the first vertex cover.
/// The witness marks cover members with 1.
pub fn solve_vertexcover_bruteforce(q: &VertexCoverQuery, cfg: &OracleConfig) -> Result<Verdict> {
    let g = q.graph();
    let n = g.num_vertices();
    check_cap("graph vertices", n, cfg.graph_cap.min(63))?;
    let edges: Vec<u64> = g
        .edges()
        .map(|(i, j, _)| (1u64 << (n - 1 - i)) | (1u64 << (n - 1 - j)))
        .collect();
    let mut examined = 0;
    for mask in 0..1u64 << n {
        if mask.count_ones() as usize != q.size() {
            continue;
        }
        examined += 1;
        if edges.iter().all(|e| e & mask != 0) {
            return Ok(verdict(Some(mask), n, examined, None));
        }
    }
    Ok(verdict(None, n, examined, None))
}
