//! Exhaustive inversion over `{−1,1}^N` and `{0,1}^N`.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use super::verdict::{Certificate, Decision, OracleConfig, Stats, Verdict};
use super::{check_cap, lex_bit};
use crate::net::{i128_budget, IntegerNetwork};
use crate::reductions::{Comparison, InversionQuery};
use crate::scalar::{self, lcm_of_denominators, Scalar};
use crate::{Error, Result};

const CHUNKS: u64 = 256;

fn binary_domain(q: &InversionQuery, cfg: &OracleConfig) -> Result<(usize, i64, i64)> {
    let Some((lo, hi)) = q.domain().binary_values() else {
        return Err(Error::Unsupported(
            "brute-force inversion needs a binary latent domain".into(),
        ));
    };
    let n = q.domain().dim();
    check_cap("binary latent dimension", n, cfg.binary_cap.min(62))?;
    Ok((n, lo, hi))
}

fn latent(index: u64, n: usize, lo: i64, hi: i64) -> Vec<Scalar> {
    (0..n)
        .map(|i| scalar::int(if lex_bit(index, n, i) { hi } else { lo }))
        .collect()
}

/// Integer form of the distance computation: `dist^p · K` is computed exactly
/// in `i128`, where `K = (S·D)^p` for output scale `S` and target denominator
/// `D`.
struct FastDistance {
    net: IntegerNetwork,
    target: Vec<i128>,
    den: i128,
    p: u32,
}

impl FastDistance {
    fn new(q: &InversionQuery) -> Option<(Self, BigInt)> {
        let one = BigInt::from(1);
        let net = IntegerNetwork::compile(q.network(), &one, &one)?;
        let den = lcm_of_denominators(q.target());
        let lin = net.out_scale() * &den;
        let target: Vec<BigInt> = q
            .target()
            .iter()
            .map(|x| (x * Scalar::from_integer(lin.clone())).to_integer())
            .collect();
        let max_target = target.iter().map(|t| t.abs()).max().unwrap_or_default();
        let diff_bound = net.out_bound() * &den + max_target;
        if diff_bound.pow(q.p()) * BigInt::from(target.len().max(1)) >= i128_budget() {
            return None;
        }
        let fast = FastDistance {
            target: target.iter().map(|t| t.to_i128()).collect::<Option<_>>()?,
            den: den.to_i128()?,
            p: q.p(),
            net,
        };
        Some((fast, lin.pow(q.p())))
    }

    /// `(min scaled distance, lex-first minimizer)` over `range`.
    fn scan(&self, range: std::ops::Range<u64>, n: usize, lo: i128, hi: i128) -> (i128, u64) {
        let mut buf = self.net.buffers();
        let mut z = vec![0i128; n];
        let mut best = (i128::MAX, u64::MAX);
        for idx in range {
            for (i, zi) in z.iter_mut().enumerate() {
                *zi = if lex_bit(idx, n, i) { hi } else { lo };
            }
            let y = self.net.eval(&z, &mut buf);
            let mut d = 0i128;
            for (v, t) in y.iter().zip(&self.target) {
                d += (v * self.den - t).abs().pow(self.p);
            }
            if d < best.0 {
                best = (d, idx);
            }
        }
        best
    }
}

/// Enumerates every latent of the binary domain. YES iff the minimum
/// `dist^p` meets the threshold; the witness is the lexicographically
/// smallest minimizer (`−1 < 1`, `0 < 1`).
pub fn invert_binary_bruteforce(q: &InversionQuery, cfg: &OracleConfig) -> Result<Verdict> {
    let (n, lo, hi) = binary_domain(q, cfg)?;
    let total = 1u64 << n;
    let chunk = total.div_ceil(CHUNKS).max(1);
    let ranges: Vec<_> = (0..total)
        .step_by(chunk as usize)
        .map(|s| s..(s + chunk).min(total))
        .collect();
    let merge = |a: (Scalar, u64), b: (Scalar, u64)| if b < a { b } else { a };

    let (best, idx) = match FastDistance::new(q) {
        Some((fast, k)) => {
            let scan = |r: std::ops::Range<u64>| fast.scan(r, n, lo as i128, hi as i128);
            let found: Vec<(i128, u64)> = if cfg.parallel {
                ranges.into_par_iter().map(scan).collect()
            } else {
                ranges.into_iter().map(scan).collect()
            };
            let (d, idx) = found.into_iter().min().expect("nonempty domain");
            (Scalar::new(BigInt::from(d), k), idx)
        }
        None => {
            let scan = |r: std::ops::Range<u64>| -> Result<(Scalar, u64)> {
                let mut best: Option<(Scalar, u64)> = None;
                for idx in r {
                    let d = q.distance_pow_at(&latent(idx, n, lo, hi))?.into_value();
                    best = Some(match best {
                        Some(b) => merge(b, (d, idx)),
                        None => (d, idx),
                    });
                }
                Ok(best.expect("nonempty range"))
            };
            let found: Vec<(Scalar, u64)> = if cfg.parallel {
                ranges.into_par_iter().map(scan).collect::<Result<_>>()?
            } else {
                ranges.into_iter().map(scan).collect::<Result<_>>()?
            };
            found.into_iter().reduce(merge).expect("nonempty domain")
        }
    };
    let yes = q.accepts_distance(&best);
    let witness = if yes {
        let z = latent(idx, n, lo, hi);
        debug_assert!(q.accepts(&z)?);
        Some(z)
    } else {
        None
    };
    Ok(Verdict {
        decision: Decision::from_bool(yes),
        witness,
        certificate: Certificate::Exhaustive,
        stats: Stats {
            latents: total,
            ..Stats::default()
        },
        best: Some(best),
    })
}

/// Straightforward reference implementation: odometer over the domain with
/// exact forward evaluation at every latent. Used to cross-check the fast
/// oracle.
pub fn invert_binary_naive(q: &InversionQuery) -> Result<Verdict> {
    let Some((lo, hi)) = q.domain().binary_values() else {
        return Err(Error::Unsupported("binary latent domain required".into()));
    };
    let n = q.domain().dim();
    let (lo, hi) = (scalar::int(lo), scalar::int(hi));
    let mut z = vec![lo.clone(); n];
    let mut best: Option<(Scalar, Vec<Scalar>)> = None;
    let mut count = 0u64;
    loop {
        count += 1;
        let d = q.distance_pow_at(&z)?.into_value();
        if best.as_ref().is_none_or(|(b, _)| d < *b) {
            best = Some((d, z.clone()));
        }
        // odometer with the last coordinate fastest
        let mut i = n;
        loop {
            if i == 0 {
                let (d, w) = best.expect("at least one latent");
                let yes = match q.comparison() {
                    Comparison::NonStrict => d <= *q.threshold_pow(),
                    Comparison::Strict => d < *q.threshold_pow(),
                };
                return Ok(Verdict {
                    decision: Decision::from_bool(yes),
                    witness: yes.then_some(w),
                    certificate: Certificate::Exhaustive,
                    stats: Stats {
                        latents: count,
                        ..Stats::default()
                    },
                    best: Some(d),
                });
            }
            i -= 1;
            if z[i] == lo {
                z[i] = hi.clone();
                break;
            }
            z[i] = lo.clone();
        }
    }
}
