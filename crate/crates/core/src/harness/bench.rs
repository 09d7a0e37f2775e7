use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Family;
use crate::instances::{
    gen_random_cvp, gen_random_graph, gen_random_ksat, RationalRange, VertexCoverQuery,
};
use crate::oracles::{invert_binary_bruteforce, OracleConfig};
use crate::reductions::{
    cvp_to_approx_binary, sat_to_exact_binary, vertexcover_to_approx, ReduceOptions,
};
use crate::{Error, Result};

pub const BENCH_CSV_HEADER: &str = "family,n,trials,median_ms,states";

/// Clause count of benchmarked SAT formulas. Fixed so the cost per latent
/// does not depend on `n`.
pub const BENCH_SAT_CLAUSES: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchOptions {
    pub family: Family,
    pub n_from: usize,
    pub n_to: usize,
    pub trials: usize,
    pub seed: u64,
    pub oracle: OracleConfig,
}

impl BenchOptions {
    /// Timing runs are sequential so the medians are comparable across `n`.
    pub fn new(family: Family, n_from: usize, n_to: usize, trials: usize) -> Self {
        BenchOptions {
            family,
            n_from,
            n_to,
            trials,
            seed: 0,
            oracle: OracleConfig::default().sequential(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub family: Family,
    pub n: usize,
    pub trials: usize,
    pub median_ms: f64,
    /// Latent points enumerated by the inversion oracle per trial.
    pub states: u64,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

/// Times exhaustive inversion of freshly reduced instances for each source
/// size `n` in the range. SAT uses 3-CNF with [`BENCH_SAT_CLAUSES`] clauses.
pub fn cmd_bench(opts: &BenchOptions) -> Result<Vec<BenchRecord>> {
    if opts.trials == 0 || opts.n_from > opts.n_to {
        return Err(Error::Invalid(
            "bench needs trials > 0 and n_from <= n_to".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::new();
    for n in opts.n_from..=opts.n_to {
        let mut times = Vec::with_capacity(opts.trials);
        let mut states = 0;
        for _ in 0..opts.trials {
            let seed: u64 = rng.gen();
            let art = match opts.family {
                Family::Sat => {
                    sat_to_exact_binary(&gen_random_ksat(n, BENCH_SAT_CLAUSES, 3.min(n), seed)?)?
                }
                Family::Cvp => cvp_to_approx_binary(
                    &gen_random_cvp(n, 3, 1, RationalRange::new(-4, 4, 4), seed)?,
                    ReduceOptions::default(),
                )?,
                Family::Vertexcover => {
                    let g = gen_random_graph(n, 0.5, RationalRange::integers(1, 1), seed)?;
                    vertexcover_to_approx(
                        &VertexCoverQuery::new(g, n / 2)?,
                        1,
                        ReduceOptions::default(),
                    )?
                }
                other => {
                    return Err(Error::Unsupported(format!(
                        "bench covers sat, cvp and vertexcover, not {other}"
                    )))
                }
            };
            let start = Instant::now();
            let verdict = invert_binary_bruteforce(&art.query, &opts.oracle)?;
            times.push(start.elapsed().as_secs_f64() * 1e3);
            states = verdict.stats.latents;
        }
        out.push(BenchRecord {
            family: opts.family,
            n,
            trials: opts.trials,
            median_ms: median(times),
            states,
        });
    }
    Ok(out)
}

pub fn write_bench_csv<W: Write>(records: &[BenchRecord], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{BENCH_CSV_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{:.6},{}",
            r.family, r.n, r.trials, r.median_ms, r.states
        )?;
    }
    Ok(())
}

/// Ordinary least-squares slope of `y` against `x`; `None` for fewer than two
/// distinct `x` values.
pub fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
