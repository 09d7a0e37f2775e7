//! Heuristic search for accepting real latents.
//!
//! Multi-start coordinate descent in `f64`. Candidates near the threshold
//! are rationalized and checked exactly, so a YES is always sound; a NO
//! certifies nothing.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::lex_bit;
use super::verdict::{Certificate, Decision, Stats, Verdict};
use crate::reductions::{InversionQuery, LatentDomain};
use crate::scalar::{self, Scalar};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct FalsifyOptions {
    /// Number of starting points, binary corners included.
    pub restarts: usize,
    pub seed: u64,
    /// `(low, high)` coordinate pairs whose corners are tried first.
    pub corners: Vec<(Scalar, Scalar)>,
    /// Descent rounds per start; the step halves every round.
    pub rounds: usize,
}

impl Default for FalsifyOptions {
    fn default() -> Self {
        FalsifyOptions {
            restarts: 1000,
            seed: 0,
            corners: vec![
                (scalar::int(0), scalar::int(1)),
                (scalar::int(-1), scalar::int(1)),
            ],
            rounds: 6,
        }
    }
}

impl FalsifyOptions {
    pub fn with_restarts(restarts: usize, seed: u64) -> Self {
        FalsifyOptions {
            restarts,
            seed,
            ..Default::default()
        }
    }
}

struct SparseLayer {
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    bias: Vec<f64>,
}

/// Allocation-free `f64` evaluator for the inner loop.
struct Evaluator {
    layers: Vec<SparseLayer>,
    target: Vec<f64>,
    p: i32,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Evaluator {
    fn new(q: &InversionQuery) -> Self {
        let net = q.network();
        let layers: Vec<SparseLayer> = net
            .layers()
            .iter()
            .map(|l| {
                let mut sl = SparseLayer {
                    row_start: vec![0],
                    cols: Vec::new(),
                    vals: Vec::new(),
                    bias: l.bias().iter().map(scalar::to_f64).collect(),
                };
                for row in l.weights() {
                    for (c, w) in row.iter().enumerate() {
                        if !w.is_zero() {
                            sl.cols.push(c);
                            sl.vals.push(scalar::to_f64(w));
                        }
                    }
                    sl.row_start.push(sl.cols.len());
                }
                sl
            })
            .collect();
        let width = net.width().max(net.input_dim());
        Evaluator {
            layers,
            target: q.target().iter().map(scalar::to_f64).collect(),
            p: q.p() as i32,
            a: vec![0.0; width],
            b: vec![0.0; width],
        }
    }

    fn distance(&mut self, z: &[f64]) -> f64 {
        let (mut cur, mut next) = (&mut self.a, &mut self.b);
        cur[..z.len()].copy_from_slice(z);
        let mut len = z.len();
        for l in &self.layers {
            for (r, out) in next[..l.bias.len()].iter_mut().enumerate() {
                let span = l.row_start[r]..l.row_start[r + 1];
                let mut acc = l.bias[r];
                for (c, v) in l.cols[span.clone()].iter().zip(&l.vals[span]) {
                    acc += v * cur[*c];
                }
                *out = acc.max(0.0);
            }
            std::mem::swap(&mut cur, &mut next);
            len = l.bias.len();
        }
        cur[..len]
            .iter()
            .zip(&self.target)
            .map(|(y, x)| (y - x).abs().powi(self.p))
            .sum()
    }
}

const DENOMINATORS: [u64; 8] = [1, 2, 4, 8, 64, 1024, 1 << 20, 1 << 40];

/// Exact check of a float point: rounded to a few denominators, then the
/// exact dyadic value itself.
fn verify(q: &InversionQuery, z: &[f64]) -> Result<Option<Vec<Scalar>>> {
    for den in DENOMINATORS {
        let cand: Option<Vec<Scalar>> = z.iter().map(|&v| scalar::rationalize(v, den)).collect();
        if let Some(c) = cand {
            if q.accepts(&c)? {
                return Ok(Some(c));
            }
        }
    }
    let exact: Option<Vec<Scalar>> = z.iter().map(|&v| scalar::from_f64_exact(v)).collect();
    match exact {
        Some(c) if q.accepts(&c)? => Ok(Some(c)),
        _ => Ok(None),
    }
}

/// Searches for an accepting latent of a real-domain query. `restarts = 0`
/// performs no search.
pub fn falsify_real(q: &InversionQuery, opts: &FalsifyOptions) -> Result<Verdict> {
    let LatentDomain::Real(n) = q.domain() else {
        return Err(Error::Unsupported(
            "the falsifier searches real latent domains".into(),
        ));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut eval = Evaluator::new(q);
    let theta = scalar::to_f64(q.threshold_pow());
    let slack = 1e-9 * theta.max(1.0);
    let corners: Vec<(f64, f64)> = opts
        .corners
        .iter()
        .map(|(lo, hi)| (scalar::to_f64(lo), scalar::to_f64(hi)))
        .collect();
    let (lo, hi) = corners
        .iter()
        .fold((-1.0f64, 1.0f64), |(a, b), &(l, h)| (a.min(l), b.max(h)));
    let span = hi - lo;
    let corner_count = if n < 63 {
        corners.len() as u128 * (1u128 << n)
    } else {
        u128::MAX
    };
    let enumerate_corners = corner_count <= opts.restarts as u128;

    let mut z = vec![0.0; n];
    let mut stats = Stats::default();
    for start in 0..opts.restarts {
        stats.latents += 1;
        if enumerate_corners && (start as u128) < corner_count {
            let (cl, ch) = corners[start >> n];
            let idx = (start & ((1usize << n) - 1)) as u64;
            for (i, zi) in z.iter_mut().enumerate() {
                *zi = if lex_bit(idx, n, i) { ch } else { cl };
            }
        } else if !corners.is_empty() && start < opts.restarts / 4 {
            let (cl, ch) = corners[rng.gen_range(0..corners.len())];
            for zi in z.iter_mut() {
                *zi = if rng.gen_bool(0.5) { ch } else { cl };
            }
        } else {
            for zi in z.iter_mut() {
                *zi = rng.gen_range(lo - 0.25 * span..=hi + 0.25 * span);
            }
        }
        let mut f = eval.distance(&z);
        let mut step = span / 4.0;
        for _ in 0..opts.rounds {
            if f <= theta {
                break;
            }
            for i in 0..n {
                let keep = z[i];
                for delta in [step, -step] {
                    z[i] = keep + delta;
                    let g = eval.distance(&z);
                    if g < f {
                        f = g;
                        break;
                    }
                    z[i] = keep;
                }
            }
            step /= 2.0;
        }
        if f <= theta + slack {
            if let Some(w) = verify(q, &z)? {
                let best = q.distance_pow_at(&w)?.into_value();
                return Ok(Verdict {
                    decision: Decision::Yes,
                    witness: Some(w),
                    certificate: Certificate::FalsifierOnly,
                    stats,
                    best: Some(best),
                });
            }
        }
    }
    Ok(Verdict {
        decision: Decision::No,
        witness: None,
        certificate: Certificate::FalsifierOnly,
        stats,
        best: None,
    })
}
