//! Deterministic random instance generators. Every generator is a pure
//! function of its arguments, seed included.

use num_bigint::BigInt;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CnfFormula, CvpInstance, Literal, WeightedGraph};
use crate::net::{Layer, ReluNetwork};
use crate::scalar::{self, int, ratio, Scalar};
use crate::{Error, Result};

/// Rationals `num/den` in `[lo, hi]` with `den` uniform in `1..=max_den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RationalRange {
    pub lo: i64,
    pub hi: i64,
    pub max_den: i64,
}

impl RationalRange {
    pub fn new(lo: i64, hi: i64, max_den: i64) -> Self {
        RationalRange { lo, hi, max_den }
    }

    pub fn integers(lo: i64, hi: i64) -> Self {
        RationalRange::new(lo, hi, 1)
    }

    fn validate(&self) -> Result<()> {
        if self.lo > self.hi || self.max_den < 1 {
            return Err(Error::Invalid(format!("empty rational range {self:?}")));
        }
        Ok(())
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Scalar {
        let den = rng.gen_range(1..=self.max_den);
        let num = rng.gen_range(self.lo * den..=self.hi * den);
        ratio(num, den)
    }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `m` clauses, each on `k` distinct variables with uniform polarities.
/// Literals inside a clause are sorted by variable.
pub fn gen_random_ksat(n: usize, m: usize, k: usize, seed: u64) -> Result<CnfFormula> {
    if k == 0 || k > n {
        return Err(Error::Invalid(format!(
            "clause width {k} must lie in 1..={n}"
        )));
    }
    let mut rng = rng_for(seed);
    let clauses = (0..m)
        .map(|_| {
            let mut vars = sample(&mut rng, n, k).into_vec();
            vars.sort_unstable();
            vars.into_iter()
                .map(|v| Literal::new(v + 1, rng.gen_bool(0.5)))
                .collect()
        })
        .collect();
    CnfFormula::new(n, k, clauses)
}

/// Each pair `i < j` becomes an edge independently with probability
/// `edge_prob`; root-weights are drawn from `weights`, resampling nonpositive
/// draws.
pub fn gen_random_graph(
    n: usize,
    edge_prob: f64,
    weights: RationalRange,
    seed: u64,
) -> Result<WeightedGraph> {
    weights.validate()?;
    if weights.hi <= 0 {
        return Err(Error::Invalid(
            "root-weight range has no positive values".into(),
        ));
    }
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::Invalid(format!(
            "edge probability {edge_prob} not in [0, 1]"
        )));
    }
    let mut rng = rng_for(seed);
    let mut g = WeightedGraph::new(n)?;
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(edge_prob) {
                let w = loop {
                    let w = weights.sample(&mut rng);
                    if w > int(0) {
                        break w;
                    }
                };
                g.add_edge(i, j, w)?;
            }
        }
    }
    Ok(g)
}

/// Basis and target entries from `entries`. The radius is the distance of a
/// random `{0,1}` combination scaled by a jitter factor in `[3/4, 5/4]` and
/// rounded to a multiple of `1/8`, so both YES and NO instances occur.
pub fn gen_random_cvp(
    n: usize,
    d: usize,
    p: u32,
    entries: RationalRange,
    seed: u64,
) -> Result<CvpInstance> {
    entries.validate()?;
    let mut rng = rng_for(seed);
    let basis: Vec<Vec<Scalar>> = (0..d)
        .map(|_| (0..n).map(|_| entries.sample(&mut rng)).collect())
        .collect();
    let target: Vec<Scalar> = (0..d).map(|_| entries.sample(&mut rng)).collect();
    let probe = CvpInstance::new(basis, target, int(0), p, None)?;
    let y: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    let dist = scalar::to_f64(&probe.residual_pow(&y)).powf(1.0 / p as f64);
    let jitter = rng.gen_range(0.75..=1.25);
    let radius = ratio((dist * jitter * 8.0).round() as i64, 8);
    probe.with_radius(radius)
}

/// An instance whose minimum distance is exactly its radius `r = 1/2`:
/// integer basis, `t = B y0 + e_1/2` for a random `y0`. Every lattice point
/// differs from `t` by at least `1/2` in the first coordinate.
pub fn gen_boundary_cvp(
    n: usize,
    d: usize,
    p: u32,
    entries: RationalRange,
    seed: u64,
) -> Result<CvpInstance> {
    entries.validate()?;
    let int_entries = RationalRange::integers(entries.lo, entries.hi);
    let mut rng = rng_for(seed);
    let basis: Vec<Vec<Scalar>> = (0..d)
        .map(|_| (0..n).map(|_| int_entries.sample(&mut rng)).collect())
        .collect();
    let y0: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    let target = basis
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let dot = row
                .iter()
                .zip(&y0)
                .filter(|(_, &b)| b)
                .fold(Scalar::from_integer(BigInt::from(0)), |s, (v, _)| s + v);
            if i == 0 {
                dot + ratio(sign, 2)
            } else {
                dot
            }
        })
        .collect();
    CvpInstance::new(basis, target, ratio(1, 2), p, None)
}

/// A network with `depth` layers of widths uniform in `1..=max_width` and
/// entries drawn from `entries`.
pub fn gen_random_network(
    input_dim: usize,
    depth: usize,
    max_width: usize,
    entries: RationalRange,
    seed: u64,
) -> Result<ReluNetwork> {
    entries.validate()?;
    if depth == 0 || max_width == 0 {
        return Err(Error::Invalid(
            "random network needs depth and width >= 1".into(),
        ));
    }
    let mut rng = rng_for(seed);
    let mut cols = input_dim;
    let mut layers = Vec::with_capacity(depth);
    for _ in 0..depth {
        let rows = rng.gen_range(1..=max_width);
        let weights = (0..rows)
            .map(|_| (0..cols).map(|_| entries.sample(&mut rng)).collect())
            .collect();
        let bias = (0..rows).map(|_| entries.sample(&mut rng)).collect();
        layers.push(Layer::new(cols, weights, bias)?);
        cols = rows;
    }
    ReluNetwork::new(input_dim, layers)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_given_seed() {
        assert_eq!(
            gen_random_ksat(6, 10, 3, 7).unwrap(),
            gen_random_ksat(6, 10, 3, 7).unwrap()
        );
        let r = RationalRange::new(1, 3, 4);
        assert_eq!(
            gen_random_graph(6, 0.5, r, 3).unwrap(),
            gen_random_graph(6, 0.5, r, 3).unwrap()
        );
        let e = RationalRange::new(-2, 2, 8);
        assert_eq!(
            gen_random_cvp(3, 2, 1, e, 11).unwrap(),
            gen_random_cvp(3, 2, 1, e, 11).unwrap()
        );
    }

    #[test]
    fn ksat_clauses_have_distinct_vars() {
        for seed in 0..50 {
            let f = gen_random_ksat(3, 2, 2, seed).unwrap();
            assert_eq!(f.num_clauses(), 2);
            for c in f.clauses() {
                assert_eq!(c.len(), 2);
                assert_ne!(c[0].var(), c[1].var());
            }
        }
        assert!(gen_random_ksat(2, 1, 3, 0).is_err());
    }

    #[test]
    fn graph_weights_positive() {
        let g = gen_random_graph(8, 0.7, RationalRange::new(0, 2, 3), 5).unwrap();
        assert!(g.edges().all(|(_, _, w)| *w > int(0)));
        assert!(gen_random_graph(4, 1.5, RationalRange::integers(1, 1), 0).is_err());
    }

    #[test]
    fn boundary_instance_distance() {
        let c = gen_boundary_cvp(3, 2, 3, RationalRange::integers(-2, 2), 9).unwrap();
        assert_eq!(c.radius(), &ratio(1, 2));
        let min = (0..8u32)
            .map(|m| c.residual_pow(&[(m & 4) != 0, (m & 2) != 0, (m & 1) != 0]))
            .min()
            .unwrap();
        assert_eq!(min, ratio(1, 8));
    }
}
