use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::instances::{
    gen_boundary_cvp, gen_random_cvp, gen_random_graph, gen_random_ksat, CnfFormula, CvpInstance,
    HalfCliqueQuery, Literal, RationalRange, VertexCoverQuery, WeightedGraph,
};
use crate::net::forward;
use crate::oracles::{
    enumerate_patterns_invert, falsify_real, invert_binary_bruteforce, solve_cvp01_bruteforce,
    solve_halfclique_bruteforce, solve_sat_bruteforce, solve_vertexcover_bruteforce, Certificate,
    Decision, FalsifyOptions, OracleConfig, Verdict,
};
use crate::reductions::{
    cvp_to_approx_binary, cvp_to_approx_real, halfclique_to_approx, halfclique_to_approx_real,
    sat_to_exact_binary, sat_to_exact_real, vertexcover_to_approx, LatentDomain, ReduceOptions,
    ReductionArtifact,
};
use crate::scalar::{self, Scalar};
use crate::{Error, Result};

/// A reduction paired with its source oracle and inversion oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// k-SAT, `{−1,1}` latents, exhaustive inversion.
    Sat,
    /// k-SAT, real latents, pattern enumeration.
    SatReal,
    /// (0,1)-CVP, `{0,1}` latents, exhaustive inversion.
    Cvp,
    /// (0,1)-CVP behind the binarization gadget.
    CvpReal,
    Halfclique,
    HalfcliqueReal,
    Vertexcover,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Sat,
        Family::SatReal,
        Family::Cvp,
        Family::CvpReal,
        Family::Halfclique,
        Family::HalfcliqueReal,
        Family::Vertexcover,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Sat => "sat",
            Family::SatReal => "sat-real",
            Family::Cvp => "cvp",
            Family::CvpReal => "cvp-real",
            Family::Halfclique => "halfclique",
            Family::HalfcliqueReal => "halfclique-real",
            Family::Vertexcover => "vertexcover",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown family {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub family: Family,
    pub n_max: usize,
    pub trials: usize,
    pub seed: u64,
    /// Norm exponent; when absent, CVP alternates 1 and 3, Half-Clique
    /// alternates 2 and 4, Vertex Cover uses 2.
    pub p: Option<u32>,
    /// Enumerate every instance up to the size bound instead of sampling.
    pub exhaustive: bool,
    /// Falsifier starts per real-latent approximate query.
    pub restarts: usize,
    pub oracle: OracleConfig,
    pub reduce: ReduceOptions,
}

impl VerifyOptions {
    pub fn new(family: Family, n_max: usize, trials: usize, seed: u64) -> Self {
        VerifyOptions {
            family,
            n_max,
            trials,
            seed,
            p: None,
            exhaustive: false,
            restarts: 1000,
            oracle: OracleConfig::default(),
            reduce: ReduceOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disagreement {
    /// Trial index; for sampled trials the instance seed is derived from it.
    pub trial: usize,
    pub seed: u64,
    pub source: Decision,
    pub inversion: Decision,
    pub reasons: Vec<String>,
    pub instance: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub family: Family,
    pub trials: usize,
    pub agreements: usize,
    pub disagreements: Vec<Disagreement>,
    pub yes_instances: usize,
    /// Injected instances whose optimum sits exactly on the threshold: CVP
    /// with minimum distance `r`, Half-Clique with `M` equal to the lightest
    /// half clique. The first are YES and the second NO on both sides.
    pub boundary_trials: usize,
    pub boundary_yes_both: usize,
    pub witness_checks: usize,
    pub constant_checks: usize,
    pub falsifier_only: usize,
    pub wall_ms: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty()
    }
}

#[derive(Clone, Debug)]
enum Instance {
    Sat(CnfFormula),
    Cvp(CvpInstance),
    HalfClique(HalfCliqueQuery, u32),
    VertexCover(VertexCoverQuery, u32),
}

impl Instance {
    fn text(&self) -> String {
        match self {
            Instance::Sat(f) => f.to_dimacs(),
            Instance::Cvp(c) => c.to_text(),
            Instance::HalfClique(q, p) => format!(
                "p={p}\n{}",
                crate::instances::GraphDocument {
                    graph: q.graph().clone(),
                    halfclique_bound: Some(q.bound().clone()),
                    cover_size: None,
                }
                .to_text()
            ),
            Instance::VertexCover(q, p) => format!(
                "p={p}\n{}",
                crate::instances::GraphDocument {
                    graph: q.graph().clone(),
                    halfclique_bound: None,
                    cover_size: Some(q.size()),
                }
                .to_text()
            ),
        }
    }
}

struct Trial {
    index: usize,
    seed: u64,
    instance: Instance,
    boundary: bool,
}

struct TrialOutcome {
    source: Decision,
    inversion: Decision,
    certificate: Certificate,
    reasons: Vec<String>,
    witness_checks: usize,
    constant_checks: usize,
}

fn trial_seed(base: u64, index: usize) -> u64 {
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index as u64)
}

fn sampled_instance(opts: &VerifyOptions, index: usize) -> Result<Trial> {
    let seed = trial_seed(opts.seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_max = opts.n_max.max(1);
    let mut boundary = false;
    let instance = match opts.family {
        Family::Sat | Family::SatReal => {
            let n = rng.gen_range(1..=n_max);
            let k = rng.gen_range(1..=n.min(3));
            let m_max = if opts.family == Family::Sat {
                (3 * n).min(20)
            } else {
                n_max
            };
            let m = rng.gen_range(0..=m_max);
            Instance::Sat(gen_random_ksat(n, m, k, rng.gen())?)
        }
        Family::Cvp | Family::CvpReal => {
            let n = rng.gen_range(1..=n_max);
            let d = rng.gen_range(1..=5);
            let p = opts
                .p
                .unwrap_or(if index.is_multiple_of(2) { 1 } else { 3 });
            let entries = RationalRange::new(-4, 4, 8);
            boundary = index % 10 == 9;
            let mut c = if boundary {
                gen_boundary_cvp(n, d, p, entries, rng.gen())?
            } else {
                gen_random_cvp(n, d, p, entries, rng.gen())?
            };
            // The gadget needs a positive radius.
            if opts.family == Family::CvpReal && c.radius().is_zero() {
                c = c.with_radius(scalar::ratio(1, 8))?;
            }
            Instance::Cvp(c)
        }
        Family::Halfclique | Family::HalfcliqueReal => {
            let evens: Vec<usize> = (2..=n_max.max(2))
                .step_by(2)
                .filter(|&n| n >= 4 || n_max < 4)
                .collect();
            let n = evens[rng.gen_range(0..evens.len())];
            let p = opts
                .p
                .unwrap_or(if index.is_multiple_of(2) { 2 } else { 4 });
            let g = gen_random_graph(n, 0.7, RationalRange::new(1, 2, 2), rng.gen())?;
            let k = (n / 2) as f64;
            let typical = k * (k - 1.0) / 2.0 * 1.5f64.powi(p as i32);
            let mut m = scalar::ratio(rng.gen_range(0..=(4.0 * typical * 1.3).ceil() as i64), 4);
            if index % 10 == 9 {
                if let Some(w) = min_half_clique_weight(&g, p) {
                    m = w;
                    boundary = true;
                }
            }
            Instance::HalfClique(HalfCliqueQuery::new(g, m)?, p)
        }
        Family::Vertexcover => {
            let n = rng.gen_range(1..=n_max);
            let g = gen_random_graph(n, 0.5, RationalRange::integers(1, 1), rng.gen())?;
            let q = rng.gen_range(0..=n);
            Instance::VertexCover(VertexCoverQuery::new(g, q)?, opts.p.unwrap_or(2))
        }
    };
    Ok(Trial {
        index,
        seed,
        instance,
        boundary,
    })
}

/// Smallest `p`-weight over cliques of exactly `n/2` vertices.
fn min_half_clique_weight(g: &WeightedGraph, p: u32) -> Option<Scalar> {
    let n = g.num_vertices();
    (0u64..1 << n)
        .filter(|mask| mask.count_ones() as usize == n / 2)
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|members| g.is_clique(members))
        .map(|members| g.clique_weight(&members, p))
        .min()
}

/// Multisets of size `m` drawn from `0..count`, in lexicographic order.
fn multisets(count: usize, m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in multisets(count, m - 1) {
        let start = rest.last().copied().unwrap_or(0);
        for c in start..count {
            let mut v = rest.clone();
            v.push(c);
            out.push(v);
        }
    }
    out
}

/// Every clause on `k` distinct variables of `1..=n`, with every polarity.
fn all_clauses(n: usize, k: usize) -> Vec<Vec<Literal>> {
    let mut out = Vec::new();
    for vars in 0u32..1 << n {
        if vars.count_ones() as usize != k {
            continue;
        }
        let chosen: Vec<usize> = (0..n).filter(|i| vars >> i & 1 == 1).collect();
        for signs in 0u32..1 << k {
            out.push(
                chosen
                    .iter()
                    .enumerate()
                    .map(|(t, &v)| Literal::new(v + 1, signs >> t & 1 == 1))
                    .collect(),
            );
        }
    }
    out
}

fn all_graphs(n: usize) -> Result<Vec<WeightedGraph>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    (0u64..1 << pairs.len())
        .map(|mask| {
            let mut g = WeightedGraph::new(n)?;
            for (b, &(i, j)) in pairs.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    g.add_edge(i, j, Scalar::one())?;
                }
            }
            Ok(g)
        })
        .collect()
}

/// SAT: `n ≤ n_max`, `k ≤ 2`, up to three clauses (two for the real
/// variant). Half-Clique: unit-weight graphs on four vertices (two when
/// `n_max < 4`) with several bounds. Vertex Cover: every graph on at most
/// `n_max` vertices and every cover size.
fn exhaustive_instances(opts: &VerifyOptions) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    match opts.family {
        Family::Sat | Family::SatReal => {
            let m_max = if opts.family == Family::Sat { 3 } else { 2 };
            for n in 1..=opts.n_max {
                for k in 1..=n.min(2) {
                    let clauses = all_clauses(n, k);
                    for m in 0..=m_max {
                        for pick in multisets(clauses.len(), m) {
                            let cs = pick.iter().map(|&c| clauses[c].clone()).collect();
                            out.push(Instance::Sat(CnfFormula::new(n, k, cs)?));
                        }
                    }
                }
            }
        }
        Family::Halfclique | Family::HalfcliqueReal => {
            let n = if opts.n_max >= 4 { 4 } else { 2 };
            let p = opts.p.unwrap_or(2);
            for g in all_graphs(n)? {
                for m in [
                    scalar::int(0),
                    scalar::int(1),
                    scalar::ratio(3, 2),
                    scalar::int(2),
                    scalar::int(3),
                ] {
                    out.push(Instance::HalfClique(HalfCliqueQuery::new(g.clone(), m)?, p));
                }
            }
        }
        Family::Vertexcover => {
            let p = opts.p.unwrap_or(2);
            for n in 1..=opts.n_max {
                for g in all_graphs(n)? {
                    for q in 0..=n {
                        out.push(Instance::VertexCover(
                            VertexCoverQuery::new(g.clone(), q)?,
                            p,
                        ));
                    }
                }
            }
        }
        Family::Cvp | Family::CvpReal => {
            return Err(Error::Unsupported(
                "exhaustive mode covers the sat, halfclique and vertexcover families".into(),
            ))
        }
    }
    Ok(out)
}

fn reduce(family: Family, instance: &Instance, opts: &VerifyOptions) -> Result<ReductionArtifact> {
    match (family, instance) {
        (Family::Sat, Instance::Sat(f)) => sat_to_exact_binary(f),
        (Family::SatReal, Instance::Sat(f)) => sat_to_exact_real(f),
        (Family::Cvp, Instance::Cvp(c)) => cvp_to_approx_binary(c, opts.reduce),
        (Family::CvpReal, Instance::Cvp(c)) => cvp_to_approx_real(c, opts.reduce, None),
        (Family::Halfclique, Instance::HalfClique(q, p)) => {
            halfclique_to_approx(q, *p, opts.reduce)
        }
        (Family::HalfcliqueReal, Instance::HalfClique(q, p)) => {
            halfclique_to_approx_real(q, *p, opts.reduce, None)
        }
        (Family::Vertexcover, Instance::VertexCover(q, p)) => {
            vertexcover_to_approx(q, *p, opts.reduce)
        }
        _ => unreachable!("instances are generated per family"),
    }
}

fn solve_source(instance: &Instance, cfg: &OracleConfig) -> Result<Verdict> {
    match instance {
        Instance::Sat(f) => solve_sat_bruteforce(f, cfg),
        Instance::Cvp(c) => solve_cvp01_bruteforce(c, cfg),
        Instance::HalfClique(q, p) => solve_halfclique_bruteforce(q, *p, cfg),
        Instance::VertexCover(q, _) => solve_vertexcover_bruteforce(q, cfg),
    }
}

/// Binary domains are enumerated; real domains use pattern enumeration when
/// it certifies the query and fits the cap, the falsifier otherwise.
fn invert(art: &ReductionArtifact, opts: &VerifyOptions, seed: u64) -> Result<Verdict> {
    let q = &art.query;
    if !matches!(q.domain(), LatentDomain::Real(_)) {
        return invert_binary_bruteforce(q, &opts.oracle);
    }
    let certifiable = q.is_exact() || q.p() == 1;
    if certifiable && q.network().hidden_units() <= opts.oracle.pattern_cap {
        return enumerate_patterns_invert(q, &opts.oracle);
    }
    let corner = art
        .constants
        .gadget
        .as_ref()
        .map_or_else(Scalar::one, |g| g.upper.clone());
    let fopts = FalsifyOptions {
        restarts: opts.restarts,
        seed,
        corners: vec![(Scalar::zero(), corner)],
        ..Default::default()
    };
    falsify_real(q, &fopts)
}

/// Exact distance a source witness must reach after mapping.
fn expected_distance(instance: &Instance, art: &ReductionArtifact, bits: &[bool]) -> Scalar {
    match instance {
        Instance::Sat(_) => Scalar::zero(),
        Instance::Cvp(c) => c.residual_pow(bits),
        Instance::HalfClique(q, p) => {
            let members: Vec<usize> = (0..bits.len()).filter(|&i| bits[i]).collect();
            let c = &art.constants;
            let z = scalar::int(q.graph().num_non_edges() as i64);
            let three = scalar::pow(&scalar::int(3), *p) - Scalar::one();
            three * q.graph().clique_weight(&members, *p)
                + c.alpha_pow.clone().unwrap_or_default() * z
                + q.graph().total_weight(*p)
        }
        Instance::VertexCover(q, _) => {
            art.constants.alpha_pow.clone().unwrap_or_default()
                * scalar::int(q.graph().num_edges() as i64)
        }
    }
}

fn source_witness_valid(instance: &Instance, bits: &[bool]) -> bool {
    match instance {
        Instance::Sat(f) => f.is_satisfied_by(bits),
        Instance::Cvp(c) => {
            bits.len() == c.num_vectors() && c.residual_pow(bits) <= scalar::pow(c.radius(), c.p())
        }
        Instance::HalfClique(q, p) => {
            let members: Vec<usize> = (0..bits.len()).filter(|&i| bits[i]).collect();
            let g = q.graph();
            members.len() == g.num_vertices() / 2
                && g.is_clique(&members)
                && g.clique_weight(&members, *p) < *q.bound()
        }
        Instance::VertexCover(q, _) => {
            bits.iter().filter(|&&b| b).count() == q.size() && q.graph().is_vertex_cover(bits)
        }
    }
}

fn run_trial(trial: &Trial, opts: &VerifyOptions) -> Result<TrialOutcome> {
    let source = solve_source(&trial.instance, &opts.oracle)?;
    let art = reduce(opts.family, &trial.instance, opts)?;
    let inversion = invert(&art, opts, trial.seed)?;
    let mut reasons = Vec::new();
    let mut witness_checks = 0;

    let checks = art.constant_checks();
    for c in checks.iter().filter(|c| !c.holds) {
        reasons.push(format!("constant predicate violated: {}", c.name));
    }
    if source.decision != inversion.decision {
        reasons.push(format!(
            "source says {:?}, inversion says {:?}",
            source.decision, inversion.decision
        ));
    }
    if let Some(bits) = source.witness_bits() {
        witness_checks += 1;
        let z = art.witness_map.to_latent(&bits);
        let dist = art.query.distance_pow_at(&z)?.into_value();
        if !art.query.accepts(&z)? {
            reasons.push("mapped source witness is rejected by the query".into());
        }
        let expected = expected_distance(&trial.instance, &art, &bits);
        if dist != expected {
            reasons.push(format!(
                "mapped source witness has dist^p {} instead of {}",
                scalar::format_scalar(&dist),
                scalar::format_scalar(&expected)
            ));
        }
        if let Instance::Sat(_) = trial.instance {
            if forward(art.query.network(), &z)? != art.query.target() {
                reasons.push("mapped assignment does not hit the target exactly".into());
            }
        }
    }
    if let Some(w) = &inversion.witness {
        witness_checks += 1;
        if !art.query.accepts(w)? {
            reasons.push("inversion witness does not re-verify".into());
        }
        match art.witness_map.from_latent(w) {
            Some(bits) if source_witness_valid(&trial.instance, &bits) => {}
            Some(_) => reasons.push("inversion witness maps to an invalid source solution".into()),
            None => reasons.push("inversion witness has no source preimage".into()),
        }
    }
    Ok(TrialOutcome {
        source: source.decision,
        inversion: inversion.decision,
        certificate: inversion.certificate,
        reasons,
        witness_checks,
        constant_checks: checks.len(),
    })
}

/// Runs every trial, comparing the source oracle with the inversion oracle on
/// the compiled query and forwarding witnesses both ways.
pub fn cmd_verify(opts: &VerifyOptions) -> Result<VerifyReport> {
    let start = Instant::now();
    let trials: Vec<Trial> = if opts.exhaustive {
        exhaustive_instances(opts)?
            .into_iter()
            .enumerate()
            .map(|(index, instance)| Trial {
                index,
                seed: trial_seed(opts.seed, index),
                instance,
                boundary: false,
            })
            .collect()
    } else {
        (0..opts.trials)
            .map(|i| sampled_instance(opts, i))
            .collect::<Result<_>>()?
    };
    let outcomes: Vec<TrialOutcome> = if opts.oracle.parallel {
        trials
            .par_iter()
            .map(|t| run_trial(t, opts))
            .collect::<Result<_>>()?
    } else {
        trials
            .iter()
            .map(|t| run_trial(t, opts))
            .collect::<Result<_>>()?
    };

    let mut report = VerifyReport {
        family: opts.family,
        trials: trials.len(),
        agreements: 0,
        disagreements: Vec::new(),
        yes_instances: 0,
        boundary_trials: 0,
        boundary_yes_both: 0,
        witness_checks: 0,
        constant_checks: 0,
        falsifier_only: 0,
        wall_ms: 0.0,
    };
    for (t, o) in trials.iter().zip(outcomes) {
        report.witness_checks += o.witness_checks;
        report.constant_checks += o.constant_checks;
        report.yes_instances += o.source.is_yes() as usize;
        report.falsifier_only += (o.certificate == Certificate::FalsifierOnly) as usize;
        if t.boundary {
            report.boundary_trials += 1;
            report.boundary_yes_both += (o.source.is_yes() && o.inversion.is_yes()) as usize;
        }
        if o.reasons.is_empty() {
            report.agreements += 1;
        } else {
            report.disagreements.push(Disagreement {
                trial: t.index,
                seed: t.seed,
                source: o.source,
                inversion: o.inversion,
                reasons: o.reasons,
                instance: t.instance.text(),
            });
        }
    }
    report.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}
