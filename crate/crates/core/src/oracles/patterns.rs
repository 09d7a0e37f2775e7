//! Exact real-latent inversion by activation-pattern enumeration.
//!
//! A depth-first search fixes units one at a time (layer order), keeping the
//! region's sign constraints in an exact LP. A feasible point of the current
//! region is carried along so the LP only runs when a new constraint cuts it
//! off. Zero pre-activations are active; regions are closed, so neighbouring
//! regions overlap on their boundaries.

use num_traits::{Signed, Zero};

use super::check_cap;
use super::lp::{lp_feasible, lp_minimize, Constraint, LinearProgram, LpOutcome, Relation};
use super::verdict::{Certificate, Decision, OracleConfig, Stats, Verdict};
use crate::net::{Layer, ReluNetwork};
use crate::reductions::{InversionQuery, LatentDomain};
use crate::scalar::Scalar;
use crate::{Error, Result};

/// One flag per unit across all layers: `true` when the pre-activation is
/// nonnegative.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ActivationPattern(Vec<bool>);

impl ActivationPattern {
    pub fn new(bits: Vec<bool>) -> Self {
        ActivationPattern(bits)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The pattern `z` induces.
    pub fn of(net: &ReluNetwork, z: &[Scalar]) -> Result<Self> {
        if z.len() != net.input_dim() {
            return Err(Error::Dimension(format!(
                "latent has length {}, network expects {}",
                z.len(),
                net.input_dim()
            )));
        }
        let mut bits = Vec::with_capacity(net.hidden_units());
        let mut cur = z.to_vec();
        for layer in net.layers() {
            let pre = layer.affine(&cur);
            bits.extend(pre.iter().map(|v| !v.is_negative()));
            cur = pre
                .into_iter()
                .map(|v| if v.is_negative() { Scalar::zero() } else { v })
                .collect();
        }
        Ok(ActivationPattern(bits))
    }
}

/// `coeffs · z + constant`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineExpr {
    pub coeffs: Vec<Scalar>,
    pub constant: Scalar,
}

impl AffineExpr {
    pub fn zero(n: usize) -> Self {
        AffineExpr {
            coeffs: vec![Scalar::zero(); n],
            constant: Scalar::zero(),
        }
    }

    pub fn coordinate(n: usize, i: usize) -> Self {
        let mut e = AffineExpr::zero(n);
        e.coeffs[i] = Scalar::from_integer(1.into());
        e
    }

    pub fn eval(&self, z: &[Scalar]) -> Scalar {
        self.coeffs
            .iter()
            .zip(z)
            .filter(|(a, _)| !a.is_zero())
            .fold(self.constant.clone(), |acc, (a, x)| acc + a * x)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// `row · inputs + bias`.
    fn combine(row: &[Scalar], bias: &Scalar, inputs: &[AffineExpr], n: usize) -> Self {
        let mut out = AffineExpr::zero(n);
        out.constant = bias.clone();
        for (w, e) in row.iter().zip(inputs) {
            if w.is_zero() {
                continue;
            }
            for (o, c) in out.coeffs.iter_mut().zip(&e.coeffs) {
                if !c.is_zero() {
                    *o += w * c;
                }
            }
            if !e.constant.is_zero() {
                out.constant += w * &e.constant;
            }
        }
        out
    }

    /// `self ≥ 0` (active) or `self ≤ 0` (inactive) as an LP row.
    fn sign_constraint(&self, active: bool) -> Constraint {
        let rel = if active { Relation::Ge } else { Relation::Le };
        Constraint::new(self.coeffs.clone(), rel, -self.constant.clone())
    }

    fn equals(&self, value: &Scalar) -> Constraint {
        Constraint::new(self.coeffs.clone(), Relation::Eq, value - &self.constant)
    }
}

/// The closed polyhedron of latents compatible with a pattern, and the
/// affine map the network computes there.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub constraints: Vec<Constraint>,
    pub output: Vec<AffineExpr>,
}

impl Region {
    pub fn of(net: &ReluNetwork, pattern: &ActivationPattern) -> Result<Self> {
        if pattern.len() != net.hidden_units() {
            return Err(Error::Dimension(format!(
                "pattern has {} units, network has {}",
                pattern.len(),
                net.hidden_units()
            )));
        }
        let n = net.input_dim();
        let mut cur: Vec<AffineExpr> = (0..n).map(|i| AffineExpr::coordinate(n, i)).collect();
        let mut constraints = Vec::new();
        let mut bits = pattern.bits().iter();
        for layer in net.layers() {
            let mut next = Vec::with_capacity(layer.rows());
            for (row, b) in layer.weights().iter().zip(layer.bias()) {
                let pre = AffineExpr::combine(row, b, &cur, n);
                let active = *bits.next().expect("length checked");
                constraints.push(pre.sign_constraint(active));
                next.push(if active { pre } else { AffineExpr::zero(n) });
            }
            cur = next;
        }
        Ok(Region {
            constraints,
            output: cur,
        })
    }

    pub fn contains(&self, z: &[Scalar]) -> bool {
        self.constraints.iter().all(|c| c.holds_at(z))
    }

    pub fn apply(&self, z: &[Scalar]) -> Vec<Scalar> {
        self.output.iter().map(|e| e.eval(z)).collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Goal {
    /// `G(z) = x`
    Exact,
    /// minimize `‖G(z) − x‖_1`
    L1,
}

struct Search<'a> {
    q: &'a InversionQuery,
    layers: &'a [Layer],
    n: usize,
    goal: Goal,
    posts: Vec<Vec<AffineExpr>>,
    lp: LinearProgram,
    stats: Stats,
}

impl Search<'_> {
    fn dfs(&mut self, l: usize, r: usize, point: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
        if l == self.layers.len() {
            return self.leaf(point);
        }
        let layer = &self.layers[l];
        if r == layer.rows() {
            let Some(next) = self.layers.get(l + 1) else {
                return self.dfs(l + 1, 0, point);
            };
            self.posts.push(Vec::with_capacity(next.rows()));
            let found = self.dfs(l + 1, 0, point);
            self.posts.pop();
            return found;
        }
        let pre = AffineExpr::combine(
            &layer.weights()[r],
            &layer.bias()[r],
            &self.posts[l],
            self.n,
        );
        let output_unit = l + 1 == self.layers.len();
        let mut branches: Vec<(bool, Constraint)> = Vec::with_capacity(2);
        if output_unit && self.goal == Goal::Exact {
            let x = &self.q.target()[r];
            if x.is_zero() {
                branches.push((false, pre.sign_constraint(false)));
            } else if x.is_positive() {
                branches.push((true, pre.equals(x)));
            }
        } else {
            branches.push((true, pre.sign_constraint(true)));
            branches.push((false, pre.sign_constraint(false)));
        }
        for (active, constraint) in branches {
            let post = if active {
                pre.clone()
            } else {
                AffineExpr::zero(self.n)
            };
            let child_point = if constraint.holds_at(point) {
                Some(point.to_vec())
            } else if pre.is_constant() {
                None
            } else {
                self.lp.add(constraint.clone());
                let (p, pivots) = lp_feasible(&self.lp)?;
                self.lp.pop();
                self.stats.lp_pivots += pivots;
                p
            };
            let Some(child_point) = child_point else {
                continue;
            };
            let constant = pre.is_constant();
            if !constant {
                self.lp.add(constraint);
            }
            self.posts[l + 1].push(post);
            let found = self.dfs(l, r + 1, &child_point);
            self.posts[l + 1].pop();
            if !constant {
                self.lp.pop();
            }
            if let Some(w) = found? {
                return Ok(Some(w));
            }
        }
        Ok(None)
    }

    fn leaf(&mut self, point: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
        self.stats.patterns += 1;
        let candidate = match self.goal {
            Goal::Exact => Some(point.to_vec()),
            Goal::L1 => {
                let outputs = self.posts.last().expect("output layer");
                let (n, k) = (self.n, outputs.len());
                let mut lp = LinearProgram::new(n + k);
                for c in self.lp.constraints() {
                    let mut coeffs = c.coeffs.clone();
                    coeffs.resize(n + k, Scalar::zero());
                    lp.push(coeffs, c.relation, c.rhs.clone());
                }
                for (j, (y, x)) in outputs.iter().zip(self.q.target()).enumerate() {
                    // e_j − y_j ≥ −x_j and e_j + y_j ≥ x_j
                    let mut lo: Vec<Scalar> = y.coeffs.iter().map(|a| -a.clone()).collect();
                    lo.resize(n + k, Scalar::zero());
                    lo[n + j] = Scalar::from_integer(1.into());
                    lp.push(lo, Relation::Ge, &y.constant - x);
                    let mut hi = y.coeffs.clone();
                    hi.resize(n + k, Scalar::zero());
                    hi[n + j] = Scalar::from_integer(1.into());
                    lp.push(hi, Relation::Ge, x - &y.constant);
                }
                let mut objective = vec![Scalar::zero(); n + k];
                objective[n..]
                    .iter_mut()
                    .for_each(|v| *v = Scalar::from_integer(1.into()));
                lp.set_objective(objective);
                let (outcome, pivots) = lp_minimize(&lp)?;
                self.stats.lp_pivots += pivots;
                match outcome {
                    LpOutcome::Optimal { point, value } if self.q.accepts_distance(&value) => {
                        Some(point[..n].to_vec())
                    }
                    _ => None,
                }
            }
        };
        match candidate {
            Some(z) if self.q.accepts(&z)? => Ok(Some(z)),
            _ => Ok(None),
        }
    }
}

/// Decides a real-latent query exactly when `θ = 0` (any `p`) or `p = 1`.
/// The witness is the LP point of the first accepting region in search
/// order.
pub fn enumerate_patterns_invert(q: &InversionQuery, cfg: &OracleConfig) -> Result<Verdict> {
    let LatentDomain::Real(n) = q.domain() else {
        return Err(Error::Unsupported(
            "pattern enumeration needs a real latent domain".into(),
        ));
    };
    let goal = if q.is_exact() {
        Goal::Exact
    } else if q.p() == 1 {
        Goal::L1
    } else {
        return Err(Error::Unsupported(format!(
            "pattern enumeration certifies approximate queries only for p = 1 (got p = {})",
            q.p()
        )));
    };
    check_cap("hidden units", q.network().hidden_units(), cfg.pattern_cap)?;
    let mut search = Search {
        q,
        layers: q.network().layers(),
        n,
        goal,
        posts: vec![(0..n).map(|i| AffineExpr::coordinate(n, i)).collect()],
        lp: LinearProgram::new(n),
        stats: Stats::default(),
    };
    search.posts.push(Vec::new());
    let found = search.dfs(0, 0, &vec![Scalar::zero(); n])?;
    let best = found
        .as_ref()
        .map(|z| q.distance_pow_at(z))
        .transpose()?
        .map(|d| d.into_value());
    Ok(Verdict {
        decision: Decision::from_bool(found.is_some()),
        witness: found,
        certificate: Certificate::PatternEnumeration,
        stats: search.stats,
        best,
    })
}
