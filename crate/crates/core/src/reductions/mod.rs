//! Compilers from source-problem instances to ReLU inversion queries.
//!
//! Every compiler returns a [`ReductionArtifact`]: the query, the constants
//! it chose (with machine-checkable validity predicates) and a witness map
//! translating source solutions to latents and back.

mod constants;
mod cvp;
mod gadget;
mod graph;
mod sat;

pub use constants::{
    choose_alpha_cvp, choose_alpha_halfclique, choose_alpha_vc, choose_beta, choose_c,
    ConstantCheck, Constants, GadgetMode, GadgetParams, HalfCliqueAlpha,
};
pub use cvp::{cvp_to_approx_binary, cvp_to_approx_real};
pub use gadget::binarization_gadget;
pub use graph::{halfclique_to_approx, halfclique_to_approx_real, vertexcover_to_approx};
pub use sat::{sat_to_exact_binary, sat_to_exact_real};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::net::{self, forward, DistancePow, Layer, NetworkDoc, ReluNetwork};
use crate::scalar::{self, Scalar};
use crate::{Error, Result};

/// Knobs shared by the reductions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReduceOptions {
    /// Accept norm exponents of the parity the hardness argument does not
    /// cover (even `p` for CVP, odd `p` for the graph problems). The
    /// constructions stay correct; only the hardness claim is lost.
    pub relax_parity: bool,
}

/// Where latent vectors live.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "dim", rename_all = "kebab-case")]
pub enum LatentDomain {
    /// `{−1, 1}^N`
    BinaryPm1(usize),
    /// `{0, 1}^N`
    Binary01(usize),
    /// `ℝ^N`, realized over `ℚ^N`.
    Real(usize),
}

impl LatentDomain {
    pub fn dim(&self) -> usize {
        match *self {
            LatentDomain::BinaryPm1(n) | LatentDomain::Binary01(n) | LatentDomain::Real(n) => n,
        }
    }

    /// The two admissible coordinate values, ordered low to high.
    pub fn binary_values(&self) -> Option<(i64, i64)> {
        match self {
            LatentDomain::BinaryPm1(_) => Some((-1, 1)),
            LatentDomain::Binary01(_) => Some((0, 1)),
            LatentDomain::Real(_) => None,
        }
    }

    pub fn contains(&self, z: &[Scalar]) -> bool {
        z.len() == self.dim()
            && match self.binary_values() {
                Some((lo, hi)) => z
                    .iter()
                    .all(|v| *v == scalar::int(lo) || *v == scalar::int(hi)),
                None => true,
            }
    }
}

/// How the distance is compared with the threshold.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    /// YES iff `dist^p <= θ`.
    #[default]
    NonStrict,
    /// YES iff `dist^p < θ`.
    Strict,
}

impl Comparison {
    pub fn accepts(self, dist_pow: &Scalar, threshold_pow: &Scalar) -> bool {
        match self {
            Comparison::NonStrict => dist_pow <= threshold_pow,
            Comparison::Strict => dist_pow < threshold_pow,
        }
    }
}

/// Does some latent `z` in `domain` satisfy `‖G(z) − x‖_p^p (≤|<) θ`?
#[derive(Clone, Debug, PartialEq)]
pub struct InversionQuery {
    network: ReluNetwork,
    target: Vec<Scalar>,
    p: u32,
    threshold_pow: Scalar,
    comparison: Comparison,
    domain: LatentDomain,
}

impl InversionQuery {
    pub fn new(
        network: ReluNetwork,
        target: Vec<Scalar>,
        p: u32,
        threshold_pow: Scalar,
        comparison: Comparison,
        domain: LatentDomain,
    ) -> Result<Self> {
        if target.len() != network.output_dim() {
            return Err(Error::Dimension(format!(
                "target has length {}, network output has {}",
                target.len(),
                network.output_dim()
            )));
        }
        if domain.dim() != network.input_dim() {
            return Err(Error::Dimension(format!(
                "latent domain has dimension {}, network input has {}",
                domain.dim(),
                network.input_dim()
            )));
        }
        if p == 0 {
            return Err(Error::Invalid("norm exponent p must be positive".into()));
        }
        if threshold_pow.is_negative() {
            return Err(Error::Invalid("threshold must be nonnegative".into()));
        }
        Ok(InversionQuery {
            network,
            target,
            p,
            threshold_pow,
            comparison,
            domain,
        })
    }

    pub fn network(&self) -> &ReluNetwork {
        &self.network
    }

    pub fn target(&self) -> &[Scalar] {
        &self.target
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn threshold_pow(&self) -> &Scalar {
        &self.threshold_pow
    }

    pub fn comparison(&self) -> Comparison {
        self.comparison
    }

    pub fn domain(&self) -> LatentDomain {
        self.domain
    }

    pub fn is_exact(&self) -> bool {
        self.threshold_pow.is_zero()
    }

    /// Exact `‖G(z) − x‖_p^p`.
    pub fn distance_pow_at(&self, z: &[Scalar]) -> Result<DistancePow> {
        let y = forward(&self.network, z)?;
        net::distance_pow(&y, &self.target, self.p)
    }

    pub fn accepts_distance(&self, dist_pow: &Scalar) -> bool {
        self.comparison.accepts(dist_pow, &self.threshold_pow)
    }

    /// Exact membership test: `z` lies in the domain and meets the threshold.
    pub fn accepts(&self, z: &[Scalar]) -> Result<bool> {
        if !self.domain.contains(z) {
            return Ok(false);
        }
        Ok(self.accepts_distance(self.distance_pow_at(z)?.value()))
    }
}

/// Translation between source-problem witnesses (bit vectors) and latents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WitnessMap {
    /// Assignment bit `TRUE ↦ +1`, `FALSE ↦ −1`.
    SatSign { num_vars: usize },
    /// `y_i ↦ (z_{2i−1}, z_{2i}) = (y_i, 1 − y_i)`.
    CvpPairs { n: usize },
    /// `z_i = 1` iff vertex `i` is in the clique.
    CliqueMembers { n: usize },
    /// `z_i = 0` iff vertex `i` is in the cover.
    CoverComplement { n: usize },
    /// Binary latent bits scaled by the gadget's upper clamp `U`.
    Scaled {
        #[serde(with = "scalar::serde_str")]
        factor: Scalar,
        inner: Box<WitnessMap>,
    },
}

impl WitnessMap {
    pub fn source_len(&self) -> usize {
        match self {
            WitnessMap::SatSign { num_vars } => *num_vars,
            WitnessMap::CvpPairs { n }
            | WitnessMap::CliqueMembers { n }
            | WitnessMap::CoverComplement { n } => *n,
            WitnessMap::Scaled { inner, .. } => inner.source_len(),
        }
    }

    /// Latent for a source witness.
    pub fn to_latent(&self, source: &[bool]) -> Vec<Scalar> {
        let bit = |b: bool| scalar::int(b as i64);
        match self {
            WitnessMap::SatSign { .. } => source
                .iter()
                .map(|&b| scalar::int(if b { 1 } else { -1 }))
                .collect(),
            WitnessMap::CvpPairs { .. } => source.iter().flat_map(|&b| [bit(b), bit(!b)]).collect(),
            WitnessMap::CliqueMembers { .. } => source.iter().map(|&b| bit(b)).collect(),
            WitnessMap::CoverComplement { .. } => source.iter().map(|&b| bit(!b)).collect(),
            WitnessMap::Scaled { factor, inner } => inner
                .to_latent(source)
                .into_iter()
                .map(|v| v * factor)
                .collect(),
        }
    }

    /// Source witness read off an accepted latent; `None` when the latent
    /// lacks the structure the map requires (non-binary coordinates, a pair
    /// that is not exactly one-hot, wrong length).
    pub fn from_latent(&self, latent: &[Scalar]) -> Option<Vec<bool>> {
        let as_bit = |v: &Scalar| -> Option<bool> {
            if v.is_zero() {
                Some(false)
            } else if v.is_one() {
                Some(true)
            } else {
                None
            }
        };
        match self {
            WitnessMap::SatSign { num_vars } => {
                if latent.len() != *num_vars {
                    return None;
                }
                let one = Scalar::one();
                latent
                    .iter()
                    .map(|v| {
                        if *v >= one {
                            Some(true)
                        } else if *v <= -one.clone() {
                            Some(false)
                        } else {
                            None
                        }
                    })
                    .collect()
            }
            WitnessMap::CvpPairs { n } => {
                if latent.len() != 2 * n {
                    return None;
                }
                latent
                    .chunks(2)
                    .map(|pair| match (as_bit(&pair[0])?, as_bit(&pair[1])?) {
                        (a, b) if a != b => Some(a),
                        _ => None,
                    })
                    .collect()
            }
            WitnessMap::CliqueMembers { n } => {
                if latent.len() != *n {
                    return None;
                }
                latent.iter().map(as_bit).collect()
            }
            WitnessMap::CoverComplement { n } => {
                if latent.len() != *n {
                    return None;
                }
                latent.iter().map(|v| as_bit(v).map(|b| !b)).collect()
            }
            WitnessMap::Scaled { factor, inner } => {
                let half = factor / scalar::int(2);
                let bits: Vec<Scalar> = latent
                    .iter()
                    .map(|v| scalar::int((*v > half) as i64))
                    .collect();
                inner.from_latent(&bits)
            }
        }
    }
}

/// Which source problem an artifact was compiled from, plus its text form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceRecord {
    pub family: String,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionArtifact {
    pub query: InversionQuery,
    pub constants: Constants,
    pub witness_map: WitnessMap,
    pub source: SourceRecord,
}

impl ReductionArtifact {
    /// Evaluates every validity predicate that applies to the recorded
    /// constants.
    pub fn constant_checks(&self) -> Vec<ConstantCheck> {
        self.constants
            .checks(self.query.p(), self.query.threshold_pow())
    }

    pub fn validate_constants(&self) -> Result<()> {
        match self.constant_checks().into_iter().find(|c| !c.holds) {
            Some(c) => Err(Error::Invalid(format!(
                "constant predicate violated: {}",
                c.name
            ))),
            None => Ok(()),
        }
    }

    pub fn summary(&self) -> String {
        let net = self.query.network();
        let mut out = format!(
            "family={} depth={} width={} units={} latent_dim={} domain={:?} p={} threshold_pow={} comparison={:?}",
            self.source.family,
            net.depth(),
            net.width(),
            net.hidden_units(),
            net.input_dim(),
            self.query.domain(),
            self.query.p(),
            scalar::format_scalar(self.query.threshold_pow()),
            self.query.comparison(),
        );
        for (name, value) in self.constants.named_values() {
            out.push_str(&format!(" {name}={value}"));
        }
        out
    }

    pub fn to_json(&self) -> Vec<u8> {
        let doc = ArtifactDoc {
            network: NetworkDoc::from(self.query.network()),
            target: self.query.target().to_vec(),
            p: self.query.p(),
            threshold_pow: self.query.threshold_pow().clone(),
            comparison: self.query.comparison(),
            domain: self.query.domain(),
            constants: self.constants.clone(),
            witness_map: self.witness_map.clone(),
            source: self.source.clone(),
        };
        serde_json::to_vec_pretty(&doc).expect("artifact documents always serialize")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let doc: ArtifactDoc = serde_json::from_slice(bytes)?;
        let network = ReluNetwork::try_from(doc.network)?;
        let query = InversionQuery::new(
            network,
            doc.target,
            doc.p,
            doc.threshold_pow,
            doc.comparison,
            doc.domain,
        )?;
        if doc.witness_map.source_len() == 0 {
            return Err(Error::Document(
                "witness map has no source coordinates".into(),
            ));
        }
        Ok(ReductionArtifact {
            query,
            constants: doc.constants,
            witness_map: doc.witness_map,
            source: doc.source,
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArtifactDoc {
    network: NetworkDoc,
    #[serde(with = "scalar::serde_str::vec")]
    target: Vec<Scalar>,
    p: u32,
    #[serde(with = "scalar::serde_str")]
    threshold_pow: Scalar,
    #[serde(default)]
    comparison: Comparison,
    domain: LatentDomain,
    #[serde(default)]
    constants: Constants,
    witness_map: WitnessMap,
    source: SourceRecord,
}

/// Rows `(sparse entries, bias)` of a single affine map.
pub(crate) type SparseRows = Vec<(Vec<(usize, Scalar)>, Scalar)>;

/// `[W; −W]`, `[b; −b]`: after ReLU the ℓ_p norm of the output equals the ℓ_p
/// norm of the signed residual `W z + b`.
pub(crate) fn pm_stacked(cols: usize, rows: SparseRows) -> Result<Layer> {
    let negated: SparseRows = rows
        .iter()
        .map(|(entries, b)| {
            (
                entries.iter().map(|(c, v)| (*c, -v.clone())).collect(),
                -b.clone(),
            )
        })
        .collect();
    Layer::from_sparse(cols, rows.into_iter().chain(negated).collect())
}
