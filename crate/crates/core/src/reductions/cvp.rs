//! (0,1)-CVP to approximate inversion.

use num_traits::Zero;
use serde_json::json;

use super::constants::choose_alpha_cvp;
use super::{
    binarization_gadget, pm_stacked, Comparison, Constants, GadgetMode, InversionQuery,
    LatentDomain, ReduceOptions, ReductionArtifact, SourceRecord, SparseRows, WitnessMap,
};
use crate::instances::CvpInstance;
use crate::net::ReluNetwork;
use crate::scalar::{self, Scalar};
use crate::{Error, Result};

/// Inner rows over the `2n` pair coordinates: `d` rows `Σ_i B_{ri} z_{2i} − t_r`
/// followed by `n` rows `α(z_{2i} + z_{2i+1} − 1)`.
fn inner_rows(c: &CvpInstance, alpha: &Scalar) -> SparseRows {
    let n = c.num_vectors();
    let mut rows: SparseRows = Vec::with_capacity(c.dim() + n);
    for (row, t) in c.basis_rows().iter().zip(c.target()) {
        let entries = row
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (2 * i, v.clone()))
            .collect();
        rows.push((entries, -t.clone()));
    }
    for i in 0..n {
        rows.push((
            vec![(2 * i, alpha.clone()), (2 * i + 1, alpha.clone())],
            -alpha.clone(),
        ));
    }
    rows
}

/// One ± stacked layer over `{0,1}^{2n}` with target `0⃗` and threshold `r^p`.
/// Latent pair `(z_{2i}, z_{2i+1})` encodes `y_i` as `(y_i, 1 − y_i)`.
pub fn cvp_to_approx_binary(c: &CvpInstance, opts: ReduceOptions) -> Result<ReductionArtifact> {
    let p = c.p();
    if p.is_multiple_of(2) && !opts.relax_parity {
        return Err(Error::Unsupported(format!(
            "the CVP reduction is stated for odd p (got p = {p}); even p is covered by the half-clique and vertex cover reductions"
        )));
    }
    let n = c.num_vectors();
    let alpha = choose_alpha_cvp(c.radius())?;
    let layer = pm_stacked(2 * n, inner_rows(c, &alpha))?;
    let out = layer.rows();
    let net = ReluNetwork::with_metadata(
        2 * n,
        vec![layer],
        json!({"reduction": "cvp", "dim": c.dim(), "vectors": n, "p": p}),
    )?;
    let query = InversionQuery::new(
        net,
        vec![Scalar::zero(); out],
        p,
        scalar::pow(c.radius(), p),
        Comparison::NonStrict,
        LatentDomain::Binary01(2 * n),
    )?;
    Ok(ReductionArtifact {
        query,
        constants: Constants {
            alpha: Some(alpha),
            radius: Some(c.radius().clone()),
            ..Default::default()
        },
        witness_map: WitnessMap::CvpPairs { n },
        source: SourceRecord {
            family: "cvp".into(),
            text: c.to_text(),
        },
    })
}

/// The binary construction behind the binarization gadget with `δ = r`;
/// quarter mode when `r < 1/4`, general mode otherwise.
pub fn cvp_to_approx_real(
    c: &CvpInstance,
    opts: ReduceOptions,
    mode: Option<GadgetMode>,
) -> Result<ReductionArtifact> {
    let inner = cvp_to_approx_binary(c, opts)?;
    let delta = c.radius().clone();
    let mode = mode.unwrap_or_else(|| GadgetMode::for_delta(&delta));
    let mut art = binarization_gadget(&inner, delta, mode)?;
    art.source.family = "cvp-real".into();
    Ok(art)
}
