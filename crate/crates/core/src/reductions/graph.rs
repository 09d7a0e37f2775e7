//! Half-Clique and Vertex Cover to approximate inversion over `{0,1}^n`.

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::json;

use super::constants::{as_scalar, choose_alpha_halfclique, choose_alpha_vc, choose_beta};
use super::{
    binarization_gadget, pm_stacked, Comparison, Constants, GadgetMode, InversionQuery,
    LatentDomain, ReduceOptions, ReductionArtifact, SourceRecord, SparseRows, WitnessMap,
};
use crate::instances::{GraphDocument, HalfCliqueQuery, VertexCoverQuery};
use crate::net::ReluNetwork;
use crate::scalar::{self, root_upper_bound, Scalar};
use crate::{Error, Result};

fn check_even_p(p: u32, opts: ReduceOptions, what: &str) -> Result<()> {
    if p == 0 {
        return Err(Error::Invalid("norm exponent p must be positive".into()));
    }
    if p % 2 == 1 && !opts.relax_parity {
        return Err(Error::Unsupported(format!(
            "the {what} reduction is stated for even p (got p = {p}); odd p is covered by the CVP reduction"
        )));
    }
    Ok(())
}

/// `w·(2z_i + 2z_j − 1)`: contributes `|w|^p` unless both endpoints are
/// selected, in which case it contributes `3^p·|w|^p`.
fn pair_row(i: usize, j: usize, w: &Scalar) -> (Vec<(usize, Scalar)>, Scalar) {
    let two_w = w * scalar::int(2);
    (vec![(i, two_w.clone()), (j, two_w)], -w.clone())
}

/// `β(Σ z_i − count)`.
fn cardinality_row(n: usize, beta: &Scalar, count: usize) -> (Vec<(usize, Scalar)>, Scalar) {
    (
        (0..n).map(|i| (i, beta.clone())).collect(),
        -(beta * scalar::int(count as i64)),
    )
}

/// Rows for every edge (weight `ρ_e`) and non-edge (weight `α`, replicated so
/// that `α^p` need not be a rational `p`-th power), then the half-size row.
/// YES iff `dist^p < θ` with `θ = Σw + α^p·Z + (3^p − 1)·M`.
pub fn halfclique_to_approx(
    q: &HalfCliqueQuery,
    p: u32,
    opts: ReduceOptions,
) -> Result<ReductionArtifact> {
    check_even_p(p, opts, "half-clique")?;
    let g = q.graph();
    let n = g.num_vertices();
    if q.bound().is_negative() {
        return Err(Error::Invalid(
            "half-clique bound must be nonnegative".into(),
        ));
    }
    let weight_sum = g.total_weight(p);
    let alpha = choose_alpha_halfclique(p, &weight_sum, q.bound())?;
    let alpha_pow = as_scalar(&alpha.alpha_pow);
    let base = as_scalar(&alpha.base);
    let copies = alpha
        .copies
        .to_usize()
        .ok_or_else(|| Error::Invalid("α^p is too large to realize with replicated rows".into()))?;
    let z = g.num_non_edges();
    let three_p_minus_one = scalar::pow(&scalar::int(3), p) - Scalar::one();
    let theta = &weight_sum + &alpha_pow * scalar::int(z as i64) + &three_p_minus_one * q.bound();
    let beta = choose_beta(&theta, p)?;

    let mut rows: SparseRows = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            match g.root_weight(i, j) {
                Some(rho) => rows.push(pair_row(i, j, rho)),
                None => rows.extend(std::iter::repeat_n(pair_row(i, j, &base), copies)),
            }
        }
    }
    rows.push(cardinality_row(n, &beta, n / 2));
    let layer = pm_stacked(n, rows)?;
    let out = layer.rows();
    let net = ReluNetwork::with_metadata(
        n,
        vec![layer],
        json!({"reduction": "halfclique", "vertices": n, "edges": g.num_edges(), "p": p}),
    )?;
    let query = InversionQuery::new(
        net,
        vec![Scalar::zero(); out],
        p,
        theta,
        Comparison::Strict,
        LatentDomain::Binary01(n),
    )?;
    let doc = GraphDocument {
        graph: g.clone(),
        halfclique_bound: Some(q.bound().clone()),
        cover_size: None,
    };
    Ok(ReductionArtifact {
        query,
        constants: Constants {
            alpha_pow: Some(alpha_pow),
            alpha_copies: Some(as_scalar(&alpha.copies)),
            alpha_base: Some(base),
            beta: Some(beta),
            weight_sum: Some(weight_sum),
            bound: Some(q.bound().clone()),
            ..Default::default()
        },
        witness_map: WitnessMap::CliqueMembers { n },
        source: SourceRecord {
            family: "halfclique".into(),
            text: doc.to_text(),
        },
    })
}

/// The binary Half-Clique construction behind the binarization gadget, with
/// `δ` the smallest convenient rational at least `θ^{1/p}`.
pub fn halfclique_to_approx_real(
    q: &HalfCliqueQuery,
    p: u32,
    opts: ReduceOptions,
    mode: Option<GadgetMode>,
) -> Result<ReductionArtifact> {
    let inner = halfclique_to_approx(q, p, opts)?;
    let delta = root_upper_bound(inner.query.threshold_pow(), p);
    let mode = mode.unwrap_or_else(|| GadgetMode::for_delta(&delta));
    let mut art = binarization_gadget(&inner, delta, mode)?;
    art.source.family = "halfclique-real".into();
    Ok(art)
}

/// Edge rows `α(2z_i + 2z_j − 1)`, zero rows for non-edges and the row
/// `β(Σz − (n − q))`; `θ = Z·α^p` with `Z` the number of edges. `z_i = 0`
/// marks cover membership.
pub fn vertexcover_to_approx(
    q: &VertexCoverQuery,
    p: u32,
    opts: ReduceOptions,
) -> Result<ReductionArtifact> {
    check_even_p(p, opts, "vertex cover")?;
    let g = q.graph();
    let n = g.num_vertices();
    let alpha = choose_alpha_vc();
    let alpha_pow = scalar::pow(&alpha, p);
    let theta = &alpha_pow * scalar::int(g.num_edges() as i64);
    let beta = choose_beta(&theta, p)?;

    let mut rows: SparseRows = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if g.has_edge(i, j) {
                rows.push(pair_row(i, j, &alpha));
            } else {
                rows.push((Vec::new(), Scalar::zero()));
            }
        }
    }
    rows.push(cardinality_row(n, &beta, n - q.size()));
    let layer = pm_stacked(n, rows)?;
    let out = layer.rows();
    let net = ReluNetwork::with_metadata(
        n,
        vec![layer],
        json!({"reduction": "vertexcover", "vertices": n, "edges": g.num_edges(), "p": p}),
    )?;
    let query = InversionQuery::new(
        net,
        vec![Scalar::zero(); out],
        p,
        theta,
        Comparison::NonStrict,
        LatentDomain::Binary01(n),
    )?;
    let doc = GraphDocument {
        graph: g.clone(),
        halfclique_bound: None,
        cover_size: Some(q.size()),
    };
    Ok(ReductionArtifact {
        query,
        constants: Constants {
            alpha: Some(alpha),
            alpha_pow: Some(alpha_pow),
            beta: Some(beta),
            ..Default::default()
        },
        witness_map: WitnessMap::CoverComplement { n },
        source: SourceRecord {
            family: "vertexcover".into(),
            text: doc.to_text(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::WeightedGraph;
    use crate::scalar::int;

    fn example() -> HalfCliqueQuery {
        let mut g = WeightedGraph::new(4).unwrap();
        g.add_edge(0, 1, int(1)).unwrap();
        g.add_edge(2, 3, int(2)).unwrap();
        HalfCliqueQuery::new(g, int(2)).unwrap()
    }

    #[test]
    fn worked_halfclique_example() {
        let a = halfclique_to_approx(&example(), 2, ReduceOptions::default()).unwrap();
        assert_eq!(a.query.threshold_pow(), &int(53));
        assert_eq!(a.constants.alpha_pow, Some(int(8)));
        assert_eq!(a.constants.beta, Some(int(8)));
        let layer = &a.query.network().layers()[0];
        // half-size row bias −(n/2)β
        let half_row = layer.rows() / 2 - 1;
        assert_eq!(layer.bias()[half_row], int(-16));
        let z = [int(1), int(1), int(0), int(0)];
        assert_eq!(a.query.distance_pow_at(&z).unwrap().into_value(), int(45));
        assert!(a.query.accepts(&z).unwrap());
        // {3,4} weighs 4 >= M
        let z = [int(0), int(0), int(1), int(1)];
        assert_eq!(
            a.query.distance_pow_at(&z).unwrap().into_value(),
            int(1 + 9 * 4 + 32)
        );
        assert!(!a.query.accepts(&z).unwrap());
        assert!(a.validate_constants().is_ok());
    }

    #[test]
    fn halfclique_parity() {
        assert!(halfclique_to_approx(&example(), 3, ReduceOptions::default()).is_err());
        assert!(halfclique_to_approx(&example(), 3, ReduceOptions { relax_parity: true }).is_ok());
    }

    #[test]
    fn halfclique_real_shape() {
        let a = halfclique_to_approx_real(&example(), 2, ReduceOptions::default(), None).unwrap();
        assert_eq!(a.query.network().depth(), 5);
        assert!(a.validate_constants().is_ok());
        let z = a.witness_map.to_latent(&[true, true, false, false]);
        assert!(a.query.accepts(&z).unwrap());
    }

    #[test]
    fn path_cover() {
        let mut g = WeightedGraph::new(3).unwrap();
        g.add_edge(0, 1, int(1)).unwrap();
        g.add_edge(1, 2, int(1)).unwrap();
        let a = vertexcover_to_approx(
            &VertexCoverQuery::new(g, 1).unwrap(),
            2,
            ReduceOptions::default(),
        )
        .unwrap();
        assert_eq!(a.query.threshold_pow(), &int(2));
        assert_eq!(a.query.network().width(), 2 * (3 + 1));
        let layer = &a.query.network().layers()[0];
        assert_eq!(layer.bias()[3], int(-2 * 2));
        let z = [int(1), int(0), int(1)];
        assert_eq!(a.query.distance_pow_at(&z).unwrap().into_value(), int(2));
        assert_eq!(
            a.witness_map.from_latent(&z),
            Some(vec![false, true, false])
        );
    }

    #[test]
    fn triangle_has_no_single_cover() {
        let mut g = WeightedGraph::new(3).unwrap();
        g.add_edge(0, 1, int(1)).unwrap();
        g.add_edge(1, 2, int(1)).unwrap();
        g.add_edge(0, 2, int(1)).unwrap();
        let a = vertexcover_to_approx(
            &VertexCoverQuery::new(g, 1).unwrap(),
            2,
            ReduceOptions::default(),
        )
        .unwrap();
        for m in 0..8u32 {
            let z: Vec<Scalar> = (0..3).map(|i| int(((m >> i) & 1) as i64)).collect();
            assert!(!a.query.accepts(&z).unwrap(), "{m}");
        }
    }
}
