//! Binarization gadget: lifts a one-layer `{0,1}^N` query to `ℝ^N`.
//!
//! Layers 1–2 clamp each coordinate to `[0, U]` (`bv = U − v`), layer 3
//! computes `u_i = ReLU(offset − v_i)` and the two halves of `|v_i − U/2|`,
//! layer 4 collapses `t_i = ReLU(1 − s·u_i)` and sums the deviations, and
//! layer 5 applies the inner layer to `t` next to a copy of the sum. The
//! extra target coordinate is `N·U/2`, reached only when every `v_i` is
//! within `δ` of `0` or `U`, where `t` is exactly binary.

use num_traits::{One, Zero};
use serde_json::json;

use super::{
    Constants, GadgetMode, GadgetParams, InversionQuery, LatentDomain, ReductionArtifact,
    SparseRows, WitnessMap,
};
use crate::net::{Layer, ReluNetwork};
use crate::scalar::{self, Scalar};
use crate::{Error, Result};

pub fn binarization_gadget(
    inner: &ReductionArtifact,
    delta: Scalar,
    mode: GadgetMode,
) -> Result<ReductionArtifact> {
    let q = &inner.query;
    let LatentDomain::Binary01(n) = q.domain() else {
        return Err(Error::Unsupported(
            "the binarization gadget wraps {0,1}-latent queries only".into(),
        ));
    };
    if q.network().depth() != 1 {
        return Err(Error::Unsupported(format!(
            "the binarization gadget wraps one-layer networks, got depth {}",
            q.network().depth()
        )));
    }
    if inner.constants.gadget.is_some() {
        return Err(Error::Unsupported(
            "artifact already carries a gadget".into(),
        ));
    }
    let params = GadgetParams::new(delta, mode)?;
    if scalar::pow(&params.delta, q.p()) < *q.threshold_pow() {
        return Err(Error::Invalid(
            "gadget δ^p must be at least the query threshold".into(),
        ));
    }
    let one = Scalar::one();
    let zero = Scalar::zero();
    let upper = &params.upper;
    let half = upper / scalar::int(2);

    let l1 = Layer::from_sparse(
        n,
        (0..n)
            .map(|i| (vec![(i, one.clone())], zero.clone()))
            .collect(),
    )?;
    let l2 = Layer::from_sparse(
        n,
        (0..n)
            .map(|i| (vec![(i, -one.clone())], upper.clone()))
            .collect(),
    )?;

    let mut rows: SparseRows = Vec::with_capacity(3 * n);
    for i in 0..n {
        // offset − v_i = bv_i + offset − U
        rows.push((vec![(i, one.clone())], &params.offset - upper));
    }
    for i in 0..n {
        rows.push((vec![(i, -one.clone())], half.clone()));
        rows.push((vec![(i, one.clone())], -half.clone()));
    }
    let l3 = Layer::from_sparse(n, rows)?;

    let mut rows: SparseRows = (0..n)
        .map(|i| (vec![(i, -params.slope.clone())], one.clone()))
        .collect();
    rows.push(((n..3 * n).map(|j| (j, one.clone())).collect(), zero.clone()));
    let l4 = Layer::from_sparse(3 * n, rows)?;

    let base = &q.network().layers()[0];
    let mut rows: SparseRows = base
        .weights()
        .iter()
        .zip(base.bias())
        .map(|(w, b)| {
            let entries = w
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect();
            (entries, b.clone())
        })
        .collect();
    rows.push((vec![(n, one.clone())], zero.clone()));
    let l5 = Layer::from_sparse(n + 1, rows)?;

    let mut meta = q.network().metadata().clone();
    if let Some(obj) = meta.as_object_mut() {
        obj.insert(
            "gadget".into(),
            json!({"mode": format!("{mode:?}").to_lowercase(), "delta": scalar::format_scalar(&params.delta)}),
        );
    }
    let net = ReluNetwork::with_metadata(n, vec![l1, l2, l3, l4, l5], meta)?;
    let mut target = q.target().to_vec();
    target.push(scalar::int(n as i64) * &half);
    let query = InversionQuery::new(
        net,
        target,
        q.p(),
        q.threshold_pow().clone(),
        q.comparison(),
        LatentDomain::Real(n),
    )?;
    let witness_map = WitnessMap::Scaled {
        factor: upper.clone(),
        inner: Box::new(inner.witness_map.clone()),
    };
    Ok(ReductionArtifact {
        query,
        constants: Constants {
            gadget: Some(params),
            ..inner.constants.clone()
        },
        witness_map,
        source: inner.source.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::parse_cvp;
    use crate::net::forward_trace;
    use crate::reductions::{cvp_to_approx_binary, sat_to_exact_binary, ReduceOptions};
    use crate::scalar::{int, ratio};

    fn inner(radius: &str) -> ReductionArtifact {
        let text = format!("cvp 2 2 1\n1 0\n0 1\n1 0\n{radius}\n");
        cvp_to_approx_binary(&parse_cvp(&text).unwrap(), ReduceOptions::default()).unwrap()
    }

    #[test]
    fn quarter_mode_target() {
        let a = binarization_gadget(&inner("1/8"), ratio(1, 8), GadgetMode::Quarter).unwrap();
        assert_eq!(a.query.network().depth(), 5);
        assert_eq!(a.query.domain(), LatentDomain::Real(4));
        assert_eq!(a.query.target().last(), Some(&int(2)));
        assert!(a.validate_constants().is_ok());
    }

    #[test]
    fn binary_points_reach_the_sum_target() {
        for (radius, mode) in [("1/8", GadgetMode::Quarter), ("1/2", GadgetMode::General)] {
            let delta = scalar::parse_scalar(radius).unwrap();
            let a = binarization_gadget(&inner(radius), delta, mode).unwrap();
            let u = a.constants.gadget.as_ref().unwrap().upper.clone();
            for m in 0..16u32 {
                let bits: Vec<Scalar> = (0..4).map(|i| int(((m >> i) & 1) as i64)).collect();
                let z: Vec<Scalar> = bits.iter().map(|b| b * &u).collect();
                let trace = forward_trace(a.query.network(), &z).unwrap();
                // layer 4 reproduces the bits
                assert_eq!(&trace[3][..4], &bits[..]);
                assert_eq!(trace[4].last(), a.query.target().last());
            }
        }
    }

    #[test]
    fn witness_survives_the_gadget() {
        let base = inner("0");
        let a = binarization_gadget(&base, int(0), GadgetMode::Quarter).unwrap();
        let z = a.witness_map.to_latent(&[true, false]);
        assert_eq!(z, vec![int(1), int(0), int(0), int(1)]);
        assert!(a.query.accepts(&z).unwrap());
        assert_eq!(a.witness_map.from_latent(&z), Some(vec![true, false]));
    }

    #[test]
    fn general_mode_half() {
        let a = binarization_gadget(&inner("1/2"), ratio(1, 2), GadgetMode::General).unwrap();
        let g = a.constants.gadget.as_ref().unwrap();
        assert_eq!(g.c, Some(int(5)));
        assert_eq!(a.query.target().last(), Some(&int(5)));
    }

    #[test]
    fn rejects_unsuitable_inputs() {
        let sat = sat_to_exact_binary(&crate::instances::parse_dimacs("p cnf 1 1\n1 0\n").unwrap())
            .unwrap();
        assert!(binarization_gadget(&sat, ratio(1, 8), GadgetMode::Quarter).is_err());
        assert!(binarization_gadget(&inner("1/8"), ratio(1, 4), GadgetMode::Quarter).is_err());
        assert!(binarization_gadget(&inner("1/2"), ratio(1, 4), GadgetMode::General).is_err());
    }
}
