use invforge::instances::{gen_random_cvp, gen_random_ksat, gen_random_network, RationalRange};
use invforge::net::{deserialize, serialize};
use invforge::oracles::{
    invert_binary_bruteforce, invert_binary_naive, lp_feasible, ActivationPattern, LinearProgram,
    OracleConfig, Region, Relation,
};
use invforge::reductions::{
    cvp_to_approx_binary, sat_to_exact_binary, ReduceOptions, ReductionArtifact,
};
use invforge::scalar::{abs_pow, int, ratio, to_f64};
use invforge::{forward, forward_float, Scalar};
use proptest::prelude::*;

fn scalar() -> impl Strategy<Value = Scalar> {
    (-40i64..=40, 1i64..=8).prop_map(|(n, d)| ratio(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn float_forward_tracks_exact(seed in any::<u64>(), input in 1usize..6, depth in 1usize..5) {
        let net = gen_random_network(input, depth, 12, RationalRange::new(-10, 10, 8), seed).unwrap();
        let z: Vec<Scalar> = (0..input).map(|i| ratio((seed >> i) as i64 % 17 - 8, 4)).collect();
        let zf: Vec<f64> = z.iter().map(to_f64).collect();
        let exact = forward(&net, &z).unwrap();
        let float = forward_float(&net, &zf).unwrap();
        for (e, f) in exact.iter().zip(float) {
            let e = to_f64(e);
            prop_assert!((e - f).abs() <= 1e-6 * e.abs().max(1.0));
        }
    }

    #[test]
    fn networks_round_trip(seed in any::<u64>(), input in 1usize..6, depth in 1usize..6) {
        let net = gen_random_network(input, depth, 16, RationalRange::new(-10, 10, 8), seed).unwrap();
        let bytes = serialize(&net);
        let back = deserialize(&bytes).unwrap();
        prop_assert_eq!(&back, &net);
        prop_assert_eq!(serialize(&back), bytes);
    }

    #[test]
    fn outputs_are_nonnegative(seed in any::<u64>(), z in prop::collection::vec(scalar(), 3)) {
        let net = gen_random_network(3, 3, 8, RationalRange::new(-5, 5, 4), seed).unwrap();
        prop_assert!(forward(&net, &z).unwrap().iter().all(|v| *v >= int(0)));
    }

    #[test]
    fn region_contains_its_point_and_matches_forward(
        seed in any::<u64>(),
        z in prop::collection::vec(scalar(), 4),
    ) {
        let net = gen_random_network(4, 3, 6, RationalRange::new(-4, 4, 4), seed).unwrap();
        let region = Region::of(&net, &ActivationPattern::of(&net, &z).unwrap()).unwrap();
        prop_assert!(region.contains(&z));
        prop_assert_eq!(region.apply(&z), forward(&net, &z).unwrap());
    }

    #[test]
    fn lp_points_satisfy_every_constraint(
        rows in prop::collection::vec((prop::collection::vec(scalar(), 3), 0u8..3, scalar()), 1..7),
    ) {
        let mut lp = LinearProgram::new(3);
        for (coeffs, rel, rhs) in rows {
            let rel = [Relation::Le, Relation::Ge, Relation::Eq][rel as usize];
            lp.push(coeffs, rel, rhs);
        }
        if let (Some(point), _) = lp_feasible(&lp).unwrap() {
            prop_assert!(lp.satisfied_by(&point));
        }
    }

    #[test]
    fn pm_stacking_gives_absolute_values(seed in any::<u64>(), n in 1usize..4, p in prop::sample::select(vec![1u32, 3])) {
        let c = gen_random_cvp(n, 2, p, RationalRange::new(-3, 3, 4), seed).unwrap();
        let art = cvp_to_approx_binary(&c, ReduceOptions::default()).unwrap();
        let alpha_pow = abs_pow(art.constants.alpha.as_ref().unwrap(), p);
        for mask in 0..1u32 << (2 * n) {
            let z: Vec<Scalar> = (0..2 * n).map(|i| int(i64::from(mask >> (2 * n - 1 - i) & 1))).collect();
            let out = forward(art.query.network(), &z).unwrap();
            let y: Vec<bool> = (0..n).map(|i| z[2 * i] == int(1)).collect();
            let pairs: Scalar = (0..n).map(|i| &alpha_pow * abs_pow(&(&z[2 * i] + &z[2 * i + 1] - int(1)), p)).sum();
            let total: Scalar = out.iter().map(|v| abs_pow(v, p)).sum();
            prop_assert_eq!(total, c.residual_pow(&y) + pairs);
        }
    }

    #[test]
    fn fast_and_naive_inversion_agree(seed in any::<u64>(), n in 1usize..6, m in 0usize..8) {
        let f = gen_random_ksat(n, m, n.min(2), seed).unwrap();
        let art: ReductionArtifact = sat_to_exact_binary(&f).unwrap();
        let fast = invert_binary_bruteforce(&art.query, &OracleConfig::default()).unwrap();
        let naive = invert_binary_naive(&art.query).unwrap();
        prop_assert_eq!(fast.decision, naive.decision);
        prop_assert_eq!(fast.witness, naive.witness);
        prop_assert_eq!(fast.best, naive.best);
    }

    #[test]
    fn artifacts_round_trip_through_json(seed in any::<u64>(), n in 1usize..5) {
        let c = gen_random_cvp(n, 3, 1, RationalRange::new(-3, 3, 4), seed).unwrap();
        let art = cvp_to_approx_binary(&c, ReduceOptions::default()).unwrap();
        let back = ReductionArtifact::from_json(&art.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), art.to_json());
        prop_assert!(back.validate_constants().is_ok());
    }
}
