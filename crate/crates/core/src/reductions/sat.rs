//! k-SAT to exact inversion, over `{−1, 1}^n` and over `ℝ^n`.

use num_traits::{One, Zero};
use serde_json::json;

use super::{
    Comparison, Constants, InversionQuery, LatentDomain, ReductionArtifact, SourceRecord,
    SparseRows, WitnessMap,
};
use crate::instances::CnfFormula;
use crate::net::{Layer, ReluNetwork};
use crate::scalar::{self, Scalar};
use crate::Result;

/// Clause coefficients: `−1` for a positive literal, `+1` for a negative one.
fn clause_rows(f: &CnfFormula) -> Vec<Vec<(usize, Scalar)>> {
    f.clauses()
        .iter()
        .map(|clause| {
            clause
                .iter()
                .map(|lit| {
                    let c = if lit.is_positive() { -1 } else { 1 };
                    (lit.var() - 1, scalar::int(c))
                })
                .collect()
        })
        .collect()
}

fn slack(f: &CnfFormula) -> Scalar {
    scalar::int(f.k() as i64 - 1)
}

fn all_ones_row(cols: usize) -> (Vec<(usize, Scalar)>, Scalar) {
    (
        (0..cols).map(|i| (i, Scalar::one())).collect(),
        Scalar::zero(),
    )
}

/// Two layers: one ReLU unit per clause that fires (with value 1) exactly
/// when the clause is falsified by a `±1` latent, then their sum. The target
/// is `(0)`.
pub fn sat_to_exact_binary(f: &CnfFormula) -> Result<ReductionArtifact> {
    let n = f.num_vars();
    let m = f.num_clauses();
    let b = -slack(f);
    let rows: SparseRows = clause_rows(f).into_iter().map(|r| (r, b.clone())).collect();
    let l1 = Layer::from_sparse(n, rows)?;
    let l2 = Layer::from_sparse(m, vec![all_ones_row(m)])?;
    let net = ReluNetwork::with_metadata(
        n,
        vec![l1, l2],
        json!({"reduction": "sat", "vars": n, "clauses": m, "k": f.k()}),
    )?;
    let query = InversionQuery::new(
        net,
        vec![Scalar::zero()],
        1,
        Scalar::zero(),
        Comparison::NonStrict,
        LatentDomain::BinaryPm1(n),
    )?;
    Ok(ReductionArtifact {
        query,
        constants: Constants::default(),
        witness_map: WitnessMap::SatSign { num_vars: n },
        source: SourceRecord {
            family: "sat".into(),
            text: f.to_dimacs(),
        },
    })
}

/// Four layers over `ℝ^n`. With `v = clamp(z, −1, 1)` computed as
/// `v = 1 − ReLU(2 − ReLU(z + 1))`, the outputs are
/// `(Σ_j ReLU(⟨c_j, v⟩ − (k−1)), Σ_i |v_i|)` and the target is `(0, n)`.
pub fn sat_to_exact_real(f: &CnfFormula) -> Result<ReductionArtifact> {
    let n = f.num_vars();
    let m = f.num_clauses();
    let one = Scalar::one();
    let two = scalar::int(2);

    // a = ReLU(z + 1)
    let l1 = Layer::from_sparse(
        n,
        (0..n)
            .map(|i| (vec![(i, one.clone())], one.clone()))
            .collect(),
    )?;
    // bv = ReLU(2 − a), so v = 1 − bv
    let l2 = Layer::from_sparse(
        n,
        (0..n)
            .map(|i| (vec![(i, -one.clone())], two.clone()))
            .collect(),
    )?;

    let mut rows: SparseRows = Vec::with_capacity(m + 2 * n);
    for coeffs in clause_rows(f) {
        // ⟨c, 1 − bv⟩ − (k−1)
        let bias = coeffs.iter().fold(-slack(f), |acc, (_, c)| acc + c);
        let entries = coeffs.into_iter().map(|(i, c)| (i, -c)).collect();
        rows.push((entries, bias));
    }
    for i in 0..n {
        // ReLU(v_i) and ReLU(−v_i)
        rows.push((vec![(i, -one.clone())], one.clone()));
        rows.push((vec![(i, one.clone())], -one.clone()));
    }
    let l3 = Layer::from_sparse(n, rows)?;

    let h3 = m + 2 * n;
    let l4 = Layer::from_sparse(
        h3,
        vec![
            ((0..m).map(|j| (j, one.clone())).collect(), Scalar::zero()),
            ((m..h3).map(|j| (j, one.clone())).collect(), Scalar::zero()),
        ],
    )?;
    let net = ReluNetwork::with_metadata(
        n,
        vec![l1, l2, l3, l4],
        json!({"reduction": "sat-real", "vars": n, "clauses": m, "k": f.k()}),
    )?;
    let query = InversionQuery::new(
        net,
        vec![Scalar::zero(), scalar::int(n as i64)],
        1,
        Scalar::zero(),
        Comparison::NonStrict,
        LatentDomain::Real(n),
    )?;
    Ok(ReductionArtifact {
        query,
        constants: Constants::default(),
        witness_map: WitnessMap::SatSign { num_vars: n },
        source: SourceRecord {
            family: "sat-real".into(),
            text: f.to_dimacs(),
        },
    })
}
