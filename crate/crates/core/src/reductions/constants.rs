//! Deterministic choice of the reduction constants α, β, c and the gadget
//! parameters, each paired with a checkable validity predicate.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::scalar::{self, floor_root_int, pow, split_pth_power, Scalar};
use crate::{Error, Result};

/// `α = r + 1`, so that `α > r`.
pub fn choose_alpha_cvp(radius: &Scalar) -> Result<Scalar> {
    if radius.is_negative() {
        return Err(Error::Invalid("radius must be nonnegative".into()));
    }
    Ok(radius + Scalar::one())
}

/// `α = 1`; any positive value works because `3^p > 1`.
pub fn choose_alpha_vc() -> Scalar {
    Scalar::one()
}

/// `α^p` for the Half-Clique construction, realized exactly as `copies`
/// replicated rows each contributing `base^p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfCliqueAlpha {
    pub alpha_pow: BigInt,
    pub copies: BigInt,
    pub base: BigInt,
}

/// `α^p = ⌈M + Σw⌉ + 1` (at least 1), split as `copies · base^p`.
pub fn choose_alpha_halfclique(
    p: u32,
    weight_sum: &Scalar,
    bound: &Scalar,
) -> Result<HalfCliqueAlpha> {
    if p == 0 {
        return Err(Error::Invalid("norm exponent p must be positive".into()));
    }
    if bound.is_negative() || weight_sum.is_negative() {
        return Err(Error::Invalid(
            "half-clique bound and weights must be nonnegative".into(),
        ));
    }
    let alpha_pow = (bound + weight_sum).ceil().to_integer() + BigInt::one();
    let alpha_pow = alpha_pow.max(BigInt::one());
    let (copies, base) = split_pth_power(&alpha_pow, p);
    Ok(HalfCliqueAlpha {
        alpha_pow,
        copies,
        base,
    })
}

/// Smallest integer `β` with `β^p > θ`.
pub fn choose_beta(threshold_pow: &Scalar, p: u32) -> Result<Scalar> {
    if threshold_pow.is_negative() {
        return Err(Error::Invalid("threshold must be nonnegative".into()));
    }
    let mut beta = floor_root_int(threshold_pow, p);
    while Scalar::from_integer(beta.pow(p)) <= *threshold_pow {
        beta += 1;
    }
    Ok(Scalar::from_integer(beta))
}

/// `c = ⌈2 + 1/δ⌉ + 1`.
pub fn choose_c(delta: &Scalar) -> Result<Scalar> {
    if !delta.is_positive() {
        return Err(Error::Invalid("gadget δ must be positive".into()));
    }
    Ok((scalar::int(2) + delta.recip()).ceil() + Scalar::one())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GadgetMode {
    /// Clamp to `[0, 1]`, collapse slope 4; needs `δ < 1/4`.
    Quarter,
    /// Clamp to `[0, cδ]`, collapse slope 1.
    General,
}

impl GadgetMode {
    /// Quarter mode whenever it is admissible.
    pub fn for_delta(delta: &Scalar) -> Self {
        if *delta < scalar::ratio(1, 4) {
            GadgetMode::Quarter
        } else {
            GadgetMode::General
        }
    }
}

/// Binarization gadget parameters: coordinates are clamped to `[0, upper]`,
/// `u_i = ReLU(offset − v_i)` and `t_i = ReLU(1 − slope·u_i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GadgetParams {
    pub mode: GadgetMode,
    #[serde(with = "scalar::serde_str")]
    pub delta: Scalar,
    #[serde(
        with = "scalar::serde_str::option",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub c: Option<Scalar>,
    #[serde(with = "scalar::serde_str")]
    pub upper: Scalar,
    #[serde(with = "scalar::serde_str")]
    pub offset: Scalar,
    #[serde(with = "scalar::serde_str")]
    pub slope: Scalar,
}

impl GadgetParams {
    pub fn new(delta: Scalar, mode: GadgetMode) -> Result<Self> {
        match mode {
            GadgetMode::Quarter => {
                if delta.is_negative() || delta >= scalar::ratio(1, 4) {
                    return Err(Error::Invalid(format!(
                        "quarter mode needs 0 <= δ < 1/4, got {}",
                        scalar::format_scalar(&delta)
                    )));
                }
                Ok(GadgetParams {
                    mode,
                    delta,
                    c: None,
                    upper: Scalar::one(),
                    offset: scalar::ratio(1, 2),
                    slope: scalar::int(4),
                })
            }
            GadgetMode::General => {
                let c = choose_c(&delta)?;
                Ok(GadgetParams {
                    mode,
                    upper: &c * &delta,
                    offset: (&c - Scalar::one()) * &delta,
                    c: Some(c),
                    delta,
                    slope: Scalar::one(),
                })
            }
        }
    }

    fn checks(&self, p: u32, threshold_pow: &Scalar) -> Vec<ConstantCheck> {
        let mut out = vec![
            ConstantCheck::new(
                "gadget: delta^p >= theta",
                pow(&self.delta, p) >= *threshold_pow,
            ),
            ConstantCheck::new(
                "gadget: offset <= U - delta",
                self.offset <= &self.upper - &self.delta,
            ),
            ConstantCheck::new(
                "gadget: slope*(offset - delta) >= 1",
                &self.slope * (&self.offset - &self.delta) >= Scalar::one(),
            ),
        ];
        match self.mode {
            GadgetMode::Quarter => out.push(ConstantCheck::new(
                "gadget: delta < 1/4",
                self.delta < scalar::ratio(1, 4),
            )),
            GadgetMode::General => {
                let holds = self
                    .c
                    .as_ref()
                    .is_some_and(|c| (c - scalar::int(2)) * &self.delta >= Scalar::one());
                out.push(ConstantCheck::new("gadget: (c-2)*delta >= 1", holds));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantCheck {
    pub name: &'static str,
    pub holds: bool,
}

impl ConstantCheck {
    fn new(name: &'static str, holds: bool) -> Self {
        ConstantCheck { name, holds }
    }
}

/// Constants an artifact was compiled with. Absent fields do not apply to
/// the reduction.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    #[serde(
        with = "scalar::serde_str::option",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub alpha: Option<Scalar>,
    #[serde(
        with = "scalar::serde_str::option",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub alpha_pow: Option<Scalar>,
    #[serde(
        with = "scalar::serde_str::option",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub alpha_copies: Option<Scalar>,
    #[serde(
        with = "scalar::serde_str::option",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub alpha_base: Option<Scalar>,
    #[serde(
        with = "scalar::serde_str::option",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub beta: Option<Scalar>,
    #[serde(
        with = "scalar::serde_str::option",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub radius: Option<Scalar>,
    #[serde(
        with = "scalar::serde_str::option",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub weight_sum: Option<Scalar>,
    #[serde(
        with = "scalar::serde_str::option",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub bound: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gadget: Option<GadgetParams>,
}

impl Constants {
    pub fn named_values(&self) -> Vec<(&'static str, String)> {
        let fields = [
            ("alpha", &self.alpha),
            ("alpha_pow", &self.alpha_pow),
            ("alpha_copies", &self.alpha_copies),
            ("alpha_base", &self.alpha_base),
            ("beta", &self.beta),
            ("radius", &self.radius),
            ("weight_sum", &self.weight_sum),
            ("bound", &self.bound),
        ];
        let mut out: Vec<(&'static str, String)> = fields
            .into_iter()
            .filter_map(|(name, v)| v.as_ref().map(|v| (name, scalar::format_scalar(v))))
            .collect();
        if let Some(g) = &self.gadget {
            out.push(("gadget_mode", format!("{:?}", g.mode).to_lowercase()));
            out.push(("delta", scalar::format_scalar(&g.delta)));
            if let Some(c) = &g.c {
                out.push(("c", scalar::format_scalar(c)));
            }
            out.push(("upper", scalar::format_scalar(&g.upper)));
            out.push(("slope", scalar::format_scalar(&g.slope)));
        }
        out
    }

    /// Every predicate that applies to the populated fields.
    pub fn checks(&self, p: u32, threshold_pow: &Scalar) -> Vec<ConstantCheck> {
        let mut out = Vec::new();
        let three_p_minus_one = pow(&scalar::int(3), p) - Scalar::one();
        match (&self.alpha, &self.radius) {
            (Some(alpha), Some(r)) => out.push(ConstantCheck::new("alpha > r", alpha > r)),
            (Some(alpha), None) => out.push(ConstantCheck::new("alpha > 0", alpha.is_positive())),
            _ => {}
        }
        if let (Some(ap), Some(w), Some(m)) = (&self.alpha_pow, &self.weight_sum, &self.bound) {
            out.push(ConstantCheck::new(
                "(3^p-1)*alpha^p > sum_w + (3^p-1)*M",
                &three_p_minus_one * ap > w + &three_p_minus_one * m,
            ));
        }
        if let (Some(ap), Some(k), Some(a)) =
            (&self.alpha_pow, &self.alpha_copies, &self.alpha_base)
        {
            out.push(ConstantCheck::new(
                "alpha^p = copies * base^p",
                *ap == k * pow(a, p) && k.is_positive() && a.is_positive(),
            ));
        }
        if let Some(beta) = &self.beta {
            out.push(ConstantCheck::new(
                "beta^p > theta",
                pow(beta, p) > *threshold_pow,
            ));
        }
        if let Some(g) = &self.gadget {
            out.extend(g.checks(p, threshold_pow));
        }
        out
    }
}

pub(crate) fn as_scalar(v: &BigInt) -> Scalar {
    Scalar::from_integer(v.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    #[test]
    fn cvp_alpha() {
        assert_eq!(choose_alpha_cvp(&ratio(1, 2)).unwrap(), ratio(3, 2));
        assert!(choose_alpha_cvp(&int(-1)).is_err());
    }

    #[test]
    fn halfclique_alpha_example() {
        let a = choose_alpha_halfclique(2, &int(5), &int(2)).unwrap();
        assert_eq!(a.alpha_pow, BigInt::from(8));
        assert_eq!((a.copies, a.base), (BigInt::from(2), BigInt::from(2)));
        // 8 * (9 - 1) = 64 > 5 + 8 * 2 = 21
        let c = Constants {
            alpha_pow: Some(int(8)),
            weight_sum: Some(int(5)),
            bound: Some(int(2)),
            ..Default::default()
        };
        assert!(c.checks(2, &int(53)).iter().all(|c| c.holds));
    }

    #[test]
    fn beta_exceeds_threshold() {
        assert_eq!(choose_beta(&int(53), 2).unwrap(), int(8));
        assert_eq!(choose_beta(&int(49), 2).unwrap(), int(8));
        assert_eq!(choose_beta(&int(0), 2).unwrap(), int(1));
        assert_eq!(choose_beta(&ratio(1, 2), 1).unwrap(), int(1));
    }

    #[test]
    fn c_for_half() {
        assert_eq!(choose_c(&ratio(1, 2)).unwrap(), int(5));
        assert_eq!(choose_c(&ratio(1, 3)).unwrap(), int(6));
        assert!(choose_c(&int(0)).is_err());
    }

    #[test]
    fn gadget_parameters() {
        let q = GadgetParams::new(ratio(1, 8), GadgetMode::Quarter).unwrap();
        assert_eq!((q.upper.clone(), q.slope.clone()), (int(1), int(4)));
        assert!(q.checks(1, &ratio(1, 8)).iter().all(|c| c.holds));
        assert!(GadgetParams::new(ratio(1, 4), GadgetMode::Quarter).is_err());

        let g = GadgetParams::new(ratio(1, 2), GadgetMode::General).unwrap();
        assert_eq!(g.c, Some(int(5)));
        assert_eq!(g.upper, ratio(5, 2));
        assert_eq!(g.offset, int(2));
        assert!(g.checks(1, &ratio(1, 2)).iter().all(|c| c.holds));
        // the threshold may not exceed δ^p
        assert!(!g.checks(1, &int(1)).iter().all(|c| c.holds));
    }
}
