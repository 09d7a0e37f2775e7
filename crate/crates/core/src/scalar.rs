//! Exact rational scalars and the small numeric helpers built on them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational, always kept in canonical reduced form.
pub type Scalar = BigRational;

pub fn int(v: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Scalar {
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `a`, `a/b` or a plain decimal such as `-0.125`.
pub fn parse_scalar(text: &str) -> std::result::Result<Scalar, String> {
    let t = text.trim();
    if t.is_empty() {
        return Err("empty rational".into());
    }
    if let Some((num, den)) = t.split_once('/') {
        let num: BigInt = num
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in {t:?}"))?;
        let den: BigInt = den
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in {t:?}"))?;
        if den.is_zero() {
            return Err(format!("zero denominator in {t:?}"));
        }
        return Ok(Scalar::new(num, den));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let digits_ok = |s: &str| s.chars().all(|c| c.is_ascii_digit());
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if frac.is_empty() || !digits_ok(frac) || !digits_ok(whole_digits) {
            return Err(format!("bad decimal {t:?}"));
        }
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let w: BigInt = if whole_digits.is_empty() {
            BigInt::zero()
        } else {
            whole_digits
                .parse()
                .map_err(|_| format!("bad decimal {t:?}"))?
        };
        let f: BigInt = frac.parse().map_err(|_| format!("bad decimal {t:?}"))?;
        let mag = Scalar::new(w * &scale + f, scale);
        return Ok(if negative { -mag } else { mag });
    }
    let v: BigInt = t.parse().map_err(|_| format!("bad rational {t:?}"))?;
    Ok(Scalar::from_integer(v))
}

/// Canonical `num/den` rendering; integers keep the `/1`.
pub fn format_scalar(v: &Scalar) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

pub fn pow(v: &Scalar, p: u32) -> Scalar {
    // gcd(a, b) = 1 implies gcd(a^p, b^p) = 1, so the raw ratio is canonical.
    Scalar::new_raw(v.numer().pow(p), v.denom().pow(p))
}

pub fn abs_pow(v: &Scalar, p: u32) -> Scalar {
    pow(&v.abs(), p)
}

pub fn to_f64(v: &Scalar) -> f64 {
    v.to_f64().unwrap_or_else(|| {
        if v.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact dyadic value of a finite float.
pub fn from_f64_exact(x: f64) -> Option<Scalar> {
    Scalar::from_float(x)
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// taken from the continued-fraction convergents.
pub fn rationalize(x: f64, max_den: u64) -> Option<Scalar> {
    if !x.is_finite() || max_den == 0 {
        return None;
    }
    let negative = x < 0.0;
    let mut rem = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    for _ in 0..64 {
        let a = rem.floor();
        if a > 1e30 {
            break;
        }
        let a_int = a as u128;
        let p2 = a_int.checked_mul(p1).and_then(|v| v.checked_add(p0));
        let q2 = a_int.checked_mul(q1).and_then(|v| v.checked_add(q0));
        let (Some(p2), Some(q2)) = (p2, q2) else {
            break;
        };
        if q2 > max_den as u128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = rem - a;
        if frac < 1e-15 {
            break;
        }
        rem = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    let v = Scalar::new(BigInt::from(p1), BigInt::from(q1));
    Some(if negative { -v } else { v })
}

/// Exact p-th root when `v` is a perfect rational p-th power.
pub fn exact_root(v: &Scalar, p: u32) -> Option<Scalar> {
    if v.is_negative() && p.is_multiple_of(2) {
        return None;
    }
    let root_int = |x: &BigInt| -> Option<BigInt> {
        let r = x.abs().nth_root(p);
        (r.pow(p) == x.abs()).then(|| if x.is_negative() { -r } else { r })
    };
    Some(Scalar::new(root_int(v.numer())?, root_int(v.denom())?))
}

/// Smallest nonnegative integer `k` with `k^p >= v` (for `v >= 0`).
pub fn ceil_root_int(v: &Scalar, p: u32) -> BigInt {
    if !v.is_positive() {
        return BigInt::zero();
    }
    let ceil = v.ceil().to_integer();
    let mut k = ceil.nth_root(p);
    while Scalar::from_integer(k.pow(p)) < *v {
        k += 1;
    }
    k
}

/// Largest integer `k` with `k^p <= v` (for `v >= 0`).
pub fn floor_root_int(v: &Scalar, p: u32) -> BigInt {
    if !v.is_positive() {
        return BigInt::zero();
    }
    v.floor().to_integer().nth_root(p)
}

/// A rational `d >= v^(1/p)`: the exact root when it exists, otherwise the
/// smallest integer above the root, or `1/k` for the largest valid `k` when
/// the root is below one.
pub fn root_upper_bound(v: &Scalar, p: u32) -> Scalar {
    if let Some(r) = exact_root(v, p) {
        return r;
    }
    if *v >= Scalar::one() {
        return Scalar::from_integer(ceil_root_int(v, p));
    }
    // v in (0, 1): want the largest k with k^p * v <= 1.
    let k = floor_root_int(&v.recip(), p);
    Scalar::new(BigInt::one(), k.max(BigInt::one()))
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Scalar>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Splits a positive integer `v` as `copies * base^p` with `base` as large as
/// possible.
pub fn split_pth_power(v: &BigInt, p: u32) -> (BigInt, BigInt) {
    assert!(v.is_positive(), "split_pth_power needs a positive integer");
    let mut base = v.nth_root(p);
    while base > BigInt::one() {
        let bp = base.pow(p);
        if v.is_multiple_of(&bp) {
            return (v / bp, base);
        }
        base -= 1;
    }
    (v.clone(), BigInt::one())
}

/// Serde adapters storing rationals as `num/den` strings.
pub mod serde_str {
    use super::{format_scalar, parse_scalar, Scalar};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Scalar, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_scalar(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Scalar, D::Error> {
        let text = String::deserialize(d)?;
        parse_scalar(&text).map_err(D::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Scalar], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&format_scalar(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Scalar>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|t| parse_scalar(t).map_err(D::Error::custom))
                .collect()
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(v: &Option<Scalar>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(x) => s.serialize_some(&format_scalar(x)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Scalar>, D::Error> {
            Option::<String>::deserialize(d)?
                .map(|t| parse_scalar(&t).map_err(D::Error::custom))
                .transpose()
        }
    }

    pub mod option_vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &Option<Vec<Scalar>>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(xs) => s.serialize_some(&xs.iter().map(format_scalar).collect::<Vec<_>>()),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Option<Vec<Scalar>>, D::Error> {
            Option::<Vec<String>>::deserialize(d)?
                .map(|xs| {
                    xs.iter()
                        .map(|t| parse_scalar(t).map_err(D::Error::custom))
                        .collect()
                })
                .transpose()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_scalar("3").unwrap(), int(3));
        assert_eq!(parse_scalar("-6/4").unwrap(), ratio(-3, 2));
        assert_eq!(parse_scalar("0.125").unwrap(), ratio(1, 8));
        assert_eq!(parse_scalar("-1.5").unwrap(), ratio(-3, 2));
        assert_eq!(parse_scalar("-0.5").unwrap(), ratio(-1, 2));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("").is_err());
        assert!(parse_scalar("x").is_err());
        assert!(parse_scalar("1.").is_err());
    }

    #[test]
    fn canonical_format() {
        assert_eq!(format_scalar(&ratio(4, -6)), "-2/3");
        assert_eq!(format_scalar(&int(5)), "5/1");
        assert_eq!(format_scalar(&int(0)), "0/1");
    }

    #[test]
    fn roots() {
        assert_eq!(exact_root(&ratio(8, 27), 3), Some(ratio(2, 3)));
        assert_eq!(exact_root(&int(8), 2), None);
        assert_eq!(ceil_root_int(&int(53), 2), BigInt::from(8));
        assert_eq!(ceil_root_int(&int(49), 2), BigInt::from(7));
        assert_eq!(floor_root_int(&int(53), 2), BigInt::from(7));
        assert_eq!(root_upper_bound(&int(53), 2), int(8));
        assert_eq!(root_upper_bound(&ratio(1, 4), 2), ratio(1, 2));
        // sqrt(1/5) ~ 0.447 <= 1/2
        assert_eq!(root_upper_bound(&ratio(1, 5), 2), ratio(1, 2));
    }

    #[test]
    fn pth_power_split() {
        assert_eq!(
            split_pth_power(&BigInt::from(8), 2),
            (BigInt::from(2), BigInt::from(2))
        );
        assert_eq!(
            split_pth_power(&BigInt::from(7), 2),
            (BigInt::from(7), BigInt::from(1))
        );
        assert_eq!(
            split_pth_power(&BigInt::from(48), 4),
            (BigInt::from(3), BigInt::from(2))
        );
    }

    #[test]
    fn rationalize_convergents() {
        assert_eq!(rationalize(0.5, 10), Some(ratio(1, 2)));
        assert_eq!(rationalize(-0.3333333333, 100), Some(ratio(-1, 3)));
        assert_eq!(rationalize(0.2857142857, 10), Some(ratio(2, 7)));
        assert_eq!(rationalize(2.0, 1), Some(int(2)));
        assert_eq!(rationalize(f64::NAN, 10), None);
    }
}
