//! (0,1)-CVP instances: basis `B` (d×n, columns are lattice vectors), target
//! `t`, radius `r` and norm exponent `p`.

use std::fmt::Write as _;

use num_traits::{Signed, Zero};

use crate::scalar::{abs_pow, format_scalar, parse_scalar, Scalar};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CvpInstance {
    basis: Vec<Vec<Scalar>>,
    num_cols: usize,
    target: Vec<Scalar>,
    radius: Scalar,
    p: u32,
    gap: Option<Scalar>,
}

impl CvpInstance {
    /// `basis` is given row by row (`d` rows of `n` entries).
    pub fn new(
        basis: Vec<Vec<Scalar>>,
        target: Vec<Scalar>,
        radius: Scalar,
        p: u32,
        gap: Option<Scalar>,
    ) -> Result<Self> {
        let d = basis.len();
        if d == 0 {
            return Err(Error::Invalid("basis needs at least one row".into()));
        }
        let n = basis[0].len();
        if n == 0 {
            return Err(Error::Invalid("basis needs at least one column".into()));
        }
        if basis.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("basis rows have unequal lengths".into()));
        }
        if target.len() != d {
            return Err(Error::Dimension(format!(
                "target has length {}, basis has {d} rows",
                target.len()
            )));
        }
        if radius.is_negative() {
            return Err(Error::Invalid("radius must be nonnegative".into()));
        }
        if p == 0 {
            return Err(Error::Invalid("norm exponent p must be positive".into()));
        }
        if gap.as_ref().is_some_and(Signed::is_negative) {
            return Err(Error::Invalid("gap must be nonnegative".into()));
        }
        Ok(CvpInstance {
            basis,
            num_cols: n,
            target,
            radius,
            p,
            gap,
        })
    }

    /// Ambient dimension `d`.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Number of basis vectors `n`.
    pub fn num_vectors(&self) -> usize {
        self.num_cols
    }

    pub fn basis_rows(&self) -> &[Vec<Scalar>] {
        &self.basis
    }

    pub fn entry(&self, row: usize, col: usize) -> &Scalar {
        &self.basis[row][col]
    }

    pub fn target(&self) -> &[Scalar] {
        &self.target
    }

    pub fn radius(&self) -> &Scalar {
        &self.radius
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn gap(&self) -> Option<&Scalar> {
        self.gap.as_ref()
    }

    pub fn with_radius(&self, radius: Scalar) -> Result<Self> {
        CvpInstance::new(
            self.basis.clone(),
            self.target.clone(),
            radius,
            self.p,
            self.gap.clone(),
        )
    }

    /// `‖B y − t‖_p^p` for a coefficient vector `y ∈ {0,1}^n`.
    pub fn residual_pow(&self, y: &[bool]) -> Scalar {
        self.basis
            .iter()
            .zip(&self.target)
            .fold(Scalar::zero(), |acc, (row, t)| {
                let dot = row
                    .iter()
                    .zip(y)
                    .filter(|(_, &bit)| bit)
                    .fold(-t, |s, (b, _)| s + b);
                acc + abs_pow(&dot, self.p)
            })
    }

    pub fn to_text(&self) -> String {
        let join = |v: &[Scalar]| v.iter().map(format_scalar).collect::<Vec<_>>().join(" ");
        let mut out = format!("cvp {} {} {}\n", self.dim(), self.num_cols, self.p);
        for row in &self.basis {
            let _ = writeln!(out, "{}", join(row));
        }
        let _ = writeln!(out, "{}", join(&self.target));
        let _ = writeln!(out, "{}", format_scalar(&self.radius));
        if let Some(g) = &self.gap {
            let _ = writeln!(out, "{}", format_scalar(g));
        }
        out
    }
}

/// `cvp <d> <n> <p>`, `d` basis rows of `n` rationals, the target row, the
/// radius line and an optional gap line. Blank lines and `#` comments are
/// skipped.
pub fn parse_cvp(text: &str) -> Result<CvpInstance> {
    let lines: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| (i, l.split_whitespace().collect()))
        .collect();
    let Some((hline, header)) = lines.first() else {
        return Err(Error::parse(0, "missing `cvp <d> <n> <p>` header"));
    };
    if header.len() != 4 || header[0] != "cvp" {
        return Err(Error::parse(*hline, "expected header `cvp <d> <n> <p>`"));
    }
    let num = |s: &str, what: &str| -> Result<usize> {
        s.parse()
            .map_err(|_| Error::parse(*hline, format!("bad {what}")))
    };
    let (d, n) = (
        num(header[1], "dimension")?,
        num(header[2], "vector count")?,
    );
    let p = num(header[3], "exponent")? as u32;
    let rationals = |line: usize, toks: &[&str], want: usize| -> Result<Vec<Scalar>> {
        if toks.len() != want {
            return Err(Error::parse(
                line,
                format!("expected {want} entries, found {}", toks.len()),
            ));
        }
        toks.iter()
            .map(|t| parse_scalar(t).map_err(|e| Error::parse(line, e)))
            .collect()
    };
    let body = &lines[1..];
    if body.len() < d + 2 || body.len() > d + 3 {
        return Err(Error::parse(
            0,
            format!(
                "expected {} to {} lines after header, found {}",
                d + 2,
                d + 3,
                body.len()
            ),
        ));
    }
    let basis = body[..d]
        .iter()
        .map(|(l, t)| rationals(*l, t, n))
        .collect::<Result<Vec<_>>>()?;
    let target = rationals(body[d].0, &body[d].1, d)?;
    let radius = rationals(body[d + 1].0, &body[d + 1].1, 1)?.remove(0);
    let gap = match body.get(d + 2) {
        Some((l, t)) => Some(rationals(*l, t, 1)?.remove(0)),
        None => None,
    };
    CvpInstance::new(basis, target, radius, p, gap).map_err(|e| match e {
        Error::Parse { .. } => e,
        other => Error::parse(0, other.to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    #[test]
    fn one_by_one() {
        let c = parse_cvp("cvp 1 1 1\n1\n2\n1/2\n").unwrap();
        assert_eq!(c.basis_rows(), &[vec![int(1)]]);
        assert_eq!(c.target(), &[int(2)]);
        assert_eq!(c.radius(), &ratio(1, 2));
        assert_eq!(c.gap(), None);
        assert_eq!(c.residual_pow(&[true]), int(1));
        assert_eq!(c.residual_pow(&[false]), int(2));
    }

    #[test]
    fn round_trip_with_gap() {
        let text = "cvp 2 3 3\n1/1 0/1 -1/2\n2/1 1/1 0/1\n1/1 1/1\n3/2\n1/4\n";
        let c = parse_cvp(text).unwrap();
        assert_eq!(c.gap(), Some(&ratio(1, 4)));
        assert_eq!(c.to_text(), text);
    }

    #[test]
    fn rejects_bad_documents() {
        for doc in [
            "cvp 1 1 1\n1 2\n2\n1\n",
            "cvp 2 1 1\n1\n2\n1\n",
            "cvp 1 1 1\n1\n2\n-1\n",
            "cvp 1 1 0\n1\n2\n1\n",
            "cvp 1 1\n1\n2\n1\n",
            "cvp 1 1 1\n1\n2 3\n1\n",
            "",
        ] {
            assert!(parse_cvp(doc).is_err(), "{doc:?}");
        }
    }
}
