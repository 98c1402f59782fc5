//! Coefficients of the Poincare-type series of a multi-index filtration,
//! computed directly from its Hilbert function by inclusion-exclusion.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{
    box_points, projective_class, qgeom, ExpVec, LaurentPoly, MPoly, MSeries, Mismatch,
};

/// `h(v) = dim O / J(v)`, with negative components treated as 0.
pub trait HilbertFunction: Sync {
    fn nvars(&self) -> usize;
    fn h(&self, v: &ExpVec) -> Result<u64>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    /// Classical Poincare series.
    P,
    /// Generalized (motivic) Poincare series, coefficients in `q`.
    Pg,
    /// Generalized semigroup Poincare series, coefficients in `L`.
    Phat,
    /// `sum_v dim J(v)/J(v+1) t^v`.
    L,
    /// Motivic version of `L`.
    Lg,
    /// `sum_v [P(J(v)/J(v+1))] t^v`, the numerator of the semigroup identity.
    Lhat,
    /// Generating series of the Hilbert function.
    H,
}

impl SeriesKind {
    /// Laurent-type series live on `[-1, B]` and have no lower support bound.
    pub fn is_laurent(self) -> bool {
        matches!(self, SeriesKind::L | SeriesKind::Lg | SeriesKind::Lhat)
    }

    /// Whether coefficients are naturally written in `q` rather than `L`.
    pub fn in_q(self) -> bool {
        matches!(self, SeriesKind::Pg | SeriesKind::Lg)
    }
}

impl FromStr for SeriesKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "P" => SeriesKind::P,
            "Pg" => SeriesKind::Pg,
            "Phat" => SeriesKind::Phat,
            "L" => SeriesKind::L,
            "Lg" => SeriesKind::Lg,
            "Lhat" => SeriesKind::Lhat,
            "H" => SeriesKind::H,
            _ => return Err(Error::InvalidInput(format!("unknown series kind {s:?}"))),
        })
    }
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SeriesKind::P => "P",
            SeriesKind::Pg => "Pg",
            SeriesKind::Phat => "Phat",
            SeriesKind::L => "L",
            SeriesKind::Lg => "Lg",
            SeriesKind::Lhat => "Lhat",
            SeriesKind::H => "H",
        };
        f.write_str(s)
    }
}

/// `h(v + 1_K)` for every subset `K` (bitmask order), plus `h(v + 1)` last.
fn shifted_values(o: &dyn HilbertFunction, v: &ExpVec) -> Result<Vec<u64>> {
    let r = o.nvars();
    if v.len() != r {
        return Err(Error::InvalidInput(format!("expected {r} components, got {}", v.len())));
    }
    (0u64..(1 << r))
        .map(|mask| o.h(&v.add(&ExpVec::indicator(r, (0..r).filter(|k| mask >> k & 1 == 1)))))
        .collect()
}

fn sign(mask: u64) -> i64 {
    if mask.count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `-sum_K (-1)^#K h(v + 1_K)`.
pub fn poincare_coeff(o: &dyn HilbertFunction, v: &ExpVec) -> Result<BigInt> {
    let hs = shifted_values(o, v)?;
    let mut acc = BigInt::from(0);
    for (mask, h) in hs.iter().enumerate() {
        acc -= BigInt::from(sign(mask as u64)) * BigInt::from(*h);
    }
    Ok(acc)
}

/// `sum_K (-1)^#K qgeom(h(v + 1_K), h(v + 1) - h(v + 1_K))`.
pub fn generalized_coeff(o: &dyn HilbertFunction, v: &ExpVec) -> Result<LaurentPoly> {
    let hs = shifted_values(o, v)?;
    let full = *hs.last().unwrap();
    let mut acc = LaurentPoly::zero();
    for (mask, &h) in hs.iter().enumerate() {
        let term = qgeom(h, full - h);
        if sign(mask as u64) > 0 {
            acc += &term;
        } else {
            acc -= &term;
        }
    }
    Ok(acc)
}

/// Class of the projectivized fibre over `v`:
/// `sum_K (-1)^#K [P^(h(v+1) - h(v+1_K) - 1)]`.
pub fn semigroup_coeff(o: &dyn HilbertFunction, v: &ExpVec) -> Result<LaurentPoly> {
    let hs = shifted_values(o, v)?;
    let full = *hs.last().unwrap();
    let mut acc = LaurentPoly::zero();
    for (mask, &h) in hs.iter().enumerate() {
        let term = projective_class(full - h);
        if sign(mask as u64) > 0 {
            acc += &term;
        } else {
            acc -= &term;
        }
    }
    Ok(acc)
}

fn coefficient(o: &dyn HilbertFunction, kind: SeriesKind, v: &ExpVec) -> Result<LaurentPoly> {
    let r = o.nvars();
    let one = ExpVec::filled(r, 1);
    Ok(match kind {
        SeriesKind::P => LaurentPoly::constant(poincare_coeff(o, v)?),
        SeriesKind::Pg => generalized_coeff(o, v)?,
        SeriesKind::Phat => semigroup_coeff(o, v)?,
        SeriesKind::H => LaurentPoly::constant(o.h(v)?),
        SeriesKind::L | SeriesKind::Lg | SeriesKind::Lhat => {
            let a = o.h(v)?;
            let b = o.h(&v.add(&one))?;
            match kind {
                SeriesKind::L => LaurentPoly::constant(b - a),
                SeriesKind::Lg => qgeom(a, b - a),
                _ => projective_class(b - a),
            }
        }
    })
}

/// The requested series on `[0, hi]`, or on `[-1, hi]` for the Laurent-type kinds.
pub fn series(o: &dyn HilbertFunction, kind: SeriesKind, hi: &ExpVec) -> Result<MSeries> {
    let r = o.nvars();
    if hi.len() != r || !hi.is_nonneg() {
        return Err(Error::InvalidInput(format!(
            "window bound must be {r} nonnegative integers, got {hi}"
        )));
    }
    let mut out = if kind.is_laurent() {
        MSeries::new_laurent(ExpVec::filled(r, -1), hi.clone())
    } else {
        MSeries::on_box(hi.clone())
    };
    let pts = box_points(&out.lo().clone(), hi);
    let coeffs: Vec<Result<(ExpVec, LaurentPoly)>> = pts
        .into_par_iter()
        .map(|v| coefficient(o, kind, &v).map(|c| (v, c)))
        .collect();
    for c in coeffs {
        let (v, c) = c?;
        out.accumulate(v, &c);
    }
    Ok(out)
}

/// `{ v in [0, hi] : the fibre over v is nonempty }`.
pub fn semigroup_members(o: &dyn HilbertFunction, hi: &ExpVec) -> Result<BTreeSet<ExpVec>> {
    let s = series(o, SeriesKind::Phat, hi)?;
    Ok(s.terms().map(|(e, _)| e.clone()).collect())
}

/// `prod_k (t_k - 1)`.
pub fn prod_t_minus_one(r: usize) -> MPoly {
    (0..r).fold(MPoly::one(r), |acc, k| acc.mul(&MPoly::monomial_minus_one(ExpVec::unit(r, k))))
}

/// Which of the three rational identities relating a series to its
/// Laurent-type numerator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Identity {
    /// `P` against `L`.
    Classical,
    /// `P_g` against `L_g`.
    Generalized,
    /// `P^_g` against `sum [P(J(v)/J(v+1))] t^v`.
    Semigroup,
}

impl Identity {
    pub fn kinds(self) -> (SeriesKind, SeriesKind) {
        match self {
            Identity::Classical => (SeriesKind::P, SeriesKind::L),
            Identity::Generalized => (SeriesKind::Pg, SeriesKind::Lg),
            Identity::Semigroup => (SeriesKind::Phat, SeriesKind::Lhat),
        }
    }
}

/// Checks `(t_1...t_r - 1) * S = N * prod (t_k - 1)` on `[0, hi]`, returning the
/// first mismatching coefficient if any.
pub fn rational_identity(o: &dyn HilbertFunction, which: Identity, hi: &ExpVec) -> Result<Option<Mismatch>> {
    let r = o.nvars();
    let (sk, nk) = which.kinds();
    let lhs = series(o, sk, hi)?.mul_poly(&MPoly::monomial_minus_one(ExpVec::filled(r, 1)))?;
    let rhs = series(o, nk, hi)?.mul_poly(&prod_t_minus_one(r))?;
    lhs.first_mismatch(&rhs, &ExpVec::zeros(r), hi)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Hilbert function given by a closure, for hand-made filtrations.
    pub struct FnHilbert<F: Fn(&[i64]) -> u64 + Sync>(pub usize, pub F);

    impl<F: Fn(&[i64]) -> u64 + Sync> HilbertFunction for FnHilbert<F> {
        fn nvars(&self) -> usize {
            self.0
        }
        fn h(&self, v: &ExpVec) -> Result<u64> {
            Ok((self.1)(v.clamp_nonneg().as_slice()))
        }
    }

    fn smooth() -> FnHilbert<impl Fn(&[i64]) -> u64 + Sync> {
        FnHilbert(1, |v: &[i64]| v[0] as u64)
    }

    /// `xy = 0`: `h(a, b) = a + b - 1` when both are positive.
    pub fn lines() -> FnHilbert<impl Fn(&[i64]) -> u64 + Sync> {
        FnHilbert(2, |v: &[i64]| match (v[0], v[1]) {
            (0, b) => b as u64,
            (a, 0) => a as u64,
            (a, b) => (a + b - 1) as u64,
        })
    }

    fn e(v: &[i64]) -> ExpVec {
        ExpVec(v.to_vec())
    }

    #[test]
    fn poincare_examples() {
        assert_eq!(poincare_coeff(&lines(), &e(&[0, 0])).unwrap(), BigInt::from(1));
        assert_eq!(poincare_coeff(&lines(), &e(&[1, 1])).unwrap(), BigInt::from(0));
        for n in 0..5 {
            assert_eq!(poincare_coeff(&smooth(), &e(&[n])).unwrap(), BigInt::from(1));
        }
    }

    #[test]
    fn generalized_examples() {
        for n in 0..5 {
            assert_eq!(generalized_coeff(&smooth(), &e(&[n])).unwrap(), LaurentPoly::q_pow(n));
            assert_eq!(semigroup_coeff(&smooth(), &e(&[n])).unwrap(), LaurentPoly::one());
        }
        let c = generalized_coeff(&lines(), &e(&[1, 1])).unwrap();
        assert_eq!(c, &LaurentPoly::q() - &LaurentPoly::q_pow(2));
        assert_eq!(semigroup_coeff(&lines(), &e(&[0, 0])).unwrap(), LaurentPoly::one());
    }

    #[test]
    fn identities_for_smooth_and_lines() {
        for which in [Identity::Classical, Identity::Generalized, Identity::Semigroup] {
            assert_eq!(rational_identity(&smooth(), which, &e(&[6])).unwrap(), None);
        }
        for which in [Identity::Classical, Identity::Generalized] {
            assert_eq!(rational_identity(&lines(), which, &e(&[5, 5])).unwrap(), None);
        }
    }

    #[test]
    fn laurent_series_window() {
        let l = series(&lines(), SeriesKind::L, &e(&[3, 3])).unwrap();
        assert_eq!(l.lo(), &e(&[-1, -1]));
        assert!(!l.is_lower_bounded());
        let s = series(&smooth(), SeriesKind::Pg, &e(&[5])).unwrap();
        for n in 0..=5 {
            assert_eq!(s.coeff_at(&[n]), LaurentPoly::q_pow(n));
        }
    }

    #[test]
    fn kinds_parse() {
        for k in ["P", "Pg", "Phat", "L", "Lg", "Lhat", "H"] {
            assert_eq!(k.parse::<SeriesKind>().unwrap().to_string(), k);
        }
        assert!("Q".parse::<SeriesKind>().is_err());
    }
}
