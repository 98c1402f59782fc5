//! Box-truncated multivariate series with `LaurentPoly` coefficients.
//!
//! An [`MSeries`] knows its coefficients exactly on the box `[lo, hi]`.
//! Ordinary series (the default) are in addition known to vanish outside
//! the orthant `{e >= lo}`; Laurent-type series such as `L(t)` carry terms
//! with arbitrarily negative components and are flagged as not bounded
//! below. Products only keep exponents whose value cannot depend on
//! truncated terms.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::laurent::LaurentPoly;
use crate::error::{Error, Result};

/// Exponent vector of a monomial `t_1^e_1 ... t_r^e_r`, ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExpVec(pub Vec<i64>);

impl ExpVec {
    pub fn zeros(n: usize) -> Self {
        ExpVec(vec![0; n])
    }

    pub fn filled(n: usize, value: i64) -> Self {
        ExpVec(vec![value; n])
    }

    /// `1_K`: ones at the given positions.
    pub fn indicator(n: usize, positions: impl IntoIterator<Item = usize>) -> Self {
        let mut v = vec![0; n];
        for k in positions {
            v[k] = 1;
        }
        ExpVec(v)
    }

    pub fn unit(n: usize, k: usize) -> Self {
        Self::indicator(n, [k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// Componentwise `self <= other`.
    pub fn leq(&self, other: &ExpVec) -> bool {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &ExpVec) -> ExpVec {
        ExpVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &ExpVec) -> ExpVec {
        ExpVec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> ExpVec {
        ExpVec(self.0.iter().map(|a| a * k).collect())
    }

    pub fn cmin(&self, other: &ExpVec) -> ExpVec {
        ExpVec(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn cmax(&self, other: &ExpVec) -> ExpVec {
        ExpVec(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    /// Negative components replaced by zero.
    pub fn clamp_nonneg(&self) -> ExpVec {
        ExpVec(self.0.iter().map(|&a| a.max(0)).collect())
    }

    pub fn is_nonneg(&self) -> bool {
        self.0.iter().all(|&a| a >= 0)
    }

    pub fn parse_list(s: &str) -> Result<ExpVec> {
        s.split(',')
            .map(|p| {
                p.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::InvalidInput(format!("bad integer {p:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(ExpVec)
    }
}

impl From<Vec<i64>> for ExpVec {
    fn from(v: Vec<i64>) -> Self {
        ExpVec(v)
    }
}

impl fmt::Display for ExpVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// All exponent vectors of the box `[lo, hi]` in lexicographic order.
pub fn box_points(lo: &ExpVec, hi: &ExpVec) -> Vec<ExpVec> {
    let n = lo.len();
    if (0..n).any(|k| lo.0[k] > hi.0[k]) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = lo.clone();
    loop {
        out.push(cur.clone());
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if cur.0[k] < hi.0[k] {
                cur.0[k] += 1;
                for j in k + 1..n {
                    cur.0[j] = lo.0[j];
                }
                break;
            }
        }
        if n == 0 {
            return out;
        }
    }
}

/// Exact multivariate Laurent polynomial in `t` with `LaurentPoly` coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<ExpVec, LaurentPoly>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::monomial(LaurentPoly::one(), ExpVec::zeros(nvars))
    }

    pub fn monomial(c: LaurentPoly, e: ExpVec) -> Self {
        let mut p = Self::zero(e.len());
        p.add_term(e, &c);
        p
    }

    /// `t_1 * ... * t_r`.
    pub fn t_product(nvars: usize) -> Self {
        Self::monomial(LaurentPoly::one(), ExpVec::filled(nvars, 1))
    }

    /// `t^e - 1`.
    pub fn monomial_minus_one(e: ExpVec) -> Self {
        let n = e.len();
        let mut p = Self::monomial(LaurentPoly::one(), e);
        p.add_term(ExpVec::zeros(n), &LaurentPoly::constant(-1));
        p
    }

    /// `1 - c * t^e`.
    pub fn one_minus(c: &LaurentPoly, e: ExpVec) -> Self {
        let n = e.len();
        let mut p = Self::one(n);
        p.add_term(e, &-c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add_term(&mut self, e: ExpVec, c: &LaurentPoly) {
        assert_eq!(e.len(), self.nvars, "exponent length mismatch");
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e.clone()).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExpVec, &LaurentPoly)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = MPoly::zero(self.nvars);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.add(b), &(ca * cb));
            }
        }
        out
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), &-c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> MPoly {
        (0..k).fold(MPoly::one(self.nvars), |acc, _| acc.mul(self))
    }

    /// Componentwise minimum and maximum of the support exponents.
    pub fn support_bounds(&self) -> Option<(ExpVec, ExpVec)> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        let (mut lo, mut hi) = (first.clone(), first);
        for e in it {
            lo = lo.cmin(e);
            hi = hi.cmax(e);
        }
        Some((lo, hi))
    }
}

/// First exponent at which two series disagree on a comparison window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub exp: ExpVec,
    pub left: LaurentPoly,
    pub right: LaurentPoly,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at t^{}: {} vs {}", self.exp, self.left, self.right)
    }
}

/// Multivariate series known exactly on the box `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MSeries {
    nvars: usize,
    lo: ExpVec,
    hi: ExpVec,
    coeffs: BTreeMap<ExpVec, LaurentPoly>,
    lower_bounded: bool,
}

impl MSeries {
    /// Empty power series on `[lo, hi]`, vanishing outside `{e >= lo}`.
    pub fn new(lo: ExpVec, hi: ExpVec) -> Self {
        assert_eq!(lo.len(), hi.len(), "window bounds of different lengths");
        MSeries {
            nvars: lo.len(),
            lo,
            hi,
            coeffs: BTreeMap::new(),
            lower_bounded: true,
        }
    }

    /// Empty Laurent-type series on `[lo, hi]` with no support assumption below `lo`.
    pub fn new_laurent(lo: ExpVec, hi: ExpVec) -> Self {
        let mut s = Self::new(lo, hi);
        s.lower_bounded = false;
        s
    }

    /// Power series on `[0, hi]`.
    pub fn on_box(hi: ExpVec) -> Self {
        Self::new(ExpVec::zeros(hi.len()), hi)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn lo(&self) -> &ExpVec {
        &self.lo
    }

    pub fn hi(&self) -> &ExpVec {
        &self.hi
    }

    pub fn is_lower_bounded(&self) -> bool {
        self.lower_bounded
    }

    pub fn in_window(&self, e: &ExpVec) -> bool {
        e.len() == self.nvars && self.lo.leq(e) && e.leq(&self.hi)
    }

    /// Adds `c * t^e`; returns false (and drops the term) outside the window.
    pub fn accumulate(&mut self, e: ExpVec, c: &LaurentPoly) -> bool {
        if !self.in_window(&e) {
            return false;
        }
        if c.is_zero() {
            return true;
        }
        let entry = self.coeffs.entry(e.clone()).or_default();
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&e);
        }
        true
    }

    pub fn get(&self, e: &ExpVec) -> Option<&LaurentPoly> {
        self.coeffs.get(e)
    }

    /// Coefficient at `e` (zero when absent).
    pub fn coeff(&self, e: &ExpVec) -> LaurentPoly {
        self.coeffs.get(e).cloned().unwrap_or_default()
    }

    pub fn coeff_at(&self, e: &[i64]) -> LaurentPoly {
        self.coeff(&ExpVec(e.to_vec()))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExpVec, &LaurentPoly)> {
        self.coeffs.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Product with the exact window rule for two power series: the result
    /// lives on `[lo_f + lo_g, min(hi_f + lo_g, hi_g + lo_f)]`.
    pub fn mul(&self, other: &MSeries) -> Result<MSeries> {
        self.check_vars(other)?;
        if !self.lower_bounded || !other.lower_bounded {
            return Err(Error::InvalidInput(
                "series without a lower support bound can only be multiplied by polynomials"
                    .into(),
            ));
        }
        let lo = self.lo.add(&other.lo);
        let hi = self.hi.add(&other.lo).cmin(&other.hi.add(&self.lo));
        let mut out = MSeries::new(lo, hi);
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                let e = a.add(b);
                if out.in_window(&e) {
                    out.accumulate(e, &(ca * cb));
                }
            }
        }
        Ok(out)
    }

    /// Product with an exact polynomial.
    pub fn mul_poly(&self, p: &MPoly) -> Result<MSeries> {
        if p.nvars() != self.nvars {
            return Err(Error::InvalidInput("variable count mismatch".into()));
        }
        let Some((pmin, pmax)) = p.support_bounds() else {
            let mut z = self.clone();
            z.coeffs.clear();
            return Ok(z);
        };
        let hi = self.hi.add(&pmin);
        let mut out = if self.lower_bounded {
            MSeries::new(self.lo.add(&pmin), hi)
        } else {
            MSeries::new_laurent(self.lo.add(&pmax), hi)
        };
        for (a, ca) in &self.coeffs {
            for (b, cb) in p.terms() {
                let e = a.add(b);
                if out.in_window(&e) {
                    out.accumulate(e, &(ca * cb));
                }
            }
        }
        Ok(out)
    }

    fn check_vars(&self, other: &MSeries) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::InvalidInput(format!(
                "variable count mismatch: {} vs {}",
                self.nvars, other.nvars
            )));
        }
        Ok(())
    }

    fn combine(&self, other: &MSeries, sign: i64) -> Result<MSeries> {
        self.check_vars(other)?;
        let lower_bounded = self.lower_bounded && other.lower_bounded;
        let lo = if lower_bounded {
            self.lo.cmin(&other.lo)
        } else {
            self.lo.cmax(&other.lo)
        };
        let hi = self.hi.cmin(&other.hi);
        let mut out = MSeries::new(lo, hi);
        out.lower_bounded = lower_bounded;
        for (e, c) in &self.coeffs {
            out.accumulate(e.clone(), c);
        }
        let s = LaurentPoly::constant(sign);
        for (e, c) in &other.coeffs {
            out.accumulate(e.clone(), &(c * &s));
        }
        Ok(out)
    }

    /// Sum on the intersection of the two windows.
    pub fn add(&self, other: &MSeries) -> Result<MSeries> {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &MSeries) -> Result<MSeries> {
        self.combine(other, -1)
    }

    pub fn scale(&self, c: &LaurentPoly) -> MSeries {
        let mut out = self.clone();
        out.coeffs.clear();
        for (e, v) in &self.coeffs {
            out.accumulate(e.clone(), &(v * c));
        }
        out
    }

    /// Drops everything above `hi`.
    pub fn truncate(&self, hi: &ExpVec) -> MSeries {
        let mut out = self.clone();
        out.hi = self.hi.cmin(hi);
        out.coeffs.retain(|e, _| e.leq(&out.hi));
        out
    }

    /// Specialization `L = 1` of every coefficient.
    pub fn eval_one(&self) -> MSeries {
        let mut out = self.clone();
        out.coeffs.clear();
        for (e, c) in &self.coeffs {
            out.accumulate(e.clone(), &LaurentPoly::constant(c.eval_one()));
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&LaurentPoly) -> LaurentPoly) -> MSeries {
        let mut out = self.clone();
        out.coeffs.clear();
        for (e, c) in &self.coeffs {
            out.accumulate(e.clone(), &f(c));
        }
        out
    }

    /// Re-expresses a series in `t_K` as a series in `nvars` variables that is
    /// constant in the variables outside `positions`. The window in the
    /// added variables is `[0, hi_full]` (the series vanishes there except at 0).
    pub fn embed(&self, nvars: usize, positions: &[usize], hi_full: &ExpVec) -> MSeries {
        assert_eq!(positions.len(), self.nvars);
        let mut lo = ExpVec::zeros(nvars);
        let mut hi = hi_full.clone();
        for (j, &p) in positions.iter().enumerate() {
            lo.0[p] = self.lo.0[j];
            hi.0[p] = self.hi.0[j].min(hi_full.0[p]);
        }
        let mut out = MSeries::new(lo, hi);
        out.lower_bounded = self.lower_bounded;
        for (e, c) in &self.coeffs {
            let mut full = ExpVec::zeros(nvars);
            for (j, &p) in positions.iter().enumerate() {
                full.0[p] = e.0[j];
            }
            out.accumulate(full, c);
        }
        out
    }

    /// Whether the coefficient at every point of `[lo, hi]` is known: a power
    /// series is known on all of `{e <= hi}` since it vanishes below `lo`.
    pub fn covers(&self, lo: &ExpVec, hi: &ExpVec) -> bool {
        hi.leq(&self.hi) && (self.lower_bounded || self.lo.leq(lo))
    }

    /// First disagreement with `other` on the box `[lo, hi]`, in lexicographic order.
    pub fn first_mismatch(&self, other: &MSeries, lo: &ExpVec, hi: &ExpVec) -> Result<Option<Mismatch>> {
        self.check_vars(other)?;
        for s in [self, other] {
            if !s.covers(lo, hi) {
                return Err(Error::InvalidInput(format!(
                    "comparison box [{lo}, {hi}] is not inside window [{}, {}]",
                    s.lo, s.hi
                )));
            }
        }
        let keys: std::collections::BTreeSet<&ExpVec> = self
            .coeffs
            .keys()
            .chain(other.coeffs.keys())
            .filter(|e| lo.leq(e) && e.leq(hi))
            .collect();
        for e in keys {
            let (a, b) = (self.coeff(e), other.coeff(e));
            if a != b {
                return Ok(Some(Mismatch {
                    exp: e.clone(),
                    left: a,
                    right: b,
                }));
            }
        }
        Ok(None)
    }

    /// Mismatch on the largest box both series cover.
    pub fn first_mismatch_common(&self, other: &MSeries) -> Result<Option<Mismatch>> {
        let lo = match (self.lower_bounded, other.lower_bounded) {
            (true, true) => self.lo.cmin(&other.lo),
            (true, false) => other.lo.clone(),
            (false, true) => self.lo.clone(),
            (false, false) => self.lo.cmax(&other.lo),
        };
        let hi = self.hi.cmin(&other.hi);
        self.first_mismatch(other, &lo, &hi)
    }

    /// All coefficients are polynomials in `q` (nonpositive `L`-powers).
    pub fn is_q_normalized(&self) -> bool {
        self.coeffs.values().all(LaurentPoly::is_q_polynomial)
    }

    /// All coefficients are polynomials in `L` (nonnegative powers).
    pub fn is_l_normalized(&self) -> bool {
        self.coeffs.values().all(LaurentPoly::is_l_polynomial)
    }

    /// Pretty single-line rendering; `in_q` selects `q`-normalized coefficients.
    pub fn display(&self, in_q: bool) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        let names: Vec<String> = if self.nvars == 1 {
            vec!["t".into()]
        } else {
            (1..=self.nvars).map(|k| format!("t{k}")).collect()
        };
        let mut parts = Vec::new();
        for (e, c) in &self.coeffs {
            let mono: Vec<String> = e
                .0
                .iter()
                .zip(&names)
                .filter(|(x, _)| **x != 0)
                .map(|(x, n)| if *x == 1 { n.clone() } else { format!("{n}^{x}") })
                .collect();
            let cs = if in_q { c.display_q() } else { c.display_l() };
            let simple = c.terms().count() == 1;
            let coeff = if mono.is_empty() {
                cs
            } else if c.is_one() {
                String::new()
            } else if simple {
                format!("{cs}*")
            } else {
                format!("({cs})*")
            };
            parts.push(format!("{coeff}{}", mono.join("*")));
        }
        parts.join(" + ")
    }

    pub fn to_doc(&self) -> SeriesDoc {
        SeriesDoc {
            vars: self.nvars,
            lo: self.lo.0.clone(),
            hi: self.hi.0.clone(),
            terms: self
                .coeffs
                .iter()
                .map(|(e, c)| TermDoc {
                    exp: e.0.clone(),
                    coeff: c.terms().map(|(k, v)| (k, v.to_string())).collect(),
                })
                .collect(),
            unbounded_below: !self.lower_bounded,
        }
    }

    pub fn from_doc(doc: &SeriesDoc) -> Result<MSeries> {
        if doc.lo.len() != doc.vars || doc.hi.len() != doc.vars {
            return Err(Error::Schema("window length differs from vars".into()));
        }
        let mut s = MSeries::new(ExpVec(doc.lo.clone()), ExpVec(doc.hi.clone()));
        s.lower_bounded = !doc.unbounded_below;
        for t in &doc.terms {
            let e = ExpVec(t.exp.clone());
            if !s.in_window(&e) {
                return Err(Error::Schema(format!("term {e} outside window")));
            }
            let mut c = LaurentPoly::zero();
            for (k, v) in &t.coeff {
                let v: BigInt = v
                    .parse()
                    .map_err(|_| Error::Schema(format!("bad integer {v:?}")))?;
                c.add_term(*k, v);
            }
            s.accumulate(e, &c);
        }
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("series serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<MSeries> {
        let doc: SeriesDoc = serde_json::from_str(s)?;
        Self::from_doc(&doc)
    }
}

/// Wire form of a series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesDoc {
    pub vars: usize,
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
    pub terms: Vec<TermDoc>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unbounded_below: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub exp: Vec<i64>,
    pub coeff: Vec<(i64, String)>,
}

/// Expands `numerator * prod (1 - c t^m)^-1` on the box `[0, hi]`.
///
/// Every `m` must be nonnegative and nonzero, and the numerator must have
/// nonnegative support, so the expansion is exact on the box.
pub fn expand_rational(
    numerator: &MPoly,
    denominator_factors: &[(LaurentPoly, ExpVec)],
    hi: &ExpVec,
) -> Result<MSeries> {
    let n = hi.len();
    if numerator.nvars() != n {
        return Err(Error::InvalidInput("numerator variable count mismatch".into()));
    }
    for (_, m) in denominator_factors {
        if m.len() != n || !m.is_nonneg() || m.is_zero() {
            return Err(Error::NonconvergentFactor(m.to_string()));
        }
    }
    let mut acc = MSeries::on_box(hi.clone());
    for (e, c) in numerator.terms() {
        if !e.is_nonneg() {
            return Err(Error::InvalidInput(format!(
                "numerator term t^{e} has a negative exponent"
            )));
        }
        acc.accumulate(e.clone(), c);
    }
    for (c, m) in denominator_factors {
        // acc <- acc / (1 - c t^m): new[e] = acc[e] + c * new[e - m], lex order.
        let mut out = MSeries::on_box(hi.clone());
        for e in box_points(&ExpVec::zeros(n), hi) {
            let mut v = acc.coeff(&e);
            let prev = e.sub(m);
            if prev.is_nonneg() {
                if let Some(p) = out.get(&prev) {
                    v += &(c * p);
                }
            }
            out.accumulate(e, &v);
        }
        acc = out;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(v: &[i64]) -> ExpVec {
        ExpVec(v.to_vec())
    }

    fn lp(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().copied())
    }

    fn series_1d(hi: i64, coeffs: &[LaurentPoly]) -> MSeries {
        let mut s = MSeries::on_box(e(&[hi]));
        for (k, c) in coeffs.iter().enumerate() {
            s.accumulate(e(&[k as i64]), c);
        }
        s
    }

    #[test]
    fn box_iteration_is_lexicographic() {
        let pts = box_points(&e(&[0, -1]), &e(&[1, 0]));
        assert_eq!(pts, vec![e(&[0, -1]), e(&[0, 0]), e(&[1, -1]), e(&[1, 0])]);
        assert!(box_points(&e(&[1]), &e(&[0])).is_empty());
    }

    #[test]
    fn mul_examples() {
        let one = LaurentPoly::one();
        let m1 = LaurentPoly::constant(-1);
        let f = series_1d(2, &[one.clone(), one.clone()]);
        let g = series_1d(2, &[one.clone(), m1.clone()]);
        let p = f.mul(&g).unwrap();
        assert_eq!(p.hi(), &e(&[2]));
        assert_eq!(p.coeff_at(&[0]), one);
        assert_eq!(p.coeff_at(&[1]), LaurentPoly::zero());
        assert_eq!(p.coeff_at(&[2]), m1);

        let q = LaurentPoly::q();
        let geo = series_1d(3, &(0..4).map(|k| q.pow(k)).collect::<Vec<_>>());
        let lin = series_1d(3, &[one.clone(), -&q]);
        let p = geo.mul(&lin).unwrap();
        assert_eq!(p.hi(), &e(&[3]));
        assert_eq!(p.num_terms(), 1);
        assert_eq!(p.coeff_at(&[0]), one);

        let empty = MSeries::on_box(e(&[3]));
        assert!(f.mul(&empty).unwrap().is_zero());
    }

    #[test]
    fn mul_shrinks_to_safe_window() {
        let a = MSeries::on_box(e(&[5, 2]));
        let b = MSeries::on_box(e(&[3, 4]));
        let p = a.mul(&b).unwrap();
        assert_eq!(p.hi(), &e(&[3, 2]));
    }

    #[test]
    fn laurent_series_only_times_polynomials() {
        let mut l = MSeries::new_laurent(e(&[-1, -1]), e(&[3, 3]));
        l.accumulate(e(&[-1, 2]), &LaurentPoly::one());
        assert!(l.mul(&MSeries::on_box(e(&[3, 3]))).is_err());
        let p = MPoly::monomial_minus_one(e(&[1, 0])).mul(&MPoly::monomial_minus_one(e(&[0, 1])));
        let prod = l.mul_poly(&p).unwrap();
        assert_eq!(prod.lo(), &e(&[0, 0]));
        assert_eq!(prod.hi(), &e(&[3, 3]));
        assert_eq!(prod.coeff_at(&[0, 3]), LaurentPoly::one());
        assert_eq!(prod.coeff_at(&[0, 2]), LaurentPoly::constant(-1));
    }

    #[test]
    fn expand_rational_examples() {
        let one = LaurentPoly::one();
        let s = expand_rational(&MPoly::one(1), &[(one.clone(), e(&[1]))], &e(&[3])).unwrap();
        for k in 0..=3 {
            assert_eq!(s.coeff_at(&[k]), one);
        }
        let l = LaurentPoly::lefschetz();
        let s = expand_rational(
            &MPoly::one(1),
            &[(one.clone(), e(&[1])), (l.clone(), e(&[1]))],
            &e(&[2]),
        )
        .unwrap();
        assert_eq!(s.coeff_at(&[0]), one);
        assert_eq!(s.coeff_at(&[1]), lp(&[(0, 1), (1, 1)]));
        assert_eq!(s.coeff_at(&[2]), lp(&[(0, 1), (1, 1), (2, 1)]));

        let num = MPoly::one_minus(&one, e(&[2]));
        let s = expand_rational(&num, &[(one.clone(), e(&[1]))], &e(&[4])).unwrap();
        assert_eq!(s.num_terms(), 2);
        assert_eq!(s.coeff_at(&[0]), one);
        assert_eq!(s.coeff_at(&[1]), one);
    }

    #[test]
    fn expand_rational_rejects_constant_factor() {
        let r = expand_rational(&MPoly::one(2), &[(LaurentPoly::one(), e(&[0, 0]))], &e(&[2, 2]));
        assert!(matches!(r, Err(Error::NonconvergentFactor(_))));
        let r = expand_rational(&MPoly::one(1), &[(LaurentPoly::one(), e(&[-1]))], &e(&[2]));
        assert!(matches!(r, Err(Error::NonconvergentFactor(_))));
    }

    #[test]
    fn json_roundtrip_and_ordering() {
        let mut s = MSeries::on_box(e(&[2, 2]));
        s.accumulate(e(&[1, 0]), &lp(&[(-1, 1), (-2, -1)]));
        s.accumulate(e(&[0, 0]), &LaurentPoly::one());
        let js = s.to_json();
        assert_eq!(
            js,
            r#"{"vars":2,"lo":[0,0],"hi":[2,2],"terms":[{"exp":[0,0],"coeff":[[0,"1"]]},{"exp":[1,0],"coeff":[[-2,"-1"],[-1,"1"]]}]}"#
        );
        assert_eq!(MSeries::from_json(&js).unwrap(), s);
    }

    #[test]
    fn embed_places_variables() {
        let mut s = MSeries::on_box(e(&[3]));
        s.accumulate(e(&[2]), &LaurentPoly::one());
        let f = s.embed(2, &[1], &e(&[4, 4]));
        assert_eq!(f.hi(), &e(&[4, 3]));
        assert_eq!(f.coeff_at(&[0, 2]), LaurentPoly::one());
    }

    fn arb_series() -> impl Strategy<Value = MSeries> {
        prop::collection::vec(((0i64..4, 0i64..4), -2i64..3, -2i64..3), 0..8).prop_map(|ts| {
            let mut s = MSeries::on_box(e(&[3, 3]));
            for ((a, b), k, c) in ts {
                s.accumulate(e(&[a, b]), &LaurentPoly::monomial(c, k));
            }
            s
        })
    }

    proptest! {
        #[test]
        fn json_roundtrip(s in arb_series()) {
            prop_assert_eq!(MSeries::from_json(&s.to_json()).unwrap(), s);
        }

        #[test]
        fn product_is_window_exact(f in arb_series(), g in arb_series()) {
            // Re-running the product with the operands embedded in a larger
            // window must agree on the safe window of the smaller product.
            let small = f.mul(&g).unwrap();
            let mut wide = MSeries::on_box(e(&[9, 9]));
            for (x, c) in f.terms() { wide.accumulate(x.clone(), c); }
            let mut wide_g = MSeries::on_box(e(&[9, 9]));
            for (x, c) in g.terms() { wide_g.accumulate(x.clone(), c); }
            let big = wide.mul(&wide_g).unwrap();
            prop_assert_eq!(big.first_mismatch(&small, &e(&[0, 0]), small.hi()).unwrap(), None);
        }

        #[test]
        fn geometric_series_inverts(c in -3i64..4, a in 1i64..3, b in 0i64..3, h in 2i64..7) {
            let m = e(&[a, b]);
            let cl = LaurentPoly::monomial(c, 1);
            let hi = e(&[h, h]);
            let s = expand_rational(&MPoly::one(2), &[(cl.clone(), m.clone())], &hi).unwrap();
            let back = s.mul_poly(&MPoly::one_minus(&cl, m)).unwrap();
            let one = expand_rational(&MPoly::one(2), &[], &hi).unwrap();
            prop_assert_eq!(back.first_mismatch(&one, &e(&[0, 0]), &hi).unwrap(), None);
        }
    }
}
