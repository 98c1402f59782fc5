//! Polynomials with exact rational coefficients: dense univariate ones for
//! branch parametrizations, sparse multivariate ones for germs and chart maps.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Canonical `p/q` (or `p`) rendering.
pub fn q_to_string(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("bad rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

/// Dense polynomial `sum c_k tau^k`; trailing zeros are trimmed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct UPoly {
    coeffs: Vec<Q>,
}

impl UPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Self::from_dense(vec![c])
    }

    /// `c * tau^k`.
    pub fn monomial(c: Q, k: usize) -> Self {
        let mut v = vec![Q::zero(); k + 1];
        v[k] = c;
        Self::from_dense(v)
    }

    pub fn from_dense(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (usize, Q)>) -> Self {
        let mut v: Vec<Q> = Vec::new();
        for (k, c) in terms {
            if v.len() <= k {
                v.resize(k + 1, Q::zero());
            }
            v[k] += c;
        }
        Self::from_dense(v)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.coeffs.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    /// Lowest power with a nonzero coefficient; `None` for the zero polynomial.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::from_dense((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::from_dense((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }

    pub fn scale(&self, c: &Q) -> UPoly {
        Self::from_dense(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        self.mul_trunc(o, usize::MAX)
    }

    /// Product with all powers `>= limit` discarded.
    pub fn mul_trunc(&self, o: &UPoly, limit: usize) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let n = (self.coeffs.len() + o.coeffs.len() - 1).min(limit);
        let mut v = vec![Q::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= n {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                v[i + j] += a * b;
            }
        }
        Self::from_dense(v)
    }

    pub fn truncate(&self, limit: usize) -> UPoly {
        Self::from_dense(self.coeffs.iter().take(limit).cloned().collect())
    }

    /// Division by `tau^k`; the caller guarantees `k <= order`.
    pub fn shift_down(&self, k: usize) -> UPoly {
        debug_assert!(self.order().is_none_or(|o| o >= k));
        Self::from_dense(self.coeffs.iter().skip(k).cloned().collect())
    }

    pub fn leading_low(&self) -> Option<Q> {
        self.order().map(|k| self.coeffs[k].clone())
    }

    fn lead(&self) -> &Q {
        self.coeffs.last().expect("nonzero polynomial")
    }

    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.coeffs.clone();
        let dd = d.coeffs.len() - 1;
        if r.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let mut quo = vec![Q::zero(); r.len() - dd];
        let lc = d.lead().clone();
        for k in (0..quo.len()).rev() {
            let c = &r[k + dd] / &lc;
            if !c.is_zero() {
                for (j, b) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * b;
                }
            }
            quo[k] = c;
        }
        (UPoly::from_dense(quo), UPoly::from_dense(r))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lc = a.lead().clone();
        a.scale(&(Q::one() / lc))
    }

    pub fn to_terms(&self) -> Vec<(usize, String)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k, q_to_string(c)))
            .collect()
    }

    pub fn from_term_strings(terms: &[(usize, String)]) -> Result<UPoly> {
        let mut v = Vec::new();
        for (k, c) in terms {
            v.push((*k, parse_q(c)?));
        }
        Ok(Self::from_terms(v))
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (k, a.is_one()) {
                (0, _) => write!(f, "{}", q_to_string(&a))?,
                (_, true) => write!(f, "t^{k}")?,
                _ => write!(f, "{}*t^{k}", q_to_string(&a))?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Quotient `num / den` of polynomials in `tau` with `den(0) != 0`, kept in
/// lowest terms. Such a quotient is a unit times `tau^ord(num)` near 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFn {
    num: UPoly,
    den: UPoly,
}

impl RatFn {
    pub fn from_poly(p: UPoly) -> Self {
        RatFn {
            num: p,
            den: UPoly::one(),
        }
    }

    fn normalized(num: UPoly, den: UPoly) -> Self {
        if num.is_zero() {
            return Self::from_poly(UPoly::zero());
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = (num.div_rem(&g).0, den.div_rem(&g).0);
        let c0 = den.coeff(0);
        debug_assert!(!c0.is_zero());
        let inv = Q::one() / c0;
        num = num.scale(&inv);
        den = den.scale(&inv);
        RatFn { num, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Vanishing order at `tau = 0`; `None` when identically zero.
    pub fn order(&self) -> Option<usize> {
        self.num.order()
    }

    /// Leading coefficient: value of `self / tau^order` at 0.
    pub fn leading(&self) -> Option<Q> {
        self.num.leading_low().map(|c| c / self.den.coeff(0))
    }

    pub fn num(&self) -> &UPoly {
        &self.num
    }

    pub fn den(&self) -> &UPoly {
        &self.den
    }

    pub fn sub_const(&self, c: &Q) -> RatFn {
        Self::normalized(self.num.sub(&self.den.scale(c)), self.den.clone())
    }

    pub fn mul(&self, o: &RatFn) -> RatFn {
        Self::normalized(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    /// `self / o`, defined when `ord(o) <= ord(self)` so the result is regular at 0.
    pub fn div(&self, o: &RatFn) -> Result<RatFn> {
        let k = o
            .order()
            .ok_or_else(|| Error::InvalidInput("division by zero function".into()))?;
        if self.is_zero() {
            return Ok(self.clone());
        }
        if self.order().unwrap() < k {
            return Err(Error::InvalidInput("quotient has a pole at the origin".into()));
        }
        let num = self.num.shift_down(k).mul(&o.den);
        let den = o.num.shift_down(k).mul(&self.den);
        Ok(Self::normalized(num, den))
    }
}

/// Sparse polynomial in `nvars` variables with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Q>,
}

impl QPoly {
    pub fn zero(nvars: usize) -> Self {
        QPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::one())
    }

    /// The coordinate function `x_k` (0-based).
    pub fn var(nvars: usize, k: usize) -> Self {
        let mut e = vec![0; nvars];
        e[k] = 1;
        Self::monomial(e, Q::one())
    }

    pub fn monomial(exp: Vec<u32>, c: Q) -> Self {
        let mut p = Self::zero(exp.len());
        p.add_term(exp, c);
        p
    }

    pub fn add_term(&mut self, exp: Vec<u32>, c: Q) {
        assert_eq!(exp.len(), self.nvars, "exponent length mismatch");
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp.clone()).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Q)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn add(&self, o: &QPoly) -> QPoly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &QPoly) -> QPoly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> QPoly {
        let mut out = QPoly::zero(self.nvars);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, o: &QPoly) -> QPoly {
        assert_eq!(self.nvars, o.nvars);
        let mut out = QPoly::zero(self.nvars);
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let e = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> QPoly {
        let mut acc = QPoly::one(self.nvars);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Smallest exponent of variable `k` over all terms (the `x_k`-adic order).
    pub fn order_in(&self, k: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[k]).min()
    }

    /// Drops every term whose exponent of variable `k` is `>= limit`.
    pub fn truncate_in(&self, k: usize, limit: u32) -> QPoly {
        QPoly {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(e, _)| e[k] < limit).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    /// Product truncated below `limit` in variable `k`.
    pub fn mul_trunc_in(&self, o: &QPoly, k: usize, limit: u32) -> QPoly {
        let mut out = QPoly::zero(self.nvars);
        for (a, ca) in &self.terms {
            if a[k] >= limit {
                continue;
            }
            for (b, cb) in &o.terms {
                if a[k] + b[k] >= limit {
                    continue;
                }
                let e = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    /// Composition `self(images[0], ..., images[n-1])`.
    pub fn substitute(&self, images: &[QPoly]) -> QPoly {
        assert_eq!(images.len(), self.nvars);
        let m = images.first().map_or(0, |p| p.nvars);
        let mut powers: Vec<Vec<QPoly>> = images.iter().map(|p| vec![QPoly::one(p.nvars)]).collect();
        let mut out = QPoly::zero(m);
        for (e, c) in &self.terms {
            let mut term = QPoly::constant(m, c.clone());
            for (k, &ek) in e.iter().enumerate() {
                while powers[k].len() <= ek as usize {
                    let next = powers[k].last().unwrap().mul(&images[k]);
                    powers[k].push(next);
                }
                term = term.mul(&powers[k][ek as usize]);
            }
            out = out.add(&term);
        }
        out
    }

    /// Composition with univariate polynomials.
    pub fn eval_upoly(&self, images: &[UPoly]) -> UPoly {
        assert_eq!(images.len(), self.nvars);
        let mut out = UPoly::zero();
        for (e, c) in &self.terms {
            let mut term = UPoly::constant(c.clone());
            for (k, &ek) in e.iter().enumerate() {
                for _ in 0..ek {
                    term = term.mul(&images[k]);
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Parses expressions such as `y^2 - x^3`, `x1 - 2/3*x3` or `(x+y)^2`.
    /// With at most three variables `x, y, z` name them; `x1..xn` always works.
    pub fn parse(s: &str, nvars: usize) -> Result<QPoly> {
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
            nvars,
        };
        let out = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input"));
        }
        Ok(out)
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names: Vec<String> = if self.nvars <= 3 {
            ["x", "y", "z"][..self.nvars].iter().map(|s| s.to_string()).collect()
        } else {
            (1..=self.nvars).map(|k| format!("x{k}")).collect()
        };
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let a = c.abs();
            let mono: Vec<String> = e
                .iter()
                .zip(&names)
                .filter(|(k, _)| **k > 0)
                .map(|(k, n)| if *k == 1 { n.clone() } else { format!("{n}^{k}") })
                .collect();
            if mono.is_empty() {
                write!(f, "{}", q_to_string(&a))?;
            } else if a.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", q_to_string(&a), mono.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Wire form: `[[exponents], "p/q"]` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QPolyDoc(pub Vec<(Vec<u32>, String)>);

impl QPoly {
    pub fn to_doc(&self) -> QPolyDoc {
        QPolyDoc(self.terms.iter().map(|(e, c)| (e.clone(), q_to_string(c))).collect())
    }

    pub fn from_doc(nvars: usize, d: &QPolyDoc) -> Result<QPoly> {
        let mut p = QPoly::zero(nvars);
        for (e, c) in &d.0 {
            if e.len() != nvars {
                return Err(Error::Schema("polynomial exponent has wrong length".into()));
            }
            p.add_term(e.clone(), parse_q(c)?);
        }
        Ok(p)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> Error {
        Error::InvalidInput(format!("polynomial parse error at byte {}: {what}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<QPoly> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.term()?.scale(&q_int(-1))
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<QPoly> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<QPoly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let k = self.integer()?;
            let k = u32::try_from(k).map_err(|_| self.err("exponent out of range"))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn atom(&mut self) -> Result<QPoly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                let mut d = BigInt::one();
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    d = self.integer()?;
                    if d.is_zero() {
                        return Err(self.err("zero denominator"));
                    }
                }
                Ok(QPoly::constant(self.nvars, Q::new(n, d)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let k = match name {
                    "x" if self.nvars <= 3 => 0,
                    "y" if self.nvars <= 3 => 1,
                    "z" if self.nvars <= 3 => 2,
                    _ => match name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                        Some(k) if k >= 1 => k - 1,
                        _ => return Err(self.err(&format!("unknown variable {name:?}"))),
                    },
                };
                if k >= self.nvars {
                    return Err(self.err(&format!("variable {name:?} exceeds dimension")));
                }
                Ok(QPoly::var(self.nvars, k))
            }
            _ => Err(self.err("expected a number, variable or '('")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(terms: &[(usize, i64)]) -> UPoly {
        UPoly::from_terms(terms.iter().map(|&(k, c)| (k, q_int(c))))
    }

    #[test]
    fn rational_strings() {
        assert_eq!(q_to_string(&parse_q("6/4").unwrap()), "3/2");
        assert_eq!(q_to_string(&parse_q("-2").unwrap()), "-2");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("abc").is_err());
    }

    #[test]
    fn upoly_division_and_gcd() {
        let a = up(&[(0, -1), (2, 1)]);
        let b = up(&[(0, 1), (1, 1)]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, up(&[(0, -1), (1, 1)]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&b), b);
        assert_eq!(up(&[(3, 2), (5, 1)]).order(), Some(3));
    }

    #[test]
    fn ratfn_lowest_terms() {
        let t3 = RatFn::from_poly(up(&[(3, 1)]));
        let t2 = RatFn::from_poly(up(&[(2, 1), (3, 1)]));
        let q = t3.div(&t2).unwrap();
        assert_eq!(q.order(), Some(1));
        assert_eq!(q.num(), &up(&[(1, 1)]));
        assert_eq!(q.den(), &up(&[(0, 1), (1, 1)]));
        assert!(t2.div(&t3).is_err());
        let s = q.sub_const(&q_int(0));
        assert_eq!(s, q);
    }

    #[test]
    fn parse_and_substitute() {
        let g = QPoly::parse("y^2 - x^3", 2).unwrap();
        assert_eq!(g.to_string(), "y^2 - x^3");
        let bl = [QPoly::var(2, 0), QPoly::var(2, 0).mul(&QPoly::var(2, 1))];
        let lifted = g.substitute(&bl);
        assert_eq!(lifted.order_in(0), Some(2));
        let h = QPoly::parse("x1 - 3/2*x3 + (x2+1)^2", 3).unwrap();
        assert_eq!(h.total_degree(), Some(2));
        assert!(QPoly::parse("x4", 3).is_err());
        assert!(QPoly::parse("x +", 2).is_err());
    }

    #[test]
    fn eval_on_branch() {
        let g = QPoly::parse("y^2 - x^3", 2).unwrap();
        let v = g.eval_upoly(&[up(&[(2, 1)]), up(&[(3, 1)])]);
        assert!(v.is_zero());
        let v = QPoly::parse("x", 2).unwrap().eval_upoly(&[up(&[(2, 1)]), up(&[(3, 1)])]);
        assert_eq!(v.order(), Some(2));
    }
}
