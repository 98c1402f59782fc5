//! Curve germs given by polynomial parametrizations of their branches, and the
//! jet-rank oracle for the Hilbert function of the curve-valuation filtration.

use std::collections::HashMap;
use std::sync::Mutex;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtration::{series, HilbertFunction, SeriesKind};
use crate::kernel::{ExpVec, MPoly, MSeries, Mismatch};
use crate::linalg::RankAccumulator;
use crate::rational::{QPoly, UPoly, Q};

pub const DEFAULT_MAX_JET: u64 = 64;

/// A branch `tau -> (phi_1(tau), ..., phi_n(tau))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Branch {
    coords: Vec<UPoly>,
}

impl Branch {
    pub fn new(coords: Vec<UPoly>) -> Result<Branch> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("branch without coordinates".into()));
        }
        if coords.iter().any(|c| !c.coeff(0).is_zero()) {
            return Err(Error::InvalidInput("branch coordinate with a constant term".into()));
        }
        if coords.iter().all(UPoly::is_zero) {
            return Err(Error::InvalidInput("constant branch".into()));
        }
        Ok(Branch { coords })
    }

    /// Shorthand for monomial coordinates `tau^k` (`0` meaning the zero coordinate).
    pub fn monomial(powers: &[usize]) -> Branch {
        Branch::new(
            powers
                .iter()
                .map(|&k| if k == 0 { UPoly::zero() } else { UPoly::monomial(Q::from_integer(1.into()), k) })
                .collect(),
        )
        .expect("valid monomial branch")
    }

    pub fn coords(&self) -> &[UPoly] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// `tau`-order of each coordinate, `None` for a zero coordinate.
    pub fn orders(&self) -> Vec<Option<usize>> {
        self.coords.iter().map(UPoly::order).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curve {
    ambient_dim: usize,
    branches: Vec<Branch>,
}

impl Curve {
    pub fn new(branches: Vec<Branch>) -> Result<Curve> {
        let Some(first) = branches.first() else {
            return Err(Error::InvalidInput("curve without branches".into()));
        };
        let n = first.dim();
        if branches.iter().any(|b| b.dim() != n) {
            return Err(Error::InvalidInput("branches of different ambient dimension".into()));
        }
        for (i, b) in branches.iter().enumerate() {
            if branches[..i].contains(b) {
                return Err(Error::NonreducedInput(format!("branch {} repeats an earlier branch", i + 1)));
            }
        }
        Ok(Curve {
            ambient_dim: n,
            branches,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn num_branches(&self) -> usize {
        self.branches.len()
    }

    /// The curve formed by the branches in `ks` (in that order).
    pub fn sub_curve(&self, ks: &[usize]) -> Result<Curve> {
        if ks.is_empty() {
            return Err(Error::InvalidInput("empty set of branches".into()));
        }
        let mut bs = Vec::new();
        for &k in ks {
            bs.push(
                self.branches
                    .get(k)
                    .cloned()
                    .ok_or_else(|| Error::InvalidInput(format!("no branch {}", k + 1)))?,
            );
        }
        Curve::new(bs)
    }

    pub fn to_doc(&self) -> CurveDoc {
        CurveDoc {
            ambient_dim: self.ambient_dim,
            branches: self
                .branches
                .iter()
                .map(|b| BranchDoc {
                    coords: b.coords.iter().map(UPoly::to_terms).collect(),
                })
                .collect(),
        }
    }

    pub fn from_doc(d: &CurveDoc) -> Result<Curve> {
        let mut bs = Vec::new();
        for b in &d.branches {
            if b.coords.len() != d.ambient_dim {
                return Err(Error::Schema("branch coordinate count differs from ambient_dim".into()));
            }
            let coords = b.coords.iter().map(|c| UPoly::from_term_strings(c)).collect::<Result<Vec<_>>>()?;
            bs.push(Branch::new(coords)?);
        }
        Curve::new(bs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("curve serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Curve> {
        Self::from_doc(&serde_json::from_str(s)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveDoc {
    pub ambient_dim: usize,
    pub branches: Vec<BranchDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchDoc {
    pub coords: Vec<Vec<(usize, String)>>,
}

/// Orders `v_k(g)` (`None` = infinity) and leading coefficients of `g` on each branch.
pub fn valuation(c: &Curve, g: &QPoly) -> Result<(Vec<Option<u64>>, Vec<Option<Q>>)> {
    if g.is_zero() {
        return Err(Error::UndefinedValuation);
    }
    if g.nvars() != c.ambient_dim() {
        return Err(Error::InvalidInput("polynomial dimension differs from the curve".into()));
    }
    let mut vs = Vec::new();
    let mut lead = Vec::new();
    for b in c.branches() {
        let p = g.eval_upoly(b.coords());
        vs.push(p.order().map(|k| k as u64));
        lead.push(p.leading_low());
    }
    Ok((vs, lead))
}

/// Hilbert function of the curve filtration as a rank of jet conditions.
///
/// For a target `v` the columns are the monomials `x^a` of degree `<= N`,
/// each mapped to its `tau`-coefficients of order `< v_k` on every branch.
/// Monomials whose order is provably `>= v_k` on all branches give zero
/// columns and are skipped, so only finitely many degrees matter.
pub struct HilbertOracle {
    curve: Curve,
    max_jet: u64,
    orders: Vec<Vec<Option<usize>>>,
    cache: Mutex<HashMap<ExpVec, u64>>,
}

impl HilbertOracle {
    pub fn new(curve: Curve) -> Self {
        Self::with_max_jet(curve, DEFAULT_MAX_JET)
    }

    pub fn with_max_jet(curve: Curve, max_jet: u64) -> Self {
        let orders = curve.branches().iter().map(Branch::orders).collect();
        HilbertOracle {
            curve,
            max_jet,
            orders,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn max_jet(&self) -> u64 {
        self.max_jet
    }

    /// Whether `x^alpha` has order `>= v_k` on every branch.
    fn provably_zero(&self, alpha: &[usize], v: &[i64]) -> bool {
        self.orders.iter().zip(v).all(|(ord, &vk)| {
            let mut acc = 0usize;
            for (a, o) in alpha.iter().zip(ord) {
                if *a > 0 {
                    match o {
                        None => return true,
                        Some(o) => acc += a * o,
                    }
                }
            }
            acc as i64 >= vk
        })
    }

    /// Monomials of degree `<= n` that are not provably in `J(v)`, depth first.
    fn live_monomials(&self, v: &[i64], n: usize) -> Vec<Vec<usize>> {
        let dim = self.curve.ambient_dim();
        let mut out = Vec::new();
        let mut alpha = vec![0usize; dim];
        fn rec(o: &HilbertOracle, k: usize, left: usize, alpha: &mut Vec<usize>, v: &[i64], out: &mut Vec<Vec<usize>>) {
            if k == alpha.len() {
                out.push(alpha.clone());
                return;
            }
            for a in 0..=left {
                alpha[k] = a;
                if a > 0 && o.provably_zero(alpha, v) {
                    break;
                }
                rec(o, k + 1, left - a, alpha, v, out);
            }
            alpha[k] = 0;
        }
        rec(self, 0, n, &mut alpha, v, &mut out);
        out
    }

    /// Rank of the jet conditions for `J(v)` using monomials of degree `<= n`.
    fn rank_at(&self, v: &[i64], monomials: &[Vec<usize>]) -> u64 {
        let limits: Vec<usize> = v.iter().map(|&x| x.max(0) as usize).collect();
        let total: usize = limits.iter().sum();
        let mut acc = RankAccumulator::new();
        // powers[k][j][e] = phi_{k,j}^e truncated below limits[k]
        let mut powers: Vec<Vec<Vec<UPoly>>> = self
            .curve
            .branches()
            .iter()
            .zip(&limits)
            .map(|(b, &lim)| b.coords().iter().map(|c| vec![UPoly::one().truncate(lim), c.truncate(lim)]).collect())
            .collect();
        for alpha in monomials {
            let mut col = Vec::with_capacity(total);
            for (k, &lim) in limits.iter().enumerate() {
                let mut p = UPoly::one().truncate(lim);
                for (j, &a) in alpha.iter().enumerate() {
                    if a == 0 {
                        continue;
                    }
                    while powers[k][j].len() <= a {
                        let next = powers[k][j].last().unwrap().mul_trunc(&powers[k][j][1], lim);
                        powers[k][j].push(next);
                    }
                    p = p.mul_trunc(&powers[k][j][a], lim);
                }
                for e in 0..lim {
                    col.push(p.coeff(e));
                }
            }
            acc.insert(col);
        }
        acc.rank() as u64
    }

    fn compute(&self, v: &ExpVec) -> Result<u64> {
        if v.is_zero() {
            return Ok(0);
        }
        let vmax = *v.as_slice().iter().max().unwrap() as u64;
        // Degree beyond which every monomial is provably zero.
        let saturation = self.live_monomials(v.as_slice(), vmax as usize).iter().map(|a| a.iter().sum::<usize>()).max().unwrap_or(0) as u64;
        let mut memo: HashMap<u64, u64> = HashMap::new();
        let mut reading = |n: u64| -> u64 {
            let eff = n.min(saturation);
            *memo.entry(eff).or_insert_with(|| {
                let mons = self.live_monomials(v.as_slice(), eff as usize);
                self.rank_at(v.as_slice(), &mons)
            })
        };
        let mut n = vmax.max(1).min(self.max_jet);
        let mut history: Vec<u64> = vec![reading(n)];
        loop {
            let k = history.len();
            if k >= 3 && history[k - 1] == history[k - 2] && history[k - 2] == history[k - 3] {
                return Ok(history[k - 1]);
            }
            let next = (2 * n).min(self.max_jet);
            if next == n {
                return Err(Error::PrecisionExhausted(format!(
                    "jet rank for v = {v} not stable below jet order {}",
                    self.max_jet
                )));
            }
            n = next;
            history.push(reading(n));
        }
    }
}

impl HilbertFunction for HilbertOracle {
    fn nvars(&self) -> usize {
        self.curve.num_branches()
    }

    fn h(&self, v: &ExpVec) -> Result<u64> {
        if v.len() != self.nvars() {
            return Err(Error::InvalidInput(format!(
                "expected {} components, got {}",
                self.nvars(),
                v.len()
            )));
        }
        let v = v.clamp_nonneg();
        if let Some(&h) = self.cache.lock().unwrap().get(&v) {
            return Ok(h);
        }
        let h = self.compute(&v)?;
        self.cache.lock().unwrap().insert(v, h);
        Ok(h)
    }
}

/// Series of the filtration defined by the branches in `ks` only.
pub fn subsystem_series(c: &Curve, ks: &[usize], kind: SeriesKind, hi: &ExpVec, max_jet: u64) -> Result<MSeries> {
    let o = HilbertOracle::with_max_jet(c.sub_curve(ks)?, max_jet);
    series(&o, kind, hi)
}

/// Outcome of the check of the Hilbert function against the subsystem series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RemarkReport {
    pub holds: bool,
    pub mismatch: Option<Mismatch>,
    /// Result of the unsubstituted reading where the prefactor keeps every `t_k`.
    pub literal_mismatch: Option<Mismatch>,
}

/// Compares `H(t)` with its expression through the subsystem series `P_K`:
///
/// `H(t) prod (t_k - 1) = -sum_{K nonempty} (-1)^(r-#K) t_K P_K(t_K)`
///
/// where `t_K = prod_{k in K} t_k`. This is the printed formula with the
/// substitution `t_k = 1` (`k` not in `K`) applied to the whole summand,
/// including the prefactor `t / (1 - t^1)`. The variant that keeps the
/// prefactor outside the substitution is evaluated as well.
pub fn remark_identity_check(c: &Curve, hi: &ExpVec, max_jet: u64) -> Result<RemarkReport> {
    let r = c.num_branches();
    if hi.len() != r || !hi.is_nonneg() {
        return Err(Error::InvalidInput("window must have one nonnegative entry per branch".into()));
    }
    let zero = ExpVec::zeros(r);
    let full = HilbertOracle::with_max_jet(c.clone(), max_jet);
    let h = series(&full, SeriesKind::H, hi)?;
    let pk = crate::filtration::prod_t_minus_one(r);
    let lhs = h.mul_poly(&pk)?;
    let t_all = ExpVec::filled(r, 1);
    let lhs_literal = lhs.mul_poly(&MPoly::one_minus(&crate::kernel::LaurentPoly::one(), t_all.clone()))?;

    let mut rhs = MSeries::on_box(hi.clone());
    let mut rhs_literal = MSeries::on_box(hi.clone());
    for mask in 1u64..(1 << r) {
        let ks: Vec<usize> = (0..r).filter(|k| mask >> k & 1 == 1).collect();
        let sub_hi = ExpVec(ks.iter().map(|&k| hi.0[k]).collect());
        let p = if ks.len() == r {
            series(&full, SeriesKind::P, hi)?
        } else {
            subsystem_series(c, &ks, SeriesKind::P, &sub_hi, max_jet)?.embed(r, &ks, hi)
        };
        let sgn = if (r - ks.len()).is_multiple_of(2) { -1 } else { 1 };
        let t_k = ExpVec::indicator(r, ks.iter().copied());
        let term = p.mul_poly(&MPoly::monomial(sgn.into(), t_k.clone()))?;
        rhs = rhs.add(&term)?;
        // literal: t * sum (-1)^(r-#K) P_K (t_K - 1)
        let lit = p.mul_poly(&MPoly::monomial_minus_one(t_k).mul(&MPoly::monomial((-sgn).into(), t_all.clone())))?;
        rhs_literal = rhs_literal.add(&lit)?;
    }
    let mismatch = lhs.first_mismatch(&rhs, &zero, hi)?;
    let literal_mismatch = lhs_literal.first_mismatch(&rhs_literal, &zero, hi)?;
    Ok(RemarkReport {
        holds: mismatch.is_none(),
        mismatch,
        literal_mismatch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::{generalized_coeff, poincare_coeff, rational_identity, Identity};
    use crate::kernel::LaurentPoly;
    use crate::rational::q_int;

    fn curve_c() -> Curve {
        Curve::new(vec![Branch::monomial(&[2, 3, 2, 4, 5]), Branch::monomial(&[2, 3, 4, 2, 6])]).unwrap()
    }

    fn lines() -> Curve {
        Curve::new(vec![Branch::monomial(&[1, 0]), Branch::monomial(&[0, 1])]).unwrap()
    }

    fn e(v: &[i64]) -> ExpVec {
        ExpVec(v.to_vec())
    }

    #[test]
    fn valuation_examples() {
        let c = curve_c();
        let (v, a) = valuation(&c, &QPoly::var(5, 0)).unwrap();
        assert_eq!(v, vec![Some(2), Some(2)]);
        assert_eq!(a, vec![Some(q_int(1)), Some(q_int(1))]);
        let (v, _) = valuation(&c, &QPoly::one(5)).unwrap();
        assert_eq!(v, vec![Some(0), Some(0)]);
        let g = QPoly::parse("x1 - x3", 5).unwrap();
        assert_eq!(valuation(&c, &g).unwrap().0, vec![None, Some(2)]);
        assert!(matches!(valuation(&c, &QPoly::zero(5)), Err(Error::UndefinedValuation)));
    }

    #[test]
    fn hilbert_examples() {
        let o = HilbertOracle::new(curve_c());
        assert_eq!(o.h(&e(&[3, 3])).unwrap(), 3);
        assert_eq!(o.h(&e(&[0, 0])).unwrap(), 0);
        assert_eq!(o.h(&e(&[-2, 3])).unwrap(), o.h(&e(&[0, 3])).unwrap());
        let o = HilbertOracle::new(lines());
        let table: Vec<u64> = [[0, 0], [1, 0], [0, 1], [1, 1]].iter().map(|v| o.h(&e(v)).unwrap()).collect();
        assert_eq!(table, vec![0, 1, 1, 1]);
    }

    #[test]
    fn jet_cap_is_enforced() {
        let o = HilbertOracle::with_max_jet(curve_c(), 4);
        assert!(matches!(o.h(&e(&[3, 3])), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn transverse_lines_coefficients() {
        let o = HilbertOracle::new(lines());
        assert_eq!(poincare_coeff(&o, &e(&[1, 1])).unwrap(), 0.into());
        assert_eq!(
            generalized_coeff(&o, &e(&[2, 1])).unwrap(),
            &LaurentPoly::q_pow(2) - &LaurentPoly::q_pow(3)
        );
        for which in [Identity::Classical, Identity::Generalized] {
            assert_eq!(rational_identity(&o, which, &e(&[4, 4])).unwrap(), None);
        }
    }

    #[test]
    fn remark_holds_for_lines() {
        let rep = remark_identity_check(&lines(), &e(&[4, 4]), DEFAULT_MAX_JET).unwrap();
        assert!(rep.holds, "{:?}", rep.mismatch);
        assert!(rep.literal_mismatch.is_some());
        let smooth = Curve::new(vec![Branch::monomial(&[1, 0])]).unwrap();
        let rep = remark_identity_check(&smooth, &e(&[5]), DEFAULT_MAX_JET).unwrap();
        assert!(rep.holds && rep.literal_mismatch.is_none());
    }

    #[test]
    fn json_roundtrip() {
        let c = curve_c();
        let js = c.to_json();
        assert!(js.starts_with(r#"{"ambient_dim":5,"branches":[{"coords":[[[2,"1"]],[[3,"1"]]"#));
        assert_eq!(Curve::from_json(&js).unwrap(), c);
        assert!(Curve::from_json(r#"{"ambient_dim":1,"branches":[{"coords":[[[0,"1"]]]}]}"#).is_err());
    }

    #[test]
    fn repeated_branch_rejected() {
        let b = Branch::monomial(&[1, 0]);
        assert!(matches!(Curve::new(vec![b.clone(), b]), Err(Error::NonreducedInput(_))));
    }
}
