//! Closed formulas for the generalized Poincare series in terms of a
//! resolution graph, expanded on a window.
//!
//! The curve and divisorial sums run over index data `(I, K, n)`. All
//! exponent vectors are monotone in every index variable because the entries
//! of `M` are positive, which is what makes the depth-first enumeration with
//! bound pruning exhaustive.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{build_intersection, half, quadratic, DualGraph, IntersectionData};
use crate::kernel::{expand_rational, sym_power_class, ExpVec, LaurentPoly, MPoly, MSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Curve valuations: exponents `v_k = w_i(k) + n''_k`, one variable per arrow.
    Curve,
    /// Divisorial valuations: exponents `w`, one variable per component; arrows ignored.
    Divisorial,
}

/// One index `(I, K, n)` of the closed sums.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TermIndex {
    /// Positions in `DualGraph::edges()` of the chosen intersection points.
    pub edges: Vec<usize>,
    /// Chosen arrows.
    pub arrows: Vec<usize>,
    pub n: Vec<u64>,
    /// `n'_sigma`, `n''_sigma` aligned with `edges`.
    pub nprime: Vec<u64>,
    pub ndprime: Vec<u64>,
    /// `n~'_k`, `n~''_k` aligned with `arrows`.
    pub atilde: Vec<u64>,
    pub btilde: Vec<u64>,
}

impl TermIndex {
    pub fn zero(s: usize) -> Self {
        TermIndex {
            edges: Vec::new(),
            arrows: Vec::new(),
            n: vec![0; s],
            nprime: Vec::new(),
            ndprime: Vec::new(),
            atilde: Vec::new(),
            btilde: Vec::new(),
        }
    }

    pub fn nhat(&self, g: &DualGraph) -> Vec<u64> {
        let mut h = self.n.clone();
        for (p, &e) in self.edges.iter().enumerate() {
            let (i, j) = g.edges()[e];
            h[i] += self.nprime[p];
            h[j] += self.ndprime[p];
        }
        for (p, &k) in self.arrows.iter().enumerate() {
            h[g.arrows()[k]] += self.atilde[p];
        }
        h
    }

    /// Exponent of `t`: `v(n)` in curve mode, `w(n)` in divisorial mode.
    pub fn exponent(&self, g: &DualGraph, d: &IntersectionData, mode: Mode) -> ExpVec {
        let nh = self.nhat(g);
        let w = crate::graph::w_of_nhat(d, &nh);
        match mode {
            Mode::Divisorial => w,
            Mode::Curve => {
                let mut v: Vec<i64> = g.arrows().iter().map(|&i| w.0[i]).collect();
                for (p, &k) in self.arrows.iter().enumerate() {
                    v[k] += self.btilde[p] as i64;
                }
                ExpVec(v)
            }
        }
    }
}

fn f_generic(t: &TermIndex, d: &IntersectionData, g: &DualGraph) -> Result<u64> {
    let s = d.size();
    let nh = t.nhat(g);
    let mut lin = 0i128;
    for i in 0..s {
        let row: i128 = (0..s).map(|j| d.m_ij(i, j) as i128 * g.chi_bullet(j) as i128).sum();
        lin += nh[i] as i128 * (row + 1);
    }
    half(quadratic(d, &nh) + lin, "codimension F")
}

/// `F(n)` of the curve formula.
pub fn f_curve(t: &TermIndex, d: &IntersectionData, g: &DualGraph) -> Result<u64> {
    Ok(f_generic(t, d, g)? + t.btilde.iter().sum::<u64>())
}

/// `F^D(n)` of the divisorial formula.
pub fn f_divisorial(t: &TermIndex, d: &IntersectionData, g: &DualGraph) -> Result<u64> {
    if !t.arrows.is_empty() {
        return Err(Error::InvalidInput("divisorial index with arrows".into()));
    }
    f_generic(t, d, g)
}

/// Exponent `F - sum n_i - #I - #K` of the leading power of `q` in a term.
pub fn term_q_exponent(t: &TermIndex, d: &IntersectionData, g: &DualGraph, mode: Mode) -> Result<i64> {
    let f = match mode {
        Mode::Curve => f_curve(t, d, g)?,
        Mode::Divisorial => f_divisorial(t, d, g)?,
    };
    Ok(f as i64 - t.n.iter().sum::<u64>() as i64 - t.edges.len() as i64 - t.arrows.len() as i64)
}

/// Full coefficient of a term.
pub fn term_coefficient(t: &TermIndex, d: &IntersectionData, g: &DualGraph, mode: Mode) -> Result<LaurentPoly> {
    let e = term_q_exponent(t, d, g, mode)?;
    let one_minus_q = &LaurentPoly::one() - &LaurentPoly::q();
    let mut c = LaurentPoly::q_pow(e) * one_minus_q.pow((t.edges.len() + t.arrows.len()) as u32);
    for (i, &ni) in t.n.iter().enumerate() {
        let chi = match mode {
            Mode::Curve => g.chi_open(i),
            Mode::Divisorial => g.chi_bullet(i),
        };
        c = c * sym_power_class(chi, ni)?.shift(-(ni as i64));
    }
    Ok(c)
}

struct Subset {
    edges: Vec<usize>,
    arrows: Vec<usize>,
}

fn subsets(g: &DualGraph, mode: Mode) -> Vec<Subset> {
    let ne = g.edges().len();
    let na = match mode {
        Mode::Curve => g.num_arrows(),
        Mode::Divisorial => 0,
    };
    let mut out = Vec::new();
    for em in 0u64..(1 << ne) {
        for am in 0u64..(1 << na) {
            out.push(Subset {
                edges: (0..ne).filter(|b| em >> b & 1 == 1).collect(),
                arrows: (0..na).filter(|b| am >> b & 1 == 1).collect(),
            });
        }
    }
    out
}

fn check_window(g: &DualGraph, hi: &ExpVec, mode: Mode) -> Result<()> {
    let need = match mode {
        Mode::Curve => g.num_arrows(),
        Mode::Divisorial => g.num_vertices(),
    };
    if mode == Mode::Curve && need == 0 {
        return Err(Error::InvalidInput("the curve formula needs at least one arrow".into()));
    }
    if hi.len() != need {
        return Err(Error::InvalidInput(format!("window has {} entries, expected {need}", hi.len())));
    }
    if !hi.is_nonneg() {
        return Err(Error::InvalidInput("window bound must be nonnegative".into()));
    }
    Ok(())
}

/// Depth-first walk over the index data of one `(I, K)` choice with exponent `<= hi`.
fn walk_subset(
    g: &DualGraph,
    d: &IntersectionData,
    hi: &ExpVec,
    mode: Mode,
    sub: &Subset,
    visit: &mut dyn FnMut(&TermIndex, &ExpVec),
) {
    let s = g.num_vertices();
    // Each index variable contributes a fixed nonnegative increment to the exponent.
    let nvar_vec = |i: usize| -> ExpVec {
        match mode {
            Mode::Divisorial => d.row(i),
            Mode::Curve => ExpVec(g.arrows().iter().map(|&a| d.m_ij(i, a)).collect()),
        }
    };
    // (increment, minimum value) for every variable in the fixed order
    // n_1..n_s, then n'_sigma, n''_sigma per edge, then n~'_k, n~''_k per arrow.
    let mut vars: Vec<(ExpVec, u64)> = (0..s).map(|i| (nvar_vec(i), 0)).collect();
    for &e in &sub.edges {
        let (i, j) = g.edges()[e];
        vars.push((nvar_vec(i), 1));
        vars.push((nvar_vec(j), 1));
    }
    for &k in &sub.arrows {
        vars.push((nvar_vec(g.arrows()[k]), 1));
        vars.push((ExpVec::unit(hi.len(), k), 1));
    }
    let mut base = ExpVec::zeros(hi.len());
    for (inc, m) in &vars {
        base = base.add(&inc.scale(*m as i64));
    }
    if !base.leq(hi) {
        return;
    }
    let mut values: Vec<u64> = vars.iter().map(|(_, m)| *m).collect();

    fn rec(
        idx: usize,
        cur: ExpVec,
        vars: &[(ExpVec, u64)],
        values: &mut Vec<u64>,
        hi: &ExpVec,
        emit: &mut dyn FnMut(&[u64], &ExpVec),
    ) {
        if idx == vars.len() {
            emit(values, &cur);
            return;
        }
        let (inc, m) = &vars[idx];
        let mut c = cur;
        let mut v = *m;
        loop {
            values[idx] = v;
            rec(idx + 1, c.clone(), vars, values, hi, emit);
            c = c.add(inc);
            if inc.is_zero() || !c.leq(hi) {
                break;
            }
            v += 1;
        }
        values[idx] = *m;
    }

    let mut emit = |vals: &[u64], exp: &ExpVec| {
        let ne = sub.edges.len();
        let mut t = TermIndex::zero(s);
        t.n = vals[..s].to_vec();
        t.edges = sub.edges.clone();
        t.arrows = sub.arrows.clone();
        for p in 0..ne {
            t.nprime.push(vals[s + 2 * p]);
            t.ndprime.push(vals[s + 2 * p + 1]);
        }
        for p in 0..sub.arrows.len() {
            t.atilde.push(vals[s + 2 * ne + 2 * p]);
            t.btilde.push(vals[s + 2 * ne + 2 * p + 1]);
        }
        visit(&t, exp);
    };
    rec(0, base, &vars, &mut values, hi, &mut emit);
}

/// Every index whose exponent lies in `[0, hi]`, each exactly once, in a
/// deterministic order.
pub fn enumerate_terms(g: &DualGraph, d: &IntersectionData, hi: &ExpVec, mode: Mode) -> Result<Vec<TermIndex>> {
    check_window(g, hi, mode)?;
    let mut out = Vec::new();
    for sub in subsets(g, mode) {
        walk_subset(g, d, hi, mode, &sub, &mut |t, _| out.push(t.clone()));
    }
    Ok(out)
}

fn closed_sum(g: &DualGraph, hi: &ExpVec, mode: Mode) -> Result<MSeries> {
    check_window(g, hi, mode)?;
    let d = build_intersection(g)?;
    let parts: Vec<Result<MSeries>> = subsets(g, mode)
        .par_iter()
        .map(|sub| {
            let mut acc = MSeries::on_box(hi.clone());
            let mut err = None;
            walk_subset(g, &d, hi, mode, sub, &mut |t, exp| {
                if err.is_some() {
                    return;
                }
                match term_coefficient(t, &d, g, mode) {
                    Ok(c) => {
                        acc.accumulate(exp.clone(), &c);
                    }
                    Err(e) => err = Some(e),
                }
            });
            match err {
                Some(e) => Err(e),
                None => Ok(acc),
            }
        })
        .collect();
    let mut total = MSeries::on_box(hi.clone());
    for p in parts {
        total = total.add(&p?)?;
    }
    if !total.is_q_normalized() {
        return Err(Error::InternalInconsistency("coefficient with a positive power of L".into()));
    }
    Ok(total)
}

/// Generalized Poincare series of the curve filtration from the resolution graph
/// with arrows; one variable per arrow.
pub fn theorem1_series(g: &DualGraph, hi: &ExpVec) -> Result<MSeries> {
    closed_sum(g, hi, Mode::Curve)
}

/// Generalized Poincare series of the divisorial filtration; one variable per component.
pub fn theorem2_series(g: &DualGraph, hi: &ExpVec) -> Result<MSeries> {
    closed_sum(&g.without_arrows(), hi, Mode::Divisorial)
}

fn divisorial_rows(g: &DualGraph, hi: &ExpVec) -> Result<IntersectionData> {
    check_window(g, hi, Mode::Divisorial)?;
    build_intersection(g)
}

/// Semigroup series of the divisorial filtration as a rational function in `t` and `L`.
pub fn theorem3_series(g: &DualGraph, hi: &ExpVec) -> Result<MSeries> {
    let d = divisorial_rows(g, hi)?;
    let s = g.num_vertices();
    let one = LaurentPoly::one();
    let l = LaurentPoly::lefschetz();
    let mut num = MPoly::one(s);
    for &(i, j) in g.edges() {
        let (mi, mj) = (d.row(i), d.row(j));
        let mut f = MPoly::one(s);
        f.add_term(mi.clone(), &-&one);
        f.add_term(mj.clone(), &-&one);
        f.add_term(mi.add(&mj), &l);
        num = num.mul(&f);
    }
    let mut factors = Vec::new();
    for i in 0..s {
        factors.push((one.clone(), d.row(i)));
        factors.push((l.clone(), d.row(i)));
    }
    let out = expand_rational(&num, &factors, hi)?;
    if !out.is_l_normalized() {
        return Err(Error::InternalInconsistency("coefficient with a negative power of L".into()));
    }
    Ok(out)
}

/// `prod_i (1 - t^m_i)^(-chi(E_i bullet))`.
pub fn eq10_product(g: &DualGraph, hi: &ExpVec) -> Result<MSeries> {
    let d = divisorial_rows(g, hi)?;
    let s = g.num_vertices();
    let one = LaurentPoly::one();
    let mut num = MPoly::one(s);
    let mut factors = Vec::new();
    for i in 0..s {
        let chi = g.chi_bullet(i);
        if chi > 0 {
            factors.extend(std::iter::repeat_n((one.clone(), d.row(i)), chi as usize));
        } else {
            num = num.mul(&MPoly::one_minus(&one, d.row(i)).pow((-chi) as u32));
        }
    }
    expand_rational(&num, &factors, hi)
}

/// `prod_sigma (1 - t^m_i(sigma))(1 - t^m_j(sigma)) / prod_i (1 - t^m_i)^2`.
pub fn eq11_product(g: &DualGraph, hi: &ExpVec) -> Result<MSeries> {
    let d = divisorial_rows(g, hi)?;
    let s = g.num_vertices();
    let one = LaurentPoly::one();
    let mut num = MPoly::one(s);
    for &(i, j) in g.edges() {
        num = num
            .mul(&MPoly::one_minus(&one, d.row(i)))
            .mul(&MPoly::one_minus(&one, d.row(j)));
    }
    let mut factors = Vec::new();
    for i in 0..s {
        factors.push((one.clone(), d.row(i)));
        factors.push((one.clone(), d.row(i)));
    }
    expand_rational(&num, &factors, hi)
}
