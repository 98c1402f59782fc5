//! Cross-checks of the closed formulas against the rank oracles on the
//! standard fixtures.

use std::fmt;

use crate::blowup::{auto_resolve, Center, DivisorialOracle, Location, Modification};
use crate::curve::{remark_identity_check, Curve, HilbertOracle, DEFAULT_MAX_JET};
use crate::error::Result;
use crate::filtration::{
    generalized_coeff, poincare_coeff, rational_identity, semigroup_coeff, series, HilbertFunction,
    Identity, SeriesKind,
};
use crate::fixtures;
use crate::formulas::{
    enumerate_terms, eq10_product, eq11_product, f_divisorial, theorem1_series, theorem2_series,
    theorem3_series, Mode,
};
use crate::graph::{build_intersection, hoskin_deligne, w_of_nhat, DualGraph};
use crate::kernel::{box_points, ExpVec, Mismatch, MSeries};
use crate::rational::{q_int, QPoly};

/// Outcome of one check on one fixture.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub fixture: String,
    /// `None` when the check passed, otherwise the first discrepancy.
    pub failure: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }

    fn new(name: &'static str, fixture: &str, failure: Option<String>) -> Check {
        Check {
            name,
            fixture: fixture.to_string(),
            failure,
        }
    }

    fn from_mismatch(name: &'static str, fixture: &str, m: Option<Mismatch>) -> Check {
        Check::new(name, fixture, m.map(|m| m.to_string()))
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failure {
            None => write!(f, "PASS {} [{}]", self.name, self.fixture),
            Some(d) => write!(f, "FAIL {} [{}]: {}", self.name, self.fixture, d),
        }
    }
}

/// Default window of a curve fixture.
pub fn curve_window(name: &str, c: &Curve) -> ExpVec {
    let b = match name {
        "smooth" => 5,
        "lines" => 4,
        "cusp" => 8,
        _ => 6,
    };
    ExpVec::filled(c.num_branches(), b)
}

fn pointwise<F>(name: &'static str, fixture: &str, hi: &ExpVec, f: F) -> Result<Check>
where
    F: Fn(&ExpVec) -> Result<Option<String>>,
{
    for v in box_points(&ExpVec::zeros(hi.len()), hi) {
        if let Some(d) = f(&v)? {
            return Ok(Check::new(name, fixture, Some(format!("at {v}: {d}"))));
        }
    }
    Ok(Check::new(name, fixture, None))
}

fn specialization(o: &dyn HilbertFunction, fixture: &str, hi: &ExpVec) -> Result<Check> {
    pointwise("specialization", fixture, hi, |v| {
        let a = generalized_coeff(o, v)?.eval_one();
        let b = poincare_coeff(o, v)?;
        Ok((a != b).then(|| format!("{a} vs {b}")))
    })
}

fn fibre_emptiness(o: &dyn HilbertFunction, fixture: &str, hi: &ExpVec) -> Result<Check> {
    pointwise("fibre-emptiness", fixture, hi, |v| {
        let g = generalized_coeff(o, v)?;
        let s = semigroup_coeff(o, v)?;
        Ok((g.is_zero() != s.is_zero()).then(|| format!("Pg {g}, Phat {s}")))
    })
}

fn hilbert_steps(o: &dyn HilbertFunction, fixture: &str, hi: &ExpVec) -> Result<Check> {
    let r = hi.len();
    pointwise("hilbert-steps", fixture, hi, |v| {
        let h = o.h(v)?;
        for k in 0..r {
            let hk = o.h(&v.add(&ExpVec::unit(r, k)))?;
            if hk < h || hk - h > 1 {
                return Ok(Some(format!("h jumps from {h} to {hk} in direction {}", k + 1)));
            }
        }
        Ok(None)
    })
}

fn polynomial_claims(o: &dyn HilbertFunction, fixture: &str, hi: &ExpVec) -> Result<Check> {
    let pg = series(o, SeriesKind::Pg, hi)?;
    let ph = series(o, SeriesKind::Phat, hi)?;
    let failure = if !pg.is_q_normalized() {
        Some("Pg has a positive power of L".to_string())
    } else if !ph.is_l_normalized() {
        Some("Phat has a negative power of L".to_string())
    } else {
        None
    };
    Ok(Check::new("coefficient-polynomials", fixture, failure))
}

fn identities(o: &dyn HilbertFunction, fixture: &str, hi: &ExpVec) -> Result<Vec<Check>> {
    Ok(vec![
        Check::from_mismatch("identity-P", fixture, rational_identity(o, Identity::Classical, hi)?),
        Check::from_mismatch("identity-Pg", fixture, rational_identity(o, Identity::Generalized, hi)?),
        Check::from_mismatch("identity-Phat", fixture, rational_identity(o, Identity::Semigroup, hi)?),
    ])
}

fn compare(name: &'static str, fixture: &str, a: &MSeries, b: &MSeries, hi: &ExpVec) -> Result<Check> {
    Ok(Check::from_mismatch(name, fixture, a.first_mismatch(b, &ExpVec::zeros(hi.len()), hi)?))
}

fn graph_structure(fixture: &str, g: &DualGraph) -> Result<Check> {
    let failure = match build_intersection(g) {
        Err(e) => Some(e.to_string()),
        Ok(d) => d
            .m()
            .iter()
            .flatten()
            .any(|&x| x <= 0)
            .then(|| "M has a nonpositive entry".to_string()),
    };
    Ok(Check::new("unimodular-tree", fixture, failure))
}

fn curvettes(fixture: &str, m: &Modification) -> Result<Check> {
    let d = build_intersection(&m.graph()?)?;
    for i in 0..m.num_components() {
        let used: Vec<Location> = m.special_points(i).into_iter().map(|(_, l)| l).collect();
        let c = (1..)
            .map(q_int)
            .find(|c| !used.contains(&Location::Finite(c.clone())))
            .unwrap();
        let g = m.curvette(i, &c)?;
        let w = m.multiplicities(&g)?;
        if w != d.row(i) {
            return Ok(Check::new(
                "curvette-rows",
                fixture,
                Some(format!("E{}: curvette {g} has w = {w}, row of M is {}", i + 1, d.row(i))),
            ));
        }
    }
    Ok(Check::new("curvette-rows", fixture, None))
}

fn additivity(fixture: &str, m: &Modification) -> Result<Check> {
    let polys = ["x + y", "y^2 - x^3", "x*y - 2*y^3", "3*x^2 + y", "x - y^2 + 5*x*y"];
    for a in polys {
        for b in polys {
            let f = QPoly::parse(a, 2)?;
            let g = QPoly::parse(b, 2)?;
            let lhs = m.multiplicities(&f.mul(&g))?;
            let rhs = m.multiplicities(&f)?.add(&m.multiplicities(&g)?);
            if lhs != rhs {
                return Ok(Check::new(
                    "valuation-additivity",
                    fixture,
                    Some(format!("w(({a})({b})) = {lhs}, sum {rhs}")),
                ));
            }
        }
    }
    Ok(Check::new("valuation-additivity", fixture, None))
}

/// Window of a divisorial fixture: every coordinate at least `b`, enlarged
/// so that the window holds `w(1_i)` for every `i`.
pub fn divisorial_window(g: &DualGraph, b: i64) -> Result<ExpVec> {
    let d = build_intersection(g)?;
    let mut hi = ExpVec::filled(g.num_vertices(), b);
    for i in 0..g.num_vertices() {
        hi = hi.cmax(&d.row(i));
    }
    Ok(hi)
}

fn hoskin_deligne_check(fixture: &str, g: &DualGraph, o: &DivisorialOracle, hi: &ExpVec) -> Result<Check> {
    let d = build_intersection(g)?;
    let s = g.num_vertices();
    let bound = *hi.as_slice().iter().max().unwrap() as u64;
    // w(nhat) >= nhat componentwise, so nhat ranges over a finite box
    for nhat in box_points(&ExpVec::zeros(s), &ExpVec::filled(s, bound as i64)) {
        let n: Vec<u64> = nhat.as_slice().iter().map(|&x| x as u64).collect();
        let w = w_of_nhat(&d, &n);
        if !w.leq(hi) {
            continue;
        }
        let a = hoskin_deligne(&d, g, &n)?;
        let b = o.h(&w)?;
        if a != b {
            return Ok(Check::new(
                "hoskin-deligne",
                fixture,
                Some(format!("nhat {nhat}: formula {a}, oracle {b}")),
            ));
        }
    }
    Ok(Check::new("hoskin-deligne", fixture, None))
}

fn codimension_identity(fixture: &str, g: &DualGraph, o: &DivisorialOracle, hi: &ExpVec) -> Result<Check> {
    let d = build_intersection(g)?;
    for t in enumerate_terms(g, &d, hi, Mode::Divisorial)? {
        let nhat = t.nhat(g);
        let w = w_of_nhat(&d, &nhat);
        let f = f_divisorial(&t, &d, g)?;
        let expect = o.h(&w)? + nhat.iter().sum::<u64>();
        if f != expect {
            return Ok(Check::new(
                "codimension-formula",
                fixture,
                Some(format!("nhat {}: F = {f}, h + |nhat| = {expect}", ExpVec(nhat.iter().map(|&x| x as i64).collect()))),
            ));
        }
    }
    Ok(Check::new("codimension-formula", fixture, None))
}

fn monotone(fixture: &str, o: &DivisorialOracle, hi: &ExpVec) -> Result<Check> {
    let s = hi.len();
    if o.h(&ExpVec::zeros(s))? != 0 {
        return Ok(Check::new("divisorial-monotone", fixture, Some("h(0) != 0".into())));
    }
    pointwise("divisorial-monotone", fixture, hi, |v| {
        let h = o.h(v)?;
        for k in 0..s {
            if o.h(&v.add(&ExpVec::unit(s, k)))? < h {
                return Ok(Some(format!("decreases in direction {}", k + 1)));
            }
        }
        Ok(None)
    })
}

/// Placement of the substitution `t_k = 1` in the Hilbert series identity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RemarkReading {
    /// Substitution applied to the whole summand, prefactor included.
    #[default]
    Whole,
    /// Prefactor `t1...tr / (1 - t^1)` kept outside the substitution.
    Literal,
}

/// Checks on a curve fixture.
pub fn curve_checks(name: &str, c: &Curve, max_jet: u64, reading: RemarkReading) -> Result<Vec<Check>> {
    let hi = curve_window(name, c);
    let o = HilbertOracle::with_max_jet(c.clone(), max_jet);
    let mut out = vec![
        specialization(&o, name, &hi)?,
        fibre_emptiness(&o, name, &hi)?,
        hilbert_steps(&o, name, &hi)?,
        polynomial_claims(&o, name, &hi)?,
    ];
    out.extend(identities(&o, name, &hi)?);
    if name != "cusp" {
        let rep = remark_identity_check(c, &hi, max_jet)?;
        let m = match reading {
            RemarkReading::Whole => rep.mismatch,
            RemarkReading::Literal => rep.literal_mismatch,
        };
        out.push(Check::from_mismatch("remark-identity", name, m));
    }
    if c.ambient_dim() == 2 {
        let res = auto_resolve(c)?;
        out.push(graph_structure(name, &res.graph)?);
        let oracle = series(&o, SeriesKind::Pg, &hi)?;
        let closed = theorem1_series(&res.graph, &hi)?;
        out.push(compare("theorem1-vs-oracle", name, &closed, &oracle, &hi)?);
        // an extra blow-up at a free point of the last component
        let last = res.modification.num_components() - 1;
        let used: Vec<Location> = res.modification.special_points(last).into_iter().map(|(_, l)| l).collect();
        let free = (1..)
            .map(|k| Location::Finite(q_int(k)))
            .find(|l| !used.contains(l) && !res.points.contains(&crate::blowup::PointKey::Free(last, l.clone())))
            .unwrap();
        let bigger = res.with_extra_blowup(&Center::Free { on: last, param: free })?;
        let again = theorem1_series(&bigger.graph, &hi)?;
        out.push(compare("resolution-independence", name, &again, &closed, &hi)?);
    }
    Ok(out)
}

/// Checks on a blow-up fixture.
pub fn script_checks(name: &str, m: &Modification, max_jet: u64) -> Result<Vec<Check>> {
    let g = m.graph()?;
    let o = DivisorialOracle::with_max_jet(m.clone(), max_jet)?;
    let s = g.num_vertices();
    let hi = divisorial_window(&g, if s == 1 { 6 } else { 4 })?;
    let mut out = vec![graph_structure(name, &g)?, curvettes(name, m)?, additivity(name, m)?];
    let oracle = series(&o, SeriesKind::Pg, &hi)?;
    out.push(compare("theorem2-vs-oracle", name, &theorem2_series(&g, &hi)?, &oracle, &hi)?);
    let oracle_hat = series(&o, SeriesKind::Phat, &hi)?;
    out.push(compare("theorem3-vs-oracle", name, &theorem3_series(&g, &hi)?, &oracle_hat, &hi)?);
    out.push(hoskin_deligne_check(name, &g, &o, &hi)?);
    out.push(codimension_identity(name, &g, &o, &hi)?);
    out.push(monotone(name, &o, &hi)?);
    out.push(polynomial_claims(&o, name, &hi)?);
    Ok(out)
}

/// Checks on a graph that need no oracle.
pub fn graph_checks(name: &str, g: &DualGraph) -> Result<Vec<Check>> {
    let hi = ExpVec::filled(g.num_vertices(), 8);
    let t3 = theorem3_series(g, &hi)?.eval_one();
    let e10 = eq10_product(g, &hi)?;
    let e11 = eq11_product(g, &hi)?;
    Ok(vec![
        graph_structure(name, g)?,
        compare("theorem3-vs-eq10", name, &t3, &e10, &hi)?,
        compare("eq10-vs-eq11", name, &e10, &e11, &hi)?,
        compare("theorem3-vs-theorem2", name, &t3, &theorem2_series(g, &hi)?.eval_one(), &hi)?,
    ])
}

/// Runs every check on every fixture.
pub fn run_all(max_jet: u64, reading: RemarkReading) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (name, c) in fixtures::curves() {
        out.extend(curve_checks(name, &c, max_jet, reading)?);
    }
    for (name, s) in fixtures::scripts() {
        out.extend(script_checks(name, &Modification::from_script(&s)?, max_jet)?);
    }
    for (name, g) in fixtures::graphs() {
        out.extend(graph_checks(name, &g)?);
    }
    Ok(out)
}

pub fn run_default() -> Result<Vec<Check>> {
    run_all(DEFAULT_MAX_JET, RemarkReading::Whole)
}
