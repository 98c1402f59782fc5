//! Sequences of point blow-ups of the plane, divisorial valuations, the
//! divisorial Hilbert oracle and embedded resolution of parametrized plane
//! curves.
//!
//! Every chart is a polynomial map `(a, b) -> (x, y)` into the original
//! plane. A component `E` remembers two charts in which it is `{a = 0}`:
//! the host chart, whose coordinate `b` is the affine parameter on `E`, and
//! the alternative chart, which covers the point `b = infinity`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Mutex;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::curve::{Curve, DEFAULT_MAX_JET};
use crate::error::{Error, Result};
use crate::filtration::HilbertFunction;
use crate::graph::DualGraph;
use crate::kernel::ExpVec;
use crate::linalg::{nullspace, RankAccumulator};
use crate::rational::{parse_q, q_to_string, QPoly, RatFn, Q};

/// Point on a component in its host coordinate.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Location {
    Finite(Q),
    Infinity,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Finite(c) => f.write_str(&q_to_string(c)),
            Location::Infinity => f.write_str("inf"),
        }
    }
}

impl Location {
    pub fn parse(s: &str) -> Result<Location> {
        if s.trim() == "inf" {
            Ok(Location::Infinity)
        } else {
            parse_q(s).map(Location::Finite)
        }
    }
}

/// Blow-up center (component indices 0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Center {
    Origin,
    Free { on: usize, param: Location },
    Corner(usize, usize),
}

/// Composite chart map `(a, b) -> (x, y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    pub map: [QPoly; 2],
    /// Index of the step that created the chart (`0` for the identity chart).
    pub step: usize,
}

impl Chart {
    fn identity() -> Chart {
        Chart {
            map: [QPoly::var(2, 0), QPoly::var(2, 1)],
            step: 0,
        }
    }

    fn compose(&self, images: [QPoly; 2], step: usize) -> Chart {
        Chart {
            map: [self.map[0].substitute(&images), self.map[1].substitute(&images)],
            step,
        }
    }

    /// `(a, b) -> (a, ab)`.
    fn chart_a(&self, step: usize) -> Chart {
        let a = QPoly::var(2, 0);
        let ab = a.mul(&QPoly::var(2, 1));
        self.compose([a, ab], step)
    }

    /// `(a, b) -> (ab, a)`.
    fn chart_b(&self, step: usize) -> Chart {
        let a = QPoly::var(2, 0);
        let ab = a.mul(&QPoly::var(2, 1));
        self.compose([ab, a], step)
    }

    /// `(a, b) -> (a, b + c)`.
    fn translate(&self, c: &Q) -> Chart {
        let b = QPoly::var(2, 1).add(&QPoly::constant(2, c.clone()));
        self.compose([QPoly::var(2, 0), b], self.step)
    }

    /// `g` pulled back to the chart.
    pub fn pull_back(&self, g: &QPoly) -> QPoly {
        g.substitute(&self.map)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Component {
    host: Chart,
    alt: Chart,
    self_int: i64,
    /// Intersection points with other components.
    specials: Vec<(usize, Location)>,
}

/// Chart centred at a point, with the components through it as coordinate axes.
#[derive(Clone, Debug, PartialEq, Eq)]
struct PointChart {
    chart: Chart,
    /// Component `{a = 0}`.
    axis0: Option<usize>,
    /// Component `{b = 0}`.
    axis1: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Modification {
    components: Vec<Component>,
    corners: BTreeMap<(usize, usize), PointChart>,
    steps: Vec<Center>,
}

impl Default for Modification {
    fn default() -> Self {
        Self::new()
    }
}

impl Modification {
    /// The identity modification (nothing blown up yet).
    pub fn new() -> Self {
        Modification {
            components: Vec::new(),
            corners: BTreeMap::new(),
            steps: Vec::new(),
        }
    }

    pub fn from_script(script: &BlowupScript) -> Result<Modification> {
        let mut m = Modification::new();
        for c in &script.steps {
            m.blow_up(c)?;
        }
        Ok(m)
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn steps(&self) -> &[Center] {
        &self.steps
    }

    pub fn script(&self) -> BlowupScript {
        BlowupScript {
            steps: self.steps.clone(),
        }
    }

    pub fn host_chart(&self, i: usize) -> Result<&Chart> {
        self.components
            .get(i)
            .map(|c| &c.host)
            .ok_or_else(|| Error::CenterNotFound(format!("no component E{}", i + 1)))
    }

    /// Intersection points of `E_i` with other components.
    pub fn special_points(&self, i: usize) -> Vec<(usize, Location)> {
        self.components[i].specials.clone()
    }

    fn locate(&self, center: &Center) -> Result<PointChart> {
        match center {
            Center::Origin => {
                if !self.components.is_empty() {
                    return Err(Error::CenterNotFound("the origin has already been blown up".into()));
                }
                Ok(PointChart {
                    chart: Chart::identity(),
                    axis0: None,
                    axis1: None,
                })
            }
            Center::Free { on, param } => {
                let comp = self
                    .components
                    .get(*on)
                    .ok_or_else(|| Error::CenterNotFound(format!("no component E{}", on + 1)))?;
                if let Some((j, _)) = comp.specials.iter().find(|(_, l)| l == param) {
                    return Err(Error::CornerAmbiguous(format!(
                        "point {param} of E{} is its intersection with E{}",
                        on + 1,
                        j + 1
                    )));
                }
                let chart = match param {
                    Location::Finite(c) => comp.host.translate(c),
                    Location::Infinity => comp.alt.clone(),
                };
                Ok(PointChart {
                    chart,
                    axis0: Some(*on),
                    axis1: None,
                })
            }
            Center::Corner(i, j) => {
                let key = ((*i).min(*j), (*i).max(*j));
                self.corners.get(&key).cloned().ok_or_else(|| {
                    Error::CenterNotFound(format!("E{} and E{} do not meet", i + 1, j + 1))
                })
            }
        }
    }

    /// Blows up `center`; returns the index of the new component.
    pub fn blow_up(&mut self, center: &Center) -> Result<usize> {
        let pc = self.locate(center)?;
        let n = self.components.len();
        let step = self.steps.len() + 1;
        let host = pc.chart.chart_a(step);
        let alt = pc.chart.chart_b(step);
        let mut specials = Vec::new();
        if let Some(j) = pc.axis1 {
            specials.push((j, Location::Finite(Q::zero())));
        }
        if let Some(i) = pc.axis0 {
            specials.push((i, Location::Infinity));
        }
        match center {
            Center::Origin => {}
            Center::Free { on, param } => {
                self.components[*on].specials.push((n, param.clone()));
            }
            Center::Corner(_, _) => {
                let (i, j) = (pc.axis0.unwrap(), pc.axis1.unwrap());
                for (a, b) in [(i, j), (j, i)] {
                    for s in self.components[a].specials.iter_mut() {
                        if s.0 == b {
                            s.0 = n;
                        }
                    }
                }
                self.corners.remove(&(i.min(j), i.max(j)));
            }
        }
        for k in [pc.axis0, pc.axis1].into_iter().flatten() {
            self.components[k].self_int -= 1;
        }
        if let Some(j) = pc.axis1 {
            self.corners.insert(
                (j, n),
                PointChart {
                    chart: host.clone(),
                    axis0: Some(n),
                    axis1: Some(j),
                },
            );
        }
        if let Some(i) = pc.axis0 {
            self.corners.insert(
                (i, n),
                PointChart {
                    chart: alt.clone(),
                    axis0: Some(n),
                    axis1: Some(i),
                },
            );
        }
        self.components.push(Component {
            host,
            alt,
            self_int: -1,
            specials,
        });
        self.steps.push(center.clone());
        Ok(n)
    }

    /// Dual graph of the exceptional divisor (no arrows).
    pub fn graph(&self) -> Result<DualGraph> {
        if self.components.is_empty() {
            return Err(Error::InvalidInput("nothing has been blown up".into()));
        }
        DualGraph::new(
            self.components.iter().map(|c| c.self_int).collect(),
            self.corners.keys().copied().collect(),
            Vec::new(),
        )
    }

    /// Order of vanishing of `g` composed with the modification along `E_i`.
    pub fn multiplicity(&self, i: usize, g: &QPoly) -> Result<u64> {
        if g.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if g.nvars() != 2 {
            return Err(Error::InvalidInput("plane polynomials have two variables".into()));
        }
        let lifted = self.host_chart(i)?.pull_back(g);
        lifted
            .order_in(0)
            .map(u64::from)
            .ok_or_else(|| Error::InternalInconsistency("pull-back of a nonzero function vanished".into()))
    }

    /// `(w_1(g), ..., w_s(g))`.
    pub fn multiplicities(&self, g: &QPoly) -> Result<ExpVec> {
        (0..self.num_components())
            .map(|i| self.multiplicity(i, g).map(|w| w as i64))
            .collect::<Result<Vec<_>>>()
            .map(ExpVec)
    }

    /// Equation of the curvette `{b = c}` of `E_i` in its host chart, for a
    /// point `c` that is not an intersection point.
    ///
    /// The curvette is the image of `tau -> host(tau, c)`; its equation is the
    /// polynomial of least degree vanishing on that image, found as a kernel
    /// vector of the evaluation map on monomials.
    pub fn curvette(&self, i: usize, c: &Q) -> Result<QPoly> {
        let comp = self
            .components
            .get(i)
            .ok_or_else(|| Error::CenterNotFound(format!("no component E{}", i + 1)))?;
        if comp.specials.iter().any(|(_, l)| *l == Location::Finite(c.clone())) {
            return Err(Error::CornerAmbiguous(format!("{} is an intersection point", q_to_string(c))));
        }
        let param = [
            QPoly::var(1, 0),
            QPoly::constant(1, c.clone()),
        ];
        let x = comp.host.map[0].substitute(&param);
        let y = comp.host.map[1].substitute(&param);
        let to_u = |p: &QPoly| crate::rational::UPoly::from_terms(p.terms().map(|(e, c)| (e[0] as usize, c.clone())));
        let (xu, yu) = (to_u(&x), to_u(&y));
        for deg in 1..=DEFAULT_MAX_JET as u32 {
            let mons: Vec<(u32, u32)> = (0..=deg).flat_map(|d| (0..=d).map(move |a| (a, d - a))).collect();
            let cols: Vec<crate::rational::UPoly> = mons
                .iter()
                .map(|&(a, b)| {
                    let mut p = crate::rational::UPoly::one();
                    for _ in 0..a {
                        p = p.mul(&xu);
                    }
                    for _ in 0..b {
                        p = p.mul(&yu);
                    }
                    p
                })
                .collect();
            let len = cols.iter().filter_map(|p| p.degree()).max().unwrap_or(0) + 1;
            let rows: Vec<Vec<Q>> = (0..len).map(|k| cols.iter().map(|p| p.coeff(k)).collect()).collect();
            if let Some(v) = nullspace(&rows, mons.len()).into_iter().next() {
                let mut g = QPoly::zero(2);
                for (coef, &(a, b)) in v.into_iter().zip(&mons) {
                    g.add_term(vec![a, b], coef);
                }
                return Ok(g);
            }
        }
        Err(Error::PrecisionExhausted("curvette equation degree above the cap".into()))
    }
}

/// Ordered list of blow-up centers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupScript {
    pub steps: Vec<Center>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptDoc {
    pub steps: Vec<StepDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepDoc {
    pub center: CenterDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CenterDoc {
    Named(String),
    Free { on: usize, param: String },
    Corner { corner: [usize; 2] },
}

impl BlowupScript {
    pub fn to_doc(&self) -> ScriptDoc {
        ScriptDoc {
            steps: self
                .steps
                .iter()
                .map(|c| StepDoc {
                    center: match c {
                        Center::Origin => CenterDoc::Named("origin".into()),
                        Center::Free { on, param } => CenterDoc::Free {
                            on: on + 1,
                            param: param.to_string(),
                        },
                        Center::Corner(i, j) => CenterDoc::Corner {
                            corner: [i + 1, j + 1],
                        },
                    },
                })
                .collect(),
        }
    }

    pub fn from_doc(d: &ScriptDoc) -> Result<BlowupScript> {
        let idx = |k: usize| {
            k.checked_sub(1)
                .ok_or_else(|| Error::Schema("component indices are 1-based".into()))
        };
        let mut steps = Vec::new();
        for s in &d.steps {
            steps.push(match &s.center {
                CenterDoc::Named(n) if n == "origin" => Center::Origin,
                CenterDoc::Named(n) => return Err(Error::Schema(format!("unknown center {n:?}"))),
                CenterDoc::Free { on, param } => Center::Free {
                    on: idx(*on)?,
                    param: Location::parse(param)?,
                },
                CenterDoc::Corner { corner } => Center::Corner(idx(corner[0])?, idx(corner[1])?),
            });
        }
        Ok(BlowupScript { steps })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("script serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<BlowupScript> {
        Self::from_doc(&serde_json::from_str(s)?)
    }
}

/// Hilbert function of the divisorial filtration of a modification.
///
/// For each component `E_i` the conditions `w_i(g) >= w_i` say that the
/// coefficients of `u^j`, `j < w_i`, of `g` pulled back to the host chart
/// vanish; each coefficient is a polynomial in the second coordinate whose
/// coefficients are linear in those of `g`.
pub struct DivisorialOracle {
    m: Modification,
    max_jet: u64,
    /// `(w_i(x), w_i(y))`.
    axis_orders: Vec<(u32, u32)>,
    /// Lifts of monomials `x^a y^b` to host charts, reduced below `u^limit`.
    lifts: Mutex<HashMap<(usize, u32, u32), (u32, QPoly)>>,
    cache: Mutex<HashMap<ExpVec, u64>>,
}

impl DivisorialOracle {
    pub fn new(m: Modification) -> Result<Self> {
        Self::with_max_jet(m, DEFAULT_MAX_JET)
    }

    pub fn with_max_jet(m: Modification, max_jet: u64) -> Result<Self> {
        if m.num_components() == 0 {
            return Err(Error::InvalidInput("nothing has been blown up".into()));
        }
        let (x, y) = (QPoly::var(2, 0), QPoly::var(2, 1));
        let axis_orders = (0..m.num_components())
            .map(|i| Ok((m.multiplicity(i, &x)? as u32, m.multiplicity(i, &y)? as u32)))
            .collect::<Result<Vec<_>>>()?;
        Ok(DivisorialOracle {
            m,
            max_jet,
            axis_orders,
            lifts: Mutex::new(HashMap::new()),
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn modification(&self) -> &Modification {
        &self.m
    }

    fn live(&self, a: u32, b: u32, w: &[i64]) -> bool {
        self.axis_orders
            .iter()
            .zip(w)
            .any(|(&(ox, oy), &wi)| ((a * ox + b * oy) as i64) < wi)
    }

    fn monomials(&self, w: &[i64], n: u32) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for d in 0..=n {
            for a in 0..=d {
                if self.live(a, d - a, w) {
                    out.push((a, d - a));
                }
            }
        }
        out
    }

    fn lift(&self, i: usize, a: u32, b: u32, limit: u32) -> QPoly {
        if let Some((l, p)) = self.lifts.lock().unwrap().get(&(i, a, b)) {
            if *l >= limit {
                return p.truncate_in(0, limit);
            }
        }
        let chart = &self.m.components[i].host;
        let p = if a == 0 && b == 0 {
            QPoly::one(2).truncate_in(0, limit)
        } else if a > 0 {
            self.lift(i, a - 1, b, limit).mul_trunc_in(&chart.map[0], 0, limit)
        } else {
            self.lift(i, a, b - 1, limit).mul_trunc_in(&chart.map[1], 0, limit)
        };
        let mut lifts = self.lifts.lock().unwrap();
        let entry = lifts.entry((i, a, b)).or_insert((0, QPoly::zero(2)));
        if entry.0 < limit {
            *entry = (limit, p.clone());
        }
        p
    }

    fn rank_at(&self, w: &[i64], mons: &[(u32, u32)]) -> u64 {
        let mut cols: Vec<BTreeMap<(usize, u32, u32), Q>> = Vec::with_capacity(mons.len());
        let mut keys: BTreeSet<(usize, u32, u32)> = BTreeSet::new();
        for &(a, b) in mons {
            let mut col = BTreeMap::new();
            for (i, &wi) in w.iter().enumerate() {
                if wi <= 0 {
                    continue;
                }
                for (e, c) in self.lift(i, a, b, wi as u32).terms() {
                    keys.insert((i, e[0], e[1]));
                    col.insert((i, e[0], e[1]), c.clone());
                }
            }
            cols.push(col);
        }
        let index: HashMap<(usize, u32, u32), usize> = keys.iter().enumerate().map(|(k, key)| (*key, k)).collect();
        let mut acc = RankAccumulator::new();
        for col in cols {
            let mut v = vec![Q::zero(); keys.len()];
            for (key, c) in col {
                v[index[&key]] = c;
            }
            acc.insert(v);
        }
        acc.rank() as u64
    }

    fn compute(&self, w: &ExpVec) -> Result<u64> {
        if w.is_zero() {
            return Ok(0);
        }
        let wmax = *w.as_slice().iter().max().unwrap() as u64;
        let saturation = self
            .monomials(w.as_slice(), wmax as u32)
            .iter()
            .map(|(a, b)| (a + b) as u64)
            .max()
            .unwrap_or(0);
        let mut memo: HashMap<u64, u64> = HashMap::new();
        let mut reading = |n: u64| -> u64 {
            let eff = n.min(saturation);
            *memo.entry(eff).or_insert_with(|| {
                let mons = self.monomials(w.as_slice(), eff as u32);
                self.rank_at(w.as_slice(), &mons)
            })
        };
        let mut n = wmax.max(1).min(self.max_jet);
        let mut history = vec![reading(n)];
        loop {
            let k = history.len();
            if k >= 3 && history[k - 1] == history[k - 2] && history[k - 2] == history[k - 3] {
                return Ok(history[k - 1]);
            }
            let next = (2 * n).min(self.max_jet);
            if next == n {
                return Err(Error::PrecisionExhausted(format!(
                    "divisorial rank for w = {w} not stable below jet order {}",
                    self.max_jet
                )));
            }
            n = next;
            history.push(reading(n));
        }
    }
}

impl HilbertFunction for DivisorialOracle {
    fn nvars(&self) -> usize {
        self.m.num_components()
    }

    fn h(&self, w: &ExpVec) -> Result<u64> {
        if w.len() != self.nvars() {
            return Err(Error::InvalidInput(format!(
                "expected {} components, got {}",
                self.nvars(),
                w.len()
            )));
        }
        let w = w.clamp_nonneg();
        if let Some(&h) = self.cache.lock().unwrap().get(&w) {
            return Ok(h);
        }
        let h = self.compute(&w)?;
        self.cache.lock().unwrap().insert(w, h);
        Ok(h)
    }
}

/// Where a strict transform currently passes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointKey {
    Origin,
    Free(usize, Location),
    Corner(usize, usize),
}

impl PointKey {
    fn center(&self) -> Center {
        match self {
            PointKey::Origin => Center::Origin,
            PointKey::Free(i, l) => Center::Free {
                on: *i,
                param: l.clone(),
            },
            PointKey::Corner(i, j) => Center::Corner(*i, *j),
        }
    }
}

#[derive(Clone, Debug)]
struct BranchState {
    at: PointKey,
    /// Branch in the coordinates `(a, b)` of the chart centred at `at`.
    local: [RatFn; 2],
}

fn order(f: &RatFn) -> usize {
    f.order().unwrap_or(usize::MAX)
}

impl BranchState {
    fn needs_blowup(&self) -> bool {
        match &self.at {
            PointKey::Origin | PointKey::Corner(..) => true,
            // the component is {a = 0}; smooth and transverse iff ord a = 1
            PointKey::Free(..) => order(&self.local[0]) > 1,
        }
    }

    /// Moves the branch to the new component `n`.
    fn lift(&mut self, m: &Modification, n: usize) -> Result<()> {
        let [a, b] = &self.local;
        let (p, q, loc) = if order(a) <= order(b) {
            let q = b.div(a)?;
            let c = if order(a) == order(b) {
                b.leading().unwrap() / a.leading().unwrap()
            } else {
                Q::zero()
            };
            (a.clone(), q, Location::Finite(c))
        } else {
            (b.clone(), a.div(b)?, Location::Infinity)
        };
        let corner = m.components[n].specials.iter().find(|(_, l)| *l == loc).map(|(j, _)| *j);
        match (corner, &loc) {
            (Some(j), _) => {
                self.at = PointKey::Corner(j.min(n), j.max(n));
                self.local = [p, q];
            }
            (None, Location::Finite(c)) => {
                self.at = PointKey::Free(n, loc.clone());
                self.local = [p, q.sub_const(c)];
            }
            (None, Location::Infinity) => {
                self.at = PointKey::Free(n, Location::Infinity);
                self.local = [p, q];
            }
        }
        Ok(())
    }
}

/// Embedded resolution of a plane curve.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub modification: Modification,
    /// Resolution graph with one arrow per branch.
    pub graph: DualGraph,
    /// `i(k)`: component met by the strict transform of branch `k`.
    pub attach: Vec<usize>,
    pub points: Vec<PointKey>,
}

impl Resolution {
    /// Blows up one more point away from the strict transforms; the result is
    /// again an embedded resolution.
    pub fn with_extra_blowup(&self, center: &Center) -> Result<Resolution> {
        if let Center::Free { on, param } = center {
            if self.points.contains(&PointKey::Free(*on, param.clone())) {
                return Err(Error::InvalidInput("center lies on a strict transform".into()));
            }
        }
        let mut m = self.modification.clone();
        m.blow_up(center)?;
        let graph = m.graph()?.with_arrows(self.attach.clone())?;
        Ok(Resolution {
            modification: m,
            graph,
            attach: self.attach.clone(),
            points: self.points.clone(),
        })
    }
}

/// Upper bound on the number of blow-ups in [`auto_resolve`].
pub const MAX_RESOLUTION_STEPS: usize = 200;

/// Blows up points until the total transform of the curve is a normal
/// crossings divisor.
///
/// At each round the smallest point (in a fixed order on points, so the
/// result does not depend on the order of the branches) carrying a strict
/// transform that is singular, tangent to the exceptional divisor, through
/// an intersection point of two components, or shared with another branch,
/// is blown up. All centers are rational.
pub fn auto_resolve(c: &Curve) -> Result<Resolution> {
    auto_resolve_with_limit(c, MAX_RESOLUTION_STEPS)
}

pub fn auto_resolve_with_limit(c: &Curve, max_steps: usize) -> Result<Resolution> {
    if c.ambient_dim() != 2 {
        return Err(Error::InvalidInput("embedded resolution needs a plane curve".into()));
    }
    let mut m = Modification::new();
    let mut states: Vec<BranchState> = c
        .branches()
        .iter()
        .map(|b| BranchState {
            at: PointKey::Origin,
            local: [
                RatFn::from_poly(b.coords()[0].clone()),
                RatFn::from_poly(b.coords()[1].clone()),
            ],
        })
        .collect();
    loop {
        let mut count: BTreeMap<&PointKey, usize> = BTreeMap::new();
        for s in &states {
            *count.entry(&s.at).or_default() += 1;
        }
        let target = states
            .iter()
            .filter(|s| s.needs_blowup() || count[&s.at] > 1)
            .map(|s| s.at.clone())
            .min();
        let Some(target) = target else { break };
        if m.steps().len() >= max_steps {
            return Err(if count[&target] > 1 {
                Error::NonreducedInput(format!(
                    "branches still share a point after {max_steps} blow-ups"
                ))
            } else {
                Error::PrecisionExhausted(format!("no resolution within {max_steps} blow-ups"))
            });
        }
        let n = m.blow_up(&target.center())?;
        for s in states.iter_mut().filter(|s| s.at == target) {
            s.lift(&m, n)?;
        }
    }
    let attach: Vec<usize> = states
        .iter()
        .map(|s| match &s.at {
            PointKey::Free(i, _) => *i,
            _ => unreachable!("resolved branches sit at free points"),
        })
        .collect();
    let graph = m.graph()?.with_arrows(attach.clone())?;
    Ok(Resolution {
        modification: m,
        graph,
        attach,
        points: states.into_iter().map(|s| s.at).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Branch;
    use crate::graph::{build_intersection, hoskin_deligne, w_of_nhat};
    use crate::rational::q_int;

    pub(crate) fn cusp_script() -> BlowupScript {
        BlowupScript {
            steps: vec![
                Center::Origin,
                Center::Free {
                    on: 0,
                    param: Location::Finite(q_int(0)),
                },
                Center::Corner(0, 1),
            ],
        }
    }

    fn poly(s: &str) -> QPoly {
        QPoly::parse(s, 2).unwrap()
    }

    #[test]
    fn script_graphs() {
        let mut m = Modification::new();
        m.blow_up(&Center::Origin).unwrap();
        assert_eq!(m.graph().unwrap().self_ints(), &[-1]);
        m.blow_up(&Center::Free { on: 0, param: Location::Finite(q_int(0)) }).unwrap();
        let g = m.graph().unwrap();
        assert_eq!(g.self_ints(), &[-2, -1]);
        assert_eq!(g.edges(), &[(0, 1)]);
        m.blow_up(&Center::Corner(0, 1)).unwrap();
        let g = m.graph().unwrap();
        assert_eq!(g.self_ints(), &[-3, -2, -1]);
        assert_eq!(g.edges(), &[(0, 2), (1, 2)]);
        assert!(matches!(m.blow_up(&Center::Origin), Err(Error::CenterNotFound(_))));
        assert!(matches!(m.blow_up(&Center::Corner(0, 1)), Err(Error::CenterNotFound(_))));
        assert!(matches!(
            m.blow_up(&Center::Free { on: 2, param: Location::Finite(q_int(0)) }),
            Err(Error::CornerAmbiguous(_))
        ));
    }

    #[test]
    fn cusp_multiplicities() {
        let m = Modification::from_script(&cusp_script()).unwrap();
        assert_eq!(m.multiplicities(&poly("y^2 - x^3")).unwrap(), ExpVec(vec![2, 3, 6]));
        assert_eq!(m.multiplicities(&poly("x")).unwrap(), ExpVec(vec![1, 1, 2]));
        assert!(matches!(m.multiplicity(0, &QPoly::zero(2)), Err(Error::ZeroPolynomial)));
    }

    #[test]
    fn curvettes_give_rows_of_m() {
        let m = Modification::from_script(&cusp_script()).unwrap();
        let d = build_intersection(&m.graph().unwrap()).unwrap();
        for i in 0..3 {
            let g = m.curvette(i, &q_int(5)).unwrap();
            assert_eq!(m.multiplicities(&g).unwrap(), d.row(i), "E{}", i + 1);
        }
    }

    #[test]
    fn divisorial_hilbert_examples() {
        let mut single = Modification::new();
        single.blow_up(&Center::Origin).unwrap();
        let o = DivisorialOracle::new(single).unwrap();
        for n in 0..6i64 {
            assert_eq!(o.h(&ExpVec(vec![n])).unwrap(), (n * (n + 1) / 2) as u64);
        }
        let m = Modification::from_script(&cusp_script()).unwrap();
        let g = m.graph().unwrap();
        let d = build_intersection(&g).unwrap();
        let o = DivisorialOracle::new(m).unwrap();
        assert_eq!(o.h(&ExpVec(vec![0, 0, 0])).unwrap(), 0);
        let w = w_of_nhat(&d, &[0, 0, 1]);
        assert_eq!(o.h(&w).unwrap(), hoskin_deligne(&d, &g, &[0, 0, 1]).unwrap());
    }

    #[test]
    fn resolve_examples() {
        let smooth = Curve::new(vec![Branch::monomial(&[1, 0])]).unwrap();
        let r = auto_resolve(&smooth).unwrap();
        assert_eq!(r.graph.self_ints(), &[-1]);
        assert_eq!(r.attach, vec![0]);

        let cusp = Curve::new(vec![Branch::monomial(&[2, 3])]).unwrap();
        let r = auto_resolve(&cusp).unwrap();
        assert_eq!(r.graph.self_ints(), &[-3, -2, -1]);
        assert_eq!(r.graph.edges(), &[(0, 2), (1, 2)]);
        assert_eq!(r.attach, vec![2]);

        let lines = Curve::new(vec![Branch::monomial(&[1, 0]), Branch::monomial(&[0, 1])]).unwrap();
        let r = auto_resolve(&lines).unwrap();
        assert_eq!(r.graph.self_ints(), &[-1]);
        assert_eq!(r.attach, vec![0, 0]);
    }

    #[test]
    fn tangent_smooth_branches() {
        // y = x^2 and y = 0 are tangent: two blow-ups separate them.
        let c = Curve::new(vec![Branch::monomial(&[1, 0]), Branch::monomial(&[1, 2])]).unwrap();
        let r = auto_resolve(&c).unwrap();
        assert_eq!(r.graph.self_ints(), &[-2, -1]);
        assert_eq!(r.attach, vec![1, 1]);
        let rev = Curve::new(vec![Branch::monomial(&[1, 2]), Branch::monomial(&[1, 0])]).unwrap();
        let r2 = auto_resolve(&rev).unwrap();
        assert_eq!(r2.graph.without_arrows(), r.graph.without_arrows());
    }

    #[test]
    fn script_json() {
        let s = cusp_script();
        let js = s.to_json();
        assert_eq!(js, r#"{"steps":[{"center":"origin"},{"center":{"on":1,"param":"0"}},{"center":{"corner":[1,2]}}]}"#);
        assert_eq!(BlowupScript::from_json(&js).unwrap(), s);
        assert!(BlowupScript::from_json(r#"{"steps":[{"center":"nowhere"}]}"#).is_err());
    }

    #[test]
    fn valuation_is_additive() {
        let m = Modification::from_script(&cusp_script()).unwrap();
        let polys = ["x + y", "y^2 - x^3", "x*y - 2*y^3", "3*x^2 + y"];
        for a in polys {
            for b in polys {
                let (f, g) = (poly(a), poly(b));
                let lhs = m.multiplicities(&f.mul(&g)).unwrap();
                let rhs = m.multiplicities(&f).unwrap().add(&m.multiplicities(&g).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }
}
