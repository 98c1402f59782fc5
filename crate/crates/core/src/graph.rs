//! Dual graphs of modifications of the plane and their intersection data.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::ExpVec;
use crate::linalg::det_and_inverse;
use crate::rational::{q_int, Q};

/// Components `E_1..E_s` (0-based here), the intersection points between
/// them and the arrows of strict transforms attached to them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualGraph {
    self_int: Vec<i64>,
    edges: Vec<(usize, usize)>,
    arrows: Vec<usize>,
}

impl DualGraph {
    /// Validates that the data form a tree with negative self-intersections.
    pub fn new(self_int: Vec<i64>, edges: Vec<(usize, usize)>, arrows: Vec<usize>) -> Result<Self> {
        let s = self_int.len();
        if s == 0 {
            return Err(Error::InvalidInput("graph has no vertices".into()));
        }
        if let Some(e) = self_int.iter().find(|&&e| e >= 0) {
            return Err(Error::InvalidInput(format!("self-intersection {e} is not negative")));
        }
        let mut norm: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for (i, j) in edges {
            if i >= s || j >= s {
                return Err(Error::InvalidInput(format!("edge ({},{}) out of range", i + 1, j + 1)));
            }
            if i == j {
                return Err(Error::InvalidInput(format!("loop at vertex {}", i + 1)));
            }
            norm.push((i.min(j), i.max(j)));
        }
        norm.sort_unstable();
        if norm.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("repeated edge".into()));
        }
        if norm.len() != s - 1 {
            return Err(Error::InvalidInput(format!(
                "{} vertices and {} edges cannot form a tree",
                s,
                norm.len()
            )));
        }
        // union-find for connectivity
        let mut parent: Vec<usize> = (0..s).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(i, j) in &norm {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a == b {
                return Err(Error::InvalidInput("graph contains a cycle".into()));
            }
            parent[a] = b;
        }
        if let Some(&k) = arrows.iter().find(|&&k| k >= s) {
            return Err(Error::InvalidInput(format!("arrow attached to missing vertex {}", k + 1)));
        }
        Ok(DualGraph {
            self_int,
            edges: norm,
            arrows,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.self_int.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn self_int(&self, i: usize) -> i64 {
        self.self_int[i]
    }

    pub fn self_ints(&self) -> &[i64] {
        &self.self_int
    }

    /// The edge set `I_0` as pairs `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `i(k)` for each arrow `k`.
    pub fn arrows(&self) -> &[usize] {
        &self.arrows
    }

    pub fn degree(&self, i: usize) -> usize {
        self.edges.iter().filter(|(a, b)| *a == i || *b == i).count()
    }

    pub fn arrows_at(&self, i: usize) -> usize {
        self.arrows.iter().filter(|&&k| k == i).count()
    }

    /// Euler characteristic of `E_i` minus all other components and strict transforms.
    pub fn chi_open(&self, i: usize) -> i64 {
        2 - self.degree(i) as i64 - self.arrows_at(i) as i64
    }

    /// Euler characteristic of `E_i` minus the other exceptional components.
    pub fn chi_bullet(&self, i: usize) -> i64 {
        2 - self.degree(i) as i64
    }

    pub fn with_arrows(&self, arrows: Vec<usize>) -> Result<DualGraph> {
        DualGraph::new(self.self_int.clone(), self.edges.clone(), arrows)
    }

    pub fn without_arrows(&self) -> DualGraph {
        DualGraph {
            arrows: Vec::new(),
            ..self.clone()
        }
    }

    pub fn to_doc(&self) -> GraphDoc {
        GraphDoc {
            vertices: self.self_int.iter().map(|&e| VertexDoc { self_int: e }).collect(),
            edges: self.edges.iter().map(|&(i, j)| [i + 1, j + 1]).collect(),
            arrows: self.arrows.iter().map(|&k| ArrowDoc { attach: k + 1 }).collect(),
        }
    }

    pub fn from_doc(d: &GraphDoc) -> Result<DualGraph> {
        let idx = |k: usize| {
            k.checked_sub(1)
                .ok_or_else(|| Error::Schema("vertex indices are 1-based".into()))
        };
        let edges = d
            .edges
            .iter()
            .map(|[i, j]| Ok((idx(*i)?, idx(*j)?)))
            .collect::<Result<Vec<_>>>()?;
        let arrows = d.arrows.iter().map(|a| idx(a.attach)).collect::<Result<Vec<_>>>()?;
        DualGraph::new(d.vertices.iter().map(|v| v.self_int).collect(), edges, arrows)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("graph serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<DualGraph> {
        Self::from_doc(&serde_json::from_str(s)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub vertices: Vec<VertexDoc>,
    #[serde(default)]
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub arrows: Vec<ArrowDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexDoc {
    pub self_int: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowDoc {
    pub attach: usize,
}

/// Intersection matrix `A` and `M = -A^-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionData {
    a: Vec<Vec<i64>>,
    m: Vec<Vec<i64>>,
}

impl IntersectionData {
    pub fn a(&self) -> &[Vec<i64>] {
        &self.a
    }

    pub fn m(&self) -> &[Vec<i64>] {
        &self.m
    }

    pub fn size(&self) -> usize {
        self.m.len()
    }

    pub fn m_ij(&self, i: usize, j: usize) -> i64 {
        self.m[i][j]
    }

    /// Row `m_i`, which is the vector of divisorial multiplicities of a curvette at `E_i`.
    pub fn row(&self, i: usize) -> ExpVec {
        ExpVec(self.m[i].clone())
    }
}

pub fn build_intersection(g: &DualGraph) -> Result<IntersectionData> {
    let s = g.num_vertices();
    let mut a = vec![vec![0i64; s]; s];
    for i in 0..s {
        a[i][i] = g.self_int(i);
    }
    for &(i, j) in g.edges() {
        a[i][j] = 1;
        a[j][i] = 1;
    }
    let aq: Vec<Vec<Q>> = a.iter().map(|r| r.iter().map(|&x| q_int(x)).collect()).collect();
    let (det, inv) = det_and_inverse(&aq);
    if !det.abs().is_one() {
        return Err(Error::NotUnimodular(format!("det A = {det}")));
    }
    let inv = inv.expect("unimodular matrix is invertible");
    let mut m = vec![vec![0i64; s]; s];
    for i in 0..s {
        for j in 0..s {
            let v = -inv[i][j].clone();
            if !v.is_integer() || !v.is_positive() {
                return Err(Error::NotABlowupGraph(format!(
                    "entry m_{},{} = {v} is not a positive integer",
                    i + 1,
                    j + 1
                )));
            }
            m[i][j] = i64::try_from(v.to_integer()).map_err(|_| {
                Error::NotABlowupGraph("entry of M does not fit in 64 bits".into())
            })?;
        }
    }
    for i in 0..s {
        for j in 0..i {
            if m[i][j] != m[j][i] {
                return Err(Error::InternalInconsistency("M is not symmetric".into()));
            }
        }
    }
    Ok(IntersectionData { a, m })
}

fn check_len(d: &IntersectionData, nhat: &[u64]) -> Result<()> {
    if nhat.len() != d.size() {
        return Err(Error::InvalidInput(format!(
            "expected {} multiplicities, got {}",
            d.size(),
            nhat.len()
        )));
    }
    Ok(())
}

/// `sum_ij m_ij nhat_i nhat_j`.
pub(crate) fn quadratic(d: &IntersectionData, nhat: &[u64]) -> i128 {
    let s = d.size();
    let mut acc = 0i128;
    for i in 0..s {
        if nhat[i] == 0 {
            continue;
        }
        for j in 0..s {
            acc += d.m[i][j] as i128 * nhat[i] as i128 * nhat[j] as i128;
        }
    }
    acc
}

pub(crate) fn half(x: i128, what: &str) -> Result<u64> {
    if x % 2 != 0 || x < 0 {
        return Err(Error::InternalInconsistency(format!("{what}: {x}/2 is not a nonnegative integer")));
    }
    u64::try_from(x / 2).map_err(|_| Error::InternalInconsistency(format!("{what} overflows")))
}

/// Codimension of `J^D(w(nhat))` from the intersection form and the canonical class.
pub fn hoskin_deligne(d: &IntersectionData, g: &DualGraph, nhat: &[u64]) -> Result<u64> {
    check_len(d, nhat)?;
    let s = d.size();
    let mut lin = 0i128;
    for i in 0..s {
        let row: i128 = (0..s).map(|j| d.m[i][j] as i128 * (2 + g.self_int(j)) as i128).sum();
        lin += nhat[i] as i128 * row;
    }
    half(quadratic(d, nhat) + lin, "codimension sum")
}

/// `w(nhat) = sum_i nhat_i m_i`.
pub fn w_of_nhat(d: &IntersectionData, nhat: &[u64]) -> ExpVec {
    let s = d.size();
    ExpVec(
        (0..s)
            .map(|j| (0..s).map(|i| nhat[i] as i64 * d.m[i][j]).sum())
            .collect(),
    )
}

pub fn determinant(d: &IntersectionData) -> i64 {
    let aq: Vec<Vec<Q>> = d.a.iter().map(|r| r.iter().map(|&x| q_int(x)).collect()).collect();
    let det = det_and_inverse(&aq).0;
    if det.is_zero() {
        0
    } else {
        i64::try_from(det.to_integer()).unwrap_or(i64::MAX)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cusp() -> DualGraph {
        DualGraph::new(vec![-3, -2, -1], vec![(0, 2), (1, 2)], vec![2]).unwrap()
    }

    #[test]
    fn intersection_examples() {
        let single = DualGraph::new(vec![-1], vec![], vec![]).unwrap();
        let d = build_intersection(&single).unwrap();
        assert_eq!(d.m(), &[vec![1]]);
        let chain = DualGraph::new(vec![-2, -1], vec![(0, 1)], vec![]).unwrap();
        let d = build_intersection(&chain).unwrap();
        assert_eq!(d.a(), &[vec![-2, 1], vec![1, -1]]);
        assert_eq!(d.m(), &[vec![1, 1], vec![1, 2]]);
        let d = build_intersection(&cusp()).unwrap();
        assert_eq!(d.m(), &[vec![1, 1, 2], vec![1, 2, 3], vec![2, 3, 6]]);
    }

    #[test]
    fn rejects_bad_graphs() {
        assert!(DualGraph::new(vec![-1, -1], vec![], vec![]).is_err());
        assert!(DualGraph::new(vec![-1, -1, -1], vec![(0, 1), (1, 2), (0, 2)], vec![]).is_err());
        assert!(DualGraph::new(vec![0], vec![], vec![]).is_err());
        let g = DualGraph::new(vec![-2], vec![], vec![]).unwrap();
        assert!(matches!(build_intersection(&g), Err(Error::NotUnimodular(_))));
        // unimodular but M has negative entries
        let g = DualGraph::new(vec![-1, -1], vec![(0, 1)], vec![]).unwrap();
        assert!(build_intersection(&g).is_err());
    }

    #[test]
    fn euler_characteristics() {
        let g = cusp();
        assert_eq!(g.chi_open(2), -1);
        assert_eq!(g.chi_bullet(2), 0);
        assert_eq!(g.chi_bullet(0), 1);
        let single = DualGraph::new(vec![-1], vec![], vec![]).unwrap();
        assert_eq!(single.chi_open(0), 2);
        assert_eq!(single.with_arrows(vec![0, 0]).unwrap().chi_open(0), 0);
    }

    #[test]
    fn hoskin_deligne_examples() {
        let single = DualGraph::new(vec![-1], vec![], vec![]).unwrap();
        let d = build_intersection(&single).unwrap();
        assert_eq!(hoskin_deligne(&d, &single, &[0]).unwrap(), 0);
        for n in 0..8u64 {
            assert_eq!(hoskin_deligne(&d, &single, &[n]).unwrap(), n * (n + 1) / 2);
        }
        let chain = DualGraph::new(vec![-2, -1], vec![(0, 1)], vec![]).unwrap();
        let d = build_intersection(&chain).unwrap();
        assert_eq!(w_of_nhat(&d, &[0, 1]), ExpVec(vec![1, 2]));
        assert_eq!(hoskin_deligne(&d, &chain, &[0, 1]).unwrap(), 2);
        let d = build_intersection(&cusp()).unwrap();
        assert_eq!(w_of_nhat(&d, &[0, 0, 1]), ExpVec(vec![2, 3, 6]));
        assert_eq!(w_of_nhat(&d, &[0, 0, 0]), ExpVec(vec![0, 0, 0]));
    }

    #[test]
    fn json_is_one_based() {
        let g = cusp();
        let js = g.to_json();
        assert_eq!(
            js,
            r#"{"vertices":[{"self_int":-3},{"self_int":-2},{"self_int":-1}],"edges":[[1,3],[2,3]],"arrows":[{"attach":3}]}"#
        );
        assert_eq!(DualGraph::from_json(&js).unwrap(), g);
        assert!(DualGraph::from_json(r#"{"vertices":[{"self_int":-1}],"arrows":[{"attach":0}]}"#).is_err());
    }
}
