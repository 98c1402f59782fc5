//! Exact rational linear algebra.

use num_traits::{One, Zero};

use crate::rational::Q;

fn bits(c: &Q) -> u64 {
    c.numer().bits() + c.denom().bits()
}

/// Index of the nonzero entry of smallest bit-length among `candidates`.
fn cheapest<'a>(candidates: impl Iterator<Item = (usize, &'a Q)>) -> Option<usize> {
    candidates
        .filter(|(_, c)| !c.is_zero())
        .min_by_key(|(_, c)| bits(c))
        .map(|(i, _)| i)
}

/// Determinant and inverse by Gauss-Jordan elimination; `None` inverse when singular.
pub fn det_and_inverse(a: &[Vec<Q>]) -> (Q, Option<Vec<Vec<Q>>>) {
    let n = a.len();
    let mut m: Vec<Vec<Q>> = a.to_vec();
    let mut inv: Vec<Vec<Q>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect();
    let mut det = Q::one();
    for col in 0..n {
        let Some(p) = cheapest((col..n).map(|r| (r, &m[r][col]))) else {
            return (Q::zero(), None);
        };
        if p != col {
            m.swap(p, col);
            inv.swap(p, col);
            det = -det;
        }
        let piv = m[col][col].clone();
        det *= &piv;
        let pinv = Q::one() / &piv;
        for j in 0..n {
            m[col][j] *= &pinv;
            inv[col][j] *= &pinv;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for j in 0..n {
                let (mc, ic) = (m[col][j].clone(), inv[col][j].clone());
                m[r][j] -= &f * mc;
                inv[r][j] -= &f * ic;
            }
        }
    }
    (det, Some(inv))
}

/// Incremental echelon basis; yields the rank of the span of inserted vectors.
///
/// Rows are kept in insertion order, each with its pivot normalized to 1 and
/// zero at the pivots of all earlier rows, so a single forward sweep reduces
/// a new vector.
#[derive(Clone, Debug, Default)]
pub struct RankAccumulator {
    rows: Vec<(usize, Vec<Q>)>,
}

impl RankAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds `v`; returns true if it was independent of the previous vectors.
    pub fn insert(&mut self, mut v: Vec<Q>) -> bool {
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
        }
        let Some(p) = cheapest(v.iter().enumerate()) else {
            return false;
        };
        let inv = Q::one() / &v[p];
        for x in v.iter_mut() {
            *x *= &inv;
        }
        self.rows.push((p, v));
        true
    }
}

/// Rank of a list of vectors of equal length.
pub fn rank(vectors: impl IntoIterator<Item = Vec<Q>>) -> usize {
    let mut acc = RankAccumulator::new();
    for v in vectors {
        acc.insert(v);
    }
    acc.rank()
}

/// Basis of `{ x : A x = 0 }` for a matrix given by rows with `ncols` columns.
pub fn nullspace(rows: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = cheapest((r..m.len()).map(|i| (i, &m[i][col]))) else {
            continue;
        };
        m.swap(r, p);
        let inv = Q::one() / &m[r][col];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                let pr = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); ncols];
        v[free] = Q::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[row][free].clone();
        }
        out.push(v);
    }
    out
}
