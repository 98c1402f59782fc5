//! Standard curves, graphs and blow-up scripts used by the checks and tests.

use crate::blowup::{BlowupScript, Center, Location};
use crate::curve::{Branch, Curve};
use crate::graph::DualGraph;
use crate::rational::q_int;

/// Smooth plane branch `(t, 0)`.
pub fn smooth_branch() -> Curve {
    Curve::new(vec![Branch::monomial(&[1, 0])]).expect("valid fixture")
}

/// `{xy = 0}` as `(t, 0)`, `(0, u)`.
pub fn transverse_lines() -> Curve {
    Curve::new(vec![Branch::monomial(&[1, 0]), Branch::monomial(&[0, 1])]).expect("valid fixture")
}

/// `(t^2, t^3)`.
pub fn cusp() -> Curve {
    Curve::new(vec![Branch::monomial(&[2, 3])]).expect("valid fixture")
}

/// Two-branch curve in five-space with `P = 1 + t1^3 t2^3` and `h(3,3) = 3`.
pub fn curve_c() -> Curve {
    Curve::new(vec![
        Branch::monomial(&[2, 3, 2, 4, 5]),
        Branch::monomial(&[2, 3, 4, 2, 6]),
    ])
    .expect("valid fixture")
}

/// Two-branch curve in six-space with the same `P` as [`curve_c`] but `h(3,3) = 1`.
pub fn curve_c_prime() -> Curve {
    Curve::new(vec![
        Branch::monomial(&[3, 4, 5, 4, 5, 6]),
        Branch::monomial(&[3, 4, 5, 5, 6, 7]),
    ])
    .expect("valid fixture")
}

/// All curve fixtures by name.
pub fn curves() -> Vec<(&'static str, Curve)> {
    vec![
        ("smooth", smooth_branch()),
        ("lines", transverse_lines()),
        ("cusp", cusp()),
        ("C", curve_c()),
        ("C'", curve_c_prime()),
    ]
}

pub fn single_script() -> BlowupScript {
    BlowupScript {
        steps: vec![Center::Origin],
    }
}

pub fn chain_script() -> BlowupScript {
    BlowupScript {
        steps: vec![
            Center::Origin,
            Center::Free {
                on: 0,
                param: Location::Finite(q_int(0)),
            },
        ],
    }
}

pub fn cusp_script() -> BlowupScript {
    let mut s = chain_script();
    s.steps.push(Center::Corner(0, 1));
    s
}

pub fn scripts() -> Vec<(&'static str, BlowupScript)> {
    vec![
        ("single", single_script()),
        ("chain", chain_script()),
        ("cusp", cusp_script()),
    ]
}

/// `(-1)`.
pub fn single_graph() -> DualGraph {
    DualGraph::new(vec![-1], vec![], vec![]).expect("valid fixture")
}

/// `(-2) - (-1)`.
pub fn chain_graph() -> DualGraph {
    DualGraph::new(vec![-2, -1], vec![(0, 1)], vec![]).expect("valid fixture")
}

/// Minimal resolution graph of the cusp, without the arrow.
pub fn cusp_graph() -> DualGraph {
    DualGraph::new(vec![-3, -2, -1], vec![(0, 2), (1, 2)], vec![]).expect("valid fixture")
}

pub fn graphs() -> Vec<(&'static str, DualGraph)> {
    vec![
        ("single", single_graph()),
        ("chain", chain_graph()),
        ("cusp", cusp_graph()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blowup::Modification;

    #[test]
    fn scripts_build_the_fixture_graphs() {
        for ((n, s), (_, g)) in scripts().into_iter().zip(graphs()) {
            assert_eq!(Modification::from_script(&s).unwrap().graph().unwrap(), g, "{n}");
        }
    }
}
