use motive_series::blowup::{auto_resolve, Modification};
use motive_series::curve::{Branch, Curve, HilbertOracle};
use motive_series::filtration::HilbertFunction;
use motive_series::fixtures;
use motive_series::rational::{q_int, QPoly};
use motive_series::ExpVec;
use proptest::prelude::*;

fn plane_poly() -> impl Strategy<Value = QPoly> {
    prop::collection::vec((0u32..4, 0u32..4, -3i64..4), 1..5).prop_filter_map("nonzero", |terms| {
        let mut p = QPoly::zero(2);
        for (a, b, c) in terms {
            p.add_term(vec![a, b], q_int(c));
        }
        (!p.is_zero()).then_some(p)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn divisorial_valuations_are_additive(f in plane_poly(), g in plane_poly()) {
        let m = Modification::from_script(&fixtures::cusp_script()).unwrap();
        let lhs = m.multiplicities(&f.mul(&g)).unwrap();
        let rhs = m.multiplicities(&f).unwrap().add(&m.multiplicities(&g).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn hilbert_function_steps(a in 0i64..6, b in 0i64..6) {
        let o = HilbertOracle::new(fixtures::curve_c());
        let h = o.h(&ExpVec(vec![a, b])).unwrap();
        for d in [[1, 0], [0, 1]] {
            let up = o.h(&ExpVec(vec![a + d[0], b + d[1]])).unwrap();
            prop_assert!(up == h || up == h + 1);
        }
        prop_assert_eq!(o.h(&ExpVec(vec![a - 7, b])).unwrap(), o.h(&ExpVec(vec![0, b])).unwrap());
    }
}

#[test]
fn resolution_ignores_branch_order() {
    let branches = [
        Branch::monomial(&[2, 3]),
        Branch::monomial(&[1, 0]),
        Branch::monomial(&[0, 1]),
    ];
    let a = auto_resolve(&Curve::new(branches.to_vec()).unwrap()).unwrap();
    let rev: Vec<Branch> = branches.iter().rev().cloned().collect();
    let b = auto_resolve(&Curve::new(rev).unwrap()).unwrap();
    assert_eq!(a.graph.without_arrows(), b.graph.without_arrows());
    let mut x = a.attach.clone();
    let mut y = b.attach.clone();
    x.sort();
    y.sort();
    assert_eq!(x, y);
}
