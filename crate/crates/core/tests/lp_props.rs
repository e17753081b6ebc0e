mod common;

use common::props::{lp_instance, lp_matches_vertex_enumeration};
use locsim::lp::{constraint_nonredundant, Polyhedron};
use proptest::prelude::*;

#[test]
fn simplex_matches_vertex_enumeration() {
    lp_matches_vertex_enumeration(400).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn redundancy_invariant_under_row_scaling((_c, p) in lp_instance(), scale in 0.1f64..10.0) {
        let n = p.dim();
        let bx = Polyhedron::axis_box(&vec![-5.0; n], &vec![5.0; n]).unwrap();
        for i in 0..p.len() {
            let mut q = Polyhedron::new(n);
            for j in 0..p.len() {
                let f = if j == i { scale } else { 1.0 };
                q.push(p.row(j).iter().map(|v| v * f).collect(), p.rhs(j) * f, false).unwrap();
            }
            prop_assert_eq!(
                constraint_nonredundant(&p, i, &bx).unwrap(),
                constraint_nonredundant(&q, i, &bx).unwrap()
            );
        }
    }
}
