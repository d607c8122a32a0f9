mod common;

use kl_sheaves::bmsheaf::{build_bm, check_bm_axioms, structure_algebra_hilbert, DEFAULT_CAP_MARGIN};
use kl_sheaves::coxeter::{interval_graph, CoxeterSystem};
use kl_sheaves::gradedlin::GradedMultiset;
use kl_sheaves::hecke::{HeckeAlgebra, LaurentPoly};

use common::{ball, MuOracle};

#[test]
fn character_is_self_dual_and_triangular() {
    for (sys, radius) in [(CoxeterSystem::type_a(3), 6), (CoxeterSystem::dihedral(5), 5), (CoxeterSystem::universal(3), 3)] {
        let b = ball(sys, radius);
        let alg = HeckeAlgebra::new(b.clone());
        let o = MuOracle::new(b.clone());
        for x in b.ids() {
            let h = build_bm(&b, x, DEFAULT_CAP_MARGIN).unwrap().graded_character();
            assert_eq!(alg.bar_involution(&h).unwrap(), h, "{}", b.format(x));
            assert_eq!(h.coefficient(x), LaurentPoly::one());
            assert!(h.support().all(|y| o.leq(y, x)));
        }
    }
}

#[test]
fn maximal_lower_vertices_copy_the_apex() {
    let b = ball(CoxeterSystem::type_a(3), 6);
    for x in b.ids().filter(|&x| b.length(x) > 0) {
        let s = build_bm(&b, x, DEFAULT_CAP_MARGIN).unwrap();
        let g = s.graph();
        let apex = g.len() - 1;
        for y in 0..apex {
            if g.strictly_above(y) == [apex] {
                // Sections over {x} are all of S, with image S/α in B^E.
                assert_eq!(s.stalk(y), &GradedMultiset::new(vec![0]));
            }
        }
    }
}

#[test]
fn axioms_hold_on_larger_sheaves() {
    let b = ball(CoxeterSystem::type_a(3), 4);
    for w in ["s2 s1 s3 s2", "s1 s2 s1", "s1 s3"] {
        let s = build_bm(&b, b.parse(w).unwrap(), DEFAULT_CAP_MARGIN).unwrap();
        let report = check_bm_axioms(&s).unwrap();
        assert!(report.all_passed(), "{w}: {report:?}");
        assert_eq!(report.principal_upsets_tested, s.graph().len());
    }
    let b = ball(CoxeterSystem::dihedral(5), 3);
    let s = build_bm(&b, b.parse("s1 s2 s1").unwrap(), DEFAULT_CAP_MARGIN).unwrap();
    assert!(check_bm_axioms(&s).unwrap().all_passed());
}

#[test]
fn structure_algebra_of_a2_interval() {
    // The structure algebra of the full A2 graph is free of rank 6 over S:
    // dimensions agree with 6 * dim S_d minus nothing, as a module it is
    // generated in degrees 0, 2, 2, 4, 4, 6.
    let b = ball(CoxeterSystem::type_a(2), 3);
    let g = interval_graph(&b, b.parse("s1 s2 s1").unwrap()).unwrap();
    let dims = structure_algebra_hilbert(&g, 2, 6).unwrap();
    let free = |d: i32| -> usize {
        [0, 2, 2, 4, 4, 6]
            .iter()
            .filter(|&&g| d >= g && (d - g) % 2 == 0)
            .map(|&g| ((d - g) / 2 + 1) as usize)
            .sum()
    };
    assert_eq!(dims, (0..=6).map(free).collect::<Vec<_>>());
}

#[test]
fn margin_does_not_change_the_sheaf() {
    let b = ball(CoxeterSystem::type_a(3), 4);
    let x = b.parse("s2 s1 s3 s2").unwrap();
    let a = build_bm(&b, x, 2).unwrap();
    let c = build_bm(&b, x, 6).unwrap();
    assert_eq!(a.stalks(), c.stalks());
    assert_eq!(a.graded_character(), c.graded_character());
}
