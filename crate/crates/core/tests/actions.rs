mod common;

use amalgamkit::actions::{
    action_on_points, conj_orbits, fano_group, involutions_of_type, orbits, projective_points, schreier_sims,
    seven_cycle, stabilizer, ActionError, Perm, PointSet,
};
use amalgamkit::fields::{BinaryField, Field};
use amalgamkit::group::GroupElement;
use amalgamkit::linalg::DenseMatrix;
use amalgamkit::words::Env;
use proptest::prelude::*;

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

#[test]
fn point_counts() {
    assert_eq!(projective_points(&BinaryField::gf2(), 3).len(), 7);
    assert_eq!(projective_points(&BinaryField::gf8(), 4).len(), 585);
    assert_eq!(projective_points(&BinaryField::gf8(), 1).len(), 1);
}

#[test]
fn orbit_edge_cases() {
    let none = orbits(&[], 5).unwrap();
    assert_eq!(none.sizes, vec![1; 5]);
    let cycle = Perm::from_images((1..585).chain([0]).collect()).unwrap();
    assert_eq!(orbits(&[cycle], 585).unwrap().sizes, vec![585]);
    assert!(matches!(orbits(&[Perm::identity(4)], 5), Err(ActionError::DegreeMismatch { .. })));
}

#[test]
fn involution_classes() {
    assert_eq!(involutions_of_type(3, &[2, 1]).unwrap().len(), 3);
    assert_eq!(involutions_of_type(7, &[2, 2, 2, 1]).unwrap().len(), 105);
    assert!(involutions_of_type(7, &[2, 2, 2, 2]).is_err());
}

#[test]
fn conjugation_censuses_in_s7() {
    let invols = involutions_of_type(7, &[2, 2, 2, 1]).unwrap();
    assert_eq!(conj_orbits(&invols, &[]).unwrap().len(), 105);
    assert_eq!(sorted(conj_orbits(&invols, &fano_group()).unwrap().sizes), [7, 42, 56]);
    assert_eq!(conj_orbits(&invols, &seven_cycle()).unwrap().sizes, vec![7; 15]);
    assert_eq!(schreier_sims(&fano_group(), 7).unwrap().order(), 168);
}

#[test]
fn orbit_stabiliser_on_the_fano_plane() {
    let g = schreier_sims(&fano_group(), 7).unwrap();
    for pt in 0..7 {
        let (_, order) = stabilizer(&g, pt).unwrap();
        assert_eq!(order * 7, 168);
    }
    assert!(matches!(stabilizer(&g, 7), Err(ActionError::IndexOutOfRange { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conj_orbits_survive_relabelling(order in common::shuffled(105), g in common::perm(7), h in common::perm(7)) {
        let invols = involutions_of_type(7, &[2, 2, 2, 1]).unwrap();
        let shuffled = PointSet::new(order.iter().map(|&i| invols.point(i).clone()).collect());
        let a = conj_orbits(&invols, &[g.clone(), h.clone()]).unwrap();
        let b = conj_orbits(&shuffled, &[g, h]).unwrap();
        prop_assert_eq!(a.sorted_sizes(), b.sorted_sizes());
        for (k, &i) in order.iter().enumerate() {
            for (l, &j) in order.iter().enumerate().take(k) {
                prop_assert_eq!(a.orbit_of[i] == a.orbit_of[j], b.orbit_of[k] == b.orbit_of[l]);
            }
        }
    }

    #[test]
    fn orbits_are_invariant_under_relabelling(gens in proptest::collection::vec(common::perm(30), 0..3), r in common::perm(30)) {
        let a = orbits(&gens, 30).unwrap();
        let relabelled: Vec<Perm> = gens.iter().map(|g| g.conjugate_by(&r)).collect();
        let b = orbits(&relabelled, 30).unwrap();
        prop_assert_eq!(a.sorted_sizes(), b.sorted_sizes());
        for p in 0..30 {
            for q in 0..30 {
                prop_assert_eq!(a.orbit_of[p] == a.orbit_of[q], b.orbit_of[r.image(p)] == b.orbit_of[r.image(q)]);
            }
        }
        prop_assert_eq!(orbits(&gens, 30).unwrap(), a);
    }

    #[test]
    fn orbit_sizes_divide_the_group_order(gens in proptest::collection::vec(common::perm(9), 1..3)) {
        let g = schreier_sims(&gens, 9).unwrap();
        let part = orbits(&gens, 9).unwrap();
        for (&size, &rep) in part.sizes.iter().zip(&part.representatives) {
            prop_assert_eq!(g.order() % size as u128, 0);
            prop_assert_eq!(stabilizer(&g, rep).unwrap().1 * size as u128, g.order());
        }
        for s in g.strong_generators() {
            prop_assert!(g.contains(&s));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn point_action_is_a_homomorphism(a in common::invertible(8, 3), b in common::invertible(8, 3), w in common::word(&["a", "b"])) {
        let pts = projective_points(&BinaryField::gf8(), 3);
        let images = action_on_points(&[a.clone(), b.clone()], &pts).unwrap();
        let on_points = Env::from_pairs([("a", images[0].clone()), ("b", images[1].clone())]).eval(&w).unwrap();
        let m = Env::from_pairs([("a", a), ("b", b)]).eval(&w).unwrap();
        prop_assert_eq!(action_on_points(&[m], &pts).unwrap().remove(0), on_points);
    }
}

#[test]
fn scalars_act_trivially() {
    let f = BinaryField::gf8();
    let s = DenseMatrix::scalar(Field::Binary(f), 4, f.generator().0);
    let pts = projective_points(&f, 4);
    assert!(action_on_points(&[s], &pts).unwrap()[0].is_identity());
}
