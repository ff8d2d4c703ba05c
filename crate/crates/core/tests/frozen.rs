//! Exact counts frozen from independent derivations.

use polar_base::frames::enumerate_frames;
use polar_base::model::{ApartmentModel, Complement, SignedSet};
use polar_base::oracle::{expected_frame_count, group_order};
use polar_base::polar::{FormKind, FormSpec, PolarSpace};

#[test]
fn singular_subspace_counts() {
    let cases: [(FormSpec, &[usize]); 4] = [
        (FormSpec::symplectic(3, 2), &[63, 315, 135]),
        (FormSpec::symplectic(3, 3), &[364, 3640, 1120]),
        (FormSpec::hyperbolic(3, 2), &[35, 105, 30]),
        (FormSpec::hyperbolic(4, 2), &[135, 1575, 2025, 270]),
    ];
    for (spec, want) in cases {
        let s = PolarSpace::build(spec).unwrap();
        let got: Vec<usize> = (0..spec.n)
            .map(|k| s.grassmannian(k).unwrap().len())
            .collect();
        assert_eq!(got, want, "{spec}");
    }
}

#[test]
fn frame_counts_match_group_orders() {
    assert_eq!(group_order(FormSpec::symplectic(3, 2)), 1_451_520);
    assert_eq!(expected_frame_count(FormSpec::symplectic(3, 2)), 30240);
    assert_eq!(expected_frame_count(FormSpec::hyperbolic(3, 2)), 840);
    let d = PolarSpace::build(FormSpec::hyperbolic(3, 2)).unwrap();
    assert_eq!(enumerate_frames(&d).len(), 840);
}

#[test]
fn pair_count_at_level_two() {
    // n = 4, S = <p0,p1,p2>, U = <p0,p1,p3>: five classes with p0 or p1 in
    // and a far point out, plus C(2;7)
    let m = ApartmentModel::grassmann(4, 2, FormKind::SymplecticC).unwrap();
    let (s, u) = (
        SignedSet::from_indices(&[0, 1, 2]),
        SignedSet::from_indices(&[0, 1, 3]),
    );
    assert!(m.model_collinear(&s, &u));
    assert_eq!(m.c(&s, &u).unwrap(), 6);
    assert_eq!(m.m_c().unwrap(), 6);
    let weak = SignedSet::from_indices(&[0, 1, 6]);
    assert!(!m.model_collinear(&s, &weak) && m.model_weak_adjacent(&s, &weak));
    assert_eq!(m.c(&s, &weak).unwrap(), 5);
}

#[test]
fn level_one_values() {
    let m = ApartmentModel::grassmann(4, 1, FormKind::SymplecticC).unwrap();
    assert_eq!(m.m_c().unwrap(), 5);
    let d = m
        .count_disjoint_complements(Complement::FirstType { i: 0 })
        .unwrap();
    assert_eq!((d.labelled, d.distinct_sets), (13, 7));
    let d = m
        .count_disjoint_complements(Complement::SecondType { i: 0, j: 1 })
        .unwrap();
    assert_eq!((d.labelled, d.distinct_sets), (4, 3));
}
