mod common;

use carnot_core::algebra::AlgebraSpec;
use carnot_core::frame::left_invariant_frame;
use carnot_core::group::{bch, dilation, extend_automorphism, CoordinateRecipe, Group, GroupError};
use carnot_core::linalg::{int, rat};
use carnot_core::{presets, GradedLieAlgebra, Matrix, Polynomial, PolyVectorField, Rational};
use common::{field, random_point};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn point(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec(small_rational(), n)
}

fn element(g: &GradedLieAlgebra, name: &str) -> Vec<Rational> {
    g.basis(g.index_of(name).unwrap())
}

#[test]
fn bch_examples() {
    let g = presets::engel();
    let (x1, x2) = (element(&g, "X1"), element(&g, "X2"));
    let got = bch(&g, &x1, &x2).unwrap();
    assert_eq!(got, vec![int(1), int(1), rat(1, 2), rat(1, 12)]);
    let zero = vec![int(0); 4];
    assert_eq!(bch(&g, &x1, &zero).unwrap(), x1);
    let minus: Vec<Rational> = x1.iter().map(|v| -v).collect();
    assert_eq!(bch(&g, &x1, &minus).unwrap(), zero);
}

#[test]
fn bch_rejects_step_four() {
    let spec = AlgebraSpec::new("filiform4")
        .layer(&["X1", "X2"])
        .layer(&["X3"])
        .layer(&["X4"])
        .layer(&["X5"])
        .bracket("X1", "X2", &[(int(1), "X3")])
        .bracket("X1", "X3", &[(int(1), "X4")])
        .bracket("X1", "X4", &[(int(1), "X5")]);
    let g = GradedLieAlgebra::from_spec(&spec).unwrap();
    let a = g.basis(0);
    assert_eq!(bch(&g, &a, &a), Err(GroupError::UnsupportedStep(4)));
    let recipe = CoordinateRecipe::first_kind(&g);
    assert!(matches!(Group::new(g, recipe), Err(GroupError::UnsupportedStep(4))));
}

#[test]
fn engel_product_examples() {
    let group = presets::engel_group();
    let (a, b) = (rat(3, 2), int(-5));
    let p = vec![a.clone(), int(0), int(0), int(0)];
    let q = vec![int(0), b.clone(), int(0), int(0)];
    let ab = &a * &b;
    assert_eq!(group.product(&p, &q), vec![a.clone(), b.clone(), ab.clone(), &ab * &a / int(2)]);
    assert_eq!(group.product(&q, &p), vec![a, b, int(0), int(0)]);
}

#[test]
fn recipe_errors() {
    let g = presets::engel();
    let pair = |a: &str, b: &str| (a.to_string(), b.to_string());
    assert_eq!(
        CoordinateRecipe::new(&g, &[vec![pair("X1", "a"), pair("W", "w")]]),
        Err(GroupError::UnknownGenerator("W".into()))
    );
    assert_eq!(
        CoordinateRecipe::new(&g, &[vec![pair("X1", "a")], vec![pair("X1", "b")]]),
        Err(GroupError::DuplicateGenerator("X1".into()))
    );
    assert_eq!(
        CoordinateRecipe::new(&g, &[vec![pair("X1", "a"), pair("X2", "b"), pair("Y", "c")]]),
        Err(GroupError::MissingGenerator("Z".into()))
    );
}

#[test]
fn dilation_examples() {
    let g = presets::engel();
    let one = vec![int(1); 4];
    assert_eq!(dilation(&g, &int(1)).unwrap().apply(&one), one);
    assert_eq!(dilation(&g, &int(2)).unwrap().apply(&one), vec![int(2), int(2), int(4), int(8)]);
    assert_eq!(dilation(&g, &int(0)), Err(GroupError::NonpositiveScale(int(0))));
    assert_eq!(dilation(&g, &int(-1)), Err(GroupError::NonpositiveScale(int(-1))));
}

#[test]
fn frame_brackets_reproduce_structure_constants() {
    for group in [
        presets::engel_group(),
        presets::first_kind_group(presets::engel()),
        presets::first_kind_group(presets::heisenberg()),
    ] {
        let g = group.algebra().clone();
        let frame = left_invariant_frame(&group);
        for i in 0..g.dim() {
            for j in 0..g.dim() {
                let lhs = frame.field(i).bracket(frame.field(j));
                let c = g.structure_constants(i, j);
                let rhs = PolyVectorField::combination(g.dim(), c, frame.fields());
                assert_eq!(lhs, rhs, "[{}, {}]", g.names()[i], g.names()[j]);
            }
        }
    }
}

#[test]
fn first_kind_engel_frame() {
    let group = presets::first_kind_group(presets::engel());
    let frame = left_invariant_frame(&group);
    // x·exp(tX1) in first-kind coordinates
    assert_eq!(
        frame.field(0),
        &field(&frame, &["1", "0", "-1/2*x2", "-1/2*y - 1/12*x1*x2"])
    );
}

#[test]
fn dilations_scale_the_frame() {
    let group = presets::engel_group();
    let g = group.algebra().clone();
    let frame = left_invariant_frame(&group);
    for lambda in [int(3), rat(2, 5)] {
        let d = group.dilation(&lambda).unwrap();
        let jac = d.jacobian();
        for i in 0..g.dim() {
            let x = &frame.field(i).components;
            let pushed: Vec<Polynomial> = (0..4)
                .map(|r| (0..4).fold(Polynomial::zero(), |acc, k| &acc + &(&jac[r][k] * &x[k])))
                .collect();
            let factor = num_traits::pow(lambda.clone(), g.weight(i).unsigned_abs() as usize);
            let expected: Vec<Polynomial> = x.iter().map(|c| c.substitute(&d.components).scale(&factor)).collect();
            assert_eq!(pushed, expected, "{}", g.names()[i]);
        }
    }
}

#[test]
fn automorphism_extension() {
    let g = presets::engel();
    let a = extend_automorphism(&g, &Matrix::from_ints(&[&[1, 0], &[0, 2]])).unwrap();
    let diag: Vec<Rational> = (0..4).map(|i| a[(i, i)].clone()).collect();
    assert_eq!(diag, vec![int(1), int(2), int(2), int(2)]);
    // X2 ↦ X1 would need [X2, Y] ≠ 0
    assert_eq!(
        extend_automorphism(&g, &Matrix::from_ints(&[&[0, 1], &[1, 0]])),
        Err(GroupError::NotAnAutomorphism)
    );
    assert_eq!(
        extend_automorphism(&g, &Matrix::from_ints(&[&[1, 0], &[0, 0]])),
        Err(GroupError::NotAnAutomorphism)
    );
}

#[test]
fn random_points_round_trip_through_log() {
    let group = presets::engel_group();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let p = random_point(&mut rng, 4);
        assert_eq!(group.coordinates_of(&group.log(&p)), p);
        assert_eq!(group.product(&p, &group.inverse(&p)), group.identity());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_is_associative(p in point(4), q in point(4), r in point(4)) {
        let group = presets::engel_group();
        let left = group.product(&group.product(&p, &q), &r);
        let right = group.product(&p, &group.product(&q, &r));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn identity_is_two_sided(p in point(4)) {
        let group = presets::engel_group();
        let e = group.identity();
        prop_assert_eq!(group.product(&e, &p), p.clone());
        prop_assert_eq!(group.product(&p, &e), p);
    }

    #[test]
    fn dilations_compose(l in (1i64..=9, 1i64..=9), m in (1i64..=9, 1i64..=9), p in point(4)) {
        let g = presets::engel();
        let (l, m) = (rat(l.0, l.1), rat(m.0, m.1));
        let lm = &l * &m;
        let composed = dilation(&g, &l).unwrap().compose(&dilation(&g, &m).unwrap());
        prop_assert_eq!(composed.apply(&p), dilation(&g, &lm).unwrap().apply(&p));
    }

    #[test]
    fn dilations_are_automorphisms(l in (1i64..=9, 1i64..=9), p in point(4), q in point(4)) {
        let group = presets::engel_group();
        let d = group.dilation(&rat(l.0, l.1)).unwrap();
        prop_assert_eq!(d.apply(&group.product(&p, &q)), group.product(&d.apply(&p), &d.apply(&q)));
    }

    #[test]
    fn left_translation_matches_product(p in point(4), q in point(4)) {
        let group = presets::engel_group();
        prop_assert_eq!(group.left_translation(&p).apply(&q), group.product(&p, &q));
    }
}
