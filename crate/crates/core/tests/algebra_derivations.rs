mod common;

use carnot_core::derivations::{
    basis_maps, constrain_g0, strata_derivations, ConstraintError, DegreeZeroMap, GZeroConstraint,
};
use carnot_core::linalg::{int, rat};
use carnot_core::{presets, AlgebraError, AlgebraSpec, GradedLieAlgebra, Matrix, Rational};
use common::conformal_g0;
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| rat(n, d))
}

fn vector(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec(small_rational(), n)
}

fn algebras() -> Vec<GradedLieAlgebra> {
    vec![presets::engel(), presets::heisenberg(), presets::abelian(3)]
}

fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

#[test]
fn spec_errors() {
    let bad = |spec: AlgebraSpec| GradedLieAlgebra::from_spec(&spec).unwrap_err();
    assert_eq!(bad(AlgebraSpec::new("e")), AlgebraError::NoLayers);
    assert_eq!(bad(AlgebraSpec::new("e").layer(&["A"]).layer(&[])), AlgebraError::EmptyLayer(2));
    assert_eq!(
        bad(AlgebraSpec::new("e").layer(&["A", "A"])),
        AlgebraError::DuplicateGenerator("A".into())
    );
    assert_eq!(
        bad(AlgebraSpec::new("e").layer(&["A", "B"]).bracket("A", "C", &[])),
        AlgebraError::UnknownGenerator("C".into())
    );
    assert!(matches!(
        bad(AlgebraSpec::new("e").layer(&["A", "B"]).layer(&["C"]).bracket("A", "B", &[(int(1), "A")])),
        AlgebraError::GradingViolation { .. }
    ));
    assert!(matches!(
        bad(AlgebraSpec::new("e").layer(&["A", "B"]).layer(&["C"])),
        AlgebraError::GenerationFailure { layer: 2 }
    ));
    let ok = GradedLieAlgebra::from_spec(&presets::heisenberg_spec()).unwrap();
    assert_eq!(ok.layer_dims(), vec![2, 1]);
}

#[test]
fn jacobi_violation_is_named() {
    // free step-3 on two generators with an inconsistent third layer
    let spec = AlgebraSpec::new("bad")
        .layer(&["A", "B"])
        .layer(&["C"])
        .layer(&["D"])
        .bracket("A", "B", &[(int(1), "C")])
        .bracket("A", "C", &[(int(1), "D")])
        .bracket("B", "C", &[(int(1), "D")]);
    assert!(GradedLieAlgebra::from_spec(&spec).is_ok());
    let nilpotent_break = AlgebraSpec::new("bad")
        .layer(&["A", "B", "E"])
        .layer(&["C"])
        .layer(&["D"])
        .bracket("A", "B", &[(int(1), "C")])
        .bracket("A", "C", &[(int(1), "D")])
        .bracket("E", "C", &[(int(1), "D")])
        .bracket("A", "E", &[(int(1), "C")]);
    let err = GradedLieAlgebra::from_spec(&nilpotent_break).unwrap_err();
    assert!(matches!(err, AlgebraError::JacobiViolation { .. }), "{err:?}");
}

#[test]
fn derivation_dimensions_by_hand() {
    // Engel: D X1 = aX1 + cX2, D X2 = dX2 since [X2,Y] = 0 must stay 0
    assert_eq!(strata_derivations(&presets::engel()).dim(), 3);
    assert_eq!(strata_derivations(&presets::heisenberg()).dim(), 4);
    assert_eq!(strata_derivations(&presets::abelian(3)).dim(), 9);
    assert_eq!(conformal_g0(&presets::engel()).dim(), 1);
    assert_eq!(conformal_g0(&presets::heisenberg()).dim(), 2);
    assert_eq!(conformal_g0(&presets::abelian(3)).dim(), 4);
}

#[test]
fn engel_conformal_g0_is_the_grading() {
    let g = presets::engel();
    let g0 = conformal_g0(&g);
    assert_eq!(g0.basis(), &[DegreeZeroMap::grading(&g).to_flat()]);
    assert_eq!(g0.basis()[0], vec![int(1), int(0), int(0), int(1), int(2), int(3)]);
}

#[test]
fn constraint_length_is_checked() {
    let g = presets::engel();
    let got = constrain_g0(&g, &strata_derivations(&g), &GZeroConstraint::Explicit(vec![vec![int(1)]]));
    assert_eq!(got, Err(ConstraintError::ConditionLength { index: 0, expected: 4, got: 1 }));
}

#[test]
fn derivations_satisfy_leibniz_on_random_elements() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for g in algebras() {
        for d in basis_maps(&g, &strata_derivations(&g)) {
            assert!(d.is_derivation(&g));
            let m = d.to_matrix(&g);
            for _ in 0..10 {
                let a = common::random_point(&mut rng, g.dim());
                let b = common::random_point(&mut rng, g.dim());
                let lhs = m.mul_vec(&g.bracket(&a, &b));
                let rhs = add(&g.bracket(&m.mul_vec(&a), &b), &g.bracket(&a, &m.mul_vec(&b)));
                assert_eq!(lhs, rhs, "{}", g.name());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bracket_is_antisymmetric_and_satisfies_jacobi(
        which in 0usize..3, a in vector(5), b in vector(5), c in vector(5),
    ) {
        let g = &algebras()[which];
        let n = g.dim();
        let (a, b, c) = (&a[..n], &b[..n], &c[..n]);
        let ab = g.bracket(a, b);
        let ba = g.bracket(b, a);
        prop_assert!(add(&ab, &ba).iter().all(|x| *x == int(0)));
        let jac = add(
            &add(&g.bracket(a, &g.bracket(b, c)), &g.bracket(b, &g.bracket(c, a))),
            &g.bracket(c, &g.bracket(a, b)),
        );
        prop_assert!(jac.iter().all(|x| *x == int(0)));
    }

    #[test]
    fn bracket_respects_the_grading(which in 0usize..3, a in vector(5), b in vector(5), wa in 1i32..=3, wb in 1i32..=3) {
        let g = &algebras()[which];
        let n = g.dim();
        let layers = g.layer_dims().len() as i32;
        prop_assume!(wa <= layers && wb <= layers);
        let a = g.from_layer_coordinates(&a[..g.layer(-wa).len()], -wa);
        let b = g.from_layer_coordinates(&b[..g.layer(-wb).len()], -wb);
        let ab = g.bracket(&a, &b);
        for (i, c) in ab.iter().enumerate().take(n) {
            if *c != int(0) {
                prop_assert_eq!(g.weight(i), -wa - wb);
            }
        }
    }

    #[test]
    fn bracket_is_bilinear(which in 0usize..3, a in vector(5), b in vector(5), c in vector(5), t in small_rational()) {
        let g = &algebras()[which];
        let n = g.dim();
        let (a, b, c) = (&a[..n], &b[..n], &c[..n]);
        let ta: Vec<Rational> = a.iter().map(|x| x * &t).collect();
        let lhs = g.bracket(&add(&ta, b), c);
        let rhs: Vec<Rational> = add(
            &g.bracket(a, c).iter().map(|x| x * &t).collect::<Vec<_>>(),
            &g.bracket(b, c),
        );
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn conformal_blocks_are_conformal(which in 0usize..3, coeffs in vector(4)) {
        let g = &algebras()[which];
        let g0 = conformal_g0(g);
        let d = DegreeZeroMap::from_flat(g, &g0.combine(&coeffs[..g0.dim()]));
        let b = d.first_block();
        let m = b.rows();
        let bt = b.transpose();
        let trace = (0..m).fold(int(0), |acc, i| acc + &b[(i, i)]);
        let k = trace * rat(2, m as i64);
        for i in 0..m {
            for j in 0..m {
                let expected = if i == j { k.clone() } else { int(0) };
                prop_assert_eq!(&b[(i, j)] + &bt[(i, j)], expected);
            }
        }
        prop_assert!(d.is_derivation(g));
    }

    #[test]
    fn explicit_constraints_cut_inside_the_derivations(
        which in 0usize..3,
        conds in proptest::collection::vec(proptest::collection::vec(-2i64..=2, 9), 0..3),
    ) {
        let g = &algebras()[which];
        let m = g.layer_dims()[0];
        let conds: Vec<Vec<Rational>> = conds.iter().map(|c| c[..m * m].iter().map(|&x| int(x)).collect()).collect();
        let ders = strata_derivations(g);
        let g0 = constrain_g0(g, &ders, &GZeroConstraint::Explicit(conds.clone())).unwrap();
        prop_assert!(ders.contains_subspace(&g0).unwrap());
        prop_assert!(g0.dim() + conds.len() >= ders.dim());
        for d in basis_maps(g, &g0) {
            let b = d.first_block();
            for c in &conds {
                let value = (0..m * m).fold(int(0), |acc, e| acc + &c[e] * &b[(e / m, e % m)]);
                prop_assert_eq!(value, int(0));
            }
        }
    }

    #[test]
    fn flat_layout_round_trips(which in 0usize..3, coeffs in vector(9)) {
        let g = &algebras()[which];
        let n = DegreeZeroMap::flat_len(g);
        prop_assume!(n <= 9);
        let d = DegreeZeroMap::from_flat(g, &coeffs[..n]);
        prop_assert_eq!(d.to_flat(), coeffs[..n].to_vec());
        let v: Vec<Rational> = coeffs[..g.dim()].to_vec();
        prop_assert_eq!(d.apply(g, &v), d.to_matrix(g).mul_vec(&v));
    }
}

#[test]
fn full_matrix_is_block_diagonal() {
    let g = presets::engel();
    for d in basis_maps(&g, &strata_derivations(&g)) {
        let m: Matrix = d.to_matrix(&g);
        for i in 0..g.dim() {
            for j in 0..g.dim() {
                if g.weight(i) != g.weight(j) {
                    assert_eq!(m[(i, j)], int(0));
                }
            }
        }
    }
}
