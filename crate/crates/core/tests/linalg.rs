use carnot_core::linalg::{int, rat, span_equal, Matrix, Rational, Subspace};
use proptest::prelude::*;

/// Leibniz expansion over permutations.
fn det(m: &[Vec<Rational>]) -> Rational {
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        perms(n - 1)
            .into_iter()
            .flat_map(|p| {
                (0..n).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    q
                })
            })
            .collect()
    }
    let n = m.len();
    perms(n).into_iter().fold(int(0), |acc, p| {
        let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        let term = (0..n).fold(int(1), |t, i| t * &m[i][p[i]]);
        if inversions % 2 == 0 {
            acc + term
        } else {
            acc - term
        }
    })
}

fn square(n: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
    proptest::collection::vec(proptest::collection::vec((-4i64..=4, 1i64..=3).prop_map(|(a, b)| rat(a, b)), n), n)
}

fn rows(c: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
    proptest::collection::vec(proptest::collection::vec((-3i64..=3).prop_map(int), c), 0..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn full_rank_iff_nonzero_determinant(m in (1usize..=4).prop_flat_map(square)) {
        let n = m.len();
        let full = Matrix::from_rows(n, m.clone()).rank() == n;
        prop_assert_eq!(full, det(&m) != int(0));
    }

    #[test]
    fn solve_returns_a_solution_when_one_exists(m in (1usize..=4).prop_flat_map(square), x in proptest::collection::vec(-5i64..=5, 4)) {
        let n = m.len();
        let a = Matrix::from_rows(n, m);
        let x: Vec<Rational> = x[..n].iter().map(|&v| int(v)).collect();
        let b = a.mul_vec(&x);
        let y = a.solve(&b).expect("b is in the image");
        prop_assert_eq!(a.mul_vec(&y), b);
    }

    #[test]
    fn span_is_canonical(vs in rows(4), shuffle in any::<u64>()) {
        let a = Subspace::span(4, vs.clone());
        let mut ws = vs.clone();
        let len = ws.len();
        if len > 1 {
            ws.rotate_left(shuffle as usize % len);
            let s = &ws[0].clone();
            ws[len - 1] = ws[len - 1].iter().zip(s).map(|(x, y)| x + y).collect();
        }
        let b = Subspace::span(4, ws);
        prop_assert_eq!(a.clone(), b.clone());
        prop_assert!(span_equal(&a, &b).unwrap());
        for v in &vs {
            prop_assert!(a.contains(v));
            let c = a.coordinates(v).unwrap();
            prop_assert_eq!(&a.combine(&c), v);
        }
    }

    #[test]
    fn sum_and_restrict_dimensions(us in rows(4), vs in rows(4), fs in rows(4)) {
        let u = Subspace::span(4, us);
        let v = Subspace::span(4, vs);
        let s = u.sum(&v).unwrap();
        prop_assert!(s.contains_subspace(&u).unwrap() && s.contains_subspace(&v).unwrap());
        prop_assert!(s.dim() <= u.dim() + v.dim());
        let r = u.restrict(&fs).unwrap();
        prop_assert!(u.contains_subspace(&r).unwrap());
        prop_assert!(r.dim() + fs.len() >= u.dim());
        for b in r.basis() {
            for f in &fs {
                let value = f.iter().zip(b).fold(int(0), |acc, (x, y)| acc + x * y);
                prop_assert_eq!(value, int(0));
            }
        }
    }
}

#[test]
fn dimension_mismatch_is_an_error() {
    let a = Subspace::full(2);
    let b = Subspace::full(3);
    assert!(a.sum(&b).is_err());
    assert!(span_equal(&a, &b).is_err());
}

#[test]
fn determinant_oracle_sanity() {
    assert_eq!(det(&[vec![int(1), int(2)], vec![int(3), int(4)]]), int(-2));
    assert_eq!(det(&[]), int(1));
}
