use exact_algebra::*;
use proptest::prelude::*;

fn small() -> impl Strategy<Value = Scalar> {
    (-20i64..20, 1i64..8).prop_map(|(n, d)| q(n, d))
}

fn poly_z(max_deg: usize) -> impl Strategy<Value = QPoly> {
    proptest::collection::vec(small(), 0..=max_deg + 1).prop_map(QPoly::new)
}

/// A random unimodular matrix over k[z] (or k[1/z]) built from elementary factors.
fn elementary_product(seed: Vec<(usize, usize, QPoly)>, inverse_chart: bool) -> Matrix<Laurent> {
    let mut m: Matrix<Laurent> = Matrix::identity(3);
    for (i, j, p) in seed {
        if i == j {
            continue;
        }
        let mut e: Matrix<Laurent> = Matrix::identity(3);
        let entry = if inverse_chart { Laurent::from_poly_in_inverse(&p) } else { Laurent::from_poly(p) };
        e.set(i, j, entry);
        m = m.mul(&e);
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn splitting_type_invariant_under_chart_automorphisms(
        d in proptest::collection::vec(-3i64..4, 3),
        left in proptest::collection::vec((0usize..3, 0usize..3, poly_z(2)), 0..4),
        right in proptest::collection::vec((0usize..3, 0usize..3, poly_z(2)), 0..4),
    ) {
        let mut sorted = d.clone();
        sorted.sort_by(|a, b| b.cmp(a));
        let mid = Matrix::diag(d.iter().map(|&k| Laurent::monomial(qi(1), k)).collect());
        let t = elementary_product(left, false).mul(&mid).mul(&elementary_product(right, true));
        let b = birkhoff_factorize(&t).unwrap();
        prop_assert_eq!(&b.degrees, &sorted);
        prop_assert_eq!(b.product(), t);
        let total: i64 = b.degrees.iter().sum();
        prop_assert_eq!(total, d.iter().sum::<i64>());
    }

    #[test]
    fn interpolation_meets_constraints(xs in proptest::collection::vec(small(), 3), vs in proptest::collection::vec(small(), 3), lead in any::<bool>()) {
        let mut cs = vec![
            Constraint::Value(xs[0].clone(), vs[0].clone()),
            Constraint::Value(xs[1].clone(), vs[1].clone()),
            if lead { Constraint::Leading(vs[2].clone()) } else { Constraint::Value(xs[2].clone(), vs[2].clone()) },
        ];
        let arr: [Constraint; 3] = [cs.remove(0), cs.remove(0), cs.remove(0)];
        match poly_interpolate_quadratic(&arr) {
            Ok(p) => {
                for c in &arr {
                    match c {
                        Constraint::Value(x, v) => prop_assert_eq!(&p.eval(x), v),
                        Constraint::Leading(v) => prop_assert_eq!(&p.coeff(2), v),
                    }
                }
            }
            Err(AlgebraError::DegenerateInterpolation) => {
                prop_assert!(xs[0] == xs[1] || (!lead && (xs[0] == xs[2] || xs[1] == xs[2])));
            }
            Err(e) => prop_assert!(false, "unexpected {e:?}"),
        }
    }

    #[test]
    fn distinct_roots_bounded_by_total(p in poly_z(5)) {
        prop_assume!(!p.is_zero());
        let (t, d) = count_roots_with_multiplicity(&p).unwrap();
        prop_assert!(d <= t);
        let g = p.gcd(&p.derivative());
        prop_assert_eq!(d == t, g.is_constant());
    }

    #[test]
    fn ratfunc_field_laws(a in poly_z(3), b in poly_z(3), c in poly_z(2)) {
        prop_assume!(!b.is_zero() && !c.is_zero());
        let f = RatFunc::new(a, b.clone()).unwrap();
        let g = RatFunc::new(c, b).unwrap();
        let lhs = Ring::mul(&Ring::add(&f, &g), &g);
        let rhs = Ring::add(&Ring::mul(&f, &g), &Ring::mul(&g, &g));
        prop_assert_eq!(lhs, rhs);
        let inv = Field::inv(&g).unwrap();
        prop_assert!(Ring::mul(&g, &inv).is_one());
    }
}
