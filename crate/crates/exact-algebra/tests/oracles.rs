use exact_algebra::*;

fn lz(c: i64, k: i64) -> Laurent {
    Laurent::monomial(qi(c), k)
}

#[test]
fn quadratic_through_three_values() {
    let p = poly_interpolate_quadratic(&[
        Constraint::Value(qi(0), qi(4)),
        Constraint::Value(qi(1), qi(0)),
        Constraint::Value(qi(2), qi(4)),
    ])
    .unwrap();
    assert_eq!(p, qpoly(&[4, -8, 4]));
}

#[test]
fn quadratic_zero_and_constant_cases() {
    let z = poly_interpolate_quadratic(&[
        Constraint::Value(qi(0), qi(0)),
        Constraint::Value(qi(1), qi(0)),
        Constraint::Value(qi(2), qi(0)),
    ])
    .unwrap();
    assert!(z.is_zero());
    let c = poly_interpolate_quadratic(&[
        Constraint::Value(qi(0), qi(1)),
        Constraint::Value(qi(1), qi(1)),
        Constraint::Leading(qi(0)),
    ])
    .unwrap();
    assert_eq!(c, qpoly(&[1]));
}

#[test]
fn quadratic_rejects_bad_constraints() {
    let dup = poly_interpolate_quadratic(&[
        Constraint::Value(qi(0), qi(1)),
        Constraint::Value(qi(0), qi(2)),
        Constraint::Value(qi(2), qi(0)),
    ]);
    assert!(matches!(dup, Err(AlgebraError::DegenerateInterpolation)));
    let two_leads = poly_interpolate_quadratic(&[
        Constraint::Leading(qi(1)),
        Constraint::Leading(qi(2)),
        Constraint::Value(qi(2), qi(0)),
    ]);
    assert!(matches!(two_leads, Err(AlgebraError::MalformedConstraint(_))));
}

#[test]
fn splitting_of_pencil_cocycle() {
    // [[1, 0], [-3/a, 1/a^2]]
    let t = Matrix::from_rows(vec![vec![lz(1, 0), Laurent::zero()], vec![lz(-3, -1), lz(1, -2)]]);
    let b = birkhoff_factorize(&t).unwrap();
    assert_eq!(b.degrees, vec![-1, -1]);
    assert_eq!(b.product(), t);

    let t0 = Matrix::diag(vec![lz(1, 0), lz(1, -2)]);
    assert_eq!(splitting_type(&t0).unwrap(), vec![0, -2]);
}

#[test]
fn splitting_of_diagonal_is_sorted() {
    let t = Matrix::diag(vec![lz(1, 0), lz(1, 1), lz(1, -1)]);
    assert_eq!(splitting_type(&t).unwrap(), vec![1, 0, -1]);
}

#[test]
fn birkhoff_rejects_non_units() {
    let t = Matrix::diag(vec![Laurent::from_poly(qpoly(&[1, 1])), lz(1, 0)]);
    assert!(matches!(birkhoff_factorize(&t), Err(AlgebraError::NotABundle)));
}

#[test]
fn birkhoff_factors_are_invertible() {
    let t = Matrix::from_rows(vec![
        vec![Laurent::from_poly(qpoly(&[1, 2, 1])), lz(1, 3), Laurent::zero()],
        vec![lz(2, -1), lz(1, 0), lz(5, -2)],
        vec![Laurent::zero(), Laurent::zero(), lz(1, -1)],
    ]);
    // det is a monomial only if chosen carefully; build as a product instead.
    let left = Matrix::from_rows(vec![
        vec![Laurent::one(), Laurent::from_poly(qpoly(&[0, 3])), Laurent::zero()],
        vec![Laurent::zero(), Laurent::one(), Laurent::zero()],
        vec![Laurent::from_poly(qpoly(&[1, 0, 2])), Laurent::zero(), Laurent::one()],
    ]);
    let right = Matrix::from_rows(vec![
        vec![Laurent::one(), Laurent::zero(), lz(7, -2)],
        vec![lz(-1, -1), Laurent::one(), Laurent::zero()],
        vec![Laurent::zero(), Laurent::zero(), Laurent::one()],
    ]);
    let mid = Matrix::diag(vec![lz(1, 2), lz(1, -1), lz(1, -1)]);
    let prod = left.mul(&mid).mul(&right);
    let b = birkhoff_factorize(&prod).unwrap();
    assert_eq!(b.degrees, vec![2, -1, -1]);
    assert_eq!(b.product(), prod);
    let dp = b.p.det_cofactor();
    assert!(dp.is_constant() && !dp.is_zero());
    let dq = b.q.det_cofactor();
    assert!(dq.is_constant() && !dq.is_zero());
    let _ = t;
}

#[test]
fn root_counts() {
    assert_eq!(count_roots_with_multiplicity(&qpoly(&[0, -1, 0, 1])).unwrap(), (3, 3));
    assert_eq!(count_roots_with_multiplicity(&qpoly(&[1, -2, 1])).unwrap(), (2, 1));
    assert_eq!(count_roots_with_multiplicity(&qpoly(&[1, 0, 1])).unwrap(), (2, 2));
    assert!(matches!(count_roots_with_multiplicity(&QPoly::zero()), Err(AlgebraError::ZeroPolynomial)));
}

#[test]
fn kernel_examples() {
    let id: Matrix<Scalar> = Matrix::identity(2);
    assert!(matrix_kernel(&id).is_empty());
    let ones = Matrix::from_rows(vec![vec![qi(1), qi(1)], vec![qi(1), qi(1)]]);
    let k = matrix_kernel(&ones);
    assert_eq!(k.len(), 1);
    assert_eq!(&k[0][0] + &k[0][1], qi(0));
    let row = Matrix::from_rows(vec![vec![qi(0), qi(0), qi(0)]]);
    assert_eq!(matrix_kernel(&row).len(), 3);
    let one_row = Matrix::from_rows(vec![vec![qi(1), qi(0), qi(0)]]);
    assert_eq!(matrix_kernel(&one_row).len(), 2);
}

#[test]
fn scalar_serialization_round_trip() {
    let s = q(-8, 3);
    let js = serde_json::to_string(&s).unwrap();
    assert_eq!(js, "\"-8/3\"");
    let back: Scalar = serde_json::from_str(&js).unwrap();
    assert_eq!(back, s);
    let p = qpoly(&[1, 0, 2]);
    let js = serde_json::to_string(&p).unwrap();
    let back: QPoly = serde_json::from_str(&js).unwrap();
    assert_eq!(back, p);
}

#[test]
fn ratfunc_mobius_and_infinity() {
    // f(x) = (x^2 + 1) / (x - 2)
    let f = RatFunc::new(qpoly(&[1, 0, 1]), qpoly(&[-2, 1])).unwrap();
    assert_eq!(f.order_at_infinity(), Some(-1));
    assert_eq!(f.coeff_at_infinity(-1), qi(1));
    assert_eq!(f.coeff_at_infinity(0), qi(2));
    // substitute x = 1/y
    let g = f.mobius_substitute(&qi(0), &qi(1), &qi(1), &qi(0));
    assert_eq!(g.eval(&q(1, 3)), f.eval(&qi(3)));
}
