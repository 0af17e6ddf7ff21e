use exact_algebra::{q, qi, qpoly, Matrix, QPoly, Scalar};
use phicon::normal_forms::*;
use phicon::random::*;
use phicon::stability::alpha_stability_verdict;
use phicon::surface::*;
use phicon::{PhiError, PoleConfig, SpectralData};

fn spec(rows: [[Scalar; 2]; 3]) -> SpectralData {
    spec_from_pairs(rows)
}

fn generic() -> SpectralData {
    spec([[q(1, 2), q(1, 3)], [q(3, 7), q(-1, 5)], [q(1, 4), q(2, 9)]])
}

fn plane(z0: Scalar, z1: Scalar, z2: Scalar) -> SurfacePoint {
    SurfacePoint::plane(z0, z1, z2).unwrap()
}

#[test]
fn nine_points_follow_the_list() {
    let s = generic();
    let cfg = nine_points(&s);
    assert_eq!(cfg.point(1).unwrap().coords, ProjPoint::new(qi(1), q(3, 7), qi(1)).unwrap());
    assert_eq!(cfg.point(4).unwrap().coords, ProjPoint::new(qi(0), q(-1, 2), qi(1)).unwrap());
    assert_eq!(cfg.point(6).unwrap().coords, ProjPoint::new(qi(1), q(3, 4), qi(0)).unwrap());
    assert_eq!(cfg.point(9).unwrap().coords, base_point(&s, 0, 2));
    assert!(cfg.all_distinct());
    let mut coords: Vec<_> = cfg.points.iter().map(|p| p.coords.clone()).collect();
    coords.dedup();
    coords.sort_by_key(|c| c.to_string());
    coords.dedup();
    assert_eq!(coords.len(), 9);
    for line in &cfg.lines {
        for k in line.labels {
            assert!(cfg.point(k).unwrap().coords.on_line(line.pole));
        }
        assert_eq!(line.class.self_intersection(), -2);
    }
    for i in 0..3 {
        assert!(apex().on_line(i));
    }
}

#[test]
fn equal_exponents_give_infinitely_near_points() {
    let s = spec([[q(1, 5), q(1, 5)], [qi(0), qi(1)], [qi(1), q(1, 2)]]);
    let cfg = nine_points(&s);
    assert_eq!(cfg.point(4).unwrap().coords, cfg.point(5).unwrap().coords);
    assert_eq!(cfg.point(5).unwrap().infinitely_near, Some(4));
    assert_eq!(cfg.point(4).unwrap().infinitely_near, None);
    assert!(!cfg.all_distinct());

    let triple = spec([[qi(0), qi(0)], [qi(0), qi(1)], [q(2, 3), q(2, 3)]]);
    let cfg = nine_points(&triple);
    assert_eq!(cfg.point(7).unwrap().infinitely_near, Some(6));
    assert_eq!(cfg.point(8).unwrap().infinitely_near, Some(7));
    assert_eq!(cfg.point(5).unwrap().infinitely_near, Some(4));
    assert_eq!(cfg.point(9).unwrap().infinitely_near, Some(5));
}

#[test]
fn collinearity_examples() {
    let s = spec([[q(1, 2), qi(0)], [q(1, 4), qi(0)], [q(1, 4), qi(0)]]);
    let r = degeneracy_tests(&s, &Selection::Collinear([0, 0, 0])).unwrap();
    assert!(r.geometric && r.arithmetic);
    assert!(r.determinant.is_zero());

    let s = spec([[q(1, 2), qi(0)], [q(1, 4), qi(0)], [q(1, 3), qi(0)]]);
    let r = degeneracy_tests(&s, &Selection::Collinear([0, 0, 0])).unwrap();
    assert!(!r.geometric && !r.arithmetic);
    // det [[0, −1/2, 1], [1, 1/4, 1], [1, 2/3, 0]] = ν₀ + ν₁ + ν∞ − 1.
    assert_eq!(r.determinant, q(-1, 12));
}

#[test]
fn degeneracy_criteria_agree_on_random_draws() {
    let mut rng = rng_from_seed(2024);
    let collinear = Selection::Collinear([0, 0, 0]);
    let conic = Selection::Conic([[0, 1], [0, 1], [0, 1]]);
    for _ in 0..200 {
        let s = random_spec(&mut rng, 30);
        for sel in [&collinear, &conic] {
            assert!(degeneracy_tests(&s, sel).unwrap().agree(), "{:?} {sel:?}", s.nu);
        }
    }
    for _ in 0..50 {
        let s = random_collinear_spec(&mut rng, 30);
        let r = degeneracy_tests(&s, &collinear).unwrap();
        assert!(r.geometric && r.arithmetic);
        let s = random_conic_spec(&mut rng, 30);
        let r = degeneracy_tests(&s, &conic).unwrap();
        assert!(r.geometric && r.arithmetic, "{:?}", s.nu);
    }
}

#[test]
fn conic_with_a_tangency_row() {
    // ν_{0,0} = ν_{0,1} and the six exponents add up to 2.
    let s = spec([[q(1, 3), q(1, 3)], [q(1, 2), q(-1, 4)], [q(1, 5), q(53, 60)]]);
    let sel = Selection::Conic([[0, 1], [0, 1], [0, 1]]);
    let r = degeneracy_tests(&s, &sel).unwrap();
    assert_eq!(r.exponent_sum, qi(2));
    assert!(r.agree() && r.geometric);
    let s = spec([[q(1, 3), q(1, 3)], [q(1, 2), q(-1, 4)], [q(1, 5), q(1, 7)]]);
    assert!(degeneracy_tests(&s, &sel).unwrap().agree());
}

#[test]
fn malformed_selections_are_rejected() {
    let bad = |pairs: &[(usize, usize)]| matches!(Selection::from_pairs(pairs), Err(PhiError::MalformedSelection(_)));
    assert!(bad(&[(0, 0), (0, 1), (2, 0)]));
    assert!(bad(&[(0, 0), (1, 0)]));
    assert!(bad(&[(0, 0), (0, 0), (1, 0), (1, 1), (2, 0), (2, 1)]));
    assert!(bad(&[(0, 3), (1, 0), (2, 0)]));
    assert_eq!(Selection::from_pairs(&[(2, 1), (0, 0), (1, 2)]).unwrap(), Selection::Collinear([0, 2, 1]));
    let r = degeneracy_tests(&generic(), &Selection::Conic([[0, 0], [0, 1], [1, 2]]));
    assert!(matches!(r, Err(PhiError::MalformedSelection(_))));
}

#[test]
fn anticanonical_decomposition_generic() {
    let a = anticanonical_config(&generic());
    assert!(a.sums_to_anticanonical());
    assert_eq!(PicardClass::anticanonical().self_intersection(), 0);
    for line in &a.lines {
        assert_eq!(line.self_intersection, -2);
        assert_eq!(line.class.dot(&PicardClass::anticanonical()), 0);
    }
    assert_eq!(a.fibers.len(), 9);
    assert!(a.fibers.iter().all(|f| f.components.len() == 1 && f.components[0].self_intersection == -1));
}

#[test]
fn anticanonical_two_and_three_equal() {
    let s = spec([[q(1, 5), q(1, 5)], [qi(0), qi(0)], [qi(1), q(1, 3)]]);
    let a = anticanonical_config(&s);
    assert!(a.sums_to_anticanonical());
    let f = a.fibers.iter().find(|f| f.pole == 0 && f.exponents == vec![0, 1]).unwrap();
    let si: Vec<i64> = f.components.iter().map(|c| c.self_intersection).collect();
    assert_eq!(si, vec![-1, -2]);
    assert_eq!(f.intersections[0][1], 1);

    let f = a.fibers.iter().find(|f| f.pole == 1).unwrap();
    assert_eq!(f.exponents, vec![0, 1, 2]);
    let si: Vec<i64> = f.components.iter().map(|c| c.self_intersection).collect();
    assert_eq!(si, vec![-1, -2, -2]);
    assert_eq!(f.intersections[0][1], 1);
    assert_eq!(f.intersections[1][2], 1);
    assert_eq!(f.intersections[0][2], 0);
    assert_eq!(a.fibers.len(), 2 + 1 + 3);
}

#[test]
fn apex_is_the_rank_one_connection() {
    let s = generic();
    let conn = point_to_connection(&s, &plane(qi(0), qi(1), qi(0))).unwrap();
    let z = QPoly::zero();
    let expected = Matrix::from_rows(vec![
        vec![z.clone(), qpoly(&[0, 1]), z.clone()],
        vec![QPoly::one(), z.clone(), z.clone()],
        vec![z, qpoly(&[0, 1]), qpoly(&[-1, 1])],
    ]);
    assert_eq!(conn.n(), &expected);
    assert_eq!(conn.rank_of_phi(), 1);
    assert_eq!(connection_to_point(&conn).unwrap(), plane(qi(0), qi(1), qi(0)));
}

#[test]
fn affine_chart_matches_the_displayed_conditions() {
    let s = generic();
    let (qq, p) = (qi(3), qi(1));
    let conn = point_to_connection(&s, &plane(qq.clone(), p.clone(), qi(1))).unwrap();
    let a12 = conn.n().get(0, 1);
    let a13 = conn.n().get(0, 2);
    let e2 = |r: &[Scalar; 3]| &r[0] * &r[1] + &r[0] * &r[2] + &r[1] * &r[2];
    let nu = &s.nu;
    assert_eq!(a12.eval(&qi(0)), -(&p * &p) - e2(&nu[0]));
    assert_eq!(a12.eval(&qi(1)), -(&p * &p) - e2(&nu[1]));
    assert_eq!(a12.coeff(2), qi(1) - e2(&nu[2]));
    let prod = |f: &dyn Fn(&Scalar) -> Scalar, r: &[Scalar; 3]| r.iter().fold(qi(1), |a, x| a * f(x));
    assert_eq!(a13.eval(&qi(0)), prod(&|x| &p + x, &nu[0]) / &qq);
    assert_eq!(a13.eval(&qi(1)), prod(&|x| &p - x, &nu[1]) / (&qq - qi(1)));
    assert_eq!(a13.coeff(2), prod(&|x| qi(1) - x, &nu[2]));
}

#[test]
fn two_charts_describe_the_same_connection() {
    let s = generic();
    let direct = point_to_connection(&s, &plane(qi(3), qi(1), qi(1))).unwrap();
    let other = infinity_chart_connection(&s, &q(1, 3), &q(1, 3)).unwrap();
    assert_eq!(reduce_to_normal_form(&direct).unwrap(), reduce_to_normal_form(&other).unwrap());
    let mut rng = rng_from_seed(99);
    for _ in 0..25 {
        let s = random_spec(&mut rng, 20);
        let qq = random_nonzero_scalar(&mut rng, 20);
        if qq == qi(1) {
            continue;
        }
        let p = random_scalar(&mut rng, 20);
        let a = point_to_connection(&s, &plane(qq.clone(), p.clone(), qi(1))).unwrap();
        let b = infinity_chart_connection(&s, &(&p / &qq), &qq.inv()).unwrap();
        assert_eq!(reduce_to_normal_form(&a).unwrap(), reduce_to_normal_form(&b).unwrap());
    }
}

#[test]
fn infinity_line_and_family() {
    let s = generic();
    let p = q(5, 11);
    let a = point_to_connection(&s, &plane(qi(1), p.clone(), qi(0))).unwrap();
    let b = infinity_line_connection(&s, &p).unwrap();
    assert_eq!(reduce_to_normal_form(&a).unwrap(), reduce_to_normal_form(&b).unwrap());
    for j in 0..3 {
        for (mu, eta) in [(qi(1), q(2, 3)), (qi(0), qi(1)), (q(3, 2), q(-1, 4))] {
            let c = infinity_exceptional_connection(&s, j, &mu, &eta).unwrap();
            let coord = ExceptionalCoord::new(2, j, mu.clone(), -&eta).unwrap();
            assert_eq!(reduce_to_normal_form(&c).unwrap(), NormalForm::Exceptional(coord));
        }
    }
}

#[test]
fn exceptional_family_at_zero_has_the_displayed_coefficients() {
    let s = generic();
    let nu = &s.nu;
    for j in 0..3 {
        let coord = ExceptionalCoord::new(0, j, qi(1), qi(0)).unwrap();
        let conn = point_to_connection(&s, &SurfacePoint::Exceptional(coord)).unwrap();
        let lead = nu[2].iter().fold(qi(1), |a, x| a * (qi(1) - x));
        let lin = nu[1].iter().fold(qi(1), |a, x| a * (&nu[0][j] + x));
        let c0 = QPoly::new(vec![qi(0), -&lead + &lin, lead]);
        assert_eq!(conn.n().get(0, 2), &c0);
        assert_eq!(conn.n().get(1, 1), &QPoly::constant(nu[0][j].clone()));
        assert_eq!(conn.n().get(2, 2), &QPoly::constant(-&nu[0][j]));
    }
    for j in 0..3 {
        let coord = ExceptionalCoord::new(1, j, qi(1), qi(0)).unwrap();
        let conn = point_to_connection(&s, &SurfacePoint::Exceptional(coord)).unwrap();
        let lead = nu[2].iter().fold(qi(1), |a, x| a * (qi(1) - x));
        let lin = nu[0].iter().fold(qi(1), |a, x| a * (&nu[1][j] + x));
        // c₁(z) = lead·z(z − 1) − lin·(z − 1)
        let c1 = QPoly::new(vec![lin.clone(), -&lead - &lin, lead]);
        assert_eq!(conn.n().get(0, 2), &c1);
    }
}

#[test]
fn base_points_need_exceptional_coordinates() {
    let s = generic();
    for i in 0..3 {
        for j in 0..3 {
            let pt = SurfacePoint::Plane { coords: base_point(&s, i, j) };
            assert!(matches!(point_to_connection(&s, &pt), Err(PhiError::NeedExceptionalCoord)));
            assert_eq!(stratum(&s, &base_point(&s, i, j)), Stratum::BasePoint);
        }
    }
}

#[test]
fn exceptional_ranks_follow_the_stratification() {
    let s = generic();
    for i in 0..3 {
        for j in 0..3 {
            let top = ExceptionalCoord::new(i, j, qi(1), qi(0)).unwrap();
            let side = ExceptionalCoord::new(i, j, qi(0), qi(1)).unwrap();
            let a = point_to_connection(&s, &SurfacePoint::Exceptional(top)).unwrap();
            let b = point_to_connection(&s, &SurfacePoint::Exceptional(side)).unwrap();
            assert_eq!((a.rank_of_phi(), b.rank_of_phi()), (3, 2));
        }
    }
}

fn random_point(rng: &mut rand_chacha::ChaCha8Rng, s: &SpectralData, stratum_index: usize) -> SurfacePoint {
    loop {
        let a = random_scalar(rng, 40);
        let b = random_scalar(rng, 40);
        let pt = match stratum_index {
            0 => SurfacePoint::plane(a, b, qi(1)),
            1 => SurfacePoint::plane(qi(0), a, qi(1)),
            2 => SurfacePoint::plane(qi(1), a, qi(1)),
            3 => SurfacePoint::plane(qi(1), a, qi(0)),
            _ => SurfacePoint::plane(qi(0), qi(1), qi(0)),
        }
        .unwrap();
        if point_to_connection(s, &pt).is_ok() {
            return pt;
        }
    }
}

#[test]
fn round_trips_on_every_stratum() {
    let mut rng = rng_from_seed(31);
    for stratum_index in 0..5 {
        for _ in 0..8 {
            let s = random_spec(&mut rng, 20);
            let pt = random_point(&mut rng, &s, stratum_index);
            let conn = point_to_connection(&s, &pt).unwrap();
            assert!(conn.check_parabolic_conditions().ok);
            assert!(conn.check_spectral_identity());
            assert!(alpha_stability_verdict(&conn).is_stable());
            let moved = conn.gauge_transform(&random_gauge(&mut rng, 6)).unwrap();
            assert_eq!(connection_to_point(&moved).unwrap(), pt, "stratum {stratum_index}");
        }
    }
    for i in 0..3 {
        for j in 0..3 {
            let s = random_spec(&mut rng, 20);
            let eta = random_scalar(&mut rng, 20);
            for pt in [ExceptionalCoord::new(i, j, qi(1), eta).unwrap(), ExceptionalCoord::new(i, j, qi(0), qi(1)).unwrap()] {
                let pt = SurfacePoint::Exceptional(pt);
                let conn = point_to_connection(&s, &pt).unwrap();
                let moved = conn.gauge_transform(&random_gauge(&mut rng, 6)).unwrap();
                assert_eq!(connection_to_point(&moved).unwrap(), pt);
            }
        }
    }
}

#[test]
fn dictionary_requires_the_standard_poles() {
    let poles = PoleConfig::finite(qi(0), qi(1), qi(2)).unwrap();
    let conn = build_rank3(&poles, &generic(), &phicon::P1::Finite(qi(5)), &qi(0), None).unwrap();
    assert!(matches!(connection_to_point(&conn), Err(PhiError::InvalidParameter(_))));
}

#[test]
fn points_serialize_as_scalar_triples() {
    let pt = plane(qi(2), qi(4), qi(6));
    let v = serde_json::to_value(&pt).unwrap();
    assert_eq!(v, serde_json::json!({"kind": "plane", "coords": ["1", "2", "3"]}));
    let back: SurfacePoint = serde_json::from_value(v).unwrap();
    assert_eq!(back, pt);
    assert!(serde_json::from_value::<ProjPoint>(serde_json::json!(["0", "0", "0"])).is_err());
    assert_eq!(PicardClass::h().sub(&PicardClass::e(4)).to_string(), "H - E4");
}
