use exact_algebra::{q, qi, Matrix, QPoly, RatFunc, Ring, Scalar};
use phicon::lambda_family::*;
use phicon::normal_forms::apparent_singularity;
use phicon::random::*;
use phicon::stability::{pw_chart_bundle, PwChart};
use phicon::{PhiError, PoleConfig, SpectralData, P1};
use rand::Rng;

fn poles() -> PoleConfig {
    PoleConfig::finite(qi(0), qi(1), qi(2)).unwrap()
}

fn spec_with_s(s_col: [Scalar; 3], rng: &mut impl Rng) -> SpectralData {
    let mut nu: [[Scalar; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| random_scalar(rng, 9)));
    for i in 0..3 {
        nu[i][0] = s_col[i].clone();
    }
    let total = nu.iter().flatten().fold(Scalar::zero(), |acc, x| acc + x);
    nu[2][2] = &nu[2][2] + &(qi(2) - total);
    SpectralData::from_rows(nu).unwrap()
}

fn generic_spec(rng: &mut impl Rng) -> SpectralData {
    loop {
        let col = std::array::from_fn(|_| random_scalar(rng, 9));
        let spec = spec_with_s(col, rng);
        if !(&spec.nu[0][0] + &spec.nu[1][0] + &spec.nu[2][0]).is_zero() {
            return spec;
        }
    }
}

#[test]
fn pencil_residues_have_the_prescribed_exponents() {
    let mut rng = rng_from_seed(4);
    for chart in [PwChart::A(qi(1)), PwChart::A(q(-3, 7)), PwChart::B(q(5, 2)), PwChart::B(qi(0))] {
        let spec = generic_spec(&mut rng);
        let pencil = build_lambda_pencil(&chart, &poles(), &spec).unwrap();
        for (mu, lambda) in [(qi(1), qi(0)), (qi(0), qi(1)), (qi(2), q(-1, 3)), (q(1, 5), qi(7))] {
            assert!(pencil.spectral_identity_holds(&mu, &lambda), "{chart:?} ({mu}:{lambda})");
            assert!(pencil.residue_failures(&mu, &lambda).is_empty(), "{chart:?} ({mu}:{lambda})");
        }
    }
}

#[test]
fn connection_flags_are_the_chart_flags() {
    let mut rng = rng_from_seed(9);
    let spec = generic_spec(&mut rng);
    let chart = PwChart::A(q(2, 3));
    let pencil = build_lambda_pencil(&chart, &poles(), &spec).unwrap();
    let conn = pencil.to_phi_connection(&qi(1), &q(3, 4)).unwrap();
    assert_eq!(conn.flags1(), pw_chart_bundle(&poles(), &chart).flags());
}

#[test]
fn higgs_field_at_a_zero() {
    let spec = generic_spec(&mut rng_from_seed(1));
    let pencil = build_lambda_pencil(&PwChart::A(qi(0)), &poles(), &spec).unwrap();
    let hp3 = poles().hprime(2);
    let expected = Matrix::from_rows(vec![
        vec![QPoly::zero(), QPoly::zero(), QPoly::zero()],
        vec![QPoly::constant(hp3), QPoly::zero(), QPoly::new(vec![qi(2), qi(-2)])],
        vec![QPoly::zero(), QPoly::zero(), QPoly::zero()],
    ]);
    assert_eq!(pencil.higgs0, expected);
    for a in [qi(3), q(-5, 2)] {
        let p = build_lambda_pencil(&PwChart::A(a), &poles(), &spec).unwrap();
        let trace = (0..3).fold(QPoly::zero(), |acc, i| acc.add(p.higgs0.get(i, i)));
        assert!(trace.is_zero());
    }
}

#[test]
fn pencil_needs_finite_poles() {
    let spec = generic_spec(&mut rng_from_seed(2));
    assert!(matches!(build_lambda_pencil(&PwChart::A(qi(1)), &PoleConfig::zoi(), &spec), Err(PhiError::WrongChart)));
}

#[test]
fn gluing_holds_on_both_sides_of_s_zero() {
    let mut rng = rng_from_seed(21);
    for k in 0..20 {
        let spec = generic_spec(&mut rng);
        assert!(check_gluing(&poles(), &spec).unwrap(), "draw {k}");
        let zero_s = spec_with_s([qi(1), qi(-1), qi(0)], &mut rng);
        assert!(check_gluing(&random_poles(&mut rng, 9), &zero_s).unwrap_or_else(|e| matches!(e, PhiError::WrongChart)));
        assert!(check_gluing(&poles(), &zero_s).unwrap(), "draw {k}");
    }
}

#[test]
fn gluing_fails_for_the_wrong_conjugator() {
    let spec = generic_spec(&mut rng_from_seed(5));
    let wrong = [RatFunc::one(), RatFunc::x(), RatFunc::one()];
    assert!(!check_gluing_with(&poles(), &spec, &wrong).unwrap());
}

#[test]
fn ruled_type_follows_s() {
    let mut rng = rng_from_seed(33);
    let product = spec_with_s([qi(1), qi(1), qi(1)], &mut rng);
    let r = ruled_surface_type(&product).unwrap();
    assert_eq!((r.ruled_type, r.splitting), (RuledType::ProductP1P1, vec![-1, -1]));
    let f2 = spec_with_s([qi(1), qi(-1), qi(0)], &mut rng);
    let r = ruled_surface_type(&f2).unwrap();
    assert_eq!((r.ruled_type, r.splitting), (RuledType::HirzebruchF2, vec![0, -2]));
    let halves = spec_with_s([q(1, 2), q(1, 4), q(1, 4)], &mut rng);
    assert_eq!(ruled_surface_type(&halves).unwrap().ruled_type, RuledType::ProductP1P1);
    for _ in 0..10 {
        assert_eq!(ruled_surface_type(&spec_with_s([q(1, 2), q(1, 4), q(1, 4)], &mut rng)).unwrap().ruled_type, RuledType::ProductP1P1);
        assert_eq!(ruled_surface_type(&spec_with_s([q(1, 3), q(-1, 2), q(1, 6)], &mut rng)).unwrap().ruled_type, RuledType::HirzebruchF2);
    }
    assert_eq!(serde_json::to_value(RuledType::HirzebruchF2).unwrap(), "F2");
}

#[test]
fn apparent_at_the_connection_end() {
    let mut rng = rng_from_seed(12);
    let spec = generic_spec(&mut rng);
    assert_eq!(apparent_of_pencil(&poles(), &spec, &q(3, 5), &qi(1), &qi(0)).unwrap(), P1::Finite(qi(1)));
    let (f1, f2) = app_cubics(&poles(), &spec, &qi(2)).unwrap();
    assert_eq!((f1[0].clone(), f2[0].clone()), (qi(6), qi(2) * qi(12)));
    let expected = P1::from_homogeneous(&(qi(6) * qi(0) + qi(24) * qi(1)), &qi(30)).unwrap();
    assert_eq!(apparent_of_pencil(&poles(), &spec, &qi(2), &qi(0), &qi(1)).unwrap(), expected);
}

#[test]
fn apparent_matches_the_normal_form_computation() {
    let mut rng = rng_from_seed(77);
    for k in 0..15 {
        let spec = generic_spec(&mut rng);
        let a = if k == 0 { qi(1) } else { random_nonzero_scalar(&mut rng, 6) };
        let (mu, lambda) = if k == 0 { (qi(1), qi(1)) } else { (random_nonzero_scalar(&mut rng, 5), random_scalar(&mut rng, 5)) };
        let pencil = build_lambda_pencil(&PwChart::A(a.clone()), &poles(), &spec).unwrap();
        let conn = pencil.to_phi_connection(&mu, &lambda).unwrap();
        match apparent_of_pencil(&poles(), &spec, &a, &mu, &lambda) {
            Ok(p) => assert_eq!(apparent_singularity(&conn, None).unwrap(), p, "draw {k}"),
            Err(PhiError::DegeneratePencilPoint) => assert!(apparent_singularity(&conn, None).is_err()),
            Err(e) => panic!("draw {k}: {e}"),
        }
    }
}

#[test]
fn higgs_boundary_is_undefined_at_special_bundles() {
    let spec = generic_spec(&mut rng_from_seed(3));
    for a in [qi(0), qi(-1)] {
        assert!(matches!(apparent_of_pencil(&poles(), &spec, &a, &qi(0), &qi(1)), Err(PhiError::NotDefined)));
    }
}

#[test]
fn pencil_map_needs_nonzero_s() {
    let spec = spec_with_s([qi(1), qi(-1), qi(0)], &mut rng_from_seed(8));
    assert!(matches!(apparent_of_pencil(&poles(), &spec, &qi(2), &qi(1), &qi(1)), Err(PhiError::InvalidParameter(_))));
}

#[test]
fn generic_fibers_have_three_points() {
    let mut rng = rng_from_seed(101);
    let mut seen = 0;
    while seen < 50 {
        let spec = generic_spec(&mut rng);
        let a = random_scalar(&mut rng, 8);
        if a.is_zero() || a == qi(-1) {
            continue;
        }
        seen += 1;
        let target = random_non_pole(&mut rng, &poles(), 20);
        let count = fiber_count_appbun(&poles(), &spec, &a, &target).unwrap();
        assert_eq!(count.with_multiplicity, 3, "{a} {target:?}");
        assert!(count.distinct >= 1 && count.distinct <= 3);
    }
}

#[test]
fn fiber_over_the_connection_end_image() {
    let mut rng = rng_from_seed(55);
    for _ in 0..10 {
        let spec = generic_spec(&mut rng);
        let a = q(7, 3);
        let target = apparent_of_pencil(&poles(), &spec, &a, &qi(1), &qi(0)).unwrap();
        let count = fiber_count_appbun(&poles(), &spec, &a, &target).unwrap();
        assert_eq!(count.with_multiplicity, 3);
        assert!(count.distinct <= 3);
    }
}

#[test]
fn degeneration_identities() {
    let report = degeneration_check(&poles(), &qi(5)).unwrap();
    assert!(report.first, "{report:?}");
    assert!(report.second, "{report:?}");
    let mut rng = rng_from_seed(64);
    for _ in 0..20 {
        let pc = random_poles(&mut rng, 9);
        if !pc.all_finite() {
            continue;
        }
        let q = match random_non_pole(&mut rng, &pc, 30) {
            P1::Finite(q) => q,
            P1::Infinity => continue,
        };
        assert!(degeneration_check(&pc, &q).unwrap().holds(), "{pc:?} {q}");
    }
}

#[test]
fn degeneration_detects_a_wrong_prefactor() {
    let pc = poles();
    let q = qi(5);
    let good = degeneration_check(&pc, &q).unwrap().prefactor;
    assert!(degeneration_second_with(&pc, &q, &good).unwrap());
    assert!(!degeneration_second_with(&pc, &q, &(&good / &qi(4))).unwrap());
    assert!(!degeneration_second_with(&pc, &q, &-&good).unwrap());
    let without_q_minus_t2 = -poles().hprime(2) / (poles().hprime(1) * qi(5) * qi(3));
    assert!(!degeneration_second_with(&pc, &q, &without_q_minus_t2).unwrap());
    assert!(matches!(degeneration_check(&pc, &qi(1)), Err(PhiError::InvalidParameter(_))));
}
