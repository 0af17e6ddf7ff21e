use exact_algebra::{q, qi, qpoly, Matrix, QPoly, Scalar};
use phicon::normal_forms::*;
use phicon::random::*;
use phicon::stability::*;
use phicon::{PhiError, PoleConfig, SpectralData, P1};

fn spec_example() -> SpectralData {
    SpectralData::from_rows([[qi(0), qi(1), qi(-1)], [qi(0), qi(0), qi(0)], [qi(2), qi(0), qi(0)]]).unwrap()
}

fn finite_poles() -> PoleConfig {
    PoleConfig::finite(qi(0), qi(1), qi(2)).unwrap()
}

fn unflagged<'a>(
    poles: &'a PoleConfig,
    tw1: &'a [i64],
    tw2: &'a [i64],
    phi: &'a Matrix<QPoly>,
    n: &'a Matrix<QPoly>,
) -> SplitConnection<'a> {
    SplitConnection { poles, twists1: tw1, twists2: tw2, phi, n, flags: None }
}

fn explicit(gamma: Scalar) -> WeightScheme {
    WeightScheme::ExplicitAlphaGamma { alpha: std::array::from_fn(|_| [q(1, 100), q(2, 100), q(3, 100)]), gamma }
}

#[test]
fn mu_alpha_of_the_whole_pair() {
    let gamma = qi(5);
    let value = mu_alpha(&PairData::whole(-2), &explicit(gamma.clone())).unwrap();
    let sigma = Scalar::new(18, 100);
    assert_eq!(value, (qi(-22) - qi(3) * &gamma + qi(2) * sigma) / qi(6));
}

#[test]
fn mu_alpha_rejects_empty_pair_and_implicit_weights() {
    let empty = PairData { rank1: 0, degree1: 0, incidences1: [[0; 3]; 3], rank2: 0, degree2: 0, incidences2: [[0; 3]; 3] };
    assert!(matches!(mu_alpha(&empty, &explicit(qi(1))), Err(PhiError::InvalidSubobject)));
    assert!(matches!(mu_alpha(&PairData::whole(-2), &WeightScheme::LimitingAlpha), Err(PhiError::InvalidParameter(_))));
}

#[test]
fn gamma_dominates_for_unequal_ranks() {
    let sub = PairData {
        rank1: 2,
        degree1: -2,
        incidences1: [[1, 1, 0]; 3],
        rank2: 1,
        degree2: -1,
        incidences2: [[1, 0, 0]; 3],
    };
    let weights = explicit(qi(1000));
    let whole = mu_alpha(&PairData::whole(-2), &weights).unwrap();
    assert!(mu_alpha(&sub, &weights).unwrap() > whole);
    let swapped = PairData { rank1: 1, rank2: 2, ..sub };
    assert!(mu_alpha(&swapped, &weights).unwrap() < whole);
}

#[test]
fn normal_forms_are_stable_and_certificates_absent() {
    let poles = finite_poles();
    let conn = build_rank3(&poles, &spec_example(), &P1::Finite(qi(5)), &qi(0), None).unwrap();
    assert!(alpha_stability_verdict(&conn).is_stable());
    assert!(alpha_destabilizers(&conn).is_empty());
    assert_eq!(explicit_alpha_check(&conn, &explicit(qi(40))).unwrap(), None);
}

#[test]
fn exceptional_family_degenerates_at_origin() {
    let poles = finite_poles();
    let spec = spec_example();
    let (phi, n) = exceptional_matrices(&poles, &spec, 0, 1, &qi(0), &qi(0)).unwrap();
    let split = unflagged(&poles, &phi::ADAPTED, &phi::ADAPTED, &phi, &n);
    let cert = split.first_destabilizer().expect("(0,0) is unstable");
    assert_eq!((cert.rank, cert.partner.as_ref().unwrap().rank), (2, 1));
    assert!(verify_alpha_certificate(&split, &cert));
    for (mu, eta) in [(qi(1), qi(0)), (qi(0), qi(1)), (qi(2), q(-3, 5))] {
        let (phi, n) = exceptional_matrices(&poles, &spec, 0, 1, &mu, &eta).unwrap();
        let split = unflagged(&poles, &phi::ADAPTED, &phi::ADAPTED, &phi, &n);
        assert!(split.first_destabilizer().is_none(), "({mu}, {eta})");
    }
}

#[test]
fn phi_vanishing_on_trivial_summand_is_unstable() {
    let poles = finite_poles();
    let conn = build_rank3(&poles, &spec_example(), &P1::Finite(qi(5)), &qi(0), None).unwrap();
    let phi = Matrix::diag(vec![QPoly::zero(), QPoly::one(), QPoly::one()]);
    let split = unflagged(&poles, &phi::ADAPTED, &phi::ADAPTED, &phi, conn.n());
    let verdict = alpha_stability_verdict_split(&split).unwrap();
    assert!(verify_alpha_certificate(&split, verdict.certificate().expect("unstable")));
    let kernel = split.destabilizers().into_iter().find(|c| c.label == "phi-kernel").expect("kernel pair");
    assert_eq!((kernel.rank, kernel.degree), (1, 0));

    let zero: Matrix<QPoly> = Matrix::zeros(3, 3);
    let split = unflagged(&poles, &phi::ADAPTED, &phi::ADAPTED, &zero, conn.n());
    assert!(!alpha_stability_verdict_split(&split).unwrap().is_stable());
}

#[test]
fn vanishing_lower_left_entry_breaks_stability() {
    let poles = finite_poles();
    let conn = build_rank3(&poles, &spec_example(), &P1::Finite(qi(5)), &qi(0), None).unwrap();
    let mut n = conn.n().clone();
    n.set(2, 1, QPoly::zero());
    let split = unflagged(&poles, &phi::ADAPTED, &phi::ADAPTED, conn.phi(), &n);
    let cert = split.first_destabilizer().expect("unstable");
    assert_eq!((cert.rank, cert.degree), (2, -1));
    assert_eq!(cert.partner.as_ref().map(|p| (p.rank, p.degree)), Some((2, -1)));
    assert!(verify_alpha_certificate(&split, &cert));
}

/// `E_1 = O(1) ⊕ O(−1) ⊕ O(−2)`: the summand `O(1)` maps into the top summand of `E_2`.
#[test]
fn positive_summand_destabilizes() {
    let poles = PoleConfig::zoi();
    let phi = Matrix::from_rows(vec![
        vec![QPoly::zero(), qpoly(&[1]), qpoly(&[0, 1])],
        vec![QPoly::zero(), qpoly(&[1]), qpoly(&[2])],
        vec![QPoly::zero(), QPoly::zero(), qpoly(&[1])],
    ]);
    let n = Matrix::from_rows(vec![
        vec![qpoly(&[3]), qpoly(&[1, 0, 1]), qpoly(&[0, 0, 0, 1])],
        vec![QPoly::zero(), qpoly(&[2, 1]), qpoly(&[1, 1, 1])],
        vec![QPoly::zero(), qpoly(&[1]), qpoly(&[0, 2])],
    ]);
    let tw1 = [1, -1, -2];
    for tw2 in [[0, -1, -1], [1, -1, -2]] {
        phicon::connection::check_regular(&phi, &n, &poles.h(), &tw1, &tw2, true).unwrap();
        let split = unflagged(&poles, &tw1, &tw2, &phi, &n);
        let verdict = alpha_stability_verdict_split(&split).unwrap();
        let cert = verdict.certificate().expect("unstable");
        assert!(verify_alpha_certificate(&split, cert));
        assert!(!split.catalog_is_complete());
        let found = split.destabilizers();
        assert!(found.iter().any(|c| c.rank == 1 && c.degree == 1), "{tw2:?}");
    }
}

#[test]
fn verdict_is_gauge_invariant() {
    for seed in 0..6 {
        let mut rng = rng_from_seed(500 + seed);
        let poles = if seed % 2 == 0 { finite_poles() } else { PoleConfig::zoi() };
        let spec = random_spec(&mut rng, 12);
        let conn = build_normal_form(&poles, &spec, &random_rank3(&mut rng, &poles, 12)).unwrap();
        let moved = conn.gauge_transform(&random_gauge(&mut rng, 7)).unwrap();
        assert_eq!(alpha_stability_verdict(&conn), alpha_stability_verdict(&moved));
    }
}

#[test]
fn chambers() {
    assert_eq!(chamber_classify(&q(1, 4)).unwrap(), Chamber::ChamberA);
    assert_eq!(chamber_classify(&q(2, 5)).unwrap(), Chamber::ChamberB);
    assert_eq!(chamber_classify(&q(1, 3)).unwrap(), Chamber::Wall(q(1, 3)));
    assert_eq!(chamber_classify(&q(1, 5)).unwrap(), Chamber::Empty);
    assert_eq!(chamber_classify(&q(47, 100)).unwrap(), Chamber::Empty);
    assert!(matches!(chamber_classify(&q(1, 2)), Err(PhiError::InvalidWeight(_))));
    assert!(matches!(chamber_classify(&qi(0)), Err(PhiError::InvalidWeight(_))));
}

#[test]
fn low_weight_is_destabilized_by_the_trivial_summand() {
    let poles = finite_poles();
    let pb = pw_chart_bundle(&poles, &PwChart::A(qi(2)));
    let v = w_stability_verdict(&pb, &q(1, 5)).unwrap();
    let cert = v.certificate().expect("unstable below 2/9");
    assert_eq!((cert.rank, cert.degree), (1, 0));
    assert!(verify_w_certificate(&pb, cert));
}

#[test]
fn special_bundle_p12_breaks_in_chamber_b() {
    let pb = special_bundle(&finite_poles(), SpecialBundle::P12);
    assert!(w_stability_verdict(&pb, &q(1, 4)).unwrap().is_stable());
    assert!(!w_stability_verdict(&pb, &q(3, 8)).unwrap().is_stable());
    let all = w_destabilizers(&pb, &q(3, 8)).unwrap();
    let plane = all.iter().find(|c| c.rank == 2).expect("an O(-1)^2 destabilizer");
    assert_eq!(plane.degree, -2);
    assert!(all.iter().all(|c| verify_w_certificate(&pb, c)));
}

#[test]
fn chart_bundles_are_stable_in_chamber_a() {
    let poles = finite_poles();
    let mut rng = rng_from_seed(77);
    for _ in 0..20 {
        let chart = random_chart_point(&mut rng, 50);
        let pb = pw_chart_bundle(&poles, &chart);
        assert!(w_stability_verdict(&pb, &q(1, 4)).unwrap().is_stable(), "{chart:?}");
    }
}

#[test]
fn the_two_charts_agree_on_the_overlap() {
    let poles = finite_poles();
    let a = qi(2);
    let g = chart_transition(&a).unwrap();
    let from = pw_chart_bundle(&poles, &PwChart::A(a));
    let to = pw_chart_bundle(&poles, &PwChart::B(q(1, 2)));
    assert!(from.maps_to(&to, &g));
    assert!(!from.maps_to(&pw_chart_bundle(&poles, &PwChart::B(q(1, 3))), &g));
    assert!(chart_transition(&qi(0)).is_err());
}

#[test]
fn verdict_serializes_as_tagged_json() {
    let v = serde_json::to_value(Verdict::Stable).unwrap();
    assert_eq!(v, serde_json::json!({"verdict": "stable"}));
    let pb = pw_chart_bundle(&finite_poles(), &PwChart::A(qi(2)));
    let v = serde_json::to_value(w_stability_verdict(&pb, &q(1, 5)).unwrap()).unwrap();
    assert_eq!(v["verdict"], "unstable");
    assert_eq!(v["certificate"]["rank"], 1);
}

mod phi {
    pub const ADAPTED: [i64; 3] = phicon::ADAPTED_TWISTS;
}
