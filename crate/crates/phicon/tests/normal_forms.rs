use exact_algebra::{q, qi, qpoly, Matrix, QPoly, Scalar};
use phicon::normal_forms::*;
use phicon::stability::alpha_stability_verdict;
use phicon::{PoleConfig, SpectralData, P1};

fn example_spec() -> SpectralData {
    SpectralData::from_rows([[qi(0), qi(1), qi(-1)], [qi(0), qi(0), qi(0)], [qi(2), qi(0), qi(0)]]).unwrap()
}

fn example_poles() -> PoleConfig {
    PoleConfig::finite(qi(0), qi(1), qi(2)).unwrap()
}

#[test]
fn rank3_example_coefficients() {
    let (a12, a13) = rank3_coefficients(&example_poles(), &example_spec(), &P1::Finite(qi(5)), &qi(0), None).unwrap();
    assert_eq!(a12, qpoly(&[4, -8, 4]));
    assert_eq!(a13, QPoly::new(vec![qi(0), q(4, 3), q(-4, 3)]));
}

#[test]
fn rank3_example_residue() {
    let conn = build_rank3(&example_poles(), &example_spec(), &P1::Finite(qi(5)), &qi(0), None).unwrap();
    let res = conn.residue_at_pole(0).unwrap();
    let expected = Matrix::from_rows(vec![
        vec![qi(0), qi(4), qi(0)],
        vec![qi(1), qi(0), qi(0)],
        vec![qi(0), qi(-5), qi(0)],
    ])
    .scale(&q(1, 2));
    assert_eq!(res, expected);
    assert!(conn.check_spectral_identity());
    assert!(conn.check_parabolic_conditions().ok);
}

#[test]
fn rank3_example_is_stable_and_reduces_back() {
    let conn = build_rank3(&example_poles(), &example_spec(), &P1::Finite(qi(5)), &qi(0), None).unwrap();
    assert!(alpha_stability_verdict(&conn).is_stable(), "{}", alpha_stability_verdict(&conn));
    match reduce_to_normal_form(&conn).unwrap() {
        NormalForm::Rank3(nf) => {
            assert_eq!(nf.q, P1::Finite(qi(5)));
            assert_eq!(nf.p, Scalar::zero());
        }
        other => panic!("unexpected {other:?}"),
    }
}
