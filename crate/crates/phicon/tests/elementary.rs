use exact_algebra::{qi, Scalar};
use phicon::bundle::{elementary_transform, BundleConnection};
use phicon::normal_forms::*;
use phicon::random::*;
use phicon::{PhiConnection, PoleConfig};

fn random_connection(poles: &PoleConfig, seed: u64) -> PhiConnection {
    let mut rng = rng_from_seed(seed);
    let spec = random_spec(&mut rng, 20);
    let nf = random_rank3(&mut rng, poles, 20);
    let conn = build_normal_form(poles, &spec, &nf).unwrap();
    conn.gauge_transform(&random_gauge(&mut rng, 5)).unwrap()
}

fn check_all_levels(conn: &PhiConnection) {
    let before = reduce_to_normal_form(conn).unwrap();
    for p in 0..3 {
        for q in 0..=3 {
            let once = elementary_transform(conn, p, q).unwrap();
            assert_eq!(once.degree(), -2 - q as i64);
            assert!(once.spec().fuchs_defect().is_zero());
            assert!(once.check_parabolic_conditions().ok, "p={p} q={q}: {:?}", once.check_parabolic_conditions());
            assert!(once.check_spectral_identity());
            let twice = once.elementary_transform(p, 3 - q).unwrap();
            let back = twice.twist_by_pole(p).unwrap();
            assert_eq!(back.spec(), conn.spec(), "p={p} q={q}");
            let round = back.to_phi_connection().unwrap();
            assert!(round.check_parabolic_conditions().ok);
            assert_eq!(reduce_to_normal_form(&round).unwrap(), before, "p={p} q={q}");
        }
    }
}

#[test]
fn zero_level_is_identity() {
    let conn = random_connection(&PoleConfig::zoi(), 3);
    let b = BundleConnection::from(&conn);
    assert_eq!(b.elementary_transform(1, 0).unwrap(), b);
}

#[test]
fn exponent_shift_rule() {
    let conn = random_connection(&PoleConfig::finite(qi(0), qi(1), qi(2)).unwrap(), 11);
    let nu = conn.spec().nu[0].clone();
    let one = Scalar::one();
    let e1 = elementary_transform(&conn, 0, 1).unwrap();
    assert_eq!(e1.degree(), -3);
    assert_eq!(e1.spec().nu[0], [nu[1].clone(), nu[2].clone(), &nu[0] + &one]);
    let e2 = elementary_transform(&conn, 0, 2).unwrap();
    assert_eq!(e2.spec().nu[0], [nu[2].clone(), &nu[0] + &one, &nu[1] + &one]);
}

#[test]
fn round_trip_finite_poles() {
    let poles = PoleConfig::finite(qi(0), qi(1), qi(2)).unwrap();
    for seed in 0..4 {
        check_all_levels(&random_connection(&poles, 40 + seed));
    }
}

#[test]
fn round_trip_with_pole_at_infinity() {
    for seed in 0..4 {
        check_all_levels(&random_connection(&PoleConfig::zoi(), 60 + seed));
    }
}
