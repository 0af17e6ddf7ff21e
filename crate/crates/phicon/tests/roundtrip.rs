use exact_algebra::{qi, Scalar};
use phicon::normal_forms::*;
use phicon::random::*;
use phicon::stability::alpha_stability_verdict;
use phicon::{PoleConfig, P1};

fn check_round_trip(poles: &PoleConfig, seed: u64) {
    let mut rng = rng_from_seed(seed);
    let spec = random_spec(&mut rng, 20);
    let nf = random_rank3(&mut rng, poles, 20);
    let conn = build_normal_form(poles, &spec, &nf).unwrap();
    assert!(conn.check_parabolic_conditions().ok);
    assert!(alpha_stability_verdict(&conn).is_stable(), "seed {seed}: {}", alpha_stability_verdict(&conn));
    let g = random_gauge(&mut rng, 9);
    let moved = conn.gauge_transform(&g).unwrap();
    let back = reduce_to_normal_form(&moved).unwrap();
    let (NormalForm::Rank3(a), NormalForm::Rank3(b)) = (&nf, &back) else { panic!("seed {seed}: {back:?}") };
    assert_eq!((&a.q, &a.p), (&b.q, &b.p), "seed {seed}");
    assert_eq!(apparent_singularity(&moved, None).unwrap(), a.q);
}

#[test]
fn rank3_round_trip_finite_poles() {
    let poles = PoleConfig::finite(qi(0), qi(1), qi(2)).unwrap();
    for seed in 0..15 {
        check_round_trip(&poles, seed);
    }
}

#[test]
fn rank3_round_trip_zoi() {
    for seed in 0..15 {
        check_round_trip(&PoleConfig::zoi(), seed);
    }
}

#[test]
fn exceptional_round_trip() {
    for poles in [PoleConfig::finite(qi(0), qi(1), qi(2)).unwrap(), PoleConfig::zoi()] {
        for seed in 0..20 {
            let mut rng = rng_from_seed(100 + seed);
            let spec = random_spec(&mut rng, 20);
            let c = random_exceptional(&mut rng, 20);
            let conn = build_exceptional(&poles, &spec, &c).unwrap();
            assert!(conn.check_parabolic_conditions().ok);
            assert!(alpha_stability_verdict(&conn).is_stable(), "seed {seed} {c:?}: {}", alpha_stability_verdict(&conn));
            let moved = conn.gauge_transform(&random_gauge(&mut rng, 9)).unwrap();
            assert_eq!(reduce_to_normal_form(&moved).unwrap(), NormalForm::Exceptional(c.clone()), "seed {seed}");
            assert_eq!(&apparent_singularity(&moved, None).unwrap(), poles.pole(c.pole));
        }
    }
}

#[test]
fn rank2_round_trip() {
    for poles in [PoleConfig::finite(qi(0), qi(1), qi(2)).unwrap(), PoleConfig::zoi()] {
        for seed in 0..20 {
            let mut rng = rng_from_seed(200 + seed);
            let spec = random_spec(&mut rng, 20);
            let i = (seed % 3) as usize;
            let p = random_scalar(&mut rng, 20);
            if (0..3).any(|j| poles.special_p(&spec, i, j) == p) {
                continue;
            }
            let conn = build_rank2(&poles, &spec, i, &p).unwrap();
            assert!(conn.check_parabolic_conditions().ok);
            assert!(alpha_stability_verdict(&conn).is_stable(), "seed {seed}: {}", alpha_stability_verdict(&conn));
            let moved = conn.gauge_transform(&random_gauge(&mut rng, 9)).unwrap();
            assert_eq!(reduce_to_normal_form(&moved).unwrap(), NormalForm::Rank2 { pole: i, p: p.clone() }, "seed {seed}");
        }
    }
}

#[test]
fn rank1_round_trip() {
    for poles in [PoleConfig::finite(qi(0), qi(1), qi(2)).unwrap(), PoleConfig::zoi()] {
        let mut rng = rng_from_seed(7);
        let spec = random_spec(&mut rng, 20);
        let (i, q) = canonical_rank1(&poles);
        let conn = build_rank1(&poles, &spec, i, &q).unwrap();
        assert!(conn.check_parabolic_conditions().ok);
        assert!(alpha_stability_verdict(&conn).is_stable());
        let moved = conn.gauge_transform(&random_gauge(&mut rng, 9)).unwrap();
        assert_eq!(reduce_to_normal_form(&moved).unwrap(), NormalForm::Rank1 { pole: i, q });
        let _ = Scalar::zero();
        let _ = P1::Infinity;
    }
}
