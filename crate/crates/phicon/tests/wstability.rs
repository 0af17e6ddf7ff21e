use exact_algebra::{q, qi, Scalar};
use phicon::stability::*;
use phicon::PoleConfig;

fn poles() -> PoleConfig {
    PoleConfig::finite(qi(0), qi(1), qi(2)).unwrap()
}

#[test]
fn chart_bundle_stable_at_quarter() {
    let pb = pw_chart_bundle(&poles(), &PwChart::A(qi(2)));
    let v = w_stability_verdict(&pb, &q(1, 4)).unwrap();
    assert!(v.is_stable(), "{v}");
}

#[test]
fn wall_scan() {
    let mut catalog: Vec<(String, ParabolicBundle)> = SpecialBundle::ALL.iter().map(|k| (k.to_string(), special_bundle(&poles(), *k))).collect();
    catalog.push(("a=2".into(), pw_chart_bundle(&poles(), &PwChart::A(qi(2)))));
    catalog.push(("b=3/7".into(), pw_chart_bundle(&poles(), &PwChart::B(q(3, 7)))));
    for (name, pb) in &catalog {
        let mut line = String::new();
        for k in 1..45 {
            let w = Scalar::new(k, 90);
            let v = w_stability_verdict(pb, &w).unwrap();
            line.push(if v.is_stable() { 'S' } else { 'u' });
            if let Some(c) = v.certificate() {
                assert!(verify_w_certificate(pb, c), "{name} {k}");
            }
        }
        println!("{name:>6} {line}");
    }
}
