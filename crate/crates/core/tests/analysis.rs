use std::sync::Arc;

use bowen_series::analysis::{
    analyze, hyperbolic_alpha, markov_check, surjectivity_empirical, surjectivity_predicate,
    AlphaSpec, AnalysisOptions, MarkovVerdict, SurjectivityReason,
};
use bowen_series::dynamics::{deformed_map, matching_sets};
use bowen_series::geometry::CircleArc;
use bowen_series::group::{build_domain, Signature};
use bowen_series::net::{build_net, NetData};
use bowen_series::{Error, Mp, Real, Tolerances};

fn net(m: [u32; 3]) -> Arc<NetData<Mp>> {
    let tol = Tolerances::default();
    let fd = build_domain::<Mp>(Signature::new(m[0], m[1], m[2]).unwrap(), &tol).unwrap();
    Arc::new(build_net(&fd, &tol).unwrap())
}

fn sig(m: [u32; 3]) -> Signature {
    Signature::new(m[0], m[1], m[2]).unwrap()
}

#[test]
fn non_surjective_reference_alpha() {
    let tol = Tolerances::default();
    let n = net([4, 4, 3]);
    let word = "3,2,4,1,3,1,4,1,3,2,2,3,1,4".parse().unwrap();
    let a = hyperbolic_alpha(&n, &word, None, &tol).unwrap();
    assert!([2, 4].contains(&a.overlap));
    assert_eq!(n.n(a.overlap as isize), 2);
    let m1 = matching_sets(&n, a.overlap, 200, 1e-6, &tol).unwrap().entries[0].arc.clone();
    assert!(!m1.contains(&a.alpha, 0.0));
    let (pred, reason) = surjectivity_predicate(&n, a.overlap, &a.alpha, &m1, &tol);
    assert!(!pred);
    assert_eq!(reason, SurjectivityReason::None);

    let map = deformed_map(n.clone(), a.alpha.clone(), tol.branch::<Mp>()).unwrap();
    let cov = surjectivity_empirical(&map, &tol);
    assert!(!cov.surjective);
    // the missing arc lies in the image of the differing interval under the
    // replaced generator
    let d = map.deformation.as_ref().unwrap().arc.clone();
    let t = n.domain.generator(a.overlap as isize);
    let lost = CircleArc::new(t.apply_boundary(&d.left), t.apply_boundary(&d.right));
    for gap in &cov.gaps {
        assert!(lost.contains_arc(gap, 1e-9));
    }
}

#[test]
fn opposite_fan_clause() {
    let tol = Tolerances::default();
    let n = net([4, 6, 2]);
    let m1 = matching_sets(&n, 4, 200, 1e-6, &tol).unwrap().entries[0].arc.clone();
    for k in 1..10 {
        let alpha = n.overlap(4).at_fraction(k as f64 / 10.0);
        let (pred, reason) = surjectivity_predicate(&n, 4, &alpha, &m1, &tol);
        assert!(pred);
        assert_eq!(reason, SurjectivityReason::OppositeLongFan);
        let map = deformed_map(n.clone(), alpha, tol.branch::<Mp>()).unwrap();
        assert!(surjectivity_empirical(&map, &tol).surjective);
    }
}

#[test]
fn generic_alpha_is_not_certified() {
    let tol = Tolerances::default();
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    for m in [[6, 6, 3], [4, 4, 3]] {
        let n = net(m);
        for i in 1..=4 {
            let alpha = n.overlap(i).at_fraction(golden);
            let map = deformed_map(n.clone(), alpha, tol.branch::<Mp>()).unwrap();
            let v = markov_check(&map, &Default::default(), &tol).unwrap();
            assert!(matches!(v, MarkovVerdict::NotMarkovWithinCap { .. }), "{m:?} O{i}");
        }
    }
}

#[test]
fn report_for_reference_words() {
    let opts = AnalysisOptions::default();
    let r = analyze::<Mp>(
        sig([6, 6, 3]),
        &AlphaSpec::Word("4,4,2,2,3,1,4,4,1,4,4,4".parse().unwrap()),
        &opts,
    )
    .unwrap();
    assert_eq!(r.alpha.overlap, 4);
    assert!(r.alpha.angle > r.matching.m1[0] && r.alpha.angle < r.matching.m1[1]);
    assert!(r.surjective.predicate && r.surjective.empirical);
    assert!(r.markov.verdict);
    assert_eq!(r.aperiodic.verdict, Some(true));

    let r = analyze::<Mp>(
        sig([4, 4, 3]),
        &AlphaSpec::Word("3,2,4,1,3,1,4,1,3,2,2,3,1,4".parse().unwrap()),
        &opts,
    )
    .unwrap();
    assert!(r.markov.verdict);
    assert!(!r.surjective.empirical);
    assert_eq!(r.aperiodic.verdict, Some(false));
    let json = serde_json::to_value(&r).unwrap();
    for key in ["signature", "alpha", "surjective", "markov", "aperiodic", "matching"] {
        assert!(json.get(key).is_some(), "{key}");
    }
    assert!(json["markov"]["W_alpha_size"].is_u64());
    assert!(json["matching"]["M1"].is_array());
}

#[test]
fn alpha_at_overlap_start_reproduces_the_base_map() {
    let opts = AnalysisOptions::default();
    let n = net([6, 6, 3]);
    let start = n.overlap(4).left.to_f64();
    let r = analyze::<Mp>(sig([6, 6, 3]), &AlphaSpec::Angle(start), &opts).unwrap();
    assert!(r.markov.verdict);
    assert_eq!(r.markov.w_alpha_size, Some(n.w.len()));
    assert_eq!(r.aperiodic.verdict, Some(true));
}

#[test]
fn alpha_outside_every_overlap_is_rejected() {
    let opts = AnalysisOptions::default();
    let n = net([6, 6, 3]);
    let inside_a = n.a_region(1).midpoint().angle().to_f64();
    let err = analyze::<Mp>(sig([6, 6, 3]), &AlphaSpec::Angle(inside_a), &opts).unwrap_err();
    assert!(matches!(err, Error::AlphaOutsideOverlap(_)));
}
