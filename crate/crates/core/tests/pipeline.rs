use std::fs;

use monotest::harness::{generate, run_suite, write_csv, Certification, Family, SuiteConfig, SuiteResult};
use monotest::tester::run_mono_test;
use monotest::{build_schedule, verify_certificate, AntiMonotoneEdge, Error, LtfSpec, Oracle, Point, Profile, SeedKey};

#[test]
fn instance_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    fs::write(&path, r#"{"n":3,"weights":[1.0,-1.0,2.5],"theta":0.5}"#).unwrap();
    let spec = LtfSpec::load(&path).unwrap();
    assert_eq!(spec.weights(), &[1.0, -1.0, 2.5]);
    spec.save(&path).unwrap();
    assert_eq!(LtfSpec::load(&path).unwrap(), spec);
}

#[test]
fn instance_with_wrong_n_is_rejected() {
    let err = LtfSpec::from_json(r#"{"n":4,"weights":[1.0,2.0],"theta":0.0}"#).unwrap_err();
    assert!(matches!(err, Error::Parse(_)), "{err}");
}

#[test]
fn certificate_json_shape() {
    let cert = AntiMonotoneEdge::new(Point::parse_sign_string("+-+").unwrap(), 1).unwrap();
    let v: serde_json::Value = serde_json::from_str(&cert.to_json()).unwrap();
    assert_eq!(v, serde_json::json!({"point": "+-+", "coordinate": 1}));
    let back: AntiMonotoneEdge = serde_json::from_value(v).unwrap();
    assert_eq!(back, cert);
}

#[test]
fn far_instance_end_to_end() {
    let inst = generate(&Family::SignedMajority { k: 1 }, 9, 5, Certification::for_epsilon(0.1)).unwrap();
    assert_eq!(inst.distance.count, Some(70));
    let sched = build_schedule(9, 0.05, Profile::Practical).unwrap();
    let mut rejected = 0;
    for seed in 0..10 {
        let f = Oracle::ltf(inst.spec.clone());
        let report = run_mono_test(&f, &sched, &mut SeedKey::new(seed).rng()).unwrap();
        assert_eq!(report.ledger.total, f.queries());
        if let Some(cert) = report.verdict.certificate() {
            assert!(verify_certificate(&f.fresh_root(), cert).unwrap());
            rejected += 1;
        }
    }
    assert!(rejected >= 8, "{rejected}/10");
}

#[test]
fn monotone_instances_are_accepted() {
    for seed in 0..8 {
        let inst = generate(&Family::MonotoneRandom, 24, seed, Certification::for_epsilon(0.1)).unwrap();
        let sched = build_schedule(24, 0.1, Profile::Practical).unwrap();
        let f = Oracle::ltf(inst.spec);
        let report = run_mono_test(&f, &sched, &mut SeedKey::new(seed).rng()).unwrap();
        assert!(report.verdict.is_monotone(), "{:?}", report.verdict);
    }
}

#[test]
fn suite_output_is_reproducible_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = SuiteConfig::new(Family::PlantedNegativeMass { lambda: 0.3, dist: monotest::harness::WeightDist::HalfNormal }, vec![12, 40], 4, 0.1);
    cfg.master_seed = 99;
    let mut files = Vec::new();
    for run in 0..2 {
        let res = run_suite(&cfg).unwrap();
        let path = dir.path().join(format!("run{run}.csv"));
        write_csv(&res.records, fs::File::create(&path).unwrap()).unwrap();
        files.push(fs::read(&path).unwrap());
        let json = res.to_json();
        let back: SuiteResult = serde_json::from_str(&json).unwrap();
        assert_eq!(back.records, res.records);
        assert_eq!(res.summary.hard_violations, 0);
    }
    assert_eq!(files[0], files[1]);
}
