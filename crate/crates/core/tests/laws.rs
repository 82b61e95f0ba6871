use polyagg::config::WorkspaceConfig;
use polyagg::laws::{case_seed, replay_case, run_suite, run_suite_with, suites};
use polyagg::Error;

#[test]
fn documented_runs_pass() {
    let cfg = WorkspaceConfig::default();
    let r = run_suite("poly-monoidal", 1, Some(200), &cfg).unwrap();
    assert!(r.passed(), "{r}");
    assert_eq!(r.cases, 200);
    let r = run_suite("aggregation-coherence", 7, Some(100), &cfg).unwrap();
    assert!(r.passed(), "{r}");
    assert_eq!(r.suite, "aggregation-coherence");
}

#[test]
fn every_suite_runs_a_few_cases() {
    let cfg = WorkspaceConfig::default();
    for s in suites() {
        let r = run_suite(s.name, 12, Some(3), &cfg).unwrap();
        assert_eq!(r.passed(), s.name != "self-test", "{r}");
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let cfg = WorkspaceConfig::default();
    for name in ["comonoid", "duality", "bicomodule-composition"] {
        let a = run_suite(name, 99, Some(12), &cfg).unwrap().to_json().to_string();
        let b = run_suite(name, 99, Some(12), &cfg).unwrap().to_json().to_string();
        assert_eq!(a, b);
        assert!(!a.contains("elapsed"));
    }
}

#[test]
fn any_suite_fails_under_the_mutated_oracle() {
    let cfg = WorkspaceConfig::default();
    for name in ["duality", "aggregation", "query"] {
        let r = run_suite_with(name, 4, Some(3), &cfg, true).unwrap();
        assert!(r.mutated);
        assert_eq!(r.failures.len(), 3, "{r}");
        let f = &r.failures[0];
        assert_eq!(f.code, "law-violation");
        assert!(f.law.is_some() && f.location.is_some());
        assert_eq!(f.seed, case_seed(4, 0));
    }
    let r = run_suite("self-test", 1, None, &cfg).unwrap();
    assert!(!r.passed());
    assert!(r.render_table().contains("FAIL case 0"));
    assert!(replay_case("self-test", 0, r.failures[0].seed, &cfg).is_err());
}

#[test]
fn unknown_suites_and_bad_configs_are_errors() {
    let cfg = WorkspaceConfig::default();
    assert!(matches!(run_suite("nope", 1, None, &cfg), Err(Error::UnknownSuite(_))));
    let bad = WorkspaceConfig { cap: 0, ..cfg };
    assert!(run_suite("duality", 1, Some(1), &bad).is_err());
}
