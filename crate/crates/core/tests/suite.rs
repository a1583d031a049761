use std::collections::BTreeSet;

use nls_scatter::report::{read_records_csv, CSV_HEADER};
use nls_scatter::suite::{anchor, run_groups, CheckGroup, Context};
use nls_scatter::{run_suite, SuiteConfig, SuiteName, SuiteReport};

fn coarse() -> SuiteConfig {
    let mut cfg = SuiteConfig::default();
    for kv in ["grid.n=2048", "potentials=zero;sech", "lambda.n=17"] {
        cfg.set_pair(kv).unwrap();
    }
    cfg
}

#[test]
fn every_anchor_is_covered_by_the_full_suite() {
    let report = run_suite(SuiteName::All, &coarse()).unwrap();
    let seen: BTreeSet<&str> = report.records.iter().map(|r| r.anchor.as_str()).collect();
    for a in anchor::ALL {
        assert!(seen.contains(a), "no record for `{a}`");
    }
    for g in CheckGroup::ALL {
        let prefix = format!("{}/{}/", g.suite().name(), g.name());
        assert!(report.records.iter().any(|r| r.id.starts_with(&prefix)), "{prefix}");
    }
    // ids are unique and sorted
    assert!(report.records.windows(2).all(|w| w[0].id < w[1].id));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let groups = [CheckGroup::Unitarity, CheckGroup::Involutions, CheckGroup::Velocities, CheckGroup::Kernels];
    let run = || {
        let ctx = Context::new(coarse()).unwrap();
        let r = run_groups("mixed", &groups, &ctx).unwrap();
        let mut json = Vec::new();
        r.write_json(&mut json).unwrap();
        let mut csv = Vec::new();
        r.write_csv(&mut csv).unwrap();
        (json, csv, r)
    };
    let (j1, c1, r1) = run();
    let (j2, c2, _) = run();
    assert_eq!(j1, j2);
    assert_eq!(c1, c2);

    let back = SuiteReport::read_json(j1.as_slice()).unwrap();
    assert_eq!(back.records, r1.records);
    let text = String::from_utf8(c1.clone()).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(read_records_csv(c1.as_slice()).unwrap(), r1.records);
}

#[test]
fn a_different_seed_changes_only_sampled_checks() {
    let mut other = coarse();
    other.set("seed", "7").unwrap();
    let ctx = |c: SuiteConfig| Context::new(c).unwrap();
    let a = run_groups("u", &[CheckGroup::Unitarity], &ctx(coarse())).unwrap();
    let b = run_groups("u", &[CheckGroup::Unitarity], &ctx(other)).unwrap();
    assert_eq!(a.records, b.records);
}

#[test]
fn config_round_trips_through_text() {
    let mut cfg = coarse();
    cfg.set("tol.unitarity", "3e-9").unwrap();
    cfg.set("bracket.pairs", "0.5+1i:1+0.5i; -0.2+0.7i:0.3+1.1i").unwrap();
    let back = SuiteConfig::from_kv_str(&cfg.to_kv_string()).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.tol("unitarity"), 3e-9);
}

#[test]
fn configuration_errors_are_reported_before_running() {
    assert!(SuiteConfig::from_kv_str("grid.n = 2\n").is_err());
    assert!(SuiteConfig::from_kv_str("seed = 1\nseed = 2\n").is_err());
    let mut cfg = coarse();
    cfg.set("potentials", "sech:A=0.5;nope").unwrap();
    assert!(run_suite(SuiteName::Scattering, &cfg).is_err());
    assert!("everything".parse::<SuiteName>().is_err());
}
