use std::path::{Path, PathBuf};

use amalgamkit::mtxio::{fetch_generators, DataManifest, FetchOptions};
use amalgamkit::scenarios::{verify_all, ClaimTable, Report, ScenarioConfig, ScenarioId, Status};

const DIVISOR_AMBIGUOUS: [&str; 3] = ["S0.order.y2", "S0.order.y9", "S0.order.y10"];
const KNOWN_RED: [&str; 1] = ["S3.cover.conjugators.l32"];

fn populated_cache() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let opts = FetchOptions {
        cache_dir: dir.path().to_path_buf(),
        data_root: Some(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")),
        base_url: String::new(),
        offline: true,
        retries: 1,
    };
    for entry in &DataManifest::shipped().entries {
        fetch_generators(entry, &opts, None).unwrap();
    }
    dir
}

fn run(dir: Option<PathBuf>, scenarios: &[ScenarioId]) -> Report {
    let cfg = ScenarioConfig { data_dir: dir, offline: true, scenarios: scenarios.to_vec(), ..Default::default() };
    verify_all(&cfg).unwrap()
}

#[test]
fn full_run_with_vendored_data() {
    let cache = populated_cache();
    let report = run(Some(cache.path().to_path_buf()), &ScenarioId::ALL);
    assert_eq!(report.claims.len(), ClaimTable::shipped().claims().len());
    for c in &report.claims {
        let expected = if DIVISOR_AMBIGUOUS.contains(&c.id.as_str()) {
            Status::DivisorAmbiguous
        } else if KNOWN_RED.contains(&c.id.as_str()) {
            Status::Fail
        } else {
            Status::Pass
        };
        assert_eq!(c.status, expected, "{} computed {:?}", c.id, c.computed);
    }
}

#[test]
fn empty_cache_skips_data_claims() {
    let empty = tempfile::tempdir().unwrap();
    let report = run(Some(empty.path().to_path_buf()), &ScenarioId::ALL);
    assert_eq!(report.failures(), 0);
    let data_prefixes = ["S0.order.", "S1.co1.", "S2.co1.", "S2.a7.", "S2.agree", "S3.co1.", "S3.a7.", "S3.cover."];
    for c in &report.claims {
        let needs_data = data_prefixes.iter().any(|p| c.id.starts_with(p));
        let expected = if needs_data { Status::SkippedNoData } else { Status::Pass };
        assert_eq!(c.status, expected, "{}", c.id);
    }
    assert!(report.count(Status::Pass) < report.claims.len());
}

#[test]
fn reports_are_deterministic() {
    let cache = populated_cache();
    let a = run(Some(cache.path().to_path_buf()), &ScenarioId::ALL).to_json(false);
    let b = run(Some(cache.path().to_path_buf()), &ScenarioId::ALL).to_json(false);
    assert_eq!(a, b);
}

#[test]
fn amalgam_scenario_needs_no_data() {
    let report = run(None, &[ScenarioId::S4]);
    assert!(report.claims.iter().all(|c| c.status == Status::Pass));
    assert!(report.claims.iter().all(|c| c.id.starts_with("S4.")));
}

#[test]
fn scenario_ids_parse_strictly() {
    assert_eq!("s2".parse::<ScenarioId>().unwrap(), ScenarioId::S2);
    assert!("S9".parse::<ScenarioId>().is_err());
    let none = ScenarioConfig { scenarios: Vec::new(), ..Default::default() };
    assert!(verify_all(&none).is_err());
}

#[test]
fn claim_table_is_well_formed() {
    let table = ClaimTable::shipped();
    for c in table.claims() {
        assert!(!c.statement.trim().is_empty(), "{}", c.id);
        assert!(["published", "derived", "trivial"].contains(&c.origin.as_str()), "{}", c.id);
    }
    assert!(table.get("S1.phi7.factors").is_some());
}
