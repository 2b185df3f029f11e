use std::fs;
use std::path::Path;

use mpw_core::scenarios::config::{BoxConfig, SpinConfig, SCENARIOS};
use mpw_core::verify::{criteria, verify_all, Suite, TOLERANCE_KEYS};
use mpw_core::Error;

fn dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs"))
}

#[test]
fn checked_in_configs_cover_every_scenario() {
    let suite = Suite::load(dir()).unwrap();
    for name in SCENARIOS {
        assert_eq!(suite.file(name).scenario, name);
        assert_eq!(suite.hash(name).len(), 64);
        let known = TOLERANCE_KEYS.iter().find(|(s, _)| *s == name).unwrap().1;
        assert!(suite.file(name).tolerances.keys().all(|k| known.contains(&k.as_str())));
    }
    assert_eq!(suite.file("box").params::<BoxConfig>().unwrap(), BoxConfig::default());
    assert_eq!(suite.file("epr").params::<SpinConfig>().unwrap(), SpinConfig::default());
}

#[test]
fn misspelled_tolerances_and_missing_scenarios_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    for name in SCENARIOS {
        fs::copy(dir().join(format!("{name}.toml")), tmp.path().join(format!("{name}.toml"))).unwrap();
    }
    let path = tmp.path().join("coulomb.toml");
    let text = fs::read_to_string(&path).unwrap().replace("closure =", "closur =");
    fs::write(&path, text).unwrap();
    assert!(matches!(Suite::load(tmp.path()), Err(Error::Config(m)) if m.contains("closur")));
    fs::remove_file(&path).unwrap();
    assert!(matches!(Suite::load(tmp.path()), Err(Error::Config(m)) if m.contains("coulomb")));
}

#[test]
fn filters_select_by_id_suite_and_tag() {
    let ids = |f: &str| criteria().iter().filter(|c| c.matches(Some(f))).map(|c| c.id).collect::<Vec<_>>();
    assert_eq!(ids("harmonic"), vec![4]);
    assert_eq!(ids("3,7"), vec![3, 7]);
    assert_eq!(ids("spectrum"), vec![3, 6, 9]);
    let reports = verify_all(&Suite::load(dir()).unwrap(), Some("algebra"));
    assert_eq!(reports.len(), 1);
    assert!(reports[0].passed);
}
