use std::fs;
use std::path::PathBuf;

use sepkit::criteria::Config;
use sepkit::scan::{run_scan, ScanSpec};

fn preset_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../presets")
}

#[test]
fn presets_parse_validate_and_run() {
    let mut paths: Vec<PathBuf> = fs::read_dir(preset_dir())
        .expect("presets directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    assert_eq!(paths.len(), 14, "preset inventory changed: {paths:?}");

    let cfg = Config::default();
    for path in &paths {
        let text = fs::read_to_string(path).unwrap();
        let mut spec = ScanSpec::from_json(&text)
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        spec.validate()
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(spec.grid.len(), 2, "{}: presets plot two axes", path.display());
        for axis in &spec.grid {
            assert_eq!(axis.steps, 400, "{}: preset resolution", path.display());
        }
        assert!(!spec.criteria.is_empty(), "{}", path.display());

        // shrink the grid and prove the whole criteria column set evaluates
        for axis in &mut spec.grid {
            axis.steps = 3;
        }
        let scan = run_scan(&spec, &cfg)
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(scan.rows.len(), 9);
        let mut any_valid = false;
        for row in &scan.rows {
            if row.valid {
                any_valid = true;
                assert!(
                    row.reports.iter().all(|r| r.is_some()),
                    "{}: missing report on a valid point",
                    path.display()
                );
            }
        }
        assert!(any_valid, "{}: grid misses the family domain", path.display());
    }
}
