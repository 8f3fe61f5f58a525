//! Reports for the bundled scenarios are compared byte for byte with the
//! checked-in files under `tests/golden`. Set `HOCHLAB_UPDATE_GOLDEN=1` to
//! rewrite them.

use std::path::{Path, PathBuf};
use std::process::Command;

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn report(scenario: &Path, jobs: usize) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_hochlab"))
        .args(["--jobs", &jobs.to_string(), "--json", "run"])
        .arg(scenario)
        .output()
        .expect("binary runs");
    (String::from_utf8(out.stdout).unwrap(), out.status.code().unwrap_or(-1))
}

fn scenarios() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(workspace().join("scenarios"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    v.sort();
    v
}

#[test]
fn bundled_scenarios_match_golden_reports_for_any_job_count() {
    let golden_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let update = std::env::var_os("HOCHLAB_UPDATE_GOLDEN").is_some();
    let all = scenarios();
    assert!(all.len() >= 10);
    for path in all {
        let name = path.file_name().unwrap();
        let (one, code_one) = report(&path, 1);
        let (eight, code_eight) = report(&path, 8);
        assert_eq!(code_one, 0, "{name:?} exit code");
        assert_eq!(code_eight, 0, "{name:?} exit code");
        assert!(one == eight, "{name:?}: --jobs 1 and --jobs 8 differ");
        let golden = golden_dir.join(name);
        if update {
            std::fs::write(&golden, &one).unwrap();
            continue;
        }
        let expected = std::fs::read_to_string(&golden).unwrap_or_else(|_| panic!("missing golden {golden:?}"));
        assert!(one == expected, "{name:?} differs from its golden report");
    }
}

#[test]
fn golden_reports_are_consistent() {
    for path in scenarios() {
        let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(path.file_name().unwrap());
        let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(golden).unwrap()).unwrap();
        assert_eq!(r["format"], "hochlab-report/1");
        assert_eq!(r["exit_code"], 0);
        let tasks = r["tasks"].as_array().unwrap();
        assert_eq!(r["totals"]["tasks"].as_u64().unwrap() as usize, tasks.len());
        assert_eq!(r["totals"]["unexpected"], 0);
        for t in tasks {
            assert!(matches!(t["status"].as_str(), Some("ok" | "info")), "{}", t["task"]);
        }
    }
}
