use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hochlab::homology::{EngineOptions, DEFAULT_BUDGET_COLS};
use hochlab::Error;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::scenario::{Context, Scenario, Task};
use crate::tasks::{execute, RunSettings, TaskOutput};

pub const REPORT_FORMAT: &str = "hochlab-report/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Command-line overrides for a run.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
    pub budget_cols: Option<u64>,
    pub dump_matrices: bool,
    /// Run only the task with this index.
    pub only_task: Option<usize>,
}

/// A finished run: the report and everything that goes next to it.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: Value,
    pub exit_code: i32,
    /// `(file name, contents)` for per-task matrices.
    pub artifacts: Vec<(String, String)>,
}

fn task_status(task: &Task, out: &Result<TaskOutput, Error>) -> (&'static str, Value) {
    match out {
        Err(Error::Budget { .. }) => ("budget", Value::Null),
        Err(_) => ("error", Value::Null),
        Ok(o) => match o.verdict {
            None => ("info", Value::Null),
            Some(v) => {
                let verdict = if v { "pass" } else { "fail" };
                let status = if verdict == task.expect().as_str() { "ok" } else { "unexpected" };
                (status, json!(verdict))
            }
        },
    }
}

pub fn run_scenario(scenario: &Scenario, base_dir: &Path, options: &RunOptions) -> Result<RunOutcome, Error> {
    let seed = options.seed.unwrap_or(scenario.seed);
    let budget = options.budget_cols.or(scenario.budget_cols).unwrap_or(DEFAULT_BUDGET_COLS);
    if budget == 0 {
        return Err(Error::InvalidArgument("the column budget must be positive".into()));
    }
    let settings = RunSettings {
        seed,
        opts: EngineOptions {
            budget_cols: budget,
            representatives: true,
        },
        dump_matrices: options.dump_matrices,
    };
    let ctx = Context {
        base_dir: base_dir.to_path_buf(),
        algebra: scenario.algebra.clone(),
        frame: scenario.frame.clone(),
    };
    let selected: Vec<usize> = match options.only_task {
        Some(i) if i >= scenario.tasks.len() => {
            return Err(Error::OutOfRange(format!("task {i} of {}", scenario.tasks.len())))
        }
        Some(i) => vec![i],
        None => (0..scenario.tasks.len()).collect(),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    // results come back in task order whatever the scheduling
    let outputs: Vec<Result<TaskOutput, Error>> = pool.install(|| {
        selected
            .par_iter()
            .map(|&i| execute(&scenario.tasks[i], &ctx, &settings))
            .collect()
    });

    let scenario_algebra = scenario
        .algebra
        .as_ref()
        .map(|r| ctx.resolve(r).map(|a| a.hash().to_string()))
        .transpose()
        .unwrap_or(None);
    let mut tasks = Vec::new();
    let mut artifacts = Vec::new();
    let (mut ok, mut unexpected, mut errors, mut budget_hits, mut info) = (0, 0, 0, 0, 0);
    for (&i, out) in selected.iter().zip(&outputs) {
        let task = &scenario.tasks[i];
        let (status, verdict) = task_status(task, out);
        match status {
            "ok" => ok += 1,
            "unexpected" => unexpected += 1,
            "budget" => budget_hits += 1,
            "error" => errors += 1,
            _ => info += 1,
        }
        let mut entry = json!({
            "index": i,
            "task": task.name(),
            "label": task.label(),
            "module": task.module(),
            "expect": task.expect().as_str(),
            "verdict": verdict,
            "status": status,
            "parameters": serde_json::to_value(task).expect("task serializes"),
        });
        match out {
            Ok(o) => {
                entry["result"] = o.result.clone();
                for (name, text) in &o.artifacts {
                    artifacts.push((format!("{:02}-{}-{name}", i, task.name()), text.clone()));
                }
            }
            Err(e) => {
                entry["error"] = json!({ "module": task.module(), "message": e.to_string() });
            }
        }
        tasks.push(entry);
    }
    let exit_code = if budget_hits > 0 {
        EXIT_BUDGET
    } else if unexpected > 0 || errors > 0 {
        EXIT_VERDICT
    } else {
        EXIT_OK
    };
    let report = json!({
        "format": REPORT_FORMAT,
        "scenario": scenario.name,
        "scenario_hash": scenario.content_hash(),
        "seed": seed,
        "budget_cols": budget,
        "algebra": scenario_algebra,
        "frame": scenario.frame,
        "tasks": tasks,
        "totals": {
            "tasks": selected.len(),
            "ok": ok,
            "unexpected": unexpected,
            "info": info,
            "errors": errors,
            "budget_exceeded": budget_hits,
        },
        "exit_code": exit_code,
    });
    Ok(RunOutcome {
        report,
        exit_code,
        artifacts,
    })
}

/// Canonical text of a JSON document: pretty-printed with a trailing newline.
pub fn to_canonical(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

fn first_witness(result: &Value) -> Option<String> {
    if let Some(n) = result.get("first_failure").and_then(Value::as_u64) {
        return Some(format!("first failing degree {n}"));
    }
    if let Some(f) = result.get("first_failure").filter(|f| f.is_object()) {
        let id = f["identity"].as_str().unwrap_or("?");
        let w = f.get("witness").and_then(Value::as_str).unwrap_or("-");
        return Some(format!("{id} at degree {}: witness {w}", f["parameters"]["degree"]));
    }
    if let Some(p) = result.get("primitive").filter(|p| p["found"] == false) {
        return Some(format!("no primitive: pairing {} with cycle {}", p["pairing"], p["cycle"]));
    }
    None
}

/// Human-readable summary, computed only from the report.
pub fn summary(report: &Value) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scenario {} (seed {})", report["scenario"].as_str().unwrap_or("?"), report["seed"]);
    for t in report["tasks"].as_array().into_iter().flatten() {
        let name = match t["label"].as_str() {
            Some(l) => format!("{} [{l}]", t["task"].as_str().unwrap_or("?")),
            None => t["task"].as_str().unwrap_or("?").to_string(),
        };
        let status = t["status"].as_str().unwrap_or("?");
        let line = match status {
            "info" => "INFO".to_string(),
            "budget" | "error" => format!("{}  {}", status.to_uppercase(), t["error"]["message"].as_str().unwrap_or("")),
            _ => {
                let verdict = t["verdict"].as_str().unwrap_or("?").to_uppercase();
                let tag = if status == "ok" { "" } else { "  UNEXPECTED" };
                format!("{verdict} (expected {}){tag}", t["expect"].as_str().unwrap_or("?"))
            }
        };
        let _ = writeln!(s, "  #{:<2} {name:<28} {line}", t["index"]);
        if let Some(dims) = t["result"].get("dims") {
            let _ = writeln!(s, "       dims {dims}");
        }
        if t["verdict"] == "fail" {
            if let Some(w) = first_witness(&t["result"]) {
                let _ = writeln!(s, "       {w}");
            }
        }
    }
    let totals = &report["totals"];
    let _ = writeln!(
        s,
        "{} tasks: {} ok, {} unexpected, {} info, {} errors, {} over budget; exit {}",
        totals["tasks"], totals["ok"], totals["unexpected"], totals["info"], totals["errors"], totals["budget_exceeded"],
        report["exit_code"]
    );
    s
}

/// Writes `report.json`, one JSON file per task, `summary.txt` and any
/// artifacts under `dir`. Returns the paths written, in order.
pub fn write_outputs(outcome: &RunOutcome, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |path: PathBuf, text: &str| -> std::io::Result<()> {
        if let Some(p) = path.parent() {
            std::fs::create_dir_all(p)?;
        }
        std::fs::write(&path, text)?;
        written.push(path);
        Ok(())
    };
    put(dir.join("report.json"), &to_canonical(&outcome.report))?;
    for t in outcome.report["tasks"].as_array().into_iter().flatten() {
        let name = format!("{:02}-{}.json", t["index"].as_u64().unwrap_or(0), t["task"].as_str().unwrap_or("task"));
        put(dir.join("tasks").join(name), &to_canonical(t))?;
    }
    put(dir.join("summary.txt"), &summary(&outcome.report))?;
    for (name, text) in &outcome.artifacts {
        put(dir.join("matrices").join(name), text)?;
    }
    Ok(written)
}
