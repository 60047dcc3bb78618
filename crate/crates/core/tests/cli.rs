//! The `rostra` binary: artifacts, exit codes and reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rostra::domain::ShiftSymbol;
use rostra::io::{load_condition_file, StructuredRoster};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data").join(name)
}

fn rostra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rostra")).args(args).output().unwrap()
}

fn input_args() -> Vec<String> {
    vec![
        "--config".into(),
        data("ward_a.toml").display().to_string(),
        "--symbol-map".into(),
        data("symbol_map.toml").display().to_string(),
    ]
}

fn run_night(out: &Path, extra: &[&str]) -> Output {
    let mut args: Vec<String> = vec!["night".into()];
    args.extend(input_args());
    args.extend(["--wishes".into(), data("wishes.csv").display().to_string(), "--out".into(), out.display().to_string()]);
    args.extend(extra.iter().map(|s| s.to_string()));
    rostra(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Timing columns and fields dropped.
fn untimed_trace(csv: &str) -> Vec<String> {
    csv.lines().map(|l| l.split(',').skip(1).collect::<Vec<_>>().join(",")).collect()
}

fn untimed_report(json: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(json).unwrap();
    v["report"].as_object_mut().unwrap().remove("elapsed_s");
    for p in v["report"]["trace"].as_array_mut().unwrap() {
        p.as_object_mut().unwrap().remove("elapsed_s");
    }
    v
}

const BUDGET: [&str; 4] = ["--iterations", "120000", "--seed", "5"];

#[test]
fn night_then_day_writes_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let night = tmp.path().join("night");
    let o = run_night(&night, &BUDGET);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["night_roster.csv", "night_roster.json", "night_report.json", "night_trace.csv", "night_feedback.txt"] {
        assert!(night.join(f).exists(), "{f}");
    }
    assert!(read(&night, "night_trace.csv").starts_with("elapsed_s,"));

    let day = tmp.path().join("day");
    let mut args: Vec<String> = vec!["day".into()];
    args.extend(input_args());
    args.extend(["--edited".into(), night.join("night_roster.json").display().to_string(), "--out".into(), day.display().to_string()]);
    args.extend(BUDGET.iter().map(|s| s.to_string()));
    let o = rostra(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["postprocess.json", "day_roster.csv", "day_report.json", "final_report.txt", "final_report.json"] {
        assert!(day.join(f).exists(), "{f}");
    }
    let (cfg, _) = load_condition_file(&read(&data(""), "ward_a.toml")).unwrap();
    let r = serde_json::from_str::<StructuredRoster>(&read(&day, "day_roster.json")).unwrap().roster;
    for n in 0..r.nurse_count() {
        for d in cfg.calendar.target_range() {
            assert_ne!(r.get(n, d), ShiftSymbol::Unset, "{} {}", r.nurses()[n], r.dates()[d]);
        }
    }
}

#[test]
fn same_seed_same_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(code(&run_night(&a, &BUDGET)), 0);
    assert_eq!(code(&run_night(&b, &BUDGET)), 0);
    for f in ["night_roster.csv", "night_roster.json", "night_feedback.txt"] {
        assert!(read(&a, f) == read(&b, f), "{f} differs");
    }
    assert_eq!(untimed_report(&read(&a, "night_report.json")), untimed_report(&read(&b, "night_report.json")));
    assert_eq!(untimed_trace(&read(&a, "night_trace.csv")), untimed_trace(&read(&b, "night_trace.csv")));
}

#[test]
fn exit_codes_tell_failures_apart() {
    let tmp = tempfile::tempdir().unwrap();

    // a budget far too small to repair the wishes
    let o = run_night(&tmp.path().join("t"), &["--iterations", "50"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(tmp.path().join("t/night_report.json").exists());

    // a previous-month cell left blank is a hard conflict
    let wishes = read(&data(""), "wishes.csv");
    let mut lines: Vec<String> = wishes.lines().map(str::to_string).collect();
    let mut cells: Vec<&str> = lines[1].split(',').collect();
    cells[1] = "";
    lines[1] = cells.join(",");
    let broken = tmp.path().join("broken.csv");
    std::fs::write(&broken, lines.join("\n") + "\n").unwrap();
    let mut args: Vec<String> = vec!["probe".into()];
    args.extend(input_args());
    args.extend(["--wishes".into(), broken.display().to_string(), "--out".into(), tmp.path().display().to_string()]);
    args.extend(["--iterations".into(), "40000".into()]);
    let o = rostra(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("Hn-N-1"), "{stdout}");
    assert!(tmp.path().join("night_probe.json").exists());

    // night with --probe stops before solving
    let mut args: Vec<String> = vec!["night".into(), "--probe".into()];
    args.extend(input_args());
    args.extend(["--wishes".into(), broken.display().to_string(), "--out".into(), tmp.path().join("p").display().to_string()]);
    args.extend(["--iterations".into(), "40000".into()]);
    let o = rostra(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code(&o), 2);
    assert!(!tmp.path().join("p/night_roster.csv").exists());

    // missing input
    let o = rostra(&["night", "--config", "/nonexistent/c.toml", "--wishes", "/nonexistent/w.csv"]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));

    // malformed condition file
    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "this is = = not toml").unwrap();
    let o = rostra(&["night", "--config", bad.to_str().unwrap(), "--wishes", data("wishes.csv").to_str().unwrap()]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn export_writes_programs_and_grids() {
    let tmp = tempfile::tempdir().unwrap();
    for (format, marker) in [("lp", "Subject To"), ("mps", "ROWS"), ("csv", "nurse,"), ("json", "schema_version")] {
        let out = tmp.path().join(format!("w.{format}"));
        let mut args: Vec<String> = vec!["export".into()];
        args.extend(input_args());
        args.extend(["--wishes".into(), data("wishes.csv").display().to_string()]);
        args.extend(["--format".into(), format.into(), "--out".into(), out.display().to_string()]);
        let o = rostra(&args.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(code(&o), 0, "{format}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(read(tmp.path(), &format!("w.{format}")).contains(marker), "{format}");
    }
    let o = rostra(&["export", "--config", data("ward_a.toml").to_str().unwrap(), "--wishes", data("wishes.csv").to_str().unwrap(), "--format", "xls", "--out", "/tmp/x"]);
    assert_eq!(code(&o), 1);
}
