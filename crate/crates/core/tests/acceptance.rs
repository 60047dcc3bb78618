//! One PASS/FAIL line per acceptance criterion. Runs without the test
//! harness; the process fails when any criterion fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use chrono::NaiveDate;
use common::{catalog_cases, epigraph, flow, incremental, monotone, probe_cases};
use rostra::catalog::{epigraph_members, ConstraintId, Kind};
use rostra::domain::{DayClass, Stage};
use rostra::encoder::{encode_stage, lp};
use rostra::pipeline::{Session, SolverChoice};
use rostra::solver::{ExactOptions, HeuristicOptions, SolveStatus};
use rostra::synth;

type Outcome = Result<String, String>;

fn need_cbc() -> Result<(), String> {
    if common::cbc_available() {
        Ok(())
    } else {
        Err("CBC binary not found (set ROSTRA_CBC or put cbc on PATH)".into())
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn caught<T>(f: impl FnOnce() -> T) -> Result<T, String> {
    panic::catch_unwind(AssertUnwindSafe(f)).map_err(|p| {
        p.downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into())
    })
}

fn oracle() -> Outcome {
    need_cbc()?;
    let start = Instant::now();
    let (mut feasible, mut infeasible, mut night, mut day) = (0, 0, 0, 0);
    let mut seed = 0;
    while feasible < 50 {
        ensure(seed < 1000, || format!("only {feasible} feasible instances in {seed} seeds"))?;
        let o = common::oracle_compare(seed, 100_000);
        match o.brute {
            Some(b) => {
                ensure(o.exact == Some(b) && o.evaluated == Some(b) && o.status == SolveStatus::Optimal, || {
                    format!("seed {seed} ({}): brute {b} exact {:?} evaluated {:?} {}", o.stage, o.exact, o.evaluated, o.status)
                })?;
                feasible += 1;
                match o.stage {
                    Stage::Night => night += 1,
                    Stage::Day => day += 1,
                }
            }
            None => {
                ensure(o.status == SolveStatus::InfeasibleHard, || {
                    format!("seed {seed}: enumeration found no feasible roster, solver says {}", o.status)
                })?;
                infeasible += 1;
            }
        }
        seed += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 300.0, || format!("took {secs:.0}s"))?;
    Ok(format!(
        "{feasible} feasible instances ({night} night, {day} day) agree exactly, {infeasible} infeasible agree, {secs:.1}s"
    ))
}

fn catalog() -> Outcome {
    let mut failed = Vec::new();
    for (name, case) in catalog_cases::CASES {
        if let Err(e) = caught(case) {
            failed.push(format!("{name}: {}", e.lines().next().unwrap_or("")));
        }
    }
    ensure(failed.is_empty(), || failed.join("; "))?;
    let all = catalog_cases::catalog();
    let missing: Vec<String> = all.difference(&catalog_cases::covered()).map(|i| i.to_string()).collect();
    ensure(missing.is_empty(), || format!("no fixture for {missing:?}"))?;
    Ok(format!("{} cases cover all {} entries (14+35+9+34 plus 4 care-worker variants)", catalog_cases::CASES.len(), all.len()))
}

fn edit_monotonicity() -> Outcome {
    need_cbc()?;
    let outcomes = caught(|| monotone::run(20))?;
    let bad: Vec<u64> = outcomes.iter().filter(|o| !o.holds()).map(|o| o.seed).collect();
    ensure(bad.is_empty(), || format!("violated on seeds {bad:?}"))?;
    let edits: usize = outcomes.iter().map(|o| o.perturbed.len()).sum();
    let raised: usize = outcomes.iter().map(|o| o.perturbed.iter().filter(|&&z| z > o.optimum).count()).sum();
    ensure(raised > 0, || "no perturbation changed any objective".into())?;
    Ok(format!("{} wards, {edits} feasible perturbations ({raised} raised the optimum), empty and self-pinned edits equal", outcomes.len()))
}

fn probe() -> Outcome {
    let (night, day) = (probe_cases::night_cases(), probe_cases::day_cases());
    caught(|| probe_cases::locate_all(Stage::Night, &night))?;
    caught(|| probe_cases::locate_all(Stage::Day, &day))?;
    let mut ids: Vec<ConstraintId> = night.iter().chain(&day).map(|c| c.id).collect();
    ids.sort();
    ids.dedup();
    ensure(ids.len() == 23, || format!("{} families injected", ids.len()))?;
    need_cbc()?;
    let clean = caught(|| probe_cases::clean_wishes(0..12))?;
    ensure(clean[0] >= 3 && clean[1] >= 2, || format!("too few clean instances {clean:?}"))?;
    Ok(format!("23 families located at their cells; {} night and {} day clean instances gave empty reports", clean[0], clean[1]))
}

fn ward_a() -> Outcome {
    let holidays = [NaiveDate::from_ymd_opt(2024, 11, 4).unwrap(), NaiveDate::from_ymd_opt(2024, 11, 23).unwrap()];
    let cfg = synth::ward_a("2024-11", &holidays).map_err(|e| e.to_string())?;
    let cal = &cfg.calendar;
    ensure(cfg.nurses.len() == 29 && cfg.night_capable().len() == 25, || "ward shape".into())?;
    ensure(cal.target_len() == 30, || format!("{} target days", cal.target_len()))?;
    for d in cal.target_range() {
        let want = if cal.is_weekend_or_holiday(d) { 3 } else { 4 };
        let b = &cfg.staffing.night.all;
        let c: DayClass = cal.day_class(d);
        ensure(b.lb.get(c) == Some(want) && b.ub.get(c) == Some(want), || format!("night staffing on {}", cal.date(d)))?;
    }
    let wishes = synth::wishes(&cfg, 11, 3);
    let choice = SolverChoice::Heuristic(HeuristicOptions { time_limit: 600.0, ..Default::default() });
    let mut s = Session::new("ward-a", cfg, wishes).map_err(|e| e.to_string())?;
    let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR"));
    let mut lines = Vec::new();
    for stage in [Stage::Night, Stage::Day] {
        let sol = match stage {
            Stage::Night => s.run_night(&choice, None),
            Stage::Day => {
                s.post_process_longday().map_err(|e| e.to_string())?;
                s.run_day(&choice, None)
            }
        }
        .map_err(|e| e.to_string())?
        .clone();
        let r = &sol.report;
        ensure(r.hard_violations == 0 && sol.roster.is_some(), || format!("{stage}: {} hard violations", r.hard_violations))?;
        ensure(r.elapsed_s < 600.0, || format!("{stage}: {:.0}s", r.elapsed_s))?;
        ensure(r.trace_is_non_increasing(), || format!("{stage}: trace rises"))?;
        // points are only recorded for new incumbents
        ensure(r.trace.windows(2).all(|w| w[1].cost < w[0].cost), || format!("{stage}: trace repeats a cost"))?;
        let path = dir.join(format!("ward_a_{stage}_trace.csv"));
        std::fs::write(&path, r.trace_csv()).map_err(|e| e.to_string())?;
        lines.push(format!("{stage} {:.1}s objective {} ({} trace points)", r.elapsed_s, r.objective.unwrap(), r.trace.len()));
    }
    let final_roster = s.current_roster();
    let unset = s.config.calendar.target_range().any(|d| (0..29).any(|n| final_roster.get(n, d) == rostra::domain::ShiftSymbol::Unset));
    ensure(!unset, || "day roster still has unset target cells".into())?;
    Ok(format!("29 nurses, 25 night-capable, 30 days, zero hard in both stages: {}; traces in {}", lines.join(", "), dir.display()))
}

fn incremental_differential() -> Outcome {
    let moves = caught(incremental::random_wards)?;
    ensure(moves >= 10_000, || format!("{moves} moves"))?;
    Ok(format!("{moves} moves, totals equal to full recomputation after each"))
}

fn epigraphs() -> Outcome {
    need_cbc()?;
    let cfg = synth::random_ward(0, 4, 7);
    for (stage, i) in [(Stage::Night, 34), (Stage::Night, 35), (Stage::Day, 34)] {
        let id = ConstraintId::new(stage, Kind::Soft, i);
        ensure(epigraph_members(id).is_some() && cfg.weights.alpha(id) > 0, || format!("{id} has no positive weight"))?;
    }
    let (solved, seen, positive) = caught(epigraph::sweep)?;
    ensure(solved >= 10 && positive >= 5, || format!("{solved} optimal instances, {positive} positive epigraphs"))?;
    Ok(format!("{seen} epigraph values on {solved} optimal instances ({positive} positive) equal the recomputed maximum"))
}

fn determinism() -> Outcome {
    let cfg = synth::random_ward(21, 9, 14);
    let wishes = synth::wishes(&cfg, 21, 2);
    let mut runs = vec![("heuristic", flow::heuristic(7, 40_000))];
    if common::cbc_available() {
        runs.push(("exact", SolverChoice::Exact(ExactOptions::with_time(60.0))));
    }
    let mut compared = 0;
    for (name, choice) in &runs {
        let (a, b) = caught(|| (flow::run(&cfg, &wishes, choice, 3), flow::run(&cfg, &wishes, choice, 3)))?;
        ensure(a.artifacts == b.artifacts, || {
            let diff = a.artifacts.iter().zip(&b.artifacts).find(|(x, y)| x != y).map(|(x, _)| x.0.clone());
            format!("{name}: {diff:?} differs")
        })?;
        compared += a.artifacts.len();
    }
    for format in [lp::ModelFormat::Lp, lp::ModelFormat::Mps] {
        let write = || lp::render(&encode_stage(Stage::Night, &cfg, &wishes, false).unwrap(), format);
        ensure(write() == write(), || format!("{format:?} differs"))?;
    }
    Ok(format!(
        "{compared} artifacts byte-identical across {} solver runs (timing fields excluded), LP and MPS identical",
        runs.len()
    ))
}

fn main() {
    panic::set_hook(Box::new(|_| {}));
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("oracle equivalence", oracle),
        ("constraint-unit suite", catalog),
        ("edit monotonicity", edit_monotonicity),
        ("probe soundness and completeness", probe),
        ("desk-scale ward A", ward_a),
        ("incremental-evaluation differential", incremental_differential),
        ("fairness epigraph exactness", epigraphs),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = caught(f).and_then(|o| o);
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{}] {name} ({secs:.1}s): {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL [{}] {name} ({secs:.1}s): {reason}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
