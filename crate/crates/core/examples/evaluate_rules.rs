//! Score a hand-written roster against the rule catalog: hard checks,
//! the weighted soft objective and the individual violation records.
//!
//! cargo run --example evaluate_rules

use std::collections::BTreeSet;

use chrono::NaiveDate;
use rostra::catalog::{check_stage_hard, compile_stage, evaluate_stage, soft_records};
use rostra::domain::{CalendarWindow, Nurse, Roster, Stage, WardConfig};

fn main() -> rostra::Result<()> {
    // one week of target days, with a five-day margin on each side
    let cal = CalendarWindow::custom(NaiveDate::from_ymd_opt(2025, 6, 2).unwrap(), 7, &BTreeSet::new(), &[])?;
    let nurses = vec![Nurse { group: Some(1), ..Nurse::new("aoi") }, Nurse { group: Some(2), ..Nurse::new("ren") }];
    let cfg = WardConfig::new(nurses, cal);

    //            prev month     | target week        | next month
    let roster = Roster::from_rows(
        &cfg,
        &[
            "休 日 日 休 日  入 明 休 日 日 入 明  休 未 未 未 未",
            "日 日 休 日 日  日 日 日 日 日 日 休  休 未 未 未 未",
        ],
    )?;

    for stage in [Stage::Night, Stage::Day] {
        let hard = check_stage_hard(stage, &roster, &cfg)?;
        let soft = evaluate_stage(stage, &roster, &cfg)?;
        println!("{stage} stage: {} hard violation(s), soft objective {}", hard.len(), soft.objective);
        for v in hard.iter().take(5) {
            println!("  hard {} {:?} {:?}: {}", v.constraint, v.nurse, v.date, v.note);
        }
        for e in soft.entries.iter().filter(|e| e.total != 0.into()) {
            println!("  {:<10} weight {:>3} value {}", e.id.to_string(), e.weight, e.total);
        }
        for r in soft_records(stage, &roster, &cfg)?.iter().take(5) {
            println!("  record {} {:?}: {}", r.constraint, r.nurse, r.note);
        }
        // the compiled terms used by the solvers give the same number
        assert_eq!(compile_stage(stage, &cfg).objective(roster.cells()), soft.objective);
    }
    Ok(())
}
