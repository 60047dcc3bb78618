//! Find the wishes that make a month impossible. The relaxed program
//! reports which hard rule breaks and at which cell.
//!
//! cargo run --example probe_conflicts

use std::collections::BTreeSet;

use chrono::NaiveDate;
use rostra::domain::{CalendarWindow, Nurse, Roster, Stage, WardConfig};
use rostra::solver::{find_cbc, probe_hard, ExactOptions, Fixing, HeuristicOptions, ProbeEngine};

fn main() -> rostra::Result<()> {
    let cal = CalendarWindow::custom(NaiveDate::from_ymd_opt(2025, 6, 2).unwrap(), 7, &BTreeSet::new(), &[])?;
    let leader = Nurse { group: Some(1), day_leader: true, ..Nurse::new("kei") };
    let cfg = WardConfig::new(vec![leader, Nurse { group: Some(2), ..Nurse::new("yui") }], cal);

    // kei ends last month on a night start but wished the 2nd off;
    // yui left a previous-month cell blank
    let wishes = Roster::from_rows(
        &cfg,
        &[
            "休 日 日 日 入  休 未 未 未 未 未 未  未 未 未 未 未",
            "休 日 未 日 休  未 未 未 未 未 未 未  未 未 未 未 未",
        ],
    )?;
    let engine = if find_cbc().is_ok() {
        ProbeEngine::Exact(ExactOptions::with_time(30.0))
    } else {
        ProbeEngine::Heuristic(HeuristicOptions { iterations: 50_000, ..Default::default() })
    };
    let rep = probe_hard(Stage::Night, &cfg, &wishes, &[], &engine)?;
    print!("{}", rep.render());

    // extra fixings are probed together with the wishes; this one clashes
    // with kei's wish for the 2nd
    let fix = Fixing { nurse: "kei".into(), date: NaiveDate::from_ymd_opt(2025, 6, 2).unwrap(), symbol: "明".parse()? };
    let rep = probe_hard(Stage::Night, &cfg, &wishes, &[fix], &engine)?;
    println!("with one more fixing: {} record(s), families {:?}", rep.records.len(), rep.ids().iter().map(|i| i.to_string()).collect::<Vec<_>>());
    Ok(())
}
