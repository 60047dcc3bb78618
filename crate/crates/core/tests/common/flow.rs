//! The full two-stage flow with every artifact rendered to text.

use rostra::domain::{Roster, ShiftSymbol, Stage, WardConfig};
use rostra::encoder::lp::ModelFormat;
use rostra::io::{export_roster, RosterFormat};
use rostra::pipeline::{CellEdit, Session, SolverChoice};
use rostra::solver::{HeuristicOptions, StageSolution};

pub fn heuristic(seed: u64, iterations: u64) -> SolverChoice {
    // the time limit is far off so the iteration budget decides the run
    SolverChoice::Heuristic(HeuristicOptions { seed, iterations, time_limit: 3600.0, ..Default::default() })
}

/// Up to `k` edits turning solver-placed 休 into 特休, first nurses first.
pub fn sample_edits(s: &Session, k: usize) -> Vec<CellEdit> {
    let r = s.current_roster();
    let cfg = &s.config;
    let mut out = Vec::new();
    for n in 0..cfg.nurses.len() {
        let hit = cfg.calendar.target_range().find(|&d| r.get(n, d) == ShiftSymbol::Off && r.provenance(n, d).is_solver_owned());
        if let Some(d) = hit {
            out.push(CellEdit { nurse: cfg.nurses[n].id.clone(), date: cfg.calendar.date(d), symbol: ShiftSymbol::SpecialOff });
        }
        if out.len() == k {
            break;
        }
    }
    out
}

/// Solve report as JSON with wall-clock fields removed.
pub fn untimed(sol: &StageSolution) -> String {
    let mut v = serde_json::to_value(sol).unwrap();
    strip(&mut v);
    serde_json::to_string_pretty(&v).unwrap()
}

fn strip(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(m) => {
            m.remove("elapsed_s");
            m.values_mut().for_each(strip);
        }
        serde_json::Value::Array(a) => a.iter_mut().for_each(strip),
        _ => {}
    }
}

pub struct Flow {
    pub session: Session,
    /// (name, content) of every artifact, in a fixed order.
    pub artifacts: Vec<(String, String)>,
}

fn roster_texts(tag: &str, r: &Roster, out: &mut Vec<(String, String)>) {
    out.push((format!("{tag}.csv"), export_roster(r, RosterFormat::GridCsv).unwrap()));
    out.push((format!("{tag}.json"), export_roster(r, RosterFormat::StructuredJson).unwrap()));
}

/// Night solve, edits, 12h placement, day solve, finalize.
pub fn run(cfg: &WardConfig, wishes: &Roster, choice: &SolverChoice, edits: usize) -> Flow {
    let mut s = Session::new("flow", cfg.clone(), wishes.clone()).unwrap();
    let mut a = Vec::new();
    for f in [ModelFormat::Lp, ModelFormat::Mps] {
        a.push((format!("night.{}", f.extension()), s.export_instance(Stage::Night, f).unwrap()));
    }
    let night = s.run_night(choice, None).unwrap().clone();
    a.push(("night_report.json".into(), untimed(&night)));
    roster_texts("night_roster", night.roster.as_ref().unwrap(), &mut a);
    let ed = sample_edits(&s, edits);
    let warnings = s.apply_edits(&ed, None).unwrap();
    a.push(("edit_warnings.json".into(), serde_json::to_string(&warnings).unwrap()));
    let pp = s.post_process_longday().unwrap().clone();
    a.push(("postprocess.json".into(), serde_json::to_string_pretty(&pp).unwrap()));
    for f in [ModelFormat::Lp, ModelFormat::Mps] {
        a.push((format!("day.{}", f.extension()), s.export_instance(Stage::Day, f).unwrap()));
    }
    let day = s.run_day(choice, None).unwrap().clone();
    a.push(("day_report.json".into(), untimed(&day)));
    if let Some(r) = &day.roster {
        roster_texts("day_roster", r, &mut a);
        let fb = s.feedback(Stage::Day).unwrap();
        a.push(("feedback.json".into(), serde_json::to_string(&fb).unwrap()));
        if day.report.hard_violations == 0 {
            s.finalize().unwrap();
        }
        let rep = s.final_report().unwrap();
        a.push(("final_report.txt".into(), rep.render()));
        a.push(("final_report.json".into(), serde_json::to_string_pretty(&rep).unwrap()));
    }
    Flow { session: s, artifacts: a }
}
