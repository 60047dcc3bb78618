//! The full workflow on the bundled ward: load the condition file and wish
//! grid, solve the night stage, edit, place 12h shifts, solve the day stage
//! and print the final report.
//!
//! cargo run --release --example two_stage_pipeline [out_dir]

use std::path::{Path, PathBuf};

use rostra::domain::{ShiftSymbol, Stage};
use rostra::io::{self, RosterFormat, SymbolMap};
use rostra::pipeline::{CellEdit, Session, SolverChoice};
use rostra::solver::{HeuristicOptions, SolveReport};

fn objective(r: &SolveReport) -> String {
    r.objective.map_or("-".into(), |o| o.to_string())
}

fn main() -> rostra::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let out: PathBuf = std::env::args().nth(1).map(Into::into).unwrap_or_else(std::env::temp_dir).join("rostra-pipeline");
    std::fs::create_dir_all(&out).map_err(|e| rostra::Error::io(&out, e))?;

    let (cfg, mut warnings) = io::load_condition_file(&io::read_text(&data.join("ward_a.toml"))?)?;
    let map = SymbolMap::from_toml(&io::read_text(&data.join("symbol_map.toml"))?)?;
    let (wishes, w2) = io::load_wish_table(&io::read_text(&data.join("wishes.csv"))?, &cfg, &map)?;
    warnings.extend(w2);
    for w in &warnings {
        println!("intake warning: {}: {}", w.field, w.message);
    }

    let choice = SolverChoice::Heuristic(HeuristicOptions { seed: 7, ..Default::default() });
    let mut s = Session::new("demo", cfg, wishes)?;
    let night = s.run_night(&choice, None)?;
    println!("night: {} objective {} hard {}", night.report.status, objective(&night.report), night.report.hard_violations);

    // a head nurse swaps two solver-placed offs for special leave
    let r = s.current_roster();
    let mut edits = Vec::new();
    for n in 0..s.config.nurses.len() {
        if let Some(d) = s.config.calendar.target_range().find(|&d| r.get(n, d) == ShiftSymbol::Off && r.provenance(n, d).is_solver_owned()) {
            edits.push(CellEdit { nurse: s.config.nurses[n].id.clone(), date: s.config.calendar.date(d), symbol: ShiftSymbol::SpecialOff });
        }
        if edits.len() == 2 {
            break;
        }
    }
    for v in s.apply_edits(&edits, Some("demo".into()))? {
        println!("edit warning: {} {:?}", v.constraint, v.note);
    }

    let pp = s.post_process_longday()?;
    println!("12h placed on {} cells, {} left alone", pp.converted.len(), pp.kept.len());
    let day = s.run_day(&choice, None)?.clone();
    println!("day: {} objective {} hard {}", day.report.status, objective(&day.report), day.report.hard_violations);
    for f in s.feedback(Stage::Day)?.iter().take(5) {
        println!("feedback [{:?}] {}", f.severity, f.message);
    }
    if day.report.hard_violations == 0 {
        s.finalize()?;
    }
    let report = s.final_report()?;
    io::write_text(&out.join("final_roster.csv"), &io::export_roster(s.current_roster(), RosterFormat::GridCsv)?)?;
    io::write_text(&out.join("final_report.txt"), &report.render())?;
    println!("{}", report.render().lines().take(12).collect::<Vec<_>>().join("\n"));
    println!("wrote {}", out.display());
    Ok(())
}
