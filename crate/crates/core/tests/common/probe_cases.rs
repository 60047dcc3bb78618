//! One injected wish conflict per hard family, each forced by fixed cells
//! alone so no relaxed solve can repair it.

use rostra::catalog::{CellRef, ConstraintId};
use rostra::domain::{Bounds, NightClass, Nurse, OffPreference, Roster, Stage, WardConfig};
use rostra::pipeline::Session;
use rostra::synth;
use rostra::solver::{probe_hard, solve_exact, ExactOptions, Fixing, HeuristicOptions, ProbeEngine, ProbeReport};

use super::fixture::*;

pub struct InjectedConflict {
    pub id: ConstraintId,
    pub cfg: WardConfig,
    pub wishes: Roster,
    pub fixings: Vec<Fixing>,
    /// The cell the conflict was injected at.
    pub cell: CellRef,
}

/// Previous month all off, target and next month unset, then `marks`.
fn wish(marks: &[(usize, &str)]) -> String {
    let mut all = vec![(0, "休 休 休 休 休")];
    all.extend_from_slice(marks);
    row("未", &all)
}

fn case(id: ConstraintId, cfg: WardConfig, rows: &[String], at: (usize, usize)) -> InjectedConflict {
    let mut rows = rows.to_vec();
    while rows.len() < cfg.nurses.len() {
        rows.push(wish(&[]));
    }
    let wishes = roster(&cfg, &rows);
    let cell = cell(&cfg, at.0, at.1);
    InjectedConflict { id, cfg, wishes, fixings: vec![], cell }
}

fn with_fixing(mut c: InjectedConflict, symbol: &str) -> InjectedConflict {
    c.fixings.push(Fixing { nurse: c.cell.nurse.clone(), date: c.cell.date, symbol: symbol.parse().unwrap() });
    c
}

fn men_ward(stage: Stage) -> WardConfig {
    let mut cfg = ward(vec![Nurse { male: true, ..nurse("m0") }, Nurse { male: true, ..nurse("m1") }, nurse("w")]);
    cfg.staffing.band_mut(stage).men = Bounds::new(mondays_only(1), mondays_only(1));
    cfg
}

pub fn night_cases() -> Vec<InjectedConflict> {
    use ConstraintId as C;
    let two = || plain(2);
    let with = |n: Nurse| ward(vec![n, nurse("other")]);
    vec![
        case(C::night_hard(1), two(), &[wish(&[(2, "未")])], (0, 2)),
        case(C::night_hard(2), two(), &[wish(&[(1, "日 日 日 未 入")])], (0, T)),
        case(C::night_hard(3), two(), &[wish(&[(4, "入 休")])], (0, T)),
        case(C::night_hard(4), two(), &[wish(&[(18, "入 休")])], (0, 18)),
        case(C::night_hard(5), two(), &[wish(&[(T, "日 日 日 他 日 日")])], (0, T)),
        case(C::night_hard(6), two(), &[wish(&[(T + 2, "入 休")])], (0, T + 2)),
        case(
            C::night_hard(7),
            with(Nurse { night_class: NightClass::DayOnly, ..nurse("d") }),
            &[wish(&[(T + 2, "入 明")])],
            (0, T + 2),
        ),
        case(
            C::night_hard(8),
            with(Nurse { night_count_fixed: true, night_lb: Some(4), night_ub: Some(4), ..nurse("f") }),
            &[wish(&[(T, "休 休 休 休 休 休 休 休 休 休 休 休 休 休")])],
            (0, T + 3),
        ),
        case(C::night_hard(9), two(), &[wish(&[(T + 1, "入 明 休 入 明")])], (0, T + 1)),
        case(C::night_hard(10), two(), &[wish(&[(T, "日 日 日 日 日 日")])], (0, T)),
        case(
            C::night_hard(11),
            with(Nurse { off_preference: OffPreference::TripleOff, ..nurse("t") }),
            &[wish(&[(T, "日 日 休 日 日 休 日 日 休 日 日 休 日 日")])],
            (0, T),
        ),
        case(C::night_hard(12), with(Nurse { day_leader: true, ..nurse("l") }), &[wish(&[(T + 2, "休")])], (0, T + 2)),
        case(C::night_hard(13), men_ward(Stage::Night), &[wish(&[(T, "入")]), wish(&[(T, "入")])], (0, T)),
        with_fixing(case(C::night_hard(14), two(), &[wish(&[(T + 3, "休")])], (0, T + 3)), "特休"),
    ]
}

pub fn day_cases() -> Vec<InjectedConflict> {
    use ConstraintId as C;
    let two = || plain(2);
    vec![
        case(C::day_hard(1), two(), &[wish(&[(2, "未")])], (0, 2)),
        case(
            C::day_hard(2),
            ward(vec![Nurse { night_class: NightClass::NightOnly, ..nurse("o") }, nurse("other")]),
            &[wish(&[(T + 2, "日")])],
            (0, T + 2),
        ),
        case(C::day_hard(3), two(), &[wish(&[(T, "日 日 日 日 日 日")])], (0, T)),
        case(C::day_hard(4), two(), &[wish(&[(T, "日 日 日 他 日 日")])], (0, T)),
        case(C::day_hard(5), two(), &[wish(&[(14, "日 日 日 日 入 明")])], (0, 18)),
        case(C::day_hard(6), two(), &[wish(&[(T + 1, "日 日 日 12h")])], (0, T + 1)),
        case(C::day_hard(7), two(), &[wish(&[(T + 2, "入 休")])], (0, T + 2)),
        case(C::day_hard(8), men_ward(Stage::Day), &[wish(&[(T, "日")]), wish(&[(T, "日")])], (0, T)),
        with_fixing(case(C::day_hard(9), two(), &[wish(&[])], (0, T + 3)), "未"),
    ]
}

pub fn engine() -> ProbeEngine {
    if super::cbc_available() {
        ProbeEngine::Exact(ExactOptions::with_time(60.0))
    } else {
        ProbeEngine::Heuristic(HeuristicOptions { iterations: 60_000, ..Default::default() })
    }
}

pub fn run(stage: Stage, c: &InjectedConflict) -> ProbeReport {
    probe_hard(stage, &c.cfg, &c.wishes, &c.fixings, &engine()).unwrap()
}

/// Whether the report names the injected family at the injected cell.
pub fn names_cell(rep: &ProbeReport, id: ConstraintId, at: &CellRef) -> bool {
    rep.records.iter().any(|r| {
        r.constraint == id
            && (r.suggested_cells.contains(at) || (r.nurse.as_deref() == Some(at.nurse.as_str()) && r.date == Some(at.date)))
    })
}

/// Probes seeds whose wishes admit a hard-feasible roster (decided by the
/// exact solver, independently of the probe) and panics on any record.
/// Returns how many night and day instances were clean.
pub fn clean_wishes(seeds: std::ops::Range<u64>) -> [usize; 2] {
    let mut checked = [0, 0];
    for seed in seeds {
        let cfg = synth::random_ward(seed, 3, 7);
        let w = synth::wishes(&cfg, seed, 1);
        let exact = ExactOptions::with_time(60.0);
        let night_sol = solve_exact(Stage::Night, &cfg, &w, &exact).unwrap();
        let Some(night_roster) = night_sol.roster.filter(|_| night_sol.report.hard_violations == 0) else { continue };
        let night = probe_hard(Stage::Night, &cfg, &w, &[], &engine()).unwrap();
        assert!(night.feasible && night.records.is_empty(), "seed {seed}:\n{}", night.render());
        checked[0] += 1;

        let mut s = Session::from_edited_night("p", cfg.clone(), night_roster).unwrap();
        s.post_process_longday().unwrap();
        let input = s.stage_input(Stage::Day).unwrap();
        let day_sol = solve_exact(Stage::Day, &cfg, &input, &exact).unwrap();
        if day_sol.report.hard_violations != 0 || day_sol.roster.is_none() {
            continue;
        }
        let day = probe_hard(Stage::Day, &cfg, &input, &[], &engine()).unwrap();
        assert!(day.feasible && day.records.is_empty(), "seed {seed}:\n{}", day.render());
        checked[1] += 1;
    }
    checked
}

/// Panics unless every injected conflict is reported at its cell.
pub fn locate_all(stage: Stage, cases: &[InjectedConflict]) {
    for c in cases {
        let rep = run(stage, c);
        assert!(!rep.feasible, "{}", c.id);
        assert!(names_cell(&rep, c.id, &c.cell), "{} not reported at {:?}:\n{}", c.id, c.cell, rep.render());
    }
}
