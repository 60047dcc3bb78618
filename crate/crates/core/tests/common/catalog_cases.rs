//! One violating and one satisfying roster per catalog entry, with the
//! violating magnitude worked out by hand. Window indices refer to the
//! two-week fixture calendar in `super::fixture`. Every checked rule is
//! recorded so coverage of the whole catalog can be asserted.

use chrono::Weekday;
use super::fixture::*;
use num_rational::Ratio;
use std::collections::BTreeSet;
use std::sync::Mutex;

use rostra::catalog::{compile_stage, evaluate_soft, hard_magnitude, ConstraintId, Kind, Penalty};
use rostra::domain::{
    Bounds, DayClass, DayTable, ForbiddenAssignment, ForbiddenPair, NightClass, Nurse, OffPreference, Pair, Provenance,
    Roster, Sequence, ShiftSymbol, StaffCategory, Stage, Team, WardConfig,
};
use rostra::encoder::encode_stage;

static COVERED: Mutex<BTreeSet<ConstraintId>> = Mutex::new(BTreeSet::new());

fn note(id: ConstraintId) {
    COVERED.lock().unwrap().insert(id);
}

/// Rules checked so far in this process.
pub fn covered() -> BTreeSet<ConstraintId> {
    COVERED.lock().unwrap().clone()
}

/// The whole catalog: 14 + 35 night and 9 + 34 day entries, plus the
/// care-worker variants of the rookie bounds in both stages.
pub fn catalog() -> BTreeSet<ConstraintId> {
    let mut out = BTreeSet::new();
    for (stage, hard, soft) in [(Stage::Night, 14, 35), (Stage::Day, 9, 34)] {
        out.extend((1..=hard).map(|i| ConstraintId::new(stage, Kind::Hard, i)));
        out.extend((1..=soft).map(|i| ConstraintId::new(stage, Kind::Soft, i)));
        for i in [17, 18] {
            out.insert(ConstraintId::new(stage, Kind::Soft, i).care_worker_variant());
        }
    }
    out
}

fn value(id: ConstraintId, cfg: &WardConfig, r: &Roster) -> Penalty {
    if id.is_hard() {
        hard_magnitude(id, r, cfg).unwrap()
    } else {
        let v = evaluate_soft(id, r, cfg).unwrap().total().unwrap();
        // the compiled form must agree on every fixture
        let compiled = compile_stage(id.stage, cfg).rule_totals(r.cells());
        assert_eq!(compiled.get(&id).copied().unwrap_or_default(), v, "{id}: compiled terms disagree");
        v
    }
}

#[track_caller]
fn check(id: ConstraintId, cfg: &WardConfig, bad: &Roster, expected: Penalty, good: &Roster) {
    assert_eq!(value(id, cfg, bad), expected, "{id} on the violating roster");
    assert_eq!(value(id, cfg, good), p(0), "{id} on the satisfying roster");
    note(id);
}

// ---------------------------------------------------------------- staffing

/// a: group 1, team A, rookie; b: group 3, team A, care worker;
/// c: group 1, team B, care worker; d: group 4, team B, rookie.
/// Every per-team category has one member in each team.
fn staffing_ward(stage: Stage, cat: StaffCategory, lower: bool) -> WardConfig {
    let mk = |id: &str, g: u8, t: Team, rookie: bool, cw: bool| Nurse {
        group: Some(g),
        team: Some(t),
        rookie,
        care_worker: cw,
        ..Nurse::new(id)
    };
    let mut cfg = ward(vec![
        mk("a", 1, Team::A, true, false),
        mk("b", 3, Team::A, false, true),
        mk("c", 1, Team::B, false, true),
        mk("d", 4, Team::B, true, false),
    ]);
    cfg.toggles.care_worker = true;
    let b = cfg.staffing.band_mut(stage).get_mut(cat);
    *b = if lower {
        Bounds::new(mondays_only(1), DayTable::unset())
    } else {
        Bounds::new(DayTable::unset(), mondays_only(0))
    };
    cfg
}

fn staffing_case(stage: Stage, index: u8, cw: bool, cat: StaffCategory, expected: i64) {
    let lower = index % 2 == 1;
    let cfg = staffing_ward(stage, cat, lower);
    let mut id = ConstraintId::new(stage, Kind::Soft, index);
    if cw {
        id = id.care_worker_variant();
    }
    let on = if stage == Stage::Night { "入" } else { "日" };
    let everyone = roster(&cfg, &vec![row("休", &[(T, on), (T + 7, on)]); 4]);
    let nobody = roster(&cfg, &vec![row("休", &[]); 4]);
    let (bad, good) = if lower { (nobody, everyone) } else { (everyone, nobody) };
    check(id, &cfg, &bad, p(expected), &good);
}

pub fn staffing_bounds_both_stages() {
    use StaffCategory::*;
    // two Mondays; per-team categories count once per team
    let table = [
        (1, All, 2),
        (2, All, 8),
        (3, Group1, 2),
        (4, Group1, 4),
        (5, Group12, 2),
        (6, Group12, 4),
        (7, Group4, 2),
        (8, Group4, 2),
        (9, TeamGroup1, 4),
        (10, TeamGroup1, 4),
        (11, TeamGroup12, 4),
        (12, TeamGroup12, 4),
        (13, TeamGroup34, 4),
        (14, TeamGroup34, 4),
        (15, Team, 4),
        (16, Team, 8),
        (17, Rookie, 2),
        (18, Rookie, 4),
    ];
    for stage in [Stage::Night, Stage::Day] {
        for &(i, cat, v) in &table {
            staffing_case(stage, i, false, cat, v);
        }
        staffing_case(stage, 17, true, CareWorker, 2);
        staffing_case(stage, 18, true, CareWorker, 4);
    }
}

// ------------------------------------------------------------ shared rules

pub fn pairs_and_forbidden_pairs_both_stages() {
    for (stage, s) in [(Stage::Night, ShiftSymbol::NightIn), (Stage::Day, ShiftSymbol::Day)] {
        let g = s.glyph();
        let mut cfg = plain(2);
        cfg.pairs.push(Pair { n1: "n0".into(), n2: "n1".into(), s1: s, s2: s, min: 2, stage: None });
        let once = roster(&cfg, &vec![row("休", &[(T + 1, g)]); 2]);
        let twice = roster(&cfg, &vec![row("休", &[(T + 1, g), (T + 8, g)]); 2]);
        let pair_id = ConstraintId::new(stage, Kind::Soft, 19);
        check(pair_id, &cfg, &once, p(1), &twice);

        let mut cfg = plain(2);
        cfg.forbidden_pairs.push(ForbiddenPair { n1: "n0".into(), n2: "n1".into(), s1: s, s2: s, stage: None });
        let apart = roster(&cfg, &[row("休", &[(T + 1, g)]), row("休", &[(T + 8, g)])]);
        let fp_id = ConstraintId::new(stage, Kind::Soft, 20);
        check(fp_id, &cfg, &twice, p(2), &apart);
    }
}

pub fn forbidden_assignments_both_stages() {
    for (stage, s) in [(Stage::Night, ShiftSymbol::NightIn), (Stage::Day, ShiftSymbol::Day)] {
        let mut cfg = plain(1);
        cfg.forbidden_assignments.push(ForbiddenAssignment {
            nurse: "n0".into(),
            symbol: s,
            day: DayClass::Sat,
            stage: None,
        });
        let g = s.glyph();
        let bad = roster(&cfg, &[row("休", &[(10, g), (17, g)])]);
        let good = roster(&cfg, &[row("休", &[(9, g), (16, g)])]);
        let index = if stage == Stage::Night { 21 } else { 22 };
        check(ConstraintId::new(stage, Kind::Soft, index), &cfg, &bad, p(2), &good);
    }
}

// -------------------------------------------------------------- night hard

pub fn night_alphabet_and_previous_month() {
    let cfg = plain(1);
    let mut bad = roster(&cfg, &[row("休", &[(2, "未")])]);
    bad.set(0, T + 3, ShiftSymbol::Day, Provenance::Solved(Stage::Night));
    let mut good = roster(&cfg, &[row("休", &[])]);
    good.set(0, T + 3, ShiftSymbol::NightIn, Provenance::Solved(Stage::Night));
    check(ConstraintId::night_hard(1), &cfg, &bad, p(2), &good);
}

pub fn night_prev_tail() {
    let cfg = plain(1);
    let bad = roster(&cfg, &[row("休", &[(2, "日 日 日 未 入")])]);
    let good = roster(&cfg, &[row("休", &[(2, "日 日 日 12h 入")])]);
    check(ConstraintId::night_hard(2), &cfg, &bad, p(1), &good);
}

pub fn night_first_day_follows_prev_night() {
    let cfg = plain(2);
    let bad = roster(&cfg, &[row("休", &[(4, "入 休")]), row("休", &[(4, "休 明")])]);
    let good = roster(&cfg, &[row("休", &[(4, "入 明")]), row("休", &[])]);
    check(ConstraintId::night_hard(3), &cfg, &bad, p(2), &good);
}

pub fn night_month_end() {
    let cfg = plain(2);
    let bad = roster(&cfg, &[row("休", &[(18, "入 休")]), row("休", &[(18, "休 明")])]);
    let good = roster(&cfg, &[row("休", &[(18, "入 明 休")]), row("休", &[])]);
    check(ConstraintId::night_hard(4), &cfg, &bad, p(2), &good);
}

pub fn six_day_cap_both_stages() {
    let cfg = plain(1);
    let seven = roster(&cfg, &[row("休", &[(T, "日 日 日 日 日 日 日")])]);
    let five = roster(&cfg, &[row("休", &[(T, "日 日 日 日 日")])]);
    // two six-day windows hold six work days each
    check(ConstraintId::night_hard(5), &cfg, &seven, p(2), &five);
    check(ConstraintId::day_hard(4), &cfg, &seven, p(2), &five);
}

pub fn standard_sequences_both_stages() {
    let cfg = plain(1);
    let bad = roster(&cfg, &[row("休", &[(T + 2, "入 休")])]);
    let good = roster(&cfg, &[row("休", &[(T + 2, "入 明 休")])]);
    check(ConstraintId::night_hard(6), &cfg, &bad, p(1), &good);
    check(ConstraintId::day_hard(7), &cfg, &bad, p(1), &good);
}

pub fn day_only_nurses_take_no_nights() {
    let cfg = ward(vec![Nurse { night_class: NightClass::DayOnly, ..nurse("d") }]);
    let bad = roster(&cfg, &[row("休", &[(T + 2, "入 明")])]);
    let good = roster(&cfg, &[row("休", &[(T + 2, "日 日")])]);
    check(ConstraintId::night_hard(7), &cfg, &bad, p(2), &good);
}

pub fn fixed_night_count() {
    let cfg = ward(vec![Nurse { night_count_fixed: true, night_lb: Some(4), night_ub: Some(4), ..nurse("f") }]);
    let three = roster(&cfg, &[row("休", &[(T, "入 明"), (T + 4, "入 明"), (T + 8, "入 明")])]);
    let four = roster(&cfg, &[row("休", &[(T, "入 明"), (T + 4, "入 明"), (T + 8, "入 明"), (T + 12, "入 明")])]);
    // one short on starts and one short on ends
    check(ConstraintId::night_hard(8), &cfg, &three, p(2), &four);
}

pub fn night_start_spacing() {
    let cfg = plain(1);
    let close = roster(&cfg, &[row("休", &[(6, "入 明 入 明")])]);
    let apart = roster(&cfg, &[row("休", &[(6, "入 明"), (10, "入 明")])]);
    check(ConstraintId::night_hard(9), &cfg, &close, p(2), &apart);
}

pub fn max_runs_both_stages() {
    let cfg = plain(1);
    let six = roster(&cfg, &[row("休", &[(T, "日 日 日 日 日 日")])]);
    let five = roster(&cfg, &[row("休", &[(T, "日 日 日 日 日")])]);
    check(ConstraintId::night_hard(10), &cfg, &six, p(1), &five);
    check(ConstraintId::day_hard(3), &cfg, &six, p(1), &five);
}

pub fn triple_off_candidates() {
    let cfg = ward(vec![Nurse { off_preference: OffPreference::TripleOff, ..nurse("t") }]);
    let none = roster(&cfg, &[row("日", &[])]);
    let two = roster(&cfg, &[row("日", &[(T, "休 休 休"), (T + 7, "休 休 休")])]);
    check(ConstraintId::night_hard(11), &cfg, &none, p(2), &two);
}

pub fn leader_availability() {
    let cfg = ward(vec![Nurse { day_leader: true, ..nurse("l") }]);
    // Wednesday night start and Sunday off leave two days uncovered
    let bad = roster(&cfg, &[row("日", &[(7, "入"), (11, "休")])]);
    let good = roster(&cfg, &[row("未", &[(0, "休 休 休 休 休"), (10, "12h 12h")])]);
    check(ConstraintId::night_hard(12), &cfg, &bad, p(2), &good);
}

pub fn men_range_both_stages() {
    for (stage, g, id) in [(Stage::Night, "入", ConstraintId::night_hard(13)), (Stage::Day, "日", ConstraintId::day_hard(8))] {
        let mut cfg = ward(vec![Nurse { male: true, ..nurse("m0") }, Nurse { male: true, ..nurse("m1") }]);
        cfg.staffing.band_mut(stage).men = Bounds::new(mondays_only(1), mondays_only(1));
        // first Monday has two men, second has none
        let bad = roster(&cfg, &vec![row("休", &[(T, g)]); 2]);
        let good = roster(&cfg, &[row("休", &[(T, g)]), row("休", &[(T + 7, g)])]);
        check(id, &cfg, &bad, p(1 + 1), &good);
    }
}

pub fn one_symbol_per_cell_lives_in_the_program() {
    let cfg = plain(1);
    let wishes = roster(&cfg, &[row("未", &[(0, "休 休 休 休 休"), (19, "休 休 休 休 休")])]);
    let inst = encode_stage(Stage::Night, &cfg, &wishes, false).unwrap();
    let compiled = compile_stage(Stage::Night, &cfg);
    let filled = roster(&cfg, &[row("休", &[])]);
    let assignment_rows = |v: &[Penalty]| -> Vec<String> {
        inst.violated_rows(v).into_iter().filter(|r| r.starts_with("a_")).collect()
    };
    let mut values = inst.values_for(&filled, &compiled);
    assert!(assignment_rows(&values).is_empty());
    values[inst.x(0, T + 3, ShiftSymbol::NightIn)] = p(1);
    assert_eq!(assignment_rows(&values), vec![format!("a_0_{}", T + 3)]);
    // the evaluator has no second symbol to look at
    assert_eq!(hard_magnitude(ConstraintId::night_hard(14), &filled, &cfg).unwrap(), p(0));
    note(ConstraintId::night_hard(14));
}

// -------------------------------------------------------------- night soft

pub fn night_soft_sequences() {
    let mut cfg = plain(1);
    cfg.sequences.night_soft.push(Sequence::new(&[ShiftSymbol::Day, ShiftSymbol::NightIn]));
    let bad = roster(&cfg, &[row("休", &[(T + 1, "日 入 明")])]);
    let good = roster(&cfg, &[row("休", &[(T + 1, "休 入 明")])]);
    check(ConstraintId::night_soft(22), &cfg, &bad, p(1), &good);
}

pub fn off_reserve() {
    let mut cfg = plain(1);
    cfg.weekly_off = Some(8);
    // six placed leaves two of the required four
    let six = roster(&cfg, &[row("日", &[(T, "休 休 休 休 休 休")])]);
    let four = roster(&cfg, &[row("日", &[(T, "休 休 休 休 特休 特休")])]);
    check(ConstraintId::night_soft(23), &cfg, &six, p(2), &four);
}

pub fn night_gap_over_two_weeks() {
    let cfg = plain(1);
    let none = roster(&cfg, &[row("休", &[])]);
    let one = roster(&cfg, &[row("休", &[(9, "入 明")])]);
    // six fourteen-day windows end inside the target
    check(ConstraintId::night_soft(24), &cfg, &none, p(6), &one);
}

pub fn night_count_bounds() {
    let mut cfg = plain(1);
    cfg.nurses[0].night_lb = Some(3);
    let two = roster(&cfg, &[row("休", &[(6, "入 明"), (10, "入 明")])]);
    let three = roster(&cfg, &[row("休", &[(6, "入 明"), (10, "入 明"), (14, "入 明")])]);
    check(ConstraintId::night_soft(25), &cfg, &two, p(1), &three);
    cfg.nurses[0].night_lb = None;
    cfg.nurses[0].night_ub = Some(2);
    check(ConstraintId::night_soft(26), &cfg, &three, p(1), &two);
}

pub fn weekend_night_smoothing() {
    let mut cfg = ward(vec![nurse("a"), Nurse { off_preference: OffPreference::WeekendPair, ..nurse("b") }]);
    cfg.avg_fssm = Some(Ratio::new(1, 2));
    // a: Friday and Monday, 2 - 1/2; b: one Saturday, (1 - 1/2) x 5
    let bad = roster(&cfg, &[row("休", &[(9, "入 明"), (12, "入 明")]), row("休", &[(10, "入 明")])]);
    let good = roster(&cfg, &[row("休", &[(6, "入 明")]), row("休", &[(7, "入 明")])]);
    check(ConstraintId::night_soft(27), &cfg, &bad, p(4), &good);
}

pub fn event_day_smoothing() {
    let mut cfg = plain(1);
    cfg.calendar = calendar(&[Weekday::Wed]);
    let bad = roster(&cfg, &[row("休", &[(7, "入 明"), (14, "入 明")])]);
    let good = roster(&cfg, &[row("休", &[(8, "入 明"), (15, "入 明")])]);
    check(ConstraintId::night_soft(28), &cfg, &bad, p(2), &good);
}

pub fn five_run_into_night() {
    let cfg = ward(vec![nurse("a"), Nurse { off_preference: OffPreference::SingleOff, ..nurse("b") }]);
    let bad = roster(&cfg, &vec![row("休", &[(6, "日 日 12h 入 明")]); 2]);
    let good = roster(&cfg, &vec![row("休", &[(6, "休 日 12h 入 明")]); 2]);
    check(ConstraintId::night_soft(29), &cfg, &bad, p(1 + 5), &good);
}

pub fn five_one_four() {
    let cfg = plain(1);
    let bad = roster(&cfg, &[row("休", &[(T, "日 日 12h 入 明 休 日 12h 入 明")])]);
    let good = roster(&cfg, &[row("休", &[(T, "日 日 12h 入 明 休 休 12h 入 明")])]);
    check(ConstraintId::night_soft(30), &cfg, &bad, p(1), &good);
}

pub fn three_nights_in_nine_days() {
    let cfg = ward(vec![nurse("a"), Nurse { off_preference: OffPreference::PairOff, ..nurse("b") }]);
    let bad = roster(&cfg, &vec![row("休", &[(T, "入 明"), (T + 4, "入 明"), (T + 8, "入 明")]); 2]);
    let good = roster(&cfg, &vec![row("休", &[(T, "入 明"), (T + 4, "入 明"), (T + 9, "入 明")]); 2]);
    check(ConstraintId::night_soft(31), &cfg, &bad, p(1 + 5), &good);
}

pub fn four_nights_short_windows() {
    let cfg = ward(vec![nurse("a"), Nurse { night_class: NightClass::NightOnly, ..nurse("b") }]);
    let bad = roster(
        &cfg,
        &[
            row("休", &[(5, "入 明"), (8, "入 明"), (11, "入 明"), (14, "入 明")]),
            row("休", &[(5, "入 明 入 明 入 明 入 明")]),
        ],
    );
    let good = roster(
        &cfg,
        &[
            row("休", &[(5, "入 明"), (8, "入 明"), (11, "入 明"), (18, "入 明")]),
            row("休", &[(5, "入 明 入 明 入 明"), (15, "入 明")]),
        ],
    );
    // thirteen-day windows starting 2..=5 for a, ten-day windows 2..=5 for b
    check(ConstraintId::night_soft(32), &cfg, &bad, p(4 + 4), &good);
}

pub fn four_nights_in_two_weeks() {
    let cfg = plain(1);
    let bad = roster(&cfg, &[row("休", &[(5, "入 明"), (8, "入 明"), (11, "入 明"), (14, "入 明")])]);
    let good = roster(&cfg, &[row("休", &[(5, "入 明"), (9, "入 明"), (13, "入 明")])]);
    check(ConstraintId::night_soft(33), &cfg, &bad, p(5), &good);
}

pub fn night_fairness_epigraphs() {
    let mut cfg = ward(vec![nurse("a"), nurse("b")]);
    cfg.calendar = calendar(&[Weekday::Wed]);
    cfg.nurses[0].night_ub = Some(1);
    cfg.nurses[1].night_ub = Some(1);
    // a: three nights over a bound of one plus one Wednesday; b: clean
    let bad = roster(&cfg, &[row("休", &[(7, "入 明"), (10, "入 明"), (13, "入 明")]), row("休", &[(6, "入 明")])]);
    let good = roster(&cfg, &[row("休", &[(6, "入 明")]), row("休", &[(8, "入 明")])]);
    check(ConstraintId::night_soft(34), &cfg, &bad, p(3), &good);

    let cfg = plain(2);
    // Tuesday to Thursday starts keep the weekend smoothing at zero
    let bad = roster(&cfg, &[row("休", &[(5, "日 日 12h 入 明")]), row("休", &[(5, "日 日 12h 入 明"), (12, "日 日 12h 入 明")])]);
    let good = roster(&cfg, &[row("休", &[]), row("休", &[])]);
    check(ConstraintId::night_soft(35), &cfg, &bad, p(2), &good);
}

// ---------------------------------------------------------------- day hard

pub fn day_alphabet_and_previous_month() {
    let cfg = plain(1);
    let mut bad = roster(&cfg, &[row("休", &[(1, "未")])]);
    bad.set(0, T + 3, ShiftSymbol::NightIn, Provenance::Solved(Stage::Day));
    let mut good = roster(&cfg, &[row("休", &[])]);
    good.set(0, T + 3, ShiftSymbol::Day, Provenance::Solved(Stage::Day));
    check(ConstraintId::day_hard(1), &cfg, &bad, p(2), &good);
}

pub fn night_only_nurses_take_no_day_shifts() {
    let cfg = ward(vec![Nurse { night_class: NightClass::NightOnly, ..nurse("o") }]);
    let bad = roster(&cfg, &[row("休", &[(T, "日"), (T + 3, "日")])]);
    let good = roster(&cfg, &[row("休", &[(T, "入 明")])]);
    check(ConstraintId::day_hard(2), &cfg, &bad, p(2), &good);
}

pub fn month_end_work_run() {
    let cfg = plain(1);
    let bad = roster(&cfg, &[row("休", &[(14, "日 日 日 日 入")])]);
    let good = roster(&cfg, &[row("休", &[(14, "休 日 日 日 入")])]);
    check(ConstraintId::day_hard(5), &cfg, &bad, p(1), &good);
}

pub fn three_days_before_a_long_day() {
    let cfg = plain(1);
    let bad = roster(&cfg, &[row("休", &[(6, "日 日 日 12h")])]);
    let good = roster(&cfg, &[row("休", &[(6, "日 日 休 12h")])]);
    check(ConstraintId::day_hard(6), &cfg, &bad, p(1), &good);
}

pub fn no_unset_cells_after_the_day_stage() {
    let cfg = plain(1);
    let bad = roster(&cfg, &[row("休", &[(T, "未 未"), (18, "未")])]);
    let good = roster(&cfg, &[row("休", &[(19, "未 未")])]);
    check(ConstraintId::day_hard(9), &cfg, &bad, p(3), &good);
}

// ---------------------------------------------------------------- day soft

pub fn day_leaders() {
    let cfg = ward(vec![Nurse { day_leader: true, ..nurse("l") }]);
    // Wednesday off and Sunday off; Saturday 12h counts on a weekend
    let bad = roster(&cfg, &[row("日", &[(7, "休"), (10, "12h 休")])]);
    let good = roster(&cfg, &[row("日", &[(10, "12h")])]);
    check(ConstraintId::day_soft(21), &cfg, &bad, p(2), &good);
}

pub fn day_soft_sequences() {
    let cfg = plain(1);
    let bad = roster(&cfg, &[row("休", &[(T + 1, "遅 早")])]);
    let good = roster(&cfg, &[row("休", &[(T + 1, "早 遅")])]);
    check(ConstraintId::day_soft(23), &cfg, &bad, p(1), &good);
}

pub fn regular_off_count() {
    let mut cfg = plain(1);
    cfg.weekly_off = Some(4);
    let two = roster(&cfg, &[row("日", &[(T + 1, "休 休")])]);
    let four = roster(&cfg, &[row("日", &[(T + 1, "休 休"), (T + 8, "休 休")])]);
    let six = roster(&cfg, &[row("日", &[(T + 1, "休 休 休"), (T + 8, "休 休 休")])]);
    check(ConstraintId::day_soft(24), &cfg, &two, p(2), &four);
    check(ConstraintId::day_soft(25), &cfg, &six, p(2), &four);
}

pub fn weekend_offs() {
    let cfg = plain(1);
    let three = roster(&cfg, &[row("日", &[(10, "休 休"), (17, "休")])]);
    let four = roster(&cfg, &[row("日", &[(10, "休 休"), (17, "休 特休")])]);
    check(ConstraintId::day_soft(26), &cfg, &three, p(1), &four);
}

pub fn three_day_band_runs() {
    let cfg = ward(vec![nurse("a"), Nurse { short_hours: true, ..nurse("s") }]);
    let bad = roster(&cfg, &vec![row("休", &[(6, "日 日 日 日")]); 2]);
    let good = roster(&cfg, &[row("休", &[(6, "日 日 休 日 日")]), row("休", &[(6, "日 日 日 日")])]);
    check(ConstraintId::day_soft(27), &cfg, &bad, p(2), &good);
}

pub fn lone_off_after_five_days() {
    let cfg = plain(1);
    let bad = roster(&cfg, &[row("休", &[(T, "日 日 日 日 日 休 日")])]);
    let good = roster(&cfg, &[row("休", &[(T, "日 日 日 日 日 休 休")])]);
    check(ConstraintId::day_soft(28), &cfg, &bad, p(1), &good);
}

pub fn two_offs_in_nine_days() {
    let cfg = plain(1);
    let bad = roster(&cfg, &[row("日", &[(5, "休 休")])]);
    let good = roster(&cfg, &[row("日", &[(5, "休 休"), (11, "休 休"), (17, "休 休")])]);
    // windows start 0..=10; start 6 sees one off, starts 7..=10 see none
    check(ConstraintId::day_soft(29), &cfg, &bad, p(1 + 4 * 2), &good);
}

pub fn weekend_pair_off() {
    let cfg = ward(vec![nurse("a"), Nurse { off_preference: OffPreference::WeekendPair, ..nurse("b") }]);
    let bad = roster(&cfg, &vec![row("日", &[(10, "休"), (16, "休")]); 2]);
    let good = roster(&cfg, &vec![row("日", &[(10, "休 休")]); 2]);
    check(ConstraintId::day_soft(30), &cfg, &bad, p(1 + 5), &good);
}

pub fn double_offs() {
    let cfg = ward(vec![nurse("a"), Nurse { off_preference: OffPreference::PairOff, ..nurse("b") }]);
    let bad = roster(&cfg, &vec![row("日", &[(6, "休 休")]); 2]);
    let good = roster(&cfg, &vec![row("日", &[(6, "休 休"), (11, "休 休")]); 2]);
    check(ConstraintId::day_soft(31), &cfg, &bad, p(1 + 5), &good);
}

pub fn triple_off() {
    let cfg = ward(vec![nurse("a"), Nurse { off_preference: OffPreference::TripleOff, ..nurse("b") }]);
    let bad = roster(&cfg, &vec![row("日", &[]); 2]);
    let good = roster(&cfg, &vec![row("日", &[(T, "休 休 休")]); 2]);
    check(ConstraintId::day_soft(32), &cfg, &bad, p(1 + 5), &good);
}

pub fn single_day_between_offs() {
    let cfg = ward(vec![nurse("a"), Nurse { off_preference: OffPreference::SingleOff, ..nurse("b") }]);
    // a: two islands; b: three islands, two of them tolerated, times 5
    let bad = roster(
        &cfg,
        &[row("日", &[(6, "休 日 休 日 休")]), row("日", &[(6, "休 日 休 日 休 日 休")])],
    );
    let good = roster(&cfg, &[row("日", &[]), row("日", &[(6, "休 日 休 日 休")])]);
    check(ConstraintId::day_soft(33), &cfg, &bad, p(2 + 5), &good);
}

pub fn day_fairness_epigraph() {
    let cfg = plain(2);
    let clean = "休 休 休 休 日 休 休 日 日 休 休 休 日 日 休 日 日 休 休 日 日 休 休 休";
    // Saturday 17 worked: one weekend off short, 15..17 becomes a three-day
    // run, and the double off at 17..18 disappears
    let worked = "休 休 休 休 日 休 休 日 日 休 休 休 日 日 休 日 日 日 休 日 日 休 休 休";
    let bad = roster(&cfg, &[worked.to_string(), clean.to_string()]);
    let good = roster(&cfg, &[clean.to_string(), clean.to_string()]);
    check(ConstraintId::day_soft(34), &cfg, &bad, p(3), &good);
}

pub const CASES: &[(&str, fn())] = &[
    ("staffing_bounds_both_stages", staffing_bounds_both_stages),
    ("pairs_and_forbidden_pairs_both_stages", pairs_and_forbidden_pairs_both_stages),
    ("forbidden_assignments_both_stages", forbidden_assignments_both_stages),
    ("night_alphabet_and_previous_month", night_alphabet_and_previous_month),
    ("night_prev_tail", night_prev_tail),
    ("night_first_day_follows_prev_night", night_first_day_follows_prev_night),
    ("night_month_end", night_month_end),
    ("six_day_cap_both_stages", six_day_cap_both_stages),
    ("standard_sequences_both_stages", standard_sequences_both_stages),
    ("day_only_nurses_take_no_nights", day_only_nurses_take_no_nights),
    ("fixed_night_count", fixed_night_count),
    ("night_start_spacing", night_start_spacing),
    ("max_runs_both_stages", max_runs_both_stages),
    ("triple_off_candidates", triple_off_candidates),
    ("leader_availability", leader_availability),
    ("men_range_both_stages", men_range_both_stages),
    ("one_symbol_per_cell_lives_in_the_program", one_symbol_per_cell_lives_in_the_program),
    ("night_soft_sequences", night_soft_sequences),
    ("off_reserve", off_reserve),
    ("night_gap_over_two_weeks", night_gap_over_two_weeks),
    ("night_count_bounds", night_count_bounds),
    ("weekend_night_smoothing", weekend_night_smoothing),
    ("event_day_smoothing", event_day_smoothing),
    ("five_run_into_night", five_run_into_night),
    ("five_one_four", five_one_four),
    ("three_nights_in_nine_days", three_nights_in_nine_days),
    ("four_nights_short_windows", four_nights_short_windows),
    ("four_nights_in_two_weeks", four_nights_in_two_weeks),
    ("night_fairness_epigraphs", night_fairness_epigraphs),
    ("day_alphabet_and_previous_month", day_alphabet_and_previous_month),
    ("night_only_nurses_take_no_day_shifts", night_only_nurses_take_no_day_shifts),
    ("month_end_work_run", month_end_work_run),
    ("three_days_before_a_long_day", three_days_before_a_long_day),
    ("no_unset_cells_after_the_day_stage", no_unset_cells_after_the_day_stage),
    ("day_leaders", day_leaders),
    ("day_soft_sequences", day_soft_sequences),
    ("regular_off_count", regular_off_count),
    ("weekend_offs", weekend_offs),
    ("three_day_band_runs", three_day_band_runs),
    ("lone_off_after_five_days", lone_off_after_five_days),
    ("two_offs_in_nine_days", two_offs_in_nine_days),
    ("weekend_pair_off", weekend_pair_off),
    ("double_offs", double_offs),
    ("triple_off", triple_off),
    ("single_day_between_offs", single_day_between_offs),
    ("day_fairness_epigraph", day_fairness_epigraph),
];
