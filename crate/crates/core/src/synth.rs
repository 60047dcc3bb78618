//! Seeded synthetic wards and wish tables: a 29-nurse acute-care ward shape
//! for desk-scale runs, and small random wards for oracle and property tests.

use std::collections::BTreeSet;

use chrono::{NaiveDate, Weekday};
use num_rational::Ratio;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{
    build_calendar, Bounds, CalendarWindow, DayClass, DayTable, ForbiddenAssignment, ForbiddenPair,
    NightClass, NightPattern, Nurse, OffPreference, Pair, Provenance, Roster, Sequence, ShiftSymbol,
    Stage, StaffCategory, Team, WardConfig,
};
use ShiftSymbol::*;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const PREFS: [OffPreference; 5] = [
    OffPreference::WeekendPair,
    OffPreference::TripleOff,
    OffPreference::PairOff,
    OffPreference::SingleOff,
    OffPreference::None,
];

/// 29 nurses (25 night-capable), nights staffed 4 on weekdays and 3 on
/// weekends and holidays, day/night/off shifts only, rookie rules on.
pub fn ward_a(year_month: &str, holidays: &[NaiveDate]) -> crate::Result<WardConfig> {
    let cal = build_calendar(year_month, holidays, &[Weekday::Tue])?;
    let mut nurses = Vec::new();
    for i in 0..29 {
        let mut n = Nurse::new(format!("n{:02}", i + 1));
        n.group = match i {
            0 => None,
            1..=6 => Some(1),
            7..=14 => Some(2),
            15..=22 => Some(3),
            _ => Some(4),
        };
        n.night_class = if matches!(i, 0 | 1 | 7 | 15) { NightClass::DayOnly } else { NightClass::NightCapable };
        n.day_leader = (1..=10).contains(&i);
        n.rookie = i >= 25;
        n.male = matches!(i, 5 | 12 | 20);
        n.team = Some(if i % 2 == 0 { Team::A } else { Team::B });
        n.off_preference = PREFS[i % PREFS.len()];
        if n.works_nights() {
            n.night_lb = Some(4);
            n.night_ub = Some(5);
        }
        nurses.push(n);
    }
    let mut cfg = WardConfig::new(nurses, cal);
    cfg.toggles.team = false;
    cfg.toggles.male = false;
    let night = &mut cfg.staffing.night;
    night.all = exact(DayTable::split(4, 3));
    night.group12.lb = DayTable::constant(1);
    night.rookie.ub = DayTable::constant(1);
    let day = &mut cfg.staffing.day;
    day.all = Bounds::new(DayTable::split(8, 5), DayTable::split(14, 9));
    day.group1.lb = DayTable::split(2, 1);
    day.rookie.ub = DayTable::constant(2);
    cfg.notes = "synthetic acute-care ward, 29 nurses".into();
    Ok(cfg)
}

fn exact(t: DayTable<Option<u32>>) -> Bounds {
    Bounds::new(t, t)
}

/// Previous-month tails that satisfy every hard rule on their own.
const NIGHT_TAILS: [[ShiftSymbol; 5]; 6] = [
    [Day, Day, Off, Day, Day],
    [Off, Day, Day, LongDay, NightIn],
    [Day, NightIn, NightOut, Off, Day],
    [NightIn, NightOut, Off, Day, Day],
    [Day, Off, Day, Day, Off],
    [NightOut, Off, Off, Day, Day],
];
const DAY_TAILS: [[ShiftSymbol; 5]; 3] =
    [[Day, Day, Off, Day, Day], [Off, Day, Day, Day, Off], [Day, Off, Off, Day, Day]];

/// Wish table: hard-consistent previous-month tails, a few requested offs
/// per nurse, the occasional off-ward duty, next month left unset.
pub fn wishes(cfg: &WardConfig, seed: u64, offs_per_nurse: usize) -> Roster {
    let mut r = rng(seed);
    let mut out = Roster::blank(cfg);
    let cal = &cfg.calendar;
    let t = cal.target_range();
    for (n, nurse) in cfg.nurses.iter().enumerate() {
        let tail = if nurse.works_nights() { *NIGHT_TAILS.choose(&mut r).unwrap() } else { *DAY_TAILS.choose(&mut r).unwrap() };
        for (i, d) in cal.prev_range().enumerate() {
            out.set(n, d, tail[i], Provenance::FixedPrevMonth);
        }
        let busy = out.get(n, cal.prev_last()) == NightIn;
        let mut days: Vec<usize> = t.clone().filter(|&d| !(busy && d <= t.start + 1)).collect();
        for _ in 0..offs_per_nurse.min(days.len()) {
            let k = r.random_range(0..days.len());
            let d = days.swap_remove(k);
            let s = match r.random_range(0..10) {
                0 => SpecialOff,
                1 if t.len() > 7 => Other,
                _ => Off,
            };
            out.set(n, d, s, Provenance::Wish);
        }
    }
    out
}

/// A small ward with every attribute drawn at random. Bounds stay loose
/// enough that leaving every free cell unset is night-feasible.
pub fn random_ward(seed: u64, nurse_count: usize, target_len: usize) -> WardConfig {
    let mut r = rng(seed);
    let start = NaiveDate::from_ymd_opt(2024, 11, 1).unwrap() + chrono::Days::new(r.random_range(0..28));
    let mut holidays = BTreeSet::new();
    if r.random_bool(0.4) {
        holidays.insert(start + chrono::Days::new(r.random_range(0..target_len as u64)));
    }
    let events: Vec<Weekday> = [Weekday::Tue, Weekday::Thu].into_iter().filter(|_| r.random_bool(0.5)).collect();
    let cal = CalendarWindow::custom(start, target_len, &holidays, &events).unwrap();
    let mut nurses = Vec::new();
    for i in 0..nurse_count {
        let mut n = Nurse::new(format!("r{i}"));
        n.night_class = match r.random_range(0..8) {
            0 => NightClass::DayOnly,
            1 => NightClass::NightOnly,
            _ => NightClass::NightCapable,
        };
        n.rookie = r.random_bool(0.3);
        n.male = r.random_bool(0.3);
        n.day_leader = r.random_bool(0.4);
        n.group = if r.random_bool(0.85) { Some(r.random_range(1..=4)) } else { None };
        n.team = [None, Some(Team::A), Some(Team::B)][r.random_range(0..3)];
        n.off_preference = PREFS[r.random_range(0..PREFS.len())];
        n.short_hours = r.random_bool(0.15);
        n.care_worker = r.random_bool(0.3);
        if n.works_nights() && r.random_bool(0.6) {
            let lb = r.random_range(0..3);
            n.night_lb = Some(lb);
            n.night_ub = Some(lb + r.random_range(0..3));
        }
        if r.random_bool(0.2) {
            n.weekly_off = Some(r.random_range(1..4));
        }
        nurses.push(n);
    }
    let mut cfg = WardConfig::new(nurses, cal);
    cfg.night_pattern = if r.random_bool(0.8) { NightPattern::TwelveHour } else { NightPattern::SixteenHour };
    cfg.toggles.team = r.random_bool(0.5);
    cfg.toggles.rookie = r.random_bool(0.7);
    cfg.toggles.male = r.random_bool(0.5);
    cfg.toggles.care_worker = r.random_bool(0.3);
    cfg.day_extra_shifts = r.random_bool(0.3);
    cfg.off_reserve = r.random_range(0..3);
    cfg.weekend_off_min = r.random_range(0..3);
    if r.random_bool(0.3) {
        cfg.avg_fssm = Some(Ratio::new(r.random_range(0..7), r.random_range(1..4)));
    }
    for stage in [Stage::Night, Stage::Day] {
        let band = cfg.staffing.band_mut(stage);
        for cat in [
            StaffCategory::All,
            StaffCategory::Group1,
            StaffCategory::Group12,
            StaffCategory::Group4,
            StaffCategory::TeamGroup1,
            StaffCategory::TeamGroup12,
            StaffCategory::TeamGroup34,
            StaffCategory::Team,
            StaffCategory::Rookie,
            StaffCategory::CareWorker,
        ] {
            if r.random_bool(0.5) {
                let b = band.get_mut(cat);
                let lb = r.random_range(0..3);
                b.lb = DayTable::split(lb, lb.saturating_sub(1));
                if r.random_bool(0.5) {
                    b.ub = DayTable::constant(lb + r.random_range(0..2));
                }
            }
        }
        if r.random_bool(0.3) {
            band.men.ub = DayTable::constant(r.random_range(1..3));
        }
    }
    let ids: Vec<String> = cfg.nurses.iter().map(|n| n.id.clone()).collect();
    if nurse_count >= 2 {
        let (a, b) = (ids[0].clone(), ids[1].clone());
        if r.random_bool(0.5) {
            let s = if r.random_bool(0.5) { NightIn } else { Day };
            cfg.pairs.push(Pair { n1: a.clone(), n2: b.clone(), s1: s, s2: s, min: r.random_range(1..3), stage: None });
        }
        if r.random_bool(0.5) {
            cfg.forbidden_pairs.push(ForbiddenPair { n1: b, n2: a, s1: NightIn, s2: NightIn, stage: None });
        }
    }
    if r.random_bool(0.5) {
        cfg.forbidden_assignments.push(ForbiddenAssignment {
            nurse: ids[r.random_range(0..ids.len())].clone(),
            symbol: [NightIn, Day][r.random_range(0..2)],
            day: DayClass::ALL[r.random_range(0..8)],
            stage: None,
        });
    }
    if r.random_bool(0.5) {
        cfg.sequences.night_soft.push(Sequence::new(&[NightOut, Off, NightIn]));
    }
    for id in crate::catalog::soft_ids(Stage::Night, &cfg)
        .into_iter()
        .chain(crate::catalog::soft_ids(Stage::Day, &cfg))
    {
        if r.random_bool(0.2) {
            cfg.weights.alpha.insert(id, r.random_range(0..60));
        }
    }
    cfg
}

/// Wishes for a random ward: tails as in [`wishes`], then each target cell
/// fixed with probability `density` to an off or, for night workers, to a
/// complete night block when it fits.
pub fn random_wishes(cfg: &WardConfig, seed: u64, density: f64) -> Roster {
    let mut r = rng(seed);
    let mut out = wishes(cfg, seed ^ 0x5eed, 0);
    let t = cfg.calendar.target_range();
    for n in 0..cfg.nurses.len() {
        let mut d = t.start;
        if out.get(n, cfg.calendar.prev_last()) == NightIn {
            d += 2;
        }
        while d < t.end {
            if r.random_bool(density) {
                let s = match r.random_range(0..6) {
                    0 => SpecialOff,
                    1 => Day,
                    _ => Off,
                };
                out.set(n, d, s, Provenance::Wish);
            }
            d += 1;
        }
    }
    out
}

/// A roster with uniformly random symbols in every cell. Used only to
/// exercise evaluators on arbitrary input.
pub fn noise_roster(cfg: &WardConfig, seed: u64) -> Roster {
    let mut r = rng(seed);
    let mut out = Roster::blank(cfg);
    for n in 0..cfg.nurses.len() {
        for d in 0..cfg.calendar.len() {
            let s = ShiftSymbol::ALL[r.random_range(0..10)];
            let p = out.provenance(n, d);
            out.set(n, d, s, p);
        }
    }
    out
}
