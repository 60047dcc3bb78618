//! Direct evaluation of every rule on a concrete roster. Written as plain
//! loops over the formulas, with no shared machinery with the term compiler,
//! so the two can be checked against each other.

use std::ops::Range;

use num_rational::Ratio;
use num_traits::Zero;

use super::{
    epigraph_members, is_enabled, soft_ids, BreakdownEntry, CellRef, ConstraintId, Kind, Penalty,
    SoftPenaltyBreakdown, ViolationRecord,
};
use crate::domain::{
    NightClass, NightPattern, OffPreference, Provenance, Roster, ShiftSymbol, Stage, StaffCategory,
    SymbolSet, WardConfig, WeekdayClass, WindowSet,
};
use crate::error::{Error, Result};
use ShiftSymbol::*;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoftEval {
    pub id: ConstraintId,
    pub total: Penalty,
    pub per_nurse: Vec<Penalty>,
    pub records: Vec<ViolationRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evaluation {
    /// Switched off by a ward toggle or the night pattern.
    Disabled,
    Value(SoftEval),
}

impl Evaluation {
    pub fn total(&self) -> Option<Penalty> {
        match self {
            Evaluation::Disabled => None,
            Evaluation::Value(v) => Some(v.total),
        }
    }

    pub fn value(&self) -> Option<&SoftEval> {
        match self {
            Evaluation::Disabled => None,
            Evaluation::Value(v) => Some(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HardCheck {
    Disabled,
    Records(Vec<ViolationRecord>),
}

impl HardCheck {
    pub fn records(&self) -> &[ViolationRecord] {
        match self {
            HardCheck::Disabled => &[],
            HardCheck::Records(r) => r,
        }
    }

    pub fn is_satisfied(&self) -> bool {
        self.records().is_empty()
    }
}

fn int(v: i64) -> Penalty {
    Ratio::from_integer(v)
}

fn pos(v: Penalty) -> Penalty {
    if v > Penalty::zero() {
        v
    } else {
        Penalty::zero()
    }
}

struct Ctx<'a> {
    cfg: &'a WardConfig,
    r: &'a Roster,
    id: ConstraintId,
    keep_records: bool,
    total: Penalty,
    per_nurse: Vec<Penalty>,
    records: Vec<ViolationRecord>,
}

impl<'a> Ctx<'a> {
    fn new(id: ConstraintId, r: &'a Roster, cfg: &'a WardConfig, keep_records: bool) -> Self {
        Ctx {
            cfg,
            r,
            id,
            keep_records,
            total: Penalty::zero(),
            per_nurse: vec![Penalty::zero(); cfg.nurses.len()],
            records: Vec::new(),
        }
    }

    fn is(&self, n: usize, d: usize, set: SymbolSet) -> bool {
        set.contains(self.r.get(n, d))
    }

    fn b(&self, n: usize, d: usize, set: SymbolSet) -> i64 {
        self.is(n, d, set) as i64
    }

    fn count(&self, n: usize, days: Range<usize>, set: SymbolSet) -> i64 {
        days.filter(|&d| self.is(n, d, set)).count() as i64
    }

    fn count_in(&self, n: usize, days: &[usize], set: SymbolSet) -> i64 {
        days.iter().filter(|&&d| self.is(n, d, set)).count() as i64
    }

    /// Adds one max(0, ·) term. `value` is the clipped term; `mult` the
    /// per-nurse preference multiplier.
    fn add(
        &mut self,
        nurse: Option<usize>,
        day: Option<usize>,
        value: Penalty,
        mult: i64,
        note: impl FnOnce() -> String,
        support: impl FnOnce() -> Vec<(usize, usize)>,
    ) {
        if value <= Penalty::zero() {
            return;
        }
        let w = value * mult;
        self.total += w;
        if let Some(n) = nurse {
            self.per_nurse[n] += w;
        }
        if self.keep_records {
            let cells = support();
            self.records.push(ViolationRecord {
                constraint: self.id,
                nurse: nurse.map(|n| self.cfg.nurses[n].id.clone()),
                date: day.map(|d| self.cfg.calendar.date(d)),
                magnitude: value,
                note: note(),
                support: cells
                    .into_iter()
                    .map(|(n, d)| CellRef {
                        nurse: self.cfg.nurses[n].id.clone(),
                        date: self.cfg.calendar.date(d),
                    })
                    .collect(),
            });
        }
    }

    fn window(n: usize, d: usize, len: usize) -> Vec<(usize, usize)> {
        (d..d + len).map(|x| (n, x)).collect()
    }
}

fn band(stage: Stage) -> SymbolSet {
    match stage {
        Stage::Night => SymbolSet::NIGHT_BAND,
        Stage::Day => SymbolSet::DAY_BAND,
    }
}

/// Staffing template behind soft indices 1..=18.
pub(crate) fn staffing_template(id: ConstraintId) -> Option<(StaffCategory, bool)> {
    if id.kind != Kind::Soft || !(1..=18).contains(&id.index) {
        return None;
    }
    let lower = id.index % 2 == 1;
    let cat = match id.index {
        1 | 2 => StaffCategory::All,
        3 | 4 => StaffCategory::Group1,
        5 | 6 => StaffCategory::Group12,
        7 | 8 => StaffCategory::Group4,
        9 | 10 => StaffCategory::TeamGroup1,
        11 | 12 => StaffCategory::TeamGroup12,
        13 | 14 => StaffCategory::TeamGroup34,
        15 | 16 => StaffCategory::Team,
        _ if id.care_worker => StaffCategory::CareWorker,
        _ => StaffCategory::Rookie,
    };
    Some((cat, lower))
}

pub(crate) fn night_mult(cfg: &WardConfig, n: usize, index: u8) -> i64 {
    let p = cfg.nurses[n].off_preference;
    let m = &cfg.weights.multipliers;
    match index {
        27 if p == OffPreference::WeekendPair => m.night_fssm,
        29 if p == OffPreference::SingleOff => m.night_five_run,
        31 if matches!(p, OffPreference::PairOff | OffPreference::TripleOff) => m.night_three_nights,
        _ => 1,
    }
}

pub(crate) fn day_mult(cfg: &WardConfig, n: usize, index: u8) -> i64 {
    let p = cfg.nurses[n].off_preference;
    let m = &cfg.weights.multipliers;
    match index {
        30 if p == OffPreference::WeekendPair => m.day_weekend_pair,
        31 if p == OffPreference::PairOff => m.day_pair_off,
        32 if p == OffPreference::TripleOff => m.day_triple_off,
        33 if p == OffPreference::SingleOff => m.day_single_day,
        _ => 1,
    }
}

fn sym_set(s: &[ShiftSymbol]) -> SymbolSet {
    SymbolSet::from_symbols(s)
}

fn check_id(id: ConstraintId, want: Kind) -> Result<()> {
    if id.kind != want {
        let name = |k: Kind| if k == Kind::Hard { "hard" } else { "soft" };
        return Err(Error::WrongKind { id: id.to_string(), expected: name(want), actual: name(id.kind) });
    }
    let size = super::id::family_size(id.stage, id.kind);
    if id.index == 0 || id.index > size || (id.care_worker && !matches!(id.index, 17 | 18)) {
        return Err(Error::UnknownConstraint(id.to_string()));
    }
    Ok(())
}

/// Value of one soft rule on a roster, computed straight from its formula.
pub fn evaluate_soft(id: ConstraintId, roster: &Roster, cfg: &WardConfig) -> Result<Evaluation> {
    evaluate_soft_with(id, roster, cfg, true)
}

pub(crate) fn evaluate_soft_with(
    id: ConstraintId,
    roster: &Roster,
    cfg: &WardConfig,
    keep_records: bool,
) -> Result<Evaluation> {
    check_id(id, Kind::Soft)?;
    if !is_enabled(id, cfg) {
        return Ok(Evaluation::Disabled);
    }
    let mut c = Ctx::new(id, roster, cfg, keep_records);
    if let Some(members) = epigraph_members(id) {
        let nurses: Vec<usize> = match id.stage {
            Stage::Night => cfg.night_capable(),
            Stage::Day => (0..cfg.nurses.len()).collect(),
        };
        let mut sums = vec![Penalty::zero(); cfg.nurses.len()];
        for &m in members {
            let mid = ConstraintId::new(id.stage, Kind::Soft, m);
            if let Evaluation::Value(v) = evaluate_soft_with(mid, roster, cfg, false)? {
                for n in 0..sums.len() {
                    sums[n] += v.per_nurse[n];
                }
            }
        }
        let mut best: Option<usize> = None;
        for &n in &nurses {
            c.per_nurse[n] = sums[n];
            if best.is_none_or(|b| sums[n] > sums[b]) {
                best = Some(n);
            }
        }
        if let Some(b) = best {
            let v = sums[b];
            c.total = pos(v);
            if keep_records && v > Penalty::zero() {
                c.records.push(ViolationRecord {
                    constraint: id,
                    nurse: Some(cfg.nurses[b].id.clone()),
                    date: None,
                    magnitude: v,
                    note: format!("largest per-nurse penalty sum {}", super::penalty_serde::format(&v)),
                    support: vec![],
                });
            }
        }
        return Ok(Evaluation::Value(SoftEval {
            id,
            total: c.total,
            per_nurse: c.per_nurse,
            records: c.records,
        }));
    }
    if let Some((cat, lower)) = staffing_template(id) {
        staffing(&mut c, cat, lower);
    } else {
        match id.stage {
            Stage::Night => night_soft(&mut c),
            Stage::Day => day_soft(&mut c),
        }
    }
    Ok(Evaluation::Value(SoftEval { id, total: c.total, per_nurse: c.per_nurse, records: c.records }))
}

fn staffing(c: &mut Ctx, cat: StaffCategory, lower: bool) {
    let cfg = c.cfg;
    let cal = &cfg.calendar;
    let bounds = cfg.staffing.band(c.id.stage).get(cat);
    let set = band(c.id.stage);
    for (team, members) in cfg.category_members(cat) {
        for d in cal.target_range() {
            let class = cal.day_class(d);
            let bound = if lower { bounds.lb.get(class) } else { bounds.ub.get(class) };
            let Some(bound) = bound else { continue };
            let count = members.iter().filter(|&&n| c.is(n, d, set)).count() as i64;
            let v = if lower { bound as i64 - count } else { count - bound as i64 };
            let label = match team {
                Some(t) => format!("{} team {:?}", cat.key(), t),
                None => cat.key().to_string(),
            };
            c.add(
                None,
                Some(d),
                int(v.max(0)),
                1,
                || {
                    format!(
                        "{label}: {count} on shift, {} bound {bound}",
                        if lower { "lower" } else { "upper" }
                    )
                },
                Vec::new,
            );
        }
    }
}

fn pairs(c: &mut Ctx) {
    let cfg = c.cfg;
    let cal = &cfg.calendar;
    let stage = c.id.stage;
    for p in cfg.pairs.iter().filter(|p| p.stage.is_none_or(|s| s == stage)) {
        let (Ok(n1), Ok(n2)) = (cfg.nurse_index(&p.n1), cfg.nurse_index(&p.n2)) else { continue };
        let together = cal
            .target_range()
            .filter(|&d| c.r.get(n1, d) == p.s1 && c.r.get(n2, d) == p.s2)
            .count() as i64;
        let v = p.min as i64 - together;
        c.add(None, None, int(v.max(0)), 1, || {
            format!("pair {}/{} together {together} times, minimum {}", p.n1, p.n2, p.min)
        }, Vec::new);
    }
}

fn forbidden_pairs(c: &mut Ctx) {
    let cfg = c.cfg;
    let cal = &cfg.calendar;
    let stage = c.id.stage;
    for p in cfg.forbidden_pairs.iter().filter(|p| p.stage.is_none_or(|s| s == stage)) {
        let (Ok(n1), Ok(n2)) = (cfg.nurse_index(&p.n1), cfg.nurse_index(&p.n2)) else { continue };
        for d in cal.target_range() {
            let v = (c.r.get(n1, d) == p.s1) as i64 + (c.r.get(n2, d) == p.s2) as i64 - 1;
            c.add(None, Some(d), int(v.max(0)), 1, || {
                format!("forbidden pair {}/{} on the same day", p.n1, p.n2)
            }, Vec::new);
        }
    }
}

fn forbidden_assignments(c: &mut Ctx) {
    let cfg = c.cfg;
    let cal = &cfg.calendar;
    let stage = c.id.stage;
    for f in cfg.forbidden_assignments.iter().filter(|f| f.stage.is_none_or(|s| s == stage)) {
        let Ok(n) = cfg.nurse_index(&f.nurse) else { continue };
        for d in cal.target_range().filter(|&d| cal.day_class(d) == f.day) {
            let v = (c.r.get(n, d) == f.symbol) as i64;
            c.add(Some(n), Some(d), int(v), 1, || {
                format!("{} on a forbidden {:?}", f.symbol.glyph(), f.day)
            }, Vec::new);
        }
    }
}

fn soft_sequences(c: &mut Ctx) {
    let cfg = c.cfg;
    for seq in cfg.sequences.soft(c.id.stage) {
        let len = seq.symbols.len();
        if len == 0 {
            continue;
        }
        for n in 0..cfg.nurses.len() {
            if !seq.applies(cfg.nurses[n].night_class) {
                continue;
            }
            for d in cfg.calendar.window_starts(WindowSet::Forbidden(len)) {
                let hits = (0..len).filter(|&i| c.r.get(n, d + i) == seq.symbols[i]).count() as i64;
                let v = hits - (len as i64 - 1);
                c.add(Some(n), Some(d), int(v.max(0)), 1, || {
                    format!("discouraged sequence {}", render(&seq.symbols))
                }, Vec::new);
            }
        }
    }
}

fn render(s: &[ShiftSymbol]) -> String {
    s.iter().map(|x| x.glyph()).collect::<Vec<_>>().join("-")
}

fn night_soft(c: &mut Ctx) {
    let cfg = c.cfg;
    let cal = &cfg.calendar;
    let t = cal.target_range();
    let nn = cfg.night_capable();
    let nw = cfg.night_workers();
    let ins = SymbolSet::of(NightIn);
    let outs = SymbolSet::of(NightOut);
    let idx = c.id.index;
    match idx {
        19 => pairs(c),
        20 => forbidden_pairs(c),
        21 => forbidden_assignments(c),
        22 => soft_sequences(c),
        23 => {
            for n in 0..cfg.nurses.len() {
                let placed = c.count(n, t.clone(), SymbolSet::of(Off));
                let left = cfg.n_off(n) as i64 - placed;
                let v = cfg.off_reserve as i64 - left;
                c.add(Some(n), None, int(v.max(0)), 1, || {
                    format!("{left} regular offs left for the day stage")
                }, Vec::new);
            }
        }
        24 => {
            for &n in &nw {
                for d in cal.window_starts(WindowSet::IntervalUpper) {
                    let v = 1 - c.count(n, d..d + 14, ins);
                    c.add(Some(n), Some(d), int(v.max(0)), 1, || "14 days without a night".into(), Vec::new);
                }
            }
        }
        25 | 26 => {
            for &n in &nw {
                let nurse = &cfg.nurses[n];
                let a = c.count(n, t.clone(), ins);
                let b = c.count(n, t.clone(), outs);
                let v = if idx == 25 {
                    let Some(lb) = nurse.night_lb else { continue };
                    lb as i64 - a.min(b)
                } else {
                    let Some(ub) = nurse.night_ub else { continue };
                    a.max(b) - ub as i64
                };
                c.add(Some(n), None, int(v.max(0)), 1, || {
                    format!("{a} night starts and {b} night ends in the month")
                }, Vec::new);
            }
        }
        27 | 28 => {
            let (days, avg) = if idx == 27 {
                (cal.fssm_days(), cfg.fssm_average())
            } else {
                (cal.event_days(), cfg.ope_average())
            };
            for &n in &nn {
                let k = c.count_in(n, &days, ins);
                let v = pos(int(k) - avg);
                let m = night_mult(cfg, n, idx);
                c.add(Some(n), None, v, m, || format!("{k} nights on smoothed days"), Vec::new);
            }
        }
        29 => {
            let long_or_unset = SymbolSet::LONG_OR_UNSET;
            for &n in &nn {
                let m = night_mult(cfg, n, 29);
                for d in cal.window_starts(WindowSet::FiveRunWithNight) {
                    let s = c.b(n, d, SymbolSet::DAY)
                        + c.b(n, d + 1, SymbolSet::DAY)
                        + c.b(n, d + 2, long_or_unset)
                        + c.b(n, d + 3, ins);
                    c.add(Some(n), Some(d), int((s - 3).max(0)), m, || "five-run ending in a night".into(), Vec::new);
                }
            }
        }
        30 => {
            let lu = SymbolSet::LONG_OR_UNSET;
            let day = SymbolSet::DAY;
            let off = SymbolSet::OFF;
            let a_pat = [day, day, lu, ins, outs, off, day, lu, ins, outs];
            let b_pat = [day, lu, ins, outs, off, day, day, lu, ins, outs];
            for &n in &nn {
                for d in cal.window_starts(WindowSet::FiveOneFour) {
                    let fa: i64 = (0..10).map(|h| c.b(n, d + h, a_pat[h])).sum();
                    let fb: i64 = (0..10).map(|h| c.b(n, d + h, b_pat[h])).sum();
                    let v = fa.max(fb) - 9;
                    c.add(Some(n), Some(d), int(v.max(0)), 1, || "run of five and four around a single off".into(), Vec::new);
                }
            }
        }
        31 => {
            for &n in &nn {
                let m = night_mult(cfg, n, 31);
                for d in cal.window_starts(WindowSet::ThreeNights) {
                    let k = c.count(n, d..d + 9, ins);
                    c.add(Some(n), Some(d), int((k - 2).max(0)), m, || format!("{k} nights in nine days"), Vec::new);
                }
            }
        }
        32 => {
            for &n in &nn {
                for d in cal.window_starts(WindowSet::FourNights) {
                    let k = c.count(n, d..d + 13, ins);
                    c.add(Some(n), Some(d), int((k - 3).max(0)), 1, || format!("{k} nights in 13 days"), Vec::new);
                }
            }
            for n in cfg.nurses_where(|x| x.night_class == NightClass::NightOnly) {
                for d in cal.window_starts(WindowSet::FourNightsOnly) {
                    let k = c.count(n, d..d + 10, ins);
                    c.add(Some(n), Some(d), int((k - 3).max(0)), 1, || format!("{k} nights in 10 days"), Vec::new);
                }
            }
        }
        33 => {
            for &n in &nn {
                for d in cal.window_starts(WindowSet::TwoWeekFourNights) {
                    let k = c.count(n, d..d + 14, ins);
                    c.add(Some(n), Some(d), int((k - 3).max(0)), 1, || format!("{k} nights in 14 days"), Vec::new);
                }
            }
        }
        _ => unreachable!("night soft {idx}"),
    }
}

fn day_soft(c: &mut Ctx) {
    let cfg = c.cfg;
    let cal = &cfg.calendar;
    let t = cal.target_range();
    let all: Vec<usize> = (0..cfg.nurses.len()).collect();
    let off = SymbolSet::OFF;
    let work = SymbolSet::WORK;
    let idx = c.id.index;
    match idx {
        19 => pairs(c),
        20 => forbidden_pairs(c),
        21 => {
            let leaders = cfg.nurses_where(|n| n.day_leader);
            let toff = cal.target_off_days();
            for d in t.clone() {
                let set = if toff.contains(&d) { sym_set(&[Day, LongDay]) } else { SymbolSet::of(Day) };
                let k = leaders.iter().filter(|&&n| c.is(n, d, set)).count() as i64;
                c.add(None, Some(d), int((1 - k).max(0)), 1, || "no leader on the day band".into(), Vec::new);
            }
        }
        22 => forbidden_assignments(c),
        23 => soft_sequences(c),
        24 | 25 => {
            for &n in &all {
                let k = c.count(n, t.clone(), SymbolSet::of(Off));
                let target = cfg.n_off(n) as i64;
                let v = if idx == 24 { target - k } else { k - target };
                c.add(Some(n), None, int(v.max(0)), 1, || format!("{k} regular offs, target {target}"), Vec::new);
            }
        }
        26 => {
            let toff = cal.target_off_days();
            for &n in &all {
                let k = c.count_in(n, &toff, off);
                let v = cfg.weekend_off_min as i64 - k;
                c.add(Some(n), None, int(v.max(0)), 1, || format!("{k} weekend or holiday offs"), Vec::new);
            }
        }
        27 => {
            let set = SymbolSet::DAY.without(Other);
            for n in cfg.nurses_where(|x| !x.short_hours) {
                for d in cal.window_starts(WindowSet::ThreeDay) {
                    let k = c.count(n, d..d + 3, set);
                    c.add(Some(n), Some(d), int((k - 2).max(0)), 1, || "three day-band shifts in a row".into(), Vec::new);
                }
            }
        }
        28 => {
            for &n in &all {
                for d in cal.window_starts(WindowSet::FiveThenSingleOff) {
                    let s = c.count(n, d..d + 5, work) + c.b(n, d + 5, off) + c.b(n, d + 6, work);
                    c.add(Some(n), Some(d), int((s - 6).max(0)), 1, || "single off after five work days".into(), Vec::new);
                }
            }
        }
        29 => {
            for &n in &all {
                for d in cal.window_starts(WindowSet::NineDayTwoOff) {
                    let k = c.count(n, d..d + 9, off);
                    c.add(Some(n), Some(d), int((2 - k).max(0)), 1, || format!("{k} offs in nine days"), Vec::new);
                }
            }
        }
        30 => {
            let sats = cal.saturdays();
            for &n in &all {
                let k = sats.iter().filter(|&&d| c.is(n, d, off) && c.is(n, d + 1, off)).count() as i64;
                let m = day_mult(cfg, n, 30);
                c.add(Some(n), None, int((1 - k).max(0)), m, || "no Saturday-Sunday pair off".into(), Vec::new);
            }
        }
        31 => {
            for &n in &all {
                let k = cal
                    .window_starts(WindowSet::PairOff)
                    .into_iter()
                    .filter(|&d| {
                        c.is(n, d, work) && c.is(n, d + 1, off) && c.is(n, d + 2, off) && c.is(n, d + 3, work)
                    })
                    .count() as i64;
                let m = day_mult(cfg, n, 31);
                c.add(Some(n), None, int((2 - k).max(0)), m, || format!("{k} double offs"), Vec::new);
            }
        }
        32 => {
            for &n in &all {
                let k = cal
                    .window_starts(WindowSet::TripleOff)
                    .into_iter()
                    .filter(|&d| (d..d + 3).all(|x| c.is(n, x, off)))
                    .count() as i64;
                let m = day_mult(cfg, n, 32);
                c.add(Some(n), None, int((1 - k).max(0)), m, || "no triple off".into(), Vec::new);
            }
        }
        33 => {
            for &n in &all {
                let k = cal
                    .window_starts(WindowSet::SingleDay)
                    .into_iter()
                    .filter(|&d| c.is(n, d, off) && c.is(n, d + 1, SymbolSet::DAY) && c.is(n, d + 2, off))
                    .count() as i64;
                let single = cfg.nurses[n].off_preference == OffPreference::SingleOff;
                let v = if single { (k - 2).max(0) } else { k };
                let m = day_mult(cfg, n, 33);
                c.add(Some(n), None, int(v), m, || format!("{k} single day shifts between offs"), Vec::new);
            }
        }
        _ => unreachable!("day soft {idx}"),
    }
}

/// Violations of one hard rule; empty iff the roster satisfies it.
pub fn check_hard(id: ConstraintId, roster: &Roster, cfg: &WardConfig) -> Result<HardCheck> {
    check_id(id, Kind::Hard)?;
    if !is_enabled(id, cfg) {
        return Ok(HardCheck::Disabled);
    }
    let mut c = Ctx::new(id, roster, cfg, true);
    run_hard(&mut c);
    Ok(HardCheck::Records(c.records))
}

fn run_hard(c: &mut Ctx) {
    match c.id.stage {
        Stage::Night => night_hard(c),
        Stage::Day => day_hard(c),
    }
}

/// Sum of hard-violation magnitudes of one rule, without building records.
pub fn hard_magnitude(id: ConstraintId, roster: &Roster, cfg: &WardConfig) -> Result<Penalty> {
    check_id(id, Kind::Hard)?;
    if !is_enabled(id, cfg) {
        return Ok(Penalty::zero());
    }
    let mut c = Ctx::new(id, roster, cfg, false);
    run_hard(&mut c);
    Ok(c.total)
}

/// Whether every enabled hard rule of a stage holds.
pub fn stage_is_feasible(stage: Stage, roster: &Roster, cfg: &WardConfig) -> Result<bool> {
    for id in super::hard_ids(stage, cfg) {
        if hard_magnitude(id, roster, cfg)? > Penalty::zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn alphabet_check(c: &mut Ctx, stage: Stage) {
    let cfg = c.cfg;
    let cal = &cfg.calendar;
    let alphabet = cfg.stage_alphabet(stage);
    for n in 0..cfg.nurses.len() {
        for d in cal.prev_range() {
            if c.r.get(n, d) == Unset {
                c.add(Some(n), Some(d), int(1), 1, || "previous-month cell is unset".into(), || vec![(n, d)]);
            }
        }
        for d in cal.target_range() {
            let sym = c.r.get(n, d);
            if c.r.provenance(n, d) == Provenance::Solved(stage) && !alphabet.contains(sym) {
                c.add(Some(n), Some(d), int(1), 1, || {
                    format!("{} placed outside the {stage} alphabet", sym.glyph())
                }, || vec![(n, d)]);
            }
        }
    }
}

fn sequences(c: &mut Ctx, stage: Stage) {
    let cfg = c.cfg;
    for seq in cfg.sequences.hard(stage) {
        let len = seq.symbols.len();
        if len == 0 {
            continue;
        }
        for n in 0..cfg.nurses.len() {
            if !seq.applies(cfg.nurses[n].night_class) {
                continue;
            }
            for d in cfg.calendar.window_starts(WindowSet::Forbidden(len)) {
                let hits = (0..len).filter(|&i| c.r.get(n, d + i) == seq.symbols[i]).count() as i64;
                let v = hits - (len as i64 - 1);
                c.add(Some(n), Some(d), int(v.max(0)), 1, || {
                    format!("forbidden sequence {}", render(&seq.symbols))
                }, || Ctx::window(n, d, len));
            }
        }
    }
}

fn max_runs(c: &mut Ctx) {
    let cfg = c.cfg;
    for (&s, &cap) in &cfg.max_run {
        let len = cap as usize + 1;
        for n in 0..cfg.nurses.len() {
            for d in cfg.calendar.window_starts(WindowSet::MaxRun(len)) {
                let k = c.count(n, d..d + len, SymbolSet::of(s));
                c.add(Some(n), Some(d), int((k - cap as i64).max(0)), 1, || {
                    format!("{} repeated more than {cap} times", s.glyph())
                }, || Ctx::window(n, d, len));
            }
        }
    }
}

fn six_day(c: &mut Ctx) {
    let cfg = c.cfg;
    for n in 0..cfg.nurses.len() {
        for d in cfg.calendar.window_starts(WindowSet::SixDay) {
            let k = c.count(n, d..d + 6, SymbolSet::WORK);
            c.add(Some(n), Some(d), int((k - 5).max(0)), 1, || "six consecutive work days".into(), || {
                Ctx::window(n, d, 6)
            });
        }
    }
}

fn men_range(c: &mut Ctx, stage: Stage) {
    let cfg = c.cfg;
    let cal = &cfg.calendar;
    let b = &cfg.staffing.band(stage).men;
    let men = cfg.nurses_where(|n| n.male);
    let set = band(stage);
    for d in cal.target_range() {
        let k = men.iter().filter(|&&n| c.is(n, d, set)).count() as i64;
        let class = cal.day_class(d);
        let sup = || men.iter().map(|&n| (n, d)).collect::<Vec<_>>();
        if let Some(lb) = b.lb.get(class) {
            c.add(None, Some(d), int((lb as i64 - k).max(0)), 1, || format!("{k} men on shift, lower bound {lb}"), sup);
        }
        if let Some(ub) = b.ub.get(class) {
            c.add(None, Some(d), int((k - ub as i64).max(0)), 1, || format!("{k} men on shift, upper bound {ub}"), sup);
        }
    }
}

fn night_hard(c: &mut Ctx) {
    let cfg = c.cfg;
    let cal = &cfg.calendar;
    let nn = cfg.night_capable();
    let nw = cfg.night_workers();
    let twelve = cfg.night_pattern == NightPattern::TwelveHour;
    match c.id.index {
        1 => alphabet_check(c, Stage::Night),
        2 => {
            for &n in &nn {
                for d in cal.window_starts(WindowSet::PrevTail) {
                    let s = c.count(n, d..d + 3, SymbolSet::DAY) + c.b(n, d + 3, SymbolSet::of(Unset))
                        + c.b(n, d + 4, SymbolSet::of(NightIn));
                    c.add(Some(n), Some(d), int((s - 4).max(0)), 1, || {
                        "unset-night block after three day shifts crossing the month start".into()
                    }, || Ctx::window(n, d, 5));
                }
            }
        }
        3 => {
            let (p, d1) = (cal.prev_last(), cal.first_target());
            for &n in &nw {
                let want = c.r.get(n, p) == NightIn;
                let have = c.r.get(n, d1) == NightOut;
                if want != have {
                    c.add(Some(n), Some(d1), int(1), 1, || {
                        if want {
                            "previous month ends with a night start; day 1 must be a night end".into()
                        } else {
                            "day 1 is a night end without a night start the day before".into()
                        }
                    }, || vec![(n, p), (n, d1)]);
                }
            }
        }
        4 => {
            let (dl, n1, n2) = (cal.last_target(), cal.next_first(), cal.next_second());
            for &n in &nw {
                let last = c.r.get(n, dl);
                let f1 = c.r.get(n, n1);
                let mut bad: Vec<&str> = Vec::new();
                if SymbolSet::OFF.contains(f1) && last == NightIn {
                    bad.push("night start before a next-month off");
                }
                if f1 == NightOut && last != NightIn {
                    bad.push("next month opens with a night end; last day must be a night start");
                }
                if twelve && cfg.nurses[n].night_class == NightClass::NightCapable && n2 < cal.len() {
                    let f2 = c.r.get(n, n2);
                    let nights_last = matches!(last, NightIn | NightOut);
                    if matches!(f1, Day | Other) && nights_last {
                        bad.push("night on the last day before a next-month day shift");
                    }
                    if matches!(f2, Day | Other) && last == NightIn {
                        bad.push("night start on the last day before a day shift on next-month day 2");
                    }
                    if f2 == NightIn && nights_last {
                        bad.push("night on the last day before a next-month day-2 night");
                    }
                    if f2 == NightOut && nights_last {
                        bad.push("night on the last day before a next-month day-2 night end");
                    }
                    if f2 == NightOut && f1 != NightIn {
                        bad.push("next-month day-2 night end without a day-1 night start");
                    }
                }
                for b in bad {
                    c.add(Some(n), Some(dl), int(1), 1, || b.to_string(), || vec![(n, dl), (n, n1), (n, n2.min(cal.len() - 1))]);
                }
            }
        }
        5 => six_day(c),
        6 => sequences(c, Stage::Night),
        7 => {
            for n in cfg.nurses_where(|x| x.night_class == NightClass::DayOnly) {
                for d in cal.target_range() {
                    let v = c.b(n, d, sym_set(&[NightIn, NightOut]));
                    c.add(Some(n), Some(d), int(v), 1, || "night shift for a day-only nurse".into(), || vec![(n, d)]);
                }
            }
        }
        8 => {
            for &n in &nw {
                let nurse = &cfg.nurses[n];
                if !nurse.night_count_fixed {
                    continue;
                }
                let (Some(lb), Some(ub)) = (nurse.night_lb, nurse.night_ub) else { continue };
                for s in [NightIn, NightOut] {
                    let k = c.count(n, 0..cal.len(), SymbolSet::of(s));
                    let all = || (0..cal.len()).map(|d| (n, d)).collect::<Vec<_>>();
                    c.add(Some(n), None, int((lb as i64 - k).max(0)), 1, || {
                        format!("{k} × {} below the fixed range {lb}..{ub}", s.glyph())
                    }, all);
                    c.add(Some(n), None, int((k - ub as i64).max(0)), 1, || {
                        format!("{k} × {} above the fixed range {lb}..{ub}", s.glyph())
                    }, all);
                }
            }
        }
        9 => {
            for &n in &nn {
                for d in cal.window_starts(WindowSet::IntervalLower) {
                    let k = c.count(n, d..d + 4, SymbolSet::of(NightIn));
                    c.add(Some(n), Some(d), int((k - 1).max(0)), 1, || format!("{k} night starts within four days"), || {
                        Ctx::window(n, d, 4)
                    });
                }
            }
        }
        10 => max_runs(c),
        11 => {
            let head = SymbolSet::OFF_OR_UNSET;
            let tail = SymbolSet::ALL.without(NightIn).without(NightOut);
            let starts = cal.window_starts(WindowSet::TripleOffCandidate);
            for n in cfg.nurses_where(|x| x.off_preference == OffPreference::TripleOff) {
                let k = starts
                    .iter()
                    .filter(|&&d| (d..d + 3).all(|x| c.is(n, x, head)) && c.is(n, d + 3, tail))
                    .count() as i64;
                c.add(Some(n), None, int((2 - k).max(0)), 1, || format!("{k} three-off candidates, two needed"), || {
                    cal.target_range().map(|d| (n, d)).collect()
                });
            }
        }
        12 => {
            let leaders = cfg.nurses_where(|x| x.day_leader);
            if leaders.is_empty() {
                return;
            }
            for d in cal.target_range() {
                let set = match cal.weekday_class_at(d) {
                    WeekdayClass::Weekday => sym_set(&[Day, Unset]),
                    WeekdayClass::WeekendHoliday => sym_set(&[Day, LongDay, Unset]),
                };
                let k = leaders.iter().filter(|&&n| c.is(n, d, set)).count() as i64;
                c.add(None, Some(d), int((1 - k).max(0)), 1, || "no leader left for the day band".into(), || {
                    leaders.iter().map(|&n| (n, d)).collect()
                });
            }
        }
        13 => men_range(c, Stage::Night),
        14 => {}
        i => unreachable!("night hard {i}"),
    }
}

fn day_hard(c: &mut Ctx) {
    let cfg = c.cfg;
    let cal = &cfg.calendar;
    let nn = cfg.night_capable();
    match c.id.index {
        1 => alphabet_check(c, Stage::Day),
        2 => {
            for n in cfg.nurses_where(|x| x.night_class == NightClass::NightOnly) {
                for d in cal.target_range() {
                    let v = c.b(n, d, SymbolSet::of(Day));
                    c.add(Some(n), Some(d), int(v), 1, || "day shift for a night-only nurse".into(), || vec![(n, d)]);
                }
            }
        }
        3 => max_runs(c),
        4 => six_day(c),
        5 => {
            let dl = cal.last_target();
            for &n in &nn {
                let s = c.count(n, dl - 4..dl, SymbolSet::WORK) + c.b(n, dl, SymbolSet::of(NightIn));
                c.add(Some(n), Some(dl - 4), int((s - 4).max(0)), 1, || {
                    "six-run across the month end through a final night start".into()
                }, || Ctx::window(n, dl - 4, 5));
            }
        }
        6 => {
            for &n in &nn {
                for d in cal.window_starts(WindowSet::ThreeDayBeforeLong) {
                    let s = c.count(n, d..d + 3, SymbolSet::DAY) + c.b(n, d + 3, SymbolSet::of(LongDay));
                    c.add(Some(n), Some(d), int((s - 3).max(0)), 1, || "three day shifts before a longday".into(), || {
                        Ctx::window(n, d, 4)
                    });
                }
            }
        }
        7 => sequences(c, Stage::Day),
        8 => men_range(c, Stage::Day),
        9 => {
            for n in 0..cfg.nurses.len() {
                for d in cal.target_range() {
                    let v = c.b(n, d, SymbolSet::of(Unset));
                    c.add(Some(n), Some(d), int(v), 1, || "target cell still unset".into(), || vec![(n, d)]);
                }
            }
        }
        i => unreachable!("day hard {i}"),
    }
}

/// Weighted objective and per-rule breakdown of a stage.
pub fn evaluate_stage(stage: Stage, roster: &Roster, cfg: &WardConfig) -> Result<SoftPenaltyBreakdown> {
    let mut entries = Vec::new();
    let mut objective = Penalty::zero();
    for id in soft_ids(stage, cfg) {
        let weight = cfg.weights.alpha(id);
        match evaluate_soft_with(id, roster, cfg, false)? {
            Evaluation::Disabled => entries.push(BreakdownEntry {
                id,
                enabled: false,
                weight,
                total: Penalty::zero(),
                per_nurse: vec![Penalty::zero(); cfg.nurses.len()],
            }),
            Evaluation::Value(v) => {
                objective += v.total * weight;
                entries.push(BreakdownEntry { id, enabled: true, weight, total: v.total, per_nurse: v.per_nurse });
            }
        }
    }
    Ok(SoftPenaltyBreakdown { stage, entries, objective })
}

/// Soft violation records of a stage, ordered by rule.
pub fn soft_records(stage: Stage, roster: &Roster, cfg: &WardConfig) -> Result<Vec<ViolationRecord>> {
    let mut out = Vec::new();
    for id in soft_ids(stage, cfg) {
        if let Evaluation::Value(v) = evaluate_soft(id, roster, cfg)? {
            out.extend(v.records);
        }
    }
    Ok(out)
}

/// Every hard violation of a stage.
pub fn check_stage_hard(stage: Stage, roster: &Roster, cfg: &WardConfig) -> Result<Vec<ViolationRecord>> {
    let mut out = Vec::new();
    for id in super::hard_ids(stage, cfg) {
        out.extend(check_hard(id, roster, cfg)?.records().iter().cloned());
    }
    Ok(out)
}
