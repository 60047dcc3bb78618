//! Compiled form of the rules: every hard and soft rule becomes a list of
//! piecewise-linear terms over cell-membership literals. The IP encoder turns
//! terms into constraints and slack variables; local search evaluates them
//! incrementally.

use std::collections::BTreeMap;

use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::eval::{day_mult, night_mult, staffing_template};
use super::{epigraph_members, hard_ids, is_enabled, is_structural, soft_ids, ConstraintId, Kind, Penalty};
use crate::domain::{
    NightClass, NightPattern, OffPreference, ShiftSymbol, Stage, SymbolSet, WardConfig, WeekdayClass,
    WindowSet,
};
use ShiftSymbol::*;

/// "Cell `cell` holds a symbol from `set`". Cells are numbered
/// `nurse * window_len + day`, matching [`crate::domain::Roster::cell_index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Lit {
    pub cell: u32,
    pub set: SymbolSet,
}

impl Lit {
    pub fn holds(&self, cells: &[ShiftSymbol]) -> bool {
        self.set.contains(cells[self.cell as usize])
    }
}

/// constant + Σ coef·[lit]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinExpr {
    pub lits: Vec<(Lit, i64)>,
    #[serde(with = "super::penalty_serde")]
    pub constant: Penalty,
}

impl LinExpr {
    pub fn constant(c: Penalty) -> Self {
        LinExpr { lits: Vec::new(), constant: c }
    }

    fn int(c: i64) -> Self {
        Self::constant(Ratio::from_integer(c))
    }

    fn plus(mut self, lit: Lit, coef: i64) -> Self {
        self.lits.push((lit, coef));
        self
    }

    fn plus_all(mut self, lits: impl IntoIterator<Item = Lit>, coef: i64) -> Self {
        self.lits.extend(lits.into_iter().map(|l| (l, coef)));
        self
    }

    pub fn value(&self, cells: &[ShiftSymbol]) -> Penalty {
        let s: i64 = self.lits.iter().filter(|(l, _)| l.holds(cells)).map(|(_, c)| c).sum();
        self.constant + s
    }
}

/// Conjunction of literals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pattern(pub Vec<Lit>);

impl Pattern {
    pub fn holds(&self, cells: &[ShiftSymbol]) -> bool {
        self.0.iter().all(|l| l.holds(cells))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Body {
    /// max(0, max_k e_k)
    Hinge(Vec<LinExpr>),
    /// max(0, base + sign · #patterns that hold)
    Count { patterns: Vec<Pattern>, base: i64, sign: i64 },
}

impl Body {
    pub fn value(&self, cells: &[ShiftSymbol]) -> Penalty {
        let raw = match self {
            Body::Hinge(es) => es.iter().map(|e| e.value(cells)).max().unwrap_or_default(),
            Body::Count { patterns, base, sign } => {
                let k = patterns.iter().filter(|p| p.holds(cells)).count() as i64;
                Ratio::from_integer(base + sign * k)
            }
        };
        if raw > Penalty::zero() {
            raw
        } else {
            Penalty::zero()
        }
    }

    /// Every cell the term reads, possibly with repeats.
    pub fn cells(&self) -> Vec<u32> {
        match self {
            Body::Hinge(es) => es.iter().flat_map(|e| e.lits.iter().map(|(l, _)| l.cell)).collect(),
            Body::Count { patterns, .. } => patterns.iter().flat_map(|p| p.0.iter().map(|l| l.cell)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub id: ConstraintId,
    pub nurse: Option<u32>,
    pub day: Option<u32>,
    /// Preference multiplier (1 unless the nurse's off preference matches).
    pub mult: i64,
    pub body: Body,
}

impl Term {
    /// Multiplied value on a full cell vector.
    pub fn value(&self, cells: &[ShiftSymbol]) -> Penalty {
        self.body.value(cells) * self.mult
    }
}

/// max over `nurses` of the sum of their member-rule terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Epigraph {
    pub id: ConstraintId,
    pub members: Vec<ConstraintId>,
    pub nurses: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompiledStage {
    pub stage: Stage,
    pub window_len: usize,
    pub nurse_count: usize,
    pub terms: Vec<Term>,
    pub epigraphs: Vec<Epigraph>,
    pub disabled: Vec<ConstraintId>,
    /// Soft weights α of every enabled soft rule.
    pub alpha: BTreeMap<ConstraintId, i64>,
}

impl CompiledStage {
    pub fn hard_terms(&self) -> impl Iterator<Item = &Term> {
        self.terms.iter().filter(|t| t.id.is_hard())
    }

    pub fn soft_terms(&self) -> impl Iterator<Item = &Term> {
        self.terms.iter().filter(|t| !t.id.is_hard())
    }

    /// Σ of multiplied term values per rule, plus each epigraph's maximum.
    pub fn rule_totals(&self, cells: &[ShiftSymbol]) -> BTreeMap<ConstraintId, Penalty> {
        let mut out: BTreeMap<ConstraintId, Penalty> = BTreeMap::new();
        let mut per_nurse: BTreeMap<ConstraintId, Vec<Penalty>> = BTreeMap::new();
        for t in &self.terms {
            let v = t.value(cells);
            *out.entry(t.id).or_default() += v;
            if let Some(n) = t.nurse {
                per_nurse.entry(t.id).or_insert_with(|| vec![Penalty::zero(); self.nurse_count])[n as usize] += v;
            }
        }
        for e in &self.epigraphs {
            let best = e
                .nurses
                .iter()
                .map(|&n| {
                    e.members
                        .iter()
                        .filter_map(|m| per_nurse.get(m))
                        .map(|v| v[n as usize])
                        .sum::<Penalty>()
                })
                .max()
                .unwrap_or_default();
            out.insert(e.id, best.max(Penalty::zero()));
        }
        out
    }

    /// Σ α·value over soft rules.
    pub fn objective(&self, cells: &[ShiftSymbol]) -> Penalty {
        self.rule_totals(cells)
            .into_iter()
            .filter(|(id, _)| !id.is_hard())
            .map(|(id, v)| v * self.alpha.get(&id).copied().unwrap_or(0))
            .sum()
    }

    /// Σ of hard-term values; zero iff every compiled hard rule holds.
    pub fn hard_excess(&self, cells: &[ShiftSymbol]) -> Penalty {
        self.hard_terms().map(|t| t.value(cells)).sum()
    }
}

struct Builder<'a> {
    cfg: &'a WardConfig,
    nd: usize,
    id: ConstraintId,
    out: Vec<Term>,
}

impl<'a> Builder<'a> {
    fn lit(&self, n: usize, d: usize, set: SymbolSet) -> Lit {
        Lit { cell: (n * self.nd + d) as u32, set }
    }

    fn lits(&self, n: usize, days: std::ops::Range<usize>, set: SymbolSet) -> Vec<Lit> {
        days.map(|d| self.lit(n, d, set)).collect()
    }

    fn push(&mut self, nurse: Option<usize>, day: Option<usize>, mult: i64, body: Body) {
        self.out.push(Term { id: self.id, nurse: nurse.map(|n| n as u32), day: day.map(|d| d as u32), mult, body });
    }

    fn hinge(&mut self, nurse: Option<usize>, day: Option<usize>, e: LinExpr) {
        self.push(nurse, day, 1, Body::Hinge(vec![e]));
    }

    /// max(0, Σ_i [cell_i ∈ set_i] - (k-1)) over a window.
    fn sequence(&mut self, n: usize, d: usize, sets: &[SymbolSet]) {
        let e = LinExpr::int(1 - sets.len() as i64)
            .plus_all(sets.iter().enumerate().map(|(i, &s)| self.lit(n, d + i, s)), 1);
        self.hinge(Some(n), Some(d), e);
    }
}

fn band(stage: Stage) -> SymbolSet {
    match stage {
        Stage::Night => SymbolSet::NIGHT_BAND,
        Stage::Day => SymbolSet::DAY_BAND,
    }
}

fn one(s: ShiftSymbol) -> SymbolSet {
    SymbolSet::of(s)
}

/// Compiles every enabled rule of a stage. Structural rules produce no
/// terms; the encoder realises them through its variable domains.
pub fn compile_stage(stage: Stage, cfg: &WardConfig) -> CompiledStage {
    let nd = cfg.calendar.len();
    let mut b = Builder { cfg, nd, id: ConstraintId::night_hard(1), out: Vec::new() };
    let mut disabled = Vec::new();
    let mut epigraphs = Vec::new();
    let mut alpha = BTreeMap::new();
    for id in hard_ids(stage, cfg) {
        if !is_enabled(id, cfg) {
            disabled.push(id);
            continue;
        }
        if is_structural(id) {
            continue;
        }
        b.id = id;
        match stage {
            Stage::Night => night_hard(&mut b),
            Stage::Day => day_hard(&mut b),
        }
    }
    for id in soft_ids(stage, cfg) {
        if !is_enabled(id, cfg) {
            disabled.push(id);
            continue;
        }
        alpha.insert(id, cfg.weights.alpha(id));
        b.id = id;
        if let Some(members) = epigraph_members(id) {
            let nurses = match stage {
                Stage::Night => cfg.night_capable(),
                Stage::Day => (0..cfg.nurses.len()).collect(),
            };
            epigraphs.push(Epigraph {
                id,
                members: members.iter().map(|&m| ConstraintId::new(stage, Kind::Soft, m)).collect(),
                nurses: nurses.into_iter().map(|n| n as u32).collect(),
            });
        } else if let Some((cat, lower)) = staffing_template(id) {
            staffing(&mut b, cat, lower);
        } else {
            match stage {
                Stage::Night => night_soft(&mut b),
                Stage::Day => day_soft(&mut b),
            }
        }
    }
    CompiledStage {
        stage,
        window_len: nd,
        nurse_count: cfg.nurses.len(),
        terms: b.out,
        epigraphs,
        disabled,
        alpha,
    }
}

fn staffing(b: &mut Builder, cat: crate::domain::StaffCategory, lower: bool) {
    let cfg = b.cfg;
    let cal = &cfg.calendar;
    let stage = b.id.stage;
    let bounds = cfg.staffing.band(stage).get(cat);
    for (_, members) in cfg.category_members(cat) {
        for d in cal.target_range() {
            let class = cal.day_class(d);
            let bound = if lower { bounds.lb.get(class) } else { bounds.ub.get(class) };
            let Some(bound) = bound else { continue };
            let lits: Vec<Lit> = members.iter().map(|&n| b.lit(n, d, band(stage))).collect();
            let e = if lower {
                LinExpr::int(bound as i64).plus_all(lits, -1)
            } else {
                LinExpr::int(-(bound as i64)).plus_all(lits, 1)
            };
            b.hinge(None, Some(d), e);
        }
    }
}

fn pairs(b: &mut Builder) {
    let cfg = b.cfg;
    let stage = b.id.stage;
    for p in cfg.pairs.iter().filter(|p| p.stage.is_none_or(|s| s == stage)) {
        let (Ok(n1), Ok(n2)) = (cfg.nurse_index(&p.n1), cfg.nurse_index(&p.n2)) else { continue };
        let patterns = cfg
            .calendar
            .target_range()
            .map(|d| Pattern(vec![b.lit(n1, d, one(p.s1)), b.lit(n2, d, one(p.s2))]))
            .collect();
        b.push(None, None, 1, Body::Count { patterns, base: p.min as i64, sign: -1 });
    }
}

fn forbidden_pairs(b: &mut Builder) {
    let cfg = b.cfg;
    let stage = b.id.stage;
    for p in cfg.forbidden_pairs.iter().filter(|p| p.stage.is_none_or(|s| s == stage)) {
        let (Ok(n1), Ok(n2)) = (cfg.nurse_index(&p.n1), cfg.nurse_index(&p.n2)) else { continue };
        for d in cfg.calendar.target_range() {
            let e = LinExpr::int(-1).plus(b.lit(n1, d, one(p.s1)), 1).plus(b.lit(n2, d, one(p.s2)), 1);
            b.hinge(None, Some(d), e);
        }
    }
}

fn forbidden_assignments(b: &mut Builder) {
    let cfg = b.cfg;
    let cal = &cfg.calendar;
    let stage = b.id.stage;
    for f in cfg.forbidden_assignments.iter().filter(|f| f.stage.is_none_or(|s| s == stage)) {
        let Ok(n) = cfg.nurse_index(&f.nurse) else { continue };
        for d in cal.target_range().filter(|&d| cal.day_class(d) == f.day) {
            let e = LinExpr::int(0).plus(b.lit(n, d, one(f.symbol)), 1);
            b.hinge(Some(n), Some(d), e);
        }
    }
}

fn sequence_rules(b: &mut Builder, hard: bool) {
    let cfg = b.cfg;
    let stage = b.id.stage;
    let rules = if hard { cfg.sequences.hard(stage) } else { cfg.sequences.soft(stage) };
    for seq in rules {
        let len = seq.symbols.len();
        if len == 0 {
            continue;
        }
        let sets: Vec<SymbolSet> = seq.symbols.iter().map(|&s| one(s)).collect();
        for n in 0..cfg.nurses.len() {
            if !seq.applies(cfg.nurses[n].night_class) {
                continue;
            }
            for d in cfg.calendar.window_starts(WindowSet::Forbidden(len)) {
                b.sequence(n, d, &sets);
            }
        }
    }
}

/// max(0, Σ_window [set] - cap)
fn window_cap(b: &mut Builder, n: usize, d: usize, len: usize, set: SymbolSet, cap: i64) {
    let e = LinExpr::int(-cap).plus_all(b.lits(n, d..d + len, set), 1);
    b.hinge(Some(n), Some(d), e);
}

/// max(0, need - Σ_window [set])
fn window_floor(b: &mut Builder, n: usize, d: usize, len: usize, set: SymbolSet, need: i64) {
    let e = LinExpr::int(need).plus_all(b.lits(n, d..d + len, set), -1);
    b.hinge(Some(n), Some(d), e);
}

fn night_soft(b: &mut Builder) {
    let cfg = b.cfg;
    let cal = &cfg.calendar;
    let t = cal.target_range();
    let nn = cfg.night_capable();
    let nw = cfg.night_workers();
    let ins = one(NightIn);
    let outs = one(NightOut);
    match b.id.index {
        19 => pairs(b),
        20 => forbidden_pairs(b),
        21 => forbidden_assignments(b),
        22 => sequence_rules(b, false),
        23 => {
            // reserve - (N_off - placed) = placed + reserve - N_off
            for n in 0..cfg.nurses.len() {
                let c = cfg.off_reserve as i64 - cfg.n_off(n) as i64;
                let e = LinExpr::int(c).plus_all(b.lits(n, t.clone(), one(Off)), 1);
                b.hinge(Some(n), None, e);
            }
        }
        24 => {
            for &n in &nw {
                for d in cal.window_starts(WindowSet::IntervalUpper) {
                    window_floor(b, n, d, 14, ins, 1);
                }
            }
        }
        25 | 26 => {
            let lower = b.id.index == 25;
            for &n in &nw {
                let nurse = &cfg.nurses[n];
                let bound = if lower { nurse.night_lb } else { nurse.night_ub };
                let Some(bound) = bound else { continue };
                let es = [ins, outs]
                    .into_iter()
                    .map(|s| {
                        if lower {
                            LinExpr::int(bound as i64).plus_all(b.lits(n, t.clone(), s), -1)
                        } else {
                            LinExpr::int(-(bound as i64)).plus_all(b.lits(n, t.clone(), s), 1)
                        }
                    })
                    .collect();
                b.push(Some(n), None, 1, Body::Hinge(es));
            }
        }
        27 | 28 => {
            let (days, avg) = if b.id.index == 27 {
                (cal.fssm_days(), cfg.fssm_average())
            } else {
                (cal.event_days(), cfg.ope_average())
            };
            for &n in &nn {
                let lits: Vec<Lit> = days.iter().map(|&d| b.lit(n, d, ins)).collect();
                let e = LinExpr::constant(-avg).plus_all(lits, 1);
                b.push(Some(n), None, night_mult(cfg, n, b.id.index), Body::Hinge(vec![e]));
            }
        }
        29 => {
            for &n in &nn {
                let m = night_mult(cfg, n, 29);
                for d in cal.window_starts(WindowSet::FiveRunWithNight) {
                    let sets = [SymbolSet::DAY, SymbolSet::DAY, SymbolSet::LONG_OR_UNSET, ins];
                    let e = LinExpr::int(-3).plus_all(sets.iter().enumerate().map(|(i, &s)| b.lit(n, d + i, s)), 1);
                    b.push(Some(n), Some(d), m, Body::Hinge(vec![e]));
                }
            }
        }
        30 => {
            let (lu, day, off) = (SymbolSet::LONG_OR_UNSET, SymbolSet::DAY, SymbolSet::OFF);
            let a_pat = [day, day, lu, ins, outs, off, day, lu, ins, outs];
            let b_pat = [day, lu, ins, outs, off, day, day, lu, ins, outs];
            for &n in &nn {
                for d in cal.window_starts(WindowSet::FiveOneFour) {
                    let es = [a_pat, b_pat]
                        .iter()
                        .map(|p| LinExpr::int(-9).plus_all(p.iter().enumerate().map(|(h, &s)| b.lit(n, d + h, s)), 1))
                        .collect();
                    b.push(Some(n), Some(d), 1, Body::Hinge(es));
                }
            }
        }
        31 => {
            for &n in &nn {
                let m = night_mult(cfg, n, 31);
                for d in cal.window_starts(WindowSet::ThreeNights) {
                    let e = LinExpr::int(-2).plus_all(b.lits(n, d..d + 9, ins), 1);
                    b.push(Some(n), Some(d), m, Body::Hinge(vec![e]));
                }
            }
        }
        32 => {
            for &n in &nn {
                for d in cal.window_starts(WindowSet::FourNights) {
                    window_cap(b, n, d, 13, ins, 3);
                }
            }
            for n in cfg.nurses_where(|x| x.night_class == NightClass::NightOnly) {
                for d in cal.window_starts(WindowSet::FourNightsOnly) {
                    window_cap(b, n, d, 10, ins, 3);
                }
            }
        }
        33 => {
            for &n in &nn {
                for d in cal.window_starts(WindowSet::TwoWeekFourNights) {
                    window_cap(b, n, d, 14, ins, 3);
                }
            }
        }
        i => unreachable!("night soft {i}"),
    }
}

fn day_soft(b: &mut Builder) {
    let cfg = b.cfg;
    let cal = &cfg.calendar;
    let t = cal.target_range();
    let off = SymbolSet::OFF;
    let work = SymbolSet::WORK;
    let everyone = 0..cfg.nurses.len();
    match b.id.index {
        19 => pairs(b),
        20 => forbidden_pairs(b),
        21 => {
            let leaders = cfg.nurses_where(|n| n.day_leader);
            let toff = cal.target_off_days();
            for d in t {
                let set = if toff.contains(&d) { one(Day).with(LongDay) } else { one(Day) };
                let e = LinExpr::int(1).plus_all(leaders.iter().map(|&n| b.lit(n, d, set)), -1);
                b.hinge(None, Some(d), e);
            }
        }
        22 => forbidden_assignments(b),
        23 => sequence_rules(b, false),
        24 | 25 => {
            let lower = b.id.index == 24;
            for n in everyone {
                let target = cfg.n_off(n) as i64;
                let lits = b.lits(n, t.clone(), one(Off));
                let e = if lower { LinExpr::int(target).plus_all(lits, -1) } else { LinExpr::int(-target).plus_all(lits, 1) };
                b.hinge(Some(n), None, e);
            }
        }
        26 => {
            let toff = cal.target_off_days();
            for n in everyone {
                let e = LinExpr::int(cfg.weekend_off_min as i64).plus_all(toff.iter().map(|&d| b.lit(n, d, off)), -1);
                b.hinge(Some(n), None, e);
            }
        }
        27 => {
            let set = SymbolSet::DAY.without(Other);
            for n in cfg.nurses_where(|x| !x.short_hours) {
                for d in cal.window_starts(WindowSet::ThreeDay) {
                    window_cap(b, n, d, 3, set, 2);
                }
            }
        }
        28 => {
            for n in everyone {
                for d in cal.window_starts(WindowSet::FiveThenSingleOff) {
                    let mut sets = vec![work; 5];
                    sets.push(off);
                    sets.push(work);
                    b.sequence(n, d, &sets);
                }
            }
        }
        29 => {
            for n in everyone {
                for d in cal.window_starts(WindowSet::NineDayTwoOff) {
                    window_floor(b, n, d, 9, off, 2);
                }
            }
        }
        30 => {
            let sats = cal.saturdays();
            for n in everyone {
                let patterns = sats.iter().map(|&d| Pattern(vec![b.lit(n, d, off), b.lit(n, d + 1, off)])).collect();
                b.push(Some(n), None, day_mult(cfg, n, 30), Body::Count { patterns, base: 1, sign: -1 });
            }
        }
        31 => {
            for n in everyone {
                let patterns = cal
                    .window_starts(WindowSet::PairOff)
                    .into_iter()
                    .map(|d| {
                        Pattern(vec![b.lit(n, d, work), b.lit(n, d + 1, off), b.lit(n, d + 2, off), b.lit(n, d + 3, work)])
                    })
                    .collect();
                b.push(Some(n), None, day_mult(cfg, n, 31), Body::Count { patterns, base: 2, sign: -1 });
            }
        }
        32 => {
            for n in everyone {
                let patterns =
                    cal.window_starts(WindowSet::TripleOff).into_iter().map(|d| Pattern(b.lits(n, d..d + 3, off))).collect();
                b.push(Some(n), None, day_mult(cfg, n, 32), Body::Count { patterns, base: 1, sign: -1 });
            }
        }
        33 => {
            for n in everyone {
                let patterns = cal
                    .window_starts(WindowSet::SingleDay)
                    .into_iter()
                    .map(|d| Pattern(vec![b.lit(n, d, off), b.lit(n, d + 1, SymbolSet::DAY), b.lit(n, d + 2, off)]))
                    .collect();
                let base = if cfg.nurses[n].off_preference == OffPreference::SingleOff { -2 } else { 0 };
                b.push(Some(n), None, day_mult(cfg, n, 33), Body::Count { patterns, base, sign: 1 });
            }
        }
        i => unreachable!("day soft {i}"),
    }
}

fn six_day(b: &mut Builder) {
    let cfg = b.cfg;
    for n in 0..cfg.nurses.len() {
        for d in cfg.calendar.window_starts(WindowSet::SixDay) {
            window_cap(b, n, d, 6, SymbolSet::WORK, 5);
        }
    }
}

fn max_runs(b: &mut Builder) {
    let cfg = b.cfg;
    for (&s, &cap) in &cfg.max_run {
        let len = cap as usize + 1;
        for n in 0..cfg.nurses.len() {
            for d in cfg.calendar.window_starts(WindowSet::MaxRun(len)) {
                window_cap(b, n, d, len, one(s), cap as i64);
            }
        }
    }
}

fn men_range(b: &mut Builder) {
    let cfg = b.cfg;
    let cal = &cfg.calendar;
    let stage = b.id.stage;
    let bounds = &cfg.staffing.band(stage).men;
    let men = cfg.nurses_where(|n| n.male);
    for d in cal.target_range() {
        let class = cal.day_class(d);
        let lits: Vec<Lit> = men.iter().map(|&n| b.lit(n, d, band(stage))).collect();
        if let Some(lb) = bounds.lb.get(class) {
            b.hinge(None, Some(d), LinExpr::int(lb as i64).plus_all(lits.clone(), -1));
        }
        if let Some(ub) = bounds.ub.get(class) {
            b.hinge(None, Some(d), LinExpr::int(-(ub as i64)).plus_all(lits, 1));
        }
    }
}

fn night_hard(b: &mut Builder) {
    let cfg = b.cfg;
    let cal = &cfg.calendar;
    let nn = cfg.night_capable();
    let nw = cfg.night_workers();
    let ins = one(NightIn);
    let outs = one(NightOut);
    let nights = ins.union(outs);
    match b.id.index {
        2 => {
            for &n in &nn {
                for d in cal.window_starts(WindowSet::PrevTail) {
                    let sets = [SymbolSet::DAY, SymbolSet::DAY, SymbolSet::DAY, one(Unset), ins];
                    b.sequence(n, d, &sets);
                }
            }
        }
        3 => {
            let (p, d1) = (cal.prev_last(), cal.first_target());
            for &n in &nw {
                let es = vec![
                    LinExpr::int(0).plus(b.lit(n, p, ins), 1).plus(b.lit(n, d1, outs), -1),
                    LinExpr::int(0).plus(b.lit(n, d1, outs), 1).plus(b.lit(n, p, ins), -1),
                ];
                b.push(Some(n), Some(d1), 1, Body::Hinge(es));
            }
        }
        4 => {
            let (dl, n1, n2) = (cal.last_target(), cal.next_first(), cal.next_second());
            let twelve = cfg.night_pattern == NightPattern::TwelveHour;
            let day_like = one(Day).with(Other);
            for &n in &nw {
                let both = |b: &Builder, x: (usize, SymbolSet), y: (usize, SymbolSet)| {
                    LinExpr::int(-1).plus(b.lit(n, x.0, x.1), 1).plus(b.lit(n, y.0, y.1), 1)
                };
                let mut es = vec![
                    both(b, (n1, SymbolSet::OFF), (dl, ins)),
                    LinExpr::int(0).plus(b.lit(n, n1, outs), 1).plus(b.lit(n, dl, ins), -1),
                ];
                if twelve && cfg.nurses[n].night_class == NightClass::NightCapable && n2 < cal.len() {
                    es.push(both(b, (n1, day_like), (dl, nights)));
                    es.push(both(b, (n2, day_like), (dl, ins)));
                    es.push(both(b, (n2, ins), (dl, nights)));
                    es.push(both(b, (n2, outs), (dl, nights)));
                    es.push(LinExpr::int(0).plus(b.lit(n, n2, outs), 1).plus(b.lit(n, n1, ins), -1));
                }
                for e in es {
                    b.hinge(Some(n), Some(dl), e);
                }
            }
        }
        5 => six_day(b),
        6 => sequence_rules(b, true),
        7 => {
            for n in cfg.nurses_where(|x| x.night_class == NightClass::DayOnly) {
                for d in cal.target_range() {
                    b.hinge(Some(n), Some(d), LinExpr::int(0).plus(b.lit(n, d, nights), 1));
                }
            }
        }
        8 => {
            let all = 0..cal.len();
            for &n in &nw {
                let nurse = &cfg.nurses[n];
                if !nurse.night_count_fixed {
                    continue;
                }
                let (Some(lb), Some(ub)) = (nurse.night_lb, nurse.night_ub) else { continue };
                for s in [ins, outs] {
                    b.hinge(Some(n), None, LinExpr::int(lb as i64).plus_all(b.lits(n, all.clone(), s), -1));
                    b.hinge(Some(n), None, LinExpr::int(-(ub as i64)).plus_all(b.lits(n, all.clone(), s), 1));
                }
            }
        }
        9 => {
            for &n in &nn {
                for d in cal.window_starts(WindowSet::IntervalLower) {
                    window_cap(b, n, d, 4, ins, 1);
                }
            }
        }
        10 => max_runs(b),
        11 => {
            let tail = SymbolSet::ALL.minus(nights);
            for n in cfg.nurses_where(|x| x.off_preference == OffPreference::TripleOff) {
                let patterns = cal
                    .window_starts(WindowSet::TripleOffCandidate)
                    .into_iter()
                    .map(|d| {
                        let mut p = b.lits(n, d..d + 3, SymbolSet::OFF_OR_UNSET);
                        p.push(b.lit(n, d + 3, tail));
                        Pattern(p)
                    })
                    .collect();
                b.push(Some(n), None, 1, Body::Count { patterns, base: 2, sign: -1 });
            }
        }
        12 => {
            let leaders = cfg.nurses_where(|x| x.day_leader);
            if leaders.is_empty() {
                return;
            }
            for d in cal.target_range() {
                let set = match cal.weekday_class_at(d) {
                    WeekdayClass::Weekday => one(Day).with(Unset),
                    WeekdayClass::WeekendHoliday => one(Day).with(LongDay).with(Unset),
                };
                b.hinge(None, Some(d), LinExpr::int(1).plus_all(leaders.iter().map(|&n| b.lit(n, d, set)), -1));
            }
        }
        13 => men_range(b),
        i => unreachable!("night hard {i}"),
    }
}

fn day_hard(b: &mut Builder) {
    let cfg = b.cfg;
    let cal = &cfg.calendar;
    let nn = cfg.night_capable();
    match b.id.index {
        2 => {
            for n in cfg.nurses_where(|x| x.night_class == NightClass::NightOnly) {
                for d in cal.target_range() {
                    b.hinge(Some(n), Some(d), LinExpr::int(0).plus(b.lit(n, d, one(Day)), 1));
                }
            }
        }
        3 => max_runs(b),
        4 => six_day(b),
        5 => {
            let dl = cal.last_target();
            for &n in &nn {
                let sets = [SymbolSet::WORK, SymbolSet::WORK, SymbolSet::WORK, SymbolSet::WORK, one(NightIn)];
                b.sequence(n, dl - 4, &sets);
            }
        }
        6 => {
            for &n in &nn {
                for d in cal.window_starts(WindowSet::ThreeDayBeforeLong) {
                    let sets = [SymbolSet::DAY, SymbolSet::DAY, SymbolSet::DAY, one(LongDay)];
                    b.sequence(n, d, &sets);
                }
            }
        }
        7 => sequence_rules(b, true),
        8 => men_range(b),
        i => unreachable!("day hard {i}"),
    }
}
