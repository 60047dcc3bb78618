//! Nurses, staffing bounds, pair lists and the rest of the ward description.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::calendar::{CalendarWindow, DayClass};
use super::symbol::{ShiftSymbol, SymbolSet};
use crate::catalog::ConstraintId;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Stage {
    #[serde(alias = "night")]
    Night,
    #[serde(alias = "day")]
    Day,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Night => "night",
            Stage::Day => "day",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NightClass {
    /// N_n
    #[default]
    NightCapable,
    /// N_no
    NightOnly,
    /// N_day
    DayOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Team {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OffPreference {
    WeekendPair,
    TripleOff,
    PairOff,
    SingleOff,
    #[default]
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NightPattern {
    #[default]
    TwelveHour,
    SixteenHour,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Nurse {
    pub id: String,
    #[serde(default)]
    pub night_class: NightClass,
    #[serde(default)]
    pub rookie: bool,
    #[serde(default)]
    pub male: bool,
    #[serde(default)]
    pub day_leader: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub team: Option<Team>,
    #[serde(default)]
    pub night_count_fixed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub night_lb: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub night_ub: Option<u32>,
    #[serde(default)]
    pub off_preference: OffPreference,
    #[serde(default)]
    pub short_hours: bool,
    #[serde(default)]
    pub care_worker: bool,
    /// Per-nurse override of the monthly regular-off count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weekly_off: Option<u32>,
}

impl Nurse {
    pub fn new(id: impl Into<String>) -> Self {
        Nurse {
            id: id.into(),
            night_class: NightClass::NightCapable,
            rookie: false,
            male: false,
            day_leader: false,
            group: None,
            team: None,
            night_count_fixed: false,
            night_lb: None,
            night_ub: None,
            off_preference: OffPreference::None,
            short_hours: false,
            care_worker: false,
            weekly_off: None,
        }
    }

    pub fn works_nights(&self) -> bool {
        self.night_class != NightClass::DayOnly
    }
}

/// Per-day-class values: Monday..Sunday then holiday.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DayTable<T>(pub [T; 8]);

impl<T: Copy> DayTable<T> {
    pub fn filled(v: T) -> Self {
        DayTable([v; 8])
    }

    pub fn get(&self, c: DayClass) -> T {
        self.0[c.index()]
    }

    pub fn set(&mut self, c: DayClass, v: T) {
        self.0[c.index()] = v;
    }
}

impl DayTable<Option<u32>> {
    pub fn unset() -> Self {
        DayTable([None; 8])
    }

    /// Weekday value for Monday to Friday, `weekend` for Saturday, Sunday and holidays.
    pub fn split(weekday: u32, weekend: u32) -> Self {
        let mut t = DayTable([Some(weekday); 8]);
        for c in [DayClass::Sat, DayClass::Sun, DayClass::Holiday] {
            t.set(c, Some(weekend));
        }
        t
    }

    pub fn constant(v: u32) -> Self {
        DayTable([Some(v); 8])
    }

    pub fn is_unset(&self) -> bool {
        self.0.iter().all(Option::is_none)
    }

    pub fn missing(&self) -> Vec<DayClass> {
        DayClass::ALL.into_iter().filter(|c| self.get(*c).is_none()).collect()
    }
}

const CLASS_KEYS: [&str; 8] = ["mon", "tue", "wed", "thu", "fri", "sat", "sun", "holiday"];

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DayTableRepr {
    Const(u32),
    Map(BTreeMap<String, u32>),
}

impl Serialize for DayTable<Option<u32>> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if let Some(first) = self.0[0] {
            if self.0.iter().all(|v| *v == Some(first)) {
                return DayTableRepr::Const(first).serialize(s);
            }
        }
        let map: BTreeMap<String, u32> = CLASS_KEYS
            .iter()
            .zip(self.0.iter())
            .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
            .collect();
        DayTableRepr::Map(map).serialize(s)
    }
}

impl<'de> Deserialize<'de> for DayTable<Option<u32>> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match DayTableRepr::deserialize(d)? {
            DayTableRepr::Const(v) => Ok(DayTable::constant(v)),
            DayTableRepr::Map(m) => {
                let mut t = DayTable::unset();
                let mut apply = |keys: &[usize], v: u32| {
                    for &k in keys {
                        t.0[k] = Some(v);
                    }
                };
                // broad keys first so specific ones override them
                if let Some(&v) = m.get("all") {
                    apply(&[0, 1, 2, 3, 4, 5, 6, 7], v);
                }
                if let Some(&v) = m.get("weekday") {
                    apply(&[0, 1, 2, 3, 4], v);
                }
                if let Some(&v) = m.get("weekend") {
                    apply(&[5, 6, 7], v);
                }
                for (k, &v) in &m {
                    if let Some(i) = CLASS_KEYS.iter().position(|c| c == k) {
                        apply(&[i], v);
                    } else if !matches!(k.as_str(), "all" | "weekday" | "weekend") {
                        return Err(D::Error::custom(format!("unknown day class key {k:?}")));
                    }
                }
                Ok(t)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Bounds {
    #[serde(default = "DayTable::unset")]
    pub lb: DayTable<Option<u32>>,
    #[serde(default = "DayTable::unset")]
    pub ub: DayTable<Option<u32>>,
}

impl Bounds {
    pub fn unset() -> Self {
        Bounds { lb: DayTable::unset(), ub: DayTable::unset() }
    }

    pub fn new(lb: DayTable<Option<u32>>, ub: DayTable<Option<u32>>) -> Self {
        Bounds { lb, ub }
    }
}

/// Staffing categories whose counts are bounded per day.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StaffCategory {
    /// Every nurse belonging to some group.
    All,
    Group1,
    Group12,
    Group4,
    TeamGroup1,
    TeamGroup12,
    TeamGroup34,
    Team,
    Rookie,
    Men,
    CareWorker,
}

impl StaffCategory {
    pub fn key(self) -> &'static str {
        match self {
            StaffCategory::All => "all",
            StaffCategory::Group1 => "group1",
            StaffCategory::Group12 => "group12",
            StaffCategory::Group4 => "group4",
            StaffCategory::TeamGroup1 => "team_group1",
            StaffCategory::TeamGroup12 => "team_group12",
            StaffCategory::TeamGroup34 => "team_group34",
            StaffCategory::Team => "team",
            StaffCategory::Rookie => "rookie",
            StaffCategory::Men => "men",
            StaffCategory::CareWorker => "care_worker",
        }
    }

    pub fn is_team(self) -> bool {
        matches!(
            self,
            StaffCategory::TeamGroup1
                | StaffCategory::TeamGroup12
                | StaffCategory::TeamGroup34
                | StaffCategory::Team
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandStaffing {
    #[serde(default)]
    pub all: Bounds,
    #[serde(default)]
    pub group1: Bounds,
    #[serde(default)]
    pub group12: Bounds,
    #[serde(default)]
    pub group4: Bounds,
    #[serde(default)]
    pub team_group1: Bounds,
    #[serde(default)]
    pub team_group12: Bounds,
    #[serde(default)]
    pub team_group34: Bounds,
    #[serde(default)]
    pub team: Bounds,
    #[serde(default)]
    pub rookie: Bounds,
    #[serde(default)]
    pub men: Bounds,
    #[serde(default)]
    pub care_worker: Bounds,
}

impl BandStaffing {
    pub fn get(&self, c: StaffCategory) -> &Bounds {
        match c {
            StaffCategory::All => &self.all,
            StaffCategory::Group1 => &self.group1,
            StaffCategory::Group12 => &self.group12,
            StaffCategory::Group4 => &self.group4,
            StaffCategory::TeamGroup1 => &self.team_group1,
            StaffCategory::TeamGroup12 => &self.team_group12,
            StaffCategory::TeamGroup34 => &self.team_group34,
            StaffCategory::Team => &self.team,
            StaffCategory::Rookie => &self.rookie,
            StaffCategory::Men => &self.men,
            StaffCategory::CareWorker => &self.care_worker,
        }
    }

    pub fn get_mut(&mut self, c: StaffCategory) -> &mut Bounds {
        match c {
            StaffCategory::All => &mut self.all,
            StaffCategory::Group1 => &mut self.group1,
            StaffCategory::Group12 => &mut self.group12,
            StaffCategory::Group4 => &mut self.group4,
            StaffCategory::TeamGroup1 => &mut self.team_group1,
            StaffCategory::TeamGroup12 => &mut self.team_group12,
            StaffCategory::TeamGroup34 => &mut self.team_group34,
            StaffCategory::Team => &mut self.team,
            StaffCategory::Rookie => &mut self.rookie,
            StaffCategory::Men => &mut self.men,
            StaffCategory::CareWorker => &mut self.care_worker,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Staffing {
    #[serde(default)]
    pub night: BandStaffing,
    #[serde(default)]
    pub day: BandStaffing,
}

impl Staffing {
    pub fn band(&self, stage: Stage) -> &BandStaffing {
        match stage {
            Stage::Night => &self.night,
            Stage::Day => &self.day,
        }
    }

    pub fn band_mut(&mut self, stage: Stage) -> &mut BandStaffing {
        match stage {
            Stage::Night => &mut self.night,
            Stage::Day => &mut self.day,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pair {
    pub n1: String,
    pub n2: String,
    pub s1: ShiftSymbol,
    pub s2: ShiftSymbol,
    pub min: u32,
    /// Restrict to one stage; `None` applies to both.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<Stage>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForbiddenPair {
    pub n1: String,
    pub n2: String,
    pub s1: ShiftSymbol,
    pub s2: ShiftSymbol,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<Stage>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForbiddenAssignment {
    pub nurse: String,
    pub symbol: ShiftSymbol,
    pub day: DayClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<Stage>,
}

/// An ordered shift sequence that must not (hard) or should not (soft) occur.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sequence {
    pub symbols: Vec<ShiftSymbol>,
    /// Nurse classes the rule applies to; empty means everyone.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub applies_to: Vec<NightClass>,
}

impl Sequence {
    pub fn new(symbols: &[ShiftSymbol]) -> Self {
        Sequence { symbols: symbols.to_vec(), applies_to: Vec::new() }
    }

    pub fn for_classes(symbols: &[ShiftSymbol], classes: &[NightClass]) -> Self {
        Sequence { symbols: symbols.to_vec(), applies_to: classes.to_vec() }
    }

    pub fn applies(&self, c: NightClass) -> bool {
        self.applies_to.is_empty() || self.applies_to.contains(&c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceRules {
    #[serde(default)]
    pub night_hard: Vec<Sequence>,
    #[serde(default)]
    pub night_soft: Vec<Sequence>,
    #[serde(default)]
    pub day_hard: Vec<Sequence>,
    #[serde(default)]
    pub day_soft: Vec<Sequence>,
}

impl SequenceRules {
    pub fn empty() -> Self {
        SequenceRules { night_hard: vec![], night_soft: vec![], day_hard: vec![], day_soft: vec![] }
    }

    /// Night block discipline: a night start is followed by a night end, a night
    /// end is preceded by a night start and followed by an off day. Night-only
    /// staff may chain two nights back to back.
    pub fn standard() -> Self {
        use ShiftSymbol::*;
        let mut hard = Vec::new();
        for s in ShiftSymbol::ALL {
            if s != NightOut {
                hard.push(Sequence::new(&[NightIn, s]));
                if s != NightIn {
                    hard.push(Sequence::new(&[s, NightOut]));
                }
            }
            if !SymbolSet::OFF.contains(s) {
                if s == NightIn {
                    hard.push(Sequence::for_classes(
                        &[NightOut, NightIn],
                        &[NightClass::NightCapable, NightClass::DayOnly],
                    ));
                } else {
                    hard.push(Sequence::new(&[NightOut, s]));
                }
            }
        }
        SequenceRules {
            night_hard: hard.clone(),
            night_soft: Vec::new(),
            day_hard: hard,
            day_soft: vec![Sequence::new(&[Late, Early])],
        }
    }

    pub fn hard(&self, stage: Stage) -> &[Sequence] {
        match stage {
            Stage::Night => &self.night_hard,
            Stage::Day => &self.day_hard,
        }
    }

    pub fn soft(&self, stage: Stage) -> &[Sequence] {
        match stage {
            Stage::Night => &self.night_soft,
            Stage::Day => &self.day_soft,
        }
    }
}

impl Default for SequenceRules {
    fn default() -> Self {
        SequenceRules::standard()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Toggles {
    #[serde(default = "yes")]
    pub team: bool,
    #[serde(default = "yes")]
    pub rookie: bool,
    #[serde(default = "yes")]
    pub male: bool,
    #[serde(default)]
    pub care_worker: bool,
}

fn yes() -> bool {
    true
}

impl Default for Toggles {
    fn default() -> Self {
        Toggles { team: true, rookie: true, male: true, care_worker: false }
    }
}

/// Multipliers applied to one nurse's term when their off preference matches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multipliers {
    #[serde(default = "five")]
    pub night_fssm: i64,
    #[serde(default = "five")]
    pub night_five_run: i64,
    #[serde(default = "five")]
    pub night_three_nights: i64,
    #[serde(default = "five")]
    pub day_weekend_pair: i64,
    #[serde(default = "five")]
    pub day_pair_off: i64,
    #[serde(default = "five")]
    pub day_triple_off: i64,
    #[serde(default = "five")]
    pub day_single_day: i64,
}

fn five() -> i64 {
    5
}

impl Default for Multipliers {
    fn default() -> Self {
        Multipliers {
            night_fssm: 5,
            night_five_run: 5,
            night_three_nights: 5,
            day_weekend_pair: 5,
            day_pair_off: 5,
            day_triple_off: 5,
            day_single_day: 5,
        }
    }
}

pub const DEFAULT_PROBE_WEIGHT: i64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weights {
    /// Overrides of the default soft-constraint weight table.
    #[serde(default)]
    pub alpha: BTreeMap<ConstraintId, i64>,
    /// Weight of a unit hard-constraint slack in the relaxation probe.
    #[serde(default = "probe_default")]
    pub probe: i64,
    #[serde(default)]
    pub multipliers: Multipliers,
}

fn probe_default() -> i64 {
    DEFAULT_PROBE_WEIGHT
}

impl Default for Weights {
    fn default() -> Self {
        Weights { alpha: BTreeMap::new(), probe: DEFAULT_PROBE_WEIGHT, multipliers: Multipliers::default() }
    }
}

impl Weights {
    pub fn alpha(&self, id: ConstraintId) -> i64 {
        self.alpha.get(&id).copied().unwrap_or_else(|| crate::catalog::default_weight(id))
    }
}

pub mod ratio_opt {
    //! `Option<Ratio<i64>>` as an integer, a float-free "a/b" string, or absent.
    use num_rational::Ratio;
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(i64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &Option<Ratio<i64>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            None => s.serialize_none(),
            Some(r) if r.is_integer() => s.serialize_i64(*r.numer()),
            Some(r) => s.serialize_str(&format!("{}/{}", r.numer(), r.denom())),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Ratio<i64>>, D::Error> {
        use serde::de::Error;
        let r: Option<Repr> = Option::deserialize(d)?;
        Ok(match r {
            None => None,
            Some(Repr::Int(i)) => Some(Ratio::from_integer(i)),
            Some(Repr::Text(t)) => Some(parse(&t).map_err(D::Error::custom)?),
        })
    }

    pub fn parse(t: &str) -> Result<Ratio<i64>, String> {
        let bad = || format!("bad rational {t:?}");
        match t.split_once('/') {
            Some((a, b)) => {
                let a: i64 = a.trim().parse().map_err(|_| bad())?;
                let b: i64 = b.trim().parse().map_err(|_| bad())?;
                if b == 0 {
                    return Err(bad());
                }
                Ok(Ratio::new(a, b))
            }
            None => Ok(Ratio::from_integer(t.trim().parse().map_err(|_| bad())?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WardConfig {
    pub nurses: Vec<Nurse>,
    pub calendar: CalendarWindow,
    #[serde(default)]
    pub night_pattern: NightPattern,
    #[serde(default)]
    pub staffing: Staffing,
    #[serde(default)]
    pub pairs: Vec<Pair>,
    #[serde(default)]
    pub forbidden_pairs: Vec<ForbiddenPair>,
    #[serde(default)]
    pub forbidden_assignments: Vec<ForbiddenAssignment>,
    #[serde(default)]
    pub sequences: SequenceRules,
    /// N_{s,max}; shifts absent from the table are uncapped.
    #[serde(default = "default_max_run")]
    pub max_run: BTreeMap<ShiftSymbol, u32>,
    /// N_off; `None` falls back to the number of weekend and holiday target dates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weekly_off: Option<u32>,
    /// Offs that should stay placeable after the night stage.
    #[serde(default = "four")]
    pub off_reserve: u32,
    /// Minimum weekend/holiday offs per nurse in the day stage.
    #[serde(default = "four")]
    pub weekend_off_min: u32,
    #[serde(default, with = "ratio_opt", skip_serializing_if = "Option::is_none")]
    pub avg_fssm: Option<Ratio<i64>>,
    #[serde(default, with = "ratio_opt", skip_serializing_if = "Option::is_none")]
    pub avg_ope: Option<Ratio<i64>>,
    #[serde(default)]
    pub toggles: Toggles,
    /// Early and late shifts join the day-stage alphabet.
    #[serde(default)]
    pub day_extra_shifts: bool,
    #[serde(default)]
    pub weights: Weights,
    #[serde(default)]
    pub notes: String,
}

fn four() -> u32 {
    4
}

pub fn default_max_run() -> BTreeMap<ShiftSymbol, u32> {
    BTreeMap::from([(ShiftSymbol::Day, 5), (ShiftSymbol::NightIn, 1), (ShiftSymbol::NightOut, 1)])
}

impl WardConfig {
    /// A ward with default rules and no staffing bounds.
    pub fn new(nurses: Vec<Nurse>, calendar: CalendarWindow) -> Self {
        WardConfig {
            nurses,
            calendar,
            night_pattern: NightPattern::TwelveHour,
            staffing: Staffing::default(),
            pairs: vec![],
            forbidden_pairs: vec![],
            forbidden_assignments: vec![],
            sequences: SequenceRules::standard(),
            max_run: default_max_run(),
            weekly_off: None,
            off_reserve: 4,
            weekend_off_min: 4,
            avg_fssm: None,
            avg_ope: None,
            toggles: Toggles::default(),
            day_extra_shifts: false,
            weights: Weights::default(),
            notes: String::new(),
        }
    }

    pub fn nurse_count(&self) -> usize {
        self.nurses.len()
    }

    pub fn nurse_index(&self, id: &str) -> Result<usize> {
        self.nurses
            .iter()
            .position(|n| n.id == id)
            .ok_or_else(|| Error::UnknownNurse(id.to_string()))
    }

    pub fn nurses_where(&self, f: impl Fn(&Nurse) -> bool) -> Vec<usize> {
        (0..self.nurses.len()).filter(|&i| f(&self.nurses[i])).collect()
    }

    /// N_n
    pub fn night_capable(&self) -> Vec<usize> {
        self.nurses_where(|n| n.night_class == NightClass::NightCapable)
    }

    /// N_n ∪ N_no
    pub fn night_workers(&self) -> Vec<usize> {
        self.nurses_where(Nurse::works_nights)
    }

    /// Members of a staffing category, split per team where applicable.
    pub fn category_members(&self, c: StaffCategory) -> Vec<(Option<Team>, Vec<usize>)> {
        let g = |n: &Nurse, gs: &[u8]| n.group.is_some_and(|x| gs.contains(&x));
        let plain = |f: &dyn Fn(&Nurse) -> bool| vec![(None, self.nurses_where(f))];
        let per_team = |f: &dyn Fn(&Nurse) -> bool| {
            [Team::A, Team::B]
                .into_iter()
                .map(|t| (Some(t), self.nurses_where(|n| n.team == Some(t) && f(n))))
                .collect()
        };
        match c {
            StaffCategory::All => plain(&|n| n.group.is_some()),
            StaffCategory::Group1 => plain(&|n| g(n, &[1])),
            StaffCategory::Group12 => plain(&|n| g(n, &[1, 2])),
            StaffCategory::Group4 => plain(&|n| g(n, &[4])),
            StaffCategory::TeamGroup1 => per_team(&|n| g(n, &[1])),
            StaffCategory::TeamGroup12 => per_team(&|n| g(n, &[1, 2])),
            StaffCategory::TeamGroup34 => per_team(&|n| g(n, &[3, 4])),
            StaffCategory::Team => per_team(&|_| true),
            StaffCategory::Rookie => plain(&|n| n.rookie),
            StaffCategory::Men => plain(&|n| n.male),
            StaffCategory::CareWorker => plain(&|n| n.care_worker),
        }
    }

    /// Monthly regular-off count for one nurse.
    pub fn n_off(&self, nurse: usize) -> u32 {
        self.nurses[nurse]
            .weekly_off
            .or(self.weekly_off)
            .unwrap_or(self.calendar.target_off_days().len() as u32)
    }

    /// Sum of night lower bounds over a day subset, divided by |N_n|.
    fn derived_average(&self, days: &[usize]) -> Ratio<i64> {
        let nn = self.night_capable().len() as i64;
        if nn == 0 {
            return Ratio::from_integer(0);
        }
        let total: i64 = days
            .iter()
            .map(|&d| {
                self.staffing.night.all.lb.get(self.calendar.day_class(d)).unwrap_or(0) as i64
            })
            .sum();
        Ratio::new(total, nn)
    }

    /// N̄_fssm
    pub fn fssm_average(&self) -> Ratio<i64> {
        self.avg_fssm.unwrap_or_else(|| self.derived_average(&self.calendar.fssm_days()))
    }

    /// N̄_ope
    pub fn ope_average(&self) -> Ratio<i64> {
        self.avg_ope.unwrap_or_else(|| self.derived_average(&self.calendar.event_days()))
    }

    /// Symbols the given stage may place in a cell it is free to choose.
    pub fn stage_alphabet(&self, stage: Stage) -> SymbolSet {
        match stage {
            Stage::Night => SymbolSet::NIGHT_STAGE,
            Stage::Day if self.day_extra_shifts => {
                SymbolSet::DAY_STAGE.with(ShiftSymbol::Early).with(ShiftSymbol::Late)
            }
            Stage::Day => SymbolSet::DAY_STAGE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for n in &self.nurses {
            if n.id.trim().is_empty() {
                return Err(Error::Config("nurse with empty id".into()));
            }
            if !seen.insert(n.id.as_str()) {
                return Err(Error::Config(format!("duplicate nurse id {:?}", n.id)));
            }
            if let Some(g) = n.group {
                if !(1..=4).contains(&g) {
                    return Err(Error::Config(format!("nurse {:?}: group {g} outside 1..4", n.id)));
                }
            }
            if let (Some(lb), Some(ub)) = (n.night_lb, n.night_ub) {
                if lb > ub {
                    return Err(Error::BoundOrder { field: format!("nurses.{}.night", n.id), lb, ub });
                }
            }
            if n.night_count_fixed && (n.night_lb.is_none() || n.night_ub.is_none()) {
                return Err(Error::Config(format!(
                    "nurse {:?}: fixed night count needs both night_lb and night_ub",
                    n.id
                )));
            }
        }
        let check_ref = |id: &str| self.nurse_index(id).map(|_| ());
        for p in &self.pairs {
            check_ref(&p.n1)?;
            check_ref(&p.n2)?;
        }
        for p in &self.forbidden_pairs {
            check_ref(&p.n1)?;
            check_ref(&p.n2)?;
        }
        for f in &self.forbidden_assignments {
            check_ref(&f.nurse)?;
        }
        for (band, st) in [("night", &self.staffing.night), ("day", &self.staffing.day)] {
            for c in ALL_CATEGORIES {
                let b = st.get(c);
                for dc in DayClass::ALL {
                    if let (Some(lb), Some(ub)) = (b.lb.get(dc), b.ub.get(dc)) {
                        if lb > ub {
                            return Err(Error::BoundOrder {
                                field: format!("staffing.{band}.{}.{:?}", c.key(), dc).to_lowercase(),
                                lb,
                                ub,
                            });
                        }
                    }
                }
            }
        }
        for (id, w) in &self.weights.alpha {
            if *w < 0 {
                return Err(Error::Config(format!("weight for {id} is negative")));
            }
        }
        if self.weights.probe < 0 {
            return Err(Error::Config("probe weight is negative".into()));
        }
        let m = &self.weights.multipliers;
        for v in [
            m.night_fssm,
            m.night_five_run,
            m.night_three_nights,
            m.day_weekend_pair,
            m.day_pair_off,
            m.day_triple_off,
            m.day_single_day,
        ] {
            if v < 0 {
                return Err(Error::Config("preference multiplier is negative".into()));
            }
        }
        for (name, v) in [("avg_fssm", self.avg_fssm), ("avg_ope", self.avg_ope)] {
            if v.is_some_and(|r| r < Ratio::from_integer(0)) {
                return Err(Error::Config(format!("{name} is negative")));
            }
        }
        for (s, _) in &self.max_run {
            if !SymbolSet::WORK.contains(*s) {
                return Err(Error::Config(format!("max_run entry for non-work shift {}", s.token())));
            }
        }
        Ok(())
    }
}

pub const ALL_CATEGORIES: [StaffCategory; 11] = [
    StaffCategory::All,
    StaffCategory::Group1,
    StaffCategory::Group12,
    StaffCategory::Group4,
    StaffCategory::TeamGroup1,
    StaffCategory::TeamGroup12,
    StaffCategory::TeamGroup34,
    StaffCategory::Team,
    StaffCategory::Rookie,
    StaffCategory::Men,
    StaffCategory::CareWorker,
];
