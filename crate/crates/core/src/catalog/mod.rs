//! Every hard and soft rule of both stages. Each rule has two independent
//! implementations: a direct evaluator over a concrete roster ([`eval`]) and a
//! compiled term form ([`terms`]) consumed by the IP encoder and the
//! local-search heuristic.

pub mod eval;
pub mod id;
pub mod terms;

use chrono::NaiveDate;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

pub use eval::{
    check_hard, check_stage_hard, evaluate_soft, evaluate_stage, hard_magnitude, soft_records, stage_is_feasible,
    Evaluation, HardCheck, SoftEval,
};
pub use id::{Axis, ConstraintId, Kind};
pub use terms::{compile_stage, Body, CompiledStage, Epigraph, LinExpr, Lit, Pattern, Term};

use crate::domain::{NightPattern, Stage, WardConfig};

/// Exact penalty values; fractional only through configured averages.
pub type Penalty = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellRef {
    pub nurse: String,
    pub date: NaiveDate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationRecord {
    pub constraint: ConstraintId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nurse: Option<String>,
    /// The day, or the first day of the offending window.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub date: Option<NaiveDate>,
    #[serde(with = "penalty_serde")]
    pub magnitude: Penalty,
    pub note: String,
    /// Cells the violated expression reads.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub support: Vec<CellRef>,
}

pub mod penalty_serde {
    //! Penalties as "a" or "a/b" strings.
    use super::Penalty;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Penalty, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Penalty, D::Error> {
        let t = String::deserialize(d)?;
        crate::domain::ward::ratio_opt::parse(&t).map_err(serde::de::Error::custom)
    }

    pub fn format(v: &Penalty) -> String {
        if v.is_integer() {
            v.numer().to_string()
        } else {
            format!("{}/{}", v.numer(), v.denom())
        }
    }
}

/// Per-constraint totals, per-nurse partials and the weighted objective.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoftPenaltyBreakdown {
    pub stage: Stage,
    pub entries: Vec<BreakdownEntry>,
    #[serde(with = "penalty_serde")]
    pub objective: Penalty,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BreakdownEntry {
    pub id: ConstraintId,
    pub enabled: bool,
    pub weight: i64,
    #[serde(with = "penalty_serde")]
    pub total: Penalty,
    /// Indexed like the ward's nurse list; zero for rules not attributed to nurses.
    #[serde(with = "penalty_vec")]
    pub per_nurse: Vec<Penalty>,
}

mod penalty_vec {
    use super::{penalty_serde::format, Penalty};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Penalty], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Penalty>, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        v.iter()
            .map(|t| crate::domain::ward::ratio_opt::parse(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

impl SoftPenaltyBreakdown {
    pub fn entry(&self, id: ConstraintId) -> Option<&BreakdownEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn total(&self, id: ConstraintId) -> Penalty {
        self.entry(id).map(|e| e.total).unwrap_or_default()
    }
}

/// Rules forming the per-nurse sums of each fairness epigraph.
pub fn epigraph_members(id: ConstraintId) -> Option<&'static [u8]> {
    match (id.stage, id.kind, id.index) {
        (Stage::Night, Kind::Soft, 34) => Some(&[26, 28]),
        (Stage::Night, Kind::Soft, 35) => Some(&[26, 27, 28, 29, 30, 31, 33]),
        (Stage::Day, Kind::Soft, 34) => Some(&[26, 27, 28, 30, 31, 32, 33]),
        _ => None,
    }
}

/// Rules realised through the encoder's assignment equalities and variable
/// bounds rather than through compiled terms.
pub fn is_structural(id: ConstraintId) -> bool {
    matches!(
        (id.stage, id.kind, id.index),
        (Stage::Night, Kind::Hard, 1 | 14) | (Stage::Day, Kind::Hard, 1 | 9)
    )
}

/// All identifiers of a stage in listing order: hard rules, then soft rules,
/// with care-worker duplicates after the rookie pair when that toggle is on.
pub fn stage_ids(stage: Stage, cfg: &WardConfig) -> Vec<ConstraintId> {
    let mut out = Vec::new();
    for i in 1..=id::family_size(stage, Kind::Hard) {
        out.push(ConstraintId::new(stage, Kind::Hard, i));
    }
    for i in 1..=id::family_size(stage, Kind::Soft) {
        out.push(ConstraintId::new(stage, Kind::Soft, i));
        if i == 18 && cfg.toggles.care_worker {
            out.push(ConstraintId::new(stage, Kind::Soft, 17).care_worker_variant());
            out.push(ConstraintId::new(stage, Kind::Soft, 18).care_worker_variant());
        }
    }
    out
}

pub fn soft_ids(stage: Stage, cfg: &WardConfig) -> Vec<ConstraintId> {
    stage_ids(stage, cfg).into_iter().filter(|i| !i.is_hard()).collect()
}

pub fn hard_ids(stage: Stage, cfg: &WardConfig) -> Vec<ConstraintId> {
    stage_ids(stage, cfg).into_iter().filter(|i| i.is_hard()).collect()
}

/// Whether the ward's toggles and night pattern switch the rule on.
pub fn is_enabled(id: ConstraintId, cfg: &WardConfig) -> bool {
    let t = &cfg.toggles;
    if id.care_worker {
        return t.care_worker;
    }
    match (id.stage, id.kind, id.index) {
        (Stage::Night, Kind::Hard, 13) | (Stage::Day, Kind::Hard, 8) => t.male,
        (Stage::Night, Kind::Hard, 9) => cfg.night_pattern == NightPattern::TwelveHour,
        (_, Kind::Soft, 9..=16) => t.team,
        (_, Kind::Soft, 17 | 18) => t.rookie,
        _ => true,
    }
}

/// Default soft weights: shift-level rules dominate nurse-level rules, which
/// dominate the fairness epigraphs. Hard rules carry no soft weight.
pub fn default_weight(id: ConstraintId) -> i64 {
    if id.is_hard() {
        return 0;
    }
    match (id.stage, id.index) {
        (_, 1..=18) => 1000,
        (_, 19 | 20) => 100,
        (Stage::Night, 21 | 22) => 100,
        (Stage::Night, 23) => 50,
        (Stage::Night, 24) => 20,
        (Stage::Night, 25 | 26) => 100,
        (Stage::Night, 27 | 28) => 20,
        (Stage::Night, 29..=33) => 50,
        (Stage::Night, _) => 10,
        (Stage::Day, 21) => 500,
        (Stage::Day, 22 | 23) => 100,
        (Stage::Day, 24 | 25) => 100,
        (Stage::Day, 26 | 28 | 29) => 50,
        (Stage::Day, 27) => 20,
        (Stage::Day, 30..=33) => 20,
        (Stage::Day, _) => 10,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub id: ConstraintId,
    pub enabled: bool,
    pub description: &'static str,
    /// Compact statement of the rule as evaluated.
    pub formula: &'static str,
}

/// Ordered listing of a stage's rules with their enabled flags.
pub fn catalog_listing(stage: Stage, cfg: &WardConfig) -> Vec<CatalogEntry> {
    stage_ids(stage, cfg)
        .into_iter()
        .map(|id| {
            let (description, formula) = describe(id);
            CatalogEntry { id, enabled: is_enabled(id, cfg), description, formula }
        })
        .collect()
}

pub fn describe(id: ConstraintId) -> (&'static str, &'static str) {
    use Kind::*;
    use Stage::*;
    if id.care_worker {
        return if id.index == 17 {
            ("care-worker staffing lower bound", "sum_d max(0, LB_cw - #care workers on band)")
        } else {
            ("care-worker staffing upper bound", "sum_d max(0, #care workers on band - UB_cw)")
        };
    }
    match (id.stage, id.kind, id.index) {
        (Night, Hard, 1) => ("wishes fixed; free cells limited to in/out/off/unset", "x = x' on wish cells; free cells in {in,out,off,unset}"),
        (Night, Hard, 2) => ("no unset-in-out after three day shifts from the previous month", "sum_{h<3} day(d+h) + unset(d+3) + in(d+4) <= 4, d in prev tail"),
        (Night, Hard, 3) => ("first target day is a night end iff the previous day is a night start", "out(d1) = in'(d_prev_last)"),
        (Night, Hard, 4) => ("month-end nights consistent with next-month wishes", "next-month offs/days/nights force or forbid in/out on d_last"),
        (Night, Hard, 5) => ("no six consecutive work days", "sum_{h<6} work(d+h) <= 5"),
        (Night, Hard, 6) => ("forbidden shift sequences", "sum_i x(d+i, s_i) <= |s| - 1"),
        (Night, Hard, 7) => ("day-only nurses take no nights", "in = out = 0 for day-only nurses"),
        (Night, Hard, 8) => ("fixed night counts stay inside the nurse's range", "LB <= sum_D in <= UB and LB <= sum_D out <= UB"),
        (Night, Hard, 9) => ("at most one night start in any four days", "sum_{h<4} in(d+h) <= 1"),
        (Night, Hard, 10) => ("per-shift run length cap", "sum_{h<=Nmax} s(d+h) <= Nmax"),
        (Night, Hard, 11) => ("triple-off nurses keep two three-off candidates", "sum_d s3off(d) >= 2"),
        (Night, Hard, 12) => ("a leader stays available for the day band", "sum_L [day,unset] >= 1 (weekday); [day,12h,unset] (weekend)"),
        (Night, Hard, 13) => ("male night staffing range", "LB_men <= sum_men in(d) <= UB_men"),
        (Night, Hard, 14) => ("exactly one symbol per cell", "sum_s x(n,d,s) = 1"),
        (Night, Soft, 1) => ("night staffing lower bound", "sum_d max(0, LB - #grouped on nights)"),
        (Night, Soft, 2) => ("night staffing upper bound", "sum_d max(0, #grouped on nights - UB)"),
        (Night, Soft, 3) => ("group 1 night staffing lower bound", "sum_d max(0, LB_1 - #G1)"),
        (Night, Soft, 4) => ("group 1 night staffing upper bound", "sum_d max(0, #G1 - UB_1)"),
        (Night, Soft, 5) => ("groups 1-2 night staffing lower bound", "sum_d max(0, LB_12 - #G12)"),
        (Night, Soft, 6) => ("groups 1-2 night staffing upper bound", "sum_d max(0, #G12 - UB_12)"),
        (Night, Soft, 7) => ("group 4 night staffing lower bound", "sum_d max(0, LB_4 - #G4)"),
        (Night, Soft, 8) => ("group 4 night staffing upper bound", "sum_d max(0, #G4 - UB_4)"),
        (Night, Soft, 9) => ("team and group 1 night staffing lower bound", "sum_t sum_d max(0, LB - #T∩G1)"),
        (Night, Soft, 10) => ("team and group 1 night staffing upper bound", "sum_t sum_d max(0, #T∩G1 - UB)"),
        (Night, Soft, 11) => ("team and groups 1-2 night staffing lower bound", "sum_t sum_d max(0, LB - #T∩G12)"),
        (Night, Soft, 12) => ("team and groups 1-2 night staffing upper bound", "sum_t sum_d max(0, #T∩G12 - UB)"),
        (Night, Soft, 13) => ("team and groups 3-4 night staffing lower bound", "sum_t sum_d max(0, LB - #T∩G34)"),
        (Night, Soft, 14) => ("team and groups 3-4 night staffing upper bound", "sum_t sum_d max(0, #T∩G34 - UB)"),
        (Night, Soft, 15) => ("team night staffing lower bound", "sum_t sum_d max(0, LB - #T)"),
        (Night, Soft, 16) => ("team night staffing upper bound", "sum_t sum_d max(0, #T - UB)"),
        (Night, Soft, 17) => ("rookie night staffing lower bound", "sum_d max(0, LB_r - #rookies)"),
        (Night, Soft, 18) => ("rookie night staffing upper bound", "sum_d max(0, #rookies - UB_r)"),
        (_, Soft, 19) => ("pair co-working minimum", "sum_p max(0, Nmin - sum_d s_pair(d))"),
        (_, Soft, 20) => ("forbidden pairs", "sum_p sum_d max(0, x1 + x2 - 1)"),
        (Night, Soft, 21) | (Day, Soft, 22) => ("forbidden assignments by day class", "sum_f sum_{d: class(d)=c} x(n,d,s)"),
        (Night, Soft, 22) | (Day, Soft, 23) => ("soft forbidden sequences", "sum max(0, sum_i x(d+i,s_i) - (|s|-1))"),
        (Night, Soft, 23) => ("keep offs placeable for the day stage", "sum_n max(0, 4 - (N_off - sum_t off))"),
        (Night, Soft, 24) => ("night interval upper limit", "sum max(0, 1 - sum_{h<14} in(d+h))"),
        (Night, Soft, 25) => ("night count lower bound", "max(0, LB - min(sum in, sum out))"),
        (Night, Soft, 26) => ("night count upper bound", "max(0, max(sum in, sum out) - UB)"),
        (Night, Soft, 27) => ("Friday-to-Monday night smoothing", "w27 max(0, sum_fssm in - avg_fssm)"),
        (Night, Soft, 28) => ("event-day night smoothing", "max(0, sum_ope in - avg_ope)"),
        (Night, Soft, 29) => ("avoid five-run ending in a night", "w29 max(0, day+day+[12h,unset]+in - 3)"),
        (Night, Soft, 30) => ("avoid 5-1-4 and 4-1-5 runs with nights", "max(0, max(A, B) - 9)"),
        (Night, Soft, 31) => ("avoid three nights in nine days", "w31 sum max(0, sum_{h<9} in - 2)"),
        (Night, Soft, 32) => ("avoid four nights in 13 (10 for night-only) days", "sum max(0, sum in - 3)"),
        (Night, Soft, 33) => ("avoid four nights in two weeks", "sum max(0, sum_{h<14} in - 3)"),
        (Night, Soft, 34) => ("fairness of night-count penalties", "max_n (f26_n + f28_n)"),
        (Night, Soft, 35) => ("fairness of nurse penalties", "max_n sum_{i in 26..33, i != 32} f_i,n"),
        (Day, Hard, 1) => ("wishes fixed; free cells limited to day/off", "x = x' on fixed cells; free cells in {day,off}(+early,late)"),
        (Day, Hard, 2) => ("night-only nurses take no day shift", "day = 0 for night-only nurses"),
        (Day, Hard, 3) => ("per-shift run length cap", "sum_{h<=Nmax} s(d+h) <= Nmax"),
        (Day, Hard, 4) => ("no six consecutive work days", "sum_{h<6} work(d+h) <= 5"),
        (Day, Hard, 5) => ("no six-run across the month end through a final night", "sum_{h<4} work(d_last-4+h) + in(d_last) <= 4"),
        (Day, Hard, 6) => ("no three day shifts before a longday", "sum_{h<3} day(d+h) + 12h(d+3) <= 3"),
        (Day, Hard, 7) => ("forbidden shift sequences", "sum_i x(d+i, s_i) <= |s| - 1"),
        (Day, Hard, 8) => ("male day staffing range", "LB_men <= sum_men band(d) <= UB_men"),
        (Day, Hard, 9) => ("every target cell holds a final symbol", "sum_s x = 1, unset excluded"),
        (Day, Soft, 1) => ("day staffing lower bound", "sum_d max(0, LB - #grouped on band)"),
        (Day, Soft, 2) => ("day staffing upper bound", "sum_d max(0, #grouped on band - UB)"),
        (Day, Soft, 3) => ("group 1 day staffing lower bound", "sum_d max(0, LB_1 - #G1)"),
        (Day, Soft, 4) => ("group 1 day staffing upper bound", "sum_d max(0, #G1 - UB_1)"),
        (Day, Soft, 5) => ("groups 1-2 day staffing lower bound", "sum_d max(0, LB_12 - #G12)"),
        (Day, Soft, 6) => ("groups 1-2 day staffing upper bound", "sum_d max(0, #G12 - UB_12)"),
        (Day, Soft, 7) => ("group 4 day staffing lower bound", "sum_d max(0, LB_4 - #G4)"),
        (Day, Soft, 8) => ("group 4 day staffing upper bound", "sum_d max(0, #G4 - UB_4)"),
        (Day, Soft, 9) => ("team and group 1 day staffing lower bound", "sum_t sum_d max(0, LB - #T∩G1)"),
        (Day, Soft, 10) => ("team and group 1 day staffing upper bound", "sum_t sum_d max(0, #T∩G1 - UB)"),
        (Day, Soft, 11) => ("team and groups 1-2 day staffing lower bound", "sum_t sum_d max(0, LB - #T∩G12)"),
        (Day, Soft, 12) => ("team and groups 1-2 day staffing upper bound", "sum_t sum_d max(0, #T∩G12 - UB)"),
        (Day, Soft, 13) => ("team and groups 3-4 day staffing lower bound", "sum_t sum_d max(0, LB - #T∩G34)"),
        (Day, Soft, 14) => ("team and groups 3-4 day staffing upper bound", "sum_t sum_d max(0, #T∩G34 - UB)"),
        (Day, Soft, 15) => ("team day staffing lower bound", "sum_t sum_d max(0, LB - #T)"),
        (Day, Soft, 16) => ("team day staffing upper bound", "sum_t sum_d max(0, #T - UB)"),
        (Day, Soft, 17) => ("rookie day staffing lower bound", "sum_d max(0, LB_r - #rookies)"),
        (Day, Soft, 18) => ("rookie day staffing upper bound", "sum_d max(0, #rookies - UB_r)"),
        (Day, Soft, 21) => ("leader on the day band", "max(0, 1 - sum_L day) weekdays; [day,12h] weekends"),
        (Day, Soft, 24) => ("regular-off count lower bound", "max(0, N_off - sum_t off)"),
        (Day, Soft, 25) => ("regular-off count upper bound", "max(0, sum_t off - N_off)"),
        (Day, Soft, 26) => ("weekend and holiday offs", "max(0, 4 - sum_{t,off} S_off)"),
        (Day, Soft, 27) => ("avoid three consecutive day-band shifts", "sum max(0, sum_{h<3} band(d+h) - 2)"),
        (Day, Soft, 28) => ("avoid a single off after five work days", "sum max(0, 5 work + off + work - 6)"),
        (Day, Soft, 29) => ("two offs in every nine days", "sum max(0, 2 - sum_{h<9} S_off)"),
        (Day, Soft, 30) => ("a Saturday-Sunday pair off", "w30 max(0, 1 - sum_sat s_ss)"),
        (Day, Soft, 31) => ("two double offs", "w31 max(0, 2 - sum s_2off)"),
        (Day, Soft, 32) => ("one triple off", "w32 max(0, 1 - sum s_3off)"),
        (Day, Soft, 33) => ("single day shifts between offs", "w33 max(0, sum s_1d - 2) or sum s_1d"),
        (Day, Soft, 34) => ("fairness of nurse penalties", "max_n sum_{i in 26..33, i != 29} f_i,n"),
        _ => ("unknown", ""),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_calendar, Nurse};

    fn cfg() -> WardConfig {
        WardConfig::new(vec![Nurse::new("a")], build_calendar("2024-11", &[], &[]).unwrap())
    }

    #[test]
    fn listing_sizes_match_the_catalog() {
        let c = cfg();
        let night = catalog_listing(Stage::Night, &c);
        assert_eq!(night.iter().filter(|e| e.id.is_hard()).count(), 14);
        assert_eq!(night.iter().filter(|e| !e.id.is_hard()).count(), 35);
        let day = catalog_listing(Stage::Day, &c);
        assert_eq!(day.iter().filter(|e| e.id.is_hard()).count(), 9);
        assert_eq!(day.iter().filter(|e| !e.id.is_hard()).count(), 34);
        assert!(night.iter().all(|e| e.enabled));
        assert!(night.iter().chain(&day).all(|e| e.description != "unknown"));
    }

    #[test]
    fn team_toggle_disables_team_staffing() {
        let mut c = cfg();
        c.toggles.team = false;
        let day = catalog_listing(Stage::Day, &c);
        for e in &day {
            let team = !e.id.is_hard() && (9..=16).contains(&e.id.index);
            assert_eq!(e.enabled, !team, "{}", e.id);
        }
    }

    #[test]
    fn care_worker_toggle_registers_duplicates() {
        let mut c = cfg();
        c.toggles.care_worker = true;
        let ids = stage_ids(Stage::Night, &c);
        let pos = ids.iter().position(|i| i.care_worker).unwrap();
        assert_eq!(ids[pos - 1], ConstraintId::night_soft(18));
        assert_eq!(ids.iter().filter(|i| i.care_worker).count(), 2);
        assert_eq!(ids.len(), 14 + 35 + 2);
    }

    #[test]
    fn sixteen_hour_pattern_switches_off_the_interval_floor() {
        let mut c = cfg();
        c.night_pattern = NightPattern::SixteenHour;
        assert!(!is_enabled(ConstraintId::night_hard(9), &c));
    }
}
