//! Feedback comments and the final roster report.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::Session;
use crate::catalog::{check_stage_hard, evaluate_stage, soft_records, SoftPenaltyBreakdown, ViolationRecord};
use crate::domain::{Roster, ShiftSymbol, Stage, StaffCategory, SymbolSet, WardConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Info,
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feedback {
    pub severity: Severity,
    /// Stable machine-readable kind, e.g. `NIGHT_SHORTFALL`.
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dates: Vec<NaiveDate>,
}

fn band(stage: Stage) -> SymbolSet {
    match stage {
        Stage::Night => SymbolSet::NIGHT_BAND,
        Stage::Day => SymbolSet::DAY_BAND,
    }
}

/// Band headcount of the staffing pool (nurses with a group) on day `d`.
fn headcount(cfg: &WardConfig, roster: &Roster, stage: Stage, d: usize) -> u32 {
    let pool = &cfg.category_members(StaffCategory::All)[0].1;
    pool.iter().filter(|&&n| roster.is(n, d, band(stage))).count() as u32
}

fn date_list(ds: &[NaiveDate]) -> String {
    ds.iter().map(|d| d.format("%m-%d").to_string()).collect::<Vec<_>>().join(", ")
}

/// Comments for the head nurses on a solved stage: days below or above the
/// staffing bounds and any hard rule the result still breaks.
pub fn feedback(stage: Stage, cfg: &WardConfig, roster: &Roster) -> Result<Vec<Feedback>> {
    let b = &cfg.staffing.band(stage).all;
    let (mut short, mut over) = (Vec::new(), Vec::new());
    let mut missing = 0u32;
    for d in cfg.calendar.target_range() {
        let k = cfg.calendar.day_class(d);
        let have = headcount(cfg, roster, stage, d);
        if let Some(lb) = b.lb.get(k).filter(|&lb| have < lb) {
            short.push(cfg.calendar.date(d));
            missing += lb - have;
        }
        if b.ub.get(k).is_some_and(|ub| have > ub) {
            over.push(cfg.calendar.date(d));
        }
    }
    let (word, code) = match stage {
        Stage::Night => ("night", "NIGHT"),
        Stage::Day => ("day", "DAY"),
    };
    let mut out = Vec::new();
    if !short.is_empty() {
        out.push(Feedback {
            severity: Severity::Warning,
            code: format!("{code}_SHORTFALL"),
            message: format!(
                "{word} staffing is clearly short: {missing} nurse-shift(s) missing on {} day(s) ({}); consider relaxing wishes or adding staff",
                short.len(),
                date_list(&short)
            ),
            dates: short,
        });
    }
    if !over.is_empty() {
        out.push(Feedback {
            severity: Severity::Info,
            code: format!("{code}_SURPLUS"),
            message: format!("{word} staffing above the upper bound on {}", date_list(&over)),
            dates: over,
        });
    }
    let hard = check_stage_hard(stage, roster, cfg)?;
    if !hard.is_empty() {
        let mut ids: Vec<String> = hard.iter().map(|v| v.constraint.to_string()).collect();
        ids.dedup();
        let mut dates: Vec<NaiveDate> = hard.iter().filter_map(|v| v.date).collect();
        dates.sort();
        dates.dedup();
        out.push(Feedback {
            severity: Severity::Error,
            code: "HARD_VIOLATIONS".into(),
            message: format!("{} hard violation(s) remain: {}", hard.len(), ids.join(", ")),
            dates,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NurseSummary {
    pub nurse: String,
    pub nights: u32,
    pub offs: u32,
    pub special_offs: u32,
    pub weekend_offs: u32,
    pub longdays: u32,
    /// Longest run of work cells inside the target month.
    pub max_consecutive_work: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DaySummary {
    pub date: NaiveDate,
    pub weekend_or_holiday: bool,
    pub night: u32,
    pub night_lb: Option<u32>,
    pub night_ub: Option<u32>,
    pub day: u32,
    pub day_lb: Option<u32>,
    pub day_ub: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalReport {
    pub session: String,
    pub nurses: Vec<NurseSummary>,
    pub days: Vec<DaySummary>,
    /// Night rules on the edited night roster, then day rules on the final roster.
    pub violations: Vec<ViolationRecord>,
    pub night_breakdown: SoftPenaltyBreakdown,
    pub day_breakdown: SoftPenaltyBreakdown,
    pub feedback: Vec<Feedback>,
}

fn nurse_summary(cfg: &WardConfig, r: &Roster, n: usize) -> NurseSummary {
    let cal = &cfg.calendar;
    let t = cal.target_range();
    let count = |s: ShiftSymbol| t.clone().filter(|&d| r.get(n, d) == s).count() as u32;
    let weekend_offs = t.clone().filter(|&d| cal.is_weekend_or_holiday(d) && r.is(n, d, SymbolSet::OFF)).count() as u32;
    let (mut run, mut best) = (0u32, 0u32);
    for d in t.clone() {
        run = if r.is(n, d, SymbolSet::WORK) { run + 1 } else { 0 };
        best = best.max(run);
    }
    NurseSummary {
        nurse: cfg.nurses[n].id.clone(),
        nights: count(ShiftSymbol::NightIn),
        offs: count(ShiftSymbol::Off),
        special_offs: count(ShiftSymbol::SpecialOff),
        weekend_offs,
        longdays: count(ShiftSymbol::LongDay),
        max_consecutive_work: best,
    }
}

pub fn final_report(s: &Session) -> Result<FinalReport> {
    let cfg = &s.config;
    let night = s.night_roster.as_ref().ok_or_else(|| Error::Config("no night roster".into()))?;
    let fin = s
        .day
        .as_ref()
        .and_then(|d| d.roster.as_ref())
        .ok_or_else(|| Error::Config("no day roster".into()))?;
    let nurses = (0..cfg.nurses.len()).map(|n| nurse_summary(cfg, fin, n)).collect();
    let (nb, db) = (&cfg.staffing.night.all, &cfg.staffing.day.all);
    let days = cfg
        .calendar
        .target_range()
        .map(|d| {
            let k = cfg.calendar.day_class(d);
            DaySummary {
                date: cfg.calendar.date(d),
                weekend_or_holiday: cfg.calendar.is_weekend_or_holiday(d),
                night: headcount(cfg, fin, Stage::Night, d),
                night_lb: nb.lb.get(k),
                night_ub: nb.ub.get(k),
                day: headcount(cfg, fin, Stage::Day, d),
                day_lb: db.lb.get(k),
                day_ub: db.ub.get(k),
            }
        })
        .collect();
    let mut violations = check_stage_hard(Stage::Night, night, cfg)?;
    violations.extend(soft_records(Stage::Night, night, cfg)?);
    violations.extend(check_stage_hard(Stage::Day, fin, cfg)?);
    violations.extend(soft_records(Stage::Day, fin, cfg)?);
    let mut fb = feedback(Stage::Night, cfg, night)?;
    fb.extend(feedback(Stage::Day, cfg, fin)?);
    Ok(FinalReport {
        session: s.id.clone(),
        nurses,
        days,
        violations,
        night_breakdown: evaluate_stage(Stage::Night, night, cfg)?,
        day_breakdown: evaluate_stage(Stage::Day, fin, cfg)?,
        feedback: fb,
    })
}

fn bound(lb: Option<u32>, ub: Option<u32>) -> String {
    let f = |v: Option<u32>| v.map(|x| x.to_string()).unwrap_or_else(|| "-".into());
    format!("{}..{}", f(lb), f(ub))
}

impl FinalReport {
    /// Plain-text rendering with fixed ordering.
    pub fn render(&self) -> String {
        use crate::catalog::penalty_serde::format as pf;
        let mut o = format!("roster report for session {}\n\nnurses\n", self.session);
        o.push_str("  nurse       nights offs special weekend-offs 12h max-run\n");
        for n in &self.nurses {
            o.push_str(&format!(
                "  {:<10} {:>6} {:>4} {:>7} {:>12} {:>3} {:>7}\n",
                n.nurse, n.nights, n.offs, n.special_offs, n.weekend_offs, n.longdays, n.max_consecutive_work
            ));
        }
        o.push_str("\nstaffing\n  date        night  bounds   day  bounds\n");
        for d in &self.days {
            o.push_str(&format!(
                "  {}{} {:>5} {:>7} {:>5} {:>7}\n",
                d.date,
                if d.weekend_or_holiday { "*" } else { " " },
                d.night,
                bound(d.night_lb, d.night_ub),
                d.day,
                bound(d.day_lb, d.day_ub)
            ));
        }
        o.push_str(&format!("\nviolations ({})\n", self.violations.len()));
        for v in &self.violations {
            o.push_str(&format!(
                "  {} {} {} {}: {}\n",
                v.constraint,
                v.nurse.as_deref().unwrap_or("-"),
                v.date.map(|d| d.to_string()).unwrap_or_else(|| "-".into()),
                pf(&v.magnitude),
                v.note
            ));
        }
        for b in [&self.night_breakdown, &self.day_breakdown] {
            o.push_str(&format!("\n{} objective {}\n", b.stage, pf(&b.objective)));
            for e in b.entries.iter().filter(|e| e.enabled && !e.total.eq(&0.into())) {
                o.push_str(&format!("  {} weight {} total {}\n", e.id, e.weight, pf(&e.total)));
            }
        }
        o.push_str("\nfeedback\n");
        for f in &self.feedback {
            o.push_str(&format!("  [{:?}] {}\n", f.severity, f.message));
        }
        o
    }
}
