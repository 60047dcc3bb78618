//! Hard-conflict probe. Every hard term is relaxed into a heavily weighted
//! slack, the relaxation is solved, and the hard rules still broken at its
//! optimum are reported against the fixed cells that force them. Conflicts
//! no solve can touch (contradictory fixings, unset previous-month cells,
//! unset day-stage fixings) are found by direct inspection.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::anneal::{solve_heuristic, HeuristicOptions};
use super::exact::{solve_instance, ExactOptions};
use crate::catalog::{check_stage_hard, compile_stage, CellRef, ConstraintId, Penalty, ViolationRecord};
use crate::domain::{Provenance, Roster, ShiftSymbol, Stage, WardConfig};
use crate::encoder::{encode_compiled, free_mask};
use crate::error::{Error, Result};

/// An extra wish pinned on top of the wish table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fixing {
    pub nurse: String,
    pub date: NaiveDate,
    pub symbol: ShiftSymbol,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "engine", rename_all = "snake_case")]
pub enum ProbeEngine {
    Exact(ExactOptions),
    Heuristic(HeuristicOptions),
}

impl Default for ProbeEngine {
    fn default() -> Self {
        ProbeEngine::Exact(ExactOptions::with_time(60.0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub constraint: ConstraintId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nurse: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub date: Option<NaiveDate>,
    #[serde(with = "crate::catalog::penalty_serde")]
    pub magnitude: Penalty,
    pub note: String,
    /// Fixed cells involved; changing one of them is the suggested repair.
    pub suggested_cells: Vec<CellRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub stage: Stage,
    pub feasible: bool,
    pub records: Vec<ProbeRecord>,
}

impl ProbeReport {
    pub fn ids(&self) -> Vec<ConstraintId> {
        self.records.iter().map(|r| r.constraint).collect()
    }

    pub fn render(&self) -> String {
        if self.records.is_empty() {
            return format!("{} stage: no hard conflicts\n", self.stage);
        }
        let mut out = format!("{} stage: {} hard conflict(s)\n", self.stage, self.records.len());
        for r in &self.records {
            out.push_str(&format!(
                "  {} {} {}: {}",
                r.constraint,
                r.nurse.as_deref().unwrap_or("-"),
                r.date.map(|d| d.to_string()).unwrap_or_else(|| "-".into()),
                r.note
            ));
            if !r.suggested_cells.is_empty() {
                let cells: Vec<String> = r.suggested_cells.iter().map(|c| format!("{}@{}", c.nurse, c.date)).collect();
                out.push_str(&format!(" [check {}]", cells.join(", ")));
            }
            out.push('\n');
        }
        out
    }
}

fn record(id: ConstraintId, nurse: &str, date: NaiveDate, note: String) -> ProbeRecord {
    let cell = CellRef { nurse: nurse.into(), date };
    ProbeRecord {
        constraint: id,
        nurse: Some(nurse.into()),
        date: Some(date),
        magnitude: Penalty::from_integer(1),
        note,
        suggested_cells: vec![cell],
    }
}

/// Lays the fixings over the wishes; returns the roster and the records of
/// fixings that contradict each other or the wish table.
fn apply_fixings(stage: Stage, cfg: &WardConfig, wishes: &Roster, fixings: &[Fixing]) -> Result<(Roster, Vec<ProbeRecord>)> {
    let mut r = wishes.clone();
    let mut out = Vec::new();
    let mut pinned = vec![false; r.cells().len()];
    let clash_id = match stage {
        Stage::Night => ConstraintId::night_hard(14),
        Stage::Day => ConstraintId::day_hard(1),
    };
    for f in fixings {
        let n = cfg.nurse_index(&f.nurse)?;
        let d = cfg.calendar.index_of(f.date).ok_or(Error::DateOutsideWindow(f.date))?;
        let c = r.cell_index(n, d);
        let current = r.get(n, d);
        let held = pinned[c] || (current != ShiftSymbol::Unset && !r.provenance(n, d).is_solver_owned());
        if held && current != f.symbol {
            out.push(record(clash_id, &f.nurse, f.date, format!("fixed to both {} and {}", current.glyph(), f.symbol.glyph())));
            continue;
        }
        if stage == Stage::Day && f.symbol == ShiftSymbol::Unset && cfg.calendar.is_target(d) {
            out.push(record(ConstraintId::day_hard(9), &f.nurse, f.date, "fixed to 未 in the day stage".into()));
        }
        pinned[c] = true;
        r.set(n, d, f.symbol, Provenance::Wish);
    }
    Ok((r, out))
}

/// Runs the probe. `feasible` is true iff no record is produced.
pub fn probe_hard(
    stage: Stage,
    cfg: &WardConfig,
    wishes: &Roster,
    fixings: &[Fixing],
    engine: &ProbeEngine,
) -> Result<ProbeReport> {
    cfg.validate()?;
    wishes.check_shape(cfg)?;
    let (pinned, mut records) = apply_fixings(stage, cfg, wishes, fixings)?;
    let relaxed = match engine {
        ProbeEngine::Exact(opts) => {
            let compiled = compile_stage(stage, cfg);
            let inst = encode_compiled(&compiled, cfg, &pinned, true)?;
            solve_instance(&inst, &compiled, cfg, &pinned, opts)?.roster
        }
        ProbeEngine::Heuristic(opts) => solve_heuristic(stage, cfg, &pinned, opts, None)?.roster,
    };
    let Some(relaxed) = relaxed else {
        return Err(Error::SolverOutput("relaxation returned no roster".into()));
    };
    let free = free_mask(stage, &pinned, cfg);
    let nd = cfg.calendar.len();
    for v in check_stage_hard(stage, &relaxed, cfg)? {
        records.push(from_violation(v, cfg, &free, nd));
    }
    Ok(ProbeReport { stage, feasible: records.is_empty(), records })
}

fn from_violation(v: ViolationRecord, cfg: &WardConfig, free: &[bool], nd: usize) -> ProbeRecord {
    let suggested_cells = v
        .support
        .iter()
        .filter(|c| {
            let n = cfg.nurse_index(&c.nurse).ok();
            let d = cfg.calendar.index_of(c.date);
            matches!((n, d), (Some(n), Some(d)) if !free[n * nd + d])
        })
        .cloned()
        .collect();
    ProbeRecord {
        constraint: v.constraint,
        nurse: v.nurse,
        date: v.date,
        magnitude: v.magnitude,
        note: v.note,
        suggested_cells,
    }
}
