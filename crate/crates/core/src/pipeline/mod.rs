//! The two-stage workflow as a state machine: wishes in, night stage
//! solved, human edits, 未→12h post-step, day stage solved, final report.

pub mod report;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::catalog::{check_stage_hard, CellRef, ViolationRecord};
use crate::domain::{NightPattern, Provenance, Roster, ShiftSymbol, Stage, SymbolSet, WardConfig};
use crate::encoder::lp::{render, ModelFormat};
use crate::encoder::encode_stage;
use crate::error::{Error, Result};
use crate::solver::{
    probe_hard, solve_exact, solve_heuristic, ExactOptions, Fixing, HeuristicOptions, ProbeEngine, ProbeReport,
    StageSolution, TracePoint,
};

pub use report::{feedback, final_report, DaySummary, Feedback, FinalReport, NurseSummary, Severity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Phase {
    Intake,
    NightSolved,
    Editing,
    DayReady,
    DaySolved,
    Finalized,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        f.write_str(&s)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "engine", rename_all = "snake_case")]
pub enum SolverChoice {
    Exact(ExactOptions),
    Heuristic(HeuristicOptions),
}

impl SolverChoice {
    pub fn solve(
        &self,
        stage: Stage,
        cfg: &WardConfig,
        input: &Roster,
        progress: Option<&(dyn Fn(&TracePoint) + Sync)>,
    ) -> Result<StageSolution> {
        match self {
            SolverChoice::Exact(o) => solve_exact(stage, cfg, input, o),
            SolverChoice::Heuristic(o) => solve_heuristic(stage, cfg, input, o, progress),
        }
    }

    pub fn probe_engine(&self) -> ProbeEngine {
        match self {
            SolverChoice::Exact(o) => ProbeEngine::Exact(o.clone()),
            SolverChoice::Heuristic(o) => ProbeEngine::Heuristic(o.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellEdit {
    pub nurse: String,
    pub date: NaiveDate,
    pub symbol: ShiftSymbol,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub seq: u64,
    pub nurse: String,
    pub date: NaiveDate,
    pub old: ShiftSymbol,
    pub new: ShiftSymbol,
    /// Caller-supplied timestamp, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostProcessReport {
    /// 未 cells before a 入 that became 12h.
    pub converted: Vec<CellRef>,
    /// Cells before a 入 left as they were, with the reason.
    pub kept: Vec<(CellRef, ShiftSymbol, String)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub phase: Phase,
    pub config: WardConfig,
    pub wishes: Roster,
    /// Bumped by every state change; edits must name the current value.
    pub revision: u64,
    #[serde(default)]
    pub intake_warnings: Vec<crate::io::Warning>,
    #[serde(default)]
    pub probe: Option<ProbeReport>,
    /// Lets the night stage run despite a failed probe.
    #[serde(default)]
    pub probe_acknowledged: bool,
    #[serde(default)]
    pub night: Option<StageSolution>,
    /// Night roster with edits and the post-step applied.
    #[serde(default)]
    pub night_roster: Option<Roster>,
    #[serde(default)]
    pub audit: Vec<AuditEntry>,
    /// Audit entries before this index belong to an earlier night solve.
    #[serde(default)]
    pub audit_start: usize,
    #[serde(default)]
    pub postprocess: Option<PostProcessReport>,
    #[serde(default)]
    pub day: Option<StageSolution>,
}

/// Putting the solver's own value back restores its provenance.
fn edit_provenance(solved: Option<&Roster>, n: usize, d: usize, sym: ShiftSymbol) -> Provenance {
    match solved {
        Some(r) if r.get(n, d) == sym && r.provenance(n, d).is_solver_owned() => r.provenance(n, d),
        _ => Provenance::Edited,
    }
}

impl Session {
    pub fn new(id: impl Into<String>, config: WardConfig, wishes: Roster) -> Result<Session> {
        config.validate()?;
        wishes.check_shape(&config)?;
        Ok(Session {
            id: id.into(),
            phase: Phase::Intake,
            config,
            wishes,
            revision: 0,
            intake_warnings: Vec::new(),
            probe: None,
            probe_acknowledged: false,
            night: None,
            night_roster: None,
            audit: Vec::new(),
            audit_start: 0,
            postprocess: None,
            day: None,
        })
    }

    fn need(&self, ok: &[Phase], needed: &str) -> Result<()> {
        if ok.contains(&self.phase) {
            Ok(())
        } else {
            Err(Error::WrongPhase { phase: self.phase.to_string(), needed: needed.into() })
        }
    }

    /// Roster a stage would start from in the current phase.
    pub fn stage_input(&self, stage: Stage) -> Result<Roster> {
        match stage {
            Stage::Night => {
                self.need(&[Phase::Intake, Phase::NightSolved, Phase::Editing], "INTAKE, NIGHT_SOLVED or EDITING")?;
                Ok(self.night_roster.clone().unwrap_or_else(|| self.wishes.clone()))
            }
            Stage::Day => {
                self.need(&[Phase::DayReady, Phase::DaySolved], "DAY_READY or DAY_SOLVED")?;
                self.night_roster.clone().ok_or_else(|| Error::Config("no night roster".into()))
            }
        }
    }

    /// The current roster: the day result, else the (edited) night roster,
    /// else the wishes.
    pub fn current_roster(&self) -> &Roster {
        self.day
            .as_ref()
            .and_then(|d| d.roster.as_ref())
            .filter(|_| matches!(self.phase, Phase::DaySolved | Phase::Finalized))
            .or(self.night_roster.as_ref())
            .unwrap_or(&self.wishes)
    }

    /// Starts a session from a night roster edited outside the service. The
    /// roster is the day stage's input; its non-未 cells count as fixed.
    pub fn from_edited_night(id: impl Into<String>, config: WardConfig, edited: Roster) -> Result<Session> {
        let mut s = Session::new(id, config, edited.clone())?;
        s.night_roster = Some(edited);
        s.phase = Phase::Editing;
        Ok(s)
    }

    /// Fails the way a solve of `stage` would fail on phase or probe grounds.
    pub fn check_ready(&self, stage: Stage) -> Result<()> {
        self.stage_input(stage)?;
        if stage == Stage::Night {
            if let Some(p) = self.probe.as_ref().filter(|p| p.stage == Stage::Night && !p.feasible) {
                if !self.probe_acknowledged {
                    return Err(Error::ProbeFailed(p.records.len()));
                }
            }
        }
        Ok(())
    }

    pub fn probe(&mut self, stage: Stage, fixings: &[Fixing], engine: &ProbeEngine) -> Result<&ProbeReport> {
        let input = self.stage_input(stage)?;
        let rep = probe_hard(stage, &self.config, &input, fixings, engine)?;
        self.probe = Some(rep);
        self.probe_acknowledged = false;
        self.revision += 1;
        Ok(self.probe.as_ref().unwrap())
    }

    pub fn acknowledge_probe(&mut self) {
        self.probe_acknowledged = true;
        self.revision += 1;
    }

    /// Solves (or re-solves) the night stage. Edited cells stay fixed. A
    /// failed night probe blocks this until acknowledged.
    pub fn run_night(
        &mut self,
        solver: &SolverChoice,
        progress: Option<&(dyn Fn(&TracePoint) + Sync)>,
    ) -> Result<&StageSolution> {
        self.check_ready(Stage::Night)?;
        let input = self.stage_input(Stage::Night)?;
        let sol = solver.solve(Stage::Night, &self.config, &input, progress)?;
        if let Some(r) = &sol.roster {
            self.night_roster = Some(r.clone());
            self.audit_start = self.audit.len();
            self.phase = Phase::NightSolved;
        }
        self.night = Some(sol);
        self.revision += 1;
        Ok(self.night.as_ref().unwrap())
    }

    /// Applies edits to the night roster. Hard rules the edits break come
    /// back as warnings; the edits are kept either way.
    pub fn apply_edits(&mut self, edits: &[CellEdit], at: Option<String>) -> Result<Vec<ViolationRecord>> {
        self.need(&[Phase::NightSolved, Phase::Editing], "NIGHT_SOLVED or EDITING")?;
        let cfg = &self.config;
        let mut roster = self.night_roster.clone().ok_or_else(|| Error::Config("no night roster".into()))?;
        let mut cells = Vec::new();
        for e in edits {
            let n = cfg.nurse_index(&e.nurse)?;
            let d = cfg.calendar.index_of(e.date).ok_or(Error::DateOutsideWindow(e.date))?;
            if !cfg.calendar.is_target(d) {
                return Err(Error::DateOutsideWindow(e.date));
            }
            if !SymbolSet::EDITABLE.contains(e.symbol) {
                return Err(Error::OutsideAlphabet {
                    nurse: e.nurse.clone(),
                    date: e.date,
                    symbol: e.symbol.glyph().into(),
                    stage: "edit".into(),
                });
            }
            cells.push((n, d, e));
        }
        let solved = self.night.as_ref().and_then(|s| s.roster.as_ref());
        for (n, d, e) in cells.iter().copied() {
            let old = roster.get(n, d);
            roster.set(n, d, e.symbol, edit_provenance(solved, n, d, e.symbol));
            self.audit.push(AuditEntry {
                seq: self.audit.len() as u64,
                nurse: e.nurse.clone(),
                date: e.date,
                old,
                new: e.symbol,
                at: at.clone(),
            });
        }
        let touched: Vec<CellRef> = cells.iter().map(|(_, _, e)| CellRef { nurse: e.nurse.clone(), date: e.date }).collect();
        let warnings = check_stage_hard(Stage::Night, &roster, cfg)?
            .into_iter()
            .filter(|v| v.support.iter().any(|c| touched.contains(c)))
            .collect();
        self.night_roster = Some(roster);
        self.phase = Phase::Editing;
        self.revision += 1;
        Ok(warnings)
    }

    /// Replays the audit log on the last night solve.
    pub fn replay_edits(&self) -> Result<Roster> {
        let base = self
            .night
            .as_ref()
            .and_then(|s| s.roster.clone())
            .ok_or_else(|| Error::Config("no night solve to replay on".into()))?;
        let mut r = base.clone();
        for a in &self.audit[self.audit_start..] {
            let n = self.config.nurse_index(&a.nurse)?;
            let d = self.config.calendar.index_of(a.date).ok_or(Error::DateOutsideWindow(a.date))?;
            r.set(n, d, a.new, edit_provenance(Some(&base), n, d, a.new));
        }
        Ok(r)
    }

    /// Turns each 未 right before a 入 into 12h (12-hour pattern only) and
    /// moves the session to DAY_READY.
    pub fn post_process_longday(&mut self) -> Result<&PostProcessReport> {
        self.need(&[Phase::NightSolved, Phase::Editing], "NIGHT_SOLVED or EDITING")?;
        let cfg = &self.config;
        let mut roster = self.night_roster.clone().ok_or_else(|| Error::Config("no night roster".into()))?;
        let mut rep = PostProcessReport::default();
        if cfg.night_pattern == NightPattern::TwelveHour {
            let t = cfg.calendar.target_range();
            for n in 0..cfg.nurses.len() {
                for d in t.clone() {
                    if d + 1 >= cfg.calendar.len() || roster.get(n, d + 1) != ShiftSymbol::NightIn {
                        continue;
                    }
                    let cell = CellRef { nurse: cfg.nurses[n].id.clone(), date: cfg.calendar.date(d) };
                    match roster.get(n, d) {
                        ShiftSymbol::Unset => {
                            roster.set(n, d, ShiftSymbol::LongDay, Provenance::Postprocessed);
                            rep.converted.push(cell);
                        }
                        ShiftSymbol::LongDay => {}
                        s => {
                            let why = match roster.provenance(n, d) {
                                Provenance::Wish => "wish",
                                Provenance::Edited => "edited",
                                _ => "assigned",
                            };
                            rep.kept.push((cell, s, format!("{} before a night start kept ({why})", s.glyph())));
                        }
                    }
                }
            }
        }
        self.night_roster = Some(roster);
        self.postprocess = Some(rep);
        self.phase = Phase::DayReady;
        self.revision += 1;
        Ok(self.postprocess.as_ref().unwrap())
    }

    /// Solves the day stage on top of the post-processed night roster.
    pub fn run_day(
        &mut self,
        solver: &SolverChoice,
        progress: Option<&(dyn Fn(&TracePoint) + Sync)>,
    ) -> Result<&StageSolution> {
        let input = self.stage_input(Stage::Day)?;
        let sol = solver.solve(Stage::Day, &self.config, &input, progress)?;
        if sol.roster.is_some() {
            self.phase = Phase::DaySolved;
        }
        self.day = Some(sol);
        self.revision += 1;
        Ok(self.day.as_ref().unwrap())
    }

    pub fn finalize(&mut self) -> Result<()> {
        self.need(&[Phase::DaySolved], "DAY_SOLVED")?;
        self.phase = Phase::Finalized;
        self.revision += 1;
        Ok(())
    }

    pub fn final_report(&self) -> Result<FinalReport> {
        self.need(&[Phase::DaySolved, Phase::Finalized], "DAY_SOLVED or FINALIZED")?;
        final_report(self)
    }

    /// Feedback on the latest result of a stage.
    pub fn feedback(&self, stage: Stage) -> Result<Vec<Feedback>> {
        let sol = match stage {
            Stage::Night => self.night.as_ref(),
            Stage::Day => self.day.as_ref(),
        };
        let roster = sol
            .and_then(|s| s.roster.as_ref())
            .ok_or_else(|| Error::WrongPhase { phase: self.phase.to_string(), needed: format!("a solved {stage} stage") })?;
        feedback(stage, &self.config, roster)
    }

    /// The stage's program in a text format, built from the current input.
    pub fn export_instance(&self, stage: Stage, format: ModelFormat) -> Result<String> {
        let input = self.stage_input(stage)?;
        Ok(render(&encode_stage(stage, &self.config, &input, false)?, format))
    }
}
