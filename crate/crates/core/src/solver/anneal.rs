//! Simulated annealing with restarts over the compiled terms. Term values
//! are kept in scaled integers and only the terms that read a changed cell
//! are recomputed after a move.

use std::time::Instant;

use num_integer::Integer;
use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{to_f64, SolveReport, SolveStatus, StageSolution, TracePoint};
use crate::catalog::{check_stage_hard, compile_stage, evaluate_stage, Body, CompiledStage, LinExpr, Penalty};
use crate::domain::{NightClass, Provenance, Roster, ShiftSymbol, Stage, WardConfig};
use crate::encoder::{check_stage_input, free_mask};
use crate::error::{Error, Result};
use ShiftSymbol::*;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct HeuristicOptions {
    /// Wall-clock cap in seconds. Runs that finish their iteration budget
    /// first are reproducible for a given seed.
    pub time_limit: f64,
    pub seed: u64,
    pub iterations: u64,
    pub restarts: u32,
    /// Starting temperature in objective units; estimated when absent.
    pub t_start: Option<f64>,
    /// Final temperature as a fraction of the starting one.
    pub t_end_ratio: f64,
    /// Cost of one unit of hard violation; derived from the soft weights
    /// when absent.
    pub hard_weight: Option<i64>,
}

impl Default for HeuristicOptions {
    fn default() -> Self {
        HeuristicOptions {
            time_limit: 60.0,
            seed: 1,
            iterations: 400_000,
            restarts: 4,
            t_start: None,
            t_end_ratio: 1e-3,
            hard_weight: None,
        }
    }
}

struct FastExpr {
    lits: Vec<(u32, u16, i64)>,
    constant: i64,
}

enum FastBody {
    Hinge(Vec<FastExpr>),
    Count { patterns: Vec<Vec<(u32, u16)>>, base: i64, sign: i64 },
}

struct FastTerm {
    body: FastBody,
    hard: bool,
    /// α·mult for soft terms.
    weight: i64,
    mult: i64,
    /// (epigraph, nurse) partial sums this term feeds.
    feeds: Vec<(usize, usize)>,
}

fn bit(s: ShiftSymbol) -> u16 {
    1 << s.index()
}

impl FastTerm {
    fn value(&self, cells: &[ShiftSymbol], scale: i64) -> i64 {
        match &self.body {
            FastBody::Hinge(es) => es
                .iter()
                .map(|e| e.constant + e.lits.iter().filter(|l| l.1 & bit(cells[l.0 as usize]) != 0).map(|l| l.2).sum::<i64>())
                .max()
                .unwrap_or(0)
                .max(0),
            FastBody::Count { patterns, base, sign } => {
                let k = patterns.iter().filter(|p| p.iter().all(|l| l.1 & bit(cells[l.0 as usize]) != 0)).count() as i64;
                ((base + sign * k) * scale).max(0)
            }
        }
    }
}

/// A single neighbourhood move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Move {
    /// One cell to a new symbol.
    Cell { cell: usize, to: ShiftSymbol },
    /// Add or remove a 入明 block starting at a day.
    Block { nurse: usize, day: usize },
    /// Move a 入明 block of a nurse to another start day.
    Relocate { nurse: usize, from: usize, to: usize },
    /// Swap `width` consecutive cells between two nurses.
    Exchange { day: usize, a: usize, b: usize, width: usize },
    /// Swap two days of one nurse.
    DaySwap { nurse: usize, d1: usize, d2: usize },
}

/// Incrementally evaluated assignment of one stage.
pub struct AnnealState {
    cells: Vec<ShiftSymbol>,
    free: Vec<bool>,
    alphabet: Vec<ShiftSymbol>,
    nd: usize,
    nurses: usize,
    scale: i64,
    terms: Vec<FastTerm>,
    cell_terms: Vec<Vec<u32>>,
    val: Vec<i64>,
    epi_alpha: Vec<i64>,
    epi_nurses: Vec<Vec<usize>>,
    epi_partial: Vec<Vec<i64>>,
    epi_max: Vec<i64>,
    soft: i64,
    hard: i64,
    hard_weight: i64,
    stamp: Vec<u32>,
    stamp_id: u32,
    undo_cells: Vec<(u32, ShiftSymbol)>,
    undo_terms: Vec<(u32, i64)>,
    undo_epi: Vec<(usize, usize, i64)>,
    undo_max: Vec<(usize, i64)>,
    undo_totals: (i64, i64),
    night_only: Vec<bool>,
}

fn lin_scale(e: &LinExpr) -> i64 {
    *e.constant.denom()
}

impl AnnealState {
    pub fn new(compiled: &CompiledStage, cells: Vec<ShiftSymbol>, free: Vec<bool>, alphabet: Vec<ShiftSymbol>, hard_weight: i64) -> Self {
        let mut scale = 1i64;
        for t in &compiled.terms {
            if let Body::Hinge(es) = &t.body {
                for e in es {
                    scale = scale.lcm(&lin_scale(e));
                }
            }
        }
        let nurses = compiled.nurse_count;
        let nd = compiled.window_len;
        let mut terms = Vec::with_capacity(compiled.terms.len());
        let mut cell_terms = vec![Vec::new(); cells.len()];
        for (k, t) in compiled.terms.iter().enumerate() {
            let body = match &t.body {
                Body::Hinge(es) => FastBody::Hinge(
                    es.iter()
                        .map(|e| FastExpr {
                            lits: e.lits.iter().map(|(l, c)| (l.cell, l.set.bits(), c * scale)).collect(),
                            constant: (e.constant * scale).to_integer(),
                        })
                        .collect(),
                ),
                Body::Count { patterns, base, sign } => FastBody::Count {
                    patterns: patterns.iter().map(|p| p.0.iter().map(|l| (l.cell, l.set.bits())).collect()).collect(),
                    base: *base,
                    sign: *sign,
                },
            };
            let mut cs = t.body.cells();
            cs.sort_unstable();
            cs.dedup();
            for c in cs {
                cell_terms[c as usize].push(k as u32);
            }
            let hard = t.id.is_hard();
            let weight = if hard { 0 } else { compiled.alpha.get(&t.id).copied().unwrap_or(0) * t.mult };
            let feeds = compiled
                .epigraphs
                .iter()
                .enumerate()
                .filter(|(_, e)| e.members.contains(&t.id))
                .filter_map(|(i, _)| t.nurse.map(|n| (i, n as usize)))
                .collect();
            terms.push(FastTerm { body, hard, weight, mult: t.mult, feeds });
        }
        let epi_alpha = compiled.epigraphs.iter().map(|e| compiled.alpha.get(&e.id).copied().unwrap_or(0)).collect();
        let epi_nurses = compiled.epigraphs.iter().map(|e| e.nurses.iter().map(|&n| n as usize).collect()).collect();
        let ne = compiled.epigraphs.len();
        let mut s = AnnealState {
            stamp: vec![0; terms.len()],
            val: vec![0; terms.len()],
            cells,
            free,
            alphabet,
            nd,
            nurses,
            scale,
            terms,
            cell_terms,
            epi_alpha,
            epi_nurses,
            epi_partial: vec![vec![0; nurses]; ne],
            epi_max: vec![0; ne],
            soft: 0,
            hard: 0,
            hard_weight,
            stamp_id: 0,
            undo_cells: Vec::new(),
            undo_terms: Vec::new(),
            undo_epi: Vec::new(),
            undo_max: Vec::new(),
            undo_totals: (0, 0),
            night_only: vec![false; nurses],
        };
        s.rebuild();
        s
    }

    fn rebuild(&mut self) {
        let (soft, hard) = self.recompute_scaled();
        for (k, t) in self.terms.iter().enumerate() {
            self.val[k] = t.value(&self.cells, self.scale);
        }
        for p in &mut self.epi_partial {
            p.iter_mut().for_each(|v| *v = 0);
        }
        for (k, t) in self.terms.iter().enumerate() {
            for &(e, n) in &t.feeds {
                self.epi_partial[e][n] += t.mult * self.val[k];
            }
        }
        for e in 0..self.epi_max.len() {
            self.epi_max[e] = self.max_of(e);
        }
        self.soft = soft;
        self.hard = hard;
    }

    fn max_of(&self, e: usize) -> i64 {
        self.epi_nurses[e].iter().map(|&n| self.epi_partial[e][n]).max().unwrap_or(0).max(0)
    }

    /// (soft, hard) from scratch, in scaled units.
    pub fn recompute_scaled(&self) -> (i64, i64) {
        let mut soft = 0;
        let mut hard = 0;
        let mut partial = vec![vec![0i64; self.nurses]; self.epi_max.len()];
        for t in &self.terms {
            let v = t.value(&self.cells, self.scale);
            if t.hard {
                hard += v;
            } else {
                soft += t.weight * v;
            }
            for &(e, n) in &t.feeds {
                partial[e][n] += t.mult * v;
            }
        }
        for (e, p) in partial.iter().enumerate() {
            let m = self.epi_nurses[e].iter().map(|&n| p[n]).max().unwrap_or(0).max(0);
            soft += self.epi_alpha[e] * m;
        }
        (soft, hard)
    }

    pub fn cost(&self) -> i64 {
        self.hard_weight * self.hard + self.soft
    }

    pub fn soft_value(&self) -> Penalty {
        Ratio::new(self.soft, self.scale)
    }

    pub fn hard_value(&self) -> Penalty {
        Ratio::new(self.hard, self.scale)
    }

    pub fn cells(&self) -> &[ShiftSymbol] {
        &self.cells
    }

    pub fn free(&self) -> &[bool] {
        &self.free
    }

    /// Applies cell changes in order and returns the change in cost. The
    /// previous state stays available to [`AnnealState::undo`] until the next
    /// call.
    pub fn apply(&mut self, changes: &[(usize, ShiftSymbol)]) -> i64 {
        self.undo_cells.clear();
        self.undo_terms.clear();
        self.undo_epi.clear();
        self.undo_max.clear();
        self.undo_totals = (self.soft, self.hard);
        let before = self.cost();
        self.stamp_id = self.stamp_id.wrapping_add(1);
        if self.stamp_id == 0 {
            self.stamp.iter_mut().for_each(|s| *s = u32::MAX);
            self.stamp_id = 1;
        }
        for &(c, s) in changes {
            if self.cells[c] != s {
                self.undo_cells.push((c as u32, self.cells[c]));
                self.cells[c] = s;
            }
        }
        let mut touched_epi: Vec<usize> = Vec::new();
        for i in 0..self.undo_cells.len() {
            let c = self.undo_cells[i].0 as usize;
            for j in 0..self.cell_terms[c].len() {
                let k = self.cell_terms[c][j] as usize;
                if self.stamp[k] == self.stamp_id {
                    continue;
                }
                self.stamp[k] = self.stamp_id;
                let t = &self.terms[k];
                let v = t.value(&self.cells, self.scale);
                let old = self.val[k];
                if v == old {
                    continue;
                }
                self.undo_terms.push((k as u32, old));
                self.val[k] = v;
                if t.hard {
                    self.hard += v - old;
                } else {
                    self.soft += t.weight * (v - old);
                }
                for &(e, n) in &t.feeds {
                    self.undo_epi.push((e, n, self.epi_partial[e][n]));
                    self.epi_partial[e][n] += t.mult * (v - old);
                    if !touched_epi.contains(&e) {
                        touched_epi.push(e);
                    }
                }
            }
        }
        for e in touched_epi {
            let m = self.max_of(e);
            if m != self.epi_max[e] {
                self.undo_max.push((e, self.epi_max[e]));
                self.soft += self.epi_alpha[e] * (m - self.epi_max[e]);
                self.epi_max[e] = m;
            }
        }
        self.cost() - before
    }

    /// Reverts the last [`AnnealState::apply`].
    pub fn undo(&mut self) {
        for &(c, s) in self.undo_cells.iter().rev() {
            self.cells[c as usize] = s;
        }
        for &(k, v) in self.undo_terms.iter().rev() {
            self.val[k as usize] = v;
        }
        for &(e, n, v) in self.undo_epi.iter().rev() {
            self.epi_partial[e][n] = v;
        }
        for &(e, v) in self.undo_max.iter().rev() {
            self.epi_max[e] = v;
        }
        (self.soft, self.hard) = self.undo_totals;
        self.undo_cells.clear();
        self.undo_terms.clear();
        self.undo_epi.clear();
        self.undo_max.clear();
    }

    fn is_free(&self, n: usize, d: usize) -> bool {
        d < self.nd && self.free[n * self.nd + d]
    }

    fn get(&self, n: usize, d: usize) -> ShiftSymbol {
        self.cells[n * self.nd + d]
    }

    /// Cell changes of a move; empty when the move does not apply.
    pub fn changes(&self, m: &Move) -> Vec<(usize, ShiftSymbol)> {
        let nd = self.nd;
        match *m {
            Move::Cell { cell, to } => {
                if self.free[cell] && self.cells[cell] != to {
                    vec![(cell, to)]
                } else {
                    vec![]
                }
            }
            Move::Block { nurse, day } => {
                if !(self.is_free(nurse, day) && self.is_free(nurse, day + 1)) {
                    return vec![];
                }
                let c = nurse * nd + day;
                if self.cells[c] == NightIn && self.cells[c + 1] == NightOut {
                    vec![(c, Unset), (c + 1, Unset)]
                } else {
                    let mut v = vec![(c, NightIn), (c + 1, NightOut)];
                    if self.is_free(nurse, day + 2) && self.get(nurse, day + 2) == Unset {
                        v.push((c + 2, Off));
                    }
                    v
                }
            }
            Move::Relocate { nurse, from, to } => {
                let ok = from != to
                    && self.is_free(nurse, from)
                    && self.is_free(nurse, from + 1)
                    && self.get(nurse, from) == NightIn
                    && self.get(nurse, from + 1) == NightOut
                    && self.is_free(nurse, to)
                    && self.is_free(nurse, to + 1);
                if !ok {
                    return vec![];
                }
                let (a, b) = (nurse * nd + from, nurse * nd + to);
                let mut v = vec![(a, Unset), (a + 1, Unset), (b, NightIn), (b + 1, NightOut)];
                if self.is_free(nurse, to + 2) && matches!(self.get(nurse, to + 2), Unset | NightIn) {
                    v.push((b + 2, Off));
                }
                v
            }
            Move::Exchange { day, a, b, width } => {
                if a == b {
                    return vec![];
                }
                let mut v = Vec::new();
                for d in day..day + width {
                    if !(self.is_free(a, d) && self.is_free(b, d)) {
                        return vec![];
                    }
                    let (sa, sb) = (self.get(a, d), self.get(b, d));
                    if sa != sb {
                        v.push((a * nd + d, sb));
                        v.push((b * nd + d, sa));
                    }
                }
                v
            }
            Move::DaySwap { nurse, d1, d2 } => {
                if !(self.is_free(nurse, d1) && self.is_free(nurse, d2)) {
                    return vec![];
                }
                let (s1, s2) = (self.get(nurse, d1), self.get(nurse, d2));
                if s1 == s2 {
                    return vec![];
                }
                vec![(nurse * nd + d1, s2), (nurse * nd + d2, s1)]
            }
        }
    }

    /// Draws a move suited to the stage alphabet.
    pub fn random_move<R: Rng>(&self, night: bool, free_cells: &[usize], rng: &mut R) -> Move {
        let nd = self.nd;
        let cell = free_cells[rng.random_range(0..free_cells.len())];
        let (n, d) = (cell / nd, cell % nd);
        let roll = rng.random_range(0..10);
        if night {
            match roll {
                0..=3 => {
                    let to = self.alphabet[rng.random_range(0..self.alphabet.len())];
                    Move::Cell { cell, to }
                }
                4..=5 => Move::Block { nurse: n, day: d },
                6..=7 => {
                    let starts: Vec<usize> = (0..nd).filter(|&x| self.get(n, x) == NightIn && self.is_free(n, x)).collect();
                    let from = if starts.is_empty() { d } else { starts[rng.random_range(0..starts.len())] };
                    Move::Relocate { nurse: n, from, to: d }
                }
                _ => {
                    let b = rng.random_range(0..self.nurses);
                    let width = if self.get(n, d) == NightIn || self.get(b, d) == NightIn { 2 } else { 1 };
                    Move::Exchange { day: d, a: n, b, width }
                }
            }
        } else {
            match roll {
                0..=3 => {
                    let mut to = self.alphabet[rng.random_range(0..self.alphabet.len())];
                    if self.night_only[n] && to == Day {
                        to = Off;
                    }
                    Move::Cell { cell, to }
                }
                4..=6 => Move::Exchange { day: d, a: n, b: rng.random_range(0..self.nurses), width: 1 },
                _ => Move::DaySwap { nurse: n, d1: d, d2: rng.random_range(0..nd) },
            }
        }
    }
}

/// Starting cells: night stage keeps current symbols of free cells that lie
/// in the alphabet (so re-solves start warm) and leaves the rest unset; the
/// day stage gives each nurse their off quota spread evenly over the free
/// days, an off right after any 明, and day shifts elsewhere.
pub fn initial_cells(stage: Stage, cfg: &WardConfig, roster: &Roster, free: &[bool]) -> Vec<ShiftSymbol> {
    let alphabet = cfg.stage_alphabet(stage);
    let nd = cfg.calendar.len();
    let mut cells = roster.cells().to_vec();
    match stage {
        Stage::Night => {
            for (c, f) in free.iter().enumerate() {
                if *f && !alphabet.contains(cells[c]) {
                    cells[c] = Unset;
                }
            }
        }
        Stage::Day => {
            let t = cfg.calendar.target_range();
            for n in 0..cfg.nurses.len() {
                let row = n * nd;
                let mut open: Vec<usize> = Vec::new();
                for d in t.clone() {
                    if !free[row + d] {
                        continue;
                    }
                    if d > 0 && cells[row + d - 1] == NightOut || cfg.nurses[n].night_class == NightClass::NightOnly {
                        cells[row + d] = Off;
                    } else {
                        open.push(d);
                    }
                }
                let have = t.clone().filter(|&d| cells[row + d] == Off).count();
                let need = (cfg.n_off(n) as usize).saturating_sub(have).min(open.len());
                for (i, &d) in open.iter().enumerate() {
                    let off = need > 0 && (i * need) / open.len() != ((i + 1) * need) / open.len();
                    cells[row + d] = if off { Off } else { Day };
                }
            }
        }
    }
    cells
}

/// Anneals one stage. Cells fixed by `wishes` stay fixed.
pub fn solve_heuristic(
    stage: Stage,
    cfg: &WardConfig,
    wishes: &Roster,
    opts: &HeuristicOptions,
    progress: Option<&(dyn Fn(&TracePoint) + Sync)>,
) -> Result<StageSolution> {
    if opts.time_limit.is_nan() || opts.time_limit <= 0.0 {
        return Err(Error::BadTimeLimit);
    }
    cfg.validate()?;
    check_stage_input(cfg, wishes)?;
    let compiled = compile_stage(stage, cfg);
    let free = free_mask(stage, wishes, cfg);
    let cells = initial_cells(stage, cfg, wishes, &free);
    let max_w = compiled.alpha.values().copied().max().unwrap_or(1).max(1) * 5;
    let hard_weight = opts.hard_weight.unwrap_or((max_w * 100).max(10_000));
    let alphabet: Vec<ShiftSymbol> = cfg.stage_alphabet(stage).iter().collect();
    let mut st = AnnealState::new(&compiled, cells, free.clone(), alphabet, hard_weight);
    for (n, nurse) in cfg.nurses.iter().enumerate() {
        st.night_only[n] = nurse.night_class == NightClass::NightOnly;
    }
    let free_cells: Vec<usize> = (0..free.len()).filter(|&c| free[c]).collect();
    let start = Instant::now();
    let mut rng = crate::synth::rng(opts.seed);
    let night = stage == Stage::Night;
    let scale = st.scale as f64;
    let point = |st: &AnnealState, iteration: u64, cost: i64| TracePoint {
        elapsed_s: start.elapsed().as_secs_f64(),
        iteration,
        cost: cost as f64 / scale,
        objective: to_f64(st.soft_value()),
        hard: to_f64(st.hard_value()),
    };
    let mut trace = vec![point(&st, 0, st.cost())];
    if let Some(p) = progress {
        p(&trace[0]);
    }
    let mut best_cost = st.cost();
    let mut best_cells = st.cells.clone();
    let mut iteration = 0u64;
    if !free_cells.is_empty() {
        let t0 = opts.t_start.map(|t| t * scale).unwrap_or_else(|| estimate_temperature(&mut st, night, &free_cells, &mut rng));
        let restarts = opts.restarts.max(1) as u64;
        let per = (opts.iterations / restarts).max(1);
        let mut last_push = 0u64;
        'outer: for r in 0..restarts {
            if r > 0 {
                let diff: Vec<(usize, ShiftSymbol)> =
                    (0..best_cells.len()).filter(|&c| st.cells[c] != best_cells[c]).map(|c| (c, best_cells[c])).collect();
                st.apply(&diff);
            }
            let t_hi = t0 * 0.5f64.powi(r as i32);
            let t_lo = t_hi * opts.t_end_ratio.clamp(1e-9, 1.0);
            let cool = (t_lo / t_hi).powf(1.0 / per as f64);
            let mut temp = t_hi;
            for _ in 0..per {
                iteration += 1;
                if iteration % 1024 == 0 && start.elapsed().as_secs_f64() >= opts.time_limit {
                    break 'outer;
                }
                let m = st.random_move(night, &free_cells, &mut rng);
                let ch = st.changes(&m);
                temp *= cool;
                if ch.is_empty() {
                    continue;
                }
                let delta = st.apply(&ch);
                let accept = delta <= 0 || rng.random::<f64>() < (-(delta as f64) / temp).exp();
                if !accept {
                    st.undo();
                    continue;
                }
                let cost = st.cost();
                if cost < best_cost {
                    best_cost = cost;
                    best_cells.clone_from(&st.cells);
                    if iteration - last_push >= 512 || trace.len() < 2 {
                        last_push = iteration;
                        trace.push(point(&st, iteration, cost));
                        if let Some(p) = progress {
                            p(trace.last().unwrap());
                        }
                    }
                }
            }
        }
        let diff: Vec<(usize, ShiftSymbol)> =
            (0..best_cells.len()).filter(|&c| st.cells[c] != best_cells[c]).map(|c| (c, best_cells[c])).collect();
        st.apply(&diff);
        if trace.last().is_some_and(|p| p.cost > best_cost as f64 / scale) {
            trace.push(point(&st, iteration, best_cost));
            if let Some(p) = progress {
                p(trace.last().unwrap());
            }
        }
    }
    let nd = cfg.calendar.len();
    let mut roster = wishes.clone();
    for (c, &f) in free.iter().enumerate() {
        if f {
            roster.set(c / nd, c % nd, st.cells[c], Provenance::Solved(stage));
        }
    }
    let breakdown = evaluate_stage(stage, &roster, cfg)?;
    let hard_records = check_stage_hard(stage, &roster, cfg)?;
    let report = SolveReport {
        stage,
        engine: "anneal".into(),
        status: if hard_records.is_empty() { SolveStatus::Feasible } else { SolveStatus::Timeout },
        objective: Some(breakdown.objective),
        hard_violations: hard_records.len(),
        elapsed_s: start.elapsed().as_secs_f64(),
        iterations: iteration,
        seed: Some(opts.seed),
        trace,
    };
    Ok(StageSolution { roster: Some(roster), report, breakdown: Some(breakdown), hard_records })
}

/// Mean soft worsening over a sample of random moves, in scaled units.
fn estimate_temperature<R: Rng>(st: &mut AnnealState, night: bool, free_cells: &[usize], rng: &mut R) -> f64 {
    let mut sum = 0.0;
    let mut k = 0;
    for _ in 0..400 {
        let m = st.random_move(night, free_cells, rng);
        let ch = st.changes(&m);
        if ch.is_empty() {
            continue;
        }
        let hard_before = st.hard;
        let delta = st.apply(&ch);
        if st.hard == hard_before && delta > 0 {
            sum += delta as f64;
            k += 1;
        }
        st.undo();
    }
    if k == 0 {
        st.scale as f64 * 10.0
    } else {
        sum / k as f64
    }
}
