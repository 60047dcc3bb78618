//! 0-1 integer program for one stage: one binary per (nurse, day, symbol),
//! the assignment equality per cell, fixings as bounds, one continuous slack
//! per soft term, indicator binaries for pattern counts and one epigraph
//! variable per fairness rule.

pub mod lp;

use std::collections::BTreeMap;

use chrono::NaiveDate;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::catalog::{compile_stage, Body, CompiledStage, ConstraintId, LinExpr, Lit, Pattern, Penalty};
use crate::domain::{Provenance, Roster, ShiftSymbol, Stage, SymbolSet, WardConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum VarRole {
    Cell { nurse: u32, day: u32, symbol: ShiftSymbol },
    /// max(0, ·) of a soft term.
    Slack { term: u32 },
    /// Violation of a hard term (relaxation probe only).
    HardSlack { term: u32 },
    /// 1 iff a pattern holds.
    Indicator { pattern: u32 },
    Epigraph { constraint: ConstraintId },
    /// Fixed to 1; carries rows that fixings alone already decide.
    One,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Var {
    pub name: String,
    pub kind: VarKind,
    pub lb: i64,
    pub ub: Option<i64>,
    pub role: VarRole,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    pub coefs: Vec<(u32, i64)>,
    pub sense: Sense,
    pub rhs: i64,
}

/// Where one compiled term went in the program.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermInfo {
    pub id: ConstraintId,
    pub nurse: Option<u32>,
    pub day: Option<u32>,
    pub mult: i64,
    pub slack: Option<u32>,
    /// Value already decided by fixed cells (unmultiplied).
    #[serde(with = "crate::catalog::penalty_serde")]
    pub fixed_value: Penalty,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IpInstance {
    pub stage: Stage,
    pub probe_mode: bool,
    pub nurses: Vec<String>,
    pub dates: Vec<NaiveDate>,
    pub alphabet: SymbolSet,
    /// Symbol of every fixed cell; `None` for cells the solver chooses.
    pub fixed: Vec<Option<ShiftSymbol>>,
    pub vars: Vec<Var>,
    pub rows: Vec<Row>,
    pub objective: Vec<(u32, i64)>,
    /// Objective contribution of terms decided by fixings alone.
    #[serde(with = "crate::catalog::penalty_serde")]
    pub objective_offset: Penalty,
    pub terms: Vec<TermInfo>,
    pub patterns: Vec<Pattern>,
    pub disabled: Vec<ConstraintId>,
}

impl IpInstance {
    pub fn window_len(&self) -> usize {
        self.dates.len()
    }

    pub fn cell_count(&self) -> usize {
        self.nurses.len() * self.dates.len()
    }

    /// Index of x_{n,d,s}.
    pub fn x(&self, nurse: usize, day: usize, s: ShiftSymbol) -> usize {
        (nurse * self.dates.len() + day) * ShiftSymbol::ALL.len() + s.index()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// Rebuilds a roster from a 0/1 value per x variable; cells take the
    /// provenance of `base` unless the solver chose them.
    pub fn roster_from_values(&self, values: &[f64], base: &Roster) -> Result<Roster> {
        let mut r = base.clone();
        let nd = self.dates.len();
        for c in 0..self.cell_count() {
            let (n, d) = (c / nd, c % nd);
            let chosen: Vec<ShiftSymbol> = ShiftSymbol::ALL
                .into_iter()
                .filter(|s| values.get(c * 10 + s.index()).is_some_and(|v| *v > 0.5))
                .collect();
            let [s] = chosen[..] else {
                return Err(Error::SolverOutput(format!(
                    "cell ({}, {}) has {} symbols set",
                    self.nurses[n],
                    self.dates[d],
                    chosen.len()
                )));
            };
            match self.fixed[c] {
                Some(f) if f != s => {
                    return Err(Error::SolverOutput(format!(
                        "fixed cell ({}, {}) changed from {} to {}",
                        self.nurses[n],
                        self.dates[d],
                        f.token(),
                        s.token()
                    )))
                }
                Some(_) => {}
                None => r.set(n, d, s, Provenance::Solved(self.stage)),
            }
        }
        Ok(r)
    }

    /// Value of every variable implied by a roster: x from the cells, slacks
    /// and indicators from the compiled terms. Used to check that a roster
    /// is feasible in the program and to evaluate the program's objective.
    pub fn values_for(&self, roster: &Roster, compiled: &CompiledStage) -> Vec<Ratio<i64>> {
        let cells = roster.cells();
        let mut v = vec![Ratio::zero(); self.vars.len()];
        for c in 0..self.cell_count() {
            v[c * 10 + cells[c].index()] = Ratio::from_integer(1);
        }
        for (k, var) in self.vars.iter().enumerate() {
            match var.role {
                VarRole::Slack { term } | VarRole::HardSlack { term } => {
                    v[k] = compiled.terms[term as usize].body.value(cells);
                }
                VarRole::Indicator { pattern } => {
                    v[k] = Ratio::from_integer(self.patterns[pattern as usize].holds(cells) as i64);
                }
                VarRole::One => v[k] = Ratio::from_integer(1),
                _ => {}
            }
        }
        let totals = compiled.rule_totals(cells);
        for (k, var) in self.vars.iter().enumerate() {
            if let VarRole::Epigraph { constraint } = var.role {
                v[k] = totals.get(&constraint).copied().unwrap_or_default();
            }
        }
        v
    }

    /// Σ c·v + offset
    pub fn objective_at(&self, values: &[Ratio<i64>]) -> Penalty {
        self.objective.iter().map(|&(i, c)| values[i as usize] * c).sum::<Penalty>() + self.objective_offset
    }

    /// Rows and bounds violated by an assignment.
    pub fn violated_rows(&self, values: &[Ratio<i64>]) -> Vec<String> {
        let mut out = Vec::new();
        for (k, var) in self.vars.iter().enumerate() {
            let x = values[k];
            if x < Ratio::from_integer(var.lb) || var.ub.is_some_and(|u| x > Ratio::from_integer(u)) {
                out.push(format!("bound {}", var.name));
            }
        }
        for row in &self.rows {
            let lhs: Ratio<i64> = row.coefs.iter().map(|&(i, c)| values[i as usize] * c).sum();
            let rhs = Ratio::from_integer(row.rhs);
            let ok = match row.sense {
                Sense::Le => lhs <= rhs,
                Sense::Ge => lhs >= rhs,
                Sense::Eq => lhs == rhs,
            };
            if !ok {
                out.push(row.name.clone());
            }
        }
        out
    }
}

/// Cells a stage may change. Margin cells are never free. In the night
/// stage, unset target cells and cells produced by an earlier solve are free;
/// in the day stage only unset target cells are.
pub fn free_mask(stage: Stage, roster: &Roster, cfg: &WardConfig) -> Vec<bool> {
    let nd = cfg.calendar.len();
    let t = cfg.calendar.target_range();
    let mut out = vec![false; roster.cells().len()];
    for n in 0..roster.nurse_count() {
        for d in t.clone() {
            let sym = roster.get(n, d);
            out[n * nd + d] = match stage {
                Stage::Night => sym == ShiftSymbol::Unset || roster.provenance(n, d).is_solver_owned(),
                Stage::Day => sym == ShiftSymbol::Unset,
            };
        }
    }
    out
}

/// Rejects stage inputs whose solver-produced cells fall outside the
/// producing stage's alphabet.
pub fn check_stage_input(cfg: &WardConfig, roster: &Roster) -> Result<()> {
    roster.check_shape(cfg)?;
    for n in 0..roster.nurse_count() {
        for d in 0..roster.day_count() {
            let sym = roster.get(n, d);
            let bad = match roster.provenance(n, d) {
                Provenance::Solved(st) => (!cfg.stage_alphabet(st).contains(sym)).then_some(st),
                Provenance::Postprocessed if sym != ShiftSymbol::LongDay && sym != ShiftSymbol::Unset => {
                    Some(Stage::Night)
                }
                _ => None,
            };
            if let Some(st) = bad {
                return Err(Error::OutsideAlphabet {
                    nurse: cfg.nurses[n].id.clone(),
                    date: cfg.calendar.date(d),
                    symbol: sym.token().into(),
                    stage: st.to_string(),
                });
            }
        }
    }
    Ok(())
}

enum LitVal {
    Const(bool),
    Vars(Vec<u32>),
}

/// Sparse integer-coefficient row under construction.
#[derive(Default)]
struct Acc {
    coefs: BTreeMap<u32, Ratio<i64>>,
    constant: Ratio<i64>,
}

impl Acc {
    fn add_var(&mut self, v: u32, c: Ratio<i64>) {
        let e = self.coefs.entry(v).or_default();
        *e += c;
        if e.is_zero() {
            self.coefs.remove(&v);
        }
    }

    fn is_constant(&self) -> bool {
        self.coefs.is_empty()
    }

    /// Scales to integers and returns (coefs, rhs) of `Σ coef·v + constant <op> 0`.
    fn integral(&self) -> (Vec<(u32, i64)>, i64) {
        let den = self
            .coefs
            .values()
            .map(|c| *c.denom())
            .fold(*self.constant.denom(), |a, b| a.lcm(&b));
        let coefs = self.coefs.iter().map(|(&v, c)| (v, (c * den).to_integer())).collect();
        (coefs, -(self.constant * den).to_integer())
    }
}

struct Enc<'a> {
    inst: IpInstance,
    compiled: &'a CompiledStage,
    one: Option<u32>,
    pattern_vars: BTreeMap<Vec<Lit>, u32>,
    cfg: &'a WardConfig,
}

impl<'a> Enc<'a> {
    fn add_var(&mut self, name: String, kind: VarKind, lb: i64, ub: Option<i64>, role: VarRole) -> u32 {
        self.inst.vars.push(Var { name, kind, lb, ub, role });
        (self.inst.vars.len() - 1) as u32
    }

    fn one(&mut self) -> u32 {
        if let Some(v) = self.one {
            return v;
        }
        let v = self.add_var("one".into(), VarKind::Continuous, 1, Some(1), VarRole::One);
        self.one = Some(v);
        v
    }

    fn lit(&self, l: &Lit) -> LitVal {
        let c = l.cell as usize;
        match self.inst.fixed[c] {
            Some(s) => LitVal::Const(l.set.contains(s)),
            None => {
                let s = l.set.intersect(self.inst.alphabet);
                if s.is_empty() {
                    LitVal::Const(false)
                } else if s == self.inst.alphabet {
                    LitVal::Const(true)
                } else {
                    LitVal::Vars(s.iter().map(|sym| (c * 10 + sym.index()) as u32).collect())
                }
            }
        }
    }

    fn linear(&self, e: &LinExpr) -> Acc {
        let mut acc = Acc { coefs: BTreeMap::new(), constant: e.constant };
        for (l, coef) in &e.lits {
            match self.lit(l) {
                LitVal::Const(true) => acc.constant += Ratio::from_integer(*coef),
                LitVal::Const(false) => {}
                LitVal::Vars(vs) => {
                    for v in vs {
                        acc.add_var(v, Ratio::from_integer(*coef));
                    }
                }
            }
        }
        acc
    }

    /// 0/1 value of a pattern: a constant, or an indicator binary tied to
    /// its literals by Σ ≥ k·y and Σ ≤ (k-1) + y.
    fn pattern(&mut self, p: &Pattern) -> LitVal {
        let mut vars: Vec<Vec<u32>> = Vec::new();
        for l in &p.0 {
            match self.lit(l) {
                LitVal::Const(false) => return LitVal::Const(false),
                LitVal::Const(true) => {}
                LitVal::Vars(vs) => vars.push(vs),
            }
        }
        if vars.is_empty() {
            return LitVal::Const(true);
        }
        let key = p.0.clone();
        if let Some(&y) = self.pattern_vars.get(&key) {
            return LitVal::Vars(vec![y]);
        }
        let pi = self.inst.patterns.len() as u32;
        self.inst.patterns.push(p.clone());
        let y = self.add_var(format!("y_{pi}"), VarKind::Binary, 0, Some(1), VarRole::Indicator { pattern: pi });
        let k = vars.len() as i64;
        let mut sum: Vec<(u32, i64)> = vars.into_iter().flatten().map(|v| (v, 1)).collect();
        sum.sort();
        let mut lo = sum.clone();
        lo.push((y, -k));
        self.inst.rows.push(Row { name: format!("yl_{pi}"), coefs: lo, sense: Sense::Ge, rhs: 0 });
        let mut hi = sum;
        hi.push((y, -1));
        self.inst.rows.push(Row { name: format!("yh_{pi}"), coefs: hi, sense: Sense::Le, rhs: k - 1 });
        self.pattern_vars.insert(key, y);
        LitVal::Vars(vec![y])
    }

    fn body_exprs(&mut self, body: &Body) -> Vec<Acc> {
        match body {
            Body::Hinge(es) => es.iter().map(|e| self.linear(e)).collect(),
            Body::Count { patterns, base, sign } => {
                let mut acc = Acc { coefs: BTreeMap::new(), constant: Ratio::from_integer(*base) };
                for p in patterns {
                    match self.pattern(p) {
                        LitVal::Const(true) => acc.constant += Ratio::from_integer(*sign),
                        LitVal::Const(false) => {}
                        LitVal::Vars(vs) => {
                            for v in vs {
                                acc.add_var(v, Ratio::from_integer(*sign));
                            }
                        }
                    }
                }
                vec![acc]
            }
        }
    }

    fn term(&mut self, k: usize) -> Result<()> {
        let t = &self.compiled.terms[k];
        let exprs = self.body_exprs(&t.body);
        let hard = t.id.is_hard();
        let mut info = TermInfo {
            id: t.id,
            nurse: t.nurse,
            day: t.day,
            mult: t.mult,
            slack: None,
            fixed_value: Ratio::zero(),
        };
        if exprs.iter().all(Acc::is_constant) {
            let v = exprs.iter().map(|e| e.constant).max().unwrap_or_default().max(Ratio::zero());
            info.fixed_value = v;
            if v.is_positive() {
                if hard && !self.inst.probe_mode {
                    // Decided by fixings alone and violated: an infeasible row.
                    let one = self.one();
                    let (_, rhs) = Acc { coefs: BTreeMap::new(), constant: v }.integral();
                    self.inst.rows.push(Row {
                        name: format!("h_{k}"),
                        coefs: vec![(one, -rhs)],
                        sense: Sense::Le,
                        rhs: 0,
                    });
                } else {
                    let w = if hard { self.cfg.weights.probe } else { self.compiled.alpha[&t.id] * t.mult };
                    self.inst.objective_offset += v * w;
                }
            }
            self.inst.terms.push(info);
            return Ok(());
        }
        if hard && !self.inst.probe_mode {
            for (j, e) in exprs.iter().enumerate() {
                if e.is_constant() {
                    if e.constant.is_positive() {
                        let one = self.one();
                        let (_, rhs) = e.integral();
                        self.inst.rows.push(Row { name: format!("h_{k}_{j}"), coefs: vec![(one, -rhs)], sense: Sense::Le, rhs: 0 });
                    }
                    continue;
                }
                let (coefs, rhs) = e.integral();
                self.inst.rows.push(Row { name: format!("h_{k}_{j}"), coefs, sense: Sense::Le, rhs });
            }
            self.inst.terms.push(info);
            return Ok(());
        }
        let (role, name, weight) = if hard {
            (VarRole::HardSlack { term: k as u32 }, format!("q_{k}"), self.cfg.weights.probe)
        } else {
            (VarRole::Slack { term: k as u32 }, format!("p_{k}"), self.compiled.alpha[&t.id] * t.mult)
        };
        let p = self.add_var(name, VarKind::Continuous, 0, None, role);
        for (j, e) in exprs.iter().enumerate() {
            if e.is_constant() && !e.constant.is_positive() {
                continue;
            }
            let mut e2 = Acc { coefs: e.coefs.clone(), constant: e.constant };
            e2.add_var(p, Ratio::from_integer(-1));
            let (coefs, rhs) = e2.integral();
            self.inst.rows.push(Row { name: format!("s_{k}_{j}"), coefs, sense: Sense::Le, rhs });
        }
        if weight != 0 {
            self.inst.objective.push((p, weight));
        }
        info.slack = Some(p);
        self.inst.terms.push(info);
        Ok(())
    }

    fn epigraphs(&mut self) {
        for e in &self.compiled.epigraphs {
            let alpha = self.compiled.alpha[&e.id];
            let z = self.add_var(
                format!("z_{}", e.id.to_string().replace('-', "_")),
                VarKind::Continuous,
                0,
                None,
                VarRole::Epigraph { constraint: e.id },
            );
            for &n in &e.nurses {
                let mut acc = Acc::default();
                acc.add_var(z, Ratio::from_integer(-1));
                for info in self.inst.terms.iter().filter(|i| i.nurse == Some(n) && e.members.contains(&i.id)) {
                    match info.slack {
                        Some(p) => acc.add_var(p, Ratio::from_integer(info.mult)),
                        None => acc.constant += info.fixed_value * info.mult,
                    }
                }
                let (coefs, rhs) = acc.integral();
                self.inst.rows.push(Row { name: format!("e_{}_{n}", e.id.to_string().replace('-', "_")), coefs, sense: Sense::Le, rhs });
            }
            if alpha != 0 {
                self.inst.objective.push((z, alpha));
            }
        }
    }
}

/// Builds the program of one stage. `wishes` supplies fixed cells (see
/// [`free_mask`]); in probe mode every hard term becomes a heavily weighted
/// slack so the program is always feasible.
pub fn encode_stage(stage: Stage, cfg: &WardConfig, wishes: &Roster, probe_mode: bool) -> Result<IpInstance> {
    cfg.validate()?;
    check_stage_input(cfg, wishes)?;
    let compiled = compile_stage(stage, cfg);
    encode_compiled(&compiled, cfg, wishes, probe_mode)
}

/// As [`encode_stage`] with an already compiled rule set.
pub fn encode_compiled(compiled: &CompiledStage, cfg: &WardConfig, wishes: &Roster, probe_mode: bool) -> Result<IpInstance> {
    let stage = compiled.stage;
    let free = free_mask(stage, wishes, cfg);
    let alphabet = cfg.stage_alphabet(stage);
    let nd = cfg.calendar.len();
    let fixed: Vec<Option<ShiftSymbol>> =
        wishes.cells().iter().zip(&free).map(|(s, f)| if *f { None } else { Some(*s) }).collect();
    let mut inst = IpInstance {
        stage,
        probe_mode,
        nurses: cfg.nurses.iter().map(|n| n.id.clone()).collect(),
        dates: cfg.calendar.dates().to_vec(),
        alphabet,
        fixed,
        vars: Vec::new(),
        rows: Vec::new(),
        objective: Vec::new(),
        objective_offset: Ratio::zero(),
        terms: Vec::new(),
        patterns: Vec::new(),
        disabled: compiled.disabled.clone(),
    };
    for n in 0..cfg.nurses.len() {
        for d in 0..nd {
            let c = n * nd + d;
            let mut eq = Vec::with_capacity(10);
            for s in ShiftSymbol::ALL {
                let (lb, ub) = match inst.fixed[c] {
                    Some(f) => ((f == s) as i64, (f == s) as i64),
                    None => (0, alphabet.contains(s) as i64),
                };
                inst.vars.push(Var {
                    name: format!("x_{n}_{d}_{}", s.token()),
                    kind: VarKind::Binary,
                    lb,
                    ub: Some(ub),
                    role: VarRole::Cell { nurse: n as u32, day: d as u32, symbol: s },
                });
                eq.push(((c * 10 + s.index()) as u32, 1));
            }
            inst.rows.push(Row { name: format!("a_{n}_{d}"), coefs: eq, sense: Sense::Eq, rhs: 1 });
        }
    }
    let mut enc = Enc { inst, compiled, one: None, pattern_vars: BTreeMap::new(), cfg };
    for k in 0..compiled.terms.len() {
        enc.term(k)?;
    }
    enc.epigraphs();
    Ok(enc.inst)
}

/// Fixes cells to symbols by tightening the bounds of their x variables.
pub fn fix_cells(instance: &IpInstance, fixings: &[(usize, usize, ShiftSymbol)]) -> Result<IpInstance> {
    let mut out = instance.clone();
    for &(n, d, s) in fixings {
        if n >= out.nurses.len() || d >= out.dates.len() {
            return Err(Error::Config(format!("fixing ({n}, {d}) lies outside the instance")));
        }
        let date = out.dates[d];
        let nurse = out.nurses[n].clone();
        let c = n * out.dates.len() + d;
        if let Some(f) = out.fixed[c] {
            if f != s {
                return Err(Error::ContradictoryFixing {
                    nurse,
                    date,
                    detail: format!("already fixed to {}, cannot fix to {}", f.token(), s.token()),
                });
            }
            continue;
        }
        let xi = out.x(n, d, s);
        if out.vars[xi].ub == Some(0) {
            return Err(Error::ContradictoryFixing {
                nurse,
                date,
                detail: format!("{} is outside the {} alphabet", s.token(), out.stage),
            });
        }
        for t in ShiftSymbol::ALL {
            let v = &mut out.vars[out_x(&out.dates, n, d, t)];
            let on = (t == s) as i64;
            v.lb = on;
            v.ub = Some(on);
        }
        out.fixed[c] = Some(s);
    }
    Ok(out)
}

fn out_x(dates: &[NaiveDate], n: usize, d: usize, s: ShiftSymbol) -> usize {
    (n * dates.len() + d) * 10 + s.index()
}

/// Sidecar document mapping variable names back to cells and rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub stage: Stage,
    pub probe_mode: bool,
    pub var_count: usize,
    pub row_count: usize,
    pub x_var_count: usize,
    #[serde(with = "crate::catalog::penalty_serde")]
    pub objective_offset: Penalty,
    /// Fractional averages are kept exact by scaling their rows.
    pub fractional_thresholds: &'static str,
    pub vars: Vec<VarMeta>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarMeta {
    pub name: String,
    #[serde(flatten)]
    pub role: VarRole,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constraint: Option<ConstraintId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nurse: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub date: Option<NaiveDate>,
}

impl IpInstance {
    pub fn meta(&self) -> InstanceMeta {
        let vars = self
            .vars
            .iter()
            .map(|v| {
                let (constraint, nurse, date) = match v.role {
                    VarRole::Cell { nurse, day, .. } => {
                        (None, Some(self.nurses[nurse as usize].clone()), Some(self.dates[day as usize]))
                    }
                    VarRole::Slack { term } | VarRole::HardSlack { term } => {
                        let t = &self.terms[term as usize];
                        (
                            Some(t.id),
                            t.nurse.map(|n| self.nurses[n as usize].clone()),
                            t.day.map(|d| self.dates[d as usize]),
                        )
                    }
                    VarRole::Epigraph { constraint } => (Some(constraint), None, None),
                    _ => (None, None, None),
                };
                VarMeta { name: v.name.clone(), role: v.role, constraint, nurse, date }
            })
            .collect();
        InstanceMeta {
            stage: self.stage,
            probe_mode: self.probe_mode,
            var_count: self.vars.len(),
            row_count: self.rows.len(),
            x_var_count: self.cell_count() * 10,
            objective_offset: self.objective_offset,
            fractional_thresholds: "exact",
            vars,
        }
    }
}
