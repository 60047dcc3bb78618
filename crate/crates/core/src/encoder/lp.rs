//! Text formats: CPLEX LP and free MPS writers, and a reader for each that
//! accepts what the writers produce (plus ordinary hand-written files).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{IpInstance, Sense, VarKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelFormat {
    Lp,
    Mps,
}

impl FromStr for ModelFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lp" => Ok(ModelFormat::Lp),
            "mps" => Ok(ModelFormat::Mps),
            _ => Err(Error::UnsupportedFormat(s.into())),
        }
    }
}

impl ModelFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ModelFormat::Lp => "lp",
            ModelFormat::Mps => "mps",
        }
    }
}

const WRAP: usize = 200;

fn push_terms(out: &mut String, head: &str, terms: impl Iterator<Item = (i64, String)>) {
    let mut line = String::from(head);
    let mut first = true;
    for (c, name) in terms {
        let piece = match (c, first) {
            (1, true) => name,
            (1, false) => format!("+ {name}"),
            (-1, _) => format!("- {name}"),
            (c, true) => format!("{c} {name}"),
            (c, false) if c < 0 => format!("- {} {name}", -c),
            (c, false) => format!("+ {c} {name}"),
        };
        first = false;
        if line.len() + piece.len() + 1 > WRAP {
            out.push_str(line.trim_end());
            out.push('\n');
            line = String::from("   ");
        }
        line.push(' ');
        line.push_str(&piece);
    }
    out.push_str(&line);
}

pub fn write_lp(inst: &IpInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ rostra {} stage{}", inst.stage, if inst.probe_mode { " (probe)" } else { "" });
    out.push_str("Minimize\n");
    let name = |i: u32| inst.vars[i as usize].name.clone();
    if inst.objective.is_empty() && !inst.vars.is_empty() {
        let _ = writeln!(out, " obj: 0 {}", inst.vars[0].name);
    } else {
        push_terms(&mut out, " obj:", inst.objective.iter().map(|&(i, c)| (c, name(i))));
        out.push('\n');
    }
    out.push_str("Subject To\n");
    for r in &inst.rows {
        push_terms(&mut out, &format!(" {}:", r.name), r.coefs.iter().map(|&(i, c)| (c, name(i))));
        let op = match r.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " {op} {}", r.rhs);
    }
    out.push_str("Bounds\n");
    for v in &inst.vars {
        match (v.kind, v.lb, v.ub) {
            (_, lb, Some(ub)) if lb == ub => {
                let _ = writeln!(out, " {} = {lb}", v.name);
            }
            (VarKind::Binary, 0, Some(1)) | (VarKind::Continuous, 0, None) => {}
            (_, lb, Some(ub)) => {
                let _ = writeln!(out, " {lb} <= {} <= {ub}", v.name);
            }
            (_, lb, None) => {
                let _ = writeln!(out, " {} >= {lb}", v.name);
            }
        }
    }
    let bins: Vec<&str> = inst.vars.iter().filter(|v| v.kind == VarKind::Binary).map(|v| v.name.as_str()).collect();
    if !bins.is_empty() {
        out.push_str("Binaries\n");
        for chunk in bins.chunks(12) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    out
}

pub fn write_mps(inst: &IpInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NAME rostra_{}{}", inst.stage, if inst.probe_mode { "_probe" } else { "" });
    out.push_str("ROWS\n N obj\n");
    for r in &inst.rows {
        let t = match r.sense {
            Sense::Le => 'L',
            Sense::Ge => 'G',
            Sense::Eq => 'E',
        };
        let _ = writeln!(out, " {t} {}", r.name);
    }
    let mut cols: Vec<Vec<(&str, i64)>> = vec![Vec::new(); inst.vars.len()];
    for &(i, c) in &inst.objective {
        cols[i as usize].push(("obj", c));
    }
    for r in &inst.rows {
        for &(i, c) in &r.coefs {
            cols[i as usize].push((&r.name, c));
        }
    }
    out.push_str("COLUMNS\n");
    let mut in_int = false;
    let mut marker = 0;
    for (v, col) in inst.vars.iter().zip(&cols) {
        let bin = v.kind == VarKind::Binary;
        if bin != in_int {
            let tag = if bin { "INTORG" } else { "INTEND" };
            let _ = writeln!(out, " MARKER{marker} 'MARKER' '{tag}'");
            marker += 1;
            in_int = bin;
        }
        if col.is_empty() {
            let _ = writeln!(out, " {} obj 0", v.name);
        }
        for (row, c) in col {
            let _ = writeln!(out, " {} {row} {c}", v.name);
        }
    }
    if in_int {
        let _ = writeln!(out, " MARKER{marker} 'MARKER' 'INTEND'");
    }
    out.push_str("RHS\n");
    for r in inst.rows.iter().filter(|r| r.rhs != 0) {
        let _ = writeln!(out, " rhs {} {}", r.name, r.rhs);
    }
    out.push_str("BOUNDS\n");
    for v in &inst.vars {
        match (v.lb, v.ub) {
            (lb, Some(ub)) if lb == ub => {
                let _ = writeln!(out, " FX bnd {} {lb}", v.name);
            }
            (lb, ub) => {
                if lb != 0 {
                    let _ = writeln!(out, " LO bnd {} {lb}", v.name);
                }
                if let Some(ub) = ub {
                    let _ = writeln!(out, " UP bnd {} {ub}", v.name);
                }
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}

pub fn render(inst: &IpInstance, format: ModelFormat) -> String {
    match format {
        ModelFormat::Lp => write_lp(inst),
        ModelFormat::Mps => write_mps(inst),
    }
}

/// Writes the model and a `<path>.meta.json` sidecar naming every variable.
pub fn write_instance(inst: &IpInstance, format: ModelFormat, path: &Path) -> Result<()> {
    std::fs::write(path, render(inst, format)).map_err(|e| Error::io(path, e))?;
    let meta_path = path.with_extension(format!("{}.meta.json", format.extension()));
    let meta = serde_json::to_string_pretty(&inst.meta())?;
    std::fs::write(&meta_path, meta).map_err(|e| Error::io(meta_path, e))?;
    Ok(())
}

/// Solver-neutral view of a parsed model file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TextModel {
    pub objective: BTreeMap<String, f64>,
    pub rows: Vec<TextRow>,
    /// (lower, upper); absent variables default to [0, ∞).
    pub bounds: BTreeMap<String, (f64, Option<f64>)>,
    pub integers: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TextRow {
    pub name: String,
    pub coefs: BTreeMap<String, f64>,
    pub sense: Sense,
    pub rhs: f64,
}

impl TextModel {
    /// The instance as this module's readers would see it.
    pub fn from_instance(inst: &IpInstance) -> TextModel {
        let name = |i: u32| inst.vars[i as usize].name.clone();
        let mut m = TextModel::default();
        for &(i, c) in &inst.objective {
            *m.objective.entry(name(i)).or_default() += c as f64;
        }
        for r in &inst.rows {
            m.rows.push(TextRow {
                name: r.name.clone(),
                coefs: r.coefs.iter().map(|&(i, c)| (name(i), c as f64)).collect(),
                sense: r.sense,
                rhs: r.rhs as f64,
            });
        }
        for v in &inst.vars {
            let ub = v.ub.map(|u| u as f64).or(if v.kind == VarKind::Binary { Some(1.0) } else { None });
            if (v.lb, ub) != (0, None) {
                m.bounds.insert(v.name.clone(), (v.lb as f64, ub));
            }
            if v.kind == VarKind::Binary {
                m.integers.insert(v.name.clone());
            }
        }
        m
    }
}

fn parse_num(t: &str) -> Result<f64> {
    match t.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        _ => t.parse().map_err(|_| Error::Parse(format!("bad number {t:?}"))),
    }
}

fn is_num(t: &str) -> bool {
    parse_num(t).is_ok()
}

#[derive(PartialEq, Clone, Copy)]
enum Section {
    Head,
    Objective,
    Rows,
    Bounds,
    Integers,
    Binaries,
    End,
}

fn section(line: &str) -> Option<Section> {
    match line.trim().to_ascii_lowercase().as_str() {
        "minimize" | "minimise" | "min" => Some(Section::Objective),
        "subject to" | "such that" | "st" | "s.t." => Some(Section::Rows),
        "bounds" | "bound" => Some(Section::Bounds),
        "general" | "generals" | "gen" | "integers" => Some(Section::Integers),
        "binary" | "binaries" | "bin" => Some(Section::Binaries),
        "end" => Some(Section::End),
        _ => None,
    }
}

/// Splits `a x + 3 y - z` into (coefficient, name) pairs.
fn linear(tokens: &[String]) -> Result<BTreeMap<String, f64>> {
    let mut out: BTreeMap<String, f64> = BTreeMap::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    for t in tokens {
        match t.as_str() {
            "+" => {}
            "-" => sign = -sign,
            t if is_num(t) => coef = Some(coef.unwrap_or(1.0) * parse_num(t)?),
            name => {
                *out.entry(name.to_string()).or_default() += sign * coef.unwrap_or(1.0);
                sign = 1.0;
                coef = None;
            }
        }
    }
    if coef.is_some() {
        return Err(Error::Parse("constant terms are not supported".into()));
    }
    Ok(out)
}

fn tokens(s: &str) -> Vec<String> {
    let mut spaced = String::with_capacity(s.len() + 8);
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '<' | '>' | '=' => {
                spaced.push(' ');
                spaced.push(c);
                if chars.peek() == Some(&'=') {
                    spaced.push(chars.next().unwrap());
                }
                spaced.push(' ');
            }
            '+' | '-' => {
                // keep exponent signs attached
                if spaced.ends_with(['e', 'E']) && spaced.chars().rev().nth(1).is_some_and(|p| p.is_ascii_digit()) {
                    spaced.push(c);
                } else {
                    spaced.push(' ');
                    spaced.push(c);
                    spaced.push(' ');
                }
            }
            ':' => spaced.push_str(" : "),
            _ => spaced.push(c),
        }
    }
    spaced.split_whitespace().map(str::to_string).collect()
}

fn sense_of(t: &str) -> Option<Sense> {
    match t {
        "<=" | "<" | "=<" => Some(Sense::Le),
        ">=" | ">" | "=>" => Some(Sense::Ge),
        "=" => Some(Sense::Eq),
        _ => None,
    }
}

/// Reads a CPLEX LP file (minimisation only).
pub fn parse_lp(text: &str) -> Result<TextModel> {
    let mut m = TextModel::default();
    let mut sec = Section::Head;
    let mut pending: Vec<String> = Vec::new();
    let mut statements: Vec<(Section, Vec<String>)> = Vec::new();
    for raw in text.lines() {
        let line = raw.split('\\').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        if let Some(s) = section(line) {
            if !pending.is_empty() {
                statements.push((sec, std::mem::take(&mut pending)));
            }
            sec = s;
            continue;
        }
        if line.trim_start().to_ascii_lowercase().starts_with("maximize") {
            return Err(Error::Parse("maximisation is not supported".into()));
        }
        let toks = tokens(line);
        // A constraint or bound ends at its right-hand side; a new one
        // starts with a `name:` label.
        let starts_new = toks.len() >= 2 && toks[1] == ":";
        if matches!(sec, Section::Rows | Section::Objective) && starts_new && !pending.is_empty() {
            statements.push((sec, std::mem::take(&mut pending)));
        }
        match sec {
            Section::Bounds | Section::Integers | Section::Binaries => statements.push((sec, toks)),
            _ => pending.extend(toks),
        }
    }
    if !pending.is_empty() {
        statements.push((sec, pending));
    }
    let mut row_ix = 0;
    for (sec, toks) in statements {
        match sec {
            Section::Head | Section::End => {}
            Section::Objective => {
                let body = if toks.len() >= 2 && toks[1] == ":" { &toks[2..] } else { &toks[..] };
                for (k, v) in linear(body)? {
                    if v != 0.0 {
                        *m.objective.entry(k).or_default() += v;
                    }
                }
            }
            Section::Rows => {
                let (name, body) = if toks.len() >= 2 && toks[1] == ":" {
                    (toks[0].clone(), &toks[2..])
                } else {
                    (format!("r_{row_ix}"), &toks[..])
                };
                row_ix += 1;
                let pos = body
                    .iter()
                    .position(|t| sense_of(t).is_some())
                    .ok_or_else(|| Error::Parse(format!("row {name} has no relation")))?;
                let rhs_toks = &body[pos + 1..];
                let rhs = match rhs_toks {
                    [v] => parse_num(v)?,
                    [s, v] if s == "-" => -parse_num(v)?,
                    [s, v] if s == "+" => parse_num(v)?,
                    _ => return Err(Error::Parse(format!("row {name} has a malformed right-hand side"))),
                };
                m.rows.push(TextRow { name, coefs: linear(&body[..pos])?, sense: sense_of(&body[pos]).unwrap(), rhs });
            }
            Section::Bounds => bound(&mut m, &toks)?,
            Section::Integers => {
                m.integers.extend(toks);
            }
            Section::Binaries => {
                for t in toks {
                    m.bounds.insert(t.clone(), merge_binary(m.bounds.get(&t)));
                    m.integers.insert(t);
                }
            }
        }
    }
    Ok(m)
}

fn merge_binary(prev: Option<&(f64, Option<f64>)>) -> (f64, Option<f64>) {
    match prev {
        Some(&(lb, Some(ub))) => (lb, Some(ub)),
        Some(&(lb, None)) => (lb, Some(1.0)),
        None => (0.0, Some(1.0)),
    }
}

fn signed(toks: &[String]) -> Result<(f64, usize)> {
    match toks {
        [s, v, ..] if s == "-" && is_num(v) => Ok((-parse_num(v)?, 2)),
        [s, v, ..] if s == "+" && is_num(v) => Ok((parse_num(v)?, 2)),
        [v, ..] if is_num(v) => Ok((parse_num(v)?, 1)),
        _ => Err(Error::Parse(format!("expected a number in bound {toks:?}"))),
    }
}

fn bound(m: &mut TextModel, toks: &[String]) -> Result<()> {
    let bad = || Error::Parse(format!("malformed bound {:?}", toks.join(" ")));
    if toks.len() == 2 && toks[1].eq_ignore_ascii_case("free") {
        m.bounds.insert(toks[0].clone(), (f64::NEG_INFINITY, None));
        return Ok(());
    }
    let entry = |m: &mut TextModel, v: &str| *m.bounds.entry(v.to_string()).or_insert((0.0, None));
    if !toks.is_empty() && !is_num(&toks[0]) && toks[0] != "-" && toks[0] != "+" {
        // x op v
        let v = toks[0].clone();
        let op = toks.get(1).and_then(|t| sense_of(t)).ok_or_else(bad)?;
        let (val, _) = signed(&toks[2..])?;
        let (mut lb, mut ub) = entry(m, &v);
        match op {
            Sense::Le => ub = Some(val),
            Sense::Ge => lb = val,
            Sense::Eq => {
                lb = val;
                ub = Some(val);
            }
        }
        m.bounds.insert(v, (lb, ub));
        return Ok(());
    }
    // v op x [op v]
    let (lo, used) = signed(toks)?;
    let op = toks.get(used).and_then(|t| sense_of(t)).ok_or_else(bad)?;
    let v = toks.get(used + 1).ok_or_else(bad)?.clone();
    let (mut lb, mut ub) = entry(m, &v);
    match op {
        Sense::Le => lb = lo,
        Sense::Ge => ub = Some(lo),
        Sense::Eq => {
            lb = lo;
            ub = Some(lo);
        }
    }
    if let Some(op2) = toks.get(used + 2).and_then(|t| sense_of(t)) {
        let (hi, _) = signed(&toks[used + 3..])?;
        match op2 {
            Sense::Le => ub = Some(hi),
            Sense::Ge => lb = hi,
            Sense::Eq => return Err(bad()),
        }
    }
    m.bounds.insert(v, (lb, ub));
    Ok(())
}

/// Reads a free-format MPS file.
pub fn parse_mps(text: &str) -> Result<TextModel> {
    let mut m = TextModel::default();
    let mut sec = "";
    let mut objective_row = String::new();
    let mut row_pos: BTreeMap<String, usize> = BTreeMap::new();
    let mut in_int = false;
    for raw in text.lines() {
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if !raw.starts_with(' ') {
            sec = toks[0];
            if sec == "ENDATA" {
                break;
            }
            continue;
        }
        match sec {
            "ROWS" => {
                let [kind, name] = toks[..] else { return Err(Error::Parse(format!("bad ROWS line {raw:?}"))) };
                let sense = match kind {
                    "N" => {
                        if objective_row.is_empty() {
                            objective_row = name.to_string();
                        }
                        continue;
                    }
                    "L" => Sense::Le,
                    "G" => Sense::Ge,
                    "E" => Sense::Eq,
                    _ => return Err(Error::Parse(format!("bad row type {kind:?}"))),
                };
                row_pos.insert(name.to_string(), m.rows.len());
                m.rows.push(TextRow { name: name.to_string(), coefs: BTreeMap::new(), sense, rhs: 0.0 });
            }
            "COLUMNS" => {
                if toks.len() >= 3 && toks[1] == "'MARKER'" {
                    in_int = toks[2] == "'INTORG'";
                    continue;
                }
                let col = toks[0];
                if in_int {
                    m.integers.insert(col.to_string());
                    m.bounds.entry(col.to_string()).or_insert((0.0, Some(1.0)));
                }
                for pair in toks[1..].chunks(2) {
                    let [row, v] = pair else { return Err(Error::Parse(format!("bad COLUMNS line {raw:?}"))) };
                    let v = parse_num(v)?;
                    if *row == objective_row {
                        if v != 0.0 {
                            *m.objective.entry(col.to_string()).or_default() += v;
                        }
                    } else {
                        let k = *row_pos.get(*row).ok_or_else(|| Error::Parse(format!("unknown row {row:?}")))?;
                        m.rows[k].coefs.insert(col.to_string(), v);
                    }
                }
            }
            "RHS" => {
                for pair in toks[1..].chunks(2) {
                    let [row, v] = pair else { return Err(Error::Parse(format!("bad RHS line {raw:?}"))) };
                    if let Some(&k) = row_pos.get(*row) {
                        m.rows[k].rhs = parse_num(v)?;
                    }
                }
            }
            "BOUNDS" => {
                let kind = toks[0];
                let col = toks.get(2).ok_or_else(|| Error::Parse(format!("bad BOUNDS line {raw:?}")))?.to_string();
                let v = toks.get(3).map(|t| parse_num(t)).transpose()?;
                let e = m.bounds.entry(col.clone()).or_insert((0.0, None));
                match (kind, v) {
                    ("UP", Some(v)) => e.1 = Some(v),
                    ("LO", Some(v)) => e.0 = v,
                    ("FX", Some(v)) => *e = (v, Some(v)),
                    ("BV", _) => {
                        *e = (0.0, Some(1.0));
                        m.integers.insert(col);
                    }
                    ("FR", _) => *e = (f64::NEG_INFINITY, None),
                    ("MI", _) => e.0 = f64::NEG_INFINITY,
                    ("PL", _) => e.1 = None,
                    _ => return Err(Error::Parse(format!("bad bound {raw:?}"))),
                }
            }
            _ => {}
        }
    }
    m.bounds.retain(|_, b| *b != (0.0, None));
    Ok(m)
}
