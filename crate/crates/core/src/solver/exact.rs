//! Exact solves through an external MIP binary (CBC by default). The model
//! goes out as an LP file, the solution comes back through one of the
//! solution readers, and the objective is recomputed by the direct
//! evaluator before anything is returned.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{to_f64, SolveReport, SolveStatus, StageSolution, TracePoint};
use crate::catalog::{check_stage_hard, compile_stage, evaluate_stage, CompiledStage, Penalty};
use crate::domain::{Roster, Stage, WardConfig};
use crate::encoder::lp::{render, ModelFormat};
use crate::encoder::{encode_compiled, IpInstance};
use crate::error::{Error, Result};

/// How the external binary writes its solution file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionFormat {
    /// `Status - objective value V` then `index name value reduced-cost`.
    #[default]
    Cbc,
    /// `# status`, `# objective V` comment lines then `name value` pairs.
    NameValue,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExactOptions {
    pub time_limit: f64,
    pub threads: u32,
    /// Binary to run; located with [`find_cbc`] when absent.
    pub binary: Option<PathBuf>,
    /// Argument template replacing the CBC defaults. `{model}`,
    /// `{solution}` and `{time}` are substituted.
    pub args: Option<Vec<String>>,
    pub solution_format: SolutionFormat,
    pub model_format: ModelFormat,
    /// Keep the model, solution and log in this directory.
    pub keep_files: Option<PathBuf>,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            time_limit: 60.0,
            threads: 1,
            binary: None,
            args: None,
            solution_format: SolutionFormat::Cbc,
            model_format: ModelFormat::Lp,
            keep_files: None,
        }
    }
}

impl ExactOptions {
    pub fn with_time(time_limit: f64) -> Self {
        ExactOptions { time_limit, ..Default::default() }
    }
}

const PULP_CBC: &str = "pulp/solverdir/cbc/linux/i64/cbc";

/// `ROSTRA_CBC`, then `cbc` on PATH, then a CBC shipped inside a Python
/// PuLP install.
pub fn find_cbc() -> Result<PathBuf> {
    if let Some(p) = std::env::var_os("ROSTRA_CBC") {
        let p = PathBuf::from(p);
        return if p.is_file() { Ok(p) } else { Err(Error::SolverNotFound) };
    }
    if let Some(path) = std::env::var_os("PATH") {
        for dir in std::env::split_paths(&path) {
            let p = dir.join("cbc");
            if p.is_file() {
                return Ok(p);
            }
        }
    }
    for root in ["/usr/local/lib", "/usr/lib"] {
        let Ok(entries) = std::fs::read_dir(root) else { continue };
        let mut dirs: Vec<PathBuf> = entries.flatten().map(|e| e.path()).collect();
        dirs.sort();
        for d in dirs {
            for sub in ["site-packages", "dist-packages"] {
                let p = d.join(sub).join(PULP_CBC);
                if p.is_file() {
                    return Ok(p);
                }
            }
        }
    }
    Err(Error::SolverNotFound)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSolution {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub values: BTreeMap<String, f64>,
}

fn status_of(text: &str) -> SolveStatus {
    let t = text.to_ascii_lowercase();
    if t.contains("infeasible") {
        SolveStatus::InfeasibleHard
    } else if t.starts_with("optimal") {
        SolveStatus::Optimal
    } else {
        SolveStatus::Feasible
    }
}

pub fn parse_solution(text: &str, format: SolutionFormat) -> Result<ParsedSolution> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let mut values = BTreeMap::new();
    match format {
        SolutionFormat::Cbc => {
            let head = lines.next().ok_or_else(|| Error::SolverOutput("empty solution file".into()))?;
            let status = status_of(head);
            let objective = head
                .rsplit("objective value")
                .next()
                .filter(|_| head.contains("objective value"))
                .and_then(|v| v.trim().parse::<f64>().ok());
            for l in lines {
                let toks: Vec<&str> = l.trim_start_matches("**").split_whitespace().collect();
                if toks.len() < 3 {
                    return Err(Error::SolverOutput(format!("bad solution line {l:?}")));
                }
                let v = toks[2].parse::<f64>().map_err(|_| Error::SolverOutput(format!("bad value in {l:?}")))?;
                values.insert(toks[1].to_string(), v);
            }
            Ok(ParsedSolution { status, objective, values })
        }
        SolutionFormat::NameValue => {
            let mut status = SolveStatus::Feasible;
            let mut objective = None;
            for l in lines {
                if let Some(c) = l.strip_prefix('#') {
                    let c = c.trim();
                    if let Some(v) = c.strip_prefix("objective") {
                        objective = v.trim_start_matches([' ', '=', ':']).trim().parse().ok();
                    } else if let Some(s) = c.strip_prefix("status") {
                        status = status_of(s.trim_start_matches([' ', '=', ':']).trim());
                    }
                    continue;
                }
                let toks: Vec<&str> = l.split_whitespace().collect();
                let [name, v] = toks[..] else { return Err(Error::SolverOutput(format!("bad solution line {l:?}"))) };
                values.insert(name.to_string(), v.parse().map_err(|_| Error::SolverOutput(format!("bad value in {l:?}")))?);
            }
            Ok(ParsedSolution { status, objective, values })
        }
    }
}

/// Incumbent improvements from a CBC log.
fn cbc_trace(log: &str, offset: f64) -> Vec<TracePoint> {
    let mut out: Vec<TracePoint> = Vec::new();
    for l in log.lines() {
        let Some(rest) = l.split("Integer solution of ").nth(1) else { continue };
        let Some(obj) = rest.split_whitespace().next().and_then(|v| v.parse::<f64>().ok()) else { continue };
        let secs = l
            .rsplit('(')
            .next()
            .and_then(|t| t.split_whitespace().next())
            .and_then(|v| v.parse::<f64>().ok())
            .unwrap_or(0.0);
        let cost = obj + offset;
        if out.last().is_none_or(|p| cost < p.cost) {
            out.push(TracePoint { elapsed_s: secs, iteration: out.len() as u64, cost, objective: cost, hard: 0.0 });
        }
    }
    out
}

fn scratch_dir(opts: &ExactOptions) -> Result<(PathBuf, bool)> {
    if let Some(d) = &opts.keep_files {
        std::fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
        return Ok((d.clone(), false));
    }
    let d = std::env::temp_dir().join(format!("rostra-{}", uuid::Uuid::new_v4()));
    std::fs::create_dir_all(&d).map_err(|e| Error::io(&d, e))?;
    Ok((d, true))
}

fn run_binary(inst: &IpInstance, opts: &ExactOptions, dir: &Path) -> Result<(ParsedSolution, String, f64)> {
    let binary = match &opts.binary {
        Some(b) => b.clone(),
        None => find_cbc()?,
    };
    let model = dir.join(format!("model.{}", opts.model_format.extension()));
    let solution = dir.join("solution.txt");
    std::fs::write(&model, render(inst, opts.model_format)).map_err(|e| Error::io(&model, e))?;
    let _ = std::fs::remove_file(&solution);
    let time = format!("{}", opts.time_limit);
    let args: Vec<String> = match &opts.args {
        Some(t) => t
            .iter()
            .map(|a| {
                a.replace("{model}", &model.to_string_lossy())
                    .replace("{solution}", &solution.to_string_lossy())
                    .replace("{time}", &time)
            })
            .collect(),
        None => vec![
            model.to_string_lossy().into_owned(),
            "-sec".into(),
            time,
            "-threads".into(),
            opts.threads.max(1).to_string(),
            "-ratioGap".into(),
            "0".into(),
            "-allowableGap".into(),
            "0".into(),
            "-solve".into(),
            "-solu".into(),
            solution.to_string_lossy().into_owned(),
        ],
    };
    let start = Instant::now();
    let out = Command::new(&binary).args(&args).output().map_err(|e| Error::io(&binary, e))?;
    let elapsed = start.elapsed().as_secs_f64();
    let log = String::from_utf8_lossy(&out.stdout).into_owned();
    let _ = std::fs::write(dir.join("solver.log"), &log);
    let text = std::fs::read_to_string(&solution).map_err(|_| {
        Error::SolverOutput(format!(
            "no solution file (exit {:?}): {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr).lines().last().unwrap_or("")
        ))
    })?;
    let mut parsed = parse_solution(&text, opts.solution_format)?;
    if log.contains("Stopped on time") || text.starts_with("Stopped on time") {
        if parsed.status == SolveStatus::Optimal {
            parsed.status = SolveStatus::Feasible;
        }
    } else if parsed.status == SolveStatus::Feasible && log.contains("Optimal solution found") {
        parsed.status = SolveStatus::Optimal;
    }
    Ok((parsed, log, elapsed))
}

/// Runs the external solver on an instance and returns every variable value
/// as written by the solver, unchecked.
pub fn run_solver(inst: &IpInstance, opts: &ExactOptions) -> Result<ParsedSolution> {
    if opts.time_limit.is_nan() || opts.time_limit <= 0.0 {
        return Err(Error::BadTimeLimit);
    }
    let (dir, scratch) = scratch_dir(opts)?;
    let result = run_binary(inst, opts, &dir);
    if scratch {
        let _ = std::fs::remove_dir_all(&dir);
    }
    result.map(|(parsed, _, _)| parsed)
}

/// Solves an encoded instance and checks the answer against the direct
/// evaluator. With an optimal status, a disagreement between the solver's
/// objective and the recomputed one is an error.
pub fn solve_instance(
    inst: &IpInstance,
    compiled: &CompiledStage,
    cfg: &WardConfig,
    base: &Roster,
    opts: &ExactOptions,
) -> Result<StageSolution> {
    if opts.time_limit.is_nan() || opts.time_limit <= 0.0 {
        return Err(Error::BadTimeLimit);
    }
    let (dir, scratch) = scratch_dir(opts)?;
    let result = run_binary(inst, opts, &dir);
    if scratch {
        let _ = std::fs::remove_dir_all(&dir);
    }
    let (parsed, log, elapsed) = result?;
    let offset = to_f64(inst.objective_offset);
    let engine = if opts.args.is_some() { "external" } else { "cbc" };
    let mut report = SolveReport {
        stage: inst.stage,
        engine: engine.into(),
        status: parsed.status,
        objective: None,
        hard_violations: 0,
        elapsed_s: elapsed,
        iterations: 0,
        seed: None,
        trace: cbc_trace(&log, offset),
    };
    if parsed.status == SolveStatus::InfeasibleHard {
        return Ok(StageSolution { roster: None, report, breakdown: None, hard_records: Vec::new() });
    }
    let mut x = vec![0.0; inst.cell_count() * 10];
    for (k, v) in x.iter_mut().enumerate() {
        *v = parsed.values.get(&inst.vars[k].name).copied().unwrap_or(0.0);
    }
    let roster = match inst.roster_from_values(&x, base) {
        Ok(r) => r,
        Err(e) if parsed.status == SolveStatus::Feasible => {
            tracing::debug!("no usable incumbent: {e}");
            report.status = SolveStatus::Timeout;
            return Ok(StageSolution { roster: None, report, breakdown: None, hard_records: Vec::new() });
        }
        Err(e) => return Err(e),
    };
    let breakdown = evaluate_stage(inst.stage, &roster, cfg)?;
    let hard_records = check_stage_hard(inst.stage, &roster, cfg)?;
    let mut evaluated = breakdown.objective;
    if inst.probe_mode {
        evaluated += compiled.hard_excess(roster.cells()) * cfg.weights.probe;
    }
    if report.status == SolveStatus::Optimal {
        let solver = parsed.objective.unwrap_or(0.0) + offset;
        let e = to_f64(evaluated);
        if (solver - e).abs() > 1e-6 * (1.0 + e.abs()) {
            return Err(Error::ObjectiveMismatch { solver, evaluated: e });
        }
        if !inst.probe_mode && !hard_records.is_empty() {
            return Err(Error::SolverOutput(format!(
                "optimal roster breaks {} hard rule(s), first {}",
                hard_records.len(),
                hard_records[0].constraint
            )));
        }
    }
    if !inst.probe_mode && !hard_records.is_empty() {
        report.status = SolveStatus::Timeout;
    }
    if let Some(last) = report.trace.last_mut() {
        last.objective = to_f64(breakdown.objective);
    }
    report.objective = Some(breakdown.objective);
    report.hard_violations = hard_records.len();
    Ok(StageSolution { roster: Some(roster), report, breakdown: Some(breakdown), hard_records })
}

/// Encodes and solves one stage. Cells fixed by `wishes` (see
/// [`crate::encoder::free_mask`]) stay as they are.
pub fn solve_exact(stage: Stage, cfg: &WardConfig, wishes: &Roster, opts: &ExactOptions) -> Result<StageSolution> {
    if opts.time_limit.is_nan() || opts.time_limit <= 0.0 {
        return Err(Error::BadTimeLimit);
    }
    cfg.validate()?;
    crate::encoder::check_stage_input(cfg, wishes)?;
    let compiled = compile_stage(stage, cfg);
    let inst = encode_compiled(&compiled, cfg, wishes, false)?;
    solve_instance(&inst, &compiled, cfg, wishes, opts)
}

/// Exact objective of an instance at a roster, by the program's own rows.
pub fn program_objective(inst: &IpInstance, compiled: &CompiledStage, roster: &Roster) -> Penalty {
    let v = inst.values_for(roster, compiled);
    inst.objective_at(&v)
}
