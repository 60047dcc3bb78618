//! Batch front end and service launcher.
//!
//! Exit codes: 0 success, 2 hard conflicts (probe failure or an infeasible
//! stage), 3 solver stopped without a hard-feasible roster, 4 I/O error,
//! 1 anything else.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rostra::domain::{Roster, Stage, WardConfig};
use rostra::encoder::lp::ModelFormat;
use rostra::io::{self, RosterFormat, SymbolMap};
use rostra::pipeline::{Session, SolverChoice};
use rostra::service::{self, ServiceConfig};
use rostra::solver::{ExactOptions, Fixing, HeuristicOptions, SolveStatus, StageSolution};
use rostra::{Error, Result};

#[derive(Parser)]
#[command(name = "rostra", version, about = "Two-stage nurse rostering")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the night stage from a condition file and a wish grid.
    Night {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        wishes: PathBuf,
        /// Run the hard-conflict probe first and stop on conflicts.
        #[arg(long)]
        probe: bool,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Place 12h before night starts and solve the day stage on an edited night roster.
    Day {
        #[command(flatten)]
        input: Input,
        /// Edited night roster, CSV grid or structured JSON.
        #[arg(long)]
        edited: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Report hard conflicts in the wishes (plus optional extra fixings).
    Probe {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        wishes: PathBuf,
        #[arg(long, value_enum, default_value = "night")]
        stage: StageArg,
        /// CSV with columns nurse,date,symbol.
        #[arg(long)]
        fixings: Option<PathBuf>,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Write a stage's program (lp, mps) or the wish roster (csv, json).
    Export {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        wishes: PathBuf,
        #[arg(long, value_enum, default_value = "night")]
        stage: StageArg,
        #[arg(long, default_value = "lp")]
        format: String,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Run the HTTP service (ROSTRA_DATA_DIR, ROSTRA_TOKEN, ROSTRA_WORKERS).
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        #[arg(long)]
        workers: Option<usize>,
    },
}

#[derive(Args)]
struct Input {
    /// Condition file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Extra code-to-symbol map (TOML, "code" = "symbol").
    #[arg(long)]
    symbol_map: Option<PathBuf>,
    /// Soft weight overrides (TOML keyed by constraint id).
    #[arg(long)]
    weights: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Time limit in seconds.
    #[arg(long, default_value_t = 60.0)]
    time: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "heuristic")]
    solver: SolverArg,
    /// Heuristic iteration budget; runs within it are reproducible.
    #[arg(long)]
    iterations: Option<u64>,
    /// Output directory.
    #[arg(long, short, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Heuristic,
    Exact,
}

#[derive(Clone, Copy, ValueEnum)]
enum StageArg {
    Night,
    Day,
}

impl From<StageArg> for Stage {
    fn from(s: StageArg) -> Stage {
        match s {
            StageArg::Night => Stage::Night,
            StageArg::Day => Stage::Day,
        }
    }
}

impl SolveArgs {
    fn choice(&self) -> SolverChoice {
        match self.solver {
            SolverArg::Exact => SolverChoice::Exact(ExactOptions::with_time(self.time)),
            SolverArg::Heuristic => {
                let mut o = HeuristicOptions { time_limit: self.time, seed: self.seed, ..Default::default() };
                if let Some(i) = self.iterations {
                    o.iterations = i;
                }
                SolverChoice::Heuristic(o)
            }
        }
    }
}

enum Failure {
    Conflicts(String),
    Timeout(String),
    Err(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ProbeFailed(_) => Failure::Conflicts(e.to_string()),
            e => Failure::Err(e),
        }
    }
}

fn load_config(input: &Input) -> Result<WardConfig> {
    let (mut cfg, warnings) = io::load_condition_file(&io::read_text(&input.config)?)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    if let Some(p) = &input.weights {
        cfg.weights.alpha.extend(io::load_weight_table(&io::read_text(p)?)?);
    }
    Ok(cfg)
}

fn load_roster(input: &Input, cfg: &WardConfig, path: &Path) -> Result<Roster> {
    let text = io::read_text(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        return io::import_roster(&text, RosterFormat::StructuredJson, cfg);
    }
    let map = match &input.symbol_map {
        Some(p) => SymbolMap::from_toml(&io::read_text(p)?)?,
        None => SymbolMap::identity(),
    };
    let (r, warnings) = io::load_wish_table(&text, cfg, &map)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    Ok(r)
}

fn out_file(dir: &Path, name: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(dir.join(name))
}

/// Writes roster, report, trace and feedback files for a finished stage.
fn write_stage(dir: &Path, stage: Stage, s: &Session, sol: &StageSolution) -> Result<()> {
    let p = |x: &str| out_file(dir, &format!("{stage}_{x}"));
    if let Some(r) = &sol.roster {
        io::write_text(&p("roster.csv")?, &io::export_roster(r, RosterFormat::GridCsv)?)?;
        io::write_text(&p("roster.json")?, &io::export_roster(r, RosterFormat::StructuredJson)?)?;
        let fb = s.feedback(stage)?;
        let text: String = fb.iter().map(|f| format!("[{:?}] {}\n", f.severity, f.message)).collect();
        io::write_text(&p("feedback.txt")?, &text)?;
    }
    io::write_text(&p("report.json")?, &(serde_json::to_string_pretty(sol)? + "\n"))?;
    io::write_text(&p("trace.csv")?, &sol.report.trace_csv())?;
    Ok(())
}

fn check_outcome(sol: &StageSolution) -> std::result::Result<(), Failure> {
    let r = &sol.report;
    eprintln!(
        "{} stage: {} objective {} hard {} in {:.1}s",
        r.stage,
        r.status,
        r.objective.map(|o| o.to_string()).unwrap_or_else(|| "-".into()),
        r.hard_violations,
        r.elapsed_s
    );
    match r.status {
        SolveStatus::Optimal | SolveStatus::Feasible => Ok(()),
        SolveStatus::InfeasibleHard => Err(Failure::Conflicts(format!("{} stage has no hard-feasible roster", r.stage))),
        SolveStatus::Timeout => Err(Failure::Timeout(format!("{} stage stopped without a hard-feasible roster", r.stage))),
    }
}

fn read_fixings(path: &Path) -> Result<Vec<Fixing>> {
    let text = io::read_text(path)?;
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

fn run(cli: Cli) -> std::result::Result<(), Failure> {
    match cli.cmd {
        Cmd::Night { input, wishes, probe, solve } => {
            let cfg = load_config(&input)?;
            let w = load_roster(&input, &cfg, &wishes)?;
            let mut s = Session::new("cli", cfg, w)?;
            let choice = solve.choice();
            if probe {
                let rep = s.probe(Stage::Night, &[], &choice.probe_engine())?;
                print!("{}", rep.render());
                if !rep.feasible {
                    return Err(Failure::Conflicts(format!("{} hard conflict(s)", rep.records.len())));
                }
            }
            let sol = s.run_night(&choice, None)?.clone();
            write_stage(&solve.out, Stage::Night, &s, &sol)?;
            check_outcome(&sol)
        }
        Cmd::Day { input, edited, solve } => {
            let cfg = load_config(&input)?;
            let r = load_roster(&input, &cfg, &edited)?;
            let mut s = Session::from_edited_night("cli", cfg, r)?;
            let pp = s.post_process_longday()?.clone();
            io::write_text(&out_file(&solve.out, "postprocess.json")?, &(serde_json::to_string_pretty(&pp).map_err(Error::from)? + "\n"))?;
            let sol = s.run_day(&solve.choice(), None)?.clone();
            write_stage(&solve.out, Stage::Day, &s, &sol)?;
            check_outcome(&sol)?;
            let rep = s.final_report()?;
            io::write_text(&out_file(&solve.out, "final_report.txt")?, &rep.render())?;
            io::write_text(
                &out_file(&solve.out, "final_report.json")?,
                &(serde_json::to_string_pretty(&rep).map_err(Error::from)? + "\n"),
            )?;
            Ok(())
        }
        Cmd::Probe { input, wishes, stage, fixings, solve } => {
            let cfg = load_config(&input)?;
            let w = load_roster(&input, &cfg, &wishes)?;
            let fx = fixings.as_deref().map(read_fixings).transpose()?.unwrap_or_default();
            let stage = Stage::from(stage);
            let rep = rostra::solver::probe_hard(stage, &cfg, &w, &fx, &solve.choice().probe_engine())?;
            print!("{}", rep.render());
            io::write_text(
                &out_file(&solve.out, &format!("{stage}_probe.json"))?,
                &(serde_json::to_string_pretty(&rep).map_err(Error::from)? + "\n"),
            )?;
            if rep.feasible {
                Ok(())
            } else {
                Err(Failure::Conflicts(format!("{} hard conflict(s)", rep.records.len())))
            }
        }
        Cmd::Export { input, wishes, stage, format, out } => {
            let cfg = load_config(&input)?;
            let w = load_roster(&input, &cfg, &wishes)?;
            if let Ok(rf) = format.parse::<RosterFormat>() {
                io::write_text(&out, &io::export_roster(&w, rf)?)?;
                return Ok(());
            }
            let mf: ModelFormat = format.parse()?;
            let inst = rostra::encoder::encode_stage(stage.into(), &cfg, &w, false)?;
            rostra::encoder::lp::write_instance(&inst, mf, &out)?;
            Ok(())
        }
        Cmd::Serve { addr, workers } => {
            tracing_subscriber::fmt()
                .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
                .init();
            let mut cfg = ServiceConfig::from_env();
            if let Some(w) = workers {
                cfg.workers = w;
            }
            let rt = tokio::runtime::Runtime::new().map_err(Error::from)?;
            rt.block_on(service::serve(&addr, cfg))?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Conflicts(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Timeout(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 4 } else { 1 })
        }
    }
}
