//! Shared fixtures for the integration and acceptance suites.
#![allow(dead_code)]

pub mod catalog_cases;
pub mod epigraph;
pub mod fixture;
pub mod flow;
pub mod incremental;
pub mod monotone;
pub mod probe_cases;

use rand::Rng;
use rostra::catalog::{evaluate_stage, Penalty};
use rostra::domain::{Provenance, Roster, ShiftSymbol, Stage, WardConfig};
use rostra::pipeline::Session;
use rostra::solver::{brute_force, solve_exact, BruteOptimum, ExactOptions, SolveStatus};
use rostra::synth;

pub fn cbc_available() -> bool {
    rostra::solver::find_cbc().is_ok()
}

/// A random ward of at most 4 nurses and 7 target days whose free cells
/// are few enough to enumerate. Wish density rises until they are.
pub fn oracle_case(seed: u64, cap: u64) -> (WardConfig, Roster, Option<BruteOptimum>) {
    let nurses = 2 + (seed % 3) as usize;
    let days = 3 + (seed % 5) as usize;
    let cfg = synth::random_ward(seed, nurses, days);
    let mut density = 0.15;
    loop {
        let w = synth::random_wishes(&cfg, seed, density);
        match brute_force(Stage::Night, &cfg, &w, cap) {
            Ok(b) => return (cfg, w, b),
            Err(_) => density += 0.1,
        }
    }
}

/// Day-stage input built the way the pipeline builds it: the night optimum
/// (or the raw wishes when the night stage has none), 12h placement, then
/// random unset target cells pinned to 日 or 休 until enumeration fits.
pub fn day_oracle_case(seed: u64, cap: u64) -> (WardConfig, Roster, Option<BruteOptimum>) {
    let (cfg, wishes, night) = oracle_case(seed, cap);
    let base = night.map(|b| b.roster).unwrap_or(wishes);
    let mut s = Session::from_edited_night("oracle", cfg.clone(), base).unwrap();
    s.post_process_longday().unwrap();
    let mut input = s.stage_input(Stage::Day).unwrap();
    let mut rng = synth::rng(seed.wrapping_add(0x5eed));
    loop {
        match brute_force(Stage::Day, &cfg, &input, cap) {
            Ok(b) => return (cfg, input, b),
            Err(_) => {
                let open: Vec<(usize, usize)> = (0..cfg.nurses.len())
                    .flat_map(|n| cfg.calendar.target_range().map(move |d| (n, d)))
                    .filter(|&(n, d)| input.get(n, d) == ShiftSymbol::Unset)
                    .collect();
                let (n, d) = open[rng.random_range(0..open.len())];
                let sym = if rng.random_bool(0.6) { ShiftSymbol::Day } else { ShiftSymbol::Off };
                input.set(n, d, sym, Provenance::Wish);
            }
        }
    }
}

/// Even seeds exercise the night stage, odd seeds the day stage.
pub fn oracle_stage(seed: u64) -> Stage {
    if seed % 2 == 0 {
        Stage::Night
    } else {
        Stage::Day
    }
}

pub struct OracleOutcome {
    pub stage: Stage,
    pub brute: Option<Penalty>,
    pub exact: Option<Penalty>,
    pub evaluated: Option<Penalty>,
    pub status: SolveStatus,
}

pub fn oracle_compare(seed: u64, cap: u64) -> OracleOutcome {
    let stage = oracle_stage(seed);
    let (cfg, w, brute) = match stage {
        Stage::Night => oracle_case(seed, cap),
        Stage::Day => day_oracle_case(seed, cap),
    };
    let sol = solve_exact(stage, &cfg, &w, &ExactOptions::with_time(60.0)).expect("exact solve");
    let evaluated = sol.roster.as_ref().map(|r| evaluate_stage(stage, r, &cfg).unwrap().objective);
    OracleOutcome {
        stage,
        brute: brute.map(|b| b.objective),
        exact: sol.report.objective,
        evaluated,
        status: sol.report.status,
    }
}
