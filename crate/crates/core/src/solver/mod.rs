//! Exact solving through an external MIP binary, simulated annealing over
//! the compiled terms, the hard-constraint relaxation probe and a
//! brute-force enumerator for very small wards.

pub mod anneal;
pub mod brute;
pub mod exact;
pub mod probe;

use serde::{Deserialize, Serialize};

use crate::catalog::{Penalty, SoftPenaltyBreakdown, ViolationRecord};
use crate::domain::{Roster, Stage};

pub use anneal::{solve_heuristic, AnnealState, HeuristicOptions, Move};
pub use brute::{brute_force, BruteOptimum};
pub use exact::{find_cbc, parse_solution, run_solver, solve_exact, solve_instance, ExactOptions, ParsedSolution, SolutionFormat};
pub use probe::{probe_hard, Fixing, ProbeEngine, ProbeRecord, ProbeReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SolveStatus {
    Optimal,
    /// A hard-feasible roster without a proof of optimality.
    Feasible,
    /// The hard rules cannot all hold with these fixings.
    InfeasibleHard,
    /// Stopped without a hard-feasible roster.
    Timeout,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "OPTIMAL",
            SolveStatus::Feasible => "FEASIBLE",
            SolveStatus::InfeasibleHard => "INFEASIBLE_HARD",
            SolveStatus::Timeout => "TIMEOUT",
        })
    }
}

/// One incumbent improvement. `cost` is what the search minimises and never
/// increases along a trace; `objective` is the soft part alone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub elapsed_s: f64,
    pub iteration: u64,
    pub cost: f64,
    pub objective: f64,
    pub hard: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub stage: Stage,
    pub engine: String,
    pub status: SolveStatus,
    /// Soft objective of the returned roster, recomputed by the evaluator.
    #[serde(with = "opt_penalty")]
    pub objective: Option<Penalty>,
    /// Number of hard-rule violation records of the returned roster.
    pub hard_violations: usize,
    pub elapsed_s: f64,
    pub iterations: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub trace: Vec<TracePoint>,
}

impl SolveReport {
    /// Trace as CSV: elapsed_s,iteration,cost,objective,hard.
    pub fn trace_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let _ = w.write_record(["elapsed_s", "iteration", "cost", "objective", "hard"]);
        for p in &self.trace {
            let _ = w.write_record([
                format!("{:.3}", p.elapsed_s),
                p.iteration.to_string(),
                p.cost.to_string(),
                p.objective.to_string(),
                p.hard.to_string(),
            ]);
        }
        String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
    }

    pub fn trace_is_non_increasing(&self) -> bool {
        self.trace.windows(2).all(|w| w[1].cost <= w[0].cost)
    }
}

/// A solve's roster (when one was found) with its evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageSolution {
    pub roster: Option<Roster>,
    pub report: SolveReport,
    pub breakdown: Option<SoftPenaltyBreakdown>,
    pub hard_records: Vec<ViolationRecord>,
}

mod opt_penalty {
    use crate::catalog::{penalty_serde, Penalty};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Penalty>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(p) => s.serialize_str(&penalty_serde::format(p)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Penalty>, D::Error> {
        let t: Option<String> = Option::deserialize(d)?;
        t.map(|t| crate::domain::ward::ratio_opt::parse(&t).map_err(serde::de::Error::custom)).transpose()
    }
}

pub(crate) fn to_f64(p: Penalty) -> f64 {
    *p.numer() as f64 / *p.denom() as f64
}
