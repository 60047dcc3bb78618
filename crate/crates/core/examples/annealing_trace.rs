//! Run the local-search solver on the 29-nurse ward and write its
//! incumbent trace (time, iteration, cost) as CSV for plotting.
//!
//! cargo run --release --example annealing_trace [seconds]

use rostra::domain::Stage;
use rostra::solver::{solve_heuristic, HeuristicOptions, TracePoint};
use rostra::synth;

fn main() -> rostra::Result<()> {
    let seconds: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(60.0);
    let cfg = synth::ward_a("2024-11", &[])?;
    let wishes = synth::wishes(&cfg, 11, 3);
    let opts = HeuristicOptions { time_limit: seconds, iterations: 1_000_000, seed: 3, ..Default::default() };
    let progress = |p: &TracePoint| eprintln!("{:>7.2}s it {:>8} cost {:>12.1} hard {}", p.elapsed_s, p.iteration, p.cost, p.hard);
    let sol = solve_heuristic(Stage::Night, &cfg, &wishes, &opts, Some(&progress))?;
    let r = &sol.report;
    let objective = r.objective.map_or("-".into(), |o| o.to_string());
    println!("{} after {} iterations: objective {objective}, {} hard violation(s)", r.status, r.iterations, r.hard_violations);
    assert!(r.trace_is_non_increasing());
    let path = std::env::temp_dir().join("rostra_night_trace.csv");
    rostra::io::write_text(&path, &r.trace_csv())?;
    println!("trace: {}", path.display());
    Ok(())
}
